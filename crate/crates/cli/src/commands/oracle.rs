use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use pcfgset::io::read_json;
use pcfgset::language::join_symbols;
use pcfgset::testsuite::SynonymMap;
use pcfgset::{evaluate, parse, tokenize};

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Extra synonyms (a `synonyms.json` sidecar) on top of the defaults.
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
}

/// Answers one input per line on standard input with its meaning, flushing
/// after every line. Inputs that do not parse get an empty line.
pub fn run(args: OracleArgs) -> Result<()> {
    let mut lexicon = SynonymMap::defaults().lexicon();
    if let Some(path) = &args.synonyms {
        let map: SynonymMap = read_json(path)?;
        for (function, name) in map.entries() {
            lexicon.register_synonym(name, *function)?;
        }
    }
    let stdin = io::stdin();
    let mut stdout = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        let answer = tokenize(&line, &lexicon)
            .map_err(anyhow::Error::from)
            .and_then(|t| Ok(parse(&t)?))
            .and_then(|tree| Ok(evaluate(&tree)?))
            .map(|out| join_symbols(&out))
            .unwrap_or_default();
        if writeln!(stdout, "{answer}").and_then(|_| stdout.flush()).is_err() {
            break;
        }
    }
    Ok(())
}
