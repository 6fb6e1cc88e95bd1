use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use pcfgset::io::read_json;
use pcfgset::metrics::{synonym_distance_report, EmbeddingTable};
use pcfgset::testsuite::SynonymMap;
use pcfgset::BaseFunction;

#[derive(Args, Debug)]
pub struct DistancesArgs {
    /// Whitespace-separated `token v1 v2 ...` rows.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Synonym sidecar; defaults to the standard synonyms.
    #[arg(long)]
    pub synonyms: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: DistancesArgs) -> Result<()> {
    let table = EmbeddingTable::from_path(&args.embeddings)?;
    let map: SynonymMap = match &args.synonyms {
        Some(p) => read_json(p)?,
        None => SynonymMap::defaults(),
    };
    let report = synonym_distance_report(&table, &map, &BaseFunction::ALL)?;
    println!("{:<16} {:<20} {:>9} {:>9}", "function", "synonym", "synonym", "others");
    for r in &report.rows {
        println!("{:<16} {:<20} {:>9.4} {:>9.4}", r.function.name(), r.synonym, r.synonym_distance, r.other_distance);
    }
    println!("{:<37} {:>9.4} {:>9.4}", "mean", report.mean_synonym_distance, report.mean_other_distance);
    if let Some(out) = &args.out {
        pcfgset::io::write_json(out, &report)?;
    }
    Ok(())
}
