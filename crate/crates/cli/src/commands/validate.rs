use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use pcfgset::io::{sha256_hex, Manifest, MANIFEST_FILE};
use pcfgset::validate::{validate_corpus, Violation};

use super::testbuild::read_exceptions;
use crate::dataset;

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Exception sidecar whose targets are accepted in place of the oracle's.
    #[arg(long)]
    pub exceptions: Option<PathBuf>,
    /// Violations printed before the listing is cut short.
    #[arg(long, default_value_t = 50)]
    pub max_listed: usize,
}

/// Returns whether the corpus passed.
pub fn run(args: ValidateArgs) -> Result<bool> {
    let lexicon = dataset::lexicon_for(&args.data)?;
    let entries = match &args.exceptions {
        Some(path) => read_exceptions(path)?.entries,
        None => Vec::new(),
    };
    let splits = dataset::present_splits(&args.data);
    anyhow::ensure!(!splits.is_empty(), "no .src/.tgt splits in {}", args.data.display());
    let names: Vec<&str> = splits.iter().map(String::as_str).collect();
    let mut report = validate_corpus(&args.data, &names, &lexicon, &entries)?;
    report.violations.extend(hash_mismatches(&args.data)?);
    for v in report.violations.iter().take(args.max_listed) {
        println!("{}:{}: {}", v.file, v.line, v.message);
    }
    if report.violations.len() > args.max_listed {
        println!("... {} more", report.violations.len() - args.max_listed);
    }
    if report.passed() {
        println!("PASS: {} samples in {}", report.samples, names.join(", "));
    } else {
        println!("FAIL: {} violations in {} samples", report.violations.len(), report.samples);
    }
    Ok(report.passed())
}

/// Files whose content no longer matches the manifest.
fn hash_mismatches(dir: &std::path::Path) -> Result<Vec<Violation>> {
    if !dir.join(MANIFEST_FILE).exists() {
        return Ok(Vec::new());
    }
    let manifest = Manifest::read(dir)?;
    let mut out = Vec::new();
    for (file, expected) in &manifest.files {
        let message = match std::fs::read(dir.join(file)) {
            Ok(bytes) if sha256_hex(&bytes) == *expected => continue,
            Ok(_) => "content differs from the manifest hash".to_string(),
            Err(e) => format!("cannot read file listed in the manifest: {e}"),
        };
        out.push(Violation { file: file.clone(), line: 0, message });
    }
    Ok(out)
}
