use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use pcfgset::generator::{split_corpus, SplitFractions};
use pcfgset::naturalise::{naturalise_pipeline, NaturaliseConfig, NaturalisedProfile};
use pcfgset::rng::substream;
use pcfgset::Alphabet;
use serde_json::json;

use super::generate::load_spec;
use crate::dataset::DatasetWriter;
use crate::options::require_seed;

#[derive(Args, Debug)]
pub struct NaturaliseArgs {
    #[arg(long, env = "PCFGSET_SEED")]
    pub seed: Option<u64>,
    /// CSV histogram with `length,depth,count` rows. Defaults to the shipped reference.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Size of the output corpus.
    #[arg(long, default_value_t = 10_000)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Trees drawn per iteration.
    #[arg(long, default_value_t = 100_000)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 5)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 200_000)]
    pub pilot_size: usize,
}

pub const PROFILE_FILE: &str = "params.json";
/// One row per iteration; `kl` is the matched-subsample divergence the loop
/// minimises and `sample_kl` that of the whole regenerated sample.
pub const TRACE_FILE: &str = "kl_trace.csv";

pub fn run(args: NaturaliseArgs) -> Result<()> {
    let seed = require_seed(args.seed)?;
    let spec = load_spec(args.spec.as_deref())?;
    let config = NaturaliseConfig {
        sample_size: args.sample_size,
        output_size: args.size,
        pilot_size: args.pilot_size,
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        ..NaturaliseConfig::default()
    };
    let outcome = naturalise_pipeline(&spec, &config, &Alphabet::standard(), seed)?;
    let corpus = split_corpus(outcome.corpus, SplitFractions::default(), &mut substream(seed, 2))?;

    let mut out = DatasetWriter::create(&args.out, "naturalise", seed)?;
    for name in ["train", "valid", "test"] {
        out.split(name, &corpus.split(name))?;
    }
    let profile = NaturalisedProfile { params: outcome.params.clone(), increments: outcome.increments };
    out.json(PROFILE_FILE, &profile)?;

    let mut trace = csv::Writer::from_writer(Vec::new());
    trace.write_record(["iteration", "kl", "sample_kl", "length_increment", "depth_increment", "subsample_size"])?;
    for row in &outcome.trace[1..] {
        trace.write_record([
            row.iteration.to_string(),
            row.subsample_kl.to_string(),
            row.kl.to_string(),
            row.increments.length.to_string(),
            row.increments.depth.to_string(),
            row.subsample_size.to_string(),
        ])?;
    }
    let text = String::from_utf8(trace.into_inner()?)?;
    let lines: Vec<String> = text.lines().map(str::to_string).collect();
    out.lines(TRACE_FILE, &lines)?;

    out.manifest.params = Some(outcome.params);
    out.manifest.details = json!({
        "increments": outcome.increments,
        "initial_kl": outcome.trace[0].kl,
        "final_kl": outcome.final_kl,
        "iterations": outcome.trace.len() - 1,
        "spec": args.spec.as_ref().map_or("reference".to_string(), |p| p.display().to_string()),
    });
    out.finish()?;
    println!("iteration  kl          sample_kl     increments");
    for row in &outcome.trace {
        println!(
            "{:<10} {:<11.6} {:<13.6} ({}, {})",
            row.iteration, row.subsample_kl, row.kl, row.increments.length, row.increments.depth
        );
    }
    println!("final corpus KL {:.6}; wrote {}", outcome.final_kl, args.out.display());
    Ok(())
}
