use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use pcfgset::generator::{generate_corpus, split_corpus, CorpusConfig, GrammarParams, SplitFractions};
use pcfgset::io::read_json;
use pcfgset::naturalise::{generate_matched_corpus, DistributionSpec, NaturalisedProfile};
use pcfgset::rng::substream;
use pcfgset::Alphabet;
use serde_json::json;

use crate::dataset::DatasetWriter;
use crate::options::require_seed;

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, env = "PCFGSET_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Naturalised profile (`params.json` from `naturalise`) or plain grammar
    /// parameters. Defaults to the shipped profile.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// (length, depth) histogram the profile is thinned towards.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Shapes sampled to estimate per-cell acceptance rates.
    #[arg(long, default_value_t = 200_000)]
    pub pilot_size: usize,
    /// Sample straight from the grammar without thinning.
    #[arg(long)]
    pub unmatched: bool,
}

pub enum Source {
    Profile(NaturalisedProfile),
    Plain(GrammarParams),
}

pub fn load_params(path: Option<&Path>) -> Result<Source> {
    let Some(path) = path else {
        return Ok(Source::Profile(NaturalisedProfile::reference()));
    };
    let value: serde_json::Value = read_json(path)?;
    if value.get("increments").is_some() {
        let profile: NaturalisedProfile =
            serde_json::from_value(value).with_context(|| format!("bad profile in {}", path.display()))?;
        Ok(Source::Profile(profile))
    } else {
        let params: GrammarParams =
            serde_json::from_value(value).with_context(|| format!("bad grammar parameters in {}", path.display()))?;
        Ok(Source::Plain(params))
    }
}

pub fn load_spec(path: Option<&Path>) -> Result<DistributionSpec> {
    match path {
        Some(p) => DistributionSpec::from_path(p).with_context(|| format!("cannot read spec {}", p.display())),
        None => Ok(DistributionSpec::reference()),
    }
}

pub fn run(args: GenerateArgs) -> Result<()> {
    let seed = require_seed(args.seed)?;
    let alphabet = Alphabet::standard();
    let mut rng = substream(seed, 0);
    let source = load_params(args.params.as_deref())?;
    let (corpus, details) = match source {
        Source::Profile(profile) if !args.unmatched => {
            let spec = load_spec(args.spec.as_deref())?;
            let corpus = generate_matched_corpus(
                &profile.params,
                &spec,
                profile.increments,
                args.pilot_size,
                args.size,
                &alphabet,
                CorpusConfig::default(),
                seed,
                &mut rng,
            )?;
            let details = json!({
                "sampling": "matched",
                "increments": profile.increments,
                "pilot_size": args.pilot_size,
                "spec": args.spec.as_ref().map_or("reference".to_string(), |p| p.display().to_string()),
            });
            (corpus, details)
        }
        Source::Profile(NaturalisedProfile { params, .. }) | Source::Plain(params) => {
            let corpus = generate_corpus(&params, args.size, &alphabet, CorpusConfig::default(), seed, &mut rng)?;
            (corpus, json!({ "sampling": "grammar" }))
        }
    };
    let corpus = split_corpus(corpus, SplitFractions::default(), &mut substream(seed, 1))?;

    let mut out = DatasetWriter::create(&args.out, "generate", seed)?;
    for name in ["train", "valid", "test"] {
        out.split(name, &corpus.split(name))?;
    }
    out.manifest.params = Some(corpus.params.clone());
    out.manifest.details = details;
    let manifest = out.finish()?;
    println!(
        "wrote {} samples to {} (train {}, valid {}, test {})",
        corpus.len(),
        args.out.display(),
        manifest.sizes["train"],
        manifest.sizes["valid"],
        manifest.sizes["test"]
    );
    Ok(())
}
