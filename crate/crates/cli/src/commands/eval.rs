use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use pcfgset::generator::{make_primitive_length_corpus, LengthProbe, LongArgument, Sample};
use pcfgset::harness::{
    run_accuracy, run_consistency, run_eos_analysis, run_length_generalisation, run_localism, run_overgeneralisation,
    EvaluationReport, FaultyOracleAdapter, FileAdapter, LengthCappedOracle, ModelAdapter, OracleAdapter, ReportBody,
    RunMetadata, Stratification, SubprocessAdapter,
};
use pcfgset::io::{checkpoint_files, read_json, read_lines, read_split, write_json};
use pcfgset::language::{join_symbols, tokenize, tokens_to_string};
use pcfgset::rng::substream;
use pcfgset::testsuite::{ConsistencyPair, HeldOutPair, SynonymMap};
use pcfgset::{Alphabet, BaseFunction, Token};

use super::testbuild::{read_exceptions, EXCEPTIONS_FILE, PAIRS_FILE, SYNONYM_TEST_SPLIT};
use crate::dataset::{self, SYNONYMS_FILE};
use crate::options::AdapterSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Accuracy,
    Consistency,
    Localism,
    OvergenProfile,
    LengthGen,
    Eos,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Corpus directory. Its manifest, if any, is verified first.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub split: String,
    /// `oracle`, `file:<path>`, `cmd:<command>`, `faulty:<rate>` or `capped:<length>`.
    #[arg(long, default_value = "oracle")]
    pub adapter: AdapterSpec,
    /// Directory of `<n>_<label>.pred` files aligned with the exceptions.
    #[arg(long)]
    pub checkpoints: Option<PathBuf>,
    /// Exception sidecar; defaults to `exceptions.json` in the data directory.
    #[arg(long)]
    pub exceptions: Option<PathBuf>,
    /// Prediction file for `eos`; otherwise the adapter is queried.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Report directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Model processes for `cmd:` adapters.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Seconds to wait for each reply from a `cmd:` adapter.
    #[arg(long, default_value_t = 30.0)]
    pub timeout: f64,
    #[arg(long, env = "PCFGSET_SEED")]
    pub seed: Option<u64>,
    /// Argument lengths probed by `length-gen`, as `min-max`.
    #[arg(long, default_value = "1-10")]
    pub lengths: String,
    /// Samples per (function, length) cell for `length-gen`.
    #[arg(long, default_value_t = 100)]
    pub per_length: usize,
}

fn build_adapter(args: &EvalArgs, sources: &[String]) -> Result<Box<dyn ModelAdapter>> {
    Ok(match &args.adapter {
        AdapterSpec::Oracle => Box::new(OracleAdapter),
        AdapterSpec::Faulty(rate) => Box::new(FaultyOracleAdapter::new(*rate, args.seed.unwrap_or(0))),
        AdapterSpec::LengthCapped(cap) => Box::new(LengthCappedOracle { cap: *cap }),
        AdapterSpec::File(path) => {
            let predictions = read_lines(path)?;
            let label = path.display().to_string();
            Box::new(FileAdapter::new(&label, sources, &predictions)?)
        }
        AdapterSpec::Command(command) => {
            let timeout = Duration::from_secs_f64(args.timeout);
            Box::new(SubprocessAdapter::new(command, timeout, args.jobs.max(1))?)
        }
    })
}

fn data_dir(args: &EvalArgs) -> Result<&Path> {
    args.data.as_deref().context("--data is required for this mode")
}

fn load_samples(dir: &Path, split: &str) -> Result<Vec<Sample>> {
    Ok(read_split(dir, split, &dataset::lexicon_for(dir)?)?)
}

fn source_lines(samples: &[Sample]) -> Vec<String> {
    samples.iter().map(Sample::src_text).collect()
}

fn parse_range(text: &str) -> Result<Vec<usize>> {
    let (lo, hi) = text.split_once('-').unwrap_or((text, text));
    let (lo, hi): (usize, usize) = (lo.trim().parse()?, hi.trim().parse()?);
    if lo == 0 || hi < lo {
        bail!("bad length range {text:?}");
    }
    Ok((lo..=hi).collect())
}

fn consistency_pairs(dir: &Path) -> Result<(Vec<ConsistencyPair>, Vec<BaseFunction>)> {
    let lexicon = dataset::lexicon_for(dir)?;
    let base = read_split(dir, "test", &lexicon)?;
    let synonyms = read_lines(&dir.join(format!("{SYNONYM_TEST_SPLIT}.src")))?;
    if synonyms.len() != base.len() {
        bail!("{} synonym inputs for {} test inputs", synonyms.len(), base.len());
    }
    let pairs = base
        .into_iter()
        .zip(&synonyms)
        .map(|(s, syn)| Ok(ConsistencyPair { id: s.id, base: s.src, synonym: tokenize(syn, &lexicon)?, tgt: s.tgt }))
        .collect::<Result<Vec<_>>>()?;
    let functions = if dir.join(SYNONYMS_FILE).exists() {
        read_json::<SynonymMap>(&dir.join(SYNONYMS_FILE))?.entries().keys().copied().collect()
    } else {
        SynonymMap::defaults().entries().keys().copied().collect()
    };
    Ok((pairs, functions))
}

fn predictions_as_lines(adapter: &mut dyn ModelAdapter, sources: &[Vec<Token>]) -> Vec<String> {
    adapter.predict_all(sources).into_iter().map(|r| r.map(|p| p.join(" ")).unwrap_or_default()).collect()
}

pub fn run(args: EvalArgs) -> Result<()> {
    let manifest = match &args.data {
        Some(dir) => dataset::verify(dir)?,
        None => None,
    };
    let (body, adapter_id) = match args.mode {
        Mode::Accuracy => {
            let dir = data_dir(&args)?;
            let samples = load_samples(dir, &args.split)?;
            if samples.is_empty() {
                bail!("split {} is empty", args.split);
            }
            let mut adapter = build_adapter(&args, &source_lines(&samples))?;
            let mut strata = Stratification::standard();
            strata.push(Stratification::Function);
            if dir.join(PAIRS_FILE).exists() {
                strata.push(Stratification::Pair(read_json::<Vec<HeldOutPair>>(&dir.join(PAIRS_FILE))?));
            }
            (ReportBody::Accuracy(run_accuracy(&mut adapter, &samples, &strata)), adapter.id())
        }
        Mode::Consistency => {
            let dir = data_dir(&args)?;
            let (pairs, functions) = consistency_pairs(dir)?;
            let mut sources: Vec<String> = pairs.iter().map(|p| tokens_to_string(&p.base)).collect();
            sources.extend(pairs.iter().map(|p| tokens_to_string(&p.synonym)));
            let mut adapter = build_adapter(&args, &sources)?;
            (ReportBody::Consistency(run_consistency(&mut adapter, &pairs, &functions)), adapter.id())
        }
        Mode::Localism => {
            let dir = data_dir(&args)?;
            let samples = load_samples(dir, &args.split)?;
            let mut adapter = build_adapter(&args, &source_lines(&samples))?;
            (ReportBody::Localism(run_localism(&mut adapter, &samples)), adapter.id())
        }
        Mode::OvergenProfile => {
            let path = match (&args.exceptions, &args.data) {
                (Some(p), _) => p.clone(),
                (None, Some(dir)) => dir.join(EXCEPTIONS_FILE),
                (None, None) => bail!("pass --exceptions or --data"),
            };
            let set = read_exceptions(&path)?;
            let (checkpoints, id) = match &args.checkpoints {
                Some(dir) => {
                    let files = checkpoint_files(dir)?;
                    if files.is_empty() {
                        bail!("no .pred files in {}", dir.display());
                    }
                    let checkpoints = files
                        .into_iter()
                        .map(|(ordinal, label, path)| Ok((format!("{ordinal}_{label}"), read_lines(&path)?)))
                        .collect::<Result<Vec<_>>>()?;
                    (checkpoints, format!("checkpoints:{}", dir.display()))
                }
                None => {
                    let lexicon = match &args.data {
                        Some(dir) => dataset::lexicon_for(dir)?,
                        None => SynonymMap::defaults().lexicon(),
                    };
                    let sources: Vec<String> = set.entries.iter().map(|e| e.src.clone()).collect();
                    let tokens = sources.iter().map(|s| tokenize(s, &lexicon)).collect::<Result<Vec<_>, _>>()?;
                    let mut adapter = build_adapter(&args, &sources)?;
                    let predictions = predictions_as_lines(adapter.as_mut(), &tokens);
                    (vec![("final".to_string(), predictions)], adapter.id())
                }
            };
            (ReportBody::OvergenProfile(run_overgeneralisation(&checkpoints, &set.entries)?), id)
        }
        Mode::LengthGen => {
            let seed = args.seed.unwrap_or(0);
            let lengths = parse_range(&args.lengths)?;
            let alphabet = Alphabet::standard();
            let probes = BaseFunction::ALL
                .into_iter()
                .enumerate()
                .map(|(i, f)| {
                    let mut rng = substream(seed, 100 + i as u64);
                    make_primitive_length_corpus(
                        f,
                        &lengths,
                        args.per_length,
                        LongArgument::First,
                        5,
                        &alphabet,
                        &mut rng,
                    )
                })
                .collect::<Result<Vec<LengthProbe>, _>>()?;
            let sources: Vec<String> =
                probes.iter().flat_map(|p| p.cells.iter().flat_map(|(_, s)| source_lines(s))).collect();
            let mut adapter = build_adapter(&args, &sources)?;
            (ReportBody::LengthGen { cells: run_length_generalisation(&mut adapter, &probes) }, adapter.id())
        }
        Mode::Eos => {
            let dir = data_dir(&args)?;
            let samples = load_samples(dir, &args.split)?;
            let targets: Vec<String> = samples.iter().map(|s| join_symbols(&s.tgt)).collect();
            let (predictions, id) = match &args.predictions {
                Some(path) => (read_lines(path)?, format!("file:{}", path.display())),
                None => {
                    let mut adapter = build_adapter(&args, &source_lines(&samples))?;
                    let sources: Vec<Vec<Token>> = samples.iter().map(|s| s.src.clone()).collect();
                    (predictions_as_lines(adapter.as_mut(), &sources), adapter.id())
                }
            };
            (ReportBody::Eos(run_eos_analysis(&predictions, &targets)?), id)
        }
    };

    let report = EvaluationReport::new(
        RunMetadata {
            seed: args.seed,
            adapter: adapter_id,
            dataset_hash: manifest.map(|m| m.dataset_hash()),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        body,
    );
    if let Some(out) = &args.out {
        fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
        write_json(&out.join("report.json"), &report)?;
        for (stem, text) in report.csv_tables() {
            fs::write(out.join(format!("{stem}.csv")), text)?;
        }
    }
    summarise(&report);
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |v| format!("{v:.4}"))
}

fn summarise(report: &EvaluationReport) {
    match &report.body {
        ReportBody::Accuracy(r) => {
            println!("accuracy {} ({} of {} correct, {} errors)", fmt_opt(r.accuracy), r.correct, r.count, r.errors)
        }
        ReportBody::Consistency(r) => println!(
            "consistency {:.4} over {} pairs (consistent and correct {:.4}, consistent and incorrect {:.4})",
            r.overall.consistency, r.overall.pairs, r.overall.consistent_correct, r.overall.consistent_incorrect
        ),
        ReportBody::Localism(r) => println!(
            "localism consistency {} over {} samples, {} steps on average, {} failures",
            fmt_opt(r.consistency),
            r.count,
            fmt_opt(r.mean_steps),
            r.failures
        ),
        ReportBody::OvergenProfile(r) => {
            for p in &r.profile {
                println!(
                    "{:<16} overgeneralised {:.4}  memorised {:.4}  other {:.4}",
                    p.checkpoint, p.overgeneralisation_frac, p.memorisation_frac, p.other_frac
                );
            }
            if let Some(peak) = &r.peak {
                println!("peak {:.4} at {}", peak.overgeneralisation_frac, peak.checkpoint);
            }
        }
        ReportBody::LengthGen { cells } => {
            for c in cells {
                println!("{:<14} length {:>3}  accuracy {}", c.function.name(), c.arg_length, fmt_opt(c.accuracy));
            }
        }
        ReportBody::Eos(r) => println!(
            "{} of {} wrong; {} prefixes ({}), {} substrings ({})",
            r.incorrect,
            r.total,
            r.prefix,
            fmt_opt(r.prefix_fraction),
            r.substring,
            fmt_opt(r.substring_fraction)
        ),
    }
}
