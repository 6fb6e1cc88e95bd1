use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use pcfgset::generator::{GrammarParams, Sample, UniquenessTracker};
use pcfgset::io::{read_json, Manifest};
use pcfgset::language::tokens_to_string;
use pcfgset::rng::substream;
use pcfgset::testsuite::{
    build_unroll_plan, exceptions_apply, make_consistency_pairs, productivity_split, substitutivity_equal,
    substitutivity_primitive, systematicity_split, ExceptionPair, HeldOutPair, SynonymMap,
    DEFAULT_PRODUCTIVITY_THRESHOLD, EXCEPTION_PERCENTAGES, PRIMITIVE_SYNONYM_FRACTION,
};
use pcfgset::Alphabet;
use serde::Serialize;
use serde_json::json;

use crate::dataset::{self, DatasetWriter, SYNONYMS_FILE};
use crate::options::{parse_pairs, parse_percentages, parse_synonyms, require_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Systematicity,
    Productivity,
    SubstitutivityEd,
    SubstitutivityPrim,
    Overgen,
    Localism,
}

#[derive(Args, Debug)]
pub struct TestbuildArgs {
    #[arg(long, value_enum)]
    pub test: TestKind,
    /// Base corpus directory written by `generate`.
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "PCFGSET_SEED")]
    pub seed: Option<u64>,
    /// Held-out pairs for systematicity, e.g. `swap:repeat,append:swap`.
    #[arg(long)]
    pub pairs: Option<String>,
    /// Functions that get synonyms, e.g. `swap,repeat` or `swap=swap_alt_syn`.
    #[arg(long)]
    pub synonyms: Option<String>,
    /// Exception percentages as fractions of the training set.
    #[arg(long)]
    pub exception_pct: Option<String>,
    #[arg(long, default_value_t = DEFAULT_PRODUCTIVITY_THRESHOLD)]
    pub threshold: usize,
    #[arg(long, default_value_t = 10_000)]
    pub test_size: usize,
}

pub const PAIRS_FILE: &str = "pairs.json";
pub const EXCEPTIONS_FILE: &str = "exceptions.json";
pub const UNROLL_FILE: &str = "unroll_plans.json";
pub const SYNONYM_TEST_SPLIT: &str = "test_syn";

struct Base {
    manifest: Option<Manifest>,
    splits: Vec<(String, Vec<Sample>)>,
}

impl Base {
    fn split(&self, name: &str) -> Result<&[Sample]> {
        self.splits
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s.as_slice())
            .with_context(|| format!("base corpus has no {name} split"))
    }

    /// Every sample, renumbered.
    fn pooled(&self) -> Vec<Sample> {
        let mut all: Vec<Sample> = self.splits.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
        for (i, s) in all.iter_mut().enumerate() {
            s.id = i;
        }
        all
    }

    fn params(&self) -> GrammarParams {
        self.manifest.as_ref().and_then(|m| m.params.clone()).unwrap_or_else(GrammarParams::naturalised)
    }

    fn tracker(&self) -> UniquenessTracker {
        UniquenessTracker::from_samples(self.splits.iter().flat_map(|(_, s)| s.iter()))
    }
}

#[derive(Serialize)]
struct PlanStep {
    path: Vec<usize>,
    round: usize,
}

#[derive(Serialize)]
struct PlanRecord {
    src: String,
    rounds: usize,
    steps: Vec<PlanStep>,
}

#[derive(Debug, Default)]
struct SplitStats {
    size: usize,
    avg_functions: f64,
    max_functions: usize,
    min_functions: usize,
    avg_length: f64,
    avg_depth: f64,
}

fn stats(samples: &[Sample]) -> SplitStats {
    if samples.is_empty() {
        return SplitStats::default();
    }
    let n = samples.len() as f64;
    let fns = samples.iter().map(|s| s.stats.num_functions);
    SplitStats {
        size: samples.len(),
        avg_functions: fns.clone().sum::<usize>() as f64 / n,
        max_functions: fns.clone().max().unwrap_or(0),
        min_functions: fns.min().unwrap_or(0),
        avg_length: samples.iter().map(|s| s.stats.length).sum::<usize>() as f64 / n,
        avg_depth: samples.iter().map(|s| s.stats.depth).sum::<usize>() as f64 / n,
    }
}

fn print_stats(splits: &[(&str, &[Sample])]) {
    println!(
        "{:<8} {:>8} {:>10} {:>8} {:>8} {:>10} {:>9}",
        "split", "samples", "functions", "min", "max", "length", "depth"
    );
    for (name, samples) in splits {
        let s = stats(samples);
        println!(
            "{:<8} {:>8} {:>10.2} {:>8} {:>8} {:>10.2} {:>9.2}",
            name, s.size, s.avg_functions, s.min_functions, s.max_functions, s.avg_length, s.avg_depth
        );
    }
}

fn stats_json(splits: &[(&str, &[Sample])]) -> serde_json::Value {
    splits
        .iter()
        .map(|(name, samples)| {
            let s = stats(samples);
            (
                name.to_string(),
                json!({
                    "samples": s.size,
                    "avg_functions": s.avg_functions,
                    "min_functions": s.min_functions,
                    "max_functions": s.max_functions,
                    "avg_length": s.avg_length,
                    "avg_depth": s.avg_depth,
                }),
            )
        })
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn synonym_map(arg: Option<&str>) -> Result<SynonymMap> {
    arg.map_or_else(|| Ok(SynonymMap::defaults()), parse_synonyms)
}

pub fn run(args: TestbuildArgs) -> Result<()> {
    let seed = require_seed(args.seed)?;
    let (manifest, splits) = dataset::load(&args.base)?;
    let base = Base { manifest, splits };
    let mut rng = substream(seed, 10);
    match args.test {
        TestKind::Systematicity => {
            let pairs = args.pairs.as_deref().map_or_else(|| Ok(HeldOutPair::defaults()), parse_pairs)?;
            let split = systematicity_split(&base.pooled(), &pairs, args.test_size, &mut rng)?;
            let mut out = DatasetWriter::create(&args.out, "testbuild systematicity", seed)?;
            out.owned_split("train", &split.train)?;
            out.owned_split("test", &split.test)?;
            out.json(PAIRS_FILE, &pairs)?;
            let table = [("train", split.train.as_slice()), ("test", split.test.as_slice())];
            out.manifest.details = json!({
                "test": "systematicity",
                "pairs": pairs.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "discarded": split.discarded,
                "stats": stats_json(&table),
            });
            out.finish()?;
            println!("held-out pairs: {}", pairs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            println!("discarded {}", split.discarded);
            print_stats(&table);
        }
        TestKind::Productivity => {
            let (train, test) = productivity_split(&base.pooled(), args.threshold)?;
            let mut out = DatasetWriter::create(&args.out, "testbuild productivity", seed)?;
            out.owned_split("train", &train)?;
            out.owned_split("test", &test)?;
            let table = [("train", train.as_slice()), ("test", test.as_slice())];
            out.manifest.details = json!({
                "test": "productivity",
                "threshold": args.threshold,
                "stats": stats_json(&table),
            });
            out.finish()?;
            println!("threshold: at most {} functions in train", args.threshold);
            print_stats(&table);
        }
        TestKind::SubstitutivityEd | TestKind::SubstitutivityPrim => {
            let map = synonym_map(args.synonyms.as_deref())?;
            let train = base.split("train")?;
            let (train, audit, label) = if args.test == TestKind::SubstitutivityEd {
                let (t, a) = substitutivity_equal(train, &map, &mut rng);
                (t, a, "substitutivity-ed")
            } else {
                let mut tracker = base.tracker();
                let (t, a) = substitutivity_primitive(
                    train,
                    &map,
                    PRIMITIVE_SYNONYM_FRACTION,
                    &base.params(),
                    &Alphabet::standard(),
                    &mut tracker,
                    &mut rng,
                )?;
                (t, a, "substitutivity-prim")
            };
            let pairs = make_consistency_pairs(base.split("test")?, &map);
            let test_lines = |f: &dyn Fn(&pcfgset::testsuite::ConsistencyPair) -> String| -> Vec<String> {
                pairs.pairs.iter().map(f).collect()
            };
            let mut out = DatasetWriter::create(&args.out, &format!("testbuild {label}"), seed)?;
            out.owned_split("train", &train)?;
            if let Ok(valid) = base.split("valid") {
                out.owned_split("valid", valid)?;
            }
            out.lines("test.src", &test_lines(&|p| tokens_to_string(&p.base)))?;
            out.lines("test.tgt", &test_lines(&|p| pcfgset::language::join_symbols(&p.tgt)))?;
            out.lines(&format!("{SYNONYM_TEST_SPLIT}.src"), &test_lines(&|p| tokens_to_string(&p.synonym)))?;
            out.manifest.sizes.insert("test".into(), pairs.pairs.len());
            out.manifest.sizes.insert(SYNONYM_TEST_SPLIT.into(), pairs.pairs.len());
            out.json(SYNONYMS_FILE, &map)?;
            out.manifest.details = json!({
                "test": label,
                "audit": audit,
                "test_without_synonyms": pairs.skipped.len(),
            });
            out.finish()?;
            println!("{:<16} {:<20} {:>11} {:>10} {:>7}", "function", "synonym", "occurrences", "rewritten", "added");
            for a in &audit {
                println!(
                    "{:<16} {:<20} {:>11} {:>10} {:>7}",
                    a.function.name(),
                    a.synonym,
                    a.occurrences,
                    a.rewritten,
                    a.added
                );
            }
            println!("train {} samples; {} consistency pairs", train.len(), pairs.pairs.len());
        }
        TestKind::Overgen => {
            let percentages =
                args.exception_pct.as_deref().map_or_else(|| Ok(EXCEPTION_PERCENTAGES.to_vec()), parse_percentages)?;
            if percentages.is_empty() {
                bail!("no exception percentages given");
            }
            let pairs = ExceptionPair::defaults();
            let train = base.split("train")?;
            let params = base.params();
            println!(
                "{:<10} {:<46} {:>8} {:>8} {:>9} {:>8} {:>12}",
                "pct", "pair", "outer", "inner", "required", "existing", "synthesized"
            );
            for pct in percentages {
                let mut tracker = base.tracker();
                let mut rng = substream(seed, 20 + (pct * 1e6).round() as u64);
                let (variant, set) =
                    exceptions_apply(train, &pairs, pct, &params, &Alphabet::standard(), &mut tracker, &mut rng)?;
                let dir = args.out.join(percentage_dir(pct));
                let mut out = DatasetWriter::create(&dir, "testbuild overgen", seed)?;
                out.owned_split("train", &variant)?;
                for name in ["valid", "test"] {
                    if let Ok(s) = base.split(name) {
                        out.owned_split(name, s)?;
                    }
                }
                out.lines("exceptions.src", &set.entries.iter().map(|e| e.src.clone()).collect::<Vec<_>>())?;
                out.json(EXCEPTIONS_FILE, &set)?;
                out.manifest.details = json!({ "test": "overgen", "percentage": pct, "exceptions": set.entries.len() });
                out.finish()?;
                for a in &set.audit {
                    println!(
                        "{:<10} {:<46} {:>8} {:>8} {:>9} {:>8} {:>12}",
                        pct,
                        a.pair.to_string(),
                        a.outer_occurrences,
                        a.inner_occurrences,
                        a.required,
                        a.existing,
                        a.synthesized
                    );
                }
            }
        }
        TestKind::Localism => {
            let test = base.split("test")?;
            let plans = test
                .iter()
                .filter(|s| !s.tree.is_leaf())
                .map(|s| {
                    let plan = build_unroll_plan(&s.tree)?;
                    Ok(PlanRecord {
                        src: s.src_text(),
                        rounds: plan.rounds(),
                        steps: plan
                            .steps
                            .iter()
                            .map(|st| PlanStep { path: st.path.clone(), round: st.round })
                            .collect(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = DatasetWriter::create(&args.out, "testbuild localism", seed)?;
            out.owned_split("test", test)?;
            out.json(UNROLL_FILE, &plans)?;
            let mean_steps = plans.iter().map(|p| p.steps.len()).sum::<usize>() as f64 / plans.len().max(1) as f64;
            out.manifest.details = json!({ "test": "localism", "plans": plans.len(), "mean_steps": mean_steps });
            out.finish()?;
            println!("{} unroll plans, {:.2} steps on average", plans.len(), mean_steps);
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

/// `pct_0.0001` etc.
pub fn percentage_dir(pct: f64) -> String {
    format!("pct_{pct}")
}

/// Exception entries from an `exceptions.json` sidecar.
pub fn read_exceptions(path: &Path) -> Result<pcfgset::testsuite::ExceptionSet> {
    read_json(path).with_context(|| format!("cannot read exceptions from {}", path.display()))
}
