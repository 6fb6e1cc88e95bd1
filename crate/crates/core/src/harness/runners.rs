use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::adapter::{AdapterError, ModelAdapter};
use crate::generator::{LengthProbe, Sample};
use crate::language::{BaseFunction, Token};
use crate::metrics::{aggregate, consistency_scores, sequence_accuracy, ConsistencyScores, Stratum};
use crate::testsuite::{build_unroll_plan, contains_adjacent_pair, ConsistencyPair, ExceptionEntry, HeldOutPair};

/// A dimension along which accuracy is broken down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratification {
    Length,
    Depth,
    NumFunctions,
    /// The outermost function, synonyms reported under their own name.
    Function,
    /// Which held-out pair the input contains (`none` if none).
    Pair(Vec<HeldOutPair>),
}

impl Stratification {
    pub fn name(&self) -> &'static str {
        match self {
            Stratification::Length => "length",
            Stratification::Depth => "depth",
            Stratification::NumFunctions => "num_functions",
            Stratification::Function => "function",
            Stratification::Pair(_) => "pair",
        }
    }

    pub fn standard() -> Vec<Stratification> {
        vec![Stratification::Length, Stratification::Depth, Stratification::NumFunctions]
    }
}

/// Stratum labels; numbers sort numerically, names alphabetically after them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StratumKey {
    Number(usize),
    Name(String),
}

impl std::fmt::Display for StratumKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StratumKey::Number(n) => write!(f, "{n}"),
            StratumKey::Name(s) => f.write_str(s),
        }
    }
}

fn stratum_key(sample: &Sample, by: &Stratification) -> StratumKey {
    match by {
        Stratification::Length => StratumKey::Number(sample.stats.length),
        Stratification::Depth => StratumKey::Number(sample.stats.depth),
        Stratification::NumFunctions => StratumKey::Number(sample.stats.num_functions),
        Stratification::Function => {
            StratumKey::Name(sample.tree.function().map_or_else(|| "none".to_string(), |f| f.name().to_string()))
        }
        Stratification::Pair(pairs) => StratumKey::Name(
            pairs
                .iter()
                .find(|p| contains_adjacent_pair(&sample.src, std::slice::from_ref(p)))
                .map_or_else(|| "none".to_string(), |p| p.to_string()),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumRow {
    pub key: StratumKey,
    pub score: f64,
    pub count: usize,
}

/// Sequence accuracy with its breakdowns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub accuracy: Option<f64>,
    pub count: usize,
    pub correct: usize,
    /// Inputs the adapter failed on; they count as incorrect.
    pub errors: usize,
    pub strata: BTreeMap<String, Vec<StratumRow>>,
    /// Per-sample outputs in input order; `None` where the adapter failed.
    #[serde(skip)]
    pub predictions: Vec<Option<Vec<String>>>,
}

fn target_strings(sample: &Sample) -> Vec<String> {
    sample.tgt.iter().map(|s| s.to_string()).collect()
}

fn stratum_rows(strata: BTreeMap<StratumKey, Stratum>) -> Vec<StratumRow> {
    strata.into_iter().map(|(key, s)| StratumRow { key, score: s.score, count: s.count }).collect()
}

pub fn run_accuracy<A: ModelAdapter + ?Sized>(
    adapter: &mut A,
    samples: &[Sample],
    strata: &[Stratification],
) -> AccuracyReport {
    let sources: Vec<Vec<Token>> = samples.iter().map(|s| s.src.clone()).collect();
    let outputs = adapter.predict_all(&sources);
    let scores: Vec<bool> = outputs
        .iter()
        .zip(samples)
        .map(|(o, s)| o.as_ref().is_ok_and(|p| sequence_accuracy(p, &target_strings(s))))
        .collect();
    let mut breakdown = BTreeMap::new();
    for by in strata {
        let keys: Vec<StratumKey> = samples.iter().map(|s| stratum_key(s, by)).collect();
        let agg = aggregate(&scores, &keys).expect("one key per score");
        breakdown.insert(by.name().to_string(), stratum_rows(agg.strata));
    }
    let correct = scores.iter().filter(|s| **s).count();
    AccuracyReport {
        accuracy: (!samples.is_empty()).then(|| correct as f64 / samples.len() as f64),
        count: samples.len(),
        correct,
        errors: outputs.iter().filter(|o| o.is_err()).count(),
        strata: breakdown,
        predictions: outputs.into_iter().map(Result::ok).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub overall: ConsistencyScores,
    /// Scores over the pairs whose base input contains each mapped function.
    pub per_function: BTreeMap<String, ConsistencyScores>,
    pub errors: usize,
}

/// Compares the outputs for each base input and its synonym variant with each
/// other and with the target. A failed prediction makes its pair inconsistent.
pub fn run_consistency<A: ModelAdapter + ?Sized>(
    adapter: &mut A,
    pairs: &[ConsistencyPair],
    functions: &[BaseFunction],
) -> ConsistencyReport {
    let mut sources = Vec::with_capacity(2 * pairs.len());
    for p in pairs {
        sources.push(p.base.clone());
        sources.push(p.synonym.clone());
    }
    let outputs = adapter.predict_all(&sources);
    let errors = outputs.iter().filter(|o| o.is_err()).count();
    let targets: Vec<Vec<String>> = pairs.iter().map(|p| p.tgt.iter().map(|s| s.to_string()).collect()).collect();
    // a failed side never equals anything: give it a distinct marker per side
    let marker_a = vec!["<error-a>".to_string()];
    let marker_b = vec!["<error-b>".to_string()];
    let view = |i: usize| -> (&[String], &[String], &[String]) {
        let a = outputs[2 * i].as_deref().unwrap_or(&marker_a);
        let b = outputs[2 * i + 1].as_deref().unwrap_or(&marker_b);
        (a, b, targets[i].as_slice())
    };
    let overall = consistency_scores((0..pairs.len()).map(view));
    let mut per_function = BTreeMap::new();
    for f in functions {
        let idx: Vec<usize> = (0..pairs.len())
            .filter(|&i| pairs[i].base.iter().any(|t| t.as_function().is_some_and(|g| g.semantics() == *f)))
            .collect();
        if !idx.is_empty() {
            per_function.insert(f.name().to_string(), consistency_scores(idx.into_iter().map(view)));
        }
    }
    ConsistencyReport { overall, per_function, errors }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalismRow {
    pub id: usize,
    pub steps: usize,
    pub consistent: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalismReport {
    pub consistency: Option<f64>,
    pub count: usize,
    pub mean_steps: Option<f64>,
    pub failures: usize,
    /// Consistency by number of unrolling steps.
    pub by_steps: Vec<StratumRow>,
    pub rows: Vec<LocalismRow>,
}

/// Runs every input once directly and once constituent by constituent, each
/// intermediate output fed back as a literal, and compares the two results.
pub fn run_localism<A: ModelAdapter + ?Sized>(adapter: &mut A, samples: &[Sample]) -> LocalismReport {
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let plan = match build_unroll_plan(&s.tree) {
            Ok(p) => p,
            Err(e) => {
                rows.push(LocalismRow { id: s.id, steps: 0, consistent: false, failure: Some(e.to_string()) });
                continue;
            }
        };
        let direct = adapter.predict(&s.src);
        let unrolled = plan.execute(|tokens| adapter.predict(tokens).map_err(|e: AdapterError| e.to_string()));
        let (consistent, failure) = match (direct, unrolled) {
            (Ok(d), Ok(u)) => (u.output.iter().map(|x| x.to_string()).eq(d.iter().cloned()), None),
            (Err(e), _) => (false, Some(format!("direct prediction failed: {e}"))),
            (_, Err(e)) => (false, Some(e.to_string())),
        };
        rows.push(LocalismRow { id: s.id, steps: plan.steps.len(), consistent, failure });
    }
    let scores: Vec<bool> = rows.iter().map(|r| r.consistent).collect();
    let keys: Vec<StratumKey> = rows.iter().map(|r| StratumKey::Number(r.steps)).collect();
    let agg = aggregate(&scores, &keys).expect("one key per score");
    let n = rows.len();
    LocalismReport {
        consistency: agg.overall,
        count: n,
        mean_steps: (n > 0).then(|| rows.iter().map(|r| r.steps).sum::<usize>() as f64 / n as f64),
        failures: rows.iter().filter(|r| r.failure.is_some()).count(),
        by_steps: stratum_rows(agg.strata),
        rows,
    }
}

/// Shares of exceptions answered by the regular rule, by the exception, or
/// otherwise at one checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverallProfilePoint {
    pub checkpoint: String,
    pub overgeneralisation_frac: f64,
    pub memorisation_frac: f64,
    pub other_frac: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvergeneralisationPeak {
    /// 1-based position in the checkpoint order.
    pub ordinal: usize,
    pub checkpoint: String,
    pub overgeneralisation_frac: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvergeneralisationReport {
    pub exceptions: usize,
    pub profile: Vec<OverallProfilePoint>,
    pub peak: Option<OvergeneralisationPeak>,
}

/// `checkpoints` are `(label, predictions)` in training order, each aligned
/// with `exceptions`.
pub fn run_overgeneralisation(
    checkpoints: &[(String, Vec<String>)],
    exceptions: &[ExceptionEntry],
) -> Result<OvergeneralisationReport, AdapterError> {
    let mut profile = Vec::with_capacity(checkpoints.len());
    for (label, predictions) in checkpoints {
        if predictions.len() != exceptions.len() {
            return Err(AdapterError::LineCountMismatch { expected: exceptions.len(), found: predictions.len() });
        }
        let (mut over, mut memo) = (0usize, 0usize);
        for (p, e) in predictions.iter().zip(exceptions) {
            let p: Vec<&str> = p.split_whitespace().collect();
            if p == e.original_tgt.split_whitespace().collect::<Vec<_>>() {
                over += 1;
            } else if p == e.exception_tgt.split_whitespace().collect::<Vec<_>>() {
                memo += 1;
            }
        }
        let n = exceptions.len();
        let (o, m) = if n == 0 { (0.0, 0.0) } else { (over as f64 / n as f64, memo as f64 / n as f64) };
        let other = if n == 0 { 1.0 } else { (n - over - memo) as f64 / n as f64 };
        profile.push(OverallProfilePoint {
            checkpoint: label.clone(),
            overgeneralisation_frac: o,
            memorisation_frac: m,
            other_frac: other,
        });
    }
    let peak = profile
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &OverallProfilePoint)>, (i, p)| match best {
            Some((_, b)) if b.overgeneralisation_frac >= p.overgeneralisation_frac => best,
            _ => Some((i, p)),
        })
        .map(|(i, p)| OvergeneralisationPeak {
            ordinal: i + 1,
            checkpoint: p.checkpoint.clone(),
            overgeneralisation_frac: p.overgeneralisation_frac,
        });
    Ok(OvergeneralisationReport { exceptions: exceptions.len(), profile, peak })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthCell {
    pub function: BaseFunction,
    pub arg_length: usize,
    pub accuracy: Option<f64>,
    pub count: usize,
}

/// Accuracy per (function, argument length).
pub fn run_length_generalisation<A: ModelAdapter + ?Sized>(adapter: &mut A, probes: &[LengthProbe]) -> Vec<LengthCell> {
    let mut cells = Vec::new();
    for probe in probes {
        for (len, samples) in &probe.cells {
            let report = run_accuracy(adapter, samples, &[]);
            cells.push(LengthCell {
                function: probe.function,
                arg_length: *len,
                accuracy: report.accuracy,
                count: report.count,
            });
        }
    }
    cells
}

/// How many wrong answers are truncations of the right one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EosReport {
    pub total: usize,
    pub incorrect: usize,
    /// Wrong predictions that are a strict prefix of the target.
    pub prefix: usize,
    /// Wrong predictions that occur contiguously anywhere in the target.
    pub substring: usize,
    /// `None` when nothing was wrong.
    pub prefix_fraction: Option<f64>,
    pub substring_fraction: Option<f64>,
}

pub fn run_eos_analysis(predictions: &[String], targets: &[String]) -> Result<EosReport, AdapterError> {
    if predictions.len() != targets.len() {
        return Err(AdapterError::LineCountMismatch { expected: targets.len(), found: predictions.len() });
    }
    let (mut incorrect, mut prefix, mut substring) = (0, 0, 0);
    for (p, t) in predictions.iter().zip(targets) {
        let p: Vec<&str> = p.split_whitespace().collect();
        let t: Vec<&str> = t.split_whitespace().collect();
        if p == t {
            continue;
        }
        incorrect += 1;
        if p.len() < t.len() && t.starts_with(&p) {
            prefix += 1;
        }
        if p.len() < t.len() && (p.is_empty() || t.windows(p.len()).any(|w| w == p.as_slice())) {
            substring += 1;
        }
    }
    let frac = |k: usize| (incorrect > 0).then(|| k as f64 / incorrect as f64);
    Ok(EosReport {
        total: targets.len(),
        incorrect,
        prefix,
        substring,
        prefix_fraction: frac(prefix),
        substring_fraction: frac(substring),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::OracleAdapter;
    use crate::language::{parse, tokenize, Lexicon};

    fn sample(id: usize, text: &str) -> Sample {
        Sample::from_tree(id, parse(&tokenize(text, &Lexicon::base()).unwrap()).unwrap()).unwrap()
    }

    struct Constant;

    impl ModelAdapter for Constant {
        fn id(&self) -> String {
            "constant".into()
        }

        fn predict(&mut self, _: &[Token]) -> Result<Vec<String>, AdapterError> {
            Ok(vec!["A".into()])
        }
    }

    #[test]
    fn one_wrong_of_four() {
        let samples = vec![sample(0, "copy A"), sample(1, "reverse A"), sample(2, "swap A"), sample(3, "echo A")];
        let report = run_accuracy(&mut Constant, &samples, &[Stratification::Function]);
        assert_eq!(report.accuracy, Some(0.75));
        let echo = report.strata["function"].iter().find(|r| r.key == StratumKey::Name("echo".into())).unwrap();
        assert_eq!(echo.score, 0.0);
    }

    #[test]
    fn constant_model_is_consistent_but_wrong() {
        let pairs = crate::testsuite::make_consistency_pairs(
            &[sample(0, "swap B C"), sample(1, "repeat D")],
            &crate::testsuite::SynonymMap::defaults(),
        );
        let report = run_consistency(&mut Constant, &pairs.pairs, &BaseFunction::ALL);
        assert_eq!(report.overall.consistency, 1.0);
        assert_eq!(report.overall.consistent_correct, 0.0);
        let report = run_consistency(&mut OracleAdapter, &pairs.pairs, &BaseFunction::ALL);
        assert_eq!(report.overall.consistent_correct, 1.0);
        assert_eq!(report.per_function.len(), 2);
    }

    #[test]
    fn oracle_is_local() {
        let samples = vec![sample(0, "echo append C , prepend B , A"), sample(1, "copy A")];
        let report = run_localism(&mut OracleAdapter, &samples);
        assert_eq!(report.consistency, Some(1.0));
        assert_eq!(report.mean_steps, Some(2.0));
    }

    fn entry(original: &str, exception: &str) -> ExceptionEntry {
        ExceptionEntry {
            src: "reverse echo A B".into(),
            original_tgt: original.into(),
            exception_tgt: exception.into(),
            pair: crate::testsuite::ExceptionPair::defaults()[0],
        }
    }

    #[test]
    fn three_checkpoint_profile() {
        let exceptions: Vec<ExceptionEntry> = (0..10).map(|_| entry("B B A", "A B B")).collect();
        let checkpoint = |over: usize, memo: usize| -> Vec<String> {
            (0..10)
                .map(|i| {
                    if i < over {
                        "B B A"
                    } else if i < over + memo {
                        "A B B"
                    } else {
                        "Z"
                    }
                    .to_string()
                })
                .collect()
        };
        let cps = vec![
            ("1_a".to_string(), checkpoint(8, 1)),
            ("2_b".to_string(), checkpoint(4, 5)),
            ("3_c".to_string(), checkpoint(1, 9)),
        ];
        let report = run_overgeneralisation(&cps, &exceptions).unwrap();
        let peak = report.peak.unwrap();
        assert_eq!(peak.ordinal, 1);
        assert_eq!(peak.overgeneralisation_frac, 0.8);
        for p in &report.profile {
            assert!((p.overgeneralisation_frac + p.memorisation_frac + p.other_frac - 1.0).abs() < 1e-9);
        }
        assert!(run_overgeneralisation(&[("x".into(), vec![])], &exceptions).is_err());
    }

    #[test]
    fn eos_prefix_and_substring() {
        let preds = vec!["A B".to_string(), "B C".to_string(), "A B C".to_string()];
        let tgts = vec!["A B C".to_string(); 3];
        let r = run_eos_analysis(&preds, &tgts).unwrap();
        assert_eq!((r.incorrect, r.prefix, r.substring), (2, 1, 2));
        assert_eq!(r.prefix_fraction, Some(0.5));
        let r = run_eos_analysis(&tgts, &tgts).unwrap();
        assert_eq!(r.incorrect, 0);
        assert_eq!(r.prefix_fraction, None);
    }
}
