use serde::{Deserialize, Serialize};

use super::runners::{
    AccuracyReport, ConsistencyReport, EosReport, LengthCell, LocalismReport, OvergeneralisationReport,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub adapter: String,
    /// Content hash of the evaluated data.
    pub dataset_hash: Option<String>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ReportBody {
    Accuracy(AccuracyReport),
    Consistency(ConsistencyReport),
    Localism(LocalismReport),
    OvergenProfile(OvergeneralisationReport),
    LengthGen { cells: Vec<LengthCell> },
    Eos(EosReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub metadata: RunMetadata,
    #[serde(flatten)]
    pub body: ReportBody,
}

impl EvaluationReport {
    pub fn new(metadata: RunMetadata, body: ReportBody) -> Self {
        EvaluationReport { schema_version: REPORT_SCHEMA_VERSION, metadata, body }
    }

    /// The headline number of the report, if defined.
    pub fn score(&self) -> Option<f64> {
        match &self.body {
            ReportBody::Accuracy(r) => r.accuracy,
            ReportBody::Consistency(r) => Some(r.overall.consistency),
            ReportBody::Localism(r) => r.consistency,
            ReportBody::OvergenProfile(r) => r.peak.as_ref().map(|p| p.overgeneralisation_frac),
            ReportBody::LengthGen { cells } => {
                let n: usize = cells.iter().map(|c| c.count).sum();
                let hits: f64 = cells.iter().map(|c| c.accuracy.unwrap_or(0.0) * c.count as f64).sum();
                (n > 0).then(|| hits / n as f64)
            }
            ReportBody::Eos(r) => r.prefix_fraction,
        }
    }

    /// CSV tables for external plotting, keyed by a short file stem.
    pub fn csv_tables(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        match &self.body {
            ReportBody::Accuracy(r) => {
                for (dimension, rows) in &r.strata {
                    let mut w = writer(&[dimension.as_str(), "accuracy", "count"]);
                    for row in rows {
                        w.write_record([row.key.to_string(), row.score.to_string(), row.count.to_string()]).unwrap();
                    }
                    out.push((format!("accuracy_by_{dimension}"), finish(w)));
                }
            }
            ReportBody::Consistency(r) => {
                let mut w = writer(&[
                    "function",
                    "pairs",
                    "consistency",
                    "consistent_correct",
                    "consistent_incorrect",
                    "consistency_across_incorrect",
                ]);
                let all = std::iter::once(("all".to_string(), &r.overall));
                for (name, s) in all.chain(r.per_function.iter().map(|(k, v)| (k.clone(), v))) {
                    w.write_record([
                        name,
                        s.pairs.to_string(),
                        s.consistency.to_string(),
                        s.consistent_correct.to_string(),
                        s.consistent_incorrect.to_string(),
                        opt(s.consistency_across_incorrect),
                    ])
                    .unwrap();
                }
                out.push(("consistency".into(), finish(w)));
            }
            ReportBody::Localism(r) => {
                let mut w = writer(&["steps", "consistency", "count"]);
                for row in &r.by_steps {
                    w.write_record([row.key.to_string(), row.score.to_string(), row.count.to_string()]).unwrap();
                }
                out.push(("localism_by_steps".into(), finish(w)));
                let mut w = writer(&["id", "steps", "consistent", "failure"]);
                for row in &r.rows {
                    w.write_record([
                        row.id.to_string(),
                        row.steps.to_string(),
                        row.consistent.to_string(),
                        row.failure.clone().unwrap_or_default(),
                    ])
                    .unwrap();
                }
                out.push(("localism_samples".into(), finish(w)));
            }
            ReportBody::OvergenProfile(r) => {
                let mut w = writer(&["checkpoint", "overgeneralisation", "memorisation", "other"]);
                for p in &r.profile {
                    w.write_record([
                        p.checkpoint.clone(),
                        p.overgeneralisation_frac.to_string(),
                        p.memorisation_frac.to_string(),
                        p.other_frac.to_string(),
                    ])
                    .unwrap();
                }
                out.push(("overgeneralisation_profile".into(), finish(w)));
            }
            ReportBody::LengthGen { cells } => {
                let mut w = writer(&["function", "arg_length", "accuracy", "count"]);
                for c in cells {
                    w.write_record([
                        c.function.to_string(),
                        c.arg_length.to_string(),
                        opt(c.accuracy),
                        c.count.to_string(),
                    ])
                    .unwrap();
                }
                out.push(("length_generalisation".into(), finish(w)));
            }
            ReportBody::Eos(r) => {
                let mut w =
                    writer(&["total", "incorrect", "prefix", "substring", "prefix_fraction", "substring_fraction"]);
                w.write_record([
                    r.total.to_string(),
                    r.incorrect.to_string(),
                    r.prefix.to_string(),
                    r.substring.to_string(),
                    opt(r.prefix_fraction),
                    opt(r.substring_fraction),
                ])
                .unwrap();
                out.push(("eos".into(), finish(w)));
            }
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn writer(header: &[&str]) -> csv::Writer<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).unwrap();
    w
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv of utf-8 fields")
}
