use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use pcfgset::testsuite::{HeldOutPair, SynonymMap};
use pcfgset::BaseFunction;

/// `--adapter` values.
#[derive(Clone, Debug, PartialEq)]
pub enum AdapterSpec {
    Oracle,
    File(PathBuf),
    Command(String),
    Faulty(f64),
    LengthCapped(usize),
}

impl FromStr for AdapterSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "oracle" {
            return Ok(AdapterSpec::Oracle);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(|| format!("unknown adapter {s:?}"))?;
        match kind {
            "file" => Ok(AdapterSpec::File(arg.into())),
            "cmd" => Ok(AdapterSpec::Command(arg.to_string())),
            "faulty" => {
                let rate: f64 = arg.parse().map_err(|_| format!("bad corruption rate {arg:?}"))?;
                if !(0.0..=1.0).contains(&rate) {
                    return Err(format!("corruption rate {rate} is outside [0, 1]"));
                }
                Ok(AdapterSpec::Faulty(rate))
            }
            "capped" => arg.parse().map(AdapterSpec::LengthCapped).map_err(|_| format!("bad cap {arg:?}")),
            _ => Err(format!("unknown adapter kind {kind:?}")),
        }
    }
}

/// Comma-separated `outer:inner` pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<HeldOutPair>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<HeldOutPair>().map_err(anyhow::Error::msg))
        .collect()
}

/// Comma-separated `function` or `function=synonym` entries.
pub fn parse_synonyms(text: &str) -> Result<SynonymMap> {
    let mut entries = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (base, name) = match item.split_once('=') {
            Some((b, n)) => (b, n.to_string()),
            None => (item, format!("{item}_syn")),
        };
        let function = BaseFunction::from_name(base).with_context(|| format!("unknown function {base:?}"))?;
        entries.insert(function, name);
    }
    Ok(SynonymMap::new(entries)?)
}

/// Comma-separated percentages given as fractions (0.001 = 0.1%).
pub fn parse_percentages(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().with_context(|| format!("bad percentage {p:?}")))
        .collect::<Result<Vec<_>>>()?;
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        bail!("exception percentage {v} is outside [0, 1]");
    }
    Ok(values)
}

pub fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.context("a seed is required: pass --seed or set PCFGSET_SEED")
}
