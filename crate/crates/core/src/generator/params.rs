use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GeneratorError;
use crate::language::BaseFunction;

pub const DEFAULT_MAX_ARG_LEN: usize = 5;
const TOLERANCE: f64 = 1e-9;

/// Production probabilities of the input grammar.
///
/// `arg_len_dist[k - 1]` is the probability that a string argument has `k` symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrammarParams {
    pub p_unary: f64,
    pub p_binary: f64,
    pub p_leaf: f64,
    pub fn_weights: BTreeMap<BaseFunction, f64>,
    pub arg_len_dist: Vec<f64>,
    pub max_arg_len: usize,
}

impl GrammarParams {
    /// Uniform function and argument-length choices with the given expansion probabilities.
    pub fn uniform(p_unary: f64, p_binary: f64, p_leaf: f64) -> Self {
        let fn_weights = BaseFunction::UNARY
            .iter()
            .map(|f| (*f, 1.0 / 6.0))
            .chain(BaseFunction::BINARY.iter().map(|f| (*f, 0.25)))
            .collect();
        GrammarParams {
            p_unary,
            p_binary,
            p_leaf,
            fn_weights,
            arg_len_dist: vec![1.0 / DEFAULT_MAX_ARG_LEN as f64; DEFAULT_MAX_ARG_LEN],
            max_arg_len: DEFAULT_MAX_ARG_LEN,
        }
    }

    /// Parameters fitted to the shipped reference length/depth histogram.
    pub fn naturalised() -> Self {
        #[derive(Deserialize)]
        struct Profile {
            params: GrammarParams,
        }
        let profile: Profile = serde_json::from_str(include_str!("../../data/naturalised.json"))
            .expect("embedded naturalised profile is valid JSON");
        profile.params
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |msg: String| Err(GeneratorError::InvalidParams(msg));
        let expansion = [self.p_unary, self.p_binary, self.p_leaf];
        if expansion.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad("expansion probabilities must be finite and non-negative".into());
        }
        if (expansion.iter().sum::<f64>() - 1.0).abs() > TOLERANCE {
            return bad(format!("expansion probabilities sum to {}", expansion.iter().sum::<f64>()));
        }
        if self.p_unary + self.p_binary <= 0.0 {
            return bad("at least one function expansion must have positive probability".into());
        }
        for (class, members) in [("unary", &BaseFunction::UNARY[..]), ("binary", &BaseFunction::BINARY[..])] {
            let weights: Vec<f64> = members.iter().map(|f| self.weight(*f)).collect();
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return bad(format!("{class} function weights must be non-negative"));
            }
            if (weights.iter().sum::<f64>() - 1.0).abs() > TOLERANCE {
                return bad(format!("{class} function weights sum to {}", weights.iter().sum::<f64>()));
            }
        }
        if self.max_arg_len == 0 || self.arg_len_dist.len() > self.max_arg_len || self.arg_len_dist.is_empty() {
            return bad(format!(
                "argument length distribution must cover 1..={} (got {} entries)",
                self.max_arg_len,
                self.arg_len_dist.len()
            ));
        }
        if self.arg_len_dist.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad("argument length probabilities must be non-negative".into());
        }
        if (self.arg_len_dist.iter().sum::<f64>() - 1.0).abs() > TOLERANCE {
            return bad("argument length probabilities must sum to 1".into());
        }
        Ok(())
    }

    pub fn weight(&self, function: BaseFunction) -> f64 {
        self.fn_weights.get(&function).copied().unwrap_or(0.0)
    }

    pub fn unary_weights(&self) -> Vec<f64> {
        BaseFunction::UNARY.iter().map(|f| self.weight(*f)).collect()
    }

    pub fn binary_weights(&self) -> Vec<f64> {
        BaseFunction::BINARY.iter().map(|f| self.weight(*f)).collect()
    }

    /// Expected number of function applications per (root-forced) sample,
    /// ignoring recursion caps. `None` when the process is not subcritical.
    pub fn expected_functions(&self) -> Option<f64> {
        let branching = self.p_unary + 2.0 * self.p_binary;
        if branching >= 1.0 {
            return None;
        }
        let per_subtree = (self.p_unary + self.p_binary) / (1.0 - branching);
        let root_share = self.p_unary + self.p_binary;
        let root_children = (self.p_unary + 2.0 * self.p_binary) / root_share;
        Some(1.0 + root_children * per_subtree)
    }
}

impl Default for GrammarParams {
    fn default() -> Self {
        GrammarParams::naturalised()
    }
}
