use std::fmt;

use super::TestsuiteError;
use crate::language::{Symbol, SyntaxTree, Token};

/// One function application to run through the model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrollStep {
    /// Child indices from the root to the application.
    pub path: Vec<usize>,
    /// 1 for applications over literal arguments only; otherwise one more
    /// than the latest round among its function arguments.
    pub round: usize,
}

/// Bottom-up evaluation order for one tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrollPlan {
    pub tree: SyntaxTree,
    /// Sorted by round, then left to right.
    pub steps: Vec<UnrollStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrollFailure {
    /// Index of the step that failed.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for UnrollFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unroll step {} failed: {}", self.step, self.reason)
    }
}

impl std::error::Error for UnrollFailure {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrollOutcome {
    pub output: Vec<Symbol>,
    /// The input sent to the model at each step.
    pub inputs: Vec<Vec<Token>>,
}

fn collect_steps(node: &SyntaxTree, path: &mut Vec<usize>, steps: &mut Vec<(usize, usize, Vec<usize>)>) -> usize {
    let SyntaxTree::Apply { args, .. } = node else {
        return 0;
    };
    let order = steps.len();
    steps.push((0, order, path.clone()));
    let mut round = 0;
    for (i, a) in args.iter().enumerate() {
        path.push(i);
        round = round.max(collect_steps(a, path, steps));
        path.pop();
    }
    steps[order].0 = round + 1;
    round + 1
}

/// Plans the constituent-by-constituent evaluation of `tree`.
pub fn build_unroll_plan(tree: &SyntaxTree) -> Result<UnrollPlan, TestsuiteError> {
    if tree.is_leaf() {
        return Err(TestsuiteError::NoFunction);
    }
    let mut raw = Vec::new();
    collect_steps(tree, &mut Vec::new(), &mut raw);
    raw.sort();
    Ok(UnrollPlan {
        tree: tree.clone(),
        steps: raw.into_iter().map(|(round, _, path)| UnrollStep { path, round }).collect(),
    })
}

impl UnrollPlan {
    pub fn rounds(&self) -> usize {
        self.steps.last().map_or(0, |s| s.round)
    }

    /// Feeds every step to `model`, replacing each evaluated application by
    /// the model's output as a literal run, and returns the final string.
    ///
    /// Fails if the model errors or returns anything but a non-empty run of
    /// alphabet symbols.
    pub fn execute<F>(&self, mut model: F) -> Result<UnrollOutcome, UnrollFailure>
    where
        F: FnMut(&[Token]) -> Result<Vec<String>, String>,
    {
        let mut tree = self.tree.clone();
        let mut inputs = Vec::with_capacity(self.steps.len());
        for (i, step) in self.steps.iter().enumerate() {
            let fail = |reason: String| UnrollFailure { step: i, reason };
            let node = tree.node_at_mut(&step.path).expect("plan paths address the planned tree");
            let input = node.render();
            let output = model(&input).map_err(fail)?;
            if output.is_empty() {
                return Err(fail("empty output".into()));
            }
            let symbols = output
                .iter()
                .map(|t| t.parse::<Symbol>().map_err(|_| fail(format!("{t:?} is not a literal symbol"))))
                .collect::<Result<Vec<_>, _>>()?;
            *node = SyntaxTree::Leaf(symbols);
            inputs.push(input);
        }
        match tree {
            SyntaxTree::Leaf(output) => Ok(UnrollOutcome { output, inputs }),
            SyntaxTree::Apply { .. } => unreachable!("the root is always the last step"),
        }
    }
}
