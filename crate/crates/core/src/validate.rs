//! Independent audit of corpus files against the interpreter and the
//! data-construction constraints.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Serialize;

use crate::io::{read_lines, src_path, tgt_path, IoError};
use crate::language::{evaluate, join_symbols, parse, tokenize, Lexicon, Symbol};
use crate::testsuite::ExceptionEntry;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub file: String,
    /// 1-based; 0 for whole-file problems.
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every listed split of `dir`:
///
/// - every input parses and its target equals the interpreter's output, or
///   the exception target recorded for that input;
/// - inputs are distinct across all splits (which also makes splits disjoint);
/// - no symbol repeats within an input;
/// - no string argument of two or more symbols occurs twice in the corpus.
pub fn validate_corpus(
    dir: &Path,
    splits: &[&str],
    lexicon: &Lexicon,
    exceptions: &[ExceptionEntry],
) -> Result<ValidationReport, IoError> {
    let exception_tgts: HashMap<&str, &str> =
        exceptions.iter().map(|e| (e.src.as_str(), e.exception_tgt.as_str())).collect();
    let mut report = ValidationReport::default();
    let mut sources: HashMap<String, (String, usize)> = HashMap::new();
    let mut arguments: HashMap<Vec<Symbol>, (String, usize)> = HashMap::new();
    for split in splits {
        let src_file = format!("{split}.src");
        let tgt_file = format!("{split}.tgt");
        let src = read_lines(&src_path(dir, split))?;
        let tgt = read_lines(&tgt_path(dir, split))?;
        let mut flag = |file: &str, line: usize, message: String| {
            report.violations.push(Violation { file: file.to_string(), line, message })
        };
        if src.len() != tgt.len() {
            flag(&tgt_file, 0, format!("{} lines, but {} in {src_file}", tgt.len(), src.len()));
        }
        for (i, (s, t)) in src.iter().zip(&tgt).enumerate() {
            let line = i + 1;
            let tree = match tokenize(s, lexicon).and_then(|tokens| parse(&tokens)) {
                Ok(tree) => tree,
                Err(e) => {
                    flag(&src_file, line, format!("does not parse: {e}"));
                    continue;
                }
            };
            let canonical = tree.to_string();
            let target: Vec<&str> = t.split_whitespace().collect();
            match evaluate(&tree) {
                Ok(expected) => {
                    let expected = join_symbols(&expected);
                    let exception = exception_tgts.get(canonical.as_str()).copied();
                    let ok = target.join(" ") == expected || exception.is_some_and(|e| target.join(" ") == e);
                    if !ok {
                        flag(&tgt_file, line, format!("target {t:?} differs from interpreter output {expected:?}"));
                    }
                }
                Err(e) => flag(&src_file, line, format!("does not evaluate: {e}")),
            }
            if let Some((file, first)) = sources.get(&canonical) {
                flag(&src_file, line, format!("duplicate input, first seen at {file}:{first}"));
            } else {
                sources.insert(canonical, (src_file.clone(), line));
            }
            let mut seen = HashSet::new();
            let leaves: Vec<&[Symbol]> = tree.leaves().collect();
            if leaves.iter().flat_map(|l| l.iter()).any(|s| !seen.insert(*s)) {
                flag(&src_file, line, "a symbol repeats within the input".into());
            }
            for leaf in leaves.iter().filter(|l| l.len() >= 2) {
                if let Some((file, first)) = arguments.get(*leaf) {
                    flag(&src_file, line, format!("string argument reused from {file}:{first}"));
                } else {
                    arguments.insert(leaf.to_vec(), (src_file.clone(), line));
                }
            }
            report.samples += 1;
        }
    }
    Ok(report)
}
