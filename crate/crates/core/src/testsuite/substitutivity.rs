use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TestsuiteError;
use crate::generator::{GrammarParams, Sample, Shape, UniquenessTracker};
use crate::language::{Alphabet, BaseFunction, FunctionSymbol, LanguageError, Lexicon, Symbol, SyntaxTree, Token};
use crate::rng::categorical;

/// Share of the training set added as primitive synonym samples, per synonym.
pub const PRIMITIVE_SYNONYM_FRACTION: f64 = 0.001;

/// Base function → synonym name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<BaseFunction, String>", into = "BTreeMap<BaseFunction, String>")]
pub struct SynonymMap {
    entries: BTreeMap<BaseFunction, String>,
}

impl SynonymMap {
    pub fn new(entries: BTreeMap<BaseFunction, String>) -> Result<Self, LanguageError> {
        let mut names = BTreeSet::new();
        for name in entries.values() {
            if !name.ends_with("_syn") || BaseFunction::from_name(name).is_some() || !names.insert(name.as_str()) {
                return Err(LanguageError::InvalidSynonym(name.clone()));
            }
        }
        Ok(SynonymMap { entries })
    }

    /// `<name>_syn` for each function.
    pub fn suffixed(functions: &[BaseFunction]) -> Self {
        SynonymMap { entries: functions.iter().map(|f| (*f, format!("{}_syn", f.name()))).collect() }
    }

    /// swap_syn, repeat_syn, append_syn, remove_second_syn.
    pub fn defaults() -> Self {
        use BaseFunction::*;
        SynonymMap::suffixed(&[Swap, Repeat, Append, RemoveSecond])
    }

    pub fn entries(&self) -> &BTreeMap<BaseFunction, String> {
        &self.entries
    }

    pub fn synonym(&self, function: BaseFunction) -> Option<FunctionSymbol> {
        self.entries.get(&function).map(|name| FunctionSymbol::synonym(name, function))
    }

    /// Base functions plus every synonym in the map.
    pub fn lexicon(&self) -> Lexicon {
        Lexicon::with_synonyms(self.entries.iter().map(|(f, n)| (*f, n.as_str())))
            .expect("names were validated on construction")
    }

    /// The synonym for `func` if it is a mapped base function.
    fn replacement(&self, func: &FunctionSymbol) -> Option<FunctionSymbol> {
        if func.is_synonym() {
            return None;
        }
        self.synonym(func.semantics())
    }
}

impl TryFrom<BTreeMap<BaseFunction, String>> for SynonymMap {
    type Error = LanguageError;

    fn try_from(entries: BTreeMap<BaseFunction, String>) -> Result<Self, Self::Error> {
        SynonymMap::new(entries)
    }
}

impl From<SynonymMap> for BTreeMap<BaseFunction, String> {
    fn from(map: SynonymMap) -> Self {
        map.entries
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionAudit {
    pub function: BaseFunction,
    pub synonym: String,
    /// Base-function occurrences in the training set before rewriting.
    pub occurrences: usize,
    pub rewritten: usize,
    pub added: usize,
}

fn function_nodes(tree: &SyntaxTree) -> impl Iterator<Item = &FunctionSymbol> {
    tree.preorder().into_iter().filter_map(SyntaxTree::function)
}

/// Replaces the functions at the given prefix-order positions.
fn rewrite_positions(tree: &mut SyntaxTree, positions: &BTreeSet<usize>, counter: &mut usize, map: &SynonymMap) {
    if let SyntaxTree::Apply { func, args } = tree {
        if positions.contains(counter) {
            if let Some(syn) = map.replacement(func) {
                *func = syn;
            }
        }
        *counter += 1;
        for a in args {
            rewrite_positions(a, positions, counter, map);
        }
    }
}

fn with_tree(mut sample: Sample, tree: SyntaxTree) -> Sample {
    sample.src = tree.render();
    sample.tree = tree;
    sample
}

/// Rewrites exactly half (rounded down) of each mapped function's occurrences
/// to its synonym, choosing occurrences uniformly; targets stay as they are.
pub fn substitutivity_equal<R: Rng + ?Sized>(
    train: &[Sample],
    map: &SynonymMap,
    rng: &mut R,
) -> (Vec<Sample>, Vec<SubstitutionAudit>) {
    let mut chosen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); train.len()];
    let mut audit = Vec::new();
    for (function, synonym) in map.entries() {
        let occurrences: Vec<(usize, usize)> = train
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                function_nodes(&s.tree)
                    .enumerate()
                    .filter(|(_, f)| !f.is_synonym() && f.semantics() == *function)
                    .map(move |(pos, _)| (i, pos))
                    .collect::<Vec<_>>()
            })
            .collect();
        let half = occurrences.len() / 2;
        for j in sample(rng, occurrences.len(), half) {
            let (i, pos) = occurrences[j];
            chosen[i].insert(pos);
        }
        audit.push(SubstitutionAudit {
            function: *function,
            synonym: synonym.clone(),
            occurrences: occurrences.len(),
            rewritten: half,
            added: 0,
        });
    }
    let out = train
        .iter()
        .zip(chosen)
        .map(|(s, positions)| {
            if positions.is_empty() {
                return s.clone();
            }
            let mut tree = s.tree.clone();
            rewrite_positions(&mut tree, &positions, &mut 0, map);
            with_tree(s.clone(), tree)
        })
        .collect();
    (out, audit)
}

/// Adds `round(fraction × |train|)` primitive samples per synonym, each with
/// the synonym as its only function and fresh arguments.
pub fn substitutivity_primitive<R: Rng + ?Sized>(
    train: &[Sample],
    map: &SynonymMap,
    fraction: f64,
    params: &GrammarParams,
    alphabet: &Alphabet,
    tracker: &mut UniquenessTracker,
    rng: &mut R,
) -> Result<(Vec<Sample>, Vec<SubstitutionAudit>), TestsuiteError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(TestsuiteError::InvalidFraction(fraction));
    }
    let per_synonym = (fraction * train.len() as f64).round() as usize;
    let mut out = train.to_vec();
    let mut next_id = train.iter().map(|s| s.id + 1).max().unwrap_or(0);
    let mut audit = Vec::new();
    for (function, synonym) in map.entries() {
        let symbol = FunctionSymbol::synonym(synonym, *function);
        let occurrences = train
            .iter()
            .flat_map(|s| function_nodes(&s.tree))
            .filter(|f| !f.is_synonym() && f.semantics() == *function)
            .count();
        let mut added = 0;
        let mut failures = 0;
        while added < per_synonym {
            let leaves =
                (0..function.arity()).map(|_| Shape::Leaf(categorical(&params.arg_len_dist, rng) + 1)).collect();
            let shape = Shape::Apply(*function, leaves);
            let candidate = tracker.fill(&shape, alphabet, 50, rng).and_then(|tree| match tree {
                SyntaxTree::Apply { args, .. } => SyntaxTree::apply(symbol.clone(), args).ok(),
                SyntaxTree::Leaf(_) => None,
            });
            let sample = match candidate {
                Some(tree) => Sample::from_tree(next_id, tree)?,
                None => {
                    failures += 1;
                    if failures > 10_000 {
                        return Err(TestsuiteError::SynthesisFailed(synonym.clone()));
                    }
                    continue;
                }
            };
            if !tracker.source_is_fresh(&sample.src_text()) {
                failures += 1;
                continue;
            }
            tracker.insert(&sample);
            out.push(sample);
            next_id += 1;
            added += 1;
        }
        audit.push(SubstitutionAudit {
            function: *function,
            synonym: synonym.clone(),
            occurrences,
            rewritten: 0,
            added,
        });
    }
    Ok((out, audit))
}

/// A test input and its fully synonym-substituted counterpart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyPair {
    pub id: usize,
    pub base: Vec<Token>,
    pub synonym: Vec<Token>,
    pub tgt: Vec<Symbol>,
}

#[derive(Clone, Debug, Default)]
pub struct ConsistencyPairs {
    pub pairs: Vec<ConsistencyPair>,
    /// Ids of samples without any mapped function.
    pub skipped: Vec<usize>,
}

/// Pairs every test sample with the version in which all mapped functions use
/// their synonyms.
pub fn make_consistency_pairs(test: &[Sample], map: &SynonymMap) -> ConsistencyPairs {
    let mut out = ConsistencyPairs::default();
    for s in test {
        let mut changed = false;
        let synonym: Vec<Token> = s
            .src
            .iter()
            .map(|t| match t.as_function().and_then(|f| map.replacement(f)) {
                Some(syn) => {
                    changed = true;
                    Token::Function(syn)
                }
                None => t.clone(),
            })
            .collect();
        if changed {
            out.pairs.push(ConsistencyPair { id: s.id, base: s.src.clone(), synonym, tgt: s.tgt.clone() });
        } else {
            out.skipped.push(s.id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{evaluate, parse, tokenize, tokens_to_string};
    use crate::rng::seeded;

    fn sample(id: usize, text: &str) -> Sample {
        Sample::from_tree(id, parse(&tokenize(text, &Lexicon::base()).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn consistency_pairs_substitute_every_mapped_token() {
        let test = [sample(0, "swap A B C"), sample(1, "append swap A B , C"), sample(2, "copy D")];
        let pairs = make_consistency_pairs(&test, &SynonymMap::defaults());
        assert_eq!(tokens_to_string(&pairs.pairs[0].synonym), "swap_syn A B C");
        assert_eq!(tokens_to_string(&pairs.pairs[1].synonym), "append_syn swap_syn A B , C");
        assert_eq!(pairs.skipped, vec![2]);
        let lexicon = SynonymMap::defaults().lexicon();
        for p in &pairs.pairs {
            let tree = parse(&tokenize(&tokens_to_string(&p.synonym), &lexicon).unwrap()).unwrap();
            assert_eq!(evaluate(&tree).unwrap(), p.tgt);
        }
    }

    #[test]
    fn equal_replacement_rewrites_half() {
        let train: Vec<Sample> = (0..7).map(|i| sample(i, &format!("swap swap A{} B", i + 1))).collect();
        let (out, audit) = substitutivity_equal(&train, &SynonymMap::suffixed(&[BaseFunction::Swap]), &mut seeded(4));
        assert_eq!(audit[0].occurrences, 14);
        assert_eq!(audit[0].rewritten, 7);
        let rewritten = out
            .iter()
            .flat_map(|s| s.src.iter())
            .filter(|t| t.as_function().is_some_and(|f| f.name() == "swap_syn"))
            .count();
        assert_eq!(rewritten, 7);
        for (a, b) in train.iter().zip(&out) {
            assert_eq!(a.tgt, b.tgt);
            assert_eq!(b.src, b.tree.render());
        }
    }

    #[test]
    fn primitive_samples_are_added() {
        let train: Vec<Sample> =
            (0..2000).map(|i| sample(i, &format!("copy {}", Symbol::from_index(i % 520).unwrap()))).collect();
        let mut tracker = UniquenessTracker::from_samples(&train);
        let (out, audit) = substitutivity_primitive(
            &train,
            &SynonymMap::defaults(),
            0.001,
            &GrammarParams::naturalised(),
            &Alphabet::standard(),
            &mut tracker,
            &mut seeded(5),
        )
        .unwrap();
        assert_eq!(out.len(), 2000 + 4 * 2);
        assert!(audit.iter().all(|a| a.added == 2));
        for s in &out[2000..] {
            assert_eq!(s.stats.num_functions, 1);
            assert!(s.src[0].as_function().unwrap().is_synonym());
        }
    }

    #[test]
    fn synonym_names_are_checked() {
        let bad = [(BaseFunction::Swap, "swap2".to_string())].into_iter().collect();
        assert!(SynonymMap::new(bad).is_err());
        let json = serde_json::to_string(&SynonymMap::defaults()).unwrap();
        assert_eq!(serde_json::from_str::<SynonymMap>(&json).unwrap(), SynonymMap::defaults());
    }
}
