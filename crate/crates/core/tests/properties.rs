use std::collections::BTreeMap;

use pcfgset::generator::{generate_corpus, sample_tree, CorpusConfig, GrammarParams, SamplerLimits};
use pcfgset::harness::{run_accuracy, run_localism, FaultyOracleAdapter, OracleAdapter};
use pcfgset::language::{join_symbols, tokens_to_string, ALPHABET_SIZE};
use pcfgset::naturalise::{kl_gaussian, GaussianFit};
use pcfgset::rng::seeded;
use pcfgset::testsuite::{
    build_unroll_plan, contains_adjacent_pair, exception_evaluate, productivity_split, systematicity_split, HeldOutPair,
};
use pcfgset::{evaluate, parse, tokenize, Alphabet, BaseFunction, Lexicon, Symbol};
use proptest::prelude::*;

fn params() -> GrammarParams {
    GrammarParams::uniform(0.3, 0.15, 0.55)
}

fn symbols() -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec(0..ALPHABET_SIZE, 1..15)
        .prop_map(|v| v.into_iter().map(|i| Symbol::from_index(i).unwrap()).collect())
}

fn counts(s: &[Symbol]) -> BTreeMap<Symbol, usize> {
    let mut m = BTreeMap::new();
    for x in s {
        *m.entry(*x).or_default() += 1;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_and_parse_are_inverse(seed in any::<u64>()) {
        let tree = sample_tree(&params(), SamplerLimits::default(), &mut seeded(seed));
        let tokens = tree.render();
        prop_assert_eq!(&parse(&tokens).unwrap(), &tree);
        let text = tokens_to_string(&tokens);
        prop_assert_eq!(tokens_to_string(&tokenize(&text, &Lexicon::base()).unwrap()), text);
    }

    #[test]
    fn output_length_follows_the_function(x in symbols(), y in symbols()) {
        let (n, m) = (x.len(), y.len());
        for f in BaseFunction::ALL {
            let out = if f.is_binary() { f.apply(&[&x, &y]) } else { f.apply(&[&x]) }.unwrap();
            let expected = match f {
                BaseFunction::Echo => n + 1,
                BaseFunction::Repeat => 2 * n,
                BaseFunction::Append | BaseFunction::Prepend => n + m,
                BaseFunction::RemoveFirst => m,
                _ => n,
            };
            prop_assert_eq!(out.len(), expected, "{}", f);
        }
    }

    #[test]
    fn reverse_and_swap_are_involutions(x in symbols()) {
        for f in [BaseFunction::Reverse, BaseFunction::Swap] {
            let once = f.apply(&[&x]).unwrap();
            prop_assert_eq!(f.apply(&[&once]).unwrap(), x.clone());
        }
    }

    #[test]
    fn permutations_keep_the_multiset(x in symbols(), y in symbols()) {
        for f in [BaseFunction::Copy, BaseFunction::Reverse, BaseFunction::Shift, BaseFunction::Swap] {
            prop_assert_eq!(counts(&f.apply(&[&x]).unwrap()), counts(&x));
        }
        let both: Vec<Symbol> = x.iter().chain(&y).copied().collect();
        prop_assert_eq!(counts(&BaseFunction::Prepend.apply(&[&x, &y]).unwrap()), counts(&both));
    }

    #[test]
    fn kl_is_non_negative(m in prop::array::uniform4(-20.0f64..20.0), a in 0.1f64..10.0, b in 0.1f64..10.0, r in -0.9f64..0.9) {
        let p = GaussianFit::new([m[0], m[1]], [[a, 0.0], [0.0, b]]).unwrap();
        let c = r * (a * b).sqrt();
        let q = GaussianFit::new([m[2], m[3]], [[a, c], [c, b]]).unwrap();
        prop_assert!(kl_gaussian(&p, &q).unwrap() >= -1e-12);
        prop_assert!(kl_gaussian(&p, &p).unwrap().abs() < 1e-9);
    }

    #[test]
    fn oracle_unrolling_reproduces_the_meaning(seed in any::<u64>()) {
        let tree = sample_tree(&params(), SamplerLimits::default(), &mut seeded(seed));
        prop_assume!(!tree.is_leaf());
        let plan = build_unroll_plan(&tree).unwrap();
        let outcome = plan
            .execute(|tokens| {
                let value = evaluate(&parse(tokens).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                Ok(value.iter().map(Symbol::to_string).collect())
            })
            .unwrap();
        prop_assert_eq!(outcome.output, evaluate(&tree).unwrap());
    }

    #[test]
    fn no_exceptions_is_plain_evaluation(seed in any::<u64>()) {
        let tree = sample_tree(&params(), SamplerLimits::default(), &mut seeded(seed));
        prop_assert_eq!(exception_evaluate(&tree, &[]).unwrap(), evaluate(&tree).unwrap());
    }
}

#[test]
fn generation_is_deterministic() {
    let make = |seed| {
        let c =
            generate_corpus(&params(), 500, &Alphabet::standard(), CorpusConfig::default(), seed, &mut seeded(seed))
                .unwrap();
        c.samples.iter().map(|s| (s.src_text(), s.tgt_text())).collect::<Vec<_>>()
    };
    assert_eq!(make(4), make(4));
    assert_ne!(make(4), make(5));
}

#[test]
fn oracle_is_local_and_exact_on_a_corpus() {
    let corpus =
        generate_corpus(&params(), 2000, &Alphabet::standard(), CorpusConfig::default(), 1, &mut seeded(1)).unwrap();
    let samples: Vec<_> = corpus.samples.into_iter().filter(|s| !s.tree.is_leaf()).collect();
    assert_eq!(run_localism(&mut OracleAdapter, &samples).consistency, Some(1.0));
    assert_eq!(run_accuracy(&mut OracleAdapter, &samples, &[]).accuracy, Some(1.0));
}

#[test]
fn faulty_oracle_hits_its_rate() {
    let corpus =
        generate_corpus(&params(), 10_000, &Alphabet::standard(), CorpusConfig::default(), 2, &mut seeded(2)).unwrap();
    let acc = run_accuracy(&mut FaultyOracleAdapter::new(0.3, 7), &corpus.samples, &[]).accuracy.unwrap();
    assert!((0.68..=0.72).contains(&acc), "{acc}");
    assert_eq!(run_accuracy(&mut FaultyOracleAdapter::new(1.0, 7), &corpus.samples, &[]).accuracy, Some(0.0));
    assert_eq!(run_accuracy(&mut FaultyOracleAdapter::new(0.0, 7), &corpus.samples, &[]).accuracy, Some(1.0));
}

#[test]
fn splits_respect_their_invariants() {
    let corpus =
        generate_corpus(&params(), 20_000, &Alphabet::standard(), CorpusConfig::default(), 3, &mut seeded(3)).unwrap();
    let pairs = HeldOutPair::defaults();
    let split = systematicity_split(&corpus.samples, &pairs, 200, &mut seeded(3)).unwrap();
    assert_eq!(split.test.len(), 200);
    assert!(split.train.iter().all(|s| !contains_adjacent_pair(&s.src, &pairs)));
    assert!(split.test.iter().all(|s| contains_adjacent_pair(&s.src, &pairs)));
    assert_eq!(split.train.len() + split.test.len() + split.discarded, corpus.samples.len());

    let (train, test) = productivity_split(&corpus.samples, 8).unwrap();
    assert!(train.iter().all(|s| s.stats.num_functions <= 8));
    assert!(test.iter().all(|s| s.stats.num_functions >= 9));
}

#[test]
fn targets_match_the_interpreter_text() {
    let corpus =
        generate_corpus(&params(), 300, &Alphabet::standard(), CorpusConfig::default(), 6, &mut seeded(6)).unwrap();
    for s in &corpus.samples {
        assert_eq!(join_symbols(&evaluate(&s.tree).unwrap()), s.tgt_text());
    }
}
