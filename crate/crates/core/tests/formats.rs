mod common;

use mcuba::format::{parse_automaton, parse_markov_chain, write_automaton, write_markov_chain};
use mcuba::rng::SplitMix64;
use mcuba::{Error, Mode, Rational};
use proptest::prelude::*;

use common::{random_automaton, random_chain};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chains_round_trip(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let states = 1 + rng.below(6) as usize;
        let chain = random_chain(&mut rng, states);
        let text = write_markov_chain(&chain);
        let back = parse_markov_chain(&text).unwrap();
        prop_assert_eq!(&back, &chain);
        prop_assert_eq!(write_markov_chain(&back), text);
    }

    #[test]
    fn automata_round_trip(seed in any::<u64>(), buchi in any::<bool>()) {
        let mut rng = SplitMix64::new(seed);
        let letters: Vec<String> = ["a", "b", "c"][..1 + rng.below(3) as usize].iter().map(|s| s.to_string()).collect();
        let mode = if buchi { Mode::Buchi } else { Mode::Finite };
        let n = 1 + rng.below(6) as usize;
        let aut = random_automaton(&mut rng, mode, &letters, n, 1, 3);
        let text = write_automaton(&aut);
        let back = parse_automaton(&text).unwrap();
        prop_assert_eq!(&back, &aut);
        prop_assert_eq!(write_automaton(&back), text);
    }

    #[test]
    fn rationals_round_trip_through_text(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rational::new(p, q);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r.clone());
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
    }
}

fn syntax_line(result: mcuba::Result<impl std::fmt::Debug>) -> usize {
    match result {
        Err(Error::Syntax { line, .. }) => line,
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn malformed_chains_report_their_line() {
    assert_eq!(syntax_line(parse_markov_chain("@mc\nstates a b\ninit a 1\ntrans a b x\n")), 4);
    assert_eq!(syntax_line(parse_markov_chain("@mc\nstates a\nbogus\n")), 3);
    assert_eq!(syntax_line(parse_markov_chain("states a\n")), 1);
}

#[test]
fn malformed_automata_report_their_line() {
    assert_eq!(syntax_line(parse_automaton("@automaton nfa\nalphabet a\nstates q\ninitial q\ntrans q a\n")), 5);
    assert_eq!(syntax_line(parse_automaton("@automaton dfa\n")), 1);
}

#[test]
fn semantic_errors_are_not_syntax_errors() {
    // rows must sum to one
    let r = parse_markov_chain("@mc\nstates a b\ninit a 1\ntrans a b 1/2\ntrans b b 1\n");
    assert!(r.is_err());
    assert!(!matches!(r, Err(Error::Syntax { .. })), "{r:?}");
}

#[test]
fn fixtures_and_generated_instances_round_trip() {
    use mcuba::fixtures::*;
    use mcuba::harness::{gen_instance, trial_spec};
    for text in [FAIR_COIN, BIASED_COIN] {
        let chain = parse_markov_chain(text).unwrap();
        assert_eq!(parse_markov_chain(&write_markov_chain(&chain)).unwrap(), chain);
    }
    for text in
        [GFA, SECOND_LETTER_A, FIRST_LETTER_A, PREDICT_NEXT_LETTER, UNIVERSAL, ALWAYS_A, PREFIX_OVERLAP, AMBIGUOUS]
    {
        let aut = parse_automaton(text).unwrap();
        assert_eq!(parse_automaton(&write_automaton(&aut)).unwrap(), aut);
    }
    let mut generated = 0;
    for i in 0..60 {
        let Ok(inst) = gen_instance(&trial_spec(5, i, None)) else { continue };
        generated += 1;
        assert_eq!(parse_markov_chain(&write_markov_chain(&inst.chain)).unwrap(), inst.chain);
        assert_eq!(parse_automaton(&write_automaton(&inst.automaton)).unwrap(), inst.automaton);
    }
    assert!(generated > 30, "{generated}");
}
