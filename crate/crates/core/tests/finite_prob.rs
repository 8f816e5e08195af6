mod common;

use mcuba::automata::{check_prefix_unambiguous, check_unambiguous, trim};
use mcuba::finite::{prob_nfa, prob_nfa_subset_oracle, prob_nfa_subset_oracle_with_limit, simulate_prefix_acceptance};
use mcuba::rng::SplitMix64;
use mcuba::{fixtures, Automaton, Error, MarkovChain, Mode, Rational};
use proptest::prelude::*;

use common::{bounded_prefix_probability, random_automaton, random_chain};

fn instance(seed: u64, max_states: u64, max_aut: u64) -> (MarkovChain, Automaton) {
    let mut rng = SplitMix64::new(seed);
    let states = 1 + rng.below(max_states) as usize;
    let chain = random_chain(&mut rng, states);
    let n = 1 + rng.below(max_aut) as usize;
    let den = 2 + rng.below(3);
    let aut = random_automaton(&mut rng, Mode::Finite, chain.states(), n, 1, den);
    (chain, aut)
}

/// Same automaton with extra transitions and accepting states.
fn enlarge(aut: &Automaton, seed: u64) -> Automaton {
    let mut rng = SplitMix64::new(seed);
    let n = aut.len();
    let mut transitions: Vec<_> = aut.transitions().collect();
    for p in 0..n {
        for a in 0..aut.letters() {
            for q in 0..n {
                if rng.chance(1, 6) {
                    transitions.push((p, a, q));
                }
            }
        }
    }
    let accepting: Vec<usize> = (0..n).filter(|&q| aut.is_accepting(q) || rng.chance(1, 4)).collect();
    let initial: Vec<usize> = aut.initial().iter().copied().collect();
    Automaton::new(Mode::Finite, aut.alphabet().to_vec(), aut.states().to_vec(), initial, accepting, transitions)
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn prob_nfa_matches_subset_oracle_or_refuses(seed in any::<u64>()) {
        let (chain, aut) = instance(seed, 4, 5);
        let oracle = prob_nfa_subset_oracle(&chain, &aut).unwrap();
        prop_assert!(oracle.is_probability());
        match prob_nfa(&chain, &aut) {
            Ok(v) => prop_assert_eq!(v, oracle),
            Err(Error::Ambiguous { .. }) => prop_assert!(!check_unambiguous(&aut).unambiguous),
            Err(Error::PrefixOverlap { .. }) => {
                prop_assert!(check_unambiguous(&aut).unambiguous);
                prop_assert!(!check_prefix_unambiguous(&trim(&aut)).unambiguous);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn oracle_dominates_bounded_horizon_probability(seed in any::<u64>()) {
        let (chain, aut) = instance(seed, 3, 4);
        let oracle = prob_nfa_subset_oracle(&chain, &aut).unwrap();
        let mut previous = Rational::zero();
        for h in 0..=4 {
            let bounded = bounded_prefix_probability(&chain, &aut, h);
            prop_assert!(bounded >= previous);
            prop_assert!(bounded <= oracle);
            previous = bounded;
        }
    }

    #[test]
    fn oracle_is_monotone_in_the_language(seed in any::<u64>()) {
        let (chain, aut) = instance(seed, 4, 4);
        let bigger = enlarge(&aut, seed ^ 0xABCD);
        prop_assert!(prob_nfa_subset_oracle(&chain, &bigger).unwrap() >= prob_nfa_subset_oracle(&chain, &aut).unwrap());
    }
}

#[test]
fn fixture_values_are_exact() {
    let nfa = fixtures::second_letter_a();
    assert_eq!(prob_nfa(&fixtures::fair_coin(), &nfa).unwrap(), Rational::new(1, 2));
    assert_eq!(prob_nfa(&fixtures::biased_coin(), &nfa).unwrap(), Rational::new(2, 3));
    assert_eq!(prob_nfa(&fixtures::fair_coin(), &fixtures::first_letter_a()).unwrap(), Rational::new(1, 2));
    let three_quarters = fixtures::coin(&Rational::new(3, 4)).unwrap();
    assert_eq!(prob_nfa(&three_quarters, &nfa).unwrap(), Rational::new(3, 4));
}

#[test]
fn empty_word_and_empty_accepting_set() {
    let chain = fixtures::fair_coin();
    let none: Automaton = fixtures::SECOND_LETTER_A.replace("accepting f", "").parse().unwrap();
    assert!(prob_nfa(&chain, &none).unwrap().is_zero());
    let eps: Automaton = fixtures::SECOND_LETTER_A.replace("accepting f", "accepting q0").parse().unwrap();
    assert!(prob_nfa(&chain, &eps).unwrap().is_one());
}

#[test]
fn refusals_carry_their_reason() {
    let chain = fixtures::fair_coin();
    assert!(matches!(prob_nfa(&chain, &fixtures::ambiguous_nfa()), Err(Error::Ambiguous { .. })));
    assert!(matches!(prob_nfa(&chain, &fixtures::prefix_overlap_nfa()), Err(Error::PrefixOverlap { .. })));
    assert!(matches!(prob_nfa(&chain, &fixtures::gfa()), Err(Error::WrongMode { .. })));
    // the oracle is defined for every finite-mode automaton
    assert_eq!(prob_nfa_subset_oracle(&chain, &fixtures::prefix_overlap_nfa()).unwrap(), Rational::new(1, 2));
}

#[test]
fn kth_from_end_oracle_grows_exponentially() {
    let chain = fixtures::fair_coin();
    for k in 1..=8 {
        let (v, size) = prob_nfa_subset_oracle_with_limit(&chain, &fixtures::kth_from_end(k), 1 << 16).unwrap();
        assert!(v.is_one());
        assert!(size >= 1 << k, "k = {k}: {size}");
    }
    let small = prob_nfa_subset_oracle_with_limit(&chain, &fixtures::kth_from_end(10), 100);
    assert!(matches!(small, Err(Error::SizeAbort { .. })));
}

#[test]
fn monte_carlo_interval_covers_exact_value() {
    let chain = fixtures::fair_coin();
    let nfa = fixtures::second_letter_a();
    let exact = prob_nfa(&chain, &nfa).unwrap().to_f64();
    let covered = SplitMix64::new(11)
        .seeds(100)
        .into_iter()
        .filter(|&seed| simulate_prefix_acceptance(&chain, &nfa, 10_000, seed).unwrap().contains(exact))
        .count();
    assert!(covered >= 99, "{covered}/100");
}

#[test]
fn monte_carlo_is_reproducible() {
    let chain = fixtures::biased_coin();
    let nfa = fixtures::second_letter_a();
    let a = simulate_prefix_acceptance(&chain, &nfa, 2_000, 5).unwrap();
    let b = simulate_prefix_acceptance(&chain, &nfa, 2_000, 5).unwrap();
    assert_eq!(a, b);
}
