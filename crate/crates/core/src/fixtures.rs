//! Small named instances shipped with the crate (see `fixtures/`).

use crate::model::{Automaton, MarkovChain};
use crate::rational::Rational;

pub const FAIR_COIN: &str = include_str!("../fixtures/fair_coin.mc");
pub const BIASED_COIN: &str = include_str!("../fixtures/biased_coin.mc");
pub const GFA: &str = include_str!("../fixtures/gfa.aut");
pub const SECOND_LETTER_A: &str = include_str!("../fixtures/second_letter_a.aut");
pub const FIRST_LETTER_A: &str = include_str!("../fixtures/first_letter_a.aut");
pub const PREDICT_NEXT_LETTER: &str = include_str!("../fixtures/predict_next_letter.aut");
pub const UNIVERSAL: &str = include_str!("../fixtures/universal.aut");
pub const ALWAYS_A: &str = include_str!("../fixtures/always_a.aut");
pub const PREFIX_OVERLAP: &str = include_str!("../fixtures/prefix_overlap.aut");
pub const AMBIGUOUS: &str = include_str!("../fixtures/ambiguous.aut");

fn chain(text: &str) -> MarkovChain {
    text.parse().expect("shipped fixture parses")
}

fn automaton(text: &str) -> Automaton {
    text.parse().expect("shipped fixture parses")
}

pub fn fair_coin() -> MarkovChain {
    chain(FAIR_COIN)
}

pub fn biased_coin() -> MarkovChain {
    chain(BIASED_COIN)
}

/// Two-letter coin with `a` drawn with probability `p_a` at every step.
pub fn coin(p_a: &Rational) -> crate::Result<MarkovChain> {
    let p_b = Rational::one() - p_a;
    let row = vec![(0, p_a.clone()), (1, p_b.clone())];
    MarkovChain::new(vec!["a".into(), "b".into()], vec![row.clone(), row], vec![p_a.clone(), p_b], None)
}

pub fn gfa() -> Automaton {
    automaton(GFA)
}

pub fn second_letter_a() -> Automaton {
    automaton(SECOND_LETTER_A)
}

pub fn first_letter_a() -> Automaton {
    automaton(FIRST_LETTER_A)
}

pub fn predict_next_letter() -> Automaton {
    automaton(PREDICT_NEXT_LETTER)
}

pub fn universal() -> Automaton {
    automaton(UNIVERSAL)
}

pub fn always_a() -> Automaton {
    automaton(ALWAYS_A)
}

pub fn prefix_overlap_nfa() -> Automaton {
    automaton(PREFIX_OVERLAP)
}

pub fn ambiguous_nfa() -> Automaton {
    automaton(AMBIGUOUS)
}

/// NFA over `{a, b}` for "the k-th letter from the end is a" (`k >= 1`).
pub fn kth_from_end(k: usize) -> Automaton {
    let states: Vec<String> = (0..=k).map(|i| format!("q{i}")).collect();
    let mut transitions = vec![(0, 0, 0), (0, 1, 0), (0, 0, 1)];
    for i in 1..k {
        transitions.push((i, 0, i + 1));
        transitions.push((i, 1, i + 1));
    }
    Automaton::new(crate::model::Mode::Finite, vec!["a".into(), "b".into()], states, [0], [k], transitions)
        .expect("well-formed family member")
}
