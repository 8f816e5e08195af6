//! The recurrent-pair procedure for unambiguous Büchi automata.
//!
//! A pair `(s, q)` with `q` accepting is *recurrent* when, started after chain
//! state `s`, the chain almost surely produces a word leading `q` back to `q`
//! and ending in `s`. The procedure then reports the probability of reaching
//! some recurrent pair from the initial states.
//!
//! The procedure is unsound: a universal automaton can have no recurrent pair
//! at all (see [`crate::fixtures::predict_next_letter`]). It is implemented
//! as stated so that the harness can measure where it fails, and every verdict
//! carries [`SOUNDNESS_FLAG`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::automata::{
    align_to_chain, build_g_nfa_union, build_h_nfa, check_prefix_unambiguous, check_unambiguous, stop_at_accepting,
    trim,
};
use crate::error::{Error, Result};
use crate::finite::{prob_nfa_subset_oracle_with_limit, solve_product_system};
use crate::model::{Automaton, MarkovChain, Mode};
use crate::product::{build_subset_chain, ChainPos, SUBSET_CHAIN_LIMIT};
use crate::rational::Rational;

/// Carried by every [`UbaVerdict`].
pub const SOUNDNESS_FLAG: &str = "WITHDRAWN — see erratum";

/// How a probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// The product linear system.
    Lemma1,
    /// Reachability in the determinized chain.
    SubsetFallback,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lemma1 => "lemma1",
            Method::SubsetFallback => "subset_fallback",
        }
    }
}

/// How the probability of reaching a recurrent pair is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnionMethod {
    #[default]
    Subset,
    Lemma1,
}

impl std::str::FromStr for UnionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subset" => Ok(UnionMethod::Subset),
            "lemma1" => Ok(UnionMethod::Lemma1),
            _ => Err(Error::InvalidArgument(format!("union method `{s}` (expected subset or lemma1)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecurrenceRow {
    /// Chain state (equivalently, last letter).
    pub s: String,
    pub q: String,
    #[serde(skip)]
    pub letter: usize,
    #[serde(skip)]
    pub state: usize,
    /// `Pr_{M,s}(H_{s,q})`: probability, started after `s`, of a prefix that
    /// leads `q` back to `q` and ends in `s`.
    pub prob_h: Rational,
    pub recurrent: bool,
    pub h_unambiguous: bool,
    /// Whether the return automaton passes the prefix-overlap test too; the
    /// linear system is used only when both hold.
    pub h_prefix_unambiguous: bool,
    pub method_used: Method,
}

/// One row per `(s, q)` with `q` accepting, in `(s, q)` index order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RecurrenceTable {
    pub rows: Vec<RecurrenceRow>,
}

impl RecurrenceTable {
    pub fn recurrent(&self) -> impl Iterator<Item = &RecurrenceRow> {
        self.rows.iter().filter(|r| r.recurrent)
    }

    /// Recurrent `(letter, state)` index pairs.
    pub fn recurrent_pairs(&self) -> Vec<(usize, usize)> {
        self.recurrent().map(|r| (r.letter, r.state)).collect()
    }

    pub fn recurrent_count(&self) -> usize {
        self.recurrent().count()
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let header = ["s", "q", "prob_H", "recurrent", "h_unambiguous", "h_prefix_unambiguous", "method"];
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.s.clone(),
                    r.q.clone(),
                    r.prob_h.to_string(),
                    r.recurrent.to_string(),
                    r.h_unambiguous.to_string(),
                    r.h_prefix_unambiguous.to_string(),
                    r.method_used.as_str().to_string(),
                ]
            })
            .collect();
        let mut width = header.map(str::len);
        for row in &body {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: Vec<&str>| {
            let mut l = String::new();
            for (i, (c, w)) in cells.iter().zip(width).enumerate() {
                if i > 0 {
                    l.push_str("  ");
                }
                let _ = write!(l, "{c:<w$}");
            }
            out.push_str(l.trim_end());
            out.push('\n');
        };
        line(header.to_vec());
        for row in &body {
            line(row.iter().map(String::as_str).collect());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UbaVerdict {
    pub value: Rational,
    pub recurrence: RecurrenceTable,
    pub soundness_flag: &'static str,
    /// The method that produced `value`.
    pub union_method: UnionMethod,
}

fn prepare(chain: &MarkovChain, aut: &Automaton) -> Result<Automaton> {
    if aut.mode() != Mode::Buchi {
        return Err(Error::WrongMode { expected: "nba" });
    }
    let aut = align_to_chain(aut, chain)?;
    if let Some(w) = check_unambiguous(&aut).witness {
        return Err(Error::Ambiguous { witness: w.render(&aut) });
    }
    Ok(aut)
}

/// Probability of a finite-word automaton's language, by the linear system
/// when it applies and through the subset chain otherwise.
fn finite_probability(chain: &MarkovChain, nfa: &Automaton) -> Result<(Rational, bool, bool, Method)> {
    let unambiguous = check_unambiguous(nfa).unambiguous;
    let prefix_unambiguous = check_prefix_unambiguous(&trim(nfa)).unambiguous;
    if unambiguous && prefix_unambiguous {
        let value = solve_product_system(chain, &stop_at_accepting(nfa))?.value;
        Ok((value, unambiguous, prefix_unambiguous, Method::Lemma1))
    } else {
        let (value, _) = prob_nfa_subset_oracle_with_limit(chain, nfa, SUBSET_CHAIN_LIMIT)?;
        Ok((value, unambiguous, prefix_unambiguous, Method::SubsetFallback))
    }
}

/// Builds the recurrence table: for every chain state `s` and accepting `q`,
/// the exact probability of the return language of `q` through `s` under the
/// chain restarted with distribution `P(s, ·)`.
pub fn recurrent_pairs(chain: &MarkovChain, aut: &Automaton) -> Result<RecurrenceTable> {
    let aut = prepare(chain, aut)?;
    table_for(chain, &aut)
}

fn table_for(chain: &MarkovChain, aut: &Automaton) -> Result<RecurrenceTable> {
    let mut rows = Vec::new();
    for s in 0..chain.len() {
        let restarted = chain.started_after(s).without_labels();
        for &q in aut.accepting().iter() {
            let h = build_h_nfa(aut, s, q)?.with_mode(Mode::Finite);
            let (prob_h, h_unambiguous, h_prefix_unambiguous, method_used) = finite_probability(&restarted, &h)?;
            rows.push(RecurrenceRow {
                s: chain.state_name(s).to_string(),
                q: aut.state_name(q).to_string(),
                letter: s,
                state: q,
                recurrent: prob_h.is_one(),
                prob_h,
                h_unambiguous,
                h_prefix_unambiguous,
                method_used,
            });
        }
    }
    Ok(RecurrenceTable { rows })
}

/// Probability of reaching a recurrent pair: some prefix ending in `s` leads
/// from an initial state to `q` with `(s, q)` recurrent.
///
/// With [`UnionMethod::Lemma1`] the union automaton is solved through the
/// linear system when it passes both ambiguity tests, and the result is
/// checked against the subset chain; otherwise the subset value is used and
/// the verdict records that.
pub fn prob_uba_recurrent(chain: &MarkovChain, aut: &Automaton, union_method: UnionMethod) -> Result<UbaVerdict> {
    let aut = prepare(chain, aut)?;
    let recurrence = table_for(chain, &aut)?;
    let pairs = recurrence.recurrent_pairs();

    let mut marked = vec![vec![false; aut.len()]; chain.len()];
    for &(s, q) in &pairs {
        marked[s][q] = true;
    }
    let sc = build_subset_chain(
        chain,
        &aut,
        |pos, set| match pos {
            ChainPos::Start => false,
            ChainPos::State(s) => set.iter().any(|&q| marked[s][q]),
        },
        SUBSET_CHAIN_LIMIT,
    )?;
    let subset_value = sc.reachability()?[0].clone();

    let mut used = UnionMethod::Subset;
    if union_method == UnionMethod::Lemma1 {
        let g = build_g_nfa_union(&aut, &pairs)?;
        let g = trim(&g);
        if check_unambiguous(&g).unambiguous && check_prefix_unambiguous(&g).unambiguous {
            let lemma_value = solve_product_system(&chain.without_labels(), &stop_at_accepting(&g))?.value;
            if lemma_value != subset_value {
                return Err(Error::Internal(format!(
                    "union probability disagrees between methods: {lemma_value} vs {subset_value}"
                )));
            }
            used = UnionMethod::Lemma1;
        }
    }
    Ok(UbaVerdict { value: subset_value, recurrence, soundness_flag: SOUNDNESS_FLAG, union_method: used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn gfa_table_and_value() {
        let m = fixtures::fair_coin();
        let a = fixtures::gfa();
        let t = recurrent_pairs(&m, &a).unwrap();
        assert_eq!(t.rows.len(), 2);
        let by = |s: &str| t.rows.iter().find(|r| r.s == s).unwrap();
        assert!(by("a").prob_h.is_one() && by("a").recurrent);
        assert!(by("b").prob_h.is_zero() && !by("b").recurrent);
        let v = prob_uba_recurrent(&m, &a, UnionMethod::Subset).unwrap();
        assert!(v.value.is_one());
        assert_eq!(v.soundness_flag, SOUNDNESS_FLAG);
    }

    #[test]
    fn predict_next_letter_has_no_recurrent_pair() {
        let m = fixtures::fair_coin();
        let a = fixtures::predict_next_letter();
        let t = recurrent_pairs(&m, &a).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.recurrent_count(), 0);
        assert!(t.rows.iter().all(|r| r.prob_h == Rational::new(1, 2)));
        let v = prob_uba_recurrent(&m, &a, UnionMethod::Subset).unwrap();
        assert!(v.value.is_zero());
    }

    #[test]
    fn empty_accepting_set() {
        let m = fixtures::fair_coin();
        let a: Automaton = fixtures::GFA.replace("accepting d1", "").parse().unwrap();
        assert!(recurrent_pairs(&m, &a).unwrap().rows.is_empty());
        assert!(prob_uba_recurrent(&m, &a, UnionMethod::Lemma1).unwrap().value.is_zero());
    }

    #[test]
    fn union_methods_agree_when_both_apply() {
        let m = fixtures::fair_coin();
        for a in [fixtures::gfa(), fixtures::always_a(), fixtures::universal()] {
            let s = prob_uba_recurrent(&m, &a, UnionMethod::Subset).unwrap();
            let l = prob_uba_recurrent(&m, &a, UnionMethod::Lemma1).unwrap();
            assert_eq!(s.value, l.value);
        }
    }

    #[test]
    fn serialization_carries_the_flag() {
        let v = prob_uba_recurrent(&fixtures::fair_coin(), &fixtures::gfa(), UnionMethod::Subset).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains(SOUNDNESS_FLAG));
        assert!(json.contains("\"method_used\":\"lemma1\"") || json.contains("subset_fallback"));
    }

    #[test]
    fn ambiguous_input_is_refused() {
        let a: Automaton = "@automaton nba\nalphabet a b\nstates q r\ninitial q\naccepting q r\n\
                            trans q a q\ntrans q a r\ntrans r a r\ntrans r b q\ntrans q b q\n"
            .parse()
            .unwrap();
        let r = recurrent_pairs(&fixtures::fair_coin(), &a);
        assert!(matches!(r, Err(Error::Ambiguous { .. })), "{r:?}");
    }

    #[test]
    fn text_table_is_aligned() {
        let t = recurrent_pairs(&fixtures::fair_coin(), &fixtures::gfa()).unwrap();
        let text = t.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("s  q"));
    }
}
