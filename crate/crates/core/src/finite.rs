//! Probability that a trajectory of a Markov chain has a prefix accepted by a
//! finite-word automaton.
//!
//! [`prob_nfa`] is the polynomial method: one linear system over the unknown
//! vertices of the product graph. [`prob_nfa_subset_oracle`] determinizes on
//! the fly and accepts any automaton; [`simulate_prefix_acceptance`] samples.

use serde::Serialize;

use crate::automata::{align_to_chain, check_prefix_unambiguous, check_unambiguous, stop_at_accepting, trim};
use crate::error::{Error, Result};
use crate::linsolve::{solve_unique, LinearSystem};
use crate::model::{Automaton, MarkovChain, Mode};
use crate::product::{build_product, build_subset_chain, ChainPos, ProductGraph, VertexClass, SUBSET_CHAIN_LIMIT};
use crate::rational::Rational;
use crate::rng::{par_map, CumulativeRow, SplitMix64};

fn require_finite(aut: &Automaton) -> Result<()> {
    match aut.mode() {
        Mode::Finite => Ok(()),
        Mode::Buchi => Err(Error::WrongMode { expected: "nfa" }),
    }
}

fn accepts_empty_word(aut: &Automaton) -> bool {
    aut.initial().iter().any(|&q| aut.is_accepting(q))
}

/// The product graph, its linear system and the solved value, without any
/// precondition beyond alignment. The value is `Σ_{q ∈ Q0} ξ(start, q)`.
#[derive(Clone, Debug)]
pub struct ProductSolution {
    pub graph: ProductGraph,
    pub system: LinearSystem,
    /// Product vertex of each unknown.
    pub vertices: Vec<usize>,
    pub xi: Vec<Rational>,
    pub value: Rational,
}

/// Solves the product system for an automaton already over the chain's
/// states. This is the raw method: it sums first-hit accepting runs, which is
/// the acceptance probability only under the checks done by [`prob_nfa`].
pub fn solve_product_system(chain: &MarkovChain, aut: &Automaton) -> Result<ProductSolution> {
    let graph = build_product(chain, aut)?;
    let (system, vertices) = LinearSystem::from_product(&graph, chain, aut);
    let xi = solve_unique(&system)?;
    let mut value = Rational::zero();
    for v in graph.start_vertices() {
        match graph.class(v) {
            VertexClass::Accepting => value += &Rational::one(),
            VertexClass::Dead => {}
            VertexClass::Unknown => {
                let i = vertices.binary_search(&v).expect("unknown vertex has a row");
                value += &xi[i];
            }
        }
    }
    Ok(ProductSolution { graph, system, vertices, xi, value })
}

/// `Pr(trajectory has a prefix in L(A))`, exactly, via the product linear system.
///
/// Refuses ambiguous automata, and automata on which some trajectory reaches
/// acceptance along two distinct first-hit runs: there the system counts
/// runs rather than trajectories and its solution is not the probability.
pub fn prob_nfa(chain: &MarkovChain, aut: &Automaton) -> Result<Rational> {
    require_finite(aut)?;
    let aut = align_to_chain(aut, chain)?;
    let verdict = check_unambiguous(&aut);
    if let Some(w) = verdict.witness {
        return Err(Error::Ambiguous { witness: w.render(&aut) });
    }
    if accepts_empty_word(&aut) {
        return Ok(Rational::one());
    }
    let trimmed = trim(&aut);
    if let Some(w) = check_prefix_unambiguous(&trimmed).witness {
        return Err(Error::PrefixOverlap { witness: w.render(&trimmed) });
    }
    // same first-hit runs, but no vertex the start cannot reach without passing F
    let value = solve_product_system(chain, &stop_at_accepting(&aut))?.value;
    if !value.is_probability() {
        return Err(Error::Internal(format!("computed probability {value} outside [0,1]")));
    }
    Ok(value)
}

/// Same quantity through the determinized chain: reachability of a subset
/// containing an accepting state. Exact for every automaton.
pub fn prob_nfa_subset_oracle(chain: &MarkovChain, aut: &Automaton) -> Result<Rational> {
    prob_nfa_subset_oracle_with_limit(chain, aut, SUBSET_CHAIN_LIMIT).map(|(v, _)| v)
}

/// As [`prob_nfa_subset_oracle`], also returning the subset-chain size.
pub fn prob_nfa_subset_oracle_with_limit(
    chain: &MarkovChain,
    aut: &Automaton,
    limit: usize,
) -> Result<(Rational, usize)> {
    require_finite(aut)?;
    let aut = align_to_chain(aut, chain)?;
    let sc = build_subset_chain(chain, &aut, |_, u| u.iter().any(|&q| aut.is_accepting(q)), limit)?;
    let x = sc.reachability()?;
    Ok((x[0].clone(), sc.len()))
}

/// Outcome of a Monte Carlo run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub estimate: f64,
    pub half_width_3sigma: f64,
    pub samples: usize,
    pub accepted: usize,
    /// Samples stopped by the step cap before a decision; counted as rejected.
    pub capped: usize,
}

impl MonteCarlo {
    pub fn from_counts(samples: usize, accepted: usize, capped: usize) -> Self {
        let n = samples.max(1) as f64;
        let p = accepted as f64 / n;
        MonteCarlo { estimate: p, half_width_3sigma: 3.0 * (p * (1.0 - p) / n).sqrt(), samples, accepted, capped }
    }

    pub fn contains(&self, exact: f64) -> bool {
        (self.estimate - exact).abs() <= self.half_width_3sigma
    }
}

/// Step cap per sampled trajectory.
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Outcome {
    Accept,
    Reject,
    Capped,
}

/// Samples trajectories while tracking the set of reachable automaton states;
/// a sample accepts when that set meets `F` and rejects once no state in it
/// can still reach `F` along the chain.
pub fn simulate_prefix_acceptance(
    chain: &MarkovChain,
    aut: &Automaton,
    samples: usize,
    seed: u64,
) -> Result<MonteCarlo> {
    require_finite(aut)?;
    let aut = align_to_chain(aut, chain)?;
    let graph = build_product(chain, &aut)?;
    let alive = |pos: ChainPos, q: usize| graph.vertex_id(pos, q).is_some_and(|v| graph.class(v) != VertexClass::Dead);
    let rows: Vec<CumulativeRow> = (0..chain.len()).map(|s| CumulativeRow::new(chain.row(s))).collect();
    let init_row: Vec<(usize, Rational)> =
        chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect();
    let init = CumulativeRow::new(&init_row);
    let initial: Vec<usize> = aut.initial().iter().copied().collect();

    let run = |seed: &u64| -> Outcome {
        let mut rng = SplitMix64::new(*seed);
        let mut set = initial.clone();
        let mut pos = ChainPos::Start;
        let mut mark = vec![false; aut.len()];
        for _ in 0..=MAX_STEPS {
            if set.iter().any(|&q| aut.is_accepting(q)) {
                return Outcome::Accept;
            }
            if !set.iter().any(|&q| alive(pos, q)) {
                return Outcome::Reject;
            }
            let t = match pos {
                ChainPos::Start => init.sample(&mut rng),
                ChainPos::State(s) => rows[s].sample(&mut rng),
            };
            for &q in &set {
                for &q2 in aut.succ(q, t) {
                    mark[q2] = true;
                }
            }
            set = (0..aut.len()).filter(|&q| std::mem::take(&mut mark[q])).collect();
            pos = ChainPos::State(t);
        }
        Outcome::Capped
    };
    let seeds = SplitMix64::new(seed).seeds(samples);
    let outcomes = par_map(&seeds, run);
    let accepted = outcomes.iter().filter(|o| **o == Outcome::Accept).count();
    let capped = outcomes.iter().filter(|o| **o == Outcome::Capped).count();
    Ok(MonteCarlo::from_counts(samples, accepted, capped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_values() {
        let half = Rational::new(1, 2);
        let m = fixtures::fair_coin();
        for a in [fixtures::first_letter_a(), fixtures::second_letter_a()] {
            assert_eq!(prob_nfa(&m, &a).unwrap(), half);
            assert_eq!(prob_nfa_subset_oracle(&m, &a).unwrap(), half);
        }
        let biased = fixtures::biased_coin();
        assert_eq!(prob_nfa(&biased, &fixtures::second_letter_a()).unwrap(), Rational::new(2, 3));
    }

    #[test]
    fn empty_accepting_set() {
        let a: Automaton = fixtures::SECOND_LETTER_A.replace("accepting f", "").parse().unwrap();
        let m = fixtures::fair_coin();
        assert!(prob_nfa(&m, &a).unwrap().is_zero());
        assert!(prob_nfa_subset_oracle(&m, &a).unwrap().is_zero());
        let mc = simulate_prefix_acceptance(&m, &a, 1000, 3).unwrap();
        assert_eq!((mc.estimate, mc.accepted), (0.0, 0));
    }

    #[test]
    fn ambiguous_is_refused_but_oracle_answers() {
        let m = fixtures::fair_coin();
        let a = fixtures::ambiguous_nfa();
        assert!(matches!(prob_nfa(&m, &a), Err(Error::Ambiguous { .. })));
        assert!(prob_nfa_subset_oracle(&m, &a).unwrap().is_probability());
    }

    #[test]
    fn prefix_overlap_is_refused() {
        let m = fixtures::fair_coin();
        let a = fixtures::prefix_overlap_nfa();
        assert!(check_unambiguous(&a).unambiguous);
        assert!(matches!(prob_nfa(&m, &a), Err(Error::PrefixOverlap { .. })));
        // the raw system overcounts: 3/4 against the true 1/2
        assert_eq!(solve_product_system(&m, &a).unwrap().value, Rational::new(3, 4));
        assert_eq!(prob_nfa_subset_oracle(&m, &a).unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn kth_from_end_system_is_singular() {
        let m = fixtures::fair_coin();
        let a = fixtures::kth_from_end(3);
        assert_eq!(solve_product_system(&m, &a).unwrap_err(), Error::Singular);
        let (v, size) = prob_nfa_subset_oracle_with_limit(&m, &fixtures::kth_from_end(10), SUBSET_CHAIN_LIMIT).unwrap();
        assert!(v.is_one());
        assert!(size >= 1 << 10);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_consistent() {
        let m = fixtures::fair_coin();
        let a = fixtures::second_letter_a();
        let r1 = simulate_prefix_acceptance(&m, &a, 100_000, 11).unwrap();
        let r2 = simulate_prefix_acceptance(&m, &a, 100_000, 11).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.contains(0.5), "{r1:?}");
        assert_eq!(r1.capped, 0);
    }
}
