//! Ground truth for Büchi acceptance on classes where it is elementary:
//! deterministic automata (bottom components of the product chain) and
//! functional chains (one lasso per start state), plus a sampled
//! over-approximation for everything else.

use crate::automata::{align_to_chain, lasso_membership, totalize, Lasso};
use crate::error::{Error, Result};
use crate::finite::MonteCarlo;
use crate::graph::Sccs;
use crate::model::{Automaton, MarkovChain, Mode};
use crate::product::{build_subset_chain, SUBSET_CHAIN_LIMIT};
use crate::rational::Rational;
use crate::rng::{par_map, CumulativeRow, SplitMix64};

fn require_buchi(aut: &Automaton) -> Result<()> {
    match aut.mode() {
        Mode::Buchi => Ok(()),
        Mode::Finite => Err(Error::WrongMode { expected: "nba" }),
    }
}

/// `Pr(L(D))` for a deterministic Büchi automaton: the probability of
/// entering a bottom component of the product chain that contains an
/// accepting automaton state. A rejecting sink completes `D` if needed.
pub fn prob_dba(chain: &MarkovChain, det: &Automaton) -> Result<Rational> {
    require_buchi(det)?;
    let det = totalize(&align_to_chain(det, chain)?)?;
    // with a deterministic automaton every subset is a singleton
    let product = build_subset_chain(chain, &det, |_, _| false, SUBSET_CHAIN_LIMIT)?;
    let adj = product.adjacency();
    let sccs = Sccs::new(&adj);
    let mut target = vec![false; product.len()];
    for id in 0..sccs.len() {
        if !sccs.is_bottom(&adj, id) {
            continue;
        }
        let members = &sccs.members[id];
        if members.iter().any(|&v| product.states[v].1.iter().any(|&q| det.is_accepting(q))) {
            for &v in members {
                target[v] = true;
            }
        }
    }
    let x = crate::linsolve::reachability_probabilities(&product.rows, &target)?;
    Ok(x[0].clone())
}

/// The lasso traced by a functional chain from `start`: the chain's state
/// sequence, read as letters.
pub fn functional_lasso(chain: &MarkovChain, start: usize) -> Result<Lasso> {
    let mut seen = vec![usize::MAX; chain.len()];
    let mut word = Vec::new();
    let mut s = start;
    while seen[s] == usize::MAX {
        seen[s] = word.len();
        word.push(s);
        s = chain.row(s)[0].0;
    }
    let v = word.split_off(seen[s]);
    Lasso::new(word, v)
}

/// `Pr(L(A))` for a chain in which every state has one successor: the sum of
/// the initial masses whose lasso the automaton accepts.
pub fn prob_functional(chain: &MarkovChain, aut: &Automaton) -> Result<Rational> {
    require_buchi(aut)?;
    if let Some(s) = (0..chain.len()).find(|&s| chain.row(s).len() != 1) {
        return Err(Error::NotFunctional(chain.state_name(s).to_string()));
    }
    let aut = align_to_chain(aut, chain)?;
    let mut value = Rational::zero();
    for (s, p) in chain.init().iter().enumerate() {
        if !p.is_zero() && lasso_membership(&aut, &functional_lasso(chain, s)?) {
            value += p;
        }
    }
    Ok(value)
}

/// Fraction of sampled length-`horizon` prefixes on which some run visits `F`
/// at least `k` times (the initial state counts as a visit). Every accepted
/// trajectory qualifies, so for large horizons this bounds `Pr(L(A))` from
/// above.
pub fn visits_upper_estimate(
    chain: &MarkovChain,
    aut: &Automaton,
    k: usize,
    horizon: usize,
    samples: usize,
    seed: u64,
) -> Result<MonteCarlo> {
    if k == 0 || horizon < k {
        return Err(Error::InvalidArgument(format!("visit estimate needs 1 <= k <= N (k = {k}, N = {horizon})")));
    }
    let aut = align_to_chain(aut, chain)?;
    let rows: Vec<CumulativeRow> = (0..chain.len()).map(|s| CumulativeRow::new(chain.row(s))).collect();
    let init_row: Vec<(usize, Rational)> =
        chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect();
    let init = CumulativeRow::new(&init_row);
    let bonus = |q: usize| usize::from(aut.is_accepting(q));

    let run = |seed: &u64| -> bool {
        let mut rng = SplitMix64::new(*seed);
        // best[q] = most F-visits (capped at k) over runs ending in q, plus one
        let mut best = vec![0usize; aut.len()];
        for &q in aut.initial().iter() {
            best[q] = 1 + bonus(q);
        }
        let mut next = vec![0usize; aut.len()];
        let mut s: Option<usize> = None;
        for _ in 0..horizon {
            if best.iter().any(|&b| b > k) {
                return true;
            }
            let t = match s {
                None => init.sample(&mut rng),
                Some(s) => rows[s].sample(&mut rng),
            };
            next.iter_mut().for_each(|b| *b = 0);
            for (q, &b) in best.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                for &q2 in aut.succ(q, t) {
                    next[q2] = next[q2].max((b + bonus(q2)).min(k + 1));
                }
            }
            std::mem::swap(&mut best, &mut next);
            if best.iter().all(|&b| b == 0) {
                return false;
            }
            s = Some(t);
        }
        best.iter().any(|&b| b > k)
    };
    let seeds = SplitMix64::new(seed).seeds(samples);
    let hits = par_map(&seeds, run).into_iter().filter(|&h| h).count();
    Ok(MonteCarlo::from_counts(samples, hits, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn dba_fixture_values() {
        assert!(prob_dba(&fixtures::fair_coin(), &fixtures::gfa()).unwrap().is_one());
        assert!(prob_dba(&fixtures::biased_coin(), &fixtures::gfa()).unwrap().is_one());
        assert!(prob_dba(&fixtures::fair_coin(), &fixtures::always_a()).unwrap().is_zero());
        assert_eq!(prob_dba(&fixtures::fair_coin(), &fixtures::predict_next_letter()), Err(Error::NotDeterministic));
    }

    #[test]
    fn functional_fixture_values() {
        let single: MarkovChain = "@mc\nstates a b\ninit a 1\ntrans a a 1\ntrans b b 1\n".parse().unwrap();
        assert!(prob_functional(&single, &fixtures::gfa()).unwrap().is_one());
        let split: MarkovChain = "@mc\nstates a b\ninit a 1/3\ninit b 2/3\ntrans a a 1\ntrans b b 1\n".parse().unwrap();
        assert_eq!(prob_functional(&split, &fixtures::gfa()).unwrap(), Rational::new(1, 3));
        let none: Automaton = fixtures::GFA.replace("accepting d1", "").parse().unwrap();
        assert!(prob_functional(&split, &none).unwrap().is_zero());
        assert!(matches!(prob_functional(&fixtures::fair_coin(), &fixtures::gfa()), Err(Error::NotFunctional(_))));
    }

    #[test]
    fn functional_lasso_shape() {
        let m: MarkovChain = "@mc\nstates a b c\ninit a 1\ntrans a b 1\ntrans b c 1\ntrans c b 1\n".parse().unwrap();
        let l = functional_lasso(&m, 0).unwrap();
        assert_eq!((l.u, l.v), (vec![0], vec![1, 2]));
    }

    #[test]
    fn visit_estimates() {
        let m = fixtures::fair_coin();
        let e = visits_upper_estimate(&m, &fixtures::gfa(), 5, 200, 10_000, 1).unwrap();
        assert!(e.contains(1.0) || e.estimate == 1.0, "{e:?}");
        let e = visits_upper_estimate(&m, &fixtures::predict_next_letter(), 5, 200, 10_000, 1).unwrap();
        assert!(e.estimate > 0.99, "{e:?}");
        let none: Automaton = fixtures::GFA.replace("accepting d1", "").parse().unwrap();
        assert_eq!(visits_upper_estimate(&m, &none, 5, 200, 1000, 1).unwrap().estimate, 0.0);
        assert!(visits_upper_estimate(&m, &none, 0, 200, 10, 1).is_err());
        assert!(visits_upper_estimate(&m, &none, 5, 4, 10, 1).is_err());
    }
}
