//! Random instances and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mcuba::graph::{self, Sccs};
use mcuba::rng::SplitMix64;
use mcuba::{Automaton, MarkovChain, Mode, Rational};

/// Random chain over states `s0..s{n-1}` with small denominators.
pub fn random_chain(rng: &mut SplitMix64, n: usize) -> MarkovChain {
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let dist = |rng: &mut SplitMix64| {
        let mut support: Vec<usize> = (0..n).filter(|_| rng.chance(1, 2)).collect();
        if support.is_empty() {
            support.push(rng.below(n as u64) as usize);
        }
        let k = support.len() as u64;
        let den = k.max(1 + rng.below(8));
        let mut units = vec![1u64; support.len()];
        for _ in 0..den - k {
            units[rng.below(k) as usize] += 1;
        }
        support.into_iter().zip(units).map(|(s, u)| (s, Rational::new(u as i64, den as i64))).collect::<Vec<_>>()
    };
    let rows = (0..n).map(|_| dist(rng)).collect();
    let mut init = vec![Rational::zero(); n];
    for (s, p) in dist(rng) {
        init[s] = p;
    }
    MarkovChain::new(states, rows, init, None).unwrap()
}

/// Random automaton; each transition is present with probability `num/den`.
pub fn random_automaton(
    rng: &mut SplitMix64,
    mode: Mode,
    alphabet: &[String],
    n: usize,
    num: u64,
    den: u64,
) -> Automaton {
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let initial: Vec<usize> = (0..n).filter(|&q| q == 0 || rng.chance(1, 4)).collect();
    let accepting: Vec<usize> = (0..n).filter(|_| rng.chance(1, 2)).collect();
    let mut transitions = Vec::new();
    for p in 0..n {
        for a in 0..alphabet.len() {
            for q in 0..n {
                if rng.chance(num, den) {
                    transitions.push((p, a, q));
                }
            }
        }
    }
    Automaton::new(mode, alphabet.to_vec(), states, initial, accepting, transitions).unwrap()
}

/// All words of length exactly `len` over `k` letters.
pub fn words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    out
}

/// Number of accepting runs of a finite word, saturating at 2.
pub fn accepting_runs(aut: &Automaton, word: &[usize]) -> u64 {
    let mut count = vec![0u64; aut.len()];
    for &q in aut.initial().iter() {
        count[q] = 1;
    }
    for &a in word {
        let mut next = vec![0u64; aut.len()];
        for (q, &c) in count.iter().enumerate() {
            for &q2 in aut.succ(q, a) {
                next[q2] = (next[q2] + c).min(2);
            }
        }
        count = next;
    }
    aut.accepting().iter().map(|&q| count[q]).sum::<u64>().min(2)
}

/// Finite-mode ambiguity by enumerating every word up to `max_len`.
pub fn brute_ambiguous_finite(aut: &Automaton, max_len: usize) -> bool {
    (0..=max_len).any(|len| words(aut.letters(), len).iter().any(|w| accepting_runs(aut, w) >= 2))
}

/// Whether the lasso `u v^ω` has two distinct accepting runs. Runs are paths
/// in the graph of (state, position) configurations; two accepting runs exist
/// iff two distinct accepting-capable configurations start them, or some
/// reachable configuration has two distinct accepting-capable successors.
pub fn lasso_has_two_accepting_runs(aut: &Automaton, u: &[usize], v: &[usize]) -> bool {
    let len = u.len() + v.len();
    let next_pos = |i: usize| if i + 1 < len { i + 1 } else { u.len() };
    let letter = |i: usize| if i < u.len() { u[i] } else { v[i - u.len()] };
    let id = |q: usize, i: usize| q * len + i;
    let n = aut.len() * len;
    let mut adj = vec![Vec::new(); n];
    for q in 0..aut.len() {
        for i in 0..len {
            for &q2 in aut.succ(q, letter(i)) {
                adj[id(q, i)].push(id(q2, next_pos(i)));
            }
        }
    }
    let sccs = Sccs::new(&adj);
    let good: Vec<usize> =
        (0..n).filter(|&c| aut.is_accepting(c / len) && sccs.is_nontrivial(&adj, sccs.component[c])).collect();
    let capable = graph::can_reach(&adj, good);
    let starts: Vec<usize> = aut.initial().iter().map(|&q| id(q, 0)).filter(|&c| capable[c]).collect();
    if starts.len() >= 2 {
        return true;
    }
    let reach = graph::reachable(&adj, starts);
    (0..n).any(|c| reach[c] && adj[c].iter().filter(|&&d| capable[d]).count() >= 2)
}

/// Büchi-mode ambiguity over all lassos with `|u| <= max_u`, `1 <= |v| <= max_v`.
pub fn brute_ambiguous_buchi(aut: &Automaton, max_u: usize, max_v: usize) -> bool {
    (0..=max_u).any(|lu| {
        words(aut.letters(), lu).iter().any(|u| {
            (1..=max_v).any(|lv| words(aut.letters(), lv).iter().any(|v| lasso_has_two_accepting_runs(aut, u, v)))
        })
    })
}

/// Whether `u v^ω` has at least one accepting run.
pub fn lasso_accepted(aut: &Automaton, u: &[usize], v: &[usize]) -> bool {
    let len = u.len() + v.len();
    let next_pos = |i: usize| if i + 1 < len { i + 1 } else { u.len() };
    let letter = |i: usize| if i < u.len() { u[i] } else { v[i - u.len()] };
    let id = |q: usize, i: usize| q * len + i;
    let n = aut.len() * len;
    let mut adj = vec![Vec::new(); n];
    for q in 0..aut.len() {
        for i in 0..len {
            for &q2 in aut.succ(q, letter(i)) {
                adj[id(q, i)].push(id(q2, next_pos(i)));
            }
        }
    }
    let sccs = Sccs::new(&adj);
    let reach = graph::reachable(&adj, aut.initial().iter().map(|&q| id(q, 0)));
    (0..n).any(|c| reach[c] && aut.is_accepting(c / len) && sccs.is_nontrivial(&adj, sccs.component[c]))
}

/// Exact probability that a trajectory has an accepted prefix of length at
/// most `horizon`, by enumerating chain paths (tiny instances only).
pub fn bounded_prefix_probability(chain: &MarkovChain, aut: &Automaton, horizon: usize) -> Rational {
    fn go(
        chain: &MarkovChain,
        aut: &Automaton,
        pos: Option<usize>,
        set: Vec<usize>,
        mass: Rational,
        left: usize,
    ) -> Rational {
        if set.iter().any(|&q| aut.is_accepting(q)) {
            return mass;
        }
        if left == 0 || set.is_empty() {
            return Rational::zero();
        }
        let succ: Vec<(usize, Rational)> = match pos {
            None => {
                chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect()
            }
            Some(s) => chain.row(s).to_vec(),
        };
        let mut total = Rational::zero();
        for (t, p) in succ {
            let mut next: Vec<usize> = set.iter().flat_map(|&q| aut.succ(q, t).iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            total += &go(chain, aut, Some(t), next, &mass * &p, left - 1);
        }
        total
    }
    go(chain, aut, None, aut.initial().iter().copied().collect(), Rational::one(), horizon)
}

/// Random lasso with `|u| <= max_u` and `1 <= |v| <= max_v`.
pub fn random_lasso(rng: &mut SplitMix64, letters: usize, max_u: usize, max_v: usize) -> (Vec<usize>, Vec<usize>) {
    let lu = rng.below(max_u as u64 + 1) as usize;
    let lv = 1 + rng.below(max_v as u64) as usize;
    let u = (0..lu).map(|_| rng.below(letters as u64) as usize).collect();
    let v = (0..lv).map(|_| rng.below(letters as u64) as usize).collect();
    (u, v)
}
