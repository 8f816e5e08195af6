//! Exact rational linear algebra for systems `x = C x + d`.
//!
//! Systems come from two places: the unknown vertices of a chain/automaton
//! product, and absorbing reachability in an explicit finite Markov chain.
//! Both are solved by exact Gaussian elimination on `(I - C) x = d`, and every
//! solution is substituted back before it is returned.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::graph;
use crate::model::{Automaton, MarkovChain};
use crate::product::{ProductGraph, VertexClass};
use crate::rational::Rational;

/// Largest number of unknowns accepted by [`solve_unique`].
pub const MAX_UNKNOWNS: usize = 2_000;

static SOLVED: AtomicUsize = AtomicUsize::new(0);
static RESIDUAL_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Process-wide tally of solved systems and of nonzero residuals seen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverStats {
    pub solved: usize,
    pub residual_failures: usize,
}

pub fn solver_stats() -> SolverStats {
    SolverStats { solved: SOLVED.load(Ordering::Relaxed), residual_failures: RESIDUAL_FAILURES.load(Ordering::Relaxed) }
}

/// `x = C x + d` with sparse rows of `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
}

impl LinearSystem {
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<(usize, Rational)>>, rhs: Vec<Rational>) -> Result<Self> {
        let n = labels.len();
        if matrix.len() != n || rhs.len() != n || matrix.iter().flatten().any(|(j, _)| *j >= n) {
            return Err(Error::Internal("linear system dimensions disagree".into()));
        }
        Ok(LinearSystem { labels, matrix, rhs })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The system over the unknown vertices of a product graph:
    /// `C[v][w] = P(s, s')` for each product edge `v -> w` between unknown
    /// vertices, and `d[v]` the sum of `P(s, s')` over edges into accepting
    /// vertices. Returns the system and the vertex of each row.
    pub fn from_product(graph: &ProductGraph, chain: &MarkovChain, aut: &Automaton) -> (Self, Vec<usize>) {
        let unknown: Vec<usize> = (0..graph.len()).filter(|&v| graph.class(v) == VertexClass::Unknown).collect();
        let mut row_of = vec![usize::MAX; graph.len()];
        for (i, &v) in unknown.iter().enumerate() {
            row_of[v] = i;
        }
        let mut matrix = Vec::with_capacity(unknown.len());
        let mut rhs = Vec::with_capacity(unknown.len());
        for &v in &unknown {
            let mut row = Vec::new();
            let mut d = Rational::zero();
            for (w, p) in graph.weighted_successors(v) {
                match graph.class(w) {
                    VertexClass::Unknown => row.push((row_of[w], p.clone())),
                    VertexClass::Accepting => d += p,
                    VertexClass::Dead => {}
                }
            }
            matrix.push(row);
            rhs.push(d);
        }
        let labels = unknown.iter().map(|&v| graph.vertex_name(chain, aut, v)).collect();
        (LinearSystem { labels, matrix, rhs }, unknown)
    }

    /// Every unknown must reach a row with positive constant term through
    /// nonzero entries of `C`; otherwise `(I - C)` need not be invertible.
    pub fn check_contraction(&self) -> Result<()> {
        let adj: Vec<Vec<usize>> =
            self.matrix.iter().map(|row| row.iter().filter(|(_, c)| !c.is_zero()).map(|(j, _)| *j).collect()).collect();
        let sources = (0..self.len()).filter(|&i| self.rhs[i].is_positive());
        let ok = graph::can_reach(&adj, sources);
        match ok.iter().position(|&b| !b) {
            Some(i) => Err(Error::ContractionViolated(self.labels[i].clone())),
            None => Ok(()),
        }
    }

    /// `x - C x - d`, entrywise.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.len())
            .map(|i| {
                let cx: Rational = self.matrix[i].iter().map(|(j, c)| c * &x[*j]).sum();
                &x[i] - &cx - &self.rhs[i]
            })
            .collect()
    }
}

/// The unique solution of `x = C x + d`.
///
/// The contraction precondition is checked first. The elimination pivots on
/// the entry of smallest bit size in the current column (lowest row on ties),
/// and the result is verified by exact substitution.
pub fn solve_unique(sys: &LinearSystem) -> Result<Vec<Rational>> {
    let n = sys.len();
    if n > MAX_UNKNOWNS {
        return Err(Error::SizeAbort { what: "linear system", limit: MAX_UNKNOWNS });
    }
    sys.check_contraction()?;

    // rows of I - C
    let mut rows: Vec<BTreeMap<usize, Rational>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = BTreeMap::new();
        row.insert(i, Rational::one());
        for (j, c) in &sys.matrix[i] {
            let entry = row.entry(*j).or_insert_with(Rational::zero);
            *entry -= c;
        }
        row.retain(|_, v: &mut Rational| !v.is_zero());
        rows.push(row);
    }
    let mut rhs = sys.rhs.clone();
    let mut pivot_row_of = vec![usize::MAX; n];
    let mut is_pivot = vec![false; n];

    for col in 0..n {
        let pivot = (0..n).filter(|&r| !is_pivot[r]).filter_map(|r| rows[r].get(&col).map(|v| (v.bit_size(), r))).min();
        let Some((_, p)) = pivot else {
            return Err(Error::Singular);
        };
        is_pivot[p] = true;
        pivot_row_of[col] = p;
        let pivot_row = std::mem::take(&mut rows[p]);
        let pivot_val = pivot_row[&col].clone();
        for r in 0..n {
            if is_pivot[r] {
                continue;
            }
            let Some(v) = rows[r].remove(&col) else { continue };
            let factor = &v / &pivot_val;
            for (j, a) in pivot_row.iter() {
                if *j == col {
                    continue;
                }
                let delta = &factor * a;
                let entry = rows[r].entry(*j).or_insert_with(Rational::zero);
                *entry -= &delta;
                if entry.is_zero() {
                    rows[r].remove(j);
                }
            }
            let delta = &factor * &rhs[p];
            rhs[r] -= &delta;
        }
        rows[p] = pivot_row;
    }

    let mut x = vec![Rational::zero(); n];
    for col in (0..n).rev() {
        let p = pivot_row_of[col];
        let mut acc = rhs[p].clone();
        for (j, a) in &rows[p] {
            if *j != col {
                acc -= &(a * &x[*j]);
            }
        }
        x[col] = acc / &rows[p][&col];
    }

    SOLVED.fetch_add(1, Ordering::Relaxed);
    if sys.residual(&x).iter().any(|r| !r.is_zero()) {
        RESIDUAL_FAILURES.fetch_add(1, Ordering::Relaxed);
        return Err(Error::Internal("nonzero residual after elimination".into()));
    }
    Ok(x)
}

/// Probability of eventually entering a target state, from every state of an
/// explicit finite Markov chain (`rows[s]` lists `(t, P(s, t))`).
///
/// Targets get 1 and states that cannot reach a target get 0. States whose
/// every path avoiding targets stays clear of those zero states also get 1;
/// only the remaining states go through [`solve_unique`].
pub fn reachability_probabilities(rows: &[Vec<(usize, Rational)>], target: &[bool]) -> Result<Vec<Rational>> {
    let n = rows.len();
    let adj: Vec<Vec<usize>> = rows.iter().map(|r| r.iter().map(|(t, _)| *t).collect()).collect();
    let targets: Vec<usize> = (0..n).filter(|&s| target[s]).collect();
    let reaches = graph::can_reach(&adj, targets.iter().copied());
    let absorbing: Vec<Vec<usize>> = (0..n).map(|s| if target[s] { vec![] } else { adj[s].clone() }).collect();
    let zero: Vec<usize> = (0..n).filter(|&s| !reaches[s]).collect();
    let may_fail = graph::can_reach(&absorbing, zero.iter().copied());

    let mut value = vec![Rational::zero(); n];
    let mut unknown = Vec::new();
    let mut row_of = vec![usize::MAX; n];
    for s in 0..n {
        if target[s] || (reaches[s] && !may_fail[s]) {
            value[s] = Rational::one();
        } else if reaches[s] {
            row_of[s] = unknown.len();
            unknown.push(s);
        }
    }
    if unknown.is_empty() {
        return Ok(value);
    }
    let mut matrix = Vec::with_capacity(unknown.len());
    let mut rhs = Vec::with_capacity(unknown.len());
    for &s in &unknown {
        let mut row = Vec::new();
        let mut d = Rational::zero();
        for (t, p) in &rows[s] {
            if row_of[*t] != usize::MAX {
                row.push((row_of[*t], p.clone()));
            } else if value[*t].is_one() {
                d += p;
            }
        }
        matrix.push(row);
        rhs.push(d);
    }
    let labels = unknown.iter().map(|s| format!("#{s}")).collect();
    let sys = LinearSystem::new(labels, matrix, rhs)?;
    let x = solve_unique(&sys)?;
    for (i, &s) in unknown.iter().enumerate() {
        value[s] = x[i].clone();
    }
    Ok(value)
}

impl crate::product::SubsetChain {
    /// Probability of reaching a target state from each subset-chain state.
    pub fn reachability(&self) -> Result<Vec<Rational>> {
        reachability_probabilities(&self.rows, &self.target)
    }
}
