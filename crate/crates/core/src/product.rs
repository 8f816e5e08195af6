//! Products of a Markov chain with an automaton.
//!
//! [`ProductGraph`] is the nondeterministic product on `(chain state,
//! automaton state)` vertices with the accepting / dead / unknown partition.
//! [`SubsetChain`] is the deterministic product that follows the set of
//! automaton states reachable along the trajectory; it is a Markov chain
//! itself and serves as the exact reference for every probability computed
//! through the product graph.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{self, Adjacency};
use crate::model::{fresh_name, Automaton, MarkovChain};
use crate::rational::Rational;

/// Default cap on materialized subset-chain states.
pub const SUBSET_CHAIN_LIMIT: usize = 200_000;

/// Appends a fresh state that moves according to the initial distribution and
/// makes it the sole initial state. The new state has no incoming transitions.
/// If the chain is labelled, the new state borrows the first state's label;
/// it is never read as a letter.
pub fn add_virtual_initial(chain: &MarkovChain) -> MarkovChain {
    let n = chain.len();
    let name = fresh_name("s0", |x| chain.state_index(x).is_some());
    let mut states = chain.states().to_vec();
    states.push(name);
    let mut rows: Vec<Vec<(usize, Rational)>> = (0..n).map(|s| chain.row(s).to_vec()).collect();
    rows.push(chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect());
    let mut init = vec![Rational::zero(); n + 1];
    init[n] = Rational::one();
    let labels = chain.labels().map(|l| {
        let mut l = l.to_vec();
        let borrowed = l.first().cloned().unwrap_or_else(|| "_".into());
        l.push(borrowed);
        l
    });
    MarkovChain::new(states, rows, init, labels).expect("extension of a valid chain is valid")
}

/// Fails unless the automaton's alphabet is the chain's state list, in order.
pub fn ensure_aligned(chain: &MarkovChain, aut: &Automaton) -> Result<()> {
    if aut.alphabet() != chain.states() {
        return Err(Error::AlphabetMismatch(format!(
            "automaton alphabet [{}] differs from chain states [{}]",
            aut.alphabet().join(" "),
            chain.states().join(" ")
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    Accepting,
    Dead,
    Unknown,
}

/// Chain-side component of a product vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChainPos {
    /// The virtual start, before the first letter.
    Start,
    State(usize),
}

/// Product graph: `(s, q) -> (s', q')` iff `P(s, s') > 0` and `q'` is a
/// successor of `q` on letter `s'`. Start vertices carry the initial
/// distribution and exist only for initial automaton states.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    vertices: Vec<(ChainPos, usize)>,
    index: HashMap<(ChainPos, usize), usize>,
    edges: Adjacency,
    /// Probability of each edge, aligned with `edges`.
    weights: Vec<Vec<Rational>>,
    class: Vec<VertexClass>,
}

pub fn build_product(chain: &MarkovChain, aut: &Automaton) -> Result<ProductGraph> {
    ensure_aligned(chain, aut)?;
    let n = chain.len();
    let m = aut.len();
    let mut vertices = Vec::with_capacity(n * m + aut.initial().len());
    for s in 0..n {
        for q in 0..m {
            vertices.push((ChainPos::State(s), q));
        }
    }
    for &q in aut.initial() {
        vertices.push((ChainPos::Start, q));
    }
    let index: HashMap<_, _> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    let start_row: Vec<(usize, Rational)> =
        chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect();
    let mut edges = Vec::with_capacity(vertices.len());
    let mut weights = Vec::with_capacity(vertices.len());
    for &(pos, q) in &vertices {
        let row = match pos {
            ChainPos::Start => &start_row[..],
            ChainPos::State(s) => chain.row(s),
        };
        let mut out = Vec::new();
        let mut w = Vec::new();
        for (t, p) in row {
            for &q2 in aut.succ(q, *t) {
                out.push(index[&(ChainPos::State(*t), q2)]);
                w.push(p.clone());
            }
        }
        edges.push(out);
        weights.push(w);
    }

    let accepting: Vec<usize> = (0..vertices.len()).filter(|&v| aut.is_accepting(vertices[v].1)).collect();
    let alive = graph::can_reach(&edges, accepting.iter().copied());
    let class = (0..vertices.len())
        .map(|v| {
            if aut.is_accepting(vertices[v].1) {
                VertexClass::Accepting
            } else if alive[v] {
                VertexClass::Unknown
            } else {
                VertexClass::Dead
            }
        })
        .collect();
    Ok(ProductGraph { vertices, index, edges, weights, class })
}

impl ProductGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, v: usize) -> (ChainPos, usize) {
        self.vertices[v]
    }

    pub fn vertex_id(&self, pos: ChainPos, q: usize) -> Option<usize> {
        self.index.get(&(pos, q)).copied()
    }

    pub fn edges(&self) -> &Adjacency {
        &self.edges
    }

    /// Outgoing `(target, probability)` pairs; one entry per product edge.
    pub fn weighted_successors(&self, v: usize) -> impl Iterator<Item = (usize, &Rational)> {
        self.edges[v].iter().copied().zip(self.weights[v].iter())
    }

    pub fn class(&self, v: usize) -> VertexClass {
        self.class[v]
    }

    pub fn start_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.vertices[v].0 == ChainPos::Start)
    }

    pub fn vertex_name(&self, chain: &MarkovChain, aut: &Automaton, v: usize) -> String {
        let (pos, q) = self.vertices[v];
        let s = match pos {
            ChainPos::Start => "^",
            ChainPos::State(s) => chain.state_name(s),
        };
        format!("({},{})", s, aut.state_name(q))
    }

    /// Graphviz rendering: accepting vertices double circled, dead ones grey.
    pub fn to_dot(&self, chain: &MarkovChain, aut: &Automaton) -> String {
        let mut out = String::from("digraph product {\n  rankdir=LR;\n");
        for v in 0..self.len() {
            let style = match self.class[v] {
                VertexClass::Accepting => "shape=doublecircle",
                VertexClass::Dead => "shape=circle,color=grey,fontcolor=grey",
                VertexClass::Unknown => "shape=circle",
            };
            let _ = writeln!(out, "  v{v} [label=\"{}\",{style}];", self.vertex_name(chain, aut, v));
        }
        for v in 0..self.len() {
            for (t, p) in self.weighted_successors(v) {
                let _ = writeln!(out, "  v{v} -> v{t} [label=\"{p}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Accepting, dead and unknown vertex sets of a product graph.
pub fn classify_vertices(graph: &ProductGraph) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut acc = Vec::new();
    let mut dead = Vec::new();
    let mut unknown = Vec::new();
    for v in 0..graph.len() {
        match graph.class(v) {
            VertexClass::Accepting => acc.push(v),
            VertexClass::Dead => dead.push(v),
            VertexClass::Unknown => unknown.push(v),
        }
    }
    (acc, dead, unknown)
}

/// Markov chain on `(chain position, set of automaton states)` pairs reachable
/// from `(start, initial states)`. After reading letter `t` from `(s, U)` the
/// chain moves to `(t, post(U, t))` with probability `P(s, t)`.
#[derive(Clone, Debug)]
pub struct SubsetChain {
    pub states: Vec<(ChainPos, Vec<usize>)>,
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub target: Vec<bool>,
}

pub fn build_subset_chain(
    chain: &MarkovChain,
    aut: &Automaton,
    target: impl Fn(ChainPos, &[usize]) -> bool,
    limit: usize,
) -> Result<SubsetChain> {
    ensure_aligned(chain, aut)?;
    let start: Vec<usize> = aut.initial().iter().copied().collect();
    let mut states = vec![(ChainPos::Start, start.clone())];
    let mut ids: HashMap<(ChainPos, Vec<usize>), usize> = HashMap::new();
    ids.insert((ChainPos::Start, start), 0);
    let mut rows: Vec<Vec<(usize, Rational)>> = Vec::new();
    let mut i = 0;
    let mut scratch = vec![false; aut.len()];
    while i < states.len() {
        let (pos, set) = states[i].clone();
        let succ: Vec<(usize, Rational)> = match pos {
            ChainPos::Start => {
                chain.init().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(s, p)| (s, p.clone())).collect()
            }
            ChainPos::State(s) => chain.row(s).to_vec(),
        };
        let mut row = Vec::with_capacity(succ.len());
        for (t, p) in succ {
            for &q in &set {
                for &q2 in aut.succ(q, t) {
                    scratch[q2] = true;
                }
            }
            let next: Vec<usize> = (0..aut.len()).filter(|&q| std::mem::take(&mut scratch[q])).collect();
            let key = (ChainPos::State(t), next);
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= limit {
                        return Err(Error::SizeAbort { what: "subset chain", limit });
                    }
                    states.push(key.clone());
                    ids.insert(key, states.len() - 1);
                    states.len() - 1
                }
            };
            row.push((id, p));
        }
        rows.push(row);
        i += 1;
    }
    let target = states.iter().map(|(pos, set)| target(*pos, set)).collect();
    Ok(SubsetChain { states, rows, target })
}

impl SubsetChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn adjacency(&self) -> Adjacency {
        self.rows.iter().map(|r| r.iter().map(|(t, _)| *t).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn virtual_initial_state() {
        let m = add_virtual_initial(&fixtures::fair_coin());
        assert_eq!(m.len(), 3);
        assert_eq!(m.state_name(2), "s0");
        assert_eq!(m.prob(2, 0), Rational::new(1, 2));
        assert_eq!(m.prob(2, 1), Rational::new(1, 2));
        assert!((0..3).all(|s| m.prob(s, 2).is_zero()));
        let point = fixtures::fair_coin().with_init(vec![Rational::one(), Rational::zero()]).unwrap();
        assert_eq!(add_virtual_initial(&point).prob(2, 0), Rational::one());
        // a second application adds another layer with a fresh name
        let twice = add_virtual_initial(&m);
        assert_eq!(twice.len(), 4);
        assert_eq!(twice.state_name(3), "s0'");
    }

    #[test]
    fn fair_coin_times_gfa() {
        let m = fixtures::fair_coin();
        let a = fixtures::gfa();
        let g = build_product(&m, &a).unwrap();
        assert_eq!(g.len(), 5);
        let (acc, dead, unknown) = classify_vertices(&g);
        let names: Vec<String> = acc.iter().map(|&v| g.vertex_name(&m, &a, v)).collect();
        assert_eq!(names, ["(a,d1)", "(b,d1)"]);
        assert!(dead.is_empty());
        assert_eq!(unknown.len(), 3);
    }

    #[test]
    fn zero_probability_moves_have_no_edges() {
        let m: MarkovChain = "@mc\nstates a b\ninit a 1\ntrans a a 1\ntrans b b 1\n".parse().unwrap();
        let a = fixtures::gfa();
        let g = build_product(&m, &a).unwrap();
        for v in 0..g.len() {
            if g.vertex(v).0 == ChainPos::State(1) {
                continue;
            }
            for &t in &g.edges()[v] {
                assert_ne!(g.vertex(t).0, ChainPos::State(1), "no edge out of the start or a may read b");
            }
        }
    }

    #[test]
    fn empty_accepting_set_kills_everything() {
        let m = fixtures::fair_coin();
        let a: Automaton = fixtures::GFA.replace("accepting d1", "").parse().unwrap();
        let g = build_product(&m, &a).unwrap();
        let (acc, dead, unknown) = classify_vertices(&g);
        assert!(acc.is_empty() && unknown.is_empty());
        assert_eq!(dead.len(), g.len());
    }

    #[test]
    fn misaligned_alphabet_is_rejected() {
        let m: MarkovChain = "@mc\nstates x y\ninit x 1\ntrans x y 1\ntrans y x 1\n".parse().unwrap();
        assert!(matches!(build_product(&m, &fixtures::gfa()), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn subset_chain_rows_are_stochastic() {
        let m = fixtures::fair_coin();
        let a = fixtures::second_letter_a();
        let c = build_subset_chain(&m, &a, |_, u| u.iter().any(|&q| a.is_accepting(q)), SUBSET_CHAIN_LIMIT).unwrap();
        for row in &c.rows {
            let sum: Rational = row.iter().map(|(_, p)| p).sum();
            assert!(sum.is_one());
        }
        assert!(c.target.iter().any(|&t| t));
    }

    #[test]
    fn subset_chain_size_bound_and_blowup() {
        let m = fixtures::fair_coin();
        let a = fixtures::kth_from_end(1);
        let c = build_subset_chain(&m, &a, |_, _| false, SUBSET_CHAIN_LIMIT).unwrap();
        assert!(c.len() <= 1 + 2 * 4);
        let k = 10;
        let big = fixtures::kth_from_end(k);
        let c = build_subset_chain(&m, &big, |_, _| false, SUBSET_CHAIN_LIMIT).unwrap();
        assert!(c.len() >= 1 << k, "{}", c.len());
        assert!(matches!(build_subset_chain(&m, &big, |_, _| false, 100), Err(Error::SizeAbort { .. })));
    }
}
