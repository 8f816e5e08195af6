//! Structural automaton algorithms.
//!
//! Renaming, trimming, ambiguity and separation checks (with witnesses),
//! subset construction, lasso membership, and the finite-word automata that
//! describe how a Büchi automaton returns to an accepting state.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::{self, Adjacency, Sccs};
use crate::model::{fresh_name, Automaton, MarkovChain, Mode, StateSet};

/// Ultimately periodic word `u v v v ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
}

impl Lasso {
    pub fn new(u: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidArgument("lasso cycle must be nonempty".into()));
        }
        Ok(Lasso { u, v })
    }

    /// Letter at position `i` of the infinite word.
    pub fn letter(&self, i: usize) -> usize {
        if i < self.u.len() {
            self.u[i]
        } else {
            self.v[(i - self.u.len()) % self.v.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<usize> {
        (0..len).map(|i| self.letter(i)).collect()
    }

    pub fn render(&self, aut: &Automaton) -> String {
        format!("{} ({})^ω", render_word(aut, &self.u), render_word(aut, &self.v))
    }
}

/// Space separated letters; `ε` for the empty word.
pub fn render_word(aut: &Automaton, word: &[usize]) -> String {
    if word.is_empty() {
        "ε".to_string()
    } else {
        aut.word_names(word).join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Word(Vec<usize>),
    Lasso(Lasso),
}

impl Witness {
    pub fn render(&self, aut: &Automaton) -> String {
        match self {
            Witness::Word(w) => render_word(aut, w),
            Witness::Lasso(l) => l.render(aut),
        }
    }
}

/// Outcome of [`check_unambiguous`] and [`check_prefix_unambiguous`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityVerdict {
    pub unambiguous: bool,
    /// Present exactly when `unambiguous` is false.
    pub witness: Option<Witness>,
}

impl AmbiguityVerdict {
    fn from_witness(witness: Option<Witness>) -> Self {
        AmbiguityVerdict { unambiguous: witness.is_none(), witness }
    }
}

/// Outcome of [`check_separated`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationVerdict {
    pub separated: bool,
    /// Two distinct states and a word accepted from both.
    pub overlap: Option<(usize, usize, Witness)>,
}

// ---------------------------------------------------------------------------
// exploration of implicit product graphs

/// Reachable part of an implicit letter-labelled graph.
struct Explored<K> {
    keys: Vec<K>,
    edges: Vec<Vec<(usize, usize)>>,
    initial: Vec<usize>,
}

impl<K: Clone + Eq + Hash> Explored<K> {
    fn new(initial: impl IntoIterator<Item = K>, letters: usize, mut succ: impl FnMut(&K, usize) -> Vec<K>) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut keys = Vec::new();
        let mut queue = VecDeque::new();
        let mut init_ids = Vec::new();
        for k in initial {
            let id = *ids.entry(k.clone()).or_insert_with(|| {
                keys.push(k.clone());
                queue.push_back(keys.len() - 1);
                keys.len() - 1
            });
            if !init_ids.contains(&id) {
                init_ids.push(id);
            }
        }
        let mut edges: Vec<Vec<(usize, usize)>> = Vec::new();
        while let Some(u) = queue.pop_front() {
            if edges.len() <= u {
                edges.resize(u + 1, Vec::new());
            }
            let key = keys[u].clone();
            for a in 0..letters {
                for k in succ(&key, a) {
                    let v = *ids.entry(k.clone()).or_insert_with(|| {
                        keys.push(k);
                        queue.push_back(keys.len() - 1);
                        keys.len() - 1
                    });
                    edges[u].push((a, v));
                }
            }
        }
        edges.resize(keys.len(), Vec::new());
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        Explored { keys, edges, initial: init_ids }
    }

    fn adjacency(&self) -> Adjacency {
        self.edges
            .iter()
            .map(|e| {
                let mut v: Vec<usize> = e.iter().map(|&(_, t)| t).collect();
                v.dedup();
                v
            })
            .collect()
    }
}

/// Shortest labelled path from `sources` to a vertex satisfying `goal`, using
/// only vertices allowed by `within`. Returns the end vertex and the word.
fn labelled_path(
    edges: &[Vec<(usize, usize)>],
    sources: &[usize],
    goal: impl Fn(usize) -> bool,
    within: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<usize>)> {
    let n = edges.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if within(s) && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        if goal(u) {
            let mut word = Vec::new();
            let mut cur = u;
            while let Some((prev, a)) = parent[cur] {
                word.push(a);
                cur = prev;
            }
            word.reverse();
            return Some((u, word));
        }
        for &(a, v) in &edges[u] {
            if within(v) && !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, a));
                queue.push_back(v);
            }
        }
    }
    None
}

/// Nonempty cycle word from `start` back to itself inside one component.
fn cycle_through(
    edges: &[Vec<(usize, usize)>],
    start: usize,
    waypoints: &[usize],
    within: impl Fn(usize) -> bool + Copy,
) -> Vec<usize> {
    let mut word = Vec::new();
    let mut at = start;
    for &w in waypoints.iter().chain(std::iter::once(&start)) {
        if w == at {
            continue;
        }
        let (_, seg) = labelled_path(edges, &[at], |v| v == w, within).expect("waypoint inside the component");
        word.extend(seg);
        at = w;
    }
    if word.is_empty() {
        // start is the only waypoint; leave it and come back
        for &(a, v) in &edges[start] {
            if !within(v) {
                continue;
            }
            if v == start {
                return vec![a];
            }
            if let Some((_, back)) = labelled_path(edges, &[v], |x| x == start, within) {
                let mut w = vec![a];
                w.extend(back);
                return w;
            }
        }
        unreachable!("nontrivial component has a cycle through every vertex");
    }
    word
}

/// Finds a reachable nontrivial SCC whose vertices cover every predicate in
/// `marks`, and returns a lasso through it visiting one vertex per mark.
fn accepting_lasso<K: Clone + Eq + Hash>(explored: &Explored<K>, marks: &[&dyn Fn(&K) -> bool]) -> Option<Lasso> {
    let adj = explored.adjacency();
    let sccs = Sccs::new(&adj);
    for id in 0..sccs.len() {
        if !sccs.is_nontrivial(&adj, id) {
            continue;
        }
        let members = &sccs.members[id];
        let picks: Option<Vec<usize>> =
            marks.iter().map(|m| members.iter().copied().find(|&v| m(&explored.keys[v]))).collect();
        let Some(picks) = picks else { continue };
        let within = |v: usize| sccs.component[v] == id;
        let (start, u) = labelled_path(&explored.edges, &explored.initial, |v| v == picks[0], |_| true)
            .expect("explored vertices are reachable");
        let v = cycle_through(&explored.edges, start, &picks[1..], within);
        return Some(Lasso { u, v });
    }
    None
}

// ---------------------------------------------------------------------------
// renaming and trimming

/// Rewrites `aut` over `new_alphabet`: `p --x--> q` for every new letter `x`
/// with `p --rename[x]--> q` in `aut`.
pub fn existential_rename(aut: &Automaton, new_alphabet: &[String], rename: &[String]) -> Result<Automaton> {
    if rename.len() != new_alphabet.len() {
        return Err(Error::InvalidArgument(format!(
            "renaming covers {} of {} letters",
            rename.len(),
            new_alphabet.len()
        )));
    }
    let image = rename
        .iter()
        .map(|l| {
            aut.letter_index(l)
                .ok_or_else(|| Error::AlphabetMismatch(format!("`{l}` is not a letter of the automaton")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut transitions = Vec::new();
    for p in 0..aut.len() {
        for (x, &a) in image.iter().enumerate() {
            for &q in aut.succ(p, a) {
                transitions.push((p, x, q));
            }
        }
    }
    Automaton::new(
        aut.mode(),
        new_alphabet.to_vec(),
        aut.states().to_vec(),
        aut.initial().iter().copied(),
        aut.accepting().iter().copied(),
        transitions,
    )
}

/// Puts `aut` over the chain's state set: along the chain's labels when it has
/// them, otherwise by matching state names to letters.
pub fn align_to_chain(aut: &Automaton, chain: &MarkovChain) -> Result<Automaton> {
    let rename: Vec<String> = match chain.labels() {
        Some(labels) => labels.to_vec(),
        None => chain.states().to_vec(),
    };
    if chain.labels().is_none() {
        if let Some(s) = chain.states().iter().find(|s| aut.letter_index(s).is_none()) {
            return Err(Error::AlphabetMismatch(format!(
                "chain state `{s}` is not a letter of the automaton and the chain has no labels"
            )));
        }
    }
    existential_rename(aut, chain.states(), &rename)
}

/// Keeps the states marked in `keep`, preserving order.
pub fn restrict(aut: &Automaton, keep: &[bool]) -> Automaton {
    let mut map = vec![usize::MAX; aut.len()];
    let mut states = Vec::new();
    for q in 0..aut.len() {
        if keep[q] {
            map[q] = states.len();
            states.push(aut.state_name(q).to_string());
        }
    }
    let transitions: Vec<_> =
        aut.transitions().filter(|&(p, _, q)| keep[p] && keep[q]).map(|(p, a, q)| (map[p], a, map[q])).collect();
    Automaton::new(
        aut.mode(),
        aut.alphabet().to_vec(),
        states,
        aut.initial().iter().filter(|&&q| keep[q]).map(|&q| map[q]),
        aut.accepting().iter().filter(|&&q| keep[q]).map(|&q| map[q]),
        transitions,
    )
    .expect("restriction of a valid automaton is valid")
}

pub fn state_graph(aut: &Automaton) -> Adjacency {
    (0..aut.len())
        .map(|p| {
            let mut v: Vec<usize> = (0..aut.letters()).flat_map(|a| aut.succ(p, a).iter().copied()).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

/// States from which an accepting run can start, per the automaton's mode.
pub fn productive_states(aut: &Automaton) -> Vec<bool> {
    let adj = state_graph(aut);
    match aut.mode() {
        Mode::Finite => graph::can_reach(&adj, aut.accepting().iter().copied()),
        Mode::Buchi => {
            let sccs = Sccs::new(&adj);
            let good = (0..aut.len()).filter(|&q| {
                let c = sccs.component[q];
                aut.is_accepting(q) && sccs.is_nontrivial(&adj, c)
            });
            graph::can_reach(&adj, good)
        }
    }
}

/// Removes states that are unreachable or cannot start an accepting run.
pub fn trim(aut: &Automaton) -> Automaton {
    let adj = state_graph(aut);
    let reach = graph::reachable(&adj, aut.initial().iter().copied());
    let productive = productive_states(aut);
    let keep: Vec<bool> = (0..aut.len()).map(|q| reach[q] && productive[q]).collect();
    restrict(aut, &keep)
}

/// Drops the transitions leaving accepting states, then trims. For
/// finite-word acceptance on prefixes this keeps exactly the runs that reach
/// `F` for the first time at their last step.
pub fn stop_at_accepting(aut: &Automaton) -> Automaton {
    let transitions: Vec<_> = aut.transitions().filter(|&(p, _, _)| !aut.is_accepting(p)).collect();
    let stopped = Automaton::new(
        aut.mode(),
        aut.alphabet().to_vec(),
        aut.states().to_vec(),
        aut.initial().iter().copied(),
        aut.accepting().iter().copied(),
        transitions,
    )
    .expect("subautomaton of a valid automaton is valid");
    trim(&stopped)
}

// ---------------------------------------------------------------------------
// ambiguity

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Pair {
    p: usize,
    q: usize,
    diverged: bool,
}

fn self_product(aut: &Automaton) -> Explored<Pair> {
    let init: Vec<Pair> = aut
        .initial()
        .iter()
        .flat_map(|&p| aut.initial().iter().map(move |&q| Pair { p, q, diverged: p != q }))
        .collect();
    Explored::new(init, aut.letters(), |k, a| {
        let mut out = Vec::new();
        for &p in aut.succ(k.p, a) {
            for &q in aut.succ(k.q, a) {
                out.push(Pair { p, q, diverged: k.diverged || p != q });
            }
        }
        out
    })
}

/// Decides whether some word has two distinct accepting runs, with a witness
/// word (finite mode) or lasso (Büchi mode) when it does.
pub fn check_unambiguous(aut: &Automaton) -> AmbiguityVerdict {
    let aut = trim(aut);
    let product = self_product(&aut);
    let witness = match aut.mode() {
        Mode::Finite => labelled_path(
            &product.edges,
            &product.initial,
            |v| {
                let k = product.keys[v];
                k.diverged && aut.is_accepting(k.p) && aut.is_accepting(k.q)
            },
            |_| true,
        )
        .map(|(_, w)| Witness::Word(w)),
        Mode::Buchi => accepting_lasso(
            &product,
            &[&|k: &Pair| k.diverged && aut.is_accepting(k.p), &|k: &Pair| k.diverged && aut.is_accepting(k.q)],
        )
        .map(Witness::Lasso),
    };
    AmbiguityVerdict::from_witness(witness)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct StopPair {
    p: usize,
    q: usize,
    diverged: bool,
}

/// Decides whether some infinite word has at most one *first-hit* accepting
/// run prefix: a run on a finite prefix that ends in an accepting state and
/// visits no accepting state before. The witness is a finite word carrying
/// two such runs (of itself, or of itself and one of its prefixes).
///
/// For finite-word acceptance this is the condition under which the
/// expected number of first-hit runs, which is what the product linear
/// system computes, equals the probability of acceptance.
pub fn check_prefix_unambiguous(aut: &Automaton) -> AmbiguityVerdict {
    let done = aut.len();
    let step = |c: usize, a: usize| -> Vec<usize> {
        if c == done || aut.is_accepting(c) {
            vec![done]
        } else {
            aut.succ(c, a).to_vec()
        }
    };
    let init: Vec<StopPair> = aut
        .initial()
        .iter()
        .flat_map(|&p| aut.initial().iter().map(move |&q| StopPair { p, q, diverged: p != q }))
        .collect();
    let product = Explored::new(init, aut.letters(), |k: &StopPair, a| {
        let mut out = Vec::new();
        for p in step(k.p, a) {
            for q in step(k.q, a) {
                out.push(StopPair { p, q, diverged: k.diverged || p != q });
            }
        }
        out
    });
    let ended = |c: usize| c == done || aut.is_accepting(c);
    let witness = labelled_path(
        &product.edges,
        &product.initial,
        |v| {
            let k = product.keys[v];
            k.diverged && ended(k.p) && ended(k.q)
        },
        |_| true,
    )
    .map(|(_, w)| Witness::Word(w));
    AmbiguityVerdict::from_witness(witness)
}

/// Decides whether two distinct states accept a common word.
pub fn check_separated(aut: &Automaton) -> SeparationVerdict {
    let n = aut.len();
    let mut init = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            init.push((p, q));
        }
    }
    for (p, q) in init {
        let product = Explored::new([(p, q)], aut.letters(), |&(x, y), a| {
            let mut out = Vec::new();
            for &x2 in aut.succ(x, a) {
                for &y2 in aut.succ(y, a) {
                    out.push((x2, y2));
                }
            }
            out
        });
        let witness = match aut.mode() {
            Mode::Finite => labelled_path(
                &product.edges,
                &product.initial,
                |v| {
                    let (x, y) = product.keys[v];
                    aut.is_accepting(x) && aut.is_accepting(y)
                },
                |_| true,
            )
            .map(|(_, w)| Witness::Word(w)),
            Mode::Buchi => accepting_lasso(
                &product,
                &[&|&(x, _): &(usize, usize)| aut.is_accepting(x), &|&(_, y): &(usize, usize)| aut.is_accepting(y)],
            )
            .map(Witness::Lasso),
        };
        if let Some(w) = witness {
            return SeparationVerdict { separated: false, overlap: Some((p, q, w)) };
        }
    }
    SeparationVerdict { separated: true, overlap: None }
}

// ---------------------------------------------------------------------------
// determinization and lassos

fn subset_name(aut: &Automaton, set: &[usize]) -> String {
    let inner: Vec<&str> = set.iter().map(|&q| aut.state_name(q)).collect();
    format!("{{{}}}", inner.join(","))
}

/// Classical subset construction over the reachable subsets. Transitions into
/// the empty subset are omitted, so a deterministic input maps to a copy of
/// its reachable part.
pub fn subset_determinize(aut: &Automaton) -> Result<Automaton> {
    if aut.mode() != Mode::Finite {
        return Err(Error::WrongMode { expected: "nfa" });
    }
    let start: Vec<usize> = aut.initial().iter().copied().collect();
    let explored = Explored::new([start], aut.letters(), |set: &Vec<usize>, a| {
        let next: Vec<usize> = aut.post(&set.iter().copied().collect(), a).into_iter().collect();
        if next.is_empty() {
            vec![]
        } else {
            vec![next]
        }
    });
    let names: Vec<String> = explored.keys.iter().map(|s| subset_name(aut, s)).collect();
    let accepting =
        explored.keys.iter().enumerate().filter(|(_, s)| s.iter().any(|&q| aut.is_accepting(q))).map(|(i, _)| i);
    let transitions = explored.edges.iter().enumerate().flat_map(|(u, e)| e.iter().map(move |&(a, v)| (u, a, v)));
    Automaton::new(Mode::Finite, aut.alphabet().to_vec(), names, [0], accepting, transitions)
}

/// Configuration graph of `aut` reading a lasso: `(state, position)` where
/// positions past the spoke wrap around the cycle.
fn lasso_configurations(aut: &Automaton, lasso: &Lasso) -> Explored<(usize, usize)> {
    let len = lasso.u.len() + lasso.v.len();
    let next = |i: usize| if i + 1 < len { i + 1 } else { lasso.u.len() };
    let letter = |i: usize| if i < lasso.u.len() { lasso.u[i] } else { lasso.v[i - lasso.u.len()] };
    let init: Vec<(usize, usize)> = aut.initial().iter().map(|&q| (q, 0)).collect();
    // a single pseudo-letter: the letter is fixed by the position
    Explored::new(init, 1, |&(q, i), _| {
        let a = letter(i);
        if a >= aut.letters() {
            return vec![];
        }
        aut.succ(q, a).iter().map(|&q2| (q2, next(i))).collect()
    })
}

/// Büchi membership of `u v^ω`.
pub fn lasso_membership(aut: &Automaton, lasso: &Lasso) -> bool {
    let configs = lasso_configurations(aut, lasso);
    accepting_lasso(&configs, &[&|&(q, _): &(usize, usize)| aut.is_accepting(q)]).is_some()
}

/// Splits an accepted lasso as `x y y y ...` where `x` leads from an initial
/// state to the accepting state `q`, `y` leads `q` back to itself, and both end
/// with the letter `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub letter: usize,
    pub state: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
}

pub fn decompose_accepting_lasso(aut: &Automaton, lasso: &Lasso) -> Option<Decomposition> {
    let configs = lasso_configurations(aut, lasso);
    let adj = configs.adjacency();
    let sccs = Sccs::new(&adj);
    // earliest-discovered accepting configuration on a cycle
    let target = (0..configs.keys.len()).find(|&c| {
        let (q, _) = configs.keys[c];
        aut.is_accepting(q) && sccs.is_nontrivial(&adj, sccs.component[c])
    })?;
    let (state, _) = configs.keys[target];
    let comp = sccs.component[target];
    let (_, steps) = labelled_path(&configs.edges, &configs.initial, |v| v == target, |_| true)?;
    let cycle = cycle_through(&configs.edges, target, &[], |v| sccs.component[v] == comp);
    // pseudo-letters are all 0; recover the actual letters from positions
    let y = lasso.prefix(steps.len() + cycle.len())[steps.len()..].to_vec();
    let mut x = lasso.prefix(steps.len());
    let letter = *y.last().expect("cycles are nonempty");
    if x.last() != Some(&letter) {
        x.extend_from_slice(&y);
    }
    Some(Decomposition { letter, state, x, y })
}

// ---------------------------------------------------------------------------
// return languages of accepting states

fn check_letter_state(aut: &Automaton, letter: usize, state: usize) -> Result<()> {
    if letter >= aut.letters() {
        return Err(Error::UnknownLetter(format!("#{letter}")));
    }
    if state >= aut.len() {
        return Err(Error::UnknownState(format!("#{state}")));
    }
    Ok(())
}

/// Finite-word automaton for the words that lead `state` back to itself and
/// end with `letter`: start in `state`, and copy every `letter`-transition into
/// `state` as a transition into a fresh accepting sink.
pub fn build_h_nfa(aut: &Automaton, letter: usize, state: usize) -> Result<Automaton> {
    check_letter_state(aut, letter, state)?;
    let sink_name = fresh_name(&format!("{}_acc", aut.state_name(state)), |n| aut.state_index(n).is_some());
    let sink = aut.len();
    let mut states = aut.states().to_vec();
    states.push(sink_name);
    let mut transitions: Vec<_> = aut.transitions().collect();
    for p in 0..aut.len() {
        if aut.succ(p, letter).contains(&state) {
            transitions.push((p, letter, sink));
        }
    }
    Automaton::new(Mode::Finite, aut.alphabet().to_vec(), states, [state], [sink], transitions)
}

/// Finite-word automaton over `(state, last letter)` pairs accepting the words
/// that lead from an initial state to `q` with last letter `s`, for any of the
/// given `(s, q)` targets.
pub fn build_g_nfa_union(aut: &Automaton, targets: &[(usize, usize)]) -> Result<Automaton> {
    for &(s, q) in targets {
        check_letter_state(aut, s, q)?;
    }
    let k = aut.letters();
    let id = |p: usize, last: usize| p * (k + 1) + last;
    let mut names = Vec::with_capacity(aut.len() * (k + 1));
    for p in 0..aut.len() {
        for last in 0..=k {
            let l = if last == k { "" } else { aut.letter_name(last) };
            names.push(format!("<{},{}>", aut.state_name(p), l));
        }
    }
    let mut transitions = Vec::new();
    for p in 0..aut.len() {
        for last in 0..=k {
            for a in 0..k {
                for &p2 in aut.succ(p, a) {
                    transitions.push((id(p, last), a, id(p2, a)));
                }
            }
        }
    }
    Automaton::new(
        Mode::Finite,
        aut.alphabet().to_vec(),
        names,
        aut.initial().iter().map(|&q| id(q, k)),
        targets.iter().map(|&(s, q)| id(q, s)),
        transitions,
    )
}

pub fn build_g_nfa(aut: &Automaton, letter: usize, state: usize) -> Result<Automaton> {
    build_g_nfa_union(aut, &[(letter, state)])
}

// ---------------------------------------------------------------------------
// deterministic automata

/// Adds a rejecting sink so that every (state, letter) has exactly one
/// successor and there is exactly one initial state.
pub fn totalize(aut: &Automaton) -> Result<Automaton> {
    if !aut.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    if aut.is_complete_deterministic() {
        return Ok(aut.clone());
    }
    let sink = aut.len();
    let mut states = aut.states().to_vec();
    states.push(fresh_name("sink", |n| aut.state_index(n).is_some()));
    let mut transitions: Vec<_> = aut.transitions().collect();
    for p in 0..=aut.len() {
        for a in 0..aut.letters() {
            if p == sink || aut.succ(p, a).is_empty() {
                transitions.push((p, a, sink));
            }
        }
    }
    let initial: Vec<usize> =
        if aut.initial().is_empty() { vec![sink] } else { aut.initial().iter().copied().collect() };
    Automaton::new(aut.mode(), aut.alphabet().to_vec(), states, initial, aut.accepting().iter().copied(), transitions)
}

/// Language-preserving nondeterministic variant of a deterministic automaton
/// that guesses the next input letter: state `(p, x)` can only read `x`, then
/// moves to `(δ(p, x), y)` for every letter `y`. Every infinite word has
/// exactly one run, so the result is unambiguous.
pub fn guess_next_letter_uba(det: &Automaton) -> Result<Automaton> {
    let det = totalize(det)?;
    let k = det.letters();
    let id = |p: usize, x: usize| p * k + x;
    let mut names = Vec::with_capacity(det.len() * k);
    for p in 0..det.len() {
        for x in 0..k {
            names.push(format!("<{},{}>", det.state_name(p), det.letter_name(x)));
        }
    }
    let mut transitions = Vec::new();
    for p in 0..det.len() {
        for x in 0..k {
            let p2 = det.succ(p, x)[0];
            for y in 0..k {
                transitions.push((id(p, x), x, id(p2, y)));
            }
        }
    }
    let initial: Vec<usize> = det.initial().iter().flat_map(|&p| (0..k).map(move |x| id(p, x))).collect();
    let accepting: Vec<usize> = det.accepting().iter().flat_map(|&p| (0..k).map(move |x| id(p, x))).collect();
    Automaton::new(det.mode(), det.alphabet().to_vec(), names, initial, accepting, transitions)
}

/// Set of states reached from the initial states on `word`.
pub fn run_from_initial(aut: &Automaton, word: &[usize]) -> Result<StateSet> {
    aut.delta_hat(aut.initial(), word)
}

impl fmt::Display for AmbiguityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.unambiguous { "unambiguous" } else { "ambiguous" })
    }
}
