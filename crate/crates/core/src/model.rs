//! Markov chains and automata.
//!
//! Both structures are immutable once built and store everything by index;
//! names are kept only for parsing, printing and cross-structure alignment.
//! Declaration order of names is the canonical index order.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type StateSet = BTreeSet<usize>;

/// A finite Markov chain with exact rational transition probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovChain {
    states: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Vec<(usize, Rational)>>,
    init: Vec<Rational>,
    labels: Option<Vec<String>>,
}

impl MarkovChain {
    /// Validates and builds a chain. Rows list `(target, probability)` pairs;
    /// zero entries are dropped and targets are sorted.
    pub fn new(
        states: Vec<String>,
        rows: Vec<Vec<(usize, Rational)>>,
        init: Vec<Rational>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let index = name_index(&states)?;
        let n = states.len();
        if rows.len() != n || init.len() != n {
            return Err(Error::Internal(format!(
                "chain with {n} states given {} rows and {} initial entries",
                rows.len(),
                init.len()
            )));
        }
        let mut clean_rows = Vec::with_capacity(n);
        for (s, row) in rows.into_iter().enumerate() {
            let mut row: Vec<(usize, Rational)> = row.into_iter().filter(|(_, p)| !p.is_zero()).collect();
            row.sort_by_key(|(t, _)| *t);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Duplicate(format!("trans {} {}", states[s], states[w[0].0])));
                }
            }
            for (t, p) in &row {
                if *t >= n {
                    return Err(Error::UnknownState(format!("#{t}")));
                }
                if !p.is_probability() {
                    return Err(Error::NotProbability {
                        context: format!("trans {} {}", states[s], states[*t]),
                        value: p.to_string(),
                    });
                }
            }
            let sum: Rational = row.iter().map(|(_, p)| p).sum();
            if !sum.is_one() {
                return Err(Error::NotStochastic { state: states[s].clone(), sum: sum.to_string() });
            }
            clean_rows.push(row);
        }
        for (s, p) in init.iter().enumerate() {
            if !p.is_probability() {
                return Err(Error::NotProbability { context: format!("init {}", states[s]), value: p.to_string() });
            }
        }
        let total: Rational = init.iter().sum();
        if !total.is_one() {
            return Err(Error::InitialNotDistribution { sum: total.to_string() });
        }
        if let Some(labels) = &labels {
            if labels.len() != n {
                return Err(Error::MissingLabel(states[labels.len().min(n.saturating_sub(1))].clone()));
            }
        }
        Ok(MarkovChain { states, index, rows: clean_rows, init, labels })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Nonzero successors of `s`, sorted by target index.
    pub fn row(&self, s: usize) -> &[(usize, Rational)] {
        &self.rows[s]
    }

    pub fn prob(&self, s: usize, t: usize) -> Rational {
        self.rows[s]
            .binary_search_by_key(&t, |(x, _)| *x)
            .map(|i| self.rows[s][i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn init(&self) -> &[Rational] {
        &self.init
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Same transitions, different initial distribution.
    pub fn with_init(&self, init: Vec<Rational>) -> Result<Self> {
        MarkovChain::new(self.states.clone(), self.rows.clone(), init, self.labels.clone())
    }

    /// Same chain started from the successor distribution of `s`.
    pub fn started_after(&self, s: usize) -> Self {
        let mut init = vec![Rational::zero(); self.len()];
        for (t, p) in &self.rows[s] {
            init[*t] = p.clone();
        }
        self.with_init(init).expect("a stochastic row is a distribution")
    }

    pub fn without_labels(&self) -> Self {
        MarkovChain { labels: None, ..self.clone() }
    }

    /// Every state has a single successor with probability one.
    pub fn is_functional(&self) -> bool {
        self.rows.iter().all(|row| row.len() == 1)
    }

    pub fn transition_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Finite-word or Büchi acceptance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Finite,
    Buchi,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Finite => "nfa",
            Mode::Buchi => "nba",
        }
    }
}

/// Nondeterministic automaton over an explicit alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    mode: Mode,
    alphabet: Vec<String>,
    letter_index: HashMap<String, usize>,
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    initial: StateSet,
    accepting: StateSet,
    /// `succ[q][a]`: sorted, deduplicated successor list.
    succ: Vec<Vec<Vec<usize>>>,
}

impl Automaton {
    /// Builds an automaton from indexed parts. Duplicate transitions collapse.
    pub fn new(
        mode: Mode,
        alphabet: Vec<String>,
        states: Vec<String>,
        initial: impl IntoIterator<Item = usize>,
        accepting: impl IntoIterator<Item = usize>,
        transitions: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let letter_index = name_index(&alphabet)?;
        let state_index = name_index(&states)?;
        let n = states.len();
        let k = alphabet.len();
        let check_state = |q: usize| {
            if q < n {
                Ok(q)
            } else {
                Err(Error::UnknownState(format!("#{q}")))
            }
        };
        let initial = initial.into_iter().map(check_state).collect::<Result<StateSet>>()?;
        let accepting = accepting.into_iter().map(check_state).collect::<Result<StateSet>>()?;
        let mut succ = vec![vec![Vec::new(); k]; n];
        for (p, a, q) in transitions {
            check_state(p)?;
            check_state(q)?;
            if a >= k {
                return Err(Error::UnknownLetter(format!("#{a}")));
            }
            succ[p][a].push(q);
        }
        for row in &mut succ {
            for targets in row.iter_mut() {
                targets.sort_unstable();
                targets.dedup();
            }
        }
        Ok(Automaton { mode, alphabet, letter_index, states, state_index, initial, accepting, succ })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Automaton { mode, ..self.clone() }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn letter_name(&self, a: usize) -> &str {
        &self.alphabet[a]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letter_index.get(name).copied()
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn accepting(&self) -> &StateSet {
        &self.accepting
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn succ(&self, q: usize, a: usize) -> &[usize] {
        &self.succ[q][a]
    }

    /// All transitions `(p, letter, q)` in lexicographic order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(p, row)| {
            row.iter().enumerate().flat_map(move |(a, targets)| targets.iter().map(move |&q| (p, a, q)))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.succ.iter().flatten().map(Vec::len).sum()
    }

    /// At most one initial state and at most one successor per (state, letter).
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() <= 1 && self.succ.iter().flatten().all(|t| t.len() <= 1)
    }

    /// Exactly one initial state and exactly one successor per (state, letter).
    pub fn is_complete_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.succ.iter().flatten().all(|t| t.len() == 1)
    }

    /// One step of the subset construction.
    pub fn post(&self, set: &StateSet, a: usize) -> StateSet {
        set.iter().flat_map(|&q| self.succ[q][a].iter().copied()).collect()
    }

    /// Extended transition function on a set of states, computed letter by
    /// letter. The empty word maps a set to itself.
    pub fn delta_hat(&self, set: &StateSet, word: &[usize]) -> Result<StateSet> {
        let mut current = set.clone();
        for &a in word {
            if a >= self.letters() {
                return Err(Error::UnknownLetter(format!("#{a}")));
            }
            current = self.post(&current, a);
        }
        Ok(current)
    }

    /// [`Automaton::delta_hat`] on names.
    pub fn delta_hat_named(&self, set: &[&str], word: &[&str]) -> Result<Vec<String>> {
        let set = set
            .iter()
            .map(|q| self.state_index(q).ok_or_else(|| Error::UnknownState(q.to_string())))
            .collect::<Result<StateSet>>()?;
        let word = self.word_indices(word)?;
        let out = self.delta_hat(&set, &word)?;
        Ok(out.into_iter().map(|q| self.states[q].clone()).collect())
    }

    pub fn word_indices(&self, word: &[&str]) -> Result<Vec<usize>> {
        word.iter().map(|a| self.letter_index(a).ok_or_else(|| Error::UnknownLetter(a.to_string()))).collect()
    }

    pub fn word_names(&self, word: &[usize]) -> Vec<&str> {
        word.iter().map(|&a| self.alphabet[a].as_str()).collect()
    }
}

/// Bit-length measures of the two inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SizeMetrics {
    pub mc_size: u64,
    pub aut_size: u64,
}

fn bits_for(count: usize) -> u64 {
    (usize::BITS - count.max(1).leading_zeros()) as u64
}

impl SizeMetrics {
    pub fn of(chain: &MarkovChain, aut: &Automaton) -> Self {
        let sb = bits_for(chain.len());
        let mut mc_size = sb;
        for row in &chain.rows {
            for (_, p) in row {
                mc_size += 2 * sb + p.bit_size();
            }
        }
        for p in chain.init.iter().filter(|p| !p.is_zero()) {
            mc_size += sb + p.bit_size();
        }
        let qb = bits_for(aut.len());
        let ab = bits_for(aut.letters());
        let aut_size = qb
            + ab
            + (aut.initial.len() + aut.accepting.len()) as u64 * qb
            + aut.transition_count() as u64 * (2 * qb + ab);
        SizeMetrics { mc_size, aut_size }
    }
}

fn name_index(names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if !is_identifier(name) {
            return Err(Error::InvalidArgument(format!("`{name}` is not a valid identifier")));
        }
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::Duplicate(name.clone()));
        }
    }
    Ok(index)
}

/// Non-empty ASCII without whitespace or control characters.
pub fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_graphic()) && !name.starts_with('#')
}

/// Returns `base`, or `base` with primes appended until it is not in `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut name = base.to_string();
    while taken(&name) {
        name.push('\'');
    }
    name
}
