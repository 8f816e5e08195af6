//! Seeded random instances, differential trials of the recurrent-pair
//! procedure against exact oracles, and the hunt for an instance on which it
//! reports 0 for a language of positive probability.

use serde::{Deserialize, Serialize};

use crate::automata::{check_unambiguous, guess_next_letter_uba};
use crate::error::{Error, Result};
use crate::finite::MonteCarlo;
use crate::fixtures;
use crate::format::{write_automaton, write_markov_chain};
use crate::model::{Automaton, MarkovChain, Mode};
use crate::omega::{prob_uba_recurrent, RecurrenceTable, UnionMethod};
use crate::oracles::{prob_dba, prob_functional, visits_upper_estimate};
use crate::rational::Rational;
use crate::rng::{par_map, SplitMix64};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Attempts allowed when rejection-sampling an unambiguous automaton.
pub const REJECTION_CAP: usize = 10_000;
pub const MAX_CHAIN_STATES: usize = 6;
pub const MAX_AUTOMATON_STATES: usize = 6;
pub const MAX_ALPHABET: usize = 3;

/// Parameters of the visit-count diagnostic run on every trial.
pub const DIAGNOSTIC_K: usize = 4;
pub const DIAGNOSTIC_HORIZON: usize = 200;
pub const DIAGNOSTIC_SAMPLES: usize = 10_000;

const LETTERS: [&str; MAX_ALPHABET] = ["a", "b", "c"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Random Büchi automata, kept if unambiguous; no exact oracle.
    RawUba,
    /// Predict-next-letter variant of a random deterministic automaton.
    DbaDerived,
    /// Random unambiguous automaton on a chain with point-mass rows.
    Functional,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::RawUba, Family::DbaDerived, Family::Functional];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::RawUba => "raw_uba",
            Family::DbaDerived => "dba_derived",
            Family::Functional => "functional",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub seed: u64,
    pub mc_states: usize,
    pub aut_states: usize,
    pub alphabet_size: usize,
    /// Probability that any given edge is drawn.
    pub density: Rational,
    pub family: Family,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("instance spec: {what}")));
        if !(1..=MAX_CHAIN_STATES).contains(&self.mc_states) {
            return bad("mc_states must be in 1..=6");
        }
        if !(1..=MAX_AUTOMATON_STATES).contains(&self.aut_states) {
            return bad("aut_states must be in 1..=6");
        }
        if !(1..=MAX_ALPHABET).contains(&self.alphabet_size) {
            return bad("alphabet_size must be in 1..=3");
        }
        if !self.density.is_positive() || self.density > Rational::one() {
            return bad("density must be in (0, 1]");
        }
        Ok(())
    }

    /// Dimensions drawn from `seed` itself, for sweeps over a seed range.
    pub fn random(seed: u64, family: Family) -> Self {
        let mut rng = SplitMix64::new(seed ^ 0x5EED_5EED_5EED_5EED);
        let density = [Rational::new(1, 4), Rational::new(1, 2), Rational::new(3, 4), Rational::one()]
            [rng.below(4) as usize]
            .clone();
        InstanceSpec {
            seed,
            mc_states: 1 + rng.below(4) as usize,
            aut_states: 1 + rng.below(4) as usize,
            alphabet_size: 1 + rng.below(MAX_ALPHABET as u64) as usize,
            density,
            family,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    DbaOracle,
    FunctionalOracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownValue {
    pub value: Rational,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub chain: MarkovChain,
    pub automaton: Automaton,
    pub known: Option<KnownValue>,
    /// The deterministic automaton behind a `dba_derived` instance.
    pub deterministic: Option<Automaton>,
}

fn flip(rng: &mut SplitMix64, p: f64) -> bool {
    rng.next_f64() < p
}

/// Random distribution over `support` (nonempty) with a common denominator
/// of at most 8.
fn random_distribution(rng: &mut SplitMix64, support: &[usize]) -> Vec<(usize, Rational)> {
    let k = support.len() as u64;
    let den = k.max(1 + rng.below(8));
    let mut units = vec![1u64; support.len()];
    for _ in 0..den - k {
        units[rng.below(k) as usize] += 1;
    }
    support.iter().zip(units).map(|(&s, u)| (s, Rational::new(u as i64, den as i64))).collect()
}

fn random_support(rng: &mut SplitMix64, n: usize, density: f64) -> Vec<usize> {
    let mut support: Vec<usize> = (0..n).filter(|_| flip(rng, density)).collect();
    if support.is_empty() {
        support.push(rng.below(n as u64) as usize);
    }
    support
}

fn random_chain(rng: &mut SplitMix64, spec: &InstanceSpec) -> MarkovChain {
    let n = spec.mc_states;
    let density = spec.density.to_f64();
    let states: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
    let rows: Vec<Vec<(usize, Rational)>> = (0..n)
        .map(|_| {
            if spec.family == Family::Functional {
                vec![(rng.below(n as u64) as usize, Rational::one())]
            } else {
                let support = random_support(rng, n, density);
                random_distribution(rng, &support)
            }
        })
        .collect();
    let init_support = random_support(rng, n, density);
    let mut init = vec![Rational::zero(); n];
    for (s, p) in random_distribution(rng, &init_support) {
        init[s] = p;
    }
    let labels = (0..n).map(|_| LETTERS[rng.below(spec.alphabet_size as u64) as usize].to_string()).collect();
    MarkovChain::new(states, rows, init, Some(labels)).expect("generated rows are distributions")
}

fn alphabet(spec: &InstanceSpec) -> Vec<String> {
    LETTERS[..spec.alphabet_size].iter().map(|s| s.to_string()).collect()
}

fn random_nba(rng: &mut SplitMix64, spec: &InstanceSpec) -> Automaton {
    let n = spec.aut_states;
    let density = spec.density.to_f64();
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let initial: Vec<usize> = (0..n).filter(|&q| q == 0 || flip(rng, 0.25)).collect();
    let accepting: Vec<usize> = (0..n).filter(|_| flip(rng, 0.5)).collect();
    let mut transitions = Vec::new();
    for p in 0..n {
        for a in 0..spec.alphabet_size {
            for q in 0..n {
                if flip(rng, density) {
                    transitions.push((p, a, q));
                }
            }
        }
    }
    Automaton::new(Mode::Buchi, alphabet(spec), states, initial, accepting, transitions)
        .expect("generated automaton is well formed")
}

fn random_dba(rng: &mut SplitMix64, spec: &InstanceSpec) -> Automaton {
    let n = spec.aut_states;
    let density = spec.density.to_f64();
    let states: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    let accepting: Vec<usize> = (0..n).filter(|_| flip(rng, 0.5)).collect();
    let mut transitions = Vec::new();
    for p in 0..n {
        for a in 0..spec.alphabet_size {
            if flip(rng, density) {
                transitions.push((p, a, rng.below(n as u64) as usize));
            }
        }
    }
    Automaton::new(Mode::Buchi, alphabet(spec), states, [0], accepting, transitions)
        .expect("generated automaton is well formed")
}

fn unambiguous_nba(rng: &mut SplitMix64, spec: &InstanceSpec) -> Result<Automaton> {
    for _ in 0..REJECTION_CAP {
        let a = random_nba(rng, spec);
        if check_unambiguous(&a).unambiguous {
            return Ok(a);
        }
    }
    Err(Error::RejectionCapExhausted(REJECTION_CAP))
}

/// The instance described by `spec`; identical specs give identical instances.
pub fn gen_instance(spec: &InstanceSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let chain = random_chain(&mut rng, spec);
    match spec.family {
        Family::RawUba => {
            Ok(Instance { automaton: unambiguous_nba(&mut rng, spec)?, chain, known: None, deterministic: None })
        }
        Family::DbaDerived => {
            let det = random_dba(&mut rng, spec);
            let value = prob_dba(&chain, &det)?;
            Ok(Instance {
                automaton: guess_next_letter_uba(&det)?,
                chain,
                known: Some(KnownValue { value, provenance: Provenance::DbaOracle }),
                deterministic: Some(det),
            })
        }
        Family::Functional => {
            let automaton = unambiguous_nba(&mut rng, spec)?;
            let value = prob_functional(&chain, &automaton)?;
            Ok(Instance {
                automaton,
                chain,
                known: Some(KnownValue { value, provenance: Provenance::FunctionalOracle }),
                deterministic: None,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Agree,
    Disagree,
    Flagged,
    NotComparable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SerializedInstance {
    pub mc: String,
    pub aut: String,
    /// The deterministic automaton a `dba_derived` instance was built from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dba: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceSummary {
    pub rows: usize,
    pub recurrent: usize,
    pub recurrent_pairs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<InstanceSpec>,
    pub instance: SerializedInstance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_value: Option<KnownValue>,
    /// `None` when the procedure could not run (the error is recorded).
    pub procedure_value: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub procedure_error: Option<String>,
    pub soundness_flag: &'static str,
    pub recurrence: RecurrenceTable,
    pub recurrence_summary: RecurrenceSummary,
    pub diagnostic_estimate: MonteCarlo,
    /// No recurrent pair, yet the language has positive probability (by the
    /// exact oracle, or by the diagnostic estimate exceeding its error bar).
    pub empty_recurrence_with_positive_evidence: bool,
    pub verdict: Verdict,
}

impl DiscrepancyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn recurrent_set_empty(&self) -> bool {
        self.procedure_value.is_some() && self.recurrence_summary.recurrent == 0
    }
}

fn known_by_oracle(inst: &Instance, provenance: Provenance) -> Result<Rational> {
    match provenance {
        Provenance::DbaOracle => {
            let det = inst
                .deterministic
                .as_ref()
                .ok_or_else(|| Error::Internal("dba provenance without its automaton".into()))?;
            prob_dba(&inst.chain, det)
        }
        Provenance::FunctionalOracle => prob_functional(&inst.chain, &inst.automaton),
    }
}

/// Runs the procedure and the visit-count diagnostic on one instance and
/// compares against the known value when there is one.
///
/// A `disagree` verdict is confirmed by recomputing both sides from scratch;
/// a mismatch between the two evaluations is an internal error.
pub fn differential_trial(inst: &Instance, spec: Option<&InstanceSpec>) -> Result<DiscrepancyReport> {
    let seed = spec.map_or(0, |s| s.seed);
    let diagnostic = visits_upper_estimate(
        &inst.chain,
        &inst.automaton,
        DIAGNOSTIC_K,
        DIAGNOSTIC_HORIZON,
        DIAGNOSTIC_SAMPLES,
        seed,
    )?;
    let (procedure_value, procedure_error, recurrence) =
        match prob_uba_recurrent(&inst.chain, &inst.automaton, UnionMethod::Subset) {
            Ok(v) => (Some(v.value), None, v.recurrence),
            Err(e @ Error::SizeAbort { .. }) => (None, Some(e.to_string()), RecurrenceTable::default()),
            Err(e) => return Err(e),
        };
    let summary = RecurrenceSummary {
        rows: recurrence.rows.len(),
        recurrent: recurrence.recurrent_count(),
        recurrent_pairs: recurrence.recurrent().map(|r| (r.s.clone(), r.q.clone())).collect(),
    };
    let verdict = match (&procedure_value, &inst.known) {
        (None, _) => Verdict::NotComparable,
        (Some(p), Some(k)) => {
            if *p == k.value {
                Verdict::Agree
            } else {
                Verdict::Disagree
            }
        }
        (Some(p), None) => {
            if (diagnostic.estimate - p.to_f64()).abs() > 0.2 && diagnostic.half_width_3sigma < 0.05 {
                Verdict::Flagged
            } else {
                Verdict::NotComparable
            }
        }
    };
    if verdict == Verdict::Disagree {
        let known = inst.known.as_ref().expect("disagree needs a known value");
        let again_known = known_by_oracle(inst, known.provenance)?;
        let again_proc = prob_uba_recurrent(&inst.chain, &inst.automaton, UnionMethod::Subset)?.value;
        if again_known != known.value || Some(&again_proc) != procedure_value.as_ref() || again_known == again_proc {
            return Err(Error::Internal("disagreement did not survive re-evaluation".into()));
        }
    }
    let positive = match &inst.known {
        Some(k) => k.value.is_positive(),
        None => diagnostic.estimate - diagnostic.half_width_3sigma > 0.0,
    };
    Ok(DiscrepancyReport {
        version: VERSION,
        spec: spec.cloned(),
        instance: SerializedInstance {
            mc: write_markov_chain(&inst.chain),
            aut: write_automaton(&inst.automaton),
            dba: inst.deterministic.as_ref().map(write_automaton),
        },
        known_value: inst.known.clone(),
        empty_recurrence_with_positive_evidence: procedure_value.is_some() && summary.recurrent == 0 && positive,
        procedure_value,
        procedure_error,
        soundness_flag: crate::omega::SOUNDNESS_FLAG,
        recurrence,
        recurrence_summary: summary,
        diagnostic_estimate: diagnostic,
        verdict,
    })
}

/// The shipped witness: fair coin and the predict-next-letter automaton,
/// whose language (every word) has probability 1 by the deterministic oracle
/// on the one-state universal automaton it is derived from.
pub fn witness_fixture_instance() -> Result<Instance> {
    let chain = fixtures::fair_coin();
    let det = fixtures::universal();
    let value = prob_dba(&chain, &det)?;
    Ok(Instance {
        chain,
        automaton: fixtures::predict_next_letter(),
        known: Some(KnownValue { value, provenance: Provenance::DbaOracle }),
        deterministic: Some(det),
    })
}

pub fn witness_fixture_report() -> Result<DiscrepancyReport> {
    differential_trial(&witness_fixture_instance()?, None)
}

/// One fuzzing trial: a report, or why the instance could not be generated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TrialOutcome {
    Report(Box<DiscrepancyReport>),
    Skipped { spec: InstanceSpec, error: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub agree: usize,
    pub disagree: usize,
    pub flagged: usize,
    pub not_comparable: usize,
    pub skipped: usize,
    /// Trials with no recurrent pair but evidence of positive probability.
    pub empty_recurrence_with_positive_evidence: usize,
}

impl VerdictCounts {
    fn add(&mut self, outcome: &TrialOutcome) {
        match outcome {
            TrialOutcome::Skipped { .. } => self.skipped += 1,
            TrialOutcome::Report(r) => {
                match r.verdict {
                    Verdict::Agree => self.agree += 1,
                    Verdict::Disagree => self.disagree += 1,
                    Verdict::Flagged => self.flagged += 1,
                    Verdict::NotComparable => self.not_comparable += 1,
                }
                if r.empty_recurrence_with_positive_evidence {
                    self.empty_recurrence_with_positive_evidence += 1;
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzReport {
    pub version: &'static str,
    pub seed: u64,
    pub trials: usize,
    /// `None` when trial `i` uses family `i mod 3`.
    pub family: Option<Family>,
    pub counts: VerdictCounts,
    pub reports: Vec<TrialOutcome>,
}

impl FuzzReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Spec of trial `index` in a sweep starting at `seed`.
pub fn trial_spec(seed: u64, index: usize, family: Option<Family>) -> InstanceSpec {
    let family = family.unwrap_or(Family::ALL[index % Family::ALL.len()]);
    InstanceSpec::random(seed.wrapping_add(index as u64), family)
}

fn run_trial(spec: &InstanceSpec) -> Result<TrialOutcome> {
    match gen_instance(spec) {
        Ok(inst) => Ok(TrialOutcome::Report(Box::new(differential_trial(&inst, Some(spec))?))),
        Err(e @ (Error::RejectionCapExhausted(_) | Error::SizeAbort { .. })) => {
            Ok(TrialOutcome::Skipped { spec: spec.clone(), error: e.to_string() })
        }
        Err(e) => Err(e),
    }
}

/// Differential trials over `trials` derived specs; results in trial order.
pub fn fuzz(trials: usize, seed: u64, family: Option<Family>) -> Result<FuzzReport> {
    let specs: Vec<InstanceSpec> = (0..trials).map(|i| trial_spec(seed, i, family)).collect();
    let reports = par_map(&specs, run_trial).into_iter().collect::<Result<Vec<_>>>()?;
    let mut counts = VerdictCounts::default();
    reports.iter().for_each(|r| counts.add(r));
    Ok(FuzzReport { version: VERSION, seed, trials, family, counts, reports })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum HuntOutcome {
    Found { version: &'static str, trial: usize, report: Box<DiscrepancyReport> },
    Exhausted { version: &'static str, trials: usize, seed: u64, counts: VerdictCounts },
}

impl HuntOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn is_witness(report: &DiscrepancyReport) -> bool {
    report.verdict == Verdict::Disagree
        && report.recurrent_set_empty()
        && report.known_value.as_ref().is_some_and(|k| k.value.is_positive())
}

/// First `dba_derived` trial on which the procedure disagrees with the exact
/// value, finds no recurrent pair, and the true probability is positive.
pub fn hunt_erratum_witness(trials: usize, seed: u64) -> Result<HuntOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("hunt needs at least one trial".into()));
    }
    const BATCH: usize = 64;
    let mut counts = VerdictCounts::default();
    let mut start = 0;
    while start < trials {
        let specs: Vec<InstanceSpec> =
            (start..trials.min(start + BATCH)).map(|i| trial_spec(seed, i, Some(Family::DbaDerived))).collect();
        let outcomes = par_map(&specs, run_trial).into_iter().collect::<Result<Vec<_>>>()?;
        for (offset, outcome) in outcomes.into_iter().enumerate() {
            counts.add(&outcome);
            if let TrialOutcome::Report(report) = outcome {
                if is_witness(&report) {
                    return Ok(HuntOutcome::Found { version: VERSION, trial: start + offset, report });
                }
            }
        }
        start += BATCH;
    }
    Ok(HuntOutcome::Exhausted { version: VERSION, trials, seed, counts })
}
