//! Browser front end: three operations on pasted chains and automata, each
//! returning a JSON document for the page to render.

use mcuba::automata::{check_prefix_unambiguous, check_separated, check_unambiguous, trim};
use mcuba::finite::{prob_nfa, prob_nfa_subset_oracle_with_limit};
use mcuba::omega::{prob_uba_recurrent, UnionMethod, SOUNDNESS_FLAG};
use mcuba::oracles::{prob_dba, visits_upper_estimate};
use mcuba::{fixtures, Automaton, Error, MarkovChain, Rational};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

const DIGITS: usize = 12;
/// Subset chains are capped well below the library default to keep the page responsive.
const ORACLE_LIMIT: usize = 20_000;
const VISIT_SAMPLES: usize = 2_000;

#[derive(Serialize)]
struct Value {
    exact: String,
    decimal: String,
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value { exact: r.to_string(), decimal: r.to_decimal(DIGITS) }
    }
}

#[derive(Serialize)]
struct Failure {
    error: String,
    exit_code: i32,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { exit_code: e.exit_code(), error: e.to_string() }
    }
}

fn to_json<T: Serialize>(r: Result<T, Failure>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(f) => serde_json::to_string(&f),
    }
    .expect("demo documents serialize")
}

#[derive(Serialize)]
struct FiniteAnalysis {
    /// The linear-system value, or why it was refused.
    linear_system: Result<Value, Failure>,
    oracle: Result<Value, Failure>,
    oracle_states: Option<usize>,
}

/// Probability that a trajectory of `mc` has a prefix accepted by `aut`,
/// by the product linear system and by the subset-chain oracle.
#[wasm_bindgen]
pub fn analyze_finite(mc: &str, aut: &str) -> String {
    to_json((|| {
        let chain: MarkovChain = mc.parse()?;
        let aut: Automaton = aut.parse()?;
        let oracle = prob_nfa_subset_oracle_with_limit(&chain, &aut, ORACLE_LIMIT);
        Ok::<_, Failure>(FiniteAnalysis {
            linear_system: prob_nfa(&chain, &aut).map(|v| Value::from(&v)).map_err(Failure::from),
            oracle_states: oracle.as_ref().ok().map(|(_, n)| *n),
            oracle: oracle.map(|(v, _)| Value::from(&v)).map_err(Failure::from),
        })
    })())
}

#[derive(Serialize)]
struct Row {
    s: String,
    q: String,
    prob_h: String,
    recurrent: bool,
}

#[derive(Serialize)]
struct OmegaAnalysis {
    p_a: String,
    procedure: Value,
    soundness_flag: &'static str,
    recurrence: Vec<Row>,
    /// Exact value when the automaton is deterministic.
    exact: Option<Value>,
    visits_estimate: f64,
    visits_half_width: f64,
}

/// The recurrent-pair procedure on a two-letter coin with `P(a) = num/den`,
/// next to the exact value (deterministic automata) and a sampled estimate.
#[wasm_bindgen]
pub fn analyze_omega(num: u32, den: u32, aut: &str) -> String {
    to_json((|| {
        if den == 0 || num > den {
            return Err(Error::InvalidArgument(format!("P(a) = {num}/{den} is not a probability")).into());
        }
        let p_a = Rational::new(i64::from(num), i64::from(den));
        let chain = fixtures::coin(&p_a)?;
        let aut: Automaton = aut.parse()?;
        let verdict = prob_uba_recurrent(&chain, &aut, UnionMethod::Subset)?;
        let exact = if aut.is_deterministic() { Some(Value::from(&prob_dba(&chain, &aut)?)) } else { None };
        let est = visits_upper_estimate(&chain, &aut, 4, 200, VISIT_SAMPLES, 1)?;
        Ok(OmegaAnalysis {
            p_a: p_a.to_string(),
            procedure: Value::from(&verdict.value),
            soundness_flag: SOUNDNESS_FLAG,
            recurrence: verdict
                .recurrence
                .rows
                .iter()
                .map(|r| Row { s: r.s.clone(), q: r.q.clone(), prob_h: r.prob_h.to_string(), recurrent: r.recurrent })
                .collect(),
            exact,
            visits_estimate: est.estimate,
            visits_half_width: est.half_width_3sigma,
        })
    })())
}

#[derive(Serialize)]
struct Property {
    holds: bool,
    witness: Option<String>,
}

#[derive(Serialize)]
struct Checks {
    mode: &'static str,
    states: usize,
    unambiguous: Property,
    prefix_unambiguous: Option<Property>,
    separated: Property,
    deterministic: bool,
}

/// Structural properties of an automaton with witnesses.
#[wasm_bindgen]
pub fn check_automaton(aut: &str) -> String {
    to_json((|| {
        let aut: Automaton = aut.parse()?;
        let unamb = check_unambiguous(&aut);
        let prefix = match aut.mode() {
            mcuba::Mode::Finite => {
                let trimmed = trim(&aut);
                let v = check_prefix_unambiguous(&trimmed);
                Some(Property { holds: v.unambiguous, witness: v.witness.map(|w| w.render(&trimmed)) })
            }
            mcuba::Mode::Buchi => None,
        };
        let sep = check_separated(&aut);
        Ok::<_, Failure>(Checks {
            mode: aut.mode().keyword(),
            states: aut.len(),
            unambiguous: Property { holds: unamb.unambiguous, witness: unamb.witness.map(|w| w.render(&aut)) },
            prefix_unambiguous: prefix,
            separated: Property {
                holds: sep.separated,
                witness: sep.overlap.map(|(p, q, w)| {
                    format!("{} and {} both accept {}", aut.state_name(p), aut.state_name(q), w.render(&aut))
                }),
            },
            deterministic: aut.is_deterministic(),
        })
    })())
}

/// Shipped example inputs, by name, for the page's presets.
#[wasm_bindgen]
pub fn example(name: &str) -> String {
    match name {
        "fair_coin" => fixtures::FAIR_COIN,
        "biased_coin" => fixtures::BIASED_COIN,
        "second_letter_a" => fixtures::SECOND_LETTER_A,
        "prefix_overlap" => fixtures::PREFIX_OVERLAP,
        "ambiguous" => fixtures::AMBIGUOUS,
        "gfa" => fixtures::GFA,
        "predict_next_letter" => fixtures::PREDICT_NEXT_LETTER,
        _ => "",
    }
    .to_string()
}
