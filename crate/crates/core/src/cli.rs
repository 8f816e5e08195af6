//! The `mcuba` command line.
//!
//! Results go to the output stream; provenance (tool version, input digests)
//! and warnings go to the diagnostic stream with a leading `#` or `warning:`.
//! Identical invocations on identical files produce identical output bytes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::automata::{check_prefix_unambiguous, check_separated, check_unambiguous};
use crate::error::Error;
use crate::finite::{prob_nfa, prob_nfa_subset_oracle_with_limit, simulate_prefix_acceptance, MonteCarlo};
use crate::harness::{fuzz, hunt_erratum_witness, Family, HuntOutcome, VERSION};
use crate::model::{Automaton, MarkovChain};
use crate::omega::{prob_uba_recurrent, recurrent_pairs, UnionMethod};
use crate::oracles::{prob_dba, prob_functional, visits_upper_estimate};
use crate::product::{build_product, SUBSET_CHAIN_LIMIT};
use crate::rational::Rational;

/// Marker printed once on the diagnostic stream by every `prob-uba` run.
pub const WITHDRAWN_MARKER: &str = "WITHDRAWN-THEOREM-1";
pub const WITHDRAWN_WARNING: &str =
    "procedure per withdrawn Theorem 1: the recurrent-pair method is unsound and may under-report the probability";

/// Significant digits of the decimal rendering of exact results.
const DIGITS: usize = 30;

#[derive(Parser, Debug)]
#[command(name = "mcuba", version, about = "Exact acceptance probabilities of Markov chains by unambiguous automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Inputs {
    /// Markov chain file (`@mc`).
    #[arg(long)]
    mc: PathBuf,
    /// Automaton file (`@automaton nfa|nba`).
    #[arg(long)]
    aut: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Probability that a trajectory has a prefix accepted by an unambiguous NFA.
    ProbNfa {
        #[command(flatten)]
        inputs: Inputs,
        /// Write the product graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Recurrent-pair value for an unambiguous Büchi automaton (unsound).
    ProbUba {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value_t = UnionArg::Subset)]
        union_method: UnionArg,
        /// Write the product graph in Graphviz format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the full verdict as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Recurrence table of an unambiguous Büchi automaton.
    Recurrent {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Structural property of an automaton, with a witness when it fails.
    Check {
        #[arg(long)]
        aut: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
    },
    /// Reference computations.
    Oracle {
        #[command(subcommand)]
        oracle: OracleCommand,
    },
    /// Differential trials of the recurrent-pair procedure on random instances.
    Fuzz {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Family of every trial; cycles through all families when omitted.
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// JSON report destination; printed to the output stream when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Search for an instance where the procedure finds no recurrent pair
    /// although the language has positive probability.
    Hunt {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Exact value for a deterministic Büchi automaton.
    Dba {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Exact value on a chain whose rows are point masses.
    Functional {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Sampled fraction of prefixes with a run visiting F at least k times.
    Visits {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 200)]
        horizon: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact prefix-acceptance value through the determinized chain (any NFA).
    Subset {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Sampled prefix-acceptance value for an NFA.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum UnionArg {
    Subset,
    Lemma1,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Property {
    Unambiguous,
    PrefixUnambiguous,
    Separated,
    Deterministic,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    RawUba,
    DbaDerived,
    Functional,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::RawUba => Family::RawUba,
            FamilyArg::DbaDerived => Family::DbaDerived,
            FamilyArg::Functional => Family::Functional,
        }
    }
}

/// Failure of a command: a library error or an unreadable/unwritable file.
enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

struct Session<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Session<'_> {
    fn read(&mut self, path: &Path) -> std::result::Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        let _ = writeln!(self.err, "# sha256 {digest}  {}", path.display());
        String::from_utf8(bytes).map_err(|_| Failure::Io(format!("{}: not UTF-8", path.display())))
    }

    fn chain(&mut self, path: &Path) -> std::result::Result<MarkovChain, Failure> {
        let text = self.read(path)?;
        text.parse::<MarkovChain>().map_err(|e| located(path, e))
    }

    fn automaton(&mut self, path: &Path) -> std::result::Result<Automaton, Failure> {
        let text = self.read(path)?;
        text.parse::<Automaton>().map_err(|e| located(path, e))
    }

    fn inputs(&mut self, inputs: &Inputs) -> std::result::Result<(MarkovChain, Automaton), Failure> {
        Ok((self.chain(&inputs.mc)?, self.automaton(&inputs.aut)?))
    }

    fn write_file(&mut self, path: &Path, contents: &str) -> CmdResult {
        std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }

    fn value(&mut self, v: &Rational) {
        let _ = writeln!(self.out, "{v}");
        let _ = writeln!(self.out, "{}", v.to_decimal(DIGITS));
    }

    fn estimate(&mut self, mc: &MonteCarlo) {
        let _ = writeln!(self.out, "estimate {}", mc.estimate);
        let _ = writeln!(self.out, "half_width_3sigma {}", mc.half_width_3sigma);
        let _ = writeln!(self.out, "samples {}", mc.samples);
        if mc.capped > 0 {
            let _ = writeln!(self.out, "capped {}", mc.capped);
        }
    }
}

/// Parse errors carry the file name in front of `line:column`.
fn located(path: &Path, e: Error) -> Failure {
    match e {
        Error::Syntax { line, column, message } => {
            Failure::Lib(Error::Syntax { line, column, message: format!("{message} (in {})", path.display()) })
        }
        other => Failure::Lib(other),
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let _ = writeln!(err, "# mcuba {VERSION}");
    let mut session = Session { out, err };
    match dispatch(&mut session, cli.command) {
        Ok(()) => 0,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(session.err, "error: {msg}");
            1
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(session.err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(s: &mut Session, command: Command) -> CmdResult {
    match command {
        Command::ProbNfa { inputs, dot } => {
            let (chain, aut) = s.inputs(&inputs)?;
            let value = prob_nfa(&chain, &aut)?;
            if let Some(path) = dot {
                let aligned = crate::automata::align_to_chain(&aut, &chain)?;
                let graph = build_product(&chain, &aligned)?;
                s.write_file(&path, &graph.to_dot(&chain, &aligned))?;
            }
            s.value(&value);
        }
        Command::ProbUba { inputs, union_method, dot, json } => {
            let _ = writeln!(s.err, "warning: {WITHDRAWN_MARKER}: {WITHDRAWN_WARNING}");
            let (chain, aut) = s.inputs(&inputs)?;
            let method = match union_method {
                UnionArg::Subset => UnionMethod::Subset,
                UnionArg::Lemma1 => UnionMethod::Lemma1,
            };
            let verdict = prob_uba_recurrent(&chain, &aut, method)?;
            if method == UnionMethod::Lemma1 && verdict.union_method != UnionMethod::Lemma1 {
                let _ = writeln!(s.err, "warning: union automaton fails the ambiguity tests; used the subset method");
            }
            if let Some(path) = dot {
                let aligned = crate::automata::align_to_chain(&aut, &chain)?;
                let graph = build_product(&chain, &aligned)?;
                s.write_file(&path, &graph.to_dot(&chain, &aligned))?;
            }
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&verdict).expect("verdicts serialize") + "\n";
                s.write_file(&path, &text)?;
            }
            s.value(&verdict.value);
            let _ = writeln!(s.out, "recurrent_pairs {}", verdict.recurrence.recurrent_count());
            let _ = writeln!(s.out, "soundness_flag {}", verdict.soundness_flag);
        }
        Command::Recurrent { inputs, json } => {
            let (chain, aut) = s.inputs(&inputs)?;
            let table = recurrent_pairs(&chain, &aut)?;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&table).expect("tables serialize") + "\n";
                s.write_file(&path, &text)?;
            }
            let _ = write!(s.out, "{}", table.to_text());
        }
        Command::Check { aut, property } => {
            let aut = s.automaton(&aut)?;
            match property {
                Property::Unambiguous | Property::PrefixUnambiguous => {
                    let (verdict, good, bad) = match property {
                        Property::Unambiguous => (check_unambiguous(&aut), "unambiguous", "ambiguous"),
                        _ => (
                            check_prefix_unambiguous(&crate::automata::trim(&aut)),
                            "prefix-unambiguous",
                            "prefix-ambiguous",
                        ),
                    };
                    match verdict.witness {
                        None => {
                            let _ = writeln!(s.out, "{good}");
                        }
                        Some(w) => {
                            let _ = writeln!(s.out, "{bad}");
                            let _ = writeln!(s.out, "witness {}", w.render(&aut));
                        }
                    }
                }
                Property::Separated => {
                    let verdict = check_separated(&aut);
                    match verdict.overlap {
                        None => {
                            let _ = writeln!(s.out, "separated");
                        }
                        Some((p, q, w)) => {
                            let _ = writeln!(s.out, "not separated");
                            let _ = writeln!(s.out, "states {} {}", aut.state_name(p), aut.state_name(q));
                            let _ = writeln!(s.out, "witness {}", w.render(&aut));
                        }
                    }
                }
                Property::Deterministic => {
                    let _ = writeln!(
                        s.out,
                        "{}",
                        if aut.is_deterministic() { "deterministic" } else { "nondeterministic" }
                    );
                }
            }
        }
        Command::Oracle { oracle } => match oracle {
            OracleCommand::Dba { inputs } => {
                let (chain, aut) = s.inputs(&inputs)?;
                let v = prob_dba(&chain, &aut)?;
                s.value(&v);
            }
            OracleCommand::Functional { inputs } => {
                let (chain, aut) = s.inputs(&inputs)?;
                let v = prob_functional(&chain, &aut)?;
                s.value(&v);
            }
            OracleCommand::Visits { inputs, k, horizon, samples, seed } => {
                let (chain, aut) = s.inputs(&inputs)?;
                let mc = visits_upper_estimate(&chain, &aut, k, horizon, samples, seed)?;
                s.estimate(&mc);
            }
            OracleCommand::Subset { inputs } => {
                let (chain, aut) = s.inputs(&inputs)?;
                let (v, size) = prob_nfa_subset_oracle_with_limit(&chain, &aut, SUBSET_CHAIN_LIMIT)?;
                s.value(&v);
                let _ = writeln!(s.out, "subset_states {size}");
            }
            OracleCommand::Simulate { inputs, samples, seed } => {
                let (chain, aut) = s.inputs(&inputs)?;
                let mc = simulate_prefix_acceptance(&chain, &aut, samples, seed)?;
                s.estimate(&mc);
            }
        },
        Command::Fuzz { trials, seed, family, report } => {
            let result = fuzz(trials, seed, family.map(Family::from))?;
            let json = result.to_json() + "\n";
            let c = &result.counts;
            let summary = format!(
                "trials {trials}\nagree {}\ndisagree {}\nflagged {}\nnot_comparable {}\nskipped {}\nempty_recurrence_with_positive_evidence {}\n",
                c.agree, c.disagree, c.flagged, c.not_comparable, c.skipped, c.empty_recurrence_with_positive_evidence
            );
            match report {
                Some(path) => {
                    s.write_file(&path, &json)?;
                    let _ = write!(s.out, "{summary}");
                }
                None => {
                    let _ = write!(s.out, "{json}");
                }
            }
        }
        Command::Hunt { trials, seed, report } => {
            let outcome = hunt_erratum_witness(trials, seed)?;
            let json = outcome.to_json() + "\n";
            let line = match &outcome {
                HuntOutcome::Found { trial, report, .. } => format!(
                    "found trial {trial}: procedure {} vs known {}\n",
                    report.procedure_value.as_ref().map_or("-".into(), Rational::to_string),
                    report.known_value.as_ref().map_or("-".into(), |k| k.value.to_string()),
                ),
                HuntOutcome::Exhausted { trials, .. } => format!("exhausted after {trials} trials\n"),
            };
            match report {
                Some(path) => {
                    s.write_file(&path, &json)?;
                    let _ = write!(s.out, "{line}");
                }
                None => {
                    let _ = write!(s.out, "{json}");
                }
            }
        }
    }
    Ok(())
}
