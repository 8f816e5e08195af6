//! Probability that a finite Markov chain's trajectory is accepted by an
//! unambiguous automaton.
//!
//! * [`finite`]: exact values for finite-word automata through a linear system
//!   over the chain/automaton product, cross-checked against a subset-chain
//!   oracle and Monte Carlo simulation.
//! * [`omega`]: the recurrent-pair procedure for Büchi automata. It is known to
//!   be unsound; every verdict carries a flag saying so.
//! * [`oracles`] and [`harness`]: ground truth on restricted classes and the
//!   differential fuzzing that exposes where the procedure goes wrong.

pub mod automata;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod finite;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod harness;
pub mod linsolve;
pub mod model;
pub mod omega;
pub mod oracles;
pub mod product;
pub mod rational;
pub mod rng;

pub use error::{Error, Result};
pub use model::{Automaton, MarkovChain, Mode, SizeMetrics, StateSet};
pub use rational::Rational;
