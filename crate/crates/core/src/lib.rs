//! Two-colour lattice dynamics on the integer ring and on fixed-boundary
//! segments, together with the machinery needed to study its absorption
//! behaviour: exact distribution evolution on small rings, interface
//! random-walk experiments, the reduced block-length Markov chain, and
//! parallel Monte Carlo estimation of the all-red absorption probability.
//!
//! Each site hosts a red or blue individual that tosses a coin every step;
//! on a failure it adopts the other colour exactly when the other colour's
//! within-colour success proportion in its neighbourhood strictly exceeds
//! its own. See [`lattice`] for the update rule, [`exact`] for the exact
//! engine, [`interface`], [`length_chain`] and [`estimator`] for the
//! experiment layers.

pub mod estimator;
pub mod exact;
pub mod interface;
pub mod lattice;
pub mod length_chain;
pub mod parallel;
pub mod rng;
pub mod selftest;

use thiserror::Error;

/// Errors surfaced by the library. Anything not covered here is a plain
/// precondition violation and panics via `debug_assert!` in hot kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coin draw has {got} sites but the configuration needs {expected}")]
    CoinCountMismatch { expected: usize, got: usize },

    #[error("ring size {n} exceeds the exact-engine cap {cap}")]
    RingTooLarge { n: usize, cap: usize },

    #[error("pattern of length {pattern} does not fit on {n} sites")]
    PatternTooLong { pattern: usize, n: usize },

    #[error("parameter {name} = {value} outside valid range {range}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("absorption iteration stopped after {steps} steps with residual mass {residual:.3e}")]
    AbsorptionNotConverged { steps: usize, residual: f64 },

    #[error(
        "-gamma1 fails the characteristic equation (residual {residual:.3e}); \
         the zero-increment weight is inconsistent with the transition rows"
    )]
    CharacteristicRootMismatch { residual: f64 },

    #[error("interface left the tracking window (|x| > {radius} at step {step})")]
    WindowExceeded { radius: i64, step: usize },

    #[error("truncated absorption system is singular near row {row}")]
    SingularSystem { row: usize },

    #[error("window of {window} sites is too small: {why}")]
    WindowTooSmall { window: usize, why: &'static str },

    #[error("empty word: pattern must contain at least one colour")]
    EmptyPattern,
}

pub type Result<T> = std::result::Result<T, Error>;




pub use lattice::{CoinDraw, Color, Configuration, ModelParams, NeighborhoodMode, Topology};

