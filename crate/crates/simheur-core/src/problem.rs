//! The problem abstraction the engine runs against.
//!
//! A stochastic combinatorial optimization problem asks for the solution
//! minimizing `E[f(X, s)]` where `X` collects the random parameters. Its
//! deterministic counterpart replaces `X` by `E[X]` and minimizes
//! `f(E[X], s)`, which is cheap to evaluate but in general ranks solutions
//! differently (the "flaw of averages"). A [`Problem`] exposes both views;
//! a [`NeighborhoodProblem`] additionally supports local search.

use crate::rng::RngStream;
use rand_chacha::ChaCha8Rng;

/// One simulated realization of the objective. Lower is better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveSample {
    pub value: f64,
}

impl ObjectiveSample {
    pub fn new(value: f64) -> Self {
        debug_assert!(value.is_finite(), "objective sample must be finite");
        Self { value }
    }
}

/// A stochastic combinatorial optimization problem.
///
/// Both methods must be pure: `deterministic_objective` returns the same
/// value for the same solution, and `simulate` with a fixed stream is
/// reproducible and safe to call concurrently with distinct streams.
/// Solutions passed in are assumed valid; validity is the caller's contract.
pub trait Problem: Sync {
    type Solution: Clone + PartialEq + Send + Sync;

    /// `f(E[X], s)`: objective under mean parameters, one cheap evaluation.
    fn deterministic_objective(&self, solution: &Self::Solution) -> f64;

    /// One Monte-Carlo replication of `f(X, s)`.
    fn simulate(&self, solution: &Self::Solution, stream: RngStream) -> ObjectiveSample;
}

/// A problem with enough structure for local search: a constructive start
/// and a randomized neighbor move.
pub trait NeighborhoodProblem: Problem {
    /// Constructive starting solution.
    fn initial_solution(&self) -> Self::Solution;

    /// One random neighbor. Must return a valid solution; may equal the
    /// input when the instance admits no nontrivial move.
    fn neighbor(&self, solution: &Self::Solution, rng: &mut ChaCha8Rng) -> Self::Solution;
}
