//! Projection-aggregation decoders for RM(m, r).
//!
//! Four algorithms share the building blocks in [`rules`] and [`aggregate`]:
//!
//! - **RPA** projects onto every one-dimensional subspace at every level of
//!   the recursion and iterates at every level.
//! - **RUPA** runs the same recursion but visits only the unique-projection
//!   schedule, so each `(r-1)`-dimensional subspace is reached once.
//! - **IUPA** uses the RUPA tree without internal iterations: only the top
//!   level loops.
//! - **CPA** projects directly onto every `(r-1)`-dimensional subspace and
//!   aggregates with a leave-one-out rule.
//!
//! The decoded output is the hard decision of the final LLR estimate; it is
//! not re-projected onto the code.

pub mod aggregate;
mod collapsed;
pub mod counts;
mod recursive;
pub mod rules;

use std::fmt;
use std::str::FromStr;

use crate::code::fht_decode_first_order;
use crate::error::{domain, Error, Result};
use crate::space::MAX_DIM;

pub use aggregate::{aggregate_cpa, aggregate_rpa};
pub use counts::{duplicate_count, kept_fraction_denominator, DuplicateCount};
pub use rules::{project_exact, project_minsum, Rule};

use collapsed::CollapsedEngine;
use recursive::{Params, RecursiveEngine, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rpa,
    Cpa,
    Rupa,
    Iupa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Rpa, Algorithm::Cpa, Algorithm::Rupa, Algorithm::Iupa];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rpa => "rpa",
            Algorithm::Cpa => "cpa",
            Algorithm::Rupa => "rupa",
            Algorithm::Iupa => "iupa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rpa" => Ok(Algorithm::Rpa),
            "cpa" => Ok(Algorithm::Cpa),
            "rupa" => Ok(Algorithm::Rupa),
            "iupa" => Ok(Algorithm::Iupa),
            other => domain(format!("unknown decoder '{other}'")),
        }
    }
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ExactTanh => "tanh",
            Rule::MinSum => "minsum",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tanh" | "exact" => Ok(Rule::ExactTanh),
            "minsum" | "min-sum" => Ok(Rule::MinSum),
            other => domain(format!("unknown projection rule '{other}'")),
        }
    }
}

/// A validated LLR vector: finite entries, power-of-two length.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVec(Vec<f64>);

impl LlrVec {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_llr(&values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for LlrVec {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl AsRef<[f64]> for LlrVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_llr(values: &[f64]) -> Result<()> {
    if values.is_empty() || !values.len().is_power_of_two() {
        return domain(format!("LLR length {} is not a power of two", values.len()));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return domain(format!("LLR entry {pos} is not finite"));
    }
    Ok(())
}

/// Default early-stopping threshold.
pub const DEFAULT_THETA: f64 = 0.05;
/// Default saturation magnitude of the exact tanh rule.
pub const DEFAULT_CLAMP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub rule: Rule,
    /// Maximum number of iterations `N_max` of every iterating level.
    pub max_iters: usize,
    /// Early-stopping threshold on the relative L1 change.
    pub theta: f64,
    pub clamp: f64,
}

impl DecoderConfig {
    /// Min-sum rule, `N_max = 3`, `theta = 0.05`.
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            rule: Rule::MinSum,
            max_iters: 3,
            theta: DEFAULT_THETA,
            clamp: DEFAULT_CLAMP,
        }
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return domain("max_iters must be at least 1");
        }
        if !(self.theta >= 0.0 && self.theta < 1.0) {
            return domain(format!("theta = {} outside [0, 1)", self.theta));
        }
        if !(self.clamp > 0.0) {
            return domain(format!("clamp = {} must be positive", self.clamp));
        }
        Ok(())
    }
}

/// Iteration budget used for the reference operating points: 3 for
/// `m` in {6, 7}, 4 for RM(8, 3), and `ceil(m / 2)` otherwise.
pub fn default_max_iters(m: usize, r: usize) -> usize {
    match (m, r) {
        (8, 3) => 4,
        (6, _) | (7, _) => 3,
        _ => m.div_ceil(2).max(1),
    }
}

/// Position of the current vector in the recursion tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchContext {
    pub b: usize,
}

impl Default for BranchContext {
    fn default() -> Self {
        Self { b: 1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Counters {
    pub first_order_decodes: u64,
    pub projection_ops: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub codeword: Vec<u8>,
    /// Top-level iterations performed.
    pub iterations_used: usize,
    /// Whether the last top-level iteration met the early-stopping test.
    pub converged: bool,
    pub first_order_decodes: u64,
    /// Number of coset-combine evaluations across all projections.
    pub projection_ops: u64,
}

/// `sum |L - Lhat| <= theta * sum |L|`.
pub fn early_stop(llr: &[f64], next: &[f64], theta: f64) -> bool {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (&a, &b) in llr.iter().zip(next) {
        diff += (a - b).abs();
        norm += a.abs();
    }
    diff <= theta * norm
}

#[derive(Debug, Clone)]
enum Engine {
    FirstOrder,
    Recursive(RecursiveEngine),
    Collapsed(CollapsedEngine),
}

/// A reusable decoder for one code and configuration. Buffers are
/// allocated once; decoding takes `&mut self`.
#[derive(Debug, Clone)]
pub struct Decoder {
    m: usize,
    r: usize,
    config: DecoderConfig,
    engine: Engine,
}

impl Decoder {
    pub fn new(m: usize, r: usize, config: DecoderConfig) -> Result<Self> {
        config.validate()?;
        if m < 1 || m > MAX_DIM.min(16) || r < 1 || r > m {
            return domain(format!("invalid code RM({m},{r}) for decoding"));
        }
        let engine = if r == 1 {
            if config.algorithm == Algorithm::Cpa {
                return domain("CPA needs r >= 2");
            }
            Engine::FirstOrder
        } else {
            let params = |schedule, inner_iterations| Params {
                schedule,
                inner_iterations,
                rule: config.rule,
                max_iters: config.max_iters,
                theta: config.theta,
                clamp: config.clamp,
            };
            match config.algorithm {
                Algorithm::Rpa => Engine::Recursive(RecursiveEngine::new(m, r, params(Schedule::Full, true))),
                Algorithm::Rupa => Engine::Recursive(RecursiveEngine::new(m, r, params(Schedule::Unique, true))),
                Algorithm::Iupa => Engine::Recursive(RecursiveEngine::new(m, r, params(Schedule::Unique, false))),
                Algorithm::Cpa => {
                    if r - 1 > 6 {
                        return domain("CPA supports cosets of at most 64 elements");
                    }
                    Engine::Collapsed(CollapsedEngine::new(
                        m,
                        r,
                        config.rule,
                        config.max_iters,
                        config.theta,
                        config.clamp,
                    )?)
                }
            }
        };
        Ok(Self { m, r, config, engine })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn decode(&mut self, llr: &[f64]) -> Result<DecodeOutcome> {
        self.decode_from(llr, BranchContext::default())
    }

    /// Decodes as if the input were the vector at branch `ctx.b` of a larger
    /// tree. Only the unique schedule depends on the branch number.
    pub fn decode_from(&mut self, llr: &[f64], ctx: BranchContext) -> Result<DecodeOutcome> {
        check_llr(llr)?;
        let n = 1usize << self.m;
        if llr.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: llr.len(),
            });
        }
        if ctx.b == 0 {
            return domain("branch number must be at least 1");
        }
        let mut counters = Counters::default();
        match &mut self.engine {
            Engine::FirstOrder => {
                let codeword = fht_decode_first_order(llr)?;
                Ok(DecodeOutcome {
                    codeword,
                    iterations_used: 1,
                    converged: true,
                    first_order_decodes: 1,
                    projection_ops: 0,
                })
            }
            Engine::Recursive(engine) => {
                if matches!(self.config.algorithm, Algorithm::Rupa | Algorithm::Iupa) {
                    crate::space::unique_projection_range(self.m, self.r, ctx.b)?;
                }
                let pass = engine.run(llr, ctx.b, &mut counters);
                Ok(DecodeOutcome {
                    codeword: engine.decision().to_vec(),
                    iterations_used: pass.iterations,
                    converged: pass.converged,
                    first_order_decodes: counters.first_order_decodes,
                    projection_ops: counters.projection_ops,
                })
            }
            Engine::Collapsed(engine) => {
                let pass = engine.run(llr, &mut counters);
                Ok(DecodeOutcome {
                    codeword: engine.decision().to_vec(),
                    iterations_used: pass.iterations,
                    converged: pass.converged,
                    first_order_decodes: counters.first_order_decodes,
                    projection_ops: counters.projection_ops,
                })
            }
        }
    }
}

fn one_shot(llr: &[f64], m: usize, r: usize, cfg: &DecoderConfig, algorithm: Algorithm) -> Result<DecodeOutcome> {
    let cfg = DecoderConfig { algorithm, ..*cfg };
    Decoder::new(m, r, cfg)?.decode(llr)
}

/// Recursive projection-aggregation over all one-dimensional subspaces.
pub fn rpa_decode(llr: &[f64], m: usize, r: usize, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    one_shot(llr, m, r, cfg, Algorithm::Rpa)
}

/// Recursive decoding restricted to the unique-projection schedule.
pub fn rupa_decode(
    llr: &[f64],
    m: usize,
    r: usize,
    ctx: BranchContext,
    cfg: &DecoderConfig,
) -> Result<DecodeOutcome> {
    let cfg = DecoderConfig {
        algorithm: Algorithm::Rupa,
        ..*cfg
    };
    Decoder::new(m, r, cfg)?.decode_from(llr, ctx)
}

/// Unique-projection tree without internal iterations.
pub fn iupa_decode(llr: &[f64], m: usize, r: usize, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    one_shot(llr, m, r, cfg, Algorithm::Iupa)
}

/// Collapsed projection-aggregation onto all `(r-1)`-dimensional subspaces.
pub fn cpa_decode(llr: &[f64], m: usize, r: usize, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    if r < 2 {
        return domain("CPA needs r >= 2");
    }
    one_shot(llr, m, r, cfg, Algorithm::Cpa)
}
