//! Separability criteria and I-concurrence lower bounds.
//!
//! Every criterion is reduced to a signed score that is positive exactly when
//! it certifies entanglement (beyond [`DETECTION_MARGIN`]).

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_trace_norm, trace_norm, C64};
use crate::qstate::{DensityMatrix, Subsystem};
use crate::witness::{optimal_linear_min, optimal_nonlinear_min};

/// Scores at or below this value are treated as float noise.
pub const DETECTION_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Ppt,
    Realign,
    LinearOpt,
    NonlinearOpt,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Ppt, Criterion::Realign, Criterion::LinearOpt, Criterion::NonlinearOpt];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Ppt => "ppt",
            Criterion::Realign => "realign",
            Criterion::LinearOpt => "linear_opt",
            Criterion::NonlinearOpt => "nonlinear_opt",
        }
    }

    pub fn threshold_form(self) -> &'static str {
        match self {
            Criterion::Ppt => "‖ρ^T_A‖ - 1 > 0",
            Criterion::Realign => "‖R(ρ)‖ - 1 > 0",
            Criterion::LinearOpt => "-(1 - Σσ(μ)) > 0",
            Criterion::NonlinearOpt => "-(1 - Σσ(τ) - (Tr ρ_A² + Tr ρ_B²)/2) > 0",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown criterion '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub criterion: Criterion,
    pub detected: bool,
    pub score: f64,
    pub threshold_form: String,
}

impl Verdict {
    fn new(criterion: Criterion, score: f64) -> Self {
        Verdict {
            criterion,
            detected: is_detected(score),
            score,
            threshold_form: criterion.threshold_form().to_string(),
        }
    }
}

pub fn is_detected(score: f64) -> bool {
    score > DETECTION_MARGIN
}

/// Raw quantities behind every verdict and bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionScores {
    pub ppt_norm: f64,
    pub realign_norm: f64,
    pub linear_min: f64,
    pub nonlinear_min: f64,
}

impl CriterionScores {
    pub fn compute(rho: &DensityMatrix) -> Result<Self> {
        Ok(CriterionScores {
            ppt_norm: hermitian_trace_norm(&rho.partial_transpose(Subsystem::A)),
            realign_norm: trace_norm(&rho.realign()),
            linear_min: optimal_linear_min(rho)?.value,
            nonlinear_min: optimal_nonlinear_min(rho)?.value,
        })
    }

    pub fn score(&self, criterion: Criterion) -> f64 {
        match criterion {
            Criterion::Ppt => self.ppt_norm - 1.0,
            Criterion::Realign => self.realign_norm - 1.0,
            Criterion::LinearOpt => -self.linear_min,
            Criterion::NonlinearOpt => -self.nonlinear_min,
        }
    }

    /// `ℒ_max = 1 - min F(ρ)`.
    pub fn l_max(&self) -> f64 {
        1.0 - self.nonlinear_min
    }

    pub fn verdicts(&self) -> Vec<Verdict> {
        Criterion::ALL.iter().map(|&c| Verdict::new(c, self.score(c))).collect()
    }
}

/// Verdicts of all four criteria, in [`Criterion::ALL`] order.
pub fn evaluate_all(rho: &DensityMatrix) -> Result<Vec<Verdict>> {
    Ok(CriterionScores::compute(rho)?.verdicts())
}

pub fn criterion_score(rho: &DensityMatrix, criterion: Criterion) -> Result<f64> {
    Ok(match criterion {
        Criterion::Ppt => hermitian_trace_norm(&rho.partial_transpose(Subsystem::A)) - 1.0,
        Criterion::Realign => trace_norm(&rho.realign()) - 1.0,
        Criterion::LinearOpt => -optimal_linear_min(rho)?.value,
        Criterion::NonlinearOpt => -optimal_nonlinear_min(rho)?.value,
    })
}

/// `C(|ψ⟩) = √(2(1 - Tr ρ_A²))`.
pub fn concurrence_pure(psi: &DVector<C64>, dim_a: usize, dim_b: usize) -> Result<f64> {
    let rho = DensityMatrix::from_pure(dim_a, dim_b, psi)?;
    let purity = rho.reduced_purity(Subsystem::A);
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Largest possible I-concurrence, `√(2(m-1)/m)`.
pub fn max_concurrence(dim_min: usize) -> f64 {
    let m = dim_min as f64;
    (2.0 * (m - 1.0) / m).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Ppt,
    Realign,
    Lmax,
    Combined,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::Ppt, BoundKind::Realign, BoundKind::Lmax, BoundKind::Combined];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Ppt => "bound_ppt",
            BoundKind::Realign => "bound_realign",
            BoundKind::Lmax => "bound_lmax",
            BoundKind::Combined => "bound_combined",
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown bound '{s}'")))
    }
}

/// Lower bounds on the I-concurrence of a mixed state, each of the form
/// `√(2/(m(m-1))) · (x - 1)`, with `m = min(d_A, d_B)`. A bound is exactly
/// zero unless its score `x - 1` clears [`DETECTION_MARGIN`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceBound {
    pub dim_min: usize,
    pub bound_ppt: f64,
    pub bound_realign: f64,
    pub bound_lmax: f64,
    pub bound_combined: f64,
}

impl ConcurrenceBound {
    pub fn from_scores(dim_min: usize, scores: &CriterionScores) -> Result<Self> {
        if dim_min < 2 {
            return Err(Error::Dimension(format!("concurrence bounds need min(d_A, d_B) >= 2, got {dim_min}")));
        }
        let m = dim_min as f64;
        let factor = (2.0 / (m * (m - 1.0))).sqrt();
        let bound = |x: f64| if is_detected(x - 1.0) { factor * (x - 1.0) } else { 0.0 };
        let bound_ppt = bound(scores.ppt_norm);
        let bound_realign = bound(scores.realign_norm);
        let bound_lmax = bound(scores.l_max());
        Ok(ConcurrenceBound {
            dim_min,
            bound_ppt,
            bound_realign,
            bound_lmax,
            bound_combined: bound_ppt.max(bound_realign).max(bound_lmax),
        })
    }

    pub fn get(&self, kind: BoundKind) -> f64 {
        match kind {
            BoundKind::Ppt => self.bound_ppt,
            BoundKind::Realign => self.bound_realign,
            BoundKind::Lmax => self.bound_lmax,
            BoundKind::Combined => self.bound_combined,
        }
    }
}

pub fn concurrence_lower_bounds(rho: &DensityMatrix) -> Result<ConcurrenceBound> {
    let dim_min = rho.dim_a().min(rho.dim_b());
    if dim_min < 2 {
        return Err(Error::Dimension(format!("concurrence bounds need min(d_A, d_B) >= 2, got {dim_min}")));
    }
    ConcurrenceBound::from_scores(dim_min, &CriterionScores::compute(rho)?)
}
