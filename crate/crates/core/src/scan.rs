//! One-parameter family scans: score every grid point, then bisect the first
//! undetected → detected cell down to the requested tolerance.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::criteria::{criterion_score, is_detected, BoundKind, ConcurrenceBound, Criterion, CriterionScores};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::loo::{gell_mann_basis, pauli_basis, rotate, transpose_basis, LooBasis, OrthogonalRotation};
use crate::qstate::{noisy_singlet, upb_noise, DensityMatrix};
use crate::witness::{linear_witness_value, nonlinear_witness_value};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_TOL: f64 = 1e-4;
pub const MIN_TOL: f64 = 1e-6;

/// A family `p ↦ ρ(p)` on `[0, 1]`.
#[derive(Debug, Clone)]
pub enum Family {
    /// `p ρ_upb + (1 - p) I/9`
    UpbNoise,
    /// `p |ψ_s⟩⟨ψ_s| + (1 - p) ρ_sep`
    NoisySinglet,
    /// `p target + (1 - p) noise`
    Mixture { target: DensityMatrix, noise: DensityMatrix },
}

impl Family {
    pub fn state(&self, p: f64) -> Result<DensityMatrix> {
        match self {
            Family::UpbNoise => upb_noise(p),
            Family::NoisySinglet => noisy_singlet(p),
            Family::Mixture { target, noise } => target.mix(p, noise),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            Family::UpbNoise => (3, 3),
            Family::NoisySinglet => (2, 2),
            Family::Mixture { target, .. } => (target.dim_a(), target.dim_b()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::UpbNoise => "upb_noise",
            Family::NoisySinglet => "noisy_singlet",
            Family::Mixture { .. } => "mixture",
        }
    }
}

/// Fixed basis pairs for the non-optimized witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisPair {
    /// `{σ_x, σ_y, σ_z, I}/√2` on both sides.
    Pauli,
    /// Pauli on A, `{σ_x, -σ_y, σ_z, I}/√2` on B.
    PauliFlipY,
    /// `{-σ_x, -σ_y, -σ_z, I}/√2` on A, Pauli on B.
    NegatedPauli,
    /// Gell-Mann on both sides.
    GellMann,
    /// Gell-Mann on A, its elementwise transpose on B.
    GellMannTranspose,
}

impl BasisPair {
    pub const ALL: [BasisPair; 5] = [
        BasisPair::Pauli,
        BasisPair::PauliFlipY,
        BasisPair::NegatedPauli,
        BasisPair::GellMann,
        BasisPair::GellMannTranspose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisPair::Pauli => "pauli",
            BasisPair::PauliFlipY => "pauli_flip_y",
            BasisPair::NegatedPauli => "negated_pauli",
            BasisPair::GellMann => "gell_mann",
            BasisPair::GellMannTranspose => "gell_mann_transpose",
        }
    }

    pub fn bases(self, dim_a: usize, dim_b: usize) -> Result<(LooBasis, LooBasis)> {
        let qubits = || {
            if (dim_a, dim_b) == (2, 2) {
                Ok(())
            } else {
                Err(Error::Dimension(format!("basis pair '{}' needs a 2x2 system, got {dim_a}x{dim_b}", self.name())))
            }
        };
        let signs = |s: &[f64]| rotate(&pauli_basis(), &OrthogonalRotation::signs(s)?);
        match self {
            BasisPair::Pauli => qubits().map(|_| (pauli_basis(), pauli_basis())),
            BasisPair::PauliFlipY => {
                qubits()?;
                Ok((pauli_basis(), signs(&[1.0, -1.0, 1.0, 1.0])?))
            }
            BasisPair::NegatedPauli => {
                qubits()?;
                Ok((signs(&[-1.0, -1.0, -1.0, 1.0])?, pauli_basis()))
            }
            BasisPair::GellMann => Ok((gell_mann_basis(dim_a)?, gell_mann_basis(dim_b)?)),
            BasisPair::GellMannTranspose => Ok((gell_mann_basis(dim_a)?, transpose_basis(&gell_mann_basis(dim_b)?))),
        }
    }
}

impl FromStr for BasisPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisPair::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown basis pair '{s}'")))
    }
}

/// What is scored at each grid point. Positive means detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Criterion(Criterion),
    Bound(BoundKind),
    /// `-Tr(Wρ)` at a fixed basis pair.
    FixedLinear(BasisPair),
    /// `-F(ρ)` at a fixed basis pair.
    FixedNonlinear(BasisPair),
}

impl ScoreKind {
    /// Parses `ppt`, `realign`, `linear_opt`, `nonlinear_opt`, any bound name,
    /// or `linear_fixed` / `nonlinear_fixed` together with a basis pair.
    pub fn parse(name: &str, pair: Option<BasisPair>) -> Result<Self> {
        if let Ok(c) = name.parse::<Criterion>() {
            return Ok(ScoreKind::Criterion(c));
        }
        if let Ok(b) = name.parse::<BoundKind>() {
            return Ok(ScoreKind::Bound(b));
        }
        let need_pair = || pair.ok_or_else(|| Error::Parse(format!("criterion '{name}' needs a basis pair")));
        match name {
            "linear_fixed" => Ok(ScoreKind::FixedLinear(need_pair()?)),
            "nonlinear_fixed" => Ok(ScoreKind::FixedNonlinear(need_pair()?)),
            _ => Err(Error::Parse(format!("unknown criterion '{name}'"))),
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreKind::Criterion(c) => f.write_str(c.name()),
            ScoreKind::Bound(b) => f.write_str(b.name()),
            ScoreKind::FixedLinear(b) => write!(f, "linear_fixed[{}]", b.name()),
            ScoreKind::FixedNonlinear(b) => write!(f, "nonlinear_fixed[{}]", b.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub family: Family,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub score: ScoreKind,
    pub bisection_tol: f64,
}

impl ScanSpec {
    pub fn new(family: Family, score: ScoreKind) -> Self {
        ScanSpec { family, start: 0.0, stop: 1.0, step: DEFAULT_STEP, score, bisection_tol: DEFAULT_TOL }
    }

    // negated comparisons so that NaN fails validation
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let ok_range = 0.0 <= self.start && self.start < self.stop && self.stop <= 1.0;
        if !ok_range {
            return Err(Error::InvalidScan(format!("need 0 <= start < stop <= 1, got [{}, {}]", self.start, self.stop)));
        }
        if !(self.step > 0.0) {
            return Err(Error::InvalidScan(format!("step must be positive, got {}", self.step)));
        }
        if !(self.bisection_tol >= MIN_TOL) {
            return Err(Error::InvalidScan(format!("bisection tolerance must be >= {MIN_TOL:e}, got {}", self.bisection_tol)));
        }
        Ok(())
    }

    /// Grid `start + i·step` for every `i` that stays within `stop`.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| (self.start + i as f64 * self.step).min(self.stop)).collect()
    }
}

/// Scores states of a family, with any fixed bases built once.
struct Scorer<'a> {
    family: &'a Family,
    kind: ScoreKind,
    bases: Option<(LooBasis, LooBasis)>,
}

impl<'a> Scorer<'a> {
    fn new(family: &'a Family, kind: ScoreKind) -> Result<Self> {
        let (da, db) = family.dims();
        let bases = match kind {
            ScoreKind::FixedLinear(pair) | ScoreKind::FixedNonlinear(pair) => Some(pair.bases(da, db)?),
            _ => None,
        };
        Ok(Scorer { family, kind, bases })
    }

    fn score(&self, p: f64) -> Result<f64> {
        let rho = self.family.state(p)?;
        match (self.kind, &self.bases) {
            (ScoreKind::Criterion(c), _) => criterion_score(&rho, c),
            (ScoreKind::Bound(b), _) => {
                let dim_min = rho.dim_a().min(rho.dim_b());
                Ok(ConcurrenceBound::from_scores(dim_min, &CriterionScores::compute(&rho)?)?.get(b))
            }
            (ScoreKind::FixedLinear(_), Some((a, b))) => Ok(-linear_witness_value(&rho, a, b)?),
            (ScoreKind::FixedNonlinear(_), Some((a, b))) => Ok(-nonlinear_witness_value(&rho, a, b)?),
            _ => unreachable!("fixed-basis scorers always carry bases"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub p: f64,
    pub score: f64,
    pub detected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdOutcome {
    /// Bisected threshold; the score is undetected at `threshold - tol` and
    /// detected at `threshold + tol`.
    Bisected { threshold: f64, tol: f64, lo: f64, hi: f64 },
    /// The bracketing cell is not monotone, so only grid resolution is given.
    GridOnly { lo: f64, hi: f64 },
    /// Already detected at the first grid point.
    DetectedAtStart { p: f64 },
    /// No grid point is detected.
    NotFound,
}

impl fmt::Display for ThresholdOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdOutcome::Bisected { threshold, tol, .. } => write!(f, "threshold {} ± {}", format_sig(*threshold), tol),
            ThresholdOutcome::GridOnly { lo, hi } => {
                write!(f, "threshold in ({}, {}] (non-monotone cell, grid resolution only)", format_sig(*lo), format_sig(*hi))
            }
            ThresholdOutcome::DetectedAtStart { p } => write!(f, "detected at grid start p = {}; threshold <= start", format_sig(*p)),
            ThresholdOutcome::NotFound => f.write_str("no threshold in range"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    pub score: ScoreKind,
    pub rows: Vec<ScanRow>,
    pub outcome: ThresholdOutcome,
}

impl ScanResult {
    pub fn threshold(&self) -> Option<f64> {
        match self.outcome {
            ThresholdOutcome::Bisected { threshold, .. } => Some(threshold),
            _ => None,
        }
    }

    /// `p,score,detected` with ten significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,score,detected\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", format_sig(r.p), format_sig(r.score), r.detected);
        }
        out
    }
}

/// Evaluates `spec` on its grid (in parallel where enabled) and bisects the
/// first detection edge.
pub fn run_scan(spec: &ScanSpec, mode: ExecMode) -> Result<ScanResult> {
    spec.validate()?;
    let scorer = Scorer::new(&spec.family, spec.score)?;
    let grid = spec.grid();
    let scores = exec::map(mode, &grid, |&p| scorer.score(p)).into_iter().collect::<Result<Vec<f64>>>()?;
    let rows: Vec<ScanRow> =
        grid.iter().zip(&scores).map(|(&p, &score)| ScanRow { p, score, detected: is_detected(score) }).collect();

    let outcome = match rows.iter().position(|r| r.detected) {
        None => ThresholdOutcome::NotFound,
        Some(0) => ThresholdOutcome::DetectedAtStart { p: rows[0].p },
        Some(j) => bisect(&scorer, rows[j - 1], rows[j], spec.bisection_tol)?,
    };
    Ok(ScanResult { score: spec.score, rows, outcome })
}

fn bisect(scorer: &Scorer<'_>, below: ScanRow, above: ScanRow, tol: f64) -> Result<ThresholdOutcome> {
    let mid = 0.5 * (below.p + above.p);
    let s_mid = scorer.score(mid)?;
    if !(below.score <= s_mid && s_mid <= above.score) {
        return Ok(ThresholdOutcome::GridOnly { lo: below.p, hi: above.p });
    }
    let (mut lo, mut hi) = (below.p, above.p);
    if is_detected(s_mid) {
        hi = mid;
    } else {
        lo = mid;
    }
    while hi - lo > tol {
        let m = 0.5 * (lo + hi);
        if is_detected(scorer.score(m)?) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(ThresholdOutcome::Bisected { threshold: 0.5 * (lo + hi), tol, lo, hi })
}

/// Locale-free decimal with ten significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}
