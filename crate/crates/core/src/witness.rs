//! Correlation (`μ`) and covariance (`τ`) matrices of a state in a pair of
//! LOO bases, the linear and nonlinear witnesses built from them, and their
//! closed-form minima over all basis pairs.
//!
//! Given any starting bases, the minimum over all rotated bases is reached at
//! the rotations read off the SVD of `μ` (linear) or `τ` (nonlinear):
//!
//! ```text
//! min Tr(Wρ) = 1 - Σ_k σ_k(μ)
//! min F(ρ)   = 1 - Σ_k σ_k(τ) - (Tr ρ_A² + Tr ρ_B²)/2
//! ```
//!
//! Unequal subsystem dimensions need no special casing: the rectangular
//! `d_A² x d_B²` matrices have the same singular values as their zero-padded
//! square versions, and the witnesses pair the shorter basis with zero
//! operators.

use crate::error::{Error, Result};
use crate::linalg::{full_svd, rect_trace, CMatrix, RMatrix, ZERO};
use crate::loo::{canonical_basis, rotate, LooBasis, OrthogonalRotation};
use crate::qstate::{DensityMatrix, Subsystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    /// `μ_lm = ⟨G_l^A ⊗ G_m^B⟩`
    Mu,
    /// `τ_lm = μ_lm - ⟨G_l^A ⊗ I⟩⟨I ⊗ G_m^B⟩`
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Linear,
    Nonlinear,
}

/// A real correlation-type matrix with its full SVD
/// `matrix = left · Σ · rightᵀ`.
#[derive(Debug, Clone)]
pub struct CorrelationData {
    pub kind: CorrelationKind,
    pub matrix: RMatrix,
    pub singular_values: Vec<f64>,
    pub left_factor: RMatrix,
    pub right_factor: RMatrix,
}

impl CorrelationData {
    fn new(kind: CorrelationKind, matrix: RMatrix) -> Self {
        let (left_factor, singular_values, right_factor) = full_svd(&matrix);
        CorrelationData { kind, matrix, singular_values, left_factor, right_factor }
    }

    /// Ky Fan norm `Σ_k σ_k`.
    pub fn singular_value_sum(&self) -> f64 {
        self.singular_values.iter().sum()
    }

    /// Rotations `(U, V)` with `U · matrix · Vᵀ = Σ`, which maximize
    /// `Tr(U · matrix · Vᵀ)` over all orthogonal pairs.
    pub fn optimal_rotations(&self) -> (OrthogonalRotation, OrthogonalRotation) {
        (
            OrthogonalRotation::new_unchecked(self.left_factor.transpose()),
            OrthogonalRotation::new_unchecked(self.right_factor.transpose()),
        )
    }

    /// Largest entrywise deviation of `left · Σ · rightᵀ` from `matrix`.
    pub fn reconstruction_residual(&self) -> f64 {
        let (r, c) = self.matrix.shape();
        let mut sigma = RMatrix::zeros(r, c);
        for (i, s) in self.singular_values.iter().enumerate() {
            sigma[(i, i)] = *s;
        }
        (&self.left_factor * sigma * self.right_factor.transpose() - &self.matrix).abs().max()
    }
}

fn check_dims(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<()> {
    if basis_a.dim() != rho.dim_a() || basis_b.dim() != rho.dim_b() {
        return Err(Error::Dimension(format!(
            "bases act on {}x{} but the state is {}x{}",
            basis_a.dim(),
            basis_b.dim(),
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    Ok(())
}

/// Row `l` holds `G_l[k, i]` at column `i * d + k`, so that
/// `Tr(X G_l) = Σ_{i,k} X[i,k] G_l[k,i]` is a dot product with the row-major
/// flattening of `X`.
fn transposed_vec_rows(basis: &LooBasis) -> CMatrix {
    let d = basis.dim();
    CMatrix::from_fn(basis.len(), d * d, |l, col| {
        let (i, k) = (col / d, col % d);
        basis.get(l)[(k, i)]
    })
}

fn joint_expectations(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> RMatrix {
    // Tr(ρ G_l ⊗ G_m) = Σ R[(i,k),(j,n)] G_l[k,i] G_m[n,j] with R the realignment
    let r = rho.realign();
    let a = transposed_vec_rows(basis_a);
    let b = transposed_vec_rows(basis_b);
    (a * r * b.transpose()).map(|z| z.re)
}

fn local_expectations(reduced: &CMatrix, basis: &LooBasis) -> Vec<f64> {
    let d = basis.dim();
    basis
        .observables()
        .iter()
        .map(|g| {
            let mut s = ZERO;
            for i in 0..d {
                for k in 0..d {
                    s += reduced[(i, k)] * g[(k, i)];
                }
            }
            s.re
        })
        .collect()
}

/// `(⟨G_l^A ⊗ I⟩_l, ⟨I ⊗ G_m^B⟩_m)`.
pub fn local_expectation_vectors(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(rho, basis_a, basis_b)?;
    let rho_a = rho.partial_trace(Subsystem::B);
    let rho_b = rho.partial_trace(Subsystem::A);
    Ok((local_expectations(rho_a.matrix(), basis_a), local_expectations(rho_b.matrix(), basis_b)))
}

pub fn correlation_matrix(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<CorrelationData> {
    check_dims(rho, basis_a, basis_b)?;
    Ok(CorrelationData::new(CorrelationKind::Mu, joint_expectations(rho, basis_a, basis_b)))
}

pub fn covariance_matrix(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<CorrelationData> {
    let (a, b) = local_expectation_vectors(rho, basis_a, basis_b)?;
    let mut tau = joint_expectations(rho, basis_a, basis_b);
    for (l, al) in a.iter().enumerate() {
        for (m, bm) in b.iter().enumerate() {
            tau[(l, m)] -= al * bm;
        }
    }
    Ok(CorrelationData::new(CorrelationKind::Tau, tau))
}

/// `Tr(Wρ)` for `W = 1 - Σ_k G_k^A ⊗ G_k^B`, pairing the bases index by index.
pub fn linear_witness_value(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<f64> {
    check_dims(rho, basis_a, basis_b)?;
    Ok(1.0 - rect_trace(&joint_expectations(rho, basis_a, basis_b)))
}

/// `F(ρ) = 1 - Σ_k ⟨G_k^A ⊗ G_k^B⟩ - ½ Σ_k ⟨G_k^A ⊗ I - I ⊗ G_k^B⟩²`.
///
/// When the bases differ in length the shorter one is extended with zero
/// operators.
pub fn nonlinear_witness_value(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<f64> {
    let (a, b) = local_expectation_vectors(rho, basis_a, basis_b)?;
    let mu = joint_expectations(rho, basis_a, basis_b);
    let n = a.len().max(b.len());
    let spread: f64 = (0..n)
        .map(|k| {
            let ak = a.get(k).copied().unwrap_or(0.0);
            let bk = b.get(k).copied().unwrap_or(0.0);
            (ak - bk).powi(2)
        })
        .sum();
    Ok(1.0 - rect_trace(&mu) - 0.5 * spread)
}

pub fn witness_value(kind: WitnessKind, rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<f64> {
    match kind {
        WitnessKind::Linear => linear_witness_value(rho, basis_a, basis_b),
        WitnessKind::Nonlinear => nonlinear_witness_value(rho, basis_a, basis_b),
    }
}

/// Minimum of a witness over all LOO pairs, with the pair attaining it.
#[derive(Debug, Clone)]
pub struct OptimalWitness {
    pub kind: WitnessKind,
    pub value: f64,
    pub basis_a: LooBasis,
    pub basis_b: LooBasis,
}

impl OptimalWitness {
    /// `1 - value`: `ℒ_max` for the nonlinear witness, `‖R(ρ)‖` for the
    /// linear one.
    pub fn l_max(&self) -> f64 {
        1.0 - self.value
    }
}

/// Optimizes starting from the given bases. The minimum itself does not
/// depend on the starting pair.
pub fn optimal_witness_from(
    kind: WitnessKind,
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
) -> Result<OptimalWitness> {
    let (data, offset) = match kind {
        WitnessKind::Linear => (correlation_matrix(rho, basis_a, basis_b)?, 0.0),
        WitnessKind::Nonlinear => {
            let purities = rho.reduced_purity(Subsystem::A) + rho.reduced_purity(Subsystem::B);
            (covariance_matrix(rho, basis_a, basis_b)?, 0.5 * purities)
        }
    };
    let (rot_a, rot_b) = data.optimal_rotations();
    Ok(OptimalWitness {
        kind,
        value: 1.0 - data.singular_value_sum() - offset,
        basis_a: rotate(basis_a, &rot_a)?,
        basis_b: rotate(basis_b, &rot_b)?,
    })
}

/// `1 - Σ_k σ_k(μ)` and the operator-Schmidt bases attaining it.
pub fn optimal_linear_min(rho: &DensityMatrix) -> Result<OptimalWitness> {
    optimal_witness_from(WitnessKind::Linear, rho, &canonical_basis(rho.dim_a()), &canonical_basis(rho.dim_b()))
}

/// `1 - Σ_k σ_k(τ) - (Tr ρ_A² + Tr ρ_B²)/2` and the bases attaining it.
pub fn optimal_nonlinear_min(rho: &DensityMatrix) -> Result<OptimalWitness> {
    optimal_witness_from(WitnessKind::Nonlinear, rho, &canonical_basis(rho.dim_a()), &canonical_basis(rho.dim_b()))
}

/// `ℒ_max = (Σ_i √μ_i)²` of a pure state from its Schmidt coefficients `√μ_i`.
pub fn lmax_pure(coefficients: &[f64]) -> Result<f64> {
    let norm_sq: f64 = coefficients.iter().map(|c| c * c).sum();
    if (norm_sq - 1.0).abs() > 1e-10 || coefficients.iter().any(|c| *c < 0.0) {
        return Err(Error::NotNormalized { norm: norm_sq.sqrt() });
    }
    Ok(coefficients.iter().sum::<f64>().powi(2))
}

/// Witness values at a given basis pair next to the optimal ones.
#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub linear_value_at_basis: f64,
    pub linear_min: f64,
    pub nonlinear_value_at_basis: f64,
    pub nonlinear_min: f64,
    pub l_max: f64,
    pub optimal_basis_a: LooBasis,
    pub optimal_basis_b: LooBasis,
    pub purity_a: f64,
    pub purity_b: f64,
}

/// Evaluates both witnesses at `(basis_a, basis_b)` and their optima; the
/// returned bases are the optimal pair for `kind`.
pub fn certify(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    kind: WitnessKind,
) -> Result<WitnessCertificate> {
    let linear = optimal_witness_from(WitnessKind::Linear, rho, basis_a, basis_b)?;
    let nonlinear = optimal_witness_from(WitnessKind::Nonlinear, rho, basis_a, basis_b)?;
    let l_max = nonlinear.l_max();
    let chosen = match kind {
        WitnessKind::Linear => linear.clone(),
        WitnessKind::Nonlinear => nonlinear.clone(),
    };
    Ok(WitnessCertificate {
        linear_value_at_basis: linear_witness_value(rho, basis_a, basis_b)?,
        linear_min: linear.value,
        nonlinear_value_at_basis: nonlinear_witness_value(rho, basis_a, basis_b)?,
        nonlinear_min: nonlinear.value,
        l_max,
        optimal_basis_a: chosen.basis_a,
        optimal_basis_b: chosen.basis_b,
        purity_a: rho.reduced_purity(Subsystem::A),
        purity_b: rho.reduced_purity(Subsystem::B),
    })
}
