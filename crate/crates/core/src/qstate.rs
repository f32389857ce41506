//! Bipartite density matrices: validation, reductions, Schmidt decomposition
//! and the named states used throughout the crate.
//!
//! Matrices live on `H_A ⊗ H_B` with the A-major product index `i * dim_b + j`
//! for the basis vector `|i⟩_A |j⟩_B`.

use std::fmt;

use nalgebra::{Complex, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, hermitian_eigenvalues, jacobi_svd, CMatrix, C64, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A failed density-matrix invariant together with the measured residual.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotHermitian { residual: f64 },
    TraceNotOne { residual: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotHermitian { residual } => {
                write!(f, "hermiticity: max |ρ - ρ†| = {residual:.3e} > {HERMITIAN_TOL:e}")
            }
            Violation::TraceNotOne { residual } => {
                write!(f, "unit trace: |Tr ρ - 1| = {residual:.3e} > {TRACE_TOL:e}")
            }
            Violation::NotPositive { min_eigenvalue } => {
                write!(f, "positivity: smallest eigenvalue {min_eigenvalue:.3e} < -{PSD_TOL:e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    data: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix, checking only its shape. Use [`DensityMatrix::validate`]
    /// for the physical invariants.
    pub fn from_parts(dim_a: usize, dim_b: usize, data: CMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension(format!("subsystem dimensions must be positive, got {dim_a}x{dim_b}")));
        }
        let n = dim_a * dim_b;
        if data.shape() != (n, n) {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but dims {dim_a}x{dim_b} need {n}x{n}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(DensityMatrix { dim_a, dim_b, data })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn from_pure(dim_a: usize, dim_b: usize, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != dim_a * dim_b {
            return Err(Error::Dimension(format!(
                "vector has length {} but dims {dim_a}x{dim_b} need {}",
                psi.len(),
                dim_a * dim_b
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_parts(dim_a, dim_b, psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        let data = CMatrix::identity(n, n) * Complex::from(1.0 / n as f64);
        DensityMatrix { dim_a, dim_b, data }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total Hilbert-space dimension `dim_a * dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    /// Checks hermiticity, unit trace and positivity. An empty list means the
    /// matrix is a valid state.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let herm = hermiticity_residual(&self.data);
        if herm > HERMITIAN_TOL {
            out.push(Violation::NotHermitian { residual: herm });
        }
        let trace = self.data.trace();
        let tr_residual = (trace - Complex::from(1.0)).norm();
        if tr_residual > TRACE_TOL {
            out.push(Violation::TraceNotOne { residual: tr_residual });
        }
        // eigenvalues of the Hermitian part; non-hermiticity is reported above
        let sym = (&self.data + self.data.adjoint()) * Complex::from(0.5);
        let min_ev = hermitian_eigenvalues(&sym)[0];
        if min_ev < -PSD_TOL {
            out.push(Violation::NotPositive { min_eigenvalue: min_ev });
        }
        out
    }

    /// Returns `self` if it passes [`DensityMatrix::validate`].
    pub fn validated(self) -> Result<Self> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidState(violations))
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }

    /// Reduced state after tracing out `traced`. The result is a single-party
    /// state stored with dims `(d, 1)`, where `d` is the remaining dimension.
    pub fn partial_trace(&self, traced: Subsystem) -> DensityMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        let data = match traced {
            Subsystem::B => CMatrix::from_fn(da, da, |i, k| {
                (0..db).map(|j| self.data[(self.idx(i, j), self.idx(k, j))]).sum()
            }),
            Subsystem::A => CMatrix::from_fn(db, db, |j, l| {
                (0..da).map(|i| self.data[(self.idx(i, j), self.idx(i, l))]).sum()
            }),
        };
        let d = data.nrows();
        DensityMatrix { dim_a: d, dim_b: 1, data }
    }

    /// `Tr ρ_X²` for the reduced state on `kept`.
    pub fn reduced_purity(&self, kept: Subsystem) -> f64 {
        let traced = match kept {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        };
        self.partial_trace(traced).purity()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ ρ) = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Partial transpose on `sub`. Entries are permuted, never recomputed, so
    /// applying it twice returns the original matrix bit for bit.
    pub fn partial_transpose(&self, sub: Subsystem) -> CMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        let n = self.dim();
        let mut out = CMatrix::from_element(n, n, ZERO);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        let v = self.data[(self.idx(i, j), self.idx(k, l))];
                        let (r, c) = match sub {
                            Subsystem::A => (self.idx(k, j), self.idx(i, l)),
                            Subsystem::B => (self.idx(i, l), self.idx(k, j)),
                        };
                        out[(r, c)] = v;
                    }
                }
            }
        }
        out
    }

    /// Realigned matrix `R(ρ)` of size `dim_a² x dim_b²`, with
    /// `R[(i,k),(j,l)] = ρ[(i,j),(k,l)]`.
    pub fn realign(&self) -> CMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        let mut out = CMatrix::from_element(da * da, db * db, ZERO);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        out[(i * da + k, j * db + l)] = self.data[(self.idx(i, j), self.idx(k, l))];
                    }
                }
            }
        }
        out
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn conjugated(&self, u: &CMatrix) -> DensityMatrix {
        let data = u * &self.data * u.adjoint();
        DensityMatrix { data, ..*self }
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange(p));
        }
        if (self.dim_a, self.dim_b) != (other.dim_a, other.dim_b) {
            return Err(Error::Dimension(format!(
                "cannot mix {}x{} with {}x{}",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )));
        }
        let data = &self.data * Complex::from(p) + &other.data * Complex::from(1.0 - p);
        Ok(DensityMatrix { data, ..*self })
    }

    /// Dominant eigenvector of a pure state, for states with
    /// `Tr ρ² >= 1 - 1e-8`.
    pub fn to_pure_vector(&self) -> Result<DVector<C64>> {
        let purity = self.purity();
        if purity < 1.0 - PURITY_TOL {
            return Err(Error::NotPure { purity });
        }
        let eig = SymmetricEigen::new(self.data.clone());
        let top = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(top).into_owned();
        Ok(v.normalize())
    }
}

/// Schmidt form `|ψ⟩ = Σ_k c_k |a_k⟩|b_k⟩` with `c_k` non-increasing.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub basis_a: Vec<DVector<C64>>,
    pub basis_b: Vec<DVector<C64>>,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> DVector<C64> {
        let da = self.basis_a.first().map_or(0, |v| v.len());
        let db = self.basis_b.first().map_or(0, |v| v.len());
        let mut psi = DVector::from_element(da * db, ZERO);
        for ((c, a), b) in self.coefficients.iter().zip(&self.basis_a).zip(&self.basis_b) {
            psi += a.kronecker(b) * Complex::from(*c);
        }
        psi
    }
}

pub fn schmidt(psi: &DVector<C64>, dim_a: usize, dim_b: usize) -> Result<SchmidtDecomposition> {
    if psi.len() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
        return Err(Error::Dimension(format!(
            "vector has length {} but dims {dim_a}x{dim_b} need {}",
            psi.len(),
            dim_a * dim_b
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    // ψ reshaped to M[i, j] = ψ[i * dim_b + j] = Σ_k s_k u_k[i] conj(v_k[j])
    let m = CMatrix::from_fn(dim_a, dim_b, |i, j| psi[i * dim_b + j]);
    let (u, coefficients, v) = jacobi_svd(&m);
    let r = coefficients.len();
    Ok(SchmidtDecomposition {
        coefficients,
        basis_a: (0..r).map(|k| u.column(k).into_owned()).collect(),
        basis_b: (0..r).map(|k| v.column(k).map(|z| z.conj())).collect(),
    })
}

fn ket(dim_a: usize, dim_b: usize, amps: &[((usize, usize), f64)]) -> DVector<C64> {
    let mut v = DVector::from_element(dim_a * dim_b, ZERO);
    for &((i, j), a) in amps {
        v[i * dim_b + j] += Complex::from(a);
    }
    v
}

fn product_ket(a: &[f64], b: &[f64]) -> DVector<C64> {
    let va = DVector::from_iterator(a.len(), a.iter().map(|&x| Complex::from(x)));
    let vb = DVector::from_iterator(b.len(), b.iter().map(|&x| Complex::from(x)));
    va.kronecker(&vb)
}

fn projector(v: &DVector<C64>) -> CMatrix {
    v * v.adjoint()
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_state() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ket(2, 2, &[((0, 0), h), ((1, 1), h)]);
    DensityMatrix::from_parts(2, 2, projector(&psi)).expect("2x2")
}

/// `(|01⟩ - |10⟩)/√2` as a projector.
pub fn singlet_state() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = ket(2, 2, &[((0, 1), h), ((1, 0), -h)]);
    DensityMatrix::from_parts(2, 2, projector(&psi)).expect("2x2")
}

/// `|00⟩⟨00|` on two qubits.
pub fn product_state() -> DensityMatrix {
    let psi = ket(2, 2, &[((0, 0), 1.0)]);
    DensityMatrix::from_parts(2, 2, projector(&psi)).expect("2x2")
}

/// Maximally entangled `Σ_i |ii⟩/√d`.
pub fn maximally_entangled(dim: usize) -> DensityMatrix {
    let a = 1.0 / (dim as f64).sqrt();
    let amps: Vec<_> = (0..dim).map(|i| ((i, i), a)).collect();
    DensityMatrix::from_parts(dim, dim, projector(&ket(dim, dim, &amps))).expect("square")
}

/// `p |ψ_s⟩⟨ψ_s| + (1 - p)(2/3 |00⟩⟨00| + 1/3 |01⟩⟨01|)`.
pub fn noisy_singlet(p: f64) -> Result<DensityMatrix> {
    let mut sep = CMatrix::from_element(4, 4, ZERO);
    sep[(0, 0)] = Complex::from(2.0 / 3.0);
    sep[(1, 1)] = Complex::from(1.0 / 3.0);
    let sep = DensityMatrix::from_parts(2, 2, sep)?;
    singlet_state().mix(p, &sep)
}

/// The 3x3 bound entangled state built from the five-element "tiles"
/// unextendible product basis: `(I - Σ_i |ψ_i⟩⟨ψ_i|)/4`.
pub fn upb_state() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3.0f64.sqrt();
    let tiles = [
        product_ket(&[1.0, 0.0, 0.0], &[h, -h, 0.0]),
        product_ket(&[h, -h, 0.0], &[0.0, 0.0, 1.0]),
        product_ket(&[0.0, 0.0, 1.0], &[0.0, h, -h]),
        product_ket(&[0.0, h, -h], &[1.0, 0.0, 0.0]),
        product_ket(&[t, t, t], &[t, t, t]),
    ];
    let mut data = CMatrix::identity(9, 9);
    for psi in &tiles {
        data -= projector(psi);
    }
    data *= Complex::from(0.25);
    DensityMatrix::from_parts(3, 3, data).expect("3x3")
}

/// `p ρ_upb + (1 - p) I/9`.
pub fn upb_noise(p: f64) -> Result<DensityMatrix> {
    upb_state().mix(p, &DensityMatrix::maximally_mixed(3, 3))
}

/// `p |ψ_s⟩⟨ψ_s| + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    singlet_state().mix(p, &DensityMatrix::maximally_mixed(2, 2))
}

/// `p |Φ_d⟩⟨Φ_d| + (1 - p) I/d²`.
pub fn isotropic(dim: usize, p: f64) -> Result<DensityMatrix> {
    maximally_entangled(dim).mix(p, &DensityMatrix::maximally_mixed(dim, dim))
}

/// Optional parameters accepted by [`make_state`].
#[derive(Debug, Clone, Copy, Default)]
pub struct StateParams {
    pub p: Option<f64>,
    pub dim: Option<usize>,
}

/// Names understood by [`make_state`].
pub const STATE_NAMES: &[&str] = &[
    "bell",
    "singlet",
    "product",
    "noisy_singlet",
    "upb",
    "upb_noise",
    "werner",
    "isotropic",
    "maximally_entangled",
    "maximally_mixed",
];

/// Builds a named state. Families with a mixing weight need `params.p`;
/// `isotropic`, `maximally_entangled` and `maximally_mixed` take
/// `params.dim` (default 2).
pub fn make_state(name: &str, params: StateParams) -> Result<DensityMatrix> {
    let need_p = || {
        params.p.ok_or_else(|| Error::MissingParameter { state: name.to_string(), param: "p" })
    };
    if let Some(p) = params.p {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange(p));
        }
    }
    let dim = params.dim.unwrap_or(2);
    if dim == 0 {
        return Err(Error::Dimension("dim must be positive".into()));
    }
    match name {
        "bell" => Ok(bell_state()),
        "singlet" => Ok(singlet_state()),
        "product" => Ok(product_state()),
        "noisy_singlet" => noisy_singlet(need_p()?),
        "upb" => Ok(upb_state()),
        "upb_noise" => upb_noise(need_p()?),
        "werner" => werner(need_p()?),
        "isotropic" => isotropic(dim, need_p()?),
        "maximally_entangled" => Ok(maximally_entangled(dim)),
        "maximally_mixed" => Ok(DensityMatrix::maximally_mixed(dim, dim)),
        other => Err(Error::UnknownState(other.to_string())),
    }
}
