//! Seeded random sampling of states, unitaries and rotations.
//!
//! Pure states are Haar distributed (normalized complex Gaussian vectors);
//! mixed states are reductions of Haar pure states on a larger space.
//! Unitaries and orthogonal matrices come from QR of Gaussian matrices with
//! the phase of the R diagonal divided out.

use nalgebra::{Complex, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, RMatrix, C64, ZERO};
use crate::qstate::{DensityMatrix, Subsystem};

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random normalized vector in dimension `dim`.
pub fn haar_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let norm = v.norm();
    v / Complex::from(norm)
}

/// Haar-random `dim x dim` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / Complex::from(d.norm()) } else { Complex::from(1.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random `n x n` real orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let g = RMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Pure-state projector for a Haar-random vector on `dim_a x dim_b`.
pub fn random_pure_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> DensityMatrix {
    let psi = haar_pure(dim_a * dim_b, rng);
    DensityMatrix::from_pure(dim_a, dim_b, &psi).expect("Haar vector is normalized")
}

/// Mixed state obtained by tracing an ancilla of dimension `dim_a * dim_b`
/// out of a Haar-random pure state (Hilbert-Schmidt measure).
pub fn random_mixed_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> DensityMatrix {
    let n = dim_a * dim_b;
    let psi = haar_pure(n * n, rng);
    let big = DensityMatrix::from_pure(n, n, &psi).expect("Haar vector is normalized");
    let reduced = big.partial_trace(Subsystem::B);
    DensityMatrix::from_parts(dim_a, dim_b, reduced.matrix().clone()).expect("dimensions agree")
}

/// Convex mixture of `terms` random pure product states with random weights.
pub fn random_separable_state<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    terms: usize,
    rng: &mut R,
) -> DensityMatrix {
    assert!(terms >= 1);
    let n = dim_a * dim_b;
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = CMatrix::from_element(n, n, ZERO);
    for w in weights {
        let a = haar_pure(dim_a, rng);
        let b = haar_pure(dim_b, rng);
        let psi = a.kronecker(&b);
        acc += (&psi * psi.adjoint()) * Complex::from(w / total);
    }
    DensityMatrix::from_parts(dim_a, dim_b, acc).expect("dimensions agree")
}

/// Local unitary `U_A ⊗ U_B` with Haar-random factors.
pub fn random_local_unitary<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> CMatrix {
    let ua = haar_unitary(dim_a, rng);
    let ub = haar_unitary(dim_b, rng);
    ua.kronecker(&ub)
}
