//! Independent checks for the closed-form optima.
//!
//! Nothing here calls into the witness module: operators are expanded into
//! explicit Kronecker products and traced element by element, and the trace
//! maximum is attacked by plain random search over orthogonal pairs.

use nalgebra::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::linalg::{singular_value_sum, CMatrix, RMatrix};
use crate::loo::LooBasis;
use crate::qstate::DensityMatrix;
use crate::sample::haar_orthogonal;
use crate::witness::WitnessKind;

/// Samples per deterministic RNG stream.
pub const SHARD_SIZE: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub target: String,
    pub analytic_value: f64,
    pub best_sampled: f64,
    pub samples: usize,
    pub seed: u64,
    /// `analytic_value - best_sampled`; never below `-1e-9`.
    pub gap: f64,
}

fn trace_u_m_vt(u: &RMatrix, m: &RMatrix, v: &RMatrix) -> f64 {
    let k_max = m.nrows().min(m.ncols());
    let mut s = 0.0;
    for k in 0..k_max {
        for l in 0..m.nrows() {
            let ukl = u[(k, l)];
            for j in 0..m.ncols() {
                s += ukl * m[(l, j)] * v[(k, j)];
            }
        }
    }
    s
}

/// Random search for `max Tr(U M Vᵀ)` over orthogonal `U`, `V`.
///
/// Samples are split into shards of [`SHARD_SIZE`]; shard `c` draws from the
/// ChaCha stream `c` of `seed`, so the result is identical for every
/// execution mode and a larger `samples` always extends a smaller run.
pub fn sampled_max_trace(m: &RMatrix, samples: usize, seed: u64, mode: ExecMode) -> Result<OracleReport> {
    if samples == 0 {
        return Err(Error::Parse("oracle needs at least one sample".into()));
    }
    let (r, c) = m.shape();
    let shards = samples.div_ceil(SHARD_SIZE);
    let best_per_shard = exec::map_range(mode, shards, |shard| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard as u64);
        let count = SHARD_SIZE.min(samples - shard * SHARD_SIZE);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..count {
            let u = haar_orthogonal(r, &mut rng);
            let v = haar_orthogonal(c, &mut rng);
            best = best.max(trace_u_m_vt(&u, m, &v));
        }
        best
    });
    let best_sampled = best_per_shard.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let analytic_value = singular_value_sum(m);
    Ok(OracleReport {
        target: format!("max Tr(U M Vᵀ), M {r}x{c}"),
        analytic_value,
        best_sampled,
        samples,
        seed,
        gap: analytic_value - best_sampled,
    })
}

fn kron_explicit(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `Tr(ρ X)` summed entry by entry.
fn expectation(rho: &CMatrix, x: &CMatrix) -> f64 {
    let n = rho.nrows();
    let mut s = Complex::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            s += rho[(i, j)] * x[(j, i)];
        }
    }
    s.re
}

/// Witness value computed straight from its definition, with the shorter
/// basis padded by zero operators.
pub fn recompute_witness_direct(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    kind: WitnessKind,
) -> Result<f64> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    if basis_a.dim() != da || basis_b.dim() != db {
        return Err(Error::Dimension(format!(
            "bases act on {}x{} but the state is {da}x{db}",
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    let zero_a = CMatrix::zeros(da, da);
    let zero_b = CMatrix::zeros(db, db);
    let id_a = CMatrix::identity(da, da);
    let id_b = CMatrix::identity(db, db);
    let m = rho.matrix();
    let n = basis_a.len().max(basis_b.len());
    let mut joint = 0.0;
    let mut spread = 0.0;
    for k in 0..n {
        let ga = basis_a.observables().get(k).unwrap_or(&zero_a);
        let gb = basis_b.observables().get(k).unwrap_or(&zero_b);
        joint += expectation(m, &kron_explicit(ga, gb));
        if kind == WitnessKind::Nonlinear {
            let diff: CMatrix = kron_explicit(ga, &id_b) - kron_explicit(&id_a, gb);
            spread += expectation(m, &diff).powi(2);
        }
    }
    Ok(1.0 - joint - 0.5 * spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loo::{gell_mann_basis, pauli_basis, rotate, OrthogonalRotation};
    use crate::qstate::bell_state;
    use crate::sample::random_mixed_state;
    use crate::witness::{linear_witness_value, nonlinear_witness_value};
    use nalgebra::DVector;
    use rand::Rng;

    #[test]
    fn identity_target() {
        let r = sampled_max_trace(&RMatrix::identity(2, 2), 500, 1, ExecMode::Sequential).unwrap();
        assert!((r.analytic_value - 2.0).abs() < 1e-12);
        assert!(r.best_sampled <= 2.0 + 1e-12);
        assert!(r.gap >= -1e-9);
    }

    #[test]
    fn bell_mu_target() {
        let m = RMatrix::from_diagonal(&DVector::from_vec(vec![0.5, -0.5, 0.5, 0.5]));
        let r = sampled_max_trace(&m, 1000, 2, ExecMode::default()).unwrap();
        assert!((r.analytic_value - 2.0).abs() < 1e-12);
        assert!(r.gap >= -1e-9);
    }

    #[test]
    fn modes_and_reruns_are_bitwise_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = RMatrix::from_fn(4, 9, |_, _| rng.random::<f64>() - 0.5);
        let a = sampled_max_trace(&m, 1000, 99, ExecMode::Sequential).unwrap();
        let b = sampled_max_trace(&m, 1000, 99, ExecMode::Parallel).unwrap();
        let c = sampled_max_trace(&m, 1000, 99, ExecMode::Parallel).unwrap();
        assert_eq!(a.best_sampled.to_bits(), b.best_sampled.to_bits());
        assert_eq!(b, c);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(sampled_max_trace(&RMatrix::identity(2, 2), 0, 0, ExecMode::Sequential).is_err());
    }

    #[test]
    fn direct_recompute_matches_bell_values() {
        let flipped = rotate(&pauli_basis(), &OrthogonalRotation::signs(&[1.0, -1.0, 1.0, 1.0]).unwrap()).unwrap();
        let v = recompute_witness_direct(&bell_state(), &pauli_basis(), &pauli_basis(), WitnessKind::Linear).unwrap();
        assert!(v.abs() < 1e-12);
        let v = recompute_witness_direct(&bell_state(), &pauli_basis(), &flipped, WitnessKind::Nonlinear).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
    }

    #[test]
    fn direct_recompute_matches_witness_module() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let rho = random_mixed_state(da, db, &mut rng);
            let oa = OrthogonalRotation::new(haar_orthogonal(da * da, &mut rng)).unwrap();
            let ob = OrthogonalRotation::new(haar_orthogonal(db * db, &mut rng)).unwrap();
            let ba = rotate(&gell_mann_basis(da).unwrap(), &oa).unwrap();
            let bb = rotate(&gell_mann_basis(db).unwrap(), &ob).unwrap();
            let lin = recompute_witness_direct(&rho, &ba, &bb, WitnessKind::Linear).unwrap();
            let nl = recompute_witness_direct(&rho, &ba, &bb, WitnessKind::Nonlinear).unwrap();
            assert!((lin - linear_witness_value(&rho, &ba, &bb).unwrap()).abs() < 1e-10);
            assert!((nl - nonlinear_witness_value(&rho, &ba, &bb).unwrap()).abs() < 1e-10);
        }
    }
}
