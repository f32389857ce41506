//! Local orthogonal observables (LOOs): complete sets of `d²` Hermitian
//! operators on one subsystem, orthonormal under `Tr(G_k G_l)`.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, orthogonality_residual, CMatrix, RMatrix, C64, ONE, ZERO};
use crate::qstate::DensityMatrix;
use crate::witness::correlation_matrix;

pub const BASIS_TOL: f64 = 1e-10;
pub const ROTATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LooBasis {
    dim: usize,
    observables: Vec<CMatrix>,
}

impl LooBasis {
    /// Checks count, hermiticity and trace orthonormality before wrapping.
    pub fn new(dim: usize, observables: Vec<CMatrix>) -> Result<Self> {
        let basis = LooBasis { dim, observables };
        basis.check()?;
        Ok(basis)
    }

    pub(crate) fn new_unchecked(dim: usize, observables: Vec<CMatrix>) -> Self {
        LooBasis { dim, observables }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[CMatrix] {
        &self.observables
    }

    pub fn get(&self, k: usize) -> &CMatrix {
        &self.observables[k]
    }

    /// Largest deviation of `Tr(G_k G_l)` from `δ_kl`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.observables.len();
        let mut worst = 0.0f64;
        for k in 0..n {
            for l in k..n {
                let g = trace_product(&self.observables[k], &self.observables[l]);
                let target = if k == l { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    pub fn check(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::InvalidBasis("dimension must be positive".into()));
        }
        if self.observables.len() != d * d {
            return Err(Error::InvalidBasis(format!(
                "expected {} observables for d = {d}, got {}",
                d * d,
                self.observables.len()
            )));
        }
        for (k, g) in self.observables.iter().enumerate() {
            if g.shape() != (d, d) {
                return Err(Error::InvalidBasis(format!("observable {k} is {}x{}, expected {d}x{d}", g.nrows(), g.ncols())));
            }
            let h = hermiticity_residual(g);
            if h > BASIS_TOL {
                return Err(Error::InvalidBasis(format!("observable {k} is not Hermitian (residual {h:.3e})")));
            }
        }
        let r = self.orthonormality_residual();
        if r > BASIS_TOL {
            return Err(Error::InvalidBasis(format!("trace orthonormality violated (residual {r:.3e})")));
        }
        Ok(())
    }
}

/// `Tr(A B)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

/// A real orthogonal `d² x d²` matrix relating two complete LOO sets.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalRotation {
    matrix: RMatrix,
}

impl OrthogonalRotation {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!("rotation must be square, got {}x{}", matrix.nrows(), matrix.ncols())));
        }
        let residual = orthogonality_residual(&matrix);
        if residual > ROTATION_TOL {
            return Err(Error::NotOrthogonal { residual });
        }
        Ok(OrthogonalRotation { matrix })
    }

    pub(crate) fn new_unchecked(matrix: RMatrix) -> Self {
        OrthogonalRotation { matrix }
    }

    pub fn identity(n: usize) -> Self {
        OrthogonalRotation { matrix: RMatrix::identity(n, n) }
    }

    /// Diagonal rotation with entries `±1`.
    pub fn signs(signs: &[f64]) -> Result<Self> {
        let n = signs.len();
        Self::new(RMatrix::from_fn(n, n, |i, j| if i == j { signs[i] } else { 0.0 }))
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    /// `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &OrthogonalRotation) -> OrthogonalRotation {
        OrthogonalRotation { matrix: &self.matrix * &other.matrix }
    }
}

/// Generalized Gell-Mann LOOs in a fixed order: the symmetric
/// `(|m⟩⟨n| + |n⟩⟨m|)/√2`, then the antisymmetric `(i|m⟩⟨n| - i|n⟩⟨m|)/√2`,
/// both for `m < n` in lexicographic order, then the projectors `|m⟩⟨m|`.
pub fn gell_mann_basis(d: usize) -> Result<LooBasis> {
    if d < 2 {
        return Err(Error::InvalidBasis(format!("Gell-Mann basis needs d >= 2, got {d}")));
    }
    Ok(canonical_basis(d))
}

/// Starting basis used by the optimizers: Gell-Mann for `d >= 2`, and `{1}`
/// for `d = 1`.
pub fn canonical_basis_for(d: usize) -> LooBasis {
    canonical_basis(d)
}

pub(crate) fn canonical_basis(d: usize) -> LooBasis {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|m| (m + 1..d).map(move |n| (m, n))).collect();
    let mut obs = Vec::with_capacity(d * d);
    for &(m, n) in &pairs {
        let mut g = CMatrix::from_element(d, d, ZERO);
        g[(m, n)] = Complex::from(h);
        g[(n, m)] = Complex::from(h);
        obs.push(g);
    }
    for &(m, n) in &pairs {
        let mut g = CMatrix::from_element(d, d, ZERO);
        g[(m, n)] = Complex::new(0.0, h);
        g[(n, m)] = Complex::new(0.0, -h);
        obs.push(g);
    }
    for m in 0..d {
        let mut g = CMatrix::from_element(d, d, ZERO);
        g[(m, m)] = ONE;
        obs.push(g);
    }
    LooBasis::new_unchecked(d, obs)
}

/// `{σ_x, σ_y, σ_z, I}/√2`.
pub fn pauli_basis() -> LooBasis {
    let h = Complex::from(std::f64::consts::FRAC_1_SQRT_2);
    let i = C64::i();
    let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let y = CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO]);
    let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    let id = CMatrix::identity(2, 2);
    LooBasis::new_unchecked(2, vec![x * h, y * h, z * h, id * h])
}

/// Elementwise transpose of every observable.
pub fn transpose_basis(basis: &LooBasis) -> LooBasis {
    LooBasis::new_unchecked(basis.dim, basis.observables.iter().map(|g| g.transpose()).collect())
}

/// New basis `G̃_k = Σ_l O_kl G_l`.
pub fn rotate(basis: &LooBasis, rotation: &OrthogonalRotation) -> Result<LooBasis> {
    let o = &rotation.matrix;
    let n = basis.len();
    if o.nrows() != n {
        return Err(Error::Dimension(format!("rotation is {}x{} but basis has {n} elements", o.nrows(), o.ncols())));
    }
    let d = basis.dim;
    let obs = (0..n)
        .map(|k| {
            let mut g = CMatrix::from_element(d, d, ZERO);
            for (l, gl) in basis.observables.iter().enumerate() {
                let w = o[(k, l)];
                if w != 0.0 {
                    g += gl * Complex::from(w);
                }
            }
            g
        })
        .collect();
    Ok(LooBasis::new_unchecked(d, obs))
}

/// `ρ = Σ_k σ_k 𝒢_k^A ⊗ 𝒢_k^B` with `σ_k` non-increasing.
#[derive(Debug, Clone)]
pub struct OperatorSchmidt {
    pub singular_values: Vec<f64>,
    pub basis_a: LooBasis,
    pub basis_b: LooBasis,
}

impl OperatorSchmidt {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.basis_a.dim() * self.basis_b.dim();
        let mut out = CMatrix::from_element(d, d, ZERO);
        for (k, s) in self.singular_values.iter().enumerate() {
            out += self.basis_a.get(k).kronecker(self.basis_b.get(k)) * Complex::from(*s);
        }
        out
    }
}

pub fn operator_schmidt(rho: &DensityMatrix) -> Result<OperatorSchmidt> {
    let (da, db) = (rho.dim_a(), rho.dim_b());
    if da != db {
        return Err(Error::Rectangular { dim_a: da, dim_b: db });
    }
    let ga = canonical_basis(da);
    let gb = canonical_basis(db);
    let mu = correlation_matrix(rho, &ga, &gb)?;
    let (rot_a, rot_b) = mu.optimal_rotations();
    Ok(OperatorSchmidt {
        singular_values: mu.singular_values.clone(),
        basis_a: rotate(&ga, &rot_a)?,
        basis_b: rotate(&gb, &rot_b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::qstate::{bell_state, product_state, DensityMatrix, Subsystem};
    use crate::sample::{haar_orthogonal, random_local_unitary, random_mixed_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gell_mann_d2_layout() {
        let b = gell_mann_basis(2).unwrap();
        assert_eq!(b.len(), 4);
        let p = pauli_basis();
        assert_eq!(b.get(0), p.get(0));
        // antisymmetric element is -σ_y/√2 with this sign convention
        assert!((b.get(1) + p.get(1)).norm() < 1e-15);
        assert_eq!(b.get(2)[(0, 0)], ONE);
        assert_eq!(b.get(3)[(1, 1)], ONE);
        b.check().unwrap();
    }

    #[test]
    fn gell_mann_is_orthonormal() {
        for d in 2..=5 {
            let b = gell_mann_basis(d).unwrap();
            assert_eq!(b.len(), d * d);
            b.check().unwrap();
        }
        assert!(gell_mann_basis(1).is_err());
    }

    #[test]
    fn completeness_gives_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=4 {
            let b = gell_mann_basis(d).unwrap();
            let rho_a = random_mixed_state(d, 1, &mut rng);
            let s: f64 = b.observables().iter().map(|g| (rho_a.matrix() * g).trace().re.powi(2)).sum();
            let direct = (rho_a.matrix() * rho_a.matrix()).trace().re;
            assert!((s - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_trace_products() {
        let p = pauli_basis();
        assert!((trace_product(p.get(0), p.get(0)) - ONE).norm() < 1e-15);
        assert!(trace_product(p.get(0), p.get(1)).norm() < 1e-15);
        p.check().unwrap();
    }

    #[test]
    fn flipped_pauli_via_sign_rotation() {
        let flip = OrthogonalRotation::signs(&[1.0, -1.0, 1.0, 1.0]).unwrap();
        let b = rotate(&pauli_basis(), &flip).unwrap();
        let p = pauli_basis();
        assert_eq!(b.get(0), p.get(0));
        assert_eq!(b.get(1), &(-p.get(1)));
        assert_eq!(b.get(3), p.get(3));
    }

    #[test]
    fn transpose_flips_antisymmetric_elements() {
        let b = gell_mann_basis(2).unwrap();
        let t = transpose_basis(&b);
        assert_eq!(t.get(0), b.get(0));
        assert_eq!(t.get(1), &(-b.get(1)));
        assert_eq!(t.get(2), b.get(2));
        assert_eq!(transpose_basis(&t), b);
    }

    #[test]
    fn random_rotations_preserve_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = gell_mann_basis(3).unwrap();
        for _ in 0..10 {
            let o = OrthogonalRotation::new(haar_orthogonal(9, &mut rng)).unwrap();
            let r = rotate(&b, &o).unwrap();
            assert!(r.orthonormality_residual() < 1e-9);
            assert!(transpose_basis(&r).orthonormality_residual() < 1e-9);
        }
        assert_eq!(rotate(&b, &OrthogonalRotation::identity(9)).unwrap(), b);
    }

    #[test]
    fn rotation_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = gell_mann_basis(2).unwrap();
        let o1 = OrthogonalRotation::new(haar_orthogonal(4, &mut rng)).unwrap();
        let o2 = OrthogonalRotation::new(haar_orthogonal(4, &mut rng)).unwrap();
        let twice = rotate(&rotate(&b, &o1).unwrap(), &o2).unwrap();
        let once = rotate(&b, &o2.compose(&o1)).unwrap();
        for k in 0..4 {
            assert!(max_abs(&(twice.get(k) - once.get(k))) < 1e-10);
        }
    }

    #[test]
    fn non_orthogonal_rotation_rejected() {
        let m = RMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        match OrthogonalRotation::new(m) {
            Err(Error::NotOrthogonal { residual }) => assert!(residual > 0.09),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn local_purity_sum_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = random_mixed_state(3, 3, &mut rng);
        let purity_a = rho.reduced_purity(Subsystem::A);
        let b = gell_mann_basis(3).unwrap();
        let o = OrthogonalRotation::new(haar_orthogonal(9, &mut rng)).unwrap();
        for basis in [b.clone(), rotate(&b, &o).unwrap()] {
            let s: f64 = basis
                .observables()
                .iter()
                .map(|g| (rho.matrix() * g.kronecker(&CMatrix::identity(3, 3))).trace().re.powi(2))
                .sum();
            assert!((s - purity_a).abs() < 1e-9);
        }
    }

    #[test]
    fn operator_schmidt_examples() {
        let os = operator_schmidt(&bell_state()).unwrap();
        for s in &os.singular_values {
            assert!((s - 0.5).abs() < 1e-12);
        }
        os.basis_a.check().unwrap();
        os.basis_b.check().unwrap();
        assert!(max_abs(&(os.reconstruct() - bell_state().matrix())) < 1e-8);

        let os = operator_schmidt(&product_state()).unwrap();
        assert!((os.singular_values[0] - 1.0).abs() < 1e-12);
        assert!(os.singular_values[1..].iter().all(|s| s.abs() < 1e-12));

        let os = operator_schmidt(&DensityMatrix::maximally_mixed(3, 3)).unwrap();
        assert!((os.singular_values[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(os.singular_values[1..].iter().all(|s| s.abs() < 1e-12));

        let rect = DensityMatrix::maximally_mixed(2, 3);
        assert!(matches!(operator_schmidt(&rect), Err(Error::Rectangular { .. })));
    }

    #[test]
    fn operator_schmidt_random_reconstruction_and_lu_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let rho = random_mixed_state(3, 3, &mut rng);
            let os = operator_schmidt(&rho).unwrap();
            assert!(max_abs(&(os.reconstruct() - rho.matrix())) < 1e-8);
            os.basis_a.check().unwrap();
            os.basis_b.check().unwrap();
            let u = random_local_unitary(3, 3, &mut rng);
            let os2 = operator_schmidt(&rho.conjugated(&u)).unwrap();
            for (a, b) in os.singular_values.iter().zip(&os2.singular_values) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
