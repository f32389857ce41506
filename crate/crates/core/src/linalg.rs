//! Small dense linear-algebra helpers shared by the state, basis and witness
//! modules. Everything works on `nalgebra` dynamic matrices.

use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

pub(crate) const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = Complex { re: 1.0, im: 0.0 };

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Trace norm of a Hermitian matrix, i.e. the sum of |eigenvalues|.
pub fn hermitian_trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

/// Trace norm (Ky Fan norm) of an arbitrary complex matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    jacobi_svd(m).1.iter().sum()
}

/// Thin SVD `a = u · diag(s) · v†` by one-sided (Hestenes) Jacobi rotations.
///
/// `u` is `r x k`, `v` is `c x k` with `k = min(r, c)`, and `s` is sorted in
/// non-increasing order. Columns of `u` belonging to zero singular values, or
/// whose direction is lost in rounding, are left as zero vectors. Real input
/// yields real orthogonal factors.
pub fn jacobi_svd<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> (DMatrix<T>, Vec<f64>, DMatrix<T>) {
    if a.nrows() < a.ncols() {
        // a† = v s u†
        let (u, s, v) = jacobi_svd(&a.adjoint());
        return (v, s, u);
    }
    let (r, c) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<T>::identity(c, c);
    const MAX_SWEEPS: usize = 80;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // phase that makes the (p, q) inner product real and positive
                let phase = gamma.conjugate().unscale(g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..r {
                    let xp = w[(i, p)];
                    let xq = w[(i, q)] * phase;
                    w[(i, p)] = xp.scale(cs) - xq.scale(sn);
                    w[(i, q)] = xp.scale(sn) + xq.scale(cs);
                }
                for i in 0..c {
                    let xp = v[(i, p)];
                    let xq = v[(i, q)] * phase;
                    v[(i, p)] = xp.scale(cs) - xq.scale(sn);
                    v[(i, q)] = xp.scale(sn) + xq.scale(cs);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..c).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = DMatrix::<T>::zeros(r, c);
    let mut v_sorted = DMatrix::<T>::zeros(c, c);
    let mut s = Vec::with_capacity(c);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        if sigma > 0.0 {
            let mut col = w.column(src).unscale(sigma);
            // columns of tiny σ carry rounding noise in their direction;
            // projecting out the better-determined ones keeps u orthonormal
            for _ in 0..2 {
                for k in 0..dst {
                    let proj = u.column(k).dotc(&col);
                    col.axpy(-proj, &u.column(k), T::one());
                }
            }
            let norm = col.norm();
            if norm > 0.5 {
                u.column_mut(dst).copy_from(&col.unscale(norm));
            }
        }
        v_sorted.column_mut(dst).copy_from(&v.column(src));
    }
    (u, s, v_sorted)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Real SVD with both orthogonal factors completed to square matrices.
///
/// Returns `(u, s, v)` with `m = u * diag(s) * vᵀ`, where `u` is `r x r`,
/// `v` is `c x c` and `s` holds the `min(r, c)` singular values in
/// non-increasing order.
pub fn full_svd(m: &RMatrix) -> (RMatrix, Vec<f64>, RMatrix) {
    let (r, c) = m.shape();
    let (u_thin, s, v_thin) = jacobi_svd(m);
    (complete_orthonormal(&u_thin, r), s, complete_orthonormal(&v_thin, c))
}

/// Extends the orthonormal columns of `cols` to an `n x n` orthogonal matrix
/// by Gram-Schmidt against the standard basis. Zero columns are filled in
/// place, so nonzero columns keep their positions.
fn complete_orthonormal(cols: &RMatrix, n: usize) -> RMatrix {
    let mut out = RMatrix::zeros(n, n);
    let mut set = vec![false; n];
    for (j, col) in cols.column_iter().enumerate() {
        if col.norm() > 0.5 {
            out.column_mut(j).copy_from(&col);
            set[j] = true;
        }
    }
    let mut candidate = 0;
    for slot in 0..n {
        if set[slot] {
            continue;
        }
        while candidate < n {
            let mut v = DVector::<f64>::zeros(n);
            v[candidate] = 1.0;
            candidate += 1;
            // two passes of modified Gram-Schmidt keep the result orthogonal to 1e-15
            for _ in 0..2 {
                for j in (0..n).filter(|&j| set[j]) {
                    let q = out.column(j);
                    let proj = q.dot(&v);
                    v.axpy(-proj, &q, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                out.column_mut(slot).copy_from(&(v / norm));
                set[slot] = true;
                break;
            }
        }
    }
    out
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sum of singular values of a real matrix.
pub fn singular_value_sum(m: &RMatrix) -> f64 {
    jacobi_svd(m).1.iter().sum()
}

/// `max |m mᵀ - I|` entrywise.
pub fn orthogonality_residual(m: &RMatrix) -> f64 {
    let prod = m * m.transpose();
    let n = prod.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).abs());
        }
    }
    worst
}

/// Trace of a possibly rectangular matrix (sum over the main diagonal).
pub fn rect_trace(m: &RMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}
