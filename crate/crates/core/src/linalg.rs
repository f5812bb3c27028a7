//! Dense complex linear-algebra helpers shared by the Krein-space modules.
//!
//! Everything here works on `DMatrix<C64>` and is deliberately small: thin
//! wrappers around nalgebra's Hermitian eigensolver, Cholesky and LU with the
//! rank and ordering conventions the rest of the crate relies on. Singular
//! values and vectors also go through the eigensolver.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative rank threshold for subspace bases.
pub const RANK_TOL: f64 = 1e-10;

pub fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { c(0.0) })
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| c(data[i * cols + j]))
}

/// Eigen-decomposition of the Jordan-Wielandt matrix `[[0, M], [M*, 0]]`,
/// whose eigenvalues are `+-sigma_k` padded with zeros.
///
/// nalgebra's complex SVD loses its singular vectors on rank-deficient
/// input, while the Hermitian eigensolver stays backward stable.
fn jordan_wielandt(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (n, k) = m.shape();
    let mut h = CMatrix::zeros(n + k, n + k);
    h.view_mut((0, n), (n, k)).copy_from(m);
    h.view_mut((n, 0), (k, n)).copy_from(&m.adjoint());
    hermitian_eigen(&h)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let r = m.nrows().min(m.ncols());
    if r == 0 {
        return Vec::new();
    }
    let (vals, _) = jordan_wielandt(m);
    vals.iter().rev().take(r).map(|&v| v.max(0.0)).collect()
}

/// `M = U diag(s) V*` restricted to singular values above `rel_tol * s_max`,
/// descending.
pub fn thin_svd(m: &CMatrix, rel_tol: f64) -> (CMatrix, Vec<f64>, CMatrix) {
    let (n, k) = m.shape();
    if n == 0 || k == 0 {
        return (CMatrix::zeros(n, 0), Vec::new(), CMatrix::zeros(k, 0));
    }
    let (vals, vecs) = jordan_wielandt(m);
    let top = vals[vals.len() - 1];
    let keep: Vec<usize> = (0..vals.len())
        .rev()
        .take(n.min(k))
        .filter(|&i| top > 0.0 && vals[i] > rel_tol * top)
        .collect();
    let root2 = c(std::f64::consts::SQRT_2);
    let u: Vec<CVector> = keep.iter().map(|&i| vecs.view((0, i), (n, 1)).column(0) * root2).collect();
    let v: Vec<CVector> = keep.iter().map(|&i| vecs.view((n, i), (k, 1)).column(0) * root2).collect();
    let s = keep.iter().map(|&i| vals[i]).collect();
    let stack = |cols: &[CVector], rows: usize| {
        if cols.is_empty() {
            CMatrix::zeros(rows, 0)
        } else {
            CMatrix::from_columns(cols)
        }
    };
    (stack(&u, n), s, stack(&v, k))
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Ratio sigma_min / sigma_max of a square matrix (0 for the zero matrix).
pub fn inverse_condition(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis of the column space, dropping directions whose singular
/// value falls below `rel_tol` times the largest one.
pub fn orthonormal_span(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (u, _, _) = thin_svd(m, rel_tol);
    if u.ncols() == 0 {
        return u;
    }
    // Directions near the cut-off can lose a little orthogonality; a QR pass restores it.
    u.qr().q()
}

pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&v| v >= rel_tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the orthogonal complement of the column space of `m`.
pub fn orthogonal_complement(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let basis = orthonormal_span(m, RANK_TOL);
    if basis.ncols() == 0 {
        return identity(n);
    }
    if basis.ncols() == n {
        return CMatrix::zeros(n, 0);
    }
    let proj = identity(n) - &basis * basis.adjoint();
    let (vals, vecs) = hermitian_eigen(&proj);
    let cols: Vec<CVector> = vals
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v > 0.5)
        .map(|(i, _)| vecs.column(i).into_owned())
        .collect();
    CMatrix::from_columns(&cols)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// The input is symmetrised first so tiny non-Hermitian rounding is ignored.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * c(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<CVector> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (vals, CMatrix::from_columns(&cols))
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Eigenvalues (ascending) of the Hermitian pencil `a x = lambda b x` with `b`
/// positive definite. Returns `None` when the Cholesky factorisation of `b`
/// fails.
pub fn generalized_hermitian_eigenvalues(a: &CMatrix, b: &CMatrix) -> Option<Vec<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let bsym = (b + b.adjoint()) * c(0.5);
    if hermitian_eigenvalues(&bsym)[0] <= 0.0 {
        return None;
    }
    let chol = Cholesky::new(bsym)?;
    let l = chol.l();
    let y = l.solve_lower_triangular(a)?;
    let m = l.solve_lower_triangular(&y.adjoint())?;
    Some(hermitian_eigenvalues(&m))
}

/// Principal angles (ascending) between the column spaces of two orthonormal
/// bases. Uses cosines for large angles and sines for small ones so both
/// ends of the range keep full relative accuracy.
pub fn principal_angles(a: &CMatrix, b: &CMatrix) -> Vec<f64> {
    let k = a.ncols().min(b.ncols());
    if k == 0 {
        return Vec::new();
    }
    let (small, big) = if a.ncols() <= b.ncols() { (a, b) } else { (b, a) };
    let mut cosines = singular_values(&(big.adjoint() * small));
    cosines.truncate(k);
    let residual = small - big * (big.adjoint() * small);
    let mut sines = singular_values(&residual);
    sines.reverse();
    sines.truncate(k);
    cosines
        .iter()
        .zip(sines.iter())
        .map(|(&cs, &sn)| {
            let cs = cs.min(1.0);
            if cs * cs < 0.5 {
                cs.acos()
            } else {
                sn.min(1.0).asin()
            }
        })
        .collect()
}

/// Largest principal angle between two subspaces given by orthonormal bases;
/// pi/2 when the dimensions differ.
pub fn max_principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

pub fn solve(a: &CMatrix, b: &CMatrix) -> Option<CMatrix> {
    a.clone().lu().solve(b)
}

pub fn inverse(a: &CMatrix) -> Option<CMatrix> {
    a.clone().try_inverse()
}

pub fn relative_difference(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.nrows().max(b.nrows());
    let mut out = CMatrix::zeros(rows, a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

pub fn select_columns(m: &CMatrix, idx: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &m.column(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thin_svd_of_rank_deficient_complex_matrix() {
        // rank 2, 7 x 5: nalgebra's complex SVD recomposes this with O(1e-2) error
        let a = CMatrix::from_fn(7, 2, |i, j| C64::new((i + 2 * j) as f64 * 0.3 - 1.0, (i * j) as f64 * 0.1 + 0.2));
        let b = CMatrix::from_fn(2, 5, |i, j| C64::new(1.0 / (1 + i + j) as f64, (i as f64 - j as f64) * 0.25));
        let m = &a * &b;
        let (u, s, v) = thin_svd(&m, RANK_TOL);
        assert_eq!(s.len(), 2);
        let rebuilt = &u * CMatrix::from_diagonal(&CVector::from_iterator(2, s.iter().map(|&x| c(x)))) * v.adjoint();
        assert!(relative_difference(&rebuilt, &m) < 1e-13);
        assert!(relative_difference(&(u.adjoint() * &u), &identity(2)) < 1e-13);
        assert!(relative_difference(&(v.adjoint() * &v), &identity(2)) < 1e-13);
        let sv = singular_values(&m);
        assert_eq!(sv.len(), 5);
        assert!((sv[0] - s[0]).abs() < 1e-13 * s[0] && sv[2] < 1e-13 * s[0]);
        let span = orthonormal_span(&m, RANK_TOL);
        assert!((&m - &span * (span.adjoint() * &m)).norm() < 1e-13 * m.norm());
    }

    #[test]
    fn span_drops_dependent_columns() {
        let m = from_real(3, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let b = orthonormal_span(&m, RANK_TOL);
        assert_eq!(b.ncols(), 2);
        let g = b.adjoint() * &b;
        assert!(relative_difference(&g, &identity(2)) < 1e-14);
    }

    #[test]
    fn complement_of_line_in_plane() {
        let m = from_real(2, 1, &[1.0, 1.0]);
        let comp = orthogonal_complement(&m);
        assert_eq!(comp.ncols(), 1);
        assert!((comp[(0, 0)] + comp[(1, 0)]).norm() < 1e-14);
    }

    #[test]
    fn generalized_pencil_scalar_ratio() {
        let a = from_real(1, 1, &[6.0]);
        let b = from_real(1, 1, &[2.0]);
        let ev = generalized_hermitian_eigenvalues(&a, &b).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14);
        assert!(generalized_hermitian_eigenvalues(&a, &from_real(1, 1, &[-1.0])).is_none());
    }

    #[test]
    fn principal_angle_small_and_large() {
        let t: f64 = 1e-9;
        let a = from_real(2, 1, &[1.0, 0.0]);
        let b = from_real(2, 1, &[t.cos(), t.sin()]);
        let ang = principal_angles(&a, &b);
        assert!((ang[0] - t).abs() < 1e-20);
        let b = from_real(2, 1, &[0.0, 1.0]);
        assert!((principal_angles(&a, &b)[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }
}
