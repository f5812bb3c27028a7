//! Finite-dimensional Krein spaces.
//!
//! A [`SignatureSpace`] is `C^n` with the usual inner product `(f,g) = g* f`
//! and a fundamental symmetry `J` (Hermitian, `J^2 = I`). The indefinite
//! product is `[f,g] = (Jf, g)`; it is linear in the first argument.

use std::fmt;

use crate::error::{KreinError, Result};
use crate::linalg::{self, c, CMatrix, CVector, C64, RANK_TOL};

/// Tolerance for the involution and symmetry checks on `J`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues of the indefinite Gram below this fraction of its norm count as zero.
pub const NEUTRAL_TOL: f64 = 1e-10;

/// A vector of a Krein space, stored by its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct KVector(CVector);

impl KVector {
    pub fn new(coords: CVector) -> Self {
        KVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        KVector(CVector::zeros(dim))
    }

    pub fn from_real(values: &[f64]) -> Self {
        KVector(CVector::from_iterator(values.len(), values.iter().map(|&x| c(x))))
    }

    pub fn from_complex(values: &[C64]) -> Self {
        KVector(CVector::from_column_slice(values))
    }

    /// The k-th standard basis vector of `C^dim`.
    pub fn unit(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0);
        KVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    /// Norm of the associated Hilbert space.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: C64) -> KVector {
        KVector(&self.0 * s)
    }
}

impl From<CVector> for KVector {
    fn from(v: CVector) -> Self {
        KVector(v)
    }
}

/// A subspace, held as an orthonormal basis of its column space.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Builds a subspace from linearly independent columns.
    pub fn new(basis: CMatrix) -> Result<Self> {
        let k = basis.ncols();
        let rank = linalg::numerical_rank(&basis, RANK_TOL);
        if rank < k {
            return Err(KreinError::RankDeficient { rank, k });
        }
        Ok(Subspace { basis: linalg::orthonormal_span(&basis, RANK_TOL) })
    }

    /// Column span of arbitrary (possibly dependent) vectors.
    pub fn span(vectors: &CMatrix) -> Self {
        Subspace { basis: linalg::orthonormal_span(vectors, RANK_TOL) }
    }

    pub fn from_vectors(dim: usize, vectors: &[KVector]) -> Result<Self> {
        for v in vectors {
            KreinError::check_dim(dim, v.dim())?;
        }
        let cols: Vec<CVector> = vectors.iter().map(|v| v.coords().clone()).collect();
        if cols.is_empty() {
            return Ok(Subspace::zero(dim));
        }
        Subspace::new(CMatrix::from_columns(&cols))
    }

    pub fn zero(dim: usize) -> Self {
        Subspace { basis: CMatrix::zeros(dim, 0) }
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Orthonormal basis (columns).
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Distance of `v` from the subspace, relative to `|v|`.
    pub fn relative_distance(&self, v: &CVector) -> f64 {
        let n = v.norm();
        if n == 0.0 {
            return 0.0;
        }
        let residual = v - &self.basis * (self.basis.adjoint() * v);
        residual.norm() / n
    }

    /// Largest principal angle to another subspace (pi/2 if dimensions differ).
    pub fn max_angle_to(&self, other: &Subspace) -> f64 {
        linalg::max_principal_angle(&self.basis, &other.basis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    Positive,
    Negative,
    Neutral,
    Indefinite,
}

impl fmt::Display for SubspaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubspaceKind::Positive => "positive",
            SubspaceKind::Negative => "negative",
            SubspaceKind::Neutral => "neutral",
            SubspaceKind::Indefinite => "indefinite",
        };
        f.write_str(s)
    }
}

/// Result of [`SignatureSpace::classify_subspace`].
///
/// `margin` is the uniform-definiteness constant: the largest `alpha` with
/// `+-[f,f] >= alpha (f,f)` on the subspace. A semi-definite subspace (some
/// directions numerically neutral) keeps its sign but gets margin 0 and
/// `degenerate = true`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceClass {
    pub kind: SubspaceKind,
    pub margin: f64,
    pub degenerate: bool,
}

impl SubspaceClass {
    pub fn is_definite(&self) -> bool {
        matches!(self.kind, SubspaceKind::Positive | SubspaceKind::Negative)
    }

    pub fn is_uniformly_definite(&self) -> bool {
        self.is_definite() && !self.degenerate && self.margin > 0.0
    }
}

/// `C^n` with a fundamental symmetry `J` and cached bases of `H+` and `H-`.
#[derive(Debug, Clone)]
pub struct SignatureSpace {
    j: CMatrix,
    plus: CMatrix,
    minus: CMatrix,
}

impl SignatureSpace {
    /// Validates `J` and diagonalises it once.
    pub fn new(j: CMatrix) -> Result<Self> {
        validate_involution(&j)?;
        let (vals, vecs) = linalg::hermitian_eigen(&j);
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (i, &lambda) in vals.iter().enumerate() {
            if (lambda - 1.0).abs() < 1e-8 {
                plus.push(vecs.column(i).into_owned());
            } else if (lambda + 1.0).abs() < 1e-8 {
                minus.push(vecs.column(i).into_owned());
            } else {
                return Err(KreinError::InvalidSymmetry(format!("eigenvalue {lambda} is not +-1")));
            }
        }
        let n = j.nrows();
        Ok(SignatureSpace {
            j,
            plus: columns_or_empty(n, &plus),
            minus: columns_or_empty(n, &minus),
        })
    }

    /// Uses caller-supplied orthonormal eigenbases of `H+` and `H-`.
    pub fn from_parts(j: CMatrix, plus: CMatrix, minus: CMatrix) -> Result<Self> {
        validate_involution(&j)?;
        let n = j.nrows();
        if plus.nrows() != n || minus.nrows() != n || plus.ncols() + minus.ncols() != n {
            return Err(KreinError::InvalidSymmetry("eigenbasis shapes do not match J".into()));
        }
        let u = linalg::hstack(&plus, &minus);
        let tol = SYMMETRY_TOL * n.max(1) as f64;
        if linalg::max_abs(&(u.adjoint() * &u - linalg::identity(n))) > tol {
            return Err(KreinError::InvalidSymmetry("eigenbasis is not orthonormal".into()));
        }
        if linalg::max_abs(&(&j * &plus - &plus)) > tol || linalg::max_abs(&(&j * &minus + &minus)) > tol {
            return Err(KreinError::InvalidSymmetry("supplied bases are not +-1 eigenvectors".into()));
        }
        Ok(SignatureSpace { j, plus, minus })
    }

    /// `J = diag(I_p, -I_q)`.
    pub fn diagonal(p: usize, q: usize) -> Self {
        let n = p + q;
        let signs: Vec<f64> = (0..n).map(|i| if i < p { 1.0 } else { -1.0 }).collect();
        let id = linalg::identity(n);
        SignatureSpace {
            j: linalg::real_diagonal(&signs),
            plus: id.columns(0, p).into_owned(),
            minus: id.columns(p, q).into_owned(),
        }
    }

    /// The Hilbert space itself, viewed as a Krein space with `J = I`.
    pub fn euclidean(n: usize) -> Self {
        SignatureSpace::diagonal(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    /// Dimension of `H+`.
    pub fn p(&self) -> usize {
        self.plus.ncols()
    }

    /// Dimension of `H-`.
    pub fn q(&self) -> usize {
        self.minus.ncols()
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    pub fn plus_basis(&self) -> &CMatrix {
        &self.plus
    }

    pub fn minus_basis(&self) -> &CMatrix {
        &self.minus
    }

    /// Unitary `[H+ | H-]` that brings `J` to `diag(I_p, -I_q)`.
    pub fn adapted_basis(&self) -> CMatrix {
        linalg::hstack(&self.plus, &self.minus)
    }

    pub fn h_plus(&self) -> Subspace {
        Subspace { basis: self.plus.clone() }
    }

    pub fn h_minus(&self) -> Subspace {
        Subspace { basis: self.minus.clone() }
    }

    pub fn apply_j(&self, f: &KVector) -> Result<KVector> {
        KreinError::check_dim(self.dim(), f.dim())?;
        Ok(KVector(&self.j * f.coords()))
    }

    /// `[f,g] = (Jf, g)`.
    pub fn indefinite_inner(&self, f: &KVector, g: &KVector) -> Result<C64> {
        KreinError::check_dim(self.dim(), f.dim())?;
        KreinError::check_dim(self.dim(), g.dim())?;
        Ok(g.coords().dotc(&(&self.j * f.coords())))
    }

    /// Indefinite Gram matrix `G[i,j] = [a_j, a_i]` of the columns of `a`, i.e. `a* J a`.
    pub fn indefinite_gram(&self, a: &CMatrix) -> CMatrix {
        a.adjoint() * &self.j * a
    }

    /// `A+ = J A* J`, the adjoint with respect to `[.,.]`.
    pub fn j_adjoint(&self, a: &CMatrix) -> Result<CMatrix> {
        KreinError::check_dim(self.dim(), a.nrows())?;
        KreinError::check_dim(self.dim(), a.ncols())?;
        Ok(&self.j * a.adjoint() * &self.j)
    }

    pub fn classify_subspace(&self, l: &Subspace) -> Result<SubspaceClass> {
        KreinError::check_dim(self.dim(), l.ambient_dim())?;
        if l.is_zero() {
            return Err(KreinError::EmptySubspace);
        }
        // The basis is orthonormal, so the pencil (B*JB, B*B) reduces to B*JB.
        let lambdas = linalg::hermitian_eigenvalues(&self.indefinite_gram(l.basis()));
        // Orthonormal basis and unitary J keep every eigenvalue in [-1, 1].
        let tol = NEUTRAL_TOL;
        let pos = lambdas.iter().filter(|&&x| x > tol).count();
        let neg = lambdas.iter().filter(|&&x| x < -tol).count();
        let zero = lambdas.len() - pos - neg;
        let class = match (pos, neg) {
            (0, 0) => SubspaceClass { kind: SubspaceKind::Neutral, margin: 0.0, degenerate: false },
            (_, 0) => SubspaceClass {
                kind: SubspaceKind::Positive,
                margin: if zero == 0 { lambdas[0] } else { 0.0 },
                degenerate: zero > 0,
            },
            (0, _) => SubspaceClass {
                kind: SubspaceKind::Negative,
                margin: if zero == 0 { -lambdas[lambdas.len() - 1] } else { 0.0 },
                degenerate: zero > 0,
            },
            _ => SubspaceClass { kind: SubspaceKind::Indefinite, margin: 0.0, degenerate: false },
        };
        Ok(class)
    }

    /// `L^[perp] = { g : [f,g] = 0 for all f in L }`, the orthogonal complement of `JL`.
    pub fn j_orthogonal_complement(&self, l: &Subspace) -> Result<Subspace> {
        KreinError::check_dim(self.dim(), l.ambient_dim())?;
        let jl = &self.j * l.basis();
        Ok(Subspace { basis: linalg::orthogonal_complement(&jl) })
    }

    /// In finite dimension a positive subspace is maximal iff its dimension is
    /// `p`, a negative one iff it is `q`.
    pub fn is_maximal_definite(&self, l: &Subspace) -> Result<bool> {
        let class = self.classify_subspace(l)?;
        match class.kind {
            SubspaceKind::Positive => Ok(l.dim() == self.p()),
            SubspaceKind::Negative => Ok(l.dim() == self.q()),
            other => Err(KreinError::Classification(other)),
        }
    }

    /// `L` neutral with `H = L (+) JL`; in finite dimension this forces `p = q = dim L`.
    pub fn is_hypermaximal_neutral(&self, l: &Subspace) -> Result<bool> {
        KreinError::check_dim(self.dim(), l.ambient_dim())?;
        if l.is_zero() || self.classify_subspace(l)?.kind != SubspaceKind::Neutral {
            return Ok(false);
        }
        let jl = &self.j * l.basis();
        let both = linalg::hstack(l.basis(), &jl);
        Ok(2 * l.dim() == self.dim() && linalg::numerical_rank(&both, linalg::RANK_TOL) == self.dim())
    }
}

fn validate_involution(j: &CMatrix) -> Result<()> {
    let n = j.nrows();
    if n == 0 || j.ncols() != n {
        return Err(KreinError::InvalidSymmetry(format!("J must be square and nonempty, got {}x{}", n, j.ncols())));
    }
    let tol = SYMMETRY_TOL * n as f64;
    if linalg::max_abs(&(j - j.adjoint())) > tol {
        return Err(KreinError::InvalidSymmetry("J is not Hermitian".into()));
    }
    if linalg::max_abs(&(j * j - linalg::identity(n))) > tol {
        return Err(KreinError::InvalidSymmetry("J^2 != I".into()));
    }
    Ok(())
}

fn columns_or_empty(n: usize, cols: &[CVector]) -> CMatrix {
    if cols.is_empty() {
        CMatrix::zeros(n, 0)
    } else {
        CMatrix::from_columns(cols)
    }
}
