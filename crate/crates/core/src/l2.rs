//! `L^2(-a, a)` with `Jf(x) = f(-x)` and `Qf = x f(x)`, sampled on a symmetric
//! Gauss-Legendre grid.
//!
//! A function is stored as `sqrt(w_i) f(x_i)`, so the discrete `L^2` product is
//! the coordinate product and the parity `J` is the node-mirror permutation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{KreinError, Result};
use crate::frame::FrameFamily;
use crate::krein::{KVector, SignatureSpace};
use crate::linalg::{c, CMatrix, CVector};
use crate::q_frames::QOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    a: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// A custom rule; node `i` must mirror node `n - 1 - i` with equal weight.
    pub fn new(a: f64, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if !(a > 0.0) {
            return Err(KreinError::Grid(format!("half-width must be positive, got {a}")));
        }
        if nodes.len() != weights.len() || nodes.len() < 2 || nodes.len() % 2 != 0 {
            return Err(KreinError::Grid(format!(
                "need an even number >= 2 of nodes with matching weights, got {} / {}",
                nodes.len(),
                weights.len()
            )));
        }
        let n = nodes.len();
        for i in 0..n / 2 {
            let k = n - 1 - i;
            if nodes[i] != -nodes[k] || weights[i] != weights[k] {
                return Err(KreinError::Grid(format!("nodes {i} and {k} are not mirror images")));
            }
        }
        if let Some(w) = weights.iter().find(|&&w| !(w > 0.0)) {
            return Err(KreinError::Grid(format!("weights must be positive, got {w}")));
        }
        Ok(QuadratureGrid { a, nodes, weights })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mirror(&self, i: usize) -> usize {
        self.len() - 1 - i
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Weighted-coordinate samples of `f`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> KVector {
        KVector::new(CVector::from_iterator(
            self.len(),
            self.nodes.iter().zip(&self.weights).map(|(&x, &w)| c(w.sqrt() * f(x))),
        ))
    }

    /// Inverse of [`sample`](Self::sample): point values at the nodes.
    pub fn values(&self, v: &KVector) -> Vec<f64> {
        v.coords().iter().zip(&self.weights).map(|(z, &w)| z.re / w.sqrt()).collect()
    }
}

/// Symmetric Gauss-Legendre rule on `(-a, a)`.
pub fn build_grid(a: f64, n_nodes: usize) -> Result<QuadratureGrid> {
    if n_nodes < 2 || n_nodes % 2 != 0 {
        return Err(KreinError::Grid(format!("n_nodes must be even and >= 2, got {n_nodes}")));
    }
    let half = n_nodes / 2;
    let mut pos = Vec::with_capacity(half);
    for i in 0..half {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n_nodes as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n_nodes, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n_nodes, x);
        pos.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    // pos is descending in x; lay out ascending with exact mirror pairs.
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut weights = Vec::with_capacity(n_nodes);
    for &(x, w) in &pos {
        nodes.push(-a * x);
        weights.push(a * w);
    }
    for &(x, w) in pos.iter().rev() {
        nodes.push(a * x);
        weights.push(a * w);
    }
    QuadratureGrid::new(a, nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (p, prev) = (legendre(n, x), legendre(n - 1, x));
    (p, n as f64 * (x * p - prev) / (x * x - 1.0))
}

/// `P_n(x)` by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return 1.0;
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `H+` = even functions, `H-` = odd functions.
pub fn discretize_space(grid: &QuadratureGrid) -> Result<SignatureSpace> {
    let n = grid.len();
    let half = n / 2;
    let mut j = CMatrix::zeros(n, n);
    let mut plus = CMatrix::zeros(n, half);
    let mut minus = CMatrix::zeros(n, half);
    let r = c(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..n {
        j[(i, grid.mirror(i))] = c(1.0);
    }
    for i in 0..half {
        let k = grid.mirror(i);
        plus[(i, i)] = r;
        plus[(k, i)] = r;
        minus[(i, i)] = -r;
        minus[(k, i)] = r;
    }
    SignatureSpace::from_parts(j, plus, minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `P_n(x/a)`, `n = 0..m`.
    Legendre,
    /// `1, cos(pi x/a), sin(pi x/a), cos(2 pi x/a), ...`
    Fourier,
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisKind::Legendre => "legendre",
            BasisKind::Fourier => "fourier",
        })
    }
}

impl FromStr for BasisKind {
    type Err = KreinError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "legendre" | "legendre_even_odd" => Ok(BasisKind::Legendre),
            "fourier" => Ok(BasisKind::Fourier),
            other => Err(KreinError::InvalidInput(format!("unknown basis '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionBasis {
    kind: BasisKind,
    a: f64,
    /// Weighted samples, one column per basis function.
    samples: CMatrix,
    parity: Vec<Parity>,
}

impl FunctionBasis {
    pub fn new(grid: &QuadratureGrid, kind: BasisKind, m: usize) -> Result<Self> {
        if m == 0 || m > grid.len() {
            return Err(KreinError::InvalidInput(format!("basis size must be in 1..={}, got {m}", grid.len())));
        }
        let a = grid.a();
        let mut samples = CMatrix::zeros(grid.len(), m);
        let mut parity = Vec::with_capacity(m);
        for n in 0..m {
            let col = grid.sample(|x| basis_function(kind, a, n, x));
            samples.set_column(n, col.coords());
            parity.push(basis_parity(kind, n));
        }
        Ok(FunctionBasis { kind, a, samples, parity })
    }

    pub fn legendre(grid: &QuadratureGrid, m: usize) -> Result<Self> {
        Self::new(grid, BasisKind::Legendre, m)
    }

    pub fn fourier(grid: &QuadratureGrid, m: usize) -> Result<Self> {
        Self::new(grid, BasisKind::Fourier, m)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.parity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parity.is_empty()
    }

    pub fn samples(&self) -> &CMatrix {
        &self.samples
    }

    pub fn parity(&self) -> &[Parity] {
        &self.parity
    }

    pub fn vector(&self, n: usize) -> KVector {
        KVector::new(self.samples.column(n).into_owned())
    }

    pub fn vectors(&self) -> Vec<KVector> {
        (0..self.len()).map(|n| self.vector(n)).collect()
    }

    /// Largest polynomial degree, for the Legendre kind.
    pub fn max_degree(&self) -> Option<usize> {
        match self.kind {
            BasisKind::Legendre => Some(self.len() - 1),
            BasisKind::Fourier => None,
        }
    }

    /// Exact `||g_n||^2` in `L^2(-a, a)`.
    pub fn norm_squared(&self, n: usize) -> f64 {
        match self.kind {
            BasisKind::Legendre => 2.0 * self.a / (2 * n + 1) as f64,
            BasisKind::Fourier if n == 0 => 2.0 * self.a,
            BasisKind::Fourier => self.a,
        }
    }

    /// Discrete `L^2` Gram matrix.
    pub fn gram(&self) -> CMatrix {
        self.samples.adjoint() * &self.samples
    }
}

fn basis_function(kind: BasisKind, a: f64, n: usize, x: f64) -> f64 {
    match kind {
        BasisKind::Legendre => legendre(n, x / a),
        BasisKind::Fourier if n == 0 => 1.0,
        BasisKind::Fourier => {
            let k = n.div_ceil(2) as f64;
            if n % 2 == 1 {
                (PI * k * x / a).cos()
            } else {
                (PI * k * x / a).sin()
            }
        }
    }
}

fn basis_parity(kind: BasisKind, n: usize) -> Parity {
    let even = match kind {
        BasisKind::Legendre => n % 2 == 0,
        BasisKind::Fourier => n == 0 || n % 2 == 1,
    };
    if even {
        Parity::Even
    } else {
        Parity::Odd
    }
}

pub fn example_decay(x: f64) -> f64 {
    (-x / 2.0).exp()
}

/// `f_n = decay * g_n`. `None` means `decay = 1`.
pub fn build_example_frame(
    grid: &QuadratureGrid,
    basis: &FunctionBasis,
    decay: Option<&dyn Fn(f64) -> f64>,
) -> Result<FrameFamily> {
    let space = Arc::new(discretize_space(grid)?);
    let mut f = basis.samples().clone();
    if let Some(decay) = decay {
        if let Some(deg) = basis.max_degree() {
            if grid.len() < 4 * deg {
                return Err(KreinError::Grid(format!(
                    "n_nodes = {} is below 4 x degree {deg} needed with a decay factor",
                    grid.len()
                )));
            }
        }
        for (i, &x) in grid.nodes().iter().enumerate() {
            let d = decay(x);
            if !(d > 0.0) {
                return Err(KreinError::InvalidInput(format!("decay must be positive, got {d} at x = {x}")));
            }
            for n in 0..f.ncols() {
                f[(i, n)] *= d;
            }
        }
    }
    FrameFamily::from_matrix(space, f)
}

/// Multiplication by `x`.
pub fn example_q_operator(grid: &QuadratureGrid) -> Result<QOperator> {
    let space = discretize_space(grid)?;
    let q = CMatrix::from_diagonal(&CVector::from_iterator(grid.len(), grid.nodes().iter().map(|&x| c(x))));
    QOperator::from_matrix(space, q)
}

/// `int f(-x) conj(g(x)) dx` by quadrature on the raw functions.
pub fn quadrature_indefinite_product(grid: &QuadratureGrid, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
    grid.integrate(|x| f(-x) * g(x))
}

/// The same product on weighted samples, through the node mirror.
pub fn nodal_indefinite_product(grid: &QuadratureGrid, f: &KVector, g: &KVector) -> f64 {
    let (fv, gv) = (f.coords(), g.coords());
    (0..grid.len())
        .map(|i| (fv[grid.mirror(i)] * gv[i].conj()).re)
        .sum()
}
