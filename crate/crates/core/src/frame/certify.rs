//! Frame-bound certification.
//!
//! Three notions are checked:
//!
//! * `Def11`: the family is a frame for `sum |[f,f_n]|^2` against `(f,f)`;
//!   bounds are the extremal eigenvalues of `sum (J f_n)(J f_n)*`.
//! * `Def13`: `M+`, `M-` are maximal definite and, on each of them,
//!   `A |[f,f]| <= sum_{N+-} |[f,f_n]|^2 <= B |[f,f]|` with one common pair
//!   `(A, B)`. Each side is an exact generalized Hermitian eigenproblem on the
//!   restricted pencil.
//! * `Def12`: `Def13` plus uniform definiteness of `M+-` and `M+ + M- = H`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{KreinError, Result};
use crate::frame::{FrameFamily, OperatorBundle, Sign};
use crate::krein::{SignatureSpace, SubspaceKind};
use crate::linalg::{self, CMatrix, RANK_TOL};

/// Relative tolerance for `A == B`.
pub const TIGHT_TOL: f64 = 1e-8;
/// Relative tolerance for the J-orthogonality verdict.
pub const J_ORTHOGONAL_TOL: f64 = 1e-10;
/// A lower bound below this fraction of the upper bound is treated as zero.
pub const LOWER_BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definition {
    Def11,
    Def12,
    Def13,
}

impl std::str::FromStr for Definition {
    type Err = KreinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "def11" | "1.1" => Ok(Definition::Def11),
            "def12" | "1.2" => Ok(Definition::Def12),
            "def13" | "1.3" => Ok(Definition::Def13),
            other => Err(KreinError::InvalidInput(format!("unknown definition '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn is_tight(&self) -> bool {
        (self.upper - self.lower).abs() <= TIGHT_TOL * self.upper.abs()
    }

    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }

    fn merge(a: Option<Bounds>, b: Option<Bounds>) -> Option<Bounds> {
        match (a, b) {
            (Some(x), Some(y)) => Some(Bounds { lower: x.lower.min(y.lower), upper: x.upper.max(y.upper) }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameCertificate {
    pub dim: usize,
    pub len: usize,
    pub is_frame_def11: bool,
    pub def11: Bounds,
    pub is_jframe_def13: bool,
    /// Common bounds over both signs; present whenever every nonzero side is definite.
    pub def13: Option<Bounds>,
    pub plus_bounds: Option<Bounds>,
    pub minus_bounds: Option<Bounds>,
    pub is_jframe_def12: bool,
    pub tight: bool,
    pub j_orthogonal: bool,
    pub exact: bool,
    pub diagnostics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl FrameCertificate {
    pub fn passes(&self, definition: Definition) -> bool {
        match definition {
            Definition::Def11 => self.is_frame_def11,
            Definition::Def12 => self.is_jframe_def12,
            Definition::Def13 => self.is_jframe_def13,
        }
    }

    /// Bounds that the tight verdict and the tight reconstruction refer to.
    pub fn reference_bounds(&self) -> Bounds {
        if self.is_jframe_def13 {
            self.def13.unwrap_or(self.def11)
        } else {
            self.def11
        }
    }

    /// `key: value` report, one item per line.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k}: {v}");
        };
        line("dim", self.dim.to_string());
        line("vectors", self.len.to_string());
        line("def11.frame", self.is_frame_def11.to_string());
        line("def11.A", fmt_f64(self.def11.lower));
        line("def11.B", fmt_f64(self.def11.upper));
        line("def13.jframe", self.is_jframe_def13.to_string());
        if let Some(b) = self.def13 {
            line("def13.A", fmt_f64(b.lower));
            line("def13.B", fmt_f64(b.upper));
        }
        if let Some(b) = self.plus_bounds {
            line("def13.A_plus", fmt_f64(b.lower));
            line("def13.B_plus", fmt_f64(b.upper));
        }
        if let Some(b) = self.minus_bounds {
            line("def13.A_minus", fmt_f64(b.lower));
            line("def13.B_minus", fmt_f64(b.upper));
        }
        line("def12.jframe", self.is_jframe_def12.to_string());
        line("tight", self.tight.to_string());
        line("j_orthogonal", self.j_orthogonal.to_string());
        line("exact", self.exact.to_string());
        for (k, v) in &self.diagnostics {
            line(&format!("diag.{k}"), fmt_f64(*v));
        }
        for note in &self.notes {
            line("note", note.clone());
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct SideReport {
    ok: bool,
    bounds: Option<Bounds>,
}

pub fn certify(family: &FrameFamily) -> FrameCertificate {
    let space = family.space();
    let f = family.synthesis_matrix();
    let mut diagnostics = BTreeMap::new();
    let mut notes = Vec::new();

    let jf = space.j() * f;
    let ev = linalg::hermitian_eigenvalues(&(&jf * jf.adjoint()));
    let def11 = Bounds { lower: ev[0].max(0.0), upper: ev[ev.len() - 1] };
    let is_frame_def11 = def11.upper > 0.0 && def11.lower > LOWER_BOUND_TOL * def11.upper;

    let plus = side(family, Sign::Plus, &mut diagnostics, &mut notes);
    let minus = side(family, Sign::Minus, &mut diagnostics, &mut notes);
    let def13 = if plus.ok && minus.ok { Bounds::merge(plus.bounds, minus.bounds) } else { None };
    let is_jframe_def13 = def13.is_some();

    if !family.neutral().is_empty() {
        notes.push(format!("{} neutral vector(s) assigned to N+", family.neutral().len()));
    }
    if family.n_minus().is_empty() || family.n_plus().is_empty() {
        notes.push("one-sided family: only the nonempty sign is certified".into());
    }

    let mut is_jframe_def12 = false;
    if is_jframe_def13 {
        match OperatorBundle::new(family) {
            Ok(bundle) => {
                is_jframe_def12 = true;
                let jjm = space.j() * &bundle.j_m;
                let defect = linalg::max_abs(&(&jjm - jjm.adjoint())) / linalg::max_abs(&jjm).max(1.0);
                diagnostics.insert("jjm_hermitian_defect".into(), defect);
            }
            Err(e) => notes.push(format!("direct sum: {e}")),
        }
    }

    let defect = family.j_orthogonality_defect();
    diagnostics.insert("j_orthogonality_defect".into(), defect);
    let j_orthogonal = defect <= J_ORTHOGONAL_TOL;

    let exact = family.len() == family.dim() && linalg::numerical_rank(f, RANK_TOL) == family.dim();

    diagnostics.insert("tight_def11".into(), bool_value(is_frame_def11 && def11.is_tight()));
    if let Some(b) = def13 {
        diagnostics.insert("tight_def13".into(), bool_value(b.is_tight()));
    }
    let tight = if is_jframe_def13 {
        def13.is_some_and(|b| b.is_tight())
    } else {
        is_frame_def11 && def11.is_tight()
    };

    FrameCertificate {
        dim: family.dim(),
        len: family.len(),
        is_frame_def11,
        def11,
        is_jframe_def13,
        def13,
        plus_bounds: plus.bounds,
        minus_bounds: minus.bounds,
        is_jframe_def12,
        tight,
        j_orthogonal,
        exact,
        diagnostics,
        notes,
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn side(
    family: &FrameFamily,
    sign: Sign,
    diagnostics: &mut BTreeMap<String, f64>,
    notes: &mut Vec<String>,
) -> SideReport {
    let space = family.space();
    let (label, subspace, target, expected) = match sign {
        Sign::Plus => ("M+", family.m_plus(), space.p(), SubspaceKind::Positive),
        Sign::Minus => ("M-", family.m_minus(), space.q(), SubspaceKind::Negative),
    };
    if subspace.is_zero() {
        if target == 0 {
            return SideReport { ok: true, bounds: None };
        }
        notes.push(format!("{label} trivial"));
        return SideReport { ok: false, bounds: None };
    }
    let class = match space.classify_subspace(subspace) {
        Ok(cl) => cl,
        Err(e) => {
            notes.push(format!("{label}: {e}"));
            return SideReport { ok: false, bounds: None };
        }
    };
    let key = if sign == Sign::Plus { "margin_m_plus" } else { "margin_m_minus" };
    diagnostics.insert(key.into(), class.margin);
    if class.kind != expected || class.degenerate {
        let detail = if class.degenerate { " (degenerate)" } else { "" };
        notes.push(format!("{label} not {}: {}{detail}", expected, class.kind));
        return SideReport { ok: false, bounds: None };
    }
    let bounds = side_bounds(space, subspace.basis(), &family.side_vectors(sign), sign.value());
    let maximal = subspace.dim() == target;
    if !maximal {
        notes.push(format!("{label} not maximal: dim {} < {target}", subspace.dim()));
    }
    match bounds {
        Some(b) => SideReport { ok: maximal, bounds: Some(b) },
        None => {
            notes.push(format!("{label}: restricted Gram is not definite"));
            SideReport { ok: false, bounds: None }
        }
    }
}

/// Extremal values of `sum_{side} |[f,f_n]|^2 / (sign [f,f])` over `f` in the span of `basis`.
fn side_bounds(space: &SignatureSpace, basis: &CMatrix, side: &CMatrix, sign: f64) -> Option<Bounds> {
    let jb = space.j() * basis;
    let coeffs = side.adjoint() * &jb;
    let energy = coeffs.adjoint() * &coeffs;
    let gram = basis.adjoint() * &jb * linalg::c(sign);
    let ev = linalg::generalized_hermitian_eigenvalues(&energy, &gram)?;
    Some(Bounds { lower: ev[0], upper: ev[ev.len() - 1] })
}

/// Certifies the family inside the Krein subspace spanned by its own vectors.
///
/// Useful when a finite family is taken from a larger discretisation: the
/// span `K = span{f_n}` with the restricted form `[.,.]` is itself a Krein
/// space when that form is nondegenerate. Coordinates are chosen so the
/// restricted form becomes `diag(+-1)`. `Def13` verdicts and bounds depend only
/// on `[.,.]` and are therefore intrinsic; `Def11` bounds refer to the chart's
/// Hilbert metric.
pub fn certify_in_span(family: &FrameFamily) -> Result<FrameCertificate> {
    let (space, coords) = span_chart(family)?;
    let chart = FrameFamily::from_matrix(Arc::new(space), coords)?;
    let mut cert = certify(&chart);
    cert.notes.push(format!("certified in span of the family (dim {} of {})", chart.dim(), family.dim()));
    Ok(cert)
}

fn span_chart(family: &FrameFamily) -> Result<(SignatureSpace, CMatrix)> {
    let w = linalg::orthonormal_span(family.synthesis_matrix(), RANK_TOL);
    let k = w.ncols();
    let form = family.space().indefinite_gram(&w);
    let (vals, vecs) = linalg::hermitian_eigen(&form);
    let scale = vals.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if vals.iter().any(|x| x.abs() < RANK_TOL * scale) {
        return Err(KreinError::DegenerateFamily("restricted indefinite form is degenerate".into()));
    }
    // positive eigenvalues first so the chart's J is diag(I_p, -I_q)
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let p = vals.iter().filter(|&&x| x > 0.0).count();
    let mut to_chart = CMatrix::zeros(k, k);
    for (row, &i) in order.iter().enumerate() {
        let s = vals[i].abs().sqrt();
        let v = vecs.column(i).adjoint() * linalg::c(s);
        to_chart.set_row(row, &v);
    }
    let coords = to_chart * (w.adjoint() * family.synthesis_matrix());
    Ok((SignatureSpace::diagonal(p, k - p), coords))
}
