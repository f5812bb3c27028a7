//! Truncation families: finite sections of a Q whose norm grows with the size.
//!
//! No finite-dimensional Krein space has `M+ + M-` strictly smaller than `H`.
//! The study instead tracks how the diagnostics degrade as `q_max` grows.
//!
//! Size `m` uses `J = diag(I_m, -I_m)`, `B = diag(q_1..q_m)` and the frame
//! `f = e^{-Q/2} g` with `g = {w+ e_k^+} u {w- e_k^-}`. The problem splits into
//! `m` 2x2 blocks and every column is evaluated blockwise in the variables
//! `cosh`, `sech` and `e^{q/2}`. Dense products such as `[f_n, f_n]` lose all
//! digits once `cosh(q/2)` passes `1e8`.

use std::fmt::Write as _;

use crate::error::{KreinError, Result};
use crate::exec::Execution;
use crate::frame::fmt_f64;
use crate::linalg::{self, c, CMatrix};
use crate::q_frames::EXP_LIMIT;

/// Weights of the base frame on `H+` and `H-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRecipe {
    pub plus_weight: f64,
    pub minus_weight: f64,
}

impl Default for StudyRecipe {
    fn default() -> Self {
        StudyRecipe { plus_weight: 1.0, minus_weight: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    pub size: usize,
    pub q_max: f64,
    /// Bounds of the sign-split inequalities, measured in `(.,.)_1` on `M+-`.
    pub a_def13: f64,
    pub b_def13: f64,
    /// Lower bound of `sum |[f,f_n]|^2 >= A ||f||^2`, measured in `(.,.)`.
    pub a_def11: f64,
    pub cond_s: f64,
    /// `min [u,u]` over `u in M+` with `||u|| = 1`.
    pub min_uu_mplus: f64,
    /// `l2` and `l1` norms of `{[p, f_n]}` for the harmonic probe `p`.
    pub l2_partial: f64,
    pub l1_partial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyTable {
    pub schedule: Vec<f64>,
    pub recipe: StudyRecipe,
    pub rows: Vec<StudyRow>,
}

pub const STUDY_COLUMNS: [&str; 9] = [
    "size",
    "q_max",
    "A_def13",
    "B_def13",
    "A_def11",
    "cond_S",
    "min_uu_Mplus",
    "l2_partial",
    "l1_partial",
];

impl StudyTable {
    pub fn to_csv(&self) -> String {
        let mut out = STUDY_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let vals = [r.q_max, r.a_def13, r.b_def13, r.a_def11, r.cond_s, r.min_uu_mplus, r.l2_partial, r.l1_partial];
            let cells: Vec<String> = vals.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(out, "{},{}", r.size, cells.join(","));
        }
        out
    }

    /// `key: value` companion of the CSV.
    pub fn metadata(&self) -> String {
        let sched: Vec<String> = self.schedule.iter().map(|&q| fmt_f64(q)).collect();
        let sizes: Vec<String> = self.rows.iter().map(|r| r.size.to_string()).collect();
        let mut out = String::new();
        let _ = writeln!(out, "model: J = diag(I_m, -I_m), Q block B = diag(q_1..q_m), f = exp(-Q/2) g");
        let _ = writeln!(out, "q_schedule: {}", sched.join(","));
        let _ = writeln!(out, "sizes: {}", sizes.join(","));
        let _ = writeln!(out, "recipe.plus_weight: {}", fmt_f64(self.recipe.plus_weight));
        let _ = writeln!(out, "recipe.minus_weight: {}", fmt_f64(self.recipe.minus_weight));
        let _ = writeln!(out, "metric.A_def13: first (.,.)_1 on M+-");
        let _ = writeln!(out, "metric.B_def13: first (.,.)_1 on M+-");
        let _ = writeln!(out, "metric.A_def11: hilbert (.,.)");
        let _ = writeln!(out, "probe: components (1/k, 1/k) on block k");
        out
    }
}

pub fn truncation_study(
    schedule: &[f64],
    sizes: &[usize],
    recipe: &StudyRecipe,
    exec: Execution,
) -> Result<StudyTable> {
    if schedule.windows(2).any(|w| w[1] < w[0]) {
        return Err(KreinError::InvalidInput("q schedule must be non-decreasing".into()));
    }
    if let Some(&q) = schedule.iter().find(|&&q| !(q >= 0.0)) {
        return Err(KreinError::InvalidInput(format!("q schedule entries must be >= 0, got {q}")));
    }
    if let Some(&q) = schedule.iter().find(|&&q| q > EXP_LIMIT) {
        return Err(KreinError::Overflow { value: q, limit: EXP_LIMIT });
    }
    if !(recipe.plus_weight > 0.0 && recipe.minus_weight > 0.0) {
        return Err(KreinError::InvalidInput("recipe weights must be positive".into()));
    }
    if let Some(&m) = sizes.iter().find(|&&m| m == 0 || m > schedule.len()) {
        return Err(KreinError::InvalidInput(format!(
            "size {m} outside 1..={} (schedule length)",
            schedule.len()
        )));
    }
    let rows = exec.map(sizes, |&m| study_row(&schedule[..m], recipe));
    Ok(StudyTable { schedule: schedule.to_vec(), recipe: *recipe, rows })
}

fn study_row(qs: &[f64], recipe: &StudyRecipe) -> StudyRow {
    let m = qs.len();
    let (wp2, wm2) = (recipe.plus_weight.powi(2), recipe.minus_weight.powi(2));

    // f_k^+ = w+ cosh(q/2) u_k with u_k = e_k^+ - tanh(q/2) e_k^-, [u_k,u_k] = sech^2(q/2);
    // the M+ Gram and the analysis energy are diagonal in {u_k}, likewise on M-.
    let sech2: Vec<f64> = qs.iter().map(|&q| (q / 2.0).cosh().powi(-2)).collect();
    let energy = |w2: f64| -> Vec<f64> {
        qs.iter().zip(&sech2).map(|(&q, &s2)| w2 * (q / 2.0).cosh().powi(2) * s2 * s2).collect()
    };
    let gram = linalg::real_diagonal(&sech2);
    let pencil = |e: Vec<f64>| -> Vec<f64> {
        linalg::generalized_hermitian_eigenvalues(&linalg::real_diagonal(&e), &gram)
            .expect("sech^2 > 0 for q <= EXP_LIMIT")
    };
    let plus = pencil(energy(wp2));
    let minus = pencil(energy(wm2));
    let a_def13 = plus[0].min(minus[0]);
    let b_def13 = plus[m - 1].max(minus[m - 1]);

    // Block of F F* = e^{-Q/2} diag(w+^2, w-^2) e^{-Q/2}:
    //   trace = cosh(q)(w+^2 + w-^2), off-diagonal = -sinh(q)(w+^2 + w-^2)/2, det = w+^2 w-^2.
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for &q in qs {
        let sum = wp2 + wm2;
        let top = q.cosh() * sum / 2.0 + ((wp2 - wm2) / 2.0).hypot(q.sinh() * sum / 2.0);
        lo = lo.min(wp2 * wm2 / top);
        hi = hi.max(top);
    }

    let min_uu_mplus = qs.iter().map(|&q| 1.0 / q.cosh()).fold(f64::INFINITY, f64::min);

    // [p, f_k^+] = w+ e^{q/2}/k, [p, f_k^-] = -w- e^{q/2}/k.
    let (mut l2, mut l1) = (0.0, 0.0);
    for (k, &q) in qs.iter().enumerate() {
        let g = (q / 2.0).exp() / (k + 1) as f64;
        l2 += (wp2 + wm2) * g * g;
        l1 += (recipe.plus_weight + recipe.minus_weight) * g;
    }

    StudyRow {
        size: m,
        q_max: qs.iter().copied().fold(0.0, f64::max),
        a_def13,
        b_def13,
        a_def11: lo,
        cond_s: hi / lo,
        min_uu_mplus,
        l2_partial: l2.sqrt(),
        l1_partial: l1,
    }
}

/// The probe used for the partial sums, as a dense vector for size `m`.
pub fn harmonic_probe(m: usize) -> crate::krein::KVector {
    let mut v = CMatrix::zeros(2 * m, 1);
    for k in 0..m {
        let x = c(1.0 / (k + 1) as f64);
        v[(k, 0)] = x;
        v[(m + k, 0)] = x;
    }
    crate::krein::KVector::new(v.column(0).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::certify;
    use crate::krein::KVector;
    use crate::q_frames::{transport_to_jframe, QOperator};

    fn linear(n: usize) -> Vec<f64> {
        (1..=n).map(|k| k as f64).collect()
    }

    #[test]
    fn matches_dense_certification_for_moderate_q() {
        let recipe = StudyRecipe { plus_weight: 1.5, minus_weight: 0.5 };
        let qs: Vec<f64> = (1..=4).map(|k| 0.7 * k as f64).collect();
        let table = truncation_study(&qs, &[4], &recipe, Execution::Sequential).unwrap();
        let row = table.rows[0];

        let q = QOperator::block_diagonal(&qs);
        let mut g = Vec::new();
        for k in 0..4 {
            g.push(KVector::unit(8, k).scaled(c(1.5)));
            g.push(KVector::unit(8, 4 + k).scaled(c(0.5)));
        }
        let fam = transport_to_jframe(&q, &g).unwrap();
        let cert = certify(&fam);
        let d13 = cert.def13.unwrap();
        assert!((row.a_def13 - d13.lower).abs() < 1e-10 * d13.lower);
        assert!((row.b_def13 - d13.upper).abs() < 1e-10 * d13.upper);
        assert!((row.a_def11 - cert.def11.lower).abs() < 1e-9 * cert.def11.lower);
        assert!((row.cond_s * cert.def11.lower - cert.def11.upper).abs() < 1e-9 * cert.def11.upper);

        let coeffs = fam.analysis(&harmonic_probe(4)).unwrap();
        assert!((row.l2_partial - coeffs.norm()).abs() < 1e-12 * row.l2_partial);
        let l1: f64 = coeffs.iter().map(|z| z.norm()).sum();
        assert!((row.l1_partial - l1).abs() < 1e-12 * l1);
    }

    #[test]
    fn constant_schedule_is_stable() {
        let t = truncation_study(&[2.0; 6], &[1, 3, 6], &StudyRecipe::default(), Execution::Sequential).unwrap();
        for r in &t.rows {
            assert_eq!(r.a_def11, t.rows[0].a_def11);
            assert_eq!(r.min_uu_mplus, t.rows[0].min_uu_mplus);
            assert!((r.a_def13 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_schedule_degrades() {
        let sizes: Vec<usize> = (2..=40).collect();
        let t = truncation_study(&linear(40), &sizes, &StudyRecipe::default(), Execution::Parallel).unwrap();
        for w in t.rows.windows(2) {
            assert!(w[1].a_def11 < w[0].a_def11);
            assert!(w[1].min_uu_mplus < w[0].min_uu_mplus);
            assert!((w[1].a_def13 - w[0].a_def13).abs() < 1e-12);
        }
        let last = t.rows.last().unwrap();
        assert!((last.a_def11 - (-40.0f64).exp()).abs() < 1e-12 * last.a_def11);
        assert!(last.min_uu_mplus < 1e-16);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let sizes: Vec<usize> = (1..=12).collect();
        let a = truncation_study(&linear(12), &sizes, &StudyRecipe::default(), Execution::Sequential).unwrap();
        let b = truncation_study(&linear(12), &sizes, &StudyRecipe::default(), Execution::Parallel).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn rejects_bad_input() {
        let r = StudyRecipe::default();
        assert!(truncation_study(&[2.0, 1.0], &[1], &r, Execution::Sequential).is_err());
        assert!(truncation_study(&[1.0], &[2], &r, Execution::Sequential).is_err());
        assert!(matches!(
            truncation_study(&[1.0, 900.0], &[2], &r, Execution::Sequential),
            Err(KreinError::Overflow { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let t = truncation_study(&[1.0, 2.0], &[2], &StudyRecipe::default(), Execution::Sequential).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), STUDY_COLUMNS.join(","));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[0], "2");
        assert!(t.metadata().contains("q_schedule: "));
    }
}
