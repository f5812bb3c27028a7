#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use krein_frames::format::{parse_frame_file, FrameFile};
use krein_frames::random::Sampler;
use krein_frames::Execution;
use num_complex::Complex64 as C64;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// Every `*.frame` file in the corpus, sorted by name.
pub fn corpus() -> Vec<(String, FrameFile)> {
    let mut paths: Vec<_> = fs::read_dir(corpus_dir())
        .expect("corpus dir")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "frame"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let file = parse_frame_file(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, file)
        })
        .collect()
}

type Mat = Vec<Vec<C64>>;

fn matvec(m: &Mat, x: &[C64]) -> Vec<C64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `sum_n |a_n^* x|^2 / (x^* G x)` on `C^k`, with `G` Hermitian positive definite.
pub struct Rayleigh {
    k: usize,
    rows: Vec<Vec<C64>>,
    gram: Mat,
}

impl Rayleigh {
    fn value(&self, x: &[C64]) -> f64 {
        let num: f64 = self.rows.iter().map(|a| dot(a, x).norm_sqr()).sum();
        let den = dot(x, &matvec(&self.gram, x)).re;
        num / den
    }

    /// `E x - R G x`, the direction of steepest change.
    fn gradient(&self, x: &[C64], r: f64) -> Vec<C64> {
        let mut g: Vec<C64> = matvec(&self.gram, x).into_iter().map(|v| -v * r).collect();
        for a in &self.rows {
            let s = dot(a, x);
            for (gi, ai) in g.iter_mut().zip(a) {
                *gi += ai * s;
            }
        }
        g
    }

    fn descend(&self, mut x: Vec<C64>, sign: f64) -> f64 {
        let mut r = self.value(&x);
        let mut step = 1.0;
        for _ in 0..5000 {
            let g = self.gradient(&x, r);
            let scale = dot(&x, &matvec(&self.gram, &x)).re.sqrt();
            let gn = dot(&g, &g).re.sqrt();
            if gn == 0.0 {
                break;
            }
            let mut improved = false;
            while step > 1e-18 {
                let trial: Vec<C64> = x.iter().zip(&g).map(|(xi, gi)| xi - gi * (sign * step * scale / gn)).collect();
                let rt = self.value(&trial);
                if sign * (rt - r) < 0.0 {
                    let gain = (r - rt).abs();
                    x = trial;
                    r = rt;
                    step *= 2.0;
                    improved = gain > 1e-16 * r.abs();
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        r
    }

    /// Extrema over `samples` random directions, then refined by line-searched gradient steps.
    pub fn extrema(&self, samples: usize, seed: u64) -> (f64, f64) {
        const CHUNK: usize = 4096;
        let chunks = samples.div_ceil(CHUNK);
        let parts = Execution::Parallel.map_range(chunks, |c| {
            let mut s = Sampler::stream(seed, c as u64);
            let mut lo = (f64::INFINITY, Vec::new());
            let mut hi = (f64::NEG_INFINITY, Vec::new());
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let x: Vec<C64> = (0..self.k).map(|_| C64::new(s.gaussian(), s.gaussian())).collect();
                let r = self.value(&x);
                if r < lo.0 {
                    lo = (r, x.clone());
                }
                if r > hi.0 {
                    hi = (r, x);
                }
            }
            (lo, hi)
        });
        let mut lo = (f64::INFINITY, Vec::new());
        let mut hi = (f64::NEG_INFINITY, Vec::new());
        for (l, h) in parts {
            if l.0 < lo.0 {
                lo = l;
            }
            if h.0 > hi.0 {
                hi = h;
            }
        }
        (self.descend(lo.1, 1.0).min(lo.0), self.descend(hi.1, -1.0).max(hi.0))
    }
}

fn j_apply(j: &Mat, v: &[C64]) -> Vec<C64> {
    matvec(j, v)
}

/// Orthonormal basis of the span by modified Gram-Schmidt, dropping relative residuals below `tol`.
fn gram_schmidt(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let n0 = dot(v, v).re.sqrt();
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= bi * p;
                }
            }
        }
        let n = dot(&w, &w).re.sqrt();
        if n > tol * n0 {
            basis.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    basis
}

pub struct OracleBounds {
    pub def11: (f64, f64),
    pub plus: Option<(f64, f64)>,
    pub minus: Option<(f64, f64)>,
}

/// Brute-force bounds straight from the definitions.
pub fn oracle_bounds(file: &FrameFile, samples: usize, seed: u64) -> OracleBounds {
    let n = file.space.dim();
    let j: Mat = (0..n).map(|r| (0..n).map(|c| file.space.j()[(r, c)]).collect()).collect();
    let vecs: Vec<Vec<C64>> = file.vectors.iter().map(|v| v.coords().iter().copied().collect()).collect();
    let jv: Vec<Vec<C64>> = vecs.iter().map(|v| j_apply(&j, v)).collect();

    // [f, f_n] = (J f_n)^* f
    let identity: Mat = (0..n).map(|r| (0..n).map(|c| C64::new((r == c) as u8 as f64, 0.0)).collect()).collect();
    let def11 = Rayleigh { k: n, rows: jv.clone(), gram: identity }.extrema(samples, seed);

    let self_products: Vec<f64> = vecs.iter().zip(&jv).map(|(v, w)| dot(w, v).re).collect();
    let side = |positive: bool, stream: u64| -> Option<(f64, f64)> {
        let idx: Vec<usize> = (0..vecs.len())
            .filter(|&i| if positive { self_products[i] >= -1e-12 } else { self_products[i] < -1e-12 })
            .collect();
        if idx.is_empty() {
            return None;
        }
        let members: Vec<Vec<C64>> = idx.iter().map(|&i| vecs[i].clone()).collect();
        let basis = gram_schmidt(&members, 1e-8);
        let sign = if positive { 1.0 } else { -1.0 };
        let jb: Vec<Vec<C64>> = basis.iter().map(|b| j_apply(&j, b)).collect();
        let gram: Mat = basis.iter().map(|bi| jb.iter().map(|bj| dot(bi, bj) * sign).collect()).collect();
        // x -> f = sum x_i b_i ; [f, f_n] = sum_i x_i (J f_n)^* b_i
        let rows: Vec<Vec<C64>> =
            idx.iter().map(|&i| basis.iter().map(|b| dot(b, &jv[i])).collect()).collect();
        let k = basis.len();
        let min_eig = (0..200).fold(f64::INFINITY, |m, t| {
            let mut s = Sampler::stream(seed ^ 0x5eed, t);
            let x: Vec<C64> = (0..k).map(|_| C64::new(s.gaussian(), s.gaussian())).collect();
            m.min(dot(&x, &matvec(&gram, &x)).re)
        });
        if !(min_eig > 0.0) {
            return None;
        }
        Some(Rayleigh { k, rows, gram }.extrema(samples, seed.wrapping_add(stream)))
    };
    OracleBounds { def11, plus: side(true, 1), minus: side(false, 2) }
}

pub fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE)
}
