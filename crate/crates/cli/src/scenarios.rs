use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use krein_frames::format::{parse_frame_file, write_frame_file, FrameFile};
use krein_frames::frame::fmt_f64;
use krein_frames::l2::{self, FunctionBasis, Parity};
use krein_frames::random::Sampler;
use krein_frames::study::StudyRecipe;
use krein_frames::{
    certify, certify_in_span, hilbert_frame_bounds, neutral_demo_family, split_family, transport_to_hilbert_frame,
    transport_to_jframe, truncation_study, Definition, Execution, FrameCertificate, FrameFamily, Formula,
    Reconstructor,
};

use crate::settings::{Scenario, Settings};

pub enum Outcome {
    Pass,
    /// Certification (or a residual check) came out negative.
    Negative(String),
}

type Run = Result<Outcome, String>;

fn step<T, E: std::fmt::Display>(what: &str, r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn write(out: &Path, name: &str, text: &str) -> Result<(), String> {
    step(&format!("writing {}", out.join(name).display()), fs::write(out.join(name), text))
}

pub fn run(s: &Settings) -> Run {
    step(&format!("creating {}", s.out.display()), fs::create_dir_all(&s.out))?;
    match s.scenario {
        Scenario::Certify => run_certify(s),
        Scenario::Reconstruct => run_reconstruct(s),
        Scenario::Transport => run_transport(s),
        Scenario::L2Example => run_l2(s),
        Scenario::TruncationStudy => run_study(s),
        Scenario::NeutralDemo => run_neutral(s),
    }
}

fn load(s: &Settings) -> Result<FrameFile, String> {
    let path = s.input.as_ref().ok_or_else(|| format!("scenario {} needs --input", s.scenario))?;
    let text = step(&format!("reading {}", path.display()), fs::read_to_string(path))?;
    step(&path.display().to_string(), parse_frame_file(&text))
}

fn load_family(s: &Settings) -> Result<FrameFamily, String> {
    let file = load(s)?;
    step("split_family", split_family(file.space, &file.vectors))
}

/// Writes the report and turns the verdict for the requested definition into an outcome.
fn verdict(s: &Settings, cert: &FrameCertificate) -> Run {
    let report = cert.to_report();
    write(&s.out, "certificate.txt", &report)?;
    print!("{report}");
    let bounds = match s.definition {
        Definition::Def11 => Some(cert.def11),
        _ => cert.def13,
    };
    let margin_ok = bounds.is_some_and(|b| b.lower > s.tol_cert * b.upper);
    if cert.passes(s.definition) && margin_ok {
        Ok(Outcome::Pass)
    } else {
        let why = if cert.notes.is_empty() { "bounds below --tol-cert".to_string() } else { cert.notes.join("; ") };
        Ok(Outcome::Negative(format!("not a frame in the sense of {:?}: {why}", s.definition)))
    }
}

fn run_certify(s: &Settings) -> Run {
    let fam = load_family(s)?;
    verdict(s, &certify(&fam))
}

fn run_reconstruct(s: &Settings) -> Run {
    let fam = load_family(s)?;
    let cert = certify(&fam);
    let outcome = verdict(s, &cert)?;
    let rec = step("reconstruct", Reconstructor::new(&fam))?;
    let mut sampler = Sampler::new(s.seed);
    let probes: Vec<_> = (0..s.probes).map(|_| sampler.vector(fam.dim())).collect();
    let mut csv = String::from("formula,vector_id,residual\n");
    let mut worst: f64 = 0.0;
    for formula in Formula::ALL.into_iter().filter(|&f| rec.supports(f)) {
        for (id, f) in probes.iter().enumerate() {
            let out = step(&format!("reconstruct ({formula})"), rec.reconstruct(f, formula))?;
            let r = (out.coords() - f.coords()).norm() / f.norm();
            worst = worst.max(r);
            let _ = writeln!(csv, "{formula},{id},{}", fmt_f64(r));
        }
    }
    write(&s.out, "residuals.csv", &csv)?;
    println!("residual.max: {}", fmt_f64(worst));
    match outcome {
        Outcome::Pass if worst > s.tol_recon => {
            Ok(Outcome::Negative(format!("reconstruction residual {worst:e} above --tol-recon")))
        }
        other => Ok(other),
    }
}

fn run_transport(s: &Settings) -> Run {
    let mut sampler = Sampler::new(s.seed);
    let (space, g) = match &s.input {
        Some(_) => {
            let file = load(s)?;
            (Arc::new(file.space), file.vectors)
        }
        None => {
            let space = sampler.signature_space(3, 3);
            let g = sampler.aligned_vectors(&space, 1, 1);
            (Arc::new(space), g)
        }
    };
    let q = sampler.q_operator(Arc::clone(&space), s.q_norm);
    let fam = step("transport_to_jframe", transport_to_jframe(&q, &g))?;
    let back = step("transport_to_hilbert_frame", transport_to_hilbert_frame(&fam, &q))?;
    let hb = step("hilbert_frame_bounds", hilbert_frame_bounds(&g))?;
    let roundtrip = back
        .iter()
        .zip(&g)
        .map(|(x, y)| (x.coords() - y.coords()).norm() / y.norm())
        .fold(0.0, f64::max);
    write(&s.out, "jframe.txt", &write_frame_file(fam.space(), &fam.vectors(), Some("f_n = exp(-Q/2) g_n")))?;
    let mut summary = String::new();
    let _ = writeln!(summary, "q_norm: {}", fmt_f64(q.norm()));
    let _ = writeln!(summary, "hilbert.A: {}", fmt_f64(hb.lower));
    let _ = writeln!(summary, "hilbert.B: {}", fmt_f64(hb.upper));
    let _ = writeln!(summary, "roundtrip.max_residual: {}", fmt_f64(roundtrip));
    write(&s.out, "transport.txt", &summary)?;
    print!("{summary}");
    verdict(s, &certify(&fam))
}

fn run_l2(s: &Settings) -> Run {
    let grid = step("build_grid", l2::build_grid(s.a, s.n_nodes))?;
    let basis = step("basis", FunctionBasis::new(&grid, s.basis, s.m.unwrap_or(8)))?;
    let decay: Option<&dyn Fn(f64) -> f64> = if s.decay { Some(&l2::example_decay) } else { None };
    let fam = step("build_example_frame", l2::build_example_frame(&grid, &basis, decay))?;
    write(&s.out, "frame.txt", &write_frame_file(fam.space(), &fam.vectors(), Some("L^2(-a,a) example, weighted node samples")))?;

    let gram = fam.indefinite_gram();
    let mut csv = String::from("n,m,gram,expected,residual\n");
    let mut worst: f64 = 0.0;
    for n in 0..basis.len() {
        for m in 0..basis.len() {
            let sign = if basis.parity()[n] == Parity::Even { 1.0 } else { -1.0 };
            let expected = if n == m { sign * basis.norm_squared(n) } else { 0.0 };
            let r = (gram[(n, m)].re - expected).abs().max(gram[(n, m)].im.abs());
            worst = worst.max(r);
            let _ = writeln!(csv, "{n},{m},{},{},{}", fmt_f64(gram[(n, m)].re), fmt_f64(expected), fmt_f64(r));
        }
    }
    write(&s.out, "gram.csv", &csv)?;
    println!("gram.max_residual: {}", fmt_f64(worst));
    let cert = step("certify_in_span", certify_in_span(&fam))?;
    verdict(s, &cert)
}

fn run_study(s: &Settings) -> Run {
    let longest = s.sizes.iter().copied().max().unwrap_or(0);
    let schedule = s.q_schedule.values(longest);
    let recipe = StudyRecipe { plus_weight: s.weights.0, minus_weight: s.weights.1 };
    let table = step("truncation_study", truncation_study(&schedule, &s.sizes, &recipe, Execution::default()))?;
    write(&s.out, "study.csv", &table.to_csv())?;
    write(&s.out, "study_meta.txt", &table.metadata())?;
    print!("{}", table.to_csv());
    Ok(Outcome::Pass)
}

fn run_neutral(s: &Settings) -> Run {
    let fam = step("neutral_demo", neutral_demo_family(s.m.unwrap_or(2)))?;
    write(&s.out, "frame.txt", &write_frame_file(fam.space(), &fam.vectors(), Some("{f_n} u {J f_n}, f_n spanning a hypermaximal neutral subspace")))?;
    verdict(s, &certify(&fam))
}
