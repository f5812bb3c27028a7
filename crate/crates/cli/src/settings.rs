use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Parser;
use krein_frames::format::parse_config;
use krein_frames::l2::BasisKind;
use krein_frames::Definition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Certify,
    Reconstruct,
    Transport,
    L2Example,
    TruncationStudy,
    NeutralDemo,
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "certify" => Scenario::Certify,
            "reconstruct" => Scenario::Reconstruct,
            "transport" => Scenario::Transport,
            "l2_example" => Scenario::L2Example,
            "truncation_study" => Scenario::TruncationStudy,
            "neutral_demo" => Scenario::NeutralDemo,
            other => return Err(format!("unknown scenario '{other}'")),
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Certify => "certify",
            Scenario::Reconstruct => "reconstruct",
            Scenario::Transport => "transport",
            Scenario::L2Example => "l2_example",
            Scenario::TruncationStudy => "truncation_study",
            Scenario::NeutralDemo => "neutral_demo",
        })
    }
}

/// Frames in finite-dimensional Krein spaces: certification, reconstruction,
/// Q-transport, the L^2 parity example and truncation studies.
///
/// Every flag can also be given as `key: value` in `--config` (dashes become
/// underscores). A flag on the command line wins over the config file.
#[derive(Debug, Parser, Default)]
#[command(name = "kframe", version)]
pub struct Args {
    /// certify | reconstruct | transport | l2_example | truncation_study | neutral_demo
    #[arg(long)]
    pub scenario: Option<String>,
    /// Frame file (`dim`, `J`, `vectors` sections)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory, created if missing [default: kframe-out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for random probes and generated instances [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Smallest accepted A/B before a certificate counts as negative [default: 1e-10]
    #[arg(long)]
    pub tol_cert: Option<f64>,
    /// Largest accepted relative reconstruction residual [default: 1e-8]
    #[arg(long)]
    pub tol_recon: Option<f64>,
    /// Study sizes, e.g. `2..40` or `2,4,8` [default: 2..40]
    #[arg(long)]
    pub sizes: Option<String>,
    /// `linear:<step>`, `const:<q>` or an explicit list `q1,q2,...` [default: linear:1]
    #[arg(long)]
    pub q_schedule: Option<String>,
    /// `key: value` scenario file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// def11 | def12 | def13 [default: def13]
    #[arg(long)]
    pub definition: Option<String>,
    /// Random vectors probed by `reconstruct` [default: 16]
    #[arg(long)]
    pub probes: Option<usize>,
    /// Half-width of the interval in `l2_example` [default: 1]
    #[arg(long)]
    pub a: Option<f64>,
    /// Quadrature nodes in `l2_example` [default: 64]
    #[arg(long)]
    pub n_nodes: Option<usize>,
    /// legendre | fourier [default: legendre]
    #[arg(long)]
    pub basis: Option<String>,
    /// Basis size in `l2_example`, block count in `neutral_demo` [default: 8 / 2]
    #[arg(long)]
    pub m: Option<usize>,
    /// on | off: multiply the basis by exp(-x/2) [default: on]
    #[arg(long)]
    pub decay: Option<String>,
    /// Largest singular value of the random Q in `transport` [default: 1]
    #[arg(long)]
    pub q_norm: Option<f64>,
    /// Weights of the study base frame on H+ and H-, `w+,w-` [default: 1,1]
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub scenario: Scenario,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub tol_cert: f64,
    pub tol_recon: f64,
    pub sizes: Vec<usize>,
    pub q_schedule: ScheduleSpec,
    pub definition: Definition,
    pub probes: usize,
    pub a: f64,
    pub n_nodes: usize,
    pub basis: BasisKind,
    pub m: Option<usize>,
    pub decay: bool,
    pub q_norm: f64,
    pub weights: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSpec {
    Linear(f64),
    Const(f64),
    List(Vec<f64>),
}

impl ScheduleSpec {
    pub fn values(&self, len: usize) -> Vec<f64> {
        match self {
            ScheduleSpec::Linear(step) => (1..=len).map(|k| step * k as f64).collect(),
            ScheduleSpec::Const(q) => vec![*q; len],
            ScheduleSpec::List(v) => v.clone(),
        }
    }
}

impl FromStr for ScheduleSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}' in q schedule"));
        if let Some(rest) = s.strip_prefix("linear:") {
            Ok(ScheduleSpec::Linear(num(rest)?))
        } else if let Some(rest) = s.strip_prefix("const:") {
            Ok(ScheduleSpec::Const(num(rest)?))
        } else {
            Ok(ScheduleSpec::List(s.split(',').map(num).collect::<Result<_, _>>()?))
        }
    }
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let int = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size '{t}'"));
        if let Some((lo, hi)) = item.split_once("..") {
            let (lo, hi) = (int(lo)?, int(hi)?);
            if lo > hi {
                return Err(format!("empty size range '{item}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(int(item)?);
        }
    }
    Ok(out)
}

fn parse_on_off(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected on/off, got '{other}'")),
    }
}

fn parse_weights(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("weights must be 'w+,w-', got '{s}'"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad weight '{t}'"));
    Ok((num(a)?, num(b)?))
}

/// Merges flags over the config file over defaults.
pub fn resolve(args: Args) -> Result<Settings, String> {
    let cfg: BTreeMap<String, String> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => BTreeMap::new(),
    };
    const KNOWN: [&str; 18] = [
        "scenario", "input", "out", "seed", "tol_cert", "tol_recon", "sizes", "q_schedule", "definition", "probes",
        "a", "n_nodes", "basis", "m", "decay", "q_norm", "weights", "config",
    ];
    if let Some(k) = cfg.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(format!("unknown config key '{k}'"));
    }

    fn pick<T: FromStr>(flag: Option<T>, cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, String>
    where
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => cfg
                .get(key)
                .map(|s| s.parse::<T>().map_err(|e| format!("config key '{key}': {e}")))
                .transpose(),
        }
    }
    fn with<T>(raw: Option<String>, parse: impl Fn(&str) -> Result<T, String>, key: &str) -> Result<Option<T>, String> {
        raw.map(|s| parse(&s).map_err(|e| format!("{key}: {e}"))).transpose()
    }

    let scenario_raw =
        pick(args.scenario, &cfg, "scenario")?.ok_or_else(|| "no scenario given (--scenario or config)".to_string())?;
    let scenario: Scenario = scenario_raw.parse()?;
    let definition = with(pick(args.definition, &cfg, "definition")?, |s| s.parse::<Definition>().map_err(|e| e.to_string()), "definition")?
        .unwrap_or(Definition::Def13);
    let basis = with(pick(args.basis, &cfg, "basis")?, |s| s.parse::<BasisKind>().map_err(|e| e.to_string()), "basis")?
        .unwrap_or(BasisKind::Legendre);

    Ok(Settings {
        scenario,
        input: pick(args.input, &cfg, "input")?,
        out: pick(args.out, &cfg, "out")?.unwrap_or_else(|| PathBuf::from("kframe-out")),
        seed: pick(args.seed, &cfg, "seed")?.unwrap_or(0),
        tol_cert: pick(args.tol_cert, &cfg, "tol_cert")?.unwrap_or(1e-10),
        tol_recon: pick(args.tol_recon, &cfg, "tol_recon")?.unwrap_or(1e-8),
        sizes: with(pick(args.sizes, &cfg, "sizes")?, parse_sizes, "sizes")?.unwrap_or_else(|| (2..=40).collect()),
        q_schedule: with(pick(args.q_schedule, &cfg, "q_schedule")?, |s| s.parse::<ScheduleSpec>(), "q_schedule")?
            .unwrap_or(ScheduleSpec::Linear(1.0)),
        definition,
        probes: pick(args.probes, &cfg, "probes")?.unwrap_or(16),
        a: pick(args.a, &cfg, "a")?.unwrap_or(1.0),
        n_nodes: pick(args.n_nodes, &cfg, "n_nodes")?.unwrap_or(64),
        basis,
        m: pick(args.m, &cfg, "m")?,
        decay: with(pick(args.decay, &cfg, "decay")?, parse_on_off, "decay")?.unwrap_or(true),
        q_norm: pick(args.q_norm, &cfg, "q_norm")?.unwrap_or(1.0),
        weights: with(pick(args.weights, &cfg, "weights")?, parse_weights, "weights")?.unwrap_or((1.0, 1.0)),
    })
}
