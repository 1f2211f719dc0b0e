//! Experiment configuration: command-line flags, a flat `key = value` file,
//! and per-experiment defaults, merged in that order of precedence.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, ValueEnum};

use crate::LabError;

const DEFAULTS_HELP: &str = "\
Defaults (flags override the --config file, which overrides these):
  fig1              points 4096, box [-2,2], region [0,1], x0 0.5, sigma 0.05, k0 0,
                    alpha 0, T 0.6, N 150, panels 4
  zeno-convergence  points 2048, box [-2,2], region [0,1], x0 0.5, sigma 0.07, k0 0,
                    mass 1, T 0.5, steps-list 8,16,32,64,128,256
  spectrum          model free-dirichlet, points 255, mass 1, count 5
                    (compressed-free: points 4096, box [-2,2], region [0,1])
  euclid            points 511 on [a,b] = [0,1], mass 1, tau 0.1,
                    steps-list 8,16,32,64, terms 5
  leak-exponent     model free, points 4096, box [-2,2], region [0,1], sigma 0.05,
                    k0 0, mass 1, t-count 10; free: x0 0.05, t in [1e-4,1e-3];
                    momentum: x0 0.95, t in [1e-3,1e-2]
  twolevel          T 1, steps-list 10,100,1000,10000

Config file: one `key = value` per line, '#' starts a comment. Keys are the
long flag names without dashes prefix (T and N are accepted for time/steps).
ZENO_LAB_THREADS caps the worker pool.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Fig1,
    ZenoConvergence,
    Spectrum,
    Euclid,
    LeakExponent,
    Twolevel,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::ZenoConvergence => "zeno-convergence",
            Experiment::Spectrum => "spectrum",
            Experiment::Euclid => "euclid",
            Experiment::LeakExponent => "leak-exponent",
            Experiment::Twolevel => "twolevel",
        }
    }

    /// What the experiment reproduces, written into every provenance header.
    pub fn anchor(&self) -> &'static str {
        match self {
            Experiment::Fig1 => "H=p with repeated projections leaks out; the periodic extension confines",
            Experiment::ZenoConvergence => "[E exp(-iHT/N) E]^N converges to exp(-iT EHE) E",
            Experiment::Spectrum => "Dirichlet spectra of the Zeno Hamiltonians",
            Experiment::Euclid => "restricted Wiener products converge to the Dirichlet heat kernel",
            Experiment::LeakExponent => "short-time change of the survival probability",
            Experiment::Twolevel => "two-level survival cos(T/N)^(2N)",
        }
    }

    fn keys(&self) -> &'static [&'static str] {
        match self {
            Experiment::Fig1 => &["points", "x-min", "x-max", "a", "b", "x0", "sigma", "k0", "alpha", "time", "steps", "panels"],
            Experiment::ZenoConvergence => {
                &["points", "x-min", "x-max", "a", "b", "x0", "sigma", "k0", "mass", "time", "steps-list"]
            }
            Experiment::Spectrum => &["model", "points", "x-min", "x-max", "a", "b", "mass", "count"],
            Experiment::Euclid => &["points", "a", "b", "mass", "tau", "steps-list", "terms"],
            Experiment::LeakExponent => {
                &["model", "points", "x-min", "x-max", "a", "b", "x0", "sigma", "k0", "mass", "t-min", "t-max", "t-count"]
            }
            Experiment::Twolevel => &["time", "steps-list"],
        }
    }
}

/// Every tunable parameter; `None` means "not given at this layer".
#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Params {
    /// Grid points
    #[arg(long)]
    pub points: Option<usize>,
    /// Left edge of the simulation box
    #[arg(long = "x-min")]
    pub x_min: Option<f64>,
    /// Right edge of the simulation box
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    /// Left end of the measured interval
    #[arg(long)]
    pub a: Option<f64>,
    /// Right end of the measured interval
    #[arg(long)]
    pub b: Option<f64>,
    /// Packet centre
    #[arg(long)]
    pub x0: Option<f64>,
    /// Packet width
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Packet mean wavenumber
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Boundary phase of the periodic extension, in [0, 2 pi)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Total evolution time
    #[arg(long, alias = "T")]
    pub time: Option<f64>,
    /// Number of measurements
    #[arg(long, alias = "N")]
    pub steps: Option<usize>,
    /// Comma-separated list of measurement counts
    #[arg(long = "steps-list", value_delimiter = ',')]
    pub steps_list: Option<Vec<usize>>,
    /// Total imaginary time
    #[arg(long)]
    pub tau: Option<f64>,
    /// Terms in the Dirichlet heat series
    #[arg(long)]
    pub terms: Option<usize>,
    /// spectrum: free-dirichlet | momentum-quadratic | compressed-free; leak-exponent: free | momentum
    #[arg(long)]
    pub model: Option<String>,
    /// Snapshot panels in fig1
    #[arg(long)]
    pub panels: Option<usize>,
    /// Eigenvalues reported by spectrum
    #[arg(long)]
    pub count: Option<usize>,
    /// Shortest probe time
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    /// Longest probe time
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of log-spaced probe times
    #[arg(long = "t-count")]
    pub t_count: Option<usize>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, LabError> {
    value.trim().parse().map_err(|_| LabError::Usage(format!("malformed value for {key}: {value:?}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, LabError> {
    value.split(',').map(|v| parse_num(key, v)).collect()
}

impl Params {
    /// Set one key from its textual value (config-file syntax).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), LabError> {
        match key {
            "points" => self.points = Some(parse_num(key, value)?),
            "x-min" => self.x_min = Some(parse_num(key, value)?),
            "x-max" => self.x_max = Some(parse_num(key, value)?),
            "a" => self.a = Some(parse_num(key, value)?),
            "b" => self.b = Some(parse_num(key, value)?),
            "x0" => self.x0 = Some(parse_num(key, value)?),
            "sigma" => self.sigma = Some(parse_num(key, value)?),
            "k0" => self.k0 = Some(parse_num(key, value)?),
            "mass" => self.mass = Some(parse_num(key, value)?),
            "alpha" => self.alpha = Some(parse_num(key, value)?),
            "time" | "T" => self.time = Some(parse_num(key, value)?),
            "steps" | "N" => self.steps = Some(parse_num(key, value)?),
            "steps-list" => self.steps_list = Some(parse_list(key, value)?),
            "tau" => self.tau = Some(parse_num(key, value)?),
            "terms" => self.terms = Some(parse_num(key, value)?),
            "model" => self.model = Some(value.trim().to_string()),
            "panels" => self.panels = Some(parse_num(key, value)?),
            "count" => self.count = Some(parse_num(key, value)?),
            "t-min" => self.t_min = Some(parse_num(key, value)?),
            "t-max" => self.t_max = Some(parse_num(key, value)?),
            "t-count" => self.t_count = Some(parse_num(key, value)?),
            _ => return Err(LabError::Usage(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parse the flat `key = value` format.
    pub fn from_config_text(text: &str) -> Result<Self, LabError> {
        let mut params = Params::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            params
                .set(key.trim(), value)
                .map_err(|e| LabError::Usage(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(params)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LabError::Io { path: path.to_path_buf(), source })?;
        Self::from_config_text(&text)
    }

    /// Values set here win; the rest come from `lower`.
    pub fn over(self, lower: Params) -> Params {
        Params {
            points: self.points.or(lower.points),
            x_min: self.x_min.or(lower.x_min),
            x_max: self.x_max.or(lower.x_max),
            a: self.a.or(lower.a),
            b: self.b.or(lower.b),
            x0: self.x0.or(lower.x0),
            sigma: self.sigma.or(lower.sigma),
            k0: self.k0.or(lower.k0),
            mass: self.mass.or(lower.mass),
            alpha: self.alpha.or(lower.alpha),
            time: self.time.or(lower.time),
            steps: self.steps.or(lower.steps),
            steps_list: self.steps_list.or(lower.steps_list),
            tau: self.tau.or(lower.tau),
            terms: self.terms.or(lower.terms),
            model: self.model.or(lower.model),
            panels: self.panels.or(lower.panels),
            count: self.count.or(lower.count),
            t_min: self.t_min.or(lower.t_min),
            t_max: self.t_max.or(lower.t_max),
            t_count: self.t_count.or(lower.t_count),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "zeno-lab",
    version,
    about = "Reproducible quantum Zeno experiments",
    after_help = DEFAULTS_HELP,
    allow_negative_numbers = true
)]
pub struct Cli {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Flat key = value file; flags take precedence over it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "zeno-out")]
    pub out: PathBuf,
    /// Also write SVG plots
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub params: Params,
}

/// Fully resolved parameters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub sigma: f64,
    pub k0: f64,
    pub mass: f64,
    pub alpha: f64,
    pub time: f64,
    pub steps: usize,
    pub steps_list: Vec<usize>,
    pub tau: f64,
    pub terms: usize,
    pub model: String,
    pub panels: usize,
    pub count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
}

impl Settings {
    fn defaults(experiment: Experiment, model: Option<&str>) -> Settings {
        let mut s = Settings {
            points: 4096,
            x_min: -2.0,
            x_max: 2.0,
            a: 0.0,
            b: 1.0,
            x0: 0.5,
            sigma: 0.05,
            k0: 0.0,
            mass: 1.0,
            alpha: 0.0,
            time: 0.6,
            steps: 150,
            steps_list: vec![8, 16, 32, 64, 128, 256],
            tau: 0.1,
            terms: 5,
            model: String::new(),
            panels: 4,
            count: 5,
            t_min: 1e-4,
            t_max: 1e-3,
            t_count: 10,
        };
        match experiment {
            Experiment::Fig1 => {}
            Experiment::ZenoConvergence => {
                s.points = 2048;
                s.sigma = 0.07;
                s.time = 0.5;
            }
            Experiment::Spectrum => {
                s.model = model.unwrap_or("free-dirichlet").to_string();
                if s.model != "compressed-free" {
                    s.points = 255;
                }
            }
            Experiment::Euclid => {
                s.points = 511;
                s.steps_list = vec![8, 16, 32, 64];
            }
            Experiment::LeakExponent => {
                s.model = model.unwrap_or("free").to_string();
                if s.model == "momentum" {
                    s.x0 = 0.95;
                    s.t_min = 1e-3;
                    s.t_max = 1e-2;
                } else {
                    s.x0 = 0.05;
                }
            }
            Experiment::Twolevel => {
                s.time = 1.0;
                s.steps_list = vec![10, 100, 1000, 10000];
            }
        }
        s
    }

    fn apply(mut self, p: Params) -> Settings {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = p.$f { self.$f = v; } )* };
        }
        take!(points, x_min, x_max, a, b, x0, sigma, k0, mass, alpha, time, steps, steps_list, tau, terms, model,
              panels, count, t_min, t_max, t_count);
        self
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "points" => self.points.to_string(),
            "x-min" => self.x_min.to_string(),
            "x-max" => self.x_max.to_string(),
            "a" => self.a.to_string(),
            "b" => self.b.to_string(),
            "x0" => self.x0.to_string(),
            "sigma" => self.sigma.to_string(),
            "k0" => self.k0.to_string(),
            "mass" => self.mass.to_string(),
            "alpha" => self.alpha.to_string(),
            "time" => self.time.to_string(),
            "steps" => self.steps.to_string(),
            "steps-list" => self.steps_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
            "tau" => self.tau.to_string(),
            "terms" => self.terms.to_string(),
            "model" => self.model.clone(),
            "panels" => self.panels.to_string(),
            "count" => self.count.to_string(),
            "t-min" => self.t_min.to_string(),
            "t-max" => self.t_max.to_string(),
            "t-count" => self.t_count.to_string(),
            _ => unreachable!("key lists are static"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub settings: Settings,
    pub out_dir: PathBuf,
    pub svg: bool,
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}

impl ExperimentConfig {
    /// Merge flags over the file over the defaults and validate everything.
    pub fn resolve(experiment: Experiment, flags: Params, file: Params, out_dir: PathBuf, svg: bool) -> Result<Self, LabError> {
        let merged = flags.over(file);
        let settings = Settings::defaults(experiment, merged.model.as_deref()).apply(merged);
        let cfg = ExperimentConfig { experiment, settings, out_dir, svg };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_cli(cli: Cli) -> Result<Self, LabError> {
        let file = match &cli.config {
            Some(path) => Params::from_config_file(path)?,
            None => Params::default(),
        };
        Self::resolve(cli.experiment, cli.params, file, cli.out, cli.svg)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let s = &self.settings;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() { Ok(()) } else { Err(usage(format!("{name} must be positive and finite, got {v}"))) }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() { Ok(()) } else { Err(usage(format!("{name} must be finite, got {v}"))) }
        };
        let keys = self.experiment.keys();
        let uses = |k: &str| keys.contains(&k);
        if uses("points") && s.points < 2 {
            return Err(usage("points must be at least 2"));
        }
        for (k, v) in [("x-min", s.x_min), ("x-max", s.x_max), ("a", s.a), ("b", s.b), ("x0", s.x0), ("k0", s.k0)] {
            if uses(k) {
                finite(k, v)?;
            }
        }
        if uses("x-min") && s.x_min >= s.x_max {
            return Err(usage(format!("box [{}, {}] is empty", s.x_min, s.x_max)));
        }
        if uses("a") && s.a >= s.b {
            return Err(usage(format!("interval [{}, {}] is empty", s.a, s.b)));
        }
        if uses("x-min") && (s.a < s.x_min || s.b > s.x_max) {
            return Err(usage(format!("interval [{}, {}] leaves the box [{}, {}]", s.a, s.b, s.x_min, s.x_max)));
        }
        for (k, v) in [("sigma", s.sigma), ("mass", s.mass), ("tau", s.tau), ("t-min", s.t_min)] {
            if uses(k) {
                positive(k, v)?;
            }
        }
        if uses("time") && !(s.time >= 0.0 && s.time.is_finite()) {
            return Err(usage(format!("time must be non-negative and finite, got {}", s.time)));
        }
        if uses("alpha") && !(0.0..2.0 * PI).contains(&s.alpha) {
            return Err(usage(format!("alpha must lie in [0, 2 pi), got {}", s.alpha)));
        }
        if uses("steps") && s.steps == 0 {
            return Err(usage("steps must be positive"));
        }
        if uses("steps-list") && (s.steps_list.is_empty() || s.steps_list[0] == 0 || s.steps_list.windows(2).any(|w| w[1] <= w[0])) {
            return Err(usage("steps-list must be positive and strictly ascending"));
        }
        if uses("terms") && s.terms == 0 {
            return Err(usage("terms must be positive"));
        }
        if uses("count") && s.count == 0 {
            return Err(usage("count must be positive"));
        }
        if uses("panels") {
            if s.panels < 2 {
                return Err(usage("panels must be at least 2"));
            }
            if s.steps % (s.panels - 1) != 0 {
                return Err(usage(format!("steps ({}) must be a multiple of panels - 1 ({})", s.steps, s.panels - 1)));
            }
        }
        if uses("t-max") && !(s.t_max > s.t_min && s.t_max.is_finite()) {
            return Err(usage("t-max must exceed t-min"));
        }
        if uses("t-count") && s.t_count < 2 {
            return Err(usage("t-count must be at least 2"));
        }
        let models: &[&str] = match self.experiment {
            Experiment::Spectrum => &["free-dirichlet", "momentum-quadratic", "compressed-free"],
            Experiment::LeakExponent => &["free", "momentum"],
            _ => &[""],
        };
        if !models.contains(&s.model.as_str()) {
            return Err(usage(format!("model {:?} is not available for {}", s.model, self.experiment.name())));
        }
        Ok(())
    }

    /// Canonical `key = value` echo of the parameters the experiment reads.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.experiment.keys().iter().map(|k| (k.to_string(), self.settings.value_of(k))).collect()
    }

    /// Hex SHA-256 of the experiment name and the canonical echo.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut text = format!("experiment = {}\n", self.experiment.name());
        for (k, v) in self.echo() {
            writeln!(text, "{k} = {v}").expect("writing to a String");
        }
        Sha256::digest(text.as_bytes()).iter().fold(String::with_capacity(64), |mut acc, b| {
            write!(acc, "{b:02x}").expect("writing to a String");
            acc
        })
    }
}

/// `parse_config` over an argument list (first element is the program name).
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, LabError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| LabError::Usage(e.to_string()))?;
    ExperimentConfig::from_cli(cli)
}
