//! Experiment configuration: flat key-value files, flag overrides,
//! explicit defaults, and a content hash naming the resolved experiment.

use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// The experiment a run dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    VerifyKernel,
    Simulate,
    PicardDemo,
    RegularitySweep,
    Moments,
    AppendixCheck,
}

impl Command {
    /// Kebab-case name used in files and output.
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyKernel => "verify-kernel",
            Command::Simulate => "simulate",
            Command::PicardDemo => "picard-demo",
            Command::RegularitySweep => "regularity-sweep",
            Command::Moments => "moments",
            Command::AppendixCheck => "appendix-check",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "verify-kernel" => Ok(Command::VerifyKernel),
            "simulate" => Ok(Command::Simulate),
            "picard-demo" => Ok(Command::PicardDemo),
            "regularity-sweep" => Ok(Command::RegularitySweep),
            "moments" => Ok(Command::Moments),
            "appendix-check" => Ok(Command::AppendixCheck),
            other => Err(format!(
                "unknown command `{other}`; expected verify-kernel, simulate, picard-demo, \
                 regularity-sweep, moments, or appendix-check"
            )),
        }
    }
}

/// Fully resolved experiment description; every field is explicit.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub lambda: f64,
    pub rho: f64,
    pub preset: String,
    pub sigma0: f64,
    pub ic_kind: String,
    pub ic_amplitude: f64,
    pub grid_l: f64,
    pub grid_n: usize,
    pub dt: f64,
    pub horizon: f64,
    pub t: f64,
    pub p: f64,
    pub n_replicates: usize,
    pub seed: u64,
    pub out: String,
    pub format: String,
}

/// Partially specified config collected from files and flags.
#[derive(Debug, Clone, Default)]
pub struct Draft {
    command: Option<Command>,
    lambda: Option<f64>,
    rho: Option<f64>,
    preset: Option<String>,
    sigma0: Option<f64>,
    ic_kind: Option<String>,
    ic_amplitude: Option<f64>,
    grid_l: Option<f64>,
    grid_n: Option<usize>,
    dt: Option<f64>,
    horizon: Option<f64>,
    t: Option<f64>,
    p: Option<f64>,
    n_replicates: Option<usize>,
    seed: Option<u64>,
    out: Option<String>,
    format: Option<String>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, place: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for key `{key}` {place}"))
}

impl Draft {
    /// Sets one key from its textual value; `place` locates errors.
    pub fn set(&mut self, key: &str, value: &str, place: &str) -> Result<(), String> {
        match key {
            "command" => self.command = Some(Command::parse(value)?),
            "lambda" => self.lambda = Some(parse_num(key, value, place)?),
            "rho" => self.rho = Some(parse_num(key, value, place)?),
            "preset" => self.preset = Some(value.to_string()),
            "sigma0" => self.sigma0 = Some(parse_num(key, value, place)?),
            "ic_kind" => self.ic_kind = Some(value.to_string()),
            "ic_amplitude" => self.ic_amplitude = Some(parse_num(key, value, place)?),
            "grid_l" => self.grid_l = Some(parse_num(key, value, place)?),
            "grid_n" => self.grid_n = Some(parse_num(key, value, place)?),
            "dt" => self.dt = Some(parse_num(key, value, place)?),
            "horizon" => self.horizon = Some(parse_num(key, value, place)?),
            "t" => self.t = Some(parse_num(key, value, place)?),
            "p" => self.p = Some(parse_num(key, value, place)?),
            "n_replicates" => self.n_replicates = Some(parse_num(key, value, place)?),
            "seed" => self.seed = Some(parse_num(key, value, place)?),
            "out" => self.out = Some(value.to_string()),
            "format" => self.format = Some(value.to_string()),
            other => return Err(format!("unknown key `{other}` {place}")),
        }
        Ok(())
    }

    /// Applies defaults, requires a seed, and validates enumerations.
    pub fn finalize(self) -> Result<ExperimentConfig, String> {
        let command = self.command.ok_or("command is required")?;
        let seed = self
            .seed
            .ok_or("seed is required; every run must be explicitly reproducible")?;
        let horizon = self.horizon.unwrap_or(0.5);
        let t = self.t.unwrap_or(match command {
            Command::VerifyKernel => 1.0,
            _ => horizon,
        });
        let cfg = ExperimentConfig {
            command,
            lambda: self.lambda.unwrap_or(2.0),
            rho: self.rho.unwrap_or(1.0),
            preset: self.preset.unwrap_or_else(|| "additive".to_string()),
            sigma0: self.sigma0.unwrap_or(1.0),
            ic_kind: self.ic_kind.unwrap_or_else(|| "constant".to_string()),
            ic_amplitude: self.ic_amplitude.unwrap_or(0.0),
            grid_l: self.grid_l.unwrap_or(16.0),
            grid_n: self.grid_n.unwrap_or(1024),
            dt: self.dt.unwrap_or(1e-3),
            horizon,
            t,
            p: self.p.unwrap_or(2.0),
            n_replicates: self.n_replicates.unwrap_or(100),
            seed,
            out: self.out.unwrap_or_else(|| "out".to_string()),
            format: self.format.unwrap_or_else(|| "csv".to_string()),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), String> {
        match self.format.as_str() {
            "csv" | "json" => {}
            other => return Err(format!("format `{other}` is not csv or json")),
        }
        match self.preset.as_str() {
            "additive" | "affine" | "bounded-smooth" => {}
            other => {
                return Err(format!(
                    "preset `{other}` is not additive, affine, or bounded-smooth"
                ))
            }
        }
        match self.ic_kind.as_str() {
            "constant" | "smooth-cosine" | "hoelder-rough" | "random-field" => {}
            other => {
                return Err(format!(
                    "ic_kind `{other}` is not constant, smooth-cosine, hoelder-rough, \
                     or random-field"
                ))
            }
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt {} is not positive", self.dt));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(format!("horizon {} is not positive", self.horizon));
        }
        Ok(())
    }

    /// Canonical `key = value` lines of the experiment identity, sorted by
    /// key; output location and emit format are excluded so the hash names
    /// the experiment rather than where its files land.
    fn hash_lines(&self) -> Vec<String> {
        vec![
            format!("command = {}", self.command.name()),
            format!("dt = {}", self.dt),
            format!("grid_l = {}", self.grid_l),
            format!("grid_n = {}", self.grid_n),
            format!("horizon = {}", self.horizon),
            format!("ic_amplitude = {}", self.ic_amplitude),
            format!("ic_kind = {}", self.ic_kind),
            format!("lambda = {}", self.lambda),
            format!("n_replicates = {}", self.n_replicates),
            format!("p = {}", self.p),
            format!("preset = {}", self.preset),
            format!("rho = {}", self.rho),
            format!("seed = {}", self.seed),
            format!("sigma0 = {}", self.sigma0),
            format!("t = {}", self.t),
        ]
    }

    /// SHA-256 over the canonical lines, hex encoded.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for line in self.hash_lines() {
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// The manifest object: the full resolved config plus provenance.
    pub fn manifest(&self, wall_time_seconds: f64) -> String {
        let mut map = BTreeMap::new();
        map.insert("command", Value::from(self.command.name()));
        map.insert("lambda", Value::from(self.lambda));
        map.insert("rho", Value::from(self.rho));
        map.insert("preset", Value::from(self.preset.as_str()));
        map.insert("sigma0", Value::from(self.sigma0));
        map.insert("ic_kind", Value::from(self.ic_kind.as_str()));
        map.insert("ic_amplitude", Value::from(self.ic_amplitude));
        map.insert("grid_l", Value::from(self.grid_l));
        map.insert("grid_n", Value::from(self.grid_n as u64));
        map.insert("dt", Value::from(self.dt));
        map.insert("horizon", Value::from(self.horizon));
        map.insert("t", Value::from(self.t));
        map.insert("p", Value::from(self.p));
        map.insert("n_replicates", Value::from(self.n_replicates as u64));
        map.insert("seed", Value::from(self.seed));
        map.insert("out", Value::from(self.out.as_str()));
        map.insert("format", Value::from(self.format.as_str()));
        map.insert("config_hash", Value::from(self.config_hash()));
        map.insert("wall_time_seconds", Value::from(wall_time_seconds));
        serde_json::to_string_pretty(&map).expect("manifest serialization cannot fail")
    }
}

/// Reads a draft from a flat key-value file or a previously written
/// manifest; manifests are recognized by their leading brace.
pub fn load_file(path: &Path) -> Result<Draft, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        load_manifest(&text)
    } else {
        load_flat(&text)
    }
}

fn load_flat(text: &str) -> Result<Draft, String> {
    let mut draft = Draft::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let place = format!("at line {}", i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("expected `key = value` {place}"))?;
        draft.set(key.trim(), value.trim(), &place)?;
    }
    Ok(draft)
}

fn load_manifest(text: &str) -> Result<Draft, String> {
    let map: serde_json::Map<String, Value> =
        serde_json::from_str(text).map_err(|e| format!("malformed manifest: {e}"))?;
    let mut draft = Draft::default();
    for (key, value) in &map {
        if key == "config_hash" || key == "wall_time_seconds" {
            continue;
        }
        let text_value = match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        draft.set(key, &text_value, "in the manifest")?;
    }
    Ok(draft)
}

/// Flag values captured from the command line; every field overrides the
/// corresponding file key when present.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Flat key-value config file (or a manifest.json) to start from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fractional order of the equation.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Hoelder regularity of rough initial data.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Coefficient preset: additive, affine, or bounded-smooth.
    #[arg(long)]
    pub preset: Option<String>,
    /// Noise amplitude of the additive preset.
    #[arg(long)]
    pub sigma0: Option<f64>,
    /// Initial profile: constant, smooth-cosine, hoelder-rough, random-field.
    #[arg(long = "ic-kind")]
    pub ic_kind: Option<String>,
    /// Amplitude (or constant value) of the initial profile.
    #[arg(long = "ic-amplitude")]
    pub ic_amplitude: Option<f64>,
    /// Number of spatial grid points.
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Half-width of the periodic domain [-L, L).
    #[arg(long = "grid-l")]
    pub grid_l: Option<f64>,
    /// Time step of the integrator.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final simulation time.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Evaluation time for kernel checks and moment estimates.
    #[arg(long)]
    pub t: Option<f64>,
    /// Moment order.
    #[arg(long)]
    pub p: Option<f64>,
    /// Monte Carlo replicate count.
    #[arg(long = "n-replicates")]
    pub n_replicates: Option<usize>,
    /// RNG seed; required, no entropy default.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Result format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

/// Resolves the invoked subcommand plus flags (and optional file) into a
/// complete config; flags override file values.
pub fn resolve(command: Command, flags: &Flags) -> Result<ExperimentConfig, String> {
    let mut draft = match &flags.config {
        Some(path) => load_file(path)?,
        None => Draft::default(),
    };
    draft.command = Some(command);
    if let Some(v) = flags.lambda {
        draft.lambda = Some(v);
    }
    if let Some(v) = flags.rho {
        draft.rho = Some(v);
    }
    if let Some(v) = &flags.preset {
        draft.preset = Some(v.clone());
    }
    if let Some(v) = flags.sigma0 {
        draft.sigma0 = Some(v);
    }
    if let Some(v) = &flags.ic_kind {
        draft.ic_kind = Some(v.clone());
    }
    if let Some(v) = flags.ic_amplitude {
        draft.ic_amplitude = Some(v);
    }
    if let Some(v) = flags.grid_n {
        draft.grid_n = Some(v);
    }
    if let Some(v) = flags.grid_l {
        draft.grid_l = Some(v);
    }
    if let Some(v) = flags.dt {
        draft.dt = Some(v);
    }
    if let Some(v) = flags.horizon {
        draft.horizon = Some(v);
    }
    if let Some(v) = flags.t {
        draft.t = Some(v);
    }
    if let Some(v) = flags.p {
        draft.p = Some(v);
    }
    if let Some(v) = flags.n_replicates {
        draft.n_replicates = Some(v);
    }
    if let Some(v) = flags.seed {
        draft.seed = Some(v);
    }
    if let Some(v) = &flags.out {
        draft.out = Some(v.clone());
    }
    if let Some(v) = &flags.format {
        draft.format = Some(v.clone());
    }
    draft.finalize()
}
