//! Sectioned `key = value` run configuration.
//!
//! ```text
//! # Gray-Scott spots
//! [model]
//! name = gray_scott
//! K = 0.055            # anything else is a model parameter
//!
//! [grid]
//! n = 128
//! bc = periodic        # optional, model default otherwise
//!
//! [time]
//! tau = 1
//! T = 8000
//! snapshots = 500 1000 2000 4000 8000
//!
//! [output]
//! dir = out/gs
//! pgm = true
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use fracrd::etd::steps_between;
use fracrd::grid::BoundaryCondition;
use fracrd::models::{self, ReactionModel};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub model: String,
    /// Parameter overrides in file order, with their line numbers.
    pub params: Vec<(String, f64, usize)>,
    pub dim: Option<usize>,
    pub n: usize,
    pub bc: Option<BoundaryCondition>,
    pub tau: f64,
    pub t0: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub out_dir: PathBuf,
    pub pgm: bool,
    pub summary_every: usize,
    /// Reserved; presets are deterministic.
    pub seed: u64,
}

struct Entry {
    value: String,
    line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config {
        line: Some(line),
        msg: msg.into(),
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config {
        line: None,
        msg: format!("missing required key `{key}`"),
    }
}

fn number(e: &Entry, key: &str) -> Result<f64, CliError> {
    e.value.parse::<f64>().map_err(|_| {
        err(
            e.line,
            format!("`{key}` expects a number, got `{}`", e.value),
        )
    })
}

fn integer(e: &Entry, key: &str) -> Result<usize, CliError> {
    e.value.parse::<usize>().map_err(|_| {
        err(
            e.line,
            format!("`{key}` expects a non-negative integer, got `{}`", e.value),
        )
    })
}

fn boolean(e: &Entry, key: &str) -> Result<bool, CliError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(err(
            e.line,
            format!("`{key}` expects true or false, got `{other}`"),
        )),
    }
}

const KNOWN: [(&str, &[&str]); 4] = [
    ("grid", &["n", "bc", "dim"]),
    ("time", &["tau", "T", "t0", "snapshots"]),
    ("output", &["dir", "pgm", "summary_every"]),
    ("run", &["seed"]),
];

pub fn parse_config(text: &str) -> Result<SimulationConfig, CliError> {
    let mut section = String::new();
    let mut table: HashMap<(String, String), Entry> = HashMap::new();
    let mut params = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, "unterminated section header"))?
                .trim();
            if name != "model" && !KNOWN.iter().any(|(s, _)| *s == name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if section.is_empty() {
            return Err(err(line, format!("`{key}` appears before any [section]")));
        }
        if key.is_empty() || value.is_empty() {
            return Err(err(line, "empty key or value"));
        }
        if section == "model" && key != "name" {
            let v = value
                .parse::<f64>()
                .map_err(|_| err(line, format!("model parameter `{key}` expects a number")))?;
            params.push((key.to_string(), v, line));
            continue;
        }
        if section != "model" {
            let allowed = KNOWN
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, k)| *k)
                .unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(err(line, format!("unknown key `{key}` in [{section}]")));
            }
        }
        let slot = (section.clone(), key.to_string());
        if let Some(prev) = table.get(&slot) {
            return Err(err(
                line,
                format!("`{key}` already set on line {}", prev.line),
            ));
        }
        table.insert(
            slot,
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }

    let get = |s: &str, k: &str| table.get(&(s.to_string(), k.to_string()));
    let model = get("model", "name")
        .ok_or_else(|| missing("model.name"))?
        .value
        .clone();
    let n_entry = get("grid", "n").ok_or_else(|| missing("grid.n"))?;
    let n = integer(n_entry, "n")?;
    let bc = get("grid", "bc")
        .map(|e| {
            e.value
                .parse::<BoundaryCondition>()
                .map_err(|m| err(e.line, m.to_string()))
        })
        .transpose()?;
    let dim = get("grid", "dim").map(|e| integer(e, "dim")).transpose()?;
    let tau_entry = get("time", "tau").ok_or_else(|| missing("time.tau"))?;
    let tau = number(tau_entry, "tau")?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(err(tau_entry.line, format!("tau must be > 0, got {tau}")));
    }
    let t0 = get("time", "t0")
        .map(|e| number(e, "t0"))
        .transpose()?
        .unwrap_or(0.0);
    let t_entry = get("time", "T").ok_or_else(|| missing("time.T"))?;
    let t_end = number(t_entry, "T")?;
    if !(t_end >= t0) {
        return Err(err(t_entry.line, format!("T = {t_end} precedes t0 = {t0}")));
    }
    steps_between(t0, t_end, tau).map_err(|e| err(t_entry.line, e.to_string()))?;
    let snapshots = match get("time", "snapshots") {
        Some(e) => {
            let mut out = Vec::new();
            for tok in e.value.split_whitespace() {
                let t: f64 = tok
                    .parse()
                    .map_err(|_| err(e.line, format!("snapshot time `{tok}` is not a number")))?;
                if t < t0 || t > t_end {
                    return Err(err(
                        e.line,
                        format!("snapshot time {t} outside [{t0}, {t_end}]"),
                    ));
                }
                steps_between(t0, t, tau).map_err(|x| err(e.line, x.to_string()))?;
                out.push(t);
            }
            out
        }
        None => Vec::new(),
    };
    let out_dir = PathBuf::from(
        get("output", "dir")
            .map(|e| e.value.as_str())
            .unwrap_or("out"),
    );
    let pgm = get("output", "pgm")
        .map(|e| boolean(e, "pgm"))
        .transpose()?
        .unwrap_or(false);
    let summary_every = match get("output", "summary_every") {
        Some(e) => {
            let k = integer(e, "summary_every")?;
            if k == 0 {
                return Err(err(e.line, "summary_every must be >= 1"));
            }
            k
        }
        None => 1,
    };
    let seed = get("run", "seed")
        .map(|e| integer(e, "seed"))
        .transpose()?
        .unwrap_or(0) as u64;

    let cfg = SimulationConfig {
        model,
        params,
        dim,
        n,
        bc,
        tau,
        t0,
        t_end,
        snapshots,
        out_dir,
        pgm,
        summary_every,
        seed,
    };
    // fail early on model-level problems, with line numbers
    let model = cfg.build_model()?;
    if let Some(d) = cfg.dim {
        if d != model.domain().dim {
            let line = get("grid", "dim").map(|e| e.line).unwrap_or(0);
            return Err(err(
                line,
                format!(
                    "{} is {}D, config says dim = {d}",
                    model.name(),
                    model.domain().dim
                ),
            ));
        }
    }
    models::grid_for(model.as_ref(), cfg.n, cfg.bc)
        .map_err(|e| err(n_entry.line, e.to_string()))?;
    Ok(cfg)
}

impl SimulationConfig {
    /// Preset with defaults, then the overrides in file order.
    pub fn build_model(&self) -> Result<Box<dyn ReactionModel>, CliError> {
        let mut model = models::by_name(&self.model).map_err(|e| CliError::Config {
            line: None,
            msg: e.to_string(),
        })?;
        for (key, value, line) in &self.params {
            model
                .set_param(key, *value)
                .map_err(|e| err(*line, e.to_string()))?;
        }
        for sp in model.species() {
            if !(sp.kappa >= 0.0) {
                return Err(CliError::Config {
                    line: None,
                    msg: format!("kappa of species {} must be >= 0", sp.name),
                });
            }
        }
        Ok(model)
    }
}
