use std::path::PathBuf;

use jc_teleport::fisher::{Derivative, QfiEngine, DEFAULT_FD_STEP};
use jc_teleport::teleport::{Construction, PauliChannelMode, Protocol};

use crate::error::CliError;
use crate::sweep::{Quantity, SweepSpec};

pub fn protocol_from_str(s: &str) -> Result<Protocol, String> {
    match s {
        "ftp" => Ok(Protocol::Ftp),
        "stp" => Ok(Protocol::Stp),
        _ => Err(format!("unknown protocol {s:?} (expected ftp or stp)")),
    }
}

pub fn quantity_from_str(s: &str) -> Result<Quantity, String> {
    match s {
        "closed" => Ok(Quantity::FidelityClosed),
        "overlap" => Ok(Quantity::FidelityOverlapNorm),
        "qfi" => Ok(Quantity::QfiTheta),
        _ => Err(format!(
            "unknown quantity {s:?} (expected closed, overlap, or qfi)"
        )),
    }
}

pub fn engine_from_str(s: &str) -> Result<QfiEngine, String> {
    match s {
        "matrix" => Ok(QfiEngine::MatrixForm),
        "spectral" => Ok(QfiEngine::Spectral),
        "sld" => Ok(QfiEngine::Sld),
        _ => Err(format!(
            "unknown engine {s:?} (expected matrix, spectral, or sld)"
        )),
    }
}

pub fn derivative_from_str(s: &str) -> Result<Derivative, String> {
    match s {
        "analytic" => Ok(Derivative::Analytic),
        "fd" => Ok(Derivative::Central { h: DEFAULT_FD_STEP }),
        "richardson" => Ok(Derivative::Richardson { h: DEFAULT_FD_STEP }),
        _ => Err(format!(
            "unknown derivative {s:?} (expected analytic, fd, or richardson)"
        )),
    }
}

pub fn construction_from_str(s: &str) -> Result<Construction, String> {
    match s {
        "closed" => Ok(Construction::ClosedForm),
        "oracle" => Ok(Construction::ChannelOracle),
        _ => Err(format!(
            "unknown construction {s:?} (expected closed or oracle)"
        )),
    }
}

pub fn mode_from_str(s: &str) -> Result<PauliChannelMode, String> {
    match s {
        "hermitian" => Ok(PauliChannelMode::Hermitian),
        "literal" => Ok(PauliChannelMode::Literal),
        _ => Err(format!(
            "unknown correction mode {s:?} (expected hermitian or literal)"
        )),
    }
}

fn list_from_str(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {v:?}: {e}"))
        })
        .collect()
}

/// Sweep settings collected from a config file or from command line flags;
/// every field is optional so layers can be merged (defaults, then file,
/// then flags).
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub protocol: Option<Protocol>,
    pub quantity: Option<Quantity>,
    pub n: Option<u32>,
    pub nbar: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub tau_start: Option<f64>,
    pub tau_stop: Option<f64>,
    pub tau_count: Option<usize>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub engine: Option<QfiEngine>,
    pub derivative: Option<Derivative>,
    pub construction: Option<Construction>,
    pub mode: Option<PauliChannelMode>,
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut SweepSpec) {
        if let Some(v) = self.protocol {
            spec.protocol = v;
        }
        if let Some(v) = self.quantity {
            spec.quantity = v;
        }
        if let Some(v) = self.n {
            spec.n = v;
        }
        if let Some(v) = &self.nbar {
            spec.nbar = v.clone();
        }
        if let Some(v) = &self.delta {
            spec.delta = v.clone();
        }
        if let Some(v) = self.tau_start {
            spec.tau.start = v;
        }
        if let Some(v) = self.tau_stop {
            spec.tau.stop = v;
        }
        if let Some(v) = self.tau_count {
            spec.tau.count = v;
        }
        if let Some(v) = self.theta {
            spec.theta = v;
        }
        if let Some(v) = self.phi {
            spec.phi = v;
        }
        if let Some(v) = self.engine {
            spec.engine = v;
        }
        if let Some(v) = self.derivative {
            spec.derivative = v;
        }
        if let Some(v) = self.construction {
            spec.construction = v;
        }
        if let Some(v) = self.mode {
            spec.mode = v;
        }
    }
}

fn field<T>(key: &str, value: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
    parse(value).map_err(|e| CliError::Validation(format!("config key {key}: {e}")))
}

/// Parses the flat key=value config format: one assignment per line, '#'
/// starts a full-line comment, blank lines are ignored, unknown keys are
/// rejected. Later assignments to the same key win.
pub fn parse_config(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!(
                "config line {}: expected key=value, got {line:?}",
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "protocol" => o.protocol = Some(field(key, value, protocol_from_str)?),
            "quantity" => o.quantity = Some(field(key, value, quantity_from_str)?),
            "engine" => o.engine = Some(field(key, value, engine_from_str)?),
            "derivative" => o.derivative = Some(field(key, value, derivative_from_str)?),
            "construction" => o.construction = Some(field(key, value, construction_from_str)?),
            "mode" => o.mode = Some(field(key, value, mode_from_str)?),
            "params.n" => {
                o.n = Some(field(key, value, |v| {
                    v.parse::<u32>().map_err(|e| format!("bad integer {v:?}: {e}"))
                })?)
            }
            "params.nbar" => o.nbar = Some(field(key, value, list_from_str)?),
            "params.delta" => o.delta = Some(field(key, value, list_from_str)?),
            "tau.start" => o.tau_start = Some(field(key, value, parse_f64)?),
            "tau.stop" => o.tau_stop = Some(field(key, value, parse_f64)?),
            "tau.count" => {
                o.tau_count = Some(field(key, value, |v| {
                    v.parse::<usize>()
                        .map_err(|e| format!("bad integer {v:?}: {e}"))
                })?)
            }
            "input.theta" => o.theta = Some(field(key, value, parse_f64)?),
            "input.phi" => o.phi = Some(field(key, value, parse_f64)?),
            "output" => o.output = Some(PathBuf::from(value)),
            _ => {
                return Err(CliError::Validation(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(o)
}

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"))
}
