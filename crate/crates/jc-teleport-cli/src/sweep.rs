use jc_teleport::channel::ChannelParams;
use jc_teleport::fisher::{teleported_qfi, Derivative, QfiEngine};
use jc_teleport::linalg::{expectation, outer, trace, DensityMatrix4, TRACE_FLOOR};
use jc_teleport::teleport::{
    apply_pauli_channel, bob_state_ftp, bob_state_stp, fidelity_closed_ftp, fidelity_closed_stp,
    fidelity_overlap, input_state_vector, outcome_distribution, qubit_embedding, Construction,
    InputState, PauliChannelMode, Protocol,
};
use jc_teleport::Error;
use rayon::prelude::*;

use crate::error::CliError;

/// What a sweep tabulates against tau.
///
/// Both fidelity quantities emit a raw and a normalized column per series;
/// they differ in what the raw column holds. `FidelityClosed` prints the
/// closed-form fidelity expression verbatim, `FidelityOverlapNorm` prints
/// the input-state expectation of the unnormalized output. For the
/// single-copy protocol the two coincide; for the two-copy protocol they do
/// not, which is why both exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    FidelityClosed,
    FidelityOverlapNorm,
    QfiTheta,
}

impl Quantity {
    pub fn is_fidelity(self) -> bool {
        !matches!(self, Quantity::QfiTheta)
    }

    pub fn token(self) -> &'static str {
        match self {
            Quantity::FidelityClosed => "closed",
            Quantity::FidelityOverlapNorm => "overlap",
            Quantity::QfiTheta => "qfi",
        }
    }

    pub fn axis_label(self) -> &'static str {
        match self {
            Quantity::QfiTheta => "qfi_theta",
            _ => "fidelity",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TauGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TauGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Validation(format!(
                "tau window [{}, {}] must be finite",
                self.start, self.stop
            )));
        }
        if self.start < 0.0 {
            return Err(CliError::Validation(format!(
                "tau start {} must be >= 0",
                self.start
            )));
        }
        if !(self.start < self.stop) {
            return Err(CliError::Validation(format!(
                "tau window [{}, {}] must have start < stop",
                self.start, self.stop
            )));
        }
        if self.count < 2 {
            return Err(CliError::Validation(format!(
                "tau count {} must be at least 2",
                self.count
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

/// One curve of the sweep: a (nbar, delta) pair from the cartesian product
/// of the declared lists, in declaration order.
#[derive(Clone, Debug)]
pub struct Series {
    pub nbar: f64,
    pub delta: f64,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub protocol: Protocol,
    pub quantity: Quantity,
    pub n: u32,
    pub nbar: Vec<f64>,
    pub delta: Vec<f64>,
    pub tau: TauGrid,
    pub theta: f64,
    pub phi: f64,
    pub engine: QfiEngine,
    pub derivative: Derivative,
    pub construction: Construction,
    pub mode: PauliChannelMode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            protocol: Protocol::Ftp,
            quantity: Quantity::FidelityClosed,
            n: 2,
            nbar: vec![4.0],
            delta: vec![0.0],
            tau: TauGrid {
                start: 0.0,
                stop: 20.0,
                count: 2000,
            },
            theta: std::f64::consts::FRAC_PI_4,
            phi: 0.0,
            engine: QfiEngine::default(),
            derivative: Derivative::default(),
            construction: Construction::ClosedForm,
            mode: PauliChannelMode::Hermitian,
        }
    }
}

/// Renders a parameter value for series labels and header comments:
/// integral values lose the trailing ".0" so labels read nbar4, delta0.1.
pub fn fmt_param(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn fmt_list(vs: &[f64]) -> String {
    vs.iter().map(|&v| fmt_param(v)).collect::<Vec<_>>().join(",")
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        self.tau.validate()?;
        if self.nbar.is_empty() {
            return Err(CliError::Validation("nbar list is empty".into()));
        }
        if self.delta.is_empty() {
            return Err(CliError::Validation("delta list is empty".into()));
        }
        for &nb in &self.nbar {
            for &d in &self.delta {
                ChannelParams::new(self.n, nb, d, self.tau.start)
                    .map_err(|e| CliError::from_core(e, "channel parameters"))?;
            }
        }
        InputState::new(self.theta, self.phi)
            .map_err(|e| CliError::from_core(e, "input state"))?;
        if self.quantity.is_fidelity()
            && self.construction == Construction::ChannelOracle
            && self.protocol == Protocol::Stp
        {
            return Err(CliError::Validation(
                "the two-copy protocol has no channel-oracle construction".into(),
            ));
        }
        Ok(())
    }

    /// Cartesian product nbar x delta in declaration order, nbar outermost.
    pub fn series(&self) -> Vec<Series> {
        let many_nbar = self.nbar.len() > 1;
        let many_delta = self.delta.len() > 1;
        let mut out = Vec::with_capacity(self.nbar.len() * self.delta.len());
        for &nb in &self.nbar {
            for &d in &self.delta {
                let label = if many_nbar && many_delta {
                    format!("nbar{}_delta{}", fmt_param(nb), fmt_param(d))
                } else if many_delta {
                    format!("delta{}", fmt_param(d))
                } else {
                    format!("nbar{}", fmt_param(nb))
                };
                out.push(Series {
                    nbar: nb,
                    delta: d,
                    label,
                });
            }
        }
        out
    }

    fn header_comments(&self) -> Vec<String> {
        let mut c = vec![
            format!(
                "quantity: {} ({})",
                self.quantity.token(),
                self.quantity.axis_label()
            ),
            format!(
                "protocol: {}",
                match self.protocol {
                    Protocol::Ftp => "ftp",
                    Protocol::Stp => "stp",
                }
            ),
            format!("n: {}", self.n),
            format!(
                "theta: {}, phi: {}",
                fmt_param(self.theta),
                fmt_param(self.phi)
            ),
            format!("nbar: {}", fmt_list(&self.nbar)),
            format!("delta: {}", fmt_list(&self.delta)),
            format!(
                "tau: {} points in [{}, {}]",
                self.tau.count,
                fmt_param(self.tau.start),
                fmt_param(self.tau.stop)
            ),
        ];
        if self.quantity == Quantity::QfiTheta {
            c.push(format!(
                "engine: {}, derivative: {}",
                match self.engine {
                    QfiEngine::MatrixForm => "matrix",
                    QfiEngine::Spectral => "spectral",
                    QfiEngine::Sld => "sld",
                },
                match self.derivative {
                    Derivative::Analytic => "analytic".to_string(),
                    Derivative::Central { h } => format!("fd(h={h})"),
                    Derivative::Richardson { h } => format!("richardson(h={h})"),
                },
            ));
        }
        if self.quantity.is_fidelity() && self.construction == Construction::ChannelOracle {
            c.push(format!(
                "construction: channel-oracle, correction mode: {}",
                match self.mode {
                    PauliChannelMode::Hermitian => "hermitian",
                    PauliChannelMode::Literal => "literal",
                }
            ));
        }
        c
    }

    /// (raw, normalized) fidelity pair at one grid point.
    fn fidelity_point(
        &self,
        p: &ChannelParams,
        s: &InputState,
    ) -> Result<(f64, f64), Error> {
        if self.construction == Construction::ChannelOracle {
            return oracle_fidelity(p, s, self.mode);
        }
        let bob = match self.protocol {
            Protocol::Ftp => bob_state_ftp(p, s, Construction::ClosedForm)?,
            Protocol::Stp => bob_state_stp(p, s, Construction::ClosedForm)?,
        };
        let norm = fidelity_overlap(&bob.rho, s)?;
        let raw = match self.quantity {
            Quantity::FidelityClosed => match self.protocol {
                Protocol::Ftp => fidelity_closed_ftp(p, s)?,
                Protocol::Stp => fidelity_closed_stp(p, s)?,
            },
            _ => norm * bob.raw_trace,
        };
        Ok((raw, norm))
    }

    fn eval_point(&self, ser: &Series, tau: f64, s: &InputState) -> Result<Vec<f64>, CliError> {
        let context = format!(
            "at nbar={}, delta={}, tau={}",
            fmt_param(ser.nbar),
            fmt_param(ser.delta),
            tau
        );
        let p = ChannelParams::new(self.n, ser.nbar, ser.delta, tau)
            .map_err(|e| CliError::from_core(e, &context))?;
        let values = match self.quantity {
            Quantity::QfiTheta => {
                let v = teleported_qfi(self.protocol, &p, s, self.engine, self.derivative)
                    .map_err(|e| CliError::from_core(e, &context))?;
                vec![v]
            }
            _ => {
                let (raw, norm) = self
                    .fidelity_point(&p, s)
                    .map_err(|e| CliError::from_core(e, &context))?;
                vec![raw, norm]
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Numeric(format!("non-finite value {context}")));
        }
        Ok(values)
    }
}

/// Fidelity through the explicit measurement/correction pipeline. In the
/// hermitian correction mode the output is a genuine state of trace one; in
/// the literal mode the mixture is kept verbatim, so the raw column is the
/// input-state expectation of that matrix and the normalized column divides
/// by its trace.
fn oracle_fidelity(
    p: &ChannelParams,
    s: &InputState,
    mode: PauliChannelMode,
) -> Result<(f64, f64), Error> {
    let embedded = qubit_embedding(&jc_teleport::channel::channel_state(p)?);
    let d = outcome_distribution(&embedded)?;
    let psi = input_state_vector(s);
    let rho_un = DensityMatrix4::new(outer(&psi))?;
    let m = apply_pauli_channel(&rho_un, &d, mode);
    let raw = expectation(&psi, &m)?.re;
    let t = trace(&m).re;
    if !(t > TRACE_FLOOR) {
        return Err(Error::DegenerateTrace { trace: t });
    }
    Ok((raw, raw / t))
}

/// A tabulated sweep ready for CSV emission: comment lines (without the
/// leading "# "), column names, and numeric rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Evaluates the sweep. Series run in parallel; rows are assembled in
/// declaration order afterwards, so the output is deterministic.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, CliError> {
    spec.validate()?;
    let s = InputState::new(spec.theta, spec.phi)
        .map_err(|e| CliError::from_core(e, "input state"))?;
    let taus = spec.tau.values();
    let series = spec.series();

    let per_series: Vec<Vec<Vec<f64>>> = series
        .par_iter()
        .map(|ser| {
            taus.iter()
                .map(|&tau| spec.eval_point(ser, tau, &s))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec!["tau".to_string()];
    for ser in &series {
        if spec.quantity.is_fidelity() {
            columns.push(format!("{}_raw", ser.label));
            columns.push(format!("{}_norm", ser.label));
        } else {
            columns.push(format!("{}_qfi", ser.label));
        }
    }

    let mut rows = Vec::with_capacity(taus.len());
    for (i, &tau) in taus.iter().enumerate() {
        let mut row = Vec::with_capacity(columns.len());
        row.push(tau);
        for sv in &per_series {
            row.extend_from_slice(&sv[i]);
        }
        rows.push(row);
    }

    Ok(SweepResult {
        comments: spec.header_comments(),
        columns,
        rows,
    })
}

/// Channel-coefficient dump over a tau grid: one scalar (nbar, delta) pair,
/// columns for the five coefficients plus the normalization pair.
pub fn run_channel_dump(
    n: u32,
    nbar: f64,
    delta: f64,
    tau: TauGrid,
) -> Result<SweepResult, CliError> {
    tau.validate()?;
    ChannelParams::new(n, nbar, delta, tau.start)
        .map_err(|e| CliError::from_core(e, "channel parameters"))?;
    let taus = tau.values();
    let rows = taus
        .par_iter()
        .map(|&t| {
            let context = format!(
                "at nbar={}, delta={}, tau={}",
                fmt_param(nbar),
                fmt_param(delta),
                t
            );
            let p = ChannelParams::new(n, nbar, delta, t)
                .map_err(|e| CliError::from_core(e, &context))?;
            let a = jc_teleport::channel::alpha_set(&p)
                .map_err(|e| CliError::from_core(e, &context))?;
            let row = vec![
                t, a.a1, a.a2, a.a3.re, a.a3.im, a.a4, a.a5, a.norm, a.log_norm,
            ];
            if row.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Numeric(format!("non-finite value {context}")));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult {
        comments: vec![
            format!("channel coefficients, n: {n}"),
            format!("nbar: {}, delta: {}", fmt_param(nbar), fmt_param(delta)),
            format!(
                "tau: {} points in [{}, {}]",
                tau.count,
                fmt_param(tau.start),
                fmt_param(tau.stop)
            ),
            "norm is relative to the largest Poisson weight; log_norm is the absolute log".into(),
        ],
        columns: [
            "tau", "a1", "a2", "a3_re", "a3_im", "a4", "a5", "norm", "log_norm",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows,
    })
}
