//! Teleportation of the two-angle input state through the channel: Bell
//! projectors, outcome probabilities, the Pauli correction channel, the
//! closed-form output states of both protocol variants, and fidelities.

use num_complex::Complex64;

use crate::channel::{alpha_set, channel_state, AlphaSet, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::{
    expectation, kron, mat_mul, normalize_trace, outer, trace, ComplexMatrix, DensityMatrix4,
};

/// Correction-operator index; the outcome labels {0, x, y, z}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

pub const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let i = Complex64::i();
        let one = Complex64::ONE;
        let mut m = ComplexMatrix::zeros(2);
        match self {
            Pauli::I => {
                m.set(0, 0, one);
                m.set(1, 1, one);
            }
            Pauli::X => {
                m.set(0, 1, one);
                m.set(1, 0, one);
            }
            Pauli::Y => {
                m.set(0, 1, -i);
                m.set(1, 0, i);
            }
            Pauli::Z => {
                m.set(0, 0, one);
                m.set(1, 1, -one);
            }
        }
        m
    }
}

/// The two angles parameterizing the unknown state
/// cos(theta)|00> + e^{-i phi/2} sin(theta)|11>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputState {
    pub theta: f64,
    pub phi: f64,
}

impl InputState {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let s = Self { theta, phi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=std::f64::consts::PI).contains(&self.theta) {
            return Err(Error::InvalidParameter(format!(
                "theta {} outside [0, pi]",
                self.theta
            )));
        }
        if !(0.0..=2.0 * std::f64::consts::PI).contains(&self.phi) {
            return Err(Error::InvalidParameter(format!(
                "phi {} outside [0, 2 pi]",
                self.phi
            )));
        }
        Ok(())
    }
}

/// [cos(theta), 0, 0, e^{-i phi/2} sin(theta)] in the (|00>,|01>,|10>,|11>)
/// basis; unit norm by construction.
pub fn input_state_vector(s: &InputState) -> [Complex64; 4] {
    state_vector_raw(s.theta, s.phi)
}

/// The same vector without the angle-range contract; derivative stencils may
/// step slightly outside [0, pi].
pub(crate) fn state_vector_raw(theta: f64, phi: f64) -> [Complex64; 4] {
    [
        Complex64::new(theta.cos(), 0.0),
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::from_polar(1.0, -0.5 * phi) * theta.sin(),
    ]
}

/// The four Bell projectors in outcome order [E0, Ex, Ey, Ez] =
/// [|psi-><psi-|, |phi-><phi-|, |phi+><phi+|, |psi+><psi+|] with
/// |psi±> = (|01> ± |10>)/sqrt(2) and |phi±> = (|00> ± |11>)/sqrt(2).
pub fn bell_projectors() -> [ComplexMatrix; 4] {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = Complex64::ZERO;
    let psi_minus = [z, s, -s, z];
    let phi_minus = [s, z, z, -s];
    let phi_plus = [s, z, z, s];
    let psi_plus = [z, s, s, z];
    [outer(&psi_minus), outer(&phi_minus), outer(&phi_plus), outer(&psi_plus)]
}

/// Relabels the channel basis [|n,g>, |n,e>, |n+1,g>, |n+1,e>] as the
/// two-qubit computational basis (|n>->|0>, |n+1>->|1>, |g>->|0>, |e>->|1>).
/// The matrix entries are unchanged under this labeling.
pub fn qubit_embedding(rho_s: &DensityMatrix4) -> DensityMatrix4 {
    *rho_s
}

/// Product distribution over pairs of Bell outcomes.
#[derive(Clone, Copy, Debug)]
pub struct OutcomeDistribution {
    p: [[f64; 4]; 4],
}

impl OutcomeDistribution {
    /// Entries must be nonnegative up to rounding and sum to 1.
    pub fn new(p: [[f64; 4]; 4]) -> Result<Self> {
        let mut sum = 0.0;
        for row in &p {
            for &v in row {
                if v < -1e-14 {
                    return Err(Error::NegativeProbability(v));
                }
                sum += v;
            }
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "outcome probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self { p })
    }

    pub fn uniform() -> Self {
        Self { p: [[1.0 / 16.0; 4]; 4] }
    }

    /// Distribution with all weight on a single outcome pair.
    pub fn concentrated(i: usize, j: usize) -> Self {
        let mut p = [[0.0; 4]; 4];
        p[i][j] = 1.0;
        Self { p }
    }

    pub fn probabilities(&self) -> &[[f64; 4]; 4] {
        &self.p
    }

    pub fn sum(&self) -> f64 {
        self.p.iter().flatten().sum()
    }
}

/// P_ij = Tr[E_i rho] Tr[E_j rho] over the Bell projectors. Marginals within
/// rounding of zero are clamped to 0; genuinely negative ones are an error.
pub fn outcome_distribution(rho_ac: &DensityMatrix4) -> Result<OutcomeDistribution> {
    let projectors = bell_projectors();
    let mut marginal = [0.0; 4];
    for (slot, e) in marginal.iter_mut().zip(&projectors) {
        let t = trace(&mat_mul(e, rho_ac.matrix())?).re;
        if t < -1e-12 {
            return Err(Error::NegativeProbability(t));
        }
        *slot = t.max(0.0);
    }
    let mut p = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            p[i][j] = marginal[i] * marginal[j];
        }
    }
    OutcomeDistribution::new(p)
}

/// Ordering of the right-hand correction factor in the Pauli channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliChannelMode {
    /// (sigma_i ⊗ sigma_j) rho (sigma_i ⊗ sigma_j): a self-adjoint
    /// conjugation yielding a valid density matrix. Default.
    Hermitian,
    /// (sigma_i ⊗ sigma_j) rho (sigma_j ⊗ sigma_i): the swapped index order,
    /// kept verbatim for audits; not Hermitian in general, returned raw.
    Literal,
}

/// Mixes Pauli-corrected copies of `rho_un` with the outcome weights.
pub fn apply_pauli_channel(
    rho_un: &DensityMatrix4,
    d: &OutcomeDistribution,
    mode: PauliChannelMode,
) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4);
    for (i, si) in PAULIS.iter().enumerate() {
        for (j, sj) in PAULIS.iter().enumerate() {
            let w = d.probabilities()[i][j];
            if w == 0.0 {
                continue;
            }
            let left = kron(&si.matrix(), &sj.matrix()).expect("2x2 factors");
            let right = match mode {
                PauliChannelMode::Hermitian => left,
                PauliChannelMode::Literal => kron(&sj.matrix(), &si.matrix()).expect("2x2 factors"),
            };
            let term = mat_mul(&mat_mul(&left, rho_un.matrix()).expect("4x4"), &right)
                .expect("4x4");
            acc = acc.add(&term.scale_re(w)).expect("4x4");
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Ftp,
    Stp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    ClosedForm,
    ChannelOracle,
}

/// Trace-normalized output state of a protocol run plus the trace of the
/// closed-form matrix it came from.
#[derive(Clone, Copy, Debug)]
pub struct BobState {
    pub rho: DensityMatrix4,
    pub raw_trace: f64,
    pub protocol: Protocol,
    pub construction: Construction,
}

/// Closed-form coefficients of the single-copy output matrix.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Betas {
    pub b1: f64,
    pub b2: Complex64,
    pub b3: f64,
    pub b4: f64,
}

pub(crate) fn ftp_betas(a: &AlphaSet, theta: f64, phi: f64) -> Betas {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let cs = theta.cos() * theta.sin();
    let re3_sq = (2.0 * a.a3.re).powi(2);
    Betas {
        b1: (a.a1 + a.a5).powi(2) * s2 + (a.a2 + a.a4).powi(2) * c2,
        b2: Complex64::from_polar(1.0, 0.5 * phi) * (re3_sq * cs),
        b3: (a.a1 + a.a5) * (a.a2 + a.a4),
        b4: (a.a2 + a.a5).powi(2) * c2 + (a.a1 + a.a4).powi(2) * s2,
    }
}

/// The single-copy output matrix: b1, b4 on the outer diagonal, b2 on the
/// outer anti-diagonal, b3 on the inner anti-diagonal.
pub(crate) fn ftp_raw_matrix(b: &Betas) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 0, b.b1.into());
    m.set(3, 3, b.b4.into());
    m.set(0, 3, b.b2);
    m.set(3, 0, b.b2.conj());
    m.set(1, 2, b.b3.into());
    m.set(2, 1, b.b3.into());
    m
}

/// Closed-form coefficients of the two-copy output matrix.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Gammas {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: Complex64,
}

pub(crate) fn stp_gammas(a: &AlphaSet, theta: f64, phi: f64) -> Gammas {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let cs = theta.cos() * theta.sin();
    Gammas {
        g1: c2 * a.a1 * a.a1 + s2 * a.a4 * a.a4,
        g2: c2 * a.a1 * a.a2 + s2 * a.a4 * a.a5,
        g3: c2 * a.a2 * a.a2 + s2 * a.a5 * a.a5,
        g4: Complex64::from_polar(1.0, -0.5 * phi) * (cs * a.a3.norm_sqr()),
    }
}

/// The two-copy output matrix: diag(g1, g2, g2, g3) with g4 on the outer
/// anti-diagonal.
pub(crate) fn stp_raw_matrix(g: &Gammas) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 0, g.g1.into());
    m.set(1, 1, g.g2.into());
    m.set(2, 2, g.g2.into());
    m.set(3, 3, g.g3.into());
    m.set(0, 3, g.g4);
    m.set(3, 0, g.g4.conj());
    m
}

/// Single-copy protocol output.
///
/// `ClosedForm` evaluates the printed coefficient matrix and normalizes it;
/// the result is Hermitian and unit-trace but indefinite (the inner
/// anti-diagonal contributes a ±b3 eigenvalue pair), so PSD is not asserted
/// here. `ChannelOracle` runs the measurement/correction pipeline on the
/// channel state and is PSD by construction.
pub fn bob_state_ftp(
    p: &ChannelParams,
    s: &InputState,
    construction: Construction,
) -> Result<BobState> {
    s.validate()?;
    let raw = match construction {
        Construction::ClosedForm => {
            let a = alpha_set(p)?;
            ftp_raw_matrix(&ftp_betas(&a, s.theta, s.phi))
        }
        Construction::ChannelOracle => {
            let embedded = qubit_embedding(&channel_state(p)?);
            let d = outcome_distribution(&embedded)?;
            let rho_un = DensityMatrix4::new(outer(&input_state_vector(s)))?;
            apply_pauli_channel(&rho_un, &d, PauliChannelMode::Hermitian)
        }
    };
    let (rho, raw_trace) = normalize_trace(&raw)?;
    Ok(BobState {
        rho: DensityMatrix4::new(rho)?,
        raw_trace,
        protocol: Protocol::Ftp,
        construction,
    })
}

/// Two-copy protocol output. Only the closed form exists; the two-copy
/// measurement sequence behind it is not specified, so there is no channel
/// oracle to cross-check against.
pub fn bob_state_stp(
    p: &ChannelParams,
    s: &InputState,
    construction: Construction,
) -> Result<BobState> {
    s.validate()?;
    let raw = match construction {
        Construction::ClosedForm => {
            let a = alpha_set(p)?;
            stp_raw_matrix(&stp_gammas(&a, s.theta, s.phi))
        }
        Construction::ChannelOracle => {
            return Err(Error::Unsupported(
                "the two-copy protocol has no channel-oracle construction",
            ))
        }
    };
    let (rho, raw_trace) = normalize_trace(&raw)?;
    Ok(BobState {
        rho: DensityMatrix4::new(rho)?,
        raw_trace,
        protocol: Protocol::Stp,
        construction,
    })
}

/// The printed single-copy fidelity
/// b1 cos²θ + (a3 + a3*)² sin²(2θ)/2 + b4 sin²θ, left un-renormalized; it
/// equals the expectation of the raw coefficient matrix in the input state.
pub fn fidelity_closed_ftp(p: &ChannelParams, s: &InputState) -> Result<f64> {
    s.validate()?;
    let a = alpha_set(p)?;
    let b = ftp_betas(&a, s.theta, s.phi);
    let (c2, s2) = (s.theta.cos().powi(2), s.theta.sin().powi(2));
    let re3_sq = (2.0 * a.a3.re).powi(2);
    Ok(b.b1 * c2 + re3_sq * (2.0 * s.theta).sin().powi(2) / 2.0 + b.b4 * s2)
}

/// The printed two-copy fidelity
/// cos²θ (cos²θ a1² + sin²θ a4²) + sin²θ (cos²θ a2² + sin²θ a5²)
/// + 4 cos²θ sin²θ (a3² + a3*²), including its cross term as printed. This
/// does not agree with the overlap of the normalized two-copy state in
/// general; both values are exposed so they can be reported side by side.
pub fn fidelity_closed_stp(p: &ChannelParams, s: &InputState) -> Result<f64> {
    s.validate()?;
    let a = alpha_set(p)?;
    let (c2, s2) = (s.theta.cos().powi(2), s.theta.sin().powi(2));
    let cross = 2.0 * (a.a3 * a.a3).re; // a3² + (a3*)² is real
    Ok(c2 * (c2 * a.a1 * a.a1 + s2 * a.a4 * a.a4)
        + s2 * (c2 * a.a2 * a.a2 + s2 * a.a5 * a.a5)
        + 4.0 * c2 * s2 * cross)
}

/// <psi_un| rho |psi_un>, the overlap of a unit-trace state with the input.
pub fn fidelity_overlap(rho: &DensityMatrix4, s: &InputState) -> Result<f64> {
    s.validate()?;
    let psi = input_state_vector(s);
    Ok(expectation(&psi, rho.matrix())?.re)
}
