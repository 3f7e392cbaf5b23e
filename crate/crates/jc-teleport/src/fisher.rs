//! Quantum Fisher information of one-parameter state families: finite
//! difference and analytic derivatives of the teleported states, and three
//! interchangeable evaluation engines.

use num_complex::Complex64;

use crate::channel::{alpha_set, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::{eigh, mat_mul, ComplexMatrix, DensityMatrix4, TRACE_FLOOR};
use crate::teleport::{
    bob_state_ftp, bob_state_stp, ftp_betas, ftp_raw_matrix, stp_gammas, stp_raw_matrix, Betas,
    Construction, Gammas, InputState, Protocol,
};

/// Default finite-difference step; balances truncation against roundoff for
/// trigonometric-polynomial families in double precision.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Eigenvalue-pair sums at or below this are treated as outside the support.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;
/// Minimum eigenvalue gap the spectral engine accepts; below it the
/// perturbative eigenvector derivatives are unreliable.
pub const SPECTRAL_GAP_TOL: f64 = 1e-8;

/// One-parameter family of density matrices over a closed interval.
pub struct DensityFamily {
    lo: f64,
    hi: f64,
    evaluator: Box<dyn Fn(f64) -> Result<DensityMatrix4> + Send + Sync>,
}

impl DensityFamily {
    pub fn new(
        lo: f64,
        hi: f64,
        evaluator: impl Fn(f64) -> Result<DensityMatrix4> + Send + Sync + 'static,
    ) -> Self {
        assert!(lo.is_finite() && hi.is_finite() && lo < hi, "empty domain");
        Self { lo, hi, evaluator: Box::new(evaluator) }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn state(&self, xi: f64) -> Result<DensityMatrix4> {
        if !(self.lo..=self.hi).contains(&xi) {
            return Err(Error::OutsideDomain { xi, lo: self.lo, hi: self.hi });
        }
        (self.evaluator)(xi)
    }
}

/// The trace-normalized closed-form output state as a function of theta at
/// fixed channel parameters and phase.
pub fn teleported_family(protocol: Protocol, p: ChannelParams, phi: f64) -> DensityFamily {
    DensityFamily::new(0.0, std::f64::consts::PI, move |theta| {
        let s = InputState { theta, phi };
        let bob = match protocol {
            Protocol::Ftp => bob_state_ftp(&p, &s, Construction::ClosedForm)?,
            Protocol::Stp => bob_state_stp(&p, &s, Construction::ClosedForm)?,
        };
        Ok(bob.rho)
    })
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("step {h} must be positive and finite")));
    }
    Ok(())
}

fn stencil_domain(f: &DensityFamily, xi: f64, h: f64) -> Result<()> {
    let (lo, hi) = f.domain();
    // The full stencil [xi-2h, xi+2h] must fit, so halving the step for
    // extrapolation never leaves the domain.
    if xi - 2.0 * h < lo || xi + 2.0 * h > hi {
        return Err(Error::OutsideDomain { xi, lo, hi });
    }
    Ok(())
}

fn central_difference(f: &DensityFamily, xi: f64, h: f64) -> Result<ComplexMatrix> {
    let plus = f.state(xi + h)?;
    let minus = f.state(xi - h)?;
    Ok(plus.matrix().sub(minus.matrix())?.scale_re(0.5 / h))
}

/// Central difference (rho(xi+h) - rho(xi-h)) / 2h, symmetrized to exact
/// Hermiticity.
pub fn rho_derivative_fd(f: &DensityFamily, xi: f64, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    stencil_domain(f, xi, h)?;
    Ok(central_difference(f, xi, h)?.hermitian_part())
}

/// Fourth-order Richardson extrapolation (4 D(h/2) - D(h)) / 3 of the
/// central difference, symmetrized.
pub fn rho_derivative_richardson(f: &DensityFamily, xi: f64, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    stencil_domain(f, xi, h)?;
    let coarse = central_difference(f, xi, h)?;
    let fine = central_difference(f, xi, 0.5 * h)?;
    let d = fine.scale_re(4.0 / 3.0).sub(&coarse.scale_re(1.0 / 3.0))?;
    Ok(d.hermitian_part())
}

/// Exact theta-derivative of the trace-normalized closed-form output state,
/// from the hand-differentiated coefficients and the quotient rule
/// (M/T)' = M'/T - M T'/T^2.
pub fn rho_derivative_analytic(
    protocol: Protocol,
    p: &ChannelParams,
    s: &InputState,
) -> Result<ComplexMatrix> {
    s.validate()?;
    let a = alpha_set(p)?;
    let sin2t = (2.0 * s.theta).sin();
    let cos2t = (2.0 * s.theta).cos();
    let (m, dm, t, dt) = match protocol {
        Protocol::Ftp => {
            let b = ftp_betas(&a, s.theta, s.phi);
            let db = Betas {
                b1: ((a.a1 + a.a5).powi(2) - (a.a2 + a.a4).powi(2)) * sin2t,
                b2: Complex64::from_polar(1.0, 0.5 * s.phi) * ((2.0 * a.a3.re).powi(2) * cos2t),
                b3: 0.0,
                b4: ((a.a1 + a.a4).powi(2) - (a.a2 + a.a5).powi(2)) * sin2t,
            };
            (ftp_raw_matrix(&b), ftp_raw_matrix(&db), b.b1 + b.b4, db.b1 + db.b4)
        }
        Protocol::Stp => {
            let g = stp_gammas(&a, s.theta, s.phi);
            let dg = Gammas {
                g1: (a.a4 * a.a4 - a.a1 * a.a1) * sin2t,
                g2: (a.a4 * a.a5 - a.a1 * a.a2) * sin2t,
                g3: (a.a5 * a.a5 - a.a2 * a.a2) * sin2t,
                g4: Complex64::from_polar(1.0, -0.5 * s.phi) * (a.a3.norm_sqr() * cos2t),
            };
            (
                stp_raw_matrix(&g),
                stp_raw_matrix(&dg),
                g.g1 + 2.0 * g.g2 + g.g3,
                dg.g1 + 2.0 * dg.g2 + dg.g3,
            )
        }
    };
    if !(t > TRACE_FLOOR) {
        return Err(Error::DegenerateTrace { trace: t });
    }
    dm.scale_re(1.0 / t).sub(&m.scale_re(dt / (t * t)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Derivative {
    /// Hand-differentiated closed form; exact, defined at the domain edges.
    Analytic,
    /// Central difference with the given step.
    Central { h: f64 },
    /// Richardson-extrapolated central difference with the given base step.
    Richardson { h: f64 },
}

impl Default for Derivative {
    fn default() -> Self {
        Derivative::Analytic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QfiEngine {
    /// Sum of 2|<k|drho|l>|^2/(lambda_k+lambda_l) over supported pairs.
    /// Handles degenerate and rank-deficient spectra uniformly; the default.
    #[default]
    MatrixForm,
    /// The printed three-term split (classical + pure + mixed) built from
    /// perturbative eigen-derivatives; rejects near-degenerate spectra.
    Spectral,
    /// Builds the symmetric logarithmic derivative L in the eigenbasis and
    /// returns Tr[rho L^2].
    Sld,
}

/// QFI value and its term decomposition.
///
/// `Spectral` fills the three printed terms. `MatrixForm` and `Sld` report
/// the eigenbasis-diagonal (population) share as `term_classical` and the
/// off-diagonal (coherence) share as `term_mixed`, with `term_pure` = 0.
/// For every engine `value` equals the sum of the three terms.
#[derive(Clone, Copy, Debug)]
pub struct QfiResult {
    pub value: f64,
    pub term_classical: f64,
    pub term_pure: f64,
    pub term_mixed: f64,
    pub engine: QfiEngine,
}

struct EigenData {
    lambda: [f64; 4],
    h: ComplexMatrix,
}

/// Eigenvalues of rho and the derivative matrix in rho's eigenbasis.
fn eigen_data(rho: &DensityMatrix4, drho: &ComplexMatrix) -> Result<EigenData> {
    if drho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: drho.dim() });
    }
    // Analytic and FD derivatives arrive Hermitian; re-symmetrizing is free
    // insurance against caller-assembled matrices.
    let d = drho.hermitian_part();
    let dec = eigh(rho.matrix())?;
    let v = dec.vectors();
    let h = mat_mul(&v.adjoint(), &mat_mul(&d, v)?)?;
    let mut lambda = [0.0; 4];
    lambda.copy_from_slice(dec.eigenvalues());
    Ok(EigenData { lambda, h })
}

/// Default engine: support-projected matrix-element form.
pub fn qfi_matrix_form(rho: &DensityMatrix4, drho: &ComplexMatrix, tol: f64) -> Result<QfiResult> {
    let e = eigen_data(rho, drho)?;
    let mut diagonal = 0.0;
    let mut off_diagonal = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            let sum = e.lambda[k] + e.lambda[l];
            if sum > tol {
                let c = 2.0 * e.h.get(k, l).norm_sqr() / sum;
                if k == l {
                    diagonal += c;
                } else {
                    off_diagonal += c;
                }
            }
        }
    }
    Ok(QfiResult {
        value: diagonal + off_diagonal,
        term_classical: diagonal,
        term_pure: 0.0,
        term_mixed: off_diagonal,
        engine: QfiEngine::MatrixForm,
    })
}

/// Literal three-term spectral form with perturbative eigen-derivatives
/// (parallel-transport gauge <k|dk> = 0). Requires a fully non-degenerate
/// spectrum, kernel included; degenerate inputs are directed to the matrix
/// form.
pub fn qfi_spectral(rho: &DensityMatrix4, drho: &ComplexMatrix, tol: f64) -> Result<QfiResult> {
    let e = eigen_data(rho, drho)?;
    let mut min_gap = f64::INFINITY;
    for k in 0..4 {
        for l in (k + 1)..4 {
            min_gap = min_gap.min((e.lambda[k] - e.lambda[l]).abs());
        }
    }
    if min_gap < SPECTRAL_GAP_TOL {
        return Err(Error::DegenerateSpectrum { gap: min_gap });
    }

    let mut classical = 0.0;
    for k in 0..4 {
        if e.lambda[k] > tol {
            classical += e.h.get(k, k).re.powi(2) / e.lambda[k];
        }
    }

    // 4 sum_k lambda_k <dk|dk> with <l|dk> = h_lk/(lambda_k - lambda_l).
    let mut pure = 0.0;
    for k in 0..4 {
        let mut overlap = 0.0;
        for l in 0..4 {
            if l != k {
                overlap += e.h.get(l, k).norm_sqr() / (e.lambda[k] - e.lambda[l]).powi(2);
            }
        }
        pure += 4.0 * e.lambda[k] * overlap;
    }

    let mut mixed = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            if l == k {
                continue;
            }
            let sum = e.lambda[k] + e.lambda[l];
            if sum > tol {
                mixed -= 8.0 * e.lambda[k] * e.lambda[l] * e.h.get(k, l).norm_sqr()
                    / (sum * (e.lambda[l] - e.lambda[k]).powi(2));
            }
        }
    }

    Ok(QfiResult {
        value: classical + pure + mixed,
        term_classical: classical,
        term_pure: pure,
        term_mixed: mixed,
        engine: QfiEngine::Spectral,
    })
}

/// Solves drho = (L rho + rho L)/2 in the eigenbasis and returns Tr[rho L^2].
pub fn qfi_sld(rho: &DensityMatrix4, drho: &ComplexMatrix, tol: f64) -> Result<QfiResult> {
    let e = eigen_data(rho, drho)?;
    let mut l_mat = ComplexMatrix::zeros(4);
    for k in 0..4 {
        for l in 0..4 {
            let sum = e.lambda[k] + e.lambda[l];
            if sum > tol {
                l_mat.set(k, l, e.h.get(k, l).scale(2.0 / sum));
            }
        }
    }
    // Tr[rho L^2] in the eigenbasis: sum_k lambda_k sum_l |L_kl|^2.
    let mut diagonal = 0.0;
    let mut off_diagonal = 0.0;
    for k in 0..4 {
        for l in 0..4 {
            let c = e.lambda[k] * l_mat.get(k, l).norm_sqr();
            if k == l {
                diagonal += c;
            } else {
                off_diagonal += c;
            }
        }
    }
    Ok(QfiResult {
        value: diagonal + off_diagonal,
        term_classical: diagonal,
        term_pure: 0.0,
        term_mixed: off_diagonal,
        engine: QfiEngine::Sld,
    })
}

pub fn qfi(rho: &DensityMatrix4, drho: &ComplexMatrix, engine: QfiEngine, tol: f64) -> Result<QfiResult> {
    match engine {
        QfiEngine::MatrixForm => qfi_matrix_form(rho, drho, tol),
        QfiEngine::Spectral => qfi_spectral(rho, drho, tol),
        QfiEngine::Sld => qfi_sld(rho, drho, tol),
    }
}

/// QFI of the trace-normalized output state with respect to theta.
pub fn teleported_qfi(
    protocol: Protocol,
    p: &ChannelParams,
    s: &InputState,
    engine: QfiEngine,
    derivative: Derivative,
) -> Result<f64> {
    p.validate()?;
    s.validate()?;
    let rho = match protocol {
        Protocol::Ftp => bob_state_ftp(p, s, Construction::ClosedForm)?.rho,
        Protocol::Stp => bob_state_stp(p, s, Construction::ClosedForm)?.rho,
    };
    let drho = match derivative {
        Derivative::Analytic => rho_derivative_analytic(protocol, p, s)?,
        Derivative::Central { h } => {
            rho_derivative_fd(&teleported_family(protocol, *p, s.phi), s.theta, h)?
        }
        Derivative::Richardson { h } => {
            rho_derivative_richardson(&teleported_family(protocol, *p, s.phi), s.theta, h)?
        }
    };
    Ok(qfi(&rho, &drho, engine, DEFAULT_SUPPORT_TOL)?.value)
}
