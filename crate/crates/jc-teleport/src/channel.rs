//! Projected atom-field channel: coherent-state weights, generalized Rabi
//! frequencies, the five channel coefficients with their normalization, and
//! the 4x4 channel density matrix in the basis
//! [|n,g>, |n,e>, |n+1,g>, |n+1,e>].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix4};

/// Relative normalizations at or below this floor count as underflow.
pub const NORM_FLOOR: f64 = 1e-300;

/// The four dimensionless channel knobs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Fock reference index of the projected subspace.
    pub n: u32,
    /// Mean photon number of the coherent field.
    pub nbar: f64,
    /// Detuning in coupling units.
    pub delta: f64,
    /// Interaction time in coupling units.
    pub tau: f64,
}

impl ChannelParams {
    pub fn new(n: u32, nbar: f64, delta: f64, tau: f64) -> Result<Self> {
        let p = Self { n, nbar, delta, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mean photon number {} must be finite and >= 0",
                self.nbar
            )));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time {} must be finite and >= 0",
                self.tau
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detuning {} must be finite",
                self.delta
            )));
        }
        Ok(())
    }
}

/// The five channel coefficients plus their normalization.
///
/// `a1 + a2 + a4 + a5 = 1` and `|a3|^2 = a2 * a4` hold by construction.
/// `norm` is the normalization expressed in units of the largest Poisson
/// weight entering it (the absolute value underflows doubles near
/// `nbar = 1000`); `log_norm` is the natural log of the absolute
/// normalization.
#[derive(Clone, Copy, Debug)]
pub struct AlphaSet {
    pub a1: f64,
    pub a2: f64,
    pub a3: Complex64,
    pub a4: f64,
    pub a5: f64,
    pub norm: f64,
    pub log_norm: f64,
}

/// Coherent-state amplitude weight P_k = exp(-nbar/2) sqrt(nbar^k / k!),
/// evaluated in log space so large k and nbar cannot overflow.
pub fn coherent_weight(nbar: f64, k: u32) -> Result<f64> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "mean photon number {nbar} must be finite and >= 0"
        )));
    }
    Ok((0.5 * ln_weight_sq(nbar, k)).exp())
}

/// ln P_k^2 = -nbar + k ln(nbar) - ln k!; -inf where the weight vanishes.
fn ln_weight_sq(nbar: f64, k: u32) -> f64 {
    if nbar == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -nbar + f64::from(k) * nbar.ln() - libm::lgamma(f64::from(k) + 1.0)
}

/// Generalized Rabi frequency sqrt(delta^2 + x).
pub fn rabi(delta: f64, x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    (delta * delta + x).sqrt()
}

/// Evaluates the five channel coefficients.
///
/// Poisson weights for k = n-1, n, n+1 are combined relative to the largest
/// of the three, so the regime nbar ~ 1000 stays inside double range. The
/// k = n-1 term is absent for n = 0 (no lower Fock neighbor).
pub fn alpha_set(p: &ChannelParams) -> Result<AlphaSet> {
    p.validate()?;
    let n = f64::from(p.n);
    let om1 = rabi(p.delta, n);
    let om2 = rabi(p.delta, n + 1.0);
    let s1 = (p.tau * om1).sin();
    let s2 = (p.tau * om2).sin();
    let c2 = (p.tau * om2).cos();
    let d2 = p.delta * p.delta;

    // Trig prefactors of the three Poisson weights; f1 multiplies P_{n-1}^2,
    // f2 multiplies both P_n^2 (in a2) and P_{n+1}^2 (in a5 and the
    // normalization), f4 multiplies P_n^2 in a4.
    let f1 = if p.n == 0 { 0.0 } else { n / (d2 + n) * s1 * s1 };
    let f2 = c2 * c2 + d2 / (d2 + n + 1.0) * s2 * s2;
    let f4 = (n + 1.0) / (d2 + n + 1.0) * s2 * s2;

    let l_lower = if p.n == 0 {
        f64::NEG_INFINITY
    } else {
        ln_weight_sq(p.nbar, p.n - 1)
    };
    let l_mid = ln_weight_sq(p.nbar, p.n);
    let l_upper = ln_weight_sq(p.nbar, p.n + 1);
    let l_max = l_lower.max(l_mid).max(l_upper);
    if l_max == f64::NEG_INFINITY {
        return Err(Error::NormUnderflow);
    }
    let w_lower = if p.n == 0 { 0.0 } else { (l_lower - l_max).exp() };
    let w_mid = (l_mid - l_max).exp();
    let w_upper = (l_upper - l_max).exp();

    let norm = w_mid + f1 * w_lower + f2 * w_upper;
    if !(norm > NORM_FLOOR) || !norm.is_finite() {
        return Err(Error::NormUnderflow);
    }

    let a1 = f1 * w_lower / norm;
    let a2 = f2 * w_mid / norm;
    let a4 = f4 * w_mid / norm;
    let a5 = f2 * w_upper / norm;
    let a3 = Complex64::i()
        * (n + 1.0).sqrt()
        * Complex64::from_polar(1.0, -p.delta * p.tau)
        * s2
        * Complex64::new(c2, -p.delta / om2 * s2)
        / om2
        * (w_mid / norm);

    Ok(AlphaSet { a1, a2, a3, a4, a5, norm, log_norm: norm.ln() + l_max })
}

/// The 4x4 channel state: diag(a1, a2, a4, a5) with a3 coupling the middle
/// |n,e>, |n+1,g> pair.
pub fn channel_state(p: &ChannelParams) -> Result<DensityMatrix4> {
    let a = alpha_set(p)?;
    let mut m = ComplexMatrix::zeros(4);
    m.set(0, 0, a.a1.into());
    m.set(1, 1, a.a2.into());
    m.set(2, 2, a.a4.into());
    m.set(3, 3, a.a5.into());
    m.set(1, 2, a.a3);
    m.set(2, 1, a.a3.conj());
    DensityMatrix4::new(m)
}
