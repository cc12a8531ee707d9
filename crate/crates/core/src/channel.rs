//! Channel constants, complex amplitudes and the reduced coordinates (μ, x₀, y₀).
//!
//! Units are mW for power, km for length and nats for information.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// Physical constants of the fiber link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Kerr coefficient γ, 1/(mW·km).
    pub gamma: f64,
    /// Link length L, km.
    pub length: f64,
    /// Noise density Q, mW/km.
    pub noise_density: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            gamma: 1e-3,
            length: 1000.0,
            noise_density: 1.5e-7,
        }
    }
}

impl ChannelParams {
    pub fn new(gamma: f64, length: f64, noise_density: f64) -> Result<Self> {
        let p = ChannelParams {
            gamma,
            length,
            noise_density,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidParameter(format!("length must be > 0, got {}", self.length)));
        }
        if !(self.noise_density > 0.0) || !self.noise_density.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise density must be > 0, got {}",
                self.noise_density
            )));
        }
        Ok(())
    }

    /// Noise power N = QL, mW.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.length
    }

    /// Dimensionless-per-mW nonlinearity γL.
    pub fn gamma_l(&self) -> f64 {
        self.gamma * self.length
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        ChannelParams { gamma, ..self }
    }

    pub fn with_noise_density(self, noise_density: f64) -> Self {
        ChannelParams { noise_density, ..self }
    }
}

/// SNR = P/(QL).
pub fn snr(power: f64, params: &ChannelParams) -> Result<f64> {
    if !(power > 0.0) {
        return Err(domain("snr", power, "power > 0"));
    }
    Ok(power / params.noise_power())
}

/// Power window QL ≪ P ≪ 1/(γ²Q³L³) where the expansion holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRegime {
    pub p_low: f64,
    pub p_high: f64,
}

impl PowerRegime {
    pub fn is_unbounded(&self) -> bool {
        self.p_high.is_infinite()
    }

    pub fn contains(&self, power: f64) -> bool {
        power > self.p_low && power < self.p_high
    }
}

pub fn intermediate_regime(params: &ChannelParams) -> PowerRegime {
    let n = params.noise_power();
    let g = params.gamma;
    PowerRegime {
        p_low: n,
        p_high: if g == 0.0 { f64::INFINITY } else { 1.0 / (n * params.length * params.length * g * g) },
    }
}

/// A field sample in mW^{1/2}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        ComplexAmplitude { re, im }
    }

    pub fn from_polar(rho: f64, phase: f64) -> Self {
        Complex64::from_polar(rho, phase).into()
    }

    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// |X|², mW.
    pub fn power(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Phase in [−π, π).
    pub fn phase(&self) -> f64 {
        wrap_phase(self.im.atan2(self.re))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexAmplitude {
    fn from(c: Complex64) -> Self {
        ComplexAmplitude { re: c.re, im: c.im }
    }
}

impl From<ComplexAmplitude> for Complex64 {
    fn from(a: ComplexAmplitude) -> Self {
        Complex64::new(a.re, a.im)
    }
}

/// Wraps an angle into [−π, π).
pub fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// (μ, x₀, y₀) with x₀ + i y₀ = Y e^{−iφ_X − iμ} − |X|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCoords {
    pub mu: f64,
    pub x0: f64,
    pub y0: f64,
}

impl ReducedCoords {
    pub fn deviation(&self) -> Complex64 {
        Complex64::new(self.x0, self.y0)
    }

    /// Output amplitude for an input of modulus `rho` and phase `phase`.
    pub fn reconstruct(&self, rho: f64, phase: f64) -> ComplexAmplitude {
        let c = Complex64::new(rho + self.x0, self.y0) * Complex64::from_polar(1.0, self.mu + phase);
        c.into()
    }
}

pub fn reduced_coords(x_in: ComplexAmplitude, y_out: ComplexAmplitude, params: &ChannelParams) -> Result<ReducedCoords> {
    let rho = x_in.magnitude();
    if rho == 0.0 {
        return Err(Error::DegenerateInput("input amplitude is zero, its phase is undefined"));
    }
    let mu = params.gamma_l() * x_in.power();
    let unit = x_in.to_complex() / rho;
    let w = y_out.to_complex() * unit.conj() * Complex64::from_polar(1.0, -mu) - rho;
    Ok(ReducedCoords { mu, x0: w.re, y0: w.im })
}

/// Ψ₀(z) = X e^{iγ|X|²z}.
pub fn zero_noise_output(x_in: ComplexAmplitude, params: &ChannelParams, z: f64) -> Result<ComplexAmplitude> {
    if !(0.0..=params.length).contains(&z) {
        return Err(domain("zero_noise_output", z, "0 <= z <= L"));
    }
    let rot = Complex64::from_polar(1.0, params.gamma * x_in.power() * z);
    Ok((x_in.to_complex() * rot).into())
}

/// Conditions under which the large-SNR expansion is only marginally valid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidityWarning {
    /// |X|² is not large compared with QL; carries |X|²/QL.
    WeakSignal { ratio: f64 },
    /// γ²L³Q|X|² is not small; carries its value.
    StrongNonlinearNoise { value: f64 },
}

pub const WEAK_SIGNAL_RATIO: f64 = 10.0;
pub const NONLINEAR_NOISE_LIMIT: f64 = 0.1;

pub fn validity_warnings(x_in: ComplexAmplitude, params: &ChannelParams) -> Vec<ValidityWarning> {
    let mut out = Vec::new();
    let p = x_in.power();
    let ratio = p / params.noise_power();
    if ratio < WEAK_SIGNAL_RATIO {
        out.push(ValidityWarning::WeakSignal { ratio });
    }
    let value = params.gamma.powi(2) * params.length.powi(3) * params.noise_density * p;
    if value > NONLINEAR_NOISE_LIMIT {
        out.push(ValidityWarning::StrongNonlinearNoise { value });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_snr_and_regime() {
        let p = ChannelParams::default();
        assert!((snr(1.5e-4, &p).unwrap() - 1.0).abs() < 1e-12);
        assert!((snr(0.15, &p).unwrap() - 1000.0).abs() < 1e-9);
        let r = intermediate_regime(&p);
        assert!((r.p_low - 1.5e-4).abs() < 1e-18);
        assert!((r.p_high / 0.666_666_666_666e4 - 1.0).abs() < 1e-9);
        assert!(intermediate_regime(&p.with_gamma(0.0)).is_unbounded());
    }

    #[test]
    fn noiseless_output_has_zero_deviation() {
        let p = ChannelParams::new(1e-4, 1000.0, 1e-7).unwrap();
        let x = ComplexAmplitude::from_polar(2.0, 0.0);
        let y = zero_noise_output(x, &p, p.length).unwrap();
        let rc = reduced_coords(x, y, &p).unwrap();
        assert!((rc.mu - 0.4).abs() < 1e-15);
        assert!(rc.x0.abs() < 1e-14 && rc.y0.abs() < 1e-14);
    }

    #[test]
    fn linear_channel_deviation() {
        let p = ChannelParams::default().with_gamma(0.0);
        let rc = reduced_coords(ComplexAmplitude::new(1.0, 0.0), ComplexAmplitude::new(1.0, 1.0), &p).unwrap();
        assert_eq!(rc.mu, 0.0);
        assert!(rc.x0.abs() < 1e-15 && (rc.y0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_input_is_degenerate() {
        let p = ChannelParams::default();
        assert!(matches!(
            reduced_coords(ComplexAmplitude::default(), ComplexAmplitude::new(1.0, 0.0), &p),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn phase_is_canonical() {
        assert_eq!(ComplexAmplitude::new(-1.0, 0.0).phase(), -PI);
        assert_eq!(wrap_phase(PI), -PI);
        assert!((wrap_phase(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_rotation() {
        let p = ChannelParams::new(5e-4, 1000.0, 1e-7).unwrap();
        let x = ComplexAmplitude::new(1.0, 0.0);
        assert_eq!(zero_noise_output(x, &p, 0.0).unwrap(), x);
        let y = zero_noise_output(x, &p, 1000.0).unwrap();
        assert!((y.phase() - 0.5).abs() < 1e-15);
        assert!(zero_noise_output(x, &p, 1001.0).is_err());
    }

    #[test]
    fn validity_flags() {
        let p = ChannelParams::default();
        assert!(validity_warnings(ComplexAmplitude::new(1.0, 0.0), &p).is_empty());
        let w = validity_warnings(ComplexAmplitude::new(0.01, 0.0), &p);
        assert!(matches!(w[0], ValidityWarning::WeakSignal { .. }));
    }
}
