//! Radial input densities (β-family and optimal), output densities and the
//! optimal-input solver.

use std::f64::consts::PI;

use crate::channel::{ChannelParams, ComplexAmplitude};
use crate::error::{domain, Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::roots;
use crate::special_fn::{self, EULER_GAMMA};

/// A density over the complex plane that depends only on ρ = |X|.
///
/// `origin_exponent` e states that P(ρ) ~ ρ^{e−2} near the origin, so that
/// ρ·P(ρ)dρ is smooth in u = ρ^e.
pub trait RadialDensity: Sync {
    /// Density per mW (per unit d²X).
    fn density(&self, rho: f64) -> f64;

    fn log_density(&self, rho: f64) -> f64 {
        self.density(rho).ln()
    }

    /// Scale of variation in mW; the declared average power for normalized inputs.
    fn power(&self) -> f64;

    fn origin_exponent(&self) -> f64 {
        2.0
    }

    /// Δ_ρⁿ P(ρ) in closed form, if available.
    fn laplacian_power(&self, _rho: f64, _n: usize) -> Option<f64> {
        None
    }
}

/// Modified Gaussian input e^{−βρ²/2P} ρ^{β−2}/(πΓ(β/2)(2P/β)^{β/2}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaInput {
    pub beta: f64,
    pub power: f64,
}

pub const MAX_BETA: f64 = 8.0;

impl BetaInput {
    pub fn new(beta: f64, power: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= MAX_BETA) {
            return Err(domain("BetaInput", beta, "0 < beta <= 8"));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(domain("BetaInput", power, "power > 0"));
        }
        Ok(BetaInput { beta, power })
    }

    fn log_norm(&self) -> f64 {
        let b = self.beta;
        -(PI.ln() + special_fn::ln_gamma(0.5 * b) + 0.5 * b * (2.0 * self.power / b).ln())
    }

    /// Terms (coefficient, exponent q) of Dⁿ applied to u^p e^{−cu}, where
    /// D = u∂²_u + ∂_u and u = ρ².
    fn d_power_terms(&self, n: usize) -> Vec<(f64, f64)> {
        let c = 0.5 * self.beta / self.power;
        let mut terms = vec![(1.0, 0.5 * self.beta - 1.0)];
        for _ in 0..n {
            let mut next: Vec<(f64, f64)> = Vec::with_capacity(terms.len() + 2);
            let mut push = |coef: f64, q: f64| {
                if coef == 0.0 {
                    return;
                }
                if let Some(t) = next.iter_mut().find(|t| (t.1 - q).abs() < 1e-12) {
                    t.0 += coef;
                } else {
                    next.push((coef, q));
                }
            };
            for &(a, q) in &terms {
                push(a * q * q, q - 1.0);
                push(-a * (2.0 * q + 1.0) * c, q);
                push(a * c * c, q + 1.0);
            }
            terms = next;
        }
        terms
    }
}

/// P_X^{(β)}(ρ); +∞ at ρ = 0 when β < 2 (integrable singularity).
pub fn beta_pdf(d: &BetaInput, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(domain("beta_pdf", rho, "rho >= 0"));
    }
    Ok(d.density(rho))
}

impl RadialDensity for BetaInput {
    fn density(&self, rho: f64) -> f64 {
        if rho == 0.0 {
            return if self.beta < 2.0 {
                f64::INFINITY
            } else if self.beta == 2.0 {
                self.log_norm().exp()
            } else {
                0.0
            };
        }
        self.log_density(rho).exp()
    }

    fn log_density(&self, rho: f64) -> f64 {
        let b = self.beta;
        self.log_norm() - b * rho * rho / (2.0 * self.power) + (b - 2.0) * rho.ln()
    }

    fn power(&self) -> f64 {
        self.power
    }

    fn origin_exponent(&self) -> f64 {
        self.beta
    }

    fn laplacian_power(&self, rho: f64, n: usize) -> Option<f64> {
        let u = rho * rho;
        if u == 0.0 && self.beta != 2.0 {
            return None;
        }
        let c = 0.5 * self.beta / self.power;
        let poly: f64 = self
            .d_power_terms(n)
            .iter()
            .map(|&(a, q)| if q == 0.0 { a } else { a * u.powf(q) })
            .sum();
        Some(4f64.powi(n as i32) * poly * (self.log_norm() - c * u).exp())
    }
}

/// Optimal input N₀ e^{−λ₀ρ²}/√(1+γ²L²ρ⁴/3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalInput {
    /// Root α of G′/G = −γLP/√3; +∞ for the linear channel.
    pub alpha: f64,
    /// 1/mW.
    pub lambda0: f64,
    /// 1/mW.
    pub n0: f64,
    pub power: f64,
    /// γL of the channel the input was solved for.
    pub gamma_l: f64,
    /// Set when γ = 0 and the exact Gaussian was returned.
    pub gaussian_fallback: bool,
}

/// N₀ e^{−λ₀ρ²}/√(1+γ²L²ρ⁴/3).
pub fn optimal_pdf(d: &OptimalInput, rho: f64) -> f64 {
    d.density(rho)
}

impl RadialDensity for OptimalInput {
    fn density(&self, rho: f64) -> f64 {
        self.log_density(rho).exp()
    }

    fn log_density(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        let g = self.gamma_l * r2;
        self.n0.ln() - self.lambda0 * r2 - 0.5 * (g * g / 3.0).ln_1p()
    }

    fn power(&self) -> f64 {
        self.power
    }
}

/// γ̃ = γLP/√3.
pub fn gamma_tilde(power: f64, params: &ChannelParams) -> f64 {
    params.gamma_l() * power / 3f64.sqrt()
}

/// γ̃ − (−G′(α))/G(α); increasing in α with a single root.
pub fn optimal_equation(alpha: f64, gt: f64) -> Result<f64> {
    Ok(gt - special_fn::g_neg_derivative(alpha)? / special_fn::g_of_alpha(alpha)?)
}

pub fn solve_optimal(power: f64, params: &ChannelParams) -> Result<OptimalInput> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(domain("solve_optimal", power, "power > 0"));
    }
    params.validate()?;
    let gl = params.gamma_l();
    if gl == 0.0 {
        return Ok(OptimalInput {
            alpha: f64::INFINITY,
            lambda0: 1.0 / power,
            n0: 1.0 / (PI * power),
            power,
            gamma_l: 0.0,
            gaussian_fallback: true,
        });
    }
    let gt = gamma_tilde(power, params);
    let lo = 1e-12;
    if optimal_equation(lo, gt)? >= 0.0 {
        return Err(Error::Bracket { lo, hi: lo });
    }
    let mut hi = (2.0 / gt).max(1.0);
    let mut tries = 0;
    while optimal_equation(hi, gt)? <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket { lo, hi });
        }
    }
    // solve in log α, where the equation is close to linear at both ends
    let f = |la: f64| optimal_equation(la.exp(), gt).unwrap_or(f64::NAN);
    let la = roots::brent(f, lo.ln(), hi.ln(), 1e-13, 300)?;
    let alpha = la.exp();
    let g = special_fn::g_of_alpha(alpha)?;
    Ok(OptimalInput {
        alpha,
        lambda0: gl * alpha / 3f64.sqrt(),
        n0: gl / (PI * 3f64.sqrt() * g),
        power,
        gamma_l: gl,
        gaussian_fallback: false,
    })
}

/// Small-γ̃ asymptotic solution: (λ₀, N₀) = ((1−2γ̃²)/P, (1−γ̃²)/πP).
pub fn optimal_small_power(power: f64, params: &ChannelParams) -> (f64, f64) {
    let gt = gamma_tilde(power, params);
    ((1.0 - 2.0 * gt * gt) / power, (1.0 - gt * gt) / (PI * power))
}

/// Large-γ̃ asymptotic solution with C = 2e^{−γ_E}.
pub fn optimal_large_power(power: f64, params: &ChannelParams) -> (f64, f64) {
    let gt = gamma_tilde(power, params);
    let l = (2.0 * (-EULER_GAMMA).exp() * gt).ln();
    let lambda0 = (1.0 - l.ln() / l) / (power * l);
    (lambda0, gt / PI * lambda0)
}

/// ∫₀^∞ ρ·P(ρ)·h(ρ) dρ, integrated in u = ρ^e.
pub fn radial_integral<D: RadialDensity + ?Sized, H: Fn(f64) -> f64>(p: &D, h: H, tol: Tolerance) -> Result<f64> {
    let e = p.origin_exponent();
    let scale = p.power().powf(0.5 * e);
    let g = |s: f64| {
        let u = s * scale;
        if u == 0.0 {
            return 0.0;
        }
        let rho = u.powf(1.0 / e);
        let v = scale * u.powf(2.0 / e - 1.0) / e * p.density(rho) * h(rho);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // most of the mass sits below s ~ 1; split there for the adaptive rule
    let a = quadrature::integrate(g, 0.0, 1.0, tol)?;
    let b = quadrature::integrate_to_infinity(g, 1.0, tol)?;
    Ok(a.value + b.value)
}

/// (2π∫ρP dρ, 2π∫ρ³P dρ).
pub fn radial_moments<D: RadialDensity + ?Sized>(p: &D) -> Result<(f64, f64)> {
    let tol = Tolerance::new(1e-300, 1e-12);
    let m0 = 2.0 * PI * radial_integral(p, |_| 1.0, tol)?;
    let m2 = 2.0 * PI * radial_integral(p, |r| r * r, tol)?;
    Ok((m0, m2))
}

/// Exact output density of a β-input, per mW.
pub fn beta_output_pdf(d: &BetaInput, params: &ChannelParams, y_mag: f64) -> Result<f64> {
    Ok(log_beta_output_pdf(d, params, y_mag)?.exp())
}

pub fn log_beta_output_pdf(d: &BetaInput, params: &ChannelParams, y_mag: f64) -> Result<f64> {
    if !(y_mag >= 0.0) || !y_mag.is_finite() {
        return Err(domain("beta_output_pdf", y_mag, "y_mag >= 0"));
    }
    let n = params.noise_power();
    let b = d.beta;
    let denom = 2.0 * d.power + b * n;
    let y2 = y_mag * y_mag;
    let z = y2 * 2.0 * d.power / (n * denom);
    // z − |Y|²/QL = −β|Y|²/(2P+βQL)
    Ok(special_fn::log_confluent_1f1_scaled(0.5 * b, z)? - b * y2 / denom - (PI * n).ln()
        + 0.5 * b * (b * n / denom).ln())
}

/// Half-width of the integration window in units of √(QL).
const KERNEL_WINDOW: f64 = 14.0;

/// (2e^{−ρ′²/QL}/QL)∫ρe^{−ρ²/QL}I₀(2ρρ′/QL)P_X(ρ)dρ.
pub fn output_pdf_integral<D: RadialDensity + ?Sized>(p_in: &D, params: &ChannelParams, y_mag: f64) -> Result<f64> {
    if !(y_mag >= 0.0) || !y_mag.is_finite() {
        return Err(domain("output_pdf_integral", y_mag, "y_mag >= 0"));
    }
    let n = params.noise_power();
    let w = KERNEL_WINDOW * n.sqrt();
    let lo = (y_mag - w).max(0.0);
    let hi = y_mag + w;
    let e = p_in.origin_exponent();
    let kernel = |rho: f64| -> f64 {
        let d = rho - y_mag;
        let i0e = special_fn::bessel_i0_scaled(2.0 * rho * y_mag / n).unwrap_or(0.0);
        (-d * d / n).exp() * i0e
    };
    // u = ρ^e: ρ dρ = u^{2/e−1} du / e
    let (ulo, uhi) = (lo.powf(e), hi.powf(e));
    let g = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let rho = u.powf(1.0 / e);
        let v = u.powf(2.0 / e - 1.0) / e * p_in.density(rho) * kernel(rho);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // split at the kernel peak so the adaptive rule sees it
    let mid = y_mag.max(lo).powf(e).clamp(ulo, uhi);
    let tol = Tolerance::new(1e-300, 1e-12);
    let a = quadrature::integrate(g, ulo, mid, tol)?;
    let b = quadrature::integrate(g, mid, uhi, tol)?;
    Ok(2.0 / n * (a.value + b.value))
}

fn fd_laplacian<D: RadialDensity + ?Sized>(p: &D, rho: f64, n: usize, h: f64) -> f64 {
    let rho = rho.abs();
    if n == 0 {
        return p.density(rho);
    }
    let f0 = fd_laplacian(p, rho, n - 1, h);
    let fp = fd_laplacian(p, rho + h, n - 1, h);
    let fm = fd_laplacian(p, rho - h, n - 1, h);
    let d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if rho < 0.5 * h {
        2.0 * d2
    } else {
        d2 + (fp - fm) / (2.0 * h * rho)
    }
}

/// Σ_{n ≤ n_terms} (QL/4)ⁿ Δⁿ P_X(ρ)/n!, the truncated e^{(QL/4)Δ} P_X.
pub fn hankel_output_expansion<D: RadialDensity + ?Sized>(
    p_in: &D,
    params: &ChannelParams,
    rho: f64,
    n_terms: usize,
) -> Result<f64> {
    if n_terms > 3 {
        return Err(Error::InvalidParameter(format!("n_terms must be <= 3, got {n_terms}")));
    }
    if !(rho >= 0.0) {
        return Err(domain("hankel_output_expansion", rho, "rho >= 0"));
    }
    let q = 0.25 * params.noise_power();
    let h = 2e-3 * p_in.power().sqrt();
    let mut sum = 0.0;
    let mut coef = 1.0;
    for k in 0..=n_terms {
        if k > 0 {
            coef *= q / k as f64;
        }
        let lap = p_in
            .laplacian_power(rho, k)
            .unwrap_or_else(|| fd_laplacian(p_in, rho, k, h));
        sum += coef * lap;
    }
    Ok(sum)
}

/// Laplace-method output density P_X[Y e^{−iγL|Y|²}].
pub fn large_snr_output<F: Fn(ComplexAmplitude) -> f64>(p_in_2d: F, params: &ChannelParams, y_out: ComplexAmplitude) -> f64 {
    let mu_out = params.gamma_l() * y_out.power();
    p_in_2d((y_out.to_complex() * num_complex::Complex64::from_polar(1.0, -mu_out)).into())
}

/// Radial input: P_out[Y] = P_X[|Y|].
pub fn large_snr_output_radial<D: RadialDensity + ?Sized>(p_in: &D, y_mag: f64) -> f64 {
    p_in.density(y_mag)
}
