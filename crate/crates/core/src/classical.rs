//! Extremal trajectories of the action S[ψ] = ∫|∂_zψ − iγ|ψ|²ψ|² dz: the exact
//! trigonometric and hyperbolic families, the perturbative solutions κ₁ and
//! κ₂ around Ψ₀, and the next-to-leading-order action.

use num_complex::Complex64;

use crate::channel::{ChannelParams, ReducedCoords};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Trigonometric,
    Hyperbolic,
}

/// Integration constants (k, μ̃, ζ₀, θ₀) of an exact trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConstants {
    pub regime: Regime,
    pub k: f64,
    pub mu_c: f64,
    pub zeta0: f64,
    pub theta0: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn tanhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 3.0
    } else {
        x.tanh() / x
    }
}

impl TrajectoryConstants {
    fn check(&self, gamma_l: f64) -> Result<()> {
        if !(gamma_l > 0.0) {
            return Err(Error::InvalidConstants(format!("gamma*L must be > 0, got {gamma_l}")));
        }
        if !(self.k >= 0.0) || !self.k.is_finite() || !self.mu_c.is_finite() {
            return Err(Error::InvalidConstants(format!("k must be >= 0, got {}", self.k)));
        }
        match self.regime {
            Regime::Trigonometric => {
                if self.mu_c < self.k {
                    return Err(Error::InvalidConstants(format!(
                        "trigonometric regime needs mu_c >= k, got mu_c={} k={}",
                        self.mu_c, self.k
                    )));
                }
                // the minimum of ρ² over all ζ is (μ̃ − √(μ̃²−k²))/2γL
                if self.mu_c <= 0.0 {
                    return Err(Error::InvalidConstants("rho^2 vanishes for mu_c = k = 0".into()));
                }
            }
            Regime::Hyperbolic => {
                let zmin = if (0.0..=1.0).contains(&self.zeta0) {
                    0.0
                } else {
                    self.zeta0.abs().min((1.0 - self.zeta0).abs())
                };
                let s = self.mu_c.hypot(self.k);
                let r2 = -self.mu_c + s * (2.0 * self.k * zmin).cosh();
                if !(r2 > 0.0) {
                    return Err(Error::InvalidConstants(format!(
                        "rho^2 <= 0 on [0,1] for hyperbolic constants {self:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// μ̃ + √(μ̃² ± k²) written without cancellation.
    fn mu_plus_s(&self) -> f64 {
        match self.regime {
            Regime::Trigonometric => self.mu_c + (self.mu_c * self.mu_c - self.k * self.k).sqrt(),
            Regime::Hyperbolic => {
                let s = self.mu_c.hypot(self.k);
                if self.mu_c >= 0.0 {
                    self.mu_c + s
                } else {
                    self.k * self.k / (s - self.mu_c)
                }
            }
        }
    }
}

/// (ρ²(ζ), θ(ζ)) of the exact trajectory, with ζ = z/L.
pub fn classical_trajectory(c: &TrajectoryConstants, gamma_l: f64, zeta: f64) -> Result<(f64, f64)> {
    c.check(gamma_l)?;
    let zp = zeta - c.zeta0;
    let k = c.k;
    let mc = c.mu_c;
    match c.regime {
        Regime::Trigonometric => {
            let s = (mc * mc - k * k).sqrt();
            // μ̃ + s·cos x = k²/(μ̃+s) + 2s·cos²(x/2), free of cancellation
            let half = (k * zp).cos();
            let rho_sq = (k * k / c.mu_plus_s() + 2.0 * s * half * half) / (2.0 * gamma_l);
            let phi = k * zp;
            let n = (phi / std::f64::consts::PI).round();
            // (μ̃ − s)/k = k/(μ̃ + s); the branch index keeps θ continuous
            let arc = n * std::f64::consts::PI + (k / (mc + s) * (phi - n * std::f64::consts::PI).tan()).atan();
            let theta = 0.5 * mc * zp + 0.5 * s * zp * sinc(2.0 * k * zp) + arc + c.theta0;
            Ok((rho_sq, theta))
        }
        Regime::Hyperbolic => {
            let s = mc.hypot(k);
            let sh = (k * zp).sinh();
            let rho_sq = if mc >= 0.0 {
                (k * k / c.mu_plus_s() + 2.0 * s * sh * sh) / (2.0 * gamma_l)
            } else {
                (-mc + s * (2.0 * k * zp).cosh()) / (2.0 * gamma_l)
            };
            let arc = (c.mu_plus_s() * zp * tanhc(k * zp)).atan();
            let theta = -0.5 * mc * zp + 0.5 * s * zp * sinhc(2.0 * k * zp) - arc + c.theta0;
            Ok((rho_sq, theta))
        }
    }
}

/// ψ(ζ) = ρ(ζ) e^{iθ(ζ)}.
pub fn trajectory_field(c: &TrajectoryConstants, gamma_l: f64, zeta: f64) -> Result<Complex64> {
    let (r2, th) = classical_trajectory(c, gamma_l, zeta)?;
    Ok(Complex64::from_polar(r2.sqrt(), th))
}

/// Action S of the exact trajectory, mW/km.
pub fn classical_action(c: &TrajectoryConstants, params: &ChannelParams) -> Result<f64> {
    let gamma_l = params.gamma_l();
    c.check(gamma_l)?;
    let k = c.k;
    let mc = c.mu_c;
    // (sin 2k(1−ζ₀) + sin 2kζ₀)/2k = sinc(k)·cos k(1−2ζ₀), likewise for sinh
    let bracket = match c.regime {
        Regime::Trigonometric => {
            let s = (mc * mc - k * k).sqrt();
            let x = sinc(k) * (k * (1.0 - 2.0 * c.zeta0)).cos();
            k * k / (mc + s) + s * (1.0 - x)
        }
        Regime::Hyperbolic => {
            let s = mc.hypot(k);
            let y = sinhc(k) * (k * (1.0 - 2.0 * c.zeta0)).cosh();
            c.mu_plus_s() + s * (y - 1.0)
        }
    };
    Ok(k * k / (2.0 * gamma_l) * bracket / params.length)
}

/// Coefficients of κ₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa1Coeffs {
    pub a1: f64,
    pub a2: f64,
}

pub fn kappa1_coeffs(rc: &ReducedCoords) -> Kappa1Coeffs {
    let mu = rc.mu;
    let a = 1.0 + mu * mu / 3.0;
    Kappa1Coeffs {
        a1: (-mu * rc.x0 + rc.y0) / a,
        a2: ((1.0 - 2.0 * mu * mu / 3.0) * rc.x0 + mu * rc.y0) / a,
    }
}

/// κ₁ at t = z/L.
pub fn kappa1(rc: &ReducedCoords, t: f64) -> Complex64 {
    let Kappa1Coeffs { a1, a2 } = kappa1_coeffs(rc);
    let mu = rc.mu;
    let x1 = (-mu * a1 * t + a2) * t;
    let y1 = (-2.0 / 3.0 * mu * mu * a1 * t * t + mu * a2 * t + a1) * t;
    Complex64::new(x1, y1)
}

/// dκ₁/dt.
pub fn kappa1_derivative(rc: &ReducedCoords, t: f64) -> Complex64 {
    let Kappa1Coeffs { a1, a2 } = kappa1_coeffs(rc);
    let mu = rc.mu;
    Complex64::new(
        -2.0 * mu * a1 * t + a2,
        -2.0 * mu * mu * a1 * t * t + 2.0 * mu * a2 * t + a1,
    )
}

/// κ₂ at t = z/L for an input of modulus `rho`.
pub fn kappa2(rc: &ReducedCoords, rho: f64, t: f64) -> Result<Complex64> {
    if !(rho > 0.0) {
        return Err(domain("kappa2", rho, "rho > 0"));
    }
    let (mu, x0, y0) = (rc.mu, rc.x0, rc.y0);
    let m2 = mu * mu;
    let m4 = m2 * m2;
    let a = 1.0 + m2 / 3.0;
    let pre = -(mu / rho) / (270.0 * a * a * a) * (1.0 - t) * t;
    let d = y0 - mu * x0;
    let xp = mu * (2.0 * m4 - 15.0 * m2 + 585.0) * x0 * x0
        + 2.0 * (13.0 * m2 * (m2 + 15.0) - 180.0) * x0 * y0
        + mu * (2.0 * m2 + 15.0) * (5.0 * m2 - 9.0) * y0 * y0
        - 5.0 * (m2 + 3.0) * t * (mu * (m2 - 15.0) * x0 * x0 - 4.0 * (m2 - 6.0) * x0 * y0 + mu * (m2 + 9.0) * y0 * y0)
        + 5.0 * mu * (m2 + 3.0) * t * t * (3.0 * (5.0 * m2 - 3.0) * x0 * x0 - 36.0 * mu * x0 * y0 - (m2 - 15.0) * y0 * y0)
        + 20.0 * m2 * (m2 + 3.0) * t.powi(3) * d * (2.0 * mu * y0 - (m2 - 3.0) * x0)
        - 20.0 * m2 * mu * (m2 + 3.0) * t.powi(4) * d * d;
    let yp = (7.0 * m4 - 75.0 * m2 + 360.0) * x0 * x0
        + 6.0 * mu * (m2 + 75.0) * x0 * y0
        + 3.0 * m2 * (5.0 * m2 + 39.0) * y0 * y0
        + 2.0
            * t
            * ((m4 * m2 - 4.0 * m4 + 255.0 * m2 + 180.0) * x0 * x0
                + mu * (m2 + 15.0) * (13.0 * m2 + 3.0) * x0 * y0
                + m2 * (5.0 * m4 + 36.0 * m2 - 9.0) * y0 * y0)
        - 14.0 * mu * (m2 + 3.0) * t * t * d * ((15.0 - 4.0 * m2) * x0 + 9.0 * mu * y0)
        + 84.0 * m2 * (m2 + 3.0) * t.powi(3) * d * d;
    Ok(Complex64::new(pre * xp, pre * yp))
}

/// ((1+4μ²/3)x₀² − 2μx₀y₀ + y₀²)/(1+μ²/3).
pub fn quadratic_form(mu: f64, x0: f64, y0: f64) -> f64 {
    ((1.0 + 4.0 * mu * mu / 3.0) * x0 * x0 - 2.0 * mu * x0 * y0 + y0 * y0) / (1.0 + mu * mu / 3.0)
}

/// Cubic correction of the action in the same units as `quadratic_form`.
pub fn cubic_form(mu: f64, rho: f64, x0: f64, y0: f64) -> f64 {
    let m2 = mu * mu;
    let m4 = m2 * m2;
    let a = 1.0 + m2 / 3.0;
    let poly = mu * (4.0 * m4 + 15.0 * m2 + 225.0) * x0.powi(3)
        + (23.0 * m4 + 255.0 * m2 - 90.0) * x0 * x0 * y0
        + mu * (20.0 * m4 + 117.0 * m2 - 45.0) * x0 * y0 * y0
        - 3.0 * (5.0 * m4 + 33.0 * m2 + 30.0) * y0.powi(3);
    (mu / rho) / (135.0 * a * a * a) * poly
}

/// S/Q through next-to-leading order.
pub fn action_nlo(rc: &ReducedCoords, rho: f64, params: &ChannelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain("action_nlo", rho, "rho > 0"));
    }
    let n = params.noise_power();
    Ok((quadratic_form(rc.mu, rc.x0, rc.y0) + cubic_form(rc.mu, rho, rc.x0, rc.y0)) / n)
}

/// S/Q at leading order.
pub fn action_leading(rc: &ReducedCoords, params: &ChannelParams) -> f64 {
    quadratic_form(rc.mu, rc.x0, rc.y0) / params.noise_power()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(mu: f64, x0: f64, y0: f64) -> ReducedCoords {
        ReducedCoords { mu, x0, y0 }
    }

    #[test]
    fn constant_modulus_limits() {
        let gl = 0.8;
        let mu = 1.3;
        let c = TrajectoryConstants {
            regime: Regime::Trigonometric,
            k: 0.0,
            mu_c: mu,
            zeta0: 0.3,
            theta0: 0.2,
        };
        for z in [0.0, 0.4, 1.0] {
            let (r2, th) = classical_trajectory(&c, gl, z).unwrap();
            assert!((r2 - mu / gl).abs() < 1e-15);
            assert!((th - (mu * (z - 0.3) + 0.2)).abs() < 1e-14);
        }
        let c = TrajectoryConstants {
            regime: Regime::Trigonometric,
            k: 2.0 * mu,
            mu_c: 2.0 * mu,
            zeta0: 0.0,
            theta0: 0.1,
        };
        for z in [0.0, 0.3, 0.9] {
            let (r2, th) = classical_trajectory(&c, gl, z).unwrap();
            assert!((r2 - mu / gl).abs() < 1e-14);
            assert!((th - (3.0 * mu * z + 0.1)).abs() < 1e-13, "z={z} th={th}");
        }
    }

    #[test]
    fn invalid_constants_rejected() {
        let c = TrajectoryConstants {
            regime: Regime::Trigonometric,
            k: 2.0,
            mu_c: 1.0,
            zeta0: 0.0,
            theta0: 0.0,
        };
        assert!(matches!(classical_trajectory(&c, 1.0, 0.5), Err(Error::InvalidConstants(_))));
        let c = TrajectoryConstants {
            regime: Regime::Hyperbolic,
            k: 0.0,
            mu_c: 1.0,
            zeta0: 0.0,
            theta0: 0.0,
        };
        assert!(classical_trajectory(&c, 1.0, 0.5).is_err());
    }

    #[test]
    fn action_vanishes_at_k_zero() {
        let p = ChannelParams::default();
        for regime in [Regime::Trigonometric, Regime::Hyperbolic] {
            let c = TrajectoryConstants {
                regime,
                k: 0.0,
                mu_c: if regime == Regime::Trigonometric { 1.0 } else { -1.0 },
                zeta0: 0.4,
                theta0: 0.0,
            };
            assert_eq!(classical_action(&c, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn kappa1_boundaries() {
        let r = rc(1.0, 0.1, -0.2);
        assert_eq!(kappa1(&r, 0.0), Complex64::new(0.0, 0.0));
        let e = kappa1(&r, 1.0);
        assert!((e.re - 0.1).abs() < 1e-14 && (e.im + 0.2).abs() < 1e-14);
    }

    #[test]
    fn kappa2_boundaries() {
        let r = rc(0.7, 0.05, 0.03);
        assert_eq!(kappa2(&r, 1.0, 0.0).unwrap().norm(), 0.0);
        assert!(kappa2(&r, 1.0, 1.0).unwrap().norm() < 1e-18);
        assert_eq!(kappa2(&rc(0.7, 0.0, 0.0), 1.0, 0.4).unwrap().norm(), 0.0);
        assert!(kappa2(&r, 0.0, 0.5).is_err());
    }

    #[test]
    fn linear_channel_action() {
        let p = ChannelParams::default().with_gamma(0.0);
        let r = rc(0.0, 0.02, 0.01);
        let s = action_nlo(&r, 1.0, &p).unwrap();
        assert!((s - (0.02f64 * 0.02 + 0.01 * 0.01) / 1.5e-4).abs() < 1e-12);
    }
}
