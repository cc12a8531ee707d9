//! Entropies and mutual information at leading order in 1/SNR, in nats.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use crate::channel::ChannelParams;
use crate::distributions::{gamma_tilde, radial_integral, solve_optimal, BetaInput, OptimalInput, RadialDensity};
use crate::error::{domain, Result};
use crate::quadrature::{self, GaussRule, Tolerance};
use crate::special_fn::{self, EULER_GAMMA};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputTag {
    Beta(f64),
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiResult {
    pub power: f64,
    pub mi_nats: f64,
    pub h_out: f64,
    pub h_cond: f64,
    pub input: InputTag,
}

impl MiResult {
    fn new(power: f64, h_out: f64, h_cond: f64, input: InputTag) -> Self {
        MiResult {
            power,
            mi_nats: h_out - h_cond,
            h_out,
            h_cond,
            input,
        }
    }
}

fn check_beta(beta: f64, power: f64) -> Result<()> {
    BetaInput::new(beta, power).map(|_| ())
}

/// H_β[Y] = log(P(2π/β)Γ(β/2)) + β/2 + ((2−β)/2)ψ(β/2).
pub fn entropy_output_beta(beta: f64, power: f64) -> Result<f64> {
    check_beta(beta, power)?;
    let h = 0.5 * beta;
    Ok((power * 2.0 * PI / beta).ln() + special_fn::ln_gamma(h) + h + (1.0 - h) * special_fn::digamma(h)?)
}

const LAGUERRE_ORDER: usize = 200;

fn laguerre_rule(beta: f64) -> GaussRule {
    static HALF: OnceLock<GaussRule> = OnceLock::new();
    static ONE: OnceLock<GaussRule> = OnceLock::new();
    let a = 0.5 * beta - 1.0;
    if a == -0.5 {
        HALF.get_or_init(|| GaussRule::laguerre(LAGUERRE_ORDER, -0.5)).clone()
    } else if a == 0.0 {
        ONE.get_or_init(|| GaussRule::laguerre(LAGUERRE_ORDER, 0.0)).clone()
    } else {
        GaussRule::laguerre(LAGUERRE_ORDER, a)
    }
}

/// J = ∫₀^∞ e^{−τ} τ^{β/2−1} log(1 + 4γ̃²τ²/β²) dτ.
pub fn beta_log_integral(beta: f64, gt: f64) -> Result<f64> {
    let c = 4.0 * gt * gt / (beta * beta);
    if c == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| (c * t * t).ln_1p();
    let rule = laguerre_rule(beta);
    let v = rule.sum(f);
    // the rule is unreliable once the log branch point ±i/√c nears the origin
    let half = GaussRule::laguerre(LAGUERRE_ORDER / 2, 0.5 * beta - 1.0).sum(f);
    if (v - half).abs() <= 1e-13 * v.abs() {
        return Ok(v);
    }
    beta_log_integral_adaptive(beta, c)
}

/// u = τ^{β/2} removes the endpoint singularity of the weight.
fn beta_log_integral_adaptive(beta: f64, c: f64) -> Result<f64> {
    let e = 2.0 / beta;
    let g = |u: f64| {
        let t = u.powf(e);
        e * (-t).exp() * (c * t * t).ln_1p()
    };
    let tol = Tolerance::new(1e-300, 1e-13);
    let knee = c.powf(-0.25 * beta).min(1.0);
    let a = quadrature::integrate(g, 0.0, knee, tol)?;
    let b = quadrature::integrate(g, knee, 1.0, tol)?;
    let t = quadrature::integrate_to_infinity(g, 1.0, tol)?;
    Ok(a.value + b.value + t.value)
}

/// H_β[Y|X] = log(πeQL) + J/(2Γ(β/2)).
pub fn cond_entropy_beta(beta: f64, power: f64, params: &ChannelParams) -> Result<f64> {
    check_beta(beta, power)?;
    let j = beta_log_integral(beta, gamma_tilde(power, params))?;
    Ok((PI * E * params.noise_power()).ln() + j / (2.0 * special_fn::gamma_fn(0.5 * beta)?))
}

pub fn mi_beta(beta: f64, power: f64, params: &ChannelParams) -> Result<MiResult> {
    let h_out = entropy_output_beta(beta, power)?;
    let h_cond = cond_entropy_beta(beta, power, params)?;
    Ok(MiResult::new(power, h_out, h_cond, InputTag::Beta(beta)))
}

/// log SNR + log(2Γ(β/2)/β) − J/(2Γ(β/2)) + ((β−2)/2)(1 − ψ(β/2)).
pub fn mi_beta_closed_form(beta: f64, power: f64, params: &ChannelParams) -> Result<f64> {
    check_beta(beta, power)?;
    let h = 0.5 * beta;
    let g = special_fn::gamma_fn(h)?;
    let j = beta_log_integral(beta, gamma_tilde(power, params))?;
    Ok((power / params.noise_power()).ln() + (2.0 * g / beta).ln() - j / (2.0 * g)
        + (h - 1.0) * (1.0 - special_fn::digamma(h)?))
}

/// γ̃ ≫ 1 limit: −log(QL²γ) − (2−β)/2 + log3/2 − (β/2)ψ(β/2) + log Γ(β/2).
pub fn mi_beta_asymptote(beta: f64, params: &ChannelParams) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain("mi_beta_asymptote", beta, "beta > 0"));
    }
    if !(params.gamma > 0.0) {
        return Err(domain("mi_beta_asymptote", params.gamma, "gamma > 0"));
    }
    let h = 0.5 * beta;
    Ok(-(params.noise_density * params.length * params.length * params.gamma).ln() - (1.0 - h) + 0.5 * 3f64.ln()
        - h * special_fn::digamma(h)?
        + special_fn::ln_gamma(h))
}

/// ⟨log(1+γ²L²ρ⁴/3)⟩ under the optimal input, = K(α)/G(α).
pub fn optimal_log_moment(d: &OptimalInput) -> Result<f64> {
    if d.gaussian_fallback || d.gamma_l == 0.0 {
        return Ok(0.0);
    }
    let a = d.alpha;
    // z = sinh t: ∫e^{−αz}log(1+z²)/√(1+z²)dz = ∫2 log(cosh t) e^{−α sinh t} dt
    let f = |t: f64| 2.0 * log_cosh(t) * (-a * t.sinh()).exp();
    let upper = (745.0 / a).asinh();
    let peak = (1.0 / a).asinh().min(upper);
    let tol = Tolerance::new(1e-300, 1e-13);
    let k = quadrature::integrate(f, 0.0, peak, tol)?.value + quadrature::integrate(f, peak, upper, tol)?.value;
    Ok(k / special_fn::g_of_alpha(a)?)
}

fn log_cosh(t: f64) -> f64 {
    let t = t.abs();
    if t < 1.0 {
        let s = (0.5 * t).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
    }
}

/// I_opt = Pλ₀ − log N₀ − log(πeQL).
pub fn mi_optimal_closed_form(d: &OptimalInput, params: &ChannelParams) -> f64 {
    d.power * d.lambda0 - d.n0.ln() - (PI * E * params.noise_power()).ln()
}

pub fn mi_optimal(power: f64, params: &ChannelParams) -> Result<MiResult> {
    let d = solve_optimal(power, params)?;
    mi_for_optimal(&d, params)
}

pub fn mi_for_optimal(d: &OptimalInput, params: &ChannelParams) -> Result<MiResult> {
    let half_log = 0.5 * optimal_log_moment(d)?;
    let h_cond = (PI * E * params.noise_power()).ln() + half_log;
    let h_out = mi_optimal_closed_form(d, params) + h_cond;
    Ok(MiResult::new(d.power, h_out, h_cond, InputTag::Optimal))
}

/// Small-γ̃ expansion log(1+SNR) − γ̃².
pub fn mi_optimal_small_power(power: f64, params: &ChannelParams) -> f64 {
    let gt = gamma_tilde(power, params);
    (power / params.noise_power()).ln_1p() - gt * gt
}

/// Large-γ̃ expansion of I_opt.
pub fn mi_optimal_large_power(power: f64, params: &ChannelParams) -> f64 {
    let l = (2.0 * (-EULER_GAMMA).exp() * gamma_tilde(power, params)).ln();
    let ll = l.ln();
    -(params.noise_density * params.length * params.length * params.gamma).ln() - 1.0 + 0.5 * 3f64.ln() + ll
        + (ll + 1.0 - ll / l) / l
}

/// −∫ P_X log P_X d²X.
pub fn entropy_output_general<D: RadialDensity + ?Sized>(p_in: &D) -> Result<f64> {
    let tol = Tolerance::new(1e-300, 1e-12);
    Ok(-2.0 * PI * radial_integral(p_in, |r| p_in.log_density(r), tol)?)
}

/// 1 + log(πQL) + ½⟨log(1+γ²L²ρ⁴/3)⟩.
pub fn cond_entropy_general<D: RadialDensity + ?Sized>(p_in: &D, params: &ChannelParams) -> Result<f64> {
    let g = params.gamma_l();
    let tol = Tolerance::new(1e-300, 1e-12);
    let m = if g == 0.0 {
        0.0
    } else {
        2.0 * PI * radial_integral(p_in, |r| (g * g * r.powi(4) / 3.0).ln_1p(), tol)?
    };
    Ok(1.0 + (PI * params.noise_power()).ln() + 0.5 * m)
}

/// log(1 + SNR).
pub fn shannon_capacity(power: f64, params: &ChannelParams) -> Result<f64> {
    if !(power > 0.0) {
        return Err(domain("shannon_capacity", power, "power > 0"));
    }
    Ok((power / params.noise_power()).ln_1p())
}

/// −log(γQL²) + (γ_E − 1 + log 3π)/2.
pub fn prior_bound_baseline(params: &ChannelParams) -> Result<f64> {
    if !(params.gamma > 0.0) {
        return Err(domain("prior_bound_baseline", params.gamma, "gamma > 0"));
    }
    Ok(-(params.gamma * params.noise_power() * params.length).ln() + 0.5 * (EULER_GAMMA - 1.0 + (3.0 * PI).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_entropy() {
        let h = entropy_output_beta(2.0, 0.37).unwrap();
        assert!((h - (PI * E * 0.37).ln()).abs() < 1e-14);
    }

    #[test]
    fn half_gaussian_entropy() {
        let h = entropy_output_beta(1.0, 1.0).unwrap();
        let want = (2.0 * PI.powf(1.5)).ln() + 0.5 - 0.5 * (EULER_GAMMA + 2.0 * std::f64::consts::LN_2);
        assert!((h - want).abs() < 1e-14);
    }

    #[test]
    fn linear_channel() {
        let p = ChannelParams::default().with_gamma(0.0);
        let n = p.noise_power();
        assert!((cond_entropy_beta(1.0, 1.0, &p).unwrap() - (PI * E * n).ln()).abs() < 1e-14);
        let m = mi_beta(2.0, 0.3, &p).unwrap();
        assert!((m.mi_nats - (0.3 / n).ln()).abs() < 1e-12);
        let o = mi_optimal(0.3, &p).unwrap();
        assert!((o.mi_nats - (0.3 / n).ln()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_entropy_difference() {
        let p = ChannelParams::default();
        for beta in [0.5, 1.0, 2.0, 3.0] {
            for power in [0.01, 1.0, 100.0] {
                let a = mi_beta(beta, power, &p).unwrap().mi_nats;
                let b = mi_beta_closed_form(beta, power, &p).unwrap();
                assert!((a - b).abs() < 1e-12, "beta={beta} P={power}");
            }
        }
    }

    #[test]
    fn laguerre_and_adaptive_agree() {
        for (beta, gt) in [(1.0, 0.3), (2.0, 2.0), (3.0, 0.05)] {
            let c = 4.0 * gt * gt / (beta * beta);
            let a = beta_log_integral(beta, gt).unwrap();
            let b = beta_log_integral_adaptive(beta, c).unwrap();
            assert!((a - b).abs() < 1e-11 * b.abs(), "beta={beta} gt={gt}");
        }
    }

    #[test]
    fn baseline_differs_by_log2() {
        let p = ChannelParams::default();
        let d = mi_beta_asymptote(1.0, &p).unwrap() - prior_bound_baseline(&p).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-13);
    }

    #[test]
    fn shannon_one_nat() {
        let p = ChannelParams::default();
        let power = (E - 1.0) * p.noise_power();
        assert!((shannon_capacity(power, &p).unwrap() - 1.0).abs() < 1e-14);
    }
}
