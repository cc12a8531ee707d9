//! Conditional density P[Y|X] at leading and next-to-leading order.

use std::f64::consts::PI;

use crate::channel::{reduced_coords, zero_noise_output, ChannelParams, ComplexAmplitude, ReducedCoords, WEAK_SIGNAL_RATIO};
use crate::classical::{cubic_form, quadratic_form};
use crate::error::{Error, Result};
use crate::path_integral::linear_bracket;
use crate::quadrature::GaussRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfOrder {
    Leading,
    /// Leading order times 1 − (linear) − (cubic) corrections.
    Nlo,
}

/// A density value together with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfEval {
    /// max(raw, 0), per mW.
    pub density: f64,
    /// Unclamped value; negative only in the deep NLO tail.
    pub raw: f64,
    pub clamped: bool,
    /// |X|² < 10·QL.
    pub below_validity: bool,
}

/// Leading-order density at reduced coordinates.
pub fn leading_density(rc: &ReducedCoords, params: &ChannelParams) -> f64 {
    let n = params.noise_power();
    let a = 1.0 + rc.mu * rc.mu / 3.0;
    (-quadratic_form(rc.mu, rc.x0, rc.y0) / n).exp() / (PI * n * a.sqrt())
}

/// 1 − linear − cubic correction of the NLO density.
pub fn nlo_bracket(rc: &ReducedCoords, rho: f64, params: &ChannelParams) -> f64 {
    1.0 - linear_bracket(rc, rho) - cubic_form(rc.mu, rho, rc.x0, rc.y0) / params.noise_power()
}

pub fn conditional_pdf_eval(
    x_in: ComplexAmplitude,
    y_out: ComplexAmplitude,
    params: &ChannelParams,
    order: PdfOrder,
) -> Result<PdfEval> {
    let rc = reduced_coords(x_in, y_out, params)?;
    let rho = x_in.magnitude();
    let lead = leading_density(&rc, params);
    let raw = match order {
        PdfOrder::Leading => lead,
        PdfOrder::Nlo => lead * nlo_bracket(&rc, rho, params),
    };
    Ok(PdfEval {
        density: raw.max(0.0),
        raw,
        clamped: raw < 0.0,
        below_validity: x_in.power() < WEAK_SIGNAL_RATIO * params.noise_power(),
    })
}

/// P[Y|X] per mW (per unit d²Y), clamped at zero.
pub fn conditional_pdf(x_in: ComplexAmplitude, y_out: ComplexAmplitude, params: &ChannelParams, order: PdfOrder) -> Result<f64> {
    Ok(conditional_pdf_eval(x_in, y_out, params, order)?.density)
}

/// e^{−|Y−X|²/QL}/(πQL).
pub fn conditional_pdf_linear(x_in: ComplexAmplitude, y_out: ComplexAmplitude, params: &ChannelParams) -> f64 {
    let n = params.noise_power();
    let d = (y_out.to_complex() - x_in.to_complex()).norm_sqr();
    (-d / n).exp() / (PI * n)
}

/// Gauss–Hermite rule over (x₀, y₀) aligned with the leading-order quadratic
/// form: returns points and weights such that Σ w·f ≈ ∫ f e^{−q/QL} dx₀dy₀.
fn principal_axis_rule(mu: f64, params: &ChannelParams, n_nodes: usize) -> Vec<(f64, f64, f64)> {
    let n = params.noise_power();
    let a = 1.0 + mu * mu / 3.0;
    // A = [[1+4μ²/3, −μ], [−μ, 1]]/(a·QL)
    let (p, r, s) = ((1.0 + 4.0 * mu * mu / 3.0) / (a * n), -mu / (a * n), 1.0 / (a * n));
    let tr = 0.5 * (p + s);
    let disc = (0.25 * (p - s) * (p - s) + r * r).sqrt();
    let (l1, l2) = (tr + disc, tr - disc);
    let theta = 0.5 * (2.0 * r).atan2(p - s);
    let (c, sn) = (theta.cos(), theta.sin());
    let gh = GaussRule::hermite(n_nodes);
    let jac = 1.0 / (l1 * l2).sqrt();
    let mut out = Vec::with_capacity(n_nodes * n_nodes);
    for (&u, &wu) in gh.nodes.iter().zip(&gh.weights) {
        for (&v, &wv) in gh.nodes.iter().zip(&gh.weights) {
            let (e1, e2) = (u / l1.sqrt(), v / l2.sqrt());
            let x0 = c * e1 - sn * e2;
            let y0 = sn * e1 + c * e2;
            out.push((x0, y0, wu * wv * jac));
        }
    }
    out
}

/// ∫ f(Y)·P[Y|X] d²Y by tensor Gauss–Hermite in the principal axes.
pub fn expectation_over_output<F: Fn(ComplexAmplitude) -> f64>(
    x_in: ComplexAmplitude,
    params: &ChannelParams,
    order: PdfOrder,
    n_nodes: usize,
    f: F,
) -> Result<f64> {
    let rho = x_in.magnitude();
    if rho == 0.0 {
        return Err(Error::DegenerateInput("input amplitude is zero, its phase is undefined"));
    }
    let mu = params.gamma_l() * x_in.power();
    let phase = x_in.phase();
    let mut total = 0.0;
    for (x0, y0, w) in principal_axis_rule(mu, params, n_nodes) {
        let rc = ReducedCoords { mu, x0, y0 };
        let y = rc.reconstruct(rho, phase);
        let e = conditional_pdf_eval(x_in, y, params, order)?;
        // divide out the Gaussian weight carried by the rule
        let gauss = (-quadratic_form(mu, x0, y0) / params.noise_power()).exp();
        total += w * f(y) * e.raw / gauss;
    }
    Ok(total)
}

/// ∫ P[Y|X] d²Y of the unclamped density.
pub fn normalization(x_in: ComplexAmplitude, params: &ChannelParams, order: PdfOrder) -> Result<f64> {
    expectation_over_output(x_in, params, order, 24, |_| 1.0)
}

/// E|Y − Ψ₀(L)|² at leading order for each noise density in `q_sequence`.
pub fn delta_limit_check(x_in: ComplexAmplitude, params: &ChannelParams, q_sequence: &[f64]) -> Result<Vec<(f64, f64)>> {
    for w in q_sequence.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter("q_sequence must be strictly decreasing".into()));
        }
    }
    q_sequence
        .iter()
        .map(|&q| {
            if !(q > 0.0) {
                return Err(Error::InvalidParameter(format!("noise density must be > 0, got {q}")));
            }
            let p = params.with_noise_density(q);
            let psi0 = zero_noise_output(x_in, &p, p.length)?.to_complex();
            let m = expectation_over_output(x_in, &p, PdfOrder::Leading, 8, |y| (y.to_complex() - psi0).norm_sqr())?;
            Ok((q, m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_value() {
        let p = ChannelParams::default();
        let x = ComplexAmplitude::new(1.0, 0.0);
        let y = zero_noise_output(x, &p, p.length).unwrap();
        let v = conditional_pdf(x, y, &p, PdfOrder::Nlo).unwrap();
        let want = 1.0 / (PI * 1.5e-4 * (1.0f64 + 1.0 / 3.0).sqrt());
        assert!((v / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_channel_reduces_to_gaussian() {
        let p = ChannelParams::default().with_gamma(0.0);
        let x = ComplexAmplitude::new(0.6, -0.3);
        let y = ComplexAmplitude::new(0.605, -0.31);
        let a = conditional_pdf(x, y, &p, PdfOrder::Nlo).unwrap();
        let b = conditional_pdf_linear(x, y, &p);
        assert!((a / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_pdf_values() {
        let p = ChannelParams::default();
        let n = p.noise_power();
        let x = ComplexAmplitude::new(1.0, 0.0);
        assert!((conditional_pdf_linear(x, x, &p) - 1.0 / (PI * n)).abs() < 1e-9);
        let y = ComplexAmplitude::new(1.0 + n.sqrt(), 0.0);
        assert!((conditional_pdf_linear(x, y, &p) * PI * n - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn normalized_at_both_orders() {
        let p = ChannelParams::default();
        let x = ComplexAmplitude::from_polar(1.0, 0.7);
        for order in [PdfOrder::Leading, PdfOrder::Nlo] {
            let m = normalization(x, &p, order).unwrap();
            assert!((m - 1.0).abs() < 1e-12, "{order:?} {m}");
        }
    }

    #[test]
    fn second_moment_scales_with_q() {
        let p = ChannelParams::default();
        let x = ComplexAmplitude::new(1.0, 0.0);
        let mu: f64 = 1.0;
        let out = delta_limit_check(x, &p, &[1.5e-7, 1.5e-7 / 4.0, 1.5e-7 / 16.0]).unwrap();
        for (q, m) in out {
            assert!((m / (q * 1000.0) - (1.0 + 2.0 * mu * mu / 3.0)).abs() < 1e-12);
        }
        assert!(delta_limit_check(x, &p, &[1e-7, 2e-7]).is_err());
    }
}
