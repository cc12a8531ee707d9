//! Fluctuation determinant, its inverse, the continuum Green matrix and the
//! pre-exponential factor of the path integral.

use std::f64::consts::PI;

use crate::channel::{ChannelParams, ReducedCoords};
use crate::error::{domain, Error, Result};

fn alpha_of(n: usize, mu: f64) -> f64 {
    4.0 * mu * mu / (n as f64).powi(3)
}

/// det M(α) for the (N−1)×(N−1) fluctuation matrix, α = 4μ²/N³.
pub fn det_m(n: usize, mu: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("det_m needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let a = alpha_of(n, mu);
    Ok(nf + a * nf * nf * (nf * nf - 1.0) / 12.0)
}

/// Dense M(α): 2+α on the diagonal, −1+α next to it, α elsewhere.
pub fn m_matrix(n: usize, mu: f64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("m_matrix needs n >= 2, got {n}")));
    }
    let a = alpha_of(n, mu);
    let m = n - 1;
    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|j| match i.abs_diff(j) {
                    0 => 2.0 + a,
                    1 => -1.0 + a,
                    _ => a,
                })
                .collect()
        })
        .collect())
}

/// αN⁴/(4 det M), the weight of the rank-one part of M⁻¹; tends to 3μ²/(3+μ²).
pub fn rank_one_weight(n: usize, mu: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(alpha_of(n, mu) * nf.powi(4) / (4.0 * det_m(n, mu)?))
}

/// (M⁻¹)_{ij} for 1 ≤ i, j ≤ n−1.
pub fn m_inverse_entry(n: usize, mu: f64, i: usize, j: usize) -> Result<f64> {
    if n < 2 || i < 1 || j < 1 || i > n - 1 || j > n - 1 {
        return Err(Error::IndexOutOfRange {
            max: n.saturating_sub(1),
            i,
            j,
        });
    }
    let nf = n as f64;
    let u = i as f64 / nf;
    let v = j as f64 / nf;
    let bridge = if i <= j { u * (1.0 - v) } else { v * (1.0 - u) };
    let w = rank_one_weight(n, mu)?;
    Ok(nf * (bridge - w * u * (1.0 - u) * v * (1.0 - v)))
}

/// Components of the Green matrix at (z, z′).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval {
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
}

fn g11(mu: f64, z: f64, w: f64, z_above: bool) -> f64 {
    let c = 3.0 * mu * mu / (4.0 * (3.0 + mu * mu));
    let h = |z: f64, w: f64, step: bool| {
        let s = if step { z / 2.0 * (1.0 - w) } else { 0.0 };
        s - c * (1.0 - z) * (1.0 - w) * z * w
    };
    h(z, w, !z_above) + h(w, z, z_above)
}

fn g12(mu: f64, z: f64, w: f64, z_above: bool) -> f64 {
    let m2 = mu * mu;
    let pre = mu / (2.0 * (3.0 + m2));
    if z_above {
        pre * w * (1.0 - z) * (3.0 * w - 3.0 * z + w * m2 * (1.0 + z * (2.0 * w - 3.0)))
    } else {
        pre * z * (1.0 - w) * (3.0 * w - 3.0 * z + (w - 1.0) * m2 * (z + 2.0 * w * (z - 1.0)))
    }
}

fn g22(mu: f64, z: f64, w: f64, z_above: bool) -> f64 {
    let m2 = mu * mu;
    let h = |z: f64, w: f64, step: bool| {
        if !step {
            return 0.0;
        }
        (1.0 - z) * w / (6.0 * (3.0 + m2))
            * (9.0
                + 3.0 * m2 * (1.0 + z - 2.0 * z * z + 3.0 * z * w - 2.0 * w * w)
                + 2.0 * m2 * m2 * w * (z - 1.0) * (w - 3.0 * z + 2.0 * z * w))
    };
    h(z, w, z_above) + h(w, z, !z_above)
}

/// G^{αβ}(z, z′) with step functions in the retarded convention: at z = z′
/// the z > z′ branch is used.
pub fn green_matrix(z: f64, zp: f64, mu: f64, length: f64) -> Result<GreenEval> {
    if !(length > 0.0) {
        return Err(domain("green_matrix", length, "length > 0"));
    }
    if !(0.0..=length).contains(&z) {
        return Err(domain("green_matrix", z, "0 <= z <= L"));
    }
    if !(0.0..=length).contains(&zp) {
        return Err(domain("green_matrix", zp, "0 <= z' <= L"));
    }
    let u = z / length;
    let w = zp / length;
    let above = u >= w;
    Ok(GreenEval {
        g11: g11(mu, u, w, above),
        g12: g12(mu, u, w, above),
        g21: g12(mu, w, u, w > u),
        g22: g22(mu, u, w, above),
    })
}

/// Outcome of applying the discretized K̂ to the columns of the Green matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDeltaReport {
    /// sup |K̂G| away from z′ (should vanish).
    pub offdiag_residual: f64,
    /// max over (α,β) of |∫ dz (K̂G)^{αβ} f − δ_{αβ} f(z′)/L|.
    pub delta_error: f64,
}

/// Discrete check of K̂G = δ(z − z′)·1 on a uniform grid of `n_grid` cells.
pub fn green_delta_check<F: Fn(f64) -> f64>(
    mu: f64,
    length: f64,
    zp: f64,
    n_grid: usize,
    test_fn: F,
) -> Result<GreenDeltaReport> {
    if n_grid < 8 {
        return Err(Error::InvalidParameter(format!("n_grid must be >= 8, got {n_grid}")));
    }
    let h = length / n_grid as f64;
    let jw = (zp / h).round() as usize;
    let m = mu / length;
    let g = |z: f64, a: usize, b: usize| -> Result<f64> {
        let e = green_matrix(z.clamp(0.0, length), zp, mu, length)?;
        Ok(match (a, b) {
            (1, 1) => e.g11,
            (1, 2) => e.g12,
            (2, 1) => e.g21,
            _ => e.g22,
        })
    };
    let mut offdiag: f64 = 0.0;
    let mut delta_err: f64 = 0.0;
    for b in 1..=2 {
        let mut integral = [0.0; 2];
        for i in 1..n_grid {
            let z = i as f64 * h;
            let d2 = |a| -> Result<f64> { Ok((g(z + h, a, b)? - 2.0 * g(z, a, b)? + g(z - h, a, b)?) / (h * h)) };
            let d1 = |a| -> Result<f64> { Ok((g(z + h, a, b)? - g(z - h, a, b)?) / (2.0 * h)) };
            let k1 = 2.0 * (-d2(1)? + 4.0 * m * m * g(z, 1, b)? - 2.0 * m * d1(2)?);
            let k2 = 2.0 * (2.0 * m * d1(1)? - d2(2)?);
            if i != jw {
                offdiag = offdiag.max(k1.abs() * length * length).max(k2.abs() * length * length);
            }
            let f = test_fn(z);
            integral[0] += h * k1 * f;
            integral[1] += h * k2 * f;
        }
        let target = test_fn(zp) / length;
        for (a, v) in integral.iter().enumerate() {
            let want = if a + 1 == b { target } else { 0.0 };
            delta_err = delta_err.max((v - want).abs());
        }
    }
    Ok(GreenDeltaReport {
        offdiag_residual: offdiag,
        delta_error: delta_err,
    })
}

/// Pre-exponential factor I_QC through first order in 1/√SNR, 1/mW.
pub fn quantum_correction(rc: &ReducedCoords, rho: f64, params: &ChannelParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain("quantum_correction", rho, "rho > 0"));
    }
    let n = params.noise_power();
    let a = 1.0 + rc.mu * rc.mu / 3.0;
    Ok((1.0 - linear_bracket(rc, rho)) / (PI * n * a.sqrt()))
}

/// (μ/ρ)/(15a²)·(μ(15+μ²)x₀ − 2(5−μ²/3)y₀).
pub fn linear_bracket(rc: &ReducedCoords, rho: f64) -> f64 {
    let mu = rc.mu;
    let a = 1.0 + mu * mu / 3.0;
    (mu / rho) / (15.0 * a * a) * (mu * (15.0 + mu * mu) * rc.x0 - 2.0 * (5.0 - mu * mu / 3.0) * rc.y0)
}
