//! Numerical integration: adaptive Gauss–Kronrod, tanh–sinh, and Gauss rules
//! built by Golub–Welsch.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    #[allow(clippy::needless_range_loop)]
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= hlgth.abs();
    resasc *= hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    Segment {
        a,
        b,
        value: result,
        error: abserr,
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate_with_limit(f, a, b, tol, 2000)
}

pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_segments: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let mut segs = vec![qk15(&f, a, b)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                achieved: f64::INFINITY,
                requested: tol.target(0.0),
            });
        }
        if error <= tol.target(value) {
            return Ok(QuadResult {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if segs.len() >= max_segments {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                achieved: error,
                requested: tol.target(value),
            });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a.min(s.b) || mid >= s.a.max(s.b) {
            // interval cannot be split further in double precision
            let value: f64 = segs.iter().map(|s| s.value).sum::<f64>() + s.value;
            let error: f64 = segs.iter().map(|s| s.error).sum::<f64>() + s.error;
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                achieved: error,
                requested: tol.target(value),
            });
        }
        segs.push(qk15(&f, s.a, mid));
        segs.push(qk15(&f, mid, s.b));
        evaluations += 30;
    }
}

/// ∫_a^∞ f via the map x = a + (1−t)/t.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<QuadResult> {
    let g = |t: f64| {
        let x = a + (1.0 - t) / t;
        let v = f(x) / (t * t);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

/// Double-exponential quadrature on [a, b]; tolerant of integrable endpoint
/// singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    use std::f64::consts::FRAC_PI_2;
    let hw = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut evaluations = 1;
    // pair contribution at abscissa t
    let pair = |t: f64, evals: &mut usize| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let d = 2.0 * e / (1.0 + e);
        if d < 1e-280 {
            return None;
        }
        let w = hw * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let x1 = a + hw * d;
        let x2 = b - hw * d;
        let mut v = 0.0;
        if x1 > a {
            *evals += 1;
            v += w * f(x1);
        }
        if x2 < b {
            *evals += 1;
            v += w * f(x2);
        }
        if x1 <= a && x2 >= b {
            return None;
        }
        Some(if v.is_finite() { v } else { 0.0 })
    };
    let mut h = 1.0;
    let mut sum = hw * FRAC_PI_2 * f(c);
    let mut k = 1;
    while let Some(v) = pair(k as f64 * h, &mut evaluations) {
        sum += v;
        k += 1;
    }
    let mut estimate = h * sum;
    let mut prev_diff = f64::INFINITY;
    for _level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while let Some(v) = pair((2 * k - 1) as f64 * h, &mut evaluations) {
            sum += v;
            k += 1;
        }
        let next = h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        // quadratic convergence: the next refinement error is about diff²/prev
        let err = if prev_diff.is_finite() && prev_diff > 0.0 {
            (diff * diff / prev_diff).max(diff * 1e-3).max(f64::EPSILON * estimate.abs())
        } else {
            diff
        };
        if diff <= tol.target(estimate) || err <= tol.target(estimate) * 1e-2 {
            return Ok(QuadResult {
                value: estimate,
                abs_error: diff,
                evaluations,
            });
        }
        prev_diff = diff;
    }
    Err(Error::NoConvergence {
        what: "tanh-sinh quadrature",
        achieved: prev_diff,
        requested: tol.target(estimate),
    })
}

/// Nodes and weights of an n-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Legendre rule on [−1, 1].
    pub fn legendre(n: usize) -> Self {
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            })
            .collect();
        let mut rule = golub_welsch(&diag, &off, 2.0);
        polish_legendre(&mut rule);
        rule
    }

    /// Legendre rule mapped to [a, b].
    pub fn legendre_on(n: usize, a: f64, b: f64) -> Self {
        let base = Self::legendre(n);
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        GaussRule {
            nodes: base.nodes.iter().map(|x| c + h * x).collect(),
            weights: base.weights.iter().map(|w| w * h).collect(),
        }
    }

    /// Generalized Laguerre rule for the weight x^α e^{−x} on [0, ∞).
    pub fn laguerre(n: usize, alpha: f64) -> Self {
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                (k * (k + alpha)).sqrt()
            })
            .collect();
        let mu0 = crate::special_fn::ln_gamma(alpha + 1.0).exp();
        golub_welsch(&diag, &off, mu0)
    }

    /// Hermite rule for the weight e^{−x²} on ℝ.
    pub fn hermite(n: usize) -> Self {
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n).map(|k| (0.5 * k as f64).sqrt()).collect();
        let mut rule = golub_welsch(&diag, &off, std::f64::consts::PI.sqrt());
        // symmetrize: the exact rule is even
        let m = rule.nodes.len();
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
            let w = 0.5 * (rule.weights[i] + rule.weights[j]);
            rule.nodes[i] = -x;
            rule.nodes[j] = x;
            rule.weights[i] = w;
            rule.weights[j] = w;
        }
        if m % 2 == 1 {
            rule.nodes[m / 2] = 0.0;
        }
        rule
    }
}

fn polish_legendre(rule: &mut GaussRule) {
    let n = rule.nodes.len();
    for (x, w) in rule.nodes.iter_mut().zip(rule.weights.iter_mut()) {
        let mut dp = 0.0;
        for _ in 0..3 {
            let (mut p0, mut p1) = (1.0, *x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * *x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (*x * pn - pm) / (*x * *x - 1.0);
            *x -= pn / dp;
        }
        *w = 2.0 / ((1.0 - *x * *x) * dp * dp);
    }
}

/// Eigen-decomposition of the Jacobi matrix, tracking only the first row of
/// the eigenvector matrix.
fn golub_welsch(diag: &[f64], off: &[f64], mu0: f64) -> GaussRule {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    GaussRule {
        nodes: idx.iter().map(|&i| d[i]).collect(),
        weights: idx.iter().map(|&i| mu0 * z[i] * z[i]).collect(),
    }
}
