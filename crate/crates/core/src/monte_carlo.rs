//! Direct simulation of ∂_zψ = iγ|ψ|²ψ + η and histogram comparisons.
//!
//! Every trajectory owns a ChaCha8 stream selected by its index, so results do
//! not depend on how trajectories are spread over rayon workers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::channel::{ChannelParams, ComplexAmplitude, ReducedCoords};
use crate::conditional::{leading_density, nlo_bracket, PdfOrder};
use crate::distributions::{BetaInput, OptimalInput};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

pub const MIN_STEPS: usize = 100;
pub const MIN_TRAJ: usize = 10_000;
/// Fraction of samples allowed outside the histogram before it is flagged.
pub const UNDERCOVERAGE_LIMIT: f64 = 0.01;
/// Radial histograms extend to this many √P beyond the origin.
pub const RADIAL_RANGE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
    /// (nx, ny); radial histograms use only nx.
    pub bins: (usize, usize),
    /// Histogram half-width in units of √(QL).
    pub bin_range: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_steps: 2000,
            n_traj: 100_000,
            seed: 0x6b65_7272,
            bins: (64, 64),
            bin_range: 8.0,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps < MIN_STEPS {
            return Err(Error::InvalidParameter(format!("n_steps must be >= {MIN_STEPS}, got {}", self.n_steps)));
        }
        if self.n_traj < MIN_TRAJ {
            return Err(Error::InvalidParameter(format!("n_traj must be >= {MIN_TRAJ}, got {}", self.n_traj)));
        }
        if self.bins.0 == 0 || self.bins.1 == 0 {
            return Err(Error::InvalidParameter("histogram needs at least one bin per axis".into()));
        }
        if !(self.bin_range > 0.0) || !self.bin_range.is_finite() {
            return Err(Error::InvalidParameter(format!("bin_range must be > 0, got {}", self.bin_range)));
        }
        Ok(())
    }
}

fn base_key(seed: u64) -> <ChaCha8Rng as SeedableRng>::Seed {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

fn stream_rng(key: <ChaCha8Rng as SeedableRng>::Seed, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream_id);
    rng
}

/// Split-step propagation: exact Kerr rotation, then a complex Gaussian kick
/// of variance QΔz/2 per component.
fn split_step(x_in: Complex64, params: &ChannelParams, n_steps: usize, rng: &mut ChaCha8Rng) -> Complex64 {
    let dz = params.length / n_steps as f64;
    let sigma = (0.5 * params.noise_density * dz).sqrt();
    let gdz = params.gamma * dz;
    let mut psi = x_in;
    for _ in 0..n_steps {
        let (s, c) = (gdz * psi.norm_sqr()).sin_cos();
        psi = Complex64::new(psi.re * c - psi.im * s, psi.re * s + psi.im * c);
        if sigma > 0.0 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            psi.re += sigma * a;
            psi.im += sigma * b;
        }
    }
    psi
}

/// Output of one trajectory; `stream_id` selects the random substream.
pub fn propagate(x_in: ComplexAmplitude, params: &ChannelParams, cfg: &McConfig, stream_id: u64) -> ComplexAmplitude {
    let mut rng = stream_rng(base_key(cfg.seed), stream_id);
    split_step(x_in.to_complex(), params, cfg.n_steps.max(1), &mut rng).into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    /// Square (x₀, y₀) grid centred on the origin, cells indexed ix·ny + iy.
    Cartesian { nx: usize, ny: usize, half_width: f64 },
    /// |Y| ∈ [0, r_max).
    Radial { n: usize, r_max: f64 },
}

impl Grid {
    pub fn len(&self) -> usize {
        match *self {
            Grid::Cartesian { nx, ny, .. } => nx * ny,
            Grid::Radial { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// d²Y area of a Cartesian cell, or the width of a radial bin.
    pub fn cell_measure(&self) -> f64 {
        match *self {
            Grid::Cartesian { nx, ny, half_width } => (2.0 * half_width / nx as f64) * (2.0 * half_width / ny as f64),
            Grid::Radial { n, r_max } => r_max / n as f64,
        }
    }

    /// ((a_lo, a_hi), (b_lo, b_hi)); the second pair is (0, 0) for radial grids.
    pub fn cell_bounds(&self, i: usize) -> ((f64, f64), (f64, f64)) {
        match *self {
            Grid::Cartesian { nx, ny, half_width } => {
                let (wx, wy) = (2.0 * half_width / nx as f64, 2.0 * half_width / ny as f64);
                let (ix, iy) = (i / ny, i % ny);
                let x = -half_width + ix as f64 * wx;
                let y = -half_width + iy as f64 * wy;
                ((x, x + wx), (y, y + wy))
            }
            Grid::Radial { n, r_max } => {
                let w = r_max / n as f64;
                ((i as f64 * w, (i + 1) as f64 * w), (0.0, 0.0))
            }
        }
    }

    fn index(&self, a: f64, b: f64) -> Option<usize> {
        fn bin(v: f64, lo: f64, width: f64, n: usize) -> Option<usize> {
            let k = ((v - lo) / width).floor();
            (k >= 0.0 && k < n as f64).then_some(k as usize)
        }
        match *self {
            Grid::Cartesian { nx, ny, half_width } => {
                let ix = bin(a, -half_width, 2.0 * half_width / nx as f64, nx)?;
                let iy = bin(b, -half_width, 2.0 * half_width / ny as f64, ny)?;
                Some(ix * ny + iy)
            }
            Grid::Radial { n, r_max } => bin(a, 0.0, r_max / n as f64, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDensity {
    pub grid: Grid,
    pub counts: Vec<u64>,
    /// Normalized over the in-range samples.
    pub density: Vec<f64>,
    pub n_total: u64,
    pub outside: u64,
}

impl EmpiricalDensity {
    fn from_counts(grid: Grid, counts: Vec<u64>, n_total: u64) -> Self {
        let inside: u64 = counts.iter().sum();
        let norm = if inside == 0 { 0.0 } else { 1.0 / (inside as f64 * grid.cell_measure()) };
        let density = counts.iter().map(|&c| c as f64 * norm).collect();
        EmpiricalDensity {
            grid,
            counts,
            density,
            n_total,
            outside: n_total - inside,
        }
    }

    pub fn outside_fraction(&self) -> f64 {
        self.outside as f64 / self.n_total as f64
    }

    pub fn undercovered(&self) -> bool {
        self.outside_fraction() > UNDERCOVERAGE_LIMIT
    }
}

const BLOCK: u64 = 4096;

fn histogram<F>(grid: Grid, n_traj: u64, seed: u64, sample: F) -> EmpiricalDensity
where
    F: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    let key = base_key(seed);
    let n_blocks = n_traj.div_ceil(BLOCK);
    let counts = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = vec![0u64; grid.len()];
            for t in b * BLOCK..((b + 1) * BLOCK).min(n_traj) {
                let mut rng = stream_rng(key, t);
                let (a, c) = sample(&mut rng);
                if let Some(i) = grid.index(a, c) {
                    local[i] += 1;
                }
            }
            local
        })
        .reduce(
            || vec![0u64; grid.len()],
            |mut acc, v| {
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
                acc
            },
        );
    EmpiricalDensity::from_counts(grid, counts, n_traj)
}

/// Histogram of the reduced coordinates (x₀, y₀) of outputs for a fixed input.
pub fn empirical_conditional(x_in: ComplexAmplitude, params: &ChannelParams, cfg: &McConfig) -> Result<EmpiricalDensity> {
    cfg.validate()?;
    params.validate()?;
    if cfg.bin_range < 6.0 {
        return Err(Error::InvalidParameter(format!(
            "bin_range must cover at least 6 noise widths, got {}",
            cfg.bin_range
        )));
    }
    let n = params.noise_power();
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("conditional histogram needs Q > 0".into()));
    }
    let rho = x_in.magnitude();
    if rho == 0.0 {
        return Err(Error::DegenerateInput("input amplitude is zero, its phase is undefined"));
    }
    let mu = params.gamma_l() * x_in.power();
    let frame = (x_in.to_complex() / rho).conj() * Complex64::from_polar(1.0, -mu);
    let x0 = x_in.to_complex();
    let grid = Grid::Cartesian {
        nx: cfg.bins.0,
        ny: cfg.bins.1,
        half_width: cfg.bin_range * n.sqrt(),
    };
    let steps = cfg.n_steps;
    Ok(histogram(grid, cfg.n_traj as u64, cfg.seed, |rng| {
        let w = split_step(x0, params, steps, rng) * frame - rho;
        (w.re, w.im)
    }))
}

/// Draws channel inputs for the output-density simulation.
pub trait InputSampler: Sync {
    fn power(&self) -> f64;
    fn sample_input(&self, rng: &mut ChaCha8Rng) -> ComplexAmplitude;
}

fn uniform_phase(rng: &mut ChaCha8Rng, rho: f64) -> ComplexAmplitude {
    ComplexAmplitude::from_polar(rho, 2.0 * PI * rng.random::<f64>())
}

impl InputSampler for BetaInput {
    fn power(&self) -> f64 {
        self.power
    }

    /// ρ² is Gamma(β/2, 2P/β) distributed.
    fn sample_input(&self, rng: &mut ChaCha8Rng) -> ComplexAmplitude {
        let tau = if self.beta == 2.0 {
            let e: f64 = rng.sample(Exp1);
            self.power * e
        } else if self.beta == 1.0 {
            let z: f64 = rng.sample(StandardNormal);
            self.power * z * z
        } else {
            Gamma::new(0.5 * self.beta, 2.0 * self.power / self.beta)
                .expect("shape and scale validated by BetaInput::new")
                .sample(rng)
        };
        uniform_phase(rng, tau.sqrt())
    }
}

impl InputSampler for OptimalInput {
    fn power(&self) -> f64 {
        self.power
    }

    /// Rejection under the envelope e^{−λ₀ρ²}.
    fn sample_input(&self, rng: &mut ChaCha8Rng) -> ComplexAmplitude {
        loop {
            let e: f64 = rng.sample(Exp1);
            let tau = e / self.lambda0;
            let g = self.gamma_l * tau;
            let u: f64 = rng.random();
            if u * u * (1.0 + g * g / 3.0) <= 1.0 {
                return uniform_phase(rng, tau.sqrt());
            }
        }
    }
}

/// Radial histogram of |Y| for inputs drawn from `sampler`.
pub fn empirical_output<S: InputSampler + ?Sized>(sampler: &S, params: &ChannelParams, cfg: &McConfig) -> Result<EmpiricalDensity> {
    cfg.validate()?;
    params.validate()?;
    let grid = Grid::Radial {
        n: cfg.bins.0,
        r_max: RADIAL_RANGE * sampler.power().sqrt() + cfg.bin_range * params.noise_power().sqrt(),
    };
    let steps = cfg.n_steps;
    Ok(histogram(grid, cfg.n_traj as u64, cfg.seed, |rng| {
        let x = sampler.sample_input(rng).to_complex();
        (split_step(x, params, steps, rng).norm(), 0.0)
    }))
}

/// Probability of each cell under `f`, a density with respect to the grid
/// measure (d²Y for Cartesian grids, d|Y| for radial ones).
pub fn cell_probabilities<F: Fn(f64, f64) -> f64 + Sync>(grid: &Grid, f: F) -> Vec<f64> {
    let rule = GaussRule::legendre(8);
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let ((a0, a1), (b0, b1)) = grid.cell_bounds(i);
            let (ha, ca) = (0.5 * (a1 - a0), 0.5 * (a1 + a0));
            match grid {
                Grid::Cartesian { .. } => {
                    let (hb, cb) = (0.5 * (b1 - b0), 0.5 * (b1 + b0));
                    let mut s = 0.0;
                    for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
                        for (&v, &wv) in rule.nodes.iter().zip(&rule.weights) {
                            s += wu * wv * f(ca + ha * u, cb + hb * v);
                        }
                    }
                    s * ha * hb
                }
                Grid::Radial { .. } => ha * rule.sum(|u| f(ca + ha * u, 0.0)),
            }
        })
        .collect()
}

/// Analytic cell probabilities of P[Y|X] in reduced coordinates; negative NLO
/// tail values are clamped to zero.
pub fn conditional_cell_probabilities(
    x_in: ComplexAmplitude,
    params: &ChannelParams,
    order: PdfOrder,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let rho = x_in.magnitude();
    if rho == 0.0 {
        return Err(Error::DegenerateInput("input amplitude is zero, its phase is undefined"));
    }
    let mu = params.gamma_l() * x_in.power();
    Ok(cell_probabilities(grid, |x0, y0| {
        let rc = ReducedCoords { mu, x0, y0 };
        let lead = leading_density(&rc, params);
        match order {
            PdfOrder::Leading => lead,
            PdfOrder::Nlo => (lead * nlo_bracket(&rc, rho, params)).max(0.0),
        }
    }))
}

/// Cell probabilities of |Y| for a rotationally invariant output density P_Y.
pub fn radial_cell_probabilities<F: Fn(f64) -> f64 + Sync>(grid: &Grid, p_y: F) -> Vec<f64> {
    cell_probabilities(grid, |r, _| 2.0 * PI * r * p_y(r))
}

/// ½ Σ |p̂ − p| including the out-of-range remainder.
pub fn total_variation(emp: &EmpiricalDensity, probs: &[f64]) -> f64 {
    let n = emp.n_total as f64;
    let inside: f64 = emp
        .counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| (c as f64 / n - p).abs())
        .sum();
    let p_out = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    0.5 * (inside + (emp.outside_fraction() - p_out).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Cells kept after pooling.
    pub cells: usize,
}

pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson χ² test; cells with fewer than 5 expected counts are pooled with
/// the out-of-range remainder.
pub fn chi_square(emp: &EmpiricalDensity, probs: &[f64]) -> Result<ChiSquareReport> {
    if probs.len() != emp.counts.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} probabilities, got {}",
            emp.counts.len(),
            probs.len()
        )));
    }
    let n = emp.n_total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pooled = (emp.outside as f64, n * (1.0 - probs.iter().sum::<f64>()).max(0.0));
    for (&c, &p) in emp.counts.iter().zip(probs) {
        let e = n * p;
        if e >= MIN_EXPECTED {
            cells.push((c as f64, e));
        } else {
            pooled.0 += c as f64;
            pooled.1 += e;
        }
    }
    if pooled.1 >= MIN_EXPECTED {
        cells.push(pooled);
    } else if let Some(smallest) = cells.iter_mut().min_by(|a, b| a.1.total_cmp(&b.1)) {
        smallest.0 += pooled.0;
        smallest.1 += pooled.1;
    }
    if cells.len() < 2 {
        return Err(Error::InvalidParameter("too few populated cells for a chi-square test".into()));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(ChiSquareReport {
        statistic,
        dof,
        p_value: dist.sf(statistic),
        cells: cells.len(),
    })
}
