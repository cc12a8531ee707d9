//! Command implementations; each returns a table or a validation report.

use rayon::prelude::*;

use kerrcap::channel::{snr, ChannelParams, ComplexAmplitude, ReducedCoords};
use kerrcap::conditional::{conditional_pdf_eval, conditional_pdf_linear, normalization, PdfOrder};
use kerrcap::distributions::{
    beta_output_pdf, gamma_tilde, optimal_large_power, optimal_small_power, output_pdf_integral, radial_moments,
    solve_optimal, BetaInput, RadialDensity,
};
use kerrcap::information::{
    cond_entropy_general, entropy_output_general, mi_beta, mi_beta_asymptote, mi_for_optimal, mi_optimal,
    mi_optimal_small_power, prior_bound_baseline, shannon_capacity,
};
use kerrcap::monte_carlo::{
    chi_square, conditional_cell_probabilities, empirical_conditional, empirical_output, radial_cell_probabilities,
    total_variation, EmpiricalDensity, InputSampler, McConfig,
};

use crate::config::{InputKind, RunConfig};
use crate::table::{Cell, Check, Table};

/// A command's result; `ok` is false when any row or check failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table { table: Table, ok: bool },
    Report(Vec<Check>),
}

impl Output {
    pub fn ok(&self) -> bool {
        match self {
            Output::Table { ok, .. } => *ok,
            Output::Report(checks) => checks.iter().all(|c| c.passed),
        }
    }
}

/// Rejected arguments, as opposed to failed computations.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

fn value_or_error(v: kerrcap::Result<f64>, errors: &mut Vec<String>, what: &str) -> f64 {
    v.unwrap_or_else(|e| {
        errors.push(format!("{what}: {e}"));
        f64::NAN
    })
}

pub fn mi_sweep(cfg: &RunConfig) -> Output {
    let p = cfg.params;
    let scale = cfg.info_scale();
    let has = |k| cfg.inputs.contains(&k);
    let mut columns = vec!["P_mW", "SNR"];
    if has(InputKind::Opt) {
        columns.push("I_opt");
    }
    if has(InputKind::Beta2) {
        columns.push("I_beta2");
    }
    if has(InputKind::Beta1) {
        columns.extend(["I_beta1", "I_beta1_asymptote"]);
    }
    columns.extend(["shannon", "prior_bound", "status"]);

    // both limits diverge like −log γ as the nonlinearity vanishes
    let (asym, baseline) = if p.gamma == 0.0 {
        (Ok(f64::INFINITY), Ok(f64::INFINITY))
    } else {
        (mi_beta_asymptote(1.0, &p), prior_bound_baseline(&p))
    };

    let rows: Vec<(Vec<Cell>, bool)> = cfg
        .grid
        .powers()
        .into_par_iter()
        .map(|w| {
            let mut errors = Vec::new();
            let mut row: Vec<Cell> = vec![w.into(), value_or_error(snr(w, &p), &mut errors, "SNR").into()];
            if has(InputKind::Opt) {
                let v = value_or_error(mi_optimal(w, &p).map(|m| m.mi_nats), &mut errors, "I_opt");
                row.push((v * scale).into());
            }
            if has(InputKind::Beta2) {
                let v = value_or_error(mi_beta(2.0, w, &p).map(|m| m.mi_nats), &mut errors, "I_beta2");
                row.push((v * scale).into());
            }
            if has(InputKind::Beta1) {
                let v = value_or_error(mi_beta(1.0, w, &p).map(|m| m.mi_nats), &mut errors, "I_beta1");
                row.push((v * scale).into());
                let a = value_or_error(asym.clone(), &mut errors, "I_beta1_asymptote");
                row.push((a * scale).into());
            }
            let s = value_or_error(shannon_capacity(w, &p), &mut errors, "shannon");
            row.push((s * scale).into());
            let b = value_or_error(baseline.clone(), &mut errors, "prior_bound");
            row.push((b * scale).into());
            let ok = errors.is_empty();
            row.push(if ok { "ok".to_string() } else { errors.join("; ") }.into());
            (row, ok)
        })
        .collect();

    let mut table = Table::new(columns);
    table.meta("units", cfg.info_unit());
    table.meta("gamma_per_mW_km", p.gamma);
    table.meta("length_km", p.length);
    table.meta("q_noise_mW_per_km", p.noise_density);
    let ok = rows.iter().all(|(_, ok)| *ok);
    for (row, _) in rows {
        table.push(row);
    }
    Output::Table { table, ok }
}

pub const MOMENT_TOL: f64 = 1e-8;

pub fn optimal_input(cfg: &RunConfig, power: f64, points: usize) -> Result<Output, UsageError> {
    if !(power > 0.0 && power.is_finite()) {
        return Err(UsageError(format!("--power-mw must be > 0, got {power}")));
    }
    if points < 2 {
        return Err(UsageError(format!("--density-points must be >= 2, got {points}")));
    }
    let p = cfg.params;
    let d = match solve_optimal(power, &p) {
        Ok(d) => d,
        Err(e) => {
            return Ok(Output::Report(vec![Check::failed("optimal-input/solve", &e.to_string())]));
        }
    };
    let mut table = Table::new(["rho_sqrt_mW", "density_per_mW"]);
    let rho_max = 4.0 * power.sqrt();
    for i in 0..points {
        let rho = rho_max * i as f64 / (points - 1) as f64;
        table.push(vec![rho.into(), d.density(rho).into()]);
    }
    let (mass, pm) = radial_moments(&d).unwrap_or((f64::NAN, f64::NAN));
    let mass_ok = (mass - 1.0).abs() <= MOMENT_TOL;
    let power_ok = (pm / power - 1.0).abs() <= MOMENT_TOL;
    let mi = mi_for_optimal(&d, &p).map(|m| m.mi_nats).unwrap_or(f64::NAN);
    let (ls, ns) = optimal_small_power(power, &p);
    let (ll, nl) = optimal_large_power(power, &p);
    let scale = cfg.info_scale();
    table.meta("power_mW", power);
    table.meta("gamma_tilde", gamma_tilde(power, &p));
    table.meta("alpha", d.alpha);
    table.meta("lambda0_per_mW", d.lambda0);
    table.meta("n0_per_mW", d.n0);
    table.meta("gaussian_fallback", d.gaussian_fallback);
    table.meta("mass", mass);
    table.meta("power_moment_mW", pm);
    table.meta("mass_check", mass_ok);
    table.meta("power_check", power_ok);
    table.meta("units", cfg.info_unit());
    table.meta("I_opt", mi * scale);
    table.meta("I_small_power", mi_optimal_small_power(power, &p) * scale);
    table.meta("I_small_power_beyond_accuracy", "unity inside log(1+SNR) exceeds the expansion accuracy");
    table.meta("lambda0_small_power", ls);
    table.meta("n0_small_power", ns);
    table.meta("lambda0_large_power", ll);
    table.meta("n0_large_power", nl);
    Ok(Output::Table {
        table,
        ok: mass_ok && power_ok && mi.is_finite(),
    })
}

pub fn pdf_grid(cfg: &RunConfig, x: ComplexAmplitude, half_width: f64, points: usize) -> Result<Output, UsageError> {
    if x.magnitude() == 0.0 {
        return Err(UsageError("input amplitude must be nonzero".into()));
    }
    if !(half_width > 0.0) || points < 2 {
        return Err(UsageError("--half-width must be > 0 and --points >= 2".into()));
    }
    let p = cfg.params;
    let sigma = p.noise_power().sqrt();
    let mu = p.gamma_l() * x.power();
    let rho = x.magnitude();
    let phase = x.phase();
    let mut table = Table::new([
        "y_re", "y_im", "x0", "y0", "p_leading", "p_nlo", "p_nlo_raw", "clamped", "p_linear",
    ]);
    let mut ok = true;
    let step = 2.0 * half_width * sigma / (points - 1) as f64;
    for i in 0..points {
        for j in 0..points {
            let x0 = -half_width * sigma + i as f64 * step;
            let y0 = -half_width * sigma + j as f64 * step;
            let y = ReducedCoords { mu, x0, y0 }.reconstruct(rho, phase);
            let lead = conditional_pdf_eval(x, y, &p, PdfOrder::Leading);
            let nlo = conditional_pdf_eval(x, y, &p, PdfOrder::Nlo);
            let (lead, nlo) = match (lead, nlo) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    ok = false;
                    continue;
                }
            };
            table.push(vec![
                y.re.into(),
                y.im.into(),
                x0.into(),
                y0.into(),
                lead.density.into(),
                nlo.density.into(),
                nlo.raw.into(),
                nlo.clamped.into(),
                conditional_pdf_linear(x, y, &p).into(),
            ]);
        }
    }
    table.meta("mu", mu);
    table.meta("below_validity", x.power() < kerrcap::channel::WEAK_SIGNAL_RATIO * p.noise_power());
    Ok(Output::Table { table, ok })
}

pub const SUITES: [&str; 3] = ["normalization", "moments", "entropy"];

pub fn validate(cfg: &RunConfig, suite: &str) -> Result<Output, UsageError> {
    let suites: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(UsageError(format!(
                "unknown suite '{s}', expected one of: all, {}",
                SUITES.join(", ")
            )))
        }
    };
    let mut checks = Vec::new();
    for s in suites {
        match s {
            "normalization" => normalization_suite(&cfg.params, &mut checks),
            "moments" => moments_suite(&cfg.params, &mut checks),
            _ => entropy_suite(&cfg.params, &mut checks),
        }
    }
    Ok(Output::Report(checks))
}

fn record(checks: &mut Vec<Check>, name: String, v: kerrcap::Result<f64>, limit: f64) {
    checks.push(match v {
        Ok(m) => Check::at_most(name, m, limit),
        Err(e) => Check::failed(name, &e.to_string()),
    });
}

fn normalization_suite(base: &ChannelParams, checks: &mut Vec<Check>) {
    let n = base.noise_power();
    for s in [1e2, 1e3, 1e4] {
        let x = ComplexAmplitude::from_polar((s * n).sqrt(), 0.4);
        for mu in [0.0, 0.5, 1.0, 2.0] {
            let p = base.with_gamma(mu / (base.length * x.power()));
            for (order, tag) in [(PdfOrder::Leading, "leading"), (PdfOrder::Nlo, "nlo")] {
                let name = format!("normalization/snr={s:e}/mu={mu}/{tag}");
                record(checks, name, normalization(x, &p, order).map(|m| (m - 1.0).abs()), 1e-6);
            }
        }
    }
}

fn moment_errors<D: RadialDensity + ?Sized>(d: &D) -> kerrcap::Result<f64> {
    let (m0, m2) = radial_moments(d)?;
    Ok((m0 - 1.0).abs().max((m2 / d.power() - 1.0).abs()))
}

fn moments_suite(p: &ChannelParams, checks: &mut Vec<Check>) {
    for w in [1e-2, 1.0, 100.0] {
        for beta in [1.0, 2.0] {
            let name = format!("moments/beta{beta}/P={w:e}");
            record(checks, name, BetaInput::new(beta, w).and_then(|d| moment_errors(&d)), MOMENT_TOL);
        }
        let name = format!("moments/optimal/P={w:e}");
        record(checks, name, solve_optimal(w, p).and_then(|d| moment_errors(&d)), MOMENT_TOL);
    }
}

fn general_route<D: RadialDensity + ?Sized>(d: &D, p: &ChannelParams) -> kerrcap::Result<f64> {
    Ok(entropy_output_general(d)? - cond_entropy_general(d, p)?)
}

fn entropy_suite(p: &ChannelParams, checks: &mut Vec<Check>) {
    for w in [1e-2, 1.0, 100.0] {
        let opt = solve_optimal(w, p).and_then(|d| Ok((mi_for_optimal(&d, p)?.mi_nats - general_route(&d, p)?).abs()));
        record(checks, format!("entropy/optimal/P={w:e}"), opt, 1e-7);
        for beta in [1.0, 2.0] {
            let v = BetaInput::new(beta, w)
                .and_then(|d| Ok((mi_beta(beta, w, p)?.mi_nats - general_route(&d, p)?).abs()));
            record(checks, format!("entropy/beta{beta}/P={w:e}"), v, 1e-7);
        }
    }
}

pub const CASES: [&str; 5] = ["linear", "conditional", "output-beta1", "output-beta2", "output-optimal"];
pub const MC_DEFAULT_TRAJ: usize = 100_000;
pub const MC_DEFAULT_STEPS: usize = 1000;

fn mc_config(cfg: &RunConfig, bins: (usize, usize)) -> McConfig {
    McConfig {
        n_steps: cfg.n_steps.unwrap_or(MC_DEFAULT_STEPS),
        n_traj: cfg.n_traj.unwrap_or(MC_DEFAULT_TRAJ),
        seed: cfg.seed,
        bins,
        bin_range: 8.0,
    }
}

fn coverage(name: &str, emp: &EmpiricalDensity) -> Check {
    Check::at_most(format!("{name}/outside-fraction"), emp.outside_fraction(), 0.01)
}

pub fn mc_check(cfg: &RunConfig, case: &str, power: f64) -> Result<Output, UsageError> {
    if !CASES.contains(&case) {
        return Err(UsageError(format!("unknown case '{case}', expected one of: {}", CASES.join(", "))));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(UsageError(format!("--power-mw must be > 0, got {power}")));
    }
    let mut checks = Vec::new();
    let result = match case {
        "linear" | "conditional" => conditional_case(cfg, case, &mut checks),
        _ => output_case(cfg, case, power, &mut checks),
    };
    if let Err(e) = result {
        if matches!(e, kerrcap::Error::InvalidParameter(_)) {
            return Err(UsageError(e.to_string()));
        }
        checks.push(Check::failed(case, &e.to_string()));
    }
    Ok(Output::Report(checks))
}

fn conditional_case(cfg: &RunConfig, case: &str, checks: &mut Vec<Check>) -> kerrcap::Result<()> {
    let x = ComplexAmplitude::new(1.0, 0.0);
    let p = if case == "linear" {
        cfg.params.with_gamma(0.0)
    } else {
        cfg.params
    };
    let mc = mc_config(cfg, (32, 32));
    let emp = empirical_conditional(x, &p, &mc)?;
    let lead = conditional_cell_probabilities(x, &p, PdfOrder::Leading, &emp.grid)?;
    checks.push(Check::at_most(format!("{case}/tv-leading"), total_variation(&emp, &lead), 0.02));
    let target = if case == "linear" {
        lead
    } else {
        conditional_cell_probabilities(x, &p, PdfOrder::Nlo, &emp.grid)?
    };
    let tag = if case == "linear" { "leading" } else { "nlo" };
    checks.push(Check::at_least(
        format!("{case}/chi2-p-{tag}"),
        chi_square(&emp, &target)?.p_value,
        0.01,
    ));
    checks.push(coverage(case, &emp));
    Ok(())
}

fn output_case(cfg: &RunConfig, case: &str, power: f64, checks: &mut Vec<Check>) -> kerrcap::Result<()> {
    let p = cfg.params;
    let mc = mc_config(cfg, (64, 1));
    let (emp, probs) = match case {
        "output-optimal" => {
            let d = solve_optimal(power, &p)?;
            let emp = empirical_output(&d, &p, &mc)?;
            let probs = radial_cell_probabilities(&emp.grid, |r| output_pdf_integral(&d, &p, r).unwrap_or(f64::NAN));
            (emp, probs)
        }
        _ => {
            let beta = if case == "output-beta1" { 1.0 } else { 2.0 };
            let d = BetaInput::new(beta, power)?;
            let emp = empirical_output(&d as &dyn InputSampler, &p, &mc)?;
            let probs = radial_cell_probabilities(&emp.grid, |r| beta_output_pdf(&d, &p, r).unwrap_or(f64::NAN));
            (emp, probs)
        }
    };
    if probs.iter().any(|v| !v.is_finite()) {
        return Err(kerrcap::Error::NoConvergence {
            what: "output density cell probabilities",
            achieved: f64::NAN,
            requested: 0.0,
        });
    }
    checks.push(Check::at_most(format!("{case}/tv"), total_variation(&emp, &probs), 0.02));
    checks.push(Check::at_least(format!("{case}/chi2-p"), chi_square(&emp, &probs)?.p_value, 0.01));
    checks.push(coverage(case, &emp));
    Ok(())
}
