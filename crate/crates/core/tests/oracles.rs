//! Frozen reference values from 40-digit evaluations of the defining series
//! and integrals, and exact rational arithmetic for the fluctuation matrix.

#![allow(clippy::excessive_precision)]

use num_bigint::BigInt;
use num_rational::BigRational;

use kerrcap::channel::ChannelParams;
use kerrcap::distributions::{solve_optimal, BetaInput};
use kerrcap::information::{mi_beta, mi_optimal};
use kerrcap::path_integral::{det_m, m_inverse_entry};
use kerrcap::special_fn::*;

fn assert_rel(got: f64, want: f64, tol: f64, what: &str) {
    let err = ((got - want) / want).abs();
    assert!(err <= tol, "{what}: got {got:e}, want {want:e}, rel err {err:e}");
}

#[test]
fn bessel_and_struve() {
    let table = [
        (0.5, 0.9384698072408129, -0.44451873350670656, 0.30955591458375472, 1.0634833707413235),
        (3.0, -0.26005195490193344, 0.37685001001279038, 0.5743061488143984, 4.8807925858650241),
        (12.5, 0.1468840547004211, -0.17121430684466929, -0.1205942542313132, 30596.335155785154),
    ];
    for (x, j0, y0, h0, i0) in table {
        assert_rel(bessel_j0(x).unwrap(), j0, 1e-13, "J0");
        assert_rel(bessel_y0(x).unwrap(), y0, 1e-13, "Y0");
        assert_rel(struve_h0(x).unwrap(), h0, 1e-12, "H0");
        assert_rel(bessel_i0(x).unwrap(), i0, 1e-14, "I0");
    }
    assert_rel(bessel_i0_scaled(200.0).unwrap(), 0.028227159949111916, 1e-14, "I0e");
    assert_rel(log_bessel_i0(200.0).unwrap(), 200.0 + 0.028227159949111916f64.ln(), 1e-15, "log I0");
}

#[test]
fn gamma_family() {
    assert_rel(digamma(0.5).unwrap(), -1.9635100260214235, 1e-14, "psi(1/2)");
    assert_rel(digamma(7.25).unwrap(), 1.910453526883736, 1e-14, "psi(7.25)");
    assert_rel(gamma_fn(3.7).unwrap(), 4.170651783796604, 1e-14, "Gamma(3.7)");
    assert_rel(ln_gamma(3.7), 4.170651783796604f64.ln(), 1e-14, "lnGamma(3.7)");
}

#[test]
fn kummer_function() {
    for (a, z, want) in [(0.5, 3.0, 1.9987873677156162), (0.5, 60.0, 57.384701433171936), (1.5, 250.0, 252.88251269790779)] {
        assert_rel(log_confluent_1f1(a, z).unwrap(), want, 1e-14, "log 1F1");
        assert_rel(log_confluent_1f1_scaled(a, z).unwrap() + z, want, 1e-14, "scaled log 1F1");
    }
    assert_rel(confluent_1f1(0.5, 3.0).unwrap(), 1.9987873677156162f64.exp(), 1e-14, "1F1");
}

#[test]
fn g_function() {
    for (a, want) in [(0.01, 4.7309585639653403), (1.0, 0.75461002577097217), (20.0, 0.049877654842309114)] {
        assert_rel(g_of_alpha(a).unwrap(), want, 1e-12, "G");
    }
}

#[test]
fn optimal_input_constants() {
    let p = ChannelParams::default();
    let table = [
        (0.1, 17.209540032353988, 9.9359325703092161, 3.1731177352518705, 6.4990240177943303),
        (10.0, 0.053178956771284873, 0.030702885007124793, 0.059276491622424557, 9.7927167109930444),
        (300.0, 0.00079533248813978742, 0.00045918542612276111, 0.025336308037996968, 10.473417817560339),
    ];
    for (w, alpha, lambda0, n0, mi) in table {
        let d = solve_optimal(w, &p).unwrap();
        assert_rel(d.alpha, alpha, 1e-11, "alpha");
        assert_rel(d.lambda0, lambda0, 1e-11, "lambda0");
        assert_rel(d.n0, n0, 1e-11, "N0");
        assert_rel(mi_optimal(w, &p).unwrap().mi_nats, mi, 1e-12, "I_opt");
    }
}

#[test]
fn beta_input_information() {
    let p = ChannelParams::default();
    let table = [
        (1.0, 0.1, 6.2812931695158985),
        (1.0, 10.0, 9.687481186717944),
        (1.0, 300.0, 10.273748145388137),
        (2.0, 0.1, 6.4990195699275421),
        (2.0, 10.0, 9.700704336706685),
        (2.0, 300.0, 9.9224294140350632),
    ];
    for (beta, w, mi) in table {
        BetaInput::new(beta, w).unwrap();
        assert_rel(mi_beta(beta, w, &p).unwrap().mi_nats, mi, 1e-12, "I_beta");
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// Exact inverse of M(α) by Gauss–Jordan elimination over the rationals.
fn exact_det_and_inverse(n: usize, mu: f64) -> (BigRational, Vec<Vec<BigRational>>) {
    let m = n - 1;
    let a = rational(4.0 * mu * mu) / BigRational::from_integer(BigInt::from(n).pow(3));
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    let mut lhs: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| match i.abs_diff(j) {
                    0 => &a + &one + &one,
                    1 => &a - &one,
                    _ => a.clone(),
                })
                .collect()
        })
        .collect();
    let mut rhs: Vec<Vec<BigRational>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
    let mut det = one.clone();
    for c in 0..m {
        let pivot = lhs[c][c].clone();
        assert!(pivot != zero);
        det *= &pivot;
        for j in 0..m {
            lhs[c][j] = &lhs[c][j] / &pivot;
            rhs[c][j] = &rhs[c][j] / &pivot;
        }
        for r in 0..m {
            if r != c && lhs[r][c] != zero {
                let f = lhs[r][c].clone();
                for j in 0..m {
                    let (lv, rv) = (&lhs[c][j] * &f, &rhs[c][j] * &f);
                    lhs[r][j] -= lv;
                    rhs[r][j] -= rv;
                }
            }
        }
    }
    (det, rhs)
}

/// Both parts are parsed with correct rounding, so the quotient is within 2 ulp.
fn to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap();
    let d: f64 = r.denom().to_string().parse().unwrap();
    n / d
}

#[test]
fn fluctuation_matrix_exact() {
    for (n, mu) in [(2, 0.5), (7, 1.5), (12, 3.0), (25, 0.25)] {
        let (det, inv) = exact_det_and_inverse(n, mu);
        assert_rel(det_m(n, mu).unwrap(), to_f64(&det), 1e-13, "det M");
        for i in 1..n {
            for j in 1..n {
                let want = to_f64(&inv[i - 1][j - 1]);
                let got = m_inverse_entry(n, mu, i, j).unwrap();
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "M^-1[{i},{j}] n={n} mu={mu}: {got} vs {want}");
            }
        }
    }
}
