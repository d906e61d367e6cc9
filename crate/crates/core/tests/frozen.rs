//! Reference values computed once with an independent arbitrary-precision
//! implementation (mpmath `hyp2f1`, `hyper` and `quad` at 25 to 30 digits) and
//! frozen here.

use num_complex::Complex64;

use hyperconnect::oracle::{integrate_loaded_domain, DomainSpec, Family};
use hyperconnect::params::to_exponents;
use hyperconnect::series::{component, eval_ghs, f1_holo, f1_nonholo, finf, f0, prefactor, Branch, Point};
use hyperconnect::{validate, Parameters, SeriesOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn opts() -> SeriesOptions {
    SeriesOptions::with_tol(1e-14)
}

fn close(got: Complex64, want: Complex64, tol: f64) {
    let err = (got - want).norm() / want.norm().max(1.0);
    assert!(err <= tol, "got {got}, want {want}, rel err {err:e}");
}

fn gauss_n1() -> Parameters {
    Parameters::real(&[0.3, 0.7], &[1.4]).unwrap()
}

fn complex_n2() -> Parameters {
    Parameters::new(
        vec![c(0.63, -0.1), c(0.48, -0.2), c(0.6, -0.07)],
        vec![c(0.79, -0.2), c(1.39, 0.16)],
    )
    .unwrap()
}

#[test]
fn log_closed_form() {
    let v = eval_ghs(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0)], c(0.5, 0.0), &opts()).unwrap();
    close(v.value, c(2.0 * std::f64::consts::LN_2, 0.0), 1e-14);
}

#[test]
fn exponent_example() {
    let p = Parameters::real(&[0.2, 0.3, 0.4], &[1.1, 0.9]).unwrap();
    let e = to_exponents(&p);
    for (got, want) in e.lambda.iter().zip([-0.8, -0.5]) {
        close(*got, c(want, 0.0), 1e-15);
    }
    for (got, want) in e.mu.iter().zip([-0.1, -0.4, -0.4]) {
        close(*got, c(want, 0.0), 1e-15);
    }
}

#[test]
fn genericity_examples() {
    assert!(validate(&Parameters::real(&[0.3, 0.7], &[1.1]).unwrap(), 1e-8).ok);
    assert!(!validate(&Parameters::real(&[0.5, 1.5], &[0.9]).unwrap(), 1e-8).ok);
    assert!(validate(&Parameters::real(&[0.21, 0.43, 0.87], &[1.13, 0.59]).unwrap(), 1e-8).ok);
}

#[test]
fn gauss_solutions_at_zero() {
    let p = gauss_n1();
    let z = c(0.5, 0.0);
    close(f0(1, &p, z, Branch::PosZ, &opts()).unwrap().value, c(1.2779003503849251, 0.0), 1e-13);
    close(f0(2, &p, z, Branch::PosZ, &opts()).unwrap().value, c(1.1004851329706321, 0.0), 1e-13);
}

#[test]
fn gauss_solutions_at_infinity() {
    let p = gauss_n1();
    let z = c(-2.0, 0.0);
    close(finf(1, &p, z, &opts()).unwrap().value, c(0.82963198041509754, 0.0), 1e-13);
    close(finf(2, &p, z, &opts()).unwrap().value, c(0.57761708164523889, 0.0), 1e-13);
}

#[test]
fn gauss_solutions_at_one() {
    let p = gauss_n1();
    let z = c(0.6, 0.0);
    close(f1_nonholo(&p, z, &opts()).unwrap().value, c(0.91389805101098659, 0.0), 1e-10);
    close(f1_holo(1, &p, z, &opts()).unwrap().value, c(1.197472229405989, 0.0), 1e-10);
}

#[test]
fn complex_n2_at_zero() {
    let p = complex_n2();
    let z = c(0.4, 0.0);
    let want = [
        c(0.90510619494834607, -0.18119954971735436),
        c(1.3867450174774033, 0.13193528689603184),
        c(1.0726381303935757, -0.047593959043253881),
    ];
    for (i, w) in want.into_iter().enumerate() {
        close(f0(i + 1, &p, z, Branch::PosZ, &opts()).unwrap().value, w, 1e-13);
    }
}

#[test]
fn complex_n2_at_infinity() {
    let p = complex_n2();
    let z = c(-2.5, 0.0);
    let want = [
        c(0.53731588409818833, 0.073534116137721493),
        c(0.62016619353305079, 0.15434040260216219),
        c(0.5570442684996541, 0.057865624683486311),
    ];
    for (i, w) in want.into_iter().enumerate() {
        close(finf(i + 1, &p, z, &opts()).unwrap().value, w, 1e-13);
    }
}

/// Two-dimensional integral over `0 < t1 < 1, t2 < 0` at z = 0.7.
///
/// Reference: with `t2 = −t1·r` the t1 integral is `B(a, b) z^μ₃ ₂F₁(−μ₃, a;
/// a+b; −r/z)`, leaving one integral over `r = e^u` done at 25 digits.
/// Plain nested 2-D quadrature in mpmath does not converge past 1e-4 here
/// because of the corner singularity at t1 = t2 = 0.
#[test]
fn complex_n2_loaded_domain_at_one() {
    let p = complex_n2();
    let want = c(10.02316415304087, 28.342103305286828);
    let spec = DomainSpec::new(Family::D1tilde, 2, 2, 0.7).unwrap();
    let quad = integrate_loaded_domain(&spec, &p, 1e-8).unwrap();
    close(quad, want, 1e-10);
    let z = c(0.7, 0.0);
    let series = prefactor(Point::One, 2, &p).unwrap() * component(Point::One, 2, &p, z, &opts()).unwrap().value;
    close(series, want, 1e-12);
}
