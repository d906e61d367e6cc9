//! Properties checked over the committed parameter sets in `tests/corpus`.

use std::path::PathBuf;

use hyperconnect::connection::c_10;
use hyperconnect::oracle::{
    check_integrability, default_schedule, default_tolerance, integrate_loaded_domain_with, DomainSpec, Family, Schedule,
};
use hyperconnect::verify::{
    check_connection_01, check_corollary, check_inverse, proposition_conditions, run_suites, zero_one_conditions, Suite,
    SuiteInput, RE_MARGIN,
};
use hyperconnect::{Parameters, SeriesOptions};

fn corpus() -> Vec<(String, Parameters)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
        .into_iter()
        .map(|f| {
            let name = f.file_name().unwrap().to_string_lossy().into_owned();
            let p = Parameters::from_json(&std::fs::read_to_string(&f).unwrap()).unwrap();
            (name, p)
        })
        .collect()
}

fn zero_one(p: &Parameters) -> bool {
    zero_one_conditions(p, RE_MARGIN).is_ok()
}

fn eligible(suite: Suite, p: &Parameters) -> bool {
    if suite.max_n().is_some_and(|m| p.n() > m) {
        return false;
    }
    match suite {
        Suite::Connection01 | Suite::Corollary => zero_one(p),
        Suite::Inf0 | Suite::Propositions => proposition_conditions(p).is_ok(),
        _ => true,
    }
}

#[test]
fn full_suite_passes() {
    let opts = SeriesOptions::with_tol(1e-12);
    for (name, p) in corpus() {
        let suites: Vec<Suite> = Suite::ALL.into_iter().filter(|&s| eligible(s, &p)).collect();
        let input = SuiteInput::Fixed {
            params: p.clone(),
            seed: Some(0),
        };
        let mut failures = Vec::new();
        let mut count = 0;
        run_suites(&suites, &input, &opts, &mut |r| {
            count += 1;
            if !r.pass {
                failures.push(r.to_json());
            }
        })
        .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(count > 0, "{name}: no reports");
        assert!(failures.is_empty(), "{name}: {failures:#?}");
    }
}

/// A residual that shrinks with the truncation tolerance is dominated by
/// truncation, not by an error in the formulas.
#[test]
fn connection_residual_follows_series_tolerance() {
    for (name, p) in corpus().into_iter().filter(|(_, p)| zero_one(p)) {
        for z in [0.3, 0.5, 0.7] {
            let loose = check_connection_01(&p, z, &SeriesOptions::with_tol(1e-5)).unwrap().residual;
            let tight = check_connection_01(&p, z, &SeriesOptions::with_tol(1e-6)).unwrap().residual;
            assert!(
                tight * 2.0 <= loose,
                "{name} z={z}: residual {loose:e} at tol 1e-5, {tight:e} at tol 1e-6"
            );
        }
    }
}

fn condition_number(p: &Parameters) -> f64 {
    let sv = c_10(p).unwrap().entries.singular_values();
    sv.max() / sv.min()
}

/// The backward check can only be as bad as the forward one amplified by
/// the conditioning of `C10`, plus the error of the inverse itself.
#[test]
fn corollary_bounded_by_forward_residual() {
    let opts = SeriesOptions::with_tol(1e-12);
    for (name, p) in corpus().into_iter().filter(|(_, p)| zero_one(p)) {
        let cond = condition_number(&p);
        let inverse = check_inverse(&p).unwrap().residual;
        for z in [0.3, 0.5, 0.7] {
            let forward = check_connection_01(&p, z, &opts).unwrap().residual;
            let backward = check_corollary(&p, z, &opts).unwrap().residual;
            let bound = 10.0 * (cond * forward + inverse);
            assert!(
                backward <= bound,
                "{name} z={z}: corollary {backward:e} > 10·({cond:.3e}·{forward:e} + {inverse:e})"
            );
        }
    }
}

/// Each domain family at its natural sample point.
fn domains(n: usize) -> Vec<DomainSpec> {
    let mut out = Vec::new();
    for (family, z) in [
        (Family::D0, -0.5),
        (Family::Dinf, -0.5),
        (Family::D0tilde, 0.5),
        (Family::D1tilde, 0.5),
    ] {
        for i in 1..=n + 1 {
            out.push(DomainSpec::new(family, i, n, z).unwrap());
        }
    }
    out
}

/// Refining once past the converged level moves the value by less than a
/// tenth of the tolerance.
#[test]
fn quadrature_refinement_is_stable() {
    let mut checked = 0;
    for (name, p) in corpus().into_iter().filter(|(_, p)| p.n() == 1) {
        let tol = default_tolerance(1);
        for spec in domains(1) {
            if check_integrability(&spec, &p).is_err() {
                continue;
            }
            let base = integrate_loaded_domain_with(&spec, &p, tol, default_schedule(1)).unwrap();
            let next = Schedule {
                first_level: base.level,
                max_level: base.level + 1,
            };
            let finer = integrate_loaded_domain_with(&spec, &p, 1.0, next).unwrap();
            assert_eq!(finer.level, base.level + 1);
            let change = (finer.value - base.value).norm() / base.value.norm().max(1.0);
            assert!(
                change < tol / 10.0,
                "{name} {spec:?}: level {} -> {} changes by {change:e}",
                base.level,
                finer.level
            );
            checked += 1;
        }
    }
    assert!(checked >= 8, "only {checked} integrable domains in the corpus");
}

#[test]
fn two_dimensional_refinement_is_stable() {
    let (name, p) = corpus().into_iter().find(|(_, p)| p.n() == 2).unwrap();
    let spec = DomainSpec::new(Family::D1tilde, 2, 2, 0.5).unwrap();
    check_integrability(&spec, &p).unwrap();
    let tol = default_tolerance(2);
    let base = integrate_loaded_domain_with(&spec, &p, tol, default_schedule(2)).unwrap();
    let finer = integrate_loaded_domain_with(
        &spec,
        &p,
        1.0,
        Schedule {
            first_level: base.level,
            max_level: base.level + 1,
        },
    )
    .unwrap();
    let change = (finer.value - base.value).norm() / base.value.norm().max(1.0);
    assert!(change < tol / 10.0, "{name}: {change:e}");
}
