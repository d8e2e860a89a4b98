//! End-to-end acceptance checks: randomized cross-validation, limiting
//! cases, conservation laws, qualitative trends of the preset sweeps, and
//! output determinism of the installed binary.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use qpointer::cli::params::Params;
use qpointer::cli::presets;
use qpointer::cli::sweep::{self, Cell, SweepResult, SweepSpec};
use qpointer::cli::verify::{self, VerifyOptions};
use qpointer::fockspace::{build_quadratures, coherent_vector, DimPolicy};
use qpointer::photonstats::{
    g2_zero, mandel_q, mean_photon, photon_distribution, quadrature_moments,
};
use qpointer::qspecial::{q_exp, DeformationParameter};
use qpointer::weakmeas::{weak_value_x1, weak_value_x2, CoherentLabel, MeasurementConfig, Observable};
use qpointer::Error;

fn preset_spec(name: &str) -> SweepSpec {
    let preset = presets::find(name).expect("known preset");
    let mut params = Params::default();
    for (k, v) in presets::shared_sets(preset.name) {
        params.set(k, v).unwrap();
    }
    for (k, v) in preset.sets {
        params.set(k, v).unwrap();
    }
    SweepSpec {
        kind: preset.kind,
        params,
        q_list: preset.q_list.to_vec(),
        axis: preset.axis,
        values: sweep::linspace(preset.start, preset.stop, preset.count),
        preset: Some(preset.name),
        policy: DimPolicy::default(),
    }
}

fn col(result: &SweepResult, name: &str) -> usize {
    result
        .columns
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

fn float(cell: &Cell) -> Option<f64> {
    match cell {
        Cell::Float(v) => Some(*v),
        _ => None,
    }
}

/// Every reported quantity agrees with the independent matrix evaluation
/// on 200 seeded random configurations, within 1e-8, in under a minute.
#[test]
fn acceptance_randomized_cross_validation() {
    let start = Instant::now();
    let report = verify::run(&VerifyOptions::default()).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(report.count, 200);
    assert!(report.pass, "failing report:\n{}", report.to_json());
    for check in &report.checks {
        assert!(check.evaluated > 0, "check {} never ran", check.name);
        assert!(
            check.max_rel_delta <= check.threshold,
            "{}: {} > {}",
            check.name,
            check.max_rel_delta,
            check.threshold
        );
    }
    assert!(
        elapsed.as_secs() < 60,
        "verification took {elapsed:?}, budget is 60 s"
    );
    println!(
        "ACCEPTANCE PASS: cross-validation, 200 configs in {:.1} s",
        elapsed.as_secs_f64()
    );
}

/// At q = 1 every deformed object collapses onto its classical original.
#[test]
fn acceptance_classical_limit_reduction() {
    let q1 = DeformationParameter::new(1.0).unwrap();

    // series vs exponential, including a cancellation-prone argument
    for x in [
        Complex64::new(2.5, 0.0),
        Complex64::new(-20.0, 0.0),
        Complex64::new(1.3, -2.2),
    ] {
        let r = q_exp(x, q1).unwrap().value;
        assert!((r - x.exp()).norm() <= 1e-12 * x.exp().norm());
    }

    // the deformed quadrature operator degenerates to the symmetric one
    let (x1, x2, _) = build_quadratures(q1, 48).unwrap();
    assert_eq!(x1.matrix, x2.matrix);

    // both weak values coincide
    for (am, ap, bm, bp) in [(1.0, 0.2, 0.7, 2.1), (2.2, 4.0, 1.4, 1.0), (0.3, 0.0, 0.3, 3.1)] {
        let alpha = CoherentLabel::new(am, ap).unwrap();
        let beta = CoherentLabel::new(bm, bp).unwrap();
        let w1 = weak_value_x1(alpha, beta).value;
        let w2 = weak_value_x2(alpha, beta, q1).unwrap().value;
        assert!((w1 - w2).norm() <= 1e-12 * (1.0 + w1.norm()));
    }

    // an uncoupled classical pointer is Poissonian with canonical commutator
    let config = MeasurementConfig::new(
        q1,
        0.0,
        CoherentLabel::new(1.3, 0.4).unwrap(),
        CoherentLabel::new(1.0, 0.2).unwrap(),
        CoherentLabel::new(0.7, 2.1).unwrap(),
        Observable::X1,
    )
    .unwrap();
    assert!(mandel_q(&config).unwrap().abs() <= 1e-12);
    let m = quadrature_moments(&config).unwrap();
    assert!((m.commutator_expect - Complex64::new(0.0, 1.0)).norm() <= 1e-12);
    println!("ACCEPTANCE PASS: classical limit reductions");
}

/// With the coupling off the pointer is a lowering-operator eigenstate,
/// which fixes its statistics exactly.
#[test]
fn acceptance_uncoupled_pointer_laws() {
    for &q_val in &[0.1, 0.3, 0.5, 0.8, 1.0] {
        for &zm in &[0.3, 0.6, 0.9] {
            let q = DeformationParameter::new(q_val).unwrap();
            let config = MeasurementConfig::new(
                q,
                0.0,
                CoherentLabel::new(zm, 0.4).unwrap(),
                CoherentLabel::new(1.0, 0.2).unwrap(),
                CoherentLabel::new(0.7, 2.1).unwrap(),
                Observable::X1,
            )
            .unwrap();
            let zsq = zm * zm;
            assert!((mean_photon(&config).unwrap() - zsq).abs() <= 1e-10);
            assert!((mandel_q(&config).unwrap() + (1.0 - q_val) * zsq).abs() <= 1e-10);
            assert!((g2_zero(&config).unwrap() - 1.0).abs() <= 1e-10);
            let m = quadrature_moments(&config).unwrap();
            assert!((m.commutator_expect.im - (1.0 - (1.0 - q_val) * zsq)).abs() <= 1e-10);
        }
    }
    println!("ACCEPTANCE PASS: uncoupled pointer laws on the q x |z| grid");
}

/// The photon distribution carries unit total probability wherever it is
/// defined, coupled or not.
#[test]
fn acceptance_distribution_normalization() {
    let mut checked = 0;
    for &q_val in &[0.6, 0.7, 0.8, 0.9, 1.0] {
        for &(g, obs) in &[(0.3, Observable::X2), (0.0, Observable::X1), (0.7, Observable::X1)]
        {
            let config = MeasurementConfig::new(
                DeformationParameter::new(q_val).unwrap(),
                g,
                CoherentLabel::new(1.5, std::f64::consts::FRAC_PI_2).unwrap(),
                CoherentLabel::new(2.0, std::f64::consts::FRAC_PI_2).unwrap(),
                CoherentLabel::new(1.0, std::f64::consts::FRAC_PI_2).unwrap(),
                obs,
            )
            .unwrap();
            let dist = photon_distribution(&config).unwrap();
            assert!(
                (dist.sum() - 1.0).abs() <= 1e-10,
                "q {q_val} g {g}: sum {}",
                dist.sum()
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 15);
    println!("ACCEPTANCE PASS: distribution normalization on {checked} configs");
}

/// The generalized uncertainty product never falls below its bound on any
/// quadrature sweep preset.
#[test]
fn acceptance_generalized_uncertainty() {
    for name in ["fig5ab", "fig5cd", "fig5cd_text", "fig5ef", "fig5ef_text"] {
        let result = sweep::run(&preset_spec(name)).unwrap();
        let mut rows_checked = 0;
        for branch in ["x1", "x2"] {
            let ip = col(&result, &format!("{branch}_uncert_product"));
            let ib = col(&result, &format!("{branch}_uncert_bound"));
            for row in &result.rows {
                if let (Some(product), Some(bound)) = (float(&row[ip]), float(&row[ib])) {
                    assert!(
                        product >= bound - 1e-10,
                        "{name} {branch}: product {product} below bound {bound}"
                    );
                    rows_checked += 1;
                }
            }
        }
        assert!(rows_checked > 0, "{name}: no rows evaluated");
    }
    println!("ACCEPTANCE PASS: generalized uncertainty across quadrature presets");
}

/// Qualitative shapes of the named sweeps: where curves cross, where the
/// distribution peaks, how deformation orders the statistics.
#[test]
fn acceptance_figure_trends() {
    // weak value modulus crosses the pointer eigenvalue scale once
    let fig1 = sweep::run(&preset_spec("fig1")).unwrap();
    let iq = col(&fig1, "q");
    let iw = col(&fig1, "wv_x2_abs");
    let ib = col(&fig1, "baseline_x2");
    let mut crossings = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for row in &fig1.rows {
        if let (Some(q), Some(w), Some(b)) = (float(&row[iq]), float(&row[iw]), float(&row[ib])) {
            let d = w - b;
            if let Some((pq, pd)) = prev {
                if pd * d < 0.0 {
                    crossings.push((pq, q));
                }
            }
            prev = Some((q, d));
        }
    }
    assert_eq!(crossings.len(), 1, "crossings: {crossings:?}");
    assert!(
        crossings[0].0 > 0.70 && crossings[0].1 < 0.85,
        "crossing at {:?}",
        crossings[0]
    );

    // the distribution peak sits at n = 2 and grows toward q = 1
    let fig2 = sweep::run(&preset_spec("fig2")).unwrap();
    let peak = |result: &SweepResult, column: &str| -> (i64, f64) {
        let ic = col(result, column);
        let i_n = col(result, "n");
        result
            .rows
            .iter()
            .filter_map(|row| match (&row[i_n], float(&row[ic])) {
                (Cell::Int(n), Some(p)) => Some((*n, p)),
                _ => None,
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    let (n9, p9) = peak(&fig2, "p_q0_90");
    let (n10, p10) = peak(&fig2, "p_q1_00");
    assert_eq!((n9, n10), (2, 2));
    assert!((p9 - 0.2301).abs() < 1e-3, "p9 {p9}");
    assert!((p10 - 0.2549).abs() < 1e-3, "p10 {p10}");
    assert!(p9 < p10);

    // stronger deformation digs a deeper sub-Poissonian dip
    let mandel_at = |name: &str, z: f64| -> f64 {
        let result = sweep::run(&preset_spec(name)).unwrap();
        let ic = col(&result, "x1_mandel");
        let iz = col(&result, "z_modulus");
        result
            .rows
            .iter()
            .filter_map(|row| Some((float(&row[iz])?, float(&row[ic])?)))
            .min_by(|a, b| (a.0 - z).abs().total_cmp(&(b.0 - z).abs()))
            .unwrap()
            .1
    };
    let q02 = mandel_at("fig3a", 0.8);
    let q08 = mandel_at("fig3c", 0.8);
    let shared = presets::find("fig3a").unwrap();
    let mut params = Params::default();
    for (k, v) in presets::shared_sets(shared.name) {
        params.set(k, v).unwrap();
    }
    for (k, v) in shared.sets {
        params.set(k, v).unwrap();
    }
    params.set("q", "1").unwrap();
    params.set("z_modulus", "0.8").unwrap();
    let q10 = mandel_q(&params.build(DimPolicy::default()).unwrap()).unwrap();
    assert!(q02 < q08 && q08 < q10 && q10 < 0.0, "{q02} {q08} {q10}");
    assert!((q02 + 0.6779).abs() < 1e-3);
    assert!((q08 + 0.2875).abs() < 1e-3);
    assert!((q10 + 0.0726).abs() < 1e-3);

    // deformation keeps the pointer antibunched where the classical
    // pointer has already crossed into bunching
    let fig4 = sweep::run(&preset_spec("fig4a")).unwrap();
    let ig = col(&fig4, "x1_g2");
    for row in &fig4.rows {
        if let Some(g2) = float(&row[ig]) {
            assert!(g2 < 1.0, "deformed g2 {g2} not antibunched");
        }
    }
    let mut spec = preset_spec("fig4a");
    spec.params.q = 1.0;
    let classical = sweep::run(&spec).unwrap();
    let iz = col(&classical, "z_modulus");
    let ig = col(&classical, "x1_g2");
    let g2_at = |z: f64| -> f64 {
        classical
            .rows
            .iter()
            .filter_map(|row| Some((float(&row[iz])?, float(&row[ig])?)))
            .min_by(|a, b| (a.0 - z).abs().total_cmp(&(b.0 - z).abs()))
            .unwrap()
            .1
    };
    assert!(g2_at(0.1) < 1.0);
    assert!(g2_at(0.8) > 1.0);
    println!("ACCEPTANCE PASS: figure trends (crossing, peaks, ordering, antibunching)");
}

/// The binary produces identical bytes on identical invocations.
#[test]
fn acceptance_deterministic_output() {
    let bin = env!("CARGO_BIN_EXE_qpointer");
    let sweep_run = || {
        let out = Command::new(bin)
            .args(["mandel", "--preset", "fig3a"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = sweep_run();
    let second = sweep_run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "sweep output differs between runs");

    let verify_run = || {
        let out = Command::new(bin)
            .args(["verify", "--count", "40", "--seed", "9"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = verify_run();
    assert_eq!(first, verify_run(), "verification report differs between runs");
    println!("ACCEPTANCE PASS: byte-identical reruns for sweep and verification");
}

/// Out-of-domain inputs fail with structured errors, sweeps mark them
/// instead of failing, and no NaN or infinity ever reaches an output.
#[test]
fn acceptance_domain_guards() {
    let q = DeformationParameter::new(0.5).unwrap();
    // radius is 2: reject beyond it, stay finite just inside the margin
    assert!(matches!(
        q_exp(Complex64::new(2.02, 0.0), q),
        Err(Error::Domain { .. })
    ));
    let near = q_exp(Complex64::new(1.94, 0.0), q).unwrap().value;
    assert!(near.re.is_finite() && near.re > 0.0);
    assert!(matches!(
        coherent_vector(Complex64::new(1.5, 0.0), q, &DimPolicy::default()),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        MeasurementConfig::new(
            q,
            0.3,
            CoherentLabel::new(1.0, 0.0).unwrap(),
            CoherentLabel::new(2.0, 0.0).unwrap(),
            CoherentLabel::new(1.5, 0.0).unwrap(),
            Observable::X2,
        ),
        Err(Error::Domain { .. })
    ));

    // the distribution preset crosses the domain boundary in q: exactly
    // the two lowest deformations are flagged, the rest fully evaluate
    let fig2 = sweep::run(&preset_spec("fig2")).unwrap();
    let flagged = fig2
        .metadata
        .iter()
        .find(|(k, _)| k == "flagged_q")
        .map(|(_, v)| v.clone())
        .unwrap();
    assert_eq!(flagged, "0.2, 0.5");
    for (column, expect_empty) in [("p_q0_20", true), ("p_q0_50", true), ("p_q0_60", false)] {
        let ic = col(&fig2, column);
        for row in &fig2.rows {
            assert_eq!(matches!(row[ic], Cell::Empty), expect_empty, "{column}");
        }
    }

    // no preset output contains a non-finite number
    for name in ["fig1", "fig2", "fig3a", "fig4a", "fig5cd"] {
        let result = sweep::run(&preset_spec(name)).unwrap();
        let csv = result.to_csv();
        assert!(!csv.contains("NaN") && !csv.contains("inf"), "{name}");
        for row in &result.rows {
            for cell in row {
                if let Cell::Float(v) = cell {
                    assert!(v.is_finite(), "{name}: non-finite cell");
                }
            }
        }
    }
    println!("ACCEPTANCE PASS: domain guards and flagged sweep rows");
}
