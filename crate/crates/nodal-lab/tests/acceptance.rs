//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities. Heavy criteria share a lock so per-criterion
//! wall-clock budgets are not polluted by concurrent tests.

use nodal_lab::continuation::{
    growth_profile, log_integral, volterra_solve, ContinuationEngine, ContinuationParams,
    TrigPolynomial,
};
use nodal_lab::counting::{
    count_zeros_argument_principle, critical_point_count, real_boundary_zeros, schiffer_ratio,
    ClosureMap, Contour, CountingError, StripMap,
};
use nodal_lab::geometry::AnalyticCurve;
use nodal_lab::modes::{
    bessel_root, disc_mode, ellipse_mode, BoundaryCondition, EigenMode, Parity, RootKind,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Mutex;

static SERIAL: Mutex<()> = Mutex::new(());

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Relaxed quadrature targets for integer-count experiments: winding
/// numbers tolerate 1e-3 value error, so the Volterra ladder can stop at
/// 1e-4 with a lighter boundary mesh.
fn counting_params() -> ContinuationParams {
    ContinuationParams {
        volterra_target: 1e-4,
        osc_budget: 12.0,
        panel_order: 12,
        ..ContinuationParams::default()
    }
}

#[test]
fn criterion_01_disc_exactness() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = std::time::Instant::now();
    for m in 1..=20u32 {
        for n in 1..=5u32 {
            let mode = disc_mode(m, n, BoundaryCondition::Neumann, Parity::Sin).unwrap();
            let zeros = real_boundary_zeros(&mode).unwrap();
            assert_eq!(
                zeros.sign_changes,
                2 * m as usize,
                "real zeros of (m, n) = ({m}, {n})"
            );
            let crits = critical_point_count(&mode).unwrap();
            assert_eq!(
                crits.sign_changes,
                2 * m as usize,
                "critical points of (m, n) = ({m}, {n})"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "disc scan took {elapsed:?}, budget 60 s"
    );
    println!(
        "criterion 01 PASS: 100 disc modes, n_real = n_crit = 2m exactly, {:.2} s",
        elapsed.as_secs_f64()
    );
}

fn fidelity_modes() -> Vec<EigenMode> {
    [(1u32, 1u32), (3, 1), (5, 2), (8, 3), (10, 8)]
        .iter()
        .map(|&(m, n)| {
            let mode = disc_mode(m, n, BoundaryCondition::Neumann, Parity::Sin).unwrap();
            assert!(mode.lambda <= 40.0, "mode ({m},{n}) exceeds lambda = 40");
            mode
        })
        .collect()
}

#[test]
fn criterion_02_continuation_fidelity() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let curve = AnalyticCurve::circle(1.0);
    let params = ContinuationParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    for mode in fidelity_modes() {
        for _ in 0..20 {
            let t = c(
                rng.gen_range(0.3..2.0 * PI - 0.3),
                rng.gen_range(-0.05..0.05),
            );
            let got = volterra_solve(&curve, &mode, t, &params).unwrap();
            let expect = mode.trace.eval_complex(t);
            let rel = (got.value - expect).norm() / expect.norm().max(1e-12);
            worst = worst.max(rel);
            assert!(
                rel <= 1e-5,
                "mode {} at t = {t}: rel error {rel:.3e}",
                mode.id()
            );
        }
    }
    println!("criterion 02 PASS: 100 random points, worst relative error {worst:.3e}");
}

#[test]
fn criterion_03_branch_identity() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let circle = AnalyticCurve::circle(1.0);
    let params = ContinuationParams::default();
    let one = TrigPolynomial::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let mut worst: f64 = 0.0;
    for j in 0..32 {
        for k in 0..8 {
            let t = c(
                2.0 * PI * (j as f64 + 0.5) / 32.0,
                0.25 * (k as f64 + 1.0) / 8.0,
            );
            // g(t) = int L(s, t) ds + 2 pi i t vanishes on the upper strip
            let g = log_integral(&circle, &one, t, &params).unwrap().value();
            worst = worst.max(g.norm());
            assert!(g.norm() < 1e-8, "g({t}) = {g}");
            // the mirrored identity with the opposite path sign below
            let g_low = log_integral(&circle, &one, t.conj(), &params)
                .unwrap()
                .value();
            worst = worst.max(g_low.norm());
            assert!(g_low.norm() < 1e-8, "g({}) = {g_low}", t.conj());
        }
    }
    println!("criterion 03 PASS: |g| < 1e-8 on the 32 x 8 grid (max {worst:.3e})");
}

#[test]
fn criterion_04_argument_principle_integrality() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let curve = AnalyticCurve::circle(1.0);
    let params = counting_params();
    let mut worst: f64 = 0.0;
    for mode in fidelity_modes() {
        let engine = ContinuationEngine::new(&curve, &mode, params.clone());
        for &eps in &[0.05, 0.1] {
            let nodes_x = (3 * mode.m as usize + 48).min(200);
            let nodes_y = ((4.0 * mode.lambda * eps).ceil() as usize + 8).max(12);
            let contour = Contour::full_annulus(eps, nodes_x, nodes_y);
            let (count, raw) = count_zeros_argument_principle(&engine, &contour).unwrap();
            let dev = (raw - raw.round()).abs();
            worst = worst.max(dev);
            assert!(
                dev <= 0.05,
                "raw winding {raw} for {} at eps {eps}",
                mode.id()
            );
            assert_eq!(
                count,
                2 * mode.m as usize,
                "complex count for {} at eps {eps}",
                mode.id()
            );
        }
    }
    println!("criterion 04 PASS: windings within {worst:.3e} of integers, counts = 2m");
}

#[test]
fn criterion_05_dual_formula_agreement() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let curves = [
        AnalyticCurve::circle(1.0),
        AnalyticCurve::ellipse(0.75).unwrap(),
        wavy_curve(),
    ];
    let params = ContinuationParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let curve = &curves[case % curves.len()];
        let mut coeffs = vec![c(0.0, 0.0); 9];
        for k in -4i64..=4 {
            let mag = (-0.7 * k.abs() as f64).exp();
            coeffs[(k + 4) as usize] = c(
                mag * rng.gen_range(-1.0..1.0),
                mag * rng.gen_range(-1.0..1.0),
            );
        }
        let f = TrigPolynomial::new(coeffs);
        let t = c(rng.gen_range(0.2..2.0 * PI - 0.2), rng.gen_range(-0.12..0.12));
        let v = log_integral(curve, &f, t, &params)
            .unwrap_or_else(|e| panic!("case {case} at t = {t}: {e}"));
        worst = worst.max(v.discrepancy);
        assert!(v.discrepancy <= 1e-8, "case {case}: {}", v.discrepancy);
    }
    println!("criterion 05 PASS: 50 random (f, t), worst relative discrepancy {worst:.3e}");
}

fn wavy_curve() -> AnalyticCurve {
    let mut coeffs = vec![c(0.0, 0.0); 11];
    coeffs[6] = c(1.0, 0.0); // c_1
    coeffs[7] = c(0.06, 0.02); // c_2
    coeffs[2] = c(0.0, 0.04); // c_-3
    AnalyticCurve::new(coeffs).expect("wavy test curve is simple")
}

#[test]
fn criterion_06_o_lambda_scaling() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = std::time::Instant::now();
    let curve = AnalyticCurve::circle(1.0);
    let params = counting_params();
    let eps = 0.05;
    let mut prev_ratio = 0.0;
    let mut sup_complex_ratio: f64 = 0.0;
    for m in 5..=60u32 {
        let mode = disc_mode(m, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let zeros = real_boundary_zeros(&mode).unwrap().sign_changes;
        assert_eq!(zeros, 2 * m as usize);
        let ratio = zeros as f64 / mode.lambda;
        assert!(ratio > prev_ratio, "n_real/lambda not increasing at m = {m}");
        assert!(ratio < 2.0, "ratio {ratio} exceeds 2 at m = {m}");
        if m >= 50 {
            assert!(ratio > 1.8, "whispering-gallery saturation missed at m = {m}: {ratio}");
        }
        prev_ratio = ratio;

        let engine = ContinuationEngine::new(&curve, &mode, params.clone());
        let nodes_x = (5 * m as usize / 2 + 48).min(400);
        let nodes_y = ((4.0 * mode.lambda * eps).ceil() as usize + 8).max(12);
        let contour = Contour::full_annulus(eps, nodes_x, nodes_y);
        let (n_complex, _) = count_zeros_argument_principle(&engine, &contour)
            .unwrap_or_else(|e| panic!("complex count at m = {m}: {e}"));
        assert_eq!(n_complex, 2 * m as usize, "complex count at m = {m}");
        let cr = n_complex as f64 / mode.lambda;
        sup_complex_ratio = sup_complex_ratio.max(cr);
        assert!(cr <= 3.0, "n_complex/lambda = {cr} at m = {m}");
    }
    println!(
        "criterion 06 PASS: m = 5..60, n_real/lambda -> {prev_ratio:.4} (monotone, <2, >1.8 from m = 50), sup n_complex/lambda = {sup_complex_ratio:.4} <= 3, {:.1} s",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_07_growth_envelope() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let curve = AnalyticCurve::circle(1.0);
    let params = ContinuationParams {
        volterra_target: 1e-5,
        ..ContinuationParams::default()
    };
    let mut rates = Vec::new();
    for m in [5u32, 10, 20] {
        let mode = disc_mode(m, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
        // fit window [2/m, 3/m], where tanh(m xi) has flattened
        let eps = 3.0 / m as f64;
        let profile = growth_profile(&curve, &mode, eps, 24, 9, 2.0 / m as f64, &params).unwrap();
        let rate = profile.fitted_rate;
        let rel = (rate - m as f64).abs() / m as f64;
        assert!(
            rel <= 0.05,
            "fitted rate {rate} vs m = {m} ({:.2}% off)",
            rel * 100.0
        );
        rates.push(rate);
        // envelope: every computed point obeys log|u| <= rate |xi| + log lambda + 2
        for &(xi, y) in &profile.rows {
            assert!(
                y <= rate * xi.abs() + mode.lambda.ln() + 2.0,
                "envelope violated at xi = {xi}: {y}"
            );
        }
        // the real row of a normalized trace reaches log max >= 0
        let real_row = profile
            .rows
            .iter()
            .find(|r| r.0 == 0.0)
            .expect("real row present");
        assert!(real_row.1 >= 0.0, "max log |u| on the real row: {}", real_row.1);
    }
    println!(
        "criterion 07 PASS: fitted growth rates {rates:.3?} for m = 5, 10, 20 (within 5%)"
    );
}

#[test]
fn criterion_08_schiffer_degenerate_detection() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let circle = AnalyticCurve::circle(1.0);
    for n in 1..=3u32 {
        let mode = disc_mode(0, n, BoundaryCondition::Neumann, Parity::Cos).unwrap();
        let ratio = schiffer_ratio(&mode, &circle);
        assert!(ratio.abs() < 1e-12, "radial mode (0, {n}) ratio {ratio}");
        assert!(
            matches!(critical_point_count(&mode), Err(CountingError::DegenerateTrace)),
            "radial mode (0, {n}) must report a degenerate critical set"
        );
    }
    println!("criterion 08 PASS: radial modes give ratio 0 and DegenerateTrace");
}

#[test]
fn criterion_09_ellipse_qualitative_suite() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    // (a) circle limit: first five eigenvalues at a = 0.05 within 1% of disc
    let a = 0.05;
    let cases = [(1u32, 1u32), (2, 1), (0, 1), (3, 1), (1, 2)];
    for &(m, n) in &cases {
        let parity = if m == 0 { Parity::Cos } else { Parity::Sin };
        let mode = ellipse_mode(a, m, n, BoundaryCondition::Neumann, parity).unwrap();
        let disc = bessel_root(m, n, RootKind::Critical).unwrap().value;
        let rel = (mode.lambda - disc).abs() / disc;
        assert!(
            rel <= 0.01,
            "ellipse ({m},{n}) lambda {} vs disc {disc} ({rel:.4})",
            mode.lambda
        );
    }
    // (b) Gaussian-beam branch: log |G(0)| decreases linearly in lambda
    let ab = 0.25;
    let mut logs = Vec::new();
    let mut lambdas = Vec::new();
    for n in [10u32, 12, 14] {
        let mode = ellipse_mode(ab, 0, n, BoundaryCondition::Neumann, Parity::Cos).unwrap();
        let g0 = mode.trace.eval_real(0.0).abs();
        let gmax = mode.trace.max_abs(512);
        logs.push((g0 / gmax).ln());
        lambdas.push(mode.lambda);
    }
    let s1 = (logs[1] - logs[0]) / (lambdas[1] - lambdas[0]);
    let s2 = (logs[2] - logs[1]) / (lambdas[2] - lambdas[1]);
    assert!(s1 < 0.0 && s2 < 0.0, "beam decay slopes {s1}, {s2}");
    assert!(
        (s1 - s2).abs() <= 0.35 * s1.abs(),
        "beam decay not linear: {s1} vs {s2}"
    );
    println!(
        "criterion 09 PASS: circle-limit eigenvalues within 1%, beam log|G(0)| slopes {s1:.3}, {s2:.3}"
    );
}

#[test]
fn criterion_10_invariant_suite() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let curve = AnalyticCurve::circle(1.0);
    let params = ContinuationParams::default();

    // restriction to the real axis: 32 random points, two boundary
    // conditions
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let neu = disc_mode(4, 2, BoundaryCondition::Neumann, Parity::Sin).unwrap();
    let dir = disc_mode(3, 1, BoundaryCondition::Dirichlet, Parity::Cos).unwrap();
    for mode in [&neu, &dir] {
        for _ in 0..16 {
            let x = rng.gen_range(0.0..2.0 * PI);
            let got = volterra_solve(&curve, mode, c(x, 0.0), &params).unwrap().value;
            let expect = mode.trace.eval_real(x);
            assert!(
                (got - expect).norm() < 1e-7,
                "restriction of {} at {x}",
                mode.id()
            );
        }
    }

    // periodicity, Schwarz reflection, continuity across the real axis
    let mode = disc_mode(5, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
    for &(x, y) in &[(1.1, 0.03), (4.4, 0.05)] {
        let t = c(x, y);
        let v = volterra_solve(&curve, &mode, t, &params).unwrap().value;
        let v_per = volterra_solve(&curve, &mode, t + c(2.0 * PI, 0.0), &params)
            .unwrap()
            .value;
        assert!((v - v_per).norm() < 1e-7, "periodicity at {t}");
        let v_conj = volterra_solve(&curve, &mode, t.conj(), &params).unwrap().value;
        assert!((v_conj - v.conj()).norm() < 1e-7, "Schwarz reflection at {t}");
    }
    for &x in &[0.9, 3.7] {
        let xi = 1e-4;
        let up = volterra_solve(&curve, &mode, c(x, xi), &params).unwrap().value;
        let down = volterra_solve(&curve, &mode, c(x, -xi), &params).unwrap().value;
        let mid = mode.trace.eval_real(x);
        assert!(
            (up + down - 2.0 * mid).norm() < 1e-6,
            "continuity across the axis at {x}"
        );
    }

    // sectional holomorphy: discrete Cauchy-Riemann residual
    let engine = ContinuationEngine::new(&curve, &mode, params.clone());
    for &(x, y) in &[(1.5, 0.04), (5.2, -0.05)] {
        let h = 1e-4;
        let fx = (engine.eval(c(x + h, y)).unwrap().value - engine.eval(c(x - h, y)).unwrap().value)
            / (2.0 * h);
        let fy = (engine.eval(c(x, y + h)).unwrap().value - engine.eval(c(x, y - h)).unwrap().value)
            / (2.0 * h);
        let residual = (fx - fy / Complex64::i()).norm();
        assert!(residual < 1e-6, "CR residual {residual} at ({x}, {y})");
    }

    // integer counts unchanged at doubled resolution
    let m3 = disc_mode(3, 2, BoundaryCondition::Neumann, Parity::Sin).unwrap();
    let base = nodal_lab::counting::real_boundary_zeros_scaled(&m3, 1.0).unwrap();
    let fine = nodal_lab::counting::real_boundary_zeros_scaled(&m3, 2.0).unwrap();
    assert_eq!(base.sign_changes, fine.sign_changes);
    let cbase = nodal_lab::counting::critical_point_count_scaled(&m3, 1.0).unwrap();
    let cfine = nodal_lab::counting::critical_point_count_scaled(&m3, 2.0).unwrap();
    assert_eq!(cbase.sign_changes, cfine.sign_changes);

    let cparams = counting_params();
    let m5 = disc_mode(5, 1, BoundaryCondition::Neumann, Parity::Sin).unwrap();
    let engine5 = ContinuationEngine::new(&curve, &m5, cparams.clone());
    let c1 = Contour::full_annulus(0.05, 64, 12);
    let c2 = Contour::full_annulus(0.05, 128, 24);
    let (k1, _) = count_zeros_argument_principle(&engine5, &c1).unwrap();
    let (k2, _) = count_zeros_argument_principle(&engine5, &c2).unwrap();
    assert_eq!(k1, k2, "complex count changes under contour doubling");
    assert_eq!(k1, 10);

    // synthetic function at doubled nodes
    let w = c(1.0, 0.04);
    let f = ClosureMap(move |t: Complex64| (3.0 * t).sin() * (t.cos() - w.cos()));
    let (s1, _) = count_zeros_argument_principle(&f, &Contour::full_annulus(0.1, 160, 16)).unwrap();
    let (s2, _) = count_zeros_argument_principle(&f, &Contour::full_annulus(0.1, 320, 32)).unwrap();
    assert_eq!(s1, s2);

    // Jensen consistency against the argument principle
    let f2 = ClosureMap(|t: Complex64| (2.0 * t).sin());
    let eps = 0.08;
    let delta = 0.004;
    let jp = nodal_lab::counting::jensen_count(&f2, eps + delta, 2048).unwrap();
    let jm = nodal_lab::counting::jensen_count(&f2, eps - delta, 2048).unwrap();
    let deriv = (jp - jm) / (2.0 * delta);
    let (k, _) =
        count_zeros_argument_principle(&f2, &Contour::full_annulus(eps, 96, 12)).unwrap();
    assert!((deriv - k as f64).abs() < 0.5, "jensen derivative {deriv} vs {k}");

    // zero-count envelope with the flat-strip Green's proxy
    let eps_env = 0.1;
    let profile = growth_profile(&curve, &m5, eps_env, 16, 4, 0.0, &cparams).unwrap();
    let max_log = profile.rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let nu = nodal_lab::counting::strip_green_max(eps_env);
    let engine_half = ContinuationEngine::new(&curve, &m5, cparams.clone());
    let half = Contour::full_annulus(eps_env / 2.0, 64, 12);
    let (n_half, _) = count_zeros_argument_principle(&engine_half, &half).unwrap();
    assert!(
        (n_half as f64) <= max_log.max(0.0) / nu.abs(),
        "envelope: n = {n_half}, max log = {max_log}, nu = {nu}"
    );

    // dual formulas at doubled panel order on a couple of random cases
    let fine_params = ContinuationParams {
        panel_order: 24,
        min_panel: 2.5e-5,
        ..ContinuationParams::default()
    };
    let one = TrigPolynomial::new(vec![c(0.3, 0.1), c(1.0, 0.0), c(0.2, -0.4)]);
    for &(x, y) in &[(2.2, 0.08), (0.9, -0.11)] {
        let v = log_integral(&curve, &one, c(x, y), &fine_params).unwrap();
        assert!(v.discrepancy < 1e-8);
    }

    println!("criterion 10 PASS: invariant suite green at default and doubled resolutions");
}
