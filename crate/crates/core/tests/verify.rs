use num_complex::Complex64;
use resonance_core::asymptotics::{scattering_coefficients, scattering_map};
use resonance_core::ode_oracle::{integrate_with_stops, wkb_initial_data, IntegratorConfig};
use resonance_core::verify::{
    fit_outgoing_amplitude, matching_decay_slope, measure_scattering_pair, rel_error, sweep,
    verify_connection, verify_connection_with, verify_theorem1_matching, write_reports_csv,
    write_reports_json, VerifyError, VerifyOptions,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn unit_coupling_connection() {
    let cfg = IntegratorConfig::default();
    let plain = verify_connection(1.0, c(1.0, 0.0), 40.0, cfg).unwrap();
    assert!(plain.rel_error <= 1e-3, "{}", plain.rel_error);
    let extrapolated = verify_connection_with(
        1.0,
        c(1.0, 0.0),
        40.0,
        cfg,
        &VerifyOptions::with_richardson(),
    )
    .unwrap();
    assert!(extrapolated.rel_error <= 1e-5, "{}", extrapolated.rel_error);
    assert!(extrapolated.rel_error < plain.rel_error);
    assert_eq!(extrapolated.T_used, 40.0);
}

#[test]
fn fit_on_an_oracle_trajectory() {
    let a = 1.0;
    let t = 40.0;
    let v = c(1.0, 0.0);
    let w0 = wkb_initial_data(a, -t, v).unwrap();
    let stops: Vec<f64> = (0..=2000)
        .map(|k| 30.0 + 10.0 * k as f64 / 2000.0)
        .collect();
    let traj = integrate_with_stops(a, -t, t, w0, IntegratorConfig::default(), &stops).unwrap();
    let fit = fit_outgoing_amplitude(&traj, a, (30.0, 40.0)).unwrap();
    let predicted = scattering_map(v, a).unwrap();
    assert!(
        rel_error(fit.w, predicted) <= 0.2 / (t * t),
        "{}",
        rel_error(fit.w, predicted)
    );
    // the counter-rotating coefficient is close to -a conj(W)/2
    let expect_counter = -0.5 * a * predicted.conj();
    assert!((fit.counter - expect_counter).norm() <= 0.05 * expect_counter.norm());
    assert!(fit.residual_rms < 1e-4 * predicted.norm());
}

#[test]
fn conjugate_linearity_is_visible() {
    let cfg = IntegratorConfig::default();
    let one = verify_connection(1.0, c(1.0, 0.0), 40.0, cfg).unwrap();
    let i = verify_connection(1.0, Complex64::i(), 40.0, cfg).unwrap();
    // a complex-linear map would give W(i) = i W(1)
    let gap = (i.W_measured - Complex64::i() * one.W_measured).norm();
    assert!(gap > 0.5 * one.W_measured.norm());
    assert!((i.W_measured.norm() - one.W_measured.norm()).abs() > 0.1);
    let s = scattering_coefficients(1.0).unwrap();
    let expect = s.alpha() * Complex64::i() + s.beta() * (-Complex64::i());
    assert!(rel_error(i.W_measured, expect) <= 1e-3);
}

#[test]
fn sweep_within_tolerance() {
    let reports = sweep(
        &[0.5, 1.0, 1.5],
        c(1.0, 0.0),
        40.0,
        IntegratorConfig::default(),
    )
    .unwrap();
    assert_eq!(reports.len(), 3);
    for (r, a) in reports.iter().zip([0.5, 1.0, 1.5]) {
        let r = r.as_ref().unwrap();
        assert_eq!(r.a, a);
        assert!(r.rel_error <= 1e-3, "a={a}: {}", r.rel_error);
    }
}

#[test]
fn sweep_collects_item_errors() {
    let bad = IntegratorConfig {
        max_step: 1e-3,
        min_step: 1e-3,
        ..IntegratorConfig::with_tolerances(1e-14, 1e-16)
    };
    let reports = sweep(&[0.0, 1.0], c(1.0, 0.0), 20.0, bad).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().any(|r| r.is_err()));
    assert!(matches!(
        sweep(&[], c(1.0, 0.0), 40.0, IntegratorConfig::default()),
        Err(VerifyError::InvalidArgument(_))
    ));
}

#[test]
fn measured_determinant_small_coupling() {
    for a in [0.25, 0.5] {
        let (alpha, beta) = measure_scattering_pair(
            a,
            40.0,
            IntegratorConfig::default(),
            &VerifyOptions::default(),
        )
        .unwrap();
        let det = alpha.norm_sqr() - beta.norm_sqr();
        assert!((det - 1.0).abs() <= 1e-3, "a={a}: {det}");
    }
}

#[test]
fn measured_determinant_tightens_with_t() {
    // at larger coupling |α|² is large, so the defect is measured relative to
    // |α|² + |β|²
    let cfg = IntegratorConfig::default();
    for a in [1.0, 2.0] {
        let defect = |t: f64| {
            let (alpha, beta) =
                measure_scattering_pair(a, t, cfg, &VerifyOptions::default()).unwrap();
            let det = alpha.norm_sqr() - beta.norm_sqr();
            (det - 1.0).abs() / (alpha.norm_sqr() + beta.norm_sqr())
        };
        let (d40, d80) = (defect(40.0), defect(80.0));
        assert!(d40 <= 1e-3, "a={a}: {d40}");
        assert!(d80 < d40, "a={a}: {d80} vs {d40}");
    }
}

#[test]
fn matching_decays_like_inverse_square() {
    let probes = [-10.0, -20.0, -40.0, -80.0];
    for a in [0.5, 1.0] {
        let slope = matching_decay_slope(a, c(1.0, 0.0), &probes).unwrap();
        assert!((slope + 2.0).abs() <= 0.3, "a={a}: {slope}");
    }
    let gaps: Vec<f64> = [-10.0, -20.0, -40.0]
        .iter()
        .map(|&t| verify_theorem1_matching(0.5, c(1.0, 0.0), t).unwrap())
        .collect();
    for pair in gaps.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn matching_constant_at_unit_coupling() {
    let u = c(1.0, 2.0);
    // C fitted from the far probe, where the t⁻² law is cleanest
    let big_c = verify_theorem1_matching(1.0, u, -80.0).unwrap() * 6400.0;
    let gap = verify_theorem1_matching(1.0, u, -20.0).unwrap();
    assert!(gap <= 1.5 * big_c / 400.0, "{gap} vs C = {big_c}");
}

#[test]
fn reports_serialize() {
    let r = verify_connection(0.5, c(1.0, 0.0), 20.0, IntegratorConfig::default()).unwrap();
    let mut json = Vec::new();
    write_reports_json(std::slice::from_ref(&r), &mut json).unwrap();
    let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
    let obj = &parsed[0];
    for key in [
        "a",
        "V_in",
        "W_predicted",
        "W_measured",
        "rel_error",
        "config_echo",
        "T_used",
    ] {
        assert!(obj.get(key).is_some(), "missing {key}");
    }
    assert_eq!(obj["rel_error"].as_f64().unwrap(), r.rel_error);

    let mut csv = Vec::new();
    write_reports_csv(&[r.clone(), r], &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "a,reV,imV,reW_pred,imW_pred,reW_meas,imW_meas,rel_error,T"
    );
    assert_eq!(lines.count(), 2);
}
