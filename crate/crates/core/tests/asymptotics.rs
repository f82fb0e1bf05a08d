use num_complex::Complex64;
use proptest::prelude::*;
use resonance_core::asymptotics::{
    scattering_coefficients, scattering_map, wkb_plus_leading, WkbAmplitude, WkbExpansion, WkbSide,
};
use resonance_core::closed_form::residual_eq1;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn expansion(a: f64, u: Complex64) -> WkbExpansion {
    WkbExpansion::new(a, WkbAmplitude::new(u, WkbSide::MinusInfinity).unwrap()).unwrap()
}

#[test]
fn two_term_residual_decays_like_inverse_square() {
    for a in [0.5, 1.0, 2.0] {
        let e = expansion(a, c(1.0, -0.5));
        let probes = [-10.0, -20.0, -40.0, -80.0];
        let res: Vec<f64> = probes
            .iter()
            .map(|&t| residual_eq1(e.eval(t).unwrap(), e.eval_derivative(t).unwrap(), t, a))
            .collect();
        for (r, &t) in res.iter().zip(&probes) {
            let predicted = e.residual_magnitude(t);
            assert!((r - predicted).abs() <= 1e-13 * t.abs(), "a={a} t={t}");
        }
        for pair in res.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((ratio - 4.0).abs() < 0.05, "a={a}: ratio {ratio}");
        }
        // fitted constant C in residual <= C / t²
        let c_fit = res[0] * 100.0;
        for (r, &t) in res.iter().zip(&probes) {
            assert!(*r <= 1.01 * c_fit / (t * t));
        }
    }
}

#[test]
fn outgoing_leading_term_value() {
    let w = wkb_plus_leading(20.0, 1.0, c(1.0, 1.0)).unwrap();
    let expect = c(-0.285_950_759_766_056_3, -1.385_002_585_914_270_1);
    assert!((w - expect).norm() < 1e-13);
}

#[test]
fn transfer_matrix_determinant() {
    for k in 0..=60 {
        let a = 0.05 * k as f64;
        let m = scattering_coefficients(a).unwrap().transfer_matrix();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m[0][0].norm_sqr();
        assert!((det - 1.0).norm() <= 1e-10 * scale.max(1.0), "a={a}: {det}");
    }
}

#[test]
fn beta_modulus_from_gamma_identity() {
    for a in [0.3, 1.0, 1.7] {
        let s = scattering_coefficients(a).unwrap();
        let expect = ((std::f64::consts::PI * a * a).exp() - 1.0).sqrt();
        assert!((s.beta().norm() / expect - 1.0).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn scattering_map_is_real_linear(
        a in -3.0f64..3.0,
        v1re in -2.0f64..2.0, v1im in -2.0f64..2.0,
        v2re in -2.0f64..2.0, v2im in -2.0f64..2.0,
        l in -3.0f64..3.0, m in -3.0f64..3.0,
    ) {
        let v1 = c(v1re, v1im);
        let v2 = c(v2re, v2im);
        let combo = scattering_map(l * v1 + m * v2, a).unwrap();
        let parts = l * scattering_map(v1, a).unwrap() + m * scattering_map(v2, a).unwrap();
        let alpha = scattering_coefficients(a).unwrap().alpha().norm();
        let scale = alpha * (l.abs() * v1.norm() + m.abs() * v2.norm() + 1.0);
        prop_assert!((combo - parts).norm() <= 1e-12 * scale);
    }

    #[test]
    fn mapping_preserves_the_indefinite_form(a in 0.0f64..3.0, vre in -2.0f64..2.0, vim in -2.0f64..2.0) {
        // (W, conj W) = M (V, conj V) with det M = 1 means the lifted map is
        // area preserving; here it is checked through the inverse matrix
        let s = scattering_coefficients(a).unwrap();
        let v = c(vre, vim);
        let w = s.apply(v);
        let back = s.alpha().conj() * w - s.beta() * w.conj();
        prop_assert!((back - v).norm() <= 1e-9 * s.alpha().norm_sqr() * (1.0 + v.norm()));
    }
}
