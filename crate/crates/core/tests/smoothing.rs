use std::f64::consts::PI;

use proptest::prelude::*;
use qharmonics::fixtures::{gaussian, quaternion_gaussian, BoxIndicator, Fixture};
use qharmonics::grid::{sample, Field2D, GridSpec, Side};
use qharmonics::qft::{qft_forward, FreqWindow, QftKind};
use qharmonics::quat::Quaternion;
use qharmonics::smoothing::{
    dirichlet_partial_inverse, eta_jump_average, gauss_mean_inverse, gauss_weierstrass_kernel, lc_class_diagnostic,
    sinc_integral_bound_check, EtaOptions, GaussMeanParams, PartialSource, SINC_BOUND,
};

#[test]
fn doubling_the_window_reduces_the_error() {
    let f = quaternion_gaussian();
    let p = (0.2, -0.1);
    let exact = f.eval(p.0, p.1);
    let errs: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&m| (dirichlet_partial_inverse(PartialSource::Field(&f), p, m, m).unwrap() - exact).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-5);
}

#[test]
fn indicator_edge_converges_to_half() {
    let f = BoxIndicator::UNIT;
    let v = dirichlet_partial_inverse(PartialSource::Field(&f), (1.0, 0.0), 100.0, 100.0).unwrap();
    // (Si(2M)/π)·(2 Si(M)/π) with M = 100
    assert!((v.w - 0.5).abs() < 0.01);
    let j = eta_jump_average(&f, (1.0, 0.0), EtaOptions::default()).unwrap();
    assert_eq!(j.value, Quaternion::real(0.5));
}

#[test]
fn kernel_is_transform_of_weight() {
    // W_α is the two-sided QFT of (1/4π²) e^{−α(s²+t²)}
    let alpha = 0.5;
    let grid = GridSpec::symmetric(128, 10.0).unwrap();
    let w = qharmonics::fixtures::gauss_weierstrass_source(alpha);
    let spec = qft_forward(&sample(&w, &grid).unwrap(), QftKind::canonical(Side::TwoSided), FreqWindow::square(3.0, 24).unwrap()).unwrap();
    let kernel = gauss_weierstrass_kernel(alpha, &FreqWindow::square(3.0, 24).unwrap().grid()).unwrap();
    let e = spec.data().iter().zip(kernel.data()).map(|(&a, &b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(e < 1e-6);
}

#[test]
fn gauss_means_improve_on_integrable_fixtures() {
    let params = GaussMeanParams::new(vec![1.0, 0.3, 0.1, 0.03]).unwrap();
    for name in ["gaussian", "qgaussian", "gw", "indicator"] {
        let (grid, window) = if name == "indicator" { (GridSpec::symmetric(128, 4.0).unwrap(), 40.0) } else { (GridSpec::symmetric(96, 8.0).unwrap(), 12.0) };
        let sig = sample(&Fixture::by_name(name).unwrap(), &grid).unwrap();
        let spec = qft_forward(&sig, QftKind::canonical(Side::TwoSided), FreqWindow::square(window, 160).unwrap()).unwrap();
        let steps = gauss_mean_inverse(&spec, &params, &grid, Some(&sig)).unwrap();
        let errs: Vec<f64> = steps.iter().map(|s| s.l1_error.unwrap()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{name}: {errs:?}");
    }
}

#[test]
fn gaussian_smoothing_error_matches_closed_form() {
    // f ∗ W_α = e^{−r²/(1+4α)}/(1+4α) for f = e^{−r²}; the L¹ gap follows
    // from the radius where the two profiles cross
    let grid = GridSpec::symmetric(160, 9.0).unwrap();
    let sig = sample(&gaussian(), &grid).unwrap();
    let spec = qft_forward(&sig, QftKind::canonical(Side::TwoSided), FreqWindow::square(12.0, 200).unwrap()).unwrap();
    let params = GaussMeanParams::new(vec![0.5, 0.05]).unwrap();
    for s in gauss_mean_inverse(&spec, &params, &grid, Some(&sig)).unwrap() {
        let k = 1.0 + 4.0 * s.alpha;
        let r2 = k * k.ln() / (k - 1.0);
        let want = 2.0 * PI * ((-r2 / k).exp() - (-r2).exp());
        assert!((s.l1_error.unwrap() - want).abs() < 1e-3 * want, "alpha {}", s.alpha);
    }
}

#[test]
fn lc_diagnostic_reports_numbers() {
    let g = gaussian();
    let (v1, v2) = lc_class_diagnostic(&g, (0.0, 0.0), 0.25, 0.25, 6.0).unwrap();
    assert!(v1.is_finite() && v2.is_finite());
    // separable in (s, t) and symmetric in its arguments at the origin
    assert!((v1 - v2).abs() < 1e-12 * v1.max(1.0));
    assert!(lc_class_diagnostic(&g, (0.0, 0.0), 1.0, 0.5, 0.75).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sinc_integral_is_bounded(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        prop_assert!(sinc_integral_bound_check(a, b) <= SINC_BOUND);
    }

    #[test]
    fn eta_of_continuous_field_is_its_value(x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let f = quaternion_gaussian();
        let j = eta_jump_average(&f, (x, y), EtaOptions::default()).unwrap();
        prop_assert!((j.value - f.eval(x, y)).abs() < 1e-8);
        let mean = j.quadrant_values.iter().copied().sum::<Quaternion>() * 0.25;
        prop_assert_eq!(j.value, mean);
    }
}
