mod common;

use std::f64::consts::PI;

use cauchy_spectral::halfline::*;
use cauchy_spectral::numerics::{integrate_with_breaks, Domain, QuadratureSpec};
use cauchy_spectral::specialfun::exp_eta;
use common::*;
use num_complex::Complex64;

#[test]
fn killed_kernel_mass_is_survival() {
    let m = kernel_mass(1.0, 1.0).unwrap();
    let s = survival(1.0, 1.0).unwrap();
    assert!((m.value - s).abs() < 1e-7, "{} vs {s}", m.value);
    let m = kernel_mass(0.5, 2.0).unwrap();
    assert!((m.value - survival(2.0, 0.5).unwrap()).abs() < 1e-7);
}

#[test]
fn exit_density_is_a_probability() {
    let r = exit_mass(1e16).unwrap();
    assert!(r.mass_lower() <= 1.0 + 1e-6 && r.mass_upper() >= 1.0 - 1e-6, "{r:?}");
    assert!((r.midpoint() - 1.0).abs() < 1e-6);
}

#[test]
fn psi_is_an_eigenfunction_of_the_killed_semigroup() {
    let a = kernel_action_on_psi(0.5, 0.7, 1.0, 1000.0).unwrap();
    let expected = (-0.5f64).exp() * psi(1.0, 0.7).psi;
    assert!(a.tail_bound < 1e-5);
    assert!((a.value - expected).abs() < 1e-4, "{} vs {expected}", a.value);
}

#[test]
fn chapman_kolmogorov() {
    // ∫ p_s(x, z) p_t(z, y) dz = p_{s+t}(x, y)
    let (s, t, x, y) = (0.4, 0.6, 1.0, 1.5);
    let spec = QuadratureSpec::default().with_tol(1e-10, 1e-9);
    let e = integrate_with_breaks(
        |z| heat_kernel(s, x, z).unwrap() * heat_kernel(t, z, y).unwrap(),
        Domain::UpperHalfLine(0.0),
        &[0.5, x, y, 3.0, 10.0, 100.0],
        &spec,
    )
    .unwrap();
    let direct = heat_kernel(s + t, x, y).unwrap();
    assert!((e.value - direct).abs() < 1e-7 * direct, "{} vs {direct}", e.value);
}

#[test]
fn plancherel_and_inversion() {
    let p = plancherel().unwrap();
    assert!((p.norm_ratio - 1.0).abs() < 0.01, "{}", p.norm_ratio);
    assert!(p.inversion_error < 0.01, "{}", p.inversion_error);
}

#[test]
fn laplace_transform_of_psi() {
    let spec = QuadratureSpec::default().with_tol(1e-12, 1e-11);
    for t in [0.5, 1.0, 2.0] {
        let q = laplace_psi_quadrature(1.0, t, &spec).unwrap().value;
        let closed = std::f64::consts::FRAC_1_SQRT_2 * exp_eta(t) / (1.0 + t * t);
        assert!(((q - closed) / closed).abs() < 1e-8, "t={t}");
        let z = laplace_psi(1.0, Complex64::new(t, 0.0)).unwrap();
        assert!((z.re - closed).abs() < 1e-14);
    }
}

#[test]
fn closed_form_kernel_agrees_with_spectral_integral() {
    let spec = QuadratureSpec::default().with_tol(1e-12, 1e-10);
    for t in [0.5, 1.0] {
        for x in [0.5, 1.0, 2.0] {
            for y in [0.5, 1.0, 2.0] {
                let a = heat_kernel(t, x, y).unwrap();
                let b = heat_kernel_spectral(t, x, y, &spec, 1e-12).unwrap();
                assert!(((a - b) / a).abs() < 1e-6, "t={t} x={x} y={y}: {a} {b}");
            }
        }
    }
}

#[test]
fn kernel_below_free_cauchy_density() {
    let table = KernelTable::evaluate(1.0, &[0.1, 1.0, 5.0], &[0.2, 2.0, 20.0]).unwrap();
    for (i, x) in table.xs.iter().enumerate() {
        for (j, y) in table.ys.iter().enumerate() {
            let free = 1.0 / (PI * (1.0 + (x - y) * (x - y)));
            let v = table.values[(i, j)];
            assert!(v > 0.0 && v < free);
        }
    }
}
