use hardy_quadrature::{integrate, Integrand};
use num_complex::Complex64;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn spec_examples() {
    let cases: [(Integrand, f64); 3] = [
        (Integrand::real(|x| x), 0.5),
        (Integrand::real(|x: f64| x.ln().powi(2)).singularity(0.0, 2), 2.0),
        (Integrand::real(|x: f64| x.powf(-0.4)).singularity(-0.4, 0), 5.0 / 3.0),
    ];
    for (f, want) in cases {
        let e = integrate(&f, 1e-12).unwrap();
        assert!((e.value.re - want).abs() < 1e-11 * want, "{} vs {want}", e.value);
    }
}

/// `∫ x^s (log x)^k dx = (-1)^k k! / (s+1)^(k+1)` for complex `s`; accuracy is
/// relative to `∫ |f| = k! / (Re s + 1)^(k+1)`.
#[test]
fn log_monomial_corpus_error_is_bounded() {
    let powers = [-0.9, -0.6, -0.2, 0.0, 0.7, 2.5, 6.0];
    let imags = [0.0, 1.5, -4.0];
    for &p in &powers {
        for &q in &imags {
            for k in 0..=4u32 {
                let s = Complex64::new(p, q);
                let f = Integrand::new(move |x: f64| Complex64::from(x).powc(s) * x.ln().powi(k as i32))
                    .singularity(p, k);
                let e = integrate(&f, 1e-10).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let want = sign * factorial(k) / (s + 1.0).powu(k + 1);
                let err = (e.value - want).norm();
                let scale = factorial(k) / (p + 1.0).powi(k as i32 + 1);
                assert!(err <= 1e-9 * scale, "s = {s}, k = {k}: {err:e}");
                assert!(err <= 10.0 * e.error + 1e-14, "estimate {:e} below true error {err:e}", e.error);
            }
        }
    }
}

#[test]
fn log_variable_form() {
    // ∫₀^∞ t e^(-2t) dt = 1/4, i.e. ∫₀¹ x (-log x) dx
    let g = Integrand::in_log_variable(|t: f64| Complex64::from(t * (-2.0 * t).exp())).singularity(1.0, 1);
    let e = integrate(&g, 1e-12).unwrap();
    assert!((e.value.re - 0.25).abs() < 1e-13);
}
