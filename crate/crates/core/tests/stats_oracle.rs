//! Cross-checks of the distribution functions and the t/Levene p-values
//! against direct numerical quadrature.
//!
//! Nothing here touches the library's gamma/beta machinery: densities are
//! integrated with composite Simpson rules and normalized numerically, so
//! agreement within 1e-6 is evidence from a genuinely independent route.

use ribbonlab::stats::dist::{f_sf, norm_cdf, t_two_sided_p};
use ribbonlab::stats::{levene_test, student_t, welch_t};

/// Composite Simpson integration of `f` over `[a, b]` with `n` panels
/// (rounded up to even).
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Two-sided t p-value by quadrature: integrate the unnormalized density
/// and its tail, then divide. The normalizing constant is never needed in
/// closed form.
fn t_two_sided_p_quadrature(t: f64, df: f64) -> f64 {
    let pdf = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let t = t.abs();
    // Beyond `limit` the density is negligible for the df used here; for
    // small df the polynomial tail still vanishes at the 1e-9 level.
    let limit = if df > 10.0 { t + 120.0 } else { 1.0e4 };
    let total = 2.0 * simpson(pdf, 0.0, limit, 400_000);
    let tail = simpson(pdf, t, limit, 400_000);
    2.0 * tail / total
}

/// Upper-tail F(d1, d2) probability by quadrature, substituting u = v^2 to
/// remove the u^(d1/2 - 1) singularity at zero when d1 = 1.
fn f_sf_quadrature(x: f64, d1: f64, d2: f64) -> f64 {
    // 2v (v^2)^(d1/2 - 1) simplifies to 2 v^(d1 - 1), finite at v = 0.
    let pdf_v = |v: f64| {
        let u = v * v;
        2.0 * v.powf(d1 - 1.0) * (1.0 + d1 * u / d2).powf(-(d1 + d2) / 2.0)
    };
    let limit = (x.max(1.0) * 400.0).sqrt();
    let total = simpson(pdf_v, 0.0, limit, 400_000);
    let tail = simpson(pdf_v, x.sqrt(), limit, 400_000);
    tail / total
}

/// A fixed pair of 30-element samples with distinct means and variances.
fn fixed_samples() -> (Vec<f64>, Vec<f64>) {
    let a: Vec<f64> = (0..30)
        .map(|i| 10.0 + 3.0 * ((i as f64) * 0.77).sin())
        .collect();
    let b: Vec<f64> = (0..30)
        .map(|i| 11.2 + 1.4 * ((i as f64) * 1.31).cos())
        .collect();
    (a, b)
}

#[test]
fn normal_cdf_matches_quadrature() {
    let phi = |x: f64| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    for x in [0.3, 1.0, 1.96, 2.5, 3.5] {
        let integral = 0.5 + simpson(phi, 0.0, x, 200_000);
        assert!(
            (norm_cdf(x) - integral).abs() < 1e-9,
            "norm_cdf({x}) = {} but quadrature gives {integral}",
            norm_cdf(x)
        );
    }
}

#[test]
fn t_tail_matches_quadrature_across_df() {
    for (t, df) in [
        (0.5, 4.0),
        (1.3, 9.0),
        (2.0, 29.0),
        (2.7, 58.0),
        (1.7, 33.4),
    ] {
        let direct = t_two_sided_p(t, df);
        let integrated = t_two_sided_p_quadrature(t, df);
        assert!(
            (direct - integrated).abs() < 1e-6,
            "t = {t}, df = {df}: closed form {direct} vs quadrature {integrated}"
        );
    }
}

#[test]
fn f_tail_matches_quadrature() {
    for (x, d1, d2) in [(0.8, 1.0, 58.0), (2.5, 1.0, 40.0), (1.7, 3.0, 20.0)] {
        let direct = f_sf(x, d1, d2);
        let integrated = f_sf_quadrature(x, d1, d2);
        assert!(
            (direct - integrated).abs() < 1e-6,
            "F({x}; {d1}, {d2}): closed form {direct} vs quadrature {integrated}"
        );
    }
}

#[test]
fn student_t_p_value_matches_independent_route() {
    let (a, b) = fixed_samples();
    let (t, p) = student_t(&a, &b).unwrap();
    let expected = t_two_sided_p_quadrature(t, (a.len() + b.len() - 2) as f64);
    assert!(
        (p - expected).abs() < 1e-6,
        "student p {p} vs quadrature {expected} (t = {t})"
    );
}

#[test]
fn welch_t_p_value_matches_independent_route() {
    let (a, b) = fixed_samples();
    let (t, p) = welch_t(&a, &b).unwrap();

    // Recompute the Welch-Satterthwaite df independently.
    let var = |s: &[f64]| {
        let m = s.iter().sum::<f64>() / s.len() as f64;
        s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64
    };
    let (va, vb) = (var(&a) / a.len() as f64, var(&b) / b.len() as f64);
    let df =
        (va + vb).powi(2) / (va * va / (a.len() as f64 - 1.0) + vb * vb / (b.len() as f64 - 1.0));

    let expected = t_two_sided_p_quadrature(t, df);
    assert!(
        (p - expected).abs() < 1e-6,
        "welch p {p} vs quadrature {expected} (t = {t}, df = {df})"
    );
}

#[test]
fn levene_p_value_matches_independent_route() {
    let (a, b) = fixed_samples();
    let (w, p) = levene_test(&a, &b).unwrap();
    assert!(w > 0.0, "fixture should have a variance gap");
    let expected = f_sf_quadrature(w, 1.0, (a.len() + b.len() - 2) as f64);
    assert!(
        (p - expected).abs() < 1e-6,
        "levene p {p} vs quadrature {expected} (W = {w})"
    );
}
