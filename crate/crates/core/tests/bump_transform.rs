use polyaxial::special::ln_gamma;
use polyaxial::transform::forward;
use polyaxial::*;

// int_0^r (1 - x^2/r^2)^q j_a(l x) x^{2a+1} dx
//   = r^{2a+2} G(a+1) G(q+1) / (2 G(a+q+2)) j_{a+q+1}(r l)
fn sonine(a: f64, q: f64, r: f64, l: f64) -> f64 {
    let c = (ln_gamma(a + 1.0) + ln_gamma(q + 1.0) - ln_gamma(a + q + 2.0)).exp();
    let j = normalized_bessel(BesselOrder::new(a + q + 1.0).unwrap(), r * l).unwrap();
    r.powf(2.0 * a + 2.0) * c / 2.0 * j
}

#[test]
fn bump_transform_matches_sonine_integral() {
    for (alpha, r) in [
        (vec![0.0], 1.0),
        (vec![0.5], 0.5),
        (vec![0.3], 1.0),
        (vec![0.0, 1.0], 0.75),
    ] {
        let a = AlphaParams::new(alpha.clone()).unwrap();
        let n = a.dim();
        let phys = build_grid(&a, &vec![r; n], &vec![48; n]).unwrap();
        let freq = build_grid(&a, &vec![30.0; n], &vec![24; n]).unwrap();
        let spec = FunctionSpec::bump(r, 8.0);
        let got = forward(&spec.sample(&phys).unwrap(), &freq).unwrap();
        let peak: f64 = alpha.iter().map(|&ai| sonine(ai, 8.0, r, 0.0)).product();
        for k in 0..freq.len() {
            let l = freq.point(k);
            let want: f64 = alpha.iter().zip(&l).map(|(&ai, &li)| sonine(ai, 8.0, r, li)).product();
            assert!(
                (got.values()[k] - want).abs() <= 1e-12 * peak.abs().max(1e-300),
                "alpha = {alpha:?}, lambda = {l:?}"
            );
        }
    }
}
