use std::sync::Arc;

use polyaxial::pde::{apply_polynomial, solve_polynomial};
use polyaxial::sobolev::{duality_pairing, hs_inner_product};
use polyaxial::transform::{forward, plancherel_defect};
use polyaxial::translation::translated;
use polyaxial::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn grid(alpha: &[f64], r: f64, n: usize) -> Arc<QuadGrid> {
    let a = AlphaParams::new(alpha.to_vec()).unwrap();
    build_grid(&a, &vec![r; a.dim()], &vec![n; a.dim()]).unwrap()
}

fn mixture(g: &Arc<QuadGrid>, terms: &[(f64, f64)]) -> SpectralDistribution {
    let terms = terms.to_vec();
    let f = move |xi: &[f64]| {
        let t: f64 = xi.iter().map(|v| v * v).sum();
        terms.iter().map(|&(c, a)| c * (-a * t).exp()).sum::<f64>()
    };
    SpectralDistribution::from_spectrum(g, &f).unwrap()
}

fn random_mixture(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let k = rng.gen_range(1..=4);
    (0..k)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear(a in 0.5f64..2.0, b in 0.5f64..2.0, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let g = grid(&[0.5], 14.0, 64);
        let f1 = FunctionSpec::gaussian(a).sample(&g).unwrap();
        let f2 = FunctionSpec::gaussian(b).sample(&g).unwrap();
        let lhs = forward(&f1.combine(s, &f2, t).unwrap(), &g).unwrap();
        let r1 = forward(&f1, &g).unwrap();
        let r2 = forward(&f2, &g).unwrap();
        let rhs = r1.combine(s, &r2, t).unwrap();
        let scale = 1.0 + s.abs() + t.abs();
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn integration_is_linear(a in 0.3f64..3.0, s in -2.0f64..2.0) {
        let g = grid(&[0.0, 1.0], 10.0, 40);
        let f1 = FunctionSpec::gaussian(a).sample(&g).unwrap();
        let f2 = FunctionSpec::poly_gaussian(vec![1.0, 0.5], 1.0).sample(&g).unwrap();
        let lhs = f1.combine(s, &f2, 1.0).unwrap().integrate();
        let rhs = s * f1.integrate() + f2.integrate();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn plancherel_holds_for_gaussians(a in 0.5f64..3.0, al in -0.4f64..2.0) {
        let g = grid(&[al], 14.0, 200);
        let f = FunctionSpec::gaussian(a).sample(&g).unwrap();
        prop_assert!(plancherel_defect(&f, &g).unwrap() <= 1e-6);
    }

    #[test]
    fn norm_is_monotone_in_s(s in -2.0f64..2.0, ds in 0.0f64..2.0, p in 1.0f64..4.0) {
        let g = grid(&[0.0], 14.0, 100);
        let t = mixture(&g, &[(1.0, 0.5), (-0.5, 1.5)]);
        let lo = sobolev_norm(&t, SobolevIndex::new(s, p).unwrap()).unwrap();
        let hi = sobolev_norm(&t, SobolevIndex::new(s + ds, p).unwrap()).unwrap();
        prop_assert!(lo <= hi);
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive(c in -5.0f64..5.0, s in -1.0f64..1.0) {
        let g = grid(&[0.5], 14.0, 80);
        let a = mixture(&g, &[(1.0, 0.5)]);
        let b = mixture(&g, &[(-0.7, 1.2), (0.3, 0.3)]);
        let idx = SobolevIndex::new(s, 2.0).unwrap();
        let ca = SpectralDistribution::new(a.spectrum().scaled(c).unwrap());
        let na = sobolev_norm(&a, idx).unwrap();
        prop_assert!((sobolev_norm(&ca, idx).unwrap() - c.abs() * na).abs() <= 1e-12 * (1.0 + c.abs() * na));
        let sum = SpectralDistribution::new(a.spectrum().combine(1.0, b.spectrum(), 1.0).unwrap());
        prop_assert!(sobolev_norm(&sum, idx).unwrap() <= na + sobolev_norm(&b, idx).unwrap() + 1e-12);
    }

    #[test]
    fn inner_product_is_symmetric_and_positive(s in -1.0f64..1.5, seed in any::<u64>()) {
        let g = grid(&[0.0], 14.0, 80);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = mixture(&g, &random_mixture(&mut rng));
        let b = mixture(&g, &random_mixture(&mut rng));
        let ab = hs_inner_product(&a, &b, s).unwrap();
        let ba = hs_inner_product(&b, &a, s).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-13 * (1.0 + ab.abs()));
        prop_assert!(hs_inner_product(&a, &a, s).unwrap() >= 0.0);
    }

    #[test]
    fn polynomial_solve_is_a_left_inverse(c0 in 0.1f64..5.0, c1 in 0.0f64..3.0, c2 in 0.01f64..2.0) {
        let g = grid(&[0.0, 0.5], 10.0, 24);
        let f = mixture(&g, &[(1.0, 0.4)]);
        let p = EvenPolynomial::new(vec![c0, c1, c2]).unwrap();
        let u = solve_polynomial(&f, &p).unwrap();
        let back = apply_polynomial(&u, &p).unwrap();
        for (x, y) in back.spectrum().values().iter().zip(f.spectrum().values()) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300) + 1e-300);
        }
        let again = solve_polynomial(&f, &p).unwrap();
        prop_assert_eq!(u, again);
    }

    #[test]
    fn translation_contracts(a in 0.5f64..2.0, x in 0.0f64..3.0, al in 0.0f64..1.5) {
        let g = grid(&[al], 14.0, 100);
        let rule = ThetaRule::new(g.alpha(), 48).unwrap();
        let f = FunctionSpec::gaussian(a);
        let fs = f.sample(&g).unwrap();
        let tf = translated(&f, &[x], &g, &rule).unwrap();
        for p in [1.0, 2.0, f64::INFINITY] {
            prop_assert!(tf.lp_norm(p).unwrap() <= fs.lp_norm(p).unwrap() + 1e-8, "p = {}", p);
        }
    }

    #[test]
    fn kernel_is_symmetric(al in -0.4f64..3.0, x in 0.1f64..3.0, y in 0.1f64..3.0, u in 0.01f64..0.99) {
        let a = AlphaParams::new(vec![al]).unwrap();
        let z = (x - y).abs() + u * (x + y - (x - y).abs());
        let w = translation_kernel(&a, &[x], &[y], &[z]).unwrap();
        let w2 = translation_kernel(&a, &[y], &[x], &[z]).unwrap();
        let w3 = translation_kernel(&a, &[x], &[z], &[y]).unwrap();
        prop_assert!((w - w2).abs() <= 1e-12 * w);
        prop_assert!((w - w3).abs() <= 1e-10 * w);
    }
}

#[test]
fn kernel_is_nonnegative_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=2);
        let al: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.45..3.0)).collect();
        let a = AlphaParams::new(al).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..4.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..4.0)).collect();
        // Half of the z land inside the support, half anywhere.
        let z: Vec<f64> = (0..n)
            .map(|i| {
                if rng.gen_bool(0.5) {
                    let lo = (x[i] - y[i]).abs();
                    lo + rng.gen_range(0.001..0.999) * (x[i] + y[i] - lo)
                } else {
                    rng.gen_range(0.01..9.0)
                }
            })
            .collect();
        match translation_kernel(&a, &x, &y, &z) {
            Ok(w) => assert!(w >= 0.0, "w = {w}"),
            Err(Error::EndpointSingular { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn duality_bound_on_seeded_mixtures() {
    let g = grid(&[0.0], 14.0, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let t = mixture(&g, &random_mixture(&mut rng));
        let phi = mixture(&g, &random_mixture(&mut rng));
        let s = rng.gen_range(-1.5..1.5);
        let (pair, bound) = duality_pairing(&t, &phi, s).unwrap();
        assert!(pair.abs() <= bound + 1e-10, "{pair} > {bound}");
    }
}

#[test]
fn young_and_commutativity() {
    let g = grid(&[0.0], 10.0, 48);
    let rule = ThetaRule::new(g.alpha(), 48).unwrap();
    let pairs = [(1.0, 1.0), (1.0, 2.0), (0.5, 1.5)];
    for (a, b) in pairs {
        let (fa, fb) = (FunctionSpec::gaussian(a), FunctionSpec::gaussian(b));
        let (sa, sb) = (fa.sample(&g).unwrap(), fb.sample(&g).unwrap());
        let ab = convolve(&sa, &fb, &g, &rule).unwrap();
        let ba = convolve(&sb, &fa, &g, &rule).unwrap();
        for p in [1.0, 2.0] {
            assert!(ab.lp_norm(p).unwrap() <= sa.lp_norm(p).unwrap() * sb.lp_norm(1.0).unwrap() + 1e-8);
        }
        let d = ab.combine(1.0, &ba, -1.0).unwrap().lp_norm(2.0).unwrap();
        assert!(d <= 1e-6, "commutativity defect {d}");
    }
}

#[test]
fn runs_are_bit_identical() {
    let g = grid(&[0.0, 1.0], 10.0, 32);
    let f = FunctionSpec::poly_gaussian(vec![1.0, 2.0], 1.5).sample(&g).unwrap();
    let a = forward(&f, &g).unwrap();
    let b = forward(&f, &g).unwrap();
    assert_eq!(
        a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}
