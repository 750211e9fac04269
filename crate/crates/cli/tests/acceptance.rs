//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use polyaxial::pde::{regularity_report, roundtrip_defect};
use polyaxial::sobolev::{
    bessel_potential, binomial_expansion, dirac_membership, dirac_spectrum, duality_pairing, laplacian_power,
    negative_order_representation, poincare_slope, under_refinement, PoincareGrid,
};
use polyaxial::transform::{eigenrelation_defect, inversion_defect, plancherel_defect};
use polyaxial::translation::{
    convolution_theorem_defect, kernel_mass_defect, product_formula_defect, translate_via_kernel, translated,
};
use polyaxial::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

fn alpha(a: &[f64]) -> AlphaParams {
    AlphaParams::new(a.to_vec()).unwrap()
}

fn grid(a: &[f64], r: f64, n: usize) -> Arc<QuadGrid> {
    let al = alpha(a);
    build_grid(&al, &vec![r; al.dim()], &vec![n; al.dim()]).unwrap()
}

/// 200 nodes in one dimension, 80 per axis in two.
fn reference_grid(a: &[f64]) -> Arc<QuadGrid> {
    grid(a, 14.0, if a.len() == 1 { 200 } else { 80 })
}

fn family() -> [FunctionSpec; 2] {
    [
        FunctionSpec::gaussian(1.0),
        FunctionSpec::poly_gaussian(vec![1.0, 0.5], 1.0),
    ]
}

fn require(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectral(g: &Arc<QuadGrid>, f: &FunctionSpec) -> SpectralDistribution {
    SpectralDistribution::from_function(&f.sample(g).unwrap(), &TransformPlan::new(g, g).unwrap()).unwrap()
}

fn c1() -> Outcome {
    let start = Instant::now();
    let g = grid(&[0.0], 14.0, 200);
    let f = FunctionSpec::gaussian(1.0).sample(&g).unwrap();
    let spec = transform::forward(&f, &g).unwrap();
    let mut worst = 0.0f64;
    for (k, &v) in spec.values().iter().enumerate() {
        let l = g.point(k)[0];
        if l <= 5.0 {
            let want = (-0.5 * l * l).exp();
            worst = worst.max((v - want).abs() / want);
        }
    }
    let t = start.elapsed();
    require(
        worst <= 1e-8 && t < Duration::from_secs(1),
        format!("max relative error {worst:.2e}, {:.0} ms", t.as_secs_f64() * 1e3),
    )
}

fn inversion_family(defect: fn(&SampledFunction, &Arc<QuadGrid>) -> Result<f64>) -> (f64, bool) {
    let mut worst = 0.0f64;
    for a in [&[0.0][..], &[0.5], &[0.0, 1.0]] {
        let g = reference_grid(a);
        for f in family() {
            worst = worst.max(defect(&f.sample(&g).unwrap(), &g).unwrap());
        }
    }
    (worst, worst <= 1e-6)
}

fn c2() -> Outcome {
    let (w, ok) = inversion_family(inversion_defect);
    require(ok, format!("worst round-trip error {w:.2e}"))
}

fn c3() -> Outcome {
    let (w, ok) = inversion_family(plancherel_defect);
    require(ok, format!("worst Plancherel defect {w:.2e}"))
}

fn c4() -> Outcome {
    let mut worst = 0.0f64;
    for a in [&[0.0][..], &[0.5], &[0.0, 1.0]] {
        let g = reference_grid(a);
        let plan = TransformPlan::new(&g, &g).unwrap();
        for f in family() {
            worst = worst.max(eigenrelation_defect(&f, &plan, 1e-3).unwrap());
        }
    }
    require(worst <= 1e-4, format!("worst spectral defect {worst:.2e}"))
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut min_w = f64::INFINITY;
    for _ in 0..1000 {
        let a = alpha(&[rng.gen_range(-0.45..3.0)]);
        let (x, y) = (rng.gen_range(0.05..4.0), rng.gen_range(0.05..4.0));
        let lo = f64::abs(x - y);
        let z = lo + rng.gen_range(0.001..0.999) * (x + y - lo);
        min_w = min_w.min(translation_kernel(&a, &[x], &[y], &[z]).unwrap());
    }
    let pairs = [(1.0, 2.0), (1.0, 1.0), (0.5, 2.0), (2.2, 0.3)];
    let (mut mass, mut theta, mut product) = (0.0f64, 0.0f64, 0.0f64);
    let f = FunctionSpec::gaussian(1.0);
    for a in [0.0, 0.5, 1.5] {
        let al = alpha(&[a]);
        let rule = ThetaRule::new(&al, 64).unwrap();
        for &(x, y) in &pairs {
            mass = mass.max(kernel_mass_defect(&al, &[x], &[y], &rule).unwrap());
            let d = translate(&f, &[y], &[x], &rule).unwrap() - translate_via_kernel(&f, &[y], &[x], &rule).unwrap();
            theta = theta.max(d.abs());
            product = product.max(product_formula_defect(&[1.7], &[x], &[y], &rule).unwrap());
        }
    }
    require(
        min_w >= 0.0 && mass <= 1e-10 && theta <= 1e-6 && product <= 1e-8,
        format!("min w {min_w:.2e}, mass {mass:.2e}, theta/kernel {theta:.2e}, product {product:.2e}"),
    )
}

fn c6() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for a in [0.0, 0.5] {
        let g = grid(&[a], 14.0, 160);
        let rule = ThetaRule::new(g.alpha(), 64).unwrap();
        for scale in [0.5, 1.0, 2.0] {
            let f = FunctionSpec::gaussian(scale);
            let fs = f.sample(&g).unwrap();
            for x in [0.5, 1.5, 2.5] {
                let tf = translated(&f, &[x], &g, &rule).unwrap();
                for p in [1.0, 2.0] {
                    worst = worst.max(tf.lp_norm(p).unwrap() - fs.lp_norm(p).unwrap());
                }
            }
            let h = FunctionSpec::gaussian(1.0);
            let conv = convolve(&fs, &h, &g, &rule).unwrap();
            let l1 = h.sample(&g).unwrap().lp_norm(1.0).unwrap();
            for p in [1.0, 2.0] {
                worst = worst.max(conv.lp_norm(p).unwrap() - fs.lp_norm(p).unwrap() * l1);
            }
        }
    }
    require(worst <= 1e-8, format!("largest violation {worst:.2e}"))
}

fn c7() -> Outcome {
    let g = grid(&[0.0], 14.0, 160);
    let rule = ThetaRule::new(g.alpha(), 64).unwrap();
    let h = FunctionSpec::gaussian(1.0);
    let thm = convolution_theorem_defect(&h, &h, &g, &g, &rule).unwrap();
    let conv = convolve(&h.sample(&g).unwrap(), &h, &g, &rule).unwrap();
    let want = SampledFunction::from_fn(g.clone(), |x| 0.5 * (-0.25 * x[0] * x[0]).exp()).unwrap();
    let selfc = conv.combine(1.0, &want, -1.0).unwrap().lp_norm(f64::INFINITY).unwrap();
    require(
        thm <= 1e-5 && selfc <= 1e-5,
        format!("theorem defect {thm:.2e}, self-convolution error {selfc:.2e}"),
    )
}

fn c8() -> Outcome {
    let g = reference_grid(&[0.5]);
    let t = spectral(&g, &FunctionSpec::poly_gaussian(vec![1.0, 0.5], 1.0));
    let mut binom = 0.0f64;
    for m in [1u32, 2] {
        let a = binomial_expansion(&t, m).unwrap();
        let b = bessel_potential(&t, m as f64).unwrap();
        let scale = b.spectrum().lp_norm(f64::INFINITY).unwrap();
        for (x, y) in a.spectrum().values().iter().zip(b.spectrum().values()) {
            binom = binom.max((x - y).abs() / scale);
        }
    }
    let mut monotone = true;
    let mut lowering = f64::NEG_INFINITY;
    for p in [1.0, 2.0, 3.0] {
        let norms: Vec<f64> = (-4..=4)
            .map(|i| sobolev_norm(&t, SobolevIndex::new(0.5 * i as f64, p).unwrap()).unwrap())
            .collect();
        monotone &= norms.windows(2).all(|w| w[0] <= w[1]);
        for s in [-1.0, 0.0, 1.0, 2.0] {
            let lhs = sobolev_norm(&laplacian_power(&t, 1).unwrap(), SobolevIndex::new(s - 1.0, p).unwrap()).unwrap();
            lowering = lowering.max(lhs - sobolev_norm(&t, SobolevIndex::new(s, p).unwrap()).unwrap());
        }
    }
    require(
        binom <= 1e-12 && monotone && lowering <= 1e-10,
        format!("binomial {binom:.2e}, monotone {monotone}, lowering excess {lowering:.2e}"),
    )
}

fn mixture(g: &Arc<QuadGrid>, rng: &mut ChaCha8Rng) -> SpectralDistribution {
    let k = rng.gen_range(1..=4);
    let terms: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)))
        .collect();
    SpectralDistribution::from_spectrum(g, &move |xi: &[f64]| {
        let t: f64 = xi.iter().map(|v| v * v).sum();
        terms.iter().map(|&(c, a)| c * (-a * t).exp()).sum::<f64>()
    })
    .unwrap()
}

fn c9() -> Outcome {
    let g = reference_grid(&[0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let t = mixture(&g, &mut rng);
        let phi = mixture(&g, &mut rng);
        let s = rng.gen_range(-1.5..1.5);
        let (pair, bound) = duality_pairing(&t, &phi, s).unwrap();
        worst = worst.max(pair.abs() - bound);
    }
    let phi = mixture(&g, &mut rng);
    let mut extremal = 0.0f64;
    for s in [-1.0, 0.5, 1.0] {
        let t = bessel_potential(&phi, 2.0 * s).unwrap();
        let (pair, bound) = duality_pairing(&t, &phi, s).unwrap();
        extremal = extremal.max((pair.abs() - bound).abs() / bound);
    }
    require(
        worst <= 1e-10 && extremal <= 1e-8,
        format!("largest excess {worst:.2e}, extremal gap {extremal:.2e}"),
    )
}

fn c10() -> Outcome {
    let mut worst = 0.0f64;
    for a in [&[0.0][..], &[0.5], &[0.0, 1.0]] {
        let g = reference_grid(a);
        let plan = TransformPlan::new(&g, &g).unwrap();
        for f in family() {
            let fs = f.sample(&g).unwrap();
            let l2 = fs.lp_norm(2.0).unwrap();
            for m in 0..=2u32 {
                let t = negative_order_representation(&fs, m, &plan).unwrap();
                let n = sobolev_norm(&t, SobolevIndex::hilbert(-(m as f64)).unwrap()).unwrap();
                worst = worst.max((n - l2).abs());
            }
        }
    }
    require(worst <= 1e-8, format!("worst deviation {worst:.2e}"))
}

fn c11() -> Outcome {
    let start = Instant::now();
    let a = alpha(&[0.0]);
    let mut detail = Vec::new();
    let mut ok = true;
    for (s, t) in [(1.0, 0.0), (1.0, 0.5), (2.0, 1.0)] {
        let k = poincare_slope(&a, 8.0, s, t, &[0.5, 0.25, 0.125], PoincareGrid::default()).unwrap();
        ok &= (k - 2.0 * (s - t)).abs() <= 0.15;
        detail.push(format!("({s},{t}) {k:.3}"));
    }
    let el = start.elapsed();
    ok &= el < Duration::from_secs(60);
    require(ok, format!("slopes {}, {:.1} s", detail.join(", "), el.as_secs_f64()))
}

fn c12() -> Outcome {
    let mut roundtrip = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for a in [&[0.0][..], &[0.5]] {
        let g = reference_grid(a);
        for f in family() {
            let fh = spectral(&g, &f);
            for k in [1.0, 2.0] {
                let p = EvenPolynomial::helmholtz(k).unwrap();
                roundtrip = roundtrip.max(roundtrip_defect(&fh, &p).unwrap());
                let u = solve_helmholtz(&fh, k).unwrap();
                for s in [0.0, 1.0] {
                    let rep = regularity_report(&fh, &u, &p, s, 1.0).unwrap();
                    excess = excess.max(rep.u_norm - rep.bound * rep.f_norm);
                }
            }
        }
    }
    require(
        roundtrip <= 1e-12 && excess <= 1e-8,
        format!("round-trip {roundtrip:.2e}, largest norm excess {excess:.2e}"),
    )
}

fn c13() -> Outcome {
    let a = alpha(&[0.0]);
    let g = grid(&[0.0], 40.0, 200);
    let d = dirac_spectrum(&a, &[1.0]).unwrap();
    let pairs = [
        (-2.0, 1.0),
        (0.0, 1.0),
        (-1.0, 2.0),
        (0.0, 2.0),
        (-1.5, 1.5),
        (0.5, 2.0),
    ];
    let mut agree = 0;
    let mut rows = Vec::new();
    for (s, p) in pairs {
        let idx = SobolevIndex::new(s, p).unwrap();
        let stable = under_refinement(&d, &g, |t| sobolev_norm(t, idx)).unwrap().is_stable();
        let pred = dirac_membership(s, p, &a);
        if stable == pred {
            agree += 1;
        }
        rows.push(format!("({s},{p}) {}", if pred { "in" } else { "out" }));
    }
    require(
        agree == pairs.len(),
        format!("{agree}/{} agree: {}", pairs.len(), rows.join(", ")),
    )
}

fn c14() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/reference.json");
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_polyaxial"))
        .args(["verify", "--suite", "all", "--config", config, "--out"])
        .arg(&out)
        .status()
        .unwrap();
    let el = start.elapsed();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let records: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap_or_default();
    let with_ref = records
        .iter()
        .filter(|r| r["paper_ref"].as_str().is_some_and(|s| !s.is_empty()))
        .count();
    require(
        status.code() == Some(0) && records.len() >= 25 && with_ref == records.len() && el < Duration::from_secs(300),
        format!(
            "exit {:?}, {} records ({with_ref} with paper_ref), {:.1} s",
            status.code(),
            records.len(),
            el.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("gaussian transform pair", c1),
        ("inversion", c2),
        ("plancherel", c3),
        ("eigenrelation", c4),
        ("translation kernel", c5),
        ("contraction and young", c6),
        ("convolution theorem and self-convolution", c7),
        ("sobolev characterization", c8),
        ("duality", c9),
        ("representation", c10),
        ("poincare slope", c11),
        ("helmholtz", c12),
        ("dirac predicate", c13),
        ("verify --suite all", c14),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
