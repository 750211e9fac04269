//! The verification suites. Each check is a pure function of the context and
//! yields one or more records; checks run in parallel and the report is
//! ordered by `check_id`.

use std::sync::Arc;

use log::error;
use polyaxial::pde::{apply_polynomial, regularity_report, roundtrip_defect, solve_helmholtz, solve_polynomial};
use polyaxial::sobolev::{
    bessel_potential, binomial_expansion, continuity_embedding_check, dirac_membership, dirac_spectrum,
    duality_pairing, homogeneous_seminorm, hs_inner_product, laplacian_power, negative_order_representation,
    poincare_slope, polynomial_regularity_check, schwartz_multiply_bound, under_refinement, PoincareGrid,
};
use polyaxial::transform::{
    dual_pairing_defect, eigenrelation_defect, inversion_defect, plancherel_defect, TRUNCATION_TOL,
};
use polyaxial::translation::{
    convolution_theorem_defect, kernel_mass_defect, product_formula_defect, product_transform_defect,
    translate_via_kernel, translated,
};
use polyaxial::{
    bessel_ode_residual, convolve, normalized_bessel, translate, translation_kernel, AlphaParams, BesselOrder,
    EvenPolynomial, FunctionSpec, QuadGrid, Result, SampledFunction, SobolevIndex, SpectralDistribution, ThetaRule,
    TransformPlan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, MAX_SUITE_DIM};
use crate::failure::{is_numerical, Failure};
use crate::oracle::{self, OracleTable};
use crate::report::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Bessel,
    Transform,
    Translation,
    Sobolev,
    Pde,
    All,
}

/// Shared, immutable inputs of every check.
pub struct Ctx {
    pub cfg: RunConfig,
    pub alpha: AlphaParams,
    pub phys: Arc<QuadGrid>,
    pub freq: Arc<QuadGrid>,
    pub conv: Arc<QuadGrid>,
    pub conv_freq: Arc<QuadGrid>,
    pub dirac: Arc<QuadGrid>,
    pub rule: ThetaRule,
    pub conv_rule: ThetaRule,
    pub oracle: Option<OracleTable>,
}

impl Ctx {
    pub fn new(cfg: RunConfig, oracle: Option<OracleTable>) -> std::result::Result<Self, Failure> {
        let alpha = cfg.alpha();
        let n = alpha.dim();
        if n > MAX_SUITE_DIM {
            return Err(Failure::Config(format!(
                "alpha: verify supports dimension at most {MAX_SUITE_DIM}, got {n}"
            )));
        }
        // Direct convolution costs N^{2n} M^n; keep the angular rule small in 2-D.
        let conv_nodes = if n == 1 {
            cfg.theta_nodes
        } else {
            cfg.theta_nodes.min(24)
        };
        Ok(Self {
            phys: cfg.phys_grid()?,
            freq: cfg.freq_grid()?,
            conv: cfg.convolution_grid()?,
            conv_freq: cfg.convolution_freq_grid()?,
            dirac: cfg.dirac_grid()?,
            rule: cfg.theta_rule()?,
            conv_rule: ThetaRule::new(&alpha, conv_nodes)?,
            alpha,
            cfg,
            oracle,
        })
    }

    fn ones(&self, v: f64) -> Vec<f64> {
        vec![v; self.alpha.dim()]
    }

    fn plan(&self) -> Result<TransformPlan> {
        TransformPlan::new(&self.phys, &self.freq)
    }

    /// `F f` of the configured function, reference resolution.
    fn config_spectrum(&self) -> Result<SpectralDistribution> {
        SpectralDistribution::from_function(&self.cfg.function.sample(&self.phys)?, &self.plan()?)
    }

    fn gaussian_spectrum(&self, grid: &Arc<QuadGrid>) -> Result<SpectralDistribution> {
        let t = FunctionSpec::gaussian(1.0)
            .exact_transform(&self.alpha)
            .expect("closed form");
        SpectralDistribution::from_spectrum(grid, &t)
    }
}

type CheckFn = fn(&Ctx, &str, &str) -> Result<Vec<Record>>;

struct Check {
    id: &'static str,
    paper_ref: &'static str,
    run: CheckFn,
}

pub struct Outcome {
    pub records: Vec<Record>,
    /// Some check hit overflow or a non-finite value.
    pub numerical: bool,
}

pub fn run(ctx: &Ctx, suite: Suite) -> Outcome {
    let checks: Vec<Check> = match suite {
        Suite::Bessel => bessel_checks(),
        Suite::Transform => transform_checks(),
        Suite::Translation => translation_checks(),
        Suite::Sobolev => sobolev_checks(),
        Suite::Pde => pde_checks(),
        Suite::All => [
            bessel_checks(),
            transform_checks(),
            translation_checks(),
            sobolev_checks(),
            pde_checks(),
        ]
        .into_iter()
        .flatten()
        .collect(),
    };
    let results: Vec<(Vec<Record>, bool)> = checks
        .par_iter()
        .map(|c| match (c.run)(ctx, c.id, c.paper_ref) {
            Ok(r) => (r, false),
            Err(e) => {
                error!("{}: {e}", c.id);
                (vec![Record::failed(c.id, c.paper_ref)], is_numerical(&e))
            }
        })
        .collect();
    let numerical = results.iter().any(|r| r.1);
    let mut records: Vec<Record> = results.into_iter().flat_map(|r| r.0).collect();
    records.sort_by(|a, b| a.check_id.cmp(&b.check_id));
    Outcome { records, numerical }
}

fn one(r: Record) -> Result<Vec<Record>> {
    Ok(vec![r])
}

fn j(g: f64, x: f64) -> Result<f64> {
    normalized_bessel(BesselOrder::new(g)?, x)
}

// ---------------------------------------------------------------- bessel

fn bessel_checks() -> Vec<Check> {
    vec![
        Check {
            id: "bessel.oracle_table",
            paper_ref: "j_g(x) = Gamma(g+1) (2/x)^g J_g(x) against 50-digit reference values",
            run: bessel_oracle,
        },
        Check {
            id: "bessel.closed_forms",
            paper_ref: "j_{-1/2}(x) = cos x, j_{1/2}(x) = sin x / x",
            run: bessel_closed_forms,
        },
        Check {
            id: "bessel.ode_residual",
            paper_ref: "j_g'' + (2g+1)/x j_g' + j_g = 0, j_g(0) = 1",
            run: bessel_ode,
        },
        Check {
            id: "bessel.unit_bound",
            paper_ref: "|j_g(x)| <= 1 = j_g(0) for g > -1/2",
            run: bessel_bound,
        },
    ]
}

fn bessel_oracle(_: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let worst = oracle::bessel_table_error()?;
    one(Record::at_most(id, r, worst, 0.0, 1e-10))
}

fn bessel_closed_forms(_: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut worst = 0.0f64;
    for k in 1..=400 {
        let x = 0.137 * k as f64;
        worst = worst.max((j(-0.5, x)? - x.cos()).abs());
        worst = worst.max((j(0.5, x)? - x.sin() / x).abs());
    }
    one(Record::at_most(id, r, worst, 0.0, 1e-13))
}

fn bessel_ode(_: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut worst = 0.0f64;
    for g in [-0.5, 0.0, 0.5, 1.0, 2.5, 10.0] {
        for k in 1..=60 {
            let x = 0.5 * k as f64;
            worst = worst.max(bessel_ode_residual(BesselOrder::new(g)?, x, 1e-3)?);
        }
    }
    let at_zero = (j(3.0, 0.0)? - 1.0).abs();
    one(Record::at_most(id, r, worst.max(at_zero), 0.0, 1e-5))
}

fn bessel_bound(_: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut worst = 0.0f64;
    for g in [-0.4, 0.0, 0.3, 1.0, 4.0, 20.0] {
        for k in 0..=500 {
            worst = worst.max(j(g, 0.2 * k as f64)?.abs());
        }
    }
    one(Record::at_most(id, r, worst, 1.0, 0.0))
}

// ------------------------------------------------------------- transform

const PAIR_REF: &str =
    "F_a exp(-||x||^2/2) = c_a^{-1} exp(-||l||^2/2), F_a f(l) = int f(x) prod j_{a_i}(l_i x_i) d mu_a(x)";
const INVERSION_REF: &str = "f = c_a^2 F_a F_a f";
const PLANCHEREL_REF: &str = "||f||_{L^2_a} = c_a ||F_a f||_{L^2_a}";

fn transform_checks() -> Vec<Check> {
    vec![
        Check {
            id: "transform.exact_pair",
            paper_ref: PAIR_REF,
            run: transform_exact_pairs,
        },
        Check {
            id: "transform.inversion",
            paper_ref: INVERSION_REF,
            run: transform_inversion,
        },
        Check {
            id: "transform.plancherel",
            paper_ref: PLANCHEREL_REF,
            run: transform_plancherel,
        },
        Check {
            id: "transform.sup_bound",
            paper_ref: "||F_a f||_inf <= ||f||_{L^1_a}",
            run: transform_sup_bound,
        },
        Check {
            id: "transform.eigenrelation",
            paper_ref: "F_a(D_a f)(l) = -||l||^2 F_a f(l)",
            run: transform_eigenrelation,
        },
        Check {
            id: "transform.dual_pairing",
            paper_ref: "int f F_a g d mu_a = int g F_a f d mu_a",
            run: transform_dual_pairing,
        },
        Check {
            id: "transform.truncation",
            paper_ref: "|f| at the outer nodes negligible relative to max |f|",
            run: transform_truncation,
        },
        Check {
            id: "transform.oracle",
            paper_ref: "reference resolution agrees with the 4x-refined expectation table",
            run: transform_oracle,
        },
    ]
}

fn family() -> [(&'static str, FunctionSpec); 2] {
    [
        ("gaussian", FunctionSpec::gaussian(1.0)),
        ("poly_gaussian", FunctionSpec::poly_gaussian(vec![1.0, 0.5], 1.0)),
    ]
}

/// Family members plus the configured function when it differs.
fn family_with_config(ctx: &Ctx) -> Vec<(String, FunctionSpec)> {
    let mut v: Vec<(String, FunctionSpec)> = family().into_iter().map(|(n, f)| (n.to_string(), f)).collect();
    if !v.iter().any(|(_, f)| *f == ctx.cfg.function) {
        v.push(("config".into(), ctx.cfg.function.clone()));
    }
    v
}

fn transform_exact_pairs(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let plan = ctx.plan()?;
    let mut out = Vec::new();
    for (name, spec) in family() {
        let exact = spec.exact_transform(&ctx.alpha).expect("closed form");
        let got = plan.forward(&spec.sample(&ctx.phys)?)?;
        let mut p = vec![0.0; ctx.alpha.dim()];
        let mut peak = 0.0f64;
        let mut rows = Vec::new();
        for (k, &v) in got.values().iter().enumerate() {
            ctx.freq.fill_point(k, &mut p);
            if p.iter().map(|x| x * x).sum::<f64>() <= 25.0 {
                let e = exact.evaluate(&p);
                peak = peak.max(e.abs());
                rows.push((v, e));
            }
        }
        let worst = rows
            .iter()
            .map(|&(v, e)| (v - e).abs() / e.abs().max(1e-6 * peak))
            .fold(0.0f64, f64::max);
        out.push(Record::at_most(
            format!("{id}.{name}"),
            r,
            worst,
            0.0,
            ctx.cfg.tolerances.exact_pair,
        ));
    }
    Ok(out)
}

fn transform_inversion(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    family_with_config(ctx)
        .into_iter()
        .map(|(name, spec)| {
            let d = inversion_defect(&spec.sample(&ctx.phys)?, &ctx.freq)?;
            Ok(Record::at_most(
                format!("{id}.{name}"),
                r,
                d,
                0.0,
                ctx.cfg.tolerances.inversion,
            ))
        })
        .collect()
}

fn transform_plancherel(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    family_with_config(ctx)
        .into_iter()
        .map(|(name, spec)| {
            let d = plancherel_defect(&spec.sample(&ctx.phys)?, &ctx.freq)?;
            Ok(Record::at_most(
                format!("{id}.{name}"),
                r,
                d,
                0.0,
                ctx.cfg.tolerances.plancherel,
            ))
        })
        .collect()
}

fn transform_sup_bound(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.cfg.function.sample(&ctx.phys)?;
    let sup = ctx.plan()?.forward(&f)?.lp_norm(f64::INFINITY)?;
    let l1 = f.lp_norm(1.0)?;
    one(Record::at_most(id, r, sup, l1, 1e-12 * l1))
}

fn transform_eigenrelation(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let plan = ctx.plan()?;
    family()
        .into_iter()
        .map(|(name, spec)| {
            let d = eigenrelation_defect(&spec, &plan, 1e-3)?;
            Ok(Record::at_most(
                format!("{id}.{name}"),
                r,
                d,
                0.0,
                ctx.cfg.tolerances.eigenrelation,
            ))
        })
        .collect()
}

fn transform_dual_pairing(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let [(_, f), (_, g)] = family();
    let d = dual_pairing_defect(&f.sample(&ctx.phys)?, &g.sample(&ctx.phys)?)?;
    one(Record::at_most(id, r, d, 0.0, 1e-10))
}

fn transform_truncation(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let b = ctx.cfg.function.sample(&ctx.phys)?.boundary_ratio();
    one(Record::at_most(id, r, b, 0.0, TRUNCATION_TOL))
}

fn transform_oracle(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    match &ctx.oracle {
        Some(table) if table.matches(&ctx.cfg) => oracle::compare(table, ctx, id, r),
        _ => Ok(Vec::new()),
    }
}

// ----------------------------------------------------------- translation

fn translation_checks() -> Vec<Check> {
    vec![
        Check {
            id: "translation.kernel_positivity",
            paper_ref: "w_a(x, y, z) >= 0",
            run: kernel_positivity,
        },
        Check {
            id: "translation.kernel_mass",
            paper_ref: "int w_a(x, y, z) d mu_a(z) = 1",
            run: kernel_mass,
        },
        Check {
            id: "translation.kernel_support",
            paper_ref: "supp w_a(x, y, .) in prod [|x_i - y_i|, x_i + y_i]; w_a(x, y, z) = w_a(y, x, z)",
            run: kernel_support,
        },
        Check {
            id: "translation.theta_vs_kernel",
            paper_ref:
                "T_y f(x) = c'_a int f(X(theta)) prod sin^{2a_i} theta_i d theta = int f(z) w_a(x, y, z) d mu_a(z)",
            run: theta_vs_kernel,
        },
        Check {
            id: "translation.product_formula",
            paper_ref: "T_y j_a(l .)(x) = j_a(l x) j_a(l y)",
            run: product_formula,
        },
        Check {
            id: "translation.contraction",
            paper_ref: "||T_x f||_{L^p_a} <= ||f||_{L^p_a}",
            run: contraction,
        },
        Check {
            id: "translation.young",
            paper_ref: "||f *_a g||_{L^p_a} <= ||f||_{L^p_a} ||g||_{L^1_a}",
            run: young,
        },
        Check {
            id: "translation.commutativity",
            paper_ref: "f *_a g = g *_a f",
            run: commutativity,
        },
        Check {
            id: "translation.self_convolution",
            paper_ref: "e^{-||.||^2/2} *_a e^{-||.||^2/2} (x) = 2^{-(|a|+n)} c_a^{-1} e^{-||x||^2/4}",
            run: self_convolution,
        },
        Check {
            id: "translation.convolution_theorem",
            paper_ref: "F_a(f *_a g) = F_a f . F_a g",
            run: convolution_theorem,
        },
        Check {
            id: "translation.product_transform",
            paper_ref: "F_a(f g) = c_a^2 F_a f *_a F_a g",
            run: product_transform,
        },
    ]
}

fn shift_pairs(ctx: &Ctx) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = ctx.alpha.dim();
    let base = [(1.0, 2.0), (1.0, 1.0), (0.5, 2.0), (2.2, 0.3)];
    base.iter()
        .map(|&(x, y)| (vec![x; n], vec![y; n]))
        .chain(std::iter::once((
            (0..n).map(|i| 1.0 + 0.3 * i as f64).collect(),
            (0..n).map(|i| 0.5 + 1.5 * i as f64).collect(),
        )))
        .collect()
}

fn kernel_positivity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let n = ctx.alpha.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut min = f64::INFINITY;
    for _ in 0..1000 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..4.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..4.0)).collect();
        let z: Vec<f64> = (0..n)
            .map(|i| {
                let lo = (x[i] - y[i]).abs();
                lo + rng.gen_range(0.001..0.999) * (x[i] + y[i] - lo)
            })
            .collect();
        min = min.min(translation_kernel(&ctx.alpha, &x, &y, &z)?);
    }
    // Recorded as 0 <= min w.
    one(Record::at_most(id, r, 0.0, min, 0.0))
}

fn kernel_mass(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut worst = 0.0f64;
    for (x, y) in shift_pairs(ctx) {
        worst = worst.max(kernel_mass_defect(&ctx.alpha, &x, &y, &ctx.rule)?);
    }
    one(Record::at_most(id, r, worst, 0.0, ctx.cfg.tolerances.kernel_mass))
}

fn kernel_support(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let n = ctx.alpha.dim();
    let (x, y) = (vec![1.0; n], vec![0.6; n]);
    let mut outside = vec![1.0; n];
    outside[0] = 1.7;
    let off = translation_kernel(&ctx.alpha, &x, &y, &outside)?;
    let z = vec![0.9; n];
    let w = translation_kernel(&ctx.alpha, &x, &y, &z)?;
    let sym = (w - translation_kernel(&ctx.alpha, &y, &x, &z)?).abs();
    Ok(vec![
        Record::close(format!("{id}.outside"), r, off, 0.0, 0.0),
        Record::at_most(format!("{id}.symmetry"), r, sym, 0.0, 1e-14 * w),
    ])
}

fn theta_vs_kernel(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = FunctionSpec::gaussian(1.0);
    let mut worst = 0.0f64;
    for (x, y) in shift_pairs(ctx) {
        let a = translate(&f, &y, &x, &ctx.rule)?;
        let b = translate_via_kernel(&f, &y, &x, &ctx.rule)?;
        worst = worst.max((a - b).abs());
    }
    one(Record::at_most(id, r, worst, 0.0, ctx.cfg.tolerances.theta_vs_kernel))
}

fn product_formula(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut worst = 0.0f64;
    for l in [0.7, 1.7, 3.1] {
        for (x, y) in shift_pairs(ctx) {
            worst = worst.max(product_formula_defect(&ctx.ones(l), &x, &y, &ctx.rule)?);
        }
    }
    one(Record::at_most(id, r, worst, 0.0, ctx.cfg.tolerances.product_formula))
}

fn contraction(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = FunctionSpec::gaussian(1.0);
    let fs = f.sample(&ctx.conv)?;
    let shifts = [0.5, 1.5, 2.5];
    let translates = shifts
        .iter()
        .map(|&x| translated(&f, &ctx.ones(x), &ctx.conv, &ctx.conv_rule))
        .collect::<Result<Vec<_>>>()?;
    [(1.0, "p1"), (2.0, "p2"), (f64::INFINITY, "pinf")]
        .into_iter()
        .map(|(p, name)| {
            let base = fs.lp_norm(p)?;
            let mut worst = f64::NEG_INFINITY;
            for t in &translates {
                worst = worst.max(t.lp_norm(p)? - base);
            }
            Ok(Record::at_most(
                format!("{id}.{name}"),
                r,
                worst,
                0.0,
                ctx.cfg.tolerances.contraction,
            ))
        })
        .collect()
}

fn young(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let (f, g) = (FunctionSpec::gaussian(1.0), FunctionSpec::gaussian(2.0));
    let fs = f.sample(&ctx.conv)?;
    let gs = g.sample(&ctx.conv)?;
    let c = convolve(&fs, &g, &ctx.conv, &ctx.conv_rule)?;
    [(1.0, "p1"), (2.0, "p2")]
        .into_iter()
        .map(|(p, name)| {
            let lhs = c.lp_norm(p)?;
            let rhs = fs.lp_norm(p)? * gs.lp_norm(1.0)?;
            Ok(Record::at_most(
                format!("{id}.{name}"),
                r,
                lhs,
                rhs,
                ctx.cfg.tolerances.young,
            ))
        })
        .collect()
}

fn commutativity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let (f, g) = (FunctionSpec::gaussian(1.0), FunctionSpec::gaussian(2.0));
    let fg = convolve(&f.sample(&ctx.conv)?, &g, &ctx.conv, &ctx.conv_rule)?;
    let gf = convolve(&g.sample(&ctx.conv)?, &f, &ctx.conv, &ctx.conv_rule)?;
    let d = fg.combine(1.0, &gf, -1.0)?.lp_norm(2.0)?;
    one(Record::at_most(id, r, d, 0.0, ctx.cfg.tolerances.commutativity))
}

fn self_convolution(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let g = FunctionSpec::gaussian(1.0);
    let c = convolve(&g.sample(&ctx.conv)?, &g, &ctx.conv, &ctx.conv_rule)?;
    let n = ctx.alpha.dim() as f64;
    let peak = 2f64.powf(-(ctx.alpha.abs() + n)) / ctx.alpha.c_alpha();
    let want = SampledFunction::from_fn(ctx.conv.clone(), |x| {
        peak * (-0.25 * x.iter().map(|v| v * v).sum::<f64>()).exp()
    })?;
    let worst = c.combine(1.0, &want, -1.0)?.lp_norm(f64::INFINITY)? / peak;
    one(Record::at_most(id, r, worst, 0.0, ctx.cfg.tolerances.convolution))
}

fn convolution_theorem(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let g = FunctionSpec::gaussian(1.0);
    let d = convolution_theorem_defect(&g, &g, &ctx.conv, &ctx.conv_freq, &ctx.conv_rule)?;
    one(Record::at_most(id, r, d, 0.0, ctx.cfg.tolerances.convolution))
}

fn product_transform(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let (f, g) = (FunctionSpec::gaussian(1.0), FunctionSpec::gaussian(2.0));
    let d = product_transform_defect(&f, &g, &ctx.conv, &ctx.conv_freq, &ctx.conv_rule)?;
    one(Record::at_most(id, r, d, 0.0, ctx.cfg.tolerances.product_rule))
}

// --------------------------------------------------------------- sobolev

fn sobolev_checks() -> Vec<Check> {
    vec![
        Check {
            id: "sobolev.l2_identity",
            paper_ref: "E^{0,2}_a = L^2_a with equal norms",
            run: l2_identity,
        },
        Check {
            id: "sobolev.monotonicity",
            paper_ref: "||T||_{E^{s,p}} <= ||T||_{E^{t,p}} for s <= t",
            run: monotonicity,
        },
        Check {
            id: "sobolev.binomial",
            paper_ref:
                "(1 + ||xi||^2)^m F T = sum_j C(m, j) ||xi||^{2j} F T, i.e. (1 - D_a)^m = sum_j C(m, j) (-D_a)^j",
            run: binomial,
        },
        Check {
            id: "sobolev.laplacian_lowering",
            paper_ref: "||(-D_a) T||_{E^{s-1,p}} <= ||T||_{E^{s,p}}",
            run: laplacian_lowering,
        },
        Check {
            id: "sobolev.inner_product",
            paper_ref: "<T, T>_{H^s}^{1/2} = ||T||_{H^s}",
            run: inner_product,
        },
        Check {
            id: "sobolev.duality_bound",
            paper_ref: "|<T, phi>| <= ||phi||_{H^s} ||T||_{H^{-s}}",
            run: duality_bound,
        },
        Check {
            id: "sobolev.duality_extremal",
            paper_ref: "equality in |<T, phi>| <= ||phi||_{H^s} ||T||_{H^{-s}} for F T = (1 + ||xi||^2)^{2s} F phi",
            run: duality_extremal,
        },
        Check {
            id: "sobolev.representation",
            paper_ref: "T = (1 - D_a)^m g with ||T||_{H^{-m}} = ||g||_{L^2_a}",
            run: representation,
        },
        Check {
            id: "sobolev.seminorm_band",
            paper_ref: "0 < ||T||_{homogeneous H^s} <= ||T||_{H^s} for compactly supported T",
            run: seminorm_band,
        },
        Check {
            id: "sobolev.multiplication_bound",
            paper_ref: "||phi T||_{E^{s,p}} <= 2^{|s|} c_a ||T||_{E^{s,p}} ||(1 + ||x||^2)^{|s|} F phi||_{L^1_a}",
            run: multiplication_bound,
        },
        Check {
            id: "sobolev.embedding",
            paper_ref: "E^{s,p} embeds in C^m when s > (|a| + n)/2 + m",
            run: embedding,
        },
        Check {
            id: "sobolev.polynomial_regularity",
            paper_ref: "P(-D_a) g in E^{s,2} with P of degree 2m implies g in E^{s+m,2}",
            run: polynomial_regularity,
        },
        Check {
            id: "sobolev.poincare",
            paper_ref: "||T||_{H^t} <= C eps^{2(s-t)} ||T||_{H^s} for supp T in an eps-box",
            run: poincare,
        },
        Check {
            id: "sobolev.dirac",
            paper_ref: "delta_x in E^{s,p} iff 2sp + (2 - p)(|a| + n/2) < -n",
            run: dirac,
        },
    ]
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn l2_identity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.cfg.function.sample(&ctx.phys)?;
    let t = ctx.config_spectrum()?;
    let lhs = sobolev_norm(&t, 0.0, 2.0)?;
    let rhs = f.lp_norm(2.0)?;
    one(Record::close(id, r, lhs, rhs, ctx.cfg.tolerances.plancherel * rhs))
}

fn sobolev_norm(t: &SpectralDistribution, s: f64, p: f64) -> Result<f64> {
    polyaxial::sobolev_norm(t, SobolevIndex::new(s, p)?)
}

fn monotonicity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let t = ctx.config_spectrum()?;
    let mut s_list = ctx.cfg.s_list.clone();
    s_list.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    for p in [1.0, 2.0] {
        let norms = s_list
            .iter()
            .map(|&s| sobolev_norm(&t, s, p))
            .collect::<Result<Vec<_>>>()?;
        let worst = norms.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
        let worst = if worst.is_finite() { worst } else { 0.0 };
        out.push(Record::at_most(format!("{id}.p{}", fmt(p)), r, worst, 0.0, 0.0));
    }
    Ok(out)
}

fn binomial(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let t = ctx.config_spectrum()?;
    [1u32, 2]
        .into_iter()
        .map(|m| {
            let a = binomial_expansion(&t, m)?;
            let b = bessel_potential(&t, m as f64)?;
            let scale = b.spectrum().lp_norm(f64::INFINITY)?;
            let worst = a
                .spectrum()
                .values()
                .iter()
                .zip(b.spectrum().values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max)
                / scale;
            Ok(Record::at_most(
                format!("{id}.m{m}"),
                r,
                worst,
                0.0,
                ctx.cfg.tolerances.binomial,
            ))
        })
        .collect()
}

fn laplacian_lowering(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let t = ctx.config_spectrum()?;
    let (s, p) = (ctx.cfg.s, ctx.cfg.p);
    let lhs = sobolev_norm(&laplacian_power(&t, 1)?, s - 1.0, p)?;
    let rhs = sobolev_norm(&t, s, p)?;
    one(Record::at_most(id, r, lhs, rhs, 1e-10))
}

fn inner_product(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let t = ctx.config_spectrum()?;
    let s = ctx.cfg.s;
    let lhs = hs_inner_product(&t, &t, s)?.sqrt();
    let rhs = sobolev_norm(&t, s, 2.0)?;
    one(Record::close(id, r, lhs, rhs, 1e-12 * rhs))
}

fn mixture(grid: &Arc<QuadGrid>, rng: &mut ChaCha8Rng) -> Result<SpectralDistribution> {
    let k = rng.gen_range(1..=4);
    let terms: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0)))
        .collect();
    SpectralDistribution::from_spectrum(grid, &move |xi: &[f64]| {
        let t: f64 = xi.iter().map(|v| v * v).sum();
        terms.iter().map(|&(c, a)| c * (-a * t).exp()).sum::<f64>()
    })
}

fn duality_bound(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let t = mixture(&ctx.freq, &mut rng)?;
        let phi = mixture(&ctx.freq, &mut rng)?;
        let s = rng.gen_range(-1.5..1.5);
        let (pair, bound) = duality_pairing(&t, &phi, s)?;
        worst = worst.max(pair.abs() - bound);
    }
    // Recorded as max(|pairing| - bound) <= 0.
    one(Record::at_most(id, r, worst, 0.0, ctx.cfg.tolerances.duality))
}

fn duality_extremal(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let phi = ctx.gaussian_spectrum(&ctx.freq)?;
    let s = ctx.cfg.s;
    let t = bessel_potential(&phi, 2.0 * s)?;
    let (pair, bound) = duality_pairing(&t, &phi, s)?;
    one(Record::close(id, r, pair, bound, ctx.cfg.tolerances.extremal * bound))
}

fn representation(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let g = ctx.cfg.function.sample(&ctx.phys)?;
    let plan = ctx.plan()?;
    let l2 = g.lp_norm(2.0)?;
    (0..=2u32)
        .map(|m| {
            let t = negative_order_representation(&g, m, &plan)?;
            let n = sobolev_norm(&t, -(m as f64), 2.0)?;
            Ok(Record::close(
                format!("{id}.m{m}"),
                r,
                n,
                l2,
                ctx.cfg.tolerances.representation,
            ))
        })
        .collect()
}

fn seminorm_band(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let n = ctx.alpha.dim();
    let phys = polyaxial::build_grid(&ctx.alpha, &vec![1.0; n], &vec![48; n])?;
    let freq = polyaxial::build_grid(&ctx.alpha, &vec![60.0; n], &vec![if n == 1 { 300 } else { 120 }; n])?;
    let bump = FunctionSpec::bump(1.0, 8.0);
    let t = SpectralDistribution::from_function(&bump.sample(&phys)?, &TransformPlan::new(&phys, &freq)?)?;
    let s = ctx.cfg.s.max(0.0);
    let h = homogeneous_seminorm(&t, s)?;
    let full = sobolev_norm(&t, s, 2.0)?;
    Ok(vec![
        Record::at_most(format!("{id}.upper"), r, h, full, 0.0),
        // Recorded as 0 <= seminorm, strictly positive required.
        Record::agree(format!("{id}.positive"), r, h > 0.0, true),
    ])
}

fn multiplication_bound(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let t = ctx.config_spectrum()?;
    let phi = FunctionSpec::gaussian(1.0);
    let idx = SobolevIndex::new(ctx.cfg.s, ctx.cfg.p)?;
    let (lhs, rhs) = schwartz_multiply_bound(&phi, &t, idx, &ctx.phys, 1e-6)?;
    one(Record::at_most(id, r, lhs, rhs, 0.0))
}

fn embedding(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let exact = FunctionSpec::gaussian(1.0)
        .exact_transform(&ctx.alpha)
        .expect("closed form");
    let threshold = 0.5 * (ctx.alpha.abs() + ctx.alpha.dim() as f64);
    let mut out = Vec::new();
    for (m, name) in [(0u32, "m0"), (1, "m1")] {
        let above = continuity_embedding_check(&exact, &ctx.freq, threshold + m as f64 + 0.5, m)?;
        let below = continuity_embedding_check(&exact, &ctx.freq, threshold + m as f64 - 0.25, m)?;
        out.push(Record::agree(format!("{id}.{name}.above"), r, above, true));
        out.push(Record::agree(format!("{id}.{name}.below"), r, below, false));
    }
    Ok(out)
}

fn polynomial_regularity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let exact = FunctionSpec::gaussian(1.0)
        .exact_transform(&ctx.alpha)
        .expect("closed form");
    let cases = [
        (vec![1.0, 1.0], 0.0, 1u32, "p1_plus_t"),
        (vec![4.0, 0.0, 1.0], 0.5, 2, "p4_plus_t2"),
    ];
    let mut out = Vec::new();
    for (c, s, m, name) in cases {
        let p = EvenPolynomial::new(c)?;
        let rep = polynomial_regularity_check(&exact, &p, s, m, &ctx.freq)?;
        out.push(Record::at_most(
            format!("{id}.{name}.bound"),
            r,
            rep.norm_g.base,
            rep.bound * rep.norm_u,
            ctx.cfg.tolerances.regularity,
        ));
        out.push(Record::agree(
            format!("{id}.{name}.stable"),
            r,
            rep.norm_g.is_stable(),
            true,
        ));
    }
    Ok(out)
}

fn poincare(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let mut pairs = vec![(1.0, 0.0), (1.0, 0.5), (2.0, 1.0)];
    let (s, t) = (ctx.cfg.s, ctx.cfg.t);
    if s > 0.0 && t <= s && !pairs.contains(&(s, t)) {
        pairs.push((s, t));
    }
    pairs
        .into_iter()
        .map(|(s, t)| {
            let k = poincare_slope(&ctx.alpha, 8.0, s, t, &ctx.cfg.eps_list, PoincareGrid::default())?;
            Ok(Record::close(
                format!("{id}.s{}_t{}", fmt(s), fmt(t)),
                r,
                k,
                2.0 * (s - t),
                ctx.cfg.tolerances.poincare,
            ))
        })
        .collect()
}

fn dirac(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let d = dirac_spectrum(&ctx.alpha, &ctx.cfg.dirac_point())?;
    ctx.cfg
        .dirac
        .pairs
        .iter()
        .map(|&[s, p]| {
            let idx = SobolevIndex::new(s, p)?;
            let stable = under_refinement(&d, &ctx.dirac, |t| polyaxial::sobolev_norm(t, idx))?.is_stable();
            let member = dirac_membership(s, p, &ctx.alpha);
            Ok(Record::agree(
                format!("{id}.s{}_p{}", fmt(s), fmt(p)),
                r,
                member,
                stable,
            ))
        })
        .collect()
}

// ------------------------------------------------------------------- pde

fn pde_checks() -> Vec<Check> {
    vec![
        Check {
            id: "pde.helmholtz_roundtrip",
            paper_ref: "(k^2 + ||xi||^2) F u = F f reproduces f",
            run: helmholtz_roundtrip,
        },
        Check {
            id: "pde.helmholtz_inverse",
            paper_ref: "F f = (k^2 + ||xi||^2) F g gives u = g",
            run: helmholtz_inverse,
        },
        Check {
            id: "pde.helmholtz_regularity",
            paper_ref: "f in H^s implies u in H^{s+1}, ||u||_{H^{s+1}} <= sup_t (1+t)/(k^2+t) ||f||_{H^s}",
            run: helmholtz_regularity,
        },
        Check {
            id: "pde.polynomial_left_inverse",
            paper_ref: "P(||xi||^2) F u = F f with P > 0 on [0, inf)",
            run: polynomial_left_inverse,
        },
        Check {
            id: "pde.polynomial_regularity",
            paper_ref: "||u||_{E^{s+m,2}} <= sup_t (1+t)^m / P(t) ||f||_{E^{s,2}} for P of degree 2m",
            run: pde_polynomial_regularity,
        },
        Check {
            id: "pde.uniqueness",
            paper_ref: "the tempered solution is unique (grid level: identical inputs give identical outputs)",
            run: uniqueness,
        },
    ]
}

fn helmholtz_roundtrip(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.config_spectrum()?;
    [1.0, 2.0]
        .into_iter()
        .map(|k| {
            let d = roundtrip_defect(&f, &EvenPolynomial::helmholtz(k)?)?;
            Ok(Record::at_most(
                format!("{id}.k{}", fmt(k)),
                r,
                d,
                0.0,
                ctx.cfg.tolerances.roundtrip,
            ))
        })
        .collect()
}

fn helmholtz_inverse(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let g = ctx.gaussian_spectrum(&ctx.freq)?;
    [1.0, 2.0]
        .into_iter()
        .map(|k| {
            let f = apply_polynomial(&g, &EvenPolynomial::helmholtz(k)?)?;
            let u = solve_helmholtz(&f, k)?;
            let worst = u
                .spectrum()
                .values()
                .iter()
                .zip(g.spectrum().values())
                .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
                .fold(0.0f64, f64::max);
            Ok(Record::at_most(
                format!("{id}.k{}", fmt(k)),
                r,
                worst,
                0.0,
                ctx.cfg.tolerances.roundtrip,
            ))
        })
        .collect()
}

fn helmholtz_regularity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.config_spectrum()?;
    let mut out = Vec::new();
    for k in [1.0, 2.0] {
        let p = EvenPolynomial::helmholtz(k)?;
        let u = solve_helmholtz(&f, k)?;
        for s in [0.0, 1.0] {
            let rep = regularity_report(&f, &u, &p, s, 1.0)?;
            out.push(Record::at_most(
                format!("{id}.k{}_s{}", fmt(k), fmt(s)),
                r,
                rep.ratio,
                rep.bound,
                ctx.cfg.tolerances.regularity,
            ));
        }
    }
    Ok(out)
}

fn config_polynomial(ctx: &Ctx) -> Result<EvenPolynomial> {
    EvenPolynomial::new(ctx.cfg.polynomial.clone().unwrap_or(vec![4.0, 0.0, 1.0]))
}

fn polynomial_left_inverse(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.config_spectrum()?;
    let d = roundtrip_defect(&f, &config_polynomial(ctx)?)?;
    one(Record::at_most(id, r, d, 0.0, ctx.cfg.tolerances.roundtrip))
}

fn pde_polynomial_regularity(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.config_spectrum()?;
    let p = config_polynomial(ctx)?;
    let u = solve_polynomial(&f, &p)?;
    let s = ctx.cfg.s;
    let rep = regularity_report(&f, &u, &p, s, p.degree() as f64)?;
    one(Record::at_most(
        id,
        r,
        rep.ratio,
        rep.bound,
        ctx.cfg.tolerances.regularity,
    ))
}

fn uniqueness(ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let f = ctx.config_spectrum()?;
    let p = config_polynomial(ctx)?;
    let a = solve_polynomial(&f, &p)?;
    let b = solve_polynomial(&ctx.config_spectrum()?, &p)?;
    let same = a
        .spectrum()
        .values()
        .iter()
        .zip(b.spectrum().values())
        .all(|(x, y)| x.to_bits() == y.to_bits());
    one(Record::agree(id, r, same, true))
}
