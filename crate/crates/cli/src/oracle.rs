//! Expectation tables. A table is produced once on grids refined four times
//! over (radius, nodes and angular nodes) with compensated summation, and
//! verification compares the reference-resolution values against it.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use polyaxial::summation::{pairwise_sum_by, CompensatedSum};
use polyaxial::{
    bessel_kernel, build_grid, normalized_bessel, sobolev_norm, translate, AlphaParams, BesselOrder, Evaluable,
    FunctionSpec, QuadGrid, Result, SobolevIndex, SpectralDistribution, ThetaRule, TransformPlan,
};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::failure::Failure;
use crate::report::Record;
use crate::suites::Ctx;

const EMBEDDED: &str = include_str!("../data/oracle.json");
const BESSEL_TABLE: &str = include_str!("../../core/tests/data/bessel_oracle.json");
pub const REFINEMENT: usize = 4;

const LAMBDAS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0];
const SHIFTS: [(f64, f64); 3] = [(0.5, 1.0), (1.0, 1.0), (2.0, 0.7)];
const SOBOLEV: [(f64, f64); 6] = [(-1.0, 2.0), (0.0, 2.0), (0.5, 2.0), (1.0, 2.0), (0.0, 1.0), (1.0, 1.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    pub alpha: Vec<f64>,
    pub function: FunctionSpec,
    pub refinement: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Entry {
    Transform { lambda: Vec<f64>, value: f64 },
    Integral { value: f64 },
    LpNorm { p: f64, value: f64 },
    SobolevNorm { s: f64, p: f64, value: f64 },
    Translate { x: Vec<f64>, y: Vec<f64>, value: f64 },
}

impl Entry {
    fn value(&self) -> f64 {
        match self {
            Entry::Transform { value, .. }
            | Entry::Integral { value }
            | Entry::LpNorm { value, .. }
            | Entry::SobolevNorm { value, .. }
            | Entry::Translate { value, .. } => *value,
        }
    }

    fn name(&self) -> String {
        let v = |x: &[f64]| x.iter().map(|a| format!("{a}")).collect::<Vec<_>>().join("_");
        match self {
            Entry::Transform { lambda, .. } => format!("transform.l{}", v(lambda)),
            Entry::Integral { .. } => "integral".into(),
            Entry::LpNorm { p, .. } => format!("lp_norm.p{p}"),
            Entry::SobolevNorm { s, p, .. } => format!("sobolev_norm.s{s}_p{p}"),
            Entry::Translate { x, y, .. } => format!("translate.x{}_y{}", v(x), v(y)),
        }
    }
}

impl OracleTable {
    pub fn matches(&self, cfg: &RunConfig) -> bool {
        self.alpha == cfg.alpha && self.function == cfg.function
    }
}

/// The table named by the config, else the one shipped with the binary.
pub fn load(cfg: &RunConfig) -> std::result::Result<Option<OracleTable>, Failure> {
    match &cfg.oracle {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("oracle: cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map(Some)
                .map_err(|e| Failure::Config(format!("oracle: {e}")))
        }
        None => Ok(serde_json::from_str(EMBEDDED).ok()),
    }
}

pub fn default_path() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/oracle.json"))
}

pub fn save(table: &OracleTable, path: &Path) -> std::result::Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(table).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn keys(n: usize) -> Vec<Entry> {
    let mut out: Vec<Entry> = LAMBDAS
        .iter()
        .map(|&l| Entry::Transform {
            lambda: vec![l; n],
            value: 0.0,
        })
        .collect();
    out.push(Entry::Integral { value: 0.0 });
    out.extend([1.0, 2.0].map(|p| Entry::LpNorm { p, value: 0.0 }));
    out.extend(SOBOLEV.map(|(s, p)| Entry::SobolevNorm { s, p, value: 0.0 }));
    out.extend(SHIFTS.map(|(x, y)| Entry::Translate {
        x: vec![x; n],
        y: vec![y; n],
        value: 0.0,
    }));
    out
}

fn with_value(e: &Entry, v: f64) -> Entry {
    let mut e = e.clone();
    match &mut e {
        Entry::Transform { value, .. }
        | Entry::Integral { value }
        | Entry::LpNorm { value, .. }
        | Entry::SobolevNorm { value, .. }
        | Entry::Translate { value, .. } => *value = v,
    }
    e
}

fn refined(alpha: &AlphaParams, g: &QuadGrid) -> Result<Arc<QuadGrid>> {
    let r: Vec<f64> = g.radius().iter().map(|r| REFINEMENT as f64 * r).collect();
    let n: Vec<usize> = g.shape().iter().map(|n| REFINEMENT * n).collect();
    build_grid(alpha, &r, &n)
}

fn compensated(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    let mut s = CompensatedSum::new();
    for i in 0..n {
        s.add(f(i));
    }
    s.value()
}

/// Builds the table on the refined grids. Slow by design.
pub fn generate(cfg: &RunConfig) -> std::result::Result<OracleTable, Failure> {
    let alpha = cfg.alpha();
    let (base_phys, base_freq) = (cfg.phys_grid()?, cfg.freq_grid()?);
    let phys = refined(&alpha, &base_phys)?;
    let freq = refined(&alpha, &base_freq)?;
    let rule = ThetaRule::new(&alpha, REFINEMENT * cfg.theta_nodes)?;
    let f = &cfg.function;
    let w = phys.measure_weights();
    let fx: Vec<f64> = (0..phys.len()).map(|k| f.evaluate(&phys.point(k))).collect();
    let spec = SpectralDistribution::from_function(&f.sample(&phys)?, &TransformPlan::new(&phys, &freq)?)?;
    let ts = freq.norm_sq();
    let wf = freq.measure_weights();
    let vf = spec.spectrum().values();
    let c = alpha.c_alpha();

    let entries = keys(alpha.dim())
        .iter()
        .map(|e| {
            let v = match e {
                Entry::Transform { lambda, .. } => compensated(phys.len(), |k| {
                    w[k] * fx[k] * bessel_kernel(alpha.values(), lambda, &phys.point(k)).unwrap_or(f64::NAN)
                }),
                Entry::Integral { .. } => compensated(phys.len(), |k| w[k] * fx[k]),
                Entry::LpNorm { p, .. } => compensated(phys.len(), |k| w[k] * fx[k].abs().powf(*p)).powf(1.0 / p),
                Entry::SobolevNorm { s, p, .. } => {
                    c * compensated(freq.len(), |k| wf[k] * ((1.0 + ts[k]).powf(*s) * vf[k]).abs().powf(*p))
                        .powf(1.0 / p)
                }
                Entry::Translate { x, y, .. } => translate(f, y, x, &rule)?,
            };
            if !v.is_finite() {
                return Err(Failure::Numerical(polyaxial::Error::Overflow("oracle entry")));
            }
            Ok(with_value(e, v))
        })
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    Ok(OracleTable {
        alpha: cfg.alpha.clone(),
        function: f.clone(),
        refinement: REFINEMENT,
        entries,
    })
}

/// The same quantity through the library's reference-resolution routines.
fn reference(e: &Entry, ctx: &Ctx) -> Result<f64> {
    let f = &ctx.cfg.function;
    let phys = &ctx.phys;
    Ok(match e {
        Entry::Transform { lambda, .. } => {
            let w = phys.measure_weights();
            let a = ctx.alpha.values();
            let terms = (0..phys.len())
                .map(|k| {
                    let x = phys.point(k);
                    Ok(w[k] * f.eval(&x) * bessel_kernel(a, lambda, &x)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            pairwise_sum_by(0..terms.len(), &|k| terms[k])
        }
        Entry::Integral { .. } => f.sample(phys)?.integrate(),
        Entry::LpNorm { p, .. } => f.sample(phys)?.lp_norm(*p)?,
        Entry::SobolevNorm { s, p, .. } => {
            let t = SpectralDistribution::from_function(&f.sample(phys)?, &TransformPlan::new(phys, &ctx.freq)?)?;
            sobolev_norm(&t, SobolevIndex::new(*s, *p)?)?
        }
        Entry::Translate { x, y, .. } => translate(f, y, x, &ctx.rule)?,
    })
}

pub fn compare(table: &OracleTable, ctx: &Ctx, id: &str, r: &str) -> Result<Vec<Record>> {
    let tol = ctx.cfg.tolerances.oracle;
    table
        .entries
        .iter()
        .map(|e| {
            let want = e.value();
            let got = reference(e, ctx)?;
            Ok(Record::close(
                format!("{id}.{}", e.name()),
                r,
                got,
                want,
                tol * want.abs().max(1e-6),
            ))
        })
        .collect()
}

#[derive(Deserialize)]
struct BesselRow {
    gamma: f64,
    x: f64,
    value: String,
    envelope: String,
}

#[derive(Deserialize)]
struct BesselTable {
    rows: Vec<BesselRow>,
}

/// Worst error against the high-precision Bessel table, relative to the
/// local amplitude.
pub fn bessel_table_error() -> Result<f64> {
    let table: BesselTable = serde_json::from_str(BESSEL_TABLE).expect("embedded table parses");
    let mut worst = 0.0f64;
    for row in &table.rows {
        let want: f64 = row.value.parse().expect("numeric value");
        let env: f64 = row.envelope.parse().expect("numeric envelope");
        let got = normalized_bessel(BesselOrder::new(row.gamma)?, row.x)?;
        worst = worst.max((got - want).abs() / want.abs().max(env));
    }
    Ok(worst)
}
