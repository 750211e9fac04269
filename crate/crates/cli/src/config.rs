//! Run configuration: a single JSON document, see `schema/run_config.schema.json`.

use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use polyaxial::{build_grid, AlphaParams, EvenPolynomial, FunctionSpec, QuadGrid, ThetaRule};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

/// Largest dimension any command accepts; the suites stop at 2.
pub const MAX_DIM: usize = 3;
pub const MAX_SUITE_DIM: usize = 2;
pub const MAX_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub radius: Vec<f64>,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracConfig {
    /// Location of the point mass; defaults to `(1, ..., 1)`.
    #[serde(default)]
    pub point: Option<Vec<f64>>,
    #[serde(default = "default_dirac_pairs")]
    pub pairs: Vec<[f64; 2]>,
    /// Frequency grid for the finiteness test; refined by doubling.
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

impl Default for DiracConfig {
    fn default() -> Self {
        Self {
            point: None,
            pairs: default_dirac_pairs(),
            grid: None,
        }
    }
}

fn default_dirac_pairs() -> Vec<[f64; 2]> {
    vec![
        [-2.0, 1.0],
        [0.0, 1.0],
        [-1.0, 2.0],
        [0.0, 2.0],
        [-1.5, 1.5],
        [0.5, 2.0],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_format")]
    pub format: Format,
    /// Where `transform` and `solve` write their samples.
    #[serde(default)]
    pub samples: Option<PathBuf>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: Format::Json,
            samples: None,
        }
    }
}

fn default_format() -> Format {
    Format::Json
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub exact_pair: f64,
    pub inversion: f64,
    pub plancherel: f64,
    pub eigenrelation: f64,
    pub kernel_mass: f64,
    pub theta_vs_kernel: f64,
    pub product_formula: f64,
    pub contraction: f64,
    pub young: f64,
    pub commutativity: f64,
    pub convolution: f64,
    pub product_rule: f64,
    pub binomial: f64,
    pub duality: f64,
    pub extremal: f64,
    pub representation: f64,
    pub poincare: f64,
    pub roundtrip: f64,
    pub regularity: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact_pair: 1e-8,
            inversion: 1e-6,
            plancherel: 1e-6,
            eigenrelation: 1e-4,
            kernel_mass: 1e-10,
            theta_vs_kernel: 1e-6,
            product_formula: 1e-8,
            contraction: 1e-8,
            young: 1e-8,
            commutativity: 1e-6,
            convolution: 1e-5,
            product_rule: 1e-4,
            binomial: 1e-12,
            duality: 1e-10,
            extremal: 1e-8,
            representation: 1e-8,
            poincare: 0.15,
            roundtrip: 1e-12,
            regularity: 1e-8,
            oracle: 1e-8,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 20] {
        [
            ("exact_pair", self.exact_pair),
            ("inversion", self.inversion),
            ("plancherel", self.plancherel),
            ("eigenrelation", self.eigenrelation),
            ("kernel_mass", self.kernel_mass),
            ("theta_vs_kernel", self.theta_vs_kernel),
            ("product_formula", self.product_formula),
            ("contraction", self.contraction),
            ("young", self.young),
            ("commutativity", self.commutativity),
            ("convolution", self.convolution),
            ("product_rule", self.product_rule),
            ("binomial", self.binomial),
            ("duality", self.duality),
            ("extremal", self.extremal),
            ("representation", self.representation),
            ("poincare", self.poincare),
            ("roundtrip", self.roundtrip),
            ("regularity", self.regularity),
            ("oracle", self.oracle),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Vec<f64>,
    pub grid: GridConfig,
    /// Defaults to `grid`.
    #[serde(default)]
    pub freq_grid: Option<GridConfig>,
    #[serde(default = "default_function")]
    pub function: FunctionSpec,
    #[serde(default = "one")]
    pub s: f64,
    #[serde(default = "two")]
    pub p: f64,
    /// Lower index of the Poincaré pair `(s, t)`.
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_s_list")]
    pub s_list: Vec<f64>,
    #[serde(default)]
    pub dirac: DiracConfig,
    #[serde(default = "one")]
    pub k: f64,
    /// Coefficients of `P(t) = sum_j c_j t^j`; `solve` uses Helmholtz when absent.
    #[serde(default)]
    pub polynomial: Option<Vec<f64>>,
    /// Regularity gain; defaults to the degree of `P` in `t`.
    #[serde(default)]
    pub gain: Option<f64>,
    #[serde(default = "default_eps")]
    pub eps_list: Vec<f64>,
    #[serde(default = "default_theta")]
    pub theta_nodes: usize,
    /// Grid for direct convolutions; defaults depend on the dimension.
    #[serde(default)]
    pub convolution_grid: Option<GridConfig>,
    /// Frequency grid paired with `convolution_grid` in the convolution-theorem checks.
    #[serde(default)]
    pub convolution_freq_grid: Option<GridConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Expectation table; the committed one is used when absent.
    #[serde(default)]
    pub oracle: Option<PathBuf>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn default_function() -> FunctionSpec {
    FunctionSpec::gaussian(1.0)
}

fn default_s_list() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

fn default_eps() -> Vec<f64> {
    vec![0.5, 0.25, 0.125]
}

fn default_theta() -> usize {
    64
}

fn default_seed() -> u64 {
    2024
}

fn bad(field: impl Into<String>, msg: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("{}: {msg}", field.into()))
}

fn check_grid(field: &str, g: &GridConfig, n: usize) -> Result<(), Failure> {
    if g.radius.len() != n {
        return Err(bad(
            format!("{field}.radius"),
            format!("has {} entries, alpha has {n}", g.radius.len()),
        ));
    }
    if g.nodes.len() != n {
        return Err(bad(
            format!("{field}.nodes"),
            format!("has {} entries, alpha has {n}", g.nodes.len()),
        ));
    }
    for (i, &r) in g.radius.iter().enumerate() {
        if !(r > 0.0 && r.is_finite()) {
            return Err(bad(format!("{field}.radius[{i}]"), format!("{r} must be positive")));
        }
    }
    for (i, &m) in g.nodes.iter().enumerate() {
        if !(2..=MAX_NODES).contains(&m) {
            return Err(bad(
                format!("{field}.nodes[{i}]"),
                format!("{m} must lie in [2, {MAX_NODES}]"),
            ));
        }
    }
    Ok(())
}

fn check_finite(field: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("{v} must be finite")))
    }
}

pub const SCHEMA: &str = include_str!("../schema/run_config.schema.json");

fn validator() -> &'static jsonschema::Validator {
    static V: OnceLock<jsonschema::Validator> = OnceLock::new();
    V.get_or_init(|| {
        let schema: serde_json::Value = serde_json::from_str(SCHEMA).expect("schema is JSON");
        jsonschema::validator_for(&schema).expect("schema compiles")
    })
}

/// `/grid/nodes/0` becomes `grid.nodes[0]`.
fn field_name(pointer: &str) -> String {
    let mut out = String::new();
    for seg in pointer.split('/').skip(1) {
        if seg.parse::<usize>().is_ok() {
            out.push_str(&format!("[{seg}]"));
        } else {
            if !out.is_empty() {
                out.push('.');
            }
            out.push_str(seg);
        }
    }
    if out.is_empty() {
        "config".into()
    } else {
        out
    }
}

fn check_schema(doc: &serde_json::Value) -> Result<(), Failure> {
    match validator().iter_errors(doc).next() {
        Some(e) => Err(bad(field_name(e.instance_path.as_str()), e)),
        None => Ok(()),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| Failure::Config(e.to_string()))?;
        check_schema(&doc)?;
        let cfg: Self = serde_json::from_value(doc).map_err(|e| Failure::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every rejection names the offending field.
    pub fn validate(&self) -> Result<(), Failure> {
        // The core error already reads "alpha[i] ≤ −1/2 (got v)".
        let alpha = AlphaParams::new(self.alpha.clone()).map_err(|e| Failure::Config(e.to_string()))?;
        let n = alpha.dim();
        if n > MAX_DIM {
            return Err(bad("alpha", format!("dimension {n} exceeds {MAX_DIM}")));
        }
        check_grid("grid", &self.grid, n)?;
        if let Some(g) = &self.freq_grid {
            check_grid("freq_grid", g, n)?;
        }
        if let Some(g) = &self.convolution_grid {
            check_grid("convolution_grid", g, n)?;
        }
        if let Some(g) = &self.convolution_freq_grid {
            check_grid("convolution_freq_grid", g, n)?;
        }
        if let Some(g) = &self.dirac.grid {
            check_grid("dirac.grid", g, n)?;
        }
        self.function.validate().map_err(|e| bad("function", e))?;
        check_finite("s", self.s)?;
        check_finite("t", self.t)?;
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(bad("p", format!("{} must be a finite real >= 1", self.p)));
        }
        for (i, &s) in self.s_list.iter().enumerate() {
            check_finite(&format!("s_list[{i}]"), s)?;
        }
        if let Some(x) = &self.dirac.point {
            if x.len() != n {
                return Err(bad("dirac.point", format!("has {} entries, alpha has {n}", x.len())));
            }
            if let Some(i) = x.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(bad(format!("dirac.point[{i}]"), "must be a finite nonnegative real"));
            }
        }
        for (i, [s, p]) in self.dirac.pairs.iter().enumerate() {
            check_finite(&format!("dirac.pairs[{i}]"), *s)?;
            if !(*p >= 1.0 && p.is_finite()) {
                return Err(bad(format!("dirac.pairs[{i}]"), format!("p = {p} must be >= 1")));
            }
        }
        if self.k == 0.0 || !self.k.is_finite() {
            return Err(bad("k", format!("{} must be a nonzero finite real", self.k)));
        }
        if let Some(c) = &self.polynomial {
            let p = EvenPolynomial::new(c.clone()).map_err(|e| bad("polynomial", e))?;
            p.check_positive(&[]).map_err(|e| bad("polynomial", e))?;
            if let Some(g) = self.gain {
                if !(g >= 0.0 && g <= p.degree() as f64) {
                    return Err(bad("gain", format!("{g} must lie in [0, deg P = {}]", p.degree())));
                }
            }
        } else if let Some(g) = self.gain {
            if !(0.0..=1.0).contains(&g) {
                return Err(bad(
                    "gain",
                    format!("{g} must lie in [0, 1] for the Helmholtz operator"),
                ));
            }
        }
        if self.eps_list.len() < 2 {
            return Err(bad("eps_list", "needs at least two entries"));
        }
        for (i, &e) in self.eps_list.iter().enumerate() {
            if !(e > 0.0 && e <= 1.0) {
                return Err(bad(format!("eps_list[{i}]"), format!("{e} must lie in (0, 1]")));
            }
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("eps_list", "must be strictly decreasing"));
        }
        if self.t < 0.0 {
            return Err(bad("t", format!("{} must be nonnegative", self.t)));
        }
        if !(2..=1024).contains(&self.theta_nodes) {
            return Err(bad(
                "theta_nodes",
                format!("{} must lie in [2, 1024]", self.theta_nodes),
            ));
        }
        for (name, v) in self.tolerances.entries() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("tolerances.{name}"), format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> AlphaParams {
        AlphaParams::new(self.alpha.clone()).expect("validated")
    }

    pub fn phys_grid(&self) -> Result<Arc<QuadGrid>, Failure> {
        Ok(build_grid(&self.alpha(), &self.grid.radius, &self.grid.nodes)?)
    }

    pub fn freq_grid(&self) -> Result<Arc<QuadGrid>, Failure> {
        let g = self.freq_grid.as_ref().unwrap_or(&self.grid);
        Ok(build_grid(&self.alpha(), &g.radius, &g.nodes)?)
    }

    pub fn convolution_grid(&self) -> Result<Arc<QuadGrid>, Failure> {
        let n = self.alpha.len();
        let g = self.convolution_grid.clone().unwrap_or_else(|| match n {
            1 => GridConfig {
                radius: vec![14.0],
                nodes: vec![160],
            },
            _ => GridConfig {
                radius: vec![8.0; n],
                nodes: vec![24; n],
            },
        });
        Ok(build_grid(&self.alpha(), &g.radius, &g.nodes)?)
    }

    /// In 2-D the coarse grid cannot resolve `j(l x)` out to `l x = R^2`, so
    /// the frequency side gets a smaller box.
    pub fn convolution_freq_grid(&self) -> Result<Arc<QuadGrid>, Failure> {
        match (&self.convolution_freq_grid, self.alpha.len()) {
            (Some(g), _) => Ok(build_grid(&self.alpha(), &g.radius, &g.nodes)?),
            (None, 1) => self.convolution_grid(),
            (None, n) => Ok(build_grid(&self.alpha(), &vec![6.0; n], &vec![24; n])?),
        }
    }

    pub fn dirac_grid(&self) -> Result<Arc<QuadGrid>, Failure> {
        let n = self.alpha.len();
        let g = self.dirac.grid.clone().unwrap_or_else(|| match n {
            1 => GridConfig {
                radius: vec![40.0],
                nodes: vec![200],
            },
            _ => GridConfig {
                radius: vec![30.0; n],
                nodes: vec![120; n],
            },
        });
        Ok(build_grid(&self.alpha(), &g.radius, &g.nodes)?)
    }

    pub fn dirac_point(&self) -> Vec<f64> {
        self.dirac.point.clone().unwrap_or_else(|| vec![1.0; self.alpha.len()])
    }

    pub fn theta_rule(&self) -> Result<ThetaRule, Failure> {
        Ok(ThetaRule::new(&self.alpha(), self.theta_nodes)?)
    }

    /// `P` from the config, or `k^2 + t`.
    pub fn polynomial(&self) -> Result<EvenPolynomial, Failure> {
        match &self.polynomial {
            Some(c) => Ok(EvenPolynomial::new(c.clone())?),
            None => Ok(EvenPolynomial::helmholtz(self.k)?),
        }
    }

    pub fn solve_gain(&self) -> Result<f64, Failure> {
        Ok(self.gain.unwrap_or(self.polynomial()?.degree() as f64))
    }
}
