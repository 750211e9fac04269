//! `transform`, `norm` and `solve`.

use std::path::{Path, PathBuf};

use polyaxial::pde::{regularity_report, roundtrip_defect};
use polyaxial::sobolev::{dirac_membership, dirac_spectrum, refine, under_refinement};
use polyaxial::transform::{inversion_defect, plancherel_defect, TRUNCATION_TOL};
use polyaxial::{sobolev_norm, solve_polynomial, Snapshot, SobolevIndex, SpectralDistribution, TransformPlan};

use crate::config::{RunConfig, MAX_SUITE_DIM};
use crate::failure::Failure;
use crate::report::Record;

pub struct Output {
    pub records: Vec<Record>,
    pub samples: Option<Snapshot>,
}

const PLANCHEREL_REF: &str = "||f||_{L^2_a} = c_a ||F_a f||_{L^2_a}";

fn spectrum(cfg: &RunConfig) -> Result<SpectralDistribution, Failure> {
    let phys = cfg.phys_grid()?;
    let plan = TransformPlan::new(&phys, &cfg.freq_grid()?)?;
    Ok(SpectralDistribution::from_function(
        &cfg.function.sample(&phys)?,
        &plan,
    )?)
}

pub fn transform(cfg: &RunConfig) -> Result<Output, Failure> {
    let phys = cfg.phys_grid()?;
    let freq = cfg.freq_grid()?;
    let f = cfg.function.sample(&phys)?;
    let spec = TransformPlan::new(&phys, &freq)?.forward(&f)?;
    let tol = &cfg.tolerances;
    let mut records = vec![
        Record::at_most(
            "transform.plancherel",
            PLANCHEREL_REF,
            plancherel_defect(&f, &freq)?,
            0.0,
            tol.plancherel,
        ),
        Record::at_most(
            "transform.inversion",
            "f = c_a^2 F_a F_a f",
            inversion_defect(&f, &freq)?,
            0.0,
            tol.inversion,
        ),
        Record::at_most(
            "transform.truncation",
            "|f| at the outer nodes negligible relative to max |f|",
            f.boundary_ratio(),
            0.0,
            TRUNCATION_TOL,
        ),
    ];
    if let Some(exact) = cfg.function.exact_transform(&cfg.alpha()) {
        let want = exact.sample(&freq)?;
        let peak = want.lp_norm(f64::INFINITY)?;
        let worst = spec
            .values()
            .iter()
            .zip(want.values())
            .map(|(a, b)| (a - b).abs() / peak)
            .fold(0.0f64, f64::max);
        records.push(Record::at_most(
            "transform.exact_pair",
            "F_a f against its closed form, relative to the peak",
            worst,
            0.0,
            tol.exact_pair,
        ));
    }
    let mut snap = spec.to_snapshot();
    snap.domain = Some("frequency".into());
    Ok(Output {
        records,
        samples: Some(snap),
    })
}

pub fn norm(cfg: &RunConfig) -> Result<Output, Failure> {
    let n = cfg.alpha.len();
    if n > MAX_SUITE_DIM {
        return Err(Failure::Config(format!(
            "alpha: norm supports dimension at most {MAX_SUITE_DIM}, got {n}"
        )));
    }
    let t = spectrum(cfg)?;
    let idx = SobolevIndex::new(cfg.s, cfg.p)?;
    let value = sobolev_norm(&t, idx)?;
    let (phys, freq) = (cfg.phys_grid()?, cfg.freq_grid()?);
    let (phys2, freq2) = (refine(&phys)?, refine(&freq)?);
    let t2 = SpectralDistribution::from_function(&cfg.function.sample(&phys2)?, &TransformPlan::new(&phys2, &freq2)?)?;
    let value2 = sobolev_norm(&t2, idx)?;
    let l2 = cfg.function.sample(&phys)?.lp_norm(2.0)?;
    let mut records = vec![
        Record::close(
            format!("norm.value.s{}_p{}", cfg.s, cfg.p),
            "||T||_{E^{s,p}} = c_a ||(1 + ||xi||^2)^s F T||_{L^p_a}, base grid against doubled grid",
            value,
            value2,
            0.05 * value.abs().max(value2.abs()),
        ),
        Record::close(
            "norm.l2_identity",
            "E^{0,2}_a = L^2_a with equal norms",
            sobolev_norm(&t, SobolevIndex::new(0.0, 2.0)?)?,
            l2,
            cfg.tolerances.plancherel * l2,
        ),
    ];
    let mut s_list = cfg.s_list.clone();
    s_list.sort_by(f64::total_cmp);
    for w in s_list.windows(2) {
        records.push(Record::at_most(
            format!("norm.monotone.s{}_s{}", w[0], w[1]),
            "||T||_{E^{s,p}} <= ||T||_{E^{t,p}} for s <= t",
            sobolev_norm(&t, SobolevIndex::new(w[0], cfg.p)?)?,
            sobolev_norm(&t, SobolevIndex::new(w[1], cfg.p)?)?,
            0.0,
        ));
    }
    let alpha = cfg.alpha();
    let d = dirac_spectrum(&alpha, &cfg.dirac_point())?;
    let grid = cfg.dirac_grid()?;
    for &[s, p] in &cfg.dirac.pairs {
        let idx = SobolevIndex::new(s, p)?;
        let stable = under_refinement(&d, &grid, |t| sobolev_norm(t, idx))?.is_stable();
        records.push(Record::agree(
            format!("norm.dirac.s{s}_p{p}"),
            "delta_x in E^{s,p} iff 2sp + (2 - p)(|a| + n/2) < -n",
            dirac_membership(s, p, &alpha),
            stable,
        ));
    }
    Ok(Output { records, samples: None })
}

pub fn solve(cfg: &RunConfig) -> Result<Output, Failure> {
    let f = spectrum(cfg)?;
    let p = cfg.polynomial()?;
    let u = solve_polynomial(&f, &p)?;
    let gain = cfg.solve_gain()?;
    let rep = regularity_report(&f, &u, &p, cfg.s, gain)?;
    let records = vec![
        Record::at_most(
            "solve.roundtrip",
            "P(||xi||^2) F u = F f",
            roundtrip_defect(&f, &p)?,
            0.0,
            cfg.tolerances.roundtrip,
        ),
        Record::at_most(
            format!("solve.regularity.gain{gain}"),
            "||u||_{E^{s+m,2}} <= sup_t (1+t)^m / P(t) ||f||_{E^{s,2}}",
            rep.ratio,
            rep.bound,
            cfg.tolerances.regularity,
        ),
    ];
    let mut snap = u.spectrum().to_snapshot();
    snap.domain = Some("frequency".into());
    Ok(Output {
        records,
        samples: Some(snap),
    })
}

/// `output.samples`, else `<out stem>.samples.json` next to the report.
pub fn samples_path(cfg: &RunConfig, out: Option<&Path>) -> Option<PathBuf> {
    cfg.output.samples.clone().or_else(|| {
        let out = out?;
        let stem = out.file_stem()?.to_string_lossy().into_owned();
        Some(out.with_file_name(format!("{stem}.samples.json")))
    })
}

pub fn write_samples(snap: &Snapshot, path: &Path) -> Result<(), Failure> {
    let mut text = serde_json::to_string(snap).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
