//! Seeded experiment drivers over cone families and their reports.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`]: cones are
//! processed in parallel with per-cone seeds derived from the master seed, and
//! results are reassembled in input order.

pub mod family;
mod report;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centroid::{find_centroid_section_with, hammer_check_with, SearchOptions, StartTrace, HAMMER_TOL};
use crate::characterize::{css_sweep_sampled, fbi_defect, fit_ellipsoid, quadric_terms, section_fit_points};
use crate::cone::{section_of, ConeFile, ConeSpec};
use crate::error::{Error, Result};
use crate::gamma::{gamma_central_symmetry_check, gamma_curve, GammaCurveRecord};
use crate::linalg::{Hyperplane, Vector};

pub use family::{generate_family, FamilyKind, FamilyMember, FamilySpec};
pub use report::{write_report, CsvRow, Report};

/// Width of the band between pass and fail thresholds, as a factor of `tol`.
pub const FAIL_FACTOR: f64 = 100.0;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for task `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    FbiSweep,
    CssSweep,
    EquivalenceMatrix,
    GammaDump,
    HammerStress,
    CentroidSearch,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Self::FbiSweep,
        Self::CssSweep,
        Self::EquivalenceMatrix,
        Self::GammaDump,
        Self::HammerStress,
        Self::CentroidSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FbiSweep => "fbi-sweep",
            Self::CssSweep => "css-sweep",
            Self::EquivalenceMatrix => "equivalence-matrix",
            Self::GammaDump => "gamma-dump",
            Self::HammerStress => "hammer-stress",
            Self::CentroidSearch => "centroid-search",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeSource {
    File(PathBuf),
    Family(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub cone_source: Vec<ConeSource>,
    pub seed: u64,
    pub samples: usize,
    pub interior_points: usize,
    /// Sections per cone for sweeps over hyperplanes.
    pub hyperplanes: usize,
    pub tol: f64,
    pub out: PathBuf,
    pub csv: Option<PathBuf>,
    pub trace: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, cone_source: Vec<ConeSource>, out: PathBuf) -> Self {
        Self {
            experiment,
            cone_source,
            seed: 0,
            samples: 64,
            interior_points: 10,
            hyperplanes: 16,
            tol: 1e-6,
            out,
            csv: None,
            trace: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 8 {
            return Err(Error::InvalidParameter(format!("samples must be at least 8, got {}", self.samples)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.interior_points == 0 {
            return Err(Error::InvalidParameter("interior_points must be positive".into()));
        }
        if self.hyperplanes == 0 {
            return Err(Error::InvalidParameter("hyperplanes must be positive".into()));
        }
        if self.cone_source.is_empty() {
            return Err(Error::InvalidParameter("no cone source given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

/// Pass at or below `tol`, fail at or above `FAIL_FACTOR·tol`.
pub fn verdict(defect: f64, tol: f64) -> Verdict {
    if defect <= tol {
        Verdict::Pass
    } else if defect >= FAIL_FACTOR * tol {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// Cones named by the config's sources, in order, with unique ids.
pub fn load_cones(config: &ExperimentConfig) -> Result<Vec<FamilyMember>> {
    let mut out = Vec::new();
    for (i, source) in config.cone_source.iter().enumerate() {
        match source {
            ConeSource::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                let cone = ConeFile::parse(&text)?.to_cone()?;
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                out.push(FamilyMember {
                    id: format!("file:{stem}"),
                    cone,
                });
            }
            ConeSource::Family(spec) => {
                let spec = FamilySpec::parse(spec)?;
                out.extend(generate_family(&spec, derive_seed(config.seed, 1_000_000 + i as u64))?);
            }
        }
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for m in &mut out {
        let n = seen.entry(m.id.clone()).or_insert(0);
        *n += 1;
        if *n > 1 {
            m.id = format!("{}#{}", m.id, *n - 1);
        }
    }
    Ok(out)
}

const DEPTHS: [f64; 3] = [0.3, 0.6, 0.85];

/// The axis point followed by seeded interior points at several depths.
pub fn interior_points(cone: &ConeSpec, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![cone.axis_point()];
    for i in 1..count {
        pts.push(cone.random_interior_point(&mut rng, DEPTHS[(i - 1) % DEPTHS.len()]));
    }
    pts
}

fn coords(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defects {
    pub ellipsoid_fit: f64,
    pub fbi: f64,
    pub css: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    pub ellipsoid_fit: Verdict,
    pub fbi: Verdict,
    pub css: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub cone_id: String,
    pub is_ellipsoidal_fit: bool,
    pub fbi_pass: bool,
    pub css_pass: bool,
    pub defects: Defects,
    pub verdicts: Verdicts,
}

impl EquivalenceRow {
    pub fn agrees(&self) -> bool {
        self.is_ellipsoidal_fit == self.fbi_pass && self.fbi_pass == self.css_pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbiPoint {
    pub a: Vec<f64>,
    pub affine_dim: usize,
    pub flatness_defect: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbiRow {
    pub cone_id: String,
    pub points: Vec<FbiPoint>,
    pub max_defect: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssRow {
    pub cone_id: String,
    pub sections_tested: usize,
    pub max_symmetry_defect: f64,
    pub worst_normal: Vec<f64>,
    pub worst_offset: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub cone_id: String,
    pub curves: Vec<GammaCurveRecord>,
    /// Largest central-symmetry violation over all curves.
    pub symmetry_violation: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HammerRow {
    pub cone_id: String,
    pub section_dim: usize,
    pub sections: usize,
    pub chords: usize,
    pub min_mu: f64,
    pub max_mu: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidPoint {
    pub p: Vec<f64>,
    pub status: SearchStatus,
    pub residual: f64,
    pub normal: Option<Vec<f64>>,
    pub offset: Option<f64>,
    pub start: Option<usize>,
    pub cap_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidRow {
    pub cone_id: String,
    pub searches: Vec<CentroidPoint>,
}

/// Search traces for one cone, one entry per interior point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeTrace {
    pub cone_id: String,
    pub points: Vec<Vec<StartTrace>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Results {
    Fbi(Vec<FbiRow>),
    Css(Vec<CssRow>),
    Equivalence(Vec<EquivalenceRow>),
    Gamma(Vec<GammaRow>),
    Hammer(Vec<HammerRow>),
    Centroid(Vec<CentroidRow>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    Disagreement { cone_id: String },
    BudgetExhausted { cone_id: String },
}

impl Outcome {
    /// Process exit code for the outcome.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Disagreement { .. } => 1,
            Outcome::BudgetExhausted { .. } => 3,
        }
    }
}

fn canonical_section(cone: &ConeSpec, samples: usize) -> Result<crate::cone::Section> {
    let plane = Hyperplane::new(cone.section_normal().clone(), 1.0)?;
    section_of(cone, &plane, samples)
}

/// Residual of the quadric fit on the canonical section. Planar cones are
/// ellipsoidal (two rays), so their one-dimensional sections fit trivially.
pub fn ellipsoid_fit_defect(cone: &ConeSpec, samples: usize) -> Result<(f64, bool)> {
    if cone.dim() == 2 {
        return Ok((0.0, true));
    }
    let m = cone.dim() - 1;
    let section = canonical_section(cone, samples.max(2 * quadric_terms(m)))?;
    let fit = fit_ellipsoid(&section_fit_points(&section))?;
    Ok((fit.residual, fit.definite))
}

fn max_fbi(cone: &ConeSpec, points: &[Vector], config: &ExperimentConfig) -> Result<Vec<FbiPoint>> {
    points
        .iter()
        .map(|a| {
            let r = fbi_defect(cone, a, config.samples, config.tol)?;
            Ok(FbiPoint {
                a: coords(a),
                affine_dim: r.affine_dim,
                flatness_defect: r.flatness_defect,
                verdict: verdict(r.flatness_defect, config.tol),
            })
        })
        .collect()
}

fn equivalence_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<EquivalenceRow> {
    let cone = &member.cone;
    let (fit_residual, definite) = ellipsoid_fit_defect(cone, config.samples)?;
    let points = interior_points(cone, config.interior_points, derive_seed(seed, 0));
    let fbi = max_fbi(cone, &points, config)?
        .iter()
        .map(|p| p.flatness_defect)
        .fold(0.0, f64::max);
    let css = css_sweep_sampled(cone, config.hyperplanes, derive_seed(seed, 1), config.samples)?.max_symmetry_defect;
    let verdicts = Verdicts {
        ellipsoid_fit: if definite { verdict(fit_residual, config.tol) } else { Verdict::Fail },
        fbi: verdict(fbi, config.tol),
        css: verdict(css, config.tol),
    };
    Ok(EquivalenceRow {
        cone_id: member.id.clone(),
        is_ellipsoidal_fit: verdicts.ellipsoid_fit == Verdict::Pass,
        fbi_pass: verdicts.fbi == Verdict::Pass,
        css_pass: verdicts.css == Verdict::Pass,
        defects: Defects {
            ellipsoid_fit: fit_residual,
            fbi,
            css,
        },
        verdicts,
    })
}

fn fbi_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<FbiRow> {
    let points = interior_points(&member.cone, config.interior_points, derive_seed(seed, 0));
    let points = max_fbi(&member.cone, &points, config)?;
    let max_defect = points.iter().map(|p| p.flatness_defect).fold(0.0, f64::max);
    Ok(FbiRow {
        cone_id: member.id.clone(),
        points,
        max_defect,
        verdict: verdict(max_defect, config.tol),
    })
}

fn css_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<CssRow> {
    let r = css_sweep_sampled(&member.cone, config.hyperplanes, derive_seed(seed, 1), config.samples)?;
    Ok(CssRow {
        cone_id: member.id.clone(),
        sections_tested: r.sections_tested,
        max_symmetry_defect: r.max_symmetry_defect,
        worst_normal: coords(r.worst_hyperplane.normal()),
        worst_offset: r.worst_hyperplane.offset(),
        verdict: verdict(r.max_symmetry_defect, config.tol),
    })
}

fn gamma_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<GammaRow> {
    let cone = &member.cone;
    let mut curves = Vec::new();
    let mut worst = 0.0f64;
    for a in interior_points(cone, config.interior_points, derive_seed(seed, 0)) {
        let curve = gamma_curve(cone, &a, config.samples)?;
        worst = worst.max(gamma_central_symmetry_check(cone, &curve, config.tol)?.max_violation);
        curves.push(curve.to_record());
    }
    Ok(GammaRow {
        cone_id: member.id.clone(),
        curves,
        symmetry_violation: worst,
        verdict: verdict(worst, config.tol),
    })
}

fn hammer_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<HammerRow> {
    let cone = &member.cone;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 2));
    let mut row = HammerRow {
        cone_id: member.id.clone(),
        section_dim: cone.dim() - 1,
        sections: 0,
        chords: 0,
        min_mu: f64::INFINITY,
        max_mu: f64::NEG_INFINITY,
        violations: 0,
    };
    for j in 0..config.hyperplanes {
        let tilt = rng.random_range(0.0..0.9);
        let u = cone.random_section_normal(&mut rng, tilt);
        let section = section_of(cone, &Hyperplane::new(u, 1.0)?, config.samples)?;
        let r = hammer_check_with(&section, config.samples, Some(derive_seed(seed, 100 + j as u64)), HAMMER_TOL)?;
        row.sections += 1;
        row.chords += r.chords.len();
        row.min_mu = row.min_mu.min(r.min_mu);
        row.max_mu = row.max_mu.max(r.max_mu);
        row.violations += r.violations;
    }
    Ok(row)
}

fn centroid_row(member: &FamilyMember, seed: u64, config: &ExperimentConfig) -> Result<(CentroidRow, ConeTrace)> {
    let cone = &member.cone;
    let mut searches = Vec::new();
    let mut traces = Vec::new();
    for (i, p) in interior_points(cone, config.interior_points, derive_seed(seed, 0)).iter().enumerate() {
        let opts = SearchOptions {
            samples: config.samples,
            seed: derive_seed(seed, 200 + i as u64),
            record_trace: config.trace.is_some(),
            ..SearchOptions::default()
        };
        match find_centroid_section_with(cone, p, config.tol, &opts) {
            Ok(found) => {
                let plane = found.section.hyperplane();
                searches.push(CentroidPoint {
                    p: coords(p),
                    status: SearchStatus::Found,
                    residual: found.residual,
                    normal: Some(coords(plane.normal())),
                    offset: Some(plane.offset()),
                    start: Some(found.start),
                    cap_warning: found.cap_warning,
                });
                traces.push(found.trace);
            }
            Err(Error::SearchBudgetExhausted { best_residual }) => {
                searches.push(CentroidPoint {
                    p: coords(p),
                    status: SearchStatus::BudgetExhausted,
                    residual: best_residual,
                    normal: None,
                    offset: None,
                    start: None,
                    cap_warning: false,
                });
                traces.push(Vec::new());
            }
            Err(e) => return Err(e),
        }
    }
    Ok((
        CentroidRow {
            cone_id: member.id.clone(),
            searches,
        },
        ConeTrace {
            cone_id: member.id.clone(),
            points: traces,
        },
    ))
}

fn per_cone<T, F>(cones: &[FamilyMember], config: &ExperimentConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&FamilyMember, u64, &ExperimentConfig) -> Result<T> + Sync,
{
    cones
        .par_iter()
        .enumerate()
        .map(|(i, m)| f(m, derive_seed(config.seed, i as u64), config))
        .collect()
}

fn row(cone_id: &str, predicate: &str, defect: f64, verdict: Verdict) -> CsvRow {
    CsvRow {
        cone_id: cone_id.to_string(),
        predicate: predicate.to_string(),
        defect,
        verdict,
    }
}

/// Runs the configured experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let cones = load_cones(config)?;
    let mut trace = None;
    let (results, csv, outcome) = match config.experiment {
        Experiment::EquivalenceMatrix => {
            let rows = per_cone(&cones, config, equivalence_row)?;
            let csv = rows
                .iter()
                .flat_map(|r| {
                    [
                        row(&r.cone_id, "ellipsoid-fit", r.defects.ellipsoid_fit, r.verdicts.ellipsoid_fit),
                        row(&r.cone_id, "fbi", r.defects.fbi, r.verdicts.fbi),
                        row(&r.cone_id, "css", r.defects.css, r.verdicts.css),
                    ]
                })
                .collect();
            let outcome = match rows.iter().find(|r| !r.agrees()) {
                Some(r) => Outcome::Disagreement {
                    cone_id: r.cone_id.clone(),
                },
                None => Outcome::Success,
            };
            (Results::Equivalence(rows), csv, outcome)
        }
        Experiment::FbiSweep => {
            let rows = per_cone(&cones, config, fbi_row)?;
            let csv = rows.iter().map(|r| row(&r.cone_id, "fbi", r.max_defect, r.verdict)).collect();
            (Results::Fbi(rows), csv, Outcome::Success)
        }
        Experiment::CssSweep => {
            let rows = per_cone(&cones, config, css_row)?;
            let csv = rows
                .iter()
                .map(|r| row(&r.cone_id, "css", r.max_symmetry_defect, r.verdict))
                .collect();
            (Results::Css(rows), csv, Outcome::Success)
        }
        Experiment::GammaDump => {
            let rows = per_cone(&cones, config, gamma_row)?;
            let csv = rows
                .iter()
                .map(|r| row(&r.cone_id, "gamma-symmetry", r.symmetry_violation, r.verdict))
                .collect();
            let outcome = match rows.iter().find(|r| r.verdict != Verdict::Pass) {
                Some(r) => Outcome::Disagreement {
                    cone_id: r.cone_id.clone(),
                },
                None => Outcome::Success,
            };
            (Results::Gamma(rows), csv, outcome)
        }
        Experiment::HammerStress => {
            let rows = per_cone(&cones, config, hammer_row)?;
            let csv = rows
                .iter()
                .map(|r| {
                    let n = r.section_dim as f64;
                    let excess = (1.0 / (n + 1.0) - r.min_mu).max(r.max_mu - n / (n + 1.0)).max(0.0);
                    let v = if r.violations == 0 { Verdict::Pass } else { Verdict::Fail };
                    row(&r.cone_id, "hammer", excess, v)
                })
                .collect();
            let outcome = match rows.iter().find(|r| r.violations > 0) {
                Some(r) => Outcome::Disagreement {
                    cone_id: r.cone_id.clone(),
                },
                None => Outcome::Success,
            };
            (Results::Hammer(rows), csv, outcome)
        }
        Experiment::CentroidSearch => {
            let pairs = per_cone(&cones, config, centroid_row)?;
            let (rows, traces): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let csv = rows
                .iter()
                .map(|r| {
                    let worst = r.searches.iter().map(|s| s.residual).fold(0.0, f64::max);
                    let found = r.searches.iter().all(|s| s.status == SearchStatus::Found);
                    row(&r.cone_id, "centroid-search", worst, if found { Verdict::Pass } else { Verdict::Fail })
                })
                .collect();
            let outcome = match rows
                .iter()
                .find(|r| r.searches.iter().any(|s| s.status == SearchStatus::BudgetExhausted))
            {
                Some(r) => Outcome::BudgetExhausted {
                    cone_id: r.cone_id.clone(),
                },
                None => Outcome::Success,
            };
            if config.trace.is_some() {
                trace = Some(traces);
            }
            (Results::Centroid(rows), csv, outcome)
        }
    };
    Ok(Report {
        config: config.clone(),
        outcome,
        results,
        csv,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(experiment: Experiment, families: &[&str]) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            experiment,
            families.iter().map(|f| ConeSource::Family(f.to_string())).collect(),
            PathBuf::from("unused.json"),
        );
        c.interior_points = 4;
        c.hyperplanes = 8;
        c
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        let mut b = a.clone();
        b.sort();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(a[3], derive_seed(42, 3));
        assert_ne!(derive_seed(42, 0), derive_seed(43, 0));
        // Reference value of the SplitMix64 sequence started at 0.
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(verdict(1e-7, 1e-6), Verdict::Pass);
        assert_eq!(verdict(1e-5, 1e-6), Verdict::Inconclusive);
        assert_eq!(verdict(1e-4, 1e-6), Verdict::Fail);
    }

    #[test]
    fn config_validation() {
        let mut c = config(Experiment::FbiSweep, &["lorentz:3"]);
        assert!(c.validate().is_ok());
        c.samples = 7;
        assert!(c.validate().is_err());
        c.samples = 64;
        c.tol = 0.0;
        assert!(c.validate().is_err());
        assert!("gamma-dump".parse::<Experiment>().is_ok());
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn interior_points_are_interior() {
        let cone = family::kgon(5).unwrap();
        let pts = interior_points(&cone, 10, 1);
        assert_eq!(pts[0], cone.axis_point());
        for p in pts {
            assert!(cone.boundary_defect(&p) < 0.0);
        }
    }

    #[test]
    fn small_equivalence_matrix_agrees() {
        let report = run_experiment(&config(Experiment::EquivalenceMatrix, &["lorentz:3-4", "kgon:3:k=3|6"])).unwrap();
        assert_eq!(report.outcome, Outcome::Success);
        let Results::Equivalence(rows) = &report.results else {
            panic!("wrong result kind");
        };
        let flags: Vec<bool> = rows.iter().map(|r| r.is_ellipsoidal_fit).collect();
        assert_eq!(flags, vec![true, true, false, false]);
        assert_eq!(report.csv.len(), 12);
    }

    #[test]
    fn duplicate_ids_are_disambiguated() {
        let c = config(Experiment::FbiSweep, &["lorentz:3", "lorentz:3"]);
        let ids: Vec<String> = load_cones(&c).unwrap().into_iter().map(|m| m.id).collect();
        assert_eq!(ids, vec!["lorentz-d3", "lorentz-d3#1"]);
    }
}
