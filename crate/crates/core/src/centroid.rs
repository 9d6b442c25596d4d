//! Chord ratios through section centroids, the search for a bounded section
//! with a prescribed centroid, and the check that a symmetric section's
//! boundary is the boundary intersection for twice its center.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characterize::{fit_ellipsoid, symmetry_defect, ELLIPSOID_RESIDUAL_TOL};
use crate::cone::{radial_extent, section_of, ConeSpec, Membership, Section, BOUNDARY_TOL, DEFAULT_DUAL_MARGIN};
use crate::error::{Error, Result};
use crate::gamma::gamma_curve;
use crate::linalg::{self, orthonormal_complement, Frame, Hyperplane, Matrix, Vector};
use crate::sphere;

/// Slack on the chord-ratio bounds.
pub const HAMMER_TOL: f64 = 1e-6;

/// A chord `[x, y]` through `p = (1 − μ)x + μy`.
#[derive(Debug, Clone)]
pub struct ChordRatio {
    pub x: Vector,
    pub y: Vector,
    pub mu: f64,
}

impl ChordRatio {
    pub fn point(&self) -> Vector {
        &self.x * (1.0 - self.mu) + &self.y * self.mu
    }

    pub fn reversed(&self) -> ChordRatio {
        ChordRatio {
            x: self.y.clone(),
            y: self.x.clone(),
            mu: 1.0 - self.mu,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HammerReport {
    pub min_mu: f64,
    pub max_mu: f64,
    /// Chords whose ratio leaves `[1/(n+1) − tol, n/(n+1) + tol]`.
    pub violations: usize,
    pub chords: Vec<ChordRatio>,
}

/// Chord ratios through the centroid along a deterministic direction set
/// (plus vertex directions for polytope sections).
pub fn hammer_check(section: &Section, num_chords: usize) -> Result<HammerReport> {
    hammer_check_with(section, num_chords, None, HAMMER_TOL)
}

/// As [`hammer_check`], adding `num_chords` seeded random directions when a
/// seed is given.
pub fn hammer_check_with(section: &Section, num_chords: usize, seed: Option<u64>, tol: f64) -> Result<HammerReport> {
    let cone = section.cone();
    let c = section.centroid();
    let frame = section.centroid_frame();
    let m = frame.dim();
    let mut dirs: Vec<Vector> = sphere::directions(m, num_chords)
        .iter()
        .map(|d| frame.direction_to_global(d))
        .collect();
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        dirs.extend((0..num_chords).map(|_| frame.direction_to_global(&sphere::random_unit(m, &mut rng))));
    }
    dirs.extend(section.vertex_directions(c));
    let n = m as f64;
    let (lo, hi) = (1.0 / (n + 1.0) - tol, n / (n + 1.0) + tol);
    let mut report = HammerReport {
        min_mu: f64::INFINITY,
        max_mu: f64::NEG_INFINITY,
        violations: 0,
        chords: Vec::with_capacity(dirs.len()),
    };
    for u in &dirs {
        let fwd = radial_extent(cone, c, u)?;
        let back = radial_extent(cone, c, &-u)?;
        if fwd + back <= 0.0 {
            return Err(Error::Degenerate("zero-length chord".into()));
        }
        let mu = back / (fwd + back);
        report.min_mu = report.min_mu.min(mu);
        report.max_mu = report.max_mu.max(mu);
        if mu < lo || mu > hi {
            report.violations += 1;
        }
        report.chords.push(ChordRatio {
            x: c - u * back,
            y: c + u * fwd,
            mu,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub starts: usize,
    pub iterations: usize,
    /// Boundary samples on the returned section.
    pub samples: usize,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            iterations: 200,
            samples: 64,
            seed: 0,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub u: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub start: usize,
    pub iterates: Vec<TracePoint>,
}

#[derive(Debug, Clone)]
pub struct CentroidSearch {
    pub section: Section,
    /// `‖centroid − p‖ / ‖p‖` of the returned section.
    pub residual: f64,
    pub start: usize,
    /// Set when some boundary sample lies outside `(n + 2)p − C`, the
    /// region a centroid section of the cone truncated at `(n + 2)p` stays
    /// within (`n = dim C`).
    pub cap_warning: bool,
    pub trace: Vec<StartTrace>,
}

/// Bounded section through `p` whose centroid is within `tol·‖p‖` of `p`.
pub fn find_centroid_section(cone: &ConeSpec, p: &Vector, tol: f64) -> Result<Section> {
    Ok(find_centroid_section_with(cone, p, tol, &SearchOptions::default())?.section)
}

const PENALTY: f64 = 1e6;
const RECENTER_EVERY: usize = 40;

/// `(centroid − p)/‖p‖` for the section through `p` with normal `u`, or
/// `None` when the section is unbounded or degenerate.
fn centroid_offset(cone: &ConeSpec, p: &Vector, u: &Vector) -> Option<Vector> {
    match cone.dual_margin(u) {
        Ok(m) if m > DEFAULT_DUAL_MARGIN => {}
        _ => return None,
    }
    let plane = Hyperplane::through(u.clone(), p).ok()?;
    let frame = Frame::of_hyperplane(&plane, p.clone());
    let c = cone.exact_section_centroid(&plane, &frame).ok()?;
    Some((c - p) / p.norm())
}

fn relative_residual(cone: &ConeSpec, p: &Vector, u: &Vector) -> f64 {
    centroid_offset(cone, p, u).map_or(PENALTY, |r| r.norm())
}

const NEWTON_STEPS: usize = 30;
const NEWTON_H: f64 = 1e-6;
const LINE_STEPS: usize = 40;

/// Newton's method on the slice `u·p = 1` for the log-Laplace transform
/// `φ(u) = log ∫_C e^{−u·x} dx`, which is strictly convex with gradient
/// `−n·c(u)`, `c(u)` the centroid of the section `u·x = 1`. Its minimizer on
/// the slice is the unique normal whose section through `p` has centroid
/// `p`. Only centroids are evaluated: the line search brackets the root of
/// the monotone directional derivative, so every accepted step decreases `φ`.
fn newton_polish<O>(cone: &ConeSpec, p: &Vector, u0: &Vector, target: f64, steps: usize, mut observe: O) -> (Vector, f64, usize)
where
    O: FnMut(&Vector, f64),
{
    let scale = u0.dot(p);
    let Some(mut r) = centroid_offset(cone, p, u0) else {
        return (u0.clone(), PENALTY, 0);
    };
    if !(scale > 0.0) {
        return (u0.clone(), r.norm(), 0);
    }
    let mut u = u0 / scale;
    let basis = orthonormal_complement(&p.normalize());
    let grad = |r: &Vector| Vector::from_iterator(basis.len(), basis.iter().map(|b| b.dot(r)));
    let at = |u: &Vector, dz: &Vector, t: f64| {
        let mut v = u.clone();
        for (b, w) in basis.iter().zip(dz.iter()) {
            v.axpy(t * w, b, 1.0);
        }
        v
    };
    let mut used = 0;
    while used < steps.min(NEWTON_STEPS) {
        if r.norm() <= target {
            break;
        }
        used += 1;
        let g = grad(&r);
        let h = NEWTON_H * u.norm();
        let mut jac = Matrix::zeros(basis.len(), basis.len());
        let mut usable = true;
        for (j, b) in basis.iter().enumerate() {
            match (centroid_offset(cone, p, &(&u + b * h)), centroid_offset(cone, p, &(&u - b * h))) {
                (Some(fwd), Some(back)) => jac.set_column(j, &((grad(&fwd) - grad(&back)) / (2.0 * h))),
                _ => usable = false,
            }
        }
        let jac = (&jac + jac.transpose()) * 0.5;
        // Descent for φ means positive slope of g along dz.
        let dz = match usable.then(|| jac.clone().lu().solve(&(-&g))).flatten() {
            Some(dz) if dz.dot(&g) > 0.0 => dz,
            _ => g.clone(),
        };
        let slope = |t: f64| centroid_offset(cone, p, &at(&u, &dz, t)).map(|rt| (grad(&rt).dot(&dz), rt));
        // `s(t)` decreases from `s0 > 0`; `φ` decreases while `s ≥ 0`.
        let s0 = g.dot(&dz);
        let mut accepted = match slope(1.0) {
            Some((s, rt)) if s >= -0.5 * s0 => Some((1.0, rt)),
            _ => None,
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..LINE_STEPS {
            if accepted.is_some() {
                break;
            }
            let mid = 0.5 * (lo + hi);
            match slope(mid) {
                Some((s, rt)) if s >= 0.0 => {
                    lo = mid;
                    if s <= 0.5 * s0 {
                        accepted = Some((mid, rt));
                    }
                }
                _ => hi = mid,
            }
        }
        if accepted.is_none() && lo > 0.0 {
            accepted = slope(lo).map(|(_, rt)| (lo, rt));
        }
        let Some((t, rt)) = accepted else {
            break;
        };
        u = at(&u, &dz, t);
        r = rt;
        observe(&u.normalize(), r.norm());
    }
    (u.normalize(), r.norm(), used)
}

/// Nelder–Mead on `f` from the simplex around `x0`; calls `observe` with the
/// best vertex after every iteration. Stops after `budget` iterations or when
/// the best value reaches `target`.
fn nelder_mead<F, O>(f: F, x0: &Vector, step: f64, budget: usize, target: f64, mut observe: O) -> (Vector, f64, usize)
where
    F: Fn(&Vector) -> f64,
    O: FnMut(&Vector, f64),
{
    let k = x0.len();
    let mut simplex: Vec<(Vector, f64)> = Vec::with_capacity(k + 1);
    simplex.push((x0.clone(), f(x0)));
    for i in 0..k {
        let mut x = x0.clone();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut used = 0;
    while used < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 <= target {
            break;
        }
        used += 1;
        let centroid = simplex[..k].iter().fold(Vector::zeros(k), |acc, (x, _)| acc + x) / k as f64;
        let worst = simplex[k].clone();
        let reflect = &centroid + (&centroid - &worst.0);
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand = &centroid + (&reflect - &centroid) * 2.0;
            let fe = f(&expand);
            simplex[k] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[k - 1].1 {
            simplex[k] = (reflect, fr);
        } else {
            let (toward, ft) = if fr < worst.1 { (&reflect, fr) } else { (&worst.0, worst.1) };
            let contract = &centroid + (toward - &centroid) * 0.5;
            let fc = f(&contract);
            if fc < ft {
                simplex[k] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = &best + (&v.0 - &best) * 0.5;
                    v.1 = f(&v.0);
                }
            }
        }
        let best = simplex.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        observe(&best.0, best.1);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx, used)
}

struct StartResult {
    normal: Vector,
    residual: f64,
    trace: StartTrace,
}

fn run_start(cone: &ConeSpec, p: &Vector, start: usize, initial: Vector, tol: f64, opts: &SearchOptions) -> StartResult {
    let target = 1e-3 * tol;
    let mut u0 = initial;
    let mut best = relative_residual(cone, p, &u0);
    let mut trace = StartTrace {
        start,
        iterates: Vec::new(),
    };
    let mut step = 0.05;
    let mut remaining = opts.iterations;
    while remaining > 0 && best > target {
        let basis = orthonormal_complement(&u0);
        let chart = |z: &Vector| -> Vector {
            let mut u = u0.clone();
            for (b, w) in basis.iter().zip(z.iter()) {
                u.axpy(*w, b, 1.0);
            }
            u.normalize()
        };
        // Squared residual is smooth near the optimum.
        let objective = |z: &Vector| relative_residual(cone, p, &chart(z)).powi(2);
        let z0 = Vector::zeros(basis.len());
        let budget = remaining.min(RECENTER_EVERY);
        let (z, fz, used) = nelder_mead(objective, &z0, step, budget, target * target, |z, f| {
            if opts.record_trace {
                trace.iterates.push(TracePoint {
                    u: chart(z).iter().copied().collect(),
                    f: f.sqrt(),
                });
            }
        });
        remaining -= used.max(1);
        let (candidate, value, steps) = newton_polish(cone, p, &chart(&z), target, remaining, |u, f| {
            if opts.record_trace {
                trace.iterates.push(TracePoint {
                    u: u.iter().copied().collect(),
                    f,
                });
            }
        });
        remaining -= steps;
        let (candidate, value) = if value < fz.sqrt() { (candidate, value) } else { (chart(&z), fz.sqrt()) };
        if value < best {
            step = ((&candidate - &u0).norm() * 2.0).clamp(1e-12, 0.05);
            u0 = candidate;
            best = value;
        } else {
            step = (step * 0.1).max(1e-12);
        }
    }
    StartResult {
        normal: u0,
        residual: best,
        trace,
    }
}

pub fn find_centroid_section_with(
    cone: &ConeSpec,
    p: &Vector,
    tol: f64,
    opts: &SearchOptions,
) -> Result<CentroidSearch> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if cone.contains(p, BOUNDARY_TOL)? != Membership::Interior {
        return Err(Error::NotInterior);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut initial = vec![cone.section_normal().clone()];
    for _ in 1..opts.starts.max(1) {
        let tilt = rng.random_range(0.0..0.7);
        initial.push(cone.random_section_normal(&mut rng, tilt));
    }
    let results: Vec<StartResult> = initial
        .into_par_iter()
        .enumerate()
        .map(|(i, u)| run_start(cone, p, i, u, tol, opts))
        .collect();
    let (start, winner) = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual).then(a.0.cmp(&b.0)))
        .unwrap();
    if winner.residual > tol {
        return Err(Error::SearchBudgetExhausted {
            best_residual: winner.residual,
        });
    }
    let plane = Hyperplane::through(winner.normal.clone(), p)?;
    let section = section_of(cone, &plane, opts.samples)?;
    let residual = (section.centroid() - p).norm() / p.norm();
    let lambda = cone.dim() as f64 + 2.0;
    let cap = p * lambda;
    let cap_warning = section
        .boundary_samples()
        .iter()
        .chain(section.vertices().unwrap_or(&[]).iter())
        .any(|s| cone.boundary_defect(&(&cap - s)) > BOUNDARY_TOL);
    Ok(CentroidSearch {
        section,
        residual,
        start,
        cap_warning,
        trace: if opts.record_trace {
            results.into_iter().map(|r| r.trace).collect()
        } else {
            Vec::new()
        },
    })
}

/// Two-sided check that the boundary of a symmetric section equals the
/// boundary intersection for twice its center: the larger of the gamma
/// points' distance to the section plane (relative to the section diameter)
/// and the boundary defect of the section's samples against `2p − C`.
pub fn section_boundary_equality(cone: &ConeSpec, section: &Section, tol: f64) -> Result<f64> {
    if cone.dim() != section.cone().dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            got: section.cone().dim(),
        });
    }
    let asym = symmetry_defect(section, section.requested_samples())?;
    if asym > tol {
        return Err(Error::Precondition(format!(
            "section is not centrally symmetric (defect {asym:e})"
        )));
    }
    let p = section.centroid();
    let a = p * 2.0;
    let curve = gamma_curve(cone, &a, section.requested_samples())?;
    let plane = section.hyperplane();
    let scale = section.sample_diameter();
    let off_plane = curve
        .gamma_points()
        .iter()
        .map(|g| plane.signed_distance(g).abs() / scale)
        .fold(0.0, f64::max);
    let off_boundary = section
        .boundary_samples()
        .iter()
        .map(|s| cone.reflected_defect(&a, s).abs())
        .fold(0.0, f64::max);
    Ok(off_plane.max(off_boundary))
}

/// Recomputes the centroid of `section` from boundary samples at doubled
/// density, independently of the stored exact centroid, and returns its
/// distance to `p` and the recomputation's error estimate, both relative to
/// `‖p‖`. Ellipsoidal sections use the center of a quadric fitted to the
/// samples; everything else the fan centroid.
pub fn verify_centroid(section: &Section, p: &Vector) -> Result<(f64, f64)> {
    let denser = section_of(section.cone(), section.hyperplane(), 2 * section.requested_samples())?;
    let local = denser.local_samples();
    let fitted = (denser.dim() >= 2)
        .then(|| fit_ellipsoid(&local).ok())
        .flatten()
        .filter(|fit| fit.is_ellipsoid_within(ELLIPSOID_RESIDUAL_TOL));
    let (c, err) = match fitted {
        Some(fit) => {
            let center = linalg::solve(&fit.quad_coeffs, &(&fit.lin_coeffs * -0.5))?;
            (denser.frame().to_global(&center), fit.residual * denser.reach())
        }
        None => crate::cone::centroid_of_section(&denser)?,
    };
    Ok(((c - p).norm() / p.norm(), err / p.norm()))
}
