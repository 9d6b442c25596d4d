//! The boundary-intersection set `Γ = ∂C ∩ ∂(a − C)` built by the chord
//! construction: every boundary point `x` of a bounded section `S` through
//! `λa` has a unique multiple `μx` on `Γ`, where the chord of `S` from `x`
//! through `λa` ends at `r(x)` and `λa = λμx + (1 − λμ)r(x)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{radial_extent, section_of, ConeFile, ConeSpec, Membership, Section, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{Hyperplane, Vector};

/// Tolerance for accepting the chord and scale inputs as exact.
const SEGMENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GammaSample {
    /// `x ∈ ∂S`.
    pub base_point: Vector,
    /// `r(x) ∈ ∂S`, the far end of the chord through `λa`.
    pub opposite_point: Vector,
    /// `μₓ`.
    pub scale: f64,
    /// `μₓ · x`.
    pub gamma_point: Vector,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct GammaCurve {
    pub a: Vector,
    pub lambda: f64,
    pub samples: Vec<GammaSample>,
    pub section_used: Section,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSampleRecord {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub mu: f64,
    pub g: Vec<f64>,
}

/// Serialized form of a [`GammaCurve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCurveRecord {
    pub a: Vec<f64>,
    pub lambda: f64,
    pub samples: Vec<GammaSampleRecord>,
}

fn coords(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

impl GammaCurve {
    pub fn gamma_points(&self) -> Vec<Vector> {
        self.samples.iter().map(|s| s.gamma_point.clone()).collect()
    }

    pub fn to_record(&self) -> GammaCurveRecord {
        GammaCurveRecord {
            a: coords(&self.a),
            lambda: self.lambda,
            samples: self
                .samples
                .iter()
                .map(|s| GammaSampleRecord {
                    x: coords(&s.base_point),
                    r: coords(&s.opposite_point),
                    mu: s.scale,
                    g: coords(&s.gamma_point),
                })
                .collect(),
        }
    }
}

/// Far endpoint of the chord of `section` that starts at the boundary point
/// `x` and passes through the relative-interior point `through`.
pub fn chord_opposite_endpoint(section: &Section, x: &Vector, through: &Vector) -> Result<Vector> {
    let cone = section.cone();
    let plane = section.hyperplane();
    let scale = section.reach().max(f64::MIN_POSITIVE);
    if plane.signed_distance(x).abs() > SEGMENT_TOL * scale.max(x.norm())
        || cone.boundary_defect(x).abs() > 10.0 * BOUNDARY_TOL
    {
        return Err(Error::Precondition("chord start is not on the section boundary".into()));
    }
    if plane.signed_distance(through).abs() > SEGMENT_TOL * scale.max(through.norm())
        || cone.boundary_defect(through) >= -10.0 * BOUNDARY_TOL
    {
        return Err(Error::Precondition("chord pivot is not interior to the section".into()));
    }
    let dir = (through - x).normalize();
    let reach = radial_extent(cone, through, &dir)?;
    Ok(through + dir * reach)
}

/// `μₓ` from the convex combination `λa = λμₓx + (1 − λμₓ)r`.
pub fn gamma_scale(x: &Vector, r: &Vector, a: &Vector, lambda: f64) -> Result<f64> {
    let chord = x - r;
    let len = chord.norm();
    if len == 0.0 {
        return Err(Error::Precondition("chord endpoints coincide".into()));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let pivot = a * lambda;
    let t = (&pivot - r).norm() / len;
    let mu = t / lambda;
    let residual = (&pivot - (x * (lambda * mu) + r * (1.0 - lambda * mu))).norm();
    if residual > SEGMENT_TOL * a.norm().max(len) {
        return Err(Error::Precondition(format!(
            "λa lies off the chord (residual {residual:e})"
        )));
    }
    if !(mu > 0.0 && mu < 1.0 / lambda) {
        return Err(Error::Precondition(format!("scale {mu} outside (0, 1/λ)")));
    }
    Ok(mu)
}

/// Samples `Γ` for the interior point `a` via the canonical section through `a`.
pub fn gamma_curve(cone: &ConeSpec, a: &Vector, num_samples: usize) -> Result<GammaCurve> {
    if cone.contains(a, BOUNDARY_TOL)? != Membership::Interior {
        return Err(Error::NotInterior);
    }
    let normal = cone.section_normal().clone();
    let plane = Hyperplane::through(normal, a)?;
    let lambda = plane.offset() / plane.normal().dot(a);
    let section = section_of(cone, &plane, num_samples)?;
    let pivot = a * lambda;
    let samples = section
        .boundary_samples()
        .par_iter()
        .map(|x| {
            let r = chord_opposite_endpoint(&section, x, &pivot)?;
            let mu = gamma_scale(x, &r, a, lambda)?;
            Ok(GammaSample {
                base_point: x.clone(),
                gamma_point: x * mu,
                opposite_point: r,
                scale: mu,
                lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaCurve {
        a: a.clone(),
        lambda,
        samples,
        section_used: section,
    })
}

/// Outcome of the central-symmetry check on a sampled `Γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCheck {
    /// Largest boundary defect of a reflected sample `a − g` for `C` or `a − C`.
    pub max_violation: f64,
    /// Samples whose reflection misses either boundary by more than `tol`.
    pub violations: usize,
}

fn same_cone(a: &ConeSpec, b: &ConeSpec) -> bool {
    a.dim() == b.dim() && ConeFile::from_cone(a) == ConeFile::from_cone(b)
}

/// Reflects every gamma point through `a/2` and measures how far `a − g`
/// is from lying on both `∂C` and `∂(a − C)`.
pub fn gamma_central_symmetry_check(cone: &ConeSpec, curve: &GammaCurve, tol: f64) -> Result<SymmetryCheck> {
    if !same_cone(cone, curve.section_used.cone()) {
        return Err(Error::Precondition("curve was built for a different cone".into()));
    }
    let a = &curve.a;
    let mut check = SymmetryCheck {
        max_violation: 0.0,
        violations: 0,
    };
    for s in &curve.samples {
        let reflected = a - &s.gamma_point;
        let on_cone = cone.boundary_defect(&reflected).abs();
        let on_reflected = cone.reflected_defect(a, &reflected).abs();
        let v = on_cone.max(on_reflected);
        check.max_violation = check.max_violation.max(v);
        if v > tol {
            check.violations += 1;
        }
    }
    Ok(check)
}
