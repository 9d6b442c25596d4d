use serde::{Deserialize, Serialize};

use super::{ConeSpec, DEFAULT_DUAL_MARGIN};
use crate::error::{Error, Result};
use crate::linalg::{self, Frame, Hyperplane, Matrix, Vector};
use crate::sphere;

/// Bisection steps for boundary location after the bracket is found.
pub const BISECTION_STEPS: usize = 60;
const MAX_DOUBLINGS: usize = 200;
pub const MAX_VERTEX_DIRECTIONS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentroidMethod {
    /// Center of the ellipsoidal section of a quadratic cone.
    Analytic,
    /// Exact centroid of the polytope spanned by the section vertices.
    Polytope,
}

/// Distance from the interior point `origin` to the cone boundary along the
/// unit direction `dir`, by doubling then bisection. The returned distance is
/// on the inner side of the boundary.
pub fn radial_extent(cone: &ConeSpec, origin: &Vector, dir: &Vector) -> Result<f64> {
    if cone.boundary_defect(origin) > 0.0 {
        return Err(Error::Precondition("ray origin lies outside the cone".into()));
    }
    let mut hi = origin.norm().max(f64::MIN_POSITIVE.sqrt());
    let mut lo = 0.0;
    let mut doublings = 0;
    while cone.boundary_defect(&(origin + dir * hi)) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::UnboundedSection("ray never leaves the cone".into()));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cone.boundary_defect(&(origin + dir * mid)) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// A bounded hyperplane section of a cone together with boundary samples.
#[derive(Debug, Clone)]
pub struct Section {
    cone: ConeSpec,
    hyperplane: Hyperplane,
    /// Frame of the hyperplane anchored at the interior point.
    frame: Frame,
    requested_samples: usize,
    directions: Vec<Vector>,
    radii: Vec<f64>,
    reach: f64,
    boundary_samples: Vec<Vector>,
    vertices: Option<Vec<Vector>>,
    centroid: Vector,
    centroid_error: f64,
    centroid_method: CentroidMethod,
}

/// Section of `cone` by `hyperplane` with boundary samples along
/// `num_samples` evenly spread in-plane directions.
pub fn section_of(cone: &ConeSpec, hyperplane: &Hyperplane, num_samples: usize) -> Result<Section> {
    section_of_with_margin(cone, hyperplane, num_samples, DEFAULT_DUAL_MARGIN)
}

/// As [`section_of`] with an explicit strictness margin for the normal.
pub fn section_of_with_margin(
    cone: &ConeSpec,
    hyperplane: &Hyperplane,
    num_samples: usize,
    margin: f64,
) -> Result<Section> {
    if hyperplane.dim() != cone.dim() {
        return Err(Error::DimensionMismatch {
            expected: cone.dim(),
            got: hyperplane.dim(),
        });
    }
    let u = hyperplane.normal();
    let strictness = cone.dual_margin(u)?;
    if strictness <= margin {
        return Err(Error::UnboundedSection(format!(
            "normal strictness {strictness:e} does not exceed margin {margin:e}"
        )));
    }
    if hyperplane.offset() <= 0.0 {
        return Err(Error::UnboundedSection(
            "hyperplane misses the cone interior".into(),
        ));
    }
    let center = cone.center_direction();
    let interior = center * (hyperplane.offset() / u.dot(center));
    let frame = Frame::of_hyperplane(hyperplane, interior);
    let m = frame.dim();
    let directions = sphere::directions(m, num_samples);
    let radii = directions
        .iter()
        .map(|d| radial_extent(cone, frame.origin(), &frame.direction_to_global(d)))
        .collect::<Result<Vec<_>>>()?;
    let boundary_samples = directions
        .iter()
        .zip(&radii)
        .map(|(d, r)| frame.to_global(&(d * *r)))
        .collect();
    let vertices = cone.section_vertices(hyperplane);
    let centroid = cone.exact_section_centroid(hyperplane, &frame)?;
    let centroid_method = if vertices.is_some() {
        CentroidMethod::Polytope
    } else {
        CentroidMethod::Analytic
    };
    let reach = radii.iter().fold(0.0f64, |a, &b| a.max(b));
    let centroid_error = 64.0 * f64::EPSILON * (frame.origin().norm() + reach);
    Ok(Section {
        cone: cone.clone(),
        hyperplane: hyperplane.clone(),
        frame,
        requested_samples: num_samples,
        directions,
        radii,
        reach,
        boundary_samples,
        vertices,
        centroid,
        centroid_error,
        centroid_method,
    })
}

impl Section {
    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn hyperplane(&self) -> &Hyperplane {
        &self.hyperplane
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Dimension of the section body (ambient dimension minus one).
    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn interior_point(&self) -> &Vector {
        self.frame.origin()
    }

    pub fn boundary_samples(&self) -> &[Vector] {
        &self.boundary_samples
    }

    /// Boundary samples in in-plane coordinates relative to the interior point.
    pub fn local_samples(&self) -> Vec<Vector> {
        self.directions.iter().zip(&self.radii).map(|(d, r)| d * *r).collect()
    }

    pub fn requested_samples(&self) -> usize {
        self.requested_samples
    }

    /// Exact polytope vertices, for sections of polyhedral cones.
    pub fn vertices(&self) -> Option<&[Vector]> {
        self.vertices.as_deref()
    }

    pub fn centroid(&self) -> &Vector {
        &self.centroid
    }

    pub fn centroid_error(&self) -> f64 {
        self.centroid_error
    }

    pub fn centroid_method(&self) -> CentroidMethod {
        self.centroid_method
    }

    /// In-plane frame anchored at the centroid.
    pub fn centroid_frame(&self) -> Frame {
        Frame::new(self.centroid.clone(), self.frame.basis().to_vec())
    }

    /// Distance from an in-plane interior `point` to the section boundary
    /// along the in-plane unit direction `dir` (ambient coordinates).
    pub fn radial_extent(&self, point: &Vector, dir: &Vector) -> Result<f64> {
        radial_extent(&self.cone, point, dir)
    }

    /// Unit directions from `from` to the section vertices, when the section
    /// is a polytope with at most [`MAX_VERTEX_DIRECTIONS`] vertices. Denser
    /// polytopes are left to the regular direction sets.
    pub fn vertex_directions(&self, from: &Vector) -> Vec<Vector> {
        match &self.vertices {
            Some(vs) if vs.len() <= MAX_VERTEX_DIRECTIONS => vs
                .iter()
                .filter_map(|v| {
                    let d = v - from;
                    let n = d.norm();
                    (n > 0.0).then(|| d / n)
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Largest sampled distance from the interior point to the boundary.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Diameter of the boundary samples.
    pub fn sample_diameter(&self) -> f64 {
        linalg::diameter(&self.boundary_samples)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Fan-triangulated centroid of the boundary polytope sampled along
/// `target` directions from the section's interior point, in local coordinates.
fn fan_centroid(section: &Section, target: usize) -> Result<Vector> {
    let frame = section.frame();
    let cone = section.cone();
    let m = frame.dim();
    let extent = |d: &Vector| radial_extent(cone, frame.origin(), &frame.direction_to_global(d));
    let degenerate = || Error::Degenerate("boundary samples are not affinely spanning".into());
    match m {
        1 => {
            let hi = extent(&linalg::vector(&[1.0]))?;
            let lo = extent(&linalg::vector(&[-1.0]))?;
            if hi + lo <= 0.0 {
                return Err(degenerate());
            }
            Ok(linalg::vector(&[0.5 * (hi - lo)]))
        }
        2 => {
            let mut pts: Vec<Vector> = sphere::directions(2, target)
                .iter()
                .map(|d| extent(d).map(|r| d * r))
                .collect::<Result<_>>()?;
            if let Some(vs) = section.vertices() {
                pts.extend(vs.iter().map(|v| frame.to_local(v)));
            }
            pts.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
            let (mut area, mut moment) = (0.0, Vector::zeros(2));
            for i in 0..pts.len() {
                let a = &pts[i];
                let b = &pts[(i + 1) % pts.len()];
                let w = 0.5 * (a[0] * b[1] - a[1] * b[0]);
                area += w;
                moment += (a + b) * (w / 3.0);
            }
            if area <= 0.0 {
                return Err(degenerate());
            }
            Ok(moment / area)
        }
        _ => {
            let mesh = sphere::direction_mesh(m, target);
            let pts: Vec<Vector> = mesh
                .directions
                .iter()
                .map(|d| extent(d).map(|r| d * r))
                .collect::<Result<_>>()?;
            let (mut volume, mut moment) = (0.0, Vector::zeros(m));
            let scale = factorial(m);
            for s in &mesh.simplices {
                let cols: Vec<Vector> = s.iter().map(|&i| pts[i].clone()).collect();
                let vol = linalg::determinant(&Matrix::from_columns(&cols)).abs() / scale;
                let sum = cols.iter().fold(Vector::zeros(m), |acc, c| acc + c);
                volume += vol;
                moment += sum * (vol / (m as f64 + 1.0));
            }
            if volume <= 0.0 {
                return Err(degenerate());
            }
            Ok(moment / volume)
        }
    }
}

/// Centroid of the sampled boundary polytope by fan triangulation from the
/// interior point, with an error estimate from the displacement under doubled
/// sampling. Independent of the representation-specific exact centroid stored
/// on the section.
///
/// The fan error decays like `h²` in the mesh width, so doubling the sample
/// count divides it by `ρ = 2^{2/(m−1)}` in an `m`-dimensional section. In the
/// plane the two estimates are Richardson-extrapolated; beyond it the finer one
/// is returned with a margin covering `ρ` down to `2^{2/3}`.
pub fn centroid_of_section(section: &Section) -> Result<(Vector, f64)> {
    let n = section.requested_samples().max(section.dim() + 1);
    let coarse = fan_centroid(section, n)?;
    let fine = fan_centroid(section, 2 * n)?;
    let diff = (&fine - &coarse).norm();
    let frame = section.frame();
    if section.dim() == 2 {
        let extrapolated = &fine + (&fine - &coarse) / 3.0;
        Ok((frame.to_global(&extrapolated), diff))
    } else {
        Ok((frame.to_global(&fine), 2.0 * diff))
    }
}
