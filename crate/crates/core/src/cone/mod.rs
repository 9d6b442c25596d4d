//! Closed pointed convex cones behind a uniform oracle contract.
//!
//! Three representations share one interface: a signed, scale-free boundary
//! defect (negative inside, zero on the boundary, positive outside), a test
//! for bounded-section normals, and exact section data where the
//! representation admits it.

mod file;
mod section;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormal_complement, symmetric_eigen, Frame, Hyperplane, Matrix, Vector};
use crate::polytope;
use crate::sphere;

pub use file::ConeFile;
pub use section::{centroid_of_section, radial_extent, section_of, section_of_with_margin, CentroidMethod, Section};

/// Strictness margin for bounded-section normals (cosine-like units).
pub const DEFAULT_DUAL_MARGIN: f64 = 1e-6;

/// Tolerance used to classify bisection output as boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeKind {
    Quadratic,
    Polyhedral,
    BaseBody,
}

/// Inward facet normals of a polyhedral cone, with an optional cyclic index for
/// fast lookups in ambient dimension three.
#[derive(Debug)]
struct FacetSet {
    normals: Vec<Vector>,
    /// Extreme generators (indices into the generator list).
    extreme: Vec<usize>,
    cyclic: Option<CyclicIndex>,
}

/// Angular sector table of a 3D polyhedral cone seen through its witness plane.
#[derive(Debug)]
struct CyclicIndex {
    witness: Vector,
    frame: Frame,
    /// Sorted sector start angles; sector `i` is bounded by facet `facet[i]`.
    angles: Vec<f64>,
    facet: Vec<usize>,
}

#[derive(Debug)]
enum Variant {
    Quadratic {
        q: Matrix,
        time_axis: Vector,
        /// Linear map taking the cone to the Lorentz cone `y0 ≥ ‖y_rest‖`.
        to_lorentz: Matrix,
        /// Inverse transpose of `to_lorentz`; maps dual vectors likewise.
        dual_to_lorentz: Matrix,
    },
    Polyhedral {
        rays: Vec<Vector>,
        facets: FacetSet,
    },
    BaseBody {
        base: Hyperplane,
        vertices: Vec<Vector>,
        facets: FacetSet,
    },
}

#[derive(Debug)]
struct ConeInner {
    dim: usize,
    variant: Variant,
    /// Unit vector strictly positive on the cone minus the origin.
    section_normal: Vector,
    /// Unit deep-interior direction.
    center: Vector,
}

/// A closed pointed full-dimensional convex cone. Cheap to clone.
#[derive(Debug, Clone)]
pub struct ConeSpec {
    inner: Arc<ConeInner>,
}

fn check_vector(v: &Vector, dim: usize, what: &'static str) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    if !linalg::is_finite(v) {
        return Err(Error::NonFinite(what));
    }
    Ok(())
}

/// Perceptron search for `w` with `w · g > 0` for every generator.
fn pointedness_witness(units: &[Vector]) -> Option<Vector> {
    let mut w = linalg::mean(units);
    if w.norm() < 1e-12 {
        w = units[0].clone();
    }
    for _ in 0..20_000 {
        let wn = w.normalize();
        let (worst, margin) = units
            .iter()
            .enumerate()
            .map(|(i, g)| (i, g.dot(&wn)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if margin > 1e-9 {
            return Some(wn);
        }
        w += &units[worst];
    }
    None
}

/// Computes inward facet normals of `cone(generators)` by central projection
/// onto the plane `witness · x = 1`.
fn build_facets(generators: &[Vector], witness: &Vector) -> Result<FacetSet> {
    let d = witness.len();
    let frame = Frame::new(witness.clone(), orthonormal_complement(witness));
    let local: Vec<Vector> = generators
        .iter()
        .map(|g| frame.to_local(&(g / witness.dot(g))))
        .collect();

    // (outward local normal, offset) pairs: ν · y ≤ β on the base polytope.
    let (local_facets, extreme): (Vec<(Vector, f64)>, Vec<usize>) = if d == 2 {
        let (imin, _) = local.iter().enumerate().min_by(|a, b| a.1[0].total_cmp(&b.1[0])).unwrap();
        let (imax, _) = local.iter().enumerate().max_by(|a, b| a.1[0].total_cmp(&b.1[0])).unwrap();
        if local[imax][0] - local[imin][0] <= 1e-12 {
            return Err(Error::InvalidCone("generators span a single ray".into()));
        }
        (
            vec![
                (linalg::vector(&[1.0]), local[imax][0]),
                (linalg::vector(&[-1.0]), -local[imin][0]),
            ],
            vec![imin, imax],
        )
    } else {
        let fs = polytope::facets(&local)?;
        let mut extreme: Vec<usize> = fs.iter().flat_map(|f| f.members.iter().copied()).collect();
        extreme.sort_unstable();
        extreme.dedup();
        (fs.into_iter().map(|f| (f.normal, f.offset)).collect(), extreme)
    };

    let normals: Vec<Vector> = local_facets
        .iter()
        .map(|(nu, beta)| {
            let n = witness * *beta - frame.direction_to_global(nu);
            n.normalize()
        })
        .collect();

    let cyclic = if d == 3 && normals.len() > 24 {
        let hull = polytope::hull_2d(&local);
        let hull_pts: Vec<Vector> = hull.iter().map(|&i| local[i].clone()).collect();
        let c = linalg::mean(&hull_pts);
        // polytope::facets emits the 2D facets in hull order: facet i joins hull[i] and hull[i+1].
        let mut sectors: Vec<(f64, usize)> = hull_pts
            .iter()
            .enumerate()
            .map(|(i, p)| ((p[1] - c[1]).atan2(p[0] - c[0]), i))
            .collect();
        sectors.sort_by(|a, b| a.0.total_cmp(&b.0));
        let origin = frame.to_global(&linalg::vector(&[c[0], c[1]]));
        Some(CyclicIndex {
            witness: witness.clone(),
            frame: Frame::new(origin, frame.basis().to_vec()),
            angles: sectors.iter().map(|s| s.0).collect(),
            facet: sectors.iter().map(|s| s.1).collect(),
        })
    } else {
        None
    };

    Ok(FacetSet { normals, extreme, cyclic })
}

impl FacetSet {
    fn defect(&self, x: &Vector, norm: f64) -> f64 {
        if let Some(cyc) = &self.cyclic {
            let h = cyc.witness.dot(x);
            if h > 1e-300 * norm {
                // Central projection onto the witness plane.
                let p = x / h;
                let y = cyc.frame.to_local(&p);
                let phi = y[1].atan2(y[0]);
                let n = cyc.angles.len();
                let k = match cyc.angles.partition_point(|&a| a <= phi) {
                    0 => n - 1,
                    i => i - 1,
                };
                let mut worst = f64::NEG_INFINITY;
                for s in [k + n - 1, k, k + 1] {
                    let f = cyc.facet[s % n];
                    worst = worst.max(-self.normals[f].dot(x));
                }
                return worst / norm;
            }
        }
        self.normals
            .iter()
            .map(|n| -n.dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
            / norm
    }
}

impl ConeSpec {
    fn from_inner(inner: ConeInner) -> Self {
        Self { inner: Arc::new(inner) }
    }

    /// Cone `{x : xᵀQx ≥ 0, time_axis · Qx ≥ 0}` for `Q` of signature `(1, n)`.
    pub fn quadratic(q: Matrix, time_axis: Vector) -> Result<Self> {
        let d = q.nrows();
        if d < 2 {
            return Err(Error::InvalidCone("cones need dimension at least 2".into()));
        }
        if q.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: q.ncols(),
            });
        }
        check_vector(&time_axis, d, "time axis")?;
        let eig = symmetric_eigen(&q)?;
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        let positive = eig.eigenvalues.iter().filter(|&&l| l > 1e-10 * scale).count();
        let negative = eig.eigenvalues.iter().filter(|&&l| l < -1e-10 * scale).count();
        if positive != 1 || negative != d - 1 {
            return Err(Error::InvalidCone(format!(
                "quadratic form must have signature (1, {}), eigenvalues {:?}",
                d - 1,
                eig.eigenvalues
            )));
        }
        let qt = &q * &time_axis;
        if time_axis.dot(&qt) <= 1e-12 * scale * time_axis.norm_squared() {
            return Err(Error::InvalidCone("time axis must satisfy tᵀQt > 0".into()));
        }
        let mut w = Matrix::zeros(d, d);
        for (i, (l, v)) in eig.eigenvalues.iter().zip(&eig.eigenvectors).enumerate() {
            w.set_row(i, &(v.transpose() * l.abs().sqrt()));
        }
        if (w.row(0) * &time_axis)[0] < 0.0 {
            let r = -w.row(0).into_owned();
            w.set_row(0, &r);
        }
        let w_inv = w
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidCone("quadratic form is singular".into()))?;
        let dual = w_inv.transpose();
        let section_normal = w.row(0).transpose().normalize();
        let center = w_inv.column(0).into_owned().normalize();
        Ok(Self::from_inner(ConeInner {
            dim: d,
            variant: Variant::Quadratic {
                q,
                time_axis,
                to_lorentz: w,
                dual_to_lorentz: dual,
            },
            section_normal,
            center,
        }))
    }

    /// The Lorentz cone `x0 ≥ ‖(x1, …, xn)‖` in dimension `dim`.
    pub fn lorentz(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidCone("cones need dimension at least 2".into()));
        }
        let mut q = -Matrix::identity(dim, dim);
        q[(0, 0)] = 1.0;
        Self::quadratic(q, linalg::unit(dim, 0))
    }

    fn generator_checks(generators: &[Vector], dim: usize, what: &'static str) -> Result<Vec<Vector>> {
        if dim < 2 {
            return Err(Error::InvalidCone("cones need dimension at least 2".into()));
        }
        if generators.len() < dim {
            return Err(Error::InvalidCone(format!(
                "{} {what} cannot span dimension {dim}",
                generators.len()
            )));
        }
        let mut units = Vec::with_capacity(generators.len());
        for g in generators {
            check_vector(g, dim, what)?;
            let n = g.norm();
            if n == 0.0 {
                return Err(Error::InvalidCone(format!("zero vector among {what}")));
            }
            units.push(g / n);
        }
        let mut with_origin = units.clone();
        with_origin.push(Vector::zeros(dim));
        let (rank, _) = linalg::affine_rank(&with_origin, 1e-9)?;
        if rank < dim {
            return Err(Error::InvalidCone(format!(
                "{what} span only {rank} of {dim} dimensions"
            )));
        }
        Ok(units)
    }

    /// Cone generated by nonnegative combinations of `rays`.
    pub fn polyhedral(rays: Vec<Vector>) -> Result<Self> {
        let dim = rays.first().map(|r| r.len()).unwrap_or(0);
        let units = Self::generator_checks(&rays, dim, "rays")?;
        let witness = pointedness_witness(&units)
            .ok_or_else(|| Error::InvalidCone("rays do not generate a pointed cone".into()))?;
        let facets = build_facets(&rays, &witness)?;
        let section_normal = facets
            .normals
            .iter()
            .fold(Vector::zeros(dim), |acc, n| acc + n)
            .normalize();
        let center = facets
            .extreme
            .iter()
            .fold(Vector::zeros(dim), |acc, &i| acc + &units[i])
            .normalize();
        Ok(Self::from_inner(ConeInner {
            dim,
            variant: Variant::Polyhedral { rays, facets },
            section_normal,
            center,
        }))
    }

    /// Cone over the convex hull of `vertices`, which lie in `base`.
    pub fn base_body(base: Hyperplane, vertices: Vec<Vector>) -> Result<Self> {
        let dim = base.dim();
        if base.offset().abs() <= 1e-12 {
            return Err(Error::InvalidCone("base hyperplane passes through the origin".into()));
        }
        let base = if base.offset() < 0.0 {
            Hyperplane::new(-base.normal().clone(), -base.offset())?
        } else {
            base
        };
        let scale = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for v in &vertices {
            check_vector(v, dim, "base vertices")?;
            if base.signed_distance(v).abs() > 1e-9 * scale.max(1.0) {
                return Err(Error::InvalidCone("base vertex off the base hyperplane".into()));
            }
        }
        Self::generator_checks(&vertices, dim, "base vertices")?;
        let witness = base.normal().clone();
        let facets = build_facets(&vertices, &witness)?;
        let center = facets
            .extreme
            .iter()
            .fold(Vector::zeros(dim), |acc, &i| acc + &vertices[i])
            .normalize();
        Ok(Self::from_inner(ConeInner {
            dim,
            variant: Variant::BaseBody {
                base,
                vertices,
                facets,
            },
            section_normal: witness,
            center,
        }))
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn kind(&self) -> ConeKind {
        match self.inner.variant {
            Variant::Quadratic { .. } => ConeKind::Quadratic,
            Variant::Polyhedral { .. } => ConeKind::Polyhedral,
            Variant::BaseBody { .. } => ConeKind::BaseBody,
        }
    }

    /// Canonical bounded-section normal (unit, strictly positive on the cone).
    pub fn section_normal(&self) -> &Vector {
        &self.inner.section_normal
    }

    /// Unit deep-interior direction used to anchor sections.
    pub fn center_direction(&self) -> &Vector {
        &self.inner.center
    }

    /// Quadratic form and time axis, for quadratic cones.
    pub fn quadratic_form(&self) -> Option<(&Matrix, &Vector)> {
        match &self.inner.variant {
            Variant::Quadratic { q, time_axis, .. } => Some((q, time_axis)),
            _ => None,
        }
    }

    /// Rays or base vertices for polyhedral representations.
    pub fn generators(&self) -> Option<&[Vector]> {
        match &self.inner.variant {
            Variant::Quadratic { .. } => None,
            Variant::Polyhedral { rays, .. } => Some(rays),
            Variant::BaseBody { vertices, .. } => Some(vertices),
        }
    }

    pub fn base_hyperplane(&self) -> Option<&Hyperplane> {
        match &self.inner.variant {
            Variant::BaseBody { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Inward unit facet normals, for polyhedral representations.
    pub fn facet_normals(&self) -> Option<&[Vector]> {
        match &self.inner.variant {
            Variant::Quadratic { .. } => None,
            Variant::Polyhedral { facets, .. } | Variant::BaseBody { facets, .. } => Some(&facets.normals),
        }
    }

    fn extreme_generators(&self) -> Option<Vec<&Vector>> {
        match &self.inner.variant {
            Variant::Quadratic { .. } => None,
            Variant::Polyhedral { rays, facets } => Some(facets.extreme.iter().map(|&i| &rays[i]).collect()),
            Variant::BaseBody { vertices, facets, .. } => {
                Some(facets.extreme.iter().map(|&i| &vertices[i]).collect())
            }
        }
    }

    /// Signed boundary defect of `x`: negative inside, zero on the boundary,
    /// positive outside. Homogeneous of degree zero; roughly the distance to
    /// the boundary relative to `‖x‖` (exactly so for the Lorentz cone).
    pub fn boundary_defect(&self, x: &Vector) -> f64 {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        match &self.inner.variant {
            Variant::Quadratic { to_lorentz, .. } => {
                let y = to_lorentz * x;
                let rest = y.rows(1, y.len() - 1).norm();
                (rest - y[0]) / (std::f64::consts::SQRT_2 * y.norm())
            }
            Variant::Polyhedral { facets, .. } | Variant::BaseBody { facets, .. } => facets.defect(x, norm),
        }
    }

    /// Boundary defect of `x` with respect to the reflected cone `a − C`.
    pub fn reflected_defect(&self, a: &Vector, x: &Vector) -> f64 {
        self.boundary_defect(&(a - x))
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<Membership> {
        check_vector(x, self.dim(), "point")?;
        let d = self.boundary_defect(x);
        Ok(if d.abs() <= tol {
            Membership::Boundary
        } else if d < 0.0 {
            Membership::Interior
        } else {
            Membership::Outside
        })
    }

    /// Strictness of `u` as a bounded-section normal: positive iff `u` is
    /// strictly positive on the cone minus the origin. Cosine-like units.
    pub fn dual_margin(&self, u: &Vector) -> Result<f64> {
        check_vector(u, self.dim(), "normal")?;
        let un = u.norm();
        if un == 0.0 {
            return Err(Error::Degenerate("zero normal".into()));
        }
        Ok(match &self.inner.variant {
            Variant::Quadratic { dual_to_lorentz, .. } => {
                let v = dual_to_lorentz * u;
                let rest = v.rows(1, v.len() - 1).norm();
                (v[0] - rest) / (std::f64::consts::SQRT_2 * v.norm())
            }
            _ => self
                .extreme_generators()
                .unwrap()
                .iter()
                .map(|g| g.dot(u) / (g.norm() * un))
                .fold(f64::INFINITY, f64::min),
        })
    }

    /// Whether hyperplanes with normal `u` cut bounded sections, using the
    /// default strictness margin.
    pub fn dual_interior_contains(&self, u: &Vector) -> Result<bool> {
        self.dual_interior_contains_with(u, DEFAULT_DUAL_MARGIN)
    }

    pub fn dual_interior_contains_with(&self, u: &Vector, margin: f64) -> Result<bool> {
        Ok(self.dual_margin(u)? > margin)
    }

    /// Vertices of the section by `plane` (polyhedral representations only).
    pub fn section_vertices(&self, plane: &Hyperplane) -> Option<Vec<Vector>> {
        let gens = self.extreme_generators()?;
        let u = plane.normal();
        Some(gens.iter().map(|g| *g * (plane.offset() / u.dot(g))).collect())
    }

    /// Exact centroid of the section by `plane`, where the representation
    /// admits one: the ellipsoid center for quadratic cones and the polytope
    /// centroid otherwise.
    pub fn exact_section_centroid(&self, plane: &Hyperplane, frame: &Frame) -> Result<Vector> {
        match &self.inner.variant {
            Variant::Quadratic { q, .. } => {
                let m = frame.dim();
                let b = Matrix::from_columns(frame.basis());
                let c0 = frame.origin();
                let bqb = b.transpose() * q * &b;
                let bqc = b.transpose() * (q * c0);
                let y = if m == 0 {
                    Vector::zeros(0)
                } else {
                    -linalg::solve(&bqb, &bqc)?
                };
                Ok(frame.to_global(&y))
            }
            _ => {
                let verts = self.section_vertices(plane).unwrap();
                let local: Vec<Vector> = verts.iter().map(|v| frame.to_local(v)).collect();
                let (_, c) = polytope::centroid_volume(&local)?;
                Ok(frame.to_global(&c))
            }
        }
    }

    /// Random bounded-section normal: the canonical normal tilted toward a
    /// random direction by `tilt ∈ [0, 1)` of the way to the dual boundary.
    pub fn random_section_normal<R: Rng + ?Sized>(&self, rng: &mut R, tilt: f64) -> Vector {
        let c = self.section_normal().clone();
        let perp = orthonormal_complement(&c);
        let g = sphere::random_unit(perp.len(), rng);
        let dir = perp.iter().zip(g.iter()).fold(Vector::zeros(self.dim()), |acc, (p, w)| acc + p * *w);
        let margin_at = |t: f64| self.dual_margin(&(&c + &dir * t)).unwrap_or(-1.0);
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while margin_at(hi) > 0.0 && hi < 1e6 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if margin_at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (&c + &dir * (lo * tilt)).normalize()
    }

    /// Random interior point: the center of the canonical unit-height section
    /// pushed toward a random boundary direction by `depth ∈ [0, 1)`.
    pub fn random_interior_point<R: Rng + ?Sized>(&self, rng: &mut R, depth: f64) -> Vector {
        let center = self.center_direction();
        let n = self.section_normal();
        let plane = Hyperplane::new(n.clone(), 1.0).expect("unit normal");
        let origin = center / n.dot(center);
        let frame = Frame::of_hyperplane(&plane, origin.clone());
        let g = sphere::random_unit(frame.dim(), rng);
        let dir = frame.direction_to_global(&g);
        let reach = radial_extent(self, &origin, &dir).unwrap_or(0.0);
        origin + dir * (reach * depth)
    }

    /// The cone's canonical interior point at unit height along the section normal.
    pub fn axis_point(&self) -> Vector {
        let c = self.center_direction();
        c / self.section_normal().dot(c)
    }

    /// Applies the invertible linear map `m` to the cone.
    pub fn transformed(&self, m: &Matrix) -> Result<Self> {
        let m_inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("transformation is singular".into()))?;
        match &self.inner.variant {
            Variant::Quadratic { q, time_axis, .. } => {
                let q2 = m_inv.transpose() * q * &m_inv;
                let q2 = (&q2 + q2.transpose()) * 0.5;
                Self::quadratic(q2, m * time_axis)
            }
            Variant::Polyhedral { rays, .. } => Self::polyhedral(rays.iter().map(|r| m * r).collect()),
            Variant::BaseBody { base, vertices, .. } => {
                let normal = m_inv.transpose() * base.normal();
                let plane = Hyperplane::new(normal, base.offset())?;
                Self::base_body(plane, vertices.iter().map(|v| m * v).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square_cone() -> ConeSpec {
        ConeSpec::polyhedral(vec![
            vector(&[1., 1., 1.]),
            vector(&[1., -1., 1.]),
            vector(&[1., -1., -1.]),
            vector(&[1., 1., -1.]),
        ])
        .unwrap()
    }

    #[test]
    fn lorentz_membership() {
        let c = ConeSpec::lorentz(3).unwrap();
        assert_eq!(c.contains(&vector(&[1., 0.6, 0.8]), 1e-12).unwrap(), Membership::Boundary);
        assert_eq!(c.contains(&vector(&[1., 1., 1.]), 1e-12).unwrap(), Membership::Outside);
        assert_eq!(c.contains(&vector(&[1., 0.1, 0.2]), 1e-12).unwrap(), Membership::Interior);
        assert_eq!(c.contains(&vector(&[-1., 0.1, 0.2]), 1e-12).unwrap(), Membership::Outside);
        assert_eq!(c.contains(&vector(&[-1., 0.6, 0.8]), 1e-12).unwrap(), Membership::Outside);
        assert!(matches!(
            c.contains(&vector(&[1., 0.]), 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lorentz_defect_is_relative_distance() {
        let c = ConeSpec::lorentz(3).unwrap();
        // (1, 2, 0) is at distance 1/√2 from the boundary ray (1, 1, 0)/√2 direction.
        let x = vector(&[1., 2., 0.]);
        let expected = (2.0 - 1.0) / std::f64::consts::SQRT_2 / x.norm();
        assert!((c.boundary_defect(&x) - expected).abs() < 1e-15);
    }

    #[test]
    fn square_cone_faces() {
        let c = square_cone();
        assert_eq!(c.facet_normals().unwrap().len(), 4);
        let edge = vector(&[2., 0., 2.]);
        assert_eq!(c.contains(&edge, 1e-12).unwrap(), Membership::Boundary);
        assert_eq!(c.contains(&vector(&[1., 0., 0.]), 1e-12).unwrap(), Membership::Interior);
        assert_eq!(c.contains(&vector(&[1., 1.2, 0.]), 1e-12).unwrap(), Membership::Outside);
        assert!((c.section_normal() - vector(&[1., 0., 0.])).norm() < 1e-12);
    }

    #[test]
    fn dual_interior_examples() {
        let c = ConeSpec::lorentz(3).unwrap();
        assert!(c.dual_interior_contains(&vector(&[1., 0., 0.])).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(!c.dual_interior_contains(&vector(&[s, s, 0.])).unwrap());
        assert!(c.dual_interior_contains(&Vector::zeros(3)).is_err());
    }

    #[test]
    fn dual_interior_matches_ray_check_for_square() {
        let c = square_cone();
        let rays = c.generators().unwrap().to_vec();
        for deg in [0.0f64, 10.0, 30.0, 44.0, 46.0, 60.0] {
            let t = deg.to_radians();
            let u = vector(&[t.cos(), t.sin(), 0.0]);
            let brute = rays.iter().map(|r| r.dot(&u) / r.norm()).fold(f64::INFINITY, f64::min);
            assert_eq!(c.dual_interior_contains(&u).unwrap(), brute > DEFAULT_DUAL_MARGIN, "{deg}");
        }
    }

    #[test]
    fn rejects_degenerate_cones() {
        assert!(ConeSpec::lorentz(1).is_err());
        // Two rays in R^3 do not span.
        assert!(ConeSpec::polyhedral(vec![vector(&[1., 0., 0.]), vector(&[0., 1., 0.])]).is_err());
        // Opposite rays: not pointed.
        assert!(ConeSpec::polyhedral(vec![
            vector(&[1., 0.]),
            vector(&[-1., 0.]),
            vector(&[0., 1.]),
        ])
        .is_err());
        let q = Matrix::identity(3, 3);
        assert!(ConeSpec::quadratic(q, vector(&[1., 0., 0.])).is_err());
        let mut q = -Matrix::identity(3, 3);
        q[(0, 0)] = 1.0;
        assert!(ConeSpec::quadratic(q, vector(&[0., 1., 0.])).is_err());
        let base = Hyperplane::new(vector(&[1., 0., 0.]), 0.0).unwrap();
        assert!(ConeSpec::base_body(base, vec![vector(&[0., 1., 0.])]).is_err());
    }

    #[test]
    fn cyclic_lookup_agrees_with_full_scan() {
        let n = 64;
        let verts: Vec<Vector> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vector(&[1.0, 1.3 * t.cos(), 0.7 * t.sin()])
            })
            .collect();
        let base = Hyperplane::new(vector(&[1., 0., 0.]), 1.0).unwrap();
        let c = ConeSpec::base_body(base, verts).unwrap();
        let normals = c.facet_normals().unwrap();
        assert_eq!(normals.len(), n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let x = vector(&[rng.random_range(0.2..1.5), rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)]);
            let full = normals.iter().map(|m| -m.dot(&x)).fold(f64::NEG_INFINITY, f64::max);
            let fast = c.boundary_defect(&x) * x.norm();
            assert_eq!(full > 0.0, fast > 0.0);
            if full.abs() < 1e-3 {
                assert!((full - fast).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scale_invariance_of_membership() {
        let cones = [ConeSpec::lorentz(4).unwrap(), square_cone()];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in &cones {
            for _ in 0..200 {
                let x = sphere::random_unit(c.dim(), &mut rng);
                let base = c.contains(&x, 1e-9).unwrap();
                for lambda in [1e-3, 0.5, 7.0, 1e4] {
                    assert_eq!(c.contains(&(&x * lambda), 1e-9).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn transformed_quadratic_keeps_membership() {
        let c = ConeSpec::lorentz(3).unwrap();
        let m = Matrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.1, 1.5, 0.3, 0.0, -0.4, 0.8]);
        let t = c.transformed(&m).unwrap();
        let x = vector(&[1., 0.6, 0.8]);
        assert_eq!(t.contains(&(&m * &x), 1e-9).unwrap(), Membership::Boundary);
        let y = vector(&[1., 0.2, 0.1]);
        assert_eq!(t.contains(&(&m * &y), 1e-9).unwrap(), Membership::Interior);
    }
}
