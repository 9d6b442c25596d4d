//! Defect measures for the flat-boundary-intersection and centrally-symmetric
//! section properties, quadric fitting, and the inscribed parallelogram.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{radial_extent, section_of, ConeSpec, Membership, Section, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::gamma::gamma_curve;
use crate::linalg::{self, Hyperplane, Matrix, Vector};
use crate::sphere;

/// Section boundary samples used by sweeps when no count is given.
pub const DEFAULT_SECTION_SAMPLES: usize = 64;
/// Residual bound for a quadric fit to count as an ellipsoid.
pub const ELLIPSOID_RESIDUAL_TOL: f64 = 1e-6;
/// Relative eigenvalue threshold for definiteness of the quadratic part.
pub const DEFINITENESS_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FBIReport {
    pub a: Vector,
    pub affine_dim: usize,
    /// Largest distance of a gamma point to the best-fit hyperplane, over the
    /// diameter of the gamma points.
    pub flatness_defect: f64,
    /// Descending singular values of the centered gamma points.
    pub spectrum: Vec<f64>,
    pub hyperplane: Hyperplane,
}

impl FBIReport {
    /// Whether the affine span has the codimension-one dimension expected of
    /// a flat intersection in a cone of dimension `dim`.
    pub fn spans_hyperplane(&self) -> bool {
        self.affine_dim + 1 == self.a.len()
    }
}

pub fn fbi_defect(cone: &ConeSpec, a: &Vector, num_samples: usize, rel_tol: f64) -> Result<FBIReport> {
    let curve = gamma_curve(cone, a, num_samples)?;
    let points = curve.gamma_points();
    let (affine_dim, spectrum) = linalg::affine_rank(&points, rel_tol)?;
    let (hyperplane, max_distance) = linalg::fit_hyperplane(&points)?;
    let diam = linalg::diameter(&points);
    if diam == 0.0 {
        return Err(Error::Degenerate("gamma points coincide".into()));
    }
    Ok(FBIReport {
        a: a.clone(),
        affine_dim,
        flatness_defect: max_distance / diam,
        spectrum,
        hyperplane,
    })
}

/// The plane `aᵀQx = ½aᵀQa` that contains the boundary intersection of a
/// quadratic cone.
pub fn analytic_fbi_hyperplane(cone: &ConeSpec, a: &Vector) -> Result<Hyperplane> {
    let (q, _) = cone
        .quadratic_form()
        .ok_or(Error::WrongVariant("analytic plane needs a quadratic cone"))?;
    if cone.contains(a, BOUNDARY_TOL)? != Membership::Interior {
        return Err(Error::NotInterior);
    }
    let qa = q * a;
    Hyperplane::new(qa.clone(), 0.5 * a.dot(&qa))
}

/// Largest relative imbalance `|ρ(u) − ρ(−u)| / (ρ(u) + ρ(−u))` of the
/// radial function about the centroid, over `num_directions` in-plane
/// directions plus the vertex directions of polytope sections.
pub fn symmetry_defect(section: &Section, num_directions: usize) -> Result<f64> {
    let cone = section.cone();
    let c = section.centroid();
    if cone.boundary_defect(c) >= 0.0 {
        return Err(Error::Precondition("centroid is not interior to the section".into()));
    }
    let frame = section.centroid_frame();
    let mut dirs: Vec<Vector> = sphere::directions(frame.dim(), num_directions)
        .iter()
        .map(|d| frame.direction_to_global(d))
        .collect();
    dirs.extend(section.vertex_directions(c));
    let mut worst = 0.0f64;
    for u in &dirs {
        let fwd = radial_extent(cone, c, u)?;
        let back = radial_extent(cone, c, &-u)?;
        let total = fwd + back;
        if total > 0.0 {
            worst = worst.max((fwd - back).abs() / total);
        }
    }
    Ok(worst.min(1.0))
}

#[derive(Debug, Clone)]
pub struct CSSReport {
    pub sections_tested: usize,
    pub max_symmetry_defect: f64,
    pub worst_hyperplane: Hyperplane,
}

pub fn css_sweep(cone: &ConeSpec, num_hyperplanes: usize, seed: u64) -> Result<CSSReport> {
    css_sweep_sampled(cone, num_hyperplanes, seed, DEFAULT_SECTION_SAMPLES)
}

/// Seeded sweep with tilts spread over most of the dual interior.
pub fn css_sweep_sampled(cone: &ConeSpec, num_hyperplanes: usize, seed: u64, samples: usize) -> Result<CSSReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normals: Vec<Vector> = (0..num_hyperplanes)
        .map(|_| {
            let tilt = rng.random_range(0.0..0.9);
            cone.random_section_normal(&mut rng, tilt)
        })
        .collect();
    css_sweep_normals(cone, &normals, samples)
}

/// Sweep over the given section normals; each plane sits at unit offset.
pub fn css_sweep_normals(cone: &ConeSpec, normals: &[Vector], samples: usize) -> Result<CSSReport> {
    if normals.is_empty() {
        return Err(Error::Empty("section normals"));
    }
    let mut report: Option<CSSReport> = None;
    for (i, u) in normals.iter().enumerate() {
        let plane = Hyperplane::new(u.clone(), 1.0)?;
        let section = section_of(cone, &plane, samples)?;
        let defect = symmetry_defect(&section, samples)?;
        match &mut report {
            Some(r) => {
                r.sections_tested = i + 1;
                if defect > r.max_symmetry_defect {
                    r.max_symmetry_defect = defect;
                    r.worst_hyperplane = plane;
                }
            }
            None => {
                report = Some(CSSReport {
                    sections_tested: 1,
                    max_symmetry_defect: defect,
                    worst_hyperplane: plane,
                })
            }
        }
    }
    Ok(report.unwrap())
}

/// Quadric `xᵀAx + b·x + c = 0` fitted to a point set.
#[derive(Debug, Clone)]
pub struct EllipsoidFit {
    pub quad_coeffs: Matrix,
    pub lin_coeffs: Vector,
    pub const_coeff: f64,
    /// Largest algebraic residual over the samples, measured on centered and
    /// RMS-scaled coordinates with a unit coefficient vector.
    pub residual: f64,
    /// Quadratic part definite and the level set nonempty.
    pub definite: bool,
    pub is_ellipsoid: bool,
}

impl EllipsoidFit {
    /// Coefficients in monomial order `x_i x_j (i ≤ j)`, then `x_i`, then 1.
    pub fn coefficient_vector(&self) -> Vector {
        let d = self.lin_coeffs.len();
        let mut out = Vec::with_capacity(quadric_terms(d));
        for i in 0..d {
            for j in i..d {
                out.push(if i == j { self.quad_coeffs[(i, i)] } else { 2.0 * self.quad_coeffs[(i, j)] });
            }
        }
        out.extend(self.lin_coeffs.iter());
        out.push(self.const_coeff);
        Vector::from_vec(out)
    }

    /// Ellipsoid test against a caller-chosen residual bound.
    pub fn is_ellipsoid_within(&self, tol: f64) -> bool {
        self.definite && self.residual <= tol
    }

    pub fn evaluate(&self, x: &Vector) -> f64 {
        x.dot(&(&self.quad_coeffs * x)) + self.lin_coeffs.dot(x) + self.const_coeff
    }
}

pub fn quadric_terms(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Monomials with `√2` weights on cross terms so the coefficient norm is
/// invariant under rotations.
fn monomials(y: &Vector) -> Vector {
    let d = y.len();
    let mut out = Vec::with_capacity(quadric_terms(d));
    for i in 0..d {
        for j in i..d {
            let w = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            out.push(w * y[i] * y[j]);
        }
    }
    out.extend(y.iter());
    out.push(1.0);
    Vector::from_vec(out)
}

pub fn fit_ellipsoid(points: &[Vector]) -> Result<EllipsoidFit> {
    let Some(first) = points.first() else {
        return Err(Error::Empty("quadric fit points"));
    };
    let d = first.len();
    let k = quadric_terms(d);
    if d == 0 || points.len() < k {
        return Err(Error::Precondition(format!(
            "quadric fit in dimension {d} needs at least {k} points, got {}",
            points.len()
        )));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.len() });
        }
        if !linalg::is_finite(p) {
            return Err(Error::NonFinite("quadric fit points"));
        }
    }
    let center = linalg::mean(points);
    let rms = (points.iter().map(|p| (p - &center).norm_squared()).sum::<f64>() / points.len() as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::Degenerate("design matrix is zero".into()));
    }
    let rows: Vec<Vector> = points.iter().map(|p| monomials(&((p - &center) / rms))).collect();
    let mut gram = Matrix::zeros(k, k);
    for r in &rows {
        gram.ger(1.0, r, r, 1.0);
    }
    let eig = linalg::symmetric_eigen(&gram)?;
    let v = eig.eigenvectors.last().unwrap().clone();
    let residual = rows.iter().map(|r| r.dot(&v).abs()).fold(0.0, f64::max);

    // Coefficients in normalized coordinates y = (x − center)/rms.
    let mut a_n = Matrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            if i == j {
                a_n[(i, i)] = v[idx];
            } else {
                let h = v[idx] / std::f64::consts::SQRT_2;
                a_n[(i, j)] = h;
                a_n[(j, i)] = h;
            }
            idx += 1;
        }
    }
    let b_n = Vector::from_iterator(d, (0..d).map(|i| v[idx + i]));
    let c_n = v[idx + d];

    // Definiteness and reality are decided in normalized coordinates.
    let sign = if a_n.trace() < 0.0 { -1.0 } else { 1.0 };
    let a_s = &a_n * sign;
    let b_s = &b_n * sign;
    let c_s = c_n * sign;
    let spectrum = linalg::symmetric_eigen(&a_s)?.eigenvalues;
    let top = spectrum.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let definite = top > 0.0 && spectrum.iter().all(|&e| e > DEFINITENESS_TOL * top);
    let real = definite
        && match linalg::solve(&a_s, &b_s) {
            Ok(w) => 0.25 * b_s.dot(&w) - c_s > 0.0,
            Err(_) => false,
        };

    // Back to original coordinates: y = (x − m)/s.
    let s2 = rms * rms;
    let a = &a_s / s2;
    let am = &a * &center;
    let b = &b_s / rms - &am * 2.0;
    let c = center.dot(&am) - b_s.dot(&center) / rms + c_s;
    let norm = (a.iter().map(|x| x * x).sum::<f64>() + b.norm_squared() + c * c).sqrt();
    Ok(EllipsoidFit {
        quad_coeffs: a / norm,
        lin_coeffs: b / norm,
        const_coeff: c / norm,
        residual,
        definite: real,
        is_ellipsoid: real && residual <= ELLIPSOID_RESIDUAL_TOL,
    })
}

/// Points used for fitting a section, in its local coordinates: the vertices
/// when a polytope section has enough of them to determine a quadric, else
/// the boundary samples together with any vertices.
pub fn section_fit_points(section: &Section) -> Vec<Vector> {
    let frame = section.frame();
    let need = 2 * quadric_terms(section.dim());
    match section.vertices() {
        Some(vs) if vs.len() >= need => vs.iter().map(|v| frame.to_local(v)).collect(),
        Some(vs) => section
            .boundary_samples()
            .iter()
            .chain(vs.iter())
            .map(|v| frame.to_local(v))
            .collect(),
        None => section.local_samples(),
    }
}

const SCAN_SEED: u64 = 0x5ca1_ab1e;

/// Fits quadrics to random slices of the section body and returns the worst
/// residual. Two-dimensional sections return the direct fit residual.
pub fn ellipsoid_section_scan(section: &Section, num_subsections: usize) -> Result<f64> {
    let m = section.dim();
    if m < 3 {
        return Ok(fit_ellipsoid(&section_fit_points(section))?.residual);
    }
    let cone = section.cone();
    let frame = section.centroid_frame();
    let c = section.centroid().clone();
    let per_slice = (4 * quadric_terms(m - 1)).max(section.requested_samples());
    let mut rng = ChaCha8Rng::seed_from_u64(SCAN_SEED);
    let mut worst = 0.0f64;
    for _ in 0..num_subsections {
        let nu = sphere::random_unit(m, &mut rng);
        let nu_global = frame.direction_to_global(&nu);
        let reach = if rng.random_bool(0.5) {
            radial_extent(cone, &c, &nu_global)?
        } else {
            -radial_extent(cone, &c, &-&nu_global)?
        };
        let shift = rng.random_range(0.0..0.5) * reach;
        let slice = frame.slice(&nu, &(&nu * shift));
        let points = sphere::directions(m - 1, per_slice)
            .iter()
            .map(|d| {
                let dir = slice.direction_to_global(d);
                radial_extent(cone, slice.origin(), &dir).map(|r| d * r)
            })
            .collect::<Result<Vec<_>>>()?;
        worst = worst.max(fit_ellipsoid(&points)?.residual);
    }
    Ok(worst)
}

const GOLDEN_STEPS: usize = 200;

/// A parallelogram inscribed in a planar section from two equal-length chords
/// perpendicular to a sampled diameter. Vertices are in ambient coordinates,
/// ordered so that `v[0]v[2]` and `v[1]v[3]` are the diagonals.
pub fn inscribed_parallelogram(section: &Section) -> Result<[Vector; 4]> {
    if section.dim() != 2 {
        return Err(Error::Precondition(format!(
            "inscribed parallelogram needs a planar section, got dimension {}",
            section.dim()
        )));
    }
    let cone = section.cone();
    let c = section.centroid().clone();
    let mut pts: Vec<Vector> = section.boundary_samples().to_vec();
    if let Some(vs) = section.vertices() {
        pts.extend(vs.iter().cloned());
    }
    let (mut p, mut q, mut diam) = (pts[0].clone(), pts[0].clone(), 0.0);
    for (i, x) in pts.iter().enumerate() {
        for y in &pts[i + 1..] {
            let dist = (x - y).norm();
            if dist > diam {
                diam = dist;
                p = x.clone();
                q = y.clone();
            }
        }
    }
    if diam == 0.0 {
        return Err(Error::Degenerate("section has no extent".into()));
    }
    let d = (&q - &p) / diam;
    let frame = section.frame();
    let d_local = frame.to_local(&(frame.origin() + &d));
    let n = frame.direction_to_global(&linalg::vector(&[-d_local[1], d_local[0]]));
    let (t_lo, t_hi, t_c) = (d.dot(&p), d.dot(&q), d.dot(&c));
    if !(t_lo < t_c && t_c < t_hi) {
        return Err(Error::Degenerate("centroid is not between the diameter endpoints".into()));
    }
    // Interior point on the chord line at parameter t.
    let pivot = |t: f64| -> Vector {
        let end = if t <= t_c { &p } else { &q };
        let s = (t - t_c) / (d.dot(end) - t_c);
        &c + (end - &c) * s
    };
    let chord = |t: f64| -> Result<(Vector, Vector)> {
        let z = pivot(t);
        let up = radial_extent(cone, &z, &n)?;
        let down = radial_extent(cone, &z, &-&n)?;
        Ok((&z - &n * down, &z + &n * up))
    };
    let length = |t: f64| -> Result<f64> {
        let (a, b) = chord(t)?;
        Ok((b - a).norm())
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (t_lo, t_hi);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (length(x1)?, length(x2)?);
    for _ in 0..GOLDEN_STEPS {
        if hi - lo <= 1e-15 * diam {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = length(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = length(x1)?;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let l_star = length(t_star)?;
    if l_star <= 1e-12 * diam {
        return Err(Error::Degenerate("section is segment-like".into()));
    }

    let t1 = 0.5 * (t_lo + t_star);
    let l1 = length(t1)?;
    let (mut a, mut b) = (t_star, t_hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if length(mid)? >= l1 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let t2 = if (length(a)? - l1).abs() <= (length(b)? - l1).abs() { a } else { b };
    let (a1, b1) = chord(t1)?;
    let (a2, b2) = chord(t2)?;
    Ok([a1, a2, b2, b1])
}

/// Boundary and diagonal-midpoint defects of an inscribed parallelogram:
/// (largest boundary defect of a vertex, distance between diagonal midpoints
/// relative to the diameter of the vertices).
pub fn parallelogram_defects(section: &Section, v: &[Vector; 4]) -> (f64, f64) {
    let cone = section.cone();
    let plane = section.hyperplane();
    let boundary = v
        .iter()
        .map(|x| cone.boundary_defect(x).abs().max(plane.signed_distance(x).abs() / x.norm()))
        .fold(0.0, f64::max);
    let diam = linalg::diameter(v);
    let mid = ((&v[0] + &v[2]) * 0.5 - (&v[1] + &v[3]) * 0.5).norm() / diam;
    (boundary, mid)
}
