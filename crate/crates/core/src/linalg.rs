//! Small dense linear algebra and affine geometry.
//!
//! Ambient dimensions in this crate stay below ~16, so everything here favours
//! robustness over asymptotic speed: eigenproblems go through cyclic Jacobi
//! rotations and singular values of point clouds come from the Gram matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Default relative threshold used when counting significant singular values.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const JACOBI_MAX_SWEEPS: usize = 100;

pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}

pub fn unit(dim: usize, axis: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[axis] = 1.0;
    v
}

pub fn is_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// `{x : normal · x = offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Vector,
    offset: f64,
}

impl Hyperplane {
    /// Builds the hyperplane `direction · x = offset`, rescaling both sides so
    /// the stored normal has unit length.
    pub fn new(direction: Vector, offset: f64) -> Result<Self> {
        if !is_finite(&direction) || !offset.is_finite() {
            return Err(Error::NonFinite("hyperplane"));
        }
        let norm = direction.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("hyperplane normal is zero".into()));
        }
        Ok(Self {
            normal: direction / norm,
            offset: offset / norm,
        })
    }

    /// The hyperplane with the given normal direction passing through `point`.
    pub fn through(direction: Vector, point: &Vector) -> Result<Self> {
        let offset = direction.dot(point);
        Self::new(direction, offset)
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn signed_distance(&self, x: &Vector) -> f64 {
        self.normal.dot(x) - self.offset
    }

    /// Orthogonal projection of `x` onto the hyperplane.
    pub fn project(&self, x: &Vector) -> Vector {
        x - &self.normal * self.signed_distance(x)
    }

    /// Angle in radians between the normals of two hyperplanes, ignoring orientation.
    pub fn normal_angle(&self, other: &Hyperplane) -> f64 {
        self.normal.dot(&other.normal).abs().min(1.0).acos()
    }
}

/// An affine flat given by an origin and an orthonormal basis of its direction space.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    origin: Vector,
    basis: Vec<Vector>,
}

impl Frame {
    pub fn new(origin: Vector, basis: Vec<Vector>) -> Self {
        Self { origin, basis }
    }

    /// Frame of a hyperplane anchored at `origin` (which must lie in it).
    pub fn of_hyperplane(plane: &Hyperplane, origin: Vector) -> Self {
        Self::new(origin, orthonormal_complement(plane.normal()))
    }

    pub fn origin(&self) -> &Vector {
        &self.origin
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Intrinsic dimension of the flat.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }

    pub fn to_local(&self, x: &Vector) -> Vector {
        let rel = x - &self.origin;
        Vector::from_iterator(self.basis.len(), self.basis.iter().map(|b| b.dot(&rel)))
    }

    pub fn to_global(&self, y: &Vector) -> Vector {
        let mut x = self.origin.clone();
        for (b, c) in self.basis.iter().zip(y.iter()) {
            x.axpy(*c, b, 1.0);
        }
        x
    }

    /// Maps a direction (no origin shift) from local to ambient coordinates.
    pub fn direction_to_global(&self, y: &Vector) -> Vector {
        let mut x = Vector::zeros(self.origin.len());
        for (b, c) in self.basis.iter().zip(y.iter()) {
            x.axpy(*c, b, 1.0);
        }
        x
    }

    /// Sub-flat of codimension one inside this frame: the points whose local
    /// coordinates satisfy `local_normal · y = local_offset`, anchored at the
    /// local point `anchor`.
    pub fn slice(&self, local_normal: &Vector, anchor: &Vector) -> Frame {
        let inner = orthonormal_complement(&local_normal.normalize());
        let basis = inner.iter().map(|v| self.direction_to_global(v)).collect();
        Frame::new(self.to_global(anchor), basis)
    }
}

/// Orthonormal basis of the orthogonal complement of `normal` (assumed unit).
///
/// Deterministic: Gram-Schmidt over the coordinate axes, visiting the axes
/// least aligned with `normal` first and dropping the most aligned one.
pub fn orthonormal_complement(normal: &Vector) -> Vec<Vector> {
    let d = normal.len();
    let mut axes: Vec<usize> = (0..d).collect();
    axes.sort_by(|&i, &j| normal[i].abs().total_cmp(&normal[j].abs()).then(i.cmp(&j)));
    let mut basis: Vec<Vector> = Vec::with_capacity(d.saturating_sub(1));
    for &axis in axes.iter().take(d.saturating_sub(1)) {
        let mut v = unit(d, axis);
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            let c = normal.dot(&v);
            v.axpy(-c, normal, 1.0);
            for b in &basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let n = v.norm();
        basis.push(v / n);
    }
    basis
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors, `eigenvectors[i]` paired with `eigenvalues[i]`.
    pub eigenvectors: Vec<Vector>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.eigenvalues.len();
        let mut m = Matrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m += v * v.transpose() * *lambda;
        }
        m
    }
}

/// Cyclic Jacobi eigen-solver for symmetric matrices.
pub fn symmetric_eigen(m: &Matrix) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = (m + m.transpose()) * 0.5;
    let mut v = Matrix::identity(n, n);
    let frob = a.norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-2 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut col: Vector = v.column(i).into_owned();
            // Sign convention: largest-magnitude component positive.
            let imax = col.iamax();
            if col[imax] < 0.0 {
                col = -col;
            }
            col
        })
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn check_cloud(points: &[Vector]) -> Result<usize> {
    let first = points.first().ok_or(Error::Empty("point set"))?;
    let d = first.len();
    if d == 0 {
        return Err(Error::Empty("point dimension"));
    }
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.len(),
            });
        }
        if !is_finite(p) {
            return Err(Error::NonFinite("point set"));
        }
    }
    Ok(d)
}

pub fn mean(points: &[Vector]) -> Vector {
    let mut c = Vector::zeros(points[0].len());
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Principal directions of a centered point cloud.
struct CloudSpectrum {
    centroid: Vector,
    /// (singular value, direction), descending.
    axes: Vec<(f64, Vector)>,
}

fn cloud_spectrum(points: &[Vector]) -> Result<CloudSpectrum> {
    let d = check_cloud(points)?;
    let centroid = mean(points);
    let centered: Vec<Vector> = points.iter().map(|p| p - &centroid).collect();
    let mut gram = Matrix::zeros(d, d);
    for p in &centered {
        gram.ger(1.0, p, p, 1.0);
    }
    let eig = symmetric_eigen(&gram)?;
    // Singular values measured directly as ‖X v‖; this keeps small values
    // accurate to ~ε·σ_max instead of ~√ε·σ_max.
    let mut axes: Vec<(f64, Vector)> = eig
        .eigenvectors
        .into_iter()
        .map(|v| {
            let s = centered.iter().map(|p| p.dot(&v).powi(2)).sum::<f64>().sqrt();
            (s, v)
        })
        .collect();
    axes.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(CloudSpectrum { centroid, axes })
}

/// Dimension of the affine span of `points`: the number of singular values of
/// the centered cloud above `rel_tol` times the largest. Also returns the
/// descending singular spectrum.
pub fn affine_rank(points: &[Vector], rel_tol: f64) -> Result<(usize, Vec<f64>)> {
    let spec = cloud_spectrum(points)?;
    let spectrum: Vec<f64> = spec.axes.iter().map(|(s, _)| *s).collect();
    let top = spectrum[0];
    let dim = if top == 0.0 {
        0
    } else {
        spectrum.iter().filter(|&&s| s > rel_tol * top).count()
    };
    Ok((dim, spectrum))
}

/// Least-squares hyperplane through the centroid of `points`. Returns the
/// plane and the largest absolute distance of a point from it.
pub fn fit_hyperplane(points: &[Vector]) -> Result<(Hyperplane, f64)> {
    let spec = cloud_spectrum(points)?;
    let d = spec.centroid.len();
    let top = spec.axes[0].0;
    let rank = if top == 0.0 {
        0
    } else {
        spec.axes
            .iter()
            .filter(|(s, _)| *s > DEFAULT_RANK_TOL * top)
            .count()
    };
    if rank + 1 < d {
        return Err(Error::Degenerate(format!(
            "affine rank {rank} leaves the normal of a hyperplane in dimension {d} ambiguous"
        )));
    }
    let mut normal = spec.axes[d - 1].1.clone();
    let mut offset = normal.dot(&spec.centroid);
    if offset < 0.0 {
        normal = -normal;
        offset = -offset;
    }
    let plane = Hyperplane::new(normal, offset)?;
    let max_distance = points
        .iter()
        .map(|p| plane.signed_distance(p).abs())
        .fold(0.0, f64::max);
    Ok((plane, max_distance))
}

/// Largest pairwise distance in a point set.
pub fn diameter(points: &[Vector]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((p - q).norm());
        }
    }
    best
}

/// Determinant of a small square matrix by partial-pivot elimination.
pub fn determinant(m: &Matrix) -> f64 {
    m.clone().lu().determinant()
}

/// Solves `m x = b` for a small square system, failing on numerical singularity.
pub fn solve(m: &Matrix, b: &Vector) -> Result<Vector> {
    m.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Degenerate("singular linear system".into()))
}
