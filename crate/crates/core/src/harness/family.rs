//! Cone families for sweeps: ellipsoidal cones in normal form and under
//! random linear maps, polygonal cones, lp-ball cones, and noisy ellipses.
//!
//! Family specs read `kind:dim[-dim][:key=v1|v2,...]`, for example
//! `kgon:3:k=3|4|5` or `affine-ellipsoidal:3-6:count=10`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::cone::ConeSpec;
use crate::error::{Error, Result};
use crate::linalg::{self, Hyperplane, Matrix};

/// Largest condition number accepted for random affine maps.
pub const MAX_CONDITION: f64 = 50.0;
pub const MAX_FAMILY_DIM: usize = 8;
/// Default vertex count for lp-ball and perturbed ellipse bases.
pub const DEFAULT_BASE_VERTICES: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Lorentz,
    AffineEllipsoidal,
    Kgon,
    LpBall,
    PerturbedEllipsoidal,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "lorentz" => Self::Lorentz,
            "affine-ellipsoidal" => Self::AffineEllipsoidal,
            "kgon" => Self::Kgon,
            "lp-ball" => Self::LpBall,
            "perturbed-ellipsoidal" => Self::PerturbedEllipsoidal,
            other => return Err(Error::InvalidParameter(format!("unknown family kind {other:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lorentz => "lorentz",
            Self::AffineEllipsoidal => "affine-ellipsoidal",
            Self::Kgon => "kgon",
            Self::LpBall => "lp-ball",
            Self::PerturbedEllipsoidal => "perturbed-ellipsoidal",
        }
    }
}

/// Parsed family spec.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub dims: (usize, usize),
    pub params: BTreeMap<String, Vec<f64>>,
}

impl FamilySpec {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("family spec {spec:?}: {msg}"));
        let mut parts = spec.splitn(3, ':');
        let kind = FamilyKind::parse(parts.next().unwrap_or(""))?;
        let dims = parts.next().ok_or_else(|| bad("missing dimension"))?;
        let parse_dim = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("dimension is not an integer"));
        let dims = match dims.split_once('-') {
            Some((lo, hi)) => (parse_dim(lo)?, parse_dim(hi)?),
            None => {
                let d = parse_dim(dims)?;
                (d, d)
            }
        };
        if dims.0 < 2 || dims.0 > dims.1 || dims.1 > MAX_FAMILY_DIM {
            return Err(bad("dimensions must satisfy 2 ≤ lo ≤ hi ≤ 8"));
        }
        let mut params = BTreeMap::new();
        if let Some(rest) = parts.next() {
            for item in rest.split(',').filter(|s| !s.is_empty()) {
                let (key, values) = item.split_once('=').ok_or_else(|| bad("parameters need key=value"))?;
                let values = values
                    .split('|')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| bad("parameter value is not a number")))
                    .collect::<Result<Vec<_>>>()?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(bad("parameter value is not finite"));
                }
                params.insert(key.trim().to_string(), values);
            }
        }
        Ok(Self { kind, dims, params })
    }

    fn values(&self, key: &str, default: &[f64]) -> Vec<f64> {
        self.params.get(key).cloned().unwrap_or_else(|| default.to_vec())
    }

    fn single(&self, key: &str, default: f64) -> Result<f64> {
        match self.params.get(key).map(|v| v.as_slice()) {
            None => Ok(default),
            Some([v]) => Ok(*v),
            Some(_) => Err(Error::InvalidParameter(format!("parameter {key} takes a single value"))),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "parameter {key} does not apply to family {}",
                    self.kind.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub id: String,
    pub cone: ConeSpec,
}

fn positive_integer(v: f64, what: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be a positive integer, got {v}")))
    }
}

fn fixed_dim(spec: &FamilySpec, dim: usize) -> Result<()> {
    if spec.dims != (dim, dim) {
        return Err(Error::InvalidParameter(format!(
            "family {} is only available in dimension {dim}",
            spec.kind.name()
        )));
    }
    Ok(())
}

/// Expands a family spec into cones. `seed` drives every random choice.
pub fn generate_family(spec: &FamilySpec, seed: u64) -> Result<Vec<FamilyMember>> {
    let (lo, hi) = spec.dims;
    match spec.kind {
        FamilyKind::Lorentz => {
            spec.check_keys(&[])?;
            (lo..=hi)
                .map(|d| {
                    Ok(FamilyMember {
                        id: format!("lorentz-d{d}"),
                        cone: ConeSpec::lorentz(d)?,
                    })
                })
                .collect()
        }
        FamilyKind::AffineEllipsoidal => {
            spec.check_keys(&["count"])?;
            let count = positive_integer(spec.single("count", (hi - lo + 1) as f64)?, "count")?;
            (0..count)
                .map(|i| {
                    let d = lo + i % (hi - lo + 1);
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
                    Ok(FamilyMember {
                        id: format!("affine-ellipsoidal-d{d}-{i}"),
                        cone: affine_ellipsoidal(d, &mut rng)?,
                    })
                })
                .collect()
        }
        FamilyKind::Kgon => {
            spec.check_keys(&["k"])?;
            fixed_dim(spec, 3)?;
            spec.values("k", &[3.0, 4.0, 5.0, 6.0, 8.0])
                .into_iter()
                .map(|k| {
                    let k = positive_integer(k, "k")?;
                    Ok(FamilyMember {
                        id: format!("kgon-k{k}"),
                        cone: kgon(k)?,
                    })
                })
                .collect()
        }
        FamilyKind::LpBall => {
            spec.check_keys(&["p", "vertices"])?;
            fixed_dim(spec, 3)?;
            let n = positive_integer(spec.single("vertices", DEFAULT_BASE_VERTICES as f64)?, "vertices")?;
            spec.values("p", &[1.0, 4.0])
                .into_iter()
                .map(|p| {
                    Ok(FamilyMember {
                        id: format!("lp-ball-p{p}"),
                        cone: lp_ball(p, n)?,
                    })
                })
                .collect()
        }
        FamilyKind::PerturbedEllipsoidal => {
            spec.check_keys(&["eta", "vertices", "count"])?;
            fixed_dim(spec, 3)?;
            let n = positive_integer(spec.single("vertices", DEFAULT_BASE_VERTICES as f64)?, "vertices")?;
            let count = positive_integer(spec.single("count", 1.0)?, "count")?;
            let mut out = Vec::new();
            for (j, eta) in spec.values("eta", &[0.0, 0.1]).into_iter().enumerate() {
                for i in 0..count {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, (j * count + i) as u64));
                    out.push(FamilyMember {
                        id: format!("perturbed-ellipsoidal-eta{eta}-{i}"),
                        cone: perturbed_ellipse(eta, n, &mut rng)?,
                    });
                }
            }
            Ok(out)
        }
    }
}

fn condition_number(m: &Matrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = sv.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    max / min
}

/// `{x : Mx ∈ L}` for the Lorentz cone `L` and a random `M` with condition
/// number at most [`MAX_CONDITION`].
pub fn affine_ellipsoidal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ConeSpec> {
    let scale = 1.0 / (dim as f64).sqrt();
    let m = loop {
        let g = Matrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let m = Matrix::identity(dim, dim) + g * scale;
        if condition_number(&m) <= MAX_CONDITION {
            break m;
        }
    };
    let mut d = Matrix::identity(dim, dim) * -1.0;
    d[(0, 0)] = 1.0;
    let q = m.transpose() * d * &m;
    let q = (&q + q.transpose()) * 0.5;
    let t = linalg::solve(&m, &linalg::unit(dim, 0))?;
    ConeSpec::quadratic(q, t)
}

/// Cone over the regular `k`-gon with inradius one at height one.
pub fn kgon(k: usize) -> Result<ConeSpec> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("kgon needs k ≥ 3, got {k}")));
    }
    let r = 1.0 / (PI / k as f64).cos();
    let rays = (0..k)
        .map(|j| {
            let t = PI / k as f64 + 2.0 * PI * j as f64 / k as f64;
            linalg::vector(&[1.0, r * t.cos(), r * t.sin()]).normalize()
        })
        .collect();
    ConeSpec::polyhedral(rays)
}

fn base_plane() -> Hyperplane {
    Hyperplane::new(linalg::unit(3, 0), 1.0).expect("unit normal")
}

/// Cone over `n` points of the unit lp circle at height one.
pub fn lp_ball(p: f64, n: usize) -> Result<ConeSpec> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("lp-ball needs p > 0, got {p}")));
    }
    if n < 8 {
        return Err(Error::InvalidParameter("lp-ball needs at least 8 vertices".into()));
    }
    let vertices = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            let (c, s) = (t.cos(), t.sin());
            let norm = (c.abs().powf(p) + s.abs().powf(p)).powf(1.0 / p);
            linalg::vector(&[1.0, c / norm, s / norm])
        })
        .collect();
    ConeSpec::base_body(base_plane(), vertices)
}

/// Cone over `n` points of the ellipse with semi-axes 1 and 0.6 whose radius
/// is modulated by `1 + η·Σ w_k cos(kθ + φ_k)` for `k = 3, 4, 5` with random
/// weights summing to one.
pub fn perturbed_ellipse<R: Rng + ?Sized>(eta: f64, n: usize, rng: &mut R) -> Result<ConeSpec> {
    if !(0.0..0.5).contains(&eta) {
        return Err(Error::InvalidParameter(format!("eta must lie in [0, 0.5), got {eta}")));
    }
    if n < 8 {
        return Err(Error::InvalidParameter("perturbed ellipse needs at least 8 vertices".into()));
    }
    let mut weights: Vec<(f64, f64)> = (3..=5)
        .map(|_| (rng.random_range(0.5..1.0), rng.random_range(0.0..2.0 * PI)))
        .collect();
    let total: f64 = weights.iter().map(|w| w.0).sum();
    for w in &mut weights {
        w.0 /= total;
    }
    let vertices = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            let noise: f64 = weights
                .iter()
                .zip(3..)
                .map(|((w, phase), k)| w * (k as f64 * t + phase).cos())
                .sum();
            let r = 1.0 + eta * noise;
            linalg::vector(&[1.0, r * t.cos(), 0.6 * r * t.sin()])
        })
        .collect();
    ConeSpec::base_body(base_plane(), vertices)
}
