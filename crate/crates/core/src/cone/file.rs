use serde::{Deserialize, Serialize};

use super::{ConeKind, ConeSpec};
use crate::error::{Error, Result};
use crate::linalg::{Hyperplane, Matrix, Vector};

/// JSON cone definition. Fields not used by the chosen variant must be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeFile {
    pub variant: String,
    pub dim: usize,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_axis: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_normal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_vertices: Option<Vec<Vec<f64>>>,
}

fn to_vector(v: &[f64], dim: usize, what: &'static str) -> Result<Vector> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what));
    }
    Ok(Vector::from_column_slice(v))
}

fn required<'a, T>(field: &'a Option<T>, name: &str, variant: &str) -> Result<&'a T> {
    field
        .as_ref()
        .ok_or_else(|| Error::InvalidCone(format!("variant {variant} requires field {name}")))
}

impl ConeFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "cone definition".into(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cone file serializes")
    }

    fn reject_extra(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("Q", self.q.is_some()),
            ("time_axis", self.time_axis.is_some()),
            ("rays", self.rays.is_some()),
            ("base_normal", self.base_normal.is_some()),
            ("base_offset", self.base_offset.is_some()),
            ("base_vertices", self.base_vertices.is_some()),
        ];
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(Error::InvalidCone(format!(
                    "field {name} is not allowed for variant {}",
                    self.variant
                )));
            }
        }
        Ok(())
    }

    pub fn to_cone(&self) -> Result<ConeSpec> {
        let d = self.dim;
        match self.variant.as_str() {
            "quadratic" => {
                self.reject_extra(&["Q", "time_axis"])?;
                let rows = required(&self.q, "Q", "quadratic")?;
                if rows.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: rows.len(),
                    });
                }
                let mut q = Matrix::zeros(d, d);
                for (i, row) in rows.iter().enumerate() {
                    q.set_row(i, &to_vector(row, d, "Q")?.transpose());
                }
                let t = to_vector(required(&self.time_axis, "time_axis", "quadratic")?, d, "time_axis")?;
                ConeSpec::quadratic(q, t)
            }
            "polyhedral" => {
                self.reject_extra(&["rays"])?;
                let rays = required(&self.rays, "rays", "polyhedral")?
                    .iter()
                    .map(|r| to_vector(r, d, "rays"))
                    .collect::<Result<Vec<_>>>()?;
                ConeSpec::polyhedral(rays)
            }
            "basebody" => {
                self.reject_extra(&["base_normal", "base_offset", "base_vertices"])?;
                let normal = to_vector(required(&self.base_normal, "base_normal", "basebody")?, d, "base_normal")?;
                let offset = *required(&self.base_offset, "base_offset", "basebody")?;
                if !offset.is_finite() {
                    return Err(Error::NonFinite("base_offset"));
                }
                let vertices = required(&self.base_vertices, "base_vertices", "basebody")?
                    .iter()
                    .map(|v| to_vector(v, d, "base_vertices"))
                    .collect::<Result<Vec<_>>>()?;
                ConeSpec::base_body(Hyperplane::new(normal, offset)?, vertices)
            }
            other => Err(Error::InvalidCone(format!("unknown variant {other:?}"))),
        }
    }

    pub fn from_cone(cone: &ConeSpec) -> Self {
        let d = cone.dim();
        let rows = |vs: &[Vector]| vs.iter().map(|v| v.iter().copied().collect()).collect();
        let mut file = ConeFile {
            variant: String::new(),
            dim: d,
            q: None,
            time_axis: None,
            rays: None,
            base_normal: None,
            base_offset: None,
            base_vertices: None,
        };
        match cone.kind() {
            ConeKind::Quadratic => {
                let (q, t) = cone.quadratic_form().unwrap();
                file.variant = "quadratic".into();
                file.q = Some((0..d).map(|i| q.row(i).iter().copied().collect()).collect());
                file.time_axis = Some(t.iter().copied().collect());
            }
            ConeKind::Polyhedral => {
                file.variant = "polyhedral".into();
                file.rays = Some(rows(cone.generators().unwrap()));
            }
            ConeKind::BaseBody => {
                let base = cone.base_hyperplane().unwrap();
                file.variant = "basebody".into();
                file.base_normal = Some(base.normal().iter().copied().collect());
                file.base_offset = Some(base.offset());
                file.base_vertices = Some(rows(cone.generators().unwrap()));
            }
        }
        file
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_variant() {
        let q = r#"{"variant":"quadratic","dim":3,"Q":[[1,0,0],[0,-1,0],[0,0,-1]],"time_axis":[1,0,0]}"#;
        assert_eq!(ConeFile::parse(q).unwrap().to_cone().unwrap().kind(), ConeKind::Quadratic);
        let p = r#"{"variant":"polyhedral","dim":3,"rays":[[1,1,1],[1,-1,1],[1,-1,-1],[1,1,-1]]}"#;
        assert_eq!(ConeFile::parse(p).unwrap().to_cone().unwrap().kind(), ConeKind::Polyhedral);
        let b = r#"{"variant":"basebody","dim":3,"base_normal":[1,0,0],"base_offset":1,
                   "base_vertices":[[1,0,1],[1,1,-1],[1,-1,-1]]}"#;
        assert_eq!(ConeFile::parse(b).unwrap().to_cone().unwrap().kind(), ConeKind::BaseBody);
    }

    #[test]
    fn rejects_unknown_and_misplaced_fields() {
        let unknown = r#"{"variant":"polyhedral","dim":2,"rays":[[1,1],[1,-1]],"color":"red"}"#;
        assert!(matches!(ConeFile::parse(unknown), Err(Error::Json { .. })));
        let misplaced = r#"{"variant":"polyhedral","dim":2,"rays":[[1,1],[1,-1]],"time_axis":[1,0]}"#;
        assert!(ConeFile::parse(misplaced).unwrap().to_cone().is_err());
        let missing = r#"{"variant":"quadratic","dim":2,"Q":[[1,0],[0,-1]]}"#;
        assert!(ConeFile::parse(missing).unwrap().to_cone().is_err());
        let wrong_dim = r#"{"variant":"polyhedral","dim":3,"rays":[[1,1],[1,-1]]}"#;
        assert!(ConeFile::parse(wrong_dim).unwrap().to_cone().is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let p = r#"{"variant":"polyhedral","dim":3,"rays":[[1,1,1],[1,-1,1],[1,-1,-1],[1,1,-1]]}"#;
        let file = ConeFile::parse(p).unwrap();
        let cone = file.to_cone().unwrap();
        let again = ConeFile::parse(&ConeFile::from_cone(&cone).to_json()).unwrap();
        assert_eq!(file, again);
    }
}
