//! JSON interchange for polytopes.
//!
//! Input documents carry `dim` and `vertices`; output adds the facet
//! hyperplanes and the f-vector computed from the hull.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Polytope};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FacetJson {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<FacetJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_vector: Option<Vec<usize>>,
}

/// Parse a polytope document and build the hull of its vertices.
pub fn polytope_from_json(text: &str) -> Result<Polytope> {
    let doc: PolytopeJson = serde_json::from_str(text)?;
    if doc.vertices.is_empty() {
        return Err(Error::DegenerateInput("no vertices in document".into()));
    }
    if doc.vertices.iter().any(|v| v.len() != doc.dim) {
        return Err(Error::InvalidArgument(
            "vertex length disagrees with declared dimension".into(),
        ));
    }
    let points: Vec<DVector<f64>> = doc
        .vertices
        .iter()
        .map(|v| DVector::from_vec(v.clone()))
        .collect();
    convex_hull(&points)
}

/// Serialize a polytope with facets and f-vector attached.
pub fn polytope_to_json(p: &Polytope) -> PolytopeJson {
    PolytopeJson {
        dim: p.dim,
        vertices: p.vertices.iter().map(|v| v.iter().cloned().collect()).collect(),
        facets: Some(
            p.facets
                .iter()
                .map(|f| FacetJson {
                    normal: f.normal.iter().cloned().collect(),
                    offset: f.offset,
                })
                .collect(),
        ),
        f_vector: Some(p.f_vector()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_square() {
        let text = r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1],[0.5,0.5]]}"#;
        let poly = polytope_from_json(text).unwrap();
        let doc = polytope_to_json(&poly);
        assert_eq!(doc.dim, 2);
        assert_eq!(doc.vertices.len(), 4);
        assert_eq!(doc.f_vector, Some(vec![4, 4]));
        assert_eq!(doc.facets.unwrap().len(), 4);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let text = r#"{"dim": 3, "vertices": [[0,0],[1,0],[1,1]]}"#;
        assert!(polytope_from_json(text).is_err());
    }
}
