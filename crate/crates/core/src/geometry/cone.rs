//! Polyhedral cones: halfspace and generator descriptions, lineality,
//! extreme rays, and the face structure needed for angle estimation.
//!
//! Cones are small here (a dozen constraints, ambient dimension at most
//! six or so), so extreme rays are enumerated directly from constraint
//! subsets instead of running a full double-description pass.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::util::IndexSet;

/// Rank / activity / feasibility tolerance for cone computations. Constraint
/// normals are kept at unit length so one scale-free epsilon covers all
/// decisions.
pub const CONE_EPS: f64 = 1e-9;

/// A polyhedral cone `{v : <a_i, v> <= 0 for all i}`, optionally with a
/// known generator list (`pos` of the generators plus the lineality space).
#[derive(Clone, Debug)]
pub struct PolyCone {
    pub dim_ambient: usize,
    /// Unit outward normals of the defining halfspaces.
    pub halfspaces: Vec<DVector<f64>>,
    /// Optional generating rays (not necessarily extreme).
    pub generators: Option<Vec<DVector<f64>>>,
    /// Dimension of the lineality space `C ∩ (-C)`.
    pub lineality_dim: usize,
}

/// One face of a cone, identified by the extreme rays it contains and the
/// constraints active on it.
#[derive(Clone, Debug)]
pub struct ConeFace {
    pub dim: usize,
    /// Indices into the cone's halfspace list that vanish on the face.
    pub active: Vec<usize>,
    /// Indices into `ConeStructure::extreme_rays`.
    pub rays: Vec<usize>,
}

/// Derived description of a cone: orthonormal bases for the lineality space,
/// the linear span, the pointed complement, and the extreme rays.
#[derive(Clone, Debug)]
pub struct ConeStructure {
    pub lineality: DMatrix<f64>,
    pub span: DMatrix<f64>,
    pub pointed: DMatrix<f64>,
    pub extreme_rays: Vec<DVector<f64>>,
}

/// Orthonormal basis of the null space of the rows in `rows` (vectors in
/// `R^d`). With no rows, the whole space.
pub fn nullspace(d: usize, rows: &[DVector<f64>]) -> DMatrix<f64> {
    if rows.is_empty() {
        return DMatrix::identity(d, d);
    }
    // Pad with zero rows so the SVD carries a full d x d right factor.
    let m = rows.len().max(d);
    let a = DMatrix::from_fn(m, d, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = CONE_EPS * max_sv.max(1.0);
    let null_rows: Vec<usize> = (0..d)
        .filter(|&i| i >= svd.singular_values.len() || svd.singular_values[i] <= tol)
        .collect();
    let mut basis = DMatrix::zeros(d, null_rows.len());
    for (col, &i) in null_rows.iter().enumerate() {
        for j in 0..d {
            basis[(j, col)] = v_t[(i, j)];
        }
    }
    basis
}

/// Orthonormal basis of the column span of `cols`.
pub fn column_span(d: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    if cols.is_empty() {
        return DMatrix::zeros(d, 0);
    }
    let a = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    let svd = a.svd(true, false);
    let u = svd.u.expect("requested");
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = CONE_EPS * max_sv.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    u.columns(0, rank).into_owned()
}

/// Affine or linear rank of a set of vectors within tolerance.
pub fn rank_of(d: usize, cols: &[DVector<f64>]) -> usize {
    column_span(d, cols).ncols()
}

impl PolyCone {
    /// Cone from halfspace normals; near-zero normals are dropped and the
    /// rest are normalized.
    pub fn from_halfspaces(d: usize, normals: impl IntoIterator<Item = DVector<f64>>) -> PolyCone {
        let halfspaces: Vec<DVector<f64>> = normals
            .into_iter()
            .filter_map(|a| {
                let norm = a.norm();
                (norm > CONE_EPS).then(|| a / norm)
            })
            .collect();
        let lineality_dim = nullspace(d, &halfspaces).ncols();
        PolyCone {
            dim_ambient: d,
            halfspaces,
            generators: None,
            lineality_dim,
        }
    }

    /// The whole space as a cone.
    pub fn full_space(d: usize) -> PolyCone {
        PolyCone {
            dim_ambient: d,
            halfspaces: Vec::new(),
            generators: None,
            lineality_dim: d,
        }
    }

    /// Cone generated as the positive hull of `gens`. The halfspace form is
    /// recovered from the extreme rays and lineality of the polar cone.
    pub fn from_generators(d: usize, gens: Vec<DVector<f64>>) -> Result<PolyCone> {
        let polar = PolyCone::from_halfspaces(d, gens.iter().cloned());
        let structure = polar.structure()?;
        let mut halfspaces: Vec<DVector<f64>> = structure.extreme_rays.clone();
        for col in 0..structure.lineality.ncols() {
            let l: DVector<f64> = structure.lineality.column(col).into_owned();
            halfspaces.push(l.clone());
            halfspaces.push(-l);
        }
        let mut cone = PolyCone::from_halfspaces(d, halfspaces);
        cone.generators = Some(
            gens.into_iter()
                .filter_map(|g| {
                    let n = g.norm();
                    (n > CONE_EPS).then(|| g / n)
                })
                .collect(),
        );
        Ok(cone)
    }

    /// Orthonormal basis of the lineality space `{v : <a_i, v> = 0 for all i}`.
    pub fn lineality_basis(&self) -> DMatrix<f64> {
        nullspace(self.dim_ambient, &self.halfspaces)
    }

    /// Orthonormal basis of the linear span of the cone.
    ///
    /// With generators present this is their column span (plus lineality);
    /// otherwise the implicit equality constraints are identified by one
    /// small LP per halfspace and the span is their common kernel.
    pub fn linear_span(&self) -> Result<DMatrix<f64>> {
        let d = self.dim_ambient;
        if let Some(gens) = &self.generators {
            let mut cols = gens.clone();
            let lin = self.lineality_basis();
            for c in 0..lin.ncols() {
                cols.push(lin.column(c).into_owned());
            }
            return Ok(column_span(d, &cols));
        }
        if self.halfspaces.is_empty() {
            return Ok(DMatrix::identity(d, d));
        }
        let mut implicit = Vec::new();
        for (i, a) in self.halfspaces.iter().enumerate() {
            if self.max_descent(a)? <= CONE_EPS {
                implicit.push(i);
            }
        }
        let rows: Vec<DVector<f64>> = implicit
            .iter()
            .map(|&i| self.halfspaces[i].clone())
            .collect();
        Ok(nullspace(d, &rows))
    }

    /// `max { -<a, v> : v in C, |v|_inf <= 1 }`, which is positive exactly
    /// when the constraint `a` is not an implicit equality of the cone.
    fn max_descent(&self, a: &DVector<f64>) -> Result<f64> {
        let d = self.dim_ambient;
        // v = u - 1 with 0 <= u <= 2 keeps the LP in standard form.
        let mut rows = Vec::new();
        let mut b = Vec::new();
        for h in &self.halfspaces {
            rows.push(h.iter().cloned().collect::<Vec<f64>>());
            b.push(h.sum());
        }
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            rows.push(e);
            b.push(2.0);
        }
        let c: Vec<f64> = (-a).iter().cloned().collect();
        match lp::solve_max(&c, &rows, &b)? {
            LpOutcome::Optimal { objective, .. } => Ok(objective + a.sum()),
            LpOutcome::Unbounded => Err(Error::InternalInconsistency(
                "bounded LP reported unbounded".into(),
            )),
            LpOutcome::Infeasible => Err(Error::InternalInconsistency(
                "feasible LP reported infeasible".into(),
            )),
        }
    }

    /// Full derived structure: lineality, span, pointed part, extreme rays.
    pub fn structure(&self) -> Result<ConeStructure> {
        let lineality = self.lineality_basis();
        let span = self.linear_span()?;
        let pointed = complement_within(&span, &lineality);
        let p = pointed.ncols();

        let mut extreme_rays = Vec::new();
        if p > 0 {
            // Constraints restricted to the pointed part.
            let mut reduced: Vec<DVector<f64>> = Vec::new();
            for a in &self.halfspaces {
                let c = pointed.transpose() * a;
                if c.norm() > CONE_EPS {
                    reduced.push(c);
                }
            }
            let candidates = if p == 1 {
                vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)]
            } else {
                ray_candidates(p, &reduced)
            };
            for y in candidates {
                if reduced.iter().all(|c| c.dot(&y) <= CONE_EPS) {
                    let opposite = reduced.iter().all(|c| c.dot(&(-y.clone())) <= CONE_EPS);
                    if opposite {
                        // would be lineality, which was projected out
                        continue;
                    }
                    let ray = &pointed * &y;
                    if !extreme_rays
                        .iter()
                        .any(|r: &DVector<f64>| r.dot(&ray) > 1.0 - 1e-7)
                    {
                        extreme_rays.push(ray);
                    }
                }
            }
        }

        Ok(ConeStructure {
            lineality,
            span,
            pointed,
            extreme_rays,
        })
    }

    /// Dimension of the cone as a convex set.
    pub fn dim(&self) -> Result<usize> {
        Ok(self.linear_span()?.ncols())
    }

    /// True when the cone is a linear subspace (its pointed part is trivial).
    pub fn is_linear_subspace(&self) -> Result<bool> {
        Ok(self.dim()? == self.lineality_basis().ncols())
    }

    /// All faces of the cone, from the minimal face (the lineality space)
    /// up to the cone itself, via intersection closure of ray activity
    /// sets.
    pub fn faces(&self) -> Result<Vec<ConeFace>> {
        let structure = self.structure()?;
        self.faces_with(&structure)
    }

    /// Same as [`PolyCone::faces`], reusing an already computed structure.
    pub fn faces_with(&self, structure: &ConeStructure) -> Result<Vec<ConeFace>> {
        let rays = &structure.extreme_rays;
        let m = self.halfspaces.len();
        let n_rays = rays.len();

        let constraint_rays: Vec<IndexSet> = (0..m)
            .map(|i| {
                IndexSet::from_indices(
                    n_rays.max(1),
                    (0..n_rays).filter(|&j| self.halfspaces[i].dot(&rays[j]).abs() <= CONE_EPS),
                )
            })
            .collect();

        let all_rays = IndexSet::from_indices(n_rays.max(1), 0..n_rays);
        let mut seen = std::collections::HashSet::new();
        let mut queue = vec![all_rays.clone()];
        seen.insert(all_rays);
        while let Some(face) = queue.pop() {
            for cr in &constraint_rays {
                let next = face.intersection(cr);
                if !seen.contains(&next) {
                    seen.insert(next.clone());
                    queue.push(next);
                }
            }
        }

        let lineality_cols: Vec<DVector<f64>> = (0..structure.lineality.ncols())
            .map(|c| structure.lineality.column(c).into_owned())
            .collect();

        let mut faces = Vec::new();
        for ray_set in seen {
            let ray_indices = ray_set.to_vec();
            let mut cols = lineality_cols.clone();
            for &j in &ray_indices {
                cols.push(rays[j].clone());
            }
            let dim = rank_of(self.dim_ambient, &cols);
            let active = (0..m)
                .filter(|&i| ray_set.is_subset(&constraint_rays[i]))
                .collect();
            faces.push(ConeFace {
                dim,
                active,
                rays: ray_indices,
            });
        }
        faces.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
        Ok(faces)
    }

    /// Tangent cone of this cone at one of its faces: only the constraints
    /// active on the face remain.
    pub fn tangent_at(&self, face: &ConeFace) -> PolyCone {
        PolyCone::from_halfspaces(
            self.dim_ambient,
            face.active.iter().map(|&i| self.halfspaces[i].clone()),
        )
    }

    /// Normal cone of this cone at one of its faces: the positive hull of
    /// the active constraint normals.
    pub fn normal_at(&self, face: &ConeFace) -> Result<PolyCone> {
        PolyCone::from_generators(
            self.dim_ambient,
            face.active.iter().map(|&i| self.halfspaces[i].clone()).collect(),
        )
    }
}

/// Orthonormal basis of `span ∩ lineality^perp`.
fn complement_within(span: &DMatrix<f64>, lineality: &DMatrix<f64>) -> DMatrix<f64> {
    let d = span.nrows();
    if span.ncols() == 0 {
        return DMatrix::zeros(d, 0);
    }
    let projected = span - lineality * (lineality.transpose() * span);
    let cols: Vec<DVector<f64>> = (0..projected.ncols())
        .map(|c| projected.column(c).into_owned())
        .collect();
    column_span(d, &cols)
}

/// Candidate extreme-ray directions: null vectors of `(p-1)`-subsets of the
/// reduced constraint rows.
fn ray_candidates(p: usize, reduced: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let m = reduced.len();
    let mut out = Vec::new();
    if p == 0 || m + 1 < p {
        return out;
    }
    let mut subset: Vec<usize> = (0..p - 1).collect();
    loop {
        let rows: Vec<DVector<f64>> = subset.iter().map(|&i| reduced[i].clone()).collect();
        let null = nullspace(p, &rows);
        if null.ncols() == 1 {
            let y: DVector<f64> = null.column(0).into_owned();
            out.push(y.clone());
            out.push(-y);
        }
        // next (p-1)-subset in lexicographic order
        let k = p - 1;
        if k == 0 {
            break;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + m - k {
                break;
            }
        }
        if subset[i] == i + m - k {
            return out;
        }
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    out
}
