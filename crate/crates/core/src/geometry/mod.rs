//! Polytopes at desk scale: incremental convex hulls, face lattices,
//! tangent and normal cones, projections, and the face-survival predicate
//! for linear images.

pub mod cone;
pub mod io;

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};

pub use cone::{ConeFace, ConeStructure, PolyCone, CONE_EPS};

use crate::error::{Error, Result};
use crate::util::IndexSet;

/// Default geometric tolerance. Sampled inputs are in general position
/// almost surely and deterministic fixtures have exactly representable
/// coordinates, so floating-point predicates with a fixed epsilon are
/// enough at this scale.
pub const GEOM_EPS: f64 = 1e-9;

static GEOM_EPS_BITS: AtomicU64 = AtomicU64::new(GEOM_EPS.to_bits());

/// Current global geometric tolerance; all visibility and incidence
/// decisions quote it (scaled by the coordinate magnitude).
pub fn geom_eps() -> f64 {
    f64::from_bits(GEOM_EPS_BITS.load(Ordering::Relaxed))
}

/// Override the global geometric tolerance. Affects subsequent hull
/// constructions process-wide.
pub fn set_geom_eps(eps: f64) {
    assert!(eps.is_finite() && eps > 0.0);
    GEOM_EPS_BITS.store(eps.to_bits(), Ordering::Relaxed);
}

/// A facet hyperplane `<normal, x> <= offset` with unit normal.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// A full-dimensional convex polytope with complete facet description and
/// facet-vertex incidence.
#[derive(Clone, Debug)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    pub facets: Vec<Facet>,
    incidence: Vec<IndexSet>,
}

/// A face of a polytope, identified by its vertices and by the facets
/// containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    pub facet_indices: Vec<usize>,
}

impl Polytope {
    pub fn is_incident(&self, facet: usize, vertex: usize) -> bool {
        self.incidence[facet].contains(vertex)
    }

    /// Vertex indices lying on the given facet.
    pub fn facet_vertices(&self, facet: usize) -> Vec<usize> {
        self.incidence[facet].to_vec()
    }

    /// Numbers of proper faces per dimension `0..d`.
    pub fn f_vector(&self) -> Vec<usize> {
        let lattice = face_lattice(self);
        (0..self.dim).map(|j| lattice[j].len()).collect()
    }

    /// Centroid of a vertex subset, a relative-interior point of the face
    /// they span.
    fn centroid_of(&self, vertex_indices: &[usize]) -> DVector<f64> {
        let mut c = DVector::zeros(self.dim);
        for &v in vertex_indices {
            c += &self.vertices[v];
        }
        c / vertex_indices.len() as f64
    }
}

fn coordinate_scale(points: &[DVector<f64>]) -> f64 {
    1.0 + points
        .iter()
        .map(|p| p.amax())
        .fold(0.0, f64::max)
}

/// Hyperplane through the given points: unit normal and offset, or `None`
/// if the points do not affinely span a hyperplane.
fn hyperplane_through(points: &[&DVector<f64>]) -> Option<(DVector<f64>, f64)> {
    let d = points[0].len();
    let rows: Vec<DVector<f64>> = points[1..].iter().map(|p| *p - points[0]).collect();
    let null = cone::nullspace(d, &rows);
    if null.ncols() != 1 {
        return None;
    }
    let normal: DVector<f64> = null.column(0).into_owned();
    let offset = normal.dot(points[0]);
    Some((normal, offset))
}

#[derive(Clone)]
struct SimplicialFacet {
    verts: Vec<usize>, // sorted, exactly d of them
    normal: DVector<f64>,
    offset: f64,
}

impl SimplicialFacet {
    fn distance(&self, p: &DVector<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Greedy choice of `d+1` affinely independent input points, maximizing the
/// distance to the current affine hull at every step.
fn initial_simplex(points: &[DVector<f64>], eps: f64) -> Result<Vec<usize>> {
    let d = points[0].len();
    let mut chosen = vec![0usize];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for _ in 0..d {
        let p0 = &points[chosen[0]];
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = p - p0;
            for b in &basis {
                let t = b.dot(&r);
                r -= b * t;
            }
            let dist = r.norm();
            if best.as_ref().map_or(true, |(_, bd, _)| dist > *bd) {
                best = Some((i, dist, r));
            }
        }
        match best {
            Some((i, dist, r)) if dist > eps => {
                chosen.push(i);
                basis.push(r / dist);
            }
            _ => {
                return Err(Error::DegenerateInput(format!(
                    "points affinely span less than {d} dimensions"
                )))
            }
        }
    }
    Ok(chosen)
}

/// Convex hull of a full-dimensional point set at the global tolerance.
///
/// Incremental insertion on a simplicial facet structure; coplanar
/// simplicial facets are merged afterwards, and the vertex set is filtered
/// to points whose incident facet normals span the ambient space.
pub fn convex_hull(points: &[DVector<f64>]) -> Result<Polytope> {
    convex_hull_with_eps(points, geom_eps())
}

/// [`convex_hull`] with an explicit base tolerance.
pub fn convex_hull_with_eps(points: &[DVector<f64>], eps: f64) -> Result<Polytope> {
    if points.is_empty() {
        return Err(Error::DegenerateInput("no input points".into()));
    }
    let d = points[0].len();
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::DegenerateInput(
            "points must share a positive ambient dimension".into(),
        ));
    }
    if points.len() < d + 1 {
        return Err(Error::DegenerateInput(format!(
            "need at least {} points in dimension {d}",
            d + 1
        )));
    }
    assert!(eps.is_finite() && eps > 0.0);
    let scale = coordinate_scale(points);
    let eps_vis = eps * scale;
    let eps_on = (100.0 * eps).max(1e-7) * scale;

    let seed_indices = initial_simplex(points, eps_vis)?;
    let interior = {
        let mut c = DVector::zeros(d);
        for &i in &seed_indices {
            c += &points[i];
        }
        c / (d + 1) as f64
    };

    let mut facets: Vec<SimplicialFacet> = Vec::new();
    for skip in 0..=d {
        let mut verts: Vec<usize> = seed_indices
            .iter()
            .enumerate()
            .filter_map(|(pos, &v)| (pos != skip).then_some(v))
            .collect();
        verts.sort_unstable();
        let pts: Vec<&DVector<f64>> = verts.iter().map(|&v| &points[v]).collect();
        let (mut normal, mut offset) = hyperplane_through(&pts)
            .ok_or_else(|| Error::DegenerateInput("degenerate initial simplex".into()))?;
        if normal.dot(&interior) - offset > 0.0 {
            normal = -normal;
            offset = -offset;
        }
        facets.push(SimplicialFacet {
            verts,
            normal,
            offset,
        });
    }

    for (p_idx, p) in points.iter().enumerate() {
        if seed_indices.contains(&p_idx) {
            continue;
        }
        let visible: Vec<usize> = (0..facets.len())
            .filter(|&f| facets[f].distance(p) > eps_vis)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let visible_set: HashSet<usize> = visible.iter().copied().collect();

        // Ridges of visible facets seen exactly once lie on the horizon.
        let mut ridge_count: HashMap<Vec<usize>, usize> = HashMap::new();
        for &f in &visible {
            for skip in 0..d {
                let ridge: Vec<usize> = facets[f]
                    .verts
                    .iter()
                    .enumerate()
                    .filter_map(|(pos, &v)| (pos != skip).then_some(v))
                    .collect();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }

        let mut new_facets = Vec::new();
        for (ridge, count) in &ridge_count {
            if *count != 1 {
                continue;
            }
            let mut verts = ridge.clone();
            verts.push(p_idx);
            verts.sort_unstable();
            let pts: Vec<&DVector<f64>> = verts.iter().map(|&v| &points[v]).collect();
            let plane = match hyperplane_through(&pts) {
                Some((mut normal, mut offset)) => {
                    if normal.dot(&interior) - offset > 0.0 {
                        normal = -normal;
                        offset = -offset;
                    }
                    (normal, offset)
                }
                None => {
                    // The new point is affinely dependent with the ridge, so
                    // it lies on the plane of the hidden neighbor facet;
                    // reuse that plane.
                    let hidden = (0..facets.len()).find(|&g| {
                        !visible_set.contains(&g)
                            && ridge.iter().all(|v| facets[g].verts.contains(v))
                    });
                    match hidden {
                        Some(g) if facets[g].distance(p).abs() <= eps_on => {
                            (facets[g].normal.clone(), facets[g].offset)
                        }
                        _ => {
                            return Err(Error::DegenerateInput(
                                "degenerate facet during incremental insertion".into(),
                            ))
                        }
                    }
                }
            };
            new_facets.push(SimplicialFacet {
                verts,
                normal: plane.0,
                offset: plane.1,
            });
        }

        let mut keep: Vec<SimplicialFacet> = facets
            .drain(..)
            .enumerate()
            .filter_map(|(i, f)| (!visible_set.contains(&i)).then_some(f))
            .collect();
        keep.extend(new_facets);
        facets = keep;
    }

    // Merge coplanar simplicial facets into true facets. Coplanarity is
    // decided by the membership test itself: a facet joins a plane only if
    // every one of its vertices lies on that plane within eps_on, which
    // keeps the merge consistent with the incidence computed below.
    // (A looser angle-only criterion can absorb a genuinely distinct facet
    // meeting its neighbor at a flat dihedral, corrupting the incidence.)
    let mut planes: Vec<(DVector<f64>, f64)> = Vec::new();
    for f in &facets {
        let found = planes.iter().any(|(n, b)| {
            n.dot(&f.normal) > 0.999
                && f.verts
                    .iter()
                    .all(|&v| (n.dot(&points[v]) - b).abs() <= eps_on)
        });
        if !found {
            planes.push((f.normal.clone(), f.offset));
        }
    }

    let boundary: HashSet<usize> = facets.iter().flat_map(|f| f.verts.iter().copied()).collect();

    // A boundary point is a vertex exactly when its incident facet normals
    // span the ambient space.
    let mut vertex_indices: Vec<usize> = boundary
        .iter()
        .copied()
        .filter(|&q| {
            let normals: Vec<DVector<f64>> = planes
                .iter()
                .filter(|(n, b)| (n.dot(&points[q]) - b).abs() <= eps_on)
                .map(|(n, _)| n.clone())
                .collect();
            cone::rank_of(d, &normals) == d
        })
        .collect();
    vertex_indices.sort_unstable();

    let vertices: Vec<DVector<f64>> = vertex_indices.iter().map(|&i| points[i].clone()).collect();
    let n_verts = vertices.len();

    let mut out_facets = Vec::new();
    let mut incidence = Vec::new();
    for (normal, offset) in planes {
        let set = IndexSet::from_indices(
            n_verts.max(1),
            (0..n_verts).filter(|&v| (normal.dot(&vertices[v]) - offset).abs() <= eps_on),
        );
        if set.len() < d {
            // Near-degenerate inputs (almost-collinear boundary chains) can
            // corrupt eps-scale visibility decisions; the inconsistency is
            // caught here rather than silently returned.
            return Err(Error::GeneralPosition(format!(
                "hull facet kept {} of {d} required vertices; input is within \
                 tolerance of a degenerate configuration",
                set.len(),
            )));
        }
        incidence.push(set);
        out_facets.push(Facet { normal, offset });
    }

    // Every input point must satisfy every facet inequality; a violation
    // means visibility decisions were inconsistent at tolerance scale.
    for f in &out_facets {
        for p in points {
            if f.normal.dot(p) - f.offset > eps_on {
                return Err(Error::GeneralPosition(
                    "hull leaves a point outside a facet; input is within \
                     tolerance of a degenerate configuration"
                        .into(),
                ));
            }
        }
    }

    Ok(Polytope {
        dim: d,
        vertices,
        facets: out_facets,
        incidence,
    })
}

/// All proper faces grouped by dimension `0..d`, with the polytope itself
/// appended as the single entry of dimension `d`.
///
/// Proper faces are exactly the non-empty intersections of facet vertex
/// sets, found by intersection closure.
pub fn face_lattice(p: &Polytope) -> Vec<Vec<Face>> {
    let n = p.vertices.len();
    let mut seen: HashSet<IndexSet> = HashSet::new();
    let mut queue: Vec<IndexSet> = Vec::new();
    for inc in &p.incidence {
        if seen.insert(inc.clone()) {
            queue.push(inc.clone());
        }
    }
    while let Some(set) = queue.pop() {
        for inc in &p.incidence {
            let next = set.intersection(inc);
            if !next.is_empty() && !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push(next.clone());
            }
        }
    }

    let mut grouped: Vec<Vec<Face>> = vec![Vec::new(); p.dim + 1];
    for set in seen {
        let vertex_indices = set.to_vec();
        let diffs: Vec<DVector<f64>> = vertex_indices[1..]
            .iter()
            .map(|&v| &p.vertices[v] - &p.vertices[vertex_indices[0]])
            .collect();
        let dim = cone::rank_of(p.dim, &diffs);
        let facet_indices: Vec<usize> = (0..p.incidence.len())
            .filter(|&i| set.is_subset(&p.incidence[i]))
            .collect();
        grouped[dim].push(Face {
            dim,
            vertex_indices,
            facet_indices,
        });
    }
    for faces in grouped.iter_mut() {
        faces.sort_by(|a, b| a.vertex_indices.cmp(&b.vertex_indices));
    }
    grouped[p.dim] = vec![Face {
        dim: p.dim,
        vertex_indices: (0..n).collect(),
        facet_indices: Vec::new(),
    }];
    grouped
}

/// Euler characteristic sum `sum_F (-1)^(dim F)` over all faces including
/// the polytope itself; equals one for every polytope.
pub fn euler_check(p: &Polytope) -> i64 {
    face_lattice(p)
        .iter()
        .enumerate()
        .map(|(dim, faces)| {
            let sign = if dim % 2 == 0 { 1 } else { -1 };
            sign * faces.len() as i64
        })
        .sum()
}

/// Tangent cone of `p` at the face `f`: feasible directions at a
/// relative-interior point. Halfspace form comes from the facets containing
/// the face; the generators are the vertex directions seen from the face
/// centroid.
pub fn tangent_cone(p: &Polytope, f: &Face) -> PolyCone {
    let f0 = p.centroid_of(&f.vertex_indices);
    let mut cone = PolyCone::from_halfspaces(
        p.dim,
        f.facet_indices.iter().map(|&i| p.facets[i].normal.clone()),
    );
    cone.generators = Some(
        p.vertices
            .iter()
            .filter_map(|v| {
                let g = v - &f0;
                let n = g.norm();
                (n > geom_eps()).then(|| g / n)
            })
            .collect(),
    );
    cone
}

/// Normal cone of `p` at the face `f`: the polar of the tangent cone,
/// positively spanned by the outer normals of the facets containing `f`.
pub fn normal_cone(p: &Polytope, f: &Face) -> PolyCone {
    let f0 = p.centroid_of(&f.vertex_indices);
    let halfspaces: Vec<DVector<f64>> = p
        .vertices
        .iter()
        .filter_map(|v| {
            let g = v - &f0;
            let n = g.norm();
            (n > geom_eps()).then(|| g / n)
        })
        .collect();
    let generators: Vec<DVector<f64>> = f
        .facet_indices
        .iter()
        .map(|&i| p.facets[i].normal.clone())
        .collect();
    let mut cone = PolyCone::from_halfspaces(p.dim, halfspaces);
    cone.generators = Some(generators);
    cone
}

/// Image of `p` under a full-rank `k x d` matrix, as a polytope in `R^k`.
pub fn project(p: &Polytope, b: &DMatrix<f64>) -> Result<Polytope> {
    let images = project_images(p, b)?;
    convex_hull(&images)
}

fn project_images(p: &Polytope, b: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let k = b.nrows();
    if b.ncols() != p.dim || k == 0 || k > p.dim {
        return Err(Error::InvalidArgument(format!(
            "projection must be k x d with 1 <= k <= d, got {} x {}",
            b.nrows(),
            b.ncols()
        )));
    }
    let rows: Vec<DVector<f64>> = (0..k).map(|i| b.row(i).transpose()).collect();
    if cone::rank_of(p.dim, &rows) != k {
        return Err(Error::DegenerateInput("projection matrix is rank deficient".into()));
    }
    Ok(p.vertices.iter().map(|v| b * v).collect())
}

/// Projection together with the map from image vertices back to the source
/// vertex they came from. Errors when two source vertices collide in the
/// image, since provenance is then ambiguous (a null event for random
/// projections).
pub fn project_with_map(p: &Polytope, b: &DMatrix<f64>) -> Result<(Polytope, Vec<usize>)> {
    let images = project_images(p, b)?;
    let hull = convex_hull(&images)?;
    let scale = coordinate_scale(&images);
    let mut map = Vec::with_capacity(hull.vertices.len());
    for v in &hull.vertices {
        let mut matches = (0..images.len()).filter(|&i| (&images[i] - v).norm() <= 1e-7 * scale);
        let first = matches.next().ok_or_else(|| {
            Error::InternalInconsistency("hull vertex missing from image list".into())
        })?;
        if matches.next().is_some() {
            return Err(Error::GeneralPosition(
                "two source vertices share an image point".into(),
            ));
        }
        map.push(first);
    }
    Ok((hull, map))
}

/// Checking mode for [`face_survives_projection`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurvivalCheck {
    /// Only the tangent-cone criterion `T_F(P) ∩ Ker B = {0}`.
    Primary,
    /// Additionally verify that `B F` is a `dim F`-face of `B P` through the
    /// face lattice of the image, and require agreement.
    DualCheck,
}

/// Does the face `f` of `p` survive projection by `b`, i.e. is `B F` a face
/// of `B P` of the same dimension?
///
/// The primary test intersects the tangent cone with the kernel of `b`. In
/// dual-check mode the image face lattice is consulted as well and any
/// disagreement is an error.
pub fn face_survives_projection(
    p: &Polytope,
    f: &Face,
    b: &DMatrix<f64>,
    mode: SurvivalCheck,
) -> Result<bool> {
    let k = b.nrows();
    if k <= f.dim {
        return Err(Error::InvalidArgument(format!(
            "projection rank {k} must exceed face dimension {}",
            f.dim
        )));
    }
    let rows: Vec<DVector<f64>> = (0..k).map(|i| b.row(i).transpose()).collect();
    let kernel = cone::nullspace(p.dim, &rows);
    if kernel.ncols() != p.dim - k {
        return Err(Error::DegenerateInput(
            "projection matrix is rank deficient".into(),
        ));
    }
    let survives = if kernel.ncols() == 0 {
        true
    } else {
        let tangent = tangent_cone(p, f);
        let basis = crate::cones::SubspaceBasis::new(kernel)?;
        !crate::cones::subspace_intersects_cone(&tangent, &basis)?
    };

    if mode == SurvivalCheck::DualCheck {
        let (image, map) = project_with_map(p, b)?;
        let back: HashMap<usize, usize> = map.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let image_face: Option<Vec<usize>> = f
            .vertex_indices
            .iter()
            .map(|v| back.get(v).copied())
            .collect::<Option<Vec<usize>>>()
            .map(|mut ids| {
                ids.sort_unstable();
                ids
            });
        let dual = match image_face {
            None => false, // some vertex of F is not even a vertex of B P
            Some(ids) => face_lattice(&image)
                .get(f.dim)
                .map_or(false, |faces| faces.iter().any(|g| g.vertex_indices == ids)),
        };
        if dual != survives {
            return Err(Error::InternalInconsistency(format!(
                "face survival disagreement: tangent-cone test says {survives}, image lattice says {dual}"
            )));
        }
    }
    Ok(survives)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> DVector<f64> {
        DVector::from_vec(coords.to_vec())
    }

    fn unit_square() -> Polytope {
        convex_hull(&[
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    fn unit_cube() -> Polytope {
        let mut pts = Vec::new();
        for m in 0..8u32 {
            pts.push(pt(&[
                (m & 1) as f64,
                ((m >> 1) & 1) as f64,
                ((m >> 2) & 1) as f64,
            ]));
        }
        convex_hull(&pts).unwrap()
    }

    #[test]
    fn square_hull() {
        let sq = unit_square();
        assert_eq!(sq.vertices.len(), 4);
        assert_eq!(sq.facets.len(), 4);
        assert_eq!(sq.f_vector(), vec![4, 4]);
    }

    #[test]
    fn interior_point_is_discarded() {
        let sq = convex_hull(&[
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
            pt(&[0.5, 0.5]),
        ])
        .unwrap();
        assert_eq!(sq.vertices.len(), 4);
        assert_eq!(sq.facets.len(), 4);
    }

    #[test]
    fn simplex_f_vector() {
        for d in 1..=4usize {
            let mut pts = vec![DVector::zeros(d)];
            for i in 0..d {
                let mut e = DVector::zeros(d);
                e[i] = 1.0;
                pts.push(e);
            }
            let simplex = convex_hull(&pts).unwrap();
            let f = simplex.f_vector();
            for (j, &count) in f.iter().enumerate() {
                let expect = crate::combinatorics::binomial(d + 1, j + 1);
                assert_eq!(count.to_string(), expect.to_string(), "d={d} j={j}");
            }
        }
    }

    #[test]
    fn cube_lattice_and_euler() {
        let cube = unit_cube();
        assert_eq!(cube.f_vector(), vec![8, 12, 6]);
        assert_eq!(euler_check(&cube), 1);
    }

    #[test]
    fn segment_euler() {
        let seg = convex_hull(&[pt(&[-1.0]), pt(&[2.0]), pt(&[0.5])]).unwrap();
        assert_eq!(seg.vertices.len(), 2);
        assert_eq!(euler_check(&seg), 1);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        // collinear points in the plane
        let err = convex_hull(&[pt(&[0.0, 0.0]), pt(&[1.0, 1.0]), pt(&[2.0, 2.0])]);
        assert!(matches!(err, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn geom_eps_is_configurable() {
        // A point 1e-5 outside the square is kept at the default epsilon
        // and swallowed at a coarser one.
        let points = [
            pt(&[0.0, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
            pt(&[0.5, 1.0 + 1e-5]),
        ];
        assert_eq!(convex_hull(&points).unwrap().vertices.len(), 5);
        let coarse = convex_hull_with_eps(&points, 1e-4).unwrap();
        assert_eq!(coarse.vertices.len(), 4);
        assert_eq!(geom_eps(), GEOM_EPS);
    }

    #[test]
    fn square_cones() {
        let sq = unit_square();
        let lattice = face_lattice(&sq);
        let vertex = &lattice[0][0];
        let t = tangent_cone(&sq, vertex);
        assert_eq!(t.halfspaces.len(), 2);
        assert_eq!(t.lineality_dim, 0);
        let edge = &lattice[1][0];
        let t_edge = tangent_cone(&sq, edge);
        assert_eq!(t_edge.halfspaces.len(), 1);
        assert_eq!(t_edge.lineality_dim, 1);
        let n_edge = normal_cone(&sq, edge);
        assert_eq!(n_edge.generators.as_ref().unwrap().len(), 1);
        assert_eq!(n_edge.dim().unwrap(), 1);
    }

    #[test]
    fn cube_vertex_cones() {
        let cube = unit_cube();
        let lattice = face_lattice(&cube);
        for v in &lattice[0] {
            let t = tangent_cone(&cube, v);
            assert_eq!(t.halfspaces.len(), 3);
            assert_eq!(t.lineality_dim, 0);
            let n = normal_cone(&cube, v);
            assert_eq!(n.generators.as_ref().unwrap().len(), 3);
        }
        for e in &lattice[1] {
            assert_eq!(tangent_cone(&cube, e).lineality_dim, 1);
        }
        for f2 in &lattice[2] {
            let n = normal_cone(&cube, f2);
            assert_eq!(n.dim().unwrap(), 1); // a single ray
        }
    }

    #[test]
    fn tangent_lineality_matches_face_dim() {
        let cube = unit_cube();
        for faces in face_lattice(&cube).iter().take(3) {
            for f in faces {
                assert_eq!(tangent_cone(&cube, f).lineality_dim, f.dim);
            }
        }
    }

    #[test]
    fn projection_of_cube_is_square() {
        let cube = unit_cube();
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let img = project(&cube, &b).unwrap();
        assert_eq!(img.vertices.len(), 4);
        assert_eq!(img.facets.len(), 4);
    }

    #[test]
    fn identity_projection_is_identity() {
        let sq = unit_square();
        let b = DMatrix::identity(2, 2);
        let img = project(&sq, &b).unwrap();
        assert_eq!(img.vertices.len(), 4);
        assert_eq!(img.f_vector(), sq.f_vector());
    }

    #[test]
    fn survival_under_identity() {
        let sq = unit_square();
        let b = DMatrix::identity(2, 2);
        for v in &face_lattice(&sq)[0] {
            assert!(face_survives_projection(&sq, v, &b, SurvivalCheck::DualCheck).unwrap());
        }
    }

    #[test]
    fn square_to_line_two_vertices_survive() {
        let sq = unit_square();
        let b = DMatrix::from_row_slice(1, 2, &[1.0, 0.37]);
        let lattice = face_lattice(&sq);
        let survivors = lattice[0]
            .iter()
            .filter(|v| {
                face_survives_projection(&sq, v, &b, SurvivalCheck::DualCheck).unwrap()
            })
            .count();
        assert_eq!(survivors, 2);
    }

    #[test]
    fn cube_to_generic_plane_six_vertices_survive() {
        // Kernel direction (1, 0.9, 0.8): only the two vertices whose
        // tangent cones contain +/- that direction drop out.
        let cube = unit_cube();
        let kernel = pt(&[1.0, 0.9, 0.8]).normalize();
        let basis = cone::nullspace(3, &[kernel]);
        let b = basis.transpose();
        let lattice = face_lattice(&cube);
        let mut survivors = Vec::new();
        for v in &lattice[0] {
            if face_survives_projection(&cube, v, &b, SurvivalCheck::DualCheck).unwrap() {
                survivors.push(v.vertex_indices[0]);
            }
        }
        assert_eq!(survivors.len(), 6);
        // brute force: a vertex dies iff the kernel direction (either sign)
        // satisfies all its tangent-cone constraints
        for v in &lattice[0] {
            let t = tangent_cone(&cube, v);
            let k = pt(&[1.0, 0.9, 0.8]).normalize();
            let dies = t.halfspaces.iter().all(|h| h.dot(&k) <= 1e-12)
                || t.halfspaces.iter().all(|h| -h.dot(&k) <= 1e-12);
            assert_eq!(dies, !survivors.contains(&v.vertex_indices[0]));
        }
    }

    #[test]
    fn projected_faces_have_unique_source() {
        // every j-face of the image is the image of exactly one j-face
        let cube = unit_cube();
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 0.2, -0.3, 0.1, 0.8, 0.4]);
        let (img, map) = project_with_map(&cube, &b).unwrap();
        let source_lattice = face_lattice(&cube);
        for (j, faces) in face_lattice(&img).iter().enumerate().take(img.dim) {
            for g in faces {
                let source_verts: Vec<usize> = {
                    let mut s: Vec<usize> =
                        g.vertex_indices.iter().map(|&v| map[v]).collect();
                    s.sort_unstable();
                    s
                };
                let matches = source_lattice[j]
                    .iter()
                    .filter(|f| f.vertex_indices == source_verts)
                    .count();
                assert_eq!(matches, 1, "image face {source_verts:?} at dim {j}");
            }
        }
    }
}
