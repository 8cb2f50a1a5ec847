use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::polyhedron::{remove_redundant, Halfspace, Polyhedron};
use crate::error::{Error, Result};

/// On-boundary classification tolerance.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Minimum `|det|` of a simplicial cone's edge matrix.
pub const EDGE_DET_TOL: f64 = 1e-10;

/// A bounded polytope built from a Voronoi cell, possibly closed off by
/// artificial box facets. `real` keeps the cell's own halfspaces so that rays
/// through artificial facets can still be measured against the true cell.
#[derive(Debug, Clone, Serialize)]
pub struct ClippedCell {
    pub symbol_index: usize,
    pub halfspaces: Vec<Halfspace>,
    pub artificial: Vec<bool>,
    pub real: Vec<Halfspace>,
    pub vertices: Vec<DVector<f64>>,
    /// For each vertex, the indices of the halfspaces it lies on.
    pub active: Vec<Vec<usize>>,
}

/// The cone over one facet, given by the facet's vertices.
#[derive(Debug, Clone, Serialize)]
pub struct FacetCone {
    pub facet_index: usize,
    pub vertices: Vec<usize>,
}

/// Cone spanned by `N` independent rays through the origin. `points` are the
/// ray intersections with the generating facet's hyperplane; `edges` are the
/// same rays normalized.
#[derive(Debug, Clone, Serialize)]
pub struct SimplicialCone {
    pub edges: Vec<DVector<f64>>,
    pub points: Vec<DVector<f64>>,
    pub facet_index: usize,
    pub symbol_index: usize,
    pub halfspace: Halfspace,
    pub artificial: bool,
}

impl SimplicialCone {
    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.edges)
    }

    pub fn point_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.points)
    }

    /// Conic coordinates of `x`: `x = Σ λ_k v_k`. `None` when the edge matrix
    /// is singular.
    pub fn conic_coordinates(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        self.edge_matrix().lu().solve(x)
    }

    /// True when every conic coordinate is ≥ −tol·‖x‖.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let scale = x.norm().max(1e-300);
        self.conic_coordinates(x).is_some_and(|l| l.iter().all(|&c| c >= -tol * scale))
    }
}

impl ClippedCell {
    /// Clips `poly` with the box `|x_k| ≤ radius` when it is unbounded and
    /// enumerates the vertices of the result.
    pub fn new(poly: &Polyhedron, radius: f64) -> Result<Self> {
        let n = poly.dim();
        let mut hs = poly.halfspaces.clone();
        let mut artificial = vec![false; hs.len()];
        if !poly.bounded {
            if !(radius > 0.0) || !radius.is_finite() {
                return Err(Error::InvalidArgument("clip radius must be positive".into()));
            }
            let mut all = hs.clone();
            for k in 0..n {
                for s in [1.0, -1.0] {
                    let mut a = DVector::zeros(n);
                    a[k] = s;
                    all.push(Halfspace { a, b: radius });
                }
            }
            let reduced = remove_redundant(&all)?;
            artificial = reduced
                .halfspaces
                .iter()
                .map(|h| !poly.halfspaces.iter().any(|g| g == h))
                .collect();
            hs = reduced.halfspaces;
        }
        let (vertices, active) = enumerate_vertices(&hs)?;
        Ok(Self {
            symbol_index: poly.symbol_index,
            halfspaces: hs,
            artificial,
            real: poly.halfspaces.clone(),
            vertices,
            active,
        })
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, Halfspace::dim)
    }

    /// One cone per facet, generated by the facet's vertices.
    pub fn cone_fan(&self) -> Vec<FacetCone> {
        (0..self.halfspaces.len())
            .map(|f| FacetCone {
                facet_index: f,
                vertices: (0..self.vertices.len()).filter(|&v| self.active[v].contains(&f)).collect(),
            })
            .collect()
    }

    /// Splits one facet cone into simplicial cones by a pulling
    /// triangulation from the lowest-index vertex.
    pub fn triangulate_cone(&self, cone: &FacetCone) -> Result<Vec<SimplicialCone>> {
        let n = self.dim();
        let h = &self.halfspaces[cone.facet_index];
        let simplices = self.triangulate_face(&[cone.facet_index], &cone.vertices, n - 1)?;
        let mut out = Vec::with_capacity(simplices.len());
        for s in simplices {
            let points: Vec<DVector<f64>> = s.iter().map(|&v| self.vertices[v].clone()).collect();
            let edges: Vec<DVector<f64>> = points.iter().map(|p| p / p.norm()).collect();
            let det = DMatrix::from_columns(&edges).determinant();
            if det.abs() <= EDGE_DET_TOL {
                return Err(Error::Degenerate(format!(
                    "symbol {}: facet {} produced a flat simplicial cone (|det| = {:.3e})",
                    self.symbol_index,
                    cone.facet_index,
                    det.abs()
                )));
            }
            out.push(SimplicialCone {
                edges,
                points,
                facet_index: cone.facet_index,
                symbol_index: self.symbol_index,
                halfspace: h.clone(),
                artificial: self.artificial[cone.facet_index],
            });
        }
        Ok(out)
    }

    /// All simplicial cones of the cell.
    pub fn simplicial_cones(&self) -> Result<Vec<SimplicialCone>> {
        let mut out = Vec::new();
        for cone in self.cone_fan() {
            out.extend(self.triangulate_cone(&cone)?);
        }
        Ok(out)
    }

    /// Simplices (as vertex index lists) of the face cut out by `defining`,
    /// which has affine dimension `dim` and vertex set `verts`.
    fn triangulate_face(&self, defining: &[usize], verts: &[usize], dim: usize) -> Result<Vec<Vec<usize>>> {
        if verts.len() < dim + 1 {
            return Err(Error::Degenerate(format!(
                "face {defining:?} of symbol {} has {} vertices, needs {}",
                self.symbol_index,
                verts.len(),
                dim + 1
            )));
        }
        if dim == 0 {
            return Ok(vec![vec![verts[0]]]);
        }
        if verts.len() == dim + 1 {
            return Ok(vec![verts.to_vec()]);
        }
        let v0 = verts[0];
        let mut subfaces: Vec<(usize, Vec<usize>)> = Vec::new();
        for g in (0..self.halfspaces.len()).filter(|g| !defining.contains(g)) {
            let sub: Vec<usize> = verts.iter().copied().filter(|&v| self.active[v].contains(&g)).collect();
            if sub.contains(&v0) || sub.len() < dim || affine_rank(&self.vertices, &sub) != dim - 1 {
                continue;
            }
            if !subfaces.iter().any(|(_, s)| *s == sub) {
                subfaces.push((g, sub));
            }
        }
        let mut out = Vec::new();
        for (g, sub) in subfaces {
            let mut def = defining.to_vec();
            def.push(g);
            for mut s in self.triangulate_face(&def, &sub, dim - 1)? {
                s.insert(0, v0);
                out.push(s);
            }
        }
        Ok(out)
    }
}

fn affine_rank(points: &[DVector<f64>], idx: &[usize]) -> usize {
    if idx.len() < 2 {
        return 0;
    }
    let base = &points[idx[0]];
    let cols: Vec<DVector<f64>> = idx[1..].iter().map(|&k| &points[k] - base).collect();
    let m = DMatrix::from_columns(&cols);
    let scale = m.amax().max(1.0);
    m.svd(false, false).singular_values.iter().filter(|&&s| s > 1e-9 * scale).count()
}

/// Intersects every `N`-subset of hyperplanes, keeps feasible points, merges
/// duplicates and records the active constraints of each vertex.
fn enumerate_vertices(hs: &[Halfspace]) -> Result<(Vec<DVector<f64>>, Vec<Vec<usize>>)> {
    let n = hs.first().map_or(0, Halfspace::dim);
    let scale = hs.iter().map(|h| h.b).fold(1.0, f64::max);
    let tol = BOUNDARY_TOL * scale;
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    if hs.len() < n {
        return Err(Error::Degenerate("fewer halfspaces than dimensions".into()));
    }
    loop {
        let a = DMatrix::from_fn(n, n, |r, c| hs[subset[r]].a[c]);
        if a.determinant().abs() > 1e-12 {
            let b = DVector::from_iterator(n, subset.iter().map(|&k| hs[k].b));
            if let Some(x) = a.lu().solve(&b) {
                if hs.iter().all(|h| h.slack(&x) <= tol) && !vertices.iter().any(|v| (v - &x).amax() <= tol) {
                    vertices.push(x);
                }
            }
        }
        if !next_combination(&mut subset, hs.len()) {
            break;
        }
    }
    // deterministic order: lexicographic in coordinates
    vertices.sort_by(|p, q| {
        p.iter().zip(q.iter()).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let active = vertices
        .iter()
        .map(|x| (0..hs.len()).filter(|&k| hs[k].slack(x).abs() <= tol).collect())
        .collect();
    Ok((vertices, active))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyhedron::voronoi_region;
    use crate::{fixtures, Constellation};

    fn cell(c: &Constellation, i: usize) -> ClippedCell {
        let r = c.reduced();
        let p = voronoi_region(&r, i).unwrap();
        ClippedCell::new(&p, 2.0 * (r.max_distance() + 1.0)).unwrap()
    }

    fn square_cell() -> ClippedCell {
        let hs: Vec<Halfspace> = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
            .iter()
            .map(|a| Halfspace::new(DVector::from_column_slice(a), 1.0).unwrap())
            .collect();
        ClippedCell::new(&remove_redundant(&hs).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn square_fan_is_four_right_angle_wedges() {
        let c = square_cell();
        assert_eq!(c.vertices.len(), 4);
        let fan = c.cone_fan();
        assert_eq!(fan.len(), 4);
        for f in &fan {
            let cones = c.triangulate_cone(f).unwrap();
            assert_eq!(cones.len(), 1);
            let cos = cones[0].edges[0].dot(&cones[0].edges[1]);
            assert!((cos.acos() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn hexagon_fan_has_six_cones() {
        let c = cell(&fixtures::hex7(), 0);
        assert_eq!(c.cone_fan().len(), 6);
        assert_eq!(c.simplicial_cones().unwrap().len(), 6);
    }

    #[test]
    fn cube_cell_fan() {
        // centre symbol of a 3×3×3 grid has a cube cell
        let mut pts = Vec::new();
        for x in -1..=1 {
            for y in -1..=1 {
                for z in -1..=1 {
                    pts.extend([x as f64, y as f64, z as f64]);
                }
            }
        }
        let c = Constellation::new(DMatrix::from_column_slice(3, 27, &pts), None).unwrap();
        let centre = 13;
        let cc = cell(&c, centre);
        assert_eq!(cc.vertices.len(), 8);
        let fan = cc.cone_fan();
        assert_eq!(fan.len(), 6);
        for f in &fan {
            assert_eq!(f.vertices.len(), 4);
            assert_eq!(cc.triangulate_cone(f).unwrap().len(), 2);
        }
    }

    #[test]
    fn hexagonal_facet_splits_into_four() {
        // hexagonal prism: the top facet is a regular hexagon
        let mut hs = Vec::new();
        for k in 0..6 {
            let t = k as f64 * std::f64::consts::FRAC_PI_3;
            hs.push(Halfspace::new(DVector::from_column_slice(&[t.cos(), t.sin(), 0.0]), 1.0).unwrap());
        }
        hs.push(Halfspace::new(DVector::from_column_slice(&[0.0, 0.0, 1.0]), 1.0).unwrap());
        hs.push(Halfspace::new(DVector::from_column_slice(&[0.0, 0.0, -1.0]), 1.0).unwrap());
        let p = remove_redundant(&hs).unwrap();
        assert!(p.bounded);
        let cc = ClippedCell::new(&p, 1.0).unwrap();
        let top = cc.cone_fan().into_iter().find(|f| cc.halfspaces[f.facet_index].a[2] > 0.5).unwrap();
        assert_eq!(top.vertices.len(), 6);
        assert_eq!(cc.triangulate_cone(&top).unwrap().len(), 4);
        let side = cc.cone_fan().into_iter().find(|f| cc.halfspaces[f.facet_index].a[2].abs() < 0.5).unwrap();
        assert_eq!(cc.triangulate_cone(&side).unwrap().len(), 2);
    }

    #[test]
    fn two_d_wedge_is_already_simplicial() {
        let c = cell(&fixtures::qpsk(), 0);
        for f in c.cone_fan() {
            assert_eq!(f.vertices.len(), 2);
            assert_eq!(c.triangulate_cone(&f).unwrap().len(), 1);
        }
    }

    #[test]
    fn unbounded_cells_are_clipped() {
        let c = cell(&fixtures::qpsk(), 0);
        assert!(c.artificial.iter().any(|&a| a));
        assert_eq!(c.artificial.iter().filter(|&&a| !a).count(), 2);
        let b = cell(&fixtures::bpsk(), 0);
        assert_eq!(b.vertices.len(), 2);
        assert_eq!(b.simplicial_cones().unwrap().len(), 2);
    }

    #[test]
    fn combinations() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 4) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
