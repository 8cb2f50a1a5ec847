//! Voronoi cells as halfspace polyhedra, their facet fans and simplicial
//! cones, and hyperspherical coordinates attached to a cone.

mod fan;
mod invariants;
mod polyhedron;
mod sphere;

pub use fan::{ClippedCell, FacetCone, SimplicialCone, BOUNDARY_TOL, EDGE_DET_TOL};
pub use invariants::{check_invariants, InvariantReport};
pub use polyhedron::{is_bounded, remove_redundant, voronoi_region, Halfspace, Polyhedron};
pub use sphere::{
    angle_box, cartesian_to_hyperspherical, hyperspherical_to_cartesian, rbar, unit_in_frame, AngleBox, Frame,
};

use serde::Serialize;

use crate::constellation::ReducedConstellation;
use crate::error::Result;

/// Clip radius used when none is given: twice the constellation's diameter
/// plus one. Rays through artificial facets are measured against the real
/// cell, so the value only has to keep the origin well inside.
pub fn default_clip_radius(r: &ReducedConstellation) -> f64 {
    2.0 * (r.max_distance() + 1.0)
}

/// Everything the quadrature needs about one symbol.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolCells {
    pub region: Polyhedron,
    pub cell: ClippedCell,
    pub cones: Vec<SimplicialCone>,
}

/// Cone decomposition of every Voronoi cell of a reduced constellation.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub dim: usize,
    pub clip_radius: f64,
    pub symbols: Vec<SymbolCells>,
}

impl Decomposition {
    pub fn new(r: &ReducedConstellation, clip_radius: Option<f64>) -> Result<Self> {
        let radius = clip_radius.unwrap_or_else(|| default_clip_radius(r));
        let symbols = (0..r.len())
            .map(|i| {
                let region = voronoi_region(r, i)?;
                let cell = ClippedCell::new(&region, radius)?;
                let cones = cell.simplicial_cones()?;
                Ok(SymbolCells { region, cell, cones })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: r.reduced_dim(), clip_radius: radius, symbols })
    }

    pub fn cone_count(&self) -> usize {
        self.symbols.iter().map(|s| s.cones.len()).sum()
    }

    /// JSON dump of cones, edges and angle boxes for external cross-checks.
    pub fn debug_json(&self) -> serde_json::Value {
        let symbols: Vec<_> = self
            .symbols
            .iter()
            .map(|s| {
                let cones: Vec<_> = s
                    .cones
                    .iter()
                    .map(|c| {
                        serde_json::json!({
                            "facet": c.facet_index,
                            "artificial": c.artificial,
                            "edges": c.edges.iter().map(|e| e.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
                            "angle_box": angle_box(c).map(|b| b.max_angles).unwrap_or_default(),
                        })
                    })
                    .collect();
                serde_json::json!({
                    "symbol": s.region.symbol_index,
                    "bounded": s.region.bounded,
                    "facets": s.region.halfspaces.iter().map(|h| serde_json::json!({
                        "a": h.a.iter().copied().collect::<Vec<_>>(),
                        "b": h.b,
                    })).collect::<Vec<_>>(),
                    "cones": cones,
                })
            })
            .collect();
        serde_json::json!({ "dim": self.dim, "clip_radius": self.clip_radius, "symbols": symbols })
    }
}
