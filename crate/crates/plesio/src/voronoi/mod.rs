//! Periodic Voronoi cells by iterative half-space clipping.
//!
//! Each cell is cut from a seed cube by the bisector planes of the site's
//! lattice neighbors, nearest first. The clipping pass only decides *which*
//! bisectors matter; the final combinatorics (vertices, face cycles, edges)
//! are then rebuilt exactly from that active plane set, merging vertices
//! where more than three planes meet. See `clip` for the details.

mod clip;
mod obj;
mod partition;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use crate::lattice::PeriodicPointSet;

pub use obj::{write_obj, ObjObject};
pub use partition::{validate_partition, PartitionError, PartitionReport};

/// Tolerances and neighbor-shell policy for cell construction.
#[derive(Clone, Copy, Debug)]
pub struct ClipConfig {
    /// Lattice shells supplying candidate neighbors (1 suffices whenever the
    /// covering radius is below period/2, which holds for every catalog
    /// case).
    pub shells: i32,
    /// Shells used by the post-hoc validation sweep.
    pub validate_shells: i32,
    /// Relative tolerance; ε_plane = ε_vertex = eps_rel · period.
    pub eps_rel: f64,
}

impl Default for ClipConfig {
    fn default() -> Self {
        ClipConfig {
            shells: 1,
            validate_shells: 2,
            eps_rel: 1e-6,
        }
    }
}

/// The neighbor site that generated a face (its bisector).
#[derive(Clone, Debug, PartialEq)]
pub struct FaceNeighbor {
    /// Replica position, absolute coordinates.
    pub position: Point3<f64>,
    /// Index of the generating base point in the point set.
    pub source_index: usize,
    /// Lattice translation of the replica, in period units.
    pub translation: [i32; 3],
}

/// One polygonal face of a cell.
#[derive(Clone, Debug)]
pub struct Face {
    /// Vertex indices, counterclockwise when seen from outside.
    pub cycle: Vec<usize>,
    /// Outward unit normal.
    pub normal: Vector3<f64>,
    /// Plane offset: points x on the face satisfy normal·x = offset.
    pub offset: f64,
    /// Generating neighbor; `None` for synthetically constructed cells.
    pub neighbor: Option<FaceNeighbor>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.cycle.len()
    }
}

/// A bounded convex polyhedron with merged combinatorics, produced by the
/// Voronoi construction (or built directly for reference shapes).
#[derive(Clone, Debug)]
pub struct ConvexCell {
    pub site: Point3<f64>,
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<Face>,
    /// Undirected vertex-index pairs, derived from the face cycles.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum VoronoiError {
    #[error("cell of site {site_index} is unbounded: seed box face survived clipping")]
    UnboundedCell { site_index: usize },
    #[error("vertex merging collapsed cell of site {site_index} to a degenerate solid")]
    ToleranceCollapse { site_index: usize },
    #[error("cell of site {site_index} failed validation: {reason}")]
    Validation { site_index: usize, reason: String },
}

impl ConvexCell {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Largest vertex distance from the site (outer circumradius).
    pub fn circumradius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v - self.site).norm())
            .fold(0.0, f64::max)
    }

    /// Distance from the site to a face plane.
    pub fn face_distance(&self, face: &Face) -> f64 {
        face.offset - face.normal.dot(&self.site.coords)
    }

    /// Whether `p` satisfies every face inequality within `eps`.
    pub fn contains(&self, p: &Point3<f64>, eps: f64) -> bool {
        self.faces
            .iter()
            .all(|f| f.normal.dot(&p.coords) <= f.offset + eps)
    }

    /// Whether `p` is strictly interior by more than `eps`.
    pub fn contains_strictly(&self, p: &Point3<f64>, eps: f64) -> bool {
        self.faces
            .iter()
            .all(|f| f.normal.dot(&p.coords) < f.offset - eps)
    }

    /// Translate the whole cell (site, vertices, planes) by `t`.
    pub fn translated(&self, t: &Vector3<f64>) -> ConvexCell {
        ConvexCell {
            site: self.site + t,
            vertices: self.vertices.iter().map(|v| v + t).collect(),
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    cycle: f.cycle.clone(),
                    normal: f.normal,
                    offset: f.offset + f.normal.dot(t),
                    neighbor: f.neighbor.as_ref().map(|n| FaceNeighbor {
                        position: n.position + t,
                        source_index: n.source_index,
                        translation: n.translation,
                    }),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }

    /// Build a cell directly from vertices and face cycles (for reference
    /// shapes that do not come from a point set). Planes are fit through the
    /// cycles; cycles must be planar and counterclockwise from outside.
    pub fn from_polygons(
        site: Point3<f64>,
        vertices: Vec<Point3<f64>>,
        cycles: Vec<Vec<usize>>,
    ) -> ConvexCell {
        let faces = cycles
            .into_iter()
            .map(|cycle| {
                let (normal, offset) = newell_plane(&vertices, &cycle);
                Face {
                    cycle,
                    normal,
                    offset,
                    neighbor: None,
                }
            })
            .collect();
        let mut cell = ConvexCell {
            site,
            vertices,
            faces,
            edges: Vec::new(),
        };
        cell.edges = derive_edges(&cell.faces);
        cell
    }
}

/// Plane through a polygon by the Newell method; normal oriented so the
/// cycle runs counterclockwise around it.
pub(crate) fn newell_plane(vertices: &[Point3<f64>], cycle: &[usize]) -> (Vector3<f64>, f64) {
    let mut n = Vector3::zeros();
    let mut c = Vector3::zeros();
    for (k, &i) in cycle.iter().enumerate() {
        let a = vertices[i];
        let b = vertices[cycle[(k + 1) % cycle.len()]];
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
        c += a.coords;
    }
    let n = n.normalize();
    (n, n.dot(&c) / cycle.len() as f64)
}

pub(crate) fn derive_edges(faces: &[Face]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = faces
        .iter()
        .flat_map(|f| {
            let c = &f.cycle;
            (0..c.len()).map(move |k| {
                let a = c[k];
                let b = c[(k + 1) % c.len()];
                (a.min(b), a.max(b))
            })
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Construct the periodic Voronoi cell of one site.
///
/// The cell is the intersection of the bisector half-spaces against all
/// shell-`cfg.shells` replicas of every site, with combinatorics merged at
/// ε = `cfg.eps_rel`·period; the result is validated against the
/// `cfg.validate_shells` replica set.
pub fn voronoi_cell(
    site_index: usize,
    set: &PeriodicPointSet,
    cfg: &ClipConfig,
) -> Result<ConvexCell, VoronoiError> {
    clip::build_cell(site_index, set, cfg)
}

/// Voronoi cells of every site, in site order.
pub fn voronoi_cells(
    set: &PeriodicPointSet,
    cfg: &ClipConfig,
) -> Result<Vec<ConvexCell>, VoronoiError> {
    use rayon::prelude::*;
    (0..set.len())
        .into_par_iter()
        .map(|i| voronoi_cell(i, set, cfg))
        .collect()
}

/// Volume by a signed tetrahedron fan from the site over the triangulated
/// faces.
pub fn cell_volume(cell: &ConvexCell) -> f64 {
    let s = cell.site;
    let mut six_vol = 0.0;
    for face in &cell.faces {
        let c = &face.cycle;
        for k in 1..c.len() - 1 {
            let a = cell.vertices[c[0]] - s;
            let b = cell.vertices[c[k]] - s;
            let d = cell.vertices[c[k + 1]] - s;
            six_vol += a.dot(&b.cross(&d));
        }
    }
    six_vol / 6.0
}

#[cfg(test)]
mod tests;
