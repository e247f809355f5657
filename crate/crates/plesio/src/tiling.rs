//! Unit-cell tessellation analysis: orientation classes of the cells,
//! rotation recovery against a reference cell, and the planar projection of
//! the generating centers (a Cairo pentagonal tiling for the FKS minima).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::anatomy::proper_transforms;
use crate::lattice::PeriodicPointSet;
use crate::octahedral::{self, GroupElement};
use crate::voronoi::{cell_volume, voronoi_cells, ClipConfig, ConvexCell, VoronoiError};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TilingError {
    #[error("cell {site} is not congruent to the reference cell under the 48-group")]
    NotCongruent { site: usize },
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
}

/// One orientation class: the exact set of rotations carrying the reference
/// cell onto every member.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientationClass {
    /// Indices into [`octahedral::elements`] of the proper transforms
    /// (empty only for classes that match the reference improperly).
    pub transforms: Vec<usize>,
    /// Improper element indices, recorded when no proper transform exists.
    pub improper_transforms: Vec<usize>,
    pub members: Vec<usize>,
}

impl OrientationClass {
    pub fn proper(&self) -> bool {
        !self.transforms.is_empty()
    }
}

/// All cells of one period cube plus their orientation structure.
#[derive(Clone, Debug)]
pub struct UnitCellTiling {
    pub set: PeriodicPointSet,
    pub cells: Vec<ConvexCell>,
    pub reference: usize,
    pub orientation_classes: Vec<OrientationClass>,
    /// Σ cell volumes / period³; 1 for a valid tessellation.
    pub volume_ratio: f64,
}

/// Group cells by the exact transform sets that map the reference onto
/// them. Errors when some cell is not congruent to the reference at all.
pub fn orientation_classes(
    cells: &[ConvexCell],
    reference: usize,
) -> Result<Vec<OrientationClass>, TilingError> {
    let refc = &cells[reference];
    let mut keyed: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for (i, cell) in cells.iter().enumerate() {
        let proper: Vec<usize> = proper_transforms(refc, cell)
            .into_iter()
            .map(|e| e.index)
            .collect();
        let improper: Vec<usize> = if proper.is_empty() {
            improper_transforms(refc, cell)
        } else {
            Vec::new()
        };
        if proper.is_empty() && improper.is_empty() {
            return Err(TilingError::NotCongruent { site: i });
        }
        keyed.entry((proper, improper)).or_default().push(i);
    }
    Ok(keyed
        .into_iter()
        .map(|((transforms, improper_transforms), members)| OrientationClass {
            transforms,
            improper_transforms,
            members,
        })
        .collect())
}

fn improper_transforms(a: &ConvexCell, b: &ConvexCell) -> Vec<usize> {
    use crate::anatomy::transform_cell;
    octahedral::elements()
        .iter()
        .filter(|e| !e.proper)
        .filter(|e| {
            let moved = transform_cell(a, &e.matrix, &nalgebra::Vector3::zeros());
            crate::anatomy::congruent(&moved, b, false).congruent
        })
        .map(|e| e.index)
        .collect()
}

/// Build every cell of the set and class them against cell 0.
pub fn build_tiling(set: &PeriodicPointSet, cfg: &ClipConfig) -> Result<UnitCellTiling, TilingError> {
    let cells = voronoi_cells(set, cfg)?;
    let classes = orientation_classes(&cells, 0)?;
    let volume: f64 = cells.iter().map(cell_volume).sum();
    Ok(UnitCellTiling {
        set: set.clone(),
        cells,
        reference: 0,
        orientation_classes: classes,
        volume_ratio: volume / set.period().powi(3),
    })
}

/// For each cell, one rotation (lowest group index) mapping the reference
/// onto it.
pub fn recover_rotations(
    tiling: &UnitCellTiling,
) -> Result<Vec<(usize, &'static GroupElement)>, TilingError> {
    let refc = &tiling.cells[tiling.reference];
    tiling
        .cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            proper_transforms(refc, cell)
                .into_iter()
                .next()
                .map(|e| (i, e))
                .ok_or(TilingError::NotCongruent { site: i })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Cairo projection
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjAxis {
    X,
    Y,
    Z,
}

impl ProjAxis {
    pub const ALL: [ProjAxis; 3] = [ProjAxis::X, ProjAxis::Y, ProjAxis::Z];

    fn keep(self) -> (usize, usize) {
        match self {
            ProjAxis::X => (1, 2),
            ProjAxis::Y => (2, 0),
            ProjAxis::Z => (0, 1),
        }
    }
}

/// The projection of a point set along one axis, with the short-distance
/// neighbor graph on the 2-torus.
#[derive(Clone, Debug)]
pub struct CairoCheck {
    pub axis: ProjAxis,
    pub projected: Vec<[f64; 2]>,
    /// (i, j, periodic distance), i < j.
    pub edges: Vec<(usize, usize, f64)>,
    pub degree_histogram: BTreeMap<usize, usize>,
    /// Sorted (representative length, count).
    pub edge_length_classes: Vec<(f64, usize)>,
    /// Torus Euler count F = E - V (χ = 0). Meaningful for a proper 2-cell
    /// embedding; negative for degenerate graphs.
    pub torus_faces: i64,
}

/// Project the points along `axis` and join pairs within the Cairo cut-off
/// (√5 in the period-8 frame, rescaled to the set's period).
pub fn cairo_projection(set: &PeriodicPointSet, axis: ProjAxis) -> CairoCheck {
    let period = set.period();
    let cutoff = 5f64.sqrt() * period / 8.0 + 1e-6 * period;
    let (u, v) = axis.keep();
    let projected: Vec<[f64; 2]> = set.points().iter().map(|p| [p[u], p[v]]).collect();

    let dist = |a: &[f64; 2], b: &[f64; 2]| -> f64 {
        let mut acc = 0.0;
        for c in 0..2 {
            let mut d = (a[c] - b[c]).abs();
            d -= (d / period).round() * period;
            acc += d * d;
        }
        acc.sqrt()
    };
    let mut edges = Vec::new();
    for i in 0..projected.len() {
        for j in (i + 1)..projected.len() {
            let d = dist(&projected[i], &projected[j]);
            if d <= cutoff {
                edges.push((i, j, d));
            }
        }
    }
    let mut degree_histogram = BTreeMap::new();
    let mut degrees = vec![0usize; projected.len()];
    for (i, j, _) in &edges {
        degrees[*i] += 1;
        degrees[*j] += 1;
    }
    for d in degrees {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let mut lengths: Vec<f64> = edges.iter().map(|e| e.2).collect();
    lengths.sort_by(f64::total_cmp);
    let tol = 1e-6 * period;
    let mut edge_length_classes: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 0..=lengths.len() {
        if i == lengths.len() || lengths[i] - lengths[start] > tol {
            if i > start {
                let s = &lengths[start..i];
                edge_length_classes.push((s.iter().sum::<f64>() / s.len() as f64, s.len()));
            }
            start = i;
        }
    }
    let torus_faces = edges.len() as i64 - projected.len() as i64;
    CairoCheck {
        axis,
        projected,
        edges,
        degree_histogram,
        edge_length_classes,
        torus_faces,
    }
}
