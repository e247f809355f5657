//! Gap/overlap validation of a full cell set against the nearest-site rule.

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use super::{cell_volume, ConvexCell};
use crate::lattice::{periodic_delta, PeriodicPointSet};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PartitionError {
    #[error("sample {point:?} is outside the cell of its nearest site {site}")]
    PartitionGap { point: [f64; 3], site: usize },
    #[error("sample {point:?} lies strictly inside the cell of site {site}, which is not its nearest")]
    PartitionOverlap { point: [f64; 3], site: usize },
    #[error("cell volumes sum to {total}, expected {expected}")]
    VolumeMismatch { total: f64, expected: f64 },
    #[error("expected one cell per site ({sites}), got {cells}")]
    CellCountMismatch { cells: usize, sites: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct PartitionReport {
    pub samples: usize,
    /// Σ cell volumes / period³.
    pub volume_ratio: f64,
}

/// Check that the cells tile the period cube without gaps or overlaps.
///
/// For `samples` seeded pseudo-random points, the nearest site's cell must
/// contain the point within ε_plane, and no other site's cell may contain it
/// strictly. Cell volumes must sum to period³ within 1e-9 relative.
pub fn validate_partition(
    cells: &[ConvexCell],
    set: &PeriodicPointSet,
    samples: usize,
    seed: u64,
    eps_plane: f64,
) -> Result<PartitionReport, PartitionError> {
    if cells.len() != set.len() {
        return Err(PartitionError::CellCountMismatch {
            cells: cells.len(),
            sites: set.len(),
        });
    }
    let period = set.period();
    let expected = period.powi(3);
    let total: f64 = cells.iter().map(cell_volume).sum();
    if ((total - expected) / expected).abs() > 1e-9 {
        return Err(PartitionError::VolumeMismatch { total, expected });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point3<f64>> = (0..samples)
        .map(|_| {
            Point3::new(
                rng.random_range(0.0..period),
                rng.random_range(0.0..period),
                rng.random_range(0.0..period),
            )
        })
        .collect();

    let violation = points
        .par_iter()
        .find_map_first(|p| check_sample(p, cells, set, eps_plane).err());
    match violation {
        Some(e) => Err(e),
        None => Ok(PartitionReport {
            samples,
            volume_ratio: total / expected,
        }),
    }
}

fn check_sample(
    p: &Point3<f64>,
    cells: &[ConvexCell],
    set: &PeriodicPointSet,
    eps: f64,
) -> Result<(), PartitionError> {
    let period = set.period();
    let mut nearest = 0usize;
    let mut nearest_d = f64::INFINITY;
    // min-image displacement per site doubles as the cell-frame coordinate
    let mut local: Vec<Point3<f64>> = Vec::with_capacity(cells.len());
    for (i, site) in set.points().iter().enumerate() {
        let delta = periodic_delta(p, site, period);
        let d = delta.norm();
        if d < nearest_d {
            nearest_d = d;
            nearest = i;
        }
        local.push(cells[i].site + delta);
    }
    if !cells[nearest].contains(&local[nearest], eps) {
        return Err(PartitionError::PartitionGap {
            point: [p.x, p.y, p.z],
            site: nearest,
        });
    }
    for (i, cell) in cells.iter().enumerate() {
        if i != nearest && cell.contains_strictly(&local[i], eps) {
            return Err(PartitionError::PartitionOverlap {
                point: [p.x, p.y, p.z],
                site: i,
            });
        }
    }
    Ok(())
}
