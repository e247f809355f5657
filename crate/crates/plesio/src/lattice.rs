//! Periodic (Delone) point sets on a cubic lattice and their metric
//! descriptors.
//!
//! Three coordinate frames recur throughout the crate and are fixed here
//! once: `F_unit` (period 1, coordinates as fractions), `F_num` (period 8,
//! the fraction numerators), and `F_int` (period 24, in which the Josehedron
//! has integer vertex coordinates, three times `F_num`).

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use crate::voronoi::ConvexCell;

/// The cubic frames used for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    /// Period 1; coordinates are fractions of the cell edge.
    Unit,
    /// Period 8; the fraction numerators (denominator 8) become integers.
    Numerator,
    /// Period 24; vertex coordinates of the Josehedron become integers.
    Integer,
}

impl Frame {
    pub fn period(self) -> f64 {
        match self {
            Frame::Unit => 1.0,
            Frame::Numerator => 8.0,
            Frame::Integer => 24.0,
        }
    }
}

/// A Delone set given as base points in one period cube; lattice
/// translations are implied.
#[derive(Clone, Debug)]
pub struct PeriodicPointSet {
    points: Vec<Point3<f64>>,
    period: f64,
    labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum LatticeError {
    #[error("covering radius requires the Voronoi cells of the set")]
    MissingCells,
    #[error("point {index} lies outside [0, period): {coord}")]
    OutOfRange { index: usize, coord: f64 },
    #[error("points {a} and {b} coincide under the periodic metric")]
    DuplicatePoint { a: usize, b: usize },
}

/// Packing and covering radii of a Delone set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeloneRadii {
    /// Half the minimum pairwise periodic distance.
    pub packing_r: f64,
    /// Maximum distance from any space point to the nearest set point;
    /// equals the largest Voronoi-cell circumradius.
    pub covering_r: f64,
}

/// Minimum distance between two points over all lattice translations of the
/// second. Symmetric, and a metric on the torus.
pub fn periodic_distance(a: &Point3<f64>, b: &Point3<f64>, period: f64) -> f64 {
    periodic_delta(a, b, period).norm()
}

/// The shortest displacement from `b` to `a` on the torus, component-wise.
pub fn periodic_delta(a: &Point3<f64>, b: &Point3<f64>, period: f64) -> Vector3<f64> {
    let mut d = a - b;
    for i in 0..3 {
        d[i] -= (d[i] / period).round() * period;
    }
    d
}

impl PeriodicPointSet {
    /// Build a set, wrapping each coordinate into [0, period).
    pub fn new(points: Vec<Point3<f64>>, period: f64) -> Result<Self, LatticeError> {
        Self::with_labels(points, period, None)
    }

    pub fn with_labels(
        points: Vec<Point3<f64>>,
        period: f64,
        labels: Option<Vec<String>>,
    ) -> Result<Self, LatticeError> {
        assert!(period > 0.0, "period must be positive");
        let points: Vec<Point3<f64>> = points
            .into_iter()
            .map(|p| Point3::new(wrap(p.x, period), wrap(p.y, period), wrap(p.z, period)))
            .collect();
        for (i, p) in points.iter().enumerate() {
            for (j, q) in points.iter().enumerate().skip(i + 1) {
                if periodic_distance(p, q, period) == 0.0 {
                    return Err(LatticeError::DuplicatePoint { a: i, b: j });
                }
            }
        }
        Ok(PeriodicPointSet {
            points,
            period,
            labels,
        })
    }

    pub fn points(&self) -> &[Point3<f64>] {
        &self.points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Uniformly rescale the set to another period.
    pub fn rescaled(&self, period: f64) -> PeriodicPointSet {
        let s = period / self.period;
        PeriodicPointSet {
            points: self.points.iter().map(|p| Point3::new(p.x * s, p.y * s, p.z * s)).collect(),
            period,
            labels: self.labels.clone(),
        }
    }

    /// All lattice copies of the base points with translation components in
    /// [-shells, shells]; `count = len · (2·shells + 1)³`.
    pub fn replicas(&self, shells: i32) -> Vec<(Point3<f64>, usize)> {
        assert!(shells >= 1, "replicas need at least one shell");
        let mut out = Vec::with_capacity(self.points.len() * ((2 * shells + 1).pow(3)) as usize);
        for tx in -shells..=shells {
            for ty in -shells..=shells {
                for tz in -shells..=shells {
                    let t = Vector3::new(tx as f64, ty as f64, tz as f64) * self.period;
                    for (i, p) in self.points.iter().enumerate() {
                        out.push((p + t, i));
                    }
                }
            }
        }
        out
    }

    /// Half the minimum pairwise periodic distance (self-pairs count against
    /// their own lattice copies, so a single point has packing radius
    /// period/2).
    pub fn packing_radius(&self) -> f64 {
        let mut min = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            for (j, q) in self.points.iter().enumerate() {
                for tx in -1..=1i32 {
                    for ty in -1..=1i32 {
                        for tz in -1..=1i32 {
                            if i == j && tx == 0 && ty == 0 && tz == 0 {
                                continue;
                            }
                            let t = Vector3::new(tx as f64, ty as f64, tz as f64) * self.period;
                            let d = (q + t - p).norm();
                            if d < min {
                                min = d;
                            }
                        }
                    }
                }
            }
        }
        min / 2.0
    }

    /// Index of the base point nearest to `p` under the periodic metric.
    pub fn nearest_site(&self, p: &Point3<f64>) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = periodic_distance(p, q, self.period);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r == period {
        0.0
    } else {
        r
    }
}

/// Packing and covering radii. The covering radius is read off the cell
/// vertices (the largest circumradius), so the set's Voronoi cells must be
/// supplied; [`LatticeError::MissingCells`] otherwise.
pub fn delone_radii(
    set: &PeriodicPointSet,
    cells: Option<&[ConvexCell]>,
) -> Result<DeloneRadii, LatticeError> {
    let cells = cells.ok_or(LatticeError::MissingCells)?;
    let mut covering: f64 = 0.0;
    for cell in cells {
        for v in &cell.vertices {
            covering = covering.max((v - cell.site).norm());
        }
    }
    Ok(DeloneRadii {
        packing_r: set.packing_radius(),
        covering_r: covering,
    })
}

/// The 12 minima of the Fischer-Koch S field, as numerators of eighths
/// (frame `F_num`).
pub const FKS_MINIMA_NUM: [[f64; 3]; 12] = [
    [0.0, 2.0, 3.0],
    [0.0, 6.0, 1.0],
    [1.0, 0.0, 6.0],
    [2.0, 3.0, 0.0],
    [2.0, 5.0, 4.0],
    [3.0, 0.0, 2.0],
    [4.0, 2.0, 5.0],
    [4.0, 6.0, 7.0],
    [5.0, 4.0, 2.0],
    [6.0, 1.0, 0.0],
    [6.0, 7.0, 4.0],
    [7.0, 4.0, 6.0],
];

/// The 12 maxima of the Fischer-Koch S field in `F_num`.
pub const FKS_MAXIMA_NUM: [[f64; 3]; 12] = [
    [0.0, 2.0, 7.0],
    [0.0, 6.0, 5.0],
    [1.0, 4.0, 2.0],
    [2.0, 1.0, 4.0],
    [2.0, 7.0, 0.0],
    [3.0, 4.0, 6.0],
    [4.0, 2.0, 1.0],
    [4.0, 6.0, 3.0],
    [5.0, 0.0, 6.0],
    [6.0, 3.0, 4.0],
    [6.0, 5.0, 0.0],
    [7.0, 0.0, 2.0],
];

/// The FKS minima as a period-8 point set.
pub fn fks_minima_set() -> PeriodicPointSet {
    PeriodicPointSet::new(
        FKS_MINIMA_NUM.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect(),
        Frame::Numerator.period(),
    )
    .expect("reference minima are distinct")
}

/// The FKS maxima as a period-8 point set.
pub fn fks_maxima_set() -> PeriodicPointSet {
    PeriodicPointSet::new(
        FKS_MAXIMA_NUM.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect(),
        Frame::Numerator.period(),
    )
    .expect("reference maxima are distinct")
}
