//! Measurement and classification of convex cells: metric classes,
//! spheres, roundness, chirality and congruence under the cube group.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Point3, Vector3};
use serde::Serialize;

use crate::octahedral::{self, GroupElement};
use crate::voronoi::ConvexCell;

/// Rotation/reflection/translation-invariant descriptor of a cell.
///
/// Lengths are stored raw but grouped into classes at 1e-4 of the cell scale
/// (cube root of volume); comparing across scales divides them out by the
/// scale first.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeFingerprint {
    pub faces: usize,
    pub vertices: usize,
    pub edges: usize,
    pub face_degree_histogram: BTreeMap<usize, usize>,
    /// Sorted (class representative length, count); Σ counts = E.
    pub edge_class_lengths: Vec<(f64, usize)>,
    /// Sorted (distance from site to face plane, count); Σ counts = F.
    pub face_plane_distances: Vec<(f64, usize)>,
    /// Sorted (vertex distance from site, count); Σ counts = V.
    pub vertex_radius_classes: Vec<(f64, usize)>,
    pub volume: f64,
    /// Volume over the volume of the outer circumsphere.
    pub roundness: f64,
}

impl ShapeFingerprint {
    pub fn scale(&self) -> f64 {
        self.volume.cbrt()
    }

    /// Combinatorics plus scale-normalized metric comparison at a relative
    /// tolerance on the length classes.
    pub fn matches(&self, other: &ShapeFingerprint, tol_rel: f64) -> bool {
        if self.faces != other.faces
            || self.vertices != other.vertices
            || self.edges != other.edges
            || self.face_degree_histogram != other.face_degree_histogram
        {
            return false;
        }
        let close = |a: &[(f64, usize)], b: &[(f64, usize)], sa: f64, sb: f64| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(&(va, ca), &(vb, cb))| ca == cb && (va / sa - vb / sb).abs() <= tol_rel)
        };
        let (sa, sb) = (self.scale(), other.scale());
        close(&self.edge_class_lengths, &other.edge_class_lengths, sa, sb)
            && close(&self.face_plane_distances, &other.face_plane_distances, sa, sb)
            && close(&self.vertex_radius_classes, &other.vertex_radius_classes, sa, sb)
    }
}

/// Group sorted values into classes whose span stays within `tol`.
fn classes(mut values: Vec<f64>, tol: f64) -> Vec<(f64, usize)> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 0..=values.len() {
        let split = i == values.len() || (values[i] - values[start]) > tol;
        if split && i > start {
            let slice = &values[start..i];
            out.push((slice.iter().sum::<f64>() / slice.len() as f64, slice.len()));
            start = i;
        }
    }
    out
}

/// Compute the descriptor of a cell.
pub fn fingerprint(cell: &ConvexCell) -> ShapeFingerprint {
    let volume = crate::voronoi::cell_volume(cell);
    let scale = volume.cbrt();
    let tol = 1e-4 * scale;
    let mut hist = BTreeMap::new();
    for f in &cell.faces {
        *hist.entry(f.degree()).or_insert(0) += 1;
    }
    let edge_lengths: Vec<f64> = cell
        .edges
        .iter()
        .map(|&(a, b)| (cell.vertices[a] - cell.vertices[b]).norm())
        .collect();
    let face_dists: Vec<f64> = cell.faces.iter().map(|f| cell.face_distance(f)).collect();
    let radii: Vec<f64> = cell
        .vertices
        .iter()
        .map(|v| (v - cell.site).norm())
        .collect();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    ShapeFingerprint {
        faces: cell.face_count(),
        vertices: cell.vertex_count(),
        edges: cell.edge_count(),
        face_degree_histogram: hist,
        edge_class_lengths: classes(edge_lengths, tol),
        face_plane_distances: classes(face_dists, tol),
        vertex_radius_classes: classes(radii, tol),
        volume,
        roundness: volume / (4.0 / 3.0 * std::f64::consts::PI * r_max.powi(3)),
    }
}

/// Volume of the cell over the volume of its outer circumsphere.
pub fn roundness(cell: &ConvexCell) -> f64 {
    let volume = crate::voronoi::cell_volume(cell);
    let r = cell.circumradius();
    volume / (4.0 / 3.0 * std::f64::consts::PI * r.powi(3))
}

/// Foot of the perpendicular from the site to each face plane, with its
/// distance, in face order.
pub fn face_closest_points(cell: &ConvexCell) -> Vec<(Point3<f64>, f64)> {
    cell.faces
        .iter()
        .map(|f| {
            let d = cell.face_distance(f);
            (cell.site + f.normal * d, d)
        })
        .collect()
}

/// Does a point on a face plane lie inside the face polygon (within `eps`)?
pub fn point_in_face(cell: &ConvexCell, face_index: usize, p: &Point3<f64>, eps: f64) -> bool {
    let f = &cell.faces[face_index];
    let c = &f.cycle;
    (0..c.len()).all(|k| {
        let a = cell.vertices[c[k]];
        let b = cell.vertices[c[(k + 1) % c.len()]];
        (b - a).cross(&(p - a)).dot(&f.normal) >= -eps
    })
}

/// Result of a congruence search under the 48-element cube group.
#[derive(Clone, Debug)]
pub struct CongruenceResult {
    pub congruent: bool,
    /// Signed-permutation matrix and translation mapping the first cell's
    /// vertex set onto the second's.
    pub transform: Option<(Matrix3<f64>, Vector3<f64>)>,
    /// Whether the matrix found is a rotation (determinant +1).
    pub proper: bool,
}

fn match_vertices(
    mapped: &[Vector3<f64>],
    target: &[Vector3<f64>],
    eps: f64,
) -> bool {
    let mut used = vec![false; target.len()];
    'outer: for v in mapped {
        for (j, w) in target.iter().enumerate() {
            if !used[j] && (v - w).norm() <= eps {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn centered(cell: &ConvexCell) -> Vec<Vector3<f64>> {
    cell.vertices.iter().map(|v| v - cell.site).collect()
}

fn congruence_scale(a: &ConvexCell) -> f64 {
    crate::voronoi::cell_volume(a).cbrt()
}

/// Search the 48 signed-permutation matrices (24 rotations when
/// `allow_reflection` is false) for one mapping `a`'s vertex set onto `b`'s
/// within ε = 1e-6 of the cell scale.
pub fn congruent(a: &ConvexCell, b: &ConvexCell, allow_reflection: bool) -> CongruenceResult {
    let not = CongruenceResult {
        congruent: false,
        transform: None,
        proper: false,
    };
    if a.vertex_count() != b.vertex_count()
        || a.edge_count() != b.edge_count()
        || a.face_count() != b.face_count()
    {
        return not;
    }
    let scale = congruence_scale(a);
    if (congruence_scale(b) - scale).abs() > 1e-6 * scale {
        return not;
    }
    let eps = 1e-6 * scale;
    let va = centered(a);
    let vb = centered(b);
    for elem in octahedral::elements() {
        if !allow_reflection && !elem.proper {
            continue;
        }
        let mapped: Vec<Vector3<f64>> = va.iter().map(|v| elem.matrix * v).collect();
        if match_vertices(&mapped, &vb, eps) {
            let t = b.site.coords - elem.matrix * a.site.coords;
            return CongruenceResult {
                congruent: true,
                transform: Some((elem.matrix, t)),
                proper: elem.proper,
            };
        }
    }
    not
}

/// All rotations (indices into the 24 proper group elements) mapping `a`
/// onto `b`; the set is the congruence class key of `b` relative to `a`.
pub fn proper_transforms(a: &ConvexCell, b: &ConvexCell) -> Vec<&'static GroupElement> {
    if a.vertex_count() != b.vertex_count() {
        return Vec::new();
    }
    let scale = congruence_scale(a);
    let eps = 1e-6 * scale;
    let va = centered(a);
    let vb = centered(b);
    octahedral::proper_elements()
        .filter(|elem| {
            let mapped: Vec<Vector3<f64>> = va.iter().map(|v| elem.matrix * v).collect();
            match_vertices(&mapped, &vb, eps)
        })
        .collect()
}

/// Interior angles (degrees) of every quadrilateral face, in face order.
pub fn quad_angle_check(cell: &ConvexCell) -> Vec<(usize, Vec<f64>)> {
    cell.faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.degree() == 4)
        .map(|(i, f)| (i, face_angles(cell, &f.cycle)))
        .collect()
}

fn face_angles(cell: &ConvexCell, cycle: &[usize]) -> Vec<f64> {
    let k = cycle.len();
    (0..k)
        .map(|i| {
            let p0 = cell.vertices[cycle[(i + k - 1) % k]];
            let p1 = cell.vertices[cycle[i]];
            let p2 = cell.vertices[cycle[(i + 1) % k]];
            let u = p0 - p1;
            let w = p2 - p1;
            (u.dot(&w) / (u.norm() * w.norm())).clamp(-1.0, 1.0).acos().to_degrees()
        })
        .collect()
}

/// For each quad face, the two interior angles adjacent to its longest edge.
pub fn quad_angles_at_longest_edge(cell: &ConvexCell) -> Vec<[f64; 2]> {
    cell.faces
        .iter()
        .filter(|f| f.degree() == 4)
        .map(|f| {
            let c = &f.cycle;
            let angles = face_angles(cell, c);
            let longest = (0..4)
                .max_by(|&i, &j| {
                    let li = (cell.vertices[c[(i + 1) % 4]] - cell.vertices[c[i]]).norm();
                    let lj = (cell.vertices[c[(j + 1) % 4]] - cell.vertices[c[j]]).norm();
                    li.total_cmp(&lj)
                })
                .unwrap();
            [angles[longest], angles[(longest + 1) % 4]]
        })
        .collect()
}

/// Number of edges meeting at each vertex.
pub fn vertex_valences(cell: &ConvexCell) -> Vec<usize> {
    let mut val = vec![0usize; cell.vertex_count()];
    for &(a, b) in &cell.edges {
        val[a] += 1;
        val[b] += 1;
    }
    val
}

/// Handedness of each quad face from the counterclockwise sequence of its
/// edge-length classes: +1 and -1 mark the two mirror variants, 0 a
/// palindromic (achiral) sequence.
pub fn quad_face_types(cell: &ConvexCell) -> Vec<(usize, i8)> {
    let fp = fingerprint(cell);
    let class_of = |len: f64| -> usize {
        fp.edge_class_lengths
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (a.0 - len).abs().total_cmp(&(b.0 - len).abs()))
            .map(|(i, _)| i)
            .unwrap()
    };
    cell.faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.degree() == 4)
        .map(|(i, f)| {
            let seq: Vec<usize> = (0..4)
                .map(|k| {
                    let a = cell.vertices[f.cycle[k]];
                    let b = cell.vertices[f.cycle[(k + 1) % 4]];
                    class_of((b - a).norm())
                })
                .collect();
            let fwd = min_rotation(&seq);
            let rev = min_rotation(&seq.iter().rev().copied().collect::<Vec<_>>());
            let t = match fwd.cmp(&rev) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
            };
            (i, t)
        })
        .collect()
}

fn min_rotation(seq: &[usize]) -> Vec<usize> {
    (0..seq.len())
        .map(|s| {
            seq.iter()
                .cycle()
                .skip(s)
                .take(seq.len())
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap()
}

/// Does the cell carry two parallel equilateral hexagonal faces (normals
/// antiparallel, all six edges of each face equal within 1e-6 of scale)?
pub fn parallel_regular_hexagon_pair(cell: &ConvexCell) -> bool {
    let scale = crate::voronoi::cell_volume(cell).cbrt();
    let eps = 1e-6 * scale;
    let regular_hexes: Vec<usize> = cell
        .faces
        .iter()
        .enumerate()
        .filter(|(_, f)| f.degree() == 6)
        .filter(|(_, f)| {
            let lengths: Vec<f64> = (0..6)
                .map(|k| {
                    (cell.vertices[f.cycle[(k + 1) % 6]] - cell.vertices[f.cycle[k]]).norm()
                })
                .collect();
            let mean = lengths.iter().sum::<f64>() / 6.0;
            lengths.iter().all(|l| (l - mean).abs() <= eps)
        })
        .map(|(i, _)| i)
        .collect();
    regular_hexes.iter().any(|&i| {
        regular_hexes.iter().any(|&j| {
            j != i && cell.faces[i].normal.dot(&cell.faces[j].normal) < -1.0 + 1e-9
        })
    })
}

/// Apply an orthogonal matrix and translation to a cell. Improper maps
/// reverse the face cycles so they stay counterclockwise from outside.
pub fn transform_cell(cell: &ConvexCell, m: &Matrix3<f64>, t: &Vector3<f64>) -> ConvexCell {
    let improper = m.determinant() < 0.0;
    let map = |p: &Point3<f64>| Point3::from(m * p.coords + t);
    let faces = cell
        .faces
        .iter()
        .map(|f| {
            let normal = m * f.normal;
            let on_plane = map(&Point3::from(f.normal * f.offset));
            let mut cycle = f.cycle.clone();
            if improper {
                cycle.reverse();
            }
            crate::voronoi::Face {
                cycle,
                normal,
                offset: normal.dot(&on_plane.coords),
                neighbor: f.neighbor.as_ref().map(|n| crate::voronoi::FaceNeighbor {
                    position: map(&n.position),
                    source_index: n.source_index,
                    translation: n.translation,
                }),
            }
        })
        .collect();
    ConvexCell {
        site: map(&cell.site),
        vertices: cell.vertices.iter().map(map).collect(),
        faces,
        edges: cell.edges.clone(),
    }
}

#[cfg(test)]
#[path = "anatomy_tests.rs"]
mod tests;
