//! Cell construction internals.
//!
//! Building runs in two phases, both in site-local coordinates (u = x - s):
//!
//! 1. *Pruning pass.* Starting from a seed cube of half-width `period`, the
//!    candidate bisectors are applied nearest first with plain polygon
//!    clipping. Neighbors farther than twice the current maximum vertex
//!    distance cannot touch the cell and are skipped wholesale. The output
//!    is only the set of planes that still carry a face (and whether any
//!    seed-box face survived, which would mean an unbounded cell).
//!
//! 2. *Exact rebuild.* Vertices are recomputed as intersections of plane
//!    triples from the active set, kept when they satisfy every half-space,
//!    and merged within ε_vertex, so a corner where four or more bisectors
//!    meet becomes a single vertex. Face cycles are re-derived from the
//!    plane-incidence sets of the merged vertices.
//!
//! A final sweep checks that no bisector from the wider validation shell
//! cuts the rebuilt cell deeper than ε_plane; any violator is added to the
//! active set and the rebuild repeats (this never triggers for the catalog
//! point sets, where shell 1 is sufficient).

use nalgebra::{Matrix3, Point3, Vector3};

use super::{derive_edges, ClipConfig, ConvexCell, Face, FaceNeighbor, VoronoiError};
use crate::lattice::PeriodicPointSet;

#[derive(Clone, Copy, Debug)]
struct Plane {
    n: Vector3<f64>, // unit
    d: f64,          // n·u <= d with d > 0
}

#[derive(Clone, Debug)]
struct Candidate {
    plane: Plane,
    delta: Vector3<f64>, // neighbor - site
    source_index: usize,
    translation: [i32; 3],
}

fn candidates(site_index: usize, set: &PeriodicPointSet, shells: i32) -> Vec<Candidate> {
    let site = set.points()[site_index];
    let period = set.period();
    let mut out = Vec::new();
    for tx in -shells..=shells {
        for ty in -shells..=shells {
            for tz in -shells..=shells {
                for (j, p) in set.points().iter().enumerate() {
                    if j == site_index && tx == 0 && ty == 0 && tz == 0 {
                        continue;
                    }
                    let t = Vector3::new(tx as f64, ty as f64, tz as f64) * period;
                    let delta = p + t - site;
                    let dist = delta.norm();
                    out.push(Candidate {
                        plane: Plane {
                            n: delta / dist,
                            d: dist / 2.0,
                        },
                        delta,
                        source_index: j,
                        translation: [tx, ty, tz],
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.delta
            .norm()
            .total_cmp(&b.delta.norm())
            .then(a.source_index.cmp(&b.source_index))
            .then(a.translation.cmp(&b.translation))
    });
    out
}

// ---------------------------------------------------------------------------
// Phase 1: pruning by polygon clipping
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    SeedBox,
    Bisector(usize), // index into the candidate list
}

#[derive(Clone, Debug)]
struct PolyFace {
    points: Vec<Point3<f64>>,
    tag: Tag,
}

fn seed_cube(half: f64) -> Vec<PolyFace> {
    let h = half;
    let v = |x: f64, y: f64, z: f64| Point3::new(x, y, z);
    // each face counterclockwise from outside
    let quads = [
        [v(h, -h, -h), v(h, h, -h), v(h, h, h), v(h, -h, h)],    // +x
        [v(-h, -h, -h), v(-h, -h, h), v(-h, h, h), v(-h, h, -h)], // -x
        [v(-h, h, -h), v(-h, h, h), v(h, h, h), v(h, h, -h)],     // +y
        [v(-h, -h, -h), v(h, -h, -h), v(h, -h, h), v(-h, -h, h)], // -y
        [v(-h, -h, h), v(h, -h, h), v(h, h, h), v(-h, h, h)],     // +z
        [v(-h, -h, -h), v(-h, h, -h), v(h, h, -h), v(h, -h, -h)], // -z
    ];
    quads
        .iter()
        .map(|q| PolyFace {
            points: q.to_vec(),
            tag: Tag::SeedBox,
        })
        .collect()
}

/// Clip the face soup by `n·u <= d`. Returns false when the plane did not
/// remove anything (no face is added in that case).
fn clip_by(faces: &mut Vec<PolyFace>, plane: &Plane, tag: Tag, eps: f64) -> bool {
    let sd = |p: &Point3<f64>| plane.n.dot(&p.coords) - plane.d;
    let any_outside = faces
        .iter()
        .any(|f| f.points.iter().any(|p| sd(p) > eps));
    if !any_outside {
        return false;
    }
    let mut cut_points: Vec<Point3<f64>> = Vec::new();
    let mut kept: Vec<PolyFace> = Vec::new();
    for face in faces.drain(..) {
        let dists: Vec<f64> = face.points.iter().map(sd).collect();
        if dists.iter().all(|&v| v <= eps) {
            // untouched; remember points sitting on the plane for the new face
            for (p, &v) in face.points.iter().zip(&dists) {
                if v.abs() <= eps {
                    cut_points.push(*p);
                }
            }
            kept.push(face);
            continue;
        }
        if dists.iter().all(|&v| v > -eps) {
            continue; // fully clipped away
        }
        let mut clipped = Vec::with_capacity(face.points.len() + 2);
        let k = face.points.len();
        for i in 0..k {
            let (a, da) = (face.points[i], dists[i]);
            let (b, db) = (face.points[(i + 1) % k], dists[(i + 1) % k]);
            if da <= eps {
                clipped.push(a);
                if da.abs() <= eps {
                    cut_points.push(a);
                }
            }
            if (da < -eps && db > eps) || (da > eps && db < -eps) {
                let t = da / (da - db);
                let p = a + (b - a) * t;
                clipped.push(p);
                cut_points.push(p);
            }
        }
        if clipped.len() >= 3 {
            kept.push(PolyFace {
                points: clipped,
                tag: face.tag,
            });
        }
    }
    // assemble the polygon the cut left behind
    let mut uniq: Vec<Point3<f64>> = Vec::new();
    for p in cut_points {
        if !uniq.iter().any(|q| (q - p).norm() <= 2.0 * eps) {
            uniq.push(p);
        }
    }
    if uniq.len() >= 3 {
        let c = uniq.iter().map(|p| p.coords).sum::<Vector3<f64>>() / uniq.len() as f64;
        let (e1, e2) = plane_basis(&plane.n);
        uniq.sort_by(|a, b| {
            let pa = a.coords - c;
            let pb = b.coords - c;
            f64::atan2(pa.dot(&e2), pa.dot(&e1)).total_cmp(&f64::atan2(pb.dot(&e2), pb.dot(&e1)))
        });
        kept.push(PolyFace { points: uniq, tag });
    }
    *faces = kept;
    true
}

/// Orthonormal basis (e1, e2) with e1 × e2 = n.
fn plane_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = n.cross(&pick).normalize();
    let e2 = n.cross(&e1);
    // (e1, e2, n) right-handed: e1 × e2 should equal n
    if e1.cross(&e2).dot(n) > 0.0 {
        (e1, e2)
    } else {
        (e2, e1)
    }
}

/// Run the pruning pass; returns indices of candidates whose bisector still
/// carries a face, or the unbounded error.
fn prune(
    site_index: usize,
    cands: &[Candidate],
    period: f64,
    eps: f64,
) -> Result<Vec<usize>, VoronoiError> {
    let mut faces = seed_cube(period);
    for (idx, cand) in cands.iter().enumerate() {
        let r_max = faces
            .iter()
            .flat_map(|f| f.points.iter())
            .map(|p| p.coords.norm())
            .fold(0.0, f64::max);
        if cand.delta.norm() > 2.0 * r_max + eps {
            break; // sorted by distance: nothing farther can cut
        }
        clip_by(&mut faces, &cand.plane, Tag::Bisector(idx), eps);
    }
    if faces.iter().any(|f| f.tag == Tag::SeedBox) {
        return Err(VoronoiError::UnboundedCell { site_index });
    }
    let mut active: Vec<usize> = faces
        .iter()
        .map(|f| match f.tag {
            Tag::Bisector(i) => i,
            Tag::SeedBox => unreachable!(),
        })
        .collect();
    active.sort_unstable();
    active.dedup();
    Ok(active)
}

// ---------------------------------------------------------------------------
// Phase 2: exact rebuild from the active planes
// ---------------------------------------------------------------------------

struct Rebuilt {
    vertices: Vec<Point3<f64>>,      // site-local
    faces: Vec<(usize, Vec<usize>)>, // (active-plane index, ccw cycle)
}

fn rebuild(
    site_index: usize,
    planes: &[Plane],
    eps_plane: f64,
    eps_vertex: f64,
) -> Result<Rebuilt, VoronoiError> {
    let m = planes.len();
    let inside = |u: &Vector3<f64>| planes.iter().all(|p| p.n.dot(u) <= p.d + eps_plane);
    let mut raw: Vec<Vector3<f64>> = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            for k in (j + 1)..m {
                let det = planes[i].n.dot(&planes[j].n.cross(&planes[k].n));
                if det.abs() < 1e-12 {
                    continue;
                }
                let a = Matrix3::from_rows(&[
                    planes[i].n.transpose(),
                    planes[j].n.transpose(),
                    planes[k].n.transpose(),
                ]);
                let rhs = Vector3::new(planes[i].d, planes[j].d, planes[k].d);
                let Some(u) = a.lu().solve(&rhs) else {
                    continue;
                };
                if inside(&u) {
                    raw.push(u);
                }
            }
        }
    }
    // merge coincident intersections into single vertices
    raw.sort_by(|a, b| {
        a.x.total_cmp(&b.x)
            .then(a.y.total_cmp(&b.y))
            .then(a.z.total_cmp(&b.z))
    });
    let mut clusters: Vec<Vec<Vector3<f64>>> = Vec::new();
    for u in raw {
        if let Some(c) = clusters
            .iter_mut()
            .find(|c| c.iter().any(|v| (v - u).norm() <= eps_vertex))
        {
            c.push(u);
        } else {
            clusters.push(vec![u]);
        }
    }
    let vertices: Vec<Point3<f64>> = clusters
        .iter()
        .map(|c| {
            let sum = c.iter().sum::<Vector3<f64>>() / c.len() as f64;
            Point3::from(sum)
        })
        .collect();
    if vertices.len() < 4 {
        return Err(VoronoiError::ToleranceCollapse { site_index });
    }
    let incidence: Vec<Vec<usize>> = vertices
        .iter()
        .map(|v| {
            (0..m)
                .filter(|&i| (planes[i].n.dot(&v.coords) - planes[i].d).abs() <= eps_plane)
                .collect()
        })
        .collect();
    for (vi, inc) in incidence.iter().enumerate() {
        if inc.len() < 3 {
            return Err(VoronoiError::Validation {
                site_index,
                reason: format!("vertex {vi} lies on {} planes", inc.len()),
            });
        }
    }
    let mut faces = Vec::new();
    for (i, plane) in planes.iter().enumerate() {
        let members: Vec<usize> = (0..vertices.len())
            .filter(|&vi| incidence[vi].contains(&i))
            .collect();
        if members.len() < 3 {
            continue; // grazing plane, no face
        }
        let c = members
            .iter()
            .map(|&vi| vertices[vi].coords)
            .sum::<Vector3<f64>>()
            / members.len() as f64;
        let (e1, e2) = plane_basis(&plane.n);
        let mut cycle = members;
        cycle.sort_by(|&a, &b| {
            let pa = vertices[a].coords - c;
            let pb = vertices[b].coords - c;
            f64::atan2(pa.dot(&e2), pa.dot(&e1)).total_cmp(&f64::atan2(pb.dot(&e2), pb.dot(&e1)))
        });
        faces.push((i, cycle));
    }
    Ok(Rebuilt { vertices, faces })
}

pub(super) fn build_cell(
    site_index: usize,
    set: &PeriodicPointSet,
    cfg: &ClipConfig,
) -> Result<ConvexCell, VoronoiError> {
    assert!(!set.is_empty(), "point set must be nonempty");
    assert!(site_index < set.len(), "site index out of range");
    let period = set.period();
    let eps_plane = cfg.eps_rel * period;
    let site = set.points()[site_index];

    let near = candidates(site_index, set, cfg.shells);
    let active_idx = prune(site_index, &near, period, eps_plane)?;

    // wider shell for the validation sweep, keyed for dedup against actives
    let wide = candidates(site_index, set, cfg.validate_shells.max(cfg.shells));
    let key = |c: &Candidate| (c.source_index, c.translation);
    let mut active: Vec<Candidate> = active_idx.iter().map(|&i| near[i].clone()).collect();

    for _round in 0..3 {
        let rebuilt = rebuild(
            site_index,
            &active.iter().map(|c| c.plane).collect::<Vec<_>>(),
            eps_plane,
            eps_plane,
        )?;
        let mut violators: Vec<Candidate> = Vec::new();
        for cand in &wide {
            if active.iter().any(|a| key(a) == key(cand)) {
                continue;
            }
            let cuts = rebuilt
                .vertices
                .iter()
                .any(|v| cand.plane.n.dot(&v.coords) > cand.plane.d + eps_plane);
            if cuts {
                violators.push(cand.clone());
            }
        }
        if violators.is_empty() {
            return finish(site, rebuilt, &active, eps_plane, site_index);
        }
        active.extend(violators);
        active.sort_by(|a, b| {
            a.delta
                .norm()
                .total_cmp(&b.delta.norm())
                .then(key(a).cmp(&key(b)))
        });
    }
    Err(VoronoiError::Validation {
        site_index,
        reason: "bisectors from the validation shell kept cutting the cell".into(),
    })
}

fn finish(
    site: Point3<f64>,
    rebuilt: Rebuilt,
    active: &[Candidate],
    eps_plane: f64,
    site_index: usize,
) -> Result<ConvexCell, VoronoiError> {
    let vertices: Vec<Point3<f64>> = rebuilt.vertices.iter().map(|u| site + u.coords).collect();
    let faces: Vec<Face> = rebuilt
        .faces
        .iter()
        .map(|(pi, cycle)| {
            let cand = &active[*pi];
            Face {
                cycle: cycle.clone(),
                normal: cand.plane.n,
                offset: cand.plane.d + cand.plane.n.dot(&site.coords),
                neighbor: Some(FaceNeighbor {
                    position: site + cand.delta,
                    source_index: cand.source_index,
                    translation: cand.translation,
                }),
            }
        })
        .collect();
    let edges = derive_edges(&faces);
    let cell = ConvexCell {
        site,
        vertices,
        faces,
        edges,
    };

    if cell.euler_characteristic() != 2 {
        return Err(VoronoiError::Validation {
            site_index,
            reason: format!(
                "Euler characteristic {} (V={} E={} F={})",
                cell.euler_characteristic(),
                cell.vertex_count(),
                cell.edge_count(),
                cell.face_count()
            ),
        });
    }
    // every edge must be shared by exactly two faces
    let mut edge_use = std::collections::HashMap::new();
    for f in &cell.faces {
        for k in 0..f.cycle.len() {
            let a = f.cycle[k];
            let b = f.cycle[(k + 1) % f.cycle.len()];
            *edge_use.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
        }
    }
    if edge_use.values().any(|&c| c != 2) {
        return Err(VoronoiError::Validation {
            site_index,
            reason: "non-manifold edge in rebuilt cell".into(),
        });
    }
    // site strictly interior
    if !cell.contains_strictly(&cell.site, eps_plane) {
        return Err(VoronoiError::Validation {
            site_index,
            reason: "site not strictly interior".into(),
        });
    }
    Ok(cell)
}

/// Intersect a crafted list of half-spaces, exposed for tests that need
/// pathological inputs (e.g. an unbounded arrangement).
#[cfg(test)]
pub(super) fn intersect_halfspaces(
    site: Point3<f64>,
    neighbors: &[Point3<f64>],
    period: f64,
    eps_rel: f64,
) -> Result<ConvexCell, VoronoiError> {
    let cands: Vec<Candidate> = {
        let mut v: Vec<Candidate> = neighbors
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let delta = q - site;
                let dist = delta.norm();
                Candidate {
                    plane: Plane {
                        n: delta / dist,
                        d: dist / 2.0,
                    },
                    delta,
                    source_index: i,
                    translation: [0, 0, 0],
                }
            })
            .collect();
        v.sort_by(|a, b| a.delta.norm().total_cmp(&b.delta.norm()));
        v
    };
    let eps = eps_rel * period;
    let active_idx = prune(usize::MAX, &cands, period, eps)?;
    let active: Vec<Candidate> = active_idx.iter().map(|&i| cands[i].clone()).collect();
    let rebuilt = rebuild(
        usize::MAX,
        &active.iter().map(|c| c.plane).collect::<Vec<_>>(),
        eps,
        eps,
    )?;
    finish(site, rebuilt, &active, eps, usize::MAX)
}
