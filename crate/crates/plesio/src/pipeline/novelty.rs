//! Screening fingerprints against the classical space-fillers.

use std::sync::OnceLock;

use nalgebra::Point3;
use serde::Serialize;

use super::report::SurfaceReport;
use crate::anatomy::{fingerprint, ShapeFingerprint};
use crate::lattice::{fks_minima_set, PeriodicPointSet};
use crate::voronoi::{voronoi_cell, ClipConfig, ConvexCell};

#[derive(Clone, Debug)]
pub struct KnownShape {
    pub name: &'static str,
    pub fingerprint: ShapeFingerprint,
}

fn cell_of(points: &[[f64; 3]], period: f64) -> ConvexCell {
    let set = PeriodicPointSet::new(
        points.iter().map(|c| Point3::new(c[0], c[1], c[2])).collect(),
        period,
    )
    .expect("reference set");
    voronoi_cell(0, &set, &ClipConfig::default()).expect("reference cell")
}

/// The hexagonal prism of maximal volume inscribed in the unit sphere
/// (r² = 2/3, h = 2/√3), built directly.
fn hexagonal_prism() -> ConvexCell {
    let r = (2f64 / 3.0).sqrt();
    let h = 2.0 / 3f64.sqrt();
    let mut vertices = Vec::with_capacity(12);
    for &z in &[h / 2.0, -h / 2.0] {
        for k in 0..6 {
            let a = std::f64::consts::FRAC_PI_3 * k as f64;
            vertices.push(Point3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    // top 0..6 (ccw from +z), bottom 6..12
    let mut cycles = vec![
        vec![0, 1, 2, 3, 4, 5],
        vec![11, 10, 9, 8, 7, 6],
    ];
    for k in 0..6 {
        let k2 = (k + 1) % 6;
        cycles.push(vec![k, 6 + k, 6 + k2, k2]);
    }
    ConvexCell::from_polygons(Point3::origin(), vertices, cycles)
}

/// Fingerprints of the classical space-fillers used as the novelty
/// baseline: cube, truncated octahedron, rhombic dodecahedron, flat
/// octahedron, hexagonal prism, triakis truncated tetrahedron, Josehedron.
pub fn known_catalog() -> &'static [KnownShape] {
    static KNOWN: OnceLock<Vec<KnownShape>> = OnceLock::new();
    KNOWN.get_or_init(|| {
        let h = 0.5;
        let q = 0.25;
        let mut out = vec![KnownShape {
            name: "cube",
            fingerprint: fingerprint(&cell_of(&[[0.0, 0.0, 0.0]], 1.0)),
        }];
        out.push(KnownShape {
            name: "truncated octahedron",
            fingerprint: fingerprint(&cell_of(&[[0.0, 0.0, 0.0], [h, h, h]], 1.0)),
        });
        out.push(KnownShape {
            name: "rhombic dodecahedron",
            fingerprint: fingerprint(&cell_of(
                &[[0.0, 0.0, 0.0], [h, h, 0.0], [h, 0.0, h], [0.0, h, h]],
                1.0,
            )),
        });
        // octahedral holes of the simple cubic lattice
        out.push(KnownShape {
            name: "flat octahedron",
            fingerprint: fingerprint(&cell_of(
                &[[h, 0.0, 0.0], [0.0, h, 0.0], [0.0, 0.0, h]],
                1.0,
            )),
        });
        out.push(KnownShape {
            name: "hexagonal prism",
            fingerprint: fingerprint(&hexagonal_prism()),
        });
        // diamond lattice: fcc plus its (¼,¼,¼) translate
        out.push(KnownShape {
            name: "triakis truncated tetrahedron",
            fingerprint: fingerprint(&cell_of(
                &[
                    [0.0, 0.0, 0.0],
                    [h, h, 0.0],
                    [h, 0.0, h],
                    [0.0, h, h],
                    [q, q, q],
                    [q + h, q + h, q],
                    [q + h, q, q + h],
                    [q, q + h, q + h],
                ],
                1.0,
            )),
        });
        out.push(KnownShape {
            name: "Josehedron",
            fingerprint: fingerprint(
                &voronoi_cell(2, &fks_minima_set(), &ClipConfig::default())
                    .expect("reference Josehedron"),
            ),
        });
        out
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Known,
    CandidateNovel,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoveltyVerdict {
    pub run: String,
    pub fingerprint: ShapeFingerprint,
    pub nearest_known: String,
    pub distance: f64,
    pub verdict: Verdict,
}

/// Two fingerprints describe the same known type when the combinatorics
/// agree exactly and the normalized volume (volume relative to the
/// circumsphere) differs by less than 1e-3.
pub fn is_known_match(a: &ShapeFingerprint, b: &ShapeFingerprint) -> bool {
    a.faces == b.faces
        && a.vertices == b.vertices
        && a.edges == b.edges
        && a.face_degree_histogram == b.face_degree_histogram
        && (a.roundness - b.roundness).abs() < 1e-3
}

/// Weighted L1 distance over (F, V, E, face-degree histogram, normalized
/// volume = roundness). Symmetric.
pub fn fingerprint_distance(a: &ShapeFingerprint, b: &ShapeFingerprint) -> f64 {
    let mut d = (a.faces as f64 - b.faces as f64).abs()
        + (a.vertices as f64 - b.vertices as f64).abs()
        + (a.edges as f64 - b.edges as f64).abs();
    let degrees: std::collections::BTreeSet<usize> = a
        .face_degree_histogram
        .keys()
        .chain(b.face_degree_histogram.keys())
        .copied()
        .collect();
    for deg in degrees {
        let ca = *a.face_degree_histogram.get(&deg).unwrap_or(&0) as f64;
        let cb = *b.face_degree_histogram.get(&deg).unwrap_or(&0) as f64;
        d += (ca - cb).abs();
    }
    d + 50.0 * (a.roundness - b.roundness).abs()
}

/// Name for a fingerprint: its known match if one exists, else a compact
/// combinatorial descriptor.
pub fn shape_name(fp: &ShapeFingerprint) -> String {
    for known in known_catalog() {
        if is_known_match(&known.fingerprint, fp) {
            return known.name.to_string();
        }
    }
    format!("{}-face polyhedron", fp.faces)
}

/// One verdict per shape class across the report's runs.
pub fn novelty_screen(report: &SurfaceReport, known: &[KnownShape]) -> Vec<NoveltyVerdict> {
    let mut out = Vec::new();
    for which in super::Which::ALL {
        let Some(run) = report.runs.get(which) else {
            continue;
        };
        for class in &run.classes {
            let fp = &class.fingerprint;
            let (nearest, distance) = known
                .iter()
                .map(|k| (k.name, fingerprint_distance(&k.fingerprint, fp)))
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(b.0)))
                .unwrap_or(("(empty catalog)", f64::INFINITY));
            let verdict = if known.iter().any(|k| is_known_match(&k.fingerprint, fp)) {
                Verdict::Known
            } else {
                Verdict::CandidateNovel
            };
            out.push(NoveltyVerdict {
                run: which.name().to_string(),
                fingerprint: fp.clone(),
                nearest_known: nearest.to_string(),
                distance,
                verdict,
            });
        }
    }
    out
}
