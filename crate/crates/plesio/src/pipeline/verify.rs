//! The reference verification suite: quantitative checks of the Josehedron
//! and its tiling, run end to end from the FKS formula (criteria 1-10 of
//! the acceptance gate; the catalog batch and property suites live in the
//! integration tests).
//!
//! Two checks are expected to fail and are reported honestly: the published
//! chirality of the Josehedron and of the combined min+max cell does not
//! hold for the published vertex geometry (the shapes carry improper
//! self-symmetries, so mirror copies are also rotated copies). See the
//! repository notes for the analysis.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use nalgebra::{Matrix3, Vector3};

use super::PipelineConfig;
use crate::anatomy::{
    congruent, face_closest_points, fingerprint, point_in_face, quad_angles_at_longest_edge,
    quad_face_types, roundness, transform_cell, vertex_valences,
};
use crate::extrema::{find_extrema, ExtremalSet, ExtremumKind};
use crate::formula::catalog_lookup;
use crate::lattice::{delone_radii, PeriodicPointSet, FKS_MINIMA_NUM};
use crate::tiling::{build_tiling, cairo_projection, ProjAxis};
use crate::voronoi::{validate_partition, voronoi_cells, ConvexCell};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: &'static str,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(id: &'static str, label: &'static str, detail: impl Into<String>) -> Self {
        CheckResult {
            id,
            label,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(id: &'static str, label: &'static str, detail: impl Into<String>) -> Self {
        CheckResult {
            id,
            label,
            passed: false,
            detail: detail.into(),
        }
    }

    fn of(id: &'static str, label: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            id,
            label,
            passed,
            detail,
        }
    }
}

pub fn format_results(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "[{}] {:>2} {} - {}\n",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.label,
            r.detail
        ));
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    out.push_str(&format!(
        "{} checks, {} passed, {} failed\n",
        results.len(),
        results.len() - failed,
        failed
    ));
    out
}

struct Context {
    extrema: ExtremalSet,
    /// Minima in the numerator frame (period 8), canonical (= table) order.
    set_num: PeriodicPointSet,
    cells_num: Vec<ConvexCell>,
    /// Minima cells scaled so vertex coordinates are integers (period 24).
    cells_int: Vec<ConvexCell>,
    max_cells_int: Vec<ConvexCell>,
    both_cells: Vec<ConvexCell>,
    reference_int: usize,
}

fn context(cfg: &PipelineConfig) -> Result<Context, String> {
    let field = catalog_lookup("Fischer-Koch, FKS")
        .map_err(|e| e.to_string())?
        .field();
    let extrema = find_extrema(&field, &cfg.extrema).map_err(|e| e.to_string())?;
    let set_num = extrema
        .point_set(Some(ExtremumKind::Minimum))
        .rescaled(8.0);
    let set_int = set_num.rescaled(24.0);
    let max_int = extrema
        .point_set(Some(ExtremumKind::Maximum))
        .rescaled(24.0);
    let both = extrema.point_set(None).rescaled(8.0);
    let cells_num = voronoi_cells(&set_num, &cfg.clip).map_err(|e| e.to_string())?;
    let cells_int = voronoi_cells(&set_int, &cfg.clip).map_err(|e| e.to_string())?;
    let max_cells_int = voronoi_cells(&max_int, &cfg.clip).map_err(|e| e.to_string())?;
    let both_cells = voronoi_cells(&both, &cfg.clip).map_err(|e| e.to_string())?;
    // the reference (unmodified) cell sits at table row 3, i.e. (1,0,6)
    let reference_int = set_int
        .points()
        .iter()
        .position(|p| (p - nalgebra::Point3::new(3.0, 0.0, 18.0)).norm() < 1e-6)
        .ok_or("reference site (1,0,6) not found")?;
    Ok(Context {
        extrema,
        set_num,
        cells_num,
        cells_int,
        max_cells_int,
        both_cells,
        reference_int,
    })
}

/// Reference integer vertex coordinates of the 12-face cell, site-centered.
pub const JOSEHEDRON_VERTICES: [[i64; 3]; 12] = [
    [-7, -4, 2],
    [-7, 4, -2],
    [7, -2, -4],
    [7, 2, 4],
    [-1, -2, -8],
    [-1, 2, 8],
    [1, -8, 2],
    [1, 8, -2],
    [-3, -6, -3],
    [-3, 6, 3],
    [3, -3, 6],
    [3, 3, -6],
];

/// Reference orientation pairing of the twelve centers (1-based rows of
/// [`FKS_MINIMA_NUM`]).
pub const ORIENTATION_PAIRS: [[usize; 2]; 6] = [[3, 9], [6, 12], [4, 11], [5, 10], [2, 7], [1, 8]];

fn check1(ctx: &Context) -> CheckResult {
    let id = "1";
    let label = "FKS extrema: 12+12 at the reference eighths, values ±√2";
    let set = &ctx.extrema;
    if set.minima.len() != 12 || set.maxima.len() != 12 {
        return CheckResult::fail(
            id,
            label,
            format!("{} minima, {} maxima", set.minima.len(), set.maxima.len()),
        );
    }
    let s2 = 2f64.sqrt();
    for p in &set.minima {
        if (p.value + s2).abs() > 1e-9 {
            return CheckResult::fail(id, label, format!("minimum value {}", p.value));
        }
    }
    for p in &set.maxima {
        if (p.value - s2).abs() > 1e-9 {
            return CheckResult::fail(id, label, format!("maximum value {}", p.value));
        }
    }
    let snapped: Option<BTreeSet<[u32; 3]>> = set
        .minima
        .iter()
        .map(|p| {
            p.snapped.map(|f| {
                [
                    f[0].num * (8 / f[0].den),
                    f[1].num * (8 / f[1].den),
                    f[2].num * (8 / f[2].den),
                ]
            })
        })
        .collect();
    let Some(snapped) = snapped else {
        return CheckResult::fail(id, label, "some minimum failed to snap to eighths");
    };
    let reference: BTreeSet<[u32; 3]> = FKS_MINIMA_NUM
        .iter()
        .map(|c| [c[0] as u32, c[1] as u32, c[2] as u32])
        .collect();
    // accept any cyclic relabeling of the axes
    let rotations = [[0usize, 1, 2], [1, 2, 0], [2, 0, 1]];
    let matched = rotations.iter().position(|rot| {
        let rotated: BTreeSet<[u32; 3]> = snapped
            .iter()
            .map(|c| [c[rot[0]], c[rot[1]], c[rot[2]]])
            .collect();
        rotated == reference
    });
    match matched {
        Some(r) => CheckResult::pass(
            id,
            label,
            format!(
                "12 minima, 12 maxima at ±√2; numerators match the reference set (cyclic shift {r})"
            ),
        ),
        None => CheckResult::fail(id, label, format!("numerators {snapped:?} do not match")),
    }
}

fn check2(ctx: &Context) -> CheckResult {
    let id = "2";
    let label = "Josehedron combinatorics: F=12 (4+8), V=12, E=22, Euler 2";
    let cell = &ctx.cells_int[ctx.reference_int];
    let mut hist = BTreeMap::new();
    for f in &cell.faces {
        *hist.entry(f.degree()).or_insert(0usize) += 1;
    }
    let types = quad_face_types(cell);
    let left = types.iter().filter(|(_, t)| *t == 1).count();
    let right = types.iter().filter(|(_, t)| *t == -1).count();
    let ok = cell.face_count() == 12
        && cell.vertex_count() == 12
        && cell.edge_count() == 22
        && cell.euler_characteristic() == 2
        && hist == BTreeMap::from([(3usize, 4usize), (4, 8)])
        && left == 4
        && right == 4;
    CheckResult::of(
        id,
        label,
        ok,
        format!(
            "F={} V={} E={} hist={:?} quad handedness {left}/{right}",
            cell.face_count(),
            cell.vertex_count(),
            cell.edge_count(),
            hist
        ),
    )
}

fn check3(ctx: &Context) -> CheckResult {
    let id = "3";
    let label = "integer vertex coordinates and squared radii {54×4, 69×8}";
    let cell = &ctx.cells_int[ctx.reference_int];
    let mut got: BTreeSet<[i64; 3]> = BTreeSet::new();
    for v in &cell.vertices {
        let d = v - cell.site;
        let r = [d.x.round(), d.y.round(), d.z.round()];
        if (d.x - r[0]).abs() > 1e-6 || (d.y - r[1]).abs() > 1e-6 || (d.z - r[2]).abs() > 1e-6 {
            return CheckResult::fail(id, label, format!("vertex {d:?} not integer"));
        }
        got.insert([r[0] as i64, r[1] as i64, r[2] as i64]);
    }
    let expect: BTreeSet<[i64; 3]> = JOSEHEDRON_VERTICES.iter().copied().collect();
    if got != expect {
        return CheckResult::fail(id, label, format!("vertex set {got:?}"));
    }
    let mut radii = BTreeMap::new();
    for v in &got {
        *radii
            .entry(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            .or_insert(0usize) += 1;
    }
    let ok = radii == BTreeMap::from([(54i64, 4usize), (69, 8)]);
    CheckResult::of(id, label, ok, format!("vertex table matched; radii² {radii:?}"))
}

fn check4(ctx: &Context) -> CheckResult {
    let id = "4";
    let label = "edge classes, insphere distances, 75.037° quad angles";
    let cell = &ctx.cells_int[ctx.reference_int];
    let fp = fingerprint(cell);
    let expect_edges = [(45f64.sqrt(), 12usize), (80f64.sqrt(), 6), (108f64.sqrt(), 4)];
    if fp.edge_class_lengths.len() != 3 {
        return CheckResult::fail(id, label, format!("{} edge classes", fp.edge_class_lengths.len()));
    }
    for ((len, count), (elen, ecount)) in fp.edge_class_lengths.iter().zip(expect_edges) {
        if (len - elen).abs() > 1e-6 || *count != ecount {
            return CheckResult::fail(id, label, format!("edge class ({len}, {count})"));
        }
    }
    for (len, approx) in fp
        .edge_class_lengths
        .iter()
        .map(|(l, _)| *l)
        .zip([6.708, 8.944, 10.392])
    {
        if (len - approx).abs() > 1e-3 {
            return CheckResult::fail(id, label, format!("length {len} vs ~{approx}"));
        }
    }
    let expect_dists = [(31.5f64.sqrt(), 8usize), (45f64.sqrt(), 4)];
    if fp.face_plane_distances.len() != 2 {
        return CheckResult::fail(id, label, "face distance classes != 2");
    }
    for ((d, count), (ed, ecount)) in fp.face_plane_distances.iter().zip(expect_dists) {
        if (d - ed).abs() > 1e-6 || *count != ecount {
            return CheckResult::fail(id, label, format!("face distance ({d}, {count})"));
        }
    }
    // feet of the perpendiculars lie inside their faces
    for (i, (foot, _)) in face_closest_points(cell).iter().enumerate() {
        if !point_in_face(cell, i, foot, 1e-9) {
            return CheckResult::fail(id, label, format!("foot of face {i} outside polygon"));
        }
    }
    let pairs = quad_angles_at_longest_edge(cell);
    for [a, b] in &pairs {
        if (a - 75.037).abs() > 0.01 || (b - 75.037).abs() > 0.01 {
            return CheckResult::fail(id, label, format!("angles {a}, {b}"));
        }
    }
    CheckResult::pass(
        id,
        label,
        format!(
            "edges {{√45×12, √80×6, √108×4}}, distances {{√31.5×8, √45×4}}, {} quad angle pairs at 75.037°",
            pairs.len()
        ),
    )
}

fn check5(ctx: &Context, cfg: &PipelineConfig) -> CheckResult {
    let id = "5";
    let label = "roundness: Josehedron 0.4798 > rhombic dodecahedron 0.4775 > cube 0.3676";
    let jose = roundness(&ctx.cells_int[ctx.reference_int]);
    let cube_set = PeriodicPointSet::new(vec![nalgebra::Point3::origin()], 1.0).unwrap();
    let cube = roundness(&voronoi_cells(&cube_set, &cfg.clip).unwrap()[0]);
    // the rhombic dodecahedron comes from the FRP minima
    let frp = catalog_lookup("FRP").unwrap().field();
    let frp_extrema = match find_extrema(&frp, &cfg.extrema) {
        Ok(e) => e,
        Err(e) => return CheckResult::fail(id, label, format!("FRP extrema: {e}")),
    };
    let frp_set = frp_extrema.point_set(Some(ExtremumKind::Minimum));
    let rd_cells = match voronoi_cells(&frp_set, &cfg.clip) {
        Ok(c) => c,
        Err(e) => return CheckResult::fail(id, label, format!("FRP cells: {e}")),
    };
    let rd = roundness(&rd_cells[0]);
    let ok = (jose - 0.4798).abs() < 5e-4
        && (cube - 0.3676).abs() < 1e-4
        && (rd - 0.4775).abs() < 5e-4
        && jose > rd
        && rd > cube;
    CheckResult::of(
        id,
        label,
        ok,
        format!("josehedron {jose:.5}, rhombic dodecahedron {rd:.5} (from {} FRP minima), cube {cube:.5}", frp_set.len()),
    )
}

fn check6(ctx: &Context) -> CheckResult {
    let id = "6";
    let label = "packing radius √3.5 and covering radius √69/3 (F_num)";
    let radii = match delone_radii(&ctx.set_num, Some(&ctx.cells_num)) {
        Ok(r) => r,
        Err(e) => return CheckResult::fail(id, label, e.to_string()),
    };
    let packing_ok = (radii.packing_r - 3.5f64.sqrt()).abs() < 1e-9;
    let covering_expect = 69f64.sqrt() / 3.0;
    let covering_ok = (radii.covering_r - covering_expect).abs() < 1e-9;
    // cross-check: 3 × covering radius is the F_int circumradius √69
    let circum_int = ctx.cells_int[ctx.reference_int].circumradius();
    let cross_ok = (radii.covering_r * 3.0 - circum_int).abs() < 1e-9
        && (circum_int - 69f64.sqrt()).abs() < 1e-9;
    CheckResult::of(
        id,
        label,
        packing_ok && covering_ok && cross_ok,
        format!(
            "packing {:.9} (√3.5 = {:.9}), covering {:.9} (√69/3 = {:.9}), 3R = {:.9}",
            radii.packing_r,
            3.5f64.sqrt(),
            radii.covering_r,
            covering_expect,
            radii.covering_r * 3.0
        ),
    )
}

fn check7(ctx: &Context) -> CheckResult {
    let id = "7";
    let label = "chirality: min vs max cell proper fails / improper succeeds";
    let min_cell = &ctx.cells_int[ctx.reference_int];
    let max_cell = &ctx.max_cells_int[0];
    let proper = congruent(min_cell, max_cell, false);
    let improper = congruent(min_cell, max_cell, true);
    let mirror = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
    let reflected = transform_cell(min_cell, &mirror, &Vector3::zeros());
    let reflected_matches_max = congruent(&reflected, max_cell, true).congruent;
    let ok = !proper.congruent && improper.congruent && reflected_matches_max;
    let detail = if proper.congruent {
        "EXPECTED ERRATUM: proper congruence succeeds (the vertex table admits an S4 \
         rotoreflection about X, so the mirror copy is also a rotated copy); improper \
         and reflected-min checks pass"
            .to_string()
    } else {
        format!(
            "proper={} improper={} reflected-min-matches-max={}",
            proper.congruent, improper.congruent, reflected_matches_max
        )
    };
    CheckResult::of(id, label, ok, detail)
}

fn check8(ctx: &Context, cfg: &PipelineConfig) -> CheckResult {
    let id = "8";
    let label = "unit cell: 12 cells, 6 orientation pairs, exact partition";
    let tiling = match build_tiling(&ctx.set_num, &cfg.clip) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(id, label, e.to_string()),
    };
    if tiling.cells.len() != 12 {
        return CheckResult::fail(id, label, format!("{} cells", tiling.cells.len()));
    }
    let classes_ok = tiling.orientation_classes.len() == 6
        && tiling
            .orientation_classes
            .iter()
            .all(|c| c.members.len() == 2 && c.proper());
    let volume_ok = (tiling.volume_ratio - 1.0).abs() < 1e-9;
    let partition = validate_partition(
        &tiling.cells,
        &ctx.set_num,
        100_000,
        cfg.extrema.seed,
        cfg.clip.eps_rel * 8.0,
    );
    // class partition vs the reference color pairs (sites are in table order)
    let mut partition_pairs: Vec<Vec<usize>> = tiling
        .orientation_classes
        .iter()
        .map(|c| c.members.iter().map(|m| m + 1).collect())
        .collect();
    partition_pairs.iter_mut().for_each(|p| p.sort_unstable());
    let colors_ok = ORIENTATION_PAIRS
        .iter()
        .all(|pair| partition_pairs.iter().any(|p| p == &pair.to_vec()));
    let ok = classes_ok && volume_ok && partition.is_ok() && colors_ok;
    CheckResult::of(
        id,
        label,
        ok,
        format!(
            "classes {:?}, volume ratio {:.12}, partition {}, colors {}",
            partition_pairs,
            tiling.volume_ratio,
            match &partition {
                Ok(r) => format!("ok at {} samples", r.samples),
                Err(e) => e.to_string(),
            },
            colors_ok
        ),
    )
}

fn check9(ctx: &Context) -> CheckResult {
    let id = "9";
    let label = "Cairo projection on all three axes";
    for axis in ProjAxis::ALL {
        let c = cairo_projection(&ctx.set_num, axis);
        if c.projected.len() != 12 {
            return CheckResult::fail(id, label, format!("{:?}: {} nodes", axis, c.projected.len()));
        }
        if c.degree_histogram != BTreeMap::from([(3usize, 8usize), (4, 4)]) {
            return CheckResult::fail(id, label, format!("{:?}: degrees {:?}", axis, c.degree_histogram));
        }
        if c.edge_length_classes.len() != 2 {
            return CheckResult::fail(id, label, format!("{:?}: classes {:?}", axis, c.edge_length_classes));
        }
        let (short, n_short) = c.edge_length_classes[0];
        let (long, n_long) = c.edge_length_classes[1];
        if (short - 2.0).abs() > 1e-9 || n_short != 4 || (long - 5f64.sqrt()).abs() > 1e-9 || n_long != 16 {
            return CheckResult::fail(id, label, format!("{:?}: lengths {:?}", axis, c.edge_length_classes));
        }
        if c.torus_faces != 8 {
            return CheckResult::fail(id, label, format!("{:?}: {} faces", axis, c.torus_faces));
        }
        // side over half-base: a = √(1² + (1/2)²) ≈ 1.118
        if (long / short - (1.0f64 + 0.25).sqrt()).abs() > 1e-9 {
            return CheckResult::fail(id, label, format!("{:?}: ratio {}", axis, long / short));
        }
    }
    CheckResult::pass(
        id,
        label,
        "12 nodes, degrees {3:8, 4:4}, edges {2:4, √5:16}, 8 pentagons, ratio √5/2",
    )
}

fn check10(ctx: &Context) -> CheckResult {
    let id = "10";
    let label = "FKS both: F=14, V=16, two chiral families";
    for cell in &ctx.both_cells {
        if cell.face_count() != 14 || cell.vertex_count() != 16 {
            return CheckResult::fail(
                id,
                label,
                format!("cell F={} V={}", cell.face_count(), cell.vertex_count()),
            );
        }
    }
    // chiral families: classes under proper congruence only
    let mut families: Vec<usize> = Vec::new();
    for cell in &ctx.both_cells {
        if !families
            .iter()
            .any(|&rep| congruent(&ctx.both_cells[rep], cell, false).congruent)
        {
            families.push(
                ctx.both_cells
                    .iter()
                    .position(|c| std::ptr::eq(c, cell))
                    .unwrap(),
            );
        }
    }
    let ok = ctx.both_cells.len() == 24 && families.len() == 2;
    let detail = if families.len() == 1 {
        format!(
            "EXPECTED ERRATUM: all {} cells form ONE proper-congruence family (the 14F/16V \
             cell has improper self-symmetries, so mirror copies are rotated copies); \
             combinatorics F=14 V=16 verified",
            ctx.both_cells.len()
        )
    } else {
        format!("{} cells, {} proper families", ctx.both_cells.len(), families.len())
    };
    CheckResult::of(id, label, ok, detail)
}

/// Run the quantitative suite (criteria 1-10).
pub fn verify_josehedron(cfg: &PipelineConfig) -> Vec<CheckResult> {
    let ctx = match context(cfg) {
        Ok(c) => c,
        Err(e) => {
            return vec![CheckResult::fail(
                "0",
                "pipeline context (FKS extrema and cells)",
                e,
            )]
        }
    };
    let mut sanity = Vec::new();
    // vertex valences ride along with criterion 3's radii split
    let cell = &ctx.cells_int[ctx.reference_int];
    let valences = vertex_valences(cell);
    let radii_valence_ok = cell.vertices.iter().enumerate().all(|(i, v)| {
        let r2 = (v - cell.site).norm_squared().round() as i64;
        (r2 == 54 && valences[i] == 3) || (r2 == 69 && valences[i] == 4)
    });
    sanity.push(CheckResult::of(
        "3v",
        "vertex valences: 3 at √54, 4 at √69",
        radii_valence_ok,
        format!("valences {valences:?}"),
    ));

    let mut out = vec![
        check1(&ctx),
        check2(&ctx),
        check3(&ctx),
        check4(&ctx),
        check5(&ctx, cfg),
        check6(&ctx),
        check7(&ctx),
        check8(&ctx, cfg),
        check9(&ctx),
        check10(&ctx),
    ];
    out.extend(sanity);
    out
}
