//! Acceptance suite: every quantitative claim the toolkit is expected to
//! reproduce, one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Criteria 7 and 10 assert the published chirality of the Josehedron and
//! of the combined min+max cell. The published vertex geometry contradicts
//! those claims (the shapes have improper self-symmetries), so the two
//! tests fail by design rather than encode a weakened check; the details
//! are printed by the suite and discussed in the README.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::OnceLock;

use nalgebra::Point3;
use plesio::anatomy::{fingerprint, parallel_regular_hexagon_pair, transform_cell};
use plesio::formula::catalog;
use plesio::pipeline::verify::{format_results, verify_josehedron, CheckResult};
use plesio::pipeline::{
    resolve_surface, run_surface, run_surface_with_cells, shape_name, PipelineConfig,
    SurfaceReport, Which,
};
use plesio::voronoi::validate_partition;

fn config() -> PipelineConfig {
    PipelineConfig::default()
}

/// Criteria 1-10 are computed once and shared by the per-criterion tests.
fn verify_results() -> &'static [CheckResult] {
    static RESULTS: OnceLock<Vec<CheckResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let results = verify_josehedron(&config());
        print!("{}", format_results(&results));
        results
    })
}

fn criterion(id: &str) -> &'static CheckResult {
    verify_results()
        .iter()
        .find(|r| r.id == id)
        .unwrap_or_else(|| panic!("criterion {id} missing"))
}

fn assert_criterion(id: &str) {
    let r = criterion(id);
    println!(
        "[{}] criterion {}: {} - {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.label,
        r.detail
    );
    assert!(r.passed, "criterion {}: {}", r.id, r.detail);
}

#[test]
fn criterion_01_fks_extrema() {
    assert_criterion("1");
}

#[test]
fn criterion_02_josehedron_combinatorics() {
    assert_criterion("2");
    assert_criterion("3v");
}

#[test]
fn criterion_03_integer_coordinates() {
    assert_criterion("3");
}

#[test]
fn criterion_04_metric_table() {
    assert_criterion("4");
}

#[test]
fn criterion_05_roundness() {
    assert_criterion("5");
}

#[test]
fn criterion_06_radii() {
    assert_criterion("6");
}

#[test]
fn criterion_07_chirality() {
    assert_criterion("7");
}

#[test]
fn criterion_08_unit_cell() {
    assert_criterion("8");
}

#[test]
fn criterion_09_cairo_projection() {
    assert_criterion("9");
}

#[test]
fn criterion_10_fks_both() {
    assert_criterion("10");
}

// ---------------------------------------------------------------------------
// criterion 11: catalog reproduction
// ---------------------------------------------------------------------------

fn report_for(name: &str) -> &'static SurfaceReport {
    static CACHE: OnceLock<std::sync::Mutex<BTreeMap<String, &'static SurfaceReport>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(BTreeMap::new()));
    let mut map = cache.lock().unwrap();
    if let Some(r) = map.get(name) {
        return r;
    }
    let surface = resolve_surface(name).expect("catalog surface");
    let report = Box::leak(Box::new(run_surface(&surface, &Which::ALL, &config())));
    map.insert(name.to_string(), report);
    report
}

fn run_of(report: &SurfaceReport, which: Which) -> &plesio::pipeline::RunReport {
    report.runs.get(which).expect("run present")
}

fn class_shapes(report: &SurfaceReport, which: Which) -> Vec<String> {
    run_of(report, which)
        .classes
        .iter()
        .map(|c| shape_name(&c.fingerprint))
        .collect()
}

fn face_counts(report: &SurfaceReport, which: Which) -> BTreeSet<usize> {
    run_of(report, which)
        .classes
        .iter()
        .map(|c| c.fingerprint.faces)
        .collect()
}

fn check_range(report: &SurfaceReport, lo: f64, hi: f64, tol: f64) {
    assert!(
        (report.range[0] - lo).abs() <= tol && (report.range[1] - hi).abs() <= tol,
        "{}: range [{}, {}] vs published [{lo}, {hi}] at {tol}",
        report.surface,
        report.range[0],
        report.range[1]
    );
}

#[test]
fn criterion_11a_overview_classifications() {
    let schwarz = report_for("Schwarz P");
    assert_eq!(class_shapes(schwarz, Which::Min), ["cube"]);
    assert_eq!(class_shapes(schwarz, Which::Max), ["cube"]);
    assert_eq!(class_shapes(schwarz, Which::Both), ["truncated octahedron"]);

    let neovius = report_for("Neovius");
    assert_eq!(class_shapes(neovius, Which::Min), ["cube"]);
    assert_eq!(class_shapes(neovius, Which::Max), ["cube"]);
    assert_eq!(class_shapes(neovius, Which::Both), ["truncated octahedron"]);

    let iwp = report_for("IWP");
    assert_eq!(class_shapes(iwp, Which::Both), ["cube"]);
    let iwp_min = &run_of(iwp, Which::Min).classes[0].fingerprint;
    assert_eq!(iwp_min.faces, 12, "IWP min is the 12-face cube-with-pyramids");
    assert_eq!(
        iwp_min.face_degree_histogram,
        BTreeMap::from([(3, 8), (4, 4)])
    );

    let diamond = report_for("Diamond");
    assert_eq!(class_shapes(diamond, Which::Both), ["truncated octahedron"]);
    assert_eq!(
        class_shapes(diamond, Which::Min),
        ["triakis truncated tetrahedron"]
    );

    let gyroid = report_for("Gyroid");
    assert_eq!(face_counts(gyroid, Which::Min), BTreeSet::from([17]));

    let frp = report_for("FRP");
    assert_eq!(class_shapes(frp, Which::Min), ["rhombic dodecahedron"]);

    let octo = report_for("Octo");
    assert_eq!(run_of(octo, Which::Both).classes.len(), 3, "Octo both: 3 types");
    let octo_shapes = class_shapes(octo, Which::Both);
    assert!(octo_shapes.contains(&"cube".to_string()));
    assert!(octo_shapes.contains(&"rhombic dodecahedron".to_string()));
    assert!(run_of(octo, Which::Both)
        .classes
        .iter()
        .any(|c| c.fingerprint.faces == 14));

    let dd = report_for("Double Diamond");
    assert!(run_of(dd, Which::Min)
        .errors
        .iter()
        .any(|e| e.contains("DegenerateLocus")));

    let kp = report_for("KP");
    assert_eq!(run_of(kp, Which::Both).classes.len(), 2, "KP both: 2 types");

    println!("[PASS] criterion 11a: overview-table classifications");
}

#[test]
fn criterion_11b_overview_ranges() {
    let s2 = 2f64.sqrt();
    check_range(report_for("Schwarz P"), -3.0, 3.0, 1e-6);
    check_range(report_for("Neovius"), -13.0, 13.0, 1e-6);
    check_range(report_for("IWP"), -5.0, 3.0, 1e-6);
    check_range(report_for("Diamond"), -s2, s2, 1e-6);
    check_range(report_for("Gyroid"), -1.5, 1.5, 1e-6);
    check_range(report_for("Octo"), -6.3, 13.7, 5e-3);
    check_range(report_for("Double Diamond"), -1.0, 3.0, 1e-6);
    check_range(report_for("KP"), -3.8, 6.6, 5e-3);
    // FRP prints two ranges; the optimizer must land on one of them
    let frp = report_for("FRP");
    let rc = frp.range_check.as_ref().unwrap();
    assert!(
        rc.matches || rc.matches_alt == Some(true),
        "FRP range {:?} matches neither published range",
        frp.range
    );
    println!("[PASS] criterion 11b: overview-table ranges");
}

#[test]
fn criterion_11c_cousin_face_counts() {
    // Gyroid both: 17F with two parallel regular hexagons
    let gyroid = report_for("Gyroid");
    assert_eq!(face_counts(gyroid, Which::Both), BTreeSet::from([17]));
    let surface = resolve_surface("Gyroid").unwrap();
    let (_, geometry) = run_surface_with_cells(&surface, &[Which::Both], &config());
    let (_, cells, _) = &geometry[0];
    assert!(
        cells.iter().all(parallel_regular_hexagon_pair),
        "Gyroid both cells carry two parallel regular hexagons"
    );

    // Double Gyroid both: the stated 20F new type is present (the full
    // tessellation also carries a companion 11F class around the minima,
    // which the reference table does not mention)
    let dgyroid = report_for("Double Gyroid");
    let dg_faces = face_counts(dgyroid, Which::Both);
    assert!(dg_faces.contains(&20), "Double Gyroid both lacks the 20F type: {dg_faces:?}");
    println!(
        "       criterion 11c: Double Gyroid both classes {dg_faces:?} (20F present; 11F companion unlisted in the reference)"
    );

    let lidinoid = report_for("Lidinoïd");
    assert_eq!(face_counts(lidinoid, Which::Max), BTreeSet::from([14]));

    let splitp = report_for("Split P");
    assert_eq!(face_counts(splitp, Which::Max), BTreeSet::from([17]));
    assert_eq!(face_counts(splitp, Which::Both), BTreeSet::from([17, 20]));

    println!("[PASS] criterion 11c: cousin face counts");
}

#[test]
fn criterion_11d_frp_both_published_face_count() {
    // The reference states the FRP both-cell has 20 faces. The printed FRP
    // formula provably yields 8 congruent 19-face cells (verified here and
    // by an independent convex-hull implementation; the 8 cells tile the
    // period exactly). This check asserts the published value and fails.
    let frp = report_for("FRP");
    let faces = face_counts(frp, Which::Both);
    println!(
        "[{}] criterion 11d: FRP both face counts {faces:?} vs published {{20}}",
        if faces == BTreeSet::from([20]) { "PASS" } else { "FAIL" }
    );
    assert_eq!(
        faces,
        BTreeSet::from([20]),
        "published FRP-both face count is not reproducible from the printed formula"
    );
}

// ---------------------------------------------------------------------------
// criterion 12: property suites
// ---------------------------------------------------------------------------

#[test]
fn criterion_12a_gradient_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let tau = std::f64::consts::TAU;
    let pts: Vec<Point3<f64>> = (0..100)
        .map(|_| {
            Point3::new(
                rng.random_range(0.0..tau),
                rng.random_range(0.0..tau),
                rng.random_range(0.0..tau),
            )
        })
        .collect();
    for entry in catalog() {
        let f = entry.field();
        for p in &pts {
            let exact = f.gradient(p).unwrap();
            let h = 1e-5;
            let mut fd = nalgebra::Vector3::zeros();
            for axis in 0..3 {
                let mut hi = *p;
                let mut lo = *p;
                hi[axis] += h;
                lo[axis] -= h;
                fd[axis] = (f.evaluate(&hi).unwrap() - f.evaluate(&lo).unwrap()) / (2.0 * h);
            }
            let scale = exact.norm().max(1.0);
            assert!(
                (exact - fd).norm() / scale < 1e-6,
                "{} at {p:?}",
                entry.name
            );
        }
    }
    println!("[PASS] criterion 12a: analytic gradients match central differences for all {} catalog entries", catalog().len());
}

#[test]
fn criterion_12b_partition_validation_on_table6_min_runs() {
    let cfg = config();
    for entry in catalog().iter().filter(|e| e.source_table == 6) {
        let surface = resolve_surface(&entry.name).unwrap();
        let (report, geometry) = run_surface_with_cells(&surface, &[Which::Min], &cfg);
        let min_run = report.runs.min.as_ref().unwrap();
        if !min_run.errors.is_empty() {
            println!(
                "       criterion 12b: {} min-run degenerate, partition check skipped",
                entry.name
            );
            continue;
        }
        let (_, cells, set) = &geometry[0];
        let eps = cfg.clip.eps_rel * set.period();
        let result = validate_partition(cells, set, 20_000, cfg.extrema.seed, eps);
        assert!(result.is_ok(), "{}: {:?}", entry.name, result.err());
    }
    println!("[PASS] criterion 12b: partition validation on every table-6 min-run");
}

#[test]
fn criterion_12c_fingerprint_invariance() {
    use rand::{Rng, SeedableRng};
    let set = plesio::lattice::fks_minima_set().rescaled(24.0);
    let cell = plesio::voronoi::voronoi_cell(2, &set, &config().clip).unwrap();
    let base = fingerprint(&cell);
    let elements = plesio::octahedral::elements();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let elem = &elements[rng.random_range(0..48)];
        let t = nalgebra::Vector3::new(
            rng.random_range(-3..4) as f64 * 24.0,
            rng.random_range(-3..4) as f64 * 24.0,
            rng.random_range(-3..4) as f64 * 24.0,
        );
        let moved = transform_cell(&cell, &elem.matrix, &t);
        assert!(fingerprint(&moved).matches(&base, 1e-9));
    }
    println!("[PASS] criterion 12c: fingerprint invariant under 20 random cube-group transforms");
}

#[test]
fn criterion_12d_determinism_across_thread_counts() {
    let surface = resolve_surface("Fischer-Koch, FKS").unwrap();
    let cfg = config();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_surface(&surface, &Which::ALL, &cfg).to_json());
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| run_surface(&surface, &Which::ALL, &cfg).to_json());
    assert_eq!(single, many, "reports must be byte-identical");
    println!("[PASS] criterion 12d: byte-identical JSON for 1 and 8 threads");
}

#[test]
fn scale_invariance_of_the_pipeline() {
    let surface = resolve_surface("FKS").unwrap();
    let cfg = config();
    let native = run_surface(&surface, &[Which::Min], &cfg);
    let unit = run_surface(
        &surface,
        &[Which::Min],
        &PipelineConfig {
            period: Some(1.0),
            ..cfg
        },
    );
    let a = &native.runs.min.as_ref().unwrap().classes[0].fingerprint;
    let b = &unit.runs.min.as_ref().unwrap().classes[0].fingerprint;
    assert!(a.matches(b, 1e-6));
}

#[test]
fn catalog_batch_yields_one_report_per_study_entry() {
    let reports = plesio::pipeline::run_catalog(&[], &config());
    assert_eq!(reports.len(), 15);
    let table = plesio::pipeline::summary_table(&reports);
    assert!(table.contains("Schwarz P"));
    assert!(table.contains("Josehedron"));
    assert!(table.contains("truncated octahedron"));
    // the Lidinoïd row flags its unreachable published range
    let lid_line = table.lines().find(|l| l.starts_with("Lidinoïd")).unwrap();
    assert!(lid_line.contains("published range differs"), "{lid_line}");
}
