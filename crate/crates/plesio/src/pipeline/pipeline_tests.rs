use super::*;
use crate::pipeline::novelty::{fingerprint_distance, is_known_match, shape_name};

fn cfg() -> PipelineConfig {
    PipelineConfig::default()
}

fn run(name: &str, which: Which) -> SurfaceReport {
    let surface = resolve_surface(name).unwrap();
    run_surface(&surface, &[which], &cfg())
}

#[test]
fn schwarz_p_both_is_the_truncated_octahedron() {
    let report = run("Schwarz P", Which::Both);
    let both = report.runs.both.as_ref().unwrap();
    assert_eq!(both.cells, 2);
    assert_eq!(both.classes.len(), 1);
    assert!(both.errors.is_empty());
    let fp = &both.classes[0].fingerprint;
    assert_eq!(shape_name(fp), "truncated octahedron");
    assert!(!both.chirality);
}

#[test]
fn fks_min_reproduces_the_josehedron_report() {
    let report = run("Fischer-Koch, FKS", Which::Min);
    let min = report.runs.min.as_ref().unwrap();
    assert_eq!(min.cells, 12);
    assert_eq!(min.classes.len(), 1);
    let fp = &min.classes[0].fingerprint;
    assert_eq!((fp.faces, fp.vertices, fp.edges), (12, 12, 22));
    assert_eq!(min.orientation_classes, 6);
    assert!((min.roundness - 0.4798).abs() < 5e-4);
    assert_eq!(shape_name(fp), "Josehedron");
    assert!((report.range[0] + 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn gyroid_min_is_the_17_face_plesiohedron() {
    let report = run("Gyroid", Which::Min);
    let min = report.runs.min.as_ref().unwrap();
    assert_eq!(min.cells, 8);
    assert_eq!(min.classes.len(), 1);
    assert_eq!(min.classes[0].fingerprint.faces, 17);
}

#[test]
fn degenerate_run_is_reported_not_failed() {
    let report = run("Double Diamond", Which::Min);
    let min = report.runs.min.as_ref().unwrap();
    assert_eq!(min.cells, 0);
    assert!(min.errors.iter().any(|e| e.contains("DegenerateLocus")));
    // the max run of the same surface works
    let report = run("Double Diamond", Which::Max);
    let max = report.runs.max.as_ref().unwrap();
    assert!(max.errors.is_empty());
    assert_eq!(shape_name(&max.classes[0].fingerprint), "truncated octahedron");
}

#[test]
fn ad_hoc_formula_and_unknown_name() {
    let surface = resolve_surface("cos(x)+cos(y)+cos(z)").unwrap();
    assert!(surface.entry.is_none());
    let report = run_surface(&surface, &[Which::Min], &cfg());
    assert_eq!(report.runs.min.as_ref().unwrap().cells, 1);

    let err = resolve_surface("Josehedron").unwrap_err();
    assert!(matches!(err, PipelineError::UnknownSurface { .. }));
}

#[test]
fn novelty_screen_examples() {
    let known = known_catalog();
    assert_eq!(known.len(), 7);

    // the cube from a Schwarz P min run is known
    let report = run("Schwarz P", Which::Min);
    let verdicts = novelty_screen(&report, known);
    assert_eq!(verdicts.len(), 1);
    assert_eq!(verdicts[0].verdict, Verdict::Known);
    assert_eq!(verdicts[0].nearest_known, "cube");
    assert!(verdicts[0].distance < 1e-9);

    // the Josehedron against a catalog without the Josehedron: novel
    let fks = run("FKS", Which::Min);
    let without: Vec<KnownShape> = known
        .iter()
        .filter(|k| k.name != "Josehedron")
        .cloned()
        .collect();
    let verdicts = novelty_screen(&fks, &without);
    assert_eq!(verdicts[0].verdict, Verdict::CandidateNovel);
    // distance is symmetric
    let a = &verdicts[0].fingerprint;
    let b = &known[0].fingerprint;
    assert_eq!(fingerprint_distance(a, b), fingerprint_distance(b, a));
}

#[test]
fn gyroid_both_has_two_parallel_regular_hexagons() {
    let surface = resolve_surface("Gyroid").unwrap();
    let (report, runs) = run_surface_with_cells(&surface, &[Which::Both], &cfg());
    let both = report.runs.both.as_ref().unwrap();
    assert_eq!(both.classes[0].fingerprint.faces, 17);
    let (_, cells, _) = &runs[0];
    assert!(cells
        .iter()
        .all(crate::anatomy::parallel_regular_hexagon_pair));
    // and it is not any of the known shapes
    let verdicts = novelty_screen(&report, known_catalog());
    assert!(verdicts.iter().all(|v| v.verdict == Verdict::CandidateNovel));
}

#[test]
fn search_rediscovers_the_k_surface() {
    // coarse starts keep the 3-block sweep quick; the K combination's
    // extrema are well separated
    let mut pipeline = cfg();
    pipeline.extrema.starts_grid = 5;
    let search = SearchConfig {
        blocks: vec!['E', 'F', 'G'],
        coeff_grid: "-0.4:0.3:0.1".parse().unwrap(),
        const_grid: "0.2:0.2:0.1".parse().unwrap(),
        budget: 1000,
        pipeline: pipeline.clone(),
    };
    let outcome = search_blocks(&search);
    assert!(outcome.evaluated > 0);
    let k = resolve_surface("K Surface").unwrap();
    let hit = outcome
        .hits
        .iter()
        .find(|h| h.report.formula == k.formula)
        .expect("the K Surface combination is enumerated and novel-screened");
    let reference = run_surface(&k, &Which::ALL, &pipeline);
    let fp_of = |r: &SurfaceReport, w: Which| {
        r.runs.get(w).unwrap().classes[0].fingerprint.clone()
    };
    for w in Which::ALL {
        if reference.runs.get(w).unwrap().errors.is_empty() {
            assert!(fp_of(&hit.report, w).matches(&fp_of(&reference, w), 1e-6));
        }
    }
}

#[test]
fn search_block_a_alone_matches_the_gyroid() {
    let search = SearchConfig {
        blocks: vec!['A'],
        coeff_grid: "1:1:1".parse().unwrap(),
        const_grid: "0:0:1".parse().unwrap(),
        budget: 10,
        pipeline: cfg(),
    };
    let outcome = search_blocks(&search);
    assert_eq!(outcome.evaluated, 1);
    let hit = &outcome.hits[0];
    let gyroid = run_surface(&resolve_surface("Gyroid").unwrap(), &Which::ALL, &cfg());
    for w in Which::ALL {
        let a = &hit.report.runs.get(w).unwrap().classes[0].fingerprint;
        let b = &gyroid.runs.get(w).unwrap().classes[0].fingerprint;
        assert!(a.matches(b, 1e-6));
    }
}

#[test]
fn empty_block_selection_is_empty() {
    let search = SearchConfig {
        blocks: vec![],
        coeff_grid: "0:1:1".parse().unwrap(),
        const_grid: "0:0:1".parse().unwrap(),
        budget: 10,
        pipeline: cfg(),
    };
    let outcome = search_blocks(&search);
    assert_eq!(outcome.evaluated, 0);
    assert!(outcome.hits.is_empty());
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let surface = resolve_surface("FKS").unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_surface(&surface, &Which::ALL, &cfg()).to_json());
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| run_surface(&surface, &Which::ALL, &cfg()).to_json());
    assert_eq!(single, many);
}

#[test]
fn fingerprints_are_scale_invariant_across_periods() {
    let surface = resolve_surface("FKS").unwrap();
    let native = run_surface(&surface, &[Which::Min], &cfg());
    let unit = run_surface(
        &surface,
        &[Which::Min],
        &PipelineConfig {
            period: Some(1.0),
            ..cfg()
        },
    );
    let a = &native.runs.min.as_ref().unwrap().classes[0].fingerprint;
    let b = &unit.runs.min.as_ref().unwrap().classes[0].fingerprint;
    assert!(a.matches(b, 1e-6));
}

#[test]
fn min_max_duality_for_odd_fields() {
    // FKS is odd: f(-p) = -f(p), so min and max fingerprints agree
    let report = run_surface(&resolve_surface("FKS").unwrap(), &Which::ALL, &cfg());
    let a = &report.runs.min.as_ref().unwrap().classes[0].fingerprint;
    let b = &report.runs.max.as_ref().unwrap().classes[0].fingerprint;
    assert!(a.matches(b, 1e-9));
}

#[test]
fn grid_spec_parsing() {
    let g: GridSpec = "-1:1:0.5".parse().unwrap();
    assert_eq!(g.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert!("1:0:0.5".parse::<GridSpec>().is_err());
    assert!("1:2".parse::<GridSpec>().is_err());
    let fine: GridSpec = "-0.4:0.4:0.1".parse().unwrap();
    assert!(fine.values().iter().any(|v| (*v - 0.3).abs() < 1e-12));
    assert_eq!(fine.values().len(), 9);
}

#[test]
fn range_check_flags_unreachable_published_values() {
    let report = run("Lidinoïd", Which::Min);
    let rc = report.range_check.unwrap();
    assert!(!rc.matches, "published upper bound 1.244 is unreachable");
    // while an exact row like Schwarz P matches
    let report = run("Schwarz P", Which::Min);
    assert!(report.range_check.unwrap().matches);
}

#[test]
fn both_run_site_count_is_the_sum_of_kinds() {
    let report = run_surface(&resolve_surface("FKS").unwrap(), &Which::ALL, &cfg());
    let both = report.runs.both.as_ref().unwrap();
    assert_eq!(
        both.cells,
        report.extrema.minima.len() + report.extrema.maxima.len()
    );
}

#[test]
fn is_known_match_requires_combinatorics_and_roundness() {
    let known = known_catalog();
    let cube = &known[0].fingerprint;
    let toct = &known[1].fingerprint;
    assert!(is_known_match(cube, cube));
    assert!(!is_known_match(cube, toct));
}
