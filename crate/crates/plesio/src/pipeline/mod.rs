//! Orchestration: resolve a surface, find its extrema, build the cells,
//! class the shapes, and assemble reports; batch over the catalog; screen
//! fingerprints for novelty; search block combinations.

mod novelty;
mod report;
mod search;
pub mod verify;

use rayon::prelude::*;
use thiserror::Error;

pub use novelty::{known_catalog, novelty_screen, shape_name, KnownShape, NoveltyVerdict, Verdict};
pub use report::{ClassReport, ExtremaReport, RangeCheck, RunReport, RunsReport, SurfaceReport};
pub use search::{search_blocks, GridSpec, SearchConfig, SearchHit, SearchOutcome};

use crate::anatomy::{congruent, fingerprint, proper_transforms};
use crate::extrema::{analyze_extrema, ExtremaConfig, ExtremaOutcome, ExtremumKind};
use crate::formula::{catalog, catalog_lookup, parse, CatalogEntry, ParseError, PeriodicField};
use crate::lattice::PeriodicPointSet;
use crate::tiling;
use crate::voronoi::{voronoi_cells, ClipConfig, ConvexCell};

/// Which extremal point set generates the cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Min,
    Max,
    Both,
}

impl Which {
    pub const ALL: [Which; 3] = [Which::Min, Which::Max, Which::Both];

    pub fn name(self) -> &'static str {
        match self {
            Which::Min => "min",
            Which::Max => "max",
            Which::Both => "both",
        }
    }
}

impl std::str::FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "min" => Ok(Which::Min),
            "max" => Ok(Which::Max),
            "both" => Ok(Which::Both),
            other => Err(format!("expected min|max|both, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum PipelineError {
    #[error("`{query}` is not a catalog surface ({catalog}) and does not parse as a formula ({parse})")]
    UnknownSurface {
        query: String,
        catalog: String,
        parse: ParseError,
    },
}

/// A surface ready to run: either a catalog entry or an ad-hoc formula.
#[derive(Clone, Debug)]
pub struct ResolvedSurface {
    pub name: String,
    pub formula: String,
    pub field: PeriodicField,
    pub entry: Option<&'static CatalogEntry>,
}

/// Catalog lookup first; otherwise the query must parse as a formula.
pub fn resolve_surface(query: &str) -> Result<ResolvedSurface, PipelineError> {
    match catalog_lookup(query) {
        Ok(entry) => Ok(ResolvedSurface {
            name: entry.name.clone(),
            formula: entry.formula.clone(),
            field: entry.field(),
            entry: Some(entry),
        }),
        Err(cat_err) => match parse(query) {
            Ok(expr) => Ok(ResolvedSurface {
                name: query.to_string(),
                formula: query.to_string(),
                field: PeriodicField::new(expr),
                entry: None,
            }),
            Err(parse_err) => Err(PipelineError::UnknownSurface {
                query: query.to_string(),
                catalog: cat_err.to_string(),
                parse: parse_err,
            }),
        },
    }
}

/// A formula supplied explicitly (the CLI's `--formula`).
pub fn resolve_formula(text: &str) -> Result<ResolvedSurface, ParseError> {
    let expr = parse(text)?;
    Ok(ResolvedSurface {
        name: text.to_string(),
        formula: text.to_string(),
        field: PeriodicField::new(expr),
        entry: None,
    })
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub extrema: ExtremaConfig,
    pub clip: ClipConfig,
    /// Fingerprint-match tolerances (of cell scale) for the stability counts.
    pub class_tol_fine: f64,
    pub class_tol_coarse: f64,
    /// Period override for ad-hoc runs; catalog entries default to 2π.
    pub period: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            extrema: ExtremaConfig::default(),
            clip: ClipConfig::default(),
            class_tol_fine: 1e-4,
            class_tol_coarse: 1e-3,
            period: None,
        }
    }
}

/// The shape classes of a cell list under 48-group congruence with
/// reflections allowed: (representative index, members).
pub fn shape_classes(cells: &[ConvexCell]) -> Vec<(usize, Vec<usize>)> {
    let mut classes: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|(rep, _)| congruent(&cells[*rep], cell, true).congruent)
        {
            Some((_, members)) => members.push(i),
            None => classes.push((i, vec![i])),
        }
    }
    classes
}

fn class_count_by_fingerprint(cells: &[ConvexCell], tol: f64) -> usize {
    let fps: Vec<_> = cells.iter().map(fingerprint).collect();
    let mut reps: Vec<usize> = Vec::new();
    for (i, fp) in fps.iter().enumerate() {
        if !reps.iter().any(|&r| fps[r].matches(fp, tol)) {
            reps.push(i);
        }
    }
    reps.len()
}

fn build_run(
    outcome: &ExtremaOutcome,
    which: Which,
    cfg: &PipelineConfig,
) -> (RunReport, Option<Vec<ConvexCell>>, Option<PeriodicPointSet>) {
    let mut errors = Vec::new();
    let period = outcome.field.period();
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    let kinds: &[ExtremumKind] = match which {
        Which::Min => &[ExtremumKind::Minimum],
        Which::Max => &[ExtremumKind::Maximum],
        Which::Both => &[ExtremumKind::Minimum, ExtremumKind::Maximum],
    };
    for kind in kinds {
        match outcome.of_kind(*kind) {
            Ok(points) => {
                for (i, p) in points.iter().enumerate() {
                    pts.push(p.best_position(period));
                    labels.push(format!(
                        "{}#{i}",
                        if *kind == ExtremumKind::Minimum { "min" } else { "max" }
                    ));
                }
            }
            Err(e) => errors.push(format!("DegenerateLocus: {e}")),
        }
    }
    let empty = |errors: Vec<String>| RunReport {
        cells: 0,
        classes: Vec::new(),
        classes_tol_fine: 0,
        classes_tol_coarse: 0,
        orientation_classes: 0,
        chirality: false,
        roundness: f64::NAN,
        errors,
    };
    if !errors.is_empty() || pts.is_empty() {
        if pts.is_empty() && errors.is_empty() {
            errors.push("no extremal points found".to_string());
        }
        return (empty(errors), None, None);
    }
    let set = match PeriodicPointSet::with_labels(pts, period, Some(labels)) {
        Ok(s) => s,
        Err(e) => return (empty(vec![format!("point set: {e}")]), None, None),
    };
    let cells = match voronoi_cells(&set, &cfg.clip) {
        Ok(c) => c,
        Err(e) => return (empty(vec![format!("voronoi: {e}")]), None, Some(set)),
    };

    let classes = shape_classes(&cells);
    let mut class_reports: Vec<ClassReport> = classes
        .iter()
        .map(|(rep, members)| ClassReport {
            fingerprint: fingerprint(&cells[*rep]),
            members: members.clone(),
        })
        .collect();
    class_reports.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then(a.fingerprint.faces.cmp(&b.fingerprint.faces))
            .then(a.fingerprint.vertices.cmp(&b.fingerprint.vertices))
            .then(a.fingerprint.volume.total_cmp(&b.fingerprint.volume))
            .then(a.members.cmp(&b.members))
    });

    // orientation classes within each shape class; chirality when a member
    // is only improperly congruent to its representative
    let mut orientation_count = 0usize;
    let mut chirality = false;
    for (rep, members) in &classes {
        let subset: Vec<ConvexCell> = members.iter().map(|&m| cells[m].clone()).collect();
        match tiling::orientation_classes(&subset, 0) {
            Ok(ocs) => {
                orientation_count += ocs.len();
                if ocs.iter().any(|c| !c.proper()) {
                    chirality = true;
                }
            }
            Err(_) => errors.push(format!("orientation classing failed for class of cell {rep}")),
        }
        for &m in members {
            if proper_transforms(&cells[*rep], &cells[m]).is_empty() {
                chirality = true;
            }
        }
    }

    let report = RunReport {
        cells: cells.len(),
        classes_tol_fine: class_count_by_fingerprint(&cells, cfg.class_tol_fine),
        classes_tol_coarse: class_count_by_fingerprint(&cells, cfg.class_tol_coarse),
        orientation_classes: orientation_count,
        chirality,
        roundness: class_reports
            .first()
            .map_or(f64::NAN, |c| c.fingerprint.roundness),
        classes: class_reports,
        errors,
    };
    (report, Some(cells), Some(set))
}

/// Full analysis of one surface. Degenerate extremal loci are reported in
/// the run's `errors` list, never as a failure.
pub fn run_surface(surface: &ResolvedSurface, which: &[Which], cfg: &PipelineConfig) -> SurfaceReport {
    run_resolved(surface, which, cfg).0
}

/// Like [`run_surface`] but also hands back the cells and point set per
/// run, for callers that need the geometry (novelty features, OBJ export,
/// verification).
pub fn run_surface_with_cells(
    surface: &ResolvedSurface,
    which: &[Which],
    cfg: &PipelineConfig,
) -> (SurfaceReport, Vec<(Which, Vec<ConvexCell>, PeriodicPointSet)>) {
    run_resolved(surface, which, cfg)
}

fn run_resolved(
    surface: &ResolvedSurface,
    which: &[Which],
    cfg: &PipelineConfig,
) -> (SurfaceReport, Vec<(Which, Vec<ConvexCell>, PeriodicPointSet)>) {
    let field = match cfg.period {
        Some(p) => surface.field.rescaled(p),
        None => surface.field.clone(),
    };
    let outcome = analyze_extrema(&field, &cfg.extrema);
    let period = field.period();

    let rows = |res: &Result<Vec<crate::extrema::ExtremalPoint>, _>| -> Vec<[f64; 4]> {
        res.as_ref()
            .map(|pts| {
                pts.iter()
                    .map(|p| {
                        let q = p.best_position(period);
                        [q.x, q.y, q.z, p.value]
                    })
                    .collect()
            })
            .unwrap_or_default()
    };

    let mut runs = RunsReport::default();
    let mut geometry = Vec::new();
    for w in which {
        let (run, cells, set) = build_run(&outcome, *w, cfg);
        match w {
            Which::Min => runs.min = Some(run),
            Which::Max => runs.max = Some(run),
            Which::Both => runs.both = Some(run),
        }
        if let (Some(cells), Some(set)) = (cells, set) {
            geometry.push((*w, cells, set));
        }
    }

    let range_check = surface.entry.and_then(|e| {
        e.known_range.map(|(lo, hi)| {
            let tolerance = if e.range_rounded() { 5e-3 } else { 1e-6 };
            let ok = |pub_lo: f64, pub_hi: f64| {
                (outcome.range.0 - pub_lo).abs() <= tolerance
                    && (outcome.range.1 - pub_hi).abs() <= tolerance
            };
            RangeCheck {
                published: [lo, hi],
                matches: ok(lo, hi),
                published_alt: e.known_range_alt.map(|(a, b)| [a, b]),
                matches_alt: e.known_range_alt.map(|(a, b)| ok(a, b)),
                tolerance,
            }
        })
    });

    let report = SurfaceReport {
        surface: surface.name.clone(),
        formula: surface.formula.clone(),
        period,
        frame: "native".to_string(),
        range: [outcome.range.0, outcome.range.1],
        extrema: ExtremaReport {
            minima: rows(&outcome.minima),
            maxima: rows(&outcome.maxima),
        },
        runs,
        range_check,
    };
    (report, geometry)
}

/// Run min, max and both for a selection of catalog entries (all of table 6
/// when `names` is empty). Per-entry problems land in the reports; the
/// batch never aborts.
pub fn run_catalog(names: &[String], cfg: &PipelineConfig) -> Vec<SurfaceReport> {
    let selection: Vec<&'static CatalogEntry> = if names.is_empty() {
        catalog().iter().filter(|e| e.source_table == 6).collect()
    } else {
        names
            .iter()
            .filter_map(|n| catalog_lookup(n).ok())
            .collect()
    };
    selection
        .par_iter()
        .map(|entry| {
            let surface = ResolvedSurface {
                name: entry.name.clone(),
                formula: entry.formula.clone(),
                field: entry.field(),
                entry: Some(entry),
            };
            run_surface(&surface, &Which::ALL, cfg)
        })
        .collect()
}

/// One summary line per report in the style of the overview table: the
/// classified shape (or note) for each of min, max, both.
pub fn summary_table(reports: &[SurfaceReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<18} {:<28} {:<28} {:<28} {}\n",
        "surface", "min", "max", "both", "range"
    ));
    for r in reports {
        let describe = |run: Option<&RunReport>| -> String {
            let Some(run) = run else {
                return "-".to_string();
            };
            if !run.errors.is_empty() {
                return "does not apply (degenerate)".to_string();
            }
            let mut names: Vec<String> = Vec::new();
            for class in &run.classes {
                names.push(novelty::shape_name(&class.fingerprint));
            }
            names.dedup();
            let mut s = names.join(" + ");
            if run.classes.len() > 1 {
                s = format!("{} types: {s}", run.classes.len());
            }
            if run.chirality {
                s.push_str(" [chiral pair]");
            }
            s
        };
        out.push_str(&format!(
            "{:<18} {:<28} {:<28} {:<28} [{:.4}, {:.4}]{}\n",
            r.surface,
            describe(r.runs.min.as_ref()),
            describe(r.runs.max.as_ref()),
            describe(r.runs.both.as_ref()),
            r.range[0],
            r.range[1],
            match &r.range_check {
                Some(rc) if !rc.matches && rc.matches_alt != Some(true) =>
                    " (! published range differs)",
                _ => "",
            }
        ));
    }
    out
}

#[cfg(test)]
#[path = "pipeline_tests.rs"]
mod tests;
