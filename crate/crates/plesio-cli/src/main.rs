use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use plesio::extrema::ExtremaConfig;
use plesio::formula::{blocks, catalog};
use plesio::pipeline::{
    self, known_catalog, novelty_screen, resolve_formula, resolve_surface, run_catalog,
    run_surface_with_cells, search_blocks, summary_table, GridSpec, PipelineConfig,
    ResolvedSurface, SearchConfig, Verdict, Which,
};
use plesio::voronoi::{validate_partition, write_obj, ObjObject};

#[derive(Parser)]
#[command(
    name = "plesio",
    version,
    about = "Plesiohedra from triply periodic scalar fields: extrema, periodic Voronoi cells, shape analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one surface: extrema, cells, classification, novelty.
    Analyze(AnalyzeArgs),
    /// Classify catalog surfaces (all of table 6 unless filtered).
    Catalog(CatalogArgs),
    /// Export a unit-cell tessellation as an OBJ assembly.
    Tiling(TilingArgs),
    /// Brute-force search over block combinations for novel shapes.
    Search(SearchArgs),
    /// Run the quantitative verification suite for the Josehedron.
    VerifyJosehedron(VerifyArgs),
}

#[derive(Args, Clone)]
struct ExtremaArgs {
    /// Multistart grid resolution per axis (total starts = grid³).
    #[arg(long, default_value_t = 10)]
    starts_grid: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Gradient norm bound for accepted extrema.
    #[arg(long, default_value_t = 1e-8)]
    grad_tol: f64,
    /// Merge radius for same-kind extrema, as a fraction of the period.
    #[arg(long, default_value_t = 1.0 / 64.0)]
    dedup_radius: f64,
    /// Largest denominator tried when snapping coordinates to rationals.
    #[arg(long, default_value_t = 48)]
    snap_denominator_max: u32,
    /// More deduplicated extrema than this marks a degenerate locus.
    #[arg(long, default_value_t = 200)]
    max_points: usize,
}

impl ExtremaArgs {
    fn to_config(&self) -> ExtremaConfig {
        ExtremaConfig {
            starts_grid: self.starts_grid,
            seed: self.seed,
            grad_tol: self.grad_tol,
            dedup_radius_rel: self.dedup_radius,
            snap_denominator_max: self.snap_denominator_max,
            max_points: self.max_points,
            ..ExtremaConfig::default()
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Catalog surface name or alias (or pass --formula).
    surface: Option<String>,
    /// Explicit formula, e.g. "cos(x)+cos(y)+cos(z)".
    #[arg(long, conflicts_with = "surface")]
    formula: Option<String>,
    #[arg(long, default_value = "min")]
    which: Which,
    /// Cubic period for the run (default 2π).
    #[arg(long)]
    period: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the run's cells as an OBJ file here.
    #[arg(long)]
    obj: Option<PathBuf>,
    /// Also validate the tessellation with this many sample points.
    #[arg(long)]
    validate_samples: Option<usize>,
    #[command(flatten)]
    extrema: ExtremaArgs,
}

#[derive(Args)]
struct CatalogArgs {
    /// Restrict to these names/aliases.
    #[arg(long = "filter", num_args = 1..)]
    filter: Vec<String>,
    /// List the catalog entries instead of analyzing them.
    #[arg(long)]
    list: bool,
    /// Write all JSON reports (an array) here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    extrema: ExtremaArgs,
}

#[derive(Args)]
struct TilingArgs {
    /// Catalog surface name or alias.
    surface: String,
    #[arg(long, default_value = "min")]
    which: Which,
    #[arg(long, default_value_t = 1)]
    nx: usize,
    #[arg(long, default_value_t = 1)]
    ny: usize,
    #[arg(long, default_value_t = 1)]
    nz: usize,
    /// Output OBJ path.
    #[arg(long)]
    obj: PathBuf,
    #[command(flatten)]
    extrema: ExtremaArgs,
}

#[derive(Args)]
struct SearchArgs {
    /// Block labels, e.g. A,E,F,G (list them with `catalog --list`).
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<char>,
    /// Coefficient grid start:end:step.
    #[arg(long, default_value = "-1:1:0.5")]
    coeff_grid: GridSpec,
    /// Constant grid start:end:step.
    #[arg(long, default_value = "0:0:1")]
    const_grid: GridSpec,
    /// Maximum number of candidates analyzed.
    #[arg(long, default_value_t = 200)]
    budget: usize,
    /// Write the hit reports (a JSON array) here.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    extrema: ExtremaArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    extrema: ExtremaArgs,
}

fn pipeline_config(extrema: &ExtremaArgs, period: Option<f64>) -> PipelineConfig {
    PipelineConfig {
        extrema: extrema.to_config(),
        period,
        ..PipelineConfig::default()
    }
}

fn write_file(path: &PathBuf, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn print_report(report: &pipeline::SurfaceReport) {
    println!("surface : {}", report.surface);
    println!("formula : {}", report.formula);
    println!("period  : {:.6} ({})", report.period, report.frame);
    println!("range   : [{:.9}, {:.9}]", report.range[0], report.range[1]);
    if let Some(rc) = &report.range_check {
        let status = if rc.matches || rc.matches_alt == Some(true) {
            "matches"
        } else {
            "DIFFERS from"
        };
        println!(
            "          {status} published [{}, {}] at tolerance {}",
            rc.published[0], rc.published[1], rc.tolerance
        );
    }
    println!(
        "extrema : {} minima, {} maxima",
        report.extrema.minima.len(),
        report.extrema.maxima.len()
    );
    for which in Which::ALL {
        let Some(run) = report.runs.get(which) else {
            continue;
        };
        println!("run {}:", which.name());
        if !run.errors.is_empty() {
            for e in &run.errors {
                println!("  note: {e}");
            }
            continue;
        }
        println!(
            "  cells {} | classes {} (fingerprint counts at 1e-4/1e-3: {}/{}) | orientations {} | chirality {}",
            run.cells,
            run.classes.len(),
            run.classes_tol_fine,
            run.classes_tol_coarse,
            run.orientation_classes,
            run.chirality
        );
        for class in &run.classes {
            let fp = &class.fingerprint;
            println!(
                "  class x{}: {} (F={} V={} E={}, roundness {:.4}, volume {:.6})",
                class.members.len(),
                pipeline::shape_name(fp),
                fp.faces,
                fp.vertices,
                fp.edges,
                fp.roundness,
                fp.volume
            );
        }
    }
    let verdicts = novelty_screen(report, known_catalog());
    for v in &verdicts {
        match v.verdict {
            Verdict::Known => println!("novelty [{}]: known shape ({})", v.run, v.nearest_known),
            Verdict::CandidateNovel => println!(
                "novelty [{}]: CANDIDATE NOVEL (nearest known: {}, distance {:.3})",
                v.run, v.nearest_known, v.distance
            ),
        }
    }
}

fn resolve(surface: &Option<String>, formula: &Option<String>) -> Result<ResolvedSurface> {
    match (surface, formula) {
        (Some(name), None) => resolve_surface(name).map_err(|e| anyhow!("{e}")),
        (None, Some(f)) => resolve_formula(f).map_err(|e| anyhow!("{e}")),
        (None, None) => bail!("pass a surface name or --formula"),
        (Some(_), Some(_)) => unreachable!("clap forbids both"),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let surface = resolve(&args.surface, &args.formula)?;
    let cfg = pipeline_config(&args.extrema, args.period);
    let (report, geometry) = run_surface_with_cells(&surface, &[args.which], &cfg);
    print_report(&report);
    if let Some(samples) = args.validate_samples {
        for (which, cells, set) in &geometry {
            let eps = cfg.clip.eps_rel * set.period();
            match validate_partition(cells, set, samples, cfg.extrema.seed, eps) {
                Ok(r) => println!(
                    "partition [{}]: ok, volume ratio {:.12} over {} samples",
                    which.name(),
                    r.volume_ratio,
                    r.samples
                ),
                Err(e) => println!("partition [{}]: FAILED: {e}", which.name()),
            }
        }
    }
    if let Some(path) = &args.json {
        write_file(path, &report.to_json())?;
    }
    if let Some(path) = &args.obj {
        let Some((_, cells, _)) = geometry.first() else {
            bail!("no cells to export (degenerate run)");
        };
        let objects: Vec<ObjObject> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| ObjObject::new(format!("cell_{i}"), c))
            .collect();
        let mut w = BufWriter::new(File::create(path)?);
        write_obj(&mut w, &objects)?;
        w.flush()?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_catalog(args: CatalogArgs) -> Result<()> {
    if args.list {
        println!("{:<24} {:<6} aliases", "name", "table");
        for e in catalog() {
            println!("{:<24} {:<6} {}", e.name, e.source_table, e.aliases.join(", "));
        }
        println!("\nblocks:");
        for b in blocks() {
            println!("  {}: {:<20} {}", b.label, b.description, b.expr);
        }
        return Ok(());
    }
    let cfg = pipeline_config(&args.extrema, None);
    let reports = run_catalog(&args.filter, &cfg);
    print!("{}", summary_table(&reports));
    if let Some(path) = &args.json {
        let json = serde_json::to_string_pretty(&reports)?;
        write_file(path, &json)?;
    }
    Ok(())
}

fn cmd_tiling(args: TilingArgs) -> Result<()> {
    let surface = resolve(&Some(args.surface.clone()), &None)?;
    let cfg = pipeline_config(&args.extrema, None);
    let (report, geometry) = run_surface_with_cells(&surface, &[args.which], &cfg);
    let Some((_, cells, set)) = geometry.first() else {
        let notes = report
            .runs
            .get(args.which)
            .map(|r| r.errors.join("; "))
            .unwrap_or_default();
        bail!("no tessellation for this run: {notes}");
    };
    let period = set.period();
    let mut objects = Vec::new();
    for ix in 0..args.nx {
        for iy in 0..args.ny {
            for iz in 0..args.nz {
                let offset = nalgebra::Vector3::new(
                    ix as f64 * period,
                    iy as f64 * period,
                    iz as f64 * period,
                );
                for (i, cell) in cells.iter().enumerate() {
                    objects.push(ObjObject::translated(
                        format!("cell_{i}_{ix}_{iy}_{iz}"),
                        cell,
                        offset,
                    ));
                }
            }
        }
    }
    let mut w = BufWriter::new(File::create(&args.obj)?);
    write_obj(&mut w, &objects)?;
    w.flush()?;
    println!(
        "wrote {} ({} cells per period, {}x{}x{} periods)",
        args.obj.display(),
        cells.len(),
        args.nx,
        args.ny,
        args.nz
    );
    Ok(())
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    if args.blocks.is_empty() {
        bail!("pass --blocks, e.g. --blocks A,E,F,G");
    }
    let cfg = SearchConfig {
        blocks: args.blocks.clone(),
        coeff_grid: args.coeff_grid,
        const_grid: args.const_grid,
        budget: args.budget,
        pipeline: pipeline_config(&args.extrema, None),
    };
    let outcome = search_blocks(&cfg);
    println!(
        "evaluated {} candidates ({} degenerate), {} with candidate-novel shapes",
        outcome.evaluated,
        outcome.skipped_degenerate,
        outcome.hits.len()
    );
    for hit in &outcome.hits {
        let novel: Vec<String> = hit
            .verdicts
            .iter()
            .filter(|v| v.verdict == Verdict::CandidateNovel)
            .map(|v| {
                format!(
                    "{}: F={} (nearest {})",
                    v.run, v.fingerprint.faces, v.nearest_known
                )
            })
            .collect();
        println!("  {} -> {}", hit.formula, novel.join("; "));
    }
    if let Some(path) = &args.json {
        let reports: Vec<_> = outcome.hits.iter().map(|h| &h.report).collect();
        write_file(path, &serde_json::to_string_pretty(&reports)?)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let cfg = pipeline_config(&args.extrema, None);
    let results = pipeline::verify::verify_josehedron(&cfg);
    print!("{}", pipeline::verify::format_results(&results));
    if results.iter().any(|r| !r.passed) {
        std::process::exit(1);
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Catalog(args) => cmd_catalog(args),
        Command::Tiling(args) => cmd_tiling(args),
        Command::Search(args) => cmd_search(args),
        Command::VerifyJosehedron(args) => cmd_verify(args),
    }
}
