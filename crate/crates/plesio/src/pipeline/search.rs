//! Brute-force search over linear combinations of the building blocks.

use rayon::prelude::*;

use super::novelty::{known_catalog, novelty_screen, NoveltyVerdict, Verdict};
use super::{PipelineConfig, ResolvedSurface, SurfaceReport, Which};
use crate::formula::{block, compose_blocks, Block, PeriodicField};

/// An inclusive arithmetic progression, written `start:end:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        assert!(self.step > 0.0, "grid step must be positive");
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                // snap to 9 decimals so 0.1 grids yield 0.3, not 0.30000000000000004
                let v = self.start + k as f64 * self.step;
                let snapped = (v * 1e9).round() / 1e9;
                if snapped == 0.0 {
                    0.0
                } else {
                    snapped
                }
            })
            .collect()
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid `{s}` must be start:end:step"));
        }
        let num = |p: &str| -> Result<f64, String> {
            p.trim().parse().map_err(|e| format!("grid `{s}`: {e}"))
        };
        let g = GridSpec {
            start: num(parts[0])?,
            end: num(parts[1])?,
            step: num(parts[2])?,
        };
        if g.step <= 0.0 || g.end < g.start {
            return Err(format!("grid `{s}` is empty or has non-positive step"));
        }
        Ok(g)
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Block labels to combine (see [`crate::formula::blocks`]).
    pub blocks: Vec<char>,
    pub coeff_grid: GridSpec,
    pub const_grid: GridSpec,
    /// Upper bound on analyzed candidates.
    pub budget: usize,
    pub pipeline: PipelineConfig,
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    pub formula: String,
    pub report: SurfaceReport,
    pub verdicts: Vec<NoveltyVerdict>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Candidates actually analyzed (bounded by the budget).
    pub evaluated: usize,
    /// Candidates whose every run had a degenerate extremal locus.
    pub skipped_degenerate: usize,
    /// Candidates with at least one candidate-novel shape class.
    pub hits: Vec<SearchHit>,
}

fn candidate_field(blocks: &[&'static Block], coeffs: &[f64], constant: f64) -> Option<(String, PeriodicField)> {
    let terms: Vec<(f64, &Block)> = coeffs
        .iter()
        .zip(blocks)
        .filter(|(c, _)| **c != 0.0)
        .map(|(c, b)| (*c, *b))
        .collect();
    if terms.is_empty() {
        return None;
    }
    let field = compose_blocks(&terms, constant);
    let mut name = String::new();
    for (i, (c, b)) in terms.iter().enumerate() {
        if i == 0 {
            name.push_str(&format!("{c}*{}", b.label));
        } else if *c < 0.0 {
            name.push_str(&format!(" - {}*{}", -c, b.label));
        } else {
            name.push_str(&format!(" + {c}*{}", b.label));
        }
    }
    if constant != 0.0 {
        if constant < 0.0 {
            name.push_str(&format!(" - {}", -constant));
        } else {
            name.push_str(&format!(" + {constant}"));
        }
    }
    Some((name, field))
}

/// Enumerate coefficient and constant grids over the chosen blocks in a
/// fixed order, analyze each candidate (min, max, both), and return those
/// with candidate-novel shapes.
pub fn search_blocks(cfg: &SearchConfig) -> SearchOutcome {
    let blocks: Vec<&'static Block> = cfg
        .blocks
        .iter()
        .filter_map(|&label| block(label))
        .collect();
    if blocks.is_empty() {
        return SearchOutcome {
            evaluated: 0,
            skipped_degenerate: 0,
            hits: Vec::new(),
        };
    }
    let coeffs = cfg.coeff_grid.values();
    let constants = cfg.const_grid.values();

    // deterministic enumeration: odometer over coefficient indices, then constants
    let mut candidates: Vec<(String, PeriodicField)> = Vec::new();
    let mut idx = vec![0usize; blocks.len()];
    'enumerate: loop {
        let cs: Vec<f64> = idx.iter().map(|&i| coeffs[i]).collect();
        for &constant in &constants {
            if candidates.len() >= cfg.budget {
                break 'enumerate;
            }
            if let Some(cand) = candidate_field(&blocks, &cs, constant) {
                candidates.push(cand);
            }
        }
        let mut k = blocks.len();
        loop {
            if k == 0 {
                break 'enumerate;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < coeffs.len() {
                break;
            }
            idx[k] = 0;
        }
    }

    let known = known_catalog();
    let analyzed: Vec<(String, SurfaceReport)> = candidates
        .into_par_iter()
        .map(|(name, field)| {
            let surface = ResolvedSurface {
                name: name.clone(),
                formula: field.expr().to_string(),
                field,
                entry: None,
            };
            let report = super::run_surface(&surface, &Which::ALL, &cfg.pipeline);
            (name, report)
        })
        .collect();

    let mut hits = Vec::new();
    let mut skipped = 0usize;
    let evaluated = analyzed.len();
    for (_, report) in &analyzed {
        let degenerate = Which::ALL
            .iter()
            .all(|w| report.runs.get(*w).is_none_or(|r| !r.errors.is_empty()));
        if degenerate {
            skipped += 1;
            continue;
        }
        let verdicts = novelty_screen(report, known);
        if verdicts.iter().any(|v| v.verdict == Verdict::CandidateNovel) {
            hits.push(SearchHit {
                formula: report.formula.clone(),
                report: report.clone(),
                verdicts,
            });
        }
    }
    SearchOutcome {
        evaluated,
        skipped_degenerate: skipped,
        hits,
    }
}
