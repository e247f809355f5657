//! The built-in surface catalog.
//!
//! Entries are loaded from `catalog.txt`, which is embedded in the binary.
//! The file carries both the Axolotl set (table 6) and the larger corax
//! collection (table 7), plus two conjectural variants for rows whose
//! published form is suspect (`KP-deduplicated`, `S9 Surface-corrected`).

use std::sync::OnceLock;

use thiserror::Error;

use super::ast::Expr;
use super::field::PeriodicField;
use super::parse::parse;

const CATALOG_DATA: &str = include_str!("catalog.txt");

/// One catalog record.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub aliases: Vec<String>,
    /// The formula exactly as shipped, in grammar syntax.
    pub formula: String,
    pub expr: Expr,
    /// Published range, when one exists.
    pub known_range: Option<(f64, f64)>,
    /// Second published range (the FRP row prints two).
    pub known_range_alt: Option<(f64, f64)>,
    pub source_table: u8,
    pub flags: Vec<String>,
}

impl CatalogEntry {
    pub fn field(&self) -> PeriodicField {
        PeriodicField::new(self.expr.clone())
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }

    /// Whether the published range is marked as rounded.
    pub fn range_rounded(&self) -> bool {
        self.has_flag("rounded-range")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("no catalog entry named `{query}`; closest matches: {}", suggestions.join(", "))]
    NotFound {
        query: String,
        suggestions: Vec<String>,
    },
}

fn parse_range(s: &str) -> Option<(f64, f64)> {
    if s.is_empty() {
        return None;
    }
    let (lo, hi) = s.split_once(',')?;
    Some((lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

fn load() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for (lineno, line) in CATALOG_DATA.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        assert!(
            fields.len() == 7,
            "catalog.txt line {}: expected 7 fields, got {}",
            lineno + 1,
            fields.len()
        );
        let formula = fields[3].to_string();
        let expr = parse(&formula).unwrap_or_else(|e| {
            panic!("catalog.txt line {}: bad formula: {e}", lineno + 1)
        });
        out.push(CatalogEntry {
            source_table: fields[0].parse().expect("catalog table id"),
            name: fields[1].to_string(),
            aliases: fields[2]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
            formula,
            expr,
            known_range: parse_range(fields[4]),
            known_range_alt: parse_range(fields[5]),
            flags: fields[6]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    let mut names: Vec<String> = out.iter().map(|e| e.name.to_lowercase()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), out.len(), "catalog names must be unique");
    out
}

/// All catalog entries, in file order (table 6 first).
pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(load)
}

/// Case-insensitive lookup by name or alias.
///
/// Exact names win over aliases; among aliases the earliest catalog entry
/// wins (several corax aliases shadow table 6 names, e.g. `KP` on the
/// K Surface row).
pub fn catalog_lookup(name_or_alias: &str) -> Result<&'static CatalogEntry, CatalogError> {
    let key = name_or_alias.trim().to_lowercase();
    let entries = catalog();
    if let Some(e) = entries.iter().find(|e| e.name.to_lowercase() == key) {
        return Ok(e);
    }
    if let Some(e) = entries
        .iter()
        .find(|e| e.aliases.iter().any(|a| a.to_lowercase() == key))
    {
        return Ok(e);
    }
    let mut scored: Vec<(usize, &str)> = entries
        .iter()
        .flat_map(|e| {
            std::iter::once(e.name.as_str()).chain(e.aliases.iter().map(String::as_str))
        })
        .map(|n| (levenshtein(&key, &n.to_lowercase()), n))
        .collect();
    scored.sort_by_key(|(d, n)| (*d, n.to_string()));
    Err(CatalogError::NotFound {
        query: name_or_alias.to_string(),
        suggestions: scored.iter().take(3).map(|(_, n)| n.to_string()).collect(),
    })
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
