//! The physics equation bank: storage format, loading/saving, and
//! materialization of entries into comparable trajectories.
//!
//! File format is line-oriented TSV: `id <TAB> source <TAB> expression
//! <TAB> notes`, with `#` comment lines; a `# VERSION <v>` comment carries
//! the bank version. Every entry is a single-axis expression over `t` (2D
//! queries compare each axis independently against the bank).

use crate::expr::{parse, Expr};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Where an entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Feynman,
    Nguyen,
    Augmented,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Feynman, Source::Nguyen, Source::Augmented];

    pub fn name(self) -> &'static str {
        match self {
            Source::Feynman => "feynman",
            Source::Nguyen => "nguyen",
            Source::Augmented => "augmented",
        }
    }

    pub fn from_name(name: &str) -> Option<Source> {
        Source::ALL.iter().copied().find(|s| s.name() == name)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A named, sourced expression over `t`, materializable into a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationBankEntry {
    pub id: String,
    pub source: Source,
    pub expr: Expr,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquationBank {
    pub entries: Vec<EquationBankEntry>,
    pub version: String,
}

impl EquationBank {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&EquationBankEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

#[derive(Debug, Error)]
pub enum BankError {
    #[error("cannot read bank `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("duplicate entry id `{id}` at line {line}")]
    DuplicateId { id: String, line: usize },
    #[error("bank contains zero valid entries")]
    NoValidEntries,
}

/// A loaded bank plus the warnings produced while loading (malformed lines
/// and entries failing the finiteness screen are skipped, not fatal).
#[derive(Debug)]
pub struct BankLoad {
    pub bank: EquationBank,
    pub warnings: Vec<String>,
}

/// Grid on which the finiteness invariant is screened: entries must be
/// finite under protected evaluation for at least 90% of these points.
fn screen_grid() -> Vec<f64> {
    (0..100).map(|i| 0.1 + 9.9 * i as f64 / 99.0).collect()
}

fn finite_fraction(expr: &Expr) -> f64 {
    let grid = screen_grid();
    let values = expr.evaluate_on(&grid, true);
    values.iter().filter(|v| v.is_finite()).count() as f64 / values.len() as f64
}

pub fn load_bank(path: &Path) -> Result<BankLoad, BankError> {
    let content = std::fs::read_to_string(path).map_err(|source| BankError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_bank_str(&content)
}

pub fn load_bank_str(content: &str) -> Result<BankLoad, BankError> {
    let mut entries: Vec<EquationBankEntry> = Vec::new();
    let mut warnings = Vec::new();
    let mut version = String::from("unversioned");

    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("VERSION") {
                version = v.trim().to_string();
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 3 {
            warnings.push(format!(
                "line {line_no}: expected `id<TAB>source<TAB>expression<TAB>notes`, got {} fields",
                fields.len()
            ));
            continue;
        }
        let id = fields[0].trim().to_string();
        let Some(source) = Source::from_name(fields[1].trim()) else {
            warnings.push(format!(
                "line {line_no}: unknown source `{}`",
                fields[1].trim()
            ));
            continue;
        };
        let expr = match parse(fields[2].trim()) {
            Ok(e) => e,
            Err(err) => {
                warnings.push(format!("line {line_no}: bad expression: {err}"));
                continue;
            }
        };
        if let Some(prev) = entries.iter().find(|e| e.id == id) {
            let _ = prev;
            return Err(BankError::DuplicateId { id, line: line_no });
        }
        let fraction = finite_fraction(&expr);
        if fraction < 0.9 {
            warnings.push(format!(
                "line {line_no}: entry `{id}` rejected, finite on only {:.0}% of the screen grid",
                fraction * 100.0
            ));
            continue;
        }
        let notes = fields.get(3).map(|s| s.trim().to_string()).unwrap_or_default();
        entries.push(EquationBankEntry {
            id,
            source,
            expr,
            notes,
        });
    }

    if entries.is_empty() {
        return Err(BankError::NoValidEntries);
    }
    let bank = EquationBank { entries, version };
    for (source, stats) in bank_stats(&bank) {
        log::info!(
            "bank: {} {} entries, mean length {:.1}",
            stats.count,
            source,
            stats.mean_node_count
        );
    }
    Ok(BankLoad { bank, warnings })
}

/// The bank shipped with the crate (`data/bank/default.tsv`).
pub fn load_default_bank() -> BankLoad {
    load_bank_str(include_str!("../data/bank/default.tsv"))
        .expect("the shipped default bank must load")
}

pub fn save_bank(bank: &EquationBank, path: &Path) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# VERSION {}", bank.version)?;
    for e in &bank.entries {
        writeln!(f, "{}\t{}\t{}\t{}", e.id, e.source, e.expr, e.notes)?;
    }
    Ok(())
}

/// Evaluate an entry on a time grid under protected operators.
pub fn materialize(entry: &EquationBankEntry, t_values: &[f64]) -> Vec<f64> {
    entry.expr.evaluate_on(t_values, true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceStats {
    pub count: usize,
    pub mean_node_count: f64,
}

/// Per-source entry count and mean expression length (node count).
pub fn bank_stats(bank: &EquationBank) -> BTreeMap<Source, SourceStats> {
    let mut out = BTreeMap::new();
    for source in Source::ALL {
        let lengths: Vec<usize> = bank
            .entries
            .iter()
            .filter(|e| e.source == source)
            .map(|e| e.expr.complexity())
            .collect();
        if lengths.is_empty() {
            continue;
        }
        out.insert(
            source,
            SourceStats {
                count: lengths.len(),
                mean_node_count: lengths.iter().sum::<usize>() as f64 / lengths.len() as f64,
            },
        );
    }
    out
}
