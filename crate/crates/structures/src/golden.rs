//! Execution tables and milestone witnesses transcribed as text.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::fs;
use std::path::Path;

use hypeca_tiling::{parse_label, CellId};

use crate::StructureError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoldenEntry {
    pub rule: u16,
    /// Printed in red: the rule changes the cell's state.
    pub marked: bool,
}

/// One execution table. Row `r` holds the rules fired between times `r - 1` and `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenTable {
    pub name: String,
    pub cells: Vec<CellId>,
    pub rows: Vec<(u32, Vec<GoldenEntry>)>,
}

impl GoldenTable {
    pub fn parse(name: &str, text: &str) -> Result<GoldenTable, StructureError> {
        let bad = |line: usize, reason: &str| StructureError::MalformedGolden {
            name: name.to_string(),
            line,
            reason: reason.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| bad(0, "empty table"))?;
        let mut head = header.split('\t');
        if head.next() != Some("t") {
            return Err(bad(hl + 1, "header must start with t"));
        }
        let cells = head
            .map(|w| parse_label(w).map_err(|e| bad(hl + 1, &e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::new();
        for (i, line) in lines {
            let mut fields = line.split('\t');
            let r: u32 = fields
                .next()
                .and_then(|w| w.parse().ok())
                .filter(|&r| r >= 1)
                .ok_or_else(|| bad(i + 1, "bad row number"))?;
            if rows.last().is_some_and(|(p, _): &(u32, _)| *p + 1 != r) {
                return Err(bad(i + 1, "rows must be consecutive"));
            }
            let entries = fields
                .map(|w| {
                    let (num, marked) = match w.strip_suffix('*') {
                        Some(n) => (n, true),
                        None => (w, false),
                    };
                    num.parse()
                        .map(|rule| GoldenEntry { rule, marked })
                        .map_err(|_| bad(i + 1, "bad rule id"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if entries.len() != cells.len() {
                return Err(bad(i + 1, "row width differs from header"));
            }
            rows.push((r, entries));
        }
        if rows.is_empty() {
            return Err(bad(0, "no rows"));
        }
        Ok(GoldenTable {
            name: name.to_string(),
            cells,
            rows,
        })
    }

    pub fn first_row(&self) -> u32 {
        self.rows[0].0
    }

    pub fn last_row(&self) -> u32 {
        self.rows[self.rows.len() - 1].0
    }

    /// Rule expected at `cell` for the step leaving time `t`.
    pub fn expected(&self, t: usize, cell: CellId) -> Option<GoldenEntry> {
        let col = self.cells.iter().position(|&c| c == cell)?;
        let first = self.first_row() as usize;
        let idx = (t + 1).checked_sub(first)?;
        self.rows.get(idx).map(|(_, e)| e[col])
    }

    /// Column of `cell` as (time, entry) pairs.
    pub fn column(&self, cell: CellId) -> Vec<(usize, GoldenEntry)> {
        match self.cells.iter().position(|&c| c == cell) {
            Some(col) => self.rows.iter().map(|(r, e)| (*r as usize - 1, e[col])).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("t");
        for c in &self.cells {
            write!(out, "\t{c}").unwrap();
        }
        out.push('\n');
        for (r, entries) in &self.rows {
            write!(out, "{r}").unwrap();
            for e in entries {
                write!(out, "\t{}{}", e.rule, if e.marked { "*" } else { "" }).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Rule sequence shown at a milestone while a scenario runs, repeats collapsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub source: String,
    pub scenario: String,
    pub cell: CellId,
    pub rules: Vec<u16>,
}

pub fn parse_witnesses(name: &str, text: &str) -> Result<Vec<Witness>, StructureError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| StructureError::MalformedGolden {
            name: name.to_string(),
            line: i + 1,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [scenario, cell, seq] = fields.as_slice() else {
            return Err(bad("expected scenario, cell and rule sequence"));
        };
        let rules = seq
            .split_whitespace()
            .map(|w| w.parse().map_err(|_| bad("bad rule id")))
            .collect::<Result<Vec<u16>, _>>()?;
        if rules.is_empty() {
            return Err(bad("empty rule sequence"));
        }
        out.push(Witness {
            source: name.to_string(),
            scenario: scenario.to_string(),
            cell: parse_label(cell).map_err(|e| bad(&e.to_string()))?,
            rules,
        });
    }
    Ok(out)
}

/// Collapses runs of equal rules.
pub fn compress(seq: &[u16]) -> Vec<u16> {
    let mut out: Vec<u16> = Vec::new();
    for &r in seq {
        if out.last() != Some(&r) {
            out.push(r);
        }
    }
    out
}

/// True if the collapsed `observed` sequence occurs contiguously inside `witness`.
pub fn witness_matches(witness: &[u16], observed: &[u16]) -> bool {
    let got = compress(observed);
    got.is_empty() || witness.windows(got.len()).any(|w| w == got.as_slice())
}

#[derive(Clone, Debug, Default)]
pub struct GoldenStore {
    pub tables: BTreeMap<String, GoldenTable>,
    pub witnesses: Vec<Witness>,
}

impl GoldenStore {
    /// Reads every `.tsv` file of `dir`. Files whose first line is a `t` header are tables,
    /// the rest are witness lists.
    pub fn load(dir: &Path) -> Result<GoldenStore, StructureError> {
        let io = |e: std::io::Error| StructureError::Io {
            path: dir.display().to_string(),
            reason: e.to_string(),
        };
        let mut names: Vec<_> = fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
            .collect();
        names.sort();
        let mut store = GoldenStore::default();
        for p in names {
            let name = p.file_stem().unwrap().to_string_lossy().to_string();
            let text = fs::read_to_string(&p).map_err(io)?;
            let is_table = text
                .lines()
                .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
                .is_some_and(|l| l.starts_with("t\t"));
            if is_table {
                store.tables.insert(name.clone(), GoldenTable::parse(&name, &text)?);
            } else {
                store.witnesses.extend(parse_witnesses(&name, &text)?);
            }
        }
        Ok(store)
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty() && self.witnesses.is_empty()
    }

    pub fn witnesses_for<'a>(&'a self, scenario_key: &'a str) -> impl Iterator<Item = &'a Witness> + 'a {
        self.witnesses.iter().filter(move |w| w.scenario == scenario_key)
    }
}
