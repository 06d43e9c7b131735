//! Solved asset files: milestones and orientations recovered by the fitter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use hypeca_tiling::{parse_label, CellId};

use crate::StructureError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolvedAsset {
    pub structure: String,
    /// Idle black cells, colour cell excluded.
    pub black: BTreeSet<CellId>,
    /// Cell to the neighbour on its side 1.
    pub orient: BTreeMap<CellId, CellId>,
    /// Cells where several side-1 choices fit every trace; all candidates listed.
    pub ambiguous: BTreeMap<CellId, Vec<CellId>>,
    /// Cells left white because no trace constrains them.
    pub unconstrained: BTreeSet<CellId>,
}

impl SolvedAsset {
    pub fn parse(text: &str) -> Result<SolvedAsset, StructureError> {
        let mut a = SolvedAsset::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| StructureError::MalformedAsset {
                line: i + 1,
                reason: reason.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            let label = |w: &str| parse_label(w).map_err(|e| bad(&e.to_string()));
            match words.as_slice() {
                ["structure", name] => a.structure = name.to_string(),
                ["cell", c, "B"] => {
                    a.black.insert(label(c)?);
                }
                ["cell", c, "W"] => {
                    a.black.remove(&label(c)?);
                }
                ["orient", c, n] => {
                    a.orient.insert(label(c)?, label(n)?);
                }
                ["ambiguous", c, rest @ ..] if !rest.is_empty() => {
                    let opts = rest.iter().map(|w| label(w)).collect::<Result<Vec<_>, _>>()?;
                    a.ambiguous.insert(label(c)?, opts);
                }
                ["unconstrained", rest @ ..] => {
                    for w in rest {
                        a.unconstrained.insert(label(w)?);
                    }
                }
                _ => return Err(bad("unrecognised line")),
            }
        }
        if a.structure.is_empty() {
            return Err(StructureError::MalformedAsset {
                line: 0,
                reason: "no structure line".into(),
            });
        }
        Ok(a)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "structure {}", self.structure).unwrap();
        for c in &self.black {
            writeln!(out, "cell {c} B").unwrap();
        }
        for (c, n) in &self.orient {
            writeln!(out, "orient {c} {n}").unwrap();
        }
        for (c, opts) in &self.ambiguous {
            let list: Vec<String> = opts.iter().map(|o| o.to_string()).collect();
            writeln!(out, "ambiguous {c} {}", list.join(" ")).unwrap();
        }
        for c in &self.unconstrained {
            writeln!(out, "unconstrained {c}").unwrap();
        }
        out
    }
}
