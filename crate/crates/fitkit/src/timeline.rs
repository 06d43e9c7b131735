use std::collections::BTreeMap;

use hypeca_rules::{RuleTable, State};
use hypeca_structures::golden::GoldenTable;
use hypeca_tiling::CellId;

use crate::FitError;

/// States and fired rules of the tracked cells of one table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Timeline {
    pub name: String,
    /// Time of the first recorded state.
    pub start: usize,
    pub cells: Vec<CellId>,
    /// States at `start, start + 1, ...`, one more than there are rules.
    pub states: BTreeMap<CellId, Vec<State>>,
    pub rules: BTreeMap<CellId, Vec<u16>>,
}

impl Timeline {
    pub fn end(&self) -> usize {
        self.start + self.states.values().next().map_or(0, |s| s.len() - 1)
    }

    pub fn state(&self, c: CellId, t: usize) -> Option<State> {
        self.states.get(&c)?.get(t.checked_sub(self.start)?).copied()
    }

    pub fn rule(&self, c: CellId, t: usize) -> Option<u16> {
        self.rules.get(&c)?.get(t.checked_sub(self.start)?).copied()
    }
}

/// Turns a table of rule ids into state sequences, checking that each rule's
/// new state is the next rule's current state.
pub fn reconstruct_timeline(golden: &GoldenTable, table: &RuleTable) -> Result<Timeline, FitError> {
    let mut states = BTreeMap::new();
    let mut rules = BTreeMap::new();
    let start = golden.first_row() as usize - 1;
    for (col, &c) in golden.cells.iter().enumerate() {
        let mut seq: Vec<State> = Vec::new();
        let mut ids = Vec::new();
        for (k, (_, entries)) in golden.rows.iter().enumerate() {
            let id = entries[col].rule;
            let rule = table.get(id).ok_or_else(|| FitError::UnknownRule {
                table: golden.name.clone(),
                id,
            })?;
            if let Some(&prev) = seq.last() {
                if prev != rule.current {
                    return Err(FitError::InconsistentTrace {
                        table: golden.name.clone(),
                        cell: c,
                        t: start + k,
                    });
                }
                seq.pop();
            }
            seq.push(rule.current);
            seq.push(rule.next);
            ids.push(id);
        }
        states.insert(c, seq);
        rules.insert(c, ids);
    }
    Ok(Timeline {
        name: golden.name.clone(),
        start,
        cells: golden.cells.clone(),
        states,
        rules,
    })
}
