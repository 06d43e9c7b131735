//! Configurations, orientations and the synchronous update.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use hypeca_rules::{Context, Rule, RuleTable, State};
use hypeca_tiling::{CellId, TilingBall, TilingError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error("cell {0} has no orientation")]
    MissingOrientation(CellId),
    #[error("no rule for cell {cell}: {current} {context}")]
    MissingRule {
        cell: CellId,
        current: State,
        context: Context,
    },
    #[error("cell {cell} on the outer levels would change state")]
    BoundaryActivity { cell: CellId },
}

/// Per-cell choice of side 1: offset `o` means side `k+1` is canonical neighbour `(k+o) mod 8`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Orientation {
    offsets: BTreeMap<CellId, u8>,
}

impl Orientation {
    pub fn new() -> Orientation {
        Orientation::default()
    }

    pub fn set(&mut self, c: CellId, offset: u8) {
        self.offsets.insert(c, offset % 8);
    }

    pub fn get(&self, c: CellId) -> Option<u8> {
        self.offsets.get(&c).copied()
    }

    pub fn remove(&mut self, c: CellId) {
        self.offsets.remove(&c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellId, u8)> + '_ {
        self.offsets.iter().map(|(c, o)| (*c, *o))
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Sets side 1 of `c` to be the side shared with `side_one`.
    pub fn point(&mut self, ball: &TilingBall, c: CellId, side_one: CellId) -> Result<(), TilingError> {
        let k = ball.side_of(c, side_one).ok_or(TilingError::UnknownCell(side_one))?;
        self.set(c, k as u8);
        Ok(())
    }

    /// The neighbour on side 1 of `c`.
    pub fn side_one(&self, ball: &TilingBall, c: CellId) -> Option<CellId> {
        let o = self.get(c)?;
        ball.neighbor_slots(c).ok()?[o as usize]
    }
}

/// A finite configuration; every cell not listed is W.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration {
    black: BTreeSet<CellId>,
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    pub fn from_black<I: IntoIterator<Item = CellId>>(cells: I) -> Configuration {
        Configuration {
            black: cells.into_iter().collect(),
        }
    }

    pub fn state(&self, c: CellId) -> State {
        if self.black.contains(&c) {
            State::B
        } else {
            State::W
        }
    }

    pub fn set(&mut self, c: CellId, s: State) {
        match s {
            State::B => self.black.insert(c),
            State::W => self.black.remove(&c),
        };
    }

    /// The support, in label order.
    pub fn black(&self) -> &BTreeSet<CellId> {
        &self.black
    }

    pub fn is_blank(&self) -> bool {
        self.black.is_empty()
    }
}

fn read_context(
    config: &Configuration,
    orientation: &Orientation,
    c: CellId,
    slots: [Option<CellId>; 8],
) -> Result<Context, EngineError> {
    let raw: [State; 8] = slots.map(|s| s.map(|n| config.state(n)).unwrap_or(State::W));
    let canonical = Context::from_states(&raw);
    if canonical.is_uniform() {
        return Ok(canonical);
    }
    let o = orientation.get(c).ok_or(EngineError::MissingOrientation(c))? as usize;
    Ok(Context::from_states(&std::array::from_fn(|k| raw[(k + o) % 8])))
}

/// Current state of `c` and its neighbours read from side 1 counterclockwise.
pub fn oriented_context(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    c: CellId,
) -> Result<(State, Context), EngineError> {
    let nb = ball.neighbors(c)?;
    let ctx = read_context(config, orientation, c, nb.map(Some))?;
    Ok((config.state(c), ctx))
}

/// Rule ids fired during one step, per cell.
pub type LogEntry = BTreeMap<CellId, u16>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiringLog {
    /// Column order for export.
    pub cells: Vec<CellId>,
    pub steps: Vec<LogEntry>,
}

impl FiringLog {
    /// Rule fired at `c` during step `t` (0-based). A cell not recorded fired rule 1.
    pub fn fired(&self, t: usize, c: CellId) -> Option<u16> {
        self.steps.get(t).map(|e| e.get(&c).copied().unwrap_or(1))
    }

    /// Tab-separated trace: a header of cell labels, then `t` (from 1) and rule ids.
    /// State-changing rules carry a trailing `*`.
    pub fn to_tsv(&self, table: &RuleTable) -> String {
        let mut out = String::from("t");
        for c in &self.cells {
            write!(out, "\t{c}").unwrap();
        }
        out.push('\n');
        for (t, e) in self.steps.iter().enumerate() {
            write!(out, "{}", t + 1).unwrap();
            for c in &self.cells {
                let id = e.get(c).copied().unwrap_or(1);
                let mark = match table.get(id) {
                    Some(r) if r.changes_state() => "*",
                    _ => "",
                };
                write!(out, "\t{id}{mark}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Cells whose 1-ring meets the support, plus the support itself.
pub fn active_cells(ball: &TilingBall, config: &Configuration) -> BTreeSet<CellId> {
    let mut out = BTreeSet::new();
    for &b in config.black() {
        out.insert(b);
        if let Ok(slots) = ball.neighbor_slots(b) {
            out.extend(slots.into_iter().flatten());
        }
    }
    out
}

fn evaluate<'t>(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    table: &'t RuleTable,
    c: CellId,
) -> Result<Option<&'t Rule>, EngineError> {
    let slots = ball.neighbor_slots(c)?;
    let ctx = read_context(config, orientation, c, slots)?;
    let cur = config.state(c);
    match table.match_rule(cur, ctx) {
        Some(r) => Ok(Some(r)),
        None if cur == State::W && ctx == Context::WHITE => Ok(None),
        None => Err(EngineError::MissingRule {
            cell: c,
            current: cur,
            context: ctx,
        }),
    }
}

/// One synchronous step. Cells in `watch` are always logged; without a watch set every
/// active cell is logged.
pub fn step(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    table: &RuleTable,
    watch: Option<&[CellId]>,
) -> Result<(Configuration, LogEntry), EngineError> {
    let active = active_cells(ball, config);
    let outer = ball.levels().saturating_sub(1);
    let mut next = Configuration::new();
    let mut log = LogEntry::new();
    for &c in &active {
        let rule = evaluate(ball, config, orientation, table, c)?;
        let (id, new_state) = match rule {
            Some(r) => (r.id, r.next),
            None => (1, State::W),
        };
        if new_state != config.state(c) && c != CellId::CENTER && ball.level(c).unwrap_or(0) >= outer {
            return Err(EngineError::BoundaryActivity { cell: c });
        }
        if new_state == State::B {
            next.black.insert(c);
        }
        if watch.is_none() {
            log.insert(c, id);
        }
    }
    if let Some(w) = watch {
        for &c in w {
            let id = if active.contains(&c) {
                match evaluate(ball, config, orientation, table, c)? {
                    Some(r) => r.id,
                    None => 1,
                }
            } else {
                1
            };
            log.insert(c, id);
        }
    }
    Ok((next, log))
}

/// Runs `n` steps and collects the firing log.
pub fn run(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    table: &RuleTable,
    n: usize,
    watch: Option<&[CellId]>,
) -> Result<(Configuration, FiringLog), EngineError> {
    let mut cur = config.clone();
    let mut log = FiringLog::default();
    let mut seen = BTreeSet::new();
    for _ in 0..n {
        let (next, entry) = step(ball, &cur, orientation, table, watch)?;
        seen.extend(entry.keys().copied());
        log.steps.push(entry);
        cur = next;
    }
    log.cells = match watch {
        Some(w) => w.to_vec(),
        None => seen.into_iter().collect(),
    };
    Ok((cur, log))
}

/// Runs `n` steps and keeps every intermediate configuration (index 0 is the input).
pub fn history(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    table: &RuleTable,
    n: usize,
    watch: Option<&[CellId]>,
) -> Result<(Vec<Configuration>, FiringLog), EngineError> {
    let mut frames = vec![config.clone()];
    let mut log = FiringLog::default();
    let mut seen = BTreeSet::new();
    for _ in 0..n {
        let (next, entry) = step(ball, frames.last().unwrap(), orientation, table, watch)?;
        seen.extend(entry.keys().copied());
        log.steps.push(entry);
        frames.push(next);
    }
    log.cells = match watch {
        Some(w) => w.to_vec(),
        None => seen.into_iter().collect(),
    };
    Ok((frames, log))
}

pub fn is_fixed_point(
    ball: &TilingBall,
    config: &Configuration,
    orientation: &Orientation,
    table: &RuleTable,
) -> Result<bool, EngineError> {
    let (next, _) = step(ball, config, orientation, table, None)?;
    Ok(next == *config)
}
