//! Line-oriented scenario files.

use std::fmt;

use hypeca_rules::State;
use hypeca_tiling::{parse_label, CellId};

use crate::kind::StructureKind;
use crate::StructureError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocoKind {
    Simple,
    Double,
    Signal,
}

impl LocoKind {
    /// Number of path cells the locomotive covers.
    pub fn length(self) -> usize {
        match self {
            LocoKind::Double => 2,
            _ => 1,
        }
    }
}

/// Path indices covered at time `t` by a locomotive whose front is on index 0 at time `start`.
/// Index `t - start` holds the front; a double locomotive has its rear one index behind.
pub fn covered(start: i32, length: usize, t: usize, path_len: usize) -> Vec<usize> {
    let front = t as i64 - start as i64;
    (0..length as i64)
        .map(|k| front - k)
        .filter(|&i| i >= 0 && (i as usize) < path_len)
        .map(|i| i as usize)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injection {
    pub kind: LocoKind,
    pub path: String,
    pub start: i32,
}

/// Extra facts used only when fitting assets; the simulation ignores them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hint {
    /// A locomotive observed moving along a path (not injected).
    Motion { path: String, start: i32, double: bool },
    /// A cell black at exactly one time and white otherwise.
    Visit { cell: CellId, time: usize },
    /// Full state sequence of a cell, from t = 0.
    Timeline { cell: CellId, states: Vec<State> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Each cell is black at some time.
    Reach(Vec<CellId>),
    /// Each cell stays white throughout.
    Never(Vec<CellId>),
    Final(CellId, State),
    /// Apart from the colour cell, the final configuration is the idle one.
    Vanished,
    /// A lone locomotive travels the path and no two path cells are ever black together.
    SimpleOn(String),
    /// Two consecutive path cells are black at the same time.
    DoubleOn(String),
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |cs: &[CellId]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Expectation::Reach(cs) => write!(f, "reach {}", list(cs)),
            Expectation::Never(cs) => write!(f, "never {}", list(cs)),
            Expectation::Final(c, s) => write!(f, "final {c} {s}"),
            Expectation::Vanished => f.write_str("vanished"),
            Expectation::SimpleOn(p) => write!(f, "simple-on {p}"),
            Expectation::DoubleOn(p) => write!(f, "double-on {p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub kind: StructureKind,
    pub golden: Vec<String>,
    pub steps: usize,
    pub injections: Vec<Injection>,
    pub hints: Vec<Hint>,
    pub expectations: Vec<Expectation>,
}

impl Scenario {
    /// `family/name`, the key used by witness files.
    pub fn key(&self) -> String {
        format!("{}/{}", self.kind.family(), self.name)
    }

    pub fn parse(name: &str, text: &str) -> Result<Scenario, StructureError> {
        let mut family = None;
        let mut colour = None;
        let mut golden = Vec::new();
        let mut steps = None;
        let mut injections = Vec::new();
        let mut hints = Vec::new();
        let mut expectations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| StructureError::MalformedScenario {
                scenario: name.to_string(),
                line: i + 1,
                reason: reason.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "structure" if words.len() == 2 => family = Some(words[1].to_string()),
                "colour" if words.len() == 2 => {
                    colour = Some(parse_state(words[1]).ok_or_else(|| bad("colour must be W or B"))?)
                }
                "golden" if words.len() == 2 => golden.push(words[1].to_string()),
                "steps" if words.len() == 2 => {
                    steps = Some(words[1].parse().map_err(|_| bad("bad step count"))?)
                }
                "inject" if words.len() == 4 => {
                    let kind = match words[1] {
                        "simple" => LocoKind::Simple,
                        "double" => LocoKind::Double,
                        "signal" => LocoKind::Signal,
                        _ => return Err(bad("unknown locomotive kind")),
                    };
                    let start = parse_time(words[3]).ok_or_else(|| bad("bad start time"))?;
                    injections.push(Injection {
                        kind,
                        path: words[2].to_string(),
                        start,
                    });
                }
                "hint" if words.len() >= 4 => hints.push(parse_hint(&words[1..]).ok_or_else(|| bad("bad hint"))?),
                "expect" if words.len() >= 2 => {
                    expectations.push(parse_expectation(&words[1..]).ok_or_else(|| bad("bad expectation"))?)
                }
                _ => return Err(bad("unrecognised line")),
            }
        }
        let missing = |what: &str| StructureError::MalformedScenario {
            scenario: name.to_string(),
            line: 0,
            reason: format!("no {what} line"),
        };
        let family = family.ok_or_else(|| missing("structure"))?;
        let kind = StructureKind::from_family(&family, colour).ok_or_else(|| StructureError::UnknownStructure(family.clone()))?;
        let steps = match steps {
            Some(s) => s,
            None => {
                let layout = crate::layout::layout(kind);
                let longest = injections
                    .iter()
                    .filter_map(|inj| layout.path(&inj.path).map(|p| p.len()))
                    .max()
                    .ok_or_else(|| missing("steps"))?;
                longest + 3
            }
        };
        Ok(Scenario {
            name: name.to_string(),
            kind,
            golden,
            steps,
            injections,
            hints,
            expectations,
        })
    }
}

fn parse_state(w: &str) -> Option<State> {
    let mut cs = w.chars();
    match (cs.next(), cs.next()) {
        (Some(c), None) => State::from_char(c),
        _ => None,
    }
}

fn parse_time(w: &str) -> Option<i32> {
    w.strip_prefix('@')?.parse().ok()
}

fn parse_cells(ws: &[&str]) -> Option<Vec<CellId>> {
    if ws.is_empty() {
        return None;
    }
    ws.iter().map(|w| parse_label(w).ok()).collect()
}

fn parse_hint(ws: &[&str]) -> Option<Hint> {
    match ws {
        ["motion", path, at] => Some(Hint::Motion {
            path: path.to_string(),
            start: parse_time(at)?,
            double: false,
        }),
        ["motion", path, at, "double"] => Some(Hint::Motion {
            path: path.to_string(),
            start: parse_time(at)?,
            double: true,
        }),
        ["visit", cell, at] => Some(Hint::Visit {
            cell: parse_label(cell).ok()?,
            time: usize::try_from(parse_time(at)?).ok()?,
        }),
        ["timeline", cell, states] => Some(Hint::Timeline {
            cell: parse_label(cell).ok()?,
            states: states.chars().map(State::from_char).collect::<Option<Vec<_>>>()?,
        }),
        _ => None,
    }
}

fn parse_expectation(ws: &[&str]) -> Option<Expectation> {
    match ws {
        ["reach", rest @ ..] => Some(Expectation::Reach(parse_cells(rest)?)),
        ["never", rest @ ..] => Some(Expectation::Never(parse_cells(rest)?)),
        ["final", cell, s] => Some(Expectation::Final(parse_label(cell).ok()?, parse_state(s)?)),
        ["vanished"] => Some(Expectation::Vanished),
        ["simple-on", p] => Some(Expectation::SimpleOn(p.to_string())),
        ["double-on", p] => Some(Expectation::DoubleOn(p.to_string())),
        _ => None,
    }
}
