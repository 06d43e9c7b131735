//! Idle circuit structures on the {8,3} ball, their scenarios and solved assets.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hypeca_engine::{history, Configuration, EngineError, FiringLog, Orientation};
use hypeca_rules::{RuleTable, State};
use hypeca_tiling::{CellId, TilingBall};

mod asset;
pub mod golden;
mod kind;
mod layout;
mod scenario;

pub use asset::SolvedAsset;
pub use kind::{Direction, StructureKind, FAMILIES};
pub use layout::{layout, Layout};
pub use scenario::{covered, Expectation, Hint, Injection, LocoKind, Scenario};

/// Ball depth used for every structure: paths reach level 5 and the two outer levels stay quiet.
pub const STRUCTURE_LEVELS: u32 = 7;

#[derive(Debug, thiserror::Error)]
pub enum StructureError {
    #[error("unknown structure {0}")]
    UnknownStructure(String),
    #[error("layout of {structure} unresolved: {reason}")]
    UnresolvedLayout { structure: String, reason: String },
    #[error("injection blocked: {cell} is black in the idle configuration")]
    PathBlocked { cell: CellId },
    #[error("no path named {0}")]
    UnknownPath(String),
    #[error("scenario {scenario} line {line}: {reason}")]
    MalformedScenario {
        scenario: String,
        line: usize,
        reason: String,
    },
    #[error("asset line {line}: {reason}")]
    MalformedAsset { line: usize, reason: String },
    #[error("golden {name} line {line}: {reason}")]
    MalformedGolden {
        name: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Asset root: `HYPECA_ASSETS` if set, else the `assets` directory of the workspace.
pub fn assets_dir() -> PathBuf {
    match std::env::var_os("HYPECA_ASSETS") {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets"),
    }
}

fn read(path: &Path) -> Result<String, StructureError> {
    fs::read_to_string(path).map_err(|e| StructureError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn asset_path(dir: &Path, family: &str) -> PathBuf {
    dir.join("structures").join(format!("{family}.txt"))
}

pub fn load_asset(dir: &Path, family: &str) -> Result<SolvedAsset, StructureError> {
    let path = asset_path(dir, family);
    if !path.exists() {
        return Err(StructureError::UnresolvedLayout {
            structure: family.to_string(),
            reason: format!("no solved asset at {}", path.display()),
        });
    }
    SolvedAsset::parse(&read(&path)?)
}

pub fn load_scenario(dir: &Path, family: &str, name: &str) -> Result<Scenario, StructureError> {
    let path = dir.join("scenarios").join(family).join(format!("{name}.txt"));
    Scenario::parse(name, &read(&path)?)
}

/// Every scenario under `dir/scenarios`, ordered by family then name.
pub fn load_scenarios(dir: &Path) -> Result<Vec<Scenario>, StructureError> {
    let mut out = Vec::new();
    for family in FAMILIES {
        let sub = dir.join("scenarios").join(family);
        let Ok(entries) = fs::read_dir(&sub) else { continue };
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .map(|p| p.file_stem().unwrap().to_string_lossy().to_string())
            .collect();
        names.sort();
        for n in names {
            out.push(load_scenario(dir, family, &n)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureInstance {
    pub kind: StructureKind,
    pub config: Configuration,
    pub orientation: Orientation,
    pub named: BTreeMap<String, CellId>,
    pub paths: BTreeMap<String, Vec<CellId>>,
    pub colour_cell: Option<CellId>,
}

impl StructureInstance {
    pub fn path(&self, name: &str) -> Result<&[CellId], StructureError> {
        self.paths
            .get(name)
            .map(|p| p.as_slice())
            .ok_or_else(|| StructureError::UnknownPath(name.to_string()))
    }
}

/// Combines the quoted layout of `kind` with its solved asset.
pub fn build_structure(kind: StructureKind, ball: &TilingBall, asset: &SolvedAsset) -> Result<StructureInstance, StructureError> {
    let unresolved = |reason: String| StructureError::UnresolvedLayout {
        structure: kind.family().to_string(),
        reason,
    };
    if asset.structure != kind.family() {
        return Err(unresolved(format!("asset is for {}", asset.structure)));
    }
    let lay = layout(kind);
    for c in asset.black.iter().chain(asset.orient.keys()) {
        if !ball.contains(*c) {
            return Err(unresolved(format!("{c} lies outside the ball")));
        }
    }
    for m in &lay.black {
        if !asset.black.contains(m) {
            return Err(unresolved(format!("asset lacks milestone {m}")));
        }
    }
    let mut orientation = Orientation::new();
    for (&c, &n) in &asset.orient {
        orientation
            .point(ball, c, n)
            .map_err(|_| unresolved(format!("{n} is not a neighbour of {c}")))?;
    }
    // side 1 toward the successor on the track, where the traces allow it and the
    // cell belongs to a single track
    let mut successor: BTreeMap<CellId, Option<CellId>> = BTreeMap::new();
    for (_, p) in &lay.paths {
        for w in p.windows(2) {
            let e = successor.entry(w[0]).or_insert(Some(w[1]));
            if *e != Some(w[1]) {
                *e = None;
            }
        }
    }
    for (c, next) in successor {
        if let Some(next) = next {
            if asset.ambiguous.get(&c).is_some_and(|opts| opts.contains(&next)) {
                orientation
                    .point(ball, c, next)
                    .map_err(|_| unresolved(format!("{next} is not a neighbour of {c}")))?;
            }
        }
    }
    for (name, p) in &lay.paths {
        for (i, &c) in p.iter().enumerate() {
            if !ball.contains(c) {
                return Err(unresolved(format!("path {name} leaves the ball at {c}")));
            }
            if i > 0 && !ball.are_adjacent(p[i - 1], c) {
                return Err(unresolved(format!("path {name} is broken at {c}")));
            }
            if orientation.get(c).is_none() {
                return Err(unresolved(format!("path cell {c} has no orientation")));
            }
        }
    }
    let mut config = Configuration::from_black(asset.black.iter().chain(&lay.black).copied());
    if let (Some(cell), Some(colour)) = (lay.colour_cell, kind.colour()) {
        config.set(cell, colour);
    }
    Ok(StructureInstance {
        kind,
        config,
        orientation,
        named: lay.named.into_iter().collect(),
        paths: lay.paths.into_iter().collect(),
        colour_cell: lay.colour_cell,
    })
}

/// Builds `kind` from the solved asset found under `dir`.
pub fn load_structure(kind: StructureKind, ball: &TilingBall, dir: &Path) -> Result<StructureInstance, StructureError> {
    build_structure(kind, ball, &load_asset(dir, kind.family())?)
}

/// Configuration at time 0: the idle configuration plus every injected locomotive.
pub fn inject(instance: &StructureInstance, scenario: &Scenario) -> Result<Configuration, StructureError> {
    let mut config = instance.config.clone();
    for inj in &scenario.injections {
        let p = instance.path(&inj.path)?;
        for i in covered(inj.start, inj.kind.length(), 0, p.len()) {
            if instance.config.state(p[i]) == State::B {
                return Err(StructureError::PathBlocked { cell: p[i] });
            }
            config.set(p[i], State::B);
        }
    }
    Ok(config)
}

/// Runs a scenario for its declared number of steps, logging every active cell.
pub fn simulate(
    ball: &TilingBall,
    table: &RuleTable,
    instance: &StructureInstance,
    scenario: &Scenario,
) -> Result<(Vec<Configuration>, FiringLog), StructureError> {
    let start = inject(instance, scenario)?;
    Ok(history(ball, &start, &instance.orientation, table, scenario.steps, None)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationOutcome {
    pub expectation: Expectation,
    pub passed: bool,
    pub detail: String,
}

/// Evaluates the scenario's expectations on the frames of a run (index 0 is time 0).
pub fn check_expectations(instance: &StructureInstance, scenario: &Scenario, frames: &[Configuration]) -> Vec<ExpectationOutcome> {
    scenario
        .expectations
        .iter()
        .map(|e| {
            let (passed, detail) = evaluate(instance, e, frames);
            ExpectationOutcome {
                expectation: e.clone(),
                passed,
                detail,
            }
        })
        .collect()
}

fn evaluate(instance: &StructureInstance, e: &Expectation, frames: &[Configuration]) -> (bool, String) {
    let Some(last) = frames.last() else {
        return (false, "no frames".into());
    };
    let black_at = |c: CellId| frames.iter().position(|f| f.state(c) == State::B);
    match e {
        Expectation::Reach(cs) => match cs.iter().find(|&&c| black_at(c).is_none()) {
            Some(c) => (false, format!("{c} never black")),
            None => (true, String::new()),
        },
        Expectation::Never(cs) => match cs.iter().find_map(|&c| black_at(c).map(|t| (c, t))) {
            Some((c, t)) => (false, format!("{c} black at t={t}")),
            None => (true, String::new()),
        },
        Expectation::Final(c, s) => {
            let got = last.state(*c);
            (got == *s, format!("{c} ends {got}"))
        }
        Expectation::Vanished => {
            let strip = |f: &Configuration| {
                let mut f = f.clone();
                if let Some(c) = instance.colour_cell {
                    f.set(c, State::W);
                }
                f
            };
            let extra: Vec<String> = strip(last)
                .black()
                .symmetric_difference(strip(&instance.config).black())
                .map(|c| c.to_string())
                .collect();
            (extra.is_empty(), extra.join(" "))
        }
        Expectation::SimpleOn(name) | Expectation::DoubleOn(name) => {
            let Some(p) = instance.paths.get(name) else {
                return (false, format!("no path {name}"));
            };
            let on: Vec<Vec<usize>> = frames
                .iter()
                .map(|f| (0..p.len()).filter(|&i| f.state(p[i]) == State::B).collect())
                .collect();
            let pair = on.iter().position(|v| v.windows(2).any(|w| w[1] == w[0] + 1));
            if matches!(e, Expectation::DoubleOn(_)) {
                return match pair {
                    Some(t) => (true, format!("pair at t={t}")),
                    None => (false, "no two consecutive path cells black together".into()),
                };
            }
            match (on.iter().position(|v| v.len() > 1), on.iter().any(|v| v.len() == 1)) {
                (Some(t), _) => (false, format!("{} path cells black at t={t}", on[t].len())),
                (None, false) => (false, "path never carries a locomotive".into()),
                (None, true) => (true, String::new()),
            }
        }
    }
}
