//! Golden-table replay, milestone witnesses, idle checks, behaviour checks and rule coverage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hypeca_engine::{is_fixed_point, oriented_context, run, Configuration, FiringLog};
use hypeca_rules::{parse_rules, RuleError, RuleTable};
use hypeca_structures::golden::{compress, witness_matches, GoldenStore, GoldenTable, Witness};
use hypeca_structures::{
    build_structure, check_expectations, load_scenarios, load_structure, simulate, Scenario, SolvedAsset, StructureError, StructureInstance, StructureKind,
    STRUCTURE_LEVELS,
};
use hypeca_tiling::{build_ball, CellId, TilingBall};

pub use hypeca_structures::golden;

pub const IDLE_STEPS: usize = 20;

/// Infrastructure failures: the suite could not run at all.
#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("no golden tables under {0}")]
    MissingGolden(String),
    #[error("no golden table named {0}")]
    UnknownTable(String),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub cell: CellId,
    /// Row label as printed in the table.
    pub row: u32,
    pub expected: u16,
    pub got: u16,
    /// State and oriented neighbourhood the cell actually read.
    pub context: String,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} row {}: expected {}, got {} ({})",
            self.cell, self.row, self.expected, self.got, self.context
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
}

impl Outcome {
    pub fn passed(&self) -> bool {
        *self == Outcome::Pass
    }
}

/// One line of the suite report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub category: &'static str,
    pub name: String,
    pub outcome: Outcome,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::Pass => write!(f, "PASS {} {}", self.category, self.name),
            Outcome::Fail(why) => write!(f, "FAIL {} {}: {}", self.category, self.name, why),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub waivers: Vec<u16>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.outcome.passed())
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    /// 0 when everything passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_text(&self) -> String {
        let mut out: String = self.checks.iter().map(|c| format!("{c}\n")).collect();
        let failed = self.failures().count();
        out.push_str(&format!(
            "{} checks, {} failed, {} coverage waivers\n",
            self.checks.len(),
            failed,
            self.waivers.len()
        ));
        out
    }
}

/// Reads the waiver list: one rule id per line, `#` comments allowed.
pub fn parse_waivers(text: &str) -> Result<Vec<u16>, String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse().map_err(|_| format!("bad waiver {l}")))
        .collect()
}

/// Consecutive rules of each column chain: the new state of one is the current state of the next.
/// Returns the first break as (cell, row).
pub fn check_chaining(golden: &GoldenTable, table: &RuleTable) -> Result<(), (CellId, u32)> {
    for (col, &c) in golden.cells.iter().enumerate() {
        for pair in golden.rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let ra = table.get(a.1[col].rule);
            let rb = table.get(b.1[col].rule);
            match (ra, rb) {
                (Some(x), Some(y)) if x.next == y.current => {}
                _ => return Err((c, b.0)),
            }
        }
    }
    Ok(())
}

/// Red markers sit exactly on the rules that change the cell's state.
pub fn check_markers(golden: &GoldenTable, table: &RuleTable) -> Result<(), (CellId, u32)> {
    for (r, entries) in &golden.rows {
        for (e, &c) in entries.iter().zip(&golden.cells) {
            match table.get(e.rule) {
                Some(rule) if rule.changes_state() == e.marked => {}
                _ => return Err((c, *r)),
            }
        }
    }
    Ok(())
}

/// Compares a firing log with a table and returns the first mismatch in row-major order.
pub fn first_divergence(golden: &GoldenTable, log: &FiringLog) -> Option<(CellId, u32, u16, u16)> {
    for (r, entries) in &golden.rows {
        for (e, &c) in entries.iter().zip(&golden.cells) {
            let got = log.fired(*r as usize - 1, c).unwrap_or(0);
            if got != e.rule {
                return Some((c, *r, e.rule, got));
            }
        }
    }
    None
}

/// Shipped data plus the ball every structure is built in.
pub struct Harness {
    pub ball: TilingBall,
    pub table: RuleTable,
    pub assets: PathBuf,
    pub store: GoldenStore,
    pub scenarios: Vec<Scenario>,
    pub waivers: Vec<u16>,
    /// Assets used instead of the files under `assets`, keyed by family.
    pub overrides: BTreeMap<String, SolvedAsset>,
}

fn read(path: &Path) -> Result<String, VerifyError> {
    fs::read_to_string(path).map_err(|e| VerifyError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

impl Harness {
    /// Loads rules, tables, scenarios and waivers from an asset root.
    pub fn load(dir: &Path) -> Result<Harness, VerifyError> {
        let table = parse_rules(&read(&dir.join("rules.txt"))?)?;
        Harness::load_with(dir, table, &dir.join("golden"))
    }

    pub fn load_with(dir: &Path, table: RuleTable, golden_dir: &Path) -> Result<Harness, VerifyError> {
        let store = match GoldenStore::load(golden_dir) {
            Ok(s) if !s.tables.is_empty() => s,
            _ => return Err(VerifyError::MissingGolden(golden_dir.display().to_string())),
        };
        let waiver_path = dir.join("coverage-waivers.txt");
        let waivers = if waiver_path.exists() {
            parse_waivers(&read(&waiver_path)?).map_err(|reason| VerifyError::Io {
                path: waiver_path.display().to_string(),
                reason,
            })?
        } else {
            Vec::new()
        };
        Ok(Harness {
            ball: build_ball(STRUCTURE_LEVELS),
            table,
            assets: dir.to_path_buf(),
            store,
            scenarios: load_scenarios(dir)?,
            waivers,
            overrides: BTreeMap::new(),
        })
    }

    /// Replaces the solved assets of the given families.
    pub fn with_assets(mut self, assets: impl IntoIterator<Item = SolvedAsset>) -> Harness {
        for a in assets {
            self.overrides.insert(a.structure.clone(), a);
        }
        self
    }

    pub fn structure(&self, kind: StructureKind) -> Result<StructureInstance, StructureError> {
        match self.overrides.get(kind.family()) {
            Some(a) => build_structure(kind, &self.ball, a),
            None => load_structure(kind, &self.ball, &self.assets),
        }
    }

    /// The scenario replaying `table_name`.
    pub fn binding(&self, table_name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.golden.iter().any(|g| g == table_name))
    }

    pub fn scenario(&self, key: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.key() == key)
    }

    fn replay(&self, scenario: &Scenario) -> Result<(StructureInstance, Vec<Configuration>, FiringLog), StructureError> {
        let inst = self.structure(scenario.kind)?;
        let (frames, log) = simulate(&self.ball, &self.table, &inst, scenario)?;
        Ok((inst, frames, log))
    }

    /// Replays the bound scenario and compares every entry of `golden`.
    pub fn verify_table(&self, golden: &GoldenTable) -> Outcome {
        let Some(sc) = self.binding(&golden.name) else {
            return Outcome::Fail("no scenario replays this table".into());
        };
        let (inst, frames, log) = match self.replay(sc) {
            Ok(x) => x,
            Err(e) => return Outcome::Fail(e.to_string()),
        };
        match first_divergence(golden, &log) {
            None => Outcome::Pass,
            Some((cell, row, expected, got)) => {
                let t = row as usize - 1;
                let context = match frames.get(t) {
                    Some(f) => match oriented_context(&self.ball, f, &inst.orientation, cell) {
                        Ok((cur, ctx)) => format!("{cur} {ctx}"),
                        Err(e) => e.to_string(),
                    },
                    None => "beyond the run".into(),
                };
                Outcome::Fail(
                    Divergence {
                        cell,
                        row,
                        expected,
                        got,
                        context,
                    }
                    .to_string(),
                )
            }
        }
    }

    pub fn verify_table_named(&self, name: &str) -> Result<Outcome, VerifyError> {
        let g = self
            .store
            .tables
            .get(name)
            .ok_or_else(|| VerifyError::UnknownTable(name.to_string()))?;
        Ok(self.verify_table(g))
    }

    pub fn verify_witness(&self, w: &Witness) -> Outcome {
        let Some(sc) = self.scenario(&w.scenario) else {
            return Outcome::Fail(format!("no scenario {}", w.scenario));
        };
        match self.replay(sc) {
            Ok((_, _, log)) => {
                let seq: Vec<u16> = (0..sc.steps).filter_map(|t| log.fired(t, w.cell)).collect();
                if witness_matches(&w.rules, &seq) {
                    Outcome::Pass
                } else {
                    let shown: Vec<String> = compress(&seq).iter().map(|r| r.to_string()).collect();
                    Outcome::Fail(format!("observed {}", shown.join(" ")))
                }
            }
            Err(e) => Outcome::Fail(e.to_string()),
        }
    }

    /// The idle structure stays unchanged for `steps` steps.
    pub fn check_idle(&self, kind: StructureKind, steps: usize) -> Outcome {
        let inst = match self.structure(kind) {
            Ok(i) => i,
            Err(e) => return Outcome::Fail(e.to_string()),
        };
        if !matches!(is_fixed_point(&self.ball, &inst.config, &inst.orientation, &self.table), Ok(true)) {
            return Outcome::Fail("not a fixed point".into());
        }
        match run(&self.ball, &inst.config, &inst.orientation, &self.table, steps, Some(&[])) {
            Ok((fin, _)) if fin == inst.config => Outcome::Pass,
            Ok(_) => Outcome::Fail("configuration drifted".into()),
            Err(e) => Outcome::Fail(e.to_string()),
        }
    }

    /// Outcome of every expectation of a scenario, labelled by its text.
    pub fn check_behaviour(&self, sc: &Scenario) -> Vec<(String, Outcome)> {
        match self.replay(sc) {
            Ok((inst, frames, _)) => check_expectations(&inst, sc, &frames)
                .into_iter()
                .map(|o| {
                    let outcome = if o.passed { Outcome::Pass } else { Outcome::Fail(o.detail) };
                    (o.expectation.to_string(), outcome)
                })
                .collect(),
            Err(e) => vec![("run".into(), Outcome::Fail(e.to_string()))],
        }
    }

    /// Rules fired anywhere in any scenario run. Every cell outside the active
    /// region keeps rule 1, so it counts as soon as one run succeeds.
    pub fn fired_rules(&self) -> BTreeSet<u16> {
        let mut seen = BTreeSet::new();
        for sc in &self.scenarios {
            if let Ok((_, _, log)) = self.replay(sc) {
                seen.insert(1);
                seen.extend(log.steps.iter().flat_map(|e| e.values().copied()));
            }
        }
        seen
    }

    /// Every rule fires somewhere or is waived, and no waived rule fires.
    pub fn check_coverage(&self) -> Outcome {
        let fired = self.fired_rules();
        let waived: BTreeSet<u16> = self.waivers.iter().copied().collect();
        let missing: Vec<String> = self
            .table
            .ids()
            .filter(|id| !fired.contains(id) && !waived.contains(id))
            .map(|id| id.to_string())
            .collect();
        let stale: Vec<String> = waived.intersection(&fired).map(|id| id.to_string()).collect();
        match (missing.is_empty(), stale.is_empty()) {
            (true, true) => Outcome::Pass,
            _ => Outcome::Fail(format!("unexercised [{}] waived but fired [{}]", missing.join(" "), stale.join(" "))),
        }
    }

    /// Runs everything.
    pub fn verify_all(&self) -> SuiteReport {
        let mut checks = Vec::new();
        let mut push = |category, name: String, outcome| checks.push(Check { category, name, outcome });
        for (name, g) in &self.store.tables {
            let chain = match check_chaining(g, &self.table) {
                Ok(()) => Outcome::Pass,
                Err((c, r)) => Outcome::Fail(format!("{c} breaks at row {r}")),
            };
            push("chaining", name.clone(), chain);
            let marks = match check_markers(g, &self.table) {
                Ok(()) => Outcome::Pass,
                Err((c, r)) => Outcome::Fail(format!("marker disagrees at {c} row {r}")),
            };
            push("markers", name.clone(), marks);
            push("table", name.clone(), self.verify_table(g));
        }
        for w in &self.store.witnesses {
            push("witness", format!("{} {} {}", w.source, w.scenario, w.cell), self.verify_witness(w));
        }
        for kind in StructureKind::all() {
            push("idle", kind.to_string(), self.check_idle(kind, IDLE_STEPS));
        }
        for sc in &self.scenarios {
            for (text, outcome) in self.check_behaviour(sc) {
                push("expect", format!("{} {}", sc.key(), text), outcome);
            }
        }
        push("coverage", format!("{} rules", self.table.len()), self.check_coverage());
        SuiteReport {
            checks,
            waivers: self.waivers.clone(),
        }
    }

    /// Per table: pass or fail, for quick summaries.
    pub fn table_outcomes(&self) -> BTreeMap<String, Outcome> {
        self.store
            .tables
            .iter()
            .map(|(n, g)| (n.clone(), self.verify_table(g)))
            .collect()
    }
}
