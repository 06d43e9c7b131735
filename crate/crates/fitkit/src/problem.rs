//! The known space-time field of a structure, gathered over all its scenarios.

use std::collections::{BTreeMap, BTreeSet};

use hypeca_rules::{Context, RuleTable, State};
use hypeca_structures::golden::GoldenStore;
use hypeca_structures::{covered, layout, Hint, Scenario};
use hypeca_tiling::{CellId, TilingBall};

use crate::timeline::reconstruct_timeline;
use crate::FitError;

/// What is known of one scenario run.
#[derive(Clone, Debug)]
pub(crate) struct Field {
    pub key: String,
    pub steps: usize,
    /// Per cell, state at each time 0..=steps where known.
    pub known: BTreeMap<CellId, Vec<Option<State>>>,
    /// Per cell, rule fired at each step where a table records it.
    pub tracked: BTreeMap<CellId, Vec<Option<u16>>>,
    pub colour: Option<(CellId, State)>,
    pub witness: BTreeMap<CellId, Vec<u16>>,
    /// Cells carrying an injected locomotive at time 0.
    pub injected: BTreeSet<CellId>,
}

impl Field {
    fn build(sc: &Scenario, store: &GoldenStore, table: &RuleTable) -> Result<Field, FitError> {
        let lay = layout(sc.kind);
        let mut timelines = Vec::new();
        for tag in &sc.golden {
            let g = store.tables.get(tag).ok_or_else(|| FitError::MissingGolden(tag.clone()))?;
            timelines.push(reconstruct_timeline(g, table)?);
        }
        let steps = timelines.iter().map(|t| t.end()).fold(sc.steps, usize::max);
        let path = |name: &str| {
            lay.path(name)
                .map(|p| p.to_vec())
                .ok_or_else(|| FitError::UnknownPath(name.to_string()))
        };
        let mut motions = Vec::new();
        let mut injected = BTreeSet::new();
        for inj in &sc.injections {
            let p = path(&inj.path)?;
            for i in covered(inj.start, inj.kind.length(), 0, p.len()) {
                injected.insert(p[i]);
            }
            motions.push((p, inj.start, inj.kind.length()));
        }
        for h in &sc.hints {
            if let Hint::Motion { path: name, start, double } = h {
                motions.push((path(name)?, *start, if *double { 2 } else { 1 }));
            }
        }
        let mut known: BTreeMap<CellId, Vec<Option<State>>> = BTreeMap::new();
        for (p, start, len) in &motions {
            for t in 0..=steps {
                let on = covered(*start, *len, t, p.len());
                for (i, &c) in p.iter().enumerate() {
                    let slot = &mut known.entry(c).or_insert_with(|| vec![None; steps + 1])[t];
                    if on.contains(&i) {
                        *slot = Some(State::B);
                    } else if slot.is_none() {
                        *slot = Some(State::W);
                    }
                }
            }
        }
        for h in &sc.hints {
            match h {
                Hint::Visit { cell, time } => {
                    let v = (0..=steps).map(|t| Some(if t == *time { State::B } else { State::W })).collect();
                    known.insert(*cell, v);
                }
                Hint::Timeline { cell, states } => {
                    let v = (0..=steps).map(|t| states.get(t).copied()).collect();
                    known.insert(*cell, v);
                }
                Hint::Motion { .. } => {}
            }
        }
        let mut tracked: BTreeMap<CellId, Vec<Option<u16>>> = BTreeMap::new();
        for tl in &timelines {
            for &c in &tl.cells {
                let k = known.entry(c).or_insert_with(|| vec![None; steps + 1]);
                for t in tl.start..=tl.end() {
                    k[t] = tl.state(c, t);
                }
                let r = tracked.entry(c).or_insert_with(|| vec![None; steps]);
                for t in tl.start..tl.end() {
                    r[t] = tl.rule(c, t);
                }
            }
        }
        let key = sc.key();
        let witness = store.witnesses_for(&key).map(|w| (w.cell, w.rules.clone())).collect();
        Ok(Field {
            key,
            steps,
            known,
            tracked,
            colour: lay.colour_cell.zip(sc.kind.colour()),
            witness,
            injected,
        })
    }
}

/// Rule lookup by (current, context), including the implicit quiescent rule.
pub(crate) struct Lookup(Vec<Option<(u16, State)>>);

impl Lookup {
    fn new(table: &RuleTable) -> Lookup {
        let mut v = vec![None; 512];
        for cur in [State::W, State::B] {
            for ctx in 0..=255u8 {
                let idx = (cur == State::B) as usize * 256 + ctx as usize;
                v[idx] = table.match_rule(cur, Context(ctx)).map(|r| (r.id, r.next));
            }
        }
        if v[0].is_none() {
            v[0] = Some((1, State::W));
        }
        Lookup(v)
    }

    pub fn get(&self, cur: State, ctx: u8) -> Option<(u16, State)> {
        self.0[(cur == State::B) as usize * 256 + ctx as usize]
    }
}

/// A structure's fitting problem: known field, prose cells and the unknown static cells.
pub struct FitProblem<'a> {
    pub family: String,
    pub(crate) ball: &'a TilingBall,
    pub(crate) fields: Vec<Field>,
    pub(crate) fixed: BTreeMap<CellId, State>,
    pub(crate) idle: BTreeMap<CellId, State>,
    pub(crate) colour_cell: Option<CellId>,
    pub(crate) unknowns: Vec<CellId>,
    pub(crate) relevant: Vec<CellId>,
    pub(crate) lookup: Lookup,
}

impl<'a> FitProblem<'a> {
    /// Gathers every scenario of `family` with its tables and witnesses.
    pub fn new(
        ball: &'a TilingBall,
        table: &RuleTable,
        family: &str,
        scenarios: &[Scenario],
        store: &GoldenStore,
    ) -> Result<FitProblem<'a>, FitError> {
        let mine: Vec<&Scenario> = scenarios.iter().filter(|s| s.kind.family() == family).collect();
        if mine.is_empty() {
            return Err(FitError::NoScenarios(family.to_string()));
        }
        let lay = layout(mine[0].kind);
        let fields = mine
            .iter()
            .map(|s| Field::build(s, store, table))
            .collect::<Result<Vec<_>, _>>()?;
        let fixed: BTreeMap<CellId, State> = lay.black.iter().map(|&c| (c, State::B)).collect();
        let colour_cell = lay.colour_cell;
        let mut idle: BTreeMap<CellId, State> = BTreeMap::new();
        for f in &fields {
            for (&c, seq) in &f.known {
                if Some(c) == colour_cell || f.injected.contains(&c) {
                    continue;
                }
                if let Some(s) = seq[0] {
                    if *idle.entry(c).or_insert(s) != s || fixed.get(&c).is_some_and(|&x| x != s) {
                        return Err(FitError::StaticConflict { cell: c });
                    }
                }
            }
        }
        for f in &fields {
            for &c in f.known.keys() {
                if Some(c) != colour_cell {
                    idle.entry(c).or_insert(State::W);
                }
            }
        }
        let dynamic: Vec<CellId> = idle.keys().copied().chain(colour_cell).collect();
        for &c in &dynamic {
            if !ball.contains(c) {
                return Err(FitError::OutsideBall(c));
            }
        }
        let unknowns: Vec<CellId> = ball
            .ball_around(&dynamic, 1)
            .into_iter()
            .filter(|c| !idle.contains_key(c) && !fixed.contains_key(c) && Some(*c) != colour_cell)
            .collect();
        let mut seeds: Vec<CellId> = dynamic.clone();
        seeds.extend(&unknowns);
        seeds.extend(fixed.keys());
        let relevant = ball.ball_around(&seeds, 1);
        Ok(FitProblem {
            family: family.to_string(),
            ball,
            fields,
            fixed,
            idle,
            colour_cell,
            unknowns,
            relevant,
            lookup: Lookup::new(table),
        })
    }

    /// Static cells whose state the fitter has to decide.
    pub fn unknowns(&self) -> &[CellId] {
        &self.unknowns
    }

    /// Cells whose update is checked against the field.
    pub fn relevant(&self) -> &[CellId] {
        &self.relevant
    }

    /// Cells that move or are pinned by a table, hint or injection, with their idle state.
    pub fn idle_states(&self) -> &BTreeMap<CellId, State> {
        &self.idle
    }

    pub fn scenario_keys(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.key.as_str()).collect()
    }

    /// State at rest of a cell that is not an unknown.
    pub(crate) fn static_state(&self, f: &Field, c: CellId) -> Option<State> {
        if let Some(&s) = self.fixed.get(&c) {
            return Some(s);
        }
        if let Some((cc, s)) = f.colour {
            if cc == c {
                return Some(s);
            }
        }
        if Some(c) == self.colour_cell {
            return Some(State::W);
        }
        self.idle.get(&c).copied()
    }
}
