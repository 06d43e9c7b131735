//! Joint search over unknown static cells and per-cell orientations.

use std::collections::{BTreeMap, BTreeSet};

use hypeca_rules::State;
use hypeca_structures::golden::witness_matches;
use hypeca_structures::SolvedAsset;
use hypeca_tiling::CellId;

use crate::problem::FitProblem;
use crate::FitError;

const W: u8 = 0;
const B: u8 = 1;

/// Closed neighbourhood of a cell encoded per scenario and time: index 0 is the cell,
/// 1..=8 its canonical neighbours. 0 = W, 1 = B, 2 + k = local unknown k.
struct Codes {
    vars: Vec<usize>,
    fields: Vec<Vec<[u8; 9]>>,
}

fn enc(s: State) -> u8 {
    match s {
        State::W => W,
        State::B => B,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticSolution {
    pub statics: BTreeMap<CellId, State>,
    /// White unknowns that could be black without breaking any trace.
    pub unconstrained: BTreeSet<CellId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationSolution {
    /// Feasible offsets of every cell that reads a mixed neighbourhood at some time.
    pub feasible: BTreeMap<CellId, Vec<u8>>,
    /// Smallest feasible offset.
    pub chosen: BTreeMap<CellId, u8>,
}

impl OrientationSolution {
    pub fn ambiguous(&self) -> impl Iterator<Item = (CellId, &[u8])> + '_ {
        self.feasible.iter().filter(|(_, v)| v.len() > 1).map(|(c, v)| (*c, v.as_slice()))
    }
}

struct CellTable {
    cell: CellId,
    vars: Vec<usize>,
    /// Distinct assignments of `vars` admitting at least one offset.
    patterns: Vec<u32>,
}

impl<'a> FitProblem<'a> {
    fn codes(&self, c: CellId, statics: Option<&BTreeMap<CellId, State>>) -> Codes {
        let slots = self.ball.neighbor_slots(c).expect("relevant cells lie in the ball");
        let mut around = [Some(c); 9];
        around[1..].copy_from_slice(&slots);
        let mut vars: Vec<usize> = Vec::new();
        let index: BTreeMap<CellId, usize> = self.unknowns.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        if statics.is_none() {
            for x in around.iter().flatten() {
                if let Some(&i) = index.get(x) {
                    if !vars.contains(&i) {
                        vars.push(i);
                    }
                }
            }
        }
        let fields = self
            .fields
            .iter()
            .map(|f| {
                (0..=f.steps)
                    .map(|t| {
                        around.map(|x| {
                            let Some(x) = x else { return W };
                            if let Some(Some(s)) = f.known.get(&x).map(|k| k[t]) {
                                return enc(s);
                            }
                            if let Some(&i) = index.get(&x) {
                                return match statics {
                                    Some(st) => enc(st.get(&x).copied().unwrap_or(State::W)),
                                    None => 2 + vars.iter().position(|&v| v == i).unwrap() as u8,
                                };
                            }
                            self.static_state(f, x).map_or(W, enc)
                        })
                    })
                    .collect()
            })
            .collect();
        Codes { vars, fields }
    }

    /// Offsets (as a bit set) under which `c` reproduces every scenario, given values `bits` of its unknowns.
    fn feasible(&self, c: CellId, codes: &Codes, bits: u32) -> u8 {
        let mut ok = 0xffu8;
        let val = |code: u8| if code < 2 { code } else { ((bits >> (code - 2)) & 1) as u8 };
        for (f, frames) in self.fields.iter().zip(&codes.fields) {
            let own: Vec<State> = frames.iter().map(|a| if val(a[0]) == B { State::B } else { State::W }).collect();
            let masks: Vec<u8> = frames
                .iter()
                .map(|a| (0..8).fold(0u8, |m, k| m | (val(a[k + 1]) << k)))
                .collect();
            let tracked = f.tracked.get(&c);
            let witness = f.witness.get(&c);
            for o in 0..8u32 {
                if ok & (1 << o) == 0 {
                    continue;
                }
                let mut seq = Vec::new();
                let mut good = true;
                for t in 0..f.steps {
                    let Some((id, next)) = self.lookup.get(own[t], masks[t].rotate_right(o)) else {
                        good = false;
                        break;
                    };
                    if next != own[t + 1] || tracked.and_then(|r| r[t]).is_some_and(|g| g != id) {
                        good = false;
                        break;
                    }
                    seq.push(id);
                }
                if good {
                    if let Some(w) = witness {
                        good = witness_matches(w, &seq);
                    }
                }
                if !good {
                    ok &= !(1 << o);
                }
            }
            if ok == 0 {
                break;
            }
        }
        ok
    }

    fn table(&self, c: CellId) -> CellTable {
        let codes = self.codes(c, None);
        let mut patterns = Vec::new();
        for bits in 0..(1u32 << codes.vars.len()) {
            if self.feasible(c, &codes, bits) != 0 {
                patterns.push(bits);
            }
        }
        CellTable {
            cell: c,
            vars: codes.vars,
            patterns,
        }
    }

    /// Decides every unknown static cell: depth-first over the unknowns in label order,
    /// white before black, keeping every touched cell satisfiable.
    pub fn infer_static_neighborhood(&self) -> Result<StaticSolution, FitError> {
        let tables: Vec<CellTable> = self.relevant.iter().map(|&c| self.table(c)).collect();
        if let Some(t) = tables.iter().find(|t| t.patterns.is_empty()) {
            return Err(FitError::InfeasibleOrientation { cell: t.cell });
        }
        let n = self.unknowns.len();
        let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ti, t) in tables.iter().enumerate() {
            for &v in &t.vars {
                touching[v].push(ti);
            }
        }
        let consistent = |t: &CellTable, assign: &[Option<bool>]| {
            let (mut mask, mut vals) = (0u32, 0u32);
            for (k, &v) in t.vars.iter().enumerate() {
                if let Some(b) = assign[v] {
                    mask |= 1 << k;
                    vals |= (b as u32) << k;
                }
            }
            t.patterns.iter().any(|p| p & mask == vals)
        };
        let mut assign: Vec<Option<bool>> = vec![None; n];
        let mut choice = vec![0u8; n];
        let mut depth = 0usize;
        let mut deepest = 0usize;
        // iterative backtracking; choice[d] counts the values already tried at depth d
        while depth < n {
            deepest = deepest.max(depth);
            if choice[depth] == 2 {
                choice[depth] = 0;
                assign[depth] = None;
                if depth == 0 {
                    return Err(FitError::StaticConflict {
                        cell: self.unknowns[deepest],
                    });
                }
                depth -= 1;
                continue;
            }
            assign[depth] = Some(choice[depth] == 1);
            choice[depth] += 1;
            if touching[depth].iter().all(|&ti| consistent(&tables[ti], &assign)) {
                depth += 1;
            }
        }
        let values: Vec<bool> = assign.iter().map(|a| a.unwrap()).collect();
        let mut unconstrained = BTreeSet::new();
        let mut flipped: Vec<Option<bool>> = values.iter().map(|&b| Some(b)).collect();
        for v in 0..n {
            if values[v] {
                continue;
            }
            flipped[v] = Some(true);
            if touching[v].iter().all(|&ti| consistent(&tables[ti], &flipped)) {
                unconstrained.insert(self.unknowns[v]);
            }
            flipped[v] = Some(false);
        }
        let statics = self
            .unknowns
            .iter()
            .zip(values)
            .map(|(&c, b)| (c, if b { State::B } else { State::W }))
            .collect();
        Ok(StaticSolution { statics, unconstrained })
    }

    /// With every static cell decided the field is complete, so each cell's
    /// orientation is fitted on its own.
    pub fn fit_orientations(&self, statics: &StaticSolution) -> Result<OrientationSolution, FitError> {
        let mut feasible = BTreeMap::new();
        let mut chosen = BTreeMap::new();
        for &c in &self.relevant {
            let codes = self.codes(c, Some(&statics.statics));
            let mixed = codes.fields.iter().flatten().any(|a| {
                let m = (0..8).fold(0u8, |m, k| m | (a[k + 1] << k));
                m != 0 && m != 0xff
            });
            let ok = self.feasible(c, &codes, 0);
            if ok == 0 {
                return Err(FitError::InfeasibleOrientation { cell: c });
            }
            if mixed {
                let offs: Vec<u8> = (0..8).filter(|o| ok & (1 << o) != 0).collect();
                chosen.insert(c, offs[0]);
                feasible.insert(c, offs);
            }
        }
        Ok(OrientationSolution { feasible, chosen })
    }

    /// The idle configuration and orientations in asset form.
    pub fn assemble_solved_asset(&self, statics: &StaticSolution, orient: &OrientationSolution) -> SolvedAsset {
        let side = |c: CellId, o: u8| self.ball.neighbor_slots(c).unwrap()[o as usize].expect("oriented cells are interior");
        let mut asset = SolvedAsset {
            structure: self.family.clone(),
            ..SolvedAsset::default()
        };
        let black = self
            .fixed
            .iter()
            .chain(&self.idle)
            .chain(&statics.statics)
            .filter(|(_, s)| **s == State::B)
            .map(|(c, _)| *c);
        asset.black.extend(black);
        for (&c, &o) in &orient.chosen {
            asset.orient.insert(c, side(c, o));
        }
        for (c, offs) in orient.ambiguous() {
            asset.ambiguous.insert(c, offs.iter().map(|&o| side(c, o)).collect());
        }
        asset.unconstrained = statics.unconstrained.clone();
        asset
    }
}
