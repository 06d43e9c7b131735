//! Finite balls of the {8,3} tessellation.
//!
//! Cells are numbered as in the usual sector-tree scheme: the central tile is `0(0)`,
//! its neighbour across side `i` is `1(i)`, and inside each sector the tiles are numbered
//! level by level, left to right. A tile of kind W has four sons (B, W, W, W) and a tile
//! of kind B has three (B, W, W).
//!
//! Every interior cell gets a canonical counterclockwise list of its eight neighbours.
//! For `0(0)` the list is `1(1)..1(8)`. For any other tile the list starts with its sons
//! (the cells of the next level it shares a side with), then the next tile on its own
//! level, then its parent(s), then the previous tile on its level. This puts `0(0)` at
//! position 7 of every root `1(i)`, as required.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

mod export;

pub use export::adjacency_text;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TilingError {
    #[error("cell {0} has no full neighbourhood in this ball")]
    BoundaryCell(CellId),
    #[error("cell {0} is not part of this ball")]
    UnknownCell(CellId),
    #[error("malformed cell label `{0}`")]
    MalformedLabel(String),
}

/// A tile address `index(sector)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub sector: u8,
    pub index: u32,
}

impl CellId {
    pub const CENTER: CellId = CellId { sector: 0, index: 0 };

    /// Builds a cell id, checking the `sector=0 <=> index=0` invariant.
    pub fn new(sector: u8, index: u32) -> Option<CellId> {
        let ok = match sector {
            0 => index == 0,
            1..=8 => index >= 1,
            _ => false,
        };
        ok.then_some(CellId { sector, index })
    }

    /// The root `1(i)` of sector `i`.
    pub fn root(sector: u8) -> CellId {
        CellId { sector, index: 1 }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.index, self.sector)
    }
}

impl FromStr for CellId {
    type Err = TilingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_label(s)
    }
}

/// Parses `index(sector)`.
pub fn parse_label(text: &str) -> Result<CellId, TilingError> {
    let bad = || TilingError::MalformedLabel(text.to_string());
    let inner = text.strip_suffix(')').ok_or_else(bad)?;
    let (idx, sec) = inner.split_once('(').ok_or_else(bad)?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(idx) || sec.len() != 1 || !digits(sec) {
        return Err(bad());
    }
    // no leading zeros, so that formatting round-trips
    if idx.len() > 1 && idx.starts_with('0') {
        return Err(bad());
    }
    let index: u32 = idx.parse().map_err(|_| bad())?;
    let sector: u8 = sec.parse().map_err(|_| bad())?;
    CellId::new(sector, index).ok_or_else(bad)
}

pub fn format_label(c: CellId) -> String {
    c.to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    W,
    B,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub kind: NodeKind,
    pub level: u32,
    /// Parents on the previous level; one for W nodes, two for B nodes (the later one first).
    pub parents: Vec<CellId>,
    pub sons: Vec<CellId>,
}

/// A ball of radius `levels` around `0(0)`, counted in sector-tree levels.
#[derive(Clone, Debug)]
pub struct TilingBall {
    levels: u32,
    cells: Vec<CellId>,
    index: HashMap<CellId, usize>,
    adj: Vec<[Option<u32>; 8]>,
    nodes: Vec<TreeNode>,
}

pub const MAX_LEVELS: u32 = 12;

struct RingInfo {
    inner: Vec<usize>,
    prev: usize,
    next: usize,
    kind: NodeKind,
}

struct Node {
    kind: NodeKind,
    level: u32,
    parents: Vec<usize>,
    sons: Vec<usize>,
}

/// Builds the ball. Levels above [`MAX_LEVELS`] are clamped.
///
/// Construction walks rings: ring `n` is the cyclic, counterclockwise sequence of the
/// tiles of level `n` in all sectors. Each tile of the ring owns all its outer
/// neighbours but the last one, which it shares with the next tile of the ring.
pub fn build_ball(levels: u32) -> TilingBall {
    let levels = levels.min(MAX_LEVELS);
    let mut cells = vec![CellId::CENTER];
    let mut adj: Vec<[Option<u32>; 8]> = vec![[None; 8]];
    let mut nodes = vec![Node {
        kind: NodeKind::W,
        level: 0,
        parents: vec![],
        sons: vec![],
    }];
    let mut counters = [1u32; 9];

    let mut ring: Vec<usize> = Vec::with_capacity(8);
    for s in 1..=8u8 {
        ring.push(cells.len());
        cells.push(CellId::root(s));
        adj.push([None; 8]);
        nodes.push(Node {
            kind: NodeKind::W,
            level: 0,
            parents: vec![0],
            sons: vec![],
        });
    }
    for (k, &r) in ring.iter().enumerate() {
        adj[0][k] = Some(r as u32);
    }
    let mut info: Vec<RingInfo> = (0..8)
        .map(|k| RingInfo {
            inner: vec![0],
            prev: ring[(k + 7) % 8],
            next: ring[(k + 1) % 8],
            kind: NodeKind::W,
        })
        .collect();

    for lvl in 0..=levels {
        let n = ring.len();
        let last = lvl == levels;
        let mut outers: Vec<Vec<Option<usize>>> = info
            .iter()
            .map(|i| vec![None; if i.kind == NodeKind::W { 5 } else { 4 }])
            .collect();
        let mut new_ring = Vec::new();
        let mut owner = Vec::new();
        if !last {
            for (k, &c) in ring.iter().enumerate() {
                let sector = cells[c].sector;
                let own = outers[k].len() - 1;
                for j in 0..own {
                    counters[sector as usize] += 1;
                    let id = cells.len();
                    cells.push(CellId {
                        sector,
                        index: counters[sector as usize],
                    });
                    adj.push([None; 8]);
                    nodes.push(Node {
                        kind: if j == 0 { NodeKind::B } else { NodeKind::W },
                        level: lvl + 1,
                        parents: vec![],
                        sons: vec![],
                    });
                    nodes[c].sons.push(id);
                    outers[k][j] = Some(id);
                    new_ring.push(id);
                    owner.push((k, j));
                }
            }
            for k in 0..n {
                let shared = outers[(k + 1) % n][0];
                let l = outers[k].len();
                outers[k][l - 1] = shared;
            }
        }
        for (k, &c) in ring.iter().enumerate() {
            let i = &info[k];
            let mut list: Vec<Option<usize>> = outers[k].clone();
            list.push(Some(i.next));
            list.extend(i.inner.iter().map(|&p| Some(p)));
            list.push(Some(i.prev));
            debug_assert_eq!(list.len(), 8);
            for (slot, v) in list.into_iter().enumerate() {
                adj[c][slot] = v.map(|x| x as u32);
            }
        }
        if last {
            break;
        }
        let m = new_ring.len();
        let mut new_info = Vec::with_capacity(m);
        for (k, &id) in new_ring.iter().enumerate() {
            let (pk, j) = owner[k];
            let par = ring[pk];
            let (inner, kind) = if j == 0 {
                (vec![par, ring[(pk + n - 1) % n]], NodeKind::B)
            } else {
                (vec![par], NodeKind::W)
            };
            nodes[id].parents = inner.clone();
            new_info.push(RingInfo {
                inner,
                prev: new_ring[(k + m - 1) % m],
                next: new_ring[(k + 1) % m],
                kind,
            });
        }
        info = new_info;
        ring = new_ring;
    }

    let index = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let nodes = nodes
        .into_iter()
        .map(|n| TreeNode {
            kind: n.kind,
            level: n.level,
            parents: n.parents.iter().map(|&p| cells[p]).collect(),
            sons: n.sons.iter().map(|&p| cells[p]).collect(),
        })
        .collect();
    TilingBall {
        levels,
        cells,
        index,
        adj,
        nodes,
    }
}

impl TilingBall {
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All cells, in construction order (centre, then ring by ring).
    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.index.contains_key(&c)
    }

    pub fn position(&self, c: CellId) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn node(&self, c: CellId) -> Option<&TreeNode> {
        self.position(c).map(|i| &self.nodes[i])
    }

    /// Tree level of a cell: 0 for `0(0)` and the roots, `n` for ring `n`.
    pub fn level(&self, c: CellId) -> Option<u32> {
        self.node(c).map(|n| n.level)
    }

    /// Cells on the outermost level.
    pub fn is_boundary(&self, c: CellId) -> bool {
        self.position(c)
            .map(|i| self.adj[i].iter().any(Option::is_none))
            .unwrap_or(false)
    }

    pub fn boundary(&self) -> Vec<CellId> {
        self.cells
            .iter()
            .copied()
            .filter(|&c| self.is_boundary(c))
            .collect()
    }

    /// Raw neighbour slots; `None` marks a neighbour outside the ball.
    pub fn neighbor_slots(&self, c: CellId) -> Result<[Option<CellId>; 8], TilingError> {
        let i = self.position(c).ok_or(TilingError::UnknownCell(c))?;
        Ok(self.adj[i].map(|s| s.map(|j| self.cells[j as usize])))
    }

    /// The eight neighbours of an interior cell, counterclockwise.
    pub fn neighbors(&self, c: CellId) -> Result<[CellId; 8], TilingError> {
        let slots = self.neighbor_slots(c)?;
        let mut out = [CellId::CENTER; 8];
        for (o, s) in out.iter_mut().zip(slots) {
            *o = s.ok_or(TilingError::BoundaryCell(c))?;
        }
        Ok(out)
    }

    /// Position of `n` in the canonical neighbour list of `c`.
    pub fn side_of(&self, c: CellId, n: CellId) -> Option<usize> {
        let slots = self.neighbor_slots(c).ok()?;
        slots.iter().position(|s| *s == Some(n))
    }

    pub fn are_adjacent(&self, a: CellId, b: CellId) -> bool {
        self.side_of(a, b).is_some()
    }

    /// Number of cells per level in one sector.
    pub fn sector_level_sizes(&self, sector: u8) -> Vec<usize> {
        let mut sizes = vec![0usize; self.levels as usize + 1];
        for (c, n) in self.cells.iter().zip(&self.nodes) {
            if c.sector == sector {
                sizes[n.level as usize] += 1;
            }
        }
        sizes
    }

    /// Graph distance from the set `from`, up to `radius`.
    pub fn ball_around(&self, from: &[CellId], radius: u32) -> Vec<CellId> {
        let mut seen: HashMap<CellId, u32> = from.iter().map(|&c| (c, 0)).collect();
        let mut frontier: Vec<CellId> = from.to_vec();
        for d in 1..=radius {
            let mut next = Vec::new();
            for c in frontier {
                if let Ok(slots) = self.neighbor_slots(c) {
                    for n in slots.into_iter().flatten() {
                        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(n) {
                            e.insert(d);
                            next.push(n);
                        }
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<CellId> = seen.into_keys().collect();
        out.sort();
        out
    }
}

/// Per-sector level sizes from the recurrence `L0=1, L1=4, L(n+1)=4L(n)-L(n-1)`.
pub fn level_size_recurrence(levels: u32) -> Vec<usize> {
    let mut out = vec![1usize];
    if levels >= 1 {
        out.push(4);
    }
    while out.len() <= levels as usize {
        let n = out.len();
        out.push(4 * out[n - 1] - out[n - 2]);
    }
    out
}
