//! Rule tables.
//!
//! A rule reads `ID CUR CTX8 NEXT`, e.g. `24 B WBWWWBWB W`: a cell in state `CUR` whose
//! neighbours on sides 1..8 are `CTX8` becomes `NEXT`. Matching is positional; no
//! rotation is ever applied.

use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum State {
    W,
    B,
}

impl State {
    pub fn from_char(c: char) -> Option<State> {
        match c {
            'W' => Some(State::W),
            'B' => Some(State::B),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            State::W => 'W',
            State::B => 'B',
        }
    }

    pub fn flip(self) -> State {
        match self {
            State::W => State::B,
            State::B => State::W,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Neighbour states on sides 1..8, packed as bits (bit `k` is side `k+1`, set for B).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(pub u8);

impl Context {
    pub const WHITE: Context = Context(0);

    pub fn from_states(states: &[State; 8]) -> Context {
        let mut bits = 0u8;
        for (k, s) in states.iter().enumerate() {
            if *s == State::B {
                bits |= 1 << k;
            }
        }
        Context(bits)
    }

    /// Side numbering is 1-based.
    pub fn side(self, side: usize) -> State {
        if self.0 & (1 << (side - 1)) != 0 {
            State::B
        } else {
            State::W
        }
    }

    pub fn states(self) -> [State; 8] {
        std::array::from_fn(|k| self.side(k + 1))
    }

    pub fn is_uniform(self) -> bool {
        self.0 == 0 || self.0 == 0xff
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.states() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Context {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let states: Vec<State> = s.chars().map(State::from_char).collect::<Option<_>>().ok_or(())?;
        let arr: [State; 8] = states.try_into().map_err(|_| ())?;
        Ok(Context::from_states(&arr))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub id: u16,
    pub current: State,
    pub context: Context,
    pub next: State,
}

impl Rule {
    pub fn changes_state(&self) -> bool {
        self.current != self.next
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.id, self.current, self.context, self.next)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}: malformed rule `{text}`: {reason}")]
    MalformedRule {
        line: usize,
        text: String,
        reason: &'static str,
    },
    #[error("line {line}: rule id {id} already defined")]
    DuplicateId { line: usize, id: u16 },
}

#[derive(Clone, Debug, Default)]
pub struct RuleTable {
    rules: Vec<Rule>,
    by_id: HashMap<u16, usize>,
    by_key: HashMap<(State, Context), usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoherenceReport {
    /// Pairs of rule ids with the same left-hand side and different outcomes.
    pub conflicts: Vec<(u16, u16)>,
    /// Pairs of rule ids that are identical apart from the id.
    pub exact_duplicates: Vec<(u16, u16)>,
}

impl CoherenceReport {
    pub fn is_coherent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

fn parse_line(line_no: usize, line: &str) -> Result<Rule, RuleError> {
    let bad = |reason| RuleError::MalformedRule {
        line: line_no,
        text: line.to_string(),
        reason,
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad("expected four fields"));
    }
    let id: u16 = fields[0].parse().map_err(|_| bad("id is not a number"))?;
    if id == 0 {
        return Err(bad("ids start at 1"));
    }
    let one = |s: &str| {
        let mut it = s.chars();
        match (it.next().and_then(State::from_char), it.next()) {
            (Some(st), None) => Ok(st),
            _ => Err(bad("state must be W or B")),
        }
    };
    let current = one(fields[1])?;
    let next = one(fields[3])?;
    if fields[2].chars().count() != 8 {
        return Err(bad("context must have eight states"));
    }
    let context: Context = fields[2].parse().map_err(|_| bad("context must use W and B only"))?;
    Ok(Rule {
        id,
        current,
        context,
        next,
    })
}

/// Parses a rule file; blank lines and `#` comments are skipped.
pub fn parse_rules(text: &str) -> Result<RuleTable, RuleError> {
    let mut table = RuleTable::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rule = parse_line(i + 1, line)?;
        if table.by_id.contains_key(&rule.id) {
            return Err(RuleError::DuplicateId {
                line: i + 1,
                id: rule.id,
            });
        }
        table.push(rule);
    }
    Ok(table)
}

impl RuleTable {
    pub fn new() -> RuleTable {
        RuleTable::default()
    }

    /// Appends a rule. A rule whose left-hand side is already present is kept in the
    /// list (so that `check_coherence` can see it) but never wins a lookup.
    pub fn push(&mut self, rule: Rule) {
        let i = self.rules.len();
        self.rules.push(rule);
        self.by_id.entry(rule.id).or_insert(i);
        self.by_key.entry((rule.current, rule.context)).or_insert(i);
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, id: u16) -> Option<&Rule> {
        self.by_id.get(&id).map(|&i| &self.rules[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = u16> + '_ {
        self.rules.iter().map(|r| r.id)
    }

    /// The rule applying to a cell in `current` with the given neighbourhood.
    pub fn match_rule(&self, current: State, context: Context) -> Option<&Rule> {
        self.by_key.get(&(current, context)).map(|&i| &self.rules[i])
    }

    /// A copy of the table without the rule `id`.
    pub fn without(&self, id: u16) -> RuleTable {
        let mut t = RuleTable::new();
        for r in self.rules.iter().filter(|r| r.id != id) {
            t.push(*r);
        }
        t
    }

    pub fn check_coherence(&self) -> CoherenceReport {
        let mut seen: HashMap<(State, Context), Vec<&Rule>> = HashMap::new();
        let mut report = CoherenceReport::default();
        for r in &self.rules {
            let prior = seen.entry((r.current, r.context)).or_default();
            for p in prior.iter() {
                if p.next == r.next {
                    report.exact_duplicates.push((p.id, r.id));
                } else {
                    report.conflicts.push((p.id, r.id));
                }
            }
            prior.push(r);
        }
        report
    }

    /// Writes the table back in file format, one rule per line.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.rules.len() * 20);
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

pub fn check_coherence(table: &RuleTable) -> CoherenceReport {
    table.check_coherence()
}

pub fn match_rule(table: &RuleTable, current: State, context: Context) -> Option<&Rule> {
    table.match_rule(current, context)
}

/// Id ranges of the rule families, in file order.
pub const RULE_FAMILIES: [(&str, u16, u16); 7] = [
    ("simple track", 1, 43),
    ("double track", 44, 70),
    ("fixed switch", 71, 99),
    ("doubler and fork", 100, 120),
    ("selector", 121, 160),
    ("controller", 161, 180),
    ("sensor", 181, 191),
];
