//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use hypeca_engine::Configuration;
use hypeca_render::{layout_ball, render_frame};
use hypeca_rules::parse_rules;
use hypeca_structures::{assets_dir, simulate, StructureKind};
use hypeca_tiling::{build_ball, level_size_recurrence, CellId};
use hypeca_verify::{check_chaining, check_markers, first_divergence, Harness, Outcome, IDLE_STEPS};

const RULES_BUDGET: Duration = Duration::from_millis(100);
const TILING_BUDGET: Duration = Duration::from_secs(1);
const TRACES_BUDGET: Duration = Duration::from_secs(5);

struct Line {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Line {
    Line {
        pass,
        detail: detail.into(),
    }
}

fn timed(budget: Option<Duration>, f: impl FnOnce() -> Line) -> Line {
    let start = Instant::now();
    let mut line = f();
    let took = start.elapsed();
    match budget {
        Some(b) => {
            line.pass &= took < b;
            line.detail = format!("{}; {:.3}s (limit {:.1}s)", line.detail, took.as_secs_f64(), b.as_secs_f64());
        }
        None => line.detail = format!("{}; {:.3}s", line.detail, took.as_secs_f64()),
    }
    line
}

fn rules_integrity() -> Line {
    let text = std::fs::read_to_string(assets_dir().join("rules.txt")).unwrap();
    let t = match parse_rules(&text) {
        Ok(t) => t,
        Err(e) => return ok(false, e.to_string()),
    };
    let ids: Vec<u16> = t.ids().collect();
    let contiguous = ids == (1..=191).collect::<Vec<u16>>();
    let conflicts = t.check_coherence().conflicts.len();
    let injected = parse_rules(&format!("{text}192 B WBBBBWWW W\n")).unwrap().check_coherence().conflicts;
    ok(
        t.len() == 191 && contiguous && conflicts == 0 && injected == [(131, 192)],
        format!("{} rules, ids 1..191 {contiguous}, {conflicts} conflicts, injected conflicts {injected:?}", t.len()),
    )
}

fn bfs_sector_sizes(levels: u32) -> HashMap<u8, Vec<usize>> {
    let ball = build_ball(levels);
    let mut dist = HashMap::from([(CellId::CENTER, 0usize)]);
    let mut queue = VecDeque::from([CellId::CENTER]);
    let mut sizes: HashMap<u8, Vec<usize>> = HashMap::new();
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if x != CellId::CENTER {
            let v = sizes.entry(x.sector).or_insert_with(|| vec![0; levels as usize + 1]);
            v[d - 1] += 1;
        }
        for n in ball.neighbor_slots(x).unwrap().into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(n) {
                e.insert(d + 1);
                queue.push_back(n);
            }
        }
    }
    sizes
}

fn tiling() -> Line {
    let expected = vec![1, 4, 15, 56, 209];
    let bfs = bfs_sector_sizes(4);
    let sizes_ok = level_size_recurrence(4) == expected && (1..=8).all(|s| bfs[&s] == expected);
    let mut vertex_ok = true;
    let mut symmetric = true;
    for levels in 0..=6 {
        let ball = build_ball(levels);
        for &x in ball.cells() {
            for n in ball.neighbor_slots(x).unwrap().into_iter().flatten() {
                symmetric &= ball.are_adjacent(n, x);
            }
            if let Ok(nb) = ball.neighbors(x) {
                vertex_ok &= (0..8).all(|k| ball.are_adjacent(nb[k], nb[(k + 1) % 8]));
            }
        }
    }
    ok(
        sizes_ok && vertex_ok && symmetric,
        format!("sector sizes {expected:?} {sizes_ok}, three per vertex {vertex_ok}, symmetry {symmetric}"),
    )
}

fn golden_traces(h: &Harness) -> Line {
    let outcomes = h.table_outcomes();
    let failed: Vec<&String> = outcomes.iter().filter(|(_, o)| !o.passed()).map(|(n, _)| n).collect();
    let witnesses: Vec<Outcome> = h.store.witnesses.iter().map(|w| h.verify_witness(w)).collect();
    let wfail = witnesses.iter().filter(|o| !o.passed()).count();
    ok(
        failed.is_empty() && wfail == 0,
        format!(
            "{} tables exact, {} failed {failed:?}; {} witnesses, {wfail} failed",
            outcomes.len(),
            failed.len(),
            witnesses.len()
        ),
    )
}

fn idle(h: &Harness) -> Line {
    let kinds = StructureKind::all();
    let bad: Vec<String> = kinds
        .iter()
        .filter(|&&k| !h.check_idle(k, IDLE_STEPS).passed())
        .map(|k| k.to_string())
        .collect();
    ok(bad.is_empty(), format!("{} structures over {IDLE_STEPS} steps, unchanged except {bad:?}", kinds.len()))
}

fn behaviour(h: &Harness) -> Line {
    let required = [
        "doubler/simple",
        "selector/simple",
        "selector/double",
        "controller/loco-black",
        "controller/loco-white",
        "controller/signal-w2b",
        "controller/signal-b2w",
        "sensor/loco-white",
        "sensor/loco-black",
        "sensor/signal-b2w",
    ];
    let mut checked = 0;
    let mut bad = Vec::new();
    for key in required {
        let Some(sc) = h.scenario(key) else {
            bad.push(format!("{key} missing"));
            continue;
        };
        let out = h.check_behaviour(sc);
        if out.is_empty() {
            bad.push(format!("{key} has no expectations"));
        }
        for (text, o) in out {
            checked += 1;
            if let Outcome::Fail(why) = o {
                bad.push(format!("{key} {text}: {why}"));
            }
        }
    }
    ok(bad.is_empty(), format!("{checked} expectations over {} scenarios, failures {bad:?}", required.len()))
}

fn chaining(h: &Harness) -> Line {
    let mut bad = Vec::new();
    for (name, g) in &h.store.tables {
        if let Err((c, r)) = check_chaining(g, &h.table) {
            bad.push(format!("{name} chain {c} row {r}"));
        }
        if let Err((c, r)) = check_markers(g, &h.table) {
            bad.push(format!("{name} marker {c} row {r}"));
        }
    }
    ok(bad.is_empty(), format!("{} tables chain and markers agree, failures {bad:?}", h.store.tables.len()))
}

fn coverage(h: &Harness) -> Line {
    let fired = h.fired_rules();
    let outcome = h.check_coverage();
    ok(
        outcome.passed(),
        format!("{} rules fired, {} waived ({:?})", fired.len(), h.waivers.len(), outcome),
    )
}

fn falsification(h: &Harness) -> Line {
    let dir = assets_dir();
    let without = Harness::load_with(&dir, h.table.without(84), &dir.join("golden")).unwrap();
    let broken = without.table_outcomes().values().filter(|o| !o.passed()).count();
    // change one entry of the fixed-switch table and look for the single divergence
    let mut g = h.store.tables["efxsg"].clone();
    let sc = h.binding("efxsg").unwrap();
    let inst = h.structure(sc.kind).unwrap();
    let (_, log) = simulate(&h.ball, &h.table, &inst, sc).unwrap();
    let (row, col) = (4, 4);
    g.rows[row].1[col].rule = 99;
    let target = (g.cells[col], g.rows[row].0);
    let mut all = Vec::new();
    for (r, entries) in &g.rows {
        for (e, &c) in entries.iter().zip(&g.cells) {
            if log.fired(*r as usize - 1, c) != Some(e.rule) {
                all.push((c, *r));
            }
        }
    }
    let first = first_divergence(&g, &log).map(|(c, r, _, _)| (c, r));
    ok(
        broken >= 3 && all == [target] && first == Some(target),
        format!(
            "rule 84 deleted breaks {broken} tables; perturbing {} row {} gives divergences {:?}",
            target.0,
            target.1,
            all.iter().map(|(c, r)| format!("{c} row {r}")).collect::<Vec<_>>()
        ),
    )
}

fn render() -> Line {
    let mut counts = Vec::new();
    let mut counts_ok = true;
    for levels in 0..=5 {
        let n = layout_ball(&build_ball(levels)).len();
        let expect = 1 + 8 * level_size_recurrence(levels).iter().sum::<usize>();
        counts_ok &= n == expect;
        counts.push(n);
    }
    let lay = layout_ball(&build_ball(3));
    let conf = Configuration::from_black(lay.tiles.iter().step_by(7).map(|t| t.cell));
    let a = render_frame(&lay, &conf, &BTreeMap::new());
    let b = render_frame(&layout_ball(&build_ball(3)), &conf, &BTreeMap::new());
    ok(counts_ok && a == b, format!("tile counts {counts:?}, repeated SVG identical {}", a == b))
}

fn main() {
    let mut lines: Vec<(u8, &str, Line)> = Vec::new();
    lines.push((1, "rule integrity", timed(Some(RULES_BUDGET), rules_integrity)));
    lines.push((2, "tiling", timed(Some(TILING_BUDGET), tiling)));
    let h = Harness::load(&assets_dir()).expect("shipped assets load");
    lines.push((3, "golden traces", timed(Some(TRACES_BUDGET), || golden_traces(&h))));
    lines.push((4, "idle fixed points", timed(None, || idle(&h))));
    lines.push((5, "behavioural oracles", timed(None, || behaviour(&h))));
    lines.push((6, "trace chaining", timed(None, || chaining(&h))));
    lines.push((7, "rule coverage", timed(None, || coverage(&h))));
    lines.push((8, "falsification", timed(None, || falsification(&h))));
    lines.push((9, "render", timed(None, render)));
    let mut failed = 0;
    for (n, name, line) in &lines {
        if !line.pass {
            failed += 1;
        }
        println!("criterion {n} {}: {name}: {}", if line.pass { "PASS" } else { "FAIL" }, line.detail);
    }
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
