use std::collections::{HashMap, VecDeque};

use hypeca_tiling::{build_ball, level_size_recurrence, parse_label, CellId, NodeKind, TilingError};

fn c(s: &str) -> CellId {
    parse_label(s).unwrap()
}

#[test]
fn small_ball_sizes() {
    assert_eq!(build_ball(0).len(), 9);
    assert_eq!(build_ball(2).len(), 161);
    assert_eq!(build_ball(3).len(), 609);
}

#[test]
fn recurrence_values() {
    assert_eq!(level_size_recurrence(4), vec![1, 4, 15, 56, 209]);
}

/// Grows one sector tree from the production rules alone, without any geometry.
fn tree_rule_level_sizes(levels: u32) -> Vec<usize> {
    let mut sizes = vec![1usize];
    let mut level = vec![NodeKind::W];
    for _ in 0..levels {
        let mut next = Vec::new();
        for k in &level {
            match k {
                NodeKind::W => next.extend([NodeKind::B, NodeKind::W, NodeKind::W, NodeKind::W]),
                NodeKind::B => next.extend([NodeKind::B, NodeKind::W, NodeKind::W]),
            }
        }
        sizes.push(next.len());
        level = next;
    }
    sizes
}

/// Counts cells per sector by breadth-first distance from the centre.
fn bfs_level_sizes(levels: u32) -> HashMap<u8, Vec<usize>> {
    let ball = build_ball(levels);
    let mut dist: HashMap<CellId, u32> = HashMap::new();
    let mut queue = VecDeque::from([CellId::CENTER]);
    dist.insert(CellId::CENTER, 0);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for n in ball.neighbor_slots(x).unwrap().into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(n) {
                e.insert(d + 1);
                queue.push_back(n);
            }
        }
    }
    let mut out: HashMap<u8, Vec<usize>> = HashMap::new();
    for (cell, d) in dist {
        if cell.sector == 0 {
            continue;
        }
        let v = out.entry(cell.sector).or_insert_with(|| vec![0; levels as usize + 1]);
        v[d as usize - 1] += 1;
    }
    out
}

#[test]
fn level_sizes_match_three_oracles() {
    let expected = vec![1, 4, 15, 56, 209];
    assert_eq!(tree_rule_level_sizes(4), expected);
    assert_eq!(level_size_recurrence(4), expected);
    let ball = build_ball(4);
    let bfs = bfs_level_sizes(4);
    for s in 1..=8u8 {
        assert_eq!(ball.sector_level_sizes(s), expected, "sector {s}");
        assert_eq!(bfs[&s], expected, "bfs sector {s}");
    }
    for levels in 0..=6 {
        let ball = build_ball(levels);
        let rec = level_size_recurrence(levels);
        assert_eq!(ball.len(), 1 + 8 * rec.iter().sum::<usize>());
        assert_eq!(tree_rule_level_sizes(levels), rec);
    }
}

#[test]
fn numbering_is_contiguous_per_sector() {
    let ball = build_ball(4);
    for s in 1..=8u8 {
        let mut idx: Vec<u32> = ball.cells().iter().filter(|c| c.sector == s).map(|c| c.index).collect();
        idx.sort();
        let n = idx.len() as u32;
        assert_eq!(idx, (1..=n).collect::<Vec<_>>());
    }
}

#[test]
fn sons_follow_tree_rules() {
    let ball = build_ball(4);
    for &cell in ball.cells() {
        let node = ball.node(cell).unwrap();
        if cell == CellId::CENTER || node.level == 4 {
            continue;
        }
        let kinds: Vec<NodeKind> = node.sons.iter().map(|&s| ball.node(s).unwrap().kind).collect();
        match node.kind {
            NodeKind::W => assert_eq!(kinds, vec![NodeKind::B, NodeKind::W, NodeKind::W, NodeKind::W]),
            NodeKind::B => assert_eq!(kinds, vec![NodeKind::B, NodeKind::W, NodeKind::W]),
        }
        for s in &node.sons {
            assert_eq!(s.sector, cell.sector);
        }
    }
    let sons: Vec<CellId> = ball.node(c("2(1)")).unwrap().sons.clone();
    assert_eq!(sons, vec![c("6(1)"), c("7(1)"), c("8(1)")]);
}

#[test]
fn three_tiles_per_vertex_and_symmetry() {
    for levels in 0..=6 {
        let ball = build_ball(levels);
        for &x in ball.cells() {
            let slots = ball.neighbor_slots(x).unwrap();
            for n in slots.iter().flatten() {
                assert!(ball.are_adjacent(*n, x), "{x} -> {n} not symmetric");
            }
            let Ok(nb) = ball.neighbors(x) else { continue };
            for k in 0..8 {
                let (a, b) = (nb[k], nb[(k + 1) % 8]);
                assert!(ball.are_adjacent(a, b), "{x}: {a} and {b} should share a side");
            }
            let mut uniq = nb.to_vec();
            uniq.sort();
            uniq.dedup();
            assert_eq!(uniq.len(), 8);
        }
    }
}

#[test]
fn canonical_anchors() {
    let ball = build_ball(3);
    let nb0 = ball.neighbors(CellId::CENTER).unwrap();
    for i in 1..=8u8 {
        assert_eq!(nb0[i as usize - 1], CellId::root(i));
        let nb = ball.neighbors(CellId::root(i)).unwrap();
        assert_eq!(nb[6], CellId::CENTER);
        for j in 1..=4u32 {
            assert_eq!(nb[j as usize - 1], CellId { sector: i, index: j + 1 });
        }
    }
}

#[test]
fn boundary_cells_have_no_full_neighbourhood() {
    let ball = build_ball(2);
    let b = ball.boundary();
    assert_eq!(b.len(), 8 * 15);
    assert!(matches!(ball.neighbors(b[0]), Err(TilingError::BoundaryCell(_))));
    assert!(matches!(ball.neighbors(c("99(3)")), Err(TilingError::UnknownCell(_))));
}

/// Cell sequences quoted as tracks must be edge-connected in our numbering.
#[test]
fn quoted_paths_are_connected() {
    let paths = [
        "17(8) 4(8) 3(8) 2(8) 1(7) 1(6) 1(5) 1(4) 2(4) 5(3) 4(3) 13(3)",
        "32(3) 9(3) 2(3) 1(2) 1(1) 2(1) 6(1) 21(1)",
        "13(8) 4(8) 5(8) 2(1) 1(1) 0(0) 1(4) 2(4) 5(3) 4(3)",
        "16(6) 4(6) 5(6) 2(7) 1(7) 0(0)",
        "21(2) 6(2) 5(1) 1(1)",
        "1(1) 1(2) 1(3) 3(3) 9(3) 35(3)",
        "1(1) 1(8) 1(7) 5(7) 6(8) 21(8)",
        "1(2) 2(3) 3(3) 4(3) 5(3) 2(4) 3(4) 4(4)",
        "1(8) 1(7) 1(6) 1(5) 2(5) 5(4) 4(4)",
        "0(0) 1(8) 2(8) 9(8) 32(8)",
        "0(0) 1(4) 2(5) 6(5) 24(5)",
        "20(6) 6(7) 2(7) 1(6) 0(0) 1(4) 2(5) 3(5) 10(5) 35(5)",
        "24(4) 6(4) 2(4) 1(3)",
        "24(2) 6(2) 2(2) 1(1)",
    ];
    let ball = build_ball(5);
    for p in paths {
        let cells: Vec<CellId> = p.split_whitespace().map(c).collect();
        for w in cells.windows(2) {
            assert!(ball.are_adjacent(w[0], w[1]), "{} / {} in `{p}`", w[0], w[1]);
        }
    }
}

#[test]
fn adjacency_export_shape() {
    let ball = build_ball(1);
    let text = hypeca_tiling::adjacency_text(&ball);
    let first = text.lines().next().unwrap();
    assert_eq!(first, "0(0): 1(1) 1(2) 1(3) 1(4) 1(5) 1(6) 1(7) 1(8)");
    assert_eq!(text.lines().count(), ball.len());
    let root = text.lines().find(|l| l.starts_with("1(1):")).unwrap();
    assert_eq!(root, "1(1): 2(1) 3(1) 4(1) 5(1) 2(2) 1(2) 0(0) 1(8)");
}

#[test]
fn build_is_deterministic() {
    let a = hypeca_tiling::adjacency_text(&build_ball(4));
    let b = hypeca_tiling::adjacency_text(&build_ball(4));
    assert_eq!(a, b);
}
