use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use hypeca_engine::Configuration;
use hypeca_render::{
    central_circumradius, layout_ball, render_frame, DiskLayout, Highlight, DARK_BLUE, TOLERANCE, WHITE,
};
use hypeca_rules::parse_rules;
use hypeca_structures::{assets_dir, load_scenario, load_structure, simulate, StructureKind, STRUCTURE_LEVELS};
use hypeca_tiling::{build_ball, parse_label, CellId, TilingBall};
use proptest::prelude::*;

fn c(s: &str) -> CellId {
    parse_label(s).unwrap()
}

fn layout(levels: u32) -> &'static DiskLayout {
    static L: OnceLock<Vec<DiskLayout>> = OnceLock::new();
    &L.get_or_init(|| (0..=5).map(|l| layout_ball(&build_ball(l))).collect())[levels as usize]
}

/// 1 + 8 * (sector sizes), sector level sizes from L0 = 1, L1 = 4, L(n+1) = 4 L(n) - L(n-1).
fn combinatorial_count(levels: u32) -> usize {
    let (mut a, mut b, mut total) = (1i64, 4i64, 1i64);
    for _ in 0..=levels {
        total += 8 * a;
        (a, b) = (b, 4 * b - a);
    }
    total as usize
}

#[test]
fn tile_counts() {
    for levels in 0..=5 {
        assert_eq!(layout(levels).len(), combinatorial_count(levels), "levels {levels}");
    }
    assert_eq!(layout(3).len(), 609);
    assert_eq!(combinatorial_count(0), 9);
}

#[test]
fn shared_edges_coincide() {
    let ball = build_ball(4);
    let lay = layout(4);
    let mut checked = 0;
    for t in &lay.tiles {
        let Ok(slots) = ball.neighbor_slots(t.cell) else { continue };
        for (k, n) in slots.iter().enumerate() {
            let Some(n) = n else { continue };
            let Some(u) = lay.get(*n) else { continue };
            let j = ball.side_of(*n, t.cell).unwrap();
            // side k of t runs v[k] -> v[k+1]; the same edge on u runs the other way
            let (a0, a1) = (t.vertices[k], t.vertices[(k + 1) % 8]);
            let (b0, b1) = (u.vertices[j], u.vertices[(j + 1) % 8]);
            for (p, q) in [(a0, b1), (a1, b0)] {
                assert!((p.0 - q.0).hypot(p.1 - q.1) < TOLERANCE, "{} / {}", t.cell, n);
            }
            checked += 1;
        }
    }
    assert!(checked > 3000);
}

/// Angle at `v` between the geodesics towards `a` and `b`.
fn geodesic_angle(v: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let tangent = |p: (f64, f64), q: (f64, f64)| -> (f64, f64) {
        // circle through p, q and the inversion of p in the unit circle
        let n2 = p.0 * p.0 + p.1 * p.1;
        let r = (p.0 / n2, p.1 / n2);
        let pts = [p, q, r];
        let (x1, y1) = pts[0];
        let (x2, y2) = pts[1];
        let (x3, y3) = pts[2];
        let d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2));
        if d.abs() < 1e-14 {
            return (q.0 - p.0, q.1 - p.1);
        }
        let s1 = x1 * x1 + y1 * y1;
        let s2 = x2 * x2 + y2 * y2;
        let s3 = x3 * x3 + y3 * y3;
        let ux = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d;
        let uy = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d;
        let t = (-(p.1 - uy), p.0 - ux);
        // orient the tangent towards q
        if t.0 * (q.0 - p.0) + t.1 * (q.1 - p.1) < 0.0 {
            (-t.0, -t.1)
        } else {
            t
        }
    };
    let (s, t) = (tangent(v, a), tangent(v, b));
    ((s.0 * t.0 + s.1 * t.1) / (s.0.hypot(s.1) * t.0.hypot(t.1))).acos()
}

/// Euclidean circumradius of the centred regular octagon whose vertex angle is 2π/3, by bisection.
fn bisected_circumradius() -> f64 {
    let angle = |rho: f64| {
        let v = |k: f64| (rho * (k * PI / 4.0).cos(), rho * (k * PI / 4.0).sin());
        geodesic_angle(v(0.0), v(1.0), v(-1.0))
    };
    // the angle shrinks as the octagon grows
    let (mut lo, mut hi) = (0.01, 0.99);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if angle(mid) > 2.0 * PI / 3.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / 2.0
}

#[test]
fn central_octagon_has_angle_two_thirds_pi() {
    let rho = central_circumradius();
    assert!((rho - bisected_circumradius()).abs() < 1e-9, "{rho}");
    let t = layout(0).get(CellId::CENTER).unwrap();
    for k in 0..8 {
        let v = t.vertices[k];
        assert!((v.0.hypot(v.1) - rho).abs() < TOLERANCE);
        let a = geodesic_angle(v, t.vertices[(k + 1) % 8], t.vertices[(k + 7) % 8]);
        assert!((a - 2.0 * PI / 3.0).abs() < 1e-9, "vertex {k}: {a}");
    }
}

#[test]
fn three_tiles_meet_at_interior_vertices() {
    let lay = layout(3);
    let ball = build_ball(3);
    let inner: Vec<_> = lay.tiles.iter().filter(|t| ball.level(t.cell).is_none_or(|l| l < 2)).collect();
    for t in &inner {
        for (k, v) in t.vertices.iter().enumerate() {
            let meeting = lay
                .tiles
                .iter()
                .filter(|u| u.vertices.iter().any(|w| (w.0 - v.0).hypot(w.1 - v.1) < 1e-7))
                .count();
            assert_eq!(meeting, 3, "{} vertex {k}", t.cell);
            let sum: f64 = lay
                .tiles
                .iter()
                .filter_map(|u| {
                    let i = u.vertices.iter().position(|w| (w.0 - v.0).hypot(w.1 - v.1) < 1e-7)?;
                    Some(geodesic_angle(u.vertices[i], u.vertices[(i + 1) % 8], u.vertices[(i + 7) % 8]))
                })
                .sum();
            assert!((sum - 2.0 * PI).abs() < 1e-6, "{} vertex {k}: {sum}", t.cell);
        }
    }
}

#[test]
fn side_one_of_the_centre_faces_angle_zero() {
    let t = layout(1).get(CellId::CENTER).unwrap();
    let (a, b) = (t.vertices[0], t.vertices[1]);
    let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    assert!(mid.0 > 0.0 && mid.1.abs() < 1e-12);
    let n = layout(1).get(c("1(1)")).unwrap();
    assert!(n.center.0 > 0.0 && n.center.1.abs() < 1e-12);
    // counterclockwise: 1(3) sits above the x axis
    assert!(layout(1).get(c("1(3)")).unwrap().center.1 > 0.0);
}

#[test]
fn tiles_stay_inside_the_disk() {
    for t in &layout(5).tiles {
        for v in &t.vertices {
            assert!(v.0.hypot(v.1) < 1.0);
        }
    }
}

#[test]
fn layout_dump_has_tolerance_header() {
    let text = layout(1).to_text();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# tolerance 1e-9"));
    let first: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(first[0], "0(0)");
    assert_eq!(first.len(), 1 + 2 + 16);
    assert_eq!(text.lines().count(), 1 + layout(1).len());
}

fn fill_of(svg: &str, cell: CellId) -> String {
    let key = format!("<title>{cell}</title>");
    let line = svg.lines().find(|l| l.contains(&key)).unwrap();
    let from = line.find("fill=\"").unwrap() + 6;
    line[from..from + 7].to_string()
}

#[test]
fn blank_frame_is_all_white() {
    let svg = render_frame(layout(2), &Configuration::new(), &BTreeMap::new());
    assert!(svg.starts_with("<?xml"));
    assert!(svg.ends_with("</svg>\n"));
    assert_eq!(svg.matches("<path ").count(), layout(2).len());
    assert!(!svg.contains(DARK_BLUE));
    assert_eq!(fill_of(&svg, CellId::CENTER), WHITE);
}

fn ball() -> &'static TilingBall {
    static B: OnceLock<TilingBall> = OnceLock::new();
    B.get_or_init(|| build_ball(STRUCTURE_LEVELS))
}

#[test]
fn idle_fork_shows_a_dark_blue_centre() {
    let fork = load_structure(StructureKind::Fork, ball(), &assets_dir()).unwrap();
    let mut hl = BTreeMap::new();
    for (name, p) in &fork.paths {
        for &x in p {
            hl.insert(x, Highlight::for_path(name).unwrap());
        }
    }
    let svg = render_frame(layout(4), &fork.config, &hl);
    assert_eq!(fill_of(&svg, CellId::CENTER), DARK_BLUE);
    assert_eq!(fill_of(&svg, c("1(3)")), "#c8e6c9");
    assert_eq!(svg, render_frame(layout(4), &fork.config, &hl));
}

#[test]
fn fixed_switch_frames_follow_the_locomotive() {
    let dir = assets_dir();
    let table = parse_rules(&std::fs::read_to_string(dir.join("rules.txt")).unwrap()).unwrap();
    let sw = load_structure(StructureKind::FixedSwitch, ball(), &dir).unwrap();
    let sc = load_scenario(&dir, "fixed-switch", "simple-left").unwrap();
    assert_eq!(sc.golden, ["efxsg"]);
    let (frames, _) = simulate(ball(), &table, &sw, &sc).unwrap();
    let route: Vec<CellId> = sw.paths["left"]
        .iter()
        .chain(&[CellId::CENTER])
        .chain(&sw.paths["exit"])
        .copied()
        .collect();
    let lay = layout(5);
    let mut svgs = Vec::new();
    for (t, f) in frames.iter().take(7).enumerate() {
        let moving: Vec<CellId> = f.black().difference(sw.config.black()).copied().collect();
        assert_eq!(moving, [route[t + 2]], "t={t}");
        let svg = render_frame(lay, f, &BTreeMap::new());
        assert_eq!(fill_of(&svg, route[t + 2]), DARK_BLUE);
        svgs.push(svg);
    }
    assert_eq!(svgs.len(), 7);
    assert!(svgs.windows(2).all(|w| w[0] != w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn rendering_is_deterministic(cells in proptest::collection::btree_set(0usize..161, 0..40)) {
        let lay = layout(2);
        let conf = Configuration::from_black(cells.iter().map(|&i| lay.tiles[i].cell));
        let a = render_frame(lay, &conf, &BTreeMap::new());
        let again = layout_ball(&build_ball(2));
        prop_assert_eq!(a.clone(), render_frame(&again, &conf, &BTreeMap::new()));
        prop_assert_eq!(a.matches(DARK_BLUE).count(), cells.len());
    }
}
