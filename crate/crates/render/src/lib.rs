//! Poincaré-disk pictures of configurations.
//!
//! The central octagon is regular with vertex angle 2π/3; every other tile is the
//! image of an already placed neighbour under the reflection in their shared edge.
//! Side 1 of 0(0) faces angle 0 and sides run counterclockwise.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt::Write;

use hypeca_engine::Configuration;
use hypeca_rules::State;
use hypeca_tiling::{CellId, TilingBall};
use num_complex::Complex64;

/// Coincidence tolerance for shared vertices.
pub const TOLERANCE: f64 = 1e-9;
/// Deepest level drawn.
pub const MAX_LAYOUT_LEVELS: u32 = 6;

pub const WHITE: &str = "#ffffff";
pub const DARK_BLUE: &str = "#1a237e";

/// Euclidean distance from the disk centre to a vertex of the central octagon.
pub fn central_circumradius() -> f64 {
    let cosh_r = 1.0 / ((PI / 8.0).tan() * (PI / 3.0).tan());
    (cosh_r.acosh() / 2.0).tanh()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    pub cell: CellId,
    pub center: (f64, f64),
    /// Vertex `k` joins canonical sides `k` and `k + 1` (0-based); side `k` runs from vertex `k` to `k + 1`.
    pub vertices: [(f64, f64); 8],
}

#[derive(Clone, Debug, Default)]
pub struct DiskLayout {
    pub tiles: Vec<Tile>,
    index: HashMap<CellId, usize>,
}

impl DiskLayout {
    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, c: CellId) -> Option<&Tile> {
        self.index.get(&c).map(|&i| &self.tiles[i])
    }

    /// `label cx cy v1x v1y ... v8x v8y`, one tile per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# tolerance {TOLERANCE:e}\n");
        for t in &self.tiles {
            write!(out, "{} {:.12} {:.12}", t.cell, t.center.0, t.center.1).unwrap();
            for v in &t.vertices {
                write!(out, " {:.12} {:.12}", v.0, v.1).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Reflection in the geodesic through `p` and `q`.
fn reflection(p: Complex64, q: Complex64) -> impl Fn(Complex64) -> Complex64 {
    let det = p.re * q.im - p.im * q.re;
    let line = det.abs() < 1e-14;
    let (center, r2, dir) = if line {
        let d = if p.norm() > q.norm() { p } else { q };
        (Complex64::new(0.0, 0.0), 0.0, d / d.norm())
    } else {
        let a = (p.norm_sqr() + 1.0) / 2.0;
        let b = (q.norm_sqr() + 1.0) / 2.0;
        let cx = (a * q.im - b * p.im) / det;
        let cy = (p.re * b - q.re * a) / det;
        let c = Complex64::new(cx, cy);
        (c, c.norm_sqr() - 1.0, Complex64::new(1.0, 0.0))
    };
    move |z: Complex64| {
        if line {
            dir * dir * z.conj()
        } else {
            center + r2 / (z - center).conj()
        }
    }
}

fn pt(z: Complex64) -> (f64, f64) {
    (z.re, z.im)
}

fn cx(p: (f64, f64)) -> Complex64 {
    Complex64::new(p.0, p.1)
}

/// Places every cell of level at most `MAX_LAYOUT_LEVELS`.
pub fn layout_ball(ball: &TilingBall) -> DiskLayout {
    let rho = central_circumradius();
    let mut layout = DiskLayout::default();
    let verts: [(f64, f64); 8] = std::array::from_fn(|k| {
        let a = k as f64 * PI / 4.0 - PI / 8.0;
        (rho * a.cos(), rho * a.sin())
    });
    layout.index.insert(CellId::CENTER, 0);
    layout.tiles.push(Tile {
        cell: CellId::CENTER,
        center: (0.0, 0.0),
        vertices: verts,
    });
    let mut next = 0;
    while next < layout.tiles.len() {
        let parent = layout.tiles[next].clone();
        next += 1;
        let Ok(slots) = ball.neighbor_slots(parent.cell) else { continue };
        for (k, slot) in slots.iter().enumerate() {
            let Some(n) = *slot else { continue };
            if layout.index.contains_key(&n) || ball.level(n).is_none_or(|l| l > MAX_LAYOUT_LEVELS) {
                continue;
            }
            let Some(j0) = ball.side_of(n, parent.cell) else { continue };
            let v = parent.vertices;
            let refl = reflection(cx(v[k]), cx(v[(k + 1) % 8]));
            let vertices = std::array::from_fn(|s| {
                let m = (k + 8 + j0 - s) % 8;
                pt(refl(cx(v[(m + 1) % 8])))
            });
            layout.index.insert(n, layout.tiles.len());
            layout.tiles.push(Tile {
                cell: n,
                center: pt(refl(cx(parent.center))),
                vertices,
            });
        }
    }
    layout
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Highlight {
    Yellow,
    Pink,
    Green,
    Marked,
}

impl Highlight {
    /// Colour conventionally given to a named path, if any.
    pub fn for_path(name: &str) -> Option<Highlight> {
        match name {
            "yellow" => Some(Highlight::Yellow),
            "pink" => Some(Highlight::Pink),
            "green" => Some(Highlight::Green),
            _ => None,
        }
    }

    fn colours(self) -> (&'static str, &'static str) {
        match self {
            Highlight::Yellow => ("#fff59d", "#f9a825"),
            Highlight::Pink => ("#f8bbd0", "#d81b60"),
            Highlight::Green => ("#c8e6c9", "#2e7d32"),
            Highlight::Marked => ("#e0e0e0", "#616161"),
        }
    }
}

// screen coordinates: y grows downward, so flip to keep counterclockwise on screen
fn screen(p: (f64, f64)) -> (f64, f64) {
    (p.0, -p.1)
}

fn edge_path(a: (f64, f64), b: (f64, f64), out: &mut String) {
    let (p, q) = (cx(a), cx(b));
    let det = p.re * q.im - p.im * q.re;
    let (bx, by) = screen(b);
    if det.abs() < 1e-14 {
        write!(out, " L {bx:.6} {by:.6}").unwrap();
        return;
    }
    let aa = (p.norm_sqr() + 1.0) / 2.0;
    let bb = (q.norm_sqr() + 1.0) / 2.0;
    let c = Complex64::new((aa * q.im - bb * p.im) / det, (p.re * bb - q.re * aa) / det);
    let r = (c.norm_sqr() - 1.0).sqrt();
    let (sa, sc) = (screen(a), screen(pt(c)));
    let cross = (sa.0 - sc.0) * (by - sc.1) - (sa.1 - sc.1) * (bx - sc.0);
    let sweep = if cross > 0.0 { 1 } else { 0 };
    write!(out, " A {r:.6} {r:.6} 0 0 {sweep} {bx:.6} {by:.6}").unwrap();
}

/// SVG of `config`: white cells white, black cells dark blue, highlighted cells tinted.
/// Tiles appear in layout order, so identical input gives identical text.
pub fn render_frame(layout: &DiskLayout, config: &Configuration, highlights: &BTreeMap<CellId, Highlight>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" viewBox=\"-1.02 -1.02 2.04 2.04\">\n",
    );
    out.push_str("<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"#fafafa\" stroke=\"#000000\" stroke-width=\"0.004\"/>\n");
    for t in &layout.tiles {
        let black = config.state(t.cell) == State::B;
        let hl = highlights.get(&t.cell).map(|h| h.colours());
        let fill = match (black, hl) {
            (true, _) => DARK_BLUE,
            (false, Some((tint, _))) => tint,
            (false, None) => WHITE,
        };
        let (stroke, width) = match hl {
            Some((_, edge)) => (edge, 0.004),
            None => ("#9e9e9e", 0.0015),
        };
        let (x0, y0) = screen(t.vertices[0]);
        let mut d = format!("M {x0:.6} {y0:.6}");
        for k in 0..8 {
            edge_path(t.vertices[k], t.vertices[(k + 1) % 8], &mut d);
        }
        writeln!(
            out,
            "<path d=\"{d} Z\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{width}\"><title>{}</title></path>",
            t.cell
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
