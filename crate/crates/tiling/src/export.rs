use crate::TilingBall;

/// One line per cell: `label: n1 n2 ... n8`, with `-` for a neighbour outside the ball.
pub fn adjacency_text(ball: &TilingBall) -> String {
    let mut out = String::new();
    for &c in ball.cells() {
        out.push_str(&c.to_string());
        out.push(':');
        for s in ball.neighbor_slots(c).expect("cell of the ball") {
            out.push(' ');
            match s {
                Some(n) => out.push_str(&n.to_string()),
                None => out.push('-'),
            }
        }
        out.push('\n');
    }
    out
}
