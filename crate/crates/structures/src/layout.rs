//! Cell lists quoted for each structure. Everything else comes from the solved asset.

use hypeca_tiling::{parse_label, CellId};

use crate::kind::{Direction, StructureKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    /// Named paths, each an ordered list of edge-connected cells.
    pub paths: Vec<(String, Vec<CellId>)>,
    pub named: Vec<(String, CellId)>,
    /// Milestones stated outright.
    pub black: Vec<CellId>,
    pub colour_cell: Option<CellId>,
}

impl Layout {
    pub fn path(&self, name: &str) -> Option<&[CellId]> {
        self.paths.iter().find(|(n, _)| n == name).map(|(_, p)| p.as_slice())
    }

    pub fn named(&self, role: &str) -> Option<CellId> {
        self.named.iter().find(|(n, _)| n == role).map(|(_, c)| *c)
    }
}

fn cells(text: &str) -> Vec<CellId> {
    text.split_whitespace().map(|l| parse_label(l).expect("built-in label")).collect()
}

fn path(name: &str, text: &str) -> (String, Vec<CellId>) {
    (name.to_string(), cells(text))
}

const TRACK_RIGHT: &str = "17(8) 4(8) 3(8) 2(8) 1(7) 1(6) 1(5) 1(4) 2(4) 5(3) 4(3) 13(3)";
const TRACK_LEFT: &str = "32(3) 9(3) 2(3) 1(2) 1(1) 2(1) 6(1) 21(1)";
const CONTROL_TRACK: &str = "20(6) 6(7) 2(7) 1(6) 0(0) 1(4) 2(5) 3(5) 10(5) 35(5)";
const CONTROL_APPROACH: &str = "20(6) 6(7) 2(7) 1(6)";

pub fn layout(kind: StructureKind) -> Layout {
    let mut l = Layout {
        paths: Vec::new(),
        named: Vec::new(),
        black: Vec::new(),
        colour_cell: None,
    };
    match kind {
        StructureKind::TrackLoop(dir) => {
            let mut right = path("right", TRACK_RIGHT);
            let mut left = path("left", TRACK_LEFT);
            if dir == Direction::Counterclockwise {
                right.1.reverse();
                left.1.reverse();
            }
            l.paths = vec![right, left];
        }
        StructureKind::FixedSwitch => {
            l.paths = vec![
                path("left", "13(8) 4(8) 5(8) 2(1) 1(1)"),
                path("right", "16(6) 4(6) 5(6) 2(7) 1(7)"),
                path("exit", "1(4) 2(4) 5(3) 4(3)"),
            ];
            l.named = vec![("centre".into(), CellId::CENTER)];
            l.black = cells("1(2) 1(3) 1(5) 1(6) 1(8)");
        }
        StructureKind::Fork => {
            l.paths = vec![
                path("yellow", "21(2) 6(2) 5(1) 1(1)"),
                path("green", "1(2) 1(3) 3(3) 9(3) 35(3)"),
                path("pink", "1(8) 1(7) 5(7) 6(8) 21(8)"),
            ];
            l.named = vec![("centre".into(), CellId::CENTER)];
            l.black = vec![CellId::CENTER];
        }
        StructureKind::Doubler => {
            l.paths = vec![
                path("yellow", "21(2) 6(2) 5(1) 1(1)"),
                path("green", "1(2) 2(3) 3(3) 4(3) 5(3) 2(4) 3(4)"),
                path("pink", "1(8) 1(7) 1(6) 1(5) 2(5) 5(4)"),
                path("exit", "4(4) 15(4) 54(4)"),
            ];
            l.named = vec![("switch".into(), cells("4(4)")[0])];
        }
        StructureKind::Selector => {
            l.paths = vec![
                path("yellow", "6(7) 5(6) 1(6) 0(0)"),
                path("pink", "1(8) 2(8) 9(8) 32(8)"),
                path("green", "1(4) 2(5) 6(5) 24(5)"),
            ];
            l.named = vec![
                ("sensor-left".into(), cells("1(5)")[0]),
                ("sensor-right".into(), cells("1(7)")[0]),
            ];
        }
        StructureKind::Controller(_) => {
            let colour = cells("1(3)")[0];
            l.paths = vec![
                path("track", CONTROL_TRACK),
                path("approach", CONTROL_APPROACH),
                path("signal", "24(4) 6(4) 2(4)"),
            ];
            l.named = vec![("colour-cell".into(), colour)];
            l.colour_cell = Some(colour);
        }
        StructureKind::Sensor(_) => {
            let colour = cells("1(1)")[0];
            l.paths = vec![
                path("track", CONTROL_TRACK),
                path("approach", CONTROL_APPROACH),
                path("signal", "24(2) 6(2) 2(2)"),
            ];
            l.named = vec![("colour-cell".into(), colour)];
            l.colour_cell = Some(colour);
        }
    }
    l
}
