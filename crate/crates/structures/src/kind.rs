use std::fmt;

use hypeca_rules::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

/// The circuit elements. Controller and sensor carry the colour of their control cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureKind {
    TrackLoop(Direction),
    FixedSwitch,
    Fork,
    Doubler,
    Selector,
    Controller(State),
    Sensor(State),
}

pub const FAMILIES: [&str; 8] = [
    "tracks-cw",
    "tracks-ccw",
    "fixed-switch",
    "fork",
    "doubler",
    "selector",
    "controller",
    "sensor",
];

impl StructureKind {
    /// Name shared by the asset file and the scenario directory.
    pub fn family(self) -> &'static str {
        match self {
            StructureKind::TrackLoop(Direction::Clockwise) => "tracks-cw",
            StructureKind::TrackLoop(Direction::Counterclockwise) => "tracks-ccw",
            StructureKind::FixedSwitch => "fixed-switch",
            StructureKind::Fork => "fork",
            StructureKind::Doubler => "doubler",
            StructureKind::Selector => "selector",
            StructureKind::Controller(_) => "controller",
            StructureKind::Sensor(_) => "sensor",
        }
    }

    /// Parses a family name. A missing colour falls back to the idle default
    /// (black controller, white sensor); a colour on a colourless kind is rejected.
    pub fn from_family(name: &str, colour: Option<State>) -> Option<StructureKind> {
        let kind = match name {
            "tracks-cw" => StructureKind::TrackLoop(Direction::Clockwise),
            "tracks-ccw" => StructureKind::TrackLoop(Direction::Counterclockwise),
            "fixed-switch" => StructureKind::FixedSwitch,
            "fork" => StructureKind::Fork,
            "doubler" => StructureKind::Doubler,
            "selector" => StructureKind::Selector,
            "controller" => return Some(StructureKind::Controller(colour.unwrap_or(State::B))),
            "sensor" => return Some(StructureKind::Sensor(colour.unwrap_or(State::W))),
            _ => return None,
        };
        match colour {
            None => Some(kind),
            Some(_) => None,
        }
    }

    pub fn colour(self) -> Option<State> {
        match self {
            StructureKind::Controller(c) | StructureKind::Sensor(c) => Some(c),
            _ => None,
        }
    }

    /// One instance per family, both colours for controller and sensor.
    pub fn all() -> Vec<StructureKind> {
        vec![
            StructureKind::TrackLoop(Direction::Clockwise),
            StructureKind::TrackLoop(Direction::Counterclockwise),
            StructureKind::FixedSwitch,
            StructureKind::Fork,
            StructureKind::Doubler,
            StructureKind::Selector,
            StructureKind::Controller(State::B),
            StructureKind::Controller(State::W),
            StructureKind::Sensor(State::W),
            StructureKind::Sensor(State::B),
        ]
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.colour() {
            Some(c) => write!(f, "{}({})", self.family(), c),
            None => f.write_str(self.family()),
        }
    }
}
