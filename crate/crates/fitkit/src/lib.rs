//! Recovers the figure-only content of each structure (extra milestones and
//! per-cell orientations) from the execution tables.

use hypeca_rules::RuleTable;
use hypeca_structures::golden::GoldenStore;
use hypeca_structures::{Scenario, SolvedAsset, StructureError};
use hypeca_tiling::{CellId, TilingBall};

mod problem;
mod solve;
mod timeline;

pub use problem::FitProblem;
pub use solve::{OrientationSolution, StaticSolution};
pub use timeline::{reconstruct_timeline, Timeline};

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("table {table}: {cell} at t={t} does not continue the previous rule")]
    InconsistentTrace { table: String, cell: CellId, t: usize },
    #[error("table {table} uses unknown rule {id}")]
    UnknownRule { table: String, id: u16 },
    #[error("no consistent static state for {cell}")]
    StaticConflict { cell: CellId },
    #[error("no orientation of {cell} fits the traces")]
    InfeasibleOrientation { cell: CellId },
    #[error("golden table {0} not found")]
    MissingGolden(String),
    #[error("no scenarios for {0}")]
    NoScenarios(String),
    #[error("no path named {0}")]
    UnknownPath(String),
    #[error("{0} lies outside the ball")]
    OutsideBall(CellId),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Full fit of one structure family.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub asset: SolvedAsset,
    pub statics: StaticSolution,
    pub orientation: OrientationSolution,
}

pub fn fit_structure(
    ball: &TilingBall,
    table: &RuleTable,
    family: &str,
    scenarios: &[Scenario],
    store: &GoldenStore,
) -> Result<FitOutcome, FitError> {
    let problem = FitProblem::new(ball, table, family, scenarios, store)?;
    let statics = problem.infer_static_neighborhood()?;
    let orientation = problem.fit_orientations(&statics)?;
    let asset = problem.assemble_solved_asset(&statics, &orientation);
    Ok(FitOutcome {
        asset,
        statics,
        orientation,
    })
}
