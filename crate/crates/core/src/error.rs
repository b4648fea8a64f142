use thiserror::Error;

/// Errors raised by graph, geometry, rigidity, construction and localization routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph not connected")]
    NotConnected,

    #[error("collocated nodes: vertices {0} and {1} share a position")]
    Collocated(usize, usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("expects 4-cycle: {0}")]
    NotQuadrilateral(String),

    #[error("oracle is desk-scale only (n = {0}, limit 8)")]
    OracleTooLarge(usize),

    #[error("need n_a >= 2 anchors, got {0}")]
    TooFewAnchors(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("placement failed after {0} attempts: {1}")]
    Placement(usize, String),

    #[error("infeasible SA data: {0}")]
    InfeasibleSa(String),

    #[error("infeasible RoD data: {0}")]
    InfeasibleRod(String),

    #[error("bearings unresolved; use disconnected solver")]
    BearingsUnresolved,

    #[error("distances unresolved; use disconnected solver")]
    DistancesUnresolved,

    #[error("method precondition unmet: {0}")]
    MethodPrecondition(String),

    #[error("solver failed: {0}")]
    SolverFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
