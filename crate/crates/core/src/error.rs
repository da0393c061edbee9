use std::fmt;

use thiserror::Error;

use crate::model::Axiom;

/// A single structured problem found while validating an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyStrategySpace { player: usize },
    InvalidStrategySpace { player: usize, reason: String },
    PriorityRowLength { resource: String, expected: usize, found: usize },
    ZeroPriority { resource: String, player: usize },
    MissingDelay { resource: String, player: Option<usize> },
    MissingTableEntry { resource: String, player: Option<usize>, x: usize, y: usize },
    InvalidTableEntry { resource: String, player: Option<usize>, x: usize, y: usize },
    TableTooSmall { resource: String, player: Option<usize>, bound: usize, required: usize },
    NegativeDelay { resource: String, player: Option<usize> },
    DelayAxiom { resource: String, player: Option<usize>, axiom: Axiom, at: (usize, usize), detail: String },
    MissingCost { resource: String, player: usize },
    Other(String),
}

fn owner(resource: &str, player: &Option<usize>) -> String {
    match player {
        Some(p) => format!("delay of resource {resource} for player {}", p + 1),
        None => format!("delay of resource {resource}"),
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStrategySpace { player } => {
                write!(f, "player {} has an empty strategy space", player + 1)
            }
            Violation::InvalidStrategySpace { player, reason } => {
                write!(f, "strategy space of player {} is invalid: {reason}", player + 1)
            }
            Violation::PriorityRowLength { resource, expected, found } => write!(
                f,
                "priority list of resource {resource} has {found} entries, expected {expected}"
            ),
            Violation::ZeroPriority { resource, player } => write!(
                f,
                "priority of player {} at resource {resource} must be >= 1",
                player + 1
            ),
            Violation::MissingDelay { resource, player } => {
                write!(f, "{} is missing", owner(resource, player))
            }
            Violation::MissingTableEntry { resource, player, x, y } => write!(
                f,
                "{} has no entry for (x={x}, y={y})",
                owner(resource, player)
            ),
            Violation::InvalidTableEntry { resource, player, x, y } => write!(
                f,
                "{} has an entry at invalid point (x={x}, y={y}); y must be >= 1",
                owner(resource, player)
            ),
            Violation::TableTooSmall { resource, player, bound, required } => write!(
                f,
                "{} is tabulated up to x+y={bound} but profiles reach x+y={required}",
                owner(resource, player)
            ),
            Violation::NegativeDelay { resource, player } => {
                write!(f, "{} contains a negative value", owner(resource, player))
            }
            Violation::DelayAxiom { resource, player, detail, .. } => {
                write!(f, "{}: {detail}", owner(resource, player))
            }
            Violation::MissingCost { resource, player } => write!(
                f,
                "cost matrix has no entry for player {} at resource {resource}",
                player + 1
            ),
            Violation::Other(msg) => f.write_str(msg),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {}", join(.0))]
    Validation(Vec<Violation>),
    #[error("delay argument (x={x}, y={y}) is outside the tabulated bound {bound}")]
    OutOfBound { x: usize, y: usize, bound: usize },
    #[error("delay argument y must be >= 1")]
    ZeroEqualPriorityCount,
    #[error("player {} is not placed in this state", .0 + 1)]
    PlayerNotPlaced(usize),
    #[error("strategy space is not a matroid")]
    NotMatroid,
    #[error("set is not a base of the strategy space")]
    NotABase,
    #[error("element is not in the source base minus the target base")]
    NotExchangeable,
    #[error("no exchange element exists (space violates the exchange axiom)")]
    NoExchange,
    #[error("target base is not cheaper than the source base")]
    NotImproving,
    #[error("every strategy space must consist of singletons")]
    NotSingleton,
    #[error("operation requires shared (non player-specific) delays")]
    PlayerSpecificInput,
    #[error("operation requires consistent priorities")]
    InconsistentPriorities,
    #[error("lexicographic vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("player {} does not have the priority level expected by the state", .0 + 1)]
    LevelMismatch(usize),
    #[error("insertion potentials come from games of different shapes")]
    ShapeMismatch,
    #[error("univariate delay of resource {0} is not nondecreasing")]
    NonMonotoneDelay(String),
    #[error("layer {level} did not converge within {cap} steps after {attempts} attempts")]
    LayerCapExhausted { level: u32, cap: usize, attempts: usize },
    #[error("insertion did not terminate within {0} rounds")]
    InsertionCapExhausted(usize),
    #[error("enumeration budget of {0} profiles exceeded")]
    BudgetExceeded(usize),
    #[error("profile does not match the game: {0}")]
    InvalidProfile(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("trace format error: {0}")]
    Trace(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
