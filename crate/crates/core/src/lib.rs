//! Priority-based congestion games.
//!
//! Each resource ranks the players with a priority function and charges a
//! user `d_e(x, y)`, where `x` is the number of strictly more prioritized
//! co-users and `y` the number of users at the user's own level. The crate
//! provides validated game construction, exact cost and potential
//! evaluation, the equilibrium solvers (layered dynamics for consistent
//! priorities, the insertion algorithm for player-specific singleton games,
//! better-response dynamics with lazy matroid moves), reductions from the
//! classic, affine and two-sided market models, and a brute-force oracle.
//!
//! All numeric code is generic over [`Scalar`]. The aliases at the crate root
//! fix it to [`Rational`] (arbitrary precision), which is what the file
//! formats and the CLI use.

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod congestion;
pub mod cost;
pub mod dynamics;
pub mod error;
pub mod generate;
pub mod io;
pub mod markets;
pub mod matroid;
pub mod model;
pub mod oracle;
pub mod potentials;
pub mod reductions;
pub mod scalar;

#[cfg(test)]
pub(crate) mod testutil;

pub use congestion::{CongestionModel, Placement, Profile, State};
pub use cost::ExtCost;
pub use error::{Error, Result, Violation};
pub use markets::MarketGame;
pub use matroid::{Strategy, StrategySpace};
pub use model::{build_game, DelaySpec, PriorityGame, RawGame};
pub use potentials::PotentialValue;
pub use scalar::Scalar;

/// Zero-based player index. Displayed one-based, as in instance files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerId(pub usize);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

/// Zero-based resource index, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResourceId(pub usize);

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type Rational = num_rational::BigRational;
pub type Cost = ExtCost<Rational>;
pub type Game = PriorityGame<Rational>;
pub type Market = MarketGame<Rational>;
pub type ClassicGame = reductions::ClassicGame<Rational>;
pub type AffineGame = reductions::AffineGame<Rational>;
pub type Potential = PotentialValue<Rational>;
