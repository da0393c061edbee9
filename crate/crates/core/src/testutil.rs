//! Small fixed instances shared by the unit tests.

use crate::matroid::StrategySpace;
use crate::model::{build_game, DelaySpec, RawDelay, RawDelays, RawGame};
use crate::{Cost, Game, PlayerId, Rational, ResourceId};

pub const A: ResourceId = ResourceId(0);
pub const B: ResourceId = ResourceId(1);
pub const P1: PlayerId = PlayerId(0);
pub const P2: PlayerId = PlayerId(1);

pub fn table(bound: usize, f: impl Fn(usize, usize) -> Cost) -> RawDelay<Rational> {
    RawDelay::Built(DelaySpec::table_from_fn(bound, f))
}

pub fn two_x_plus_y(x: usize, y: usize) -> Cost {
    Cost::from_int((2 * x + y) as i64)
}

/// Two players, resources a and b, both players may use either; a ranks
/// (1, 2), b ranks (2, 1); `d(x, y) = 2x + y` on both.
pub fn t1() -> Game {
    t1_with_priorities(vec![vec![1, 2], vec![2, 1]])
}

/// T1 with the consistent ranking (1, 2) at both resources.
pub fn t1_consistent() -> Game {
    t1_with_priorities(vec![vec![1, 2], vec![1, 2]])
}

pub fn t1_with_priorities(priorities: Vec<Vec<u32>>) -> Game {
    build_game(RawGame {
        resources: vec!["a".into(), "b".into()],
        spaces: vec![StrategySpace::singleton([A, B]); 2],
        priorities,
        delays: RawDelays::Shared(vec![Some(table(4, two_x_plus_y)), Some(table(4, two_x_plus_y))]),
    })
    .unwrap()
}

/// All players on one resource `a` with the given priorities.
pub fn single_resource_game(priorities: &[u32], f: impl Fn(usize, usize) -> Cost) -> Game {
    let n = priorities.len();
    build_game(RawGame {
        resources: vec!["a".into()],
        spaces: vec![StrategySpace::singleton([A]); n],
        priorities: vec![priorities.to_vec()],
        delays: RawDelays::Shared(vec![Some(table(n.max(2), f))]),
    })
    .unwrap()
}

/// One player choosing among `m` resources, `d(x, y) = 2x + y` everywhere.
pub fn single_player_game(m: usize) -> Game {
    build_game(RawGame {
        resources: (0..m).map(|r| format!("r{r}")).collect(),
        spaces: vec![StrategySpace::singleton((0..m).map(ResourceId))],
        priorities: vec![vec![1]; m],
        delays: RawDelays::Shared((0..m).map(|_| Some(table(2, two_x_plus_y))).collect()),
    })
    .unwrap()
}
