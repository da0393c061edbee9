//! Source models and the cost-preserving reductions between them:
//!
//! * classic congestion games with (optional) priorities, where only the most
//!   prioritized users of a resource get a finite delay;
//! * affine games with consistent priorities;
//! * priority games into two-sided markets, and markets into player-specific
//!   priority games.

use std::collections::BTreeMap;

use crate::congestion::{CongestionModel, Placement};
use crate::cost::ExtCost;
use crate::error::{Error, Result};
use crate::markets::{build_market, MarketDelay, MarketGame, RawMarket};
use crate::matroid::StrategySpace;
use crate::model::{build_game, Delays, DelaySpec, PriorityFunction, PriorityGame, RawDelay, RawDelays, RawGame};
use crate::scalar::{count, Scalar};
use crate::{PlayerId, ResourceId};

/// A congestion game with priorities and univariate delays `values[y - 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicGame<S> {
    pub resources: Vec<String>,
    pub spaces: Vec<StrategySpace>,
    pub priorities: PriorityFunction,
    pub delays: Vec<Vec<ExtCost<S>>>,
}

/// An affine game with one priority ranking shared by all resources.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineGame<S> {
    pub resources: Vec<String>,
    pub spaces: Vec<StrategySpace>,
    pub priority: Vec<u32>,
    /// `(alpha, beta)` per resource.
    pub params: Vec<(S, S)>,
}

impl<S: Scalar> ClassicGame<S> {
    /// A classic game without priorities.
    pub fn plain(resources: Vec<String>, spaces: Vec<StrategySpace>, delays: Vec<Vec<ExtCost<S>>>) -> Self {
        let priorities = PriorityFunction::constant(spaces.len(), resources.len());
        ClassicGame { resources, spaces, priorities, delays }
    }

    fn univariate(&self, r: ResourceId, y: usize) -> Result<ExtCost<S>> {
        self.delays[r.0]
            .get(y - 1)
            .cloned()
            .ok_or(Error::OutOfBound { x: 0, y, bound: self.delays[r.0].len() })
    }

    /// Delay at `r` for `player` given the priorities of the other users.
    fn delay_among(&self, r: ResourceId, player: PlayerId, others: &[PlayerId]) -> Result<ExtCost<S>> {
        let own = self.priorities.get(r, player);
        let top = others.iter().map(|&o| self.priorities.get(r, o)).min().map_or(own, |m| m.min(own));
        if own > top {
            return Ok(ExtCost::Infinite);
        }
        let at_top = 1 + others.iter().filter(|&&o| self.priorities.get(r, o) == top).count();
        self.univariate(r, at_top)
    }
}

impl<S: Scalar> CongestionModel<S> for ClassicGame<S> {
    fn n_players(&self) -> usize {
        self.spaces.len()
    }

    fn n_resources(&self) -> usize {
        self.resources.len()
    }

    fn space(&self, player: PlayerId) -> &StrategySpace {
        &self.spaces[player.0]
    }

    fn resource_name(&self, r: ResourceId) -> &str {
        &self.resources[r.0]
    }

    fn player_cost<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId) -> Result<ExtCost<S>> {
        let strategy = placement.strategy(player).ok_or(Error::PlayerNotPlaced(player.0))?;
        let mut total = ExtCost::zero();
        for r in strategy.iter() {
            total = total + self.delay_among(r, player, &placement.users_of(r, Some(player)))?;
        }
        Ok(total)
    }

    fn entry_weight<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId, r: ResourceId) -> Result<ExtCost<S>> {
        self.delay_among(r, player, &placement.users_of(r, Some(player)))
    }
}

impl<S: Scalar> AffineGame<S> {
    fn delay_among(&self, r: ResourceId, player: PlayerId, others: &[PlayerId]) -> ExtCost<S> {
        let own = self.priority[player.0];
        let ahead = others.iter().filter(|o| self.priority[o.0] < own).count();
        let tied = 1 + others.iter().filter(|o| self.priority[o.0] == own).count();
        let (alpha, beta) = &self.params[r.0];
        let expected = count::<S>(ahead) + (count::<S>(tied) + S::one()) / S::from_ratio(2, 1);
        ExtCost::finite(alpha.clone() * expected + beta.clone())
    }
}

impl<S: Scalar> CongestionModel<S> for AffineGame<S> {
    fn n_players(&self) -> usize {
        self.spaces.len()
    }

    fn n_resources(&self) -> usize {
        self.resources.len()
    }

    fn space(&self, player: PlayerId) -> &StrategySpace {
        &self.spaces[player.0]
    }

    fn resource_name(&self, r: ResourceId) -> &str {
        &self.resources[r.0]
    }

    fn player_cost<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId) -> Result<ExtCost<S>> {
        let strategy = placement.strategy(player).ok_or(Error::PlayerNotPlaced(player.0))?;
        Ok(strategy
            .iter()
            .map(|r| self.delay_among(r, player, &placement.users_of(r, Some(player))))
            .sum())
    }

    fn entry_weight<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId, r: ResourceId) -> Result<ExtCost<S>> {
        Ok(self.delay_among(r, player, &placement.users_of(r, Some(player))))
    }
}

/// `d'(x, y) = d(y)` for `x = 0`, `+∞` otherwise.
pub fn reduce_classic_to_priority<S: Scalar>(classic: &ClassicGame<S>) -> Result<PriorityGame<S>> {
    for (r, values) in classic.delays.iter().enumerate() {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NonMonotoneDelay(classic.resources[r].clone()));
        }
    }
    build_game(RawGame {
        resources: classic.resources.clone(),
        spaces: classic.spaces.clone(),
        priorities: classic.priorities.rows().to_vec(),
        delays: RawDelays::Shared(classic.delays.iter().map(|v| Some(RawDelay::Classic(v.clone()))).collect()),
    })
}

/// `d(x, y) = alpha (x + (y + 1) / 2) + beta` with the shared ranking.
pub fn reduce_affine_to_priority<S: Scalar>(affine: &AffineGame<S>) -> Result<PriorityGame<S>> {
    build_game(RawGame {
        resources: affine.resources.clone(),
        spaces: affine.spaces.clone(),
        priorities: vec![affine.priority.clone(); affine.resources.len()],
        delays: RawDelays::Shared(
            affine
                .params
                .iter()
                .map(|(alpha, beta)| Some(RawDelay::Affine { alpha: alpha.clone(), beta: beta.clone() }))
                .collect(),
        ),
    })
}

/// `c_{i,e} = p_e(i)` and `d'(c, x, y) = d(x, y)`.
pub fn reduce_priority_to_market<S: Scalar>(game: &PriorityGame<S>) -> Result<MarketGame<S>> {
    let Delays::Shared(delays) = game.delays() else {
        return Err(Error::PlayerSpecificInput);
    };
    let costs = game
        .players()
        .map(|p| {
            game.resource_ids()
                .map(|r| {
                    game.space(p)
                        .ground()
                        .contains(&r)
                        .then(|| S::from_ratio(i64::from(game.priority(r, p)), 1))
                })
                .collect()
        })
        .collect();
    build_market(RawMarket {
        resources: game.resource_names().to_vec(),
        spaces: game.spaces().to_vec(),
        costs,
        delays: delays.iter().cloned().map(|d| Some(MarketDelay::Uniform(d))).collect(),
    })
}

/// `p_e(i)` is the dense rank of `c_{i,e}` at `e`, and
/// `d'_{i,e}(x, y) = d_e(c_{i,e}, x, y)`. Players without a cost at `e`
/// never use it; they get the least prioritized rank plus one.
pub fn reduce_market_to_playerspecific<S: Scalar>(market: &MarketGame<S>) -> Result<PriorityGame<S>> {
    let n = market.n_players();
    let m = market.n_resources();
    let mut priorities = vec![vec![0u32; n]; m];
    let mut overrides = BTreeMap::new();
    for r in (0..m).map(ResourceId) {
        let outside = market.cost_levels(r).len() as u32 + 1;
        for p in (0..n).map(PlayerId) {
            match market.rank(p, r) {
                Some(k) => {
                    priorities[r.0][p.0] = k;
                    let spec: DelaySpec<S> = market.delay(r).at_rank(k).cloned().ok_or(Error::OutOfBound {
                        x: 0,
                        y: 1,
                        bound: 0,
                    })?;
                    if market.spaces()[p.0].ground().contains(&r) {
                        overrides.insert((p, r), RawDelay::Built(spec));
                    }
                }
                None => priorities[r.0][p.0] = outside,
            }
        }
    }
    build_game(RawGame {
        resources: market.resource_names().to_vec(),
        spaces: market.spaces().to_vec(),
        priorities,
        delays: RawDelays::PlayerSpecific { shared: vec![None; m], overrides },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::Profile;
    use crate::oracle::{brute_force_pne, enumerate_profiles, EnumerationBudget};
    use crate::testutil::*;
    use crate::{Cost, Rational};

    fn rat(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn same_costs<M1: CongestionModel<Rational>, M2: CongestionModel<Rational>>(a: &M1, b: &M2) {
        let mut budget = EnumerationBudget::default();
        for p in enumerate_profiles(a, &mut budget) {
            let p = p.unwrap();
            for pl in a.players() {
                assert_eq!(a.player_cost(&p, pl).unwrap(), b.player_cost(&p, pl).unwrap(), "{p:?} player {pl}");
            }
        }
    }

    #[test]
    fn classic_squares_2x2() {
        let squares: Vec<Cost> = (1..=2).map(|y| Cost::from_int(y * y)).collect();
        let classic = ClassicGame::plain(
            vec!["a".into(), "b".into()],
            vec![StrategySpace::singleton([A, B]); 2],
            vec![squares.clone(), squares],
        );
        let reduced = reduce_classic_to_priority(&classic).unwrap();
        same_costs(&classic, &reduced);
        assert_eq!(reduced.evaluate_delay(A, 0, 2, None).unwrap(), Cost::from_int(4));
        assert_eq!(reduced.evaluate_delay(A, 1, 1, None).unwrap(), Cost::Infinite);
    }

    #[test]
    fn ackermann_three_players() {
        let values: Vec<Cost> = (1..=3).map(Cost::from_int).collect();
        let classic = ClassicGame {
            resources: vec!["a".into(), "b".into()],
            spaces: vec![StrategySpace::singleton([A, B]); 3],
            priorities: PriorityFunction::per_resource(vec![vec![1, 2, 2], vec![2, 1, 1]]),
            delays: vec![values.clone(), values],
        };
        let reduced = reduce_classic_to_priority(&classic).unwrap();
        same_costs(&classic, &reduced);
        let all_a = Profile::singletons([A, A, A]);
        assert_eq!(classic.player_cost(&all_a, PlayerId(1)).unwrap(), Cost::Infinite);
        assert_eq!(classic.player_cost(&all_a, PlayerId(0)).unwrap(), Cost::from_int(1));
    }

    #[test]
    fn classic_rejects_decreasing_delay() {
        let classic = ClassicGame::plain(
            vec!["a".into()],
            vec![StrategySpace::singleton([A]); 2],
            vec![vec![Cost::from_int(3), Cost::from_int(1)]],
        );
        assert!(matches!(reduce_classic_to_priority(&classic), Err(Error::NonMonotoneDelay(_))));
    }

    #[test]
    fn affine_three_on_one() {
        let affine = AffineGame {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([A]); 3],
            priority: vec![1, 2, 2],
            params: vec![(rat(2), rat(1))],
        };
        let reduced = reduce_affine_to_priority(&affine).unwrap();
        let p = Profile::singletons([A, A, A]);
        let costs: Vec<Cost> = (0..3).map(|i| reduced.player_cost(&p, PlayerId(i)).unwrap()).collect();
        assert_eq!(costs, vec![Cost::from_int(3), Cost::from_int(6), Cost::from_int(6)]);
        same_costs(&affine, &reduced);
    }

    #[test]
    fn affine_zero_slope() {
        let affine = AffineGame {
            resources: vec!["e".into(), "f".into()],
            spaces: vec![StrategySpace::singleton([A, B]); 2],
            priority: vec![1, 1],
            params: vec![(rat(0), rat(5)), (rat(0), rat(5))],
        };
        let reduced = reduce_affine_to_priority(&affine).unwrap();
        same_costs(&affine, &reduced);
        assert_eq!(reduced.player_cost(&Profile::singletons([A, A]), P1).unwrap(), Cost::from_int(5));
    }

    #[test]
    fn priority_to_market_on_t1() {
        let g = t1();
        let market = reduce_priority_to_market(&g).unwrap();
        assert_eq!(market.cost(P1, A), Some(&rat(1)));
        assert_eq!(market.cost(P2, A), Some(&rat(2)));
        assert_eq!(market.cost(P1, B), Some(&rat(2)));
        assert_eq!(market.cost(P2, B), Some(&rat(1)));
        same_costs(&g, &market);
        let back = reduce_market_to_playerspecific(&market).unwrap();
        same_costs(&g, &back);
        let mut b1 = EnumerationBudget::default();
        let mut b2 = EnumerationBudget::default();
        assert_eq!(brute_force_pne(&g, &mut b1).unwrap(), brute_force_pne(&back, &mut b2).unwrap());
    }

    #[test]
    fn priority_to_market_rejects_player_specific() {
        let g = reduce_market_to_playerspecific(&reduce_priority_to_market(&t1()).unwrap()).unwrap();
        assert!(matches!(reduce_priority_to_market(&g), Err(Error::PlayerSpecificInput)));
    }

    #[test]
    fn market_ties_become_equal_priorities() {
        let market = build_market(RawMarket {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([A]); 3],
            costs: vec![vec![Some(rat(4))], vec![Some(rat(4))], vec![Some(rat(9))]],
            delays: vec![Some(MarketDelay::Uniform(DelaySpec::table_from_fn(3, two_x_plus_y)))],
        })
        .unwrap();
        let g = reduce_market_to_playerspecific(&market).unwrap();
        assert_eq!(g.priorities().row(A), &[1, 1, 2]);
        same_costs(&market, &g);
    }
}
