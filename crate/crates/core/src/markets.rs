//! Generalized correlated two-sided markets with ties.
//!
//! Player `i` and resource `e` share a cost `c_{i,e}`. A user of `e` pays
//! `d_e(c, x, y)` where `c = c_{i,e}`, `x` counts co-users with a strictly
//! smaller cost at `e` and `y` those with the same cost (including `i`).
//! Trivariate delays are stored per cost level: the distinct cost values at a
//! resource are densely ranked `1, 2, ...` and each rank owns a bivariate
//! [`DelaySpec`].

use crate::congestion::{CongestionModel, Placement, Profile};
use crate::cost::ExtCost;
use crate::error::{Error, Result, Violation};
use crate::matroid::StrategySpace;
use crate::model::{build_delay, Axiom, CongestionView, DelaySpec, RawDelay};
use crate::potentials::PotentialValue;
use crate::scalar::Scalar;
use crate::{PlayerId, ResourceId};

#[derive(Clone, Debug, PartialEq)]
pub enum MarketDelay<S> {
    /// `d(c, x, y) = d(x, y)` at every cost level.
    Uniform(DelaySpec<S>),
    /// `levels[k - 1]` is the delay at cost rank `k`.
    PerLevel(Vec<DelaySpec<S>>),
}

impl<S: Scalar> MarketDelay<S> {
    pub fn at_rank(&self, rank: u32) -> Option<&DelaySpec<S>> {
        match self {
            MarketDelay::Uniform(d) => Some(d),
            MarketDelay::PerLevel(levels) => levels.get((rank as usize).checked_sub(1)?),
        }
    }

    pub fn evaluate(&self, rank: u32, x: usize, y: usize) -> Result<ExtCost<S>> {
        self.at_rank(rank)
            .ok_or(Error::OutOfBound { x, y, bound: 0 })?
            .evaluate(x, y)
    }
}

#[derive(Clone, Debug)]
pub struct RawMarket<S> {
    pub resources: Vec<String>,
    pub spaces: Vec<StrategySpace>,
    /// `[player][resource]`; required wherever the resource is in the player's ground set.
    pub costs: Vec<Vec<Option<S>>>,
    pub delays: Vec<Option<MarketDelay<S>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarketGame<S> {
    resources: Vec<String>,
    spaces: Vec<StrategySpace>,
    costs: Vec<Vec<Option<S>>>,
    /// Dense cost rank of each (player, resource) pair with a cost.
    ranks: Vec<Vec<Option<u32>>>,
    /// Distinct cost values per resource, ascending; rank `k` is `levels[r][k - 1]`.
    levels: Vec<Vec<S>>,
    delays: Vec<MarketDelay<S>>,
    users: Vec<usize>,
}

/// Dense ranks (`1, 2, 2, 3`) of the present values; ties share a rank.
pub fn dense_ranks<S: Scalar>(values: &[Option<S>]) -> (Vec<Option<u32>>, Vec<S>) {
    let mut distinct: Vec<S> = values.iter().flatten().cloned().collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).expect("costs are ordered"));
    distinct.dedup();
    let ranks = values
        .iter()
        .map(|v| {
            v.as_ref().map(|v| {
                let pos = distinct.iter().position(|d| d == v).expect("value was collected");
                pos as u32 + 1
            })
        })
        .collect();
    (ranks, distinct)
}

pub fn build_market<S: Scalar>(raw: RawMarket<S>) -> Result<MarketGame<S>> {
    let n = raw.spaces.len();
    let m = raw.resources.len();
    let mut violations = Vec::new();

    let mut users = vec![0usize; m];
    for (p, space) in raw.spaces.iter().enumerate() {
        if space.ground().is_empty() {
            violations.push(Violation::EmptyStrategySpace { player: p });
            continue;
        }
        match space.validate(m) {
            Ok(()) => space.ground().iter().for_each(|r| users[r.0] += 1),
            Err(reason) => violations.push(Violation::InvalidStrategySpace { player: p, reason }),
        }
    }

    if raw.costs.len() != n || raw.costs.iter().any(|row| row.len() != m) {
        violations.push(Violation::Other(format!("cost matrix must be {n} x {m}")));
        return Err(Error::Validation(violations));
    }
    for (p, space) in raw.spaces.iter().enumerate() {
        for r in space.ground().into_iter().filter(|r| r.0 < m) {
            match &raw.costs[p][r.0] {
                None => violations.push(Violation::MissingCost { resource: raw.resources[r.0].clone(), player: p }),
                Some(c) if !c.is_nonnegative() => violations.push(Violation::Other(format!(
                    "cost of player {} at resource {} is negative",
                    p + 1,
                    raw.resources[r.0]
                ))),
                Some(_) => {}
            }
        }
    }

    let mut ranks = vec![vec![None; m]; n];
    let mut levels = Vec::with_capacity(m);
    for r in 0..m {
        let column: Vec<Option<S>> = raw.costs.iter().map(|row| row[r].clone()).collect();
        let (col_ranks, distinct) = dense_ranks(&column);
        for (p, rank) in col_ranks.into_iter().enumerate() {
            ranks[p][r] = rank;
        }
        levels.push(distinct);
    }

    let mut delays = Vec::with_capacity(m);
    for r in 0..m {
        let name = &raw.resources[r];
        let Some(delay) = raw.delays.get(r).and_then(Option::as_ref) else {
            violations.push(Violation::MissingDelay { resource: name.clone(), player: None });
            continue;
        };
        if let Some(d) = validate_market_delay(delay, name, levels[r].len(), users[r], &mut violations) {
            delays.push(d);
        }
    }

    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(MarketGame { resources: raw.resources, spaces: raw.spaces, costs: raw.costs, ranks, levels, delays, users })
}

fn validate_market_delay<S: Scalar>(
    delay: &MarketDelay<S>,
    name: &str,
    n_ranks: usize,
    required: usize,
    violations: &mut Vec<Violation>,
) -> Option<MarketDelay<S>> {
    match delay {
        MarketDelay::Uniform(d) => {
            build_delay(&RawDelay::Built(d.clone()), name, None, required, violations).map(MarketDelay::Uniform)
        }
        MarketDelay::PerLevel(specs) => {
            if specs.len() < n_ranks {
                violations.push(Violation::Other(format!(
                    "market delay of resource {name} has {} cost levels, the costs need {n_ranks}",
                    specs.len()
                )));
                return None;
            }
            let before = violations.len();
            for (k, spec) in specs.iter().enumerate() {
                let label = format!("{name} (cost level {})", k + 1);
                build_delay(&RawDelay::Built(spec.clone()), &label, None, required, violations);
            }
            if violations.len() > before {
                return None;
            }
            for k in 1..specs.len() {
                for s in 1..=required {
                    for x in 0..s {
                        let y = s - x;
                        let (Ok(lo), Ok(hi)) = (specs[k - 1].evaluate(x, y), specs[k].evaluate(x, y)) else {
                            continue;
                        };
                        if lo > hi {
                            violations.push(Violation::DelayAxiom {
                                resource: name.to_owned(),
                                player: None,
                                axiom: Axiom::MonotoneC,
                                at: (x, y),
                                detail: format!(
                                    "monotone-c axiom fails at ({x},{y}): level {k} gives {lo} > level {} gives {hi}",
                                    k + 1
                                ),
                            });
                        }
                    }
                }
            }
            (violations.len() == before).then(|| delay.clone())
        }
    }
}

impl<S: Scalar> MarketGame<S> {
    pub fn n_players(&self) -> usize {
        self.spaces.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn resource_names(&self) -> &[String] {
        &self.resources
    }

    pub fn spaces(&self) -> &[StrategySpace] {
        &self.spaces
    }

    pub fn cost(&self, p: PlayerId, r: ResourceId) -> Option<&S> {
        self.costs[p.0][r.0].as_ref()
    }

    pub fn costs(&self) -> &[Vec<Option<S>>] {
        &self.costs
    }

    /// Dense rank of `c_{p,r}` among the costs at `r`.
    pub fn rank(&self, p: PlayerId, r: ResourceId) -> Option<u32> {
        self.ranks[p.0][r.0]
    }

    /// Distinct cost values at `r`, ascending.
    pub fn cost_levels(&self, r: ResourceId) -> &[S] {
        &self.levels[r.0]
    }

    pub fn delay(&self, r: ResourceId) -> &MarketDelay<S> {
        &self.delays[r.0]
    }

    pub fn delays(&self) -> &[MarketDelay<S>] {
        &self.delays
    }

    pub fn required_bound(&self, r: ResourceId) -> usize {
        self.users[r.0]
    }

    pub fn is_singleton(&self) -> bool {
        self.spaces.iter().all(|s| s.singleton_resources().is_some())
    }

    fn rank_of(&self, p: PlayerId, r: ResourceId) -> Result<u32> {
        self.rank(p, r).ok_or_else(|| {
            Error::InvalidProfile(format!("player {p} has no cost at resource {}", self.resources[r.0]))
        })
    }

    /// Users at `r` grouped by cost rank, optionally leaving one player out.
    pub fn market_view<P: Placement + ?Sized>(&self, placement: &P, r: ResourceId, skip: Option<PlayerId>) -> CongestionView {
        let mut view = CongestionView::default();
        for p in placement.users_of(r, skip) {
            view.add(self.rank(p, r).expect("users of r have a cost at r"));
        }
        view
    }
}

impl<S: Scalar> CongestionModel<S> for MarketGame<S> {
    fn n_players(&self) -> usize {
        MarketGame::n_players(self)
    }

    fn n_resources(&self) -> usize {
        MarketGame::n_resources(self)
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
            let k = self.rank_of(player, r)?;
            let view = self.market_view(placement, r, None);
            total = total + self.delays[r.0].evaluate(k, view.below(k), view.at(k))?;
        }
        Ok(total)
    }

    fn entry_weight<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId, r: ResourceId) -> Result<ExtCost<S>> {
        let k = self.rank_of(player, r)?;
        let view = self.market_view(placement, r, Some(player));
        self.delays[r.0].evaluate(k, view.below(k), view.at(k) + 1)
    }

    fn dynamics_potential(&self, profile: &Profile) -> Option<PotentialValue<S>> {
        crate::potentials::market_lex_potential(self, profile).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::{CongestionModel, Profile};
    use crate::{Cost, Rational};

    const E: ResourceId = ResourceId(0);

    fn rat(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    /// One resource, both players on it, `d(c, x, y) = c + x + y - 1`.
    fn shared_market(c: [i64; 2]) -> MarketGame<Rational> {
        let levels: Vec<DelaySpec<Rational>> = {
            let mut distinct = c.to_vec();
            distinct.sort_unstable();
            distinct.dedup();
            distinct
                .into_iter()
                .map(|cv| DelaySpec::table_from_fn(2, move |x, y| Cost::from_int(cv + x as i64 + y as i64 - 1)))
                .collect()
        };
        build_market(RawMarket {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([E]); 2],
            costs: c.iter().map(|&v| vec![Some(rat(v))]).collect(),
            delays: vec![Some(MarketDelay::PerLevel(levels))],
        })
        .unwrap()
    }

    #[test]
    fn costs_on_shared_resource() {
        let g = shared_market([1, 2]);
        let p = Profile::singletons([E, E]);
        assert_eq!(g.player_cost(&p, PlayerId(0)).unwrap(), Cost::from_int(1));
        assert_eq!(g.player_cost(&p, PlayerId(1)).unwrap(), Cost::from_int(3));
    }

    #[test]
    fn ties_share_a_rank() {
        let g = shared_market([1, 1]);
        assert_eq!(g.rank(PlayerId(0), E), g.rank(PlayerId(1), E));
        let p = Profile::singletons([E, E]);
        assert_eq!(g.player_cost(&p, PlayerId(1)).unwrap(), Cost::from_int(2));
    }

    #[test]
    fn dense_ranking() {
        let (ranks, distinct) = dense_ranks(&[Some(rat(5)), Some(rat(2)), None, Some(rat(5)), Some(rat(7))]);
        assert_eq!(ranks, vec![Some(2), Some(1), None, Some(2), Some(3)]);
        assert_eq!(distinct, vec![rat(2), rat(5), rat(7)]);
    }

    #[test]
    fn lone_player_pays_table_value() {
        // d(c,0,1) need not equal c
        let g = build_market(RawMarket {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([E])],
            costs: vec![vec![Some(rat(4))]],
            delays: vec![Some(MarketDelay::PerLevel(vec![DelaySpec::table_from_fn(1, |_, _| Cost::from_int(9))]))],
        })
        .unwrap();
        assert_eq!(g.player_cost(&Profile::singletons([E]), PlayerId(0)).unwrap(), Cost::from_int(9));
    }

    #[test]
    fn classic_embedding_blocks_second_rank() {
        let classic = |c: i64| DelaySpec::Classic(vec![Cost::from_int(c), Cost::from_int(c + 1)]);
        let g = build_market(RawMarket {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([E]); 2],
            costs: vec![vec![Some(rat(1))], vec![Some(rat(3))]],
            delays: vec![Some(MarketDelay::PerLevel(vec![classic(1), classic(3)]))],
        })
        .unwrap();
        let p = Profile::singletons([E, E]);
        assert_eq!(g.player_cost(&p, PlayerId(1)).unwrap(), Cost::Infinite);
        assert_eq!(g.player_cost(&p, PlayerId(0)).unwrap(), Cost::from_int(1));
    }

    #[test]
    fn decreasing_in_cost_is_rejected() {
        let raw = RawMarket {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([E]); 2],
            costs: vec![vec![Some(rat(1))], vec![Some(rat(2))]],
            delays: vec![Some(MarketDelay::PerLevel(vec![
                DelaySpec::table_from_fn(2, |x, y| Cost::from_int(5 + (x + y) as i64)),
                DelaySpec::table_from_fn(2, |x, y| Cost::from_int((x + y) as i64)),
            ]))],
        };
        let Err(Error::Validation(v)) = build_market(raw) else { panic!("expected violations") };
        assert!(v.iter().any(|v| matches!(v, Violation::DelayAxiom { axiom: Axiom::MonotoneC, .. })));
    }

    #[test]
    fn missing_cost_is_rejected() {
        let raw = RawMarket::<Rational> {
            resources: vec!["e".into()],
            spaces: vec![StrategySpace::singleton([E])],
            costs: vec![vec![None]],
            delays: vec![Some(MarketDelay::Uniform(DelaySpec::table_from_fn(1, |_, _| Cost::from_int(1))))],
        };
        let Err(Error::Validation(v)) = build_market(raw) else { panic!("expected violations") };
        assert_eq!(v, vec![Violation::MissingCost { resource: "e".into(), player: 0 }]);
    }
}
