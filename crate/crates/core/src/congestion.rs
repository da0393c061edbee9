//! Profiles, partial states and cost evaluation.

use std::collections::BTreeMap;

use crate::cost::ExtCost;
use crate::error::{Error, Result};
use crate::matroid::{Strategy, StrategySpace};
use crate::model::{CongestionView, PriorityGame};
use crate::potentials::PotentialValue;
use crate::scalar::Scalar;
use crate::{PlayerId, ResourceId};

/// Read access to an assignment of strategies to (some) players.
pub trait Placement {
    fn n_players(&self) -> usize;
    fn strategy(&self, player: PlayerId) -> Option<&Strategy>;

    /// Placed players using `r`, excluding `skip`.
    fn users_of(&self, r: ResourceId, skip: Option<PlayerId>) -> Vec<PlayerId> {
        (0..self.n_players())
            .map(PlayerId)
            .filter(|&p| Some(p) != skip)
            .filter(|&p| self.strategy(p).is_some_and(|s| s.contains(r)))
            .collect()
    }
}

/// A strategy for every player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<Strategy>);

impl Profile {
    pub fn get(&self, p: PlayerId) -> &Strategy {
        &self.0[p.0]
    }

    /// A copy with `player` switched to `s`.
    pub fn with(&self, player: PlayerId, s: Strategy) -> Profile {
        let mut next = self.clone();
        next.0[player.0] = s;
        next
    }

    pub fn to_state(&self) -> State {
        State(self.0.iter().cloned().map(Some).collect())
    }

    /// Singleton profile from resource choices.
    pub fn singletons<I: IntoIterator<Item = ResourceId>>(choices: I) -> Profile {
        Profile(choices.into_iter().map(Strategy::single).collect())
    }
}

impl Placement for Profile {
    fn n_players(&self) -> usize {
        self.0.len()
    }

    fn strategy(&self, player: PlayerId) -> Option<&Strategy> {
        self.0.get(player.0)
    }
}

/// A partial assignment: players outside `N(S)` are absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct State(pub Vec<Option<Strategy>>);

impl State {
    pub fn empty(n: usize) -> Self {
        State(vec![None; n])
    }

    pub fn place(&mut self, player: PlayerId, s: Strategy) {
        self.0[player.0] = Some(s);
    }

    pub fn remove(&mut self, player: PlayerId) -> Option<Strategy> {
        self.0[player.0].take()
    }

    pub fn covers(&self, player: PlayerId) -> bool {
        self.0[player.0].is_some()
    }

    pub fn covered(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.0.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(p, _)| PlayerId(p))
    }

    pub fn into_profile(self) -> Option<Profile> {
        self.0.into_iter().collect::<Option<Vec<_>>>().map(Profile)
    }
}

impl Placement for State {
    fn n_players(&self) -> usize {
        self.0.len()
    }

    fn strategy(&self, player: PlayerId) -> Option<&Strategy> {
        self.0.get(player.0).and_then(Option::as_ref)
    }
}

/// Any game whose costs are sums of per-resource delays.
pub trait CongestionModel<S: Scalar> {
    fn n_players(&self) -> usize;
    fn n_resources(&self) -> usize;
    fn space(&self, player: PlayerId) -> &StrategySpace;
    fn resource_name(&self, r: ResourceId) -> &str;

    /// Cost of a placed player, evaluated on the placement as given.
    fn player_cost<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId) -> Result<ExtCost<S>>;

    /// Delay `r` would impose on `player` if `player` used it, everyone else
    /// as placed. The player's own current membership is ignored.
    fn entry_weight<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId, r: ResourceId) -> Result<ExtCost<S>>;

    /// A potential whose strict decrease certifies better-response moves, if
    /// the game class has one.
    fn dynamics_potential(&self, _profile: &Profile) -> Option<PotentialValue<S>> {
        None
    }

    /// The priority-game view, when this model is one.
    fn as_priority_game(&self) -> Option<&PriorityGame<S>> {
        None
    }

    fn players(&self) -> Vec<PlayerId> {
        (0..self.n_players()).map(PlayerId).collect()
    }

    /// Checks that `profile` assigns every player one of their strategies.
    fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.0.len() != self.n_players() {
            return Err(Error::InvalidProfile(format!(
                "{} strategies for {} players",
                profile.0.len(),
                self.n_players()
            )));
        }
        for p in self.players() {
            if !self.space(p).is_base(profile.get(p)) {
                return Err(Error::InvalidProfile(format!(
                    "strategy {} of player {} is not in their strategy space",
                    profile.get(p),
                    p
                )));
            }
        }
        Ok(())
    }
}

impl<S: Scalar> PriorityGame<S> {
    /// Per-level user counts at `r`.
    pub fn congestion_view<P: Placement + ?Sized>(&self, placement: &P, r: ResourceId) -> CongestionView {
        self.view_without(placement, r, None)
    }

    fn view_without<P: Placement + ?Sized>(&self, placement: &P, r: ResourceId, skip: Option<PlayerId>) -> CongestionView {
        let mut view = CongestionView::default();
        for p in placement.users_of(r, skip) {
            view.add(self.priority(r, p));
        }
        view
    }
}

impl<S: Scalar> CongestionModel<S> for PriorityGame<S> {
    fn n_players(&self) -> usize {
        PriorityGame::n_players(self)
    }

    fn n_resources(&self) -> usize {
        PriorityGame::n_resources(self)
    }

    fn space(&self, player: PlayerId) -> &StrategySpace {
        PriorityGame::space(self, player)
    }

    fn resource_name(&self, r: ResourceId) -> &str {
        PriorityGame::resource_name(self, r)
    }

    fn player_cost<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId) -> Result<ExtCost<S>> {
        let strategy = placement.strategy(player).ok_or(Error::PlayerNotPlaced(player.0))?;
        let mut total = ExtCost::zero();
        for r in strategy.iter() {
            let view = self.congestion_view(placement, r);
            let q = self.priority(r, player);
            total = total + self.delay(r, player).evaluate(view.below(q), view.at(q))?;
        }
        Ok(total)
    }

    fn entry_weight<P: Placement + ?Sized>(&self, placement: &P, player: PlayerId, r: ResourceId) -> Result<ExtCost<S>> {
        let view = self.view_without(placement, r, Some(player));
        let q = self.priority(r, player);
        self.delay(r, player).evaluate(view.below(q), view.at(q) + 1)
    }

    fn dynamics_potential(&self, profile: &Profile) -> Option<PotentialValue<S>> {
        crate::potentials::lex_potential_singleton(self, profile).ok()
    }

    fn as_priority_game(&self) -> Option<&PriorityGame<S>> {
        Some(self)
    }
}

/// Entry weights over the player's ground set.
pub fn entry_weights<S: Scalar, M: CongestionModel<S>, P: Placement + ?Sized>(
    model: &M,
    placement: &P,
    player: PlayerId,
) -> Result<BTreeMap<ResourceId, ExtCost<S>>> {
    model
        .space(player)
        .ground()
        .into_iter()
        .map(|r| Ok((r, model.entry_weight(placement, player, r)?)))
        .collect()
}

pub(crate) fn strategy_weight<S: Scalar>(s: &Strategy, weights: &BTreeMap<ResourceId, ExtCost<S>>) -> ExtCost<S> {
    s.iter()
        .map(|r| weights.get(&r).cloned().unwrap_or(ExtCost::Infinite))
        .sum()
}

/// A cheapest strategy under additive `weights`: greedy for matroid spaces,
/// enumeration otherwise (first minimum in id-lexicographic order).
pub(crate) fn cheapest_strategy<S: Scalar>(
    space: &StrategySpace,
    weights: &BTreeMap<ResourceId, ExtCost<S>>,
) -> Result<(Strategy, ExtCost<S>)> {
    if space.is_matroid() {
        let s = space.greedy_min_base(weights)?;
        let w = strategy_weight(&s, weights);
        return Ok((s, w));
    }
    let mut best: Option<(Strategy, ExtCost<S>)> = None;
    for s in space.all_strategies() {
        let w = strategy_weight(&s, weights);
        if best.as_ref().is_none_or(|(_, bw)| w < *bw) {
            best = Some((s, w));
        }
    }
    best.ok_or(Error::NotABase)
}

pub fn player_cost<S: Scalar, M: CongestionModel<S>, P: Placement + ?Sized>(
    model: &M,
    placement: &P,
    player: PlayerId,
) -> Result<ExtCost<S>> {
    model.player_cost(placement, player)
}

/// Does switching to `new_strategy` strictly lower the player's cost?
pub fn is_better_response<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    profile: &Profile,
    player: PlayerId,
    new_strategy: &Strategy,
) -> Result<bool> {
    let before = model.player_cost(profile, player)?;
    let after = model.player_cost(&profile.with(player, new_strategy.clone()), player)?;
    Ok(after < before)
}

/// Whether a placed player can strictly improve against the current placement.
pub fn has_better_response<S: Scalar, M: CongestionModel<S>, P: Placement + ?Sized>(
    model: &M,
    placement: &P,
    player: PlayerId,
) -> Result<bool> {
    let current = model.player_cost(placement, player)?;
    let weights = entry_weights(model, placement, player)?;
    let (_, best) = cheapest_strategy(model.space(player), &weights)?;
    Ok(best < current)
}

/// No player has a better response. Matroid players are checked exactly via
/// greedy over entry weights, explicit players by enumeration.
pub fn is_pure_nash<S: Scalar, M: CongestionModel<S>>(model: &M, profile: &Profile) -> Result<bool> {
    model.check_profile(profile)?;
    for p in model.players() {
        if has_better_response(model, profile, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}
