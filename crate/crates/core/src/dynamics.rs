//! Best responses, better-response dynamics and the equilibrium solvers.
//!
//! Every solver records a [`MoveTrace`] that [`crate::oracle::certify_trace`]
//! can replay step by step.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::congestion::{cheapest_strategy, entry_weights, has_better_response, CongestionModel, Placement, Profile, State};
use crate::cost::ExtCost;
use crate::error::{Error, Result};
use crate::matroid::Strategy;
use crate::model::PriorityGame;
use crate::potentials::{insertion_potential, insertion_potential_compare, insertion_tolerance, level_potential, InsertionPotential, PotentialValue};
use crate::scalar::Scalar;
use crate::PlayerId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InsertionCase {
    A,
    B1,
    B2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Better-response dynamics move.
    Move,
    /// Initial placement of a player of the given layer.
    Place(u32),
    /// Improvement move inside the given layer.
    LayerMove(u32),
    /// Insertion of a player, labelled with the case the round fell into.
    Insert(InsertionCase),
    /// A player leaves the state.
    Discard,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Move => f.write_str("move"),
            Phase::Place(q) => write!(f, "place@{q}"),
            Phase::LayerMove(q) => write!(f, "layer@{q}"),
            Phase::Insert(c) => write!(f, "insert-{c:?}"),
            Phase::Discard => f.write_str("discard"),
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let level = |v: &str| v.parse::<u32>().map_err(|_| Error::Trace(format!("bad phase {s:?}")));
        Ok(match s {
            "move" => Phase::Move,
            "discard" => Phase::Discard,
            "insert-A" => Phase::Insert(InsertionCase::A),
            "insert-B1" => Phase::Insert(InsertionCase::B1),
            "insert-B2" => Phase::Insert(InsertionCase::B2),
            _ => {
                if let Some(q) = s.strip_prefix("place@") {
                    Phase::Place(level(q)?)
                } else if let Some(q) = s.strip_prefix("layer@") {
                    Phase::LayerMove(level(q)?)
                } else {
                    return Err(Error::Trace(format!("unknown phase {s:?}")));
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step<S> {
    pub round: usize,
    pub phase: Phase,
    pub player: PlayerId,
    /// `None` when the player enters the state.
    pub from: Option<Strategy>,
    /// `None` when the player is discarded.
    pub to: Option<Strategy>,
    pub cost_before: Option<ExtCost<S>>,
    pub cost_after: Option<ExtCost<S>>,
    pub potential: Option<PotentialValue<S>>,
}

impl<S: Scalar> Eq for Step<S> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    CapReached,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Dynamics,
    Layered,
    Insertion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveTrace<S> {
    pub solver: SolverKind,
    /// Starting profile of better-response dynamics; the other solvers
    /// start from the empty state.
    pub start: Option<Profile>,
    pub steps: Vec<Step<S>>,
    pub status: Status,
    /// Layers restarted after hitting their step cap (their steps are dropped).
    pub restarts: usize,
}

impl<S: Scalar> Eq for MoveTrace<S> {}

impl<S> MoveTrace<S> {
    fn new(solver: SolverKind, start: Option<Profile>) -> Self {
        MoveTrace { solver, start, steps: Vec::new(), status: Status::Converged, restarts: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Policy {
    /// Players are scanned cyclically, starting after the previous mover.
    #[default]
    RoundRobin,
    /// The smallest-id player with a better response moves.
    FirstImprover,
    /// The player with the largest cost decrease moves (ties: smallest id).
    BestImprover,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "roundrobin" => Ok(Policy::RoundRobin),
            "first" => Ok(Policy::FirstImprover),
            "best" => Ok(Policy::BestImprover),
            _ => Err(format!("unknown policy {s:?} (expected roundrobin, first or best)")),
        }
    }
}

/// A cost-minimizing strategy against the other players as placed.
///
/// The current strategy is kept when it is optimal; otherwise matroid
/// spaces use the greedy base over entry weights and explicit spaces the
/// first optimal strategy in id-lexicographic order.
pub fn best_response<S: Scalar, M: CongestionModel<S>, P: Placement + ?Sized>(
    model: &M,
    placement: &P,
    player: PlayerId,
) -> Result<Strategy> {
    let weights = entry_weights(model, placement, player)?;
    let (best, best_weight) = cheapest_strategy(model.space(player), &weights)?;
    if let Some(current) = placement.strategy(player) {
        if model.player_cost(placement, player)? <= best_weight {
            return Ok(current.clone());
        }
    }
    Ok(best)
}

/// Each player's id-lexicographically smallest strategy.
pub fn initial_profile<S: Scalar, M: CongestionModel<S>>(model: &M) -> Profile {
    Profile(
        model
            .players()
            .into_iter()
            .map(|p| model.space(p).all_strategies().into_iter().next().expect("validated spaces are nonempty"))
            .collect(),
    )
}

/// Cost now and best achievable cost, when the player can strictly improve.
fn improvement<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    state: &State,
    player: PlayerId,
) -> Result<Option<(ExtCost<S>, ExtCost<S>)>> {
    let current = model.player_cost(state, player)?;
    let weights = entry_weights(model, state, player)?;
    let (_, best) = cheapest_strategy(model.space(player), &weights)?;
    Ok((best < current).then_some((current, best)))
}

/// Moves `player` to a best response, as a single step for non-matroid
/// spaces and as a lazy path of single swaps otherwise. Swaps between two
/// infinite costs are merged into the next strictly improving step. Records
/// at most `budget` steps; returns how many were recorded.
#[allow(clippy::too_many_arguments)]
fn move_player<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    state: &mut State,
    player: PlayerId,
    round: usize,
    phase: Phase,
    budget: usize,
    potential: &dyn Fn(&State) -> Option<PotentialValue<S>>,
    steps: &mut Vec<Step<S>>,
) -> Result<usize> {
    let current = state.strategy(player).cloned().ok_or(Error::PlayerNotPlaced(player.0))?;
    let target = best_response(model, state, player)?;
    if target == current || budget == 0 {
        return Ok(0);
    }
    let space = model.space(player);
    let path = if space.is_matroid() && current.len() > 1 {
        let weights = entry_weights(model, state, player)?;
        space.lazy_path(&current, &target, &weights)?
    } else {
        vec![current.clone(), target]
    };
    let mut recorded = 0;
    let mut anchor = current;
    let mut anchor_cost = model.player_cost(state, player)?;
    for next in path.into_iter().skip(1) {
        state.place(player, next.clone());
        let cost = model.player_cost(state, player)?;
        if cost < anchor_cost {
            steps.push(Step {
                round,
                phase,
                player,
                from: Some(anchor),
                to: Some(next.clone()),
                cost_before: Some(anchor_cost),
                cost_after: Some(cost.clone()),
                potential: potential(state),
            });
            recorded += 1;
            anchor = next;
            anchor_cost = cost;
            if recorded == budget {
                break;
            }
        }
    }
    // drop unrecorded trailing swaps so the state matches the trace
    state.place(player, anchor);
    Ok(recorded)
}

/// Better-response dynamics from `start`, each move to a best response.
/// `cap` limits the number of recorded steps.
pub fn run_dynamics<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    start: &Profile,
    policy: Policy,
    cap: usize,
) -> Result<(Profile, MoveTrace<S>)> {
    model.check_profile(start)?;
    let n = model.n_players();
    let mut state = start.to_state();
    let mut trace = MoveTrace::new(SolverKind::Dynamics, Some(start.clone()));
    let potential = |s: &State| s.clone().into_profile().and_then(|p| model.dynamics_potential(&p));
    let mut next_rr = 0;
    let mut round = 0;
    loop {
        let mover = match policy {
            Policy::RoundRobin => {
                let mut found = None;
                for k in 0..n {
                    let p = PlayerId((next_rr + k) % n);
                    if has_better_response(model, &state, p)? {
                        found = Some(p);
                        break;
                    }
                }
                found
            }
            Policy::FirstImprover => {
                let mut found = None;
                for p in model.players() {
                    if has_better_response(model, &state, p)? {
                        found = Some(p);
                        break;
                    }
                }
                found
            }
            Policy::BestImprover => {
                let mut best: Option<(PlayerId, Gain<S>)> = None;
                for p in model.players() {
                    if let Some((now, then)) = improvement(model, &state, p)? {
                        let gain = Gain::between(&now, &then);
                        if best.as_ref().is_none_or(|(_, g)| gain > *g) {
                            best = Some((p, gain));
                        }
                    }
                }
                best.map(|(p, _)| p)
            }
        };
        let Some(mover) = mover else {
            trace.status = Status::Converged;
            break;
        };
        if trace.steps.len() >= cap {
            trace.status = Status::CapReached;
            break;
        }
        let budget = cap - trace.steps.len();
        move_player(model, &mut state, mover, round, Phase::Move, budget, &potential, &mut trace.steps)?;
        next_rr = (mover.0 + 1) % n;
        round += 1;
    }
    let profile = state.into_profile().expect("dynamics keep every player placed");
    Ok((profile, trace))
}

#[derive(Debug, PartialEq, PartialOrd)]
enum Gain<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Gain<S> {
    fn between(now: &ExtCost<S>, then: &ExtCost<S>) -> Self {
        now.checked_sub(then).map_or(Gain::Infinite, Gain::Finite)
    }
}

/// Solves a consistent-priority game layer by layer.
///
/// Layers are processed by ascending priority with all more prioritized
/// players fixed. Each layer player is placed on a best response in id
/// order, then layer players make best-response moves, players whose
/// resources were touched by the last move first, until none can improve.
/// Layers without player-specific delays descend the layer's exact
/// potential and run uncapped. Player-specific layers are capped at
/// `n² · m · levels` steps and restarted with a rotated player order on
/// reaching the cap; once every rotation has failed the solver gives up.
pub fn solve_consistent_layered<S: Scalar>(game: &PriorityGame<S>) -> Result<(Profile, MoveTrace<S>)> {
    let common = game.priorities().common().ok_or(Error::InconsistentPriorities)?.to_vec();
    let levels = game.levels();
    let n = game.n_players();
    let layer_cap = n * n * game.n_resources() * levels.len();
    let mut state = State::empty(n);
    let mut trace = MoveTrace::new(SolverKind::Layered, None);
    let mut round = 0;

    for &q in &levels {
        let layer: Vec<PlayerId> = game.players().filter(|p| common[p.0] == q).collect();
        let outer = state.clone();
        let potential = |s: &State| {
            let mut inner = State::empty(n);
            for &p in &layer {
                if let Some(st) = s.strategy(p) {
                    inner.place(p, st.clone());
                }
            }
            if inner.covered().count() != layer.len() {
                return None;
            }
            level_potential(game, &outer, q, &inner).ok().map(PotentialValue::Scalar)
        };
        let capped = game.is_player_specific();
        let attempts = if capped { layer.len().max(1) } else { 1 };
        let mut solved = false;
        for attempt in 0..attempts {
            let mut order = layer.clone();
            order.rotate_left(attempt);
            let mut work = outer.clone();
            let mut steps = Vec::new();
            for &p in &order {
                let s = best_response(game, &work, p)?;
                work.place(p, s.clone());
                steps.push(Step {
                    round,
                    phase: Phase::Place(q),
                    player: p,
                    from: None,
                    to: Some(s),
                    cost_before: None,
                    cost_after: Some(game.player_cost(&work, p)?),
                    potential: potential(&work),
                });
                round += 1;
            }
            let limit = if capped { layer_cap } else { usize::MAX };
            let converged = descend_layer(game, &mut work, &order, q, limit, &mut round, &potential, &mut steps)?;
            if converged {
                state = work;
                trace.steps.extend(steps);
                solved = true;
                break;
            }
            trace.restarts += 1;
        }
        if !solved {
            return Err(Error::LayerCapExhausted { level: q, cap: layer_cap, attempts });
        }
    }
    let profile = state.into_profile().expect("every layer places all of its players");
    Ok((profile, trace))
}

#[allow(clippy::too_many_arguments)]
fn descend_layer<S: Scalar>(
    game: &PriorityGame<S>,
    state: &mut State,
    order: &[PlayerId],
    q: u32,
    limit: usize,
    round: &mut usize,
    potential: &dyn Fn(&State) -> Option<PotentialValue<S>>,
    steps: &mut Vec<Step<S>>,
) -> Result<bool> {
    // Players to examine first, most recently displaced at the front.
    let mut pending: VecDeque<PlayerId> = order.iter().copied().collect();
    loop {
        let mut mover = None;
        while let Some(p) = pending.pop_front() {
            if has_better_response(game, state, p)? {
                mover = Some(p);
                break;
            }
        }
        let Some(p) = mover else {
            return Ok(true);
        };
        if steps.len() >= limit {
            return Ok(false);
        }
        let before = state.strategy(p).cloned().expect("layer players are placed");
        let recorded = move_player(game, state, p, *round, Phase::LayerMove(q), limit - steps.len(), potential, steps)?;
        debug_assert!(recorded > 0, "a player with a better response moves");
        *round += 1;
        let after = state.strategy(p).cloned().expect("layer players are placed");
        let touched: BTreeSet<_> = before.iter().chain(after.iter()).collect();
        let displaced: Vec<PlayerId> = order
            .iter()
            .copied()
            .filter(|&o| o != p && state.strategy(o).is_some_and(|s| s.iter().any(|r| touched.contains(&r))))
            .collect();
        let rest: Vec<PlayerId> = order.iter().copied().filter(|o| !displaced.contains(o)).collect();
        pending = displaced.into_iter().chain(rest).collect();
    }
}

/// Per-round record of the insertion algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundReport {
    pub round: usize,
    pub player: PlayerId,
    pub resource: crate::ResourceId,
    pub case: InsertionCase,
    pub discarded: Vec<PlayerId>,
    pub before: InsertionPotential,
    pub after: InsertionPotential,
    /// Covered players that can improve after the round.
    pub incentives: Vec<PlayerId>,
    /// Case B1 only: `tol(i) >= n + 1` after the round and `tol(j*) = n`
    /// before it, where `n` is the level count of `i` at the resource before
    /// insertion.
    pub b1_claims: Option<(bool, bool)>,
}

impl RoundReport {
    pub fn potential_increased(&self) -> bool {
        insertion_potential_compare(&self.before, &self.after).is_ok_and(|o| o.is_lt())
    }

    pub fn invariant_holds(&self) -> bool {
        self.incentives.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct InsertionRun<S> {
    pub profile: Profile,
    pub trace: MoveTrace<S>,
    pub rounds: Vec<RoundReport>,
    /// `false` when the queue emptied while some player could still improve.
    pub is_equilibrium: bool,
}

/// Safety limit on insertion rounds.
pub const INSERTION_ROUND_CAP: usize = 100_000;

/// The insertion algorithm for singleton games (player-specific delays and
/// inconsistent priorities allowed).
///
/// Players wait in a FIFO queue. Each round pops one player, places it on a
/// resource of minimum entry weight (ties: smallest id), and then:
/// A: no player on that resource gained a better response, nothing else
/// happens; B1: some improver has the inserted player's priority there, the
/// smallest-id such player is discarded; B2: otherwise all improvers (all
/// less prioritized) are discarded. Discarded players rejoin the queue.
pub fn solve_insertion<S: Scalar>(game: &PriorityGame<S>) -> Result<InsertionRun<S>> {
    if !game.is_singleton() {
        return Err(Error::NotSingleton);
    }
    let n = game.n_players();
    let mut state = State::empty(n);
    let mut queue: VecDeque<PlayerId> = game.players().collect();
    let mut trace = MoveTrace::new(SolverKind::Insertion, None);
    let mut rounds = Vec::new();
    let mut potential = insertion_potential(game, &state)?;

    while let Some(i) = queue.pop_front() {
        let round = rounds.len();
        if round >= INSERTION_ROUND_CAP {
            return Err(Error::InsertionCapExhausted(INSERTION_ROUND_CAP));
        }
        let weights = entry_weights(game, &state, i)?;
        let (&e, _) = weights
            .iter()
            .min_by(|(ra, wa), (rb, wb)| wa.cmp(wb).then(ra.cmp(rb)))
            .expect("validated spaces are nonempty");
        let before_state = state.clone();
        let level = game.priority(e, i);
        let n_level = game.congestion_view(&before_state, e).at(level);

        state.place(i, Strategy::single(e));
        let cost_i = game.player_cost(&state, i)?;
        let mut improvers = Vec::new();
        for j in state.users_of(e, Some(i)) {
            if has_better_response(game, &state, j)? {
                improvers.push(j);
            }
        }
        let equal: Vec<PlayerId> = improvers.iter().copied().filter(|&j| game.priority(e, j) == level).collect();
        let (case, discarded) = if let Some(&j) = equal.first() {
            (InsertionCase::B1, vec![j])
        } else if improvers.is_empty() {
            (InsertionCase::A, Vec::new())
        } else {
            (InsertionCase::B2, improvers)
        };

        trace.steps.push(Step {
            round,
            phase: Phase::Insert(case),
            player: i,
            from: None,
            to: Some(Strategy::single(e)),
            cost_before: None,
            cost_after: Some(cost_i),
            potential: None,
        });
        let discard_costs: Vec<ExtCost<S>> =
            discarded.iter().map(|&j| game.player_cost(&state, j)).collect::<Result<_>>()?;
        for (&j, cost) in discarded.iter().zip(discard_costs) {
            state.remove(j);
            queue.push_back(j);
            trace.steps.push(Step {
                round,
                phase: Phase::Discard,
                player: j,
                from: Some(Strategy::single(e)),
                to: None,
                cost_before: Some(cost),
                cost_after: None,
                potential: None,
            });
        }

        let after = insertion_potential(game, &state)?;
        trace.steps.last_mut().expect("round recorded a step").potential =
            Some(PotentialValue::Insertion(after.clone()));

        let mut incentives = Vec::new();
        for p in state.covered().collect::<Vec<_>>() {
            if has_better_response(game, &state, p)? {
                incentives.push(p);
            }
        }
        let b1_claims = if case == InsertionCase::B1 {
            Some((
                insertion_tolerance(game, &state, i)? > n_level,
                insertion_tolerance(game, &before_state, discarded[0])? == n_level,
            ))
        } else {
            None
        };
        rounds.push(RoundReport {
            round,
            player: i,
            resource: e,
            case,
            discarded,
            before: potential,
            after: after.clone(),
            incentives,
            b1_claims,
        });
        potential = after;
    }

    let profile = state.into_profile().expect("the queue empties only when everyone is placed");
    let mut is_equilibrium = true;
    for p in game.players() {
        if has_better_response(game, &profile, p)? {
            is_equilibrium = false;
            break;
        }
    }
    Ok(InsertionRun { profile, trace, rounds, is_equilibrium })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub total: usize,
    pub placements: usize,
    pub moves: usize,
    pub discards: usize,
    /// Placements and moves per layer (layered traces only).
    pub per_layer: BTreeMap<u32, usize>,
}

pub fn count_steps<S>(trace: &MoveTrace<S>) -> StepStats {
    let mut stats = StepStats { total: trace.steps.len(), ..StepStats::default() };
    for step in &trace.steps {
        match step.phase {
            Phase::Move => stats.moves += 1,
            Phase::LayerMove(q) => {
                stats.moves += 1;
                *stats.per_layer.entry(q).or_default() += 1;
            }
            Phase::Place(q) => {
                stats.placements += 1;
                *stats.per_layer.entry(q).or_default() += 1;
            }
            Phase::Insert(_) => stats.placements += 1,
            Phase::Discard => stats.discards += 1,
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::is_pure_nash;
    use crate::matroid::StrategySpace;
    use crate::model::{build_game, RawDelay, RawDelays, RawGame};
    use crate::testutil::*;
    use crate::{Cost, Game, ResourceId};

    #[test]
    fn best_response_examples() {
        let g = t1();
        let aa = Profile::singletons([A, A]);
        assert_eq!(best_response(&g, &aa, P2).unwrap(), Strategy::single(B));
        let ab = Profile::singletons([A, B]);
        assert_eq!(best_response(&g, &ab, P1).unwrap(), Strategy::single(A));
        // tied-optimal current strategy is kept
        let lone = single_player_game(3);
        let p = Profile::singletons([ResourceId(2)]);
        assert_eq!(best_response(&lone, &p, P1).unwrap(), Strategy::single(ResourceId(2)));
    }

    #[test]
    fn best_response_uniform_rank_two() {
        // three resources with constant delays 3, 1, 2
        let consts = [3, 1, 2];
        let g = build_game(RawGame {
            resources: vec!["a".into(), "b".into(), "c".into()],
            spaces: vec![StrategySpace::uniform((0..3).map(ResourceId), 2)],
            priorities: vec![vec![1]; 3],
            delays: RawDelays::Shared(consts.iter().map(|&c| Some(table(2, move |_, _| Cost::from_int(c)))).collect()),
        })
        .unwrap();
        let start = Profile(vec![Strategy::new([ResourceId(0), ResourceId(1)])]);
        assert_eq!(best_response(&g, &start, P1).unwrap(), Strategy::new([ResourceId(1), ResourceId(2)]));
    }

    #[test]
    fn dynamics_on_t1() {
        let g = t1();
        let (end, trace) = run_dynamics(&g, &Profile::singletons([A, A]), Policy::RoundRobin, 100).unwrap();
        assert_eq!(end, Profile::singletons([A, B]));
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.steps[0].player, P2);
        assert_eq!(trace.status, Status::Converged);
    }

    #[test]
    fn dynamics_at_equilibrium_and_cap_zero() {
        let g = t1();
        let (_, trace) = run_dynamics(&g, &Profile::singletons([A, B]), Policy::BestImprover, 0).unwrap();
        assert_eq!((trace.steps.len(), trace.status), (0, Status::Converged));
        let (_, trace) = run_dynamics(&g, &Profile::singletons([A, A]), Policy::FirstImprover, 0).unwrap();
        assert_eq!((trace.steps.len(), trace.status), (0, Status::CapReached));
    }

    #[test]
    fn layered_on_consistent_t1() {
        let g = t1_consistent();
        let (end, trace) = solve_consistent_layered(&g).unwrap();
        assert_eq!(end, Profile::singletons([A, B]));
        assert!(is_pure_nash(&g, &end).unwrap());
        let stats = count_steps(&trace);
        assert_eq!((stats.total, stats.placements, stats.discards), (2, 2, 0));
    }

    #[test]
    fn layered_rejects_inconsistent() {
        assert!(matches!(solve_consistent_layered(&t1()), Err(Error::InconsistentPriorities)));
    }

    #[test]
    fn insertion_on_t1() {
        let g = t1();
        let run = solve_insertion(&g).unwrap();
        assert_eq!(run.profile, Profile::singletons([A, B]));
        assert_eq!(run.trace.steps.len(), 2);
        assert!(run.rounds.iter().all(|r| r.case == InsertionCase::A));
        assert!(run.is_equilibrium);
    }

    /// Players 1, 2 share priority 1 at e; player 1 also has f with cost 2.
    /// `d_{1,e}(0,1) = 1`, `d_{1,e}(0,2) = 5`; player 2 pays 1 at e and 9 at f.
    fn b1_instance() -> Game {
        let e = ResourceId(0);
        let f = ResourceId(1);
        let mut overrides = BTreeMap::new();
        overrides.insert((P1, e), table(2, |x, y| Cost::from_int(if x + y >= 2 { 5 } else { 1 })));
        overrides.insert((P1, f), table(2, |_, _| Cost::from_int(2)));
        overrides.insert((P2, e), table(2, |_, _| Cost::from_int(1)));
        overrides.insert((P2, f), table(2, |_, _| Cost::from_int(9)));
        build_game(RawGame::<crate::Rational> {
            resources: vec!["e".into(), "f".into()],
            spaces: vec![StrategySpace::singleton([e, f]); 2],
            priorities: vec![vec![1, 1], vec![1, 1]],
            delays: RawDelays::PlayerSpecific { shared: vec![None, None], overrides },
        })
        .unwrap()
    }

    #[test]
    fn insertion_case_b1() {
        let g = b1_instance();
        let run = solve_insertion(&g).unwrap();
        let cases: Vec<_> = run.rounds.iter().map(|r| r.case).collect();
        assert_eq!(cases, vec![InsertionCase::A, InsertionCase::B1, InsertionCase::A]);
        assert_eq!(run.rounds[1].discarded, vec![P1]);
        assert_eq!(run.rounds[1].b1_claims, Some((true, true)));
        assert_eq!(run.profile, Profile::singletons([ResourceId(1), ResourceId(0)]));
        assert!(is_pure_nash(&g, &run.profile).unwrap());
        assert_eq!(count_steps(&run.trace).discards, 1);
        assert!(run.rounds.iter().all(RoundReport::potential_increased));
    }

    #[test]
    fn insertion_single_player() {
        let g = single_player_game(2);
        let run = solve_insertion(&g).unwrap();
        assert_eq!(run.rounds.len(), 1);
        assert_eq!(run.rounds[0].case, InsertionCase::A);
    }

    #[test]
    fn empty_trace_stats() {
        let t: MoveTrace<crate::Rational> = MoveTrace::new(SolverKind::Dynamics, None);
        assert_eq!(count_steps(&t), StepStats::default());
    }

    #[test]
    fn phase_strings_round_trip() {
        for p in [
            Phase::Move,
            Phase::Place(3),
            Phase::LayerMove(1),
            Phase::Insert(InsertionCase::B2),
            Phase::Discard,
        ] {
            assert_eq!(p.to_string().parse::<Phase>().unwrap(), p);
        }
    }

    #[test]
    fn lazy_moves_are_single_swaps() {
        // partition matroid, one player, delays 5,1,5,1
        let consts = [5, 1, 5, 1];
        let g = build_game(RawGame {
            resources: vec!["a".into(), "b".into(), "c".into(), "d".into()],
            spaces: vec![StrategySpace::partition(
                vec![vec![ResourceId(0), ResourceId(1)], vec![ResourceId(2), ResourceId(3)]],
                vec![1, 1],
            )],
            priorities: vec![vec![1]; 4],
            delays: RawDelays::Shared(
                consts.iter().map(|&c| Some(RawDelay::Built(crate::DelaySpec::table_from_fn(1, move |_, _| Cost::from_int(c))))).collect(),
            ),
        })
        .unwrap();
        let start = Profile(vec![Strategy::new([ResourceId(0), ResourceId(2)])]);
        let (end, trace) = run_dynamics(&g, &start, Policy::RoundRobin, 10).unwrap();
        assert_eq!(end.0[0], Strategy::new([ResourceId(1), ResourceId(3)]));
        let costs: Vec<_> = trace.steps.iter().map(|s| s.cost_after.clone().unwrap()).collect();
        assert_eq!(costs, vec![Cost::from_int(6), Cost::from_int(2)]);
    }
}
