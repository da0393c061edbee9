//! Brute-force ground truth: profile enumeration, equilibrium search by
//! deviation scan, and trace replay.
//!
//! Nothing here uses best responses, entry weights or greedy bases; player
//! costs are the only shared code with the solvers.

use std::cmp::Ordering;
use std::fmt;

use crate::congestion::{entry_weights, has_better_response, CongestionModel, Placement, Profile, State};
use crate::dynamics::{MoveTrace, Phase, SolverKind, Status};
use crate::error::{Error, Result};
use crate::matroid::Strategy;
use crate::potentials::{insertion_potential, level_potential, PotentialValue};
use crate::scalar::Scalar;
use crate::PlayerId;

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_profiles: usize,
    pub observed: usize,
}

impl EnumerationBudget {
    pub fn new(max_profiles: usize) -> Self {
        EnumerationBudget { max_profiles, observed: 0 }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self::new(DEFAULT_BUDGET)
    }
}

/// All profiles in id-lexicographic order (player 1's strategy most
/// significant). Yields `BudgetExceeded` once, after `max_profiles` profiles.
pub struct ProfileIter<'b> {
    options: Vec<Vec<Strategy>>,
    digits: Vec<usize>,
    done: bool,
    budget: &'b mut EnumerationBudget,
}

impl Iterator for ProfileIter<'_> {
    type Item = Result<Profile>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.budget.observed >= self.budget.max_profiles {
            self.done = true;
            return Some(Err(Error::BudgetExceeded(self.budget.max_profiles)));
        }
        let profile = Profile(self.digits.iter().zip(&self.options).map(|(&d, o)| o[d].clone()).collect());
        self.budget.observed += 1;
        let mut k = self.digits.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.digits[k] += 1;
            if self.digits[k] < self.options[k].len() {
                break;
            }
            self.digits[k] = 0;
        }
        Some(Ok(profile))
    }
}

pub fn enumerate_profiles<'b, S: Scalar, M: CongestionModel<S>>(
    model: &M,
    budget: &'b mut EnumerationBudget,
) -> ProfileIter<'b> {
    let options: Vec<Vec<Strategy>> = model.players().into_iter().map(|p| model.space(p).all_strategies()).collect();
    let done = options.iter().any(Vec::is_empty);
    ProfileIter { digits: vec![0; options.len()], options, done, budget }
}

/// Whether `profile` survives every unilateral deviation (naive scan).
pub fn survives_all_deviations<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    profile: &Profile,
    options: &[Vec<Strategy>],
) -> Result<bool> {
    for p in model.players() {
        let now = model.player_cost(profile, p)?;
        for alt in &options[p.0] {
            if alt == profile.get(p) {
                continue;
            }
            if model.player_cost(&profile.with(p, alt.clone()), p)? < now {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every pure Nash equilibrium, in enumeration order.
pub fn brute_force_pne<S: Scalar, M: CongestionModel<S>>(
    model: &M,
    budget: &mut EnumerationBudget,
) -> Result<Vec<Profile>> {
    let options: Vec<Vec<Strategy>> = model.players().into_iter().map(|p| model.space(p).all_strategies()).collect();
    let mut out = Vec::new();
    for profile in enumerate_profiles(model, budget) {
        let profile = profile?;
        if survives_all_deviations(model, &profile, &options)? {
            out.push(profile);
        }
    }
    Ok(out)
}

/// The first equilibrium in enumeration order, if any.
pub fn first_pne<S: Scalar, M: CongestionModel<S>>(model: &M, budget: &mut EnumerationBudget) -> Result<Option<Profile>> {
    let options: Vec<Vec<Strategy>> = model.players().into_iter().map(|p| model.space(p).all_strategies()).collect();
    for profile in enumerate_profiles(model, budget) {
        let profile = profile?;
        if survives_all_deviations(model, &profile, &options)? {
            return Ok(Some(profile));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceViolation {
    /// 1-based step number; 0 refers to the trace as a whole.
    pub step: usize,
    pub message: String,
}

impl fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.step == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "step {}: {}", self.step, self.message)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReport {
    pub violations: Vec<TraceViolation>,
    pub final_profile: Option<Profile>,
    pub final_is_pne: Option<bool>,
}

impl CertReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Replays `trace` and checks every recorded claim: strategies and costs,
/// strict cost decrease of moves, best-response placements, the potential
/// matching the solver (recomputed, and monotone in the right direction),
/// the no-incentive invariant after every insertion round, and the final
/// equilibrium.
pub fn certify_trace<S: Scalar, M: CongestionModel<S>>(model: &M, trace: &MoveTrace<S>) -> Result<CertReport> {
    let n = model.n_players();
    let mut violations = Vec::new();
    let mut flag = |step: usize, message: String| violations.push(TraceViolation { step, message });
    let mut state = match &trace.start {
        Some(p) => {
            if let Err(e) = model.check_profile(p) {
                flag(0, format!("start profile: {e}"));
                return Ok(CertReport { violations, final_profile: None, final_is_pne: None });
            }
            p.to_state()
        }
        None => State::empty(n),
    };
    let game = model.as_priority_game();
    let mut last_potential: Option<(Option<u32>, PotentialValue<S>)> = None;

    for (idx, step) in trace.steps.iter().enumerate() {
        let k = idx + 1;
        let p = step.player;
        if p.0 >= n {
            flag(k, format!("unknown player {p}"));
            break;
        }
        if state.strategy(p) != step.from.as_ref() {
            flag(k, format!("player {p} does not hold the recorded source strategy"));
            break;
        }
        if let Some(to) = &step.to {
            if !model.space(p).is_base(to) {
                flag(k, format!("{to} is not a strategy of player {p}"));
                break;
            }
        }
        let before = match step.from {
            Some(_) => Some(model.player_cost(&state, p)?),
            None => None,
        };
        if before != step.cost_before {
            flag(k, "recorded cost before the step does not match the replay".into());
        }
        if matches!(step.phase, Phase::Place(_) | Phase::Insert(_)) {
            if let Some(to) = &step.to {
                let weights = entry_weights(model, &state, p)?;
                let w = |s: &Strategy| s.iter().map(|r| weights[&r].clone()).sum::<crate::ExtCost<S>>();
                let best = model.space(p).all_strategies().iter().map(w).min();
                if best.is_some_and(|b| w(to) > b) {
                    flag(k, format!("player {p} was not placed on a cheapest strategy"));
                }
            }
        }
        match &step.to {
            Some(to) => state.place(p, to.clone()),
            None => {
                state.remove(p);
            }
        }
        let after = match step.to {
            Some(_) => Some(model.player_cost(&state, p)?),
            None => None,
        };
        if after != step.cost_after {
            flag(k, "recorded cost after the step does not match the replay".into());
        }
        if matches!(step.phase, Phase::Move | Phase::LayerMove(_)) {
            match (&step.cost_before, &step.cost_after) {
                (Some(b), Some(a)) if a < b => {}
                _ => flag(k, "move does not strictly decrease the mover's cost".into()),
            }
        }

        let Some(recorded) = &step.potential else { continue };
        let (layer, recomputed) = match trace.solver {
            SolverKind::Dynamics => (None, state.clone().into_profile().and_then(|pr| model.dynamics_potential(&pr))),
            SolverKind::Layered => {
                let q = match step.phase {
                    Phase::Place(q) | Phase::LayerMove(q) => q,
                    _ => {
                        flag(k, "unexpected phase in a layered trace".into());
                        continue;
                    }
                };
                (Some(q), layered_potential(game, &state, q)?)
            }
            SolverKind::Insertion => (
                None,
                match game {
                    Some(g) => Some(PotentialValue::Insertion(insertion_potential(g, &state)?)),
                    None => None,
                },
            ),
        };
        if recomputed.as_ref() != Some(recorded) {
            flag(k, "recorded potential does not match the replay".into());
        }
        if let Some((prev_layer, prev)) = &last_potential {
            let comparable = match trace.solver {
                SolverKind::Layered => *prev_layer == layer && matches!(step.phase, Phase::LayerMove(_)),
                _ => true,
            };
            if comparable {
                let wanted = match trace.solver {
                    SolverKind::Insertion => Ordering::Greater,
                    _ => Ordering::Less,
                };
                match recorded.compare(prev) {
                    Ok(o) if o == wanted => {}
                    Ok(_) => flag(k, "potential is not strictly monotone".into()),
                    Err(e) => flag(k, format!("potential not comparable: {e}")),
                }
            }
        }
        last_potential = Some((layer, recorded.clone()));

        if trace.solver == SolverKind::Insertion {
            // the potential snapshot closes a round
            for c in state.covered().collect::<Vec<_>>() {
                if has_better_response(model, &state, c)? {
                    flag(k, format!("after this round player {c} has a better response"));
                }
            }
        }
    }

    let final_profile = state.into_profile();
    let final_is_pne = match &final_profile {
        Some(p) => {
            let mut pne = true;
            for pl in model.players() {
                if has_better_response(model, p, pl)? {
                    pne = false;
                    break;
                }
            }
            Some(pne)
        }
        None => None,
    };
    if trace.status == Status::Converged {
        match final_is_pne {
            Some(true) => {}
            Some(false) => flag(0, "final profile is not a pure Nash equilibrium".into()),
            None => flag(0, "trace ends with unplaced players".into()),
        }
    }
    Ok(CertReport { violations, final_profile, final_is_pne })
}

fn layered_potential<S: Scalar>(
    game: Option<&crate::PriorityGame<S>>,
    state: &State,
    q: u32,
) -> Result<Option<PotentialValue<S>>> {
    let Some(game) = game else { return Ok(None) };
    let Some(common) = game.priorities().common() else { return Ok(None) };
    let n = game.n_players();
    let mut outer = State::empty(n);
    let mut inner = State::empty(n);
    for p in (0..n).map(PlayerId) {
        if let Some(s) = state.strategy(p) {
            match common[p.0].cmp(&q) {
                Ordering::Less => outer.place(p, s.clone()),
                Ordering::Equal => inner.place(p, s.clone()),
                Ordering::Greater => {}
            }
        }
    }
    Ok(level_potential(game, &outer, q, &inner).ok().map(PotentialValue::Scalar))
}
