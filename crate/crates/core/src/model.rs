//! Priority-based congestion games: delay specifications, priority functions
//! and validated game construction.
//!
//! A player `i` using resource `e` pays `d_e(x, y)` where `x` counts co-users
//! strictly more prioritized than `i` at `e` and `y` counts users (including
//! `i`) with the same priority. Every delay must satisfy three axioms on its
//! domain:
//!
//! * monotone in `x`: `d(x, y) <= d(x', y)` for `x < x'`;
//! * monotone in `y`: `d(x, y) <= d(x, y')` for `y < y'`;
//! * replacement: `d(x, y) <= d(x + y - 1, 1)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::cost::ExtCost;
use crate::error::{Error, Result, Violation};
use crate::matroid::StrategySpace;
use crate::scalar::{count, Scalar};
use crate::{PlayerId, ResourceId};

/// Dense bivariate table over `x >= 0, y >= 1, x + y <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayTable<S> {
    bound: usize,
    values: Vec<ExtCost<S>>,
}

fn table_index(x: usize, y: usize) -> usize {
    let s = x + y;
    (s - 1) * s / 2 + x
}

/// Why a raw entry list could not become a [`DelayTable`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableError {
    Empty,
    InvalidPoint(usize, usize),
    Missing(usize, usize),
}

impl<S: Scalar> DelayTable<S> {
    pub fn from_fn(bound: usize, mut f: impl FnMut(usize, usize) -> ExtCost<S>) -> Self {
        let mut values = Vec::with_capacity(bound * (bound + 1) / 2);
        for s in 1..=bound {
            for x in 0..s {
                values.push(f(x, s - x));
            }
        }
        DelayTable { bound, values }
    }

    /// Builds a table whose bound is the largest `x + y` among the entries.
    /// Every point under that bound must be present.
    pub fn from_entries<I>(entries: I) -> std::result::Result<Self, Vec<TableError>>
    where
        I: IntoIterator<Item = (usize, usize, ExtCost<S>)>,
    {
        let mut map = BTreeMap::new();
        let mut errors = Vec::new();
        for (x, y, v) in entries {
            if y == 0 {
                errors.push(TableError::InvalidPoint(x, y));
            } else {
                map.insert((x, y), v);
            }
        }
        let bound = map.keys().map(|(x, y)| x + y).max().unwrap_or(0);
        if bound == 0 && errors.is_empty() {
            return Err(vec![TableError::Empty]);
        }
        for s in 1..=bound {
            for x in 0..s {
                if !map.contains_key(&(x, s - x)) {
                    errors.push(TableError::Missing(x, s - x));
                }
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Self::from_fn(bound, |x, y| map.remove(&(x, y)).expect("checked above")))
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&ExtCost<S>> {
        (y >= 1 && x + y <= self.bound).then(|| &self.values[table_index(x, y)])
    }

    /// `(x, y, value)` in ascending `(x, y)` order.
    pub fn entries(&self) -> Vec<(usize, usize, &ExtCost<S>)> {
        let mut out: Vec<_> = (1..=self.bound)
            .flat_map(|s| (0..s).map(move |x| (x, s - x)))
            .map(|(x, y)| (x, y, &self.values[table_index(x, y)]))
            .collect();
        out.sort_by_key(|&(x, y, _)| (x, y));
        out
    }
}

/// One bivariate delay function.
#[derive(Clone, Debug, PartialEq)]
pub enum DelaySpec<S> {
    /// Explicit values on a bounded triangle.
    Table(DelayTable<S>),
    /// `alpha * (x + (y + 1) / 2) + beta`.
    Affine { alpha: S, beta: S },
    /// A univariate delay `values[y - 1]` that only the most prioritized
    /// users receive: `+∞` whenever `x >= 1`.
    Classic(Vec<ExtCost<S>>),
}

impl<S: Scalar> DelaySpec<S> {
    pub fn table_from_fn(bound: usize, f: impl FnMut(usize, usize) -> ExtCost<S>) -> Self {
        DelaySpec::Table(DelayTable::from_fn(bound, f))
    }

    /// Largest supported `x + y` (for `Classic`, largest `y`); `None` if unbounded.
    pub fn bound(&self) -> Option<usize> {
        match self {
            DelaySpec::Table(t) => Some(t.bound()),
            DelaySpec::Affine { .. } => None,
            DelaySpec::Classic(values) => Some(values.len()),
        }
    }

    pub fn evaluate(&self, x: usize, y: usize) -> Result<ExtCost<S>> {
        if y == 0 {
            return Err(Error::ZeroEqualPriorityCount);
        }
        match self {
            DelaySpec::Table(t) => t.get(x, y).cloned().ok_or(Error::OutOfBound {
                x,
                y,
                bound: t.bound(),
            }),
            DelaySpec::Affine { alpha, beta } => {
                let two = S::from_ratio(2, 1);
                let weight = count::<S>(x) + (count::<S>(y) + S::one()) / two;
                Ok(ExtCost::finite(alpha.clone() * weight + beta.clone()))
            }
            DelaySpec::Classic(values) => {
                if x >= 1 {
                    return Ok(ExtCost::Infinite);
                }
                values.get(y - 1).cloned().ok_or(Error::OutOfBound {
                    x,
                    y,
                    bound: values.len(),
                })
            }
        }
    }

    /// Checks the three axioms at every point with `x + y <= bound`.
    /// Monotonicity is checked between neighbouring points, which covers all
    /// pairs by transitivity.
    pub fn validate_properties(&self, bound: usize) -> Vec<DelayViolation<S>> {
        let mut out = Vec::new();
        for s in 1..=bound {
            for x in 0..s {
                let y = s - x;
                let Ok(here) = self.evaluate(x, y) else {
                    out.push(DelayViolation::missing(x, y));
                    continue;
                };
                let mut check = |axiom, ox, oy| {
                    if let Ok(there) = self.evaluate(ox, oy) {
                        if here > there {
                            out.push(DelayViolation {
                                axiom,
                                at: (x, y),
                                other: (ox, oy),
                                lhs: Some(here.clone()),
                                rhs: Some(there),
                            });
                        }
                    }
                };
                if s < bound {
                    check(Axiom::MonotoneX, x + 1, y);
                    check(Axiom::MonotoneY, x, y + 1);
                }
                if y >= 2 {
                    check(Axiom::Replacement, x + y - 1, 1);
                }
            }
        }
        out
    }

    pub(crate) fn has_negative(&self) -> bool {
        match self {
            DelaySpec::Table(t) => t.values.iter().any(|v| !nonneg(v)),
            DelaySpec::Affine { alpha, beta } => !alpha.is_nonnegative() || !beta.is_nonnegative(),
            DelaySpec::Classic(values) => values.iter().any(|v| !nonneg(v)),
        }
    }
}

fn nonneg<S: Scalar>(v: &ExtCost<S>) -> bool {
    v.as_finite().is_none_or(Scalar::is_nonnegative)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// Market delays only: monotone in the cost level.
    MonotoneC,
    MonotoneX,
    MonotoneY,
    Replacement,
    /// The point is outside the delay's domain.
    Missing,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::MonotoneC => "monotone-c",
            Axiom::MonotoneX => "monotone-x",
            Axiom::MonotoneY => "monotone-y",
            Axiom::Replacement => "replacement",
            Axiom::Missing => "missing value",
        })
    }
}

/// One failed axiom instance: `d(at) <= d(other)` does not hold.
#[derive(Clone, Debug, PartialEq)]
pub struct DelayViolation<S> {
    pub axiom: Axiom,
    pub at: (usize, usize),
    pub other: (usize, usize),
    pub lhs: Option<ExtCost<S>>,
    pub rhs: Option<ExtCost<S>>,
}

impl<S: Scalar> DelayViolation<S> {
    fn missing(x: usize, y: usize) -> Self {
        DelayViolation { axiom: Axiom::Missing, at: (x, y), other: (x, y), lhs: None, rhs: None }
    }
}

impl<S: Scalar> Eq for DelayViolation<S> {}

impl<S: Scalar> fmt::Display for DelayViolation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.at;
        let (ox, oy) = self.other;
        match (&self.lhs, &self.rhs) {
            (Some(l), Some(r)) => write!(
                f,
                "{} axiom fails at ({x},{y}): d({x},{y})={l} > d({ox},{oy})={r}",
                self.axiom
            ),
            _ if self.axiom == Axiom::Missing => write!(f, "no value at ({x},{y})"),
            _ => write!(f, "{} axiom fails at ({x},{y}) against ({ox},{oy})", self.axiom),
        }
    }
}

/// Per-resource priority values (smaller is more prioritized).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityFunction {
    rows: Vec<Vec<u32>>,
}

impl PriorityFunction {
    /// `rows[resource][player]`.
    pub fn per_resource(rows: Vec<Vec<u32>>) -> Self {
        PriorityFunction { rows }
    }

    /// The same ranking at every one of `n_resources` resources.
    pub fn consistent(priority: Vec<u32>, n_resources: usize) -> Self {
        PriorityFunction { rows: vec![priority; n_resources] }
    }

    /// Every player has priority 1 everywhere.
    pub fn constant(n_players: usize, n_resources: usize) -> Self {
        Self::consistent(vec![1; n_players], n_resources)
    }

    pub fn get(&self, resource: ResourceId, player: PlayerId) -> u32 {
        self.rows[resource.0][player.0]
    }

    pub fn row(&self, resource: ResourceId) -> &[u32] {
        &self.rows[resource.0]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn is_consistent(&self) -> bool {
        self.rows.windows(2).all(|w| w[0] == w[1])
    }

    /// The shared ranking, when all resources agree.
    pub fn common(&self) -> Option<&[u32]> {
        if self.is_consistent() {
            self.rows.first().map(Vec::as_slice)
        } else {
            None
        }
    }
}

/// Delays shared by all players, or one per (player, resource).
#[derive(Clone, Debug, PartialEq)]
pub enum Delays<S> {
    Shared(Vec<DelaySpec<S>>),
    /// `[player][resource]`; `None` where the resource is not in the player's ground set.
    PlayerSpecific(Vec<Vec<Option<DelaySpec<S>>>>),
}

/// Unvalidated description of a game, as assembled by a parser or by hand.
#[derive(Clone, Debug)]
pub struct RawGame<S> {
    pub resources: Vec<String>,
    pub spaces: Vec<StrategySpace>,
    /// `[resource][player]`.
    pub priorities: Vec<Vec<u32>>,
    pub delays: RawDelays<S>,
}

#[derive(Clone, Debug)]
pub enum RawDelays<S> {
    Shared(Vec<Option<RawDelay<S>>>),
    /// Per-player overrides falling back to the shared entry of the resource.
    PlayerSpecific {
        shared: Vec<Option<RawDelay<S>>>,
        overrides: BTreeMap<(PlayerId, ResourceId), RawDelay<S>>,
    },
}

/// Delay as written in an instance: tables are plain entry lists.
#[derive(Clone, Debug)]
pub enum RawDelay<S> {
    Table(Vec<(usize, usize, ExtCost<S>)>),
    Affine { alpha: S, beta: S },
    Classic(Vec<ExtCost<S>>),
    Built(DelaySpec<S>),
}

/// A validated priority-based congestion game.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorityGame<S> {
    resources: Vec<String>,
    spaces: Vec<StrategySpace>,
    priorities: PriorityFunction,
    delays: Delays<S>,
    /// Number of players whose ground set contains each resource.
    users: Vec<usize>,
}

impl<S: Scalar> PriorityGame<S> {
    pub fn n_players(&self) -> usize {
        self.spaces.len()
    }

    pub fn n_resources(&self) -> usize {
        self.resources.len()
    }

    pub fn players(&self) -> impl Iterator<Item = PlayerId> {
        (0..self.n_players()).map(PlayerId)
    }

    pub fn resource_ids(&self) -> impl Iterator<Item = ResourceId> {
        (0..self.n_resources()).map(ResourceId)
    }

    pub fn resource_names(&self) -> &[String] {
        &self.resources
    }

    pub fn resource_name(&self, r: ResourceId) -> &str {
        &self.resources[r.0]
    }

    pub fn resource_by_name(&self, name: &str) -> Option<ResourceId> {
        self.resources.iter().position(|n| n == name).map(ResourceId)
    }

    pub fn space(&self, p: PlayerId) -> &StrategySpace {
        &self.spaces[p.0]
    }

    pub fn spaces(&self) -> &[StrategySpace] {
        &self.spaces
    }

    pub fn priorities(&self) -> &PriorityFunction {
        &self.priorities
    }

    pub fn priority(&self, r: ResourceId, p: PlayerId) -> u32 {
        self.priorities.get(r, p)
    }

    pub fn delays(&self) -> &Delays<S> {
        &self.delays
    }

    pub fn is_player_specific(&self) -> bool {
        matches!(self.delays, Delays::PlayerSpecific(_))
    }

    pub fn has_consistent_priorities(&self) -> bool {
        self.priorities.is_consistent()
    }

    pub fn is_singleton(&self) -> bool {
        self.spaces.iter().all(|s| s.singleton_resources().is_some())
    }

    /// Largest `x + y` any profile can produce at `r`.
    pub fn required_bound(&self, r: ResourceId) -> usize {
        self.users[r.0]
    }

    /// The delay function `player` experiences at `r`.
    pub fn delay(&self, r: ResourceId, player: PlayerId) -> &DelaySpec<S> {
        match &self.delays {
            Delays::Shared(d) => &d[r.0],
            Delays::PlayerSpecific(d) => d[player.0][r.0]
                .as_ref()
                .expect("delay queried outside the player's ground set"),
        }
    }

    /// The shared delay of `r`; `None` for player-specific games.
    pub fn shared_delay(&self, r: ResourceId) -> Option<&DelaySpec<S>> {
        match &self.delays {
            Delays::Shared(d) => Some(&d[r.0]),
            Delays::PlayerSpecific(_) => None,
        }
    }

    /// Evaluates the delay of `r` for `player` (or the shared delay).
    pub fn evaluate_delay(&self, r: ResourceId, x: usize, y: usize, player: Option<PlayerId>) -> Result<ExtCost<S>> {
        match (player, &self.delays) {
            (_, Delays::Shared(d)) => d[r.0].evaluate(x, y),
            (Some(p), Delays::PlayerSpecific(_)) => self.delay(r, p).evaluate(x, y),
            (None, Delays::PlayerSpecific(_)) => Err(Error::PlayerSpecificInput),
        }
    }

    /// Distinct priority values, ascending (consistent games: the layers).
    pub fn levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.priorities.rows().iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Same game with different strategy spaces (revalidated).
    pub fn with_spaces(&self, spaces: Vec<StrategySpace>) -> Result<Self> {
        build_game(RawGame {
            resources: self.resources.clone(),
            spaces,
            priorities: self.priorities.rows().to_vec(),
            delays: match &self.delays {
                Delays::Shared(d) => {
                    RawDelays::Shared(d.iter().cloned().map(|s| Some(RawDelay::Built(s))).collect())
                }
                Delays::PlayerSpecific(rows) => RawDelays::PlayerSpecific {
                    shared: vec![None; self.n_resources()],
                    overrides: rows
                        .iter()
                        .enumerate()
                        .flat_map(|(p, row)| {
                            row.iter().enumerate().filter_map(move |(r, d)| {
                                d.clone().map(|d| ((PlayerId(p), ResourceId(r)), RawDelay::Built(d)))
                            })
                        })
                        .collect(),
                },
            },
        })
    }
}

pub(crate) fn table_violation(e: TableError, resource: &str, player: Option<usize>) -> Violation {
    let resource = resource.to_owned();
    match e {
        TableError::Empty => Violation::MissingDelay { resource, player },
        TableError::InvalidPoint(x, y) => Violation::InvalidTableEntry { resource, player, x, y },
        TableError::Missing(x, y) => Violation::MissingTableEntry { resource, player, x, y },
    }
}

pub(crate) fn build_delay<S: Scalar>(
    raw: &RawDelay<S>,
    resource: &str,
    player: Option<usize>,
    required: usize,
    violations: &mut Vec<Violation>,
) -> Option<DelaySpec<S>> {
    let spec = match raw {
        RawDelay::Table(entries) => match DelayTable::from_entries(entries.iter().cloned()) {
            Ok(t) => DelaySpec::Table(t),
            Err(errors) => {
                violations.extend(errors.into_iter().map(|e| table_violation(e, resource, player)));
                return None;
            }
        },
        RawDelay::Affine { alpha, beta } => DelaySpec::Affine { alpha: alpha.clone(), beta: beta.clone() },
        RawDelay::Classic(values) => DelaySpec::Classic(values.clone()),
        RawDelay::Built(spec) => spec.clone(),
    };
    if spec.has_negative() {
        violations.push(Violation::NegativeDelay { resource: resource.to_owned(), player });
        return None;
    }
    let check_to = match spec.bound() {
        Some(bound) if bound < required => {
            violations.push(Violation::TableTooSmall {
                resource: resource.to_owned(),
                player,
                bound,
                required,
            });
            return None;
        }
        Some(bound) => bound,
        None => required.max(2),
    };
    let mut ok = true;
    for v in spec.validate_properties(check_to) {
        ok = false;
        violations.push(Violation::DelayAxiom {
            resource: resource.to_owned(),
            player,
            axiom: v.axiom,
            at: v.at,
            detail: v.to_string(),
        });
    }
    ok.then_some(spec)
}

/// Validates a raw instance and returns the game, or every problem found.
pub fn build_game<S: Scalar>(raw: RawGame<S>) -> Result<PriorityGame<S>> {
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
            Ok(()) => {
                for r in space.ground() {
                    users[r.0] += 1;
                }
            }
            Err(reason) => violations.push(Violation::InvalidStrategySpace { player: p, reason }),
        }
    }

    if raw.priorities.len() != m {
        violations.push(Violation::Other(format!(
            "priority rows given for {} resources, expected {m}",
            raw.priorities.len()
        )));
    }
    for (r, row) in raw.priorities.iter().enumerate().take(m) {
        let name = &raw.resources[r];
        if row.len() != n {
            violations.push(Violation::PriorityRowLength {
                resource: name.clone(),
                expected: n,
                found: row.len(),
            });
            continue;
        }
        for (p, &q) in row.iter().enumerate() {
            if q == 0 {
                violations.push(Violation::ZeroPriority { resource: name.clone(), player: p });
            }
        }
    }

    let delays = match &raw.delays {
        RawDelays::Shared(shared) => {
            let mut built = Vec::with_capacity(m);
            for (r, (name, &required)) in raw.resources.iter().zip(&users).enumerate() {
                match shared.get(r).and_then(Option::as_ref) {
                    Some(d) => built.push(build_delay(d, name, None, required, &mut violations)),
                    None => {
                        violations.push(Violation::MissingDelay { resource: name.clone(), player: None });
                        built.push(None);
                    }
                }
            }
            built.into_iter().collect::<Option<Vec<_>>>().map(Delays::Shared)
        }
        RawDelays::PlayerSpecific { shared, overrides } => {
            let mut rows = vec![vec![None; m]; n];
            let mut complete = true;
            for (p, space) in raw.spaces.iter().enumerate() {
                for r in space.ground().into_iter().filter(|r| r.0 < m) {
                    let name = &raw.resources[r.0];
                    let source = overrides
                        .get(&(PlayerId(p), r))
                        .or_else(|| shared.get(r.0).and_then(Option::as_ref));
                    match source {
                        Some(d) => {
                            rows[p][r.0] = build_delay(d, name, Some(p), users[r.0], &mut violations);
                            complete &= rows[p][r.0].is_some();
                        }
                        None => {
                            complete = false;
                            violations.push(Violation::MissingDelay {
                                resource: name.clone(),
                                player: Some(p),
                            });
                        }
                    }
                }
            }
            complete.then_some(Delays::PlayerSpecific(rows))
        }
    };

    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(PriorityGame {
        resources: raw.resources,
        spaces: raw.spaces,
        priorities: PriorityFunction::per_resource(raw.priorities),
        delays: delays.expect("no violations implies complete delays"),
        users,
    })
}

/// Counts of users at one resource, grouped by priority level.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CongestionView {
    pub total: usize,
    /// level -> number of users with that priority.
    pub levels: BTreeMap<u32, usize>,
}

impl CongestionView {
    pub fn add(&mut self, level: u32) {
        self.total += 1;
        *self.levels.entry(level).or_default() += 1;
    }

    /// Users with priority exactly `q`.
    pub fn at(&self, q: u32) -> usize {
        self.levels.get(&q).copied().unwrap_or(0)
    }

    /// Users strictly more prioritized than `q`.
    pub fn below(&self, q: u32) -> usize {
        self.levels.range(..q).map(|(_, c)| c).sum()
    }

    /// Present levels, ascending.
    pub fn present_levels(&self) -> Vec<u32> {
        self.levels.iter().filter(|(_, &c)| c > 0).map(|(&q, _)| q).collect()
    }

    /// Most prioritized present level; `None` stands for `+∞` (empty resource).
    pub fn min_level(&self) -> Option<u32> {
        self.levels.iter().find(|(_, &c)| c > 0).map(|(&q, _)| q)
    }
}
