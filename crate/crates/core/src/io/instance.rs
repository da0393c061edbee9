use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::congestion::Profile;
use crate::error::{Error, Result, Violation};
use crate::markets::{build_market, MarketDelay, MarketGame, RawMarket};
use crate::matroid::{GraphEdge, MatroidKind, Strategy, StrategySpace};
use crate::model::{build_game, table_violation, DelayTable, Delays, DelaySpec, PriorityFunction, RawDelay, RawDelays, RawGame};
use crate::reductions::{AffineGame, ClassicGame};
use crate::{Cost, Game, Market, PlayerId, Rational, ResourceId, Scalar};

pub const FORMAT_VERSION: u32 = 1;

/// A cost written as `"p/q"` or `"inf"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Cost);

impl Serialize for Q {
    fn serialize<Se: Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.0.canonical())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative rational \"p/q\" with q >= 1, or \"inf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                let valid_shape = v == "inf"
                    || v.split_once('/').map_or(is_int(v), |(p, q)| is_int(p) && is_int(q));
                match Cost::parse_canonical(v) {
                    Some(c) if valid_shape => Ok(Q(c)),
                    _ => Err(E::custom(format!("invalid rational {v:?}: expected \"p/q\" with q >= 1, or \"inf\""))),
                }
            }
        }
        d.deserialize_str(V)
    }
}

fn is_int(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Priority,
    Market,
    Classic,
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PrioritiesSpec {
    Consistent(Vec<u32>),
    PerResource(BTreeMap<String, Vec<u32>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayObj {
    Table { entries: Vec<(usize, usize, Q)> },
    Affine { alpha: Q, beta: Q },
    Classic { values: Vec<Q> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarketDelayObj {
    /// `[level, x, y, value]`, levels numbered from 1 by ascending cost.
    Table { entries: Vec<(u32, usize, usize, Q)> },
    /// `[level, y, value]`; infinite whenever `x >= 1`.
    Classic { values: Vec<(u32, usize, Q)> },
    /// The same bivariate delay at every cost level.
    Lifted { delay: DelayObj },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyObj {
    Singleton { allowed: Vec<String> },
    Explicit { sets: Vec<Vec<String>> },
    Uniform { ground: Vec<String>, rank: usize },
    Partition { blocks: Vec<Vec<String>>, caps: Vec<usize> },
    /// `[node, node, resource]`; nodes are numbered from 0.
    Graphic { edges: Vec<(usize, usize, String)> },
    /// Listed matroid bases.
    Bases { bases: Vec<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    pub model: ModelKind,
    pub players: usize,
    pub resources: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<PrioritiesSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub delays: BTreeMap<String, DelayObj>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub player_specific: BTreeMap<String, BTreeMap<String, DelayObj>>,
    pub strategies: Vec<StrategyObj>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cost_matrix: BTreeMap<String, BTreeMap<String, Q>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub market_delays: BTreeMap<String, MarketDelayObj>,
}

/// A validated instance of any supported model.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Priority(Game),
    Market(Market),
    Classic(ClassicGame<Rational>),
    Affine(AffineGame<Rational>),
}

impl Instance {
    pub fn kind(&self) -> ModelKind {
        match self {
            Instance::Priority(_) => ModelKind::Priority,
            Instance::Market(_) => ModelKind::Market,
            Instance::Classic(_) => ModelKind::Classic,
            Instance::Affine(_) => ModelKind::Affine,
        }
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and validates an instance.
pub fn parse_instance(text: &str) -> Result<Instance> {
    InstanceFile::from_json(text)?.build()
}

/// Parses `{"1": "a", "2": "b+c"}` (resources joined with `+`) into a profile.
pub fn parse_profile(text: &str, names: &[String], n_players: usize) -> Result<Profile> {
    let map: BTreeMap<String, String> = serde_json::from_str(text).map_err(parse_err)?;
    let lookup = Names::new(names);
    let mut out = vec![None; n_players];
    for (pid, spec) in &map {
        let p = player_index(pid, n_players).map_err(Error::InvalidProfile)?;
        let mut ids = Vec::new();
        for name in spec.split('+') {
            ids.push(lookup.get(name).ok_or_else(|| Error::InvalidProfile(format!("unknown resource {name:?}")))?);
        }
        out[p] = Some(Strategy::new(ids));
    }
    out.into_iter()
        .enumerate()
        .map(|(p, s)| s.ok_or_else(|| Error::InvalidProfile(format!("no strategy for player {}", p + 1))))
        .collect::<Result<Vec<_>>>()
        .map(Profile)
}

fn player_index(key: &str, n: usize) -> std::result::Result<usize, String> {
    match key.parse::<usize>() {
        Ok(p) if (1..=n).contains(&p) => Ok(p - 1),
        _ => Err(format!("player id {key:?} is not in 1..={n}")),
    }
}

struct Names<'a> {
    index: BTreeMap<&'a str, ResourceId>,
}

impl<'a> Names<'a> {
    fn new(names: &'a [String]) -> Self {
        Names { index: names.iter().enumerate().map(|(i, n)| (n.as_str(), ResourceId(i))).collect() }
    }

    fn get(&self, name: &str) -> Option<ResourceId> {
        self.index.get(name).copied()
    }
}

struct Builder<'a> {
    names: Names<'a>,
    violations: Vec<Violation>,
}

impl Builder<'_> {
    fn fail(&mut self, msg: String) {
        self.violations.push(Violation::Other(msg));
    }

    fn resource(&mut self, name: &str, context: &str) -> ResourceId {
        match self.names.get(name) {
            Some(r) => r,
            None => {
                self.fail(format!("unknown resource {name:?} in {context}"));
                ResourceId(usize::MAX)
            }
        }
    }

    fn set(&mut self, names: &[String], context: &str) -> Strategy {
        Strategy::new(names.iter().map(|n| self.resource(n, context)))
    }

    fn space(&mut self, obj: &StrategyObj, player: usize) -> StrategySpace {
        let ctx = format!("strategies of player {}", player + 1);
        match obj {
            StrategyObj::Singleton { allowed } => {
                StrategySpace::singleton(allowed.iter().map(|n| self.resource(n, &ctx)).collect::<Vec<_>>())
            }
            StrategyObj::Explicit { sets } => {
                StrategySpace::explicit(sets.iter().map(|s| self.set(s, &ctx)).collect::<Vec<_>>())
            }
            StrategyObj::Uniform { ground, rank } => {
                StrategySpace::uniform(ground.iter().map(|n| self.resource(n, &ctx)).collect::<Vec<_>>(), *rank)
            }
            StrategyObj::Partition { blocks, caps } => StrategySpace::partition(
                blocks.iter().map(|b| b.iter().map(|n| self.resource(n, &ctx)).collect()).collect(),
                caps.clone(),
            ),
            StrategyObj::Graphic { edges } => {
                let nodes = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
                let edges = edges
                    .iter()
                    .map(|(u, v, n)| GraphEdge { u: *u, v: *v, resource: self.resource(n, &ctx) })
                    .collect();
                StrategySpace::graphic(nodes, edges)
            }
            StrategyObj::Bases { bases } => {
                StrategySpace::explicit_bases(bases.iter().map(|s| self.set(s, &ctx)).collect::<Vec<_>>())
            }
        }
    }

    fn delay(&mut self, obj: &DelayObj) -> RawDelay<Rational> {
        match obj {
            DelayObj::Table { entries } => {
                RawDelay::Table(entries.iter().map(|(x, y, v)| (*x, *y, v.0.clone())).collect())
            }
            DelayObj::Affine { alpha, beta } => RawDelay::Affine {
                alpha: self.finite(alpha, "alpha"),
                beta: self.finite(beta, "beta"),
            },
            DelayObj::Classic { values } => RawDelay::Classic(values.iter().map(|v| v.0.clone()).collect()),
        }
    }

    fn finite(&mut self, q: &Q, what: &str) -> Rational {
        match &q.0 {
            Cost::Finite(v) => v.clone(),
            Cost::Infinite => {
                self.fail(format!("{what} must be finite"));
                Rational::from_ratio(0, 1)
            }
        }
    }

    fn delay_spec(&mut self, obj: &DelayObj, context: &str) -> Option<DelaySpec<Rational>> {
        match self.delay(obj) {
            RawDelay::Table(entries) => match DelayTable::from_entries(entries) {
                Ok(t) => Some(DelaySpec::Table(t)),
                Err(errors) => {
                    self.violations.extend(errors.into_iter().map(|e| table_violation(e, context, None)));
                    None
                }
            },
            RawDelay::Affine { alpha, beta } => Some(DelaySpec::Affine { alpha, beta }),
            RawDelay::Classic(values) => Some(DelaySpec::Classic(values)),
            RawDelay::Built(d) => Some(d),
        }
    }

    fn market_delay(&mut self, obj: &MarketDelayObj, resource: &str) -> Option<MarketDelay<Rational>> {
        match obj {
            MarketDelayObj::Lifted { delay } => {
                self.delay_spec(delay, &format!("market delay of {resource}")).map(MarketDelay::Uniform)
            }
            MarketDelayObj::Table { entries } => {
                let mut by_level: BTreeMap<u32, Vec<(usize, usize, Cost)>> = BTreeMap::new();
                for (k, x, y, v) in entries {
                    by_level.entry(*k).or_default().push((*x, *y, v.0.clone()));
                }
                let mut levels = Vec::new();
                for (i, (k, entries)) in by_level.into_iter().enumerate() {
                    if k as usize != i + 1 {
                        self.fail(format!("market delay of {resource}: cost levels must be numbered 1, 2, ..."));
                        return None;
                    }
                    levels.push(self.delay_spec(&table_obj(entries), &format!("market delay of {resource} level {k}"))?);
                }
                Some(MarketDelay::PerLevel(levels))
            }
            MarketDelayObj::Classic { values } => {
                let mut by_level: BTreeMap<u32, BTreeMap<usize, Cost>> = BTreeMap::new();
                for (k, y, v) in values {
                    by_level.entry(*k).or_default().insert(*y, v.0.clone());
                }
                let mut levels = Vec::new();
                for (i, (k, ys)) in by_level.into_iter().enumerate() {
                    let contiguous = ys.keys().copied().eq(1..=ys.len());
                    if k as usize != i + 1 || !contiguous {
                        self.fail(format!(
                            "market delay of {resource}: levels must be numbered 1, 2, ... and y must run 1, 2, ..."
                        ));
                        return None;
                    }
                    levels.push(DelaySpec::Classic(ys.into_values().collect()));
                }
                Some(MarketDelay::PerLevel(levels))
            }
        }
    }
}

fn finish(b: Builder<'_>) -> Result<()> {
    if b.violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(b.violations))
    }
}

fn table_obj(entries: Vec<(usize, usize, Cost)>) -> DelayObj {
    DelayObj::Table { entries: entries.into_iter().map(|(x, y, v)| (x, y, Q(v))).collect() }
}

fn delay_obj(spec: &DelaySpec<Rational>) -> DelayObj {
    match spec {
        DelaySpec::Table(t) => DelayObj::Table {
            entries: t.entries().into_iter().map(|(x, y, v)| (x, y, Q(v.clone()))).collect(),
        },
        DelaySpec::Affine { alpha, beta } => {
            DelayObj::Affine { alpha: Q(Cost::Finite(alpha.clone())), beta: Q(Cost::Finite(beta.clone())) }
        }
        DelaySpec::Classic(values) => DelayObj::Classic { values: values.iter().cloned().map(Q).collect() },
    }
}

fn strategy_names(s: &Strategy, names: &[String]) -> Vec<String> {
    s.iter().map(|r| names[r.0].clone()).collect()
}

fn strategy_obj(space: &StrategySpace, names: &[String]) -> StrategyObj {
    let list = |rs: &[ResourceId]| rs.iter().map(|r| names[r.0].clone()).collect::<Vec<_>>();
    match space {
        StrategySpace::Singleton { allowed } => StrategyObj::Singleton { allowed: list(allowed) },
        StrategySpace::Explicit { sets } => {
            StrategyObj::Explicit { sets: sets.iter().map(|s| strategy_names(s, names)).collect() }
        }
        StrategySpace::Matroid(MatroidKind::Uniform { ground, rank }) => {
            StrategyObj::Uniform { ground: list(ground), rank: *rank }
        }
        StrategySpace::Matroid(MatroidKind::Partition { blocks, caps }) => StrategyObj::Partition {
            blocks: blocks.iter().map(|b| list(b)).collect(),
            caps: caps.clone(),
        },
        StrategySpace::Matroid(MatroidKind::Graphic { edges, .. }) => StrategyObj::Graphic {
            edges: edges.iter().map(|e| (e.u, e.v, names[e.resource.0].clone())).collect(),
        },
        StrategySpace::Matroid(MatroidKind::ExplicitBases { bases }) => {
            StrategyObj::Bases { bases: bases.iter().map(|s| strategy_names(s, names)).collect() }
        }
    }
}

fn priorities_spec(p: &PriorityFunction, names: &[String]) -> PrioritiesSpec {
    match p.common() {
        Some(row) => PrioritiesSpec::Consistent(row.to_vec()),
        None => PrioritiesSpec::PerResource(
            names.iter().zip(p.rows()).map(|(n, row)| (n.clone(), row.clone())).collect(),
        ),
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_err)
    }

    /// Canonical form: pretty-printed, keys sorted, rationals in lowest terms.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s
    }

    pub fn build(&self) -> Result<Instance> {
        let n = self.players;
        let m = self.resources.len();
        let mut b = Builder { names: Names::new(&self.resources), violations: Vec::new() };
        if self.version != FORMAT_VERSION {
            b.fail(format!("unsupported version {} (expected {FORMAT_VERSION})", self.version));
        }
        let distinct: BTreeSet<&String> = self.resources.iter().collect();
        if distinct.len() != m {
            b.fail("resource ids must be unique".into());
        }
        if self.strategies.len() != n {
            b.fail(format!("{} strategy spaces for {n} players", self.strategies.len()));
        }
        let spaces: Vec<StrategySpace> =
            self.strategies.iter().enumerate().map(|(p, s)| b.space(s, p)).collect();

        let priorities = match (&self.priorities, self.model) {
            (None, ModelKind::Classic) => Some(vec![vec![1; n]; m]),
            (None, ModelKind::Market) => None,
            (Some(_), ModelKind::Market) => {
                b.fail("market instances take a cost_matrix, not priorities".into());
                None
            }
            (None, _) => {
                b.fail("priorities are missing".into());
                None
            }
            (Some(PrioritiesSpec::Consistent(row)), _) => Some(vec![row.clone(); m]),
            (Some(PrioritiesSpec::PerResource(map)), _) => {
                let mut rows = Vec::with_capacity(m);
                for name in &self.resources {
                    match map.get(name) {
                        Some(row) => rows.push(row.clone()),
                        None => {
                            b.fail(format!("no priorities for resource {name:?}"));
                            rows.push(vec![1; n]);
                        }
                    }
                }
                for key in map.keys().filter(|k| !self.resources.contains(k)) {
                    b.fail(format!("priorities given for unknown resource {key:?}"));
                }
                Some(rows)
            }
        };
        for key in self.delays.keys().filter(|k| !self.resources.contains(k)) {
            b.fail(format!("delay given for unknown resource {key:?}"));
        }

        if self.model != ModelKind::Market && (!self.cost_matrix.is_empty() || !self.market_delays.is_empty()) {
            b.fail("cost_matrix and market_delays are only valid for market instances".into());
        }
        if self.model != ModelKind::Priority && !self.player_specific.is_empty() {
            b.fail("player_specific delays are only valid for priority instances".into());
        }

        let instance = match self.model {
            ModelKind::Priority => {
                let shared: Vec<Option<RawDelay<Rational>>> =
                    self.resources.iter().map(|r| self.delays.get(r).map(|d| b.delay(d))).collect();
                let delays = if self.player_specific.is_empty() {
                    RawDelays::Shared(shared)
                } else {
                    let mut overrides = BTreeMap::new();
                    for (pid, row) in &self.player_specific {
                        let p = match player_index(pid, n) {
                            Ok(p) => p,
                            Err(msg) => {
                                b.fail(msg);
                                continue;
                            }
                        };
                        for (rname, d) in row {
                            let r = b.resource(rname, "player_specific");
                            let raw = b.delay(d);
                            overrides.insert((PlayerId(p), r), raw);
                        }
                    }
                    RawDelays::PlayerSpecific { shared, overrides }
                };
                finish(b)?;
                Instance::Priority(build_game(RawGame {
                    resources: self.resources.clone(),
                    spaces,
                    priorities: priorities.expect("checked"),
                    delays,
                })?)
            }
            ModelKind::Classic => {
                let mut values = Vec::with_capacity(m);
                for name in &self.resources {
                    match self.delays.get(name) {
                        Some(DelayObj::Classic { values: v }) => values.push(v.iter().map(|q| q.0.clone()).collect()),
                        _ => {
                            b.fail(format!("classic instances need a classic delay for resource {name:?}"));
                            values.push(Vec::new());
                        }
                    }
                }
                finish(b)?;
                let classic = ClassicGame {
                    resources: self.resources.clone(),
                    spaces,
                    priorities: PriorityFunction::per_resource(priorities.expect("checked")),
                    delays: values,
                };
                // validates spaces, priorities and monotonicity
                crate::reductions::reduce_classic_to_priority(&classic)?;
                Instance::Classic(classic)
            }
            ModelKind::Affine => {
                let rows = priorities.clone().unwrap_or_default();
                if rows.windows(2).any(|w| w[0] != w[1]) {
                    b.fail("affine instances need consistent priorities".into());
                }
                let mut params = Vec::with_capacity(m);
                for name in &self.resources {
                    match self.delays.get(name) {
                        Some(DelayObj::Affine { alpha, beta }) => {
                            params.push((b.finite(alpha, "alpha"), b.finite(beta, "beta")))
                        }
                        _ => {
                            b.fail(format!("affine instances need an affine delay for resource {name:?}"));
                            params.push((Rational::from_ratio(0, 1), Rational::from_ratio(0, 1)));
                        }
                    }
                }
                finish(b)?;
                let affine = AffineGame {
                    resources: self.resources.clone(),
                    spaces,
                    priority: rows.first().cloned().unwrap_or_else(|| vec![1; n]),
                    params,
                };
                crate::reductions::reduce_affine_to_priority(&affine)?;
                Instance::Affine(affine)
            }
            ModelKind::Market => {
                if !self.delays.is_empty() {
                    b.fail("market instances take market_delays, not delays".into());
                }
                let mut costs = vec![vec![None; m]; n];
                for (pid, row) in &self.cost_matrix {
                    let p = match player_index(pid, n) {
                        Ok(p) => p,
                        Err(msg) => {
                            b.fail(msg);
                            continue;
                        }
                    };
                    for (rname, q) in row {
                        let r = b.resource(rname, "cost_matrix");
                        let c = b.finite(q, "market cost");
                        if r.0 < m {
                            costs[p][r.0] = Some(c);
                        }
                    }
                }
                let mut delays = Vec::with_capacity(m);
                for name in &self.resources {
                    delays.push(match self.market_delays.get(name) {
                        Some(obj) => b.market_delay(obj, name),
                        None => None,
                    });
                }
                for key in self.market_delays.keys().filter(|k| !self.resources.contains(k)) {
                    b.fail(format!("market delay given for unknown resource {key:?}"));
                }
                finish(b)?;
                Instance::Market(build_market(RawMarket { resources: self.resources.clone(), spaces, costs, delays })?)
            }
        };
        Ok(instance)
    }

    pub fn from_instance(instance: &Instance) -> InstanceFile {
        match instance {
            Instance::Priority(g) => Self::from_game(g),
            Instance::Market(mk) => Self::from_market(mk),
            Instance::Classic(c) => {
                let names = &c.resources;
                InstanceFile {
                    version: FORMAT_VERSION,
                    model: ModelKind::Classic,
                    players: c.spaces.len(),
                    resources: names.clone(),
                    priorities: Some(priorities_spec(&c.priorities, names)),
                    delays: names
                        .iter()
                        .zip(&c.delays)
                        .map(|(n, v)| (n.clone(), DelayObj::Classic { values: v.iter().cloned().map(Q).collect() }))
                        .collect(),
                    player_specific: BTreeMap::new(),
                    strategies: c.spaces.iter().map(|s| strategy_obj(s, names)).collect(),
                    cost_matrix: BTreeMap::new(),
                    market_delays: BTreeMap::new(),
                }
            }
            Instance::Affine(a) => {
                let names = &a.resources;
                InstanceFile {
                    version: FORMAT_VERSION,
                    model: ModelKind::Affine,
                    players: a.spaces.len(),
                    resources: names.clone(),
                    priorities: Some(PrioritiesSpec::Consistent(a.priority.clone())),
                    delays: names
                        .iter()
                        .zip(&a.params)
                        .map(|(n, (alpha, beta))| {
                            (
                                n.clone(),
                                DelayObj::Affine {
                                    alpha: Q(Cost::Finite(alpha.clone())),
                                    beta: Q(Cost::Finite(beta.clone())),
                                },
                            )
                        })
                        .collect(),
                    player_specific: BTreeMap::new(),
                    strategies: a.spaces.iter().map(|s| strategy_obj(s, names)).collect(),
                    cost_matrix: BTreeMap::new(),
                    market_delays: BTreeMap::new(),
                }
            }
        }
    }

    fn from_game(g: &Game) -> InstanceFile {
        let names = g.resource_names();
        let (delays, player_specific) = match g.delays() {
            Delays::Shared(d) => (names.iter().cloned().zip(d.iter().map(delay_obj)).collect(), BTreeMap::new()),
            Delays::PlayerSpecific(rows) => {
                let ps = rows
                    .iter()
                    .enumerate()
                    .map(|(p, row)| {
                        let inner: BTreeMap<String, DelayObj> = row
                            .iter()
                            .enumerate()
                            .filter_map(|(r, d)| d.as_ref().map(|d| (names[r].clone(), delay_obj(d))))
                            .collect();
                        ((p + 1).to_string(), inner)
                    })
                    .collect();
                (BTreeMap::new(), ps)
            }
        };
        InstanceFile {
            version: FORMAT_VERSION,
            model: ModelKind::Priority,
            players: g.n_players(),
            resources: names.to_vec(),
            priorities: Some(priorities_spec(g.priorities(), names)),
            delays,
            player_specific,
            strategies: g.spaces().iter().map(|s| strategy_obj(s, names)).collect(),
            cost_matrix: BTreeMap::new(),
            market_delays: BTreeMap::new(),
        }
    }

    fn from_market(mk: &MarketGame<Rational>) -> InstanceFile {
        let names = mk.resource_names();
        let cost_matrix = mk
            .costs()
            .iter()
            .enumerate()
            .map(|(p, row)| {
                let inner: BTreeMap<String, Q> = row
                    .iter()
                    .enumerate()
                    .filter_map(|(r, c)| c.as_ref().map(|c| (names[r].clone(), Q(Cost::Finite(c.clone())))))
                    .collect();
                ((p + 1).to_string(), inner)
            })
            .filter(|(_, inner)| !inner.is_empty())
            .collect();
        let market_delays = names
            .iter()
            .zip(mk.delays())
            .map(|(n, d)| {
                let obj = match d {
                    MarketDelay::Uniform(spec) => MarketDelayObj::Lifted { delay: delay_obj(spec) },
                    MarketDelay::PerLevel(levels) if levels.iter().all(|l| matches!(l, DelaySpec::Classic(_))) => {
                        MarketDelayObj::Classic {
                            values: levels
                                .iter()
                                .enumerate()
                                .flat_map(|(k, l)| {
                                    let DelaySpec::Classic(v) = l else { unreachable!() };
                                    v.iter().enumerate().map(move |(y, c)| (k as u32 + 1, y + 1, Q(c.clone())))
                                })
                                .collect(),
                        }
                    }
                    MarketDelay::PerLevel(levels) => MarketDelayObj::Table {
                        entries: levels
                            .iter()
                            .enumerate()
                            .flat_map(|(k, l)| {
                                let entries = match l {
                                    DelaySpec::Table(t) => {
                                        t.entries().into_iter().map(|(x, y, v)| (x, y, v.clone())).collect()
                                    }
                                    other => tabulate(other, 0),
                                };
                                entries.into_iter().map(move |(x, y, v)| (k as u32 + 1, x, y, Q(v)))
                            })
                            .collect(),
                    },
                };
                (n.clone(), obj)
            })
            .collect();
        InstanceFile {
            version: FORMAT_VERSION,
            model: ModelKind::Market,
            players: mk.n_players(),
            resources: names.to_vec(),
            priorities: None,
            delays: BTreeMap::new(),
            player_specific: BTreeMap::new(),
            strategies: mk.spaces().iter().map(|s| strategy_obj(s, names)).collect(),
            cost_matrix,
            market_delays,
        }
    }
}

/// Table entries of a non-table spec up to its bound (or `fallback`).
fn tabulate(spec: &DelaySpec<Rational>, fallback: usize) -> Vec<(usize, usize, Cost)> {
    let bound = spec.bound().unwrap_or(fallback);
    let mut out = Vec::new();
    for x in 0..bound {
        for y in 1..=bound - x {
            if let Ok(v) = spec.evaluate(x, y) {
                out.push((x, y, v));
            }
        }
    }
    out
}
