//! Seeded random instances.
//!
//! Delay tables start from random values and are raised to the least table
//! above them that is monotone in `x` and `y` and satisfies
//! `d(x, y) <= d(x + y - 1, 1)`, so every generated instance validates.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{Instance, InstanceFile, ModelKind};
use crate::markets::{build_market, MarketDelay, RawMarket};
use crate::matroid::{GraphEdge, Strategy, StrategySpace};
use crate::model::{build_game, DelaySpec, RawDelay, RawDelays, RawGame};
use crate::reductions::{AffineGame, ClassicGame};
use crate::{Cost, PlayerId, Rational, ResourceId, Scalar};

const VALID: &str = "generated instances satisfy the delay axioms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Singleton,
    /// Up to four listed strategies per player.
    Explicit,
    Uniform,
    Partition,
    Graphic,
    /// Uniform, partition or graphic, drawn per player.
    Matroid,
    /// Any of the above, drawn per player.
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorityStyle {
    /// One priority per player, shared by all resources.
    Consistent,
    /// An independent priority row per resource.
    PerResource,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub players: usize,
    pub resources: usize,
    pub model: ModelKind,
    pub space_kind: SpaceKind,
    /// Delay numerators are drawn from `0..=max_delay`.
    pub max_delay: u32,
    /// Priorities (or market costs) are drawn from `1..=levels`.
    pub levels: u32,
    pub priorities: PriorityStyle,
    /// Priority model only: a separate delay table per player and resource.
    pub player_specific: bool,
    /// Probability of an infinite base entry in generated tables.
    pub inf_rate: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            players: 3,
            resources: 3,
            model: ModelKind::Priority,
            space_kind: SpaceKind::Singleton,
            max_delay: 6,
            levels: 2,
            priorities: PriorityStyle::PerResource,
            player_specific: false,
            inf_rate: 0.0,
        }
    }
}

fn value(rng: &mut impl Rng, max: u32) -> Rational {
    let den = rng.gen_range(1..=2i64);
    Rational::from_ratio(rng.gen_range(0..=i64::from(max) * den), den)
}

fn base_entry(rng: &mut impl Rng, p: &GenParams) -> Cost {
    if p.inf_rate > 0.0 && rng.gen_bool(p.inf_rate) {
        Cost::Infinite
    } else {
        Cost::Finite(value(rng, p.max_delay))
    }
}

/// Raises `t[x][y - 1]` (x + y <= bound) to the least table satisfying the
/// three delay axioms.
pub fn monotone_complete(t: &mut [Vec<Cost>]) {
    let bound = t.len();
    loop {
        let mut changed = false;
        let mut raise = |t: &mut [Vec<Cost>], x: usize, y: usize, v: &Cost| {
            if *v > t[x][y - 1] {
                t[x][y - 1] = v.clone();
                changed = true;
            }
        };
        for x in 0..bound {
            for y in 1..=bound - x {
                if x > 0 {
                    let v = t[x - 1][y - 1].clone();
                    raise(t, x, y, &v);
                }
                if y > 1 {
                    let v = t[x][y - 2].clone();
                    raise(t, x, y, &v);
                }
                if y > 1 {
                    let v = t[x][y - 1].clone();
                    raise(t, x + y - 1, 1, &v);
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn random_table(rng: &mut impl Rng, p: &GenParams, bound: usize) -> Vec<Vec<Cost>> {
    let mut t: Vec<Vec<Cost>> = (0..bound).map(|x| (1..=bound - x).map(|_| base_entry(rng, p)).collect()).collect();
    monotone_complete(&mut t);
    t
}

fn table_spec(t: &[Vec<Cost>]) -> DelaySpec<Rational> {
    DelaySpec::table_from_fn(t.len(), |x, y| t[x][y - 1].clone())
}

fn random_subset(rng: &mut impl Rng, m: usize, min: usize, max: usize) -> Vec<ResourceId> {
    let mut ids: Vec<ResourceId> = (0..m).map(ResourceId).collect();
    ids.shuffle(rng);
    let k = rng.gen_range(min.min(m)..=max.min(m));
    let mut out = ids[..k].to_vec();
    out.sort();
    out
}

/// A random strategy space over resources `0..m` (matroid grounds have at most
/// five elements and rank at most two).
pub fn random_space(rng: &mut impl Rng, kind: SpaceKind, m: usize) -> StrategySpace {
    match kind {
        SpaceKind::Singleton => StrategySpace::singleton(random_subset(rng, m, 1, m)),
        SpaceKind::Explicit => {
            let count = rng.gen_range(1..=4);
            let mut sets = BTreeSet::new();
            for _ in 0..count {
                sets.insert(Strategy::new(random_subset(rng, m, 1, m.min(3))));
            }
            StrategySpace::explicit(sets.into_iter().collect::<Vec<_>>())
        }
        SpaceKind::Uniform => {
            let ground = random_subset(rng, m, 1, 5);
            let rank = rng.gen_range(1..=ground.len().min(2));
            StrategySpace::uniform(ground, rank)
        }
        SpaceKind::Partition => {
            let ground = random_subset(rng, m, 1, 5);
            let n_blocks = rng.gen_range(1..=ground.len().min(2));
            let mut blocks = vec![Vec::new(); n_blocks];
            for (i, r) in ground.iter().enumerate() {
                let b = if i < n_blocks { i } else { rng.gen_range(0..n_blocks) };
                blocks[b].push(*r);
            }
            let caps = blocks.iter().map(|b| rng.gen_range(1..=b.len().min(2))).collect::<Vec<_>>();
            // keep the rank at most 2
            let mut caps = caps;
            while caps.iter().sum::<usize>() > 2 {
                let i = caps.iter().position(|&c| c > 1).unwrap_or(caps.len() - 1);
                if caps[i] > 1 {
                    caps[i] -= 1;
                } else {
                    caps.pop();
                    let last = blocks.pop().expect("block per cap");
                    blocks[0].extend(last);
                }
            }
            StrategySpace::partition(blocks, caps)
        }
        SpaceKind::Graphic => {
            if m < 2 {
                return random_space(rng, SpaceKind::Uniform, m);
            }
            // a connected multigraph on three nodes (rank 2) or two nodes (rank 1)
            let ground = random_subset(rng, m, 2, 5);
            let nodes = if rng.gen_bool(0.5) { 3 } else { 2 };
            let mut edges = Vec::new();
            for (i, r) in ground.iter().enumerate() {
                let (u, v) = if i + 1 < nodes {
                    (i, i + 1)
                } else {
                    let u = rng.gen_range(0..nodes);
                    let mut v = rng.gen_range(0..nodes - 1);
                    if v >= u {
                        v += 1;
                    }
                    (u.min(v), u.max(v))
                };
                edges.push(GraphEdge { u, v, resource: *r });
            }
            StrategySpace::graphic(nodes, edges)
        }
        SpaceKind::Matroid => {
            let k = [SpaceKind::Uniform, SpaceKind::Partition, SpaceKind::Graphic][rng.gen_range(0..3)];
            random_space(rng, k, m)
        }
        SpaceKind::Mixed => {
            let k = [SpaceKind::Singleton, SpaceKind::Explicit, SpaceKind::Uniform, SpaceKind::Partition, SpaceKind::Graphic]
                [rng.gen_range(0..5)];
            random_space(rng, k, m)
        }
    }
}

fn priority_rows(rng: &mut impl Rng, p: &GenParams) -> Vec<Vec<u32>> {
    let levels = p.levels.max(1);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> { (0..p.players).map(|_| rng.gen_range(1..=levels)).collect() };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    match p.priorities {
        PriorityStyle::Consistent => vec![draw(&mut local); p.resources],
        PriorityStyle::PerResource => (0..p.resources).map(|_| draw(&mut local)).collect(),
    }
}

/// A validated random instance; deterministic in `seed`.
pub fn generate(params: &GenParams, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = params;
    let n = p.players.max(1);
    let m = p.resources.max(1);
    let resources: Vec<String> = (0..m).map(|i| format!("r{}", i + 1)).collect();
    let spaces: Vec<StrategySpace> = (0..n).map(|_| random_space(&mut rng, p.space_kind, m)).collect();
    let p = &GenParams { players: n, resources: m, ..p.clone() };
    let bound = n.max(2);

    match p.model {
        ModelKind::Priority => {
            let priorities = priority_rows(&mut rng, p);
            let shared: Vec<Option<RawDelay<Rational>>> = (0..m)
                .map(|_| Some(RawDelay::Built(table_spec(&random_table(&mut rng, p, bound)))))
                .collect();
            let delays = if p.player_specific {
                let mut overrides = std::collections::BTreeMap::new();
                for (i, space) in spaces.iter().enumerate() {
                    for r in space.ground() {
                        let t = random_table(&mut rng, p, bound);
                        overrides.insert((PlayerId(i), r), RawDelay::Built(table_spec(&t)));
                    }
                }
                RawDelays::PlayerSpecific { shared: vec![None; m], overrides }
            } else {
                RawDelays::Shared(shared)
            };
            Instance::Priority(build_game(RawGame { resources, spaces, priorities, delays }).expect(VALID))
        }
        ModelKind::Classic => {
            let priorities = priority_rows(&mut rng, p);
            let delays = (0..m)
                .map(|_| {
                    let mut v: Vec<Cost> = (0..n).map(|_| base_entry(&mut rng, p)).collect();
                    v.sort();
                    v
                })
                .collect();
            let classic = ClassicGame {
                resources,
                spaces,
                priorities: crate::model::PriorityFunction::per_resource(priorities),
                delays,
            };
            Instance::Classic(classic)
        }
        ModelKind::Affine => {
            let priority = priority_rows(&mut rng, &GenParams { priorities: PriorityStyle::Consistent, ..p.clone() })
                .swap_remove(0);
            let params = (0..m).map(|_| (value(&mut rng, p.max_delay), value(&mut rng, p.max_delay))).collect();
            Instance::Affine(AffineGame { resources, spaces, priority, params })
        }
        ModelKind::Market => {
            let levels = p.levels.max(1);
            let costs: Vec<Vec<Option<Rational>>> = spaces
                .iter()
                .map(|space| {
                    let ground = space.ground();
                    (0..m)
                        .map(|r| ground.contains(&ResourceId(r)).then(|| Rational::from_ratio(rng.gen_range(1..=levels).into(), 1)))
                        .collect()
                })
                .collect();
            let delays = (0..m)
                .map(|_| {
                    let mut tables: Vec<Vec<Vec<Cost>>> = Vec::new();
                    for k in 0..levels as usize {
                        let mut t = random_table(&mut rng, p, bound);
                        if k > 0 {
                            for (row, prev) in t.iter_mut().zip(&tables[k - 1]) {
                                for (v, w) in row.iter_mut().zip(prev) {
                                    if *w > *v {
                                        *v = w.clone();
                                    }
                                }
                            }
                        }
                        tables.push(t);
                    }
                    Some(MarketDelay::PerLevel(tables.iter().map(|t| table_spec(t)).collect()))
                })
                .collect();
            Instance::Market(build_market(RawMarket { resources, spaces, costs, delays }).expect(VALID))
        }
    }
}

/// [`generate`] in file form.
pub fn generate_random_instance(params: &GenParams, seed: u64) -> InstanceFile {
    InstanceFile::from_instance(&generate(params, seed))
}
