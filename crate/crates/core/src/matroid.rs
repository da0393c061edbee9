//! Strategy spaces: singleton sets, explicit set families and matroid base
//! families, together with the matroid algorithms the solvers rely on
//! (base exchange, greedy minimum-weight base, single-swap improvement paths).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cost::ExtCost;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::ResourceId;

/// A set of resources, kept sorted by id. The derived order is the
/// id-lexicographic order on the sorted element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Strategy(Vec<ResourceId>);

impl Strategy {
    pub fn new<I: IntoIterator<Item = ResourceId>>(items: I) -> Self {
        let mut v: Vec<_> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Strategy(v)
    }

    pub fn single(r: ResourceId) -> Self {
        Strategy(vec![r])
    }

    pub fn contains(&self, r: ResourceId) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ResourceId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[ResourceId] {
        &self.0
    }

    /// `self \ {out} ∪ {inn}`.
    pub fn swap(&self, out: ResourceId, inn: ResourceId) -> Strategy {
        Strategy::new(self.iter().filter(|&r| r != out).chain(std::iter::once(inn)))
    }

    /// Elements of `self` not in `other`.
    pub fn minus<'a>(&'a self, other: &'a Strategy) -> impl Iterator<Item = ResourceId> + 'a {
        self.iter().filter(move |&r| !other.contains(r))
    }

    pub fn is_subset(&self, other: &Strategy) -> bool {
        self.iter().all(|r| other.contains(r))
    }

    /// The unique element of a singleton strategy.
    pub fn sole(&self) -> Option<ResourceId> {
        match self.0.as_slice() {
            [r] => Some(*r),
            _ => None,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|r| r.0.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromIterator<ResourceId> for Strategy {
    fn from_iter<I: IntoIterator<Item = ResourceId>>(iter: I) -> Self {
        Strategy::new(iter)
    }
}

/// An edge of a graphic matroid; the edge is the resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub resource: ResourceId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    /// All `rank`-subsets of `ground`.
    Uniform { ground: Vec<ResourceId>, rank: usize },
    /// Exactly `caps[k]` elements from each (disjoint) block.
    Partition { blocks: Vec<Vec<ResourceId>>, caps: Vec<usize> },
    /// Spanning trees of a connected multigraph on nodes `0..nodes`.
    Graphic { nodes: usize, edges: Vec<GraphEdge> },
    /// A listed base family; checked against the exchange axiom at validation.
    ExplicitBases { bases: Vec<Strategy> },
}

/// The strategy space of one player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpace {
    Singleton { allowed: Vec<ResourceId> },
    Explicit { sets: Vec<Strategy> },
    Matroid(MatroidKind),
}

impl StrategySpace {
    pub fn singleton<I: IntoIterator<Item = ResourceId>>(allowed: I) -> Self {
        let mut allowed: Vec<_> = allowed.into_iter().collect();
        allowed.sort_unstable();
        allowed.dedup();
        StrategySpace::Singleton { allowed }
    }

    pub fn explicit<I: IntoIterator<Item = Strategy>>(sets: I) -> Self {
        let mut sets: Vec<_> = sets.into_iter().collect();
        sets.sort();
        sets.dedup();
        StrategySpace::Explicit { sets }
    }

    pub fn uniform<I: IntoIterator<Item = ResourceId>>(ground: I, rank: usize) -> Self {
        let mut ground: Vec<_> = ground.into_iter().collect();
        ground.sort_unstable();
        ground.dedup();
        StrategySpace::Matroid(MatroidKind::Uniform { ground, rank })
    }

    pub fn partition(blocks: Vec<Vec<ResourceId>>, caps: Vec<usize>) -> Self {
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        StrategySpace::Matroid(MatroidKind::Partition { blocks, caps })
    }

    pub fn graphic(nodes: usize, edges: Vec<GraphEdge>) -> Self {
        StrategySpace::Matroid(MatroidKind::Graphic { nodes, edges })
    }

    pub fn explicit_bases<I: IntoIterator<Item = Strategy>>(bases: I) -> Self {
        let mut bases: Vec<_> = bases.into_iter().collect();
        bases.sort();
        bases.dedup();
        StrategySpace::Matroid(MatroidKind::ExplicitBases { bases })
    }

    /// Every resource appearing in some strategy, ascending.
    pub fn ground(&self) -> Vec<ResourceId> {
        let set: BTreeSet<ResourceId> = match self {
            StrategySpace::Singleton { allowed } => allowed.iter().copied().collect(),
            StrategySpace::Explicit { sets } => sets.iter().flat_map(|s| s.iter()).collect(),
            StrategySpace::Matroid(MatroidKind::Uniform { ground, .. }) => {
                ground.iter().copied().collect()
            }
            StrategySpace::Matroid(MatroidKind::Partition { blocks, .. }) => {
                blocks.iter().flatten().copied().collect()
            }
            StrategySpace::Matroid(MatroidKind::Graphic { edges, .. }) => {
                edges.iter().map(|e| e.resource).collect()
            }
            StrategySpace::Matroid(MatroidKind::ExplicitBases { bases }) => {
                bases.iter().flat_map(|s| s.iter()).collect()
            }
        };
        set.into_iter().collect()
    }

    pub fn is_matroid(&self) -> bool {
        !matches!(self, StrategySpace::Explicit { .. })
    }

    /// Membership test: is `s` one of this player's strategies?
    pub fn is_base(&self, s: &Strategy) -> bool {
        match self {
            StrategySpace::Singleton { allowed } => {
                s.sole().is_some_and(|r| allowed.binary_search(&r).is_ok())
            }
            StrategySpace::Explicit { sets } => sets.binary_search(s).is_ok(),
            StrategySpace::Matroid(m) => {
                s.len() == self.rank()
                    && s.is_subset(&Strategy::new(self.ground()))
                    && m.is_independent(s.as_slice())
            }
        }
    }

    /// Common base cardinality; for explicit families, the largest set size.
    pub fn rank(&self) -> usize {
        match self {
            StrategySpace::Singleton { .. } => 1,
            StrategySpace::Explicit { sets } => sets.iter().map(Strategy::len).max().unwrap_or(0),
            StrategySpace::Matroid(MatroidKind::Uniform { rank, .. }) => *rank,
            StrategySpace::Matroid(MatroidKind::Partition { caps, .. }) => caps.iter().sum(),
            StrategySpace::Matroid(MatroidKind::Graphic { nodes, .. }) => nodes.saturating_sub(1),
            StrategySpace::Matroid(MatroidKind::ExplicitBases { bases }) => {
                bases.first().map_or(0, Strategy::len)
            }
        }
    }

    /// Independence oracle (matroid spaces only).
    pub fn is_independent(&self, set: &[ResourceId]) -> Result<bool> {
        match self {
            StrategySpace::Singleton { allowed } => Ok(set.len() <= 1
                && set.iter().all(|r| allowed.binary_search(r).is_ok())),
            StrategySpace::Explicit { .. } => Err(Error::NotMatroid),
            StrategySpace::Matroid(m) => {
                let ground = self.ground();
                Ok(set.iter().all(|r| ground.binary_search(r).is_ok()) && m.is_independent(set))
            }
        }
    }

    /// All strategies in id-lexicographic order.
    pub fn all_strategies(&self) -> Vec<Strategy> {
        let mut out = match self {
            StrategySpace::Singleton { allowed } => {
                allowed.iter().map(|&r| Strategy::single(r)).collect()
            }
            StrategySpace::Explicit { sets } => sets.clone(),
            StrategySpace::Matroid(MatroidKind::ExplicitBases { bases }) => bases.clone(),
            StrategySpace::Matroid(_) => {
                let ground = self.ground();
                let rank = self.rank();
                let mut out = Vec::new();
                combinations(&ground, rank, &mut |c| {
                    let s = Strategy::new(c.iter().copied());
                    if self.is_base(&s) {
                        out.push(s);
                    }
                });
                out
            }
        };
        out.sort();
        out
    }

    /// The resources of a space whose strategies are all singletons.
    pub fn singleton_resources(&self) -> Option<Vec<ResourceId>> {
        match self {
            StrategySpace::Singleton { allowed } => Some(allowed.clone()),
            _ if self.rank() == 1 && self.all_strategies().iter().all(|s| s.len() == 1) => {
                Some(self.all_strategies().iter().filter_map(Strategy::sole).collect())
            }
            _ => None,
        }
    }

    /// Structural checks; `n_resources` bounds the valid ids.
    pub fn validate(&self, n_resources: usize) -> std::result::Result<(), String> {
        let ground = self.ground();
        if let Some(r) = ground.iter().find(|r| r.0 >= n_resources) {
            return Err(format!("unknown resource id {}", r.0));
        }
        match self {
            StrategySpace::Singleton { allowed } => {
                if allowed.is_empty() {
                    return Err("no allowed resource".into());
                }
            }
            StrategySpace::Explicit { sets } => {
                if sets.is_empty() {
                    return Err("no strategy listed".into());
                }
                if sets.iter().any(Strategy::is_empty) {
                    return Err("empty strategy listed".into());
                }
            }
            StrategySpace::Matroid(MatroidKind::Uniform { ground, rank }) => {
                if *rank == 0 || *rank > ground.len() {
                    return Err(format!("rank {rank} outside 1..={}", ground.len()));
                }
            }
            StrategySpace::Matroid(MatroidKind::Partition { blocks, caps }) => {
                if blocks.len() != caps.len() {
                    return Err("blocks and caps differ in length".into());
                }
                let total: usize = blocks.iter().map(Vec::len).sum();
                if total != ground.len() {
                    return Err("blocks are not disjoint".into());
                }
                if caps.iter().sum::<usize>() == 0 {
                    return Err("all caps are zero".into());
                }
                if let Some(k) = (0..caps.len()).find(|&k| caps[k] > blocks[k].len()) {
                    return Err(format!("cap of block {k} exceeds its size"));
                }
            }
            StrategySpace::Matroid(MatroidKind::Graphic { nodes, edges }) => {
                if edges.is_empty() || *nodes < 2 {
                    return Err("graph needs at least one edge and two nodes".into());
                }
                if edges.iter().any(|e| e.u >= *nodes || e.v >= *nodes) {
                    return Err("edge endpoint outside the node range".into());
                }
                if ground.len() != edges.len() {
                    return Err("two edges share one resource".into());
                }
                let mut uf = UnionFind::new(*nodes);
                for e in edges {
                    uf.union(e.u, e.v);
                }
                if (0..*nodes).any(|v| uf.find(v) != uf.find(0)) {
                    return Err("graph is not connected".into());
                }
            }
            StrategySpace::Matroid(MatroidKind::ExplicitBases { bases }) => {
                if bases.is_empty() {
                    return Err("no base listed".into());
                }
                let rank = bases[0].len();
                if rank == 0 || bases.iter().any(|b| b.len() != rank) {
                    return Err("bases differ in cardinality".into());
                }
                for s in bases {
                    for t in bases {
                        for e in s.minus(t) {
                            let ok = t
                                .minus(s)
                                .any(|f| bases.binary_search(&s.swap(e, f)).is_ok());
                            if !ok {
                                return Err(format!(
                                    "exchange axiom fails for {s} and {t} at element {}",
                                    e.0
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Smallest-id `e'` in `target \ s` with `s - e + e'` a base.
    pub fn exchange_step(&self, s: &Strategy, target: &Strategy, e: ResourceId) -> Result<ResourceId> {
        if !self.is_base(s) || !self.is_base(target) {
            return Err(Error::NotABase);
        }
        if !s.contains(e) || target.contains(e) {
            return Err(Error::NotExchangeable);
        }
        target
            .minus(s)
            .find(|&f| self.is_base(&s.swap(e, f)))
            .ok_or(Error::NoExchange)
    }

    /// Minimum-weight base by the greedy algorithm, scanning elements by
    /// ascending `(weight, id)`. Elements without a weight are treated as `+∞`.
    pub fn greedy_min_base<S: Scalar>(&self, weights: &BTreeMap<ResourceId, ExtCost<S>>) -> Result<Strategy> {
        if !self.is_matroid() {
            return Err(Error::NotMatroid);
        }
        let mut order = self.ground();
        order.sort_by(|a, b| weight(weights, *a).cmp(&weight(weights, *b)).then(a.cmp(b)));
        let rank = self.rank();
        let mut chosen: Vec<ResourceId> = Vec::with_capacity(rank);
        for r in order {
            if chosen.len() == rank {
                break;
            }
            chosen.push(r);
            if !self.is_independent(&chosen)? {
                chosen.pop();
            }
        }
        Ok(Strategy::new(chosen))
    }

    /// A chain of single-swap bases from `from`, each strictly cheaper than
    /// its predecessor, ending at a base no more expensive than `to`.
    ///
    /// Each step takes the swap with the largest weight drop (ties: smallest
    /// removed id, then smallest added id). Totals are compared as
    /// (number of infinite elements, finite sum), which agrees with the plain
    /// cost order whenever the totals are finite.
    pub fn lazy_path<S: Scalar>(
        &self,
        from: &Strategy,
        to: &Strategy,
        weights: &BTreeMap<ResourceId, ExtCost<S>>,
    ) -> Result<Vec<Strategy>> {
        if !self.is_matroid() {
            return Err(Error::NotMatroid);
        }
        if !self.is_base(from) || !self.is_base(to) {
            return Err(Error::NotABase);
        }
        let total = |s: &Strategy| s.iter().map(|r| weight(weights, r)).sum::<ExtCost<S>>();
        if total(to) >= total(from) {
            return Err(Error::NotImproving);
        }
        let target = refined_total(to, weights);
        let ground = self.ground();
        let mut path = vec![from.clone()];
        let mut current = from.clone();
        while refined_total(&current, weights) > target {
            let mut best: Option<(Drop<S>, ResourceId, ResourceId)> = None;
            for out in current.iter() {
                let w_out = weight(weights, out);
                for &inn in ground.iter().filter(|r| !current.contains(**r)) {
                    let w_in = weight(weights, inn);
                    if w_in >= w_out || !self.is_base(&current.swap(out, inn)) {
                        continue;
                    }
                    let drop = Drop::between(&w_out, &w_in);
                    if best.as_ref().is_none_or(|(d, _, _)| drop > *d) {
                        best = Some((drop, out, inn));
                    }
                }
            }
            let (_, out, inn) = best.ok_or(Error::NoExchange)?;
            current = current.swap(out, inn);
            path.push(current.clone());
        }
        Ok(path)
    }
}

fn weight<S: Scalar>(weights: &BTreeMap<ResourceId, ExtCost<S>>, r: ResourceId) -> ExtCost<S> {
    weights.get(&r).cloned().unwrap_or(ExtCost::Infinite)
}

fn refined_total<S: Scalar>(s: &Strategy, weights: &BTreeMap<ResourceId, ExtCost<S>>) -> (usize, S) {
    let mut inf = 0;
    let mut sum = S::zero();
    for r in s.iter() {
        match weight(weights, r) {
            ExtCost::Finite(v) => sum = sum + v,
            ExtCost::Infinite => inf += 1,
        }
    }
    (inf, sum)
}

/// Size of a weight decrease; removing an infinite element beats any finite drop.
#[derive(Debug, PartialEq, PartialOrd)]
enum Drop<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Drop<S> {
    fn between(out: &ExtCost<S>, inn: &ExtCost<S>) -> Self {
        match out.checked_sub(inn) {
            Some(d) => Drop::Finite(d),
            None => Drop::Infinite,
        }
    }
}

impl MatroidKind {
    fn is_independent(&self, set: &[ResourceId]) -> bool {
        match self {
            MatroidKind::Uniform { rank, .. } => set.len() <= *rank,
            MatroidKind::Partition { blocks, caps } => blocks.iter().zip(caps).all(|(b, &cap)| {
                set.iter().filter(|r| b.binary_search(r).is_ok()).count() <= cap
            }),
            MatroidKind::Graphic { nodes, edges } => {
                let mut uf = UnionFind::new(*nodes);
                set.iter().all(|r| {
                    edges
                        .iter()
                        .find(|e| e.resource == *r)
                        .is_some_and(|e| uf.union(e.u, e.v))
                })
            }
            MatroidKind::ExplicitBases { bases } => {
                let s = Strategy::new(set.iter().copied());
                bases.iter().any(|b| s.is_subset(b))
            }
        }
    }
}

fn combinations<T: Copy>(items: &[T], k: usize, visit: &mut impl FnMut(&[T])) {
    fn rec<T: Copy>(items: &[T], k: usize, start: usize, acc: &mut Vec<T>, visit: &mut impl FnMut(&[T])) {
        if acc.len() == k {
            visit(acc);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - acc.len() {
                break;
            }
            acc.push(items[i]);
            rec(items, k, i + 1, acc, visit);
            acc.pop();
        }
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), visit);
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Joins the classes of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cost;

    fn r(i: usize) -> ResourceId {
        ResourceId(i)
    }

    fn set(ids: &[usize]) -> Strategy {
        Strategy::new(ids.iter().map(|&i| r(i)))
    }

    fn weights(ws: &[i64]) -> BTreeMap<ResourceId, Cost> {
        ws.iter().enumerate().map(|(i, &w)| (r(i), Cost::from_int(w))).collect()
    }

    // a=0 b=1 c=2 d=3
    #[test]
    fn uniform_membership() {
        let u = StrategySpace::uniform([r(0), r(1), r(2)], 2);
        assert!(u.is_base(&set(&[0, 2])));
        assert!(!u.is_base(&set(&[0])));
        assert!(!u.is_base(&set(&[0, 3])));
    }

    #[test]
    fn explicit_bases_membership() {
        let m = StrategySpace::explicit_bases([set(&[0, 1]), set(&[1, 2])]);
        assert!(!m.is_base(&set(&[0, 2])));
        assert!(m.validate(3).is_ok());
    }

    #[test]
    fn exchange_examples() {
        let m = StrategySpace::explicit_bases([set(&[0, 1]), set(&[1, 2])]);
        assert_eq!(m.exchange_step(&set(&[0, 1]), &set(&[1, 2]), r(0)).unwrap(), r(2));

        let u = StrategySpace::uniform((0..4).map(r), 2);
        assert_eq!(u.exchange_step(&set(&[0, 1]), &set(&[2, 3]), r(0)).unwrap(), r(2));

        // triangle with edges ab=0, bc=1, ca=2 on nodes a=0 b=1 c=2
        let tri = StrategySpace::graphic(
            3,
            vec![
                GraphEdge { u: 0, v: 1, resource: r(0) },
                GraphEdge { u: 1, v: 2, resource: r(1) },
                GraphEdge { u: 2, v: 0, resource: r(2) },
            ],
        );
        assert_eq!(tri.exchange_step(&set(&[0, 1]), &set(&[0, 2]), r(1)).unwrap(), r(2));
    }

    #[test]
    fn exchange_rejects_bad_arguments() {
        let u = StrategySpace::uniform((0..4).map(r), 2);
        assert!(matches!(
            u.exchange_step(&set(&[0, 1]), &set(&[1, 2]), r(1)),
            Err(Error::NotExchangeable)
        ));
        assert!(matches!(
            u.exchange_step(&set(&[0]), &set(&[1, 2]), r(0)),
            Err(Error::NotABase)
        ));
    }

    #[test]
    fn non_matroid_bases_rejected() {
        // {a,b},{c,d}: exchanging a out of {a,b} towards {c,d} gives {b,c} or {b,d}, neither listed
        let bad = StrategySpace::explicit_bases([set(&[0, 1]), set(&[2, 3])]);
        assert!(bad.validate(4).is_err());
        let uneven = StrategySpace::explicit_bases([set(&[0, 1]), set(&[2])]);
        assert!(uneven.validate(4).is_err());
    }

    #[test]
    fn greedy_examples() {
        let u = StrategySpace::uniform([r(0), r(1), r(2)], 2);
        assert_eq!(u.greedy_min_base(&weights(&[3, 1, 2])).unwrap(), set(&[1, 2]));

        let m = StrategySpace::explicit_bases([set(&[0, 1]), set(&[1, 2])]);
        assert_eq!(m.greedy_min_base(&weights(&[1, 1, 5])).unwrap(), set(&[0, 1]));

        let equal = weights(&[4, 4, 4, 4]);
        let p = StrategySpace::partition(vec![vec![r(0), r(1)], vec![r(2), r(3)]], vec![1, 1]);
        assert_eq!(p.greedy_min_base(&equal).unwrap(), set(&[0, 2]));
    }

    #[test]
    fn greedy_handles_infinite_weights() {
        let u = StrategySpace::uniform([r(0), r(1), r(2)], 2);
        let mut w = weights(&[1, 1, 1]);
        w.insert(r(0), Cost::Infinite);
        assert_eq!(u.greedy_min_base(&w).unwrap(), set(&[1, 2]));
    }

    #[test]
    fn greedy_requires_matroid() {
        let e = StrategySpace::explicit([set(&[0]), set(&[1, 2])]);
        assert!(matches!(e.greedy_min_base(&weights(&[1, 1, 1])), Err(Error::NotMatroid)));
    }

    #[test]
    fn lazy_path_examples() {
        let u = StrategySpace::uniform([r(0), r(1), r(2)], 2);
        let path = u.lazy_path(&set(&[0, 1]), &set(&[1, 2]), &weights(&[3, 1, 1])).unwrap();
        assert_eq!(path, vec![set(&[0, 1]), set(&[1, 2])]);

        assert!(matches!(
            u.lazy_path(&set(&[1, 2]), &set(&[1, 2]), &weights(&[3, 1, 1])),
            Err(Error::NotImproving)
        ));

        let p = StrategySpace::partition(vec![vec![r(0), r(1)], vec![r(2), r(3)]], vec![1, 1]);
        let w = weights(&[5, 1, 5, 1]);
        let path = p.lazy_path(&set(&[0, 2]), &set(&[1, 3]), &w).unwrap();
        let totals: Vec<i64> = path
            .iter()
            .map(|s| s.iter().map(|x| [5, 1, 5, 1][x.0]).sum())
            .collect();
        assert_eq!(totals, vec![10, 6, 2]);
    }

    #[test]
    fn graphic_bases_are_spanning_trees() {
        // square with one diagonal: nodes 0..4, 5 edges -> 8 spanning trees
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| GraphEdge { u, v, resource: r(i) })
            .collect();
        let g = StrategySpace::graphic(4, edges);
        assert!(g.validate(5).is_ok());
        assert_eq!(g.rank(), 3);
        assert_eq!(g.all_strategies().len(), 8);
        assert!(!g.is_base(&set(&[0, 1, 4])));
    }

    #[test]
    fn singleton_resources_detection() {
        assert_eq!(
            StrategySpace::uniform([r(2), r(0)], 1).singleton_resources(),
            Some(vec![r(0), r(2)])
        );
        assert_eq!(StrategySpace::uniform([r(0), r(1)], 2).singleton_resources(), None);
    }
}
