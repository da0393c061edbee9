//! Potential functions and their orders.
//!
//! * [`lex_potential_singleton`]: sorted `(delay, level)` pairs, strictly
//!   decreasing under every better response of a singleton game.
//! * [`level_potential`]: the exact scalar potential of one priority level
//!   with all more prioritized players fixed (consistent priorities).
//! * [`market_lex_potential`]: the pair construction for singleton markets,
//!   with cost ranks as levels.
//! * [`insertion_potential`]: level-count rows plus the tolerance sum, which
//!   strictly increases over the rounds of the insertion algorithm.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::congestion::{Placement, Profile, State};
use crate::cost::ExtCost;
use crate::error::{Error, Result};
use crate::markets::MarketGame;
use crate::model::{CongestionView, DelaySpec, PriorityGame};
use crate::scalar::Scalar;
use crate::{PlayerId, ResourceId};

/// `(cost, level)` pairs sorted nondecreasingly; compared lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct LexVector<S>(pub Vec<(ExtCost<S>, u32)>);

impl<S: Scalar> Eq for LexVector<S> {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionPotential {
    /// Per resource `[n^1, ..., n^{q*}]`, rows sorted nondecreasingly.
    pub phi: Vec<Vec<usize>>,
    pub tol_sum: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialValue<S> {
    Scalar(ExtCost<S>),
    Lex(LexVector<S>),
    Insertion(InsertionPotential),
}

impl<S: Scalar> Eq for PotentialValue<S> {}

impl<S: Scalar> LexVector<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Pairs from one resource: for each present level `q` (ascending) and each
/// `y = 1..=n^q`, the pair `(d(n^{<q}, y), q)`.
fn resource_block<S: Scalar>(
    view: &CongestionView,
    mut delay: impl FnMut(u32, usize, usize) -> Result<ExtCost<S>>,
) -> Result<Vec<(ExtCost<S>, u32)>> {
    let mut block = Vec::with_capacity(view.total);
    for q in view.present_levels() {
        let x = view.below(q);
        for y in 1..=view.at(q) {
            block.push((delay(q, x, y)?, q));
        }
    }
    debug_assert!(
        block.windows(2).all(|w| w[0] <= w[1]),
        "per-resource block must be nondecreasing under the delay axioms"
    );
    Ok(block)
}

fn require_singleton_profile(profile: &Profile) -> Result<()> {
    if profile.0.iter().all(|s| s.len() == 1) {
        Ok(())
    } else {
        Err(Error::NotSingleton)
    }
}

pub fn lex_potential_singleton<S: Scalar>(game: &PriorityGame<S>, profile: &Profile) -> Result<PotentialValue<S>> {
    if !game.is_singleton() {
        return Err(Error::NotSingleton);
    }
    require_singleton_profile(profile)?;
    let mut pairs = Vec::with_capacity(profile.0.len());
    for r in game.resource_ids() {
        let d = game.shared_delay(r).ok_or(Error::PlayerSpecificInput)?;
        let view = game.congestion_view(profile, r);
        pairs.extend(resource_block(&view, |_, x, y| d.evaluate(x, y))?);
    }
    pairs.sort();
    Ok(PotentialValue::Lex(LexVector(pairs)))
}

pub fn market_lex_potential<S: Scalar>(market: &MarketGame<S>, profile: &Profile) -> Result<PotentialValue<S>> {
    if !market.is_singleton() {
        return Err(Error::NotSingleton);
    }
    require_singleton_profile(profile)?;
    let mut pairs = Vec::with_capacity(profile.0.len());
    for r in (0..market.n_resources()).map(ResourceId) {
        let view = market.market_view(profile, r, None);
        let delay = market.delay(r);
        pairs.extend(resource_block(&view, |k, x, y| delay.evaluate(k, x, y))?);
    }
    pairs.sort();
    Ok(PotentialValue::Lex(LexVector(pairs)))
}

pub fn lex_compare<S: Scalar>(a: &LexVector<S>, b: &LexVector<S>) -> Result<Ordering> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.0.cmp(&b.0))
}

/// `Σ_e Σ_{k=1}^{n_e(inner)} d_e(n_e(outer), k)` for the players of level `q`.
///
/// `outer` must place exactly the players with priority below `q`, `inner`
/// exactly those with priority `q`.
pub fn level_potential<S: Scalar>(
    game: &PriorityGame<S>,
    outer: &State,
    q: u32,
    inner: &State,
) -> Result<ExtCost<S>> {
    let common = game.priorities().common().ok_or(Error::InconsistentPriorities)?;
    if game.is_player_specific() {
        return Err(Error::PlayerSpecificInput);
    }
    let n = game.n_players();
    if outer.0.len() != n || inner.0.len() != n {
        return Err(Error::InvalidProfile(format!("states must cover {n} player slots")));
    }
    for p in game.players() {
        let level = common[p.0];
        if outer.covers(p) != (level < q) {
            return Err(Error::LevelMismatch(p.0));
        }
        if inner.covers(p) && level != q {
            return Err(Error::LevelMismatch(p.0));
        }
    }
    let mut total = ExtCost::zero();
    for r in game.resource_ids() {
        let fixed = outer.users_of(r, None).len();
        let movers = inner.users_of(r, None).len();
        let d: &DelaySpec<S> = game.shared_delay(r).expect("checked above");
        for k in 1..=movers {
            total = total + d.evaluate(fixed, k)?;
        }
    }
    Ok(total)
}

/// Largest `y` in `1..=cap` with `d_{i,e}(x, y)` no more than every
/// alternative's entry weight; `0` when even `y = 1` fails.
///
/// `cap` is the largest equal-level count the table of `e` can express
/// (`users(e) - x`), so tolerance never exceeds any count a state can reach.
fn tolerance<S: Scalar, P: Placement + ?Sized>(
    game: &PriorityGame<S>,
    placement: &P,
    player: PlayerId,
    e: ResourceId,
) -> Result<usize> {
    let view = game.congestion_view(placement, e);
    let x = view.below(game.priority(e, player));
    let cap = game.required_bound(e) - x;
    let mut best_alternative = ExtCost::Infinite;
    let mut has_alternative = false;
    for alt in game.space(player).singleton_resources().ok_or(Error::NotSingleton)? {
        if alt == e {
            continue;
        }
        has_alternative = true;
        let w = crate::congestion::CongestionModel::entry_weight(game, placement, player, alt)?;
        best_alternative = best_alternative.min(w);
    }
    if !has_alternative {
        return Ok(cap);
    }
    let d = game.delay(e, player);
    let mut tol = 0;
    for y in 1..=cap {
        if d.evaluate(x, y)? <= best_alternative {
            tol = y;
        } else {
            break;
        }
    }
    Ok(tol)
}

/// Tolerance of one covered player (see [`insertion_potential`]).
pub fn insertion_tolerance<S: Scalar, P: Placement + ?Sized>(
    game: &PriorityGame<S>,
    placement: &P,
    player: PlayerId,
) -> Result<usize> {
    let e = placement
        .strategy(player)
        .ok_or(Error::PlayerNotPlaced(player.0))?
        .sole()
        .ok_or(Error::NotSingleton)?;
    tolerance(game, placement, player, e)
}

pub fn insertion_potential<S: Scalar>(game: &PriorityGame<S>, state: &State) -> Result<InsertionPotential> {
    if !game.is_singleton() {
        return Err(Error::NotSingleton);
    }
    let mut phi = Vec::with_capacity(game.n_resources());
    for r in game.resource_ids() {
        let q_star = game.priorities().row(r).iter().copied().max().unwrap_or(0) as usize;
        let view = game.congestion_view(state, r);
        phi.push((1..=q_star as u32).map(|q| view.at(q)).collect::<Vec<_>>());
    }
    phi.sort();
    let mut tol_sum = 0;
    for p in state.covered() {
        tol_sum += insertion_tolerance(game, state, p)?;
    }
    Ok(InsertionPotential { phi, tol_sum })
}

/// Rows first (sequence of sorted rows, lexicographically), then `tol_sum`.
pub fn insertion_potential_compare(a: &InsertionPotential, b: &InsertionPotential) -> Result<Ordering> {
    let shape = |p: &InsertionPotential| {
        let mut lens: Vec<usize> = p.phi.iter().map(Vec::len).collect();
        lens.sort_unstable();
        lens
    };
    if shape(a) != shape(b) {
        return Err(Error::ShapeMismatch);
    }
    Ok(a.phi.cmp(&b.phi).then(a.tol_sum.cmp(&b.tol_sum)))
}

impl<S: Scalar> PotentialValue<S> {
    /// Compares two potentials of the same kind.
    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        match (self, other) {
            (PotentialValue::Scalar(a), PotentialValue::Scalar(b)) => Ok(a.cmp(b)),
            (PotentialValue::Lex(a), PotentialValue::Lex(b)) => lex_compare(a, b),
            (PotentialValue::Insertion(a), PotentialValue::Insertion(b)) => insertion_potential_compare(a, b),
            _ => Err(Error::ShapeMismatch),
        }
    }

    /// `p/q`, `lex:c@q c@q ...` or `ins:row|row;tol=K` (row entries space-separated).
    pub fn canonical(&self) -> String {
        match self {
            PotentialValue::Scalar(c) => c.canonical(),
            PotentialValue::Lex(v) => {
                let parts: Vec<String> = v.0.iter().map(|(c, q)| format!("{}@{q}", c.canonical())).collect();
                format!("lex:{}", parts.join(" "))
            }
            PotentialValue::Insertion(p) => {
                let rows: Vec<String> = p
                    .phi
                    .iter()
                    .map(|row| row.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
                    .collect();
                format!("ins:{};tol={}", rows.join("|"), p.tol_sum)
            }
        }
    }
}

impl<S: Scalar> fmt::Display for PotentialValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

fn bad(s: &str) -> Error {
    Error::Trace(format!("malformed potential {s:?}"))
}

impl<S: Scalar> FromStr for PotentialValue<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_prefix("lex:") {
            let mut pairs = Vec::new();
            for item in body.split_whitespace() {
                let (c, q) = item.split_once('@').ok_or_else(|| bad(s))?;
                let c = ExtCost::parse_canonical(c).ok_or_else(|| bad(s))?;
                pairs.push((c, q.parse().map_err(|_| bad(s))?));
            }
            return Ok(PotentialValue::Lex(LexVector(pairs)));
        }
        if let Some(body) = s.strip_prefix("ins:") {
            let (rows, tol) = body.rsplit_once(";tol=").ok_or_else(|| bad(s))?;
            let phi = if rows.is_empty() {
                Vec::new()
            } else {
                rows.split('|')
                    .map(|row| row.split_whitespace().map(str::parse).collect::<std::result::Result<Vec<usize>, _>>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad(s))?
            };
            let tol_sum = tol.parse().map_err(|_| bad(s))?;
            return Ok(PotentialValue::Insertion(InsertionPotential { phi, tol_sum }));
        }
        ExtCost::parse_canonical(s).map(PotentialValue::Scalar).ok_or_else(|| bad(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congestion::{CongestionModel, Profile};
    use crate::matroid::Strategy;
    use crate::testutil::*;
    use crate::{Cost, Rational};

    fn lex(pairs: &[(i64, u32)]) -> LexVector<Rational> {
        LexVector(pairs.iter().map(|&(c, q)| (Cost::from_int(c), q)).collect())
    }

    fn unwrap_lex(p: PotentialValue<Rational>) -> LexVector<Rational> {
        match p {
            PotentialValue::Lex(v) => v,
            other => panic!("expected a lex vector, got {other}"),
        }
    }

    #[test]
    fn lex_potential_on_t1() {
        let g = t1();
        let aa = unwrap_lex(lex_potential_singleton(&g, &Profile::singletons([A, A])).unwrap());
        assert_eq!(aa, lex(&[(1, 1), (3, 2)]));
        let ab = unwrap_lex(lex_potential_singleton(&g, &Profile::singletons([A, B])).unwrap());
        assert_eq!(ab, lex(&[(1, 1), (1, 1)]));
        assert_eq!(lex_compare(&ab, &aa).unwrap(), Ordering::Less);
    }

    #[test]
    fn lex_potential_same_level() {
        let g = single_resource_game(&[4, 4], |x, y| Cost::from_int((x + y) as i64));
        let v = unwrap_lex(lex_potential_singleton(&g, &Profile::singletons([A, A])).unwrap());
        assert_eq!(v, lex(&[(1, 4), (2, 4)]));
    }

    #[test]
    fn lex_compare_examples() {
        assert_eq!(lex_compare(&lex(&[(1, 1), (1, 1)]), &lex(&[(1, 1), (3, 2)])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&lex(&[(2, 1)]), &lex(&[(2, 1)])).unwrap(), Ordering::Equal);
        assert_eq!(lex_compare(&lex(&[(2, 1)]), &lex(&[(2, 3)])).unwrap(), Ordering::Less);
        assert!(matches!(lex_compare(&lex(&[(2, 1)]), &lex(&[])), Err(Error::LengthMismatch(1, 0))));
    }

    #[test]
    fn infinity_is_maximal_in_pairs() {
        let a = LexVector::<Rational>(vec![(Cost::from_int(100), 9)]);
        let b = LexVector::<Rational>(vec![(Cost::Infinite, 1)]);
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Less);
    }

    #[test]
    fn level_potential_examples() {
        let g = single_resource_game(&[1, 1], two_x_plus_y);
        let mut inner = State::empty(2);
        inner.place(P1, Strategy::single(A));
        inner.place(P2, Strategy::single(A));
        assert_eq!(level_potential(&g, &State::empty(2), 1, &inner).unwrap(), Cost::from_int(3));

        let g = single_resource_game(&[1, 2], two_x_plus_y);
        let mut outer = State::empty(2);
        outer.place(P1, Strategy::single(A));
        let mut inner = State::empty(2);
        assert_eq!(level_potential(&g, &outer, 2, &inner).unwrap(), Cost::zero());
        inner.place(P2, Strategy::single(A));
        assert_eq!(level_potential(&g, &outer, 2, &inner).unwrap(), Cost::from_int(3));
        assert!(matches!(level_potential(&g, &outer, 1, &inner), Err(Error::LevelMismatch(0))));
    }

    #[test]
    fn level_potential_requires_consistency() {
        let g = t1();
        let s = State::empty(2);
        assert!(matches!(level_potential(&g, &s, 1, &s), Err(Error::InconsistentPriorities)));
    }

    #[test]
    fn insertion_potential_examples() {
        let g = t1();
        let mut s = State::empty(2);
        let empty = insertion_potential(&g, &s).unwrap();
        assert_eq!(empty, InsertionPotential { phi: vec![vec![0, 0], vec![0, 0]], tol_sum: 0 });

        s.place(P1, Strategy::single(A));
        let one = insertion_potential(&g, &s).unwrap();
        assert_eq!(one.tol_sum, 1);
        assert_eq!(one.phi, vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(insertion_potential_compare(&empty, &one).unwrap(), Ordering::Less);

        let lone = single_player_game(1);
        let mut s = State::empty(1);
        s.place(P1, Strategy::single(A));
        assert_eq!(insertion_potential(&lone, &s).unwrap().tol_sum, 1);
    }

    #[test]
    fn insertion_compare_rules() {
        let a = InsertionPotential { phi: vec![vec![1, 0]], tol_sum: 3 };
        let b = InsertionPotential { phi: vec![vec![1, 0]], tol_sum: 4 };
        assert_eq!(insertion_potential_compare(&a, &b).unwrap(), Ordering::Less);
        let c = InsertionPotential { phi: vec![vec![0, 1]], tol_sum: 9 };
        assert_eq!(insertion_potential_compare(&c, &a).unwrap(), Ordering::Less);
        assert_eq!(insertion_potential_compare(&a, &a.clone()).unwrap(), Ordering::Equal);
        let d = InsertionPotential { phi: vec![vec![1, 0], vec![0]], tol_sum: 0 };
        assert!(matches!(insertion_potential_compare(&a, &d), Err(Error::ShapeMismatch)));
    }

    #[test]
    fn canonical_round_trip() {
        let values: Vec<PotentialValue<Rational>> = vec![
            PotentialValue::Scalar(Cost::from_ratio(7, 2)),
            PotentialValue::Scalar(Cost::Infinite),
            PotentialValue::Lex(LexVector(vec![(Cost::from_int(1), 1), (Cost::Infinite, 2)])),
            PotentialValue::Insertion(InsertionPotential { phi: vec![vec![0, 1], vec![1, 0]], tol_sum: 3 }),
        ];
        for v in values {
            let s = v.canonical();
            assert_eq!(s.parse::<PotentialValue<Rational>>().unwrap(), v, "{s}");
        }
        assert_eq!(
            PotentialValue::<Rational>::Insertion(InsertionPotential { phi: vec![vec![0, 1], vec![1, 0]], tol_sum: 3 })
                .canonical(),
            "ins:0 1|1 0;tol=3"
        );
    }

    #[test]
    fn potential_drops_on_t1_move() {
        let g = t1();
        let before = g.dynamics_potential(&Profile::singletons([A, A])).unwrap();
        let after = g.dynamics_potential(&Profile::singletons([A, B])).unwrap();
        assert_eq!(after.compare(&before).unwrap(), Ordering::Less);
    }
}
