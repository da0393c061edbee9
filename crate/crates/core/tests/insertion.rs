//! Insertion algorithm on hand-built instances.

use std::collections::BTreeMap;

use pcg::dynamics::{solve_insertion, InsertionCase};
use pcg::model::{RawDelay, RawDelays};
use pcg::oracle::{brute_force_pne, certify_trace, EnumerationBudget};
use pcg::{build_game, Cost, DelaySpec, Game, PlayerId, RawGame, ResourceId, StrategySpace};

const E: ResourceId = ResourceId(0);
const F: ResourceId = ResourceId(1);

fn rows(rows: &[&[i64]]) -> RawDelay<pcg::Rational> {
    let bound = rows.len();
    RawDelay::Built(DelaySpec::table_from_fn(bound, |x, y| Cost::from_int(rows[x][y - 1])))
}

fn constant(v: i64) -> RawDelay<pcg::Rational> {
    RawDelay::Built(DelaySpec::table_from_fn(4, |_, _| Cost::from_int(v)))
}

/// Players 1 and 4 can only use `e`; 2 and 3 choose between `e` and `f`.
/// At `e` player 4 outranks everybody else, who share level 2.
fn discard_gap() -> Game {
    let mut overrides = BTreeMap::new();
    overrides.insert((PlayerId(0), E), constant(1));
    overrides.insert((PlayerId(1), E), rows(&[&[2, 2, 7, 7], &[7, 7, 7], &[7, 7], &[7]]));
    overrides.insert((PlayerId(1), F), constant(3));
    overrides.insert((PlayerId(2), E), rows(&[&[1, 1, 10, 10], &[5, 5, 10], &[10, 10], &[10]]));
    overrides.insert((PlayerId(2), F), constant(6));
    overrides.insert((PlayerId(3), E), constant(1));
    build_game(RawGame {
        resources: vec!["e".into(), "f".into()],
        spaces: vec![
            StrategySpace::singleton(vec![E]),
            StrategySpace::singleton(vec![E, F]),
            StrategySpace::singleton(vec![E, F]),
            StrategySpace::singleton(vec![E]),
        ],
        priorities: vec![vec![2, 2, 2, 1], vec![1, 1, 1, 1]],
        delays: RawDelays::PlayerSpecific { shared: vec![None, None], overrides },
    })
    .unwrap()
}

#[test]
fn discarding_can_create_an_outside_incentive() {
    let g = discard_gap();
    let run = solve_insertion(&g).unwrap();
    let cases: Vec<InsertionCase> = run.rounds.iter().map(|r| r.case).collect();
    assert_eq!(cases[..4], [InsertionCase::A, InsertionCase::A, InsertionCase::A, InsertionCase::B2]);

    // player 4 enters e and pushes player 2 out; player 3, sitting on f,
    // now sees e at (x, y) = (1, 2) instead of (0, 3), which is cheaper
    let r = &run.rounds[3];
    assert_eq!(r.discarded, vec![PlayerId(1)]);
    assert_eq!(r.incentives, vec![PlayerId(2)]);
    assert!(!r.invariant_holds());
    assert!(r.potential_increased());

    // the run still ends in an equilibrium here, and the certificate
    // reports the broken intermediate round
    assert!(run.is_equilibrium);
    assert!(run.rounds.iter().all(|r| r.potential_increased()));
    let all = brute_force_pne(&g, &mut EnumerationBudget::default()).unwrap();
    assert!(all.contains(&run.profile));
    let report = certify_trace(&g, &run.trace).unwrap();
    assert!(report.violations.iter().any(|v| v.message.contains("player 3 has a better response")));
}

#[test]
fn potential_strictly_increases_on_t1_like_games() {
    for priorities in [vec![vec![1, 2], vec![2, 1]], vec![vec![1, 1], vec![1, 1]], vec![vec![2, 1], vec![2, 1]]] {
        let g = build_game(RawGame {
            resources: vec!["a".into(), "b".into()],
            spaces: vec![StrategySpace::singleton(vec![E, F]); 2],
            priorities,
            delays: RawDelays::Shared(vec![Some(rows(&[&[1, 2], &[3]])), Some(rows(&[&[1, 2], &[3]]))]),
        })
        .unwrap();
        let run = solve_insertion(&g).unwrap();
        assert!(run.is_equilibrium);
        assert!(run.rounds.iter().all(|r| r.invariant_holds() && r.potential_increased()));
        assert!(certify_trace(&g, &run.trace).unwrap().is_clean());
    }
}
