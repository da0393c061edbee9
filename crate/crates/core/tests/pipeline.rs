use pcg::congestion::is_pure_nash;
use pcg::dynamics::{initial_profile, run_dynamics, solve_consistent_layered, solve_insertion, MoveTrace, Policy};
use pcg::generate::{generate_random_instance, GenParams, PriorityStyle, SpaceKind};
use pcg::io::{parse_instance, read_trace, write_trace, Instance};
use pcg::oracle::certify_trace;
use pcg::{Game, Rational};

fn load(p: &GenParams, seed: u64) -> Game {
    let text = generate_random_instance(p, seed).to_json();
    match parse_instance(&text).unwrap() {
        Instance::Priority(g) => g,
        other => panic!("unexpected {:?}", other.kind()),
    }
}

fn through_csv(g: &Game, trace: &MoveTrace<Rational>) -> MoveTrace<Rational> {
    let mut buf = Vec::new();
    write_trace(trace, g.resource_names(), &mut buf).unwrap();
    read_trace(buf.as_slice(), g.resource_names()).unwrap()
}

#[test]
fn solve_export_replay() {
    for seed in 0..60 {
        let consistent = GenParams {
            players: 4,
            resources: 3,
            levels: 3,
            priorities: PriorityStyle::Consistent,
            space_kind: SpaceKind::Mixed,
            ..GenParams::default()
        };
        let g = load(&consistent, seed);
        let (profile, trace) = solve_consistent_layered(&g).unwrap();
        let report = certify_trace(&g, &through_csv(&g, &trace)).unwrap();
        assert!(report.is_clean(), "seed {seed}: {:?}", report.violations);
        assert_eq!(report.final_profile.as_ref(), Some(&profile));

        let (_, trace) = run_dynamics(&g, &initial_profile(&g), Policy::BestImprover, 10_000).unwrap();
        assert!(certify_trace(&g, &through_csv(&g, &trace)).unwrap().is_clean());

        let ps = GenParams { player_specific: true, ..GenParams::default() };
        let g = load(&ps, seed);
        let run = solve_insertion(&g).unwrap();
        let report = certify_trace(&g, &through_csv(&g, &run.trace)).unwrap();
        assert_eq!(report.is_clean(), run.rounds.iter().all(|r| r.invariant_holds()) && run.is_equilibrium);
        assert_eq!(report.final_is_pne, Some(is_pure_nash(&g, &run.profile).unwrap()));
    }
}

#[test]
fn corrupted_potential_is_caught() {
    let g = load(&GenParams { player_specific: true, players: 4, ..GenParams::default() }, 1);
    let run = solve_insertion(&g).unwrap();
    let mut trace = run.trace.clone();
    let last = trace.steps.iter().rposition(|s| s.potential.is_some()).unwrap();
    let first = trace.steps.iter().position(|s| s.potential.is_some()).unwrap();
    trace.steps[last].potential = trace.steps[first].potential.clone();
    if first != last {
        assert!(!certify_trace(&g, &trace).unwrap().is_clean());
    }
}
