use std::path::PathBuf;

use kklab_core::diagnostics::EntropyLedger;
use kklab_core::io::{read_snapshot_csv, write_run, RUN_SCHEMA};
use kklab_core::state::{from_invariants, to_invariants, StateSpace};
use kklab_core::*;
use proptest::prelude::*;

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

#[test]
fn minimal_file_resolves_defaults() {
    let cfg = parse_config_str(
        "scenario = \"riemann\"\nleft = \"2,2\"\nright = \"1,1\"\nepsilon = 0.1\n",
        "minimal.toml",
        &[],
    )
    .unwrap();
    assert_eq!((cfg.m, cfg.big_m), (0.5, 4.0));
    assert_eq!((cfg.cfl_adv, cfg.cfl_diff), (0.45, 0.4));
    assert_eq!(cfg.grid.n_cells, 400);
    assert_eq!(cfg.representation, Representation::Invariant);
    assert_eq!(cfg.scenario.id(), "riemann");
}

#[test]
fn validation_names_the_key() {
    match parse_config_str("epsilon = -1\n", "x", &[]).unwrap_err() {
        Error::Validation { key, .. } => assert_eq!(key, "epsilon"),
        other => panic!("{other:?}"),
    }
    match parse_config_str("left = [0.1, 2.0]\n", "x", &[]).unwrap_err() {
        Error::Validation { message, .. } => assert!(message.contains("[m, M]^2")),
        other => panic!("{other:?}"),
    }
    match parse_config_str("epsilon = \n", "bad.toml", &[]).unwrap_err() {
        Error::Parse { origin, .. } => assert_eq!(origin, "bad.toml"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn shipped_configs_validate() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg =
                parse_config(&path, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.validate().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn scenario_defaults_validate() {
    let kinds = [
        ScenarioKind::Riemann {
            left: State::new(2.0, 2.0),
            right: State::new(1.0, 1.0),
            x0: 0.0,
        },
        ScenarioKind::Contact {
            r: 2.0,
            xi_left: 0.5,
            xi_right: 2.0,
            x0: 0.0,
        },
        ScenarioKind::SmoothSine {
            mean: State::new(2.0, 2.0),
            amplitude: 0.5,
            wavelength: 1.0,
        },
        ScenarioKind::Constant {
            state: State::new(2.0, 2.0),
        },
        ScenarioKind::CustomTable {
            breakpoints: vec![-1.0, 1.0],
            states: vec![
                State::new(1.0, 1.0),
                State::new(2.0, 1.0),
                State::new(1.0, 2.0),
            ],
        },
    ];
    for kind in kinds {
        let cfg = SimConfig::with_scenario(kind).unwrap();
        cfg.validate()
            .unwrap_or_else(|e| panic!("{}: {e}", cfg.scenario.id()));
    }
}

#[test]
fn run_directory_layout() {
    let cfg = parse_config_str("n_cells = 64\nt_end = 0.1\noutput_every = 5\n", "x", &[]).unwrap();
    cfg.validate().unwrap();
    let pair = EntropyPair::new(cfg.k, cfg.p, cfg.m).unwrap();
    let mut ledger = EntropyLedger::new(pair, cfg.law.clone(), cfg.epsilon, cfg.grid);
    let traj = run_observed(&cfg, &mut ledger).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let meta = write_run(dir.path(), &cfg, "viscous-invariant", &traj, &ledger, 0.0).unwrap();
    assert_eq!(meta.schema, RUN_SCHEMA);
    assert_eq!(meta.snapshots.len(), traj.snapshots.len());
    let last = meta.snapshots.last().unwrap();
    assert_eq!(last.time, 0.1);
    let (xs, fields) = read_snapshot_csv(&dir.path().join(&last.file)).unwrap();
    assert_eq!(xs, cfg.grid.centers());
    let expected = traj.last().fields.to_conservative();
    assert_eq!(fields.a, expected.a);
    assert_eq!(fields.b, expected.b);
    let meta_json = std::fs::read_to_string(dir.path().join("meta.json")).unwrap();
    assert!(meta_json.contains("\"kklab.snapshot/1\""));
    assert!(meta_json.contains("\"kklab.ledger/1\""));
    let ledger_csv = std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    assert_eq!(ledger_csv.lines().count(), ledger.records().len() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn invariant_round_trip(u in 0.5f64..=4.0, v in 0.5f64..=4.0) {
        let space = StateSpace::new(0.5).unwrap();
        let s = State::new(u, v);
        let back = from_invariants(to_invariants(s, space).unwrap()).unwrap();
        prop_assert!(ulps(back.u, u) <= 8, "u {} -> {}", u, back.u);
        prop_assert!(ulps(back.v, v) <= 8, "v {} -> {}", v, back.v);
    }
}
