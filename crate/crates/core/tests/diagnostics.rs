use kklab_core::diagnostics::*;
use kklab_core::*;

fn shock(n: usize, eps: f64, t_end: f64) -> SimConfig {
    let mut cfg = SimConfig::with_scenario(ScenarioKind::Riemann {
        left: State::new(2.0, 2.0),
        right: State::new(1.0, 1.0),
        x0: 0.0,
    })
    .unwrap();
    cfg.grid = Grid1D::new(-8.0, 8.0, n, Boundary::Outflow).unwrap();
    cfg.epsilon = eps;
    cfg.t_end = t_end;
    cfg
}

fn exact_trajectory(grid: Grid1D, frames: usize, t_end: f64) -> Trajectory {
    let sol = solve_riemann(
        &FluxLaw::ThinFilm,
        State::new(2.0, 2.0),
        State::new(1.0, 1.0),
    )
    .unwrap();
    let xs = grid.centers();
    let snapshots = (0..=frames)
        .map(|k| {
            let t = t_end * k as f64 / frames as f64;
            let states = sol.sample_at(&xs, 0.0, t).unwrap();
            Snapshot {
                step: k,
                fields: FieldPair::from_states(&states, t, Representation::Conservative),
            }
        })
        .collect();
    Trajectory {
        grid,
        snapshots,
        steps: frames,
    }
}

#[test]
fn ledger_balances_and_dissipates() {
    let cfg = shock(200, 0.1, 0.5);
    let pair = EntropyPair::new(1.0, 1.0, cfg.m).unwrap();
    let mut ledger = EntropyLedger::new(pair, cfg.law.clone(), cfg.epsilon, cfg.grid);
    let traj = run_observed(&cfg, &mut ledger).unwrap();
    assert_eq!(ledger.records().len(), traj.steps + 1);
    assert_eq!(entropy_balance_residual(&ledger, 0.0), 0.0);
    assert!(ledger.first_increase(1e-10).is_none());
    assert!(ledger.dissipation_monotone());
    let last = ledger.last().unwrap();
    assert_eq!(last.residual, entropy_balance_residual(&ledger, 0.5));
    let recomputed = total_entropy(&pair, &traj.last().fields, cfg.grid.dx());
    assert_eq!(last.total_entropy, recomputed);
    // first-order scheme: residual is an O(dx) numerical dissipation
    assert!(last.residual < 0.0 && last.residual > -0.5);
}

#[test]
fn ledger_of_constant_state_is_flat() {
    let mut cfg = SimConfig::with_scenario(ScenarioKind::Constant {
        state: State::new(1.5, 2.5),
    })
    .unwrap();
    cfg.t_end = 0.1;
    let pair = EntropyPair::new(1.0, 1.0, cfg.m).unwrap();
    let mut ledger = EntropyLedger::new(pair, cfg.law.clone(), cfg.epsilon, cfg.grid);
    run_observed(&cfg, &mut ledger).unwrap();
    for r in ledger.records() {
        assert!(r.residual.abs() < 1e-12);
        assert_eq!(r.dissipation_accum, 0.0);
    }
}

#[test]
fn dissipation_rate_by_hand() {
    // r = 1 except one cell with r = 4; only its neighbours see r_x
    let grid = Grid1D::new(0.0, 1.0, 10, Boundary::Periodic).unwrap();
    let mut states = vec![State::new(1.0, 1.0); 10];
    states[5] = State::new(2.0, 2.0);
    let fp = FieldPair::from_states(&states, 0.0, Representation::Conservative);
    let pair = EntropyPair::new(1.0, 1.0, 0.5).unwrap();
    let rate = dissipation_rate(&pair, 0.1, &fp, &grid);
    let manual: f64 = (0..10)
        .map(|i| {
            let r = |j: usize| states[(j + 10) % 10].r();
            let rx = (r(i + 1) - r(i + 9)) / (2.0 * grid.dx());
            pair.dissipation_density(r(i), rx)
        })
        .sum::<f64>()
        * 0.1
        * grid.dx();
    assert!((rate - manual).abs() <= 1e-12 * manual.abs());
    assert!(rate > 0.0);
}

#[test]
fn region_report_fields() {
    let fp = FieldPair::from_states(
        &[State::new(1.0, 2.0), State::new(2.0, 1.0)],
        0.0,
        Representation::Conservative,
    );
    let rep = invariant_region_check(&fp, 1.0, 2.0, 1e-8);
    assert!(rep.pass);
    assert_eq!(rep.r, [2.0, 2.0]);
    assert_eq!(rep.xi, [0.5, 2.0]);
    let json = kklab_core::io::json_string(&rep);
    assert!(json.contains("\"pass\": true"));
    let bad = invariant_region_check(&fp, 1.5, 2.0, 1e-8);
    assert!(!bad.pass);
    assert_eq!(bad.first_violation, Some(0));
    assert_eq!(bad.violations, 2);
}

#[test]
fn exact_solution_has_small_weak_residual() {
    let grid = Grid1D::new(-8.0, 8.0, 800, Boundary::Outflow).unwrap();
    let traj = exact_trajectory(grid, 200, 1.0);
    let window = SpaceTimeWindow {
        x_left: -5.0,
        x_right: 5.0,
        t_end: 1.0,
    };
    let bank = standard_test_bank(window);
    let w = weak_residual(&traj, &FluxLaw::ThinFilm, &bank).unwrap();
    assert!(w < 5e-3, "{w}");
    let pair = EntropyPair::new(1.0, 1.0, 0.5).unwrap();
    let e = entropy_inequality_residual(&traj, &pair, &FluxLaw::ThinFilm, &bank).unwrap();
    assert!(e < 1e-8, "{e}");
}

#[test]
fn sparse_snapshots_are_rejected() {
    let grid = Grid1D::new(-8.0, 8.0, 100, Boundary::Outflow).unwrap();
    let mut traj = exact_trajectory(grid, 4, 1.0);
    for (k, s) in traj.snapshots.iter_mut().enumerate() {
        s.step = k * (MAX_SNAPSHOT_GAP + 1);
    }
    let bank = standard_test_bank(SpaceTimeWindow {
        x_left: -5.0,
        x_right: 5.0,
        t_end: 1.0,
    });
    assert!(matches!(
        weak_residual(&traj, &FluxLaw::ThinFilm, &bank),
        Err(Error::InsufficientCadence { .. })
    ));
}

#[test]
fn viscous_entropy_residual_is_nonnegative_and_small() {
    let mut cfg = shock(200, 0.1, 1.0);
    cfg.output_every = 1;
    let traj = run(&cfg).unwrap();
    let pair = EntropyPair::new(1.0, 1.0, 0.5).unwrap();
    let bank = standard_test_bank(SpaceTimeWindow {
        x_left: -5.0,
        x_right: 5.0,
        t_end: 1.0,
    });
    let e =
        entropy_inequality_residual_viscous(&traj, &pair, &FluxLaw::ThinFilm, 0.1, &bank).unwrap();
    assert!((0.0..1e-8).contains(&e), "{e}");
}

#[test]
fn distances_and_crossings() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    assert_eq!(locate_crossing(&xs, &[0.0, 0.0, 2.0, 2.0], 1.0), Some(1.5));
    assert_eq!(locate_crossing(&xs, &[0.0; 4], 1.0), None);
    let a = vec![State::new(1.0, 1.0); 4];
    let b = vec![State::new(2.0, 1.0); 4];
    assert_eq!(
        window_l1_distance(&xs, &a, &b, 0.5, (0.5, 2.5)).unwrap(),
        1.0
    );
    assert!(window_l1_distance(&xs, &a, &b[..3], 0.5, (0.0, 3.0)).is_err());
}

#[test]
fn convergence_rejects_bad_ladders() {
    let cfg = shock(100, 0.1, 0.1);
    assert!(convergence_study(&cfg, &[], Reference::Exact, (-5.0, 5.0), 1).is_err());
    assert!(convergence_study(&cfg, &[0.1, 0.2], Reference::Exact, (-5.0, 5.0), 1).is_err());
    assert!(convergence_study(&cfg, &[0.1, -0.05], Reference::Exact, (-5.0, 5.0), 1).is_err());
}

#[test]
fn convergence_against_finest_rung() {
    let cfg = shock(200, 0.1, 0.5);
    let t = convergence_study(&cfg, &[0.4, 0.2, 0.1], Reference::Finest, (-5.0, 5.0), 2).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert_eq!(t.rows[2].status, "reference");
    assert!(t.rows[2].l1_error.is_none());
    assert!(t.rows[0].l1_error.unwrap() > t.rows[1].l1_error.unwrap());
    for r in &t.rows {
        assert!(r.dx <= r.eps / 4.0 + 1e-15);
        assert!(r.max_eps_rx.is_finite());
    }
}

#[test]
fn convergence_is_independent_of_worker_count() {
    let cfg = shock(100, 0.1, 0.25);
    let a = convergence_study(&cfg, &[0.4, 0.2], Reference::Exact, (-5.0, 5.0), 1).unwrap();
    let b = convergence_study(&cfg, &[0.4, 0.2], Reference::Exact, (-5.0, 5.0), 2).unwrap();
    let errs = |t: &ConvergenceTable| t.rows.iter().map(|r| r.l1_error).collect::<Vec<_>>();
    assert_eq!(errs(&a), errs(&b));
}

#[test]
fn order_fit() {
    let pts: Vec<(f64, f64)> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&e: &f64| (e, 0.7 * e.sqrt()))
        .collect();
    assert!((fit_order(&pts).unwrap() - 0.5).abs() < 1e-12);
}
