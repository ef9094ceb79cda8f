use nlcorr::dependence::{bin_count, dependency_matrix, moment_series, to_distance, Measure};
use nlcorr::network::{network_metrics, Network};
use nlcorr::nonlinearity::{analyze_nonlinearity, chi_profile, window_seed};
use nlcorr::panel::{
    gen_synthetic, read_price_table, rolling_windows, to_log_returns, Correlation, Regime,
    SyntheticSpec, WindowSpec,
};
use nlcorr::portfolio::{run_backtest, BacktestConfig, Strategy};
use nlcorr::surrogate::SurrogateMode;
use nlcorr::{
    DependencyMatrix32, DistanceMatrix64, Error, PriceTable64, ReturnPanel32, ReturnPanel64,
};

fn price_csv(panel: &ReturnPanel64) -> String {
    let mut s = format!("date,{}\n", panel.tickers().join(","));
    let mut log_p = vec![0.0f64; panel.n_series()];
    s.push_str("1999-12-31");
    for _ in 0..panel.n_series() {
        s.push_str(",100");
    }
    s.push('\n');
    for t in 0..panel.len() {
        s.push_str(&panel.dates()[t]);
        for (i, lp) in log_p.iter_mut().enumerate() {
            *lp += panel.series(i)[t];
            s.push_str(&format!(",{:.17e}", 100.0 * lp.exp()));
        }
        s.push('\n');
    }
    s
}

fn coupled(n: usize, len: usize, seed: u64) -> ReturnPanel64 {
    let spec = SyntheticSpec::new(n, len, Regime::NonlinearCoupled)
        .with_correlation(Correlation::Uniform(0.3))
        .with_scale(0.0002, 0.012);
    gen_synthetic(&spec, seed).unwrap()
}

#[test]
fn csv_to_network_metrics() {
    let source = coupled(6, 400, 1);
    let table: PriceTable64 = read_price_table(price_csv(&source).as_bytes()).unwrap();
    let panel = to_log_returns(&table).unwrap();
    assert_eq!(panel.len(), 400);
    for i in 0..6 {
        for (a, b) in panel.series(i).iter().zip(source.series(i)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    let views = rolling_windows(&panel, WindowSpec::new(200, 50).unwrap()).unwrap();
    assert_eq!(views.len(), 5);
    let mut distances: Vec<DistanceMatrix64> = Vec::new();
    for view in &views {
        for m in [Measure::Pearson, Measure::MutualInformation] {
            let dep = dependency_matrix(view, m, None).unwrap();
            assert!(dep.values.is_symmetric());
            let dist = to_distance(&dep);
            let (tree, graph, metrics) = network_metrics(&dist, 0.2).unwrap();
            assert_eq!(tree.edges().len(), 5);
            // ⌈0.2·15⌉ = 3 pairs on distinct distances
            assert_eq!(graph.edges().len(), 3);
            assert!(metrics.tree_length > 0.0);
            assert_eq!(tree.levels[tree.central], 0);
            if m == Measure::MutualInformation {
                distances.push(dist);
            }
        }
    }
    let moments = moment_series(&distances);
    assert_eq!(moments.windows, vec![0, 1, 2, 3, 4]);
    assert!(moments.mean.iter().all(|&m| m > 0.0 && m < 1.0));
}

#[test]
fn window_count_for_long_history() {
    let spec = WindowSpec::new(1000, 20).unwrap();
    assert_eq!(spec.count(7816), 341);
    assert_eq!(spec.count(1005), 1);
    assert_eq!(spec.count(1000), 1);
    assert_eq!(bin_count(1000).unwrap(), 16);
}

#[test]
fn single_and_double_precision_agree() {
    let p64 = coupled(4, 300, 3);
    let rows32: Vec<Vec<f32>> = p64
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| x as f32).collect())
        .collect();
    let p32 = ReturnPanel32::new(p64.tickers().to_vec(), p64.dates().to_vec(), rows32).unwrap();
    let spec = WindowSpec::new(300, 1).unwrap();
    let v64 = rolling_windows(&p64, spec).unwrap();
    let v32 = rolling_windows(&p32, spec).unwrap();

    let r64 = dependency_matrix(&v64[0], Measure::Pearson, None).unwrap();
    let r32: DependencyMatrix32 = dependency_matrix(&v32[0], Measure::Pearson, None).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert!((r64.values[(i, j)] - r32.values[(i, j)] as f64).abs() < 1e-5);
        }
    }
    let t64 = network_metrics(&to_distance(&r64), 0.3).unwrap().0;
    let t32 = network_metrics(&to_distance(&r32), 0.3).unwrap().0;
    let key = |edges: &[nlcorr::network::Edge<f64>]| {
        let mut k: Vec<(usize, usize)> = edges.iter().map(|e| (e.u, e.v)).collect();
        k.sort();
        k
    };
    let e32: Vec<nlcorr::network::Edge<f64>> = t32
        .edges
        .iter()
        .map(|e| nlcorr::network::Edge {
            u: e.u,
            v: e.v,
            distance: e.distance as f64,
            weight: e.weight as f64,
        })
        .collect();
    assert_eq!(key(&t64.edges), key(&e32));
}

#[test]
fn nonlinearity_flags_coupled_pairs() {
    let panel = coupled(4, 1000, 8);
    let nl = analyze_nonlinearity(
        &panel,
        0,
        20,
        SurrogateMode::SharedPhase,
        window_seed(8, 0),
        None,
    )
    .unwrap();
    let profile = chi_profile(&nl.chi).unwrap();
    assert!(nl.chi.values[(0, 1)] > 3.0);
    assert!(nl.chi.values[(2, 3)] > 3.0);
    assert!(nl.zeta.values[(0, 1)] > nl.zeta.values[(0, 2)]);
    assert!(profile.global > 0.0);
    assert!(matches!(
        analyze_nonlinearity(&panel, 0, 0, SurrogateMode::SharedPhase, 1, None),
        Err(Error::Validation(_))
    ));
}

#[test]
fn backtest_paths_are_positive_and_reproducible() {
    let spec = SyntheticSpec::new(3, 360, Regime::RegimeSwitch)
        .with_correlation(Correlation::Uniform(0.4))
        .with_scale(0.0003, 0.01);
    let panel: ReturnPanel64 = gen_synthetic(&spec, 12).unwrap();
    let config = BacktestConfig {
        window: 120,
        rebalance: 30,
        seed: 4,
        ..BacktestConfig::default()
    };
    let rate = vec![5e-5; panel.len()];
    let a = run_backtest(&panel, &rate, &config).unwrap();
    let b = run_backtest(&panel, &rate, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.records.len(), 8);
    assert_eq!(a.dates.len(), 360 - 120 + 1);
    assert_eq!(a.dates[0], panel.dates()[119]);
    for s in [Strategy::Fixed, Strategy::Full, Strategy::Nlc] {
        assert!(a.values(s).iter().all(|&v| v > 0.0 && v.is_finite()));
    }
    for r in &a.records {
        assert!(r.weights.iter().all(|&w| w >= -1e-12));
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        assert!((-1.0..=1.0).contains(&r.cash_weight));
    }
}
