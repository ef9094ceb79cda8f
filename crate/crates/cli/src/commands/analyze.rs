use rayon::prelude::*;

use nlcorr::dependence::{dependency_matrix, sample_moments, to_distance, Measure};
use nlcorr::network::{network_metrics, Network, NetworkMetrics};
use nlcorr::panel::rolling_windows;
use nlcorr::{DependencyMatrix64, DistanceMatrix64, Graph64, Tree64};

use super::{load_returns, window_spec};
use crate::args::{AnalyzeArgs, MeasureChoice};
use crate::error::{CliError, CliResult};
use crate::output::{num, write_run, Table};

struct MeasureWindow {
    dep: DependencyMatrix64,
    dist: DistanceMatrix64,
    tree: Tree64,
    graph: Graph64,
    metrics: NetworkMetrics<f64>,
    moments: [f64; 4],
}

struct WindowResult {
    index: usize,
    date: String,
    per_measure: Vec<MeasureWindow>,
}

fn measures(choice: MeasureChoice) -> Vec<Measure> {
    match choice {
        MeasureChoice::Pearson => vec![Measure::Pearson],
        MeasureChoice::Mi => vec![Measure::MutualInformation],
        MeasureChoice::Both => vec![Measure::Pearson, Measure::MutualInformation],
    }
}

pub fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let (panel, input) = load_returns(&args.io.input)?;
    let spec = window_spec(args.window, args.step)?;
    let views = rolling_windows(&panel, spec)?;
    let wanted = measures(args.measure);

    let results: Vec<WindowResult> = views
        .par_iter()
        .map(|view| -> CliResult<WindowResult> {
            let wrap = |e| CliError::in_window(view.index, view.end_date())(e);
            let per_measure = wanted
                .iter()
                .map(|&m| -> CliResult<MeasureWindow> {
                    let dep = dependency_matrix(view, m, args.bins).map_err(wrap)?;
                    let dist = to_distance(&dep);
                    let (tree, graph, metrics) =
                        network_metrics(&dist, args.threshold_q).map_err(wrap)?;
                    let moments = sample_moments(&dist.values.upper_triangle());
                    Ok(MeasureWindow {
                        dep,
                        dist,
                        tree,
                        graph,
                        metrics,
                        moments,
                    })
                })
                .collect::<CliResult<_>>()?;
            Ok(WindowResult {
                index: view.index,
                date: view.end_date().to_string(),
                per_measure,
            })
        })
        .collect::<CliResult<_>>()?;

    let tickers = panel.tickers();
    let mut tables = Vec::new();
    for (k, m) in wanted.iter().enumerate() {
        let name = m.name();
        let mut moments = Table::new(
            format!("{name}_moments.csv"),
            &["window", "date", "mean", "variance", "skewness", "kurtosis"],
        );
        let mut network = Table::new(
            format!("{name}_network.csv"),
            &[
                "window",
                "date",
                "tree_length",
                "occupation_layer",
                "central_vertex",
                "threshold",
                "graph_edges",
            ],
        );
        let mut assets = Table::new(
            format!("{name}_assets.csv"),
            &[
                "window",
                "date",
                "ticker",
                "tree_degree",
                "tree_betweenness",
                "tree_level",
                "graph_degree",
                "graph_clustering",
            ],
        );
        let mut edges = Table::new(
            format!("{name}_edges.csv"),
            &[
                "window", "date", "network", "source", "target", "distance", "weight",
            ],
        );
        let mut matrix = args.matrices.then(|| {
            Table::new(
                format!("{name}_matrix.csv"),
                &["window", "date", "row", "col", "dependency", "distance"],
            )
        });

        for r in &results {
            let w = r.index.to_string();
            let d = r.date.as_str();
            let mw = &r.per_measure[k];
            let [mean, var, skew, kurt] = mw.moments;
            moments.row([&w, d, &num(mean), &num(var), &num(skew), &num(kurt)]);
            let met = &mw.metrics;
            network.row([
                &w,
                d,
                &num(met.tree_length),
                &num(met.occupation_layer),
                &met.central,
                &num(mw.graph.threshold),
                &mw.graph.edges.len().to_string(),
            ]);
            for (i, t) in tickers.iter().enumerate() {
                assets.row([
                    &w,
                    d,
                    t,
                    &num(met.tree_degree[i]),
                    &num(met.tree_betweenness[i]),
                    &mw.tree.levels[i].to_string(),
                    &num(met.graph_degree[i]),
                    &num(met.graph_clustering[i]),
                ]);
            }
            let kinds: [(&str, &dyn Network<f64>); 2] =
                [("mst", &mw.tree), ("threshold", &mw.graph)];
            for (kind, net) in kinds {
                for e in net.edges() {
                    edges.row([
                        &w,
                        d,
                        kind,
                        &tickers[e.u],
                        &tickers[e.v],
                        &num(e.distance),
                        &num(e.weight),
                    ]);
                }
            }
            if let Some(t) = matrix.as_mut() {
                let n = mw.dep.n();
                for i in 0..n {
                    for j in 0..n {
                        t.row([
                            &w,
                            d,
                            &tickers[i],
                            &tickers[j],
                            &num(mw.dep.values[(i, j)]),
                            &num(mw.dist.values[(i, j)]),
                        ]);
                    }
                }
            }
        }
        tables.extend([moments, network, assets, edges]);
        tables.extend(matrix);
    }

    write_run(&args.io.out_dir, "analyze", None, vec![input], args, tables)?;
    Ok(())
}
