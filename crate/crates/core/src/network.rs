//! Minimum spanning trees, threshold graphs and their topology metrics.

use std::cmp::Ordering;
use std::collections::VecDeque;

use serde::Serialize;

use crate::dependence::{DistanceMatrix, Metric};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge<S> {
    pub u: usize,
    pub v: usize,
    pub distance: S,
    /// Dependency strength behind the edge. Normalized by the maximum in a
    /// [`Graph`], raw in a [`Tree`].
    pub weight: S,
}

/// Anything with labelled nodes and an undirected edge list.
pub trait Network<S> {
    fn labels(&self) -> &[String];
    fn edges(&self) -> &[Edge<S>];

    fn n(&self) -> usize {
        self.labels().len()
    }

    /// Raw incident-edge count per node.
    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n()];
        for e in self.edges() {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in self.edges() {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tree<S> {
    pub labels: Vec<String>,
    pub edges: Vec<Edge<S>>,
    pub window: usize,
    /// Degree-central vertex.
    pub central: usize,
    /// Hop distance of each node from `central`.
    pub levels: Vec<usize>,
    /// BFS parent towards `central` (`None` for the centre itself).
    pub parent: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Graph<S> {
    pub labels: Vec<String>,
    pub edges: Vec<Edge<S>>,
    pub window: usize,
    pub q: f64,
    /// Largest distance kept.
    pub threshold: S,
}

impl<S> Network<S> for Tree<S> {
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }
}

impl<S> Network<S> for Graph<S> {
    fn labels(&self) -> &[String] {
        &self.labels
    }
    fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }
}

/// Rank of every label in lexicographic order (index breaks duplicates).
fn label_ranks(labels: &[String]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| labels[a].cmp(&labels[b]).then(a.cmp(&b)));
    let mut rank = vec![0; labels.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn pair_key(rank: &[usize], a: usize, b: usize) -> (usize, usize) {
    let (x, y) = (rank[a], rank[b]);
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

fn check_distances<S: Scalar>(d: &DistanceMatrix<S>) -> Result<()> {
    let n = d.n();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "network nodes",
            needed: 2,
            got: n,
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !d.values[(i, j)].is_finite() || !d.values[(j, i)].is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite distance between {} and {} in window {}",
                    d.labels[i], d.labels[j], d.window
                )));
            }
        }
    }
    Ok(())
}

/// Hop distances from `root` over an adjacency list, plus BFS parents.
fn bfs(adj: &[Vec<usize>], root: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut dist = vec![None; adj.len()];
    let mut parent = vec![None; adj.len()];
    let mut queue = VecDeque::from([root]);
    dist[root] = Some(0);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].expect("queued nodes are reached");
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    (dist, parent)
}

/// Prim's algorithm on the dense distance matrix. Equal-distance candidates
/// are resolved by the lexicographically smallest `(ticker_lo, ticker_hi)`.
pub fn build_mst<S: Scalar>(d: &DistanceMatrix<S>) -> Result<Tree<S>> {
    check_distances(d)?;
    let n = d.n();
    let rank = label_ranks(&d.labels);
    let start = (0..n).min_by_key(|&i| rank[i]).expect("n >= 2");

    let mut in_tree = vec![false; n];
    // best crossing edge per outside vertex: (distance, key, tree endpoint)
    let mut best: Vec<Option<(S, (usize, usize), usize)>> = vec![None; n];
    in_tree[start] = true;
    for v in 0..n {
        if v != start {
            best[v] = Some((d.values[(start, v)], pair_key(&rank, start, v), start));
        }
    }
    let better = |a: &(S, (usize, usize), usize), b: &(S, (usize, usize), usize)| match a
        .0
        .partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
    {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    };

    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let cand = best[v].as_ref().expect("outside vertices have a candidate");
            if pick.map_or(true, |p| better(cand, best[p].as_ref().expect("set"))) {
                pick = Some(v);
            }
        }
        let v = pick.expect("a vertex remains outside");
        let (dist, _, u) = best[v].expect("set");
        in_tree[v] = true;
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        edges.push(Edge {
            u: a,
            v: b,
            distance: dist,
            weight: d.similarity(dist),
        });
        for w in 0..n {
            if in_tree[w] {
                continue;
            }
            let cand = (d.values[(v, w)], pair_key(&rank, v, w), v);
            if better(&cand, best[w].as_ref().expect("set")) {
                best[w] = Some(cand);
            }
        }
    }

    let mut tree = Tree {
        labels: d.labels.clone(),
        edges,
        window: d.window,
        central: start,
        levels: vec![0; n],
        parent: vec![None; n],
    };
    tree.central = central_vertex(&tree);
    let (dist, parent) = bfs(&tree.neighbours(), tree.central);
    tree.levels = dist
        .into_iter()
        .map(|x| x.expect("tree is connected"))
        .collect();
    tree.parent = parent;
    Ok(tree)
}

/// Maximum degree, then smallest hop-distance sum, then smallest ticker.
pub fn central_vertex<S: Scalar>(tree: &Tree<S>) -> usize {
    let deg = tree.degrees();
    let adj = tree.neighbours();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut best: Option<(usize, usize)> = None;
    for i in (0..tree.n()).filter(|&i| deg[i] == max_deg) {
        let hops: usize = bfs(&adj, i).0.iter().map(|x| x.unwrap_or(0)).sum();
        let replace = match best {
            None => true,
            Some((b, bh)) => hops < bh || (hops == bh && tree.labels[i] < tree.labels[b]),
        };
        if replace {
            best = Some((i, hops));
        }
    }
    best.map_or(0, |(i, _)| i)
}

/// Smallest `k` with `k ≥ q·m`, at least 1.
fn quantile_rank(q: f64, m: usize) -> usize {
    ((q * m as f64 - 1e-9).ceil() as usize).clamp(1, m)
}

/// Keeps every pair whose distance is at or below the `q`-quantile of the
/// off-diagonal distances, so `q·m` pairs on distinct distances and all tied
/// pairs at the cut.
pub fn build_threshold_graph<S: Scalar>(d: &DistanceMatrix<S>, q: f64) -> Result<Graph<S>> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Validation(format!(
            "threshold quantile must lie in (0, 1), got {q}"
        )));
    }
    check_distances(d)?;
    let n = d.n();
    let mut sorted = d.values.upper_triangle();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let threshold = sorted[quantile_rank(q, sorted.len()) - 1];

    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = d.values[(i, j)];
            if dist <= threshold {
                let raw = d.similarity(dist);
                let w = match d.metric {
                    Metric::MiDistance => raw,
                    Metric::CorrDistance => raw.max(S::zero()),
                };
                edges.push(Edge {
                    u: i,
                    v: j,
                    distance: dist,
                    weight: w,
                });
            }
        }
    }
    let max_w = edges.iter().map(|e| e.weight).fold(S::zero(), S::max);
    if max_w > S::zero() {
        for e in &mut edges {
            e.weight = e.weight / max_w;
        }
    }
    Ok(Graph {
        labels: d.labels.clone(),
        edges,
        window: d.window,
        q,
        threshold,
    })
}

/// Mean edge distance of the tree.
pub fn normalized_tree_length<S: Scalar>(tree: &Tree<S>) -> S {
    if tree.edges.is_empty() {
        return S::zero();
    }
    tree.edges.iter().map(|e| e.distance).sum::<S>() / S::from_usize_lossy(tree.edges.len())
}

/// Mean hop distance from the central vertex, centre included at level 0.
pub fn mean_occupation_layer<S: Scalar>(tree: &Tree<S>) -> S {
    let total: usize = tree.levels.iter().sum();
    S::from_usize_lossy(total) / S::from_usize_lossy(tree.n())
}

/// Incident-edge count divided by `N`.
pub fn degree_centrality<S: Scalar, G: Network<S> + ?Sized>(g: &G) -> Vec<S> {
    let n = S::from_usize_lossy(g.n());
    g.degrees()
        .into_iter()
        .map(|k| S::from_usize_lossy(k) / n)
        .collect()
}

/// Weighted clustering coefficient
/// `c_i = 1/(k_i(k_i−1)) Σ_{j≠k} (w̃_ij w̃_jk w̃_ik)^{1/3}` over ordered
/// neighbour pairs, with the raw degree `k_i`; zero when `k_i ≤ 1`.
pub fn clustering_coefficient<S: Scalar, G: Network<S> + ?Sized>(g: &G) -> Vec<S> {
    let n = g.n();
    let mut w = Matrix::zeros(n, n);
    for e in g.edges() {
        w[(e.u, e.v)] = e.weight;
        w[(e.v, e.u)] = e.weight;
    }
    let adj = g.neighbours();
    let third = S::lit(1.0 / 3.0);
    adj.iter()
        .enumerate()
        .map(|(i, nb)| {
            let k = nb.len();
            if k <= 1 {
                return S::zero();
            }
            let mut sum = S::zero();
            for &a in nb {
                for &b in nb {
                    if a != b {
                        let prod = w[(i, a)] * w[(a, b)] * w[(i, b)];
                        if prod > S::zero() {
                            sum = sum + prod.powf(third);
                        }
                    }
                }
            }
            sum / S::from_usize_lossy(k * (k - 1))
        })
        .collect()
}

/// Node betweenness on a tree: the number of unordered pairs `{s, t}`,
/// neither equal to `v`, whose path runs through `v`.
pub fn tree_betweenness<S: Scalar>(tree: &Tree<S>) -> Vec<S> {
    let n = tree.n();
    // subtree sizes hanging below each node when rooted at the centre
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tree.levels[i]));
    let mut size = vec![1usize; n];
    for &i in &order {
        if let Some(p) = tree.parent[i] {
            size[p] += size[i];
        }
    }
    let adj = tree.neighbours();
    (0..n)
        .map(|v| {
            let mut sq = 0usize;
            for &u in &adj[v] {
                let c = if tree.parent[v] == Some(u) {
                    n - size[v]
                } else {
                    size[u]
                };
                sq += c * c;
            }
            S::from_usize_lossy(((n - 1) * (n - 1) - sq) / 2)
        })
        .collect()
}

/// Per-window summary of an MST and its companion threshold graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkMetrics<S> {
    pub window: usize,
    pub tree_length: S,
    pub occupation_layer: S,
    pub central: String,
    pub tree_degree: Vec<S>,
    pub tree_betweenness: Vec<S>,
    pub graph_degree: Vec<S>,
    pub graph_clustering: Vec<S>,
}

pub fn network_metrics<S: Scalar>(
    d: &DistanceMatrix<S>,
    q: f64,
) -> Result<(Tree<S>, Graph<S>, NetworkMetrics<S>)> {
    let tree = build_mst(d)?;
    let graph = build_threshold_graph(d, q)?;
    let metrics = NetworkMetrics {
        window: d.window,
        tree_length: normalized_tree_length(&tree),
        occupation_layer: mean_occupation_layer(&tree),
        central: tree.labels[tree.central].clone(),
        tree_degree: degree_centrality(&tree),
        tree_betweenness: tree_betweenness(&tree),
        graph_degree: degree_centrality(&graph),
        graph_clustering: clustering_coefficient(&graph),
    };
    Ok((tree, graph, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| ((b'A' + i as u8) as char).to_string())
            .collect()
    }

    fn dist(metric: Metric, rows: Vec<Vec<f64>>) -> DistanceMatrix<f64> {
        let n = rows.len();
        DistanceMatrix::from_values(metric, labels(n), Matrix::from_rows(&rows).unwrap()).unwrap()
    }

    fn random_dist(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix<f64> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v: f64 = rng.random();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        DistanceMatrix::from_values(Metric::MiDistance, labels(n), m).unwrap()
    }

    fn triangle() -> DistanceMatrix<f64> {
        dist(
            Metric::MiDistance,
            vec![
                vec![0.0, 0.1, 0.3],
                vec![0.1, 0.0, 0.2],
                vec![0.3, 0.2, 0.0],
            ],
        )
    }

    fn edge_set<S>(edges: &[Edge<S>]) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = edges.iter().map(|e| (e.u, e.v)).collect();
        v.sort();
        v
    }

    /// Minimum total weight over all spanning trees via Prüfer sequences.
    fn brute_force_mst_weight(d: &Matrix<f64>) -> f64 {
        let n = d.rows();
        let count = n.pow(n as u32 - 2);
        let mut best = f64::INFINITY;
        for code in 0..count {
            let mut seq = Vec::with_capacity(n - 2);
            let mut c = code;
            for _ in 0..n - 2 {
                seq.push(c % n);
                c /= n;
            }
            let mut degree = vec![1usize; n];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut total = 0.0;
            for &s in &seq {
                let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
                total += d[(leaf, s)];
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
            total += d[(rest[0], rest[1])];
            best = best.min(total);
        }
        best
    }

    fn tree_from_edges(n: usize, pairs: &[(usize, usize)]) -> Tree<f64> {
        let mut t = Tree {
            labels: labels(n),
            edges: pairs
                .iter()
                .map(|&(u, v)| Edge {
                    u,
                    v,
                    distance: 0.5,
                    weight: 0.5,
                })
                .collect(),
            window: 0,
            central: 0,
            levels: vec![0; n],
            parent: vec![None; n],
        };
        t.central = central_vertex(&t);
        let (dist, parent) = bfs(&t.neighbours(), t.central);
        t.levels = dist.into_iter().map(Option::unwrap).collect();
        t.parent = parent;
        t
    }

    #[test]
    fn triangle_mst() {
        let t = build_mst(&triangle()).unwrap();
        assert_eq!(edge_set(&t.edges), vec![(0, 1), (1, 2)]);
        assert!((normalized_tree_length(&t) - 0.15).abs() < 1e-15);
        assert_eq!(t.labels[t.central], "B");
        assert!((mean_occupation_layer(&t) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn large_tree_has_n_minus_one_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(152);
        let t = build_mst(&random_dist(152, &mut rng)).unwrap();
        assert_eq!(t.edges.len(), 151);
        let levels_ok = (0..152).all(|i| match t.parent[i] {
            None => i == t.central && t.levels[i] == 0,
            Some(p) => t.levels[i] == t.levels[p] + 1,
        });
        assert!(levels_ok);
    }

    #[test]
    fn tie_break_picks_smallest_ticker_pair() {
        // every distance equal: Prim from "A" must attach all to A first
        let d = dist(
            Metric::MiDistance,
            vec![vec![0.0, 0.5, 0.5, 0.5]; 4]
                .into_iter()
                .enumerate()
                .map(|(i, mut r)| {
                    r[i] = 0.0;
                    r
                })
                .collect(),
        );
        let t = build_mst(&d).unwrap();
        assert_eq!(edge_set(&t.edges), vec![(0, 1), (0, 2), (0, 3)]);

        // same matrix with relabelled tickers follows the labels, not indices
        let mut relabelled = d.clone();
        relabelled.labels = vec!["D".into(), "C".into(), "B".into(), "A".into()];
        let t = build_mst(&relabelled).unwrap();
        assert_eq!(edge_set(&t.edges), vec![(0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn non_finite_rejected() {
        let mut d = triangle();
        d.values[(0, 2)] = f64::NAN;
        d.values[(2, 0)] = f64::NAN;
        assert!(matches!(build_mst(&d), Err(Error::Validation(_))));
        assert!(build_threshold_graph(&d, 0.2).is_err());
    }

    #[test]
    fn mst_matches_brute_force_on_seven_nodes() {
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dist(7, &mut rng);
            let t = build_mst(&d).unwrap();
            let w: f64 = t.edges.iter().map(|e| e.distance).sum();
            let oracle = brute_force_mst_weight(&d.values);
            assert!((w - oracle).abs() < 1e-12, "seed {seed}: {w} vs {oracle}");
        }
    }

    #[test]
    fn threshold_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_dist(5, &mut rng);
        assert_eq!(build_threshold_graph(&d, 0.2).unwrap().edges.len(), 2);
        assert_eq!(build_threshold_graph(&d, 0.05).unwrap().edges.len(), 1);

        let flat = dist(
            Metric::MiDistance,
            (0..5)
                .map(|i| (0..5).map(|j| if i == j { 0.0 } else { 0.4 }).collect())
                .collect(),
        );
        let g = build_threshold_graph(&flat, 0.2).unwrap();
        assert_eq!(g.edges.len(), 10);
        assert!(g.edges.iter().all(|e| e.weight == 1.0));
        assert!(build_threshold_graph(&flat, 1.0).is_err());
        assert!(build_threshold_graph(&flat, 0.0).is_err());
    }

    #[test]
    fn correlation_weights_recover_rho() {
        // d = √(2(1−ρ)) for ρ = 0.8, 0.5, −0.2
        let dd = |r: f64| (2.0 * (1.0 - r)).sqrt();
        let d = dist(
            Metric::CorrDistance,
            vec![
                vec![0.0, dd(0.8), dd(0.5)],
                vec![dd(0.8), 0.0, dd(-0.2)],
                vec![dd(0.5), dd(-0.2), 0.0],
            ],
        );
        let g = build_threshold_graph(&d, 0.99).unwrap();
        let w: Vec<f64> = g.edges.iter().map(|e| e.weight).collect();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!((w[1] - 0.5 / 0.8).abs() < 1e-12);
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn star_and_path_closed_forms() {
        let n = 6;
        let star = tree_from_edges(n, &(1..n).map(|i| (0, i)).collect::<Vec<_>>());
        assert_eq!(star.central, 0);
        let deg: Vec<f64> = degree_centrality(&star);
        assert_eq!(deg[0], 5.0 / 6.0);
        assert_eq!(deg[3], 1.0 / 6.0);
        let mol: f64 = mean_occupation_layer(&star);
        assert_eq!(mol, 5.0 / 6.0);
        let cc: Vec<f64> = clustering_coefficient(&star);
        assert!(cc.iter().all(|&c| c == 0.0));

        let path = tree_from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(path.central, 1);
        let mol: f64 = mean_occupation_layer(&path);
        assert_eq!(mol, 2.0 / 3.0);
    }

    #[test]
    fn triangle_clustering_is_one() {
        let flat = dist(
            Metric::MiDistance,
            (0..3)
                .map(|i| (0..3).map(|j| if i == j { 0.0 } else { 0.7 }).collect())
                .collect(),
        );
        let g = build_threshold_graph(&flat, 0.5).unwrap();
        let c: Vec<f64> = clustering_coefficient(&g);
        assert!(c.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn central_vertex_breaks_degree_ties_by_hop_sum() {
        // two degree-3 hubs, 1 and 4, bridged via 3
        let t = tree_from_edges(7, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6)]);
        // symmetric: equal hop sums, so ticker decides
        assert_eq!(t.labels[t.central], "B");
        // extending the branch under 4 makes it the closer hub
        let t = tree_from_edges(8, &[(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6), (6, 7)]);
        let adj = t.neighbours();
        let hop = |i: usize| -> usize { bfs(&adj, i).0.iter().map(|x| x.unwrap()).sum() };
        let expected = if hop(4) < hop(1) { 4 } else { 1 };
        assert_eq!(t.central, expected);
        assert_eq!(t.central, 4);
    }

    /// Counts unordered pairs whose unique tree path passes through `v`.
    fn betweenness_oracle(t: &Tree<f64>) -> Vec<f64> {
        let n = t.n();
        let adj = t.neighbours();
        let mut b = vec![0.0; n];
        for s in 0..n {
            let (_, parent) = bfs(&adj, s);
            for target in (s + 1)..n {
                let mut cur = parent[target];
                while let Some(c) = cur {
                    if c == s {
                        break;
                    }
                    b[c] += 1.0;
                    cur = parent[c];
                }
            }
        }
        b
    }

    fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Tree<f64> {
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
        let mut t = tree_from_edges(n, &pairs);
        for e in &mut t.edges {
            e.distance = rng.random();
        }
        t
    }

    #[test]
    fn metrics_match_oracles_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let n = rng.random_range(3..15);
            let t = random_tree(n, &mut rng);

            let direct: f64 = t.edges.iter().map(|e| e.distance).sum::<f64>() / (n - 1) as f64;
            assert!((normalized_tree_length(&t) - direct).abs() < 1e-12);

            let (lv, _) = bfs(&t.neighbours(), t.central);
            let mol = lv.iter().map(|x| x.unwrap() as f64).sum::<f64>() / n as f64;
            assert!((mean_occupation_layer(&t) - mol).abs() < 1e-12);

            assert_eq!(tree_betweenness(&t), betweenness_oracle(&t));

            let d = random_dist(n, &mut rng);
            let g = build_threshold_graph(&d, 0.3).unwrap();
            let mut adj = Matrix::<f64>::zeros(n, n);
            for e in &g.edges {
                adj[(e.u, e.v)] = e.weight;
                adj[(e.v, e.u)] = e.weight;
            }
            let deg: Vec<f64> = degree_centrality(&g);
            for i in 0..n {
                let row: f64 = (0..n).filter(|&j| adj[(i, j)] > 0.0).count() as f64;
                assert!((deg[i] - row / n as f64).abs() < 1e-12);
            }
            let cc: Vec<f64> = clustering_coefficient(&g);
            for i in 0..n {
                let nb: Vec<usize> = (0..n).filter(|&j| adj[(i, j)] > 0.0).collect();
                let k = nb.len();
                let oracle = if k < 2 {
                    0.0
                } else {
                    let mut s = 0.0;
                    for &a in &nb {
                        for &b in &nb {
                            if a != b {
                                s += (adj[(i, a)] * adj[(a, b)] * adj[(i, b)]).cbrt();
                            }
                        }
                    }
                    s / (k * (k - 1)) as f64
                };
                assert!((cc[i] - oracle).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn tree_and_graph_invariants(seed in 0u64..10_000, n in 2usize..12, q in 0.05f64..0.95) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = random_dist(n, &mut rng);
            let t = build_mst(&d).unwrap();
            prop_assert_eq!(t.edges.len(), n - 1);
            let rise: usize = (0..n)
                .filter_map(|i| t.parent[i].map(|p| t.levels[i] - t.levels[p]))
                .sum();
            prop_assert_eq!(rise, n - 1);
            prop_assert!(t.levels.iter().all(|&l| l <= n - 1));
            prop_assert_eq!(build_mst(&d).unwrap(), t.clone());

            let g = build_threshold_graph(&d, q).unwrap();
            let deg: Vec<f64> = degree_centrality(&g);
            let total: f64 = deg.iter().sum();
            prop_assert!((total - 2.0 * g.edges.len() as f64 / n as f64).abs() < 1e-12);
            prop_assert!(deg.iter().all(|&x| x <= (n - 1) as f64 / n as f64 + 1e-15));
            let cc: Vec<f64> = clustering_coefficient(&g);
            prop_assert!(cc.iter().all(|&c| (0.0..=1.0 + 1e-12).contains(&c)));
        }
    }
}
