//! Long-only minimum-variance weights for a target return, solved by a primal
//! active-set method over the bounds `w ≥ 0`.
//!
//! The solver works in `f64` on a scaled problem: `Σ` divided by its mean
//! diagonal plus a tiny ridge (so singular covariances still have a unique
//! minimizer) and `R` mapped to `[0, 1]` via `(R − min R)/(max R − min R)`.

use serde::Serialize;

use super::stats::AssetStats;
use crate::error::{Error, Result};
use crate::matrix::{solve_linear, Matrix};
use crate::scalar::Scalar;

const RIDGE: f64 = 1e-10;
const ZERO_STEP: f64 = 1e-13;
const DUAL_TOL: f64 = 1e-12;
const DECREASE_TOL: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinVariance<S> {
    pub weights: Vec<S>,
    pub target: S,
    pub expected_return: S,
    pub variance: S,
    /// Largest violation of stationarity, primal feasibility or dual sign on
    /// the scaled problem (ridge excluded).
    pub kkt_residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum QpOutcome<S> {
    Solved(MinVariance<S>),
    /// Target outside `[min R, max R]`.
    Infeasible {
        target: S,
        min: S,
        max: S,
    },
}

impl<S> QpOutcome<S> {
    pub fn solved(self) -> Option<MinVariance<S>> {
        match self {
            QpOutcome::Solved(m) => Some(m),
            QpOutcome::Infeasible { .. } => None,
        }
    }
}

fn min_max(x: &[f64]) -> (f64, f64) {
    x.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
}

/// `λ` maximizing `min_i (a_i + b_i λ)`.
fn maximin(lines: &[(f64, f64)]) -> f64 {
    let eval = |l: f64| {
        lines
            .iter()
            .map(|&(a, b)| a + b * l)
            .fold(f64::INFINITY, f64::min)
    };
    let rising = lines.iter().any(|&(_, b)| b > 0.0);
    let falling = lines.iter().any(|&(_, b)| b < 0.0);
    if rising != falling {
        // one-sided: move until every sloped line is non-negative
        return lines
            .iter()
            .filter(|&&(_, b)| b != 0.0)
            .map(|&(a, b)| -a / b)
            .fold(0.0, |m: f64, v| if rising { m.max(v) } else { m.min(v) });
    }
    let mut best = (0.0, eval(0.0));
    for &(a1, b1) in lines.iter().filter(|l| l.1 > 0.0) {
        for &(a2, b2) in lines.iter().filter(|l| l.1 < 0.0) {
            let l = (a2 - a1) / (b1 - b2);
            let v = eval(l);
            if v > best.1 {
                best = (l, v);
            }
        }
    }
    best.0
}

/// Minimizes `wᵀΣw` subject to `Σw = 1`, `Rᵀw = target`, `w ≥ 0`.
pub fn min_variance_weights<S: Scalar>(stats: &AssetStats<S>, target: S) -> Result<QpOutcome<S>> {
    let n = stats.n();
    let returns: Vec<f64> = stats.returns.iter().map(|v| v.to_f64_lossy()).collect();
    let (lo, hi) = min_max(&returns);
    let mu = target.to_f64_lossy();
    let magnitude = lo.abs().max(hi.abs());
    if !mu.is_finite() || mu < lo - 1e-12 * magnitude || mu > hi + 1e-12 * magnitude {
        return Ok(QpOutcome::Infeasible {
            target,
            min: S::lit(lo),
            max: S::lit(hi),
        });
    }

    let mut sigma_scale = stats.covariance.trace().to_f64_lossy() / n as f64;
    if !(sigma_scale > 0.0) {
        sigma_scale = 1.0;
    }
    let h0 = Matrix::from_fn(n, n, |i, j| {
        stats.covariance[(i, j)].to_f64_lossy() / sigma_scale
    });
    let h = Matrix::from_fn(n, n, |i, j| h0[(i, j)] + if i == j { RIDGE } else { 0.0 });
    let range = if hi - lo > 1e-12 * magnitude.max(f64::MIN_POSITIVE) {
        hi - lo
    } else {
        0.0
    };
    let r: Vec<f64> = returns
        .iter()
        .map(|&v| if range > 0.0 { (v - lo) / range } else { 0.0 })
        .collect();
    let tau = if range > 0.0 {
        ((mu - lo) / range).clamp(0.0, 1.0)
    } else {
        0.0
    };

    // feasible start mixing the lowest- and highest-return assets
    let mut w = vec![0.0f64; n];
    if range > 0.0 {
        let argmin = (0..n).fold(0, |b, i| if r[i] < r[b] { i } else { b });
        let argmax = (0..n).fold(0, |b, i| if r[i] > r[b] { i } else { b });
        w[argmin] += 1.0 - tau;
        w[argmax] += tau;
    } else {
        w.iter_mut().for_each(|v| *v = 1.0 / n as f64);
    }
    let mut active: Vec<bool> = w.iter().map(|&v| v == 0.0).collect();

    let max_iter = 100 + 50 * n;
    let mut released: Option<(usize, f64, f64)> = None;
    for iter in 0..max_iter {
        let free: Vec<usize> = (0..n).filter(|&i| !active[i]).collect();
        let nf = free.len();
        let (rf_lo, rf_hi) = min_max(&free.iter().map(|&i| r[i]).collect::<Vec<_>>());
        let with_return = nf >= 2 && rf_hi - rf_lo > 1e-12;
        let m = if with_return { 2 } else { 1 };

        let g = h.mul_vec(&w);
        let dim = nf + m;
        let mut kkt = Matrix::<f64>::zeros(dim, dim);
        let mut rhs = vec![0.0; dim];
        for (a, &i) in free.iter().enumerate() {
            for (b, &j) in free.iter().enumerate() {
                kkt[(a, b)] = h[(i, j)];
            }
            kkt[(a, nf)] = 1.0;
            kkt[(nf, a)] = 1.0;
            if with_return {
                kkt[(a, nf + 1)] = r[i];
                kkt[(nf + 1, a)] = r[i];
            }
            rhs[a] = -g[i];
        }
        let x = solve_linear(&kkt, &rhs, 1e-15).ok_or_else(|| {
            Error::Numeric(format!("singular KKT system on a face of {nf} assets"))
        })?;
        let p = &x[..nf];

        // steps along numerically flat directions are rounding noise
        let p_full: Vec<f64> = {
            let mut v = vec![0.0; n];
            for (a, &i) in free.iter().enumerate() {
                v[i] = p[a];
            }
            v
        };
        let decrease = 0.5 * h.quad_form(&p_full);
        if p.iter().any(|v| v.abs() > ZERO_STEP) && decrease > DECREASE_TOL {
            let mut alpha = 1.0;
            let mut blocking = None;
            for (a, &i) in free.iter().enumerate() {
                if p[a] < 0.0 && -w[i] / p[a] < alpha {
                    alpha = -w[i] / p[a];
                    blocking = Some(i);
                }
            }
            if let Some((j, lb, lr)) = released {
                // leaving a bound must move off it; if not, its multiplier
                // was rounding noise and the previous point is optimal
                if alpha <= 0.0 && blocking == Some(j) {
                    active[j] = true;
                    return Ok(QpOutcome::Solved(finish(
                        stats, &h0, &r, tau, range, &w, lb, lr, target, iter,
                    )));
                }
            }
            released = None;
            for (a, &i) in free.iter().enumerate() {
                w[i] = (w[i] + alpha * p[a]).max(0.0);
            }
            if let Some(i) = blocking {
                w[i] = 0.0;
                active[i] = true;
            }
            continue;
        }

        // stationarity g = λ_b·1 + λ_r·r + ν with ν ≥ 0 on the active set
        let mut lambda_b = -x[nf];
        let mut lambda_r = if with_return { -x[nf + 1] } else { 0.0 };
        let fixed: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        if !with_return && range > 0.0 && !fixed.is_empty() {
            // λ_r is free on a constant-return face; choose the most favourable
            let rbar = r[free[0]];
            let lines: Vec<(f64, f64)> = fixed
                .iter()
                .map(|&i| (g[i] - lambda_b, r[i] - rbar))
                .collect();
            lambda_r = -maximin(&lines);
            lambda_b -= lambda_r * rbar;
        }
        let nu: Vec<f64> = fixed
            .iter()
            .map(|&i| g[i] - lambda_b - lambda_r * r[i])
            .collect();
        match argmin_below(&nu) {
            Some(worst) => {
                active[fixed[worst]] = false;
                released = Some((fixed[worst], lambda_b, lambda_r));
            }
            None => {
                return Ok(QpOutcome::Solved(finish(
                    stats, &h0, &r, tau, range, &w, lambda_b, lambda_r, target, iter,
                )))
            }
        }
    }
    Err(Error::Numeric(format!(
        "active-set solver did not converge in {max_iter} iterations"
    )))
}

fn argmin_below(nu: &[f64]) -> Option<usize> {
    nu.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .filter(|(_, &v)| v < -DUAL_TOL)
        .map(|(i, _)| i)
}

#[allow(clippy::too_many_arguments)]
fn finish<S: Scalar>(
    stats: &AssetStats<S>,
    h0: &Matrix<f64>,
    r: &[f64],
    tau: f64,
    range: f64,
    w: &[f64],
    lambda_b: f64,
    lambda_r: f64,
    target: S,
    iterations: usize,
) -> MinVariance<S> {
    let g = h0.mul_vec(w);
    let mut res = 0.0f64;
    for i in 0..w.len() {
        let nu = g[i] - lambda_b - lambda_r * r[i];
        if w[i] > 0.0 {
            res = res.max(nu.abs());
        } else {
            res = res.max(-nu);
        }
        res = res.max(-w[i]);
    }
    res = res.max((w.iter().sum::<f64>() - 1.0).abs());
    if range > 0.0 {
        let ret: f64 = w.iter().zip(r).map(|(a, b)| a * b).sum();
        res = res.max((ret - tau).abs());
    }

    let weights: Vec<S> = w.iter().map(|&v| S::lit(v)).collect();
    let expected_return = stats
        .returns
        .iter()
        .zip(&weights)
        .map(|(&r, &w)| r * w)
        .sum();
    let variance = stats.covariance.quad_form(&weights).max(S::zero());
    MinVariance {
        weights,
        target,
        expected_return,
        variance,
        kkt_residual: res,
        iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpeRatio {
    /// `μ_P / σ²_P`
    #[serde(rename = "paper")]
    OverVariance,
    /// `μ_P / σ_P`
    Conventional,
}

impl std::str::FromStr for SharpeRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::OverVariance),
            "conventional" => Ok(Self::Conventional),
            other => Err(Error::Validation(format!("unknown sharpe ratio {other:?}"))),
        }
    }
}

impl SharpeRatio {
    pub fn eval(self, mu: f64, var: f64) -> f64 {
        let denom = match self {
            SharpeRatio::OverVariance => var,
            SharpeRatio::Conventional => var.max(0.0).sqrt(),
        };
        if denom > 0.0 {
            mu / denom
        } else if mu > 0.0 {
            f64::INFINITY
        } else if mu < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Portfolio<S> {
    pub weights: Vec<S>,
    pub target: S,
    pub expected_return: S,
    pub variance: S,
    pub ratio: f64,
}

/// Sweeps `grid` equally spaced targets over `[min R, max R]` (last point is
/// exactly `max R`) and keeps the best ratio; ties go to the lower variance,
/// then the lower target.
pub fn max_sharpe_portfolio<S: Scalar>(
    stats: &AssetStats<S>,
    grid: usize,
    ratio: SharpeRatio,
) -> Result<Portfolio<S>> {
    if grid < 1 {
        return Err(Error::Validation(
            "target grid needs at least one point".into(),
        ));
    }
    let (lo, hi) = stats
        .returns
        .iter()
        .fold((S::infinity(), S::neg_infinity()), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let points = if hi > lo { grid } else { 1 };
    let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs());

    let mut best: Option<Portfolio<S>> = None;
    for g in 0..points {
        let target = if g + 1 == points {
            hi
        } else {
            lo + (hi - lo) * S::from_usize_lossy(g) / S::from_usize_lossy(grid - 1)
        };
        let sol = match min_variance_weights(stats, target)? {
            QpOutcome::Solved(s) => s,
            QpOutcome::Infeasible { .. } => continue,
        };
        let value = ratio.eval(
            sol.expected_return.to_f64_lossy(),
            sol.variance.to_f64_lossy(),
        );
        let replace = match &best {
            None => true,
            Some(b) => {
                if close(value, b.ratio) {
                    let (v, bv) = (sol.variance.to_f64_lossy(), b.variance.to_f64_lossy());
                    v < bv && !close(v, bv)
                } else {
                    value > b.ratio
                }
            }
        };
        if replace {
            best = Some(Portfolio {
                weights: sol.weights,
                target,
                expected_return: sol.expected_return,
                variance: sol.variance,
                ratio: value,
            });
        }
    }
    best.ok_or_else(|| Error::Numeric("no feasible target return".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stats(r: Vec<f64>, cov: Vec<Vec<f64>>) -> AssetStats<f64> {
        let labels = (0..r.len()).map(|i| format!("a{i}")).collect();
        AssetStats::new(labels, r, Matrix::from_rows(&cov).unwrap()).unwrap()
    }

    fn diag(v: &[f64]) -> Vec<Vec<f64>> {
        (0..v.len())
            .map(|i| {
                (0..v.len())
                    .map(|j| if i == j { v[i] } else { 0.0 })
                    .collect()
            })
            .collect()
    }

    fn solve(s: &AssetStats<f64>, mu: f64) -> MinVariance<f64> {
        min_variance_weights(s, mu).unwrap().solved().unwrap()
    }

    /// Minimum over the feasible segment of a 3-asset instance, parametrized
    /// by `w0`: a 1e−3 grid plus the segment's end points, then nested grids
    /// at 1e−6 and 1e−9 around the incumbent.
    fn simplex_oracle(s: &AssetStats<f64>, mu: f64) -> f64 {
        let r = &s.returns;
        // w1 + w2 = 1 − w0, r1 w1 + r2 w2 = mu − r0 w0
        let f = |w0: f64| -> f64 {
            let (a, b) = (1.0 - w0, mu - r[0] * w0);
            let w2 = (b - r[1] * a) / (r[2] - r[1]);
            let w = [w0, a - w2, w2];
            if w.iter().all(|&v| v >= -1e-12) {
                s.covariance.quad_form(&w)
            } else {
                f64::INFINITY
            }
        };
        let mut candidates: Vec<f64> = (0..=1000).map(|k| k as f64 * 1e-3).collect();
        for edge in [(mu - r[2]) / (r[0] - r[2]), (mu - r[1]) / (r[0] - r[1])] {
            if (0.0..=1.0).contains(&edge) {
                candidates.push(edge);
            }
        }
        let pick = |c: &[f64]| {
            c.iter()
                .map(|&w0| (f(w0), w0))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap()
        };
        let mut best = pick(&candidates);
        for step in [1e-6, 1e-9] {
            let around: Vec<f64> = (-1000..=1000)
                .map(|k| (best.1 + k as f64 * step).clamp(0.0, 1.0))
                .collect();
            let refined = pick(&around);
            if refined.0 < best.0 {
                best = refined;
            }
        }
        best.0
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let s = stats(vec![0.01, 0.01], diag(&[2.0, 2.0]));
        let w = solve(&s, 0.01).weights;
        assert!((w[0] - 0.5).abs() < 1e-10 && (w[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn max_target_forces_corner() {
        let s = stats(vec![0.01, 0.03, 0.02], diag(&[1.0, 3.0, 2.0]));
        let w = solve(&s, 0.03).weights;
        assert!((w[1] - 1.0).abs() < 1e-10 && w[0].abs() < 1e-10 && w[2].abs() < 1e-10);
    }

    #[test]
    fn out_of_range_target_is_infeasible() {
        let s = stats(vec![0.01, 0.03], diag(&[1.0, 1.0]));
        assert!(matches!(
            min_variance_weights(&s, 0.05).unwrap(),
            QpOutcome::Infeasible { .. }
        ));
        assert!(min_variance_weights(&s, 0.0).unwrap().solved().is_none());
    }

    #[test]
    fn diagonal_instance_matches_grid_oracle() {
        let s = stats(vec![0.01, 0.02, 0.03], diag(&[1.0, 2.0, 4.0]));
        let sol = solve(&s, 0.02);
        let oracle = simplex_oracle(&s, 0.02);
        assert!((sol.variance - oracle).abs() <= 1e-6 * oracle);
        assert!(sol.kkt_residual <= 1e-8);
    }

    #[test]
    fn random_instances_match_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let a: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cov = Matrix::from_fn(3, 3, |i, j| {
                (0..3).map(|k| a[3 * i + k] * a[3 * j + k]).sum::<f64>()
                    + if i == j { 0.05 } else { 0.0 }
            });
            let r: Vec<f64> = (0..3).map(|_| rng.random_range(-0.02..0.05)).collect();
            let s = stats(r.clone(), cov.to_rows());
            let (lo, hi) = min_max(&r);
            let mu = lo + rng.random_range(0.05..0.95) * (hi - lo);
            let sol = solve(&s, mu);
            let oracle = simplex_oracle(&s, mu);
            assert!(
                (sol.variance - oracle).abs() <= 1e-6 * oracle,
                "{} vs {oracle}",
                sol.variance
            );
            assert!(sol.kkt_residual <= 1e-8, "{}", sol.kkt_residual);
        }
    }

    #[test]
    fn single_asset_sharpe() {
        let s = stats(vec![0.02], vec![vec![0.5]]);
        let p = max_sharpe_portfolio(&s, 101, SharpeRatio::OverVariance).unwrap();
        assert_eq!(p.weights, vec![1.0]);
        assert!((p.ratio - 0.04).abs() < 1e-15);
    }

    #[test]
    fn identical_assets_split_evenly() {
        let s = stats(vec![0.01, 0.01], vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let p = max_sharpe_portfolio(&s, 101, SharpeRatio::OverVariance).unwrap();
        assert!((p.weights[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn two_asset_sharpe_matches_weight_grid() {
        let s = stats(vec![0.02, 0.01], diag(&[1.0, 4.0]));
        for kind in [SharpeRatio::OverVariance, SharpeRatio::Conventional] {
            let p = max_sharpe_portfolio(&s, 101, kind).unwrap();
            let best = (0..=10_000)
                .map(|k| {
                    let w = k as f64 / 10_000.0;
                    kind.eval(0.02 * w + 0.01 * (1.0 - w), w * w + 4.0 * (1.0 - w).powi(2))
                })
                .fold(f64::NEG_INFINITY, f64::max);
            // the 101-point target sweep is coarser than the 1e−4 weight grid
            assert!(p.ratio <= best + 1e-12);
            assert!(
                p.ratio >= best * (1.0 - 1e-3),
                "{kind:?}: {} vs {best}",
                p.ratio
            );
        }
    }

    #[test]
    fn zero_risk_panel() {
        let s = stats(vec![0.0, 0.0, 0.0], diag(&[0.0, 0.0, 0.0]));
        let p = max_sharpe_portfolio(&s, 101, SharpeRatio::OverVariance).unwrap();
        for w in p.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn maximin_picks_crossing() {
        let l = maximin(&[(0.0, 1.0), (2.0, -1.0)]);
        assert!((l - 1.0).abs() < 1e-15);
        assert!(maximin(&[(-1.0, 2.0), (0.5, 0.0)]) >= 0.5);
    }

    proptest! {
        #[test]
        fn weights_feasible_and_frontier_monotone(
            seed in 0u64..5000,
            n in 2usize..7,
            rank in 1usize..7,
            tied in any::<bool>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rank = rank.min(n);
            let a: Vec<f64> = (0..n * rank).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cov = Matrix::from_fn(n, n, |i, j| {
                (0..rank).map(|k| a[rank * i + k] * a[rank * j + k]).sum::<f64>()
            });
            let mut r: Vec<f64> = (0..n).map(|_| rng.random_range(-0.01..0.03)).collect();
            if tied {
                // a block of equal returns, including the extremes
                let v = r[0];
                for x in r.iter_mut().take(n / 2 + 1) {
                    *x = v;
                }
            }
            let s = stats(r.clone(), cov.to_rows());
            let (lo, hi) = min_max(&r);
            let mut sweep = Vec::new();
            for g in 0..=20 {
                let mu = lo + (hi - lo) * g as f64 / 20.0;
                let sol = solve(&s, mu);
                prop_assert!(sol.weights.iter().all(|&w| w >= -1e-12));
                prop_assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                prop_assert!((sol.expected_return - mu).abs() <= 1e-9 * (hi - lo) + 1e-12 * hi.abs().max(lo.abs()));
                prop_assert!(sol.kkt_residual <= 1e-8, "kkt {}", sol.kkt_residual);
                sweep.push(sol.variance);
            }
            // variance is convex along the frontier: non-increasing then non-decreasing
            let scale = sweep.iter().copied().fold(0.0, f64::max).max(1e-300);
            let k = sweep.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            for i in 1..=k {
                prop_assert!(sweep[i] <= sweep[i - 1] + 1e-8 * scale);
            }
            for i in (k + 1)..sweep.len() {
                prop_assert!(sweep[i] >= sweep[i - 1] - 1e-8 * scale);
            }
        }
    }
}
