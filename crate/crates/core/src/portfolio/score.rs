//! Nonlinearity score: raw measures `s1..s3`, their banded scores and the
//! resulting cash weight.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::{off_diagonal_mean, NonlinearityMatrix};
use crate::scalar::Scalar;

/// How the 25-term trailing sum behind `s2` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum S2Variant {
    /// `(1/24) Σ_{t−24..=t} s1`
    #[default]
    Printed,
    /// `(1/25) Σ_{t−24..=t} s1`
    Strict,
}

impl std::str::FromStr for S2Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Self::Printed),
            "strict" => Ok(Self::Strict),
            other => Err(Error::Validation(format!("unknown s2 variant {other:?}"))),
        }
    }
}

pub const S2_SPAN: usize = 24;
pub const S3_LAG: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NlcMeasures<S> {
    pub s1: S,
    /// `None` during warm-up.
    pub s2: Option<S>,
    /// `None` during warm-up or when `s1(t−3) = 0`.
    pub s3: Option<S>,
}

/// Mean of `ζ_nlc` over all ordered pairs `i ≠ j`.
pub fn s1_from_zeta<S: Scalar>(zeta: &NonlinearityMatrix<S>) -> S {
    off_diagonal_mean(&zeta.values)
}

/// Measures at position `t` of an `s1` history.
pub fn nlc_measures<S: Scalar>(
    s1_history: &[S],
    t: usize,
    variant: S2Variant,
) -> Result<NlcMeasures<S>> {
    if t >= s1_history.len() {
        return Err(Error::Validation(format!(
            "window {t} beyond a history of {}",
            s1_history.len()
        )));
    }
    let s1 = s1_history[t];
    let s2 = (t >= S2_SPAN).then(|| {
        let sum: S = s1_history[t - S2_SPAN..=t].iter().copied().sum();
        let denom = match variant {
            S2Variant::Printed => S2_SPAN,
            S2Variant::Strict => S2_SPAN + 1,
        };
        sum / S::from_usize_lossy(denom)
    });
    let s3 = (t >= S3_LAG)
        .then(|| s1_history[t - S3_LAG])
        .filter(|&prev| prev != S::zero())
        .map(|prev| s1 / prev - S::one());
    Ok(NlcMeasures { s1, s2, s3 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NlcScore<S> {
    pub s1_star: i32,
    pub s2_star: i32,
    pub s3_star: i32,
    /// `clamp((s*₁ + s*₂ + s*₃)/3, 0, 100)`
    pub s_nlc: S,
}

pub fn score_s1<S: Scalar>(s1: S) -> i32 {
    let bands = [(0.1, 100), (0.15, 75), (0.2, 50), (0.25, 25)];
    bands
        .iter()
        .find(|&&(hi, _)| s1 < S::lit(hi))
        .map_or(0, |&(_, s)| s)
}

/// Neutral 50 when `s2` is missing or not positive.
pub fn score_s2<S: Scalar>(s1: S, s2: Option<S>) -> i32 {
    let Some(s2) = s2.filter(|&v| v > S::zero()) else {
        return 50;
    };
    let bands = [(0.5, 100), (0.75, 75), (1.05, 50), (1.15, 25)];
    bands
        .iter()
        .find(|&&(f, _)| s1 < S::lit(f) * s2)
        .map_or(0, |&(_, s)| s)
}

/// Neutral 0 when `s3` is missing.
pub fn score_s3<S: Scalar>(s3: Option<S>) -> i32 {
    let Some(s3) = s3 else {
        return 0;
    };
    if s3 <= S::lit(-0.02) {
        25
    } else if s3 < S::zero() {
        10
    } else if s3 < S::lit(0.02) {
        0
    } else if s3 < S::lit(0.05) {
        -10
    } else {
        -100
    }
}

pub fn score_map<S: Scalar>(m: &NlcMeasures<S>) -> NlcScore<S> {
    let s1_star = score_s1(m.s1);
    let s2_star = score_s2(m.s1, m.s2);
    let s3_star = score_s3(m.s3);
    let mean =
        S::from_i32((s1_star + s2_star + s3_star).into()).expect("small integer") / S::lit(3.0);
    NlcScore {
        s1_star,
        s2_star,
        s3_star,
        s_nlc: mean.max(S::zero()).min(S::lit(100.0)),
    }
}

/// `(100 − 2·s_nlc)/100`: +1 all cash, −1 fully levered.
pub fn cash_weight<S: Scalar>(s_nlc: S) -> S {
    (S::lit(100.0) - S::lit(2.0) * s_nlc) / S::lit(100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use proptest::prelude::*;

    #[test]
    fn table_cells() {
        let s1_cells = [(0.05, 100), (0.12, 75), (0.17, 50), (0.22, 25), (0.27, 0)];
        for (v, s) in s1_cells {
            assert_eq!(score_s1(v), s, "s1={v}");
        }
        let s2 = 0.2;
        let s2_cells = [(0.4, 100), (0.6, 75), (0.8, 50), (1.1, 25), (1.2, 0)];
        for (f, s) in s2_cells {
            assert_eq!(score_s2(f * s2, Some(s2)), s, "s1={f}·s2");
        }
        let s3_cells = [
            (-0.03, 25),
            (-0.01, 10),
            (0.01, 0),
            (0.03, -10),
            (0.06, -100),
        ];
        for (v, s) in s3_cells {
            assert_eq!(score_s3(Some(v)), s, "s3={v}");
        }
    }

    #[test]
    fn band_edges() {
        assert_eq!(score_s1(0.1), 75);
        assert_eq!(score_s1(0.25), 0);
        assert_eq!(score_s1(0.0), 100);
        assert_eq!(score_s2(0.5, Some(1.0)), 75);
        assert_eq!(score_s2(1.15, Some(1.0)), 0);
        assert_eq!(score_s3(Some(-0.02)), 25);
        assert_eq!(score_s3(Some(0.0)), 0);
        assert_eq!(score_s3(Some(0.05)), -100);
        assert_eq!(score_s2(0.1, None), 50);
        assert_eq!(score_s2(0.1, Some(0.0)), 50);
        assert_eq!(score_s3::<f64>(None), 0);
    }

    #[test]
    fn combined_score_is_clamped() {
        let m = NlcMeasures {
            s1: 0.3,
            s2: Some(0.1),
            s3: Some(0.5),
        };
        let s = score_map(&m);
        assert_eq!((s.s1_star, s.s2_star, s.s3_star), (0, 0, -100));
        assert_eq!(s.s_nlc, 0.0);
        let m = NlcMeasures {
            s1: 0.05f64,
            s2: Some(0.2),
            s3: Some(-0.1),
        };
        let s = score_map(&m);
        assert!((s.s_nlc - 75.0).abs() < 1e-12);
    }

    #[test]
    fn cash_weight_endpoints() {
        assert_eq!(cash_weight(0.0), 1.0);
        assert_eq!(cash_weight(100.0), -1.0);
        assert_eq!(cash_weight(50.0), 0.0);
    }

    #[test]
    fn constant_history() {
        let c = 0.12f64;
        let hist = vec![c; 30];
        let m = nlc_measures(&hist, 29, S2Variant::Printed).unwrap();
        assert_eq!(m.s1, c);
        assert!((m.s2.unwrap() - c * 25.0 / 24.0).abs() < 1e-15);
        assert_eq!(m.s3, Some(0.0));
        let strict = nlc_measures(&hist, 29, S2Variant::Strict).unwrap();
        assert!((strict.s2.unwrap() - c).abs() < 1e-15);
    }

    #[test]
    fn warm_up_and_zero_base() {
        let mut hist = vec![0.1f64, 0.0, 0.3, 0.12, 0.5];
        let m = nlc_measures(&hist, 3, S2Variant::Printed).unwrap();
        assert!(m.s2.is_none());
        assert!((m.s3.unwrap() - 0.2).abs() < 1e-12);
        assert!(nlc_measures(&hist, 2, S2Variant::Printed)
            .unwrap()
            .s3
            .is_none());
        assert!(nlc_measures(&hist, 4, S2Variant::Printed)
            .unwrap()
            .s3
            .is_none());
        hist.push(0.0);
        assert!(nlc_measures(&hist, 10, S2Variant::Printed).is_err());
    }

    #[test]
    fn s1_is_off_diagonal_mean() {
        let zeta = NonlinearityMatrix {
            labels: vec!["a".into(), "b".into(), "c".into()],
            values: Matrix::from_rows(&[
                vec![0.0f64, 0.1, 0.2],
                vec![0.1, 0.0, 0.3],
                vec![0.2, 0.3, 0.0],
            ])
            .unwrap(),
            window: 0,
            degenerate_pairs: vec![],
        };
        assert!((s1_from_zeta(&zeta) - 0.2).abs() < 1e-15);
    }

    /// Straight rolling-window recomputation.
    fn oracle(hist: &[f64], t: usize) -> (Option<f64>, Option<f64>) {
        let s2 = if t >= 24 {
            let mut acc = 0.0;
            for k in 0..25 {
                acc += hist[t - k];
            }
            Some(acc / 24.0)
        } else {
            None
        };
        let s3 = if t >= 3 && hist[t - 3] != 0.0 {
            Some((hist[t] - hist[t - 3]) / hist[t - 3])
        } else {
            None
        };
        (s2, s3)
    }

    proptest! {
        #[test]
        fn measures_match_rolling_oracle(hist in prop::collection::vec(0.0f64..0.6, 1..60)) {
            for t in 0..hist.len() {
                let m = nlc_measures(&hist, t, S2Variant::Printed).unwrap();
                let (s2, s3) = oracle(&hist, t);
                prop_assert_eq!(m.s2.is_some(), s2.is_some());
                if let (Some(a), Some(b)) = (m.s2, s2) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
                prop_assert_eq!(m.s3.is_some(), s3.is_some());
                if let (Some(a), Some(b)) = (m.s3, s3) {
                    prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
                }
            }
        }

        #[test]
        fn score_is_piecewise_constant_and_bounded(s1 in 0.0f64..1.0, s2 in 0.01f64..1.0, s3 in -1.0f64..1.0) {
            let m = NlcMeasures { s1, s2: Some(s2), s3: Some(s3) };
            let s = score_map(&m);
            prop_assert!([0, 25, 50, 75, 100].contains(&s.s1_star));
            prop_assert!([0, 25, 50, 75, 100].contains(&s.s2_star));
            prop_assert!([-100, -10, 0, 10, 25].contains(&s.s3_star));
            prop_assert!((0.0..=100.0).contains(&s.s_nlc));
            let w = cash_weight(s.s_nlc);
            prop_assert!((-1.0..=1.0).contains(&w));
        }

        #[test]
        fn cash_weight_is_odd_about_fifty(d in 0.0f64..50.0) {
            prop_assert!((cash_weight(50.0 + d) + cash_weight(50.0 - d)).abs() < 1e-15);
        }
    }
}
