//! Closed-form throughput efficiency of the three protocols, threshold
//! search and resource accounting.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::analyzers::AnalyzerKind;
use crate::error::{Error, Result};

/// Throughput reported for the best photonic superdense-coding experiment.
pub const EXPERIMENTAL_BENCHMARK_R: f64 = 1.665;

/// Upper bound on `n_max` for [`efficiency_curve`].
pub const MAX_CURVE_N: u32 = 1_000_000;

/// `(1 + x)^n` evaluated as `exp(n·ln(1+x))`, accurate for tiny `x`.
fn pow_1p(x: f64, n: u32) -> f64 {
    (f64::from(n) * x.ln_1p()).exp()
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroCycles)
    } else {
        Ok(())
    }
}

/// Per-cycle survival `(1 − ½ sin²θ_N)^N` of a DQZ interrogation.
fn dqz_factor(n: u32) -> f64 {
    let s = (PI / (2.0 * f64::from(n))).sin();
    pow_1p(-0.5 * s * s, n)
}

/// `cos^{2N}θ_N`: survival of a blocked IFM chain.
fn ifm_blocked(n: u32) -> f64 {
    let s = (PI / (2.0 * f64::from(n))).sin();
    pow_1p(-s * s, n)
}

/// Probability that one protocol run ends without losing the photon.
pub fn p_survival(kind: AnalyzerKind, n: u32) -> Result<f64> {
    check_n(n)?;
    Ok(match kind {
        AnalyzerKind::Dqz => dqz_factor(n),
        AnalyzerKind::Ifm => 0.5 * (ifm_blocked(n) + 1.0) * dqz_factor(n),
        AnalyzerKind::Qz => {
            let s = (PI / f64::from(n)).sin();
            pow_1p(-0.75 * s * s, n)
        }
    })
}

/// Throughput efficiency in bits per qubit: `2 · p_survival`.
pub fn r_analytic(kind: AnalyzerKind, n: u32) -> Result<f64> {
    Ok(2.0 * p_survival(kind, n)?)
}

/// IFM throughput written as `(cos^{2N}θ_N + 1)(1 − ½ sin²θ_N)^N`.
pub fn r_ifm_expanded(n: u32) -> Result<f64> {
    check_n(n)?;
    Ok((ifm_blocked(n) + 1.0) * dqz_factor(n))
}

fn reaches(kind: AnalyzerKind, n: u32, target: f64) -> bool {
    r_analytic(kind, n).expect("n ≥ 2") >= target
}

/// Smallest `N ≥ 2` with `r_analytic(kind, N) ≥ target_r`.
///
/// `R` is increasing for `N ≥ 2`, so the first crossing is located by
/// doubling and then bisection; the answer is the one a linear scan would
/// return.
pub fn min_n_for_target(kind: AnalyzerKind, target_r: f64) -> Result<u32> {
    if !target_r.is_finite() || target_r >= 2.0 {
        return Err(Error::UnattainableTarget(target_r));
    }
    if target_r <= 0.0 {
        return Err(Error::UnattainableTarget(target_r));
    }
    if reaches(kind, 2, target_r) {
        return Ok(2);
    }
    let mut lo = 2u32; // fails
    let mut hi = 4u32;
    while !reaches(kind, hi, target_r) {
        lo = hi;
        hi = match hi.checked_mul(2) {
            Some(h) => h,
            None if hi < u32::MAX => u32::MAX,
            None => {
                return Err(Error::SearchExhausted {
                    target: target_r,
                    limit: u64::from(u32::MAX),
                })
            }
        };
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(kind, mid, target_r) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyCurve {
    pub analyzer: AnalyzerKind,
    /// `(N, R)` for every integer `N` in the requested range.
    pub points: Vec<(u32, f64)>,
}

pub fn efficiency_curve(kind: AnalyzerKind, n_min: u32, n_max: u32) -> Result<EfficiencyCurve> {
    if n_min == 0 || n_min > n_max || n_max > MAX_CURVE_N {
        return Err(Error::InvalidRange { min: n_min, max: n_max });
    }
    let points = (n_min..=n_max)
        .into_par_iter()
        .map(|n| (n, r_analytic(kind, n).expect("n ≥ 1")))
        .collect();
    Ok(EfficiencyCurve { analyzer: kind, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceCount {
    pub beamsplitters: u64,
    pub needs_ancilla: bool,
}

/// Optical elements needed at `N` cycles: QZ uses one beam splitter per
/// cycle plus an ancilla photon, IFM four per cycle, DQZ two.
pub fn resource_counts(kind: AnalyzerKind, n: u32) -> Result<ResourceCount> {
    check_n(n)?;
    let n = u64::from(n);
    Ok(match kind {
        AnalyzerKind::Qz => ResourceCount {
            beamsplitters: n,
            needs_ancilla: true,
        },
        AnalyzerKind::Ifm => ResourceCount {
            beamsplitters: 4 * n,
            needs_ancilla: false,
        },
        AnalyzerKind::Dqz => ResourceCount {
            beamsplitters: 2 * n,
            needs_ancilla: false,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use AnalyzerKind::*;

    #[test]
    fn small_n_values() {
        assert!((r_analytic(Dqz, 2).unwrap() - 1.125).abs() < 1e-15);
        assert!((r_analytic(Qz, 2).unwrap() - 0.125).abs() < 1e-15);
        assert!((p_survival(Qz, 2).unwrap() - 0.0625).abs() < 1e-15);
        assert!((r_analytic(Dqz, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((r_analytic(Qz, 1).unwrap() - 2.0).abs() < 1e-15);
        assert!((p_survival(Dqz, 12).unwrap() - 0.902_433_384_991).abs() < 1e-11);
        assert!((r_analytic(Dqz, 7).unwrap() - 1.678).abs() < 5e-4);
        assert_eq!(p_survival(Dqz, 0), Err(Error::ZeroCycles));
    }

    #[test]
    fn ifm_forms_agree() {
        for n in 1..=500 {
            let a = r_analytic(Ifm, n).unwrap();
            let b = r_ifm_expanded(n).unwrap();
            assert!((a - b).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn large_n_limit() {
        for k in AnalyzerKind::ALL {
            assert!(r_analytic(k, 100_000).unwrap() > 1.999);
            assert!(p_survival(k, 100_000).unwrap() >= 0.9999);
        }
    }

    #[test]
    fn strictly_increasing_from_two() {
        for k in AnalyzerKind::ALL {
            let mut prev = r_analytic(k, 2).unwrap();
            for n in 3..=20_000 {
                let r = r_analytic(k, n).unwrap();
                assert!(r > prev, "{k} n={n}");
                prev = r;
            }
        }
    }

    #[test]
    fn thresholds() {
        assert_eq!(min_n_for_target(Dqz, 1.8).unwrap(), 12);
        assert_eq!(min_n_for_target(Ifm, 1.8).unwrap(), 24);
        assert_eq!(min_n_for_target(Qz, 1.8).unwrap(), 71);
        assert_eq!(min_n_for_target(Dqz, EXPERIMENTAL_BENCHMARK_R).unwrap(), 7);
        assert_eq!(min_n_for_target(Dqz, 0.5).unwrap(), 2);
        assert!(matches!(min_n_for_target(Dqz, 2.0), Err(Error::UnattainableTarget(_))));
        assert!(matches!(min_n_for_target(Dqz, 0.0), Err(Error::UnattainableTarget(_))));
    }

    #[test]
    fn bisection_matches_linear_scan() {
        for k in AnalyzerKind::ALL {
            for t in [0.3, 1.0, 1.5, 1.7, 1.9, 1.95] {
                let linear = (2..).find(|&n| r_analytic(k, n).unwrap() >= t).unwrap();
                assert_eq!(min_n_for_target(k, t).unwrap(), linear, "{k} {t}");
            }
        }
    }

    #[test]
    fn near_two_target_is_bounded() {
        for k in AnalyzerKind::ALL {
            let n = min_n_for_target(k, 1.999_999_9).unwrap();
            assert!(r_analytic(k, n).unwrap() >= 1.999_999_9);
            assert!(r_analytic(k, n - 1).unwrap() < 1.999_999_9);
        }
    }

    #[test]
    fn curve_shape() {
        let c = efficiency_curve(Dqz, 1, 3).unwrap();
        let third = 2.0 * (1.0 - 0.5 * (PI / 6.0).sin().powi(2)).powi(3);
        let want = [(1, 1.0), (2, 1.125), (3, third)];
        for ((n, r), (wn, wr)) in c.points.iter().zip(want) {
            assert_eq!(*n, wn);
            assert!((r - wr).abs() < 1e-14);
        }
        assert_eq!(efficiency_curve(Qz, 5, 5).unwrap().points.len(), 1);
        assert!(efficiency_curve(Qz, 0, 5).is_err());
        assert!(efficiency_curve(Qz, 6, 5).is_err());
        assert!(efficiency_curve(Qz, 1, MAX_CURVE_N + 1).is_err());
    }

    #[test]
    fn ordering() {
        for n in 2..=200 {
            let (d, i, q) = (
                r_analytic(Dqz, n).unwrap(),
                r_analytic(Ifm, n).unwrap(),
                r_analytic(Qz, n).unwrap(),
            );
            assert!(d > i && i > q, "n={n}");
        }
    }

    #[test]
    fn resources() {
        assert_eq!(
            resource_counts(Qz, 10).unwrap(),
            ResourceCount {
                beamsplitters: 10,
                needs_ancilla: true
            }
        );
        assert_eq!(resource_counts(Ifm, 10).unwrap().beamsplitters, 40);
        assert_eq!(resource_counts(Dqz, 10).unwrap().beamsplitters, 20);
    }
}
