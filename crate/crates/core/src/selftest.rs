//! Invariant suite behind `sdc selftest`.

use std::fmt;

use crate::analyzers::{analyze, dqz_analyze_with, identify, AnalyzerKind, OutputPath};
use crate::bell::BellState;
use crate::metrics::{min_n_for_target, p_survival, r_analytic};
use crate::protocol::simulate;
use crate::quantum::{DensityMatrix, Operator, ACCUMULATED_TOL, ALGEBRA_TOL};
use crate::zeno::{dqz_cycle_channel, CycleChannel};

/// Deliberate corruption used to check that the suite catches faults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of one off-diagonal entry of `K_i`.
    KSign,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn channel(i: u8, n: u32, fault: Option<Fault>) -> CycleChannel {
    let ch = dqz_cycle_channel(i, n).expect("valid index");
    match fault {
        None => ch,
        Some(Fault::KSign) => {
            let mut entries = ch.k_op().entries().to_vec();
            entries[2 * 4 + 3] = -entries[2 * 4 + 3];
            let k = Operator::new(4, entries).expect("4x4");
            CycleChannel::from_parts(k, ch.survival_p(), ch.branch_index())
        }
    }
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("worst deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn orthogonality(fault: Option<Fault>) -> CheckResult {
    let worst = (0..2)
        .flat_map(|i| (1..=64).map(move |n| channel(i, n, fault).orthogonality_defect()))
        .fold(0.0, f64::max);
    check("k_orthogonality", worst, ALGEBRA_TOL)
}

fn trace_preservation(fault: Option<Fault>) -> CheckResult {
    let mut worst: f64 = 0.0;
    for bell in BellState::ALL {
        let rho = DensityMatrix::from_pure(&bell.ket()).expect("normalized");
        for n in 1..=64 {
            let ch = channel(bell.channel_index(), n, fault);
            let mut r = rho.clone();
            for _ in 0..n {
                r = ch.apply_once(&r).expect("4-dim");
            }
            worst = worst.max((r.trace() + r.lost_weight() - 1.0).abs());
            let target = bell.dqz_separable_target(0);
            let kn = ch.k_op().pow(u64::from(n));
            let out = rho.conjugate_by(&kn).expect("4-dim");
            worst = worst.max((out.trace() - 1.0).abs());
            worst = worst.max((out.fidelity_with(&target).expect("4-dim") - 1.0).abs());
        }
    }
    check("trace_and_separability", worst, ACCUMULATED_TOL)
}

fn decode_table(fault: Option<Fault>) -> CheckResult {
    let mut worst: f64 = 0.0;
    for bell in BellState::ALL {
        for n in [2, 7, 12, 100] {
            for path in [OutputPath::X, OutputPath::Y] {
                let ch = channel(bell.channel_index(), n, fault);
                let Ok(d) = dqz_analyze_with(&ch, bell, n, path) else {
                    // a corrupted channel may not even yield a distribution
                    worst = f64::INFINITY;
                    continue;
                };
                let wrong: f64 = d
                    .iter()
                    .filter_map(|(o, p)| o.clicks().map(|c| (c, p)))
                    .filter(|(c, _)| identify(AnalyzerKind::Dqz, *c).ok() != Some(bell))
                    .map(|(_, p)| p)
                    .sum();
                worst = worst.max(wrong);
            }
        }
    }
    check("decode_table", worst, ACCUMULATED_TOL)
}

fn survival_agreement() -> CheckResult {
    let mut worst: f64 = 0.0;
    for kind in AnalyzerKind::ALL {
        for n in 2..=64 {
            let analytic = p_survival(kind, n).expect("n ≥ 1");
            let mean = BellState::ALL
                .iter()
                .map(|b| {
                    1.0 - analyze(kind, *b, n)
                        .expect("valid")
                        .iter()
                        .last()
                        .map_or(0.0, |(_, p)| p)
                })
                .sum::<f64>()
                / 4.0;
            worst = worst.max((mean - analytic).abs());
        }
    }
    check("analyzer_survival", worst, ACCUMULATED_TOL)
}

fn threshold_targets() -> CheckResult {
    let got: Vec<u32> = AnalyzerKind::ALL
        .iter()
        .map(|k| min_n_for_target(*k, 1.8).unwrap_or(0))
        .collect();
    CheckResult {
        name: "threshold_targets",
        passed: got == [12, 24, 71],
        detail: format!("dqz={} ifm={} qz={} (expected 12, 24, 71)", got[0], got[1], got[2]),
    }
}

fn analytic_vs_mc() -> CheckResult {
    let shots = 200_000;
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for kind in AnalyzerKind::ALL {
        for n in [7, 24] {
            let est = simulate(kind, n, shots, 42).expect("valid");
            let r = r_analytic(kind, n).expect("n ≥ 1");
            let sigma = (r * (2.0 - r) / shots as f64).sqrt().max(1e-12);
            worst = worst.max((est.r_hat - r).abs() / sigma);
            errors += est.decode_errors;
        }
    }
    CheckResult {
        name: "analytic_vs_mc",
        passed: worst <= 4.0 && errors == 0,
        detail: format!("max deviation {worst:.2} sigma, {errors} decode errors"),
    }
}

pub fn run_selftest(fault: Option<Fault>) -> Vec<CheckResult> {
    vec![
        orthogonality(fault),
        trace_preservation(fault),
        decode_table(fault),
        survival_agreement(),
        threshold_targets(),
        analytic_vs_mc(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        for c in run_selftest(None) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn k_sign_fault_is_caught() {
        let res = run_selftest(Some(Fault::KSign));
        let failed: Vec<_> = res.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        assert!(failed.contains(&"k_orthogonality"));
        assert!(failed.contains(&"decode_table"));
    }
}
