//! Primitive optical operators: unbalanced beam splitter, polarization
//! rotators and polarizing beam splitters.
//!
//! Mirrors, optical delays and circulators only route the photon between
//! cycles and act as the identity here.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantum::Operator;

/// Path basis of the beam-splitter chain: photon in path `a` (|10⟩) or `b` (|01⟩).
pub const PATH_LABELS: [&str; 2] = ["a", "b"];

/// Polarization basis in `(H, V)` order.
pub const POL_LABELS: [&str; 2] = ["H", "V"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn orthogonal(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarization::H => "H",
            Polarization::V => "V",
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Polarization::H),
            "V" | "v" => Ok(Polarization::V),
            _ => Err(Error::Parse {
                kind: "polarization",
                input: s.into(),
            }),
        }
    }
}

/// Per-cycle angles for an `n_cycles`-round Zeno interrogation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleAngle {
    pub n_cycles: u32,
    /// π/(2N): N rotations make a quarter turn.
    pub theta: f64,
    /// π/N: N rotations make a half turn.
    pub phi: f64,
}

impl CycleAngle {
    pub fn new(n_cycles: u32) -> Result<Self> {
        if n_cycles == 0 {
            return Err(Error::ZeroCycles);
        }
        let n = f64::from(n_cycles);
        Ok(Self {
            n_cycles,
            theta: FRAC_PI_2 / n,
            phi: PI / n,
        })
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= FRAC_PI_2 + f64::EPSILON {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta))
    }
}

fn rotation(theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    Operator::from_real(2, &[c, -s, s, c]).expect("2x2")
}

/// Unbalanced beam splitter on `(a, b)`:
/// |a⟩ → cosθ|a⟩ + sinθ|b⟩, |b⟩ → cosθ|b⟩ − sinθ|a⟩.
pub fn beam_splitter(theta: f64) -> Result<Operator> {
    check_angle(theta)?;
    Ok(rotation(theta))
}

/// Polarization rotator on `(H, V)`.
///
/// `PR^H`: |H⟩ → cosθ|H⟩ + sinθ|V⟩, |V⟩ → cosθ|V⟩ − sinθ|H⟩.
/// `PR^V` rotates the other way: |V⟩ → cosθ|V⟩ + sinθ|H⟩.
pub fn polarization_rotator(axis: Polarization, theta: f64) -> Result<Operator> {
    check_angle(theta)?;
    Ok(match axis {
        Polarization::H => rotation(theta),
        Polarization::V => rotation(theta).transpose(),
    })
}

/// Basis of [`pbs_route`]: both polarizations at the input port, then the
/// pass polarization in the transmitted arm and the other in the reflected arm.
pub fn pbs_labels(axis: Polarization) -> [String; 4] {
    let (t, r) = (axis, axis.orthogonal());
    [
        "H,in".into(),
        "V,in".into(),
        format!("{t},transmitted"),
        format!("{r},reflected"),
    ]
}

/// Polarizing beam splitter `PBS^axis`: transmits `axis`, reflects the
/// orthogonal polarization. Swaps each input mode with its output arm.
pub fn pbs_route(axis: Polarization) -> Operator {
    // in pbs_labels order the routed partner of (H,in) is whichever output
    // carries H
    let (h_out, v_out) = match axis {
        Polarization::H => (2, 3),
        Polarization::V => (3, 2),
    };
    let mut m = [0.0; 16];
    for (i, j) in [(0, h_out), (1, v_out)] {
        m[i * 4 + j] = 1.0;
        m[j * 4 + i] = 1.0;
    }
    Operator::from_real(4, &m).expect("4x4")
}

/// Rotator `PR^axis(θ)` acting on the input-port polarization modes of the
/// [`pbs_labels`] space, identity on the output arms.
pub fn rotator_at_input(axis: Polarization, theta: f64) -> Result<Operator> {
    polarization_rotator(axis, theta)?.direct_sum(&Operator::identity(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_operator, max_abs_diff, PureState, ALGEBRA_TOL};

    #[test]
    fn quarter_turn() {
        let bs = beam_splitter(FRAC_PI_2).unwrap();
        let out = apply_operator(&bs, &PureState::basis(PATH_LABELS.to_vec(), 0).unwrap()).unwrap();
        assert!((out.amplitude("b").unwrap().re - 1.0).abs() < 1e-15);
        assert!(out.amplitude("a").unwrap().norm() < 1e-15);
    }

    #[test]
    fn partial_chain_matches_closed_form() {
        let n_total = 9;
        let ang = CycleAngle::new(n_total).unwrap();
        let bs = beam_splitter(ang.theta).unwrap();
        let mut s = PureState::basis(PATH_LABELS.to_vec(), 0).unwrap();
        for n in 1..n_total {
            s = apply_operator(&bs, &s).unwrap();
            let x = f64::from(n) * ang.theta;
            assert!((s.amplitude("a").unwrap().re - x.cos()).abs() < 1e-14);
            assert!((s.amplitude("b").unwrap().re - x.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn rotation_group_law() {
        let (t1, t2) = (0.2, 0.7);
        let lhs = beam_splitter(t1).unwrap().matmul(&beam_splitter(t2).unwrap()).unwrap();
        assert!(max_abs_diff(&lhs, &beam_splitter(t1 + t2).unwrap()) < ALGEBRA_TOL);
    }

    #[test]
    fn angle_range_enforced() {
        assert_eq!(beam_splitter(0.0), Err(Error::AngleOutOfRange(0.0)));
        assert!(beam_splitter(2.0).is_err());
        assert!(polarization_rotator(Polarization::H, -0.1).is_err());
        assert_eq!(CycleAngle::new(0), Err(Error::ZeroCycles));
    }

    #[test]
    fn rotator_h_full_turn_sequence() {
        let ang = CycleAngle::new(17).unwrap();
        let pr = polarization_rotator(Polarization::H, ang.theta).unwrap();
        let out = apply_operator(&pr.pow(17), &PureState::basis(POL_LABELS.to_vec(), 0).unwrap()).unwrap();
        assert!((out.amplitude("V").unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotator_v_convention() {
        let ang = CycleAngle::new(5).unwrap();
        let pr = polarization_rotator(Polarization::V, ang.theta).unwrap();
        let out = apply_operator(&pr, &PureState::basis(POL_LABELS.to_vec(), 1).unwrap()).unwrap();
        assert!((out.amplitude("V").unwrap().re - ang.theta.cos()).abs() < 1e-15);
        assert!((out.amplitude("H").unwrap().re - ang.theta.sin()).abs() < 1e-15);
    }

    #[test]
    fn rotators_are_orthogonal() {
        for axis in [Polarization::H, Polarization::V] {
            let pr = polarization_rotator(axis, 0.37).unwrap();
            let g = pr.matmul(&pr.transpose()).unwrap();
            assert!(max_abs_diff(&g, &Operator::identity(2)) < ALGEBRA_TOL);
        }
    }

    #[test]
    fn pbs_routes_by_polarization() {
        for axis in [Polarization::H, Polarization::V] {
            let labels = pbs_labels(axis).to_vec();
            let pbs = pbs_route(axis);
            let h = apply_operator(&pbs, &PureState::basis_label(labels.clone(), "H,in").unwrap()).unwrap();
            let v = apply_operator(&pbs, &PureState::basis_label(labels.clone(), "V,in").unwrap()).unwrap();
            let (h_arm, v_arm) = match axis {
                Polarization::H => ("H,transmitted", "V,reflected"),
                Polarization::V => ("H,reflected", "V,transmitted"),
            };
            assert_eq!(h.amplitude(h_arm).unwrap().re, 1.0);
            assert_eq!(v.amplitude(v_arm).unwrap().re, 1.0);
            assert_eq!(pbs.matmul(&pbs).unwrap(), Operator::identity(4));
        }
    }

    #[test]
    fn rotator_then_pbs_is_beam_splitter() {
        for n in [1, 2, 7, 100] {
            let ang = CycleAngle::new(n).unwrap();
            let m = pbs_route(Polarization::H)
                .matmul(&rotator_at_input(Polarization::H, ang.theta).unwrap())
                .unwrap();
            // columns (H,in),(V,in) → rows (transmitted, reflected) ≙ paths (a, b)
            let block = Operator::new(2, vec![m.get(2, 0), m.get(2, 1), m.get(3, 0), m.get(3, 1)]).unwrap();
            assert!(max_abs_diff(&block, &beam_splitter(ang.theta).unwrap()) < ALGEBRA_TOL);
        }
    }
}
