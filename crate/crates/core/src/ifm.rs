//! N-cycle interaction-free measurement: a photon walks through a chain of
//! unbalanced beam splitters while an absorber may block path `b`.

use std::fmt;

use crate::error::{Error, Result};
use crate::optics::{beam_splitter, CycleAngle, PATH_LABELS};
use crate::quantum::{
    apply_operator, tensor, Amplitude, Operator, OutcomeDistribution, PureState, ALGEBRA_TOL, ONE, ZERO,
};

/// Object basis in `(pass, block)` order.
pub const OBJECT_LABELS: [&str; 2] = ["pass", "block"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectState {
    Pass,
    Block,
}

impl ObjectState {
    pub fn label(self) -> &'static str {
        match self {
            ObjectState::Pass => "pass",
            ObjectState::Block => "block",
        }
    }
}

impl fmt::Display for ObjectState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A classical object, or a quantum one in `λ|pass⟩ + μ|block⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AbsorberState {
    Classical(ObjectState),
    Quantum { pass: Amplitude, block: Amplitude },
}

impl AbsorberState {
    pub fn quantum(pass: Amplitude, block: Amplitude) -> Result<Self> {
        let n = pass.norm_sqr() + block.norm_sqr();
        if (n - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(AbsorberState::Quantum { pass, block })
    }

    /// `(λ, μ)` amplitudes of the pass and block branches.
    pub fn amplitudes(&self) -> (Amplitude, Amplitude) {
        match *self {
            AbsorberState::Classical(ObjectState::Pass) => (ONE, ZERO),
            AbsorberState::Classical(ObjectState::Block) => (ZERO, ONE),
            AbsorberState::Quantum { pass, block } => (pass, block),
        }
    }

    pub fn ket(&self) -> PureState {
        let (l, m) = self.amplitudes();
        PureState::new(OBJECT_LABELS.to_vec(), vec![l, m]).expect("two labels")
    }
}

/// Photon state after part of the chain; the squared norm of `amplitudes`
/// is the probability that the photon has not been absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub amplitudes: PureState,
}

impl ChainState {
    pub fn survival(&self) -> f64 {
        self.amplitudes.norm_sqr()
    }

    /// Renormalized state given survival.
    pub fn conditional(&self) -> Result<PureState> {
        self.amplitudes.normalized()
    }
}

/// Runs `n` of the `n_total` cycles. Each cycle applies `BS(π/2N)`; with the
/// object present the path-`b` amplitude is then absorbed. Renormalization
/// is deferred, so the surviving norm carries `cos^{2n}θ_N`.
pub fn ifm_evolve(n_total: u32, n: u32, blocked: bool) -> Result<ChainState> {
    let angle = CycleAngle::new(n_total)?;
    if n == 0 || n > n_total {
        return Err(Error::CycleIndexOutOfRange { n, total: n_total });
    }
    let bs = beam_splitter(angle.theta)?;
    let mut state = PureState::basis(PATH_LABELS.to_vec(), 0)?;
    for _ in 0..n {
        state = apply_operator(&bs, &state)?;
        if blocked {
            state.amps_mut()[1] = ZERO;
        }
    }
    Ok(ChainState { amplitudes: state })
}

/// Evolves the joint `object ⊗ path` state through `n` cycles. The block
/// branch loses its path-`b` amplitude every cycle; the returned state is
/// unnormalized (`1 − norm²` = absorption probability).
pub fn ifm_joint_evolve(n: u32, object: &AbsorberState) -> Result<PureState> {
    let angle = CycleAngle::new(n)?;
    let step = Operator::identity(2).kron(&beam_splitter(angle.theta)?)?;
    let photon = PureState::basis(PATH_LABELS.to_vec(), 0)?;
    let mut state = tensor(&object.ket(), &photon)?;
    let absorbed = state.index_of("block,b").expect("label present");
    for _ in 0..n {
        state = apply_operator(&step, &state)?;
        state.amps_mut()[absorbed] = ZERO;
    }
    Ok(state)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IfmOutcome {
    PhotonInA,
    PhotonInB,
    Absorbed,
}

impl fmt::Display for IfmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IfmOutcome::PhotonInA => "photon_in_a",
            IfmOutcome::PhotonInB => "photon_in_b",
            IfmOutcome::Absorbed => "absorbed",
        })
    }
}

/// Where the photon is found after `n` cycles against `object`.
pub fn ifm_detect(n: u32, object: &AbsorberState) -> Result<OutcomeDistribution<IfmOutcome>> {
    let state = ifm_joint_evolve(n, object)?;
    let p = |l: &str| state.amplitude(l).expect("label present").norm_sqr();
    let in_a = p("pass,a") + p("block,a");
    let in_b = p("pass,b") + p("block,b");
    OutcomeDistribution::new(vec![
        (IfmOutcome::PhotonInA, in_a),
        (IfmOutcome::PhotonInB, in_b),
        (IfmOutcome::Absorbed, (1.0 - in_a - in_b).max(0.0)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn cos_2n(n: u32) -> f64 {
        (PI / (2.0 * f64::from(n))).cos().powi(2 * n as i32)
    }

    #[test]
    fn free_chain_ends_in_b() {
        for n in [1, 2, 25, 300] {
            let s = ifm_evolve(n, n, false).unwrap();
            assert!((s.survival() - 1.0).abs() < 1e-12);
            assert!((s.amplitudes.amplitude("b").unwrap().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_blocked_cycle_absorbs_everything() {
        let s = ifm_evolve(1, 1, true).unwrap();
        assert!(s.survival() < 1e-30);
        assert!(s.conditional().is_err());
    }

    #[test]
    fn blocked_survival_n10() {
        // cos²⁰(π/20) by direct evaluation
        let s = ifm_evolve(10, 10, true).unwrap();
        assert!((s.survival() - 0.780_546_069_781).abs() < 1e-11, "{}", s.survival());
        assert!((s.survival() - cos_2n(10)).abs() < 1e-12);
        let c = s.conditional().unwrap();
        assert!((c.amplitude("a").unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_blocked_chain() {
        let s = ifm_evolve(12, 5, true).unwrap();
        let th = PI / 24.0;
        assert!((s.survival() - th.cos().powi(10)).abs() < 1e-14);
        assert_eq!(
            ifm_evolve(12, 13, true),
            Err(Error::CycleIndexOutOfRange { n: 13, total: 12 })
        );
        assert_eq!(
            ifm_evolve(12, 0, false),
            Err(Error::CycleIndexOutOfRange { n: 0, total: 12 })
        );
    }

    #[test]
    fn detect_classical_objects() {
        let d = ifm_detect(25, &AbsorberState::Classical(ObjectState::Pass)).unwrap();
        assert!((d.probability(&IfmOutcome::PhotonInB) - 1.0).abs() < 1e-12);
        let d = ifm_detect(1, &AbsorberState::Classical(ObjectState::Block)).unwrap();
        assert!((d.probability(&IfmOutcome::Absorbed) - 1.0).abs() < 1e-12);
        let d = ifm_detect(100, &AbsorberState::Classical(ObjectState::Block)).unwrap();
        // cos²⁰⁰(π/200)
        assert!((d.probability(&IfmOutcome::PhotonInA) - 0.975_626_914_144).abs() < 1e-11);
    }

    #[test]
    fn quantum_object_is_branch_linear() {
        let obj = AbsorberState::quantum(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let n = 30;
        let d = ifm_detect(n, &obj).unwrap();
        assert!((d.probability(&IfmOutcome::PhotonInB) - 0.36).abs() < 1e-12);
        assert!((d.probability(&IfmOutcome::PhotonInA) - 0.64 * cos_2n(n)).abs() < 1e-12);
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_state_is_entangled() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let obj = AbsorberState::quantum(Complex64::new(h, 0.0), Complex64::new(h, 0.0)).unwrap();
        let s = ifm_joint_evolve(50, &obj).unwrap();
        assert!((s.amplitude("pass,b").unwrap().re - h).abs() < 1e-12);
        assert!((s.amplitude("block,a").unwrap().re - h * cos_2n(50).sqrt()).abs() < 1e-12);
        assert!(s.amplitude("pass,a").unwrap().norm() < 1e-12);
    }

    #[test]
    fn quantum_object_must_be_normalized() {
        assert!(AbsorberState::quantum(ONE, ONE).is_err());
    }
}
