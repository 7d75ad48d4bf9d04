//! Quantum-Zeno gates: the single-polarization H/V-QZ gate, the dual (DQZ)
//! gate built from one of each, and the per-cycle channel used for finite-N
//! Bell-state analysis.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::bell::{BellState, COMPOSITE_LABELS};
use crate::error::{Error, Result};
use crate::ifm::{AbsorberState, ObjectState};
use crate::optics::{pbs_route, polarization_rotator, rotator_at_input, CycleAngle, Polarization, POL_LABELS};
use crate::quantum::{max_abs_diff, re, Amplitude, DensityMatrix, Operator, OutcomeDistribution, PureState, ZERO};

/// Number of Zeno cycles, or the ideal `N → ∞` gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cycles {
    Finite(u32),
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GatePhoton {
    H,
    V,
    Discarded,
}

/// Joint outcome of a QZ gate: object branch and what left the gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QzOutcome {
    pub object: ObjectState,
    pub photon: GatePhoton,
}

impl fmt::Display for QzOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.photon {
            GatePhoton::H => "output_photon_H",
            GatePhoton::V => "output_photon_V",
            GatePhoton::Discarded => "discarded",
        };
        write!(f, "{},{p}", self.object)
    }
}

fn photon_amplitudes(photon: &PureState) -> Result<(Amplitude, Amplitude)> {
    if !photon.is_normalized() {
        return Err(Error::NotNormalized(photon.norm_sqr()));
    }
    match (photon.amplitude("H"), photon.amplitude("V")) {
        (Some(h), Some(v)) if photon.dim() == 2 => Ok((h, v)),
        _ => Err(Error::InvalidState("photon must be over the (H, V) basis".into())),
    }
}

/// One Michelson QZ cycle on the four modes of [`crate::optics::pbs_labels`]:
/// rotate at the input, split at the PBS, let the object act on the
/// reflected arm, mirror back and recombine.
struct QzCycle {
    rotate: Operator,
    pbs: Operator,
}

impl QzCycle {
    fn new(axis: Polarization, theta: f64) -> Result<Self> {
        Ok(Self {
            rotate: rotator_at_input(axis, theta)?,
            pbs: pbs_route(axis),
        })
    }

    fn step(&self, modes: &mut [Amplitude; 4], blocked: bool) {
        let v = self.rotate.apply(modes).expect("4 modes");
        let mut v = self.pbs.apply(&v).expect("4 modes");
        if blocked {
            v[3] = ZERO;
        }
        let v = self.pbs.apply(&v).expect("4 modes");
        modes.copy_from_slice(&v);
    }
}

/// H-QZ or V-QZ gate against `object` with input polarization `photon`.
///
/// In finite mode the gate is simulated element by element. The asymptotic
/// mode is the ideal gate: with the object passing the polarization flips;
/// with it blocking the `axis` polarization is kept and the orthogonal one is
/// discarded.
pub fn qz_gate(
    axis: Polarization,
    cycles: Cycles,
    object: &AbsorberState,
    photon: &PureState,
) -> Result<OutcomeDistribution<QzOutcome>> {
    let (h, v) = photon_amplitudes(photon)?;
    let (lam, mu) = object.amplitudes();
    let mut entries = Vec::with_capacity(6);
    for (branch, w) in [(ObjectState::Pass, lam.norm_sqr()), (ObjectState::Block, mu.norm_sqr())] {
        let blocked = branch == ObjectState::Block;
        let (out_h, out_v) = match cycles {
            Cycles::Finite(n) => {
                let angle = CycleAngle::new(n)?;
                let cycle = QzCycle::new(axis, angle.theta)?;
                let mut modes = [h, v, ZERO, ZERO];
                for _ in 0..n {
                    cycle.step(&mut modes, blocked);
                }
                (modes[0].norm_sqr(), modes[1].norm_sqr())
            }
            Cycles::Asymptotic => {
                let (keep, other) = match axis {
                    Polarization::H => (h.norm_sqr(), v.norm_sqr()),
                    Polarization::V => (v.norm_sqr(), h.norm_sqr()),
                };
                match (blocked, axis) {
                    (false, Polarization::H) => (other, keep),
                    (false, Polarization::V) => (keep, other),
                    (true, Polarization::H) => (keep, 0.0),
                    (true, Polarization::V) => (0.0, keep),
                }
            }
        };
        let discarded = (1.0 - out_h - out_v).max(0.0);
        for (photon, p) in [
            (GatePhoton::V, out_v),
            (GatePhoton::H, out_h),
            (GatePhoton::Discarded, discarded),
        ] {
            entries.push((QzOutcome { object: branch, photon }, w * p));
        }
    }
    OutcomeDistribution::new(entries)
}

/// Ideal DQZ gate: a CNOT with the object as control (pass = |1⟩) and the
/// photon polarization as target (V = |0⟩, H = |1⟩).
pub fn dqz_asymptotic(object: &AbsorberState, photon: &PureState) -> Result<PureState> {
    let (alpha, beta) = photon_amplitudes(photon)?;
    let (lam, mu) = object.amplitudes();
    // block,V  block,H  pass,V  pass,H
    let amps = vec![beta * mu, alpha * mu, alpha * lam, beta * lam];
    PureState::new(COMPOSITE_LABELS.to_vec(), amps)
}

/// Element-level DQZ gate: `PBS₁` sends H into an H-QZ gate and V into a
/// V-QZ gate, both interrogating the same object for `n` cycles, and `PBS₂`
/// recombines them. Returns the unnormalized composite state over
/// [`COMPOSITE_LABELS`]; its missing norm is the absorption probability.
pub fn dqz_microscopic(n: u32, object: &AbsorberState, photon: &PureState) -> Result<PureState> {
    let (alpha, beta) = photon_amplitudes(photon)?;
    let angle = CycleAngle::new(n)?;
    let h_gate = QzCycle::new(Polarization::H, angle.theta)?;
    let v_gate = QzCycle::new(Polarization::V, angle.theta)?;
    let (lam, mu) = object.amplitudes();
    let mut amps = vec![ZERO; 4];
    for (branch, w) in [(ObjectState::Block, mu), (ObjectState::Pass, lam)] {
        let blocked = branch == ObjectState::Block;
        let mut h_modes = [alpha, ZERO, ZERO, ZERO];
        let mut v_modes = [ZERO, beta, ZERO, ZERO];
        for _ in 0..n {
            h_gate.step(&mut h_modes, blocked);
            v_gate.step(&mut v_modes, blocked);
        }
        let out_h = h_modes[0] + v_modes[0];
        let out_v = h_modes[1] + v_modes[1];
        let base = if blocked { 0 } else { 2 };
        amps[base] = w * out_v;
        amps[base + 1] = w * out_h;
    }
    PureState::new(COMPOSITE_LABELS.to_vec(), amps)
}

/// One Zeno cycle as a channel: with probability `survival_p` the photon
/// survives and the state is rotated by `k_op`; otherwise it is absorbed.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleChannel {
    k_op: Operator,
    survival_p: f64,
    branch_index: u8,
}

/// `K_i`: identity on the block half of the composite basis and a rotation
/// by θ_N with off-diagonal signs `(−1)^{i+1}`, `(−1)^i` on the pass half.
pub fn k_operator(branch_index: u8, theta: f64) -> Operator {
    let (s, c) = theta.sin_cos();
    let sgn = if branch_index.is_multiple_of(2) { 1.0 } else { -1.0 };
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0,       0.0,
        0.0, 1.0, 0.0,       0.0,
        0.0, 0.0, c,         -sgn * s,
        0.0, 0.0, sgn * s,   c,
    ];
    Operator::from_real(4, &m).expect("4x4")
}

pub fn dqz_cycle_channel(branch_index: u8, n: u32) -> Result<CycleChannel> {
    if branch_index > 1 {
        return Err(Error::InvalidState(format!(
            "channel index {branch_index} not in {{0,1}}"
        )));
    }
    let angle = CycleAngle::new(n)?;
    let s = angle.theta.sin();
    Ok(CycleChannel {
        k_op: k_operator(branch_index, angle.theta),
        survival_p: 1.0 - 0.5 * s * s,
        branch_index,
    })
}

impl CycleChannel {
    /// Assembles a channel without checks. The self-test uses this to inject
    /// faults.
    pub fn from_parts(k_op: Operator, survival_p: f64, branch_index: u8) -> Self {
        Self {
            k_op,
            survival_p,
            branch_index,
        }
    }

    pub fn k_op(&self) -> &Operator {
        &self.k_op
    }

    pub fn survival_p(&self) -> f64 {
        self.survival_p
    }

    pub fn branch_index(&self) -> u8 {
        self.branch_index
    }

    /// ‖KᵀK − I‖_max
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.k_op.transpose().matmul(&self.k_op).expect("square");
        max_abs_diff(&g, &Operator::identity(self.k_op.dim()))
    }

    /// `ρ → P·KρKᵀ`, with `(1 − P)·tr ρ` moved to the lost weight.
    pub fn apply_once(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_power(rho, 1)
    }

    /// `n` cycles in closed form: `ρ → Pⁿ·KⁿρKⁿᵀ`.
    pub fn apply_cycles(&self, rho: &DensityMatrix, n: u32) -> Result<DensityMatrix> {
        self.apply_power(rho, n)
    }

    fn apply_power(&self, rho: &DensityMatrix, n: u32) -> Result<DensityMatrix> {
        if rho.dim() != self.k_op.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.k_op.dim(),
                actual: rho.dim(),
            });
        }
        let kn = self.k_op.pow(u64::from(n));
        let pn = survival_power(self.survival_p, n);
        let rotated = kn.matmul(rho.matrix())?.matmul(&kn.transpose())?;
        let scaled: Vec<Amplitude> = rotated.entries().iter().map(|z| z * pn).collect();
        let matrix = Operator::new(rotated.dim(), scaled)?;
        let lost = rho.lost_weight() + (1.0 - pn) * rho.trace();
        Ok(DensityMatrix::from_parts_unchecked(rho.labels().to_vec(), matrix, lost))
    }
}

pub(crate) fn survival_power(p: f64, n: u32) -> f64 {
    match i32::try_from(n) {
        Ok(k) => p.powi(k),
        Err(_) => p.powf(f64::from(n)),
    }
}

/// Result of running a Bell state through `n` DQZ cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct DqzOutcome {
    /// Retained state with trace `Pⁿ`; its lost weight is `1 − Pⁿ`.
    pub surviving: DensityMatrix,
    /// On absorption the electron collapses to |block⟩; this is the photon
    /// index `i` of the lost branch, kept for bookkeeping only.
    pub lost_photon_index: u8,
}

impl DqzOutcome {
    pub fn survival_weight(&self) -> f64 {
        self.surviving.trace()
    }

    pub fn lost_weight(&self) -> f64 {
        self.surviving.lost_weight()
    }

    pub fn conditional_state(&self) -> DensityMatrix {
        let tr = self.surviving.trace();
        let m = self.surviving.matrix();
        let scaled = m.entries().iter().map(|z| z / tr).collect();
        DensityMatrix::from_parts_unchecked(
            self.surviving.labels().to_vec(),
            Operator::new(m.dim(), scaled).expect("square"),
            0.0,
        )
    }
}

pub fn dqz_apply(bell: BellState, n: u32) -> Result<DqzOutcome> {
    let channel = dqz_cycle_channel(bell.channel_index(), n)?;
    dqz_apply_with(&channel, bell, n)
}

/// [`dqz_apply`] through a caller-supplied channel.
pub fn dqz_apply_with(channel: &CycleChannel, bell: BellState, n: u32) -> Result<DqzOutcome> {
    let rho = DensityMatrix::from_pure(&bell.ket())?;
    Ok(DqzOutcome {
        surviving: channel.apply_cycles(&rho, n)?,
        lost_photon_index: channel.branch_index(),
    })
}

/// Polarization state `α|H⟩ + β|V⟩`.
pub fn photon_state(alpha: Amplitude, beta: Amplitude) -> Result<PureState> {
    let s = PureState::new(POL_LABELS.to_vec(), vec![alpha, beta])?;
    if !s.is_normalized() {
        return Err(Error::NotNormalized(s.norm_sqr()));
    }
    Ok(s)
}

/// `|+⟩` polarization, used by several checks.
pub fn diagonal_photon() -> PureState {
    photon_state(re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)).expect("normalized")
}

/// Rotator used by the QZ Bell analyzer on the photon: `PR^H(φ)`.
pub(crate) fn ancilla_rotator(phi: f64) -> Result<Operator> {
    // φ_N = π/N exceeds the single-element range at N = 1
    if phi > std::f64::consts::FRAC_PI_2 {
        let half = polarization_rotator(Polarization::H, phi / 2.0)?;
        return half.matmul(&half);
    }
    polarization_rotator(Polarization::H, phi)
}
