//! Complete Bell-state analyzers built on Zeno gates: the dual-QZ analyzer,
//! the two-stage IFM analyzer and the ancilla-assisted QZ analyzer.
//!
//! Every analyzer maps a Bell state to a distribution over detector click
//! pairs plus a photon-lost event. Electron detectors are `D1`/`D2`;
//! photon detectors are `D3`..`D6`.

use std::fmt;
use std::str::FromStr;

pub use crate::bell::{BellState, Family, Sign, COMPOSITE_LABELS};
use crate::error::{Error, Result};
use crate::ifm::AbsorberState;
use crate::optics::{beam_splitter, CycleAngle};
use crate::quantum::{hadamard, re, tensor, Amplitude, DensityMatrix, Operator, OutcomeDistribution, PureState, ZERO};
use crate::zeno::{ancilla_rotator, dqz_apply_with, dqz_cycle_channel, CycleChannel, DqzOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Detector {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
}

impl Detector {
    pub const ALL: [Detector; 6] = [Self::D1, Self::D2, Self::D3, Self::D4, Self::D5, Self::D6];

    pub fn is_electron(self) -> bool {
        matches!(self, Detector::D1 | Detector::D2)
    }

    pub fn is_photon(self) -> bool {
        !self.is_electron()
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", *self as u8 + 1)
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let idx = s
            .trim()
            .trim_start_matches(['D', 'd'])
            .parse::<usize>()
            .ok()
            .filter(|i| (1..=6).contains(i))
            .ok_or_else(|| Error::Parse {
                kind: "detector",
                input: s.into(),
            })?;
        Ok(Self::ALL[idx - 1])
    }
}

/// One electron click and one photon click.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DetectorPair {
    pub electron: Detector,
    pub photon: Detector,
}

impl DetectorPair {
    pub const fn new(electron: Detector, photon: Detector) -> Self {
        Self { electron, photon }
    }

    pub fn validate(self) -> Result<Self> {
        if self.electron.is_electron() && self.photon.is_photon() {
            Ok(self)
        } else {
            Err(Error::InvalidClicks(self.to_string()))
        }
    }
}

impl fmt::Display for DetectorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.electron, self.photon)
    }
}

impl FromStr for DetectorPair {
    type Err = Error;

    /// Accepts `D1·D3`, `D1*D3`, `D1D3`, `D1,D3` or `D1 D3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidClicks(s.to_string());
        let cleaned: String = s.chars().map(|c| if "·*, ".contains(c) { ' ' } else { c }).collect();
        let cleaned = cleaned.replace(['d'], "D");
        let parts: Vec<&str> = cleaned.split('D').map(str::trim).filter(|p| !p.is_empty()).collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        let e: Detector = format!("D{}", parts[0]).parse().map_err(|_| bad())?;
        let p: Detector = format!("D{}", parts[1]).parse().map_err(|_| bad())?;
        DetectorPair::new(e, p).validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Detection {
    Clicks(DetectorPair),
    PhotonLost,
}

impl fmt::Display for Detection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detection::Clicks(c) => c.fmt(f),
            Detection::PhotonLost => f.write_str("photon_lost"),
        }
    }
}

/// A single analyzer result together with the share of the interrogated
/// state in which the photon never entered the channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzerOutcome {
    pub result: Detection,
    pub counterfactual_weight: f64,
}

impl AnalyzerOutcome {
    pub fn clicks(&self) -> Option<DetectorPair> {
        match self.result {
            Detection::Clicks(c) => Some(c),
            Detection::PhotonLost => None,
        }
    }
}

pub type AnalyzerDistribution = OutcomeDistribution<AnalyzerOutcome>;

pub trait DetectionProbability {
    fn prob_of(&self, d: Detection) -> f64;
    fn lost_probability(&self) -> f64 {
        self.prob_of(Detection::PhotonLost)
    }
}

impl DetectionProbability for AnalyzerDistribution {
    fn prob_of(&self, d: Detection) -> f64 {
        self.probability_where(|o| o.result == d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnalyzerKind {
    Dqz,
    Ifm,
    Qz,
}

impl AnalyzerKind {
    /// Canonical output order.
    pub const ALL: [AnalyzerKind; 3] = [AnalyzerKind::Dqz, AnalyzerKind::Ifm, AnalyzerKind::Qz];

    pub fn name(self) -> &'static str {
        match self {
            AnalyzerKind::Dqz => "dqz",
            AnalyzerKind::Ifm => "ifm",
            AnalyzerKind::Qz => "qz",
        }
    }
}

impl fmt::Display for AnalyzerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyzerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dqz" => Ok(AnalyzerKind::Dqz),
            "ifm" => Ok(AnalyzerKind::Ifm),
            "qz" => Ok(AnalyzerKind::Qz),
            _ => Err(Error::Parse {
                kind: "analyzer",
                input: s.into(),
            }),
        }
    }
}

/// Output path of the photon after the 50:50 splitter of the DQZ analyzer:
/// `X` (m = 0) or `Y` (m = 1). It flips the relative sign of the electron
/// superposition and relabels detectors D1↔D2, D3↔D6, D4↔D5.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OutputPath {
    #[default]
    X,
    Y,
}

impl OutputPath {
    pub fn m(self) -> u8 {
        match self {
            OutputPath::X => 0,
            OutputPath::Y => 1,
        }
    }

    pub fn from_m(m: u8) -> Result<Self> {
        match m {
            0 => Ok(OutputPath::X),
            1 => Ok(OutputPath::Y),
            _ => Err(Error::Parse {
                kind: "path index m",
                input: m.to_string(),
            }),
        }
    }
}

fn electron_detector(bit: usize) -> Detector {
    if bit == 0 {
        Detector::D2
    } else {
        Detector::D1
    }
}

fn electron_hadamard() -> Operator {
    hadamard().kron(&Operator::identity(2)).expect("4x4")
}

fn block_fraction(rho: &DensityMatrix) -> f64 {
    let tr = rho.trace();
    if tr <= f64::MIN_POSITIVE {
        return 0.0;
    }
    let half = rho.dim() / 2;
    (0..half).map(|i| rho.matrix().get(i, i).re).sum::<f64>() / tr
}

/// DQZ analyzer: `n` DQZ cycles, then the photon polarization separates Φ
/// (V) from Ψ (H) and a Hadamard plus path measurement on the electron
/// fixes the sign.
pub fn dqz_analyze(bell: BellState, n: u32, path: OutputPath) -> Result<AnalyzerDistribution> {
    let channel = dqz_cycle_channel(bell.channel_index(), n)?;
    dqz_analyze_with(&channel, bell, n, path)
}

/// [`dqz_analyze`] through a caller-supplied cycle channel.
pub fn dqz_analyze_with(
    channel: &CycleChannel,
    bell: BellState,
    n: u32,
    path: OutputPath,
) -> Result<AnalyzerDistribution> {
    let out: DqzOutcome = dqz_apply_with(channel, bell, n)?;
    let rho = &out.surviving;
    let cf = block_fraction(rho);
    let z = if path == OutputPath::Y {
        Operator::from_real(2, &[1.0, 0.0, 0.0, -1.0])?
    } else {
        Operator::identity(2)
    };
    let u = electron_hadamard().matmul(&z.kron(&Operator::identity(2))?)?;
    let rho = rho.conjugate_by(&u)?;
    let (v_det, h_det) = match path {
        OutputPath::X => (Detector::D3, Detector::D4),
        OutputPath::Y => (Detector::D6, Detector::D5),
    };
    let mut entries = Vec::with_capacity(5);
    for e in 0..2 {
        for (p, photon) in [(0, v_det), (1, h_det)] {
            let pair = DetectorPair::new(electron_detector(e), photon);
            entries.push((
                AnalyzerOutcome {
                    result: Detection::Clicks(pair),
                    counterfactual_weight: cf,
                },
                rho.matrix().get(2 * e + p, 2 * e + p).re,
            ));
        }
    }
    entries.push((
        AnalyzerOutcome {
            result: Detection::PhotonLost,
            counterfactual_weight: 0.0,
        },
        out.lost_weight(),
    ));
    OutcomeDistribution::new(entries)
}

/// Electron paths `a`, `b` times photon paths `c1`, `c2`, `d1`, `d2`.
pub const IFM_LABELS: [&str; 8] = ["a,c1", "a,c2", "a,d1", "a,d2", "b,c1", "b,c2", "b,d1", "b,d2"];

fn ifm_index(electron_a: bool, photon: usize) -> usize {
    (if electron_a { 0 } else { 4 }) + photon
}

const C1: usize = 0;
const C2: usize = 1;
const D1_PATH: usize = 2;
const D2_PATH: usize = 3;

/// Bell state written in the IFM analyzer's occupation basis:
/// `|0⟩_e = b`, `|1⟩_e = a`, `|0⟩_p = d2`, `|1⟩_p = c2`.
pub fn ifm_bell_ket(bell: BellState) -> PureState {
    let amps = bell.amplitudes();
    let mut v = vec![ZERO; 8];
    for (idx, amp) in amps.iter().enumerate() {
        let (e, p) = (idx >> 1, idx & 1);
        let photon = if p == 1 { C2 } else { D2_PATH };
        v[ifm_index(e == 1, photon)] = re(*amp);
    }
    PureState::new(IFM_LABELS.to_vec(), v).expect("eight labels")
}

/// First stage of the IFM analyzer: `n` cycles of two beam-splitter chains
/// (`c2 → c1` and `d2 → d1`). The electron in `a` blocks `c1`, in `b` it
/// blocks `d1`. Returns the unnormalized state (missing norm = absorbed).
pub fn ifm_stage_one(bell: BellState, n: u32) -> Result<PureState> {
    let angle = CycleAngle::new(n)?;
    let bs = beam_splitter(angle.theta)?;
    let mut state = ifm_bell_ket(bell);
    for _ in 0..n {
        let amps = state.amps_mut();
        for electron_a in [true, false] {
            for (start, other) in [(C2, C1), (D2_PATH, D1_PATH)] {
                let (i, j) = (ifm_index(electron_a, start), ifm_index(electron_a, other));
                let out = bs.apply(&[amps[i], amps[j]])?;
                amps[i] = out[0];
                amps[j] = out[1];
            }
        }
        amps[ifm_index(true, C1)] = ZERO;
        amps[ifm_index(false, D1_PATH)] = ZERO;
    }
    Ok(state)
}

/// IFM analyzer. After the first stage the photon sits on the Ψ side
/// (`c1`/`d1`, detector D3) or the Φ side (`c2`/`d2`, detector D4), still
/// correlated with the electron path. A second Zeno stage with per-cycle
/// survival `1 − ½sin²θ_N` disentangles it; a Hadamard and path measurement
/// on the electron then give the sign.
pub fn ifm_analyze(bell: BellState, n: u32) -> Result<AnalyzerDistribution> {
    let stage = ifm_stage_one(bell, n)?;
    let amps = stage.amps();
    let mut entries = Vec::with_capacity(5);
    let mut survived = 0.0;
    // (photon side, channel index, photon detector)
    for (side_c, side_d, index, det) in [(C1, D1_PATH, 0u8, Detector::D3), (C2, D2_PATH, 1u8, Detector::D4)] {
        // effective |e q⟩ with e: b→0, a→1 and q: d→0, c→1
        let eff: Vec<Amplitude> = vec![
            amps[ifm_index(false, side_d)],
            amps[ifm_index(false, side_c)],
            amps[ifm_index(true, side_d)],
            amps[ifm_index(true, side_c)],
        ];
        let eff = PureState::new(COMPOSITE_LABELS.to_vec(), eff)?;
        let weight = eff.norm_sqr();
        let channel = dqz_cycle_channel(index, n)?;
        let (clicks, cf) = if weight > 0.0 {
            let rho = DensityMatrix::from_subnormalized(&eff)?;
            let rho = channel.apply_cycles(&rho, n)?;
            let cf = block_fraction(&rho);
            let rho = rho.conjugate_by(&electron_hadamard())?;
            let d = |i: usize| rho.matrix().get(i, i).re;
            ([d(0) + d(1), d(2) + d(3)], cf)
        } else {
            ([0.0, 0.0], 0.5)
        };
        for (e, p) in clicks.iter().enumerate() {
            survived += p;
            entries.push((
                AnalyzerOutcome {
                    result: Detection::Clicks(DetectorPair::new(electron_detector(e), det)),
                    counterfactual_weight: cf,
                },
                *p,
            ));
        }
    }
    entries.push((
        AnalyzerOutcome {
            result: Detection::PhotonLost,
            counterfactual_weight: 0.0,
        },
        (1.0 - survived).max(0.0),
    ));
    OutcomeDistribution::new(entries)
}

/// Control ⊗ target ⊗ ancilla-polarization basis of the QZ analyzer.
pub const QZ_LABELS: [&str; 8] = ["0,0,H", "0,0,V", "0,1,H", "0,1,V", "1,0,H", "1,0,V", "1,1,H", "1,1,V"];

/// Two-qubit basis `|C T⟩`.
pub const CT_LABELS: [&str; 4] = ["0,0", "0,1", "1,0", "1,1"];

fn target_hadamard_ct() -> Operator {
    Operator::identity(2).kron(&hadamard()).expect("4x4")
}

/// Per-cycle channel of the QZ analyzer: identity while the pair blocks
/// (anything but |1⟩_C|1⟩_T), `PR^H(φ_N)` on the ancilla otherwise; survival
/// `1 − ¾ sin²φ_N` per cycle.
pub fn qz_cycle_channel(n: u32) -> Result<CycleChannel> {
    let angle = CycleAngle::new(n)?;
    let k = Operator::identity(6).direct_sum(&ancilla_rotator(angle.phi)?)?;
    let s = angle.phi.sin();
    Ok(CycleChannel::from_parts(k, 1.0 - 0.75 * s * s, 0))
}

/// QZ analyzer: Hadamard on the target, `n` QZ cycles with an H ancilla
/// (a controlled-Z once the ancilla survives), Hadamard on the target and the
/// control, then measurement of both in the computational basis.
pub fn qz_analyze(bell: BellState, n: u32) -> Result<AnalyzerDistribution> {
    let ancilla = PureState::basis(vec!["H", "V"], 0)?;
    let pair = bell.ket_with_labels(CT_LABELS.to_vec());
    let pair = crate::quantum::apply_operator(&target_hadamard_ct(), &pair)?;
    let cf = (0..3).map(|i| pair.amps()[i].norm_sqr()).sum::<f64>();
    let psi = tensor(&pair, &ancilla)?;
    let rho = DensityMatrix::from_pure(&psi)?;
    let rho = qz_cycle_channel(n)?.apply_cycles(&rho, n)?;
    let finish = hadamard().kron(&hadamard())?.kron(&Operator::identity(2))?;
    let rho = rho.conjugate_by(&finish)?;
    let mut entries = Vec::with_capacity(5);
    for c in 0..2 {
        for t in 0..2 {
            let base = 4 * c + 2 * t;
            let p = rho.matrix().get(base, base).re + rho.matrix().get(base + 1, base + 1).re;
            let photon = if t == 0 { Detector::D3 } else { Detector::D4 };
            entries.push((
                AnalyzerOutcome {
                    result: Detection::Clicks(DetectorPair::new(electron_detector(c), photon)),
                    counterfactual_weight: cf,
                },
                p,
            ));
        }
    }
    entries.push((
        AnalyzerOutcome {
            result: Detection::PhotonLost,
            counterfactual_weight: 0.0,
        },
        rho.lost_weight(),
    ));
    OutcomeDistribution::new(entries)
}

/// Pair state left behind when the QZ ancilla is absorbed: the blocking
/// part of `(I ⊗ H)|bell⟩`, renormalized.
pub fn qz_collapsed_state(bell: BellState) -> PureState {
    let pair = bell.ket_with_labels(CT_LABELS.to_vec());
    let mut pair = crate::quantum::apply_operator(&target_hadamard_ct(), &pair).expect("4x4");
    pair.amps_mut()[3] = ZERO;
    pair.normalized().expect("blocking part is non-zero")
}

pub fn analyze(kind: AnalyzerKind, bell: BellState, n: u32) -> Result<AnalyzerDistribution> {
    match kind {
        AnalyzerKind::Dqz => dqz_analyze(bell, n, OutputPath::X),
        AnalyzerKind::Ifm => ifm_analyze(bell, n),
        AnalyzerKind::Qz => qz_analyze(bell, n),
    }
}

/// QZ at N = 1 has `sin²φ₁ = 0`, so its survival formula is vacuously 1.
pub fn is_degenerate(kind: AnalyzerKind, n: u32) -> bool {
    kind == AnalyzerKind::Qz && n == 1
}

/// Which Bell state a click pair identifies for a given analyzer.
///
/// DQZ and QZ share one table (including the path-`y` aliases); the IFM
/// analyzer puts Ψ on D3 and Φ on D4.
pub fn identify(kind: AnalyzerKind, clicks: DetectorPair) -> Result<BellState> {
    use Detector::*;
    let clicks = clicks.validate()?;
    let bell = match kind {
        AnalyzerKind::Dqz | AnalyzerKind::Qz => match (clicks.electron, clicks.photon) {
            (D1, D3) | (D2, D6) => BellState::PHI_MINUS,
            (D2, D3) | (D1, D6) => BellState::PHI_PLUS,
            (D1, D4) | (D2, D5) => BellState::PSI_MINUS,
            (D2, D4) | (D1, D5) => BellState::PSI_PLUS,
            _ => unreachable!("validated pair"),
        },
        AnalyzerKind::Ifm => match (clicks.electron, clicks.photon) {
            (D2, D3) => BellState::PSI_PLUS,
            (D1, D3) => BellState::PSI_MINUS,
            (D2, D4) => BellState::PHI_PLUS,
            (D1, D4) => BellState::PHI_MINUS,
            _ => {
                return Err(Error::InvalidClicks(format!(
                    "{clicks} cannot occur in the IFM analyzer"
                )))
            }
        },
    };
    Ok(bell)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CounterfactualStats {
    /// Probability weight of the branch in which the photon never crosses
    /// the channel.
    pub counterfactual_weight: f64,
    /// DQZ survival probability after `n` cycles.
    pub survival: f64,
}

/// Block-branch weight of a Bell input to the DQZ analyzer, with survival.
pub fn semi_counterfactual_stats(bell: BellState, n: u32) -> Result<CounterfactualStats> {
    let ket = bell.ket();
    let block: f64 = ["block,V", "block,H"]
        .iter()
        .map(|l| ket.amplitude(l).expect("label").norm_sqr())
        .sum();
    let out = crate::zeno::dqz_apply(bell, n)?;
    Ok(CounterfactualStats {
        counterfactual_weight: block,
        survival: out.survival_weight(),
    })
}

/// Counterfactual weight of an arbitrary absorber: the block probability.
pub fn counterfactual_weight(object: &AbsorberState) -> f64 {
    object.amplitudes().1.norm_sqr()
}
