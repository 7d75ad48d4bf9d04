//! End-to-end superdense coding: Pauli encoding on a shared Φ⁺ pair, Bell
//! analysis by one of the Zeno analyzers, decoding, and a Monte-Carlo
//! session runner.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::analyzers::{analyze, identify, AnalyzerDistribution, AnalyzerKind, Detection, DetectorPair};
use crate::bell::{BellState, COMPOSITE_LABELS};
use crate::error::{Error, Result};
use crate::quantum::{apply_operator, sample, shot_rng, Amplitude, Operator, ACCUMULATED_TOL};

/// Two classical bits, `00` through `11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Message(u8);

impl Message {
    pub const ALL: [Message; 4] = [Message(0), Message(1), Message(2), Message(3)];

    pub fn new(bits: u8) -> Result<Self> {
        if bits < 4 {
            Ok(Message(bits))
        } else {
            Err(Error::Parse {
                kind: "message",
                input: bits.to_string(),
            })
        }
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02b}", self.0)
    }
}

impl FromStr for Message {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "00" => Ok(Message(0)),
            "01" => Ok(Message(1)),
            "10" => Ok(Message(2)),
            "11" => Ok(Message(3)),
            _ => Err(Error::Parse {
                kind: "message",
                input: s.into(),
            }),
        }
    }
}

fn pauli(message: Message) -> Operator {
    let i = Amplitude::new(0.0, 1.0);
    let z = Amplitude::new(0.0, 0.0);
    let one = Amplitude::new(1.0, 0.0);
    let m = match message.0 {
        0 => vec![one, z, z, one],
        1 => vec![z, one, one, z],
        2 => vec![one, z, z, -one],
        _ => vec![z, -i, i, z],
    };
    Operator::new(2, m).expect("2x2")
}

fn target_bell(message: Message) -> BellState {
    match message.0 {
        0 => BellState::PHI_PLUS,
        1 => BellState::PSI_PLUS,
        2 => BellState::PHI_MINUS,
        _ => BellState::PSI_MINUS,
    }
}

/// Alice's Pauli operator (`I`, `X`, `Z`, `Y` for 00, 01, 10, 11) on her
/// half of Φ⁺, checked against the expected Bell state up to global phase.
pub fn encode(message: Message) -> BellState {
    let op = pauli(message).kron(&Operator::identity(2)).expect("4x4");
    let encoded = apply_operator(&op, &BellState::PHI_PLUS.ket()).expect("4-dim");
    let target = target_bell(message);
    let f = encoded.fidelity(&target.ket()).expect("same basis");
    debug_assert_eq!(encoded.labels(), COMPOSITE_LABELS);
    assert!(
        (f - 1.0).abs() < ACCUMULATED_TOL,
        "encoding of {message} has fidelity {f}"
    );
    target
}

/// Inverse of the encoding table.
pub fn message_for(bell: BellState) -> Message {
    Message::ALL
        .into_iter()
        .find(|m| target_bell(*m) == bell)
        .expect("every Bell state encodes a message")
}

/// Decode table of the DQZ analyzer (path `x` and path `y` detectors).
pub fn decode(clicks: DetectorPair) -> Result<(BellState, Message)> {
    decode_for(AnalyzerKind::Dqz, clicks)
}

pub fn decode_for(kind: AnalyzerKind, clicks: DetectorPair) -> Result<(BellState, Message)> {
    let bell = identify(kind, clicks)?;
    Ok((bell, message_for(bell)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub message: Message,
    /// `None` when the photon was lost.
    pub decoded: Option<Message>,
    pub clicks: Option<DetectorPair>,
    pub seed: u64,
    pub shot_index: u64,
    pub n: u32,
    pub analyzer: AnalyzerKind,
}

impl RunOutcome {
    pub fn is_lost(&self) -> bool {
        self.clicks.is_none()
    }

    pub fn is_correct(&self) -> bool {
        self.decoded == Some(self.message)
    }
}

/// Analyzer distributions for all four messages at fixed `(kind, n)`.
#[derive(Clone, Debug)]
pub struct Session {
    kind: AnalyzerKind,
    n: u32,
    dists: Vec<AnalyzerDistribution>,
}

impl Session {
    pub fn new(kind: AnalyzerKind, n: u32) -> Result<Self> {
        let dists = Message::ALL
            .iter()
            .map(|m| analyze(kind, encode(*m), n))
            .collect::<Result<_>>()?;
        Ok(Self { kind, n, dists })
    }

    pub fn distribution(&self, message: Message) -> &AnalyzerDistribution {
        &self.dists[usize::from(message.0)]
    }

    fn sample_with<R: Rng + ?Sized>(&self, message: Message, rng: &mut R) -> (Option<DetectorPair>, Option<Message>) {
        match sample(self.distribution(message), rng).result {
            Detection::PhotonLost => (None, None),
            Detection::Clicks(c) => (Some(c), decode_for(self.kind, c).ok().map(|(_, m)| m)),
        }
    }

    /// One shot with the stream `(master_seed, shot_index)`.
    pub fn run(&self, message: Message, master_seed: u64, shot_index: u64) -> RunOutcome {
        let mut rng = shot_rng(master_seed, shot_index);
        let (clicks, decoded) = self.sample_with(message, &mut rng);
        RunOutcome {
            message,
            decoded,
            clicks,
            seed: master_seed,
            shot_index,
            n: self.n,
            analyzer: self.kind,
        }
    }
}

pub fn run_protocol(
    message: Message,
    kind: AnalyzerKind,
    n: u32,
    master_seed: u64,
    shot_index: u64,
) -> Result<RunOutcome> {
    Ok(Session::new(kind, n)?.run(message, master_seed, shot_index))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MessageSource {
    /// Each shot draws its message uniformly from its own stream.
    #[default]
    Uniform,
    Fixed(Message),
}

impl FromStr for MessageSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            Ok(MessageSource::Uniform)
        } else {
            s.parse().map(MessageSource::Fixed)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyEstimate {
    pub r_hat: f64,
    pub shots: u64,
    pub ci95: (f64, f64),
    /// Shots in which the photon was detected.
    pub survivors: u64,
    /// Surviving shots decoded to the wrong message.
    pub decode_errors: u64,
}

impl EfficiencyEstimate {
    pub fn lost_fraction(&self) -> f64 {
        (self.shots - self.survivors) as f64 / self.shots as f64
    }

    /// Standard error of `r_hat` from the binomial survival indicator.
    pub fn std_error(&self) -> f64 {
        let p = self.r_hat / 2.0;
        2.0 * (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    survivors: u64,
    correct: u64,
    errors: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            survivors: self.survivors + o.survivors,
            correct: self.correct + o.correct,
            errors: self.errors + o.errors,
        }
    }
}

const CHUNK: u64 = 4096;

/// Monte-Carlo estimate of the throughput with uniformly random messages.
pub fn simulate(kind: AnalyzerKind, n: u32, shots: u64, master_seed: u64) -> Result<EfficiencyEstimate> {
    simulate_with(kind, n, shots, master_seed, MessageSource::Uniform)
}

/// Shot `i` uses the stream `(master_seed, i)` alone, so the result does not
/// depend on how shots are spread over threads.
pub fn simulate_with(
    kind: AnalyzerKind,
    n: u32,
    shots: u64,
    master_seed: u64,
    source: MessageSource,
) -> Result<EfficiencyEstimate> {
    if shots == 0 {
        return Err(Error::InvalidRange { min: 1, max: 0 });
    }
    let session = Session::new(kind, n)?;
    let chunks = shots.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let mut rng = shot_rng(master_seed, i);
                let message = match source {
                    MessageSource::Uniform => Message(rng.random_range(0..4u8)),
                    MessageSource::Fixed(m) => m,
                };
                let (clicks, decoded) = session.sample_with(message, &mut rng);
                if clicks.is_some() {
                    t.survivors += 1;
                    if decoded == Some(message) {
                        t.correct += 1;
                    } else {
                        t.errors += 1;
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    let p = tally.correct as f64 / shots as f64;
    let half = 1.96 * 2.0 * (p * (1.0 - p) / shots as f64).sqrt();
    let r_hat = 2.0 * p;
    Ok(EfficiencyEstimate {
        r_hat,
        shots,
        ci95: ((r_hat - half).max(0.0), (r_hat + half).min(2.0)),
        survivors: tally.survivors,
        decode_errors: tally.errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::Detector::*;
    use crate::metrics::r_analytic;

    #[test]
    fn encode_table() {
        let want = [
            ("00", BellState::PHI_PLUS),
            ("01", BellState::PSI_PLUS),
            ("10", BellState::PHI_MINUS),
            ("11", BellState::PSI_MINUS),
        ];
        for (m, b) in want {
            let msg: Message = m.parse().unwrap();
            assert_eq!(encode(msg), b);
            assert_eq!(msg.to_string(), m);
            assert_eq!(message_for(b), msg);
        }
        assert!("2".parse::<Message>().is_err());
        assert!("011".parse::<Message>().is_err());
        assert!(Message::new(4).is_err());
    }

    #[test]
    fn decode_table() {
        let rows = [
            (D1, D3, BellState::PHI_MINUS, "10"),
            (D2, D3, BellState::PHI_PLUS, "00"),
            (D1, D4, BellState::PSI_MINUS, "11"),
            (D2, D4, BellState::PSI_PLUS, "01"),
            (D2, D6, BellState::PHI_MINUS, "10"),
            (D1, D6, BellState::PHI_PLUS, "00"),
            (D2, D5, BellState::PSI_MINUS, "11"),
            (D1, D5, BellState::PSI_PLUS, "01"),
        ];
        for (e, p, b, m) in rows {
            let (bell, msg) = decode(DetectorPair::new(e, p)).unwrap();
            assert_eq!(bell, b);
            assert_eq!(msg.to_string(), m);
        }
        assert!(decode(DetectorPair::new(D3, D1)).is_err());
    }

    #[test]
    fn high_n_always_delivers() {
        let s = Session::new(AnalyzerKind::Dqz, 100_000).unwrap();
        let m: Message = "01".parse().unwrap();
        let ok = (0..1000).filter(|i| s.run(m, 3, *i).decoded == Some(m)).count();
        assert!(ok >= 995);
    }

    #[test]
    fn single_cycle_loses_half() {
        let est = simulate_with(AnalyzerKind::Dqz, 1, 200_000, 5, MessageSource::Fixed(Message(2))).unwrap();
        assert!((est.lost_fraction() - 0.5).abs() < 0.005);
        assert_eq!(est.decode_errors, 0);
    }

    #[test]
    fn qz_two_cycles_mostly_lost() {
        let est = simulate(AnalyzerKind::Qz, 2, 200_000, 1).unwrap();
        let sigma = (0.9375 * 0.0625 / 200_000f64).sqrt();
        assert!((est.lost_fraction() - 0.9375).abs() < 3.0 * sigma);
    }

    #[test]
    fn estimate_is_consistent() {
        for seed in 1..=3 {
            let est = simulate(AnalyzerKind::Dqz, 12, 100_000, seed).unwrap();
            let r = r_analytic(AnalyzerKind::Dqz, 12).unwrap();
            let band = 3.0 * (r * (2.0 - r) / 100_000f64).sqrt();
            assert!((est.r_hat - r).abs() <= band * 1.01, "seed {seed}: {}", est.r_hat);
            assert!(est.ci95.0 <= est.r_hat && est.r_hat <= est.ci95.1);
        }
    }

    #[test]
    fn deterministic_across_pools() {
        let a = simulate(AnalyzerKind::Ifm, 24, 50_000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate(AnalyzerKind::Ifm, 24, 50_000, 9).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.r_hat.to_bits(), b.r_hat.to_bits());
    }

    #[test]
    fn run_outcome_metadata() {
        let r = run_protocol(Message(3), AnalyzerKind::Qz, 71, 42, 17).unwrap();
        assert_eq!((r.seed, r.shot_index, r.n), (42, 17, 71));
        assert_eq!(r.decoded.is_some(), r.clicks.is_some());
        assert!(simulate(AnalyzerKind::Qz, 2, 0, 1).is_err());
    }
}
