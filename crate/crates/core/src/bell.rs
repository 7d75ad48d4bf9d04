//! Bell states of the electron–photon pair.
//!
//! The composite basis is the binary ordering `|e⟩|p⟩` with
//! `|block⟩ = |0⟩_e`, `|pass⟩ = |1⟩_e`, `|V⟩ = |0⟩_p`, `|H⟩ = |1⟩_p`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantum::{re, PureState};

/// `(block,V), (block,H), (pass,V), (pass,H)` = |00⟩, |01⟩, |10⟩, |11⟩.
pub const COMPOSITE_LABELS: [&str; 4] = ["block,V", "block,H", "pass,V", "pass,H"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Phi,
    Psi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BellState {
    pub family: Family,
    pub sign: Sign,
}

impl BellState {
    pub const PHI_PLUS: BellState = BellState {
        family: Family::Phi,
        sign: Sign::Plus,
    };
    pub const PHI_MINUS: BellState = BellState {
        family: Family::Phi,
        sign: Sign::Minus,
    };
    pub const PSI_PLUS: BellState = BellState {
        family: Family::Psi,
        sign: Sign::Plus,
    };
    pub const PSI_MINUS: BellState = BellState {
        family: Family::Psi,
        sign: Sign::Minus,
    };

    pub const ALL: [BellState; 4] = [Self::PHI_PLUS, Self::PHI_MINUS, Self::PSI_PLUS, Self::PSI_MINUS];

    /// Φ± = (|00⟩ ± |11⟩)/√2, Ψ± = (|01⟩ ± |10⟩)/√2 in the binary basis.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        let s = self.sign.factor() * h;
        match self.family {
            Family::Phi => [h, 0.0, 0.0, s],
            Family::Psi => [0.0, h, s, 0.0],
        }
    }

    pub fn ket(self) -> PureState {
        self.ket_with_labels(COMPOSITE_LABELS.to_vec())
    }

    /// Same amplitudes over another two-qubit labeling (e.g. `C,T`).
    pub fn ket_with_labels<S: Into<String>>(self, labels: Vec<S>) -> PureState {
        PureState::new(labels, self.amplitudes().iter().map(|&x| re(x)).collect()).expect("four labels")
    }

    /// `i` of the per-cycle channel: 1 for Φ±, 0 for Ψ±.
    pub fn channel_index(self) -> u8 {
        match self.family {
            Family::Phi => 1,
            Family::Psi => 0,
        }
    }

    /// Separable state after the DQZ gate:
    /// `(|block⟩ ± (−1)^m |pass⟩)/√2 ⊗ |V⟩` for Φ±, `⊗ |H⟩` for Ψ±.
    pub fn dqz_separable_target(self, m: u8) -> PureState {
        let h = FRAC_1_SQRT_2;
        let s = self.sign.factor() * if m.is_multiple_of(2) { 1.0 } else { -1.0 } * h;
        let amps = match self.family {
            Family::Phi => [h, 0.0, s, 0.0],
            Family::Psi => [0.0, h, 0.0, s],
        };
        PureState::new(COMPOSITE_LABELS.to_vec(), amps.iter().map(|&x| re(x)).collect()).expect("four labels")
    }

    pub fn name(self) -> &'static str {
        match (self.family, self.sign) {
            (Family::Phi, Sign::Plus) => "phi+",
            (Family::Phi, Sign::Minus) => "phi-",
            (Family::Psi, Sign::Plus) => "psi+",
            (Family::Psi, Sign::Minus) => "psi-",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" | "Φ+" | "phi_plus" => Ok(Self::PHI_PLUS),
            "phi-" | "Φ-" | "phi_minus" => Ok(Self::PHI_MINUS),
            "psi+" | "Ψ+" | "psi_plus" => Ok(Self::PSI_PLUS),
            "psi-" | "Ψ-" | "psi_minus" => Ok(Self::PSI_MINUS),
            _ => Err(Error::Parse {
                kind: "Bell state",
                input: s.into(),
            }),
        }
    }
}
