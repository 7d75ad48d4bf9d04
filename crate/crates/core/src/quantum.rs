//! Dense complex linear algebra over small labeled Hilbert spaces.
//!
//! States carry their basis labels explicitly. Composite labels are formed by
//! joining component labels with a comma, so `tensor(|pass⟩, |H⟩)` has the
//! single label `"pass,H"`.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Largest Hilbert-space dimension any state or operator may have.
pub const MAX_DIM: usize = 16;

/// Tolerance for algebraic identities (unitarity, normalization).
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Tolerance for quantities accumulated over many cycles.
pub const ACCUMULATED_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    labels: Vec<String>,
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Builds a state from labels and amplitudes. The state need not be
    /// normalized; unnormalized states carry survival weight in their norm.
    pub fn new<S: Into<String>>(labels: Vec<S>, amps: Vec<Amplitude>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                actual: amps.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::InvalidState("empty basis".into()));
        }
        if labels.len() > MAX_DIM {
            return Err(Error::DimensionOverflow(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidState(format!("duplicate basis label {l:?}")));
            }
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { labels, amps })
    }

    /// The basis ket `labels[index]`.
    pub fn basis<S: Into<String>>(labels: Vec<S>, index: usize) -> Result<Self> {
        let n = labels.len();
        if index >= n {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = ONE;
        Self::new(labels, amps)
    }

    /// Basis ket selected by label.
    pub fn basis_label<S: Into<String>>(labels: Vec<S>, label: &str) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let idx = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidState(format!("unknown label {label:?}")))?;
        Self::basis(labels, idx)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn amplitude(&self, label: &str) -> Option<Amplitude> {
        self.index_of(label).map(|i| self.amps[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= ALGEBRA_TOL
    }

    /// Rescales to unit norm. Fails on a numerically zero vector
    /// (`norm² ≤ ALGEBRA_TOL²`).
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= ALGEBRA_TOL * ALGEBRA_TOL {
            return Err(Error::NotNormalized(n));
        }
        let s = 1.0 / n.sqrt();
        Ok(Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * s).collect(),
        })
    }

    /// ⟨self|other⟩. Both states must share the same basis.
    pub fn inner(&self, other: &PureState) -> Result<Amplitude> {
        if self.labels != other.labels {
            return Err(Error::InvalidState("inner product across different bases".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|² for normalized states.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Adds amplitudes componentwise (same basis).
    pub fn add(&self, other: &PureState) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, factor: Amplitude) -> Self {
        Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    fn zip_with(&self, other: &PureState, f: impl Fn(Amplitude, Amplitude) -> Amplitude) -> Result<Self> {
        if self.labels != other.labels {
            return Err(Error::InvalidState("mismatched bases".into()));
        }
        Ok(Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Amplitude] {
        &mut self.amps
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (l, a) in self.labels.iter().zip(&self.amps) {
            if a.norm_sqr() < 1e-24 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)|{l}⟩", a.re, a.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Builds a real matrix from row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| re(x)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, v: Amplitude) {
        self.entries[row * self.dim + col] = v;
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Ok(Operator { dim: n, entries: out })
    }

    pub fn transpose(&self) -> Operator {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j];
            }
        }
        Operator { dim: n, entries: out }
    }

    pub fn adjoint(&self) -> Operator {
        let mut t = self.transpose();
        t.entries.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    /// `self^power` by repeated squaring; `power = 0` gives the identity.
    pub fn pow(&self, mut power: u64) -> Operator {
        let mut result = Operator::identity(self.dim);
        let mut base = self.clone();
        while power > 0 {
            if power & 1 == 1 {
                result = result.matmul(&base).expect("same dimension");
            }
            power >>= 1;
            if power > 0 {
                base = base.matmul(&base).expect("same dimension");
            }
        }
        result
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Operator) -> Result<Operator> {
        let n = self.dim * rhs.dim;
        if n > MAX_DIM {
            return Err(Error::DimensionOverflow(n));
        }
        let mut out = vec![ZERO; n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                for k in 0..rhs.dim {
                    for l in 0..rhs.dim {
                        out[(i * rhs.dim + k) * n + (j * rhs.dim + l)] = a * rhs.get(k, l);
                    }
                }
            }
        }
        Ok(Operator { dim: n, entries: out })
    }

    /// Direct sum: `self` on the leading block, `rhs` on the trailing block.
    pub fn direct_sum(&self, rhs: &Operator) -> Result<Operator> {
        let n = self.dim + rhs.dim;
        if n > MAX_DIM {
            return Err(Error::DimensionOverflow(n));
        }
        let mut out = Operator {
            dim: n,
            entries: vec![ZERO; n * n],
        };
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..rhs.dim {
            for j in 0..rhs.dim {
                out.set(self.dim + i, self.dim + j, rhs.get(i, j));
            }
        }
        Ok(out)
    }

    /// max |(O†O − I)_ij|
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul(self).expect("same dimension");
        max_abs_diff(&g, &Operator::identity(self.dim))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < ALGEBRA_TOL
    }

    pub fn apply(&self, v: &[Amplitude]) -> Result<Vec<Amplitude>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.entries[i * n + j] * v[j]).sum())
            .collect())
    }
}

/// max |a_ij − b_ij|; panics on mismatched dimensions.
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.dim, b.dim, "operator dimensions differ");
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Density operator of the retained (not lost) part of a system plus the
/// probability that the probe photon was lost.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<String>,
    matrix: Operator,
    lost_weight: f64,
}

impl DensityMatrix {
    pub fn from_pure(state: &PureState) -> Result<Self> {
        if !state.is_normalized() {
            return Err(Error::NotNormalized(state.norm_sqr()));
        }
        Ok(Self::outer(state, 0.0))
    }

    /// `|ψ⟩⟨ψ|` of a possibly unnormalized ket, with the missing weight
    /// `1 − ⟨ψ|ψ⟩` booked as lost.
    pub fn from_subnormalized(state: &PureState) -> Result<Self> {
        let n = state.norm_sqr();
        if n > 1.0 + ACCUMULATED_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self::outer(state, (1.0 - n).max(0.0)))
    }

    fn outer(state: &PureState, lost_weight: f64) -> Self {
        let n = state.dim();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = state.amps[i] * state.amps[j].conj();
            }
        }
        Self {
            labels: state.labels.clone(),
            matrix: Operator { dim: n, entries },
            lost_weight,
        }
    }

    /// Builds and validates a density matrix from explicit parts.
    pub fn from_parts(labels: Vec<String>, matrix: Operator, lost_weight: f64) -> Result<Self> {
        if labels.len() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                actual: labels.len(),
            });
        }
        let rho = Self {
            labels,
            matrix,
            lost_weight,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<String>, matrix: Operator, lost_weight: f64) -> Self {
        Self {
            labels,
            matrix,
            lost_weight,
        }
    }

    /// Checks Hermiticity, positivity and `trace + lost = 1`.
    pub fn validate(&self) -> Result<()> {
        if self.hermiticity_defect() > ALGEBRA_TOL {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        if !(0.0..=1.0).contains(&self.lost_weight) {
            return Err(Error::InvalidState(format!(
                "lost weight {} outside [0,1]",
                self.lost_weight
            )));
        }
        let total = self.trace() + self.lost_weight;
        if (total - 1.0).abs() > ACCUMULATED_TOL {
            return Err(Error::InvalidState(format!("trace + lost weight = {total}")));
        }
        if !self.is_positive_semidefinite(ACCUMULATED_TOL) {
            return Err(Error::InvalidState("density matrix has a negative eigenvalue".into()));
        }
        Ok(())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn lost_weight(&self) -> f64 {
        self.lost_weight
    }

    /// Real part of the trace of the retained block.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    /// Cholesky factorization of `ρ + tol·I`; succeeds iff every eigenvalue
    /// of `ρ` is at least `−tol` (up to rounding).
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim();
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = self.matrix.get(j, j).re + tol;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d < 0.0 {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = re(djj);
            for i in (j + 1)..n {
                let mut s = self.matrix.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = if djj > 0.0 { s / djj } else { ZERO };
            }
        }
        true
    }

    /// `U ρ U†`, leaving the lost weight untouched.
    pub fn conjugate_by(&self, op: &Operator) -> Result<Self> {
        let m = op.matmul(&self.matrix)?.matmul(&op.adjoint())?;
        Ok(Self {
            labels: self.labels.clone(),
            matrix: m,
            lost_weight: self.lost_weight,
        })
    }

    /// Diagonal entry for a basis label (a population).
    pub fn population(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.matrix.get(i, i).re)
    }

    /// `⟨ψ|ρ|ψ⟩ / tr ρ`: fidelity of the renormalized retained state with a
    /// normalized pure target.
    pub fn fidelity_with(&self, target: &PureState) -> Result<f64> {
        if target.labels != self.labels {
            return Err(Error::InvalidState("fidelity across different bases".into()));
        }
        let tr = self.trace();
        if tr <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState("empty retained state".into()));
        }
        let rv = self.matrix.apply(target.amps())?;
        let f: Amplitude = target.amps().iter().zip(&rv).map(|(a, b)| a.conj() * b).sum();
        Ok(f.re / tr)
    }
}

/// Finite list of labeled outcome probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<L = String> {
    entries: Vec<(L, f64)>,
}

impl<L> OutcomeDistribution<L> {
    /// Validates probabilities in `[0,1]` summing to one within
    /// [`ACCUMULATED_TOL`]. Rounding noise below zero is clamped.
    pub fn new(entries: Vec<(L, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        let mut out = Vec::with_capacity(entries.len());
        let mut total = 0.0;
        for (label, p) in entries {
            if !p.is_finite() || !(-ACCUMULATED_TOL..=1.0 + ACCUMULATED_TOL).contains(&p) {
                return Err(Error::InvalidDistribution(format!("probability {p} outside [0,1]")));
            }
            let p = p.clamp(0.0, 1.0);
            total += p;
            out.push((label, p));
        }
        if (total - 1.0).abs() > ACCUMULATED_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { entries: out })
    }

    pub fn entries(&self) -> &[(L, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.entries.iter().map(|(l, p)| (l, *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Sum of probabilities over outcomes matching `pred`.
    pub fn probability_where(&self, pred: impl Fn(&L) -> bool) -> f64 {
        self.entries.iter().filter(|(l, _)| pred(l)).map(|(_, p)| p).sum()
    }

    pub fn map_labels<M>(self, f: impl Fn(L) -> M) -> OutcomeDistribution<M> {
        OutcomeDistribution {
            entries: self.entries.into_iter().map(|(l, p)| (f(l), p)).collect(),
        }
    }
}

impl<L: PartialEq> OutcomeDistribution<L> {
    pub fn probability(&self, label: &L) -> f64 {
        self.probability_where(|l| l == label)
    }
}

impl OutcomeDistribution<String> {
    pub fn prob(&self, label: &str) -> f64 {
        self.probability_where(|l| l == label)
    }
}

/// Tensor product with labels `"a_label,b_label"`.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let dim = a.dim() * b.dim();
    if dim > MAX_DIM {
        return Err(Error::DimensionOverflow(dim));
    }
    for s in [a, b] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized(s.norm_sqr()));
        }
    }
    let mut labels = Vec::with_capacity(dim);
    let mut amps = Vec::with_capacity(dim);
    for (la, xa) in a.labels.iter().zip(&a.amps) {
        for (lb, xb) in b.labels.iter().zip(&b.amps) {
            labels.push(format!("{la},{lb}"));
            amps.push(xa * xb);
        }
    }
    PureState::new(labels, amps)
}

pub fn apply_operator(op: &Operator, s: &PureState) -> Result<PureState> {
    let amps = op.apply(s.amps())?;
    Ok(PureState {
        labels: s.labels.clone(),
        amps,
    })
}

/// Hadamard on the (block, pass) electron basis.
pub fn hadamard() -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_real(2, &[h, h, h, -h]).expect("2x2")
}

/// Probability of each named cell of a partition of the basis labels.
pub fn measure(s: &PureState, partition: &[(&str, &[&str])]) -> Result<OutcomeDistribution> {
    if !s.is_normalized() {
        return Err(Error::NotNormalized(s.norm_sqr()));
    }
    let mut seen = vec![false; s.dim()];
    let mut entries = Vec::with_capacity(partition.len());
    for (name, members) in partition {
        let mut p = 0.0;
        for m in *members {
            let i = s
                .index_of(m)
                .ok_or_else(|| Error::InvalidPartition(format!("unknown label {m:?}")))?;
            if seen[i] {
                return Err(Error::InvalidPartition(format!("label {m:?} appears twice")));
            }
            seen[i] = true;
            p += s.amps[i].norm_sqr();
        }
        entries.push(((*name).to_string(), p));
    }
    if let Some(i) = seen.iter().position(|x| !x) {
        return Err(Error::InvalidPartition(format!("label {:?} not covered", s.labels[i])));
    }
    OutcomeDistribution::new(entries)
}

/// Partition by the `component`-th comma-separated factor of each label,
/// i.e. a measurement of one subsystem of a product basis.
pub fn measure_subsystem(s: &PureState, component: usize) -> Result<OutcomeDistribution> {
    let mut cells: Vec<(String, Vec<&str>)> = Vec::new();
    for l in &s.labels {
        let key = l
            .split(',')
            .nth(component)
            .ok_or_else(|| Error::InvalidPartition(format!("label {l:?} has no component {component}")))?;
        match cells.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => v.push(l),
            None => cells.push((key.to_string(), vec![l])),
        }
    }
    let partition: Vec<(&str, &[&str])> = cells.iter().map(|(k, v)| (k.as_str(), v.as_slice())).collect();
    measure(s, &partition)
}

/// Per-shot random stream: ChaCha8 keyed by the master seed with the shot
/// index as stream id, so any shot can be replayed independently.
pub fn shot_rng(master_seed: u64, shot_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(shot_index);
    rng
}

/// Inverse-CDF draw over the listed order.
pub fn sample<'a, L, R: Rng + ?Sized>(dist: &'a OutcomeDistribution<L>, rng: &mut R) -> &'a L {
    let u: f64 = rng.random::<f64>() * dist.total();
    let mut cum = 0.0;
    for (label, p) in &dist.entries {
        cum += p;
        if u < cum {
            return label;
        }
    }
    // u landed in the rounding gap above the last boundary
    &dist
        .entries
        .iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .unwrap_or(&dist.entries[dist.entries.len() - 1])
        .0
}
