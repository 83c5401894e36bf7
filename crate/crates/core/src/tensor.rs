//! Box-shape tensors for pure multipartite states, density matrices and
//! pure-state decompositions.
//!
//! Amplitudes are stored row-major with the last party varying fastest, so the
//! entry at multi-index `(i_1, ..., i_m)` lives at
//! `sum_j i_j * prod_{t > j} N_t`. All indices are 0-based.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance on `|sum |a|^2 - 1|` for a state to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance used by the density-matrix invariants.
pub const DENSITY_TOL: f64 = 1e-10;
/// Squared-norm window inside which `normalize` leaves amplitudes untouched.
/// Keeps normalization idempotent bit for bit.
const UNIT_WINDOW: f64 = 8.0 * f64::EPSILON;

/// Party dimensions `N_1 x ... x N_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::Dimension("at least one party is required".into()));
        }
        if let Some(j) = dims.iter().position(|&n| n < 2) {
            return Err(Error::Dimension(format!(
                "party {j} has dimension {} (must be >= 2)",
                dims[j]
            )));
        }
        dims.iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Dimension("total dimension overflows".into()))?;
        Ok(Dims(dims))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of parties `m`.
    pub fn parties(&self) -> usize {
        self.0.len()
    }

    /// Total dimension `prod N_j`.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Row-major strides; the last party has stride 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for j in (0..self.0.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.0[j + 1];
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> Result<usize> {
        flat_index(multi, self)
    }

    /// Inverse of [`flat_index`].
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.0.len()];
        for j in (0..self.0.len()).rev() {
            out[j] = flat % self.0[j];
            flat /= self.0[j];
        }
        out
    }

    /// Dimension of the subsystem formed by `slots`.
    pub fn subsystem_dim(&self, slots: &[usize]) -> usize {
        slots.iter().map(|&j| self.0[j]).product()
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Dims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let dims = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Dimension(format!("cannot parse {p:?} as a dimension")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dims::new(dims)
    }
}

impl<'de> Deserialize<'de> for Dims {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<usize>::deserialize(d)?;
        Dims::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Row-major linear offset of `multi` (last slot fastest).
pub fn flat_index(multi: &[usize], dims: &Dims) -> Result<usize> {
    if multi.len() != dims.parties() || multi.iter().zip(&dims.0).any(|(&i, &n)| i >= n) {
        return Err(Error::Index {
            index: multi.to_vec(),
            dims: dims.0.clone(),
        });
    }
    Ok(multi
        .iter()
        .zip(&dims.0)
        .fold(0, |acc, (&i, &n)| acc * n + i))
}

/// Amplitudes of a pure state as an m-dimensional box-shape array.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxTensor {
    dims: Dims,
    amps: Vec<Complex64>,
}

/// Builds a state from row-major amplitudes, optionally rescaling to unit norm.
pub fn make_state(dims: Dims, amps: Vec<Complex64>, normalize: bool) -> Result<BoxTensor> {
    let state = BoxTensor::new(dims, amps)?;
    if normalize {
        state.normalized()
    } else {
        Ok(state)
    }
}

impl BoxTensor {
    pub fn new(dims: Dims, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::Dimension(format!(
                "dims {dims} need {} amplitudes, got {}",
                dims.total(),
                amps.len()
            )));
        }
        Ok(BoxTensor { dims, amps })
    }

    /// The basis product state `|i_1 ... i_m>`.
    pub fn basis(dims: Dims, multi: &[usize]) -> Result<Self> {
        let idx = dims.flat_index(multi)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(BoxTensor { dims, amps })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amp(&self, multi: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.dims.flat_index(multi)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() <= NORMALIZATION_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized(n))
        }
    }

    /// Returns the unit-norm rescaling of the state. States whose squared norm
    /// is already within a few ulps of one are returned unchanged.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::DegenerateState);
        }
        if (n2 - 1.0).abs() <= UNIT_WINDOW {
            return Ok(self.clone());
        }
        let inv = 1.0 / n2.sqrt();
        Ok(BoxTensor {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * inv).collect(),
        })
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        BoxTensor {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * phase).collect(),
        }
    }

    /// Reorders the tensor axes: new axis `t` is old axis `perm[t]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self> {
        let m = self.dims.parties();
        let mut seen = vec![false; m];
        if perm.len() != m
            || perm
                .iter()
                .any(|&p| p >= m || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Dimension(format!(
                "{perm:?} is not a permutation of {m} axes"
            )));
        }
        let new_dims = Dims(perm.iter().map(|&p| self.dims.0[p]).collect());
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let old_strides = self.dims.strides();
        for (flat, slot) in amps.iter_mut().enumerate() {
            let new_multi = new_dims.multi_index(flat);
            let old_flat: usize = new_multi
                .iter()
                .zip(perm)
                .map(|(&i, &p)| i * old_strides[p])
                .sum();
            *slot = self.amps[old_flat];
        }
        Ok(BoxTensor {
            dims: new_dims,
            amps,
        })
    }

    /// Relabels the local basis of `party`: old label `i` becomes `perm[i]`.
    pub fn relabel_party(&self, party: usize, perm: &[usize]) -> Result<Self> {
        let n = *self
            .dims
            .0
            .get(party)
            .ok_or_else(|| Error::Dimension(format!("no party {party}")))?;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Dimension(format!(
                "{perm:?} is not a permutation of {n} labels"
            )));
        }
        let stride = self.dims.strides()[party];
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (flat, &a) in self.amps.iter().enumerate() {
            let i = (flat / stride) % n;
            amps[flat - i * stride + perm[i] * stride] = a;
        }
        Ok(BoxTensor {
            dims: self.dims.clone(),
            amps,
        })
    }

    /// `|psi><psi|` as a dense matrix.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let v = DVector::from_column_slice(&self.amps);
        &v * v.adjoint()
    }
}

/// Outer product of per-party vectors: entry `(i_1..i_m)` is `prod_j f_j[i_j]`.
pub fn segre_embed(factors: &[Vec<Complex64>]) -> Result<BoxTensor> {
    let dims = Dims::new(factors.iter().map(Vec::len).collect::<Vec<_>>())?;
    if let Some(j) = factors
        .iter()
        .position(|f| f.iter().all(|a| a.norm_sqr() == 0.0))
    {
        return Err(Error::DegenerateFactor(j));
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for factor in factors {
        amps = amps
            .iter()
            .flat_map(|&a| factor.iter().map(move |&b| a * b))
            .collect();
    }
    Ok(BoxTensor { dims, amps })
}

fn validate_subset(dims: &Dims, subset: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let m = dims.parties();
    let mut inside = vec![false; m];
    for &j in subset {
        if j >= m {
            return Err(Error::Subset(format!(
                "slot {j} out of range for {m} parties"
            )));
        }
        if inside[j] {
            return Err(Error::Subset(format!("slot {j} repeated")));
        }
        inside[j] = true;
    }
    if subset.is_empty() || subset.len() == m {
        return Err(Error::Subset("subset must be nonempty and proper".into()));
    }
    let a: Vec<usize> = (0..m).filter(|&j| inside[j]).collect();
    let b: Vec<usize> = (0..m).filter(|&j| !inside[j]).collect();
    Ok((a, b))
}

/// Reshapes the state into a `d_A x d_B` matrix with the `subset` slots as rows.
fn bipartition_matrix(state: &BoxTensor, a: &[usize], b: &[usize]) -> DMatrix<Complex64> {
    let dims = state.dims();
    let (da, db) = (dims.subsystem_dim(a), dims.subsystem_dim(b));
    let mut mat = DMatrix::zeros(da, db);
    for (flat, &amp) in state.amps().iter().enumerate() {
        let multi = dims.multi_index(flat);
        let row = a.iter().fold(0, |acc, &j| acc * dims.0[j] + multi[j]);
        let col = b.iter().fold(0, |acc, &j| acc * dims.0[j] + multi[j]);
        mat[(row, col)] = amp;
    }
    mat
}

/// Reduced density matrix of the parties in `subset`.
pub fn reduced_density(state: &BoxTensor, subset: &[usize]) -> Result<DMatrix<Complex64>> {
    let (a, b) = validate_subset(state.dims(), subset)?;
    let mat = bipartition_matrix(state, &a, &b);
    Ok(&mat * mat.adjoint())
}

/// `Tr(rho_A^2)` for the parties `A = subset`.
pub fn reduced_purity(state: &BoxTensor, subset: &[usize]) -> Result<f64> {
    state.ensure_normalized()?;
    let rho_a = reduced_density(state, subset)?;
    Ok(rho_a.iter().map(|z| z.norm_sqr()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    Bell,
    Ghz,
    W,
    BasisProduct,
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bell" => Ok(NamedState::Bell),
            "ghz" => Ok(NamedState::Ghz),
            "w" => Ok(NamedState::W),
            "basis-product" | "product" => Ok(NamedState::BasisProduct),
            other => Err(Error::UnsupportedState(format!(
                "unknown state name {other:?}"
            ))),
        }
    }
}

/// Canonical normalized named states.
///
/// `Bell` is `sum_i |ii>/sqrt(N)` and needs two equal parties. `Ghz` and `W`
/// need at least two qubits. `BasisProduct` is `|0...0>` for any dims.
pub fn named_state(name: NamedState, dims: &Dims) -> Result<BoxTensor> {
    let m = dims.parties();
    let all_qubits = dims.as_slice().iter().all(|&n| n == 2);
    let zero = Complex64::new(0.0, 0.0);
    let mut amps = vec![zero; dims.total()];
    match name {
        NamedState::Bell => {
            if m != 2 || dims.0[0] != dims.0[1] {
                return Err(Error::UnsupportedState(format!(
                    "bell needs two parties of equal dimension, got {dims}"
                )));
            }
            let n = dims.0[0];
            let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
            for i in 0..n {
                amps[i * n + i] = a;
            }
        }
        NamedState::Ghz => {
            if m < 2 || !all_qubits {
                return Err(Error::UnsupportedState(format!(
                    "ghz needs two or more qubits, got {dims}"
                )));
            }
            let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[0] = a;
            amps[dims.total() - 1] = a;
        }
        NamedState::W => {
            if m < 2 || !all_qubits {
                return Err(Error::UnsupportedState(format!(
                    "w needs two or more qubits, got {dims}"
                )));
            }
            let a = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
            for j in 0..m {
                amps[1 << j] = a;
            }
        }
        NamedState::BasisProduct => amps[0] = Complex64::new(1.0, 0.0),
    }
    Ok(BoxTensor {
        dims: dims.clone(),
        amps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    HaarPure,
    Product,
    /// Convex mixture of `rank` Haar-random projectors with uniform random weights.
    Mixed {
        rank: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampledState {
    Pure(BoxTensor),
    Mixed(DensityMatrix),
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard-normal vector, normalized.
pub(crate) fn haar_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

pub fn random_pure(dims: &Dims, seed: u64) -> BoxTensor {
    let mut rng = seeded_rng(seed);
    BoxTensor {
        dims: dims.clone(),
        amps: haar_vector(&mut rng, dims.total()),
    }
}

pub fn random_product(dims: &Dims, seed: u64) -> BoxTensor {
    let mut rng = seeded_rng(seed);
    let factors: Vec<Vec<Complex64>> = dims
        .as_slice()
        .iter()
        .map(|&n| haar_vector(&mut rng, n))
        .collect();
    segre_embed(&factors).expect("haar factors are nonzero")
}

pub fn random_mixed(dims: &Dims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 {
        return Err(Error::Config("mixed state rank must be >= 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let n = dims.total();
    let weights: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = DMatrix::zeros(n, n);
    for w in weights {
        let v = DVector::from_vec(haar_vector(&mut rng, n));
        rho += (&v * v.adjoint()) * Complex64::new(w / total, 0.0);
    }
    DensityMatrix::new(dims.clone(), rho)
}

pub fn random_state(kind: RandomKind, dims: &Dims, seed: u64) -> Result<SampledState> {
    Ok(match kind {
        RandomKind::HaarPure => SampledState::Pure(random_pure(dims, seed)),
        RandomKind::Product => SampledState::Pure(random_product(dims, seed)),
        RandomKind::Mixed { rank } => SampledState::Mixed(random_mixed(dims, rank, seed)?),
    })
}

/// A validated density operator on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Dims,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks hermiticity, unit trace and positivity, each within [`DENSITY_TOL`].
    pub fn new(dims: Dims, entries: DMatrix<Complex64>) -> Result<Self> {
        let n = dims.total();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Dimension(format!(
                "dims {dims} need a {n}x{n} matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm_dev = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (entries[(i, j)] - entries[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if herm_dev > DENSITY_TOL {
            return Err(Error::DensityMatrix(format!(
                "not Hermitian (deviation {herm_dev:e})"
            )));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(Error::DensityMatrix(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let min_eig = hermitian_part(&entries)
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DENSITY_TOL {
            return Err(Error::DensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(DensityMatrix { dims, entries })
    }

    pub fn from_pure(state: &BoxTensor) -> Result<Self> {
        state.ensure_normalized()?;
        Ok(DensityMatrix {
            dims: state.dims().clone(),
            entries: state.projector(),
        })
    }

    pub fn maximally_mixed(dims: &Dims) -> Self {
        let n = dims.total();
        DensityMatrix {
            dims: dims.clone(),
            entries: DMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0),
        }
    }

    /// Two-qubit Werner state `p |Phi+><Phi+| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "werner mixing parameter {p} outside [0, 1]"
            )));
        }
        let dims = Dims::new(vec![2, 2])?;
        let bell = named_state(NamedState::Bell, &dims)?;
        let entries = bell.projector() * Complex64::new(p, 0.0)
            + DMatrix::identity(4, 4) * Complex64::new((1.0 - p) / 4.0, 0.0);
        DensityMatrix::new(dims, entries)
    }

    /// Convex combination `sum_i w_i rho_i`; weights must be positive and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::DensityMatrix("empty mixture".into()))?;
        let mut acc = DMatrix::zeros(first.entries.nrows(), first.entries.ncols());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::Dimension(
                    "mixture components have different dims".into(),
                ));
            }
            if *w < 0.0 {
                return Err(Error::DensityMatrix(format!("negative mixing weight {w}")));
            }
            acc += &rho.entries * Complex64::new(*w, 0.0);
        }
        DensityMatrix::new(first.dims.clone(), acc)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }
}

/// `(A + A^dag)/2`, which removes rounding-level anti-Hermitian noise before
/// calling a Hermitian eigensolver.
pub(crate) fn hermitian_part(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Pure-state ensemble `{p_i, psi_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    states: Vec<BoxTensor>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<BoxTensor>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::Decomposition(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|&&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::Decomposition(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::Decomposition(format!("weights sum to {total}")));
        }
        let dims = states[0].dims();
        for s in &states {
            if s.dims() != dims {
                return Err(Error::Decomposition("states have different dims".into()));
            }
            s.ensure_normalized()?;
        }
        Ok(Decomposition { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[BoxTensor] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dims(&self) -> &Dims {
        self.states[0].dims()
    }

    /// `sum_i p_i |psi_i><psi_i|`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.dims().total();
        self.weights
            .iter()
            .zip(&self.states)
            .fold(DMatrix::zeros(n, n), |acc, (&p, s)| {
                acc + s.projector() * Complex64::new(p, 0.0)
            })
    }

    /// Largest elementwise deviation between the mixture and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.reconstruct() - rho.entries())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn dims(d: &[usize]) -> Dims {
        Dims::new(d.to_vec()).unwrap()
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(vec![]).is_err());
        assert!(Dims::new(vec![2, 1]).is_err());
        assert_eq!(dims(&[2, 3, 4]).total(), 24);
        assert_eq!(dims(&[2, 3, 4]).strides(), vec![12, 4, 1]);
        assert_eq!("2, 3".parse::<Dims>().unwrap(), dims(&[2, 3]));
        assert!("2,x".parse::<Dims>().is_err());
    }

    #[test]
    fn make_state_examples() {
        let s = make_state(dims(&[2, 2]), vec![c(1.0), c(0.0), c(0.0), c(0.0)], true).unwrap();
        assert_eq!(s.amps()[0], c(1.0));
        assert!(s.amps()[1..].iter().all(|a| *a == c(0.0)));

        let s = make_state(dims(&[2, 2]), vec![c(1.0), c(0.0), c(0.0), c(1.0)], true).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amps()[0].re - h).abs() < 1e-15);
        assert!((s.amps()[3].re - h).abs() < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);

        assert!(matches!(
            make_state(dims(&[2, 2]), vec![c(1.0); 3], false),
            Err(Error::Dimension(_))
        ));
        assert_eq!(
            make_state(dims(&[2, 2]), vec![c(0.0); 4], true),
            Err(Error::DegenerateState)
        );
    }

    #[test]
    fn flat_index_examples() {
        assert_eq!(flat_index(&[0, 0], &dims(&[2, 2])).unwrap(), 0);
        assert_eq!(flat_index(&[1, 1], &dims(&[2, 2])).unwrap(), 3);
        assert_eq!(flat_index(&[1, 0, 1], &dims(&[2, 2, 2])).unwrap(), 5);
        assert!(matches!(
            flat_index(&[2, 0], &dims(&[2, 2])),
            Err(Error::Index { .. })
        ));
        assert!(flat_index(&[0], &dims(&[2, 2])).is_err());
    }

    #[test]
    fn flat_index_is_bijective() {
        for d in [
            vec![2, 2],
            vec![3, 2, 4],
            vec![2, 2, 2, 2, 2],
            vec![4, 4, 4, 4, 4, 4],
        ] {
            let d = Dims::new(d).unwrap();
            let mut hit = vec![false; d.total()];
            for flat in 0..d.total() {
                let multi = d.multi_index(flat);
                let back = d.flat_index(&multi).unwrap();
                assert_eq!(back, flat);
                assert!(!hit[back]);
                hit[back] = true;
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn segre_embed_examples() {
        let s = segre_embed(&[vec![c(1.0), c(0.0)], vec![c(1.0), c(0.0)]]).unwrap();
        assert_eq!(s.amps(), &[c(1.0), c(0.0), c(0.0), c(0.0)]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = segre_embed(&[vec![c(h), c(h)], vec![c(1.0), c(0.0)]]).unwrap();
        assert_eq!(s.amp(&[0, 0]).unwrap(), c(h));
        assert_eq!(s.amp(&[1, 0]).unwrap(), c(h));
        assert_eq!(s.amp(&[0, 1]).unwrap(), c(0.0));
        assert_eq!(s.amp(&[1, 1]).unwrap(), c(0.0));

        assert_eq!(
            segre_embed(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(0.0)]]),
            Err(Error::DegenerateFactor(1))
        );
    }

    #[test]
    fn reduced_purity_examples() {
        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        assert!((reduced_purity(&bell, &[0]).unwrap() - 0.5).abs() < 1e-15);
        let ghz = named_state(NamedState::Ghz, &dims(&[2, 2, 2])).unwrap();
        assert!((reduced_purity(&ghz, &[0]).unwrap() - 0.5).abs() < 1e-15);
        let prod = random_product(&dims(&[3, 2, 2]), 11);
        for subset in [&[0][..], &[1], &[0, 2]] {
            assert!((reduced_purity(&prod, subset).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(reduced_purity(&bell, &[]), Err(Error::Subset(_))));
        assert!(matches!(
            reduced_purity(&bell, &[0, 1]),
            Err(Error::Subset(_))
        ));
        assert!(matches!(
            reduced_purity(&bell, &[0, 0]),
            Err(Error::Subset(_))
        ));
    }

    #[test]
    fn reduced_purity_complement_symmetry() {
        let d = dims(&[2, 3, 2]);
        for seed in 0..20 {
            let s = random_pure(&d, seed);
            for (a, b) in [(&[0][..], &[1, 2][..]), (&[1], &[0, 2]), (&[0, 1], &[2])] {
                let pa = reduced_purity(&s, a).unwrap();
                let pb = reduced_purity(&s, b).unwrap();
                assert!((pa - pb).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn named_state_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        for (a, b) in bell.amps().iter().zip([h, 0.0, 0.0, h]) {
            assert!((a - c(b)).norm() < 1e-15);
        }
        let ghz = named_state(NamedState::Ghz, &dims(&[2, 2, 2])).unwrap();
        assert_eq!(ghz.amp(&[0, 0, 0]).unwrap(), c(h));
        assert_eq!(ghz.amp(&[1, 1, 1]).unwrap(), c(h));
        assert!((ghz.norm_sqr() - 1.0).abs() < 1e-15);
        let w = named_state(NamedState::W, &dims(&[2, 2, 2])).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert_eq!(w.amp(&idx).unwrap(), c(t));
        }
        assert!((w.norm_sqr() - 1.0).abs() < 1e-15);

        assert!(named_state(NamedState::Bell, &dims(&[2, 3])).is_err());
        assert!(named_state(NamedState::Ghz, &dims(&[3, 3])).is_err());
        assert!(named_state(NamedState::W, &dims(&[2])).is_err());
        let bp = named_state(NamedState::BasisProduct, &dims(&[3, 4])).unwrap();
        assert_eq!(bp.amps()[0], c(1.0));
    }

    #[test]
    fn random_states_are_deterministic() {
        let d = dims(&[2, 3]);
        assert_eq!(random_pure(&d, 42), random_pure(&d, 42));
        assert_ne!(random_pure(&d, 42), random_pure(&d, 43));
        assert!(random_pure(&d, 42).is_normalized());
        assert!(random_product(&d, 5).is_normalized());
        let rho = random_mixed(&d, 3, 9).unwrap();
        assert_eq!(rho, random_mixed(&d, 3, 9).unwrap());
        assert!(matches!(
            random_state(RandomKind::Mixed { rank: 2 }, &d, 1).unwrap(),
            SampledState::Mixed(_)
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let d = dims(&[3, 2]);
        for seed in 0..50 {
            let raw: Vec<Complex64> = random_pure(&d, seed)
                .amps()
                .iter()
                .map(|a| a * (1.0 + seed as f64))
                .collect();
            let once = make_state(d.clone(), raw, true).unwrap();
            let twice = once.normalized().unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn density_matrix_validation() {
        let d = dims(&[2, 2]);
        assert!(DensityMatrix::werner(0.8).is_ok());
        let mut bad = DMatrix::identity(4, 4) * c(0.25);
        bad[(0, 1)] = c(0.1);
        assert!(matches!(
            DensityMatrix::new(d.clone(), bad),
            Err(Error::DensityMatrix(_))
        ));
        let not_unit = DMatrix::identity(4, 4) * c(0.3);
        assert!(DensityMatrix::new(d.clone(), not_unit).is_err());
        let mut indefinite = DMatrix::zeros(4, 4);
        indefinite[(0, 0)] = c(1.5);
        indefinite[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(d, indefinite).is_err());
    }

    #[test]
    fn permute_axes_and_relabel() {
        let d = dims(&[2, 3]);
        let s = random_pure(&d, 3);
        let t = s.permute_axes(&[1, 0]).unwrap();
        assert_eq!(t.dims().as_slice(), &[3, 2]);
        assert_eq!(t.amp(&[2, 1]).unwrap(), s.amp(&[1, 2]).unwrap());
        let r = s.relabel_party(1, &[2, 0, 1]).unwrap();
        assert_eq!(r.amp(&[1, 2]).unwrap(), s.amp(&[1, 0]).unwrap());
        assert!(s.permute_axes(&[0, 0]).is_err());
    }
}
