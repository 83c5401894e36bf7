//! Convex-roof extension of `F` to mixed states.
//!
//! Every pure-state ensemble of `rho` with `K` members is
//! `phi_k = sum_i V_ki sqrt(lambda_i) v_i` for a `K x r` isometry `V`, where
//! `(lambda_i, v_i)` are the `r` nonzero eigenpairs of `rho`. The search
//! writes `V` as the first `r` columns of `exp(iH)` for a Hermitian `H` and
//! runs a compass search on the `K^2` real parameters of `H` from several
//! random starting points. The reported value is always the average `F` of
//! an explicit decomposition, so it is an upper bound on the infimum.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::measures::{measure_f, MeasureConfig, QuadTable, DEFAULT_NORM_F};
use crate::tensor::{hermitian_part, BoxTensor, Decomposition, DensityMatrix};

/// Eigenvalues at or below this are treated as zero.
pub const EIGEN_CUTOFF: f64 = 1e-12;
/// Ensemble members with smaller weight are dropped.
pub const WEIGHT_CUTOFF: f64 = 1e-14;
const ISOMETRY_TOL: f64 = 1e-10;
const INITIAL_STEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoofConfig {
    /// Ensemble size `K`; `None` picks `min(2r, r + 4)` for rank `r`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub seed: u64,
    pub normalization: f64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            ensemble_size: None,
            restarts: 32,
            max_iters: 2000,
            step_tol: 1e-6,
            seed: 0,
            normalization: DEFAULT_NORM_F,
            execution: Execution::default(),
        }
    }
}

impl RoofConfig {
    pub fn ensemble_size_for(&self, rank: usize) -> usize {
        self.ensemble_size.unwrap_or((2 * rank).min(rank + 4))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofEstimate {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Best-so-far objective after every iteration, restarts concatenated in order.
    pub trace: Vec<f64>,
    /// Final objective of each restart.
    pub restart_bests: Vec<f64>,
    pub rank: usize,
    pub ensemble_size: usize,
}

/// Nonzero eigenpairs, largest first.
struct Spectrum {
    values: Vec<f64>,
    sqrt_values: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    fn of(rho: &DensityMatrix) -> Self {
        let eig = SymmetricEigen::new(hermitian_part(rho.entries()));
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let kept: Vec<usize> = order
            .into_iter()
            .filter(|&i| eig.eigenvalues[i] > EIGEN_CUTOFF)
            .collect();
        Spectrum {
            values: kept.iter().map(|&i| eig.eigenvalues[i]).collect(),
            sqrt_values: kept.iter().map(|&i| eig.eigenvalues[i].sqrt()).collect(),
            vectors: kept
                .iter()
                .map(|&i| eig.eigenvectors.column(i).iter().cloned().collect())
                .collect(),
        }
    }

    fn rank(&self) -> usize {
        self.values.len()
    }

    /// `sum_i coeffs[i] v_i`.
    fn combine(&self, coeffs: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
        let n = self.vectors[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (c, v) in coeffs.zip(&self.vectors) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    }
}

/// Spectral decomposition of `rho` with eigenvalues above [`EIGEN_CUTOFF`].
pub fn eigen_ensemble(rho: &DensityMatrix) -> Result<Decomposition> {
    let spec = Spectrum::of(rho);
    let states = spec
        .vectors
        .iter()
        .map(|v| BoxTensor::new(rho.dims().clone(), v.clone()))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(spec.values.clone(), states)
}

fn isometry_deviation(v: &DMatrix<Complex64>) -> f64 {
    let gram = v.adjoint() * v;
    let id = DMatrix::<Complex64>::identity(v.ncols(), v.ncols());
    (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ensemble_from_spectrum(
    rho: &DensityMatrix,
    spec: &Spectrum,
    v: &DMatrix<Complex64>,
) -> Result<Decomposition> {
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for row in v.row_iter() {
        // |phi_k|^2 = sum_i |V_ki|^2 lambda_i because the v_i are orthonormal
        let p: f64 = row
            .iter()
            .zip(&spec.values)
            .map(|(x, &lam)| x.norm_sqr() * lam)
            .sum();
        if p < WEIGHT_CUTOFF {
            continue;
        }
        let scale = p.sqrt();
        let amps = spec.combine(
            row.iter()
                .zip(&spec.sqrt_values)
                .map(|(x, &s)| x * s / scale),
        );
        weights.push(p);
        states.push(BoxTensor::new(rho.dims().clone(), amps)?);
    }
    Decomposition::new(weights, states)
}

/// Ensemble `phi_k = sum_i V_ki sqrt(lambda_i) v_i` for a `K x r` isometry `V`.
pub fn ensemble_from_isometry(
    rho: &DensityMatrix,
    v: &DMatrix<Complex64>,
) -> Result<Decomposition> {
    let spec = Spectrum::of(rho);
    if v.ncols() != spec.rank() {
        return Err(Error::Dimension(format!(
            "isometry has {} columns, density matrix has rank {}",
            v.ncols(),
            spec.rank()
        )));
    }
    let dev = isometry_deviation(v);
    if dev > ISOMETRY_TOL {
        return Err(Error::Isometry(dev));
    }
    ensemble_from_spectrum(rho, &spec, v)
}

/// Hermitian `K x K` matrix from `K^2` reals: the diagonal first, then the
/// real and imaginary parts of each upper-triangular entry in row order.
pub fn hermitian_from_params(params: &[f64], k: usize) -> DMatrix<Complex64> {
    assert_eq!(params.len(), k * k, "need K^2 parameters");
    let mut h = DMatrix::zeros(k, k);
    for i in 0..k {
        h[(i, i)] = Complex64::new(params[i], 0.0);
    }
    let mut idx = k;
    for i in 0..k {
        for j in i + 1..k {
            let z = Complex64::new(params[idx], params[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// First `r` columns of `exp(iH)`.
pub fn isometry_from_hermitian(h: &DMatrix<Complex64>, r: usize) -> DMatrix<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|t| Complex64::from_polar(1.0, t)));
    let u_top = u.rows(0, r).adjoint();
    u * phases * u_top
}

struct Objective<'a> {
    spec: &'a Spectrum,
    table: QuadTable,
    normalization: f64,
    k: usize,
}

impl Objective<'_> {
    /// `sum_k p_k F(psi_k)`, computed as `sum_k sqrt(N S(phi_k))` on the
    /// unnormalized members since `S` is homogeneous of degree four.
    fn eval(&self, params: &[f64]) -> f64 {
        let v = isometry_from_hermitian(&hermitian_from_params(params, self.k), self.spec.rank());
        v.row_iter()
            .map(|row| {
                let phi = self
                    .spec
                    .combine(row.iter().zip(&self.spec.sqrt_values).map(|(x, &s)| x * s));
                (self.normalization * self.table.sum_of_squares(&phi)).sqrt()
            })
            .sum()
    }
}

struct RestartResult {
    best: f64,
    params: Vec<f64>,
    trace: Vec<f64>,
}

/// Compass search with opportunistic polling and step halving on failure.
fn compass_search(obj: &Objective<'_>, start: Vec<f64>, config: &RoofConfig) -> RestartResult {
    let mut x = start;
    let mut fx = obj.eval(&x);
    let mut step = INITIAL_STEP;
    let mut trace = Vec::with_capacity(config.max_iters.min(4096) + 1);
    trace.push(fx);
    for _ in 0..config.max_iters {
        if step < config.step_tol {
            break;
        }
        let mut improved = false;
        for d in 0..x.len() {
            for sign in [1.0, -1.0] {
                let old = x[d];
                x[d] = old + sign * step;
                let f = obj.eval(&x);
                if f < fx {
                    fx = f;
                    improved = true;
                    break;
                }
                x[d] = old;
            }
        }
        if !improved {
            step *= 0.5;
        }
        trace.push(fx);
    }
    RestartResult {
        best: fx,
        params: x,
        trace,
    }
}

fn validate(config: &RoofConfig, rank: usize) -> Result<usize> {
    let k = config.ensemble_size_for(rank);
    if k < rank {
        return Err(Error::Config(format!(
            "ensemble size {k} is below the rank {rank} of the density matrix"
        )));
    }
    if config.restarts == 0 {
        return Err(Error::Config("restarts must be >= 1".into()));
    }
    if !(config.step_tol.is_finite() && config.step_tol > 0.0) {
        return Err(Error::Config(format!(
            "step tolerance {} must be positive",
            config.step_tol
        )));
    }
    if !(config.normalization.is_finite() && config.normalization > 0.0) {
        return Err(Error::Config(format!(
            "normalization must be a positive real, got {}",
            config.normalization
        )));
    }
    Ok(k)
}

/// Upper estimate of the convex roof of `F` at `rho`.
///
/// Restart 0 starts from `H = 0` (the spectral ensemble); restart `i > 0`
/// draws `H` from stream `i` of a ChaCha generator keyed by `config.seed`, so
/// the result is independent of how restarts are scheduled.
pub fn roof_f(rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofEstimate> {
    let spec = Spectrum::of(rho);
    let rank = spec.rank();
    let k = validate(config, rank)?;
    let obj = Objective {
        spec: &spec,
        table: QuadTable::for_f(rho.dims())?,
        normalization: config.normalization,
        k,
    };
    debug_assert_eq!(obj.table.dims(), rho.dims());
    let results = map_indexed(config.execution, config.restarts, |i| {
        let start = if i == 0 {
            vec![0.0; k * k]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            (0..k * k)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        compass_search(&obj, start, config)
    });

    let mut best_idx = 0;
    for (i, r) in results.iter().enumerate() {
        if r.best < results[best_idx].best {
            best_idx = i;
        }
    }
    let mut trace = Vec::with_capacity(results.iter().map(|r| r.trace.len()).sum());
    let mut running = f64::INFINITY;
    for r in &results {
        for &f in &r.trace {
            running = running.min(f);
            trace.push(running);
        }
    }
    let v = isometry_from_hermitian(&hermitian_from_params(&results[best_idx].params, k), rank);
    let decomposition = ensemble_from_spectrum(rho, &spec, &v)?;
    let mcfg = MeasureConfig::for_f()
        .with_normalization(config.normalization)
        .with_execution(Execution::Sequential);
    let value = decomposition
        .weights()
        .iter()
        .zip(decomposition.states())
        .map(|(&p, s)| Ok(p * measure_f(s, &mcfg)?.value))
        .sum::<Result<f64>>()?;
    Ok(RoofEstimate {
        value,
        decomposition,
        trace,
        restart_bests: results.iter().map(|r| r.best).collect(),
        rank,
        ensemble_size: k,
    })
}

/// Closed-form two-qubit concurrence `max(0, l1 - l2 - l3 - l4)`, with `l_i`
/// the descending square roots of the eigenvalues of
/// `rho (sy x sy) rho* (sy x sy)`.
pub fn wootters_oracle(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().as_slice() != [2, 2] {
        return Err(Error::Arity {
            expected: "two qubits".into(),
            got: rho.dims().parties(),
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let flip = DMatrix::from_row_slice(4, 4, &[
        zero, zero, zero, -one,
        zero, zero, one, zero,
        zero, one, zero, zero,
        -one, zero, zero, zero,
    ]);
    let r = hermitian_part(rho.entries());
    let tilde = &flip * r.map(|z| z.conj()) * &flip;
    // same spectrum as rho * tilde, but Hermitian
    let eig = SymmetricEigen::new(r.clone());
    let sqrt_rho = &eig.eigenvectors
        * DMatrix::from_diagonal(
            &eig.eigenvalues
                .map(|x| Complex64::new(x.max(0.0).sqrt(), 0.0)),
        )
        * eig.eigenvectors.adjoint();
    let m = hermitian_part(&(&sqrt_rho * tilde * &sqrt_rho));
    let mut l: Vec<f64> = m
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}
