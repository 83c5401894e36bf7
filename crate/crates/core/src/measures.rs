//! Pure-state entanglement measures built from the generator sums.
//!
//! `E` sums the squared Segre minors over every slot; `F` sums the squared
//! perm-minors over every canonical swap class. Both are
//! `sqrt(normalization * sum)`. With the default constants both agree with the
//! generalized concurrence `sqrt(2 (1 - Tr rho_A^2))` on bipartite states.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{CompensatedSum, Execution};
use crate::segre::{
    enumerate_perm_classes, family_sums, segre_masks, swap_projection, PermClass, MAX_PARTIES,
};
use crate::tensor::{reduced_purity, BoxTensor, Dims};

pub const DEFAULT_NORM_E: f64 = 1.0;
pub const DEFAULT_NORM_F: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub normalization: f64,
    pub include_breakdown: bool,
    pub execution: Execution,
}

impl MeasureConfig {
    pub fn for_e() -> Self {
        MeasureConfig {
            normalization: DEFAULT_NORM_E,
            include_breakdown: false,
            execution: Execution::default(),
        }
    }

    pub fn for_f() -> Self {
        MeasureConfig {
            normalization: DEFAULT_NORM_F,
            ..MeasureConfig::for_e()
        }
    }

    pub fn with_normalization(mut self, normalization: f64) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_breakdown(mut self, on: bool) -> Self {
        self.include_breakdown = on;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.normalization.is_finite() && self.normalization > 0.0) {
            return Err(Error::Config(format!(
                "normalization must be a positive real, got {}",
                self.normalization
            )));
        }
        Ok(())
    }
}

/// Generator family a partial sum belongs to.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Slot(usize),
    Class(PermClass),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPartial {
    pub family: Family,
    pub partial: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub value: f64,
    pub sum_of_squares: f64,
    pub normalization: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_class: Option<Vec<FamilyPartial>>,
    pub single_party: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn precheck(state: &BoxTensor, config: &MeasureConfig) -> Result<()> {
    config.validate()?;
    state.ensure_normalized()?;
    if state.dims().parties() > MAX_PARTIES {
        return Err(Error::Dimension(format!(
            "at most {MAX_PARTIES} parties supported"
        )));
    }
    Ok(())
}

fn single_party(config: &MeasureConfig) -> MeasureReport {
    MeasureReport {
        value: 0.0,
        sum_of_squares: 0.0,
        normalization: config.normalization,
        per_class: config.include_breakdown.then(Vec::new),
        single_party: true,
        notes: vec!["single party: no generators".into()],
    }
}

fn assemble(
    config: &MeasureConfig,
    partials: Vec<(Family, f64)>,
    notes: Vec<String>,
) -> MeasureReport {
    let mut total = CompensatedSum::default();
    for (_, p) in &partials {
        total.add(*p);
    }
    let sum_of_squares = total.value();
    MeasureReport {
        value: (config.normalization * sum_of_squares).sqrt(),
        sum_of_squares,
        normalization: config.normalization,
        per_class: config.include_breakdown.then(|| {
            partials
                .into_iter()
                .map(|(family, partial)| FamilyPartial { family, partial })
                .collect()
        }),
        single_party: false,
        notes,
    }
}

/// `E = sqrt(N * sum over slots and Segre minors of |minor|^2)`.
pub fn measure_e(state: &BoxTensor, config: &MeasureConfig) -> Result<MeasureReport> {
    precheck(state, config)?;
    let m = state.dims().parties();
    if m < 2 {
        return Ok(single_party(config));
    }
    let accums = family_sums(state, &segre_masks(m), config.execution);
    let partials = accums
        .iter()
        .enumerate()
        .map(|(j, a)| (Family::Slot(j), a.sum))
        .collect();
    let notes = if m >= 4 {
        vec![
            "E with four or more parties certifies full separability (zero iff product) \
             but does not grade entanglement; prefer F"
                .into(),
        ]
    } else {
        Vec::new()
    };
    Ok(assemble(config, partials, notes))
}

/// `F = sqrt(N * sum over canonical classes and pairs of |perm minor|^2)`.
pub fn measure_f(state: &BoxTensor, config: &MeasureConfig) -> Result<MeasureReport> {
    precheck(state, config)?;
    let m = state.dims().parties();
    if m < 2 {
        return Ok(single_party(config));
    }
    let classes = enumerate_perm_classes(m)?;
    let masks: Vec<u64> = classes.iter().map(PermClass::mask).collect();
    let accums = family_sums(state, &masks, config.execution);
    let partials = classes
        .into_iter()
        .zip(&accums)
        .map(|(c, a)| (Family::Class(c), a.sum))
        .collect();
    Ok(assemble(config, partials, Vec::new()))
}

/// `sqrt(2 (1 - Tr rho_1^2))` from the reduced state of the first party.
pub fn bipartite_concurrence_oracle(state: &BoxTensor) -> Result<f64> {
    let m = state.dims().parties();
    if m != 2 {
        return Err(Error::Arity {
            expected: "2".into(),
            got: m,
        });
    }
    let purity = reduced_purity(state, &[0])?;
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Flattened list of the nontrivial F generators for fixed dims, used to
/// evaluate F many times on small states without re-deriving the index swaps.
#[derive(Debug, Clone)]
pub(crate) struct QuadTable {
    dims: Dims,
    quads: Vec<[u32; 4]>,
}

impl QuadTable {
    pub fn for_f(dims: &Dims) -> Result<Self> {
        let mut quads = Vec::new();
        if dims.parties() >= 2 {
            if dims.total() > u32::MAX as usize {
                return Err(Error::TooLarge(dims.total()));
            }
            for class in enumerate_perm_classes(dims.parties())? {
                let proj = swap_projection(dims, class.mask());
                for k in 0..dims.total() {
                    for l in k + 1..dims.total() {
                        let (pk, pl) = (proj[k], proj[l]);
                        if pk == pl || k - pk == l - pl {
                            continue;
                        }
                        quads.push([
                            k as u32,
                            l as u32,
                            (k - pk + pl) as u32,
                            (l - pl + pk) as u32,
                        ]);
                    }
                }
            }
        }
        Ok(QuadTable {
            dims: dims.clone(),
            quads,
        })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    /// Sum of `|a_k a_l - a_k' a_l'|^2`; homogeneous of degree four in `amps`.
    pub fn sum_of_squares(&self, amps: &[Complex64]) -> f64 {
        self.quads
            .iter()
            .map(|&[k, l, kp, lp]| {
                (amps[k as usize] * amps[l as usize] - amps[kp as usize] * amps[lp as usize])
                    .norm_sqr()
            })
            .sum()
    }
}
