//! Quadratic generators of the Segre ideal and of the index-swap varieties.
//!
//! Every generator has the shape `a_k a_l - a_{k'} a_{l'}`, where `k'` and `l'`
//! are obtained from `k` and `l` by exchanging the entries at a set `S` of
//! slots. Segre minors use singleton sets `S = {j}`; the permutation classes
//! use every nonempty `S` that excludes the last slot (a set and its
//! complement produce the same generator up to sign).
//!
//! Internally a swap set is a bitmask, and the exchange is done on flat
//! indices: with `P_S(k) = sum_{j in S} k_j * stride_j` we get
//! `k' = k - P_S(k) + P_S(l)` and `l' = l - P_S(l) + P_S(k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_indexed, CompensatedSum, Execution};
use crate::tensor::{segre_embed, BoxTensor, Dims};

/// Default absolute tolerance on the max-magnitude residual.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-10;
/// Largest amplitude count for which generator lists are materialized.
pub const MATERIALIZE_LIMIT: usize = 4096;
/// Swap sets are stored as `u64` bitmasks.
pub const MAX_PARTIES: usize = 63;

/// One 2x2 minor about `slot`, identified by the unordered pair `{k, l}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MinorSpec {
    pub slot: usize,
    pub k: Vec<usize>,
    pub l: Vec<usize>,
}

impl MinorSpec {
    /// Orders the pair so that `k` precedes `l` lexicographically.
    pub fn new(slot: usize, k: Vec<usize>, l: Vec<usize>) -> Result<Self> {
        if k.len() != l.len() || slot >= k.len() {
            return Err(Error::Spec(format!(
                "slot {slot} with index lengths {} and {}",
                k.len(),
                l.len()
            )));
        }
        if k[slot] == l[slot] {
            return Err(Error::Spec(format!(
                "indices agree at slot {slot}: {k:?}, {l:?}"
            )));
        }
        let (k, l) = if k < l { (k, l) } else { (l, k) };
        Ok(MinorSpec { slot, k, l })
    }

    /// The swapped pair `(k', l')`.
    pub fn swapped(&self) -> (Vec<usize>, Vec<usize>) {
        let mut kp = self.k.clone();
        let mut lp = self.l.clone();
        kp[self.slot] = self.l[self.slot];
        lp[self.slot] = self.k[self.slot];
        (kp, lp)
    }
}

/// Canonical swap set `S`: nonempty, never containing the last slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermClass {
    mask: u64,
    parties: usize,
}

impl PermClass {
    pub fn new(slots: &[usize], parties: usize) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&parties) {
            return Err(Error::Spec(format!("{parties} parties not supported")));
        }
        let mut mask = 0u64;
        for &j in slots {
            if j + 1 >= parties {
                return Err(Error::Spec(format!(
                    "slot {j} not allowed in a canonical class of {parties} parties"
                )));
            }
            mask |= 1 << j;
        }
        if mask == 0 {
            return Err(Error::Spec("empty swap set".into()));
        }
        Ok(PermClass { mask, parties })
    }

    /// Maps any nonempty proper subset to its canonical representative,
    /// replacing it by its complement when it contains the last slot.
    pub fn canonical(slots: &[usize], parties: usize) -> Result<Self> {
        if slots.iter().any(|&j| j >= parties) {
            return Err(Error::Spec(format!("slots {slots:?} out of range")));
        }
        if slots.contains(&(parties - 1)) {
            let comp: Vec<usize> = (0..parties).filter(|j| !slots.contains(j)).collect();
            PermClass::new(&comp, parties)
        } else {
            PermClass::new(slots, parties)
        }
    }

    pub fn swap_set(&self) -> Vec<usize> {
        (0..self.parties).filter(|&j| self.contains(j)).collect()
    }

    pub fn contains(&self, slot: usize) -> bool {
        slot < 64 && self.mask & (1 << slot) != 0
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub(crate) fn mask(&self) -> u64 {
        self.mask
    }
}

impl Serialize for PermClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.swap_set().serialize(s)
    }
}

/// All canonical classes for `m` parties, ordered by bitmask.
pub fn enumerate_perm_classes(parties: usize) -> Result<Vec<PermClass>> {
    if !(2..=MAX_PARTIES).contains(&parties) {
        return Err(Error::Spec(format!(
            "permutation classes need 2..={MAX_PARTIES} parties, got {parties}"
        )));
    }
    Ok((1u64..(1u64 << (parties - 1)))
        .map(|mask| PermClass { mask, parties })
        .collect())
}

/// Generator achieving the residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Minor(MinorSpec),
    Perm {
        class: PermClass,
        k: Vec<usize>,
        l: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub residual: f64,
    pub worst: Option<Witness>,
    pub is_member: bool,
    pub tolerance: f64,
}

/// Lazy lexicographic stream of the Segre minors: slot-major, then `k`, then `l`.
#[derive(Debug, Clone)]
pub struct SegreGenerators {
    dims: Dims,
    strides: Vec<usize>,
    total: usize,
    slot: usize,
    k: usize,
    l: usize,
}

/// Streams the Segre minors of `dims`; empty for a single party.
pub fn segre_generators(dims: &Dims) -> SegreGenerators {
    let slot = if dims.parties() < 2 {
        dims.parties()
    } else {
        0
    };
    SegreGenerators {
        dims: dims.clone(),
        strides: dims.strides(),
        total: dims.total(),
        slot,
        k: 0,
        l: 0,
    }
}

impl Iterator for SegreGenerators {
    type Item = MinorSpec;

    fn next(&mut self) -> Option<MinorSpec> {
        let m = self.dims.parties();
        while self.slot < m {
            self.l += 1;
            if self.l >= self.total {
                self.k += 1;
                self.l = self.k + 1;
                if self.l >= self.total {
                    self.slot += 1;
                    self.k = 0;
                    self.l = 0;
                    continue;
                }
            }
            let n = self.dims.as_slice()[self.slot];
            let stride = self.strides[self.slot];
            let dk = (self.k / stride) % n;
            let dl = (self.l / stride) % n;
            if dk != dl && self.k - dk * stride != self.l - dl * stride {
                return Some(MinorSpec {
                    slot: self.slot,
                    k: self.dims.multi_index(self.k),
                    l: self.dims.multi_index(self.l),
                });
            }
        }
        None
    }
}

/// Materialized Segre minors. Pairs that differ only at the minor's own slot
/// are omitted because their minor is identically zero.
pub fn enumerate_segre_generators(dims: &Dims) -> Result<Vec<MinorSpec>> {
    if dims.total() > MATERIALIZE_LIMIT {
        return Err(Error::TooLarge(dims.total()));
    }
    Ok(segre_generators(dims).collect())
}

fn check_multi(dims: &Dims, multi: &[usize]) -> Result<usize> {
    dims.flat_index(multi)
        .map_err(|_| Error::Spec(format!("index {multi:?} invalid for dims {dims}")))
}

pub fn evaluate_minor(state: &BoxTensor, spec: &MinorSpec) -> Result<Complex64> {
    let dims = state.dims();
    if spec.slot >= dims.parties() {
        return Err(Error::Spec(format!(
            "slot {} invalid for dims {dims}",
            spec.slot
        )));
    }
    let k = check_multi(dims, &spec.k)?;
    let l = check_multi(dims, &spec.l)?;
    let (kp, lp) = spec.swapped();
    let a = state.amps();
    Ok(a[k] * a[l] - a[check_multi(dims, &kp)?] * a[check_multi(dims, &lp)?])
}

/// `a_k a_l - a_{k><l} a_{l><k}` where `k><l` takes `l`'s entries on the swap set.
pub fn evaluate_perm_minor(
    state: &BoxTensor,
    class: &PermClass,
    k: &[usize],
    l: &[usize],
) -> Result<Complex64> {
    let dims = state.dims();
    if class.parties() != dims.parties() {
        return Err(Error::Spec(format!(
            "class for {} parties used with dims {dims}",
            class.parties()
        )));
    }
    let kf = check_multi(dims, k)?;
    let lf = check_multi(dims, l)?;
    if kf == lf {
        return Err(Error::Spec(format!("pair indices coincide: {k:?}")));
    }
    let swap = |x: &[usize], y: &[usize]| -> Vec<usize> {
        (0..x.len())
            .map(|j| if class.contains(j) { y[j] } else { x[j] })
            .collect()
    };
    let a = state.amps();
    let kp = dims.flat_index(&swap(k, l))?;
    let lp = dims.flat_index(&swap(l, k))?;
    Ok(a[kf] * a[lf] - a[kp] * a[lp])
}

/// `P_S(flat)` for every flat index.
pub(crate) fn swap_projection(dims: &Dims, mask: u64) -> Vec<usize> {
    let strides = dims.strides();
    let sizes = dims.as_slice();
    (0..dims.total())
        .map(|flat| {
            (0..sizes.len())
                .filter(|&j| mask & (1 << j) != 0)
                .map(|j| ((flat / strides[j]) % sizes[j]) * strides[j])
                .sum()
        })
        .collect()
}

/// Sum of squared magnitudes and the first maximal term for one swap family.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct FamilyAccum {
    pub sum: f64,
    pub max: f64,
    /// `(k, l)` flat indices of the first term attaining `max`.
    pub arg: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, Default)]
struct RowAccum {
    sum: CompensatedSum,
    max: f64,
    arg: Option<(usize, usize)>,
}

fn row_terms(amps: &[Complex64], proj: &[usize], k: usize) -> RowAccum {
    let mut acc = RowAccum::default();
    let (ak, pk) = (amps[k], proj[k]);
    let k_rest = k - pk;
    for l in k + 1..amps.len() {
        let pl = proj[l];
        if pl == pk || l - pl == k_rest {
            continue;
        }
        let term = ak * amps[l] - amps[k_rest + pl] * amps[l - pl + pk];
        let mag2 = term.norm_sqr();
        acc.sum.add(mag2);
        if mag2 > acc.max {
            acc.max = mag2;
            acc.arg = Some((k, l));
        }
    }
    acc
}

/// Evaluates every nontrivial generator of each swap family in `masks`.
///
/// Work is split into one task per `(family, k)` row; rows are folded in
/// order so the result does not depend on the execution policy.
pub(crate) fn family_sums(state: &BoxTensor, masks: &[u64], exec: Execution) -> Vec<FamilyAccum> {
    let n = state.amps().len();
    let projections: Vec<Vec<usize>> = masks
        .iter()
        .map(|&m| swap_projection(state.dims(), m))
        .collect();
    let amps = state.amps();
    let rows = map_indexed(exec, masks.len() * n, |task| {
        row_terms(amps, &projections[task / n], task % n)
    });
    rows.chunks(n.max(1))
        .map(|chunk| {
            let mut sum = CompensatedSum::default();
            let mut max = 0.0;
            let mut arg = None;
            for row in chunk {
                sum.add(row.sum.value());
                if row.max > max {
                    max = row.max;
                    arg = row.arg;
                }
            }
            FamilyAccum {
                sum: sum.value(),
                max: max.sqrt(),
                arg,
            }
        })
        .collect()
}

/// Singleton swap sets `{j}` for every slot.
pub(crate) fn segre_masks(parties: usize) -> Vec<u64> {
    (0..parties).map(|j| 1u64 << j).collect()
}

fn check_parties(dims: &Dims) -> Result<()> {
    if dims.parties() > MAX_PARTIES {
        return Err(Error::Dimension(format!(
            "at most {MAX_PARTIES} parties supported"
        )));
    }
    Ok(())
}

fn single_party_report(tol: f64) -> MembershipReport {
    MembershipReport {
        residual: 0.0,
        worst: None,
        is_member: true,
        tolerance: tol,
    }
}

fn pick_worst(accums: &[FamilyAccum]) -> Option<(usize, f64, (usize, usize))> {
    let mut best: Option<(usize, f64, (usize, usize))> = None;
    for (i, a) in accums.iter().enumerate() {
        if let Some(arg) = a.arg {
            if best.is_none_or(|(_, m, _)| a.max > m) {
                best = Some((i, a.max, arg));
            }
        }
    }
    best
}

pub fn segre_residual(state: &BoxTensor, tol: f64) -> Result<MembershipReport> {
    segre_residual_with(state, tol, Execution::default())
}

/// Max over the Segre minors of `|minor|`, with the first maximizing minor.
pub fn segre_residual_with(
    state: &BoxTensor,
    tol: f64,
    exec: Execution,
) -> Result<MembershipReport> {
    state.ensure_normalized()?;
    check_parties(state.dims())?;
    let dims = state.dims();
    if dims.parties() < 2 {
        return Ok(single_party_report(tol));
    }
    let accums = family_sums(state, &segre_masks(dims.parties()), exec);
    Ok(match pick_worst(&accums) {
        None => single_party_report(tol),
        Some((slot, residual, (k, l))) => MembershipReport {
            residual,
            worst: Some(Witness::Minor(MinorSpec {
                slot,
                k: dims.multi_index(k),
                l: dims.multi_index(l),
            })),
            is_member: residual <= tol,
            tolerance: tol,
        },
    })
}

pub fn t_variety_residual(state: &BoxTensor, tol: f64) -> Result<MembershipReport> {
    t_variety_residual_with(state, tol, Execution::default())
}

/// Max over every canonical class and pair of `|perm minor|`.
pub fn t_variety_residual_with(
    state: &BoxTensor,
    tol: f64,
    exec: Execution,
) -> Result<MembershipReport> {
    state.ensure_normalized()?;
    check_parties(state.dims())?;
    let dims = state.dims();
    if dims.parties() < 2 {
        return Ok(single_party_report(tol));
    }
    let classes = enumerate_perm_classes(dims.parties())?;
    let masks: Vec<u64> = classes.iter().map(PermClass::mask).collect();
    let accums = family_sums(state, &masks, exec);
    Ok(match pick_worst(&accums) {
        None => single_party_report(tol),
        Some((i, residual, (k, l))) => MembershipReport {
            residual,
            worst: Some(Witness::Perm {
                class: classes[i],
                k: dims.multi_index(k),
                l: dims.multi_index(l),
            }),
            is_member: residual <= tol,
            tolerance: tol,
        },
    })
}

/// Max elementwise deviation between embedding all factors at once and
/// embedding parties `..split` and `split..` separately, then joining the two
/// flattened results with a bipartite embedding.
pub fn check_partition_commutativity(factors: &[Vec<Complex64>], split: usize) -> Result<f64> {
    let m = factors.len();
    if split == 0 || split >= m {
        return Err(Error::Split { split, parties: m });
    }
    let direct = segre_embed(factors)?;
    let left = segre_embed(&factors[..split])?;
    let right = segre_embed(&factors[split..])?;
    let staged = segre_embed(&[left.into_amps(), right.into_amps()])?;
    Ok(direct
        .amps()
        .iter()
        .zip(staged.amps())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Best rank-one approximation factors from the leading left singular vector
/// of each slot unfolding. The overall scale is folded into the first factor.
pub fn rank_one_factors(state: &BoxTensor) -> Result<Vec<Vec<Complex64>>> {
    if state.norm_sqr() == 0.0 {
        return Err(Error::DegenerateState);
    }
    let dims = state.dims();
    let strides = dims.strides();
    let mut factors = Vec::with_capacity(dims.parties());
    for j in 0..dims.parties() {
        let n = dims.as_slice()[j];
        let cols = dims.total() / n;
        let mut unfold = DMatrix::<Complex64>::zeros(n, cols);
        for (flat, &a) in state.amps().iter().enumerate() {
            let i = (flat / strides[j]) % n;
            let high = flat / (strides[j] * n);
            let low = flat % strides[j];
            unfold[(i, high * strides[j] + low)] = a;
        }
        let svd = unfold.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let top = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &s)| {
                if s > best.1 {
                    (i, s)
                } else {
                    best
                }
            })
            .0;
        factors.push(u.column(top).iter().cloned().collect::<Vec<_>>());
    }
    let product = segre_embed(&factors)?;
    let overlap: Complex64 = product
        .amps()
        .iter()
        .zip(state.amps())
        .map(|(p, s)| p.conj() * s)
        .sum();
    for a in factors[0].iter_mut() {
        *a *= overlap;
    }
    Ok(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{named_state, random_product, random_pure, NamedState};

    fn dims(d: &[usize]) -> Dims {
        Dims::new(d.to_vec()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_qubit_generator_list() {
        let specs = enumerate_segre_generators(&dims(&[2, 2])).unwrap();
        let got: Vec<(usize, Vec<usize>, Vec<usize>)> =
            specs.into_iter().map(|s| (s.slot, s.k, s.l)).collect();
        assert_eq!(
            got,
            vec![
                (0, vec![0, 0], vec![1, 1]),
                (0, vec![0, 1], vec![1, 0]),
                (1, vec![0, 0], vec![1, 1]),
                (1, vec![0, 1], vec![1, 0]),
            ]
        );
    }

    #[test]
    fn generator_counts() {
        assert_eq!(
            enumerate_segre_generators(&dims(&[2, 2, 2])).unwrap().len(),
            36
        );
        assert!(enumerate_segre_generators(&dims(&[2])).unwrap().is_empty());
        assert!(matches!(
            enumerate_segre_generators(&dims(&[8, 8, 8, 9])),
            Err(Error::TooLarge(4608))
        ));
        // the lazy stream still works past the materialization limit
        assert!(segre_generators(&dims(&[8, 8, 8, 9])).next().is_some());
    }

    #[test]
    fn minor_spec_validation() {
        assert!(MinorSpec::new(0, vec![0, 1], vec![0, 0]).is_err());
        let s = MinorSpec::new(1, vec![1, 1], vec![0, 0]).unwrap();
        assert_eq!(s.k, vec![0, 0]);
        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        let bad = MinorSpec {
            slot: 2,
            k: vec![0, 0],
            l: vec![1, 1],
        };
        assert!(matches!(evaluate_minor(&bell, &bad), Err(Error::Spec(_))));
        let bad = MinorSpec {
            slot: 0,
            k: vec![0, 0, 0],
            l: vec![1, 1, 1],
        };
        assert!(evaluate_minor(&bell, &bad).is_err());
    }

    #[test]
    fn minor_examples() {
        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        let spec = MinorSpec::new(0, vec![0, 0], vec![1, 1]).unwrap();
        assert!((evaluate_minor(&bell, &spec).unwrap() - c(0.5)).norm() < 1e-15);

        let ghz = named_state(NamedState::Ghz, &dims(&[2, 2, 2])).unwrap();
        let spec = MinorSpec::new(0, vec![0, 0, 0], vec![1, 1, 1]).unwrap();
        assert!((evaluate_minor(&ghz, &spec).unwrap() - c(0.5)).norm() < 1e-15);
        let spec = MinorSpec::new(0, vec![0, 0, 1], vec![1, 1, 0]).unwrap();
        assert_eq!(evaluate_minor(&ghz, &spec).unwrap(), c(0.0));

        let prod = random_product(&dims(&[2, 3, 2]), 4);
        for spec in segre_generators(prod.dims()) {
            assert!(evaluate_minor(&prod, &spec).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn residual_examples() {
        let prod = random_product(&dims(&[3, 2, 2]), 8);
        let r = segre_residual(&prod, DEFAULT_MEMBERSHIP_TOL).unwrap();
        assert!(r.residual <= 1e-12 && r.is_member);

        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        let r = segre_residual(&bell, DEFAULT_MEMBERSHIP_TOL).unwrap();
        assert!((r.residual - 0.5).abs() < 1e-15);
        assert!(!r.is_member);
        assert_eq!(
            r.worst,
            Some(Witness::Minor(
                MinorSpec::new(0, vec![0, 0], vec![1, 1]).unwrap()
            ))
        );

        let w = named_state(NamedState::W, &dims(&[2, 2, 2])).unwrap();
        let r = segre_residual(&w, DEFAULT_MEMBERSHIP_TOL).unwrap();
        assert!((r.residual - 1.0 / 3.0).abs() < 1e-15);

        let single = random_pure(&dims(&[3]), 1);
        assert!(
            segre_residual(&single, DEFAULT_MEMBERSHIP_TOL)
                .unwrap()
                .is_member
        );

        let unnormalized = BoxTensor::new(dims(&[2, 2]), vec![c(1.0); 4]).unwrap();
        assert!(matches!(
            segre_residual(&unnormalized, 1e-10),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn perm_class_examples() {
        let to_sets = |m| -> Vec<Vec<usize>> {
            enumerate_perm_classes(m)
                .unwrap()
                .iter()
                .map(PermClass::swap_set)
                .collect()
        };
        assert_eq!(to_sets(2), vec![vec![0]]);
        assert_eq!(to_sets(3), vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(to_sets(4).len(), 7);
        assert!(enumerate_perm_classes(1).is_err());
        assert!(PermClass::new(&[2], 3).is_err());
        assert!(PermClass::new(&[], 3).is_err());
        assert_eq!(
            PermClass::canonical(&[2], 3).unwrap(),
            PermClass::new(&[0, 1], 3).unwrap()
        );
    }

    #[test]
    fn perm_minor_examples() {
        let ghz = named_state(NamedState::Ghz, &dims(&[2, 2, 2])).unwrap();
        let s01 = PermClass::new(&[0, 1], 3).unwrap();
        let v = evaluate_perm_minor(&ghz, &s01, &[0, 0, 0], &[1, 1, 1]).unwrap();
        assert!((v - c(0.5)).norm() < 1e-15);
        // k and l agree on S: the swap is the identity
        let s0 = PermClass::new(&[0], 3).unwrap();
        let psi = random_pure(&dims(&[2, 2, 2]), 3);
        assert_eq!(
            evaluate_perm_minor(&psi, &s0, &[1, 0, 1], &[1, 1, 0]).unwrap(),
            c(0.0)
        );
        let bell = named_state(NamedState::Bell, &dims(&[2, 2])).unwrap();
        let s = PermClass::new(&[0], 2).unwrap();
        let v = evaluate_perm_minor(&bell, &s, &[0, 0], &[1, 1]).unwrap();
        assert!((v - c(0.5)).norm() < 1e-15);
        assert!(evaluate_perm_minor(&bell, &s, &[0, 0], &[0, 0]).is_err());
        assert!(evaluate_perm_minor(&ghz, &s, &[0, 0, 0], &[1, 1, 1]).is_err());
    }

    #[test]
    fn t_variety_examples() {
        let ghz = named_state(NamedState::Ghz, &dims(&[2, 2, 2])).unwrap();
        let r = t_variety_residual(&ghz, DEFAULT_MEMBERSHIP_TOL).unwrap();
        assert!((r.residual - 0.5).abs() < 1e-15);
        let prod = random_product(&dims(&[2, 2, 3]), 2);
        assert!(t_variety_residual(&prod, 1e-10).unwrap().residual <= 1e-12);
        for seed in 0..20 {
            let psi = random_pure(&dims(&[2, 3, 2]), seed);
            let s = segre_residual(&psi, 1e-10).unwrap().residual;
            let t = t_variety_residual(&psi, 1e-10).unwrap().residual;
            assert!(t >= s - 1e-15);
        }
    }

    #[test]
    fn singleton_classes_match_segre_minors_exactly() {
        let psi = random_pure(&dims(&[2, 3, 2, 2]), 17);
        for spec in segre_generators(psi.dims()).filter(|s| s.slot < 3) {
            let class = PermClass::new(&[spec.slot], 4).unwrap();
            assert_eq!(
                evaluate_perm_minor(&psi, &class, &spec.k, &spec.l).unwrap(),
                evaluate_minor(&psi, &spec).unwrap()
            );
        }
    }

    #[test]
    fn partition_commutativity_examples() {
        let basis = vec![
            vec![c(0.0), c(1.0)],
            vec![c(1.0), c(0.0), c(0.0)],
            vec![c(0.0), c(1.0)],
        ];
        for split in 1..3 {
            assert_eq!(check_partition_commutativity(&basis, split).unwrap(), 0.0);
        }
        assert!(matches!(
            check_partition_commutativity(&basis, 0),
            Err(Error::Split { .. })
        ));
        assert!(check_partition_commutativity(&basis, 3).is_err());
    }

    #[test]
    fn rank_one_factors_reproduce_products() {
        let prod = random_product(&dims(&[3, 2, 3]), 21);
        let rebuilt = segre_embed(&rank_one_factors(&prod).unwrap()).unwrap();
        let dev = prod
            .amps()
            .iter()
            .zip(rebuilt.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10);
    }

    #[test]
    fn execution_policies_agree() {
        let psi = random_pure(&dims(&[3, 3, 3]), 5);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let r = t_variety_residual_with(&psi, 1e-10, exec).unwrap();
            let base = t_variety_residual_with(&psi, 1e-10, Execution::Sequential).unwrap();
            assert_eq!(r, base);
        }
    }
}
