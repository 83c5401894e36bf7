//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the generator kernels of the crate: indices are
//! enumerated as explicit tuples and every pair is visited.
#![allow(dead_code)]

use num_complex::Complex64;

/// Every multi-index of `dims` in row-major order.
pub fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut v = prefix.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn offset(dims: &[usize], idx: &[usize]) -> usize {
    let mut off = 0;
    let mut stride = 1;
    for j in (0..dims.len()).rev() {
        off += idx[j] * stride;
        stride *= dims[j];
    }
    off
}

fn swapped(k: &[usize], l: &[usize], set: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut kp = k.to_vec();
    let mut lp = l.to_vec();
    for &j in set {
        kp[j] = l[j];
        lp[j] = k[j];
    }
    (kp, lp)
}

/// Sum of `|a_k a_l - a_k' a_l'|^2` over every unordered pair, swapping `set`.
pub fn swap_sum(dims: &[usize], amps: &[Complex64], set: &[usize]) -> f64 {
    let idx = all_indices(dims);
    let a = |v: &[usize]| amps[offset(dims, v)];
    let mut total = 0.0;
    for (x, k) in idx.iter().enumerate() {
        for l in &idx[x + 1..] {
            let (kp, lp) = swapped(k, l, set);
            total += (a(k) * a(l) - a(&kp) * a(&lp)).norm_sqr();
        }
    }
    total
}

/// Sum of squared Segre minors over every slot.
pub fn e_sum(dims: &[usize], amps: &[Complex64]) -> f64 {
    (0..dims.len()).map(|j| swap_sum(dims, amps, &[j])).sum()
}

/// Subsets of `{0, ..., m-2}`, nonempty.
pub fn canonical_sets(m: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << (m - 1)))
        .map(|mask| (0..m - 1).filter(|&j| mask & (1 << j) != 0).collect())
        .collect()
}

pub fn f_sum(dims: &[usize], amps: &[Complex64]) -> f64 {
    canonical_sets(dims.len())
        .iter()
        .map(|s| swap_sum(dims, amps, s))
        .sum()
}

/// Largest Segre minor magnitude over all slots and pairs.
pub fn segre_max(dims: &[usize], amps: &[Complex64]) -> f64 {
    let idx = all_indices(dims);
    let a = |v: &[usize]| amps[offset(dims, v)];
    let mut best: f64 = 0.0;
    for j in 0..dims.len() {
        for (x, k) in idx.iter().enumerate() {
            for l in &idx[x + 1..] {
                let (kp, lp) = swapped(k, l, &[j]);
                best = best.max((a(k) * a(l) - a(&kp) * a(&lp)).norm());
            }
        }
    }
    best
}

/// Number of pairs `{k, l}` per slot with `k_j != l_j` that also differ elsewhere.
pub fn segre_count(dims: &[usize]) -> usize {
    let idx = all_indices(dims);
    let mut count = 0;
    for j in 0..dims.len() {
        for (x, k) in idx.iter().enumerate() {
            for l in &idx[x + 1..] {
                let differs_elsewhere = (0..dims.len()).any(|t| t != j && k[t] != l[t]);
                if k[j] != l[j] && differs_elsewhere {
                    count += 1;
                }
            }
        }
    }
    count
}

/// `Tr(rho_A^2)` for the first party, from the full projector by explicit partial trace.
pub fn first_party_purity(dims: &[usize], amps: &[Complex64]) -> f64 {
    let n = amps.len();
    let rho: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| amps[i] * amps[j].conj()).collect())
        .collect();
    let da = dims[0];
    let db = n / da;
    let mut reduced = vec![vec![Complex64::new(0.0, 0.0); da]; da];
    for (a, row) in reduced.iter_mut().enumerate() {
        for (ap, entry) in row.iter_mut().enumerate() {
            for b in 0..db {
                *entry += rho[a * db + b][ap * db + b];
            }
        }
    }
    reduced.iter().flatten().map(|z| z.norm_sqr()).sum()
}
