//! Pointwise exterior algebra on orthonormal-coframe components.
//!
//! A `k`-form at a point is a vector of components indexed by the sorted
//! axis subsets of size `k`, in the same lexicographic order the mesh uses.
//! Only the operations the workbench needs exist: wedge and the metric
//! Hodge map for the flat diagonal metric.

use crate::mesh::{axis_subsets, complement, perm_sign};

/// Number of components of a `k`-form in `n` dimensions.
pub fn comp_count(n: usize, k: usize) -> usize {
    axis_subsets(n, k).len()
}

/// Pointwise wedge of a `ka`-form with a `kb`-form.
pub fn wedge(n: usize, ka: usize, a: &[f64], kb: usize, b: &[f64]) -> Vec<f64> {
    let sa = axis_subsets(n, ka);
    let sb = axis_subsets(n, kb);
    let sout = axis_subsets(n, ka + kb);
    let mut out = vec![0.0; sout.len()];
    for (ia, asub) in sa.iter().enumerate() {
        for (ib, bsub) in sb.iter().enumerate() {
            if asub.iter().any(|x| bsub.contains(x)) {
                continue;
            }
            let mut union: Vec<usize> = asub.iter().chain(bsub.iter()).copied().collect();
            let sign = perm_sign(asub, bsub) as f64;
            union.sort_unstable();
            let io = sout.iter().position(|s| s == &union).unwrap();
            out[io] += sign * a[ia] * b[ib];
        }
    }
    out
}

/// Pointwise Hodge map: `star(sigma^I) = perm_sign(I, I^c) sigma^{I^c}`.
pub fn hodge(n: usize, k: usize, a: &[f64]) -> Vec<f64> {
    let sk = axis_subsets(n, k);
    let sout = axis_subsets(n, n - k);
    let mut out = vec![0.0; sout.len()];
    for (i, sub) in sk.iter().enumerate() {
        let comp = complement(n, sub);
        let sign = perm_sign(sub, &comp) as f64;
        let io = sout.iter().position(|s| s == &comp).unwrap();
        out[io] = sign * a[i];
    }
    out
}

/// Pointwise inverse Hodge, using the involution sign of the flat metric.
pub fn hodge_inv(n: usize, k: usize, a: &[f64]) -> Vec<f64> {
    // On an n-dimensional flat space, star(star(alpha)) = (-1)^{k(n-k)} alpha
    // for a k-form, so the inverse of star on k-forms is (-1)^{k(n-k)} star.
    let mut out = hodge(n, k, a);
    if (k * (n - k)) % 2 == 1 {
        for v in &mut out {
            *v = -*v;
        }
    }
    out
}
