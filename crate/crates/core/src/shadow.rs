//! Shadows, generalized binomials and Kruskal–Katona type bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mask::{enumerate_k_subsets, SubsetMask};
use crate::vc::WitnessedFamily;

/// Relative slack when comparing an integer count with a real bound.
pub const BOUND_TOL: f64 = 1e-9;

/// Absolute bisection tolerance in `alpha`.
pub const ALPHA_TOL: f64 = 1e-12;

/// All `s`-subsets of members of a `k`-uniform family, in colex order.
pub fn shadow_s(f: &Family, s: usize) -> Result<Family> {
    let k = uniform_rank(f)?;
    if s > k {
        return Err(Error::InvalidParameter(format!("shadow size {s} exceeds member size {k}")));
    }
    let mut out: Vec<SubsetMask> = if f.len() >= 256 {
        f.members().par_iter().flat_map_iter(|m| m.subsets_of_size(s)).collect()
    } else {
        f.iter().flat_map(|m| m.subsets_of_size(s)).collect()
    };
    out.par_sort_unstable();
    out.dedup();
    Family::uniform(f.n(), s, out)
}

fn uniform_rank(f: &Family) -> Result<usize> {
    f.uniform_rank()
        .ok_or_else(|| Error::InvalidParameter("family has no declared uniform rank".into()))
}

/// `alpha (alpha-1) ... (alpha-k+1) / k!`.
pub fn gen_binom(alpha: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        // Each prefix is itself a generalized binomial, so integer alpha stays exact.
        acc = acc * (alpha - i as f64) / (i + 1) as f64;
    }
    acc
}

/// The `alpha >= k-1` with `gen_binom(alpha, k) = value`.
pub fn solve_alpha(value: f64, k: usize) -> Result<f64> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!("value must be finite and >= 0, got {value}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let (mut lo, mut hi) = ((k - 1) as f64, k as f64 + value);
    while hi - lo > ALPHA_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gen_binom(mid, k) < value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn at_least(count: f64, bound: f64) -> bool {
    count >= bound - BOUND_TOL * bound.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KkReport {
    pub size: usize,
    pub alpha: f64,
    pub shadow_size: usize,
    pub lovasz_bound: f64,
    pub holds: bool,
}

/// `|∂_d f| >= C(alpha, d)` where `|f| = C(alpha, d+1)`. Vacuous for empty `f`.
pub fn check_kk(f: &Family) -> Result<KkReport> {
    let k = uniform_rank(f)?;
    if k == 0 {
        return Err(Error::InvalidParameter("members must be nonempty".into()));
    }
    if f.is_empty() {
        return Ok(KkReport { size: 0, alpha: (k - 1) as f64, shadow_size: 0, lovasz_bound: 0.0, holds: true });
    }
    let shadow_size = shadow_s(f, k - 1)?.len();
    let alpha = solve_alpha(f.len() as f64, k)?;
    let lovasz_bound = gen_binom(alpha, k - 1);
    Ok(KkReport {
        size: f.len(),
        alpha,
        shadow_size,
        lovasz_bound,
        holds: at_least(shadow_size as f64, lovasz_bound),
    })
}

fn binom_sat(a: u128, i: u128) -> u128 {
    if i > a {
        return 0;
    }
    let mut acc: u128 = 1;
    for j in 0..i {
        acc = match acc.checked_mul(a - j) {
            Some(v) => v / (j + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `k`-cascade of `m`: pairs `(a_i, i)` with `a_k > a_{k-1} > ... > a_t >= t >= 1`
/// and `m = sum C(a_i, i)`.
pub fn cascade(m: u64, k: usize) -> Vec<(u128, usize)> {
    let mut rem = m as u128;
    let mut out = Vec::new();
    let mut i = k;
    while rem > 0 && i >= 1 {
        let ii = i as u128;
        let mut hi = ii;
        while binom_sat(hi, ii) <= rem {
            hi *= 2;
        }
        // C(lo, i) <= rem < C(hi, i)
        let mut lo = ii;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if binom_sat(mid, ii) <= rem {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push((lo, i));
        rem -= binom_sat(lo, ii);
        i -= 1;
    }
    out
}

/// Least `|∂_s F|` over `k`-uniform families with `|F| = m`.
pub fn exact_kk_min(m: u64, k: usize, s: usize) -> Result<u128> {
    if s > k {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds k = {k}")));
    }
    if m == 0 || s == k {
        return Ok(m as u128);
    }
    let drop = (k - s) as u128;
    Ok(cascade(m, k)
        .into_iter()
        .filter(|&(_, i)| i as u128 >= drop)
        .map(|(a, i)| binom_sat(a, i as u128 - drop))
        .fold(0u128, |acc, v| acc.saturating_add(v)))
}

/// The first `m` `k`-subsets of `[n]` in colex order.
pub fn colex_initial_segment(n: usize, k: usize, m: usize) -> Result<Family> {
    let members: Vec<SubsetMask> = enumerate_k_subsets(n, k)?.take(m).collect();
    if members.len() < m {
        return Err(Error::InvalidParameter(format!("only {} {k}-subsets of [{n}]", members.len())));
    }
    Family::uniform(n, k, members)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialShadowReport {
    pub f_size: usize,
    pub g_size: usize,
    pub k: usize,
    pub x: f64,
    pub bound: f64,
    pub holds: bool,
}

/// If every member of `f` contains `k` members of `g` and `|f| = C(x, k)`,
/// then `|g| >= C(x, k-1)`. Vacuous for empty `f`.
pub fn check_partial_shadow(f: &Family, g: &Family, k: usize) -> Result<PartialShadowReport> {
    let r = uniform_rank(f)?;
    if r == 0 {
        return Err(Error::InvalidParameter("members of f must be nonempty".into()));
    }
    g.require_uniform(r - 1)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if f.n() != g.n() {
        return Err(Error::GroundSetMismatch { expected: f.n(), found: g.n() });
    }
    let gset = g.member_bits();
    for m in f {
        let found = m.subsets_of_size(r - 1).filter(|t| gset.contains(&t.bits())).count();
        if found < k {
            return Err(Error::CoveringFails { set: m.to_string(), found, required: k });
        }
    }
    if f.is_empty() {
        return Ok(PartialShadowReport { f_size: 0, g_size: g.len(), k, x: (k - 1) as f64, bound: 0.0, holds: true });
    }
    let x = solve_alpha(f.len() as f64, k)?;
    let bound = gen_binom(x, k - 1);
    Ok(PartialShadowReport {
        f_size: f.len(),
        g_size: g.len(),
        k,
        x,
        bound,
        holds: at_least(g.len() as f64, bound),
    })
}

/// `{G ⊂ F : |G| = d, G != B_F}` over all members: each member covers `d`
/// of these, and none is a size-`d` witness.
pub fn non_witness_shadow(w: &WitnessedFamily) -> Result<Family> {
    let d = w.d();
    let mut out: Vec<SubsetMask> =
        w.pairs().flat_map(|(f, b)| f.subsets_of_size(d).filter(move |g| *g != b)).collect();
    out.sort_unstable();
    out.dedup();
    Family::uniform(w.n(), d, out)
}
