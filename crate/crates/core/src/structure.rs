//! Links, the near-transversal `J`, the hypergraph `G_J`, the six-part
//! partition and the good/bad element analysis for singleton witnesses.
//!
//! Every audit reports exact integers; each named check carries both sides.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mask::{binomial, binomial_i, SubsetMask};
use crate::sunflower::find_centered_disjoint;
use crate::vc::{vc_dimension, witness_groups, WitnessedFamily};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub holds: bool,
    pub lhs: i128,
    pub rhs: i128,
    pub witnesses: Vec<String>,
}

impl ClaimCheck {
    fn le(lhs: i128, rhs: i128, witnesses: Vec<String>) -> Self {
        ClaimCheck { holds: lhs <= rhs, lhs, rhs, witnesses }
    }

    fn ge(lhs: i128, rhs: i128, witnesses: Vec<String>) -> Self {
        ClaimCheck { holds: lhs >= rhs, lhs, rhs, witnesses }
    }

    fn eq(lhs: i128, rhs: i128) -> Self {
        ClaimCheck { holds: lhs == rhs, lhs, rhs, witnesses: Vec::new() }
    }
}

pub type Claims = BTreeMap<String, ClaimCheck>;

fn all_hold(claims: &Claims) -> bool {
    claims.values().all(|c| c.holds)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkPair {
    pub v: usize,
    /// `{F \ {v} : v ∈ B_F}`.
    pub x: Family,
    /// `{F \ {v} : v ∈ F \ B_F}`.
    pub y: Family,
}

pub fn links(w: &WitnessedFamily, v: usize) -> Result<LinkPair> {
    let n = w.n();
    if v == 0 || v > n {
        return Err(Error::InvalidParameter(format!("vertex {v} not in [1, {n}]")));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (f, b) in w.pairs() {
        if b.contains(v) {
            x.push(f.without(v));
        } else if f.contains(v) {
            y.push(f.without(v));
        }
    }
    Ok(LinkPair { v, x: Family::uniform(n, w.d(), x)?, y: Family::uniform(n, w.d(), y)? })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkCounts {
    pub v: usize,
    pub x: usize,
    pub y: usize,
    /// `None` when `X_v` is empty.
    pub x_vc: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinkAudit {
    pub per_vertex: Vec<LinkCounts>,
    pub claims: Claims,
    pub holds: bool,
}

pub fn link_audit(w: &WitnessedFamily) -> Result<LinkAudit> {
    let (n, d, m) = (w.n(), w.d(), w.len() as i128);
    let per_vertex: Vec<LinkCounts> = (1..=n)
        .into_par_iter()
        .map(|v| {
            let l = links(w, v)?;
            let x_vc = if l.x.is_empty() { None } else { Some(vc_dimension(&l.x)?) };
            Ok(LinkCounts { v, x: l.x.len(), y: l.y.len(), x_vc })
        })
        .collect::<Result<_>>()?;

    let sum_xy: i128 = per_vertex.iter().map(|c| (c.x + c.y) as i128).sum();
    let sum_x: i128 = per_vertex.iter().map(|c| c.x as i128).sum();
    let sum_b: i128 = w.witnesses().iter().map(|b| b.cardinality() as i128).sum();
    let max_vc = per_vertex.iter().filter_map(|c| c.x_vc).max().map_or(-1, |v| v as i128);
    let vc_bad: Vec<String> = per_vertex
        .iter()
        .filter(|c| c.x_vc.is_some_and(|v| v + 1 > d))
        .map(|c| c.v.to_string())
        .collect();
    let x_cap = if d >= 1 { binomial(n as u64 - 1, d as u64 - 1) as i128 } else { 0 };
    let max_x = per_vertex.iter().map(|c| c.x as i128).max().unwrap_or(0);
    let x_bad: Vec<String> =
        per_vertex.iter().filter(|c| c.x as i128 > x_cap).map(|c| c.v.to_string()).collect();

    let mut claims = Claims::new();
    claims.insert("link_sum_identity".into(), ClaimCheck::eq(sum_xy, (d as i128 + 1) * m));
    claims.insert("x_link_vc_bound".into(), ClaimCheck::le(max_vc, d as i128 - 1, vc_bad));
    claims.insert("x_link_size_bound".into(), ClaimCheck::le(max_x, x_cap, x_bad));
    claims.insert("x_sum_equals_witness_sum".into(), ClaimCheck::eq(sum_x, sum_b));
    Ok(LinkAudit { holds: all_hold(&claims), per_vertex, claims })
}

/// `J = {v : C(n-1, d-1) - |X_v| >= n^(d-1) / s}`, compared exactly.
pub fn select_transversal(w: &WitnessedFamily, s: u64) -> Result<SubsetMask> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    let (n, d) = (w.n(), w.d());
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let cap = BigInt::from(binomial(n as u64 - 1, d as u64 - 1));
    let threshold = BigRational::new(BigInt::from(n).pow(d as u32 - 1), BigInt::from(s));
    let mut x_count = vec![0usize; n + 1];
    for b in w.witnesses() {
        for v in b.elements() {
            x_count[v] += 1;
        }
    }
    let chosen = (1..=n).filter(|&v| {
        let gap = BigRational::from_integer(&cap - BigInt::from(x_count[v]));
        gap >= threshold
    });
    SubsetMask::from_elements(n, chosen)
}

/// Edges `F \ J` over members meeting `J` in exactly one element.
pub fn build_gj(f: &Family, j: &SubsetMask) -> Result<Family> {
    let k = f
        .uniform_rank()
        .ok_or_else(|| Error::InvalidParameter("family has no declared uniform rank".into()))?;
    if k == 0 {
        return Err(Error::InvalidParameter("members must be nonempty".into()));
    }
    let mut edges: Vec<SubsetMask> =
        f.iter().filter(|m| m.intersection(j).cardinality() == 1).map(|m| m.difference(j)).collect();
    edges.sort_unstable();
    edges.dedup();
    Family::uniform(f.n(), k - 1, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AuxGraphCensus {
    /// `(d-1)`-sets `C` outside `J` with no `T^5` member having `B = C`.
    pub empty: i128,
    pub star: usize,
    pub triangle: usize,
    pub other: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionAudit {
    pub j: SubsetMask,
    /// `T^1 .. T^6`.
    pub parts: Vec<Family>,
    /// Member indices of each part.
    pub part_indices: Vec<Vec<usize>>,
    pub gj_edges: Family,
    pub deficiency: i128,
    /// Degree limit `100d + |J|` for sparse `(d-1)`-sets.
    pub sparse_limit: usize,
    /// `(d-1)`-subsets of `[n] \ J` lying in at most `sparse_limit` edges.
    pub sparse_sets: i128,
    pub aux_graphs: AuxGraphCensus,
    pub max_fiber: usize,
    pub max_witness_class: usize,
    pub claims: Claims,
    pub holds: bool,
}

fn classify(f: &SubsetMask, b: &SubsetMask, j: &SubsetMask, d: usize) -> usize {
    let fj = f.intersection(j).cardinality();
    let bj = b.intersection(j).cardinality();
    let bs = b.cardinality();
    if fj == 0 && bj == 0 && bs + 1 == d {
        0
    } else if bj == 0 && bs == d {
        1
    } else if fj == 1 && bj == 0 && bs + 1 == d {
        2
    } else if fj == 1 && bj == 1 && bs == d {
        3
    } else if fj == 2 && f.difference(j).is_subset_of(b) {
        4
    } else {
        5
    }
}

/// Number of the given edges containing each `(d-1)`-set that lies in some edge.
fn sub_degrees(edges: &Family, r: usize) -> HashMap<SubsetMask, usize> {
    let mut deg = HashMap::new();
    for e in edges {
        for c in e.subsets_of_size(r) {
            *deg.entry(c).or_insert(0) += 1;
        }
    }
    deg
}

pub fn partition_tj(w: &WitnessedFamily, j: &SubsetMask) -> Result<PartitionAudit> {
    let (n, d) = (w.n(), w.d());
    if j.n() != n {
        return Err(Error::GroundSetMismatch { expected: n, found: j.n() });
    }
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let mut part_indices: Vec<Vec<usize>> = vec![Vec::new(); 6];
    for (i, (f, b)) in w.pairs().enumerate() {
        part_indices[classify(&f, &b, j, d)].push(i);
    }
    let parts: Vec<Family> = part_indices.iter().map(|idx| w.family().select(idx)).collect();
    let gj_edges = build_gj(w.family(), j)?;
    let outside = (n - j.cardinality()) as i64;
    let deficiency = binomial_i(outside, d as i64) as i128 - gj_edges.len() as i128;

    let deg = sub_degrees(&gj_edges, d - 1);
    let sparse_limit = 100 * d + j.cardinality();
    let dense = deg.values().filter(|&&c| c > sparse_limit).count() as i128;
    let sparse_sets = binomial_i(outside, d as i64 - 1) as i128 - dense;

    let mut claims = Claims::new();
    let total: usize = part_indices.iter().map(Vec::len).sum();
    claims.insert("partition_complete".into(), ClaimCheck::eq(total as i128, w.len() as i128));
    claims.insert(
        "gj_deficiency_nonnegative".into(),
        ClaimCheck::ge(deficiency, 0, Vec::new()),
    );

    // A T^1 witness lies in at most d+1 edges of G_J.
    let mut t1_max = 0i128;
    let mut t1_bad = Vec::new();
    for &i in &part_indices[0] {
        let c = deg.get(&w.witness(i)).copied().unwrap_or(0) as i128;
        t1_max = t1_max.max(c);
        if c > d as i128 + 1 {
            t1_bad.push(w.member(i).to_string());
        }
    }
    claims.insert("t1_edge_degree".into(), ClaimCheck::le(t1_max, d as i128 + 1, t1_bad));
    let applicable = deficiency == 0 && outside - d as i64 + 1 > d as i64 + 1;
    let t1 = part_indices[0].len() as i128;
    claims.insert(
        "t1_empty_when_gj_complete".into(),
        ClaimCheck {
            holds: !applicable || t1 == 0,
            lhs: t1,
            rhs: 0,
            witnesses: if applicable { Vec::new() } else { vec!["not applicable".into()] },
        },
    );

    // phi: T^2 -> B, T^3 -> F \ J.
    let mut fibers: HashMap<SubsetMask, (usize, bool)> = HashMap::new();
    for (p, idx) in part_indices.iter().enumerate().skip(1).take(2) {
        for &i in idx {
            let key = if p == 1 { w.witness(i) } else { w.member(i).difference(j) };
            let e = fibers.entry(key).or_insert((0, false));
            e.0 += 1;
            e.1 |= p == 1;
        }
    }
    let max_fiber = fibers.values().map(|f| f.0).max().unwrap_or(0);
    let max_witness_class = witness_groups(w).values().map(Vec::len).max().unwrap_or(0);
    let fiber_cap = d * max_witness_class;
    let mut big: Vec<_> = fibers.iter().filter(|f| f.1 .0 > fiber_cap).map(|f| f.0.to_string()).collect();
    big.sort();
    claims.insert("phi_fiber_bound".into(), ClaimCheck::le(max_fiber as i128, fiber_cap as i128, big));
    let mut shared: Vec<_> =
        fibers.iter().filter(|f| f.1 .1 && f.1 .0 > 1).map(|f| f.0.to_string()).collect();
    shared.sort();
    claims.insert("t2_fibers_singleton".into(), ClaimCheck::le(shared.len() as i128, 0, shared));

    // Auxiliary graphs on J from T^5 members with B = F \ J.
    let mut aux: BTreeMap<SubsetMask, Vec<SubsetMask>> = BTreeMap::new();
    for &i in &part_indices[4] {
        let (f, b) = (w.member(i), w.witness(i));
        if b == f.difference(j) {
            aux.entry(b).or_default().push(f.intersection(j));
        }
    }
    let mut census = AuxGraphCensus { empty: 0, star: 0, triangle: 0, other: 0 };
    let mut other = Vec::new();
    for (c, edges) in &aux {
        let common = edges.iter().fold(edges[0], |acc, e| acc.intersection(e));
        let pairwise = edges.iter().enumerate().all(|(a, x)| edges[a + 1..].iter().all(|y| !x.intersection(y).is_empty()));
        if !common.is_empty() {
            census.star += 1;
        } else if pairwise && edges.len() == 3 {
            census.triangle += 1;
        } else {
            census.other += 1;
            other.push(c.to_string());
        }
    }
    census.empty = binomial_i(outside, d as i64 - 1) as i128 - aux.len() as i128;
    claims.insert("aux_graph_shapes".into(), ClaimCheck::le(census.other as i128, 0, other));

    // T^6 witnesses keep at most d-2 elements outside J.
    let mut t6_max = -1i128;
    let mut t6_bad = Vec::new();
    for &i in &part_indices[5] {
        let c = w.witness(i).difference(j).cardinality() as i128;
        t6_max = t6_max.max(c);
        if c > d as i128 - 2 {
            t6_bad.push(w.member(i).to_string());
        }
    }
    claims.insert("t6_outside_witness".into(), ClaimCheck::le(t6_max, d as i128 - 2, t6_bad));

    // Sum of |Y_v| over J against |F| minus the rest.
    let mut y_in = 0i128;
    let mut y_out = 0i128;
    for (f, b) in w.pairs() {
        for v in f.difference(&b).elements() {
            if j.contains(v) {
                y_in += 1;
            } else {
                y_out += 1;
            }
        }
    }
    claims.insert("transversal_sum".into(), ClaimCheck::ge(y_in, w.len() as i128 - y_out, Vec::new()));

    Ok(PartitionAudit {
        j: *j,
        parts,
        part_indices,
        gj_edges,
        deficiency,
        sparse_limit,
        sparse_sets,
        aux_graphs: census,
        max_fiber,
        max_witness_class,
        holds: all_hold(&claims),
        claims,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum S1Case {
    /// Good elements map around a cycle.
    Cycle,
    /// More than one terminal bad element.
    BLarge,
    /// One terminal bad element and a member avoiding it and every good element.
    BSingleWithOutsideF,
    /// One terminal bad element met by every member.
    StarCase,
    /// No good elements.
    BEmpty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct S1Report {
    pub n: usize,
    pub d: usize,
    /// `6 n^(d-2)`; `None` if it overflows.
    pub threshold: Option<u128>,
    pub good: Vec<usize>,
    pub f_map: BTreeMap<usize, usize>,
    pub b_map: BTreeMap<usize, usize>,
    pub b_set: Vec<usize>,
    pub f_good: Family,
    pub cycle: Vec<usize>,
    pub case: S1Case,
    pub claims: Claims,
    pub holds: bool,
}

pub fn analyze_s1(w: &WitnessedFamily) -> Result<S1Report> {
    let (n, d) = (w.n(), w.d());
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
    }
    if let Some((index, b)) = w.witnesses().iter().enumerate().find(|(_, b)| b.cardinality() != 1) {
        return Err(Error::WitnessSizeNotOne { index, size: b.cardinality() });
    }
    let threshold = (n as u128).checked_pow(d as u32 - 2).and_then(|p| p.checked_mul(6));
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, b) in w.witnesses().iter().enumerate() {
        classes.entry(b.min_element().expect("singleton")).or_default().push(i);
    }
    let good: BTreeSet<usize> = classes
        .iter()
        .filter(|(_, idx)| threshold.is_some_and(|t| idx.len() as u128 >= t))
        .map(|(&a, _)| a)
        .collect();

    let mut f_map = BTreeMap::new();
    for &a in &good {
        let xa = Family::uniform(n, d, classes[&a].iter().map(|&i| w.member(i).without(a)).collect())?;
        match find_centered_disjoint(&xa, d) {
            Ok(Some(c)) => {
                f_map.insert(a, c.ell);
            }
            Ok(None) => {
                return Err(Error::Inconsistency(format!(
                    "link of good element {a} has no centered disjoint {}-family",
                    d + 1
                )))
            }
            Err(e) => return Err(Error::Inconsistency(format!("link of good element {a}: {e}"))),
        }
    }

    let mut b_map = BTreeMap::new();
    let mut cycle = Vec::new();
    for &a in &good {
        let mut path = vec![a];
        let mut cur = f_map[&a];
        while good.contains(&cur) {
            if let Some(pos) = path.iter().position(|&p| p == cur) {
                if cycle.is_empty() {
                    cycle = path[pos..].to_vec();
                }
                break;
            }
            path.push(cur);
            cur = f_map[&cur];
        }
        if !good.contains(&cur) {
            b_map.insert(a, cur);
        }
    }

    let good_mask = SubsetMask::from_elements(n, good.iter().copied())?;
    let f_good = w.family().filter(|m| !m.intersection(&good_mask).is_empty());
    let b_set: Vec<usize> = b_map.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let case = if !cycle.is_empty() {
        S1Case::Cycle
    } else if good.is_empty() {
        S1Case::BEmpty
    } else if b_set.len() > 1 {
        S1Case::BLarge
    } else {
        let avoid = good_mask.with(b_set[0]);
        if w.family().iter().any(|m| m.intersection(&avoid).is_empty()) {
            S1Case::BSingleWithOutsideF
        } else {
            S1Case::StarCase
        }
    };

    let mut claims = Claims::new();
    let mut miss = Vec::new();
    let mut miss_b = Vec::new();
    for (&a, &l) in &f_map {
        for m in w.family().iter().filter(|m| m.contains(a)) {
            if !m.contains(l) {
                miss.push(format!("{a}->{l} {m}"));
            }
            if let Some(&b) = b_map.get(&a) {
                if !m.contains(b) {
                    miss_b.push(format!("{a}->{b} {m}"));
                }
            }
        }
    }
    claims.insert("good_implies_image".into(), ClaimCheck::le(miss.len() as i128, 0, miss));
    if cycle.is_empty() {
        claims.insert("good_implies_terminal".into(), ClaimCheck::le(miss_b.len() as i128, 0, miss_b));
        let g = good.len() as i64;
        let base = binomial(n as u64 - 1, d as u64) as i128 - binomial_i(n as i64 - 1 - g, d as i64) as i128;
        let fg = f_good.len() as i128;
        claims.insert("f_good_bound".into(), ClaimCheck::le(fg, base, Vec::new()));
        match case {
            S1Case::BLarge => {
                let rhs = base - binomial_i(g - 1, d as i64 - 1) as i128;
                claims.insert("f_good_bound_b_large".into(), ClaimCheck::le(fg, rhs, Vec::new()));
            }
            S1Case::BSingleWithOutsideF => {
                let rhs = base - binomial_i(g, d as i64 - 1) as i128;
                claims.insert("f_good_bound_outside_f".into(), ClaimCheck::le(fg, rhs, Vec::new()));
            }
            _ => {}
        }
        if let Some(t) = threshold {
            let rest = (w.len() - f_good.len()) as i128;
            let bound = (n - good.len()) as i128 * t as i128;
            claims.insert("bad_part_bound".into(), ClaimCheck::le(rest, bound, Vec::new()));
        }
    }
    Ok(S1Report {
        n,
        d,
        threshold,
        good: good.into_iter().collect(),
        f_map,
        b_map,
        b_set,
        f_good,
        cycle,
        case,
        holds: all_hold(&claims),
        claims,
    })
}
