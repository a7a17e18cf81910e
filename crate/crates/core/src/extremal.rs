//! Named constructions: stars, the two-sided construction reaching
//! `C(n-1,d) + C(n-4,d-2)`, the non-star stability family and Hamming balls.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mask::{binomial, check_n, enumerate_k_subsets, SubsetMask};
use crate::vc::WitnessedFamily;

/// All `k`-subsets of `[n]` containing `center`, in colex order.
pub fn star(n: usize, k: usize, center: usize) -> Result<Family> {
    check_n(n)?;
    if center == 0 || center > n {
        return Err(Error::InvalidParameter(format!("center {center} not in [1, {n}]")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let members = enumerate_k_subsets(n, k)?.filter(|m| m.contains(center)).collect();
    Family::uniform(n, k, members)
}

/// Which side a `d`-subset of `[n] \ {1,2,3,4}` is sent to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    One,
    Two,
}

/// Total map from `binom([n] \ {1,2,3,4}, d)` to [`Side`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MzAssignment {
    pub n: usize,
    pub d: usize,
    pub sides: BTreeMap<SubsetMask, Side>,
}

fn free_sets(n: usize, d: usize) -> Result<impl Iterator<Item = SubsetMask>> {
    let low = SubsetMask::from_elements(n, 1..=4.min(n))?;
    Ok(enumerate_k_subsets(n, d)?.filter(move |m| m.intersection(&low).is_empty()))
}

impl MzAssignment {
    /// Every free set sent to side one (the default).
    pub fn all_one(n: usize, d: usize) -> Result<Self> {
        Self::constant(n, d, Side::One)
    }

    pub fn constant(n: usize, d: usize, side: Side) -> Result<Self> {
        let sides = free_sets(n, d)?.map(|m| (m, side)).collect();
        Ok(MzAssignment { n, d, sides })
    }

    pub fn random<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        let sides = free_sets(n, d)?
            .map(|m| (m, if rng.random_bool(0.5) { Side::One } else { Side::Two }))
            .collect();
        Ok(MzAssignment { n, d, sides })
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }
}

/// Member types of the construction, by witness shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MzType {
    /// Contains `{1,2}`; witness `F \ {1,2}`.
    PairOneTwo,
    /// `{1} ∪ G` with `G ∈ G1 \ G2`; witness `G`.
    SideOne,
    /// `{2} ∪ G` with `G ∈ G2 \ G1`; witness `G`.
    SideTwo,
    /// `{1} ∪ G` or `{2} ∪ G` with `G ∈ G1 ∩ G2`; witness `F \ {1,4}` or `F \ {2,3}`.
    Shared,
}

#[derive(Clone, Debug)]
pub struct MzConstruction {
    pub witnessed: WitnessedFamily,
    /// Member types, aligned with `witnessed`'s member order.
    pub types: Vec<MzType>,
    pub g1: Family,
    pub g2: Family,
}

/// The construction with its intended witnesses and bookkeeping.
pub fn mz_construction(n: usize, d: usize, assignment: &MzAssignment) -> Result<MzConstruction> {
    check_n(n)?;
    if d == 0 || n < 2 * (d + 1) {
        return Err(Error::InvalidParameter(format!("need d >= 1 and n >= 2(d+1), got n = {n}, d = {d}")));
    }
    if assignment.n != n || assignment.d != d {
        return Err(Error::AssignmentNotTotal(format!(
            "assignment is for (n, d) = ({}, {}), not ({n}, {d})",
            assignment.n, assignment.d
        )));
    }
    let free: Vec<SubsetMask> = free_sets(n, d)?.collect();
    if let Some(missing) = free.iter().find(|m| !assignment.sides.contains_key(m)) {
        return Err(Error::AssignmentNotTotal(format!("no side for {missing}")));
    }
    if assignment.sides.len() != free.len() {
        let extra = assignment
            .sides
            .keys()
            .find(|k| k.cardinality() != d || (1..=4).any(|e| k.contains(e)))
            .map(|k| k.to_string())
            .unwrap_or_default();
        return Err(Error::AssignmentNotTotal(format!("unexpected key {extra}")));
    }

    let one = SubsetMask::from_elements(n, [1])?;
    let two = SubsetMask::from_elements(n, [2])?;
    let one_two = one.union(&two);
    let mut rows: Vec<(SubsetMask, SubsetMask, MzType)> = Vec::new();
    let (mut g1, mut g2) = (Vec::new(), Vec::new());

    for c in enumerate_k_subsets(n, d - 1)?.filter(|c| c.intersection(&one_two).is_empty()) {
        rows.push((c.union(&one_two), c, MzType::PairOneTwo));
    }
    for g in enumerate_k_subsets(n, d)?.filter(|g| g.intersection(&one_two).is_empty()) {
        let side = assignment.sides.get(&g).copied();
        let in1 = g.contains(3) || side == Some(Side::One);
        let in2 = g.contains(4) || side == Some(Side::Two);
        if in1 {
            g1.push(g);
        }
        if in2 {
            g2.push(g);
        }
        match (in1, in2) {
            (true, true) => {
                rows.push((g.union(&one), g.without(4), MzType::Shared));
                rows.push((g.union(&two), g.without(3), MzType::Shared));
            }
            (true, false) => rows.push((g.union(&one), g, MzType::SideOne)),
            (false, true) => rows.push((g.union(&two), g, MzType::SideTwo)),
            (false, false) => unreachable!("every d-set lands on a side"),
        }
    }
    rows.sort_by_key(|r| r.0);
    let family = Family::uniform(n, d + 1, rows.iter().map(|r| r.0).collect())?;
    let witnesses = rows.iter().map(|r| r.1).collect();
    let types = rows.iter().map(|r| r.2).collect();
    let witnessed = WitnessedFamily::new(family, d, witnesses)?;
    Ok(MzConstruction {
        witnessed,
        types,
        g1: Family::uniform(n, d, g1)?,
        g2: Family::uniform(n, d, g2)?,
    })
}

/// The construction as a witnessed family, members in colex order.
pub fn mz_family(n: usize, d: usize, assignment: &MzAssignment) -> Result<WitnessedFamily> {
    Ok(mz_construction(n, d, assignment)?.witnessed)
}

/// `C(n-1, d) + C(n-4, d-2)`.
pub fn mz_size(n: usize, d: usize) -> u128 {
    let d2 = if d >= 2 { binomial(n as u64 - 4, d as u64 - 2) } else { 0 };
    binomial(n as u64 - 1, d as u64) + d2
}

/// `{A} ∪ {G ∪ {1} : G ∈ binom([n]\{1}, d) \ binom(A, d)}` with
/// `A = {2, ..., d+2}`; a non-star family of size `C(n-1,d) - d` in which
/// every member has a witness of size `d`.
pub fn stability_example(n: usize, d: usize) -> Result<Family> {
    check_n(n)?;
    if d == 0 || n < d + 3 {
        return Err(Error::InvalidParameter(format!("need d >= 1 and n >= d+3, got n = {n}, d = {d}")));
    }
    let a = SubsetMask::from_elements(n, 2..=d + 2)?;
    let mut members = vec![a];
    for g in enumerate_k_subsets(n, d)? {
        if g.contains(1) || g.is_subset_of(&a) {
            continue;
        }
        members.push(g.with(1));
    }
    members.sort();
    Family::uniform(n, d + 1, members)
}

/// All subsets of `[n]` with at most `d` elements, by size then colex.
pub fn hamming_ball(n: usize, d: usize) -> Result<Family> {
    check_n(n)?;
    if d > n {
        return Err(Error::InvalidParameter(format!("radius {d} exceeds n = {n}")));
    }
    let total: u128 = (0..=d as u64).map(|i| binomial(n as u64, i)).sum();
    if total > 10_000_000 {
        return Err(Error::TooLarge(format!("Hamming ball has {total} members")));
    }
    let mut members = Vec::with_capacity(total as usize);
    for i in 0..=d {
        members.extend(enumerate_k_subsets(n, i)?);
    }
    Family::new(n, members, None)
}
