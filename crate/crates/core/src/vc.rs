//! Shattering, VC-dimension and witness sets.
//!
//! For a `(d+1)`-uniform family, VC-dimension at most `d` is equivalent to every
//! member `F_i` having a witness: a proper subset `B_i` that is not the trace
//! `F ∩ F_i` of any member `F`. The canonical witness is the largest such set,
//! ties broken by the smallest mask.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{parse_set, split_header, write_set, Family};
use crate::mask::{enumerate_k_subsets, SubsetMask};

/// True iff `{F ∩ S : F ∈ f}` realises all `2^|S|` subsets of `s`.
pub fn shatters(f: &Family, s: &SubsetMask) -> bool {
    let size = s.cardinality();
    if size >= 63 || (1usize << size) > f.len() {
        return false;
    }
    let need = 1usize << size;
    let mut traces = HashSet::with_capacity(need);
    for m in f {
        traces.insert(m.intersection(s).bits());
        if traces.len() == need {
            return true;
        }
    }
    false
}

/// Largest size of a shattered set.
///
/// Ascending search: a shattered set has only shattered subsets, so the first
/// size with no shattered set ends the search. Candidates of size `t` are the
/// `t`-subsets of members, since a shattered `S` must itself be a trace.
pub fn vc_dimension(f: &Family) -> Result<usize> {
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut best = 0;
    let max_size = f.iter().map(|m| m.cardinality()).max().unwrap_or(0);
    for t in 1..=max_size {
        if t >= 63 || (1usize << t) > f.len() {
            break;
        }
        let mut seen = HashSet::new();
        let mut found = false;
        'members: for m in f {
            if m.cardinality() < t {
                continue;
            }
            for s in m.subsets_of_size(t) {
                if !seen.insert(s.bits()) {
                    continue;
                }
                if shatters(f, &s) {
                    found = true;
                    break 'members;
                }
            }
        }
        if !found {
            break;
        }
        best = t;
    }
    Ok(best)
}

/// Traces `F ∩ target` over all members.
fn traces_on(f: &Family, target: &SubsetMask) -> HashSet<u128> {
    f.iter().map(|m| m.intersection(target).bits()).collect()
}

/// The canonical witness for `target`: proper subsets in order of descending
/// cardinality then ascending mask, first one that is not a trace.
fn canonical_witness(f: &Family, target: &SubsetMask) -> Option<SubsetMask> {
    let traces = traces_on(f, target);
    let k = target.cardinality();
    (0..k)
        .rev()
        .flat_map(|size| target.subsets_of_size(size))
        .find(|b| !traces.contains(&b.bits()))
}

/// A `(d+1)`-uniform family with one witness per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessedFamily {
    family: Family,
    d: usize,
    witnesses: Vec<SubsetMask>,
}

impl WitnessedFamily {
    /// Validates uniformity, that each witness is a proper subset of its
    /// member, and the witness property against every member.
    ///
    /// Maximality of the witnesses is not required here; see
    /// [`WitnessedFamily::non_canonical_witnesses`].
    pub fn new(family: Family, d: usize, witnesses: Vec<SubsetMask>) -> Result<Self> {
        family.require_uniform(d + 1)?;
        let family = if family.uniform_rank().is_none() { family.with_rank(d + 1)? } else { family };
        if witnesses.len() != family.len() {
            return Err(Error::InvalidParameter(format!(
                "{} witnesses for {} members",
                witnesses.len(),
                family.len()
            )));
        }
        for (i, (f, b)) in family.iter().zip(&witnesses).enumerate() {
            if b.n() != family.n() {
                return Err(Error::GroundSetMismatch { expected: family.n(), found: b.n() });
            }
            if !b.is_proper_subset_of(f) {
                return Err(Error::InvalidWitness {
                    index: i,
                    reason: format!("{b} is not a proper subset of {f}"),
                });
            }
            if let Some(other) = family.iter().find(|g| g.intersection(f) == *b) {
                return Err(Error::InvalidWitness {
                    index: i,
                    reason: format!("{other} ∩ {f} = {b}"),
                });
            }
        }
        let w = WitnessedFamily { family, d, witnesses };
        if let Some((i, j)) = w.repeated_size_d_witness() {
            return Err(Error::Inconsistency(format!(
                "members {i} and {j} share the size-d witness {}",
                w.witnesses[i]
            )));
        }
        Ok(w)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn witnesses(&self) -> &[SubsetMask] {
        &self.witnesses
    }

    pub fn member(&self, i: usize) -> SubsetMask {
        self.family.members()[i]
    }

    pub fn witness(&self, i: usize) -> SubsetMask {
        self.witnesses[i]
    }

    /// `(F_i, B_i)` pairs in member order.
    pub fn pairs(&self) -> impl Iterator<Item = (SubsetMask, SubsetMask)> + '_ {
        self.family.iter().copied().zip(self.witnesses.iter().copied())
    }

    /// Two members with equal witnesses of size `d`. Always `None` for a valid
    /// witnessed family.
    fn repeated_size_d_witness(&self) -> Option<(usize, usize)> {
        let mut seen: BTreeMap<u128, usize> = BTreeMap::new();
        for (i, b) in self.witnesses.iter().enumerate() {
            if b.cardinality() == self.d {
                if let Some(&j) = seen.get(&b.bits()) {
                    return Some((j, i));
                }
                seen.insert(b.bits(), i);
            }
        }
        None
    }

    /// Indices whose witness differs from the canonical (largest, then
    /// smallest-mask) choice, with the canonical witness.
    pub fn non_canonical_witnesses(&self) -> Vec<(usize, SubsetMask)> {
        self.family
            .iter()
            .enumerate()
            .filter_map(|(i, f)| {
                let c = canonical_witness(&self.family, f).expect("valid witnessed family");
                (c != self.witnesses[i]).then_some((i, c))
            })
            .collect()
    }

    /// Number of members whose witness has exactly `d` elements.
    pub fn count_size_d_witnesses(&self) -> usize {
        self.witnesses.iter().filter(|b| b.cardinality() == self.d).count()
    }
}

/// Canonical witnesses for every member of a `(d+1)`-uniform family.
///
/// Fails with [`Error::ShatteredMember`] naming the first member without a
/// witness, which certifies VC-dimension `d + 1`.
pub fn select_witnesses(f: &Family, d: usize) -> Result<WitnessedFamily> {
    f.require_uniform(d + 1)?;
    let found: Vec<Option<SubsetMask>> =
        f.members().par_iter().map(|m| canonical_witness(f, m)).collect();
    let mut witnesses = Vec::with_capacity(found.len());
    for (i, w) in found.into_iter().enumerate() {
        match w {
            Some(b) => witnesses.push(b),
            None => {
                return Err(Error::ShatteredMember { index: i, set: f.members()[i].to_string() })
            }
        }
    }
    let family = if f.uniform_rank().is_none() { f.with_rank(d + 1)? } else { f.clone() };
    Ok(WitnessedFamily { family, d, witnesses })
}

/// Member indices grouped by witness, keys in colex order.
pub fn witness_groups(w: &WitnessedFamily) -> BTreeMap<SubsetMask, Vec<usize>> {
    let mut groups: BTreeMap<SubsetMask, Vec<usize>> = BTreeMap::new();
    for (i, b) in w.witnesses.iter().enumerate() {
        groups.entry(*b).or_default().push(i);
    }
    groups
}

/// Parse a witnessed-family file: a family file whose set lines carry
/// `| b1 b2 ...` listing the witness.
pub fn parse_witnessed(text: &str) -> Result<WitnessedFamily> {
    let ((n, k), lines) = split_header(text)?;
    let k = k.ok_or(Error::Parse {
        line: 1,
        message: "witnessed families need a uniform header \"n k\"".into(),
    })?;
    if k == 0 {
        return Err(Error::Parse { line: 1, message: "k must be at least 1".into() });
    }
    let mut members = Vec::with_capacity(lines.len());
    let mut witnesses = Vec::with_capacity(lines.len());
    for (line, body) in lines {
        let (set, wit) = body.split_once('|').ok_or(Error::Parse {
            line,
            message: "missing \"| witness\" part".into(),
        })?;
        members.push(parse_set(set, n, line)?);
        witnesses.push(parse_set(wit, n, line)?);
    }
    let family = Family::uniform(n, k, members)?;
    WitnessedFamily::new(family, k - 1, witnesses)
}

pub fn serialize_witnessed(w: &WitnessedFamily) -> String {
    let mut out = format!("{} {}\n", w.n(), w.d + 1);
    for (f, b) in w.pairs() {
        write_set(&mut out, &f);
        out.push_str(" |");
        if !b.is_empty() {
            out.push(' ');
            write_set(&mut out, &b);
        }
        out.push('\n');
    }
    out
}

/// All `k`-subsets of `[n]` as a family; convenience for tests and callers.
pub fn complete_uniform(n: usize, k: usize) -> Result<Family> {
    Family::uniform(n, k, enumerate_k_subsets(n, k)?.collect())
}
