//! Set families over a shared ground set and the plain-text family format.
//!
//! The file format is line oriented:
//!
//! ```text
//! # optional comments
//! 5 3
//! 1 2 5
//! 1 3 5
//! ```
//!
//! The header is `n` or `n k`; when `k` is present every set must have exactly
//! `k` elements. Each further non-empty line is one set, written as ascending
//! 1-based integers. The empty set is written as a single `-`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::mask::{check_n, enumerate_k_subsets, SubsetMask};

/// An ordered, duplicate-free collection of subsets of `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: usize,
    members: Vec<SubsetMask>,
    uniform_rank: Option<usize>,
}

impl Family {
    pub fn new(n: usize, members: Vec<SubsetMask>, uniform_rank: Option<usize>) -> Result<Self> {
        check_n(n)?;
        let mut seen = HashSet::with_capacity(members.len());
        for m in &members {
            if m.n() != n {
                return Err(Error::GroundSetMismatch { expected: n, found: m.n() });
            }
            if let Some(k) = uniform_rank {
                if m.cardinality() != k {
                    return Err(Error::WrongCardinality {
                        set: m.to_string(),
                        expected: k,
                        found: m.cardinality(),
                    });
                }
            }
            if !seen.insert(m.bits()) {
                return Err(Error::DuplicateMember { set: m.to_string() });
            }
        }
        Ok(Family { n, members, uniform_rank })
    }

    /// A `k`-uniform family.
    pub fn uniform(n: usize, k: usize, members: Vec<SubsetMask>) -> Result<Self> {
        Family::new(n, members, Some(k))
    }

    pub fn empty(n: usize, uniform_rank: Option<usize>) -> Result<Self> {
        Family::new(n, Vec::new(), uniform_rank)
    }

    /// All `k`-subsets of `[n]` in colex order.
    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let members = enumerate_k_subsets(n, k)?.collect();
        Ok(Family { n, members, uniform_rank: Some(k) })
    }

    /// Build from 1-based element lists.
    pub fn from_lists<I, S>(n: usize, uniform_rank: Option<usize>, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let members = sets
            .into_iter()
            .map(|s| SubsetMask::from_elements(n, s))
            .collect::<Result<Vec<_>>>()?;
        Family::new(n, members, uniform_rank)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn uniform_rank(&self) -> Option<usize> {
        self.uniform_rank
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SubsetMask> {
        self.members.iter()
    }

    pub fn contains(&self, set: &SubsetMask) -> bool {
        self.members.iter().any(|m| m == set)
    }

    /// True when every member has exactly `k` elements, whether or not the
    /// family was declared uniform.
    pub fn is_k_uniform(&self, k: usize) -> bool {
        match self.uniform_rank {
            Some(r) => r == k,
            None => self.members.iter().all(|m| m.cardinality() == k),
        }
    }

    /// Errors unless the family is `k`-uniform.
    pub fn require_uniform(&self, k: usize) -> Result<()> {
        if self.is_k_uniform(k) {
            Ok(())
        } else {
            Err(Error::NotUniform { k })
        }
    }

    /// The same members re-tagged as `k`-uniform.
    pub fn with_rank(&self, k: usize) -> Result<Family> {
        Family::new(self.n, self.members.clone(), Some(k))
    }

    /// Members sorted into colex order.
    pub fn sorted(&self) -> Family {
        let mut members = self.members.clone();
        members.sort();
        Family { n: self.n, members, uniform_rank: self.uniform_rank }
    }

    /// Same member set, ignoring order.
    pub fn same_members(&self, other: &Family) -> bool {
        if self.n != other.n || self.len() != other.len() {
            return false;
        }
        let a: HashSet<u128> = self.members.iter().map(|m| m.bits()).collect();
        other.members.iter().all(|m| a.contains(&m.bits()))
    }

    pub fn member_bits(&self) -> HashSet<u128> {
        self.members.iter().map(|m| m.bits()).collect()
    }

    /// Subfamily keeping the members selected by `keep`, in order.
    pub fn filter<P: FnMut(&SubsetMask) -> bool>(&self, mut keep: P) -> Family {
        Family {
            n: self.n,
            members: self.members.iter().copied().filter(|m| keep(m)).collect(),
            uniform_rank: self.uniform_rank,
        }
    }

    /// Subfamily at the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Family {
        Family {
            n: self.n,
            members: indices.iter().map(|&i| self.members[i]).collect(),
            uniform_rank: self.uniform_rank,
        }
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.members.iter().map(|m| m.to_vec()).collect()
    }

    /// `true` when every two members intersect.
    pub fn is_intersecting(&self) -> bool {
        self.first_disjoint_pair().is_none()
    }

    pub fn first_disjoint_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                if self.members[i].intersection(&self.members[j]).is_empty() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Intersection of all members; `[n]` for the empty family.
    pub fn common_intersection(&self) -> SubsetMask {
        let full = SubsetMask::full(self.n).expect("n already validated");
        self.members.iter().fold(full, |acc, m| acc.intersection(m))
    }

    /// Union of all members.
    pub fn union_all(&self) -> SubsetMask {
        let empty = SubsetMask::empty(self.n).expect("n already validated");
        self.members.iter().fold(empty, |acc, m| acc.union(m))
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a SubsetMask;
    type IntoIter = std::slice::Iter<'a, SubsetMask>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl serde::Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Family", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("k", &self.uniform_rank)?;
        st.serialize_field("members", &self.members)?;
        st.end()
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize_family(self))
    }
}

pub(crate) fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        message: format!("expected a non-negative integer, found {tok:?}"),
    })
}

/// Parse a set written as ascending integers (or `-` for the empty set).
pub(crate) fn parse_set(text: &str, n: usize, line: usize) -> Result<SubsetMask> {
    let text = text.trim();
    if text == "-" || text.is_empty() {
        return SubsetMask::empty(n);
    }
    let mut elements = Vec::new();
    for tok in text.split_whitespace() {
        let e = parse_usize(tok, line)?;
        if e == 0 || e > n {
            return Err(Error::ElementOutOfRange { element: e as u64, n });
        }
        elements.push(e);
    }
    SubsetMask::from_elements(n, elements)
}

pub(crate) fn write_set(out: &mut String, set: &SubsetMask) {
    if set.is_empty() {
        out.push('-');
        return;
    }
    for (i, e) in set.elements().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{e}");
    }
}

/// Header line and the remaining data lines (comments and blanks dropped).
pub(crate) fn split_header(text: &str) -> Result<((usize, Option<usize>), Vec<(usize, &str)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let (n, k) = match toks.as_slice() {
        [n] => (parse_usize(n, hline)?, None),
        [n, k] => (parse_usize(n, hline)?, Some(parse_usize(k, hline)?)),
        _ => {
            return Err(Error::Parse {
                line: hline,
                message: format!("malformed header {header:?}, expected \"n\" or \"n k\""),
            })
        }
    };
    check_n(n).map_err(|e| Error::Parse { line: hline, message: e.to_string() })?;
    if let Some(k) = k {
        if k > n {
            return Err(Error::Parse { line: hline, message: format!("k = {k} exceeds n = {n}") });
        }
    }
    Ok(((n, k), lines.collect()))
}

/// Parse the family file format.
pub fn parse_family(text: &str) -> Result<Family> {
    let ((n, k), lines) = split_header(text)?;
    let mut members = Vec::with_capacity(lines.len());
    let mut seen = HashSet::new();
    for (line, body) in lines {
        let set = parse_set(body, n, line)?;
        if let Some(k) = k {
            if set.cardinality() != k {
                return Err(Error::WrongCardinality {
                    set: set.to_string(),
                    expected: k,
                    found: set.cardinality(),
                });
            }
        }
        if !seen.insert(set.bits()) {
            return Err(Error::DuplicateMember { set: set.to_string() });
        }
        members.push(set);
    }
    Family::new(n, members, k)
}

/// Canonical text form: header, then one ascending line per member in order.
pub fn serialize_family(f: &Family) -> String {
    let mut out = String::new();
    match f.uniform_rank {
        Some(k) => {
            let _ = writeln!(out, "{} {}", f.n, k);
        }
        None => {
            let _ = writeln!(out, "{}", f.n);
        }
    }
    for m in &f.members {
        write_set(&mut out, m);
        out.push('\n');
    }
    out
}

/// `binom([n], k)` minus the members of `f`, in colex order.
pub fn complement_family(f: &Family, k: usize) -> Result<Family> {
    f.require_uniform(k)?;
    let present = f.member_bits();
    let members = enumerate_k_subsets(f.n, k)?
        .filter(|m| !present.contains(&m.bits()))
        .collect();
    Ok(Family { n: f.n, members, uniform_rank: Some(k) })
}
