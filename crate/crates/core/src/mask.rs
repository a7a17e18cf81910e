//! Subsets of a ground set `[n]` stored as fixed-width bit vectors.
//!
//! Element `e` (1-based) lives at bit `e - 1`. With this layout the numeric
//! order of masks of equal cardinality is exactly the colex order, which is the
//! canonical enumeration order used throughout the crate.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_N: usize = 128;

/// A subset of `[n]` for `n <= 128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    bits: u128,
    n: u8,
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::GroundSetTooLarge { n });
    }
    Ok(())
}

#[inline]
pub(crate) fn full_bits(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl SubsetMask {
    /// The empty subset of `[n]`.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetMask { bits: 0, n: n as u8 })
    }

    /// All of `[n]`.
    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(SubsetMask { bits: full_bits(n), n: n as u8 })
    }

    pub fn from_bits(n: usize, bits: u128) -> Result<Self> {
        check_n(n)?;
        if bits & !full_bits(n) != 0 {
            let e = 128 - bits.leading_zeros() as usize;
            return Err(Error::ElementOutOfRange { element: e as u64, n });
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    /// Build from 1-based elements. Repeated elements are rejected.
    pub fn from_elements<I>(n: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        check_n(n)?;
        let mut bits = 0u128;
        for e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e as u64, n });
            }
            let b = 1u128 << (e - 1);
            if bits & b != 0 {
                return Err(Error::DuplicateElement { element: e });
            }
            bits |= b;
        }
        Ok(SubsetMask { bits, n: n as u8 })
    }

    /// Internal constructor for bits already known to fit.
    #[inline]
    pub(crate) fn raw(n: usize, bits: u128) -> Self {
        debug_assert!(n >= 1 && n <= MAX_N && bits & !full_bits(n) == 0);
        SubsetMask { bits, n: n as u8 }
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn n(&self) -> usize {
        // n is stored as u8; 128 fits.
        self.n as usize
    }

    #[inline]
    pub fn cardinality(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e >= 1 && e <= self.n() && self.bits >> (e - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn is_proper_subset_of(&self, other: &SubsetMask) -> bool {
        self.is_subset_of(other) && self.bits != other.bits
    }

    #[inline]
    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask { bits: self.bits & other.bits, n: self.n }
    }

    #[inline]
    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask { bits: self.bits | other.bits, n: self.n }
    }

    #[inline]
    pub fn difference(&self, other: &SubsetMask) -> SubsetMask {
        SubsetMask { bits: self.bits & !other.bits, n: self.n }
    }

    /// `[n]` minus this set.
    #[inline]
    pub fn complement(&self) -> SubsetMask {
        SubsetMask { bits: !self.bits & full_bits(self.n()), n: self.n }
    }

    #[inline]
    pub fn with(&self, e: usize) -> SubsetMask {
        debug_assert!(e >= 1 && e <= self.n());
        SubsetMask { bits: self.bits | 1u128 << (e - 1), n: self.n }
    }

    #[inline]
    pub fn without(&self, e: usize) -> SubsetMask {
        debug_assert!(e >= 1 && e <= self.n());
        SubsetMask { bits: self.bits & !(1u128 << (e - 1)), n: self.n }
    }

    /// Elements in ascending order.
    pub fn elements(&self) -> Elements {
        Elements { bits: self.bits }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.elements().collect()
    }

    /// Smallest element, if any.
    pub fn min_element(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize + 1)
    }

    /// Subsets of this set with exactly `k` elements, in colex order.
    pub fn subsets_of_size(&self, k: usize) -> SubsetsOfSize {
        SubsetsOfSize::new(*self, k)
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order of the bit vector, which is colex order on subsets.
impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.bits.cmp(&other.bits).then(self.n.cmp(&other.n))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Serialized as the ascending element list.
impl serde::Serialize for SubsetMask {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.elements())
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub struct Elements {
    bits: u128,
}

impl Iterator for Elements {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let t = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(t + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.bits.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

/// Next larger integer with the same popcount (Gosper's hack), or `None` when
/// the result would need more than `width` bits.
#[inline]
pub(crate) fn next_same_popcount(x: u128, width: usize) -> Option<u128> {
    if x == 0 {
        return None;
    }
    let c = x & x.wrapping_neg();
    let (r, overflow) = x.overflowing_add(c);
    if overflow || r == 0 {
        return None;
    }
    let ones = ((r ^ x) >> 2) >> c.trailing_zeros();
    let next = r | ones;
    if width < 128 && next >> width != 0 {
        return None;
    }
    Some(next)
}

/// Colex-ordered stream of all `k`-subsets of `[n]`. Constant memory.
#[derive(Clone, Debug)]
pub struct KSubsets {
    n: usize,
    next: Option<u128>,
}

impl Iterator for KSubsets {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let cur = self.next?;
        self.next = next_same_popcount(cur, self.n);
        Some(SubsetMask::raw(self.n, cur))
    }
}

/// All `k`-subsets of `[n]` in colex order.
///
/// Yields nothing when `k > n`; yields the single empty set when `k == 0`.
pub fn enumerate_k_subsets(n: usize, k: usize) -> Result<KSubsets> {
    check_n(n)?;
    let next = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some(full_bits(k))
    };
    Ok(KSubsets { n, next })
}

/// `k`-subsets of a fixed set, in colex order.
pub struct SubsetsOfSize {
    base: SubsetMask,
    positions: Vec<u8>,
    index: Option<u128>,
    width: usize,
}

impl SubsetsOfSize {
    fn new(base: SubsetMask, k: usize) -> Self {
        let positions: Vec<u8> = base.elements().map(|e| (e - 1) as u8).collect();
        let width = positions.len();
        let index = if k > width {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some(full_bits(k))
        };
        SubsetsOfSize { base, positions, index, width }
    }
}

impl Iterator for SubsetsOfSize {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let idx = self.index?;
        self.index = next_same_popcount(idx, self.width);
        let mut bits = 0u128;
        let mut rest = idx;
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            bits |= 1u128 << self.positions[t];
            rest &= rest - 1;
        }
        Some(SubsetMask::raw(self.base.n(), bits))
    }
}

/// Exact binomial coefficient. Returns 0 when `k > n`.
///
/// Panics if the result does not fit in `u128`, which cannot happen for `n <= 128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc = C(n, i); acc * (n - i) is divisible by i + 1, and after removing
        // g = gcd(acc, i + 1) the remaining divisor must divide n - i.
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let num = (n - i) as u128 / (den / g);
        acc = (acc / g).checked_mul(num).expect("binomial overflow");
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Binomial for signed arguments: zero when `k < 0` or `n < k`.
pub fn binomial_i(n: i64, k: i64) -> u128 {
    if k < 0 || n < 0 || k > n {
        0
    } else {
        binomial(n as u64, k as u64)
    }
}
