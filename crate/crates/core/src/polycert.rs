//! Rank certificates for `|F| <= C(n,d) - s`.
//!
//! Polynomials `y_Y`, `f_F`, `h_H` are evaluated at 0/1 indicator vectors;
//! the resulting square matrix has full rank exactly when the certificate
//! holds. Rank is computed over the rationals without rounding.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{serialize_family, Family};
use crate::mask::{binomial, enumerate_k_subsets, SubsetMask};
use crate::vc::WitnessedFamily;

/// Largest matrix side accepted by [`assemble_matrix`].
pub const MAX_SIDE: usize = 50_000;

/// Polynomial kinds indexed by their support sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Poly {
    /// `prod_{B} x_j * prod_{F\B} (x_j - 1) - prod_{F} x_j`.
    F { f: SubsetMask, b: SubsetMask },
    /// `-prod_{Z} x_j`.
    Y { z: SubsetMask },
    /// `sum_{j not in H} x_j prod_{H} x_j + (|H| - d - 1) prod_{H} x_j`.
    H { h: SubsetMask },
}

fn eval_int(poly: &Poly, point: &SubsetMask, d: usize) -> i64 {
    match poly {
        Poly::F { f, b } => {
            let first = if f.intersection(point) == *b {
                if (f.cardinality() - b.cardinality()) % 2 == 0 { 1 } else { -1 }
            } else {
                0
            };
            first - f.is_subset_of(point) as i64
        }
        Poly::Y { z } => -(z.is_subset_of(point) as i64),
        Poly::H { h } => {
            if h.is_subset_of(point) {
                point.cardinality() as i64 - d as i64 - 1
            } else {
                0
            }
        }
    }
}

fn support_n(poly: &Poly) -> usize {
    match poly {
        Poly::F { f, .. } => f.n(),
        Poly::Y { z } => z.n(),
        Poly::H { h } => h.n(),
    }
}

/// Value of `poly` at the indicator vector of `point`.
pub fn eval_poly(poly: &Poly, point: &SubsetMask, d: usize) -> Result<BigRational> {
    if support_n(poly) != point.n() {
        return Err(Error::GroundSetMismatch { expected: support_n(poly), found: point.n() });
    }
    if let Poly::F { f, b } = poly {
        if !b.is_subset_of(f) {
            return Err(Error::InvalidParameter(format!("{b} is not a subset of {f}")));
        }
    }
    Ok(BigRational::from_integer(BigInt::from(eval_int(poly, point, d))))
}

/// Sparse matrix over the rationals; each row holds `(column, nonzero value)`
/// in increasing column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, BigRational)>>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(side: usize) -> Self {
        let mut m = Self::zeros(side, side);
        for i in 0..side {
            m.data[i].push((i, BigRational::one()));
        }
        m
    }

    pub fn from_dense(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix".into()));
        }
        let data = rows
            .into_iter()
            .map(|r| r.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect())
            .collect::<Vec<_>>();
        Ok(ExactMatrix { rows: data.len(), cols, data })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
                .collect(),
        )
    }

    fn from_sparse_i64(cols: usize, rows: Vec<Vec<(usize, i64)>>) -> Self {
        let data = rows
            .into_iter()
            .map(|r| r.into_iter().map(|(c, v)| (c, BigRational::from_integer(BigInt::from(v)))).collect())
            .collect::<Vec<_>>();
        ExactMatrix { rows: data.len(), cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(i) => self.data[r][i].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, BigRational)] {
        &self.data[r]
    }

    pub fn to_dense(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows)
            .map(|r| {
                let mut row = vec![BigRational::zero(); self.cols];
                for (c, v) in &self.data[r] {
                    row[*c] = v.clone();
                }
                row
            })
            .collect()
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        self.data
            .iter()
            .map(|row| {
                let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| num_integer_lcm(&acc, v.denom()));
                row.iter().map(|(c, v)| (*c, (v * BigRational::from_integer(lcm.clone())).to_integer())).collect()
            })
            .collect()
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(v: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((v % &p) + &p) % &p;
    r.to_u64().expect("reduced below the prime")
}

/// Rank modulo a fixed prime, by incremental sparse row reduction. It never
/// exceeds the rational rank.
fn modular_rank(rows: &[Vec<(usize, BigInt)>]) -> usize {
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for row in rows {
        let mut cur: Vec<(usize, u64)> =
            row.iter().map(|(c, v)| (*c, to_mod(v))).filter(|e| e.1 != 0).collect();
        while let Some(&(lead, lv)) = cur.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    // cur -= lv * p, where p has leading coefficient 1.
                    let mut out = Vec::with_capacity(cur.len() + p.len());
                    let (mut i, mut j) = (0, 0);
                    while i < cur.len() || j < p.len() {
                        let ci = cur.get(i).map_or(usize::MAX, |e| e.0);
                        let cj = p.get(j).map_or(usize::MAX, |e| e.0);
                        if ci < cj {
                            out.push(cur[i]);
                            i += 1;
                        } else {
                            let sub = mulmod(lv, p[j].1);
                            let base = if ci == cj { cur[i].1 } else { 0 };
                            let v = (base + PRIME - sub) % PRIME;
                            if v != 0 {
                                out.push((cj, v));
                            }
                            if ci == cj {
                                i += 1;
                            }
                            j += 1;
                        }
                    }
                    cur = out;
                }
                None => {
                    let inv = powmod(lv, PRIME - 2);
                    for e in cur.iter_mut() {
                        e.1 = mulmod(e.1, inv);
                    }
                    pivots.insert(lead, cur);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Fraction-free Gaussian elimination over the integers; pivots are the
/// first nonzero entry in column order.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(rank, p);
        let piv = a[rank][col].clone();
        for r in rank + 1..nrows {
            let factor = a[r][col].clone();
            for c in col..ncols {
                let v = (&piv * &a[r][c] - &factor * &a[rank][c]) / &prev;
                a[r][c] = v;
            }
        }
        prev = piv;
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Rank over the rationals.
pub fn exact_rank(mx: &ExactMatrix) -> usize {
    let rows = mx.integer_rows();
    let full = mx.rows.min(mx.cols);
    let r = modular_rank(&rows);
    if r == full {
        return r;
    }
    let dense: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut d = vec![BigInt::zero(); mx.cols];
            for (c, v) in row {
                d[*c] = v.clone();
            }
            d
        })
        .collect();
    bareiss_rank(&dense)
}

/// A nonzero `x` with `mx x = 0`, if one exists.
pub fn kernel_vector(mx: &ExactMatrix) -> Option<Vec<BigRational>> {
    let mut a = mx.to_dense();
    let (nr, nc) = (mx.rows, mx.cols);
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..nr {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..nc {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let pivots: HashSet<usize> = pivot_cols.iter().copied().collect();
    let free = (0..nc).find(|c| !pivots.contains(c))?;
    let mut x = vec![BigRational::zero(); nc];
    x[free] = BigRational::one();
    for (row, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = -a[row][free].clone();
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YzPair {
    pub y: SubsetMask,
    pub z: SubsetMask,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YzStep {
    pub pool_before: usize,
    pub removed_neighbourhood: usize,
    pub removed_further: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YzTrace {
    pub initial_pool: usize,
    pub removed_small_witnesses: usize,
    pub d_size: usize,
    pub d_prime_size: usize,
    pub steps: Vec<YzStep>,
    pub final_pool: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YzSelection {
    pub pairs: Vec<YzPair>,
    pub trace: Option<YzTrace>,
}

impl YzSelection {
    pub fn empty() -> Self {
        YzSelection { pairs: Vec::new(), trace: None }
    }

    pub fn from_pairs(pairs: Vec<YzPair>) -> Self {
        YzSelection { pairs, trace: None }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YzReport {
    pub holds: bool,
    pub violation: Option<String>,
}

/// Checks shape plus the three conditions: `Z_i` is never a witness, the
/// `Y`s pairwise share at most `d-1` elements, and for `i < j` no member
/// has `F ∩ Y_i = Z_i` together with `F ∩ Y_j = B_F`.
pub fn verify_yz_conditions(w: &WitnessedFamily, yz: &YzSelection) -> YzReport {
    let fail = |msg: String| YzReport { holds: false, violation: Some(msg) };
    let d = w.d();
    let members: HashSet<SubsetMask> = w.family().iter().copied().collect();
    for (i, p) in yz.pairs.iter().enumerate() {
        if p.y.n() != w.n() || p.z.n() != w.n() {
            return fail(format!("pair {i}: ground set mismatch"));
        }
        if p.y.cardinality() != d + 1 || p.z.cardinality() != d || !p.z.is_subset_of(&p.y) {
            return fail(format!("pair {i}: need |Y| = d+1 and Z a d-subset of Y, got {} / {}", p.y, p.z));
        }
        if members.contains(&p.y) {
            return fail(format!("pair {i}: Y = {} is a member", p.y));
        }
    }
    let witnesses: HashMap<SubsetMask, usize> =
        w.witnesses().iter().enumerate().map(|(k, b)| (*b, k)).collect();
    for (i, p) in yz.pairs.iter().enumerate() {
        if let Some(k) = witnesses.get(&p.z) {
            return fail(format!("condition 1: Z_{i} = {} is the witness of member {k}", p.z));
        }
    }
    for i in 0..yz.len() {
        for j in i + 1..yz.len() {
            let c = yz.pairs[i].y.intersection(&yz.pairs[j].y).cardinality();
            if c + 1 > d {
                return fail(format!("condition 2: |Y_{i} ∩ Y_{j}| = {c} > d-1"));
            }
        }
    }
    for (k, (f, b)) in w.pairs().enumerate() {
        let hits: Vec<usize> =
            (0..yz.len()).filter(|&i| f.intersection(&yz.pairs[i].y) == yz.pairs[i].z).collect();
        let Some(&first) = hits.first() else { continue };
        if let Some(j) = (first + 1..yz.len()).find(|&j| f.intersection(&yz.pairs[j].y) == b) {
            return fail(format!("condition 3: member {k} meets Y_{first} in Z_{first} and Y_{j} in its witness"));
        }
    }
    YzReport { holds: true, violation: None }
}

/// Default `Gamma = 4(d+1)`.
pub fn default_gamma(d: usize) -> usize {
    4 * (d + 1)
}

/// Greedy selection with colex-first candidates (first `Y` in the pool, then
/// its first admissible `d`-subset `Z`).
pub fn greedy_select_yz(w: &WitnessedFamily, gamma: usize) -> Result<YzSelection> {
    if gamma == 0 {
        return Err(Error::InvalidParameter("Gamma must be >= 1".into()));
    }
    let (n, d) = (w.n(), w.d());
    let total = binomial(n as u64, d as u64 + 1);
    if total > 5_000_000 {
        return Err(Error::TooLarge(format!("{total} candidate sets")));
    }
    let members: HashSet<SubsetMask> = w.family().iter().copied().collect();
    let mut pool: BTreeSet<SubsetMask> =
        enumerate_k_subsets(n, d + 1)?.filter(|y| !members.contains(y)).collect();
    let initial_pool = pool.len();

    let near = |t: &SubsetMask, s: &SubsetMask| t.intersection(s).cardinality() >= d;
    for (f, b) in w.pairs() {
        if b.cardinality() + 3 <= d {
            pool.retain(|t| !near(t, &f));
        }
    }
    let removed_small_witnesses = initial_pool - pool.len();

    let dset: HashSet<SubsetMask> = w.witnesses().iter().filter(|b| b.cardinality() == d).copied().collect();
    let mut dprime_count: HashMap<SubsetMask, usize> = HashMap::new();
    if d >= 2 {
        for (f, b) in w.pairs() {
            if b.cardinality() + 2 == d {
                for t in f.subsets_of_size(d) {
                    *dprime_count.entry(t).or_insert(0) += 1;
                }
            }
        }
    }
    let dprime: HashSet<SubsetMask> =
        dprime_count.into_iter().filter(|e| e.1 >= gamma).map(|e| e.0).collect();
    let blocked = |z: &SubsetMask| dset.contains(z) || dprime.contains(z);

    let mut pairs = Vec::new();
    let mut steps = Vec::new();
    loop {
        let cand = pool.iter().find_map(|y| y.subsets_of_size(d).find(|z| !blocked(z)).map(|z| YzPair { y: *y, z }));
        let Some(p) = cand else { break };
        let before = pool.len();
        pool.retain(|t| !near(t, &p.y));
        let after_nb = pool.len();
        for (f, b) in w.pairs() {
            if f.intersection(&p.y) == p.z {
                pool.retain(|t| t.intersection(&f) != b);
            }
        }
        steps.push(YzStep {
            pool_before: before,
            removed_neighbourhood: before - after_nb,
            removed_further: after_nb - pool.len(),
        });
        pairs.push(p);
    }
    Ok(YzSelection {
        pairs,
        trace: Some(YzTrace {
            initial_pool,
            removed_small_witnesses,
            d_size: dset.len(),
            d_prime_size: dprime.len(),
            steps,
            final_pool: pool.len(),
        }),
    })
}

/// `s + m + sum_{i<d} C(n, i)`.
pub fn matrix_side(w: &WitnessedFamily, s: usize) -> u128 {
    let h: u128 = (0..w.d() as u64).map(|i| binomial(w.n() as u64, i)).sum();
    s as u128 + w.len() as u128 + h
}

/// Sets of size `< d`, by size then colex.
fn h_sets(n: usize, d: usize) -> Result<Vec<SubsetMask>> {
    let mut out = Vec::new();
    for i in 0..d {
        out.extend(enumerate_k_subsets(n, i)?);
    }
    Ok(out)
}

/// Rows are points `Y_1..Y_s, F_1..F_m, H...`; columns the polynomials
/// `y_1..y_s, f_1..f_m, h...` in the same order.
pub fn assemble_matrix(w: &WitnessedFamily, yz: &YzSelection) -> Result<ExactMatrix> {
    let side = matrix_side(w, yz.len());
    if side > MAX_SIDE as u128 {
        return Err(Error::MatrixTooLarge { side: side.min(usize::MAX as u128) as usize, limit: MAX_SIDE });
    }
    let d = w.d();
    let hs = h_sets(w.n(), d)?;
    let polys: Vec<Poly> = yz
        .pairs
        .iter()
        .map(|p| Poly::Y { z: p.z })
        .chain(w.pairs().map(|(f, b)| Poly::F { f, b }))
        .chain(hs.iter().map(|&h| Poly::H { h }))
        .collect();
    let points: Vec<SubsetMask> =
        yz.pairs.iter().map(|p| p.y).chain(w.family().iter().copied()).chain(hs.iter().copied()).collect();
    let rows: Vec<Vec<(usize, i64)>> = points
        .par_iter()
        .map(|pt| {
            polys
                .iter()
                .enumerate()
                .filter_map(|(c, q)| {
                    let v = eval_int(q, pt, d);
                    (v != 0).then_some((c, v))
                })
                .collect()
        })
        .collect();
    Ok(ExactMatrix::from_sparse_i64(polys.len(), rows))
}

/// `(T^t R)_{ij} = 0` for `i >= j`, with `T_{k,i} = f_k(v_{Y_i})` and
/// `R_{k,j} = y_j(v_{F_k})` read from the assembled blocks.
pub fn tr_strictly_upper(mx: &ExactMatrix, s: usize, m: usize) -> bool {
    for i in 0..s {
        for j in 0..=i {
            let mut acc = BigRational::zero();
            for k in 0..m {
                let t = mx.get(i, s + k);
                if t.is_zero() {
                    continue;
                }
                acc += t * mx.get(s + k, j);
            }
            if !acc.is_zero() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YzJson {
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub d: usize,
    pub gamma: usize,
    pub family_sha256: String,
    pub family: Vec<Vec<usize>>,
    pub witnesses: Vec<Vec<usize>>,
    pub yz_pairs: Vec<YzJson>,
    pub matrix_side: usize,
    pub rank: usize,
    /// `C(n, d) - s`.
    pub bound: i128,
    pub family_size: usize,
    pub size_d_witnesses: usize,
    /// `C(n-1, d)`.
    pub size_d_witness_cap: u128,
    pub tr_strictly_upper: bool,
    pub valid: bool,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn family_digest(f: &Family) -> String {
    hex::encode(Sha256::digest(serialize_family(f).as_bytes()))
}

fn build_certificate(w: &WitnessedFamily, gamma: usize, yz: &YzSelection) -> Result<Certificate> {
    let report = verify_yz_conditions(w, yz);
    if !report.holds {
        return Err(Error::Inconsistency(format!(
            "selection violates its conditions: {}",
            report.violation.unwrap_or_default()
        )));
    }
    let mx = assemble_matrix(w, yz)?;
    let side = mx.rows();
    let rank = exact_rank(&mx);
    let (n, d, s) = (w.n(), w.d(), yz.len());
    if rank < side {
        let kernel = kernel_vector(&mx).map(|x| x.iter().map(|v| v.to_string()).collect()).unwrap_or_default();
        return Err(Error::RankDeficient { rank, side, kernel });
    }
    let bound = binomial(n as u64, d as u64) as i128 - s as i128;
    if w.len() as i128 > bound {
        return Err(Error::BoundViolated { size: w.len(), bound });
    }
    Ok(Certificate {
        n,
        d,
        gamma,
        family_sha256: family_digest(w.family()),
        family: w.family().to_lists(),
        witnesses: w.witnesses().iter().map(|b| b.to_vec()).collect(),
        yz_pairs: yz.pairs.iter().map(|p| YzJson { y: p.y.to_vec(), z: p.z.to_vec() }).collect(),
        matrix_side: side,
        rank,
        bound,
        family_size: w.len(),
        size_d_witnesses: w.count_size_d_witnesses(),
        size_d_witness_cap: if n >= 1 { binomial(n as u64 - 1, d as u64) } else { 0 },
        tr_strictly_upper: tr_strictly_upper(&mx, s, w.len()),
        valid: true,
    })
}

/// Greedy selection, condition check, assembly and exact rank.
pub fn certify(w: &WitnessedFamily, gamma: usize) -> Result<Certificate> {
    let yz = greedy_select_yz(w, gamma)?;
    build_certificate(w, gamma, &yz)
}

/// Certificate for a caller-supplied selection.
pub fn certify_with(w: &WitnessedFamily, gamma: usize, yz: &YzSelection) -> Result<Certificate> {
    build_certificate(w, gamma, yz)
}

/// Rebuilds the certificate from its embedded family, witnesses and gamma
/// and requires an exact match.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    let mismatch = |what: &str| Err(Error::CertificateMismatch(what.to_string()));
    let family = Family::from_lists(cert.n, Some(cert.d + 1), cert.family.iter().cloned())?;
    if family_digest(&family) != cert.family_sha256 {
        return mismatch("family digest");
    }
    let witnesses = cert
        .witnesses
        .iter()
        .map(|b| SubsetMask::from_elements(cert.n, b.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let w = WitnessedFamily::new(family, cert.d, witnesses)?;
    let pairs = cert
        .yz_pairs
        .iter()
        .map(|p| {
            Ok(YzPair {
                y: SubsetMask::from_elements(cert.n, p.y.iter().copied())?,
                z: SubsetMask::from_elements(cert.n, p.z.iter().copied())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let greedy = greedy_select_yz(&w, cert.gamma)?;
    if greedy.pairs != pairs {
        return mismatch("Y/Z selection does not match a rerun");
    }
    let rebuilt = build_certificate(&w, cert.gamma, &YzSelection::from_pairs(pairs))?;
    if &rebuilt != cert {
        return mismatch("recomputed certificate differs");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{mz_family, star, stability_example, MzAssignment};
    use crate::vc::select_witnesses;
    use num_traits::FromPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mask(n: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    /// Literal evaluation of the defining products at a 0/1 vector.
    fn eval_literal(poly: &Poly, point: &SubsetMask, d: usize) -> i64 {
        let n = point.n();
        let x = |j: usize| point.contains(j) as i64;
        match poly {
            Poly::F { f, b } => {
                let mut p1 = 1;
                let mut p2 = 1;
                for j in 1..=n {
                    if b.contains(j) {
                        p1 *= x(j);
                    } else if f.contains(j) {
                        p1 *= x(j) - 1;
                    }
                    if f.contains(j) {
                        p2 *= x(j);
                    }
                }
                p1 - p2
            }
            Poly::Y { z } => -(1..=n).filter(|&j| z.contains(j)).map(x).product::<i64>(),
            Poly::H { h } => {
                let prod: i64 = (1..=n).filter(|&j| h.contains(j)).map(x).product();
                let sum: i64 = (1..=n).filter(|&j| !h.contains(j)).map(x).sum();
                sum * prod + (h.cardinality() as i64 - d as i64 - 1) * prod
            }
        }
    }

    /// Plain Gauss elimination over the rationals.
    fn rational_rank(mx: &ExactMatrix) -> usize {
        let mut a = mx.to_dense();
        let mut r = 0;
        for c in 0..mx.cols() {
            let Some(p) = (r..mx.rows()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..mx.rows() {
                let f = &a[i][c] / &a[r][c];
                for j in c..mx.cols() {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
            r += 1;
        }
        r
    }

    #[test]
    fn closed_forms_match_literal_products() {
        let n = 6;
        let all: Vec<SubsetMask> = (0u128..64).map(|b| SubsetMask::from_bits(n, b).unwrap()).collect();
        for d in 1..=3 {
            for f in enumerate_k_subsets(n, d + 1).unwrap() {
                for b in (0..=d + 1).flat_map(|k| f.subsets_of_size(k)) {
                    let q = Poly::F { f, b };
                    for p in &all {
                        assert_eq!(eval_int(&q, p, d), eval_literal(&q, p, d));
                    }
                }
            }
            for z in all.iter().filter(|z| z.cardinality() <= d + 1) {
                for q in [Poly::Y { z: *z }, Poly::H { h: *z }] {
                    for p in &all {
                        assert_eq!(eval_int(&q, p, d), eval_literal(&q, p, d));
                    }
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let f = mask(6, &[1, 2, 3]);
        for b in [mask(6, &[]), mask(6, &[1]), mask(6, &[1, 2])] {
            assert_eq!(eval_poly(&Poly::F { f, b }, &f, 2).unwrap(), BigRational::from_i64(-1).unwrap());
        }
        let h = mask(6, &[4]);
        assert_eq!(eval_poly(&Poly::H { h }, &h, 2).unwrap(), BigRational::from_i64(-2).unwrap());
        assert!(eval_poly(&Poly::H { h }, &mask(5, &[1]), 2).is_err());
    }

    #[test]
    fn rank_basics() {
        assert_eq!(exact_rank(&ExactMatrix::identity(22)), 22);
        let m = ExactMatrix::from_i64(&[vec![1, 2, 3], vec![4, 5, 6], vec![1, 2, 3]]).unwrap();
        assert_eq!(exact_rank(&m), 2);
        assert!(kernel_vector(&m).is_some());
        assert!(kernel_vector(&ExactMatrix::identity(4)).is_none());
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let q = ExactMatrix::from_dense(vec![
            vec![half.clone(), BigRational::one()],
            vec![BigRational::one(), BigRational::from_integer(BigInt::from(2))],
        ])
        .unwrap();
        assert_eq!(exact_rank(&q), 1);
    }

    #[test]
    fn rank_matches_rational_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let r = rng.random_range(1..8);
            let c = rng.random_range(1..8);
            let zero_p = rng.random_range(0.0..0.9);
            let mut rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| if rng.random_bool(zero_p) { 0 } else { rng.random_range(-3..=3) }).collect())
                .collect();
            if r > 2 && rng.random_bool(0.3) {
                rows[r - 1] = rows[0].iter().zip(&rows[1]).map(|(a, b)| 2 * a - 3 * b).collect();
            }
            let m = ExactMatrix::from_i64(&rows).unwrap();
            let expect = rational_rank(&m);
            assert_eq!(exact_rank(&m), expect);
            let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            assert_eq!(bareiss_rank(&ints), expect);
            if let Some(x) = kernel_vector(&m) {
                assert!(expect < c);
                for row in m.to_dense() {
                    let dot: BigRational = row.iter().zip(&x).map(|(a, b)| a * b).sum();
                    assert!(dot.is_zero());
                }
            }
        }
    }

    #[test]
    fn star_certificate() {
        let w = select_witnesses(&star(5, 3, 5).unwrap(), 2).unwrap();
        let mx = assemble_matrix(&w, &YzSelection::empty()).unwrap();
        // 0 + 6 + (1 + 5)
        assert_eq!(mx.rows(), 12);
        assert_eq!(exact_rank(&mx), 12);
        assert_eq!(rational_rank(&mx), 12);
        let c = certify(&w, default_gamma(2)).unwrap();
        assert!(c.valid && c.yz_pairs.is_empty());
        assert_eq!((c.bound, c.family_size), (10, 6));
        verify_certificate(&c).unwrap();
    }

    #[test]
    fn block_structure() {
        let st = star(7, 3, 7).unwrap();
        let sub = st.filter(|m| m.to_vec() != vec![1, 2, 7] && m.to_vec() != vec![3, 4, 7]);
        let w = select_witnesses(&sub, 2).unwrap();
        let yz = greedy_select_yz(&w, default_gamma(2)).unwrap();
        let (s, m) = (yz.len(), w.len());
        assert!(s >= 1);
        let mx = assemble_matrix(&w, &yz).unwrap();
        let neg = -BigRational::one();
        for i in 0..s + m {
            for j in 0..s + m {
                let in_y = i < s && j < s;
                let in_f = i >= s && j >= s;
                if (in_y || in_f) && i != j {
                    assert!(mx.get(i, j).is_zero());
                }
                if (in_y || in_f) && i == j {
                    assert_eq!(mx.get(i, j), neg);
                }
            }
            for c in s + m..mx.cols() {
                assert!(mx.get(i, c).is_zero());
            }
        }
        let hs = h_sets(7, 2).unwrap();
        for (r, h) in hs.iter().enumerate() {
            let row = s + m + r;
            let diag = mx.get(row, row);
            assert_eq!(diag, BigRational::from_integer(BigInt::from(h.cardinality() as i64 - 3)));
            for c in row + 1..mx.cols() {
                assert!(mx.get(row, c).is_zero());
            }
        }
        // T and R follow their closed forms.
        for k in 0..m {
            for i in 0..s {
                let (f, b) = (w.member(k), w.witness(k));
                let t = if f.intersection(&yz.pairs[i].y) == b {
                    if (3 - b.cardinality()) % 2 == 0 { 1 } else { -1 }
                } else {
                    0
                };
                assert_eq!(mx.get(i, s + k), BigRational::from_integer(BigInt::from(t)));
                let r = -((f.intersection(&yz.pairs[i].y) == yz.pairs[i].z) as i64);
                assert_eq!(mx.get(s + k, i), BigRational::from_integer(BigInt::from(r)));
            }
        }
        assert!(tr_strictly_upper(&mx, s, m));
    }

    #[test]
    fn yz_condition_examples() {
        let w = select_witnesses(&star(6, 3, 6).unwrap().filter(|m| !m.contains(1)), 2).unwrap();
        assert!(verify_yz_conditions(&w, &YzSelection::empty()).holds);
        let y = mask(6, &[1, 2, 3]);
        let p = YzPair { y, z: mask(6, &[1, 2]) };
        let dup = YzSelection::from_pairs(vec![p, p]);
        let r = verify_yz_conditions(&w, &dup);
        assert!(!r.holds && r.violation.unwrap().starts_with("condition 2"));
        let bad_z = YzSelection::from_pairs(vec![YzPair { y: mask(6, &[1, 2, 3]), z: mask(6, &[2, 3]) }]);
        assert!(verify_yz_conditions(&w, &bad_z).violation.unwrap().starts_with("condition 1"));
    }

    #[test]
    fn greedy_examples() {
        let st = select_witnesses(&star(6, 3, 6).unwrap(), 2).unwrap();
        let yz = greedy_select_yz(&st, 12).unwrap();
        assert!(yz.is_empty());
        let tr = yz.trace.unwrap();
        assert_eq!((tr.initial_pool, tr.d_size), (10, 10));

        let minus = select_witnesses(&star(6, 3, 6).unwrap().filter(|m| m.to_vec() != vec![1, 2, 6]), 2).unwrap();
        let yz = greedy_select_yz(&minus, 12).unwrap();
        assert!(!yz.is_empty());
        assert!(verify_yz_conditions(&minus, &yz).holds);

        let full = select_witnesses(&Family::complete(4, 3).unwrap(), 2).unwrap();
        let yz = greedy_select_yz(&full, 12).unwrap();
        assert!(yz.is_empty() && yz.trace.unwrap().initial_pool == 0);
        assert!(greedy_select_yz(&full, 0).is_err());
    }

    #[test]
    fn side_examples() {
        let e = WitnessedFamily::new(Family::empty(6, Some(3)).unwrap(), 2, Vec::new()).unwrap();
        let mx = assemble_matrix(&e, &YzSelection::empty()).unwrap();
        assert_eq!(mx.rows(), 7);
        assert_eq!(exact_rank(&mx), 7);
        let big = WitnessedFamily::new(Family::empty(40, Some(6)).unwrap(), 5, Vec::new()).unwrap();
        assert!(matches!(
            assemble_matrix(&big, &YzSelection::empty()),
            Err(Error::MatrixTooLarge { limit: MAX_SIDE, .. })
        ));
    }

    #[test]
    fn constructions_certify() {
        let mz = mz_family(8, 2, &MzAssignment::all_one(8, 2).unwrap()).unwrap();
        let c = certify(&mz, default_gamma(2)).unwrap();
        assert!(c.valid && c.bound >= 22 && c.tr_strictly_upper);
        verify_certificate(&c).unwrap();
        assert_eq!(c.to_json(), certify(&mz, default_gamma(2)).unwrap().to_json());

        let s = select_witnesses(&stability_example(8, 2).unwrap(), 2).unwrap();
        let c = certify(&s, default_gamma(2)).unwrap();
        assert!(c.valid);
        assert!(c.size_d_witnesses as u128 <= c.size_d_witness_cap);
    }

    #[test]
    fn random_subfamilies_of_constructions_have_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut sources = Vec::new();
        for n in 6..=10 {
            for d in 2..=3 {
                if n >= 2 * (d + 1) {
                    sources.push(mz_family(n, d, &MzAssignment::random(n, d, &mut rng).unwrap()).unwrap());
                }
                sources.push(select_witnesses(&star(n, d + 1, n).unwrap(), d).unwrap());
                if n >= d + 3 {
                    sources.push(select_witnesses(&stability_example(n, d).unwrap(), d).unwrap());
                }
            }
        }
        let mut done = 0;
        while done < 200 {
            let src = &sources[rng.random_range(0..sources.len())];
            let p = rng.random_range(0.3..1.0);
            let keep: Vec<usize> = (0..src.len()).filter(|_| rng.random_bool(p)).collect();
            let w = select_witnesses(&src.family().select(&keep), src.d()).unwrap();
            let c = certify(&w, default_gamma(w.d())).unwrap();
            assert!(c.valid && c.rank == c.matrix_side && c.tr_strictly_upper);
            let s = c.yz_pairs.len() as i128;
            assert!(s <= binomial(w.n() as u64, w.d() as u64) as i128 - w.len() as i128);
            done += 1;
        }
    }

    #[test]
    fn size_d_witness_count_equality_iff_full_star() {
        for n in 4..=9 {
            for center in [1, n] {
                let w = select_witnesses(&star(n, 3, center).unwrap(), 2).unwrap();
                assert_eq!(w.count_size_d_witnesses() as u128, binomial(n as u64 - 1, 2));
            }
            let partial = star(n, 3, n).unwrap().filter(|m| m.to_vec() != vec![1, 2, n]);
            let w = select_witnesses(&partial, 2).unwrap();
            assert!((w.count_size_d_witnesses() as u128) < binomial(n as u64 - 1, 2));
            if n >= 5 {
                let w = select_witnesses(&stability_example(n, 2).unwrap(), 2).unwrap();
                assert!((w.count_size_d_witnesses() as u128) < binomial(n as u64 - 1, 2));
            }
        }
    }

    #[test]
    fn verify_rejects_tampering() {
        let w = select_witnesses(&star(6, 3, 6).unwrap().filter(|m| !m.contains(1)), 2).unwrap();
        let c = certify(&w, 12).unwrap();
        verify_certificate(&c).unwrap();
        let mut t = c.clone();
        t.bound += 1;
        assert!(matches!(verify_certificate(&t), Err(Error::CertificateMismatch(_))));
        let mut t = c.clone();
        t.family_sha256 = "00".into();
        assert!(matches!(verify_certificate(&t), Err(Error::CertificateMismatch(_))));
        let back = Certificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        // Violating condition 2 breaks the -E_s block.
        let w = select_witnesses(&star(6, 3, 6).unwrap().filter(|m| !m.contains(1)), 2).unwrap();
        let p = YzPair { y: mask(6, &[1, 2, 3]), z: mask(6, &[1, 2]) };
        let mx = assemble_matrix(&w, &YzSelection::from_pairs(vec![p, p])).unwrap();
        assert!(exact_rank(&mx) < mx.rows());
        assert!(certify_with(&w, 12, &YzSelection::from_pairs(vec![p, p])).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn star_subfamilies_certify(n in 5usize..=9, keep in proptest::collection::vec(proptest::bool::ANY, 28)) {
            let st = star(n, 3, n).unwrap();
            let idx: Vec<usize> = (0..st.len()).filter(|&i| keep[i]).collect();
            let w = select_witnesses(&st.select(&idx), 2).unwrap();
            let c = certify(&w, default_gamma(2)).unwrap();
            proptest::prop_assert!(c.valid && c.tr_strictly_upper);
            proptest::prop_assert!(c.yz_pairs.len() as u128 + w.len() as u128 <= binomial(n as u64, 2));
            proptest::prop_assert!(verify_certificate(&c).is_ok());
        }
    }
}
