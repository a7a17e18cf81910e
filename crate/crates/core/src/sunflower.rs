//! Sunflower detection and the sunflower audits on witness classes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mask::SubsetMask;
use crate::vc::{witness_groups, WitnessedFamily};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sunflower {
    pub core: SubsetMask,
    /// Ascending member indices.
    pub indices: Vec<usize>,
}

impl Sunflower {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Distinct pairwise intersections, ascending.
fn candidate_cores(members: &[SubsetMask]) -> Vec<SubsetMask> {
    let mut cores: Vec<SubsetMask> = members
        .iter()
        .enumerate()
        .flat_map(|(i, a)| members[i + 1..].iter().map(move |b| a.intersection(b)))
        .collect();
    cores.sort_unstable();
    cores.dedup();
    cores
}

/// Lexicographically first `r` indices from `pool` whose petals are pairwise disjoint.
fn first_disjoint(pool: &[(usize, u128)], r: usize) -> Option<Vec<usize>> {
    fn rec(pool: &[(usize, u128)], start: usize, used: u128, r: usize, acc: &mut Vec<usize>) -> bool {
        if acc.len() == r {
            return true;
        }
        for j in start..pool.len() {
            if pool.len() - j < r - acc.len() {
                return false;
            }
            let (idx, petal) = pool[j];
            if petal & used == 0 {
                acc.push(idx);
                if rec(pool, j + 1, used | petal, r, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::with_capacity(r);
    rec(pool, 0, 0, r, &mut acc).then_some(acc)
}

/// Largest set of pairwise disjoint petals, lexicographically first among the largest.
fn max_disjoint(pool: &[(usize, u128)]) -> Vec<usize> {
    fn rec(pool: &[(usize, u128)], start: usize, used: u128, acc: &mut Vec<usize>, best: &mut Vec<usize>) {
        if acc.len() > best.len() {
            *best = acc.clone();
        }
        for j in start..pool.len() {
            if acc.len() + (pool.len() - j) <= best.len() {
                return;
            }
            let (idx, petal) = pool[j];
            if petal & used == 0 {
                acc.push(idx);
                rec(pool, j + 1, used | petal, acc, best);
                acc.pop();
            }
        }
    }
    let mut best = Vec::new();
    rec(pool, 0, 0, &mut Vec::new(), &mut best);
    best
}

fn petals(members: &[SubsetMask], core: &SubsetMask) -> Vec<(usize, u128)> {
    members
        .iter()
        .enumerate()
        .filter(|(_, m)| core.is_subset_of(m))
        .map(|(i, m)| (i, m.bits() & !core.bits()))
        .collect()
}

/// First `r`-sunflower under the order (core, sorted indices).
pub fn find_sunflower(f: &Family, r: usize) -> Result<Option<Sunflower>> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("sunflower size must be >= 2, got {r}")));
    }
    if f.len() < r {
        return Ok(None);
    }
    for core in candidate_cores(f.members()) {
        let pool = petals(f.members(), &core);
        if pool.len() < r {
            continue;
        }
        if let Some(indices) = first_disjoint(&pool, r) {
            return Ok(Some(Sunflower { core, indices }));
        }
    }
    Ok(None)
}

/// A largest sunflower; a single member counts as a sunflower of size one
/// with itself as core. `None` only for the empty family.
pub fn largest_sunflower(f: &Family) -> Option<Sunflower> {
    let members = f.members();
    let mut best = Sunflower { core: *members.first()?, indices: vec![0] };
    for core in candidate_cores(members) {
        let pool = petals(members, &core);
        if pool.len() <= best.len() {
            continue;
        }
        let found = max_disjoint(&pool);
        if found.len() > best.len() {
            best = Sunflower { core, indices: found };
        }
    }
    Some(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSunflower {
    pub witness: Vec<usize>,
    pub class_size: usize,
    pub largest: usize,
    pub core: Vec<usize>,
    /// Members of the largest sunflower, as indices into the whole family.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SunflowerAudit {
    /// Forbidden size `d + 3`.
    pub limit: usize,
    pub classes: Vec<ClassSunflower>,
    /// Classes holding a sunflower of size `limit`.
    pub violations: Vec<ClassSunflower>,
    pub holds: bool,
}

/// No witness class contains a sunflower with `d + 3` petals.
pub fn audit_witness_sunflowers(w: &WitnessedFamily) -> Result<SunflowerAudit> {
    let limit = w.d() + 3;
    let mut classes = Vec::new();
    for (witness, idx) in witness_groups(w) {
        let class = w.family().select(&idx);
        let s = largest_sunflower(&class).expect("witness classes are nonempty");
        classes.push(ClassSunflower {
            witness: witness.to_vec(),
            class_size: idx.len(),
            largest: s.len(),
            core: s.core.to_vec(),
            members: s.indices.iter().map(|&i| idx[i]).collect(),
        });
    }
    let violations: Vec<_> = classes.iter().filter(|c| c.largest >= limit).cloned().collect();
    Ok(SunflowerAudit { limit, holds: violations.is_empty(), classes, violations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CenteredDisjoint {
    pub ell: usize,
    pub indices: Vec<usize>,
}

/// An element `ell` in every member plus `d + 1` members whose sets minus
/// `ell` are pairwise disjoint.
pub fn find_centered_disjoint(f: &Family, d: usize) -> Result<Option<CenteredDisjoint>> {
    f.require_uniform(d)?;
    if let Some((i, j)) = f.first_disjoint_pair() {
        return Err(Error::NotIntersecting { a: f.members()[i].to_string(), b: f.members()[j].to_string() });
    }
    if f.is_empty() {
        return Ok(None);
    }
    for ell in f.common_intersection().elements() {
        let pool: Vec<(usize, u128)> =
            f.iter().enumerate().map(|(i, m)| (i, m.without(ell).bits())).collect();
        if let Some(indices) = first_disjoint(&pool, d + 1) {
            return Ok(Some(CenteredDisjoint { ell, indices }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{mz_family, star, MzAssignment};
    use crate::mask::enumerate_k_subsets;
    use crate::vc::select_witnesses;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fam(n: usize, k: Option<usize>, sets: &[&[usize]]) -> Family {
        Family::from_lists(n, k, sets.iter().map(|s| s.to_vec())).unwrap()
    }

    fn is_sunflower(f: &Family, idx: &[usize]) -> Option<SubsetMask> {
        let sets: Vec<SubsetMask> = idx.iter().map(|&i| f.members()[i]).collect();
        let core = sets[0].intersection(&sets[1]);
        for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                if sets[a].intersection(&sets[b]) != core {
                    return None;
                }
            }
        }
        Some(core)
    }

    /// Every r-subset of indices, keeping the least (core, indices).
    fn brute(f: &Family, r: usize) -> Option<Sunflower> {
        let m = f.len();
        let mut best: Option<Sunflower> = None;
        let mut idx: Vec<usize> = (0..r).collect();
        if r > m {
            return None;
        }
        loop {
            if let Some(core) = is_sunflower(f, &idx) {
                let cand = Sunflower { core, indices: idx.clone() };
                let better = match &best {
                    None => true,
                    Some(b) => (cand.core, &cand.indices) < (b.core, &b.indices),
                };
                if better {
                    best = Some(cand);
                }
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < m - r + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    #[test]
    fn examples() {
        let f = fam(6, Some(2), &[&[1, 2], &[3, 4], &[5, 6]]);
        let s = find_sunflower(&f, 3).unwrap().unwrap();
        assert!(s.core.is_empty());
        assert_eq!(s.indices, vec![0, 1, 2]);

        let st = star(6, 3, 6).unwrap();
        let s = find_sunflower(&st, 3).unwrap().unwrap();
        assert_eq!(s.core.to_vec(), vec![1, 6]);
        assert_eq!(is_sunflower(&st, &s.indices), Some(s.core));
        assert_eq!(Some(s), brute(&st, 3));

        assert_eq!(find_sunflower(&f, 4).unwrap(), None);
        assert!(find_sunflower(&f, 1).is_err());
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..300 {
            let n = rng.random_range(4..=8);
            let k = rng.random_range(1..=3);
            let all: Vec<SubsetMask> = enumerate_k_subsets(n, k).unwrap().collect();
            let m = rng.random_range(0..=12.min(all.len()));
            let mut members = all.clone();
            for i in 0..m {
                let j = rng.random_range(i..members.len());
                members.swap(i, j);
            }
            members.truncate(m);
            let f = Family::uniform(n, k, members).unwrap();
            for r in 2..=5 {
                assert_eq!(find_sunflower(&f, r).unwrap(), brute(&f, r), "{f} r={r}");
            }
            let largest = largest_sunflower(&f).map_or(0, |s| s.len());
            let brute_largest = (1..=f.len()).rev().find(|&r| r == 1 || brute(&f, r).is_some()).unwrap_or(0);
            assert_eq!(largest, brute_largest);
        }
    }

    #[test]
    fn audit_passes_on_constructions() {
        let w = select_witnesses(&star(10, 3, 10).unwrap(), 2).unwrap();
        let a = audit_witness_sunflowers(&w).unwrap();
        assert!(a.holds && a.classes.iter().all(|c| c.class_size == 1));

        let mz = mz_family(8, 2, &MzAssignment::all_one(8, 2).unwrap()).unwrap();
        let a = audit_witness_sunflowers(&mz).unwrap();
        assert!(a.holds);
        assert!(a.classes.iter().all(|c| c.class_size <= 2));
    }

    #[test]
    fn audit_flags_weakened_witnesses() {
        // Every member of an intersecting family may take the empty witness,
        // but that ignores maximality and packs {1,2,x} into one class.
        let st = star(7, 3, 1).unwrap();
        let empty = SubsetMask::empty(7).unwrap();
        let w = WitnessedFamily::new(st.clone(), 2, vec![empty; st.len()]).unwrap();
        let a = audit_witness_sunflowers(&w).unwrap();
        assert!(!a.holds);
        assert_eq!(a.violations.len(), 1);
        assert_eq!(a.violations[0].largest, 5);
        assert_eq!(a.violations[0].core, vec![1, 2]);
    }

    #[test]
    fn centered_disjoint_examples() {
        let st = star(7, 2, 1).unwrap();
        let c = find_centered_disjoint(&st, 2).unwrap().unwrap();
        assert_eq!(c.ell, 1);
        assert_eq!(c.indices.len(), 3);
        let tri = fam(4, Some(2), &[&[1, 2], &[2, 3], &[1, 3]]);
        assert_eq!(find_centered_disjoint(&tri, 2).unwrap(), None);
        let bad = fam(4, Some(2), &[&[1, 2], &[3, 4]]);
        assert!(matches!(find_centered_disjoint(&bad, 2), Err(Error::NotIntersecting { .. })));
    }

    #[test]
    fn centered_disjoint_exists_for_large_graph_families() {
        // A 2-uniform intersecting family is a star or a triangle, so every
        // maximal one with >= 6 members is a full star.
        for n in 8..=12 {
            for center in 1..=n {
                let st = star(n, 2, center).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 100 + center as u64);
                for _ in 0..20 {
                    let keep: Vec<usize> = (0..st.len()).filter(|_| rng.random_bool(0.7)).collect();
                    let sub = st.select(&keep);
                    if sub.len() < 6 {
                        continue;
                    }
                    let c = find_centered_disjoint(&sub, 2).unwrap().unwrap();
                    assert_eq!(c.ell, center);
                }
            }
        }
    }
}
