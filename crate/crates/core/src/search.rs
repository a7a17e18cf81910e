//! Exact maximum-family searches.
//!
//! Every hereditary witness condition is encoded as a maximum clique: one
//! vertex per (member, candidate witness) pair, adjacent when the two pairs
//! belong to different members and neither member meets the other exactly
//! in its witness. Cliques are then exactly witnessed families. The clique
//! search is a colour-bounded branch and bound; optimal values never depend
//! on thread count, and returned maximizers come from a sequential rerun.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{mz_family, star, MzAssignment};
use crate::family::Family;
use crate::mask::{binomial, enumerate_k_subsets, SubsetMask};
use crate::vc::vc_dimension;

/// Environment variable overriding the default node budget.
pub const BUDGET_ENV: &str = "VCLAB_BUDGET_NODES";

/// Largest number of clique vertices the search will build.
pub const MAX_VERTICES: usize = 1 << 14;

/// Largest universe accepted by [`brute_force_max`].
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 1_000_000_000, max_time: Some(Duration::from_secs(600)) }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Self {
        Budget { max_nodes, max_time: None }
    }

    pub fn unlimited() -> Self {
        Budget { max_nodes: u64::MAX, max_time: None }
    }

    /// Default budget, with the node limit taken from [`BUDGET_ENV`] if set.
    pub fn from_env() -> Result<Self> {
        let mut b = Budget::default();
        if let Ok(v) = std::env::var(BUDGET_ENV) {
            b.max_nodes = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{BUDGET_ENV}={v} is not a node count")))?;
        }
        Ok(b)
    }
}

/// Which subsets of a member may serve as its witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    /// Any proper subset; equivalent to VC-dimension at most `d`.
    Vc,
    /// Exactly `s` elements.
    Exact(usize),
    /// At most `s` elements.
    AtMost(usize),
}

impl WitnessMode {
    fn sizes(&self, k: usize) -> std::ops::RangeInclusive<usize> {
        match *self {
            WitnessMode::Vc => 0..=k - 1,
            WitnessMode::Exact(s) => s..=s,
            WitnessMode::AtMost(s) => 0..=s,
        }
    }
}

/// Witnesses for every member under `mode`, or `None` if some member has
/// none. Checked directly against all pairwise intersections.
pub fn switness_assignment(f: &Family, mode: WitnessMode) -> Option<Vec<SubsetMask>> {
    let k = f.uniform_rank()?;
    if let WitnessMode::Exact(s) | WitnessMode::AtMost(s) = mode {
        if s >= k {
            return None;
        }
    }
    f.iter()
        .map(|m| {
            let traces: std::collections::HashSet<SubsetMask> =
                f.iter().filter(|o| *o != m).map(|o| o.intersection(m)).collect();
            mode.sizes(k).flat_map(|sz| m.subsets_of_size(sz)).find(|b| !traces.contains(b))
        })
        .collect()
}

pub fn satisfies_switness(f: &Family, mode: WitnessMode) -> bool {
    f.is_empty() || switness_assignment(f, mode).is_some()
}

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a &= !b;
        }
    }

    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Vertices are relabelled by non-increasing degree so that bit order is the
/// colouring order.
struct Graph {
    adj: Vec<Bits>,
    /// Universe index of each (relabelled) vertex.
    owner: Vec<usize>,
    /// Relabelled vertices owned by universe index 0.
    roots: Vec<usize>,
}

impl Graph {
    fn build(nv: usize, owner: Vec<usize>, compatible: impl Fn(usize, usize) -> bool + Sync) -> Graph {
        let raw: Vec<Vec<usize>> =
            (0..nv).into_par_iter().map(|a| (0..nv).filter(|&b| a != b && compatible(a, b)).collect()).collect();
        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(raw[v].len()), v));
        let mut pos = vec![0; nv];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let adj = order
            .iter()
            .map(|&v| {
                let mut b = Bits::zeros(nv);
                for &u in &raw[v] {
                    b.set(pos[u]);
                }
                b
            })
            .collect();
        let owner_new: Vec<usize> = order.iter().map(|&v| owner[v]).collect();
        let roots = (0..nv).filter(|&v| owner_new[v] == 0).collect();
        Graph { adj, owner: owner_new, roots }
    }
}

struct Shared<'a> {
    best: AtomicUsize,
    nodes: AtomicU64,
    abort: AtomicBool,
    budget: &'a Budget,
    start: Instant,
    /// Stop everything once this size is reached.
    stop_at: usize,
}

impl Shared<'_> {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_nodes {
            self.abort.store(true, Ordering::Relaxed);
        }
        if n.is_multiple_of(4096) {
            if let Some(t) = self.budget.max_time {
                if self.start.elapsed() > t {
                    self.abort.store(true, Ordering::Relaxed);
                }
            }
        }
        !self.abort.load(Ordering::Relaxed)
    }
}

struct Worker<'a, 'b> {
    g: &'a Graph,
    sh: &'a Shared<'b>,
    accept: &'a (dyn Fn(&[usize]) -> bool + Sync),
    best: Option<Vec<usize>>,
}

impl Worker<'_, '_> {
    fn threshold(&self) -> usize {
        self.sh.best.load(Ordering::Relaxed)
    }

    fn done(&self) -> bool {
        self.sh.abort.load(Ordering::Relaxed) || self.threshold() >= self.sh.stop_at
    }

    fn consider(&mut self, r: &[usize]) {
        if r.len() > self.threshold() && (self.accept)(r) {
            self.sh.best.fetch_max(r.len(), Ordering::Relaxed);
            if self.best.as_ref().is_none_or(|b| b.len() < r.len()) {
                self.best = Some(r.to_vec());
            }
        }
    }

    /// Greedy sequential colouring; each class is pairwise non-adjacent.
    fn colour(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count());
        let mut q = p.clone();
        let mut c = 0;
        while !q.is_empty() {
            c += 1;
            let mut class = q.clone();
            while let Some(v) = class.first() {
                class.clear(v);
                q.clear(v);
                class.and_not_assign(&self.g.adj[v]);
                out.push((v, c));
            }
        }
        out
    }

    fn expand(&mut self, r: &mut Vec<usize>, mut p: Bits) {
        if !self.sh.tick() {
            return;
        }
        let order = self.colour(&p);
        for &(v, c) in order.iter().rev() {
            if self.done() || r.len() + c <= self.threshold() {
                return;
            }
            r.push(v);
            self.consider(r);
            let np = p.and(&self.g.adj[v]);
            if !np.is_empty() {
                self.expand(r, np);
            }
            r.pop();
            p.clear(v);
        }
    }

    fn root(&mut self, v: usize) {
        let mut r = vec![v];
        self.consider(&r);
        let p = self.g.adj[v].clone();
        if !p.is_empty() && !self.done() {
            self.expand(&mut r, p);
        }
    }
}

/// Best clique found (if any beat the floor) and nodes expanded.
type CliqueRun = (Option<Vec<usize>>, u64);

/// Maximum accepted clique containing a root vertex, or `None` if none
/// beats `floor`. Errors with the best clique found when the budget runs out.
fn max_clique(
    g: &Graph,
    floor: usize,
    stop_at: usize,
    accept: &(dyn Fn(&[usize]) -> bool + Sync),
    budget: &Budget,
    parallel: bool,
) -> std::result::Result<CliqueRun, CliqueRun> {
    let sh = Shared {
        best: AtomicUsize::new(floor),
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        budget,
        start: Instant::now(),
        stop_at,
    };
    let run = |v: usize| {
        let mut w = Worker { g, sh: &sh, accept, best: None };
        w.root(v);
        w.best
    };
    let found: Vec<Option<Vec<usize>>> =
        if parallel { g.roots.par_iter().map(|&v| run(v)).collect() } else { g.roots.iter().map(|&v| run(v)).collect() };
    // Largest first; ties go to the earliest root.
    let mut best: Option<Vec<usize>> = None;
    for c in found.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| b.len() < c.len()) {
            best = Some(c);
        }
    }
    let nodes = sh.nodes.load(Ordering::Relaxed);
    if sh.abort.load(Ordering::Relaxed) {
        Err((best, nodes))
    } else {
        Ok((best, nodes))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub n: usize,
    pub d: usize,
    pub mode: WitnessMode,
    pub size: usize,
    pub family: Family,
    pub nodes: u64,
    /// Size of the seed family the search had to beat.
    pub seed_size: usize,
    /// `C(n-1, d)` for witness-size modes; exceeding it is a counterexample.
    pub conjectured_bound: Option<u128>,
    pub exceeds_conjectured_bound: bool,
}

struct Problem {
    n: usize,
    k: usize,
    sets: Vec<SubsetMask>,
    graph: Graph,
}

impl Problem {
    fn family(&self, clique: &[usize]) -> Result<Family> {
        let mut idx: Vec<usize> = clique.iter().map(|&v| self.graph.owner[v]).collect();
        idx.sort_unstable();
        Family::uniform(self.n, self.k, idx.into_iter().map(|i| self.sets[i]).collect())
    }
}

fn universe(n: usize, k: usize) -> Result<Vec<SubsetMask>> {
    let total = binomial(n as u64, k as u64);
    if total > MAX_VERTICES as u128 {
        return Err(Error::TooLarge(format!("{total} candidate sets")));
    }
    Ok(enumerate_k_subsets(n, k)?.collect())
}

fn witness_problem(n: usize, d: usize, mode: WitnessMode) -> Result<Problem> {
    let k = d + 1;
    let sets = universe(n, k)?;
    let mut owner = Vec::new();
    let mut wit = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        for b in mode.sizes(k).flat_map(|sz| s.subsets_of_size(sz)) {
            owner.push(i);
            wit.push(b);
        }
    }
    if owner.len() > MAX_VERTICES {
        return Err(Error::TooLarge(format!("{} (member, witness) pairs", owner.len())));
    }
    let graph = Graph::build(owner.len(), owner.clone(), |a, b| {
        let (fa, fb) = (sets[owner[a]], sets[owner[b]]);
        let meet = fa.intersection(&fb);
        owner[a] != owner[b] && meet != wit[a] && meet != wit[b]
    });
    Ok(Problem { n, k, sets, graph })
}

fn run_problem(
    p: &Problem,
    seed: Option<Family>,
    cap: Option<usize>,
    accept: &(dyn Fn(&[usize]) -> bool + Sync),
    budget: &Budget,
) -> Result<(usize, Family, u64)> {
    let parallel = rayon::current_num_threads() > 1;
    let floor = seed.as_ref().map_or(0, Family::len);
    let stop_at = cap.unwrap_or(usize::MAX);
    let budget_err = |best: Option<Vec<usize>>, nodes: u64| -> Error {
        let fam = best.and_then(|b| p.family(&b).ok());
        match (fam, &seed) {
            (Some(f), _) if f.len() > floor => {
                Error::BudgetExceeded { best: f.len(), nodes, best_family: f.to_lists() }
            }
            (_, Some(s)) => Error::BudgetExceeded { best: s.len(), nodes, best_family: s.to_lists() },
            _ => Error::BudgetExceeded { best: 0, nodes, best_family: Vec::new() },
        }
    };
    let (found, nodes) = if floor >= stop_at {
        (None, 0)
    } else {
        max_clique(&p.graph, floor, stop_at, accept, budget, parallel).map_err(|(b, n)| budget_err(b, n))?
    };
    let opt = found.as_ref().map_or(floor, Vec::len);
    if opt == 0 {
        return Ok((0, Family::uniform(p.n, p.k, Vec::new())?, nodes));
    }
    // Canonical maximizer: first clique of size `opt` in sequential order.
    let (canon, more) =
        max_clique(&p.graph, opt - 1, opt, accept, budget, false).map_err(|(b, n)| budget_err(b, n + nodes))?;
    let canon = canon.ok_or_else(|| Error::Inconsistency(format!("no clique of size {opt} on rerun")))?;
    Ok((opt, p.family(&canon)?, nodes + more))
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n < d + 1 {
        return Err(Error::InvalidParameter(format!("need n >= d+1, got n={n}, d={d}")));
    }
    Ok(())
}

/// Largest `(d+1)`-uniform family on `[n]` with VC-dimension at most `d`.
/// Pruned with the upper bound `C(n, d)`.
pub fn max_vc_family(n: usize, d: usize, budget: &Budget) -> Result<SearchOutcome> {
    check_nd(n, d)?;
    let p = witness_problem(n, d, WitnessMode::Vc)?;
    let seed = if d >= 1 && n >= 2 * (d + 1) {
        mz_family(n, d, &MzAssignment::all_one(n, d)?)?.family().clone()
    } else {
        star(n, d + 1, 1)?
    };
    let cap = binomial(n as u64, d as u64).min(usize::MAX as u128) as usize;
    let (size, family, nodes) = run_problem(&p, Some(seed.clone()), Some(cap), &|_| true, budget)?;
    Ok(SearchOutcome {
        n,
        d,
        mode: WitnessMode::Vc,
        size,
        family,
        nodes,
        seed_size: seed.len(),
        conjectured_bound: None,
        exceeds_conjectured_bound: false,
    })
}

/// Largest family in which every member has a witness of size `s`
/// (or at most `s` when `at_most`). `C(n-1, d)` is only a tripwire here.
pub fn max_switness_family(n: usize, d: usize, s: usize, at_most: bool, budget: &Budget) -> Result<SearchOutcome> {
    check_nd(n, d)?;
    if s > d {
        return Err(Error::InvalidParameter(format!("witness size {s} exceeds d = {d}")));
    }
    let mode = if at_most { WitnessMode::AtMost(s) } else { WitnessMode::Exact(s) };
    let p = witness_problem(n, d, mode)?;
    let seed = star(n, d + 1, 1)?;
    let (size, family, nodes) = run_problem(&p, Some(seed.clone()), None, &|_| true, budget)?;
    let bound = if n >= 1 { binomial(n as u64 - 1, d as u64) } else { 0 };
    Ok(SearchOutcome {
        n,
        d,
        mode,
        size,
        family,
        nodes,
        seed_size: seed.len(),
        conjectured_bound: Some(bound),
        exceeds_conjectured_bound: size as u128 > bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectingOutcome {
    pub n: usize,
    pub k: usize,
    pub nontrivial: bool,
    pub size: usize,
    pub family: Family,
    pub nodes: u64,
}

/// Largest intersecting `k`-uniform family on `[n]`; with `nontrivial`,
/// the members must have empty common intersection.
pub fn max_intersecting(n: usize, k: usize, nontrivial: bool, budget: &Budget) -> Result<IntersectingOutcome> {
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    let sets = universe(n, k)?;
    let graph = Graph::build(sets.len(), (0..sets.len()).collect(), |a, b| !sets[a].intersection(&sets[b]).is_empty());
    let p = Problem { n, k, sets, graph };
    let accept = |c: &[usize]| {
        !nontrivial || {
            let mut common = p.sets[p.graph.owner[c[0]]];
            for &v in c {
                common = common.intersection(&p.sets[p.graph.owner[v]]);
            }
            common.is_empty()
        }
    };
    let (size, family, nodes) = run_problem(&p, None, None, &accept, budget)?;
    Ok(IntersectingOutcome { n, k, nontrivial, size, family, nodes })
}

/// Exhaustive enumeration of all subfamilies satisfying the hereditary
/// predicate `valid`; the largest one passing `accept` wins. Independent of
/// the clique encoding; limited to small universes.
pub fn brute_force_max(
    n: usize,
    k: usize,
    valid: &dyn Fn(&Family) -> bool,
    accept: &dyn Fn(&Family) -> bool,
) -> Result<(usize, Family)> {
    let sets: Vec<SubsetMask> = enumerate_k_subsets(n, k)?.collect();
    if sets.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!("{} sets exceed the exhaustive limit {BRUTE_FORCE_LIMIT}", sets.len())));
    }
    type Pred<'a> = &'a dyn Fn(&Family) -> bool;
    fn go(sets: &[SubsetMask], from: usize, cur: &mut Vec<SubsetMask>, k: usize, p: (Pred, Pred), best: &mut Family) {
        for i in from..sets.len() {
            cur.push(sets[i]);
            let f = Family::uniform(best.n(), k, cur.clone()).expect("distinct k-sets");
            if p.0(&f) {
                if f.len() > best.len() && p.1(&f) {
                    *best = f;
                }
                go(sets, i + 1, cur, k, p, best);
            }
            cur.pop();
        }
    }
    let mut best = Family::uniform(n, k, Vec::new())?;
    go(&sets, 0, &mut Vec::new(), k, (valid, accept), &mut best);
    Ok((best.len(), best))
}

#[derive(Clone, Debug, Serialize)]
pub struct HuntReport {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub bound: u128,
    pub restarts: usize,
    pub best_random: usize,
    /// Exact maximum if the exhaustive phase finished.
    pub exhaustive_max: Option<usize>,
    pub exhaustive_nodes: u64,
    pub counterexample: Option<Family>,
}

/// Random greedy restarts, then exhaustive search under `budget`, looking
/// for an `s`-witness family larger than `C(n-1, d)`. Any family reported
/// has been re-checked by [`satisfies_switness`].
pub fn hunt_counterexample(
    n: usize,
    d: usize,
    s: usize,
    restarts: usize,
    seed: u64,
    budget: &Budget,
) -> Result<HuntReport> {
    check_nd(n, d)?;
    if s > d {
        return Err(Error::InvalidParameter(format!("witness size {s} exceeds d = {d}")));
    }
    let mode = WitnessMode::Exact(s);
    let bound = binomial(n as u64 - 1, d as u64);
    let sets: Vec<SubsetMask> = universe(n, d + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = HuntReport {
        n,
        d,
        s,
        bound,
        restarts,
        best_random: 0,
        exhaustive_max: None,
        exhaustive_nodes: 0,
        counterexample: None,
    };
    for _ in 0..restarts {
        let mut order = sets.clone();
        order.shuffle(&mut rng);
        let mut cur: Vec<SubsetMask> = Vec::new();
        for t in order {
            cur.push(t);
            if !satisfies_switness(&Family::uniform(n, d + 1, cur.clone())?, mode) {
                cur.pop();
            }
        }
        report.best_random = report.best_random.max(cur.len());
        if cur.len() as u128 > bound {
            let f = Family::uniform(n, d + 1, cur)?.sorted();
            if satisfies_switness(&f, mode) {
                report.counterexample = Some(f);
                return Ok(report);
            }
        }
    }
    match max_switness_family(n, d, s, false, budget) {
        Ok(out) => {
            report.exhaustive_max = Some(out.size);
            report.exhaustive_nodes = out.nodes;
            if out.exceeds_conjectured_bound && satisfies_switness(&out.family, mode) {
                report.counterexample = Some(out.family);
            }
        }
        Err(Error::BudgetExceeded { best, nodes, best_family }) => {
            report.exhaustive_nodes = nodes;
            if best as u128 > bound {
                let f = Family::from_lists(n, Some(d + 1), best_family)?;
                if satisfies_switness(&f, mode) {
                    report.counterexample = Some(f);
                }
            }
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// VC-dimension check used to validate maximizers.
pub fn vc_at_most(f: &Family, d: usize) -> Result<bool> {
    Ok(f.is_empty() || vc_dimension(f)? <= d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::stability_example;

    fn b() -> Budget {
        Budget::unlimited()
    }

    #[test]
    fn witness_checker_examples() {
        let st = star(6, 3, 6).unwrap();
        for s in 0..=2 {
            assert!(satisfies_switness(&st, WitnessMode::Exact(s)));
        }
        let full = Family::complete(6, 3).unwrap();
        assert!(!satisfies_switness(&full, WitnessMode::Vc));
        // Two disjoint triples are not intersecting.
        let two = Family::from_lists(6, Some(3), vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        assert!(!satisfies_switness(&two, WitnessMode::Exact(0)));
        assert!(satisfies_switness(&two, WitnessMode::Exact(1)));
        assert!(satisfies_switness(&stability_example(8, 2).unwrap(), WitnessMode::Exact(2)));
    }

    #[test]
    fn vc_mode_matches_vc_dimension() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let all: Vec<SubsetMask> = enumerate_k_subsets(6, 3).unwrap().collect();
        for _ in 0..300 {
            let p = rng.random_range(0.1..0.9);
            let f = Family::uniform(6, 3, all.iter().copied().filter(|_| rng.random_bool(p)).collect()).unwrap();
            assert_eq!(satisfies_switness(&f, WitnessMode::Vc), vc_at_most(&f, 2).unwrap());
        }
    }

    #[test]
    fn trivial_vc_instance() {
        for d in 1..=3 {
            let out = max_vc_family(d + 1, d, &b()).unwrap();
            assert_eq!(out.size, 1);
        }
    }

    #[test]
    fn branch_and_bound_matches_brute_force() {
        for (n, d) in [(4, 1), (5, 1), (5, 2), (6, 2), (4, 2), (6, 1)] {
            let k = d + 1;
            if binomial(n as u64, k as u64) > 20 {
                continue;
            }
            let out = max_vc_family(n, d, &b()).unwrap();
            let (bf, _) = brute_force_max(n, k, &|f| vc_at_most(f, d).unwrap(), &|_| true).unwrap();
            assert_eq!(out.size, bf, "vc ({n},{d})");
            assert!(vc_at_most(&out.family, d).unwrap());
            for s in 0..=d {
                for at_most in [false, true] {
                    let mode = if at_most { WitnessMode::AtMost(s) } else { WitnessMode::Exact(s) };
                    let out = max_switness_family(n, d, s, at_most, &b()).unwrap();
                    let (bf, _) = brute_force_max(n, k, &|f| satisfies_switness(f, mode), &|_| true).unwrap();
                    assert_eq!(out.size, bf, "({n},{d},{s},{at_most})");
                    assert!(satisfies_switness(&out.family, mode));
                }
            }
            for nontrivial in [false, true] {
                let out = max_intersecting(n, k, nontrivial, &b()).unwrap();
                let (bf, _) = brute_force_max(n, k, &|f| f.is_intersecting(), &|f| {
                    !nontrivial || f.common_intersection().is_empty()
                })
                .unwrap();
                assert_eq!(out.size, bf, "intersecting ({n},{k},{nontrivial})");
            }
        }
    }

    #[test]
    fn intersecting_examples() {
        assert_eq!(max_intersecting(6, 3, false, &b()).unwrap().size, 10);
        assert_eq!(max_intersecting(5, 3, false, &b()).unwrap().size, 10);
        let hm = max_intersecting(7, 3, true, &b()).unwrap();
        assert_eq!(hm.size, 13);
        assert!(hm.family.is_intersecting() && hm.family.common_intersection().is_empty());
    }

    #[test]
    fn zero_witness_equals_intersecting() {
        for (n, d) in [(5, 1), (6, 1), (6, 2), (7, 2), (8, 1)] {
            let a = max_switness_family(n, d, 0, false, &b()).unwrap().size;
            let c = max_intersecting(n, d + 1, false, &b()).unwrap().size;
            assert_eq!(a, c, "({n},{d})");
        }
    }

    #[test]
    fn budget_is_reported() {
        let err = max_switness_family(7, 2, 1, false, &Budget::nodes(5)).unwrap_err();
        match err {
            Error::BudgetExceeded { best, .. } => assert!(best >= 15),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn results_are_deterministic() {
        let a = max_switness_family(6, 2, 1, false, &b()).unwrap();
        let c = max_switness_family(6, 2, 1, false, &b()).unwrap();
        assert_eq!(a.family, c.family);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let par = pool.install(|| max_switness_family(6, 2, 1, false, &b()).unwrap());
        assert_eq!(par.family, a.family);
    }

    #[test]
    fn hunt_small_instances() {
        let r = hunt_counterexample(6, 2, 1, 20, 1, &b()).unwrap();
        assert!(r.counterexample.is_none());
        assert_eq!(r.exhaustive_max, Some(10));
        assert!(r.best_random <= 10);
    }
}
