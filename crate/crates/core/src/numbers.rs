//! Exact computation of the minimal interval length that forces a witness.
//!
//! `J(t, n)` is the least `N` such that every t-coloring of `{1..=N}` admits
//! a length-n witness (`J'` for the distinct-entry variant). The search runs
//! one depth-first pass over colorings extended one integer at a time:
//!
//! * class labels are canonicalized by first appearance, cutting the tree by
//!   up to `t!`;
//! * a branch is pruned as soon as its coloring admits a witness, and when
//!   position `N` is colored only witnesses whose total (their maximal
//!   subset sum) equals `N` can be new, so each node does incremental work;
//! * the deepest witness-free coloring reached is `J - 1`, and the first one
//!   found there is returned as the extremal certificate.

use crate::coloring::{ClassId, GroundColoring};
use crate::ramsey::{iterated_ramsey_bound, RamseyError};
use crate::search::{find_witness, WitnessQuery};
use num_bigint::BigUint;
use rayon::prelude::*;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("class count must be at least 1")]
    NoClasses,
    #[error("witness length must be at least 1")]
    ZeroLength,
    #[error("cap must be at least 1")]
    ZeroCap,
    #[error("node budget {budget} exhausted after exploring {nodes} nodes")]
    BudgetExhausted { budget: u64, nodes: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("recursion is defined for n >= 2, got {0}")]
    TooShallow(u64),
    #[error("no base bound available for t = {0}")]
    NoBase(u64),
    #[error("intermediate bound too large to recurse on")]
    TooLarge,
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
}

/// Parameters of one exact-number search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchProblem {
    /// Class count.
    pub t: u32,
    /// Witness length.
    pub n: usize,
    /// Require pairwise distinct witness entries.
    pub distinct: bool,
    /// Largest interval length to explore.
    pub cap: u64,
    /// Node limit; exceeding it is an error, not a result.
    pub budget: u64,
}

/// Result of one exact-number search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// The minimal forcing length, or `None` when it exceeds the cap.
    pub value: Option<u64>,
    /// A witness-free coloring of `{1..=value-1}` (absent when `value` is 1),
    /// or of `{1..=cap}` when the value exceeds the cap.
    pub extremal: Option<GroundColoring>,
    /// Colorings attempted during the search.
    pub nodes: u64,
}

/// True when no length-n witness (distinct entries if requested) verifies
/// against the coloring; decided by exhaustive pruned enumeration.
pub fn is_witness_free(gc: &GroundColoring, n: usize, distinct: bool) -> bool {
    assert!(n >= 1, "witness length must be positive");
    find_witness(&WitnessQuery {
        assign: gc.assign(),
        n,
        distinct,
        exact_total: None,
        total_cap: gc.n_max(),
    })
    .is_none()
}

/// Whether extending a witness-free coloring of `{1..=m-1}` by the class of
/// `m` stays witness-free: only candidates whose total is exactly `m` are new.
fn extension_stays_free(assign: &[ClassId], n: usize, distinct: bool) -> bool {
    let m = assign.len() as u64;
    find_witness(&WitnessQuery {
        assign,
        n,
        distinct,
        exact_total: Some(m),
        total_cap: m,
    })
    .is_none()
}

/// Admissible class labels for the next position under first-appearance
/// canonicalization: every label used so far plus one fresh label.
fn canonical_extensions(assign: &[ClassId], t: u32) -> std::ops::RangeInclusive<ClassId> {
    let used = assign.iter().copied().max().unwrap_or(0);
    1..=used.saturating_add(1).min(t)
}

struct DfsShared<'a> {
    t: u32,
    n: usize,
    distinct: bool,
    cap: u64,
    budget: u64,
    nodes: &'a AtomicU64,
    stop: &'a AtomicBool,
}

struct DfsLocal {
    assign: Vec<ClassId>,
    best_depth: u64,
    best: Option<Vec<ClassId>>,
    cap_coloring: Option<Vec<ClassId>>,
}

enum DfsEvent {
    Done,
    CapReached,
    OutOfBudget,
}

fn dfs(shared: &DfsShared<'_>, local: &mut DfsLocal) -> DfsEvent {
    let depth = local.assign.len() as u64;
    if depth > local.best_depth {
        local.best_depth = depth;
        local.best = Some(local.assign.clone());
    }
    if depth == shared.cap {
        local.cap_coloring = Some(local.assign.clone());
        shared.stop.store(true, Ordering::Relaxed);
        return DfsEvent::CapReached;
    }
    if shared.stop.load(Ordering::Relaxed) {
        return DfsEvent::CapReached;
    }
    for class in canonical_extensions(&local.assign, shared.t) {
        if shared.nodes.fetch_add(1, Ordering::Relaxed) + 1 > shared.budget {
            return DfsEvent::OutOfBudget;
        }
        local.assign.push(class);
        if extension_stays_free(&local.assign, shared.n, shared.distinct) {
            match dfs(shared, local) {
                DfsEvent::Done => {}
                stopped => {
                    local.assign.pop();
                    return stopped;
                }
            }
        }
        local.assign.pop();
    }
    DfsEvent::Done
}

fn validate(p: &SearchProblem) -> Result<(), SearchError> {
    if p.t == 0 {
        return Err(SearchError::NoClasses);
    }
    if p.n == 0 {
        return Err(SearchError::ZeroLength);
    }
    if p.cap == 0 {
        return Err(SearchError::ZeroCap);
    }
    Ok(())
}

/// Computes the minimal forcing length for `p`, sequentially.
pub fn compute_number(p: &SearchProblem) -> Result<SearchOutcome, SearchError> {
    compute_number_jobs(p, 1)
}

/// Computes the minimal forcing length for `p` with `jobs` parallel workers.
/// The value is independent of the worker count; when it exceeds the cap the
/// explored node count (and which cap-length coloring is reported) may vary.
pub fn compute_number_jobs(p: &SearchProblem, jobs: usize) -> Result<SearchOutcome, SearchError> {
    validate(p)?;
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let shared = DfsShared {
        t: p.t,
        n: p.n,
        distinct: p.distinct,
        cap: p.cap,
        budget: p.budget,
        nodes: &nodes,
        stop: &stop,
    };

    let merge = |results: Vec<DfsLocal>| -> DfsLocal {
        let mut acc = DfsLocal {
            assign: Vec::new(),
            best_depth: 0,
            best: None,
            cap_coloring: None,
        };
        // Results arrive in prefix order, so keeping the first local that
        // reaches each new depth reproduces the sequential first-found rule.
        for r in results {
            if r.best_depth > acc.best_depth {
                acc.best_depth = r.best_depth;
                acc.best = r.best;
            }
            if acc.cap_coloring.is_none() {
                acc.cap_coloring = r.cap_coloring;
            }
        }
        acc
    };

    let finish = |local: DfsLocal, out_of_budget: bool| -> Result<SearchOutcome, SearchError> {
        let total_nodes = nodes.load(Ordering::Relaxed);
        if out_of_budget && local.cap_coloring.is_none() {
            return Err(SearchError::BudgetExhausted {
                budget: p.budget,
                nodes: total_nodes,
            });
        }
        if let Some(assign) = local.cap_coloring {
            return Ok(SearchOutcome {
                value: None,
                extremal: Some(GroundColoring::new(p.t, assign).expect("labels are valid")),
                nodes: total_nodes,
            });
        }
        let extremal = local
            .best
            .map(|assign| GroundColoring::new(p.t, assign).expect("labels are valid"));
        Ok(SearchOutcome {
            value: Some(local.best_depth + 1),
            extremal,
            nodes: total_nodes,
        })
    };

    if jobs <= 1 {
        let mut local = DfsLocal {
            assign: Vec::new(),
            best_depth: 0,
            best: None,
            cap_coloring: None,
        };
        let event = dfs(&shared, &mut local);
        return finish(local, matches!(event, DfsEvent::OutOfBudget));
    }

    // Sharded run: enumerate witness-free canonical prefixes of a small
    // depth sequentially, then explore each prefix subtree in parallel.
    let shard_depth = p.cap.clamp(1, 8) as usize;
    let mut prefix_local = DfsLocal {
        assign: Vec::new(),
        best_depth: 0,
        best: None,
        cap_coloring: None,
    };
    let mut shards: Vec<Vec<ClassId>> = Vec::new();
    let mut out_of_budget = false;
    collect_shards(
        &shared,
        &mut prefix_local,
        shard_depth,
        &mut shards,
        &mut out_of_budget,
    );
    if out_of_budget {
        return finish(prefix_local, true);
    }
    if prefix_local.cap_coloring.is_some() {
        return finish(prefix_local, false);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    let shard_results: Vec<(DfsLocal, bool)> = pool.install(|| {
        shards
            .into_par_iter()
            .map(|assign| {
                let mut local = DfsLocal {
                    assign,
                    best_depth: 0,
                    best: None,
                    cap_coloring: None,
                };
                let event = dfs(&shared, &mut local);
                local.assign.clear();
                (local, matches!(event, DfsEvent::OutOfBudget))
            })
            .collect()
    });
    let any_budget = shard_results.iter().any(|(_, b)| *b);
    let mut all = vec![prefix_local];
    all.extend(shard_results.into_iter().map(|(l, _)| l));
    finish(merge(all), any_budget)
}

/// Depth-first prefix enumeration used by the sharded search. Tracks bests at
/// depths below the shard depth so no witness-free coloring is missed.
fn collect_shards(
    shared: &DfsShared<'_>,
    local: &mut DfsLocal,
    shard_depth: usize,
    shards: &mut Vec<Vec<ClassId>>,
    out_of_budget: &mut bool,
) {
    let depth = local.assign.len();
    if depth as u64 > local.best_depth {
        local.best_depth = depth as u64;
        local.best = Some(local.assign.clone());
    }
    if depth as u64 == shared.cap {
        local.cap_coloring = Some(local.assign.clone());
        return;
    }
    if depth == shard_depth {
        shards.push(local.assign.clone());
        return;
    }
    for class in canonical_extensions(&local.assign, shared.t) {
        if *out_of_budget || local.cap_coloring.is_some() {
            return;
        }
        if shared.nodes.fetch_add(1, Ordering::Relaxed) + 1 > shared.budget {
            *out_of_budget = true;
            return;
        }
        local.assign.push(class);
        if extension_stays_free(&local.assign, shared.n, shared.distinct) {
            collect_shards(shared, local, shard_depth, shards, out_of_budget);
        }
        local.assign.pop();
    }
}

/// Searches for a witness-free t-coloring of `{1..=n_max}`; `None` is an
/// exhaustive nonexistence result.
pub fn extremal_certificate(
    t: u32,
    n: usize,
    distinct: bool,
    n_max: u64,
    budget: u64,
) -> Result<Option<GroundColoring>, SearchError> {
    extremal_certificate_jobs(t, n, distinct, n_max, budget, 1)
}

/// [`extremal_certificate`] with a worker count.
pub fn extremal_certificate_jobs(
    t: u32,
    n: usize,
    distinct: bool,
    n_max: u64,
    budget: u64,
    jobs: usize,
) -> Result<Option<GroundColoring>, SearchError> {
    let p = SearchProblem {
        t,
        n,
        distinct,
        cap: n_max,
        budget,
    };
    let outcome = compute_number_jobs(&p, jobs)?;
    match outcome.value {
        None => Ok(outcome.extremal),
        Some(_) => Ok(None),
    }
}

/// Recursive upper bound: the base `n = 2` value comes from `base_bound`, and
/// each further length plugs four times the previous bound into the iterated
/// recursion of [`iterated_ramsey_bound`] as both target size and layer depth.
pub fn upper_bound(
    t: u64,
    n: u64,
    base_bound: &dyn Fn(u64) -> Option<BigUint>,
    ramsey_upper: &dyn Fn(&BigUint, u64, u64) -> Option<BigUint>,
) -> Result<BigUint, BoundError> {
    if n < 2 {
        return Err(BoundError::TooShallow(n));
    }
    let mut current = base_bound(t).ok_or(BoundError::NoBase(t))?;
    for _ in 3..=n {
        let k = &current * 4u32;
        let r = u64::try_from(&k).map_err(|_| BoundError::TooLarge)?;
        current = iterated_ramsey_bound(&k, r, t, ramsey_upper)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramsey::exact_small_ramsey_upper;
    use std::collections::BTreeSet;

    fn gc(t: u32, assign: &[ClassId]) -> GroundColoring {
        GroundColoring::new(t, assign.to_vec()).unwrap()
    }

    fn problem(t: u32, n: usize) -> SearchProblem {
        SearchProblem {
            t,
            n,
            distinct: false,
            cap: 64,
            budget: 100_000_000,
        }
    }

    #[test]
    fn witness_free_examples() {
        assert!(is_witness_free(&gc(2, &[1, 2, 2, 1]), 2, false));
        assert!(!is_witness_free(&gc(1, &[1, 1, 1]), 3, false));
        assert!(!is_witness_free(&gc(2, &[1, 2, 2, 1, 1]), 2, false));
    }

    #[test]
    fn trivial_numbers() {
        for t in 1..=4 {
            let out = compute_number(&problem(t, 1)).unwrap();
            assert_eq!(out.value, Some(1));
            assert!(out.extremal.is_none());
        }
        for n in 1..=6 {
            let out = compute_number(&problem(1, n)).unwrap();
            assert_eq!(out.value, Some(n as u64));
        }
    }

    #[test]
    fn two_classes_pairs() {
        let out = compute_number(&problem(2, 2)).unwrap();
        assert_eq!(out.value, Some(5));
        let extremal = out.extremal.unwrap();
        assert_eq!(extremal.assign(), &[1, 2, 2, 1]);
        assert!(is_witness_free(&extremal, 2, false));
    }

    #[test]
    fn distinct_mode() {
        // Distinct entries with one class: the least total of n distinct
        // positive integers is n(n+1)/2, so the value is exactly that.
        for n in 1..=4usize {
            let out = compute_number(&SearchProblem {
                t: 1,
                n,
                distinct: true,
                cap: 64,
                budget: 10_000_000,
            })
            .unwrap();
            assert_eq!(out.value, Some((n * (n + 1) / 2) as u64));
        }
    }

    #[test]
    fn cap_and_budget_outcomes() {
        let out = compute_number(&SearchProblem {
            t: 2,
            n: 2,
            distinct: false,
            cap: 3,
            budget: 1_000_000,
        })
        .unwrap();
        assert_eq!(out.value, None);
        let coloring = out.extremal.unwrap();
        assert_eq!(coloring.n_max(), 3);
        assert!(is_witness_free(&coloring, 2, false));

        let err = compute_number(&SearchProblem {
            t: 3,
            n: 2,
            distinct: false,
            cap: 20,
            budget: 10,
        });
        assert!(matches!(err, Err(SearchError::BudgetExhausted { .. })));
    }

    #[test]
    fn extremal_examples() {
        let cert = extremal_certificate(2, 2, false, 4, 1_000_000)
            .unwrap()
            .unwrap();
        assert_eq!(cert.assign(), &[1, 2, 2, 1]);
        assert_eq!(extremal_certificate(2, 2, false, 5, 1_000_000).unwrap(), None);
        let cert = extremal_certificate(1, 2, false, 1, 1_000_000)
            .unwrap()
            .unwrap();
        assert_eq!(cert.assign(), &[1]);
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = problem(2, 2);
        let seq = compute_number(&p).unwrap();
        let par = compute_number_jobs(&p, 4).unwrap();
        assert_eq!(seq.value, par.value);
        assert_eq!(seq.extremal, par.extremal);
        assert_eq!(seq.nodes, par.nodes);
    }

    #[test]
    fn upper_bound_examples() {
        let ru = |k: &BigUint, r: u64, t: u64| exact_small_ramsey_upper(k, r, t);
        let base = |t: u64| {
            compute_number(&problem(t as u32, 2))
                .ok()
                .and_then(|o| o.value)
                .map(BigUint::from)
        };
        // n = 2 returns the base unchanged.
        assert_eq!(upper_bound(1, 2, &base, &ru).unwrap(), BigUint::from(2u32));
        // One class: N(8, 8, 1) = 9.
        assert_eq!(upper_bound(1, 3, &base, &ru).unwrap(), BigUint::from(9u32));
        assert!(matches!(
            upper_bound(1, 1, &base, &ru),
            Err(BoundError::TooShallow(1))
        ));
        // Beyond the exact table the recursion reports the missing cell.
        assert!(matches!(
            upper_bound(2, 3, &base, &ru),
            Err(BoundError::Ramsey(RamseyError::NoUpperBound { .. }))
        ));
    }

    #[test]
    fn canonical_enumeration_hits_each_orbit_once() {
        // The canonical extension rule yields exactly one representative per
        // class-relabeling orbit: compare against naive enumeration.
        fn canonicalize(assign: &[ClassId]) -> Vec<ClassId> {
            let mut map = std::collections::HashMap::new();
            let mut next = 1;
            assign
                .iter()
                .map(|&c| {
                    *map.entry(c).or_insert_with(|| {
                        let v = next;
                        next += 1;
                        v
                    })
                })
                .collect()
        }
        for t in 1..=3u32 {
            for n in 1..=6usize {
                let mut canonical: Vec<Vec<ClassId>> = vec![vec![]];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for prefix in &canonical {
                        for c in canonical_extensions(prefix, t) {
                            let mut ext = prefix.clone();
                            ext.push(c);
                            next.push(ext);
                        }
                    }
                    canonical = next;
                }
                let mut orbits = BTreeSet::new();
                let mut all = vec![vec![]];
                for _ in 0..n {
                    let mut next = Vec::new();
                    for prefix in &all {
                        for c in 1..=t {
                            let mut ext: Vec<ClassId> = prefix.clone();
                            ext.push(c);
                            next.push(ext);
                        }
                    }
                    all = next;
                }
                for assign in all {
                    orbits.insert(canonicalize(&assign));
                }
                let canonical_set: BTreeSet<Vec<ClassId>> = canonical.into_iter().collect();
                assert_eq!(canonical_set, orbits);
            }
        }
    }
}
