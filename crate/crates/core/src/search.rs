//! Backtracking search for witness sequences against a fixed coloring.
//!
//! Candidates are nondecreasing (strictly increasing in distinct mode), so
//! each multiset is visited once. Every extension is checked incrementally:
//! each subset sum created by the new entry must stay in range and carry the
//! witness class, which prunes most of the tree at depth one or two.

use crate::bits::SumBits;
use crate::coloring::ClassId;

pub(crate) struct WitnessQuery<'a> {
    /// Coloring of `1..=assign.len()`.
    pub assign: &'a [ClassId],
    /// Required witness length.
    pub n: usize,
    /// Strictly increasing entries instead of nondecreasing.
    pub distinct: bool,
    /// Require the total (the maximal subset sum) to hit this value exactly.
    pub exact_total: Option<u64>,
    /// Upper bound on the total; at most `assign.len()`.
    pub total_cap: u64,
}

/// Smallest possible total of a candidate starting at `first`.
fn min_total(first: u64, count: u64, distinct: bool) -> u64 {
    if distinct {
        count * first + count * (count - 1) / 2
    } else {
        count * first
    }
}

/// Finds the first witness in search order: totals ascend implicitly through
/// the nondecreasing-entry enumeration when `exact_total` is fixed, and the
/// entry sequence itself is lexicographically least among candidates found.
pub(crate) fn find_witness(q: &WitnessQuery) -> Option<Vec<u64>> {
    let n_max = q.assign.len() as u64;
    let cap = q.total_cap.min(n_max);
    if let Some(total) = q.exact_total {
        if total > cap || total < min_total(1, q.n as u64, q.distinct) {
            return None;
        }
    }
    let budget = q.exact_total.unwrap_or(cap);
    if min_total(1, q.n as u64, q.distinct) > budget {
        return None;
    }

    let mut entries = Vec::with_capacity(q.n);
    let class = q.exact_total.map(|t| q.assign[t as usize - 1]);
    let sums = SumBits::new(budget as usize);
    dfs(q, budget, &mut entries, class, &sums, 0).map(|_| entries)
}

fn dfs(
    q: &WitnessQuery,
    budget: u64,
    entries: &mut Vec<u64>,
    class: Option<ClassId>,
    sums: &SumBits,
    total: u64,
) -> Option<()> {
    if entries.len() == q.n {
        return match q.exact_total {
            Some(t) if total != t => None,
            _ => Some(()),
        };
    }
    let remaining = (q.n - entries.len()) as u64;
    let lo = match entries.last() {
        Some(&last) if q.distinct => last + 1,
        Some(&last) => last,
        None => 1,
    };
    if remaining == 1 {
        if let Some(t) = q.exact_total {
            // Only one entry value can reach the exact total.
            if t < total + lo {
                return None;
            }
            let a = t - total;
            let class_here = class.unwrap_or_else(|| q.assign[a as usize - 1]);
            let mut next = sums.clone();
            if next.try_add_entry(a, |s| q.assign[s as usize - 1] == class_here) {
                entries.push(a);
                return Some(());
            }
            return None;
        }
    }
    let mut a = lo;
    while total + min_total(a, remaining, q.distinct) <= budget {
        let class_here = class.unwrap_or_else(|| q.assign[a as usize - 1]);
        let mut next = sums.clone();
        if next.try_add_entry(a, |s| q.assign[s as usize - 1] == class_here) {
            entries.push(a);
            if dfs(q, budget, entries, Some(class_here), &next, total + a).is_some() {
                return Some(());
            }
            entries.pop();
        }
        a += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query<'a>(
        assign: &'a [ClassId],
        n: usize,
        exact_total: Option<u64>,
    ) -> WitnessQuery<'a> {
        WitnessQuery {
            assign,
            n,
            distinct: false,
            exact_total,
            total_cap: assign.len() as u64,
        }
    }

    #[test]
    fn finds_smallest_candidate() {
        let assign = vec![1; 6];
        assert_eq!(find_witness(&query(&assign, 2, None)), Some(vec![1, 1]));
        assert_eq!(find_witness(&query(&assign, 2, Some(4))), Some(vec![1, 3]));
    }

    #[test]
    fn respects_classes() {
        // {1,4} and {2,3}: no length-2 witness at all.
        let assign = vec![1, 2, 2, 1];
        assert_eq!(find_witness(&query(&assign, 2, None)), None);
        // Classes {1,4,5} / {2,3}: (1,4) works.
        let assign = vec![1, 2, 2, 1, 1];
        assert_eq!(find_witness(&query(&assign, 2, None)), Some(vec![1, 4]));
    }

    #[test]
    fn distinct_mode_skips_repeats() {
        let assign = vec![1; 6];
        let q = WitnessQuery {
            assign: &assign,
            n: 2,
            distinct: true,
            exact_total: None,
            total_cap: 6,
        };
        assert_eq!(find_witness(&q), Some(vec![1, 2]));
    }
}
