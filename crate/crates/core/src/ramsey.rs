//! Desk-scale Ramsey search and verification, iterated-Ramsey witnesses over
//! subset colorings, recursive bounds, and the size-membership coloring that
//! refutes the infinite iterated statement.

use crate::coloring::ClassId;
use crate::comb::{binomial, colex_rank, colex_unrank, for_each_combination, for_each_combination_of};
use crate::set::FiniteSet;
use num_bigint::BigUint;
use std::ops::ControlFlow;
use thiserror::Error;

/// Largest ground set for materialized subset colorings (2^n - 1 entries).
pub const MAX_SUBSET_GROUND: u32 = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RamseyError {
    #[error("class count must be at least 1")]
    NoClasses,
    #[error("subset size must satisfy 1 <= r <= n (r = {r}, n = {n})")]
    BadSubsetSize { r: u32, n: u32 },
    #[error("expected {expected} class labels, got {got}")]
    WrongAssignLength { expected: u64, got: usize },
    #[error("class label {label} outside 1..={t}")]
    LabelOutOfRange { label: ClassId, t: u32 },
    #[error("target subset size {k} is below the colored subset size {r}")]
    KBelowR { k: u32, r: u32 },
    #[error("{required} colorings exceed the enumeration budget {budget}")]
    Infeasible { required: u128, budget: u64 },
    #[error("ground set of {n} exceeds the supported maximum {max}")]
    GroundTooLarge { n: u32, max: u32 },
    #[error("counting overflow at n = {n}, r = {r}")]
    CountOverflow { n: u32, r: u32 },
    #[error("layer {layer} outside 1..={max}")]
    BadLayer { layer: u32, max: u32 },
    #[error("bound recursion needs r >= 1")]
    ZeroLayerDepth,
    #[error("no upper bound available for R(k, {r}, {t})")]
    NoUpperBound { r: u64, t: u64 },
    #[error("malformed text: {0}")]
    BadText(String),
}

/// A `t`-class coloring of the r-subsets of `{1..=n}`, stored by colex rank
/// (the combinatorial number system ordering).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformColoring {
    n: u32,
    r: u32,
    t: u32,
    assign: Vec<ClassId>,
}

impl UniformColoring {
    pub fn new(n: u32, r: u32, t: u32, assign: Vec<ClassId>) -> Result<Self, RamseyError> {
        if t == 0 {
            return Err(RamseyError::NoClasses);
        }
        if r == 0 || r > n {
            return Err(RamseyError::BadSubsetSize { r, n });
        }
        let expected =
            binomial(n as u64, r as u64).ok_or(RamseyError::CountOverflow { n, r })?;
        if assign.len() as u64 != expected {
            return Err(RamseyError::WrongAssignLength {
                expected,
                got: assign.len(),
            });
        }
        if let Some(&label) = assign.iter().find(|&&c| c == 0 || c > t) {
            return Err(RamseyError::LabelOutOfRange { label, t });
        }
        Ok(UniformColoring { n, r, t, assign })
    }

    /// Builds the coloring by evaluating `f` on every r-subset.
    pub fn from_fn(
        n: u32,
        r: u32,
        t: u32,
        mut f: impl FnMut(&[u64]) -> ClassId,
    ) -> Result<Self, RamseyError> {
        if r == 0 || r > n {
            return Err(RamseyError::BadSubsetSize { r, n });
        }
        let count = binomial(n as u64, r as u64).ok_or(RamseyError::CountOverflow { n, r })?;
        let assign = (0..count)
            .map(|rank| f(&colex_unrank(rank, r as usize)))
            .collect();
        UniformColoring::new(n, r, t, assign)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// Class of a strictly increasing r-subset of `{1..=n}`.
    pub fn class_of(&self, subset: &[u64]) -> Option<ClassId> {
        if subset.len() != self.r as usize {
            return None;
        }
        if subset.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        if subset.first().is_none_or(|&e| e == 0) || subset.last().is_some_and(|&e| e > self.n as u64)
        {
            return None;
        }
        Some(self.assign[colex_rank(subset) as usize])
    }

    /// Text form: header `t n r`, then labels in colex rank order.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.assign.iter().map(|c| c.to_string()).collect();
        format!("{} {} {}\n{}\n", self.t, self.n, self.r, labels.join(" "))
    }

    pub fn from_text(s: &str) -> Result<Self, RamseyError> {
        let mut tokens = s.split_whitespace();
        let mut next_u32 = |what: &str| -> Result<u32, RamseyError> {
            tokens
                .next()
                .and_then(|tok| tok.parse().ok())
                .ok_or_else(|| RamseyError::BadText(format!("missing or invalid {what}")))
        };
        let t = next_u32("t")?;
        let n = next_u32("n")?;
        let r = next_u32("r")?;
        let assign = tokens
            .map(|tok| {
                tok.parse::<ClassId>()
                    .map_err(|_| RamseyError::BadText(format!("bad label {tok}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        UniformColoring::new(n, r, t, assign)
    }
}

/// A `t`-class coloring of all nonempty subsets of `{1..=n}`, stored by
/// bitmask (bit `i - 1` marks element `i`; masks run `1..2^n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetColoring {
    n: u32,
    t: u32,
    assign: Vec<ClassId>,
}

impl SubsetColoring {
    pub fn new(n: u32, t: u32, assign: Vec<ClassId>) -> Result<Self, RamseyError> {
        if t == 0 {
            return Err(RamseyError::NoClasses);
        }
        if n == 0 || n > MAX_SUBSET_GROUND {
            return Err(RamseyError::GroundTooLarge {
                n,
                max: MAX_SUBSET_GROUND,
            });
        }
        let expected = (1u64 << n) - 1;
        if assign.len() as u64 != expected {
            return Err(RamseyError::WrongAssignLength {
                expected,
                got: assign.len(),
            });
        }
        if let Some(&label) = assign.iter().find(|&&c| c == 0 || c > t) {
            return Err(RamseyError::LabelOutOfRange { label, t });
        }
        Ok(SubsetColoring { n, t, assign })
    }

    /// Builds the coloring by evaluating `f` on every nonempty subset,
    /// presented as a strictly increasing element slice.
    pub fn from_fn(
        n: u32,
        t: u32,
        mut f: impl FnMut(&[u64]) -> ClassId,
    ) -> Result<Self, RamseyError> {
        if n == 0 || n > MAX_SUBSET_GROUND {
            return Err(RamseyError::GroundTooLarge {
                n,
                max: MAX_SUBSET_GROUND,
            });
        }
        let mut buf = Vec::with_capacity(n as usize);
        let assign = (1u32..1 << n)
            .map(|mask| {
                buf.clear();
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        buf.push(i as u64 + 1);
                    }
                }
                f(&buf)
            })
            .collect();
        SubsetColoring::new(n, t, assign)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub(crate) fn class_of_mask(&self, mask: u32) -> ClassId {
        self.assign[mask as usize - 1]
    }

    pub fn class_of_set(&self, set: &FiniteSet) -> Option<ClassId> {
        if set.is_empty() || set.max_elem().is_some_and(|m| m > self.n as u64) {
            return None;
        }
        let mask = set.iter().fold(0u32, |m, e| m | 1 << (e - 1));
        Some(self.class_of_mask(mask))
    }

    /// Text form: header `t n`, then labels in mask order.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.assign.iter().map(|c| c.to_string()).collect();
        format!("{} {}\n{}\n", self.t, self.n, labels.join(" "))
    }

    pub fn from_text(s: &str) -> Result<Self, RamseyError> {
        let mut tokens = s.split_whitespace();
        let mut next_u32 = |what: &str| -> Result<u32, RamseyError> {
            tokens
                .next()
                .and_then(|tok| tok.parse().ok())
                .ok_or_else(|| RamseyError::BadText(format!("missing or invalid {what}")))
        };
        let t = next_u32("t")?;
        let n = next_u32("n")?;
        let assign = tokens
            .map(|tok| {
                tok.parse::<ClassId>()
                    .map_err(|_| RamseyError::BadText(format!("bad label {tok}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        SubsetColoring::new(n, t, assign)
    }
}

/// A set `K` whose j-subsets are monochromatic for every constrained layer
/// `j`, together with the class of each such layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedWitness {
    pub k_set: FiniteSet,
    /// Constrained layer sizes, strictly increasing.
    pub layers: Vec<u32>,
    /// `classes[i]` is the class of every `layers[i]`-subset of `k_set`.
    pub classes: Vec<ClassId>,
}

impl IteratedWitness {
    /// Re-checks every constrained layer by direct scan.
    pub fn verify_against(&self, sc: &SubsetColoring) -> bool {
        self.layers.iter().zip(&self.classes).all(|(&j, &class)| {
            let mut ok = true;
            let _ = for_each_combination_of(self.k_set.elems(), j as usize, |subset| {
                let set = FiniteSet::new(subset.to_vec()).unwrap();
                if sc.class_of_set(&set) != Some(class) {
                    ok = false;
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            ok
        })
    }
}

/// First k-subset of `{1..=n}` (lexicographically) whose r-subsets all share
/// one class; `None` is an exhaustive nonexistence result.
pub fn find_monochromatic(
    uc: &UniformColoring,
    k: u32,
) -> Result<Option<FiniteSet>, RamseyError> {
    if k < uc.r() {
        return Err(RamseyError::KBelowR { k, r: uc.r() });
    }
    let mut found = None;
    let _ = for_each_combination(uc.n() as u64, k as usize, |candidate| {
        let mut class = None;
        let all_same = for_each_combination_of(candidate, uc.r() as usize, |subset| {
            let c = uc.class_of(subset).expect("subset of the ground set");
            match class {
                None => {
                    class = Some(c);
                    ControlFlow::Continue(())
                }
                Some(prev) if prev == c => ControlFlow::Continue(()),
                Some(_) => ControlFlow::Break(()),
            }
        });
        if all_same.is_continue() {
            found = Some(FiniteSet::new(candidate.to_vec()).unwrap());
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found)
}

/// Exhaustively decides whether every t-coloring of the r-subsets of
/// `{1..=n}` contains a monochromatic k-subset. The number of colorings
/// `t^C(n,r)` must stay within `budget`.
pub fn verify_ramsey(k: u32, r: u32, t: u32, n: u32, budget: u64) -> Result<bool, RamseyError> {
    if t == 0 {
        return Err(RamseyError::NoClasses);
    }
    if r == 0 || r > n {
        return Err(RamseyError::BadSubsetSize { r, n });
    }
    if k < r {
        return Err(RamseyError::KBelowR { k, r });
    }
    if k > n {
        // No k-subset exists, so no coloring can contain one.
        return Ok(false);
    }
    let cells = binomial(n as u64, r as u64).ok_or(RamseyError::CountOverflow { n, r })?;
    let required = (t as u128)
        .checked_pow(u32::try_from(cells).map_err(|_| RamseyError::CountOverflow { n, r })?)
        .ok_or(RamseyError::Infeasible {
            required: u128::MAX,
            budget,
        })?;
    if required > budget as u128 {
        return Err(RamseyError::Infeasible { required, budget });
    }

    // Rank lists: for each k-subset, the colex ranks of its r-subsets.
    let mut rank_lists: Vec<Vec<u32>> = Vec::new();
    let _ = for_each_combination(n as u64, k as usize, |candidate| {
        let mut ranks = Vec::new();
        let _ = for_each_combination_of(candidate, r as usize, |subset| {
            ranks.push(colex_rank(subset) as u32);
            ControlFlow::Continue(())
        });
        rank_lists.push(ranks);
        ControlFlow::Continue(())
    });

    let mut assign = vec![1 as ClassId; cells as usize];
    loop {
        let has_mono = rank_lists.iter().any(|ranks| {
            let first = assign[ranks[0] as usize];
            ranks[1..].iter().all(|&r| assign[r as usize] == first)
        });
        if !has_mono {
            return Ok(false);
        }
        // Odometer step over base-t labels.
        let mut pos = 0;
        loop {
            if pos == assign.len() {
                return Ok(true);
            }
            if assign[pos] < t {
                assign[pos] += 1;
                break;
            }
            assign[pos] = 1;
            pos += 1;
        }
    }
}

/// Searches k-subsets of the ground set in lexicographic order for one whose
/// constrained layers are each monochromatic. `layers` defaults to all of
/// `1..=r`; the returned witness is the lexicographically least.
pub fn find_iterated_witness(
    sc: &SubsetColoring,
    k: u32,
    r: u32,
    layers: Option<&[u32]>,
) -> Result<Option<IteratedWitness>, RamseyError> {
    if r == 0 || r > sc.n() {
        return Err(RamseyError::BadSubsetSize { r, n: sc.n() });
    }
    if k < r {
        return Err(RamseyError::KBelowR { k, r });
    }
    let constrained: Vec<u32> = match layers {
        Some(ls) => {
            let mut v = ls.to_vec();
            v.sort_unstable();
            v.dedup();
            if let Some(&bad) = v.iter().find(|&&j| j == 0 || j > r) {
                return Err(RamseyError::BadLayer { layer: bad, max: r });
            }
            v
        }
        None => (1..=r).collect(),
    };
    if k > sc.n() {
        return Ok(None);
    }

    let mut found = None;
    let _ = for_each_combination(sc.n() as u64, k as usize, |candidate| {
        let mut classes = Vec::with_capacity(constrained.len());
        for &j in &constrained {
            let mut class: Option<ClassId> = None;
            let mono = for_each_combination_of(candidate, j as usize, |subset| {
                let mask = subset.iter().fold(0u32, |m, &e| m | 1 << (e - 1));
                let c = sc.class_of_mask(mask);
                match class {
                    None => {
                        class = Some(c);
                        ControlFlow::Continue(())
                    }
                    Some(prev) if prev == c => ControlFlow::Continue(()),
                    Some(_) => ControlFlow::Break(()),
                }
            });
            if mono.is_break() {
                return ControlFlow::Continue(());
            }
            classes.push(class.expect("layer has at least one subset"));
        }
        found = Some(IteratedWitness {
            k_set: FiniteSet::new(candidate.to_vec()).unwrap(),
            layers: constrained.clone(),
            classes,
        });
        ControlFlow::Break(())
    });
    Ok(found)
}

/// Recursive bound for the iterated statement: `N(k, 1, t) = k*t + 1`, and
/// `N(k, r, t) = N(R(k, r, t), r - 1, t)` for `r >= 2`, where `ramsey_upper`
/// supplies an upper bound for the Ramsey number `R(k, r, t)`.
pub fn iterated_ramsey_bound(
    k: &BigUint,
    r: u64,
    t: u64,
    ramsey_upper: &dyn Fn(&BigUint, u64, u64) -> Option<BigUint>,
) -> Result<BigUint, RamseyError> {
    if r == 0 {
        return Err(RamseyError::ZeroLayerDepth);
    }
    if t == 0 {
        return Err(RamseyError::NoClasses);
    }
    let mut current = k.clone();
    for level in (2..=r).rev() {
        current =
            ramsey_upper(&current, level, t).ok_or(RamseyError::NoUpperBound { r: level, t })?;
    }
    Ok(current * t + 1u32)
}

/// Exact Ramsey values for the handful of desk-scale cells: one class, one
/// element per subset (pigeonhole), subsets as large as the target, and the
/// triangle case R(3, 2, 2) = 6 established by [`verify_ramsey`].
pub fn exact_small_ramsey_upper(k: &BigUint, r: u64, t: u64) -> Option<BigUint> {
    let big_r = BigUint::from(r);
    if t == 1 || *k <= big_r {
        // One class, or a target no larger than the subsets being colored:
        // any k-subset is monochromatic, trivially or vacuously.
        return Some(k.clone());
    }
    if r == 1 {
        return Some((k - 1u32) * t + 1u32);
    }
    if *k == BigUint::from(3u32) && r == 2 && t == 2 {
        return Some(BigUint::from(6u32));
    }
    None
}

/// Two-class coloring of all nonempty subsets: class 1 exactly when the
/// subset's cardinality is one of its own elements.
pub fn size_membership_coloring(n: u32) -> Result<SubsetColoring, RamseyError> {
    SubsetColoring::from_fn(n, 2, |subset| {
        let size = subset.len() as u64;
        if subset.binary_search(&size).is_ok() {
            1
        } else {
            2
        }
    })
}

/// Layers at which no class sequence can exist for `K` under the
/// size-membership coloring: every `j` in `K` with `j <= |K| - 1` (then some
/// j-subset contains `j` and another avoids it). An empty result means this
/// finite `K` evades refutation, possible only when `min(K) >= |K|`.
pub fn refute_levels(k_set: &FiniteSet) -> Vec<u64> {
    if k_set.is_empty() {
        return Vec::new();
    }
    let bound = k_set.len() as u64 - 1;
    k_set.iter().filter(|&j| j <= bound).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fset;

    #[test]
    fn uniform_ranks_and_lookup() {
        let uc = UniformColoring::from_fn(4, 2, 2, |s| if s.contains(&1) { 1 } else { 2 }).unwrap();
        assert_eq!(uc.class_of(&[1, 4]), Some(1));
        assert_eq!(uc.class_of(&[2, 3]), Some(2));
        assert_eq!(uc.class_of(&[3, 2]), None);
        assert_eq!(uc.class_of(&[2, 5]), None);
        let round = UniformColoring::from_text(&uc.to_text()).unwrap();
        assert_eq!(round, uc);
    }

    fn pentagon() -> UniformColoring {
        // Class 1 exactly when the circular distance on 5 points is 1.
        UniformColoring::from_fn(5, 2, 2, |s| {
            let d = (s[1] - s[0]).min(5 - (s[1] - s[0]));
            if d == 1 {
                1
            } else {
                2
            }
        })
        .unwrap()
    }

    #[test]
    fn find_monochromatic_examples() {
        let all_one = UniformColoring::from_fn(6, 2, 1, |_| 1).unwrap();
        assert_eq!(
            find_monochromatic(&all_one, 4).unwrap(),
            Some(fset![1, 2, 3, 4])
        );
        assert_eq!(find_monochromatic(&pentagon(), 3).unwrap(), None);
        assert!(matches!(
            find_monochromatic(&pentagon(), 1),
            Err(RamseyError::KBelowR { k: 1, r: 2 })
        ));
    }

    #[test]
    fn verify_ramsey_examples() {
        assert!(verify_ramsey(2, 1, 2, 3, 1 << 20).unwrap());
        assert!(!verify_ramsey(3, 2, 2, 5, 1 << 20).unwrap());
        assert!(verify_ramsey(3, 2, 2, 6, 1 << 20).unwrap());
        assert!(matches!(
            verify_ramsey(3, 2, 2, 6, 100),
            Err(RamseyError::Infeasible { .. })
        ));
    }

    #[test]
    fn verify_ramsey_monotone_over_tested_range() {
        let verdicts: Vec<bool> = (2..=6)
            .map(|n| verify_ramsey(3, 2, 2, n, 1 << 20).unwrap())
            .collect();
        assert_eq!(verdicts, vec![false, false, false, false, true]);
    }

    #[test]
    fn iterated_witness_examples() {
        let one_class = SubsetColoring::from_fn(4, 1, |_| 1).unwrap();
        let w = find_iterated_witness(&one_class, 2, 2, None).unwrap().unwrap();
        assert_eq!(w.k_set, fset![1, 2]);
        assert_eq!(w.classes, vec![1, 1]);
        assert!(w.verify_against(&one_class));

        let contains_one =
            SubsetColoring::from_fn(4, 2, |s| if s.contains(&1) { 1 } else { 2 }).unwrap();
        let w = find_iterated_witness(&contains_one, 2, 2, None)
            .unwrap()
            .unwrap();
        assert_eq!(w.k_set, fset![2, 3]);
        assert_eq!(w.classes, vec![2, 2]);
        assert!(w.verify_against(&contains_one));

        let sc = size_membership_coloring(6).unwrap();
        let w = find_iterated_witness(&sc, 3, 1, Some(&[1])).unwrap().unwrap();
        // Lexicographically least K avoiding element 1 at layer 1.
        assert_eq!(w.k_set, fset![2, 3, 4]);
        assert_eq!(w.classes, vec![2]);
        assert!(w.verify_against(&sc));
    }

    #[test]
    fn iterated_ramsey_bound_examples() {
        let ru = |k: &BigUint, r: u64, t: u64| exact_small_ramsey_upper(k, r, t);
        assert_eq!(
            iterated_ramsey_bound(&BigUint::from(3u32), 1, 2, &ru).unwrap(),
            BigUint::from(7u32)
        );
        assert_eq!(
            iterated_ramsey_bound(&BigUint::from(3u32), 2, 2, &ru).unwrap(),
            BigUint::from(13u32)
        );
        // One class: the recursion collapses to k + 1.
        for r in 1..=6u64 {
            assert_eq!(
                iterated_ramsey_bound(&BigUint::from(5u32), r, 1, &ru).unwrap(),
                BigUint::from(6u32)
            );
        }
        assert!(matches!(
            iterated_ramsey_bound(&BigUint::from(3u32), 0, 2, &ru),
            Err(RamseyError::ZeroLayerDepth)
        ));
        assert!(matches!(
            iterated_ramsey_bound(&BigUint::from(9u32), 3, 2, &ru),
            Err(RamseyError::NoUpperBound { .. })
        ));
    }

    #[test]
    fn size_membership_examples() {
        let sc = size_membership_coloring(6).unwrap();
        assert_eq!(sc.class_of_set(&fset![1]), Some(1));
        assert_eq!(sc.class_of_set(&fset![2]), Some(2));
        assert_eq!(sc.class_of_set(&fset![2, 3]), Some(1));
        assert_eq!(sc.class_of_set(&fset![3, 4]), Some(2));
    }

    #[test]
    fn refute_levels_examples() {
        assert_eq!(refute_levels(&fset![1, 2, 3]), vec![1, 2]);
        assert_eq!(refute_levels(&fset![5, 6, 7]), Vec::<u64>::new());
        assert_eq!(refute_levels(&fset![2, 3, 4]), vec![2]);
    }

    #[test]
    fn subset_coloring_round_trip() {
        let sc = size_membership_coloring(4).unwrap();
        assert_eq!(SubsetColoring::from_text(&sc.to_text()).unwrap(), sc);
    }
}
