//! Combination enumeration and the combinatorial number system ranking.

use std::ops::ControlFlow;

/// Binomial coefficient, `None` on u64 overflow.
pub(crate) fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Visits the k-subsets of `{1..=n}` in lexicographic order.
pub(crate) fn for_each_combination(
    n: u64,
    k: usize,
    mut f: impl FnMut(&[u64]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == 0 || k as u64 > n {
        return ControlFlow::Continue(());
    }
    let mut buf: Vec<u64> = (1..=k as u64).collect();
    loop {
        f(&buf)?;
        // Advance the rightmost element that still has room.
        let mut i = k;
        loop {
            if i == 0 {
                return ControlFlow::Continue(());
            }
            i -= 1;
            if buf[i] < n - (k - 1 - i) as u64 {
                break;
            }
        }
        buf[i] += 1;
        for j in i + 1..k {
            buf[j] = buf[j - 1] + 1;
        }
    }
}

/// Visits the k-subsets of `elems` in lexicographic index order.
pub(crate) fn for_each_combination_of(
    elems: &[u64],
    k: usize,
    mut f: impl FnMut(&[u64]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let n = elems.len() as u64;
    let mut buf = vec![0u64; k];
    for_each_combination(n, k, |idx| {
        for (slot, &i) in buf.iter_mut().zip(idx) {
            *slot = elems[i as usize - 1];
        }
        f(&buf)
    })
}

/// Rank of a strictly increasing subset of `{1..=n}` in the combinatorial
/// number system (colex order), counting from zero.
pub(crate) fn colex_rank(subset: &[u64]) -> u64 {
    subset
        .iter()
        .enumerate()
        .map(|(i, &e)| binomial(e - 1, i as u64 + 1).expect("rank fits u64"))
        .sum()
}

/// Inverse of [`colex_rank`] for subsets of size `r`.
pub(crate) fn colex_unrank(mut rank: u64, r: usize) -> Vec<u64> {
    let mut out = vec![0u64; r];
    for i in (1..=r as u64).rev() {
        // Largest c with C(c, i) <= rank.
        let mut c = i - 1;
        while binomial(c + 1, i).is_some_and(|b| b <= rank) {
            c += 1;
        }
        rank -= binomial(c, i).unwrap();
        out[i as usize - 1] = c + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(80, 40), None);
    }

    #[test]
    fn lex_enumeration_and_colex_ranks() {
        let mut seen = Vec::new();
        let _ = for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(
            seen,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        // Colex ranks form a bijection with 0..C(4,2).
        let mut ranks: Vec<u64> = seen.iter().map(|c| colex_rank(c)).collect();
        ranks.sort_unstable();
        assert_eq!(ranks, (0..6).collect::<Vec<_>>());
        for c in &seen {
            assert_eq!(&colex_unrank(colex_rank(c), 2), c);
        }
    }

    #[test]
    fn combinations_of_slice() {
        let elems = [2, 5, 9];
        let mut got = Vec::new();
        let _ = for_each_combination_of(&elems, 2, |c| {
            got.push(c.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(got, vec![vec![2, 5], vec![2, 9], vec![5, 9]]);
    }
}
