//! Bitset over achievable subset sums. Bit `s - 1` stands for the sum `s`.

/// Set of subset sums representable in `1..=capacity`.
#[derive(Clone, Debug)]
pub(crate) struct SumBits {
    words: Vec<u64>,
    capacity: usize,
}

impl SumBits {
    pub(crate) fn new(capacity: usize) -> Self {
        SumBits {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
        }
    }

    fn max_sum(&self) -> Option<u64> {
        for i in (0..self.words.len()).rev() {
            if self.words[i] != 0 {
                let top_bit = i * 64 + 63 - self.words[i].leading_zeros() as usize;
                return Some(top_bit as u64 + 1);
            }
        }
        None
    }

    /// Extends the sum set with one more sequence entry: every existing sum
    /// gains a shifted copy, and the entry itself becomes a sum. Each sum not
    /// seen before is passed to `accept`; if `accept` rejects it, or any sum
    /// would leave `1..=capacity`, extension stops and `false` is returned
    /// (the state is then stale and must be discarded by the caller).
    pub(crate) fn try_add_entry(
        &mut self,
        entry: u64,
        mut accept: impl FnMut(u64) -> bool,
    ) -> bool {
        if entry == 0 || entry as usize > self.capacity {
            return false;
        }
        // The largest current sum grows by the entry; everything else stays
        // below it, so this is the only range check needed.
        if let Some(top) = self.max_sum() {
            if top + entry > self.capacity as u64 {
                return false;
            }
        }
        let nwords = self.words.len();
        let shift = entry as usize;
        let (q, r) = (shift / 64, shift % 64);
        for i in (q..nwords).rev() {
            let mut shifted = self.words[i - q] << r;
            if r > 0 && i > q {
                shifted |= self.words[i - q - 1] >> (64 - r);
            }
            let mut fresh = shifted & !self.words[i];
            self.words[i] |= shifted;
            while fresh != 0 {
                let bit = fresh.trailing_zeros() as usize;
                if !accept((i * 64 + bit + 1) as u64) {
                    return false;
                }
                fresh &= fresh - 1;
            }
        }
        // The entry alone is a sum too.
        let bit = shift - 1;
        if self.words[bit / 64] >> (bit % 64) & 1 == 0 {
            self.words[bit / 64] |= 1 << (bit % 64);
            if !accept(entry) {
                return false;
            }
        }
        true
    }

    #[cfg(test)]
    pub(crate) fn iter_sums(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((i * 64 + bit + 1) as u64)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn naive_sums(entries: &[u64]) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for mask in 1u32..1 << entries.len() {
            let s: u64 = entries
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .sum();
            out.insert(s);
        }
        out
    }

    #[test]
    fn matches_naive_enumeration() {
        for entries in [
            vec![1, 1, 2],
            vec![3, 5, 7, 9],
            vec![64, 64],
            vec![1, 63, 64, 130],
        ] {
            let total: u64 = entries.iter().sum();
            let mut bits = SumBits::new(total as usize);
            let mut seen = BTreeSet::new();
            for &e in &entries {
                assert!(bits.try_add_entry(e, |s| seen.insert(s)));
            }
            let expect = naive_sums(&entries);
            assert_eq!(seen, expect);
            assert_eq!(bits.iter_sums().collect::<BTreeSet<_>>(), expect);
        }
    }

    #[test]
    fn rejects_overflowing_sum() {
        let mut bits = SumBits::new(5);
        assert!(bits.try_add_entry(3, |_| true));
        assert!(!bits.try_add_entry(3, |_| true)); // 6 > 5
        let mut bits = SumBits::new(5);
        assert!(!bits.try_add_entry(6, |_| true));
    }

    #[test]
    fn rejects_overflow_at_word_boundary() {
        // Capacities that fill their last word exactly must still detect
        // sums shifted past the top.
        let mut bits = SumBits::new(64);
        assert!(bits.try_add_entry(64, |_| true));
        assert!(!bits.try_add_entry(1, |_| true)); // 65 > 64
        let mut bits = SumBits::new(64);
        assert!(bits.try_add_entry(33, |_| true));
        assert!(!bits.try_add_entry(33, |_| true)); // 66 > 64
        let mut bits = SumBits::new(128);
        assert!(bits.try_add_entry(64, |_| true));
        assert!(bits.try_add_entry(64, |_| true)); // 128 fits exactly
        assert!(!bits.try_add_entry(1, |_| true));
    }
}
