//! Sparse-table range minimum queries.

/// O(1) query, O(n lg n) words of space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseTable {
    n: usize,
    /// Row `k` holds minima of windows of length `2^k`, packed with stride `n`.
    table: Vec<usize>,
}

impl SparseTable {
    pub fn new(values: &[usize]) -> Self {
        let n = values.len();
        if n == 0 {
            return SparseTable { n, table: Vec::new() };
        }
        let levels = n.ilog2() as usize + 1;
        let mut table = vec![0; n * levels];
        table[..n].copy_from_slice(values);
        for k in 1..levels {
            let half = 1 << (k - 1);
            for i in 0..=n - (1 << k) {
                table[k * n + i] = table[(k - 1) * n + i].min(table[(k - 1) * n + i + half]);
            }
        }
        SparseTable { n, table }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Minimum of `values[lo..=hi]`.
    pub fn min(&self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi && hi < self.n, "rmq range {lo}..={hi} out of bounds");
        let k = (hi - lo + 1).ilog2() as usize;
        self.table[k * self.n + lo].min(self.table[k * self.n + hi + 1 - (1 << k)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small() {
        let t = SparseTable::new(&[0, 2, 2, 1, 3, 1, 5, 3, 1, 0, 4, 2, 0]);
        assert_eq!(t.min(1, 2), 2);
        assert_eq!(t.min(1, 3), 1);
        assert_eq!(t.min(6, 7), 3);
        assert_eq!(t.min(10, 10), 4);
        assert_eq!(t.min(0, 12), 0);
    }

    proptest! {
        #[test]
        fn matches_scan(values in prop::collection::vec(0usize..50, 1..120)) {
            let t = SparseTable::new(&values);
            for lo in 0..values.len() {
                for hi in lo..values.len() {
                    prop_assert_eq!(t.min(lo, hi), *values[lo..=hi].iter().min().unwrap());
                }
            }
        }
    }
}
