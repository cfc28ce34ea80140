//! Integer coefficients `p^l_n(k)` expressing `W^k_{k−l}` in the `H^l_n` basis.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Memo table for `p^l_n(k)`, defined by `p^l_1(k) = 1` and
/// `p^l_{n+1}(k) = Σ_{i=l+1}^{k−1} max{0, p^l_n(i)}`.
///
/// Readers share a lock; a miss computes outside the lock and then inserts.
#[derive(Debug, Default)]
pub struct PCoeffTable {
    memo: RwLock<HashMap<(usize, usize, i64), i64>>,
}

impl PCoeffTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide table.
    pub fn global() -> &'static PCoeffTable {
        static TABLE: OnceLock<PCoeffTable> = OnceLock::new();
        TABLE.get_or_init(PCoeffTable::new)
    }

    /// `p^l_n(k)`. `n = 0` is outside the recurrence and returns 0.
    pub fn get(&self, l: usize, n: usize, k: i64) -> i64 {
        if n == 0 {
            return 0;
        }
        if n == 1 {
            return 1;
        }
        if let Some(&v) = self.memo.read().expect("p-coefficient memo poisoned").get(&(l, n, k)) {
            return v;
        }
        let lo = l as i64 + 1;
        let mut sum = 0i64;
        let mut i = lo;
        while i < k {
            sum += self.get(l, n - 1, i).max(0);
            i += 1;
        }
        self.memo.write().expect("p-coefficient memo poisoned").insert((l, n, k), sum);
        sum
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("p-coefficient memo poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `p^l_n(k)` from the global table.
pub fn p_coeff(l: usize, n: usize, k: i64) -> i64 {
    PCoeffTable::global().get(l, n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_condition_and_low_slices() {
        let t = PCoeffTable::new();
        for l in 0..5 {
            for k in -3..12 {
                assert_eq!(t.get(l, 1, k), 1);
            }
        }
        for k in 3..15 {
            assert_eq!(t.get(1, 2, k), k - 2);
        }
        for k in 5..15 {
            assert_eq!(t.get(2, 3, k), (k - 3) * (k - 4) / 2);
        }
    }

    #[test]
    fn shift_in_l() {
        let t = PCoeffTable::new();
        for l in 0..4 {
            for n in 1..5 {
                for k in 0..14 {
                    assert_eq!(t.get(l + 1, n, k), t.get(l, n, k - 1), "l={l} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn unit_lower_triangular_block() {
        let t = PCoeffTable::new();
        for l in 0..6 {
            for m in 1..=l + 1 {
                let k = (l + m) as i64;
                assert_eq!(t.get(l, m, k), 1);
                for n in m + 1..=l + 1 {
                    assert_eq!(t.get(l, n, k), 0);
                }
            }
        }
    }

    #[test]
    fn concurrent_readers_agree() {
        let t = PCoeffTable::new();
        let want: Vec<i64> = (0..10).map(|k| t.get(2, 4, k + 6)).collect();
        let fresh = PCoeffTable::new();
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    let got: Vec<i64> = (0..10).map(|k| fresh.get(2, 4, k + 6)).collect();
                    assert_eq!(got, want);
                });
            }
        });
        assert!(!fresh.is_empty());
    }
}
