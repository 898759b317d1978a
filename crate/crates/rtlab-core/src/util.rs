//! Small shared helpers: combination iteration, hashing, numeric utilities.

/// Iterator over all k-subsets of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    k: usize,
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

/// All k-subsets of `0..n`, lexicographically.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        k,
        idx: (0..k).collect(),
        started: false,
        done: k > n,
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.idx.clone());
        }
        // Advance the rightmost index that can still move.
        let k = self.k;
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(self.idx.clone());
            }
        }
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// FNV-1a over bytes; used for structure fingerprints and config hashes.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Ceiling with a small tolerance so values that are integers up to f64
/// rounding do not get bumped to the next integer.
pub fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9).ceil()
}

/// Ceiling division of nonnegative integers.
pub fn ceil_div(a: u64, b: u64) -> u64 {
    debug_assert!(b > 0);
    a.div_ceil(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_counts_match_binomial() {
        for n in 0..8usize {
            for k in 0..=n {
                let count = combinations(n, k).count() as u64;
                assert_eq!(count, binomial(n as u64, k as u64), "n={n} k={k}");
            }
        }
        assert_eq!(combinations(3, 5).count(), 0);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = combinations(4, 2).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn ceil_tol_handles_float_noise() {
        assert_eq!(ceil_tol(10.000000000000002), 10.0);
        assert_eq!(ceil_tol(10.0), 10.0);
        assert_eq!(ceil_tol(10.5), 11.0);
        assert_eq!(ceil_tol(1.25), 2.0);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(19, 2), 171);
        assert_eq!(binomial(60, 3), 34220);
    }
}
