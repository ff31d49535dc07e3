//! Lexicographic indexing of strictly increasing tuples.
//!
//! The increasing `k`-tuples over `0..n` are ranked in lexicographic order,
//! so `(0, 1, .., k-1)` has rank 0. Colorings, type tables and the search
//! kernels all address tuples through this ranking.

use crate::error::{Error, Result};

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

#[derive(Clone, Debug)]
pub struct TupleSpace {
    n: usize,
    k: usize,
    // binom[m][r] = C(m, r) for m <= n, r <= k
    binom: Vec<Vec<usize>>,
    count: usize,
}

impl TupleSpace {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let count = binomial(n as u64, k as u64);
        if count > (1u64 << 40) {
            return Err(Error::TooLarge(format!(
                "{count} increasing {k}-tuples over {n} elements"
            )));
        }
        let binom = (0..=n)
            .map(|m| (0..=k + 1).map(|r| binomial(m as u64, r as u64) as usize).collect())
            .collect();
        Ok(Self { n, k, binom, count: count as usize })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Lexicographic rank. The tuple must be strictly increasing and in range.
    pub fn rank(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.k);
        let mut rank = 0;
        let mut lo = 0;
        for (i, &t) in tuple.iter().enumerate() {
            let r = self.k - i;
            // sum_{v=lo}^{t-1} C(n-1-v, r-1) = C(n-lo, r) - C(n-t, r)
            rank += self.binom[self.n - lo][r] - self.binom[self.n - t][r];
            lo = t + 1;
        }
        rank
    }

    pub fn unrank(&self, mut rank: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k);
        let mut v = 0;
        for i in 0..self.k {
            let r = self.k - i;
            loop {
                let block = self.binom[self.n - v - 1][r - 1];
                if rank < block {
                    break;
                }
                rank -= block;
                v += 1;
            }
            out.push(v);
            v += 1;
        }
        out
    }

    pub fn iter(&self) -> Combinations {
        Combinations::new(self.n, self.k)
    }
}

/// Lexicographic iterator over increasing `k`-tuples of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, current: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - (k - i) {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All increasing tuples of length `k` drawn from `elements` (assumed sorted).
pub fn sub_tuples(elements: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    Combinations::new(elements.len(), k).map(move |idx| idx.iter().map(|&i| elements[i]).collect())
}

pub fn is_strictly_increasing(tuple: &[usize]) -> bool {
    tuple.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_enumeration_order() {
        for n in 0..8 {
            for k in 0..=n {
                let space = TupleSpace::new(n, k).unwrap();
                let all: Vec<_> = space.iter().collect();
                assert_eq!(all.len(), space.count());
                for (r, t) in all.iter().enumerate() {
                    assert_eq!(space.rank(t), r);
                    assert_eq!(&space.unrank(r), t);
                }
            }
        }
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn k_larger_than_n_is_empty() {
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
