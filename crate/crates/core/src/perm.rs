//! Bijections `V(X) -> V(Y)` with lexicographic Lehmer-code ranking.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{param, FsError, Result};

/// Largest `n` whose factorial fits in a `u64`.
pub const MAX_RANKABLE: usize = 20;

pub const FACTORIALS: [u64; MAX_RANKABLE + 1] = {
    let mut f = [1u64; MAX_RANKABLE + 1];
    let mut i = 1;
    while i <= MAX_RANKABLE {
        f[i] = f[i - 1] * i as u64;
        i += 1;
    }
    f
};

/// `n!`, or a size error when it does not fit in 64 bits.
pub fn factorial(n: usize) -> Result<u64> {
    FACTORIALS
        .get(n)
        .copied()
        .ok_or(FsError::Size { n, cap: MAX_RANKABLE })
}

/// A bijection on `0..n`; `self[a]` is the image of `a`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n {
                return param(format!("image {x} out of range for n = {n}"));
            }
            if std::mem::replace(&mut seen[x], true) {
                return param(format!("image {x} repeated; not a bijection"));
            }
        }
        Ok(Permutation(map))
    }

    pub(crate) fn from_vec_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Permutation::from_vec(map.clone()).is_ok());
        Permutation(map)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation(map)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Lexicographic rank in `[0, n!)`.
    pub fn rank(&self) -> Result<u64> {
        let n = self.len();
        factorial(n)?;
        let mut r = 0u64;
        for i in 0..n {
            let smaller_after = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count();
            r += smaller_after as u64 * FACTORIALS[n - 1 - i];
        }
        Ok(r)
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(mut r: u64, n: usize) -> Result<Self> {
        let total = factorial(n)?;
        if r >= total {
            return param(format!("rank {r} out of range [0, {total})"));
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let mut map = Vec::with_capacity(n);
        for i in 0..n {
            let f = FACTORIALS[n - 1 - i];
            let idx = (r / f) as usize;
            r %= f;
            map.push(pool.remove(idx));
        }
        Ok(Permutation(map))
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return param("composing permutations of different lengths");
        }
        Ok(Permutation(other.0.iter().map(|&a| self.0[a]).collect()))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (a, &b) in self.0.iter().enumerate() {
            inv[b] = a;
        }
        Permutation(inv)
    }

    /// `τ_{uv} ∘ self`: the values `u` and `v` trade places.
    pub fn apply_transposition(&self, u: usize, v: usize) -> Result<Self> {
        let n = self.len();
        if u == v || u >= n || v >= n {
            return param(format!("transposition ({u} {v}) invalid for n = {n}"));
        }
        let map = self
            .0
            .iter()
            .map(|&x| match x {
                x if x == u => v,
                x if x == v => u,
                x => x,
            })
            .collect();
        Ok(Permutation(map))
    }

    /// `self ∘ τ_{ab}`: the images at positions `a` and `b` trade places.
    pub fn swap_positions(&self, a: usize, b: usize) -> Self {
        let mut map = self.0.clone();
        map.swap(a, b);
        Permutation(map)
    }
}

impl std::ops::Index<usize> for Permutation {
    type Output = usize;
    fn index(&self, a: usize) -> &usize {
        &self.0[a]
    }
}

/// One-line format: `σ(0) σ(1) … σ(n−1)`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = FsError;

    fn from_str(s: &str) -> Result<Self> {
        let map = s
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| FsError::Parse {
                    line: 1,
                    msg: format!("not a permutation entry: `{t}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_vec(map)
    }
}
