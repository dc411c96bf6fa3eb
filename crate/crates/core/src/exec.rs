//! Execution policy for the data-parallel loops.
//!
//! With the `parallel` feature enabled, [`Execution::Parallel`] runs on the
//! rayon global pool. Without it every policy degrades to a plain loop, so
//! results never depend on which one is chosen.

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// True when this policy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..len` and returns the results in index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Returns the result for the smallest index where `f` yields `Some`.
    pub fn find_first<T, F>(self, len: usize, f: F) -> Option<(usize, T)>
    where
        T: Send,
        F: Fn(usize) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len)
                .into_par_iter()
                .find_map_first(|i| f(i).map(|t| (i, t)));
        }
        (0..len).find_map(|i| f(i).map(|t| (i, t)))
    }

    /// Runs `f` on every index in `0..len` for its side effects.
    pub fn for_each_index<F>(self, len: usize, f: F)
    where
        F: Fn(usize) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            (0..len).into_par_iter().for_each(f);
            return;
        }
        (0..len).for_each(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_policies_agree() {
        let seq = Execution::Sequential.map_indexed(100, |i| i * i);
        let par = Execution::Parallel.map_indexed(100, |i| i * i);
        assert_eq!(seq, par);
        let f = |i: usize| (i % 7 == 3 && i > 20).then_some(i);
        assert_eq!(Execution::Sequential.find_first(100, f), Some((24, 24)));
        assert_eq!(Execution::Parallel.find_first(100, f), Some((24, 24)));
    }
}
