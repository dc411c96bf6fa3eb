//! Disjoint-set forests over `0..len`, indexed by `u32`.

use std::sync::atomic::{AtomicU32, Ordering};

/// Union by size with path compression.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        assert!(len <= u32::MAX as usize + 1);
        DisjointSets {
            parent: (0..len).map(|i| i as u32).collect(),
            size: vec![1; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while cur != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Returns true if `a` and `b` were in different sets.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }

    /// Root of every element, fully compressed.
    pub fn roots(mut self) -> Vec<u32> {
        (0..self.len() as u32).map(|x| self.find(x)).collect()
    }
}

/// Lock-free union-find.
///
/// Roots are linked by index (larger under smaller) with a CAS, and `find`
/// halves paths as it walks. Every parent pointer strictly decreases, so a
/// component's root is its minimum element whatever the interleaving.
#[derive(Debug)]
pub struct AtomicDisjointSets {
    parent: Vec<AtomicU32>,
}

impl AtomicDisjointSets {
    pub fn new(len: usize) -> Self {
        assert!(len <= u32::MAX as usize + 1);
        AtomicDisjointSets {
            parent: (0..len).map(|i| AtomicU32::new(i as u32)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&self, mut x: u32) -> u32 {
        loop {
            let p = self.parent[x as usize].load(Ordering::Relaxed);
            if p == x {
                return x;
            }
            let gp = self.parent[p as usize].load(Ordering::Relaxed);
            if gp != p {
                // Losing this race is harmless: someone else already shortened it.
                let _ = self.parent[x as usize].compare_exchange_weak(
                    p,
                    gp,
                    Ordering::Relaxed,
                    Ordering::Relaxed,
                );
            }
            x = gp;
        }
    }

    pub fn union(&self, a: u32, b: u32) {
        let (mut a, mut b) = (a, b);
        loop {
            a = self.find(a);
            b = self.find(b);
            if a == b {
                return;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if self.parent[hi as usize]
                .compare_exchange(hi, lo, Ordering::AcqRel, Ordering::Relaxed)
                .is_ok()
            {
                return;
            }
        }
    }

    /// Root of every element. Call only after all unions have completed.
    pub fn roots(&self) -> Vec<u32> {
        (0..self.len() as u32).map(|x| self.find(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical(roots: &[u32]) -> Vec<u32> {
        // Relabel each class by its smallest member.
        let mut first = std::collections::HashMap::new();
        roots
            .iter()
            .enumerate()
            .map(|(i, r)| *first.entry(*r).or_insert(i as u32))
            .collect()
    }

    #[test]
    fn sequential_basics() {
        let mut d = DisjointSets::new(6);
        assert!(d.union(0, 1));
        assert!(d.union(2, 3));
        assert!(!d.union(1, 0));
        assert!(d.union(1, 3));
        assert_eq!(d.find(0), d.find(2));
        assert_ne!(d.find(0), d.find(4));
        assert_eq!(canonical(&d.roots()), vec![0, 0, 0, 0, 4, 5]);
    }

    #[test]
    fn atomic_roots_are_minimum_members() {
        let d = AtomicDisjointSets::new(8);
        d.union(7, 3);
        d.union(5, 7);
        d.union(6, 2);
        assert_eq!(d.roots(), vec![0, 1, 2, 3, 4, 3, 2, 3]);
    }

    #[test]
    fn atomic_matches_sequential_under_contention() {
        let n = 20_000u32;
        let pairs: Vec<(u32, u32)> = (0..n)
            .map(|i| (i, (i.wrapping_mul(7919) + 13) % n))
            .filter(|(a, b)| a % 5 != 0 || b % 3 != 0)
            .collect();
        let mut seq = DisjointSets::new(n as usize);
        for &(a, b) in &pairs {
            seq.union(a, b);
        }
        let atomic = AtomicDisjointSets::new(n as usize);
        std::thread::scope(|s| {
            for chunk in pairs.chunks(pairs.len() / 4 + 1) {
                let atomic = &atomic;
                s.spawn(move || {
                    for &(a, b) in chunk {
                        atomic.union(a, b);
                    }
                });
            }
        });
        assert_eq!(canonical(&seq.roots()), canonical(&atomic.roots()));
    }
}
