//! Permutations of `0..n`, cycle types and permutation groups given by generators.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use crate::error::bail;
use crate::Result;

/// A permutation stored as its image table: `self.0[i]` is the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                bail!(InvalidArgument, "not a permutation: {:?}", images);
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Swap of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = alloc::vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle lengths, longest first (fixed points included).
    pub fn cycle_type(&self) -> Vec<u32> {
        let n = self.0.len();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// +1 or -1.
    pub fn sign(&self) -> i32 {
        let ct = self.cycle_type();
        if (self.0.len() - ct.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Number of fixed points of `self^m`.
    pub fn fixed_points_of_power(&self, m: u32) -> u32 {
        self.cycle_type()
            .iter()
            .filter(|&&c| m.is_multiple_of(c)).copied()
            .sum()
    }
}

/// Sign of the permutation that sorts `seq` (entries must be distinct).
pub fn sort_sign<T: Ord>(seq: &[T]) -> i32 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` in lexicographic order of image tables.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm(cur.clone()));
        // next lexicographic permutation
        let mut i = n;
        loop {
            if i < 2 {
                return out;
            }
            i -= 1;
            if cur[i - 1] < cur[i] {
                break;
            }
        }
        let pivot = i - 1;
        let mut j = n - 1;
        while cur[j] <= cur[pivot] {
            j -= 1;
        }
        cur.swap(pivot, j);
        cur[i..].reverse();
    }
}

pub fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: i64, k: i64) -> u128 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// A permutation group on `degree` points, given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                bail!(InvalidArgument, "generator of degree {} in a group of degree {}", g.degree(), degree);
            }
        }
        Ok(PermGroup { degree, generators })
    }

    /// Full symmetric group on `m` points, generated by adjacent transpositions.
    pub fn symmetric(m: usize) -> Self {
        Self::symmetric_on(m, &(0..m).collect::<Vec<_>>())
    }

    /// Symmetric group of the listed points inside `S_degree`.
    pub fn symmetric_on(degree: usize, points: &[usize]) -> Self {
        let generators = points
            .windows(2)
            .map(|w| Perm::transposition(degree, w[0], w[1]))
            .collect();
        PermGroup { degree, generators }
    }

    /// Direct product acting on disjoint consecutive point blocks.
    pub fn product(factors: &[PermGroup]) -> Self {
        let degree: usize = factors.iter().map(|f| f.degree).sum();
        let mut generators = Vec::new();
        let mut offset = 0;
        for f in factors {
            for g in &f.generators {
                let mut img: Vec<usize> = (0..degree).collect();
                for i in 0..f.degree {
                    img[offset + i] = offset + g.0[i];
                }
                generators.push(Perm(img));
            }
            offset += f.degree;
        }
        PermGroup { degree, generators }
    }

    /// Every element, breadth first from the identity. Fails above `limit`.
    pub fn elements(&self, limit: usize) -> Result<Vec<Perm>> {
        let id = Perm::identity(self.degree);
        let mut seen = BTreeSet::new();
        seen.insert(id.clone());
        let mut out = alloc::vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    if out.len() >= limit {
                        bail!(TooLarge, "group has more than {} elements", limit);
                    }
                    out.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(out)
    }

    pub fn order(&self, limit: usize) -> Result<usize> {
        Ok(self.elements(limit)?.len())
    }
}

/// Orbit of `start` under generator images `gen_maps[g][i]`, with a transversal:
/// for each orbit element the word (generator indices, applied left to right)
/// carrying `start` to it.
pub fn orbit_with_words(gen_maps: &[Vec<usize>], start: usize) -> BTreeMap<usize, Vec<usize>> {
    let mut words = BTreeMap::new();
    words.insert(start, Vec::new());
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let w = words[&i].clone();
        for (g, map) in gen_maps.iter().enumerate() {
            let j = map[i];
            if let alloc::collections::btree_map::Entry::Vacant(e) = words.entry(j) {
                let mut wj = w.clone();
                wj.push(g);
                e.insert(wj);
                queue.push_back(j);
            }
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_counts_and_signs() {
        let all = all_perms(4);
        assert_eq!(all.len(), 24);
        let even = all.iter().filter(|p| p.sign() == 1).count();
        assert_eq!(even, 12);
        assert_eq!(PermGroup::symmetric(4).order(100).unwrap(), 24);
    }

    #[test]
    fn composition_order() {
        let a = Perm(alloc::vec![1, 0, 2]);
        let b = Perm(alloc::vec![0, 2, 1]);
        // (a∘b)(1) = a(2) = 2
        assert_eq!(a.compose(&b).apply(1), 2);
        assert_eq!(a.compose(&a.inverse()), Perm::identity(3));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(2, 5), 0);
        assert_eq!(binomial(5, -1), 0);
    }
}
