//! Exterior algebra on at most 64 generators, monomials as bit masks.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::linalg::{SparseVec, Q};

/// Element of the exterior algebra: increasing-order monomial mask to coefficient.
pub type ExtElem = BTreeMap<u64, Q>;

/// Sign of `m1 ∧ m2` relative to the sorted monomial, or `None` if they overlap.
pub fn wedge_sign(m1: u64, m2: u64) -> Option<i32> {
    if m1 & m2 != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = m2;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of m1 above j must jump over it
        swaps += (m1 >> j).count_ones();
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

pub fn wedge(a: &ExtElem, b: &ExtElem) -> ExtElem {
    let mut out = ExtElem::new();
    for (&ma, xa) in a {
        for (&mb, xb) in b {
            if let Some(s) = wedge_sign(ma, mb) {
                let c = if s == 1 { xa * xb } else { -(xa * xb) };
                add_term(&mut out, ma | mb, c);
            }
        }
    }
    out
}

fn add_term(acc: &mut ExtElem, m: u64, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(m).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&m);
    }
}

pub fn add_assign(acc: &mut ExtElem, other: &ExtElem, c: &Q) {
    for (&m, x) in other {
        add_term(acc, m, x * c);
    }
}

pub fn generator(i: usize) -> ExtElem {
    ExtElem::from([(1u64 << i, Q::one())])
}

/// Wedge of the listed linear forms (each a sparse combination of generators).
pub fn wedge_of_vectors(vs: &[SparseVec]) -> ExtElem {
    let mut acc = ExtElem::from([(0u64, Q::one())]);
    for v in vs {
        let lin: ExtElem = v.iter().map(|(&i, x)| (1u64 << i, x.clone())).collect();
        acc = wedge(&acc, &lin);
    }
    acc
}

/// Generators of a monomial, increasing.
pub fn generators_of(m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = m;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

/// `Λ(f)` applied to `x`, where `f` sends generator `i` to `f(i)`.
pub fn apply_linear<F>(x: &ExtElem, f: F) -> ExtElem
where
    F: Fn(usize) -> SparseVec,
{
    let mut out = ExtElem::new();
    for (&m, c) in x {
        let images: Vec<SparseVec> = generators_of(m).into_iter().map(&f).collect();
        add_assign(&mut out, &wedge_of_vectors(&images), c);
    }
    out
}

/// All masks with `q` bits set among the given generator positions, in
/// increasing numeric order.
pub fn monomials(gens: &[usize], q: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(gens: &[usize], q: usize, start: usize, cur: u64, out: &mut Vec<u64>) {
        if q == 0 {
            out.push(cur);
            return;
        }
        for i in start..gens.len() {
            if gens.len() - i < q {
                break;
            }
            rec(gens, q - 1, i + 1, cur | (1u64 << gens[i]), out);
        }
    }
    rec(gens, q, 0, 0, &mut out);
    out.sort_unstable();
    out
}

/// Generator index of `c ⊗ e_s` in `V ⊗ R_K` with `V = ⟨u, v⟩` (`c = 0` for `u`).
pub fn vr_generator(c: usize, s: usize) -> usize {
    2 * s + c
}

/// `Λ^q(V ⊗ ρ_S)` inside `Λ^q(V ⊗ R_K)`, where `ρ_S` is the sum-zero part of the
/// span of `e_s`, `s ∈ S`. Basis: wedges of `c ⊗ (e_s − e_{max S})`, `s ≠ max S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StdExterior {
    pub support: Vec<usize>,
    pub q: usize,
    basis: Vec<Vec<(usize, usize)>>,
}

impl StdExterior {
    pub fn new(mut support: Vec<usize>, q: usize) -> Self {
        support.sort_unstable();
        support.dedup();
        let free: Vec<(usize, usize)> = match support.split_last() {
            Some((_, rest)) => rest.iter().flat_map(|&s| [(0, s), (1, s)]).collect(),
            None => Vec::new(),
        };
        let gens: Vec<usize> = free.iter().map(|&(c, s)| vr_generator(c, s)).collect();
        let mut by_gen: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (g, f) in gens.iter().zip(free.iter()) {
            by_gen.insert(*g, *f);
        }
        let basis = monomials(&gens, q)
            .into_iter()
            .map(|m| generators_of(m).into_iter().map(|g| by_gen[&g]).collect())
            .collect();
        StdExterior { support, q, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn top(&self) -> usize {
        *self.support.last().expect("nonempty support")
    }

    /// Ambient expansion of basis vector `j`.
    pub fn expand(&self, j: usize) -> ExtElem {
        if self.basis[j].is_empty() {
            return ExtElem::from([(0u64, Q::one())]);
        }
        let top = self.top();
        let vs: Vec<SparseVec> = self.basis[j]
            .iter()
            .map(|&(c, s)| SparseVec::from([(vr_generator(c, s), Q::one()), (vr_generator(c, top), -Q::one())]))
            .collect();
        wedge_of_vectors(&vs)
    }

    /// Coordinates of an element of the subspace: the coefficient of basis
    /// vector `J` is the ambient coefficient of the monomial avoiding `e_{max S}`.
    pub fn coordinates(&self, w: &ExtElem) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, b) in self.basis.iter().enumerate() {
            let mask = b.iter().fold(0u64, |m, &(c, s)| m | 1u64 << vr_generator(c, s));
            if let Some(x) = w.get(&mask) {
                out.insert(j, x.clone());
            }
        }
        out
    }

    /// Whether `w` lies in the subspace.
    pub fn contains(&self, w: &ExtElem) -> bool {
        if self.support.is_empty() {
            return w.keys().all(|&m| m == 0) && (self.q == 0 || w.is_empty());
        }
        let mut rebuilt = ExtElem::new();
        for (j, c) in self.coordinates(w) {
            add_assign(&mut rebuilt, &self.expand(j), &c);
        }
        rebuilt == *w
    }

    /// Matrix of `Λ^q` of an ambient generator map, from this space to `target`.
    pub fn map_matrix<F>(&self, target: &StdExterior, f: F) -> crate::linalg::SparseMatrix
    where
        F: Fn(usize) -> SparseVec,
    {
        let cols = (0..self.dim()).map(|j| target.coordinates(&apply_linear(&self.expand(j), &f))).collect();
        crate::linalg::SparseMatrix::from_columns(target.dim(), cols)
    }
}

/// Generator map of `c ⊗ e_s ↦ scale · c ⊗ e_{π(s)}`.
pub fn permute_vr(pi: &crate::perm::Perm, scale: i64) -> impl Fn(usize) -> SparseVec + '_ {
    move |g| {
        let (s, c) = (g / 2, g % 2);
        SparseVec::from([(vr_generator(c, pi.apply(s)), crate::linalg::q(scale))])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutation() {
        let a = generator(0);
        let b = generator(3);
        let ab = wedge(&a, &b);
        let ba = wedge(&b, &a);
        assert_eq!(ab.get(&0b1001), Some(&Q::one()));
        assert_eq!(ba.get(&0b1001), Some(&-Q::one()));
        assert!(wedge(&a, &a).is_empty());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(&[0, 1, 2, 3, 4, 5], 3).len(), 20);
        assert_eq!(monomials(&[], 0), alloc::vec![0]);
    }
}
