//! The symmetric-group equivariant complex `C^p = ⊕_{|I| = p+1} L_I` on `X^n`:
//! multi-indices, signs, differential, action, and section models over an
//! affine chart.
//!
//! Elements of `{1..n}` are 1-based in the public API; permutations act on
//! `0..n`, with point `i - 1` standing for element `i`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::danila::{BlockAction, GAction};
use crate::error::bail;
use crate::grading::{cycle_trace, poly_mul, GradedDim, LaurentPoly};
use crate::linalg::{q, SparseMatrix, SparseVec};
use crate::perm::{factorial, sort_sign, Perm, PermGroup};
use crate::ringmodel::RingModel;
use crate::symrep::{partitions, CycleType};
use crate::Result;

/// Nonempty subset of `{1..n}`, bit `i - 1` standing for element `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub u32);

impl MultiIndex {
    pub fn new(elements: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        for &e in elements {
            if e == 0 || e > 31 {
                bail!(InvalidArgument, "element {} outside 1..=31", e);
            }
            mask |= 1 << (e - 1);
        }
        if mask == 0 {
            bail!(InvalidArgument, "multi-index must be nonempty");
        }
        Ok(MultiIndex(mask))
    }

    pub fn elements(&self) -> Vec<u32> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: u32) -> bool {
        (1..=32).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    /// Image under a permutation of the points `0..n`.
    pub fn permuted(&self, sigma: &Perm) -> MultiIndex {
        let mut out = 0u32;
        for e in self.elements() {
            out |= 1 << sigma.apply(e as usize - 1);
        }
        MultiIndex(out)
    }
}

/// Subsets of `{1..n}` of the given size in colex order.
pub fn subsets_colex(n: u32, size: u32) -> Vec<MultiIndex> {
    (0u32..(1u32 << n)).filter(|m| m.count_ones() == size).map(MultiIndex).collect()
}

/// `ε_{i,J} = (−1)^{#{h ∈ J : h < i}}`.
pub fn epsilon(i: u32, j: &MultiIndex) -> Result<i32> {
    if !j.contains(i) {
        bail!(InvalidArgument, "{} is not in {:?}", i, j.elements());
    }
    let below = (j.0 & ((1u32 << (i - 1)) - 1)).count_ones();
    Ok(if below.is_multiple_of(2) { 1 } else { -1 })
}

/// Sign of the permutation sorting `(σ(j_1), …, σ(j_m))`, where
/// `j_1 < … < j_m` enumerate `σ^{-1}(J)`.
pub fn equivariant_sign(sigma: &Perm, j: &MultiIndex) -> i32 {
    let pre = j.permuted(&sigma.inverse());
    let images: Vec<usize> = pre.elements().iter().map(|&e| sigma.apply(e as usize - 1)).collect();
    sort_sign(&images)
}

/// Matrix of `C^p → C^{p+1}`: entry `(J, J∖{i}) = ε_{i,J}`, both bases colex.
pub fn differential_matrix(n: u32, p: u32) -> Result<SparseMatrix> {
    if n < 2 || p > n - 2 {
        bail!(InvalidArgument, "differential out of range: n = {}, p = {}", n, p);
    }
    let cols = subsets_colex(n, p + 1);
    let rows = subsets_colex(n, p + 2);
    let col_index: BTreeMap<MultiIndex, usize> = cols.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let mut m = SparseMatrix::zeros(rows.len(), cols.len());
    for (r, jj) in rows.iter().enumerate() {
        for i in jj.elements() {
            let src = MultiIndex(jj.0 & !(1 << (i - 1)));
            m.set(r, col_index[&src], q(epsilon(i, jj)? as i64));
        }
    }
    Ok(m)
}

/// Signed permutation matrix of `σ` on `C^p`: `(σ.x)_J = ε_{σ,J} x_{σ^{-1}(J)}`.
pub fn action_matrix(n: u32, sigma: &Perm, p: u32) -> Result<SparseMatrix> {
    if sigma.degree() != n as usize {
        bail!(InvalidArgument, "permutation of degree {} on n = {}", sigma.degree(), n);
    }
    if p >= n {
        bail!(InvalidArgument, "no term C^{} for n = {}", p, n);
    }
    let basis = subsets_colex(n, p + 1);
    let index: BTreeMap<MultiIndex, usize> = basis.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let mut m = SparseMatrix::zeros(basis.len(), basis.len());
    for (c, src) in basis.iter().enumerate() {
        let target = src.permuted(sigma);
        m.set(index[&target], c, q(equivariant_sign(sigma, &target) as i64));
    }
    Ok(m)
}

/// The complex as combinatorial data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CechComplexModel {
    pub n: u32,
    pub terms: Vec<Vec<MultiIndex>>,
}

impl CechComplexModel {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 16 {
            bail!(InvalidArgument, "n = {} outside 1..=16", n);
        }
        Ok(CechComplexModel { n, terms: (0..n).map(|p| subsets_colex(n, p + 1)).collect() })
    }

    /// Whether every composite of consecutive differentials vanishes.
    pub fn squares_to_zero(&self) -> Result<bool> {
        for p in 0..self.n.saturating_sub(2) {
            let d0 = differential_matrix(self.n, p)?;
            let d1 = differential_matrix(self.n, p + 1)?;
            if !d1.compose(&d0)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `H^0(U^n, L_I) ≅ H^0(U, L) ⊗ H^0(U, O)^{⊗|Ī|} ⊗ ε_{|I|}` as a representation of
/// `S(I) × S(Ī)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionModel {
    pub inside: u32,
    pub outside: u32,
    pub l_dims: GradedDim,
    pub ring_dims: GradedDim,
}

/// Section model for `L_I` on `U^n`.
pub fn section_model(i: &MultiIndex, n: u32, ring: &RingModel, l_dims: &GradedDim) -> Result<SectionModel> {
    if i.elements().iter().any(|&e| e > n) {
        bail!(InvalidArgument, "{:?} is not inside 1..={}", i.elements(), n);
    }
    Ok(SectionModel { inside: i.len() as u32, outside: n - i.len() as u32, l_dims: l_dims.clone(), ring_dims: ring.graded_dims() })
}

impl SectionModel {
    /// Graded trace of `(α, β) ∈ S(I) × S(Ī)` with the given cycle types.
    pub fn character(&self, alpha: &CycleType, beta: &CycleType) -> Result<LaurentPoly> {
        if alpha.weight() != self.inside || beta.weight() != self.outside {
            bail!(InvalidArgument, "cycle types of weights {}, {} for S_{} × S_{}", alpha.weight(), beta.weight(), self.inside, self.outside);
        }
        let mut poly: LaurentPoly = self.l_dims.iter().map(|(d, m)| (d, m as i128 * alpha.sign() as i128)).collect();
        for &c in beta.parts() {
            poly = poly_mul(&poly, &cycle_trace(&self.ring_dims, c))?;
        }
        Ok(poly)
    }

    pub fn total_dim(&self) -> u64 {
        let r = self.ring_dims.total();
        self.l_dims.total() * r.pow(self.outside)
    }

    /// Invariants of the stabilizer by class averaging.
    pub fn invariants(&self) -> Result<GradedDim> {
        let mut acc = LaurentPoly::new();
        for a in partitions(self.inside) {
            for b in partitions(self.outside) {
                let weight = (a.class_size() * b.class_size()) as i128;
                for (d, c) in self.character(&a, &b)? {
                    *acc.entry(d).or_insert(0) += weight * c;
                }
            }
        }
        let order = (factorial(self.inside) * factorial(self.outside)) as i128;
        let mut out = LaurentPoly::new();
        for (d, c) in acc {
            if c % order != 0 {
                bail!(NonIntegral, "{}/{} in degree {}", c, order, d);
            }
            if c != 0 {
                out.insert(d, c / order);
            }
        }
        GradedDim::from_poly(&out)
    }
}

/// `(C^p)^{S_n}`, reduced to the stabilizer of `{1..p+1}`.
pub fn invariants_of_term(n: u32, p: u32, ring: &RingModel, l_dims: &GradedDim) -> Result<GradedDim> {
    if n == 0 || p >= n {
        bail!(InvalidArgument, "p = {} outside 0..{}", p, n);
    }
    let i0 = MultiIndex((1u32 << (p + 1)) - 1);
    section_model(&i0, n, ring, l_dims)?.invariants()
}

/// `C^p` over an affine chart with `L` trivial, as an explicit block module:
/// block `I` has basis the ring-basis tuples over the coordinate blocks of
/// `Δ_I × U^{Ī}` (the diagonal block first, then the singletons increasing).
pub struct CechTermModule<'a> {
    n: u32,
    ring: &'a RingModel,
    indices: Vec<MultiIndex>,
    index_of: BTreeMap<MultiIndex, usize>,
    action: GAction,
}

impl<'a> CechTermModule<'a> {
    pub fn new(n: u32, p: u32, ring: &'a RingModel) -> Result<Self> {
        if n == 0 || p >= n || n > 8 {
            bail!(InvalidArgument, "term C^{} on n = {} not supported", p, n);
        }
        let indices = subsets_colex(n, p + 1);
        let index_of: BTreeMap<MultiIndex, usize> = indices.iter().enumerate().map(|(k, &m)| (m, k)).collect();
        let group = PermGroup::symmetric(n as usize);
        let gen_maps = group
            .generators
            .iter()
            .map(|g| indices.iter().map(|m| index_of[&m.permuted(g)]).collect())
            .collect();
        let action = GAction::new(group, indices.len(), gen_maps, factorial(n))?;
        Ok(CechTermModule { n, ring, indices, index_of, action })
    }

    fn slots(&self, i: MultiIndex) -> Vec<u32> {
        // block label: smallest element; diagonal first
        let mut out = alloc::vec![i.elements()[0]];
        out.extend((1..=self.n).filter(|e| !i.contains(*e)));
        out
    }

    fn slot_count(&self, i: MultiIndex) -> u32 {
        self.n - i.len() as u32 + 1
    }

    pub fn index(&self, k: usize) -> MultiIndex {
        self.indices[k]
    }
}

fn tuple_of(mut b: usize, len: u32, base: usize) -> Vec<usize> {
    let mut out = alloc::vec![0; len as usize];
    for slot in (0..len as usize).rev() {
        out[slot] = b % base;
        b /= base;
    }
    out
}

fn index_of_tuple(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

impl BlockAction for CechTermModule<'_> {
    fn action(&self) -> &GAction {
        &self.action
    }

    fn block_dim(&self, i: usize) -> usize {
        self.ring.len().pow(self.slot_count(self.indices[i]))
    }

    fn image(&self, g: &Perm, i: usize) -> Result<usize> {
        Ok(self.index_of[&self.indices[i].permuted(g)])
    }

    fn act(&self, g: &Perm, i: usize) -> Result<SparseMatrix> {
        let src = self.indices[i];
        let dst = src.permuted(g);
        let sign = q(equivariant_sign(g, &dst) as i64);
        let base = self.ring.len();
        let src_slots = self.slots(src);
        let dst_slots = self.slots(dst);
        // slot s of the source lands in the destination slot containing g(label)
        let perm: Vec<usize> = src_slots
            .iter()
            .enumerate()
            .map(|(s, &label)| {
                if s == 0 {
                    0
                } else {
                    let e = g.apply(label as usize - 1) as u32 + 1;
                    dst_slots.iter().position(|&x| x == e).expect("singleton maps to singleton")
                }
            })
            .collect();
        let len = src_slots.len() as u32;
        let dim = base.pow(len);
        let mut m = SparseMatrix::zeros(dim, dim);
        for b in 0..dim {
            let t = tuple_of(b, len, base);
            let mut u = alloc::vec![0; t.len()];
            for (s, &x) in t.iter().enumerate() {
                u[perm[s]] = x;
            }
            m.columns[b] = SparseVec::from([(index_of_tuple(&u, base), sign.clone())]);
        }
        Ok(m)
    }

    fn weight(&self, i: usize, b: usize) -> i32 {
        let len = self.slot_count(self.indices[i]);
        tuple_of(b, len, self.ring.len()).iter().map(|&x| self.ring.basis[x].internal).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::danila::{invariants_danila, invariants_direct};
    use crate::ringmodel::truncated_poly_model;

    #[test]
    fn epsilon_examples() {
        let j = MultiIndex::new(&[2, 5]).unwrap();
        assert_eq!(epsilon(5, &j).unwrap(), -1);
        assert_eq!(epsilon(2, &j).unwrap(), 1);
        assert!(epsilon(3, &j).is_err());
    }

    #[test]
    fn swap_sign() {
        let j = MultiIndex::new(&[1, 2]).unwrap();
        assert_eq!(equivariant_sign(&Perm::transposition(3, 0, 1), &j), -1);
        assert_eq!(equivariant_sign(&Perm::identity(3), &j), 1);
        assert_eq!(equivariant_sign(&Perm::transposition(3, 0, 1), &MultiIndex::new(&[3]).unwrap()), 1);
    }

    #[test]
    fn small_differential() {
        let d = differential_matrix(2, 0).unwrap();
        assert_eq!(d.to_dense(), alloc::vec![alloc::vec![q(-1), q(1)]]);
        assert!(CechComplexModel::new(5).unwrap().squares_to_zero().unwrap());
        assert!(differential_matrix(3, 2).is_err());
    }

    #[test]
    fn term_invariants() {
        let r1 = truncated_poly_model(1).unwrap();
        let l = r1.graded_dims();
        assert_eq!(invariants_of_term(2, 0, &r1, &l).unwrap().total(), 9);
        let r2 = truncated_poly_model(2).unwrap();
        assert!(invariants_of_term(3, 1, &r2, &r2.graded_dims()).unwrap().is_zero());
        assert!(invariants_of_term(4, 3, &r2, &r2.graded_dims()).unwrap().is_zero());
    }

    #[test]
    fn explicit_module_agrees() {
        let r = truncated_poly_model(1).unwrap();
        for p in 0..3 {
            let m = CechTermModule::new(3, p, &r).unwrap();
            let a = invariants_danila(&m).unwrap();
            let b = invariants_direct(&m).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.total(), invariants_of_term(3, p, &r, &r.graded_dims()).unwrap().total());
        }
    }
}
