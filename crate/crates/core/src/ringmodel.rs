//! Finite ring and pairing models: truncated polynomial rings standing in for
//! sections over an affine chart, bilinear pairing tables, and surface presets.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::bail;
use crate::grading::GradedDim;
use crate::linalg::{axpy, SparseVec, Q};
use crate::perm::binomial;
use crate::Result;

pub use crate::linalg::{rank, rank_kernel, rank_kernel_ordered};

/// One basis element of a [`RingModel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElem {
    pub label: String,
    /// Cohomological degree (drives Koszul signs).
    pub degree: i32,
    /// Auxiliary weight, e.g. polynomial degree; never affects signs.
    pub internal: i32,
}

/// Graded-commutative associative algebra on an explicit basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingModel {
    pub basis: Vec<BasisElem>,
    mult: BTreeMap<(usize, usize), SparseVec>,
    pub unit: usize,
}

/// Exhaustive associativity check up to this basis size; sampled above it.
const EXHAUSTIVE_ASSOC: usize = 30;

impl RingModel {
    /// Builds and validates a ring from structure constants `(i, j, k, c)`
    /// meaning `b_i · b_j` has coefficient `c` on `b_k`.
    pub fn new(basis: Vec<BasisElem>, entries: &[(usize, usize, usize, Q)], unit: usize) -> Result<Self> {
        let n = basis.len();
        if unit >= n {
            bail!(InvalidArgument, "unit index {} out of range", unit);
        }
        let mut mult: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (i, j, k, c) in entries {
            if *i >= n || *j >= n || *k >= n {
                bail!(InvalidArgument, "structure constant index out of range: ({}, {}, {})", i, j, k);
            }
            let v = mult.entry((*i, *j)).or_default();
            axpy(v, c, &SparseVec::from([(*k, Q::one())]));
        }
        mult.retain(|_, v| !v.is_empty());
        let ring = RingModel { basis, mult, unit };
        ring.validate()?;
        Ok(ring)
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `b_i · b_j`.
    pub fn product(&self, i: usize, j: usize) -> SparseVec {
        self.mult.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, x) in a {
            for (&j, y) in b {
                if let Some(p) = self.mult.get(&(i, j)) {
                    axpy(&mut out, &(x * y), p);
                }
            }
        }
        out
    }

    /// Cohomological Poincaré data.
    pub fn graded_dims(&self) -> GradedDim {
        GradedDim::from_pairs(self.basis.iter().map(|b| (b.degree, 1)))
    }

    /// Dimensions by internal weight.
    pub fn internal_dims(&self) -> GradedDim {
        GradedDim::from_pairs(self.basis.iter().map(|b| (b.internal, 1)))
    }

    /// Unit, degree additivity, graded commutativity and associativity.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let unit = SparseVec::from([(self.unit, Q::one())]);
        for i in 0..n {
            let e = SparseVec::from([(i, Q::one())]);
            if self.mul(&unit, &e) != e || self.mul(&e, &unit) != e {
                bail!(Incompatible, "unit does not act as identity on {}", self.basis[i].label);
            }
        }
        for (&(i, j), v) in &self.mult {
            let d = self.basis[i].degree + self.basis[j].degree;
            for &k in v.keys() {
                if self.basis[k].degree != d {
                    bail!(Incompatible, "{}·{} has a component in degree {}", self.basis[i].label, self.basis[j].label, self.basis[k].degree);
                }
            }
            let sign = if (self.basis[i].degree * self.basis[j].degree).rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
            let mut swapped = crate::linalg::scaled(&self.product(j, i), &sign);
            axpy(&mut swapped, &-Q::one(), v);
            if !swapped.is_empty() {
                bail!(Incompatible, "{}·{} violates graded commutativity", self.basis[i].label, self.basis[j].label);
            }
        }
        let triples: Vec<(usize, usize, usize)> = if n <= EXHAUSTIVE_ASSOC {
            (0..n).flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))).collect()
        } else {
            // deterministic spread of samples
            (0..2000usize).map(|s| ((s * 7919) % n, (s * 104_729 + 3) % n, (s * 1_299_709 + 11) % n)).collect()
        };
        for (i, j, k) in triples {
            let bi = SparseVec::from([(i, Q::one())]);
            let bj = SparseVec::from([(j, Q::one())]);
            let bk = SparseVec::from([(k, Q::one())]);
            if self.mul(&self.mul(&bi, &bj), &bk) != self.mul(&bi, &self.mul(&bj, &bk)) {
                bail!(Incompatible, "associativity fails on ({}, {}, {})", i, j, k);
            }
        }
        Ok(())
    }
}

/// Largest truncation degree accepted by [`truncated_poly_model`].
pub const MAX_TRUNCATION: u32 = 12;

/// Exponents `(a, b)` of `x^a y^b` with `a + b ≤ d`, by total degree then descending `a`.
pub fn truncated_monomials(d: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for t in 0..=d {
        for a in (0..=t).rev() {
            out.push((a, t - a));
        }
    }
    out
}

/// `ℂ[x, y]` modulo monomials of total degree above `d`. Everything sits in
/// cohomological degree 0; the polynomial degree is the internal weight.
pub fn truncated_poly_model(d: u32) -> Result<RingModel> {
    if d > MAX_TRUNCATION {
        bail!(TooLarge, "truncation degree {} exceeds {}", d, MAX_TRUNCATION);
    }
    let mons = truncated_monomials(d);
    let index: BTreeMap<(u32, u32), usize> = mons.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let basis = mons
        .iter()
        .map(|&(a, b)| BasisElem { label: monomial_label(&[("x", a), ("y", b)]), degree: 0, internal: (a + b) as i32 })
        .collect();
    let mut entries = Vec::new();
    for (i, &(a1, b1)) in mons.iter().enumerate() {
        for (j, &(a2, b2)) in mons.iter().enumerate() {
            if let Some(&k) = index.get(&(a1 + a2, b1 + b2)) {
                entries.push((i, j, k, Q::one()));
            }
        }
    }
    RingModel::new(basis, &entries, 0)
}

fn monomial_label(parts: &[(&str, u32)]) -> String {
    let mut s = String::new();
    for &(v, e) in parts {
        match e {
            0 => {}
            1 => s.push_str(v),
            _ => s.push_str(&format!("{}^{}", v, e)),
        }
    }
    if s.is_empty() {
        s.push('1');
    }
    s
}

/// Basis degrees of a graded space in canonical order: ascending degree.
pub fn basis_degrees(g: &GradedDim) -> Vec<i32> {
    g.iter().flat_map(|(d, m)| core::iter::repeat_n(d, m as usize)).collect()
}

/// Bilinear map `left × right → target` on the canonical bases of three graded spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub left: GradedDim,
    pub right: GradedDim,
    pub target: GradedDim,
    entries: BTreeMap<(usize, usize), SparseVec>,
}

impl Pairing {
    pub fn new(left: GradedDim, right: GradedDim, target: GradedDim, entries: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let (dl, dr, dt) = (basis_degrees(&left), basis_degrees(&right), basis_degrees(&target));
        let mut map: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (i, j, k, c) in entries {
            if *i >= dl.len() || *j >= dr.len() || *k >= dt.len() {
                bail!(InvalidArgument, "pairing entry ({}, {}, {}) out of range", i, j, k);
            }
            if dl[*i] + dr[*j] != dt[*k] {
                bail!(Incompatible, "pairing entry ({}, {}, {}) is not degree additive", i, j, k);
            }
            axpy(map.entry((*i, *j)).or_default(), c, &SparseVec::from([(*k, Q::one())]));
        }
        map.retain(|_, v| !v.is_empty());
        Ok(Pairing { left, right, target, entries: map })
    }

    pub fn apply(&self, i: usize, j: usize) -> SparseVec {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Flattened `(i, j, k, c)` entries, sorted.
    pub fn entries(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for (&(i, j), v) in &self.entries {
            for (&k, c) in v {
                out.push((i, j, k, c.clone()));
            }
        }
        out
    }
}

/// Where a [`SurfaceData`] came from; kept so it can be written back out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preset {
    P2 { l: i64, a: i64 },
    Affine { d: u32 },
    Formal,
}

/// Cohomology dimensions of the line bundles the closed formulas need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceData {
    pub preset: Preset,
    pub h_o: GradedDim,
    pub h_l: GradedDim,
    pub h_l2: GradedDim,
    pub h_a: GradedDim,
    pub h_la: GradedDim,
    pub h_l2a: GradedDim,
    pub h_l2a2: GradedDim,
    /// Basis index of `1 ∈ H*(O)`, when known.
    pub o_unit: Option<usize>,
    /// `H*(L²A) × H*(A) → H*(L²A²)`.
    pub l2a_a: Option<Pairing>,
    /// `H*(LA) × H*(LA) → H*(L²A²)`.
    pub la_la: Option<Pairing>,
    /// `h^0(K^j ⊗ L^l)` keyed by `(j, l)`.
    pub twists: BTreeMap<(i32, i32), GradedDim>,
}

impl SurfaceData {
    /// Inputs with `A = O` filled in where absent.
    #[allow(clippy::too_many_arguments)]
    pub fn formal(
        h_o: GradedDim,
        h_l: GradedDim,
        h_l2: GradedDim,
        h_a: Option<GradedDim>,
        h_la: Option<GradedDim>,
        h_l2a: Option<GradedDim>,
        h_l2a2: Option<GradedDim>,
    ) -> Self {
        SurfaceData {
            preset: Preset::Formal,
            h_a: h_a.unwrap_or_else(|| h_o.clone()),
            h_la: h_la.unwrap_or_else(|| h_l.clone()),
            h_l2a: h_l2a.unwrap_or_else(|| h_l2.clone()),
            h_l2a2: h_l2a2.unwrap_or_else(|| h_l2.clone()),
            h_o,
            h_l,
            h_l2,
            o_unit: None,
            l2a_a: None,
            la_la: None,
            twists: BTreeMap::new(),
        }
    }

    /// Checks that pairing tables match the spaces they claim to pair.
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = &self.l2a_a {
            if p.left != self.h_l2a || p.right != self.h_a || p.target != self.h_l2a2 {
                bail!(Incompatible, "l2a_a pairing does not match H*(L²A) × H*(A) → H*(L²A²)");
            }
        }
        if let Some(p) = &self.la_la {
            if p.left != self.h_la || p.right != self.h_la || p.target != self.h_l2a2 {
                bail!(Incompatible, "la_la pairing does not match H*(LA) × H*(LA) → H*(L²A²)");
            }
        }
        if let Some(u) = self.o_unit {
            if u as u64 >= self.h_o.total() {
                bail!(Incompatible, "unit index {} outside H*(O)", u);
            }
        }
        Ok(())
    }
}

/// Monomials of degree `e` in `x, y, z`, descending lexicographic.
pub fn p2_monomials(e: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for a in (0..=e).rev() {
        for b in (0..=e - a).rev() {
            out.push((a, b, e - a - b));
        }
    }
    out
}

fn p2_pairing(e1: u32, e2: u32) -> Result<Pairing> {
    let (m1, m2, m3) = (p2_monomials(e1), p2_monomials(e2), p2_monomials(e1 + e2));
    let index: BTreeMap<(u32, u32, u32), usize> = m3.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut entries = Vec::new();
    for (i, a) in m1.iter().enumerate() {
        for (j, b) in m2.iter().enumerate() {
            let k = index[&(a.0 + b.0, a.1 + b.1, a.2 + b.2)];
            entries.push((i, j, k, Q::one()));
        }
    }
    Pairing::new(
        GradedDim::single(0, m1.len() as u64),
        GradedDim::single(0, m2.len() as u64),
        GradedDim::single(0, m3.len() as u64),
        &entries,
    )
}

/// `h^0(P², O(e)) = C(e+2, 2)`.
pub fn p2_h0(e: i64) -> u64 {
    binomial(e + 2, 2) as u64
}

/// The projective plane with `L = O(l)` and `A = O(a)`, both globally generated.
pub fn p2(l: i64, a: i64) -> Result<SurfaceData> {
    if l < 0 || a < 0 {
        bail!(InvalidArgument, "p2 preset needs nonnegative twists, got L=O({}), A=O({})", l, a);
    }
    let h = |e: i64| GradedDim::single(0, p2_h0(e));
    let mut twists = BTreeMap::new();
    // K = O(-3); only globally generated twists are listed
    for j in -2i32..=0 {
        for ll in 0..=4i32 {
            let e = -3 * j as i64 + ll as i64 * l;
            if j <= 0 && e >= 0 {
                twists.insert((j, ll), h(e));
            }
        }
    }
    let data = SurfaceData {
        preset: Preset::P2 { l, a },
        h_o: h(0),
        h_l: h(l),
        h_l2: h(2 * l),
        h_a: h(a),
        h_la: h(l + a),
        h_l2a: h(2 * l + a),
        h_l2a2: h(2 * l + 2 * a),
        o_unit: Some(0),
        l2a_a: Some(p2_pairing((2 * l + a) as u32, a as u32)?),
        la_la: Some(p2_pairing((l + a) as u32, (l + a) as u32)?),
        twists,
    };
    data.validate()?;
    Ok(data)
}

/// An affine chart: every line bundle is trivial, sections are the truncated ring.
pub fn affine(d: u32) -> Result<SurfaceData> {
    let ring = truncated_poly_model(d)?;
    let dims = ring.graded_dims();
    let n = ring.len();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for (k, c) in ring.product(i, j) {
                entries.push((i, j, k, c));
            }
        }
    }
    let pairing = Pairing::new(dims.clone(), dims.clone(), dims.clone(), &entries)?;
    let mut twists = BTreeMap::new();
    for j in -2..=2 {
        for l in 0..=4 {
            twists.insert((j, l), dims.clone());
        }
    }
    Ok(SurfaceData {
        preset: Preset::Affine { d },
        h_o: dims.clone(),
        h_l: dims.clone(),
        h_l2: dims.clone(),
        h_a: dims.clone(),
        h_la: dims.clone(),
        h_l2a: dims.clone(),
        h_l2a2: dims,
        o_unit: Some(ring.unit),
        l2a_a: Some(pairing.clone()),
        la_la: Some(pairing),
        twists,
    })
}

/// Dispatch by name: `p2` takes `[l, a]`, `affine` takes `[d]`.
pub fn preset_surface(name: &str, params: &[i64]) -> Result<SurfaceData> {
    match name {
        "p2" => {
            let l = params.first().copied().unwrap_or(0);
            let a = params.get(1).copied().unwrap_or(0);
            p2(l, a)
        }
        "affine" => {
            let d = params.first().copied().unwrap_or(0);
            if d < 0 {
                bail!(InvalidArgument, "affine truncation degree must be nonnegative");
            }
            affine(d as u32)
        }
        "formal" => bail!(InvalidArgument, "formal surfaces are built from explicit dimensions"),
        other => bail!(InvalidArgument, "unknown preset {:?}", other),
    }
}

/// Zero check used by callers that compare rational tables.
pub fn is_zero_vec(v: &SparseVec) -> bool {
    v.values().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_sizes() {
        assert_eq!(truncated_poly_model(0).unwrap().len(), 1);
        assert_eq!(truncated_poly_model(2).unwrap().len(), 6);
        let r = truncated_poly_model(1).unwrap();
        // x = 1, y = 2
        assert!(r.product(1, 2).is_empty());
        assert!(truncated_poly_model(13).is_err());
        assert_eq!(r.internal_dims(), GradedDim::from_pairs([(0, 1), (1, 2)]));
    }

    #[test]
    fn presets() {
        let s = p2(1, 0).unwrap();
        assert_eq!(s.h_l, GradedDim::single(0, 3));
        assert_eq!(s.h_l2, GradedDim::single(0, 6));
        assert!(p2(-1, 0).is_err());
        assert!(preset_surface("k3", &[]).is_err());
        assert_eq!(affine(1).unwrap().h_o, GradedDim::single(0, 3));
    }

    #[test]
    fn p2_counts_match_monomials() {
        for e in 0..8 {
            assert_eq!(p2_monomials(e).len() as u64, p2_h0(e as i64));
        }
    }

    #[test]
    fn rejects_noncommutative_table() {
        let basis = alloc::vec![
            BasisElem { label: "1".into(), degree: 0, internal: 0 },
            BasisElem { label: "a".into(), degree: 1, internal: 0 },
        ];
        let one = Q::one();
        // a·a = 0 is fine for an odd element; declare a·1 but not 1·a
        let bad = [(0, 0, 0, one.clone()), (1, 0, 1, one.clone())];
        assert!(RingModel::new(basis.clone(), &bad, 0).is_err());
        let good = [(0, 0, 0, one.clone()), (1, 0, 1, one.clone()), (0, 1, 1, one)];
        assert!(RingModel::new(basis, &good, 0).is_ok());
    }
}
