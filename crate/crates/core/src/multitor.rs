//! Multitors of a codimension-2 structure sheaf as symmetric-group representations.
//!
//! `Tor^l_q ≅ Λ^q(V ⊗ ρ_l)` with `V` two-dimensional and trivially acted on, tensored with
//! a line that carries no further action. Characters, invariant lines, the inclusion maps
//! between standard representations, block-permutation signs, and a Koszul oracle.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::bail;
use crate::exterior::{self, apply_linear, permute_vr, vr_generator, ExtElem, StdExterior};
use crate::linalg::{q as qq, q_frac, rank, rank_kernel, SparseMatrix, SparseVec};
use crate::perm::{all_perms, binomial, Perm};
use crate::symrep::{ext_inv_dim, ext_std_character, partitions, CycleType, Twist};
use crate::Result;

/// `Tor^l_q` as a character of `S_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorRep {
    pub l: u32,
    pub q: u32,
}

impl TorRep {
    pub fn dim(&self) -> u128 {
        if self.l == 0 {
            return 0;
        }
        binomial(2 * (i64::from(self.l) - 1), i64::from(self.q))
    }

    pub fn character(&self, mu: &CycleType) -> Result<i128> {
        tor_character(self.l, self.q, mu)
    }

    pub fn invariants(&self) -> Result<u64> {
        tor_invariants(self.l, self.q)
    }
}

/// Character of `Λ^q(ℂ² ⊗ ρ_l)` at the class `mu`; zero outside `0 ≤ q ≤ 2(l−1)`.
pub fn tor_character(l: u32, q: u32, mu: &CycleType) -> Result<i128> {
    if mu.weight() != l {
        bail!(InvalidArgument, "cycle type {} is not a class of S_{}", mu, l);
    }
    if l == 0 || q > 2 * (l - 1) {
        return Ok(0);
    }
    ext_std_character(l, q, mu)
}

/// Dimension of the `S_l`-invariants of `Tor^l_q`: one for even `q ≤ 2(l−1)`, else zero.
/// The invariant line is `(Λ²V)^{⊗ q/2}`.
pub fn tor_invariants(l: u32, q: u32) -> Result<u64> {
    if l == 0 || q > 2 * (l - 1) {
        return Ok(0);
    }
    ext_inv_dim(l, q, Twist::Trivial)
}

/// Label of the invariant line, e.g. `(Λ²V)^⊗2`.
pub fn invariant_line_label(q: u32) -> alloc::string::String {
    alloc::format!("(Λ²V)^⊗{}", q / 2)
}

/// Homology in degree `q` of the `l`-fold tensor power of the Koszul complex of `(x, y)`
/// over `ℚ[x, y]`, summed over polynomial degrees `0..=window`.
///
/// Each homological degree splits into strands by polynomial degree; the differential
/// raises polynomial degree by one, so each strand is finite.
pub fn koszul_tor_oracle(l: u32, q: u32, window: u32) -> Result<u64> {
    if l > 3 {
        bail!(TooLarge, "Koszul oracle supports l ≤ 3, got {}", l);
    }
    if window < l {
        bail!(InvalidArgument, "window {} below threshold {}", window, l);
    }
    let ngen = 2 * l as usize;
    if q as usize > ngen {
        return Ok(0);
    }
    let mut total = 0u64;
    for e in 0..=window as usize {
        let dim_here = strand_basis(ngen, q as usize, e).len();
        let out_rank = if q == 0 { 0 } else { rank(&koszul_strand_map(ngen, q as usize, e)) };
        let in_rank = if e == 0 || q as usize == ngen { 0 } else { rank(&koszul_strand_map(ngen, q as usize + 1, e - 1)) };
        let h = dim_here - out_rank - in_rank;
        total += h as u64;
    }
    Ok(total)
}

/// Basis of `C_q` in polynomial degree `e`: wedge mask and the `x` exponent.
fn strand_basis(ngen: usize, q: usize, e: usize) -> Vec<(u64, usize)> {
    let gens: Vec<usize> = (0..ngen).collect();
    let mut out = Vec::new();
    for m in exterior::monomials(&gens, q) {
        for a in 0..=e {
            out.push((m, a));
        }
    }
    out
}

/// `d: C_q(e) → C_{q−1}(e+1)`; generator `2m + c` maps to `x` for `c = 0`, `y` for `c = 1`.
fn koszul_strand_map(ngen: usize, q: usize, e: usize) -> SparseMatrix {
    let src = strand_basis(ngen, q, e);
    let tgt = strand_basis(ngen, q - 1, e + 1);
    let index: BTreeMap<(u64, usize), usize> = tgt.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let mut cols = Vec::with_capacity(src.len());
    for &(m, a) in &src {
        let mut col = SparseVec::new();
        for (pos, g) in exterior::generators_of(m).into_iter().enumerate() {
            let a2 = if g % 2 == 0 { a + 1 } else { a };
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            col.insert(index[&(m & !(1u64 << g), a2)], qq(sign));
        }
        cols.push(col);
    }
    SparseMatrix::from_columns(tgt.len(), cols)
}

/// Fixed space of a family of square matrices.
fn fixed_space(mats: &[SparseMatrix], dim: usize) -> Result<Vec<SparseVec>> {
    if mats.is_empty() {
        return Ok((0..dim).map(|i| SparseVec::from([(i, num_rational::BigRational::one())])).collect());
    }
    let id = SparseMatrix::identity(dim);
    let parts = mats
        .iter()
        .map(|a| a.lin_comb(&-num_rational::BigRational::one(), &id))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_kernel(&SparseMatrix::vstack(&parts)?).1)
}

fn adjacent_transpositions(degree: usize, points: usize) -> Vec<Perm> {
    (0..points.saturating_sub(1)).map(|i| Perm::transposition(degree, i, i + 1)).collect()
}

/// Outcome of the inclusion-map check on invariant lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaVerdict {
    pub l: u32,
    pub q: u32,
    pub source_invariants: usize,
    pub target_invariants: usize,
    /// Rank of `Σ_i θ_i γ` restricted to the source invariants.
    pub rank_on_invariants: usize,
    /// Whether the image is invariant under `S_{l+1}`.
    pub image_invariant: bool,
}

impl GammaVerdict {
    pub fn is_isomorphism(&self) -> bool {
        self.source_invariants == 1
            && self.target_invariants == 1
            && self.rank_on_invariants == 1
            && self.image_invariant
    }
}

/// Matrix of the inclusion `Λ^q(V ⊗ ρ_l(i)) → Λ^q(V ⊗ ρ_{l+1})`, points `0..=l`, `i` omitted.
pub fn gamma_matrix(l: u32, q: u32, i: usize) -> Result<SparseMatrix> {
    let k = l as usize + 1;
    if i >= k {
        bail!(InvalidArgument, "omitted point {} out of range 0..{}", i, k);
    }
    let src = StdExterior::new((0..k).filter(|&s| s != i).collect(), q as usize);
    let tgt = StdExterior::new((0..k).collect(), q as usize);
    Ok(src.map_matrix(&tgt, |g| SparseVec::from([(g, num_rational::BigRational::one())])))
}

/// Builds `γ_i` and checks that `Σ_i θ_i γ` maps the `S_l`-invariant line of
/// `Λ^q(V ⊗ ρ_l)` isomorphically onto the `S_{l+1}`-invariant line of `Λ^q(V ⊗ ρ_{l+1})`.
pub fn gamma_inclusion_invariants(l: u32, q: u32) -> Result<GammaVerdict> {
    if l == 0 || q % 2 == 1 || q > 2 * (l - 1) {
        bail!(InvalidArgument, "need even 0 ≤ q ≤ 2(l−1), got l={}, q={}", l, q);
    }
    if l > 5 {
        bail!(TooLarge, "inclusion check supports l ≤ 5, got {}", l);
    }
    let k = l as usize + 1;
    let last = k - 1;
    let src = StdExterior::new((0..last).collect(), q as usize);
    let tgt = StdExterior::new((0..k).collect(), q as usize);

    let src_mats: Vec<SparseMatrix> =
        adjacent_transpositions(k, last).iter().map(|g| src.map_matrix(&src, permute_vr(g, 1))).collect();
    let src_inv = fixed_space(&src_mats, src.dim())?;
    let tgt_mats: Vec<SparseMatrix> =
        adjacent_transpositions(k, k).iter().map(|g| tgt.map_matrix(&tgt, permute_vr(g, 1))).collect();
    let tgt_inv = fixed_space(&tgt_mats, tgt.dim())?;

    // θ_i is the transposition (i, last): it carries ρ_l(last) onto ρ_l(i); γ_i is then the inclusion.
    let mut summed = SparseMatrix::zeros(tgt.dim(), src.dim());
    for i in 0..k {
        let theta = Perm::transposition(k, i, last);
        let omit_i = StdExterior::new((0..k).filter(|&s| s != i).collect(), q as usize);
        let moved = src.map_matrix(&omit_i, permute_vr(&theta, 1));
        summed = summed.add(&gamma_matrix(l, q, i)?.compose(&moved)?)?;
    }
    let images: Vec<SparseVec> = src_inv.iter().map(|v| summed.apply(v)).collect();
    let rank_on_invariants = rank(&SparseMatrix::from_columns(tgt.dim(), images.clone()));
    let image_invariant = images.iter().all(|w| tgt_mats.iter().all(|a| a.apply(w) == *w));
    Ok(GammaVerdict {
        l,
        q,
        source_invariants: src_inv.len(),
        target_invariants: tgt_inv.len(),
        rank_on_invariants,
        image_invariant,
    })
}

/// `ω = Σ_i u e_i ∧ v e_i` raised to the `l`-th power, divided by `(l+1)!`, and projected to
/// `Λ^{2l}(V ⊗ ρ_k)`. Returns the projected element.
pub fn omega_power_projection(k: u32, l: u32) -> Result<ExtElem> {
    if l == 0 || l >= k {
        bail!(InvalidArgument, "need 1 ≤ l ≤ k−1, got k={}, l={}", k, l);
    }
    if k > 6 {
        bail!(TooLarge, "ω check supports k ≤ 6, got {}", k);
    }
    let k = k as usize;
    let mut omega = ExtElem::new();
    for i in 0..k {
        let term = exterior::wedge(&exterior::generator(vr_generator(0, i)), &exterior::generator(vr_generator(1, i)));
        exterior::add_assign(&mut omega, &term, &num_rational::BigRational::one());
    }
    let mut power = ExtElem::from([(0u64, num_rational::BigRational::one())]);
    for _ in 0..l {
        power = exterior::wedge(&power, &omega);
    }
    let fact = crate::perm::factorial(l + 1);
    let scale = num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(fact));
    for v in power.values_mut() {
        *v = &*v * &scale;
    }
    let proj = |g: usize| {
        let (s, c) = (g / 2, g % 2);
        let mut v = SparseVec::new();
        for j in 0..k {
            v.insert(vr_generator(c, j), -q_frac(1, k as i64));
        }
        let e = v.entry(vr_generator(c, s)).or_insert_with(num_rational::BigRational::zero);
        *e += num_rational::BigRational::one();
        v
    };
    Ok(apply_linear(&power, proj))
}

/// Whether the projected `ω^l` is nonzero, lies in `Λ^{2l}(V ⊗ ρ_k)` and is `S_k`-invariant.
pub fn omega_check(k: u32, l: u32) -> Result<bool> {
    let w = omega_power_projection(k, l)?;
    let space = StdExterior::new((0..k as usize).collect(), 2 * l as usize);
    let invariant = adjacent_transpositions(k as usize, k as usize)
        .iter()
        .all(|g| apply_linear(&w, permute_vr(g, 1)) == w);
    Ok(!w.is_empty() && space.contains(&w) && invariant)
}

/// Ordered set partition `S_0, …, S_h` of `{1..l}`; `S_0` carries the restricted factor
/// and may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedPartition {
    l: u32,
    blocks: Vec<Vec<u32>>,
}

impl MixedPartition {
    pub fn new(l: u32, blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = vec![false; l as usize];
        let mut blocks = blocks;
        for b in blocks.iter_mut() {
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > l {
                    bail!(InvalidArgument, "element {} outside 1..={}", x, l);
                }
                if core::mem::replace(&mut seen[x as usize - 1], true) {
                    bail!(InvalidArgument, "element {} occurs twice", x);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            bail!(InvalidArgument, "blocks do not cover 1..={}", l);
        }
        if blocks.is_empty() {
            bail!(InvalidArgument, "at least the block S_0 is required");
        }
        Ok(MixedPartition { l, blocks })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }
}

/// Data of the action of `τ` on a mixed multitor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedAction {
    pub image: MixedPartition,
    /// `σ_i(τ)`: the increasing bijection `τ(S_i) → S_i`, as pairs.
    pub sigmas: Vec<Vec<(u32, u32)>>,
    /// `β_i(τ) = σ_i(τ) ∘ τ|_{S_i}` on positions within `S_i`.
    pub betas: Vec<Perm>,
    /// `sgn(β_0(τ))`.
    pub sign: i32,
}

/// Action of `tau` (a permutation of `0..l`, point `x` standing for `x + 1`).
pub fn mixed_perm_action(partition: &MixedPartition, tau: &Perm) -> Result<MixedAction> {
    if tau.degree() != partition.l as usize {
        bail!(InvalidArgument, "permutation degree {} differs from l = {}", tau.degree(), partition.l);
    }
    let t = |x: u32| tau.apply(x as usize - 1) as u32 + 1;
    let mut image = Vec::with_capacity(partition.blocks.len());
    let mut sigmas = Vec::with_capacity(partition.blocks.len());
    let mut betas = Vec::with_capacity(partition.blocks.len());
    for b in &partition.blocks {
        let mut moved: Vec<u32> = b.iter().map(|&x| t(x)).collect();
        moved.sort_unstable();
        sigmas.push(moved.iter().copied().zip(b.iter().copied()).collect());
        let images = b.iter().map(|&x| moved.binary_search(&t(x)).expect("image in block")).collect();
        betas.push(Perm::from_images(images)?);
        image.push(moved);
    }
    let sign = betas[0].sign();
    Ok(MixedAction { image: MixedPartition { l: partition.l, blocks: image }, sigmas, betas, sign })
}

/// Checks `action(τ'τ) = action(τ') ∘ action(τ)` for every assignment of `{1..l}` to
/// at most `l` blocks and every pair of permutations.
pub fn verify_composition_law(l: u32) -> Result<()> {
    if l > 4 {
        bail!(TooLarge, "exhaustive composition check supports l ≤ 4, got {}", l);
    }
    let n = l as usize;
    let nblocks = n.max(1);
    let perms = all_perms(n);
    let total = nblocks.pow(l);
    for code in 0..total {
        let mut blocks = vec![Vec::new(); nblocks];
        let mut c = code;
        for x in 1..=l {
            blocks[c % nblocks].push(x);
            c /= nblocks;
        }
        let part = MixedPartition::new(l, blocks)?;
        for tau in &perms {
            let first = mixed_perm_action(&part, tau)?;
            for tau2 in &perms {
                let second = mixed_perm_action(&first.image, tau2)?;
                let both = mixed_perm_action(&part, &tau2.compose(tau))?;
                let composed: Vec<Perm> =
                    second.betas.iter().zip(first.betas.iter()).map(|(b2, b1)| b2.compose(b1)).collect();
                if both.image != second.image || both.betas != composed || both.sign != first.sign * second.sign {
                    bail!(Internal, "composition law fails for {:?}, {:?}, {:?}", part.blocks, tau, tau2);
                }
            }
        }
    }
    Ok(())
}

/// Sign `(−1)^{i_j · i_next}` relating the two natural actions on a spectral sequence term.
pub fn ss_sign_correction(i_j: i64, i_next: i64) -> i32 {
    if (i_j * i_next).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `Σ_q χ_{Λ^q(V ⊗ R_l)}(μ) s^q`, from `det(1 + sσ)² = ∏_cycles (1 − (−s)^c)²`.
pub fn regular_exterior_poly(mu: &CycleType) -> Vec<i128> {
    let mut p = vec![1i128];
    for &c in mu.parts() {
        for _ in 0..2 {
            let mut next = vec![0i128; p.len() + c as usize];
            let lead = if c % 2 == 0 { -1 } else { 1 };
            for (i, &a) in p.iter().enumerate() {
                next[i] += a;
                next[i + c as usize] += lead * a;
            }
            p = next;
        }
    }
    p
}

/// Checks `χ_{Λ^•(V ⊗ R_l)} = (1 + s)² · χ_{Λ^•(V ⊗ ρ_l)}` at every class of `S_l`.
pub fn virtual_factorization_holds(l: u32) -> Result<bool> {
    if l == 0 {
        bail!(InvalidArgument, "l must be positive");
    }
    for mu in partitions(l) {
        let std: Vec<i128> =
            (0..=2 * (l - 1)).map(|q| tor_character(l, q, &mu)).collect::<Result<_>>()?;
        let mut product = vec![0i128; std.len() + 2];
        for (i, &a) in std.iter().enumerate() {
            product[i] += a;
            product[i + 1] += 2 * a;
            product[i + 2] += a;
        }
        if product != regular_exterior_poly(&mu) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symrep::Partition;

    fn ct(parts: &[u32]) -> CycleType {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn character_examples() {
        assert_eq!(tor_character(2, 1, &ct(&[2])).unwrap(), -2);
        assert_eq!(tor_character(4, 3, &ct(&[1, 1, 1, 1])).unwrap(), 20);
        assert_eq!(tor_character(3, 0, &ct(&[3])).unwrap(), 1);
        assert_eq!(tor_character(3, 5, &ct(&[3])).unwrap(), 0);
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(tor_invariants(3, 2).unwrap(), 1);
        assert_eq!(tor_invariants(3, 3).unwrap(), 0);
        assert_eq!(tor_invariants(2, 4).unwrap(), 0);
        assert_eq!(invariant_line_label(4), "(Λ²V)^⊗2");
    }

    #[test]
    fn koszul_small() {
        assert_eq!((0..3).map(|q| koszul_tor_oracle(2, q, 2).unwrap()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(koszul_tor_oracle(1, 0, 1).unwrap(), 1);
        assert_eq!(koszul_tor_oracle(1, 1, 1).unwrap(), 0);
        assert!(koszul_tor_oracle(4, 0, 4).is_err());
        assert!(koszul_tor_oracle(2, 0, 1).is_err());
    }

    #[test]
    fn gamma_is_iso() {
        let v = gamma_inclusion_invariants(2, 2).unwrap();
        assert!(v.is_isomorphism(), "{:?}", v);
        let v = gamma_inclusion_invariants(1, 0).unwrap();
        assert!(v.is_isomorphism(), "{:?}", v);
    }

    #[test]
    fn omega_nonzero() {
        assert!(omega_check(3, 1).unwrap());
        assert!(omega_check(3, 2).unwrap());
    }

    #[test]
    fn mixed_examples() {
        let part = MixedPartition::new(4, vec![vec![1], vec![2, 3], vec![4]]).unwrap();
        let id = mixed_perm_action(&part, &Perm::identity(4)).unwrap();
        assert!(id.betas.iter().all(|b| b.is_identity()));
        assert_eq!(id.sign, 1);
        let swap = mixed_perm_action(&part, &Perm::transposition(4, 1, 2)).unwrap();
        assert_eq!(swap.betas[1], Perm::transposition(2, 0, 1));
        assert!(swap.betas[0].is_identity() && swap.betas[2].is_identity());
        let part = MixedPartition::new(3, vec![vec![1], vec![2], vec![3]]).unwrap();
        let ex = mixed_perm_action(&part, &Perm::transposition(3, 1, 2)).unwrap();
        assert_eq!(ex.sign, 1);
        assert!(ex.betas[0].is_identity());
        assert_eq!(ex.image.blocks(), &[vec![1], vec![3], vec![2]]);
    }

    #[test]
    fn sign_correction() {
        assert_eq!(ss_sign_correction(0, 7), 1);
        assert_eq!(ss_sign_correction(1, 1), -1);
        assert_eq!(ss_sign_correction(1, 2), 1);
        assert_eq!(ss_sign_correction(-1, 3), -1);
    }
}
