//! Invariants of block-decomposed modules and of equivariant block maps, reduced
//! to one block per orbit, plus projector oracles over the full group.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::bail;
use crate::grading::GradedDim;
use crate::linalg::{axpy, q, rank, rank_kernel, SparseMatrix, SparseVec, Q};
use crate::perm::{Perm, PermGroup};
use crate::Result;

/// Largest group enumerated in full.
pub const GROUP_GUARD: usize = 5040;

/// A permutation group acting on an index set, known through its generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GAction {
    pub group: PermGroup,
    /// `gen_maps[g][i]`: image of index `i` under generator `g`.
    pub gen_maps: Vec<Vec<usize>>,
    pub order: u128,
    size: usize,
}

impl GAction {
    /// `size` is the number of indices; `gen_maps` may be empty for a trivial group.
    pub fn new(group: PermGroup, size: usize, gen_maps: Vec<Vec<usize>>, order: u128) -> Result<Self> {
        if gen_maps.len() != group.generators.len() {
            bail!(InvalidArgument, "{} index maps for {} generators", gen_maps.len(), group.generators.len());
        }
        for m in &gen_maps {
            if m.len() != size || Perm::from_images(m.clone()).is_err() {
                bail!(InvalidArgument, "generator index map is not a permutation of 0..{}", size);
            }
        }
        Ok(GAction { group, gen_maps, order, size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Orbits, each sorted, listed by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(i) = queue.pop_front() {
                orbit.push(i);
                for m in &self.gen_maps {
                    if !seen[m[i]] {
                        seen[m[i]] = true;
                        queue.push_back(m[i]);
                    }
                }
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// Orbit of `i0` with, for each member `j`, a group element sending `i0` to `j`.
    pub fn transversal(&self, i0: usize) -> BTreeMap<usize, Perm> {
        let mut out = BTreeMap::new();
        out.insert(i0, Perm::identity(self.group.degree));
        let mut queue = VecDeque::from([i0]);
        while let Some(j) = queue.pop_front() {
            let t = out[&j].clone();
            for (g, m) in self.gen_maps.iter().enumerate() {
                let k = m[j];
                if let alloc::collections::btree_map::Entry::Vacant(e) = out.entry(k) {
                    e.insert(self.group.generators[g].compose(&t));
                    queue.push_back(k);
                }
            }
        }
        out
    }

    /// `|G| / |orbit|`.
    pub fn stabilizer_order(&self, i: usize) -> u128 {
        self.order / self.transversal(i).len() as u128
    }

    /// Schreier generators of the stabilizer of `i0`, deduplicated, identity removed.
    pub fn stabilizer_generators(&self, i0: usize) -> Vec<Perm> {
        let trans = self.transversal(i0);
        let mut out = BTreeSet::new();
        for (&j, t) in &trans {
            for (g, m) in self.gen_maps.iter().enumerate() {
                let s = &self.group.generators[g];
                let x = trans[&m[j]].inverse().compose(&s.compose(t));
                if !x.is_identity() {
                    out.insert(x);
                }
            }
        }
        out.into_iter().collect()
    }
}

/// A module `M = ⊕ M_i` with a compatible group action.
pub trait BlockAction {
    fn action(&self) -> &GAction;
    fn block_dim(&self, i: usize) -> usize;
    /// Image of index `i` under an arbitrary group element.
    fn image(&self, g: &Perm, i: usize) -> Result<usize>;
    /// The block map `M_i → M_{g(i)}`.
    fn act(&self, g: &Perm, i: usize) -> Result<SparseMatrix>;
    /// Weight of basis vector `b` of block `i`; the action must preserve it.
    fn weight(&self, _i: usize, _b: usize) -> i32 {
        0
    }
}

/// Block maps stored for every group element, built by closure from generators.
#[derive(Debug, Clone)]
pub struct BlockModule {
    action: GAction,
    dims: Vec<usize>,
    elements: BTreeMap<Perm, (Vec<usize>, Vec<SparseMatrix>)>,
}

impl BlockModule {
    /// `gen_blocks[g][i]` is the map `M_i → M_{g(i)}` for generator `g`.
    /// Fails if two words for the same group element give different maps.
    pub fn new(group: PermGroup, dims: Vec<usize>, gen_maps: Vec<Vec<usize>>, gen_blocks: Vec<Vec<SparseMatrix>>) -> Result<Self> {
        let n = dims.len();
        if gen_blocks.len() != group.generators.len() {
            bail!(InvalidArgument, "block maps for {} generators, expected {}", gen_blocks.len(), group.generators.len());
        }
        for (g, blocks) in gen_blocks.iter().enumerate() {
            if blocks.len() != n || gen_maps[g].len() != n {
                bail!(InvalidArgument, "generator {} does not cover all {} blocks", g, n);
            }
            for (i, b) in blocks.iter().enumerate() {
                let j = gen_maps[g][i];
                if b.cols != dims[i] || b.rows != dims[j] {
                    bail!(InvalidArgument, "block map of generator {} at {} has shape {}x{}", g, i, b.rows, b.cols);
                }
            }
        }
        let id = Perm::identity(group.degree);
        let mut elements = BTreeMap::new();
        elements.insert(id.clone(), ((0..n).collect::<Vec<_>>(), dims.iter().map(|&d| SparseMatrix::identity(d)).collect::<Vec<_>>()));
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            let (map_x, blocks_x) = elements[&x].clone();
            for (g, s) in group.generators.iter().enumerate() {
                let y = s.compose(&x);
                let map_y: Vec<usize> = map_x.iter().map(|&i| gen_maps[g][i]).collect();
                let blocks_y = (0..n)
                    .map(|i| gen_blocks[g][map_x[i]].compose(&blocks_x[i]))
                    .collect::<Result<Vec<_>>>()?;
                match elements.get(&y) {
                    Some((m, b)) => {
                        if *m != map_y || *b != blocks_y {
                            bail!(Incompatible, "two words for {:?} act differently", y.0);
                        }
                    }
                    None => {
                        if elements.len() >= GROUP_GUARD {
                            bail!(TooLarge, "group exceeds {} elements", GROUP_GUARD);
                        }
                        elements.insert(y.clone(), (map_y, blocks_y));
                        queue.push_back(y);
                    }
                }
            }
        }
        let order = elements.len() as u128;
        let action = GAction::new(group, n, gen_maps, order)?;
        Ok(BlockModule { action, dims, elements })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn elements(&self) -> impl Iterator<Item = &Perm> {
        self.elements.keys()
    }
}

impl BlockAction for BlockModule {
    fn action(&self) -> &GAction {
        &self.action
    }

    fn block_dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    fn image(&self, g: &Perm, i: usize) -> Result<usize> {
        match self.elements.get(g) {
            Some((m, _)) => Ok(m[i]),
            None => bail!(InvalidArgument, "{:?} is not in the group", g.0),
        }
    }

    fn act(&self, g: &Perm, i: usize) -> Result<SparseMatrix> {
        match self.elements.get(g) {
            Some((_, b)) => Ok(b[i].clone()),
            None => bail!(InvalidArgument, "{:?} is not in the group", g.0),
        }
    }
}

/// Basis of a fixed subspace in reduced form: `vectors[a][pivots[b]] = δ_ab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantBasis {
    pub vectors: Vec<SparseVec>,
    pub pivots: Vec<usize>,
    pub weights: Vec<i32>,
}

impl InvariantBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coordinates of a vector known to lie in the span.
    pub fn coordinates(&self, w: &SparseVec) -> Vec<Q> {
        self.pivots.iter().map(|p| w.get(p).cloned().unwrap_or_else(Q::zero)).collect()
    }

    pub fn graded_dim(&self) -> GradedDim {
        GradedDim::from_pairs(self.weights.iter().map(|&w| (w, 1)))
    }
}

/// Fixed vectors of block `i` under the given elements, which must fix `i`.
pub fn fixed_basis<M: BlockAction + ?Sized>(m: &M, i: usize, elements: &[Perm]) -> Result<InvariantBasis> {
    let dim = m.block_dim(i);
    let mut mats = Vec::with_capacity(elements.len());
    for g in elements {
        if m.image(g, i)? != i {
            bail!(InvalidArgument, "element does not fix block {}", i);
        }
        mats.push(m.act(g, i)?);
    }
    if mats.iter().all(|a| a.is_signed_permutation()) {
        return Ok(monomial_fixed(dim, &mats, |b| m.weight(i, b)));
    }
    let mut by_weight: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for b in 0..dim {
        by_weight.entry(m.weight(i, b)).or_default().push(b);
    }
    let mut out = InvariantBasis { vectors: Vec::new(), pivots: Vec::new(), weights: Vec::new() };
    for (w, idx) in by_weight {
        let local: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let mut parts = Vec::new();
        for a in &mats {
            let mut d = SparseMatrix::zeros(idx.len(), idx.len());
            for (k, &b) in idx.iter().enumerate() {
                let mut col = SparseVec::new();
                for (r, x) in &a.columns[b] {
                    match local.get(r) {
                        Some(&rr) => {
                            col.insert(rr, x.clone());
                        }
                        None => bail!(Incompatible, "action does not preserve weight {}", w),
                    }
                }
                axpy(&mut col, &-Q::one(), &SparseVec::from([(k, Q::one())]));
                d.columns[k] = col;
            }
            parts.push(d);
        }
        let kernel = if parts.is_empty() {
            (0..idx.len()).map(|k| SparseVec::from([(k, Q::one())])).collect()
        } else {
            rank_kernel(&SparseMatrix::vstack(&parts)?).1
        };
        for v in kernel {
            let pivot = pivot_of_kernel_vector(&v);
            out.vectors.push(v.into_iter().map(|(k, x)| (idx[k], x)).collect());
            out.pivots.push(idx[pivot]);
            out.weights.push(w);
        }
    }
    Ok(out)
}

/// A kernel vector from [`rank_kernel`] is 1 at its free column and nonzero
/// elsewhere only at pivot columns to the left of it.
fn pivot_of_kernel_vector(v: &SparseVec) -> usize {
    *v.keys().next_back().expect("kernel vectors are nonzero")
}

/// Orbit sums for signed permutation actions; orbits on which some element acts
/// by −1 on a basis line contribute nothing.
fn monomial_fixed<W: Fn(usize) -> i32>(dim: usize, mats: &[SparseMatrix], weight: W) -> InvariantBasis {
    let mut sign: Vec<Option<bool>> = alloc::vec![None; dim];
    let mut out = InvariantBasis { vectors: Vec::new(), pivots: Vec::new(), weights: Vec::new() };
    for s in 0..dim {
        if sign[s].is_some() {
            continue;
        }
        sign[s] = Some(true);
        let mut members = alloc::vec![s];
        let mut queue = VecDeque::from([s]);
        let mut consistent = true;
        while let Some(b) = queue.pop_front() {
            let sb = sign[b].unwrap();
            for a in mats {
                let (&c, x) = a.columns[b].iter().next().unwrap();
                let sc = if x.is_one() { sb } else { !sb };
                match sign[c] {
                    Some(prev) => {
                        if prev != sc {
                            consistent = false;
                        }
                    }
                    None => {
                        sign[c] = Some(sc);
                        members.push(c);
                        queue.push_back(c);
                    }
                }
            }
        }
        if consistent {
            let v: SparseVec = members.iter().map(|&b| (b, if sign[b].unwrap() { Q::one() } else { -Q::one() })).collect();
            out.vectors.push(v);
            out.pivots.push(s);
            out.weights.push(weight(s));
        }
    }
    out
}

/// Invariants of `M_{i0}` under the stabilizer of `i0`.
pub fn stabilizer_invariants<M: BlockAction + ?Sized>(m: &M, i0: usize) -> Result<InvariantBasis> {
    let gens = m.action().stabilizer_generators(i0);
    fixed_basis(m, i0, &gens)
}

/// `dim M^G` as `Σ_orbits dim M_{i0}^{Stab(i0)}`, graded by weight.
pub fn invariants_danila<M: BlockAction + ?Sized>(m: &M) -> Result<GradedDim> {
    let mut out = GradedDim::zero();
    for orbit in m.action().orbits() {
        out = out.sum(&stabilizer_invariants(m, orbit[0])?.graded_dim());
    }
    Ok(out)
}

/// Number of group elements fixing index `i`, by enumeration.
pub fn stabilizer_order_enumerated<M: BlockAction + ?Sized>(m: &M, i: usize) -> Result<usize> {
    let elems = m.action().group.elements(GROUP_GUARD)?;
    let mut count = 0;
    for g in &elems {
        if m.image(g, i)? == i {
            count += 1;
        }
    }
    Ok(count)
}

/// `dim M^G` as the rank of `(1/|G|) Σ_g g` on the whole of `M`.
///
/// When every generator acts by a signed permutation of the global basis, the
/// projector is evaluated orbit by orbit on basis vectors (a basis vector's
/// image is zero exactly when some element returns it with sign −1); otherwise
/// the projector matrix is assembled from the full element list.
pub fn invariants_direct<M: BlockAction + ?Sized>(m: &M) -> Result<GradedDim> {
    let act = m.action();
    let n = act.size();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0usize);
    for i in 0..n {
        offsets.push(offsets[i] + m.block_dim(i));
    }
    let total = offsets[n];
    let global_of = |block: usize, b: usize| offsets[block] + b;
    let mut gen_globals = Vec::new();
    let mut monomial = true;
    for g in &act.group.generators {
        let mut cols = alloc::vec![SparseVec::new(); total];
        for i in 0..n {
            let j = m.image(g, i)?;
            let a = m.act(g, i)?;
            if !a.is_signed_permutation() {
                monomial = false;
            }
            for (b, col) in a.columns.iter().enumerate() {
                cols[global_of(i, b)] = col.iter().map(|(&r, x)| (global_of(j, r), x.clone())).collect();
            }
        }
        gen_globals.push(SparseMatrix::from_columns(total, cols));
    }
    let block_of = |gidx: usize| {
        let i = offsets.partition_point(|&o| o <= gidx) - 1;
        (i, gidx - offsets[i])
    };
    if monomial {
        let fixed = monomial_fixed(total, &gen_globals, |gidx| {
            let (i, b) = block_of(gidx);
            m.weight(i, b)
        });
        return Ok(fixed.graded_dim());
    }
    let elems = act.group.elements(GROUP_GUARD)?;
    let inv_order = Q::one() / q(elems.len() as i64);
    let mut by_weight: BTreeMap<i32, Vec<SparseVec>> = BTreeMap::new();
    for i in 0..n {
        let mut images: Vec<(usize, SparseMatrix)> = Vec::with_capacity(elems.len());
        for g in &elems {
            images.push((m.image(g, i)?, m.act(g, i)?));
        }
        for b in 0..m.block_dim(i) {
            let mut col = SparseVec::new();
            for (j, a) in &images {
                let shifted: SparseVec = a.columns[b].iter().map(|(&r, x)| (global_of(*j, r), x.clone())).collect();
                axpy(&mut col, &inv_order, &shifted);
            }
            by_weight.entry(m.weight(i, b)).or_default().push(col);
        }
    }
    let mut out = GradedDim::zero();
    for (w, cols) in by_weight {
        let r = rank(&SparseMatrix::from_columns(total, cols));
        out.add_at(w, r as u64);
    }
    Ok(out)
}

/// Block components `f_{i,j}: M_i → N_j` of a map between block modules.
pub trait BlockMorphism {
    /// Target indices `j` with `f_{i,j}` possibly nonzero.
    fn targets(&self, i: usize) -> Vec<usize>;
    fn block(&self, i: usize, j: usize) -> Result<SparseMatrix>;
}

/// Explicitly stored block components.
#[derive(Debug, Clone, Default)]
pub struct StoredMorphism {
    pub blocks: BTreeMap<(usize, usize), SparseMatrix>,
}

impl BlockMorphism for StoredMorphism {
    fn targets(&self, i: usize) -> Vec<usize> {
        self.blocks.range((i, 0)..(i + 1, 0)).map(|(&(_, j), _)| j).collect()
    }

    fn block(&self, i: usize, j: usize) -> Result<SparseMatrix> {
        match self.blocks.get(&(i, j)) {
            Some(b) => Ok(b.clone()),
            None => bail!(InvalidArgument, "no block ({}, {})", i, j),
        }
    }
}

/// Checks `f_{g(i),g(j)} ∘ g = g ∘ f_{i,j}` for every generator, and that the
/// support of `f` is carried to itself.
pub fn check_equivariance<M, N, F>(src: &M, tgt: &N, f: &F) -> Result<()>
where
    M: BlockAction + ?Sized,
    N: BlockAction + ?Sized,
    F: BlockMorphism + ?Sized,
{
    let gens = &src.action().group.generators;
    if *gens != tgt.action().group.generators {
        bail!(InvalidArgument, "source and target use different generators");
    }
    for g in gens {
        for i in 0..src.action().size() {
            let gi = src.image(g, i)?;
            let mut moved: BTreeSet<usize> = BTreeSet::new();
            let a = src.act(g, i)?;
            for j in f.targets(i) {
                let gj = tgt.image(g, j)?;
                moved.insert(gj);
                let lhs = f.block(gi, gj)?.compose(&a)?;
                let rhs = tgt.act(g, j)?.compose(&f.block(i, j)?)?;
                if lhs != rhs {
                    bail!(NotEquivariant, "generator {:?} on block pair ({}, {})", g.0, i, j);
                }
            }
            let actual: BTreeSet<usize> = f.targets(gi).into_iter().collect();
            for j in actual.difference(&moved) {
                if !f.block(gi, *j)?.is_zero() {
                    bail!(NotEquivariant, "block ({}, {}) has no preimage under {:?}", gi, j, g.0);
                }
            }
        }
    }
    Ok(())
}

/// Matrix of `f^G` in the stabilizer-invariant bases of the orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantMap {
    pub matrix: SparseMatrix,
    /// Representative and invariant basis for every source orbit, in column order.
    pub source: Vec<(usize, InvariantBasis)>,
    /// Same for target orbits, in row order.
    pub target: Vec<(usize, InvariantBasis)>,
}

impl InvariantMap {
    pub fn rank(&self) -> usize {
        rank(&self.matrix)
    }
}

fn orbit_bases<M: BlockAction + ?Sized>(m: &M) -> Result<Vec<(usize, InvariantBasis)>> {
    m.action()
        .orbits()
        .into_iter()
        .map(|o| Ok((o[0], stabilizer_invariants(m, o[0])?)))
        .collect()
}

/// `f^G(u) = Σ_{[g] ∈ G/Stab(i0)} f_{g(i0), j0}(g u)` for every orbit pair.
pub fn morphism_invariants<M, N, F>(src: &M, tgt: &N, f: &F) -> Result<InvariantMap>
where
    M: BlockAction + ?Sized,
    N: BlockAction + ?Sized,
    F: BlockMorphism + ?Sized,
{
    check_equivariance(src, tgt, f)?;
    let source = orbit_bases(src)?;
    let target = orbit_bases(tgt)?;
    let mut row_offset = BTreeMap::new();
    let mut rows = 0;
    for (j0, basis) in &target {
        row_offset.insert(*j0, rows);
        rows += basis.len();
    }
    let mut columns = Vec::new();
    for (i0, basis) in &source {
        let trans = src.action().transversal(*i0);
        // only cosets whose block maps into a representative contribute
        let mut contributions: Vec<(usize, usize, Perm)> = Vec::new();
        for (&i, t) in &trans {
            for j in f.targets(i) {
                if row_offset.contains_key(&j) {
                    contributions.push((i, j, t.clone()));
                }
            }
        }
        for u in &basis.vectors {
            let mut images: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for (i, j, t) in &contributions {
                let gu = src.act(t, *i0)?.apply(u);
                let fu = f.block(*i, *j)?.apply(&gu);
                axpy(images.entry(*j).or_default(), &Q::one(), &fu);
            }
            let mut col = SparseVec::new();
            for (j0, tb) in &target {
                if let Some(w) = images.get(j0) {
                    for (k, c) in tb.coordinates(w).into_iter().enumerate() {
                        if !c.is_zero() {
                            col.insert(row_offset[j0] + k, c);
                        }
                    }
                }
            }
            columns.push(col);
        }
    }
    Ok(InvariantMap { matrix: SparseMatrix::from_columns(rows, columns), source, target })
}

/// Oracle for [`morphism_invariants`]: each source invariant is spread over the
/// whole module by averaging over every group element, pushed through every
/// block of `f`, and the image is checked to be invariant before reading off
/// coordinates at the target representatives.
pub fn morphism_invariants_full<M, N, F>(src: &M, tgt: &N, f: &F) -> Result<SparseMatrix>
where
    M: BlockAction + ?Sized,
    N: BlockAction + ?Sized,
    F: BlockMorphism + ?Sized,
{
    let elems = src.action().group.elements(GROUP_GUARD)?;
    let source = orbit_bases(src)?;
    let target = orbit_bases(tgt)?;
    let mut row_offset = BTreeMap::new();
    let mut rows = 0;
    for (j0, basis) in &target {
        row_offset.insert(*j0, rows);
        rows += basis.len();
    }
    let mut columns = Vec::new();
    for (i0, basis) in &source {
        let stab = elems.iter().filter(|g| src.image(g, *i0).ok() == Some(*i0)).count();
        let scale = Q::one() / q(stab as i64);
        for u in &basis.vectors {
            let mut spread: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for g in &elems {
                let i = src.image(g, *i0)?;
                axpy(spread.entry(i).or_default(), &scale, &src.act(g, *i0)?.apply(u));
            }
            let mut image: BTreeMap<usize, SparseVec> = BTreeMap::new();
            for (i, v) in &spread {
                for j in f.targets(*i) {
                    axpy(image.entry(j).or_default(), &Q::one(), &f.block(*i, j)?.apply(v));
                }
            }
            image.retain(|_, v| !v.is_empty());
            for g in &tgt.action().group.generators {
                for (j, v) in &image {
                    let gj = tgt.image(g, *j)?;
                    let moved = tgt.act(g, *j)?.apply(v);
                    if image.get(&gj).cloned().unwrap_or_default() != moved {
                        bail!(Internal, "image of an invariant is not invariant");
                    }
                }
            }
            let mut col = SparseVec::new();
            for (j0, tb) in &target {
                if let Some(w) = image.get(j0) {
                    for (k, c) in tb.coordinates(w).into_iter().enumerate() {
                        if !c.is_zero() {
                            col.insert(row_offset[j0] + k, c);
                        }
                    }
                }
            }
            columns.push(col);
        }
    }
    Ok(SparseMatrix::from_columns(rows, columns))
}

/// Transversal of `i0` under the subgroup generated by `gens`.
fn sub_transversal<M: BlockAction + ?Sized>(m: &M, gens: &[Perm], i0: usize) -> Result<BTreeMap<usize, Perm>> {
    let mut out = BTreeMap::new();
    out.insert(i0, Perm::identity(m.action().group.degree));
    let mut queue = VecDeque::from([i0]);
    while let Some(j) = queue.pop_front() {
        let t = out[&j].clone();
        for s in gens {
            let k = m.image(s, j)?;
            if let alloc::collections::btree_map::Entry::Vacant(e) = out.entry(k) {
                e.insert(s.compose(&t));
                queue.push_back(k);
            }
        }
    }
    Ok(out)
}

/// `f^G` on a single orbit pair via a product decomposition `Stab(j0) = P × Q`:
/// the result is `|Q| · f̃^P` with `f̃^P(u) = Σ_{[g] ∈ P/Stab(i0)} f_{g(i0), j0}(g u)`.
/// Columns follow the invariant basis of `M_{i0}`, rows that of `N_{j0}`.
#[allow(clippy::too_many_arguments)]
pub fn morphism_invariants_factored<M, N, F>(
    src: &M,
    tgt: &N,
    f: &F,
    i0: usize,
    j0: usize,
    p: &PermGroup,
    qg: &PermGroup,
) -> Result<SparseMatrix>
where
    M: BlockAction + ?Sized,
    N: BlockAction + ?Sized,
    F: BlockMorphism + ?Sized,
{
    check_equivariance(src, tgt, f)?;
    let p_elems = p.elements(GROUP_GUARD)?;
    let q_elems = qg.elements(GROUP_GUARD)?;
    // direct product
    for g in p.generators.iter().chain(qg.generators.iter()) {
        if tgt.image(g, j0)? != j0 {
            bail!(Hypothesis, "direct product: generator {:?} does not fix j0", g.0);
        }
    }
    for a in &p.generators {
        for b in &qg.generators {
            if a.compose(b) != b.compose(a) {
                bail!(Hypothesis, "direct product: P and Q do not commute");
            }
        }
    }
    let p_set: BTreeSet<&Perm> = p_elems.iter().collect();
    if q_elems.iter().any(|x| !x.is_identity() && p_set.contains(x)) {
        bail!(Hypothesis, "direct product: P and Q intersect");
    }
    let stab_j0 = tgt.action().stabilizer_order(j0);
    if (p_elems.len() * q_elems.len()) as u128 != stab_j0 {
        bail!(Hypothesis, "direct product: |P||Q| = {} but |Stab(j0)| = {}", p_elems.len() * q_elems.len(), stab_j0);
    }
    // Q trivial on N_{j0}
    for g in &qg.generators {
        if tgt.act(g, j0)? != SparseMatrix::identity(tgt.block_dim(j0)) {
            bail!(Hypothesis, "Q acts nontrivially on N_j0");
        }
    }
    // support of f inside Stab(j0)/Stab(i0)
    let mut stab_gens = p.generators.clone();
    stab_gens.extend(qg.generators.iter().cloned());
    let local = sub_transversal(src, &stab_gens, i0)?;
    for i in src.action().transversal(i0).keys() {
        if f.targets(*i).contains(&j0) && !local.contains_key(i) && !f.block(*i, j0)?.is_zero() {
            bail!(Hypothesis, "support: f_(g(i0), j0) is nonzero for g outside Stab(j0)");
        }
    }
    // invariants of Stab(i0) ∩ Stab(j0) equal those of Stab(i0)
    let full = stabilizer_invariants(src, i0)?;
    let mut inter = Vec::new();
    for a in &p_elems {
        for b in &q_elems {
            let g = a.compose(b);
            if src.image(&g, i0)? == i0 && !g.is_identity() {
                inter.push(g);
            }
        }
    }
    let partial = fixed_basis(src, i0, &inter)?;
    if partial.len() != full.len() {
        bail!(Hypothesis, "invariants: Stab(i0) ∩ Stab(j0) has {} invariants, Stab(i0) has {}", partial.len(), full.len());
    }
    let target = stabilizer_invariants(tgt, j0)?;
    let q_order = q(q_elems.len() as i64);
    let trans_p = sub_transversal(src, &p.generators, i0)?;
    let mut columns = Vec::new();
    for u in &full.vectors {
        let mut w = SparseVec::new();
        for (&i, g) in &trans_p {
            if f.targets(i).contains(&j0) {
                let gu = src.act(g, i0)?.apply(u);
                axpy(&mut w, &q_order, &f.block(i, j0)?.apply(&gu));
            }
        }
        let col: SparseVec = target
            .coordinates(&w)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        columns.push(col);
    }
    Ok(SparseMatrix::from_columns(target.len(), columns))
}

/// Orbit-pair block of an [`InvariantMap`].
pub fn invariant_block(map: &InvariantMap, i0: usize, j0: usize) -> Result<SparseMatrix> {
    let mut col0 = 0;
    let mut cols = None;
    for (i, b) in &map.source {
        if *i == i0 {
            cols = Some(col0..col0 + b.len());
        }
        col0 += b.len();
    }
    let mut row0 = 0;
    let mut rows = None;
    for (j, b) in &map.target {
        if *j == j0 {
            rows = Some(row0..row0 + b.len());
        }
        row0 += b.len();
    }
    let (Some(cols), Some(rows)) = (cols, rows) else {
        bail!(InvalidArgument, "{} or {} is not an orbit representative", i0, j0);
    };
    let mut out = SparseMatrix::zeros(rows.len(), cols.len());
    for (c, j) in cols.enumerate() {
        for (&r, x) in &map.matrix.columns[j] {
            if rows.contains(&r) {
                out.columns[c].insert(r - rows.start, x.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm_rep_s3() -> BlockModule {
        // one block per point, each 1-dimensional, permuted without signs
        let g = PermGroup::symmetric(3);
        let maps: Vec<Vec<usize>> = g.generators.iter().map(|p| p.0.clone()).collect();
        let blocks = g.generators.iter().map(|_| (0..3).map(|_| SparseMatrix::identity(1)).collect()).collect();
        BlockModule::new(g, alloc::vec![1, 1, 1], maps, blocks).unwrap()
    }

    #[test]
    fn permutation_rep_has_one_invariant() {
        let m = perm_rep_s3();
        assert_eq!(invariants_danila(&m).unwrap().total(), 1);
        assert_eq!(invariants_direct(&m).unwrap().total(), 1);
        assert_eq!(m.action().stabilizer_order(0), 2);
        assert_eq!(stabilizer_order_enumerated(&m, 0).unwrap(), 2);
    }

    #[test]
    fn sign_of_s2_kills_invariants() {
        let g = PermGroup::symmetric(2);
        let minus = SparseMatrix::identity(1).scale(&-Q::one());
        let m = BlockModule::new(g, alloc::vec![1], alloc::vec![alloc::vec![0]], alloc::vec![alloc::vec![minus]]).unwrap();
        assert!(invariants_danila(&m).unwrap().is_zero());
        assert!(invariants_direct(&m).unwrap().is_zero());
    }

    #[test]
    fn inconsistent_blocks_are_rejected() {
        // a transposition acting by a non-involution
        let g = PermGroup::symmetric(2);
        let two = SparseMatrix::identity(1).scale(&q(2));
        assert!(BlockModule::new(g, alloc::vec![1], alloc::vec![alloc::vec![0]], alloc::vec![alloc::vec![two]]).is_err());
    }

    #[test]
    fn identity_morphism_is_identity_on_invariants() {
        let m = perm_rep_s3();
        let mut f = StoredMorphism::default();
        for i in 0..3 {
            f.blocks.insert((i, i), SparseMatrix::identity(1));
        }
        let map = morphism_invariants(&m, &m, &f).unwrap();
        assert_eq!(map.matrix, SparseMatrix::identity(1));
        assert_eq!(morphism_invariants_full(&m, &m, &f).unwrap(), map.matrix);
    }
}
