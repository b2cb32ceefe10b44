//! Partitions, conjugacy classes and characters of symmetric groups.
//!
//! Characters come from the Murnaghan–Nakayama rule on beta-sets. Character
//! tables are memoized per `m` behind a spin lock; a table is computed outside
//! the lock and the first stored copy wins, so concurrent first access is safe.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::perm::factorial;
use crate::Result;

/// Weakly decreasing positive parts. Doubles as a cycle type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

/// Conjugacy classes of `S_m` are labelled by partitions of `m`.
pub type CycleType = Partition;

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        parts.retain(|&p| p > 0);
        if parts.windows(2).any(|w| w[0] < w[1]) {
            bail!(InvalidArgument, "parts must be weakly decreasing: {:?}", parts);
        }
        Ok(Partition(parts))
    }

    /// Sorts the parts first.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sign of any permutation with this cycle type.
    pub fn sign(&self) -> i32 {
        if (self.weight() as usize - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Order of the centralizer: `∏ i^{m_i} m_i!`.
    pub fn z(&self) -> u128 {
        let mut mult: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.0 {
            *mult.entry(p).or_insert(0) += 1;
        }
        mult.iter().map(|(&i, &m)| (i as u128).pow(m) * factorial(m)).product()
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> u128 {
        factorial(self.weight()) / self.z()
    }

    /// Fixed points of `σ^j` for `σ` of this cycle type.
    pub fn fixed_points_of_power(&self, j: u32) -> u32 {
        self.0.iter().filter(|&&c| j.is_multiple_of(c)).sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

/// All partitions of `m`, in decreasing lexicographic order (`(m)` first).
pub fn partitions(m: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

fn mn_rec(beta: &mut Vec<u32>, hooks: &[u32]) -> i128 {
    let Some((&r, rest)) = hooks.split_first() else {
        return 1;
    };
    let mut total = 0;
    for idx in 0..beta.len() {
        let b = beta[idx];
        if b < r {
            continue;
        }
        let nb = b - r;
        if beta.contains(&nb) {
            continue;
        }
        let between = beta.iter().filter(|&&x| x > nb && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        beta[idx] = nb;
        total += sign * mn_rec(beta, rest);
        beta[idx] = b;
    }
    total
}

/// Value of the irreducible character `χ_λ` on the class `μ`.
pub fn character(lambda: &Partition, mu: &CycleType) -> Result<i128> {
    if lambda.weight() != mu.weight() {
        return Err(crate::Error::WeightMismatch { partition: lambda.weight(), class: mu.weight() });
    }
    let len = lambda.len() as u32;
    let mut beta: Vec<u32> = lambda.0.iter().enumerate().map(|(i, &l)| l + len - 1 - i as u32).collect();
    Ok(mn_rec(&mut beta, &mu.0))
}

/// Character table of `S_m`; rows are irreducibles, columns classes, both in
/// the order of [`partitions`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    pub m: u32,
    pub partitions: Vec<Partition>,
    pub values: Vec<Vec<i128>>,
}

impl CharacterTable {
    pub fn compute(m: u32) -> Result<Self> {
        if m > 16 {
            bail!(TooLarge, "character table of S_{}", m);
        }
        let parts = partitions(m);
        let mut values = Vec::with_capacity(parts.len());
        for l in &parts {
            let row = parts.iter().map(|mu| character(l, mu)).collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Ok(CharacterTable { m, partitions: parts, values })
    }

    pub fn value(&self, lambda: usize, class: usize) -> i128 {
        self.values[lambda][class]
    }
}

static TABLES: spin::Mutex<BTreeMap<u32, Arc<CharacterTable>>> = spin::Mutex::new(BTreeMap::new());

/// Memoized character table.
pub fn character_table(m: u32) -> Result<Arc<CharacterTable>> {
    if let Some(t) = TABLES.lock().get(&m) {
        return Ok(t.clone());
    }
    let fresh = Arc::new(CharacterTable::compute(m)?);
    let mut guard = TABLES.lock();
    Ok(guard.entry(m).or_insert(fresh).clone())
}

/// Dimension of the Schur functor `S_λ` applied to a space of dimension `dim`.
pub fn schur_dim(lambda: &Partition, dim: u32) -> u128 {
    if lambda.len() > dim as usize {
        return 0;
    }
    let mut l: Vec<i64> = lambda.0.iter().map(|&x| x as i64).collect();
    l.resize(dim as usize, 0);
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..dim as usize {
        for j in i + 1..dim as usize {
            num *= (l[i] - l[j] + (j - i) as i64) as u128;
            den *= (j - i) as u128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    num / den
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Power sums of the eigenvalues of `σ^j` on the standard representation
/// `ρ_k`: `fix(σ^j) − 1`.
pub fn std_rep_power_sums(k: u32, mu: &CycleType, j: u32) -> Result<i128> {
    if mu.weight() != k {
        return Err(crate::Error::WeightMismatch { partition: k, class: mu.weight() });
    }
    Ok(mu.fixed_points_of_power(j) as i128 - 1)
}

/// Elementary symmetric functions `e_0..=e_q` from power sums `p_1..=p_q`
/// (`p[0]` unused) via Newton's identities.
pub fn newton_elementary(p: &[i128], q: usize) -> Result<Vec<i128>> {
    let mut e = alloc::vec![0i128; q + 1];
    e[0] = 1;
    for n in 1..=q {
        let mut acc = 0i128;
        for i in 1..=n {
            let term = e[n - i] * p[i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        if acc % n as i128 != 0 {
            bail!(Internal, "Newton identity produced {}/{}", acc, n);
        }
        e[n] = acc / n as i128;
    }
    Ok(e)
}

/// Which one-dimensional character twists an invariant count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Twist {
    Trivial,
    Sign,
}

/// Character of `Λ^q(V ⊗ ρ_k)` with `dim V = 2` and trivial action on `V`.
pub fn ext_std_character(k: u32, q: u32, mu: &CycleType) -> Result<i128> {
    if mu.weight() != k {
        return Err(crate::Error::WeightMismatch { partition: k, class: mu.weight() });
    }
    let q = q as usize;
    let mut p = alloc::vec![0i128; q + 1];
    for (j, pj) in p.iter_mut().enumerate().skip(1) {
        *pj = 2 * std_rep_power_sums(k, mu, j as u32)?;
    }
    Ok(newton_elementary(&p, q)?[q])
}

/// `dim (Λ^q(V ⊗ ρ_k) ⊗ twist)^{S_k}` with `dim V = 2`.
pub fn ext_inv_dim(k: u32, q: u32, twist: Twist) -> Result<u64> {
    if k == 0 {
        bail!(InvalidArgument, "k must be positive");
    }
    if q as u64 > 2 * (k as u64 - 1) {
        return Ok(0);
    }
    rep_inv_dim(k, |mu| {
        let chi = ext_std_character(k, q, mu)?;
        Ok(match twist {
            Twist::Trivial => chi,
            Twist::Sign => chi * mu.sign() as i128,
        })
    })
}

/// `(1/m!) Σ_μ |C_μ| χ(μ)`; fails if the average is not an integer.
pub fn rep_inv_dim<F>(m: u32, chi: F) -> Result<u64>
where
    F: Fn(&CycleType) -> Result<i128>,
{
    let mut acc: i128 = 0;
    for mu in partitions(m) {
        acc += mu.class_size() as i128 * chi(&mu)?;
    }
    let order = factorial(m) as i128;
    if acc % order != 0 || acc < 0 {
        bail!(NonIntegral, "{}/{}", acc, order);
    }
    Ok((acc / order) as u64)
}

/// Multiplicity of the class function against the irreducible `λ`.
pub fn multiplicity<F>(lambda: &Partition, chi: F) -> Result<u64>
where
    F: Fn(&CycleType) -> Result<i128>,
{
    let m = lambda.weight();
    rep_inv_dim(m, |mu| Ok(character(lambda, mu)? * chi(mu)?))
}

/// Closed form for the trivial twist: 1 when `q = 2h`, `0 ≤ h ≤ k − 1`.
pub fn ext_inv_dim_trivial_closed(k: u32, q: u32) -> u64 {
    u64::from(q.is_multiple_of(2) && q / 2 < k)
}

/// Number of partitions of `m` (used for sanity checks).
pub fn partition_count(m: u32) -> usize {
    partitions(m).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn characters() {
        assert_eq!(character(&p(&[3]), &p(&[2, 1])).unwrap(), 1);
        assert_eq!(character(&p(&[1, 1, 1]), &p(&[2, 1])).unwrap(), -1);
        assert_eq!(character(&p(&[2, 1]), &p(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(character(&p(&[2, 1]), &p(&[3])).unwrap(), -1);
        assert!(matches!(character(&p(&[2]), &p(&[1, 1, 1])), Err(crate::Error::WeightMismatch { .. })));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..9).map(partition_count).collect();
        assert_eq!(counts, [1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(p(&[2, 1]).class_size(), 3);
        assert_eq!(p(&[2, 2]).class_size(), 3);
    }

    #[test]
    fn schur_dims() {
        assert_eq!(schur_dim(&p(&[2]), 2), 3);
        assert_eq!(schur_dim(&p(&[1, 1, 1]), 2), 0);
        assert_eq!(schur_dim(&p(&[3, 3]), 2), 1);
        assert_eq!(schur_dim(&p(&[2, 1]), 3), 8);
    }

    #[test]
    fn ext_invariants() {
        assert_eq!(ext_inv_dim(2, 1, Twist::Sign).unwrap(), 2);
        assert_eq!(ext_inv_dim(2, 1, Twist::Trivial).unwrap(), 0);
        for k in 1..=6 {
            let total: u64 = (0..=2 * k).map(|q| ext_inv_dim(k, q, Twist::Trivial).unwrap()).sum();
            assert_eq!(total, k as u64);
        }
    }

    #[test]
    fn memo_is_stable() {
        let a = character_table(5).unwrap();
        let b = character_table(5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
