//! Finite graded dimensions, Koszul signs, and graded symmetric/exterior powers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::error::bail;
use crate::perm::{binomial, factorial, Perm};
use crate::symrep::partitions;
use crate::Result;

/// Dimension per cohomological degree. Zero entries are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedDim(BTreeMap<i32, u64>);

/// Laurent polynomial in one variable with signed coefficients.
pub(crate) type LaurentPoly = BTreeMap<i32, i128>;

impl GradedDim {
    pub fn zero() -> Self {
        GradedDim(BTreeMap::new())
    }

    /// Dimension `dim` concentrated in `degree`.
    pub fn single(degree: i32, dim: u64) -> Self {
        let mut g = Self::zero();
        g.add_at(degree, dim);
        g
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, u64)>>(pairs: I) -> Self {
        let mut g = Self::zero();
        for (d, m) in pairs {
            g.add_at(d, m);
        }
        g
    }

    pub fn add_at(&mut self, degree: i32, dim: u64) {
        if dim == 0 {
            return;
        }
        *self.0.entry(degree).or_insert(0) += dim;
    }

    pub fn get(&self, degree: i32) -> u64 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, u64)> + '_ {
        self.0.iter().map(|(&d, &m)| (d, m))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    /// Alternating sum of the dimensions.
    pub fn euler(&self) -> i64 {
        self.iter()
            .map(|(d, m)| if d.rem_euclid(2) == 0 { m as i64 } else { -(m as i64) })
            .sum()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.0.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.0.keys().next_back().copied()
    }

    /// Direct sum.
    pub fn sum(&self, other: &GradedDim) -> GradedDim {
        let mut out = self.clone();
        for (d, m) in other.iter() {
            out.add_at(d, m);
        }
        out
    }

    /// Degree-wise difference; fails if some degree would go negative.
    pub fn checked_sub(&self, other: &GradedDim) -> Result<GradedDim> {
        let mut out = self.clone();
        for (d, m) in other.iter() {
            let have = out.get(d);
            if have < m {
                bail!(Internal, "negative dimension in degree {}: {} - {}", d, have, m);
            }
            if have == m {
                out.0.remove(&d);
            } else {
                out.0.insert(d, have - m);
            }
        }
        Ok(out)
    }

    /// Graded tensor product: convolution of the dimension sequences.
    pub fn tensor(&self, other: &GradedDim) -> GradedDim {
        let mut out = GradedDim::zero();
        for (a, x) in self.iter() {
            for (b, y) in other.iter() {
                out.add_at(a + b, x * y);
            }
        }
        out
    }

    /// Every degree moved by `k`. No sign or parity change is attached.
    pub fn shift(&self, k: i32) -> GradedDim {
        GradedDim(self.0.iter().map(|(&d, &m)| (d + k, m)).collect())
    }

    /// Degrees multiplied by `f`.
    pub fn scale_degrees(&self, f: i32) -> GradedDim {
        GradedDim::from_pairs(self.iter().map(|(d, m)| (d * f, m)))
    }

    /// Degrees divided by `f`; every degree must be divisible.
    pub fn unscale_degrees(&self, f: i32) -> Result<GradedDim> {
        let mut out = GradedDim::zero();
        for (d, m) in self.iter() {
            if d % f != 0 {
                bail!(InvalidArgument, "degree {} not divisible by {}", d, f);
            }
            out.add_at(d / f, m);
        }
        Ok(out)
    }

    pub(crate) fn from_poly(p: &LaurentPoly) -> Result<GradedDim> {
        let mut out = GradedDim::zero();
        for (&d, &c) in p {
            if c < 0 {
                bail!(Internal, "negative coefficient {} in degree {}", c, d);
            }
            out.add_at(d, u64::try_from(c).map_err(|_| crate::Error::TooLarge(alloc::format!("{}", c)))?);
        }
        Ok(out)
    }
}

impl fmt::Display for GradedDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (d, m)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", d, m)?;
        }
        write!(f, "}}")
    }
}

fn is_odd(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

/// Sign picked up when the factor in position `i` of a graded tensor is moved
/// to position `sigma(i)`: one factor of `(-1)^{p_i p_j}` for each inverted pair.
///
/// Satisfies `koszul_sign(σ∘τ, p) = koszul_sign(σ, τ·p) · koszul_sign(τ, p)` where
/// `(τ·p)[τ(i)] = p[i]`.
pub fn koszul_sign(sigma: &Perm, degrees: &[i32]) -> Result<i32> {
    if sigma.degree() != degrees.len() {
        bail!(InvalidArgument, "permutation on {} points, {} degrees", sigma.degree(), degrees.len());
    }
    let mut s = 1;
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            if sigma.apply(i) > sigma.apply(j) && is_odd(degrees[i]) && is_odd(degrees[j]) {
                s = -s;
            }
        }
    }
    Ok(s)
}

/// Degrees after moving position `i` to `sigma(i)`.
pub fn permute_degrees(sigma: &Perm, degrees: &[i32]) -> Vec<i32> {
    let mut out = alloc::vec![0; degrees.len()];
    for (i, &d) in degrees.iter().enumerate() {
        out[sigma.apply(i)] = d;
    }
    out
}

fn overflow() -> crate::Error {
    crate::Error::TooLarge(alloc::string::String::from("coefficient overflow"))
}

/// Truncated bivariate series in `s` (index) and `t` (Laurent map).
fn power_series(v: &GradedDim, m: u32, symmetric: bool) -> Result<GradedDim> {
    let m = m as usize;
    let mut series: Vec<LaurentPoly> = alloc::vec![LaurentPoly::new(); m + 1];
    series[0].insert(0, 1);
    for (d, mult) in v.iter() {
        // polynomial-type factor (1 + s t^d)^mult or series-type (1 - s t^d)^{-mult}
        let poly_type = is_odd(d) == symmetric;
        let factor: Vec<i128> = (0..=m as i64)
            .map(|j| {
                let c = if poly_type {
                    binomial(mult as i64, j)
                } else {
                    binomial(mult as i64 + j - 1, j)
                };
                i128::try_from(c).map_err(|_| overflow())
            })
            .collect::<Result<_>>()?;
        let mut next: Vec<LaurentPoly> = alloc::vec![LaurentPoly::new(); m + 1];
        for (a, pa) in series.iter().enumerate() {
            for (j, &c) in factor.iter().enumerate() {
                if c == 0 || a + j > m {
                    continue;
                }
                for (&deg, &x) in pa {
                    let e = next[a + j].entry(deg + d * j as i32).or_insert(0);
                    *e = e.checked_add(x.checked_mul(c).ok_or_else(overflow)?).ok_or_else(overflow)?;
                }
            }
        }
        series = next;
    }
    let mut top = series.swap_remove(m);
    top.retain(|_, c| *c != 0);
    GradedDim::from_poly(&top)
}

/// Graded symmetric power: even degrees behave symmetrically, odd ones exteriorly.
pub fn sym_power(v: &GradedDim, m: u32) -> Result<GradedDim> {
    power_series(v, m, true)
}

/// Graded exterior power: the parity roles of [`sym_power`] exchanged.
pub fn ext_power(v: &GradedDim, m: u32) -> Result<GradedDim> {
    power_series(v, m, false)
}

/// Symmetric power ignoring Koszul signs: degrees act as weights only.
pub fn sym_power_weighted(v: &GradedDim, m: u32) -> Result<GradedDim> {
    sym_power(&v.scale_degrees(2), m)?.unscale_degrees(2)
}

/// Exterior power ignoring Koszul signs.
pub fn ext_power_weighted(v: &GradedDim, m: u32) -> Result<GradedDim> {
    ext_power(&v.scale_degrees(2), m)?.unscale_degrees(2)
}

/// Graded trace of a cycle of length `c` acting on `v^{⊗c}`.
pub(crate) fn cycle_trace(v: &GradedDim, c: u32) -> LaurentPoly {
    let mut p = LaurentPoly::new();
    for (d, mult) in v.iter() {
        let sign = if is_odd(d) && c.is_multiple_of(2) { -1 } else { 1 };
        *p.entry(d * c as i32).or_insert(0) += sign * mult as i128;
    }
    p
}

pub(crate) fn poly_mul(a: &LaurentPoly, b: &LaurentPoly) -> Result<LaurentPoly> {
    let mut out = LaurentPoly::new();
    for (&da, &ca) in a {
        for (&db, &cb) in b {
            let e = out.entry(da + db).or_insert(0);
            *e = e.checked_add(ca.checked_mul(cb).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

fn molien(v: &GradedDim, m: u32, twist_sign: bool) -> Result<GradedDim> {
    if m > 20 {
        bail!(TooLarge, "Molien averaging over S_{} is not supported", m);
    }
    let mut acc = LaurentPoly::new();
    for mu in partitions(m) {
        let size = i128::try_from(mu.class_size()).map_err(|_| overflow())?;
        let mut term = LaurentPoly::from([(0, size)]);
        for &c in mu.parts() {
            term = poly_mul(&term, &cycle_trace(v, c))?;
        }
        let sign = if twist_sign { mu.sign() as i128 } else { 1 };
        for (d, c) in term {
            *acc.entry(d).or_insert(0) += sign * c;
        }
    }
    let order = i128::try_from(factorial(m)).map_err(|_| overflow())?;
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

/// Symmetric power by averaging graded traces over `S_m`.
pub fn sym_power_molien(v: &GradedDim, m: u32) -> Result<GradedDim> {
    molien(v, m, false)
}

/// Exterior power by averaging sign-twisted graded traces over `S_m`.
pub fn ext_power_molien(v: &GradedDim, m: u32) -> Result<GradedDim> {
    molien(v, m, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gd(p: &[(i32, u64)]) -> GradedDim {
        GradedDim::from_pairs(p.iter().copied())
    }

    #[test]
    fn small_powers() {
        assert_eq!(sym_power(&gd(&[(0, 1), (1, 1)]), 2).unwrap(), gd(&[(0, 1), (1, 1)]));
        assert_eq!(sym_power(&gd(&[(0, 1), (2, 1)]), 2).unwrap(), gd(&[(0, 1), (2, 1), (4, 1)]));
        assert_eq!(ext_power(&gd(&[(0, 1), (1, 1)]), 2).unwrap(), gd(&[(1, 1), (2, 1)]));
        assert_eq!(ext_power(&gd(&[(0, 6)]), 3).unwrap(), gd(&[(0, 20)]));
        assert_eq!(sym_power_molien(&gd(&[(0, 2)]), 3).unwrap(), gd(&[(0, 4)]));
        assert_eq!(sym_power(&gd(&[(0, 3)]), 0).unwrap(), gd(&[(0, 1)]));
    }

    #[test]
    fn koszul_examples() {
        let swap = Perm(alloc::vec![1, 0]);
        assert_eq!(koszul_sign(&swap, &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&swap, &[1, 2]).unwrap(), 1);
        // moving the i-th factor to the front
        let tau = Perm(alloc::vec![1, 2, 3, 0]);
        assert_eq!(koszul_sign(&tau, &[0, 0, 1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&tau, &[1, 2, 2, 2]).unwrap(), 1);
    }

    #[test]
    fn tensor_and_shift() {
        let a = gd(&[(0, 1), (2, 1)]);
        assert_eq!(a.tensor(&a), gd(&[(0, 1), (2, 2), (4, 1)]));
        assert_eq!(a.shift(-3), gd(&[(-3, 1), (-1, 1)]));
        assert_eq!(a.euler(), 2);
        assert!(a.checked_sub(&gd(&[(1, 1)])).is_err());
    }

    #[test]
    fn weighted_powers_ignore_parity() {
        let v = gd(&[(0, 1), (1, 2)]);
        assert_eq!(sym_power_weighted(&v, 2).unwrap(), gd(&[(0, 1), (1, 2), (2, 3)]));
        assert_eq!(ext_power_weighted(&v, 2).unwrap(), gd(&[(1, 2), (2, 1)]));
    }
}
