use hilbtaut_core::cechcomplex::CechComplexModel;
use hilbtaut_core::cohomology::{
    d_matrix, psi_annihilator_check, tensor_square_parts, Grading, PairedSpace,
};
use hilbtaut_core::linalg::rank;
use hilbtaut_core::multitor::{
    koszul_tor_oracle, omega_check, tor_character, verify_composition_law, virtual_factorization_holds,
};
use hilbtaut_core::perm::{all_perms, binomial, Perm};
use hilbtaut_core::ringmodel::truncated_poly_model;
use hilbtaut_core::specseq::{assemble_page, e00_infinity_k2, e2m1_invariants_k2, ext_c0_invariants, AffineModel};
use hilbtaut_core::symrep::{character_table, ext_inv_dim, partitions, Partition, Twist};

#[test]
fn character_orthogonality() {
    for m in 1..=7u32 {
        let t = character_table(m).unwrap();
        let fact: i128 = (1..=m as i128).product();
        for a in 0..t.partitions.len() {
            for b in 0..t.partitions.len() {
                let s: i128 = (0..t.partitions.len())
                    .map(|c| t.partitions[c].class_size() as i128 * t.value(a, c) * t.value(b, c))
                    .sum();
                assert_eq!(s, if a == b { fact } else { 0 }, "m={} {} {}", m, t.partitions[a], t.partitions[b]);
            }
        }
    }
}

/// Character of `Λ^q` of the permutation representation: signed count of
/// `σ`-stable `q`-subsets.
fn ext_perm_char(s: &Perm, q: usize) -> i64 {
    let n = s.degree();
    let mut total = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != q {
            continue;
        }
        let pts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if pts.iter().all(|&i| mask >> s.apply(i) & 1 == 1) {
            let imgs: Vec<usize> = pts.iter().map(|&i| s.apply(i)).collect();
            total += hilbtaut_core::perm::sort_sign(&imgs) as i64;
        }
    }
    total
}

/// Character of `Λ^j ρ_k` from the permutation representation.
fn ext_std_char(s: &Perm, j: usize) -> i64 {
    (0..=j).map(|i| (-1i64).pow(i as u32) * ext_perm_char(s, j - i)).sum()
}

#[test]
fn ext_std_invariants_by_permutation_sum() {
    for k in 2..=6u32 {
        let perms = all_perms(k as usize);
        let top = 2 * (k as usize - 1);
        for q in 0..=top + 1 {
            // Λ^q(ℂ² ⊗ ρ) = ⊕_i Λ^i ρ ⊗ Λ^{q-i} ρ
            let sum: i64 = perms
                .iter()
                .map(|s| (0..=q).map(|i| ext_std_char(s, i) * ext_std_char(s, q - i)).sum::<i64>())
                .sum();
            assert_eq!(sum % perms.len() as i64, 0);
            let brute = (sum / perms.len() as i64) as u64;
            assert_eq!(ext_inv_dim(k, q as u32, Twist::Trivial).unwrap(), brute, "k={} q={}", k, q);
            assert_eq!(brute, u64::from(q % 2 == 0 && q <= top), "k={} q={}", k, q);
        }
    }
}

#[test]
fn koszul_oracle_matches_formula() {
    for l in 2..=3u32 {
        for q in 0..=2 * (l - 1) + 1 {
            let want = binomial(2 * (i64::from(l) - 1), i64::from(q)) as u64;
            for window in [l, l + 1] {
                assert_eq!(koszul_tor_oracle(l, q, window).unwrap(), want, "l={} q={} window={}", l, q, window);
            }
            let id = Partition::new(vec![1; l as usize]).unwrap();
            assert_eq!(tor_character(l, q, &id).unwrap(), want as i128);
        }
    }
}

#[test]
fn multitor_identities() {
    for l in 1..=5 {
        assert!(virtual_factorization_holds(l).unwrap(), "l={}", l);
    }
    for l in 1..=4 {
        verify_composition_law(l).unwrap();
    }
    for (k, l) in [(2, 1), (3, 1), (3, 2), (4, 3)] {
        assert!(omega_check(k, l).unwrap(), "k={} l={}", k, l);
    }
    assert_eq!(partitions(5).len(), 7);
}

#[test]
fn cech_squares_to_zero() {
    for n in 1..=6 {
        assert!(CechComplexModel::new(n).unwrap().squares_to_zero().unwrap());
    }
}

#[test]
fn psi_annihilator_and_d_kernel() {
    for d in 0..=2 {
        let ring = truncated_poly_model(d).unwrap();
        let f = PairedSpace::regular(&ring);
        for k in 1..=4usize {
            assert!(psi_annihilator_check(k, &ring, &f).unwrap(), "d={} k={}", d, k);
            let m = d_matrix(k, &f).unwrap();
            let r = rank(&m);
            assert_eq!(r, m.rows, "D not surjective at d={} k={}", d, k);
            // ker D ≅ F ⊗ 𝓙 with 𝓙 = S^k − S^{k−1} on the ring
            let sk = binomial(ring.len() as i64 + k as i64 - 1, k as i64) as usize;
            let sk1 = binomial(ring.len() as i64 + k as i64 - 2, k as i64 - 1) as usize;
            assert_eq!(m.cols - r, ring.len() * (sk - sk1));
        }
    }
}

#[test]
fn tensor_square_matches_section_kernel() {
    for d in 0..=2 {
        let model = AffineModel::new(d).unwrap();
        let w = model.weights();
        for n in 2..=4 {
            let e = e00_infinity_k2(n, &model).unwrap();
            assert!(e.surjective(), "n={} d={}", n, d);
            let closed = tensor_square_parts(n, &w, &w, &w, Grading::Weight).unwrap();
            assert_eq!(e.kernel, model.truncate(&closed.total), "n={} d={}", n, d);
        }
        assert!(e2m1_invariants_k2(3, &model).unwrap().is_zero());
    }
}

#[test]
fn exterior_section_invariants() {
    for d in 0..=1 {
        let model = AffineModel::new(d).unwrap();
        for n in 1..=4 {
            for k in 1..=n.min(3) {
                let (got, want) = ext_c0_invariants(n, k, &model).unwrap();
                assert_eq!(got, want, "n={} k={} d={}", n, k, d);
            }
        }
    }
}

#[test]
fn small_pages_degenerate() {
    let model = AffineModel::new(0).unwrap();
    for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        for q in [0, -2, -4] {
            let c = assemble_page(n, k, q, &model).unwrap();
            assert!(c.holds(), "n={} k={} q={}: {:?}", n, k, q, c);
        }
    }
}
