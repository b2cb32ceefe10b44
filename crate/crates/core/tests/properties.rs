use std::collections::BTreeSet;

use hilbtaut_core::cechcomplex::{action_matrix, differential_matrix, CechTermModule};
use hilbtaut_core::cohomology::{
    ext_power_cohomology, j_dims, les_twisted, taut_cohomology, tensor_square_parts, Dims, Grading,
};
use hilbtaut_core::danila::{invariants_danila, invariants_direct};
use hilbtaut_core::grading::{
    ext_power, ext_power_molien, koszul_sign, permute_degrees, sym_power, sym_power_molien,
};
use hilbtaut_core::perm::{factorial, Perm};
use hilbtaut_core::ringmodel::{truncated_poly_model, SurfaceData};
use hilbtaut_core::specseq::{
    classify_orbit, enumerate_index_maps, invariant_term, lapropo_nonzero, stabilizer_of, AffineModel, OrbitClass,
};
use hilbtaut_core::GradedDim;
use proptest::prelude::*;

fn graded() -> impl Strategy<Value = GradedDim> {
    prop::collection::vec((-2i32..5, 0u64..4), 0..5).prop_map(GradedDim::from_pairs)
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn powers_match_molien(v in graded(), m in 0u32..6) {
        prop_assert_eq!(sym_power(&v, m).unwrap(), sym_power_molien(&v, m).unwrap());
        prop_assert_eq!(ext_power(&v, m).unwrap(), ext_power_molien(&v, m).unwrap());
    }

    #[test]
    fn sym_ext_swap_under_odd_shift(v in graded(), m in 0u32..5) {
        // shifting by one exchanges the roles of the two powers
        let shifted = v.shift(1);
        prop_assert_eq!(sym_power(&shifted, m).unwrap(), ext_power(&v, m).unwrap().shift(m as i32));
    }

    #[test]
    fn koszul_cocycle(
        (s, t, p) in (1usize..7).prop_flat_map(|n| (perm(n), perm(n), prop::collection::vec(-3i32..4, n)))
    ) {
        let lhs = koszul_sign(&s.compose(&t), &p).unwrap();
        let rhs = koszul_sign(&s, &permute_degrees(&t, &p)).unwrap() * koszul_sign(&t, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn closed_formula_consistency(rest in graded(), h_l in graded(), h_l2 in graded(), n in 2u32..5) {
        let mut h_o = rest;
        h_o.add_at(0, 1);
        let data = SurfaceData::formal(h_o.clone(), h_l.clone(), h_l2.clone(), None, None, None, None);
        prop_assert_eq!(ext_power_cohomology(n, 1, &data).unwrap(), taut_cohomology(n, &data).unwrap());
        let parts = tensor_square_parts(n, &h_o, &h_l, &h_l2, Grading::Cohomological).unwrap();
        prop_assert_eq!(parts.sym2.sum(&parts.ext2), parts.total.clone());
        prop_assert!(parts.total.euler() == parts.sym2.euler() + parts.ext2.euler());
    }

    #[test]
    fn j_nonnegative_with_unit(rest in graded(), n in 2u32..6) {
        let mut h_o = rest;
        h_o.add_at(0, 1);
        prop_assert!(j_dims(n, &h_o).is_ok());
    }

    #[test]
    fn les_bounds_are_ordered(h_l in graded(), h_l2 in graded(), n in 2u32..4) {
        let data = SurfaceData::formal(GradedDim::single(0, 1), h_l, h_l2, None, None, None, None);
        match les_twisted(n, &data).unwrap().dims {
            Dims::Bounds { lower, upper } => {
                prop_assert!(upper.checked_sub(&lower).is_ok());
                prop_assert_eq!(upper.euler(), lower.euler());
            }
            Dims::Exact(_) => prop_assert!(false, "formal data has no pairings"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cech_equivariance(
        (n, s) in (2u32..6).prop_flat_map(|n| (Just(n), perm(n as usize))),
        p_frac in 0.0f64..1.0,
    ) {
        let p = ((n - 1) as f64 * p_frac) as u32;
        let p = p.min(n - 2);
        let d = differential_matrix(n, p).unwrap();
        let lhs = action_matrix(n, &s, p + 1).unwrap().compose(&d).unwrap();
        let rhs = d.compose(&action_matrix(n, &s, p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cech_action_is_homomorphism(
        (n, s, t) in (1u32..6).prop_flat_map(|n| (Just(n), perm(n as usize), perm(n as usize))),
        p_frac in 0.0f64..1.0,
    ) {
        let p = (n as f64 * p_frac) as u32;
        let p = p.min(n - 1);
        let st = action_matrix(n, &s.compose(&t), p).unwrap();
        let prod = action_matrix(n, &s, p).unwrap().compose(&action_matrix(n, &t, p).unwrap()).unwrap();
        prop_assert_eq!(st, prod);
    }

    #[test]
    fn danila_matches_projector(n in 1u32..5, p_frac in 0.0f64..1.0, d in 0u32..3) {
        let p = ((n as f64 * p_frac) as u32).min(n - 1);
        let ring = truncated_poly_model(d).unwrap();
        let m = CechTermModule::new(n, p, &ring).unwrap();
        prop_assert_eq!(invariants_danila(&m).unwrap(), invariants_direct(&m).unwrap());
    }

    #[test]
    fn invariant_terms_are_orbit_constant(
        (n, k, s, t) in (2u32..5, 1u32..4).prop_flat_map(|(n, k)| (Just(n), Just(k), perm(n as usize), perm(k as usize))),
        p in 0u32..4,
        q in prop::sample::select(vec![0i32, -2, -4]),
    ) {
        let model = AffineModel::new(1).unwrap();
        for a in enumerate_index_maps(n, k, p, false).unwrap() {
            if let Ok(OrbitClass::Relevant { t: tt }) = classify_orbit(&a) {
                let here = invariant_term(&a, q, &model).unwrap();
                let moved = a.act(&s, &t);
                prop_assert_eq!(&here, &invariant_term(&moved, q, &model).unwrap());
                if !here.is_zero() {
                    prop_assert!(lapropo_nonzero(p, q, tt, k), "{} at q={}", a, q);
                }
            }
        }
    }
}

#[test]
fn orbit_stabilizer_for_relevant_orbits() {
    for n in 1..=5u32 {
        for k in 1..=3u32 {
            let g: Vec<Perm> = hilbtaut_core::perm::all_perms(n as usize);
            let h: Vec<Perm> = hilbtaut_core::perm::all_perms(k as usize);
            for p in 0..=k {
                for a in enumerate_index_maps(n, k, p, false).unwrap() {
                    if classify_orbit(&a).map(|c| c == OrbitClass::Irrelevant).unwrap_or(true) {
                        continue;
                    }
                    let mut orbit = BTreeSet::new();
                    for s in &g {
                        for t in &h {
                            orbit.insert(a.act(s, t).masks().to_vec());
                        }
                    }
                    let stab = stabilizer_of(&a).unwrap().order();
                    assert_eq!(orbit.len() as u128 * stab, factorial(n) * factorial(k), "{}", a);
                }
            }
        }
    }
}
