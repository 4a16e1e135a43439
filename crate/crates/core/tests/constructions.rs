use mubforge::analysis::{check_mu_set, entanglement_content, welch_and_design_check};
use mubforge::constructions::{
    applicable_methods, approx_mub, complete_missing_basis, construct_complete, heisenberg_weyl_classes,
    latin_square_mubs, latin_square_mubs_default, product_family_d6, tensor_mubs, tensor_product_mubs,
    weighted_design, ProductFamily, ProductParams,
};
use mubforge::finite_algebra::mols_generate;
use mubforge::numeric::{fourier, inner, is_product_vector, Method, OrthonormalBasis, CMatrix};
use mubforge::{HadamardMatrix, MubSet, ToleranceProfile};
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

/// Each column of `a` coincides with some column of `b` up to a phase.
fn same_rays(a: &OrthonormalBasis, b: &OrthonormalBasis) -> bool {
    a.vectors()
        .iter()
        .all(|u| b.vectors().iter().any(|v| (inner(u, v).norm() - 1.0).abs() < 1e-10))
}

#[test]
fn ivanovic_three() {
    let set = construct_complete(Method::Ivanovic, 3).unwrap();
    assert_eq!(set.len(), 4);
    assert!(check_mu_set(&set).unwrap().passes(&tol()));
}

#[test]
fn klappenecker_rotteler_two_matches_pauli_triple() {
    let kr = construct_complete(Method::KlappeneckerRotteler, 2).unwrap();
    let hw = construct_complete(Method::HeisenbergWeyl, 2).unwrap();
    assert_eq!(kr.len(), 3);
    let (a, b) = (kr.overlap_table(), hw.overlap_table());
    assert!((a - b).abs().max() < 1e-12);
    for kb in kr.bases() {
        assert!(hw.bases().iter().any(|hb| same_rays(kb, hb)));
    }
}

#[test]
fn wootters_nine() {
    let set = construct_complete(Method::WoottersFields, 9).unwrap();
    assert_eq!(set.len(), 10);
    let r = check_mu_set(&set).unwrap();
    assert!(r.max_mu_deviation < 1e-10);
    assert!(r.max_orth_deviation < 1e-10);
}

#[test]
fn incompatible_method_errors() {
    for (m, d) in [
        (Method::Ivanovic, 4),
        (Method::WoottersFields, 4),
        (Method::KlappeneckerRotteler, 6),
        (Method::Alltop, 3),
        (Method::HeisenbergWeyl, 9),
        (Method::WoottersFields, 6),
    ] {
        assert!(construct_complete(m, d).is_err(), "{m:?} d={d}");
    }
    assert!(applicable_methods(6).is_empty());
}

#[test]
fn hw_classes() {
    let (classes, set) = heisenberg_weyl_classes(2).unwrap();
    assert_eq!(classes.len(), 3);
    let labels: Vec<&str> = classes.iter().map(|c| c.generator_label.as_str()).collect();
    assert_eq!(labels, ["Z", "X", "XZ"]);
    assert_eq!(set.len(), 3);
    assert!(set.is_mutually_unbiased(&tol()));

    for p in [3usize, 5, 7] {
        let (classes, set) = heisenberg_weyl_classes(p).unwrap();
        assert_eq!(classes.len(), p + 1);
        assert!(check_mu_set(&set).unwrap().passes(&tol()));
        let id = CMatrix::identity(p, p);
        for cl in &classes {
            assert_eq!(cl.members.len(), p);
            for u in &cl.members {
                for v in &cl.members {
                    assert!((u * v - v * u).norm() < 1e-12);
                }
            }
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                for u in a.members.iter().filter(|u| (*u - &id).norm() > 1e-9) {
                    for v in b.members.iter().filter(|v| (*v - &id).norm() > 1e-9) {
                        assert!((u.adjoint() * v).trace().norm() < 1e-12);
                    }
                }
            }
        }
    }
    assert!(heisenberg_weyl_classes(6).is_err());
}

#[test]
fn tensor_examples() {
    let six = tensor_mubs(6).unwrap();
    assert_eq!(six.len(), 3);
    assert!(six.is_mutually_unbiased(&tol()));
    assert_eq!(tensor_mubs(12).unwrap().len(), 4);
    let q2 = construct_complete(Method::KlappeneckerRotteler, 2).unwrap();
    let four = tensor_product_mubs(&[q2.clone(), q2]).unwrap();
    assert_eq!((four.dim(), four.len()), (4, 3));
    assert!(four.is_mutually_unbiased(&tol()));
}

#[test]
fn latin_square_examples() {
    let nine = latin_square_mubs_default(3).unwrap();
    assert_eq!((nine.dim(), nine.len()), (9, 4));
    assert!(check_mu_set(&nine).unwrap().passes(&tol()));

    let h2 = HadamardMatrix::new(fourier(2), &tol()).unwrap();
    let four = latin_square_mubs(2, &[], &h2).unwrap();
    assert_eq!((four.dim(), four.len()), (4, 2));
    assert!(four.is_mutually_unbiased(&tol()));

    let sq = mols_generate(4).unwrap().squares;
    let h4 = HadamardMatrix::new(fourier(4), &tol()).unwrap();
    let sixteen = latin_square_mubs(4, &sq, &h4).unwrap();
    assert_eq!(sixteen.len(), 5);
    assert!(sixteen.is_mutually_unbiased(&tol()));
    let dup = [sq[0].clone(), sq[0].clone()];
    assert!(latin_square_mubs(4, &dup, &h4).is_err());
}

#[test]
fn weighted_designs() {
    let six = weighted_design(6).unwrap();
    assert_eq!(six.len(), 8);
    let w = six.weights().unwrap();
    assert!((w[0] - 1.0 / 42.0).abs() < 1e-15);
    assert!(w[1..].iter().all(|x| (x - 1.0 / 49.0).abs() < 1e-15));
    for d in [2usize, 3, 4, 6, 7, 8] {
        let set = weighted_design(d).unwrap();
        assert_eq!(set.len(), d + 2);
        let sum: f64 = set.weights().unwrap().iter().sum();
        assert!((sum - 1.0 / d as f64).abs() < 1e-12, "d={d}");
        let r = welch_and_design_check(&set);
        assert!(r.weighted);
        assert!(r.two_design_deviation < 1e-10, "d={d}: {}", r.two_design_deviation);
    }
    assert!(weighted_design(5).is_err());
}

#[test]
fn approximate_bases() {
    let a = approx_mub(6, Some(7)).unwrap();
    assert_eq!(a.set.len(), 7);
    assert!((a.bound - 7f64.sqrt() / 6.0).abs() < 1e-15);
    // exhaustive scan over all 21 basis pairs
    assert!((a.max_overlap - 0.443_502_713_167_026_66).abs() < 1e-12);
    assert!(a.set.max_unitarity_defect() < 1e-12);

    let b = approx_mub(2, Some(3)).unwrap();
    assert!(b.set.max_unitarity_defect() < 1e-12);
    assert!(approx_mub(6, Some(8)).is_err());
    assert_eq!(approx_mub(6, None).unwrap().p, 7);
}

#[test]
fn product_families() {
    let p = ProductParams::default();
    let t0 = product_family_d6(ProductFamily::T0, &p).unwrap();
    assert_eq!(t0.len(), 3);
    assert!(check_mu_set(&t0).unwrap().max_mu_deviation < 1e-10);

    let t1 = product_family_d6(ProductFamily::T1, &p).unwrap();
    assert!(t1.is_mutually_unbiased(&tol()));
    let vs = t1.all_vectors();
    assert_eq!(vs.len(), 18);
    for v in &vs {
        assert!(is_product_vector(v, 2, 3, &tol()).unwrap());
    }

    let zero = ProductParams { xi: 0.0, eta: 0.0, ..p };
    let p0 = product_family_d6(ProductFamily::P0, &zero).unwrap();
    let p1 = product_family_d6(ProductFamily::P1, &zero).unwrap();
    assert_eq!(p0.len(), p1.len());
    for (a, b) in p0.bases().iter().zip(p1.bases()) {
        assert!(same_rays(a, b));
    }
    for fam in [ProductFamily::P0, ProductFamily::P1, ProductFamily::P2, ProductFamily::P3] {
        assert!(product_family_d6(fam, &p).unwrap().is_mutually_unbiased(&tol()), "{fam:?}");
    }
    let bad = ProductParams { sigma: 0.0, ..p };
    assert!(product_family_d6(ProductFamily::T1, &bad).is_err());
}

#[test]
fn missing_basis_is_recovered() {
    for d in [2usize, 3, 4, 5, 7, 8, 9] {
        for m in applicable_methods(d) {
            let set = construct_complete(m, d).unwrap();
            assert_eq!(set.len(), d + 1);
            assert!(set.max_unitarity_defect() < 1e-10);
            let partial = MubSet::new(set.bases()[..d].to_vec()).unwrap();
            let missing = complete_missing_basis(&partial).unwrap();
            assert!(same_rays(&missing, set.basis(d)), "{m:?} d={d}");
        }
    }
}

#[test]
fn entanglement_content_of_composite_sets() {
    for (m, d, d1, d2, expected) in [
        (Method::KlappeneckerRotteler, 4, 2, 2, 16.0),
        (Method::WoottersFields, 9, 3, 3, 54.0),
        (Method::KlappeneckerRotteler, 8, 2, 4, 48.0),
    ] {
        let r = entanglement_content(&construct_complete(m, d).unwrap(), d1, d2).unwrap();
        assert!((r.content - expected).abs() < 1e-9, "d={d}: {}", r.content);
        assert!(r.holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tensor_products_stay_unbiased(i in 0usize..4, j in 0usize..4) {
        let pick = |k: usize| {
            let d = [2usize, 3, 4, 5][k];
            construct_complete(applicable_methods(d)[0], d).unwrap()
        };
        let (a, b) = (pick(i), pick(j));
        let t = tensor_product_mubs(&[a.clone(), b.clone()]).unwrap();
        let input = a.max_mu_deviation().max(b.max_mu_deviation()).max(1e-16);
        prop_assert!(t.max_mu_deviation() <= 10.0 * input + 1e-15);
        prop_assert_eq!(t.len(), a.len().min(b.len()));
    }
}
