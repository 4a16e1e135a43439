use std::f64::consts::PI;

use mubforge::catalogue::{
    bjorck_c6, defect, dephase_hadamard, dita_slice, fourier6_family, fourier_defect, fourier_matrix,
    haagerup_set, has_subunitary_3x3, karlsson_k6, random_equivalent, structure_flags, szollosi_in_domain,
    szollosi_x6, tao_s6, zauner_triple, CatalogueEntry, Family,
};
use mubforge::numeric::{c, cis, dephase, fourier, is_hadamard, root_of_unity, CMatrix, OrthonormalBasis};
use mubforge::{HadamardMatrix, MubSet, ToleranceProfile};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn in_cube_roots(h: &HadamardMatrix) -> bool {
    let roots: Vec<_> = (0..3).map(|k| root_of_unity(k, 3)).collect();
    haagerup_set(h, 1e-6)
        .values
        .iter()
        .all(|z| roots.iter().any(|r| (z - r).norm() < 1e-9))
}

#[test]
fn fourier_family_at_origin() {
    let h = fourier6_family(0.0, 0.0).unwrap();
    assert!((h.entries() - fourier(6)).camax() < 1e-15);
    let e = CatalogueEntry::new(Family::Fourier6Family, 6).unwrap();
    assert_eq!(e.param_arity(), 2);
    assert!(e.generate(&[0.1]).is_err());
    assert!(CatalogueEntry::new(Family::TaoS6, 5).is_err());
}

#[test]
fn isolated_matrix() {
    let s = tao_s6().unwrap();
    assert!(is_hadamard(s.entries(), &tol()).unwrap().is_hadamard);
    let f = structure_flags(&s, &tol());
    assert_eq!(f.butson_order, Some(3));
    assert!(!f.h2_reducible);
}

#[test]
fn karlsson_slice_is_dita() {
    let theta = (1.0 / 3f64.sqrt()).acos();
    for lambda in [0.0, 0.3, 1.7, 4.0] {
        let k = karlsson_k6(theta, PI / 4.0, lambda).unwrap();
        assert!(is_hadamard(k.matrix.entries(), &tol()).unwrap().is_hadamard);
        assert!((k.matrix.entries() - dita_slice(lambda).unwrap().entries()).camax() < 1e-15);
    }
    assert!(karlsson_k6(-0.1, 0.5, 0.0).is_err());
    assert!(karlsson_k6(0.5, PI, 0.0).is_err());
}

#[test]
fn bjorck_circulant() {
    let a = c((1.0 - 3f64.sqrt()) / 2.0, (3f64.sqrt() / 2.0).sqrt());
    assert!((a.norm() - 1.0).abs() < 1e-15);
    let h = bjorck_c6().unwrap();
    assert!(structure_flags(&h, &tol()).is_circulant);
    let m = h.entries();
    for i in 0..6 {
        for j in 0..6 {
            assert!((m[(i, j)] - m[((i + 1) % 6, (j + 1) % 6)]).norm() < 1e-15);
        }
    }
}

#[test]
fn zauner_examples() {
    for x in [0.0, 0.3] {
        let (e1, e2) = zauner_triple(x).unwrap();
        let set = MubSet::new(vec![OrthonormalBasis::standard(6), e1.as_basis(), e2.as_basis()]).unwrap();
        assert!(set.max_mu_deviation() < 1e-10, "x={x}");
    }
}

#[test]
fn dephase_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f3 = fourier(3);
    let d1: Vec<_> = (0..3).map(|_| cis(rng.random::<f64>() * 2.0 * PI)).collect();
    let d2: Vec<_> = (0..3).map(|_| cis(rng.random::<f64>() * 2.0 * PI)).collect();
    let m = CMatrix::from_fn(3, 3, |i, j| d1[i] * f3[(i, j)] * d2[j]);
    assert!((dephase(&m) - &f3).camax() < 1e-14);

    for h in [tao_s6().unwrap(), bjorck_c6().unwrap(), fourier6_family(0.2, 0.7).unwrap()] {
        let once = dephase_hadamard(&h);
        let twice = dephase_hadamard(&once);
        assert!((once.entries() - twice.entries()).camax() < 1e-15);
    }
}

#[test]
fn haagerup_examples() {
    assert!(in_cube_roots(&fourier_matrix(3).unwrap()));
    assert!(in_cube_roots(&tao_s6().unwrap()));
    let s = haagerup_set(&tao_s6().unwrap(), 1e-6);
    assert_eq!(s.values.len(), 3);
    let f6 = haagerup_set(&fourier_matrix(6).unwrap(), 1e-6);
    assert!(!f6.matches(&s, 1e-6));
}

#[test]
fn haagerup_sets_contain_one_and_are_conjugation_closed() {
    for h in [
        tao_s6().unwrap(),
        bjorck_c6().unwrap(),
        fourier6_family(0.13, 0.41).unwrap(),
        dita_slice(0.8).unwrap(),
    ] {
        let vals = haagerup_set(&h, 1e-6).values;
        assert!(vals.iter().any(|z| (z - c(1.0, 0.0)).norm() < 1e-6));
        for z in &vals {
            assert!(vals.iter().any(|w| (w - z.conj()).norm() < 1e-6));
        }
    }
}

#[test]
fn defect_examples() {
    assert_eq!(fourier_defect(6), 4);
    assert_eq!(fourier_defect(4), 1);
    for p in [2usize, 3, 5, 7, 11, 13] {
        assert_eq!(fourier_defect(p), 0);
    }
    assert_eq!(defect(&fourier_matrix(6).unwrap()).defect, 4);
    assert_eq!(defect(&tao_s6().unwrap()).defect, 0);
    for d in 2..=12 {
        let r = defect(&fourier_matrix(d).unwrap());
        assert_eq!(r.defect, fourier_defect(d), "d={d}");
        assert_eq!(r.matrix_order, d);
    }
}

#[test]
fn structure_flag_examples() {
    let f = structure_flags(&fourier_matrix(6).unwrap(), &tol());
    assert_eq!(f.butson_order, Some(6));
    assert!(f.h2_reducible);
    assert!(has_subunitary_3x3(&fourier_matrix(4).unwrap(), 1e-10).is_err());
}

#[test]
fn in_domain_catalogue_points_are_hadamard() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let check = |h: &HadamardMatrix| {
        let r = is_hadamard(h.entries(), &tol()).unwrap();
        assert!(r.is_hadamard && r.unitarity_deviation < 1e-10 && r.modulus_deviation < 1e-10);
    };
    for _ in 0..100 {
        check(&fourier6_family(rng.random(), rng.random()).unwrap());
        let k = karlsson_k6(rng.random::<f64>() * PI, rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI).unwrap();
        check(&k.matrix);
        assert!(k.mobius_residuals().iter().all(|&r| r < 1e-10));
    }
    let mut found = 0;
    while found < 100 {
        let alpha = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        if szollosi_in_domain(alpha) {
            check(&szollosi_x6(alpha).unwrap());
            found += 1;
        }
    }
    assert!(szollosi_x6(c(10.0, 10.0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn invariants_survive_equivalence(seed in any::<u64>(), which in 0usize..4) {
        let h = match which {
            0 => tao_s6().unwrap(),
            1 => fourier_matrix(6).unwrap(),
            2 => bjorck_c6().unwrap(),
            _ => fourier6_family(0.21, 0.05).unwrap(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_equivalent(&h, &mut rng);
        prop_assert_eq!(defect(&g).defect, defect(&h).defect);
        prop_assert!(haagerup_set(&g, 1e-6).matches(&haagerup_set(&h, 1e-6), 1e-6));
    }

    #[test]
    fn zauner_triples_are_unbiased(x in 0.0f64..(2.0 * PI)) {
        let (e1, e2) = zauner_triple(x).unwrap();
        for e in [&e1, &e2] {
            prop_assert!(is_hadamard(e.entries(), &tol()).unwrap().is_hadamard);
        }
        let set = MubSet::new(vec![OrthonormalBasis::standard(6), e1.as_basis(), e2.as_basis()]).unwrap();
        prop_assert!(set.is_mutually_unbiased(&tol()));
    }
}
