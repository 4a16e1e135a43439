use approx::assert_abs_diff_eq;
use mubforge::catalogue::{fourier6_family, tao_s6};
use mubforge::constructions::construct_complete;
use mubforge::numeric::{
    c, crt_permutation, fourier, haar_unitary, is_hadamard, is_product_vector, kron, kron_vec,
    permute_components, purity, schmidt_rank, CMatrix, Method, C64,
};
use mubforge::{Error, ToleranceProfile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn basis_vec(d: usize, k: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); d];
    v[k] = c(1.0, 0.0);
    v
}

fn bell(d: usize) -> Vec<C64> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = vec![c(0.0, 0.0); d * d];
    for k in 0..d {
        v[k * d + k] = c(s, 0.0);
    }
    v
}

#[test]
fn hadamard_examples() {
    let tol = ToleranceProfile::default();
    assert!(is_hadamard(&fourier(2), &tol).unwrap().is_hadamard);
    assert!(is_hadamard(tao_s6().unwrap().entries(), &tol).unwrap().is_hadamard);
    let r = is_hadamard(&CMatrix::identity(3, 3), &tol).unwrap();
    assert!(!r.is_hadamard);
    // zero entries sit 1/sqrt 3 below target
    assert_abs_diff_eq!(r.modulus_deviation, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
    assert_eq!(r.unitarity_deviation, 0.0);
    let rect = CMatrix::zeros(2, 3);
    assert!(matches!(is_hadamard(&rect, &tol), Err(Error::Shape(_))));
}

#[test]
fn purity_examples() {
    assert_abs_diff_eq!(purity(&basis_vec(4, 0), 2, 2).unwrap(), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(purity(&bell(2), 2, 2).unwrap(), 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(purity(&bell(3), 3, 3).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
    assert!(matches!(purity(&bell(2), 2, 3), Err(Error::Shape(_))));
}

#[test]
fn schmidt_rank_examples() {
    let eps = 1e-10;
    assert_eq!(schmidt_rank(&kron(&fourier(2), &fourier(3)), 2, 3, eps).unwrap(), 1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        assert_eq!(schmidt_rank(&haar_unitary(6, &mut rng), 2, 3, eps).unwrap(), 4);
    }
    // realignment singular values 1.6054, 1.1927, 1, 1
    assert_eq!(schmidt_rank(tao_s6().unwrap().entries(), 2, 3, eps).unwrap(), 4);
    assert!(schmidt_rank(&fourier(6), 2, 2, eps).is_err());
}

#[test]
fn product_vector_examples() {
    let tol = ToleranceProfile::default();
    assert!(is_product_vector(&basis_vec(4, 1), 2, 2, &tol).unwrap());
    assert!(!is_product_vector(&bell(2), 2, 2, &tol).unwrap());
    let f6 = fourier6_family(0.0, 0.0).unwrap();
    let perm = crt_permutation(2, 3).unwrap();
    for k in 0..6 {
        let col: Vec<C64> = f6.entries().column(k).iter().copied().collect();
        assert!(is_product_vector(&permute_components(&col, &perm), 2, 3, &tol).unwrap());
    }
}

#[test]
fn constructed_bases_are_orthonormal_and_pairwise_hadamard() {
    let tol = ToleranceProfile::default();
    for (m, d) in [(Method::Ivanovic, 5), (Method::WoottersFields, 9), (Method::KlappeneckerRotteler, 8)] {
        let set = construct_complete(m, d).unwrap();
        assert!(set.max_unitarity_defect() < tol.eps_unitary);
        for (i, a) in set.bases().iter().enumerate() {
            for b in &set.bases()[i + 1..] {
                assert!(is_hadamard(&(a.matrix().adjoint() * b.matrix()), &tol).unwrap().is_hadamard);
            }
        }
    }
    // two Hadamard matrices need not give a Hadamard product
    let f = fourier(6);
    let s = tao_s6().unwrap().entries().clone();
    assert!(is_hadamard(&f, &tol).unwrap().is_hadamard);
    assert!(!is_hadamard(&(f.adjoint() * s), &tol).unwrap().is_hadamard);
}

fn unitary_from_seed(d: usize, seed: u64) -> CMatrix {
    haar_unitary(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn purity_local_unitary_invariant(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<C64> = haar_unitary(d1 * d2, &mut rng).column(0).iter().copied().collect();
        let u = kron(&haar_unitary(d1, &mut rng), &haar_unitary(d2, &mut rng));
        let w: Vec<C64> = (&u * nalgebra::DVector::from_column_slice(&v)).iter().copied().collect();
        let p0 = purity(&v, d1, d2).unwrap();
        prop_assert!((p0 - purity(&w, d1, d2).unwrap()).abs() < 1e-10);
        prop_assert!(p0 >= 1.0 / d1.min(d2) as f64 - 1e-12 && p0 <= 1.0 + 1e-12);
    }

    #[test]
    fn local_operators_have_schmidt_rank_one(sa in any::<u64>(), sb in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4) {
        let m = kron(&unitary_from_seed(d1, sa), &unitary_from_seed(d2, sb));
        prop_assert_eq!(schmidt_rank(&m, d1, d2, 1e-10).unwrap(), 1);
    }

    #[test]
    fn product_states_are_products(sa in any::<u64>(), sb in any::<u64>()) {
        let a: Vec<C64> = unitary_from_seed(2, sa).column(0).iter().copied().collect();
        let b: Vec<C64> = unitary_from_seed(3, sb).column(0).iter().copied().collect();
        prop_assert!(is_product_vector(&kron_vec(&a, &b), 2, 3, &ToleranceProfile::default()).unwrap());
    }
}
