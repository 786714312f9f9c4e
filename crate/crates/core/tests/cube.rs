mod common;

use structrand::cube::{
    arithmetic_regularize, character_atoms, correlation_search, dual_function, gowers_norm,
    gowers_norm_u2_fft, gvn_defect, inverse_100, inverse_99, reed_muller_atoms, rigidity_check,
    walsh_hadamard, CubeFunction, F2Matrix, F2Polynomial, Inverse99Config,
};
use rand::seq::SliceRandom;
use structrand::hilbert::{AtomSet, StrongConfig};

use common::*;

#[test]
fn transform_matches_double_sum() {
    let mut r = rng(11);
    let f = CubeFunction::new(8, uniform_values(&mut r, 256)).unwrap();
    let fast = walsh_hadamard(&f).unwrap();
    for (a, b) in fast.coefficients.iter().zip(naive_fourier(f.values())) {
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn atom_counts() {
    assert_eq!(character_atoms(3).unwrap().len(), 8);
    assert_eq!(reed_muller_atoms(3, 1).unwrap().len(), 16);
    assert_eq!(reed_muller_atoms(3, 2).unwrap().len(), 128);
    assert_eq!(reed_muller_atoms(4, 2).unwrap().len(), 2048);
}

#[test]
fn gowers_examples() {
    for d in 1..=4 {
        assert!((gowers_norm(&CubeFunction::constant(4, 1.0).unwrap(), d).unwrap() - 1.0).abs() < 1e-12);
    }
    let p = F2Polynomial::from_monomials(4, &[vec![0, 1], vec![2]]).unwrap();
    assert!((gowers_norm(&CubeFunction::code(&p), 3).unwrap() - 1.0).abs() < 1e-12);

    let mut r = rng(12);
    let f = CubeFunction::new(4, uniform_values(&mut r, 16)).unwrap();
    let oracle = gowers_power_definition(f.values(), 3).powf(1.0 / 8.0);
    assert!((gowers_norm(&f, 3).unwrap() - oracle).abs() <= 1e-9);

    let two: Vec<f64> = CubeFunction::character(5, 1)
        .unwrap()
        .values()
        .iter()
        .zip(CubeFunction::character(5, 6).unwrap().values())
        .map(|(a, b)| (a + b) / 2f64.sqrt())
        .collect();
    let two = CubeFunction::new(5, two).unwrap();
    assert!((gowers_norm_u2_fft(&two).unwrap() - 2f64.powf(-0.25)).abs() < 1e-12);

    let f = CubeFunction::new(10, uniform_values(&mut r, 1024)).unwrap();
    assert!((gowers_norm_u2_fft(&f).unwrap() - gowers_norm(&f, 2).unwrap()).abs() <= 1e-9);
}

#[test]
fn dual_examples() {
    let c = CubeFunction::constant(3, 0.5).unwrap();
    for d in 1..=3u32 {
        let df = dual_function(&c, d).unwrap();
        let expect = 0.5f64.powi((1 << d) - 1);
        assert!(df.values().iter().all(|v| (v - expect).abs() < 1e-15));
    }
    let mut r = rng(13);
    let f = CubeFunction::new(4, uniform_values(&mut r, 16)).unwrap();
    let df = dual_function(&f, 2).unwrap();
    let lhs = f.mul(&df).mean();
    assert!((lhs - gowers_power_definition(f.values(), 2)).abs() <= 1e-9);
}

#[test]
fn gvn_with_identity_second_map() {
    let n = 5;
    let mut r = rng(14);
    let mut checked = 0;
    while checked < 1000 {
        let cols: Vec<u32> = (0..n).map(|_| rand::Rng::random_range(&mut r, 0..32u32)).collect();
        let a = F2Matrix::new(n, cols).unwrap();
        let id = F2Matrix::identity(n);
        if !a.is_invertible() || !a.add(&id).is_invertible() {
            continue;
        }
        let f = CubeFunction::new(n, uniform_values(&mut r, 32)).unwrap();
        let g = CubeFunction::new(n, uniform_values(&mut r, 32)).unwrap();
        let h = CubeFunction::new(n, uniform_values(&mut r, 32)).unwrap();
        assert!(gvn_defect(&f, &g, &h, &a, &id).unwrap().holds());
        checked += 1;
    }
    let one = CubeFunction::constant(n, 1.0).unwrap();
    let zero = CubeFunction::constant(n, 0.0).unwrap();
    let t = F2Matrix::new(n, vec![2, 4, 8, 16, 5]).unwrap();
    if t.is_invertible() && t.add(&F2Matrix::identity(n)).is_invertible() {
        let d = gvn_defect(&zero, &one, &one, &t, &F2Matrix::identity(n)).unwrap();
        assert_eq!(d.lhs, 0.0);
    }
}

#[test]
fn arithmetic_examples() {
    let all = CubeFunction::constant(6, 1.0).unwrap();
    let rep = arithmetic_regularize(&all, 0.25, &StrongConfig::default()).unwrap();
    assert_eq!(rep.codimension, 0);
    assert_eq!(rep.cosets.len(), 1);
    assert!(rep.cosets[0].regular && rep.cosets[0].density == 1.0);

    let xi0 = 0b101101;
    let points: Vec<u32> = (0..64).filter(|x: &u32| (x & xi0).count_ones() % 2 == 0).collect();
    let a = CubeFunction::indicator(6, &points).unwrap();
    let rep = arithmetic_regularize(&a, 0.25, &StrongConfig::default()).unwrap();
    assert_eq!(rep.codimension, 1);
    assert!(rep.structured_characters.contains(&xi0));
    let mut densities: Vec<f64> = rep.cosets.iter().map(|c| c.density).collect();
    densities.sort_by(f64::total_cmp);
    assert_eq!(densities, vec![0.0, 1.0]);
    assert!(rep.cosets.iter().all(|c| c.regular && c.max_bias == 0.0));
}

#[test]
fn inverse_100_examples() {
    assert_eq!(
        inverse_100(&CubeFunction::constant(4, 1.0).unwrap(), 3).unwrap(),
        Some(F2Polynomial::zero(4))
    );
    let p = F2Polynomial::from_monomials(4, &[vec![1, 2], vec![3]]).unwrap();
    assert_eq!(inverse_100(&CubeFunction::code(&p), 3).unwrap(), Some(p));
    let rm = reed_muller_atoms(4, 2).unwrap();
    for i in 0..rm.len() {
        let p = rm.polynomial(i);
        assert_eq!(inverse_100(&CubeFunction::code(&p), 3).unwrap(), Some(p));
    }
}

#[test]
fn inverse_99_examples() {
    let config = Inverse99Config::default();
    let p = F2Polynomial::from_monomials(6, &[vec![0, 3], vec![1], vec![]]).unwrap();
    let out = inverse_99(&CubeFunction::code(&p), 3, 0.0, &config).unwrap();
    let c = out.recovered().expect("exact code is recovered");
    assert_eq!(c.code_polynomial(), p);
    assert!((c.correlation - 1.0).abs() < 1e-12);

    let mut r = rng(15);
    let q = F2Polynomial::from_monomials(10, &[vec![0], vec![4], vec![9]]).unwrap();
    let mut noisy = CubeFunction::code(&q).into_values();
    let mut idx: Vec<usize> = (0..1024).collect();
    idx.shuffle(&mut r);
    for &i in &idx[..10] {
        noisy[i] = -noisy[i];
    }
    let f = CubeFunction::new(10, noisy).unwrap();
    let delta = 1.0 - gowers_norm(&f, 2).unwrap();
    let c = inverse_99(&f, 2, delta, &config).unwrap();
    let c = c.recovered().expect("planted code recovered");
    assert_eq!(CubeFunction::code(&c.code_polynomial()), CubeFunction::code(&q));
    assert!(c.correlation >= 0.98);

    let mut r = rng(16);
    let f: Vec<f64> = (0..256)
        .map(|_| if rand::Rng::random_bool(&mut r, 0.5) { 1.0 } else { -1.0 })
        .collect();
    let f = CubeFunction::new(8, f).unwrap();
    assert!(gowers_norm(&f, 2).unwrap() <= 0.5);
    assert!(inverse_99(&f, 2, 0.2, &config).unwrap().recovered().is_none());
}

#[test]
fn rigidity_examples() {
    assert_eq!(rigidity_check(&F2Polynomial::zero(4)), 1.0);
    let x1 = F2Polynomial::from_monomials(4, &[vec![1]]).unwrap();
    assert_eq!(rigidity_check(&x1), 0.0);
}

#[test]
fn correlation_search_matches_double_loop() {
    let mut r = rng(17);
    for _ in 0..5 {
        let f: Vec<f64> = (0..16)
            .map(|_| if rand::Rng::random_bool(&mut r, 0.5) { 1.0 } else { -1.0 })
            .collect();
        let f = CubeFunction::new(4, f).unwrap();
        let got = correlation_search(&f, 3).unwrap();
        let rm = reed_muller_atoms(4, 2).unwrap();
        let mut best: f64 = 0.0;
        for i in 0..rm.len() {
            let code = CubeFunction::code(&rm.polynomial(i));
            best = best.max(f.mul(&code).mean().abs());
        }
        assert!((got.correlation - best).abs() < 1e-12);
        assert!((f.mul(&CubeFunction::code(&got.polynomial)).mean() - best).abs() < 1e-12);
    }
    let e = CubeFunction::character(5, 9).unwrap();
    let got = correlation_search(&e, 2).unwrap();
    assert_eq!(got.correlation, 1.0);
    assert_eq!(CubeFunction::code(&got.polynomial), e);
    let best = reed_muller_atoms(5, 1).unwrap().best_hit(&e.to_vector()).unwrap();
    assert_eq!(best.correlation.abs(), 1.0);
}
