mod common;

use structrand::cube::{character_atoms, CubeFunction};
use structrand::hilbert::{
    energy_decrement_step, inner_product, orthogonal_weak_decompose, pseudorandomness_level,
    strong_decompose, weak_decompose, FiniteVector, GrowthFunction, StrongConfig,
};

use common::*;

fn character(n: u32, xi: u32) -> FiniteVector {
    CubeFunction::character(n, xi).unwrap().to_vector()
}

fn random_unit(n: u32, seed: u64) -> FiniteVector {
    let mut r = rng(seed);
    FiniteVector::new(normalize(uniform_values(&mut r, 1 << n))).unwrap()
}

#[test]
fn inner_product_examples() {
    let one = FiniteVector::new(vec![1.0; 8]).unwrap();
    assert_eq!(inner_product(&one, &one).unwrap(), 1.0);
    assert_eq!(inner_product(&character(3, 5), &character(3, 6)).unwrap(), 0.0);

    let mut r = rng(1);
    let f = uniform_values(&mut r, 16);
    let g = uniform_values(&mut r, 16);
    let oracle: f64 = f.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() / 16.0;
    let got = inner_product(
        &FiniteVector::new(f).unwrap(),
        &FiniteVector::new(g).unwrap(),
    )
    .unwrap();
    assert!((got - oracle).abs() <= 1e-12);
}

#[test]
fn decrement_step_on_scaled_atom() {
    let atoms = character_atoms(4).unwrap();
    let f = FiniteVector::new(character(4, 9).values().iter().map(|v| 0.3 * v).collect()).unwrap();
    let step = energy_decrement_step(&f, &atoms, 0.2).unwrap().unwrap();
    assert_eq!(step.key, 9);
    assert!((step.coefficient - 0.3).abs() < 1e-12);
    assert!((step.energy_before - 0.09).abs() < 1e-12);
    assert!(step.energy_after.abs() < 1e-12);
    assert!(energy_decrement_step(&f, &atoms, 0.31).unwrap().is_none());
}

#[test]
fn decrement_step_energy_drop() {
    let atoms = character_atoms(6).unwrap();
    let f = random_unit(6, 2);
    if let Some(step) = energy_decrement_step(&f, &atoms, 0.1).unwrap() {
        let v = character(6, step.key);
        let after = f.add_scaled(-step.coefficient, &v).norm_sq();
        assert!(after <= f.norm_sq() - 0.01 + 1e-12);
        assert!((after - step.energy_after).abs() < 1e-12);
    }
}

#[test]
fn weak_examples() {
    let atoms = character_atoms(4).unwrap();
    let f = FiniteVector::new(vec![0.5; 16]).unwrap();
    let d = weak_decompose(&f, &atoms, 1.0).unwrap();
    assert_eq!(d.iterations, 0);
    assert_eq!(d.f_psd, f);

    let e = character(4, 3);
    let d = weak_decompose(&e, &atoms, 0.5).unwrap();
    assert_eq!(d.iterations, 1);
    assert!(d.f_psd.norm() < 1e-12);

    let atoms = character_atoms(6).unwrap();
    let f = random_unit(6, 3);
    let d = weak_decompose(&f, &atoms, 0.25).unwrap();
    assert!(d.iterations <= 16);
    assert!(max_character_correlation(d.f_psd.values()) < 0.25);
    d.verify(&f, &atoms).unwrap();
}

#[test]
fn orthogonal_examples() {
    let atoms = character_atoms(4).unwrap();
    let f: Vec<f64> = character(4, 1)
        .values()
        .iter()
        .zip(character(4, 2).values())
        .map(|(a, b)| 0.6 * a + 0.6 * b)
        .collect();
    let f = FiniteVector::new(normalize(f.clone()).iter().map(|v| v * 0.6 * 2f64.sqrt()).collect()).unwrap();
    let d = orthogonal_weak_decompose(&f, &atoms, 0.5).unwrap();
    assert_eq!(d.iterations, 2);
    assert!(f.sub(&d.f_str).norm() < 1e-12);
    assert!(inner_product(&d.f_str, &d.f_psd).unwrap().abs() < 1e-12);

    let g = FiniteVector::new(vec![0.01; 16]).unwrap();
    let d = orthogonal_weak_decompose(&g, &atoms, 0.5).unwrap();
    assert_eq!(d.f_psd, g);
    assert!(d.f_str.norm() == 0.0);

    let atoms = character_atoms(6).unwrap();
    let f = random_unit(6, 4);
    let d = orthogonal_weak_decompose(&f, &atoms, 0.3).unwrap();
    assert!(inner_product(&d.f_str, &d.f_psd).unwrap().abs() <= 1e-10);
    assert!((d.f_str.norm_sq() + d.f_psd.norm_sq() - f.norm_sq()).abs() <= 1e-10);
}

#[test]
fn strong_examples() {
    let atoms = character_atoms(4).unwrap();
    let e = character(4, 6);
    let d = strong_decompose(&e, &atoms, 0.5, &GrowthFunction::linear(2.0), &StrongConfig::default())
        .unwrap();
    assert!(d.f_err.norm() < 1e-12);
    assert!(max_character_correlation(d.f_psd.values()) <= d.pseudorandomness_eps + 1e-9);
    let i = d.stage_index.unwrap();
    assert!(i >= 1 && i as f64 <= 1.0 / 0.25 + 1.0);

    let atoms = character_atoms(6).unwrap();
    for seed in 0..5 {
        let f = random_unit(6, 40 + seed);
        let d = strong_decompose(&f, &atoms, 0.4, &GrowthFunction::Exponential, &StrongConfig::default())
            .unwrap();
        d.verify(&f, &atoms).unwrap();
        assert!(d.f_err.norm() <= 0.4 + 1e-9);
        assert!(max_character_correlation(d.f_psd.values()) <= d.pseudorandomness_eps + 1e-9);
        assert!(d.stage_index.unwrap() as f64 <= 1.0 / 0.16 + 1.0);
    }
}

#[test]
fn strong_budget_is_explicit() {
    // Stage 1 captures the character, so stage 2 needs M = F(2) = 4.
    let atoms = character_atoms(6).unwrap();
    let f = character(6, 9);
    let config = StrongConfig {
        max_m: 3,
        time_limit: None,
    };
    let err = strong_decompose(&f, &atoms, 0.05, &GrowthFunction::Exponential, &config).unwrap_err();
    assert!(matches!(err, structrand::Error::BudgetExhausted { .. }), "{err}");
}

#[test]
fn pseudorandomness_level_examples() {
    let atoms = character_atoms(5).unwrap();
    let zero = FiniteVector::zeros(32);
    assert_eq!(pseudorandomness_level(&zero, &atoms).unwrap().found, 0.0);
    assert!((pseudorandomness_level(&character(5, 7), &atoms).unwrap().found - 1.0).abs() < 1e-12);
    let mut r = rng(5);
    let f = FiniteVector::new(uniform_values(&mut r, 32)).unwrap();
    let level = pseudorandomness_level(&f, &atoms).unwrap();
    assert!((level.found - max_character_correlation(f.values())).abs() <= 1e-12);
    assert_eq!(level.found, level.upper_bound);
}

#[test]
fn norm_precondition() {
    let atoms = character_atoms(3).unwrap();
    let f = FiniteVector::new(vec![2.0; 8]).unwrap();
    assert!(matches!(
        weak_decompose(&f, &atoms, 0.5),
        Err(structrand::Error::NormTooLarge { .. })
    ));
}
