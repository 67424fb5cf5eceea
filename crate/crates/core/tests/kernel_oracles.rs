mod common;

use common::*;
use coulombium::grid::{Grid, Samples};
use coulombium::kernel::{b_bilinear, c_functional, c_g, c_plus, coulomb_pair_energy, potential_from_density, CPlusForm};
use coulombium::verify::{case_rng, random_density, random_profile};

fn grids() -> Vec<Grid> {
    vec![
        Grid::new(1.0, 3).unwrap(),
        Grid::new(4.0, 51).unwrap(),
        Grid::new(7.5, 201).unwrap(),
        Grid::new(10.0, 401).unwrap(),
    ]
}

#[test]
fn potential_matches_dense() {
    for (k, g) in grids().into_iter().enumerate() {
        for case in 0..5 {
            let f = random_profile(g, &mut case_rng(10 + k as u64, case), case % 2 == 0);
            let fast = potential_from_density(&f);
            assert!(max_rel(fast.values(), &dense_potential(&f)) < 1e-12, "N = {}", g.len());
        }
    }
}

#[test]
fn pair_energy_matches_dense() {
    for (k, g) in grids().into_iter().enumerate() {
        for case in 0..5 {
            let mut rng = case_rng(20 + k as u64, case);
            let f = random_profile(g, &mut rng, true);
            let h = random_profile(g, &mut rng, false);
            let fast = coulomb_pair_energy(&f, &h).unwrap();
            assert!(rel(fast, dense_pair(&f, &h)) < 1e-12, "{fast}");
            assert_eq!(fast, coulomb_pair_energy(&f, &h).unwrap());
            assert!(rel(fast, coulomb_pair_energy(&h, &f).unwrap()) < 1e-12);
        }
    }
}

#[test]
fn c_functional_matches_dense() {
    for (k, g) in grids().into_iter().skip(1).enumerate() {
        for case in 0..5 {
            let f = random_density(g, &mut case_rng(30 + k as u64, case), case % 2 == 1);
            for z in [0.5, 1.0, 2.0, 5.0] {
                let fast = c_functional(&f, z).value;
                assert!(rel(fast, dense_c_functional(&f, z)) < 1e-12, "z = {z}");
            }
        }
    }
}

#[test]
fn c_plus_forms_match_dense() {
    for (k, g) in grids().into_iter().skip(1).enumerate() {
        for case in 0..5 {
            let f = random_density(g, &mut case_rng(40 + k as u64, case), case % 2 == 1);
            let dense = dense_c_plus(&f);
            for form in CPlusForm::ALL {
                assert!(rel(c_plus(&f, form), dense) < 1e-12, "{form}");
            }
        }
    }
}

#[test]
fn g_forms_match_dense() {
    let g = Grid::new(6.0, 301).unwrap();
    for case in 0..5 {
        let mut rng = case_rng(50, case);
        let f = random_profile(g, &mut rng, true);
        let h = random_profile(g, &mut rng, false);
        assert!(rel(b_bilinear(&f, &h).unwrap(), dense_g_bilinear(&f, &h)) < 1e-12);
        assert!(rel(c_g(&f), dense_g_bilinear(&f, &f)) < 1e-12);
    }
}

#[test]
fn zero_input_gives_zero() {
    let g = Grid::new(3.0, 61).unwrap();
    let zero = Samples::zeros(g);
    assert!(potential_from_density(&zero).values().iter().all(|&v| v == 0.0));
    assert_eq!(coulomb_pair_energy(&zero, &zero).unwrap(), 0.0);
    assert_eq!(c_functional(&zero, 2.0).value, 0.0);
    for form in CPlusForm::ALL {
        assert_eq!(c_plus(&zero, form), 0.0);
    }
}
