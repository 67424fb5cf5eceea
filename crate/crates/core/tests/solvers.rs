use coulombium::background::{abs_moment, delta_approximant};
use coulombium::diagnostics::{moment, tail_mass};
use coulombium::energy::{effective_potential, el_residual, rayleigh_quotient, total_energy};
use coulombium::grid::{integrate, second_difference, Grid, Samples};
use coulombium::kernel::c_functional;
use coulombium::rearrange::symmetric_decreasing_rearrangement;
use coulombium::solver::{gradient_solve, random_profile, scf_solve, GroundState};
use coulombium::{BackgroundCharge, CoreError, SolverConfig, WaveFn};

fn cfg(half_width: f64, n_points: usize) -> SolverConfig {
    SolverConfig {
        half_width,
        n_points,
        ..SolverConfig::default()
    }
}

fn point(z: f64) -> BackgroundCharge {
    BackgroundCharge::point(z).unwrap()
}

fn solve(z: f64, c: &SolverConfig) -> GroundState {
    scf_solve(&point(z), c, None).unwrap()
}

/// `u(x)` by linear interpolation, zero outside the grid.
fn interpolate(u: &Samples, x: f64) -> f64 {
    let g = u.grid();
    let t = x / g.spacing() + g.center() as f64;
    if t <= 0.0 || t >= (g.len() - 1) as f64 {
        return 0.0;
    }
    let k = t.floor() as usize;
    let frac = t - k as f64;
    (1.0 - frac) * u.values()[k] + frac * u.values()[k + 1]
}

#[test]
fn methods_agree_on_reference_grid() {
    let c = SolverConfig::default();
    for z in [1.0, 1.5, 2.0, 5.0] {
        let a = scf_solve(&point(z), &c, None).unwrap();
        let b = gradient_solve(&point(z), &c, None).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.energy.total - b.energy.total).abs() <= 10.0 * c.tol_energy, "z = {z}");
        assert!((a.epsilon - b.epsilon).abs() <= 1e-5, "z = {z}");
        for s in [&a, &b] {
            assert!(s.residual <= c.tol_residual);
            assert!(el_residual(&s.u, s.epsilon, &point(z)).unwrap() <= c.tol_residual);
            assert!((integrate(&s.u.density()) - 1.0).abs() <= 1e-10);
            assert!(s.warnings.is_empty(), "{:?}", s.warnings);
        }
    }
}

#[test]
fn accepted_iterates_stay_normalized_and_descend() {
    let c = cfg(15.0, 1501);
    for state in [solve(2.0, &c), gradient_solve(&point(2.0), &c, None).unwrap()] {
        assert_eq!(state.history.len(), state.iterations + 1);
        for w in state.history.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs().max(1.0));
        }
    }
}

#[test]
fn multiplier_is_rayleigh_quotient() {
    let c = cfg(15.0, 1501);
    for z in [1.0, 2.0] {
        for s in [solve(z, &c), gradient_solve(&point(z), &c, None).unwrap()] {
            let rq = rayleigh_quotient(&s.u, &point(z)).unwrap();
            assert!((rq - s.epsilon).abs() <= c.tol_residual, "{rq} vs {}", s.epsilon);
        }
    }
}

#[test]
fn residual_tracks_multiplier_shift() {
    let s = solve(2.0, &cfg(15.0, 1501));
    let r = el_residual(&s.u, s.epsilon + 0.1, &point(2.0)).unwrap();
    assert!((r - 0.1).abs() < 1e-6, "{r}");
}

#[test]
fn second_order_under_refinement() {
    let e: Vec<f64> = [751, 1501, 3001]
        .iter()
        .map(|&n| solve(2.0, &cfg(15.0, n)).energy.total)
        .collect();
    let ratio = (e[0] - e[1]) / (e[1] - e[2]);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn stationary_under_dilation() {
    // the O(h²) defect of the discrete virial grows with the charge
    for (z, c) in [(1.0, cfg(30.0, 6001)), (2.0, cfg(30.0, 6001)), (5.0, cfg(15.0, 6001))] {
        let s = solve(z, &c);
        let c = c_functional(&s.u.density(), z).value;
        assert!((2.0 * s.energy.kinetic - c).abs() < 1e-4, "z = {z}");

        let dilated = |lambda: f64| {
            let u = Samples::from_fn(*s.u.grid(), |x| lambda.sqrt() * interpolate(s.u.samples(), lambda * x));
            total_energy(&WaveFn::normalize(u).unwrap(), &point(z), false).unwrap().total
        };
        let d = 1e-3;
        let slope = (dilated(1.0 + d) - dilated(1.0 - d)) / (2.0 * d);
        assert!(slope.abs() < 1e-4, "z = {z}: {slope}");
    }
}

/// With `w(x) = s^{-1/2} u(x / s)`, `s³ = 2`, the minimizer of `E` solves
/// `-w'' + V[w] w = s^{-2} ε w`.
#[test]
fn rescaled_minimizer_solves_unit_coupling_system() {
    let c = cfg(15.0, 1501);
    let z = 2.0;
    let state = solve(z, &c);
    let s = 2.0_f64.cbrt();
    let grid = Grid::new(s * c.half_width, c.n_points).unwrap();
    let w = WaveFn::normalize(Samples::new(grid, state.u.values().iter().map(|v| v / s.sqrt()).collect()).unwrap()).unwrap();
    let v = effective_potential(&w, &point(z)).unwrap();
    let d2 = second_difference(w.samples());
    let mu = state.epsilon / (s * s);
    let r: f64 = (1..grid.len() - 1)
        .map(|i| (-d2.values()[i] + (v.values()[i] - mu) * w.values()[i]).powi(2))
        .sum::<f64>();
    let residual = (grid.spacing() * r).sqrt();
    assert!(residual <= c.tol_residual, "{residual}");
}

#[test]
fn neutral_minimizer_is_symmetric_decreasing() {
    let c = SolverConfig::default();
    let s = solve(1.0, &c);
    let star = symmetric_decreasing_rearrangement(&s.u.density()).unwrap().map(f64::sqrt);
    let worst = s.u.values().iter().zip(star.values()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn asymmetric_start_relaxes_to_symmetric_state() {
    let c = cfg(20.0, 2001);
    let u0 = random_profile(c.grid().unwrap(), 3).unwrap();
    assert!(u0.values() != u0.reflect().values());
    let s = gradient_solve(&point(1.0), &c, Some(u0)).unwrap();
    let star = symmetric_decreasing_rearrangement(&s.u.density()).unwrap().map(f64::sqrt);
    let worst = s.u.values().iter().zip(star.values()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst < 1e-5, "{worst}");
    let reference = solve(1.0, &c);
    assert!((s.energy.total - reference.energy.total).abs() < 1e-9);
}

#[test]
fn random_start_is_reproducible() {
    let c = SolverConfig {
        random_start: true,
        seed: 11,
        ..cfg(15.0, 1501)
    };
    let a = scf_solve(&point(1.5), &c, None).unwrap();
    let b = scf_solve(&point(1.5), &c, None).unwrap();
    assert_eq!(a.u, b.u);
    assert_eq!(a.history, b.history);
    assert!((a.energy.total - solve(1.5, &cfg(15.0, 1501)).energy.total).abs() < 1e-9);
}

#[test]
fn truncation_insensitive_for_ions() {
    let a = solve(2.0, &cfg(15.0, 3001));
    let b = solve(2.0, &cfg(30.0, 6001));
    assert!((a.energy.total - b.energy.total).abs() < 1e-8);
    let (ma, mb) = (moment(&a.u.density(), 1.0), moment(&b.u.density(), 1.0));
    assert!(ma.is_finite() && (ma - mb).abs() < 1e-8);
    let tails: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|&r| tail_mass(&b.u.density(), r)).collect();
    assert!(tails.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn subcritical_charge_is_flagged() {
    let c = cfg(30.0, 3001);
    for result in [scf_solve(&point(0.5), &c, None), gradient_solve(&point(0.5), &c, None)] {
        assert!(
            matches!(
                result,
                Err(CoreError::DivergingEnergy { .. }) | Err(CoreError::MaxIterExceeded { .. }) | Err(CoreError::LineSearchStalled { .. })
            ),
            "{result:?}"
        );
    }
}

#[test]
fn narrow_bump_matches_point_charge() {
    let c = SolverConfig::default();
    let grid = c.grid().unwrap();
    let rho = delta_approximant(4, &grid).unwrap().scale(-1.0);
    let bg = BackgroundCharge::sampled(rho).unwrap();
    let bump = scf_solve(&bg, &c, None).unwrap();
    let reference = solve(1.0, &c);
    let gap = (bump.energy.total - reference.energy.total).abs();
    assert!(gap < 0.5 * abs_moment(&bg) + 1e-3, "{gap}");
    let gd = gradient_solve(&bg, &c, None).unwrap();
    assert!((gd.energy.total - bump.energy.total).abs() < 1e-9);
}

#[test]
fn shifted_background_shifts_state() {
    let c = cfg(20.0, 2001);
    let grid = c.grid().unwrap();
    let centered = delta_approximant(2, &grid).unwrap().scale(-2.0);
    let k = 100;
    let mut moved = Samples::zeros(grid);
    for i in 0..grid.len() - k {
        moved.values_mut()[i + k] = centered.values()[i];
    }
    let a = scf_solve(&BackgroundCharge::sampled(centered).unwrap(), &c, None).unwrap();
    let b = scf_solve(&BackgroundCharge::sampled(moved).unwrap(), &c, None).unwrap();
    assert!((a.energy.total - b.energy.total).abs() < 1e-8);
    let peak = |s: &GroundState| {
        let v = s.u.values();
        (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap()
    };
    assert_eq!(peak(&b), peak(&a) + k);
}
