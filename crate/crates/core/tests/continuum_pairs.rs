// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use squeezecool_core::continuum::{
    default_strobe_dt, pair_parameters, stroboscopic_steady, DbarForm, DriveConfig, PairConfigs,
    PairOptions, StrobeOptions,
};
use squeezecool_core::gaussian::{GaussianState, LinearJump, LinearModel};
use squeezecool_core::master::steady_state;
use squeezecool_core::metrics::two_mode_quadrature_variance;
use squeezecool_core::singlemode::relative_mismatch;
use squeezecool_core::{Complex, ContinuumParams, FockSpace};

/// Levels needed for the thermal-like tail `(v/u)^{2n}` to drop below 1e-9;
/// the covariance error sits about two decades above the tail.
fn fock_dim_for(u: f64, v: f64) -> usize {
    let ratio = (v / u).powi(2);
    if ratio <= 0.0 {
        return 4;
    }
    ((1e-9f64.ln() / ratio.ln()).ceil() as usize + 2).clamp(4, 34)
}

#[test]
fn pair_fock_and_gaussian_agree_at_center() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut done = 0;
    while done < 6 {
        let mut p = ContinuumParams::reference(10f64.powf(rng.random_range(3.0..6.0)));
        p.eta2 = p.eta1 * rng.random_range(0.05..0.8);
        let configs = PairConfigs::new(0.0, &p).unwrap();
        let (u, v) = (configs.d.pair.u, configs.d.pair.v);
        if v > 1.0 {
            continue;
        }
        for opts in [PairOptions::IDEAL, PairOptions::FULL] {
            let model = configs.averaged_model(&opts).unwrap();
            let g = configs.averaged_steady(&opts).unwrap();
            let dim = fock_dim_for(u, v);
            let rho = steady_state(&model.to_fock(&FockSpace::two_mode(dim, dim).unwrap()).unwrap()).unwrap();
            let f = GaussianState::from_density(&rho).unwrap();
            let m = relative_mismatch(&g.cov, &f.cov);
            assert!(m < 1e-6, "mismatch {m} at u={u} v={v} dim={dim}");
        }
        done += 1;
    }
}

fn embed(model: &LinearModel<f64>, offset: usize, n_modes: usize) -> Vec<(LinearJump<f64>, Complex<f64>)> {
    assert_eq!(model.hamiltonian.matrix().amax(), 0.0);
    model
        .jumps
        .iter()
        .map(|(j, g)| {
            let mut a = vec![Complex::new(0.0, 0.0); n_modes];
            let mut b = a.clone();
            for k in 0..j.n_modes() {
                a[offset + k] = j.annihilation[k];
                b[offset + k] = j.creation[k];
            }
            (LinearJump::new(a, b).unwrap(), *g)
        })
        .collect()
}

#[test]
fn pairs_evolve_independently() {
    let p = ContinuumParams::reference(1e4);
    let first = PairConfigs::new(0.0, &p).unwrap().averaged_model(&PairOptions::FULL).unwrap();
    let second = PairConfigs::new(0.1, &p).unwrap().averaged_model(&PairOptions::FULL).unwrap();
    let dim = 3;
    let mut joint = LinearModel::new(4);
    for (j, g) in embed(&first, 0, 4).into_iter().chain(embed(&second, 2, 4)) {
        joint.push(j, g).unwrap();
    }
    let rho = steady_state(&joint.to_fock(&FockSpace::new(vec![dim; 4], false).unwrap()).unwrap()).unwrap();
    let pair = FockSpace::two_mode(dim, dim).unwrap();
    let r1 = steady_state(&first.to_fock(&pair).unwrap()).unwrap();
    let r2 = steady_state(&second.to_fock(&pair).unwrap()).unwrap();
    let product: DMatrix<Complex<f64>> = r1.matrix().kronecker(r2.matrix());
    assert!((rho.matrix() - product).camax() < 1e-8);
}

#[test]
fn configurations_commute_below_the_cutoff() {
    let p = ContinuumParams::reference(1e5);
    let dim = 6;
    let space = FockSpace::two_mode(dim, dim).unwrap();
    for nu in [0.0, 0.1, -0.2] {
        let configs = PairConfigs::new(nu, &p).unwrap();
        let d = configs.d.jump().unwrap().to_op(&space).unwrap();
        let db = configs.dbar.jump().unwrap().to_op(&space).unwrap();
        let comm = d.commutator(&db).unwrap();
        for i in 0..space.dim() {
            let (_, occ) = space.decompose(i);
            if occ.iter().all(|&n| n + 1 < dim) {
                for j in 0..space.dim() {
                    assert!(comm.matrix()[(i, j)].norm() < 1e-12, "nu={nu} ({i},{j})");
                }
            }
        }
    }
    let c = PairConfigs::new(0.0, &p).unwrap();
    assert!((c.d.pair.u - 5f64.sqrt()).abs() < 1e-12 && (c.d.pair.v - 2.0).abs() < 1e-12);
}

#[test]
fn literal_bar_form_matches_at_center_only() {
    let mut p = ContinuumParams::reference(1e5);
    p.dbar_form = DbarForm::Literal;
    let c0 = pair_parameters(0.0, &p, DriveConfig::Dbar).unwrap();
    assert!((c0.pair.u - 5f64.sqrt()).abs() < 1e-12 && (c0.pair.v - 2.0).abs() < 1e-12);
    assert!(c0.dbar_mismatch < 1e-12);
    let c1 = pair_parameters(0.2, &p, DriveConfig::Dbar).unwrap();
    assert!(c1.dbar_mismatch > 1e-3);
}

#[test]
fn averaged_ideal_band_is_two_mode_squeezed() {
    let p = ContinuumParams::reference(1e5);
    for nu in p.grid() {
        let c = PairConfigs::new(nu, &p).unwrap();
        let s = c.averaged_steady(&PairOptions::IDEAL).unwrap();
        let occ = c.d.occupation(&s).unwrap() + c.dbar.occupation(&s).unwrap();
        assert!(occ.abs() < 1e-8, "nu={nu}: {occ}");
        let (u, v) = (c.d.pair.u, c.d.pair.v);
        let var = two_mode_quadrature_variance(&s, (0, 1)).unwrap();
        assert!((var - (u - v) * (u - v) / 2.0).abs() < 1e-8);
    }
    let c = PairConfigs::new(0.0, &p).unwrap();
    let s = c.averaged_steady(&PairOptions::IDEAL).unwrap();
    let want = (5f64.sqrt() - 2.0).powi(2) / 2.0;
    assert!((two_mode_quadrature_variance(&s, (0, 1)).unwrap() - want).abs() < 1e-8);
}

#[test]
fn stroboscopic_cycle_tends_to_the_average() {
    let p = ContinuumParams::reference(1e6);
    let g0 = pair_parameters(0.0, &p, DriveConfig::D).unwrap().gamma_sq.norm();
    let strobe = StrobeOptions::default();
    let fast = stroboscopic_steady(0.0, &p, &PairOptions::FULL, 1e-3 / g0, &strobe).unwrap();
    let slow = stroboscopic_steady(0.0, &p, &PairOptions::FULL, 10.0 / g0, &strobe).unwrap();
    assert!(fast.relative_mismatch < 1e-4);
    assert!(slow.relative_mismatch > 1e-2);
    assert_eq!(default_strobe_dt(&p).unwrap(), 1e-3 / g0);
    // the ideal generators share a dark state, so any cycle length keeps it
    let ideal = stroboscopic_steady(0.0, &p, &PairOptions::IDEAL, 10.0 / g0, &strobe).unwrap();
    assert!(ideal.relative_mismatch < 1e-8);
}
