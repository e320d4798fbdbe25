// Copyright 2026 The squeezecool Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use proptest::prelude::*;
use squeezecool_core::continuum::{pair_parameters, ContinuumParams, DriveConfig, PairConfigs, PairOptions};
use squeezecool_core::gaussian::lyapunov_steady;
use squeezecool_core::master::{apply_term, apply_term_literal, evolve, EvolveOptions, LindbladTerm, LiouvillianSpec};
use squeezecool_core::singlemode::{analyze, linear_model, Backend, BuildOptions, SingleModeParams};
use squeezecool_core::{BogoliubovPair, Complex, DensityMatrix, FockSpace, Op};

fn complex_matrix(d: usize) -> impl Strategy<Value = DMatrix<Complex<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_map(move |v| DMatrix::from_iterator(d, d, v.into_iter().map(|(re, im)| Complex::new(re, im))))
}

fn density(a: &DMatrix<Complex<f64>>) -> DMatrix<Complex<f64>> {
    let rho = a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn complex_rate_forms_agree(
        (o, a) in (2usize..6).prop_flat_map(|d| (complex_matrix(d), complex_matrix(d))),
        re in 0.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let space = FockSpace::single_mode(o.nrows()).unwrap();
        let term = LindbladTerm::new(Op::from_matrix(&space, o).unwrap(), Complex::new(re, im)).unwrap();
        let rho = density(&a);
        let dec = apply_term(&term, &rho).unwrap();
        let lit = apply_term_literal(&term, &rho).unwrap();
        prop_assert!((&dec - &lit).camax() < 1e-12);
        // generator output is traceless and Hermitian
        prop_assert!(dec.trace().norm() < 1e-12);
        prop_assert!((&dec - dec.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn short_evolution_keeps_a_density_matrix(
        (o, h, a) in (2usize..5).prop_flat_map(|d| (complex_matrix(d), complex_matrix(d), complex_matrix(d))),
        re in 0.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let space = FockSpace::single_mode(o.nrows()).unwrap();
        let herm = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
        let term = LindbladTerm::new(Op::from_matrix(&space, o).unwrap(), Complex::new(re, im)).unwrap();
        let spec = LiouvillianSpec::new(Op::from_matrix(&space, herm).unwrap(), vec![term]).unwrap();
        let rho0 = DensityMatrix::new(&space, density(&a)).unwrap();
        let rho = evolve(&rho0, &spec, 0.5, &EvolveOptions::default()).unwrap();
        prop_assert!(rho.check_invariants().is_ok());
    }

    #[test]
    fn sideband_pairs_satisfy_identity(b in 0.0f64..10.0, excess in 1e-3f64..10.0) {
        let pair = BogoliubovPair::from_sidebands(b + excess, b).unwrap();
        prop_assert!((pair.u * pair.u - pair.v * pair.v - 1.0).abs() < 1e-12 * (1.0 + pair.u * pair.u));
    }

    #[test]
    fn band_pairs_satisfy_identity(alpha in 1e-5f64..1e-2, eta1 in 0.05f64..0.3, ratio in 0.0f64..1.0) {
        let mut p = ContinuumParams::reference(1e5);
        p.alpha = alpha;
        p.eta1 = eta1;
        p.eta2 = eta1 * ratio;
        prop_assume!(p.validate().is_ok());
        for nu in p.grid() {
            for config in [DriveConfig::D, DriveConfig::Dbar] {
                let pair = pair_parameters(nu, &p, config).unwrap().pair;
                prop_assert!((pair.u * pair.u - pair.v * pair.v - 1.0).abs() < 1e-12 * (1.0 + pair.u * pair.u));
            }
        }
    }

    #[test]
    fn single_mode_steady_states_are_physical(ratio in 0.0f64..0.95, lq in 3.0f64..9.0, g in 0.05f64..1.5) {
        let mut p = SingleModeParams::reference(0.0, 10f64.powf(lq));
        p.eta2 = ratio * p.eta1;
        p.g = g;
        let r = analyze(&p, &BuildOptions::FULL, Backend::Gaussian).unwrap();
        prop_assert!(r.state.uncertainty_min_eigenvalue() > -1e-9);
        prop_assert!(r.report.var_x * r.report.var_p >= 1.0 - 1e-8);
        prop_assert!(r.report.occ_d >= -1e-12);
    }

    #[test]
    fn averaged_pair_states_are_physical(nu_frac in -1.0f64..1.0, lq in 3.0f64..6.0) {
        let p = ContinuumParams::reference(10f64.powf(lq));
        let configs = PairConfigs::new(nu_frac * 0.2, &p).unwrap();
        if let Ok(s) = configs.averaged_steady(&PairOptions::FULL) {
            prop_assert!(s.uncertainty_min_eigenvalue() > -1e-9);
        }
        let ideal = configs.averaged_steady(&PairOptions::IDEAL).unwrap();
        prop_assert!(ideal.uncertainty_min_eigenvalue() > -1e-9);
    }

    #[test]
    fn ideal_single_mode_is_the_dark_state(ratio in 0.0f64..0.9) {
        let p = SingleModeParams::reference(0.2 * ratio, 1e8);
        let s = lyapunov_steady(&linear_model(&p, &BuildOptions::IDEAL).unwrap().drift_diffusion().unwrap()).unwrap();
        let pair = BogoliubovPair::from_sidebands(0.2, 0.2 * ratio).unwrap();
        let want = (pair.u - pair.v) * (pair.u - pair.v);
        prop_assert!((s.var_x(0) - want).abs() < 1e-10 * want.max(1.0));
    }
}
