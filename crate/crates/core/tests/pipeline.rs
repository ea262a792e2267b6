use std::sync::Arc;

use qrp_core::experiments::{gen_mixed_state_dataset, reservoir_features, Shots};
use qrp_core::linalg::{max_abs_diff, rows_to_matrix, CMatrix, RMatrix, C64};
use qrp_core::optics::{
    evolve_density, haar_unitary, lift_unitary, output_amplitudes, permanent_brute_force, pnr_distribution,
};
use qrp_core::tomography::{fidelity, hermitize, pack_params, project_physical, ridge_fit, unpack_params};
use qrp_core::{enumerate_up_to, DensityMatrix, Occupation, ParamStructure};

#[test]
fn lifted_elements_match_repeated_index_permanents() {
    let u = haar_unitary(3, 31).unwrap();
    let basis = Arc::new(enumerate_up_to(3, 3).unwrap());
    let lifted = lift_unitary(&u, &basis).unwrap();
    for (i, out) in basis.states().iter().enumerate() {
        for (j, input) in basis.states().iter().enumerate() {
            let got = lifted.matrix()[(i, j)];
            if out.total() != input.total() {
                assert_eq!(got, C64::new(0.0, 0.0));
                continue;
            }
            let (rows, cols) = (out.mode_list(), input.mode_list());
            let sub = CMatrix::from_fn(rows.len(), cols.len(), |a, b| u.matrix()[(rows[a], cols[b])]);
            let want = if rows.is_empty() {
                C64::new(1.0, 0.0)
            } else {
                permanent_brute_force(&sub) / (out.factorial_product() * input.factorial_product()).sqrt()
            };
            assert!((got - want).norm() < 1e-12, "{out:?} <- {input:?}: {got} vs {want}");
        }
    }
}

#[test]
fn pnr_statistics_of_a_pure_input_are_squared_amplitudes() {
    let u = haar_unitary(4, 5).unwrap();
    let basis = Arc::new(enumerate_up_to(4, 2).unwrap());
    let input = Occupation::new(vec![1, 0, 1, 0]);
    let mut psi = vec![C64::new(0.0, 0.0); basis.len()];
    psi[basis.index_of(&input).unwrap()] = C64::new(1.0, 0.0);
    let rho = DensityMatrix::pure(Arc::clone(&basis), &psi).unwrap();
    let dist = pnr_distribution(&evolve_density(&rho, &u).unwrap()).unwrap();
    let amps = output_amplitudes(&u, &input, &basis).unwrap();
    for (p, a) in dist.probabilities().iter().zip(&amps) {
        assert!((p - a.norm_sqr()).abs() < 1e-12);
    }
    assert!((dist.total() - 1.0).abs() < 1e-12);
}

#[test]
fn exact_reservoir_features_reconstruct_held_out_states() {
    let samples = gen_mixed_state_dataset(60, 2, 5).unwrap();
    let states: Vec<DensityMatrix> = samples.into_iter().map(|s| s.state).collect();
    let structure = ParamStructure::photon_number_blocks(Arc::clone(states[0].basis()));
    let x = reservoir_features(&states, &haar_unitary(4, 9).unwrap(), Shots::Exact, 0).unwrap();
    let y = rows_to_matrix(&states.iter().map(|s| pack_params(s, &structure).unwrap()).collect::<Vec<_>>());
    let split = 45;
    let fit_rows = |m: &RMatrix, r: std::ops::Range<usize>| m.rows(r.start, r.len()).into_owned();
    let model = ridge_fit(&fit_rows(&x, 0..split), &fit_rows(&y, 0..split), 1e-10).unwrap();
    let predicted = model.predict_matrix(&fit_rows(&x, split..states.len())).unwrap();
    for (k, truth) in states[split..].iter().enumerate() {
        let params: Vec<f64> = predicted.row(k).iter().copied().collect();
        let rho_h = hermitize(&unpack_params(&params, &structure).unwrap().matrix).unwrap();
        let rho = project_physical(&rho_h, truth.basis()).unwrap().state;
        let f = fidelity(&rho, truth).unwrap();
        assert!(f > 0.999, "held-out state {k}: fidelity {f}");
    }
}

#[test]
fn fidelity_is_invariant_under_a_common_rotation() {
    let samples = gen_mixed_state_dataset(10, 2, 17).unwrap();
    let basis = Arc::clone(samples[0].state.basis());
    let lifted = lift_unitary(&haar_unitary(2, 3).unwrap(), &basis).unwrap();
    let rotate = |rho: &DensityMatrix| {
        let m = lifted.matrix() * rho.matrix() * lifted.matrix().adjoint();
        DensityMatrix::new(Arc::clone(&basis), m).unwrap()
    };
    for pair in samples.windows(2) {
        let (a, b) = (&pair[0].state, &pair[1].state);
        let before = fidelity(a, b).unwrap();
        let after = fidelity(&rotate(a), &rotate(b)).unwrap();
        assert!((before - after).abs() < 1e-8, "{before} vs {after}");
        assert!(max_abs_diff(rotate(a).matrix(), a.matrix()) > 0.0);
    }
}
