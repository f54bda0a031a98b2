mod common;

use approx::assert_abs_diff_eq;
use common::*;
use grlgq::grassmann::*;
use grlgq::lvq::*;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn prototype_and_relevance_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mode in [Mode::Glgq, Mode::Grlgq] {
        for _ in 0..5 {
            let inst = controlled_instance(&mut rng, mode);
            let (ep, em, el) = gradient_errors(&inst, 1e-6);
            assert!(ep < 1e-4 && em < 1e-4, "prototype gradient errors {ep:e} {em:e}");
            assert!(el < 1e-6, "relevance gradient error {el:e}");
        }
    }
}

#[test]
fn controlled_instances_have_the_prescribed_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inst = controlled_instance(&mut rng, Mode::Glgq);
    let pd = principal_decomposition(&inst.sample, &inst.model.prototypes[0].subspace).unwrap();
    for (a, b) in pd.angles.iter().zip(&inst.angles_plus) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-10);
    }
}

#[test]
fn small_step_decreases_the_sample_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for mode in [Mode::Glgq, Mode::Grlgq] {
        for _ in 0..5 {
            let mut inst = controlled_instance(&mut rng, mode);
            let sample = Sample { subspace: inst.sample.clone(), label: 1 };
            let config = match mode {
                Mode::Glgq => TrainConfig::glgq(1e-4, 1, 0),
                Mode::Grlgq => TrainConfig::grlgq(1e-4, 1e-6, 1, 0),
            };
            let before = train_step(&mut inst.model, &sample, &config).unwrap().mu;
            let after = find_winners(&inst.model, &inst.sample, 1).unwrap().mu;
            assert!(after < before, "{mode}: {before} -> {after}");
        }
    }
}

#[test]
fn principal_angles_match_the_quadratic_formula_in_g52() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let a = Subspace::random(5, 2, &mut rng).unwrap();
        let b = Subspace::random(5, 2, &mut rng).unwrap();
        let pd = principal_decomposition(&a, &b).unwrap();
        let oracle = quadratic_angles(a.basis(), b.basis());
        assert_abs_diff_eq!(pd.angles[0], oracle[0], epsilon = 1e-8);
        assert_abs_diff_eq!(pd.angles[1], oracle[1], epsilon = 1e-8);
    }
}

#[test]
fn first_angle_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (dim, d) in [(3, 1), (3, 1), (3, 1), (4, 2), (5, 2)] {
        let a = Subspace::random(dim, d, &mut rng).unwrap();
        let b = Subspace::random(dim, d, &mut rng).unwrap();
        let pd = principal_decomposition(&a, &b).unwrap();
        assert_abs_diff_eq!(pd.angles[0], grid_first_angle(a.basis(), b.basis()), epsilon = 1e-3);
    }
}

#[test]
fn principal_vectors_realize_the_cosines() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let a = Subspace::random(8, 3, &mut rng).unwrap();
    let b = Subspace::random(8, 3, &mut rng).unwrap();
    let pd = principal_decomposition(&a, &b).unwrap();
    let cross = pd.principal_left.tr_mul(&pd.principal_right);
    assert_abs_diff_eq!(cross, DMatrix::from_diagonal(&pd.cosines.clone().into()), epsilon = 1e-10);
    assert_abs_diff_eq!(pd.angles.as_slice(), eigen_angles(a.basis(), b.basis()).as_slice(), epsilon = 1e-7);
}

#[test]
fn orthonormalize_matches_projector_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (dim, d) in [(6, 2), (10, 4), (7, 7)] {
        let v = gaussian(dim, d, &mut rng);
        let w = orthonormalize_columns(&v).unwrap();
        let oracle = &v * (v.tr_mul(&v)).try_inverse().unwrap() * v.transpose();
        assert_abs_diff_eq!(w.projector(), oracle, epsilon = 1e-10);
        assert!(w.orthonormality_error() < 1e-12);
    }
}

#[test]
fn set_subspace_is_the_top_eigenspace_of_the_scatter_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let (dim, m, d) = (12, 7, 3);
    let x = DataMatrix::normalized(gaussian(dim, m, &mut rng)).unwrap();
    let factors = subspace_from_set(&x, d).unwrap();
    let eig = SymmetricEigen::new(x.entries() * x.entries().transpose());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let top = DMatrix::from_fn(dim, d, |r, c| eig.eigenvectors[(r, order[c])]);
    assert_abs_diff_eq!(factors.subspace.projector(), &top * top.transpose(), epsilon = 1e-9);
    for k in 0..d {
        assert_abs_diff_eq!(factors.singular_values[k], eig.eigenvalues[order[k]].sqrt(), epsilon = 1e-10);
    }
    // rank-d approximation residual in spectral norm is the (d+1)-th singular value
    let residual = x.entries() - factors.subspace.projector() * x.entries();
    let res_top = SymmetricEigen::new(residual.tr_mul(&residual)).eigenvalues.max().sqrt();
    assert_abs_diff_eq!(res_top, eig.eigenvalues[order[d]].sqrt(), epsilon = 1e-9);
}

#[test]
fn image_contribution_recovers_principal_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let x = DataMatrix::normalized(gaussian(15, 6, &mut rng)).unwrap();
    let factors = subspace_from_set(&x, 4).unwrap();
    let w = Subspace::random(15, 4, &mut rng).unwrap();
    let pd = principal_decomposition(&factors.subspace, &w).unwrap();
    let m = image_contribution(&factors, &pd.rot_left).unwrap();
    assert_eq!(m.shape(), (6, 4));
    assert!(max_abs(&(x.entries() * &m - &pd.principal_left)) < 1e-8);
}

#[test]
fn g_diagonal_matches_its_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let a = Subspace::random(9, 3, &mut rng).unwrap();
    let b = Subspace::random(9, 3, &mut rng).unwrap();
    let pd = principal_decomposition(&a, &b).unwrap();
    let lambda = RelevanceVector::from_weights(vec![0.2, 0.5, 0.3]).unwrap();
    let g = g_matrix_diagonal(&pd, &lambda);
    for k in 0..3 {
        let t = pd.angles[k];
        assert_abs_diff_eq!(g[k], 2.0 * lambda.weights()[k] * t / t.sin(), epsilon = 1e-12);
    }
}
