#![allow(dead_code)]

use std::path::Path;

use grlgq::grassmann::{RelevanceVector, Subspace};
use grlgq::lvq::{Mode, ModelState, Prototype};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Orthogonal n×n matrix by Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut q = gaussian(n, n, rng);
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let proj = q.column(k).dot(&q.column(j));
                let qk = q.column(k).into_owned();
                q.column_mut(j).axpy(-proj, &qk, 1.0);
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

/// Cosines of the principal angles as square roots of the eigenvalues of
/// AᵀA, A = P₁ᵀP₂ (no SVD involved), sorted descending. The columns of the
/// inputs need not be orthonormal.
pub fn eigen_cosines(p1: &DMatrix<f64>, p2: &DMatrix<f64>) -> Vec<f64> {
    let a = p1.tr_mul(p2);
    let eig = SymmetricEigen::new(a.tr_mul(&a));
    let mut c: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt().min(1.0))
        .collect();
    c.sort_by(|a, b| b.partial_cmp(a).unwrap());
    c
}

pub fn eigen_angles(p1: &DMatrix<f64>, p2: &DMatrix<f64>) -> Vec<f64> {
    eigen_cosines(p1, p2).into_iter().map(f64::acos).collect()
}

pub fn weighted(angles: &[f64], lambda: &[f64]) -> f64 {
    angles.iter().zip(lambda).map(|(t, l)| l * t * t).sum()
}

/// μ recomputed from scratch for arbitrary (not necessarily orthonormal)
/// prototype matrices.
pub fn mu_oracle(p: &DMatrix<f64>, v_plus: &DMatrix<f64>, v_minus: &DMatrix<f64>, lambda: &[f64]) -> f64 {
    let dp = weighted(&eigen_angles(p, v_plus), lambda);
    let dm = weighted(&eigen_angles(p, v_minus), lambda);
    (dp - dm) / (dp + dm)
}

/// A sample and two prototypes with prescribed principal angles: with Q a
/// random orthogonal 10×10 matrix, P = Q[:, 0..3], W⁺ leans from P towards
/// Q[:, 3..6] and W⁻ towards Q[:, 6..9]. Angles are drawn from (lo, hi) with
/// pairwise gaps of at least 0.05; prototype bases get a random rotation.
pub struct Instance {
    pub sample: Subspace,
    pub model: ModelState,
    pub angles_plus: Vec<f64>,
    pub angles_minus: Vec<f64>,
}

fn spread_angles<R: Rng>(k: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if a.windows(2).all(|w| w[1] - w[0] >= 0.05) {
            return a;
        }
    }
}

pub fn controlled_instance<R: Rng>(rng: &mut R, mode: Mode) -> Instance {
    let d = 3;
    let q = random_orthogonal(10, rng);
    let p = q.columns(0, d).into_owned();
    let lean = |angles: &[f64], offset: usize, rng: &mut R| {
        let mut w = DMatrix::zeros(10, d);
        for k in 0..d {
            let col = q.column(k) * angles[k].cos() + q.column(offset + k) * angles[k].sin();
            w.set_column(k, &col);
        }
        Subspace::new(w * random_orthogonal(d, rng)).unwrap()
    };
    let angles_plus = spread_angles(d, 0.1, 1.4, rng);
    let angles_minus = spread_angles(d, 0.1, 1.4, rng);
    let w_plus = lean(&angles_plus, 3, rng);
    let w_minus = lean(&angles_minus, 6, rng);
    let mut model = ModelState::new(
        vec![
            Prototype { subspace: w_plus, label: 1 },
            Prototype { subspace: w_minus, label: 2 },
        ],
        mode,
    )
    .unwrap();
    if mode == Mode::Grlgq {
        let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        model.relevance = RelevanceVector::from_weights(raw.iter().map(|r| r / total).collect()).unwrap();
    }
    Instance {
        sample: Subspace::new(p * random_orthogonal(d, rng)).unwrap(),
        model,
        angles_plus,
        angles_minus,
    }
}

pub fn write_pgm_file(path: &Path, width: usize, height: usize, pixels: &[u8]) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, grlgq::io::pgm::encode_pgm(width, height, pixels)).unwrap();
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Relative errors (‖analytic − numeric‖ / ‖numeric‖) of ∂μ/∂V⁺, ∂μ/∂V⁻ and
/// ∂μ/∂λ against central differences with step `h`, where every perturbed
/// μ is recomputed from fresh principal angles.
pub fn gradient_errors(inst: &Instance, h: f64) -> (f64, f64, f64) {
    use grlgq::lvq::{find_winners, prototype_gradient, relevance_gradient, Winner};
    let outcome = find_winners(&inst.model, &inst.sample, 1).unwrap();
    let lambda = inst.model.relevance.weights().to_vec();
    let p = inst.sample.basis();
    let vp = outcome.pd_same.principal_right.clone();
    let vm = outcome.pd_other.principal_right.clone();

    let numeric = |which_plus: bool| {
        let base = if which_plus { &vp } else { &vm };
        DMatrix::from_fn(base.nrows(), base.ncols(), |r, c| {
            let mut up = base.clone();
            let mut down = base.clone();
            up[(r, c)] += h;
            down[(r, c)] -= h;
            let (fu, fd) = if which_plus {
                (mu_oracle(p, &up, &vm, &lambda), mu_oracle(p, &down, &vm, &lambda))
            } else {
                (mu_oracle(p, &vp, &up, &lambda), mu_oracle(p, &vp, &down, &lambda))
            };
            (fu - fd) / (2.0 * h)
        })
    };
    let rel = |a: &DMatrix<f64>, n: &DMatrix<f64>| (a - n).norm() / n.norm();

    let a_plus = prototype_gradient(&outcome, &inst.model.relevance, Winner::Same).unwrap();
    let a_minus = prototype_gradient(&outcome, &inst.model.relevance, Winner::Other).unwrap();
    let err_plus = rel(&a_plus, &numeric(true));
    let err_minus = rel(&a_minus, &numeric(false));

    let a_rel = DMatrix::from_column_slice(lambda.len(), 1, &relevance_gradient(&outcome).unwrap());
    let n_rel = DMatrix::from_fn(lambda.len(), 1, |k, _| {
        let mut up = lambda.clone();
        let mut down = lambda.clone();
        up[k] += h;
        down[k] -= h;
        (mu_oracle(p, &vp, &vm, &up) - mu_oracle(p, &vp, &vm, &down)) / (2.0 * h)
    });
    (err_plus, err_minus, rel(&a_rel, &n_rel))
}

/// Principal angles of two planes from the closed-form eigenvalues of the
/// 2×2 matrix M = AAᵀ, A = P₁ᵀP₂: (tr ± sqrt(tr² − 4 det)) / 2.
pub fn quadratic_angles(p1: &DMatrix<f64>, p2: &DMatrix<f64>) -> [f64; 2] {
    let a = p1.tr_mul(p2);
    let m = &a * a.transpose();
    let (tr, det) = (m[(0, 0)] + m[(1, 1)], m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]);
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let hi = (tr + disc) / 2.0;
    let lo = (tr - disc) / 2.0;
    [hi.max(0.0).sqrt().min(1.0).acos(), lo.max(0.0).sqrt().min(1.0).acos()]
}

/// θ₁ by brute-force maximization of uᵀv over unit u ∈ span(P₁), v ∈ span(P₂).
/// Each unit sphere of a line is {±p}; of a plane, a circle scanned on a grid
/// and refined around the best point.
pub fn grid_first_angle(p1: &DMatrix<f64>, p2: &DMatrix<f64>) -> f64 {
    fn unit_points(p: &DMatrix<f64>, center: f64, span: f64, steps: usize) -> Vec<(f64, nalgebra::DVector<f64>)> {
        match p.ncols() {
            1 => vec![(0.0, p.column(0).into_owned()), (std::f64::consts::PI, -p.column(0))],
            2 => (0..steps)
                .map(|i| {
                    let a = center - span / 2.0 + span * i as f64 / steps as f64;
                    (a, p.column(0) * a.cos() + p.column(1) * a.sin())
                })
                .collect(),
            _ => panic!("grid search supports dimension 1 or 2"),
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let (mut cu, mut cv, mut span) = (0.0, 0.0, two_pi);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..6 {
        let us = unit_points(p1, cu, span, 200);
        let vs = unit_points(p2, cv, span, 200);
        for (a, u) in &us {
            for (b, v) in &vs {
                let s = u.dot(v);
                if s > best {
                    best = s;
                    cu = *a;
                    cv = *b;
                }
            }
        }
        span /= 20.0;
    }
    best.min(1.0).acos()
}
