//! Winner selection, analytic gradients of the relative distance difference
//! μ = (d⁺ − d⁻)/(d⁺ + d⁻), and the stochastic training loop.
//!
//! Gradients are taken with respect to the rotated prototype `V = W·Q_W`
//! from the sample/prototype decomposition; the update `V − η·∇` is then
//! pulled back onto the manifold by re-orthonormalization.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{
    stack_columns, EpochStats, InitStrategy, Label, Mode, ModelState, Prototype, Sample,
    SampleOutcome, TrainConfig, Winner,
};
use crate::error::{Error, Result};
use crate::grassmann::{
    adaptive_squared_distance, g_matrix_diagonal, orthonormalize_columns, principal_decomposition,
    PrincipalDecomposition, RelevanceVector, Subspace,
};

/// Below this value of d⁺ + d⁻ the relative distance difference is undefined.
pub const DEGENERATE_SUM: f64 = 1e-15;

/// μ = (d⁺ − d⁻)/(d⁺ + d⁻).
pub fn relative_distance_difference(d_plus: f64, d_minus: f64) -> Result<f64> {
    let sum = d_plus + d_minus;
    if sum < DEGENERATE_SUM {
        return Err(Error::DegenerateSample { sum });
    }
    Ok((d_plus - d_minus) / sum)
}

/// Per-sample cost with identity squashing: μ itself.
pub fn sample_cost(outcome: &SampleOutcome) -> Result<f64> {
    relative_distance_difference(outcome.d_plus, outcome.d_minus)
}

/// Closest same-label and closest other-label prototype to `p`. Ties go to
/// the lowest prototype index.
pub fn find_winners(model: &ModelState, p: &Subspace, label: Label) -> Result<SampleOutcome> {
    let mut same: Option<(usize, f64, PrincipalDecomposition)> = None;
    let mut other: Option<(usize, f64, PrincipalDecomposition)> = None;
    for (i, proto) in model.prototypes.iter().enumerate() {
        let pd = principal_decomposition(p, &proto.subspace)?;
        let dist = adaptive_squared_distance(&pd, &model.relevance);
        let slot = if proto.label == label {
            &mut same
        } else {
            &mut other
        };
        if slot.as_ref().is_none_or(|(_, best, _)| dist < *best) {
            *slot = Some((i, dist, pd));
        }
    }
    let (winner_same, d_plus, pd_same) = same.ok_or_else(|| {
        Error::MissingClassPrototype(format!("label {label} (no same-class prototype)"))
    })?;
    let (winner_other, d_minus, pd_other) = other.ok_or_else(|| {
        Error::MissingClassPrototype(format!("label {label} (no prototype of another class)"))
    })?;
    let mu = relative_distance_difference(d_plus, d_minus)?;
    Ok(SampleOutcome {
        winner_same,
        winner_other,
        d_plus,
        d_minus,
        mu,
        pd_same,
        pd_other,
    })
}

/// ∂μ/∂V for one winner: `∓ 2·d^∓/(d⁺ + d⁻)² · U·G`.
pub fn prototype_gradient(
    outcome: &SampleOutcome,
    relevance: &RelevanceVector,
    which: Winner,
) -> Result<DMatrix<f64>> {
    let sum = outcome.d_plus + outcome.d_minus;
    if sum < DEGENERATE_SUM {
        return Err(Error::DegenerateSample { sum });
    }
    let denom = sum * sum;
    let (pd, factor) = match which {
        Winner::Same => (&outcome.pd_same, -2.0 * outcome.d_minus / denom),
        Winner::Other => (&outcome.pd_other, 2.0 * outcome.d_plus / denom),
    };
    let g = g_matrix_diagonal(pd, relevance);
    let mut grad = pd.principal_left.clone();
    for (mut col, gk) in grad.column_iter_mut().zip(&g) {
        col *= factor * gk;
    }
    Ok(grad)
}

/// ∂μ/∂λ: component k is `2/(d⁺ + d⁻)² · (d⁻·(θₖ⁺)² − d⁺·(θₖ⁻)²)`.
pub fn relevance_gradient(outcome: &SampleOutcome) -> Result<Vec<f64>> {
    let sum = outcome.d_plus + outcome.d_minus;
    if sum < DEGENERATE_SUM {
        return Err(Error::DegenerateSample { sum });
    }
    let scale = 2.0 / (sum * sum);
    Ok(outcome
        .pd_same
        .angles
        .iter()
        .zip(&outcome.pd_other.angles)
        .map(|(tp, tm)| scale * (outcome.d_minus * tp * tp - outcome.d_plus * tm * tm))
        .collect())
}

/// Replaces both winners by `orthonormalize(V± − η·∂μ/∂V±)`, using the
/// model's current relevance for the gradients.
pub fn apply_prototype_update(model: &mut ModelState, outcome: &SampleOutcome, eta: f64) -> Result<()> {
    let grad_same = prototype_gradient(outcome, &model.relevance, Winner::Same)?;
    let grad_other = prototype_gradient(outcome, &model.relevance, Winner::Other)?;
    update_winners(model, outcome, eta, &grad_same, &grad_other)
}

fn update_winners(
    model: &mut ModelState,
    outcome: &SampleOutcome,
    eta: f64,
    grad_same: &DMatrix<f64>,
    grad_other: &DMatrix<f64>,
) -> Result<()> {
    let step_same = &outcome.pd_same.principal_right - grad_same * eta;
    let step_other = &outcome.pd_other.principal_right - grad_other * eta;
    let new_same = orthonormalize_columns(&step_same)?;
    let new_other = orthonormalize_columns(&step_other)?;
    model.prototypes[outcome.winner_same].subspace = new_same;
    model.prototypes[outcome.winner_other].subspace = new_other;
    Ok(())
}

/// `λ ← normalize(max(λ − γ·∇, 0))`.
pub fn apply_relevance_update(
    relevance: &RelevanceVector,
    grad: &[f64],
    gamma: f64,
) -> Result<RelevanceVector> {
    if grad.len() != relevance.len() {
        return Err(Error::DimensionMismatch(format!(
            "relevance gradient has {} entries, expected {}",
            grad.len(),
            relevance.len()
        )));
    }
    let raw: Vec<f64> = relevance
        .weights()
        .iter()
        .zip(grad)
        .map(|(l, g)| (l - gamma * g).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::AllZeroRelevance);
    }
    RelevanceVector::from_weights(raw.into_iter().map(|l| l / total).collect())
}

fn ensure_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// One stochastic update on a single sample. Returns the pre-update outcome.
pub fn train_step(model: &mut ModelState, sample: &Sample, config: &TrainConfig) -> Result<SampleOutcome> {
    let outcome = find_winners(model, &sample.subspace, sample.label)?;
    let grad_same = prototype_gradient(&outcome, &model.relevance, Winner::Same)?;
    let grad_other = prototype_gradient(&outcome, &model.relevance, Winner::Other)?;
    ensure_finite(
        grad_same.iter().chain(grad_other.iter()).copied(),
        "prototype gradient",
    )?;
    let learn_relevance = model.mode == Mode::Grlgq && !config.freeze_relevance;
    let grad_lambda = if learn_relevance {
        let g = relevance_gradient(&outcome)?;
        ensure_finite(g.iter().copied(), "relevance gradient")?;
        Some(g)
    } else {
        None
    };

    update_winners(model, &outcome, config.eta, &grad_same, &grad_other)?;
    if let Some(g) = grad_lambda {
        model.relevance = apply_relevance_update(&model.relevance, &g, config.gamma)?;
    }
    Ok(outcome)
}

fn class_members(samples: &[Sample]) -> BTreeMap<Label, Vec<usize>> {
    let mut classes: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        classes.entry(s.label).or_default().push(i);
    }
    classes
}

/// Top-d left singular vectors of the class's sample bases placed side by side.
fn class_pca(samples: &[Sample], members: &[usize], d: usize) -> Result<Subspace> {
    let blocks: Vec<&DMatrix<f64>> = members.iter().map(|&i| samples[i].subspace.basis()).collect();
    let stacked = stack_columns(&blocks);
    if stacked.ncols() < d {
        return Err(Error::RankDeficient {
            rank: stacked.ncols(),
            expected: d,
        });
    }
    let svd = crate::grassmann::thin_svd(&stacked)?;
    let largest = svd.sigma[0];
    let rank = svd.sigma.iter().filter(|&&s| s > crate::grassmann::RANK_TOL * largest).count();
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }
    Subspace::new(svd.u.columns(0, d).into_owned())
}

/// `per_class` prototypes for every class present in `samples`, in ascending
/// label order.
pub fn init_prototypes<R: Rng + ?Sized>(
    samples: &[Sample],
    d: usize,
    strategy: InitStrategy,
    per_class: usize,
    rng: &mut R,
) -> Result<Vec<Prototype>> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot initialize from an empty dataset".into()))?;
    let ambient = first.subspace.ambient_dim();
    if d == 0 || d > ambient {
        return Err(Error::DimensionMismatch(format!(
            "prototype dimension {d} invalid for ambient dimension {ambient}"
        )));
    }
    let mut prototypes = Vec::new();
    for (label, members) in class_members(samples) {
        match strategy {
            InitStrategy::RandomOrthonormal => {
                for _ in 0..per_class {
                    prototypes.push(Prototype {
                        subspace: Subspace::random(ambient, d, rng)?,
                        label,
                    });
                }
            }
            InitStrategy::RandomExample | InitStrategy::ClassPca => {
                let mut remaining = per_class;
                if strategy == InitStrategy::ClassPca {
                    prototypes.push(Prototype {
                        subspace: class_pca(samples, &members, d)?,
                        label,
                    });
                    remaining -= 1;
                }
                if remaining > members.len() {
                    return Err(Error::InvalidInput(format!(
                        "class {label} has {} samples, cannot draw {remaining} distinct examples",
                        members.len()
                    )));
                }
                for pick in index::sample(rng, members.len(), remaining) {
                    let s = &samples[members[pick]].subspace;
                    if s.dim() != d {
                        return Err(Error::DimensionMismatch(format!(
                            "sample has dimension {}, prototypes need {d}",
                            s.dim()
                        )));
                    }
                    prototypes.push(Prototype {
                        subspace: s.clone(),
                        label,
                    });
                }
            }
        }
    }
    Ok(prototypes)
}

/// Runs `config.epochs` shuffled passes over `samples`, calling `on_step`
/// after every update with the updated model and the pre-update outcome.
pub fn train_epochs<R, F>(
    model: &mut ModelState,
    samples: &[Sample],
    config: &TrainConfig,
    rng: &mut R,
    mut on_step: F,
) -> Result<Vec<EpochStats>>
where
    R: Rng + ?Sized,
    F: FnMut(&ModelState, &SampleOutcome),
{
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("training set is empty".into()));
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut stats = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(rng);
        let mut cost = 0.0;
        let mut correct = 0usize;
        for &i in &order {
            let outcome = train_step(model, &samples[i], config).map_err(|e| match e {
                Error::NonFinite(what) => {
                    Error::NonFinite(format!("{what} (epoch {epoch}, sample {i})"))
                }
                other => other,
            })?;
            cost += outcome.mu;
            if outcome.mu < 0.0 {
                correct += 1;
            }
            on_step(model, &outcome);
        }
        stats.push(EpochStats {
            epoch,
            mean_cost: cost / samples.len() as f64,
            train_accuracy: correct as f64 / samples.len() as f64,
        });
    }
    Ok(stats)
}

/// Initializes prototypes and trains. All randomness derives from `config.seed`.
pub fn fit(
    samples: &[Sample],
    config: &TrainConfig,
    init: InitStrategy,
) -> Result<(ModelState, Vec<EpochStats>)> {
    config.validate()?;
    let d = samples
        .first()
        .map(|s| s.subspace.dim())
        .ok_or_else(|| Error::InvalidInput("training set is empty".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let prototypes = init_prototypes(samples, d, init, config.prototypes_per_class, &mut rng)?;
    let mut model = ModelState::new(prototypes, config.mode)?;
    let stats = train_epochs(&mut model, samples, config, &mut rng, |_, _| {})?;
    Ok((model, stats))
}
