use nalgebra::DVector;
use rayon::prelude::*;

use super::model::{Evaluation, Label, LabeledVector, ModelState, Sample};
use crate::error::{Error, Result};
use crate::grassmann::{adaptive_squared_distance, principal_decomposition, single_vector_angle, Subspace};

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Nearest prototype under the model's adaptive distance. Returns the label
/// and the distance to every prototype.
pub fn predict_set(model: &ModelState, p: &Subspace) -> Result<(Label, Vec<f64>)> {
    let distances = model
        .prototypes
        .iter()
        .map(|proto| {
            principal_decomposition(p, &proto.subspace)
                .map(|pd| adaptive_squared_distance(&pd, &model.relevance))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((model.prototypes[argmin(&distances)].label, distances))
}

/// Nearest prototype by the first principal angle between `x` and each prototype.
pub fn predict_vector(model: &ModelState, x: &DVector<f64>) -> Result<(Label, Vec<f64>)> {
    if x.len() != model.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {}, model expects {}",
            x.len(),
            model.ambient_dim()
        )));
    }
    let angles: Vec<f64> = model
        .prototypes
        .iter()
        .map(|proto| single_vector_angle(x, &proto.subspace))
        .collect();
    Ok((model.prototypes[argmin(&angles)].label, angles))
}

/// What to evaluate on.
#[derive(Debug, Clone, Copy)]
pub enum EvalData<'a> {
    Sets(&'a [Sample]),
    Vectors(&'a [LabeledVector]),
}

/// Nearest-prototype accuracy and confusion matrix. Predictions are computed
/// in parallel on the current rayon pool; results do not depend on its size.
pub fn evaluate(model: &ModelState, data: EvalData<'_>) -> Result<Evaluation> {
    let (truth, predictions): (Vec<Label>, Vec<Label>) = match data {
        EvalData::Sets(samples) => {
            let preds = samples
                .par_iter()
                .map(|s| predict_set(model, &s.subspace).map(|(l, _)| l))
                .collect::<Result<Vec<_>>>()?;
            (samples.iter().map(|s| s.label).collect(), preds)
        }
        EvalData::Vectors(vectors) => {
            let preds = vectors
                .par_iter()
                .map(|v| predict_vector(model, &v.vector).map(|(l, _)| l))
                .collect::<Result<Vec<_>>>()?;
            (vectors.iter().map(|v| v.label).collect(), preds)
        }
    };
    if truth.is_empty() {
        return Err(Error::InvalidInput("evaluation set is empty".into()));
    }
    if let Some(&zero) = truth.iter().find(|&&l| l == 0) {
        return Err(Error::InvalidInput(format!("invalid label {zero}")));
    }
    let classes = truth
        .iter()
        .chain(model.prototypes.iter().map(|p| &p.label))
        .copied()
        .max()
        .unwrap_or(0) as usize;
    let mut confusion = vec![vec![0usize; classes]; classes];
    let mut correct = 0;
    for (t, p) in truth.iter().zip(&predictions) {
        confusion[*t as usize - 1][*p as usize - 1] += 1;
        if t == p {
            correct += 1;
        }
    }
    Ok(Evaluation {
        accuracy: correct as f64 / truth.len() as f64,
        confusion,
        predictions,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::grassmann::RelevanceVector;
    use crate::lvq::model::{Mode, Prototype};

    fn random_model(rng: &mut ChaCha8Rng, classes: u32, dim: usize, d: usize) -> ModelState {
        let prototypes = (1..=classes)
            .map(|label| Prototype {
                subspace: Subspace::random(dim, d, rng).unwrap(),
                label,
            })
            .collect();
        ModelState::new(prototypes, Mode::Grlgq).unwrap()
    }

    #[test]
    fn prototype_predicts_itself() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = random_model(&mut rng, 4, 9, 3);
        for proto in &model.prototypes {
            let (label, dists) = predict_set(&model, &proto.subspace).unwrap();
            assert_eq!(label, proto.label);
            assert!(dists[label as usize - 1] < 1e-12);
        }
    }

    #[test]
    fn single_prototype_always_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let model = random_model(&mut rng, 1, 5, 2);
        for _ in 0..5 {
            let p = Subspace::random(5, 2, &mut rng).unwrap();
            assert_eq!(predict_set(&model, &p).unwrap().0, 1);
        }
    }

    #[test]
    fn prediction_is_invariant_to_relevance_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut model = random_model(&mut rng, 3, 8, 3);
        model.relevance = RelevanceVector::from_weights(vec![0.2, 0.5, 0.3]).unwrap();
        let mut scaled = model.clone();
        scaled.relevance = RelevanceVector::from_weights(vec![2.0, 5.0, 3.0]).unwrap();
        for _ in 0..20 {
            let p = Subspace::random(8, 3, &mut rng).unwrap();
            assert_eq!(
                predict_set(&model, &p).unwrap().0,
                predict_set(&scaled, &p).unwrap().0
            );
        }
    }

    #[test]
    fn vector_in_one_prototype_span() {
        let basis = |cols: &[usize]| {
            let mut m = DMatrix::zeros(4, cols.len());
            for (j, &i) in cols.iter().enumerate() {
                m[(i, j)] = 1.0;
            }
            Subspace::new(m).unwrap()
        };
        let model = ModelState::new(
            vec![
                Prototype { subspace: basis(&[0, 1]), label: 1 },
                Prototype { subspace: basis(&[2, 3]), label: 2 },
            ],
            Mode::Glgq,
        )
        .unwrap();
        let x = DVector::from_vec(vec![0.0, 0.0, 0.6, 0.8]);
        let (label, angles) = predict_vector(&model, &x).unwrap();
        assert_eq!(label, 2);
        assert!(angles[1] < 1e-7);

        let s = 0.5f64.sqrt();
        let tie = DVector::from_vec(vec![s, 0.0, s, 0.0]);
        assert_eq!(predict_vector(&model, &tie).unwrap().0, 1);
    }

    #[test]
    fn vector_and_set_prediction_agree_for_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut model = random_model(&mut rng, 5, 6, 1);
        model.mode = Mode::Glgq;
        model.relevance = RelevanceVector::ones(1);
        for _ in 0..30 {
            let line = Subspace::random(6, 1, &mut rng).unwrap();
            let x = line.basis().column(0).into_owned();
            assert_eq!(
                predict_vector(&model, &x).unwrap().0,
                predict_set(&model, &line).unwrap().0
            );
        }
    }

    #[test]
    fn evaluate_on_prototypes_and_confusion_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let model = random_model(&mut rng, 3, 7, 2);
        let own: Vec<Sample> = model
            .prototypes
            .iter()
            .map(|p| Sample { subspace: p.subspace.clone(), label: p.label })
            .collect();
        let ev = evaluate(&model, EvalData::Sets(&own)).unwrap();
        assert_eq!(ev.accuracy, 1.0);

        let mut samples = Vec::new();
        for label in [1, 1, 2, 3, 3, 3] {
            samples.push(Sample { subspace: Subspace::random(7, 2, &mut rng).unwrap(), label });
        }
        let ev = evaluate(&model, EvalData::Sets(&samples)).unwrap();
        let row_sums: Vec<usize> = ev.confusion.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(row_sums, vec![2, 1, 3]);
        let diag: usize = (0..3).map(|i| ev.confusion[i][i]).sum();
        assert_abs_diff_eq!(ev.accuracy, diag as f64 / 6.0);
    }
}
