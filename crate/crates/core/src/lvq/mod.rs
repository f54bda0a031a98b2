//! Prototype learning: winner selection, gradients, training and inference.

mod model;
mod predict;
mod train;

pub use model::{
    EpochStats, Evaluation, InitStrategy, Label, LabeledVector, Mode, ModelState, Prototype,
    Sample, SampleOutcome, TrainConfig, Winner, SIMPLEX_TOL,
};
pub use predict::{evaluate, predict_set, predict_vector, EvalData};
pub use train::{
    apply_prototype_update, apply_relevance_update, find_winners, fit, init_prototypes,
    prototype_gradient, relative_distance_difference, relevance_gradient, sample_cost,
    train_epochs, train_step, DEGENERATE_SUM,
};
