use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{value_name, DataKind, Preset, PresetValues, Protocol};
use super::synth::{write_synthetic, SynthConfig};
use super::{Command, EvalArgs, InspectArgs, PredictArgs, SynthArgs, TrainArgs};
use crate::error::{Error, Result};
use crate::grassmann::{
    image_contribution, principal_decomposition, subspace_from_set, vector_decomposition,
    PrincipalDecomposition,
};
use crate::io::pgm::read_pgm;
use crate::io::{
    build_classwise_subspace_dataset, build_per_set_subspace_dataset, export_confusion_csv,
    export_distance_matrix_csv, export_image_contribution_csv, export_pixel_influence,
    export_prototype_images, export_relevance_csv, load_model, read_idx_dataset, read_image_set,
    read_imageset_dirs, read_labeled_images, save_model, LabeledSet, RawImageDataset,
};
use crate::lvq::{
    evaluate, fit, predict_set, predict_vector, EpochStats, EvalData, InitStrategy, Label,
    LabeledVector, Mode, ModelState, Sample, TrainConfig,
};

pub const MODEL_FILE: &str = "model.grlgq";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const CV_FILE: &str = "cv.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalKind {
    /// Each image on its own, distance θ₁ to the prototype
    Vectors,
    /// Subspaces: one per image set, or sampled per class from single images
    Sets,
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| Error::io("<stdout>", e))
    };
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub(super) fn dispatch(command: Command, out: &mut (dyn Write + Send)) -> Result<()> {
    match command {
        Command::Train(args) => cmd_train(&args, out),
        Command::Eval(args) => cmd_eval(&args, out),
        Command::Predict(args) => cmd_predict(&args, out),
        Command::Inspect(args) => cmd_inspect(&args, out),
        Command::Synth(args) => cmd_synth(&args, out),
    }
}

/// Fully resolved `train` settings: flags and config file over preset over
/// built-in defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub mode: Mode,
    pub data: DataKind,
    pub data_dir: PathBuf,
    pub d: usize,
    pub m: usize,
    pub sets_per_class: usize,
    pub eta: f64,
    pub gamma: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init: InitStrategy,
    pub prototypes_per_class: usize,
    pub protocol: Protocol,
    pub folds: usize,
    pub repeats: usize,
    pub train_per_class: Option<usize>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            eta: self.eta,
            gamma: self.gamma,
            epochs: self.epochs,
            seed: self.seed,
            mode: self.mode,
            prototypes_per_class: self.prototypes_per_class,
            freeze_relevance: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().validate()?;
        if self.d == 0 {
            return Err(Error::Config("d must be at least 1".into()));
        }
        if self.data != DataKind::Sets {
            if self.m < self.d {
                return Err(Error::Config(format!(
                    "m must be at least d (m = {}, d = {})",
                    self.m, self.d
                )));
            }
            if self.sets_per_class == 0 {
                return Err(Error::Config("sets-per-class must be at least 1".into()));
            }
        }
        match self.protocol {
            Protocol::Folds if self.folds < 2 => {
                Err(Error::Config(format!("folds must be at least 2, got {}", self.folds)))
            }
            Protocol::Folds | Protocol::Split if self.repeats == 0 => {
                Err(Error::Config("repeats must be at least 1".into()))
            }
            Protocol::Split if self.train_per_class.unwrap_or(0) == 0 => Err(Error::Config(
                "the split protocol needs train-per-class >= 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// The resolved settings in run-file syntax, loadable with `--config`.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        if let Some(p) = self.preset {
            writeln!(s, "# preset {} (values below already include it)", value_name(&p)).unwrap();
        }
        writeln!(s, "mode = {}", self.mode).unwrap();
        writeln!(s, "data = {}", value_name(&self.data)).unwrap();
        writeln!(s, "data-dir = {}", self.data_dir.display()).unwrap();
        writeln!(s, "d = {}", self.d).unwrap();
        writeln!(s, "m = {}", self.m).unwrap();
        writeln!(s, "sets-per-class = {}", self.sets_per_class).unwrap();
        writeln!(s, "eta = {}", self.eta).unwrap();
        writeln!(s, "gamma = {}", self.gamma).unwrap();
        writeln!(s, "epochs = {}", self.epochs).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "init = {}", self.init).unwrap();
        writeln!(s, "prototypes-per-class = {}", self.prototypes_per_class).unwrap();
        writeln!(s, "protocol = {}", value_name(&self.protocol)).unwrap();
        writeln!(s, "folds = {}", self.folds).unwrap();
        writeln!(s, "repeats = {}", self.repeats).unwrap();
        if let Some(n) = self.train_per_class {
            writeln!(s, "train-per-class = {n}").unwrap();
        }
        writeln!(s, "out-dir = {}", self.out_dir.display()).unwrap();
        s
    }
}

pub fn resolve_train(args: &TrainArgs) -> Result<RunConfig> {
    let base = args
        .preset
        .map(Preset::values)
        .unwrap_or_else(PresetValues::fallback);
    let mode = args.mode.unwrap_or(base.mode);
    // a preset's gamma does not carry over into glgq; an explicit one is validated
    let gamma = match (args.gamma, mode) {
        (Some(g), _) => g,
        (None, Mode::Glgq) => 0.0,
        (None, Mode::Grlgq) => base.gamma,
    };
    let d = args.d.unwrap_or(base.d);
    let config = RunConfig {
        preset: args.preset,
        mode,
        data: args.data.unwrap_or(base.data),
        data_dir: args.data_dir.clone().unwrap_or_else(|| PathBuf::from("data")),
        d,
        m: args.m.unwrap_or(base.m.max(d)),
        sets_per_class: args.sets_per_class.unwrap_or(base.sets_per_class),
        eta: args.eta.unwrap_or(base.eta),
        gamma,
        epochs: args.epochs.unwrap_or(base.epochs),
        seed: args.seed.unwrap_or(0),
        init: args.init.unwrap_or(base.init),
        prototypes_per_class: args.prototypes_per_class.unwrap_or(1),
        protocol: args.protocol.unwrap_or(base.protocol),
        folds: args.folds.unwrap_or(base.folds),
        repeats: args.repeats.unwrap_or(base.repeats),
        train_per_class: args.train_per_class.or(base.train_per_class),
        out_dir: args.out_dir.clone().unwrap_or_else(|| PathBuf::from("run")),
    };
    config.validate()?;
    Ok(config)
}

/// Labeled items of one dataset: single images or whole image sets.
enum Loaded {
    Images(RawImageDataset),
    Sets(Vec<LabeledSet>),
}

impl Loaded {
    fn labels(&self) -> Vec<Label> {
        match self {
            Loaded::Images(raw) => raw.labels.clone(),
            Loaded::Sets(sets) => sets.iter().map(|s| s.label).collect(),
        }
    }
}

fn load_data(kind: DataKind, dir: &Path, idx_prefix: &str) -> Result<Loaded> {
    Ok(match kind {
        DataKind::Mnist => Loaded::Images(read_idx_dataset(
            &dir.join(format!("{idx_prefix}-images-idx3-ubyte")),
            &dir.join(format!("{idx_prefix}-labels-idx1-ubyte")),
        )?),
        DataKind::Images => Loaded::Images(read_labeled_images(dir)?),
        DataKind::Sets => Loaded::Sets(read_imageset_dirs(dir)?),
    })
}

/// Training subspaces from the items at `indices`.
fn training_samples(data: &Loaded, indices: &[usize], d: usize, m: usize, sets_per_class: usize, seed: u64) -> Result<Vec<Sample>> {
    match data {
        Loaded::Images(raw) => {
            let subset = RawImageDataset {
                images: indices.iter().map(|&i| raw.images[i].clone()).collect(),
                labels: indices.iter().map(|&i| raw.labels[i]).collect(),
                width: raw.width,
                height: raw.height,
            };
            Ok(build_classwise_subspace_dataset(&subset, d, m, sets_per_class, seed)?.samples())
        }
        Loaded::Sets(sets) => {
            let subset: Vec<LabeledSet> = indices.iter().map(|&i| sets[i].clone()).collect();
            Ok(build_per_set_subspace_dataset(&subset, d)?.samples())
        }
    }
}

fn vectors_of(data: &Loaded, indices: &[usize]) -> Vec<LabeledVector> {
    match data {
        Loaded::Images(raw) => indices
            .iter()
            .map(|&i| LabeledVector {
                vector: raw.images[i].clone(),
                label: raw.labels[i],
            })
            .collect(),
        Loaded::Sets(sets) => indices
            .iter()
            .flat_map(|&i| {
                let set = &sets[i];
                set.data.entries().column_iter().map(move |c| LabeledVector {
                    vector: c.into_owned(),
                    label: set.label,
                })
            })
            .collect(),
    }
}

/// Scores a model on held-out items: image sets as subspaces, single images
/// as vectors.
fn held_out_accuracy(model: &ModelState, data: &Loaded, indices: &[usize]) -> Result<f64> {
    let eval = match data {
        Loaded::Images(_) => evaluate(model, EvalData::Vectors(&vectors_of(data, indices)))?,
        Loaded::Sets(sets) => {
            let subset: Vec<LabeledSet> = indices.iter().map(|&i| sets[i].clone()).collect();
            let samples = build_per_set_subspace_dataset(&subset, model.subspace_dim())?.samples();
            evaluate(model, EvalData::Sets(&samples))?
        }
    };
    Ok(eval.accuracy)
}

struct Split {
    repeat: usize,
    fold: usize,
    train: Vec<usize>,
    test: Vec<usize>,
}

fn class_members(labels: &[Label]) -> Vec<Vec<usize>> {
    let mut classes: std::collections::BTreeMap<Label, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    classes.into_values().collect()
}

fn protocol_splits(labels: &[Label], config: &RunConfig) -> Result<Vec<Split>> {
    let mut splits = Vec::new();
    match config.protocol {
        Protocol::None => {}
        Protocol::LeaveOneOut => {
            for i in 0..labels.len() {
                splits.push(Split {
                    repeat: 0,
                    fold: i,
                    train: (0..labels.len()).filter(|&j| j != i).collect(),
                    test: vec![i],
                });
            }
        }
        Protocol::Folds => {
            for repeat in 0..config.repeats {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1 + repeat as u64));
                let mut fold_of = vec![0usize; labels.len()];
                let mut next = 0usize;
                for mut members in class_members(labels) {
                    members.shuffle(&mut rng);
                    for i in members {
                        fold_of[i] = next % config.folds;
                        next += 1;
                    }
                }
                for fold in 0..config.folds {
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        (0..labels.len()).partition(|&i| fold_of[i] == fold);
                    splits.push(Split { repeat, fold, train, test });
                }
            }
        }
        Protocol::Split => {
            let n = config.train_per_class.unwrap_or(0);
            for repeat in 0..config.repeats {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1 + repeat as u64));
                let (mut train, mut test) = (Vec::new(), Vec::new());
                for mut members in class_members(labels) {
                    if members.len() <= n {
                        return Err(Error::Config(format!(
                            "class {} has {} items, train-per-class = {n} leaves none for testing",
                            labels[members[0]],
                            members.len()
                        )));
                    }
                    members.shuffle(&mut rng);
                    train.extend_from_slice(&members[..n]);
                    test.extend_from_slice(&members[n..]);
                }
                train.sort_unstable();
                test.sort_unstable();
                splits.push(Split { repeat, fold: 0, train, test });
            }
        }
    }
    Ok(splits)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn epochs_csv(stats: &[EpochStats]) -> String {
    let mut s = String::from("epoch,mean_cost,train_accuracy\n");
    for e in stats {
        writeln!(s, "{},{},{}", e.epoch, e.mean_cost, e.train_accuracy).unwrap();
    }
    s
}

fn cmd_train(args: &TrainArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let config = resolve_train(args)?;
    let data = load_data(config.data, &config.data_dir, "train")?;
    let labels = data.labels();
    let train_config = config.train_config();
    let sample_seed = config.seed;
    create_dir(&config.out_dir)?;

    let splits = protocol_splits(&labels, &config)?;
    let mut cv_summary = None;
    if !splits.is_empty() {
        let mut csv = String::from("repeat,fold,accuracy\n");
        let mut accs = Vec::with_capacity(splits.len());
        for split in &splits {
            let samples = training_samples(&data, &split.train, config.d, config.m, config.sets_per_class, sample_seed)?;
            let (model, _) = fit(&samples, &train_config, config.init)?;
            let acc = held_out_accuracy(&model, &data, &split.test)?;
            writeln!(csv, "{},{},{acc}", split.repeat + 1, split.fold + 1).unwrap();
            accs.push(acc);
        }
        write_text(&config.out_dir.join(CV_FILE), &csv)?;
        cv_summary = Some(mean_std(&accs));
    }

    let all: Vec<usize> = (0..labels.len()).collect();
    let samples = training_samples(&data, &all, config.d, config.m, config.sets_per_class, sample_seed)?;
    let (model, stats) = fit(&samples, &train_config, config.init)?;
    let model_path = config.out_dir.join(MODEL_FILE);
    save_model(&model, &model_path)?;
    write_text(&config.out_dir.join(EPOCHS_FILE), &epochs_csv(&stats))?;

    let last = stats.last().expect("at least one epoch");
    let mut summary = config.to_config_text();
    writeln!(summary, "# samples {}", samples.len()).unwrap();
    writeln!(summary, "# ambient dimension {}", model.ambient_dim()).unwrap();
    writeln!(summary, "# prototypes {}", model.prototypes.len()).unwrap();
    writeln!(summary, "# final mean cost {}", last.mean_cost).unwrap();
    writeln!(summary, "# final training accuracy {}", last.train_accuracy).unwrap();
    if let Some((mean, std)) = cv_summary {
        writeln!(summary, "# {} accuracy {mean} +- {std} over {} runs", value_name(&config.protocol), splits.len()).unwrap();
    }
    write_text(&config.out_dir.join(SUMMARY_FILE), &summary)?;

    emit!(out, "model={}", model_path.display())?;
    emit!(out, "samples={}", samples.len())?;
    emit!(out, "final_mean_cost={}", last.mean_cost)?;
    emit!(out, "final_train_accuracy={}", last.train_accuracy)?;
    if let Some((mean, std)) = cv_summary {
        emit!(out, "cv_runs={}", splits.len())?;
        emit!(out, "cv_mean={mean}")?;
        emit!(out, "cv_std={std}")?;
    }
    Ok(())
}

fn require_model(path: &Option<PathBuf>) -> Result<ModelState> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::Config("--model is required".into()))?;
    load_model(path)
}

fn cmd_eval(args: &EvalArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let model = require_model(&args.model)?;
    let kind = args.data.unwrap_or(DataKind::Sets);
    let dir = args
        .data_dir
        .as_ref()
        .ok_or_else(|| Error::Config("--data-dir is required".into()))?;
    let eval_kind = args.kind.unwrap_or(match kind {
        DataKind::Sets => EvalKind::Sets,
        DataKind::Mnist | DataKind::Images => EvalKind::Vectors,
    });
    let data = load_data(kind, dir, "t10k")?;
    let all: Vec<usize> = (0..data.labels().len()).collect();
    let d = model.subspace_dim();
    let evaluation = match eval_kind {
        EvalKind::Vectors => evaluate(&model, EvalData::Vectors(&vectors_of(&data, &all)))?,
        EvalKind::Sets => {
            let m = args.m.unwrap_or(d.max(20));
            if m < d {
                return Err(Error::Config(format!("m must be at least d (m = {m}, d = {d})")));
            }
            let samples = training_samples(&data, &all, d, m, args.sets_per_class.unwrap_or(100), args.seed.unwrap_or(0))?;
            evaluate(&model, EvalData::Sets(&samples))?
        }
    };
    let confusion = args
        .confusion
        .clone()
        .unwrap_or_else(|| PathBuf::from("confusion.csv"));
    export_confusion_csv(&evaluation.confusion, &confusion)?;
    emit!(out, "accuracy={}", evaluation.accuracy)?;
    emit!(out, "count={}", evaluation.predictions.len())?;
    emit!(out, "confusion={}", confusion.display())?;
    Ok(())
}

fn angle_csv(pd: &PrincipalDecomposition, model: &ModelState) -> String {
    let mut s = String::from("index,theta,cos_theta,lambda\n");
    for (k, (theta, cos)) in pd.angles.iter().zip(&pd.cosines).enumerate() {
        let lambda = model.relevance.weights().get(k).copied().unwrap_or(f64::NAN);
        writeln!(s, "{},{theta},{cos},{lambda}", k + 1).unwrap();
    }
    s
}

fn cmd_predict(args: &PredictArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let model = require_model(&args.model)?;
    let explain_dir = args
        .explain_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("explain"));
    let (label, distances, explanation) = match (&args.set, &args.image) {
        (Some(dir), None) => {
            let (data, width, height) = read_image_set(dir)?;
            let factors = subspace_from_set(&data, model.subspace_dim())?;
            let (label, distances) = predict_set(&model, &factors.subspace)?;
            let winner = argmin(&distances);
            let explanation = if args.explain {
                let pd = principal_decomposition(&factors.subspace, &model.prototypes[winner].subspace)?;
                let contribution = image_contribution(&factors, &pd.rot_left)?;
                Some((pd, Some(contribution), width, height))
            } else {
                None
            };
            (label, distances, explanation)
        }
        (None, Some(path)) => {
            let img = read_pgm(path)?;
            let v = DVector::from_vec(img.to_unit_range());
            let norm = v.norm();
            if norm == 0.0 {
                return Err(Error::InvalidInput(format!("{} is all black", path.display())));
            }
            let x = v / norm;
            let (label, distances) = predict_vector(&model, &x)?;
            let winner = argmin(&distances);
            let explanation = if args.explain {
                let pd = vector_decomposition(&x, &model.prototypes[winner].subspace)?;
                Some((pd, None, img.width, img.height))
            } else {
                None
            };
            (label, distances, explanation)
        }
        _ => {
            return Err(Error::Config(
                "give exactly one of --set <dir> and --image <file>".into(),
            ))
        }
    };

    emit!(out, "label={label}")?;
    for (i, (proto, dist)) in model.prototypes.iter().zip(&distances).enumerate() {
        emit!(out, "prototype={i} label={} distance={dist}", proto.label)?;
    }
    if let Some((pd, contribution, width, height)) = explanation {
        create_dir(&explain_dir)?;
        for i in 0..pd.dim() {
            export_pixel_influence(&pd, i, width, height, &explain_dir.join(format!("influence_angle{}.pgm", i + 1)))?;
        }
        write_text(&explain_dir.join("angles.csv"), &angle_csv(&pd, &model))?;
        if let Some(m) = contribution {
            export_image_contribution_csv(&m, &explain_dir.join("image_contribution.csv"))?;
        }
        emit!(out, "explain_dir={}", explain_dir.display())?;
    }
    Ok(())
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn image_shape(dim: usize, width: Option<usize>, height: Option<usize>) -> Result<(usize, usize)> {
    let (w, h) = match (width, height) {
        (Some(w), Some(h)) => (w, h),
        (Some(w), None) if w > 0 && dim % w == 0 => (w, dim / w),
        (None, Some(h)) if h > 0 && dim % h == 0 => (dim / h, h),
        (None, None) => {
            let side = (dim as f64).sqrt().round() as usize;
            if side * side == dim {
                (side, side)
            } else {
                (dim, 1)
            }
        }
        (w, h) => {
            return Err(Error::Config(format!(
                "image size {w:?}x{h:?} does not fit {dim} pixels"
            )))
        }
    };
    if w * h != dim {
        return Err(Error::Config(format!("{w}x{h} images cannot hold {dim} pixels")));
    }
    Ok((w, h))
}

fn cmd_inspect(args: &InspectArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let model = require_model(&args.model)?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("inspect"));
    let (width, height) = image_shape(model.ambient_dim(), args.width, args.height)?;
    create_dir(&out_dir)?;

    let relevance = out_dir.join("relevance.csv");
    export_relevance_csv(&model, &relevance)?;
    emit!(out, "relevance={}", relevance.display())?;
    let proto_dir = out_dir.join("prototypes");
    for i in 0..model.prototypes.len() {
        export_prototype_images(&model, i, width, height, &proto_dir)?;
    }
    emit!(out, "prototypes={}", proto_dir.display())?;

    if let Some(dir) = &args.data_dir {
        let data = load_data(args.data.unwrap_or(DataKind::Sets), dir, "train")?;
        let all: Vec<usize> = (0..data.labels().len()).collect();
        let d = model.subspace_dim();
        let m = args.m.unwrap_or(d.max(20));
        let samples = training_samples(&data, &all, d, m, args.sets_per_class.unwrap_or(100), args.seed.unwrap_or(0))?;
        let names: Vec<String> = match &data {
            Loaded::Sets(sets) => sets.iter().map(|s| s.name.clone()).collect(),
            Loaded::Images(_) => (0..samples.len()).map(|i| format!("sampled{i}")).collect(),
        };
        let matrix = out_dir.join("distances.csv");
        export_distance_matrix_csv(&model, &samples, &matrix)?;
        let mut rows = String::from("row,kind,label,name\n");
        for (i, (s, name)) in samples.iter().zip(&names).enumerate() {
            writeln!(rows, "{i},sample,{},{name}", s.label).unwrap();
        }
        for (i, p) in model.prototypes.iter().enumerate() {
            writeln!(rows, "{},prototype,{},prototype{i}", samples.len() + i, p.label).unwrap();
        }
        write_text(&out_dir.join("distance_rows.csv"), &rows)?;
        emit!(out, "distances={}", matrix.display())?;
    }
    Ok(())
}

pub(super) fn synth_config(args: &SynthArgs) -> SynthConfig {
    let base = SynthConfig::default();
    let ambient_dim = args.ambient_dim.unwrap_or(base.ambient_dim);
    let train = args.sets_per_class.unwrap_or(base.train_sets_per_class);
    SynthConfig {
        classes: args.classes.unwrap_or(base.classes),
        ambient_dim,
        dim: args.dim.unwrap_or(base.dim),
        train_sets_per_class: train,
        test_sets_per_class: args.test_sets_per_class.unwrap_or(train),
        frames_per_set: args.frames_per_set.unwrap_or(base.frames_per_set),
        noise: args.noise.unwrap_or(base.noise),
        seed: args.seed.unwrap_or(base.seed),
        width: args.width.unwrap_or(ambient_dim),
    }
}

fn cmd_synth(args: &SynthArgs, out: &mut (dyn Write + Send)) -> Result<()> {
    let config = synth_config(args);
    let dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("synth"));
    write_synthetic(&config, &dir)?;
    emit!(out, "train_dir={}", dir.join("train").display())?;
    emit!(out, "test_dir={}", dir.join("test").display())?;
    Ok(())
}
