use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grassmann::{PrincipalDecomposition, RelevanceVector, Subspace};

/// Class id, 1-based.
pub type Label = u32;

/// Simplex tolerance for learned relevance weights.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Plain squared geodesic distance, relevance fixed at all-ones.
    Glgq,
    /// Relevance-weighted principal angles, learned on the simplex.
    Grlgq,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Glgq => "glgq",
            Mode::Grlgq => "grlgq",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "glgq" => Ok(Mode::Glgq),
            "grlgq" => Ok(Mode::Grlgq),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prototype {
    pub subspace: Subspace,
    pub label: Label,
}

/// A labeled subspace: one training or test item.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub subspace: Subspace,
    pub label: Label,
}

/// A labeled unit vector, for single-image classification.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVector {
    pub vector: DVector<f64>,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub prototypes: Vec<Prototype>,
    pub relevance: RelevanceVector,
    pub mode: Mode,
}

impl ModelState {
    /// Starts GLGQ at all-ones relevance and GRLGQ at uniform `1/d`.
    pub fn new(prototypes: Vec<Prototype>, mode: Mode) -> Result<Self> {
        let d = prototypes
            .first()
            .map(|p| p.subspace.dim())
            .ok_or_else(|| Error::InvalidInput("model needs at least one prototype".into()))?;
        let relevance = match mode {
            Mode::Glgq => RelevanceVector::ones(d),
            Mode::Grlgq => RelevanceVector::uniform(d),
        };
        let model = Self {
            prototypes,
            relevance,
            mode,
        };
        model.check_shapes()?;
        Ok(model)
    }

    pub fn ambient_dim(&self) -> usize {
        self.prototypes[0].subspace.ambient_dim()
    }

    pub fn subspace_dim(&self) -> usize {
        self.prototypes[0].subspace.dim()
    }

    /// Sorted distinct prototype labels.
    pub fn labels(&self) -> Vec<Label> {
        let mut labels: Vec<Label> = self.prototypes.iter().map(|p| p.label).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    pub(crate) fn check_shapes(&self) -> Result<()> {
        let (dd, d) = (self.ambient_dim(), self.subspace_dim());
        for (i, p) in self.prototypes.iter().enumerate() {
            if p.subspace.ambient_dim() != dd || p.subspace.dim() != d {
                return Err(Error::DimensionMismatch(format!(
                    "prototype {i} is {}x{}, expected {dd}x{d}",
                    p.subspace.ambient_dim(),
                    p.subspace.dim()
                )));
            }
            if p.label == 0 {
                return Err(Error::InvalidInput(format!("prototype {i} has label 0")));
            }
        }
        if self.relevance.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "relevance has {} entries, expected {d}",
                self.relevance.len()
            )));
        }
        Ok(())
    }

    /// Checks shapes plus the mode-dependent relevance invariant.
    pub fn validate(&self) -> Result<()> {
        self.check_shapes()?;
        match self.mode {
            Mode::Glgq if !self.relevance.is_all_ones() => Err(Error::InvalidInput(
                "GLGQ model must have all-ones relevance".into(),
            )),
            Mode::Grlgq if !self.relevance.is_on_simplex(1e-9) => Err(Error::InvalidInput(
                "GRLGQ relevance is not on the simplex".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Largest `max |WᵀW − I|` over all prototypes.
    pub fn max_orthonormality_error(&self) -> f64 {
        self.prototypes
            .iter()
            .map(|p| p.subspace.orthonormality_error())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Orthonormalized Gaussian matrices.
    RandomOrthonormal,
    /// A randomly chosen training sample of the prototype's class.
    RandomExample,
    /// Top-d principal directions of the class's samples.
    ClassPca,
}

impl FromStr for InitStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "random-orthonormal" | "random" => Ok(Self::RandomOrthonormal),
            "random-example" | "example" => Ok(Self::RandomExample),
            "class-pca" | "pca" => Ok(Self::ClassPca),
            other => Err(Error::Config(format!("unknown init strategy `{other}`"))),
        }
    }
}

impl fmt::Display for InitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RandomOrthonormal => "random-orthonormal",
            Self::RandomExample => "random-example",
            Self::ClassPca => "class-pca",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Prototype learning rate η.
    pub eta: f64,
    /// Relevance learning rate γ.
    pub gamma: f64,
    pub epochs: usize,
    pub seed: u64,
    pub mode: Mode,
    pub prototypes_per_class: usize,
    /// Skip relevance updates entirely (GRLGQ only); the model keeps whatever
    /// relevance it starts with.
    pub freeze_relevance: bool,
}

impl TrainConfig {
    pub fn glgq(eta: f64, epochs: usize, seed: u64) -> Self {
        Self {
            eta,
            gamma: 0.0,
            epochs,
            seed,
            mode: Mode::Glgq,
            prototypes_per_class: 1,
            freeze_relevance: false,
        }
    }

    pub fn grlgq(eta: f64, gamma: f64, epochs: usize, seed: u64) -> Self {
        Self {
            gamma,
            mode: Mode::Grlgq,
            ..Self::glgq(eta, epochs, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.prototypes_per_class == 0 {
            return Err(Error::Config("prototypes per class must be at least 1".into()));
        }
        match self.mode {
            Mode::Glgq if self.gamma != 0.0 => Err(Error::Config(format!(
                "glgq mode requires gamma = 0, got {}",
                self.gamma
            ))),
            Mode::Grlgq if self.gamma >= self.eta => Err(Error::Config(format!(
                "grlgq mode requires gamma < eta (gamma = {}, eta = {})",
                self.gamma, self.eta
            ))),
            _ => Ok(()),
        }
    }
}

/// Winner pair for one sample, with the decompositions the gradients need.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    /// Index of W⁺, the closest prototype with the sample's label.
    pub winner_same: usize,
    /// Index of W⁻, the closest prototype with any other label.
    pub winner_other: usize,
    pub d_plus: f64,
    pub d_minus: f64,
    /// (d⁺ − d⁻)/(d⁺ + d⁻).
    pub mu: f64,
    /// Decomposition of (sample, W⁺).
    pub pd_same: PrincipalDecomposition,
    /// Decomposition of (sample, W⁻).
    pub pd_other: PrincipalDecomposition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    pub mean_cost: f64,
    pub train_accuracy: f64,
}

/// Which member of the winner pair a gradient refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Same,
    Other,
}

/// Accuracy and confusion counts (`confusion[true − 1][predicted − 1]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    pub predictions: Vec<Label>,
}

pub(crate) fn stack_columns(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}
