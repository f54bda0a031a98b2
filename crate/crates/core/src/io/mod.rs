//! Dataset ingestion, model persistence and exporters.

mod dataset;
mod export;
pub mod idx;
mod imageset;
mod model_file;
pub mod pgm;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::grassmann::{DataMatrix, SubspaceWithFactors};
use crate::lvq::{Label, LabeledVector, Sample};

pub use dataset::{build_classwise_subspace_dataset, build_per_set_subspace_dataset};
pub use export::{
    distance_matrix, export_confusion_csv, export_distance_matrix_csv, export_image_contribution_csv,
    export_pixel_influence, export_prototype_images, export_relevance_csv, influence_to_pixels,
    rescale_to_pixels,
};
pub use idx::{read_idx_dataset, read_idx_images, read_idx_labels};
pub use imageset::{read_image_set, read_imageset_dirs, read_labeled_images, MANIFEST_FILE};
pub use model_file::{decode_model, encode_model, load_model, save_model, MODEL_FORMAT_VERSION};

/// Unit-norm single images with labels 1..C.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImageDataset {
    pub images: Vec<DVector<f64>>,
    pub labels: Vec<Label>,
    pub width: usize,
    pub height: usize,
}

impl RawImageDataset {
    pub fn new(
        images: Vec<DVector<f64>>,
        labels: Vec<Label>,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::CountMismatch {
                images: images.len(),
                labels: labels.len(),
            });
        }
        let dim = width * height;
        for (i, img) in images.iter().enumerate() {
            if img.len() != dim {
                return Err(Error::InconsistentDims(format!(
                    "image {i} has {} pixels, expected {width}x{height}",
                    img.len()
                )));
            }
            if (img.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidInput(format!("image {i} is not unit-norm")));
            }
        }
        let mut classes = labels.clone();
        classes.sort_unstable();
        classes.dedup();
        if classes.iter().enumerate().any(|(i, &c)| c as usize != i + 1) {
            return Err(Error::InvalidInput(
                "labels must form the contiguous set 1..C".into(),
            ));
        }
        Ok(Self {
            images,
            labels,
            width,
            height,
        })
    }

    pub fn dim(&self) -> usize {
        self.width * self.height
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0) as usize
    }

    pub fn to_labeled_vectors(&self) -> Vec<LabeledVector> {
        self.images
            .iter()
            .zip(&self.labels)
            .map(|(v, &label)| LabeledVector {
                vector: v.clone(),
                label,
            })
            .collect()
    }
}

/// One image set read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    /// `<class>/<set>` relative to the dataset root.
    pub name: String,
    pub data: DataMatrix,
    pub label: Label,
    pub width: usize,
    pub height: usize,
}

/// Labeled truncated-SVD subspaces with shared D and d.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDataset {
    pub items: Vec<(SubspaceWithFactors, Label)>,
    pub ambient_dim: usize,
    pub dim: usize,
}

impl SubspaceDataset {
    pub fn samples(&self) -> Vec<Sample> {
        self.items
            .iter()
            .map(|(f, label)| Sample {
                subspace: f.subspace.clone(),
                label: *label,
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}
