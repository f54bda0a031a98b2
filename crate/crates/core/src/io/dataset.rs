use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{LabeledSet, RawImageDataset, SubspaceDataset};
use crate::error::{Error, Result};
use crate::grassmann::{subspace_from_set, DataMatrix};
use crate::lvq::Label;

/// Turns a single-image dataset into subspaces: for every class, `sets_per_class`
/// independent draws of `m` distinct images, each reduced to its top-d left
/// singular vectors.
pub fn build_classwise_subspace_dataset(
    raw: &RawImageDataset,
    d: usize,
    m: usize,
    sets_per_class: usize,
    seed: u64,
) -> Result<SubspaceDataset> {
    if d == 0 || m < d {
        return Err(Error::Config(format!(
            "need 1 <= d <= m, got d = {d}, m = {m}"
        )));
    }
    let mut by_class: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &label) in raw.labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let dim = raw.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(by_class.len() * sets_per_class);
    for (label, members) in by_class {
        if members.len() < m {
            return Err(Error::InsufficientImages {
                label,
                available: members.len(),
                required: m,
            });
        }
        for _ in 0..sets_per_class {
            let picks = index::sample(&mut rng, members.len(), m);
            let x = DMatrix::from_fn(dim, m, |r, c| raw.images[members[picks.index(c)]][r]);
            let factors = subspace_from_set(&DataMatrix::new(x)?, d)?;
            items.push((factors, label));
        }
    }
    Ok(SubspaceDataset {
        items,
        ambient_dim: dim,
        dim: d,
    })
}

/// One d-dimensional subspace per image set.
pub fn build_per_set_subspace_dataset(sets: &[LabeledSet], d: usize) -> Result<SubspaceDataset> {
    let first = sets
        .first()
        .ok_or_else(|| Error::InvalidInput("no image sets given".into()))?;
    let ambient_dim = first.data.ambient_dim();
    let mut items = Vec::with_capacity(sets.len());
    for set in sets {
        if set.data.ambient_dim() != ambient_dim {
            return Err(Error::InconsistentDims(format!(
                "set {} has D = {}, expected {ambient_dim}",
                set.name,
                set.data.ambient_dim()
            )));
        }
        let factors = match subspace_from_set(&set.data, d) {
            Ok(f) => f,
            Err(Error::RankDeficient { rank, expected }) => {
                return Err(Error::RankDeficientSet {
                    set: set.name.clone(),
                    rank,
                    expected,
                })
            }
            Err(Error::DimensionMismatch(_)) => {
                return Err(Error::RankDeficientSet {
                    set: set.name.clone(),
                    rank: set.data.num_images().min(ambient_dim),
                    expected: d,
                })
            }
            Err(e) => return Err(e),
        };
        items.push((factors, set.label));
    }
    Ok(SubspaceDataset {
        items,
        ambient_dim,
        dim: d,
    })
}
