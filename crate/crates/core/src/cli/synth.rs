//! Synthetic image-set benchmark: each class is spanned by d random
//! nonnegative generators in R^D; each set holds noisy frames drawn from that span.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::io::pgm::encode_pgm;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub classes: usize,
    pub ambient_dim: usize,
    pub dim: usize,
    pub train_sets_per_class: usize,
    pub test_sets_per_class: usize,
    pub frames_per_set: usize,
    pub noise: f64,
    pub seed: u64,
    /// Frame width; the height is `ambient_dim / width`.
    pub width: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: 3,
            ambient_dim: 20,
            dim: 3,
            train_sets_per_class: 30,
            test_sets_per_class: 30,
            frames_per_set: 20,
            noise: 0.05,
            seed: 0,
            width: 20,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.classes == 0 {
            return fail("classes must be at least 1".into());
        }
        if self.dim == 0 || self.dim > self.ambient_dim {
            return fail(format!(
                "dim must satisfy 1 <= dim <= ambient-dim, got {} and {}",
                self.dim, self.ambient_dim
            ));
        }
        if self.frames_per_set == 0 {
            return fail("frames-per-set must be at least 1".into());
        }
        if self.train_sets_per_class == 0 && self.test_sets_per_class == 0 {
            return fail("no sets requested".into());
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return fail(format!("noise must be finite and >= 0, got {}", self.noise));
        }
        if self.width == 0 || self.ambient_dim % self.width != 0 {
            return fail(format!(
                "width {} does not divide ambient-dim {}",
                self.width, self.ambient_dim
            ));
        }
        Ok(())
    }

    pub fn height(&self) -> usize {
        self.ambient_dim / self.width
    }
}

/// One generated set: 8-bit frames, row-major, `width * height` bytes each.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSet {
    pub class: usize,
    pub frames: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    /// D×d nonnegative generators, one per class (not orthonormalized).
    pub centers: Vec<DMatrix<f64>>,
    pub train: Vec<SynthSet>,
    pub test: Vec<SynthSet>,
}

/// Nonnegative generators with disjoint supports: the pixels are shuffled and
/// dealt round-robin to the d columns, each entry drawn from U[0.2, 1).
fn class_center(ambient_dim: usize, dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut pixels: Vec<usize> = (0..ambient_dim).collect();
    pixels.shuffle(rng);
    let mut center = DMatrix::zeros(ambient_dim, dim);
    for (k, &r) in pixels.iter().enumerate() {
        center[(r, k % dim)] = rng.random_range(0.2..1.0);
    }
    center
}

/// `center · |a|` with `a ~ N(0, I)`, scaled to unit norm, plus `noise · N(0, I)`,
/// clipped at zero and quantized to 8 bits relative to the frame maximum.
fn frame(center: &DMatrix<f64>, noise: f64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let coeffs = DVector::from_fn(center.ncols(), |_, _| rng.sample::<f64, _>(StandardNormal).abs());
    let mut x = center * coeffs;
    let norm = x.norm();
    if norm > 0.0 {
        x /= norm;
    }
    for v in x.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *v = (*v + noise * e).max(0.0);
    }
    let max = x.max();
    if max <= 0.0 {
        // every pixel clipped; keep a single lit pixel so the frame stays usable
        let mut px = vec![0u8; x.len()];
        px[0] = 255;
        return px;
    }
    x.iter().map(|v| (255.0 * v / max).round() as u8).collect()
}

pub fn generate(config: &SynthConfig) -> Result<SynthData> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let centers: Vec<DMatrix<f64>> = (0..config.classes)
        .map(|_| class_center(config.ambient_dim, config.dim, &mut rng))
        .collect();
    let mut split = |per_class: usize| -> Vec<SynthSet> {
        let mut sets = Vec::with_capacity(per_class * config.classes);
        for (class, center) in centers.iter().enumerate() {
            for _ in 0..per_class {
                let frames = (0..config.frames_per_set)
                    .map(|_| frame(center, config.noise, &mut rng))
                    .collect();
                sets.push(SynthSet { class, frames });
            }
        }
        sets
    };
    let train = split(config.train_sets_per_class);
    let test = split(config.test_sets_per_class);
    Ok(SynthData {
        centers,
        train,
        test,
    })
}

fn write_split(sets: &[SynthSet], config: &SynthConfig, root: &Path) -> Result<()> {
    let mut counters = vec![0usize; config.classes];
    for set in sets {
        let dir = root
            .join(format!("class{:02}", set.class + 1))
            .join(format!("set{:03}", counters[set.class] + 1));
        counters[set.class] += 1;
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (f, pixels) in set.frames.iter().enumerate() {
            let path = dir.join(format!("frame{:03}.pgm", f + 1));
            let bytes = encode_pgm(config.width, config.height(), pixels);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}

/// Writes `out/train/<class>/<set>/<frame>.pgm` and the same under `out/test`.
pub fn write_synthetic(config: &SynthConfig, out: &Path) -> Result<SynthData> {
    let data = generate(config)?;
    write_split(&data.train, config, &out.join("train"))?;
    write_split(&data.test, config, &out.join("test"))?;
    Ok(data)
}
