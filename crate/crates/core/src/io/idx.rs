//! IDX container (the MNIST distribution format): big-endian u32 header
//! followed by unsigned bytes.

use std::fs;
use std::path::Path;

use nalgebra::DVector;

use super::RawImageDataset;
use crate::error::{Error, Result};
use crate::lvq::Label;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    /// Flattened row-major, scaled to [0, 1] and L2-normalized.
    pub images: Vec<DVector<f64>>,
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::TruncatedFile(format!("IDX header ends before byte {}", at + 4)))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::BadMagic { found, expected });
    }
    Ok(())
}

/// Scales `[0, 255]` to `[0, 1]` and normalizes to unit length.
pub(crate) fn unit_vector(pixels: &[u8]) -> Result<DVector<f64>> {
    let v = DVector::from_iterator(pixels.len(), pixels.iter().map(|&p| f64::from(p) / 255.0));
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("all-zero image cannot be normalized".into()));
    }
    Ok(v / norm)
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    check_magic(bytes, IMAGES_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let dim = rows * cols;
    let body = &bytes[16..];
    if body.len() < count * dim {
        return Err(Error::TruncatedFile(format!(
            "IDX images: {} data bytes, header promises {count}×{rows}×{cols}",
            body.len()
        )));
    }
    let images = body
        .chunks_exact(dim.max(1))
        .take(count)
        .map(unit_vector)
        .collect::<Result<Vec<_>>>()?;
    Ok(IdxImages { rows, cols, images })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABELS_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let body = &bytes[8..];
    if body.len() < count {
        return Err(Error::TruncatedFile(format!(
            "IDX labels: {} data bytes, header promises {count}",
            body.len()
        )));
    }
    Ok(body[..count].to_vec())
}

pub fn read_idx_images(path: &Path) -> Result<IdxImages> {
    parse_idx_images(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    parse_idx_labels(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Pairs an image file with a label file. Raw label `k` becomes class `k + 1`.
pub fn read_idx_dataset(images: &Path, labels: &Path) -> Result<RawImageDataset> {
    let imgs = read_idx_images(images)?;
    let raw_labels = read_idx_labels(labels)?;
    if imgs.images.len() != raw_labels.len() {
        return Err(Error::CountMismatch {
            images: imgs.images.len(),
            labels: raw_labels.len(),
        });
    }
    RawImageDataset::new(
        imgs.images,
        raw_labels.iter().map(|&l| Label::from(l) + 1).collect(),
        imgs.cols,
        imgs.rows,
    )
}
