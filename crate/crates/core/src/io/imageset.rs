use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};

use super::pgm::read_pgm;
use super::{LabeledSet, RawImageDataset};
use crate::error::{Error, Result};
use crate::grassmann::DataMatrix;
use crate::lvq::Label;

/// Optional file in the dataset root mapping class directories to labels,
/// one `<class-dir> <label>` pair per line, `#` starts a comment.
pub const MANIFEST_FILE: &str = "manifest.txt";

fn sorted_entries(dir: &Path, want_dirs: bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if hidden {
            continue;
        }
        let wanted = if want_dirs {
            path.is_dir()
        } else {
            path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        };
        if wanted {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn read_manifest(path: &Path) -> Result<BTreeMap<String, Label>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(class), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::UnsupportedFormat(format!(
                "{}:{}: expected `<class-dir> <label>`",
                path.display(),
                n + 1
            )));
        };
        let label: Label = label.parse().ok().filter(|&l| l > 0).ok_or_else(|| {
            Error::UnsupportedFormat(format!(
                "{}:{}: label must be a positive integer",
                path.display(),
                n + 1
            ))
        })?;
        map.insert(class.to_string(), label);
    }
    Ok(map)
}

/// Reads every `*.pgm` frame in `dir` (sorted by file name) into a
/// column-normalized data matrix. Returns the matrix and the frame size.
pub fn read_image_set(dir: &Path) -> Result<(DataMatrix, usize, usize)> {
    let frames = sorted_entries(dir, false)?;
    if frames.is_empty() {
        return Err(Error::EmptySet(dir.to_path_buf()));
    }
    let first = read_pgm(&frames[0])?;
    let (width, height) = (first.width, first.height);
    let mut columns = vec![first.to_unit_range()];
    for path in &frames[1..] {
        let img = read_pgm(path)?;
        if (img.width, img.height) != (width, height) {
            return Err(Error::InconsistentDims(format!(
                "{} is {}x{}, expected {width}x{height}",
                path.display(),
                img.width,
                img.height
            )));
        }
        columns.push(img.to_unit_range());
    }
    let dim = width * height;
    let m = DMatrix::from_fn(dim, columns.len(), |i, j| columns[j][i]);
    let data = DataMatrix::normalized(m).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::InvalidInput(format!("{}: {msg}", dir.display())),
        other => other,
    })?;
    Ok((data, width, height))
}

/// Class subdirectories of `root` with their labels: sorted directory-name
/// order numbered 1.., or the labels from `root/manifest.txt` when present.
fn labeled_class_dirs(root: &Path) -> Result<Vec<(String, PathBuf, Label)>> {
    let manifest_path = root.join(MANIFEST_FILE);
    let manifest = if manifest_path.is_file() {
        Some(read_manifest(&manifest_path)?)
    } else {
        None
    };
    let class_dirs = sorted_entries(root, true)?;
    if class_dirs.is_empty() {
        return Err(Error::EmptySet(root.to_path_buf()));
    }
    class_dirs
        .into_iter()
        .enumerate()
        .map(|(k, dir)| {
            let name = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let label = match &manifest {
                Some(map) => *map.get(&name).ok_or_else(|| {
                    Error::InvalidInput(format!("class `{name}` missing from manifest"))
                })?,
                None => (k + 1) as Label,
            };
            Ok((name, dir, label))
        })
        .collect()
}

/// Reads single images laid out as `root/<class>/<image>.pgm`, each scaled to
/// unit norm.
pub fn read_labeled_images(root: &Path) -> Result<RawImageDataset> {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    let mut frame_size: Option<(usize, usize)> = None;
    for (_, dir, label) in labeled_class_dirs(root)? {
        let files = sorted_entries(&dir, false)?;
        if files.is_empty() {
            return Err(Error::EmptySet(dir));
        }
        for path in files {
            let img = read_pgm(&path)?;
            match frame_size {
                None => frame_size = Some((img.width, img.height)),
                Some(size) if size != (img.width, img.height) => {
                    return Err(Error::InconsistentDims(format!(
                        "{} is {}x{}, expected {}x{}",
                        path.display(),
                        img.width,
                        img.height,
                        size.0,
                        size.1
                    )))
                }
                _ => {}
            }
            let v = DVector::from_vec(img.to_unit_range());
            let norm = v.norm();
            if norm == 0.0 {
                return Err(Error::InvalidInput(format!("{} is all black", path.display())));
            }
            images.push(v / norm);
            labels.push(label);
        }
    }
    let (width, height) = frame_size.unwrap_or((0, 0));
    RawImageDataset::new(images, labels, width, height)
}

/// Reads `root/<class>/<set>/<frame>.pgm`. Classes are numbered 1.. in sorted
/// directory-name order unless `root/manifest.txt` assigns labels.
pub fn read_imageset_dirs(root: &Path) -> Result<Vec<LabeledSet>> {
    let mut sets = Vec::new();
    let mut frame_size: Option<(usize, usize)> = None;
    for (class_name, class_dir, label) in labeled_class_dirs(root)? {
        let set_dirs = sorted_entries(&class_dir, true)?;
        if set_dirs.is_empty() {
            return Err(Error::EmptySet(class_dir.clone()));
        }
        for set_dir in set_dirs {
            let (data, width, height) = read_image_set(&set_dir)?;
            match frame_size {
                None => frame_size = Some((width, height)),
                Some(size) if size != (width, height) => {
                    return Err(Error::InconsistentDims(format!(
                        "{} has {width}x{height} frames, earlier sets have {}x{}",
                        set_dir.display(),
                        size.0,
                        size.1
                    )))
                }
                _ => {}
            }
            let set_name = set_dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            sets.push(LabeledSet {
                name: format!("{class_name}/{set_name}"),
                data,
                label,
                width,
                height,
            });
        }
    }
    Ok(sets)
}
