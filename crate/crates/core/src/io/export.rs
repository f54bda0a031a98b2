//! CSV and PGM exporters for inspecting trained models.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::pgm::write_pgm;
use crate::error::{Error, Result};
use crate::grassmann::{adaptive_squared_distance, pixel_influence, principal_decomposition, PrincipalDecomposition, Subspace};
use crate::lvq::{ModelState, Sample};

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn check_size(len: usize, width: usize, height: usize) -> Result<()> {
    if width * height != len {
        return Err(Error::DimensionMismatch(format!(
            "{width}x{height} image cannot hold {len} values"
        )));
    }
    Ok(())
}

/// Affine map of `[min, max]` onto `[0, 255]`. Returns the pixels and `(min, max)`.
pub fn rescale_to_pixels(values: &[f64]) -> (Vec<u8>, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let pixels = values
        .iter()
        .map(|v| {
            if range > 0.0 {
                (255.0 * (v - min) / range).round() as u8
            } else {
                0
            }
        })
        .collect();
    (pixels, min, max)
}

/// Symmetric map of `[-a, a]` onto `[0, 255]` with `a = max |value|`, so zero
/// lands on mid-gray. Returns the pixels and `a`.
pub fn influence_to_pixels(values: &[f64]) -> (Vec<u8>, f64) {
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pixels = values
        .iter()
        .map(|v| {
            let unit = if max_abs > 0.0 { v / max_abs } else { 0.0 };
            (127.5 + 127.5 * unit).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    (pixels, max_abs)
}

/// `index,lambda` followed by one row per principal angle (1-based index).
pub fn export_relevance_csv(model: &ModelState, path: &Path) -> Result<()> {
    let mut out = String::from("index,lambda\n");
    for (k, w) in model.relevance.weights().iter().enumerate() {
        writeln!(out, "{},{w}", k + 1).unwrap();
    }
    write_text(path, &out)
}

/// Writes each basis vector of prototype `index` as
/// `prototype<index>_vector<k>.pgm`, min-max rescaled per image, plus a
/// `prototype<index>_scaling.txt` sidecar recording the rescaling.
pub fn export_prototype_images(
    model: &ModelState,
    index: usize,
    width: usize,
    height: usize,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let proto = model.prototypes.get(index).ok_or_else(|| {
        Error::InvalidInput(format!(
            "prototype index {index} out of range ({} prototypes)",
            model.prototypes.len()
        ))
    })?;
    let basis = proto.subspace.basis();
    check_size(basis.nrows(), width, height)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut sidecar = format!(
        "prototype {index} label {}\npixel = round(255 * (value - min) / (max - min)), per vector\nvector,min,max\n",
        proto.label
    );
    for (k, col) in basis.column_iter().enumerate() {
        let values: Vec<f64> = col.iter().copied().collect();
        let (pixels, min, max) = rescale_to_pixels(&values);
        let path = dir.join(format!("prototype{index}_vector{}.pgm", k + 1));
        write_pgm(&path, width, height, &pixels)?;
        writeln!(sidecar, "{},{min},{max}", k + 1).unwrap();
        written.push(path);
    }
    let side = dir.join(format!("prototype{index}_scaling.txt"));
    write_text(&side, &sidecar)?;
    written.push(side);
    Ok(written)
}

/// Pixel-influence map of angle `i` (0-based) as a PGM, symmetric around
/// mid-gray, with a `.txt` sidecar holding the scale and the raw sum.
pub fn export_pixel_influence(
    pd: &PrincipalDecomposition,
    i: usize,
    width: usize,
    height: usize,
    path: &Path,
) -> Result<DVector<f64>> {
    let influence = pixel_influence(pd, i)?;
    check_size(influence.len(), width, height)?;
    let (pixels, max_abs) = influence_to_pixels(influence.as_slice());
    write_pgm(path, width, height, &pixels)?;
    let sidecar = format!(
        "angle {}\ntheta {}\ncos_theta {}\nsum {}\nmax_abs {max_abs}\npixel = round(127.5 + 127.5 * value / max_abs)\n",
        i + 1,
        pd.angles[i],
        pd.cosines[i],
        influence.sum()
    );
    write_text(&path.with_extension("txt"), &sidecar)?;
    Ok(influence)
}

/// Pairwise adaptive squared distances among `samples` followed by the
/// model's prototypes. Symmetric with an exactly zero diagonal.
pub fn distance_matrix(model: &ModelState, samples: &[Sample]) -> Result<DMatrix<f64>> {
    let points: Vec<&Subspace> = samples
        .iter()
        .map(|s| &s.subspace)
        .chain(model.prototypes.iter().map(|p| &p.subspace))
        .collect();
    let n = points.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .map(|j| {
                    principal_decomposition(points[i], points[j])
                        .map(|pd| adaptive_squared_distance(&pd, &model.relevance))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let j = i + 1 + k;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| m[(r, c)].to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// (N + p)×(N + p) distance matrix as headerless CSV; rows are the samples
/// in order, then the prototypes.
pub fn export_distance_matrix_csv(model: &ModelState, samples: &[Sample], path: &Path) -> Result<DMatrix<f64>> {
    let m = distance_matrix(model, samples)?;
    write_text(path, &matrix_csv(&m))?;
    Ok(m)
}

/// Image-contribution matrix (m rows × d columns), headerless CSV.
pub fn export_image_contribution_csv(m: &DMatrix<f64>, path: &Path) -> Result<()> {
    write_text(path, &matrix_csv(m))
}

/// Confusion counts with a `true\predicted` header row and column.
pub fn export_confusion_csv(confusion: &[Vec<usize>], path: &Path) -> Result<()> {
    let c = confusion.len();
    let mut out = String::from("true\\predicted");
    for j in 1..=c {
        write!(out, ",{j}").unwrap();
    }
    out.push('\n');
    for (i, row) in confusion.iter().enumerate() {
        write!(out, "{}", i + 1).unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    write_text(path, &out)
}
