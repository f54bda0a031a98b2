//! Points on the Grassmann manifold G(D, d) and the principal-angle machinery
//! used by every distance, gradient and explanation in the crate.
//!
//! A subspace is stored as a D×d matrix with orthonormal columns. Two such
//! matrices describe the same manifold point whenever they differ by a right
//! multiplication with a d×d orthogonal matrix, so everything exported here
//! that is a function of the point (angles, distances) is invariant under
//! that change of basis. Principal vectors are not: they are tied to the
//! particular SVD that produced them.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Tolerance for `basisᵀ·basis = I` (max-abs entrywise).
pub const ORTHONORMAL_TOL: f64 = 1e-8;
/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-12;
/// Absolute threshold for inverting singular values in [`image_contribution`].
pub const SINGULAR_FACTOR_TOL: f64 = 1e-12;
/// Below this value of `1 − cos²θ` the G-matrix entry uses its θ → 0 limit.
pub const SMALL_SINE_SQ: f64 = 1e-12;

/// Thin SVD with singular values sorted in descending order.
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn thin_svd(m: &DMatrix<f64>) -> Result<ThinSvd> {
    // nalgebra's SVD can return a wrong factorization when singular values
    // repeat (common for P1ᵀP2 of intersecting subspaces), so faer does this step
    let a = faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = a
        .thin_svd()
        .map_err(|e| Error::InvalidInput(format!("SVD did not converge: {e:?}")))?;
    let (fu, fv, fs) = (svd.U(), svd.V(), svd.S().column_vector());
    let k = fs.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]));
    Ok(ThinSvd {
        u: DMatrix::from_fn(m.nrows(), k, |i, j| fu[(i, order[j])]),
        sigma: order.iter().map(|&j| fs[j]).collect(),
        v: DMatrix::from_fn(m.ncols(), k, |i, j| fv[(i, order[j])]),
    })
}

fn numerical_rank(sigma: &[f64]) -> usize {
    let largest = sigma.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > RANK_TOL * largest).count()
}

fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// Raw D×m image stack, one vectorized image per column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    entries: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a matrix whose columns are already unit-norm.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidInput("data matrix must be non-empty".into()));
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite("data matrix".into()));
        }
        for (j, col) in entries.column_iter().enumerate() {
            let norm = col.norm();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidInput(format!(
                    "column {j} has norm {norm}, expected unit norm"
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Scales every column to unit Euclidean norm.
    pub fn normalized(mut entries: DMatrix<f64>) -> Result<Self> {
        for (j, mut col) in entries.column_iter_mut().enumerate() {
            let norm = col.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "column {j} has norm {norm} and cannot be normalized"
                )));
            }
            col /= norm;
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn ambient_dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_images(&self) -> usize {
        self.entries.ncols()
    }
}

/// D×d matrix with orthonormal columns, i.e. a representative of a point on G(D, d).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Validates orthonormality to [`ORTHONORMAL_TOL`].
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "basis of shape {}x{} is not a valid subspace representative",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if !all_finite(&basis) {
            return Err(Error::NonFinite("subspace basis".into()));
        }
        let s = Self { basis };
        let err = s.orthonormality_error();
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (max |BᵀB − I| = {err:e})"
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        debug_assert!(Self { basis: basis.clone() }.orthonormality_error() < ORTHONORMAL_TOL);
        Self { basis }
    }

    /// Orthonormalized D×d matrix of independent standard normal entries.
    pub fn random<R: Rng + ?Sized>(ambient_dim: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let m = DMatrix::from_fn(ambient_dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        orthonormalize_columns(&m)
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// max-abs entry of `BᵀB − I`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.basis.tr_mul(&self.basis);
        let d = gram.nrows();
        (gram - DMatrix::<f64>::identity(d, d)).amax()
    }

    /// Orthogonal projector `B·Bᵀ` onto the span.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// Truncated SVD of an image set: the subspace plus the factors needed to map
/// raw images back onto principal vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceWithFactors {
    pub subspace: Subspace,
    /// First d singular values, descending.
    pub singular_values: Vec<f64>,
    /// m×d, the first d right singular vectors.
    pub right_factors: DMatrix<f64>,
}

/// Angles, rotations and principal vectors for an ordered pair of subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalDecomposition {
    /// Ascending, in [0, π/2].
    pub angles: Vec<f64>,
    /// Descending, in [0, 1].
    pub cosines: Vec<f64>,
    /// Q_P, so that `principal_left = P·Q_P`.
    pub rot_left: DMatrix<f64>,
    /// Q_W, so that `principal_right = W·Q_W`.
    pub rot_right: DMatrix<f64>,
    /// U.
    pub principal_left: DMatrix<f64>,
    /// V.
    pub principal_right: DMatrix<f64>,
}

impl PrincipalDecomposition {
    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    pub fn squared_geodesic_distance(&self) -> f64 {
        squared_geodesic_distance(self)
    }

    pub fn geodesic_distance(&self) -> f64 {
        geodesic_distance(self)
    }
}

/// Nonnegative weights over principal angles.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceVector {
    weights: Vec<f64>,
}

impl RelevanceVector {
    /// All-ones weights (plain geodesic distance).
    pub fn ones(d: usize) -> Self {
        Self {
            weights: vec![1.0; d],
        }
    }

    /// 1/d everywhere: the starting point of relevance learning.
    pub fn uniform(d: usize) -> Self {
        Self {
            weights: vec![1.0 / d as f64; d],
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("relevance vector must be non-empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidInput(format!(
                "relevance weights must be finite and nonnegative, got {w}"
            )));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_all_ones(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// Nonnegative with |Σw − 1| ≤ `tol`.
    pub fn is_on_simplex(&self, tol: f64) -> bool {
        let sum: f64 = self.weights.iter().sum();
        self.weights.iter().all(|&w| w >= 0.0) && (sum - 1.0).abs() <= tol
    }
}

/// Orthonormal basis for the column space of `m`, taken as its left singular vectors.
pub fn orthonormalize_columns(m: &DMatrix<f64>) -> Result<Subspace> {
    let (rows, cols) = m.shape();
    if cols == 0 || cols > rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot orthonormalize a {rows}x{cols} matrix"
        )));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite("matrix to orthonormalize".into()));
    }
    let svd = thin_svd(m)?;
    let rank = numerical_rank(&svd.sigma);
    if rank < cols {
        return Err(Error::RankDeficient {
            rank,
            expected: cols,
        });
    }
    Ok(Subspace::from_orthonormal(svd.u.columns(0, cols).into_owned()))
}

/// Rank-d truncated SVD `X ≈ P·diag(Λ)·Rᵀ` of an image set.
pub fn subspace_from_set(x: &DataMatrix, d: usize) -> Result<SubspaceWithFactors> {
    let (rows, cols) = x.entries.shape();
    if d == 0 || d > rows.min(cols) {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {d} exceeds min(D, m) = {}",
            rows.min(cols)
        )));
    }
    let svd = thin_svd(&x.entries)?;
    let rank = numerical_rank(&svd.sigma);
    if rank < d {
        return Err(Error::RankDeficient { rank, expected: d });
    }
    Ok(SubspaceWithFactors {
        subspace: Subspace::from_orthonormal(svd.u.columns(0, d).into_owned()),
        singular_values: svd.sigma[..d].to_vec(),
        right_factors: svd.v.columns(0, d).into_owned(),
    })
}

/// Principal angles and vectors from the SVD `P1ᵀP2 = Q_P·cosΘ·Q_Wᵀ`.
pub fn principal_decomposition(p1: &Subspace, p2: &Subspace) -> Result<PrincipalDecomposition> {
    if p1.ambient_dim() != p2.ambient_dim() || p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of shape {}x{} and {}x{}",
            p1.ambient_dim(),
            p1.dim(),
            p2.ambient_dim(),
            p2.dim()
        )));
    }
    let svd = thin_svd(&p1.basis.tr_mul(&p2.basis))?;
    // rounding can push a cosine just past 1
    let cosines: Vec<f64> = svd.sigma.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    let principal_left = &p1.basis * &svd.u;
    let principal_right = &p2.basis * &svd.v;
    // acos loses half the digits near cos = 1; pair the cosine with the sine
    // taken from the residual of vₖ after projecting onto span(P1)
    let residual = &principal_right - &p1.basis * p1.basis.tr_mul(&principal_right);
    let mut angles = Vec::with_capacity(cosines.len());
    for (k, c) in cosines.iter().enumerate() {
        let theta = residual.column(k).norm().atan2(*c);
        let floor = angles.last().copied().unwrap_or(0.0);
        angles.push(theta.max(floor));
    }
    Ok(PrincipalDecomposition {
        angles,
        cosines,
        rot_left: svd.u,
        rot_right: svd.v,
        principal_left,
        principal_right,
    })
}

/// Σ θₖ².
pub fn squared_geodesic_distance(pd: &PrincipalDecomposition) -> f64 {
    pd.angles.iter().map(|t| t * t).sum()
}

/// ‖Θ‖₂.
pub fn geodesic_distance(pd: &PrincipalDecomposition) -> f64 {
    squared_geodesic_distance(pd).sqrt()
}

/// Σ λₖ θₖ².
pub fn adaptive_squared_distance(pd: &PrincipalDecomposition, relevance: &RelevanceVector) -> f64 {
    debug_assert_eq!(pd.dim(), relevance.len());
    pd.angles
        .iter()
        .zip(relevance.weights())
        .map(|(t, l)| l * t * t)
        .sum()
}

/// Angle between the line spanned by unit vector `x` and `span(W)`.
pub fn single_vector_angle(x: &DVector<f64>, w: &Subspace) -> f64 {
    let proj = w.basis.tr_mul(x);
    proj.norm().clamp(0.0, 1.0).acos()
}

/// Single-angle decomposition between the line through unit vector `x` and
/// `span(W)`: `principal_left = x`, `principal_right` is the unit vector of
/// `span(W)` closest to `x`, and `rot_right = Wᵀx/‖Wᵀx‖` (d×1) holds its
/// coefficients in the basis of W.
pub fn vector_decomposition(x: &DVector<f64>, w: &Subspace) -> Result<PrincipalDecomposition> {
    if x.len() != w.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {}, subspace in R^{}",
            x.len(),
            w.ambient_dim()
        )));
    }
    let coeffs = w.basis.tr_mul(x);
    let norm = coeffs.norm();
    let cosine = norm.clamp(0.0, 1.0);
    let rot_right = if norm > 0.0 {
        coeffs / norm
    } else {
        let mut e = DVector::zeros(w.dim());
        e[0] = 1.0;
        e
    };
    let principal_right = &w.basis * &rot_right;
    Ok(PrincipalDecomposition {
        angles: vec![cosine.acos()],
        cosines: vec![cosine],
        rot_left: DMatrix::from_element(1, 1, 1.0),
        rot_right: DMatrix::from_column_slice(w.dim(), 1, rot_right.as_slice()),
        principal_left: DMatrix::from_column_slice(x.len(), 1, x.as_slice()),
        principal_right: DMatrix::from_column_slice(x.len(), 1, principal_right.as_slice()),
    })
}

/// Diagonal of G: `2λₖθₖ / sin θₖ`, with the θ → 0 limit `2λₖ`.
pub fn g_matrix_diagonal(pd: &PrincipalDecomposition, relevance: &RelevanceVector) -> Vec<f64> {
    pd.cosines
        .iter()
        .zip(&pd.angles)
        .zip(relevance.weights())
        .map(|((&c, &theta), &lambda)| {
            let sine_sq = 1.0 - c * c;
            if sine_sq < SMALL_SINE_SQ {
                2.0 * lambda
            } else {
                2.0 * lambda * theta / sine_sq.sqrt()
            }
        })
        .collect()
}

/// Per-pixel terms `u_{i,j}·v_{i,j}` of the i-th principal pair (0-based `i`).
/// They sum to `cos θᵢ`.
pub fn pixel_influence(pd: &PrincipalDecomposition, i: usize) -> Result<DVector<f64>> {
    if i >= pd.dim() {
        return Err(Error::InvalidInput(format!(
            "angle index {i} out of range for d = {}",
            pd.dim()
        )));
    }
    Ok(pd
        .principal_left
        .column(i)
        .component_mul(&pd.principal_right.column(i)))
}

/// `M = R·Λ⁻¹·Q_P`, mapping the raw images of a set onto its principal
/// vectors (`X·M ≈ U`).
pub fn image_contribution(factors: &SubspaceWithFactors, rot_left: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = factors.singular_values.len();
    if rot_left.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "rotation of shape {:?}, expected {d}x{d}",
            rot_left.shape()
        )));
    }
    if let Some(&value) = factors
        .singular_values
        .iter()
        .find(|&&s| s < SINGULAR_FACTOR_TOL)
    {
        return Err(Error::SingularFactor { value });
    }
    let mut scaled = factors.right_factors.clone();
    for (mut col, s) in scaled.column_iter_mut().zip(&factors.singular_values) {
        col /= *s;
    }
    Ok(scaled * rot_left)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn span(d: usize, cols: &[&[f64]]) -> Subspace {
        let m = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
        orthonormalize_columns(&m).unwrap()
    }

    #[test]
    fn orthonormalize_removes_column_scaling() {
        let m = DMatrix::from_row_slice(3, 2, &[2.0, 0.0, 0.0, 3.0, 0.0, 0.0]);
        let s = orthonormalize_columns(&m).unwrap();
        assert!(s.orthonormality_error() < 1e-12);
        let expected = span(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        assert_abs_diff_eq!(s.projector(), expected.projector(), epsilon = 1e-12);
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Subspace::random(7, 3, &mut rng).unwrap();
        let t = orthonormalize_columns(s.basis()).unwrap();
        let pd = principal_decomposition(&s, &t).unwrap();
        assert!(pd.angles.iter().all(|&a| a < 1e-7));
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 0.0]);
        assert!(matches!(
            orthonormalize_columns(&m),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn set_with_orthonormal_columns() {
        let x = DataMatrix::new(DMatrix::from_row_slice(
            3,
            2,
            &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        ))
        .unwrap();
        let f = subspace_from_set(&x, 2).unwrap();
        for s in &f.singular_values {
            assert_abs_diff_eq!(*s, 1.0, epsilon = 1e-12);
        }
        let r = &f.right_factors;
        assert_abs_diff_eq!(r.tr_mul(r), DMatrix::identity(2, 2), epsilon = 1e-12);
        assert_abs_diff_eq!(
            f.subspace.projector(),
            x.entries() * x.entries().transpose(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn set_of_repeated_image() {
        let x = DataMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0])).unwrap();
        let f = subspace_from_set(&x, 1).unwrap();
        assert_abs_diff_eq!(f.singular_values[0], 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(f.subspace.basis()[(0, 0)].abs(), 1.0, epsilon = 1e-12);
        assert!(matches!(
            subspace_from_set(&x, 2),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn identical_subspaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Subspace::random(6, 3, &mut rng).unwrap();
        let pd = principal_decomposition(&p, &p).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(pd.cosines[k], 1.0, epsilon = 1e-12);
            assert!(pd.angles[k] < 1e-7);
        }
        assert_abs_diff_eq!(pd.principal_left, pd.principal_right, epsilon = 1e-10);
        assert!(squared_geodesic_distance(&pd) < 1e-13);
    }

    #[test]
    fn orthogonal_subspaces() {
        let p1 = span(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
        let p2 = span(4, &[&[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        let pd = principal_decomposition(&p1, &p2).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(pd.angles[k], FRAC_PI_2, epsilon = 1e-12);
            assert_abs_diff_eq!(pd.cosines[k], 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(squared_geodesic_distance(&pd), PI * PI / 2.0, epsilon = 1e-12);
        for i in 0..2 {
            assert_abs_diff_eq!(pixel_influence(&pd, i).unwrap().sum(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_shared_direction_one_at_45_degrees() {
        let p1 = span(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let p2 = span(3, &[&[1.0, 0.0, 0.0], &[0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]]);
        let pd = principal_decomposition(&p1, &p2).unwrap();
        assert_abs_diff_eq!(pd.angles[0], 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(pd.angles[1], FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(pd.cosines[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pd.cosines[1], FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(squared_geodesic_distance(&pd), 0.61685, epsilon = 1e-5);
    }

    #[test]
    fn geodesic_distance_of_lines() {
        let a = span(2, &[&[1.0, 0.0]]);
        let b = span(2, &[&[0.0, 1.0]]);
        assert_abs_diff_eq!(
            geodesic_distance(&principal_decomposition(&a, &b).unwrap()),
            FRAC_PI_2,
            epsilon = 1e-12
        );
        assert!(geodesic_distance(&principal_decomposition(&a, &a).unwrap()) < 1e-7);
    }

    #[test]
    fn adaptive_distance_cases() {
        let p1 = span(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
        let p2 = span(4, &[&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0], &[0.0, 0.0, 0.0, 1.0]]);
        let pd = principal_decomposition(&p1, &p2).unwrap();
        assert_abs_diff_eq!(pd.angles[0], FRAC_PI_4, epsilon = 1e-12);
        assert_abs_diff_eq!(pd.angles[1], FRAC_PI_2, epsilon = 1e-12);

        let lambda = RelevanceVector::from_weights(vec![0.3, 0.7]).unwrap();
        let direct = 0.3 * FRAC_PI_4.powi(2) + 0.7 * FRAC_PI_2.powi(2);
        assert_abs_diff_eq!(adaptive_squared_distance(&pd, &lambda), direct, epsilon = 1e-12);
        assert_abs_diff_eq!(direct, 1.912236, epsilon = 1e-6);

        let uniform = RelevanceVector::uniform(2);
        assert_abs_diff_eq!(
            adaptive_squared_distance(&pd, &uniform),
            squared_geodesic_distance(&pd) / 2.0,
            epsilon = 1e-14
        );
        let first = RelevanceVector::from_weights(vec![1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(
            adaptive_squared_distance(&pd, &first),
            pd.angles[0].powi(2),
            epsilon = 1e-14
        );
        assert_eq!(
            adaptive_squared_distance(&pd, &RelevanceVector::ones(2)),
            squared_geodesic_distance(&pd)
        );
    }

    #[test]
    fn single_vector_angle_cases() {
        let w = span(3, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let inside = DVector::from_vec(vec![0.6, 0.8, 0.0]);
        assert!(single_vector_angle(&inside, &w) < 1e-7);
        let outside = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(single_vector_angle(&outside, &w), FRAC_PI_2, epsilon = 1e-12);
        let line = span(3, &[&[1.0, 0.0, 0.0]]);
        let diag = DVector::from_vec(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]);
        assert_abs_diff_eq!(single_vector_angle(&diag, &line), FRAC_PI_4, epsilon = 1e-12);
    }

    fn pd_with_angles(angles: &[f64]) -> PrincipalDecomposition {
        let d = angles.len();
        let dim = 2 * d;
        let p = DMatrix::from_fn(dim, d, |i, j| if i == j { 1.0 } else { 0.0 });
        let w = DMatrix::from_fn(dim, d, |i, j| {
            if i == j {
                angles[j].cos()
            } else if i == d + j {
                angles[j].sin()
            } else {
                0.0
            }
        });
        principal_decomposition(&Subspace::new(p).unwrap(), &Subspace::new(w).unwrap()).unwrap()
    }

    #[test]
    fn vector_decomposition_matches_single_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = Subspace::random(5, 2, &mut rng).unwrap();
        let x = Subspace::random(5, 1, &mut rng).unwrap().basis().column(0).into_owned();
        let pd = vector_decomposition(&x, &w).unwrap();
        assert_abs_diff_eq!(pd.angles[0], single_vector_angle(&x, &w), epsilon = 1e-12);
        let sum = pixel_influence(&pd, 0).unwrap().sum();
        assert_abs_diff_eq!(sum, pd.cosines[0], epsilon = 1e-12);
    }

    #[test]
    fn g_matrix_values() {
        let pd = pd_with_angles(&[0.0, FRAC_PI_4, FRAC_PI_2]);
        let g = g_matrix_diagonal(&pd, &RelevanceVector::ones(3));
        assert_eq!(g[0], 2.0);
        assert_abs_diff_eq!(g[2], PI, epsilon = 1e-12);

        let half = RelevanceVector::from_weights(vec![1.0, 0.5, 1.0]).unwrap();
        let g = g_matrix_diagonal(&pd, &half);
        assert_abs_diff_eq!(g[1], 1.11072, epsilon = 1e-5);
    }

    #[test]
    fn g_matrix_is_finite_near_zero_angle() {
        let pd = pd_with_angles(&[1e-9, 1e-5]);
        let g = g_matrix_diagonal(&pd, &RelevanceVector::ones(2));
        assert!(g.iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn pixel_influence_of_identical_lines() {
        let a = span(3, &[&[1.0, 0.0, 0.0]]);
        let pd = principal_decomposition(&a, &a).unwrap();
        let inf = pixel_influence(&pd, 0).unwrap();
        assert_abs_diff_eq!(inf, DVector::from_vec(vec![1.0, 0.0, 0.0]), epsilon = 1e-12);
        assert!(pixel_influence(&pd, 1).is_err());
    }

    #[test]
    fn image_contribution_for_orthonormal_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DataMatrix::new(Subspace::random(6, 3, &mut rng).unwrap().into_basis()).unwrap();
        let f = subspace_from_set(&x, 3).unwrap();
        let w = Subspace::random(6, 3, &mut rng).unwrap();
        let pd = principal_decomposition(&f.subspace, &w).unwrap();
        let m = image_contribution(&f, &pd.rot_left).unwrap();
        assert_abs_diff_eq!(x.entries() * &m, pd.principal_left, epsilon = 1e-12);
    }

    #[test]
    fn image_contribution_rejects_tiny_singular_values() {
        let f = SubspaceWithFactors {
            subspace: span(2, &[&[1.0, 0.0]]),
            singular_values: vec![1e-14],
            right_factors: DMatrix::from_element(1, 1, 1.0),
        };
        assert!(matches!(
            image_contribution(&f, &DMatrix::identity(1, 1)),
            Err(Error::SingularFactor { .. })
        ));
    }

    #[test]
    fn data_matrix_requires_unit_columns() {
        assert!(DataMatrix::new(DMatrix::from_element(2, 1, 1.0)).is_err());
        let x = DataMatrix::normalized(DMatrix::from_element(2, 1, 1.0)).unwrap();
        assert_abs_diff_eq!(x.entries().column(0).norm(), 1.0, epsilon = 1e-15);
        assert!(DataMatrix::normalized(DMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn relevance_simplex() {
        assert!(RelevanceVector::uniform(4).is_on_simplex(1e-12));
        assert!(!RelevanceVector::ones(2).is_on_simplex(1e-12));
        assert!(RelevanceVector::from_weights(vec![-0.1, 1.1]).is_err());
    }
}
