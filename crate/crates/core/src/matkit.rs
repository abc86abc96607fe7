//! Dense complex linear algebra used by every synthesis and certification path.
//!
//! Everything here is built on a deterministic SVD, so a basis computed twice
//! from the same matrix is bitwise identical. Rank decisions are relative to the
//! largest singular value of the matrix being inspected.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;

/// Rank and leakage thresholds.
///
/// `rel_rank_tol = None` selects the size-dependent default
/// `max(rows, cols) * eps * 64`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel_rank_tol: Option<f64>,
    pub leakage_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_rank_tol: None,
            leakage_tol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rel_rank_tol: Option<f64>, leakage_tol: f64) -> Result<Self> {
        let in_range = |x: f64| x > 0.0 && x < 1.0;
        if let Some(r) = rel_rank_tol {
            if !in_range(r) {
                return invalid(format!("rel_rank_tol {r} outside (0, 1)"));
            }
        }
        if !in_range(leakage_tol) {
            return invalid(format!("leakage_tol {leakage_tol} outside (0, 1)"));
        }
        Ok(Tolerance {
            rel_rank_tol,
            leakage_tol,
        })
    }

    /// Relative singular-value cutoff for a `rows x cols` matrix.
    pub fn rank_threshold(&self, rows: usize, cols: usize) -> f64 {
        self.rel_rank_tol
            .unwrap_or(rows.max(cols) as f64 * f64::EPSILON * 64.0)
    }
}

/// Singular values in descending order together with a complete set of
/// right singular vectors (`v` is always `cols x cols`).
pub(crate) struct FullSvd {
    pub sigma: Vec<f64>,
    pub v: Mat,
}

impl FullSvd {
    fn numeric_rank(&self, threshold: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.count_above(threshold * top)
    }

    fn count_above(&self, cutoff: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }
}

pub(crate) fn check_finite(a: &Mat) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        invalid("matrix has non-finite entries")
    }
}

fn check_nonempty(a: &Mat) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return invalid(format!("empty {}x{} matrix", a.nrows(), a.ncols()));
    }
    Ok(())
}

/// Descending order permutation; ties keep index order.
fn descending(sigma: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sigma.len()).collect();
    idx.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]).then(a.cmp(&b)));
    idx
}

pub(crate) fn full_svd(a: &Mat) -> FullSvd {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return FullSvd {
            sigma: Vec::new(),
            v: Mat::zeros(0, 0),
        };
    }
    // Wide matrices are padded with zero rows so that v_t is square.
    let work = if rows < cols {
        let mut p = Mat::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let raw: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending(&raw);
    let mut v = Mat::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        let col = v_t.row(src).adjoint();
        v.set_column(dst, &col);
    }
    let mut sigma: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    sigma.truncate(rows.min(cols));
    FullSvd { sigma, v }
}

/// Singular values, descending.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral_norm(a: &Mat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Numerical rank: number of singular values above `threshold * sigma_max`.
pub fn rank(a: &Mat, tol: &Tolerance) -> Result<usize> {
    check_nonempty(a)?;
    check_finite(a)?;
    Ok(rank_of(a, tol))
}

/// Rank without the non-empty precondition; empty matrices have rank 0.
pub(crate) fn rank_of(a: &Mat, tol: &Tolerance) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = singular_values(a);
    let top = s[0];
    let thr = tol.rank_threshold(a.nrows(), a.ncols());
    s.iter().filter(|&&x| x > thr * top).count()
}

/// Orthonormal basis of the right nullspace, ordered as the trailing right
/// singular vectors.
pub fn nullspace_basis(a: &Mat, tol: &Tolerance) -> Result<Mat> {
    check_nonempty(a)?;
    check_finite(a)?;
    Ok(null_of(a, tol))
}

pub(crate) fn null_of(a: &Mat, tol: &Tolerance) -> Mat {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return Mat::identity(cols, cols);
    }
    let svd = full_svd(a);
    let r = svd.numeric_rank(tol.rank_threshold(a.nrows(), cols));
    svd.v.columns(r, cols - r).into_owned()
}

/// Orthonormal basis of the column space.
pub fn range_basis(a: &Mat, tol: &Tolerance) -> Mat {
    let rows = a.nrows();
    if a.ncols() == 0 || rows == 0 {
        return Mat::zeros(rows, 0);
    }
    // Left singular vectors of `a` are right singular vectors of `a^H`.
    let svd = full_svd(&a.adjoint());
    let r = svd.numeric_rank(tol.rank_threshold(rows, a.ncols()));
    svd.v.columns(0, r).into_owned()
}

/// Orthonormal basis of the orthogonal complement of the column space.
pub fn complement_basis(a: &Mat, tol: &Tolerance) -> Mat {
    let rows = a.nrows();
    if a.ncols() == 0 {
        return Mat::identity(rows, rows);
    }
    null_of(&a.adjoint(), tol)
}

/// Rank against `threshold * scale` instead of the matrix's own largest
/// singular value, so a product that is numerically zero has rank 0.
pub(crate) fn rank_scaled(a: &Mat, tol: &Tolerance, scale: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let cutoff = tol.rank_threshold(a.nrows(), a.ncols()) * scale;
    singular_values(a).iter().filter(|&&x| x > cutoff).count()
}

/// Complement of the column space with the cutoff of [`rank_scaled`].
pub(crate) fn complement_scaled(a: &Mat, tol: &Tolerance, scale: f64) -> Mat {
    let rows = a.nrows();
    if a.ncols() == 0 {
        return Mat::identity(rows, rows);
    }
    let svd = full_svd(&a.adjoint());
    let r = svd.count_above(tol.rank_threshold(rows, a.ncols()) * scale);
    svd.v.columns(r, rows - r).into_owned()
}

/// Moore-Penrose pseudo-inverse with relative singular-value cutoff.
pub fn pseudo_inverse(a: &Mat, tol: &Tolerance) -> Result<Mat> {
    check_nonempty(a)?;
    check_finite(a)?;
    let (rows, cols) = a.shape();
    if rows < cols {
        return Ok(pseudo_inverse(&a.adjoint(), tol)?.adjoint());
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = tol.rank_threshold(rows, cols) * top;
    let mut out = Mat::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk).unscale(s);
        }
    }
    Ok(out)
}

/// `||B^H B - I||_max` for a candidate orthonormal basis.
pub fn orthonormality_defect(b: &Mat) -> f64 {
    let k = b.ncols();
    let g = b.adjoint() * b - Mat::identity(k, k);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest principal angle (radians) between two subspaces given by
/// orthonormal bases with the same number of columns.
pub fn max_principal_angle(b1: &Mat, b2: &Mat, tol: &Tolerance) -> Result<f64> {
    check_finite(b1)?;
    check_finite(b2)?;
    if b1.nrows() != b2.nrows() {
        return invalid(format!("row mismatch: {} vs {}", b1.nrows(), b2.nrows()));
    }
    if b1.ncols() != b2.ncols() {
        return invalid(format!(
            "subspace dimensions differ: {} vs {}",
            b1.ncols(),
            b2.ncols()
        ));
    }
    for b in [b1, b2] {
        if orthonormality_defect(b) > tol.leakage_tol {
            return invalid("basis is not orthonormal");
        }
    }
    if b1.ncols() == 0 {
        return Ok(0.0);
    }
    let cross = b1.adjoint() * b2;
    let residual = b2 - b1 * &cross;
    let sin = spectral_norm(&residual);
    let cos = singular_values(&cross).last().copied().unwrap_or(0.0);
    Ok(sin.atan2(cos))
}

pub fn block_diag(block: &Mat, copies: usize) -> Mat {
    let (r, c) = block.shape();
    let mut out = Mat::zeros(r * copies, c * copies);
    for s in 0..copies {
        out.view_mut((s * r, s * c), (r, c)).copy_from(block);
    }
    out
}

/// Horizontal concatenation; all parts must share the row count `rows`.
pub fn hcat(rows: usize, parts: &[Mat]) -> Mat {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        debug_assert_eq!(p.nrows(), rows);
        out.columns_mut(at, p.ncols()).copy_from(p);
        at += p.ncols();
    }
    out
}

/// Vertical concatenation; all parts must share the column count `cols`.
pub fn vcat(cols: usize, parts: &[Mat]) -> Mat {
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        debug_assert_eq!(p.ncols(), cols);
        out.rows_mut(at, p.nrows()).copy_from(p);
        at += p.nrows();
    }
    out
}

/// Real matrix lifted into the complex field, row-major input.
pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_iterator(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)))
}

/// Row-major `[re, im]` pairs.
pub fn to_entries(a: &Mat) -> Vec<[f64; 2]> {
    (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| [a[(i, j)].re, a[(i, j)].im])
        .collect()
}

pub fn from_entries(rows: usize, cols: usize, data: &[[f64; 2]]) -> Result<Mat> {
    if data.len() != rows * cols {
        return invalid(format!(
            "expected {} entries for a {rows}x{cols} matrix, got {}",
            rows * cols,
            data.len()
        ));
    }
    let a = Mat::from_row_iterator(rows, cols, data.iter().map(|&[re, im]| C64::new(re, im)));
    check_finite(&a)?;
    Ok(a)
}

/// Self-describing matrix document used in JSON artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatDoc {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatDoc {
    pub fn from_mat(a: &Mat) -> Self {
        MatDoc {
            rows: a.nrows(),
            cols: a.ncols(),
            data: to_entries(a),
        }
    }

    pub fn to_mat(&self) -> Result<Mat> {
        from_entries(self.rows, self.cols, &self.data)
    }
}
