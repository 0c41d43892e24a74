//! Uniform grids over a truncated box in R^N, grid-sampled fields, trapezoidal
//! quadrature and the binary snapshot format.
//!
//! Index order is row-major: the last axis varies fastest.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Snapshot magic bytes.
pub const SNAPSHOT_MAGIC: [u8; 4] = *b"NFLD";
/// Snapshot format version written by [`write_snapshot`].
pub const SNAPSHOT_VERSION: u16 = 1;

/// Minimum box half-width per axis, `counts_i * spacing_i / 2`.
pub const MIN_HALF_WIDTH: f64 = 2.0;

/// Byte length of a snapshot header for a `dim`-dimensional grid.
pub const fn snapshot_header_len(dim: usize) -> usize {
    4 + 2 + 1 + dim * (4 + 8 + 8)
}

/// A uniform tensor-product grid. Grid index `k` along axis `i` sits at
/// `origin[i] + k * spacing[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    counts: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
}

impl GridSpec {
    pub fn new(counts: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>) -> Result<Self> {
        let dim = counts.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Parameter(format!(
                "dimension must be 1..=3, got {dim}"
            )));
        }
        if spacing.len() != dim || origin.len() != dim {
            return Err(Error::Shape(format!(
                "counts, spacing and origin must all have length {dim}"
            )));
        }
        for axis in 0..dim {
            if counts[axis] < 3 {
                return Err(Error::Parameter(format!(
                    "axis {axis}: need at least 3 points, got {}",
                    counts[axis]
                )));
            }
            if !(spacing[axis] > 0.0 && spacing[axis].is_finite()) {
                return Err(Error::Parameter(format!(
                    "axis {axis}: spacing must be positive, got {}",
                    spacing[axis]
                )));
            }
            if !origin[axis].is_finite() {
                return Err(Error::NonFinite(format!("axis {axis}: origin")));
            }
            let half_width = counts[axis] as f64 * spacing[axis] / 2.0;
            if half_width < MIN_HALF_WIDTH {
                return Err(Error::Parameter(format!(
                    "axis {axis}: box half-width {half_width} is below {MIN_HALF_WIDTH}"
                )));
            }
        }
        Ok(Self {
            counts,
            spacing,
            origin,
        })
    }

    /// `points` per axis spanning `[-half_width, half_width]` on every axis.
    pub fn symmetric(dim: usize, points: usize, half_width: f64) -> Result<Self> {
        if points < 3 {
            return Err(Error::Parameter(format!(
                "need at least 3 points, got {points}"
            )));
        }
        let dx = 2.0 * half_width / (points - 1) as f64;
        Self::new(vec![points; dim], vec![dx; dim], vec![-half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Product of the spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        self.origin[axis] + k as f64 * self.spacing[axis]
    }

    /// Coordinate of the last grid point along `axis`.
    pub fn upper(&self, axis: usize) -> f64 {
        self.coordinate(axis, self.counts[axis] - 1)
    }

    /// Half the physical extent `(counts - 1) * spacing` along `axis`.
    pub fn extent_half_width(&self, axis: usize) -> f64 {
        (self.counts[axis] - 1) as f64 * self.spacing[axis] / 2.0
    }

    pub fn center(&self, axis: usize) -> f64 {
        0.5 * (self.origin[axis] + self.upper(axis))
    }

    /// Row-major strides.
    pub fn strides(&self) -> [usize; MAX_DIM] {
        let mut strides = [0; MAX_DIM];
        let mut s = 1;
        for axis in (0..self.dim()).rev() {
            strides[axis] = s;
            s *= self.counts[axis];
        }
        strides
    }

    /// Multi-index of a flat index; unused axes are zero.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Physical coordinates of a flat index; unused axes are zero.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim() {
            x[axis] = self.coordinate(axis, idx[axis]);
        }
        x
    }

    /// Tensor-product composite trapezoid weights, one per grid point.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let axis_weights: Vec<Vec<f64>> = (0..self.dim())
            .map(|axis| {
                let n = self.counts[axis];
                let dx = self.spacing[axis];
                (0..n)
                    .map(|k| if k == 0 || k == n - 1 { 0.5 * dx } else { dx })
                    .collect()
            })
            .collect();
        (0..self.len())
            .map(|flat| {
                let idx = self.unravel(flat);
                (0..self.dim())
                    .map(|axis| axis_weights[axis][idx[axis]])
                    .product()
            })
            .collect()
    }

    /// Samples `f` at every grid point.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64,
    {
        let dim = self.dim();
        (0..self.len())
            .map(|flat| f(&self.point(flat)[..dim]))
            .collect()
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!(
                "grid mismatch: {:?} vs {:?}",
                self.counts, other.counts
            )));
        }
        Ok(())
    }
}

/// A real function sampled on a [`GridSpec`]. Values are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "field has {} values but grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at index {k}")));
        }
        Ok(Self { grid, values })
    }

    /// Builds a field without the finiteness scan. Callers guarantee finiteness.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![value; n])
    }

    pub fn zeros(grid: GridSpec) -> Self {
        let n = grid.len();
        Self::from_parts(grid, vec![0.0; n])
    }

    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let values = grid.sample(f);
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Applies `f` pointwise.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Field> {
        Field::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Combines two fields on the same grid pointwise.
    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Field::new(
            self.grid.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `sup |u|` over grid points.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Zeroes the field wherever `mask` is false.
    pub fn masked(&self, mask: &[bool]) -> Result<Field> {
        if mask.len() != self.len() {
            return Err(Error::Shape("mask length differs from field".into()));
        }
        Ok(Field::from_parts(
            self.grid.clone(),
            self.values
                .iter()
                .zip(mask)
                .map(|(&v, &keep)| if keep { v } else { 0.0 })
                .collect(),
        ))
    }

    /// The field shifted by `cells` grid cells along `axis`, zero-filled.
    pub fn shifted(&self, axis: usize, cells: isize) -> Result<Field> {
        if axis >= self.grid.dim() {
            return Err(Error::Parameter(format!("axis {axis} out of range")));
        }
        let n = self.grid.counts()[axis] as isize;
        let values = (0..self.len())
            .map(|flat| {
                let mut idx = self.grid.unravel(flat);
                let src = idx[axis] as isize - cells;
                if src < 0 || src >= n {
                    0.0
                } else {
                    idx[axis] = src as usize;
                    self.values[self.grid.ravel(&idx[..self.grid.dim()])]
                }
            })
            .collect();
        Ok(Field::from_parts(self.grid.clone(), values))
    }
}

/// Composite trapezoid approximation of `∫ field(x) · weight(x) dx` over the box.
pub fn quadrature(field: &Field, weight_samples: Option<&[f64]>) -> Result<f64> {
    if let Some(w) = weight_samples {
        if w.len() != field.len() {
            return Err(Error::Shape(format!(
                "weight has {} samples, field has {}",
                w.len(),
                field.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("weight samples".into()));
        }
    }
    let tw = field.grid().trapezoid_weights();
    let total = match weight_samples {
        Some(w) => field
            .values()
            .iter()
            .zip(&tw)
            .zip(w)
            .map(|((&u, &q), &r)| u * q * r)
            .sum(),
        None => field.values().iter().zip(&tw).map(|(&u, &q)| u * q).sum(),
    };
    Ok(total)
}

/// True at grid points whose distance to the box boundary is at least `margin`.
pub fn interior_mask(grid: &GridSpec, margin: f64) -> Result<Vec<bool>> {
    if !(margin >= 0.0) {
        return Err(Error::Parameter(format!(
            "margin must be non-negative, got {margin}"
        )));
    }
    let dim = grid.dim();
    let tol: Vec<f64> = grid.spacing().iter().map(|dx| 1e-9 * dx).collect();
    let mask: Vec<bool> = (0..grid.len())
        .map(|flat| {
            let x = grid.point(flat);
            (0..dim).all(|axis| {
                let lo = x[axis] - grid.origin()[axis];
                let hi = grid.upper(axis) - x[axis];
                lo.min(hi) >= margin - tol[axis]
            })
        })
        .collect();
    if !mask.iter().any(|&m| m) {
        return Err(Error::EmptyInterior { margin });
    }
    Ok(mask)
}

/// Writes `field` in the snapshot layout and returns the byte count.
pub fn write_snapshot<W: Write>(field: &Field, mut dest: W) -> Result<usize> {
    let grid = field.grid();
    let dim = grid.dim();
    let mut buf = Vec::with_capacity(snapshot_header_len(dim) + 8 * field.len());
    buf.extend_from_slice(&SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.push(dim as u8);
    for axis in 0..dim {
        let count = u32::try_from(grid.counts()[axis])
            .map_err(|_| Error::Parameter("axis count exceeds u32".into()))?;
        buf.extend_from_slice(&count.to_le_bytes());
        buf.extend_from_slice(&grid.spacing()[axis].to_le_bytes());
        buf.extend_from_slice(&grid.origin()[axis].to_le_bytes());
    }
    for v in field.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    dest.write_all(&buf)?;
    dest.flush()?;
    Ok(buf.len())
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot<R: Read>(mut source: R) -> Result<Field> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    parse_snapshot(&bytes)
}

fn parse_snapshot(bytes: &[u8]) -> Result<Field> {
    let need = |expected: usize| -> Result<()> {
        if bytes.len() < expected {
            Err(Error::Truncated {
                expected,
                actual: bytes.len(),
            })
        } else {
            Ok(())
        }
    };
    need(7)?;
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != SNAPSHOT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = bytes[6] as usize;
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Malformed(format!("dimension {dim}")));
    }
    let header = snapshot_header_len(dim);
    need(header)?;
    let f64_at = |pos: usize| f64::from_le_bytes(bytes[pos..pos + 8].try_into().unwrap());
    let mut counts = Vec::with_capacity(dim);
    let mut spacing = Vec::with_capacity(dim);
    let mut origin = Vec::with_capacity(dim);
    for axis in 0..dim {
        let pos = 7 + axis * 20;
        counts.push(u32::from_le_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize);
        spacing.push(f64_at(pos + 4));
        origin.push(f64_at(pos + 12));
    }
    let grid = GridSpec::new(counts, spacing, origin)
        .map_err(|e| Error::Malformed(format!("header: {e}")))?;
    let expected = header + 8 * grid.len();
    if bytes.len() != expected {
        if bytes.len() < expected {
            return Err(Error::Truncated {
                expected,
                actual: bytes.len(),
            });
        }
        return Err(Error::Malformed(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let values = (0..grid.len()).map(|k| f64_at(header + 8 * k)).collect();
    Field::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_are_origin_plus_index_times_spacing() {
        let g = GridSpec::new(vec![5, 7], vec![1.0, 0.75], vec![-2.0, -2.25]).unwrap();
        assert_eq!(g.coordinate(0, 3), -2.0 + 3.0 * 1.0);
        assert_eq!(g.coordinate(1, 6), -2.25 + 6.0 * 0.75);
        let p = g.point(g.ravel(&[4, 2]));
        assert_eq!(p[0], 2.0);
        assert_eq!(p[1], -0.75);
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(GridSpec::new(vec![2], vec![4.0], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![5], vec![0.0], vec![0.0]).is_err());
        // half-width 5 * 0.5 / 2 = 1.25 < 2
        assert!(GridSpec::new(vec![5], vec![0.5], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![5, 5], vec![1.0], vec![0.0]).is_err());
        assert!(GridSpec::new(vec![5; 4], vec![1.0; 4], vec![0.0; 4]).is_err());
    }

    #[test]
    fn quadrature_of_constant_is_box_length() {
        let g = GridSpec::symmetric(1, 101, 5.0).unwrap();
        let u = Field::constant(g, 1.0).unwrap();
        assert!((quadrature(&u, None).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_of_zero_is_exactly_zero() {
        let g = GridSpec::symmetric(2, 33, 3.0).unwrap();
        assert_eq!(quadrature(&Field::zeros(g), None).unwrap(), 0.0);
    }

    #[test]
    fn quadrature_of_square_on_unit_interval() {
        // boxes narrower than [-2, 2] are rejected, so [-1, 1] is carved out
        // of a wider grid at the same spacing h = 2/2048 with trapezoid end
        // weights; the error is h^2/6
        let g = GridSpec::new(vec![4097], vec![2.0 / 2048.0], vec![-2.0]).unwrap();
        let w: Vec<f64> = (0..4097)
            .map(|k| match k {
                1024 | 3072 => 0.5,
                k if (1024..3072).contains(&k) => 1.0,
                _ => 0.0,
            })
            .collect();
        let u = Field::from_fn(g, |x| x[0] * x[0]).unwrap();
        assert!((quadrature(&u, Some(&w)).unwrap() - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn quadrature_rejects_length_mismatch_and_nan() {
        let g = GridSpec::symmetric(1, 11, 5.0).unwrap();
        let u = Field::constant(g, 1.0).unwrap();
        assert!(matches!(
            quadrature(&u, Some(&[1.0; 3])),
            Err(Error::Shape(_))
        ));
        let mut w = vec![1.0; 11];
        w[3] = f64::NAN;
        assert!(matches!(quadrature(&u, Some(&w)), Err(Error::NonFinite(_))));
    }

    #[test]
    fn quadrature_converges_at_second_order() {
        let f = |x: &[f64]| (1.3 * x[0]).cos() * (x[0] / 3.0).exp();
        let exact = {
            // ∫ e^{x/3} cos(1.3x) dx = e^{x/3}(cos(1.3x)/3 + 1.3 sin(1.3x)) / (1/9 + 1.69)
            let anti = |x: f64| {
                (x / 3.0).exp() * ((1.3 * x).cos() / 3.0 + 1.3 * (1.3 * x).sin())
                    / (1.0 / 9.0 + 1.69)
            };
            anti(2.5) - anti(-2.5)
        };
        let err = |n: usize| {
            let g = GridSpec::symmetric(1, n, 2.5).unwrap();
            (quadrature(&Field::from_fn(g, f).unwrap(), None).unwrap() - exact).abs()
        };
        let order = (err(101) / err(201)).log2();
        assert!((1.8..=2.2).contains(&order), "order {order}");
    }

    #[test]
    fn interior_mask_1d() {
        let g = GridSpec::symmetric(1, 41, 5.0).unwrap();
        let mask = interior_mask(&g, 1.0).unwrap();
        for (k, &m) in mask.iter().enumerate() {
            let x = g.coordinate(0, k);
            assert_eq!(m, (-4.0..=4.0).contains(&x), "x = {x}");
        }
        assert!(interior_mask(&g, 0.0).unwrap().iter().all(|&m| m));
        assert!(matches!(
            interior_mask(&g, 5.5),
            Err(Error::EmptyInterior { .. })
        ));
    }

    #[test]
    fn interior_mask_2d_matches_enumeration() {
        let g = GridSpec::symmetric(2, 25, 3.0).unwrap();
        let mask = interior_mask(&g, 1.0).unwrap();
        let mut expected = 0;
        for i in 0..25 {
            for j in 0..25 {
                let (x, y) = (g.coordinate(0, i), g.coordinate(1, j));
                if x.abs() <= 2.0 + 1e-12 && y.abs() <= 2.0 + 1e-12 {
                    expected += 1;
                    assert!(mask[g.ravel(&[i, j])]);
                }
            }
        }
        assert_eq!(expected, 17 * 17);
        assert_eq!(mask.iter().filter(|&&m| m).count(), expected);
    }

    #[test]
    fn snapshot_layout_1d() {
        let g = GridSpec::new(vec![3], vec![2.0], vec![-2.0]).unwrap();
        let u = Field::new(g, vec![1.0, -0.5, 3.25]).unwrap();
        let mut buf = Vec::new();
        let n = write_snapshot(&u, &mut buf).unwrap();
        assert_eq!(n, buf.len());
        assert_eq!(n, 27 + 24);
        assert_eq!(&buf[0..4], b"NFLD");
        assert_eq!(&buf[4..6], &[1, 0]);
        assert_eq!(buf[6], 1);
        assert_eq!(&buf[7..11], &3u32.to_le_bytes());
        assert_eq!(&buf[11..19], &2.0f64.to_le_bytes());
        assert_eq!(&buf[19..27], &(-2.0f64).to_le_bytes());
        assert_eq!(&buf[27..35], &1.0f64.to_le_bytes());
        assert_eq!(&buf[43..51], &3.25f64.to_le_bytes());
    }

    #[test]
    fn snapshot_64x64_size() {
        let g = GridSpec::symmetric(2, 64, 4.0).unwrap();
        let u = Field::zeros(g);
        let mut buf = Vec::new();
        assert_eq!(write_snapshot(&u, &mut buf).unwrap(), 47 + 4096 * 8);
    }

    #[test]
    fn snapshot_rejects_corruption() {
        let g = GridSpec::symmetric(2, 9, 3.0).unwrap();
        let u = Field::from_fn(g, |x| x[0] - x[1]).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&u, &mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_snapshot(&bad[..]),
            Err(Error::BadMagic { .. })
        ));

        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(
            read_snapshot(&bad[..]),
            Err(Error::UnsupportedVersion(2))
        ));

        let short = &buf[..buf.len() - 8];
        match read_snapshot(short) {
            Err(Error::Truncated { expected, actual }) => {
                assert_eq!(expected, buf.len());
                assert_eq!(actual, buf.len() - 8);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn shifted_moves_values() {
        let g = GridSpec::symmetric(1, 9, 4.0).unwrap();
        let u = Field::from_fn(g, |x| x[0]).unwrap();
        let s = u.shifted(0, 1).unwrap();
        assert_eq!(s.values()[0], 0.0);
        assert_eq!(s.values()[3], u.values()[2]);
    }
}
