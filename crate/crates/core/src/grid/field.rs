use crate::error::{Error, Result};

/// Uniform rectangular grid on `(0, lx) x (0, ly)` with MAC staggering.
///
/// Cell `(i, j)` has its center at `((i + 1/2) hx, (j + 1/2) hy)`. Vertical
/// faces carry x-components at `(i hx, (j + 1/2) hy)` for `i in 0..=nx`,
/// horizontal faces carry y-components at `((i + 1/2) hx, j hy)` for
/// `j in 0..=ny`. All arrays are stored with the x index running fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub hx: f64,
    pub hy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 cells per axis, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "extents must be positive and finite, got {lx}x{ly}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn is_unit_square(&self) -> bool {
        (self.lx - 1.0).abs() < 1e-14 && (self.ly - 1.0).abs() < 1e-14
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn n_xfaces(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    #[inline]
    pub fn n_yfaces(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    /// Total number of face unknowns in the flattened `[xs, ys]` layout.
    #[inline]
    pub fn n_faces(&self) -> usize {
        self.n_xfaces() + self.n_yfaces()
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    /// Index into `FaceField::xs`.
    #[inline]
    pub fn xface(&self, i: usize, j: usize) -> usize {
        i + (self.nx + 1) * j
    }

    /// Index into `FaceField::ys`.
    #[inline]
    pub fn yface(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }

    /// Flat index of a vertical face in the `[xs, ys]` layout.
    #[inline]
    pub fn flat_xface(&self, i: usize, j: usize) -> usize {
        self.xface(i, j)
    }

    /// Flat index of a horizontal face in the `[xs, ys]` layout.
    #[inline]
    pub fn flat_yface(&self, i: usize, j: usize) -> usize {
        self.n_xfaces() + self.yface(i, j)
    }

    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    #[inline]
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    #[inline]
    pub fn xface_center(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, (j as f64 + 0.5) * self.hy)
    }

    #[inline]
    pub fn yface_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, j as f64 * self.hy)
    }

    #[inline]
    pub fn is_boundary_xface(&self, i: usize) -> bool {
        i == 0 || i == self.nx
    }

    #[inline]
    pub fn is_boundary_yface(&self, j: usize) -> bool {
        j == 0 || j == self.ny
    }

    /// Whether a flat face index lies on the domain boundary.
    pub fn is_boundary_flat(&self, k: usize) -> bool {
        let nxf = self.n_xfaces();
        if k < nxf {
            self.is_boundary_xface(k % (self.nx + 1))
        } else {
            self.is_boundary_yface((k - nxf) / self.nx)
        }
    }
}

/// Scalar unknowns at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &GridSpec, c: f64) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            values: vec![c; grid.n_cells()],
        }
    }

    /// Samples `f(x, y)` at cell centers.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.cell_center(i, j);
                values.push(f(x, y));
            }
        }
        Self {
            nx: grid.nx,
            ny: grid.ny,
            values,
        }
    }

    pub fn from_vec(grid: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_cells(),
                got: values.len(),
            });
        }
        Ok(Self {
            nx: grid.nx,
            ny: grid.ny,
            values,
        })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i + self.nx * j]
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.nx != grid.nx || self.ny != grid.ny || self.values.len() != grid.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "cell field {}x{} on grid {}x{}",
                self.nx, self.ny, grid.nx, grid.ny
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.values.len() as f64
    }

    /// Integral over the domain by the midpoint rule.
    pub fn integral(&self, grid: &GridSpec) -> f64 {
        self.sum() * grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn remove_mean(&mut self) {
        let m = self.mean();
        self.values.iter_mut().for_each(|v| *v -= m);
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(f64) -> Result<f64>) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nx: self.nx,
            ny: self.ny,
            values,
        })
    }

    pub fn axpy(&mut self, a: f64, other: &CellField) {
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += a * o;
        }
    }
}

/// Face-normal vector components on the staggered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    pub nx: usize,
    pub ny: usize,
    /// x-components on vertical faces, `(nx + 1) * ny` entries.
    pub xs: Vec<f64>,
    /// y-components on horizontal faces, `nx * (ny + 1)` entries.
    pub ys: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: &GridSpec) -> Self {
        Self {
            nx: grid.nx,
            ny: grid.ny,
            xs: vec![0.0; grid.n_xfaces()],
            ys: vec![0.0; grid.n_yfaces()],
        }
    }

    /// Samples a vector field at face centers, keeping only the normal
    /// component of each face. Boundary faces are sampled as well.
    pub fn from_fn(grid: &GridSpec, mut f: impl FnMut(f64, f64) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                let (x, y) = grid.xface_center(i, j);
                out.xs[grid.xface(i, j)] = f(x, y).0;
            }
        }
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.yface_center(i, j);
                out.ys[grid.yface(i, j)] = f(x, y).1;
            }
        }
        out
    }

    pub fn from_flat(grid: &GridSpec, flat: &[f64]) -> Result<Self> {
        if flat.len() != grid.n_faces() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_faces(),
                got: flat.len(),
            });
        }
        let (xs, ys) = flat.split_at(grid.n_xfaces());
        Ok(Self {
            nx: grid.nx,
            ny: grid.ny,
            xs: xs.to_vec(),
            ys: ys.to_vec(),
        })
    }

    /// Concatenated `[xs, ys]` layout used by the assembled operators.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.xs.len() + self.ys.len());
        v.extend_from_slice(&self.xs);
        v.extend_from_slice(&self.ys);
        v
    }

    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.nx != grid.nx
            || self.ny != grid.ny
            || self.xs.len() != grid.n_xfaces()
            || self.ys.len() != grid.n_yfaces()
        {
            return Err(Error::ShapeMismatch(format!(
                "face field {}x{} on grid {}x{}",
                self.nx, self.ny, grid.nx, grid.ny
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.xs.iter().chain(&self.ys).all(|v| v.is_finite())
    }

    /// Largest absolute value on boundary-normal faces.
    pub fn boundary_max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.ny {
            m = m.max(self.xs[(self.nx + 1) * j].abs());
            m = m.max(self.xs[self.nx + (self.nx + 1) * j].abs());
        }
        for i in 0..self.nx {
            m = m.max(self.ys[i].abs());
            m = m.max(self.ys[i + self.nx * self.ny].abs());
        }
        m
    }

    /// Zeroes every boundary-normal entry.
    pub fn zero_boundary(&mut self) {
        for j in 0..self.ny {
            self.xs[(self.nx + 1) * j] = 0.0;
            self.xs[self.nx + (self.nx + 1) * j] = 0.0;
        }
        for i in 0..self.nx {
            self.ys[i] = 0.0;
            self.ys[i + self.nx * self.ny] = 0.0;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.xs.iter().chain(&self.ys).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, a: f64) {
        self.xs.iter_mut().chain(self.ys.iter_mut()).for_each(|v| *v *= a);
    }

    pub fn axpy(&mut self, a: f64, other: &FaceField) {
        for (v, o) in self.xs.iter_mut().zip(&other.xs) {
            *v += a * o;
        }
        for (v, o) in self.ys.iter_mut().zip(&other.ys) {
            *v += a * o;
        }
    }

    /// Face-wise product with another face field.
    pub fn hadamard(&self, other: &FaceField) -> FaceField {
        FaceField {
            nx: self.nx,
            ny: self.ny,
            xs: self.xs.iter().zip(&other.xs).map(|(a, b)| a * b).collect(),
            ys: self.ys.iter().zip(&other.ys).map(|(a, b)| a * b).collect(),
        }
    }
}

/// `<f, g>` with midpoint weights `hx hy`.
pub fn cell_inner(grid: &GridSpec, f: &CellField, g: &CellField) -> f64 {
    f.values.iter().zip(&g.values).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume()
}

/// `<u, v>` with weight `hx hy` on every face. Boundary-normal entries of
/// admissible fields vanish, so only interior faces contribute.
pub fn face_inner(grid: &GridSpec, u: &FaceField, v: &FaceField) -> f64 {
    let sx: f64 = u.xs.iter().zip(&v.xs).map(|(a, b)| a * b).sum();
    let sy: f64 = u.ys.iter().zip(&v.ys).map(|(a, b)| a * b).sum();
    (sx + sy) * grid.cell_volume()
}
