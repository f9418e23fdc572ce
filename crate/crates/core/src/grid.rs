//! Uniform periodic grids, real and spectral field representations, and
//! spectral calculus on the flat torus.
//!
//! Fourier coefficients are normalized so that a constant field `c` has a
//! single coefficient `c` at `k = 0`:
//!
//! ```text
//! F(k) = (1/N) * sum_x f(x) exp(-2 pi i k.x / L)
//! ```
//!
//! With this convention the mean of `|f|^2` over the grid equals the sum of
//! `|F(k)|^2` (Parseval), and every norm in this crate is taken with respect
//! to the normalized measure of the torus (quadrature weights `1/N`).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{self, Direction};

/// Uniform periodic grid on the 2- or 3-torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: Vec<usize>,
    period: Vec<f64>,
}

impl Grid {
    pub fn new(n: &[usize], period: &[f64]) -> Result<Self> {
        if n.len() != 2 && n.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 2 or 3, got {}",
                n.len()
            )));
        }
        if period.len() != n.len() {
            return Err(Error::InvalidGrid(format!(
                "{} axes but {} periods",
                n.len(),
                period.len()
            )));
        }
        for &ni in n {
            if ni < 8 || !ni.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "axis size {ni} must be a power of two >= 8"
                )));
            }
        }
        for &p in period {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidGrid(format!("period {p} must be positive")));
            }
        }
        Ok(Self {
            n: n.to_vec(),
            period: period.to_vec(),
        })
    }

    /// Grid with unit period on every axis.
    pub fn unit(n: &[usize]) -> Result<Self> {
        Self::new(n, &vec![1.0; n.len()])
    }

    /// `dim`-dimensional grid with `n` points per axis and unit period.
    pub fn cube(dim: usize, n: usize) -> Result<Self> {
        Self::unit(&vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn period(&self) -> &[f64] {
        &self.period
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, axis: usize) -> f64 {
        self.period[axis] / self.n[axis] as f64
    }

    /// Smallest grid spacing over all axes.
    pub fn min_cell(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.cell(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_n(&self) -> usize {
        *self.n.iter().min().expect("grid has axes")
    }

    /// Same periods, every axis size multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let n: Vec<usize> = self.n.iter().map(|&v| v * factor).collect();
        Self::new(&n, &self.period)
    }

    /// Shape padded to three axes with trailing ones.
    pub(crate) fn shape3(&self) -> [usize; 3] {
        let mut s = [1usize; 3];
        s[..self.dim()].copy_from_slice(&self.n);
        s
    }

    /// Integer wavenumber stored at index `i` along `axis`. The Nyquist
    /// index `n/2` maps to `-n/2`.
    pub fn wavenumber(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis];
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub(crate) fn is_nyquist(&self, axis: usize, k: i64) -> bool {
        k == -(self.n[axis] as i64) / 2
    }

    /// Physical frequency (cycles per unit length) of mode `k`.
    pub fn frequency(&self, k: &[i64; 3]) -> [f64; 3] {
        let mut xi = [0.0; 3];
        for a in 0..self.dim() {
            xi[a] = k[a] as f64 / self.period[a];
        }
        xi
    }

    /// Calls `f(flat_index, k)` for every mode in storage order.
    pub fn for_each_mode<F: FnMut(usize, [i64; 3])>(&self, mut f: F) {
        let s = self.shape3();
        let mut flat = 0;
        for i0 in 0..s[0] {
            let k0 = self.wavenumber(0, i0);
            for i1 in 0..s[1] {
                let k1 = self.wavenumber(1, i1);
                for i2 in 0..s[2] {
                    let k2 = if self.dim() == 3 {
                        self.wavenumber(2, i2)
                    } else {
                        0
                    };
                    f(flat, [k0, k1, k2]);
                    flat += 1;
                }
            }
        }
    }

    /// Calls `f(flat_index, x)` for every grid point in storage order.
    pub fn for_each_point<F: FnMut(usize, [f64; 3])>(&self, mut f: F) {
        let s = self.shape3();
        let h = [
            self.cell(0),
            self.cell(1),
            if self.dim() == 3 { self.cell(2) } else { 0.0 },
        ];
        let mut flat = 0;
        for i0 in 0..s[0] {
            for i1 in 0..s[1] {
                for i2 in 0..s[2] {
                    f(flat, [i0 as f64 * h[0], i1 as f64 * h[1], i2 as f64 * h[2]]);
                    flat += 1;
                }
            }
        }
    }

    /// Flat index of the point displaced by `shift` cells (periodic).
    pub(crate) fn shifted_index(&self, flat: usize, shift: &[i64; 3]) -> usize {
        let s = self.shape3();
        let i2 = flat % s[2];
        let i1 = (flat / s[2]) % s[1];
        let i0 = flat / (s[1] * s[2]);
        let w = |i: usize, d: i64, n: usize| ((i as i64 + d).rem_euclid(n as i64)) as usize;
        (w(i0, shift[0], s[0]) * s[1] + w(i1, shift[1], s[1])) * s[2] + w(i2, shift[2], s[2])
    }

    /// Returns whether mode `k` survives a box dealiasing mask keeping
    /// `|k_a| < fraction * n_a / 2` on every axis.
    pub(crate) fn within_cutoff(&self, k: &[i64; 3], fraction: f64) -> bool {
        (0..self.dim()).all(|a| (k[a].unsigned_abs() as f64) < fraction * self.n[a] as f64 / 2.0)
    }
}

/// Real samples of an `m`-component field, component-major then row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    components: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, components: usize, data: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::ShapeMismatch(
                "field needs at least one component".into(),
            ));
        }
        if data.len() != components * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} samples, got {}",
                components * grid.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            components,
            data,
        })
    }

    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self {
            data: vec![0.0; components * grid.len()],
            grid: grid.clone(),
            components,
        }
    }

    /// Samples `f(x, component)` at every grid point.
    pub fn from_fn<F: Fn(&[f64; 3], usize) -> f64>(
        grid: &Grid,
        components: usize,
        f: F,
    ) -> Result<Self> {
        let n = grid.len();
        let mut data = vec![0.0; components * n];
        grid.for_each_point(|i, x| {
            for c in 0..components {
                data[c * n + i] = f(&x, c);
            }
        });
        Self::new(grid.clone(), components, data)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn mean(&self, c: usize) -> f64 {
        let comp = self.component(c);
        comp.iter().sum::<f64>() / comp.len() as f64
    }

    /// Pointwise Euclidean norm over components.
    pub fn magnitudes(&self) -> Vec<f64> {
        let n = self.grid.len();
        (0..n)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.data[c * n + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Field, f: F) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            components: self.components,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub(crate) fn check_same_shape(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch(format!(
                "fields differ: {:?}x{} vs {:?}x{}",
                self.grid.n, self.components, other.grid.n, other.components
            )));
        }
        Ok(())
    }

    /// Forward transform of every component.
    pub fn transform(&self) -> SpectralField {
        let n = self.grid.len();
        let shape = self.grid.n.clone();
        let inv = 1.0 / n as f64;
        let mut coeffs: Vec<Complex64> =
            self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        for chunk in coeffs.chunks_mut(n) {
            fft::transform(chunk, &shape, Direction::Forward);
            for c in chunk.iter_mut() {
                *c *= inv;
            }
        }
        SpectralField {
            grid: self.grid.clone(),
            components: self.components,
            coeffs,
        }
    }
}

/// Fourier coefficients of a field, stored in the same layout as [`Field`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid,
            components,
            coeffs,
        })
    }

    pub fn zeros(grid: &Grid, components: usize) -> Self {
        Self {
            coeffs: vec![Complex64::default(); components * grid.len()],
            grid: grid.clone(),
            components,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    /// Coefficient of integer mode `k` in component `c`.
    pub fn coeff(&self, c: usize, k: &[i64]) -> Complex64 {
        let s = self.grid.shape3();
        let mut idx = [0usize; 3];
        for a in 0..self.grid.dim() {
            idx[a] = k[a].rem_euclid(s[a] as i64) as usize;
        }
        let flat = (idx[0] * s[1] + idx[1]) * s[2] + idx[2];
        self.coeffs[c * self.grid.len() + flat]
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self) -> Field {
        let n = self.grid.len();
        let shape = self.grid.n.clone();
        let mut data = Vec::with_capacity(self.coeffs.len());
        let mut buf = vec![Complex64::default(); n];
        for chunk in self.coeffs.chunks(n) {
            buf.copy_from_slice(chunk);
            fft::transform(&mut buf, &shape, Direction::Inverse);
            data.extend(buf.iter().map(|c| c.re));
        }
        Field {
            grid: self.grid.clone(),
            components: self.components,
            data,
        }
    }

    /// Sum of squared coefficient magnitudes over all components; equals the
    /// mean square of the real field.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Spectral inner product `sum conj(self) * other`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            components: self.components,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            components: self.components,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            components: self.components,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            grid: self.grid.clone(),
            components: self.components,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * s)
                .collect(),
        })
    }

    pub(crate) fn check_same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::ShapeMismatch(format!(
                "spectral fields differ: {:?}x{} vs {:?}x{}",
                self.grid.n, self.components, other.grid.n, other.components
            )));
        }
        Ok(())
    }

    /// Multiplies every component by a real symbol `m(k)`.
    pub fn apply_symbol<F: Fn(&[i64; 3]) -> f64>(&self, m: F) -> Self {
        let n = self.grid.len();
        let mut out = self.clone();
        self.grid.for_each_mode(|i, k| {
            let s = m(&k);
            for c in 0..self.components {
                out.coeffs[c * n + i] *= s;
            }
        });
        out
    }

    /// Keeps only modes with `|k_a| < fraction * n_a / 2` on every axis.
    pub fn dealiased(&self, fraction: f64) -> Self {
        let g = self.grid.clone();
        self.apply_symbol(|k| {
            if g.within_cutoff(k, fraction) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Fraction of the spectral energy lying outside the dealiasing box.
    pub fn energy_fraction_above(&self, fraction: f64) -> f64 {
        let total = self.norm_sq();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.grid.len();
        let mut above = 0.0;
        self.grid.for_each_mode(|i, k| {
            if !self.grid.within_cutoff(&k, fraction) {
                for c in 0..self.components {
                    above += self.coeffs[c * n + i].norm_sqr();
                }
            }
        });
        above / total
    }

    /// Angular wavenumber `2 pi k_a / L_a` used by even-order derivatives.
    fn kappa(&self, axis: usize, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.grid.period[axis]
    }

    /// Angular wavenumber used by odd-order derivatives: zero at Nyquist so
    /// that real fields stay real.
    fn kappa_odd(&self, axis: usize, k: i64) -> f64 {
        if self.grid.is_nyquist(axis, k) {
            0.0
        } else {
            self.kappa(axis, k)
        }
    }

    /// `order`-th partial derivative along `axis`.
    pub fn derivative(&self, axis: usize, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "derivative order must be >= 1".into(),
            ));
        }
        if axis >= self.grid.dim() {
            return Err(Error::InvalidParameter(format!("axis {axis} out of range")));
        }
        let n = self.grid.len();
        let mut out = self.clone();
        let odd = order % 2 == 1;
        // (i kappa)^order = i^order kappa^order
        let phase = match order % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        self.grid.for_each_mode(|i, k| {
            let kap = if odd {
                self.kappa_odd(axis, k[axis])
            } else {
                self.kappa(axis, k[axis])
            };
            let m = phase * kap.powi(order as i32);
            for c in 0..self.components {
                out.coeffs[c * n + i] *= m;
            }
        });
        Ok(out)
    }

    /// Laplacian of every component.
    pub fn laplacian(&self) -> Self {
        self.apply_symbol(|k| -self.kappa_sq(k))
    }

    pub(crate) fn kappa_sq(&self, k: &[i64; 3]) -> f64 {
        (0..self.grid.dim())
            .map(|a| self.kappa(a, k[a]).powi(2))
            .sum()
    }

    /// Solves `-Laplacian(x) = self` with zero mean.
    pub fn inverse_neg_laplacian(&self) -> Self {
        self.apply_symbol(|k| {
            let q = self.kappa_sq(k);
            if q == 0.0 {
                0.0
            } else {
                1.0 / q
            }
        })
    }

    /// Gradient of every component; output component `c * dim + a` holds
    /// the derivative of component `c` along axis `a`.
    pub fn gradient(&self) -> Self {
        let d = self.grid.dim();
        let n = self.grid.len();
        let mut coeffs = vec![Complex64::default(); self.components * d * n];
        self.grid.for_each_mode(|i, k| {
            for a in 0..d {
                let m = Complex64::new(0.0, self.kappa_odd(a, k[a]));
                for c in 0..self.components {
                    coeffs[(c * d + a) * n + i] = self.coeffs[c * n + i] * m;
                }
            }
        });
        Self {
            grid: self.grid.clone(),
            components: self.components * d,
            coeffs,
        }
    }

    /// Divergence of a `dim`-component field.
    pub fn divergence(&self) -> Result<Self> {
        let d = self.grid.dim();
        if self.components != d {
            return Err(Error::ShapeMismatch(format!(
                "divergence needs {d} components, got {}",
                self.components
            )));
        }
        let n = self.grid.len();
        let mut coeffs = vec![Complex64::default(); n];
        self.grid.for_each_mode(|i, k| {
            let mut acc = Complex64::default();
            for a in 0..d {
                acc += self.coeffs[a * n + i] * Complex64::new(0.0, self.kappa_odd(a, k[a]));
            }
            coeffs[i] = acc;
        });
        Ok(Self {
            grid: self.grid.clone(),
            components: 1,
            coeffs,
        })
    }

    /// Orthogonal projection onto divergence-free fields.
    pub fn leray_project(&self) -> Result<Self> {
        let d = self.grid.dim();
        if self.components != d {
            return Err(Error::ShapeMismatch(format!(
                "Leray projection needs {d} components, got {}",
                self.components
            )));
        }
        let n = self.grid.len();
        let mut out = self.clone();
        self.grid.for_each_mode(|i, k| {
            let mut kv = [0.0; 3];
            for a in 0..d {
                kv[a] = self.kappa_odd(a, k[a]);
            }
            let q: f64 = kv.iter().map(|v| v * v).sum();
            if q == 0.0 {
                return;
            }
            let mut dot = Complex64::default();
            for a in 0..d {
                dot += self.coeffs[a * n + i] * kv[a];
            }
            for a in 0..d {
                out.coeffs[a * n + i] -= dot * (kv[a] / q);
            }
        });
        Ok(out)
    }

    /// Keeps modes whose physical frequency magnitude lies in `[lo, hi)`.
    pub fn band(&self, lo: f64, hi: f64) -> Self {
        self.apply_symbol(|k| {
            let xi = self.grid.frequency(k);
            let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            if r >= lo && r < hi {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Re-samples onto a grid whose axes are `factor` times finer, keeping
    /// the same trigonometric polynomial (Nyquist modes dropped).
    pub fn zero_padded(&self, factor: usize) -> Result<Self> {
        let fine = self.grid.refined(factor)?;
        let nf = fine.len();
        let s = fine.shape3();
        let n = self.grid.len();
        let mut coeffs = vec![Complex64::default(); self.components * nf];
        self.grid.for_each_mode(|i, k| {
            if (0..self.grid.dim()).any(|a| self.grid.is_nyquist(a, k[a])) {
                return;
            }
            let mut idx = [0usize; 3];
            for a in 0..self.grid.dim() {
                idx[a] = k[a].rem_euclid(s[a] as i64) as usize;
            }
            let flat = (idx[0] * s[1] + idx[1]) * s[2] + idx[2];
            for c in 0..self.components {
                coeffs[c * nf + flat] = self.coeffs[c * n + i];
            }
        });
        Ok(Self {
            grid: fine,
            components: self.components,
            coeffs,
        })
    }

    /// Inverse of [`zero_padded`](Self::zero_padded): keeps the modes
    /// representable on `coarse` without their Nyquist entries.
    pub fn truncated_to(&self, coarse: &Grid) -> Result<Self> {
        if coarse.dim() != self.grid.dim() || coarse.period() != self.grid.period() {
            return Err(Error::ShapeMismatch("incompatible truncation grid".into()));
        }
        let nc = coarse.len();
        let nf = self.grid.len();
        let s = self.grid.shape3();
        let mut coeffs = vec![Complex64::default(); self.components * nc];
        coarse.for_each_mode(|i, k| {
            if (0..coarse.dim()).any(|a| coarse.is_nyquist(a, k[a])) {
                return;
            }
            let mut idx = [0usize; 3];
            for a in 0..coarse.dim() {
                idx[a] = k[a].rem_euclid(s[a] as i64) as usize;
            }
            let flat = (idx[0] * s[1] + idx[1]) * s[2] + idx[2];
            for c in 0..self.components {
                coeffs[c * nc + i] = self.coeffs[c * nf + flat];
            }
        });
        Ok(Self {
            grid: coarse.clone(),
            components: self.components,
            coeffs,
        })
    }

    /// Selects a subset of components.
    pub fn select(&self, comps: &[usize]) -> Self {
        let n = self.grid.len();
        let mut coeffs = Vec::with_capacity(comps.len() * n);
        for &c in comps {
            coeffs.extend_from_slice(self.component(c));
        }
        Self {
            grid: self.grid.clone(),
            components: comps.len(),
            coeffs,
        }
    }

    /// Concatenates the components of several fields on the same grid.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("nothing to stack".into()))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            if p.grid != first.grid {
                return Err(Error::ShapeMismatch(
                    "stacking fields on different grids".into(),
                ));
            }
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(Self {
            grid: first.grid.clone(),
            components,
            coeffs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, m: usize, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..m * grid.len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        Field::new(grid.clone(), m, data).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::unit(&[16]).is_err());
        assert!(Grid::unit(&[16, 12]).is_err());
        assert!(Grid::unit(&[4, 4]).is_err());
        assert!(Grid::new(&[16, 16], &[1.0, -1.0]).is_err());
        assert!(Grid::unit(&[8, 16, 32]).is_ok());
    }

    #[test]
    fn rejects_non_finite() {
        let g = Grid::cube(2, 8).unwrap();
        let mut d = vec![0.0; 64];
        d[3] = f64::NAN;
        assert!(matches!(Field::new(g, 1, d), Err(Error::NonFinite)));
    }

    #[test]
    fn constant_has_single_mean_coefficient() {
        let g = Grid::cube(2, 16).unwrap();
        let f = Field::from_fn(&g, 1, |_, _| 2.5).unwrap();
        let s = f.transform();
        for (i, c) in s.coeffs().iter().enumerate() {
            if i == 0 {
                assert!((c - Complex64::new(2.5, 0.0)).norm() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pure_sine_has_two_modes() {
        for g in [
            Grid::cube(2, 16).unwrap(),
            Grid::unit(&[8, 16, 32]).unwrap(),
        ] {
            let f = Field::from_fn(&g, 1, |x, _| (2.0 * PI * x[0]).sin()).unwrap();
            let s = f.transform();
            let mut nonzero = 0;
            for c in s.coeffs() {
                if c.norm() > 1e-12 {
                    nonzero += 1;
                }
            }
            assert_eq!(nonzero, 2);
            let mut k = [0i64; 3];
            k[0] = 1;
            assert!((s.coeff(0, &k) - Complex64::new(0.0, -0.5)).norm() < 1e-14);
            k[0] = -1;
            assert!((s.coeff(0, &k) - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::unit(&[32, 16, 8]).unwrap();
        let f = random_field(&g, 3, 7);
        let s = f.transform();
        let back = s.inverse();
        let scale = f.max_abs();
        assert!(max_diff(&f, &back) / scale < 1e-12);
        let mean_sq = f.data().iter().map(|v| v * v).sum::<f64>() / g.len() as f64;
        assert!((mean_sq - s.norm_sq()).abs() / mean_sq < 1e-12);
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::cube(2, 32).unwrap();
        let f = Field::from_fn(&g, 1, |x, _| (2.0 * PI * x[0]).sin()).unwrap();
        let df = f.transform().derivative(0, 1).unwrap().inverse();
        let exact = Field::from_fn(&g, 1, |x, _| 2.0 * PI * (2.0 * PI * x[0]).cos()).unwrap();
        assert!(max_diff(&df, &exact) < 1e-10);
        let c = Field::from_fn(&g, 1, |_, _| 3.0).unwrap();
        assert!(c.transform().derivative(1, 1).unwrap().inverse().max_abs() < 1e-14);
        assert!(f.transform().derivative(0, 0).is_err());
    }

    #[test]
    fn laplacian_eigenvalue() {
        let g = Grid::cube(3, 16).unwrap();
        let k = [2.0, -1.0, 3.0];
        let f = Field::from_fn(&g, 1, |x, _| {
            (2.0 * PI * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2])).cos()
        })
        .unwrap();
        let lap = f.transform().laplacian().inverse();
        let lambda = -(2.0 * PI).powi(2) * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
        let expected = f.scaled(lambda);
        assert!(max_diff(&lap, &expected) / lambda.abs() < 1e-12);
    }

    #[test]
    fn leray_annihilates_gradients_and_fixes_solenoidal() {
        let g = Grid::cube(2, 32).unwrap();
        let phi = random_field(&g, 1, 3).transform();
        let grad = phi.gradient();
        let pg = grad.leray_project().unwrap();
        assert!(pg.norm_sq().sqrt() < 1e-12 * grad.norm_sq().sqrt().max(1.0));

        let v = random_field(&g, 2, 4).transform();
        let pv = v.leray_project().unwrap();
        let ppv = pv.leray_project().unwrap();
        assert!(ppv.sub(&pv).unwrap().norm_sq().sqrt() < 1e-12);
        assert!(pv.divergence().unwrap().norm_sq().sqrt() < 1e-12);
        assert!(phi.leray_project().is_err());
        assert!(phi.divergence().is_err());
    }

    #[test]
    fn leray_is_self_adjoint() {
        let g = Grid::cube(3, 8).unwrap();
        let a = random_field(&g, 3, 10).transform();
        let b = random_field(&g, 3, 11).transform();
        let lhs = a.leray_project().unwrap().inner(&b).unwrap();
        let rhs = a.inner(&b.leray_project().unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn derivative_commutes_with_leray_on_solenoidal() {
        let g = Grid::cube(2, 16).unwrap();
        let v = random_field(&g, 2, 5).transform().leray_project().unwrap();
        let a = v.derivative(1, 1).unwrap().leray_project().unwrap();
        let b = v.leray_project().unwrap().derivative(1, 1).unwrap();
        assert!(a.sub(&b).unwrap().norm_sq().sqrt() < 1e-12);
    }

    #[test]
    fn padding_preserves_polynomial() {
        let g = Grid::cube(2, 16).unwrap();
        let f = random_field(&g, 1, 9).transform().dealiased(0.9);
        let p = f.zero_padded(2).unwrap();
        let back = p.truncated_to(&g).unwrap();
        assert!(back.sub(&f).unwrap().norm_sq().sqrt() < 1e-14);
        // padded samples on even points coincide with the original samples
        let coarse = f.inverse();
        let fine = p.inverse();
        let n = 16;
        for i in 0..n {
            for j in 0..n {
                let a = coarse.data()[i * n + j];
                let b = fine.data()[(2 * i) * 2 * n + 2 * j];
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_index_wraps() {
        let g = Grid::cube(2, 8).unwrap();
        assert_eq!(g.shifted_index(0, &[-1, 0, 0]), 7 * 8);
        assert_eq!(g.shifted_index(7, &[0, 1, 0]), 0);
    }
}
