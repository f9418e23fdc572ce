//! Lebesgue, Sobolev and Besov norms on the torus, mollification and the
//! mollification scaling scans.
//!
//! All integrals use the normalized measure of the torus, so a constant
//! field `c` has `||c||_{L^r} = |c|` for every `r`. Vector fields are
//! measured through their pointwise Euclidean norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, SpectralField};
use crate::par;
use crate::product::{self, Dealias};
use crate::scan::NormScan;

/// `L^r` norm; `r = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &Field, r: f64) -> f64 {
    lp_norm_of_magnitudes(&f.magnitudes(), r)
}

pub(crate) fn lp_norm_of_magnitudes(m: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return m.iter().fold(0.0, |a, &v| a.max(v));
    }
    let scale = m.iter().fold(0.0, |a: f64, &v| a.max(v));
    if scale == 0.0 {
        return 0.0;
    }
    // scaled to avoid overflow for large r
    let s: f64 = m.iter().map(|v| (v / scale).powf(r)).sum::<f64>() / m.len() as f64;
    scale * s.powf(1.0 / r)
}

pub(crate) fn check_r(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "integrability r = {r} must be >= 1"
        )));
    }
    Ok(())
}

/// `||f||_{L^r} + ||grad f||_{L^r}`.
pub fn w1_norm(f: &Field, r: f64) -> f64 {
    lp_norm(f, r) + lp_norm(&f.transform().gradient().inverse(), r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Difference,
    LittlewoodPaley,
}

impl Estimator {
    pub fn id(self) -> &'static str {
        match self {
            Estimator::Difference => "difference",
            Estimator::LittlewoodPaley => "littlewood_paley",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub theta: f64,
    pub r: f64,
    pub s: f64,
    pub estimator: Estimator,
}

impl BesovParams {
    pub fn new(theta: f64, r: f64, estimator: Estimator) -> Self {
        Self {
            theta,
            r,
            s: f64::INFINITY,
            estimator,
        }
    }

    fn validate(&self) -> Result<()> {
        check_r(self.r)?;
        if !self.s.is_infinite() {
            return Err(Error::Unsupported(
                "only s = infinity is implemented".into(),
            ));
        }
        if !(self.theta > 0.0) {
            return Err(Error::Unsupported(format!(
                "Besov order {} must be positive",
                self.theta
            )));
        }
        Ok(())
    }
}

/// Shift directions in grid cells: the axes and the main diagonals, one
/// representative per `{h, -h}` pair.
fn shift_directions(dim: usize) -> Vec<[i64; 3]> {
    let mut dirs = Vec::new();
    for a in 0..dim {
        let mut e = [0; 3];
        e[a] = 1;
        dirs.push(e);
    }
    if dim == 2 {
        dirs.push([1, 1, 0]);
        dirs.push([1, -1, 0]);
    } else {
        for s1 in [1, -1] {
            for s2 in [1, -1] {
                dirs.push([1, s1, s2]);
            }
        }
    }
    dirs
}

/// Dyadic shifts `h = L 2^{-j} e` for `j = 1..=log2(min n)`, returned as
/// (cell offsets, physical length).
pub fn dyadic_shifts(grid: &Grid) -> Vec<([i64; 3], f64)> {
    let levels = grid.min_n().trailing_zeros();
    let mut out = Vec::new();
    for j in 1..=levels {
        for dir in shift_directions(grid.dim()) {
            let mut cells = [0i64; 3];
            let mut len2 = 0.0;
            for a in 0..grid.dim() {
                let step = (grid.n()[a] >> j) as i64;
                cells[a] = dir[a] * step;
                len2 += (dir[a] as f64 * grid.period()[a] / 2f64.powi(j as i32)).powi(2);
            }
            out.push((cells, len2.sqrt()));
        }
    }
    out
}

/// `|| sum_i c_i f(. + i h) ||_{L^r}` for the finite-difference stencil `c`.
fn difference_norm(f: &Field, cells: &[i64; 3], stencil: &[f64], r: f64) -> f64 {
    let g = f.grid();
    let n = g.len();
    let m = f.components();
    let offsets: Vec<Vec<usize>> = (0..stencil.len())
        .map(|i| {
            let sh = [
                cells[0] * i as i64,
                cells[1] * i as i64,
                cells[2] * i as i64,
            ];
            (0..n).map(|p| g.shifted_index(p, &sh)).collect()
        })
        .collect();
    let mags: Vec<f64> = (0..n)
        .map(|p| {
            let mut acc = 0.0;
            for c in 0..m {
                let comp = f.component(c);
                let v: f64 = stencil
                    .iter()
                    .zip(&offsets)
                    .map(|(w, off)| w * comp[off[p]])
                    .sum();
                acc += v * v;
            }
            acc.sqrt()
        })
        .collect();
    lp_norm_of_magnitudes(&mags, r)
}

/// Increment scan `h -> sup_dir ||Delta_h f||_{L^r}` over the dyadic shift
/// lengths, coarse to fine, together with the Besov order actually applied
/// to the increments.
fn difference_profile(f: &Field, theta: f64, r: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let (target, order_theta) = if theta < 1.0 {
        (f.clone(), theta)
    } else if theta == 1.0 {
        (f.clone(), 1.0)
    } else if theta < 2.0 {
        (f.transform().gradient().inverse(), theta - 1.0)
    } else {
        return Err(Error::Unsupported(format!(
            "difference estimator needs theta < 2, got {theta}"
        )));
    };
    let stencil: &[f64] = if theta == 1.0 {
        &[1.0, -2.0, 1.0]
    } else {
        &[-1.0, 1.0]
    };
    let shifts = dyadic_shifts(f.grid());
    let norms = par::map_slice(&shifts, |(cells, len)| {
        (*len, difference_norm(&target, cells, stencil, r))
    });
    let dirs = shift_directions(f.grid().dim()).len();
    let mut hs = Vec::new();
    let mut vals = Vec::new();
    for level in norms.chunks(dirs) {
        // the diagonal shifts are longer; report each level by its axis length
        let h = level[0].0;
        let sup = level
            .iter()
            .map(|(len, v)| v * (h / len).powf(order_theta))
            .fold(0.0, f64::max);
        hs.push(h);
        vals.push(sup);
    }
    Ok((hs, vals, order_theta))
}

/// Difference-quotient Besov seminorm, `sup_h ||Delta_h f||_{L^r} / |h|^theta`
/// over dyadic axis and diagonal shifts. Integer order 1 uses second
/// differences; orders in `(1, 2)` take first differences of the gradient.
pub fn besov_seminorm_diff(f: &Field, p: &BesovParams) -> Result<f64> {
    p.validate()?;
    let shifts = dyadic_shifts(f.grid());
    let (target, order_theta) = if p.theta <= 1.0 {
        (f.clone(), p.theta)
    } else if p.theta < 2.0 {
        (f.transform().gradient().inverse(), p.theta - 1.0)
    } else {
        return Err(Error::Unsupported(format!(
            "difference estimator needs theta < 2, got {}",
            p.theta
        )));
    };
    let stencil: &[f64] = if p.theta == 1.0 {
        &[1.0, -2.0, 1.0]
    } else {
        &[-1.0, 1.0]
    };
    let vals = par::map_slice(&shifts, |(cells, len)| {
        difference_norm(&target, cells, stencil, p.r) / len.powf(order_theta)
    });
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Dyadic increment scan `h -> sup over directions of ||Delta_h f||_{L^r}`
/// (diagonal increments rescaled to the axis length); its log–log slope
/// estimates the Besov order.
pub fn increment_scan(f: &Field, theta: f64, r: f64) -> Result<NormScan> {
    check_r(r)?;
    let (hs, vals, _) = difference_profile(f, theta, r)?;
    NormScan::new(hs, vals, Estimator::Difference.id())
}

/// Littlewood–Paley block index of a nonzero frequency magnitude: block `j`
/// holds `2^j <= |xi| < 2^{j+1}`; frequencies below 1 join block 0.
pub fn lp_block_index(xi: f64) -> usize {
    if xi < 2.0 {
        0
    } else {
        xi.log2().floor() as usize
    }
}

/// `||Delta_j f||_{L^r}` for every nonempty block `j = 0, 1, ...`. The mean
/// is excluded from all blocks.
pub fn lp_block_norms(f: &SpectralField, r: f64) -> Vec<f64> {
    let g = f.grid();
    let mut labels = vec![usize::MAX; g.len()];
    let mut top = 0;
    g.for_each_mode(|i, k| {
        let xi = g.frequency(&k);
        let mag = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        if mag > 0.0 {
            let j = lp_block_index(mag);
            labels[i] = j;
            top = top.max(j);
        }
    });
    let n = g.len();
    par::map_range(top + 1, |j| {
        let mut block = f.clone();
        for c in 0..f.components() {
            for (i, &l) in labels.iter().enumerate() {
                if l != j {
                    block.coeffs_mut()[c * n + i] = Default::default();
                }
            }
        }
        if block.norm_sq() == 0.0 {
            return 0.0;
        }
        lp_norm(&block.inverse(), r)
    })
}

/// Block-norm scan with scales `2^{-j}`, suitable for [`crate::scan::fit_exponent`].
pub fn lp_block_scan(f: &SpectralField, r: f64) -> Result<NormScan> {
    let norms = lp_block_norms(f, r);
    let scales = (0..norms.len()).map(|j| 2f64.powi(-(j as i32))).collect();
    NormScan::new(scales, norms, Estimator::LittlewoodPaley.id())
}

/// `sup_j 2^{j theta} ||Delta_j f||_{L^r}` with sharp annular blocks.
pub fn besov_seminorm_lp(f: &Field, p: &BesovParams) -> Result<f64> {
    p.validate()?;
    Ok(lp_block_norms(&f.transform(), p.r)
        .iter()
        .enumerate()
        .map(|(j, v)| 2f64.powf(j as f64 * p.theta) * v)
        .fold(0.0, f64::max))
}

pub fn besov_seminorm(f: &Field, p: &BesovParams) -> Result<f64> {
    match p.estimator {
        Estimator::Difference => besov_seminorm_diff(f, p),
        Estimator::LittlewoodPaley => besov_seminorm_lp(f, p),
    }
}

/// `||f||_{L^r} + [f]_{B^theta_{r,inf}}`.
pub fn besov_norm(f: &Field, p: &BesovParams) -> Result<f64> {
    Ok(lp_norm(f, p.r) + besov_seminorm(f, p)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    GaussianTruncated,
    PolynomialBump,
}

impl Kernel {
    /// Unnormalized profile on the unit ball.
    fn profile(self, rho: f64) -> f64 {
        if rho >= 1.0 {
            return 0.0;
        }
        match self {
            Kernel::GaussianTruncated => (-rho * rho / (2.0 * 0.25 * 0.25)).exp(),
            Kernel::PolynomialBump => (1.0 - rho * rho).powi(4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub kernel: Kernel,
    pub delta: f64,
}

impl MollifierSpec {
    pub fn new(kernel: Kernel, delta: f64) -> Self {
        Self { kernel, delta }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        let cell = grid.min_cell();
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta {} must be positive",
                self.delta
            )));
        }
        if self.delta < cell * (1.0 - 1e-12) {
            return Err(Error::UnderResolvedMollifier {
                delta: self.delta,
                cell,
            });
        }
        let half = grid.period().iter().fold(f64::INFINITY, |a, &p| a.min(p)) / 2.0;
        if self.delta > half {
            return Err(Error::InvalidParameter(format!(
                "delta {} exceeds half the period",
                self.delta
            )));
        }
        Ok(())
    }

    /// Sampled kernel `phi_delta` with unit discrete mass.
    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        self.validate(grid)?;
        let mut f = Field::from_fn(grid, 1, |x, _| {
            let mut rho2 = 0.0;
            for a in 0..grid.dim() {
                let l = grid.period()[a];
                // minimum-image displacement
                let mut d = x[a];
                if d > l / 2.0 {
                    d -= l;
                }
                rho2 += d * d;
            }
            self.kernel.profile(rho2.sqrt() / self.delta)
        })?;
        let mass: f64 = f.data().iter().sum();
        f = f.scaled(1.0 / mass);
        Ok(f)
    }

    /// Real Fourier multiplier of the periodic convolution with the sampled
    /// kernel, indexed like the grid's modes.
    pub fn symbol(&self, grid: &Grid) -> Result<Vec<f64>> {
        let k = self.sample(grid)?;
        let n = grid.len() as f64;
        // transform() divides by N; the convolution multiplier is the raw sum
        Ok(k.transform().coeffs().iter().map(|c| c.re * n).collect())
    }
}

fn apply_symbol(f: &SpectralField, symbol: &[f64]) -> SpectralField {
    let mut out = f.clone();
    let n = f.grid().len();
    for c in 0..f.components() {
        for (v, s) in out.coeffs_mut()[c * n..(c + 1) * n].iter_mut().zip(symbol) {
            *v *= *s;
        }
    }
    out
}

/// Periodic convolution `f * phi_delta`, evaluated spectrally.
pub fn mollify(f: &Field, m: &MollifierSpec) -> Result<Field> {
    Ok(mollify_spectral(&f.transform(), m)?.inverse())
}

pub fn mollify_spectral(f: &SpectralField, m: &MollifierSpec) -> Result<SpectralField> {
    let symbol = m.symbol(f.grid())?;
    Ok(apply_symbol(f, &symbol))
}

/// `R_delta = f_delta (x) f_delta - (f (x) f)_delta`, evaluated on a twice
/// refined grid so that the products are exact. Returns the tensor on the
/// refined grid.
pub fn commutator_fine(f: &SpectralField, m: &MollifierSpec) -> Result<SpectralField> {
    m.validate(f.grid())?;
    let fine = f.zero_padded(2)?;
    let symbol = m.symbol(fine.grid())?;
    let fd = apply_symbol(&fine, &symbol);
    // inputs on the refined grid stay below half its Nyquist frequency, so
    // the product there is exact
    let a = product::outer(&fd, &fd, Dealias::Unmasked)?;
    let b = apply_symbol(&product::outer(&fine, &fine, Dealias::Unmasked)?, &symbol);
    a.sub(&b)
}

/// The three mollification scans, coarse to fine in `delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollificationScans {
    /// `||f - f_delta||_{L^r}`, slope `theta`.
    pub error: NormScan,
    /// `||grad f_delta||_{L^r}`, slope `theta - 1`.
    pub gradient: NormScan,
    /// `||R_delta||_{L^r}`, slope `2 theta`.
    pub commutator: NormScan,
}

pub const MIN_SCAN_SCALES: usize = 4;

/// Default dyadic deltas: `L/2, L/4, ...` down to one grid cell.
pub fn default_deltas(grid: &Grid) -> Vec<f64> {
    let l = grid.period().iter().fold(f64::INFINITY, |a, &p| a.min(p));
    let mut out = Vec::new();
    let mut d = l / 2.0;
    while d >= grid.min_cell() * (1.0 - 1e-12) {
        out.push(d);
        d /= 2.0;
    }
    out
}

pub fn mollification_scan(
    f: &Field,
    r: f64,
    deltas: &[f64],
    kernel: Kernel,
) -> Result<MollificationScans> {
    check_r(r)?;
    if deltas.len() < MIN_SCAN_SCALES {
        return Err(Error::InsufficientScales {
            needed: MIN_SCAN_SCALES,
            got: deltas.len(),
        });
    }
    let spec = f.transform();
    let rows = par::try_map_range(deltas.len(), |i| -> Result<[f64; 3]> {
        let m = MollifierSpec::new(kernel, deltas[i]);
        let fd = mollify_spectral(&spec, &m)?;
        let err = lp_norm(&spec.sub(&fd)?.inverse(), r);
        let grad = lp_norm(&fd.gradient().inverse(), r);
        let comm = lp_norm(&commutator_fine(&spec, &m)?.inverse(), r);
        Ok([err, grad, comm])
    })?;
    let col = |c: usize| rows.iter().map(|row| row[c]).collect::<Vec<_>>();
    Ok(MollificationScans {
        error: NormScan::new(deltas.to_vec(), col(0), "molli_error")?,
        gradient: NormScan::new(deltas.to_vec(), col(1), "molli_gradient")?,
        commutator: NormScan::new(deltas.to_vec(), col(2), "molli_commutator")?,
    })
}

/// Both sides of the two Besov interpolation inequalities for one field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationCheck {
    pub gamma: f64,
    pub theta: f64,
    pub r: f64,
    /// `[f]_{B^gamma}`.
    pub lhs_low: f64,
    /// `||f||_{L^r}^{1-gamma/theta} ||f||_{B^theta}^{gamma/theta}`.
    pub rhs_low: f64,
    /// `[f]_{B^theta}`.
    pub lhs_high: f64,
    /// `||f||_{B^gamma}^{(1-theta)/(1-gamma)} ||f||_{W^{1,r}}^{(theta-gamma)/(1-gamma)}`.
    pub rhs_high: f64,
}

fn safe_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

impl InterpolationCheck {
    pub fn ratio_low(&self) -> f64 {
        safe_ratio(self.lhs_low, self.rhs_low)
    }

    pub fn ratio_high(&self) -> f64 {
        safe_ratio(self.lhs_high, self.rhs_high)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratio_low().max(self.ratio_high())
    }
}

/// Uniform bound on the interpolation ratios.
pub const INTERPOLATION_RATIO_BOUND: f64 = 10.0;

pub fn check_interpolation_inequalities(
    f: &Field,
    gamma: f64,
    theta: f64,
    r: f64,
    estimator: Estimator,
) -> Result<InterpolationCheck> {
    if !(gamma > 0.0 && gamma <= theta && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < gamma <= theta < 1, got gamma = {gamma}, theta = {theta}"
        )));
    }
    let pg = BesovParams::new(gamma, r, estimator);
    let pt = BesovParams::new(theta, r, estimator);
    let l = lp_norm(f, r);
    let semi_g = besov_seminorm(f, &pg)?;
    let semi_t = besov_seminorm(f, &pt)?;
    let w1 = w1_norm(f, r);
    let lam = (theta - gamma) / (1.0 - gamma);
    Ok(InterpolationCheck {
        gamma,
        theta,
        r,
        lhs_low: semi_g,
        rhs_low: l.powf(1.0 - gamma / theta) * (l + semi_t).powf(gamma / theta),
        lhs_high: semi_t,
        rhs_high: (l + semi_g).powf(1.0 - lam) * w1.powf(lam),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{lacunary_field, lacunary_modes, RoughFieldSpec};
    use std::f64::consts::PI;

    fn sine(g: &Grid) -> Field {
        Field::from_fn(g, 1, |x, _| (2.0 * PI * x[0]).sin()).unwrap()
    }

    #[test]
    fn lebesgue_norms() {
        let g = Grid::cube(2, 256).unwrap();
        let c = Field::from_fn(&g, 1, |_, _| 2.0).unwrap();
        for r in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert!((lp_norm(&c, r) - 2.0).abs() < 1e-13);
        }
        let s = sine(&g);
        assert!((lp_norm(&s, 2.0) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((lp_norm(&s, f64::INFINITY) - 1.0).abs() < 1e-3);
        // E|sin| = 2/pi
        assert!((lp_norm(&s, 1.0) - 2.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn seminorms_vanish_on_constants() {
        let g = Grid::cube(2, 32).unwrap();
        let c = Field::from_fn(&g, 1, |_, _| 3.0).unwrap();
        for est in [Estimator::Difference, Estimator::LittlewoodPaley] {
            for th in [0.3, 1.0, 1.5] {
                let v = besov_seminorm(&c, &BesovParams::new(th, 2.0, est)).unwrap();
                assert!(v.abs() < 1e-12);
            }
        }
        assert!(
            besov_seminorm_diff(&c, &BesovParams::new(2.0, 2.0, Estimator::Difference)).is_err()
        );
    }

    #[test]
    fn lp_seminorm_of_lacunary_is_max_amplitude() {
        let g = Grid::cube(2, 128).unwrap();
        let spec = RoughFieldSpec::lacunary(0.4, 5, 17);
        let f = lacunary_field(&spec, &g).unwrap();
        let v = besov_seminorm_lp(
            &f,
            &BesovParams::new(0.4, f64::INFINITY, Estimator::LittlewoodPaley),
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let blocks = lp_block_norms(&f.transform(), f64::INFINITY);
        for m in lacunary_modes(&spec, &g).unwrap() {
            let expected = 2f64.powf(-0.4 * m.level as f64);
            assert!((blocks[m.level as usize] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_block_weight() {
        // |k| = 4 lies in block 2: [4, 8)
        let g = Grid::cube(2, 64).unwrap();
        let f = Field::from_fn(&g, 1, |x, _| (2.0 * PI * 4.0 * x[1]).cos()).unwrap();
        let th = 0.7;
        let v =
            besov_seminorm_lp(&f, &BesovParams::new(th, 2.0, Estimator::LittlewoodPaley)).unwrap();
        assert!((v - 2f64.powf(2.0 * th) * 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn difference_seminorm_single_mode() {
        // |sin(2 pi (x + h)) - sin(2 pi x)| has L^2 norm sqrt(2) |sin(pi h)|;
        // the sup of that over |h|^theta on dyadic axis shifts sits at h = 1/2
        let g = Grid::cube(2, 64).unwrap();
        let f = sine(&g);
        let th = 0.5;
        let v = besov_seminorm_diff(&f, &BesovParams::new(th, 2.0, Estimator::Difference)).unwrap();
        let mut best: f64 = 0.0;
        for j in 1..=6 {
            let h = 2f64.powi(-j);
            best = best.max(2f64.sqrt() * (PI * h).sin() / h.powf(th));
            // diagonal shift: same x-increment, longer |h|
            let hd = h * 2f64.sqrt();
            best = best.max(2f64.sqrt() * (PI * h).sin() / hd.powf(th));
        }
        assert!((v - best).abs() < 1e-12, "{v} vs {best}");
    }

    #[test]
    fn homogeneity() {
        let g = Grid::cube(2, 64).unwrap();
        let f = lacunary_field(&RoughFieldSpec::lacunary(0.5, 4, 2), &g).unwrap();
        for est in [Estimator::Difference, Estimator::LittlewoodPaley] {
            let p = BesovParams::new(0.5, 3.0, est);
            let a = besov_seminorm(&f, &p).unwrap();
            let b = besov_seminorm(&f.scaled(-2.5), &p).unwrap();
            assert!((b - 2.5 * a).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn mollifier_preserves_constants_mean_and_divergence() {
        let g = Grid::cube(2, 64).unwrap();
        for kernel in [Kernel::GaussianTruncated, Kernel::PolynomialBump] {
            let m = MollifierSpec::new(kernel, 0.1);
            let c = Field::from_fn(&g, 1, |_, _| 1.5).unwrap();
            let cd = mollify(&c, &m).unwrap();
            assert!(cd.sub(&c).unwrap().max_abs() < 1e-12);

            let spec = RoughFieldSpec::lacunary(0.5, 4, 8).solenoidal(2);
            let u = lacunary_field(&spec, &g)
                .unwrap()
                .add(&Field::from_fn(&g, 2, |_, c| c as f64).unwrap())
                .unwrap();
            let ud = mollify(&u, &m).unwrap();
            for c in 0..2 {
                assert!((ud.mean(c) - u.mean(c)).abs() < 1e-12);
            }
            assert!(ud.transform().divergence().unwrap().inverse().max_abs() < 1e-10);
            let k = m.sample(&g).unwrap();
            assert!(k.data().iter().all(|&v| v >= 0.0));
            assert!((k.data().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn under_resolved_mollifier() {
        let g = Grid::cube(2, 64).unwrap();
        let f = sine(&g);
        let m = MollifierSpec::new(Kernel::PolynomialBump, 0.5 / 64.0);
        assert!(matches!(
            mollify(&f, &m),
            Err(Error::UnderResolvedMollifier { .. })
        ));
    }

    #[test]
    fn scan_needs_four_scales() {
        let g = Grid::cube(2, 32).unwrap();
        let f = sine(&g);
        let r = mollification_scan(&f, 2.0, &[0.25, 0.125, 0.0625], Kernel::PolynomialBump);
        assert!(matches!(r, Err(Error::InsufficientScales { .. })));
    }

    #[test]
    fn commutator_single_mode_closed_form() {
        // f = cos(2 pi k.x): f^2 = (1 + cos(4 pi k.x))/2, so
        // R = s1^2 cos^2 - (1 + s2 cos(4 pi k.x))/2 with s1, s2 the kernel
        // multipliers at k and 2k (the mean multiplier is 1)
        let g = Grid::cube(2, 32).unwrap();
        let kv = [3i64, 1];
        let f = Field::from_fn(&g, 1, |x, _| (2.0 * PI * (3.0 * x[0] + x[1])).cos()).unwrap();
        let m = MollifierSpec::new(Kernel::GaussianTruncated, 0.1);
        let r = commutator_fine(&f.transform(), &m).unwrap().inverse();
        let fine = r.grid().clone();
        let sym = m.symbol(&fine).unwrap();
        let at = |k: [i64; 2]| {
            let s = fine.n();
            sym[k[0].rem_euclid(s[0] as i64) as usize * s[1]
                + k[1].rem_euclid(s[1] as i64) as usize]
        };
        let s1 = at(kv);
        let s2 = at([2 * kv[0], 2 * kv[1]]);
        let exact = Field::from_fn(&fine, 1, |x, _| {
            let c = (2.0 * PI * (3.0 * x[0] + x[1])).cos();
            s1 * s1 * c * c - 0.5 * (1.0 + s2 * (4.0 * PI * (3.0 * x[0] + x[1])).cos())
        })
        .unwrap();
        assert!(r.sub(&exact).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn interpolation_degenerate_cases() {
        let g = Grid::cube(2, 32).unwrap();
        let c = Field::from_fn(&g, 1, |_, _| 1.0).unwrap();
        let chk =
            check_interpolation_inequalities(&c, 0.3, 0.7, 2.0, Estimator::Difference).unwrap();
        assert_eq!(chk.max_ratio(), 0.0);
        let s = sine(&g);
        let eq =
            check_interpolation_inequalities(&s, 0.6, 0.6, 2.0, Estimator::Difference).unwrap();
        assert!(eq.ratio_high() <= 1.0);
        assert!(
            check_interpolation_inequalities(&s, 0.7, 0.6, 2.0, Estimator::Difference).is_err()
        );
    }
}
