//! Synthetic periodic fields with prescribed regularity.
//!
//! The lacunary construction places one cosine per dyadic annulus:
//!
//! ```text
//! f(x) = A * sum_{j=0..=jmax} 2^{-j theta} a_j cos(2 pi k_j.x + phi_j),
//! 2^j <= |k_j| < 2^{j+1}
//! ```
//!
//! so every Littlewood–Paley block holds exactly one term. Phases are chosen
//! as `phi_j = -2 pi k_j.x0` with `x0` on the lattice `(L/8) Z^d`, which lies
//! on every admissible grid; each block therefore attains its sup norm at a
//! grid point and the field does not depend on resolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Lacunary,
    PowerSpectrum,
}

fn default_components() -> usize {
    1
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoughFieldSpec {
    pub theta: f64,
    pub kind: FieldKind,
    pub jmax: u32,
    pub seed: u64,
    #[serde(default)]
    pub divergence_free: bool,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Number of components; must equal the grid dimension when
    /// `divergence_free` is set.
    #[serde(default = "default_components")]
    pub components: usize,
}

impl RoughFieldSpec {
    pub fn lacunary(theta: f64, jmax: u32, seed: u64) -> Self {
        Self {
            theta,
            kind: FieldKind::Lacunary,
            jmax,
            seed,
            divergence_free: false,
            amplitude: 1.0,
            components: 1,
        }
    }

    pub fn power_spectrum(theta: f64, jmax: u32, seed: u64) -> Self {
        Self {
            kind: FieldKind::PowerSpectrum,
            ..Self::lacunary(theta, jmax, seed)
        }
    }

    /// Turns the spec into a divergence-free vector field on `dim` axes.
    pub fn solenoidal(mut self, dim: usize) -> Self {
        self.divergence_free = true;
        self.components = dim;
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {} must lie in (0, 1)",
                self.theta
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter("amplitude must be finite".into()));
        }
        if self.components == 0 {
            return Err(Error::InvalidParameter("components must be >= 1".into()));
        }
        if self.divergence_free && self.components != grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "divergence-free fields need {} components, got {}",
                grid.dim(),
                self.components
            )));
        }
        // top annulus reaches 2^{jmax+1} - 1, which must stay below Nyquist
        let top = 1u64.checked_shl(self.jmax).unwrap_or(u64::MAX);
        if top as f64 >= grid.min_n() as f64 / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "2^jmax = {top} is not below half the smallest axis size {}",
                grid.min_n()
            )));
        }
        Ok(())
    }
}

/// One term of a lacunary series.
#[derive(Clone, Debug, PartialEq)]
pub struct LacunaryMode {
    pub level: u32,
    pub k: [i64; 3],
    /// Vector amplitude including the `A 2^{-j theta}` factor.
    pub amplitude: Vec<f64>,
    pub phase: f64,
}

impl LacunaryMode {
    /// Euclidean norm of the amplitude vector, i.e. the block's sup norm.
    pub fn sup_norm(&self) -> f64 {
        self.amplitude.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

fn rng_for(seed: u64, level: u32, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((level as u64) << 16) | tag);
    rng
}

/// Integer vector with `lo <= |k| < hi`, uniformly among lattice points of
/// the annulus.
fn annulus_vector(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> [i64; 3] {
    let r = hi.ceil() as i64;
    loop {
        let mut k = [0i64; 3];
        for v in k.iter_mut().take(dim) {
            *v = rng.gen_range(-r..=r);
        }
        let m = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        if m >= lo && m < hi {
            return k;
        }
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize, normal: Option<&[f64; 3]>) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(nrm) = normal {
            let nn: f64 = nrm[..dim].iter().map(|a| a * a).sum();
            let dot: f64 = v.iter().zip(nrm).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(nrm) {
                *a -= dot / nn * b;
            }
        }
        let m = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if m > 0.1 {
            return v.into_iter().map(|a| a / m).collect();
        }
    }
}

/// The terms of the lacunary series described by `spec`.
pub fn lacunary_modes(spec: &RoughFieldSpec, grid: &Grid) -> Result<Vec<LacunaryMode>> {
    spec.validate(grid)?;
    let dim = grid.dim();
    let mut anchor_rng = rng_for(spec.seed, u32::MAX, 0);
    let x0: Vec<i64> = (0..dim).map(|_| anchor_rng.gen_range(0..8)).collect();
    let modes = (0..=spec.jmax)
        .map(|j| {
            let mut rng = rng_for(spec.seed, j, 1);
            let lo = (1u64 << j) as f64;
            let k = annulus_vector(&mut rng, dim, lo, 2.0 * lo);
            let scale = spec.amplitude * 2f64.powf(-(j as f64) * spec.theta);
            let dir = if spec.components == 1 {
                vec![1.0]
            } else if spec.divergence_free {
                let xi = grid.frequency(&k);
                unit_vector(&mut rng, dim, Some(&xi))
            } else {
                unit_vector(&mut rng, spec.components, None)
            };
            let phase = -2.0 * PI * (0..dim).map(|a| k[a] * x0[a]).sum::<i64>() as f64 / 8.0;
            LacunaryMode {
                level: j,
                k,
                amplitude: dir.into_iter().map(|a| a * scale).collect(),
                phase,
            }
        })
        .collect();
    Ok(modes)
}

/// Unit-amplitude modes, one per entry of `levels`, each drawn from its own
/// random stream. Repeated levels give independent modes in the same annulus.
/// Phases follow the same lattice anchoring as [`lacunary_modes`].
pub fn unit_modes(
    grid: &Grid,
    levels: &[u32],
    seed: u64,
    components: usize,
    divergence_free: bool,
) -> Result<Vec<LacunaryMode>> {
    let dim = grid.dim();
    if divergence_free && components != dim {
        return Err(Error::InvalidParameter(format!(
            "divergence-free modes need {dim} components, got {components}"
        )));
    }
    let top = levels.iter().copied().max().unwrap_or(0);
    if (1u64 << top) as f64 >= grid.min_n() as f64 / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "level {top} is not resolved on axis size {}",
            grid.min_n()
        )));
    }
    let mut anchor_rng = rng_for(seed, u32::MAX, 0);
    let x0: Vec<i64> = (0..dim).map(|_| anchor_rng.gen_range(0..8)).collect();
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, &level)| {
            let mut rng = rng_for(seed, i as u32, 2);
            let lo = (1u64 << level) as f64;
            let k = annulus_vector(&mut rng, dim, lo, 2.0 * lo);
            let amplitude = if components == 1 {
                vec![1.0]
            } else if divergence_free {
                unit_vector(&mut rng, dim, Some(&grid.frequency(&k)))
            } else {
                unit_vector(&mut rng, components, None)
            };
            let phase = -2.0 * PI * (0..dim).map(|a| k[a] * x0[a]).sum::<i64>() as f64 / 8.0;
            LacunaryMode {
                level,
                k,
                amplitude,
                phase,
            }
        })
        .collect())
}

/// Spectral coefficients of a sum of real cosine modes.
pub fn modes_to_spectral(grid: &Grid, components: usize, modes: &[LacunaryMode]) -> SpectralField {
    let mut out = SpectralField::zeros(grid, components);
    let n = grid.len();
    let s = grid.n();
    let flat = |k: &[i64; 3]| {
        let mut f = 0usize;
        for a in 0..grid.dim() {
            f = f * s[a] + k[a].rem_euclid(s[a] as i64) as usize;
        }
        f
    };
    for m in modes {
        let neg = [-m.k[0], -m.k[1], -m.k[2]];
        let (ip, im) = (flat(&m.k), flat(&neg));
        let half = Complex64::from_polar(0.5, m.phase);
        for (c, &a) in m.amplitude.iter().enumerate() {
            out.coeffs_mut()[c * n + ip] += half * a;
            out.coeffs_mut()[c * n + im] += half.conj() * a;
        }
    }
    out
}

pub fn lacunary_field(spec: &RoughFieldSpec, grid: &Grid) -> Result<Field> {
    let modes = lacunary_modes(spec, grid)?;
    Ok(modes_to_spectral(grid, spec.components, &modes).inverse())
}

/// Random-phase field with `|F(k)| = A |k|^{-(theta + d/2)}` for
/// `1 <= |k| < 2^{jmax+1}`.
pub fn power_spectrum_field(spec: &RoughFieldSpec, grid: &Grid) -> Result<Field> {
    spec.validate(grid)?;
    let d = grid.dim();
    let m = spec.components;
    let kmax = (1u64 << (spec.jmax + 1)) as f64;
    let exponent = -(spec.theta + d as f64 / 2.0);
    let spectral = random_hermitian(grid, m, spec.seed, spec.divergence_free, |kk| {
        if kk >= 1.0 && kk < kmax {
            spec.amplitude * kk.powf(exponent)
        } else {
            0.0
        }
    });
    Ok(spectral.inverse())
}

/// Smooth random field with Gaussian spectral envelope, supported on
/// `|k| <= kmax` and normalized to unit root-mean-square.
pub fn smooth_field(
    grid: &Grid,
    components: usize,
    kmax: f64,
    seed: u64,
    divergence_free: bool,
) -> Result<Field> {
    if divergence_free && components != grid.dim() {
        return Err(Error::InvalidParameter(
            "divergence-free fields need one component per axis".into(),
        ));
    }
    if kmax < 1.0 || kmax >= grid.min_n() as f64 / 2.0 {
        return Err(Error::InvalidParameter(format!("kmax {kmax} out of range")));
    }
    let sp = random_hermitian(grid, components, seed, divergence_free, |kk| {
        if kk >= 1.0 && kk <= kmax {
            (-(kk / kmax).powi(2)).exp()
        } else {
            0.0
        }
    });
    let rms = sp.norm_sq().sqrt();
    Ok(sp.scaled(1.0 / rms).inverse())
}

/// Random coefficients of magnitude `envelope(|k|)` per mode, Hermitian
/// symmetric so the field is real. Modes are grouped by dyadic level and
/// each level draws from its own stream.
fn random_hermitian<E: Fn(f64) -> f64>(
    grid: &Grid,
    m: usize,
    seed: u64,
    divergence_free: bool,
    envelope: E,
) -> SpectralField {
    let d = grid.dim();
    let n = grid.len();
    let mut out = SpectralField::zeros(grid, m);
    let mut rngs: Vec<Vec<ChaCha8Rng>> = Vec::new();
    let mut entries: Vec<(usize, [i64; 3])> = Vec::new();
    grid.for_each_mode(|i, k| entries.push((i, k)));
    let index_of = |k: &[i64; 3]| -> usize {
        let s = grid.n();
        let mut f = 0usize;
        for a in 0..d {
            f = f * s[a] + k[a].rem_euclid(s[a] as i64) as usize;
        }
        f
    };
    for (i, k) in entries {
        if (0..d).any(|a| grid.is_nyquist(a, k[a])) || !canonical(&k) {
            continue;
        }
        let kk = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
        let amp = envelope(kk);
        if amp == 0.0 {
            continue;
        }
        let level = kk.log2().floor().max(0.0) as usize;
        while rngs.len() <= level {
            let l = rngs.len() as u32;
            rngs.push((0..m as u64).map(|c| rng_for(seed, l, 2 + c)).collect());
        }
        let mut v: Vec<Complex64> = (0..m)
            .map(|c| {
                let r = &mut rngs[level][c];
                Complex64::new(gauss(r), gauss(r))
            })
            .collect();
        if divergence_free {
            let xi = grid.frequency(&k);
            let nn: f64 = xi[..d].iter().map(|a| a * a).sum();
            let dot: Complex64 = v.iter().zip(&xi).map(|(a, b)| a * b).sum();
            for (a, b) in v.iter_mut().zip(&xi) {
                *a -= dot * (b / nn);
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let neg = [-k[0], -k[1], -k[2]];
        let j = index_of(&neg);
        for c in 0..m {
            let val = v[c] * (amp / norm);
            out.coeffs_mut()[c * n + i] = val;
            out.coeffs_mut()[c * n + j] = val.conj();
        }
    }
    out
}

/// First nonzero entry positive: picks one representative of `{k, -k}`.
fn canonical(k: &[i64; 3]) -> bool {
    for &v in k {
        if v != 0 {
            return v > 0;
        }
    }
    false
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
