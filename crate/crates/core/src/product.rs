//! Pseudo-spectral tensor products.
//!
//! Products are formed in real space. Aliasing is handled in one of four
//! ways:
//!
//! * [`Dealias::Strict`] checks that the inputs already vanish outside the
//!   dealiasing box and truncates the result. For `m` factors the box
//!   fraction must not exceed `2/(m+1)` (2/3 for pairs, 1/2 for triples).
//! * [`Dealias::Mask`] silently truncates the inputs first; used by time
//!   stepping, where a masked nonlinearity is the scheme itself.
//! * [`Dealias::Padded`] evaluates on a twice finer grid and keeps every mode
//!   the coarse grid can represent. Exact for up to three factors.
//! * [`Dealias::Unmasked`] multiplies as is; the caller guarantees that the
//!   product is resolved on the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::par;

/// Relative spectral energy above the cutoff tolerated by [`Dealias::Strict`].
pub const STRICT_ENERGY_TOL: f64 = 1e-20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dealias {
    Strict(f64),
    Mask(f64),
    Padded,
    Unmasked,
}

impl Dealias {
    pub const TWO_THIRDS: Dealias = Dealias::Strict(2.0 / 3.0);
    pub const ONE_HALF: Dealias = Dealias::Strict(0.5);
}

/// Outer product of the component lists: output component
/// `(i * m_w + j)` is `u_i * w_j`.
pub fn outer(u: &SpectralField, w: &SpectralField, rule: Dealias) -> Result<SpectralField> {
    product(&[u, w], rule)
}

/// Triple outer product: component `(i * m_w + j) * m_z + k` is
/// `u_i * w_j * z_k`.
pub fn outer3(
    u: &SpectralField,
    w: &SpectralField,
    z: &SpectralField,
    rule: Dealias,
) -> Result<SpectralField> {
    product(&[u, w, z], rule)
}

fn product(factors: &[&SpectralField], rule: Dealias) -> Result<SpectralField> {
    let grid = factors[0].grid().clone();
    for f in &factors[1..] {
        if f.grid() != &grid {
            return Err(Error::ShapeMismatch(
                "product of fields on different grids".into(),
            ));
        }
    }
    let m = factors.len();
    let prepared: Vec<SpectralField> = match rule {
        Dealias::Strict(frac) | Dealias::Mask(frac) => {
            let limit = 2.0 / (m as f64 + 1.0);
            if !(frac > 0.0 && frac <= limit + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "dealias fraction {frac} exceeds {limit:.4} for a {m}-fold product"
                )));
            }
            if let Dealias::Strict(_) = rule {
                for f in factors {
                    let above = f.energy_fraction_above(frac);
                    if above > STRICT_ENERGY_TOL {
                        return Err(Error::ResolutionTooSmall(above));
                    }
                }
            }
            factors.iter().map(|f| f.dealiased(frac)).collect()
        }
        Dealias::Unmasked => factors.iter().map(|f| (*f).clone()).collect(),
        Dealias::Padded => {
            if m > 3 {
                return Err(Error::Unsupported(
                    "padded products of more than three factors".into(),
                ));
            }
            factors
                .iter()
                .map(|f| f.zero_padded(2))
                .collect::<Result<_>>()?
        }
    };
    let reals: Vec<_> = prepared.iter().map(|f| f.inverse()).collect();
    let work_grid = reals[0].grid().clone();
    let n = work_grid.len();
    let counts: Vec<usize> = factors.iter().map(|f| f.components()).collect();
    let total: usize = counts.iter().product();

    let comps = par::map_range(total, |flat| {
        let mut idx = vec![0usize; m];
        let mut rem = flat;
        for a in (0..m).rev() {
            idx[a] = rem % counts[a];
            rem /= counts[a];
        }
        let mut buf = reals[0].component(idx[0]).to_vec();
        for a in 1..m {
            for (b, v) in buf.iter_mut().zip(reals[a].component(idx[a])) {
                *b *= v;
            }
        }
        buf
    });
    let mut data = Vec::with_capacity(total * n);
    for c in comps {
        data.extend(c);
    }
    let prod = crate::grid::Field::new(work_grid, total, data)?.transform();
    match rule {
        Dealias::Strict(frac) | Dealias::Mask(frac) => Ok(prod.dealiased(frac)),
        Dealias::Padded => prod.truncated_to(&grid),
        Dealias::Unmasked => Ok(prod),
    }
}

/// Contracts a `d^order`-component tensor against `(i kappa)` once per index
/// and returns the scalar `div^order T`. Odd factors use Nyquist-zeroed
/// wavenumbers, matching [`SpectralField::divergence`].
pub fn full_divergence(t: &SpectralField, order: u32) -> Result<SpectralField> {
    let g = t.grid().clone();
    let d = g.dim();
    if t.components() != d.pow(order) {
        return Err(Error::ShapeMismatch(format!(
            "rank-{order} tensor needs {} components, got {}",
            d.pow(order),
            t.components()
        )));
    }
    let n = g.len();
    let mut out = vec![Complex64::default(); n];
    g.for_each_mode(|i, k| {
        let mut kv = [0.0; 3];
        for a in 0..d {
            kv[a] = if k[a] == -(g.n()[a] as i64) / 2 {
                0.0
            } else {
                2.0 * std::f64::consts::PI * k[a] as f64 / g.period()[a]
            };
        }
        let mut acc = Complex64::default();
        for c in 0..t.components() {
            let mut rem = c;
            let mut w = 1.0;
            for _ in 0..order {
                w *= kv[rem % d];
                rem /= d;
            }
            acc += t.coeffs()[c * n + i] * w;
        }
        out[i] = acc * Complex64::i().powu(order);
    });
    SpectralField::new(g, 1, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, Grid};
    use std::f64::consts::PI;

    fn trig(g: &Grid, kx: f64, ky: f64) -> SpectralField {
        Field::from_fn(g, 1, |x, _| (2.0 * PI * (kx * x[0] + ky * x[1])).cos())
            .unwrap()
            .transform()
    }

    #[test]
    fn strict_product_matches_pointwise() {
        let g = Grid::cube(2, 32).unwrap();
        let a = trig(&g, 3.0, 1.0);
        let b = trig(&g, -2.0, 4.0);
        let p = outer(&a, &b, Dealias::TWO_THIRDS).unwrap().inverse();
        let exact = Field::from_fn(&g, 1, |x, _| {
            (2.0 * PI * (3.0 * x[0] + x[1])).cos() * (2.0 * PI * (-2.0 * x[0] + 4.0 * x[1])).cos()
        })
        .unwrap();
        let err = p.sub(&exact).unwrap().max_abs();
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn strict_rejects_unresolved_inputs() {
        let g = Grid::cube(2, 32).unwrap();
        let a = trig(&g, 12.0, 0.0);
        assert!(matches!(
            outer(&a, &a, Dealias::TWO_THIRDS),
            Err(Error::ResolutionTooSmall(_))
        ));
        assert!(outer(&a, &a, Dealias::Mask(2.0 / 3.0)).is_ok());
        assert!(outer3(&a, &a, &a, Dealias::TWO_THIRDS).is_err());
    }

    #[test]
    fn padded_product_keeps_resolved_modes() {
        let g = Grid::cube(2, 16).unwrap();
        let a = trig(&g, 5.0, 0.0);
        // cos^2 = (1 + cos(2 * 5 x)) / 2; 10 is beyond Nyquist, so only the mean survives
        let p = outer(&a, &a, Dealias::Padded).unwrap();
        assert!((p.coeff(0, &[0, 0]).re - 0.5).abs() < 1e-14);
        assert!(p.norm_sq() - 0.25 < 1e-14);
        let b = trig(&g, 3.0, 0.0);
        let q = outer(&b, &b, Dealias::Padded).unwrap();
        assert!((q.coeff(0, &[6, 0]).re - 0.25).abs() < 1e-14);
    }

    #[test]
    fn component_ordering() {
        let g = Grid::cube(2, 16).unwrap();
        let u = SpectralField::stack(&[trig(&g, 1.0, 0.0), trig(&g, 0.0, 2.0)]).unwrap();
        let w = SpectralField::stack(&[trig(&g, 0.0, 1.0), trig(&g, 2.0, 0.0)]).unwrap();
        let p = outer(&u, &w, Dealias::TWO_THIRDS).unwrap();
        assert_eq!(p.components(), 4);
        // component 2 is u_1 * w_0 = cos(4 pi y) cos(2 pi y)
        let f = p.inverse();
        let expected = Field::from_fn(&g, 1, |x, _| {
            (4.0 * PI * x[1]).cos() * (2.0 * PI * x[1]).cos()
        })
        .unwrap();
        let c2 = f.component(2);
        for (a, b) in c2.iter().zip(expected.data()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn full_divergence_of_gradient_tensor() {
        // div div (grad grad phi) = laplacian^2 phi
        let g = Grid::cube(2, 16).unwrap();
        let phi = trig(&g, 2.0, 1.0);
        let hess = phi.gradient().gradient();
        let dd = full_divergence(&hess, 2).unwrap();
        let expected = phi.laplacian().laplacian();
        assert!(dd.sub(&expected).unwrap().norm_sq().sqrt() < 1e-9);
    }
}
