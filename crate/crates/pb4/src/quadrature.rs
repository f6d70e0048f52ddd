//! Midpoint-rule integration and weighted L_q norms on grids.

use crate::error::{Error, Result};
use crate::exponent::{qth_root, Exponent};
use crate::field::{ScalarField, SymplecticDensity};
use crate::grid::Mask;

/// Signed quadrature of `f w dx dy` over the masked cells.
pub fn integrate(f: &ScalarField, mask: &Mask, density: &SymplecticDensity) -> Result<f64> {
    if f.grid() != mask.grid() {
        return Err(Error::GridMismatch("integrate".into()));
    }
    let grid = f.grid();
    let da = grid.cell_area();
    let mut acc = 0.0;
    if density.is_uniform() {
        for (k, inside) in mask.iter().enumerate() {
            if inside {
                acc += f.values()[k];
            }
        }
    } else {
        let w = density.sample(grid)?;
        for (k, inside) in mask.iter().enumerate() {
            if inside {
                acc += f.values()[k] * w.values()[k];
            }
        }
    }
    Ok(acc * da)
}

/// Quadrature of `f w dx dy` over the whole grid.
pub fn integrate_all(f: &ScalarField, density: &SymplecticDensity) -> Result<f64> {
    integrate(f, &Mask::full(f.grid()), density)
}

/// Weighted area of the masked region.
pub fn area(mask: &Mask, density: &SymplecticDensity) -> Result<f64> {
    let ones = ScalarField::constant(mask.grid(), 1.0)?;
    integrate(&ones, mask, density)
}

/// `(∫ |f|^q w dx dy)^{1/q}` by the midpoint rule; the infinite exponent
/// returns `max |f|`.
pub fn lq_norm(f: &ScalarField, q: Exponent, density: &SymplecticDensity) -> Result<f64> {
    lq_norm_masked(f, &Mask::full(f.grid()), q, density)
}

/// Mask-restricted variant of [`lq_norm`]. For the infinite exponent the
/// maximum runs over masked nodes only.
pub fn lq_norm_masked(
    f: &ScalarField,
    mask: &Mask,
    q: Exponent,
    density: &SymplecticDensity,
) -> Result<f64> {
    if f.grid() != mask.grid() {
        return Err(Error::GridMismatch("lq_norm".into()));
    }
    match q {
        Exponent::Infinity => {
            let mut m: f64 = 0.0;
            for (k, inside) in mask.iter().enumerate() {
                if inside {
                    m = m.max(f.values()[k].abs());
                }
            }
            Ok(m)
        }
        Exponent::Finite(q) => {
            let p = lq_power_integral(f, mask, q, density)?;
            Ok(qth_root(p, q))
        }
    }
}

/// `∫ |f|^q w dx dy` over the masked cells (no root taken).
pub fn lq_power_integral(
    f: &ScalarField,
    mask: &Mask,
    q: f64,
    density: &SymplecticDensity,
) -> Result<f64> {
    if f.grid() != mask.grid() {
        return Err(Error::GridMismatch("lq_power_integral".into()));
    }
    if !(q >= 1.0) {
        return Err(Error::param("q", format!("must satisfy q >= 1, got {q}")));
    }
    let grid = f.grid();
    let da = grid.cell_area();
    let pow = |v: f64| -> f64 {
        if q == 1.0 {
            v.abs()
        } else if q == 2.0 {
            v * v
        } else {
            v.abs().powf(q)
        }
    };
    let mut acc = 0.0;
    if density.is_uniform() {
        for (k, inside) in mask.iter().enumerate() {
            if inside {
                acc += pow(f.values()[k]);
            }
        }
    } else {
        let w = density.sample(grid)?;
        for (k, inside) in mask.iter().enumerate() {
            if inside {
                acc += pow(f.values()[k]) * w.values()[k];
            }
        }
    }
    Ok(acc * da)
}

/// `‖f - g‖_q`, sharing a grid.
pub fn lq_distance(
    f: &ScalarField,
    g: &ScalarField,
    q: Exponent,
    density: &SymplecticDensity,
) -> Result<f64> {
    lq_norm(&f.sub(g)?, q, density)
}
