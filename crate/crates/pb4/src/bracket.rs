//! Finite-difference derivatives and the Poisson bracket.
//!
//! Convention: on a surface with area form `w dx dy`,
//! `{F, G} = -(F_x G_y - F_y G_x) / w`, so the canonical pair
//! `F = x`, `G = y` has `{F, G} = -1` under the unit weight.

use crate::error::{Error, Result};
use crate::field::{ScalarField, SymplecticDensity};
use crate::grid::Grid2D;

/// One-dimensional differentiation stencil along an axis of `n` nodes with
/// spacing `h`: second-order central differences, wrapping on periodic
/// axes and falling back to second-order one-sided stencils at
/// non-periodic edges. `n >= 4` is guaranteed by grid construction.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DiffAxis {
    pub n: usize,
    pub h: f64,
    pub periodic: bool,
}

impl DiffAxis {
    /// Stencil at position `i` as up to three `(index, coefficient)` pairs.
    pub fn stencil(&self, i: usize) -> [(usize, f64); 3] {
        let inv2h = 1.0 / (2.0 * self.h);
        if self.periodic {
            let prev = if i == 0 { self.n - 1 } else { i - 1 };
            let next = if i + 1 == self.n { 0 } else { i + 1 };
            [(prev, -inv2h), (next, inv2h), (i, 0.0)]
        } else if i == 0 {
            [(0, -3.0 * inv2h), (1, 4.0 * inv2h), (2, -inv2h)]
        } else if i + 1 == self.n {
            [
                (self.n - 1, 3.0 * inv2h),
                (self.n - 2, -4.0 * inv2h),
                (self.n - 3, inv2h),
            ]
        } else {
            [(i - 1, -inv2h), (i + 1, inv2h), (i, 0.0)]
        }
    }
}

pub(crate) fn x_axis(grid: &Grid2D) -> DiffAxis {
    DiffAxis {
        n: grid.nx(),
        h: grid.hx(),
        periodic: grid.periodic_x(),
    }
}

pub(crate) fn y_axis(grid: &Grid2D) -> DiffAxis {
    DiffAxis {
        n: grid.ny(),
        h: grid.hy(),
        periodic: grid.periodic_y(),
    }
}

/// d/dx by central differences (see module doc for edge handling).
pub fn derivative_x(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let axis = x_axis(&grid);
    let v = f.values();
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny() {
        let row = j * grid.nx();
        for i in 0..grid.nx() {
            let mut acc = 0.0;
            for (k, c) in axis.stencil(i) {
                if c != 0.0 {
                    acc += c * v[row + k];
                }
            }
            out[row + i] = acc;
        }
    }
    ScalarField::from_values(&grid, out).expect("derivative of finite field is finite")
}

/// d/dy by central differences (see module doc for edge handling).
pub fn derivative_y(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let axis = y_axis(&grid);
    let v = f.values();
    let nx = grid.nx();
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny() {
        for (k, c) in axis.stencil(j) {
            if c == 0.0 {
                continue;
            }
            let src = k * nx;
            let dst = j * nx;
            for i in 0..nx {
                out[dst + i] += c * v[src + i];
            }
        }
    }
    ScalarField::from_values(&grid, out).expect("derivative of finite field is finite")
}

/// Adjoint of [`derivative_x`]: scatter with the transposed stencil, so
/// that `<Dx f, u> = <f, DxT u>` holds exactly in floating point up to
/// summation order.
pub fn derivative_x_transpose(u: &ScalarField) -> ScalarField {
    let grid = *u.grid();
    let axis = x_axis(&grid);
    let v = u.values();
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny() {
        let row = j * grid.nx();
        for i in 0..grid.nx() {
            let ui = v[row + i];
            if ui == 0.0 {
                continue;
            }
            for (k, c) in axis.stencil(i) {
                if c != 0.0 {
                    out[row + k] += c * ui;
                }
            }
        }
    }
    ScalarField::from_values(&grid, out).expect("transpose of finite field is finite")
}

/// Adjoint of [`derivative_y`].
pub fn derivative_y_transpose(u: &ScalarField) -> ScalarField {
    let grid = *u.grid();
    let axis = y_axis(&grid);
    let v = u.values();
    let nx = grid.nx();
    let mut out = vec![0.0; grid.len()];
    for j in 0..grid.ny() {
        for (k, c) in axis.stencil(j) {
            if c == 0.0 {
                continue;
            }
            let src = j * nx;
            let dst = k * nx;
            for i in 0..nx {
                out[dst + i] += c * v[src + i];
            }
        }
    }
    ScalarField::from_values(&grid, out).expect("transpose of finite field is finite")
}

/// `{F, G} = -(F_x G_y - F_y G_x) / w`.
///
/// Antisymmetry is exact in floating point: swapping the arguments flips
/// the sign of every node value.
pub fn poisson_bracket(
    f: &ScalarField,
    g: &ScalarField,
    density: &SymplecticDensity,
) -> Result<ScalarField> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("poisson_bracket".into()));
    }
    let grid = *f.grid();
    let fx = derivative_x(f);
    let fy = derivative_y(f);
    let gx = derivative_x(g);
    let gy = derivative_y(g);
    let mut out = Vec::with_capacity(grid.len());
    if density.is_uniform() {
        for k in 0..grid.len() {
            let jac = fx.values()[k] * gy.values()[k] - fy.values()[k] * gx.values()[k];
            out.push(-jac);
        }
    } else {
        let w = density.sample(&grid)?;
        for k in 0..grid.len() {
            let jac = fx.values()[k] * gy.values()[k] - fy.values()[k] * gx.values()[k];
            out.push(-jac / w.values()[k]);
        }
    }
    ScalarField::from_values(&grid, out)
}
