//! The commuting-approximant construction: given non-commuting `F`, `G`,
//! produce `F~` close to `F` uniformly and `G~` close to `G` in L_q with
//! `{F~, G~} = 0`.
//!
//! The domain is tiled by axis-aligned square cells `Q` with nested
//! sub-rectangles `Q3 ⊂ Q2 ⊂ Q1 ⊂ Q` (insets `m3 > m2 > m1`). On each
//! cell, `F~ = phi F + (1 - phi) F(x0)` with `phi` vanishing on `Q2` and
//! equal to 1 off `Q1`, while `G~ = psi G` with `psi = 1` on `Q3` and 0
//! off `Q2`. Where `G~` can be nonzero, `F~` is constant, so the pair
//! commutes; the support of `psi` is pulled a full stencil width inside
//! the region where `phi = 0`, which makes the *discrete* bracket vanish
//! identically as well.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::quadrature::{lq_distance, lq_norm};

fn smoothstep01(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * (3.0 - 2.0 * u)
    }
}

/// Tiling of a rectangle by near-square cells with nested margin insets.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub x0: f64,
    pub y0: f64,
    pub ncx: usize,
    pub ncy: usize,
    pub dx: f64,
    pub dy: f64,
    /// inset of Q1 (outermost nested region)
    pub m1: f64,
    /// inset of Q2
    pub m2: f64,
    /// inset of Q3 (innermost region)
    pub m3: f64,
    /// requested volume-fraction bound for `Q \ Q3`
    pub eps_cell: f64,
    /// achieved `Vol(Q \ Q3) / Vol(Q)`
    pub vol_fraction: f64,
}

/// Tile `rect = (x0, x1, y0, y1)` by cells of size at most `delta`,
/// choosing the inner inset so `Vol(Q \ Q3) <= eps_cell Vol(Q)` with
/// slack for sampling error.
pub fn decompose(rect: (f64, f64, f64, f64), delta: f64, eps_cell: f64) -> Result<CellDecomposition> {
    let (x0, x1, y0, y1) = rect;
    let w = x1 - x0;
    let h = y1 - y0;
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::param("rect", "degenerate support rectangle"));
    }
    if !(delta > 0.0) || delta > w.min(h) {
        return Err(Error::param(
            "delta",
            format!("cell size must lie in (0, {}], got {delta}", w.min(h)),
        ));
    }
    if !(eps_cell > 0.0 && eps_cell < 0.5) {
        return Err(Error::param("eps_cell", "must lie in (0, 1/2)"));
    }
    let ncx = (w / delta).ceil() as usize;
    let ncy = (h / delta).ceil() as usize;
    let dx = w / ncx as f64;
    let dy = h / ncy as f64;
    // Solve 1 - (1 - 2m/dx)(1 - 2m/dy) = 0.85 eps_cell for the small root.
    let tau = 0.85 * eps_cell;
    let p = 1.0 / dx + 1.0 / dy;
    let r = 1.0 / (dx * dy);
    let m3 = (p - (p * p - 4.0 * r * tau).sqrt()) / (4.0 * r);
    let vol_fraction = 1.0 - (1.0 - 2.0 * m3 / dx) * (1.0 - 2.0 * m3 / dy);
    Ok(CellDecomposition {
        x0,
        y0,
        ncx,
        ncy,
        dx,
        dy,
        m1: 0.15 * m3,
        m2: 0.3 * m3,
        m3,
        eps_cell,
        vol_fraction,
    })
}

impl CellDecomposition {
    pub fn cell_count(&self) -> usize {
        self.ncx * self.ncy
    }

    /// Largest cell edge (the diameter is `sqrt(dx^2 + dy^2)`).
    pub fn cell_size(&self) -> f64 {
        self.dx.max(self.dy)
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let cx = (((x - self.x0) / self.dx).floor() as isize).clamp(0, self.ncx as isize - 1);
        let cy = (((y - self.y0) / self.dy).floor() as isize).clamp(0, self.ncy as isize - 1);
        (cx as usize, cy as usize)
    }

    fn cell_rect(&self, cx: usize, cy: usize) -> (f64, f64, f64, f64) {
        let a = self.x0 + cx as f64 * self.dx;
        let b = a + self.dx;
        let c = self.y0 + cy as f64 * self.dy;
        let d = c + self.dy;
        (a, b, c, d)
    }

    fn is_boundary_ring(&self, cx: usize, cy: usize) -> bool {
        cx == 0 || cy == 0 || cx + 1 == self.ncx || cy + 1 == self.ncy
    }

    /// `phi`: 0 on Q2, 1 off Q1, tensor product of edge ramps.
    fn phi(&self, cx: usize, cy: usize, x: f64, y: f64) -> f64 {
        let (a, b, c, d) = self.cell_rect(cx, cy);
        let ramp = |depth: f64| smoothstep01((depth - self.m1) / (self.m2 - self.m1));
        let bx = ramp((x - a).min(b - x));
        let by = ramp((y - c).min(d - y));
        1.0 - bx * by
    }

    /// `psi`: 1 on Q3, 0 outside the inset `a' = m2 + 2.5 h`, where `h`
    /// is the grid spacing of the field being localized.
    fn psi(&self, cx: usize, cy: usize, x: f64, y: f64, guard: f64) -> f64 {
        let inner = self.m2 + guard;
        let span = (self.m3 - inner).max(1e-300);
        let (a, b, c, d) = self.cell_rect(cx, cy);
        let ramp = |depth: f64| smoothstep01((depth - inner) / span);
        let tx = ramp((x - a).min(b - x));
        let ty = ramp((y - c).min(d - y));
        tx * ty
    }
}

fn support_guard(grid: &Grid2D) -> f64 {
    2.5 * grid.hx().max(grid.hy())
}

fn check_resolution(cells: &CellDecomposition, grid: &Grid2D) -> Result<()> {
    let h = grid.hx().max(grid.hy());
    if h > cells.dx.min(cells.dy) / 8.0 {
        return Err(Error::GridTooCoarse(format!(
            "need at least 8 nodes per cell edge, have spacing {h} for cells {} x {}",
            cells.dx, cells.dy
        )));
    }
    if cells.m2 + support_guard(grid) >= cells.m3 {
        return Err(Error::GridTooCoarse(format!(
            "stencil guard {} does not fit between the Q2 inset {} and the Q3 inset {}",
            support_guard(grid),
            cells.m2,
            cells.m3
        )));
    }
    Ok(())
}

fn check_ring_support(f: &ScalarField, cells: &CellDecomposition, name: &str) -> Result<()> {
    let grid = f.grid();
    let tol = 1e-12 * f.max_abs().max(1.0);
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            let (cx, cy) = cells.cell_of(grid.x(i), y);
            if cells.is_boundary_ring(cx, cy) && f.get(i, j).abs() > tol {
                return Err(Error::SupportViolation(format!(
                    "{name} is nonzero (|v| = {}) in the boundary cell ring at node ({i}, {j})",
                    f.get(i, j).abs()
                )));
            }
        }
    }
    Ok(())
}

/// `F~ = phi F + (1 - phi) F(x0)` cell by cell: constant on each Q2,
/// equal to `F` off each Q1.
pub fn flatten_f(f: &ScalarField, cells: &CellDecomposition) -> Result<ScalarField> {
    check_ring_support(f, cells, "F")?;
    let grid = *f.grid();
    // Value at the node nearest each cell center.
    let mut centers = vec![0.0; cells.cell_count()];
    for cy in 0..cells.ncy {
        for cx in 0..cells.ncx {
            let (a, b, c, d) = cells.cell_rect(cx, cy);
            let xc = 0.5 * (a + b);
            let yc = 0.5 * (c + d);
            let i = (((xc - grid.x_min()) / grid.hx() - 0.5).round() as isize)
                .clamp(0, grid.nx() as isize - 1) as usize;
            let j = (((yc - grid.y_min()) / grid.hy() - 0.5).round() as isize)
                .clamp(0, grid.ny() as isize - 1) as usize;
            centers[cy * cells.ncx + cx] = f.get(i, j);
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            let x = grid.x(i);
            let (cx, cy) = cells.cell_of(x, y);
            let phi = cells.phi(cx, cy, x, y);
            let f0 = centers[cy * cells.ncx + cx];
            out.push(phi * f.get(i, j) + (1.0 - phi) * f0);
        }
    }
    ScalarField::from_values(&grid, out)
}

/// `G~ = psi G`: equal to `G` on each Q3, zero outside each Q2 with a
/// full stencil width to spare.
pub fn localize_g(g: &ScalarField, cells: &CellDecomposition) -> Result<ScalarField> {
    check_ring_support(g, cells, "G")?;
    let grid = *g.grid();
    check_resolution(cells, &grid)?;
    let guard = support_guard(&grid);
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            let x = grid.x(i);
            let (cx, cy) = cells.cell_of(x, y);
            let psi = cells.psi(cx, cy, x, y, guard);
            out.push(psi * g.get(i, j));
        }
    }
    ScalarField::from_values(&grid, out)
}

/// Largest oscillation of `f` over a single cell: a sampled stand-in for
/// the modulus of continuity at the cell diameter.
pub fn max_cell_oscillation(f: &ScalarField, cells: &CellDecomposition) -> f64 {
    let grid = f.grid();
    let mut lo = vec![f64::INFINITY; cells.cell_count()];
    let mut hi = vec![f64::NEG_INFINITY; cells.cell_count()];
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            let (cx, cy) = cells.cell_of(grid.x(i), y);
            let k = cy * cells.ncx + cx;
            let v = f.get(i, j);
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    lo.iter()
        .zip(&hi)
        .map(|(a, b)| (b - a).max(0.0))
        .fold(0.0, f64::max)
}

/// One step of the commuting-approximant sequence.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlexReport {
    pub delta: f64,
    pub eps_cell: f64,
    pub q: f64,
    /// `sup |F~ - F|`
    pub sup_dist_f: f64,
    /// sampled modulus of continuity of `F` at the cell diameter
    pub modulus_f: f64,
    /// `|G~ - G|_q`
    pub lq_dist_g: f64,
    /// `sup|G| (Vol(supp cells) eps_cell)^{1/q}`
    pub lq_bound_g: f64,
    /// largest absolute value of the discrete bracket of the outputs
    pub max_bracket: f64,
    /// every node with `G~ != 0` has its four `F~` neighbors equal
    pub stencil_commute: bool,
}

/// Run one `(delta, eps_cell)` step of the construction on a shared grid
/// and measure every quantity of the approximation statement.
pub fn flex_report(
    f: &ScalarField,
    g: &ScalarField,
    delta: f64,
    eps_cell: f64,
    q: Exponent,
) -> Result<FlexReport> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("flex_report".into()));
    }
    let grid = *f.grid();
    if grid.periodic_x() || grid.periodic_y() {
        return Err(Error::InvalidGrid(
            "the cell construction expects a non-periodic grid".into(),
        ));
    }
    let cells = decompose(
        (grid.x_min(), grid.x_max(), grid.y_min(), grid.y_max()),
        delta,
        eps_cell,
    )?;
    check_resolution(&cells, &grid)?;
    let f_flat = flatten_f(f, &cells)?;
    let g_loc = localize_g(g, &cells)?;

    let sup_dist_f = f_flat
        .values()
        .iter()
        .zip(f.values())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    let modulus_f = max_cell_oscillation(f, &cells);

    let qv = q
        .finite_value()
        .ok_or_else(|| Error::param("q", "flex distances need a finite exponent"))?;
    let density = crate::field::SymplecticDensity::uniform();
    let lq_dist_g = lq_distance(&g_loc, g, q, &density)?;
    // Volume of the cells meeting supp G.
    let mut meets = vec![false; cells.cell_count()];
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            if g.get(i, j) != 0.0 {
                let (cx, cy) = cells.cell_of(grid.x(i), y);
                meets[cy * cells.ncx + cx] = true;
            }
        }
    }
    let support_vol =
        meets.iter().filter(|b| **b).count() as f64 * cells.dx * cells.dy;
    let lq_bound_g = g.max_abs() * (support_vol * eps_cell).powf(1.0 / qv);

    let pb = crate::bracket::poisson_bracket(&f_flat, &g_loc, &density)?;
    let max_bracket = lq_norm(&pb, Exponent::Infinity, &density)?;

    let mut stencil_commute = true;
    'outer: for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if g_loc.get(i, j) != 0.0 {
                // The ring check guarantees interior nodes here.
                let c = f_flat.get(i, j);
                if f_flat.get(i - 1, j) != c
                    || f_flat.get(i + 1, j) != c
                    || f_flat.get(i, j - 1) != c
                    || f_flat.get(i, j + 1) != c
                {
                    stencil_commute = false;
                    break 'outer;
                }
            }
        }
    }

    Ok(FlexReport {
        delta: cells.cell_size(),
        eps_cell,
        q: qv,
        sup_dist_f,
        modulus_f,
        lq_dist_g,
        lq_bound_g,
        max_bracket,
        stencil_commute,
    })
}

/// The construction outputs themselves, for callers that want the fields.
pub fn flex_fields(
    f: &ScalarField,
    g: &ScalarField,
    delta: f64,
    eps_cell: f64,
) -> Result<(ScalarField, ScalarField)> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("flex_fields".into()));
    }
    let grid = f.grid();
    let cells = decompose(
        (grid.x_min(), grid.x_max(), grid.y_min(), grid.y_max()),
        delta,
        eps_cell,
    )?;
    check_resolution(&cells, grid)?;
    Ok((flatten_f(f, &cells)?, localize_g(g, &cells)?))
}

/// Compactly supported radial bump `exp(1 - 1/(1 - (r/radius)^2))` of
/// height 1 at the center, used by the experiments and tests as a smooth
/// non-commuting input.
pub fn bump(cx: f64, cy: f64, radius: f64) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    move |x: f64, y: f64| {
        let u = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
        if u >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u)).exp()
        }
    }
}
