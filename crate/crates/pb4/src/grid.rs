use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangular sampling grid with optional periodic axes.
///
/// Samples live at cell centers: `x_i = x_min + (i + 1/2) hx`. On a
/// periodic axis the coordinate `c` is identified with `c + (max - min)`,
/// so the neighbor of the last cell wraps to the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    nx: usize,
    ny: usize,
    periodic_x: bool,
    periodic_y: bool,
}

impl Grid2D {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        nx: usize,
        ny: usize,
        periodic_x: bool,
        periodic_y: bool,
    ) -> Result<Self> {
        for (name, v) in [
            ("x_min", x_min),
            ("x_max", x_max),
            ("y_min", y_min),
            ("y_max", y_max),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidGrid(format!("{name} = {v} is not finite")));
            }
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "degenerate x bounds [{x_min}, {x_max}]"
            )));
        }
        if y_min >= y_max {
            return Err(Error::InvalidGrid(format!(
                "degenerate y bounds [{y_min}, {y_max}]"
            )));
        }
        if nx < 4 || ny < 4 {
            return Err(Error::InvalidGrid(format!(
                "sample counts must be >= 4, got nx = {nx}, ny = {ny}"
            )));
        }
        Ok(Grid2D {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            periodic_x,
            periodic_y,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn periodic_x(&self) -> bool {
        self.periodic_x
    }

    pub fn periodic_y(&self) -> bool {
        self.periodic_y
    }

    pub fn hx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    /// Area element of one cell.
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// x coordinate of column `i` (cell center).
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.hx()
    }

    /// y coordinate of row `j` (cell center).
    pub fn y(&self, j: usize) -> f64 {
        self.y_min + (j as f64 + 0.5) * self.hy()
    }

    /// Row-major flat index of node `(i, j)`.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Inverse of [`Grid2D::idx`].
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }
}

/// Boolean node set on a grid, used to restrict integrals to a region.
#[derive(Debug, Clone)]
pub struct Mask {
    grid: Grid2D,
    inside: Vec<bool>,
}

impl Mask {
    pub fn from_fn(grid: &Grid2D, pred: impl Fn(f64, f64) -> bool) -> Self {
        let mut inside = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y(j);
            for i in 0..grid.nx() {
                inside.push(pred(grid.x(i), y));
            }
        }
        Mask {
            grid: *grid,
            inside,
        }
    }

    pub fn full(grid: &Grid2D) -> Self {
        Mask {
            grid: *grid,
            inside: vec![true; grid.len()],
        }
    }

    pub fn complement(&self) -> Self {
        Mask {
            grid: self.grid,
            inside: self.inside.iter().map(|b| !b).collect(),
        }
    }

    pub fn intersect(&self, other: &Mask) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("mask intersection".into()));
        }
        Ok(Mask {
            grid: self.grid,
            inside: self
                .inside
                .iter()
                .zip(&other.inside)
                .map(|(a, b)| *a && *b)
                .collect(),
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn contains(&self, k: usize) -> bool {
        self.inside[k]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|b| **b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.inside.iter().copied()
    }

    /// True if no node of `self` lies in `other`.
    pub fn disjoint(&self, other: &Mask) -> bool {
        self.inside
            .iter()
            .zip(&other.inside)
            .all(|(a, b)| !(*a && *b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_spacing() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 4, false, false).unwrap();
        assert_eq!(g.hx(), 0.25);
        assert_eq!(g.hy(), 0.25);
        assert_eq!(g.x(0), 0.125);
        assert_eq!(g.y(3), 0.875);
    }

    #[test]
    fn rectangular_periodic() {
        let g = Grid2D::new(0.0, 2.0, 0.0, 1.0, 8, 4, false, true).unwrap();
        assert_eq!(g.hx(), 0.25);
        assert_eq!(g.hy(), 0.25);
        assert!(g.periodic_y());
        assert!(!g.periodic_x());
    }

    #[test]
    fn rejects_degenerate_bounds_and_counts() {
        assert!(Grid2D::new(0.0, 1.0, 0.0, 0.0, 4, 4, false, false).is_err());
        assert!(Grid2D::new(1.0, 0.0, 0.0, 1.0, 4, 4, false, false).is_err());
        assert!(Grid2D::new(0.0, 1.0, 0.0, 1.0, 2, 4, false, false).is_err());
        assert!(Grid2D::new(0.0, f64::NAN, 0.0, 1.0, 4, 4, false, false).is_err());
    }

    #[test]
    fn mask_complement_partitions_grid() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 8, false, false).unwrap();
        let left = Mask::from_fn(&g, |x, _| x < 0.5);
        let right = left.complement();
        assert_eq!(left.count() + right.count(), g.len());
        assert!(left.disjoint(&right));
    }
}
