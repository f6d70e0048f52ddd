use std::io::{self, BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Dense table of real values on a [`Grid2D`], row-major (one grid row per
/// chunk of `nx` values). Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    /// Sample `f` at every cell center.
    pub fn sample(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y(j);
            for i in 0..grid.nx() {
                let x = grid.x(i);
                let v = f(x, y);
                if !v.is_finite() {
                    return Err(Error::NonFiniteSample {
                        i,
                        j,
                        x,
                        y,
                        value: v,
                    });
                }
                values.push(v);
            }
        }
        Ok(ScalarField {
            grid: *grid,
            values,
        })
    }

    pub fn from_values(grid: &Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() {
                let (i, j) = grid.node(k);
                return Err(Error::NonFiniteSample {
                    i,
                    j,
                    x: grid.x(i),
                    y: grid.y(j),
                    value: *v,
                });
            }
        }
        Ok(ScalarField {
            grid: *grid,
            values,
        })
    }

    pub fn constant(grid: &Grid2D, c: f64) -> Result<Self> {
        Self::from_values(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        ScalarField {
            grid: *grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_values(&self.grid, self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        self.map(|v| a * v)
    }

    fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("field arithmetic".into()));
        }
        Self::from_values(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        )
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    /// Dump in the field CSV format: a header line
    /// `nx,ny,x_min,x_max,y_min,y_max,periodic_x,periodic_y`, then the
    /// values row-major, one grid row per line. Booleans are written as
    /// `0`/`1`; values round-trip exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let g = &self.grid;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            g.nx(),
            g.ny(),
            g.x_min(),
            g.x_max(),
            g.y_min(),
            g.y_max(),
            g.periodic_x() as u8,
            g.periodic_y() as u8
        )?;
        for j in 0..g.ny() {
            let row = &self.values[j * g.nx()..(j + 1) * g.nx()];
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidGrid("empty field dump".into()))?
            .map_err(|e| Error::InvalidGrid(format!("io error: {e}")))?;
        let parts: Vec<&str> = header.trim().split(',').collect();
        if parts.len() != 8 {
            return Err(Error::InvalidGrid(format!(
                "field dump header must have 8 entries, got {}",
                parts.len()
            )));
        }
        let parse_f = |s: &str, name: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::InvalidGrid(format!("bad {name} in header: {s:?}")))
        };
        let parse_n = |s: &str, name: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::InvalidGrid(format!("bad {name} in header: {s:?}")))
        };
        let nx = parse_n(parts[0], "nx")?;
        let ny = parse_n(parts[1], "ny")?;
        let grid = Grid2D::new(
            parse_f(parts[2], "x_min")?,
            parse_f(parts[3], "x_max")?,
            parse_f(parts[4], "y_min")?,
            parse_f(parts[5], "y_max")?,
            nx,
            ny,
            parts[6].trim() == "1",
            parts[7].trim() == "1",
        )?;
        let mut values = Vec::with_capacity(grid.len());
        for line in lines {
            let line = line.map_err(|e| Error::InvalidGrid(format!("io error: {e}")))?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.trim().split(',') {
                values.push(parse_f(tok, "value")?);
            }
        }
        Self::from_values(&grid, values)
    }
}

/// Positive weight `w(x, y)` defining the area form `w dx dy`.
#[derive(Clone)]
pub struct SymplecticDensity {
    weight: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    uniform: bool,
}

impl SymplecticDensity {
    /// Constant weight 1 (the default on all flat model domains).
    pub fn uniform() -> Self {
        SymplecticDensity {
            weight: Arc::new(|_, _| 1.0),
            uniform: true,
        }
    }

    pub fn from_fn(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        SymplecticDensity {
            weight: Arc::new(f),
            uniform: false,
        }
    }

    pub fn weight_at(&self, x: f64, y: f64) -> f64 {
        (self.weight)(x, y)
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// Sample onto a grid, rejecting non-positive or non-finite weights.
    pub fn sample(&self, grid: &Grid2D) -> Result<ScalarField> {
        let field = ScalarField::sample(grid, |x, y| self.weight_at(x, y))?;
        if let Some(k) = field.values().iter().position(|w| *w <= 0.0) {
            let (i, j) = grid.node(k);
            return Err(Error::InvalidParameter {
                name: "weight".into(),
                reason: format!(
                    "must be positive everywhere, got {} at node ({i}, {j})",
                    field.values()[k]
                ),
            });
        }
        Ok(field)
    }
}

impl Default for SymplecticDensity {
    fn default() -> Self {
        Self::uniform()
    }
}

impl std::fmt::Debug for SymplecticDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymplecticDensity")
            .field("uniform", &self.uniform)
            .finish()
    }
}
