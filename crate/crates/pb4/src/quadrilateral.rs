//! The four-sides invariant of the rectangle-in-rectangle model
//! `Pi = [0, A] x [0, 1]` inside a larger rectangle of area `B`: exact
//! closed-form values, explicit admissible pairs built from tensor
//! products of 1D profiles, upper-bound convergence tables, and the
//! Stokes/Hoelder lower-bound certificates.
//!
//! The pair construction keeps the requested margin `eps` for the ramp
//! slopes but widens every transverse transition to a few grid cells, so
//! that the discrete bracket of the sampled pair factors exactly as
//! `-u1'(x) v1(y)` at every node. Without that widening, sub-grid
//! transitions of the transverse profiles leak through the difference
//! stencils and pollute the measured norms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::poisson_bracket;
use crate::error::{Error, Result};
use crate::exponent::{qth_root, Exponent};
use crate::field::{ScalarField, SymplecticDensity};
use crate::grid::{Grid2D, Mask};
use crate::profile::Profile1D;
use crate::quadrature::{integrate, lq_norm, lq_power_integral};

/// A positive area, possibly infinite. Infinite areas are never
/// discretized; they only select formula branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Area {
    Finite(f64),
    Infinite,
}

impl Area {
    pub const INF: Area = Area::Infinite;

    pub fn finite(v: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(
                "area",
                format!("must be positive and finite, got {v}"),
            ));
        }
        Ok(Area::Finite(v))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Area::Infinite)
    }

    pub fn finite_value(self) -> Option<f64> {
        match self {
            Area::Finite(v) => Some(v),
            Area::Infinite => None,
        }
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Area::Finite(v) => write!(f, "{v}"),
            Area::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Area {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Area::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::param("area", format!("cannot parse {t:?}")))?;
        Area::finite(v)
    }
}

impl Serialize for Area {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Area::Finite(v) => s.serialize_f64(*v),
            Area::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Area {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => {
                Area::finite(n.as_f64().unwrap_or(f64::NAN)).map_err(D::Error::custom)
            }
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            other => Err(D::Error::custom(format!("bad area value: {other}"))),
        }
    }
}

/// Whether a formula value is exact or only a certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundStatus {
    Exact,
    LowerBoundOnly,
}

/// Closed-form value of the invariant for the quadrilateral of area `a`
/// inside a surface of area `b`.
///
/// For finite `q` the value is exact:
/// `(1/a^{q-1} + 1/(b-a)^{q-1})^{1/q}` (second term dropped when `b` is
/// infinite and `q > 1`), in particular 2 when `q = 1`. For `q = inf`
/// only the lower bound `max(1/a, 1/(b-a))` is certified, and the status
/// says so.
pub fn pb4_formula(a: f64, b: Area, q: Exponent) -> Result<(f64, BoundStatus)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::param("A", format!("must be positive, got {a}")));
    }
    if let Area::Finite(b) = b {
        if a >= b {
            return Err(Error::param(
                "A",
                format!("inner area {a} must be smaller than total area {b}"),
            ));
        }
    }
    match q {
        Exponent::Finite(q) => {
            let value = match b {
                Area::Finite(b) => {
                    let s = a.powf(1.0 - q) + (b - a).powf(1.0 - q);
                    qth_root(s, q)
                }
                Area::Infinite => {
                    if q == 1.0 {
                        2.0
                    } else {
                        qth_root(a.powf(1.0 - q), q)
                    }
                }
            };
            Ok((value, BoundStatus::Exact))
        }
        Exponent::Infinity => {
            let value = match b {
                Area::Finite(b) => (1.0 / a).max(1.0 / (b - a)),
                Area::Infinite => 1.0 / a,
            };
            Ok((value, BoundStatus::LowerBoundOnly))
        }
    }
}

/// Instance of the rectangle-in-rectangle construction: inner area `a`,
/// total area `b` (possibly infinite), exponent `q`, margin `eps`, outer
/// construction width `c` with `a < c < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadProblem {
    pub a: f64,
    pub b: Area,
    pub q: Exponent,
    pub eps: f64,
    pub c: f64,
}

impl QuadProblem {
    pub fn new(a: f64, b: Area, q: Exponent, eps: f64, c: f64) -> Result<Self> {
        let p = QuadProblem { a, b, q, eps, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::param("A", "must be positive and finite"));
        }
        if !(self.c > self.a) {
            return Err(Error::param(
                "C",
                format!("must exceed A = {}, got {}", self.a, self.c),
            ));
        }
        if let Area::Finite(b) = self.b {
            if !(self.c < b) {
                return Err(Error::param(
                    "C",
                    format!("must stay below B = {b}, got {}", self.c),
                ));
            }
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::param("eps", "must be positive"));
        }
        if 8.0 * self.eps >= self.a.min(self.c - self.a) {
            return Err(Error::param(
                "eps",
                format!(
                    "must satisfy 8 eps < min(A, C - A) = {}",
                    self.a.min(self.c - self.a)
                ),
            ));
        }
        Ok(())
    }
}

/// Node-level admissibility measurements for a pair, with the tolerance
/// that was applied.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// max |F| over the X0 strip (exact zero for built pairs)
    pub f_on_x0: f64,
    /// max |F - 1| over the X1 strip (exact zero for built pairs)
    pub f_on_x1: f64,
    /// max |G| over the Y0 strip
    pub g_on_y0: f64,
    /// max |G - 1| over the Y1 strip
    pub g_on_y1: f64,
    /// how far F or G leave [0, 1]
    pub range_excess: f64,
    /// tolerance used for the flag
    pub tol: f64,
    pub admissible: bool,
}

/// A pair of fields satisfying the restricted boundary class for the four
/// sides of the model quadrilateral (exact 0/1 plateaus for `F`, values
/// within the construction tolerance for `G`), together with the side
/// strip masks and the region mask of the quadrilateral itself.
#[derive(Clone)]
pub struct AdmissiblePair {
    f: ScalarField,
    g: ScalarField,
    f_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    g_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    x0: Mask,
    x1: Mask,
    y0: Mask,
    y1: Mask,
    region: Mask,
    report: AdmissibilityReport,
}

impl AdmissiblePair {
    /// Assemble a pair from closures and masks, computing the
    /// admissibility report at the given tolerance.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        grid: &Grid2D,
        f_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
        g_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
        x0: Mask,
        x1: Mask,
        y0: Mask,
        y1: Mask,
        region: Mask,
        tol: f64,
    ) -> Result<Self> {
        let f = ScalarField::sample(grid, |x, y| f_fn(x, y))?;
        let g = ScalarField::sample(grid, |x, y| g_fn(x, y))?;
        let report = admissibility_report(&f, &g, &x0, &x1, &y0, &y1, tol);
        Ok(AdmissiblePair {
            f,
            g,
            f_fn,
            g_fn,
            x0,
            x1,
            y0,
            y1,
            region,
            report,
        })
    }

    pub fn f(&self) -> &ScalarField {
        &self.f
    }

    pub fn g(&self) -> &ScalarField {
        &self.g
    }

    pub fn grid(&self) -> &Grid2D {
        self.f.grid()
    }

    pub fn f_at(&self, x: f64, y: f64) -> f64 {
        (self.f_fn)(x, y)
    }

    pub fn g_at(&self, x: f64, y: f64) -> f64 {
        (self.g_fn)(x, y)
    }

    pub fn f_fn(&self) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
        Arc::clone(&self.f_fn)
    }

    pub fn g_fn(&self) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
        Arc::clone(&self.g_fn)
    }

    pub fn x0(&self) -> &Mask {
        &self.x0
    }

    pub fn x1(&self) -> &Mask {
        &self.x1
    }

    pub fn y0(&self) -> &Mask {
        &self.y0
    }

    pub fn y1(&self) -> &Mask {
        &self.y1
    }

    /// Mask of the distinguished region (the quadrilateral, or the inner
    /// component for curve models).
    pub fn region(&self) -> &Mask {
        &self.region
    }

    pub fn admissibility(&self) -> &AdmissibilityReport {
        &self.report
    }

    pub fn is_admissible(&self) -> bool {
        self.report.admissible
    }

    /// Same pair with replaced field values; the admissibility report is
    /// re-derived (useful after perturbing the fields).
    pub fn with_fields(&self, f: ScalarField, g: ScalarField) -> Result<Self> {
        if f.grid() != self.f.grid() || g.grid() != self.g.grid() {
            return Err(Error::GridMismatch("with_fields".into()));
        }
        let report = admissibility_report(
            &f,
            &g,
            &self.x0,
            &self.x1,
            &self.y0,
            &self.y1,
            self.report.tol,
        );
        Ok(AdmissiblePair {
            f,
            g,
            f_fn: Arc::clone(&self.f_fn),
            g_fn: Arc::clone(&self.g_fn),
            x0: self.x0.clone(),
            x1: self.x1.clone(),
            y0: self.y0.clone(),
            y1: self.y1.clone(),
            region: self.region.clone(),
            report,
        })
    }
}

impl fmt::Debug for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AdmissiblePair")
            .field("grid", self.f.grid())
            .field("report", &self.report)
            .finish()
    }
}

fn admissibility_report(
    f: &ScalarField,
    g: &ScalarField,
    x0: &Mask,
    x1: &Mask,
    y0: &Mask,
    y1: &Mask,
    tol: f64,
) -> AdmissibilityReport {
    let max_over = |field: &ScalarField, mask: &Mask, map: &dyn Fn(f64) -> f64| -> f64 {
        let mut m: f64 = 0.0;
        for (k, inside) in mask.iter().enumerate() {
            if inside {
                m = m.max(map(field.values()[k]));
            }
        }
        m
    };
    let f_on_x0 = max_over(f, x0, &|v| v.abs());
    let f_on_x1 = max_over(f, x1, &|v| (v - 1.0).abs());
    let g_on_y0 = max_over(g, y0, &|v| v.abs());
    let g_on_y1 = max_over(g, y1, &|v| (v - 1.0).abs());
    let range = |field: &ScalarField| -> f64 {
        field
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max(-*v).max(*v - 1.0))
    };
    let range_excess = range(f).max(range(g)).max(0.0);
    let admissible = f_on_x0 <= tol
        && f_on_x1 <= tol
        && g_on_y0 <= tol
        && g_on_y1 <= tol
        && range_excess <= tol
        && x0.count() > 0
        && x1.count() > 0
        && y0.count() > 0
        && y1.count() > 0;
    AdmissibilityReport {
        f_on_x0,
        f_on_x1,
        g_on_y0,
        g_on_y1,
        range_excess,
        tol,
        admissible,
    }
}

/// Grid-adapted construction scales shared by `build_pair` and the curve
/// transplant.
pub(crate) struct BuildScales {
    /// effective x margin controlling the ramp connector zones
    pub ex: f64,
    /// effective y margin of the transverse cutoff
    pub ey: f64,
    /// half-width of the affine overshoot of the `v2` profile
    pub mv: f64,
}

impl BuildScales {
    pub fn for_grid(eps: f64, grid: &Grid2D) -> Self {
        let ex = eps + 2.5 * grid.hx();
        let ey = eps + 2.5 * grid.hy();
        let mv = ey + 2.5 * grid.hy();
        BuildScales { ex, ey, mv }
    }
}

/// The ramp profile used on sampled grids: the requested `eps`-scale
/// geometry widened to `ex`, with a genuine peak plateau so that an
/// entire strip of nodes carries the exact value 1.
pub(crate) fn grid_ramp(a: f64, c: f64, ex: f64) -> Result<Profile1D> {
    let d0 = 0.8 * ex;
    let p = 0.8 * ex;
    let lvl = ex.min(0.45);
    let anchors = vec![
        (d0, 0.0),
        (2.0 * ex, lvl),
        (a - 2.0 * ex, 1.0 - lvl),
        (a - p, 1.0),
        (a + p, 1.0),
        (a + 2.0 * ex, 1.0 - lvl),
        (c - 2.0 * ex, lvl),
        (c - d0, 0.0),
    ];
    Profile1D::mollified(anchors, 0.25 * ex)
}

/// Transverse plateau: exactly 1 on `[0, len]`, supported in
/// `(-ey, len + ey)`.
pub(crate) fn plateau_profile(len: f64, ey: f64) -> Result<Profile1D> {
    let w = 0.25 * ey;
    Profile1D::mollified(
        vec![
            (-ey + w, 0.0),
            (crate::profile::nudge_down_until(-w, w, 0.0), 1.0),
            (crate::profile::nudge_up_until(len + w, w, len), 1.0),
            (len + ey - w, 0.0),
        ],
        w,
    )
}

/// The near-identity profile `v2`: exactly `y` on `[-mv, 1 + mv]`, clamped
/// to plateaus just outside and closed off to zero by steep ends. The
/// steep parts sit far enough from the support of `v1` that they never
/// meet a difference stencil against a nonzero factor.
fn affine_overshoot_profile(mv: f64, gg: f64) -> Result<Profile1D> {
    let w = (0.5 * gg).min(0.25 * mv);
    let anchors = vec![
        (-mv - 2.0 * gg, 0.0),
        (-mv - gg, -mv),
        (-mv, -mv),
        (1.0 + mv, 1.0 + mv),
        (1.0 + mv + gg, 1.0 + mv),
        (1.0 + mv + 2.0 * gg, 0.0),
    ];
    Profile1D::mollified(anchors, w)
}

/// Explicit admissible pair for the problem on the given grid.
///
/// `F(x, y) = u1(x) v1(y)` and `G(x, y) = u2(x) v2(y)` with the profile
/// supports separated by whole stencil widths, so the sampled bracket is
/// exactly `-u1'(x) v1(y)` node by node.
pub fn build_pair(problem: &QuadProblem, grid: &Grid2D) -> Result<AdmissiblePair> {
    problem.validate()?;
    if grid.periodic_x() || grid.periodic_y() {
        return Err(Error::InvalidGrid(
            "the rectangle model needs a non-periodic grid".into(),
        ));
    }
    let (a, c, eps) = (problem.a, problem.c, problem.eps);
    let hx = grid.hx();
    let hy = grid.hy();
    let scales = BuildScales::for_grid(eps, grid);
    let (ex, ey, mv) = (scales.ex, scales.ey, scales.mv);
    if 8.0 * ex >= a.min(c - a) {
        return Err(Error::GridTooCoarse(format!(
            "effective margin {ex} too large for A = {a}, C - A = {}; refine the grid or shrink eps",
            c - a
        )));
    }
    let gg = 3.0 * hy;
    let x_lo_needed = -3.5 * hx;
    let x_hi_needed = c + 3.5 * hx;
    let y_lo_needed = -mv - 2.0 * gg - hy;
    let y_hi_needed = 1.0 + mv + 2.0 * gg + hy;
    if grid.x_min() > x_lo_needed
        || grid.x_max() < x_hi_needed
        || grid.y_min() > y_lo_needed
        || grid.y_max() < y_hi_needed
    {
        return Err(Error::GridTooCoarse(format!(
            "grid domain [{}, {}] x [{}, {}] does not contain the construction support \
             [{x_lo_needed}, {x_hi_needed}] x [{y_lo_needed}, {y_hi_needed}]",
            grid.x_min(),
            grid.x_max(),
            grid.y_min(),
            grid.y_max()
        )));
    }

    let u1 = grid_ramp(a, c, ex)?;
    let v1 = plateau_profile(1.0, ey)?;
    // u2 is 1 on [-mu, c + mu] and dies over one further cell on each side,
    // keeping its variation a full stencil away from the support of u1.
    let mu = 1.5 * hx;
    let cw = hx;
    let wu = 0.25 * cw;
    let u2 = Profile1D::mollified(
        vec![
            (-mu - cw + wu, 0.0),
            (-mu - wu, 1.0),
            (c + mu + wu, 1.0),
            (c + mu + cw - wu, 0.0),
        ],
        wu,
    )?;
    let v2 = affine_overshoot_profile(mv, gg)?;

    let f_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> = {
        let (u, v) = (u1, v1);
        Arc::new(move |x, y| u.eval(x) * v.eval(y))
    };
    let g_fn: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> = {
        let (u, v) = (u2, v2);
        Arc::new(move |x, y| u.eval(x) * v.eval(y))
    };

    let sx = 0.45 * ex;
    let sy = 0.45 * ey;
    let x0 = Mask::from_fn(grid, |x, y| x.abs() <= sx && (-sy..=1.0 + sy).contains(&y));
    let x1 = Mask::from_fn(grid, |x, y| {
        (x - a).abs() <= sx && (0.0..=1.0).contains(&y)
    });
    let y0 = Mask::from_fn(grid, |x, y| y.abs() <= sy && (0.0..=a).contains(&x));
    let y1 = Mask::from_fn(grid, |x, y| {
        (y - 1.0).abs() <= sy && (0.0..=a).contains(&x)
    });
    let region = Mask::from_fn(grid, |x, y| {
        (0.0..=a).contains(&x) && (0.0..=1.0).contains(&y)
    });
    let tol = 1.05 * mv.max(0.45 * ex);
    AdmissiblePair::assemble(grid, f_fn, g_fn, x0, x1, y0, y1, region, tol)
}

/// One row of an upper-bound convergence table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UpperRow {
    pub eps: f64,
    pub c: f64,
    pub norm: f64,
    pub formula: f64,
    pub ratio: f64,
}

/// Grid used for convergence runs: `n x n` nodes on
/// `[-0.1, c_max + 0.1] x [-0.5, 1.5]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridPolicy {
    pub n: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy { n: 512 }
    }
}

impl GridPolicy {
    pub fn grid_for(&self, c_max: f64) -> Result<Grid2D> {
        Grid2D::new(-0.1, c_max + 0.1, -0.5, 1.5, self.n, self.n, false, false)
    }
}

/// Measure the bracket norm of the built pair at each `(eps, C)` of the
/// schedules and compare with the closed form. Ratios decrease toward 1
/// as `eps` shrinks and `C` approaches `B`.
pub fn verify_upper(
    a: f64,
    b: Area,
    q: f64,
    eps_schedule: &[f64],
    c_schedule: &[f64],
    policy: &GridPolicy,
) -> Result<Vec<UpperRow>> {
    if eps_schedule.is_empty() || eps_schedule.len() != c_schedule.len() {
        return Err(Error::param(
            "eps_schedule",
            "eps and C schedules must be nonempty and of equal length",
        ));
    }
    let qx = Exponent::finite(q)?;
    let (formula, _) = pb4_formula(a, b, qx)?;
    let c_max = c_schedule.iter().cloned().fold(f64::NAN, f64::max);
    let grid = policy.grid_for(c_max)?;
    let density = SymplecticDensity::uniform();
    eps_schedule
        .par_iter()
        .zip(c_schedule.par_iter())
        .map(|(&eps, &c)| {
            let problem = QuadProblem::new(a, b, qx, eps, c)?;
            let pair = build_pair(&problem, &grid)?;
            let pb = poisson_bracket(pair.f(), pair.g(), &density)?;
            let norm = lq_norm(&pb, qx, &density)?;
            Ok(UpperRow {
                eps,
                c,
                norm,
                formula,
                ratio: norm / formula,
            })
        })
        .collect()
}

/// True if the ratio column strictly decreases along the table.
pub fn ratios_decreasing(rows: &[UpperRow]) -> bool {
    rows.windows(2).all(|w| w[1].ratio < w[0].ratio)
}

/// Signed and absolute integrals of the bracket over a region.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StokesRecord {
    pub signed_integral: f64,
    pub abs_integral: f64,
}

/// Integrate `{F, G}` over the region (the quadrilateral or its
/// complement). For admissible pairs the signed integral is within
/// discretization error of -1 on the quadrilateral and +1 on the
/// complement, and the absolute integral dominates it.
pub fn stokes_defect(
    pair: &AdmissiblePair,
    region: &Mask,
    density: &SymplecticDensity,
) -> Result<StokesRecord> {
    let pb = poisson_bracket(pair.f(), pair.g(), density)?;
    let signed_integral = integrate(&pb, region, density)?;
    let abs_integral = integrate(&pb.map(f64::abs)?, region, density)?;
    Ok(StokesRecord {
        signed_integral,
        abs_integral,
    })
}

/// Outcome of the lower-bound certificate for a pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LowerCertificate {
    pub q: f64,
    /// `∫_Pi |{F,G}|^q w`
    pub region_integral: f64,
    /// `∫_{M \ Pi} |{F,G}|^q w`
    pub complement_integral: f64,
    /// `1 / A^{q-1}`
    pub region_bound: f64,
    /// `1 / (B-A)^{q-1}` (0 when `B` is infinite and `q > 1`)
    pub complement_bound: f64,
    pub total_norm: f64,
    pub formula: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Check the Hoelder/Stokes lower bounds on both sides of the region and
/// on the total norm, at a 3% discretization tolerance.
pub fn verify_lower(
    pair: &AdmissiblePair,
    q: f64,
    a: f64,
    b: Area,
    density: &SymplecticDensity,
) -> Result<LowerCertificate> {
    let qx = Exponent::finite(q)?;
    let (formula, _) = pb4_formula(a, b, qx)?;
    let pb = poisson_bracket(pair.f(), pair.g(), density)?;
    let region = pair.region();
    let complement = region.complement();
    let region_integral = lq_power_integral(&pb, region, q, density)?;
    let complement_integral = lq_power_integral(&pb, &complement, q, density)?;
    let total_norm = lq_norm(&pb, qx, density)?;
    let region_bound = a.powf(1.0 - q);
    let complement_bound = match b {
        Area::Finite(b) => (b - a).powf(1.0 - q),
        Area::Infinite => {
            if q == 1.0 {
                1.0
            } else {
                0.0
            }
        }
    };
    let tol = 0.03;
    let passed = region_integral >= (1.0 - tol) * region_bound
        && complement_integral >= (1.0 - tol) * complement_bound
        && total_norm >= (1.0 - tol) * formula;
    Ok(LowerCertificate {
        q,
        region_integral,
        complement_integral,
        region_bound,
        complement_bound,
        total_norm,
        formula,
        tol,
        passed,
    })
}
