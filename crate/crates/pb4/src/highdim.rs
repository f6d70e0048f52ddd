//! The multidimensional vanishing mechanism in the single-chart model
//! `X1 = [0, b]^d x {0}` inside `R^{2n}`: a function of the distance `r`
//! to the tangential plane built from the radial fast-decay family, whose
//! gradient L_q mass over the chart box factorizes as
//! `b^d * C_m * ∫ |g'(r)|^q r^{m-1} dr` with `m = 2n - d`, plus the
//! hypersurface product bound showing the codimension condition is sharp.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{weighted_radial_moment, Profile1D};

/// Parameters of the vanishing construction. The codimension
/// `m = 2n - d` must be at least 2 and the exponent must satisfy
/// `1 <= q <= m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighDimSpec {
    /// half the ambient dimension, `n >= 2`
    pub n: u32,
    /// dimension of the tangential box, `0 <= d <= 2n - 2`
    pub d: u32,
    /// integrability exponent, `1 <= q <= 2n - d`
    pub q: f64,
    /// tangential extent of the chart box
    pub b: f64,
    /// decay exponent in `(0, 1]`
    pub alpha: f64,
    /// radial support bound of the tube
    pub delta_prime: f64,
}

impl HighDimSpec {
    pub fn new(n: u32, d: u32, q: f64, b: f64, alpha: f64, delta_prime: f64) -> Result<Self> {
        let spec = HighDimSpec {
            n,
            d,
            q,
            b,
            alpha,
            delta_prime,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n", "must be at least 2"));
        }
        if self.d + 2 > 2 * self.n {
            return Err(Error::param(
                "d",
                format!("must satisfy d <= 2n - 2 = {}", 2 * self.n - 2),
            ));
        }
        let m = self.codimension();
        if !(self.q >= 1.0 && self.q <= m as f64) {
            return Err(Error::param(
                "q",
                format!("must satisfy 1 <= q <= 2n - d = {m}, got {}", self.q),
            ));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::param("b", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param("alpha", "must lie in (0, 1]"));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime.is_finite()) {
            return Err(Error::param("delta_prime", "must be positive"));
        }
        Ok(())
    }

    /// `m = 2n - d`, the dimension of the transverse fiber.
    pub fn codimension(&self) -> u32 {
        2 * self.n - self.d
    }
}

/// Volume of the unit sphere `S^{m-1}`, `2 pi^{m/2} / Gamma(m/2)`.
pub fn unit_sphere_volume(m: u32) -> f64 {
    use std::f64::consts::PI;
    // Gamma(m/2) for the half-integer ladder.
    let gamma_half = |m: u32| -> f64 {
        let mut x = m as f64 / 2.0;
        let mut acc = 1.0;
        while x > 1.0 + 1e-9 {
            x -= 1.0;
            acc *= x;
        }
        if (x - 1.0).abs() < 1e-9 {
            acc
        } else {
            // x = 1/2
            acc * PI.sqrt()
        }
    };
    2.0 * PI.powf(m as f64 / 2.0) / gamma_half(m)
}

/// Construction descriptor: the chart box `[0, b]^d` and the radial
/// profile `r -> h_alpha(r / delta')`, which is 1 on the tangential plane
/// and vanishes outside the tube `r < 2^{-1/alpha} delta'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingProfile {
    pub spec: HighDimSpec,
    /// unscaled decay profile `h_alpha`; radii are divided by `delta'`
    radial: Profile1D,
}

impl VanishingProfile {
    /// Value of the construction at distance `r` from the tangential
    /// plane.
    pub fn value(&self, r: f64) -> f64 {
        self.radial.eval(r / self.spec.delta_prime)
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        self.radial.deriv(r / self.spec.delta_prime) / self.spec.delta_prime
    }

    /// Outer radius of the tube carrying the construction,
    /// `2^{-1/alpha} delta'`.
    pub fn tube_radius(&self) -> f64 {
        let (_, hi) = self.radial.support();
        hi * self.spec.delta_prime
    }

    pub fn radial_profile(&self) -> &Profile1D {
        &self.radial
    }
}

/// Build the radial construction for the spec from the default bump.
pub fn vanishing_profile(spec: &HighDimSpec) -> Result<VanishingProfile> {
    vanishing_profile_with_base(spec, &Profile1D::default_bump())
}

/// Same as [`vanishing_profile`] with a caller-supplied base bump.
pub fn vanishing_profile_with_base(
    spec: &HighDimSpec,
    base: &Profile1D,
) -> Result<VanishingProfile> {
    spec.validate()?;
    let radial = Profile1D::radial_decay(spec.alpha, base)?;
    Ok(VanishingProfile {
        spec: *spec,
        radial,
    })
}

/// `∫_P |grad F|^q dVol = b^d * C_m * delta'^{m-q} * ∫ |h_alpha'|^q r^{m-1} dr`
/// over the chart box times the transverse fiber.
pub fn grad_lq_estimate(profile: &VanishingProfile, q: f64) -> Result<f64> {
    let spec = &profile.spec;
    let m = spec.codimension();
    if !(q >= 1.0 && q <= m as f64) {
        return Err(Error::param(
            "q",
            format!("must satisfy 1 <= q <= {m}, got {q}"),
        ));
    }
    let moment = weighted_radial_moment(&profile.radial, q, m, true)?;
    let scale = spec.delta_prime.powf(m as f64 - q);
    Ok(spec.b.powi(spec.d as i32) * unit_sphere_volume(m) * scale * moment)
}

/// `∫_P |F|^q dVol = b^d * C_m * delta'^m * ∫ |h_alpha|^q r^{m-1} dr`.
pub fn field_lq_estimate(profile: &VanishingProfile, q: f64) -> Result<f64> {
    let spec = &profile.spec;
    let m = spec.codimension();
    let moment = weighted_radial_moment(&profile.radial, q, m, false)?;
    let scale = spec.delta_prime.powi(m as i32);
    Ok(spec.b.powi(spec.d as i32) * unit_sphere_volume(m) * scale * moment)
}

/// One row of the decay table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayRow {
    pub alpha: f64,
    /// `∫ |grad F|^q dVol` over the chart
    pub grad_lq_q: f64,
    /// `∫ |F|^q dVol` over the chart
    pub field_lq_q: f64,
}

/// Gradient and field L_q masses along a decreasing schedule of decay
/// exponents; both columns decrease strictly for `1 <= q <= m`.
pub fn decay_curve(spec: &HighDimSpec, alpha_list: &[f64]) -> Result<Vec<DecayRow>> {
    if alpha_list.is_empty() {
        return Err(Error::param("alpha_list", "must be nonempty"));
    }
    if alpha_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("alpha_list", "must be strictly decreasing"));
    }
    alpha_list
        .par_iter()
        .map(|&alpha| {
            let row_spec = HighDimSpec { alpha, ..*spec };
            let profile = vanishing_profile(&row_spec)?;
            Ok(DecayRow {
                alpha,
                grad_lq_q: grad_lq_estimate(&profile, spec.q)?,
                field_lq_q: field_lq_estimate(&profile, spec.q)?,
            })
        })
        .collect()
}

/// Upper-bound control of the bracket norm: largest Hamiltonian speed of
/// the partner function times the gradient mass of the construction.
/// Linear in both factors and driven to zero by the decay schedule.
pub fn bracket_bound(profile: &VanishingProfile, g_lipschitz: f64, q: f64) -> Result<f64> {
    if !(g_lipschitz >= 0.0) {
        return Err(Error::param("g_lipschitz", "must be nonnegative"));
    }
    Ok(g_lipschitz * grad_lq_estimate(profile, q)?)
}

/// The hypersurface (d = 2n - 1) obstruction value: crossing the model
/// quadruple with a closed factor of volume `vol_n` keeps
/// `pb_4^{q=1} >= 2 vol_n / n`, so the codimension condition cannot be
/// dropped.
pub fn product_lower_bound(n: u32, vol_n: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", "must be at least 2"));
    }
    if !(vol_n > 0.0 && vol_n.is_finite()) {
        return Err(Error::param("vol_n", "must be positive"));
    }
    Ok(2.0 * vol_n / n as f64)
}

/// Dense midpoint quadrature of `∫ |grad F|^q` over the transverse fiber
/// box `[-R, R]^m` times the tangential box, for cross-checking the
/// separable estimate. Only `m <= 3` is supported.
pub fn grad_lq_dense(profile: &VanishingProfile, q: f64, nodes_per_axis: usize) -> Result<f64> {
    let spec = &profile.spec;
    let m = spec.codimension();
    if m > 3 {
        return Err(Error::Unsupported(format!(
            "dense cross-check is limited to codimension <= 3, got {m}"
        )));
    }
    let r_max = profile.tube_radius() * 1.01;
    let n = nodes_per_axis.max(16);
    let h = 2.0 * r_max / n as f64;
    let coord = |i: usize| -> f64 { -r_max + (i as f64 + 0.5) * h };
    let acc: f64;
    match m {
        2 => {
            let partials: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = coord(i);
                    let mut row = 0.0;
                    for j in 0..n {
                        let r = (x * x + coord(j) * coord(j)).sqrt();
                        row += profile.radial_derivative(r).abs().powf(q);
                    }
                    row
                })
                .collect();
            acc = partials.iter().sum::<f64>() * h * h;
        }
        3 => {
            let partials: Vec<f64> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let x = coord(i);
                    let mut plane = 0.0;
                    for j in 0..n {
                        let y = coord(j);
                        for k in 0..n {
                            let z = coord(k);
                            let r = (x * x + y * y + z * z).sqrt();
                            plane += profile.radial_derivative(r).abs().powf(q);
                        }
                    }
                    plane
                })
                .collect();
            acc = partials.iter().sum::<f64>() * h * h * h;
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "dense cross-check needs codimension 2 or 3, got {m}"
            )))
        }
    }
    Ok(spec.b.powi(spec.d as i32) * acc)
}
