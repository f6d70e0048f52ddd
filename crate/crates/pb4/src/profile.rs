//! One-dimensional smooth building blocks: plateau cutoffs, the
//! slope-controlled ramp peaking at its inner width, and the radial
//! fast-decay family `r -> h(r^alpha)`, together with exact-integral
//! evaluators for their L_q moments.
//!
//! Profiles are piecewise-linear skeletons whose kinks are replaced by a
//! polynomial smoothstep transition of fixed half-width. The transition
//! integrates in closed form, so profile values and derivatives are exact;
//! only the moment integrals use quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cubic smoothstep `u^2 (3 - 2u)` on `[0, 1]`.
fn smoothstep(u: f64) -> f64 {
    u * u * (3.0 - 2.0 * u)
}

/// Smallest representable value `>= a` whose transition zone `a - w`
/// stays at or above `lo`; keeps plateau boundaries bit-exact.
pub(crate) fn nudge_up_until(mut a: f64, w: f64, lo: f64) -> f64 {
    while a - w < lo {
        a = a.next_up();
    }
    a
}

/// Mirror image of [`nudge_up_until`]: largest `a` with `a + w <= hi`.
pub(crate) fn nudge_down_until(mut a: f64, w: f64, hi: f64) -> f64 {
    while a + w > hi {
        a = a.next_down();
    }
    a
}

/// Antiderivative of [`smoothstep`], `u^3 - u^4 / 2`.
fn smoothstep_int(u: f64) -> f64 {
    u * u * u - 0.5 * u * u * u * u
}

/// Piecewise-linear skeleton with C^1 mollified kinks.
///
/// Between consecutive anchors the profile is linear; outside the anchor
/// range it is constant. Each anchor kink is smoothed over
/// `[t_i - width, t_i + width]`; anchors must be at least `2 width` apart
/// so transitions never overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    anchors: Vec<(f64, f64)>,
    width: f64,
}

impl Skeleton {
    fn new(anchors: Vec<(f64, f64)>, width: f64) -> Result<Self> {
        if anchors.len() < 2 {
            return Err(Error::InvalidProfile(
                "need at least two anchors".to_string(),
            ));
        }
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "mollification width must be nonnegative, got {width}"
            )));
        }
        for w in anchors.windows(2) {
            let gap = w[1].0 - w[0].0;
            if !(gap > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "anchors must be strictly increasing, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
            if gap < 2.0 * width - 1e-15 * width.max(1.0) {
                return Err(Error::InvalidProfile(format!(
                    "anchor gap {gap} too small for mollification width {width}"
                )));
            }
        }
        if anchors
            .iter()
            .any(|(t, v)| !t.is_finite() || !v.is_finite())
        {
            return Err(Error::InvalidProfile("non-finite anchor".to_string()));
        }
        Ok(Skeleton { anchors, width })
    }

    /// Slope of the linear piece entered after anchor `i` (constant 0 past
    /// the ends).
    fn slope_after(&self, i: isize) -> f64 {
        let n = self.anchors.len() as isize;
        if i < 0 || i + 1 >= n {
            return 0.0;
        }
        let (t0, v0) = self.anchors[i as usize];
        let (t1, v1) = self.anchors[(i + 1) as usize];
        (v1 - v0) / (t1 - t0)
    }

    fn linear_value(&self, t: f64) -> f64 {
        let n = self.anchors.len();
        if t <= self.anchors[0].0 {
            return self.anchors[0].1;
        }
        if t >= self.anchors[n - 1].0 {
            return self.anchors[n - 1].1;
        }
        let i = self.anchors.partition_point(|(a, _)| *a <= t) - 1;
        let (t0, v0) = self.anchors[i];
        v0 + self.slope_after(i as isize) * (t - t0)
    }

    fn eval(&self, t: f64) -> f64 {
        if self.width == 0.0 {
            return self.linear_value(t);
        }
        if let Some(i) = self.transition_index(t) {
            let (ti, _) = self.anchors[i];
            let s_prev = self.slope_after(i as isize - 1);
            let s_next = self.slope_after(i as isize);
            let w = self.width;
            let u = (t - ti + w) / (2.0 * w);
            let base = self.linear_value(ti - w);
            base + s_prev * (t - ti + w) + (s_next - s_prev) * 2.0 * w * smoothstep_int(u)
        } else {
            self.linear_value(t)
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        if self.width == 0.0 {
            return self.linear_slope(t);
        }
        if let Some(i) = self.transition_index(t) {
            let (ti, _) = self.anchors[i];
            let s_prev = self.slope_after(i as isize - 1);
            let s_next = self.slope_after(i as isize);
            let u = (t - ti + self.width) / (2.0 * self.width);
            s_prev + (s_next - s_prev) * smoothstep(u)
        } else {
            self.linear_slope(t)
        }
    }

    fn linear_slope(&self, t: f64) -> f64 {
        let n = self.anchors.len();
        if t <= self.anchors[0].0 || t >= self.anchors[n - 1].0 {
            return 0.0;
        }
        let i = self.anchors.partition_point(|(a, _)| *a <= t) - 1;
        self.slope_after(i as isize)
    }

    /// Index of the anchor whose open transition zone `(t_i - w, t_i + w)`
    /// contains `t`, if any. Both edges evaluate through the linear
    /// branch, which keeps plateau values exact.
    fn transition_index(&self, t: f64) -> Option<usize> {
        let w = self.width;
        if w == 0.0 {
            return None;
        }
        let i = self.anchors.partition_point(|(a, _)| *a - w < t);
        if i == 0 {
            return None;
        }
        let (ti, _) = self.anchors[i - 1];
        (t < ti + w).then_some(i - 1)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(3 * self.anchors.len());
        for (t, _) in &self.anchors {
            if self.width > 0.0 {
                pts.push(t - self.width);
            }
            pts.push(*t);
            if self.width > 0.0 {
                pts.push(t + self.width);
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ProfileKind {
    Skeleton(Skeleton),
    /// `t -> base(t^alpha)` for `0 < alpha <= 1`.
    PowerWarp { base: Box<Profile1D>, alpha: f64 },
}

/// One-dimensional C^1 profile, evaluable with derivative, serializable to
/// JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile1D {
    kind: ProfileKind,
}

impl Profile1D {
    /// Exact piecewise-linear profile (no mollification).
    pub fn piecewise_linear(anchors: Vec<(f64, f64)>) -> Result<Self> {
        Ok(Profile1D {
            kind: ProfileKind::Skeleton(Skeleton::new(anchors, 0.0)?),
        })
    }

    /// Piecewise-linear skeleton with kinks smoothed over `width`.
    pub fn mollified(anchors: Vec<(f64, f64)>, width: f64) -> Result<Self> {
        Ok(Profile1D {
            kind: ProfileKind::Skeleton(Skeleton::new(anchors, width)?),
        })
    }

    /// Monotone C^1 step: 0 for `t <= t0`, 1 for `t >= t1`.
    ///
    /// The rise is linear between mollified ends; `width` is capped at a
    /// quarter of the span so the two transitions stay disjoint.
    pub fn smooth_step(t0: f64, t1: f64, width: f64) -> Result<Self> {
        if !(t0 < t1) {
            return Err(Error::InvalidProfile(format!(
                "smooth_step needs t0 < t1, got [{t0}, {t1}]"
            )));
        }
        if !(width > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "smooth_step width must be positive, got {width}"
            )));
        }
        if width >= (t1 - t0) / 2.0 {
            return Err(Error::InvalidProfile(format!(
                "smooth_step width {width} too large for span {}",
                t1 - t0
            )));
        }
        let w = width.min((t1 - t0) / 4.0);
        Profile1D::mollified(
            vec![
                (nudge_up_until(t0 + w, w, t0), 0.0),
                (nudge_down_until(t1 - w, w, t1), 1.0),
            ],
            w,
        )
    }

    /// Mirror image of [`Profile1D::smooth_step`]: 1 for `t <= t0`, 0 for
    /// `t >= t1`.
    pub fn smooth_step_down(t0: f64, t1: f64, width: f64) -> Result<Self> {
        if !(t0 < t1) {
            return Err(Error::InvalidProfile(format!(
                "smooth_step_down needs t0 < t1, got [{t0}, {t1}]"
            )));
        }
        if !(width > 0.0) || width >= (t1 - t0) / 2.0 {
            return Err(Error::InvalidProfile(format!(
                "smooth_step_down width {width} invalid for span {}",
                t1 - t0
            )));
        }
        let w = width.min((t1 - t0) / 4.0);
        Profile1D::mollified(
            vec![
                (nudge_up_until(t0 + w, w, t0), 1.0),
                (nudge_down_until(t1 - w, w, t1), 0.0),
            ],
            w,
        )
    }

    /// Radial decay family `r -> base(r^alpha)` for `0 < alpha <= 1`.
    ///
    /// The base profile must look like the standard bump: value 1 with zero
    /// slope at 0, nonnegative, supported in `[0, 1/2]`.
    pub fn radial_decay(alpha: f64, base: &Profile1D) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1], got {alpha}"),
            ));
        }
        if (base.eval(0.0) - 1.0).abs() > 1e-12 || base.deriv(0.0).abs() > 1e-12 {
            return Err(Error::InvalidProfile(
                "radial base must be constant 1 near 0".to_string(),
            ));
        }
        let (_, hi) = base.support();
        if hi > 0.5 + 1e-12 {
            return Err(Error::InvalidProfile(format!(
                "radial base support must lie in [0, 1/2], extends to {hi}"
            )));
        }
        if base
            .breakpoints()
            .iter()
            .any(|t| *t > 0.0 && base.eval(*t) < -1e-12)
        {
            return Err(Error::InvalidProfile(
                "radial base must be nonnegative".to_string(),
            ));
        }
        if alpha == 1.0 {
            return Ok(base.clone());
        }
        Ok(Profile1D {
            kind: ProfileKind::PowerWarp {
                base: Box::new(base.clone()),
                alpha,
            },
        })
    }

    /// Default bump: 1 on `[0, 1/4]`, smooth descent to 0 at `1/2`.
    pub fn default_bump() -> Profile1D {
        let w = 1.0 / 32.0;
        Profile1D::mollified(vec![(0.25 + w, 1.0), (0.5 - w, 0.0)], w)
            .expect("default bump anchors are valid")
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Skeleton(s) => s.eval(t),
            ProfileKind::PowerWarp { base, alpha } => {
                if t < 0.0 {
                    base.eval(0.0)
                } else {
                    base.eval(t.powf(*alpha))
                }
            }
        }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        match &self.kind {
            ProfileKind::Skeleton(s) => s.deriv(t),
            ProfileKind::PowerWarp { base, alpha } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let inner = base.deriv(t.powf(*alpha));
                if inner == 0.0 {
                    0.0
                } else {
                    alpha * t.powf(alpha - 1.0) * inner
                }
            }
        }
    }

    /// Interval outside of which the profile is constant.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Skeleton(s) => {
                let lo = s.anchors[0].0 - s.width;
                let hi = s.anchors[s.anchors.len() - 1].0 + s.width;
                (lo, hi)
            }
            ProfileKind::PowerWarp { base, alpha } => {
                let (lo, hi) = base.support();
                (warp_point(lo, *alpha), warp_point(hi, *alpha))
            }
        }
    }

    /// Quadrature segmentation points (kinks and transition edges).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Skeleton(s) => s.breakpoints(),
            ProfileKind::PowerWarp { base, alpha } => {
                let mut pts: Vec<f64> = base
                    .breakpoints()
                    .iter()
                    .map(|t| warp_point(*t, *alpha))
                    .collect();
                pts.insert(0, 0.0);
                pts
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::InvalidProfile(format!("bad profile JSON: {e}")))
    }
}

fn warp_point(t: f64, alpha: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.powf(1.0 / alpha)
    }
}

/// Parameters of the slope-controlled ramp: inner width `a` (the peak
/// location), outer width `c`, margin `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSpec {
    pub a: f64,
    pub c: f64,
    pub eps: f64,
}

impl RampSpec {
    pub fn new(a: f64, c: f64, eps: f64) -> Result<Self> {
        let spec = RampSpec { a, c, eps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::param("a", format!("must be positive, got {}", self.a)));
        }
        if !(self.c > self.a) {
            return Err(Error::param(
                "c",
                format!("must exceed a = {}, got {}", self.a, self.c),
            ));
        }
        if !(self.eps > 0.0) || 8.0 * self.eps >= self.a.min(self.c - self.a) {
            return Err(Error::param(
                "eps",
                format!(
                    "must satisfy 0 < 8 eps < min(a, c - a) = {}, got {}",
                    self.a.min(self.c - self.a),
                    self.eps
                ),
            ));
        }
        Ok(())
    }

    /// Slope of the first long linear piece, `(1 - 2 eps) / (a - 4 eps)`.
    pub fn rise_slope(&self) -> f64 {
        (1.0 - 2.0 * self.eps) / (self.a - 4.0 * self.eps)
    }

    /// Slope of the second long linear piece (negative),
    /// `-(1 - 2 eps) / ((c - a) - 4 eps)`.
    pub fn fall_slope(&self) -> f64 {
        -(1.0 - 2.0 * self.eps) / ((self.c - self.a) - 4.0 * self.eps)
    }
}

/// The ramp `u1`: supported in `(0, c)`, equal to 1 at `a`, linear from
/// `eps` to `1 - eps` on `[2 eps, a - 2 eps]` and back down on
/// `[a + 2 eps, c - 2 eps]`, with zero slope near 0, `a` and `c`, and
/// connector slopes below 1.
pub fn ramp_u1(spec: &RampSpec) -> Result<Profile1D> {
    spec.validate()?;
    let e = spec.eps;
    let a = spec.a;
    let c = spec.c;
    let d0 = 0.5 * e;
    let p = 0.5 * e;
    let anchors = vec![
        (d0, 0.0),
        (2.0 * e, e),
        (a - 2.0 * e, 1.0 - e),
        (a - p, 1.0),
        (a + p, 1.0),
        (a + 2.0 * e, 1.0 - e),
        (c - 2.0 * e, e),
        (c - d0, 0.0),
    ];
    Profile1D::mollified(anchors, 0.25 * e)
}

/// Replace the kinks of a piecewise profile by smoothstep transitions of
/// the given half-width. The result agrees with the input outside
/// width-neighborhoods of the kinks.
pub fn mollify(p: &Profile1D, width: f64) -> Result<Profile1D> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidProfile(format!(
            "mollification width must be positive, got {width}"
        )));
    }
    match &p.kind {
        ProfileKind::Skeleton(s) => Profile1D::mollified(s.anchors.clone(), width),
        ProfileKind::PowerWarp { .. } => Err(Error::InvalidProfile(
            "mollify applies to piecewise profiles only".to_string(),
        )),
    }
}

/// Composite midpoint quadrature of `f` over `[a, b]`, refined until two
/// successive refinements agree to `rel_tol` (relative).
pub fn adaptive_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, n0: usize, rel_tol: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let midpoint = |n: usize| -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            acc += f(a + (i as f64 + 0.5) * h);
        }
        acc * h
    };
    let mut n = n0.max(8);
    let mut prev = midpoint(n);
    for _ in 0..16 {
        n *= 2;
        let next = midpoint(n);
        let scale = next.abs().max(prev.abs()).max(1e-300);
        if (next - prev).abs() <= rel_tol * scale {
            return next;
        }
        prev = next;
    }
    prev
}

/// Segment-aware quadrature of `g` against a profile's breakpoints, with at
/// least ten nodes per mollification width inside each segment.
fn profile_quad(
    p: &Profile1D,
    interval: (f64, f64),
    g: impl Fn(f64) -> f64 + Copy,
) -> f64 {
    let (lo, hi) = interval;
    if !(hi > lo) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = p
        .breakpoints()
        .into_iter()
        .filter(|t| *t > lo && *t < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a < 1e-300 {
            continue;
        }
        acc += adaptive_quad(g, a, b, 16, 1e-8);
    }
    acc
}

/// `∫ |p'(t)|^q dt` over the interval.
pub fn profile_lq_of_derivative(p: &Profile1D, q: f64, interval: (f64, f64)) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::param("q", format!("must satisfy q >= 1, got {q}")));
    }
    Ok(profile_quad(p, interval, |t| p.deriv(t).abs().powf(q)))
}

/// Radial moments of Lemma-type decay estimates:
/// `∫ |p'(r)|^k r^{m-1} dr` when `use_derivative`, else the plain
/// `∫ |p|^k dr`, both over the profile's support.
pub fn radial_moment(p: &Profile1D, k: f64, m: u32, use_derivative: bool) -> Result<f64> {
    if use_derivative {
        weighted_radial_moment(p, k, m, true)
    } else {
        weighted_radial_moment(p, k, 1, false)
    }
}

/// `∫ |p^{(d)}(r)|^k r^{m-1} dr` over `[0, support end]`, where `d` is 1
/// when `use_derivative` and 0 otherwise.
///
/// For the power-warp family the integral is computed in the base variable
/// `t = r^alpha`, where the integrand is tame for every `alpha` in `(0, 1]`.
pub fn weighted_radial_moment(p: &Profile1D, k: f64, m: u32, use_derivative: bool) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::param("k", format!("must satisfy k >= 1, got {k}")));
    }
    if m < 1 {
        return Err(Error::param("m", "must be a positive integer"));
    }
    let rpow = (m - 1) as f64;
    match &p.kind {
        ProfileKind::PowerWarp { base, alpha } => {
            let a = *alpha;
            let (_, hi) = base.support();
            let hi = hi.max(1e-12);
            if use_derivative {
                // alpha^{k-1} ∫ |h'(t)|^k t^{(rpow + 1 - k)/alpha + k - 1} dt
                let expo = (rpow + 1.0 - k) / a + k - 1.0;
                let integrand =
                    |t: f64| -> f64 { base.deriv(t).abs().powf(k) * t.max(0.0).powf(expo) };
                Ok(a.powf(k - 1.0) * profile_quad(base, (0.0, hi), integrand))
            } else {
                // (1/alpha) ∫ |h(t)|^k t^{m/alpha - 1} dt
                let expo = (rpow + 1.0) / a - 1.0;
                let integrand =
                    |t: f64| -> f64 { base.eval(t).abs().powf(k) * t.max(0.0).powf(expo) };
                Ok(profile_quad(base, (0.0, hi), integrand) / a)
            }
        }
        ProfileKind::Skeleton(_) => {
            let (_, hi) = p.support();
            let hi = hi.max(0.0);
            if use_derivative {
                Ok(profile_quad(p, (0.0, hi), |r| {
                    p.deriv(r).abs().powf(k) * r.max(0.0).powf(rpow)
                }))
            } else {
                Ok(profile_quad(p, (0.0, hi), |r| {
                    p.eval(r).abs().powf(k) * r.max(0.0).powf(rpow)
                }))
            }
        }
    }
}

/// Closed-form upper bound for the derivative moment of the decay family:
/// `alpha^{k-1} sup|h'|^k / 2^{(m-k)/alpha + k - 1}`.
pub fn decay_derivative_moment_bound(alpha: f64, k: f64, m: u32, h_deriv_sup: f64) -> f64 {
    let expo = (m as f64 - k) / alpha + k - 1.0;
    alpha.powf(k - 1.0) * h_deriv_sup.powf(k) / 2.0_f64.powf(expo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_boundary_and_midpoint() {
        let p = Profile1D::smooth_step(0.0, 1.0, 0.1).unwrap();
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(-5.0), 0.0);
        assert_eq!(p.eval(1.0), 1.0);
        assert_eq!(p.eval(7.0), 1.0);
        // Symmetry of the skeleton and of the smoothstep kernel.
        assert!((p.eval(0.5) - 0.5).abs() < 1e-9);
        assert!(p.deriv(0.5) > 0.0);
    }

    #[test]
    fn smooth_step_rejects_wide_transition() {
        assert!(Profile1D::smooth_step(0.0, 1.0, 0.5).is_err());
        assert!(Profile1D::smooth_step(0.0, 1.0, 0.7).is_err());
        assert!(Profile1D::smooth_step(0.0, 1.0, 0.49).is_ok());
    }

    #[test]
    fn smooth_step_is_monotone_and_c1() {
        let p = Profile1D::smooth_step(-0.3, 0.7, 0.05).unwrap();
        let mut last = -1.0;
        let mut t = -0.4;
        while t < 0.8 {
            let v = p.eval(t);
            assert!(v >= last - 1e-12);
            last = v;
            t += 1e-3;
        }
        // Finite-difference derivative agrees with the analytic one.
        let h = 1e-6;
        for t in [-0.3, -0.25, 0.0, 0.2, 0.65, 0.7] {
            let fd = (p.eval(t + h) - p.eval(t - h)) / (2.0 * h);
            assert!((fd - p.deriv(t)).abs() < 1e-6, "at t={t}");
        }
    }

    #[test]
    fn ramp_matches_paper_geometry() {
        let spec = RampSpec::new(1.0, 2.0, 0.01).unwrap();
        let u1 = ramp_u1(&spec).unwrap();
        // u1(a) = 1, u1(0) = u1(c) = 0.
        assert_eq!(u1.eval(1.0), 1.0);
        assert_eq!(u1.eval(0.0), 0.0);
        assert_eq!(u1.eval(2.0), 0.0);
        // Slope on the first linear piece is (1 - 2 eps) / (a - 4 eps).
        let s = spec.rise_slope();
        for t in [0.1, 0.4, 0.75] {
            assert!((u1.deriv(t) - s).abs() < 1e-12, "at t={t}");
        }
        // Support strictly inside (0, c).
        let (lo, hi) = u1.support();
        assert!(lo > 0.0 && hi < 2.0);
        // Derivative vanishes near 0, a and c.
        for t in [0.001, 0.9999, 1.0001, 1.9999] {
            assert_eq!(u1.deriv(t), 0.0, "at t={t}");
        }
        // Range within [0, 1].
        let mut t = -0.1;
        while t < 2.1 {
            let v = u1.eval(t);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            t += 1e-3;
        }
    }

    #[test]
    fn ramp_derivative_l2_respects_paper_bound() {
        // 8 eps + (1 - 2 eps)^q ((a - 4 eps)^{1-q} + ((c-a) - 4 eps)^{1-q})
        // evaluates to about 2.081 for a=1, c=2, eps=0.01, q=2.
        let spec = RampSpec::new(1.0, 2.0, 0.01).unwrap();
        let u1 = ramp_u1(&spec).unwrap();
        let q = 2.0_f64;
        let val = profile_lq_of_derivative(&u1, q, (0.0, 2.0)).unwrap();
        let e = 0.01_f64;
        let bound = 8.0 * e
            + (1.0 - 2.0 * e).powf(q)
                * ((1.0 - 4.0 * e).powf(1.0 - q) + (1.0 - 4.0 * e).powf(1.0 - q));
        assert!(val <= bound, "{val} > {bound}");
        assert!((bound - 2.081).abs() < 2e-3);
        // And the value is at least the kink-free lower bound.
        assert!(val > (1.0 - 2.0 * e).powf(q) * 2.0 * (1.0 - 4.0 * e).powf(1.0 - q) * 0.98);
    }

    #[test]
    fn ramp_l1_close_to_total_variation() {
        let spec = RampSpec::new(1.0, 2.0, 0.001).unwrap();
        let u1 = ramp_u1(&spec).unwrap();
        let val = profile_lq_of_derivative(&u1, 1.0, (0.0, 2.0)).unwrap();
        // Total variation of the up-down ramp is exactly 2.
        assert!(val > 2.0 * (1.0 - 2.0 * 0.001) - 1e-6);
        assert!(val <= 2.01);
    }

    #[test]
    fn linear_profile_derivative_moment() {
        let p = Profile1D::piecewise_linear(vec![(0.0, 0.0), (2.0, 3.0)]).unwrap();
        // |slope|^q * length = 1.5^2 * 2.
        let v = profile_lq_of_derivative(&p, 2.0, (0.0, 2.0)).unwrap();
        assert!((v - 4.5).abs() < 1e-9);
        let c = Profile1D::piecewise_linear(vec![(0.0, 1.0), (2.0, 1.0)]).unwrap();
        assert_eq!(profile_lq_of_derivative(&c, 2.0, (0.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn mollify_agrees_outside_kink_neighborhoods() {
        let kinked = Profile1D::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap();
        let w = 0.05;
        let smooth = mollify(&kinked, w).unwrap();
        let mut t = -0.2;
        let mut max_dev: f64 = 0.0;
        while t < 2.2 {
            let d = (smooth.eval(t) - kinked.eval(t)).abs();
            let near_kink = [0.0, 1.0, 2.0].iter().any(|k| (t - k).abs() <= w);
            if !near_kink {
                assert!(d < 1e-12, "deviation {d} away from kinks at t={t}");
            }
            max_dev = max_dev.max(d);
            t += 1e-3;
        }
        // Single-kink deviation bound: slope jump times width.
        assert!(max_dev <= 2.0 * w + 1e-12);
        // Mollification does not increase the sup.
        let mut t = -0.2;
        while t < 2.2 {
            assert!(smooth.eval(t) <= 1.0 + 1e-12);
            assert!(smooth.eval(t) >= -1e-12);
            t += 1e-3;
        }
    }

    #[test]
    fn mollified_profile_is_c1_at_breakpoints() {
        let kinked =
            Profile1D::piecewise_linear(vec![(0.0, 0.0), (0.5, 1.0), (1.5, -0.5), (2.0, 0.0)])
                .unwrap();
        let smooth = mollify(&kinked, 0.04).unwrap();
        let h = 1e-8;
        for t in smooth.breakpoints() {
            let jump = ((smooth.eval(t + h) - smooth.eval(t)) / h
                - (smooth.eval(t) - smooth.eval(t - h)) / h)
                .abs();
            assert!(jump < 1e-6, "derivative jump {jump} at breakpoint {t}");
        }
    }

    #[test]
    fn radial_decay_support_and_value() {
        let h = Profile1D::default_bump();
        let p = Profile1D::radial_decay(0.5, &h).unwrap();
        assert_eq!(p.eval(0.0), 1.0);
        // Support endpoint 2^{-1/alpha} = 0.25 for alpha = 0.5.
        let (_, hi) = p.support();
        assert!((hi - 0.25).abs() < 1e-12);
        assert_eq!(p.eval(0.26), 0.0);
        let same = Profile1D::radial_decay(1.0, &h).unwrap();
        assert_eq!(same, h);
    }

    #[test]
    fn radial_decay_rejects_bad_base() {
        let not_one = Profile1D::piecewise_linear(vec![(0.1, 0.5), (0.4, 0.0)]).unwrap();
        assert!(Profile1D::radial_decay(0.5, &not_one).is_err());
        let too_wide = Profile1D::mollified(vec![(0.5, 1.0), (0.9, 0.0)], 0.05).unwrap();
        assert!(Profile1D::radial_decay(0.5, &too_wide).is_err());
    }

    #[test]
    fn plain_field_moment_of_bump() {
        // A profile close to the indicator of [0, 1/2] integrates to about 1/2.
        let h = Profile1D::mollified(vec![(0.4, 1.0), (0.49, 0.0)], 0.005).unwrap();
        let v = radial_moment(&h, 1.0, 1, false).unwrap();
        assert!((v - 0.445).abs() < 0.01, "got {v}");
        let exact_half = Profile1D::default_bump();
        let v2 = radial_moment(&exact_half, 1.0, 1, false).unwrap();
        assert!(v2 < 0.5 && v2 > 0.3);
    }

    #[test]
    fn field_moment_respects_support_bound() {
        // ∫ h_alpha^k dr <= sup|h^k| / 2^{1/alpha}; alpha = 0.1 gives 2^{-10}.
        let h = Profile1D::default_bump();
        let p = Profile1D::radial_decay(0.1, &h).unwrap();
        let v = radial_moment(&p, 1.0, 1, false).unwrap();
        assert!(v <= 2.0_f64.powf(-10.0) + 1e-12, "got {v}");
        assert!(v > 0.0);
    }

    #[test]
    fn derivative_moment_respects_closed_form_bound() {
        let h = Profile1D::default_bump();
        let sup = {
            // sup |h'| over a dense scan of the transition zone
            let mut m: f64 = 0.0;
            let mut t = 0.2;
            while t < 0.5 {
                m = m.max(h.deriv(t).abs());
                t += 1e-5;
            }
            m
        };
        for alpha in [1.0, 0.5, 0.25, 0.1] {
            for (k, m) in [(1.0, 2), (2.0, 2), (2.0, 3), (3.0, 3)] {
                let p = Profile1D::radial_decay(alpha, &h).unwrap();
                let v = weighted_radial_moment(&p, k, m, true).unwrap();
                let bound = decay_derivative_moment_bound(alpha, k, m, sup);
                assert!(
                    v <= bound * (1.0 + 1e-6),
                    "alpha={alpha} k={k} m={m}: {v} > {bound}"
                );
            }
        }
    }

    #[test]
    fn moments_decrease_along_alpha() {
        let h = Profile1D::default_bump();
        for (k, m) in [(1.0, 2), (2.0, 2), (2.0, 4)] {
            let mut last_d = f64::INFINITY;
            let mut last_f = f64::INFINITY;
            for alpha in [1.0, 0.5, 0.25, 0.1] {
                let p = Profile1D::radial_decay(alpha, &h).unwrap();
                let d = weighted_radial_moment(&p, k, m, true).unwrap();
                let f = radial_moment(&p, k, m, false).unwrap();
                assert!(d < last_d, "derivative moment not decreasing at alpha={alpha}");
                assert!(f < last_f, "field moment not decreasing at alpha={alpha}");
                last_d = d;
                last_f = f;
            }
        }
    }

    #[test]
    fn profile_json_round_trip() {
        let spec = RampSpec::new(1.0, 3.0, 0.05).unwrap();
        let p = ramp_u1(&spec).unwrap();
        let back = Profile1D::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
        let warped = Profile1D::radial_decay(0.25, &Profile1D::default_bump()).unwrap();
        let back = Profile1D::from_json(&warped.to_json()).unwrap();
        assert_eq!(warped, back);
    }
}
