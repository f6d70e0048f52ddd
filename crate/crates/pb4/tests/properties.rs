//! Randomized invariants of the formula layer, the profile machinery and
//! the field substrate.

use proptest::prelude::*;

use pb4::bracket::poisson_bracket;
use pb4::curves::pb4_curve_formula;
use pb4::exponent::Exponent;
use pb4::field::{ScalarField, SymplecticDensity};
use pb4::grid::{Grid2D, Mask};
use pb4::profile::{mollify, Profile1D};
use pb4::quadrature::{lq_norm, lq_norm_masked};
use pb4::quadrilateral::{pb4_formula, Area};

proptest! {
    #[test]
    fn formula_scaling_identity(
        a in 0.1..5.0_f64,
        gap in 0.1..5.0_f64,
        q in 1.0..6.0_f64,
        s in 0.2..4.0_f64,
    ) {
        let b = a + gap;
        let qx = Exponent::finite(q).unwrap();
        let (v, _) = pb4_formula(a, Area::finite(b).unwrap(), qx).unwrap();
        let (vs, _) = pb4_formula(s * a, Area::finite(s * b).unwrap(), qx).unwrap();
        let expect = s.powf(-(q - 1.0) / q) * v;
        prop_assert!((vs - expect).abs() <= 1e-10 * expect.abs().max(1.0));
    }

    #[test]
    fn formula_q1_always_two(a in 0.1..10.0_f64, gap in 0.1..10.0_f64) {
        let (v, _) = pb4_formula(a, Area::finite(a + gap).unwrap(), Exponent::Finite(1.0)).unwrap();
        prop_assert_eq!(v, 2.0);
        let (vi, _) = pb4_formula(a, Area::Infinite, Exponent::Finite(1.0)).unwrap();
        prop_assert_eq!(vi, 2.0);
    }

    #[test]
    fn formula_decreasing_in_total_area(
        a in 0.1..2.0_f64,
        gap in 0.1..2.0_f64,
        extra in 0.1..5.0_f64,
        q in 1.5..5.0_f64,
    ) {
        // Larger surrounding area can only lower the invariant, down to the
        // infinite-area branch.
        let qx = Exponent::finite(q).unwrap();
        let (v1, _) = pb4_formula(a, Area::finite(a + gap).unwrap(), qx).unwrap();
        let (v2, _) = pb4_formula(a, Area::finite(a + gap + extra).unwrap(), qx).unwrap();
        let (vinf, _) = pb4_formula(a, Area::Infinite, qx).unwrap();
        prop_assert!(v2 <= v1);
        prop_assert!(vinf <= v2);
    }

    #[test]
    fn curve_formula_symmetric(
        a in 0.1..5.0_f64,
        b in 0.1..5.0_f64,
        q in 1.0..8.0_f64,
    ) {
        let qx = Exponent::finite(q).unwrap();
        let v1 = pb4_curve_formula(Area::finite(a).unwrap(), Area::finite(b).unwrap(), qx).unwrap();
        let v2 = pb4_curve_formula(Area::finite(b).unwrap(), Area::finite(a).unwrap(), qx).unwrap();
        prop_assert_eq!(v1, v2);
    }

    #[test]
    fn smooth_step_bounds_and_monotone(
        t0 in -2.0..2.0_f64,
        span in 0.05..3.0_f64,
        wfrac in 0.01..0.45_f64,
    ) {
        let t1 = t0 + span;
        let p = Profile1D::smooth_step(t0, t1, wfrac * span).unwrap();
        prop_assert_eq!(p.eval(t0), 0.0);
        prop_assert_eq!(p.eval(t1), 1.0);
        let mut last = -1e-12;
        let mut t = t0 - 0.1 * span;
        while t < t1 + 0.1 * span {
            let v = p.eval(t);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            prop_assert!(v >= last - 1e-12);
            last = v;
            t += span / 400.0;
        }
    }

    #[test]
    fn mollify_sup_bound(
        peak in 0.2..2.0_f64,
        width in 0.01..0.1_f64,
        spread in 0.3..1.5_f64,
    ) {
        // Tent profile with a single kink of slope jump 2 peak / spread.
        let kinked = Profile1D::piecewise_linear(vec![
            (0.0, 0.0),
            (spread, peak),
            (2.0 * spread, 0.0),
        ]).unwrap();
        let smooth = mollify(&kinked, width.min(0.45 * spread)).unwrap();
        let w = width.min(0.45 * spread);
        let slope = peak / spread;
        let mut t = -0.1;
        let mut max_dev: f64 = 0.0;
        while t < 2.0 * spread + 0.1 {
            max_dev = max_dev.max((smooth.eval(t) - kinked.eval(t)).abs());
            prop_assert!(smooth.eval(t) <= peak + 1e-12);
            prop_assert!(smooth.eval(t) >= -1e-12);
            t += spread / 300.0;
        }
        prop_assert!(max_dev <= 2.0 * slope * w + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bracket_antisymmetry_on_random_fields(coeffs in prop::collection::vec(-1.0..1.0_f64, 8)) {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 24, 24, false, false).unwrap();
        let f = ScalarField::sample(&grid, |x, y| {
            coeffs[0] * (3.0 * x + coeffs[1]).sin() + coeffs[2] * x * y
        }).unwrap();
        let g = ScalarField::sample(&grid, |x, y| {
            coeffs[3] * (2.0 * y + coeffs[4]).cos() + coeffs[5] * (x + coeffs[6] * y + coeffs[7]).sin()
        }).unwrap();
        let density = SymplecticDensity::uniform();
        let fg = poisson_bracket(&f, &g, &density).unwrap();
        let gf = poisson_bracket(&g, &f, &density).unwrap();
        for (a, b) in fg.values().iter().zip(gf.values()) {
            prop_assert!(*a == -*b || (*a == 0.0 && *b == 0.0));
        }
    }

    #[test]
    fn masked_norm_below_full_norm(
        coeffs in prop::collection::vec(-1.0..1.0_f64, 4),
        cut in 0.2..1.8_f64,
        q in 1.0..5.0_f64,
    ) {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 32, 32, false, false).unwrap();
        let f = ScalarField::sample(&grid, |x, y| {
            coeffs[0] + coeffs[1] * (4.0 * x).sin() + coeffs[2] * (3.0 * y).cos() + coeffs[3] * x * y
        }).unwrap();
        let w = SymplecticDensity::from_fn(|x, y| 1.0 + 0.5 * (x + y));
        let mask = Mask::from_fn(&grid, |x, y| x + y < cut);
        let qx = Exponent::finite(q).unwrap();
        let sub = lq_norm_masked(&f, &mask, qx, &w).unwrap();
        let full = lq_norm(&f, qx, &w).unwrap();
        prop_assert!(sub <= full + 1e-12);
    }

    #[test]
    fn field_csv_round_trip(coeffs in prop::collection::vec(-3.0..3.0_f64, 4)) {
        let grid = Grid2D::new(-1.0, 2.0, 0.5, 1.75, 9, 7, true, false).unwrap();
        let f = ScalarField::sample(&grid, |x, y| {
            coeffs[0] * x + coeffs[1] * y + coeffs[2] * (x * y + coeffs[3]).sin()
        }).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = ScalarField::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, f);
    }
}
