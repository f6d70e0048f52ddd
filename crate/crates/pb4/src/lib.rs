//! Numerical laboratory for L_q-norm Poisson bracket invariants on model
//! surfaces: closed-form invariant values for quadrilaterals and curves,
//! explicit near-optimal function pairs with two-sided certificates, the
//! commuting-approximant construction, the high-dimensional radial decay
//! mechanism, and a projected-gradient cross-check of the closed forms.

// Validation sites use `!(x > 0.0)`-style comparisons on purpose: the
// negation also rejects NaN, which a rewritten `x <= 0.0` would let
// through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bracket;
pub mod curves;
pub mod error;
pub mod exponent;
pub mod field;
pub mod flexibility;
pub mod grid;
pub mod highdim;
pub mod maps;
pub mod optimizer;
pub mod profile;
pub mod quadrature;
pub mod quadrilateral;

pub use bracket::{derivative_x, derivative_y, poisson_bracket};
pub use curves::{
    cylinder_to_annulus, nonseparating_pair, pb4_curve_formula, separating_pair, CurvePartition,
    CylinderModel,
};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use field::{ScalarField, SymplecticDensity};
pub use flexibility::{decompose, flex_fields, flex_report, CellDecomposition, FlexReport};
pub use grid::{Grid2D, Mask};
pub use highdim::{
    decay_curve, grad_lq_estimate, product_lower_bound, vanishing_profile, DecayRow, HighDimSpec,
};
pub use maps::{invariance_check, AnnulusMap, AreaPreservingMap, InvarianceReport};
pub use optimizer::{certificate, minimize, objective, CertStatus, OptProblem, OptResult};
pub use profile::{mollify, profile_lq_of_derivative, radial_moment, ramp_u1, Profile1D, RampSpec};
pub use quadrature::{integrate, integrate_all, lq_distance, lq_norm, lq_norm_masked};
pub use quadrilateral::{
    build_pair, pb4_formula, stokes_defect, verify_lower, verify_upper, AdmissiblePair, Area,
    BoundStatus, GridPolicy, QuadProblem,
};
