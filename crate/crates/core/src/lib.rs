//! Unitarily invariant matrix norms: separation-modulus estimates, diameter
//! approximation for symmetric convex bodies from oracle access, and
//! numerical certificates for the Jacobi-ensemble computation of the
//! Dirichlet Rayleigh quotient on the operator-norm ball.
//!
//! Module map:
//!
//! * [`gauge`]: symmetric norms on ℝⁿ and their duals.
//! * [`matrix`]: singular values (one-sided Jacobi) and ideal norms.
//! * [`oracle`]: weak membership oracles, sandwich radii, norm evaluation.
//! * [`ellipsoid`]: dual-norm evaluation by the ellipsoid method.
//! * [`net`]: the monotone multiplicative-grid net of the ℓ_q ball.
//! * [`diameter`]: the net-plus-dual-oracle ℓ_p diameter algorithm.
//! * [`sep`]: separation-modulus and spectral-gap order estimates.
//! * [`jacobi`]: closed forms, quadrature and Monte Carlo twins.

pub mod diameter;
pub mod ellipsoid;
pub mod error;
pub mod gauge;
pub mod jacobi;
pub mod matrix;
pub mod net;
pub mod oracle;
pub mod rng;
pub mod sep;


pub use ellipsoid::{eval_dual, separation_probe, DualEvalReport, Separation};
pub use error::{Error, Result};
pub use gauge::{canonical, Exponent, GaugeFamily, SymmetricGauge};
pub use matrix::{
    complex_ideal_norm, identity_norm, ideal_norm, singular_values, ComplexMatrix, RealMatrix, SingularSpectrum,
};

pub use oracle::{
    norm_eval_from_membership, oracle_from_gauge, sandwich_from_unit_norm, GaugeOracle, Membership,
    MembershipOracle, NormAccess, SandwichBounds,
};

pub use diameter::{
    alg_p, alg_p_gauge, closed_form_diam, dual_exponent, gauge_bounds, AlgOptions, DiamReport, DualEvaluator,
    NetReduction,
};
pub use net::{build_maximal_net, build_net, density_check, net_size_bound, DensityReport, LevelProfile, NetParams};
pub use sep::{kyfan_regime, lambda_order, sep_estimate, DiamMode, KyFanRegime, SepReport};
