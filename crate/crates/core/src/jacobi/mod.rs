//! Certificates for the Rayleigh quotient of `f(A) = det(I − AAᵀ)^p` on the
//! unit ball of the operator norm.
//!
//! Passing to singular values reduces both `∫‖∇f‖²` and `∫f²` to integrals
//! against a Jacobi-ensemble density on `[0,1]ⁿ`, and their ratio has the
//! closed form `pn²(4p+n)²/(2(2p−1)(4p+1))`. The submodules check each link:
//!
//! * [`closed`]: the exact rational values and the normaliser `Z_n(p)`.
//! * [`quadrature`]: tensor Gauss–Legendre integration of the same integrals.
//! * [`test_function`]: `f`, the gradient formula, finite differences.
//! * [`monte_carlo`]: MANOVA sampling of the ensemble and rejection sampling
//!   in matrix space.

pub mod closed;
pub mod monte_carlo;
pub mod quadrature;
pub mod test_function;

pub use closed::{
    aomoto_inv_x, aomoto_pair, identity_sweep, inv_x_sq, kadell, p_selection, rayleigh_closed, rayleigh_from_expectations,
    selberg_z, IdentitySweep, JacobiParams, PSelection,
};
pub use monte_carlo::{mc_jacobi_expectations, mc_matrix_rayleigh, mc_volume_check, McReport, VolumeReport};
pub use quadrature::{
    quadrature_certificate, quadrature_expectation, quadrature_rayleigh, quadrature_z, Integrand, QuadratureCheck,
    QuadratureRayleigh, QuadratureRule, QuadratureValue,
};
pub use test_function::{f_test, grad_check, grad_norm_sq, gradient_sweep, GradCheck, GradientSweep};
