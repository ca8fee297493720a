//! Generalized Hausdorff operators on `L^p(ℝ^n)`.
//!
//! `(Hf)(x) = ∫_Ω Φ(u) f(A(u)x) dμ(u)` for a commuting family of positive
//! definite matrices `A(u)`. The crate evaluates such operators and their
//! adjoints, computes their symbols, implements the modified Mellin
//! transform that diagonalizes them on `L^2`, and derives norms, spectra and
//! inverses from the symbol.

pub mod builtins;
pub mod error;
pub mod function;
pub mod gamma;
pub mod grid;
pub mod mellin;
pub mod operator;
pub mod quadrature;
pub mod schema;
pub mod spec;
pub mod spectral;
pub mod symbol;

pub use builtins::{builtin_cesaro, builtin_ck, builtin_discrete, geometric, geometric_spec, identity_spec};
pub use error::{Error, Result};
pub use function::{library, FnRef, Function};
pub use gamma::complex_gamma;
pub use mellin::{diagonalization_residual, mellin_forward, mellin_inverse, MellinGrid};
pub use operator::{apply, apply_adjoint, normality_residual, Applied, LogGrid};
pub use schema::{load_spec, spec_from_json, spec_to_json};
pub use spec::{validate_spec, CommutingFamily, EigenForm, KernelForm, KernelSpec, MeasureSpace, OperatorSpec, ValidationReport};
pub use spectral::{discrete_inverse, invertibility, operator_norm, spectrum_cloud, Invertibility, SGrid};
pub use symbol::{adjoint_symbol, product_symbol, symbol_closed_form, symbol_quadrature, Symbol};
