//! Laurent polynomials over ℤ and ideal computations in
//! `ℤ[t₁^{±1}, …, t_d^{±1}]`.

mod engine;
mod groebner;
mod koszul;
mod module;
mod poly;

pub use engine::{CancelToken, GroebnerConfig};
pub use groebner::{eliminate, groebner, groebner_with, ideal_equal, GroebnerBasis, QuotientReport, RelativeReport, TermOrder, ZRank};
pub use koszul::{koszul_tor, TorDegree, TorModule, TorResult};
pub use module::{module_kernel, LaurentVector, Submodule};
pub use poly::{Exponents, LaurentPoly};
