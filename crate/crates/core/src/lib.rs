//! Exact-arithmetic Boolean (and free) cumulant machinery for polynomials
//! in `d` noncommuting variables.
//!
//! Everything is computed over arbitrary-precision rationals, so all the
//! identities checked here are exact equalities with no tolerances:
//!
//! * [`combinat`] — multi-indices and the lattices of all / non-crossing /
//!   interval set partitions;
//! * [`series`] — degree-truncated noncommutative formal power series, the
//!   substrate for moment and cumulant generating functions;
//! * [`cumulants`] — moment tables and the moment/cumulant transforms, each
//!   computed by two independent routes (partition sums and generating
//!   functions), plus convolutions, powers, products and independence tests;
//! * [`appell`] — Boolean Appell polynomials and their expansion, recursion
//!   and binomial identities, and the symbolic Kailath–Segall expansion;
//! * [`fock`] — the level-matrix operator model: moments by operator
//!   products, Motzkin paths, and a matrix continued fraction; the monic
//!   orthogonal polynomial recursion; the Boolean semigroup action;
//! * [`meixner`] — the free/Boolean Meixner class: Fock realization, PDE
//!   residuals, the Sheffer coincidence, the B_t and Bercovici–Pata maps,
//!   Bernoulli functionals and the Laha–Lukacs moment identities.

pub mod appell;
pub mod combinat;
pub mod cumulants;
pub mod error;
pub mod fock;
pub mod meixner;
pub mod scalar;
pub mod series;

pub use appell::NCPolynomial;
pub use combinat::{MultiIndex, PartitionFamily, SetPartition};
pub use cumulants::FunctionalData;
pub use error::Error;
pub use fock::{FockData, GbfDecomposition, JacobiData, QMatrix};
pub use meixner::{MeixnerParams, UnivariateMeixner};
pub use scalar::Q;
pub use series::{NCSeries, SeriesTuple};
