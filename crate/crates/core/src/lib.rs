//! Binary quadratic forms and their quadratic rings.
//!
//! Forms `(a, b, c)` over `Z` or `Z/n` correspond to pairs `(C, M)` of a
//! quadratic algebra `C` and a traceable `C`-module `M` of rank 2. This crate
//! implements both sides, the constructions between them, ideal arithmetic
//! and composition over `Z`, and an exhaustive checker of the
//! correspondence over small residue rings.
//!
//! ```
//! use quadrings::correspondence::{form_to_pair, pair_to_form};
//! use quadrings::ideal::compose_forms;
//! use quadrings::{BQForm, Flavor};
//!
//! let f = BQForm::int([2, 1, 3], Flavor::Twisted);
//! let pair = form_to_pair(&f);
//! assert_eq!(pair_to_form(&pair).unwrap(), f);
//!
//! let square = compose_forms(&f, &f).unwrap();
//! assert_eq!(square, BQForm::int([2, -1, 3], Flavor::Twisted));
//! ```

pub mod algebra;
pub mod correspondence;
pub mod forms;
pub mod ideal;
pub mod matrix;
pub mod rings;
pub mod verifier;

pub use algebra::{QuadraticAlgebra, TraceableModule};
pub use forms::{BQForm, Flavor};
pub use matrix::{Gl2, Mat2};
pub use rings::{Ring, RingElement};
