//! Numerical verification of convolution semigroups on finite quantum
//! groups and of noncommutative Dirichlet forms on weighted matrix algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`matcore`]: dense complex linear algebra.
//! * [`layout`]: block-diagonal algebras `⊕ M_n` and their matrix-unit bases.
//! * [`hopf`]: finite quantum groups, duality and the multiplicative unitary.
//! * [`conv`]: functionals, convolution and convolution operators.
//! * [`gl`]: weighted algebras, `L^p` embeddings, Markov operators and
//!   Dirichlet forms for non-tracial states.
//! * [`semigrp`]: generating functionals, convolution semigroups and the
//!   semigroup / Markov operator / Dirichlet form correspondence.
//! * [`twist`]: 2-cocycles and twisted coproducts.
//!
//! Randomised checks go through [`par::Exec`] so that they can run on the
//! rayon pool (feature `parallel`, on by default) or sequentially, with
//! identical results either way.

pub mod conv;
mod error;
pub mod gl;
pub mod hopf;
pub mod layout;
pub mod matcore;
pub mod par;
pub mod report;
pub mod sample;
pub mod semigrp;
pub mod twist;

pub use error::{Error, Result};
pub use matcore::{CMatrix, CVector, Tolerance, C64};
