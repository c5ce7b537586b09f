//! Finite-scale computations for the ideal structure of uniform Roe algebras.
//!
//! Everything here works on finite bounded-geometry metric spaces and on band
//! operators over them. Infinite phenomena (directions at infinity, ghosts,
//! limit operators) are represented by explicit finite surrogates: exhaustions,
//! ideal families searched up to a neighbourhood cap, and sparse direction
//! sequences with Cauchy diagnostics.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line driver live in the `roelab` companion crate.
#![cfg_attr(not(test), no_std)]
// `!(x < y)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod expander;
pub mod ideals;
pub mod limitop;
pub mod linalg;
pub mod operator;
pub mod space;
pub mod witness;

pub use error::{Error, Result};
pub use expander::{ColumnSpace, ExpanderFamily, ExpanderGraph};
pub use ideals::{IdealFamily, MembershipCertificate};
pub use limitop::{DirectionSequence, Frame};
pub use operator::BandOperator;

pub use space::{CoarseSpace, GridMetric, PartialTranslation, PointSet, Separation};
pub use witness::{LocalizationReport, WitnessFunction};

pub use num_complex::Complex64;
