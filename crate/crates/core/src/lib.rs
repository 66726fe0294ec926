//! Concatenated orthogonal minimally aliased response surface (cOMARS) designs.
//!
//! A cOMARS design stacks the foldovers of two conference designs (the second
//! with permuted and sign-flipped columns) over a block of center runs. This
//! crate builds such designs, measures their aliasing against closed-form
//! values, and searches the lower parent's column arrangement for minimal
//! two-factor-interaction aliasing.

pub mod analytic;
pub mod designs;
pub mod error;
pub mod metrics;
pub mod optimizer;

pub use error::{Error, Result};
