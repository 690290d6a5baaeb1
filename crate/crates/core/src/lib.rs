#![no_std]
//! Balanced truncation and singular perturbation model reduction for SISO
//! LTI systems with a posteriori finite-time L² error bounds.

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod linalg;
pub mod lti;
pub mod reduction;

pub use error::{Error, Result};
pub use lti::{SampledSignal, StateSpaceModel, TimeGrid};
pub use reduction::{Method, ReducedModel};
