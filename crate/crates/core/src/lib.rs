//! Odd-angled Coxeter groups: word problem, convex chamber sets, and the
//! classification of which systems admit Coxeter-polytope subgroups.

pub mod chambers;
pub mod constructor;
pub mod criterion;
pub mod diagrams;
pub mod error;
pub mod georep;
pub mod render;
pub mod words;

pub use error::{Error, Result};
