//! Dismantable tree decompositions, k-treedepth and k-ladder minors.
//!
//! The crate is organised bottom-up: [`graph`] and [`generators`] hold the
//! graph model, [`decomp`] tree decompositions and dismantling, [`params`]
//! the exact parameter solvers, [`refine`] decomposition refinement,
//! [`nicepair`] nice pairs and torsos, [`minors`] minor models and ladders,
//! and [`slide`] token sliding.

pub mod bits;
pub mod canon;
pub mod decomp;
pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod io;
pub mod limits;
pub mod minors;
pub mod nicepair;
pub mod params;
pub mod refine;
pub mod slide;

pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
