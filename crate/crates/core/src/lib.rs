//! Exact symbolic analysis of finite nondegeneracy for polynomial CR maps
//! between generic real-analytic submanifolds of complex spaces.
//!
//! The pipeline: parse polynomial defining equations and map components over
//! the exact field Q(sqrt2, sqrt3)(i), recenter at the base points, put the
//! source manifold in graph form, build the tangential CR vector fields,
//! pull the target's complex gradients back along the map, and row-reduce
//! the values of iterated CR derivatives at the origin until they span the
//! target space (or a requested order is exhausted).

pub mod engine;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod manifold;
pub mod rng;
pub mod scalar;
