//! Bounded linear forest decompositions of multigraphs.
//!
//! A `(k,ℓ)`-decomposition splits the edges of a multigraph into a part A
//! whose components are paths with at most `k` edges and a part B whose
//! components are paths with at most `ℓ` edges.

pub mod cli;
pub mod decomp;
pub mod factor;
pub mod gadgets;
pub mod girth9;
pub mod graph;
pub mod oracle;
pub mod poly21;
