//! Compressing partitions of graphs guided by tree-decompositions.
//!
//! Given a graph together with a (rooted) tree- or path-decomposition of
//! width k, this crate constructs an index graph H on a subset of the
//! vertices, a decomposition of H over the same tree with bags of size at
//! most k+1, and a partition of the graph indexed by V(H) such that
//!
//! * any two distinct parts at distance at most `ell` carry adjacent
//!   indices in H (the partition is `ell`-compressing), and
//! * every part lies inside the `(k+1)*ell`-ball of its centre, so its weak
//!   diameter is at most `2(k+1)*ell`.
//!
//! On top of that sits a quasi-isometry pipeline: a c-quasi-isometry from G
//! to a graph H of treewidth (or pathwidth) at most k is turned into a
//! proper partition of G whose quotient-like index graph again has width at
//! most k and whose parts have weak diameter at most `4(k+1)c^2 + c` in G.
//!
//! Everything is verified by independent checkers rather than trusted:
//! builders assert their own invariants, and separate verification passes
//! recompute every claimed bound from scratch. Exact small-graph oracles
//! (treewidth, pathwidth, exhaustive partition search) provide ground truth
//! for tests.
//!
//! All threshold arithmetic is exact rational; see [`scalar::Scalar`].

pub mod compress;
pub mod decomp;
pub mod gen;
pub mod graph;
pub mod oracles;
pub mod pace;
mod par;
pub mod qi;
pub mod scalar;

pub use graph::{Dist, Graph, GraphError};
pub use scalar::Scalar;
