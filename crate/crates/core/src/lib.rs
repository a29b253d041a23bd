//! Zipper logic: a graph rewrite system of half-zippers, zippers and
//! chemlambda-style fan nodes, with an SKI combinator layer on top.
//!
//! - [`graph`]: zipper graphs, validation, isomorphism, `.zg` and DOT I/O.
//! - [`rewrites`]: the reversible local moves.
//! - [`combinators`]: SKI terms, their zipper graphs, readback and a
//!   term-rewriting reference reducer.
//! - [`engine`]: reduction strategies, traces, the multiplier and death
//!   tactics, and bounded search for move sequences.
//! - [`knots`]: half-zippers as tangle diagrams with virtual arcs.

pub mod graph;
pub mod rewrites;
pub mod combinators;
pub mod engine;
pub mod knots;
pub mod verify;
