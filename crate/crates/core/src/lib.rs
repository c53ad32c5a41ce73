//! Compile a classical network code over the alphabet `{00, 01, 10, 11}` into
//! a quantum network code built from tetra-state measurements and
//! entanglement-free cloning, and simulate the result.
//!
//! Pipeline: [`netgraph::Instance`] → [`netgraph::normalize_to_d3`] →
//! [`compile::compile`] → [`sim`].

pub mod bundled;
pub mod compile;
pub mod efc;
pub mod eval;
pub mod gen;
pub mod netgraph;
pub mod par;
pub mod qmath;
pub mod rational;
pub mod sim;

pub use rational::Rational;
