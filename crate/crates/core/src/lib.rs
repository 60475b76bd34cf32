//! Loose graph simulations (LGS).
//!
//! A *guest* describes a pattern as a labelled graph whose nodes carry
//! must/unique/exclusive decorations and a choice function over their
//! out-edges. An LGS of a guest in a *host* is a subgraph of the tensor
//! product `guest × host` satisfying five conditions (LGS1–LGS5).
//!
//! The crate provides the data model ([`graph`], [`guest`], [`candidate`]),
//! the guest algebra ([`algebra`]), ε-free regular expressions and automata
//! ([`regex`], [`nfa`]), encoders for classical matching problems
//! ([`encode`]), the solvers and reference oracles ([`solver`]) and file
//! formats ([`io`], [`dsl`], [`dot`]).

pub mod algebra;
pub mod candidate;
pub mod dot;
pub mod dsl;
pub mod encode;
pub mod graph;
pub mod guest;
pub mod io;
pub mod nfa;
pub mod regex;
pub mod solver;
