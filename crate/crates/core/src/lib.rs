//! Colored graphs, the modal μ-calculus, parity games and cover parity
//! automata, with tools for comparing them on graphs of bounded strongly
//! connected component size.

mod scc;

pub mod automata;
pub mod collapse;
pub mod formula;
pub mod game;
pub mod gamma;
pub mod graph;
pub mod harness;
