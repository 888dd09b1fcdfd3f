//! Pointlikes, conelikes and covering for the two-variable alternation
//! and Trotter-Weil hierarchies.

pub mod cli;
pub mod monoid;
pub mod par;
pub mod rankers;
pub mod saturation;
pub mod set;
pub mod solver;
pub mod syntactic;
pub mod varieties;
pub mod words;
