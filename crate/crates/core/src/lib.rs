//! Stabilizer MBQC diagrams: Pauli flow, flow-preserving rewrites and a
//! unique phase-polynomial canonical form.

pub mod canon;
pub mod clifford;
pub mod diagram;
pub mod dot;
pub mod evaluate;
pub mod exact;
pub mod flow;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod phasepoly;
pub mod random;
pub mod rewrite;
