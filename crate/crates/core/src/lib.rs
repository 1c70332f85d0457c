//! Layered veering triangulations of pseudo-Anosov mapping tori, built from
//! periodic maximal splitting sequences of measured train tracks.

pub mod algebra;
pub mod bounds;
pub mod moves;
pub mod pipeline;
pub mod search;
pub mod seed;
pub mod taut;
pub mod track;
