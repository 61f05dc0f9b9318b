#![allow(clippy::needless_range_loop)]

pub mod classes;
pub mod cli;
pub mod error;
pub mod hypergraph;
pub mod io;
pub mod laminar;
pub mod stability;
pub mod subpath;
pub mod subtree;
pub mod bipartite;
pub mod random;
pub mod uda;
pub mod hardness;
