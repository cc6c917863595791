pub mod automorphism;
pub mod battery;
pub mod equivalence;
pub mod graph;
pub mod product;
pub mod structure_tree;
