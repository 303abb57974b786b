pub mod annotate;
pub mod bench;
pub mod linearize;
pub mod serve;
pub mod stats;
