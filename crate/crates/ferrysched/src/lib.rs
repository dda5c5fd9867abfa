pub use ferrysched_core as core;

pub mod cli;
pub mod clock;
pub mod gantt;
pub mod instance_file;
pub mod lp_text;
pub mod mps;
pub mod solution;
pub mod synth;
