//! Iterative procedures: repeat a two-outcome procedure with alternating
//! measurements and post-process the count of equal neighbours.

pub mod amplify;
pub mod engine;
pub mod jordan;
pub mod nondestructive;
pub mod plan;

pub use amplify::{amplify_threshold, Amplified};
pub use engine::{iterate_procedure, run_exact, run_iterative, Engine, IterativeRun, Sampler, Trace};
pub use jordan::{jordan_blocks, jordan_blocks_of, JordanBlocks, OneDBlock, TwoDBlock};
pub use nondestructive::{make_nondestructive, NondestructiveRun, NondestructiveWrapper};
pub use plan::{binary_alphabet, lzl_alphabet, pg, pg_derivative, IterativePlan};
