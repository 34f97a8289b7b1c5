//! Analyses built on sampling and the exact oracle: the anchored-expansion
//! constant, anchored ratios of sampled clusters, walk return probabilities and pipes.

mod alpha;
mod anchored;
mod pipes;
mod walk;

pub use alpha::{alpha_dense_scan, alpha_exponent, solve_alpha, AlphaSolution};
pub use anchored::{
    anchored_profile, exact_anchored, exact_by_size, greedy_anchored, tail_minimum, tree_ball_ratios, AnchoredReport,
    AnchoredRow, SetRatio, EXACT_MAX_EDGES,
};
pub use pipes::{pipe_census, PipeCensus, PipeRow, BOOTSTRAP_REPS};
pub use walk::{walk_return, Walk, WalkReport, RATIONAL_MAX_VERTICES};
