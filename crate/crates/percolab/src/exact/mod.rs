//! Exact ground truth: configuration enumeration, cluster expansions, the
//! Russo decomposition, tree laws and bound checks.

mod bounds;
mod enumerate;
mod poly;
mod qtable;
mod russo;
mod tree_law;

pub use bounds::{
    analyticity_radius_check, corpus_suite, expansion_union_bound, fluctuation_tail_exact, fluctuation_tail_mc, moment_bound_exact,
    moment_bound_mc, recursion_check, skinny_radius_exact, skinny_radius_mc, BoundReport, RadiusCheck,
};
pub use enumerate::{
    animal_expansion, animal_series, enumerate_exact, truncated, AnimalSeries, ClusterFunctional, ConfigTable,
    Functional, MAX_ANIMALS, MAX_ENUM_EDGES,
};
pub use poly::{parse_rational, rat, rational_from_f64, to_f64, PolynomialInP};
pub use qtable::{q_table, QTable};
pub use russo::{default_grid, russo_decomposition, russo_from_table, RussoDecomposition, RussoPoint};
pub use tree_law::{subtree_count, tree_cluster_law, tree_finite_probability, tree_zeta_k, TreeLaw, EXACT_LIMIT};
