//! Small graphs (at most 12 edges) versioned with the crate for exact checks.

use crate::error::{Error, Result};
use crate::graph::Graph;

const FILES: &[(&str, &str)] = &[
    ("bowtie", include_str!("../corpus/bowtie.json")),
    ("cube", include_str!("../corpus/cube.json")),
    ("cycle4", include_str!("../corpus/cycle4.json")),
    ("cycle5_chord", include_str!("../corpus/cycle5_chord.json")),
    ("diamond", include_str!("../corpus/diamond.json")),
    ("grid3x3_halo", include_str!("../corpus/grid3x3_halo.json")),
    ("k4", include_str!("../corpus/k4.json")),
    ("path3", include_str!("../corpus/path3.json")),
    ("single_edge", include_str!("../corpus/single_edge.json")),
    ("star3", include_str!("../corpus/star3.json")),
    ("theta", include_str!("../corpus/theta.json")),
    ("tree3_r2_halo", include_str!("../corpus/tree3_r2_halo.json")),
    ("triangle", include_str!("../corpus/triangle.json")),
    ("triangle_pendant", include_str!("../corpus/triangle_pendant.json")),
];

/// Names of the corpus graphs, sorted.
pub fn names() -> Vec<&'static str> {
    FILES.iter().map(|(n, _)| *n).collect()
}

pub fn load(name: &str) -> Result<Graph> {
    let (_, text) = FILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Argument(format!("no corpus graph named {name}")))?;
    Graph::from_json(text)
}

/// Every corpus graph with its name.
pub fn all() -> Vec<(String, Graph)> {
    FILES
        .iter()
        .map(|(n, t)| (n.to_string(), Graph::from_json(t).expect("corpus graphs are valid")))
        .collect()
}
