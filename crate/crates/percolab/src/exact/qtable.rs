use super::enumerate::ConfigTable;
use super::poly::PolynomialInP;
use crate::anatomy::{bridge_tree, lf_k};
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde_json::json;
use std::collections::BTreeMap;

/// Exact joint law of `(Lf_k(K_v), E_v)` on one graph.
#[derive(Debug, Clone)]
pub struct QTable {
    pub graph: String,
    pub root: u32,
    pub k_max: usize,
    /// `(k, n, m) -> P(Lf_k = m, E_v = n)`
    pub entries: BTreeMap<(usize, usize, usize), PolynomialInP>,
    /// `P(cluster censored)`, the mass missing from every `k` slice.
    pub censored: PolynomialInP,
}

impl QTable {
    pub fn entry(&self, k: usize, n: usize, m: usize) -> PolynomialInP {
        self.entries.get(&(k, n, m)).cloned().unwrap_or_default()
    }

    /// Sum of the `k` slice plus the censored mass; must be the constant 1.
    pub fn slice_total(&self, k: usize) -> PolynomialInP {
        self.entries
            .range((k, 0, 0)..(k + 1, 0, 0))
            .fold(self.censored.clone(), |acc, (_, p)| acc.add(p))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|(&(k, n, m), p)| json!({"k": k, "n": n, "m": m, "prob": p.to_json_value()}))
            .collect();
        json!({
            "graph": self.graph,
            "root": self.root,
            "k_max": self.k_max,
            "entries": entries,
            "censored": self.censored.to_json_value(),
        })
    }
}

pub fn q_table(g: &Graph, root: u32, k_max: usize) -> Result<QTable> {
    if k_max == 0 {
        return Err(Error::Argument("k_max must be at least 1".into()));
    }
    let table = ConfigTable::build(g, root)?;
    let mut entries = BTreeMap::new();
    let mut censored = PolynomialInP::zero();
    for (id, cl) in table.clusters.iter().enumerate() {
        let prob = table.cluster_probability(id);
        if cl.censored {
            censored = censored.add(&prob);
            continue;
        }
        let tree = bridge_tree(g, cl)?;
        for k in 1..=k_max {
            let m = lf_k(&tree, k)?;
            let slot = entries.entry((k, cl.e_v(), m)).or_insert_with(PolynomialInP::zero);
            *slot = slot.add(&prob);
        }
    }
    Ok(QTable { graph: g.family().name.clone(), root, k_max, entries, censored })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_end() {
        let g = Graph::explicit(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = q_table(&g, 0, 2).unwrap();
        assert_eq!(t.entry(1, 3, 3), PolynomialInP::monomial_pq(3, 0));
        for k in 1..=2 {
            assert_eq!(t.slice_total(k), PolynomialInP::one());
        }
    }

    #[test]
    fn cycle_of_four() {
        let g = Graph::explicit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let t = q_table(&g, 0, 3).unwrap();
        // the whole cycle open has no leaves; three open edges form a path through
        // the root or ending at it
        assert_eq!(t.entry(1, 4, 0), PolynomialInP::monomial_pq(4, 0));
        for ((k, n, m), p) in &t.entries {
            assert!(!(0 < *m && m < k) && n >= m || p.is_zero(), "{k} {n} {m}");
        }
    }
}
