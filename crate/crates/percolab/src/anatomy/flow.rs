use crate::engine::EdgeState;
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

#[derive(Debug, Clone, Serialize)]
pub struct MengerResult {
    /// Maximum number of edge-disjoint open paths from the source set to the halo.
    pub paths: usize,
    /// A minimum open edge cut, sorted; its size equals `paths`.
    pub min_cut: Vec<u32>,
    /// Edge sequences of one family of disjoint paths.
    pub path_edges: Vec<Vec<u32>>,
}

/// Unit-capacity max flow from `s_set` to the halo over open edges.
///
/// Edges are undirected with capacity one in either direction; flow on edge
/// `e = [a, b]` is stored as +1 for `a -> b` and -1 for `b -> a`.
pub fn menger_paths<S: EdgeState + ?Sized>(g: &Graph, state: &S, s_set: &[u32]) -> Result<MengerResult> {
    if !g.has_boundary() {
        return Err(Error::State("graph has no boundary halo to play the role of infinity".into()));
    }
    for &s in s_set {
        if s as usize >= g.vertex_count() || g.is_boundary(s) {
            return Err(Error::Argument(format!("source {s} must be an interior vertex")));
        }
    }
    let mut flow: HashMap<u32, i8> = HashMap::new();
    let residual = |flow: &HashMap<u32, i8>, e: u32, from: u32| -> bool {
        let f = *flow.get(&e).unwrap_or(&0);
        let dir = if g.endpoints(e)[0] == from { 1 } else { -1 };
        f * dir < 1
    };
    let mut is_source = HashMap::new();
    for &s in s_set {
        is_source.insert(s, ());
    }
    let mut total = 0usize;
    loop {
        // BFS in the residual graph from all sources at once
        let mut pred: HashMap<u32, (u32, u32)> = HashMap::new();
        let mut seen: HashMap<u32, ()> = is_source.clone();
        let mut q: VecDeque<u32> = s_set.iter().copied().collect();
        let mut hit = None;
        'bfs: while let Some(v) = q.pop_front() {
            for &(w, e) in g.neighbors(v) {
                if seen.contains_key(&w) || !state.is_open(e) || !residual(&flow, e, v) {
                    continue;
                }
                seen.insert(w, ());
                pred.insert(w, (v, e));
                if g.is_boundary(w) {
                    hit = Some(w);
                    break 'bfs;
                }
                q.push_back(w);
            }
        }
        let Some(mut w) = hit else { break };
        while let Some(&(v, e)) = pred.get(&w) {
            let dir: i8 = if g.endpoints(e)[0] == v { 1 } else { -1 };
            *flow.entry(e).or_insert(0) += dir;
            w = v;
        }
        total += 1;
    }

    // residual reachability gives the cut
    let mut reach: HashMap<u32, ()> = is_source.clone();
    let mut q: VecDeque<u32> = s_set.iter().copied().collect();
    while let Some(v) = q.pop_front() {
        for &(w, e) in g.neighbors(v) {
            if !reach.contains_key(&w) && state.is_open(e) && residual(&flow, e, v) {
                debug_assert!(!g.is_boundary(w), "augmenting path left after max flow");
                reach.insert(w, ());
                q.push_back(w);
            }
        }
    }
    let mut min_cut: Vec<u32> = Vec::new();
    for &v in reach.keys() {
        for &(w, e) in g.neighbors(v) {
            if !reach.contains_key(&w) && state.is_open(e) {
                min_cut.push(e);
            }
        }
    }
    min_cut.sort_unstable();
    min_cut.dedup();
    debug_assert_eq!(min_cut.len(), total, "max-flow / min-cut mismatch");

    let path_edges = decompose(g, &mut flow, s_set, total);
    Ok(MengerResult { paths: total, min_cut, path_edges })
}

/// Peels unit paths off the flow, dropping any circulation met on the way.
fn decompose(g: &Graph, flow: &mut HashMap<u32, i8>, s_set: &[u32], total: usize) -> Vec<Vec<u32>> {
    let mut out_edges: HashMap<u32, Vec<u32>> = HashMap::new();
    for (&e, &f) in flow.iter() {
        if f == 0 {
            continue;
        }
        let [a, b] = g.endpoints(e);
        let from = if f > 0 { a } else { b };
        out_edges.entry(from).or_default().push(e);
    }
    for v in out_edges.values_mut() {
        v.sort_unstable();
    }
    let mut paths = Vec::with_capacity(total);
    let mut starts: Vec<u32> = s_set.to_vec();
    starts.sort_unstable();
    starts.dedup();
    for s in starts {
        while paths.len() < total {
            let Some(first) = out_edges.get_mut(&s).and_then(|v| v.pop()) else { break };
            let mut verts = vec![s];
            let mut edges = vec![first];
            let mut at = g.other(first, s);
            while !g.is_boundary(at) {
                if let Some(i) = verts.iter().position(|&x| x == at) {
                    // loop back: cut the cycle out
                    verts.truncate(i + 1);
                    edges.truncate(i);
                }
                let Some(e) = out_edges.get_mut(&at).and_then(|v| v.pop()) else { break };
                verts.push(at);
                edges.push(e);
                at = g.other(e, at);
            }
            if g.is_boundary(at) {
                paths.push(edges);
            }
        }
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Mask;
    use crate::graph::Family;

    #[test]
    fn binary_tree_root() {
        let g = Graph::generate(&Family::BinaryTree { depth: 3 }).unwrap();
        let all = vec![true; g.edge_count()];
        let r = menger_paths(&g, &all, &[0]).unwrap();
        assert_eq!(r.paths, 2);
        assert_eq!(r.min_cut.len(), 2);
        assert_eq!(r.path_edges.len(), 2);
        let none = vec![false; g.edge_count()];
        assert_eq!(menger_paths(&g, &none, &[0]).unwrap().paths, 0);
    }

    #[test]
    fn three_regular_ball() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 3 }).unwrap();
        let r = menger_paths(&g, &vec![true; g.edge_count()], &[0]).unwrap();
        assert_eq!(r.paths, 3);
    }

    #[test]
    fn paths_are_disjoint_and_open() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 6 }).unwrap();
        for seed in 0..40u64 {
            let mask = Mask(crate::rng::mix64(seed) & crate::rng::mix64(seed + 99));
            let mut open: Vec<bool> = (0..g.edge_count()).map(|e| e < 64 && mask.is_open(e as u32)).collect();
            for (e, o) in open.iter_mut().enumerate().skip(30) {
                *o = crate::rng::edge_label(seed, e as u32) < 0.7;
            }
            let r = menger_paths(&g, &open, &[14, 15]).unwrap();
            let mut used = std::collections::HashSet::new();
            for p in &r.path_edges {
                for &e in p {
                    assert!(open[e as usize]);
                    assert!(used.insert(e));
                }
            }
            assert_eq!(r.path_edges.len(), r.paths);
            assert_eq!(r.min_cut.len(), r.paths);
        }
    }

    #[test]
    fn errors() {
        let g = Graph::explicit(2, &[(0, 1)]).unwrap();
        assert!(matches!(menger_paths(&g, &vec![true], &[0]), Err(Error::State(_))));
        let g = Graph::generate(&Family::BinaryTree { depth: 2 }).unwrap();
        assert!(menger_paths(&g, &vec![true; 6], &[5]).is_err());
    }
}
