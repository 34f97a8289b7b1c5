//! Combinatorial anatomy of clusters: blocks and bridges, pivotal edges,
//! edge-disjoint escape paths, furcations and pipes.

mod bridges;
mod flow;

pub use bridges::{br_k, br_k_tree, bridge_tree, lf_k, piv, BridgeTree, LocalGraph};
pub use flow::{menger_paths, MengerResult};

use crate::engine::{par_trials, Cluster, Config, EdgeState, Explorer};
use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    pub bound: i64,
    pub achieved: usize,
    pub ok: bool,
}

/// Compares the edge-disjoint escape count of `a_set` with `sum (deg - 2)` on an
/// open tree whose leaves all sit on the halo. `tree_cluster` must come from a
/// full component exploration (see [`crate::engine::explore_component`]).
pub fn euler_paths_check(g: &Graph, tree_cluster: &Cluster, a_set: &[u32]) -> Result<EulerCheck> {
    let lg = LocalGraph::of_cluster(g, tree_cluster);
    if tree_cluster.open_edges.len() + 1 != lg.len() {
        return Err(Error::State("open subgraph is not a tree".into()));
    }
    for (i, &v) in lg.vertices.iter().enumerate() {
        if lg.adj[i].len() <= 1 && !g.is_boundary(v) {
            return Err(Error::State(format!("vertex {v} is a leaf off the halo")));
        }
    }
    let mut bound = 0i64;
    for &a in a_set {
        let i = *lg.index.get(&a).ok_or_else(|| Error::Argument(format!("vertex {a} not in the tree")))?;
        if g.is_boundary(a) {
            return Err(Error::Argument(format!("vertex {a} is on the halo")));
        }
        bound += lg.adj[i].len() as i64 - 2;
    }
    let achieved = if a_set.is_empty() {
        0
    } else {
        let open: HashSet<u32> = tree_cluster.open_edges.iter().copied().collect();
        menger_paths(g, &SetState(&open), a_set)?.paths
    };
    Ok(EulerCheck { bound, achieved, ok: achieved as i64 >= bound })
}

/// Edge state backed by a set of open edge ids.
pub struct SetState<'a>(pub &'a HashSet<u32>);

impl EdgeState for SetState<'_> {
    fn is_open(&self, e: u32) -> bool {
        self.0.contains(&e)
    }
}

/// Interior vertices whose removal leaves at least three halo-reaching pieces
/// among their open neighbours. `candidates` restricts the scan.
pub fn furcation_set<S: EdgeState + ?Sized>(g: &Graph, state: &S, candidates: Option<&[u32]>) -> Vec<u32> {
    let all: Vec<u32>;
    let cand = match candidates {
        Some(c) => c,
        None => {
            all = (0..g.vertex_count() as u32).collect();
            &all
        }
    };
    let mut out = Vec::new();
    for &v in cand {
        if g.is_boundary(v) {
            continue;
        }
        let nbrs: Vec<u32> = g.neighbors(v).iter().filter(|&&(_, e)| state.is_open(e)).map(|&(w, _)| w).collect();
        if nbrs.len() < 3 {
            continue;
        }
        let mut label: HashMap<u32, usize> = HashMap::new();
        let mut escaping = 0;
        for (k, &start) in nbrs.iter().enumerate() {
            if label.contains_key(&start) {
                continue;
            }
            label.insert(start, k);
            let mut q = VecDeque::from([start]);
            let mut reached = false;
            while let Some(u) = q.pop_front() {
                if g.is_boundary(u) {
                    reached = true;
                    continue;
                }
                for &(w, e) in g.neighbors(u) {
                    if w != v && state.is_open(e) && !label.contains_key(&w) {
                        label.insert(w, k);
                        q.push_back(w);
                    }
                }
            }
            if reached {
                escaping += 1;
            }
        }
        if escaping >= 3 {
            out.push(v);
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct BurtonKeane {
    pub trials: u64,
    pub mean_menger: f64,
    pub stderr: f64,
    /// `|E(S)|`: edges touching the source set.
    pub edge_boundary_volume: usize,
    /// `mean_menger / |E(S)|`.
    pub bound: f64,
}

pub fn burton_keane_statistic(g: &Graph, p: f64, trials: u64, seed: u64, s_set: &[u32], workers: usize) -> Result<BurtonKeane> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let touched: HashSet<u32> = s_set.iter().flat_map(|&s| g.neighbors(s).iter().map(|&(_, e)| e)).collect();
    // validates the halo and the sources once, on the all-closed configuration
    menger_paths(g, &Config { labels: EdgeLabelSample::new(seed), p: 0.0 }, s_set)?;
    let (sum, sq) = par_trials(
        trials,
        workers,
        |range| {
            let mut sum = 0u64;
            let mut sq = 0u64;
            for t in range {
                let st = Config { labels: EdgeLabelSample::for_trial(seed, t), p };
                let m = menger_paths(g, &st, s_set).map(|r| r.paths as u64).unwrap_or(0);
                sum += m;
                sq += m * m;
            }
            (sum, sq)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let n = trials as f64;
    let mean = sum as f64 / n;
    let var = (sq as f64 / n - mean * mean).max(0.0);
    Ok(BurtonKeane {
        trials,
        mean_menger: mean,
        stderr: (var / n).sqrt(),
        edge_boundary_volume: touched.len(),
        bound: if touched.is_empty() { 0.0 } else { mean / touched.len() as f64 },
    })
}

/// Longest path inside `ball` whose internal vertices have degree two in `lg`.
pub(crate) fn longest_pipe_local(lg: &LocalGraph, ball: &[bool]) -> usize {
    let n = lg.len();
    let deg2 = |i: usize| lg.adj[i].len() == 2;
    let mut best = 0;
    // a cluster that is one bare cycle has no pipe endpoints at all
    if (0..n).all(deg2) {
        return 0;
    }
    // any open edge inside the ball is a pipe of length one
    for i in 0..n {
        if ball[i] && lg.adj[i].iter().any(|&(j, _)| ball[j]) {
            best = 1;
            break;
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] || !ball[s] || !deg2(s) {
            continue;
        }
        // maximal run of degree-two ball vertices through s
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &(w, _) in &lg.adj[v] {
                if !seen[w] && ball[w] && deg2(w) {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        let inside: HashSet<usize> = comp.iter().copied().collect();
        // exits: (run vertex, outside neighbour) pairs
        let exits: Vec<usize> = comp
            .iter()
            .flat_map(|&v| lg.adj[v].iter().map(|&(w, _)| w))
            .filter(|w| !inside.contains(w))
            .collect();
        let m = comp.len();
        let len = match exits.len() {
            // closed loop of degree-two vertices: no endpoints
            0 => 0,
            2 => {
                let in_ball = exits.iter().filter(|&&w| ball[w]).count();
                if exits[0] == exits[1] {
                    if ball[exits[0]] {
                        m
                    } else {
                        m - 1
                    }
                } else {
                    m - 1 + in_ball
                }
            }
            // a run whose end sits on the ball's edge: only one exit is recorded
            _ => m - 1 + exits.iter().filter(|&&w| ball[w]).count().min(2),
        };
        best = best.max(len);
    }
    best
}

pub(crate) fn ball_mask(lg: &LocalGraph, radius: u32) -> Vec<bool> {
    let mut dist = vec![u32::MAX; lg.len()];
    dist[0] = 0;
    let mut q = VecDeque::from([0usize]);
    while let Some(v) = q.pop_front() {
        for &(w, _) in &lg.adj[v] {
            if dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    dist.iter().map(|&d| d <= radius).collect()
}

/// Longest pipe of a finite cluster within the intrinsic ball of `radius_limit`.
pub fn longest_pipe(g: &Graph, cluster: &Cluster, radius_limit: u32) -> usize {
    let lg = LocalGraph::of_cluster(g, cluster);
    longest_pipe_local(&lg, &ball_mask(&lg, radius_limit))
}

/// Longest pipe within the intrinsic ball of radius `r` around `root`, read off
/// an exploration of depth `r + 1` so that degrees of ball vertices are exact.
/// Halo vertices are not expanded.
pub fn longest_pipe_in_ball<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, r: u32) -> usize {
    let lg = intrinsic_ball(g, state, root, r + 1);
    longest_pipe_local(&lg, &ball_mask(&lg, r))
}

/// Open subgraph spanned by edges incident to vertices at intrinsic distance `< depth`.
pub fn intrinsic_ball<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, depth: u32) -> LocalGraph {
    let mut dist: HashMap<u32, u32> = HashMap::from([(root, 0)]);
    let mut edges = Vec::new();
    let mut q = VecDeque::from([root]);
    let mut done: HashSet<u32> = HashSet::new();
    while let Some(v) = q.pop_front() {
        let dv = dist[&v];
        done.insert(v);
        if dv >= depth || g.is_boundary(v) {
            continue;
        }
        for &(w, e) in g.neighbors(v) {
            if !state.is_open(e) || done.contains(&w) {
                continue;
            }
            edges.push(e);
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(dv + 1);
                q.push_back(w);
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    LocalGraph::from_edges(g, root, &edges)
}

/// Per-cluster summary written by the anatomy command.
#[derive(Debug, Clone, Serialize)]
pub struct AnatomyReport {
    #[serde(rename = "E_v")]
    pub e_v: usize,
    #[serde(rename = "K_v")]
    pub k_v: usize,
    #[serde(rename = "R_v")]
    pub r_v: u32,
    pub censored: bool,
    /// `None` on censored clusters, where only part of the cluster is known.
    pub bridges: Option<usize>,
    pub br_k: BTreeMap<usize, usize>,
    pub furcations: Vec<u32>,
    pub longest_pipe: Option<usize>,
}

/// Anatomy of the cluster of `root` in `state`. Censored clusters get the
/// fields that make sense on a partial exploration only.
pub fn anatomy<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, k_max: usize) -> Result<AnatomyReport> {
    let c = Explorer::new(g).cluster(g, state, root);
    let mut br = BTreeMap::new();
    let mut bridges = None;
    let mut pipe = None;
    if !c.censored {
        let t = bridge_tree(g, &c)?;
        bridges = Some(t.bridge_count());
        for k in 1..=k_max {
            br.insert(k, br_k_tree(&t, k)?);
        }
        pipe = Some(longest_pipe(g, &c, c.intrinsic_radius));
    }
    let furcations = if g.has_boundary() { furcation_set(g, state, Some(&c.vertices)) } else { Vec::new() };
    Ok(AnatomyReport {
        e_v: c.e_v(),
        k_v: c.size(),
        r_v: c.intrinsic_radius,
        censored: c.censored,
        bridges,
        br_k: br,
        furcations,
        longest_pipe: pipe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{explore_component, explore_with};
    use crate::graph::Family;

    #[test]
    fn euler_examples() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 3 }).unwrap();
        let all = vec![true; g.edge_count()];
        let c = explore_component(&g, &all, 0, true).unwrap();
        let r = euler_paths_check(&g, &c, &[0]).unwrap();
        assert_eq!(r, EulerCheck { bound: 1, achieved: 3, ok: true });
        let r = euler_paths_check(&g, &c, &[]).unwrap();
        assert_eq!(r, EulerCheck { bound: 0, achieved: 0, ok: true });
        // closing both child edges of vertex 1 leaves it as an interior leaf
        let mut open = all.clone();
        open[3] = false;
        open[4] = false;
        let c = explore_component(&g, &open, 0, true).unwrap();
        assert!(matches!(euler_paths_check(&g, &c, &[0]), Err(Error::State(_))));
    }

    #[test]
    fn furcation_examples() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 3 }).unwrap();
        let all = vec![true; g.edge_count()];
        let f = furcation_set(&g, &all, None);
        let interior: Vec<u32> = (0..g.vertex_count() as u32).filter(|&v| !g.is_boundary(v)).collect();
        assert_eq!(f, interior);
        // a single path from halo to halo through the root
        let mut open = vec![false; g.edge_count()];
        let d = g.bfs_distances(0, |_| true);
        let leaf_a = (0..g.vertex_count() as u32).find(|&v| d[v as usize] == 3).unwrap();
        let leaf_b = (0..g.vertex_count() as u32).rev().find(|&v| d[v as usize] == 3).unwrap();
        for leaf in [leaf_a, leaf_b] {
            let mut v = leaf;
            while v != 0 {
                let &(u, e) = g.neighbors(v).iter().find(|&&(u, _)| d[u as usize] + 1 == d[v as usize]).unwrap();
                open[e as usize] = true;
                v = u;
            }
        }
        assert!(furcation_set(&g, &open, None).is_empty());
        // three-star centre
        let e: Vec<(u32, u32)> = vec![(0, 1), (0, 2), (0, 3)];
        let s = Graph::explicit(4, &e).unwrap().with_boundary(&[1, 2, 3]).unwrap();
        assert_eq!(furcation_set(&s, &vec![true; 3], None), vec![0]);
    }

    #[test]
    fn burton_keane_extremes() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 4 }).unwrap();
        let b = burton_keane_statistic(&g, 1.0, 20, 1, &[0], 1).unwrap();
        assert_eq!(b.mean_menger, 3.0);
        let b = burton_keane_statistic(&g, 0.0, 20, 1, &[0], 1).unwrap();
        assert_eq!(b.mean_menger, 0.0);
        assert_eq!(b.edge_boundary_volume, 3);
    }

    #[test]
    fn pipe_examples() {
        let path: Vec<(u32, u32)> = (0..5).map(|i| (i, i + 1)).collect();
        let g = Graph::explicit(6, &path).unwrap();
        let all = |g: &Graph| vec![true; g.edge_count()];
        let c = explore_with(&g, &all(&g), 0).unwrap();
        assert_eq!(longest_pipe(&g, &c, 10), 5);
        assert_eq!(longest_pipe(&g, &c, 3), 3);
        let cyc = Graph::explicit(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c = explore_with(&cyc, &all(&cyc), 0).unwrap();
        assert_eq!(longest_pipe(&cyc, &c, 10), 0);
        let lolli = Graph::explicit(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5)]).unwrap();
        let c = explore_with(&lolli, &all(&lolli), 0).unwrap();
        assert_eq!(longest_pipe(&lolli, &c, 10), 4);
        let star = Graph::explicit(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = explore_with(&star, &all(&star), 0).unwrap();
        assert_eq!(longest_pipe(&star, &c, 10), 1);
        let tree = Graph::generate(&Family::RegularTree { d: 3, radius: 8 }).unwrap();
        assert_eq!(longest_pipe_in_ball(&tree, &all(&tree), 0, 5), 1);
    }

    #[test]
    fn anatomy_report_fields() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 6 }).unwrap();
        let st = Config { labels: EdgeLabelSample::new(5), p: 0.4 };
        let a = anatomy(&g, &st, 0, 3).unwrap();
        if !a.censored {
            assert_eq!(a.e_v, 2 * a.k_v + 1);
            assert_eq!(a.bridges, Some(a.k_v - 1));
            assert!(a.br_k[&3] <= a.e_v);
        }
    }
}
