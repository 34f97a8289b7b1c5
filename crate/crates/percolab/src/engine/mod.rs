//! Grand-coupled bond percolation and cluster exploration.

mod observables;
mod tail;

pub use observables::{observables, Observables};
pub use tail::{stretched_fit, tail_histogram, FitWindow, StretchedFit, TailReport, ZetaFit};

use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use std::collections::{HashMap, VecDeque};

/// Anything that can say whether an edge is open.
pub trait EdgeState {
    fn is_open(&self, e: u32) -> bool;
}

/// Percolation configuration `{e : U_e < p}` of a label sample.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub labels: EdgeLabelSample,
    pub p: f64,
}

impl EdgeState for Config {
    #[inline]
    fn is_open(&self, e: u32) -> bool {
        self.labels.is_open(e, self.p)
    }
}

impl EdgeState for [bool] {
    #[inline]
    fn is_open(&self, e: u32) -> bool {
        self[e as usize]
    }
}

impl EdgeState for Vec<bool> {
    #[inline]
    fn is_open(&self, e: u32) -> bool {
        self[e as usize]
    }
}

/// Bit `e` set means edge `e` is open. Only for graphs with at most 64 edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mask(pub u64);

impl EdgeState for Mask {
    #[inline]
    fn is_open(&self, e: u32) -> bool {
        self.0 >> e & 1 == 1
    }
}

impl<T: EdgeState + ?Sized> EdgeState for &T {
    #[inline]
    fn is_open(&self, e: u32) -> bool {
        (**self).is_open(e)
    }
}

/// Open cluster of a root vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub root: u32,
    /// Vertices in discovery order; `vertices[0]` is the root.
    pub vertices: Vec<u32>,
    pub open_edges: Vec<u32>,
    pub boundary_edges: Vec<u32>,
    pub intrinsic_radius: u32,
    pub censored: bool,
}

impl Cluster {
    /// `E_v`: number of edges touching the cluster.
    pub fn e_v(&self) -> usize {
        self.open_edges.len() + self.boundary_edges.len()
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn touched_edges(&self) -> Vec<u32> {
        let mut t: Vec<u32> = self.open_edges.iter().chain(&self.boundary_edges).copied().collect();
        t.sort_unstable();
        t
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vertices.contains(&v)
    }

    /// Local adjacency of the open subgraph: `vertex -> [(neighbour, edge)]`.
    pub fn open_adjacency(&self, g: &Graph) -> HashMap<u32, Vec<(u32, u32)>> {
        let mut adj: HashMap<u32, Vec<(u32, u32)>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &e in &self.open_edges {
            let [a, b] = g.endpoints(e);
            adj.entry(a).or_default().push((b, e));
            adj.entry(b).or_default().push((a, e));
        }
        adj
    }
}

/// Cheap per-trial record used by the Monte Carlo loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub vertices: u64,
    pub open: u64,
    pub closed: u64,
    pub censored: bool,
}

impl Summary {
    pub fn e_v(&self) -> u64 {
        self.open + self.closed
    }
}

/// Reusable exploration workspace. Generation stamps avoid clearing per trial.
pub struct Explorer {
    stamp: Vec<u32>,
    gen: u32,
    stack: Vec<u32>,
    found: Vec<u32>,
}

impl Explorer {
    pub fn new(g: &Graph) -> Self {
        Explorer { stamp: vec![0; g.vertex_count()], gen: 0, stack: Vec::new(), found: Vec::new() }
    }

    fn next_gen(&mut self) -> (u32, u32) {
        if self.gen >= u32::MAX / 2 - 2 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.gen = 0;
        }
        self.gen += 1;
        (2 * self.gen, 2 * self.gen + 1)
    }

    /// Depth-first exploration. Each edge is tallied by the first of its
    /// endpoints to be processed, so every touched edge counts once.
    fn run<S: EdgeState + ?Sized>(
        &mut self,
        g: &Graph,
        state: &S,
        root: u32,
        mut on_edge: impl FnMut(u32, bool),
    ) -> Summary {
        let (disc, done) = self.next_gen();
        self.stack.clear();
        self.found.clear();
        self.stamp[root as usize] = disc;
        self.stack.push(root);
        self.found.push(root);
        let (mut open, mut closed) = (0u64, 0u64);
        while let Some(v) = self.stack.pop() {
            self.stamp[v as usize] = done;
            for &(w, e) in g.neighbors(v) {
                let s = self.stamp[w as usize];
                if s == done {
                    continue;
                }
                if state.is_open(e) {
                    open += 1;
                    on_edge(e, true);
                    if s != disc {
                        self.stamp[w as usize] = disc;
                        self.found.push(w);
                        if g.is_boundary(w) {
                            return Summary { vertices: self.found.len() as u64, open, closed, censored: true };
                        }
                        self.stack.push(w);
                    }
                } else {
                    closed += 1;
                    on_edge(e, false);
                }
            }
        }
        Summary { vertices: self.found.len() as u64, open, closed, censored: false }
    }

    /// Full open component of `root`. Halo vertices are recorded but never
    /// expanded when `absorb_halo` is set; otherwise the walk goes through them.
    pub fn component<S: EdgeState + ?Sized>(&mut self, g: &Graph, state: &S, root: u32, absorb_halo: bool) -> Cluster {
        let (disc, done) = self.next_gen();
        self.stack.clear();
        self.found.clear();
        self.stamp[root as usize] = disc;
        self.stack.push(root);
        self.found.push(root);
        let mut open_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        let mut censored = g.is_boundary(root);
        while let Some(v) = self.stack.pop() {
            self.stamp[v as usize] = done;
            for &(w, e) in g.neighbors(v) {
                let s = self.stamp[w as usize];
                if s == done {
                    continue;
                }
                if !state.is_open(e) {
                    boundary_edges.push(e);
                    continue;
                }
                open_edges.push(e);
                if s != disc {
                    self.stamp[w as usize] = disc;
                    self.found.push(w);
                    if g.is_boundary(w) {
                        censored = true;
                        if absorb_halo {
                            // leave it discovered but unprocessed
                            continue;
                        }
                    }
                    self.stack.push(w);
                }
            }
        }
        open_edges.sort_unstable();
        boundary_edges.sort_unstable();
        let mut c = Cluster {
            root,
            vertices: self.found.clone(),
            open_edges,
            boundary_edges,
            intrinsic_radius: 0,
            censored,
        };
        c.intrinsic_radius = intrinsic_radius(g, &c);
        c
    }

    pub fn summary<S: EdgeState + ?Sized>(&mut self, g: &Graph, state: &S, root: u32) -> Summary {
        self.run(g, state, root, |_, _| {})
    }

    /// Vertices found by the last exploration.
    pub fn last_vertices(&self) -> &[u32] {
        &self.found
    }

    pub fn cluster<S: EdgeState + ?Sized>(&mut self, g: &Graph, state: &S, root: u32) -> Cluster {
        let mut open_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        let s = self.run(g, state, root, |e, o| if o { open_edges.push(e) } else { boundary_edges.push(e) });
        open_edges.sort_unstable();
        boundary_edges.sort_unstable();
        let mut c = Cluster {
            root,
            vertices: self.found.clone(),
            open_edges,
            boundary_edges,
            intrinsic_radius: 0,
            censored: s.censored,
        };
        c.intrinsic_radius = intrinsic_radius(g, &c);
        c
    }
}

/// Largest open-graph distance from the root among the cluster's vertices.
pub fn intrinsic_radius(g: &Graph, c: &Cluster) -> u32 {
    let adj = c.open_adjacency(g);
    let mut dist: HashMap<u32, u32> = HashMap::with_capacity(c.vertices.len());
    dist.insert(c.root, 0);
    let mut q = VecDeque::from([c.root]);
    let mut best = 0;
    while let Some(v) = q.pop_front() {
        let dv = dist[&v];
        best = best.max(dv);
        for &(w, _) in &adj[&v] {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(dv + 1);
                q.push_back(w);
            }
        }
    }
    best
}

fn check_root(g: &Graph, root: u32) -> Result<()> {
    if root as usize >= g.vertex_count() {
        return Err(Error::Argument(format!("root {root} is not a vertex")));
    }
    if g.is_boundary(root) {
        return Err(Error::Argument(format!("root {root} lies on the boundary halo")));
    }
    Ok(())
}

/// Explores the open cluster of `root` in the configuration `labels` at `p`.
pub fn explore_cluster(g: &Graph, labels: &EdgeLabelSample, p: f64, root: u32) -> Result<Cluster> {
    check_probability(p)?;
    check_root(g, root)?;
    Ok(Explorer::new(g).cluster(g, &Config { labels: *labels, p }, root))
}

/// Same as [`explore_cluster`] for an arbitrary edge state.
pub fn explore_with<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32) -> Result<Cluster> {
    check_root(g, root)?;
    Ok(Explorer::new(g).cluster(g, state, root))
}

/// Whole open component of `root`, not stopped at the halo (see [`Explorer::component`]).
pub fn explore_component<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, absorb_halo: bool) -> Result<Cluster> {
    if root as usize >= g.vertex_count() {
        return Err(Error::Argument(format!("root {root} is not a vertex")));
    }
    Ok(Explorer::new(g).component(g, state, root, absorb_halo))
}

/// `h_p = p |boundary| - (1 - p) |open|`.
pub fn fluctuation(cluster: &Cluster, p: f64) -> Result<f64> {
    check_probability(p)?;
    if cluster.censored {
        return Err(Error::State("fluctuation of a censored cluster is undefined".into()));
    }
    Ok(p * cluster.boundary_edges.len() as f64 - (1.0 - p) * cluster.open_edges.len() as f64)
}

/// Worker count: `PERCOLAB_WORKERS` wins over the requested value; 0 means all cores.
pub fn resolve_workers(requested: usize) -> usize {
    let env = std::env::var("PERCOLAB_WORKERS").ok().and_then(|s| s.trim().parse::<usize>().ok());
    match env.unwrap_or(requested) {
        0 => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        n => n,
    }
}

/// Fixed chunk count, so the partition of trials (and any floating-point
/// accumulation inside chunks) is the same for every worker count.
const TRIAL_CHUNKS: u64 = 64;

/// Splits `0..trials` into contiguous chunks, runs `job` on each in parallel and
/// folds the partial results with `merge` in chunk order. Results do not depend on `workers`.
pub(crate) fn par_trials<T: Send>(
    trials: u64,
    workers: usize,
    job: impl Fn(std::ops::Range<u64>) -> T + Sync,
    merge: impl Fn(T, T) -> T,
) -> T {
    let workers = resolve_workers(workers).max(1);
    let chunks = TRIAL_CHUNKS.min(trials.max(1));
    let bounds: Vec<std::ops::Range<u64>> = (0..chunks)
        .map(|i| (trials * i / chunks)..(trials * (i + 1) / chunks))
        .collect();
    let parts: Vec<T> = if workers == 1 || chunks == 1 {
        bounds.iter().map(|r| job(r.clone())).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
        match pool {
            Ok(pool) => pool.install(|| bounds.par_iter().map(|r| job(r.clone())).collect()),
            Err(_) => bounds.iter().map(|r| job(r.clone())).collect(),
        }
    };
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one chunk");
    it.fold(first, merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    fn tree(r: u32) -> Graph {
        Graph::generate(&Family::RegularTree { d: 3, radius: r }).unwrap()
    }

    #[test]
    fn p_zero_is_isolated_root() {
        let g = tree(3);
        let c = explore_cluster(&g, &EdgeLabelSample::new(1), 0.0, 0).unwrap();
        assert_eq!(c.vertices, vec![0]);
        assert!(c.open_edges.is_empty());
        assert_eq!(c.e_v(), 3);
        assert_eq!(c.intrinsic_radius, 0);
        assert!(!c.censored);
    }

    #[test]
    fn p_one_reaches_halo() {
        let g = tree(2);
        let c = explore_cluster(&g, &EdgeLabelSample::new(1), 1.0, 0).unwrap();
        assert!(c.censored);
    }

    #[test]
    fn root_on_halo_rejected() {
        let g = tree(2);
        assert!(matches!(explore_cluster(&g, &EdgeLabelSample::new(1), 0.5, 9), Err(Error::Argument(_))));
        assert!(explore_cluster(&g, &EdgeLabelSample::new(1), 1.5, 0).is_err());
    }

    #[test]
    fn fluctuation_values() {
        let g = tree(3);
        let c = explore_cluster(&g, &EdgeLabelSample::new(1), 0.0, 0).unwrap();
        assert!((fluctuation(&c, 0.3).unwrap() - 0.9).abs() < 1e-12);
        // single open edge between two degree-3 vertices
        let mut open = vec![false; g.edge_count()];
        open[0] = true;
        let c = explore_with(&g, &open, 0).unwrap();
        assert_eq!((c.open_edges.len(), c.boundary_edges.len()), (1, 4));
        let p = 0.37;
        assert!((fluctuation(&c, p).unwrap() - (5.0 * p - 1.0)).abs() < 1e-12);
        let cens = explore_cluster(&g, &EdgeLabelSample::new(1), 1.0, 0).unwrap();
        assert!(matches!(fluctuation(&cens, 0.5), Err(Error::State(_))));
    }

    #[test]
    fn cluster_invariants_on_cycle_rich_graph() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 9 }).unwrap();
        let mut ex = Explorer::new(&g);
        for seed in 0..200 {
            let st = Config { labels: EdgeLabelSample::new(seed), p: 0.45 };
            let c = ex.cluster(&g, &st, g.root());
            assert_eq!(c.censored, c.vertices.iter().any(|&v| g.is_boundary(v)));
            if c.censored {
                continue;
            }
            let mut t = c.touched_edges();
            t.dedup();
            assert_eq!(t.len(), c.e_v());
            let set: std::collections::HashSet<u32> = c.vertices.iter().copied().collect();
            for &e in &c.open_edges {
                let [a, b] = g.endpoints(e);
                assert!(set.contains(&a) && set.contains(&b) && st.is_open(e));
            }
            for &e in &c.boundary_edges {
                let [a, b] = g.endpoints(e);
                assert!(set.contains(&a) || set.contains(&b));
                assert!(!st.is_open(e));
            }
            // every incident edge of the cluster is touched; closed chords twice
            let incident: usize = c.vertices.iter().map(|&v| g.degree(v)).sum();
            let chords = c
                .boundary_edges
                .iter()
                .filter(|&&e| g.endpoints(e).iter().all(|x| set.contains(x)))
                .count();
            assert_eq!(incident, 2 * c.open_edges.len() + c.boundary_edges.len() + chords);
        }
    }

    #[test]
    fn component_matches_cluster_when_finite() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 9 }).unwrap();
        let mut ex = Explorer::new(&g);
        for seed in 0..100 {
            let st = Config { labels: EdgeLabelSample::new(seed), p: 0.5 };
            let a = ex.cluster(&g, &st, g.root());
            let b = ex.component(&g, &st, g.root(), true);
            assert_eq!(a.censored, b.censored);
            if !a.censored {
                assert_eq!(a, b);
            } else {
                assert!(b.vertices.len() >= a.vertices.len());
            }
        }
    }

    #[test]
    fn tree_identity() {
        let g = tree(12);
        let mut ex = Explorer::new(&g);
        for seed in 0..500 {
            let s = ex.summary(&g, &Config { labels: EdgeLabelSample::new(seed), p: 0.5 }, 0);
            if !s.censored {
                assert_eq!(s.e_v(), 2 * s.vertices + 1);
            }
        }
    }

    #[test]
    fn single_vertex_law() {
        // P(E_v = 3) = (1-p)^3 = 1/8 at p = 1/2
        let g = tree(6);
        let mut ex = Explorer::new(&g);
        let n = 40_000u64;
        let hits = (0..n)
            .filter(|&t| {
                let s = ex.summary(&g, &Config { labels: EdgeLabelSample::for_trial(42, t), p: 0.5 }, 0);
                !s.censored && s.e_v() == 3
            })
            .count() as f64;
        let se = (0.125f64 * 0.875 / n as f64).sqrt();
        assert!((hits / n as f64 - 0.125).abs() < 3.0 * se);
    }
}
