use crate::engine::{explore_cluster, par_trials, Config, EdgeState};
use crate::error::{check_probability, Error, Result};
use crate::graph::{for_each_edge_animal, Graph, Step};
use crate::rng::EdgeLabelSample;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};

/// Exact enumeration stops at this many cluster edges touching `H`.
pub const EXACT_MAX_EDGES: usize = 12;

/// One candidate set inside the cluster `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetRatio {
    /// `|E_K(H)|`: open edges touching `H`.
    pub edges: usize,
    /// `|∂_ω H| / (2 |E_K(H)|)`
    pub edge_ratio: f64,
    /// `|∂_K V(H)| / sum_{u in V(H)} deg_K(u)`
    pub cheeger_ratio: f64,
}

fn open_degree<S: EdgeState + ?Sized>(g: &Graph, state: &S, v: u32) -> usize {
    g.neighbors(v).iter().filter(|&&(_, e)| state.is_open(e)).count()
}

/// Greedy growth inside the open cluster of `root`: repeatedly add the frontier
/// vertex giving the smallest open boundary, ties to the lowest id. Records every
/// induced set with `|E_K| <= max_edges`, plus the first one past it, so that
/// tail minima at `n = max_edges` exist.
pub fn greedy_anchored<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, max_edges: usize) -> Vec<SetRatio> {
    let mut inside: HashSet<u32> = HashSet::from([root]);
    let mut boundary = open_degree(g, state, root);
    let mut internal = 0usize;
    let mut vol = boundary;
    let mut out = Vec::new();
    let record = |boundary: usize, internal: usize, vol: usize, out: &mut Vec<SetRatio>| {
        let edges = boundary + internal;
        if edges > 0 {
            out.push(SetRatio {
                edges,
                edge_ratio: boundary as f64 / (2 * edges) as f64,
                cheeger_ratio: boundary as f64 / vol as f64,
            });
        }
    };
    record(boundary, internal, vol, &mut out);
    while boundary + internal <= max_edges {
        let mut frontier: Vec<u32> = inside
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().filter(|&&(_, e)| state.is_open(e)).map(|&(w, _)| w))
            .filter(|w| !inside.contains(w) && !g.is_boundary(*w))
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        let best = frontier
            .iter()
            .map(|&w| {
                let (mut links, mut deg) = (0, 0);
                for &(x, e) in g.neighbors(w) {
                    if state.is_open(e) {
                        deg += 1;
                        links += inside.contains(&x) as usize;
                    }
                }
                (boundary + deg - 2 * links, w, links, deg)
            })
            .min();
        let Some((nb, w, links, deg)) = best else { break };
        inside.insert(w);
        boundary = nb;
        internal += links;
        vol += deg;
        record(boundary, internal, vol, &mut out);
    }
    out
}

/// Every connected open subgraph `H` containing `root` with `|E_K(H)| <= max_edges`
/// (including the bare root), plus the one-step extensions that overshoot the limit.
pub fn exact_anchored<S: EdgeState + ?Sized>(g: &Graph, state: &S, root: u32, max_edges: usize) -> Result<Vec<SetRatio>> {
    if max_edges > EXACT_MAX_EDGES {
        return Err(Error::Size(format!("exact anchored search is limited to {EXACT_MAX_EDGES} edges")));
    }
    let mut out = Vec::new();
    let mut vs: HashSet<u32> = HashSet::new();
    let _ = for_each_edge_animal(
        g,
        root,
        // an overshooting child may have one edge more than any recorded parent
        max_edges + 1,
        |e| state.is_open(e),
        |v| !g.is_boundary(v),
        |edges, verts| {
            vs.clear();
            vs.extend(verts.iter().copied());
            let (mut vol, mut within) = (0usize, 0usize);
            for &v in verts {
                for &(w, e) in g.neighbors(v) {
                    if state.is_open(e) {
                        vol += 1;
                        within += vs.contains(&w) as usize;
                    }
                }
            }
            // within counts each induced edge twice
            let cut = vol - within;
            let touching = cut + within / 2;
            if touching > 0 {
                let open_boundary = touching - edges.len();
                out.push(SetRatio {
                    edges: touching,
                    edge_ratio: open_boundary as f64 / (2 * touching) as f64,
                    cheeger_ratio: cut as f64 / vol as f64,
                });
            }
            if touching > max_edges {
                Step::Prune
            } else {
                Step::Descend
            }
        },
    );
    Ok(out)
}

/// Smallest ratio among sets with `|E_K| >= n`, per form.
pub fn tail_minimum(sets: &[SetRatio], n: usize) -> Option<(f64, f64)> {
    let it = sets.iter().filter(|s| s.edges >= n);
    let e = it.clone().map(|s| s.edge_ratio).fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.min(x))));
    let c = it.map(|s| s.cheeger_ratio).fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.min(x))));
    e.zip(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchoredRow {
    pub n: usize,
    pub clusters: usize,
    pub greedy_edge_mean: f64,
    pub greedy_edge_min: f64,
    pub greedy_cheeger_mean: f64,
    pub exact_edge_mean: Option<f64>,
    pub exact_edge_min: Option<f64>,
    pub exact_cheeger_mean: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchoredReport {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub censored_clusters: usize,
    pub rows: Vec<AnchoredRow>,
    /// Per censored cluster: exact minimum edge ratio over all sets with `|E_K| <= 12`.
    pub exact_minimum: Vec<f64>,
    /// Clusters where the greedy tail minimum exceeded the exact one at some `n <= 12`.
    pub greedy_gaps: usize,
    pub alpha_half: Option<f64>,
}

struct ClusterProfile {
    greedy: Vec<SetRatio>,
    exact: Vec<SetRatio>,
}

/// Anchored ratios on censored ("infinite") clusters of the root.
pub fn anchored_profile(
    g: &Graph,
    p: f64,
    trials: u64,
    seed: u64,
    size_grid: &[usize],
    zeta: Option<f64>,
    workers: usize,
) -> Result<AnchoredReport> {
    check_probability(p)?;
    if size_grid.is_empty() || size_grid.contains(&0) {
        return Err(Error::Argument("size grid must be nonempty and positive".into()));
    }
    let root = g.root();
    explore_cluster(g, &EdgeLabelSample::new(seed), p, root)?;
    let n_top = *size_grid.iter().max().unwrap();
    let profiles: Vec<ClusterProfile> = par_trials(
        trials,
        workers,
        |range| {
            let mut v = Vec::new();
            for t in range {
                let labels = EdgeLabelSample::for_trial(seed, t);
                if !explore_cluster(g, &labels, p, root).expect("root checked").censored {
                    continue;
                }
                let cfg = Config { labels, p };
                v.push(ClusterProfile {
                    greedy: greedy_anchored(g, &cfg, root, n_top.max(EXACT_MAX_EDGES)),
                    exact: exact_anchored(g, &cfg, root, EXACT_MAX_EDGES).expect("bounded"),
                });
            }
            v
        },
        |mut a, b| {
            a.extend(b);
            a
        },
    );
    if profiles.is_empty() {
        return Err(Error::State(format!(
            "no censored clusters in {trials} trials at p = {p}; raise p or the graph radius"
        )));
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let fmin = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    for &n in size_grid {
        let g_t: Vec<(f64, f64)> = profiles.iter().filter_map(|c| tail_minimum(&c.greedy, n)).collect();
        let e_t: Vec<(f64, f64)> = if n <= EXACT_MAX_EDGES {
            profiles.iter().filter_map(|c| tail_minimum(&c.exact, n)).collect()
        } else {
            Vec::new()
        };
        let ge: Vec<f64> = g_t.iter().map(|x| x.0).collect();
        let gc: Vec<f64> = g_t.iter().map(|x| x.1).collect();
        let ee: Vec<f64> = e_t.iter().map(|x| x.0).collect();
        let ec: Vec<f64> = e_t.iter().map(|x| x.1).collect();
        rows.push(AnchoredRow {
            n,
            clusters: g_t.len(),
            greedy_edge_mean: mean(&ge),
            greedy_edge_min: fmin(&ge),
            greedy_cheeger_mean: mean(&gc),
            exact_edge_mean: (!ee.is_empty()).then(|| mean(&ee)),
            exact_edge_min: (!ee.is_empty()).then(|| fmin(&ee)),
            exact_cheeger_mean: (!ec.is_empty()).then(|| mean(&ec)),
        });
    }
    let exact_minimum = profiles
        .iter()
        .map(|c| fmin(&c.exact.iter().filter(|s| s.edges <= EXACT_MAX_EDGES).map(|s| s.edge_ratio).collect::<Vec<_>>()))
        .collect();
    let greedy_gaps = profiles
        .iter()
        .filter(|c| {
            (1..=EXACT_MAX_EDGES).any(|n| match (tail_minimum(&c.greedy, n), tail_minimum(&c.exact, n)) {
                (Some(gr), Some(ex)) => gr.0 > ex.0 + 1e-12,
                _ => false,
            })
        })
        .count();
    let alpha_half = match zeta {
        Some(z) if p > 0.0 && p < 1.0 => Some(super::alpha::solve_alpha(p, z, 1e-12)?.alpha / 2.0),
        _ => None,
    };
    Ok(AnchoredReport { p, trials, seed, censored_clusters: profiles.len(), rows, exact_minimum, greedy_gaps, alpha_half })
}

impl AnchoredReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# p={}\n# seed={}\n# trials={}\n# censored_clusters={}\n# alpha_half={}\n",
            self.p,
            self.seed,
            self.trials,
            self.censored_clusters,
            self.alpha_half.map_or("NA".to_string(), |a| a.to_string())
        );
        s.push_str("n,clusters,greedy_edge_mean,greedy_edge_min,greedy_cheeger_mean,exact_edge_mean,exact_edge_min,exact_cheeger_mean\n");
        let o = |x: Option<f64>| x.map_or("NA".to_string(), |v| v.to_string());
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                r.clusters,
                r.greedy_edge_mean,
                r.greedy_edge_min,
                r.greedy_cheeger_mean,
                o(r.exact_edge_mean),
                o(r.exact_edge_min),
                o(r.exact_cheeger_mean)
            ));
        }
        s
    }
}

/// Exact ratios of the radius-`r` ball in the fully open `d`-regular tree:
/// `(edge form, Cheeger form)`.
pub fn tree_ball_ratios(d: u64, r: u32) -> ((u64, u64), (u64, u64)) {
    // vertices 1 + d((d-1)^r - 1)/(d-2); boundary d(d-1)^r
    let shell = d * (d - 1).pow(r);
    let vertices = 1 + d * ((d - 1).pow(r) - 1) / (d - 2);
    let internal = vertices - 1;
    ((shell, 2 * (shell + internal)), (shell, d * vertices))
}

/// Per-`n` exact minima of the edge form: `n -> min ratio over |E_K(H)| = n`.
pub fn exact_by_size(sets: &[SetRatio]) -> BTreeMap<usize, f64> {
    let mut m = BTreeMap::new();
    for s in sets {
        let e = m.entry(s.edges).or_insert(f64::INFINITY);
        *e = f64::min(*e, s.edge_ratio);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Family;

    #[test]
    fn tree_balls() {
        // radius 1: 4 vertices, 3 internal edges, 6 shell edges
        assert_eq!(tree_ball_ratios(3, 1), ((6, 18), (6, 12)));
        let ((a, b), (c, d)) = tree_ball_ratios(3, 10);
        assert!((a as f64 / b as f64 - 0.25).abs() < 1e-3);
        assert!((c as f64 / d as f64 - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn open_tree_matches_ball_formula() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 8 }).unwrap();
        let all = vec![true; g.edge_count()];
        let exact = exact_anchored(&g, &all, 0, 12).unwrap();
        // ball of radius 1 touches 3 + 6 = 9 edges
        let by = exact_by_size(&exact);
        assert_eq!(by[&9], 6.0 / 18.0);
        let greedy = greedy_anchored(&g, &all, 0, 12);
        assert!(greedy.iter().any(|s| s.edges == 9 && s.edge_ratio == 6.0 / 18.0));
        // the bare root
        assert_eq!(by[&3], 0.5);
    }

    #[test]
    fn greedy_never_beats_exact() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 14 }).unwrap();
        for t in 0..30 {
            let cfg = Config { labels: EdgeLabelSample::for_trial(11, t), p: 0.8 };
            let ex = exact_anchored(&g, &cfg, 0, 12).unwrap();
            let gr = greedy_anchored(&g, &cfg, 0, 12);
            for n in 1..=12 {
                if let (Some(a), Some(b)) = (tail_minimum(&gr, n), tail_minimum(&ex, n)) {
                    assert!(a.0 >= b.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn no_censored_clusters() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 10 }).unwrap();
        assert!(matches!(anchored_profile(&g, 0.1, 20, 1, &[4], None, 1), Err(Error::State(_))));
    }
}
