//! Shared brute-force oracles and random instances for the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use percolab::engine::Cluster;
use percolab::rng::SplitMix64;
use percolab::Graph;
use std::collections::{HashSet, VecDeque};

/// Connected random graph on `n` vertices with `extra` chords; vertices
/// `halo_from..n` form the halo. Vertex 0 is the root.
pub fn random_halo_graph(rng: &mut SplitMix64, n: usize, extra: usize, halo_from: usize) -> Graph {
    let mut edges = HashSet::new();
    for v in 1..n as u32 {
        let u = rng.below(v as u64) as u32;
        edges.insert((u, v));
    }
    let mut tries = 0;
    while edges.len() < n - 1 + extra && tries < 1000 {
        tries += 1;
        let a = rng.below(n as u64) as u32;
        let b = rng.below(n as u64) as u32;
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
    edges.sort_unstable();
    let halo: Vec<u32> = (halo_from as u32..n as u32).collect();
    Graph::explicit(n, &edges).unwrap().with_boundary(&halo).unwrap()
}

/// Vertices reachable from `src` over `open` edges, skipping edge `skip`.
pub fn reach(g: &Graph, open: &dyn Fn(u32) -> bool, src: &[u32], skip: Option<u32>) -> HashSet<u32> {
    let mut seen: HashSet<u32> = src.iter().copied().collect();
    let mut q: VecDeque<u32> = src.iter().copied().collect();
    while let Some(v) = q.pop_front() {
        for &(w, e) in g.neighbors(v) {
            if Some(e) != skip && open(e) && seen.insert(w) {
                q.push_back(w);
            }
        }
    }
    seen
}

/// Br_k by brute force: the largest number of open edges whose removal cuts some
/// vertex of `W` off from the root, over all `W` of at most `k` cluster vertices.
pub fn br_k_brute(g: &Graph, c: &Cluster, k: usize) -> usize {
    let open: HashSet<u32> = c.open_edges.iter().copied().collect();
    let is_open = |e: u32| open.contains(&e);
    // cut[e] = vertices separated from the root by removing e
    let cuts: Vec<HashSet<u32>> = c
        .open_edges
        .iter()
        .map(|&e| {
            let r = reach(g, &is_open, &[c.root], Some(e));
            c.vertices.iter().copied().filter(|v| !r.contains(v)).collect()
        })
        .collect();
    let vs = &c.vertices;
    let mut best = 0;
    let mut pick = Vec::new();
    fn rec(vs: &[u32], start: usize, k: usize, pick: &mut Vec<u32>, cuts: &[HashSet<u32>], best: &mut usize) {
        let covered = cuts.iter().filter(|s| pick.iter().any(|w| s.contains(w))).count();
        *best = (*best).max(covered);
        if pick.len() == k {
            return;
        }
        for i in start..vs.len() {
            pick.push(vs[i]);
            rec(vs, i + 1, k, pick, cuts, best);
            pick.pop();
        }
    }
    rec(vs, 0, k, &mut pick, &cuts, &mut best);
    best
}

/// Cluster-size law on the infinite d-regular tree from the branch equation
/// `B = x (q + p B)^(d-1)`, root `x (q + p B)^d`, as truncated power series.
pub fn tree_law_series(d: usize, p: &BigRational, n: usize) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mul = |a: &[BigRational], b: &[BigRational]| {
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let shifted_pow = |b: &[BigRational], e: usize| {
        // x * (q + p b)^e
        let mut base: Vec<BigRational> = b.iter().map(|c| c * p).collect();
        base[0] += &q;
        let mut acc = vec![BigRational::zero(); n + 1];
        acc[0] = BigRational::one();
        for _ in 0..e {
            acc = mul(&acc, &base);
        }
        let mut out = vec![BigRational::zero(); n + 1];
        out[1..].clone_from_slice(&acc[..n]);
        out
    };
    let mut b = vec![BigRational::zero(); n + 1];
    for _ in 0..=n {
        b = shifted_pow(&b, d - 1);
    }
    shifted_pow(&b, d)
}

/// One small instance of every CLI subcommand.
pub const CLI_CASES: &[&[&str]] = &[
    &["gen", "--family", "tree", "--degree", "3", "--radius", "6"],
    &["tail", "--family", "tree", "--degree", "3", "--radius", "10", "--p", "0.7", "--trials", "3000", "--seed", "7", "--stretched-from", "3"],
    &["observables", "--family", "hypercubic", "--dim", "2", "--side", "9", "--p", "0.5", "--trials", "500", "--pair", "40,41"],
    &["anatomy", "--family", "tree", "--degree", "3", "--radius", "6", "--p", "0.5", "--trials", "20", "--seed", "2"],
    &["menger", "--family", "tree", "--degree", "3", "--radius", "6", "--p", "0.8", "--trials", "200"],
    &["furcations", "--family", "decorated", "--side", "4", "--depth", "2", "--p", "0.7", "--seed", "3"],
    &["exact-check", "russo", "--corpus", "k4", "--n", "6", "--p-grid", "9", "--functional", "ev"],
    &["q-table", "--corpus", "tree3_r2_halo", "--k-max", "2"],
    &["tree-law", "--degree", "3", "--p", "0.7", "--n-max", "300"],
    &["bounds", "--corpus", "theta", "--ps", "0.3,0.7", "--trials", "500"],
    &["alpha", "--p", "0.8", "--degree", "3"],
    &["anchored", "--family", "tree", "--degree", "3", "--radius", "10", "--p", "0.9", "--trials", "30"],
    &["walk", "--family", "tree", "--degree", "3", "--radius", "10", "--p", "0.7", "--n-max", "50"],
    &["pipes", "--family", "tree", "--degree", "3", "--radius", "10", "--p", "0.7", "--trials", "60", "--radii", "2,4,6"],
];

/// Runs `percolab <args> --out <dir>/<tag>` and returns (exit code, output bytes, manifest).
pub fn run_cli(bin: &str, args: &[&str], dir: &std::path::Path, tag: &str) -> (i32, Vec<u8>, serde_json::Value) {
    let out = dir.join(tag);
    let status = std::process::Command::new(bin)
        .args(args)
        .arg("--out")
        .arg(&out)
        .env("PERCOLAB_WORKERS", "1")
        .output()
        .expect("binary runs");
    let code = status.status.code().unwrap_or(-1);
    let bytes = std::fs::read(&out).unwrap_or_default();
    let manifest = std::fs::read_to_string(percolab::experiment::manifest_path(&out))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(serde_json::Value::Null);
    (code, bytes, manifest)
}
