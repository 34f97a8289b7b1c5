//! Finite exhaustions of the graph families, with a boundary halo standing in
//! for "infinity".

mod animals;
mod isoperimetry;

pub use animals::{for_each_edge_animal, Step};

pub use isoperimetry::{cheeger_exact, for_each_connected_vertex_set, IsoperimetricReport};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::HashSet;
use std::path::Path;

/// Which generator built a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTag {
    pub name: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

/// Generator requests.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Ball of radius `radius` in the `d`-regular tree.
    RegularTree { d: u32, radius: u32 },
    /// `side^d` box of the hypercubic lattice.
    Hypercubic { d: u32, side: u32 },
    /// `side^3` box where every interior lattice vertex also roots a binary
    /// tree of the given depth; the tree leaves join the halo.
    TreeDecoratedZ3 { tree_depth: u32, side: u32 },
    /// Complete binary tree of the given depth; leaves are the halo.
    BinaryTree { depth: u32 },
    /// Arbitrary simple graph, empty halo.
    Explicit { vertex_count: usize, edges: Vec<(u32, u32)> },
}

/// Immutable simple graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<u32>,
    adj: Vec<(u32, u32)>,
    edges: Vec<[u32; 2]>,
    halo: Vec<bool>,
    family: FamilyTag,
    root: u32,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertex_count: usize,
    edges: Vec<[u32; 2]>,
    boundary: Vec<u32>,
    family: FamilyTag,
}

fn param_err(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

impl Graph {
    /// Builds the adjacency arrays from an edge list. Edge ids are list positions.
    fn assemble(vertex_count: usize, edges: Vec<[u32; 2]>, halo: Vec<bool>, family: FamilyTag, root: u32) -> Graph {
        let mut offsets = vec![0u32; vertex_count + 1];
        for &[u, v] in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..vertex_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill: Vec<u32> = offsets[..vertex_count].to_vec();
        let mut adj = vec![(0u32, 0u32); 2 * edges.len()];
        for (e, &[u, v]) in edges.iter().enumerate() {
            adj[fill[u as usize] as usize] = (v, e as u32);
            fill[u as usize] += 1;
            adj[fill[v as usize] as usize] = (u, e as u32);
            fill[v as usize] += 1;
        }
        Graph { offsets, adj, edges, halo, family, root }
    }

    /// Validating constructor for user-supplied graphs.
    pub fn from_parts(
        vertex_count: usize,
        edges: Vec<[u32; 2]>,
        boundary: &[u32],
        family: FamilyTag,
    ) -> Result<Graph> {
        if vertex_count == 0 {
            return Err(param_err("graph needs at least one vertex"));
        }
        if vertex_count > u32::MAX as usize / 2 || edges.len() > u32::MAX as usize / 2 {
            return Err(Error::Size("graph too large for 32-bit ids".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &[u, v]) in edges.iter().enumerate() {
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(param_err(format!("edge {i} has an endpoint out of range")));
            }
            if u == v {
                return Err(param_err(format!("edge {i} is a self-loop")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(param_err(format!("edge {i} duplicates an earlier edge")));
            }
        }
        let mut halo = vec![false; vertex_count];
        for &b in boundary {
            if b as usize >= vertex_count {
                return Err(param_err(format!("boundary vertex {b} out of range")));
            }
            halo[b as usize] = true;
        }
        let root = match family.params.get("root") {
            Some(v) => v
                .as_u64()
                .filter(|&r| (r as usize) < vertex_count)
                .ok_or_else(|| param_err("family root must be a vertex id"))? as u32,
            None => 0,
        };
        Ok(Graph::assemble(vertex_count, edges, halo, family, root))
    }

    pub fn generate(family: &Family) -> Result<Graph> {
        match *family {
            Family::RegularTree { d, radius } => regular_tree(d, radius),
            Family::Hypercubic { d, side } => hypercubic(d, side),
            Family::TreeDecoratedZ3 { tree_depth, side } => tree_decorated_z3(tree_depth, side),
            Family::BinaryTree { depth } => binary_tree(depth),
            Family::Explicit { vertex_count, ref edges } => Graph::from_parts(
                vertex_count,
                edges.iter().map(|&(u, v)| [u, v]).collect(),
                &[],
                FamilyTag { name: "explicit".into(), params: Map::new() },
            ),
        }
    }

    pub fn explicit(vertex_count: usize, edges: &[(u32, u32)]) -> Result<Graph> {
        Graph::generate(&Family::Explicit { vertex_count, edges: edges.to_vec() })
    }

    /// Same edges, different halo.
    pub fn with_boundary(&self, boundary: &[u32]) -> Result<Graph> {
        Graph::from_parts(self.vertex_count(), self.edges.clone(), boundary, self.family.clone())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.halo.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[(u32, u32)] {
        let a = self.offsets[v as usize] as usize;
        let b = self.offsets[v as usize + 1] as usize;
        &self.adj[a..b]
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    #[inline]
    pub fn endpoints(&self, e: u32) -> [u32; 2] {
        self.edges[e as usize]
    }

    #[inline]
    pub fn other(&self, e: u32, v: u32) -> u32 {
        let [a, b] = self.edges[e as usize];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    #[inline]
    pub fn is_boundary(&self, v: u32) -> bool {
        self.halo[v as usize]
    }

    pub fn has_boundary(&self) -> bool {
        self.halo.iter().any(|&b| b)
    }

    pub fn boundary(&self) -> Vec<u32> {
        (0..self.vertex_count() as u32).filter(|&v| self.halo[v as usize]).collect()
    }

    pub fn family(&self) -> &FamilyTag {
        &self.family
    }

    /// Designated centre vertex (`params.root`, default 0).
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = GraphDoc {
            vertex_count: self.vertex_count(),
            edges: self.edges.clone(),
            boundary: self.boundary(),
            family: self.family.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        Graph::from_parts(doc.vertex_count, doc.edges, &doc.boundary, doc.family)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Graph distances from `src` over the edges accepted by `keep`; `u32::MAX` if unreachable.
    pub fn bfs_distances(&self, src: u32, keep: impl Fn(u32) -> bool) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in self.neighbors(v) {
                if dist[w as usize] == u32::MAX && keep(e) {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

fn tag(name: &str, params: &[(&str, u64)]) -> FamilyTag {
    FamilyTag {
        name: name.into(),
        params: params.iter().map(|&(k, v)| (k.to_string(), Value::from(v))).collect(),
    }
}

fn checked_count(x: u128, what: &str) -> Result<usize> {
    if x > (u32::MAX / 2) as u128 {
        return Err(Error::Size(format!("{what}: {x} vertices exceeds the 32-bit id range")));
    }
    Ok(x as usize)
}

fn regular_tree(d: u32, radius: u32) -> Result<Graph> {
    if d < 3 {
        return Err(param_err("regular tree needs degree d >= 3"));
    }
    if radius < 1 {
        return Err(param_err("regular tree needs radius >= 1"));
    }
    // shell sizes d(d-1)^(l-1)
    let mut n: u128 = 1;
    let mut shell: u128 = d as u128;
    for _ in 0..radius {
        n += shell;
        if n > u32::MAX as u128 {
            break;
        }
        shell *= (d - 1) as u128;
    }
    let n = checked_count(n, "regular tree")?;
    let first_shell = n - ((shell / (d as u128 - 1)) as usize);
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1u32;
    let mut v = 0u32;
    while (next as usize) < n {
        let kids = if v == 0 { d } else { d - 1 };
        for _ in 0..kids {
            edges.push([v, next]);
            next += 1;
        }
        v += 1;
    }
    let mut halo = vec![false; n];
    halo[first_shell..].iter_mut().for_each(|b| *b = true);
    let t = tag("regular_tree", &[("d", d as u64), ("radius", radius as u64), ("root", 0)]);
    Ok(Graph::assemble(n, edges, halo, t, 0))
}

fn hypercubic(d: u32, side: u32) -> Result<Graph> {
    if d < 1 {
        return Err(param_err("hypercubic lattice needs dimension d >= 1"));
    }
    if side < 2 {
        return Err(param_err("hypercubic box needs side >= 2"));
    }
    let n = checked_count((side as u128).pow(d), "hypercubic box")?;
    let mut stride = vec![1usize; d as usize];
    for i in 1..d as usize {
        stride[i] = stride[i - 1] * side as usize;
    }
    let mut edges = Vec::with_capacity(d as usize * n);
    let mut halo = vec![false; n];
    let mut coord = vec![0u32; d as usize];
    for v in 0..n {
        for i in 0..d as usize {
            if coord[i] + 1 < side {
                edges.push([v as u32, (v + stride[i]) as u32]);
            }
        }
        halo[v] = coord.iter().any(|&c| c == 0 || c == side - 1);
        for c in coord.iter_mut() {
            *c += 1;
            if *c < side {
                break;
            }
            *c = 0;
        }
    }
    let centre: usize = stride.iter().map(|s| s * (side as usize / 2)).sum();
    let t = tag("hypercubic", &[("d", d as u64), ("side", side as u64), ("root", centre as u64)]);
    Ok(Graph::assemble(n, edges, halo, t, centre as u32))
}

fn tree_decorated_z3(tree_depth: u32, side: u32) -> Result<Graph> {
    if tree_depth < 1 {
        return Err(param_err("decoration depth must be >= 1"));
    }
    if side < 3 {
        return Err(param_err("decorated lattice needs side >= 3 so it has interior vertices"));
    }
    let base = hypercubic(3, side)?;
    let interior: Vec<u32> = (0..base.vertex_count() as u32).filter(|&v| !base.is_boundary(v)).collect();
    let per_tree = (1u128 << (tree_depth + 1)) - 2;
    let n = checked_count(base.vertex_count() as u128 + interior.len() as u128 * per_tree, "decorated lattice")?;
    let mut edges = base.edges.clone();
    let mut halo = base.halo.clone();
    halo.resize(n, false);
    let mut next = base.vertex_count() as u32;
    for &r in &interior {
        // binary tree hanging off r, built level by level
        let mut level = vec![r];
        for depth in 1..=tree_depth {
            let mut below = Vec::with_capacity(level.len() * 2);
            for &u in &level {
                for _ in 0..2 {
                    edges.push([u, next]);
                    if depth == tree_depth {
                        halo[next as usize] = true;
                    }
                    below.push(next);
                    next += 1;
                }
            }
            level = below;
        }
    }
    let t = tag(
        "tree_decorated_z3",
        &[("tree_depth", tree_depth as u64), ("side", side as u64), ("root", base.root as u64)],
    );
    Ok(Graph::assemble(n, edges, halo, t, base.root))
}

fn binary_tree(depth: u32) -> Result<Graph> {
    if depth < 1 {
        return Err(param_err("binary tree needs depth >= 1"));
    }
    let n = checked_count((1u128 << (depth + 1)) - 1, "binary tree")?;
    let edges: Vec<[u32; 2]> = (1..n as u32).map(|c| [(c - 1) / 2, c]).collect();
    let mut halo = vec![false; n];
    halo[(1usize << depth) - 1..].iter_mut().for_each(|b| *b = true);
    let t = tag("binary_tree", &[("depth", depth as u64), ("root", 0)]);
    Ok(Graph::assemble(n, edges, halo, t, 0))
}
