use crate::engine::Cluster;
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

/// Open subgraph of a cluster with local indices; index 0 is the root.
#[derive(Debug, Clone)]
pub struct LocalGraph {
    pub vertices: Vec<u32>,
    pub index: HashMap<u32, usize>,
    /// `(local neighbour, global edge id)`
    pub adj: Vec<Vec<(usize, u32)>>,
}

impl LocalGraph {
    pub fn of_cluster(g: &Graph, c: &Cluster) -> LocalGraph {
        LocalGraph::from_edges(g, c.root, &c.open_edges)
    }

    /// Subgraph spanned by `edges`, plus `root` even if isolated.
    pub fn from_edges(g: &Graph, root: u32, edges: &[u32]) -> LocalGraph {
        let mut vertices = vec![root];
        let mut index = HashMap::from([(root, 0usize)]);
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
        let mut id = |v: u32, vertices: &mut Vec<u32>, adj: &mut Vec<Vec<(usize, u32)>>| -> usize {
            *index.entry(v).or_insert_with(|| {
                vertices.push(v);
                adj.push(Vec::new());
                vertices.len() - 1
            })
        };
        for &e in edges {
            let [a, b] = g.endpoints(e);
            let ia = id(a, &mut vertices, &mut adj);
            let ib = id(b, &mut vertices, &mut adj);
            adj[ia].push((ib, e));
            adj[ib].push((ia, e));
        }
        LocalGraph { vertices, index, adj }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Bridges (global edge ids, sorted) by iterative low-link search.
    pub fn bridges(&self) -> Vec<u32> {
        let n = self.len();
        let mut disc = vec![u32::MAX; n];
        let mut low = vec![0u32; n];
        let mut out = Vec::new();
        let mut time = 0u32;
        for s in 0..n {
            if disc[s] != u32::MAX {
                continue;
            }
            // frames: (vertex, edge used to enter, next neighbour position)
            let mut stack: Vec<(usize, u32, usize)> = vec![(s, u32::MAX, 0)];
            disc[s] = time;
            low[s] = time;
            time += 1;
            while let Some(top) = stack.len().checked_sub(1) {
                let (v, pe, pos) = stack[top];
                if pos < self.adj[v].len() {
                    let (w, e) = self.adj[v][pos];
                    stack[top].2 += 1;
                    if e == pe {
                        continue;
                    }
                    if disc[w] == u32::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, e, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(u, _, _)) = stack.last() {
                        low[u] = low[u].min(low[v]);
                        if low[v] > disc[u] {
                            out.push(pe);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Tree of 2-edge-connected blocks joined by bridges.
#[derive(Debug, Clone, Serialize)]
pub struct BridgeTree {
    /// Global vertex ids of each block, sorted.
    pub blocks: Vec<Vec<u32>>,
    pub tree_adjacency: Vec<Vec<usize>>,
    /// `(block a, block b, bridge edge id)` for every tree edge.
    pub bridge_map: Vec<(usize, usize, u32)>,
    /// Always 0: blocks are numbered breadth-first from the root's block.
    pub root_block: usize,
    /// Parent block and connecting bridge; `None` for the root block.
    pub parent: Vec<Option<(usize, u32)>>,
    #[serde(skip)]
    pub block_of: HashMap<u32, usize>,
}

impl BridgeTree {
    pub fn from_local(lg: &LocalGraph) -> BridgeTree {
        let bridges = lg.bridges();
        let is_bridge: std::collections::HashSet<u32> = bridges.iter().copied().collect();
        let n = lg.len();
        let mut comp = vec![usize::MAX; n];
        let mut blocks_local: Vec<Vec<usize>> = Vec::new();
        let mut tree_adjacency: Vec<Vec<usize>> = Vec::new();
        let mut bridge_map = Vec::new();
        let mut parent = Vec::new();
        // BFS over blocks starting from the root's block; inside a block flood
        // fill over non-bridge edges.
        let mut block_queue = VecDeque::from([(0usize, None::<(usize, u32)>)]);
        while let Some((seed, par)) = block_queue.pop_front() {
            if comp[seed] != usize::MAX {
                continue;
            }
            let b = blocks_local.len();
            let mut members = vec![seed];
            comp[seed] = b;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &(w, e) in &lg.adj[v] {
                    if !is_bridge.contains(&e) && comp[w] == usize::MAX {
                        comp[w] = b;
                        members.push(w);
                    }
                }
            }
            tree_adjacency.push(Vec::new());
            if let Some((pb, e)) = par {
                tree_adjacency[pb].push(b);
                tree_adjacency[b].push(pb);
                bridge_map.push((pb, b, e));
            }
            parent.push(par);
            members.sort_unstable();
            for &v in &members {
                for &(w, e) in &lg.adj[v] {
                    if is_bridge.contains(&e) && comp[w] == usize::MAX {
                        block_queue.push_back((w, Some((b, e))));
                    }
                }
            }
            blocks_local.push(members);
        }
        let mut block_of = HashMap::new();
        let blocks = blocks_local
            .iter()
            .enumerate()
            .map(|(b, m)| {
                let mut vs: Vec<u32> = m.iter().map(|&i| lg.vertices[i]).collect();
                vs.sort_unstable();
                for &v in &vs {
                    block_of.insert(v, b);
                }
                vs
            })
            .collect();
        BridgeTree { blocks, tree_adjacency, bridge_map, root_block: 0, parent, block_of }
    }

    pub fn node_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn bridge_count(&self) -> usize {
        self.bridge_map.len()
    }

    /// Blocks other than the root with exactly one tree neighbour.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&b| b != self.root_block && self.tree_adjacency[b].len() == 1)
            .collect()
    }

    /// Bridges on the tree path from the root block to block `b`.
    pub fn path_bridges(&self, mut b: usize) -> Vec<u32> {
        let mut out = Vec::new();
        while let Some((pb, e)) = self.parent[b] {
            out.push(e);
            b = pb;
        }
        out
    }

    /// Sizes of the chains in a longest-path decomposition rooted at the root
    /// block, largest first. Summing the first `k` gives the largest union of
    /// `k` root-to-leaf paths.
    fn chain_lengths(&self) -> Vec<usize> {
        let n = self.node_count();
        // blocks are numbered breadth-first, so children have larger ids
        let mut height = vec![0usize; n];
        for b in (1..n).rev() {
            if let Some((pb, _)) = self.parent[b] {
                height[pb] = height[pb].max(height[b] + 1);
            }
        }
        let mut chains = Vec::new();
        if n > 1 {
            chains.push(height[0]);
        }
        for b in 0..n {
            let kids: Vec<usize> =
                self.tree_adjacency[b].iter().copied().filter(|&c| self.parent[c].map(|x| x.0) == Some(b)).collect();
            if kids.is_empty() {
                continue;
            }
            // heavy child: tallest, smallest index on ties
            let heavy = *kids.iter().max_by(|&&x, &&y| height[x].cmp(&height[y]).then(y.cmp(&x))).unwrap();
            for c in kids {
                if c != heavy {
                    chains.push(height[c] + 1);
                }
            }
        }
        chains.sort_unstable_by(|a, b| b.cmp(a));
        chains
    }
}

pub fn bridge_tree(g: &Graph, cluster: &Cluster) -> Result<BridgeTree> {
    if cluster.censored {
        return Err(Error::State("bridge tree of a censored cluster".into()));
    }
    Ok(BridgeTree::from_local(&LocalGraph::of_cluster(g, cluster)))
}

/// Largest number of tree edges covered by root-to-leaf paths to exactly `k`
/// leaves; 0 when there are fewer than `k` leaves.
pub fn lf_k(tree: &BridgeTree, k: usize) -> Result<usize> {
    if k < 1 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let chains = tree.chain_lengths();
    if chains.len() < k {
        return Ok(0);
    }
    Ok(chains[..k].iter().sum())
}

/// `max_{l <= k} Lf_l`.
pub fn br_k_tree(tree: &BridgeTree, k: usize) -> Result<usize> {
    if k < 1 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    let chains = tree.chain_lengths();
    Ok(chains.iter().take(k).sum())
}

pub fn br_k(g: &Graph, cluster: &Cluster, k: usize) -> Result<usize> {
    br_k_tree(&bridge_tree(g, cluster)?, k)
}

/// Open edges whose removal cuts some `w` in `w_set` off from the root.
pub fn piv(g: &Graph, cluster: &Cluster, w_set: &[u32]) -> Result<Vec<u32>> {
    let lg = LocalGraph::of_cluster(g, cluster);
    if let Some(w) = w_set.iter().find(|w| !lg.index.contains_key(w)) {
        return Err(Error::Argument(format!("vertex {w} is not in the cluster")));
    }
    let tree = BridgeTree::from_local(&lg);
    let mut out: Vec<u32> = w_set.iter().flat_map(|w| tree.path_bridges(tree.block_of[w])).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
