use super::Graph;
use std::ops::ControlFlow;

/// What to do after visiting a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Descend,
    /// Do not enumerate supersets of this set.
    Prune,
    Stop,
}

/// Visits every connected edge set `H` that contains `root` as a vertex and has
/// at most `max_edges` edges, using only edges accepted by `edge_ok` and never
/// entering a vertex rejected by `vertex_ok`. The empty set (the bare root) is
/// visited first. Each set is produced once (Redelmeier's scheme on edges).
///
/// `visit` receives the edge ids and vertex ids of `H` and decides whether to
/// grow `H` further, skip its supersets, or stop everything.
pub fn for_each_edge_animal(
    g: &Graph,
    root: u32,
    max_edges: usize,
    edge_ok: impl Fn(u32) -> bool,
    vertex_ok: impl Fn(u32) -> bool,
    mut visit: impl FnMut(&[u32], &[u32]) -> Step,
) -> ControlFlow<()> {
    let mut st = State {
        in_h: std::collections::HashSet::from([root]),
        seen: std::collections::HashSet::new(),
        edges: Vec::new(),
        verts: vec![root],
    };
    let mut untried = Vec::new();
    for &(_, e) in g.neighbors(root) {
        if edge_ok(e) && st.seen.insert(e) {
            untried.push(e);
        }
    }
    untried.reverse();
    rec(g, max_edges, &edge_ok, &vertex_ok, &mut st, untried, &mut visit)
}

struct State {
    in_h: std::collections::HashSet<u32>,
    seen: std::collections::HashSet<u32>,
    edges: Vec<u32>,
    verts: Vec<u32>,
}

fn rec(
    g: &Graph,
    max_edges: usize,
    edge_ok: &impl Fn(u32) -> bool,
    vertex_ok: &impl Fn(u32) -> bool,
    st: &mut State,
    mut untried: Vec<u32>,
    visit: &mut impl FnMut(&[u32], &[u32]) -> Step,
) -> ControlFlow<()> {
    match visit(&st.edges, &st.verts) {
        Step::Stop => return ControlFlow::Break(()),
        Step::Prune => return ControlFlow::Continue(()),
        Step::Descend => {}
    }
    if st.edges.len() >= max_edges {
        return ControlFlow::Continue(());
    }
    while let Some(e) = untried.pop() {
        let [a, b] = g.endpoints(e);
        let fresh = if !st.in_h.contains(&a) {
            Some(a)
        } else if !st.in_h.contains(&b) {
            Some(b)
        } else {
            None
        };
        if let Some(w) = fresh {
            if !vertex_ok(w) {
                continue;
            }
        }
        st.edges.push(e);
        let mut next = untried.clone();
        let mut added = Vec::new();
        if let Some(w) = fresh {
            st.in_h.insert(w);
            st.verts.push(w);
            for &(_, f) in g.neighbors(w) {
                if edge_ok(f) && st.seen.insert(f) {
                    added.push(f);
                    next.push(f);
                }
            }
        }
        let flow = rec(g, max_edges, edge_ok, vertex_ok, st, next, visit);
        for f in added {
            st.seen.remove(&f);
        }
        if let Some(w) = fresh {
            st.in_h.remove(&w);
            st.verts.pop();
        }
        st.edges.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn brute(g: &Graph, root: u32, max: usize) -> HashSet<Vec<u32>> {
        let m = g.edge_count();
        let mut out = HashSet::new();
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize > max {
                continue;
            }
            let open: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
            let d = g.bfs_distances(root, |e| open[e as usize]);
            // connected and containing root: every chosen edge reached from root
            if (0..m).filter(|&e| open[e]).all(|e| d[g.endpoints(e as u32)[0] as usize] != u32::MAX) {
                out.insert((0..m as u32).filter(|&e| open[e as usize]).collect());
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        let graphs = [
            Graph::explicit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
            Graph::explicit(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 1)]).unwrap(),
            crate::Graph::generate(&crate::Family::Hypercubic { d: 2, side: 3 }).unwrap(),
        ];
        for g in &graphs {
            for max in [0, 2, 5, 12] {
                let mut got = HashSet::new();
                let mut n = 0;
                let _ = for_each_edge_animal(g, 0, max, |_| true, |_| true, |e, _| {
                    let mut v = e.to_vec();
                    v.sort_unstable();
                    got.insert(v);
                    n += 1;
                    Step::Descend
                });
                assert_eq!(n, got.len(), "duplicates");
                assert_eq!(got, brute(g, 0, max));
            }
        }
    }

    #[test]
    fn grid_single_edges() {
        let g = crate::Graph::generate(&crate::Family::Hypercubic { d: 2, side: 5 }).unwrap();
        let mut ones = 0;
        let _ = for_each_edge_animal(&g, g.root(), 1, |_| true, |_| true, |e, _| {
            ones += (e.len() == 1) as usize;
            Step::Descend
        });
        assert_eq!(ones, 4);
    }
}
