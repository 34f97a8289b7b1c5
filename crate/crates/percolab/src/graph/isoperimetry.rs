use super::Graph;
use crate::error::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest set size `cheeger_exact` will enumerate.
pub const MAX_SET_SIZE: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct IsoperimetricReport {
    /// `(numerator, denominator)` of the minimal ratio, in lowest terms.
    pub cheeger_lower: (u64, u64),
    pub cheeger_witness: Vec<u32>,
    /// Minimal ratio among sets of each size, as `(size, num, den)`.
    pub min_by_size: Vec<(usize, u64, u64)>,
    /// `t -> psi(t)`: least boundary among enumerated sets with volume at least `t`.
    pub profile: BTreeMap<u64, u64>,
    pub sets_enumerated: u64,
}

impl IsoperimetricReport {
    pub fn cheeger_f64(&self) -> f64 {
        self.cheeger_lower.0 as f64 / self.cheeger_lower.1 as f64
    }
}

/// Calls `visit` once for every connected set of at most `max_size` vertices
/// drawn from those accepted by `allowed`. Uses the ESU extension scheme, so
/// each set is produced exactly once, anchored at its smallest vertex.
pub fn for_each_connected_vertex_set(
    g: &Graph,
    max_size: usize,
    allowed: impl Fn(u32) -> bool,
    mut visit: impl FnMut(&[u32]),
) {
    let n = g.vertex_count();
    // in_sub / near mark membership of the current set and its closed neighbourhood
    let mut in_sub = vec![false; n];
    let mut near = vec![0u32; n];
    let mut sub: Vec<u32> = Vec::with_capacity(max_size);
    for v in 0..n as u32 {
        if !allowed(v) || max_size == 0 {
            continue;
        }
        sub.push(v);
        in_sub[v as usize] = true;
        bump(g, v, &mut near, 1);
        let ext: Vec<u32> = g
            .neighbors(v)
            .iter()
            .map(|&(w, _)| w)
            .filter(|&w| w > v && allowed(w))
            .collect();
        extend(g, max_size, v, &allowed, &mut sub, &mut in_sub, &mut near, ext, &mut visit);
        bump(g, v, &mut near, -1);
        in_sub[v as usize] = false;
        sub.pop();
    }
}

fn bump(g: &Graph, v: u32, near: &mut [u32], delta: i32) {
    near[v as usize] = (near[v as usize] as i32 + delta) as u32;
    for &(w, _) in g.neighbors(v) {
        near[w as usize] = (near[w as usize] as i32 + delta) as u32;
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    max_size: usize,
    anchor: u32,
    allowed: &impl Fn(u32) -> bool,
    sub: &mut Vec<u32>,
    in_sub: &mut [bool],
    near: &mut [u32],
    mut ext: Vec<u32>,
    visit: &mut impl FnMut(&[u32]),
) {
    visit(sub);
    if sub.len() == max_size {
        return;
    }
    while let Some(w) = ext.pop() {
        // exclusive neighbours of w: not in the set and not adjacent to it
        let mut ext2 = ext.clone();
        for &(u, _) in g.neighbors(w) {
            if u > anchor && near[u as usize] == 0 && allowed(u) && !ext2.contains(&u) {
                ext2.push(u);
            }
        }
        sub.push(w);
        in_sub[w as usize] = true;
        bump(g, w, near, 1);
        extend(g, max_size, anchor, allowed, sub, in_sub, near, ext2, visit);
        bump(g, w, near, -1);
        in_sub[w as usize] = false;
        sub.pop();
    }
}

/// Exact minimum of `|boundary edges of K| / sum of degrees over K` over
/// connected sets `K` of at most `max_set_size` interior vertices, excluding
/// `K = V` (whose boundary is trivially empty in a finite graph).
pub fn cheeger_exact(g: &Graph, max_set_size: usize) -> Result<IsoperimetricReport> {
    if max_set_size == 0 {
        return Err(Error::Argument("max_set_size must be at least 1".into()));
    }
    if max_set_size > MAX_SET_SIZE {
        return Err(Error::Size(format!(
            "max_set_size {max_set_size} exceeds the enumeration guard {MAX_SET_SIZE}"
        )));
    }
    let n = g.vertex_count();
    let mut best: Option<(Ratio<u64>, Vec<u32>)> = None;
    let mut by_size: BTreeMap<usize, Ratio<u64>> = BTreeMap::new();
    // least boundary seen at each exact volume; folded into psi afterwards
    let mut by_volume: BTreeMap<u64, u64> = BTreeMap::new();
    let mut count = 0u64;
    let mut inside = vec![false; n];
    for_each_connected_vertex_set(
        g,
        max_set_size,
        |v| !g.is_boundary(v),
        |set| {
            if set.len() == n {
                return;
            }
            count += 1;
            for &v in set {
                inside[v as usize] = true;
            }
            let mut vol = 0u64;
            let mut cut = 0u64;
            for &v in set {
                vol += g.degree(v) as u64;
                cut += g.neighbors(v).iter().filter(|&&(w, _)| !inside[w as usize]).count() as u64;
            }
            for &v in set {
                inside[v as usize] = false;
            }
            if vol == 0 {
                return;
            }
            let r = Ratio::new(cut, vol);
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                let mut w = set.to_vec();
                w.sort_unstable();
                best = Some((r, w));
            }
            by_size.entry(set.len()).and_modify(|x| *x = (*x).min(r)).or_insert(r);
            by_volume.entry(vol).and_modify(|x| *x = (*x).min(cut)).or_insert(cut);
        },
    );
    let (ratio, witness) =
        best.ok_or_else(|| Error::State("no admissible set: graph has no interior vertex".into()))?;
    // psi(t) = min over volumes >= t, swept from the top
    let mut profile = BTreeMap::new();
    let mut running = u64::MAX;
    let vols: Vec<(u64, u64)> = by_volume.into_iter().rev().collect();
    for (vol, cut) in vols {
        running = running.min(cut);
        profile.insert(vol, running);
    }
    Ok(IsoperimetricReport {
        cheeger_lower: (*ratio.numer(), *ratio.denom()),
        cheeger_witness: witness,
        min_by_size: by_size.into_iter().map(|(k, r)| (k, *r.numer(), *r.denom())).collect(),
        profile,
        sets_enumerated: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    #[test]
    fn single_edge() {
        let g = Graph::explicit(2, &[(0, 1)]).unwrap();
        let r = cheeger_exact(&g, 2).unwrap();
        assert_eq!(r.cheeger_lower, (1, 1));
    }

    #[test]
    fn counts_connected_sets_of_a_path() {
        // a path on 5 vertices has 5 - k + 1 connected sets of size k
        let g = Graph::explicit(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let mut sizes = [0usize; 6];
        for_each_connected_vertex_set(&g, 5, |_| true, |s| sizes[s.len()] += 1);
        assert_eq!(sizes, [0, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn counts_connected_sets_of_k4() {
        let g = Graph::explicit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut total = 0;
        for_each_connected_vertex_set(&g, 4, |_| true, |_| total += 1);
        assert_eq!(total, 15);
    }

    #[test]
    fn tree_ratio_decreases_towards_one_third() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 4 }).unwrap();
        let r = cheeger_exact(&g, 8).unwrap();
        assert!(r.cheeger_f64() >= 1.0 / 3.0);
        // k interior vertices: boundary k + 2, volume 3k
        for &(k, num, den) in &r.min_by_size {
            assert_eq!(Ratio::new(num, den), Ratio::new(k as u64 + 2, 3 * k as u64));
        }
        assert_eq!(r.cheeger_lower, (5, 12));
    }

    #[test]
    fn grid_minimisers_are_squares() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 7 }).unwrap();
        let r = cheeger_exact(&g, 8).unwrap();
        // 2x2 square: boundary 8, volume 16; 2x4 or 3x3 minus corner at size 8
        let m4 = r.min_by_size.iter().find(|x| x.0 == 4).unwrap();
        assert_eq!(Ratio::new(m4.1, m4.2), Ratio::new(1, 2));
        let ratios: Vec<f64> = r.min_by_size.iter().map(|x| x.1 as f64 / x.2 as f64).collect();
        assert!(ratios.first().unwrap() > ratios.last().unwrap());
        let prof: Vec<u64> = r.profile.values().copied().collect();
        assert!(prof.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn guard() {
        let g = Graph::explicit(2, &[(0, 1)]).unwrap();
        assert!(matches!(cheeger_exact(&g, 13), Err(Error::Size(_))));
    }
}
