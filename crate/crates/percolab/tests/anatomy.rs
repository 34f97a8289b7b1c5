mod common;

use percolab::anatomy::{br_k, euler_paths_check, menger_paths, piv, SetState};
use percolab::engine::{explore_component, explore_with};
use percolab::rng::SplitMix64;
use percolab::{Family, Graph};
use std::collections::HashSet;

#[test]
fn br_k_matches_brute_force() {
    let mut rng = SplitMix64::new(21);
    let mut checked = 0;
    while checked < 60 {
        let n = 6 + rng.below(7) as usize;
        let extra = rng.below(4) as usize;
        let g = common::random_halo_graph(&mut rng, n, extra, n + 1);
        let open: Vec<bool> = (0..g.edge_count()).map(|_| rng.bernoulli(0.7)).collect();
        let c = explore_with(&g, &open, 0).unwrap();
        for k in 1..=3 {
            assert_eq!(br_k(&g, &c, k).unwrap(), common::br_k_brute(&g, &c, k));
        }
        checked += 1;
    }
}

#[test]
fn piv_of_everything_is_every_bridge() {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 3 }).unwrap();
    let all = vec![true; g.edge_count()];
    let c = explore_component(&g, &all, 0, true).unwrap();
    let p = piv(&g, &c, &c.vertices).unwrap();
    assert_eq!(p.len(), g.edge_count());
}

#[test]
fn menger_certificates() {
    let mut rng = SplitMix64::new(5);
    for _ in 0..100 {
        let n = 8 + rng.below(10) as usize;
        let halo_from = n - 1 - rng.below(3) as usize;
        let extra = rng.below(8) as usize;
        let g = common::random_halo_graph(&mut rng, n, extra, halo_from);
        let open: HashSet<u32> = (0..g.edge_count() as u32).filter(|_| rng.bernoulli(0.75)).collect();
        let m = menger_paths(&g, &SetState(&open), &[0]).unwrap();
        assert_eq!(m.paths, m.min_cut.len());
        assert_eq!(m.paths, m.path_edges.len());
        // the cut separates the source from the halo
        let after = |e: u32| open.contains(&e) && !m.min_cut.contains(&e);
        assert!(common::reach(&g, &after, &[0], None).iter().all(|&v| !g.is_boundary(v)));
        // the paths are edge-disjoint and open
        let mut used = HashSet::new();
        for path in &m.path_edges {
            for &e in path {
                assert!(open.contains(&e) && used.insert(e));
            }
        }
    }
}

#[test]
fn euler_bound_on_open_trees() {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 5 }).unwrap();
    let all = vec![true; g.edge_count()];
    let c = explore_component(&g, &all, 0, true).unwrap();
    let interior: Vec<u32> = c.vertices.iter().copied().filter(|&v| !g.is_boundary(v)).collect();
    let mut rng = SplitMix64::new(8);
    for _ in 0..50 {
        let a: Vec<u32> = interior.iter().copied().filter(|_| rng.bernoulli(0.3)).collect();
        let r = euler_paths_check(&g, &c, &a).unwrap();
        assert!(r.ok, "{r:?}");
    }
}
