//! Bridges, Br_k, Menger paths and furcations of sampled clusters.
use percolab::anatomy::{anatomy, bridge_tree, burton_keane_statistic, furcation_set, menger_paths};
use percolab::engine::{explore_with, Config};
use percolab::rng::EdgeLabelSample;
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let g = Graph::generate(&Family::Hypercubic { d: 2, side: 11 })?;
    let p = 0.45;
    for t in 0..5 {
        let state = Config { labels: EdgeLabelSample::for_trial(3, t), p };
        let a = anatomy(&g, &state, g.root(), 3)?;
        println!("trial {t}: {}", serde_json::to_string(&a)?);
        let c = explore_with(&g, &state, g.root())?;
        if !c.censored {
            let tree = bridge_tree(&g, &c)?;
            println!("  bridge tree: {} blocks, {} bridges", tree.node_count(), tree.bridge_count());
        }
    }
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 7 })?;
    let state = Config { labels: EdgeLabelSample::new(11), p: 0.8 };
    let m = menger_paths(&g, &state, &[g.root()])?;
    println!("menger: {} disjoint paths, min cut {:?}", m.paths, m.min_cut);
    println!("furcations: {:?}", furcation_set(&g, &state, None).len());
    let bk = burton_keane_statistic(&g, 0.8, 2000, 5, &[g.root()], 0)?;
    println!("mean paths to the halo {:.3} +- {:.3}", bk.mean_menger, bk.stderr);
    Ok(())
}
