//! Builds each graph family and prints its size, halo and root degree.
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let families = [
        Family::RegularTree { d: 3, radius: 8 },
        Family::Hypercubic { d: 2, side: 9 },
        Family::TreeDecoratedZ3 { tree_depth: 2, side: 5 },
        Family::BinaryTree { depth: 6 },
        Family::Explicit { vertex_count: 4, edges: vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)] },
    ];
    for f in &families {
        let g = Graph::generate(f)?;
        println!(
            "{:<60} vertices={:<6} edges={:<6} halo={:<5} root={} deg(root)={}",
            format!("{f:?}"),
            g.vertex_count(),
            g.edge_count(),
            g.boundary().len(),
            g.root(),
            g.degree(g.root())
        );
    }
    // round trip through JSON
    let g = Graph::generate(&families[0])?;
    let back = Graph::from_json(&g.to_json()?)?;
    assert_eq!(back.edges(), g.edges());
    Ok(())
}
