//! Cluster-size law on the infinite d-regular tree: exact probabilities,
//! closed-form rate and its numerical extrapolation.
use percolab::exact::{analyticity_radius_check, tree_cluster_law, rat};

fn main() -> percolab::Result<()> {
    for (d, p) in [(3, rat(7, 10)), (3, rat(1, 4)), (4, rat(1, 2))] {
        let law = tree_cluster_law(d, &p, 1000)?;
        println!("d={d} p={p}");
        println!("  P(|K|=1..4) = {:?}", law.exact[..4].iter().map(|x| x.to_string()).collect::<Vec<_>>());
        println!("  P(finite) = {:.6}", law.finite_probability);
        println!("  zeta_E = {:.7}  extrapolated {:?}", law.zeta_e, law.zeta_e_richardson);
        let r = analyticity_radius_check(&law, 0.5)?;
        println!("  series check inside the radius: {}", r.pass);
    }
    Ok(())
}
