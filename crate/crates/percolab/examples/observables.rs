//! Density of the censored cluster, mean finite size and a two-point function
//! across p on a small tree ball.
use percolab::engine::observables;
use percolab::{Family, Graph};

fn main() -> percolab::Result<()> {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 10 })?;
    println!("p     theta    chi_f    kappa    tau_f(0,1)");
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let o = observables(&g, p, 20_000, 1, Some((0, 1)), 0)?;
        println!(
            "{p:.1}  {:.4}   {:>7.3}  {:.4}   {:.4}",
            o.theta_hat,
            o.chi_f_hat.unwrap_or(f64::NAN),
            o.kappa_hat,
            o.tau_f_hat.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
