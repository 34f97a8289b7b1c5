//! Anchored-expansion constant alpha(p) for the regular tree rates.
use percolab::asymptotics::{alpha_dense_scan, solve_alpha};
use percolab::exact::tree_zeta_k;

fn main() -> percolab::Result<()> {
    println!("p     zeta_E     alpha      scan");
    for i in 55..=95 {
        if i % 5 != 0 {
            continue;
        }
        let p = i as f64 / 100.0;
        let zeta = tree_zeta_k(3, p) / 2.0;
        let a = solve_alpha(p, zeta, 1e-12)?;
        println!("{p:.2}  {zeta:.6}  {:.8} {:.8}", a.alpha, alpha_dense_scan(p, zeta)?);
    }
    Ok(())
}
