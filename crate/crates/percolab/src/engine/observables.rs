use super::{check_root, par_trials, Config, Explorer};
use crate::error::{check_probability, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use serde::Serialize;

/// Monte Carlo estimates; `None` where the estimator has no samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// Fraction of censored explorations.
    pub theta_hat: f64,
    /// Mean cluster size over uncensored trials.
    pub chi_f_hat: Option<f64>,
    /// Mean of `1/|K|`, censored clusters contributing 0.
    pub kappa_hat: f64,
    /// Fraction of trials where the pair shares an uncensored cluster.
    pub tau_f_hat: Option<f64>,
    pub tau_f_stderr: Option<f64>,
}

#[derive(Default)]
struct Acc {
    censored: u64,
    finite: u64,
    size_sum: u64,
    // sum of 1/|K| kept as an exact-order-independent fixed point would be overkill;
    // trials are merged in chunk order so the float sum is reproducible
    inv_sum: f64,
    together: u64,
}

/// `pair = Some((u, v))` additionally estimates the truncated two-point function;
/// the cluster is explored from `u`.
pub fn observables(
    g: &Graph,
    p: f64,
    trials: u64,
    seed: u64,
    pair: Option<(u32, u32)>,
    workers: usize,
) -> Result<Observables> {
    check_probability(p)?;
    if trials == 0 {
        return Err(crate::Error::Parameter("trials must be at least 1".into()));
    }
    let root = pair.map(|x| x.0).unwrap_or(g.root());
    check_root(g, root)?;
    if let Some((_, v)) = pair {
        check_root(g, v)?;
    }
    let acc = par_trials(
        trials,
        workers,
        |range| {
            let mut ex = Explorer::new(g);
            let mut a = Acc::default();
            for t in range {
                let s = ex.summary(g, &Config { labels: EdgeLabelSample::for_trial(seed, t), p }, root);
                if s.censored {
                    a.censored += 1;
                    continue;
                }
                a.finite += 1;
                a.size_sum += s.vertices;
                a.inv_sum += 1.0 / s.vertices as f64;
                if let Some((_, v)) = pair {
                    if ex.last_vertices().contains(&v) {
                        a.together += 1;
                    }
                }
            }
            a
        },
        |a, b| Acc {
            censored: a.censored + b.censored,
            finite: a.finite + b.finite,
            size_sum: a.size_sum + b.size_sum,
            inv_sum: a.inv_sum + b.inv_sum,
            together: a.together + b.together,
        },
    );
    let t = trials as f64;
    let tau = pair.map(|_| acc.together as f64 / t);
    Ok(Observables {
        p,
        trials,
        seed,
        theta_hat: acc.censored as f64 / t,
        chi_f_hat: (acc.finite > 0).then(|| acc.size_sum as f64 / acc.finite as f64),
        kappa_hat: acc.inv_sum / t,
        tau_f_hat: tau,
        tau_f_stderr: tau.map(|x| (x * (1.0 - x) / t).sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Family;

    #[test]
    fn p_zero() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 5 }).unwrap();
        let o = observables(&g, 0.0, 100, 3, Some((12, 13)), 1).unwrap();
        assert_eq!(o.theta_hat, 0.0);
        assert_eq!(o.chi_f_hat, Some(1.0));
        assert_eq!(o.kappa_hat, 1.0);
        assert_eq!(o.tau_f_hat, Some(0.0));
    }

    #[test]
    fn p_one() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 3 }).unwrap();
        let o = observables(&g, 1.0, 50, 3, None, 1).unwrap();
        assert_eq!(o.theta_hat, 1.0);
        assert_eq!(o.chi_f_hat, None);
        assert_eq!(o.kappa_hat, 0.0);
    }

    #[test]
    fn triangle_two_point() {
        let g = Graph::explicit(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let o = observables(&g, 0.5, 20_000, 11, Some((0, 1)), 1).unwrap();
        let tau = o.tau_f_hat.unwrap();
        assert!((tau - 0.625).abs() < 3.0 * o.tau_f_stderr.unwrap(), "{tau}");
    }
}
