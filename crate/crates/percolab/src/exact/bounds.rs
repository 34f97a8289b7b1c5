use super::enumerate::{animal_series, ConfigTable};
use super::poly::to_f64;
use super::tree_law::TreeLaw;
use crate::anatomy::{br_k_tree, bridge_tree};
use crate::engine::{explore_cluster, par_trials};
use crate::error::{check_probability, Error, Result};
use crate::graph::Graph;
use crate::rng::EdgeLabelSample;
use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub check: String,
    pub params: Value,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, clamped to `f64::MAX` when the right side overflows.
    pub margin: f64,
    pub pass: bool,
}

impl BoundReport {
    fn new(check: &str, params: Value, lhs: f64, rhs: f64) -> BoundReport {
        let margin = if rhs.is_infinite() { f64::MAX } else { rhs - lhs };
        BoundReport { check: check.into(), params, lhs, rhs, margin, pass: lhs <= rhs }
    }
}

fn exp_rhs_skinny(p: f64, n: usize, m: usize) -> f64 {
    (-0.5 * (1.0 - p).powf(4.0 * n as f64 / m as f64) * m as f64).exp()
}

/// `P(R_v >= m, E_v <= n) <= exp[-(1/2)(1-p)^(4n/m) m]` for every `n >= m >= 1`,
/// evaluated exactly on a small graph. One report per `p`, at the tightest `(n, m)`.
pub fn skinny_radius_exact(g: &Graph, root: u32, ps: &[f64]) -> Result<Vec<BoundReport>> {
    let table = ConfigTable::build(g, root)?;
    let max_e = table.clusters.iter().map(|c| c.e_v()).max().unwrap_or(0);
    let mut out = Vec::new();
    for &p in ps {
        check_probability(p)?;
        if p >= 1.0 {
            return Err(Error::Parameter("the radius bound needs p < 1".into()));
        }
        let pr = super::poly::rational_from_f64(p)?;
        // P(cluster = c) at p for every finite cluster
        let probs: Vec<(usize, usize, f64)> = table
            .clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.censored)
            .map(|(i, c)| (c.e_v(), c.intrinsic_radius as usize, to_f64(&table.cluster_probability(i).eval(&pr))))
            .collect();
        let mut worst: Option<BoundReport> = None;
        let mut all = true;
        for n in 1..=max_e {
            for m in 1..=n {
                let lhs: f64 = probs.iter().filter(|&&(e, r, _)| e <= n && r >= m).map(|t| t.2).sum();
                let rep = BoundReport::new(
                    "skinny_radius",
                    json!({"graph": g.family().name, "p": p, "n": n, "m": m, "mode": "exact"}),
                    lhs,
                    exp_rhs_skinny(p, n, m),
                );
                all &= rep.pass;
                if worst.as_ref().is_none_or(|w| rep.margin < w.margin) {
                    worst = Some(rep);
                }
            }
        }
        if let Some(mut w) = worst {
            w.pass = all;
            out.push(w);
        }
    }
    Ok(out)
}

/// Monte Carlo version; `lhs` is the estimate minus three binomial standard
/// errors, so a failure means the bound is exceeded beyond sampling noise.
pub fn skinny_radius_mc(g: &Graph, p: f64, trials: u64, seed: u64, pairs: &[(usize, usize)], workers: usize) -> Result<Vec<BoundReport>> {
    check_probability(p)?;
    if pairs.iter().any(|&(n, m)| m == 0 || n < m) {
        return Err(Error::Argument("need n >= m >= 1".into()));
    }
    let root = g.root();
    explore_cluster(g, &EdgeLabelSample::new(seed), p, root)?;
    let hits = par_trials(
        trials,
        workers,
        |range| {
            let mut h = vec![0u64; pairs.len()];
            for t in range {
                let c = explore_cluster(g, &EdgeLabelSample::for_trial(seed, t), p, root).expect("root checked");
                if c.censored {
                    continue;
                }
                for (i, &(n, m)) in pairs.iter().enumerate() {
                    h[i] += (c.e_v() <= n && c.intrinsic_radius as usize >= m) as u64;
                }
            }
            h
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    Ok(pairs
        .iter()
        .zip(hits)
        .map(|(&(n, m), h)| {
            let est = h as f64 / trials as f64;
            let se = (est * (1.0 - est) / trials as f64).sqrt();
            BoundReport::new(
                "skinny_radius",
                json!({"graph": g.family().name, "p": p, "n": n, "m": m, "mode": "monte_carlo", "estimate": est, "trials": trials}),
                est - 3.0 * se,
                exp_rhs_skinny(p, n, m),
            )
        })
        .collect())
}

/// Recursion inequality with every `Q` on the right replaced by 1:
/// `P(Lf_{k+1} = m, E_v = n) <= (2en/(k+1)) n (m-1)`.
pub fn recursion_check(g: &Graph, root: u32, k: usize, n: usize, m: usize, ps: &[f64]) -> Result<Vec<BoundReport>> {
    if k == 0 || n == 0 || m == 0 {
        return Err(Error::Argument("k, n, m must be at least 1".into()));
    }
    let table = super::qtable::q_table(g, root, k + 1)?;
    let entry = table.entry(k + 1, n, m);
    let rhs = 2.0 * std::f64::consts::E * n as f64 / (k + 1) as f64 * (n * (m - 1)) as f64;
    ps.iter()
        .map(|&p| {
            check_probability(p)?;
            Ok(BoundReport::new(
                "recursion",
                json!({"graph": g.family().name, "p": p, "k": k, "n": n, "m": m, "q_bound": 1}),
                entry.eval_f64(p),
                rhs,
            ))
        })
        .collect()
}

fn ln_moment_rhs(p: f64, k: usize, alpha: f64) -> f64 {
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    let ln_c = 18.0 * std::f64::consts::LN_2 + 2.0 - 3.0 * alpha.ln() - 96.0 / alpha * (1.0 - p).ln();
    ln_fact + k as f64 * ln_c
}

/// `E[E_v^(k+1) 1(alpha E_v <= Br_k < inf)] <= k! (2^18 e^2 / (alpha^3 (1-p)^(96/alpha)))^k`,
/// exact on a small graph.
pub fn moment_bound_exact(g: &Graph, root: u32, p: f64, k: usize, alpha: f64) -> Result<BoundReport> {
    moment_args(p, k, alpha)?;
    let table = ConfigTable::build(g, root)?;
    let pr = super::poly::rational_from_f64(p)?;
    let mut lhs = BigRational::zero();
    for (i, c) in table.clusters.iter().enumerate() {
        if c.censored {
            continue;
        }
        let br = br_k_tree(&bridge_tree(g, c)?, k)?;
        if alpha * c.e_v() as f64 <= br as f64 {
            let w = BigRational::from_integer(BigInt::from(c.e_v()).pow(k as u32 + 1));
            lhs += w * table.cluster_probability(i).eval(&pr);
        }
    }
    Ok(BoundReport::new(
        "moment_bound",
        json!({"graph": g.family().name, "p": p, "k": k, "alpha": alpha, "mode": "exact"}),
        to_f64(&lhs),
        ln_moment_rhs(p, k, alpha).exp(),
    ))
}

/// Sampled version; `lhs` is the mean minus three standard errors.
pub fn moment_bound_mc(g: &Graph, p: f64, k: usize, alpha: f64, trials: u64, seed: u64, workers: usize) -> Result<BoundReport> {
    moment_args(p, k, alpha)?;
    let root = g.root();
    explore_cluster(g, &EdgeLabelSample::new(seed), p, root)?;
    let (s1, s2) = par_trials(
        trials,
        workers,
        |range| {
            let (mut s1, mut s2) = (0.0f64, 0.0f64);
            for t in range {
                let c = explore_cluster(g, &EdgeLabelSample::for_trial(seed, t), p, root).expect("root checked");
                if c.censored {
                    continue;
                }
                let br = br_k_tree(&bridge_tree(g, &c).expect("finite"), k).expect("k >= 1");
                if alpha * c.e_v() as f64 <= br as f64 {
                    let x = (c.e_v() as f64).powi(k as i32 + 1);
                    s1 += x;
                    s2 += x * x;
                }
            }
            (s1, s2)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    let nt = trials as f64;
    let mean = s1 / nt;
    let se = ((s2 / nt - mean * mean).max(0.0) / nt).sqrt();
    Ok(BoundReport::new(
        "moment_bound",
        json!({"graph": g.family().name, "p": p, "k": k, "alpha": alpha, "mode": "monte_carlo", "estimate": mean, "trials": trials}),
        mean - 3.0 * se,
        ln_moment_rhs(p, k, alpha).exp(),
    ))
}

fn moment_args(p: f64, k: usize, alpha: f64) -> Result<()> {
    check_probability(p)?;
    if p >= 1.0 {
        return Err(Error::Parameter("the moment bound needs p < 1".into()));
    }
    if k == 0 || !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Argument("need k >= 1 and 0 < alpha <= 1".into()));
    }
    Ok(())
}

/// Azuma-type tail of the fluctuation: `P(|h_p| >= alpha n, E_v = n) <= 2 exp(-alpha^2 n / 2)`.
pub fn fluctuation_tail_exact(g: &Graph, root: u32, p: f64, alpha: f64) -> Result<Vec<BoundReport>> {
    check_probability(p)?;
    let table = ConfigTable::build(g, root)?;
    let pr = super::poly::rational_from_f64(p)?;
    let max_e = table.clusters.iter().map(|c| c.e_v()).max().unwrap_or(0);
    let mut lhs = vec![0.0; max_e + 1];
    for (i, c) in table.clusters.iter().enumerate() {
        if c.censored {
            continue;
        }
        let h = p * c.boundary_edges.len() as f64 - (1.0 - p) * c.open_edges.len() as f64;
        if h.abs() >= alpha * c.e_v() as f64 {
            lhs[c.e_v()] += to_f64(&table.cluster_probability(i).eval(&pr));
        }
    }
    Ok((1..=max_e)
        .map(|n| {
            BoundReport::new(
                "fluctuation_tail",
                json!({"graph": g.family().name, "p": p, "alpha": alpha, "n": n}),
                lhs[n],
                2.0 * (-alpha * alpha * n as f64 / 2.0).exp(),
            )
        })
        .collect())
}

/// Sampled fluctuation tail per `n`, `lhs` = estimate minus three standard errors.
pub fn fluctuation_tail_mc(g: &Graph, p: f64, alpha: f64, trials: u64, seed: u64, workers: usize) -> Result<Vec<BoundReport>> {
    check_probability(p)?;
    let root = g.root();
    explore_cluster(g, &EdgeLabelSample::new(seed), p, root)?;
    let hist = par_trials(
        trials,
        workers,
        |range| {
            let mut h: std::collections::BTreeMap<usize, u64> = Default::default();
            for t in range {
                let c = explore_cluster(g, &EdgeLabelSample::for_trial(seed, t), p, root).expect("root checked");
                if c.censored {
                    continue;
                }
                let h_p = p * c.boundary_edges.len() as f64 - (1.0 - p) * c.open_edges.len() as f64;
                if h_p.abs() >= alpha * c.e_v() as f64 {
                    *h.entry(c.e_v()).or_insert(0) += 1;
                }
            }
            h
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    );
    let nt = trials as f64;
    Ok(hist
        .into_iter()
        .map(|(n, c)| {
            let est = c as f64 / nt;
            let se = (est * (1.0 - est) / nt).sqrt();
            BoundReport::new(
                "fluctuation_tail",
                json!({"graph": g.family().name, "p": p, "alpha": alpha, "n": n, "mode": "monte_carlo", "estimate": est, "trials": trials}),
                est - 3.0 * se,
                2.0 * (-alpha * alpha * n as f64 / 2.0).exp(),
            )
        })
        .collect())
}

/// Union-bound step behind the anchored expansion: summing over connected `H`
/// that avoid the halo,
/// `sum_H sum_{m<=alpha|E(H)|} C(|∂H|,m)(p/(1-p))^m P(K=H)
///   <= sum_H sum_{m<=alpha|E(H)|} C(|E(H)|,m)(p/(1-p))^m P(K=H)`.
pub fn expansion_union_bound(g: &Graph, root: u32, p: &BigRational, alpha: &BigRational, max_open: usize) -> Result<BoundReport> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    if *p <= zero || *p >= one || *alpha <= zero || alpha > p {
        return Err(Error::Parameter("need 0 < alpha <= p < 1".into()));
    }
    let odds = p / (&one - p);
    let pair = |c: &crate::engine::Cluster| -> (BigRational, BigRational) {
        let (b, e) = (c.boundary_edges.len(), c.e_v());
        let top = (alpha * BigRational::from_integer(BigInt::from(e))).floor().to_integer();
        let top: usize = top.try_into().unwrap_or(0);
        let (mut l, mut r) = (zero.clone(), zero.clone());
        let mut pw = one.clone();
        for mm in 1..=top {
            pw *= &odds;
            l += BigRational::from_integer(binomial(BigInt::from(b), BigInt::from(mm))) * &pw;
            r += BigRational::from_integer(binomial(BigInt::from(e), BigInt::from(mm))) * &pw;
        }
        (l, r)
    };
    let left = animal_series(g, root, &|c: &crate::engine::Cluster| pair(c).0, max_open)?.total().eval(p);
    let right = animal_series(g, root, &|c: &crate::engine::Cluster| pair(c).1, max_open)?.total().eval(p);
    let mut rep = BoundReport::new(
        "expansion_union_bound",
        json!({"graph": g.family().name, "p": p.to_string(), "alpha": alpha.to_string(), "max_open": max_open}),
        to_f64(&left),
        to_f64(&right),
    );
    rep.pass = left <= right;
    Ok(rep)
}

/// Convergence of `sum_k P(|K|=k) x^E` with `x = 1 + eps/(p(1-p))`, `E = (d-1)k+1`,
/// on either side of `eps* = p(1-p)(e^zeta_E - 1)`. Reports the last-term growth
/// exponent per vertex: negative means summable.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusCheck {
    pub eps_star: f64,
    pub eps: f64,
    pub below: bool,
    /// Fitted `d/dk ln(term_k)` over the last half of the window.
    pub term_log_slope: f64,
    pub partial_sum: f64,
    pub pass: bool,
}

pub fn analyticity_radius_check(law: &TreeLaw, factor: f64) -> Result<RadiusCheck> {
    let p = law.p;
    if !(p > 0.0 && p < 1.0) || factor <= 0.0 {
        return Err(Error::Parameter("need 0 < p < 1 and factor > 0".into()));
    }
    let pq = p * (1.0 - p);
    let eps_star = pq * (law.zeta_e.exp() - 1.0);
    let eps = factor * eps_star;
    let lx = (1.0 + eps / pq).ln();
    let d1 = (law.d - 1) as f64;
    let term = |k: usize| law.ln_prob(k) + (d1 * k as f64 + 1.0) * lx;
    let (k0, k1) = (law.n_max / 2, law.n_max);
    let slope = (term(k1) - term(k0)) / (k1 - k0) as f64;
    let partial_sum = (1..=law.n_max).map(|k| term(k).exp()).sum();
    let below = factor < 1.0;
    Ok(RadiusCheck { eps_star, eps, below, term_log_slope: slope, partial_sum, pass: (slope < 0.0) == below })
}

/// Bound suite over a set of small graphs; returns every report.
pub fn corpus_suite(graphs: &[(String, Graph)], ps: &[f64]) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for (_, g) in graphs {
        let root = g.root();
        out.extend(skinny_radius_exact(g, root, ps)?);
        out.extend(recursion_check(g, root, 1, 1, 1, ps)?);
        for &p in ps {
            out.push(moment_bound_exact(g, root, p, 1, 1.0)?);
            out.extend(fluctuation_tail_exact(g, root, p, 0.5)?);
        }
    }
    Ok(out)
}
