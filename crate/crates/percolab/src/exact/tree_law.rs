use super::poly::to_f64;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Largest cluster size kept in exact rational form.
pub const EXACT_LIMIT: usize = 200;
pub const MAX_N: usize = 2000;

/// Law of `|K_v|` on the infinite `d`-regular tree.
#[derive(Debug, Clone, Serialize)]
pub struct TreeLaw {
    pub d: usize,
    pub p: f64,
    pub n_max: usize,
    /// `probs[k-1] = P(|K| = k)`
    pub probs: Vec<f64>,
    #[serde(skip)]
    pub exact: Vec<BigRational>,
    #[serde(skip)]
    ln_counts: Vec<f64>,
    /// `1 - sum_{k <= min(n_max, 200)} P(|K| = k)`, exact.
    #[serde(serialize_with = "ser_opt_rat")]
    pub exact_tail: Option<BigRational>,
    pub finite_probability: f64,
    /// Per-vertex decay rate of `P(|K| = k)` from the closed form.
    pub zeta_k: f64,
    /// Per-touched-edge rate: `E_v = (d-1)|K| + 1` on the tree.
    pub zeta_e: f64,
    /// Richardson-extrapolated local rates from the computed window.
    pub zeta_k_richardson: Option<f64>,
    pub zeta_e_richardson: Option<f64>,
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl TreeLaw {
    /// `P(|K| = k)` for `1 <= k <= n_max`.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k - 1]
    }

    /// `P(E_v = n)`; zero unless `n = (d-1)k + 1`.
    pub fn prob_ev(&self, n: usize) -> f64 {
        if n == 0 || !(n - 1).is_multiple_of(self.d - 1) {
            return 0.0;
        }
        let k = (n - 1) / (self.d - 1);
        if k == 0 || k > self.n_max {
            0.0
        } else {
            self.prob(k)
        }
    }

    /// `ln P(|K| = k)`, finite even where `prob` underflows.
    pub fn ln_prob(&self, k: usize) -> f64 {
        let p = self.p;
        self.ln_counts[k - 1] + ln_pow(p, k - 1) + ln_pow(1.0 - p, (self.d - 2) * (k - 1) + self.d)
    }
}

/// Number of `k`-vertex subtrees containing the root of the `d`-regular tree,
/// weighted so that `P(|K| = k) = N_k p^(k-1) (1-p)^((d-2)(k-1)+d)`.
pub fn subtree_count(d: usize, k: usize) -> BigInt {
    if k == 1 {
        return BigInt::one();
    }
    let top = (d - 1) * (k - 1);
    let mut s = BigInt::zero();
    for j in 1..=d.min(k - 1) {
        s += BigInt::from(j) * binomial(BigInt::from(d), BigInt::from(j)) * binomial(BigInt::from(top), BigInt::from(k - 1 - j));
    }
    s / BigInt::from(k - 1)
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln N_k` for `k = 1..=n`: exact counts up to the rational limit, then
/// `ln d + ln((d-1)k)! - ln(k-1)! - ln((d-2)k+2)!` from a log-factorial table.
fn ln_counts(d: usize, n: usize) -> Vec<f64> {
    let top = (d - 1) * n + 2;
    let mut lf = vec![0.0f64; top + 1];
    for i in 1..=top {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    (1..=n)
        .map(|k| {
            if k <= EXACT_LIMIT {
                ln_bigint(&subtree_count(d, k))
            } else {
                (d as f64).ln() + lf[(d - 1) * k] - lf[k - 1] - lf[(d - 2) * k + 2]
            }
        })
        .collect()
}

fn ln_pow(x: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.ln()
    }
}

/// Closed-form exponential rate `-ln[(d-1)^(d-1)/(d-2)^(d-2) p (1-p)^(d-2)]`.
pub fn tree_zeta_k(d: usize, p: f64) -> f64 {
    let (a, b) = ((d - 1) as f64, (d - 2) as f64);
    let ln_rho = a * a.ln() - if d > 2 { b * b.ln() } else { 0.0 } + p.ln() + b * (1.0 - p).ln();
    (-ln_rho).max(0.0)
}

/// Probability that the root cluster is finite.
pub fn tree_finite_probability(d: usize, p: f64) -> f64 {
    let q = 1.0 - p;
    // smallest fixed point of eta = (q + p eta)^(d-1)
    let mut eta = 0.0f64;
    for _ in 0..100_000 {
        let next = (q + p * eta).powi(d as i32 - 1);
        if (next - eta).abs() < 1e-16 {
            eta = next;
            break;
        }
        eta = next;
    }
    (q + p * eta).powi(d as i32)
}

pub fn tree_cluster_law(d: usize, p: &BigRational, n_max: usize) -> Result<TreeLaw> {
    if d < 3 {
        return Err(Error::Parameter(format!("tree degree must be at least 3, got {d}")));
    }
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::Parameter(format!("p = {p} is not a probability")));
    }
    if n_max == 0 || n_max > MAX_N {
        return Err(Error::Size(format!("n_max must be in 1..={MAX_N}, got {n_max}")));
    }
    let pf = to_f64(p);
    let q = BigRational::one() - p;
    let n_exact = n_max.min(EXACT_LIMIT);
    let mut exact = Vec::with_capacity(n_exact);
    let (mut pk, mut qk) = (BigRational::one(), num_traits::pow(q.clone(), d));
    let q_step = num_traits::pow(q.clone(), d - 2);
    for k in 1..=n_exact {
        exact.push(BigRational::from_integer(subtree_count(d, k)) * &pk * &qk);
        pk *= p;
        qk *= &q_step;
    }
    let exact_tail = Some(BigRational::one() - exact.iter().fold(BigRational::zero(), |a, x| a + x));
    let mut law = TreeLaw {
        d,
        p: pf,
        n_max,
        probs: Vec::with_capacity(n_max),
        exact,
        ln_counts: ln_counts(d, n_max),
        exact_tail,
        finite_probability: tree_finite_probability(d, pf),
        zeta_k: tree_zeta_k(d, pf),
        zeta_e: tree_zeta_k(d, pf) / (d - 1) as f64,
        zeta_k_richardson: None,
        zeta_e_richardson: None,
    };
    for k in 1..=n_max {
        let v = if k <= n_exact { to_f64(&law.exact[k - 1]) } else { law.ln_prob(k).exp() };
        law.probs.push(v);
    }
    law.zeta_k_richardson = richardson_rate(&law);
    law.zeta_e_richardson = law.zeta_k_richardson.map(|z| z / (d - 1) as f64);
    Ok(law)
}

/// Local rates `r_k = ln P_k - ln P_{k+1}` behave like `zeta + a/k + b/k^2`;
/// two rounds of Richardson extrapolation in `1/k` remove the corrections.
fn richardson_rate(law: &TreeLaw) -> Option<f64> {
    if law.p <= 0.0 || law.p >= 1.0 {
        return None;
    }
    let k4 = (law.n_max - 1) / 4;
    if k4 < 4 {
        return None;
    }
    let r = |k: usize| law.ln_prob(k) - law.ln_prob(k + 1);
    let (r1, r2, r4) = (r(k4), r(2 * k4), r(4 * k4));
    let (a, b) = (2.0 * r2 - r1, 2.0 * r4 - r2);
    Some((4.0 * b - a) / 3.0)
}
