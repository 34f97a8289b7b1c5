use super::enumerate::{ClusterFunctional, ConfigTable};
use super::poly::{to_f64, PolynomialInP};
use crate::error::{Error, Result};
use crate::graph::Graph;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

/// Exact values of the four derivative terms at one `p`.
#[derive(Debug, Clone, Serialize)]
pub struct RussoPoint {
    pub p: String,
    pub m: String,
    pub u: String,
    pub d: String,
    pub dedp: String,
    /// `E_{p,n}[E_v F] / (1-p)`
    pub d_bound: String,
    pub m_f64: f64,
    pub u_f64: f64,
    pub d_f64: f64,
    pub dedp_f64: f64,
    /// `dE/dp = -M = U - D` as rationals.
    pub identity: bool,
    pub d_nonnegative: Option<bool>,
    pub u_nonnegative: Option<bool>,
    pub d_bound_holds: bool,
}

/// Polynomials behind the decomposition for one truncation level `n`.
#[derive(Debug, Clone)]
pub struct RussoDecomposition {
    pub n: usize,
    /// `E_{p,n}[F]`
    pub expectation: PolynomialInP,
    pub dedp: PolynomialInP,
    /// `E_{p,n}[h_p F]`; `M` is this divided by `p(1-p)`.
    pub h_moment: PolynomialInP,
    pub u: PolynomialInP,
    pub d: PolynomialInP,
    /// `E_{p,n}[E_v F]`
    pub ev_moment: PolynomialInP,
    pub points: Vec<RussoPoint>,
}

impl RussoDecomposition {
    /// `h_moment = -p(1-p) dE/dp` and `dE/dp = U - D`, both as polynomial identities.
    pub fn symbolic_identity(&self) -> bool {
        let pq = PolynomialInP::monomial_pq(1, 1);
        self.h_moment == pq.mul(&self.dedp).scale(&-BigRational::one()) && self.dedp == self.u.sub(&self.d)
    }

    pub fn all_points_pass(&self) -> bool {
        self.points.iter().all(|pt| {
            pt.identity && pt.d_bound_holds && pt.d_nonnegative != Some(false) && pt.u_nonnegative != Some(false)
        })
    }
}

/// Russo decomposition of `E_{p,n}[F(K_v)]` with `U` and `D` built from their
/// edge-by-edge definitions over the enumerated configuration space.
pub fn russo_decomposition(
    g: &Graph,
    root: u32,
    f: &dyn ClusterFunctional,
    n: usize,
    p_grid: &[BigRational],
) -> Result<RussoDecomposition> {
    let table = ConfigTable::build(g, root)?;
    russo_from_table(&table, f, n, p_grid)
}

pub fn russo_from_table(
    table: &ConfigTable,
    f: &dyn ClusterFunctional,
    n: usize,
    p_grid: &[BigRational],
) -> Result<RussoDecomposition> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    if let Some(bad) = p_grid.iter().find(|p| **p <= zero || **p >= one) {
        return Err(Error::Parameter(format!("grid point {bad} must lie strictly inside (0,1)")));
    }
    let m = table.edge_count;
    if m == 0 {
        return Err(Error::Argument("graph has no edges".into()));
    }
    let fvals: Vec<BigRational> = table.clusters.iter().map(|c| f.eval(c)).collect();
    let within = |c: usize| table.e_v(c).is_some_and(|e| e <= n);

    let expectation = table.expectation(f, Some(n));
    let dedp = expectation.derivative();

    let mut h_moment = PolynomialInP::zero();
    let mut ev_moment = PolynomialInP::zero();
    for (id, cl) in table.clusters.iter().enumerate() {
        if !within(id) || fvals[id].is_zero() {
            continue;
        }
        let (a, b) = (cl.open_edges.len(), cl.boundary_edges.len());
        let prob = PolynomialInP::monomial_pq(a, b);
        // h_p = p b - (1-p) a = (a+b) p - a
        let h = PolynomialInP::from_coeffs(vec![
            BigRational::from_integer(-BigInt::from(a)),
            BigRational::from_integer(BigInt::from(a + b)),
        ]);
        h_moment = h_moment.add(&prob.mul(&h).scale(&fvals[id]));
        ev_moment = ev_moment.add(&prob.scale(&(&fvals[id] * BigRational::from_integer(BigInt::from(a + b)))));
    }

    let mut uc = vec![BigRational::zero(); m];
    let mut dc = vec![BigRational::zero(); m];
    for ((down, up), counts) in table.pivotal_pairs() {
        let (down, up) = (down as usize, up as usize);
        debug_assert_ne!(table.open_mask(down), table.open_mask(up));
        let up_in = within(up);
        let du = if up_in { &fvals[up] - &fvals[down] } else { BigRational::zero() };
        let dd = if within(down) && !up_in { fvals[down].clone() } else { BigRational::zero() };
        if du.is_zero() && dd.is_zero() {
            continue;
        }
        for (k, &cnt) in counts.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(cnt));
            uc[k] += &du * &c;
            dc[k] += &dd * &c;
        }
    }
    let u = PolynomialInP::from_binomial_basis(&uc, m - 1);
    let d = PolynomialInP::from_binomial_basis(&dc, m - 1);

    let f_nonneg = fvals.iter().all(|v| *v >= zero);
    let increasing = f.is_increasing();
    let points = p_grid
        .iter()
        .map(|p| {
            let q = &one - p;
            let mv = h_moment.eval(p) / (p * &q);
            let (uv, dv, de) = (u.eval(p), d.eval(p), dedp.eval(p));
            let bound = ev_moment.eval(p) / &q;
            RussoPoint {
                p: p.to_string(),
                identity: de == -mv.clone() && de == &uv - &dv,
                d_nonnegative: f_nonneg.then(|| dv >= zero),
                u_nonnegative: increasing.then(|| uv >= zero),
                d_bound_holds: dv <= bound,
                m_f64: to_f64(&mv),
                u_f64: to_f64(&uv),
                d_f64: to_f64(&dv),
                dedp_f64: to_f64(&de),
                m: mv.to_string(),
                u: uv.to_string(),
                d: dv.to_string(),
                dedp: de.to_string(),
                d_bound: bound.to_string(),
            }
        })
        .collect();
    Ok(RussoDecomposition { n, expectation, dedp, h_moment, u, d, ev_moment, points })
}

/// `{1/10, 2/10, ..., 9/10}`
pub fn default_grid() -> Vec<BigRational> {
    (1..10).map(|i| super::poly::rat(i, 10)).collect()
}
