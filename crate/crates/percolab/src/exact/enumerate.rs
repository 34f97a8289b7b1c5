use super::poly::PolynomialInP;
use crate::engine::{intrinsic_radius, Cluster};
use crate::error::{Error, Result};
use crate::graph::{for_each_edge_animal, Graph, Step};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Largest edge count accepted by full configuration enumeration.
pub const MAX_ENUM_EDGES: usize = 22;
/// Largest number of connected subgraphs visited by the animal expansion.
pub const MAX_ANIMALS: u64 = 10_000_000;

/// A real-valued function of the root cluster, evaluated exactly.
pub trait ClusterFunctional {
    fn eval(&self, c: &Cluster) -> BigRational;

    /// True when the functional is known to be increasing in the cluster.
    fn is_increasing(&self) -> bool {
        false
    }
}

impl<F: Fn(&Cluster) -> BigRational> ClusterFunctional for F {
    fn eval(&self, c: &Cluster) -> BigRational {
        self(c)
    }
}

/// Built-in functionals.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    One,
    /// `E_v`
    Ev,
    /// `|K_v|`
    Kv,
    /// `1(|K_v| = k)`
    KvEquals(usize),
    /// `R_v`
    Rv,
    /// Taylor polynomial of `exp(t E_v)` up to `order`.
    ExpTaylor { t: BigRational, order: u32 },
}

impl ClusterFunctional for Functional {
    fn eval(&self, c: &Cluster) -> BigRational {
        let int = |x: usize| BigRational::from_integer(BigInt::from(x));
        match self {
            Functional::One => BigRational::one(),
            Functional::Ev => int(c.e_v()),
            Functional::Kv => int(c.size()),
            Functional::KvEquals(k) => int((c.size() == *k) as usize),
            Functional::Rv => int(c.intrinsic_radius as usize),
            Functional::ExpTaylor { t, order } => {
                let x = t * int(c.e_v());
                let mut term = BigRational::one();
                let mut sum = BigRational::one();
                for j in 1..=*order {
                    term = term * &x / int(j as usize);
                    sum += &term;
                }
                sum
            }
        }
    }

    fn is_increasing(&self) -> bool {
        match self {
            Functional::One | Functional::Ev | Functional::Kv | Functional::Rv => true,
            Functional::ExpTaylor { t, .. } => *t >= BigRational::zero(),
            Functional::KvEquals(_) => false,
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;

    /// `one`, `ev`, `kv`, `kv=K`, `rv`, `exp:T:ORDER` (T rational).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Ok(match s.as_str() {
            "one" | "1" => Functional::One,
            "ev" | "e_v" => Functional::Ev,
            "kv" | "k_v" | "size" => Functional::Kv,
            "rv" | "r_v" | "radius" => Functional::Rv,
            _ => {
                if let Some(k) = s.strip_prefix("kv=") {
                    let k = k.parse().map_err(|_| Error::Argument(format!("bad functional {s}")))?;
                    Functional::KvEquals(k)
                } else if let Some(rest) = s.strip_prefix("exp:") {
                    let (t, o) = rest
                        .split_once(':')
                        .ok_or_else(|| Error::Argument(format!("expected exp:T:ORDER, got {s}")))?;
                    Functional::ExpTaylor {
                        t: super::poly::parse_rational(t)?,
                        order: o.parse().map_err(|_| Error::Argument(format!("bad order in {s}")))?,
                    }
                } else {
                    return Err(Error::Argument(format!("unknown functional {s}")));
                }
            }
        })
    }
}

/// Every configuration of a small graph, classified by the root's open component.
///
/// Components are complete (exploration continues through halo vertices), so a
/// component with `a` open and `b` closed touching edges has probability
/// `p^a (1-p)^b`. A component holding a halo vertex is censored: `E_v = ∞`.
#[derive(Debug, Clone)]
pub struct ConfigTable {
    pub edge_count: usize,
    pub clusters: Vec<Cluster>,
    open_mask: Vec<u32>,
    boundary_mask: Vec<u32>,
    cluster_of: Vec<u32>,
    /// counts[c][k]: configurations with `k` open edges whose root component is `c`.
    counts: Vec<Vec<u64>>,
}

impl ConfigTable {
    pub fn build(g: &Graph, root: u32) -> Result<ConfigTable> {
        let m = g.edge_count();
        if m > MAX_ENUM_EDGES {
            return Err(Error::Size(format!("{m} edges exceeds the enumeration guard of {MAX_ENUM_EDGES}")));
        }
        if g.vertex_count() > 64 {
            return Err(Error::Size(format!("{} vertices exceeds 64", g.vertex_count())));
        }
        if root as usize >= g.vertex_count() {
            return Err(Error::Argument(format!("root {root} is not a vertex")));
        }
        if g.is_boundary(root) {
            return Err(Error::Argument(format!("root {root} lies on the boundary halo")));
        }
        let n = g.vertex_count();
        let inc: Vec<u32> = (0..n as u32)
            .map(|v| g.neighbors(v).iter().fold(0u32, |acc, &(_, e)| acc | 1 << e))
            .collect();
        let mut index: HashMap<u32, u32> = HashMap::new();
        let mut t = ConfigTable {
            edge_count: m,
            clusters: Vec::new(),
            open_mask: Vec::new(),
            boundary_mask: Vec::new(),
            cluster_of: vec![0; 1 << m],
            counts: Vec::new(),
        };
        for omega in 0u32..(1u32 << m) {
            let (vmask, open) = component_masks(g, &inc, root, omega);
            let id = *index.entry(open).or_insert_with(|| {
                let touched = bits64(vmask).fold(0u32, |acc, v| acc | inc[v as usize]);
                t.clusters.push(make_cluster(g, root, vmask, open, touched & !open));
                t.open_mask.push(open);
                t.boundary_mask.push(touched & !open);
                t.counts.push(vec![0; m + 1]);
                (t.clusters.len() - 1) as u32
            });
            t.cluster_of[omega as usize] = id;
            t.counts[id as usize][omega.count_ones() as usize] += 1;
        }
        Ok(t)
    }

    /// Root component id of configuration `omega`.
    pub fn cluster_of(&self, omega: u32) -> usize {
        self.cluster_of[omega as usize] as usize
    }

    pub fn config_counts(&self, c: usize) -> &[u64] {
        &self.counts[c]
    }

    /// `E_v` with censored clusters mapped to `None` (infinity).
    pub fn e_v(&self, c: usize) -> Option<usize> {
        let cl = &self.clusters[c];
        (!cl.censored).then(|| cl.e_v())
    }

    fn within(&self, c: usize, n_cap: Option<usize>) -> bool {
        match (self.e_v(c), n_cap) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(e), Some(n)) => e <= n,
        }
    }

    /// `E_p[F(K_v) 1(E_v <= n_cap)]` as a polynomial, summed over all configurations.
    pub fn expectation(&self, f: &dyn ClusterFunctional, n_cap: Option<usize>) -> PolynomialInP {
        let m = self.edge_count;
        let mut c = vec![BigRational::zero(); m + 1];
        for (id, cl) in self.clusters.iter().enumerate() {
            if !self.within(id, n_cap) {
                continue;
            }
            let fv = f.eval(cl);
            if fv.is_zero() {
                continue;
            }
            for (k, &cnt) in self.counts[id].iter().enumerate() {
                if cnt > 0 {
                    c[k] += &fv * BigRational::from_integer(BigInt::from(cnt));
                }
            }
        }
        PolynomialInP::from_binomial_basis(&c, m)
    }

    /// Probability that the root component is censored.
    pub fn censored_mass(&self) -> PolynomialInP {
        let m = self.edge_count;
        let mut c = vec![BigRational::zero(); m + 1];
        for (id, cl) in self.clusters.iter().enumerate() {
            if cl.censored {
                for (k, &cnt) in self.counts[id].iter().enumerate() {
                    c[k] += BigRational::from_integer(BigInt::from(cnt));
                }
            }
        }
        PolynomialInP::from_binomial_basis(&c, m)
    }

    /// Probability of each distinct component, `p^|open| (1-p)^|closed boundary|`.
    pub fn cluster_probability(&self, c: usize) -> PolynomialInP {
        let cl = &self.clusters[c];
        PolynomialInP::monomial_pq(cl.open_edges.len(), cl.boundary_edges.len())
    }

    /// Pairs `(down, up, e)` where closing/opening boundary edge `e` of `down`
    /// grows it into `up`, with counts of the other `m-1` edges by open count.
    pub(crate) fn pivotal_pairs(&self) -> HashMap<(u32, u32), Vec<u64>> {
        let m = self.edge_count;
        let mut pairs: HashMap<(u32, u32), Vec<u64>> = HashMap::new();
        for omega in 0u32..(1u32 << m) {
            let down = self.cluster_of[omega as usize];
            let k = omega.count_ones() as usize;
            for e in bits(self.boundary_mask[down as usize]) {
                let up = self.cluster_of[(omega | 1 << e) as usize];
                pairs.entry((down, up)).or_insert_with(|| vec![0; m])[k] += 1;
            }
        }
        pairs
    }

    pub(crate) fn open_mask(&self, c: usize) -> u32 {
        self.open_mask[c]
    }
}

fn bits(mut x: u32) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let b = x.trailing_zeros();
            x &= x - 1;
            b
        })
    })
}

fn bits64(mut x: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let b = x.trailing_zeros();
            x &= x - 1;
            b
        })
    })
}

fn component_masks(g: &Graph, inc: &[u32], root: u32, omega: u32) -> (u64, u32) {
    let mut vis = 1u64 << root;
    let mut frontier = vis;
    let mut open = 0u32;
    while frontier != 0 {
        let mut next = 0u64;
        for v in bits64(frontier) {
            let es = inc[v as usize] & omega & !open;
            open |= es;
            for e in bits(es) {
                let w = g.other(e, v);
                if vis >> w & 1 == 0 {
                    vis |= 1 << w;
                    next |= 1 << w;
                }
            }
        }
        frontier = next;
    }
    (vis, open)
}

fn make_cluster(g: &Graph, root: u32, vmask: u64, open: u32, closed: u32) -> Cluster {
    let mut vertices = vec![root];
    vertices.extend(bits64(vmask & !(1u64 << root)));
    let censored = vertices.iter().any(|&v| g.is_boundary(v));
    let mut c = Cluster {
        root,
        vertices,
        open_edges: bits(open).collect(),
        boundary_edges: bits(closed).collect(),
        intrinsic_radius: 0,
        censored,
    };
    c.intrinsic_radius = intrinsic_radius(g, &c);
    c
}

/// Exact `E_{p,n}[F(K_v)] = E_p[F(K_v) 1(E_v <= n)]` by summing over all
/// `2^|E|` configurations. `n_cap = None` means no truncation (finite clusters only).
pub fn enumerate_exact(
    g: &Graph,
    root: u32,
    f: &dyn ClusterFunctional,
    n_cap: Option<usize>,
) -> Result<PolynomialInP> {
    Ok(ConfigTable::build(g, root)?.expectation(f, n_cap))
}

/// Sum over connected open subgraphs `H` containing `root` and avoiding the
/// halo, with `|E_o(H)| <= n_cap`, of `F(H) p^|E_o(H)| (1-p)^|∂H|`.
pub fn animal_expansion(
    g: &Graph,
    root: u32,
    f: &dyn ClusterFunctional,
    n_cap: Option<usize>,
) -> Result<PolynomialInP> {
    Ok(animal_series(g, root, f, n_cap.unwrap_or(usize::MAX))?.total())
}

/// Animal expansion grouped by `(|E_o(H)|, |∂H|)`.
#[derive(Debug, Clone, Default)]
pub struct AnimalSeries {
    pub terms: std::collections::BTreeMap<(usize, usize), BigRational>,
    pub animals: u64,
}

impl AnimalSeries {
    pub fn total(&self) -> PolynomialInP {
        self.terms
            .iter()
            .fold(PolynomialInP::zero(), |acc, (&(a, b), c)| {
                acc.add(&PolynomialInP::monomial_pq(a, b).scale(c))
            })
    }

    /// Partial sum over `|E_o(H)| <= n`, evaluated in floating point.
    pub fn partial_sum_f64(&self, n: usize, p: f64) -> f64 {
        self.terms
            .range(..(n + 1, 0))
            .map(|(&(a, b), c)| super::poly::to_f64(c) * p.powi(a as i32) * (1.0 - p).powi(b as i32))
            .sum()
    }
}

pub fn animal_series(g: &Graph, root: u32, f: &dyn ClusterFunctional, max_open: usize) -> Result<AnimalSeries> {
    if root as usize >= g.vertex_count() || g.is_boundary(root) {
        return Err(Error::Argument(format!("root {root} must be an interior vertex")));
    }
    let mut series = AnimalSeries::default();
    let mut overflow = false;
    let mut touched = std::collections::HashSet::new();
    let flow = for_each_edge_animal(
        g,
        root,
        max_open,
        |_| true,
        |v| !g.is_boundary(v),
        |edges, verts| {
            series.animals += 1;
            if series.animals > MAX_ANIMALS {
                overflow = true;
                return Step::Stop;
            }
            touched.clear();
            for &v in verts {
                touched.extend(g.neighbors(v).iter().map(|&(_, e)| e));
            }
            let mut open = edges.to_vec();
            open.sort_unstable();
            let mut vertices = verts.to_vec();
            vertices[1..].sort_unstable();
            let mut boundary: Vec<u32> = touched.iter().copied().filter(|e| open.binary_search(e).is_err()).collect();
            boundary.sort_unstable();
            let mut c = Cluster { root, vertices, open_edges: open, boundary_edges: boundary, intrinsic_radius: 0, censored: false };
            c.intrinsic_radius = intrinsic_radius(g, &c);
            let fv = f.eval(&c);
            if !fv.is_zero() {
                *series
                    .terms
                    .entry((c.open_edges.len(), c.boundary_edges.len()))
                    .or_insert_with(BigRational::zero) += fv;
            }
            Step::Descend
        },
    );
    if overflow || flow.is_break() {
        return Err(Error::Size(format!("more than {MAX_ANIMALS} connected subgraphs")));
    }
    Ok(series)
}

/// `F · 1(E_v <= n)` for aligning the two truncation conventions.
pub fn truncated<'a>(f: &'a dyn ClusterFunctional, n: usize) -> impl Fn(&Cluster) -> BigRational + 'a {
    move |c: &Cluster| if c.e_v() <= n { f.eval(c) } else { BigRational::zero() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::rat;
    use crate::Family;

    fn half() -> BigRational {
        rat(1, 2)
    }

    fn triangle() -> Graph {
        Graph::explicit(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn triangle_full_cluster() {
        let poly = enumerate_exact(&triangle(), 0, &Functional::KvEquals(3), Some(3)).unwrap();
        assert_eq!(poly.eval(&half()), half());
    }

    #[test]
    fn total_probability() {
        let g = Graph::explicit(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let poly = enumerate_exact(&g, 0, &Functional::One, Some(5)).unwrap();
        assert_eq!(poly, PolynomialInP::one());
        let single = Graph::explicit(2, &[(0, 1)]).unwrap();
        assert_eq!(enumerate_exact(&single, 0, &Functional::Ev, Some(1)).unwrap(), PolynomialInP::one());
    }

    #[test]
    fn guard() {
        let g = Graph::generate(&Family::Hypercubic { d: 2, side: 5 }).unwrap();
        assert!(matches!(ConfigTable::build(&g, g.root()), Err(Error::Size(_))));
    }

    #[test]
    fn animals_agree_with_configurations() {
        let g = Graph::explicit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        for f in [Functional::One, Functional::Ev, Functional::Kv] {
            let a = enumerate_exact(&g, 0, &f, None).unwrap();
            let b = animal_expansion(&g, 0, &f, None).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn censored_mass_on_small_tree() {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 1 }).unwrap();
        let t = ConfigTable::build(&g, 0).unwrap();
        // censored unless all three edges are closed
        let q3 = PolynomialInP::monomial_pq(0, 3);
        assert_eq!(t.censored_mass(), PolynomialInP::one().sub(&q3));
        assert_eq!(t.expectation(&Functional::One, None), q3);
    }

    #[test]
    fn parse_functionals() {
        assert_eq!("kv=3".parse::<Functional>().unwrap(), Functional::KvEquals(3));
        assert_eq!(
            "exp:1/10:4".parse::<Functional>().unwrap(),
            Functional::ExpTaylor { t: rat(1, 10), order: 4 }
        );
        assert!("nope".parse::<Functional>().is_err());
    }
}
