use num_rational::BigRational;
use percolab::anatomy::intrinsic_ball;
use percolab::asymptotics::{
    alpha_exponent, exact_anchored, greedy_anchored, pipe_census, solve_alpha, tail_minimum, walk_return, Walk,
};
use percolab::engine::Config;
use percolab::exact::to_f64;
use percolab::rng::EdgeLabelSample;
use percolab::{Family, Graph};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_stable_under_tolerance(p in 0.05f64..0.95, zeta in 0.0f64..2.0) {
        let a = solve_alpha(p, zeta, 1e-10).unwrap().alpha;
        let b = solve_alpha(p, zeta, 1e-13).unwrap().alpha;
        prop_assert!((a - b).abs() <= 2e-10);
        prop_assert!(a >= 0.0 && a <= p);
        if a > 0.0 && a < p {
            prop_assert!((alpha_exponent(a, p) - zeta).abs() < 1e-6);
        }
    }

    #[test]
    fn greedy_never_below_exact(seed in any::<u64>()) {
        let g = Graph::generate(&Family::RegularTree { d: 3, radius: 8 }).unwrap();
        let cfg = Config { labels: EdgeLabelSample::new(seed), p: 0.85 };
        let greedy = greedy_anchored(&g, &cfg, 0, 12);
        let exact = exact_anchored(&g, &cfg, 0, 12).unwrap();
        for n in 1..=12 {
            if let (Some(gr), Some(ex)) = (tail_minimum(&greedy, n), tail_minimum(&exact, n)) {
                prop_assert!(gr.0 >= ex.0 - 1e-12 && gr.1 >= ex.1 - 1e-12);
            }
        }
    }
}

#[test]
fn walk_float_matches_rationals() {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 6 }).unwrap();
    let mut checked = 0;
    for seed in 0..60 {
        let lg = intrinsic_ball(&g, &Config { labels: EdgeLabelSample::new(seed), p: 0.6 }, 0, 4);
        if lg.len() > 30 || lg.adj[0].is_empty() {
            continue;
        }
        let w = Walk::new(&lg);
        let exact: Vec<BigRational> = w.return_probabilities_exact(16).unwrap();
        let (float, drift) = w.return_probabilities(16);
        assert!(drift < 1e-12);
        for (x, y) in exact.iter().zip(&float) {
            assert!((to_f64(x) - y).abs() < 1e-12);
        }
        assert_eq!(w.p2_closed_form(), exact[2]);
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn walk_return_is_decreasing_on_even_steps_of_a_tree() {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 12 }).unwrap();
    let r = walk_return(&g, 0.8, 3, 60, 0, 5).unwrap();
    assert!(r.p2_match && r.max_mass_error < 1e-12);
    assert_eq!(r.return_probs.len(), 61);
    assert!(r.return_probs.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn pipe_bookkeeping() {
    let g = Graph::generate(&Family::RegularTree { d: 3, radius: 10 }).unwrap();
    let c = pipe_census(&g, 0.7, 200, 1, &[1, 3, 5], 2).unwrap();
    assert_eq!((c.censored + c.excluded) as u64, c.trials);
    assert_eq!(c.rows.len(), 3);
    assert!(c.rows.windows(2).all(|w| w[0].median <= w[1].median));
    assert_eq!(c.to_csv(), pipe_census(&g, 0.7, 200, 1, &[1, 3, 5], 1).unwrap().to_csv());
}
