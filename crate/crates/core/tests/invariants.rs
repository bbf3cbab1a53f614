use kcollapse::bounds::{best_bounds, gamma_k, lb_trivial, ub_balanced, ub_bmthm};
use kcollapse::family::{check_k_collapsing, normalisation_check, scalar_k_collapsing};
use kcollapse::graphtools::{equitable_coloring, is_equitable_coloring, random_bounded_degree};
use kcollapse::matrixform::{hadamard_power, hadamard_rank_bound, rank, rank_certificate, row_normalize};
use kcollapse::subsets::{binomial, rank as subset_rank, unrank, RevolvingDoor};
use kcollapse::vector::{add, dot, scale};
use kcollapse::{CollapseMatrix, NormSpace, Rational, Scalar, ScanOptions, VectorFamily};
use num::{One, Signed, Zero};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=8).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn rvec(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rat(), d)
}

/// Exact spaces in dimension 2 or 3.
fn exact_space() -> impl Strategy<Value = NormSpace<Rational>> {
    (2usize..=3, 0usize..4).prop_flat_map(|(d, kind)| {
        prop::collection::vec(rvec(d), d..=d + 2).prop_filter_map("degenerate", move |fs| match kind {
            0 => Some(NormSpace::linf(d)),
            1 => Some(NormSpace::l1(d)),
            2 => NormSpace::slab(d, fs, None).ok(),
            _ => NormSpace::polytope(d, fs).ok(),
        })
    })
}

fn space_and_vectors(n: usize) -> impl Strategy<Value = (NormSpace<Rational>, Vec<Vec<Rational>>)> {
    exact_space().prop_flat_map(move |s| {
        let d = s.dim;
        (Just(s), prop::collection::vec(rvec(d), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dual_pairing_is_bounded((space, xs) in space_and_vectors(2)) {
        let (f, x) = (&xs[0], &xs[1]);
        if let (Ok(df), Ok(nx)) = (space.dual_norm(f), space.norm(x)) {
            prop_assert!(dot(f, x) <= df * nx);
        }
    }

    #[test]
    fn dual_unit_vector_attains_the_norm((space, xs) in space_and_vectors(1)) {
        let x = &xs[0];
        prop_assume!(x.iter().any(|v| !v.is_zero()));
        let f = space.dual_unit_vector(x).unwrap();
        prop_assert_eq!(space.dual_norm(&f).unwrap(), Rational::one());
        prop_assert_eq!(dot(&f, x), space.norm(x).unwrap());
    }

    #[test]
    fn exact_dot_matches_termwise_sum(a in rvec(7), b in rvec(7)) {
        let naive = a.iter().zip(&b).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
        prop_assert_eq!(dot(&a, &b), naive);
        prop_assert_eq!(Scalar::sum(&a), a.iter().fold(Rational::zero(), |acc, x| acc + x));
    }

    #[test]
    fn norm_axioms((space, xs) in space_and_vectors(2), c in rat()) {
        let (x, y) = (&xs[0], &xs[1]);
        let (nx, ny) = (space.norm(x).unwrap(), space.norm(y).unwrap());
        prop_assert!(space.norm(&add(x, y)).unwrap() <= &nx + &ny);
        prop_assert_eq!(space.norm(&scale(x, &c)).unwrap(), c.abs() * nx);
    }

    #[test]
    fn float_and_exact_norms_agree((space, xs) in space_and_vectors(1)) {
        let x = &xs[0];
        let exact = Scalar::to_f64(&space.norm(x).unwrap());
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        if let Ok(float) = space.cast::<f64>().norm(&xf) {
            prop_assert!((float - exact).abs() <= 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn collapsing_is_independent_of_threads(vs in prop::collection::vec(rvec(2), 3..9), k in 1usize..5) {
        let fam = VectorFamily::new(NormSpace::linf(2), vs).unwrap();
        prop_assume!(k <= fam.len());
        let one = check_k_collapsing(&fam, k, &ScanOptions::default()).unwrap();
        let four = check_k_collapsing(&fam, k, &ScanOptions { threads: 4, ..ScanOptions::default() }).unwrap();
        prop_assert_eq!(one, four);
    }

    /// One entry `1 + t`, the rest in `[-1/k, -t/(k-1)]`, then one entry nudged.
    #[test]
    fn scalar_normalisation(
        k in 2usize..7,
        extra in 2usize..6,
        t in 0i64..=12,
        us in prop::collection::vec(0i64..=12, 12),
        nudge in -3i64..=3,
    ) {
        let m = k + extra;
        let ki = k as i64;
        let t = Rational::ratio(t * (ki - 1), 12 * ki);
        let mut values = vec![Rational::one() + &t];
        for &u in us.iter().take(m - 1) {
            let w = Rational::ratio(u, 12);
            let lo = Rational::ratio(-1, ki);
            let hi = -(&t / Rational::from_i64(ki - 1));
            values.push(&lo * &w + hi * (Rational::one() - w));
        }
        let last = values.len() - 1;
        values[last] += Rational::ratio(nudge, 24 * ki);
        prop_assume!(scalar_k_collapsing(&values, k));
        prop_assert!(normalisation_check(&values, k).unwrap().holds);
    }

    #[test]
    fn subset_rank_round_trip(n in 1usize..20, k in 0usize..8, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let total = binomial(n as u64, k as u64);
        let r = seed as u128 % total;
        let s = unrank(n, k, r);
        prop_assert_eq!(s.len(), k);
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(subset_rank(&s), r);
    }

    #[test]
    fn revolving_door_is_a_gray_code(n in 1usize..11, k in 0usize..6) {
        prop_assume!(k <= n);
        let mut seen = std::collections::BTreeSet::new();
        let mut prev: Option<Vec<usize>> = None;
        for (s, change) in RevolvingDoor::new(n, k) {
            if let Some(p) = &prev {
                let (left, entered) = change.expect("every step after the first swaps one element");
                prop_assert!(p.contains(&left) && !s.contains(&left));
                prop_assert!(s.contains(&entered) && !p.contains(&entered));
            }
            prop_assert!(seen.insert(s.clone()));
            prev = Some(s);
        }
        prop_assert_eq!(seen.len() as u128, binomial(n as u64, k as u64));
    }

    #[test]
    fn rank_certificate_bound(rows in prop::collection::vec(rvec(4), 4)) {
        let a = CollapseMatrix::new(rows).unwrap();
        let c = rank_certificate(&a);
        prop_assert!(c.bound_holds());
        prop_assert!(c.rank_lower_bound <= Rational::from_i64(c.rank as i64));
        let f = rank_certificate(&a.cast::<f64>());
        prop_assert!(f.bound_holds());
    }

    #[test]
    fn hadamard_rank(b in prop::collection::vec(rvec(2), 6), c in prop::collection::vec(rvec(6), 2), p in 1u32..4) {
        let e = (0..6)
            .map(|i| (0..6).map(|j| (0..2).fold(Rational::zero(), |acc, t| acc + &b[i][t] * &c[t][j])).collect())
            .collect();
        let a = CollapseMatrix::new(e).unwrap();
        prop_assert!(rank(&a) <= 2);
        prop_assert!(rank(&hadamard_power(&a, p)) as u128 <= hadamard_rank_bound(2, p));
    }

    #[test]
    fn row_normalize_gives_unit_diagonal(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 4), diag in prop::collection::vec(4i64..=12, 4)) {
        let entries: Vec<Vec<Rational>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, &v)| if i == j { Rational::ratio(diag[i], 4) } else { Rational::ratio(v, 4) }).collect())
            .collect();
        let a = CollapseMatrix::new(entries).unwrap();
        let n = row_normalize(&a).unwrap();
        for i in 0..4 {
            prop_assert!(n.entries[i][i].is_one());
            for j in 0..4 {
                prop_assert!(n.entries[i][j].abs() <= Rational::one());
            }
        }
        prop_assert_eq!(rank(&n), rank(&a));
    }

    #[test]
    fn equitable_colouring_is_equitable(n in 1usize..80, k in 3usize..9, seed in any::<u64>()) {
        let g = random_bounded_degree(n, k - 2, 3 * n * k, seed);
        let c = equitable_coloring(&g, k).unwrap();
        prop_assert!(is_equitable_coloring(&g, k, &c.assignment));
    }

    #[test]
    fn best_bounds_are_ordered(k in 2usize..60, d in 2usize..60) {
        let b = best_bounds(k, d).unwrap();
        if let Some(u) = &b.best_upper {
            prop_assert!(b.best_lower <= *u);
        }
        if let Some(e) = &b.exact {
            prop_assert!(b.best_lower <= *e);
        }
        // balanced families are in particular families
        let cb = ub_balanced(k, d).unwrap();
        prop_assert!(cb.int().unwrap() <= ub_bmthm(k, d).unwrap().int().unwrap());
        prop_assert!(lb_trivial(k, d).unwrap().int().unwrap() <= &b.best_lower);
    }

    #[test]
    fn bm_bound_grows_with_d(k in 2usize..20, d in 2usize..60) {
        prop_assert!(ub_bmthm(k, d).unwrap().int() <= ub_bmthm(k, d + 1).unwrap().int());
    }
}

#[test]
fn gamma_strictly_decreasing() {
    let g: Vec<f64> = (2..=200).map(|k| gamma_k(k).unwrap().gamma).collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]));
}
