//! Worked values checked against independent computations written out here.

use kcollapse::bounds::{
    binom_stirling_upper, gamma_k, lb_polynomial, ub_bmdistance, ub_bmthm, ub_eucl, ub_hadamard, ub_rankthm1,
    ub_rankthm2,
};
use kcollapse::constructions::{
    counterexample_tuple, fixture_x, fixture_y, greedy_unit_vectors, pk_polytope_norm, PolynomialCode,
};
use kcollapse::family::{check_k_collapsing, check_weak_balancing, diameter_centroid_check};
use kcollapse::graphtools::{bm_inequality, equitable_coloring, max_degree, SimpleGraph};
use kcollapse::matrixform::{gram_from_family, rank, rank_certificate};
use kcollapse::simplexopt::{max_pow_general, vertex_is_collapsing, vertex_oracle, Exactness};
use kcollapse::vector::{dot, sub};
use kcollapse::{
    best_bounds, CollapseMatrix, FiniteFieldParams, NormSpace, Rational, Scalar, ScanOptions, VectorFamily,
};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn qv(xs: &[(i64, i64)]) -> Vec<Rational> {
    xs.iter().map(|&(n, d)| q(n, d)).collect()
}

fn int_of(r: &kcollapse::BoundResult) -> i64 {
    r.int().expect("finite").to_i64().expect("small")
}

/// Smallest `t` on a fine grid with `x / t` inside the slab ball, found by bisection.
fn slab_gauge_by_bisection(ys: &[Vec<f64>], x: &[f64]) -> f64 {
    let inside = |t: f64| ys.iter().all(|y| (dot(y, x) / t).abs() <= 1.0);
    let (mut lo, mut hi) = (1e-12, 1e6);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[test]
fn slab_gauge_matches_bisection() {
    let space = NormSpace::slab(2, vec![qv(&[(1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)])], None).unwrap();
    assert_eq!(space.gauge(&qv(&[(1, 2), (-2, 1)])).unwrap(), q(2, 1));
    let ys = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let skew =
        NormSpace::slab(2, ys.iter().map(|y| y.iter().map(|&v| Rational::from_f64(v)).collect()).collect(), None)
            .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x = vec![q(rng.gen_range(-20..=20), 7), q(rng.gen_range(-20..=20), 5)];
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let g = Scalar::to_f64(&skew.gauge(&x).unwrap());
        let want = if xf.iter().all(|v| *v == 0.0) { 0.0 } else { slab_gauge_by_bisection(&ys, &xf) };
        assert!((g - want).abs() < 1e-9, "x={x:?}: {g} vs {want}");
    }
}

#[test]
fn dual_norm_matches_boundary_sampling() {
    let space = NormSpace::slab(2, vec![qv(&[(1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)])], None).unwrap();
    let f = qv(&[(2, 1), (3, 1)]);
    assert_eq!(space.dual_norm(&f).unwrap(), q(5, 1));
    // sup of <f, x> over the boundary of the unit square, sampled by angle
    let mut best = f64::MIN;
    for i in 0..3600 {
        let a = i as f64 * std::f64::consts::TAU / 3600.0;
        let (c, s) = (a.cos(), a.sin());
        let scale = c.abs().max(s.abs());
        best = best.max((2.0 * c + 3.0 * s) / scale);
    }
    assert!(best <= 5.0 + 1e-12 && best > 5.0 - 1e-3);
}

#[test]
fn dual_unit_vector_tie_breaking() {
    let space = NormSpace::<Rational>::linf(2);
    let x = qv(&[(2, 1), (2, 1)]);
    let f = space.dual_unit_vector(&x).unwrap();
    assert_eq!(f, qv(&[(1, 1), (0, 1)]));
    assert_eq!(dot(&f, &x), space.norm(&x).unwrap());
}

/// `conv{ sum_{i in I} +-e_i : |I| <= k }` is `{ |x|_inf <= 1, |x|_1 <= k }`.
#[test]
fn pk_gauge_is_max_of_linf_and_scaled_l1() {
    assert_eq!(pk_polytope_norm(3, 3).unwrap().gauge(&qv(&[(1, 1), (1, 1), (1, 1)])).unwrap(), q(1, 1));
    assert_eq!(pk_polytope_norm(3, 2).unwrap().gauge(&qv(&[(1, 1), (1, 1), (1, 1)])).unwrap(), q(3, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in 2..=4usize {
        for k in 1..=d + 1 {
            let space = pk_polytope_norm(d, k).unwrap();
            for _ in 0..20 {
                let x: Vec<Rational> = (0..d).map(|_| q(rng.gen_range(-12..=12), rng.gen_range(1..=6))).collect();
                let linf = x.iter().map(|v| v.abs()).max().unwrap();
                let l1 = x.iter().fold(Rational::zero(), |a, v| a + v.abs());
                let want = std::cmp::max(linf, l1 / Rational::from_i64(k as i64));
                assert_eq!(space.gauge(&x).unwrap(), want, "d={d} k={k} x={x:?}");
            }
        }
    }
}

fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[test]
fn collapsing_scan_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..60 {
        let d = rng.gen_range(1..=3usize);
        let m = rng.gen_range(2..=7usize);
        let k = rng.gen_range(1..=m);
        let v: Vec<Vec<Rational>> = (0..m).map(|_| (0..d).map(|_| q(rng.gen_range(-4..=4), 4)).collect()).collect();
        let space = if trial % 2 == 0 { NormSpace::linf(d) } else { NormSpace::l1(d) };
        let fam = VectorFamily::new(space, v.clone()).unwrap();
        let norm = |s: &[usize]| -> Rational {
            let sum: Vec<Rational> = (0..d).map(|j| s.iter().fold(Rational::zero(), |a, &i| a + &v[i][j])).collect();
            if trial % 2 == 0 {
                sum.iter().map(|x| x.abs()).max().unwrap()
            } else {
                sum.iter().fold(Rational::zero(), |a, x| a + x.abs())
            }
        };
        let first_bad = all_subsets(m, k).into_iter().find(|s| norm(s) > Rational::one());
        let rep = check_k_collapsing(&fam, k, &ScanOptions::default()).unwrap();
        assert_eq!(rep.holds, first_bad.is_none(), "trial {trial}");
        assert_eq!(rep.witness, first_bad, "trial {trial}");
    }
}

#[test]
fn collapsing_witness_examples() {
    let fam = VectorFamily::new(
        NormSpace::linf(2),
        vec![qv(&[(1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)]), qv(&[(9, 10), (9, 10)])],
    )
    .unwrap();
    let pairs = check_k_collapsing(&fam, 2, &ScanOptions::default()).unwrap();
    assert!(!pairs.holds);
    assert_eq!(pairs.witness, Some(vec![0, 2]));
    let triple = check_k_collapsing(&fam, 3, &ScanOptions::default()).unwrap();
    assert_eq!(triple.witness, Some(vec![0, 1, 2]));
    assert_eq!(triple.margin, q(19, 10));
}

#[test]
fn weak_balancing_on_the_boundary() {
    let fam = VectorFamily::new(
        NormSpace::linf(2),
        vec![qv(&[(1, 1), (0, 1)]), qv(&[(-1, 1), (0, 1)]), qv(&[(0, 1), (1, 1)])],
    )
    .unwrap();
    assert!(!check_weak_balancing(&fam).unwrap().holds);
}

#[test]
fn rank_bound_examples() {
    let a = CollapseMatrix::new(vec![qv(&[(1, 1), (1, 1)]), qv(&[(0, 1), (1, 1)])]).unwrap();
    let c = rank_certificate(&a);
    assert_eq!((c.trace.clone(), c.frobenius_sq.clone(), c.rank_lower_bound.clone()), (q(2, 1), q(3, 1), q(4, 3)));
    assert_eq!(c.rank, 2);
    assert!(!c.equality_case);
}

#[test]
fn gram_of_three_directions_at_120_degrees() {
    let h = 3f64.sqrt() / 2.0;
    let fam = VectorFamily::new(NormSpace::l2(2), vec![vec![1.0, 0.0], vec![-0.5, h], vec![-0.5, -h]]).unwrap();
    let a = gram_from_family(&fam).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { -0.5 };
            assert!((a.entries[i][j] - want).abs() < 1e-12);
        }
    }
    assert_eq!(rank(&a), 2);
}

#[test]
fn gamma_solves_its_equation() {
    for k in 2..=30usize {
        let g = gamma_k(k).unwrap().gamma;
        let f = (1.0 + g).powf(1.0 / g) * (1.0 + 1.0 / g);
        assert!((f / (k * k) as f64 - 1.0).abs() < 1e-9, "k={k}: f = {f}");
    }
}

#[test]
fn upper_bound_examples() {
    assert_eq!(int_of(&ub_rankthm1(2, 4).unwrap()), 1361);
    assert_eq!(int_of(&ub_rankthm2(4, 9).unwrap()), 162 / 7);
    assert_eq!(int_of(&ub_rankthm2(6, 10).unwrap()), 20);
    // k + (1 + sqrt(2d-3))/2 with d = 10
    let want = (19.0 + (1.0 + 17f64.sqrt()) / 2.0).floor() as i64;
    assert_eq!(int_of(&ub_rankthm2(19, 10).unwrap()), want);
    assert_eq!(int_of(&ub_bmthm(2, 2).unwrap()), 9);
    assert_eq!(int_of(&ub_bmthm(2, 4).unwrap()), 33);
    assert_eq!(int_of(&ub_bmthm(6, 4).unwrap()), 23);
    assert_eq!(int_of(&ub_bmdistance(5, &q(3, 2)).unwrap()), 6);
    assert_eq!(int_of(&ub_bmdistance(3, &q(5, 4)).unwrap()), 4);
    assert_eq!(int_of(&ub_eucl(4, &q(2, 1)).unwrap()), 7);
    assert_eq!(int_of(&ub_eucl(5, &q(1, 1)).unwrap()), 6);
    assert_eq!(int_of(&ub_hadamard(4, 4, 1).unwrap()), 10);
    assert_eq!(int_of(&ub_hadamard(3, 8, 2).unwrap()), 129);
    assert!(!ub_hadamard(2, 8, 2).unwrap().applicable);
}

/// `floor(k (1 + 2/k)^d) + k - 1` computed with integers.
#[test]
fn bm_bound_matches_integer_formula() {
    for k in 2..=12u32 {
        for d in 2..=30u32 {
            let num = BigInt::from(k) * num::pow(BigInt::from(k + 2), d as usize);
            let den = num::pow(BigInt::from(k), d as usize);
            let want = num / den + BigInt::from(k - 1);
            assert_eq!(ub_bmthm(k as usize, d as usize).unwrap().int(), Some(&want), "k={k} d={d}");
        }
    }
}

#[test]
fn lower_bound_examples() {
    assert_eq!(int_of(&lb_polynomial(3, 91).unwrap()), 729);
    assert_eq!(int_of(&lb_polynomial(2, 43).unwrap()), 343);
    assert!(!lb_polynomial(2, 7).unwrap().applicable);
    let s = binom_stirling_upper(4, 2).unwrap();
    assert!(s > 6.0 && (s - 16.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-9);
    assert!(binom_stirling_upper(2, 1).unwrap() > 2.0);
    assert!(binom_stirling_upper(10, 5).unwrap() > 252.0);
}

#[test]
fn best_bounds_examples() {
    assert_eq!(best_bounds(6, 10).unwrap().exact, Some(BigInt::from(20)));
    assert_eq!(best_bounds(2, 2).unwrap().exact, Some(BigInt::from(4)));
}

#[test]
fn oracle_examples() {
    let r = vertex_oracle(10, 3, 1, true).unwrap();
    assert_eq!(r.value, q(1, 1));
    let cf = max_pow_general(14, 3, 1).unwrap();
    assert_eq!(cf.value, q(13, 9));
    assert_eq!(vertex_oracle(14, 3, 1, false).unwrap().value, q(13, 9));
    assert_eq!(max_pow_general(10, 4, 2).unwrap().value, q(1, 1));
    assert_eq!(vertex_oracle(10, 4, 2, false).unwrap().value, q(1, 1));
    assert_eq!(vertex_oracle(8, 3, 1, false).unwrap().value, q(1, 1));
    let bound = max_pow_general(9, 6, 1).unwrap();
    assert_eq!(bound.exactness, Exactness::UpperBoundOnly);
    assert!(vertex_oracle(9, 6, 1, false).unwrap().value <= bound.value);
}

/// Random sorted collapsing tuples never beat the vertex oracle.
#[test]
fn oracle_dominates_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (m, k) in [(6, 2), (7, 3), (8, 4), (9, 3)] {
        let best = vertex_oracle(m, k, 1, false).unwrap();
        assert!(vertex_is_collapsing(&best.argmax, k));
        let mut hits = 0;
        for _ in 0..5000 {
            let den = 12 * k as i64;
            let mut v: Vec<Rational> = (0..m - 1).map(|_| q(rng.gen_range(-24..=12), den)).collect();
            v.sort_by(|a, b| b.cmp(a));
            if v[0] > Rational::one() || !vertex_is_collapsing(&v, k) {
                continue;
            }
            hits += 1;
            let val = v.iter().fold(Rational::zero(), |a, x| a + x * x);
            assert!(val <= best.value, "m={m} k={k}: {v:?}");
        }
        assert!(hits > 0, "m={m} k={k}: no feasible samples");
    }
}

/// Coincidence counts of polynomials over a prime field, evaluated without the table code.
fn prime_field_coincidences(p: usize, s: usize, a: usize, b: usize) -> usize {
    let coeffs = |mut idx: usize| -> Vec<usize> {
        (0..=s)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                c
            })
            .collect()
    };
    let (ca, cb) = (coeffs(a), coeffs(b));
    let eval = |c: &[usize], x: usize| c.iter().rev().fold(0, |acc, &v| (acc * x + v) % p);
    (0..p).filter(|&x| eval(&ca, x) == eval(&cb, x)).count()
}

#[test]
fn polynomial_code_examples() {
    for (qq, s, lo, hi) in [(2, 1, q(-1, 1), q(0, 1)), (3, 1, q(-1, 2), q(0, 1)), (5, 2, q(-1, 4), q(1, 4))] {
        let code = PolynomialCode::new(&FiniteFieldParams::new(qq, s).unwrap()).unwrap();
        let mut values = std::collections::BTreeSet::new();
        for a in 0..code.len() {
            for b in a + 1..code.len() {
                let c = prime_field_coincidences(qq, s, a, b);
                assert_eq!(code.coincidences(a, b), c);
                let g = code.normalised_gram(a, b);
                assert_eq!(g, q(c as i64 - 1, qq as i64 - 1));
                values.insert(g);
            }
        }
        assert_eq!(values.first(), Some(&lo));
        assert_eq!(values.last(), Some(&hi));
    }
    let f4 = PolynomialCode::new(&FiniteFieldParams::new(4, 2).unwrap()).unwrap();
    assert_eq!(f4.len(), 64);
    for a in 0..64 {
        for b in a + 1..64 {
            let g = f4.normalised_gram(a, b);
            assert!(g >= q(-1, 3) && g <= q(1, 3));
        }
    }
}

#[test]
fn greedy_vectors_respect_delta() {
    let set = greedy_unit_vectors(50, 0.2, 1, 100_000, 500).unwrap();
    assert!(set.len() >= 2);
    for i in 0..set.len() {
        for j in 0..i {
            assert!(set.gram(i, j).abs() < 0.2);
        }
    }
    // in the plane, at most pi / acos(0.1) lines fit
    let planar = greedy_unit_vectors(2, 0.1, 1, 10_000, 100).unwrap();
    assert!(planar.len() <= (std::f64::consts::PI / 0.1f64.acos()).floor() as usize);
}

#[test]
fn fixture_examples() {
    let x = fixture_x(2, &q(1, 10)).unwrap();
    let rep = diameter_centroid_check(&x).unwrap();
    assert_eq!(rep.diameter, q(7, 5));
    assert_eq!(rep.centroid_norm, q(3, 10));
    let x4 = fixture_x(4, &q(1, 100)).unwrap();
    assert_eq!(diameter_centroid_check(&x4).unwrap().centroid_norm, q(1, 16) + q(3, 400));
    for (d, dist) in [(2, q(3, 2)), (3, q(4, 3))] {
        let y = fixture_y(d).unwrap();
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                assert_eq!(y.space.norm(&sub(&y.vectors[i], &y.vectors[j])).unwrap(), dist);
            }
        }
    }
}

#[test]
fn counterexample_tuple_values() {
    assert_eq!(counterexample_tuple(6).unwrap(), qv(&[(-2, 3), (-2, 3), (-2, 3), (-2, 3), (5, 3), (8, 3)]));
    assert_eq!(counterexample_tuple(5).unwrap(), qv(&[(-1, 1), (-1, 1), (-1, 1), (2, 1), (3, 1)]));
}

#[test]
fn graph_examples() {
    assert_eq!(max_degree(&SimpleGraph::empty(4)), 0);
    let star = SimpleGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    assert_eq!(max_degree(&star), 4);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut adj = [[false; 10]; 10];
    let mut edges = Vec::new();
    for a in 0..10 {
        for b in a + 1..10 {
            if rng.gen_bool(0.5) {
                adj[a][b] = true;
                adj[b][a] = true;
                edges.push((a, b));
            }
        }
    }
    let g = SimpleGraph::from_edges(10, &edges).unwrap();
    let brute = (0..10).map(|v| adj[v].iter().filter(|&&e| e).count()).max().unwrap();
    assert_eq!(max_degree(&g), brute);

    let c6 = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
    let col = equitable_coloring(&c6, 3).unwrap();
    let mut sizes = col.class_sizes.clone();
    sizes.sort();
    assert_eq!(sizes, vec![2, 2, 2]);
    for (a, b) in c6.edges() {
        assert_ne!(col.assignment[a], col.assignment[b]);
    }
}

#[test]
fn partition_inequality_example() {
    let b = bm_inequality(8, 6, 4).unwrap();
    assert_eq!((b.q, b.r), (1, 2));
    let lhs = 4f64.powf(1.0 / 6.0);
    let rhs = (4.0f64 / 3.0).powi(4);
    assert!((b.lhs - lhs).abs() < 1e-12 && (b.rhs - rhs).abs() < 1e-12);
    assert!(b.holds);
}
