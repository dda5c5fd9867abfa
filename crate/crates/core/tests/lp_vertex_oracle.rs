//! The simplex against brute-force vertex enumeration on small boxed LPs.

use ferrysched_core::lp::{LpStatus, Row, Simplex};
use ferrysched_core::model::Sense;
use ferrysched_core::num::{int, to_f64};
use ferrysched_core::Rational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

#[derive(Clone, Debug)]
struct SmallLp {
    n: usize,
    rows: Vec<(Vec<i64>, Sense, i64)>,
    cost: Vec<i64>,
    upper: Vec<i64>,
}

fn sense() -> impl Strategy<Value = Sense> {
    prop_oneof![Just(Sense::Le), Just(Sense::Eq), Just(Sense::Ge)]
}

fn small_lp() -> impl Strategy<Value = SmallLp> {
    (1usize..=3).prop_flat_map(|n| {
        let row = (prop::collection::vec(-3i64..=3, n), sense(), -4i64..=8);
        (
            Just(n),
            prop::collection::vec(row, 0..=3),
            prop::collection::vec(-5i64..=5, n),
            prop::collection::vec(1i64..=4, n),
        )
            .prop_map(|(n, rows, cost, upper)| SmallLp { n, rows, cost, upper })
    })
}

/// Solves `a x = b` exactly; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                let pivot = a[c].clone();
                for (k, pv) in pivot.iter().enumerate().skip(c) {
                    a[r][k] -= pv * &f;
                }
                let v = &b[c] * &f;
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn feasible(lp: &SmallLp, x: &[Rational]) -> bool {
    let in_box = x.iter().zip(&lp.upper).all(|(v, u)| !v.is_negative() && *v <= int(*u));
    in_box
        && lp.rows.iter().all(|(coef, s, rhs)| {
            let lhs: Rational = coef.iter().zip(x).map(|(a, v)| int(*a) * v).sum();
            match s {
                Sense::Le => lhs <= int(*rhs),
                Sense::Eq => lhs == int(*rhs),
                Sense::Ge => lhs >= int(*rhs),
            }
        })
}

/// Minimum over all basic solutions, or `None` if none is feasible.
fn vertex_optimum(lp: &SmallLp) -> Option<Rational> {
    let n = lp.n;
    let mut planes: Vec<(Vec<Rational>, Rational)> =
        lp.rows.iter().map(|(c, _, r)| (c.iter().map(|&a| int(a)).collect(), int(*r))).collect();
    for j in 0..n {
        let unit: Vec<Rational> = (0..n).map(|k| int((k == j) as i64)).collect();
        planes.push((unit.clone(), int(0)));
        planes.push((unit, int(lp.upper[j])));
    }
    let mut best: Option<Rational> = None;
    let total = planes.len();
    for mask in 0u32..(1 << total) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let chosen: Vec<usize> = (0..total).filter(|i| mask & (1 << i) != 0).collect();
        let a = chosen.iter().map(|&i| planes[i].0.clone()).collect();
        let b = chosen.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x) {
                let z: Rational = lp.cost.iter().zip(&x).map(|(c, v)| int(*c) * v).sum();
                if best.as_ref().is_none_or(|b| z < *b) {
                    best = Some(z);
                }
            }
        }
    }
    best
}

fn simplex<F: ferrysched_core::lp::Scalar>(lp: &SmallLp) -> Simplex<F> {
    let conv = |v: i64| F::from_rational(&int(v));
    let rows: Vec<Row<F>> = lp
        .rows
        .iter()
        .map(|(c, s, r)| (c.iter().enumerate().map(|(j, &a)| (j, conv(a))).collect(), *s, conv(*r)))
        .collect();
    Simplex::new(
        lp.n,
        &rows,
        lp.cost.iter().map(|&c| conv(c)).collect(),
        vec![Some(conv(0)); lp.n],
        lp.upper.iter().map(|&u| Some(conv(u))).collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn exact_simplex_matches_vertex_enumeration(lp in small_lp()) {
        let oracle = vertex_optimum(&lp);
        let mut s = simplex::<Rational>(&lp);
        let status = s.solve().unwrap();
        match oracle {
            None => prop_assert_eq!(status, LpStatus::Infeasible),
            Some(z) => {
                prop_assert_eq!(status, LpStatus::Optimal);
                prop_assert_eq!(s.objective(), z);
                prop_assert!(feasible(&lp, s.values()));
            }
        }
    }

    #[test]
    fn float_simplex_agrees_to_tolerance(lp in small_lp()) {
        let oracle = vertex_optimum(&lp);
        let mut s = simplex::<f64>(&lp);
        let status = s.solve().unwrap();
        match oracle {
            None => prop_assert_eq!(status, LpStatus::Infeasible),
            Some(z) => {
                prop_assert_eq!(status, LpStatus::Optimal);
                prop_assert!((s.objective() - to_f64(&z)).abs() < 1e-7);
            }
        }
    }
}
