use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use thermoflow::embedding::{
    average_operator, resolvent_solve, sawtooth, solve_embedding, torus_grid, EmbeddingOutcome, ExpObservable,
    Observable, RealFlow, ScalarExpFlow, TorusLinearFlow, TrigPolynomial,
};

fn circle() -> TorusLinearFlow {
    TorusLinearFlow::new(vec![2f64.sqrt() - 1.0]).unwrap()
}

fn torus() -> TorusLinearFlow {
    TorusLinearFlow::new(vec![2f64.sqrt() - 1.0, (3f64.sqrt() - 1.0) / 4.0]).unwrap()
}

fn trig(dim: usize, modes: &[(Vec<i64>, f64, f64)]) -> TrigPolynomial {
    let mut p = TrigPolynomial::zero(dim);
    for (n, re, im) in modes {
        let c = if n.iter().all(|&k| k == 0) {
            Complex64::new(*re, 0.0)
        } else {
            Complex64::new(*re, *im)
        };
        p.add_mode(n, c).unwrap();
    }
    p
}

fn modes(dim: usize) -> impl Strategy<Value = Vec<(Vec<i64>, f64, f64)>> {
    prop::collection::vec((prop::collection::vec(-6i64..=6, dim), -1.0f64..1.0, -1.0f64..1.0), 1..8)
}

fn sup_on(grid: &[Vec<f64>], f: &Observable) -> f64 {
    grid.iter().map(|x| f.eval(x).abs()).fold(0.0, f64::max)
}

#[test]
fn averaging_contracts_sup_norms() {
    let flow = RealFlow::Torus(torus());
    let grid = torus_grid(2, 40);
    let bundled = [
        Observable::Trig(TrigPolynomial::cosine(&[1, 0], 1.0)),
        Observable::Trig(trig(2, &[(vec![1, 2], 0.3, -0.2), (vec![0, 0], 0.5, 0.0), (vec![3, -1], 0.1, 0.4)])),
        Observable::function(sawtooth),
        Observable::function(|x: &[f64]| (x[0] - 0.5).abs() * (2.0 * std::f64::consts::PI * x[1]).sin()),
    ];
    for f in &bundled {
        let avg = average_operator(&flow, f).unwrap();
        assert!(sup_on(&grid, &avg) <= sup_on(&grid, f) + 1e-12);
    }
    let half = RealFlow::Exp(ScalarExpFlow::PositiveHalfLine);
    let points: Vec<Vec<f64>> = (1..=50).map(|i| vec![0.02 * i as f64]).collect();
    let bounded = Observable::function(|x: &[f64]| (x[0]).sin());
    let avg = average_operator(&half, &bounded).unwrap();
    assert!(sup_on(&points, &avg) <= 1.0);
}

#[test]
fn exponential_examples() {
    let half = RealFlow::Exp(ScalarExpFlow::PositiveHalfLine);
    let avg = average_operator(&half, &Observable::Exp(ExpObservable::log())).unwrap();
    for x in [0.1, 1.0, 4.0, 1e3] {
        assert!((avg.eval(&[x]) - (f64::ln(x) + 0.5)).abs() < 1e-12);
    }
    let line = RealFlow::Exp(ScalarExpFlow::RealLine);
    for d in 1..=4 {
        let avg = average_operator(&line, &Observable::Exp(ExpObservable::monomial(d, 1.5))).unwrap();
        for x in [-2.0f64, -0.5, 0.3, 1.7] {
            let expect = 1.5 * x.powi(d) * ((d as f64).exp() - 1.0) / d as f64;
            assert!((avg.eval(&[x]) - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn embedding_round_trip(m in modes(2)) {
        let btilde = trig(2, &m);
        match solve_embedding(&torus(), &btilde).unwrap() {
            EmbeddingOutcome::Solved { b, round_trip_error } => {
                prop_assert!(round_trip_error < 1e-12);
                let Observable::Trig(back) = average_operator(&RealFlow::Torus(torus()), &Observable::Trig(b)).unwrap() else {
                    unreachable!()
                };
                prop_assert!(back.distance(&btilde) < 1e-12);
            }
            EmbeddingOutcome::Obstructed(r) => prop_assert!(false, "unexpected obstruction {:?}", r),
        }
    }

    #[test]
    fn resolvent_identity(m in modes(1), lambda in 1.01f64..10.0) {
        let b = trig(1, &m);
        let s = resolvent_solve(&circle(), &b, lambda).unwrap();
        prop_assert!(s.residual < 1e-10);
        let Observable::Trig(avg) = average_operator(&RealFlow::Torus(circle()), &Observable::Trig(s.a.clone())).unwrap() else {
            unreachable!()
        };
        for x in [0.0, 0.13, 0.5, 0.77] {
            let lhs = avg.eval(&[x]) - lambda * s.a.eval(&[x]);
            prop_assert!((lhs - b.eval(&[x])).abs() < 1e-10);
        }
        prop_assert!((s.c.mean() - (1.0 - lambda) * s.a.mean()).abs() < 1e-12);
    }
}

#[test]
fn rational_directions_report_resonances() {
    let flow = TorusLinearFlow::new(vec![0.25, 0.5]).unwrap();
    let mut c = BTreeMap::new();
    c.insert(vec![4, 0], Complex64::new(1.0, 0.0));
    c.insert(vec![-4, 0], Complex64::new(1.0, 0.0));
    c.insert(vec![0, 1], Complex64::new(0.0, 0.5));
    c.insert(vec![0, -1], Complex64::new(0.0, -0.5));
    let btilde = TrigPolynomial::from_coefficients(2, c).unwrap();
    let EmbeddingOutcome::Obstructed(report) = solve_embedding(&flow, &btilde).unwrap() else {
        panic!("expected an obstruction");
    };
    assert_eq!(report.resonant.len(), 2);
}
