use proptest::prelude::*;

use reprolab::costs::{helper_g, CostFunction};
use reprolab::scenarios::{build_instance, params};
use reprolab::solvers::{average_iterates, AveragingScheme};
use reprolab::{project_ball, Vector};

fn vec_of(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, dim)
}

fn v(x: &[f64]) -> Vector {
    Vector::new(x.to_vec()).unwrap()
}

fn cost(id: &str) -> CostFunction {
    let p = match id {
        "smooth_sto_lb" | "nonsmooth_sto_lb" => params([("T", 4.0), ("epsilon", 0.1), ("delta", 0.5)]),
        "smooth_sc_det_lb" | "nonsmooth_sc_sto_lb" => params([("T", 4.0), ("mu", 0.5), ("delta", 0.5)]),
        _ => params([("T", 4.0), ("delta", 0.5)]),
    };
    build_instance(id, &p).unwrap().cost()
}

fn scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

proptest! {
    #[test]
    fn projection_is_idempotent_and_non_expansive(a in vec_of(5), b in vec_of(5), d in 0.1..4.0f64) {
        let (pa, pb) = (project_ball(&v(&a), d).unwrap(), project_ball(&v(&b), d).unwrap());
        prop_assert!(pa.norm() <= d * (1.0 + 1e-15));
        // a projected point may sit one ulp outside the ball
        prop_assert!(project_ball(&pa, d).unwrap().dist_sq(&pa).unwrap() <= (1e-15 * d).powi(2));
        let before = v(&a).dist_sq(&v(&b)).unwrap();
        prop_assert!(pa.dist_sq(&pb).unwrap() <= before * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn g_subgradient_inequality(p in vec_of(12), q in vec_of(12)) {
        let split = |w: &[f64]| (v(&w[..4]), v(&w[4..8]), v(&w[8..]));
        let (x, y, z) = split(&p);
        let (g0, sg) = helper_g(&x, &y, &z).unwrap();
        let (x1, y1, z1) = split(&q);
        let (g1, _) = helper_g(&x1, &y1, &z1).unwrap();
        let lin: f64 = [(&sg.x, &x, &x1), (&sg.y, &y, &y1), (&sg.z, &z, &z1)]
            .iter()
            .map(|(g, a, b)| g.iter().zip(a.iter().zip(b.iter())).map(|(g, (a, b))| g * (b - a)).sum::<f64>())
            .sum();
        prop_assert!(g0 >= 0.0);
        prop_assert!(g1 >= g0 + lin - 1e-9, "{} < {} + {}", g1, g0, lin);
    }

    #[test]
    fn catalog_costs_are_convex_along_their_subgradients(
        which in 0..4usize,
        seed in vec_of(32),
        dir in vec_of(32),
    ) {
        let id = ["smooth_sto_lb", "smooth_sc_det_lb", "nonsmooth_sto_lb", "nonsmooth_sc_sto_lb"][which];
        let f = cost(id);
        let n = f.dim();
        let (x, y) = (v(&seed[..n]), v(&dir[..n]));
        let g = f.subgrad(&x).unwrap();
        let lin: f64 = g.iter().zip(y.iter().zip(x.iter())).map(|(g, (b, a))| g * (b - a)).sum();
        let (fx, fy) = (f.eval(&x).unwrap(), f.eval(&y).unwrap());
        prop_assert!(fy >= fx + lin - 1e-9 * (1.0 + fx.abs()), "{}: {} < {} + {}", id, fy, fx, lin);
    }

    #[test]
    fn smooth_gradients_match_central_differences(which in 0..3usize, x in vec_of(8), u in vec_of(8)) {
        let id = ["smooth_sto_lb", "smooth_sc_det_lb", "quadratic"][which];
        let f = cost(id);
        let n = f.dim();
        let (x, u) = (&x[..n], &u[..n]);
        let h = 1e-5;
        let fd = (f.eval(&v(&scaled(x, h, u))).unwrap() - f.eval(&v(&scaled(x, -h, u))).unwrap()) / (2.0 * h);
        let g = f.subgrad(&v(x)).unwrap();
        let dg: f64 = g.iter().zip(u).map(|(a, b)| a * b).sum();
        prop_assert!((fd - dg).abs() <= 1e-5 * (1.0 + dg.abs()), "{}: {} vs {}", id, fd, dg);
    }

    #[test]
    fn averaging_weights_sum_to_one(horizon in 1..200usize, k in 1..20usize) {
        for avg in [
            AveragingScheme::Last,
            AveragingScheme::Uniform,
            AveragingScheme::ShiftedLinear { k },
            AveragingScheme::ScLinear,
            AveragingScheme::ScLinearDet,
        ] {
            let total: f64 = (0..=horizon).map(|s| avg.weight(s, horizon)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "{:?} {}", avg, total);
            prop_assert!((0..=horizon).all(|s| avg.weight(s, horizon) >= 0.0));
        }
    }

    #[test]
    fn averaging_a_constant_trajectory_returns_it(horizon in 1..50usize, c in vec_of(3)) {
        let pts = vec![v(&c); horizon + 1];
        for avg in [AveragingScheme::Uniform, AveragingScheme::ScLinear, AveragingScheme::ScLinearDet] {
            let n = if avg.includes_start() { horizon + 1 } else { horizon };
            let out = average_iterates(&pts[..n], &avg).unwrap();
            for (a, b) in out.iter().zip(&c) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
