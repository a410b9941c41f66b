use reprolab::costs::{CostFunction, Objective, RegularityMeta};
use reprolab::lab::{measure_deviation, MeasureOptions};
use reprolab::oracles::{
    inexact_init, nonstochastic_gradient, stochastic_gradient, InitMode, NoiseSchedule, OracleSpec,
    Problem,
};
use reprolab::scenarios::{Instance, Params};
use reprolab::solvers::{run_foi, AveragingScheme, SolverConfig, StepSchedule};
use reprolab::{Error, RngState, Vector};

const T: usize = 4;

#[derive(Debug)]
struct Flat(usize);

impl Objective for Flat {
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, _: &[f64]) -> f64 {
        0.0
    }
    fn subgrad_into(&self, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

fn flat() -> CostFunction {
    CostFunction::new(Flat(T), RegularityMeta::default(), None, "flat")
}

fn noise(delta: f64) -> NoiseSchedule {
    NoiseSchedule::RademacherCoordinate {
        delta,
        offset: 0,
        end: T,
    }
}

fn pure_noise_instance() -> Instance {
    let solver = SolverConfig::new(
        StepSchedule::Constant { eta: 1.0 },
        AveragingScheme::Uniform,
        T,
    );
    Instance {
        scenario_id: "smooth_sto_lb".into(),
        problem: Problem::Single(flat()),
        oracle: OracleSpec::stochastic(noise(1.0)),
        solver,
        init: Vector::zeros(T),
        params: Params::new(),
    }
}

// With a flat cost the uniform average is -Σ_s r_s (T-s)/T e_s.
fn output_of(signs: u32) -> [f64; T] {
    std::array::from_fn(|s| {
        let r = if signs >> s & 1 == 1 { 1.0 } else { -1.0 };
        -r * (T - s) as f64 / T as f64
    })
}

#[test]
fn pure_noise_deviation_matches_enumeration() {
    let mut total = 0.0;
    for a in 0..1u32 << T {
        for b in 0..1u32 << T {
            let (x, y) = (output_of(a), output_of(b));
            total += x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>();
        }
    }
    let exact = total / f64::from(1u32 << (2 * T));
    assert_eq!(exact, 3.75);

    let inst = pure_noise_instance();
    let opts = MeasureOptions {
        trials: 4000,
        ..MeasureOptions::default()
    };
    let est = measure_deviation(&inst, &inst.solver, &opts, &RngState::new(11)).unwrap();
    assert!(
        (est.mean_sq_dev - exact).abs() < 5.0 * est.stderr,
        "{est:?}"
    );
    assert!(est.max_sq_dev <= 4.0 * 30.0 / 16.0 + 1e-12);
}

#[test]
fn pure_noise_outputs_lie_on_the_enumerated_grid() {
    let inst = pure_noise_instance();
    for i in 0..16 {
        let r = run_foi(
            &inst.problem,
            &inst.oracle,
            &inst.init,
            &inst.solver,
            &RngState::new(3).derive("run", i),
        )
        .unwrap();
        assert_eq!(r.oracle_calls, T as u64);
        let hit = (0..1u32 << T).any(|s| output_of(s).as_slice() == r.output.as_slice());
        assert!(hit, "{:?}", r.output);
    }
}

#[test]
fn stochastic_gradient_is_reproducible_and_bounded() {
    let x = Vector::zeros(T);
    let rng = RngState::new(5).derive("query", 0);
    let a = stochastic_gradient(&flat(), &x, 2, &rng, &noise(0.5)).unwrap();
    let b = stochastic_gradient(&flat(), &x, 2, &rng, &noise(0.5)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a[2].abs(), 0.5);
    assert_eq!(a.norm(), 0.5);
}

#[test]
fn schedule_model_mismatch_is_rejected() {
    let x = Vector::zeros(T);
    let err = nonstochastic_gradient(&flat(), &x, 0, &noise(1.0), &[]).unwrap_err();
    assert!(matches!(err, Error::Incompatible(_)), "{err}");
}

#[test]
fn exhausted_schedule_errors() {
    let x = Vector::zeros(T);
    let err = stochastic_gradient(&flat(), &x, T, &RngState::new(0), &noise(1.0)).unwrap_err();
    assert!(matches!(err, Error::ScheduleExhausted { .. }), "{err}");
}

#[test]
fn inexact_init_stays_within_delta() {
    let x_ref = Vector::new(vec![1.0, -2.0, 0.5, 0.0]).unwrap();
    for i in 0..32 {
        let x = inexact_init(
            &x_ref,
            InitMode::SphereUniform,
            0.3,
            &RngState::new(1).derive("init", i),
        )
        .unwrap();
        assert!((x.dist_sq(&x_ref).unwrap().sqrt() - 0.3).abs() < 1e-12);
    }
    let fixed = inexact_init(&x_ref, InitMode::FixedCoordinate, 0.3, &RngState::new(0)).unwrap();
    assert_eq!(fixed.as_slice(), &[1.3, -2.0, 0.5, 0.0]);
    assert_eq!(
        inexact_init(&x_ref, InitMode::SphereUniform, 0.0, &RngState::new(0)).unwrap(),
        x_ref
    );
}
