//! Seeded randomized property suites over the quadratic-program solvers.
//!
//! Each property is checked on every generated instance and summarized by
//! its worst observed metric, so a run is fully described by its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::vector::{norm2, rel_diff};
use crate::qp::infsup::{estimate_infsup, InfSupForm};
use crate::qp::optimality::{check_optimality, recover_multiplier};
use crate::qp::problem::{objective, QpProblem};
use crate::qp::random::{random_problem, random_shape, random_spd, random_vector};
use crate::qp::solve::{solve, Method, SaddleSolution};

fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random programs per property.
    pub instances: usize,
    /// Largest primal dimension drawn.
    pub max_n: usize,
    /// Instances for the inf-sup comparison, which is the expensive one.
    pub infsup_instances: usize,
    /// Solver tolerance.
    pub tol: f64,
    /// Test hook: perturb every solver output before checking it.
    pub corrupt: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            instances: 100,
            max_n: 50,
            infsup_instances: 20,
            tol: 1e-10,
            corrupt: false,
        }
    }
}

/// Worst case of one property over the suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub checks: usize,
    pub worst: f64,
    pub threshold: f64,
    pub passed: bool,
}

struct Tracker {
    name: &'static str,
    checks: usize,
    worst: f64,
    threshold: f64,
    failed: bool,
}

impl Tracker {
    fn new(name: &'static str, threshold: f64) -> Self {
        Tracker {
            name,
            checks: 0,
            worst: f64::NEG_INFINITY,
            threshold,
            failed: false,
        }
    }

    fn record(&mut self, value: f64) {
        self.checks += 1;
        if value.is_nan() || value > self.threshold {
            self.failed = true;
        }
        if value.is_nan() || value > self.worst {
            self.worst = value;
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name.to_string(),
            checks: self.checks,
            worst: if self.checks == 0 { 0.0 } else { self.worst },
            threshold: self.threshold,
            passed: !self.failed && self.checks > 0,
        }
    }
}

fn solve_all(problem: &QpProblem, cfg: &SuiteConfig) -> Result<Vec<SaddleSolution>> {
    Method::ALL
        .iter()
        .map(|&m| {
            let mut s = solve(problem, m, cfg.tol)?;
            if cfg.corrupt {
                s.x[0] += 1e-3;
            }
            Ok(s)
        })
        .collect()
}

/// Runs every suite; the outcome order is fixed.
///
/// Properties:
/// * `minimizer_certificate`: each solver output is feasible and its gradient
///   vanishes on `Ker C` (absolute tolerance 1e-8).
/// * `feasible_competitors`: a random feasible point whose projected gradient
///   is nonzero never has a lower objective than the solver's point. The
///   metric is `J(x) - J(y)`, which must stay negative.
/// * `multiplier_relation`: `|Ax - b - C'lambda| / scale <= 1e-8`.
/// * `multiplier_uniqueness`: the multiplier recovered from `x` alone matches
///   each solver's multiplier to 1e-8 relative.
/// * `cross_method`: the three routes agree to 1e-7 relative.
/// * `homogeneity`: scaling `(b, d)` by `alpha` scales `(x, lambda)` by
///   `alpha` to 1e-8 relative.
/// * `infsup_two_form`: dual and primal inf-sup estimates agree to 1e-8.
pub fn run_property_suites(cfg: &SuiteConfig) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut certificate = Tracker::new("minimizer_certificate", 1e-8);
    let mut competitors = Tracker::new("feasible_competitors", 0.0);
    let mut relation = Tracker::new("multiplier_relation", 1e-8);
    let mut uniqueness = Tracker::new("multiplier_uniqueness", 1e-8);
    let mut cross = Tracker::new("cross_method", 1e-7);
    let mut homogeneity = Tracker::new("homogeneity", 1e-8);
    let mut two_form = Tracker::new("infsup_two_form", 1e-8);

    for k in 0..cfg.instances {
        let (n, m) = random_shape(&mut rng, cfg.max_n.max(2));
        let problem = random_problem(&mut rng, n, m, k % 2 == 1);
        let sols = solve_all(&problem, cfg)?;

        for s in &sols {
            let report = check_optimality(&problem, &s.x, 1e-8)?;
            certificate.record(report.projected_gradient_norm.max(report.feasibility_norm));
            let sc = problem.scale(&s.x).max(f64::MIN_POSITIVE);
            let stat = crate::qp::problem::gradient(&problem, &s.x)?;
            let mut r = stat;
            let ctl = problem.c().apply_transpose(&s.lambda)?;
            r.iter_mut().zip(&ctl).for_each(|(ri, ci)| *ri -= ci);
            relation.record(norm2(&r) / sc);
            // an uncorrupted solution must admit a multiplier; a rejected
            // point counts as a violation
            match recover_multiplier(&problem, &s.x, 1e-8) {
                Ok(l) => uniqueness.record(rel_diff(&l, &s.lambda)),
                Err(_) => uniqueness.record(f64::INFINITY),
            }
        }
        for s in &sols[1..] {
            cross.record(rel_diff(&s.x, &sols[0].x).max(rel_diff(&s.lambda, &sols[0].lambda)));
        }

        let f = problem.constraint_factorization()?;
        let x0 = f.min_norm_solution(problem.d())?;
        let jx = objective(&problem, &sols[0].x)?;
        for _ in 0..5 {
            let w = random_vector(&mut rng, n - m);
            let mut y = f.from_kernel_coordinates(&w);
            y.iter_mut().zip(&x0).for_each(|(yi, xi)| *yi += xi);
            let pg = check_optimality(&problem, &y, 0.0)?.projected_gradient_norm;
            if pg > 1e-6 {
                competitors.record(jx - objective(&problem, &y)?);
            }
        }

        let alpha = {
            let a: f64 = rng.random_range(0.5..3.0);
            if rng.random_bool(0.5) {
                -a
            } else {
                a
            }
        };
        let scaled_problem = QpProblem::new(
            problem.a().clone(),
            scaled(alpha, problem.b()),
            problem.c().clone(),
            scaled(alpha, problem.d()),
        )?;
        let method = Method::ALL[k % Method::ALL.len()];
        let mut s2 = solve(&scaled_problem, method, cfg.tol)?;
        if cfg.corrupt {
            s2.x[0] += 1e-3;
        }
        let base = &sols[k % Method::ALL.len()];
        homogeneity.record(
            rel_diff(&s2.x, &scaled(alpha, &base.x))
                .max(rel_diff(&s2.lambda, &scaled(alpha, &base.lambda))),
        );
    }

    for _ in 0..cfg.infsup_instances {
        let n = rng.random_range(2..=cfg.max_n.clamp(2, 30));
        let m = rng.random_range(1..n);
        let problem = random_problem(&mut rng, n, m, false);
        let mq = random_spd(&mut rng, m);
        let dual = estimate_infsup(problem.c(), problem.a(), &mq, InfSupForm::DualForm)?;
        let primal = estimate_infsup(problem.c(), problem.a(), &mq, InfSupForm::PrimalForm)?;
        two_form.record((dual.beta - primal.beta).abs());
    }

    Ok(vec![
        certificate.finish(),
        competitors.finish(),
        relation.finish(),
        uniqueness.finish(),
        cross.finish(),
        homogeneity.finish(),
        two_form.finish(),
    ])
}
