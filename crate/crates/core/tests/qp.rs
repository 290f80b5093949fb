use lagrange_core::linalg::vector::{dot, norm2, rel_diff};
use lagrange_core::linalg::{orthonormal_nullspace_basis, SparseOperator, Symmetry};
use lagrange_core::qp::io::{load_problem_dir, write_problem_dir};
use lagrange_core::qp::random::{
    random_matrix, random_problem, random_shape, random_spd, random_vector,
};
use lagrange_core::qp::{
    assemble_kkt, check_optimality, estimate_infsup, gradient, objective, recover_multiplier,
    solve, solve_kkt_direct, solve_nullspace, InfSupForm, Method, QpProblem,
};
use lagrange_core::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_na(op: &SparseOperator) -> DMatrix<f64> {
    DMatrix::from_row_slice(op.nrows(), op.ncols(), &op.to_dense())
}

fn hand_instance() -> QpProblem {
    let c = SparseOperator::from_rows(&[vec![1.0, 0.0]], Symmetry::General).unwrap();
    QpProblem::homogeneous(SparseOperator::identity(2), vec![1.0, 1.0], c).unwrap()
}

/// Dense LU on the KKT block, with `lambda` sign-flipped to the
/// `Ax - b = C' lambda` convention.
fn kkt_oracle(p: &QpProblem) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (p.n(), p.m());
    let mut k = DMatrix::<f64>::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(&to_na(p.a()));
    let c = to_na(p.c());
    k.view_mut((n, 0), (m, n)).copy_from(&c);
    k.view_mut((0, n), (n, m)).copy_from(&c.transpose());
    let mut rhs = DVector::<f64>::zeros(n + m);
    rhs.rows_mut(0, n).copy_from_slice(p.b());
    rhs.rows_mut(n, m).copy_from_slice(p.d());
    let sol = k.lu().solve(&rhs).unwrap();
    let x = sol.rows(0, n).iter().copied().collect();
    let lambda = sol.rows(n, m).iter().map(|v| -v).collect();
    (x, lambda)
}

#[test]
fn hand_instance_is_exact_for_every_method() {
    let p = hand_instance();
    for m in Method::ALL {
        let s = solve(&p, m, 1e-12).unwrap();
        assert!(
            (s.x[0] - 0.0).abs() <= 1e-12 && (s.x[1] - 1.0).abs() <= 1e-12,
            "{m}"
        );
        assert!((s.lambda[0] + 1.0).abs() <= 1e-12, "{m}");
        assert_eq!(s.method, m);
    }
}

#[test]
fn kkt_block_layout() {
    let k = assemble_kkt(&hand_instance());
    assert!(k.is_symmetric());
    assert_eq!(
        k.to_dense(),
        vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]
    );
}

#[test]
fn methods_agree_on_100_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..100 {
        let (n, m) = random_shape(&mut rng, 50);
        let p = random_problem(&mut rng, n, m, k % 2 == 0);
        let sols: Vec<_> = Method::ALL
            .iter()
            .map(|&m| solve(&p, m, 1e-10).unwrap())
            .collect();
        for s in &sols[1..] {
            assert!(
                rel_diff(&s.x, &sols[0].x) <= 1e-7,
                "instance {k} {}",
                s.method
            );
            assert!(
                rel_diff(&s.lambda, &sols[0].lambda) <= 1e-7,
                "instance {k} {}",
                s.method
            );
        }
    }
}

#[test]
fn direct_and_nullspace_match_dense_oracle_n30_m8() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..5 {
        let p = random_problem(&mut rng, 30, 8, true);
        let (x, lambda) = kkt_oracle(&p);
        for s in [
            solve_kkt_direct(&p, 1e-12).unwrap(),
            solve_nullspace(&p, 1e-12).unwrap(),
        ] {
            assert!(rel_diff(&s.x, &x) <= 1e-8, "{}", s.method);
            assert!(rel_diff(&s.lambda, &lambda) <= 1e-8, "{}", s.method);
        }
    }
}

#[test]
fn minimizer_gradient_annihilates_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let (n, m) = random_shape(&mut rng, 20);
        let p = random_problem(&mut rng, n, m, true);
        let s = solve(&p, Method::Direct, 1e-12).unwrap();
        let g = gradient(&p, &s.x).unwrap();
        for z in orthonormal_nullspace_basis(p.c()).unwrap() {
            assert!(dot(&g, &z).abs() <= 1e-9 * p.scale(&s.x));
        }
        assert!(check_optimality(&p, &s.x, 1e-9).unwrap().is_minimizer);
    }
}

#[test]
fn non_annihilating_gradient_gives_feasible_descent() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let n = rng.random_range(3..20);
        let m = rng.random_range(1..n);
        let p = random_problem(&mut rng, n, m, true);
        let s = solve(&p, Method::Nullspace, 1e-12).unwrap();
        let z = orthonormal_nullspace_basis(p.c()).unwrap();
        // feasible competitor y = x + kernel step
        let mut y = s.x.clone();
        for zi in &z {
            let w: f64 = rng.random_range(-1.0..1.0);
            y.iter_mut().zip(zi).for_each(|(yi, zij)| *yi += w * zij);
        }
        let rep = check_optimality(&p, &y, 1e-10).unwrap();
        assert!(rep.feasibility_norm <= 1e-10 * p.scale(&y));
        assert!(!rep.is_minimizer);
        // the projected negative gradient is a feasible descent direction
        let g = gradient(&p, &y).unwrap();
        let mut dir = vec![0.0; n];
        for zi in &z {
            let c = dot(&g, zi);
            dir.iter_mut().zip(zi).for_each(|(di, zij)| *di -= c * zij);
        }
        let t = 1e-3 / p.a().frobenius_norm();
        let step: Vec<f64> = y.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
        assert!(objective(&p, &step).unwrap() < objective(&p, &y).unwrap());
        assert!(objective(&p, &s.x).unwrap() < objective(&p, &y).unwrap());
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let p = random_problem(&mut rng, 8, 3, true);
    let x = random_vector(&mut rng, 8);
    let g = gradient(&p, &x).unwrap();
    let h = 1e-6;
    for i in 0..8 {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (objective(&p, &xp).unwrap() - objective(&p, &xm).unwrap()) / (2.0 * h);
        assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()));
    }
}

#[test]
fn recovered_multiplier_is_the_solver_multiplier() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..30 {
        let (n, m) = random_shape(&mut rng, 30);
        let p = random_problem(&mut rng, n, m, true);
        for method in Method::ALL {
            let s = solve(&p, method, 1e-11).unwrap();
            let l = recover_multiplier(&p, &s.x, 1e-8).unwrap();
            assert!(rel_diff(&l, &s.lambda) <= 1e-8);
        }
    }
}

#[test]
fn projection_constraint_has_unit_infsup() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, k) in [(6, 2), (10, 4), (12, 11)] {
        // orthonormal rows U' from the QR of a random n x k matrix
        let g = DMatrix::from_row_slice(n, k, &random_vector(&mut rng, n * k));
        let q = g.qr().q();
        let c = SparseOperator::from_dense(k, n, &q.transpose().to_row_major(), Symmetry::General)
            .unwrap();
        for form in [InfSupForm::DualForm, InfSupForm::PrimalForm] {
            let est = estimate_infsup(
                &c,
                &SparseOperator::identity(n),
                &SparseOperator::identity(k),
                form,
            )
            .unwrap();
            assert!((est.beta - 1.0).abs() <= 1e-12, "{form}: {}", est.beta);
        }
    }
}

trait RowMajor {
    fn to_row_major(&self) -> Vec<f64>;
}

impl RowMajor for DMatrix<f64> {
    fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                out.push(self[(i, j)]);
            }
        }
        out
    }
}

#[test]
fn unit_row_constraint_has_unit_infsup() {
    let p = hand_instance();
    let est = estimate_infsup(
        p.c(),
        p.a(),
        &SparseOperator::identity(1),
        InfSupForm::DualForm,
    )
    .unwrap();
    assert!((est.beta - 1.0).abs() <= 1e-14);
}

#[test]
fn two_forms_agree_with_each_other_and_a_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..20 {
        let n = rng.random_range(2..25);
        let m = rng.random_range(1..n);
        let a = random_spd(&mut rng, n);
        let c = random_matrix(&mut rng, m, n);
        let mq = random_spd(&mut rng, m);
        let dual = estimate_infsup(&c, &a, &mq, InfSupForm::DualForm).unwrap();
        let primal = estimate_infsup(&c, &a, &mq, InfSupForm::PrimalForm).unwrap();
        assert!((dual.beta - primal.beta).abs() <= 1e-8);
        let cn = to_na(&c);
        let s = &cn * to_na(&a).try_inverse().unwrap() * cn.transpose();
        let linv = to_na(&mq).cholesky().unwrap().l().try_inverse().unwrap();
        let oracle = (&linv * s * linv.transpose())
            .symmetric_eigen()
            .eigenvalues
            .min();
        assert!((dual.eigenvalue - oracle).abs() <= 1e-8 * oracle.abs().max(1.0));
        assert!((dual.beta - dual.eigenvalue.sqrt()).abs() <= 1e-15);
        // attaining multiplier is Mq-normalized
        let mqq = mq.apply(&dual.attaining_q).unwrap();
        assert!((dot(&dual.attaining_q, &mqq) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn invalid_problems_are_rejected() {
    let a = SparseOperator::identity(3);
    let dependent =
        SparseOperator::from_dense(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0], Symmetry::General)
            .unwrap();
    assert!(matches!(
        QpProblem::homogeneous(a.clone(), vec![0.0; 3], dependent),
        Err(Error::RankDeficient { .. })
    ));
    let square = SparseOperator::identity(3);
    assert!(QpProblem::homogeneous(a.clone(), vec![0.0; 3], square).is_err());
    let c = SparseOperator::from_rows(&[vec![1.0, 0.0, 0.0]], Symmetry::General).unwrap();
    assert!(matches!(
        QpProblem::homogeneous(a.clone(), vec![0.0; 2], c.clone()),
        Err(Error::DimensionMismatch { .. })
    ));
    let skew = SparseOperator::from_dense(2, 2, &[1.0, 2.0, 0.0, 1.0], Symmetry::General).unwrap();
    let c2 = SparseOperator::from_rows(&[vec![1.0, 0.0]], Symmetry::General).unwrap();
    assert!(QpProblem::homogeneous(skew, vec![0.0; 2], c2).is_err());
}

#[test]
fn problem_directory_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let p = random_problem(&mut rng, 7, 3, true);
    let dir = tempfile::tempdir().unwrap();
    write_problem_dir(dir.path(), &p).unwrap();
    let q = load_problem_dir(dir.path()).unwrap();
    assert_eq!(q.a().to_dense(), p.a().to_dense());
    assert_eq!(q.c().to_dense(), p.c().to_dense());
    assert_eq!(q.b(), p.b());
    assert_eq!(q.d(), p.d());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solution_is_homogeneous_in_the_data(seed in any::<u64>(), alpha in -4.0f64..4.0) {
        prop_assume!(alpha.abs() > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = random_shape(&mut rng, 15);
        let p = random_problem(&mut rng, n, m, true);
        let q = QpProblem::new(
            p.a().clone(),
            p.b().iter().map(|v| alpha * v).collect(),
            p.c().clone(),
            p.d().iter().map(|v| alpha * v).collect(),
        ).unwrap();
        let s = solve(&p, Method::Direct, 1e-12).unwrap();
        let t = solve(&q, Method::Direct, 1e-12).unwrap();
        let sx: Vec<f64> = s.x.iter().map(|v| alpha * v).collect();
        let sl: Vec<f64> = s.lambda.iter().map(|v| alpha * v).collect();
        prop_assert!(rel_diff(&t.x, &sx) <= 1e-8);
        prop_assert!(rel_diff(&t.lambda, &sl) <= 1e-8);
    }

    #[test]
    fn multiplier_relation_holds(seed in any::<u64>(), method in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = random_shape(&mut rng, 20);
        let p = random_problem(&mut rng, n, m, true);
        let s = solve(&p, Method::ALL[method], 1e-11).unwrap();
        let g = gradient(&p, &s.x).unwrap();
        let ctl = p.c().apply_transpose(&s.lambda).unwrap();
        let r: Vec<f64> = g.iter().zip(&ctl).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&r) <= 1e-8 * p.scale(&s.x));
    }
}
