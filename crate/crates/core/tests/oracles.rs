//! Checks against independently computed reference values.

use mortar_fem::analysis::{error_norms, order, spatial_study, Experiment, TimeStep};
use mortar_fem::assembly::reduce_matrix;
use mortar_fem::linalg::{max_abs_diff, DenseMatrix};
use mortar_fem::solvers::{backward_euler_run, TimeStepper};
use mortar_fem::{EllipticOperator, ManufacturedSolution, MeshSpec, MortarRule, MortarSpace, Partition};

#[test]
fn zero_solution_error_is_norm_of_initial_value() {
    // ∫ (x - x³)² over [-1, 0] or [0, 1] is 8/105; three unit squares
    let e = Experiment::table1().unwrap();
    let sp = e.space(4).unwrap();
    let zero = vec![0.0; sp.dofs().n_full()];
    let u = &e.solution;
    let n = error_norms(&sp, &zero, &|x, y| (u.u(x, y, 0.0), u.grad(x, y, 0.0))).unwrap();
    let exact = (3.0f64).sqrt() * 8.0 / 105.0;
    assert!((n.l2 - exact).abs() < 1e-13 * exact, "{} vs {exact}", n.l2);
    assert!(n.broken_h1 >= n.l2 && n.broken_h1 >= n.h1_semi);
}

#[test]
fn broken_norm_on_one_subdomain_is_the_h1_norm() {
    let p = Partition::preset("unit-square").unwrap();
    let sp = MortarSpace::new(p, &[MeshSpec { nx: 3, ny: 4, degree: 2 }], &MortarRule::default()).unwrap();
    let op = EllipticOperator::new(sp.clone(), &[1.0.into()]).unwrap();
    let v: Vec<f64> = (0..op.dim()).map(|i| (0.7 * i as f64).cos()).collect();
    let n = error_norms(&sp, &sp.prolong(&v), &|_, _| (0.0, [0.0, 0.0])).unwrap();
    let l2 = op.inner(&v, &v);
    let semi = op.stiffness().bilinear(&v, &v);
    assert!((n.l2 * n.l2 - l2).abs() < 1e-12);
    assert!((n.broken_h1 * n.broken_h1 - (l2 + semi)).abs() < 1e-12 * (l2 + semi));
}

#[test]
fn negative_seminorm_matches_dense_operator() {
    let p = Partition::preset("unit-square-2x1").unwrap();
    let specs = [MeshSpec { nx: 1, ny: 1, degree: 2 }, MeshSpec { nx: 1, ny: 2, degree: 2 }];
    let sp = MortarSpace::new(p, &specs, &MortarRule::default()).unwrap();
    let (m, a) = sp.assemble(&[1.0.into(), 1.0.into()]).unwrap();
    let mc = reduce_matrix(&m, sp.prolongation()).unwrap().to_dense();
    let ac = reduce_matrix(&a, sp.prolongation()).unwrap().to_dense();
    let op = EllipticOperator::new(sp, &[1.0.into(), 1.0.into()]).unwrap();
    let n = op.dim();
    let dense_a: DenseMatrix = ac.solve_matrix(&mc).unwrap();
    let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * i as f64).collect();
    let av = dense_a.mul_vec(&v);
    let aav = dense_a.mul_vec(&av);
    let m_inner = |x: &[f64], y: &[f64]| -> f64 {
        let my = mc.mul_vec(y);
        x.iter().zip(&my).map(|(a, b)| a * b).sum()
    };
    let want = [m_inner(&v, &v).sqrt(), m_inner(&av, &v).sqrt(), m_inner(&aav, &v).sqrt()];
    for (s, w) in want.iter().enumerate() {
        let got = op.negative_seminorm(&v, s as u32).unwrap();
        assert!((got - w).abs() < 1e-11, "s={s}: {got} vs {w}");
    }
    assert!(want[1] > 0.0);
}

#[test]
fn elliptic_projection_reproduces_discrete_functions() {
    // x(1-x)y(1-y) has zero normal flux on x = 1/2
    let e = Experiment::patch().unwrap();
    let op = e.operator(3).unwrap();
    let u = &e.solution;
    let p = op.elliptic_projection(&|_, x, y| u.grad(x, y, 0.0), false).unwrap();
    let exact = op.space().interpolate(&|_, x, y| u.u(x, y, 0.0));
    assert!(max_abs_diff(&p, &exact) < 1e-10);
    let zero = op.elliptic_projection(&|_, _, _| [0.0, 0.0], true).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
}

#[test]
fn elliptic_projection_error_has_order_k_plus_one() {
    let e = Experiment::smooth(2).unwrap();
    let u = &e.solution;
    let errs: Vec<f64> = [8, 16]
        .iter()
        .map(|&n| {
            let op = e.operator(n).unwrap();
            let p = op.elliptic_projection(&|_, x, y| u.grad(x, y, 0.0), false).unwrap();
            let full = op.space().prolong(&p);
            error_norms(op.space(), &full, &|x, y| (u.u(x, y, 0.0), u.grad(x, y, 0.0))).unwrap().l2
        })
        .collect();
    let p = order(errs[0], errs[1], 1.0 / 8.0, 1.0 / 16.0);
    assert!((2.6..=3.3).contains(&p), "{p}");
}

#[test]
fn zero_data_stays_zero() {
    let e = Experiment::table1().unwrap();
    let op = e.operator(3).unwrap();
    let mut st = TimeStepper::new(op.mass(), op.stiffness(), 0.1, vec![0.0; op.dim()]).unwrap();
    let traj = backward_euler_run(&mut st, 5, &mut |_| Ok(vec![0.0; op.dim()])).unwrap();
    assert!(traj.iter().flatten().all(|&v| v == 0.0));
}

#[test]
fn table1_coarsest_error_is_near_reported_value() {
    let e = Experiment::table1().unwrap();
    let run = e.solve_transient(6, 1.0 / 36.0).unwrap();
    let err = e.norms(&run).unwrap().l2;
    assert!(err <= 3.0 * 0.026451 && err >= 0.026451 / 3.0, "{err}");
}

#[test]
fn functional_error_superconverges() {
    let e = Experiment::superconvergence(2).unwrap();
    let weight = |x: f64, y: f64| (x * y).exp() + x;
    let mut fe = Vec::new();
    let mut l2 = Vec::new();
    for n in [4, 8, 16] {
        let run = e.solve_transient(n, 0.1).unwrap();
        fe.push(e.functional_error(&run, &weight).unwrap().abs());
        l2.push(e.norms(&run).unwrap().l2);
    }
    let pf = order(fe[1], fe[2], 0.125, 0.0625);
    let pl = order(l2[1], l2[2], 0.125, 0.0625);
    assert!(pf > pl + 0.7, "functional {pf} vs L2 {pl}");
}

#[test]
fn projected_error_norm_is_bounded_by_l2_error() {
    let e = Experiment::superconvergence(2).unwrap();
    let rows = spatial_study(&e, &[4, 8], TimeStep::Fixed(0.25), Some(0)).unwrap();
    for r in rows {
        assert!(r.error_neg.unwrap() <= r.error_l2 * (1.0 + 1e-12));
    }
}

#[test]
fn negative_to_l2_ratio_is_stable_under_refinement() {
    let field = |_: usize, x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos() * x * (1.0 - x) * y * (1.0 - y);
    let ratios: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| {
            let op = Experiment::smooth(1).unwrap().operator(n).unwrap();
            let v = op.l2_project(&field).unwrap();
            op.negative_seminorm(&v, 1).unwrap() / op.negative_seminorm(&v, 0).unwrap()
        })
        .collect();
    for w in ratios.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.1, "{ratios:?}");
    }
}

#[test]
fn mortar_and_conforming_time_runs_coincide_on_matching_grids() {
    use mortar_fem::analysis::MeshLayout;
    use mortar_fem::conforming::ConformingSystem;
    let mut e = Experiment::table1().unwrap();
    e.layout = MeshLayout::Matching;
    e.consistency_flux = false;
    e.solution = ManufacturedSolution::benchmark(vec![1.0, 10.0, 10.0]);
    let r = 0.125;
    let run = e.solve_transient(4, r).unwrap();
    let meshes = run.operator.space().meshes();
    let conf = ConformingSystem::new(&e.partition, meshes, &e.solution.diffusivities()).unwrap();
    let u = &e.solution;
    // same initial data: nodal interpolant
    let u0 = conf.from_broken(&run.operator.space().nodal_values(&|_, x, y| u.u(x, y, 0.0)));
    let mut st = TimeStepper::new(conf.mass(), conf.stiffness(), r, u0).unwrap();
    let traj = backward_euler_run(&mut st, e.steps(r).unwrap(), &mut |t| {
        Ok(conf.load(meshes, &|s, x, y| u.source(s, x, y, t)).unwrap())
    })
    .unwrap();
    let diff = max_abs_diff(&conf.to_broken(traj.last().unwrap()), &run.full());
    assert!(diff <= 1e-10, "{diff}");
}
