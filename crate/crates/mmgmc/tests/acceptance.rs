//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! and enforcing its stated tolerance and runtime budget.

use std::time::Instant;

use mmgmc::nalgebra::{DMatrix, DVector};
use mmgmc::oracle::{self, GridSpec};
use mmgmc::{
    certify_objective_convexity, certify_surrogate_convexity, check_cauchy_property,
    check_trace_invariants, directional_derivative, evaluate_objective, huber_closed_form,
    lipschitz_bound, minimal_gamma, minimize_majorizer_in_ball, moreau_envelope, run_mm,
    BaseFunction, GammaMode, InnerConfig, MMConfig, ProblemInstance, SurrogateParams,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_vector(rng: &mut ChaCha8Rng, n: usize, span: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-span..span))
}

fn random_base(rng: &mut ChaCha8Rng, n: usize) -> BaseFunction {
    match rng.random_range(0..3) {
        0 => BaseFunction::L1,
        1 => BaseFunction::Zero,
        _ => {
            BaseFunction::scaled_l1(DVector::from_fn(n, |_, _| rng.random_range(0.0..1.0))).unwrap()
        }
    }
}

fn random_problem(rng: &mut ChaCha8Rng, max_n: usize) -> ProblemInstance {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(1..=max_n + 2);
    let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
    let y = random_vector(rng, m, 2.0);
    let lambda = if rng.random_range(0..10) == 0 {
        0.0
    } else {
        rng.random_range(0.05..2.0)
    };
    let alpha = rng.random_range(0.2..3.0);
    let base = random_base(rng, n);
    ProblemInstance::new(a, y, lambda, alpha, base).unwrap()
}

/// Full-rank square-ish design with the least-squares solution pushed away
/// from the origin, so initialization rules are easy to satisfy nearby.
fn well_posed_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    lambda: f64,
    alpha: f64,
    base: BaseFunction,
) -> (ProblemInstance, DVector<f64>) {
    let m = n + 1;
    let a = DMatrix::from_fn(m, n, |r, c| {
        let diag = if r == c { 1.6 } else { 0.0 };
        diag + rng.random_range(-0.25..0.25)
    });
    let mut target = random_vector(rng, n, 1.0);
    target *= 3.0 / target.norm();
    let y = &a * &target;
    let p = ProblemInstance::new(a, y, lambda, alpha, base).unwrap();
    (p, target)
}

#[test]
fn criterion_1_majorization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let p = random_problem(&mut rng, 10);
        let n = p.dim();
        let w = random_vector(&mut rng, n, 3.0);
        let x = random_vector(&mut rng, n, 3.0);
        let gamma = rng.random_range(0.0..3.0);
        let params = SurrogateParams::new(gamma, w.clone()).unwrap();

        let f_x = evaluate_objective(&p, &x).unwrap().total;
        let maj_x = mmgmc::majorizer_value(&p, &params, &x).unwrap();
        assert!(
            maj_x >= f_x - 1e-10,
            "majorization violated: {maj_x} < {f_x}"
        );

        let f_w = evaluate_objective(&p, &w).unwrap().total;
        let maj_w = mmgmc::majorizer_value(&p, &params, &w).unwrap();
        assert!(
            (maj_w - f_w).abs() <= 1e-12 * (1.0 + f_w.abs()),
            "tangency value violated: {maj_w} vs {f_w}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 1 (majorization, 1000 triples) in {elapsed:.2}s");
}

#[test]
fn criterion_2_tangency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for _ in 0..25 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=5);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.5..1.5));
        let y = random_vector(&mut rng, m, 1.5);
        let lambda = rng.random_range(0.05..1.5);
        let alpha = rng.random_range(0.2..2.5);
        let p = ProblemInstance::new(a, y, lambda, alpha, BaseFunction::L1).unwrap();
        let w = random_vector(&mut rng, n, 2.0);
        let gamma = rng.random_range(0.0..2.0);
        let params = SurrogateParams::new(gamma, w.clone()).unwrap();

        let mut directions = Vec::new();
        for i in 0..n {
            for sign in [1.0, -1.0] {
                let mut d = DVector::zeros(n);
                d[i] = sign;
                directions.push(d);
            }
        }
        for _ in 0..50 {
            let mut d = random_vector(&mut rng, n, 1.0);
            if d.norm() < 1e-9 {
                d[0] = 1.0;
            }
            d /= d.norm();
            directions.push(d);
        }

        for d in &directions {
            // Exact surrogate directional derivative at the anchor: smooth
            // gradient plus the one-sided l1 term.
            let l1_onesided: f64 = w
                .iter()
                .zip(d.iter())
                .map(|(&wi, &di): (&f64, &f64)| {
                    if wi == 0.0 {
                        di.abs()
                    } else {
                        wi.signum() * di
                    }
                })
                .sum();
            let dd_surrogate = mmgmc::majorizer_smooth_gradient(&p, &params, &w)
                .unwrap()
                .dot(d)
                + p.lambda() * l1_onesided;
            let dd_objective = directional_derivative(&p, &w, d).unwrap();
            assert!(
                (dd_surrogate - dd_objective).abs() < 2e-5,
                "exact tangency violated: {dd_surrogate} vs {dd_objective}"
            );

            // One-sided finite-difference cross-checks on both functions.
            let fd_surrogate = oracle::finite_difference_directional(
                |z| mmgmc::majorizer_value(&p, &params, z).unwrap(),
                &w,
                d,
                1e-7,
            );
            let fd_objective = oracle::finite_difference_directional(
                |z| evaluate_objective(&p, z).unwrap().total,
                &w,
                d,
                1e-7,
            );
            assert!((fd_surrogate - dd_objective).abs() < 2e-5);
            assert!((fd_objective - dd_objective).abs() < 2e-5);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 2 (tangency, 25 instances x (2N+50) directions) in {elapsed:.2}s");
}

#[test]
fn criterion_3_certificate_soundness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut certified_count = 0;
    let mut refused_count = 0;

    for _ in 0..200 {
        let n = rng.random_range(2..=5);
        let m = rng.random_range(2..=6);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.5..1.5));
        let lambda = rng.random_range(0.2..2.0);
        let sigma0 = certify_objective_convexity(&a, 1.0, 0.0)
            .unwrap()
            .min_eigenvalue;

        // Half the draws are pushed to each verdict.
        let (alpha, gamma) = if rng.random_range(0..2) == 0 {
            // Certified: gamma at least alpha/2 keeps the margin >= sigma0.
            let alpha = rng.random_range(0.2..3.0);
            (alpha, alpha / 2.0 + rng.random_range(0.0..1.0))
        } else {
            // Refused: gamma = 0 with alpha pushed decisively past sigma0.
            let gap = rng.random_range(0.1..1.0);
            ((sigma0 + gap) / lambda, 0.0)
        };

        let cert = certify_surrogate_convexity(&a, lambda, alpha, gamma).unwrap();
        let y = random_vector(&mut rng, m, 1.0);
        let p = ProblemInstance::new(a.clone(), y, lambda, alpha, BaseFunction::L1).unwrap();
        let w = random_vector(&mut rng, n, 1.0);
        let params = SurrogateParams::new(gamma, w).unwrap();

        if cert.verdict.is_certified() {
            certified_count += 1;
            for _ in 0..20 {
                let u = random_vector(&mut rng, n, 2.0);
                let v = random_vector(&mut rng, n, 2.0);
                let mid = (&u + &v) * 0.5;
                let lhs = mmgmc::majorizer_value(&p, &params, &mid).unwrap();
                let rhs = 0.5 * mmgmc::majorizer_value(&p, &params, &u).unwrap()
                    + 0.5 * mmgmc::majorizer_value(&p, &params, &v).unwrap();
                assert!(
                    lhs <= rhs + 1e-8,
                    "certified surrogate violated midpoint convexity by {}",
                    lhs - rhs
                );
            }
        } else {
            refused_count += 1;
            // A violating pair must exist along the minimal eigenvector,
            // found by sampling within 50 attempts.
            let (_, v_min) = mmgmc::linalg::gram_min_eigenpair(&a).unwrap();
            let max_component = v_min.iter().fold(0.0f64, |acc, &c| acc.max(c.abs()));
            let found = (0..50).any(|_| {
                let signs = DVector::from_fn(n, |_, _| {
                    if rng.random_range(0..2) == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                });
                let center = signs * (0.5 / alpha);
                let t = 0.49 * (0.5 / alpha) / max_component * rng.random_range(0.5..1.0);
                let u = &center + &v_min * t;
                let v = &center - &v_min * t;
                let mid = mmgmc::majorizer_value(&p, &params, &center).unwrap();
                let avg = 0.5 * mmgmc::majorizer_value(&p, &params, &u).unwrap()
                    + 0.5 * mmgmc::majorizer_value(&p, &params, &v).unwrap();
                mid > avg + 1e-8
            });
            assert!(found, "no witness found for margin {}", cert.margin);
        }
    }
    assert!(
        certified_count >= 50,
        "only {certified_count} certified draws"
    );
    assert!(refused_count >= 50, "only {refused_count} refused draws");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime budget exceeded: {elapsed:.2}s");
    println!(
        "[PASS] criterion 3 (certificate soundness, {certified_count} convex / {refused_count} refused) in {elapsed:.2}s"
    );
}

#[test]
fn criterion_4_huber_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..1000 {
        let alpha = rng.random_range(0.2..4.0);
        let n = rng.random_range(1..6);
        let x = random_vector(&mut rng, n, 3.0);
        let h = huber_closed_form(alpha, &x).unwrap();
        let e = moreau_envelope(&BaseFunction::L1, alpha, &x).unwrap();
        assert!((h - e).abs() <= 1e-12, "huber {h} vs envelope {e}");

        // 1-D grid oracle at resolution 1e-4, applied per coordinate.
        let mut grid_total = 0.0;
        for &xi in x.iter() {
            let span = 8.0;
            let points = (span / 1e-4) as usize + 1;
            let grid = GridSpec::new(
                DVector::from_row_slice(&[-4.0]),
                DVector::from_row_slice(&[4.0]),
                points,
            )
            .unwrap();
            let (_, val) = oracle::grid_minimize(
                |v| v[0].abs() + 0.5 * alpha * (v[0] - xi) * (v[0] - xi),
                &grid,
            )
            .unwrap();
            grid_total += val;
        }
        assert!(
            (grid_total - h).abs() < 1e-6,
            "grid {grid_total} vs huber {h}"
        );
        assert!((grid_total - e).abs() < 1e-6);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 5.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 4 (huber equivalence, 1000 points + grid oracle) in {elapsed:.2}s");
}

#[test]
fn criterion_5_inner_solver_vs_grid() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for trial in 0..20 {
        let a = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.2..1.2));
        let y = random_vector(&mut rng, 2, 1.0);
        let lambda = rng.random_range(0.2..1.0);
        let sigma0 = certify_objective_convexity(&a, 1.0, 0.0)
            .unwrap()
            .min_eigenvalue;
        // Nonconvex objective, certified surrogate via the minimal curvature.
        let alpha = (sigma0 + rng.random_range(0.2..0.8)) / lambda;
        let p = ProblemInstance::new(a.clone(), y, lambda, alpha, BaseFunction::L1).unwrap();
        let gamma = minimal_gamma(&a, lambda, alpha, 0.05).unwrap();
        assert!(certify_surrogate_convexity(&a, lambda, alpha, gamma)
            .unwrap()
            .verdict
            .is_certified());

        let w = random_vector(&mut rng, 2, 0.8);
        let params = SurrogateParams::new(gamma, w.clone()).unwrap();
        let radius = rng.random_range(0.2..0.9);
        let res = minimize_majorizer_in_ball(&p, &params, radius, &InnerConfig::default()).unwrap();

        let grid = GridSpec::new(
            DVector::from_row_slice(&[w[0] - radius, w[1] - radius]),
            DVector::from_row_slice(&[w[0] + radius, w[1] + radius]),
            201,
        )
        .unwrap();
        let (_, grid_min) = oracle::grid_minimize(
            |v| {
                if (v - &w).norm() <= radius {
                    mmgmc::majorizer_value(&p, &params, v).unwrap()
                } else {
                    f64::INFINITY
                }
            },
            &grid,
        )
        .unwrap();
        assert!(
            res.objective - grid_min <= 1e-4,
            "trial {trial}: solver {} vs grid {grid_min}",
            res.objective
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 5 (inner solver vs 201x201 grid, 20 instances) in {elapsed:.2}s");
}

#[test]
fn criterion_6_trace_invariants() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..20 {
        let n = rng.random_range(2..=20);
        let m = n + 2;
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let y = random_vector(&mut rng, m, 1.0);
        let lambda = rng.random_range(0.2..1.0);
        let alpha = rng.random_range(0.5..2.0);
        let p = ProblemInstance::new(a, y, lambda, alpha, BaseFunction::L1).unwrap();

        let epsilon = rng.random_range(0.2..1.0);
        let modulus = rng.random_range(0.02..0.2);
        let config = MMConfig::new(epsilon, GammaMode::Auto { a: modulus });
        let mut x0 = random_vector(&mut rng, n, 1.0);
        x0 *= (2.0 * epsilon * 1.25) / x0.norm();
        let (_, trace) = run_mm(&p, &config, &x0).unwrap();

        let report = check_trace_invariants(&trace, epsilon, x0.norm());
        assert!(report.all_passed(), "trial {trial}: {report:?}");
        let cauchy = check_cauchy_property(&trace, epsilon);
        assert!(
            cauchy.passed,
            "trial {trial}: cauchy fails at {:?}",
            cauchy.first_violation
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 6 (trace invariants, 20 instances N<=20) in {elapsed:.2}s");
}

#[test]
fn criterion_7_special_case_reductions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);

    // (a) lambda = 0: converge to the least-squares solution when it lies
    // within the travel budget.
    for trial in 0..10 {
        let n = rng.random_range(2..=5);
        let (p, _) = well_posed_instance(&mut rng, n, 0.0, 1.0, BaseFunction::L1);
        let ls = oracle::least_squares_solve(p.matrix(), p.rhs());

        let epsilon = 0.5;
        let mut dir = random_vector(&mut rng, n, 1.0);
        dir /= dir.norm();
        let x0 = &ls + dir * (0.45 * epsilon);
        assert!(x0.norm() > 2.0 * epsilon, "setup: ls norm {}", ls.norm());
        let config = MMConfig::new(epsilon, GammaMode::Manual(0.0));
        let (x_final, _) = run_mm(&p, &config, &x0).unwrap();
        assert!(
            (&x_final - &ls).norm() < 1e-4,
            "trial {trial}: distance {}",
            (&x_final - &ls).norm()
        );
    }

    // (b) base = zero: the objective is the lasso; the MM limit matches the
    // ISTA objective on strictly convex instances.
    for trial in 0..10 {
        let n = rng.random_range(2..=5);
        let lambda = 0.05;
        let alpha = 0.3;
        let (p, _) = well_posed_instance(&mut rng, n, lambda, alpha, BaseFunction::Zero);
        let cert = certify_objective_convexity(p.matrix(), lambda, alpha).unwrap();
        assert!(
            cert.verdict == mmgmc::CertificateVerdict::StrictlyConvex,
            "setup: {cert:?}"
        );

        let ista = oracle::ista_lasso(p.matrix(), p.rhs(), lambda, 1e-12, 500_000).unwrap();
        let epsilon = 0.5;
        let mut dir = random_vector(&mut rng, n, 1.0);
        dir /= dir.norm();
        let x0 = &ista + dir * (0.45 * epsilon);
        assert!(
            x0.norm() > 2.0 * epsilon,
            "setup: ista norm {}",
            ista.norm()
        );
        let config = MMConfig::new(epsilon, GammaMode::Auto { a: 0.01 });
        let (x_final, _) = run_mm(&p, &config, &x0).unwrap();

        let lasso_obj = |x: &DVector<f64>| {
            0.5 * (p.rhs() - p.matrix() * x).norm_squared()
                + lambda * x.iter().map(|v| v.abs()).sum::<f64>()
        };
        let gap = (lasso_obj(&x_final) - lasso_obj(&ista)).abs();
        assert!(gap < 1e-6, "trial {trial}: objective gap {gap}");
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 7 (lambda=0 and lasso reductions, 10+10 runs) in {elapsed:.2}s");
}

#[test]
fn criterion_8_stationarity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for trial in 0..8 {
        let n = rng.random_range(2..=5);
        let lambda = 0.05;
        let alpha = 0.5;
        let (p, _) = well_posed_instance(&mut rng, n, lambda, alpha, BaseFunction::L1);
        let cert = certify_objective_convexity(p.matrix(), lambda, alpha).unwrap();
        assert!(
            cert.verdict == mmgmc::CertificateVerdict::StrictlyConvex,
            "setup: {cert:?}"
        );

        // Test-side proximal-descent oracle for the unique minimizer: the
        // smooth part is the residual plus the (concave) envelope terms.
        let step_l = lipschitz_bound(p.matrix(), lambda, alpha, 0.0).unwrap();
        let mut anchor = oracle::least_squares_solve(p.matrix(), p.rhs());
        for _ in 0..50_000 {
            let grad = mmgmc::residual_gradient(&p, &anchor).unwrap()
                - mmgmc::moreau_gradient(p.base(), alpha, &anchor).unwrap() * lambda;
            let next = mmgmc::soft_threshold(&(&anchor - grad / step_l), lambda / step_l).unwrap();
            let change = (&next - &anchor).norm();
            anchor = next;
            if change < 1e-13 {
                break;
            }
        }
        assert!(anchor.norm() > 1.5, "setup: minimizer too close to origin");

        let epsilon = 0.5;
        let modulus = 0.01;
        let mut dir = random_vector(&mut rng, n, 1.0);
        dir /= dir.norm();
        let x0 = &anchor + dir * (0.45 * epsilon);
        assert!(x0.norm() > 2.0 * epsilon);
        let mut config = MMConfig::new(epsilon, GammaMode::Auto { a: modulus });
        config.stationarity_directions = 100;
        config.seed = 900 + trial;
        let (_, trace) = run_mm(&p, &config, &x0).unwrap();

        let gamma = minimal_gamma(p.matrix(), lambda, alpha, modulus).unwrap();
        let lip = lipschitz_bound(p.matrix(), lambda, alpha, gamma).unwrap();
        let bound = -(lip * config.radius_floor + 1e-6);
        let report = trace.stationarity.expect("trace carries stationarity");
        assert!(
            report.min_directional_derivative > bound,
            "trial {trial}: min dd {} vs bound {bound}",
            report.min_directional_derivative
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 8 (stationarity of strictly convex runs, 2N+100 directions) in {elapsed:.2}s");
}

#[test]
fn criterion_9_gamma_bound_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut failing = 0;
    while failing < 200 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=7);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-2.0..2.0));
        let lambda = rng.random_range(0.1..2.0);
        let alpha = rng.random_range(0.5..4.0);
        let modulus = rng.random_range(0.0..1.0);
        let cert = certify_objective_convexity(&a, lambda, alpha).unwrap();
        if cert.verdict.is_certified() {
            continue;
        }
        failing += 1;
        let sigma0 = cert.min_eigenvalue;
        let bound = modulus / lambda + (lambda * alpha - sigma0) / (2.0 * lambda);
        let gamma = minimal_gamma(&a, lambda, alpha, modulus).unwrap();
        assert!((gamma - bound).abs() <= 1e-12, "{gamma} vs {bound}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "runtime budget exceeded: {elapsed:.2}s");
    println!("[PASS] criterion 9 (gamma bound identity, 200 nonconvex instances) in {elapsed:.2}s");
}
