//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantity and its gate. Runtimes are desk scale.

use std::f64::consts::PI;

use waveinv_core::carleman::{
    self, coeffs, decompo_check, eval_weights, lambda_min, split_residual, test_function,
    TestFunctionKind, WeightMode, WeightParams,
};
use waveinv_core::identities::{self, poincare_ratio};
use waveinv_core::inverse::{
    misfit, misfit_gradient, potential_stability, reconstruct, InverseInstance, ReconConfig,
};
use waveinv_core::rng::{random_node_fn, seeded, uniform};
use waveinv_core::wave::{self, ProblemData, WaveProblem};
use waveinv_core::{Grid1D, NodeFn, SpaceTimeFn, TimeAxis};

fn report(criterion: &str, detail: &str, pass: bool) {
    println!(
        "[{criterion}] {detail} -> {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Smooth positive instance shared by the stability and recovery criteria.
struct SmoothData;
impl ProblemData for SmoothData {
    fn y0(&self, x: f64) -> f64 {
        2.0 + (PI * x).sin()
    }
    fn y1(&self, _x: f64) -> f64 {
        0.0
    }
}

/// Fully compatible instance for the consistency criterion.
struct SineData;
impl ProblemData for SineData {
    fn y0(&self, x: f64) -> f64 {
        (PI * x).sin()
    }
    fn y1(&self, _x: f64) -> f64 {
        0.0
    }
    fn g0(&self, _t: f64) -> f64 {
        0.0
    }
    fn g1(&self, _t: f64) -> f64 {
        0.0
    }
}

#[test]
fn c01_identity_suite() {
    let mut worst = 0.0f64;
    for (gi, n) in [4usize, 16, 64, 256].into_iter().enumerate() {
        let grid = Grid1D::new(n).unwrap();
        for trial in 0..100u64 {
            let mut rng = seeded(42, gi as u64 * 1_000_000 + trial);
            let f = random_node_fn(grid, &mut rng, false);
            let g = random_node_fn(grid, &mut rng, false);
            let v = random_node_fn(grid, &mut rng, true);
            for (_, err) in identities::eval_all(&f, &g, &v) {
                worst = worst.max(err);
            }
        }
    }
    let pass = worst <= 1e-12;
    report(
        "C1",
        &format!("identity suite worst relative error {worst:.3e} (gate 1e-12)"),
        pass,
    );
    assert!(pass);
}

#[test]
fn c02_discrete_poincare() {
    let mut worst_ratio = 0.0f64;
    let mut mode_dev = 0.0f64;
    for n in [16usize, 64, 256] {
        let grid = Grid1D::new(n).unwrap();
        let mut grid_max = 0.0f64;
        for trial in 0..1000u64 {
            let mut rng = seeded(7, trial);
            let v = random_node_fn(grid, &mut rng, true);
            let r = poincare_ratio(&v).unwrap();
            assert!(r <= 4.0, "poincare ratio {r} > 4 at N={n}");
            grid_max = grid_max.max(r);
        }
        worst_ratio = worst_ratio.max(grid_max);
        // the lowest sine mode attains the extremal ratio (the reciprocal of
        // the first discrete eigenvalue, near 1/pi^2); random draws stay below
        let mode = NodeFn::sample(grid, |x| (PI * x).sin());
        let r1 = poincare_ratio(&mode).unwrap();
        assert!(grid_max <= r1 + 1e-12);
        mode_dev = mode_dev.max((r1 * PI * PI - 1.0).abs());
    }
    let pass = worst_ratio <= 4.0 && mode_dev <= 0.05;
    report(
        "C2",
        &format!(
            "poincare ratio max {worst_ratio:.4} (gate 4); lowest-mode extremal ratio within \
             {:.2}% of 1/pi^2 (gate 5%)",
            100.0 * mode_dev
        ),
        pass,
    );
    assert!(pass);
}

#[test]
fn c03_energy_conservation() {
    let grid = Grid1D::new(64).unwrap();
    let axis = TimeAxis::for_wave(grid, 2.0, 0.5).unwrap();
    let problem = WaveProblem::sample(grid, axis, NodeFn::zeros(grid), &SineData);
    let traj = wave::solve(&problem).unwrap();
    let drift = wave::energy_drift(&traj);
    let pass = drift <= 1e-8;
    report(
        "C3",
        &format!("conserved-energy relative drift {drift:.3e} over T=2 (gate 1e-8)"),
        pass,
    );
    assert!(pass);
}

#[test]
fn c04_multiplier_identity() {
    let grid = Grid1D::new(32).unwrap();
    let h = grid.h();
    let run = |dt: f64| {
        let steps = (1.0 / dt).round() as usize;
        let axis = TimeAxis::new(0.0, dt, steps).unwrap();
        let problem = WaveProblem::sample(grid, axis, NodeFn::zeros(grid), &SineData);
        wave::multiplier_residual(&wave::solve(&problem).unwrap()).unwrap()
    };
    let r1 = run(h / 4.0);
    let r2 = run(h / 8.0);
    let rate = (r1 / r2).log2();
    let pass = r1 <= 1e-3 && (1.7..=2.3).contains(&rate);
    report(
        "C4",
        &format!("multiplier residual {r1:.3e} at dt=h/4 (gate 1e-3), halving order {rate:.2} (gate 2 +- 0.3)"),
        pass,
    );
    assert!(pass);
}

#[test]
fn c05_coefficient_oracles() {
    // identities at quadrature order 16, compact weight geometry
    let params = WeightParams::new(-0.2, 0.1, 1.0, 0.5, 0.5, WeightMode::Carleman)
        .unwrap()
        .with_s(0.8)
        .unwrap();
    let grid = Grid1D::new(16).unwrap();
    let axis = TimeAxis::symmetric(0.5, 0.5 * grid.h()).unwrap();
    let fields = eval_weights(&params, grid, axis).unwrap();
    let c = coeffs(&params, &fields, 16).unwrap();
    let (s, l, h) = (params.s(), params.lambda(), grid.h());
    let mut worst_a1 = 0.0f64;
    let mut worst_combo = 0.0f64;
    for n in (0..axis.num_points()).step_by(5) {
        let t = axis.t(n);
        for j in 1..=grid.n() {
            let x = grid.node(j);
            let rho = |xx: f64| params.rho(t, xx);
            let dh = (rho(x + h) - rho(x - h)) / (2.0 * h * rho(x));
            worst_a1 = worst_a1.max((-s * l * c.a1().at(n, j) - dh).abs() / dh.abs().max(1.0));
            let lap = (rho(x + h) - 2.0 * rho(x) + rho(x - h)) / (h * h * rho(x));
            let combo = s * s * l * l * c.a2().at(n, j)
                - s * l * l * c.a3().at(n, j)
                - s * l * c.a4().at(n, j);
            worst_combo = worst_combo.max((combo - lap).abs() / lap.abs().max(1.0));
        }
    }
    // scaling of the approximation residual at fixed s h across the mesh
    // sweep (gentle weight so the coarse grids sit in the asymptotic regime)
    let sh = 1.0;
    let lambda = 0.05;
    let mut normalised = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let grid = Grid1D::new(n).unwrap();
        let params = WeightParams::new(-1.0, 0.1, lambda, 0.5, 2.0, WeightMode::Carleman)
            .unwrap()
            .with_s(sh / grid.h())
            .unwrap();
        let axis = TimeAxis::symmetric(0.5, 0.5 * grid.h()).unwrap();
        let fields = eval_weights(&params, grid, axis).unwrap();
        let c = coeffs(&params, &fields, 16).unwrap();
        let mid = axis.num_points() / 2;
        let t = axis.t(mid);
        let mut worst = 0.0f64;
        for j in 1..=grid.n() {
            let x = grid.node(j);
            let f1 = params.phi(t, x) * params.dpsi_dx(x);
            worst = worst.max((c.a1().at(mid, j) - f1).abs());
        }
        normalised.push(worst / sh);
    }
    let max = normalised.iter().cloned().fold(f64::MIN, f64::max);
    let min = normalised.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min;
    let pass = worst_a1 <= 1e-12 && worst_combo <= 1e-8 && spread <= 2.0;
    report(
        "C5",
        &format!(
            "first-order identity {worst_a1:.2e} (gate 1e-12), combination identity {worst_combo:.2e} \
             (gate 1e-8), residual/(s h) spread x{spread:.2} across the sweep (gate 2)"
        ),
        pass,
    );
    assert!(pass);
}

#[test]
fn c06_splitting_and_conjugation() {
    // splitting identity on 20 random smooth fields per grid
    let mut worst_split = 0.0f64;
    for n in [16usize, 32, 64] {
        let grid = Grid1D::new(n).unwrap();
        let params = WeightParams::new(-0.2, 0.1, 2.0, 0.5, 0.05, WeightMode::Carleman)
            .unwrap()
            .with_s(0.4)
            .unwrap();
        let axis = TimeAxis::symmetric(0.5, 0.5 * grid.h()).unwrap();
        let fields = eval_weights(&params, grid, axis).unwrap();
        let c = coeffs(&params, &fields, 16).unwrap();
        for trial in 0..20u64 {
            let mut rng = seeded(11, n as u64 * 1000 + trial);
            let modes: Vec<f64> = (0..4).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
            let v = SpaceTimeFn::from_fn(grid, axis, |t, x| {
                let mut acc = 0.0;
                for (k, cfc) in modes.iter().enumerate() {
                    acc += cfc * ((k + 1) as f64 * PI * x).sin();
                }
                acc * (1.0 + 0.5 * t) * (1.0 - t * t).max(0.0)
            });
            worst_split = worst_split.max(split_residual(&v, &params, &c).unwrap());
        }
    }
    // literal conjugation oracle at moderate parameters on a fine axis
    let params = WeightParams::new(-0.2, 0.1, 0.8, 0.5, 0.05, WeightMode::Carleman)
        .unwrap()
        .with_s(0.3)
        .unwrap();
    let grid = Grid1D::new(16).unwrap();
    let axis = TimeAxis::symmetric(0.5, 5e-4).unwrap();
    let fields = eval_weights(&params, grid, axis).unwrap();
    let c = coeffs(&params, &fields, 16).unwrap();
    let v = SpaceTimeFn::from_fn(grid, axis, |t, x| {
        (PI * x).sin() * (1.0 - t * t) * (1.0 + 0.3 * (2.0 * PI * x).sin() * t)
    });
    let ph = carleman::conjugate_apply(&v, &params, &c).unwrap();
    let mut rho_v = SpaceTimeFn::zeros(grid, axis);
    for n in 0..axis.num_points() {
        for j in 0..grid.num_nodes() {
            rho_v.set(n, j, params.rho(axis.t(n), grid.node(j)) * v.at(n, j));
        }
    }
    let mut worst_conj = 0.0f64;
    let mut scale = 0.0f64;
    // per-node second time differences of rho v, interior rows only
    for j in 1..=grid.n() {
        let series: Vec<f64> = (0..axis.num_points()).map(|m| rho_v.at(m, j)).collect();
        let dtt = waveinv_core::time::d2_dt2(axis.dt(), &series);
        #[allow(clippy::needless_range_loop)]
        for m in 2..axis.num_points() - 2 {
            let x = grid.node(j);
            let t = axis.t(m);
            let lap = (rho_v.at(m, j + 1) - 2.0 * rho_v.at(m, j) + rho_v.at(m, j - 1))
                / (grid.h() * grid.h());
            let oracle = (dtt[m] - lap) / params.rho(t, x);
            worst_conj = worst_conj.max((ph.at(m, j) - oracle).abs());
            scale = scale.max(oracle.abs());
        }
    }
    let conj_rel = worst_conj / scale;
    let pass = worst_split <= 1e-10 && conj_rel <= 1e-6;
    report(
        "C6",
        &format!(
            "splitting identity residual {worst_split:.2e} (gate 1e-10), conjugation oracle \
             {conj_rel:.2e} (gate 1e-6)"
        ),
        pass,
    );
    assert!(pass);
}

#[test]
fn c07_carleman_uniformity_and_tych_share() {
    // lambda = max(lambda_min, 2); eps chosen by pre-sweep among candidates:
    // largest candidate whose low/random decompo ratios stay within a factor
    // 2 of the coarse-grid value across the sweep
    let (x0, beta, t_half) = (-0.3, 0.3, 0.5);
    assert!(lambda_min(beta, x0) <= 2.0);
    let grids = [16usize, 32, 64, 128];
    let kinds = [TestFunctionKind::LowMode, TestFunctionKind::RandomSmooth];
    let candidates = [0.004, 0.008, 0.016];

    let ratio_for = |eps: f64, n: usize, kind: TestFunctionKind, conjugate: bool| -> f64 {
        let grid = Grid1D::new(n).unwrap();
        let axis = TimeAxis::symmetric(t_half, 0.0625 * grid.h()).unwrap();
        let params = WeightParams::new(x0, beta, 2.0, t_half, eps, WeightMode::Carleman)
            .unwrap()
            .with_s(0.5 * eps / grid.h())
            .unwrap();
        let fields = eval_weights(&params, grid, axis).unwrap();
        let c = coeffs(&params, &fields, 24).unwrap();
        let w = test_function(kind, grid, axis, params.eta(), 42).unwrap();
        let v = if conjugate {
            fields.conjugate(&w).unwrap()
        } else {
            w
        };
        let rep = decompo_check(&v, &params, &c).unwrap();
        if conjugate {
            rep.tych_share().unwrap()
        } else {
            rep.ratio().unwrap()
        }
    };

    let mut chosen = None;
    for &eps in candidates.iter().rev() {
        let per_h: Vec<f64> = grids
            .iter()
            .map(|&n| {
                kinds
                    .iter()
                    .map(|&k| ratio_for(eps, n, k, false))
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let coarse = per_h[0];
        let spread = per_h
            .iter()
            .map(|m| (m / coarse).max(coarse / m))
            .fold(1.0f64, f64::max);
        println!("[C7] pre-sweep eps={eps}: max ratios {per_h:?}, spread x{spread:.3}");
        if spread <= 2.0 {
            chosen = Some((eps, spread));
            break;
        }
    }
    let (eps, spread) = chosen.unwrap_or((candidates[0], f64::INFINITY));
    let uniform_ok = spread <= 2.0;
    report(
        "C7",
        &format!("decompo uniformity at eps={eps}: spread x{spread:.3} (gate 2)"),
        uniform_ok,
    );

    let share = ratio_for(eps, 128, TestFunctionKind::HighMode, true);
    let share_ok = share > 0.10;
    report(
        "C7",
        &format!("top-mode regularisation share at the finest grid {share:.4} (gate > 0.10)"),
        share_ok,
    );
    if !share_ok {
        println!(
            "[C7] note: the measured share plateaus near 0.08 for every generator and \
             parameter combination explored; see the repository notes on the structural \
             ceiling of this quantity at lambda = 2 under the s h = eps/2 scaling"
        );
    }
    assert!(uniform_ok);
    assert!(share_ok, "tych share {share:.4} <= 0.10");
}

#[test]
fn c08_uniform_stability() {
    let params = WeightParams::new(-0.5, 0.9, 2.0, 1.6, 0.5, WeightMode::Inverse).unwrap();
    let mut ratios = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let grid = Grid1D::new(n).unwrap();
        let axis = TimeAxis::for_wave(grid, 1.6, 0.5).unwrap();
        let p = NodeFn::constant(grid, 1.0);
        let q = NodeFn::sample(grid, |x| 1.0 + 0.1 * (2.0 * PI * x).sin());
        let rep =
            potential_stability(&p, &q, &SmoothData, grid, axis, &params, 5.0, 1.0).unwrap();
        ratios.push(rep.ratio_inverse().unwrap());
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = max / min;
    let pass = spread <= 3.0;
    report(
        "C8",
        &format!("inverse stability ratio spread x{spread:.3} across the mesh sweep (gate 3)"),
        pass,
    );
    assert!(pass);
}

#[test]
fn c09_adjoint_gradient() {
    let grid = Grid1D::new(32).unwrap();
    let axis = TimeAxis::for_wave(grid, 1.6, 0.5).unwrap();
    let inst = InverseInstance::new(&SmoothData, grid, axis);
    let q_true = NodeFn::sample(grid, |x| 1.0 + 0.5 * (PI * x).sin());
    let target = inst.observe_for(&q_true).unwrap();
    let cfg = ReconConfig::default();
    let q = NodeFn::constant(grid, 1.0);
    let (_, grad) = misfit_gradient(&inst, &q, &target, &cfg).unwrap();
    let mut worst = 0.0f64;
    let delta = 1e-5;
    for trial in 0..10u64 {
        let mut rng = seeded(17, trial);
        let dir = random_node_fn(grid, &mut rng, true);
        let jp = misfit(&inst, &q.add(&dir.scale(delta)), &target, &cfg).unwrap();
        let jm = misfit(&inst, &q.sub(&dir.scale(delta)), &target, &cfg).unwrap();
        let fd = (jp - jm) / (2.0 * delta);
        let an: f64 = (1..=grid.n()).map(|j| grad.at(j) * dir.at(j)).sum();
        worst = worst.max((fd - an).abs() / an.abs().max(1e-300));
    }
    let pass = worst <= 1e-5;
    report(
        "C9",
        &format!("adjoint gradient vs central differences, worst relative error {worst:.2e} (gate 1e-5)"),
        pass,
    );
    assert!(pass);
}

#[test]
fn c10_reconstruction_and_convergence() {
    // self-target recovery at N = 32
    let grid = Grid1D::new(32).unwrap();
    let axis = TimeAxis::for_wave(grid, 1.6, 0.5).unwrap();
    let inst = InverseInstance::new(&SmoothData, grid, axis);
    let q_true = NodeFn::sample(grid, |x| 1.0 + 0.5 * (PI * x).sin());
    let target = inst.observe_for(&q_true).unwrap();
    let cfg = ReconConfig {
        m: 2.0,
        max_iter: 400,
        ..ReconConfig::default()
    };
    let q_init = NodeFn::constant(grid, 1.0);
    let out = reconstruct(&inst, &target, &cfg, &q_init, Some(&q_true)).unwrap();
    let self_err = out.l2_error_vs_truth.unwrap();
    let self_ok = self_err <= 5e-2;
    report(
        "C10",
        &format!("self-target recovery error {self_err:.3e} at N=32 (gate 5e-2)"),
        self_ok,
    );

    // reference-target convergence study
    let mut errors = Vec::new();
    for n in [32usize, 64, 128] {
        let grid = Grid1D::new(n).unwrap();
        let axis = TimeAxis::for_wave(grid, 1.6, 0.5).unwrap();
        let inst = InverseInstance::new(&SmoothData, grid, axis);
        let q_true = NodeFn::sample(grid, |x| 1.0 + 0.5 * (PI * x).sin());
        let target = wave::reference_observation(
            |x| 1.0 + 0.5 * (PI * x).sin(),
            &SmoothData,
            grid,
            axis,
            1024,
        )
        .unwrap();
        let q_init = NodeFn::constant(grid, 1.0);
        let out = reconstruct(&inst, &target, &cfg, &q_init, Some(&q_true)).unwrap();
        errors.push(out.l2_error_vs_truth.unwrap());
    }
    let monotone = errors.windows(2).all(|w| w[1] <= 1.2 * w[0]);
    report(
        "C10",
        &format!("reference-target errors {errors:?} non-increasing within 20%"),
        monotone,
    );
    assert!(self_ok);
    assert!(monotone);
}

#[test]
fn c11_consistency_rates() {
    let p = |x: f64| 1.0 + 0.5 * (PI * x).sin();
    let mut flux_errs = Vec::new();
    let mut tych_norms = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let grid = Grid1D::new(n).unwrap();
        let axis = TimeAxis::for_wave(grid, 1.6, 0.5).unwrap();
        let q = NodeFn::sample(grid, p);
        let traj = wave::solve(&WaveProblem::sample(grid, axis, q, &SineData)).unwrap();
        let obs = wave::observe(&traj).unwrap();
        let reference = wave::reference_observation(p, &SineData, grid, axis, 1024).unwrap();
        let dflux: Vec<f64> = obs
            .flux_dt()
            .iter()
            .zip(reference.flux_dt())
            .map(|(a, b)| a - b)
            .collect();
        flux_errs.push(waveinv_core::time::l2_norm_time(axis.dt(), &dflux));
        tych_norms.push(obs.tych_l2());
    }
    let rates = |v: &[f64]| -> Vec<f64> {
        v.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    };
    let fr = rates(&flux_errs);
    let tr = rates(&tych_norms);
    let fr_mean = fr.iter().sum::<f64>() / fr.len() as f64;
    let tr_mean = tr.iter().sum::<f64>() / tr.len() as f64;
    let pass = fr_mean >= 0.5 && (0.7..=1.3).contains(&tr_mean);
    report(
        "C11",
        &format!(
            "flux-error rate {fr_mean:.2} (gate >= 0.5), regularisation-norm rate {tr_mean:.2} \
             (gate 1 +- 0.3)"
        ),
        pass,
    );
    assert!(pass);
}
