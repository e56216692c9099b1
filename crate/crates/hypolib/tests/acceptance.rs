//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p hypolib --test acceptance -- --nocapture` to see
//! the per-criterion lines and timings.

mod common;

use std::time::Instant;

use common::*;
use hypolib::approx::{
    cover_params, epispline_approx, hypo_approx_sequence, moreau_envelope, pa_fit,
    packing_family, quantize_to_cover, verify_packing_separation, FitOptions, PipelineSchedule,
    PipelineStage,
};
use hypolib::estimate::{
    argmin_excess_check, level_set_coverage, population_objective, rate_experiment, saa_solve,
    check_holder_pointwise, ExperimentConfig, FunctionClass, Objective, Sample, SolveOptions,
    TruthSpec,
};
use hypolib::metric::{aux_dist_rho, aw_dist, aw_dist_rho, check_sandwich, dist_origin_to_hypo};
use hypolib::pa::{AffinePiece, MaxAffine, PaDiff};
use hypolib::{BoxPartition, ExtReal, GridDomain, GridFn};
use rand::Rng;

fn verdict(num: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {num:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {num:02} {name}: {detail}");
}

/// The shared pool of random functions for criteria 1-3: triples on mixed
/// one- and two-dimensional grids, a tagged subset nonnegative.
fn metric_pool(seed: u64) -> Vec<(GridFn, GridFn, GridFn, bool)> {
    let mut r = rng(seed, "acceptance/metric");
    let mut out = Vec::with_capacity(200);
    for case in 0..200usize {
        let d = if case % 5 < 3 {
            random_domain_1d(&mut r, 21)
        } else if case % 40 == 4 {
            random_domain_2d(&mut r, 21)
        } else {
            random_domain_2d(&mut r, 9)
        };
        // the unit-distance bound needs nonnegative pairs finite everywhere
        let nonneg = case % 4 == 0;
        let p_neg_inf = if nonneg { 0.0 } else { 0.15 };
        let f = random_gridfn(&d, &mut r, nonneg, p_neg_inf);
        let g = random_gridfn(&d, &mut r, nonneg, p_neg_inf);
        let h = random_gridfn(&d, &mut r, nonneg, p_neg_inf);
        out.push((f, g, h, nonneg));
    }
    out
}

#[test]
fn criterion_01_metric_axioms() {
    let start = Instant::now();
    let tol = 1e-4;
    let pool = metric_pool(1);
    let mut r = rng(1, "acceptance/rho");
    for (f, g, h, _) in &pool {
        let rho = [0.5, 1.0, 2.0, 4.0][r.random_range(0..4)];
        let fg = aw_dist_rho(f, g, rho).unwrap();
        let gf = aw_dist_rho(g, f, rho).unwrap();
        let gh = aw_dist_rho(g, h, rho).unwrap();
        let fh = aw_dist_rho(f, h, rho).unwrap();
        assert_eq!(fg, gf, "dl_rho symmetry must be exact");
        assert!(fh <= fg + gh, "dl_rho triangle: {fh} > {fg} + {gh}");

        let dfg = aw_dist(f, g, tol).unwrap().value;
        let dgf = aw_dist(g, f, tol).unwrap().value;
        let dgh = aw_dist(g, h, tol).unwrap().value;
        let dfh = aw_dist(f, h, tol).unwrap().value;
        assert!((dfg - dgf).abs() <= 3.0 * tol, "dl symmetry: {dfg} vs {dgf}");
        assert!(dfh <= dfg + dgh + 3.0 * tol, "dl triangle");
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "metric-axioms",
        secs < 60.0,
        &format!("200 triples, exact dl_rho axioms, dl within 3 tol, {secs:.1} s"),
    );
}

#[test]
fn criterion_02_origin_distance_bounds() {
    let tol = 1e-4;
    let pool = metric_pool(1);
    let mut nonneg_count = 0;
    for (f, g, _, nonneg) in &pool {
        let dl = aw_dist(f, g, tol).unwrap().value;
        let d0f = dist_origin_to_hypo(f);
        let d0g = dist_origin_to_hypo(g);
        assert!((d0f - d0g).abs() <= dl + tol, "lower bound");
        assert!(dl <= d0f.max(d0g) + 1.0 + tol, "upper bound");
        if *nonneg {
            nonneg_count += 1;
            assert!(dl <= 1.0 + tol, "nonnegative pair exceeded unit distance: {dl}");
        }
    }
    verdict(
        2,
        "origin-distance-bounds",
        true,
        &format!("200 pairs, {nonneg_count} nonnegative pairs within unit distance"),
    );
}

#[test]
fn criterion_03_sandwich() {
    let tol = 1e-4;
    let pool = metric_pool(3);
    for (f, g, _, _) in pool.iter().take(100) {
        for rho in [1.0, 2.0, 4.0] {
            let rep = check_sandwich(f, g, rho, tol).unwrap();
            assert!(rep.holds, "rho {rho}: {rep:?}");
        }
    }
    verdict(3, "aux-distance-sandwich", true, "100 pairs at rho in {1, 2, 4}");
}

#[test]
fn criterion_04_epispline_guarantee() {
    let mut r = rng(4, "acceptance/espline");
    let d = GridDomain::line(-2.0, 2.0, 0.05).unwrap();
    let (rho, rho_p) = (1.0, 2.0);
    let mut worst_margin = f64::NEG_INFINITY;
    for _ in 0..50 {
        let f = random_gridfn(&d, &mut r, false, 0.2);
        for nu in [8usize, 16, 40] {
            let partition = BoxPartition::new(1, 2.0, nu).unwrap();
            let s = epispline_approx(&f, &partition, rho, rho_p).unwrap();
            let neg = GridFn::from_fn(d.clone(), |x| ExtReal::finite(s.eval_neg(x))).unwrap();
            let err = aux_dist_rho(&f, &neg, rho).unwrap();
            let mu = partition.meshsize(rho);
            assert!(err <= mu + 1e-12, "aux {err} > meshsize {mu}");
            worst_margin = worst_margin.max(err - mu);
            for (_, x) in d.iter_members() {
                let sx = s.eval(x);
                let fx = f.value_at(x).unwrap().to_f64();
                let ub = (-rho_p).max(rho_p.min(-fx));
                assert!(
                    sx >= -rho_p - 1e-12 && sx <= ub + 1e-12,
                    "value bound at {x:?}: s = {sx}, ub = {ub}"
                );
            }
        }
    }
    verdict(
        4,
        "epispline-meshsize-guarantee",
        true,
        &format!("50 functions x 3 partitions, worst aux-vs-meshsize margin {worst_margin:.2e}"),
    );
}

#[test]
fn criterion_05_cover_quantizer() {
    let p = cover_params(1, 0.05, 2.0, [1.0 / 3.0; 3], 1.001).unwrap();
    assert!(
        p.log_cover_count <= p.covering_bound,
        "cover-count self-consistency: {} > {}",
        p.log_cover_count,
        p.covering_bound
    );
    let d = GridDomain::line(-2.0, 2.0, 0.25).unwrap();
    let mut r = rng(5, "acceptance/quantize");
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let values: Vec<ExtReal> = (0..d.member_count())
            .map(|_| ExtReal::finite(dyadic(&mut r, -128, 128)))
            .collect();
        let f = GridFn::new(d.clone(), values).unwrap();
        assert!(dist_origin_to_hypo(&f) <= p.r);
        let f0 = quantize_to_cover(&f, &p, p.omega * p.rho).unwrap();
        let dl = aw_dist(&f, &f0, 1e-4).unwrap().value;
        worst = worst.max(dl);
        assert!(dl <= p.epsilon + 1e-3, "dl {dl} vs eps {}", p.epsilon);
    }
    verdict(
        5,
        "cover-quantizer",
        true,
        &format!(
            "30 functions, worst dl {worst:.4}, log-count {:.1} <= bound {:.1}",
            p.log_cover_count, p.covering_bound
        ),
    );
}

#[test]
fn criterion_06_packing() {
    let start = Instant::now();
    let fam = packing_family(1.0, 0.03, 1).unwrap();
    assert_eq!(fam.members.len(), 64, "member count");
    let rep = verify_packing_separation(&fam).unwrap();
    assert_eq!(rep.pair_count, 2016);
    assert!(rep.separated, "{rep:?}");
    assert!(rep.min_pairwise_lower > fam.epsilon);
    assert!((rep.log_member_count - 64.0f64.ln()).abs() < 1e-12);
    assert!(rep.log_member_count >= rep.count_lower_bound, "{rep:?}");
    let secs = start.elapsed().as_secs_f64();
    verdict(
        6,
        "packing-separation",
        secs < 30.0,
        &format!(
            "64 members, 2016 pairs, min lower {:.4} > 0.03, log 64 = {:.3} >= {:.2}, {secs:.1} s",
            rep.min_pairwise_lower, rep.log_member_count, rep.count_lower_bound
        ),
    );
}

#[test]
fn criterion_07_pipeline() {
    let d = GridDomain::line(-2.0, 2.0, 0.01).unwrap();
    let target =
        GridFn::from_fn(d, |x| ExtReal::finite(if x[0] <= 0.0 { 0.0 } else { -2.0 })).unwrap();
    let schedule = PipelineSchedule::new(vec![
        PipelineStage { cap: f64::INFINITY, lambda: 0.1, rho: 2.0, q: 2 },
        PipelineStage { cap: f64::INFINITY, lambda: 0.01, rho: 2.0, q: 4 },
        PipelineStage { cap: f64::INFINITY, lambda: 0.0005, rho: 2.0, q: 8 },
    ])
    .unwrap();
    let res = hypo_approx_sequence(
        &target,
        &schedule,
        1e-4,
        &FitOptions { seed: 11, ..Default::default() },
    )
    .unwrap();
    let first = res.first().unwrap().dl_to_target;
    let last = res.last().unwrap().dl_to_target;
    verdict(
        7,
        "pa-pipeline",
        last < 0.05 && last < first,
        &format!("stage distances {:.4} -> {:.4} -> {:.4}", first, res[1].dl_to_target, last),
    );
}

#[test]
fn criterion_08_moreau() {
    // analytic case on the fine grid
    let d = GridDomain::line(-3.0, 3.0, 0.001).unwrap();
    let f = GridFn::from_fn(d, |x| ExtReal::finite(-x[0] * x[0])).unwrap();
    let e = moreau_envelope(&f, 0.5).unwrap();
    let got = e.value_at(&[1.0]).unwrap().to_f64();
    assert!((got - (-0.5)).abs() <= 2e-3, "analytic envelope value: {got}");

    // domination and dl decrease along the smoothing schedule
    let mut r = rng(8, "acceptance/moreau");
    let tol = 1e-5;
    for _ in 0..5 {
        let d = random_domain_1d(&mut r, 21);
        let f = random_gridfn(&d, &mut r, false, 0.1);
        let mut prev = f64::INFINITY;
        for lambda in [1.0, 0.3, 0.1, 0.03] {
            let e = moreau_envelope(&f, lambda).unwrap();
            for (rank, v) in f.values().iter().enumerate() {
                assert!(e.value(rank) >= *v, "envelope must dominate");
            }
            let dl = aw_dist(&e, &f, tol).unwrap().value;
            assert!(dl <= prev + 2.0 * tol, "dl not decreasing: {dl} > {prev}");
            prev = dl;
        }
    }
    verdict(
        8,
        "moreau-envelope",
        true,
        &format!("analytic value {got:.4} within 2e-3; domination and dl decrease hold"),
    );
}

#[test]
fn criterion_09_pa_fit_recovery() {
    // affine target with one piece
    let d1 = GridDomain::line(-2.0, 2.0, 0.25).unwrap();
    let affine = GridFn::from_fn(d1, |x| ExtReal::finite(2.0 * x[0] + 1.0)).unwrap();
    let r1 = pa_fit(&affine, 1, 2.0, &FitOptions::default()).unwrap();
    assert!(r1.residual < 1e-8, "affine residual {}", r1.residual);

    // |x| with two pieces
    let d2 = GridDomain::line(-2.0, 2.0, 0.05).unwrap();
    let abs = GridFn::from_fn(d2, |x| ExtReal::finite(x[0].abs())).unwrap();
    let r2 = pa_fit(&abs, 2, 2.0, &FitOptions { seed: 1, ..Default::default() }).unwrap();
    assert!(r2.residual < 1e-6, "abs residual {}", r2.residual);

    // generate-and-recover in two dimensions
    let d3 = GridDomain::new(&[(-1.0, 1.0, 0.25), (-1.0, 1.0, 0.25)]).unwrap();
    let mut r = rng(9, "acceptance/fit");
    let rand_max = |r: &mut rand_chacha::ChaCha8Rng| {
        MaxAffine::new(
            (0..3)
                .map(|_| AffinePiece {
                    grad: vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)],
                    offset: r.random_range(-0.5..0.5),
                })
                .collect(),
        )
        .unwrap()
    };
    let truth = PaDiff::new(rand_max(&mut r), rand_max(&mut r), 1.0).unwrap();
    let target = truth.to_gridfn(d3).unwrap();
    let r3 = pa_fit(
        &target,
        3,
        1.0,
        &FitOptions { restarts: 20, seed: 7, ..Default::default() },
    )
    .unwrap();
    assert!(r3.residual < 1e-4, "recovery residual {}", r3.residual);

    verdict(
        9,
        "pa-fit-recovery",
        r1.monotone && r2.monotone && r3.monotone,
        &format!(
            "residuals {:.1e}, {:.1e}, {:.1e}; descent monotone",
            r1.residual, r2.residual, r3.residual
        ),
    );
}

#[test]
fn criterion_10_saa_closed_forms() {
    // constants-class regression equals the sample mean
    let d = GridDomain::line(-1.0, 1.0, 1.0).unwrap();
    let class = FunctionClass::uniform(d.clone(), -10.0, 10.0)
        .unwrap()
        .with_lipschitz(0.0)
        .unwrap();
    let ys = [1.5, -0.5, 2.0, 0.25, 1.0, -2.0, 0.5, 0.75];
    let pairs: Vec<(Vec<f64>, f64)> = ys.iter().map(|&y| (vec![0.0], y)).collect();
    let s = Sample::regression_from_points(d.clone(), &pairs, 0).unwrap();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let sol = saa_solve(
        Objective::LsRegression,
        &s,
        &class,
        &SolveOptions { max_iter: 4000, ..Default::default() },
    )
    .unwrap();
    let mut worst_reg = 0.0f64;
    for v in sol.values() {
        worst_reg = worst_reg.max((v.to_f64() - mean).abs());
    }
    assert!(worst_reg < 1e-6, "regression deviation {worst_reg}");

    // unconstrained histogram MLE equals empirical frequencies / h^n
    let dm = GridDomain::line(-5.0, 5.0, 1.0).unwrap();
    let mclass = FunctionClass::uniform(dm.clone(), 0.0, 2.0)
        .unwrap()
        .with_unit_integral()
        .unwrap();
    let points: Vec<Vec<f64>> = [-3.0, -3.0, 0.0, 1.0, 1.0, 1.0, 4.0, 0.0, -1.0, 1.0]
        .iter()
        .map(|&x| vec![x])
        .collect();
    let ms = Sample::density_from_points(dm.clone(), &points, 0).unwrap();
    let msol = saa_solve(
        Objective::MleDensity,
        &ms,
        &mclass,
        &SolveOptions { max_iter: 4000, step_a: 0.05, step_b: 0.01, ..Default::default() },
    )
    .unwrap();
    let nu = points.len() as f64;
    let mut worst_mle = 0.0f64;
    for (rank, x) in dm.iter_members() {
        let freq = points.iter().filter(|p| p[0] == x[0]).count() as f64 / nu;
        worst_mle = worst_mle.max((msol.value(rank).to_f64() - freq).abs());
    }
    assert!(worst_mle < 1e-4, "MLE deviation {worst_mle}");

    verdict(
        10,
        "saa-closed-forms",
        true,
        &format!("regression dev {worst_reg:.1e}, histogram dev {worst_mle:.1e}"),
    );
}

#[test]
fn criterion_11_argmin_excess() {
    let mut r = rng(11, "acceptance/argmin");
    let tol = 1e-5;
    for case in 0..100 {
        let d = random_domain_1d(&mut r, 7);
        let k = 10usize;
        let fam1: Vec<GridFn> = (0..k).map(|_| random_gridfn(&d, &mut r, false, 0.1)).collect();
        let fam2: Vec<GridFn> = (0..k).map(|_| random_gridfn(&d, &mut r, false, 0.1)).collect();
        let phi1: Vec<f64> = (0..k).map(|_| dyadic(&mut r, -64, 64)).collect();
        let phi2: Vec<f64> = (0..k).map(|_| dyadic(&mut r, -64, 64)).collect();
        let mut gamma = 0.0f64;
        for f in &fam1 {
            let mut near = f64::INFINITY;
            for g in &fam2 {
                near = near.min(aw_dist(f, g, tol).unwrap().value);
            }
            gamma = gamma.max(near);
        }
        for g in &fam2 {
            let mut near = f64::INFINITY;
            for f in &fam1 {
                near = near.min(aw_dist(f, g, tol).unwrap().value);
            }
            gamma = gamma.max(near);
        }
        gamma += 1e-9;
        let spread = phi1
            .iter()
            .chain(&phi2)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let tau = spread.1 - spread.0;
        let eps = dyadic(&mut r, 0, 32);
        let delta = dyadic(&mut r, -32, 64);
        let rep = argmin_excess_check(
            &fam1, &fam2, &phi1, &phi2, tau, gamma, eps, delta, tol,
        )
        .unwrap();
        assert!(
            rep.premise_forward && rep.premise_backward,
            "case {case}: premises must hold by construction"
        );
        assert!(rep.level_holds && rep.argmin_holds, "case {case}: {rep:?}");
    }
    verdict(11, "argmin-level-set-excess", true, "100 premise-satisfying instances");
}

#[test]
fn criterion_12_pointwise_bound() {
    let mut r = rng(12, "acceptance/holder");
    let kappa = 2.0;
    let d = GridDomain::line(-2.0, 2.0, 0.25).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let f = random_lipschitz_1d(&d, kappa, &mut r);
        let g = random_lipschitz_1d(&d, kappa, &mut r);
        let rep = check_holder_pointwise(&f, &g, kappa, 1e-4).unwrap();
        worst = worst.max(rep.max_violation);
        assert!(rep.holds, "{rep:?}");
    }
    verdict(
        12,
        "pointwise-lipschitz-bound",
        true,
        &format!("50 pairs, worst violation {worst:.2e}"),
    );
}

#[test]
fn criterion_13_statistical_bands() {
    // (a) constants-class regression rate: slope of the median gap
    let d = GridDomain::line(-1.0, 1.0, 1.0).unwrap();
    let origin = d.member_rank_at(&[0.0]).unwrap();
    let truth =
        TruthSpec::regression(d.clone(), vec![(origin, 1.0, 0.5), (origin, -1.0, 0.5)]).unwrap();
    let class = FunctionClass::uniform(d.clone(), -10.0, 10.0)
        .unwrap()
        .with_lipschitz(0.0)
        .unwrap();
    let f_star = GridFn::constant(d.clone(), 0.0).unwrap();
    let cfg = ExperimentConfig {
        nus: vec![100, 1000, 10000],
        replications: 50,
        seed: 13,
        solve: SolveOptions::default(),
        dl_tol: 1e-3,
    };
    let rate = rate_experiment(
        Objective::LsRegression,
        &truth,
        &class,
        std::slice::from_ref(&f_star),
        &cfg,
    )
    .unwrap();
    let slope_ok = (-1.4..=-0.6).contains(&rate.slope);

    // (b) level-set coverage of the population minimizer
    let truth3 = TruthSpec::regression(
        d,
        vec![(origin, -1.0, 0.25), (origin, 0.0, 0.5), (origin, 1.0, 0.25)],
    )
    .unwrap();
    let pop = population_objective(Objective::LsRegression, &truth3, &f_star).unwrap();
    let freq = level_set_coverage(
        Objective::LsRegression,
        &truth3,
        &f_star,
        pop + 0.1,
        500,
        200,
        13,
    )
    .unwrap();

    verdict(
        13,
        "statistical-bands",
        slope_ok && freq >= 0.9,
        &format!("rate slope {:.3} in [-1.4, -0.6]; coverage {freq:.3} >= 0.9", rate.slope),
    );
}
