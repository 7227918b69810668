//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then asserts.
//!
//! Run with `cargo test -p pilotsim-cli --test acceptance -- --test-threads 1`
//! for the lines in criterion order.

use std::io::Write;
use std::sync::OnceLock;

use pilotsim::asymptotics::{dop_limit_sinr, fpr_limit_sinr, sample_copilot_gains, wishart_moments};
use pilotsim::capacity::{
    alpha_kappa, alpha_tau, fpr_outage_capacity_from_samples, fpr_outage_probability, kappa_tau, worst_case_alpha,
    CapacityQuery,
};
use pilotsim::experiments::{
    run_capacity_sweeps, run_cdf_compare, run_sinr_vs_n, ComputeMoments, ExperimentName, ExperimentSpec, ResultTable,
};
use pilotsim::geometry::build_deployment;
use pilotsim::randmat::{complex_gaussian_matrix, haar_unitary, lemma_checks, make_pilots, sample_channels};
use pilotsim::rng::stream;
use pilotsim::training::{contamination_form_estimate, estimate_cell};
use pilotsim::{from_db, MomentMode, MomentSet, PilotScheme, SystemConfig};
use pilotsim_cli::{run, RunOptions};
use rand::Rng;

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id:>2} {verdict}: {title}: {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {id} failed: {title}: {detail}");
}

fn column<'a>(t: &'a ResultTable, name: &str) -> &'a [f64] {
    t.column(name).unwrap_or_else(|| panic!("missing column {name}"))
}

fn row_at(t: &ResultTable, key: &str, x: f64) -> usize {
    column(t, key).iter().position(|&v| (v - x).abs() < 1e-9).unwrap_or_else(|| panic!("{key} = {x} not in grid"))
}

fn sinr_curve() -> &'static ResultTable {
    static TABLE: OnceLock<ResultTable> = OnceLock::new();
    TABLE.get_or_init(|| run_sinr_vs_n(&ExperimentSpec::preset(ExperimentName::SinrVsN)).unwrap())
}

#[test]
fn criterion_01_massive_mimo_gap() {
    let t = sinr_curve();
    let gap = |n: f64| {
        let r = row_at(t, "N", n);
        column(t, "massive")[r] - column(t, "sim")[r]
    };
    let (g100, g500) = (gap(100.0), gap(500.0));
    let pass = (g100 - 9.0).abs() <= 1.0 && (g500 - 2.3).abs() <= 0.5;
    report(
        1,
        "massive - sim gap",
        pass,
        &format!("N=100: {g100:.2} dB (target 9 +- 1), N=500: {g500:.2} dB (target 2.3 +- 0.5), seed 1, 500 trials"),
    );
}

#[test]
fn criterion_02_lsa_accuracy() {
    let t = sinr_curve();
    let mut worst: (f64, f64) = (0.0, 0.0);
    for (r, &n) in column(t, "N").iter().enumerate() {
        if n >= 100.0 {
            let d = (column(t, "asymp")[r] - column(t, "sim")[r]).abs();
            if d > worst.1 {
                worst = (n, d);
            }
        }
    }
    report(2, "large-system limit vs Monte-Carlo", worst.1 <= 0.5, &format!("max |asymp - sim| = {:.3} dB at N={}", worst.1, worst.0));
}

#[test]
fn criterion_03_crossing_probability() {
    let spec = ExperimentSpec::preset(ExperimentName::CdfCompare);
    let tables = run_cdf_compare(&spec, &ComputeMoments).unwrap();
    let dop = &tables[1];
    let p = |kappa: f64| column(dop, "p_dop_better")[row_at(dop, "kappa", kappa)];
    let (p1, p3) = (p(1.0), p(1.0 / 3.0));
    let n = tables[0].rows();
    let pass = (p1 - 0.30).abs() <= 0.07 && (p3 - 0.75).abs() <= 0.07 && n >= 10_000;
    report(3, "DOP beats FPR probability", pass, &format!("kappa=1: {p1:.4} (0.30 +- 0.07), kappa=1/3: {p3:.4} (0.75 +- 0.07), {n} realizations"));
}

#[test]
fn criterion_04_capacity_vs_threshold() {
    let spec = ExperimentSpec::preset(ExperimentName::CapacityTheta);
    let t = run_capacity_sweeps(&spec, &ComputeMoments).unwrap();
    let grid = column(&t, "gamma_th_dB");
    let fpr = column(&t, "fpr");
    let first_zero = grid.iter().zip(fpr).find(|(_, &a)| a == 0.0).map(|(&g, _)| g);
    let zero_ok = first_zero.is_some_and(|g| (g - (-2.0)).abs() <= 0.5);
    let at = |name: &str, db: f64| column(&t, name)[row_at(&t, "gamma_th_dB", db)];
    let names = ["dop_theta0.5", "dop_theta1", "dop_theta1.5"];
    let m2: Vec<f64> = names.iter().map(|n| at(n, -2.0)).collect();
    let z: Vec<f64> = names.iter().map(|n| at(n, 0.0)).collect();
    let range_ok = m2.iter().all(|&a| (0.28..=0.35).contains(&a));
    let zero_db_ok = z.iter().all(|&a| (a - 0.2).abs() <= 0.04);
    report(
        4,
        "fixed-tau and FPR outage capacity",
        zero_ok && range_ok && zero_db_ok,
        &format!(
            "FPR first zero at {} dB (target -2, grid 0.5; FPR(-2 dB) = {:.4}), alpha_tau(-2 dB) = {:.3?} in [0.28, 0.35], alpha_tau(0 dB) = {:.3?} (0.2 +- 0.04)",
            first_zero.map_or("none".to_string(), |g| g.to_string()),
            at("fpr", -2.0),
            m2,
            z
        ),
    );
}

#[test]
fn criterion_05_capacity_gain() {
    let spec = ExperimentSpec::preset(ExperimentName::CapacityKappa);
    let t = run_capacity_sweeps(&spec, &ComputeMoments).unwrap();
    let r = row_at(&t, "gamma_th_dB", -10.0);
    let (fpr, dop) = (column(&t, "fpr")[r], column(&t, "dop_kappa1")[r]);
    let extra = 500.0 * (dop - fpr);
    let pass = (fpr / 1.1 - 1.0).abs() <= 0.15 && (dop / 1.7 - 1.0).abs() <= 0.15 && (extra - 300.0).abs() <= 75.0;
    report(5, "fixed-kappa capacity at -10 dB", pass, &format!("FPR {fpr:.3} (1.1 +- 15%), DOP {dop:.3} (1.7 +- 15%), N*delta alpha at N=500: {extra:.0} (300 +- 75)"));
}

#[test]
fn criterion_06_pilots_and_haar_moment() {
    let mut worst: f64 = 0.0;
    for scheme in [PilotScheme::Dop, PilotScheme::Fpr] {
        for (tau, k) in [(30, 20), (8, 8), (64, 17)] {
            let cfg = SystemConfig { tau, scheme, ..SystemConfig::default() }.with_uniform_users(k);
            for seed in 0..5 {
                let pilots = make_pilots(&cfg, &mut stream(seed, "acc-pilots", 0)).unwrap();
                for j in 0..cfg.cells {
                    worst = worst.max(pilots.orthonormality_error(j));
                }
            }
        }
    }
    let tau = 16;
    let draws = 40_000;
    let mut rng = stream(6, "acc-haar", 0);
    let samples: Vec<f64> = (0..draws).map(|_| haar_unitary(tau, &mut rng).unwrap()[(0, 0)].norm_sqr()).collect();
    let mean = samples.iter().sum::<f64>() / draws as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    let z = (mean - 1.0 / tau as f64) / se;
    let pass = worst <= 1e-10 && z.abs() <= 3.0;
    report(6, "pilot orthonormality and Haar moment", pass, &format!("max |Q^H Q - I| = {worst:.2e}, E|u11|^2 = {mean:.6} vs {:.6} ({z:+.2} SE)", 1.0 / tau as f64));
}

#[test]
fn criterion_07_dual_path_estimator() {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let scheme = if seed % 2 == 0 { PilotScheme::Dop } else { PilotScheme::Fpr };
        let cfg = SystemConfig { antennas: 6, tau: 5, scheme, ..SystemConfig::default() }.with_uniform_users(3);
        let dep = build_deployment(&cfg, &mut stream(seed, "acc-dep", 0)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(seed, "acc-pilots", 1)).unwrap();
        let ch = sample_channels(&cfg, 0, &mut stream(seed, "acc-ch", 0));
        let est = estimate_cell(&dep, &pilots, &ch, cfg.sigma2).unwrap();
        for k in 0..3 {
            let direct = contamination_form_estimate(k, &dep, &pilots, &ch, cfg.sigma2).unwrap();
            for (a, b) in direct.iter().zip(est.hhat.column(k).iter()) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    report(7, "estimate via observation vs term-by-term", worst <= 1e-10, &format!("max entrywise difference {worst:.2e} over 50 instances"));
}

#[test]
fn criterion_08_lemma_concentration() {
    let reps = 100;
    let mut rng = stream(8, "acc-lemma", 0);
    let mut shrinking = 0;
    for _ in 0..reps {
        let rows = lemma_checks(&[64, 256, 1024], 32, &mut rng);
        let series = |f: fn(&pilotsim::randmat::LemmaRow) -> f64| rows.windows(2).all(|w| f(&w[1]) < f(&w[0]));
        if series(|r| r.gaussian) && series(|r| r.isometric) && series(|r| r.gaussian_cross) && series(|r| r.isometric_cross) {
            shrinking += 1;
        }
    }
    let share = shrinking as f64 / reps as f64;

    let alpha = 0.5;
    let grid = [0.25, 0.5, 1.0, 2.0];
    let mut errs = Vec::new();
    let mut wrng = stream(8, "acc-wishart", 0);
    for n in [64usize, 256, 1024] {
        let k = (alpha * n as f64) as usize;
        let gamma: Vec<f64> = (0..k).map(|i| grid[i % grid.len()]).collect();
        let e1 = gamma.iter().sum::<f64>() / k as f64;
        let e2 = gamma.iter().map(|g| g * g).sum::<f64>() / k as f64;
        let trials = 4;
        let (mut d1, mut d2) = (0.0, 0.0);
        for _ in 0..trials {
            let h = complex_gaussian_matrix(n, k, 1.0, &mut wrng);
            let (f, s) = wishart_moments(&h, &gamma);
            d1 += (f - alpha * e1).abs() / trials as f64;
            d2 += (s - (alpha * e2 + alpha * alpha * e1 * e1)).abs() / trials as f64;
        }
        errs.push((d1, d2));
    }
    let wishart_ok = errs.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let shown: Vec<String> = errs.iter().map(|(a, b)| format!("({a:.1e}, {b:.1e})")).collect();
    report(
        8,
        "quadratic-form and Wishart concentration",
        share >= 0.95 && wishart_ok,
        &format!("{shrinking}/{reps} repetitions shrink for all four forms; Wishart errors (first, second) = {}", shown.join(" ")),
    );
}

fn random_pc_moments<R: Rng>(rng: &mut R) -> MomentSet {
    let cells = 7;
    let mut m1 = vec![vec![1.0; cells]; cells];
    let mut m2 = vec![vec![1.0; cells]; cells];
    for j in 0..cells {
        for i in 0..cells {
            if i != j {
                let a: f64 = rng.random_range(0.0..0.3);
                m1[j][i] = a;
                m2[j][i] = a * a * rng.random_range(1.0..3.0);
            }
        }
    }
    MomentSet::new(vec![0.1; cells], vec![0.5; cells], m1, m2, MomentMode::PowerControlled).unwrap()
}

#[test]
fn criterion_09_capacity_algebra() {
    let mut rng = stream(9, "acc-capacity", 0);
    let mut residual: f64 = 0.0;
    let mut fixed_point: f64 = 0.0;
    let mut worst_case_exact = true;
    for _ in 0..200 {
        let q = CapacityQuery::new(random_pc_moments(&mut rng), 0, from_db(rng.random_range(-15.0..10.0)), rng.random_range(0.0..2.0))
            .unwrap()
            .with_theta(rng.random_range(0.1..2.0))
            .with_kappa(rng.random_range(0.05..1.0));
        let (a, b) = q.quadratic();
        let k = kappa_tau(&q);
        if k < 1.0 {
            residual = residual.max((a * k * k + b * k - 1.0 / q.gamma_th).abs());
        }
        let one = q.clone().with_kappa(1.0);
        worst_case_exact &= alpha_kappa(&one).alpha == worst_case_alpha(&one) || alpha_kappa(&one).infeasible;
        let c = alpha_kappa(&q);
        if !c.infeasible && c.alpha > 0.0 {
            let back = alpha_tau(&q.clone().with_theta(c.alpha / q.kappa));
            fixed_point = fixed_point.max((back - c.alpha).abs());
        }
    }

    let cfg = SystemConfig::default();
    let moments = MomentSet::ensemble_seeded(&cfg, 100_000, 9).unwrap();
    let rows: Vec<Vec<f64>> = (0..4000).map(|r| sample_copilot_gains(&cfg, 0, &mut stream(9, "acc-rows", r)).unwrap()).collect();
    let step = 1e-3;
    let mut grid_gap: f64 = 0.0;
    for db in [-10.0, -6.0, -3.0] {
        let q = CapacityQuery::new(moments.clone(), 0, from_db(db), 1.0).unwrap();
        let alpha = fpr_outage_capacity_from_samples(&q, &rows).unwrap();
        let mut best = 0.0;
        let mut a = 0.0;
        while a <= 2.0 {
            if fpr_outage_probability(&q, a, &rows).unwrap() <= q.beta {
                best = a;
            }
            a += step;
        }
        grid_gap = grid_gap.max((alpha - best).abs());
    }
    let pass = residual < 1e-12 && worst_case_exact && fixed_point < 1e-10 && grid_gap <= step;
    report(
        9,
        "capacity solver algebra",
        pass,
        &format!("root residual {residual:.1e}, kappa=1 closed form exact: {worst_case_exact}, fixed point {fixed_point:.1e}, quantile vs grid {grid_gap:.1e}"),
    );
}

#[test]
fn criterion_10_single_cell_equivalence() {
    let mut rng = stream(10, "acc-single", 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m1: f64 = rng.random_range(0.01..5.0);
        let m = MomentSet::new(
            vec![rng.random_range(0.0..2.0)],
            vec![rng.random_range(0.01..1.0)],
            vec![vec![m1]],
            vec![vec![m1 * m1 * rng.random_range(1.0..3.0)]],
            MomentMode::General,
        )
        .unwrap();
        let rho = rng.random_range(0.01..10.0);
        let sigma2 = rng.random_range(0.0..5.0);
        let a = dop_limit_sinr(rho, 0, &m, sigma2).unwrap().sinr.value();
        let b = fpr_limit_sinr(&[rho], 0, &m, sigma2).unwrap().sinr.value();
        worst = worst.max(((a - b) / a).abs());
    }
    report(10, "single-cell DOP and FPR limits agree", worst <= 1e-12, &format!("max relative difference {worst:.1e} over 100 draws"));
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut files = 0;
    for name in pilotsim::experiments::ExperimentName::ALL {
        let mut outputs = Vec::new();
        for (run_idx, threads) in [1usize, 4].into_iter().enumerate() {
            let out = dir.path().join(format!("{name}-{run_idx}"));
            let opts = RunOptions {
                experiment: Some(name),
                seed: Some(42),
                trials: Some(25),
                out: out.clone(),
                threads: Some(threads),
                ..RunOptions::default()
            };
            let manifest = run(&opts).unwrap();
            let bytes: Vec<(String, Vec<u8>)> =
                manifest.outputs.iter().map(|o| (o.file.clone(), std::fs::read(out.join(&o.file)).unwrap())).collect();
            outputs.push(bytes);
        }
        files += outputs[0].len();
        identical &= outputs[0] == outputs[1];
    }
    report(11, "byte-identical re-runs", identical, &format!("{files} output files compared across runs with 1 and 4 threads, seed 42"));
}
