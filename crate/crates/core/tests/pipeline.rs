use pilotsim::asymptotics::{dop_limit_sinr, fpr_limit_sinr};
use pilotsim::geometry::build_deployment;
use pilotsim::randmat::{make_pilots, sample_channels};
use pilotsim::rng::stream;
use pilotsim::training::estimate_cell;
use pilotsim::uplink::cell_sinr;
use pilotsim::{to_db, Deployment, MomentSet, PilotScheme, SystemConfig};
use proptest::prelude::*;

/// Trial-averaged SINR of every centre-cell user, linear.
fn simulated(cfg: &SystemConfig, dep: &Deployment, trials: u64, seed: u64) -> Vec<f64> {
    let k = cfg.users[0];
    let mut acc = vec![0.0; k];
    for t in 0..trials {
        let mut rng = stream(seed, "pipeline-trial", t);
        let pilots = make_pilots(cfg, &mut rng).unwrap();
        let ch = sample_channels(cfg, 0, &mut rng);
        let est = estimate_cell(dep, &pilots, &ch, cfg.sigma2).unwrap();
        for (a, s) in acc.iter_mut().zip(cell_sinr(&est, &ch, dep, cfg.sigma2).unwrap()) {
            *a += s.gamma / trials as f64;
        }
    }
    acc
}

#[test]
fn dop_simulation_tracks_limit_per_user() {
    let cfg = SystemConfig { antennas: 400, ..SystemConfig::default() }.with_uniform_users(10);
    let cfg = SystemConfig { tau: 15, ..cfg };
    let dep = build_deployment(&cfg, &mut stream(21, "pipeline-dep", 0)).unwrap();
    let moments = MomentSet::from_deployment(&cfg, &dep).unwrap();
    let sim = simulated(&cfg, &dep, 40, 21);
    for (k, &g) in sim.iter().enumerate() {
        let lim = dop_limit_sinr(dep.rho(k, 0, 0), 0, &moments, cfg.sigma2).unwrap().sinr.value();
        assert!((to_db(g) - to_db(lim)).abs() < 0.5, "user {k}: {} vs {}", to_db(g), to_db(lim));
    }
}

#[test]
fn fpr_simulation_tracks_realization_limit() {
    let cfg = SystemConfig { antennas: 400, tau: 15, scheme: PilotScheme::Fpr, ..SystemConfig::default() }
        .with_uniform_users(10);
    let dep = build_deployment(&cfg, &mut stream(22, "pipeline-dep", 0)).unwrap();
    let moments = MomentSet::from_deployment(&cfg, &dep).unwrap();
    let sim = simulated(&cfg, &dep, 40, 22);
    for (k, &g) in sim.iter().enumerate() {
        // the co-pilot user of (k, 0) in cell j is user k of cell j
        let row: Vec<f64> = (0..cfg.cells).map(|j| dep.rho(k, j, 0)).collect();
        let lim = fpr_limit_sinr(&row, 0, &moments, cfg.sigma2).unwrap().sinr.value();
        assert!((to_db(g) - to_db(lim)).abs() < 0.5, "user {k}: {} vs {}", to_db(g), to_db(lim));
    }
}

#[test]
fn fpr_users_differ_dop_users_coincide_under_power_control() {
    let cfg = SystemConfig::default();
    let dep = build_deployment(&cfg, &mut stream(23, "pipeline-dep", 0)).unwrap();
    let moments = MomentSet::from_deployment(&cfg, &dep).unwrap();
    let dop: Vec<f64> =
        (0..20).map(|k| dop_limit_sinr(dep.rho(k, 0, 0), 0, &moments, cfg.sigma2).unwrap().sinr.value()).collect();
    assert!(dop.iter().all(|&g| g == dop[0]));
    let fpr: Vec<f64> = (0..20)
        .map(|k| {
            let row: Vec<f64> = (0..7).map(|j| dep.rho(k, j, 0)).collect();
            fpr_limit_sinr(&row, 0, &moments, cfg.sigma2).unwrap().sinr.value()
        })
        .collect();
    assert!(fpr.iter().any(|&g| (g - fpr[0]).abs() > 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_control_equalizes_own_cell_power(seed in any::<u64>(), pu in 0.01f64..100.0) {
        let cfg = SystemConfig { pu, ..SystemConfig::default() };
        let dep = build_deployment(&cfg, &mut stream(seed, "prop-dep", 0)).unwrap();
        for j in 0..7 {
            for k in 0..20 {
                prop_assert_eq!(dep.rho(k, j, j), pu);
                prop_assert_eq!(dep.ellbar(k, j, j), 1.0);
                for i in 0..7 {
                    let l = dep.ell(k, j, i);
                    prop_assert!(l > 0.0 && l <= 1.0);
                }
            }
        }
    }

    #[test]
    fn estimate_plus_error_is_channel(seed in any::<u64>(), fpr in any::<bool>()) {
        let scheme = if fpr { PilotScheme::Fpr } else { PilotScheme::Dop };
        let cfg = SystemConfig { antennas: 8, tau: 6, scheme, ..SystemConfig::default() }.with_uniform_users(4);
        let dep = build_deployment(&cfg, &mut stream(seed, "prop-dep", 1)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(seed, "prop-pilots", 0)).unwrap();
        let ch = sample_channels(&cfg, 0, &mut stream(seed, "prop-ch", 0));
        let est = estimate_cell(&dep, &pilots, &ch, cfg.sigma2).unwrap();
        let err = (&est.hhat + &est.htilde - &ch.h[0]).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        for u in &est.upsilon {
            prop_assert!(*u > 0.0 && *u < 1.0);
        }
    }
}
