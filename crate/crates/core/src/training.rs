//! Uplink training and per-antenna MMSE channel estimation.
//!
//! The default path simulates the `N x tau` observation at the receiving BS
//! and correlates it with each pilot. [`contamination_form_estimate`] builds
//! the same estimate directly as a weighted sum of the true and contaminating
//! channels; the two must agree to rounding.

use crate::geometry::Deployment;
use crate::randmat::{ChannelRealization, PilotSet};
use crate::{CMatrix, CVector, Error, Result, C64};

/// MMSE estimates of the own-cell channels at one BS.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub cell: usize,
    /// Column `k` is the estimate of `h_{k i i}`.
    pub hhat: CMatrix,
    /// Column `k` is the error `h_{k i i} - hhat_k`.
    pub htilde: CMatrix,
    /// Estimate variance per user.
    pub upsilon: Vec<f64>,
}

/// Inter-cell pilot interference seen by user `k` of cell `i`:
/// `sum_{j != i} sum_m rho_mji |q_ki^H q_mj|^2`, from the realized pilots.
pub fn pilot_interference(k: usize, i: usize, deployment: &Deployment, pilots: &PilotSet) -> f64 {
    (0..deployment.cells())
        .filter(|&j| j != i)
        .map(|j| {
            (0..deployment.users_in(j))
                .map(|m| deployment.rho(m, j, i) * pilots.overlap(k, i, m, j).norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Estimate variance `rho_kii / (rho_kii + pilot interference + sigma2)`.
pub fn estimate_variance(k: usize, i: usize, deployment: &Deployment, pilots: &PilotSet, sigma2: f64) -> f64 {
    let own = deployment.rho(k, i, i);
    own / (own + pilot_interference(k, i, deployment, pilots) + sigma2)
}

fn check_dimensions(deployment: &Deployment, pilots: &PilotSet, channels: &ChannelRealization) -> Result<()> {
    let cells = deployment.cells();
    if pilots.cells() != cells || channels.h.len() != cells {
        return Err(Error::Dimension(format!(
            "{cells} cells in deployment, {} in pilots, {} in channels",
            pilots.cells(),
            channels.h.len()
        )));
    }
    let n = channels.antennas();
    if channels.training_noise.ncols() != pilots.tau() {
        return Err(Error::Dimension(format!(
            "training noise spans {} symbols, pilots {}",
            channels.training_noise.ncols(),
            pilots.tau()
        )));
    }
    for j in 0..cells {
        let k = deployment.users_in(j);
        if pilots.users_in(j) != k || channels.h[j].shape() != (n, k) {
            return Err(Error::Dimension(format!("cell {j}: user counts disagree")));
        }
    }
    if channels.receiver >= cells {
        return Err(Error::Dimension(format!("receiver {} out of range", channels.receiver)));
    }
    Ok(())
}

/// Training observation at BS `channels.receiver`; row `n` is antenna `n`'s
/// `tau` received symbols: `sum_j H_j diag(sqrt(rho_.ji)) Q_j^T + noise`.
pub fn received_training(
    deployment: &Deployment,
    pilots: &PilotSet,
    channels: &ChannelRealization,
) -> Result<CMatrix> {
    check_dimensions(deployment, pilots, channels)?;
    let i = channels.receiver;
    let mut y = channels.training_noise.clone();
    for (j, h) in channels.h.iter().enumerate() {
        let mut weighted = h.clone();
        for (m, mut col) in weighted.column_iter_mut().enumerate() {
            col *= C64::from(deployment.rho(m, j, i).sqrt());
        }
        y.gemm(C64::from(1.0), &weighted, &pilots.matrix(j).transpose(), C64::from(1.0));
    }
    Ok(y)
}

/// Estimate of `h_{kii}` from the observation and its error vector.
pub fn mmse_estimate(
    y: &CMatrix,
    k: usize,
    deployment: &Deployment,
    pilots: &PilotSet,
    channels: &ChannelRealization,
    sigma2: f64,
) -> Result<(CVector, CVector)> {
    check_dimensions(deployment, pilots, channels)?;
    let i = channels.receiver;
    if y.shape() != (channels.antennas(), pilots.tau()) {
        return Err(Error::Dimension(format!("observation is {:?}", y.shape())));
    }
    let upsilon = estimate_variance(k, i, deployment, pilots, sigma2);
    let scale = upsilon / deployment.rho(k, i, i).sqrt();
    let hhat: CVector = (y * pilots.pilot(k, i).map(|x| x.conj())).column(0) * C64::from(scale);
    let htilde = channels.h[i].column(k) - &hhat;
    Ok((hhat, htilde))
}

/// Estimates for every user of the receiving cell, via the simulated observation.
pub fn estimate_cell(
    deployment: &Deployment,
    pilots: &PilotSet,
    channels: &ChannelRealization,
    sigma2: f64,
) -> Result<EstimateSet> {
    let y = received_training(deployment, pilots, channels)?;
    let i = channels.receiver;
    let users = deployment.users_in(i);
    let upsilon: Vec<f64> = (0..users).map(|k| estimate_variance(k, i, deployment, pilots, sigma2)).collect();
    let mut hhat = &y * pilots.matrix(i).map(|x| x.conj());
    for (k, mut col) in hhat.column_iter_mut().enumerate() {
        col *= C64::from(upsilon[k] / deployment.rho(k, i, i).sqrt());
    }
    let htilde = &channels.h[i] - &hhat;
    Ok(EstimateSet { cell: i, hhat, htilde, upsilon })
}

/// The same estimate assembled term by term:
/// `upsilon (h_kii + sum_{j != i, m} sqrt(rho_mji/rho_kii) (q_ki^H q_mj) h_mji + nhat/sqrt(rho_kii))`
/// with `nhat = noise * conj(q_ki)`.
///
/// Same-cell users drop out because their pilots are orthogonal to `q_ki`.
pub fn contamination_form_estimate(
    k: usize,
    deployment: &Deployment,
    pilots: &PilotSet,
    channels: &ChannelRealization,
    sigma2: f64,
) -> Result<CVector> {
    check_dimensions(deployment, pilots, channels)?;
    let i = channels.receiver;
    let own = deployment.rho(k, i, i);
    let upsilon = estimate_variance(k, i, deployment, pilots, sigma2);
    let mut acc: CVector = channels.h[i].column(k).into_owned();
    for j in (0..deployment.cells()).filter(|&j| j != i) {
        for m in 0..deployment.users_in(j) {
            let w = pilots.overlap(k, i, m, j) * (deployment.rho(m, j, i) / own).sqrt();
            acc.axpy(w, &channels.h[j].column(m), C64::from(1.0));
        }
    }
    let nhat = &channels.training_noise * pilots.pilot(k, i).map(|x| x.conj());
    acc.axpy(C64::from(1.0 / own.sqrt()), &nhat.column(0), C64::from(1.0));
    Ok(acc * C64::from(upsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{PilotScheme, SystemConfig};
    use crate::geometry::build_deployment;
    use crate::randmat::{make_pilots, sample_channels};
    use crate::rng::stream;
    use approx::assert_relative_eq;

    fn small(scheme: PilotScheme) -> SystemConfig {
        SystemConfig { antennas: 2, tau: 4, scheme, ..SystemConfig::default() }
            .with_cells(7)
            .with_uniform_users(2)
    }

    fn one_cell(sigma2: f64, n: usize) -> (SystemConfig, Deployment) {
        let cfg = SystemConfig { antennas: n, tau: 2, sigma2, ..SystemConfig::default() }
            .with_cells(1)
            .with_uniform_users(1);
        let dep = Deployment::from_positions(&cfg, vec![[0.0, 0.0]], vec![vec![[0.3, 0.1]]]).unwrap();
        (cfg, dep)
    }

    #[test]
    fn single_cell_variance_is_half_at_unit_snr() {
        let (cfg, dep) = one_cell(1.0, 4);
        let pilots = make_pilots(&cfg, &mut stream(1, "p", 0)).unwrap();
        assert_relative_eq!(estimate_variance(0, 0, &dep, &pilots, 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn fpr_variance_reduces_to_same_pilot_users() {
        let cfg = SystemConfig { scheme: PilotScheme::Fpr, ..SystemConfig::default() };
        let dep = build_deployment(&cfg, &mut stream(2, "dep", 0)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(2, "p", 0)).unwrap();
        for k in [0, 7, 19] {
            let direct: f64 = (0..7).map(|j| dep.rho(k, j, 0)).sum::<f64>() + cfg.sigma2;
            assert_relative_eq!(
                estimate_variance(k, 0, &dep, &pilots, cfg.sigma2),
                dep.rho(k, 0, 0) / direct,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn single_user_noiseless_observation() {
        let (cfg, dep) = one_cell(1.0, 3);
        let mut e1 = CMatrix::zeros(2, 1);
        e1[(0, 0)] = C64::from(1.0);
        let pilots = PilotSet::from_matrices(PilotScheme::Dop, vec![e1]);
        let mut ch = sample_channels(&cfg, 0, &mut stream(3, "ch", 0));
        ch.training_noise.fill(C64::from(0.0));
        let y = received_training(&dep, &pilots, &ch).unwrap();
        for n in 0..3 {
            assert_relative_eq!((y[(n, 0)] - ch.h[0][(n, 0)]).norm(), 0.0, epsilon = 1e-15);
            assert_eq!(y[(n, 1)], C64::from(0.0));
        }
    }

    #[test]
    fn observation_is_linear_in_amplitude() {
        let cfg = small(PilotScheme::Dop).with_cells(1).with_uniform_users(1);
        let bs = vec![[0.0, 0.0]];
        let near = Deployment::from_positions(
            &SystemConfig { power: crate::PowerMode::Fixed(vec![vec![1.0]]), ..cfg.clone() },
            bs.clone(),
            vec![vec![[0.2, 0.0]]],
        )
        .unwrap();
        let double = Deployment::from_positions(
            &SystemConfig { power: crate::PowerMode::Fixed(vec![vec![2.0]]), ..cfg.clone() },
            bs,
            vec![vec![[0.2, 0.0]]],
        )
        .unwrap();
        let pilots = make_pilots(&cfg, &mut stream(4, "p", 0)).unwrap();
        let mut ch = sample_channels(&cfg, 0, &mut stream(4, "ch", 0));
        ch.training_noise.fill(C64::from(0.0));
        let a = received_training(&near, &pilots, &ch).unwrap();
        let b = received_training(&double, &pilots, &ch).unwrap();
        assert!((a * C64::from(2f64.sqrt()) - b).iter().all(|x| x.norm() < 1e-14));
    }

    /// Antenna-by-antenna, symbol-by-symbol evaluation of the observation.
    fn scalar_loop_observation(dep: &Deployment, pilots: &PilotSet, ch: &ChannelRealization) -> CMatrix {
        let i = ch.receiver;
        let (n_ant, tau) = ch.training_noise.shape();
        let mut y = CMatrix::zeros(n_ant, tau);
        for n in 0..n_ant {
            for t in 0..tau {
                let mut acc = ch.training_noise[(n, t)];
                for j in 0..dep.cells() {
                    for k in 0..dep.users_in(j) {
                        acc += ch.h[j][(n, k)] * dep.rho(k, j, i).sqrt() * pilots.pilot(k, j)[(t, 0)];
                    }
                }
                y[(n, t)] = acc;
            }
        }
        y
    }

    #[test]
    fn observation_matches_scalar_loop() {
        let cfg = small(PilotScheme::Dop).with_cells(7);
        let cfg = SystemConfig { users: vec![2; 7], ..cfg };
        let dep = build_deployment(&cfg, &mut stream(5, "dep", 0)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(5, "p", 0)).unwrap();
        let ch = sample_channels(&cfg, 0, &mut stream(5, "ch", 0));
        let fast = received_training(&dep, &pilots, &ch).unwrap();
        let slow = scalar_loop_observation(&dep, &pilots, &ch);
        assert!((fast - slow).iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn noiseless_single_cell_recovers_channel() {
        let (cfg, dep) = one_cell(1e-12, 5);
        let pilots = make_pilots(&cfg, &mut stream(6, "p", 0)).unwrap();
        let ch = sample_channels(&cfg, 0, &mut stream(6, "ch", 0));
        let y = received_training(&dep, &pilots, &ch).unwrap();
        let (hhat, htilde) = mmse_estimate(&y, 0, &dep, &pilots, &ch, cfg.sigma2).unwrap();
        assert!(htilde.norm() < 1e-5 * hhat.norm());
    }

    #[test]
    fn both_estimator_paths_agree() {
        for scheme in [PilotScheme::Dop, PilotScheme::Fpr] {
            let cfg = SystemConfig { antennas: 6, tau: 8, scheme, ..SystemConfig::default() }.with_uniform_users(3);
            let dep = build_deployment(&cfg, &mut stream(7, "dep", 0)).unwrap();
            let pilots = make_pilots(&cfg, &mut stream(7, "p", 0)).unwrap();
            let ch = sample_channels(&cfg, 0, &mut stream(7, "ch", 0));
            let est = estimate_cell(&dep, &pilots, &ch, cfg.sigma2).unwrap();
            let y = received_training(&dep, &pilots, &ch).unwrap();
            for k in 0..3 {
                let direct = contamination_form_estimate(k, &dep, &pilots, &ch, cfg.sigma2).unwrap();
                let (single, _) = mmse_estimate(&y, k, &dep, &pilots, &ch, cfg.sigma2).unwrap();
                assert!((&direct - est.hhat.column(k)).iter().all(|x| x.norm() < 1e-10));
                assert!((&single - est.hhat.column(k)).iter().all(|x| x.norm() < 1e-12));
            }
            assert!((&est.hhat + &est.htilde - &ch.h[0]).iter().all(|x| x.norm() < 1e-13));
        }
    }

    #[test]
    fn variances_lie_in_unit_interval() {
        let cfg = SystemConfig::default();
        let dep = build_deployment(&cfg, &mut stream(8, "dep", 0)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(8, "p", 0)).unwrap();
        for i in 0..7 {
            for k in 0..20 {
                let v = estimate_variance(k, i, &dep, &pilots, cfg.sigma2);
                assert!(v > 0.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let cfg = small(PilotScheme::Dop);
        let dep = build_deployment(&cfg, &mut stream(9, "dep", 0)).unwrap();
        let pilots = make_pilots(&cfg, &mut stream(9, "p", 0)).unwrap();
        let other = SystemConfig { tau: 5, ..cfg.clone() };
        let ch = sample_channels(&other, 0, &mut stream(9, "ch", 0));
        assert!(matches!(received_training(&dep, &pilots, &ch), Err(Error::Dimension(_))));
    }
}
