//! Matched-filter reception with the channel estimate as combiner.

use crate::geometry::Deployment;
use crate::randmat::ChannelRealization;
use crate::training::EstimateSet;
use crate::{to_db, CVector, Error, Result};

/// Finite-size SINR of one user, with its parts kept apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub gamma: f64,
    /// `rho_kii ||hhat||^4`.
    pub numerator: f64,
    /// `rho_kii |hhat^H htilde|^2`.
    pub self_interference: f64,
    /// Intra- and inter-cell terms, excluding the user itself.
    pub interference: f64,
    /// `sigma2 ||hhat||^2`.
    pub noise: f64,
}

impl SinrSample {
    fn assemble(k: usize, cell: usize, numerator: f64, self_interference: f64, interference: f64, noise: f64) -> Result<Self> {
        let denominator = self_interference + interference + noise;
        if numerator == 0.0 || !(denominator > 0.0) {
            return Err(Error::DegenerateEstimate { user: k, cell });
        }
        Ok(SinrSample { gamma: numerator / denominator, numerator, self_interference, interference, noise })
    }
}

/// SINR of user `k` in the estimates' cell.
pub fn empirical_sinr(
    k: usize,
    estimates: &EstimateSet,
    channels: &ChannelRealization,
    deployment: &Deployment,
    sigma2: f64,
) -> Result<SinrSample> {
    let i = estimates.cell;
    let hhat = estimates.hhat.column(k);
    let energy = hhat.norm_squared();
    if energy == 0.0 {
        return Err(Error::DegenerateEstimate { user: k, cell: i });
    }
    let own = deployment.rho(k, i, i);
    let numerator = own * energy * energy;
    let self_interference = own * hhat.dotc(&estimates.htilde.column(k)).norm_sqr();
    let mut interference = 0.0;
    for (j, h) in channels.h.iter().enumerate() {
        for m in 0..h.ncols() {
            if (j, m) != (i, k) {
                interference += deployment.rho(m, j, i) * hhat.dotc(&h.column(m)).norm_sqr();
            }
        }
    }
    SinrSample::assemble(k, i, numerator, self_interference, interference, sigma2 * energy)
}

/// SINR of every user in the estimates' cell, using one Gram product per cell.
pub fn cell_sinr(
    estimates: &EstimateSet,
    channels: &ChannelRealization,
    deployment: &Deployment,
    sigma2: f64,
) -> Result<Vec<SinrSample>> {
    let i = estimates.cell;
    let users = estimates.hhat.ncols();
    let mut interference = vec![0.0; users];
    let adj = estimates.hhat.adjoint();
    for (j, h) in channels.h.iter().enumerate() {
        let gram = &adj * h;
        for m in 0..h.ncols() {
            let rho = deployment.rho(m, j, i);
            for (k, acc) in interference.iter_mut().enumerate() {
                if (j, m) != (i, k) {
                    *acc += rho * gram[(k, m)].norm_sqr();
                }
            }
        }
    }
    (0..users)
        .map(|k| {
            let hhat = estimates.hhat.column(k);
            let energy = hhat.norm_squared();
            let own = deployment.rho(k, i, i);
            let xi = own * hhat.dotc(&estimates.htilde.column(k)).norm_sqr();
            SinrSample::assemble(k, i, own * energy * energy, xi, interference[k], sigma2 * energy)
        })
        .collect()
}

/// SINR of user `k` for an arbitrary combiner, with `hhat` as the useful
/// signal and `htilde` as self-noise. With `combiner = hhat` this is
/// [`empirical_sinr`]; any positive multiple of `hhat` gives the same value.
pub fn combiner_sinr(
    k: usize,
    combiner: &CVector,
    estimates: &EstimateSet,
    channels: &ChannelRealization,
    deployment: &Deployment,
    sigma2: f64,
) -> Result<SinrSample> {
    let i = estimates.cell;
    let own = deployment.rho(k, i, i);
    let numerator = own * combiner.dotc(&estimates.hhat.column(k)).norm_sqr();
    let self_interference = own * combiner.dotc(&estimates.htilde.column(k)).norm_sqr();
    let mut interference = 0.0;
    for (j, h) in channels.h.iter().enumerate() {
        for m in 0..h.ncols() {
            if (j, m) != (i, k) {
                interference += deployment.rho(m, j, i) * combiner.dotc(&h.column(m)).norm_sqr();
            }
        }
    }
    SinrSample::assemble(k, i, numerator, self_interference, interference, sigma2 * combiner.norm_squared())
}

/// Where trial SINRs are averaged before reporting in dB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AvgDomain {
    /// `10 log10(mean(gamma))`.
    #[default]
    Linear,
    /// `mean(10 log10(gamma))`.
    Db,
}

impl AvgDomain {
    pub fn as_str(&self) -> &'static str {
        match self {
            AvgDomain::Linear => "linear",
            AvgDomain::Db => "db",
        }
    }
}

impl std::str::FromStr for AvgDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(AvgDomain::Linear),
            "db" => Ok(AvgDomain::Db),
            other => Err(Error::Config(format!("unknown averaging domain `{other}` (expected linear or db)"))),
        }
    }
}

/// Average of linear SINR samples, reported in dB.
pub fn average_sinr_db(samples: &[f64], domain: AvgDomain) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("no SINR samples to average"));
    }
    let n = samples.len() as f64;
    Ok(match domain {
        AvgDomain::Linear => to_db(samples.iter().sum::<f64>() / n),
        AvgDomain::Db => samples.iter().map(|&g| to_db(g)).sum::<f64>() / n,
    })
}
