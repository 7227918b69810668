//! Large-system SINR limits and the moment inputs they consume.
//!
//! All formulas take their moments explicitly. Callers decide whether those
//! come from one deployment (empirical averages over the users of a cell) or
//! from the geometry ensemble (Monte-Carlo over uniform drops).

use rand::Rng;

use crate::config::SystemConfig;
use crate::geometry::{build_hex_layout, cell_hexagon, distance, path_gain, Deployment, Point};
use crate::par::collect_indexed;
use crate::rng::stream;
use crate::{to_db, CMatrix, Error, Result};

/// What the stored moments describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    /// Moments of the received powers `Γ_ji`.
    General,
    /// Moments of the normalized gains `L̄_ji`; own-cell entries are 1.
    PowerControlled,
}

/// Loading ratios and per-link first/second moments, indexed `[j][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    /// `K_j / N`.
    pub alpha: Vec<f64>,
    /// `K_j / tau`.
    pub kappa: Vec<f64>,
    /// `tau / N`.
    pub theta: f64,
    pub m1: Vec<Vec<f64>>,
    pub m2: Vec<Vec<f64>>,
    pub mode: MomentMode,
}

impl MomentSet {
    pub fn new(
        alpha: Vec<f64>,
        kappa: Vec<f64>,
        m1: Vec<Vec<f64>>,
        m2: Vec<Vec<f64>>,
        mode: MomentMode,
    ) -> Result<Self> {
        let cells = m1.len();
        if alpha.len() != cells || kappa.len() != cells || m2.len() != cells {
            return Err(Error::Dimension("moment tables and ratios disagree on L".into()));
        }
        if m1.iter().chain(&m2).any(|row| row.len() != cells) {
            return Err(Error::Dimension("moment tables must be L x L".into()));
        }
        let theta = if kappa[0] > 0.0 { alpha[0] / kappa[0] } else { 0.0 };
        let set = MomentSet { alpha, kappa, theta, m1, m2, mode };
        set.validate()?;
        Ok(set)
    }

    pub fn cells(&self) -> usize {
        self.m1.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (j, (&a, &k)) in self.alpha.iter().zip(&self.kappa).enumerate() {
            if !(a >= 0.0 && k >= 0.0) {
                return Err(Error::Config(format!("negative loading in cell {j}")));
            }
            if (a - k * self.theta).abs() > 1e-12 * a.max(1.0) {
                return Err(Error::Config(format!("alpha = kappa * theta violated in cell {j}")));
            }
        }
        for j in 0..self.cells() {
            for i in 0..self.cells() {
                let (a, b) = (self.m1[j][i], self.m2[j][i]);
                if !(a >= 0.0) || b < a * a * (1.0 - 1e-12) {
                    return Err(Error::Config(format!("moments ({a}, {b}) for link {j}->{i} violate Jensen")));
                }
            }
            if self.mode == MomentMode::PowerControlled && (self.m1[j][j] != 1.0 || self.m2[j][j] != 1.0) {
                return Err(Error::Config(format!("own-cell normalized moments of cell {j} must be 1")));
            }
        }
        Ok(())
    }

    /// Ratios `K_j/N`, `K_j/tau` of a configuration.
    pub fn ratios(config: &SystemConfig) -> (Vec<f64>, Vec<f64>) {
        let n = config.antennas as f64;
        let tau = config.tau as f64;
        (
            config.users.iter().map(|&k| k as f64 / n).collect(),
            config.users.iter().map(|&k| k as f64 / tau).collect(),
        )
    }

    /// Empirical moments of the received powers of one deployment.
    pub fn from_deployment(config: &SystemConfig, deployment: &Deployment) -> Result<Self> {
        let cells = deployment.cells();
        let mut m1 = vec![vec![0.0; cells]; cells];
        let mut m2 = vec![vec![0.0; cells]; cells];
        for j in 0..cells {
            let kj = deployment.users_in(j) as f64;
            for i in 0..cells {
                let g = deployment.gamma_diag(j, i);
                m1[j][i] = g.iter().sum::<f64>() / kj;
                m2[j][i] = g.iter().map(|x| x * x).sum::<f64>() / kj;
            }
        }
        let (alpha, kappa) = Self::ratios(config);
        Self::new(alpha, kappa, m1, m2, MomentMode::General)
    }

    /// Empirical moments of the normalized gains of one deployment.
    pub fn normalized_from_deployment(config: &SystemConfig, deployment: &Deployment) -> Result<Self> {
        let cells = deployment.cells();
        let mut m1 = vec![vec![0.0; cells]; cells];
        let mut m2 = vec![vec![0.0; cells]; cells];
        for j in 0..cells {
            let kj = deployment.users_in(j);
            for i in 0..cells {
                if i == j {
                    m1[j][i] = 1.0;
                    m2[j][i] = 1.0;
                    continue;
                }
                let vals: Vec<f64> = (0..kj).map(|k| deployment.ellbar(k, j, i)).collect();
                m1[j][i] = vals.iter().sum::<f64>() / kj as f64;
                m2[j][i] = vals.iter().map(|x| x * x).sum::<f64>() / kj as f64;
            }
        }
        let (alpha, kappa) = Self::ratios(config);
        Self::new(alpha, kappa, m1, m2, MomentMode::PowerControlled)
    }

    /// Ensemble moments `E[L̄_ji]`, `E[L̄_ji²]` over `n_samples` uniform drops per cell.
    pub fn ensemble<R: Rng + ?Sized>(config: &SystemConfig, n_samples: usize, rng: &mut R) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Empty("ensemble moments need at least one sample"));
        }
        config.validate()?;
        let bs = build_hex_layout(config)?;
        let sums = (0..bs.len())
            .map(|j| accumulate_drops(config, &bs, j, n_samples, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sums(config, sums, n_samples)
    }

    /// [`MomentSet::ensemble`] split into independent seeded chunks, evaluated
    /// in parallel and reduced in a fixed order.
    pub fn ensemble_seeded(config: &SystemConfig, n_samples: usize, seed: u64) -> Result<Self> {
        const CHUNK: usize = 1 << 16;
        if n_samples == 0 {
            return Err(Error::Empty("ensemble moments need at least one sample"));
        }
        config.validate()?;
        let bs = build_hex_layout(config)?;
        let chunks = n_samples.div_ceil(CHUNK);
        let parts = collect_indexed(bs.len() * chunks, |idx| {
            let (j, c) = (idx / chunks, idx % chunks);
            let n = CHUNK.min(n_samples - c * CHUNK);
            accumulate_drops(config, &bs, j, n, &mut stream(seed, "moments", idx as u64))
        });
        let mut sums = vec![(vec![0.0; bs.len()], vec![0.0; bs.len()]); bs.len()];
        for (idx, part) in parts.into_iter().enumerate() {
            let (s1, s2) = part?;
            let acc = &mut sums[idx / chunks];
            for i in 0..bs.len() {
                acc.0[i] += s1[i];
                acc.1[i] += s2[i];
            }
        }
        Self::from_sums(config, sums, n_samples)
    }

    fn from_sums(config: &SystemConfig, sums: Vec<(Vec<f64>, Vec<f64>)>, n_samples: usize) -> Result<Self> {
        let cells = sums.len();
        let mut m1 = vec![vec![0.0; cells]; cells];
        let mut m2 = vec![vec![0.0; cells]; cells];
        for (j, (s1, s2)) in sums.into_iter().enumerate() {
            for i in 0..cells {
                if i == j {
                    m1[j][i] = 1.0;
                    m2[j][i] = 1.0;
                } else {
                    m1[j][i] = s1[i] / n_samples as f64;
                    m2[j][i] = s2[i] / n_samples as f64;
                }
            }
        }
        let (alpha, kappa) = Self::ratios(config);
        Self::new(alpha, kappa, m1, m2, MomentMode::PowerControlled)
    }

    /// Same moments under uniform loading `alpha`, `kappa` in every cell.
    pub fn with_loading(&self, alpha: f64, kappa: f64) -> Self {
        let cells = self.cells();
        MomentSet {
            alpha: vec![alpha; cells],
            kappa: vec![kappa; cells],
            theta: if kappa > 0.0 { alpha / kappa } else { 0.0 },
            ..self.clone()
        }
    }

    /// Power-controlled moments expressed as received-power moments for a
    /// target `pu`: `Γ = pu L̄`.
    pub fn to_received_power(&self, pu: f64) -> Self {
        let scale = |t: &Vec<Vec<f64>>, s: f64| t.iter().map(|r| r.iter().map(|x| x * s).collect()).collect();
        MomentSet { m1: scale(&self.m1, pu), m2: scale(&self.m2, pu * pu), mode: MomentMode::General, ..self.clone() }
    }

    /// `sum_{j != i} E[·_ji]` of the first moments.
    pub fn cross_mean_sum(&self, i: usize) -> f64 {
        (0..self.cells()).filter(|&j| j != i).map(|j| self.m1[j][i]).sum()
    }

    /// `sum_{j != i} E[·_ji²]`.
    pub fn cross_square_sum(&self, i: usize) -> f64 {
        (0..self.cells()).filter(|&j| j != i).map(|j| self.m2[j][i]).sum()
    }

    /// `sum_j E[·_ji]`.
    pub fn mean_sum(&self, i: usize) -> f64 {
        (0..self.cells()).map(|j| self.m1[j][i]).sum()
    }
}

/// Sums of `l̄_ji` and `l̄_ji²` over `n` uniform drops in cell `j`.
fn accumulate_drops<R: Rng + ?Sized>(
    config: &SystemConfig,
    bs: &[Point],
    j: usize,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let hex = cell_hexagon(config, bs[j]);
    let mut s1 = vec![0.0; bs.len()];
    let mut s2 = vec![0.0; bs.len()];
    for _ in 0..n {
        let u = hex.sample(rng);
        let own = path_gain(distance(u, bs[j]), config.zeta)?;
        for i in (0..bs.len()).filter(|&i| i != j) {
            let v = path_gain(distance(u, bs[i]), config.zeta)? / own;
            s1[i] += v;
            s2[i] += v * v;
        }
    }
    Ok((s1, s2))
}

/// Limiting SINR; infinite when every denominator term vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sinr {
    Finite(f64),
    Infinite,
}

impl Sinr {
    fn ratio(num: f64, den: f64) -> Self {
        if den > 0.0 {
            Sinr::Finite(num / den)
        } else {
            Sinr::Infinite
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Sinr::Finite(v) => v,
            Sinr::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Sinr::Finite(v) => Some(v),
            Sinr::Infinite => None,
        }
    }

    pub fn db(&self) -> Option<f64> {
        self.finite().map(to_db)
    }
}

/// A limiting SINR together with the limiting estimate variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrLimit {
    pub sinr: Sinr,
    pub upsilon: f64,
}

/// Intra- plus inter-cell interference power `sum_j alpha_j E[Γ_ji]`. The same
/// term appears for both pilot schemes.
pub fn total_interference(i: usize, moments: &MomentSet) -> f64 {
    (0..moments.cells()).map(|j| moments.alpha[j] * moments.m1[j][i]).sum()
}

/// `sum_{j != i} kappa_j E[·_ji]` and `sum_{j != i} kappa_j E[·_ji²]`.
fn weighted_contamination(i: usize, moments: &MomentSet) -> (f64, f64) {
    (0..moments.cells()).filter(|&j| j != i).fold((0.0, 0.0), |(a, b), j| {
        (a + moments.kappa[j] * moments.m1[j][i], b + moments.kappa[j] * moments.m2[j][i])
    })
}

fn require_mode(moments: &MomentSet, mode: MomentMode) -> Result<()> {
    if moments.mode != mode {
        return Err(Error::Config(format!("expected {mode:?} moments, got {:?}", moments.mode)));
    }
    Ok(())
}

/// DOP limit for a user of cell `i` with own received power `rho_kii`.
pub fn dop_limit_sinr(rho_kii: f64, i: usize, moments: &MomentSet, sigma2: f64) -> Result<SinrLimit> {
    require_mode(moments, MomentMode::General)?;
    let (mean_c, square_c) = weighted_contamination(i, moments);
    let upsilon = rho_kii / (rho_kii + mean_c + sigma2);
    let den = rho_kii * total_interference(i, moments) + upsilon * square_c;
    Ok(SinrLimit { sinr: Sinr::ratio(rho_kii * rho_kii * upsilon, den), upsilon })
}

/// FPR limit; `rho_row[j]` is `rho_kji` for the user's co-pilot user in cell `j`
/// (`rho_row[i]` is the user's own received power).
pub fn fpr_limit_sinr(rho_row: &[f64], i: usize, moments: &MomentSet, sigma2: f64) -> Result<SinrLimit> {
    require_mode(moments, MomentMode::General)?;
    if rho_row.len() != moments.cells() {
        return Err(Error::Dimension(format!("{} received powers for {} cells", rho_row.len(), moments.cells())));
    }
    let own = rho_row[i];
    let upsilon = own / (rho_row.iter().sum::<f64>() + sigma2);
    let cross_sq: f64 = rho_row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r * r).sum();
    let den = own * total_interference(i, moments) + upsilon * cross_sq;
    Ok(SinrLimit { sinr: Sinr::ratio(own * own * upsilon, den), upsilon })
}

/// Power-controlled DOP limit; identical for every user of the cell.
pub fn dop_pc_limit_sinr(i: usize, moments: &MomentSet, sigma2_over_pu: f64) -> Result<SinrLimit> {
    require_mode(moments, MomentMode::PowerControlled)?;
    let (mean_c, square_c) = weighted_contamination(i, moments);
    let upsilon = 1.0 / (1.0 + mean_c + sigma2_over_pu);
    let den = total_interference(i, moments) + upsilon * square_c;
    Ok(SinrLimit { sinr: Sinr::ratio(upsilon, den), upsilon })
}

/// Power-controlled FPR limit for one realization `ellbar_row[j] = l̄_kji`.
pub fn fpr_pc_limit_sinr(ellbar_row: &[f64], i: usize, moments: &MomentSet, sigma2_over_pu: f64) -> Result<SinrLimit> {
    require_mode(moments, MomentMode::PowerControlled)?;
    if ellbar_row.len() != moments.cells() {
        return Err(Error::Dimension(format!("{} gains for {} cells", ellbar_row.len(), moments.cells())));
    }
    if ellbar_row[i] != 1.0 {
        return Err(Error::Domain(format!("own normalized gain must be 1, got {}", ellbar_row[i])));
    }
    let (sum, sum_sq) = ellbar_row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .fold((0.0, 0.0), |(a, b), (_, &v)| (a + v, b + v * v));
    let upsilon = 1.0 / (1.0 + sum + sigma2_over_pu);
    let den = total_interference(i, moments) + upsilon * sum_sq;
    Ok(SinrLimit { sinr: Sinr::ratio(upsilon, den), upsilon })
}

/// Vanishing-load limit `rho_kii² tau / sum rho_mji²` over all inter-cell users.
pub fn massive_mimo_limit<I: IntoIterator<Item = f64>>(rho_kii: f64, inter_cell_powers: I, tau: usize) -> Result<Sinr> {
    if tau == 0 {
        return Err(Error::Domain("tau must be at least 1".into()));
    }
    let contamination: f64 = inter_cell_powers.into_iter().map(|r| r * r).sum::<f64>() / tau as f64;
    Ok(Sinr::ratio(rho_kii * rho_kii, contamination))
}

/// [`massive_mimo_limit`] for user `k` of cell `i` in a deployment.
pub fn massive_mimo_limit_for(deployment: &Deployment, k: usize, i: usize, tau: usize) -> Result<Sinr> {
    let powers = (0..deployment.cells())
        .filter(|&j| j != i)
        .flat_map(|j| (0..deployment.users_in(j)).map(move |m| (m, j)))
        .map(|(m, j)| deployment.rho(m, j, i));
    massive_mimo_limit(deployment.rho(k, i, i), powers, tau)
}

/// First two spectral moments of `(1/N) H Γ H^H`:
/// `(1/N) Tr(·)` and `(1/N) Tr((·)²)`.
pub fn wishart_moments(h: &CMatrix, gamma: &[f64]) -> (f64, f64) {
    let n = h.nrows() as f64;
    let gram = h.adjoint() * h;
    let mut first = 0.0;
    let mut second = 0.0;
    for (k, &gk) in gamma.iter().enumerate() {
        first += gk * gram[(k, k)].re;
        for (m, &gm) in gamma.iter().enumerate() {
            second += gk * gm * gram[(k, m)].norm_sqr();
        }
    }
    (first / (n * n), second / (n * n * n))
}

/// Normalized cross gains `l̄_kji` (`j != i`) of one co-pilot user per
/// interfering cell, each uniform over its own hexagon; entry `i` is 1.
pub fn sample_copilot_gains<R: Rng + ?Sized>(config: &SystemConfig, i: usize, rng: &mut R) -> Result<Vec<f64>> {
    let bs = build_hex_layout(config)?;
    (0..bs.len())
        .map(|j| {
            if j == i {
                return Ok(1.0);
            }
            let u = cell_hexagon(config, bs[j]).sample(rng);
            Ok(path_gain(distance(u, bs[i]), config.zeta)? / path_gain(distance(u, bs[j]), config.zeta)?)
        })
        .collect()
}
