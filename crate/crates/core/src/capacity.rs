//! User capacity under power control: the largest cell loading `alpha` for
//! which users meet an SINR threshold.
//!
//! All solvers assume the same number of users in every cell. The general
//! asymmetric constraint is only exposed as a feasibility check.

use rand::Rng;

use crate::asymptotics::{dop_pc_limit_sinr, fpr_pc_limit_sinr, MomentMode, MomentSet};
use crate::{from_db, Error, Result};

/// Threshold, loading parameters and moments for one capacity question about
/// cell `cell`.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityQuery {
    /// Linear SINR threshold.
    pub gamma_th: f64,
    /// `tau / N`, used by the fixed-tau solver.
    pub theta: f64,
    /// `K / tau`, used by the fixed-kappa solver.
    pub kappa: f64,
    /// Tolerated outage probability for FPR.
    pub beta: f64,
    pub sigma2_over_pu: f64,
    pub moments: MomentSet,
    pub cell: usize,
}

impl CapacityQuery {
    pub fn new(moments: MomentSet, cell: usize, gamma_th: f64, sigma2_over_pu: f64) -> Result<Self> {
        let q = CapacityQuery { gamma_th, theta: 1.0, kappa: 1.0, beta: 0.05, sigma2_over_pu, moments, cell };
        q.validate()?;
        Ok(q)
    }

    pub fn with_theta(self, theta: f64) -> Self {
        CapacityQuery { theta, ..self }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        CapacityQuery { kappa, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        CapacityQuery { beta, ..self }
    }

    pub fn with_gamma_db(self, db: f64) -> Self {
        CapacityQuery { gamma_th: from_db(db), ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_th > 0.0) {
            return Err(Error::Config(format!("gamma_th must be positive, got {}", self.gamma_th)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Config(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.theta > 0.0) {
            return Err(Error::Config(format!("theta must be positive, got {}", self.theta)));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::Config(format!("kappa must lie in (0, 1], got {}", self.kappa)));
        }
        if !(self.sigma2_over_pu >= 0.0) {
            return Err(Error::Config(format!("sigma2/Pu must be non-negative, got {}", self.sigma2_over_pu)));
        }
        if self.moments.mode != MomentMode::PowerControlled {
            return Err(Error::Config("capacity needs power-controlled moments".into()));
        }
        if self.cell >= self.moments.cells() {
            return Err(Error::Dimension(format!("cell {} of {}", self.cell, self.moments.cells())));
        }
        Ok(())
    }

    /// `sum_j E[L̄_ji]`, own cell included; the own-cell term is 1.
    pub fn total_mean(&self) -> f64 {
        1.0 + self.cross_mean()
    }

    /// `sum_{j != i} E[L̄_ji]`.
    pub fn cross_mean(&self) -> f64 {
        self.moments.cross_mean_sum(self.cell)
    }

    /// `sum_{j != i} E[L̄_ji²]`.
    pub fn cross_square(&self) -> f64 {
        self.moments.cross_square_sum(self.cell)
    }

    /// Coefficients `(A, B)` of `A kappa² + B kappa - 1/gamma_th <= 0`.
    pub fn quadratic(&self) -> (f64, f64) {
        let total = self.total_mean();
        let a = self.theta * total * self.cross_mean();
        let b = self.theta * (1.0 + self.sigma2_over_pu) * total + self.cross_square();
        (a, b)
    }

    /// Left side minus right side of the DOP capacity inequality at
    /// `alpha = kappa theta`; non-positive means the threshold is met.
    pub fn dop_slack(&self, kappa: f64, theta: f64) -> f64 {
        let alpha = kappa * theta;
        alpha * self.total_mean() * (1.0 + kappa * self.cross_mean() + self.sigma2_over_pu) + kappa * self.cross_square()
            - 1.0 / self.gamma_th
    }
}

/// Largest `K / tau` in `(0, 1]` meeting the threshold for fixed `theta`.
pub fn kappa_tau(query: &CapacityQuery) -> f64 {
    let (a, b) = query.quadratic();
    let inv = 1.0 / query.gamma_th;
    if inv > a + b {
        return 1.0;
    }
    if a == 0.0 {
        return (inv / b).min(1.0);
    }
    // stable form of (-b + sqrt(b² + 4a/g)) / (2a)
    2.0 * inv / (b + (b * b + 4.0 * a * inv).sqrt())
}

pub fn alpha_tau(query: &CapacityQuery) -> f64 {
    kappa_tau(query) * query.theta
}

/// Fixed-kappa capacity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaCapacity {
    pub alpha: f64,
    /// The contamination floor alone already violates the threshold.
    pub infeasible: bool,
}

pub fn alpha_kappa(query: &CapacityQuery) -> KappaCapacity {
    let headroom = 1.0 / query.gamma_th - query.kappa * query.cross_square();
    if headroom < 0.0 {
        return KappaCapacity { alpha: 0.0, infeasible: true };
    }
    let inv_upsilon = 1.0 + query.kappa * query.cross_mean() + query.sigma2_over_pu;
    KappaCapacity { alpha: headroom / (query.total_mean() * inv_upsilon), infeasible: false }
}

/// Capacity when every pilot dimension carries a user (`kappa = 1`).
pub fn worst_case_alpha(query: &CapacityQuery) -> f64 {
    let s1 = query.cross_mean();
    ((1.0 / query.gamma_th - query.cross_square()) / ((1.0 + s1) * (1.0 + s1 + query.sigma2_over_pu))).max(0.0)
}

/// Largest loading for which one FPR realization still meets the threshold.
pub fn fpr_realization_cap(query: &CapacityQuery, ellbar_row: &[f64]) -> f64 {
    let (sum, sum_sq) = ellbar_row
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != query.cell)
        .fold((0.0, 0.0), |(a, b), (_, &v)| (a + v, b + v * v));
    ((1.0 / query.gamma_th - sum_sq) / (query.total_mean() * (1.0 + query.sigma2_over_pu + sum))).max(0.0)
}

/// Empirical `beta`-quantile of per-realization caps: the largest `alpha`
/// that at least a `1 - beta` fraction of realizations support.
pub fn outage_quantile(caps: &[f64], beta: f64) -> Result<f64> {
    if caps.is_empty() {
        return Err(Error::Empty("no realizations for the outage quantile"));
    }
    let mut sorted = caps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let needed = n - (beta * n as f64 + 1e-9).floor() as usize;
    Ok(sorted[n - needed])
}

/// FPR outage capacity from pre-drawn normalized gain rows.
pub fn fpr_outage_capacity_from_samples(query: &CapacityQuery, rows: &[Vec<f64>]) -> Result<f64> {
    let caps: Vec<f64> = rows.iter().map(|r| fpr_realization_cap(query, r)).collect();
    outage_quantile(&caps, query.beta)
}

/// FPR outage capacity with `n_samples` rows drawn from `sampler`.
pub fn fpr_outage_capacity<R, F>(query: &CapacityQuery, mut sampler: F, n_samples: usize, rng: &mut R) -> Result<f64>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<Vec<f64>>,
{
    let rows = (0..n_samples).map(|_| sampler(rng)).collect::<Result<Vec<_>>>()?;
    fpr_outage_capacity_from_samples(query, &rows)
}

/// Which capacity a sweep evaluates.
#[derive(Debug, Clone, Copy)]
pub enum Solver<'a> {
    FixedTau,
    FixedKappa,
    /// Outage capacity over a fixed set of gain rows, reused at every grid point.
    FprOutage(&'a [Vec<f64>]),
}

/// One point of a capacity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityPoint {
    pub gamma_th_db: f64,
    pub alpha: f64,
    pub infeasible: bool,
}

pub fn capacity_sweep(template: &CapacityQuery, solver: Solver<'_>, grid_db: &[f64]) -> Result<Vec<CapacityPoint>> {
    template.validate()?;
    grid_db
        .iter()
        .map(|&db| {
            let q = template.clone().with_gamma_db(db);
            let (alpha, infeasible) = match solver {
                Solver::FixedTau => (alpha_tau(&q), false),
                Solver::FixedKappa => {
                    let c = alpha_kappa(&q);
                    (c.alpha, c.infeasible)
                }
                Solver::FprOutage(rows) => (fpr_outage_capacity_from_samples(&q, rows)?, false),
            };
            Ok(CapacityPoint { gamma_th_db: db, alpha, infeasible })
        })
        .collect()
}

/// Whether per-cell loadings `alpha[j]` (with `kappa_j = alpha_j / theta`)
/// meet `gamma_th` at every cell under DOP.
pub fn dop_loading_feasible(
    moments: &MomentSet,
    alpha: &[f64],
    theta: f64,
    gamma_th: f64,
    sigma2_over_pu: f64,
) -> Result<bool> {
    if alpha.len() != moments.cells() {
        return Err(Error::Dimension(format!("{} loadings for {} cells", alpha.len(), moments.cells())));
    }
    if !(theta > 0.0) {
        return Err(Error::Config(format!("theta must be positive, got {theta}")));
    }
    let loaded = MomentSet {
        alpha: alpha.to_vec(),
        kappa: alpha.iter().map(|a| a / theta).collect(),
        theta,
        ..moments.clone()
    };
    for i in 0..moments.cells() {
        let sinr = dop_pc_limit_sinr(i, &loaded, sigma2_over_pu)?.sinr.value();
        if sinr < gamma_th * (1.0 - 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Direct outage probability `P(gamma^{s,p} < gamma_th)` at loading `alpha`.
pub fn fpr_outage_probability(query: &CapacityQuery, alpha: f64, rows: &[Vec<f64>]) -> Result<f64> {
    let loaded = query.moments.with_loading(alpha, 1.0);
    let mut fails = 0usize;
    for row in rows {
        if fpr_pc_limit_sinr(row, query.cell, &loaded, query.sigma2_over_pu)?.sinr.value() < query.gamma_th {
            fails += 1;
        }
    }
    Ok(fails as f64 / rows.len() as f64)
}
