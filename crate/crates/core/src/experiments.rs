//! End-to-end drivers for the four reference experiments.
//!
//! Every random draw comes from a stream keyed by the master seed, a purpose
//! label and an index, so results do not depend on thread count or
//! scheduling.

use std::fmt;
use std::str::FromStr;

use crate::asymptotics::{
    dop_limit_sinr, dop_pc_limit_sinr, fpr_pc_limit_sinr, massive_mimo_limit_for, sample_copilot_gains, MomentSet,
};
use crate::capacity::{alpha_kappa, capacity_sweep, fpr_outage_capacity_from_samples, CapacityQuery, Solver};
use crate::config::{PowerMode, SystemConfig};
use crate::geometry::{build_deployment, Deployment};
use crate::par::collect_indexed;
use crate::randmat::{make_pilots, sample_channels};
use crate::rng::{fnv1a64, stream};
use crate::training::estimate_cell;
use crate::uplink::{average_sinr_db, cell_sinr, AvgDomain};
use crate::{to_db, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentName {
    SinrVsN,
    CdfCompare,
    CapacityTheta,
    CapacityKappa,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 4] =
        [ExperimentName::SinrVsN, ExperimentName::CdfCompare, ExperimentName::CapacityTheta, ExperimentName::CapacityKappa];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::SinrVsN => "sinr_vs_n",
            ExperimentName::CdfCompare => "cdf_compare",
            ExperimentName::CapacityTheta => "capacity_theta",
            ExperimentName::CapacityKappa => "capacity_kappa",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.as_str() == s.trim()).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.as_str()).collect();
            Error::Config(format!("unknown experiment `{s}` (valid: {})", names.join(", ")))
        })
    }
}

/// Parameter grids. Each experiment reads only the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Antenna counts for the SINR-versus-N curve.
    pub n_list: Vec<usize>,
    /// Training loadings `K/tau`.
    pub kappa_list: Vec<f64>,
    /// `tau/N` values for the fixed-tau capacity.
    pub theta_list: Vec<f64>,
    /// SINR thresholds in dB.
    pub gamma_db: Vec<f64>,
    /// Cell loading `K/N` used by the CDF comparison.
    pub alpha: f64,
    /// Outage probability for FPR capacity.
    pub beta: f64,
    /// Independent FPR gain realizations.
    pub realizations: usize,
    /// Uniform drops per cell behind the ensemble moments.
    pub moment_samples: usize,
    /// Antenna count used to turn a loading gap into a user count.
    pub headline_antennas: usize,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            n_list: (1..=10).map(|i| 50 * i).collect(),
            kappa_list: vec![1.0 / 3.0, 2.0 / 3.0, 1.0],
            theta_list: vec![0.5, 1.0, 1.5],
            gamma_db: (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect(),
            alpha: 0.1,
            beta: 0.05,
            realizations: 10_000,
            moment_samples: 1_000_000,
            headline_antennas: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub config: SystemConfig,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Sweep,
    /// Where SINR trials are averaged before conversion to dB.
    pub avg_domain: AvgDomain,
    /// Redraw user positions in every trial instead of once per grid point.
    pub redraw_geometry: bool,
}

impl ExperimentSpec {
    /// Reference settings for `name`.
    pub fn preset(name: ExperimentName) -> Self {
        let mut sweep = Sweep::default();
        if name == ExperimentName::CapacityKappa {
            sweep.kappa_list = vec![0.5, 1.0];
        }
        ExperimentSpec {
            name,
            config: SystemConfig::default(),
            trials: 500,
            seed: 1,
            sweep,
            avg_domain: AvgDomain::Linear,
            redraw_geometry: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let s = &self.sweep;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let empty = match self.name {
            ExperimentName::SinrVsN => s.n_list.is_empty(),
            ExperimentName::CdfCompare => s.kappa_list.is_empty(),
            ExperimentName::CapacityTheta => s.theta_list.is_empty() || s.gamma_db.is_empty(),
            ExperimentName::CapacityKappa => s.kappa_list.is_empty() || s.gamma_db.is_empty(),
        };
        if empty {
            return Err(Error::Config(format!("empty parameter grid for {}", self.name)));
        }
        if s.n_list.contains(&0) {
            return Err(Error::Config("n_list entries must be positive".into()));
        }
        if s.kappa_list.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
            return Err(Error::Config("kappa_list entries must lie in (0, 1]".into()));
        }
        if s.theta_list.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::Config("theta_list entries must be positive".into()));
        }
        if !(s.beta > 0.0 && s.beta < 1.0) {
            return Err(Error::Config(format!("beta must lie in (0, 1), got {}", s.beta)));
        }
        if !(s.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {}", s.alpha)));
        }
        if s.realizations == 0 || s.moment_samples == 0 {
            return Err(Error::Config("realizations and moment_samples must be positive".into()));
        }
        if self.name != ExperimentName::SinrVsN && self.config.power != PowerMode::Controlled {
            return Err(Error::Config(format!("{} requires power control", self.name)));
        }
        Ok(())
    }
}

/// Named numeric columns of equal length plus free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    /// File stem of the table.
    pub name: String,
    pub columns: Vec<(String, Vec<f64>)>,
    pub meta: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(name: impl Into<String>) -> Self {
        ResultTable { name: name.into(), ..Default::default() }
    }

    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if let Some((first, col)) = self.columns.first() {
            if col.len() != values.len() {
                return Err(Error::Dimension(format!(
                    "column `{name}` has {} rows, `{first}` has {}",
                    values.len(),
                    col.len()
                )));
            }
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("column `{name}` holds non-finite value {bad}")));
        }
        self.columns.push((name, values));
        Ok(())
    }

    pub fn add_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |(_, c)| c.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Supplier of ensemble moments; lets callers cache the expensive integrals.
pub trait MomentSource: Sync {
    fn ensemble(&self, config: &SystemConfig, n_samples: usize, seed: u64) -> Result<MomentSet>;
}

/// Computes ensemble moments every time.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComputeMoments;

impl MomentSource for ComputeMoments {
    fn ensemble(&self, config: &SystemConfig, n_samples: usize, seed: u64) -> Result<MomentSet> {
        MomentSet::ensemble_seeded(config, n_samples, seed)
    }
}

/// Cache key for ensemble moments: everything the drops depend on.
pub fn moment_cache_key(config: &SystemConfig, n_samples: usize, seed: u64) -> String {
    let geometry = format!(
        "L={};spacing={:e};r={:e};orientation={};zeta={:e}",
        config.cells,
        config.bs_spacing,
        config.inner_radius,
        config.orientation.as_str(),
        config.zeta
    );
    format!("{:016x}-{n_samples}-{seed}", fnv1a64(&geometry))
}

/// Runs `spec`, returning its tables in a fixed order.
pub fn run_experiment(spec: &ExperimentSpec, moments: &dyn MomentSource) -> Result<Vec<ResultTable>> {
    spec.validate()?;
    match spec.name {
        ExperimentName::SinrVsN => Ok(vec![run_sinr_vs_n(spec)?]),
        ExperimentName::CdfCompare => run_cdf_compare(spec, moments),
        ExperimentName::CapacityTheta | ExperimentName::CapacityKappa => Ok(vec![run_capacity_sweeps(spec, moments)?]),
    }
}

struct TrialOutcome {
    sinr: Vec<f64>,
    excluded: usize,
    asymp: Option<f64>,
    massive: Option<f64>,
}

/// Centre-cell averages of the limiting SINRs for one deployment.
fn limits_for(config: &SystemConfig, dep: &Deployment) -> Result<(f64, f64)> {
    let moments = MomentSet::from_deployment(config, dep)?;
    let users = dep.users_in(0);
    let mut asymp = 0.0;
    let mut massive = 0.0;
    for k in 0..users {
        asymp += dop_limit_sinr(dep.rho(k, 0, 0), 0, &moments, config.sigma2)?.sinr.value();
        massive += massive_mimo_limit_for(dep, k, 0, config.tau)?.value();
    }
    Ok((asymp / users as f64, massive / users as f64))
}

fn run_trial(config: &SystemConfig, fixed: Option<&Deployment>, seed: u64, index: u64) -> Result<TrialOutcome> {
    let mut rng = stream(seed, "trial", index);
    let drawn;
    let dep = match fixed {
        Some(d) => d,
        None => {
            drawn = build_deployment(config, &mut rng)?;
            &drawn
        }
    };
    let pilots = make_pilots(config, &mut rng)?;
    let channels = sample_channels(config, 0, &mut rng);
    let estimates = estimate_cell(dep, &pilots, &channels, config.sigma2)?;
    let (sinr, excluded) = match cell_sinr(&estimates, &channels, dep, config.sigma2) {
        Ok(s) => (s.into_iter().map(|s| s.gamma).collect(), 0),
        Err(Error::DegenerateEstimate { .. }) => (Vec::new(), 1),
        Err(e) => return Err(e),
    };
    let (asymp, massive) = match fixed {
        Some(_) => (None, None),
        None => {
            let (a, m) = limits_for(config, dep)?;
            (Some(a), Some(m))
        }
    };
    Ok(TrialOutcome { sinr, excluded, asymp, massive })
}

/// Centre-cell SINR against antenna count: Monte-Carlo, large-system limit,
/// and vanishing-load limit, all in dB.
pub fn run_sinr_vs_n(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let mut n_col = Vec::new();
    let mut sim = Vec::new();
    let mut asymp = Vec::new();
    let mut massive = Vec::new();
    let mut excluded = 0;
    for (idx, &n) in spec.sweep.n_list.iter().enumerate() {
        let config = SystemConfig { antennas: n, ..spec.config.clone() };
        let fixed = if spec.redraw_geometry {
            None
        } else {
            Some(build_deployment(&config, &mut stream(spec.seed, "deployment", idx as u64))?)
        };
        let base = (idx as u64) << 32;
        let outcomes = collect_indexed(spec.trials, |t| run_trial(&config, fixed.as_ref(), spec.seed, base | t as u64))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let samples: Vec<f64> = outcomes.iter().flat_map(|o| o.sinr.iter().copied()).collect();
        excluded += outcomes.iter().map(|o| o.excluded).sum::<usize>();
        let (a, m) = match &fixed {
            Some(dep) => limits_for(&config, dep)?,
            None => {
                let len = outcomes.len() as f64;
                (
                    outcomes.iter().filter_map(|o| o.asymp).sum::<f64>() / len,
                    outcomes.iter().filter_map(|o| o.massive).sum::<f64>() / len,
                )
            }
        };
        n_col.push(n as f64);
        sim.push(average_sinr_db(&samples, spec.avg_domain)?);
        asymp.push(to_db(a));
        massive.push(to_db(m));
    }
    let mut table = ResultTable::new(spec.name.as_str());
    table.push_column("N", n_col)?;
    table.push_column("sim", sim)?;
    table.push_column("asymp", asymp)?;
    table.push_column("massive", massive)?;
    table.add_meta("scheme", spec.config.scheme.as_str());
    table.add_meta("trials", spec.trials);
    table.add_meta("avg_domain", spec.avg_domain.as_str());
    table.add_meta("redraw_geometry", spec.redraw_geometry);
    table.add_meta("excluded", excluded);
    Ok(table)
}

/// Normalized co-pilot gain rows seen by centre-cell users, one per realization.
pub fn sample_fpr_rows(config: &SystemConfig, count: usize, seed: u64, label: &str) -> Result<Vec<Vec<f64>>> {
    collect_indexed(count, |r| sample_copilot_gains(config, 0, &mut stream(seed, label, r as u64)))
        .into_iter()
        .collect()
}

/// Share of FPR realizations strictly below the DOP limit.
pub fn crossing_probability(fpr_sorted: &[f64], dop: f64) -> f64 {
    fpr_sorted.partition_point(|&g| g < dop) as f64 / fpr_sorted.len() as f64
}

/// Empirical CDF of the FPR limiting SINR and the DOP limits it is compared to.
pub fn run_cdf_compare(spec: &ExperimentSpec, source: &dyn MomentSource) -> Result<Vec<ResultTable>> {
    spec.validate()?;
    let config = &spec.config;
    let s2p = config.sigma2 / config.pu;
    let moments = source.ensemble(config, spec.sweep.moment_samples, spec.seed)?;
    let rows = sample_fpr_rows(config, spec.sweep.realizations, spec.seed, "cdf-rows")?;
    // the FPR limit does not depend on kappa
    let loaded = moments.with_loading(spec.sweep.alpha, 1.0);
    let mut fpr = rows
        .iter()
        .map(|row| fpr_pc_limit_sinr(row, 0, &loaded, s2p).map(|l| l.sinr.value()))
        .collect::<Result<Vec<_>>>()?;
    let infinite = fpr.iter().filter(|g| !g.is_finite()).count();
    fpr.retain(|g| g.is_finite());
    fpr.sort_by(f64::total_cmp);
    let n = fpr.len();
    if n == 0 {
        return Err(Error::Empty("every FPR realization had infinite SINR"));
    }

    let mut curve = ResultTable::new("cdf_fpr");
    curve.push_column("sinr_dB", fpr.iter().map(|&g| to_db(g)).collect())?;
    curve.push_column("cdf", (1..=n).map(|r| r as f64 / n as f64).collect())?;
    curve.add_meta("alpha", spec.sweep.alpha);
    curve.add_meta("realizations", spec.sweep.realizations);
    curve.add_meta("excluded", infinite);

    let mut dop = ResultTable::new("cdf_dop");
    let mut sinr_db = Vec::new();
    let mut crossing = Vec::new();
    for &kappa in &spec.sweep.kappa_list {
        let g = dop_pc_limit_sinr(0, &moments.with_loading(spec.sweep.alpha, kappa), s2p)?.sinr.value();
        sinr_db.push(to_db(g));
        crossing.push(crossing_probability(&fpr, g));
    }
    dop.push_column("kappa", spec.sweep.kappa_list.clone())?;
    dop.push_column("sinr_dB", sinr_db)?;
    dop.push_column("p_dop_better", crossing)?;
    dop.add_meta("alpha", spec.sweep.alpha);
    dop.add_meta("moment_samples", spec.sweep.moment_samples);
    Ok(vec![curve, dop])
}

fn label(prefix: &str, x: f64) -> String {
    format!("{prefix}{}", (x * 1e6).round() / 1e6)
}

/// FPR outage capacity alongside DOP capacity curves over the threshold grid.
pub fn run_capacity_sweeps(spec: &ExperimentSpec, source: &dyn MomentSource) -> Result<ResultTable> {
    spec.validate()?;
    let config = &spec.config;
    let s = &spec.sweep;
    let moments = source.ensemble(config, s.moment_samples, spec.seed)?;
    let rows = sample_fpr_rows(config, s.realizations, spec.seed, "capacity-rows")?;
    let template = CapacityQuery::new(moments, 0, 1.0, config.sigma2 / config.pu)?.with_beta(s.beta);

    let mut table = ResultTable::new(spec.name.as_str());
    table.push_column("gamma_th_dB", s.gamma_db.clone())?;
    let fpr = capacity_sweep(&template, Solver::FprOutage(&rows), &s.gamma_db)?;
    table.push_column("fpr", fpr.iter().map(|p| p.alpha).collect())?;
    let mut infeasible = 0;
    match spec.name {
        ExperimentName::CapacityTheta => {
            for &theta in &s.theta_list {
                let curve = capacity_sweep(&template.clone().with_theta(theta), Solver::FixedTau, &s.gamma_db)?;
                table.push_column(label("dop_theta", theta), curve.iter().map(|p| p.alpha).collect())?;
            }
        }
        _ => {
            for &kappa in &s.kappa_list {
                let curve = capacity_sweep(&template.clone().with_kappa(kappa), Solver::FixedKappa, &s.gamma_db)?;
                infeasible += curve.iter().filter(|p| p.infeasible).count();
                table.push_column(label("dop_kappa", kappa), curve.iter().map(|p| p.alpha).collect())?;
            }
        }
    }
    table.add_meta("beta", s.beta);
    table.add_meta("realizations", s.realizations);
    table.add_meta("moment_samples", s.moment_samples);
    table.add_meta("infeasible_points", infeasible);
    if spec.name == ExperimentName::CapacityKappa {
        let first = s.gamma_db[0];
        let q = template.clone().with_gamma_db(first).with_kappa(*s.kappa_list.last().unwrap_or(&1.0));
        let gap = alpha_kappa(&q).alpha - fpr_outage_capacity_from_samples(&q, &rows)?;
        table.add_meta("extra_users", format!("{:.1}", gap * s.headline_antennas as f64));
    }
    Ok(table)
}
