//! WebAssembly bindings behind `www/index.html`.

use pilotsim::asymptotics::{dop_pc_limit_sinr, fpr_pc_limit_sinr};
use pilotsim::capacity::{alpha_kappa, alpha_tau, fpr_outage_capacity_from_samples, CapacityQuery};
use pilotsim::config::HexOrientation;
use pilotsim::experiments::{crossing_probability, sample_fpr_rows};
use pilotsim::geometry::{build_deployment, cell_hexagon};
use pilotsim::rng::stream;
use pilotsim::{to_db, MomentSet, SystemConfig};
use wasm_bindgen::prelude::*;

const MOMENT_SAMPLES: usize = 100_000;

fn scenario(inner_radius: f64, flat_top: bool, sigma2_over_pu: f64) -> SystemConfig {
    SystemConfig {
        inner_radius,
        orientation: if flat_top { HexOrientation::FlatTop } else { HexOrientation::PointyTop },
        sigma2: sigma2_over_pu,
        ..SystemConfig::default()
    }
}

fn js_err(e: pilotsim::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn check_loading(alpha: f64, kappa: f64) -> pilotsim::Result<()> {
    if !(alpha > 0.0 && kappa > 0.0 && kappa <= 1.0) {
        return Err(pilotsim::Error::Config(format!("need alpha > 0 and 0 < kappa <= 1, got {alpha}, {kappa}")));
    }
    Ok(())
}

/// Thresholds from `min_db` to `max_db` in 0.5 dB steps.
fn threshold_grid(min_db: f64, max_db: f64) -> pilotsim::Result<Vec<f64>> {
    if !(min_db.is_finite() && max_db.is_finite() && min_db <= max_db) {
        return Err(pilotsim::Error::Config(format!("bad threshold range [{min_db}, {max_db}] dB")));
    }
    let steps = ((max_db - min_db) / 0.5 + 1e-9).floor() as usize;
    Ok((0..=steps).map(|i| min_db + 0.5 * i as f64).collect())
}

/// BS sites, user positions and hexagon outlines as flat `x, y` arrays.
#[wasm_bindgen]
pub struct Layout {
    bs: Vec<f64>,
    users: Vec<f64>,
    cells: Vec<f64>,
}

#[wasm_bindgen]
impl Layout {
    #[wasm_bindgen(getter)]
    pub fn bs(&self) -> Vec<f64> {
        self.bs.clone()
    }

    /// Users cell by cell, `K` users each.
    #[wasm_bindgen(getter)]
    pub fn users(&self) -> Vec<f64> {
        self.users.clone()
    }

    /// Six vertices per cell.
    #[wasm_bindgen(getter)]
    pub fn cells(&self) -> Vec<f64> {
        self.cells.clone()
    }
}

#[wasm_bindgen]
pub fn drop_users(seed: u64, users_per_cell: usize, inner_radius: f64, flat_top: bool) -> Result<Layout, JsValue> {
    let config = SystemConfig { tau: users_per_cell.max(1), ..scenario(inner_radius, flat_top, 1.0) }
        .with_uniform_users(users_per_cell);
    let dep = build_deployment(&config, &mut stream(seed, "demo-drop", 0)).map_err(js_err)?;
    let bs = dep.bs_xy.iter().flatten().copied().collect();
    let users = dep.user_xy.iter().flatten().flatten().copied().collect();
    let cells = dep
        .bs_xy
        .iter()
        .flat_map(|&c| cell_hexagon(&config, c).vertices())
        .flatten()
        .collect();
    Ok(Layout { bs, users, cells })
}

/// Sorted FPR limiting SINRs (dB) and the DOP limit they are compared with.
#[wasm_bindgen]
pub struct SinrComparison {
    fpr_db: Vec<f64>,
    dop_db: f64,
    p_dop_better: f64,
}

#[wasm_bindgen]
impl SinrComparison {
    #[wasm_bindgen(getter)]
    pub fn fpr_db(&self) -> Vec<f64> {
        self.fpr_db.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn dop_db(&self) -> f64 {
        self.dop_db
    }

    #[wasm_bindgen(getter)]
    pub fn p_dop_better(&self) -> f64 {
        self.p_dop_better
    }
}

#[wasm_bindgen]
pub fn compare_sinr(
    seed: u64,
    alpha: f64,
    kappa: f64,
    sigma2_over_pu: f64,
    realizations: usize,
    inner_radius: f64,
    flat_top: bool,
) -> Result<SinrComparison, JsValue> {
    check_loading(alpha, kappa).map_err(js_err)?;
    let config = scenario(inner_radius, flat_top, sigma2_over_pu);
    config.validate().map_err(js_err)?;
    let moments = MomentSet::ensemble_seeded(&config, MOMENT_SAMPLES, seed).map_err(js_err)?;
    let rows = sample_fpr_rows(&config, realizations.max(1), seed, "demo-rows").map_err(js_err)?;
    let fpr_moments = moments.with_loading(alpha, 1.0);
    let mut fpr = rows
        .iter()
        .map(|r| fpr_pc_limit_sinr(r, 0, &fpr_moments, sigma2_over_pu).map(|l| l.sinr.value()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(js_err)?;
    fpr.sort_by(f64::total_cmp);
    let dop = dop_pc_limit_sinr(0, &moments.with_loading(alpha, kappa), sigma2_over_pu)
        .map_err(js_err)?
        .sinr
        .value();
    Ok(SinrComparison {
        p_dop_better: crossing_probability(&fpr, dop),
        fpr_db: fpr.iter().map(|&g| to_db(g)).collect(),
        dop_db: to_db(dop),
    })
}

/// Capacity curves over a threshold grid in dB.
#[wasm_bindgen]
pub struct CapacityCurves {
    gamma_db: Vec<f64>,
    fpr: Vec<f64>,
    fixed_tau: Vec<f64>,
    fixed_kappa: Vec<f64>,
}

#[wasm_bindgen]
impl CapacityCurves {
    #[wasm_bindgen(getter)]
    pub fn gamma_db(&self) -> Vec<f64> {
        self.gamma_db.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fpr(&self) -> Vec<f64> {
        self.fpr.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fixed_tau(&self) -> Vec<f64> {
        self.fixed_tau.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn fixed_kappa(&self) -> Vec<f64> {
        self.fixed_kappa.clone()
    }
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn capacity_curves(
    seed: u64,
    theta: f64,
    kappa: f64,
    beta: f64,
    sigma2_over_pu: f64,
    gamma_min_db: f64,
    gamma_max_db: f64,
    realizations: usize,
) -> Result<CapacityCurves, JsValue> {
    let gamma_db = threshold_grid(gamma_min_db, gamma_max_db).map_err(js_err)?;
    let config = scenario(1.0, true, sigma2_over_pu);
    let moments = MomentSet::ensemble_seeded(&config, MOMENT_SAMPLES, seed).map_err(js_err)?;
    let rows = sample_fpr_rows(&config, realizations.max(1), seed, "demo-rows").map_err(js_err)?;
    let template = CapacityQuery::new(moments, 0, 1.0, sigma2_over_pu)
        .map_err(js_err)?
        .with_theta(theta)
        .with_kappa(kappa)
        .with_beta(beta);
    template.validate().map_err(js_err)?;
    let mut curves = CapacityCurves { gamma_db: gamma_db.clone(), fpr: vec![], fixed_tau: vec![], fixed_kappa: vec![] };
    for db in gamma_db {
        let q = template.clone().with_gamma_db(db);
        curves.fpr.push(fpr_outage_capacity_from_samples(&q, &rows).map_err(js_err)?);
        curves.fixed_tau.push(alpha_tau(&q));
        curves.fixed_kappa.push(alpha_kappa(&q).alpha);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        let l = drop_users(1, 5, 1.0, true).unwrap();
        assert_eq!(l.bs().len(), 14);
        assert_eq!(l.users().len(), 70);
        assert_eq!(l.cells().len(), 84);
    }

    #[test]
    fn comparison_is_sorted_and_bounded() {
        let c = compare_sinr(3, 0.1, 1.0, 1.0, 500, 1.0, true).unwrap();
        assert!(c.fpr_db().windows(2).all(|w| w[0] <= w[1]));
        assert!((0.0..=1.0).contains(&c.p_dop_better()));
    }

    #[test]
    fn curves_share_the_grid() {
        let c = capacity_curves(2, 1.0, 1.0, 0.05, 1.0, -10.0, 10.0, 500).unwrap();
        assert_eq!(c.gamma_db().len(), 41);
        assert_eq!(c.fpr().len(), 41);
        assert!(c.fixed_tau().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(check_loading(0.1, 1.0).is_ok());
        for (a, k) in [(-1.0, 1.0), (0.1, 0.0), (0.1, 1.5), (f64::NAN, 1.0)] {
            assert!(check_loading(a, k).is_err(), "{a} {k}");
        }
        assert_eq!(threshold_grid(-1.0, 0.0).unwrap(), vec![-1.0, -0.5, 0.0]);
        assert_eq!(threshold_grid(2.0, 2.0).unwrap(), vec![2.0]);
        assert!(threshold_grid(1.0, 0.0).is_err());
        assert!(threshold_grid(f64::NAN, 0.0).is_err());
    }
}
