//! Cell layout, user drops and large-scale gains.

use rand::Rng;

use crate::config::{HexOrientation, PowerMode, SystemConfig};
use crate::{Error, Result};

pub type Point = [f64; 2];

/// BS coordinates: cell 0 at the origin and, for seven cells, one ring of
/// neighbours at `bs_spacing` and angles 0°, 60°, ..., 300°.
pub fn build_hex_layout(config: &SystemConfig) -> Result<Vec<Point>> {
    match config.cells {
        1 => Ok(vec![[0.0, 0.0]]),
        7 => {
            let mut bs = vec![[0.0, 0.0]];
            for n in 0..6 {
                let phi = std::f64::consts::FRAC_PI_3 * n as f64;
                bs.push([config.bs_spacing * phi.cos(), config.bs_spacing * phi.sin()]);
            }
            Ok(bs)
        }
        other => Err(Error::Config(format!("unsupported cell count L = {other} (only 1 or 7)"))),
    }
}

/// A regular hexagon given by its inner radius (apothem) and orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hexagon {
    pub center: Point,
    pub inner_radius: f64,
    pub orientation: HexOrientation,
}

impl Hexagon {
    pub fn outer_radius(&self) -> f64 {
        self.inner_radius * 2.0 / 3f64.sqrt()
    }

    fn normals(&self) -> [Point; 3] {
        let offset = match self.orientation {
            HexOrientation::FlatTop => std::f64::consts::FRAC_PI_6,
            HexOrientation::PointyTop => 0.0,
        };
        let mut out = [[0.0; 2]; 3];
        for (n, v) in out.iter_mut().enumerate() {
            let phi = offset + std::f64::consts::FRAC_PI_3 * n as f64;
            *v = [phi.cos(), phi.sin()];
        }
        out
    }

    pub fn contains(&self, p: Point) -> bool {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        self.normals()
            .iter()
            .all(|n| (dx * n[0] + dy * n[1]).abs() <= self.inner_radius * (1.0 + 1e-12))
    }

    /// Vertices in counter-clockwise order.
    pub fn vertices(&self) -> [Point; 6] {
        let offset = match self.orientation {
            HexOrientation::FlatTop => 0.0,
            HexOrientation::PointyTop => std::f64::consts::FRAC_PI_6,
        };
        let r = self.outer_radius();
        let mut out = [[0.0; 2]; 6];
        for (n, v) in out.iter_mut().enumerate() {
            let phi = offset + std::f64::consts::FRAC_PI_3 * n as f64;
            *v = [self.center[0] + r * phi.cos(), self.center[1] + r * phi.sin()];
        }
        out
    }

    /// Uniform point by rejection from the bounding rectangle.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let (hx, hy) = match self.orientation {
            HexOrientation::FlatTop => (self.outer_radius(), self.inner_radius),
            HexOrientation::PointyTop => (self.inner_radius, self.outer_radius()),
        };
        loop {
            let p = [
                self.center[0] + rng.random_range(-hx..=hx),
                self.center[1] + rng.random_range(-hy..=hy),
            ];
            if self.contains(p) {
                return p;
            }
        }
    }
}

pub fn cell_hexagon(config: &SystemConfig, center: Point) -> Hexagon {
    Hexagon { center, inner_radius: config.inner_radius, orientation: config.orientation }
}

/// Users of each cell, uniform over that cell's hexagon.
pub fn drop_users<R: Rng + ?Sized>(config: &SystemConfig, bs: &[Point], rng: &mut R) -> Vec<Vec<Point>> {
    bs.iter()
        .zip(&config.users)
        .map(|(&c, &k)| {
            let hex = cell_hexagon(config, c);
            (0..k).map(|_| hex.sample(rng)).collect()
        })
        .collect()
}

/// Bounded path gain `1 / (1 + d^zeta)`.
pub fn path_gain(d: f64, zeta: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Domain(format!("distance must be non-negative, got {d}")));
    }
    Ok(1.0 / (1.0 + d.powf(zeta)))
}

pub fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Positions plus every large-scale quantity derived from them.
///
/// Tensors are indexed `(k, j, i)`: user `k` of cell `j` as heard at BS `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub bs_xy: Vec<Point>,
    pub user_xy: Vec<Vec<Point>>,
    /// `[j][k]` transmit power.
    power: Vec<Vec<f64>>,
    /// `[j][k][i]` slow gain.
    ell: Vec<Vec<Vec<f64>>>,
    controlled_pu: Option<f64>,
}

impl Deployment {
    /// Gains from explicit positions.
    pub fn from_positions(config: &SystemConfig, bs_xy: Vec<Point>, user_xy: Vec<Vec<Point>>) -> Result<Self> {
        if user_xy.len() != bs_xy.len() {
            return Err(Error::Dimension(format!("{} user groups for {} BSs", user_xy.len(), bs_xy.len())));
        }
        let ell: Vec<Vec<Vec<f64>>> = user_xy
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|&u| bs_xy.iter().map(|&b| path_gain(distance(u, b), config.zeta)).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()
            })
            .collect::<Result<_>>()?;
        let power = match &config.power {
            PowerMode::Controlled => ell
                .iter()
                .enumerate()
                .map(|(j, cell)| cell.iter().map(|g| config.pu / g[j]).collect())
                .collect(),
            PowerMode::Fixed(p) => {
                if p.len() != ell.len() || p.iter().zip(&ell).any(|(a, b)| a.len() != b.len()) {
                    return Err(Error::Dimension("fixed power table does not match user drop".into()));
                }
                p.clone()
            }
        };
        let controlled_pu = matches!(config.power, PowerMode::Controlled).then_some(config.pu);
        Ok(Deployment { bs_xy, user_xy, power, ell, controlled_pu })
    }

    pub fn cells(&self) -> usize {
        self.bs_xy.len()
    }

    pub fn users_in(&self, cell: usize) -> usize {
        self.user_xy[cell].len()
    }

    pub fn ell(&self, k: usize, j: usize, i: usize) -> f64 {
        self.ell[j][k][i]
    }

    /// `l_kji / l_kjj`.
    pub fn ellbar(&self, k: usize, j: usize, i: usize) -> f64 {
        self.ell[j][k][i] / self.ell[j][k][j]
    }

    pub fn transmit_power(&self, k: usize, j: usize) -> f64 {
        self.power[j][k]
    }

    /// Received power `rho_kji = p_kj l_kji`. Under power control this is
    /// evaluated as `Pu * l_kji / l_kjj`, so the own-cell entry is `Pu` exactly.
    pub fn rho(&self, k: usize, j: usize, i: usize) -> f64 {
        match self.controlled_pu {
            Some(pu) if i == j => pu,
            Some(pu) => pu * self.ellbar(k, j, i),
            None => self.power[j][k] * self.ell[j][k][i],
        }
    }

    /// Target received power when power control is on.
    pub fn controlled_pu(&self) -> Option<f64> {
        self.controlled_pu
    }

    /// Received powers of cell `j`'s users at BS `i`, i.e. the diagonal of `Γ_ji`.
    pub fn gamma_diag(&self, j: usize, i: usize) -> Vec<f64> {
        (0..self.users_in(j)).map(|k| self.rho(k, j, i)).collect()
    }

    /// Distance of user `(k, j)` to BS `i`.
    pub fn user_distance(&self, k: usize, j: usize, i: usize) -> f64 {
        distance(self.user_xy[j][k], self.bs_xy[i])
    }
}

/// Layout, user drop and gains in one step.
pub fn build_deployment<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<Deployment> {
    config.validate()?;
    let bs = build_hex_layout(config)?;
    let users = drop_users(config, &bs, rng);
    Deployment::from_positions(config, bs, users)
}
