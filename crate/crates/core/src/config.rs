//! Scenario parameters.

use crate::{Error, Result};

/// How pilots are assigned across cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PilotScheme {
    /// Each cell draws its own Haar isometry, independently of the others.
    Dop,
    /// Every cell uses the same isometry.
    Fpr,
}

impl PilotScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            PilotScheme::Dop => "DOP",
            PilotScheme::Fpr => "FPR",
        }
    }
}

impl std::str::FromStr for PilotScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DOP" => Ok(PilotScheme::Dop),
            "FPR" => Ok(PilotScheme::Fpr),
            other => Err(Error::Config(format!("unknown pilot scheme `{other}` (expected DOP or FPR)"))),
        }
    }
}

/// Transmit power policy.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerMode {
    /// `p_kj = Pu / l_kjj`, so every user arrives at its own BS with power `Pu`.
    Controlled,
    /// Explicit transmit powers, indexed `[cell][user]`.
    Fixed(Vec<Vec<f64>>),
}

impl PowerMode {
    /// Same transmit power for every user.
    pub fn uniform(users: &[usize], p: f64) -> Self {
        PowerMode::Fixed(users.iter().map(|&k| vec![p; k]).collect())
    }
}

/// Orientation of the hexagonal user region relative to the BS ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HexOrientation {
    /// Vertices at 0°, 60°, ..., i.e. pointing at the neighbouring BSs.
    FlatTop,
    /// Vertices at 30°, 90°, ..., i.e. edges facing the neighbouring BSs.
    PointyTop,
}

impl HexOrientation {
    pub fn as_str(&self) -> &'static str {
        match self {
            HexOrientation::FlatTop => "FLAT_TOP",
            HexOrientation::PointyTop => "POINTY_TOP",
        }
    }
}

impl std::str::FromStr for HexOrientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FLAT_TOP" | "FLAT" => Ok(HexOrientation::FlatTop),
            "POINTY_TOP" | "POINTY" => Ok(HexOrientation::PointyTop),
            other => Err(Error::Config(format!(
                "unknown hex orientation `{other}` (expected FLAT_TOP or POINTY_TOP)"
            ))),
        }
    }
}

/// All scalar parameters of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of cells `L` (1 or 7).
    pub cells: usize,
    /// Users per cell `K_j`.
    pub users: Vec<usize>,
    /// BS antennas `N`.
    pub antennas: usize,
    /// Training length in symbols.
    pub tau: usize,
    /// Coherence length in symbols. Only checked against `tau`.
    pub coherence: usize,
    /// Noise power, linear.
    pub sigma2: f64,
    /// Power-control target received power, linear.
    pub pu: f64,
    /// Path-loss exponent.
    pub zeta: f64,
    pub bs_spacing: f64,
    /// Inner radius (apothem) of the hexagonal user region.
    pub inner_radius: f64,
    pub orientation: HexOrientation,
    pub scheme: PilotScheme,
    pub power: PowerMode,
}

impl Default for SystemConfig {
    /// The 7-cell reference scenario: K = 20, tau = 30, N = 100, Pu = 0 dB,
    /// sigma2 = 1, zeta = 3.7, BS spacing 2, flat-top hexagons of inner
    /// radius 1, DOP pilots with power control.
    fn default() -> Self {
        SystemConfig {
            cells: 7,
            users: vec![20; 7],
            antennas: 100,
            tau: 30,
            coherence: 200,
            sigma2: 1.0,
            pu: 1.0,
            zeta: 3.7,
            bs_spacing: 2.0,
            inner_radius: 1.0,
            orientation: HexOrientation::FlatTop,
            scheme: PilotScheme::Dop,
            power: PowerMode::Controlled,
        }
    }
}

impl SystemConfig {
    /// Uniform loading `K` in every cell.
    pub fn with_uniform_users(mut self, k: usize) -> Self {
        self.users = vec![k; self.cells];
        self
    }

    pub fn with_cells(mut self, cells: usize) -> Self {
        let k = self.users.first().copied().unwrap_or(1);
        self.cells = cells;
        self.users = vec![k; cells];
        self
    }

    pub fn users_in(&self, cell: usize) -> usize {
        self.users[cell]
    }

    pub fn max_users(&self) -> usize {
        self.users.iter().copied().max().unwrap_or(0)
    }

    pub fn total_users(&self) -> usize {
        self.users.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.cells == 0 {
            return bad("L must be at least 1".into());
        }
        if self.users.len() != self.cells {
            return bad(format!("K lists {} cells but L = {}", self.users.len(), self.cells));
        }
        if self.antennas == 0 {
            return bad("N must be at least 1".into());
        }
        if self.tau == 0 {
            return bad("tau must be at least 1".into());
        }
        for (j, &k) in self.users.iter().enumerate() {
            if k == 0 {
                return bad(format!("cell {j} has no users"));
            }
            if k > self.tau {
                return bad(format!("K = {k} in cell {j} exceeds tau = {}", self.tau));
            }
        }
        if self.tau > self.coherence {
            return bad(format!("tau = {} exceeds T = {}", self.tau, self.coherence));
        }
        for (name, v) in [
            ("sigma2", self.sigma2),
            ("Pu", self.pu),
            ("zeta", self.zeta),
            ("bs_spacing", self.bs_spacing),
            ("inner_radius", self.inner_radius),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and strictly positive, got {v}"));
            }
        }
        if let PowerMode::Fixed(p) = &self.power {
            if p.len() != self.cells || p.iter().zip(&self.users).any(|(row, &k)| row.len() != k) {
                return bad("fixed power table does not match K".into());
            }
            if p.iter().flatten().any(|&x| !(x.is_finite() && x > 0.0)) {
                return bad("fixed transmit powers must be strictly positive".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SystemConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_more_users_than_pilots() {
        let cfg = SystemConfig { tau: 30, ..SystemConfig::default() }.with_uniform_users(40);
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_tau_above_coherence() {
        let cfg = SystemConfig { coherence: 10, ..SystemConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_nonpositive_noise() {
        let cfg = SystemConfig { sigma2: 0.0, ..SystemConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("dop".parse::<PilotScheme>().unwrap(), PilotScheme::Dop);
        assert_eq!(" FPR ".parse::<PilotScheme>().unwrap(), PilotScheme::Fpr);
        assert!("xyz".parse::<PilotScheme>().is_err());
    }
}
