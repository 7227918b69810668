//! Haar unitaries, isometric pilot sets and complex Gaussian fading.

use std::sync::Arc;

use nalgebra::DMatrixView;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{PilotScheme, SystemConfig};
use crate::{CMatrix, Error, Result, C64};

/// One CN(0, var) sample: real and imaginary parts i.i.d. N(0, var/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// `rows x cols` matrix of i.i.d. CN(0, var), filled column by column.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, var: f64, rng: &mut R) -> CMatrix {
    let data: Vec<C64> = (0..rows * cols).map(|_| complex_normal(rng, var)).collect();
    CMatrix::from_vec(rows, cols, data)
}

/// First `cols` columns of a Haar unitary of order `rows`.
///
/// QR of a Gaussian `rows x cols` matrix, each column of `Q` multiplied by the
/// phase of the matching diagonal entry of `R`. Since the Gaussian is filled
/// column-major, this consumes the generator exactly like the leading
/// `cols` columns of [`haar_unitary`] and returns the same columns.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<CMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Domain(format!("isometry needs positive dimensions, got {rows}x{cols}")));
    }
    if cols > rows {
        return Err(Error::Domain(format!("cannot take {cols} orthonormal columns in dimension {rows}")));
    }
    let g = complex_gaussian_matrix(rows, cols, 1.0, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..cols {
        let d = r[(c, c)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for x in q.column_mut(c).iter_mut() {
            *x *= phase;
        }
    }
    Ok(q)
}

/// Haar-distributed `tau x tau` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(tau: usize, rng: &mut R) -> Result<CMatrix> {
    haar_isometry(tau, tau, rng)
}

/// Per-cell `tau x K_j` pilot matrices with orthonormal columns.
#[derive(Debug, Clone)]
pub struct PilotSet {
    pub scheme: PilotScheme,
    // FPR cells share one allocation with `max K` columns.
    bases: Vec<Arc<CMatrix>>,
    users: Vec<usize>,
}

impl PilotSet {
    /// Wrap explicit per-cell matrices (columns assumed orthonormal).
    pub fn from_matrices(scheme: PilotScheme, matrices: Vec<CMatrix>) -> Self {
        let users = matrices.iter().map(|m| m.ncols()).collect();
        PilotSet { scheme, bases: matrices.into_iter().map(Arc::new).collect(), users }
    }

    pub fn cells(&self) -> usize {
        self.bases.len()
    }

    pub fn tau(&self) -> usize {
        self.bases[0].nrows()
    }

    pub fn users_in(&self, cell: usize) -> usize {
        self.users[cell]
    }

    /// `Q_j`.
    pub fn matrix(&self, cell: usize) -> DMatrixView<'_, C64> {
        self.bases[cell].columns(0, self.users[cell])
    }

    /// Pilot `q_kj`.
    pub fn pilot(&self, k: usize, cell: usize) -> DMatrixView<'_, C64> {
        self.bases[cell].columns(k, 1)
    }

    /// `q_ki^H q_mj`.
    pub fn overlap(&self, k: usize, i: usize, m: usize, j: usize) -> C64 {
        self.pilot(k, i).dotc(&self.pilot(m, j))
    }

    /// Whether two cells use the very same pilot storage.
    pub fn shares_storage(&self, a: usize, b: usize) -> bool {
        Arc::ptr_eq(&self.bases[a], &self.bases[b])
    }

    /// Largest entrywise deviation of `Q_j^H Q_j` from the identity.
    pub fn orthonormality_error(&self, cell: usize) -> f64 {
        let q = self.matrix(cell);
        let gram = q.adjoint() * q;
        let mut worst: f64 = 0.0;
        for r in 0..gram.nrows() {
            for c in 0..gram.ncols() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram[(r, c)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// DOP: an independent isometry per cell. FPR: one draw shared by all cells.
pub fn make_pilots<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<PilotSet> {
    if let Some((j, &k)) = config.users.iter().enumerate().find(|(_, &k)| k > config.tau) {
        return Err(Error::Config(format!("K = {k} in cell {j} exceeds tau = {}", config.tau)));
    }
    let bases = match config.scheme {
        PilotScheme::Dop => config
            .users
            .iter()
            .map(|&k| haar_isometry(config.tau, k, rng).map(Arc::new))
            .collect::<Result<Vec<_>>>()?,
        PilotScheme::Fpr => {
            let shared = Arc::new(haar_isometry(config.tau, config.max_users(), rng)?);
            vec![shared; config.cells]
        }
    };
    Ok(PilotSet { scheme: config.scheme, bases, users: config.users.clone() })
}

/// Fast fading towards one receiving BS, plus that BS's training noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub receiver: usize,
    /// `h[j]` is `N x K_j`; column `k` is `h_{k j receiver}`.
    pub h: Vec<CMatrix>,
    /// `N x tau`, entries CN(0, sigma2). Row `n` is `n_i^[n]`.
    pub training_noise: CMatrix,
}

impl ChannelRealization {
    pub fn antennas(&self) -> usize {
        self.training_noise.nrows()
    }
}

/// Fresh CN(0, 1) fading for every user towards BS `receiver`.
pub fn sample_channels<R: Rng + ?Sized>(config: &SystemConfig, receiver: usize, rng: &mut R) -> ChannelRealization {
    let n = config.antennas;
    let h = config.users.iter().map(|&k| complex_gaussian_matrix(n, k, 1.0, rng)).collect();
    let training_noise = complex_gaussian_matrix(n, config.tau, config.sigma2, rng);
    ChannelRealization { receiver, h, training_noise }
}

/// Quadratic forms covered by the concentration checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticForm {
    /// `x A x^H - Tr(A)/n`, x with i.i.d. CN(0, 1/n) entries.
    Gaussian,
    /// `w^H A w - Tr(A)/n`, w a column of a Haar isometry.
    Isometric,
    /// `x A y^H` for independent Gaussian x, y.
    GaussianCross,
    /// `w^H A z` for columns of independent isometries.
    IsometricCross,
}

impl QuadraticForm {
    pub const ALL: [QuadraticForm; 4] = [
        QuadraticForm::Gaussian,
        QuadraticForm::Isometric,
        QuadraticForm::GaussianCross,
        QuadraticForm::IsometricCross,
    ];
}

fn unit_column<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    haar_isometry(n, 1, rng).expect("n >= 1").iter().copied().collect()
}

/// One draw of `|form - limit|` for a diagonal `A` given by `diag`.
pub fn quadratic_form_deviation<R: Rng + ?Sized>(form: QuadraticForm, diag: &[f64], rng: &mut R) -> f64 {
    let n = diag.len();
    let trace = diag.iter().sum::<f64>() / n as f64;
    let gaussian = |rng: &mut R| -> Vec<C64> { (0..n).map(|_| complex_normal(rng, 1.0 / n as f64)).collect() };
    let form_value = |a: &[C64], b: &[C64]| -> C64 {
        a.iter().zip(b).zip(diag).map(|((x, y), d)| x.conj() * y * *d).sum()
    };
    match form {
        QuadraticForm::Gaussian => {
            let x = gaussian(rng);
            (form_value(&x, &x).re - trace).abs()
        }
        QuadraticForm::Isometric => {
            let w = unit_column(n, rng);
            (form_value(&w, &w).re - trace).abs()
        }
        QuadraticForm::GaussianCross => {
            let x = gaussian(rng);
            let y = gaussian(rng);
            form_value(&x, &y).norm()
        }
        QuadraticForm::IsometricCross => {
            let w = unit_column(n, rng);
            let z = unit_column(n, rng);
            form_value(&w, &z).norm()
        }
    }
}

/// Root-mean-square deviation per form at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaRow {
    pub n: usize,
    pub gaussian: f64,
    pub isometric: f64,
    pub gaussian_cross: f64,
    pub isometric_cross: f64,
}

/// Concentration of quadratic forms in Gaussian and Haar-isometric vectors,
/// with `A = diag(1..n)/n`, at each size in `sizes` (RMS over `reps` draws).
pub fn lemma_checks<R: Rng + ?Sized>(sizes: &[usize], reps: usize, rng: &mut R) -> Vec<LemmaRow> {
    sizes
        .iter()
        .map(|&n| {
            let diag: Vec<f64> = (1..=n).map(|v| v as f64 / n as f64).collect();
            let mut sq = [0.0f64; 4];
            for _ in 0..reps {
                for (slot, form) in sq.iter_mut().zip(QuadraticForm::ALL) {
                    *slot += quadratic_form_deviation(form, &diag, rng).powi(2);
                }
            }
            let rms = sq.map(|s| (s / reps.max(1) as f64).sqrt());
            LemmaRow { n, gaussian: rms[0], isometric: rms[1], gaussian_cross: rms[2], isometric_cross: rms[3] }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_relative_eq;

    fn max_identity_error(m: &CMatrix) -> f64 {
        let g = m.adjoint() * m;
        let eye = CMatrix::identity(g.nrows(), g.ncols());
        (g - eye).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn tau_one_is_unit_modulus() {
        let u = haar_unitary(1, &mut stream(1, "haar", 0)).unwrap();
        assert_relative_eq!(u[(0, 0)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(matches!(haar_unitary(0, &mut stream(1, "haar", 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn unitary_to_tolerance() {
        let mut rng = stream(2, "haar", 0);
        for tau in [2, 5, 16, 64] {
            let u = haar_unitary(tau, &mut rng).unwrap();
            assert!(max_identity_error(&u) < 1e-10);
            assert!(max_identity_error(&u.adjoint()) < 1e-10);
        }
    }

    #[test]
    fn isometry_is_leading_columns_of_unitary() {
        let full = haar_unitary(12, &mut stream(3, "haar", 0)).unwrap();
        let thin = haar_isometry(12, 5, &mut stream(3, "haar", 0)).unwrap();
        let diff = (full.columns(0, 5) - &thin).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn first_column_is_normalised_gaussian() {
        let g = complex_gaussian_matrix(9, 1, 1.0, &mut stream(4, "haar", 0));
        let w = haar_isometry(9, 1, &mut stream(4, "haar", 0)).unwrap();
        let norm = g.norm();
        for r in 0..9 {
            assert!((w[(r, 0)] - g[(r, 0)] / norm).norm() < 1e-13);
        }
    }

    #[test]
    fn fpr_shares_pilots() {
        let cfg = SystemConfig { scheme: PilotScheme::Fpr, ..SystemConfig::default() };
        let p = make_pilots(&cfg, &mut stream(5, "pilots", 0)).unwrap();
        for j in 1..cfg.cells {
            assert!(p.shares_storage(0, j));
            assert_eq!(p.matrix(0), p.matrix(j));
        }
    }

    #[test]
    fn dop_pilots_are_orthonormal_and_distinct() {
        let cfg = SystemConfig::default();
        let p = make_pilots(&cfg, &mut stream(6, "pilots", 0)).unwrap();
        for j in 0..cfg.cells {
            assert!(p.orthonormality_error(j) < 1e-10);
        }
        assert!(!p.shares_storage(0, 1));
        assert_ne!(p.matrix(0), p.matrix(1));
    }

    #[test]
    fn too_many_users_for_pilots() {
        let mut cfg = SystemConfig::default();
        cfg.users[3] = cfg.tau + 1;
        assert!(matches!(make_pilots(&cfg, &mut stream(6, "pilots", 0)), Err(Error::Config(_))));
    }

    #[test]
    fn channels_are_reproducible() {
        let cfg = SystemConfig::default();
        let a = sample_channels(&cfg, 0, &mut stream(7, "ch", 0));
        let b = sample_channels(&cfg, 0, &mut stream(7, "ch", 0));
        assert_eq!(a, b);
        assert_eq!(a.h[2].shape(), (cfg.antennas, cfg.users[2]));
        assert_eq!(a.training_noise.shape(), (cfg.antennas, cfg.tau));
    }

    #[test]
    fn channel_entries_are_standard_complex_normal() {
        let cfg = SystemConfig { antennas: 500, ..SystemConfig::default() };
        let ch = sample_channels(&cfg, 0, &mut stream(8, "ch", 0));
        let entries: Vec<C64> = ch.h.iter().flat_map(|m| m.iter().copied()).collect();
        let n = entries.len() as f64;
        assert!(n >= 1e4);
        let mean: C64 = entries.iter().sum::<C64>() / n;
        // each of re/im has variance 1/2, so the mean has std sqrt(1/(2n))
        let se_mean = (0.5 / n).sqrt();
        assert!(mean.re.abs() < 3.0 * se_mean && mean.im.abs() < 3.0 * se_mean, "{mean}");
        let power: Vec<f64> = entries.iter().map(|x| x.norm_sqr()).collect();
        let pm = power.iter().sum::<f64>() / n;
        // |h|^2 ~ Exp(1): standard deviation 1
        assert!((pm - 1.0).abs() < 3.0 / n.sqrt(), "{pm}");
    }

    #[test]
    fn haar_column_entry_second_moment() {
        let tau = 8;
        let mut rng = stream(9, "haar-moment", 0);
        let draws = 100_000;
        let samples: Vec<f64> = (0..draws).map(|_| haar_unitary(tau, &mut rng).unwrap()[(0, 0)].norm_sqr()).collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 1.0 / tau as f64).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn independent_pilot_overlap() {
        let cfg = SystemConfig { tau: 16, ..SystemConfig::default() }.with_cells(7).with_uniform_users(4);
        let mut rng = stream(10, "overlap", 0);
        let draws = 20_000;
        let samples: Vec<f64> = (0..draws)
            .map(|_| make_pilots(&cfg, &mut rng).unwrap().overlap(0, 0, 2, 3).norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 1.0 / 16.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    fn ks_pvalue(d: f64, n: usize, m: usize) -> f64 {
        let ne = (n * m) as f64 / (n + m) as f64;
        let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
        let mut p = 0.0;
        for k in 1..100 {
            let kf = k as f64;
            p += 2.0 * (-1f64).powi(k - 1) * (-2.0 * kf * kf * lambda * lambda).exp();
        }
        p.clamp(0.0, 1.0)
    }

    #[test]
    fn left_invariance_spot_check() {
        let tau = 4;
        let v = haar_unitary(tau, &mut stream(12, "fixed-v", 0)).unwrap();
        let mut rng = stream(12, "invariance", 0);
        let n = 10_000;
        let plain: Vec<f64> = (0..n).map(|_| haar_unitary(tau, &mut rng).unwrap()[(1, 2)].norm_sqr()).collect();
        let rotated: Vec<f64> =
            (0..n).map(|_| (&v * haar_unitary(tau, &mut rng).unwrap())[(1, 2)].norm_sqr()).collect();
        let d = ks_statistic(plain, rotated);
        assert!(ks_pvalue(d, n, n) > 0.01, "KS distance {d}");
    }

    #[test]
    fn identity_quadratic_form_is_squared_norm() {
        let mut rng = stream(13, "lemma", 0);
        let n = 256;
        let ones = vec![1.0; n];
        // w from a Haar isometry has unit norm, so w^H I w = 1 exactly
        assert!(quadratic_form_deviation(QuadraticForm::Isometric, &ones, &mut rng) < 1e-12);
        let dev = quadratic_form_deviation(QuadraticForm::Gaussian, &ones, &mut rng);
        assert!(dev < 6.0 / (n as f64).sqrt());
    }

    #[test]
    fn lemma_report_shrinks() {
        let rows = lemma_checks(&[64, 256, 1024], 20, &mut stream(14, "lemma", 0));
        assert_eq!(rows.len(), 3);
        assert!(rows[2].gaussian < rows[0].gaussian);
        assert!(rows[2].isometric < rows[0].isometric);
        assert!(rows[2].gaussian_cross < rows[0].gaussian_cross);
        assert!(rows[2].isometric_cross < rows[0].isometric_cross);
    }
}
