//! Capon / MVDR range-azimuth processing.
//!
//! For every range bin the near-zero Doppler bins of the selected receivers
//! are stacked as snapshots, the sample covariance `R = X Xᴴ / N_D` is
//! pseudo-inverted without diagonal loading, and the spectrum
//! `P(θ) = 1 / (a(θ)ᴴ R⁺ a(θ))` is evaluated over the azimuth grid.
//!
//! Where `aᴴ R⁺ a` vanishes relative to `‖R⁺‖` (a direction in the null
//! space of a rank-deficient `R`) the cell is clamped to the largest finite value of
//! its row, and counted in [`CaponDiagnostics`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::frontend::RangeDopplerCube;
use crate::linalg::{frobenius, pseudo_inverse, quadratic_form, CMatrix, PINV_RCOND};
use crate::ra::{DopplerWindow, Method, RangeAzimuthMap, SteeringGrid};
use crate::radar::ArrayGeometry;

/// A direction is null when `aᴴR⁺a ≤ NULL_RELATIVE · ‖R⁺‖_F · ‖a‖²`.
pub const NULL_RELATIVE: f64 = 1e-12;

fn null_threshold(pinv_norm: f64, a: &[Complex64]) -> f64 {
    NULL_RELATIVE * pinv_norm * a.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Which receivers feed the covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSelection {
    /// The two receivers of the azimuth baseline, reference first.
    #[default]
    AzimuthPair,
    /// Every receiver, azimuth reference first, steering from the geometry.
    AllReceivers,
}

impl ChannelSelection {
    pub fn channels(self, geom: &ArrayGeometry) -> Vec<usize> {
        let [reference, partner] = geom.azimuth_pair;
        match self {
            ChannelSelection::AzimuthPair => vec![reference, partner],
            ChannelSelection::AllReceivers => std::iter::once(reference)
                .chain((0..geom.num_rx()).filter(|&m| m != reference))
                .collect(),
        }
    }
}

/// `[channel][snapshot]` returns at one range bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    pub data: CMatrix,
}

impl SnapshotMatrix {
    pub fn num_channels(&self) -> usize {
        self.data.nrows()
    }

    pub fn num_snapshots(&self) -> usize {
        self.data.ncols()
    }
}

pub fn collect_snapshots(
    rd: &RangeDopplerCube,
    range_bin: usize,
    window: &DopplerWindow,
    channels: &[usize],
) -> Result<SnapshotMatrix> {
    if window.is_empty() {
        return Err(Error::InvalidArgument("Doppler window is empty".into()));
    }
    window.check(rd.num_doppler_bins)?;
    if channels.len() < 2 || channels.len() > rd.num_rx {
        return Err(Error::InvalidArgument(format!(
            "need between 2 and {} channels, got {}",
            rd.num_rx,
            channels.len()
        )));
    }
    if let Some(&bad) = channels.iter().find(|&&c| c >= rd.num_rx) {
        return Err(Error::InvalidArgument(format!("channel {bad} out of range 0..{}", rd.num_rx)));
    }
    if range_bin >= rd.num_range_bins {
        return Err(Error::InvalidArgument(format!(
            "range bin {range_bin} out of range 0..{}",
            rd.num_range_bins
        )));
    }
    let bins = window.bins();
    let data = CMatrix::from_fn(channels.len(), bins.len(), |i, j| rd.get(channels[i], range_bin, bins[j]));
    Ok(SnapshotMatrix { data })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialCovariance {
    pub matrix: CMatrix,
    pub pseudo_inverse: CMatrix,
}

impl SpatialCovariance {
    /// `‖R − Rᴴ‖_F / ‖R‖_F`, zero for the zero matrix.
    pub fn hermitian_defect(&self) -> f64 {
        let norm = frobenius(&self.matrix);
        if norm == 0.0 {
            return 0.0;
        }
        frobenius(&(&self.matrix - self.matrix.adjoint())) / norm
    }
}

pub fn spatial_covariance(x: &SnapshotMatrix) -> Result<SpatialCovariance> {
    let nd = x.num_snapshots();
    if nd == 0 {
        return Err(Error::InvalidArgument("snapshot matrix has no columns".into()));
    }
    if x.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("snapshot matrix"));
    }
    let n = x.num_channels();
    let scale = 1.0 / nd as f64;
    // Explicit loop so that R_ji is bit-for-bit conj(R_ij).
    let mut matrix = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..nd {
                acc += x.data[(i, k)] * x.data[(j, k)].conj();
            }
            matrix[(i, j)] = acc * scale;
        }
    }
    let pseudo_inverse = pseudo_inverse(&matrix, PINV_RCOND);
    Ok(SpatialCovariance { matrix, pseudo_inverse })
}

/// Two-element azimuth steering vector `[1, e^{-jπ sin θ}]`.
pub fn capon_steering(theta: f64) -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -PI * theta.sin())]
}

/// Steering vectors for the selected channels at elevation zero, relative to
/// the first channel. For the default half-wavelength pair this reduces to
/// [`capon_steering`].
pub fn geometry_steering(theta: f64, channels: &[usize], geom: &ArrayGeometry) -> Vec<Complex64> {
    let k = 2.0 * PI / geom.wavelength;
    let x0 = geom.element_offsets[channels[0]][0];
    channels
        .iter()
        .map(|&c| Complex64::from_polar(1.0, -k * (geom.element_offsets[c][0] - x0) * theta.sin()))
        .collect()
}

/// Precomputed steering vectors for every azimuth of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CaponSteering {
    pub vectors: Vec<Vec<Complex64>>,
}

impl CaponSteering {
    pub fn new(grid: &SteeringGrid, channels: &[usize], geom: &ArrayGeometry) -> Self {
        Self {
            vectors: grid
                .azimuth_angles
                .iter()
                .map(|&theta| geometry_steering(theta, channels, geom))
                .collect(),
        }
    }

    /// The literal two-element form, independent of geometry.
    pub fn two_element(grid: &SteeringGrid) -> Self {
        Self {
            vectors: grid.azimuth_angles.iter().map(|&t| capon_steering(t).to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }
}

/// One azimuth row of the Capon spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct CaponRow {
    pub power: Vec<f64>,
    pub clamped: usize,
}

pub fn capon_spectrum(cov: &SpatialCovariance, steering: &CaponSteering) -> Result<CaponRow> {
    let n = cov.pseudo_inverse.nrows();
    if steering.dim() != n {
        return Err(mismatch("Capon steering", n, steering.dim()));
    }
    let mut power = Vec::with_capacity(steering.vectors.len());
    let mut null_dirs = Vec::new();
    let pinv_norm = frobenius(&cov.pseudo_inverse);
    for (i, a) in steering.vectors.iter().enumerate() {
        let q = quadratic_form(&cov.pseudo_inverse, a).re;
        if q <= null_threshold(pinv_norm, a) {
            null_dirs.push(i);
            power.push(f64::NAN);
        } else {
            power.push(1.0 / q);
        }
    }
    if !null_dirs.is_empty() {
        let fill = power.iter().copied().filter(|p| p.is_finite()).fold(f64::NAN, f64::max);
        let fill = if fill.is_nan() { 0.0 } else { fill };
        for i in &null_dirs {
            power[*i] = fill;
        }
    }
    Ok(CaponRow {
        power,
        clamped: null_dirs.len(),
    })
}

/// MVDR weight `R⁺a / (aᴴ R⁺ a)`; `None` in a null direction.
pub fn mvdr_weights(pseudo_inverse: &CMatrix, a: &[Complex64]) -> Option<Vec<Complex64>> {
    let q = quadratic_form(pseudo_inverse, a);
    if q.re <= null_threshold(frobenius(pseudo_inverse), a) {
        return None;
    }
    let n = a.len();
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| pseudo_inverse[(i, j)] * a[j]).sum::<Complex64>() / q)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CaponDiagnostics {
    /// Cells clamped because the quadratic form vanished.
    pub clamped_cells: usize,
}

/// Capon range-azimuth stage with steering vectors and channels fixed up front.
#[derive(Debug, Clone)]
pub struct CaponProcessor {
    channels: Vec<usize>,
    steering: CaponSteering,
    window: DopplerWindow,
}

impl CaponProcessor {
    pub fn new(
        grid: &SteeringGrid,
        geom: &ArrayGeometry,
        selection: ChannelSelection,
        window: DopplerWindow,
    ) -> Self {
        let channels = selection.channels(geom);
        let steering = CaponSteering::new(grid, &channels, geom);
        Self {
            channels,
            steering,
            window,
        }
    }

    pub fn channels(&self) -> &[usize] {
        &self.channels
    }

    pub fn map(&self, rd: &RangeDopplerCube) -> Result<(RangeAzimuthMap, CaponDiagnostics)> {
        capon_range_azimuth(rd, &self.steering, &self.window, &self.channels)
    }
}

pub fn capon_range_azimuth(
    rd: &RangeDopplerCube,
    steering: &CaponSteering,
    window: &DopplerWindow,
    channels: &[usize],
) -> Result<(RangeAzimuthMap, CaponDiagnostics)> {
    let mut map = RangeAzimuthMap::zeros(rd.num_range_bins, steering.vectors.len(), Method::Capon);
    map.frame_index = rd.frame_index;
    let mut diag = CaponDiagnostics::default();
    for r in 0..rd.num_range_bins {
        let x = collect_snapshots(rd, r, window, channels)?;
        let cov = spatial_covariance(&x)?;
        let row = capon_spectrum(&cov, steering)?;
        diag.clamped_cells += row.clamped;
        let start = r * map.num_azimuth_bins;
        map.power[start..start + map.num_azimuth_bins].copy_from_slice(&row.power);
    }
    Ok((map, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::RadarConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cplx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cn(rng: &mut ChaCha8Rng) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    fn snapshots(rows: &[&[Complex64]]) -> SnapshotMatrix {
        let cols = rows[0].len();
        SnapshotMatrix {
            data: CMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]),
        }
    }

    fn grid() -> SteeringGrid {
        SteeringGrid::uniform_deg(60.0, 1.0, &[0.0]).unwrap()
    }

    #[test]
    fn steering_examples() {
        let a = capon_steering(0.0);
        assert_eq!(a[0], cplx(1.0, 0.0));
        assert!((a[1] - cplx(1.0, 0.0)).norm() < 1e-15);
        let a = capon_steering(PI / 2.0);
        assert!((a[1] - cplx(-1.0, 0.0)).norm() < 1e-15);
        let a = capon_steering(30f64.to_radians());
        assert!((a[1] - cplx(0.0, -1.0)).norm() < 1e-15);
        for t in [-1.2, -0.3, 0.7] {
            let a = capon_steering(t);
            assert_eq!(a[0], cplx(1.0, 0.0));
            assert!((a[1].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn geometry_steering_reduces_to_two_element_form() {
        let cfg = RadarConfig::default();
        let geom = ArrayGeometry::for_config(&cfg);
        let channels = ChannelSelection::AzimuthPair.channels(&geom);
        assert_eq!(channels, vec![2, 0]);
        for deg in [-60.0f64, -13.0, 0.0, 25.0, 60.0] {
            let t = deg.to_radians();
            let g = geometry_steering(t, &channels, &geom);
            let l = capon_steering(t);
            assert!((g[0] - l[0]).norm() < 1e-12 && (g[1] - l[1]).norm() < 1e-12);
        }
        assert_eq!(ChannelSelection::AllReceivers.channels(&geom), vec![2, 0, 1]);
    }

    #[test]
    fn snapshot_collection() {
        let mut rd = RangeDopplerCube::zeros(3, 4, 16);
        for (i, v) in rd.values.iter_mut().enumerate() {
            *v = cplx(i as f64, -(i as f64));
        }
        let one = DopplerWindow::centered(&rd, 1).unwrap();
        let x = collect_snapshots(&rd, 2, &one, &[2, 0]).unwrap();
        assert_eq!((x.num_channels(), x.num_snapshots()), (2, 1));
        let five = DopplerWindow::centered(&rd, 5).unwrap();
        let x = collect_snapshots(&rd, 1, &five, &[2, 0]).unwrap();
        assert_eq!((x.num_channels(), x.num_snapshots()), (2, 5));
        for (j, &d) in five.bins().iter().enumerate() {
            assert_eq!(x.data[(0, j)], rd.get(2, 1, d));
            assert_eq!(x.data[(1, j)], rd.get(0, 1, d));
        }
        assert!(DopplerWindow::around(15, 2, 16).is_err());
        assert!(collect_snapshots(&rd, 1, &five, &[0, 3]).is_err());
        assert!(collect_snapshots(&rd, 1, &five, &[0]).is_err());
        assert!(collect_snapshots(&rd, 9, &five, &[0, 1]).is_err());
    }

    #[test]
    fn covariance_examples() {
        let one = cplx(1.0, 0.0);
        let zero = cplx(0.0, 0.0);
        let cov = spatial_covariance(&snapshots(&[&[one], &[zero]])).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
        assert!(frobenius(&(&cov.matrix - &expect)) < 1e-15);
        assert!(frobenius(&(&cov.pseudo_inverse - &expect)) < 1e-12);

        let cov = spatial_covariance(&snapshots(&[&[one, zero], &[zero, one]])).unwrap();
        assert!(frobenius(&(&cov.matrix - CMatrix::identity(2, 2) * cplx(0.5, 0.0))) < 1e-15);
        assert!(frobenius(&(&cov.pseudo_inverse - CMatrix::identity(2, 2) * cplx(2.0, 0.0))) < 1e-12);

        let nan = cplx(f64::NAN, 0.0);
        assert!(spatial_covariance(&snapshots(&[&[nan], &[one]])).is_err());
    }

    #[test]
    fn covariance_is_hermitian_psd_and_pinv_satisfies_penrose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let row0: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let row1: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            assert!(cov.hermitian_defect() <= 1e-12);
            let r = &cov.matrix;
            let trace = (r[(0, 0)] + r[(1, 1)]).re;
            let eig = r.clone().symmetric_eigenvalues();
            assert!(eig.iter().all(|&l| l >= -1e-10 * trace));
            let p = &cov.pseudo_inverse;
            assert!(frobenius(&(r * p * r - r)) < 1e-10);
            assert!(frobenius(&(p * r * p - p)) < 1e-10);
            let rp = r * p;
            let pr = p * r;
            assert!(frobenius(&(rp.adjoint() - &rp)) < 1e-10);
            assert!(frobenius(&(pr.adjoint() - &pr)) < 1e-10);
        }
    }

    #[test]
    fn identity_covariance_gives_flat_half() {
        let cov = SpatialCovariance {
            matrix: CMatrix::identity(2, 2),
            pseudo_inverse: CMatrix::identity(2, 2),
        };
        let row = capon_spectrum(&cov, &CaponSteering::two_element(&grid())).unwrap();
        assert!(row.power.iter().all(|p| (p - 0.5).abs() < 1e-12));
        assert_eq!(row.clamped, 0);
    }

    fn brute_force_spectrum(r_inv: &CMatrix, grid: &SteeringGrid) -> Vec<f64> {
        grid.azimuth_angles
            .iter()
            .map(|&t| {
                let a = [cplx(1.0, 0.0), cplx((PI * t.sin()).cos(), -(PI * t.sin()).sin())];
                let mut q = cplx(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        q += a[i].conj() * r_inv[(i, j)] * a[j];
                    }
                }
                1.0 / q.re
            })
            .collect()
    }

    fn argmax(v: &[f64]) -> usize {
        v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0
    }

    fn argmin(v: &[f64]) -> usize {
        v.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0
    }

    #[test]
    fn noisy_single_target_peaks_at_truth() {
        let g = grid();
        let steering = CaponSteering::two_element(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (idx, deg) in [(40usize, -20.0f64), (60, 0.0), (95, 35.0), (110, 50.0)] {
            let a = capon_steering(deg.to_radians());
            let s: Vec<Complex64> = (0..5).map(|_| cn(&mut rng) * 10.0).collect();
            let row0: Vec<_> = s.iter().map(|&v| v * a[0] + cn(&mut rng)).collect();
            let row1: Vec<_> = s.iter().map(|&v| v * a[1] + cn(&mut rng)).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            let row = capon_spectrum(&cov, &steering).unwrap();
            let oracle = brute_force_spectrum(&cov.pseudo_inverse, &g);
            for (x, y) in row.power.iter().zip(&oracle) {
                assert!((x - y).abs() <= 1e-9 * y);
            }
            assert!((argmax(&row.power) as i64 - idx as i64).abs() <= 1, "{deg}°");
        }
    }

    #[test]
    fn noiseless_rank_one_pinv_spectrum_bottoms_out_at_truth() {
        let g = grid();
        let steering = CaponSteering::two_element(&g);
        for (idx, deg) in [(50usize, -10.0f64), (60, 0.0), (80, 20.0)] {
            let a = capon_steering(deg.to_radians());
            let s = [cplx(1.0, 0.5), cplx(-0.3, 0.9), cplx(0.7, -0.2)];
            let row0: Vec<_> = s.iter().map(|&v| v * a[0]).collect();
            let row1: Vec<_> = s.iter().map(|&v| v * a[1]).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            let row = capon_spectrum(&cov, &steering).unwrap();
            assert_eq!(argmin(&row.power), idx);
            // any noise floor restores the peak at the truth
            let loaded = SpatialCovariance {
                pseudo_inverse: pseudo_inverse(&(&cov.matrix + CMatrix::identity(2, 2) * cplx(1e-6, 0.0)), PINV_RCOND),
                matrix: cov.matrix.clone(),
            };
            let row = capon_spectrum(&loaded, &steering).unwrap();
            assert_eq!(argmax(&row.power), idx);
        }
    }

    #[test]
    fn two_uncorrelated_targets_give_two_maxima_on_a_four_element_ula() {
        let cfg = RadarConfig {
            num_rx: 4,
            ..RadarConfig::default()
        };
        let lambda = cfg.wavelength();
        let geom = ArrayGeometry {
            wavelength: lambda,
            element_offsets: (0..4).map(|i| [i as f64 * lambda / 2.0, 0.0]).collect(),
            azimuth_pair: [0, 1],
        };
        let g = grid();
        let channels = ChannelSelection::AllReceivers.channels(&geom);
        let steering = CaponSteering::new(&g, &channels, &geom);
        let (t1, t2) = (-20f64, 25f64);
        let v1 = geometry_steering(t1.to_radians(), &channels, &geom);
        let v2 = geometry_steering(t2.to_radians(), &channels, &geom);
        let r = CMatrix::from_fn(4, 4, |i, j| {
            v1[i] * v1[j].conj() + v2[i] * v2[j].conj() + if i == j { cplx(0.01, 0.0) } else { cplx(0.0, 0.0) }
        });
        let cov = SpatialCovariance {
            pseudo_inverse: pseudo_inverse(&r, PINV_RCOND),
            matrix: r,
        };
        let p = capon_spectrum(&cov, &steering).unwrap().power;
        let maxima: Vec<usize> = (1..p.len() - 1).filter(|&i| p[i] > p[i - 1] && p[i] > p[i + 1]).collect();
        assert_eq!(maxima.len(), 2, "{maxima:?}");
        assert!((maxima[0] as i64 - 40).abs() <= 1);
        assert!((maxima[1] as i64 - 85).abs() <= 1);
    }

    #[test]
    fn two_element_spectrum_has_a_single_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let steering = CaponSteering::two_element(&grid());
        for _ in 0..20 {
            let row0: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let row1: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            let p = capon_spectrum(&cov, &steering).unwrap().power;
            let interior = (1..p.len() - 1).filter(|&i| p[i] > p[i - 1] && p[i] > p[i + 1]).count();
            assert!(interior <= 1);
        }
    }

    #[test]
    fn zero_cube_is_clamped_to_uniform_zero_map() {
        let g = grid();
        let geom = ArrayGeometry::for_config(&RadarConfig::default());
        let rd = RangeDopplerCube::zeros(3, 32, 128);
        let window = DopplerWindow::centered(&rd, 5).unwrap();
        let proc = CaponProcessor::new(&g, &geom, ChannelSelection::AzimuthPair, window);
        let (map, diag) = proc.map(&rd).unwrap();
        assert!(map.power.iter().all(|&p| p == 0.0));
        assert_eq!(diag.clamped_cells, 32 * 121);
        assert_eq!(map.method, Method::Capon);
    }

    #[test]
    fn partially_null_row_clamps_to_finite_maximum() {
        // R = a(0) a(0)ᴴ has a null direction where a(θ) ⟂ a(0), i.e. sin θ = ±1.
        let a0 = capon_steering(0.0);
        let r = CMatrix::from_fn(2, 2, |i, j| a0[i] * a0[j].conj());
        let cov = SpatialCovariance {
            pseudo_inverse: pseudo_inverse(&r, PINV_RCOND),
            matrix: r,
        };
        let g = SteeringGrid::new(vec![-PI / 2.0, 0.0, 0.3], vec![0.0]).unwrap();
        let row = capon_spectrum(&cov, &CaponSteering::two_element(&g)).unwrap();
        assert_eq!(row.clamped, 1);
        let finite_max = row.power[1].max(row.power[2]);
        assert_eq!(row.power[0], finite_max);
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let steering = CaponSteering::two_element(&grid());
        for _ in 0..10 {
            let row0: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let row1: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            let c = rng.random_range(0.01..100.0);
            let scaled_r = &cov.matrix * cplx(c, 0.0);
            let scaled = SpatialCovariance {
                pseudo_inverse: pseudo_inverse(&scaled_r, PINV_RCOND),
                matrix: scaled_r,
            };
            let p = capon_spectrum(&cov, &steering).unwrap().power;
            let q = capon_spectrum(&scaled, &steering).unwrap().power;
            for (x, y) in p.iter().zip(&q) {
                assert!((y - c * x).abs() <= 1e-9 * y);
            }
            assert_eq!(argmax(&p), argmax(&q));
        }
    }

    #[test]
    fn quadratic_form_is_real_and_positive_for_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let steering = CaponSteering::two_element(&grid());
        for _ in 0..20 {
            let row0: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let row1: Vec<_> = (0..5).map(|_| cn(&mut rng)).collect();
            let cov = spatial_covariance(&snapshots(&[&row0, &row1])).unwrap();
            for a in &steering.vectors {
                let q = quadratic_form(&cov.pseudo_inverse, a);
                assert!(q.re > 0.0);
                assert!(q.im.abs() <= 1e-10 * q.re);
            }
        }
    }

    #[test]
    fn mvdr_weight_is_distortionless() {
        let a = capon_steering(0.4);
        let r = CMatrix::from_row_slice(2, 2, &[cplx(2.0, 0.0), cplx(0.3, 0.4), cplx(0.3, -0.4), cplx(1.0, 0.0)]);
        let w = mvdr_weights(&pseudo_inverse(&r, PINV_RCOND), &a).unwrap();
        let gain: Complex64 = w.iter().zip(&a).map(|(w, a)| w.conj() * a).sum();
        assert!((gain - cplx(1.0, 0.0)).norm() < 1e-12);
        assert!(mvdr_weights(&CMatrix::zeros(2, 2), &a).is_none());
    }

    #[test]
    fn steering_dimension_mismatch() {
        let cov = SpatialCovariance {
            matrix: CMatrix::identity(3, 3),
            pseudo_inverse: CMatrix::identity(3, 3),
        };
        assert!(capon_spectrum(&cov, &CaponSteering::two_element(&grid())).is_err());
    }
}
