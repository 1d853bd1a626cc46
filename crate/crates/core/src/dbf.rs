//! Phase-and-sum digital beamforming over a look-angle grid, followed by
//! non-coherent integration over elevation and the Doppler window.
//!
//! The weight for receiver `m` at offset `(d_x, d_y)` is
//! `exp(j·2π/λ·(d_x·cos θ_a·cos φ + d_y·sin φ))` where `θ_a` is the azimuth
//! measured from the array x axis. Grid azimuths are boresight angles, so
//! `θ_a = π/2 − θ`. For the default L-shaped array this yields the familiar
//! `[e^{j k d_x cos θ_a cos φ}, e^{j k d_y sin φ}, 1]`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{mismatch, Result};
use crate::frontend::RangeDopplerCube;
use crate::ra::{DopplerWindow, Method, RangeAzimuthMap, SteeringGrid};
use crate::radar::ArrayGeometry;

/// Weight vector with azimuth measured from the array x axis.
pub fn weight_vector_from_axis(azimuth_from_axis: f64, elevation: f64, geom: &ArrayGeometry) -> Vec<Complex64> {
    let k = 2.0 * PI / geom.wavelength;
    let ux = azimuth_from_axis.cos() * elevation.cos();
    let uy = elevation.sin();
    geom.element_offsets
        .iter()
        .map(|&[dx, dy]| Complex64::from_polar(1.0, k * (dx * ux + dy * uy)))
        .collect()
}

/// Weight vector for a boresight-referenced azimuth.
pub fn weight_vector(azimuth: f64, elevation: f64, geom: &ArrayGeometry) -> Vec<Complex64> {
    weight_vector_from_axis(FRAC_PI_2 - azimuth, elevation, geom)
}

/// Steering weights indexed `[azimuth][elevation][rx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DbfWeights {
    pub weights: Vec<Complex64>,
    pub num_azimuth: usize,
    pub num_elevation: usize,
    pub num_rx: usize,
}

impl DbfWeights {
    #[inline]
    pub fn get(&self, azimuth: usize, elevation: usize) -> &[Complex64] {
        let start = (azimuth * self.num_elevation + elevation) * self.num_rx;
        &self.weights[start..start + self.num_rx]
    }
}

pub fn dbf_weights(grid: &SteeringGrid, geom: &ArrayGeometry) -> DbfWeights {
    let mut weights = Vec::with_capacity(grid.num_azimuth() * grid.num_elevation() * geom.num_rx());
    for &theta in &grid.azimuth_angles {
        for &phi in &grid.elevation_angles {
            weights.extend(weight_vector(theta, phi, geom));
        }
    }
    DbfWeights {
        weights,
        num_azimuth: grid.num_azimuth(),
        num_elevation: grid.num_elevation(),
        num_rx: geom.num_rx(),
    }
}

/// Complex beam outputs indexed `[range][azimuth][elevation][doppler]`,
/// where the Doppler axis enumerates the window bins in order.
#[derive(Debug, Clone, PartialEq)]
pub struct DbfSpectrum {
    pub values: Vec<Complex64>,
    pub num_range_bins: usize,
    pub num_azimuth: usize,
    pub num_elevation: usize,
    pub num_doppler: usize,
    pub frame_index: u64,
}

impl DbfSpectrum {
    #[inline]
    pub fn get(&self, r: usize, az: usize, el: usize, d: usize) -> Complex64 {
        self.values[((r * self.num_azimuth + az) * self.num_elevation + el) * self.num_doppler + d]
    }
}

/// `P(r, θ, φ; d) = Σ_m z_m(r, d) · w_m(θ, φ)` for every `d` in the window.
pub fn dbf_power(rd: &RangeDopplerCube, weights: &DbfWeights, window: &DopplerWindow) -> Result<DbfSpectrum> {
    if rd.num_rx != weights.num_rx {
        return Err(mismatch("DBF receivers", weights.num_rx, rd.num_rx));
    }
    window.check(rd.num_doppler_bins)?;
    let nd = window.len();
    let mut values = Vec::with_capacity(rd.num_range_bins * weights.num_azimuth * weights.num_elevation * nd);
    let mut snapshot = vec![Complex64::new(0.0, 0.0); rd.num_rx * nd];
    for r in 0..rd.num_range_bins {
        for (i, &d) in window.bins().iter().enumerate() {
            for m in 0..rd.num_rx {
                snapshot[i * rd.num_rx + m] = rd.get(m, r, d);
            }
        }
        for az in 0..weights.num_azimuth {
            for el in 0..weights.num_elevation {
                let w = weights.get(az, el);
                for i in 0..nd {
                    let z = &snapshot[i * rd.num_rx..(i + 1) * rd.num_rx];
                    values.push(z.iter().zip(w).map(|(a, b)| a * b).sum());
                }
            }
        }
    }
    Ok(DbfSpectrum {
        values,
        num_range_bins: rd.num_range_bins,
        num_azimuth: weights.num_azimuth,
        num_elevation: weights.num_elevation,
        num_doppler: nd,
        frame_index: rd.frame_index,
    })
}

/// `RA(r, θ) = Σ_φ Σ_d |P(r, θ, φ; d)|`.
pub fn dbf_range_azimuth(spectrum: &DbfSpectrum) -> RangeAzimuthMap {
    let mut map = RangeAzimuthMap::zeros(spectrum.num_range_bins, spectrum.num_azimuth, Method::Dbf);
    map.frame_index = spectrum.frame_index;
    let block = spectrum.num_elevation * spectrum.num_doppler;
    for (cell, chunk) in map.power.iter_mut().zip(spectrum.values.chunks_exact(block)) {
        *cell = chunk.iter().map(|z| z.norm()).sum();
    }
    map
}

pub fn dbf_map(rd: &RangeDopplerCube, weights: &DbfWeights, window: &DopplerWindow) -> Result<RangeAzimuthMap> {
    Ok(dbf_range_azimuth(&dbf_power(rd, weights, window)?))
}
