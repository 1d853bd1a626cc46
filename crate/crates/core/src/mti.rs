//! Exponential clutter estimation and subtraction on range-Doppler cubes.
//!
//! Per bin: `C_k = α·C_{k-1} + (1-α)·X_k` and `Y_k = X_k - C_k`, applied
//! identically to every receiver on the complex values.
//!
//! The state is kept as the last input and last residual, using the
//! equivalent update `Y_k = α·((X_k - X_{k-1}) + Y_{k-1})`. This avoids the
//! cancellation in `X_k - C_k` once the estimate has converged.

use num_complex::Complex64;

use crate::error::{mismatch, Error, Result};
use crate::frontend::RangeDopplerCube;

/// Forgetting factor used when nothing else is configured.
pub const DEFAULT_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct ClutterState {
    last_input: Vec<Complex64>,
    residual: Vec<Complex64>,
    /// `(rx, range_bins, doppler_bins)`
    pub dims: (usize, usize, usize),
    pub alpha: f64,
    pub frames_seen: u64,
}

impl ClutterState {
    pub fn new(dims: (usize, usize, usize), alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("MTI alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Self {
            last_input: vec![Complex64::new(0.0, 0.0); dims.0 * dims.1 * dims.2],
            residual: vec![Complex64::new(0.0, 0.0); dims.0 * dims.1 * dims.2],
            dims,
            alpha,
            frames_seen: 0,
        })
    }

    /// Updates the clutter estimate with `rdm` and returns the residual.
    pub fn step(&mut self, rdm: &RangeDopplerCube) -> Result<RangeDopplerCube> {
        if rdm.dims() != self.dims {
            return Err(mismatch("MTI input", format!("{:?}", self.dims), format!("{:?}", rdm.dims())));
        }
        let a = self.alpha;
        let mut out = rdm.clone();
        for (((p, r), y), &x) in self
            .last_input
            .iter_mut()
            .zip(self.residual.iter_mut())
            .zip(out.values.iter_mut())
            .zip(&rdm.values)
        {
            *r = ((x - *p) + *r) * a;
            *p = x;
            *y = *r;
        }
        self.frames_seen += 1;
        Ok(out)
    }

    /// Current clutter estimate `C_k`.
    pub fn estimate(&self) -> Vec<Complex64> {
        self.last_input.iter().zip(&self.residual).map(|(x, y)| x - y).collect()
    }

    /// Clears the estimate, as at the start of a new recording.
    pub fn reset(&mut self) {
        self.last_input.fill(Complex64::new(0.0, 0.0));
        self.residual.fill(Complex64::new(0.0, 0.0));
        self.frames_seen = 0;
    }
}

pub fn init_clutter(dims: (usize, usize, usize), alpha: f64) -> Result<ClutterState> {
    ClutterState::new(dims, alpha)
}

pub fn mti_step(state: &mut ClutterState, rdm: &RangeDopplerCube) -> Result<RangeDopplerCube> {
    state.step(rdm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_with(value: Complex64, dims: (usize, usize, usize)) -> RangeDopplerCube {
        let mut c = RangeDopplerCube::zeros(dims.0, dims.1, dims.2);
        c.values.fill(value);
        c
    }

    fn total_norm(c: &RangeDopplerCube) -> f64 {
        c.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn init_examples() {
        let s = init_clutter((3, 32, 128), 0.01).unwrap();
        assert_eq!(s.estimate().len(), 3 * 32 * 128);
        assert!(s.estimate().iter().all(|z| z.norm() == 0.0));
        assert_eq!(s.frames_seen, 0);
        assert!(init_clutter((3, 32, 128), 1.5).is_err());
        assert!(init_clutter((3, 32, 128), -0.1).is_err());
    }

    #[test]
    fn first_step_scales_by_alpha() {
        let dims = (2, 3, 4);
        let x = Complex64::new(2.0, -1.0);
        let mut s = init_clutter(dims, 0.01).unwrap();
        let y = s.step(&cube_with(x, dims)).unwrap();
        for v in &y.values {
            assert!((v - x * 0.01).norm() < 1e-15);
        }
        assert_eq!(s.frames_seen, 1);
    }

    #[test]
    fn zero_in_zero_out() {
        let dims = (3, 4, 8);
        let mut s = init_clutter(dims, 0.01).unwrap();
        for _ in 0..10 {
            let y = s.step(&cube_with(Complex64::new(0.0, 0.0), dims)).unwrap();
            assert!(y.values.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn constant_input_follows_closed_form() {
        // Y_k = α^k x for C_0 = 0 and constant input x.
        let dims = (1, 2, 2);
        let x = Complex64::new(3.0, 4.0);
        let alpha: f64 = 0.01;
        let mut s = init_clutter(dims, alpha).unwrap();
        for k in 1..=50 {
            let y = s.step(&cube_with(x, dims)).unwrap();
            let expected = x * alpha.powi(k);
            for v in &y.values {
                let err = (v - expected).norm();
                assert!(err <= 1e-9 * expected.norm().max(f64::MIN_POSITIVE) || err < 1e-300, "k={k}");
            }
            if k == 50 {
                assert!(y.values.iter().all(|z| z.norm() / x.norm() <= 1e-99));
            }
        }
    }

    #[test]
    fn residual_norm_bound_for_constant_input() {
        let dims = (3, 4, 4);
        let mut c = RangeDopplerCube::zeros(dims.0, dims.1, dims.2);
        for (i, v) in c.values.iter_mut().enumerate() {
            *v = Complex64::new((i as f64 * 0.3).sin(), (i as f64 * 0.7).cos());
        }
        let norm_x = total_norm(&c);
        for alpha in [0.01, 0.3, 0.9] {
            let mut s = init_clutter(dims, alpha).unwrap();
            for k in 1..=20 {
                let y = s.step(&c).unwrap();
                assert!(total_norm(&y) <= alpha.powi(k) * norm_x * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn alternating_input_passes_with_high_gain() {
        let dims = (1, 1, 1);
        let alpha = 0.01;
        let mut s = init_clutter(dims, alpha).unwrap();
        let x = Complex64::new(1.0, 0.0);
        let mut last = 0.0;
        for k in 0..200 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            last = s.step(&cube_with(x * sign, dims)).unwrap().values[0].norm();
        }
        // steady state gain is 2α/(1+α) for this literal recursion
        let steady = 2.0 * alpha / (1.0 + alpha);
        assert!((last - steady).abs() < 1e-6);
        // the swapped convention α' = 1 - α gives high-pass gain >= 1 - α
        let mut swapped = init_clutter(dims, 1.0 - alpha).unwrap();
        for k in 0..2000 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            last = swapped.step(&cube_with(x * sign, dims)).unwrap().values[0].norm();
        }
        assert!(last >= 1.0 - alpha - 1e-6, "gain {last}");
    }

    #[test]
    fn filter_is_linear_in_its_input_stream() {
        let dims = (2, 2, 2);
        let a = Complex64::new(0.5, 1.5);
        let mut s1 = init_clutter(dims, 0.2).unwrap();
        let mut s2 = init_clutter(dims, 0.2).unwrap();
        let mut s3 = init_clutter(dims, 0.2).unwrap();
        for k in 0..10 {
            let u = cube_with(Complex64::new(k as f64, 1.0), dims);
            let v = cube_with(Complex64::new(-1.0, (k * k) as f64), dims);
            let mut w = u.clone();
            for (z, (p, q)) in w.values.iter_mut().zip(u.values.iter().zip(&v.values)) {
                *z = a * p + q;
            }
            let (yu, yv, yw) = (s1.step(&u).unwrap(), s2.step(&v).unwrap(), s3.step(&w).unwrap());
            for i in 0..yw.values.len() {
                assert!((yw.values[i] - (a * yu.values[i] + yv.values[i])).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch_and_reset() {
        let mut s = init_clutter((1, 2, 3), 0.5).unwrap();
        assert!(s.step(&RangeDopplerCube::zeros(1, 3, 3)).is_err());
        s.step(&cube_with(Complex64::new(1.0, 0.0), (1, 2, 3))).unwrap();
        s.reset();
        assert_eq!(s.frames_seen, 0);
        assert!(s.estimate().iter().all(|z| z.norm() == 0.0));
    }
}
