use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::CircleError;

/// Smallest admissible number of grid nodes.
pub const MIN_GRID_SIZE: usize = 16;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform midpoint grid on the unit circle.
///
/// Node `j` sits at angle `-π + (j + ½)·2π/N`, so neither `0` nor `±π` is ever
/// a node. Cloning is cheap: the FFT plans are shared.
#[derive(Clone)]
pub struct CircleGrid {
    size: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for CircleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircleGrid")
            .field("size", &self.size)
            .finish()
    }
}

impl PartialEq for CircleGrid {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
    }
}

impl Eq for CircleGrid {}

impl CircleGrid {
    pub fn new(size: usize) -> Result<Self, CircleError> {
        if size < MIN_GRID_SIZE || !size.is_power_of_two() {
            return Err(CircleError::InvalidGridSize(size));
        }
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        };
        Ok(Self {
            size,
            plans: Arc::new(plans),
        })
    }

    /// Grid with `2^log2_size` nodes.
    pub fn with_log2(log2_size: u32) -> Result<Self, CircleError> {
        let size = 1usize
            .checked_shl(log2_size)
            .ok_or(CircleError::InvalidGridSize(usize::MAX))?;
        Self::new(size)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.size as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * self.step()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.size).map(move |j| self.node(j))
    }

    /// The same circle with twice as many nodes.
    pub fn refined(&self) -> Result<Self, CircleError> {
        Self::new(self.size * 2)
    }

    /// Signed frequency stored at FFT bin `index` (range `-N/2..N/2`).
    pub fn frequency(&self, index: usize) -> i64 {
        let half = self.size / 2;
        if index < half {
            index as i64
        } else {
            index as i64 - self.size as i64
        }
    }

    /// Number of nodes inside the closed arc `[a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.nodes().filter(|&t| t >= a && t <= b).count()
    }

    /// Unnormalized forward DFT in place.
    pub(crate) fn dft(&self, buffer: &mut [Complex64]) {
        self.plans.forward.process(buffer);
    }

    /// Unnormalized inverse DFT in place.
    pub(crate) fn idft(&self, buffer: &mut [Complex64]) {
        self.plans.inverse.process(buffer);
    }

    /// Applies the Fourier multiplier `m(k)` to grid samples.
    ///
    /// The half-step phase of the midpoint grid cancels between analysis and
    /// synthesis, so a plain DFT pair is enough here.
    pub fn apply_multiplier<M>(&self, values: &[Complex64], multiplier: M) -> Vec<Complex64>
    where
        M: Fn(i64) -> Complex64,
    {
        assert_eq!(values.len(), self.size, "sample count must match grid size");
        let mut buffer = values.to_vec();
        self.dft(&mut buffer);
        let scale = 1.0 / self.size as f64;
        for (index, c) in buffer.iter_mut().enumerate() {
            *c *= multiplier(self.frequency(index)) * scale;
        }
        self.idft(&mut buffer);
        buffer
    }

    /// Phase `(-1)^k e^{-iπk/N}` relating DFT bins to Fourier coefficients.
    pub(crate) fn coefficient_phase(&self, k: i64) -> Complex64 {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Complex64::from_polar(sign, -PI * k as f64 / self.size as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(CircleGrid::new(8).is_err());
        assert!(CircleGrid::new(48).is_err());
        assert!(CircleGrid::new(64).is_ok());
    }

    #[test]
    fn nodes_avoid_zero_and_pi() {
        let grid = CircleGrid::new(1024).unwrap();
        for t in grid.nodes() {
            assert!(t != 0.0);
            assert!(t.abs() < PI);
        }
        let min_abs = grid.nodes().map(f64::abs).fold(f64::INFINITY, f64::min);
        assert!((min_abs - grid.step() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn frequencies_cover_symmetric_range() {
        let grid = CircleGrid::new(16).unwrap();
        let ks: Vec<i64> = (0..16).map(|i| grid.frequency(i)).collect();
        assert_eq!(ks[0], 0);
        assert_eq!(ks[7], 7);
        assert_eq!(ks[8], -8);
        assert_eq!(ks[15], -1);
    }

    #[test]
    fn counts_arc_nodes() {
        let grid = CircleGrid::new(1 << 12).unwrap();
        let eps = 0.1;
        let expected = eps / grid.step();
        let count = grid.count_in(eps, 2.0 * eps) as f64;
        assert!((count - expected).abs() <= 1.0);
    }
}
