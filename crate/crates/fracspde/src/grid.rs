//! Periodic spatial grid: the truncation [-L, L) of the line sampled at N
//! equispaced points, with the matching discrete frequencies k/(2L).

use crate::error::{Error, Result};

/// Periodic truncation of the real line with N points on [-L, L).
///
/// Points are stored in FFT order: index j holds coordinate j*dx for
/// j < N/2 and (j-N)*dx otherwise; frequency index k holds k/(2L) with the
/// same signed wrapping, matching the e^{2*pi*i*x*xi} transform convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    n_points: usize,
}

impl Grid1D {
    /// Builds a grid; the half-width must be positive and N positive and even.
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(
                "half_width",
                format!("{half_width} is not positive"),
            ));
        }
        if n_points == 0 || n_points % 2 != 0 {
            return Err(Error::invalid(
                "n_points",
                format!("{n_points} is not positive and even"),
            ));
        }
        Ok(Grid1D {
            half_width,
            n_points,
        })
    }

    /// Domain half-width L; the grid covers [-L, L).
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of grid points N.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing dx = 2L/N.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    /// Signed coordinate of point j in FFT order.
    pub fn x(&self, j: usize) -> f64 {
        let n = self.n_points;
        let signed = if j < n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        };
        signed * self.dx()
    }

    /// Signed frequency of mode k in FFT order; the unpaired Nyquist mode
    /// sits at index N/2 with value -N/(4L).
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.n_points;
        let signed = if k < n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        signed / (2.0 * self.half_width)
    }

    /// All coordinates in FFT order.
    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// All frequencies in FFT order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.frequency(k)).collect()
    }
}
