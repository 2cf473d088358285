//! Thin wrapper over rustfft holding the forward and inverse plans for one
//! transform size, plus real-field conveniences.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Forward/inverse FFT plans for a fixed length.
pub struct Fft1D {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    len: usize,
}

impl Fft1D {
    /// Plans both transform directions for length n.
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft1D {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            len: n,
        }
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.len
    }

    /// True when the transform length is zero (never, for constructed plans).
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len);
        self.forward.process(data);
    }

    /// In-place inverse transform, normalized by 1/n so that
    /// inverse(forward(x)) = x.
    pub fn inverse(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len);
        self.inverse.process(data);
        let scale = 1.0 / self.len as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }

    /// Forward transform of a real field into a freshly allocated spectrum.
    pub fn forward_real(&self, field: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf);
        buf
    }

    /// Inverse transform returning the real parts; the imaginary residue of a
    /// conjugate-symmetric spectrum is at rounding level and is discarded.
    pub fn inverse_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Largest imaginary magnitude left by an inverse transform; test hook for
/// the real-valuedness invariant.
pub fn max_imag_after_inverse(fft: &Fft1D, spectrum: &[Complex64]) -> f64 {
    let mut buf = spectrum.to_vec();
    fft.inverse(&mut buf);
    buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let angle = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                        x[j] * Complex64::new(angle.cos(), angle.sin())
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        let fft = Fft1D::new(16);
        let field: Vec<f64> = (0..16).map(|j| (j as f64 * 0.37).sin() + 0.2).collect();
        let got = fft.forward_real(&field);
        let want = direct_dft(
            &field
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
        );
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn real_spectrum_inverse_has_tiny_imaginary_part() {
        let fft = Fft1D::new(64);
        let field: Vec<f64> = (0..64).map(|j| (j as f64).cos()).collect();
        let spec = fft.forward_real(&field);
        assert!(max_imag_after_inverse(&fft, &spec) < 1e-12);
    }

    proptest! {
        #[test]
        fn roundtrip_recovers_field(values in proptest::collection::vec(-1e3f64..1e3, 2..200)) {
            let n = values.len();
            let fft = Fft1D::new(n);
            let spec = fft.forward_real(&values);
            let back = fft.inverse_real(&spec);
            let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (a, b) in values.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-10 * scale);
            }
        }
    }
}
