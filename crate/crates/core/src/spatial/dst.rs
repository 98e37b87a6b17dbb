//! Type-I discrete sine transform backed by a complex FFT.
//!
//! `S_m = sum_{i=1}^{N} v_i sin(pi m i / (N + 1))` for `m = 1..N`. The
//! transform is its own inverse up to the factor `2 / (N + 1)`.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Scalar;

#[derive(Clone)]
pub struct DstI<T: Scalar> {
    len: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Scalar> fmt::Debug for DstI<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DstI").field("len", &self.len).finish()
    }
}

impl<T: Scalar> DstI<T> {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "DST length must be positive");
        let fft = FftPlanner::new().plan_fft_forward(2 * (len + 1));
        Self { len, fft }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform. `input` may be shorter than the length, missing
    /// entries are treated as zeros.
    pub fn transform(&self, input: &[T]) -> Vec<T> {
        assert!(input.len() <= self.len, "DST input longer than transform");
        let n = self.len;
        // odd extension [0, v, 0, -rev(v)]
        let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * (n + 1)];
        for (i, &v) in input.iter().enumerate() {
            buf[i + 1].re = v;
            buf[2 * (n + 1) - 1 - i].re = -v;
        }
        self.fft.process(&mut buf);
        let minus_half = T::of(-0.5);
        (1..=n).map(|m| minus_half * buf[m].im).collect()
    }
}

/// Direct O(N²) evaluation, used as a reference.
pub fn naive_dst1<T: Scalar>(input: &[T], len: usize) -> Vec<T> {
    let denom = T::of_usize(len + 1);
    (1..=len)
        .map(|m| {
            input
                .iter()
                .enumerate()
                .map(|(i, &v)| v * (T::PI() * T::of_usize(m * (i + 1)) / denom).sin())
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum() {
        for n in [1usize, 2, 5, 16, 63, 100] {
            let v: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
            let fast = DstI::new(n).transform(&v);
            let slow = naive_dst1(&v, n);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-11 * (1.0 + b.abs()), "n={n}");
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let n = 37;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let dst = DstI::new(n);
        let back = dst.transform(&dst.transform(&v));
        let scale = 2.0 / (n as f64 + 1.0);
        for (a, b) in back.iter().zip(&v) {
            assert!((scale * a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn short_input_is_zero_padded() {
        let dst = DstI::<f64>::new(10);
        let a = dst.transform(&[1.0, 2.0]);
        let b = dst.transform(&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(a, b);
    }
}
