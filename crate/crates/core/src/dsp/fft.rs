use num_complex::Complex;

use crate::scalar::Sample;

use super::DspError;

/// Precomputed twiddles and bit-reversal permutation for one transform size.
///
/// Iterative decimation-in-time radix-2. A plan is immutable once built and
/// can be shared between threads.
#[derive(Debug, Clone)]
pub struct FftPlan<T> {
    len: usize,
    /// `exp(-2*pi*i*k/len)` for `k < len/2`.
    twiddles: Vec<Complex<T>>,
    reversed: Vec<u32>,
}

impl<T: Sample> FftPlan<T> {
    pub fn new(len: usize) -> Result<Self, DspError> {
        if len == 0 || !len.is_power_of_two() || len > u32::MAX as usize {
            return Err(DspError::InvalidSize(len));
        }
        let step = -2.0 * std::f64::consts::PI / len as f64;
        let twiddles = (0..len / 2)
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                Complex::new(T::of(c), T::of(s))
            })
            .collect();
        let bits = len.trailing_zeros();
        let reversed = (0..len as u32)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (32 - bits)
                }
            })
            .collect();
        Ok(Self {
            len,
            twiddles,
            reversed,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform, `X[k] = sum x[n] exp(-2*pi*i*k*n/N)`.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.butterflies(buf, false);
    }

    /// In-place inverse transform including the `1/N` scale.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.butterflies(buf, true);
        let scale = T::one() / T::of(self.len as f64);
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }

    fn butterflies(&self, buf: &mut [Complex<T>], inverse: bool) {
        assert_eq!(buf.len(), self.len, "buffer length must match the plan");
        let n = self.len;
        for i in 0..n {
            let j = self.reversed[i] as usize;
            if i < j {
                buf.swap(i, j);
            }
        }

        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for block in buf.chunks_exact_mut(size) {
                let (lo, hi) = block.split_at_mut(half);
                for (j, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let w = self.twiddles[j * stride];
                    let w = if inverse { w.conj() } else { w };
                    let t = *b * w;
                    *b = *a - t;
                    *a = *a + t;
                }
            }
            size *= 2;
        }
    }
}

/// Transform `input` out of place. The length must be a power of two.
pub fn fft<T: Sample>(input: &[Complex<T>], inverse: bool) -> Result<Vec<Complex<T>>, DspError> {
    let plan = FftPlan::new(input.len())?;
    let mut buf = input.to_vec();
    if inverse {
        plan.inverse(&mut buf);
    } else {
        plan.forward(&mut buf);
    }
    Ok(buf)
}
