//! Discrete Fourier transforms used by the frequency-domain decomposition.
//!
//! Power-of-two lengths run through an iterative radix-2 Cooley-Tukey
//! kernel; every other length goes through Bluestein's chirp-z algorithm on
//! top of the same kernel, so exact-length transforms of the mirrored
//! signal are available for any input size.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Frequency-domain view of a real signal.
///
/// `bins` holds the full complex spectrum of the (possibly zero-padded)
/// signal; `n_orig` remembers the pre-padding length so the inverse
/// transform can truncate back.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub n_orig: usize,
}

impl Spectrum {
    /// Max deviation from Hermitian symmetry, `X[n-k] == conj(X[k])`.
    /// Zero (up to rounding) whenever the time-domain signal is real.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.bins.len();
        let mut worst = 0.0f64;
        for k in 1..n {
            let d = (self.bins[n - k] - self.bins[k].conj()).norm();
            worst = worst.max(d);
        }
        worst.max(self.bins[0].im.abs())
    }
}

/// Forward transform of a real signal, zero-padded to the next power of two.
pub fn fft_real(signal: &[f64]) -> Result<Spectrum> {
    if signal.is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = signal.len().next_power_of_two();
    let mut buf: Vec<Complex64> = signal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    fft_pow2(&mut buf, false);
    Ok(Spectrum {
        bins: buf,
        n_orig: signal.len(),
    })
}

/// Inverse of [`fft_real`]: returns the original (truncated) real signal.
pub fn ifft_real(spectrum: &Spectrum) -> Vec<f64> {
    let mut buf = spectrum.bins.clone();
    fft_pow2(&mut buf, true);
    buf.truncate(spectrum.n_orig);
    buf.into_iter().map(|c| c.re).collect()
}

/// Forward DFT at the exact input length (radix-2 or Bluestein).
pub fn dft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    if buf.len().is_power_of_two() {
        fft_pow2(&mut buf, false);
        buf
    } else {
        bluestein(&buf, false)
    }
}

/// Inverse DFT at the exact input length, normalized by 1/n.
pub fn idft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    if buf.len().is_power_of_two() {
        fft_pow2(&mut buf, true);
        buf
    } else {
        bluestein(&buf, true)
    }
}

/// In-place radix-2 FFT. `inverse` flips the twiddle sign and applies the
/// 1/n normalization.
fn fft_pow2(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang_base = sign * 2.0 * std::f64::consts::PI / len as f64;
        for start in (0..n).step_by(len) {
            for j in 0..len / 2 {
                // Direct sin_cos per twiddle keeps rounding at machine level.
                let (s, c) = (ang_base * j as f64).sin_cos();
                let w = Complex64::new(c, s);
                let a = buf[start + j];
                let b = buf[start + j + len / 2] * w;
                buf[start + j] = a + b;
                buf[start + j + len / 2] = a - b;
            }
        }
        len <<= 1;
    }

    if inverse {
        let scale = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

/// Chirp-z transform for arbitrary n. The quadratic phase exponent is
/// reduced mod 2n in integer arithmetic before touching floats, which keeps
/// the chirp accurate for large indices.
fn bluestein(input: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = input.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let r = ((k as u64 * k as u64) % (2 * n as u64)) as f64;
            let ang = sign * std::f64::consts::PI * r / n as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();

    let m = (2 * n - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = input[k] * chirp[k];
        b[k] = chirp[k].conj();
    }
    for k in 1..n {
        b[m - k] = chirp[k].conj();
    }

    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for k in 0..m {
        a[k] *= b[k];
    }
    fft_pow2(&mut a, true);

    let mut out: Vec<Complex64> = (0..n).map(|k| a[k] * chirp[k]).collect();
    if inverse {
        let scale = 1.0 / n as f64;
        for v in out.iter_mut() {
            *v *= scale;
        }
    }
    out
}
