use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use super::GrayGrid;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    #[inline]
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// `exp(i * theta)`.
    #[inline]
    pub fn cis(theta: f64) -> Self {
        Self::new(libm::cos(theta), libm::sin(theta))
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    #[inline]
    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }
}

impl Add for Complex {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

/// Row-major grid of complex bins; bin `(u, v)` lives at `v * width + u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    width: usize,
    height: usize,
    data: Vec<Complex>,
}

impl ComplexGrid {
    #[cfg(test)]
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<Complex>) -> Self {
        debug_assert_eq!(width * height, data.len());
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Complex {
        self.data[v * self.width + u]
    }
}

/// Precomputed forward transform for one length.
///
/// Power-of-two lengths use an iterative radix-2 kernel. Other lengths go
/// through Bluestein's chirp-z identity on a power-of-two buffer of at least
/// `2n - 1` samples.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Trivial,
    Radix2 {
        twiddles: Vec<Complex>,
    },
    Bluestein {
        chirp: Vec<Complex>,
        kernel_spectrum: Vec<Complex>,
        inner: Vec<Complex>,
    },
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let kind = if len <= 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            Kind::Radix2 {
                twiddles: radix2_twiddles(len),
            }
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let inner = radix2_twiddles(m);
            // k^2 is reduced mod 2n before scaling so the angle stays small.
            let modulus = 2 * len as u64;
            let chirp: Vec<Complex> = (0..len as u64)
                .map(|k| {
                    let k2 = (k * k) % modulus;
                    Complex::cis(-PI * k2 as f64 / len as f64)
                })
                .collect();
            let mut kernel = vec![Complex::ZERO; m];
            kernel[0] = chirp[0].conj();
            for k in 1..len {
                kernel[k] = chirp[k].conj();
                kernel[m - k] = chirp[k].conj();
            }
            radix2_in_place(&mut kernel, &inner);
            Kind::Bluestein {
                chirp,
                kernel_spectrum: kernel,
                inner,
            }
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalised forward transform, `X[k] = sum_n x[n] exp(-2 pi i k n / N)`.
    pub fn forward(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2 { twiddles } => radix2_in_place(buf, twiddles),
            Kind::Bluestein {
                chirp,
                kernel_spectrum,
                inner,
            } => {
                let m = kernel_spectrum.len();
                let mut work = vec![Complex::ZERO; m];
                for (w, (x, c)) in work.iter_mut().zip(buf.iter().zip(chirp)) {
                    *w = *x * *c;
                }
                radix2_in_place(&mut work, inner);
                for (w, k) in work.iter_mut().zip(kernel_spectrum) {
                    *w = (*w * *k).conj();
                }
                // inverse via conjugation: ifft(x) = conj(fft(conj(x))) / m
                radix2_in_place(&mut work, inner);
                let inv_m = 1.0 / m as f64;
                for (out, (w, c)) in buf.iter_mut().zip(work.iter().zip(chirp)) {
                    *out = w.conj().scale(inv_m) * *c;
                }
            }
        }
    }
}

fn radix2_twiddles(n: usize) -> Vec<Complex> {
    (0..n / 2)
        .map(|k| Complex::cis(-2.0 * PI * k as f64 / n as f64))
        .collect()
}

fn radix2_in_place(buf: &mut [Complex], twiddles: &[Complex]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for start in (0..n).step_by(size) {
            for k in 0..half {
                let t = buf[start + k + half] * twiddles[k * stride];
                let u = buf[start + k];
                buf[start + k] = u + t;
                buf[start + k + half] = u - t;
            }
        }
        size *= 2;
    }
}

/// Exact 2D DFT with the unnormalised forward convention
/// `F(u, v) = sum_x sum_y g(x, y) exp(-2 pi i (u x / W + v y / H))`.
pub fn dft2(g: &GrayGrid) -> ComplexGrid {
    let (w, h) = (g.width(), g.height());
    let mut data: Vec<Complex> = g.data().iter().map(|&v| Complex::new(v, 0.0)).collect();

    let row_plan = Fft::new(w);
    for row in data.chunks_exact_mut(w) {
        row_plan.forward(row);
    }

    let col_plan = Fft::new(h);
    let mut column = vec![Complex::ZERO; h];
    for u in 0..w {
        for (v, c) in column.iter_mut().enumerate() {
            *c = data[v * w + u];
        }
        col_plan.forward(&mut column);
        for (v, c) in column.iter().enumerate() {
            data[v * w + u] = *c;
        }
    }

    ComplexGrid {
        width: w,
        height: h,
        data,
    }
}
