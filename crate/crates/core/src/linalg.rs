//! 2x2 real matrices and their spectra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Eigenvalues, larger real part first. A complex pair is returned as
    /// `(re + i·im, re - i·im)` with `im > 0`.
    ///
    /// Real roots use the cancellation-free form `r1 = t/2 + sign(t)·√disc`,
    /// `r2 = det / r1`.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let half = 0.5 * self.trace();
        let det = self.det();
        // (a11 - a22)^2/4 + a12 a21 avoids cancellation in half^2 - det
        let diff = 0.5 * (self.a11 - self.a22);
        let disc = diff * diff + self.a12 * self.a21;
        if disc >= 0.0 {
            let root = disc.sqrt();
            let r1 = if half >= 0.0 {
                half + root
            } else {
                half - root
            };
            let r2 = if r1 != 0.0 { det / r1 } else { 0.0 };
            let (hi, lo) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
            [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
        } else {
            let im = (-disc).sqrt();
            [Complex64::new(half, im), Complex64::new(half, -im)]
        }
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, o: &Matrix2) -> f64 {
        [
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}
