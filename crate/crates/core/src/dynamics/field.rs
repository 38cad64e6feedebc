//! Sampled real fields on a periodic space-time box and their discrete
//! Fourier duals.
//!
//! The forward transform uses e^{-i(omega t + k.x)} so that a plane wave
//! e^{+i(omega_0 t + k_0.x)} lands in the (+omega_0, +k_0) bin, matching the
//! frequency convention of the Lindhard multiplier.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGrid {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    pub t_len: f64,
    pub l_len: f64,
}

impl FieldGrid {
    pub fn new(n_t: usize, n_x: usize, n_y: usize, t_len: f64, l_len: f64) -> Result<Self> {
        if n_t < 8 || n_x < 8 || n_y < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid sizes must be >= 8 per axis, got {n_t} x {n_x} x {n_y}"
            )));
        }
        if !(t_len > 0.0) || !(l_len > 0.0) {
            return Err(Error::InvalidParameter(
                "grid extents must be positive".into(),
            ));
        }
        Ok(Self {
            n_t,
            n_x,
            n_y,
            t_len,
            l_len,
        })
    }

    pub fn dt(&self) -> f64 {
        self.t_len / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        self.l_len / self.n_x as f64
    }

    pub fn dy(&self) -> f64 {
        self.l_len / self.n_y as f64
    }

    pub fn len(&self) -> usize {
        self.n_t * self.n_x * self.n_y
    }

    pub fn cell(&self) -> f64 {
        self.dt() * self.dx() * self.dy()
    }

    /// Signed symmetric representative of a periodic bin index.
    pub fn wrap(i: usize, n: usize) -> i64 {
        let i = i as i64;
        let n = n as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Angular frequency of time bin `jt`.
    pub fn omega(&self, jt: usize) -> f64 {
        2.0 * PI * Self::wrap(jt, self.n_t) as f64 / self.t_len
    }

    /// Wavevector of spatial bins (jx, jy).
    pub fn k_vec(&self, jx: usize, jy: usize) -> (f64, f64) {
        (
            2.0 * PI * Self::wrap(jx, self.n_x) as f64 / self.l_len,
            2.0 * PI * Self::wrap(jy, self.n_y) as f64 / self.l_len,
        )
    }

    pub fn k_mag(&self, jx: usize, jy: usize) -> f64 {
        let (kx, ky) = self.k_vec(jx, jy);
        kx.hypot(ky)
    }

    #[inline]
    pub fn index(&self, it: usize, ix: usize, iy: usize) -> usize {
        (it * self.n_x + ix) * self.n_y + iy
    }

    /// Grid coordinates of a flat index.
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let iy = idx % self.n_y;
        let ix = (idx / self.n_y) % self.n_x;
        let it = idx / (self.n_x * self.n_y);
        (it, ix, iy)
    }
}

/// Real scalar field phi(t, x, y) on a uniform periodic box.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub grid: FieldGrid,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn zeros(grid: FieldGrid) -> Self {
        Self {
            values: vec![0.0; grid.len()],
            grid,
        }
    }

    pub fn from_values(grid: FieldGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(
                "field data does not match grid size".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "field values must be finite".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: FieldGrid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for it in 0..grid.n_t {
            let t = it as f64 * grid.dt();
            for ix in 0..grid.n_x {
                let x = ix as f64 * grid.dx();
                for iy in 0..grid.n_y {
                    let y = iy as f64 * grid.dy();
                    values.push(f(t, x, y));
                }
            }
        }
        Self { grid, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn at(&self, it: usize, ix: usize, iy: usize) -> f64 {
        self.values[self.grid.index(it, ix, iy)]
    }

    /// Continuum-normalized L2 norm over the box.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// L2 norm of a single time slice.
    pub fn slice_l2(&self, it: usize) -> f64 {
        let n_slice = self.grid.n_x * self.grid.n_y;
        let start = it * n_slice;
        (self.values[start..start + n_slice]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            * self.grid.dx()
            * self.grid.dy())
        .sqrt()
    }

    /// Forward discrete transform (unnormalized).
    pub fn to_spectrum(&self) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft3_in_place(&mut data, self.grid, FftDirection::Forward);
        data
    }

    /// Inverse transform of a spectrum; returns the field and the largest
    /// absolute imaginary residue (should sit at rounding level when the
    /// spectrum is conjugate-symmetric).
    pub fn from_spectrum(grid: FieldGrid, mut spectrum: Vec<Complex64>) -> Result<(Self, f64)> {
        if spectrum.len() != grid.len() {
            return Err(Error::InvalidParameter(
                "spectrum does not match grid size".into(),
            ));
        }
        fft3_in_place(&mut spectrum, grid, FftDirection::Inverse);
        let scale = 1.0 / grid.len() as f64;
        let mut max_imag = 0.0f64;
        let values: Vec<f64> = spectrum
            .iter()
            .map(|z| {
                max_imag = max_imag.max((z.im * scale).abs());
                z.re * scale
            })
            .collect();
        Ok((Self { grid, values }, max_imag))
    }
}

#[derive(Clone, Copy, PartialEq)]
pub enum FftDirection {
    Forward,
    Inverse,
}

/// In-place 3-D FFT over the (t, x, y) axes of a flattened field.
pub fn fft3_in_place(data: &mut [Complex64], grid: FieldGrid, dir: FftDirection) {
    let mut planner = FftPlanner::new();
    let mut plan = |n: usize| -> Arc<dyn rustfft::Fft<f64>> {
        match dir {
            FftDirection::Forward => planner.plan_fft_forward(n),
            FftDirection::Inverse => planner.plan_fft_inverse(n),
        }
    };
    let (nt, nx, ny) = (grid.n_t, grid.n_x, grid.n_y);
    // y axis: contiguous lines
    let fft_y = plan(ny);
    for line in data.chunks_mut(ny) {
        fft_y.process(line);
    }
    // x axis: stride ny within each time slice
    let fft_x = plan(nx);
    let mut scratch = vec![Complex64::new(0.0, 0.0); nx];
    for it in 0..nt {
        let base = it * nx * ny;
        for iy in 0..ny {
            for ix in 0..nx {
                scratch[ix] = data[base + ix * ny + iy];
            }
            fft_x.process(&mut scratch);
            for ix in 0..nx {
                data[base + ix * ny + iy] = scratch[ix];
            }
        }
    }
    // t axis: stride nx*ny
    let fft_t = plan(nt);
    let stride = nx * ny;
    let mut scratch_t = vec![Complex64::new(0.0, 0.0); nt];
    for is in 0..stride {
        for it in 0..nt {
            scratch_t[it] = data[it * stride + is];
        }
        fft_t.process(&mut scratch_t);
        for it in 0..nt {
            data[it * stride + is] = scratch_t[it];
        }
    }
}
