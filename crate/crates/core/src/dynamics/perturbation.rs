//! Finite-rank self-adjoint perturbations Q0 and their free density.
//!
//! A perturbation is a weighted sum of rank-one projectors onto orbitals,
//! either closed-form Gaussian wave packets (free evolution, densities,
//! overlaps and Schatten norms all analytic) or sampled grid functions
//! (propagated by discrete Fourier multiplication with e^{-i t |k|^2}).

use super::eigen::hermitian_eigenvalues;
use super::field::{FieldGrid, SpaceTimeField};
use crate::error::{Error, Result};
use crate::quad;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Isotropic Gaussian wave packet, unit L^2 norm:
/// u(x) = (pi sigma^2)^{-1/2} exp(-|x - c|^2 / (2 sigma^2) + i p.x).
#[derive(Debug, Clone, Copy)]
pub struct GaussianOrbital {
    pub center: [f64; 2],
    pub sigma: f64,
    pub momentum: [f64; 2],
}

impl GaussianOrbital {
    pub fn new(center: [f64; 2], sigma: f64, momentum: [f64; 2]) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "orbital width must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            center,
            sigma,
            momentum,
        })
    }

    /// One axis of the free evolution e^{it Laplacian} u at time t.
    fn evolved_axis(&self, t: f64, x: f64, c: f64, p: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let alpha2 = Complex64::new(s2, 2.0 * t); // 2 alpha = sigma^2 + 2 i t
        let norm = (PI * s2).powf(-0.25) * self.sigma;
        let shift = x - c - 2.0 * p * t;
        let gauss = (-Complex64::new(shift * shift, 0.0) / (2.0 * alpha2)).exp();
        let phase = Complex64::new(0.0, p * x - p * p * t).exp();
        norm / alpha2.sqrt() * gauss * phase
    }

    /// e^{it Laplacian} u at (t, x, y).
    pub fn evolved(&self, t: f64, x: f64, y: f64) -> Complex64 {
        self.evolved_axis(t, x, self.center[0], self.momentum[0])
            * self.evolved_axis(t, y, self.center[1], self.momentum[1])
    }

    /// |e^{it Laplacian} u|^2 = amp(t) exp(-b(t) |x - xc(t)|^2).
    pub fn density_params(&self, t: f64) -> (f64, f64, [f64; 2]) {
        let s2 = self.sigma * self.sigma;
        let denom = s2 * s2 + 4.0 * t * t;
        let b = s2 / denom;
        let amp = s2 / (PI * denom);
        let xc = [
            self.center[0] + 2.0 * self.momentum[0] * t,
            self.center[1] + 2.0 * self.momentum[1] * t,
        ];
        (amp, b, xc)
    }

    pub fn density(&self, t: f64, x: f64, y: f64) -> f64 {
        let (amp, b, xc) = self.density_params(t);
        let dx = x - xc[0];
        let dy = y - xc[1];
        amp * (-b * (dx * dx + dy * dy)).exp()
    }

    /// Closed-form overlap <self, other> in L^2(R^2).
    pub fn overlap(&self, other: &GaussianOrbital) -> Complex64 {
        let mut out = Complex64::new(1.0, 0.0);
        let ni = (PI * self.sigma * self.sigma).powf(-0.25);
        let nj = (PI * other.sigma * other.sigma).powf(-0.25);
        for axis in 0..2 {
            let (ci, cj) = (self.center[axis], other.center[axis]);
            let (pi_, pj) = (self.momentum[axis], other.momentum[axis]);
            let ai = 1.0 / (2.0 * self.sigma * self.sigma);
            let aj = 1.0 / (2.0 * other.sigma * other.sigma);
            let a = ai + aj;
            let b = Complex64::new(2.0 * (ai * ci + aj * cj), pj - pi_);
            let c = -ai * ci * ci - aj * cj * cj;
            out *= ni * nj * (PI / a).sqrt() * ((b * b / (4.0 * a)) + c).exp();
        }
        out
    }

    /// Parabolic rescaling u(x) -> lambda u(lambda x): widths and centers
    /// shrink by lambda, momenta grow by lambda; the L^2 norm is preserved.
    pub fn rescale(&self, lambda: f64) -> Self {
        Self {
            center: [self.center[0] / lambda, self.center[1] / lambda],
            sigma: self.sigma / lambda,
            momentum: [self.momentum[0] * lambda, self.momentum[1] * lambda],
        }
    }
}

/// Orbital content of a finite-rank perturbation.
#[derive(Debug, Clone)]
pub enum Orbitals {
    Gaussians(Vec<GaussianOrbital>),
    /// Samples on an n_x x n_y periodic box of side `l_len`.
    Grid {
        l_len: f64,
        n_x: usize,
        n_y: usize,
        orbitals: Vec<Vec<Complex64>>,
    },
}

/// Finite-rank self-adjoint Q0 = sum_j weight_j |u_j><u_j|.
#[derive(Debug, Clone)]
pub struct FinitePerturbation {
    pub orbitals: Orbitals,
    pub weights: Vec<f64>,
}

impl FinitePerturbation {
    pub fn gaussians(orbitals: Vec<GaussianOrbital>, weights: Vec<f64>) -> Result<Self> {
        if orbitals.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "orbital and weight counts differ".into(),
            ));
        }
        Ok(Self {
            orbitals: Orbitals::Gaussians(orbitals),
            weights,
        })
    }

    pub fn grid_orbitals(
        l_len: f64,
        n_x: usize,
        n_y: usize,
        orbitals: Vec<Vec<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if orbitals.len() != weights.len() {
            return Err(Error::InvalidParameter(
                "orbital and weight counts differ".into(),
            ));
        }
        if orbitals.iter().any(|o| o.len() != n_x * n_y) {
            return Err(Error::InvalidParameter(
                "grid orbital size does not match the grid".into(),
            ));
        }
        Ok(Self {
            orbitals: Orbitals::Grid {
                l_len,
                n_x,
                n_y,
                orbitals,
            },
            weights,
        })
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    /// Gram matrix G_ij = <u_i, u_j>, row-major.
    pub fn gram(&self) -> Vec<Complex64> {
        let r = self.rank();
        let mut g = vec![Complex64::new(0.0, 0.0); r * r];
        match &self.orbitals {
            Orbitals::Gaussians(orbs) => {
                for i in 0..r {
                    for j in 0..r {
                        g[i * r + j] = orbs[i].overlap(&orbs[j]);
                    }
                }
            }
            Orbitals::Grid {
                l_len,
                n_x,
                n_y,
                orbitals,
            } => {
                let cell = (l_len / *n_x as f64) * (l_len / *n_y as f64);
                for i in 0..r {
                    for j in 0..r {
                        let dot: Complex64 = orbitals[i]
                            .iter()
                            .zip(orbitals[j].iter())
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        g[i * r + j] = dot * cell;
                    }
                }
            }
        }
        g
    }

    /// Nonzero eigenvalues of Q0: with G = L L*, they are the eigenvalues of
    /// the Hermitian r x r matrix L* diag(weights) L.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let r = self.rank();
        if r == 0 {
            return Ok(Vec::new());
        }
        let g = self.gram();
        let l = cholesky_psd(&g, r)?;
        // m = L* W L
        let mut m = vec![Complex64::new(0.0, 0.0); r * r];
        for i in 0..r {
            for j in 0..r {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..r {
                    // (L*)_{ik} = conj(L_{ki}); W diagonal
                    acc += l[k * r + i].conj() * self.weights[k] * l[k * r + j];
                }
                m[i * r + j] = acc;
            }
        }
        hermitian_eigenvalues(&m, r)
    }

    /// Schatten norm ||Q0||_{S^p} = (sum |lambda_i|^p)^{1/p}.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Schatten exponent must be >= 1, got {p}"
            )));
        }
        let eig = self.eigenvalues()?;
        Ok(eig
            .iter()
            .map(|l| l.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p))
    }

    /// Parabolic rescaling of every orbital (Gaussian parameterization only).
    pub fn rescale_parabolic(&self, lambda: f64) -> Result<Self> {
        match &self.orbitals {
            Orbitals::Gaussians(orbs) => Ok(Self {
                orbitals: Orbitals::Gaussians(orbs.iter().map(|o| o.rescale(lambda)).collect()),
                weights: self.weights.clone(),
            }),
            Orbitals::Grid { .. } => Err(Error::Unsupported(
                "parabolic rescaling needs Gaussian-parameterized orbitals".into(),
            )),
        }
    }
}

/// Cholesky factor of a PSD Hermitian matrix; near-zero pivots (linearly
/// dependent orbitals) produce zero columns rather than failing.
fn cholesky_psd(g: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut l = vec![Complex64::new(0.0, 0.0); n * n];
    let scale: f64 = (0..n).map(|i| g[i * n + i].re.abs()).sum::<f64>() / n as f64;
    for j in 0..n {
        let mut diag = g[j * n + j].re;
        for k in 0..j {
            diag -= l[j * n + k].norm_sqr();
        }
        if diag <= 1e-13 * scale.max(1e-300) {
            continue; // dependent direction
        }
        let d = diag.sqrt();
        l[j * n + j] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut acc = g[i * n + j];
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = acc / d;
        }
    }
    Ok(l)
}

/// Free density rho(t, x) = sum_j w_j |e^{it Laplacian} u_j|^2 sampled on the
/// grid; Gaussian orbitals use the closed-form evolution, grid orbitals use
/// discrete Fourier propagation.
pub fn free_density(q0: &FinitePerturbation, grid: FieldGrid) -> Result<SpaceTimeField> {
    match &q0.orbitals {
        Orbitals::Gaussians(orbs) => {
            // wraparound check: the box must dominate the dispersive spread
            let t_final = grid.t_len;
            let half = 0.5 * grid.l_len;
            for o in orbs {
                let s2 = o.sigma * o.sigma;
                let width = ((s2 * s2 + 4.0 * t_final * t_final) / s2).sqrt();
                let drift = 2.0 * t_final * o.momentum[0].abs().max(o.momentum[1].abs());
                let off = (o.center[0] - half).abs().max((o.center[1] - half).abs());
                let spread = off + drift + 4.0 * width;
                if spread > half {
                    return Err(Error::Resolution(format!(
                        "box of side {} too small for dispersive spread {spread:.3} at t = {t_final}",
                        grid.l_len
                    )));
                }
            }
            let mut field = SpaceTimeField::zeros(grid);
            let (dt, dx, dy) = (grid.dt(), grid.dx(), grid.dy());
            let values = field.values_mut();
            for it in 0..grid.n_t {
                let t = it as f64 * dt;
                let params: Vec<(f64, f64, [f64; 2])> =
                    orbs.iter().map(|o| o.density_params(t)).collect();
                for ix in 0..grid.n_x {
                    let x = ix as f64 * dx;
                    for iy in 0..grid.n_y {
                        let y = iy as f64 * dy;
                        let mut rho = 0.0;
                        for (w, (amp, b, xc)) in q0.weights.iter().zip(params.iter()) {
                            let ddx = x - xc[0];
                            let ddy = y - xc[1];
                            rho += w * amp * (-b * (ddx * ddx + ddy * ddy)).exp();
                        }
                        values[(it * grid.n_x + ix) * grid.n_y + iy] = rho;
                    }
                }
            }
            Ok(field)
        }
        Orbitals::Grid {
            l_len,
            n_x,
            n_y,
            orbitals,
        } => {
            if (*n_x, *n_y, *l_len) != (grid.n_x, grid.n_y, grid.l_len) {
                return Err(Error::InvalidParameter(
                    "grid orbitals must live on the field's spatial grid".into(),
                ));
            }
            let mut planner = FftPlanner::new();
            let fwd_x = planner.plan_fft_forward(*n_x);
            let fwd_y = planner.plan_fft_forward(*n_y);
            let inv_x = planner.plan_fft_inverse(*n_x);
            let inv_y = planner.plan_fft_inverse(*n_y);
            let nxy = n_x * n_y;
            let mut spectra = Vec::with_capacity(orbitals.len());
            for orb in orbitals {
                let mut data = orb.clone();
                // 2-D forward FFT
                for row in data.chunks_mut(*n_y) {
                    fwd_y.process(row);
                }
                let mut scratch = vec![Complex64::new(0.0, 0.0); *n_x];
                for iy in 0..*n_y {
                    for ix in 0..*n_x {
                        scratch[ix] = data[ix * n_y + iy];
                    }
                    fwd_x.process(&mut scratch);
                    for ix in 0..*n_x {
                        data[ix * n_y + iy] = scratch[ix];
                    }
                }
                // aliasing check: spectral mass within 2 modes of Nyquist
                let total: f64 = data.iter().map(|z| z.norm_sqr()).sum();
                let mut shell = 0.0;
                for ix in 0..*n_x {
                    for iy in 0..*n_y {
                        let mx = FieldGrid::wrap(ix, *n_x).unsigned_abs() as usize;
                        let my = FieldGrid::wrap(iy, *n_y).unsigned_abs() as usize;
                        if mx + 2 >= n_x / 2 || my + 2 >= n_y / 2 {
                            shell += data[ix * n_y + iy].norm_sqr();
                        }
                    }
                }
                if total > 0.0 && shell / total > 1e-6 {
                    return Err(Error::Resolution(format!(
                        "orbital spectral mass {:.2e} within 2 modes of the Nyquist shell",
                        shell / total
                    )));
                }
                spectra.push(data);
            }
            let mut field = SpaceTimeField::zeros(grid);
            let values = field.values_mut();
            let mut slab = vec![Complex64::new(0.0, 0.0); nxy];
            for it in 0..grid.n_t {
                let t = it as f64 * grid.dt();
                for (w, spectrum) in q0.weights.iter().zip(spectra.iter()) {
                    // multiply by e^{-i t |k|^2} and invert
                    for ix in 0..*n_x {
                        for iy in 0..*n_y {
                            let k = grid.k_mag(ix, iy);
                            let phase = Complex64::new(0.0, -t * k * k).exp();
                            slab[ix * n_y + iy] = spectrum[ix * n_y + iy] * phase;
                        }
                    }
                    for row in slab.chunks_mut(*n_y) {
                        inv_y.process(row);
                    }
                    let mut scratch = vec![Complex64::new(0.0, 0.0); *n_x];
                    for iy in 0..*n_y {
                        for ix in 0..*n_x {
                            scratch[ix] = slab[ix * n_y + iy];
                        }
                        inv_x.process(&mut scratch);
                        for ix in 0..*n_x {
                            slab[ix * n_y + iy] = scratch[ix];
                        }
                    }
                    let scale = 1.0 / nxy as f64;
                    for (i, z) in slab.iter().enumerate() {
                        let amp = z * scale;
                        values[it * nxy + i] += w * amp.norm_sqr();
                    }
                }
            }
            Ok(field)
        }
    }
}

/// Result of the Strichartz quotient computation.
#[derive(Debug, Clone, Copy)]
pub struct StrichartzRatio {
    /// ||rho_free||_{L^2_{t,x}} / ||Q0||_{S^{4/3}}
    pub ratio: f64,
    pub density_l2: f64,
    pub schatten_4_3: f64,
    /// final half-width of the time window
    pub t_window: f64,
}

/// ||rho_free||_{L^2_{t,x}(R x R^2)} / ||Q0||_{S^{4/3}} for Gaussian-packet
/// perturbations. The squared spatial norm of the density is analytic
/// (Gaussian pair products), and the time integral over R is extended by
/// doubling windows until the window contribution to the norm drops below
/// 1e-6 of the accumulated value; the relative rule keeps the computation
/// exactly covariant under parabolic rescaling.
pub fn strichartz_ratio(q0: &FinitePerturbation) -> Result<StrichartzRatio> {
    let orbs = match &q0.orbitals {
        Orbitals::Gaussians(o) => o.clone(),
        Orbitals::Grid { .. } => {
            return Err(Error::Unsupported(
                "the Strichartz quotient needs Gaussian-parameterized orbitals".into(),
            ))
        }
    };
    let weights = q0.weights.clone();
    let density_sq = |t: f64| -> f64 {
        let params: Vec<(f64, f64, [f64; 2])> =
            orbs.iter().map(|o| o.density_params(t)).collect();
        let mut acc = 0.0;
        for (i, (ai, bi, ci)) in params.iter().enumerate() {
            for (j, (aj, bj, cj)) in params.iter().enumerate() {
                let dx = ci[0] - cj[0];
                let dy = ci[1] - cj[1];
                let bsum = bi + bj;
                acc += weights[i]
                    * weights[j]
                    * ai
                    * aj
                    * PI
                    / bsum
                    * (-(bi * bj) * (dx * dx + dy * dy) / bsum).exp();
            }
        }
        acc
    };
    let t0 = orbs
        .iter()
        .map(|o| o.sigma * o.sigma)
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut acc = quad::adaptive(density_sq, -t0, t0, 0.0, 1e-10, 4000)?.value;
    let mut t_hi = t0;
    for _ in 0..200 {
        let pos = quad::adaptive(density_sq, t_hi, 2.0 * t_hi, 0.0, 1e-9, 2000)?.value;
        let neg = quad::adaptive(density_sq, -2.0 * t_hi, -t_hi, 0.0, 1e-9, 2000)?.value;
        acc += pos + neg;
        t_hi *= 2.0;
        if pos + neg < 2e-6 * acc {
            break;
        }
    }
    let density_l2 = acc.sqrt();
    let schatten = q0.schatten_norm(4.0 / 3.0)?;
    if schatten == 0.0 {
        return Err(Error::InvalidParameter(
            "zero perturbation has no Strichartz quotient".into(),
        ));
    }
    Ok(StrichartzRatio {
        ratio: density_l2 / schatten,
        density_l2,
        schatten_4_3: schatten,
        t_window: t_hi,
    })
}
