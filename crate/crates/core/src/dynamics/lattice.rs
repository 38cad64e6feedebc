//! Truncated-lattice Hartree evolution of the density matrix.
//!
//! The model is the Hartree-von Neumann flow i d/dt gamma = [-Lap + w*rho, gamma]
//! restricted to a discrete torus: momenta live on a finite symmetric mode
//! lattice (equivalently, positions on an n x n periodic grid), the kinetic
//! term is diagonal in momentum, and the self-consistent potential couples
//! modes through the circular convolution with w_hat rho_Q. Stepping is
//! classic explicit fourth-order Runge-Kutta; commutator structure keeps the
//! trace conserved to rounding, and the spectrum drift measures the
//! integrator error against the exact unitary conjugation.
//!
//! The torus has no dispersion to infinity, so trajectories are a
//! qualitative pre-recurrence-time instrument, not evidence about the
//! whole-space dynamics.

use super::eigen::hermitian_eigenvalues;
use super::perturbation::GaussianOrbital;
use crate::distributions::MomentumDistribution;
use crate::error::{Error, Result};
use crate::par::par_chunks_mut;
use crate::stability::InteractionPotential;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy)]
pub struct LatticeSpec {
    /// modes per axis (odd)
    pub n: usize,
    /// mode spacing
    pub dk: f64,
}

impl LatticeSpec {
    pub fn new(n: usize, dk: f64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "mode lattice needs odd n >= 3, got {n}"
            )));
        }
        if n * n > 1600 {
            return Err(Error::InvalidParameter(format!(
                "dense lattice supports up to ~40^2 modes, got {n}^2"
            )));
        }
        if !(dk > 0.0) {
            return Err(Error::InvalidParameter("dk must be positive".into()));
        }
        Ok(Self { n, dk })
    }

    pub fn box_len(&self) -> f64 {
        2.0 * PI / self.dk
    }

    pub fn n_modes(&self) -> usize {
        self.n * self.n
    }

    /// Signed mode number of a cyclic index.
    fn wrap(&self, r: usize) -> i64 {
        let n = self.n as i64;
        let r = r as i64;
        if r <= n / 2 {
            r
        } else {
            r - n
        }
    }

    /// |k|^2 of cyclic mode index (rx, ry).
    fn kinetic(&self, rx: usize, ry: usize) -> f64 {
        let mx = self.wrap(rx) as f64;
        let my = self.wrap(ry) as f64;
        self.dk * self.dk * (mx * mx + my * my)
    }
}

/// Scalar time series row of a lattice trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRow {
    pub t: f64,
    pub sup_density_dev: f64,
    pub trace_q: f64,
    pub schatten2_q: f64,
    /// max sorted-eigenvalue drift against t = 0; NaN when not tracked
    pub spec_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    /// CSV rows: `t,sup_density_dev,trace_Q,schatten2_Q,spec_drift`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,sup_density_dev,trace_Q,schatten2_Q,spec_drift\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.t, r.sup_density_dev, r.trace_q, r.schatten2_q, r.spec_drift
            ));
        }
        out
    }
}

/// Dense density matrix on the momentum mode lattice.
pub struct LatticeState {
    pub spec: LatticeSpec,
    /// row-major n_modes x n_modes, cyclic mode index r = rx * n + ry
    gamma: Vec<Complex64>,
    f_diag: Vec<f64>,
    kin: Vec<f64>,
    what_sym: Vec<f64>,
    /// wrapped difference index: diff_idx[a * nm + b] = (a - b) mod lattice
    diff_idx: Vec<u32>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl LatticeState {
    pub fn new(
        dist: &MomentumDistribution,
        pot: &InteractionPotential,
        spec: LatticeSpec,
    ) -> Result<Self> {
        if dist.dimension() != 2 {
            return Err(Error::Unsupported(
                "the lattice model is two-dimensional".into(),
            ));
        }
        let n = spec.n;
        let nm = spec.n_modes();
        let mut f_diag = Vec::with_capacity(nm);
        let mut kin = Vec::with_capacity(nm);
        let mut what_sym = Vec::with_capacity(nm);
        for rx in 0..n {
            for ry in 0..n {
                let k2 = spec.kinetic(rx, ry);
                kin.push(k2);
                f_diag.push(dist.eval_f(k2)?);
                what_sym.push(pot.what_hat(k2.sqrt()));
            }
        }
        let mut gamma = vec![Complex64::new(0.0, 0.0); nm * nm];
        for r in 0..nm {
            gamma[r * nm + r] = Complex64::new(f_diag[r], 0.0);
        }
        let mut diff_idx = vec![0u32; nm * nm];
        for a in 0..nm {
            let (ax, ay) = (a / n, a % n);
            for b in 0..nm {
                let (bx, by) = (b / n, b % n);
                let px = (ax + n - bx) % n;
                let py = (ay + n - by) % n;
                diff_idx[a * nm + b] = (px * n + py) as u32;
            }
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            spec,
            gamma,
            f_diag,
            kin,
            what_sym,
            diff_idx,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.spec.n_modes()
    }

    pub fn gamma(&self) -> &[Complex64] {
        &self.gamma
    }

    /// Add weight |psi><psi| with psi a Gaussian packet sampled on the
    /// position grid (band-limited by the mode lattice).
    pub fn add_gaussian_orbital(&mut self, orb: &GaussianOrbital, weight: f64) -> Result<()> {
        let n = self.spec.n;
        let nm = self.n_modes();
        let l = self.spec.box_len();
        let h = l / n as f64;
        let mut psi = Vec::with_capacity(nm);
        for jx in 0..n {
            for jy in 0..n {
                psi.push(orb.evolved(0.0, jx as f64 * h, jy as f64 * h));
            }
        }
        // mode coefficients c_k = (L / n^2) DFT(psi)
        tile_fft2(&mut psi, n, &self.fwd);
        let scale = l / nm as f64;
        for z in psi.iter_mut() {
            *z *= scale;
        }
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-6 {
            return Err(Error::Resolution(format!(
                "orbital is not band-limited on this lattice (captured norm {norm_sq:.8})"
            )));
        }
        for a in 0..nm {
            for b in 0..nm {
                self.gamma[a * nm + b] += weight * psi[a] * psi[b].conj();
            }
        }
        Ok(())
    }

    pub fn trace_q(&self) -> f64 {
        let nm = self.n_modes();
        (0..nm)
            .map(|r| self.gamma[r * nm + r].re - self.f_diag[r])
            .sum()
    }

    /// Hilbert-Schmidt norm of Q = gamma - gamma_f.
    pub fn schatten2_q(&self) -> f64 {
        let nm = self.n_modes();
        let mut acc = 0.0;
        for a in 0..nm {
            for b in 0..nm {
                let mut z = self.gamma[a * nm + b];
                if a == b {
                    z -= self.f_diag[a];
                }
                acc += z.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Per-difference-mode sums D(p) = sum_q Q_{q+p, q} of Q = gamma - gamma_f.
    fn diff_sums(&self, gamma: &[Complex64]) -> Vec<Complex64> {
        let nm = self.n_modes();
        let mut d = vec![Complex64::new(0.0, 0.0); nm];
        for r in 0..nm {
            let row = &gamma[r * nm..(r + 1) * nm];
            let idx = &self.diff_idx[r * nm..(r + 1) * nm];
            for (q, z) in row.iter().enumerate() {
                d[idx[q] as usize] += z;
            }
        }
        d[0] -= Complex64::new(self.f_diag.iter().sum::<f64>(), 0.0);
        d
    }

    /// rho_Q on the position grid (real part; the imaginary residue of a
    /// Hermitian gamma sits at rounding level).
    pub fn density_deviation(&self) -> Vec<f64> {
        let n = self.spec.n;
        let mut d = self.diff_sums(&self.gamma);
        tile_fft2(&mut d, n, &self.inv);
        let l = self.spec.box_len();
        d.iter().map(|z| z.re / (l * l)).collect()
    }

    pub fn sup_density_deviation(&self) -> f64 {
        self.density_deviation()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues of gamma, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.gamma, self.n_modes())
    }

    /// Difference lattice sum D(p) = sum_q Q_{q+p, q} and the derived
    /// potential tile V~(p) = 2 pi w_hat(|p|) D(p) / L^2.
    fn potential_tile(&self, gamma: &[Complex64]) -> Vec<Complex64> {
        let mut d = self.diff_sums(gamma);
        let l = self.spec.box_len();
        let scale = 2.0 * PI / (l * l);
        for (p, z) in d.iter_mut().enumerate() {
            *z *= scale * self.what_sym[p];
        }
        d
    }

    /// Max |V(x)| of the current self-consistent potential.
    pub fn potential_sup(&self) -> f64 {
        let n = self.spec.n;
        let mut tile = self.potential_tile(&self.gamma);
        tile_fft2(&mut tile, n, &self.inv);
        tile.iter().fold(0.0f64, |m, z| m.max(z.re.abs()))
    }

    /// Right-hand side -i [ -Lap + V, gamma ], written into `out`.
    fn rhs_into(&self, gamma: &[Complex64], out: &mut [Complex64]) {
        let n = self.spec.n;
        let nm = self.n_modes();
        let v_tile = self.potential_tile(gamma);
        if v_tile.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            // free evolution: the commutator is elementwise in momentum
            let minus_i = Complex64::new(0.0, -1.0);
            par_chunks_mut(out, nm, |a, row| {
                for b in 0..nm {
                    row[b] = minus_i * (self.kin[a] - self.kin[b]) * gamma[a * nm + b];
                }
            });
            return;
        }
        // kernel transform for the circular convolution
        let mut v_hat = v_tile.clone();
        tile_fft2(&mut v_hat, n, &self.fwd);

        // VQ: columns of Q = rows of Q^T convolved with the direct kernel;
        // V and Q are Hermitian, so QV = (VQ)^dagger and one sweep suffices
        let mut q_matrix: Vec<Complex64> = gamma.to_vec();
        for (r, row) in q_matrix.chunks_mut(nm).enumerate() {
            row[r] -= self.f_diag[r];
        }
        let mut qt = transpose(&q_matrix, nm);
        let fwd = self.fwd.clone();
        let inv = self.inv.clone();
        par_chunks_mut(&mut qt, nm, |_r, row| {
            conv_tile(row, &v_hat, n, &fwd, &inv);
        });
        // qt now holds (VQ)^T: [V, Q](a, b) = qt[b, a] - conj(qt[a, b]),
        // assembled with a cache-blocked transpose pass
        let comm = sub_conj_transpose(&qt, nm);

        let minus_i = Complex64::new(0.0, -1.0);
        par_chunks_mut(out, nm, |a, row| {
            let base = a * nm;
            let idx = &self.diff_idx[base..base + nm];
            for b in 0..nm {
                let kinetic = (self.kin[a] - self.kin[b]) * gamma[base + b];
                let with_gamma_f =
                    v_tile[idx[b] as usize] * (self.f_diag[b] - self.f_diag[a]);
                row[b] = minus_i * (kinetic + with_gamma_f + comm[base + b]);
            }
        });
    }

    /// Classic RK4 stepping over `steps` steps of size `dt` (dt may be
    /// negative for reversed integration). Stage buffers are reused across
    /// steps; the working set is five dense matrices.
    pub fn evolve_steps(&mut self, dt: f64, steps: usize) -> Result<()> {
        let nm = self.n_modes();
        let len = nm * nm;
        let zero = Complex64::new(0.0, 0.0);
        let mut k1 = vec![zero; len];
        let mut k2 = vec![zero; len];
        let mut k3 = vec![zero; len];
        let mut k4 = vec![zero; len];
        let mut tmp = vec![zero; len];
        for _ in 0..steps {
            let gamma_now = std::mem::take(&mut self.gamma);
            self.rhs_into(&gamma_now, &mut k1);
            self.gamma = gamma_now;
            for i in 0..len {
                tmp[i] = self.gamma[i] + 0.5 * dt * k1[i];
            }
            self.rhs_into(&tmp, &mut k2);
            for i in 0..len {
                tmp[i] = self.gamma[i] + 0.5 * dt * k2[i];
            }
            self.rhs_into(&tmp, &mut k3);
            for i in 0..len {
                tmp[i] = self.gamma[i] + dt * k3[i];
            }
            self.rhs_into(&tmp, &mut k4);
            for i in 0..len {
                self.gamma[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        Ok(())
    }

    /// Integrate to `horizon`, sampling `samples` rows (>= 2: endpoints).
    /// Spectrum drift against t = 0 is computed per sampled row when
    /// `track_spectrum` is on (dense eigensolve per row).
    pub fn evolve(
        &mut self,
        horizon: f64,
        dt: f64,
        samples: usize,
        track_spectrum: bool,
    ) -> Result<Trajectory> {
        if !(horizon > 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidParameter(
                "horizon and dt must be positive".into(),
            ));
        }
        let kin_max = self.kin.iter().fold(0.0f64, |m, v| m.max(*v));
        let v_sup = self.potential_sup();
        if dt * (kin_max + v_sup) >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} too large for stability: dt (max|k|^2 + sup|V|) = {:.3} >= 0.5",
                dt * (kin_max + v_sup)
            )));
        }
        let steps = (horizon / dt).ceil() as usize;
        let dt = horizon / steps as f64;
        let samples = samples.max(2).min(steps + 1);
        let eig0 = if track_spectrum {
            Some(self.eigenvalues()?)
        } else {
            None
        };
        let trace0 = self.trace_q();
        let mut rows = Vec::with_capacity(samples);
        let row = |state: &Self, t: f64| -> Result<TrajectoryRow> {
            let drift = match &eig0 {
                Some(e0) => {
                    let e = state.eigenvalues()?;
                    e.iter()
                        .zip(e0.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0f64, f64::max)
                }
                None => f64::NAN,
            };
            Ok(TrajectoryRow {
                t,
                sup_density_dev: state.sup_density_deviation(),
                trace_q: state.trace_q(),
                schatten2_q: state.schatten2_q(),
                spec_drift: drift,
            })
        };
        rows.push(row(self, 0.0)?);
        let mut done = 0usize;
        for s in 1..samples {
            let target = (steps * s) / (samples - 1);
            self.evolve_steps(dt, target - done)?;
            done = target;
            let t = done as f64 * dt;
            let r = row(self, t)?;
            if (r.trace_q - trace0).abs() > 1e-6 * (1.0 + trace0.abs()) {
                return Err(Error::Integration(format!(
                    "trace drift {:.2e} at t = {t}; reduce dt",
                    (r.trace_q - trace0).abs()
                )));
            }
            rows.push(r);
        }
        Ok(Trajectory { rows })
    }
}

/// In-place 2-D FFT of an n x n row-major tile.
fn tile_fft2(tile: &mut [Complex64], n: usize, plan: &Arc<dyn Fft<f64>>) {
    for row in tile.chunks_mut(n) {
        plan.process(row);
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        for r in 0..n {
            scratch[r] = tile[r * n + col];
        }
        plan.process(&mut scratch);
        for r in 0..n {
            tile[r * n + col] = scratch[r];
        }
    }
}

/// Circular 2-D convolution of a tile with a pre-transformed kernel.
fn conv_tile(
    row: &mut [Complex64],
    kernel_hat: &[Complex64],
    n: usize,
    fwd: &Arc<dyn Fft<f64>>,
    inv: &Arc<dyn Fft<f64>>,
) {
    tile_fft2(row, n, fwd);
    for (z, k) in row.iter_mut().zip(kernel_hat.iter()) {
        *z *= k;
    }
    tile_fft2(row, n, inv);
    let scale = 1.0 / (n * n) as f64;
    for z in row.iter_mut() {
        *z *= scale;
    }
}

fn transpose(m: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    const B: usize = 64;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    out[j * n + i] = m[i * n + j];
                }
            }
        }
    }
    out
}

/// c[a, b] = m[b, a] - conj(m[a, b]), cache-blocked.
fn sub_conj_transpose(m: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    const B: usize = 64;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    out[j * n + i] = m[i * n + j] - out_conj(m[j * n + i]);
                }
            }
        }
    }
    out
}

#[inline]
fn out_conj(z: Complex64) -> Complex64 {
    z.conj()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::field::FieldGrid;
    use crate::dynamics::perturbation::{free_density, FinitePerturbation};

    fn small_setup(
        amp: f64,
    ) -> (MomentumDistribution, InteractionPotential, LatticeSpec) {
        let dist = MomentumDistribution::fermi_dirac(1.0, 0.5, 2).unwrap();
        let pot = if amp == 0.0 {
            InteractionPotential::zero(2)
        } else {
            InteractionPotential::gaussian(amp, 1.0, 2).unwrap()
        };
        let spec = LatticeSpec::new(17, 0.25).unwrap();
        (dist, pot, spec)
    }

    fn centered_packet(spec: &LatticeSpec, sigma: f64, p: [f64; 2]) -> GaussianOrbital {
        let l = spec.box_len();
        GaussianOrbital::new([l / 2.0, l / 2.0], sigma, p).unwrap()
    }

    #[test]
    fn stationary_state_stays_put() {
        let (dist, pot, spec) = small_setup(0.8);
        let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
        let traj = state.evolve(2.0, 0.05, 3, false).unwrap();
        for r in &traj.rows {
            assert!(r.sup_density_dev.abs() < 1e-12, "{r:?}");
            assert!(r.trace_q.abs() < 1e-12);
            assert!(r.schatten2_q < 1e-12);
        }
    }

    #[test]
    fn free_case_matches_spectral_propagation() {
        let (dist, _, _) = small_setup(0.0);
        let pot = InteractionPotential::zero(2);
        let spec = LatticeSpec::new(21, 0.25).unwrap();
        let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
        let orb = centered_packet(&spec, 2.5, [0.3, -0.15]);
        state.add_gaussian_orbital(&orb, 1.0).unwrap();

        let horizon = 1.0;
        let n_t = 8;
        // matched space-time grid: slices at t_m = m horizon / n_t
        let grid = FieldGrid::new(n_t, spec.n, spec.n, horizon, spec.box_len()).unwrap();
        let l = spec.box_len();
        let h = l / spec.n as f64;
        let mut samples = Vec::with_capacity(spec.n_modes());
        for jx in 0..spec.n {
            for jy in 0..spec.n {
                samples.push(orb.evolved(0.0, jx as f64 * h, jy as f64 * h));
            }
        }
        let q0 = FinitePerturbation::grid_orbitals(l, spec.n, spec.n, vec![samples], vec![1.0])
            .unwrap();
        let rho = free_density(&q0, grid).unwrap();

        let dt_field = grid.dt();
        let steps_per_slice = 90;
        let dt = dt_field / steps_per_slice as f64;
        let nxy = spec.n_modes();
        for it in 1..n_t {
            state.evolve_steps(dt, steps_per_slice).unwrap();
            let dev = state.density_deviation();
            let mut max_dev = 0.0f64;
            for (j, v) in dev.iter().enumerate() {
                max_dev = max_dev.max((v - rho.values()[it * nxy + j]).abs());
            }
            assert!(
                max_dev < 1e-8,
                "slice {it}: lattice vs spectral deviation {max_dev:.2e}"
            );
        }
    }

    #[test]
    fn conservation_and_reversal() {
        let (dist, pot, spec) = small_setup(0.4);
        let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
        let orb = centered_packet(&spec, 2.5, [0.2, 0.1]);
        state.add_gaussian_orbital(&orb, 1e-2).unwrap();
        let gamma0 = state.gamma().to_vec();
        let eig0 = state.eigenvalues().unwrap();
        let trace0 = state.trace_q();

        let horizon = 1.5;
        let dt = 0.01;
        let steps = (horizon / dt) as usize;
        state.evolve_steps(dt, steps).unwrap();
        assert!((state.trace_q() - trace0).abs() < 1e-9);
        let eig1 = state.eigenvalues().unwrap();
        let drift = eig0
            .iter()
            .zip(eig1.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(drift < 1e-7, "eigenvalue drift {drift:.2e}");

        // reverse
        state.evolve_steps(-dt, steps).unwrap();
        let mut fro = 0.0f64;
        for (a, b) in state.gamma().iter().zip(gamma0.iter()) {
            fro += (a - b).norm_sqr();
        }
        let fro = fro.sqrt();
        assert!(fro < 1e-7, "forward-backward error {fro:.2e}");
    }

    #[test]
    fn trajectory_rows_and_stability_guard() {
        let (dist, pot, spec) = small_setup(0.3);
        let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
        let orb = centered_packet(&spec, 2.5, [0.0, 0.0]);
        state.add_gaussian_orbital(&orb, 5e-3).unwrap();
        // too-large dt is rejected up front
        let err = state.evolve(1.0, 2.0, 3, false);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
        let traj = state.evolve(0.5, 0.02, 4, true).unwrap();
        assert_eq!(traj.rows.len(), 4);
        assert!(traj.rows[0].spec_drift == 0.0);
        let csv = traj.to_csv();
        assert!(csv.starts_with("t,sup_density_dev,trace_Q,schatten2_Q,spec_drift\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn density_deviation_matches_initial_packet() {
        let (dist, pot, _) = small_setup(0.2);
        let spec = LatticeSpec::new(21, 0.25).unwrap();
        let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
        let orb = centered_packet(&spec, 2.5, [0.0, 0.0]);
        let weight = 0.05;
        state.add_gaussian_orbital(&orb, weight).unwrap();
        let dev = state.density_deviation();
        let l = spec.box_len();
        let h = l / spec.n as f64;
        let mut max_err = 0.0f64;
        for jx in 0..spec.n {
            for jy in 0..spec.n {
                let expect = weight * orb.density(0.0, jx as f64 * h, jy as f64 * h);
                max_err = max_err.max((dev[jx * spec.n + jy] - expect).abs());
            }
        }
        assert!(max_err < 1e-8, "density mismatch {max_err:.2e}");
        assert!((state.trace_q() - weight).abs() < 1e-9);
    }
}
