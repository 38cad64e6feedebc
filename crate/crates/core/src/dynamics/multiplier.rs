//! The linear response operator as a discrete space-time Fourier multiplier.
//!
//! On the dual lattice of a periodic box the operator acts bin-wise as
//! multiplication by w_hat(|k|) m_f(omega, |k|); inverting 1 + L_1 is
//! bin-wise division by 1 + w_hat m_f, exact on the grid whenever the
//! lattice margin min |w_hat m_f + 1| stays positive.

use super::field::{FieldGrid, SpaceTimeField};
use super::perturbation::{free_density, FinitePerturbation};
use crate::distributions::MomentumDistribution;
use crate::error::{Error, Result};
use crate::lindhard;
use crate::par::par_map;
use crate::stability::InteractionPotential;
use num_complex::Complex64;
use std::collections::HashMap;

/// Cached multiplier values on the dual lattice of one grid.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    pub grid: FieldGrid,
    values: Vec<Complex64>,
    /// min over bins of |1 + w_hat m|
    pub margin: f64,
    pub margin_argmin: (f64, f64),
    /// max over bins of |w_hat m|
    pub max_gain: f64,
    pub max_est_error: f64,
}

impl MultiplierTable {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value_at(&self, it: usize, ix: usize, iy: usize) -> Complex64 {
        self.values[self.grid.index(it, ix, iy)]
    }
}

/// Evaluate w_hat(k) m_f(omega, k) on every dual bin of `grid`.
///
/// m_f depends on (|omega|, |k|) up to conjugation, so distinct pairs are
/// evaluated once (in parallel) and scattered; m(-omega, k) is the complex
/// conjugate. The k = 0 column carries m = 0 (the response of a constant
/// density shift vanishes; the origin bin is set to zero by convention).
/// Bins on the time-Nyquist plane keep only the real part so that the
/// multiplier maps real fields to real fields exactly.
pub fn build_multiplier(
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
    grid: FieldGrid,
) -> Result<MultiplierTable> {
    // collect distinct (|omega| bin, k magnitude) pairs
    let mut unique: Vec<(f64, f64)> = Vec::new();
    let mut pair_index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut bin_pairs: Vec<(usize, bool, f64)> = Vec::with_capacity(grid.len()); // (pair idx, conj, kmag)
    for it in 0..grid.n_t {
        let omega = grid.omega(it);
        for ix in 0..grid.n_x {
            for iy in 0..grid.n_y {
                let kmag = grid.k_mag(ix, iy);
                if kmag == 0.0 {
                    bin_pairs.push((usize::MAX, false, 0.0));
                    continue;
                }
                let key = (omega.abs().to_bits(), kmag.to_bits());
                let idx = *pair_index.entry(key).or_insert_with(|| {
                    unique.push((omega.abs(), kmag));
                    unique.len() - 1
                });
                bin_pairs.push((idx, omega < 0.0, kmag));
            }
        }
    }
    let evals: Vec<Result<lindhard::LindhardValue>> =
        par_map(&unique, |&(omega, kmag)| lindhard::m_general(dist, omega, kmag));
    let mut failures = Vec::new();
    let mut m_values = Vec::with_capacity(unique.len());
    let mut max_err = 0.0f64;
    for ((omega, kmag), ev) in unique.iter().zip(evals.into_iter()) {
        match ev {
            Ok(v) => {
                max_err = max_err.max(v.est_error);
                m_values.push(v.as_complex());
            }
            Err(e) => {
                failures.push(format!("(omega={omega}, k={kmag}): {e}"));
                m_values.push(Complex64::new(f64::NAN, f64::NAN));
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::Accuracy {
            what: format!(
                "lindhard evaluation failed at {} lattice points: {}",
                failures.len(),
                failures[..failures.len().min(4)].join("; ")
            ),
            achieved: f64::INFINITY,
            requested: 0.0,
        });
    }
    let mut values = Vec::with_capacity(grid.len());
    let mut margin = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    let mut max_gain = 0.0f64;
    for (flat, &(idx, conj, kmag)) in bin_pairs.iter().enumerate() {
        let sigma = if idx == usize::MAX {
            Complex64::new(0.0, 0.0)
        } else {
            let m = if conj { m_values[idx].conj() } else { m_values[idx] };
            let (it, _ix, _iy) = grid.coords(flat);
            let g = pot.what_hat(kmag) * m;
            // bins on the time-Nyquist plane are their own frequency mirror,
            // so conjugate symmetry (real output from real input) forces a
            // real multiplier there; omega = 0 is real already
            if grid.n_t % 2 == 0 && it == grid.n_t / 2 {
                Complex64::new(g.re, 0.0)
            } else {
                g
            }
        };
        let dist_to_minus_one = (sigma + Complex64::new(1.0, 0.0)).norm();
        if dist_to_minus_one < margin {
            margin = dist_to_minus_one;
            let (it, ix, iy) = grid.coords(flat);
            argmin = (grid.omega(it), grid.k_mag(ix, iy));
        }
        max_gain = max_gain.max(sigma.norm());
        values.push(sigma);
    }
    Ok(MultiplierTable {
        grid,
        values,
        margin,
        margin_argmin: argmin,
        max_gain,
        max_est_error: max_err,
    })
}

/// Apply L_1: inverse transform of (w_hat m_f) times the transform of phi.
pub fn apply_l1_with(phi: &SpaceTimeField, table: &MultiplierTable) -> Result<SpaceTimeField> {
    if table.grid != phi.grid {
        return Err(Error::InvalidParameter(
            "multiplier table grid does not match the field".into(),
        ));
    }
    let mut spec = phi.to_spectrum();
    for (z, s) in spec.iter_mut().zip(table.values.iter()) {
        *z *= s;
    }
    let (out, _imag) = SpaceTimeField::from_spectrum(phi.grid, spec)?;
    Ok(out)
}

/// Apply (1 + L_1)^{-1}: bin-wise division by 1 + w_hat m_f.
pub fn invert_one_plus_l1_with(
    rhs: &SpaceTimeField,
    table: &MultiplierTable,
) -> Result<SpaceTimeField> {
    if table.grid != rhs.grid {
        return Err(Error::InvalidParameter(
            "multiplier table grid does not match the field".into(),
        ));
    }
    if table.margin <= 1e-6 {
        return Err(Error::NearSingular {
            what: "1 + L_1 on the dual lattice".into(),
            margin: table.margin,
            omega: table.margin_argmin.0,
            kmag: table.margin_argmin.1,
        });
    }
    let mut spec = rhs.to_spectrum();
    for (z, s) in spec.iter_mut().zip(table.values.iter()) {
        *z /= Complex64::new(1.0, 0.0) + s;
    }
    let (out, _imag) = SpaceTimeField::from_spectrum(rhs.grid, spec)?;
    Ok(out)
}

/// One-shot variants building the table on the fly.
pub fn apply_l1(
    phi: &SpaceTimeField,
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
) -> Result<SpaceTimeField> {
    let table = build_multiplier(dist, pot, phi.grid)?;
    apply_l1_with(phi, &table)
}

pub fn invert_one_plus_l1(
    rhs: &SpaceTimeField,
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
) -> Result<SpaceTimeField> {
    let table = build_multiplier(dist, pot, rhs.grid)?;
    invert_one_plus_l1_with(rhs, &table)
}

/// Linearized density dynamics: the exact solution of
/// rho + L_1 rho = rho_free on the grid, i.e. the first Picard iterate of
/// the full response equation with the higher-order terms dropped.
pub fn linearized_response(
    q0: &FinitePerturbation,
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
    grid: FieldGrid,
) -> Result<SpaceTimeField> {
    let rho_free = free_density(q0, grid)?;
    invert_one_plus_l1(&rho_free, dist, pot)
}
