//! Stability and invertibility conditions for the linearized Hartree flow.
//!
//! The linear response operator is the space-time multiplier by
//! w_hat(k) m_f(omega, k); inverting 1 + L_1 requires the margin
//! min |w_hat m_f + 1| to stay positive. This module evaluates the two
//! sufficient conditions (uniform smallness, and the defocusing condition
//! built from the negative-part amplitude epsilon_g), scans the margin over
//! frequency-momentum grids augmented with near-origin rays, and runs the
//! zero-temperature instability scan along the vanishing-imaginary-part
//! curve omega = k^2 + 2 sqrt(mu) k.

use crate::distributions::{sphere_area, MomentumDistribution};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::lindhard::{self, FrequencyMomentumPoint};
use crate::par::par_map;
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Pair interaction given through its radial Fourier transform.
#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// w_hat(k) = amplitude * exp(-(k * width)^2 / 2)
    Gaussian { amplitude: f64, width: f64 },
    /// w_hat sampled on a radial grid, monotone-cubic interpolated,
    /// zero beyond the last node.
    TabulatedRadialFourier { curve: MonotoneCubic },
}

#[derive(Debug, Clone)]
pub struct InteractionPotential {
    kind: PotentialKind,
    dimension: usize,
    w_l1: Option<f64>,
}

impl InteractionPotential {
    pub fn gaussian(amplitude: f64, width: f64, dimension: usize) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian potential requires width > 0, got {width}"
            )));
        }
        let w_l1 = Some(amplitude.abs() * (2.0 * PI).powf(dimension as f64 / 2.0));
        Ok(Self {
            kind: PotentialKind::Gaussian { amplitude, width },
            dimension,
            w_l1,
        })
    }

    /// Zero interaction.
    pub fn zero(dimension: usize) -> Self {
        Self {
            kind: PotentialKind::Gaussian {
                amplitude: 0.0,
                width: 1.0,
            },
            dimension,
            w_l1: Some(0.0),
        }
    }

    /// Tabulated radial w_hat, rows (k, w_hat(k)) with strictly increasing k.
    /// w in L^1 forces w_hat -> 0, so the table must decay at its far end.
    pub fn tabulated(rows: Vec<(f64, f64)>, dimension: usize, w_l1: Option<f64>) -> Result<Self> {
        let (x, y): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        let max_abs = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(last) = y.last() {
            if max_abs > 0.0 && last.abs() > 0.05 * max_abs {
                return Err(Error::InvalidParameter(
                    "tabulated w_hat must decay at the end of the table (Riemann-Lebesgue)"
                        .into(),
                ));
            }
        }
        let curve = MonotoneCubic::new(x, y)?;
        Ok(Self {
            kind: PotentialKind::TabulatedRadialFourier { curve },
            dimension,
            w_l1,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// w_hat at wavenumber magnitude `k`.
    pub fn what_hat(&self, k: f64) -> f64 {
        let k = k.abs();
        match &self.kind {
            PotentialKind::Gaussian { amplitude, width } => {
                amplitude * (-0.5 * (k * width) * (k * width)).exp()
            }
            PotentialKind::TabulatedRadialFourier { curve } => {
                if k > curve.x_max() {
                    0.0
                } else {
                    curve.eval(k)
                }
            }
        }
    }

    pub fn what_zero(&self) -> f64 {
        self.what_hat(0.0)
    }

    /// max(w_hat(0), 0), the positive part at the origin.
    pub fn what_zero_plus(&self) -> f64 {
        self.what_zero().max(0.0)
    }

    /// Sup norm of w_hat over the radial grid.
    pub fn what_inf_norm(&self) -> f64 {
        match &self.kind {
            PotentialKind::Gaussian { amplitude, .. } => amplitude.abs(),
            PotentialKind::TabulatedRadialFourier { curve } => {
                let n = 4000;
                (0..=n)
                    .map(|i| {
                        let k = curve.x_min()
                            + (curve.x_max() - curve.x_min()) * i as f64 / n as f64;
                        self.what_hat(k).abs()
                    })
                    .fold(0.0f64, f64::max)
            }
        }
    }

    /// Sup norm of the negative part of w_hat.
    pub fn what_neg_inf_norm(&self) -> f64 {
        match &self.kind {
            PotentialKind::Gaussian { amplitude, .. } => (-amplitude).max(0.0),
            PotentialKind::TabulatedRadialFourier { curve } => {
                let n = 4000;
                (0..=n)
                    .map(|i| {
                        let k = curve.x_min()
                            + (curve.x_max() - curve.x_min()) * i as f64 / n as f64;
                        (-self.what_hat(k)).max(0.0)
                    })
                    .fold(0.0f64, f64::max)
            }
        }
    }

    /// L^1 norm of w, when known (closed form for Gaussian, else supplied).
    pub fn w_l1_norm(&self) -> Option<f64> {
        self.w_l1
    }
}

/// Result of the epsilon_g minimization.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonG {
    pub value: f64,
    /// minimizing ray slope a (omega = 2 a k near the origin)
    pub argmin_a: f64,
    /// value of int_0^inf t gcheck(t) cos(a t) dt at the minimizer
    pub moment_at_min: f64,
}

/// Cosine moment J(a) = int_0^inf t gcheck(t) cos(a t) dt.
pub fn gcheck_cosine_moment(dist: &MomentumDistribution, a: f64) -> Result<quad::QuadValue> {
    let tau = dist.gcheck_decay_scale();
    let f = |t: f64| t * dist.gcheck(t).unwrap_or(0.0) * (a * t).cos();
    if a * tau < 4.0 {
        quad::to_infinity(f, 0.0, tau, 1e-10, 1e-9)
    } else {
        let r = quad::oscillatory_tail(
            |t| Complex64::new(f(t), 0.0),
            0.0,
            PI / a,
            1e-10,
            2000,
        )?;
        Ok(quad::QuadValue {
            value: r.value.re,
            est_error: r.est_error,
        })
    }
}

/// epsilon_g = -4 pi liminf Re m_f near the origin
///           = -2 pi min_{a >= 0} int_0^inf t gcheck(t) cos(a t) dt  (d = 2).
pub fn epsilon_g(dist: &MomentumDistribution) -> Result<EpsilonG> {
    if dist.dimension() != 2 {
        return Err(Error::Unsupported(format!(
            "epsilon_g is defined for d = 2, got d = {}",
            dist.dimension()
        )));
    }
    // precondition: finite first moment of |gcheck|
    let _ = dist.gcheck_weighted_norm()?;
    let tau = dist.gcheck_decay_scale();
    let a_scale = 1.0 / tau;
    let n_grid = 48;
    let mut grid = vec![0.0f64];
    for i in 0..n_grid {
        grid.push(a_scale * 1e-2 * (1e5f64).powf(i as f64 / (n_grid - 1) as f64));
    }
    let values: Vec<f64> = par_map(&grid, |&a| {
        gcheck_cosine_moment(dist, a).map(|q| q.value).unwrap_or(f64::INFINITY)
    });
    let (imin, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::accuracy("epsilon_g grid", f64::INFINITY, 0.0))?;
    let lo = if imin == 0 { 0.0 } else { grid[imin - 1] };
    let hi = if imin + 1 < grid.len() {
        grid[imin + 1]
    } else {
        grid[imin] * 10.0
    };
    let (a_min, j_min) = quad::golden_min(
        |a| {
            gcheck_cosine_moment(dist, a)
                .map(|q| q.value)
                .unwrap_or(f64::INFINITY)
        },
        lo,
        hi,
        1e-10,
    );
    let j_min = j_min.min(values[imin]);
    let a_min = if j_min < values[imin] { a_min } else { grid[imin] };
    Ok(EpsilonG {
        value: (-2.0 * PI * j_min).max(0.0),
        argmin_a: a_min,
        moment_at_min: j_min,
    })
}

/// Scan layout for the margin search: a log-spaced product grid plus the
/// omega = 0 row plus near-origin rays omega = 2 a k.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub nk: usize,
    pub omega_min: f64,
    pub omega_max: f64,
    pub nomega: usize,
    pub rays: usize,
    pub ray_points: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            k_min: 1e-3,
            k_max: 1e2,
            nk: 200,
            omega_min: 1e-4,
            omega_max: 1e4,
            nomega: 200,
            rays: 50,
            ray_points: 50,
        }
    }
}

impl ScanSpec {
    /// Small grid for quick checks and tests.
    pub fn coarse(nk: usize, nomega: usize) -> Self {
        Self {
            nk,
            nomega,
            rays: 12,
            ray_points: 12,
            ..Self::default()
        }
    }

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    /// All scan points. m_f(-omega, k) is the conjugate of m_f(omega, k) and
    /// w_hat is real, so |w_hat m + 1| is even in omega and the scan keeps
    /// omega >= 0.
    pub fn points(&self, ray_slope_scale: f64) -> Vec<FrequencyMomentumPoint> {
        let ks = Self::log_grid(self.k_min, self.k_max, self.nk);
        let omegas = Self::log_grid(self.omega_min, self.omega_max, self.nomega);
        let mut pts = Vec::with_capacity(self.nk * (self.nomega + 1));
        for &k in &ks {
            pts.push(FrequencyMomentumPoint::new(0.0, k));
            for &w in &omegas {
                pts.push(FrequencyMomentumPoint::new(w, k));
            }
        }
        // near-origin rays
        let slopes = Self::log_grid(1e-3 * ray_slope_scale, 1e3 * ray_slope_scale, self.rays);
        let ray_ks = Self::log_grid(self.k_min, (self.k_min * 100.0).min(self.k_max), self.ray_points);
        for &a in &slopes {
            for &k in &ray_ks {
                pts.push(FrequencyMomentumPoint::new(2.0 * a * k, k));
            }
        }
        pts
    }

    pub fn describe(&self) -> String {
        format!(
            "k: {} log-spaced in [{:.3e}, {:.3e}]; omega: 0 and {} log-spaced in [{:.3e}, {:.3e}]; {} near-origin rays omega = 2 a k with {} k-points each; omega >= 0 by conjugate symmetry",
            self.nk, self.k_min, self.k_max, self.nomega, self.omega_min, self.omega_max, self.rays, self.ray_points
        )
    }
}

/// Full stability report.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub margin: f64,
    pub margin_argmin: Option<FrequencyMomentumPoint>,
    pub epsilon_g: Option<f64>,
    pub epsilon_g_argmin_a: Option<f64>,
    /// ||gcheck||_L1 ||w_hat||_inf < 4 pi
    pub cond_linear: bool,
    /// max(eps_g w_hat(0)_+, ||gcheck||_L1 ||w_hat_-||_inf) < 4 pi;
    /// only defined for strictly decreasing smooth f
    pub cond_negative_part: Option<bool>,
    /// ||w_hat||_inf * weighted norm / (2 |S^{d-1}|)
    pub l2_operator_bound: f64,
    pub gcheck_l1_norm: f64,
    pub what_inf_norm: f64,
    pub what_zero: f64,
    pub grid_spec: String,
    pub n_points: usize,
    pub max_point_est_error: f64,
    /// points excluded by point-level evaluation failures
    pub excluded: Vec<(FrequencyMomentumPoint, String)>,
}

impl StabilityReport {
    /// key=value lines, deterministic order.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("margin={}\n", self.margin));
        if let Some(p) = self.margin_argmin {
            s.push_str(&format!("margin_argmin_omega={}\n", p.omega));
            s.push_str(&format!("margin_argmin_kmag={}\n", p.kmag));
        }
        match self.epsilon_g {
            Some(e) => s.push_str(&format!("epsilon_g={e}\n")),
            None => s.push_str("epsilon_g=undefined\n"),
        }
        if let Some(a) = self.epsilon_g_argmin_a {
            s.push_str(&format!("epsilon_g_argmin_a={a}\n"));
        }
        s.push_str(&format!("cond_linear={}\n", self.cond_linear));
        match self.cond_negative_part {
            Some(c) => s.push_str(&format!("cond_negative_part={c}\n")),
            None => s.push_str("cond_negative_part=not_applicable\n"),
        }
        s.push_str(&format!("l2_operator_bound={}\n", self.l2_operator_bound));
        s.push_str(&format!("gcheck_l1_norm={}\n", self.gcheck_l1_norm));
        s.push_str(&format!("what_inf_norm={}\n", self.what_inf_norm));
        s.push_str(&format!("what_zero={}\n", self.what_zero));
        s.push_str(&format!("n_points={}\n", self.n_points));
        s.push_str(&format!("n_excluded={}\n", self.excluded.len()));
        s.push_str(&format!("max_point_est_error={}\n", self.max_point_est_error));
        s.push_str(&format!("grid_spec={}\n", self.grid_spec));
        s
    }
}

/// Theorem conditions without a margin scan.
pub fn check_theorem_conditions(
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
) -> Result<StabilityReport> {
    if dist.dimension() != 2 {
        return Err(Error::Unsupported(format!(
            "theorem conditions are stated for d = 2, got d = {}",
            dist.dimension()
        )));
    }
    let l1 = dist.gcheck_l1_norm()?;
    let weighted = dist.gcheck_weighted_norm()?;
    let what_inf = pot.what_inf_norm();
    let cond_linear = l1.value * what_inf < 4.0 * PI;
    let (eps, eps_a, cond_neg) = if dist.is_strictly_decreasing() {
        let e = epsilon_g(dist)?;
        let cond = (e.value * pot.what_zero_plus()).max(l1.value * pot.what_neg_inf_norm())
            < 4.0 * PI;
        (Some(e.value), Some(e.argmin_a), Some(cond))
    } else {
        (None, None, None)
    };
    let s = sphere_area(dist.dimension());
    Ok(StabilityReport {
        margin: f64::INFINITY,
        margin_argmin: None,
        epsilon_g: eps,
        epsilon_g_argmin_a: eps_a,
        cond_linear,
        cond_negative_part: cond_neg,
        l2_operator_bound: what_inf * weighted.value / (2.0 * s),
        gcheck_l1_norm: l1.value,
        what_inf_norm: what_inf,
        what_zero: pot.what_zero(),
        grid_spec: "conditions only, no scan".into(),
        n_points: 0,
        max_point_est_error: 0.0,
        excluded: Vec::new(),
    })
}

/// Margin scan |w_hat(k) m_f(omega, k) + 1| over the grid, plus the theorem
/// conditions. Point evaluations run in parallel; the minimum is reduced
/// sequentially with a lexicographic (kmag, omega) tie-break so reports are
/// deterministic.
pub fn stability_margin(
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
    spec: &ScanSpec,
) -> Result<StabilityReport> {
    let mut report = check_theorem_conditions(dist, pot)?;
    let ray_scale = 1.0 / dist.gcheck_decay_scale();
    let points = spec.points(ray_scale);
    let values = par_map(&points, |p| {
        lindhard::m_general(dist, p.omega, p.kmag).map(|m| {
            let gain = pot.what_hat(p.kmag) * m.as_complex();
            (
                (gain + Complex64::new(1.0, 0.0)).norm(),
                m.est_error * pot.what_hat(p.kmag).abs(),
            )
        })
    });
    let mut margin = f64::INFINITY;
    let mut argmin: Option<FrequencyMomentumPoint> = None;
    let mut max_err = 0.0f64;
    let mut excluded = Vec::new();
    for (p, v) in points.iter().zip(values.into_iter()) {
        match v {
            Ok((val, err)) => {
                max_err = max_err.max(err);
                let better = val < margin
                    || (val == margin
                        && argmin
                            .map(|q| (p.kmag, p.omega) < (q.kmag, q.omega))
                            .unwrap_or(true));
                if better {
                    margin = val;
                    argmin = Some(*p);
                }
            }
            Err(e) => excluded.push((*p, e.to_string())),
        }
    }
    report.margin = margin;
    report.margin_argmin = argmin;
    report.grid_spec = spec.describe();
    report.n_points = points.len();
    report.max_point_est_error = max_err;
    report.excluded = excluded;
    Ok(report)
}

/// CSV rows of a margin scan: `omega,kmag,margin_value`.
pub fn margin_scan_csv(
    dist: &MomentumDistribution,
    pot: &InteractionPotential,
    spec: &ScanSpec,
) -> Result<String> {
    let ray_scale = 1.0 / dist.gcheck_decay_scale();
    let points = spec.points(ray_scale);
    let values = par_map(&points, |p| {
        lindhard::m_general(dist, p.omega, p.kmag)
            .map(|m| (pot.what_hat(p.kmag) * m.as_complex() + Complex64::new(1.0, 0.0)).norm())
    });
    let mut out = String::from("omega,kmag,margin_value\n");
    for (p, v) in points.iter().zip(values.into_iter()) {
        if let Ok(v) = v {
            out.push_str(&format!("{},{},{}\n", p.omega, p.kmag, v));
        }
    }
    Ok(out)
}

/// Zero-temperature instability scan along omega = k^2 + 2 sqrt(mu) k, where
/// the imaginary part of m_2^F vanishes and the product w_hat m_f is real
/// and unbounded below as k -> 0 unless w_hat vanishes fast at the origin.
#[derive(Debug, Clone)]
pub struct CurveScan {
    pub crossed: bool,
    /// k-interval bracketing the first crossing of -1, when one exists
    pub bracket: Option<(f64, f64)>,
    /// (k, w_hat(k) * m_2^F(mu, k^2 + 2 sqrt(mu) k, k))
    pub samples: Vec<(f64, f64)>,
}

pub fn zero_temp_instability_scan(
    mu: f64,
    pot: &InteractionPotential,
    k_min: f64,
    k_max: f64,
    n: usize,
) -> Result<CurveScan> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("requires mu > 0, got {mu}")));
    }
    if !(k_min > 0.0 && k_max > k_min && n >= 2) {
        return Err(Error::InvalidParameter(
            "instability scan needs 0 < k_min < k_max and n >= 2".into(),
        ));
    }
    let ks = ScanSpec::log_grid(k_min, k_max, n);
    let samples: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let omega = k * k + 2.0 * mu.sqrt() * k;
            let m = lindhard::m_fermi_2d(mu, omega, k).expect("total closed form");
            (k, pot.what_hat(k) * m.re)
        })
        .collect();
    let crossed = samples.iter().any(|&(_, p)| p < -1.0);
    let mut bracket = None;
    for w in samples.windows(2) {
        if (w[0].1 + 1.0) * (w[1].1 + 1.0) < 0.0 {
            bracket = Some((w[0].0, w[1].0));
            break;
        }
    }
    if crossed && bracket.is_none() {
        // below -1 across the whole window
        bracket = Some((k_min, k_max));
    }
    Ok(CurveScan {
        crossed,
        bracket,
        samples,
    })
}

/// CSV rows of the instability scan: `kmag,product`.
pub fn curve_scan_csv(scan: &CurveScan) -> String {
    let mut out = String::from("kmag,product\n");
    for &(k, p) in &scan.samples {
        out.push_str(&format!("{k},{p}\n"));
    }
    out
}
