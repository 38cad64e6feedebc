//! The Lindhard response function m_f(omega, k).
//!
//! Three independent evaluation routes are provided and cross-checked:
//!
//! * closed forms at zero temperature (explicit in d = 1 and d = 2, and a
//!   reduction integral over the Fermi ball radius for d >= 2),
//! * the f'-weighted integral representation
//!   m_f(omega, k) = -int_0^inf m_d^F(s, omega, k) f'(s) ds for any smooth
//!   strictly decreasing occupation,
//! * a direct time-quadrature oracle
//!   m_f(omega, k) = 2 int_0^inf sin(t k^2) gcheck(2 t k) e^{-i omega t} dt,
//!   which only uses the radial profile and therefore exercises none of the
//!   closed-form branch arithmetic.

use crate::distributions::{sphere_area, Family, MomentumDistribution};
use crate::error::{Error, Result};
use crate::par::par_map;
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Evaluation route that produced a [`LindhardValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    FPrimeIntegral,
    TimeQuadrature,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Route::ClosedForm => "closed_form",
            Route::FPrimeIntegral => "f_prime_integral",
            Route::TimeQuadrature => "time_quadrature",
        };
        f.write_str(s)
    }
}

/// Complex Lindhard value with provenance and a conservative error estimate.
#[derive(Debug, Clone, Copy)]
pub struct LindhardValue {
    pub re: f64,
    pub im: f64,
    pub route: Route,
    pub est_error: f64,
}

impl LindhardValue {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.as_complex().norm()
    }
}

/// A frequency-momentum evaluation point; m_f depends on k only through |k|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyMomentumPoint {
    pub omega: f64,
    pub kmag: f64,
}

impl FrequencyMomentumPoint {
    pub fn new(omega: f64, kmag: f64) -> Self {
        Self { omega, kmag }
    }
}

const SINGULAR_GUARD: f64 = 1e-12;

fn sqrt_plus(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn sqrt_minus(x: f64) -> f64 {
    (-x).max(0.0).sqrt()
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// d = 1 zero-temperature closed form, total-function version used inside
/// reduction and f'-integrals (the log blows up on a measure-zero set that
/// quadrature nodes never hit exactly).
fn m1_fermi_raw(mu: f64, omega: f64, kmag: f64) -> Complex64 {
    let a = kmag * kmag;
    let b = 2.0 * kmag * mu.sqrt();
    let num = (a + b) * (a + b) - omega * omega;
    let den = (a - b) * (a - b) - omega * omega;
    let re = if num == 0.0 || den == 0.0 {
        f64::NEG_INFINITY
    } else {
        (num / den).abs().ln() / (2.0 * (2.0 * PI).sqrt() * kmag)
    };
    let c = PI.sqrt() / (2.0 * 2.0f64.sqrt() * kmag);
    let ind_plus = ((omega + a).abs() <= b) as u8 as f64;
    let ind_minus = ((omega - a).abs() <= b) as u8 as f64;
    Complex64::new(re, c * (ind_plus - ind_minus))
}

/// d = 2 zero-temperature closed form, total function.
///
/// The imaginary coefficient is 1/(4 k^2): integrating the occupation
/// difference against delta(2 k.l - (omega -/+ k^2)) over the Fermi disc
/// gives sqrt((4 mu k^2 - (k^2 +/- omega)^2)_+) / (4 k^2), and the same
/// constant follows from composing the d = 1 form with the dimensional
/// reduction integral. Both quadrature routes confirm it.
fn m2_fermi_raw(mu: f64, omega: f64, kmag: f64) -> Complex64 {
    let k2 = kmag * kmag;
    let dp = (k2 + omega) * (k2 + omega) - 4.0 * mu * k2;
    let dm = (k2 - omega) * (k2 - omega) - 4.0 * mu * k2;
    let re = 0.25
        * (2.0 - sgn(k2 + omega) * sqrt_plus(dp) / k2 - sgn(k2 - omega) * sqrt_plus(dm) / k2);
    let im = (sqrt_minus(dp) - sqrt_minus(dm)) / (4.0 * k2);
    Complex64::new(re, im)
}

/// Distance from (omega, k) to the branch set of the d = 1 closed form.
fn branch_distance_1d(mu: f64, omega: f64, kmag: f64) -> f64 {
    let a = kmag * kmag;
    let b = 2.0 * kmag * mu.sqrt();
    [(a + b), (a - b)]
        .iter()
        .flat_map(|&edge| [(omega - edge).abs(), (omega + edge).abs()])
        .fold(f64::INFINITY, f64::min)
}

/// Zero-temperature Lindhard function in d = 1.
pub fn m_fermi_1d(mu: f64, omega: f64, kmag: f64) -> Result<LindhardValue> {
    check_mu_k(mu, kmag)?;
    let dist = branch_distance_1d(mu, omega, kmag);
    if dist < SINGULAR_GUARD {
        return Err(Error::Singularity {
            what: "m_fermi_1d log branch point".into(),
            distance: dist,
        });
    }
    let v = m1_fermi_raw(mu, omega, kmag);
    Ok(LindhardValue {
        re: v.re,
        im: v.im,
        route: Route::ClosedForm,
        est_error: 1e-14 * (1.0 + v.norm()),
    })
}

/// Zero-temperature Lindhard function in d = 2 (globally defined).
pub fn m_fermi_2d(mu: f64, omega: f64, kmag: f64) -> Result<LindhardValue> {
    check_mu_k(mu, kmag)?;
    let v = m2_fermi_raw(mu, omega, kmag);
    Ok(LindhardValue {
        re: v.re,
        im: v.im,
        route: Route::ClosedForm,
        est_error: 1e-14 * (1.0 + v.norm()),
    })
}

fn check_mu_k(mu: f64, kmag: f64) -> Result<()> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("requires mu > 0, got {mu}")));
    }
    if !(kmag > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "requires kmag > 0, got {kmag}"
        )));
    }
    Ok(())
}

/// Interior break points of the s-dependence of m_d^F(s, omega, k): both the
/// log singularities of the d = 1 form and the square-root kinks of the
/// d = 2 form sit at s = (omega +/- k^2)^2 / (4 k^2).
fn s_branch_points(omega: f64, kmag: f64) -> [f64; 2] {
    let k2 = kmag * kmag;
    let sp = (omega + k2) / (2.0 * kmag);
    let sm = (omega - k2) / (2.0 * kmag);
    [sp * sp, sm * sm]
}

/// Zero-temperature Lindhard function for d >= 2 through the reduction
/// integral over m_1^F.
pub fn m_fermi_d_via_m1(d: usize, mu: f64, omega: f64, kmag: f64) -> Result<LindhardValue> {
    check_mu_k(mu, kmag)?;
    if d < 2 {
        return Err(Error::InvalidParameter(
            "reduction over m_1^F requires d >= 2".into(),
        ));
    }
    let pref = sphere_area(d - 1) * mu.powf((d as f64 - 1.0) / 2.0)
        / (2.0 * PI).powf((d as f64 - 1.0) / 2.0);
    let breaks = radial_breaks(mu, omega, kmag);
    let q = quad::adaptive_c_with_breaks(
        |r| m1_fermi_raw(mu * (1.0 - r * r), omega, kmag) * r.powi(d as i32 - 2),
        0.0,
        1.0,
        &breaks,
        1e-10,
        1e-10,
        4000,
    )?;
    Ok(LindhardValue {
        re: pref * q.value.re,
        im: pref * q.value.im,
        route: Route::ClosedForm,
        est_error: pref * q.est_error,
    })
}

/// Zero-temperature Lindhard function for d >= 3 through the reduction
/// integral over m_2^F.
pub fn m_fermi_d_via_m2(d: usize, mu: f64, omega: f64, kmag: f64) -> Result<LindhardValue> {
    check_mu_k(mu, kmag)?;
    if d < 3 {
        return Err(Error::InvalidParameter(
            "reduction over m_2^F requires d >= 3".into(),
        ));
    }
    let pref = sphere_area(d - 2) * mu.powf((d as f64 - 2.0) / 2.0)
        / (2.0 * PI).powf((d as f64 - 2.0) / 2.0);
    let breaks = radial_breaks(mu, omega, kmag);
    let q = quad::adaptive_c_with_breaks(
        |r| m2_fermi_raw(mu * (1.0 - r * r), omega, kmag) * r.powi(d as i32 - 3),
        0.0,
        1.0,
        &breaks,
        1e-10,
        1e-10,
        4000,
    )?;
    Ok(LindhardValue {
        re: pref * q.value.re,
        im: pref * q.value.im,
        route: Route::ClosedForm,
        est_error: pref * q.est_error,
    })
}

/// Break points in the reduction variable r where s = mu (1 - r^2) crosses
/// the branch set of the integrand.
fn radial_breaks(mu: f64, omega: f64, kmag: f64) -> Vec<f64> {
    s_branch_points(omega, kmag)
        .iter()
        .filter(|&&s| s > 0.0 && s < mu)
        .map(|&s| (1.0 - s / mu).sqrt())
        .collect()
}

/// Zero-temperature Lindhard function, dispatching per dimension.
pub fn m_fermi_d(d: usize, mu: f64, omega: f64, kmag: f64) -> Result<LindhardValue> {
    match d {
        0 => Err(Error::InvalidParameter("d must be >= 1".into())),
        1 => m_fermi_1d(mu, omega, kmag),
        2 => m_fermi_d_via_m1(2, mu, omega, kmag),
        _ => m_fermi_d_via_m2(d, mu, omega, kmag),
    }
}

/// m_d^F(s, omega, k) as a total complex function, used as the kernel of the
/// f'-weighted representation.
fn m_kernel_raw(d: usize, s: f64, omega: f64, kmag: f64) -> Complex64 {
    match d {
        1 => m1_fermi_raw(s, omega, kmag),
        2 => m2_fermi_raw(s, omega, kmag),
        _ => {
            // d = 3 reduction over m_2^F with a fixed small node budget; the
            // integrand is bounded and piecewise smooth in r.
            let pref = sphere_area(1) * s.sqrt() / (2.0 * PI).sqrt();
            let breaks = radial_breaks(s, omega, kmag);
            let q = quad::adaptive_c_with_breaks(
                |r| m2_fermi_raw(s * (1.0 - r * r), omega, kmag),
                0.0,
                1.0,
                &breaks,
                1e-9,
                1e-9,
                600,
            );
            match q {
                Ok(v) => v.value * pref,
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        }
    }
}

/// Lindhard function of a general smooth distribution through
/// m_f = -int m_d^F(s) f'(s) ds. Zero-temperature input delegates to the
/// closed forms.
pub fn m_general(
    dist: &MomentumDistribution,
    omega: f64,
    kmag: f64,
) -> Result<LindhardValue> {
    let d = dist.dimension();
    if dist.family() == Family::FermiZeroT {
        return m_fermi_d(d, dist.mu().unwrap(), omega, kmag);
    }
    if !(kmag > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "m_general requires kmag > 0, got {kmag}"
        )));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!(
            "f'-integral route supports d in 1..=3, got {d}"
        )));
    }
    let s_max = dist.momentum_support().powi(2).max(1.0);
    let mut breaks: Vec<f64> = s_branch_points(omega, kmag).to_vec();
    if let (Some(mu), Some(t)) = (dist.mu(), dist.temperature()) {
        // f' is concentrated around the chemical potential
        for b in [mu, mu - 5.0 * t, mu + 5.0 * t, mu - 20.0 * t, mu + 20.0 * t] {
            breaks.push(b);
        }
    }
    let q = quad::adaptive_c_with_breaks(
        |s| -m_kernel_raw(d, s, omega, kmag) * dist.eval_f_derivative(s).unwrap_or(0.0),
        0.0,
        s_max,
        &breaks,
        1e-9,
        1e-9,
        6000,
    )?;
    if !q.value.re.is_finite() || !q.value.im.is_finite() {
        return Err(Error::accuracy("f'-integral", f64::INFINITY, 1e-9));
    }
    Ok(LindhardValue {
        re: q.value.re,
        im: q.value.im,
        route: Route::FPrimeIntegral,
        est_error: q.est_error + 1e-12,
    })
}

/// Time-quadrature oracle:
/// m_f(omega, k) = 2 int_0^inf sin(t k^2) gcheck(2 t k) e^{-i omega t} dt.
///
/// Panels are one half-period of the fastest combined tone; the cumulative
/// panel sums are extrapolated with the epsilon algorithm, which converges
/// for the conditionally convergent zero-temperature tails.
pub fn m_oracle_time(
    dist: &MomentumDistribution,
    omega: f64,
    kmag: f64,
) -> Result<LindhardValue> {
    m_oracle_time_tol(dist, omega, kmag, 1e-8)
}

pub fn m_oracle_time_tol(
    dist: &MomentumDistribution,
    omega: f64,
    kmag: f64,
    tol: f64,
) -> Result<LindhardValue> {
    if !(kmag > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "m_oracle_time requires kmag > 0, got {kmag}"
        )));
    }
    let k2 = kmag * kmag;
    let osc = dist.gcheck_oscillation_freq();
    // time scale on which the profile argument 2 t k decays
    let t_decay = dist.gcheck_decay_scale() / (2.0 * kmag);
    let tone = k2 + omega.abs() + 2.0 * kmag * osc;
    let half_period = (PI / tone).min(8.0 * t_decay.max(1e-6));
    let max_panels = 1200;
    let integrand = |t: f64| -> Complex64 {
        let g = dist.gcheck(2.0 * t * kmag).unwrap_or(f64::NAN);
        let s = (t * k2).sin() * 2.0 * g;
        // keep the imaginary part exactly zero when omega == 0
        if omega == 0.0 {
            Complex64::new(s, 0.0)
        } else {
            Complex64::new(s * (omega * t).cos(), -s * (omega * t).sin())
        }
    };
    let r = quad::oscillatory_tail(integrand, 0.0, half_period, tol, max_panels)?;
    if !r.value.re.is_finite() || !r.value.im.is_finite() {
        return Err(Error::accuracy("time-quadrature oracle", f64::INFINITY, tol));
    }
    // propagated per-point profile error over the effective integration span
    let span = r.panels as f64 * half_period;
    let g_err = if dist.family() == Family::FermiZeroT || dist.family() == Family::Boltzmann {
        1e-14
    } else {
        1e-11
    };
    Ok(LindhardValue {
        re: r.value.re,
        im: r.value.im,
        route: Route::TimeQuadrature,
        est_error: r.est_error + 2.0 * g_err * span,
    })
}

/// Uniform bound on |m_f|: gcheck_weighted_norm / (2 |S^{d-1}|); equal to
/// ||gcheck||_L1 / (4 pi) in d = 2.
pub fn uniform_bound(dist: &MomentumDistribution) -> Result<quad::QuadValue> {
    let norm = dist.gcheck_weighted_norm()?;
    let s = sphere_area(dist.dimension());
    Ok(quad::QuadValue {
        value: norm.value / (2.0 * s),
        est_error: norm.est_error / (2.0 * s),
    })
}

/// Evaluate m_f on a set of points (parallel over points).
pub fn sweep(
    dist: &MomentumDistribution,
    points: &[FrequencyMomentumPoint],
) -> Vec<Result<LindhardValue>> {
    par_map(points, |p| m_general(dist, p.omega, p.kmag))
}

/// CSV rows for a sweep: `omega,kmag,re_m,im_m,route,est_error`, full float
/// precision, one row per point; failed points are skipped.
pub fn sweep_csv(points: &[FrequencyMomentumPoint], values: &[Result<LindhardValue>]) -> String {
    let mut out = String::from("omega,kmag,re_m,im_m,route,est_error\n");
    for (p, v) in points.iter().zip(values.iter()) {
        if let Ok(v) = v {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.omega, p.kmag, v.re, v.im, v.route, v.est_error
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_static_anchor() {
        // mu = 1, omega = 0, k = 1: re = ln 9 / (2 sqrt(2 pi)), im = 0
        let v = m_fermi_1d(1.0, 0.0, 1.0).unwrap();
        let expect = 9.0f64.ln() / (2.0 * (2.0 * PI).sqrt());
        assert!((v.re - expect).abs() < 1e-14);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn m1_static_imaginary_vanishes() {
        for &k in &[0.3, 0.9, 1.7, 3.2] {
            let v = m_fermi_1d(1.0, 0.0, k).unwrap();
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn m1_indicator_anchor() {
        // mu = 1, k = 1, omega = 2: only the second indicator is active
        let v = m_fermi_1d(1.0, 2.0, 1.0).unwrap();
        let expect = -PI.sqrt() / (2.0 * 2.0f64.sqrt());
        assert!((v.im - expect).abs() < 1e-14);
    }

    #[test]
    fn m1_singular_guard() {
        // omega exactly on the branch a + b = 3
        assert!(matches!(
            m_fermi_1d(1.0, 3.0, 1.0),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn m2_static_plateau() {
        // omega = 0, k <= 2 sqrt(mu): exactly 1/2
        for i in 0..10 {
            let k = 0.15 + 1.8 * i as f64 / 10.0;
            let v = m_fermi_2d(1.0, 0.0, k).unwrap();
            assert_eq!(v.re, 0.5, "k = {k}");
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn m2_static_above_fermi_momentum() {
        // k > 2 sqrt(mu): re = (1 - sqrt(1 - 4 mu / k^2)) / 2
        let mu = 1.0;
        let k: f64 = 3.0;
        let v = m_fermi_2d(mu, 0.0, k).unwrap();
        let expect = 0.5 * (1.0 - (1.0 - 4.0 * mu / (k * k)).sqrt());
        assert!((v.re - expect).abs() < 1e-14);
    }

    #[test]
    fn m2_curve_formula() {
        // on omega = k^2 + 2 sqrt(mu) k the imaginary part vanishes and
        // re = (1 - sqrt(1 + 2 sqrt(mu)/k)) / 2
        for &(smu, k) in &[(1.0f64, 1.0f64), (1.5, 0.5), (0.75, 2.0), (1.25, 4.0)] {
            let mu = smu * smu;
            let omega = k * k + 2.0 * smu * k;
            let v = m_fermi_2d(mu, omega, k).unwrap();
            let expect = 0.5 * (1.0 - (1.0 + 2.0 * smu / k).sqrt());
            assert!(
                (v.re - expect).abs() < 1e-12,
                "mu={mu} k={k}: {} vs {expect}",
                v.re
            );
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn m2_reduction_agrees_with_closed_form() {
        for &(omega, k) in &[(0.5, 0.9), (0.0, 1.3), (-1.7, 0.4), (3.0, 2.2)] {
            let direct = m_fermi_2d(1.0, omega, k).unwrap();
            let reduced = m_fermi_d_via_m1(2, 1.0, omega, k).unwrap();
            assert!(
                (direct.as_complex() - reduced.as_complex()).norm() < 1e-6,
                "omega={omega} k={k}: {direct:?} vs {reduced:?}"
            );
        }
    }

    #[test]
    fn m3_two_reduction_routes_agree() {
        for &(omega, k) in &[(1.0, 1.0), (0.4, 0.8), (2.5, 1.6)] {
            let via1 = m_fermi_d_via_m1(3, 1.0, omega, k).unwrap();
            let via2 = m_fermi_d_via_m2(3, 1.0, omega, k).unwrap();
            assert!(
                (via1.as_complex() - via2.as_complex()).norm() < 1e-6,
                "omega={omega} k={k}: {via1:?} vs {via2:?}"
            );
        }
    }

    #[test]
    fn m3_static_small_k_limit() {
        // omega = 0, k -> 0: m -> (1/2) int_0^inf r gcheck_3(r) dr
        //                       = sqrt(mu / (2 pi)) for the Fermi ball
        let mu: f64 = 1.0;
        let v = m_fermi_d(3, mu, 0.0, 1e-3).unwrap();
        let expect = (mu / (2.0 * PI)).sqrt();
        assert!((v.re - expect).abs() < 2e-3, "{} vs {expect}", v.re);
    }

    #[test]
    fn oracle_matches_m2_closed_form() {
        let dist = MomentumDistribution::fermi_zero_t(1.0, 2).unwrap();
        for &(omega, k) in &[(0.3, 0.7), (0.0, 1.1), (2.3, 0.9), (-1.2, 1.7)] {
            let closed = m_fermi_2d(1.0, omega, k).unwrap();
            let oracle = m_oracle_time(&dist, omega, k).unwrap();
            let dev = (closed.as_complex() - oracle.as_complex()).norm();
            assert!(
                dev < 1e-6,
                "omega={omega} k={k}: dev {dev:.2e} (est {:.2e})",
                oracle.est_error
            );
        }
    }

    #[test]
    fn oracle_matches_m1_closed_form() {
        let dist = MomentumDistribution::fermi_zero_t(1.0, 1).unwrap();
        for &(omega, k) in &[(0.0, 1.0), (2.0, 1.0), (0.7, 1.4)] {
            let closed = m_fermi_1d(1.0, omega, k).unwrap();
            let oracle = m_oracle_time(&dist, omega, k).unwrap();
            let dev = (closed.as_complex() - oracle.as_complex()).norm();
            assert!(dev < 1e-6, "omega={omega} k={k}: dev {dev:.2e}");
        }
    }

    #[test]
    fn oracle_small_k_limit_is_half_first_moment() {
        // omega = 0, k -> 0: m -> (1/2) int_0^inf r gcheck(r) dr; for the
        // d = 2 Boltzmann gas that is e^{mu/T} / 2.
        let dist = MomentumDistribution::boltzmann(2.0, 0.4, 2).unwrap();
        let v = m_oracle_time(&dist, 0.0, 1e-3).unwrap();
        let expect = (0.4f64 / 2.0).exp() / 2.0;
        assert!((v.re - expect).abs() < 1e-5, "{} vs {expect}", v.re);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn oracle_conjugate_symmetry() {
        let dist = MomentumDistribution::boltzmann(1.0, 0.0, 2).unwrap();
        let plus = m_oracle_time(&dist, 0.8, 0.9).unwrap();
        let minus = m_oracle_time(&dist, -0.8, 0.9).unwrap();
        assert!((plus.re - minus.re).abs() < 1e-12);
        assert!((plus.im + minus.im).abs() < 1e-12);
    }

    #[test]
    fn general_route_matches_oracle_for_boltzmann() {
        let dist = MomentumDistribution::boltzmann(1.0, 0.0, 2).unwrap();
        for &(omega, k) in &[(0.5, 0.8), (0.0, 1.2), (1.9, 0.6)] {
            let a = m_general(&dist, omega, k).unwrap();
            let b = m_oracle_time(&dist, omega, k).unwrap();
            let dev = (a.as_complex() - b.as_complex()).norm();
            assert!(
                dev < (a.est_error + b.est_error).max(1e-7),
                "omega={omega} k={k}: dev {dev:.2e}"
            );
        }
    }

    #[test]
    fn general_route_matches_oracle_for_fermi_dirac() {
        let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
        let a = m_general(&dist, 1.0, 1.0).unwrap();
        let b = m_oracle_time(&dist, 1.0, 1.0).unwrap();
        let dev = (a.as_complex() - b.as_complex()).norm();
        assert!(
            dev < (a.est_error + b.est_error).max(1e-5),
            "dev {dev:.2e}, est {:.1e}/{:.1e}",
            a.est_error,
            b.est_error
        );
    }

    #[test]
    fn general_route_matches_oracle_in_one_dimension() {
        let dist = MomentumDistribution::boltzmann(1.5, 0.2, 1).unwrap();
        for &(omega, k) in &[(0.4, 0.9), (0.0, 1.3)] {
            let a = m_general(&dist, omega, k).unwrap();
            let b = m_oracle_time(&dist, omega, k).unwrap();
            let dev = (a.as_complex() - b.as_complex()).norm();
            assert!(
                dev < (a.est_error + b.est_error).max(1e-6),
                "omega={omega} k={k}: dev {dev:.2e}"
            );
        }
    }

    #[test]
    fn general_route_matches_oracle_in_three_dimensions() {
        let dist = MomentumDistribution::boltzmann(1.0, 0.0, 3).unwrap();
        let a = m_general(&dist, 0.6, 1.1).unwrap();
        let b = m_oracle_time(&dist, 0.6, 1.1).unwrap();
        let dev = (a.as_complex() - b.as_complex()).norm();
        assert!(
            dev < (a.est_error + b.est_error).max(1e-5),
            "dev {dev:.2e} (est {:.1e} + {:.1e})",
            a.est_error,
            b.est_error
        );
    }

    #[test]
    fn zero_temperature_limit_of_fermi_dirac() {
        // T -> 0 proxy recovers the zero-T closed form
        let dist = MomentumDistribution::fermi_dirac(1e-3, 1.0, 2).unwrap();
        let v = m_general(&dist, 0.0, 1.0).unwrap();
        assert!((v.re - 0.5).abs() < 1e-3, "{}", v.re);
    }

    #[test]
    fn general_static_values_are_real() {
        let dist = MomentumDistribution::fermi_dirac(2.0, 0.5, 2).unwrap();
        for &k in &[0.4, 1.0, 2.3] {
            let v = m_general(&dist, 0.0, k).unwrap();
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn imaginary_part_negative_for_positive_omega() {
        let dist = MomentumDistribution::fermi_dirac(1.0, 0.5, 2).unwrap();
        for &omega in &[0.3, 1.0, 2.7] {
            for &k in &[0.5, 1.1, 2.0] {
                let v = m_general(&dist, omega, k).unwrap();
                assert!(v.im < 0.0, "omega={omega} k={k}: im = {}", v.im);
            }
        }
    }

    #[test]
    fn boundedness_for_boltzmann() {
        let dist = MomentumDistribution::boltzmann(1.0, 0.0, 2).unwrap();
        let bound = uniform_bound(&dist).unwrap();
        // e^{mu/T}/2 for the d = 2 Boltzmann gas
        assert!((bound.value - 0.5).abs() < 1e-7);
        for &(omega, k) in &[(0.0, 0.01), (0.1, 0.3), (1.0, 1.0), (4.0, 2.0)] {
            let v = m_general(&dist, omega, k).unwrap();
            assert!(v.norm() <= bound.value + 1e-8, "omega={omega} k={k}");
        }
    }

    #[test]
    fn sweep_csv_schema() {
        let dist = MomentumDistribution::boltzmann(1.0, 0.0, 2).unwrap();
        let pts = vec![
            FrequencyMomentumPoint::new(0.0, 0.5),
            FrequencyMomentumPoint::new(1.0, 0.5),
        ];
        let vals = sweep(&dist, &pts);
        let csv = sweep_csv(&pts, &vals);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "omega,kmag,re_m,im_m,route,est_error");
        assert_eq!(lines.count(), 2);
    }
}
