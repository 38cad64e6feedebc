//! One-dimensional quadrature kernels.
//!
//! Everything downstream (radial Fourier inversion, the Lindhard oracle, the
//! second-order norms) is built from four pieces: an adaptive Gauss-Kronrod
//! 7-15 rule, a doubling-panel scheme for non-oscillatory integrals over
//! [a, inf), a half-period panel scheme with Wynn epsilon extrapolation for
//! oscillatory tails, and fixed Gauss-Legendre rules for smooth reduction
//! integrals.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// 15-point Kronrod nodes on [-1, 1] (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadValue {
    pub value: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadValueC {
    pub value: Complex64,
    pub est_error: f64,
}

/// One Gauss-Kronrod 7-15 panel. Returns (integral, error estimate).
fn gk15_c<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.norm();
    let mut samples = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        samples[j] = (f1, f2);
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).norm();
    for (j, (f1, f2)) in samples.iter().enumerate() {
        resasc += WGK[j] * ((f1 - reskh).norm() + (f2 - reskh).norm());
    }
    let resk = resk * h;
    let resg = resg * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = (resk - resg).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let eps = f64::EPSILON * 50.0 * resabs;
    if eps > 0.0 {
        err = err.max(eps);
    }
    (resk, err)
}

/// Adaptive Gauss-Kronrod on [a, b] for a complex integrand.
pub fn adaptive_c<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<QuadValueC> {
    if a == b {
        return Ok(QuadValueC {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
        });
    }
    let (v, e) = gk15_c(&mut f, a, b);
    // (neg error, a, b, value, err); simple vector-based worst-first refinement
    let mut intervals = vec![(a, b, v, e)];
    let mut total_err: f64 = e;
    let mut total_val = v;
    for _ in 0..max_panels {
        if total_err <= tol_abs.max(tol_rel * total_val.norm()) {
            break;
        }
        // split the interval with the largest error
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (ia, ib, iv, ie) = intervals.swap_remove(idx);
        if (ib - ia).abs() < 1e-15 * (ia.abs() + ib.abs() + 1.0) {
            // interval exhausted; keep its contribution
            intervals.push((ia, ib, iv, 0.0));
            total_err -= ie;
            continue;
        }
        let mid = 0.5 * (ia + ib);
        let (v1, e1) = gk15_c(&mut f, ia, mid);
        let (v2, e2) = gk15_c(&mut f, mid, ib);
        total_val = total_val - iv + v1 + v2;
        total_err = total_err - ie + e1 + e2;
        intervals.push((ia, mid, v1, e1));
        intervals.push((mid, ib, v2, e2));
    }
    // recompute sums to limit drift
    total_val = intervals.iter().map(|t| t.2).sum();
    total_err = intervals.iter().map(|t| t.3).sum();
    if total_err > tol_abs.max(tol_rel * total_val.norm()).max(1e-300) * 10.0 {
        return Err(Error::accuracy(
            "adaptive quadrature",
            total_err,
            tol_abs.max(tol_rel * total_val.norm()),
        ));
    }
    Ok(QuadValueC {
        value: total_val,
        est_error: total_err,
    })
}

/// Adaptive Gauss-Kronrod on [a, b] for a real integrand.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<QuadValue> {
    let r = adaptive_c(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        tol_abs,
        tol_rel,
        max_panels,
    )?;
    Ok(QuadValue {
        value: r.value.re,
        est_error: r.est_error,
    })
}

/// Same as [`adaptive_c`], with panel boundaries forced at the given interior
/// break points (integrable singularities, indicator edges).
pub fn adaptive_c_with_breaks<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<QuadValueC> {
    let mut pts: Vec<f64> = vec![a];
    let mut sorted: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for p in sorted {
        if p - pts.last().unwrap() > 1e-14 * (1.0 + p.abs()) {
            pts.push(p);
        }
    }
    pts.push(b);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let nseg = pts.len() - 1;
    for w in pts.windows(2) {
        let r = adaptive_c(&mut f, w[0], w[1], tol_abs / nseg as f64, tol_rel, max_panels)?;
        value += r.value;
        err += r.est_error;
    }
    Ok(QuadValueC {
        value,
        est_error: err,
    })
}

/// Real-valued wrapper of [`adaptive_c_with_breaks`].
pub fn adaptive_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> Result<QuadValue> {
    let r = adaptive_c_with_breaks(
        |x| Complex64::new(f(x), 0.0),
        a,
        b,
        breaks,
        tol_abs,
        tol_rel,
        max_panels,
    )?;
    Ok(QuadValue {
        value: r.value.re,
        est_error: r.est_error,
    })
}

/// Non-oscillatory integral over [a, inf) by width-doubling panels.
///
/// Converges geometrically for integrands with exponential or fast algebraic
/// decay; reports an accuracy error otherwise.
pub fn to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    scale: f64,
    tol_abs: f64,
    tol_rel: f64,
) -> Result<QuadValue> {
    let mut width = scale.max(1e-8);
    let mut lo = a;
    let mut total = 0.0;
    let mut err = 0.0;
    let mut small_count = 0;
    for _ in 0..80 {
        let hi = lo + width;
        let r = adaptive(&mut f, lo, hi, tol_abs * 0.1, tol_rel * 0.1, 400)?;
        total += r.value;
        err += r.est_error;
        let threshold = tol_abs.max(tol_rel * total.abs());
        if r.value.abs() < 0.5 * threshold {
            small_count += 1;
            if small_count >= 2 {
                return Ok(QuadValue {
                    value: total,
                    est_error: err + r.value.abs(),
                });
            }
        } else {
            small_count = 0;
        }
        lo = hi;
        width *= 2.0;
    }
    Err(Error::accuracy("tail integral", err.max(1.0), tol_abs))
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
/// Returns the best even-column estimate and a stability-based error bound.
pub fn wynn_epsilon(s: &[Complex64]) -> (Complex64, f64) {
    let n = s.len();
    if n == 0 {
        return (Complex64::new(0.0, 0.0), f64::INFINITY);
    }
    if n == 1 {
        return (s[0], f64::INFINITY);
    }
    let mut prev: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut curr: Vec<Complex64> = s.to_vec();
    let mut best = *s.last().unwrap();
    let mut best_err = (s[n - 1] - s[n - 2]).norm();
    let mut last_even = best;
    let mut col = 0usize;
    while curr.len() > 1 {
        let mut next = Vec::with_capacity(curr.len() - 1);
        for i in 0..curr.len() - 1 {
            let d = curr[i + 1] - curr[i];
            if d.norm() < 1e-290 {
                // plateau: the sequence already converged here
                return (curr[i + 1], 0.0);
            }
            next.push(prev[i + 1] + d.conj() / d.norm_sqr());
        }
        col += 1;
        if col % 2 == 0 {
            let cand = *next.last().unwrap();
            let change = (cand - last_even).norm();
            if change < best_err {
                best_err = change;
                best = cand;
            }
            last_even = cand;
        }
        prev = curr;
        curr = next;
    }
    (best, best_err)
}

#[derive(Debug, Clone, Copy)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub est_error: f64,
    pub panels: usize,
}

/// Integral of an oscillatory integrand over [a, inf).
///
/// Panels of length `half_period` are summed with adaptive quadrature; the
/// sequence of cumulative sums is extrapolated with the epsilon algorithm,
/// which handles multi-tone integrands with algebraically decaying envelopes.
pub fn oscillatory_tail<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    half_period: f64,
    tol: f64,
    max_panels: usize,
) -> Result<OscillatoryValue> {
    let h = half_period;
    let mut partial = Vec::with_capacity(max_panels.min(512));
    let mut cum = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let panel_tol = tol / 50.0;
    let mut tiny_run = 0usize;
    // a single epsilon-table error estimate can dip spuriously low, so a
    // candidate is accepted only when two consecutive checkpoints agree
    let mut candidate: Option<Complex64> = None;
    for n in 0..max_panels {
        let lo = a + n as f64 * h;
        let hi = lo + h;
        let r = adaptive_c(&mut f, lo, hi, panel_tol, 1e-12, 200)?;
        cum += r.value;
        quad_err += r.est_error;
        partial.push(cum);
        // direct convergence (rapidly decaying envelope)
        if r.value.norm() < 0.25 * tol {
            tiny_run += 1;
            if tiny_run >= 3 {
                return Ok(OscillatoryValue {
                    value: cum,
                    est_error: quad_err + r.value.norm(),
                    panels: n + 1,
                });
            }
        } else {
            tiny_run = 0;
        }
        if n >= 16 && n % 4 == 0 {
            let window = partial.len().min(64);
            let tail = &partial[partial.len() - window..];
            let (val, eps_err) = wynn_epsilon(tail);
            if eps_err < tol * 0.5 {
                if let Some(prev) = candidate {
                    let agree = (val - prev).norm();
                    if agree < tol * 0.5 {
                        return Ok(OscillatoryValue {
                            value: val,
                            est_error: eps_err + agree + quad_err,
                            panels: n + 1,
                        });
                    }
                }
                candidate = Some(val);
            } else {
                candidate = None;
            }
        }
    }
    let window = partial.len().min(64);
    let (val, eps_err) = wynn_epsilon(&partial[partial.len() - window..]);
    let confirm = candidate.map(|p| (val - p).norm()).unwrap_or(f64::INFINITY);
    if eps_err.max(confirm) < tol {
        return Ok(OscillatoryValue {
            value: val,
            est_error: eps_err + confirm + quad_err,
            panels: max_panels,
        });
    }
    Err(Error::accuracy("oscillatory tail", eps_err.max(confirm), tol))
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, w));
    }
    // mirror
    let mut full = out.clone();
    for &(x, w) in out.iter().rev() {
        if x != 0.0 {
            full.push((-x, w));
        }
    }
    full.truncate(n);
    full.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    full
}

static GL64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();

/// Fixed 64-node Gauss-Legendre rule on [a, b].
pub fn gl64<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let nodes = GL64.get_or_init(|| gauss_legendre(64));
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in nodes {
        sum += w * f(c + h * x);
    }
    sum * h
}

/// Golden-section minimization of a unimodal function on [a, b].
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol * (1.0 + lo.abs() + hi.abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
