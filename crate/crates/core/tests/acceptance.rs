//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 1-14 live here; criterion 15 (byte-identical CLI artifacts)
//! lives in the CLI crate's own acceptance target. Run with
//! `cargo test --release --test acceptance -- --nocapture` to see the lines.

use gasresponse_core::artifact::pgm_string;
use gasresponse_core::distributions::MomentumDistribution;
use gasresponse_core::dynamics::{
    apply_l1_with, build_multiplier, free_density, invert_one_plus_l1_with, strichartz_ratio,
    FieldGrid, FinitePerturbation, GaussianOrbital, LatticeSpec, LatticeState, SpaceTimeField,
};
use gasresponse_core::lindhard::{self, FrequencyMomentumPoint};
use gasresponse_core::par::par_map;
use gasresponse_core::quad;
use gasresponse_core::rng::SplitMix64;
use gasresponse_core::second_order::{
    det_hls_check, random_pairs, random_triples, SecondOrderKernel,
};
use gasresponse_core::special::dawson;
use gasresponse_core::stability::{self, InteractionPotential};
use std::f64::consts::PI;
use std::time::Instant;

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "[acceptance] {criterion}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Distance from omega to the nearest branch boundary of the d = 2 closed
/// form at (mu, k): the vanishing loci |k^2 +/- omega| = 2 sqrt(mu) k.
fn branch_distance(mu: f64, omega: f64, k: f64) -> f64 {
    let k2 = k * k;
    let b = 2.0 * mu.sqrt() * k;
    (((k2 + omega).abs() - b).abs()).min(((k2 - omega).abs() - b).abs())
}

#[test]
fn c01_closed_form_vs_time_oracle_zero_t() {
    let mu = 1.0;
    let dist = MomentumDistribution::fermi_zero_t(mu, 2).unwrap();
    let mut pts = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            let mut omega = -10.0 + 20.0 * (i as f64 + 0.5) / 20.0 + 0.0123;
            let k = 0.1 + (5.0 - 0.1) * j as f64 / 19.0;
            // deterministic nudge away from branch boundaries
            let mut guard = 0;
            while branch_distance(mu, omega, k) < 0.05 && guard < 64 {
                omega += 0.0371;
                guard += 1;
            }
            pts.push((omega, k));
        }
    }
    let t0 = Instant::now();
    let devs: Vec<f64> = par_map(&pts, |&(omega, k)| {
        let closed = lindhard::m_fermi_2d(mu, omega, k).unwrap();
        let oracle = lindhard::m_oracle_time(&dist, omega, k).unwrap();
        (closed.as_complex() - oracle.as_complex()).norm()
    });
    let elapsed = t0.elapsed();
    let max_dev = devs.iter().cloned().fold(0.0f64, f64::max);
    let pass = max_dev <= 1e-6 && elapsed.as_secs_f64() <= 60.0;
    report(
        "C1 closed form vs time oracle (zero-T, d=2, 20x20)",
        pass,
        &format!("max |dev| = {max_dev:.3e} <= 1e-6, runtime {elapsed:.2?} <= 60 s"),
    );
    assert!(pass);
}

#[test]
fn c02_static_plateau() {
    let mut max_dev = 0.0f64;
    for i in 0..10 {
        let k = 0.15 + (2.0 - 0.3) * i as f64 / 9.0;
        let v = lindhard::m_fermi_2d(1.0, 0.0, k).unwrap();
        max_dev = max_dev.max((v.re - 0.5).abs()).max(v.im.abs());
    }
    let pass = max_dev <= 1e-9;
    report(
        "C2 static plateau m(mu=1, 0, k<2) = 1/2",
        pass,
        &format!("max |dev| = {max_dev:.3e} <= 1e-9"),
    );
    assert!(pass);
}

#[test]
fn c03_vanishing_imaginary_curve() {
    // exactly representable (sqrt(mu), k) pairs keep the curve arithmetic
    // free of rounding in the branch cancellation
    let smus = [0.5f64, 0.75, 1.0, 1.25, 1.5];
    let ks = [0.5f64, 4.0];
    let mut max_dev = 0.0f64;
    let mut n = 0;
    for &smu in &smus {
        for &k in &ks {
            let mu = smu * smu;
            let omega = k * k + 2.0 * smu * k;
            let v = lindhard::m_fermi_2d(mu, omega, k).unwrap();
            let expect = 0.5 * (1.0 - (1.0 + 2.0 * smu / k).sqrt());
            max_dev = max_dev.max((v.re - expect).abs()).max(v.im.abs());
            n += 1;
        }
    }
    let pass = max_dev <= 1e-9 && n == 10;
    report(
        "C3 curve omega = k^2 + 2 sqrt(mu) k",
        pass,
        &format!("10 pairs, max |dev| = {max_dev:.3e} <= 1e-9"),
    );
    assert!(pass);
}

#[test]
fn c04_dimension_reduction_consistency() {
    let points = [
        (0.3, 0.6),
        (0.0, 1.1),
        (-1.4, 0.8),
        (2.2, 1.7),
        (0.9, 0.35),
        (-0.45, 2.4),
        (3.7, 1.2),
        (1.5, 0.95),
        (-2.6, 1.45),
        (0.12, 3.1),
    ];
    let mut max_d2 = 0.0f64;
    let mut max_d3 = 0.0f64;
    for &(omega, k) in &points {
        let closed = lindhard::m_fermi_2d(1.0, omega, k).unwrap();
        let reduced = lindhard::m_fermi_d_via_m1(2, 1.0, omega, k).unwrap();
        max_d2 = max_d2.max((closed.as_complex() - reduced.as_complex()).norm());
        let via1 = lindhard::m_fermi_d_via_m1(3, 1.0, omega, k).unwrap();
        let via2 = lindhard::m_fermi_d_via_m2(3, 1.0, omega, k).unwrap();
        max_d3 = max_d3.max((via1.as_complex() - via2.as_complex()).norm());
    }
    let pass = max_d2 <= 1e-6 && max_d3 <= 1e-6;
    report(
        "C4 dimension reduction (d=2 vs closed, d=3 route consistency)",
        pass,
        &format!("max dev d2 = {max_d2:.3e}, d3 = {max_d3:.3e} <= 1e-6"),
    );
    assert!(pass);
}

fn c5_grid() -> Vec<FrequencyMomentumPoint> {
    let mut pts = Vec::new();
    for i in 0..10 {
        for j in 0..10 {
            let omega = -20.0 + 40.0 * (i as f64 + 0.5) / 10.0;
            let k = 0.6 + (6.0 - 0.6) * j as f64 / 9.0;
            pts.push(FrequencyMomentumPoint::new(omega, k));
        }
    }
    pts
}

#[test]
fn c05_two_route_agreement_and_figure_render() {
    let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
    let pts = c5_grid();
    let rows: Vec<(f64, f64, f64)> = par_map(&pts, |p| {
        let a = lindhard::m_general(&dist, p.omega, p.kmag).unwrap();
        let b = lindhard::m_oracle_time(&dist, p.omega, p.kmag).unwrap();
        (
            (a.as_complex() - b.as_complex()).norm(),
            a.est_error + b.est_error,
            a.re,
        )
    });
    let max_dev = rows.iter().map(|r| r.0).fold(0.0f64, f64::max);
    let within_est = rows.iter().all(|r| r.0 <= r.1);
    // render the same grid as the positive-temperature heatmap
    let table: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let (pgm, _) = pgm_string(&table, 10, 10);
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("fig1_10x10.pgm");
    std::fs::write(&out, &pgm).unwrap();
    let rendered = std::fs::metadata(&out).map(|m| m.len() > 0).unwrap_or(false);
    let pass = max_dev <= 1e-5 && within_est && rendered;
    report(
        "C5 two-route agreement (FermiDirac T=100, 10x10) + heatmap render",
        pass,
        &format!(
            "max |dev| = {max_dev:.3e} <= 1e-5, within summed est_error: {within_est}, heatmap at {}",
            out.display()
        ),
    );
    assert!(pass);
}

#[test]
fn c06a_uniform_bound_on_grid() {
    let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
    let bound = lindhard::uniform_bound(&dist).unwrap().value;
    let pts = c5_grid();
    let max_mod: f64 = par_map(&pts, |p| {
        lindhard::m_general(&dist, p.omega, p.kmag).unwrap().norm()
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    let pass = max_mod <= bound + 1e-8;
    report(
        "C6a uniform bound |m| <= ||gcheck||_L1 / (4 pi) + 1e-8",
        pass,
        &format!("max |m| = {max_mod:.8} vs bound {bound:.8}"),
    );
    assert!(pass);
}

#[test]
fn c06b_limsup_attains_bound_on_rays() {
    // As stated, the criterion requires the near-origin ray maximum of
    // Re m_f to reach 95% of ||gcheck||_L1 / (4 pi) for the criterion-5
    // distribution. The limsup along the rays omega = 2 a k equals
    // (1/2) max_a int t gcheck(t) cos(at) dt, which matches the absolute
    // bound only when gcheck keeps one sign. For FermiDirac(T=100, mu=1)
    // gcheck has genuine negative lobes (gcheck(0.5) ~ -0.149, confirmed by
    // an independent quadrature), the maximizing ray is a = 0, and the
    // attained fraction is 0.9220 < 0.95. The positive-profile Boltzmann
    // gas, where the hypothesis of the limsup identity holds, does attain
    // the bound; that cross-check runs below and passes.
    let boltz = MomentumDistribution::boltzmann(2.0, 0.0, 2).unwrap();
    let b_bound = lindhard::uniform_bound(&boltz).unwrap().value;
    let b_max = ray_max_re(&boltz);
    let boltzmann_attains = b_max >= 0.95 * b_bound;
    assert!(
        boltzmann_attains,
        "sign-definite cross-check failed: {b_max} vs {b_bound}"
    );

    let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
    let bound = lindhard::uniform_bound(&dist).unwrap().value;
    let max_re = ray_max_re(&dist);
    let pass = max_re >= 0.95 * bound;
    report(
        "C6b ray maximum reaches 0.95 * bound (FermiDirac T=100, mu=1)",
        pass,
        &format!(
            "max Re m on rays = {max_re:.8} = {:.4} of bound {bound:.8}; \
             Boltzmann cross-check attains {:.4}",
            max_re / bound,
            b_max / b_bound
        ),
    );
    assert!(
        pass,
        "criterion 6 (second half) is unattainable as stated: the radial \
         profile of FermiDirac(T=100, mu=1) changes sign, so the limsup of \
         Re m_f near the origin is 0.9220 * ||gcheck||_L1/(4 pi), below the \
         required 0.95; see the decisions ledger"
    );
}

fn ray_max_re(dist: &MomentumDistribution) -> f64 {
    let mut pts = Vec::new();
    for &k in &[1e-3, 3e-3, 1e-2] {
        pts.push(FrequencyMomentumPoint::new(0.0, k));
        for i in 0..24 {
            let a = 1e-4 * (3e5f64).powf(i as f64 / 23.0);
            pts.push(FrequencyMomentumPoint::new(2.0 * a * k, k));
        }
    }
    par_map(&pts, |p| {
        lindhard::m_general(dist, p.omega, p.kmag)
            .map(|v| v.re)
            .unwrap_or(f64::NEG_INFINITY)
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn c07_antisymmetry_and_sign() {
    let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
    let pts = c5_grid();
    let anti: f64 = par_map(&pts, |p| {
        let plus = lindhard::m_general(&dist, p.omega, p.kmag).unwrap();
        let minus = lindhard::m_general(&dist, -p.omega, p.kmag).unwrap();
        (plus.im + minus.im).abs()
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    // strictly decreasing smooth families: Im m < 0 for omega, k > 0.
    // Sampled where the resonance window ((omega - k^2)^2 / (4 k^2), ...)
    // keeps f' above the f64 underflow threshold; beyond it the exact value
    // ~ exp(-(omega/2k)^2 / T) has no floating-point representation.
    let mut sign_ok = true;
    for (dist, omegas) in [
        (
            MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap(),
            [0.2, 1.0, 4.0, 15.0],
        ),
        (
            MomentumDistribution::boltzmann(1.0, 0.0, 2).unwrap(),
            [0.2, 0.7, 1.5, 3.0],
        ),
        (
            MomentumDistribution::bose_einstein(1.0, -0.4, 2).unwrap(),
            [0.2, 0.7, 1.5, 3.0],
        ),
    ] {
        for &omega in &omegas {
            for &k in &[0.5, 1.0, 2.7] {
                sign_ok &= lindhard::m_general(&dist, omega, k).unwrap().im < 0.0;
            }
        }
    }
    let pass = anti <= 1e-10 && sign_ok;
    report(
        "C7 antisymmetry of Im m and negativity for omega > 0",
        pass,
        &format!("max |Im m(w) + Im m(-w)| = {anti:.3e} <= 1e-10, sign: {sign_ok}"),
    );
    assert!(pass);
}

#[test]
fn c08_epsilon_g_gaussian_oracle() {
    let t = 2.0;
    let mu = 0.0;
    let dist = MomentumDistribution::boltzmann(t, mu, 2).unwrap();
    let eps = stability::epsilon_g(&dist).unwrap();
    // closed-form cosine moment of the Gaussian profile via the Dawson
    // function, minimized independently of the quadrature machinery
    let closed = |a: f64| -> f64 {
        let p = t / 4.0;
        (mu / t).exp() * (t / 2.0)
            * (1.0 / (2.0 * p) - a / (2.0 * p) * dawson(a / (2.0 * p.sqrt())) / p.sqrt())
    };
    let mut best = (0.0f64, f64::INFINITY);
    for i in 0..60000 {
        let a = i as f64 * 1e-3;
        let v = closed(a);
        if v < best.1 {
            best = (a, v);
        }
    }
    let (_, refined) = quad::golden_min(closed, (best.0 - 2e-3).max(0.0), best.0 + 2e-3, 1e-12);
    let oracle = -2.0 * PI * refined.min(best.1);
    let l1 = dist.gcheck_l1_norm().unwrap().value;
    let dev = (eps.value - oracle).abs();
    let pass = dev <= 1e-6 && eps.value >= 0.0 && eps.value <= l1 + 1e-9;
    report(
        "C8 epsilon_g closed-form oracle (Boltzmann T=2, mu=0)",
        pass,
        &format!(
            "epsilon_g = {:.9} vs oracle {oracle:.9} (dev {dev:.2e} <= 1e-6), 0 <= eps <= {l1:.6}",
            eps.value
        ),
    );
    assert!(pass);
}

#[test]
fn c09_zero_temperature_instability() {
    // w_hat(k) = |k|^{1/4} e^{-k^2}: slower than sqrt(k) at the origin, so
    // the curve product must cross -1
    let rows: Vec<(f64, f64)> = (0..4000)
        .map(|i| {
            let k = 1e-4 * (20.0f64 / 1e-4).powf(i as f64 / 3999.0);
            (k, k.powf(0.25) * (-k * k).exp())
        })
        .collect();
    let pot = InteractionPotential::tabulated(rows, 2, None).unwrap();
    let scan = stability::zero_temp_instability_scan(1.0, &pot, 1e-3, 1e2, 400).unwrap();
    let crossing = scan.crossed && scan.bracket.is_some();

    // small constant w_hat <= 0.1 (flat Gaussian) with a dilute Fermi sea:
    // no crossing inside the scan window
    let flat = InteractionPotential::gaussian(0.1, 1e-6, 2).unwrap();
    let scan2 = stability::zero_temp_instability_scan(0.01, &flat, 1e-3, 1e2, 400).unwrap();
    let pass = crossing && !scan2.crossed;
    report(
        "C9 zero-temperature instability scan",
        pass,
        &format!(
            "|k|^(1/4) potential: crossing bracketed at {:?}; flat 0.1 potential: crossed = {}",
            scan.bracket, scan2.crossed
        ),
    );
    assert!(pass);
}

#[test]
fn c10_multiplier_algebra_roundtrip() {
    let t0 = Instant::now();
    let dist = MomentumDistribution::fermi_zero_t(1.0, 2).unwrap();
    let pot = InteractionPotential::gaussian(0.4, 1.0, 2).unwrap();
    let grid = FieldGrid::new(64, 64, 64, 8.0, 16.0).unwrap();
    let table = build_multiplier(&dist, &pot, grid).unwrap();
    let mut worst = 0.0f64;
    for seed in 1..=5u64 {
        let mut rng = SplitMix64::new(seed);
        let phi = SpaceTimeField::from_values(
            grid,
            (0..grid.len()).map(|_| rng.normal()).collect(),
        )
        .unwrap();
        let applied = apply_l1_with(&phi, &table).unwrap();
        let summed = SpaceTimeField::from_values(
            grid,
            phi.values()
                .iter()
                .zip(applied.values().iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let back = invert_one_plus_l1_with(&summed, &table).unwrap();
        let num: f64 = back
            .values()
            .iter()
            .zip(phi.values().iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = phi.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(num / den);
    }
    let elapsed = t0.elapsed();
    let pass = worst <= 1e-10 && elapsed.as_secs_f64() <= 120.0;
    report(
        "C10 multiplier algebra on 64^3 (5 random fields)",
        pass,
        &format!(
            "worst relative L2 roundtrip = {worst:.3e} <= 1e-10, margin {:.3}, runtime {elapsed:.2?} <= 120 s",
            table.margin
        ),
    );
    assert!(pass);
}

#[test]
fn c11_strichartz_scaling_and_ensemble() {
    let base = FinitePerturbation::gaussians(
        vec![GaussianOrbital::new([0.0, 0.0], 1.0, [0.4, -0.2]).unwrap()],
        vec![1.0],
    )
    .unwrap();
    let r0 = strichartz_ratio(&base).unwrap().ratio;
    let mut max_rel = 0.0f64;
    for &lambda in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        let r = strichartz_ratio(&base.rescale_parabolic(lambda).unwrap())
            .unwrap()
            .ratio;
        max_rel = max_rel.max((r - r0).abs() / r0);
    }
    // 20 seeded random perturbations of rank <= 3
    let mut rng = SplitMix64::new(20260808);
    let mut empirical_c = 0.0f64;
    let mut all_finite = true;
    for _ in 0..20 {
        let rank = 1 + (rng.next_u64() % 3) as usize;
        let mut orbs = Vec::new();
        let mut ws = Vec::new();
        for _ in 0..rank {
            orbs.push(
                GaussianOrbital::new(
                    [rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)],
                    rng.uniform(0.4, 2.2),
                    [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)],
                )
                .unwrap(),
            );
            ws.push(rng.uniform(-1.0, 1.0));
        }
        if ws.iter().all(|w| w.abs() < 1e-3) {
            ws[0] = 0.5;
        }
        let q = FinitePerturbation::gaussians(orbs, ws).unwrap();
        let r = strichartz_ratio(&q).unwrap();
        all_finite &= r.ratio.is_finite();
        empirical_c = empirical_c.max(r.ratio);
    }
    let pass = max_rel <= 1e-6 && all_finite;
    report(
        "C11 Strichartz quotient: parabolic invariance + ensemble",
        pass,
        &format!(
            "max relative drift over lambda in [1/4,4] = {max_rel:.3e} <= 1e-6; \
             empirical C over 20 rank<=3 samples = {empirical_c:.6}"
        ),
    );
    assert!(pass);
}

#[test]
fn c12_lattice_conservation_and_reversal() {
    let dist = MomentumDistribution::fermi_dirac(1.0, 0.5, 2).unwrap();
    let pot = InteractionPotential::gaussian(0.2, 1.0, 2).unwrap();
    let spec = LatticeSpec::new(33, 0.1).unwrap();

    // stationary branch: no perturbation stays exactly homogeneous
    let mut flat = LatticeState::new(&dist, &pot, spec).unwrap();
    let flat_traj = flat.evolve(2.0, 0.05, 3, false).unwrap();
    let flat_dev = flat_traj
        .rows
        .iter()
        .map(|r| r.sup_density_dev)
        .fold(0.0f64, f64::max);

    // perturbed run over the full horizon
    let l = spec.box_len();
    let mut state = LatticeState::new(&dist, &pot, spec).unwrap();
    let orb = GaussianOrbital::new([l / 2.0, l / 2.0], 3.2, [0.1, 0.0]).unwrap();
    state.add_gaussian_orbital(&orb, 3e-4).unwrap();
    let gamma0 = state.gamma().to_vec();
    let dt = 0.04;
    let traj = state.evolve(10.0, dt, 3, true).unwrap();
    let trace0 = traj.rows[0].trace_q;
    let trace_drift = traj
        .rows
        .iter()
        .map(|r| (r.trace_q - trace0).abs())
        .fold(0.0f64, f64::max);
    let eig_drift = traj
        .rows
        .iter()
        .map(|r| r.spec_drift)
        .fold(0.0f64, f64::max);

    // reverse the same trajectory back to t = 0
    let steps = (10.0 / dt).round() as usize;
    state.evolve_steps(-dt, steps).unwrap();
    let mut fro = 0.0f64;
    for (a, b) in state.gamma().iter().zip(gamma0.iter()) {
        fro += (a - b).norm_sqr();
    }
    let reversal = fro.sqrt();

    let pass =
        flat_dev <= 1e-12 && trace_drift <= 1e-8 && eig_drift <= 1e-6 && reversal <= 1e-6;
    report(
        "C12 lattice conservation (33^2 modes, horizon 10)",
        pass,
        &format!(
            "trace drift {trace_drift:.2e} <= 1e-8, eigenvalue drift {eig_drift:.2e} <= 1e-6, \
             reversal {reversal:.2e} <= 1e-6, stationary deviation {flat_dev:.2e} <= 1e-12"
        ),
    );
    assert!(pass);
}

#[test]
fn c13_second_order_reduction_identity() {
    let dist = MomentumDistribution::boltzmann(2.0, 0.0, 2).unwrap();
    let pot = InteractionPotential::gaussian(0.8, 1.0, 2).unwrap();
    let kern = SecondOrderKernel::new(&dist, &pot).unwrap();
    let pairs = random_pairs(2024, 10);
    let rows: Vec<(f64, f64)> = par_map(&pairs, |&(k, l)| {
        let lhs = kern.change_of_variables_lhs(k, l).unwrap();
        let rhs = kern.change_of_variables_rhs(k, l).unwrap();
        let rel = (lhs - rhs).abs() / rhs.abs();
        let direct = kern.l2l1_norm_direct(k, l).unwrap();
        let bound = kern.norm_reduced_bound(k, l).unwrap();
        (rel, bound + 1e-6 - direct)
    });
    let max_rel = rows.iter().map(|r| r.0).fold(0.0f64, f64::max);
    let min_slack = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let pass = max_rel <= 1e-4 && min_slack >= 0.0;
    report(
        "C13 change-of-variables identity + bound direction (10 pairs)",
        pass,
        &format!(
            "max relative identity error = {max_rel:.3e} <= 1e-4, min bound slack = {min_slack:.3e} >= 0"
        ),
    );
    assert!(pass);
}

#[test]
fn c14_det_hls_property() {
    let triples = random_triples(31, 100);
    let result = det_hls_check(&triples, 0.01);
    let (finite, cauchy, max_ratio) = match &result {
        Ok(rep) => (
            rep.samples.iter().all(|s| s.ratio.is_finite()),
            rep.samples
                .iter()
                .map(|s| s.cauchy_rel)
                .fold(0.0f64, f64::max),
            rep.max_ratio,
        ),
        Err(_) => (false, f64::INFINITY, f64::NAN),
    };
    // dilation invariance on a subset
    let mut max_dil = 0.0f64;
    if let Ok(rep) = &result {
        let sub: Vec<_> = triples[..5].to_vec();
        for &lambda in &[0.5, 2.0] {
            let dilated: Vec<_> = sub
                .iter()
                .map(|(f, g, h)| (f.dilate(lambda), g.dilate(lambda), h.dilate(lambda)))
                .collect();
            let rep2 = det_hls_check(&dilated, 0.01).unwrap();
            for (a, b) in rep.samples[..5].iter().zip(rep2.samples.iter()) {
                max_dil = max_dil.max((a.ratio - b.ratio).abs() / a.ratio.max(1e-12));
            }
        }
    }
    let pass = finite && cauchy <= 0.01 && max_dil <= 1e-3;
    report(
        "C14 determinant-HLS ratios (100 Gaussian triples)",
        pass,
        &format!(
            "all finite: {finite}, max dyadic gap = {cauchy:.4} <= 1%, \
             dilation drift = {max_dil:.2e} <= 1e-3, max ratio = {max_ratio:.4}"
        ),
    );
    assert!(pass);
}

/// Supporting check used by several criteria: the positive-temperature free
/// density actually disperses on the linearized-response box (decaying
/// window energy), so the criterion-10/11 grids are physically sensible.
#[test]
fn supporting_linearized_response_disperses() {
    let dist = MomentumDistribution::fermi_dirac(100.0, 1.0, 2).unwrap();
    let pot = InteractionPotential::gaussian(0.2, 1.0, 2).unwrap();
    let grid = FieldGrid::new(16, 32, 32, 3.0, 40.0).unwrap();
    let q0 = FinitePerturbation::gaussians(
        vec![GaussianOrbital::new([20.0, 20.0], 1.3, [0.0, 0.0]).unwrap()],
        vec![0.25],
    )
    .unwrap();
    let table = build_multiplier(&dist, &pot, grid).unwrap();
    let free = free_density(&q0, grid).unwrap();
    let lin = invert_one_plus_l1_with(&free, &table).unwrap();
    assert!(lin.l2_norm().is_finite());
    // window energy decays from the initial slice to the final one
    let first = lin.slice_l2(0);
    let last = lin.slice_l2(grid.n_t - 1);
    assert!(
        last < 0.8 * first,
        "no dispersion: first {first}, last {last}"
    );
}
