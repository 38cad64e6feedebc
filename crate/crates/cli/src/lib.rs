//! Command-line front end: parses gas/potential configs, dispatches the
//! analyses and persists CSV/report/heatmap artifacts together with a
//! deterministic manifest of content hashes.

use gasresponse_core::artifact::{fnv64, pgm_string};
use gasresponse_core::config::{
    self, optional_f64, optional_usize, parse_inline_spec, require_f64, require_usize,
};
use gasresponse_core::distributions::MomentumDistribution;
use gasresponse_core::dynamics::{
    build_multiplier, free_density, invert_one_plus_l1_with, FieldGrid, FinitePerturbation,
    GaussianOrbital, LatticeSpec, LatticeState,
};
use gasresponse_core::error::{Error, ErrorCategory, Result};
use gasresponse_core::lindhard::{self, FrequencyMomentumPoint};
use gasresponse_core::second_order::{
    det_hls_csv, det_hls_check, norm_comparison_csv, random_pairs, random_triples,
    NormComparison, SecondOrderKernel,
};
use gasresponse_core::stability::{
    self, curve_scan_csv, InteractionPotential, ScanSpec,
};
use gasresponse_core::par::par_map;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    LindhardEval,
    StabilityCheck,
    EpsilonG,
    SimulateLinear,
    SimulateLattice,
    SecondOrderCheck,
    Figure1,
}

impl Command {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lindhard-eval" => Command::LindhardEval,
            "stability-check" => Command::StabilityCheck,
            "epsilon-g" => Command::EpsilonG,
            "simulate-linear" => Command::SimulateLinear,
            "simulate-lattice" => Command::SimulateLattice,
            "second-order-check" => Command::SecondOrderCheck,
            "figure1" => Command::Figure1,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::LindhardEval => "lindhard-eval",
            Command::StabilityCheck => "stability-check",
            Command::EpsilonG => "epsilon-g",
            Command::SimulateLinear => "simulate-linear",
            Command::SimulateLattice => "simulate-lattice",
            Command::SecondOrderCheck => "second-order-check",
            Command::Figure1 => "figure1",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub dist_config: Option<PathBuf>,
    pub pot_config: Option<PathBuf>,
    pub q0_config: Option<PathBuf>,
    pub grid: Option<String>,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub tol: Option<f64>,
}

/// Deterministic run manifest: metadata plus (name, bytes, fnv64) per
/// artifact, in insertion order.
#[derive(Debug, Default, Clone)]
pub struct Manifest {
    meta: Vec<(String, String)>,
    artifacts: Vec<(String, usize, u64)>,
}

impl Manifest {
    pub fn add_meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn artifacts(&self) -> &[(String, usize, u64)] {
        &self.artifacts
    }

    pub fn artifacts_mut(&mut self) -> &mut Vec<(String, usize, u64)> {
        &mut self.artifacts
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "{k}={v}");
        }
        for (name, bytes, hash) in &self.artifacts {
            let _ = writeln!(out, "artifact={name} bytes={bytes} fnv64={hash:016x}");
        }
        out
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str, manifest: &mut Manifest) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    manifest
        .artifacts
        .push((name.to_string(), content.len(), fnv64(content.as_bytes())));
    Ok(())
}

fn load_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_dist(cfg: &RunConfig, manifest: &mut Manifest) -> Result<MomentumDistribution> {
    let path = cfg
        .dist_config
        .as_ref()
        .ok_or_else(|| Error::Config("missing required flag --dist".into()))?;
    let text = load_text(path)?;
    manifest.add_meta("input.dist.fnv64", format!("{:016x}", fnv64(text.as_bytes())));
    let base = path.parent().unwrap_or(Path::new("."));
    config::dist_from_config(&text, base)
}

fn load_pot(cfg: &RunConfig, manifest: &mut Manifest) -> Result<InteractionPotential> {
    let path = cfg
        .pot_config
        .as_ref()
        .ok_or_else(|| Error::Config("missing required flag --pot".into()))?;
    let text = load_text(path)?;
    manifest.add_meta("input.pot.fnv64", format!("{:016x}", fnv64(text.as_bytes())));
    let base = path.parent().unwrap_or(Path::new("."));
    config::pot_from_config(&text, base)
}

/// Perturbation config: repeated lines
/// `orbital = cx, cy, sigma, px, py, weight`,
/// or `grid_path = <file>` whose first line is `n_x n_y l_len` followed by
/// `re,im` rows (row-major), with weights on `grid_weight` lines.
pub fn q0_from_config(text: &str, base_dir: &Path) -> Result<FinitePerturbation> {
    let mut orbitals = Vec::new();
    let mut weights = Vec::new();
    let mut grid_path: Option<String> = None;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("perturbation config: bad line '{line}'")));
        };
        match k.trim() {
            "orbital" => {
                let parts: Vec<f64> = v
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Config(format!("orbital: bad number '{p}'")))
                    })
                    .collect::<Result<_>>()?;
                if parts.len() != 6 {
                    return Err(Error::Config(
                        "orbital needs 6 values: cx, cy, sigma, px, py, weight".into(),
                    ));
                }
                orbitals.push(GaussianOrbital::new(
                    [parts[0], parts[1]],
                    parts[2],
                    [parts[3], parts[4]],
                )?);
                weights.push(parts[5]);
            }
            "grid_path" => grid_path = Some(v.trim().to_string()),
            other => {
                return Err(Error::Config(format!(
                    "perturbation config: unknown key '{other}'"
                )))
            }
        }
    }
    if let Some(rel) = grid_path {
        let path = if Path::new(&rel).is_absolute() {
            PathBuf::from(&rel)
        } else {
            base_dir.join(&rel)
        };
        return grid_orbitals_from_file(&path);
    }
    if orbitals.is_empty() {
        return Err(Error::Config(
            "perturbation config holds no orbital lines".into(),
        ));
    }
    FinitePerturbation::gaussians(orbitals, weights)
}

fn grid_orbitals_from_file(path: &Path) -> Result<FinitePerturbation> {
    let text = load_text(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty grid orbital file".into()))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 {
        return Err(Error::Config(
            "grid orbital header must be 'n_x n_y l_len weight'".into(),
        ));
    }
    let n_x: usize = head[0]
        .parse()
        .map_err(|_| Error::Config("bad n_x in grid orbital header".into()))?;
    let n_y: usize = head[1]
        .parse()
        .map_err(|_| Error::Config("bad n_y in grid orbital header".into()))?;
    let l_len: f64 = head[2]
        .parse()
        .map_err(|_| Error::Config("bad l_len in grid orbital header".into()))?;
    let weight: f64 = head[3]
        .parse()
        .map_err(|_| Error::Config("bad weight in grid orbital header".into()))?;
    let mut data = Vec::with_capacity(n_x * n_y);
    for line in lines {
        let mut cols = line.split(',');
        let re: f64 = cols
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Config(format!("grid orbital: bad row '{line}'")))?;
        let im: f64 = cols
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Config(format!("grid orbital: bad row '{line}'")))?;
        data.push(num_complex::Complex64::new(re, im));
    }
    if data.len() != n_x * n_y {
        return Err(Error::Config(format!(
            "grid orbital: expected {} rows, found {}",
            n_x * n_y,
            data.len()
        )));
    }
    FinitePerturbation::grid_orbitals(l_len, n_x, n_y, vec![data], vec![weight])
}

fn load_q0(cfg: &RunConfig, manifest: &mut Manifest) -> Result<FinitePerturbation> {
    let path = cfg
        .q0_config
        .as_ref()
        .ok_or_else(|| Error::Config("missing required flag --q0".into()))?;
    let text = load_text(path)?;
    manifest.add_meta("input.q0.fnv64", format!("{:016x}", fnv64(text.as_bytes())));
    let base = path.parent().unwrap_or(Path::new("."));
    q0_from_config(&text, base)
}

fn grid_map(cfg: &RunConfig) -> Result<std::collections::BTreeMap<String, String>> {
    let spec = cfg
        .grid
        .as_deref()
        .ok_or_else(|| Error::Config("missing required flag --grid".into()))?;
    let map = parse_inline_spec(spec)?;
    if map.is_empty() {
        return Err(Error::Config(
            "empty grid spec: expected comma-separated key=value fields".into(),
        ));
    }
    Ok(map)
}

/// Run one command; writes artifacts plus `manifest.txt` under the output
/// directory and returns the manifest.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::Config(format!("cannot create output dir: {e}")))?;
    let mut manifest = Manifest::default();
    manifest.add_meta("tool", format!("gasresponse {}", env!("CARGO_PKG_VERSION")));
    manifest.add_meta("command", cfg.command.name());
    manifest.add_meta("seed", cfg.seed);
    match cfg.command {
        Command::LindhardEval => run_lindhard_eval(cfg, &mut manifest)?,
        Command::StabilityCheck => run_stability_check(cfg, &mut manifest)?,
        Command::EpsilonG => run_epsilon_g(cfg, &mut manifest)?,
        Command::SimulateLinear => run_simulate_linear(cfg, &mut manifest)?,
        Command::SimulateLattice => run_simulate_lattice(cfg, &mut manifest)?,
        Command::SecondOrderCheck => run_second_order(cfg, &mut manifest)?,
        Command::Figure1 => run_figure1(cfg, &mut manifest)?,
    }
    let rendered = manifest.render();
    let path = cfg.out_dir.join("manifest.txt");
    std::fs::write(&path, rendered)
        .map_err(|e| Error::Config(format!("cannot write manifest: {e}")))?;
    Ok(manifest)
}

fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn run_lindhard_eval(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let map = grid_map(cfg)?;
    let omega_min = require_f64(&map, "omega_min")?;
    let omega_max = require_f64(&map, "omega_max")?;
    let n_omega = require_usize(&map, "n_omega")?;
    let k_min = require_f64(&map, "k_min")?;
    let k_max = require_f64(&map, "k_max")?;
    let n_k = require_usize(&map, "n_k")?;
    if !(k_min > 0.0) {
        return Err(Error::Config("k_min must be positive (m_f needs k > 0)".into()));
    }
    let mut points = Vec::with_capacity(n_omega * n_k);
    for &omega in &linear_grid(omega_min, omega_max, n_omega) {
        for &k in &linear_grid(k_min, k_max, n_k) {
            points.push(FrequencyMomentumPoint::new(omega, k));
        }
    }
    let values = lindhard::sweep(&dist, &points);
    let n_failed = values.iter().filter(|v| v.is_err()).count();
    manifest.add_meta("grid", format!("{n_omega} x {n_k} (omega x k), linear"));
    manifest.add_meta("points_failed", n_failed);
    write_artifact(
        &cfg.out_dir,
        "sweep.csv",
        &lindhard::sweep_csv(&points, &values),
        manifest,
    )
}

fn scan_spec_from_map(map: &std::collections::BTreeMap<String, String>) -> Result<ScanSpec> {
    let mut spec = ScanSpec::default();
    spec.nk = require_usize(map, "nk")?;
    spec.nomega = require_usize(map, "nomega")?;
    if let Some(v) = optional_f64(map, "k_min")? {
        spec.k_min = v;
    }
    if let Some(v) = optional_f64(map, "k_max")? {
        spec.k_max = v;
    }
    if let Some(v) = optional_f64(map, "omega_min")? {
        spec.omega_min = v;
    }
    if let Some(v) = optional_f64(map, "omega_max")? {
        spec.omega_max = v;
    }
    spec.rays = optional_usize(map, "rays", spec.rays)?;
    spec.ray_points = optional_usize(map, "ray_points", spec.ray_points)?;
    Ok(spec)
}

fn run_stability_check(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let pot = load_pot(cfg, manifest)?;
    let spec = scan_spec_from_map(&grid_map(cfg)?)?;
    let report = stability::stability_margin(&dist, &pot, &spec)?;
    write_artifact(&cfg.out_dir, "report.txt", &report.to_key_values(), manifest)?;
    let csv = stability::margin_scan_csv(&dist, &pot, &spec)?;
    write_artifact(&cfg.out_dir, "margin_scan.csv", &csv, manifest)?;
    // zero-temperature instability scan companion when mu is available
    if let Some(mu) = dist.mu() {
        if mu > 0.0 {
            let scan = stability::zero_temp_instability_scan(mu, &pot, spec.k_min, spec.k_max, 200)?;
            manifest.add_meta("instability_crossed", scan.crossed);
            write_artifact(&cfg.out_dir, "instability_scan.csv", &curve_scan_csv(&scan), manifest)?;
        }
    }
    Ok(())
}

fn run_epsilon_g(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let eps = stability::epsilon_g(&dist)?;
    let l1 = dist.gcheck_l1_norm()?;
    let mut report = String::new();
    let _ = writeln!(report, "epsilon_g={}", eps.value);
    let _ = writeln!(report, "argmin_a={}", eps.argmin_a);
    let _ = writeln!(report, "cosine_moment_at_min={}", eps.moment_at_min);
    let _ = writeln!(report, "gcheck_l1_norm={}", l1.value);
    let _ = writeln!(report, "upper_bound_ok={}", eps.value <= l1.value + 1e-9);
    write_artifact(&cfg.out_dir, "report.txt", &report, manifest)
}

fn run_simulate_linear(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let pot = load_pot(cfg, manifest)?;
    let q0 = load_q0(cfg, manifest)?;
    let map = grid_map(cfg)?;
    let grid = FieldGrid::new(
        require_usize(&map, "n_t")?,
        require_usize(&map, "n_x")?,
        require_usize(&map, "n_y")?,
        require_f64(&map, "t_len")?,
        require_f64(&map, "l_len")?,
    )?;
    let table = build_multiplier(&dist, &pot, grid)?;
    let free = free_density(&q0, grid)?;
    let lin = invert_one_plus_l1_with(&free, &table)?;
    manifest.add_meta("lattice_margin", table.margin);
    manifest.add_meta("lattice_max_gain", table.max_gain);
    let mut csv = String::from("t,l2_free,l2_lin\n");
    for it in 0..grid.n_t {
        let _ = writeln!(
            csv,
            "{},{},{}",
            it as f64 * grid.dt(),
            free.slice_l2(it),
            lin.slice_l2(it)
        );
    }
    write_artifact(&cfg.out_dir, "response.csv", &csv, manifest)
}

fn run_simulate_lattice(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let pot = load_pot(cfg, manifest)?;
    let q0 = load_q0(cfg, manifest)?;
    let map = grid_map(cfg)?;
    let spec = LatticeSpec::new(require_usize(&map, "n")?, require_f64(&map, "dk")?)?;
    let dt = require_f64(&map, "dt")?;
    let horizon = require_f64(&map, "horizon")?;
    let samples = optional_usize(&map, "samples", 5)?;
    let spectrum = optional_usize(&map, "spectrum", 1)? != 0;
    let mut state = LatticeState::new(&dist, &pot, spec)?;
    match &q0.orbitals {
        gasresponse_core::dynamics::Orbitals::Gaussians(orbs) => {
            for (orb, w) in orbs.iter().zip(q0.weights.iter()) {
                state.add_gaussian_orbital(orb, *w)?;
            }
        }
        _ => {
            return Err(Error::Unsupported(
                "simulate-lattice takes Gaussian orbital perturbations".into(),
            ))
        }
    }
    let traj = state.evolve(horizon, dt, samples, spectrum)?;
    manifest.add_meta(
        "note",
        "finite torus run: pre-recurrence relaxation evidence, not a whole-space statement",
    );
    write_artifact(&cfg.out_dir, "trajectory.csv", &traj.to_csv(), manifest)
}

fn run_second_order(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    let dist = load_dist(cfg, manifest)?;
    let pot = load_pot(cfg, manifest)?;
    let kern = SecondOrderKernel::new(&dist, &pot)?;
    let pairs = random_pairs(cfg.seed, 10);
    let rows: Vec<Result<NormComparison>> = par_map(&pairs, |&(k, l)| {
        Ok(NormComparison {
            k,
            l,
            direct: kern.l2l1_norm_direct(k, l)?,
            bound: kern.norm_reduced_bound(k, l)?,
        })
    });
    let rows: Vec<NormComparison> = rows.into_iter().collect::<Result<_>>()?;
    write_artifact(&cfg.out_dir, "second_order.csv", &norm_comparison_csv(&rows), manifest)?;
    let triples = random_triples(cfg.seed.wrapping_add(1), 20);
    let tol = cfg.tol.unwrap_or(0.01);
    let report = det_hls_check(&triples, tol)?;
    manifest.add_meta("det_hls_max_ratio", report.max_ratio);
    manifest.add_meta("universal_integral", kern.universal_integral()?);
    write_artifact(&cfg.out_dir, "det_hls.csv", &det_hls_csv(&report), manifest)
}

fn run_figure1(cfg: &RunConfig, manifest: &mut Manifest) -> Result<()> {
    // the fermionic positive-temperature gas of the plot: T = 100, mu = 1,
    // d = 2, unless a distribution config overrides it
    let dist = match &cfg.dist_config {
        Some(_) => load_dist(cfg, manifest)?,
        None => MomentumDistribution::fermi_dirac(100.0, 1.0, 2)?,
    };
    let (omega_min, omega_max, n_omega, k_min, k_max, n_k) = match &cfg.grid {
        Some(_) => {
            let map = grid_map(cfg)?;
            (
                require_f64(&map, "omega_min")?,
                require_f64(&map, "omega_max")?,
                require_usize(&map, "n_omega")?,
                require_f64(&map, "k_min")?,
                require_f64(&map, "k_max")?,
                require_usize(&map, "n_k")?,
            )
        }
        // axis ranges fixed by this tool (the original plot does not state
        // them): omega in [-20, 20], k in (0, 6], linear gray scale
        None => (-20.0, 20.0, 120, 0.05, 6.0, 80),
    };
    let omegas = linear_grid(omega_min, omega_max, n_omega);
    let ks = linear_grid(k_min, k_max, n_k);
    let mut points = Vec::with_capacity(n_omega * n_k);
    for &omega in &omegas {
        for &k in &ks {
            points.push(FrequencyMomentumPoint::new(omega, k));
        }
    }
    let values = lindhard::sweep(&dist, &points);
    let mut table = Vec::with_capacity(points.len());
    let mut csv = String::from("omega,kmag,re_m\n");
    for (p, v) in points.iter().zip(values.iter()) {
        let re = match v {
            Ok(v) => v.re,
            Err(e) => return Err(e.clone()),
        };
        table.push(re);
        let _ = writeln!(csv, "{},{},{}", p.omega, p.kmag, re);
    }
    manifest.add_meta(
        "axes",
        format!("omega in [{omega_min}, {omega_max}] ({n_omega}), k in [{k_min}, {k_max}] ({n_k}); linear min-max gray scale"),
    );
    let pgm_path = cfg.out_dir.join("heatmap.pgm");
    let degenerate = render_heatmap(&table, n_k, n_omega, &pgm_path)?;
    if degenerate {
        manifest.add_meta("note", "constant field rendered mid-gray");
    }
    for name in ["heatmap.pgm", "heatmap.csv"] {
        let bytes = std::fs::read(cfg.out_dir.join(name))
            .map_err(|e| Error::Config(format!("cannot re-read {name}: {e}")))?;
        manifest
            .artifacts_mut()
            .push((name.to_string(), bytes.len(), fnv64(&bytes)));
    }
    write_artifact(&cfg.out_dir, "heatmap_labeled.csv", &csv, manifest)
}

/// Write a 2-D real table as an ASCII P2 graymap at `path` (linear min-max
/// scaling, constant tables render mid-gray) plus a sidecar CSV of the raw
/// values (`row,col,value`, one line per cell) next to it. Returns whether
/// the table was constant.
pub fn render_heatmap(
    table: &[f64],
    width: usize,
    height: usize,
    path: &Path,
) -> Result<bool> {
    if table.len() != width * height {
        return Err(Error::InvalidParameter(
            "heatmap table does not match the stated shape".into(),
        ));
    }
    if table.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "heatmap table must hold finite values".into(),
        ));
    }
    let (pgm, degenerate) = pgm_string(table, width, height);
    std::fs::write(path, pgm)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut csv = String::from("row,col,value\n");
    for r in 0..height {
        for c in 0..width {
            let _ = writeln!(csv, "{r},{c},{}", table[r * width + c]);
        }
    }
    let sidecar = path.with_extension("csv");
    std::fs::write(&sidecar, csv)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", sidecar.display())))?;
    Ok(degenerate)
}

/// Exit code for an error per the CLI contract: config 2, accuracy 3,
/// resolution 4.
pub fn exit_code(err: &Error) -> i32 {
    match err.category() {
        ErrorCategory::Parameter => 2,
        ErrorCategory::Accuracy => 3,
        ErrorCategory::Resolution => 4,
    }
}
