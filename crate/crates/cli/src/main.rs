use gasresponse::{exit_code, run, Command, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
gasresponse <command> [flags]

commands:
  lindhard-eval       sweep m_f over an (omega, k) grid -> sweep.csv
  stability-check     margin scan + theorem conditions -> report.txt, margin_scan.csv
  epsilon-g           negative-part amplitude of Re m_f -> report.txt
  simulate-linear     linearized density response on a space-time box -> response.csv
  simulate-lattice    truncated-lattice Hartree evolution -> trajectory.csv
  second-order-check  K2 norm comparisons and det-HLS ratios -> second_order.csv, det_hls.csv
  figure1             Re m_f heatmap (fermionic gas, T=100, mu=1) -> heatmap.pgm/.csv

flags:
  --dist <path>   distribution config (key=value)
  --pot <path>    interaction potential config (key=value)
  --q0 <path>     perturbation config (orbital=cx,cy,sigma,px,py,weight lines)
  --grid <spec>   inline grid spec, comma-separated key=value
  --out <dir>     output directory (default ./out)
  --seed <n>      seed for sampled checks (default 1)
  --tol <x>       tolerance override where applicable

environment:
  GASRESPONSE_THREADS   caps the rayon worker count
";

fn parse_args(args: &[String]) -> Result<RunConfig, String> {
    if args.is_empty() {
        return Err("missing command".into());
    }
    if args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        return Err(String::new());
    }
    let command = Command::parse(&args[0]).ok_or(format!("unknown command '{}'", args[0]))?;
    let mut cfg = RunConfig {
        command,
        dist_config: None,
        pot_config: None,
        q0_config: None,
        grid: None,
        out_dir: PathBuf::from("out"),
        seed: 1,
        tol: None,
    };
    let mut i = 1;
    while i < args.len() {
        let flag = &args[i];
        let value = args
            .get(i + 1)
            .ok_or(format!("flag {flag} needs a value"))?;
        match flag.as_str() {
            "--dist" => cfg.dist_config = Some(PathBuf::from(value)),
            "--pot" => cfg.pot_config = Some(PathBuf::from(value)),
            "--q0" => cfg.q0_config = Some(PathBuf::from(value)),
            "--grid" => cfg.grid = Some(value.clone()),
            "--out" => cfg.out_dir = PathBuf::from(value),
            "--seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| format!("--seed: bad integer '{value}'"))?
            }
            "--tol" => {
                cfg.tol = Some(
                    value
                        .parse()
                        .map_err(|_| format!("--tol: bad number '{value}'"))?,
                )
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
        i += 2;
    }
    Ok(cfg)
}

fn init_thread_cap() {
    if let Ok(v) = std::env::var("GASRESPONSE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    init_thread_cap();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = match parse_args(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(manifest) => {
            print!("{}", manifest.render());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
