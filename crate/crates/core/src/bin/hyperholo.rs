use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperholo::geometry::{Domain4, Resolution};
use hyperholo::runner::{list_checks, run, Check, ExperimentConfig, MapSpec, RunOptions};
use hyperholo::Quaternion;

#[derive(Parser)]
#[command(name = "hyperholo", version, about = "Numerical checks for perturbed Fueter operators")]
struct Cli {
    /// Print the registered check names and exit.
    #[arg(long)]
    list_checks: bool,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every check listed in a JSON config.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        parallel: bool,
    },
    /// One integral or covariance check from flags.
    Verify {
        which: VerifyKind,
        #[command(flatten)]
        common: Common,
    },
    /// One Bergman-space check from flags.
    Bergman {
        which: BergmanKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Stokes,
    CauchyTheorem,
    CauchyFormula,
    Covariance,
}

#[derive(Clone, Copy, ValueEnum)]
enum BergmanKind {
    Kernel,
    Project,
    Relations,
}

#[derive(clap::Args)]
struct Common {
    /// `ball:c0,c1,c2,c3,R` or `box:lo0,..,lo3,hi0,..,hi3`.
    #[arg(long, default_value = "ball:0,0,0,0,1")]
    domain: String,
    #[arg(long, default_value = "0,0,0,0")]
    q: String,
    #[arg(long, default_value = "0,0,0,0")]
    r: String,
    /// Sixteen numbers: the components of a, b, c and d.
    #[arg(long)]
    map: Option<String>,
    /// Angular subdivisions; radial and box counts follow.
    #[arg(long, default_value_t = 24)]
    resolution: usize,
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} numbers, got {}", v.len()));
    }
    Ok(v)
}

fn quat(s: &str) -> Result<Quaternion, String> {
    let v = numbers(s, 4)?;
    Ok(Quaternion::new(v[0], v[1], v[2], v[3]))
}

fn domain(s: &str) -> Result<Domain4, String> {
    let (kind, rest) = s.split_once(':').ok_or("domain needs a `ball:` or `box:` prefix")?;
    let d = match kind {
        "ball" => {
            let v = numbers(rest, 5)?;
            Domain4::ball(Quaternion::new(v[0], v[1], v[2], v[3]), v[4])
        }
        "box" => {
            let v = numbers(rest, 8)?;
            Domain4::cuboid([v[0], v[1], v[2], v[3]], [v[4], v[5], v[6], v[7]])
        }
        _ => return Err(format!("unknown domain kind {kind:?}")),
    };
    d.map_err(|e| e.to_string())
}

fn config(check: Check, c: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::with_checks(&[check]);
    cfg.domain = domain(&c.domain)?;
    cfg.q = quat(&c.q)?;
    cfg.r = quat(&c.r)?;
    if let Some(m) = &c.map {
        let v = numbers(m, 16)?;
        let q = |i: usize| Quaternion::new(v[4 * i], v[4 * i + 1], v[4 * i + 2], v[4 * i + 3]);
        cfg.map = MapSpec { a: q(0), b: q(1), c: q(2), d: q(3) };
    }
    let n = c.resolution.max(4);
    cfg.resolution = Resolution {
        sphere: [n, n, 2 * n],
        radial: n,
        box_per_axis: n.div_ceil(2),
    };
    cfg.formula_resolution = cfg.resolution;
    cfg.points = c.points;
    cfg.samples = c.samples;
    cfg.seed = c.seed;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn single(check: Check, c: &Common) -> Result<bool, String> {
    let cfg = config(check, c)?;
    let rep = hyperholo::runner::run_check(&cfg, check).map_err(|e| e.to_string())?;
    let json = rep.to_json().map_err(|e| e.to_string())?;
    match &c.out {
        Some(p) => std::fs::write(p, json + "\n").map_err(|e| e.to_string())?,
        None => println!("{json}"),
    }
    eprintln!("{}: {} (max residual {:.3e})", rep.name, if rep.pass { "PASS" } else { "FAIL" }, rep.max_residual());
    Ok(rep.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_checks {
        print!("{}", list_checks());
        return ExitCode::SUCCESS;
    }
    let result = match cli.cmd {
        None => Err("no subcommand given; try --help".to_string()),
        Some(Cmd::Run { config, out, csv, parallel }) => ExperimentConfig::from_path(&config)
            .and_then(|cfg| run(&cfg, &RunOptions { out_dir: Some(out), csv, parallel }))
            .map(|s| {
                print!("{}", s.table());
                s.all_pass()
            })
            .map_err(|e| e.to_string()),
        Some(Cmd::Verify { which, common }) => single(
            match which {
                VerifyKind::Stokes => Check::Stokes,
                VerifyKind::CauchyTheorem => Check::CauchyTheorem,
                VerifyKind::CauchyFormula => Check::CauchyFormula,
                VerifyKind::Covariance => Check::Covariance,
            },
            &common,
        ),
        Some(Cmd::Bergman { which, common }) => single(
            match which {
                BergmanKind::Kernel => Check::BergmanKernel,
                BergmanKind::Project => Check::BergmanProject,
                BergmanKind::Relations => Check::BergmanRelations,
            },
            &common,
        ),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
