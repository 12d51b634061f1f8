use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use topoderiv::config::{default_eps, RunConfig};
use topoderiv::expansion::{expand, Assembler, Baseline, Route};
use topoderiv::json;
use topoderiv::kernels::{FarField, LogConstant};
use topoderiv::poly::exps_degree;
use topoderiv::selftest::{SelftestOptions, Suite};
use topoderiv::verify::{sweep, DirectCost};
use topoderiv::{Error, Result};

#[derive(Parser)]
#[command(name = "topoderiv", version, about = "Higher-order topological derivatives of tracking costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (stdout when omitted, where applicable)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Nodes per axis, overriding the config
    #[arg(long)]
    grid: Option<usize>,
    /// Expansion length N, overriding the config
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    General,
    ConstantF,
    Symmetric,
    Ball,
}

#[derive(Subcommand)]
enum Command {
    /// Moment table of the inclusion shape
    Moments(Common),
    /// Multipole terms and logarithmic constants at probe points
    Kernels(Common),
    /// Baseline state, adjoint and correctors as field dumps
    Solve(Common),
    /// Expansion ledger
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "general")]
        route: RouteArg,
    },
    /// ε-sweep against direct perturbed solves
    Verify(Common),
    /// The acceptance suite
    Selftest {
        /// Output directory for the JSON report
        #[arg(long)]
        out: Option<PathBuf>,
        /// Finest 2D grid (nodes per axis)
        #[arg(long, default_value_t = 513)]
        grid: usize,
        /// Finest 3D grid (nodes per axis)
        #[arg(long, default_value_t = 129)]
        grid3: usize,
    },
}

fn load(c: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(n) = c.grid {
        cfg.domain.nodes = n;
    }
    if let Some(k) = c.order {
        cfg.order = k;
    }
    Ok(cfg)
}

fn emit(out: &Option<PathBuf>, name: &str, v: &Value) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            json::write_file(&dir.join(name), v)?;
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // a closed pipe (e.g. `| head`) is not an error
            match writeln!(out, "{}", json::to_string(v)) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn moments(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let p = cfg.build()?;
    let table = p.moments()?;
    let rows: Vec<Value> = table
        .iter()
        .map(|(e, v)| json!({"exponents": &e[..p.dim.n()], "degree": exps_degree(e), "value": v}))
        .collect();
    emit(&c.out, "moments.json", &json!({"dim": p.dim.n(), "n_max": table.n_max, "measure": table.measure(), "moments": rows}))
}

/// Probe points at distance 2, 4 and 8 along three fixed directions.
fn probes(d: usize) -> Vec<Vec<f64>> {
    let dirs: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.6, 0.8, 0.0], [-0.48, 0.64, 0.6]];
    let mut out = Vec::new();
    for r in [2.0, 4.0, 8.0] {
        for dir in &dirs {
            let n: f64 = dir[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            out.push(dir[..d].iter().map(|v| r * v / n).collect());
        }
    }
    out
}

fn kernels(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let p = cfg.build()?;
    let moments = p.moments()?;
    let jet = p.jet();
    let ff = FarField::new(&moments, &jet, p.alpha1);
    let pts = probes(p.dim.n());
    let kmax = p.order.clamp(2, 5);
    let mut terms = Vec::new();
    let mut push = |t: topoderiv::kernels::MultipoleTerm| {
        let values: Vec<f64> = pts.iter().map(|x| t.eval(x)).collect();
        terms.push(json!({"name": t.name(), "k": t.k, "degree": t.degree(), "has_log": t.has_log(), "values": values}));
    };
    for k in 2..=kmax {
        for l in 1..=(k + 1).min(topoderiv::kernels::MAX_TAYLOR_ORDER + 1) {
            push(ff.r(k, l)?);
        }
        if p.alpha1 > 0.0 {
            for l in 1..=(k + 1).min(topoderiv::kernels::MAX_TAYLOR_ORDER - 2) {
                push(ff.s(k, l)?);
            }
            for t in ff.leading_ab(k)? {
                push(t);
            }
        }
    }
    let constants: Vec<Value> = (2..=kmax).map(|k| Ok(to_value(&LogConstant::new(k, ff.b(k)?, p.alpha2)))).collect::<Result<_>>()?;
    emit(&c.out, "kernels.json", &json!({"dim": p.dim.n(), "probes": pts, "terms": terms, "constants": constants}))
}

fn solve(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let p = cfg.build()?;
    let base = Baseline::solve(&p)?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    base.u0.dump(&dir, "u0")?;
    base.p0.dump(&dir, "p0")?;
    let mut names = vec!["u0".to_string(), "p0".to_string()];
    for (id, f) in &base.correctors.fields {
        f.dump(&dir, &id.slug())?;
        names.push(id.slug());
    }
    let summary = json!({
        "h": p.grid.h_max(),
        "nodes": &p.grid.n[..p.dim.n()],
        "cost": to_value(&p.cost),
        "j0": p.cost_value(&base.u0),
        "fields": names,
    });
    json::write_file(&dir.join("solve.json"), &summary)?;
    println!("{}", json::to_string(&summary));
    Ok(())
}

fn expand_cmd(c: &Common, route: RouteArg) -> Result<()> {
    let cfg = load(c)?;
    let p = cfg.build()?;
    let route = match route {
        RouteArg::General => Route::General,
        RouteArg::ConstantF => Route::ConstantF,
        RouteArg::Symmetric => Route::Symmetric,
        RouteArg::Ball => Route::Ball,
    };
    let base = Baseline::solve(&p)?;
    let ledger = Assembler::new(&p, &base, route)?.ledger(p.order)?;
    emit(&c.out, "ledger.json", &to_value(&ledger))
}

fn verify(c: &Common) -> Result<()> {
    let cfg = load(c)?;
    let p = cfg.build()?;
    let (base, ledger) = expand(&p, Route::General)?;
    let eps = if p.eps.is_empty() {
        let side = (0..p.dim.n()).map(|a| p.grid.hi[a] - p.grid.lo[a]).fold(f64::INFINITY, f64::min);
        default_eps(side)
    } else {
        p.eps.clone()
    };
    let dc = DirectCost::new(&p, base.u0);
    let s = sweep(&p, &ledger, &dc, &eps)?;
    let summary = json!({
        "h": s.h,
        "eps": s.eps,
        "ledger": to_value(&ledger),
        "slopes": to_value(&s.slopes),
        "extraction": to_value(&s.extraction),
    });
    match &c.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            s.write_csv(&dir.join("sweep.csv"))?;
            json::write_file(&dir.join("sweep.json"), &summary)?;
        }
        None => println!("{}", json::to_string(&summary)),
    }
    Ok(())
}

fn selftest(out: &Option<PathBuf>, grid: usize, grid3: usize) -> Result<bool> {
    let suite = Suite::new(SelftestOptions { fine_2d: grid, fine_3d: grid3 });
    let mut reports = Vec::new();
    for id in 1..=10 {
        let r = suite.run(id);
        println!("{}", r.line());
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.passed);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        json::write_file(&dir.join("selftest.json"), &to_value(&reports))?;
    }
    Ok(ok)
}

/// Machine-readable record of a failure, printed to stderr.
fn error_record(e: &Error) -> Value {
    let violations = match e {
        Error::Validation(v) => to_value(v),
        _ => json!([]),
    };
    json!({"status": "error", "kind": e.kind(), "message": e.to_string(), "violations": violations})
}

fn write_error(out: Option<&Path>, rec: &Value) {
    eprintln!("{}", json::to_string(rec));
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = json::write_file(&dir.join("error.json"), rec);
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match &cli.command {
        Command::Moments(c) | Command::Kernels(c) | Command::Solve(c) | Command::Verify(c) => c.out.clone(),
        Command::Expand { common, .. } => common.out.clone(),
        Command::Selftest { out, .. } => out.clone(),
    };
    let result = match &cli.command {
        Command::Moments(c) => moments(c),
        Command::Kernels(c) => kernels(c),
        Command::Solve(c) => solve(c),
        Command::Expand { common, route } => expand_cmd(common, *route),
        Command::Verify(c) => verify(c),
        Command::Selftest { out, grid, grid3 } => match selftest(out, *grid, *grid3) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            write_error(out.as_deref(), &error_record(&e));
            match e {
                Error::Validation(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
