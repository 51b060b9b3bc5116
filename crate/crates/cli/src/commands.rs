use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relaxsim::config::RunConfig;
use relaxsim::diagnostics::{compare as compare_series, ErrorReport};
use relaxsim::limits::{LimitRunner, LimitSolver};
use relaxsim::models::ModelSpec;
use relaxsim::presets::{preset as find_preset, presets};
use relaxsim::scheme::ApScheme;
use relaxsim::series::{write_entropy_csv, write_steps_csv, SnapshotSeries};
use relaxsim::system::validate_descriptor;
use relaxsim::{Error, RelaxationSystem};

use crate::{CompareArgs, PresetArgs, RunArgs};

const DEFAULT_OUTPUT: &str = "relaxsim-out";

/// Limit solves use this fraction of the explicit diffusion bound.
const REFERENCE_CFL: f64 = 0.9;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Run(Error::Config(_)) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Config file first, then flags on top, then validation.
pub fn load_config(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("config: cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(name) = &args.model {
        if name != cfg.model.name() {
            cfg.model = ModelSpec::from_name(name)?;
            cfg.initial = None;
        }
    }
    macro_rules! set {
        ($($field:ident),*) => {$(if let Some(v) = args.$field.clone() { cfg.$field = v; })*};
    }
    set!(epsilon, cells, dx, x0, cfl, safety, t_final, snapshot_times, seed, diagnostics_every);
    if let Some(b) = &args.boundary {
        cfg.boundary = b.parse()?;
    }
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    cfg.uniform_speed |= args.uniform_speed;
    cfg.validate()?;
    Ok(cfg)
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_scheme(cfg: &RunConfig, sys: &dyn RelaxationSystem) -> Result<SnapshotSeries> {
    let grid = cfg.grid()?;
    let init = cfg.initial_data().cells(sys, &grid)?;
    let scheme = ApScheme::new(sys, grid, cfg.epsilon, cfg.scheme_options())?;
    Ok(scheme.run(init, &cfg.run_control())?)
}

fn run_reference(cfg: &RunConfig, sys: &dyn RelaxationSystem, refine: usize) -> Result<SnapshotSeries> {
    if refine == 0 {
        return Err(CliError::Usage("refine: must be at least 1".into()));
    }
    let grid = cfg.grid()?.refine(refine);
    let init = cfg.initial_data().cells(sys, &grid)?;
    let reduced = init.iter().map(|c| sys.reduce(c)).collect();
    let runner = LimitRunner::new(sys, grid, LimitSolver::Reference, REFERENCE_CFL)?;
    let mut series = runner.run(reduced, &cfg.run_control())?;
    series.meta.insert("epsilon".into(), "0".into());
    Ok(series)
}

/// Writes snapshots, steps and, when the model has an entropy, the entropy
/// trace. Returns the snapshot path.
fn write_run(dir: &Path, stem: &str, series: &SnapshotSeries) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.csv"));
    let mut out = create(&path)?;
    series.write_csv(&mut out)?;
    out.flush()?;
    if !series.steps.is_empty() {
        let mut out = create(&dir.join(format!("{stem}_steps.csv")))?;
        write_steps_csv(&series.steps, &mut out)?;
        out.flush()?;
    }
    let trace = series.entropy_trace();
    if !trace.is_empty() {
        let mut out = create(&dir.join(format!("{stem}_entropy.csv")))?;
        write_entropy_csv(&trace, &mut out)?;
        out.flush()?;
    }
    Ok(path)
}

pub fn run(args: &RunArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let sys = cfg.model.build()?;
    let series = run_scheme(&cfg, sys.as_ref())?;
    let path = write_run(&output_dir(&cfg)?, "snapshots", &series)?;
    let steps = series.steps.last().map_or(0, |s| s.step);
    println!("{}: {steps} steps to t = {}, wrote {}", sys.name(), cfg.t_final, path.display());
    Ok(())
}

pub fn reference(args: &RunArgs, refine: usize) -> Result<()> {
    let cfg = load_config(args)?;
    let sys = cfg.model.build()?;
    let series = run_reference(&cfg, sys.as_ref(), refine)?;
    let path = write_run(&output_dir(&cfg)?, "reference", &series)?;
    println!("{}: limit equation on {} cells, wrote {}", sys.name(), series.grid.cells, path.display());
    Ok(())
}

fn read_series(path: &Path) -> Result<SnapshotSeries> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(SnapshotSeries::read_csv(BufReader::new(file))?)
}

/// Projects state series onto equilibrium variables with the model's `Q`.
fn reduced(series: SnapshotSeries) -> Result<SnapshotSeries> {
    let sys = ModelSpec::from_name(&series.model)?.build()?;
    Ok(series.reduced(sys.as_ref()))
}

fn print_reports(reports: &[ErrorReport], norms: &[String]) -> Result<()> {
    const ALL: [&str; 4] = ["l1", "l2", "linf", "rel-l1"];
    let chosen: Vec<&str> = if norms.is_empty() { ALL.to_vec() } else { norms.iter().map(String::as_str).collect() };
    if let Some(bad) = chosen.iter().find(|n| !ALL.contains(n)) {
        return Err(CliError::Usage(format!("norm: unknown norm '{bad}' (expected l1, l2, linf or rel-l1)")));
    }
    for r in reports {
        println!("t = {} ({} cells, dx = {})", r.time, r.cells, r.dx);
        for c in &r.components {
            let cols: Vec<String> = chosen
                .iter()
                .map(|n| {
                    let v = match *n {
                        "l1" => c.l1,
                        "l2" => c.l2,
                        "linf" => c.linf,
                        _ => c.relative_l1,
                    };
                    format!("{n}={v:.6e}")
                })
                .collect();
            println!("  {:<8} {}", c.name, cols.join(" "));
        }
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let a = reduced(read_series(&args.first)?)?;
    let b = reduced(read_series(&args.second)?)?;
    let reports = compare_series(&a, &b)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("reports serialize"));
        Ok(())
    } else {
        print_reports(&reports, &args.norm)
    }
}

pub fn preset(args: &PresetArgs) -> Result<()> {
    if args.list {
        for p in presets() {
            println!("{:<22} {}", p.name, p.description);
        }
        return Ok(());
    }
    let name = args.name.as_deref().ok_or_else(|| CliError::Usage("preset: name required (or --list)".into()))?;
    let p = find_preset(name)?;
    let mut cfg = p.config.clone();
    if let Some(t) = args.t_final {
        cfg.t_final = t;
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    cfg.output = Some(args.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT).join(p.name)));
    cfg.validate()?;
    let sys = cfg.model.build()?;
    // The two legs share nothing mutable.
    let (ap, reference) = std::thread::scope(|s| {
        let leg = s.spawn(|| run_reference(&cfg, sys.as_ref(), p.reference_refinement));
        (run_scheme(&cfg, sys.as_ref()), leg.join().expect("reference thread panicked"))
    });
    let (ap, reference) = (ap?, reference?);
    let dir = output_dir(&cfg)?;
    write_run(&dir, "scheme", &ap)?;
    write_run(&dir, "reference", &reference)?;
    let reports = compare_series(&ap.reduced(sys.as_ref()), &reference)?;
    let mut out = create(&dir.join("compare.json"))?;
    serde_json::to_writer_pretty(&mut out, &reports).expect("reports serialize");
    out.flush()?;
    println!("{}: {} cells, ε = {}, t = {}; reference on {} cells", p.name, cfg.cells, cfg.epsilon, cfg.t_final, reference.grid.cells);
    let trace = ap.entropy_trace();
    if let (Some(first), Some(last)) = (trace.values.first(), trace.values.last()) {
        println!("entropy {first:.10} -> {last:.10}");
    }
    print_reports(&reports[reports.len() - 1..], &[])?;
    println!("outputs in {}", dir.display());
    Ok(())
}

pub fn validate(args: &RunArgs, samples: usize) -> Result<()> {
    let cfg = load_config(args)?;
    let sys = cfg.model.build()?;
    cfg.initial_data().cells(sys.as_ref(), &cfg.grid()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let reduced: Vec<_> = (0..samples).map(|_| sys.sample_reduced(&mut rng)).collect();
    let states: Vec<_> = (0..samples).map(|_| sys.sample_state(&mut rng)).collect();
    let report = validate_descriptor(sys.as_ref(), &reduced, &states);
    println!(
        "{}: |QR| {:.2e}, |QE(u) - u| {:.2e}, |R(E)| {:.2e}, |QF(E)| {:.2e}, Q full rank: {}",
        sys.name(),
        report.q_relax,
        report.q_equilibrium,
        report.relax_equilibrium,
        report.q_flux_equilibrium,
        report.full_rank
    );
    if report.passes() {
        println!("configuration and model structure OK");
        Ok(())
    } else {
        Err(CliError::Run(Error::Domain(format!("structural check failed: {report:?}"))))
    }
}
