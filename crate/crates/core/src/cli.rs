//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::sliding::sliding_integral;
use crate::analysis::spectral::doubling_cutoffs;
use crate::analysis::{ac_diagnostic, concavity_check};
use crate::construct::family::{DEFAULT_SEED, SCREEN_CUTOFF_COUNT, SCREEN_CUTOFF_START};
use crate::construct::{
    family_test_sets, magnify_test_set, translate_test_set, union_test_set, FamilyConfig,
    FamilyMode, MagnifyConfig,
};
use crate::dyadic::{parse_dyadic, Dyadic, DEFAULT_SNAP_EXP};
use crate::error::{Error, Result};
use crate::interval::{IntervalSet, Window};
use crate::profile::Profile;
use crate::random::{sample, GridSet, Level, RandomLevels};
use crate::shapes::{Direction, Pose, Shape};
use crate::verify::{
    injectivity_report, interval_counterexample, monotonicity_report, monotonicity_report_exact,
    translation_values, Axis, FamilyGrid, FamilyKind, Status, TestSet,
};

/// Directory used for relative output paths.
pub const OUT_DIR_ENV: &str = "RECON_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "recon",
    version,
    about = "Test sets that reconstruct translates and magnified copies from measures"
)]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Also write CSV files for plotting next to the output.
    #[arg(long, global = true)]
    pub emit_plot_data: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a test set.
    #[command(subcommand)]
    Construct(Construct),
    /// Section profile of a shape along a direction, with diagnostics.
    Radon(RadonArgs),
    /// Random grid sets.
    #[command(subcommand)]
    Random(RandomCmd),
    /// Check a test set against a family.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Search for reconstruction failures.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Summarize a JSON artifact.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProfileSource {
    /// `tent`, `indicator`, or a CSV file of `breakpoint,value` rows.
    #[arg(long, conflicts_with = "shape")]
    pub profile: Option<String>,
    /// Shape whose section profile is used (see `radon`).
    #[arg(long)]
    pub shape: Option<String>,
    /// Direction, as `x,y,…` or `angle:<radians>`.
    #[arg(long, default_value = "1,0")]
    pub direction: String,
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// Indicator test set for translates of a function.
    Translate {
        #[command(flatten)]
        source: ProfileSource,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        window: Vec<i64>,
        #[command(flatten)]
        out: Output,
    },
    /// Indicator test set for magnified translates of a function.
    Magnify {
        #[command(flatten)]
        source: ProfileSource,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        window: Vec<i64>,
        #[arg(long, default_value_t = 8.0)]
        a_max: f64,
        #[arg(long, default_value_t = 4.0)]
        b_max: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Single test set for translates of a finite union of intervals.
    IntervalUnion {
        /// Interval lengths (dyadic, e.g. `3/2` or `3/2^1`), repeatable or comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<String>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        window: Vec<String>,
        #[arg(long)]
        rho: String,
        #[command(flatten)]
        out: Output,
    },
    /// Slab family for a body in the plane or space.
    Family {
        #[arg(long)]
        shape: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Translate)]
        mode: ModeArg,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long, default_value_t = 2.0)]
        reach: f64,
        #[arg(long, default_value_t = 8.0)]
        a_max: f64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Translate,
    Magnify,
}

#[derive(Args, Debug)]
pub struct RadonArgs {
    #[arg(long)]
    pub shape: String,
    #[arg(long, default_value = "1,0")]
    pub direction: String,
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// Power used by the spectral diagnostic.
    #[arg(long, default_value_t = 2.0)]
    pub power: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Subcommand, Debug)]
pub enum RandomCmd {
    /// Sample a multi-level random grid set.
    Sample {
        /// Levels as `n:g:p`, comma separated, coarsest first.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<String>,
        /// Integer box `lo hi` (repeated per coordinate).
        #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, required = true)]
        bounds: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Binary grid set file; a JSON summary goes to stdout.
        #[arg(short, long, required = true)]
        output: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    /// Strict increase of the measure along a translation grid.
    Monotonicity {
        /// Test set file (JSON artifact or `.gset`).
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        shape: String,
        /// `lo hi step` of the translation parameter.
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEP"], allow_hyphen_values = true)]
        grid: Vec<String>,
        /// Magnification for slab tests.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Distinct measure vectors over a finite family.
    Injectivity {
        /// Test set files, repeatable; a family file contributes all its slabs.
        #[arg(long = "test", required = true)]
        tests: Vec<PathBuf>,
        /// Body to translate; omit for the interval family `[x, x+L]`.
        #[arg(long)]
        shape: Option<String>,
        /// `lo hi step` for each translation coordinate (or for `x`).
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEP"], allow_hyphen_values = true)]
        grid: Vec<String>,
        /// `lo hi step` for the interval length (interval family only).
        #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEP"])]
        lengths: Vec<String>,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
pub enum SearchCmd {
    /// Two intervals that two given sets cannot distinguish.
    TwoSetCounterexample {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        min_length: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Search window; defaults to the hull of both sets padded by `min_length + 2`.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        window: Vec<i64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    pub input: PathBuf,
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match execute(&cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[derive(Default)]
struct Snaps(Vec<Value>);

impl Snaps {
    fn dyadic(&mut self, name: &str, text: &str) -> Result<Dyadic> {
        let p = parse_dyadic(text, DEFAULT_SNAP_EXP)?;
        if p.snap_error > 0.0 {
            eprintln!(
                "warning: {name} = {text} snapped to {} (error {:.3e})",
                p.value, p.snap_error
            );
            self.0
                .push(json!({"arg": name, "input": text, "value": p.value, "error": p.snap_error}));
        }
        Ok(p.value)
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_json(out: &Output, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &out.output {
        Some(p) => {
            let p = resolve(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => {
            use std::io::Write;
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

/// Writes `<output stem>.<suffix>` (or `<suffix>` in the output directory).
fn write_plot(out: &Output, suffix: &str, csv: &str) -> Result<()> {
    let path = match &out.output {
        Some(p) => {
            let p = resolve(p);
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            p.with_file_name(format!("{stem}.{suffix}"))
        }
        None => resolve(Path::new(suffix)),
    };
    std::fs::write(path, csv)?;
    Ok(())
}

fn window_of(v: &[i64]) -> Result<Window> {
    match v {
        [lo, hi] => Window::from_ints(*lo, *hi),
        _ => Err(Error::InvalidArgument("--window needs LO HI".into())),
    }
}

/// `disk`, `disk:R`, `square`, `triangle`, `ball:D:R`, `[a,b]u[c,d]…`, a JSON
/// shape, or `@file.json`.
pub fn parse_shape(text: &str) -> Result<Shape> {
    let t = text.trim();
    if let Some(path) = t.strip_prefix('@') {
        return Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?);
    }
    if t.starts_with('{') {
        return Ok(serde_json::from_str(t)?);
    }
    if t.starts_with('[') {
        let mut pairs = Vec::new();
        for part in t.split(['u', '∪']) {
            let inner = part
                .trim()
                .strip_prefix('[')
                .map(|s| s.trim_end_matches([']', ')']));
            let (a, b) = inner
                .and_then(|s| s.split_once(','))
                .ok_or_else(|| Error::Parse(format!("bad interval {part:?}")))?;
            pairs.push((a.trim().parse::<Dyadic>()?, b.trim().parse::<Dyadic>()?));
        }
        let shape = Shape::IntervalUnion {
            set: IntervalSet::normalize(pairs),
        };
        shape.validate()?;
        return Ok(shape);
    }
    let mut parts = t.split(':');
    let name = parts.next().unwrap_or_default();
    let nums: Vec<f64> = parts
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number in {t:?}")))
        })
        .collect::<Result<_>>()?;
    let shape = match (name, nums.as_slice()) {
        ("disk", []) => Shape::disk(1.0),
        ("disk", [r]) => Shape::disk(*r),
        ("square", []) => Shape::unit_square(),
        ("triangle", []) => Shape::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        },
        ("ball", [d, r]) => Shape::Ball {
            center: vec![0.0; *d as usize],
            radius: *r,
        },
        ("cube", [d]) => Shape::Box {
            lo: vec![0.0; *d as usize],
            hi: vec![1.0; *d as usize],
        },
        _ => return Err(Error::Parse(format!("unknown shape {t:?}"))),
    };
    shape.validate()?;
    Ok(shape)
}

pub fn parse_direction(text: &str, dim: usize) -> Result<Direction> {
    if let Some(a) = text.strip_prefix("angle:") {
        let phi: f64 = a
            .parse()
            .map_err(|_| Error::Parse(format!("bad angle {a:?}")))?;
        return Ok(Direction::planar(phi));
    }
    let v: Vec<f64> = text
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad direction {text:?}")))
        })
        .collect::<Result<_>>()?;
    let mut v = v;
    if v.len() < dim {
        v.resize(dim, 0.0);
    }
    Direction::normalized(v)
}

fn load_profile_csv(path: &str) -> Result<Profile> {
    let text = std::fs::read_to_string(path)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let Some((a, b)) = line.split_once(',') else {
            continue;
        };
        if let (Ok(x), Ok(y)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            xs.push(x);
            ys.push(y);
        }
    }
    Profile::new(xs, ys)
}

fn profile_of(src: &ProfileSource) -> Result<Profile> {
    match (&src.profile, &src.shape) {
        (Some(p), _) => match p.as_str() {
            "tent" => Ok(Profile::tent()),
            "indicator" => Profile::indicator(0.0, 1.0, 1.0),
            path => load_profile_csv(path),
        },
        (None, Some(s)) => {
            let shape = parse_shape(s)?;
            shape.radon_profile(
                &parse_direction(&src.direction, shape.dim())?,
                src.resolution,
            )
        }
        (None, None) => Err(Error::InvalidArgument("give --profile or --shape".into())),
    }
}

fn profile_json(p: &Profile) -> Value {
    json!({"breakpoints": p.breakpoints(), "values": p.values(), "approx_error": p.approx_error()})
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Test sets from an artifact: a grid set file, a family, a tagged test set,
/// an object with a `set` field, or a bare interval set.
pub fn load_tests(path: &Path) -> Result<Vec<TestSet>> {
    if path.extension().is_some_and(|e| e == "gset") {
        let f = std::fs::File::open(path)?;
        return Ok(vec![TestSet::Grid(GridSet::read_binary(
            std::io::BufReader::new(f),
        )?)]);
    }
    let v = read_json(path)?;
    if let Some(slabs) = v.get("slabs") {
        let slabs: Vec<crate::slab::SlabTestSet> = serde_json::from_value(slabs.clone())?;
        return Ok(slabs.into_iter().map(TestSet::Slab).collect());
    }
    if let Ok(t) = serde_json::from_value::<TestSet>(v.clone()) {
        return Ok(vec![t]);
    }
    let set = v.get("set").cloned().unwrap_or(v);
    Ok(vec![TestSet::Interval(serde_json::from_value(set)?)])
}

fn load_interval_set(path: &Path) -> Result<IntervalSet> {
    match load_tests(path)?.into_iter().next() {
        Some(TestSet::Interval(s)) => Ok(s),
        Some(TestSet::Grid(g)) => g.to_interval_set(),
        _ => Err(Error::InvalidArgument(format!(
            "{} does not hold a one-dimensional set",
            path.display()
        ))),
    }
}

fn axis_of(v: &[String], snaps: &mut Snaps, name: &str) -> Result<Axis> {
    match v {
        [lo, hi, step] => Axis::range(
            snaps.dyadic(&format!("{name}.lo"), lo)?,
            snaps.dyadic(&format!("{name}.hi"), hi)?,
            snaps.dyadic(&format!("{name}.step"), step)?,
        ),
        _ => Err(Error::InvalidArgument(format!("--{name} needs LO HI STEP"))),
    }
}

fn execute(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Construct(c) => construct(c, cli),
        Command::Radon(r) => radon(r, cli),
        Command::Random(RandomCmd::Sample {
            levels,
            bounds,
            dim,
            output,
        }) => random_sample(levels, bounds, *dim, output, cli.seed),
        Command::Verify(v) => verify(v, cli),
        Command::Search(SearchCmd::TwoSetCounterexample {
            a,
            b,
            min_length,
            tol,
            window,
            out,
        }) => {
            let (a, b) = (load_interval_set(a)?, load_interval_set(b)?);
            let window = if window.is_empty() {
                let hull = a
                    .union(&b)
                    .hull()
                    .map_or((0.0, 0.0), |(l, h)| (l.to_f64(), h.to_f64()));
                let pad = min_length + 2.0;
                Window::from_ints((hull.0 - pad).floor() as i64, (hull.1 + pad).ceil() as i64)?
            } else {
                window_of(window)?
            };
            let c = interval_counterexample(&a, &b, &window, *min_length, *tol)?;
            write_json(
                out,
                &json!({"kind": "two_set_counterexample", "window": window, "min_length": min_length, "tol": tol, "counterexample": c}),
            )?;
            Ok(Status::Pass)
        }
        Command::Report(r) => report(&r.input),
    }
}

fn construct(c: &Construct, cli: &Cli) -> Result<Status> {
    match c {
        Construct::Translate {
            source,
            window,
            out,
        } => {
            let p = profile_of(source)?;
            let w = window_of(window)?;
            let t = translate_test_set(&p, &w)?;
            if !t.certificate.absolutely_continuous {
                eprintln!(
                    "warning: profile has jumps; the slope bound in the certificate does not apply"
                );
            }
            write_json(
                out,
                &json!({"kind": "translate", "window": w, "set": t.set, "certificate": t.certificate}),
            )?;
            if cli.emit_plot_data {
                write_plot(out, "profile.csv", &p.to_csv())?;
            }
            Ok(Status::Pass)
        }
        Construct::Magnify {
            source,
            window,
            a_max,
            b_max,
            out,
        } => {
            let p = profile_of(source)?;
            let w = window_of(window)?;
            let cfg = MagnifyConfig {
                a_max: *a_max,
                b_max: *b_max,
                ..MagnifyConfig::default()
            };
            let t = magnify_test_set(&p, &w, &cfg)?;
            write_json(
                out,
                &json!({"kind": "magnify", "window": w, "set": t.set, "certificate": t.certificate}),
            )?;
            if cli.emit_plot_data {
                write_plot(out, "profile.csv", &p.to_csv())?;
            }
            Ok(Status::Pass)
        }
        Construct::IntervalUnion {
            lengths,
            window,
            rho,
            out,
        } => {
            let mut snaps = Snaps::default();
            let lengths: Vec<Dyadic> = lengths
                .iter()
                .enumerate()
                .map(|(i, l)| snaps.dyadic(&format!("lengths[{i}]"), l))
                .collect::<Result<_>>()?;
            let w = match window.as_slice() {
                [lo, hi] => Window::new(
                    snaps.dyadic("window.lo", lo)?,
                    snaps.dyadic("window.hi", hi)?,
                )?,
                _ => return Err(Error::InvalidArgument("--window needs LO HI".into())),
            };
            let rho = snaps.dyadic("rho", rho)?;
            let t = union_test_set(&lengths, &w, rho)?;
            write_json(
                out,
                &json!({
                    "kind": "interval_union",
                    "window": w,
                    "lengths": lengths,
                    "rho": rho,
                    "set": t.set,
                    "semigroup": t.semigroup,
                    "avoidance": t.avoidance,
                    "snapped": snaps.0,
                }),
            )?;
            Ok(Status::Pass)
        }
        Construct::Family {
            shape,
            mode,
            resolution,
            reach,
            a_max,
            out,
        } => {
            let e = parse_shape(shape)?;
            let mode = match mode {
                ModeArg::Translate => FamilyMode::Translate,
                ModeArg::Magnify => FamilyMode::Magnify,
            };
            let cfg = FamilyConfig {
                resolution: *resolution,
                reach: *reach,
                a_max: *a_max,
                seed: cli.seed,
            };
            let f = family_test_sets(&e, mode, &cfg)?;
            write_json(
                out,
                &json!({"kind": "family", "shape": e, "mode": mode, "config": cfg, "slabs": f.slabs, "certificates": f.certificates, "screened": f.screened}),
            )?;
            Ok(Status::Pass)
        }
    }
}

fn radon(r: &RadonArgs, cli: &Cli) -> Result<Status> {
    let e = parse_shape(&r.shape)?;
    let theta = parse_direction(&r.direction, e.dim())?;
    let p = e.radon_profile(&theta, r.resolution)?;
    let spectral = ac_diagnostic(
        &p,
        r.power,
        &doubling_cutoffs(SCREEN_CUTOFF_START, SCREEN_CUTOFF_COUNT),
    );
    let concavity = (e.dim() >= 2).then(|| concavity_check(&p, e.dim()));
    write_json(
        &r.out,
        &json!({
            "kind": "radon",
            "shape": e,
            "direction": theta,
            "profile": profile_json(&p),
            "continuous": p.is_continuous(),
            "spectral": {"report": spectral, "plateaus": spectral.plateaus(), "grows": spectral.grows()},
            "concavity": concavity,
        }),
    )?;
    if cli.emit_plot_data {
        write_plot(&r.out, "profile.csv", &p.to_csv())?;
        write_plot(&r.out, "spectral.csv", &spectral.to_csv())?;
    }
    Ok(Status::Pass)
}

fn random_sample(
    levels: &[String],
    bounds: &[i64],
    dim: usize,
    output: &Path,
    seed: u64,
) -> Result<Status> {
    let parsed: Vec<Level> = levels
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(':').collect();
            let bad = || Error::Parse(format!("level {l:?} is not n:g:p"));
            match f.as_slice() {
                [n, g, p] => Ok(Level {
                    n: n.parse().map_err(|_| bad())?,
                    g: g.parse().map_err(|_| bad())?,
                    p: parse_dyadic(p, DEFAULT_SNAP_EXP)?.value.to_f64(),
                }),
                _ => Err(bad()),
            }
        })
        .collect::<Result<_>>()?;
    let (lo, hi): (Vec<i64>, Vec<i64>) = bounds.chunks(2).map(|c| (c[0], c[1])).unzip();
    let (lo, hi) = if lo.len() == 1 && dim > 1 {
        (vec![lo[0]; dim], vec![hi[0]; dim])
    } else {
        (lo, hi)
    };
    let lv = RandomLevels::new(dim, lo, hi, parsed)?;
    let g = sample(&lv, seed);
    let path = resolve(output);
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    g.write_binary(&mut f)?;
    let counts: Vec<usize> = g.selections.iter().map(|s| s.cubes.len()).collect();
    let measure = (dim == 1).then(|| g.measure());
    let summary = json!({
        "kind": "grid_set",
        "file": path,
        "seed": seed,
        "levels": lv,
        "cubes_per_level": counts,
        "measure": measure,
        "tail": lv.levels.iter().map(|l| l.p).sum::<f64>(),
    });
    {
        use std::io::Write;
        let _ = writeln!(
            std::io::stdout(),
            "{}",
            serde_json::to_string_pretty(&summary)?
        );
    }
    Ok(Status::Pass)
}

fn verify(v: &VerifyCmd, cli: &Cli) -> Result<Status> {
    match v {
        VerifyCmd::Monotonicity {
            test,
            shape,
            grid: g,
            scale,
            resolution,
            out,
        } => {
            let mut snaps = Snaps::default();
            let axis = axis_of(g, &mut snaps, "grid")?;
            let e = parse_shape(shape)?;
            let tests = load_tests(test)?;
            let t = tests
                .first()
                .ok_or_else(|| Error::InvalidArgument("empty test file".into()))?;
            let xs = axis.values();
            let (report, values) = match (t, &e) {
                (TestSet::Interval(_) | TestSet::Grid(_), Shape::IntervalUnion { set })
                    if *scale == 1.0 =>
                {
                    let ts = match t {
                        TestSet::Interval(s) => s.clone(),
                        TestSet::Grid(g) => g.to_interval_set()?,
                        _ => unreachable!(),
                    };
                    let vals = translation_values(set, &ts, &xs);
                    (
                        monotonicity_report_exact(&vals),
                        vals.iter().map(|v| v.to_f64()).collect::<Vec<_>>(),
                    )
                }
                (TestSet::Slab(s), _) => {
                    let m = crate::slab::SlabMeasurer::new(&e, s, *resolution)?;
                    let vals = xs
                        .iter()
                        .map(|x| {
                            let v: Vec<f64> =
                                s.theta.as_slice().iter().map(|c| c * x.to_f64()).collect();
                            m.measure(&Pose::new(v, *scale)?).map(|r| r.value)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (monotonicity_report(&vals), vals)
                }
                (TestSet::Interval(ts), _) if e.dim() == 1 => {
                    // general 1-D body through its profile
                    let p = e.radon_profile(&Direction::axis(1, 0), *resolution)?;
                    let (lo, hi) = ts
                        .hull()
                        .map_or((0.0, 0.0), |(l, h)| (l.to_f64(), h.to_f64()));
                    let w = Window::from_ints(lo.floor() as i64 - 1, hi.ceil() as i64 + 1)?;
                    let bs: Vec<f64> = xs.iter().map(|x| x.to_f64()).collect();
                    let vals = sliding_integral(&p, ts, &w, *scale, &bs)?;
                    (monotonicity_report(&vals), vals)
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "test set and shape do not fit together".into(),
                    ))
                }
            };
            let status = report.status();
            write_json(
                out,
                &json!({"kind": "monotonicity", "report": report, "points": xs.len(), "status": status, "snapped": snaps.0}),
            )?;
            if cli.emit_plot_data {
                let mut csv = String::from("b,value\n");
                for (x, v) in xs.iter().zip(&values) {
                    csv.push_str(&format!("{},{v}\n", x.to_f64()));
                }
                write_plot(out, "curve.csv", &csv)?;
            }
            Ok(status)
        }
        VerifyCmd::Injectivity {
            tests,
            shape,
            grid: g,
            lengths,
            resolution,
            out,
        } => {
            let mut snaps = Snaps::default();
            let mut all = Vec::new();
            for t in tests {
                all.extend(load_tests(t)?);
            }
            let family = match shape {
                None => {
                    let x = axis_of(g, &mut snaps, "grid")?;
                    let l = axis_of(lengths, &mut snaps, "lengths")?;
                    FamilyGrid::new(FamilyKind::Interval, vec![x, l])?
                }
                Some(s) => {
                    let e = parse_shape(s)?;
                    let axis = axis_of(g, &mut snaps, "grid")?;
                    let d = e.dim();
                    FamilyGrid::new(FamilyKind::Translate { shape: e }, vec![axis; d])?
                }
            };
            let mut report = injectivity_report(&family, &all, *resolution)?;
            report.seed = Some(cli.seed);
            eprintln!(
                "injectivity: {} instances, min separation {:.4e}, status {:?}",
                report.instances, report.scan.min_separation, report.status
            );
            write_json(
                out,
                &json!({"kind": "injectivity", "report": report, "snapped": snaps.0}),
            )?;
            if cli.emit_plot_data {
                let vs = crate::verify::grid_vectors(&family, &all, *resolution)?;
                let mut csv = String::from("index,params,values\n");
                for (i, v) in vs.iter().enumerate() {
                    let params: Vec<String> = family
                        .params(i)
                        .iter()
                        .map(|p| p.to_f64().to_string())
                        .collect();
                    let vals: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
                    csv.push_str(&format!("{i},{},{}\n", params.join(" "), vals.join(" ")));
                }
                write_plot(out, "vectors.csv", &csv)?;
            }
            Ok(report.status)
        }
    }
}

fn report(path: &Path) -> Result<Status> {
    let v = read_json(path)?;
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("unknown");
    println!("artifact: {} ({kind})", path.display());
    let status_of = |s: Option<&Value>| -> Status {
        match s.and_then(Value::as_str) {
            Some("violation") => Status::Violation,
            Some("indeterminate") => Status::Indeterminate,
            _ => Status::Pass,
        }
    };
    let status = match kind {
        "translate" | "magnify" | "interval_union" => {
            let set: IntervalSet = serde_json::from_value(v["set"].clone())?;
            println!("intervals: {}", set.len());
            println!("measure: {}", set.measure());
            if let Some(h) = set.hull() {
                println!("hull: [{}, {}]", h.0, h.1);
            }
            Status::Pass
        }
        "family" => {
            println!("slabs: {}", v["slabs"].as_array().map_or(0, Vec::len));
            println!(
                "screened directions: {}",
                v["screened"].as_array().map_or(0, Vec::len)
            );
            Status::Pass
        }
        "monotonicity" => {
            println!("min increment: {}", v["report"]["min_increment"]);
            println!(
                "violations: {}",
                v["report"]["violations"].as_array().map_or(0, Vec::len)
            );
            status_of(v.get("status"))
        }
        "injectivity" => {
            let r = &v["report"];
            println!("instances: {}", r["instances"]);
            println!("min separation: {}", r["min_separation"]);
            println!(
                "collisions: {}, indeterminate: {}",
                r["collisions"], r["indeterminate"]
            );
            status_of(r.get("status"))
        }
        "two_set_counterexample" => {
            let c = &v["counterexample"];
            println!("intervals: {} and {}", c["first"], c["second"]);
            println!("discrepancy: {}", c["discrepancy"]);
            Status::Pass
        }
        _ => {
            println!("{}", serde_json::to_string_pretty(&v)?);
            Status::Pass
        }
    };
    println!("status: {status:?}");
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse() {
        assert_eq!(parse_shape("disk").unwrap(), Shape::disk(1.0));
        let u = parse_shape("[0,1]u[2,7/2]").unwrap();
        let Shape::IntervalUnion { set } = u else {
            panic!()
        };
        assert_eq!(set.measure(), Dyadic::new(5, 1));
        assert!(parse_shape("blob").is_err());
        assert!(parse_shape("[0,x]").is_err());
    }

    #[test]
    fn directions_parse() {
        assert_eq!(parse_direction("1,0", 2).unwrap(), Direction::axis(2, 0));
        let d = parse_direction("3,4", 2).unwrap();
        assert!((d.as_slice()[0] - 0.6).abs() < 1e-15);
        assert!(parse_direction("0,0", 2).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["recon", "construct", "nope"]), 1);
        assert_eq!(run(["recon", "--help"]), 0);
    }
}
