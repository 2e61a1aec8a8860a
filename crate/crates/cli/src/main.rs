use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use eprop::examples::circle::{ex1_kernel, hat_field};
use eprop::examples::svc::{svc_build, Ex2Kernel, SvcClassification, SvcTree};
use eprop::examples::translation::remark1_gap;
use eprop::fm::fm_distance;
use eprop::kernel::{iterate_p, TransitionKernel};
use eprop::lipapprox::{build, circle_grid};
use eprop::measure::MeasureFile;
use eprop::probe::{
    basin_probe, dyadic_approach, dyadic_witness_exact, equicontinuity_modulus, halving_approach, origin,
    stability_trace, svc_witness, truncation_approach,
};
use eprop::rational::{fmt_rational, fmt_real, parse_rational, pow2, to_f64};
use eprop::{DiscreteMeasure, MetricSpace, Rational, ScalarField, SpaceKind, UnitRational};

/// Largest depth whose full interval list `svc` will emit.
const MAX_EMIT_DEPTH: u32 = 16;

#[derive(Parser)]
#[command(
    name = "eprop",
    version,
    about = "Markov operator laboratory: exact iterates, Fortet-Mourier distances, e-property probes"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomly generated approach points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Example {
    Ex1,
    Ex2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Field {
    Hat,
    Coord,
    Zero,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Approach {
    Dyadic,
    Halving,
    Truncation,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Circle,
    Ex2,
    Real,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    Sin,
    Cos,
    Hat,
}

#[derive(Subcommand)]
enum Command {
    /// Fortet-Mourier distance between two measure files.
    Fm {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        /// Also print an optimal test function on the joint support.
        #[arg(long)]
        witness: bool,
    },
    /// P^n δ_x for a built-in kernel.
    Iterate {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        steps: usize,
        /// SVC depth for ex2.
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Truncated equicontinuity modulus of the dual iterates at z.
    Eprobe {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, value_enum, default_value_t = Field::Hat)]
        f: Field,
        #[arg(long, value_enum, default_value_t = Approach::Dyadic)]
        approach: Approach,
        #[arg(long, default_value_t = 8)]
        mmax: u32,
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Truncation lengths are kstep, 2·kstep, …
        #[arg(long, default_value_t = 1)]
        kstep: u32,
        /// One CSV row per (m, n) instead of the per-m summary.
        #[arg(long)]
        detail: bool,
        /// Print the closed-form witness instead of the modulus.
        #[arg(long)]
        witness: bool,
    },
    /// FM distance from P^n δ_x to δ_0 for n = 0..=nmax.
    Stability {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Checks |U^n f(x) − f(0)| ≤ ε over a ball grid and nlo ≤ n ≤ nmax.
    Basin {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Field::Hat)]
        f: Field,
        #[arg(long, default_value_t = 20)]
        nlo: usize,
        #[arg(long, default_value_t = 64)]
        nmax: usize,
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Kept and removed SVC intervals up to the given depth.
    Svc {
        #[arg(long)]
        depth: u32,
    },
    /// T(x) on [-2,-1] with its classification.
    TEval {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 10)]
        depth: u32,
    },
    /// Lipschitz approximation of a function on the circle from a finite cover.
    Lipapprox {
        #[arg(long, value_enum, default_value_t = Function::Sin)]
        function: Function,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
    },
    /// Gap |f_z(z+m+1/(m+2)) − f_z(z+m)| of the translation bumps.
    Remark1 {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        z: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] eprop::Error),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use eprop::Error as E;
        match self {
            CliError::Core(E::Lp(_) | E::SupportBudgetExceeded { .. } | E::OracleSupportTooLarge(_)) => 1,
            CliError::Write(_) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn rational(field: &str, s: &str) -> CliResult<Rational> {
    Ok(parse_rational(field, s)?)
}

fn field(sel: Field) -> ScalarField {
    match sel {
        Field::Hat => hat_field(),
        Field::Coord => ScalarField::coordinate(),
        Field::Zero => ScalarField::constant(Rational::zero()),
    }
}

fn kernel(example: Example, depth: u32) -> CliResult<Box<dyn TransitionKernel>> {
    Ok(match example {
        Example::Ex1 => Box::new(ex1_kernel()),
        Example::Ex2 => Box::new(Ex2Kernel::new(svc_build(depth)?)),
    })
}

fn read_measure(path: &PathBuf) -> CliResult<DiscreteMeasure> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.clone(),
        source,
    })?;
    Ok(MeasureFile::parse(&text)?)
}

fn measure_lines(mu: &DiscreteMeasure) -> String {
    mu.atoms()
        .map(|(x, w)| format!("delta at {} with weight {}\n", fmt_rational(x), fmt_rational(w)))
        .collect()
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn cmd_fm(g: &Global, space: Space, mu: &PathBuf, nu: &PathBuf, witness: bool) -> CliResult<String> {
    let metric = match space {
        Space::Circle => MetricSpace::Circle,
        Space::Ex2 => MetricSpace::IntervalUnion,
        Space::Real => MetricSpace::RealLine,
    };
    let (mu, nu) = (read_measure(mu)?, read_measure(nu)?);
    for m in [&mu, &nu] {
        if m.space() != metric.kind() {
            return Err(eprop::Error::SpaceMismatch {
                left: metric.kind(),
                right: m.space(),
            }
            .into());
        }
    }
    let sol = fm_distance(&mu, &nu, &metric)?;
    Ok(match g.emit {
        Emit::Json => {
            let mut v = json!({ "distance": fmt_real(sol.value) });
            if witness {
                v["witness"] = witness_json(&sol);
            }
            pretty(&v)
        }
        Emit::Csv => {
            let mut s = format!("{}\n", fmt_real(sol.value));
            if witness {
                s.push_str(&serde_json::to_string(&witness_json(&sol)).expect("serializable"));
                s.push('\n');
            }
            s
        }
    })
}

fn witness_json(sol: &eprop::fm::FmSolution) -> serde_json::Value {
    json!({
        "points": sol.points.iter().map(fmt_rational).collect::<Vec<_>>(),
        "values": sol.witness.iter().map(|v| fmt_real(*v)).collect::<Vec<_>>(),
    })
}

fn cmd_iterate(g: &Global, example: Example, x: &str, steps: usize, depth: u32) -> CliResult<String> {
    let k = kernel(example, depth)?;
    let x = rational("x", x)?;
    let delta = DiscreteMeasure::dirac(k.space(), x)?;
    let mu = iterate_p(k.as_ref(), &delta, steps)?;
    Ok(match g.emit {
        Emit::Json => pretty(&serde_json::to_value(MeasureFile::from_measure(&mu)).expect("serializable")),
        Emit::Csv => measure_lines(&mu),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_eprobe(
    g: &Global,
    example: Example,
    z: &str,
    f: Field,
    approach: Approach,
    mmax: u32,
    nmax: usize,
    depth: u32,
    kstep: u32,
    detail: bool,
    witness: bool,
) -> CliResult<String> {
    let k = kernel(example, depth)?;
    let space = k.space();
    let z = rational("z", z)?;
    space.check(&z)?;
    let f = field(f);

    if witness {
        return match example {
            Example::Ex1 => {
                let zu = UnitRational::new(z)?;
                let rows: Vec<(u32, Rational)> = (1..=mmax)
                    .map(|n| dyadic_witness_exact(&zu, &f, n).map(|v| (n, v)))
                    .collect::<eprop::Result<_>>()?;
                Ok(match g.emit {
                    Emit::Json => pretty(&json!({
                        "z": zu.to_string(),
                        "rows": rows.iter().map(|(n, v)| json!({
                            "n": n, "exact": fmt_rational(v), "witness": fmt_real(to_f64(v)),
                        })).collect::<Vec<_>>(),
                    })),
                    Emit::Csv => {
                        let mut s = String::from("n,exact,witness\n");
                        for (n, v) in rows {
                            s.push_str(&format!("{n},{},{}\n", fmt_rational(&v), fmt_real(to_f64(&v))));
                        }
                        s
                    }
                })
            }
            Example::Ex2 => {
                let tree = svc_build(depth)?;
                let w = svc_witness(&z, &tree, &f)?;
                let exact = w.exact.as_ref().map(fmt_rational).unwrap_or_default();
                Ok(match g.emit {
                    Emit::Json => pretty(&json!({
                        "z": fmt_rational(&z), "x": fmt_rational(&w.x), "level": w.level,
                        "t": fmt_rational(&w.t), "n0": w.n0, "witness": fmt_real(w.value), "exact": exact,
                    })),
                    Emit::Csv => format!(
                        "z,x,level,t,n0,witness,exact\n{},{},{},{},{},{},{}\n",
                        fmt_rational(&z),
                        fmt_rational(&w.x),
                        w.level,
                        fmt_rational(&w.t),
                        w.n0,
                        fmt_real(w.value),
                        exact
                    ),
                })
            }
        };
    }

    let points = match approach {
        Approach::Dyadic => {
            if example != Example::Ex1 {
                return Err(CliError::Usage("dyadic approach applies to ex1".into()));
            }
            dyadic_approach(&UnitRational::new(z.clone())?, mmax)?
        }
        Approach::Halving => halving_approach(&z, mmax, space),
        Approach::Truncation => {
            if example != Example::Ex1 {
                return Err(CliError::Usage("truncation approach applies to ex1".into()));
            }
            let ks: Vec<u32> = (1..=mmax).map(|m| m * kstep.max(1)).collect();
            truncation_approach(&UnitRational::new(z.clone())?, &ks)
        }
        Approach::Random => random_approach(&z, mmax, space, g.seed),
    };
    if points.is_empty() {
        return Err(CliError::Usage("no approach point lies in the space".into()));
    }
    let report = equicontinuity_modulus(k.as_ref(), &f, &z, &points, nmax)?;
    Ok(match (g.emit, detail) {
        (Emit::Json, _) => pretty(&report.summary_json()),
        (Emit::Csv, true) => report.to_csv(),
        (Emit::Csv, false) => report.summary_csv(),
    })
}

/// `x_m = z ± u_m 2^{-m}` with `u_m` uniform on a dyadic grid of `(0, 1]`.
fn random_approach(z: &Rational, count: u32, space: SpaceKind, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count)
        .map(|m| {
            let u = Rational::new(rng.gen_range(1..=1i64 << 20).into(), (1i64 << 20).into());
            let step = u * pow2(-(m as i64));
            let x = if rng.gen_bool(0.5) { z + step } else { z - step };
            match space {
                SpaceKind::Circle => &x - Rational::from_integer(x.floor().to_integer()),
                _ => x,
            }
        })
        .filter(|x| space.contains(x))
        .collect()
}

fn cmd_stability(g: &Global, example: Example, x: &str, nmax: usize, depth: u32) -> CliResult<String> {
    let k = kernel(example, depth)?;
    let x = rational("x", x)?;
    let mu = DiscreteMeasure::dirac(k.space(), x)?;
    let trace = stability_trace(k.as_ref(), &mu, &origin(k.space()), nmax)?;
    Ok(match g.emit {
        Emit::Json => pretty(&json!({
            "target": "0/1",
            "distances": trace.distances.iter().map(|d| fmt_real(*d)).collect::<Vec<_>>(),
        })),
        Emit::Csv => trace.to_csv(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_basin(
    g: &Global,
    example: Example,
    center: &str,
    radius: &str,
    grid: usize,
    epsilon: f64,
    f: Field,
    n_range: (usize, usize),
    depth: u32,
) -> CliResult<String> {
    let k = kernel(example, depth)?;
    let center = rational("center", center)?;
    let radius = rational("radius", radius)?;
    if radius.is_negative() {
        return Err(CliError::Usage("radius must be non-negative".into()));
    }
    if grid == 0 {
        return Err(CliError::Usage("grid must be at least 1".into()));
    }
    let f = field(f);
    let r = basin_probe(
        k.as_ref(),
        &f,
        &origin(k.space()),
        &center,
        &radius,
        grid,
        epsilon,
        n_range,
    )?;
    Ok(match g.emit {
        Emit::Json => pretty(&json!({
            "holds": r.holds, "worst": fmt_real(r.worst), "worst_point": fmt_rational(&r.worst_point),
            "worst_n": r.worst_n, "points": r.points,
        })),
        Emit::Csv => format!(
            "holds,worst,worst_point,worst_n,points\n{},{},{},{},{}\n",
            r.holds,
            fmt_real(r.worst),
            fmt_rational(&r.worst_point),
            r.worst_n,
            r.points
        ),
    })
}

fn cmd_svc(g: &Global, depth: u32) -> CliResult<String> {
    let tree = svc_build(depth)?;
    if depth > MAX_EMIT_DEPTH {
        return Err(CliError::Usage(format!(
            "svc emits at most depth {MAX_EMIT_DEPTH}; use t-eval for deeper queries"
        )));
    }
    Ok(match g.emit {
        Emit::Json => {
            let levels: Vec<_> = (1..=depth)
                .map(|n| -> eprop::Result<serde_json::Value> {
                    Ok(json!({
                        "level": n,
                        "kept": tree.kept(n)?,
                        "removed": tree.removed(n)?,
                    }))
                })
                .collect::<eprop::Result<_>>()?;
            pretty(&json!({ "depth": depth, "levels": levels }))
        }
        Emit::Csv => {
            let mut s = String::from("level,kind,index,lo,hi\n");
            for n in 1..=depth {
                for (i, w) in tree.removed(n)?.iter().enumerate() {
                    s.push_str(&format!(
                        "{n},removed,{},{},{}\n",
                        i + 1,
                        fmt_rational(&w.lo),
                        fmt_rational(&w.hi)
                    ));
                }
                for (i, c) in tree.kept(n)?.iter().enumerate() {
                    s.push_str(&format!(
                        "{n},kept,{},{},{}\n",
                        i + 1,
                        fmt_rational(&c.lo),
                        fmt_rational(&c.hi)
                    ));
                }
            }
            s
        }
    })
}

fn cmd_t_eval(g: &Global, x: &str, depth: u32) -> CliResult<String> {
    let tree: SvcTree = svc_build(depth)?;
    let x = rational("x", x)?;
    let t = tree.t_eval(&x)?;
    let (status, level, index) = match &t.classification {
        SvcClassification::Removed { level, index, .. } => ("removed", *level, *index),
        SvcClassification::Kept { depth, index, .. } => ("kept", *depth, *index),
    };
    let iv = t.classification.interval();
    Ok(match g.emit {
        Emit::Json => pretty(&json!({
            "x": fmt_rational(&x), "value": fmt_rational(&t.value), "exact": t.exact,
            "error_budget": fmt_real(t.error_budget), "status": status, "level": level, "index": index,
            "interval": [fmt_rational(&iv.lo), fmt_rational(&iv.hi)],
        })),
        Emit::Csv => format!(
            "x,value,exact,error_budget,status,level,index,lo,hi\n{},{},{},{},{status},{level},{index},{},{}\n",
            fmt_rational(&x),
            fmt_rational(&t.value),
            t.exact,
            fmt_real(t.error_budget),
            fmt_rational(&iv.lo),
            fmt_rational(&iv.hi)
        ),
    })
}

fn cmd_lipapprox(g: &Global, function: Function, r: f64, epsilon: f64, grid: usize) -> CliResult<String> {
    if grid == 0 || r.is_nan() || r <= 0.0 {
        return Err(CliError::Usage("need grid ≥ 1 and r > 0".into()));
    }
    let f = move |t: f64| match function {
        Function::Sin => (std::f64::consts::TAU * t).sin(),
        Function::Cos => (std::f64::consts::TAU * t).cos(),
        Function::Hat => (2.0 * t).min(2.0 - 2.0 * t),
    };
    let pts = circle_grid(grid);
    let spec = build(&pts, f, &MetricSpace::Circle, r, epsilon)?;
    let bound = spec.error_bound();
    Ok(match g.emit {
        Emit::Json => pretty(&json!({
            "centers": spec.len(), "r": fmt_real(r), "c": fmt_real(spec.c), "l": fmt_real(spec.l),
            "delta": fmt_real(spec.delta), "bound": fmt_real(bound),
            "max_error": fmt_real(pts.iter().map(|&t| (spec.eval(t) - f(t)).abs()).fold(0.0, f64::max)),
        })),
        Emit::Csv => {
            let mut s = String::from("x,f,L,bound\n");
            for &t in &pts {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_real(t),
                    fmt_real(f(t)),
                    fmt_real(spec.eval(t)),
                    fmt_real(bound)
                ));
            }
            s
        }
    })
}

fn cmd_remark1(g: &Global, m: u64, z: &str) -> CliResult<String> {
    let z = rational("z", z)?;
    let gap = remark1_gap(&z, m)?;
    Ok(match g.emit {
        Emit::Json => pretty(&json!({ "z": fmt_rational(&z), "m": m, "gap": fmt_rational(&gap) })),
        Emit::Csv => format!("{}\n", fmt_real(to_f64(&gap))),
    })
}

fn run(cli: &Cli) -> CliResult<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Fm { space, mu, nu, witness } => cmd_fm(g, *space, mu, nu, *witness),
        Command::Iterate {
            example,
            x,
            steps,
            depth,
        } => cmd_iterate(g, *example, x, *steps, *depth),
        Command::Eprobe {
            example,
            z,
            f,
            approach,
            mmax,
            nmax,
            depth,
            kstep,
            detail,
            witness,
        } => cmd_eprobe(
            g, *example, z, *f, *approach, *mmax, *nmax, *depth, *kstep, *detail, *witness,
        ),
        Command::Stability {
            example,
            x,
            nmax,
            depth,
        } => cmd_stability(g, *example, x, *nmax, *depth),
        Command::Basin {
            example,
            center,
            radius,
            grid,
            epsilon,
            f,
            nlo,
            nmax,
            depth,
        } => cmd_basin(g, *example, center, radius, *grid, *epsilon, *f, (*nlo, *nmax), *depth),
        Command::Svc { depth } => cmd_svc(g, *depth),
        Command::TEval { x, depth } => cmd_t_eval(g, x, *depth),
        Command::Lipapprox {
            function,
            r,
            epsilon,
            grid,
        } => cmd_lipapprox(g, *function, *r, *epsilon, *grid),
        Command::Remark1 { m, z } => cmd_remark1(g, *m, z),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.global.out {
        Some(path) => fs::write(path, text).map_err(CliError::Write),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(CliError::Write),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
