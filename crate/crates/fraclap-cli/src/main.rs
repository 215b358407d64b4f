//! `fraclap`: command-line harness for the fractional Laplacian toolkit.
//!
//! Subcommands: `weights`, `apply`, `dirichlet`, `obstacle`, `converge`,
//! `props`. An optional flat `key=value` config file mirrors the long flag
//! names; explicit command-line flags win. Exit codes: 0 success, 1 usage
//! error, 2 numerical failure, 3 property-suite failure.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fraclap::exact::by_name;
use fraclap::grid::{Grid, GridFn, TailRule};
use fraclap::harness::{
    run_accuracy, run_dirichlet_convergence, run_obstacle_convergence, DirichletCase, ErrorNorm,
    ExperimentSpec, FarFieldMode,
};
use fraclap::io::{
    format_sci, gnuplot_script, parse_config, parse_table_csv, rates_csv, render_csv, report_csv,
};
use fraclap::kernel::{Kernel, KernelParams};
use fraclap::operator::{apply_full_fast, default_m};
use fraclap::solve::{
    solve_dirichlet, solve_obstacle, DirichletProblem, ExteriorData, ObstacleProblem,
};
use fraclap::{FarField, InterpOrder};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fraclap", version, about = "1D fractional Laplacian toolkit")]
struct Cli {
    /// Flat key=value file mirroring the long flags; CLI flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory prepended to every output path.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads for the parallel sweeps (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for the randomized property checks.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    h: f64,
    #[arg(long, value_parser = parse_order)]
    order: InterpOrder,
}

fn parse_order(s: &str) -> Result<InterpOrder, String> {
    match s {
        "tent" => Ok(InterpOrder::Tent),
        "quad" => Ok(InterpOrder::Quad),
        other => Err(format!("unknown order '{other}' (expected tent|quad)")),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<T>()
                .map_err(|_| format!("bad {what} entry '{c}'"))
        })
        .collect()
}

#[derive(Subcommand)]
enum Command {
    /// Dump the convolution weights as CSV (j, w_j, cumulative sum).
    Weights {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Truncation index M (L_W = M h).
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the operator to a catalog function and tabulate the error.
    Apply {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        l: f64,
        /// gaussian | algebraic | c0 | c1 | getoor
        #[arg(long)]
        function: String,
        /// zero | algebraic | table
        #[arg(long, default_value = "zero")]
        farfield: String,
        /// Decay exponent override for the algebraic tail.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the extended Dirichlet problem on (-a, a).
    Dirichlet {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// one | custom-csv (with --f-file)
        #[arg(long, default_value = "one")]
        f: String,
        #[arg(long)]
        f_file: Option<PathBuf>,
        /// zero | table-csv (with --g-file)
        #[arg(long, default_value = "zero")]
        g: String,
        #[arg(long)]
        g_file: Option<PathBuf>,
        /// Algebraic tail exponent of the exterior data beyond its table.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the canonical obstacle problem by monotone iteration.
    Obstacle {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        l: f64,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
        /// Apply the algebraic-tail far-field correction (beta = alpha).
        #[arg(long, default_value_t = false)]
        tail: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convergence sweeps; writes `<out>.csv`, `<out>-rates.csv`, `<out>.gnuplot`.
    Converge {
        /// operator | dirichlet | obstacle
        #[arg(long, default_value = "operator")]
        problem: String,
        #[arg(long, default_value = "gaussian")]
        function: String,
        /// Comma-separated α values.
        #[arg(long, default_value = "0.8")]
        alpha: String,
        /// Comma-separated orders (tent,quad).
        #[arg(long, default_value = "quad")]
        order: String,
        /// Comma-separated decreasing spacings.
        #[arg(long, default_value = "0.4,0.2,0.1,0.05")]
        h: String,
        /// Comma-separated domain half-widths.
        #[arg(long, default_value = "10")]
        l: String,
        /// zero | algebraic | table | algebraic-no-tail
        #[arg(long, default_value = "zero")]
        farfield: String,
        #[arg(long)]
        beta: Option<f64>,
        /// max | point0
        #[arg(long, default_value = "max")]
        norm: String,
        /// Window fraction for the max norm.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        /// Obstacle runs: apply the algebraic-tail correction.
        #[arg(long, default_value_t = true)]
        tail: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full property suite; exits 3 if any check fails.
    Props,
}

fn main() -> ExitCode {
    let args = match argv_with_config() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        fraclap::set_threads(cli.threads);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Injects config-file pairs as trailing long flags for any key the user
/// did not pass explicitly.
fn argv_with_config() -> Result<Vec<String>, String> {
    let argv: Vec<String> = std::env::args().collect();
    let Some(pos) = argv.iter().position(|a| a == "--config") else {
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .ok_or_else(|| "--config needs a file path".to_string())?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {path}: {e}"))?;
    let pairs = parse_config(&text).map_err(|e| e.to_string())?;
    let mut out = argv.clone();
    for (key, value) in pairs {
        let flag = format!("--{key}");
        if !argv.iter().any(|a| a == &flag) {
            out.push(flag);
            out.push(value);
        }
    }
    Ok(out)
}

fn write_out(dir: &Path, rel: &Path, text: &str) -> fraclap::Result<PathBuf> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&path, text)?;
    Ok(path)
}

fn run(cli: &Cli) -> fraclap::Result<ExitCode> {
    match &cli.command {
        Command::Weights { kernel, m, out } => {
            let params = KernelParams::new(kernel.alpha, kernel.h, kernel.order, *m)?;
            let k = Kernel::new(params)?;
            let mut rows = Vec::with_capacity(*m);
            let mut cum = 0.0;
            for j in 1..=*m {
                cum += k.weight(j);
                rows.push(vec![Some(j as f64), Some(k.weight(j)), Some(cum)]);
            }
            let meta = vec![format!(
                "weights alpha={} h={} order={} M={m} total_sum={}",
                kernel.alpha,
                kernel.h,
                kernel.order.label(),
                format_sci(k.total_sum())
            )];
            let path = write_out(
                &cli.out_dir,
                out,
                &render_csv(&meta, &["j", "w", "cumsum"], &rows),
            )?;
            println!("wrote {}", path.display());
        }
        Command::Apply {
            kernel,
            l,
            function,
            farfield,
            beta,
            out,
        } => {
            let pair = by_name(function, kernel.alpha)?;
            let grid = Grid::symmetric(*l, kernel.h)?;
            let u = pair.sample_u(grid)?;
            let m = default_m(&grid, kernel.order);
            let k = Kernel::new(KernelParams::new(kernel.alpha, kernel.h, kernel.order, m)?)?;
            let beta_eff = beta.or(pair.beta);
            let ff = match farfield.as_str() {
                "zero" => FarField::Zero,
                "algebraic" => match beta_eff {
                    Some(b) => FarField::algebraic_from(b, &u)?,
                    None => FarField::Zero,
                },
                "table" => {
                    let f = pair.u.clone();
                    let tail = match beta_eff {
                        Some(b) => TailRule::Algebraic {
                            beta: b,
                            u_left: u.left_value(),
                            u_right: u.right_value(),
                        },
                        None => TailRule::Zero,
                    };
                    FarField::table_from(grid, m, move |x| f(x), tail)
                }
                other => {
                    return Err(fraclap::Error::Domain(format!(
                        "unknown farfield '{other}'"
                    )))
                }
            };
            let lu = apply_full_fast(&k, &u, &ff)?;
            let rows: Vec<Vec<Option<f64>>> = (0..u.len())
                .map(|i| {
                    let x = grid.node(i);
                    let exact = pair.lu_at(x);
                    vec![
                        Some(x),
                        Some(u.values()[i]),
                        Some(lu.values()[i]),
                        exact,
                        exact.map(|e| (lu.values()[i] - e).abs()),
                    ]
                })
                .collect();
            let meta = vec![format!(
                "apply function={function} alpha={} h={} L={l} order={} farfield={farfield}",
                kernel.alpha,
                kernel.h,
                kernel.order.label()
            )];
            let path = write_out(
                &cli.out_dir,
                out,
                &render_csv(
                    &meta,
                    &["x", "u", "Lu_numeric", "Lu_exact", "abs_error"],
                    &rows,
                ),
            )?;
            println!("wrote {}", path.display());
        }
        Command::Dirichlet {
            kernel,
            a,
            f,
            f_file,
            g,
            g_file,
            beta,
            out,
        } => {
            let n = (2.0 * a / kernel.h).round() as usize - 1;
            let mut problem = DirichletProblem {
                alpha: kernel.alpha,
                a: *a,
                h: kernel.h,
                order: kernel.order,
                f: Vec::new(),
                g: ExteriorData::Zero,
            };
            problem.f = match f.as_str() {
                "one" => vec![1.0; n],
                "custom-csv" => {
                    let path = f_file.as_ref().ok_or_else(|| {
                        fraclap::Error::Domain("--f custom-csv needs --f-file".into())
                    })?;
                    let table = parse_table_csv(&std::fs::read_to_string(path)?)?;
                    lookup_samples(&table, (0..n).map(|i| problem.interior_node(i)), kernel.h)?
                }
                other => return Err(fraclap::Error::Domain(format!("unknown f mode '{other}'"))),
            };
            problem.g = match g.as_str() {
                "zero" => ExteriorData::Zero,
                "table-csv" => {
                    let path = g_file.as_ref().ok_or_else(|| {
                        fraclap::Error::Domain("--g table-csv needs --g-file".into())
                    })?;
                    let table = parse_table_csv(&std::fs::read_to_string(path)?)?;
                    let m = problem.m();
                    let left =
                        lookup_samples(&table, (0..m).map(|k| -a - k as f64 * kernel.h), kernel.h)?;
                    let right =
                        lookup_samples(&table, (0..m).map(|k| a + k as f64 * kernel.h), kernel.h)?;
                    let tail = match beta {
                        Some(b) => TailRule::Algebraic {
                            beta: *b,
                            u_left: left[0],
                            u_right: right[0],
                        },
                        None => TailRule::Zero,
                    };
                    ExteriorData::Table { left, right, tail }
                }
                other => return Err(fraclap::Error::Domain(format!("unknown g mode '{other}'"))),
            };
            let sol = solve_dirichlet(&problem)?;
            // the canonical f≡1, g≡0 problem has the exit-time solution
            let exact = if f == "one" && g == "zero" {
                Some(fraclap::exact::getoor_pair(kernel.alpha)?.u)
            } else {
                None
            };
            let grid = sol.u.grid();
            let rows: Vec<Vec<Option<f64>>> = (0..sol.u.len())
                .map(|i| {
                    let x = grid.node(i);
                    vec![
                        Some(x),
                        Some(sol.u.values()[i]),
                        exact.as_ref().map(|e| e(x)),
                        None,
                        None,
                    ]
                })
                .collect();
            let meta = vec![format!(
                "dirichlet alpha={} h={} a={a} order={} residual={}",
                kernel.alpha,
                kernel.h,
                kernel.order.label(),
                format_sci(sol.residual)
            )];
            let path = write_out(
                &cli.out_dir,
                out,
                &render_csv(
                    &meta,
                    &["x", "u_numeric", "u_exact", "phi", "coincidence_flag"],
                    &rows,
                ),
            )?;
            println!("wrote {}", path.display());
        }
        Command::Obstacle {
            kernel,
            l,
            dt,
            tol,
            max_iter,
            tail,
            out,
        } => {
            let (phi_f, u_f) = fraclap::exact::obstacle_exact(kernel.alpha)?;
            let grid = Grid::symmetric(*l, kernel.h)?;
            let phi = GridFn::sample(grid, |x| phi_f(x))?;
            let mut problem = ObstacleProblem::new(phi.clone(), kernel.alpha, kernel.order);
            problem.dt = *dt;
            problem.tol = *tol;
            problem.max_iter = *max_iter;
            problem.algebraic_tail = *tail;
            let sol = solve_obstacle(&problem)?;
            let rows: Vec<Vec<Option<f64>>> = (0..sol.u.len())
                .map(|i| {
                    let x = grid.node(i);
                    vec![
                        Some(x),
                        Some(sol.u.values()[i]),
                        Some(u_f(x)),
                        Some(phi.values()[i]),
                        Some(if sol.coincidence[i] { 1.0 } else { 0.0 }),
                    ]
                })
                .collect();
            let meta = vec![format!(
                "obstacle alpha={} h={} L={l} order={} iterations={} complementarity={}",
                kernel.alpha,
                kernel.h,
                kernel.order.label(),
                sol.iterations,
                format_sci(sol.complementarity)
            )];
            let path = write_out(
                &cli.out_dir,
                out,
                &render_csv(
                    &meta,
                    &["x", "u_numeric", "u_exact", "phi", "coincidence_flag"],
                    &rows,
                ),
            )?;
            println!("wrote {}", path.display());
        }
        Command::Converge {
            problem,
            function,
            alpha,
            order,
            h,
            l,
            farfield,
            beta,
            norm,
            window,
            tail,
            out,
        } => {
            let alphas: Vec<f64> = parse_list(alpha, "alpha").map_err(fraclap::Error::Parse)?;
            let orders: Vec<InterpOrder> = order
                .split(',')
                .map(|s| parse_order(s.trim()))
                .collect::<Result<_, _>>()
                .map_err(fraclap::Error::Parse)?;
            let hs: Vec<f64> = parse_list(h, "h").map_err(fraclap::Error::Parse)?;
            let ls: Vec<f64> = parse_list(l, "L").map_err(fraclap::Error::Parse)?;
            let report = match problem.as_str() {
                "operator" => {
                    let mode = match farfield.as_str() {
                        "zero" => FarFieldMode::Zero,
                        "algebraic" => FarFieldMode::Algebraic,
                        "table" => FarFieldMode::Table,
                        "algebraic-no-tail" => FarFieldMode::AlgebraicNoTail,
                        other => {
                            return Err(fraclap::Error::Domain(format!(
                                "unknown farfield '{other}'"
                            )))
                        }
                    };
                    let norm = match norm.as_str() {
                        "max" => ErrorNorm::MaxOnWindow { fraction: *window },
                        "point0" => ErrorNorm::PointAtZero,
                        other => {
                            return Err(fraclap::Error::Domain(format!("unknown norm '{other}'")))
                        }
                    };
                    run_accuracy(&ExperimentSpec {
                        function: function.clone(),
                        orders,
                        alphas,
                        hs,
                        ls,
                        farfield: mode,
                        beta: *beta,
                        norm,
                    })?
                }
                "dirichlet" => {
                    let case = match function.as_str() {
                        "getoor" => DirichletCase::Getoor,
                        "c1" => DirichletCase::ManufacturedC1,
                        other => {
                            return Err(fraclap::Error::Domain(format!(
                                "dirichlet convergence supports getoor|c1, got '{other}'"
                            )))
                        }
                    };
                    let alpha = *alphas.first().expect("validated nonempty");
                    run_dirichlet_convergence(case, alpha, &orders, &hs)?
                }
                "obstacle" => {
                    let alpha = *alphas.first().expect("validated nonempty");
                    let order = *orders.first().expect("validated nonempty");
                    run_obstacle_convergence(alpha, order, &ls, &hs, *tail)?
                }
                other => {
                    return Err(fraclap::Error::Domain(format!("unknown problem '{other}'")))
                }
            };
            let base = out.clone();
            let csv_path = write_out(
                &cli.out_dir,
                &base.with_extension("csv"),
                &report_csv(&report),
            )?;
            let rates_name = format!(
                "{}-rates.csv",
                base.file_stem().and_then(|s| s.to_str()).unwrap_or("report")
            );
            let rates_path = write_out(
                &cli.out_dir,
                &base.with_file_name(rates_name),
                &rates_csv(&report),
            )?;
            let plot_name = csv_path
                .file_name()
                .and_then(|s| s.to_str())
                .unwrap_or("report.csv")
                .to_string();
            let gp = write_out(
                &cli.out_dir,
                &base.with_extension("gnuplot"),
                &gnuplot_script(&plot_name, &report.meta),
            )?;
            for s in &report.series {
                println!("{s}");
            }
            println!(
                "wrote {} {} {}",
                csv_path.display(),
                rates_path.display(),
                gp.display()
            );
        }
        Command::Props => {
            let report = fraclap::props::run_property_suite(cli.seed);
            for e in &report.entries {
                println!(
                    "{:32} {} {}",
                    e.name,
                    if e.passed { "PASS" } else { "FAIL" },
                    e.detail
                );
            }
            if !report.all_passed() {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Looks up required sample positions in a parsed (x, value) table,
/// tolerating node coordinates within a thousandth of the spacing.
fn lookup_samples(
    table: &[(f64, f64)],
    positions: impl Iterator<Item = f64>,
    h: f64,
) -> fraclap::Result<Vec<f64>> {
    let tol = 1e-3 * h;
    positions
        .map(|x| {
            table
                .iter()
                .find(|(tx, _)| (tx - x).abs() <= tol)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    fraclap::Error::Parse(format!("input table is missing a sample at x = {x}"))
                })
        })
        .collect()
}
