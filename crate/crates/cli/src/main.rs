//! Command-line front end: seminorm scans, translation-number searches,
//! classification, Danilov tail estimates, mild-solution solvers, and the
//! built-in example reproduction suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use weylap::aptest::{self, ClassifyPolicy, Convention, TranslationQuery};
use weylap::evolution::{self, SemigroupSpec, SolveGrid};
use weylap::io;
use weylap::seminorm::{self, ScanSpec, WindowSchedule};
use weylap::signal::{LipschitzBound, ParametricSignal, Signal};
use weylap::verify;

/// `min:max:step` triple used for scan and tau ranges.
#[derive(Clone, Copy, Debug)]
struct Range3 {
    min: f64,
    max: f64,
    step: f64,
}

impl FromStr for Range3 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:step, got '{s}'"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|e| format!("bad number '{p}': {e}")))
            .collect::<Result<_, _>>()?;
        if !(nums[0] < nums[1]) || !(nums[2] > 0.0) {
            return Err(format!("need min < max and step > 0 in '{s}'"));
        }
        Ok(Range3 {
            min: nums[0],
            max: nums[1],
            step: nums[2],
        })
    }
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}")))
        .collect()
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Classical,
    Ursell,
    Bohr,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Classical => Convention::Classical,
            ConventionArg::Ursell => Convention::Ursell,
            ConventionArg::Bohr => Convention::Bohr,
        }
    }
}

#[derive(Args, Clone, Debug)]
struct ScanArgs {
    /// Outer xi scan as min:max:step
    #[arg(long, default_value = "-10:10:0.5", allow_hyphen_values = true)]
    scan: Range3,
    /// Quadrature points per unit time
    #[arg(long, default_value_t = 256)]
    density: u32,
}

impl ScanArgs {
    fn spec(&self) -> ScanSpec {
        ScanSpec::new(self.scan.min, self.scan.max, self.scan.step).with_density(self.density)
    }
}

#[derive(Args, Clone, Debug)]
struct GeneratorArgs {
    /// Scalar generator a < 0
    #[arg(long, conflicts_with_all = ["diag", "matrix"], allow_hyphen_values = true)]
    a: Option<f64>,
    /// Diagonal generator entries, comma separated, all negative
    #[arg(long, value_parser = parse_f64_list, conflicts_with = "matrix", allow_hyphen_values = true)]
    diag: Option<Vec<f64>>,
    /// Dense generator as row-major CSV
    #[arg(long, requires = "m", requires = "delta")]
    matrix: Option<PathBuf>,
    /// Envelope constant M >= 1 (dense generators only)
    #[arg(long)]
    m: Option<f64>,
    /// Envelope rate delta > 0 (dense generators only)
    #[arg(long)]
    delta: Option<f64>,
}

impl GeneratorArgs {
    fn build(&self) -> Result<SemigroupSpec, weylap::Error> {
        if let Some(a) = self.a {
            SemigroupSpec::scalar(a)
        } else if let Some(diag) = &self.diag {
            SemigroupSpec::diagonal(diag.clone())
        } else if let Some(path) = &self.matrix {
            let mat = io::load_matrix_csv(path)?;
            SemigroupSpec::dense(mat, self.m.unwrap_or(1.0), self.delta.unwrap_or(1.0))
        } else {
            Err(weylap::Error::InvalidParameter(
                "one of --a, --diag, --matrix is required".into(),
            ))
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "weylap", version, about = "Seminorm scans, almost-periodicity classification, and bounded mild solutions")]
struct Cli {
    /// Worker threads (default: all cores); results are identical at any value
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory for emitted files
    #[arg(long, global = true, env = "WEYLAP_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Stepanov seminorm at one window length
    Norm {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weyl seminorm via a geometric window schedule
    Weyl {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 1.0)]
        l0: f64,
        #[arg(long, default_value_t = 2.0)]
        factor: f64,
        #[arg(long, default_value_t = 16)]
        max_windows: usize,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the (l, estimate) history as CSV
        #[arg(long)]
        history_csv: Option<PathBuf>,
    },
    /// Scan a tau grid for eps-translation numbers
    Translations {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        #[arg(long, value_enum, default_value_t = ConventionArg::Classical)]
        convention: ConventionArg,
        /// Tau grid as min:max:step
        #[arg(long, default_value = "0:10:0.1", allow_hyphen_values = true)]
        tau: Range3,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the (tau, distance) landscape as CSV
        #[arg(long)]
        landscape_csv: Option<PathBuf>,
    },
    /// Classification ladder: bohr / stepanov / weyl / unresolved
    Classify {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 10.0)]
        tau_max: f64,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Danilov tail functional along a window / fraction schedule
    Danilov {
        #[arg(long)]
        signal: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Window lengths, comma separated
        #[arg(long, value_parser = parse_f64_list, default_value = "1,2,4,8,16")]
        windows: Vec<f64>,
        /// Small-measure fractions, comma separated
        #[arg(long, value_parser = parse_f64_list, default_value = "0.25,0.125,0.0625,0.03125,0.015625")]
        delta_fractions: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded mild solution of u' = A u + f(t)
    SolveLinear {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long)]
        forcing: PathBuf,
        /// Single evaluation time
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Evaluation grid as min:max:step (writes a solution CSV)
        #[arg(long, allow_hyphen_values = true)]
        t_grid: Option<Range3>,
        #[arg(long, default_value_t = 1e-6)]
        tail_tol: f64,
        #[arg(long, default_value_t = 256)]
        density: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        solution_csv: Option<PathBuf>,
    },
    /// Picard iteration for u' = A u + g(t) + coupling * sin(u)
    SolveSemilinear {
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Forcing term g as a signal spec
        #[arg(long)]
        forcing: PathBuf,
        /// Coupling constant c in the nonlinearity c * sin(u_i)
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        coupling: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_start: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, default_value_t = 0.015625)]
        dt: f64,
        #[arg(long, default_value_t = 1e-6)]
        tail_tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        res_tol: f64,
        #[arg(long, default_value_t = 256)]
        density: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        solution_csv: Option<PathBuf>,
    },
    /// Translation diagnostics of the semilinear right-hand side
    Diagnostic {
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long)]
        forcing: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        coupling: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_start: f64,
        #[arg(long, allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, default_value_t = 0.015625)]
        dt: f64,
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, default_value_t = 1.0)]
        l: f64,
        #[arg(long)]
        delta1: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-6)]
        tail_tol: f64,
        #[arg(long, default_value_t = 256)]
        density: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the worked examples and emit a pass/fail report
    VerifyPaper {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit_report(out_dir: &Path, out: Option<&PathBuf>, body: serde_json::Value) -> std::io::Result<()> {
    let mut wrapped = json!({
        "timestamp": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    });
    wrapped
        .as_object_mut()
        .unwrap()
        .extend(body.as_object().cloned().unwrap_or_default());
    let text = serde_json::to_string_pretty(&wrapped).expect("serializable report");
    match out {
        Some(path) => std::fs::write(out_dir.join(path), text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_pairs_csv(path: &Path, rows: &[(f64, f64)]) -> std::io::Result<()> {
    let mut text = String::new();
    for (a, b) in rows {
        text.push_str(&format!("{a:.12e},{b:.12e}\n"));
    }
    std::fs::write(path, text)
}

fn build_parametric(forcing: Signal, coupling: f64) -> ParametricSignal {
    let dim = forcing.dim();
    ParametricSignal::new(dim, LipschitzBound::Constant(coupling.abs()), move |t, u, out| {
        forcing.eval_into(t, out);
        for (o, ui) in out.iter_mut().zip(u) {
            *o += coupling * ui.sin();
        }
    })
}

fn dispatch(cli: &Cli) -> Result<ExitCode, weylap::Error> {
    let out_dir = &cli.out_dir;
    match &cli.cmd {
        Cmd::Norm { signal, p, l, scan, out } => {
            let f = io::load_signal(signal)?;
            let est = seminorm::stepanov_norm(&f, *p, *l, &scan.spec())?;
            emit_report(out_dir, out.as_ref(), json!({"kind": "norm", "report": est}))?;
        }
        Cmd::Weyl {
            signal,
            p,
            tol,
            l0,
            factor,
            max_windows,
            scan,
            out,
            history_csv,
        } => {
            let f = io::load_signal(signal)?;
            let schedule = WindowSchedule {
                l0: *l0,
                factor: *factor,
                max_windows: *max_windows,
            };
            let est = seminorm::weyl_norm(&f, *p, &schedule, *tol, &scan.spec())?;
            if let Some(csv) = history_csv {
                write_pairs_csv(&out_dir.join(csv), &est.history)?;
            }
            emit_report(out_dir, out.as_ref(), json!({"kind": "weyl", "report": est}))?;
        }
        Cmd::Translations {
            signal,
            eps,
            p,
            l,
            convention,
            tau,
            scan,
            out,
            landscape_csv,
        } => {
            let f = io::load_signal(signal)?;
            let q = TranslationQuery {
                eps: *eps,
                p: *p,
                l: *l,
                convention: (*convention).into(),
                tau_min: tau.min,
                tau_max: tau.max,
                tau_step: tau.step,
                scan: scan.spec(),
            };
            let set = aptest::scan_translations(&f, &q)?;
            if let Some(csv) = landscape_csv {
                write_pairs_csv(&out_dir.join(csv), &set.distances)?;
            }
            emit_report(out_dir, out.as_ref(), json!({"kind": "translations", "report": set}))?;
        }
        Cmd::Classify {
            signal,
            eps,
            p,
            tau_max,
            scan,
            out,
        } => {
            let f = io::load_signal(signal)?;
            let policy = ClassifyPolicy::new(*tau_max, scan.spec());
            let class = aptest::classify(&f, *eps, *p, &policy)?;
            emit_report(out_dir, out.as_ref(), json!({"kind": "classify", "report": class}))?;
        }
        Cmd::Danilov {
            signal,
            p,
            windows,
            delta_fractions,
            tol,
            scan,
            out,
        } => {
            let f = io::load_signal(signal)?;
            let report = seminorm::danilov_membership(&f, *p, windows, delta_fractions, *tol, &scan.spec())?;
            emit_report(out_dir, out.as_ref(), json!({"kind": "danilov", "report": report}))?;
        }
        Cmd::SolveLinear {
            generator,
            forcing,
            t,
            t_grid,
            tail_tol,
            density,
            out,
            solution_csv,
        } => {
            let s = generator.build()?;
            let f = io::load_signal(forcing)?;
            let mut body = serde_json::Map::new();
            body.insert("kind".into(), json!("solve-linear"));
            if let Some(t) = t {
                let sol = evolution::linear_mild_solution(&s, &f, *t, *tail_tol, *density)?;
                body.insert("point".into(), json!(sol));
            }
            if let Some(grid) = t_grid {
                let n = ((grid.max - grid.min) / grid.step).round() as usize + 1;
                let mut values = Vec::with_capacity(n);
                let mut worst_tail: f64 = 0.0;
                let mut worst_quad: f64 = 0.0;
                for i in 0..n {
                    let ti = grid.min + i as f64 * grid.step;
                    let sol = evolution::linear_mild_solution(&s, &f, ti, *tail_tol, *density)?;
                    worst_tail = worst_tail.max(sol.tail_bound);
                    worst_quad = worst_quad.max(sol.quad_tol);
                    values.push(sol.value);
                }
                if let Some(csv) = solution_csv {
                    io::write_solution_csv(&out_dir.join(csv), grid.min, grid.step, &values)?;
                }
                body.insert(
                    "grid".into(),
                    json!({"tail_bound": worst_tail, "quad_tol": worst_quad, "points": n}),
                );
            }
            if t.is_none() && t_grid.is_none() {
                return Err(weylap::Error::InvalidParameter("need --t or --t-grid".into()));
            }
            emit_report(out_dir, out.as_ref(), serde_json::Value::Object(body))?;
        }
        Cmd::SolveSemilinear {
            generator,
            forcing,
            coupling,
            p,
            t_start,
            t_end,
            dt,
            tail_tol,
            max_iter,
            res_tol,
            density,
            out,
            solution_csv,
        } => {
            let s = generator.build()?;
            let g = io::load_signal(forcing)?;
            let pf = build_parametric(g, *coupling);
            let grid = SolveGrid {
                t_start: *t_start,
                t_end: *t_end,
                dt: *dt,
            };
            let sol = evolution::picard_solve(&s, &pf, *p, &grid, *tail_tol, *max_iter, *res_tol, *density)?;
            if let Some(csv) = solution_csv {
                io::write_solution_csv(&out_dir.join(csv), sol.t0, sol.dt, &sol.values)?;
            }
            emit_report(
                out_dir,
                out.as_ref(),
                json!({
                    "kind": "solve-semilinear",
                    "certificate": {
                        "tail_bound": sol.tail_bound,
                        "quad_tol": sol.quad_tol,
                        "picard": sol.picard,
                    },
                    "sup_norm": sol.sup_norm(),
                }),
            )?;
        }
        Cmd::Diagnostic {
            generator,
            forcing,
            coupling,
            p,
            t_start,
            t_end,
            dt,
            tau,
            l,
            delta1,
            gamma,
            tail_tol,
            density,
            out,
        } => {
            let s = generator.build()?;
            let g = io::load_signal(forcing)?;
            let pf = build_parametric(g, *coupling);
            let grid = SolveGrid {
                t_start: *t_start,
                t_end: *t_end,
                dt: *dt,
            };
            let sol = evolution::picard_solve(&s, &pf, *p, &grid, *tail_tol, 50, 1e-10, *density)?;
            let diag =
                evolution::translation_diagnostic(&pf, &sol, *tau, *p, *l, *delta1, *gamma, *tail_tol, *density)?;
            emit_report(out_dir, out.as_ref(), json!({"kind": "diagnostic", "report": diag}))?;
        }
        Cmd::VerifyPaper { seed, out } => {
            let report = verify::verify_paper(*seed)?;
            for case in &report.reports {
                let rows: String = case
                    .checks
                    .iter()
                    .map(|c| {
                        format!(
                            "{:?},{:.12e},{:.12e},{:.12e},{}\n",
                            c.description, c.measured, c.target, c.tol, c.pass
                        )
                    })
                    .collect();
                std::fs::write(out_dir.join(format!("verify_{}.csv", case.case_id)), rows)?;
            }
            let pass = report.pass;
            emit_report(out_dir, out.as_ref(), json!({"kind": "verify-paper", "report": report}))?;
            if !pass {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Scans use deterministic reductions, so the thread count only
        // affects speed.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
