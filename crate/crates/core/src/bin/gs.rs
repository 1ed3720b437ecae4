//! Command-line driver: solves, classifications, verification suites, and
//! dimension sweeps with machine-readable CSV/JSON output.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use snewton::functionals::{
    energy, hls_check, particle_number, HlsControls, Profile, Trial, TAIL_REL_TOL,
};
use snewton::integrate::Tolerances;
use snewton::lane_emden::{exact_d6, lyapunov, milne, reduction_check, solve_lane_emden};
use snewton::ode::{integrate_from_origin, EventKind};
use snewton::shooting::{classify, shoot, wronskian_monotonicity};
use snewton::transforms::{
    autonomous_energy, fit_s0, from_log_variables, to_log_variables,
};
use snewton::{
    Classification, Dimension, Error, GroundStateResult, PhysicalScaling, RadialState,
    SolverConfig,
};

/// Ground-state solver for the radial Schrödinger–Newton system.
#[derive(Parser)]
#[command(name = "gs", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bisect to the ground-state initial value and write its profile.
    Shoot(ShootArgs),
    /// Classify a single initial value as N, P, or CANDIDATE.
    Classify(ClassifyArgs),
    /// Solve the reduced equation u'' + (d-1)/r u' = -u^2.
    LaneEmden(LaneEmdenArgs),
    /// Milne variables y, z of the reduced profile with ODE residuals.
    Milne(MilneArgs),
    /// Physical rescaling and log-variable diagnostics of a solve.
    Transform(TransformArgs),
    /// Run a named verification suite; exit 1 on any failed assertion.
    Verify(VerifyArgs),
    /// Solve over a list or range of dimensions; CSV table on stdout.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Dimension d > 0.
    #[arg(long)]
    d: f64,
    /// Absolute integration tolerance (default 1e-10, or GS_DEFAULT_TOL).
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Relative integration tolerance (default 1e-10, or GS_DEFAULT_TOL).
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Integration horizon (default depends on d).
    #[arg(long)]
    rmax: Option<f64>,
}

#[derive(Args)]
struct ShootArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Bisection tolerance on u0 (default 1e-8, or GS_DEFAULT_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Coupling constant for the energy report.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Output basename: writes <out>.profile.csv and <out>.summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Initial value u(0) to classify.
    #[arg(long)]
    u0: f64,
}

#[derive(Args)]
struct LaneEmdenArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Output basename: writes <out>.profile.csv and <out>.summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MilneArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Output basename: writes <out>.summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Dilation parameter sigma > 0 (frequency omega = sigma^2).
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Coupling constant gamma > 0.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Initial value to integrate; defaults to the shot ground state.
    #[arg(long)]
    u0: Option<f64>,
    /// Bisection tolerance on u0 when shooting (default 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    /// Output basename: writes the physical profile and summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    check: CheckCmd,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Shot d=6 solution against the closed form u = (1 + r^2/24)^-2.
    D6,
    /// Critical convolution inequality at d=6: optimizer ratio, dilation
    /// invariance, strictness off the optimizer.
    Hls,
    /// Lyapunov function of the reduced equation: sign dichotomy in d and
    /// the derivative identity.
    Lyapunov(DimFlag),
    /// Weighted Wronskian of two trajectories grows; profiles do not cross.
    Wronskian(DimFlag),
    /// Milne variable limits y -> 0, z -> d and ODE residuals.
    Milne(DimFlag),
    /// Reduction identity u + V = 1 for the u0 = 1 trajectory.
    Reduction(DimFlag),
    /// Log-variable round trip, conserved energy and zero-energy relation
    /// of the d=6 orbit, soliton center e^{2 s0} = 24.
    Autonomous,
}

#[derive(Args)]
struct DimFlag {
    /// Dimension d > 0.
    #[arg(long)]
    d: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Dimensions: comma list `1,2,3` or range `start:stop:step`.
    #[arg(long)]
    d: String,
    /// Bisection tolerance on u0 (default 1e-8, or GS_DEFAULT_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Coupling constant for the energy column.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

/// Terminal failure: exit code plus a message for stderr.
struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 64, msg: msg.into() }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure { code: 74, msg: format!("i/o error: {e}") }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BracketFailure => 2,
            Error::NonConvergence { .. }
            | Error::Undetermined { .. }
            | Error::IntegrationStalled { .. }
            | Error::PoissonNonConvergence(_) => 3,
            _ => 64,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Shoot(a) => cmd_shoot(&a),
        Cmd::Classify(a) => cmd_classify(&a),
        Cmd::LaneEmden(a) => cmd_lane_emden(&a),
        Cmd::Milne(a) => cmd_milne(&a),
        Cmd::Transform(a) => cmd_transform(&a),
        Cmd::Verify(a) => cmd_verify(&a),
        Cmd::Sweep(a) => cmd_sweep(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("gs: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

/// `GS_DEFAULT_TOL`, parsed once; flags always win over it.
fn env_default_tol() -> Result<Option<f64>, Failure> {
    match std::env::var("GS_DEFAULT_TOL") {
        Ok(s) => {
            let t: f64 = s
                .trim()
                .parse()
                .map_err(|_| usage(format!("GS_DEFAULT_TOL is not a number: {s:?}")))?;
            if t > 0.0 && t.is_finite() {
                Ok(Some(t))
            } else {
                Err(usage(format!("GS_DEFAULT_TOL must be positive, got {t}")))
            }
        }
        Err(_) => Ok(None),
    }
}

impl CommonFlags {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let d = Dimension::new(self.d)?;
        let mut cfg = SolverConfig::for_dimension(d);
        if let Some(t) = env_default_tol()? {
            cfg.abs_tol = t;
            cfg.rel_tol = t;
        }
        if let Some(t) = self.abs_tol {
            cfg.abs_tol = t;
        }
        if let Some(t) = self.rel_tol {
            cfg.rel_tol = t;
        }
        if let Some(r) = self.rmax {
            cfg.r_max = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Flag value, else `GS_DEFAULT_TOL`, else the built-in default.
fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, Failure> {
    let t = match flag {
        Some(t) => t,
        None => env_default_tol()?.unwrap_or(default),
    };
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(usage(format!("tolerance must be positive, got {t}")))
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn with_tol(value: f64, tol: f64) -> Value {
    json!({ "value": value, "tol": tol })
}

fn config_echo(cfg: &SolverConfig) -> Value {
    json!({
        "abs_tol": cfg.abs_tol,
        "rel_tol": cfg.rel_tol,
        "r_start": cfg.r_start,
        "r_max": cfg.r_max,
        "u_floor": cfg.u_floor,
        "event_tol": cfg.event_tol,
    })
}

fn summary(command: &str, d: f64, config: Value, results: Value) -> Value {
    json!({
        "command": command,
        "d": d,
        "config": config,
        "results": results,
        "exit": 0,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(io_failure)
}

fn profile_csv(states: &[RadialState]) -> String {
    let mut out = String::from("r,u,du,V,dV\n");
    for s in states {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt(s.r),
            fmt(s.u),
            fmt(s.du),
            fmt(s.v),
            fmt(s.dv)
        ));
    }
    out
}

/// Emit the summary to stdout and, with an output basename, to
/// `<out>.summary.json` alongside an optional `<out>.profile.csv`.
fn emit(out: &Option<PathBuf>, summary: &Value, profile: Option<&[RadialState]>) -> Result<(), Failure> {
    let text = format!("{:#}\n", summary);
    print!("{text}");
    if let Some(base) = out {
        write_text(&with_suffix(base, ".summary.json"), &text)?;
        if let Some(states) = profile {
            write_text(&with_suffix(base, ".profile.csv"), &profile_csv(states))?;
        }
    }
    Ok(())
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn quadrature_json(q: &snewton::QuadratureResult) -> Value {
    json!({
        "value": q.value,
        "tail_estimate": q.tail_estimate,
        "r_max_used": q.r_max_used,
        "converged": q.converged,
        "tol": TAIL_REL_TOL,
    })
}

fn ground_results(cfg: &SolverConfig, gs: &GroundStateResult, u0_tol: f64, gamma: f64) -> Value {
    let view = Profile::Ground(gs);
    let n = particle_number(&view, cfg.d).ok();
    let e = if cfg.d.get() > 2.0 {
        energy(&view, cfg.d, gamma).ok()
    } else {
        None
    };
    let mut results = Map::new();
    results.insert("u0_star".into(), with_tol(gs.u0_star, u0_tol));
    results.insert("final_bracket_width".into(), json!(gs.final_bracket_width));
    results.insert("iterations".into(), json!(gs.iterations));
    results.insert(
        "v_infinity".into(),
        json!({ "value": gs.v_infinity, "divergent": gs.v_infinity_divergent, "tol": cfg.rel_tol }),
    );
    results.insert("kappa".into(), with_tol(gs.kappa, cfg.rel_tol));
    results.insert("kappa_ref".into(), json!(gs.kappa_ref));
    results.insert(
        "particle_number".into(),
        n.map_or(Value::Null, |q| quadrature_json(&q)),
    );
    results.insert(
        "energy".into(),
        e.map_or(Value::Null, |er| {
            json!({
                "total": quadrature_json(&er.total),
                "kinetic": er.kinetic,
                "interaction": er.interaction,
                "gamma": gamma,
            })
        }),
    );
    Value::Object(results)
}

fn cmd_shoot(args: &ShootArgs) -> Result<u8, Failure> {
    let cfg = args.common.config()?;
    let u0_tol = resolve_tol(args.tol, 1e-8)?;
    let gs = shoot(&cfg, u0_tol)?;
    let mut config = config_echo(&cfg);
    config["u0_tol"] = json!(u0_tol);
    let results = ground_results(&cfg, &gs, u0_tol, args.gamma);
    let s = summary("shoot", cfg.d.get(), config, results);
    emit(&args.out, &s, Some(&gs.profile))?;
    Ok(0)
}

fn cmd_classify(args: &ClassifyArgs) -> Result<u8, Failure> {
    if !(args.u0 > 0.0 && args.u0.is_finite()) {
        return Err(usage(format!("--u0 must be positive, got {}", args.u0)));
    }
    let cfg = args.common.config()?;
    match classify(args.u0, &cfg)? {
        Classification::Negative { r0 } => println!("N r0={}", fmt(r0)),
        Classification::Positive { r1 } => println!("P r1={}", fmt(r1)),
        Classification::Candidate { solution } => {
            println!("CANDIDATE r_end={}", fmt(solution.r_end()))
        }
    }
    Ok(0)
}

fn cmd_lane_emden(args: &LaneEmdenArgs) -> Result<u8, Failure> {
    let cfg = args.common.config()?;
    // algebraic tails need a long horizon; the full-system default for
    // d > 6 is longer than the reduced solve requires
    let r_max = args.common.rmax.unwrap_or(1e3);
    let p = solve_lane_emden(cfg.d, r_max, cfg.tolerances())?;
    // the reduced profile corresponds to u = w, V = 1 - w
    let states: Vec<RadialState> = p
        .sol
        .steps
        .iter()
        .map(|&(r, [w, dw])| RadialState { r, u: w, du: dw, v: 1.0 - w, dv: -dw })
        .collect();
    let mut config = config_echo(&cfg);
    config["r_max"] = json!(r_max);
    let results = json!({
        "first_zero": p.first_zero.map_or(Value::Null, |z| with_tol(z, cfg.event_tol)),
        "r_end": p.r_end(),
        "u0": 1.0,
    });
    let s = summary("lane-emden", cfg.d.get(), config, results);
    emit(&args.out, &s, Some(&states))?;
    Ok(0)
}

/// Uniform grid over `[0.1, 10]`, cut before the first zero when one exists.
fn milne_grid(first_zero: Option<f64>, n: usize) -> Vec<f64> {
    let hi = match first_zero {
        Some(z) => 10.0_f64.min(0.99 * z),
        None => 10.0,
    };
    let lo = 0.1;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Quadratic Richardson extrapolation to r = 0 from values at r and 2r.
fn extrapolate_origin(f_r: f64, f_2r: f64) -> f64 {
    (4.0 * f_r - f_2r) / 3.0
}

fn cmd_milne(args: &MilneArgs) -> Result<u8, Failure> {
    let cfg = args.common.config()?;
    let r_max = args.common.rmax.unwrap_or(1e3);
    let p = solve_lane_emden(cfg.d, r_max, cfg.tolerances())?;
    let grid = milne_grid(p.first_zero, 99);
    let pts = milne(&p, &grid)?;
    println!("r,y,z,res_y,res_z");
    for pt in &pts {
        println!(
            "{},{},{},{},{}",
            fmt(pt.r),
            fmt(pt.y),
            fmt(pt.z),
            fmt(pt.res_y),
            fmt(pt.res_z)
        );
    }
    let lim = milne(&p, &[0.1, 0.2])?;
    let y0 = extrapolate_origin(lim[0].y, lim[1].y);
    let z0 = extrapolate_origin(lim[0].z, lim[1].z);
    let max_res = pts
        .iter()
        .map(|pt| pt.res_y.abs().max(pt.res_z.abs()))
        .fold(0.0_f64, f64::max);
    let mut config = config_echo(&cfg);
    config["r_max"] = json!(r_max);
    let results = json!({
        "y_limit": y0,
        "z_limit": z0,
        "max_residual": max_res,
        "first_zero": p.first_zero,
    });
    let s = summary("milne", cfg.d.get(), config, results);
    if let Some(base) = &args.out {
        write_text(&with_suffix(base, ".summary.json"), &format!("{s:#}\n"))?;
    }
    Ok(0)
}

fn cmd_transform(args: &TransformArgs) -> Result<u8, Failure> {
    let cfg = args.common.config()?;
    let scaling = PhysicalScaling::new(args.sigma, args.gamma)?;
    let (u0, profile) = match args.u0 {
        Some(u0) => {
            if !(u0 > 0.0 && u0.is_finite()) {
                return Err(usage(format!("--u0 must be positive, got {u0}")));
            }
            let watch = [
                EventKind::UZeroDescending,
                EventKind::DuZeroAscending,
                EventKind::UDecayed,
                EventKind::RMaxReached,
            ];
            let sol = integrate_from_origin(u0, &cfg, &watch)?;
            (u0, sol.profile())
        }
        None => {
            let u0_tol = resolve_tol(args.tol, 1e-8)?;
            let gs = shoot(&cfg, u0_tol)?;
            (gs.u0_star, gs.profile)
        }
    };
    let physical: Vec<RadialState> = profile
        .iter()
        .map(|st| {
            let (x, psi, dpsi, v, dv) = scaling.to_physical(st);
            RadialState { r: x, u: psi, du: dpsi, v, dv }
        })
        .collect();
    // round-trip defects of both changes of variables, relative to the
    // larger of the component magnitude and 1
    let defect = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut scaling_rt = 0.0_f64;
    let mut log_rt = 0.0_f64;
    for st in &profile {
        let (x, psi, dpsi, v, dv) = scaling.to_physical(st);
        let back = scaling.to_universal(x, psi, dpsi, v, dv);
        let lback = from_log_variables(&to_log_variables(st)?);
        for (cand, err) in [(&back, &mut scaling_rt), (&lback, &mut log_rt)] {
            *err = err
                .max(defect(cand.r, st.r))
                .max(defect(cand.u, st.u))
                .max(defect(cand.du, st.du))
                .max(defect(cand.v, st.v))
                .max(defect(cand.dv, st.dv));
        }
    }
    let results = json!({
        "u0": u0,
        "sigma": scaling.sigma,
        "gamma": scaling.gamma,
        "omega": with_tol(scaling.omega, 0.0),
        "amplitude": scaling.amplitude,
        "potential": scaling.potential,
        "scaling_round_trip_error": scaling_rt,
        "log_round_trip_error": log_rt,
    });
    let s = summary("transform", cfg.d.get(), config_echo(&cfg), results);
    emit(&args.out, &s, Some(&physical))?;
    Ok(0)
}

/// Collected assertion lines of a verification suite.
struct Report {
    failed: bool,
}

impl Report {
    fn new() -> Self {
        Report { failed: false }
    }

    /// A bound `measured <= tol`.
    fn bound(&mut self, name: &str, measured: f64, tol: f64) {
        self.assert(name, measured, tol, measured.is_finite() && measured <= tol);
    }

    fn assert(&mut self, name: &str, measured: f64, tol: f64, pass: bool) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{name}: measured={measured:.6e} tol={tol:.1e} {verdict}");
        if !pass {
            self.failed = true;
        }
    }

    fn exit(&self) -> u8 {
        u8::from(self.failed)
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let mut rep = Report::new();
    match &args.check {
        CheckCmd::D6 => verify_d6(&mut rep)?,
        CheckCmd::Hls => verify_hls(&mut rep)?,
        CheckCmd::Lyapunov(f) => verify_lyapunov(&mut rep, f.d)?,
        CheckCmd::Wronskian(f) => verify_wronskian(&mut rep, f.d)?,
        CheckCmd::Milne(f) => verify_milne(&mut rep, f.d)?,
        CheckCmd::Reduction(f) => verify_reduction(&mut rep, f.d)?,
        CheckCmd::Autonomous => verify_autonomous(&mut rep)?,
    }
    Ok(rep.exit())
}

fn verify_d6(rep: &mut Report) -> Result<(), Failure> {
    let cfg = SolverConfig::for_dimension(Dimension::new(6.0)?);
    let gs = shoot(&cfg, 1e-8)?;
    rep.bound("u0_star_minus_one", (gs.u0_star - 1.0).abs(), 1e-6);
    let mut sup = 0.0_f64;
    for i in 0..=2000 {
        let r = 50.0 * i as f64 / 2000.0;
        let u = if r < cfg.r_start {
            gs.u0_star
        } else {
            gs.solution.state_at(r).u
        };
        sup = sup.max((u - exact_d6(r)).abs());
    }
    rep.bound("profile_sup_error_on_0_50", sup, 1e-6);
    Ok(())
}

fn verify_hls(rep: &mut Report) -> Result<(), Failure> {
    let d = 6.0_f64;
    let c6 = 4.0 * (d - 1.0) / (d * d * (d - 2.0).powi(2) * (d - 4.0));
    rep.assert("c6_equals_5_over_288", (c6 - 5.0 / 288.0).abs(), 0.0, c6 == 5.0 / 288.0);
    let ctl = HlsControls::default();
    let base = hls_check(Trial::Optimizer, &ctl)?;
    rep.bound("optimizer_ratio_minus_one", (base.ratio - 1.0).abs(), 1e-3);
    for lam in [0.5, 2.0] {
        let r = hls_check(Trial::Dilated(lam), &ctl)?;
        rep.bound(
            &format!("dilation_invariance_lambda_{lam}"),
            (r.ratio - base.ratio).abs(),
            1e-6,
        );
    }
    let pert = hls_check(Trial::Perturbed(0.1), &ctl)?;
    rep.assert("perturbed_ratio_below_one", pert.ratio, 1.0, pert.ratio < 1.0);
    Ok(())
}

fn verify_lyapunov(rep: &mut Report, d: f64) -> Result<(), Failure> {
    let dim = Dimension::new(d)?;
    let p = solve_lane_emden(dim, 1e3, Tolerances { abs: 1e-10, rel: 1e-10 })?;
    let grid = milne_grid(p.first_zero, 199);
    let samples = lyapunov(&p, &grid);
    // monotonicity over the sampled grid, signed by the dimension
    let mut worst = 0.0_f64;
    for w in samples.windows(2) {
        let inc = w[1].1 - w[0].1;
        let violation = if d < 6.0 { -inc } else { inc };
        worst = worst.max(violation);
    }
    let name = if d < 6.0 {
        "nondecreasing_violation"
    } else {
        "nonincreasing_violation"
    };
    // at the critical dimension L vanishes identically, so increments are
    // integrator noise inside the zero band rather than a true trend
    let slack = if d == 6.0 { 1e-6 } else { 1e-9 };
    rep.bound(name, worst, slack);
    if d == 6.0 {
        let sup = samples.iter().map(|s| s.1.abs()).fold(0.0_f64, f64::max);
        rep.bound("identically_zero_sup", sup, 1e-6);
    }
    // derivative identity by central differences against the closed form
    let h = 1e-3;
    let mut res = 0.0_f64;
    for &r in &grid {
        let pair = lyapunov(&p, &[r - h, r + h]);
        let fd = (pair[1].1 - pair[0].1) / (2.0 * h);
        let exact = lyapunov(&p, &[r])[0].2;
        res = res.max((fd - exact).abs());
    }
    rep.bound("derivative_residual", res, 1e-5);
    Ok(())
}

fn verify_wronskian(rep: &mut Report, d: f64) -> Result<(), Failure> {
    let cfg = SolverConfig::for_dimension(Dimension::new(d)?);
    let pts = wronskian_monotonicity(1.0, 1.2, &cfg)?;
    let min_inc = pts
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::INFINITY, f64::min);
    rep.assert("weighted_wronskian_increments", min_inc, 0.0, min_inc > 0.0);
    // no crossing while both trajectories stay positive
    let watch = [EventKind::UZeroDescending, EventKind::RMaxReached];
    let s1 = integrate_from_origin(1.0, &cfg, &watch)?;
    let mut cfg2 = cfg;
    cfg2.r_max = s1.r_end();
    let s2 = integrate_from_origin(1.2, &cfg2, &watch)?;
    let r_stop = s1.r_end().min(s2.r_end());
    let mut min_gap = f64::INFINITY;
    for i in 0..=400 {
        let r = cfg.r_start + (r_stop - cfg.r_start) * i as f64 / 400.0;
        let u1 = s1.state_at(r).u;
        let u2 = s2.state_at(r).u;
        if u1 <= 0.0 || u2 <= 0.0 {
            break;
        }
        min_gap = min_gap.min(u2 - u1);
    }
    rep.assert("profiles_never_cross", min_gap, 0.0, min_gap > 0.0);
    Ok(())
}

fn verify_milne(rep: &mut Report, d: f64) -> Result<(), Failure> {
    let dim = Dimension::new(d)?;
    let p = solve_lane_emden(dim, 1e3, Tolerances { abs: 1e-10, rel: 1e-10 })?;
    let lim = milne(&p, &[0.1, 0.2])?;
    rep.bound(
        "y_limit",
        extrapolate_origin(lim[0].y, lim[1].y).abs(),
        1e-3,
    );
    rep.bound(
        "z_limit_minus_d",
        (extrapolate_origin(lim[0].z, lim[1].z) - d).abs(),
        1e-3,
    );
    let pts = milne(&p, &milne_grid(p.first_zero, 199))?;
    let res = pts
        .iter()
        .map(|pt| pt.res_y.abs().max(pt.res_z.abs()))
        .fold(0.0_f64, f64::max);
    rep.bound("ode_residual", res, 1e-6);
    Ok(())
}

fn verify_reduction(rep: &mut Report, d: f64) -> Result<(), Failure> {
    let mut cfg = SolverConfig::for_dimension(Dimension::new(d)?);
    cfg.r_max = 100.0;
    let sup = reduction_check(1.0, &cfg)?;
    rep.bound("sup_u_plus_v_minus_one", sup, 1e-8);
    Ok(())
}

fn verify_autonomous(rep: &mut Report) -> Result<(), Failure> {
    let cfg = SolverConfig::for_dimension(Dimension::new(6.0)?);
    let sol = integrate_from_origin(1.0, &cfg, &[EventKind::UDecayed, EventKind::RMaxReached])?;
    let states: Vec<RadialState> = sol
        .profile_geometric(400)
        .into_iter()
        .filter(|s| s.r >= 0.1 && s.r <= 50.0)
        .collect();
    let mut rt = 0.0_f64;
    let mut sup_e = 0.0_f64;
    let mut zero_res = 0.0_f64;
    let mut log_states = Vec::with_capacity(states.len());
    for st in &states {
        let ls = to_log_variables(st)?;
        let back = from_log_variables(&ls);
        for (a, b) in [
            (back.r, st.r),
            (back.u, st.u),
            (back.du, st.du),
            (back.v, st.v),
            (back.dv, st.dv),
        ] {
            rt = rt.max((a - b).abs() / b.abs().max(1.0));
        }
        sup_e = sup_e.max(autonomous_energy(6.0, &ls).abs());
        zero_res = zero_res
            .max((ls.dphi * ls.dphi - 4.0 * ls.phi * ls.phi + 2.0 / 3.0 * ls.phi.powi(3)).abs());
        log_states.push(ls);
    }
    rep.bound("log_round_trip_error", rt, 1e-8);
    rep.bound("conserved_energy_sup", sup_e, 1e-6);
    rep.bound("zero_energy_residual", zero_res, 1e-6);
    let s0 = fit_s0(&log_states)?;
    rep.bound("soliton_center_e2s0_minus_24", ((2.0 * s0).exp() - 24.0).abs(), 1e-4);
    Ok(())
}

/// Parse `--d` for sweep: comma list or `start:stop:step` range.
fn parse_dims(spec: &str) -> Result<Vec<f64>, Failure> {
    let spec = spec.trim();
    let dims: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!("range must be start:stop:step, got {spec:?}")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("bad range {spec:?}: {e}")))?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(usage(format!("need stop >= start and step > 0 in {spec:?}")));
        }
        let n = ((stop - start) / step).round() as usize;
        (0..=n)
            .map(|i| start + step * i as f64)
            .filter(|&d| d <= stop + 1e-12 * step)
            .collect()
    } else {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("bad dimension list {spec:?}: {e}")))?
    };
    if dims.is_empty() {
        return Err(usage("empty dimension list"));
    }
    Ok(dims)
}

struct SweepRow {
    d: f64,
    values: Result<(f64, f64, f64, f64, f64, bool), Error>,
}

fn sweep_row(d: f64, u0_tol: f64, gamma: f64, env_tol: Option<f64>) -> SweepRow {
    let run = || -> Result<_, Error> {
        let dim = Dimension::new(d)?;
        let mut cfg = SolverConfig::for_dimension(dim);
        if let Some(t) = env_tol {
            cfg.abs_tol = t;
            cfg.rel_tol = t;
        }
        let gs = shoot(&cfg, u0_tol)?;
        let view = Profile::Ground(&gs);
        let n = particle_number(&view, dim)?;
        let e_total = if d > 2.0 {
            energy(&view, dim, gamma)?.total.value
        } else {
            f64::NAN
        };
        Ok((gs.u0_star, gs.v_infinity, gs.kappa, n.value, e_total, n.converged))
    };
    SweepRow { d, values: run() }
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, Failure> {
    let dims = parse_dims(&args.d)?;
    let u0_tol = resolve_tol(args.tol, 1e-8)?;
    let env_tol = env_default_tol()?;
    let gamma = args.gamma;
    use rayon::prelude::*;
    let rows: Vec<SweepRow> = dims
        .par_iter()
        .map(|&d| sweep_row(d, u0_tol, gamma, env_tol))
        .collect();
    println!("d,u0_star,v_infinity,kappa,N,E,converged");
    let mut any_ok = false;
    let mut first_err: Option<Error> = None;
    for row in rows {
        match row.values {
            Ok((u0, vinf, kappa, n, e, conv)) => {
                any_ok = true;
                println!(
                    "{},{},{},{},{},{},{}",
                    fmt(row.d),
                    fmt(u0),
                    fmt(vinf),
                    fmt(kappa),
                    fmt(n),
                    fmt(e),
                    conv
                );
            }
            Err(e) => {
                eprintln!("gs: d = {}: {e}", row.d);
                println!(
                    "{},{},{},{},{},{},false",
                    fmt(row.d),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN)
                );
                first_err.get_or_insert(e);
            }
        }
    }
    if any_ok {
        Ok(0)
    } else {
        let e = first_err.expect("nonempty rows");
        Err(Failure::from(e))
    }
}
