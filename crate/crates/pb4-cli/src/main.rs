//! Batch entry point: every experiment as a subcommand with JSON config
//! and CSV/JSON outputs.
//!
//! Exit codes: 0 success, 1 assertion failure (a certificate did not
//! hold), 2 validation error. `PB4_THREADS` caps parallelism. Flags
//! mirror config keys one-to-one and override file values; the infinite
//! area/exponent is the literal string `inf`.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use pb4::curves::{cylinder_to_annulus, nonseparating_pair, pb4_curve_formula, CurvePartition,
    CylinderModel};
use pb4::exponent::Exponent;
use pb4::field::{ScalarField, SymplecticDensity};
use pb4::flexibility::{bump, flex_report};
use pb4::grid::Grid2D;
use pb4::highdim::{decay_curve, HighDimSpec};
use pb4::maps::{invariance_check, AnnulusMap, AreaPreservingMap};
use pb4::optimizer::{certificate, minimize, CertStatus, OptProblem};
use pb4::quadrature::lq_norm;
use pb4::quadrilateral::{
    build_pair, pb4_formula, ratios_decreasing, stokes_defect, verify_lower, verify_upper, Area,
    BoundStatus, GridPolicy, QuadProblem,
};

#[derive(Parser)]
#[command(name = "pb4", version, about = "Poisson bracket invariant experiments")]
struct Cli {
    /// JSON config file; explicit flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form quadrilateral invariant value
    Formula(CommonArgs),
    /// Convergence table of built-pair norms against the closed form
    VerifyUpper(VerifyUpperArgs),
    /// Lower-bound certificate for a built pair
    VerifyLower(VerifyLowerArgs),
    /// Signed/absolute bracket integrals over the region and complement
    Stokes(VerifyLowerArgs),
    /// Commuting-approximant report on two overlapping bumps
    Flex(FlexArgs),
    /// Gradient/field decay table of the vanishing construction
    HighdimDecay(HighdimArgs),
    /// Curve invariant: closed form plus a measured model pair
    Curve(CurveArgs),
    /// Projected gradient descent cross-check
    Optimize(OptimizeArgs),
    /// Bracket-norm invariance under an area-preserving map
    Invariance(InvarianceArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long)]
    q: Option<String>,
}

#[derive(Args, Default)]
struct VerifyUpperArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated decreasing margins
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated outer widths (defaults to B - eps per point)
    #[arg(long)]
    cvals: Option<String>,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Default)]
struct VerifyLowerArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    cval: Option<String>,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Default)]
struct FlexArgs {
    #[arg(long)]
    delta: Option<String>,
    #[arg(long = "eps-cell")]
    eps_cell: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Default)]
struct HighdimArgs {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated decreasing decay exponents
    #[arg(long)]
    alphas: Option<String>,
    /// Tangential extent of the chart box
    #[arg(long = "b-extent")]
    b_extent: Option<String>,
    #[arg(long = "delta-prime")]
    delta_prime: Option<String>,
}

#[derive(Args, Default)]
struct CurveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// formula | separating | nonseparating
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    ca: Option<String>,
    #[arg(long)]
    cb: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// Inner radius of the annulus chart check
    #[arg(long = "chart-eps")]
    chart_eps: Option<String>,
}

#[derive(Args, Default)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    /// warm | random
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Write the objective history CSV here
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args, Default)]
struct InvarianceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// identity | shear | annulus
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    shear: Option<String>,
}

/// A validation failure: printed to stderr, exit code 2.
struct Invalid(String);

impl From<pb4::Error> for Invalid {
    fn from(e: pb4::Error) -> Self {
        Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Invalid {
    fn from(e: std::io::Error) -> Self {
        Invalid(format!("io error: {e}"))
    }
}

/// Parameter map merged from the config file and the command line.
struct Params {
    map: Map<String, Value>,
}

impl Params {
    fn set_opt(&mut self, key: &str, v: &Option<String>) {
        if let Some(v) = v {
            self.map.insert(key.to_string(), Value::String(v.clone()));
        }
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.map.get(key).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    fn required(&self, key: &str) -> Result<String, Invalid> {
        self.raw(key)
            .ok_or_else(|| Invalid(format!("missing required parameter `{key}`")))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T, Invalid>
    where
        T::Err: std::fmt::Display,
    {
        let s = self.required(key)?;
        s.parse()
            .map_err(|e| Invalid(format!("bad value for `{key}`: {e}")))
    }

    fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, Invalid>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|e| Invalid(format!("bad value for `{key}`: {e}"))),
        }
    }

    fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>, Invalid> {
        let Some(s) = self.raw(key) else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for tok in s.trim_matches(|c| c == '[' || c == ']').split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            out.push(
                tok.parse()
                    .map_err(|_| Invalid(format!("bad list entry {tok:?} for `{key}`")))?,
            );
        }
        Ok(Some(out))
    }

    fn area(&self, key: &str) -> Result<Area, Invalid> {
        let s = self.required(key)?;
        Area::from_str(&s).map_err(|e| Invalid(format!("bad `{key}`: {e}")))
    }

    fn exponent(&self, key: &str) -> Result<Exponent, Invalid> {
        let s = self.required(key)?;
        Exponent::from_str(&s).map_err(|e| Invalid(format!("bad `{key}`: {e}")))
    }
}

fn load_params(config: &Option<PathBuf>) -> Result<Params, Invalid> {
    let mut map = Map::new();
    if let Some(path) = config {
        let text = fs::read_to_string(path)
            .map_err(|e| Invalid(format!("cannot read config {}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Invalid(format!("malformed config JSON: {e}")))?;
        match v {
            Value::Object(m) => map = m,
            _ => return Err(Invalid("config must be a JSON object".into())),
        }
    }
    Ok(Params { map })
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Invalid> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Outcome of a subcommand: the payload plus whether every checked
/// certificate held.
struct Outcome {
    content: String,
    certified: bool,
}

fn run_formula(p: &Params) -> Result<Outcome, Invalid> {
    let a = p
        .area("A")?
        .finite_value()
        .ok_or_else(|| Invalid("`A` must be finite".into()))?;
    let b = p.area("B")?;
    let q = p.exponent("q")?;
    let (value, status) = pb4_formula(a, b, q)?;
    let mut content = format!("{value}\n");
    if status == BoundStatus::LowerBoundOnly {
        content = format!("{value} LOWER_BOUND_ONLY\n");
    }
    Ok(Outcome {
        content,
        certified: true,
    })
}

fn run_verify_upper(p: &Params) -> Result<Outcome, Invalid> {
    let a = p
        .area("A")?
        .finite_value()
        .ok_or_else(|| Invalid("`A` must be finite".into()))?;
    let b = p.area("B")?;
    let q = p
        .exponent("q")?
        .finite_value()
        .ok_or_else(|| Invalid("`q` must be finite for measured norms".into()))?;
    let eps = p
        .parse_list("eps")?
        .unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]);
    let cs = match p.parse_list("cvals")? {
        Some(cs) => cs,
        None => {
            let bv = b
                .finite_value()
                .ok_or_else(|| Invalid("`cvals` is required when B = inf".into()))?;
            eps.iter().map(|e| bv - e).collect()
        }
    };
    let n: usize = p.parse_or("grid", 512)?;
    let rows = verify_upper(a, b, q, &eps, &cs, &GridPolicy { n })?;
    let mut csv = String::from("epsilon,C,norm,formula,ratio\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{}", r.eps, r.c, r.norm, r.formula, r.ratio).unwrap();
    }
    Ok(Outcome {
        content: csv,
        certified: ratios_decreasing(&rows),
    })
}

fn build_rectangle_pair(
    p: &Params,
) -> Result<(pb4::quadrilateral::AdmissiblePair, f64, Area, f64), Invalid> {
    let a = p
        .area("A")?
        .finite_value()
        .ok_or_else(|| Invalid("`A` must be finite".into()))?;
    let b = p.area("B")?;
    let q = p
        .exponent("q")
        .unwrap_or(Exponent::Finite(2.0))
        .finite_value()
        .ok_or_else(|| Invalid("`q` must be finite".into()))?;
    let eps: f64 = p.parse_or("eps", 1e-2)?;
    let c: f64 = match (p.raw("cval"), b) {
        (Some(s), _) => s
            .parse()
            .map_err(|_| Invalid(format!("bad `cval`: {s:?}")))?,
        (None, Area::Finite(bv)) => bv - eps.max(1e-3),
        (None, Area::Infinite) => a + 2.0,
    };
    let n: usize = p.parse_or("grid", 512)?;
    let problem = QuadProblem::new(a, b, Exponent::finite(q)?, eps, c)?;
    let grid = GridPolicy { n }.grid_for(c)?;
    let pair = build_pair(&problem, &grid)?;
    Ok((pair, a, b, q))
}

fn run_verify_lower(p: &Params) -> Result<Outcome, Invalid> {
    let (pair, a, b, q) = build_rectangle_pair(p)?;
    let cert = verify_lower(&pair, q, a, b, &SymplecticDensity::uniform())?;
    Ok(Outcome {
        certified: cert.passed,
        content: pretty(&serde_json::to_value(cert).expect("serializable")),
    })
}

fn run_stokes(p: &Params) -> Result<Outcome, Invalid> {
    let (pair, _, _, _) = build_rectangle_pair(p)?;
    let density = SymplecticDensity::uniform();
    let region = stokes_defect(&pair, pair.region(), &density)?;
    let complement = stokes_defect(&pair, &pair.region().complement(), &density)?;
    let ok = (region.signed_integral.abs() - 1.0).abs() <= 0.03
        && (complement.signed_integral.abs() - 1.0).abs() <= 0.03;
    let v = json!({
        "region": region,
        "complement": complement,
        "admissible": pair.is_admissible(),
        "passed": ok,
    });
    Ok(Outcome {
        content: pretty(&v),
        certified: ok,
    })
}

fn run_flex(p: &Params) -> Result<Outcome, Invalid> {
    let delta: f64 = p.parse_or("delta", 0.05)?;
    let eps_cell: f64 = p.parse_or("eps_cell", 0.1)?;
    let q = Exponent::finite(p.parse_or("q", 2.0)?)?;
    let n: usize = p.parse_or("grid", 2560)?;
    let grid = Grid2D::new(0.0, 0.4, 0.0, 0.4, n, n, false, false)?;
    let f = ScalarField::sample(&grid, bump(0.185, 0.2, 0.08))?;
    let g = ScalarField::sample(&grid, bump(0.215, 0.2, 0.08))?;
    let rep = flex_report(&f, &g, delta, eps_cell, q)?;
    let ok = rep.stencil_commute
        && rep.max_bracket == 0.0
        && rep.sup_dist_f <= rep.modulus_f
        && rep.lq_dist_g <= rep.lq_bound_g;
    Ok(Outcome {
        content: pretty(&serde_json::to_value(rep).expect("serializable")),
        certified: ok,
    })
}

fn run_highdim(p: &Params) -> Result<Outcome, Invalid> {
    let n: u32 = p.parse("n")?;
    let d: u32 = p.parse("d")?;
    let q: f64 = p.parse("q")?;
    let b: f64 = p.parse_or("b_extent", 1.0)?;
    let delta_prime: f64 = p.parse_or("delta_prime", 1.0)?;
    let alphas = p
        .parse_list("alphas")?
        .unwrap_or_else(|| vec![1.0, 0.5, 0.25, 0.1]);
    let spec = HighDimSpec::new(n, d, q, b, alphas[0], delta_prime)?;
    let rows = decay_curve(&spec, &alphas)?;
    let mut csv = String::from("alpha,grad_lq_q,field_lq_q\n");
    for r in &rows {
        writeln!(csv, "{},{},{}", r.alpha, r.grad_lq_q, r.field_lq_q).unwrap();
    }
    let decreasing = rows
        .windows(2)
        .all(|w| w[1].grad_lq_q < w[0].grad_lq_q && w[1].field_lq_q < w[0].field_lq_q);
    Ok(Outcome {
        content: csv,
        certified: decreasing,
    })
}

fn run_curve(p: &Params) -> Result<Outcome, Invalid> {
    use std::f64::consts::TAU;
    let mode = p.raw("mode").unwrap_or_else(|| "separating".to_string());
    let q = p.exponent("q")?;
    match mode.as_str() {
        "nonseparating" => {
            let n: usize = p.parse_or("grid", 256)?;
            let torus = Grid2D::new(0.0, 1.0, 0.0, 1.0, n, n, true, true)?;
            let pair = nonseparating_pair(&torus, (0.05, 0.95), [0.2, 0.4, 0.6, 0.8])?;
            let density = SymplecticDensity::uniform();
            let pb = pb4::bracket::poisson_bracket(pair.f(), pair.g(), &density)?;
            let measured = lq_norm(&pb, q, &density)?;
            let ok = measured == 0.0 && pair.is_admissible();
            let v = json!({
                "mode": "nonseparating",
                "q": q,
                "formula": 0.0,
                "measured": measured,
                "certificate": { "bracket_identically_zero": ok },
            });
            Ok(Outcome {
                content: pretty(&v),
                certified: ok,
            })
        }
        "separating" | "formula" => {
            let a = p.area("A")?;
            let b = p.area("B")?;
            let formula = pb4_curve_formula(a, b, q)?;
            let (Some(av), Some(bv)) = (a.finite_value(), b.finite_value()) else {
                let v = json!({
                    "mode": "formula", "A": a, "B": b, "q": q,
                    "formula": formula, "measured": Value::Null,
                });
                return Ok(Outcome {
                    content: pretty(&v),
                    certified: true,
                });
            };
            if mode == "formula" {
                let v = json!({
                    "mode": "formula", "A": a, "B": b, "q": q,
                    "formula": formula, "measured": Value::Null,
                });
                return Ok(Outcome {
                    content: pretty(&v),
                    certified: true,
                });
            }
            let qf = q
                .finite_value()
                .ok_or_else(|| Invalid("measured norms need a finite `q`".into()))?;
            let ca: f64 = p.parse_or("ca", 0.97 * av)?;
            let cb: f64 = p.parse_or("cb", 0.97 * bv)?;
            let n: usize = p.parse_or("grid", 1024)?;
            let model = CylinderModel::new(av, bv)?;
            let grid = model.grid(n, (3 * n) / 2)?;
            let partition = CurvePartition::new([
                0.0,
                0.008 * TAU,
                0.016 * TAU,
                0.996 * TAU,
            ])?;
            let out = pb4::curves::separating_pair(&model, &partition, qf, 2e-4, ca, cb, &grid)?;
            let chart_eps: f64 = p.parse_or("chart_eps", 0.1)?;
            let chart = cylinder_to_annulus(&model, chart_eps)?;
            let certified = out.pair.is_admissible()
                && out.norm >= 0.97 * out.formula_full
                && out.norm <= 1.05 * out.formula_target
                && chart.passed;
            let v = json!({
                "mode": "separating",
                "A": av, "B": bv, "q": q,
                "formula": out.formula_full,
                "formula_at_construction_areas": out.formula_target,
                "measured": out.norm,
                "certificate": {
                    "admissible": out.pair.is_admissible(),
                    "above_lower_bound": out.norm >= 0.97 * out.formula_full,
                    "within_upper_tolerance": out.norm <= 1.05 * out.formula_target,
                    "annulus_chart": chart,
                },
            });
            Ok(Outcome {
                content: pretty(&v),
                certified,
            })
        }
        other => Err(Invalid(format!(
            "unknown curve mode {other:?}: use formula, separating or nonseparating"
        ))),
    }
}

fn run_optimize(p: &Params, history_path: &Option<PathBuf>) -> Result<Outcome, Invalid> {
    let a = p
        .area("A")?
        .finite_value()
        .ok_or_else(|| Invalid("`A` must be finite".into()))?;
    let b = p.area("B")?;
    let q = p
        .exponent("q")?
        .finite_value()
        .ok_or_else(|| Invalid("`q` must be finite (sup-norm descent is out of scope)".into()))?;
    let n: usize = p.parse_or("grid", 256)?;
    let iters: usize = p.parse_or("iters", 400)?;
    let init = p.raw("init").unwrap_or_else(|| "warm".to_string());
    let seed: u64 = p.parse_or("seed", 0)?;
    let c_hint = match b {
        Area::Finite(bv) => bv,
        Area::Infinite => a + 2.5,
    };
    let grid = Grid2D::new(-0.1, c_hint + 0.1, -0.5, 1.5, n, n, false, false)?;
    let problem = OptProblem {
        max_iters: iters,
        ..OptProblem::rectangle(a, b, q, &grid)?
    };
    let start = match init.as_str() {
        "warm" => problem.warm_start(a, b, 0.05)?,
        "random" => problem.random_start(seed)?,
        other => return Err(Invalid(format!("unknown init {other:?}: use warm or random"))),
    };
    let result = minimize(&problem, start)?;
    if let Some(path) = history_path {
        let mut csv = String::from("iter,objective,step\n");
        for h in &result.history {
            writeln!(csv, "{},{},{}", h.iter, h.objective, h.step).unwrap();
        }
        fs::write(path, csv)?;
    }
    let (formula, _) = pb4_formula(a, b, Exponent::finite(q)?)?;
    let cert = certificate(&result, formula);
    let v = json!({
        "A": a, "B": b, "q": q, "grid": n,
        "iterations": result.history.len() - 1,
        "final_objective": result.final_objective,
        "adjusted_norm": result.adjusted_norm(),
        "formula": formula,
        "mu": result.mu,
        "certificate": cert,
    });
    Ok(Outcome {
        content: pretty(&v),
        certified: cert.status == CertStatus::LowerRespected,
    })
}

fn run_invariance(p: &Params) -> Result<Outcome, Invalid> {
    use std::f64::consts::TAU;
    let map_name = p.raw("map").unwrap_or_else(|| "shear".to_string());
    let q = Exponent::finite(p.parse_or("q", 2.0)?)?;
    let n: usize = p.parse_or("grid", 512)?;
    let density = SymplecticDensity::uniform();
    let (report, map_desc) = match map_name.as_str() {
        "identity" | "shear" => {
            let a = p.parse_or("A", 1.0)?;
            let b = p.area("B").unwrap_or(Area::Finite(3.0));
            let bv = b
                .finite_value()
                .ok_or_else(|| Invalid("`B` must be finite for the plane model".into()))?;
            let c = 0.8 * bv + 0.2 * a;
            let problem = QuadProblem::new(a, b, q, 0.1, c)?;
            let grid = Grid2D::new(-0.1, c + 0.1, -0.5, 1.5, n, n, false, false)?;
            let pair = build_pair(&problem, &grid)?;
            let (map, target) = if map_name == "identity" {
                (AreaPreservingMap::Identity, grid)
            } else {
                let k: f64 = p.parse_or("shear", 1.0)?;
                let target = Grid2D::new(
                    -0.1 - k.abs() * 0.5 - 0.5,
                    c + 0.1 + k.abs() * 1.5 + 0.5,
                    -0.5,
                    1.5,
                    n,
                    n,
                    false,
                    false,
                )?;
                (AreaPreservingMap::Shear { k }, target)
            };
            (
                invariance_check(&pair, &map, q, &target, &density, &density)?,
                map_name.clone(),
            )
        }
        "annulus" => {
            let a = p.parse_or("A", 1.0)?;
            let bv: f64 = p.parse_or("B", 2.0)?;
            let model = CylinderModel::new(a, bv)?;
            let grid = model.grid(768, 1024)?;
            let partition =
                CurvePartition::new([0.0, 0.01 * TAU, 0.02 * TAU, 0.995 * TAU])?;
            let out = pb4::curves::separating_pair(
                &model,
                &partition,
                q.finite_value().unwrap_or(2.0),
                1e-3,
                0.9 * a,
                0.9 * bv,
                &grid,
            )?;
            let annulus = AnnulusMap::new(a, bv, 0.05)?;
            let pad = 1.03 * annulus.r_outer();
            let target = Grid2D::new(-pad, pad, -pad, pad, n.max(768), n.max(768), false, false)?;
            (
                invariance_check(
                    &out.pair,
                    &AreaPreservingMap::CylinderToAnnulus(annulus),
                    q,
                    &target,
                    &density,
                    &density,
                )?,
                "annulus".to_string(),
            )
        }
        other => {
            return Err(Invalid(format!(
                "unknown map {other:?}: use identity, shear or annulus"
            )))
        }
    };
    let v = json!({ "map": map_desc, "q": q, "report": report });
    Ok(Outcome {
        content: pretty(&v),
        certified: report.passed,
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome, Invalid> {
    let mut params = load_params(&cli.config)?;
    // Flags override config values key by key.
    let name = match &cli.command {
        Some(Command::Formula(a)) => {
            params.set_opt("A", &a.a);
            params.set_opt("B", &a.b);
            params.set_opt("q", &a.q);
            "formula".to_string()
        }
        Some(Command::VerifyUpper(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("eps", &a.eps);
            params.set_opt("cvals", &a.cvals);
            params.set_opt("grid", &a.grid);
            "verify-upper".to_string()
        }
        Some(Command::VerifyLower(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("eps", &a.eps);
            params.set_opt("cval", &a.cval);
            params.set_opt("grid", &a.grid);
            "verify-lower".to_string()
        }
        Some(Command::Stokes(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("eps", &a.eps);
            params.set_opt("cval", &a.cval);
            params.set_opt("grid", &a.grid);
            "stokes".to_string()
        }
        Some(Command::Flex(a)) => {
            params.set_opt("delta", &a.delta);
            params.set_opt("eps_cell", &a.eps_cell);
            params.set_opt("q", &a.q);
            params.set_opt("grid", &a.grid);
            "flex".to_string()
        }
        Some(Command::HighdimDecay(a)) => {
            params.set_opt("n", &a.n);
            params.set_opt("d", &a.d);
            params.set_opt("q", &a.q);
            params.set_opt("alphas", &a.alphas);
            params.set_opt("b_extent", &a.b_extent);
            params.set_opt("delta_prime", &a.delta_prime);
            "highdim-decay".to_string()
        }
        Some(Command::Curve(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("mode", &a.mode);
            params.set_opt("ca", &a.ca);
            params.set_opt("cb", &a.cb);
            params.set_opt("grid", &a.grid);
            params.set_opt("chart_eps", &a.chart_eps);
            "curve".to_string()
        }
        Some(Command::Optimize(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("grid", &a.grid);
            params.set_opt("iters", &a.iters);
            params.set_opt("init", &a.init);
            params.set_opt("seed", &a.seed);
            "optimize".to_string()
        }
        Some(Command::Invariance(a)) => {
            params.set_opt("A", &a.common.a);
            params.set_opt("B", &a.common.b);
            params.set_opt("q", &a.common.q);
            params.set_opt("map", &a.map);
            params.set_opt("grid", &a.grid);
            params.set_opt("shear", &a.shear);
            "invariance".to_string()
        }
        None => params
            .raw("subcommand")
            .ok_or_else(|| Invalid("no subcommand given (flag or config `subcommand`)".into()))?,
    };
    match name.as_str() {
        "formula" => run_formula(&params),
        "verify-upper" => run_verify_upper(&params),
        "verify-lower" => run_verify_lower(&params),
        "stokes" => run_stokes(&params),
        "flex" => run_flex(&params),
        "highdim-decay" => run_highdim(&params),
        "curve" => run_curve(&params),
        "optimize" => {
            let history = match &cli.command {
                Some(Command::Optimize(a)) => a.history.clone(),
                _ => None,
            };
            run_optimize(&params, &history)
        }
        "invariance" => run_invariance(&params),
        other => Err(Invalid(format!("unknown subcommand {other:?}"))),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("PB4_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(outcome) => {
            if let Err(Invalid(msg)) = emit(&cli.out, &outcome.content) {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            if outcome.certified {
                ExitCode::SUCCESS
            } else {
                eprintln!("certificate check failed (see output)");
                ExitCode::from(1)
            }
        }
        Err(Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
