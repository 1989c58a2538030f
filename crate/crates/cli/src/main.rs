use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cv_entangle::covariance::{build_covariance, invariants, standard_form};
use cv_entangle::criteria::{duan_products, symplectic_measure};
use cv_entangle::formation::{entanglement_of_formation, reduced_spectrum};
use cv_entangle::model::{coeff_a12, make_state, moments, ModelParams};
use cv_entangle::oracle::DEFAULT_POINTS;
use cv_entangle::report::{entanglement_report, LogBase};
use cv_entangle::spectrum::{log_negativity, PtSpectrum};
use cv_entangle::wigner::{wigner_value, PhaseSpacePoint, WignerSpec};

mod numfmt;
mod verify;

const THREADS_VAR: &str = "CV_ENTANGLE_THREADS";

#[derive(Parser)]
#[command(name = "cv-entangle", version, about = "Entanglement measures for a freely evolving Gaussian two-particle state")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All measures at one parameter point (JSON by default).
    Report(ReportArgs),
    /// Measures along a time or width-ratio sweep (CSV by default).
    Sweep(SweepArgs),
    /// Compare the grid oracle against the closed forms; exits 1 on any failed check.
    Verify(VerifyArgs),
    /// Samples of the Wigner function on a coordinate plane (CSV by default).
    Wigner(WignerArgs),
}

#[derive(Args, Clone, Copy)]
struct StateArgs {
    /// Relative-coordinate width.
    #[arg(long, allow_negative_numbers = true)]
    sigma: f64,
    /// Centre-of-mass width.
    #[arg(long, allow_negative_numbers = true)]
    d: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mass: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    hbar: f64,
}

impl StateArgs {
    fn params(&self) -> Result<ModelParams<f64>> {
        Ok(ModelParams::new(self.sigma, self.d, self.mass, self.hbar)?)
    }
}

#[derive(Args, Clone, Copy)]
#[group(multiple = false)]
struct FormatArgs {
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    /// e, 2 or 10.
    #[arg(long, default_value = "e")]
    log_base: LogBase,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepVar {
    #[value(name = "t")]
    T,
    #[value(name = "R")]
    R,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    sweep: SweepVar,
    #[arg(long, allow_negative_numbers = true)]
    min: f64,
    #[arg(long, allow_negative_numbers = true)]
    max: f64,
    #[arg(long)]
    steps: usize,
    /// Evolution time for R-sweeps.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, default_value = "e")]
    log_base: LogBase,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    grid_points: usize,
    /// Grid halfwidth; defaults to six of the widest marginal widths.
    #[arg(long, allow_negative_numbers = true)]
    halfwidth: Option<f64>,
    /// `sigma=..,d=..[,mass=..][,hbar=..]` blocks separated by `;`.
    #[arg(long, default_value = verify::DEFAULT_CASES)]
    cases: String,
    #[arg(long)]
    allow_coverage_warning: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Plane {
    Q1q2,
    Q1p1,
    P1p2,
}

#[derive(Args)]
struct WignerArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    plane: Plane,
    /// Samples per axis.
    #[arg(long, default_value_t = 41)]
    n: usize,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    max: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    q1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    q2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p2: f64,
    /// Sample the partial transpose on particle 2.
    #[arg(long)]
    transposed: bool,
    #[command(flatten)]
    format: FormatArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let mut out = String::new();
    // Ok(false): verification ran and failed (exit 1); Err: bad input (exit 2).
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Report(a) => report(&a, &mut out).map(|()| true),
        Command::Sweep(a) => sweep(&a, &mut out).map(|()| true),
        Command::Verify(a) => verify(&a, &mut out),
        Command::Wigner(a) => wigner(&a, &mut out).map(|()| true),
    });
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw.trim().parse().with_context(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        bail!("{THREADS_VAR} must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn json_line<T: Serialize>(value: &T, out: &mut String) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    numfmt::round_json(&mut v);
    out.push_str(&serde_json::to_string_pretty(&v)?);
    out.push('\n');
    Ok(())
}

fn csv_row(fields: &[String], out: &mut String) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn report(a: &ReportArgs, out: &mut String) -> Result<()> {
    let r = entanglement_report(&a.state.params()?, a.t, a.log_base)?;
    if !a.format.csv {
        return json_line(&r, out);
    }
    let f = numfmt::format;
    let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), f);
    let bit = |b: bool| b.to_string();
    csv_row(
        &[
            "sigma", "d", "mass", "hbar", "t", "R", "duan_plus_lhs", "duan_plus_rhs", "duan_plus_satisfied",
            "duan_minus_lhs", "duan_minus_rhs", "duan_minus_satisfied", "t_d", "E_symplectic", "E_N", "E_F", "N",
            "E_N_minus_E_symplectic", "log_base",
        ]
        .map(String::from),
        out,
    );
    let base = serde_json::to_value(r.log_base)?.as_str().unwrap_or_default().to_string();
    csv_row(
        &[
            f(r.sigma),
            f(r.d),
            f(r.mass),
            f(r.hbar),
            f(r.t),
            f(r.R),
            f(r.duan_plus.lhs),
            f(r.duan_plus.rhs),
            bit(r.duan_plus.satisfied),
            f(r.duan_minus.lhs),
            f(r.duan_minus.rhs),
            bit(r.duan_minus.satisfied),
            opt(r.t_d),
            f(r.E_symplectic),
            f(r.E_N),
            f(r.E_F),
            f(r.N),
            f(r.E_N_minus_E_symplectic),
            base,
        ],
        out,
    );
    Ok(())
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SweepRow {
    abscissa: f64,
    duan_minus_lhs: f64,
    duan_minus_rhs: f64,
    E_N: f64,
    E_sympl: f64,
    E_F: f64,
    a12_t: f64,
}

fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    let h = (max - min) / (steps - 1) as f64;
    (0..steps).map(|i| if i == steps - 1 { max } else { min + i as f64 * h }).collect()
}

fn sweep_row(params: &ModelParams<f64>, t: f64, abscissa: f64, base: LogBase) -> Result<SweepRow> {
    let state = make_state(*params, t)?;
    let mom = moments(&state);
    let (_, minus) = duan_products(&mom, params.hbar);
    let cov = build_covariance(&mom, params.sigma, params.hbar)?;
    let sympl = symplectic_measure(&standard_form(&cov)?, &invariants(&cov))?;
    let spec = PtSpectrum::from_params(params)?;
    Ok(SweepRow {
        abscissa,
        duan_minus_lhs: minus.lhs,
        duan_minus_rhs: minus.rhs,
        E_N: base.convert(log_negativity(&spec)),
        E_sympl: base.convert(sympl.entanglement),
        E_F: base.convert(entanglement_of_formation(&reduced_spectrum(&spec))),
        a12_t: coeff_a12(&state),
    })
}

fn sweep(a: &SweepArgs, out: &mut String) -> Result<()> {
    if a.min.partial_cmp(&a.max) != Some(std::cmp::Ordering::Less) {
        bail!("--min must be below --max");
    }
    if a.steps == 0 {
        bail!("--steps must be positive");
    }
    let base_params = a.state.params()?;
    let rows = linspace(a.min, a.max, a.steps)
        .into_iter()
        .map(|x| match a.sweep {
            SweepVar::T => sweep_row(&base_params, x, x, a.log_base),
            SweepVar::R => {
                let params = ModelParams { d: x * base_params.sigma / 2.0, ..base_params };
                params.validate()?;
                sweep_row(&params, a.t, x, a.log_base)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if a.format.json {
        return json_line(&rows, out);
    }
    csv_row(&["abscissa", "duan_minus_lhs", "duan_minus_rhs", "E_N", "E_sympl", "E_F", "a12_t"].map(String::from), out);
    for r in &rows {
        let f = numfmt::format;
        csv_row(&[f(r.abscissa), f(r.duan_minus_lhs), f(r.duan_minus_rhs), f(r.E_N), f(r.E_sympl), f(r.E_F), f(r.a12_t)], out);
    }
    Ok(())
}

fn verify(a: &VerifyArgs, out: &mut String) -> Result<bool> {
    let cases = verify::parse_cases(&a.cases)?;
    let settings = verify::Settings {
        grid_points: a.grid_points,
        halfwidth: a.halfwidth,
        allow_coverage_warning: a.allow_coverage_warning,
    };
    let summary = verify::run(&cases, settings)?;
    json_line(&summary, out)?;
    Ok(summary.passed)
}

#[derive(Serialize)]
struct Sample {
    u: f64,
    v: f64,
    value: f64,
}

fn wigner(a: &WignerArgs, out: &mut String) -> Result<()> {
    if a.min.partial_cmp(&a.max) != Some(std::cmp::Ordering::Less) {
        bail!("--min must be below --max");
    }
    if a.n == 0 {
        bail!("--n must be positive");
    }
    let spec = WignerSpec::from_params(&a.state.params()?, a.transposed)?;
    let axis = linspace(a.min, a.max, a.n);
    let mut samples = Vec::with_capacity(a.n * a.n);
    for &u in &axis {
        for &v in &axis {
            let mut pt = PhaseSpacePoint::new(a.q1, a.p1, a.q2, a.p2);
            match a.plane {
                Plane::Q1q2 => (pt.q1, pt.q2) = (u, v),
                Plane::Q1p1 => (pt.q1, pt.p1) = (u, v),
                Plane::P1p2 => (pt.p1, pt.p2) = (u, v),
            }
            samples.push(Sample { u, v, value: wigner_value(&spec, &pt) });
        }
    }
    if a.format.json {
        return json_line(&samples, out);
    }
    csv_row(&["u", "v", "value"].map(String::from), out);
    for s in &samples {
        csv_row(&[numfmt::format(s.u), numfmt::format(s.v), numfmt::format(s.value)], out);
    }
    Ok(())
}
