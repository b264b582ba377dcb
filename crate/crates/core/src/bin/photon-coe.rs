//! Command-line interface: spectra with shooting cross-validation,
//! saturating-state verification, the variance-product sweep, state-file
//! evaluation, the infinite-momentum series and focal-volume bounds.
//!
//! Exit codes: 2 forbidden quantum numbers / invalid inputs, 3 verification
//! failure, 4 optimizer non-convergence, 5 unreadable state file,
//! 6 divergent functional. Data goes to stdout, diagnostics to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use photon_coe::beams::{beam_gamma2, beam_scheme};
use photon_coe::error::Error;
use photon_coe::functionals::{
    expectation_report, focal_volume_report, one_dimensional_product, QuadOrders, QuadratureScheme,
};
use photon_coe::spectra::{gamma_spectrum, shoot_eigenvalue, System};
use photon_coe::states::{gamma_beam, gamma_single, PhotonState};
use photon_coe::variational::{
    exact_zero_momentum_value, figure1_sweep, fit_eval, fit_residual, imf_limit, OptimizerConfig,
};

#[derive(Parser)]
#[command(
    name = "photon-coe",
    about = "Photon uncertainty relations from the center-of-energy operator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunFlags,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Radial quadrature order.
    #[arg(long, global = true)]
    nk: Option<usize>,
    /// Polar quadrature order.
    #[arg(long, global = true)]
    ntheta: Option<usize>,
    /// Azimuthal quadrature order.
    #[arg(long, global = true)]
    nphi: Option<usize>,
    /// Length scale a of built-in states.
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Seeds of the optimizer restarts, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output directory for generated files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optional JSON config file with the same keys (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    nk: Option<usize>,
    ntheta: Option<usize>,
    nphi: Option<usize>,
    a: Option<f64>,
    seed_list: Option<Vec<u64>>,
    format: Option<String>,
    out: Option<PathBuf>,
}

/// Resolved run configuration: flags over config file over defaults.
struct RunConfig {
    orders: QuadOrders,
    a: f64,
    format: Format,
    out: PathBuf,
    optimizer: OptimizerConfig,
}

impl RunConfig {
    fn resolve(flags: &RunFlags) -> Result<Self, String> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| format!("invalid config {}: {e}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let defaults = QuadOrders::default();
        let format = match &flags.format {
            Some(f) => *f,
            None => match file.format.as_deref() {
                Some("json") => Format::Json,
                Some("csv") => Format::Csv,
                Some("table") | None => Format::Table,
                Some(other) => return Err(format!("unknown format {other:?} in config")),
            },
        };
        let mut optimizer = OptimizerConfig::default();
        if let Some(seeds) = flags.seed_list.clone().or(file.seed_list) {
            if seeds.is_empty() {
                return Err("seed list must not be empty".into());
            }
            optimizer.seeds = seeds;
        }
        Ok(Self {
            orders: QuadOrders {
                n_k: flags.nk.or(file.nk).unwrap_or(defaults.n_k),
                n_theta: flags.ntheta.or(file.ntheta).unwrap_or(defaults.n_theta),
                n_phi: flags.nphi.or(file.nphi).unwrap_or(defaults.n_phi),
            },
            a: flags.a.or(file.a).unwrap_or(1.0),
            format,
            out: flags
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(".")),
            optimizer,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum with shooting cross-validation.
    Spectrum {
        /// System: single | beam | imf.
        #[arg(long)]
        system: String,
        /// Largest radial quantum number n.
        #[arg(long)]
        nmax: u32,
        /// Largest angular momentum j.
        #[arg(long)]
        jmax: u32,
        /// Skip the shooting column (closed form only).
        #[arg(long)]
        no_shoot: bool,
    },
    /// Verify the saturating states of one system against the sharp bound.
    VerifySaturators {
        /// System: single | beam.
        #[arg(long, default_value = "single")]
        system: String,
    },
    /// Variance-product sweep over trial orders; writes two CSV files.
    Sweep {
        /// Trial orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6")]
        orders: Vec<usize>,
    },
    /// Evaluate a state-description file.
    Evaluate {
        /// Path to the state JSON.
        state_file: PathBuf,
        /// Functional family: single (default) | beam.
        #[arg(long, default_value = "single")]
        system: String,
        /// Report the one-dimensional product along the axis instead.
        #[arg(long)]
        one_dim: bool,
    },
    /// Minimized shifted-connection series toward the 9/4 limit.
    Imf {
        /// Axis shifts in units 1/a, comma separated, increasing.
        #[arg(long, value_delimiter = ',', default_value = "0,2,4,8,16,32")]
        shifts: Vec<f64>,
    },
    /// Focal-volume bound from dispersions.
    Focal {
        /// Position dispersion ΔR² (units a²).
        #[arg(long, conflicts_with = "beam_saturator")]
        var_r: Option<f64>,
        /// Momentum dispersion ΔP² (units ħ²/a²).
        #[arg(long, conflicts_with = "beam_saturator")]
        var_p: Option<f64>,
        /// γ entering the bound (defaults to the sharp beam value).
        #[arg(long)]
        gamma_bound: Option<f64>,
        /// Take the dispersions from the beam saturator by quadrature.
        #[arg(long)]
        beam_saturator: bool,
    },
}

fn parse_system(name: &str) -> Result<System, String> {
    match name {
        "single" => Ok(System::SinglePhoton),
        "beam" => Ok(System::Beam),
        "imf" => Ok(System::InfiniteMomentum),
        other => Err(format!("unknown system {other:?}; use single | beam | imf")),
    }
}

/// Nine significant digits, locale independent.
fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (8 - exp).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn exit_with(err: Error) -> ExitCode {
    let code = match &err {
        Error::ForbiddenQuantumNumbers(_) | Error::Domain(_) | Error::InvalidOrder(_) => 2,
        Error::NoConvergence { .. } => 4,
        Error::InvalidState(_) | Error::Io(_) | Error::Json(_) | Error::OutOfGrid(_) => 5,
        Error::DivergentState { .. } => 6,
        _ => 1,
    };
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::resolve(&cli.run) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Spectrum {
            system,
            nmax,
            jmax,
            no_shoot,
        } => cmd_spectrum(&config, &system, nmax, jmax, !no_shoot),
        Command::VerifySaturators { system } => cmd_verify_saturators(&config, &system),
        Command::Sweep { orders } => cmd_sweep(&config, &orders),
        Command::Evaluate {
            state_file,
            system,
            one_dim,
        } => cmd_evaluate(&config, &state_file, &system, one_dim),
        Command::Imf { shifts } => cmd_imf(&config, &shifts),
        Command::Focal {
            var_r,
            var_p,
            gamma_bound,
            beam_saturator,
        } => cmd_focal(&config, var_r, var_p, gamma_bound, beam_saturator),
    };
    match result {
        Ok(code) => code,
        Err(err) => exit_with(err),
    }
}

fn cmd_spectrum(
    config: &RunConfig,
    system: &str,
    nmax: u32,
    jmax: u32,
    shoot: bool,
) -> Result<ExitCode, Error> {
    let system = parse_system(system).map_err(Error::Domain)?;
    let j_lo = if system == System::InfiniteMomentum {
        0
    } else {
        1
    };
    if jmax < j_lo {
        return Err(Error::ForbiddenQuantumNumbers(format!(
            "jmax = {jmax} admits no levels for this system (lowest j is {j_lo})"
        )));
    }
    let mut rows = Vec::new();
    for n in 0..=nmax {
        for j in j_lo..=jmax {
            let exact = gamma_spectrum(system, n, j)?;
            let (shot, delta) = if shoot {
                let s = shoot_eigenvalue(system, j, n, None)?;
                (Some(s), Some((s - exact).abs()))
            } else {
                (None, None)
            };
            rows.push((n, j, exact, shot, delta));
        }
    }
    match config.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(n, j, exact, shot, delta)| {
                    serde_json::json!({
                        "system": system.label(), "n": n, "j": j,
                        "gamma": exact, "gamma_shooting": shot, "abs_diff": delta,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&items)?);
        }
        Format::Csv => {
            println!("system,n,j,gamma,gamma_shooting,abs_diff");
            for (n, j, exact, shot, delta) in &rows {
                println!(
                    "{},{n},{j},{},{},{}",
                    system.label(),
                    sig9(*exact),
                    shot.map(sig9).unwrap_or_default(),
                    delta.map(sig9).unwrap_or_default()
                );
            }
        }
        Format::Table => {
            println!(
                "{:<8} {:>3} {:>3} {:>14} {:>14} {:>12}",
                "system", "n", "j", "gamma", "shooting", "|diff|"
            );
            for (n, j, exact, shot, delta) in &rows {
                println!(
                    "{:<8} {:>3} {:>3} {:>14.9} {:>14} {:>12}",
                    system.label(),
                    n,
                    j,
                    exact,
                    shot.map(|s| format!("{s:.9}"))
                        .unwrap_or_else(|| "-".into()),
                    delta
                        .map(|d| format!("{d:.2e}"))
                        .unwrap_or_else(|| "-".into())
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

struct SaturatorRow {
    m: i32,
    norm: f64,
    gamma2: f64,
    gamma2_exact: f64,
    mean_pz: Option<f64>,
    equipartition: Option<f64>,
    pass: bool,
}

fn cmd_verify_saturators(config: &RunConfig, system: &str) -> Result<ExitCode, Error> {
    let system = parse_system(system).map_err(Error::Domain)?;
    let mut rows = Vec::new();
    let mut all_pass = true;
    match system {
        System::SinglePhoton => {
            let exact = gamma_single() * gamma_single();
            for m in [-1, 0, 1] {
                let s = PhotonState::saturator_single(m, config.a)?;
                let scheme = QuadratureScheme::for_state(&s, config.orders, 2)?;
                let rep = expectation_report(&s, &scheme)?;
                let equi = rep.rr / rep.pp;
                let pass = (rep.norm - 1.0).abs() <= 1e-7
                    && (rep.gamma2 - exact).abs() <= 1e-6
                    && (equi - 1.0).abs() <= 1e-8;
                all_pass &= pass;
                rows.push(SaturatorRow {
                    m,
                    norm: rep.norm,
                    gamma2: rep.gamma2,
                    gamma2_exact: exact,
                    mean_pz: Some(rep.mean_p[2]),
                    equipartition: Some(equi),
                    pass,
                });
            }
            // Mean momentum of the circular members against the Γ closed form.
            let pbar = photon_coe::specfun::gamma_fn(gamma_single() + 0.5)?
                / (2.0 * photon_coe::specfun::gamma_fn(gamma_single())?);
            for row in &mut rows {
                if row.m != 0 {
                    let expect = row.m as f64 * pbar;
                    row.pass &= (row.mean_pz.unwrap() - expect).abs() <= 1e-3;
                    all_pass &= row.pass;
                }
            }
        }
        System::Beam => {
            let exact = gamma_beam() * gamma_beam();
            for m in [-1, 0, 1] {
                let s = PhotonState::saturator_beam(m, config.a)?;
                let scheme = beam_scheme(&s, config.orders)?;
                let rep = beam_gamma2(&s, &scheme)?;
                let norm = {
                    let g_scheme = QuadratureScheme::for_state(&s, config.orders, 2)?;
                    expectation_report(&s, &g_scheme)?.norm
                };
                let pass = (norm - 1.0).abs() <= 1e-7 && (rep.gamma2 - exact).abs() <= 1e-6;
                all_pass &= pass;
                rows.push(SaturatorRow {
                    m,
                    norm,
                    gamma2: rep.gamma2,
                    gamma2_exact: exact,
                    mean_pz: None,
                    equipartition: None,
                    pass,
                });
            }
        }
        System::InfiniteMomentum => {
            return Err(Error::Domain(
                "verify-saturators supports single | beam".into(),
            ))
        }
    }
    // Radial/angular residuals of the closed-form ground level.
    let samples: Vec<f64> = (1..=25).map(|i| 0.3 + 0.12 * i as f64).collect();
    let sol = photon_coe::spectra::radial_solution(system, 0, 1)?;
    let radial_res =
        photon_coe::spectra::radial_residual(system, |k| sol.eval(k), sol.gamma, 1, &samples)?;
    let angular_res = photon_coe::spectra::angular_residual(1, 1, 1, system)?;
    all_pass &= radial_res <= 1e-6 && angular_res <= 1e-8;

    match config.format {
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "m": r.m, "norm": r.norm, "gamma2": r.gamma2,
                        "gamma2_exact": r.gamma2_exact, "mean_Pz": r.mean_pz,
                        "equipartition": r.equipartition, "pass": r.pass,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "system": system.label(),
                    "members": items,
                    "radial_residual": radial_res,
                    "angular_residual": angular_res,
                    "pass": all_pass,
                }))?
            );
        }
        _ => {
            println!(
                "{:>3} {:>14} {:>14} {:>14} {:>12} {:>14} {:>6}",
                "m", "norm", "gamma2", "exact", "mean_Pz", "RR/PP", "pass"
            );
            for r in &rows {
                println!(
                    "{:>3} {:>14.9} {:>14.9} {:>14.9} {:>12} {:>14} {:>6}",
                    r.m,
                    r.norm,
                    r.gamma2,
                    r.gamma2_exact,
                    r.mean_pz
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or_else(|| "-".into()),
                    r.equipartition
                        .map(|v| format!("{v:.10}"))
                        .unwrap_or_else(|| "-".into()),
                    if r.pass { "ok" } else { "FAIL" }
                );
            }
            println!("radial residual  {radial_res:.3e}");
            println!("angular residual {angular_res:.3e}");
        }
    }
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed");
        Ok(ExitCode::from(3))
    }
}

fn cmd_sweep(config: &RunConfig, orders: &[usize]) -> Result<ExitCode, Error> {
    let runs = figure1_sweep(orders, config.orders, &config.optimizer)?;
    if runs.iter().any(|r| !r.converged) {
        eprintln!("optimizer failed to converge on at least one order");
        return Err(Error::NoConvergence {
            max_evals: config.optimizer.max_evals,
        });
    }
    std::fs::create_dir_all(&config.out)?;
    let dots_path = config.out.join("sweep_points.csv");
    let fit_path = config.out.join("sweep_fit.csv");

    let mut dots = String::from("order,mean_P2,variance_product,converged\n");
    dots.push_str(&format!(
        "exact,0.0,{},true\n",
        sig9(exact_zero_momentum_value())
    ));
    for r in &runs {
        dots.push_str(&format!(
            "{},{},{},{}\n",
            r.order,
            sig9(r.mean_p2),
            sig9(r.variance_product),
            r.converged
        ));
    }
    std::fs::write(&dots_path, &dots)?;

    let p2_max = runs.last().map(|r| r.mean_p2 * 1.1).unwrap_or(5.0);
    let mut fit = String::from("mean_P2,fit\n");
    for i in 0..200 {
        let p2 = p2_max * i as f64 / 199.0;
        fit.push_str(&format!("{},{}\n", sig9(p2), sig9(fit_eval(p2))));
    }
    std::fs::write(&fit_path, &fit)?;

    let residual = fit_residual(&runs);
    println!("wrote {}", dots_path.display());
    println!("wrote {}", fit_path.display());
    println!("max |point - fit| = {}", sig9(residual));
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(
    config: &RunConfig,
    state_file: &Path,
    system: &str,
    one_dim: bool,
) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(state_file)
        .map_err(|e| Error::InvalidState(format!("{}: {e}", state_file.display())))?;
    let state = PhotonState::from_json(&text)?;
    if one_dim {
        let scheme = QuadratureScheme::for_state(&state, config.orders, 2)?;
        let product = one_dimensional_product(&state, &state.axis_vector(), &scheme)?;
        match config.format {
            Format::Json => println!("{}", serde_json::json!({ "one_dim_product": product })),
            _ => println!("one-dimensional product = {} hbar", sig9(product)),
        }
        return Ok(ExitCode::SUCCESS);
    }
    match parse_system(system).map_err(Error::Domain)? {
        System::Beam => {
            let scheme = beam_scheme(&state, config.orders)?;
            let rep = beam_gamma2(&state, &scheme)?;
            match config.format {
                Format::Table => {
                    println!("gamma2       = {}", sig9(rep.gamma2));
                    println!("kappa_scale  = {}", sig9(rep.kappa_scale));
                    println!("dispersionP  = {}", sig9(rep.dispersion_p));
                    println!("dispersionR  = {}", sig9(rep.dispersion_r));
                    println!("V_f          = {}", sig9(rep.focal.v_f));
                    println!("V_min        = {}", sig9(rep.focal.v_min));
                    println!("satisfied    = {}", rep.focal.satisfied);
                }
                _ => println!("{}", rep.to_json()),
            }
        }
        _ => {
            let scheme = QuadratureScheme::for_state(&state, config.orders, 2)?;
            let rep = expectation_report(&state, &scheme)?;
            match config.format {
                Format::Table => {
                    println!("norm             = {}", sig9(rep.norm));
                    println!(
                        "mean_R           = [{}, {}, {}]",
                        sig9(rep.mean_r[0]),
                        sig9(rep.mean_r[1]),
                        sig9(rep.mean_r[2])
                    );
                    println!("RR               = {}", sig9(rep.rr));
                    println!(
                        "mean_P           = [{}, {}, {}]",
                        sig9(rep.mean_p[0]),
                        sig9(rep.mean_p[1]),
                        sig9(rep.mean_p[2])
                    );
                    println!("PP               = {}", sig9(rep.pp));
                    println!("varR             = {}", sig9(rep.var_r));
                    println!("varP             = {}", sig9(rep.var_p));
                    println!("gamma2           = {}", sig9(rep.gamma2));
                    println!("variance_product = {}", sig9(rep.variance_product));
                }
                _ => println!("{}", rep.to_json()),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_imf(config: &RunConfig, shifts: &[f64]) -> Result<ExitCode, Error> {
    let series = imf_limit(shifts, config.orders, &config.optimizer)?;
    if series.entries.iter().any(|e| !e.converged) || !series.limit_converged {
        return Err(Error::NoConvergence {
            max_evals: config.optimizer.max_evals,
        });
    }
    match config.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&series)?),
        Format::Csv => {
            println!("kshift,gamma2_min,converged");
            for e in &series.entries {
                println!("{},{},{}", sig9(e.kshift), sig9(e.gamma2_min), e.converged);
            }
            if let Some(x) = series.extrapolated {
                println!("extrapolated,{},", sig9(x));
            }
            println!(
                "limit,{},{}",
                sig9(series.limit_value),
                series.limit_converged
            );
        }
        Format::Table => {
            println!("{:>10} {:>16}", "kshift", "min gamma^2");
            for e in &series.entries {
                println!("{:>10.3} {:>16.9}", e.kshift, e.gamma2_min);
            }
            if let Some(x) = series.extrapolated {
                println!("{:>10} {:>16.9}", "extrap", x);
            }
            println!("{:>10} {:>16.9}", "limit", series.limit_value);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_focal(
    config: &RunConfig,
    var_r: Option<f64>,
    var_p: Option<f64>,
    gamma_bound: Option<f64>,
    beam_saturator: bool,
) -> Result<ExitCode, Error> {
    let bound = gamma_bound.unwrap_or_else(gamma_beam);
    let (vr, vp) = if beam_saturator {
        let s = PhotonState::saturator_beam(0, config.a)?;
        let rep = beam_gamma2(&s, &beam_scheme(&s, config.orders)?)?;
        (rep.dispersion_r, rep.dispersion_p)
    } else {
        match (var_r, var_p) {
            (Some(r), Some(p)) => (r, p),
            _ => {
                return Err(Error::Domain(
                    "provide --var-r and --var-p, or --beam-saturator".into(),
                ))
            }
        }
    };
    let rep = focal_volume_report(vr, vp, bound)?;
    match config.format {
        Format::Json => println!(
            "{}",
            serde_json::json!({
                "varR": vr, "varP": vp, "gamma_bound": bound,
                "V_f": rep.v_f, "V_min": rep.v_min, "satisfied": rep.satisfied,
            })
        ),
        _ => {
            println!("varR      = {}", sig9(vr));
            println!("varP      = {}", sig9(vp));
            println!("V_f       = {}", sig9(rep.v_f));
            println!("V_min     = {}", sig9(rep.v_min));
            println!("satisfied = {}", rep.satisfied);
        }
    }
    Ok(ExitCode::SUCCESS)
}
