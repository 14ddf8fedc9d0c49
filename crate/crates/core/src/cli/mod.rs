//! Command-line front end.
//!
//! Every subcommand reads an optional `--config FILE` and then applies
//! same-named flags (`--fiber.radius_nm 150`). CSV goes to `output` (or
//! standard output), diagnostics to standard error. Exit codes: 0 success,
//! 1 configuration error, 2 numerical failure.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Arg, ArgAction, ArgMatches, Command};

use crate::coupling::{
    coupling_magnitudes, guided_stokes, linear_latitude_error, poincare_map, stokes_vs_theta, theta_circ,
    DipolePose,
};
use crate::error::{Error, Result};
use crate::mode::{solve_he11, ModeSolution, SINGLE_MODE_CUTOFF};
use crate::polarimetry::{compensate, ellipse_from_stokes, random_fiber_unitary, CompensationMode};
use crate::scatterer::{fit_malus, malus_power, noisy_malus_samples, NanorodModel};

pub use config::{parse_config_text, Grid, RunConfig, KEYS};

const SIG_DIGITS: usize = 9;

/// Format `x` with 9 significant digits in positional notation.
///
/// Magnitudes below `1e-12` print as zero, which keeps rounding noise out of
/// golden files.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-12 {
        return format!("{:.*}", SIG_DIGITS - 1, 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding may carry into a new leading digit (9.9999999996 → 10.00000000).
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|c| *c == '0' || *c == '.')
        .filter(|c| *c == '0')
        .count();
    if digits - leading_zeros > SIG_DIGITS && decimals > 0 {
        let d = decimals - 1;
        format!("{x:.d$}")
    } else {
        s
    }
}

fn csv_line(fields: &[f64]) -> String {
    let mut line = fields.iter().map(|v| format_sig(*v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

fn build_command() -> Command {
    let with_keys = |cmd: Command| -> Command {
        let mut cmd = cmd.arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("configuration file of 'section.key = value' lines"),
        );
        for (key, default, help) in KEYS {
            let help = if default.is_empty() {
                help.to_string()
            } else {
                format!("{help} [default: {default}]")
            };
            cmd = cmd.arg(
                Arg::new(*key)
                    .long(*key)
                    .value_name("VALUE")
                    .allow_negative_numbers(true)
                    .help(help),
            );
        }
        cmd
    };

    Command::new("fibrepol")
        .about("Polarization of light launched by a surface dipole into a nanofibre HE11 mode")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(with_keys(Command::new("mode").about("solve the HE11 mode and print its parameters")))
        .subcommand(with_keys(
            Command::new("sweep-theta").about("guided Stokes parameters versus dipole tilt (CSV)"),
        ))
        .subcommand(with_keys(
            Command::new("sweep-alpha").about("ellipse orientation versus dipole azimuth (CSV)"),
        ))
        .subcommand(with_keys(
            Command::new("theta-circ").about("tilt producing circular guided polarization"),
        ))
        .subcommand(with_keys(
            Command::new("malus")
                .about("scattered power versus beam polarization angle (CSV)")
                .arg(
                    Arg::new("fit")
                        .long("fit")
                        .action(ArgAction::SetTrue)
                        .help("fit a Malus law and report the fitted chi_max"),
                ),
        ))
        .subcommand(with_keys(
            Command::new("compensate").about("undo a random fibre birefringence with a compensator"),
        ))
        .subcommand(with_keys(
            Command::new("poincare").about("Poincare-sphere coordinates over an (alpha, theta) grid (CSV)"),
        ))
}

fn load_config(matches: &ArgMatches) -> Result<RunConfig> {
    let mut pairs = match matches.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
            parse_config_text(&text)?
        }
        None => Vec::new(),
    };
    for (key, _, _) in KEYS {
        if let Some(v) = matches.get_one::<String>(key) {
            pairs.push((key.to_string(), v.clone()));
        }
    }
    RunConfig::from_pairs(&pairs)
}

fn solve(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<ModeSolution> {
    let mode = solve_he11(&cfg.fiber)?;
    if !mode.single_mode {
        let _ = writeln!(
            stderr,
            "warning: V = {:.4} >= {SINGLE_MODE_CUTOFF:.3}; the fibre is not single-mode",
            mode.v_number
        );
    }
    Ok(mode)
}

/// Primary output of a subcommand plus an optional summary line.
struct Produced {
    body: String,
    summary: Option<String>,
}

fn cmd_mode(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Produced> {
    let m = solve(cfg, stderr)?;
    let mut out = String::new();
    let _ = writeln!(out, "beta_rad_per_nm = {}", format_sig(m.beta));
    let _ = writeln!(out, "n_eff = {}", format_sig(m.effective_index()));
    let _ = writeln!(out, "h_rad_per_nm = {}", format_sig(m.h));
    let _ = writeln!(out, "q_rad_per_nm = {}", format_sig(m.q));
    let _ = writeln!(out, "s = {}", format_sig(m.s));
    let _ = writeln!(out, "V = {}", format_sig(m.v_number));
    let _ = writeln!(out, "single_mode = {}", m.single_mode);
    Ok(Produced { body: out, summary: None })
}

fn cmd_sweep_theta(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Produced> {
    let mode = solve(cfg, stderr)?;
    let rows = stokes_vs_theta(&mode, cfg.alpha_deg, &cfg.theta_grid.values(), cfg.gap_nm, cfg.direction)?;
    let mut out = String::from("theta_deg,S1,S2,S3,psi_deg,ellipticity_deg\n");
    for r in rows {
        out.push_str(&csv_line(&[r.theta_deg, r.s1, r.s2, r.s3, r.psi_deg, r.ellipticity_deg]));
    }
    Ok(Produced { body: out, summary: None })
}

fn cmd_sweep_alpha(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Produced> {
    let mode = solve(cfg, stderr)?;
    let mut out = String::from("alpha_deg,psi_deg,S3\n");
    for alpha in cfg.alpha_grid.values() {
        let pose = DipolePose::new(alpha, cfg.theta_deg, cfg.gap_nm)?;
        let s = guided_stokes(&mode, &pose, cfg.direction);
        let e = ellipse_from_stokes(&s)?;
        out.push_str(&csv_line(&[alpha, e.psi_or_zero(), s.s3 / s.s0]));
    }
    Ok(Produced { body: out, summary: None })
}

fn cmd_theta_circ(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Produced> {
    let mode = solve(cfg, stderr)?;
    let (c, d) = coupling_magnitudes(&mode, cfg.fiber.radius_nm + cfg.gap_nm);
    let tc = theta_circ(&mode, cfg.gap_nm);
    let (theta_at, err) = linear_latitude_error(tc, 2001);
    let mut out = String::new();
    let _ = writeln!(out, "theta_circ_deg = {tc:.4}");
    let _ = writeln!(out, "C = {}", format_sig(c));
    let _ = writeln!(out, "D = {}", format_sig(d));
    let _ = writeln!(out, "D_over_C = {}", format_sig(d / c));
    let _ = writeln!(
        out,
        "max_linear_latitude_error_deg = {} at theta_deg = {}",
        format_sig(err),
        format_sig(theta_at)
    );
    Ok(Produced { body: out, summary: None })
}

fn cmd_malus(cfg: &RunConfig, fit: bool) -> Result<Produced> {
    let rod = NanorodModel::with_ratio(cfg.alpha_ratio, cfg.pose())?;
    let chis: Vec<f64> = cfg.chi_grid.values().iter().map(|c| c + cfg.chi_max_deg).collect();
    let samples = if cfg.noise > 0.0 {
        noisy_malus_samples(&rod, cfg.chi_max_deg, &chis, cfg.noise, cfg.seed)?
    } else {
        malus_power(&rod, cfg.chi_max_deg, &chis)
    };
    let mut out = String::from("chi_deg,power_normalized\n");
    for (chi, p) in &samples {
        out.push_str(&csv_line(&[*chi, *p]));
    }
    let summary = if fit {
        let f = fit_malus(&samples)?;
        let mut s = format!("chi_max_fit = {}", format_sig(f.chi_max_deg));
        if !f.orientation_defined {
            s.push_str(" (no modulation; orientation undefined)");
        }
        s.push('\n');
        Some(s)
    } else {
        None
    };
    Ok(Produced { body: out, summary })
}

fn cmd_compensate(cfg: &RunConfig) -> Result<Produced> {
    let mut out = String::new();
    let mut residuals = Vec::new();
    for seed in cfg.seed..cfg.seed + cfg.trials {
        let m = random_fiber_unitary(seed);
        let r = compensate(&m, cfg.compensation);
        let st = r.setting;
        let _ = write!(
            out,
            "seed = {seed}\nmode = {}\ndelta_rad = {}\nrho_deg = {}\n",
            cfg.compensation,
            format_sig(st.retardance_delta),
            format_sig(st.axis_rho_deg)
        );
        if cfg.compensation == CompensationMode::Full {
            let _ = write!(
                out,
                "pre_rotation_deg = {}\npost_rotation_deg = {}\n",
                format_sig(st.pre_rotation_deg.unwrap_or(0.0)),
                format_sig(st.post_rotation_deg.unwrap_or(0.0))
            );
        }
        let _ = writeln!(out, "residual_infidelity = {:.3e}", r.residual_infidelity);
        residuals.push(r.residual_infidelity);
    }
    if residuals.len() > 1 {
        residuals.sort_by(f64::total_cmp);
        let n = residuals.len();
        let _ = writeln!(
            out,
            "trials = {n}\nresidual_min = {:.3e}\nresidual_median = {:.3e}\nresidual_max = {:.3e}",
            residuals[0],
            residuals[n / 2],
            residuals[n - 1]
        );
    }
    Ok(Produced { body: out, summary: None })
}

fn cmd_poincare(cfg: &RunConfig, stderr: &mut dyn Write) -> Result<Produced> {
    let mode = solve(cfg, stderr)?;
    let mut out = String::from("alpha_deg,theta_deg,longitude_deg,latitude_deg\n");
    let thetas = cfg.theta_grid.values();
    for alpha in cfg.alpha_grid.values() {
        for &theta in &thetas {
            let p = poincare_map(alpha, theta, &mode, cfg.gap_nm)?;
            out.push_str(&csv_line(&[alpha, theta, p.longitude_deg, p.latitude_deg]));
        }
    }
    Ok(Produced { body: out, summary: None })
}

fn dispatch(matches: &ArgMatches, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let (name, sub) = matches
        .subcommand()
        .ok_or_else(|| Error::Config("missing subcommand".into()))?;
    let cfg = load_config(sub)?;
    let produced = match name {
        "mode" => cmd_mode(&cfg, stderr)?,
        "sweep-theta" => cmd_sweep_theta(&cfg, stderr)?,
        "sweep-alpha" => cmd_sweep_alpha(&cfg, stderr)?,
        "theta-circ" => cmd_theta_circ(&cfg, stderr)?,
        "malus" => cmd_malus(&cfg, sub.get_flag("fit"))?,
        "compensate" => cmd_compensate(&cfg)?,
        "poincare" => cmd_poincare(&cfg, stderr)?,
        other => return Err(Error::Config(format!("unknown subcommand {other}"))),
    };

    let io_err = |e: std::io::Error| Error::Config(format!("cannot write output: {e}"));
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, produced.body.as_bytes()).map_err(io_err)?;
            if let Some(s) = produced.summary {
                stdout.write_all(s.as_bytes()).map_err(io_err)?;
            }
        }
        None => {
            stdout.write_all(produced.body.as_bytes()).map_err(io_err)?;
            // Keep standard output pure CSV; the fit summary goes alongside.
            if let Some(s) = produced.summary {
                stderr.write_all(s.as_bytes()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

/// Run the CLI with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match build_command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    match dispatch(&matches, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(43.2322804), "43.2322804");
        assert_eq!(format_sig(-0.5), "-0.500000000");
        assert_eq!(format_sig(1.0), "1.00000000");
        assert_eq!(format_sig(0.000123456789123), "0.000123456789");
        assert_eq!(format_sig(123456789012.0), "123456789012");
        assert_eq!(format_sig(9.9999999996), "10.0000000");
        assert_eq!(format_sig(1e-17), "0.00000000");
        assert_eq!(format_sig(-1e-17), "0.00000000");
    }

    #[test]
    fn csv_line_is_comma_separated_lf() {
        assert_eq!(csv_line(&[1.0, -2.5]), "1.00000000,-2.50000000\n");
    }

    #[test]
    fn command_definition_is_consistent() {
        build_command().debug_assert();
    }
}
