//! Command-line laboratory: black-hole reference data, graph embeddings,
//! inverse mean curvature flow runs, verification suites, and mass
//! certificates.
//!
//! Exit codes: 0 all checks pass, 1 a verified property is violated,
//! 2 usage or configuration error, 3 numerical failure.

mod config;

use clap::{Parser, Subcommand};
use imcflab::error::Error;
use imcflab::flow::run;
use imcflab::functionals::{fit_t_exp_decay, InequalityReport, REPORT_CSV_HEADER};
use imcflab::kottler::{
    boundary_mass, critical_mass, embedding_profile, horizon_radius, mass_from_area,
    scalar_curvature, KottlerParams,
};
use imcflab::mass::{
    flux_mass_at, flux_mass_extrapolated, graph_mass_formula, parse_profile_csv,
    penrose_certificate, KottlerProfile, RadialProfile, SampledProfile,
};
use imcflab::verify::{run_suite, Suite};
use imcflab::{AmbientModel, Epsilon};
use std::fs;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "imcflab",
    about = "Inverse mean curvature flow and mass bounds in locally hyperbolic warped products",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print black-hole reference data and check its built-in identities.
    Kottler {
        #[arg(long)]
        n: usize,
        /// Cross-section curvature sign: 0 or -1.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: i32,
        #[arg(long)]
        mass: f64,
        /// Cross-section area (required for epsilon = -1 unless genus is given).
        #[arg(long, conflicts_with = "genus")]
        theta: Option<f64>,
        /// Genus label (n = 3 only); sets the cross-section area.
        #[arg(long)]
        genus: Option<u32>,
    },
    /// Integrate the isometric graph embedding and emit its r,u,dudr table.
    Embed {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: i32,
        #[arg(long)]
        mass: f64,
        #[arg(long, default_value_t = 50.0)]
        r_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, conflicts_with = "genus")]
        theta: Option<f64>,
        #[arg(long)]
        genus: Option<u32>,
    },
    /// Run the inverse mean curvature flow described by a config file.
    Flow {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification suite: slices, geometry, monotonicity,
    /// asymptotics, mass, or all.
    Verify {
        #[arg(long)]
        suite: String,
        /// Also write every report row as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compute the mass of a radial geometry and certify the area bound.
    Mass {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        epsilon: i32,
        /// Mass parameter of the analytic black-hole profile.
        #[arg(long, conflicts_with_all = ["profile", "graph"])]
        mass: Option<f64>,
        /// CSV profile with header `r,psi2`.
        #[arg(long, conflicts_with = "graph")]
        profile: Option<PathBuf>,
        /// CSV embedding table with header `r,u,dudr`.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        genus: Option<u32>,
        /// Write flux values versus radius as CSV to this path.
        #[arg(long)]
        flux_out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Kottler {
            n,
            epsilon,
            mass,
            theta,
            genus,
        } => cmd_kottler(n, epsilon, mass, theta, genus),
        Command::Embed {
            n,
            epsilon,
            mass,
            r_max,
            step,
            out,
            theta,
            genus,
        } => cmd_embed(n, epsilon, mass, r_max, step, out, theta, genus),
        Command::Flow { config } => cmd_flow(&config),
        Command::Verify { suite, csv } => cmd_verify(&suite, csv),
        Command::Mass {
            n,
            epsilon,
            mass,
            profile,
            graph,
            theta,
            genus,
            flux_out,
        } => cmd_mass(n, epsilon, mass, profile, graph, theta, genus, flux_out),
    };
    std::process::exit(code);
}

/// Map library errors onto the exit-code contract.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::InvalidParameter(_) | Error::InsufficientTrace(_) => 2,
        Error::NonMeanConvex { .. }
        | Error::NumericalOverflow { .. }
        | Error::LinearizationRange { .. } => 3,
    }
}

fn usage_err(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn build_ambient(n: usize, epsilon: i32, theta: Option<f64>, genus: Option<u32>) -> Result<AmbientModel, Error> {
    let eps = Epsilon::from_i32(epsilon)?;
    match (theta, genus) {
        (Some(_), Some(_)) => Err(Error::InvalidParameter(
            "theta and genus are mutually exclusive".into(),
        )),
        (None, Some(g)) => {
            let amb = AmbientModel::from_genus(g)?;
            if amb.n() != n || amb.epsilon() != eps {
                return Err(Error::InvalidParameter(format!(
                    "genus {g} implies n = 3, epsilon = {}",
                    amb.epsilon().as_i32()
                )));
            }
            Ok(amb)
        }
        (Some(th), None) => AmbientModel::new(n, eps, th, None),
        (None, None) => match eps {
            Epsilon::Flat => AmbientModel::flat_torus(n),
            Epsilon::Hyperbolic => Err(Error::InvalidParameter(
                "epsilon = -1 needs --theta or --genus".into(),
            )),
        },
    }
}

fn cmd_kottler(n: usize, epsilon: i32, mass: f64, theta: Option<f64>, genus: Option<u32>) -> i32 {
    let ambient = match build_ambient(n, epsilon, theta, genus) {
        Ok(a) => a,
        Err(e) => return usage_err(e),
    };
    if !(mass > 0.0) {
        return usage_err("--mass must be positive for horizon data");
    }
    let params = KottlerParams::new(ambient.clone(), mass);
    let r_h = match horizon_radius(&params) {
        Ok(r) => r,
        Err(e) => return usage_err(e),
    };
    let area = ambient.theta() * r_h.powi(n as i32 - 1);
    println!("n              {n}");
    println!("epsilon        {epsilon}");
    println!("mass           {mass}");
    println!("horizon r_h    {r_h}");
    println!("horizon area   {area}");
    println!("critical mass  {}", critical_mass(n));

    let mut ok = true;
    let round = mass_from_area(area, &ambient).unwrap_or(f64::NAN);
    let pass = (round - mass).abs() <= 1e-10 * mass.max(1.0);
    ok &= pass;
    println!(
        "mass from area {round}   [{}]",
        if pass { "ok" } else { "MISMATCH" }
    );

    match boundary_mass(&params) {
        Ok(bm) => {
            let pass = (bm - mass).abs() <= 1e-10 * mass.max(1.0);
            ok &= pass;
            println!(
                "boundary mass  {bm}   [{}]",
                if pass { "ok" } else { "MISMATCH" }
            );
        }
        Err(e) => return usage_err(e),
    }

    let expect = -(n as f64) * (n as f64 - 1.0);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let r = r_h * (1.0 + 0.3 * k as f64) + 0.1;
        match scalar_curvature(r, &params) {
            Ok(rc) => worst = worst.max((rc - expect).abs()),
            Err(e) => return usage_err(e),
        }
    }
    let pass = worst <= 1e-10;
    ok &= pass;
    println!(
        "scalar curv    {expect} (max dev {worst:.3e})   [{}]",
        if pass { "ok" } else { "MISMATCH" }
    );

    if ok {
        0
    } else {
        1
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    n: usize,
    epsilon: i32,
    mass: f64,
    r_max: f64,
    step: f64,
    out: Option<PathBuf>,
    theta: Option<f64>,
    genus: Option<u32>,
) -> i32 {
    let ambient = match build_ambient(n, epsilon, theta, genus) {
        Ok(a) => a,
        Err(e) => return usage_err(e),
    };
    let params = KottlerParams::new(ambient, mass);
    let profile = match embedding_profile(&params, r_max, step) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let result = match out {
        Some(path) => fs::File::create(&path)
            .and_then(|mut f| profile.write_csv(&mut f))
            .map(|_| eprintln!("wrote {} rows to {}", profile.rows.len(), path.display())),
        None => profile.write_csv(std::io::stdout().lock()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => usage_err(e),
    }
}

fn cmd_flow(path: &PathBuf) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage_err(format!("{}: {e}", path.display())),
    };
    let cfg = match config::parse(&text) {
        Ok(c) => c,
        Err(e) => return usage_err(e),
    };
    let state = match cfg.build_state() {
        Ok(s) => s,
        Err(e) => return usage_err(e),
    };
    let mut trace = match run(&state, &cfg.solver) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    trace.meta.config_comment = cfg.resolved.clone();

    let result = match &cfg.trace_path {
        Some(p) => fs::File::create(p).and_then(|mut f| trace.write_csv(&mut f)),
        None => trace.write_csv(std::io::stdout().lock()),
    };
    if let Err(e) = result {
        return usage_err(e);
    }

    let last = trace.last();
    println!("records        {}", trace.records.len());
    println!("final t        {}", last.t);
    println!("final L        {}", last.l);
    println!("final deficit  {}", last.af_deficit);
    let n = trace.meta.n as f64;
    let tail: Vec<&imcflab::flow::TraceRecord> = trace
        .records
        .iter()
        .filter(|r| r.t >= 0.5 * last.t)
        .collect();
    let ts: Vec<f64> = tail.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = tail.iter().map(|r| (r.max_h - (n - 1.0)).abs()).collect();
    match fit_t_exp_decay(&ts, &ys) {
        Some((beta, _, r2)) => println!("H-decay fit    beta={beta:.4} (R2={r2:.4})"),
        None => println!("H-decay fit    n/a (tail at rounding floor)"),
    }
    0
}

fn print_reports(reports: &[InequalityReport]) {
    println!(
        "  {:<34} {:>14} {:>12}  location",
        "check", "violation", "tolerance"
    );
    for rep in reports {
        println!(
            "  {:<34} {:>14.4e} {:>12.3e}  {} [{}]",
            rep.name,
            rep.worst_violation,
            rep.tolerance,
            rep.location,
            if rep.passes() { "pass" } else { "FAIL" }
        );
    }
}

fn cmd_verify(suite_name: &str, csv: Option<PathBuf>) -> i32 {
    let Some(suite) = Suite::from_name(suite_name) else {
        return usage_err(format!(
            "unknown suite {suite_name:?} (expected slices, geometry, monotonicity, asymptotics, mass, all)"
        ));
    };
    let outcomes = match run_suite(suite) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let mut all_pass = true;
    let mut csv_rows = vec![REPORT_CSV_HEADER.to_string()];
    for outcome in &outcomes {
        let verdict = if outcome.passes() { "PASS" } else { "FAIL" };
        println!(
            "[{verdict}] criterion {} ({}) in {:.2}s",
            outcome.id, outcome.name, outcome.seconds
        );
        print_reports(&outcome.reports);
        all_pass &= outcome.passes();
        for rep in &outcome.reports {
            csv_rows.push(rep.csv_row());
        }
    }
    if let Some(path) = csv {
        if let Err(e) = fs::write(&path, csv_rows.join("\n") + "\n") {
            return usage_err(e);
        }
    }
    if all_pass {
        0
    } else {
        1
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_mass(
    n: usize,
    epsilon: i32,
    mass: Option<f64>,
    profile_path: Option<PathBuf>,
    graph_path: Option<PathBuf>,
    theta: Option<f64>,
    genus: Option<u32>,
    flux_out: Option<PathBuf>,
) -> i32 {
    let ambient = match build_ambient(n, epsilon, theta, genus) {
        Ok(a) => a,
        Err(e) => return usage_err(e),
    };

    enum Holder {
        Analytic(KottlerProfile),
        Sampled(SampledProfile),
    }
    let holder = match (mass, &profile_path, &graph_path) {
        (Some(m), None, None) => {
            match KottlerProfile::new(KottlerParams::new(ambient.clone(), m)) {
                Ok(p) => Holder::Analytic(p),
                Err(e) => return usage_err(e),
            }
        }
        (None, Some(path), None) | (None, None, Some(path)) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage_err(format!("{}: {e}", path.display())),
            };
            match parse_profile_csv(ambient.clone(), &text) {
                Ok(p) => Holder::Sampled(p),
                Err(e) => return usage_err(e),
            }
        }
        _ => return usage_err("provide exactly one of --mass, --profile, --graph"),
    };
    let profile: &dyn RadialProfile = match &holder {
        Holder::Analytic(p) => p,
        Holder::Sampled(p) => p,
    };

    let gm = match graph_mass_formula(profile) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let r0 = profile.r_min();
    let horizon_area = ambient.theta() * r0.powi(n as i32 - 1);
    println!("horizon r0     {r0}");
    println!("bulk mass      {}", gm.bulk);
    println!("boundary mass  {}", gm.boundary);
    println!("total mass     {}", gm.total);

    // flux of the same geometry at growing radii
    let r_hi = profile.r_max().min(5120.0);
    let mut r = (2.0 * r0).max(5.0);
    let mut flux_rows = vec!["r,flux".to_string()];
    let mut last_extrap = None;
    while r <= r_hi {
        match flux_mass_at(profile, r) {
            Ok(v) => flux_rows.push(format!("{r},{v}")),
            Err(_) => break,
        }
        if 4.0 * r <= r_hi {
            if let Ok(ex) = flux_mass_extrapolated(profile, r, 2.0) {
                last_extrap = Some(ex.limit);
            }
        }
        r *= 2.0;
    }
    if let Some(limit) = last_extrap {
        println!("flux limit     {limit}");
    }
    if let Some(path) = flux_out {
        if let Err(e) = fs::write(&path, flux_rows.join("\n") + "\n") {
            return usage_err(e);
        }
    }

    match penrose_certificate(horizon_area, &ambient, gm.total) {
        Ok(cert) => {
            print!("{}", cert.render());
            if cert.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
