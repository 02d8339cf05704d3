//! Scenario runner for the couple stress verification laboratory.
//!
//! `cslab run <config>` executes one scenario and writes `report.json`,
//! `summary.csv`, and (when requested) `tractions.csv` into the output
//! directory. The exit status is 0 when every check passes, 1 when any
//! fails, and 2 on configuration or build errors.

mod config;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use couplestress::report::{all_pass, checks_csv, Check};
use couplestress::{DomainGeometry, MaterialParams, TractionSample};

use config::ScenarioConfig;
use scenarios::Tolerances;

#[derive(Parser)]
#[command(name = "cslab", version, about = "couple stress verification laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario config and write its reports.
    Run {
        /// Path to the scenario TOML file.
        config: PathBuf,
        /// Overrides the seed recorded in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for report.json / summary.csv / tractions.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Multiplies every tolerance, looser above 1, tighter below.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
}

#[derive(Serialize)]
struct DomainSummary {
    kind: String,
    order: u32,
    patches: Vec<String>,
    dirichlet: Vec<String>,
    edges: usize,
}

impl DomainSummary {
    fn new(domain: &DomainGeometry) -> Self {
        DomainSummary {
            kind: format!("{:?}", domain.kind()),
            order: domain.order(),
            patches: domain.patches().iter().map(|p| p.name().to_string()).collect(),
            dirichlet: domain
                .dirichlet_patches()
                .map(|p| p.name().to_string())
                .collect(),
            edges: domain.edges().len(),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    scenario: String,
    seed: u64,
    tol_scale: f64,
    generated: String,
    domain: DomainSummary,
    material: MaterialParams,
    pass: bool,
    checks: Vec<Check>,
    payload: serde_json::Value,
}

fn run(config_path: &PathBuf, seed: Option<u64>, out: &PathBuf, tol_scale: f64) -> Result<bool> {
    let cfg = ScenarioConfig::load(config_path)?;
    let domain = cfg.domain()?;
    let params = cfg.material()?;
    let (seed, mut rng) = cfg.rng(seed);
    let tol = Tolerances::from_config(&cfg, tol_scale);

    let outcome = scenarios::run(&cfg, &domain, &params, &mut rng, &tol)?;
    let pass = all_pass(&outcome.checks);

    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output dir {}", out.display()))?;
    let stamp = chrono::Utc::now().to_rfc3339();

    let report = RunReport {
        scenario: cfg.scenario.to_string(),
        seed,
        tol_scale,
        generated: stamp.clone(),
        domain: DomainSummary::new(&domain),
        material: params,
        pass,
        checks: outcome.checks,
        payload: outcome.payload,
    };
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(out.join("report.json"), json + "\n")?;

    let mut csv = format!(
        "# cslab {} seed={} tol-scale={} generated={}\n",
        report.scenario, seed, tol_scale, stamp
    );
    csv.push_str(&checks_csv(&report.checks));
    std::fs::write(out.join("summary.csv"), csv)?;

    if let Some(rows) = outcome.tractions {
        let mut dump = String::from(TractionSample::CSV_HEADER);
        dump.push('\n');
        for row in rows {
            dump.push_str(&row);
            dump.push('\n');
        }
        std::fs::write(out.join("tractions.csv"), dump)?;
    }

    for check in &report.checks {
        println!("{}", check.line());
    }
    println!(
        "{}: {} ({} checks) -> {}",
        report.scenario,
        if pass { "PASS" } else { "FAIL" },
        report.checks.len(),
        out.display()
    );
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run {
            config,
            seed,
            out,
            tol_scale,
        } => match run(&config, seed, &out, tol_scale) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(err) => {
                eprintln!("error: {:#}", err);
                ExitCode::from(2)
            }
        },
    }
}
