//! `orbfbl`: finite-blocklength tables and curves for ORBGRAND.

mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Parser;
use orbgrand_fbl::mc::DEFAULT_SHARDS;
use orbgrand_fbl::Quadrature;

use commands::{Command, Globals};
use manifest::{QuadratureSettings, RunManifest};

#[derive(Parser, Debug, Clone)]
#[command(name = "orbfbl", version, about = "Finite-blocklength bounds and simulations for ORBGRAND")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Re-run the command recorded in a manifest and compare output digests.
    #[arg(long, value_name = "FILE")]
    verify_manifest: Option<PathBuf>,

    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Manifest file (default: `<output>.manifest.json`, or stderr when
    /// writing to stdout).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// Base seed of every Monte Carlo stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Monte Carlo samples per bound evaluation.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    samples: u64,

    /// Monte Carlo shards (fixes the RNG streams; independent of threads).
    #[arg(long, global = true, default_value_t = DEFAULT_SHARDS)]
    shards: usize,
}

impl Cli {
    fn globals(&self) -> Globals {
        Globals { seed: self.seed, samples: self.samples, shards: self.shards.max(1) }
    }
}

fn main() -> Result<()> {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    if let Some(path) = &cli.verify_manifest {
        if cli.command.is_some() {
            bail!("--verify-manifest takes no subcommand");
        }
        return verify(path);
    }
    let Some(cmd) = &cli.command else {
        bail!("no subcommand given; see --help");
    };

    let started = Instant::now();
    let out = commands::run(cmd, cli.globals())?;
    let quad = Quadrature::default();
    let manifest = RunManifest {
        tool: "orbfbl".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command_line: argv,
        seed: cli.seed,
        samples: cli.samples,
        shards: cli.shards,
        quadrature: QuadratureSettings { abs_tol: quad.abs_tol, max_evals: quad.max_evals },
        schema: out.schema.into(),
        wall_time_secs: started.elapsed().as_secs_f64(),
        output_sha256: manifest::digest(&out.bytes),
    };

    match &cli.output {
        Some(path) => std::fs::write(path, &out.bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&out.bytes)?,
    }
    let manifest_path = cli.manifest.clone().or_else(|| {
        cli.output.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    match manifest_path {
        Some(p) => manifest.write(&p)?,
        None => eprint!("{}", manifest.to_json()?),
    }
    Ok(())
}

fn verify(path: &std::path::Path) -> Result<()> {
    let recorded = RunManifest::read(path)?;
    let cli = Cli::try_parse_from(&recorded.command_line).context("manifest command line no longer parses")?;
    let Some(cmd) = &cli.command else {
        bail!("manifest does not record a subcommand");
    };
    let out = commands::run(cmd, cli.globals())?;
    let digest = manifest::digest(&out.bytes);
    if digest == recorded.output_sha256 {
        println!("verified: {digest}");
        Ok(())
    } else {
        bail!("digest mismatch: manifest {} vs re-run {digest}", recorded.output_sha256)
    }
}
