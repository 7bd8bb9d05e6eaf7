#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Bessel(_) => "bessel",
        Command::Kernel(_) => "kernel",
        Command::Profile(_) => "profile",
        Command::Solution(_) => "solution",
        Command::Scan(_) => "scan",
        Command::Riesz(_) => "riesz",
        Command::Semilinear(_) => "semilinear",
        Command::Hbound(_) => "hbound",
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let mut table = commands::run(&cli.command)?;
    let mut meta = serde_json::Map::new();
    meta.insert("subcommand".into(), subcommand_name(&cli.command).into());
    meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    meta.append(&mut table.meta);
    table.meta = meta;
    // render fully before touching the destination so failures leave no partial file
    let mut buf = Vec::new();
    table.write(cli.format, &mut buf)?;
    match &cli.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
