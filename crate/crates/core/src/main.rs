use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qbattery::figures::{write_figure, FigureName, FigureOptions};
use qbattery::report::{constants_table, write_constants, write_run_csv, write_sweep_csv};
use qbattery::scenario::{Route, Scenario};
use qbattery::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "qbattery", version, about = "Charging dynamics of driven-dissipative bosonic quantum batteries")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Samples per time trace.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,

    /// End of the charging window.
    #[arg(long = "t-end", global = true, value_name = "X")]
    t_end: Option<f64>,

    /// Route override for `run`: analytic, cumulant, perturbation, fock or all.
    #[arg(long, global = true, value_name = "R")]
    route: Option<Route>,

    /// Assert that no random numbers are involved (every route is deterministic).
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a scenario file and print CSV.
    Run {
        scenario: PathBuf,
        /// Write the CSV here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write the data of a standard figure, one CSV per panel.
    Figure {
        name: FigureName,
        #[arg(long)]
        out: PathBuf,
        /// Points per decade on logarithmic axes.
        #[arg(long, default_value_t = FigureOptions::default().points_per_decade)]
        points: usize,
        /// Exact Fock points per decade on the drive axis.
        #[arg(long, default_value_t = FigureOptions::default().fock_points_per_decade)]
        fock_points: usize,
        /// Largest Omega/J given to the Fock route.
        #[arg(long, default_value_t = FigureOptions::default().fock_max_ratio)]
        fock_max: f64,
    },
    /// Print the dimensionless optimum constants with their residuals.
    Constants,
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn execute(cli: Cli) -> Result<()> {
    if cli.seedless {
        log::info!("seedless: no route draws random numbers");
    }
    match &cli.command {
        Command::Run { scenario, out } => {
            let mut s = Scenario::from_file(scenario)?;
            if let Some(n) = cli.samples {
                s.n_samples = n;
            }
            if let Some(t) = cli.t_end {
                s.t_end = t;
            }
            if let Some(r) = cli.route {
                s.route = r;
            }
            s.validate()?;
            let mut w = output(out.as_ref())?;
            if s.sweep.is_some() {
                let result = s.run_sweep()?;
                write_sweep_csv(&mut w, &s, &result)?;
            } else {
                let result = s.run()?;
                write_run_csv(&mut w, &s, &result)?;
            }
            w.flush()?;
        }
        Command::Figure {
            name,
            out,
            points,
            fock_points,
            fock_max,
        } => {
            if cli.route.is_some() {
                return Err(Error::InvalidInput("--route applies to `run` only".into()));
            }
            let opts = FigureOptions {
                points_per_decade: *points,
                fock_points_per_decade: *fock_points,
                fock_max_ratio: *fock_max,
                samples: cli.samples.unwrap_or(FigureOptions::default().samples),
                t_end: cli.t_end,
                ..FigureOptions::default()
            };
            for path in write_figure(*name, &opts, out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Constants => {
            if cli.route.is_some() || cli.samples.is_some() || cli.t_end.is_some() {
                return Err(Error::InvalidInput("`constants` takes no simulation flags".into()));
            }
            let mut w = output(None)?;
            write_constants(&mut w, &constants_table()?)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
