use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperfront::commands::{self, Outputs};
use hyperfront::config::RunConfig;
use hyperfront::Error;

#[derive(Parser, Debug)]
#[command(
    name = "hyperfront",
    version,
    about = "Front tracking for steady hypersonic potential flow"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration.
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "hyperfront-out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One front-tracking run: events.csv, profiles.csv, summary.json.
    Run(Common),
    /// The configured tau against tau = 0: comparison.csv.
    Compare(Common),
    /// Error rate over the configured taus: sweep.csv, slope.json.
    Sweep(Common),
    /// Wing halves, trailing-edge gluing and tail: decay.csv, tail_error.csv, slope.json.
    Wing(Common),
}

fn execute(cmd: &Command) -> hyperfront::Result<()> {
    let (Command::Run(c) | Command::Compare(c) | Command::Sweep(c) | Command::Wing(c)) = cmd;
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    let say = |m: String| {
        if !c.quiet {
            println!("{m}");
        }
    };
    let out: Outputs = match cmd {
        Command::Run(_) => {
            let (t, out) = commands::cmd_run(&cfg)?;
            let s = commands::summarize(&t, cfg.h);
            say(format!(
                "{} events, {} fronts, max rarefaction {:.3e} (bound {:.3e}), max NP total {:.3e}",
                s.events, s.fronts_created, s.max_rarefaction, s.rarefaction_bound, s.max_np_total
            ));
            out
        }
        Command::Compare(_) => {
            let (rows, out) = commands::cmd_compare(&cfg)?;
            for r in &rows {
                say(format!("x = {:.4}: L1 error {:.6e}", r.x, r.l1_total));
            }
            out
        }
        Command::Sweep(_) => {
            let (rep, out) = commands::cmd_sweep(&cfg)?;
            for r in &rep.summary.per_x {
                say(format!(
                    "x = {:.4}: slope {:.4} (residual {:.2e})",
                    r.x, r.slope, r.residual
                ));
            }
            say(format!("max C(x) ratio {:.4}", rep.summary.max_c_ratio));
            out
        }
        Command::Wing(_) => {
            let (rep, out) = commands::cmd_wing(&cfg)?;
            let s = &rep.summary;
            say(format!(
                "TV decay slope {:.4}, tail error slope {:.4}",
                s.decay_slope, s.tail_slope
            ));
            if s.decay_slope > -0.3 && !c.quiet {
                eprintln!("warning: TV decays slower than x^-0.3 (slope {:.4})", s.decay_slope);
            }
            out
        }
    };
    out.write_to(&c.out)?;
    say(format!("wrote {}", c.out.display()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::BudgetExceeded {
                x: 1.0,
                total: 3.0,
                initial: 1.0
            }),
            2
        );
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        assert_eq!(exit_code(&Error::SimultaneousEvents(0.5)), 1);
    }
}
