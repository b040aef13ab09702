use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rheojet_verifier::config::parse_tolerance;
use rheojet_verifier::{eval_tensor, parse_point, run_suite, HSelector, MetricSelector, VerifyConfig, VerifyError};

#[derive(Parser)]
#[command(name = "rheojet", version, about = "Evaluate and verify rheonomic cubic-root Finsler geometry on the 1-jet space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite over seeded sample points.
    Verify {
        /// chernov, f2 or custom:PATH
        #[arg(long, default_value = "chernov")]
        metric: MetricSelector,
        /// const:C, exp:A or poly:C0,C1,...
        #[arg(long, default_value = "exp:1")]
        h: HSelector,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Tolerance override, NAME=VALUE; repeatable.
        #[arg(long = "tol", value_name = "NAME=VALUE", num_args = 1..)]
        tol: Vec<String>,
        /// Einstein constant.
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one named tensor at a point.
    Eval {
        #[arg(long)]
        tensor: String,
        /// t=T,x=a,b,c,d,y=e,f,g,h
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "chernov")]
        metric: MetricSelector,
        #[arg(long, default_value = "exp:1")]
        h: HSelector,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<bool, VerifyError> {
    match cli.command {
        Command::Verify {
            metric,
            h,
            samples,
            seed,
            tol,
            k,
            out,
        } => {
            let tolerances = tol.iter().map(|s| parse_tolerance(s)).collect::<Result<_, _>>()?;
            let cfg = VerifyConfig {
                metric,
                h,
                samples,
                seed,
                tolerances,
                k,
            };
            let report = run_suite(&cfg)?;
            let text = report.to_json_string();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            for c in &report.checks {
                eprintln!(
                    "{} {:<24} max {:.3e} scaled {:.3e} tol {:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.max_scaled_residual,
                    c.tolerance
                );
            }
            Ok(report.overall_pass)
        }
        Command::Eval {
            tensor,
            point,
            metric,
            h,
            k,
            format: Format::Json,
        } => {
            let p = parse_point(&point)?;
            let m = metric.load()?;
            let mut value = eval_tensor(&tensor, &m, &h.0, &p, k)?;
            if let Some(obj) = value.as_object_mut() {
                obj.insert("tensor".into(), tensor.into());
            }
            println!("{}", serde_json::to_string_pretty(&value).expect("tensor serializes"));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
