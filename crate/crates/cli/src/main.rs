//! `kcone`: command-line front end for the `kahler-cone` library.
//!
//! Every subcommand prints one JSON object on standard output. Exit codes:
//! 0 success, 1 usage or input error, 2 inadmissible point, 3 a check above
//! tolerance.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kahler_cone::CohClass;

#[derive(Parser, Debug)]
#[command(
    name = "kcone",
    version,
    about = "Riemannian geometry of Kähler cones from intersection forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a form: dimensions, coefficients, default point.
    Info {
        /// Catalog name or path to a manifold JSON file.
        form: String,
    },
    /// Volume, Gram matrix and its inverse at a point.
    Metric {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
    },
    /// Curvature tensor, and optionally sectional, Ricci and scalar curvature.
    Curvature {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
        /// Two classes spanning a plane.
        #[arg(long, num_args = 2, value_names = ["U", "V"], allow_hyphen_values = true)]
        sectional: Option<Vec<CohClass>>,
        #[arg(long)]
        ricci: bool,
        #[arg(long)]
        scalar: bool,
    },
    /// Christoffel symbol `Γ(z, u)` and related quantities.
    Connection {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
        #[arg(long, allow_hyphen_values = true)]
        z: CohClass,
        #[arg(long, allow_hyphen_values = true)]
        u: CohClass,
    },
    /// Integrate a geodesic with fixed-step RK4.
    Geodesic {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
        /// Initial velocity.
        #[arg(long, allow_hyphen_values = true)]
        v: CohClass,
        /// Integration time.
        #[arg(long = "T", default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Also write samples as `t,coords...,speed` rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Length of `α + tω` as `t` halves toward the boundary point `α`.
    Probe {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: CohClass,
        #[arg(long, allow_hyphen_values = true)]
        omega: CohClass,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 20)]
        halvings: usize,
    },
    /// The product `u · v = ½Λ(u ∪ v)` and its curvature tensor.
    Algebra {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
        #[arg(long)]
        derivations: bool,
        #[arg(long)]
        kn: bool,
        #[arg(long)]
        constant_curvature: bool,
    },
    /// Split `ω` into log-volume and a unit-volume class.
    Split {
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<CohClass>,
    },
    /// Check that a linear map pulls the metric of X back to that of Y.
    Pullback {
        form_y: String,
        form_x: String,
        /// Rows separated by `;`, entries by `,`, e.g. `0,1;1,0`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        degree: f64,
        /// Sample points of Y; defaults to Y's catalog point.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<CohClass>,
    },
    /// Run the full verification suite.
    Verify {
        /// Forms to verify; the whole catalog when empty.
        forms: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (value, code) = commands::run(cli.command);
    let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
    // a closed pipe on stdout is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
