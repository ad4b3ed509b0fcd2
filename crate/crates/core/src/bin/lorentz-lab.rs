use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lorentz_lab::scenario::{
    self, emit, parse_scenario, run_scenario, ConstantsProfile, OutputFormat, ScenarioError, ScenarioKind,
};

/// Environment variable that must not be used to pick constants.
const CONSTANTS_ENV: &str = "LORENTZ_LAB_CONSTANTS";

#[derive(Parser)]
#[command(name = "lorentz-lab", version, about = "Run kinematics, lattice, optics and interferometer scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Si,
    Natural,
}

#[derive(Args)]
struct Common {
    /// Physical constants profile.
    #[arg(long, value_enum, default_value = "si")]
    constants: Profile,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its result table.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output path; defaults to the scenario's `output` key, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Parse and validate a scenario file without running it.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List scenario kinds and their parameters.
    ListKinds,
    /// Run the bundled reference scenarios into a directory.
    PaperSuite {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output directory.
        #[arg(long, default_value = "suite-out")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

impl From<Profile> for ConstantsProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Si => ConstantsProfile::Si,
            Profile::Natural => ConstantsProfile::Natural,
        }
    }
}

fn list_kinds() -> String {
    let mut out = String::new();
    for kind in ScenarioKind::ALL {
        out.push_str(&format!("{kind}: {}\n", kind.summary()));
        for p in kind.parameters() {
            let tag = if p.required { "required" } else { "optional" };
            out.push_str(&format!("    {:<14} {tag:<9} {}\n", p.name, p.doc));
        }
    }
    out
}

fn execute(cmd: Command) -> Result<(), ScenarioError> {
    match cmd {
        Command::Run { file, format, out, common } => {
            let profile = ConstantsProfile::from(common.constants);
            let s = parse_scenario(&file, &profile.constants())?;
            let table = run_scenario(&s, profile)?;
            let format = OutputFormat::from(format);
            match out.or_else(|| s.output_path.clone()) {
                Some(path) => emit(&table, format, &path),
                None => std::io::stdout()
                    .write_all(table.render(format).as_bytes())
                    .map_err(|source| ScenarioError::Io { path: "<stdout>".into(), source }),
            }
        }
        Command::Validate { file, common } => {
            let profile = ConstantsProfile::from(common.constants);
            let s = parse_scenario(&file, &profile.constants())?;
            println!("ok: {} scenario, {} parameter(s)", s.kind, s.parameters.len());
            Ok(())
        }
        Command::ListKinds => {
            print!("{}", list_kinds());
            Ok(())
        }
        Command::PaperSuite { format, out, common } => {
            for path in scenario::run_reference_suite(&out, format.into(), common.constants.into())? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
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
    if std::env::var_os(CONSTANTS_ENV).is_some() {
        eprintln!("error: {CONSTANTS_ENV} is not supported; select constants with --constants=<si|natural>");
        return ExitCode::from(1);
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
