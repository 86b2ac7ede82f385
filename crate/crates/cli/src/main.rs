use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ostar_cli::report::{self, ReportBundle};
use ostar_cli::tasks::{self, Overrides};

#[derive(Parser)]
#[command(
    name = "ostar",
    about = "Diagnostics for finite-dimensional ordered star-algebras"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the task list of one instance file.
    Verify {
        path: PathBuf,
        /// Override the instance-level seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the relative tolerance for expected-value checks.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Write per-instance reports into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every instance in a directory; the worst exit code wins.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check tagged moment families against their closed forms.
    Moments {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Verify {
            path,
            seed,
            tol,
            format,
            out,
        } => verify(&path, Overrides { seed, tol }, format, out.as_deref()),
        Cmd::Corpus {
            dir,
            seed,
            tol,
            format,
            out,
        } => corpus(&dir, Overrides { seed, tol }, format, out.as_deref()),
        Cmd::Moments { file, format, out } => moments(&file, format, out.as_deref()),
    };
    ExitCode::from(code as u8)
}

fn verify(path: &Path, ov: Overrides, format: Format, out: Option<&Path>) -> i32 {
    match tasks::run_instance_file(path, &ov) {
        Ok(bundle) => {
            if let Err(e) = emit_bundle(&bundle, format, out) {
                eprintln!("error: {e}");
                return 1;
            }
            bundle.exit_code()
        }
        Err(errors) => {
            for e in &errors {
                eprintln!("error: {e}");
            }
            1
        }
    }
}

fn corpus(dir: &Path, ov: Overrides, format: Format, out: Option<&Path>) -> i32 {
    let (results, exit) = match tasks::run_corpus(dir, &ov) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for (stem, result) in &results {
        match result {
            Ok(bundle) => {
                println!(
                    "{stem}: {} ({} sections, {} inconsistencies)",
                    bundle.verdict,
                    bundle.sections.len(),
                    bundle.inconsistencies.len()
                );
                if let Err(e) = write_bundle(bundle, format, out) {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
            Err(errors) => {
                println!("{stem}: operational error");
                for e in errors {
                    eprintln!("error: {stem}: {e}");
                }
            }
        }
    }
    exit
}

fn moments(file: &Path, format: Format, out: Option<&Path>) -> i32 {
    match tasks::run_moments_file(file) {
        Ok(bundle) => {
            let rendered = match format {
                Format::Text => report::render_moments_text(&bundle),
                Format::Structured => bundle.to_json(),
            };
            if let Some(dir) = out {
                if let Err(e) = write_out(dir, &bundle.name, format, &rendered) {
                    eprintln!("error: {e}");
                    return 1;
                }
            } else {
                print!("{rendered}");
            }
            bundle.exit_code()
        }
        Err(errors) => {
            for e in &errors {
                eprintln!("error: {e}");
            }
            1
        }
    }
}

fn emit_bundle(bundle: &ReportBundle, format: Format, out: Option<&Path>) -> Result<(), String> {
    if out.is_some() {
        write_bundle(bundle, format, out)
    } else {
        let rendered = match format {
            Format::Text => report::render_text(bundle),
            Format::Structured => bundle.to_json(),
        };
        print!("{rendered}");
        Ok(())
    }
}

fn write_bundle(bundle: &ReportBundle, format: Format, out: Option<&Path>) -> Result<(), String> {
    let Some(dir) = out else { return Ok(()) };
    let rendered = match format {
        Format::Text => report::render_text(bundle),
        Format::Structured => bundle.to_json(),
    };
    write_out(dir, &bundle.name, format, &rendered)
}

fn write_out(dir: &Path, name: &str, format: Format, rendered: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let ext = match format {
        Format::Text => "txt",
        Format::Structured => "json",
    };
    let path = dir.join(format!("{name}.{ext}"));
    std::fs::write(&path, rendered).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(())
}
