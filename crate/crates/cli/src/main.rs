//! Runs bundled and user-written thermoflow experiments from flat JSON
//! configs. Exit status: 0 on pass, 2 when a declared tolerance fails, 1 on
//! input errors. `RAYON_NUM_THREADS` sets the thread count.

mod catalog;
mod config;
mod experiments;
mod inputs;
mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use inputs::Inputs;

/// An error in the user's input: the run exits with status 1.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<thermoflow::Error> for InputError {
    fn from(e: thermoflow::Error) -> Self {
        Self(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "thermoflow", version, about = "Thermodynamic formalism experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a config file, or `template:<name>`.
    Run {
        config: String,
        /// Output directory, overriding the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled templates.
    List,
    /// Check a config and its inputs without running it.
    Validate { config: String },
    /// Write a template and the data files it uses to a directory.
    Export { template: String, dir: PathBuf },
}

/// A loaded config with its name and input resolver.
struct Loaded {
    name: String,
    config: ExperimentConfig,
    inputs: Inputs,
}

fn load(reference: &str) -> Result<Loaded, InputError> {
    if let Some(name) = reference.strip_prefix("template:") {
        let t = catalog::template(name).ok_or_else(|| InputError(format!("no template named '{name}'")))?;
        let path = PathBuf::from(reference);
        return Ok(Loaded {
            name: name.to_string(),
            config: ExperimentConfig::parse(&path, t.config)?,
            inputs: Inputs::new("."),
        });
    }
    let path = Path::new(reference);
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map_or_else(|| "experiment".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Loaded {
        name,
        config: ExperimentConfig::parse(path, &text)?,
        inputs: Inputs::new(path.parent().unwrap_or(Path::new("."))),
    })
}

fn run(reference: &str, out: Option<PathBuf>) -> Result<ExitCode, InputError> {
    let loaded = load(reference)?;
    loaded.config.validate(&loaded.inputs)?;
    let prepared = experiments::prepare(&loaded.config, &loaded.inputs)?;
    let result = experiments::run(&loaded.config, prepared)?;
    let dir = out.unwrap_or_else(|| match &loaded.config.output_dir {
        Some(d) => PathBuf::from(d),
        None => Path::new("thermoflow-out").join(&loaded.name),
    });
    output::write_all(&dir, &result.files)?;
    println!("{}", output::summary_line(&loaded.name, &loaded.config, &result));
    Ok(match result.pass {
        Some(false) => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    })
}

fn list() {
    for t in catalog::TEMPLATES {
        println!("{:32} {}", t.name, t.description);
        println!("{:32} topic: {}; outputs: {}", "", t.topic, catalog::output_schema(t.kind));
    }
}

fn validate(reference: &str) -> Result<ExitCode, InputError> {
    let loaded = load(reference)?;
    loaded.config.validate(&loaded.inputs)?;
    println!("{}: valid", loaded.name);
    Ok(ExitCode::SUCCESS)
}

fn export(name: &str, dir: &Path) -> Result<ExitCode, InputError> {
    let t = catalog::template(name).ok_or_else(|| InputError(format!("no template named '{name}'")))?;
    let write = |path: PathBuf, text: &str| {
        fs::write(&path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    };
    fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    // bundled references become plain relative paths next to the config
    write(dir.join(format!("{name}.json")), &t.config.replace("builtin:", ""))?;
    for (file, text) in catalog::data_files() {
        if t.config.contains(&format!("builtin:{file}")) || uses_sft_of(t.config, file) {
            write(dir.join(file), text)?;
        }
    }
    println!("wrote {name} to {}", dir.display());
    Ok(ExitCode::SUCCESS)
}

/// Does a flow file referenced by the template name `sft_file` on its
/// `sft` line?
fn uses_sft_of(config: &str, sft_file: &str) -> bool {
    catalog::data_files().any(|(file, text)| {
        file.ends_with(".flow")
            && config.contains(&format!("builtin:{file}"))
            && text.lines().any(|l| l.trim() == format!("sft {sft_file}"))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::List => {
            list();
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => validate(&config),
        Command::Export { template, dir } => export(&template, &dir),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_template_parses_and_validates() {
        assert!(catalog::TEMPLATES.len() >= 10);
        for t in catalog::TEMPLATES {
            let config = ExperimentConfig::parse(Path::new(t.name), t.config).unwrap();
            assert_eq!(config.kind, t.kind, "{}", t.name);
            config.validate(&Inputs::new(".")).unwrap_or_else(|e| panic!("{}: {e}", t.name));
            assert!(!catalog::output_schema(t.kind).is_empty());
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::parse(Path::new("c.json"), "{\n\"kind\": \"pressure\",\n\"sfx\": 1\n}").unwrap_err();
        assert!(err.0.starts_with("c.json:3:"), "{err}");
    }
}
