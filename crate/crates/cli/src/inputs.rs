//! Resolution of input references: files relative to the config, or
//! bundled `builtin:` data.

use std::fs;
use std::path::{Path, PathBuf};

use thermoflow::embedding::TrigPolynomial;
use thermoflow::io;
use thermoflow::suspension::SuspensionFlow;
use thermoflow::{LocallyConstantFunction, MatrixCocycle, Sft};

use crate::catalog;
use crate::InputError;

const BUILTIN: &str = "builtin:";

pub struct Inputs {
    base: PathBuf,
}

enum Source {
    Builtin(&'static str),
    File(PathBuf),
}

impl Inputs {
    /// Inputs relative to `base` (the directory holding the config).
    pub fn new(base: impl Into<PathBuf>) -> Self {
        Self { base: base.into() }
    }

    fn source(&self, reference: &str) -> Result<(PathBuf, Source), InputError> {
        if let Some(name) = reference.strip_prefix(BUILTIN) {
            let text = catalog::data_file(name).ok_or_else(|| InputError(format!("no bundled data file '{name}'")))?;
            Ok((PathBuf::from(reference), Source::Builtin(text)))
        } else {
            let path = self.base.join(reference);
            Ok((path.clone(), Source::File(path)))
        }
    }

    fn text(&self, reference: &str) -> Result<(PathBuf, String), InputError> {
        let (path, source) = self.source(reference)?;
        let text = match source {
            Source::Builtin(t) => t.to_string(),
            Source::File(p) => {
                fs::read_to_string(&p).map_err(|e| InputError(format!("{}: {e}", p.display())))?
            }
        };
        Ok((path, text))
    }

    pub fn sft(&self, reference: &str) -> Result<Sft, InputError> {
        let (path, text) = self.text(reference)?;
        Ok(io::parse_sft(&path, &text)?)
    }

    pub fn table(&self, reference: &str, sft: &Sft) -> Result<LocallyConstantFunction, InputError> {
        let (path, text) = self.text(reference)?;
        Ok(io::parse_function_table(&path, &text, sft)?)
    }

    pub fn cocycle(&self, reference: &str) -> Result<MatrixCocycle, InputError> {
        let (path, text) = self.text(reference)?;
        Ok(io::parse_cocycle(&path, &text)?)
    }

    pub fn trig(&self, reference: &str) -> Result<TrigPolynomial, InputError> {
        let (path, text) = self.text(reference)?;
        Ok(io::parse_trig(&path, &text)?)
    }

    /// A flow spec; its `sft` line is resolved in the same namespace.
    pub fn flow(&self, reference: &str) -> Result<SuspensionFlow, InputError> {
        let (path, text) = self.text(reference)?;
        let builtin = reference.starts_with(BUILTIN);
        let flow = io::parse_flow_spec_with(Path::new(&path), &text, |sft_path: &Path| {
            if builtin {
                let name = sft_path.to_string_lossy();
                let name = name.strip_prefix(BUILTIN).unwrap_or(&name);
                let text = catalog::data_file(name).ok_or_else(|| {
                    thermoflow::Error::InvalidArgument(format!("no bundled data file '{name}'"))
                })?;
                io::parse_sft(sft_path, text)
            } else {
                io::read_sft(sft_path)
            }
        })?;
        Ok(flow)
    }
}
