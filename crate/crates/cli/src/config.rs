//! JSON run configs. Each subcommand reads one document with its own
//! fields; every field has a default and command line flags win.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ricci_core::{FlowMode, ProfileFamily};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::exit::{Exit, Failure};

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::new(
            Exit::Io,
            format!("cannot read config {}: {e}", path.display()),
        )
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))
}

/// Copies every `Some` flag over the matching config field.
macro_rules! overlay {
    ($cfg:expr, $args:expr; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $args.$field.clone() { $cfg.$field = v; } )*
    };
}

/// Like `overlay!` for optional config fields such as output paths.
macro_rules! overlay_opt {
    ($cfg:expr, $args:expr; $($field:ident),* $(,)?) => {
        $( if let Some(v) = $args.$field.clone() { $cfg.$field = Some(v); } )*
    };
}

pub(crate) use {overlay, overlay_opt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Round,
    Perturbed,
}

impl Family {
    pub fn profile(self, eps: f64, k: u32) -> ProfileFamily {
        match self {
            Family::Round => ProfileFamily::Round,
            Family::Perturbed => ProfileFamily::Perturbed { eps, k },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Normalized,
    Unnormalized,
}

impl From<Mode> for FlowMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Normalized => FlowMode::Normalized,
            Mode::Unnormalized => FlowMode::Unnormalized,
        }
    }
}

/// Refuses to start when an output's parent directory is missing, so a
/// bad path is reported before any computation.
pub fn check_parent(path: Option<&PathBuf>) -> Result<(), Failure> {
    if let Some(path) = path {
        let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(dir) = parent {
            if !dir.is_dir() {
                return Err(Failure::config(format!(
                    "output directory {} does not exist",
                    dir.display()
                )));
            }
        }
    }
    Ok(())
}

pub fn check_dir(path: Option<&PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = path {
        if !dir.is_dir() {
            return Err(Failure::config(format!(
                "{} is not a directory",
                dir.display()
            )));
        }
    }
    Ok(())
}
