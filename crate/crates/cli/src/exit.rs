use std::fmt;
use std::process::ExitCode;

use ricci_core::Error;

/// Process exit codes shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Numerical = 1,
    Extinct = 2,
    Io = 3,
    Solve = 4,
    Config = 5,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        Failure {
            exit,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Exit::Config, message)
    }

    /// Core errors raised while validating a config.
    pub fn invalid(e: Error) -> Self {
        match e {
            Error::Io(_) => Self::new(Exit::Io, e.to_string()),
            _ => Self::config(e.to_string()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Io(_) => Exit::Io,
            _ => Exit::Numerical,
        };
        Failure::new(exit, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(Exit::Io, e.to_string())
    }
}

pub type CmdResult = Result<Exit, Failure>;
