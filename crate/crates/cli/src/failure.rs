use std::fmt;

/// Attached as context to classify an error for the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Usage,
    Domain,
    Input,
}

impl Failure {
    pub fn exit_code(self) -> u8 {
        match self {
            Failure::Usage => 2,
            Failure::Domain => 3,
            Failure::Input => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::Usage => "usage error",
            Failure::Domain => "invalid parameter",
            Failure::Input => "input error",
        })
    }
}

/// Exit code for an error that escaped a command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return f.exit_code();
    }
    if err.downcast_ref::<speed_core::Error>().is_some() {
        return Failure::Domain.exit_code();
    }
    let input = err.chain().any(|c| {
        c.is::<std::io::Error>()
            || c.is::<serde_json::Error>()
            || c.is::<toml::de::Error>()
            || c.is::<csv::Error>()
    });
    if input {
        Failure::Input.exit_code()
    } else {
        1
    }
}
