use std::fmt;

use cohypo_core::Error;

/// Failure categories and the process exit code of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Other,
    Usage,
    Io,
    Format,
    Contract,
    Numerical,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Other => 1,
            Category::Usage => 2,
            Category::Io => 3,
            Category::Format => 4,
            Category::Contract => 5,
            Category::Numerical => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Other => "other",
            Category::Usage => "usage",
            Category::Io => "io",
            Category::Format => "format",
            Category::Contract => "contract",
            Category::Numerical => "numerical",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl CliError {
    pub fn new(category: Category, message: impl Into<String>) -> Self {
        CliError {
            category,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Category::Usage, message)
    }
}

impl fmt::Display for CliError {
    /// `error[<category>]: <message>` on one line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace('\n', " ");
        write!(f, "error[{}]: {}", self.category.name(), one_line)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let category = match &e {
            Error::Io { .. } | Error::IoStream(_) => Category::Io,
            Error::Parse { .. } | Error::Format(_) => Category::Format,
            Error::Contract(_) | Error::UnknownWord(_) => Category::Contract,
            Error::Numerical(_) => Category::Numerical,
        };
        CliError::new(category, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
