//! Failures carry the process exit code they map to.

use std::fmt;
use std::path::Path;

use surgec::pipeline::PipelineError;
use surgec::stdlib::GenError;

pub const PARSE: u8 = 2;
pub const ALLOCATION: u8 = 3;
pub const ROUTING: u8 = 4;
pub const VALIDATION: u8 = 5;
const OTHER: u8 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code,
        error: error.into(),
    }
}

/// Attach an exit code and a context line to any error.
pub trait Code<T> {
    fn code(self, code: u8, context: impl fmt::Display) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8, context: impl fmt::Display) -> Outcome<T> {
        self.map_err(|e| fail(code, e.into().context(context.to_string())))
    }
}

pub fn pipeline_code(e: &PipelineError) -> u8 {
    match e {
        PipelineError::Ir(_) => PARSE,
        PipelineError::Placement(_) | PipelineError::InvalidBoard(_) | PipelineError::Map(_) => {
            ALLOCATION
        }
        PipelineError::Route(_) => ROUTING,
    }
}

pub fn gen_code(e: &GenError) -> u8 {
    match e {
        GenError::Range(_) | GenError::MissingTemplate(_) | GenError::Ir(_) => PARSE,
        GenError::Pipeline(p) => pipeline_code(p),
    }
}

pub fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).code(OTHER, format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, contents: impl AsRef<[u8]>) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).code(OTHER, format!("cannot create {}", dir.display()))?;
    }
    std::fs::write(path, contents).code(OTHER, format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use surgec::qcb::QcbError;
    use surgec::router::RouterError;

    #[test]
    fn pipeline_errors_map_to_exit_codes() {
        let alloc = PipelineError::Placement(QcbError::AllocationFailure("q".into()));
        assert_eq!(pipeline_code(&alloc), ALLOCATION);
        assert_eq!(
            pipeline_code(&PipelineError::Route(RouterError::NoIo)),
            ROUTING
        );
        assert_eq!(gen_code(&GenError::Range("n".into())), PARSE);
        assert_eq!(gen_code(&GenError::from(alloc)), ALLOCATION);
    }

    #[test]
    fn failures_keep_context() {
        let f = Err::<(), _>(std::fmt::Error)
            .code(PARSE, "in x.json")
            .unwrap_err();
        assert_eq!(f.code, PARSE);
        assert!(f.to_string().starts_with("in x.json"));
    }
}
