//! Line-delimited JSON instruction streams: one header line, then one
//! instruction per line.

use serde::{Deserialize, Serialize};

use super::Instruction;
use crate::ir::NodeId;

/// Largest board a stream may describe, in patches.
const MAX_AREA: u64 = 1 << 22;

#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamHeader {
    #[serde(default = "crate::format_version")]
    pub format_version: u32,
    pub width: u32,
    pub height: u32,
    pub total_cycles: u64,
    pub node_count: usize,
    #[serde(default)]
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, Eq, PartialEq)]
pub struct InstructionStream {
    pub header: StreamHeader,
    pub instructions: Vec<Instruction>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StreamError {
    #[error("stream is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("board of {0} patches is too large")]
    TooLarge(u64),
}

pub fn write_stream(stream: &InstructionStream) -> String {
    let mut out = serde_json::to_string(&stream.header).expect("header serializes");
    out.push('\n');
    for i in &stream.instructions {
        out.push_str(&serde_json::to_string(i).expect("instruction serializes"));
        out.push('\n');
    }
    out
}

pub fn parse_stream(source: &str) -> Result<InstructionStream, StreamError> {
    let mut lines = source
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (n, first) = lines.next().ok_or(StreamError::Empty)?;
    let header: StreamHeader = serde_json::from_str(first).map_err(|e| StreamError::Line {
        line: n + 1,
        message: e.to_string(),
    })?;
    if header.format_version != crate::FORMAT_VERSION {
        return Err(StreamError::Version(header.format_version));
    }
    let area = header.width as u64 * header.height as u64;
    if area > MAX_AREA {
        return Err(StreamError::TooLarge(area));
    }
    let instructions = lines
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| StreamError::Line {
                line: n + 1,
                message: e.to_string(),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(InstructionStream {
        header,
        instructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Coord;
    use crate::router::InstructionKind;

    #[test]
    fn round_trip() {
        let s = InstructionStream {
            header: StreamHeader {
                format_version: 1,
                width: 3,
                height: 2,
                total_cycles: 2,
                node_count: 1,
                edges: vec![],
            },
            instructions: vec![Instruction {
                cycle: 0,
                duration: 2,
                kind: InstructionKind::Merge,
                patches: vec![Coord::new(0, 0), Coord::new(1, 0), Coord::new(0, 1)],
                node: 0,
            }],
        };
        let text = write_stream(&s);
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains(r#""kind":"merge""#));
        assert_eq!(parse_stream(&text).unwrap(), s);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(parse_stream(""), Err(StreamError::Empty));
        assert!(matches!(
            parse_stream("{}"),
            Err(StreamError::Line { line: 1, .. })
        ));
        let h = r#"{"width":2,"height":2,"total_cycles":0,"node_count":0}"#;
        assert!(parse_stream(&format!("{h}\n{{\"cycle\":0}}")).is_err());
        let big = r#"{"width":100000,"height":100000,"total_cycles":0,"node_count":0}"#;
        assert!(matches!(parse_stream(big), Err(StreamError::TooLarge(_))));
    }
}
