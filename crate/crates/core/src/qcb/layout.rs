//! Layout documents: the board as JSON with one glyph per patch.

use serde::{Deserialize, Serialize};

use super::{PatchType, Qcb, Segment};
use crate::geom::{Coord, Rect};

#[derive(Debug, thiserror::Error)]
pub enum LayoutError {
    #[error("layout document is malformed: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("layout grid has {found} rows, expected {expected}")]
    RowCount { found: usize, expected: u32 },
    #[error("layout row {row} has {found} patches, expected {expected}")]
    RowWidth {
        row: usize,
        found: usize,
        expected: u32,
    },
    #[error("unknown glyph `{glyph}` at row {row}, column {col}")]
    Glyph { glyph: char, row: usize, col: usize },
    #[error("segment {0} lies outside the board")]
    SegmentBounds(usize),
    #[error("board must be at least 1x1")]
    Empty,
    #[error("board of {0} patches is too large")]
    TooLarge(u64),
}

#[derive(Clone, Debug, Eq, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutDoc {
    #[serde(default = "crate::format_version")]
    pub format_version: u32,
    pub width: u32,
    pub height: u32,
    pub grid: Vec<String>,
    #[serde(default)]
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub io_count: u32,
}

impl LayoutDoc {
    pub fn from_qcb(q: &Qcb) -> Self {
        LayoutDoc {
            format_version: crate::FORMAT_VERSION,
            width: q.width,
            height: q.height,
            grid: q.to_ascii().lines().map(str::to_string).collect(),
            segments: q.segments.clone(),
            io_count: q.io_count,
        }
    }

    pub fn parse(source: &str) -> Result<Self, LayoutError> {
        Ok(serde_json::from_str(source)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn to_qcb(&self) -> Result<Qcb, LayoutError> {
        if self.width == 0 || self.height == 0 {
            return Err(LayoutError::Empty);
        }
        let area = self.width as u64 * self.height as u64;
        if area > 1 << 22 {
            return Err(LayoutError::TooLarge(area));
        }
        if self.grid.len() != self.height as usize {
            return Err(LayoutError::RowCount {
                found: self.grid.len(),
                expected: self.height,
            });
        }
        let mut q = Qcb::new(self.width, self.height);
        for (r, line) in self.grid.iter().enumerate() {
            let chars: Vec<char> = line.chars().collect();
            if chars.len() != self.width as usize {
                return Err(LayoutError::RowWidth {
                    row: r,
                    found: chars.len(),
                    expected: self.width,
                });
            }
            for (c, &ch) in chars.iter().enumerate() {
                let t = PatchType::from_glyph(ch).ok_or(LayoutError::Glyph {
                    glyph: ch,
                    row: r,
                    col: c,
                })?;
                let at = Coord::new(r as u32, c as u32);
                q.set(at, t);
                q.set_pending(at, ch == 'P');
            }
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !s.bounds.fits_in(self.width, self.height) {
                return Err(LayoutError::SegmentBounds(i));
            }
        }
        if self.segments.is_empty() {
            q.infer_segments(None);
        } else {
            q.segments = self.segments.clone();
            q.io_count = self.io_count;
        }
        Ok(q)
    }
}

impl Qcb {
    /// Board from glyph rows with inferred segments: every maximal horizontal
    /// `R` run is one register segment, every connected `E` block one extern
    /// bound to `binding`, and the `I` cells form the IO segment.
    pub fn from_rows(rows: &[&str], binding: Option<&str>) -> Result<Qcb, LayoutError> {
        let width = rows.first().map_or(0, |r| r.chars().count()) as u32;
        let doc = LayoutDoc {
            format_version: crate::FORMAT_VERSION,
            width,
            height: rows.len() as u32,
            grid: rows.iter().map(|r| r.to_string()).collect(),
            segments: Vec::new(),
            io_count: 0,
        };
        let mut q = doc.to_qcb()?;
        q.segments.clear();
        q.infer_segments(binding);
        Ok(q)
    }

    fn infer_segments(&mut self, binding: Option<&str>) {
        self.resegment_registers();
        for comp in self.components(|c| self.get(c) == PatchType::Extern) {
            let r0 = comp.iter().map(|c| c.row).min().unwrap_or(0);
            let r1 = comp.iter().map(|c| c.row).max().unwrap_or(0);
            let c0 = comp.iter().map(|c| c.col).min().unwrap_or(0);
            let c1 = comp.iter().map(|c| c.col).max().unwrap_or(0);
            self.segments.push(Segment {
                bounds: Rect::new(r0, c0, c1 - c0 + 1, r1 - r0 + 1),
                kind: PatchType::Extern,
                extern_binding: binding.map(str::to_string),
            });
        }
        let io: Vec<Coord> = self
            .coords()
            .filter(|&c| self.get(c) == PatchType::Io)
            .collect();
        if let Some(first) = io.first() {
            self.segments.push(Segment {
                bounds: Rect::new(first.row, first.col, io.len() as u32, 1),
                kind: PatchType::Io,
                extern_binding: None,
            });
            self.io_count = io.len() as u32;
        }
    }
}
