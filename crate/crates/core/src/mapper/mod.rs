//! Assignment of register symbols to physical patches.

mod allocate;
mod cleanup;
mod tree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::device::BoundaryConvention;
use crate::geom::{Coord, Side};
use crate::ir::{Boundary, CircuitDag, RegisterSymbol};
use crate::qcb::Qcb;

pub use allocate::{allocate_symbols, contention, place_within_register};
pub use cleanup::{cleanup_qcb, tag_orientation};
pub use tree::{build_tree, RouteTree, TreeNode};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MapError {
    #[error("bus splits into {0} components; the board cannot be reduced to a tree")]
    DisconnectedBus(usize),
    #[error("{symbols} symbols do not fit {capacity} register patches")]
    InsufficientRegisters { symbols: usize, capacity: usize },
    #[error("{symbols} symbols overflow a register run of length {length}")]
    Overflow { symbols: usize, length: usize },
    #[error("circuit declares {circuit} IO symbols but the board has {board} IO patches")]
    IoMismatch { circuit: usize, board: usize },
    #[error("malformed qubit map: {0}")]
    Malformed(String),
}

/// Whether a patch should reach a missing boundary by routing around to it or
/// by rotating in place.
#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Route,
    #[default]
    Rotate,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize, Deserialize)]
pub struct MappedPatch {
    pub patch: Coord,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, Default, Eq, PartialEq)]
pub struct QubitMap {
    pub entries: BTreeMap<RegisterSymbol, MappedPatch>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    #[serde(default = "crate::format_version")]
    format_version: u32,
    entries: BTreeMap<RegisterSymbol, MappedPatch>,
}

impl QubitMap {
    pub fn get(&self, s: &RegisterSymbol) -> Option<Coord> {
        self.entries.get(s).map(|m| m.patch)
    }

    pub fn orientation(&self, s: &RegisterSymbol) -> Orientation {
        self.entries
            .get(s)
            .map(|m| m.orientation)
            .unwrap_or_default()
    }

    pub fn insert(&mut self, s: RegisterSymbol, patch: Coord) {
        self.entries.insert(
            s,
            MappedPatch {
                patch,
                orientation: Orientation::default(),
            },
        );
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbol_at(&self, c: Coord) -> Option<&RegisterSymbol> {
        self.entries
            .iter()
            .find(|(_, m)| m.patch == c)
            .map(|(s, _)| s)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.entries.values().all(|m| seen.insert(m.patch))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MapDoc {
            format_version: crate::FORMAT_VERSION,
            entries: self.entries.clone(),
        })
        .expect("map serializes")
    }

    pub fn parse(source: &str) -> Result<Self, MapError> {
        let doc: MapDoc =
            serde_json::from_str(source).map_err(|e| MapError::Malformed(e.to_string()))?;
        let map = QubitMap {
            entries: doc.entries,
        };
        if !map.is_injective() {
            return Err(MapError::Malformed("two symbols share a patch".into()));
        }
        Ok(map)
    }
}

/// Sides carrying a given boundary type on an unrotated patch.
pub fn sides_of(boundary: Boundary, convention: BoundaryConvention, rotated: bool) -> [Side; 2] {
    let z_vertical = matches!(convention, BoundaryConvention::ZVertical) != rotated;
    let vertical = match boundary {
        Boundary::Z => z_vertical,
        Boundary::X => !z_vertical,
        Boundary::Either => true,
    };
    if vertical {
        [Side::Top, Side::Bottom]
    } else {
        [Side::Left, Side::Right]
    }
}

/// Full mapping stage: tree, allocation, cleanup and orientation tagging.
pub fn map_qubits(
    qcb: &Qcb,
    dag: &CircuitDag,
    convention: BoundaryConvention,
) -> Result<(Qcb, QubitMap), MapError> {
    let mut tree = build_tree(qcb)?;
    let map = allocate_symbols(&mut tree, qcb, dag)?;
    let board = cleanup_qcb(qcb, &map);
    let map = tag_orientation(&board, &map, convention);
    Ok((board, map))
}
