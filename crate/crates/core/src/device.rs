//! Device specification: board size, code distance and the native gate-cost table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::FORMAT_VERSION;

/// Which boundary type faces up/down on a freshly initialised patch.
#[derive(Clone, Copy, Debug, Default, Eq, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConvention {
    /// Z boundaries on top and bottom, X on left and right.
    #[default]
    ZVertical,
    /// X boundaries on top and bottom, Z on left and right.
    XVertical,
}

/// Cycle cost (in tocs) of every native opcode, plus the transfer cost
/// charged when qubits are moved into and out of an extern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateCosts(BTreeMap<String, u64>);

pub const DEFAULT_COSTS: &[(&str, u64)] = &[
    ("PrepZ", 1),
    ("PrepX", 1),
    ("MeasX", 1),
    ("MeasZ", 1),
    ("X", 0),
    ("Z", 0),
    ("H", 3),
    ("S", 2),
    ("Sdg", 2),
    ("CNOT", 2),
    ("CZ", 2),
    ("T", 2),
    ("Tdg", 2),
    ("CCZ", 2),
    ("Rotate", 3),
    ("Transfer", 2),
];

impl Default for GateCosts {
    fn default() -> Self {
        GateCosts(
            DEFAULT_COSTS
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        )
    }
}

impl GateCosts {
    /// Defaults overlaid with the given overrides.
    pub fn with_overrides(overrides: &BTreeMap<String, u64>) -> Self {
        let mut costs = GateCosts::default();
        for (k, v) in overrides {
            costs.0.insert(k.clone(), *v);
        }
        costs
    }

    pub fn get(&self, opcode: &str) -> Option<u64> {
        self.0.get(opcode).copied()
    }

    pub fn cost(&self, opcode: &str) -> u64 {
        self.get(opcode).unwrap_or(0)
    }

    pub fn set(&mut self, opcode: &str, tocs: u64) {
        self.0.insert(opcode.to_string(), tocs);
    }

    pub fn entries(&self) -> &BTreeMap<String, u64> {
        &self.0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DeviceError {
    #[error("device spec is malformed: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("board must be at least 2x2, got {width}x{height}")]
    TooSmall { width: u32, height: u32 },
    #[error("board of {0} patches is too large")]
    TooLarge(u64),
    #[error("code distance must be positive")]
    ZeroDistance,
    #[error("unknown opcode `{0}` in gate cost table")]
    UnknownCost(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub width: u32,
    pub height: u32,
    #[serde(default = "default_distance")]
    pub code_distance: u32,
    #[serde(default, with = "cost_overrides")]
    pub gate_costs: GateCosts,
    #[serde(default)]
    pub boundary_convention: BoundaryConvention,
}

/// Largest board a device may describe, in patches.
const MAX_AREA: u64 = 1 << 22;

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn default_distance() -> u32 {
    7
}

mod cost_overrides {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(costs: &GateCosts, s: S) -> Result<S::Ok, S::Error> {
        costs.0.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<GateCosts, D::Error> {
        let overrides = BTreeMap::<String, u64>::deserialize(d)?;
        Ok(GateCosts::with_overrides(&overrides))
    }
}

impl DeviceSpec {
    pub fn new(width: u32, height: u32) -> Self {
        DeviceSpec {
            format_version: FORMAT_VERSION,
            width,
            height,
            code_distance: default_distance(),
            gate_costs: GateCosts::default(),
            boundary_convention: BoundaryConvention::default(),
        }
    }

    pub fn parse(source: &str) -> Result<Self, DeviceError> {
        let spec: DeviceSpec = serde_json::from_str(source)?;
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), DeviceError> {
        if self.width < 2 || self.height < 2 {
            return Err(DeviceError::TooSmall {
                width: self.width,
                height: self.height,
            });
        }
        let area = self.width as u64 * self.height as u64;
        if area > MAX_AREA {
            return Err(DeviceError::TooLarge(area));
        }
        if self.code_distance == 0 {
            return Err(DeviceError::ZeroDistance);
        }
        let known: Vec<&str> = DEFAULT_COSTS.iter().map(|(k, _)| *k).collect();
        if let Some(bad) = self
            .gate_costs
            .entries()
            .keys()
            .find(|k| !known.contains(&k.as_str()))
        {
            return Err(DeviceError::UnknownCost(bad.clone()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device spec serializes")
    }
}
