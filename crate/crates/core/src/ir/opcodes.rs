//! Native opcode table.

use super::Boundary;

#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Locality {
    /// Tracked in the Pauli frame; no patch operation.
    Pauli,
    /// Acts on the patch alone.
    Local,
    /// Needs one route ancilla adjacent to the patch.
    AncillaUnary,
    /// Boundary rotation: patch plus one adjacent route ancilla.
    Rotation,
    /// Merge between several patches over the bus.
    NonLocal,
    /// Consumes a magic state delivered by an extern.
    Consume,
    /// Placeholder that must be lowered by rotation synthesis.
    Synthesized,
}

#[derive(Clone, Copy, Debug)]
pub struct OpcodeInfo {
    pub name: &'static str,
    pub min_arity: usize,
    pub max_arity: Option<usize>,
    pub locality: Locality,
    /// Resource kind this opcode consumes (`T` or `CCZ`).
    pub resource: Option<&'static str>,
}

impl OpcodeInfo {
    const fn unary(name: &'static str, locality: Locality) -> Self {
        OpcodeInfo {
            name,
            min_arity: 1,
            max_arity: Some(1),
            locality,
            resource: None,
        }
    }

    pub fn arity_ok(&self, n: usize) -> bool {
        n >= self.min_arity && self.max_arity.is_none_or(|m| n <= m)
    }

    pub fn arity_text(&self) -> String {
        match self.max_arity {
            Some(m) if m == self.min_arity => m.to_string(),
            Some(m) => format!("{}..={}", self.min_arity, m),
            None => format!("at least {}", self.min_arity),
        }
    }

    /// Boundary each operand must expose for the merge.
    pub fn boundaries(&self, n: usize) -> Vec<Boundary> {
        match self.name {
            "CNOT" => (0..n)
                .map(|i| if i == 0 { Boundary::Z } else { Boundary::X })
                .collect(),
            "CZ" | "S" | "Sdg" | "T" | "Tdg" | "CCZ" => vec![Boundary::Z; n],
            _ => vec![Boundary::Either; n],
        }
    }
}

pub fn canonical(op: &str) -> &str {
    match op {
        "CX" | "cx" | "cnot" => "CNOT",
        "cz" => "CZ",
        "Sdag" | "SDG" | "sdg" => "Sdg",
        "Tdag" | "TDG" | "tdg" => "Tdg",
        "Prep0" => "PrepZ",
        "PrepPlus" => "PrepX",
        "MeasureZ" => "MeasZ",
        "MeasureX" => "MeasX",
        "RZ" | "rz" => "Rz",
        other => other,
    }
}

pub fn native(op: &str) -> Option<OpcodeInfo> {
    use Locality::*;
    let info = match op {
        "PrepZ" | "PrepX" | "MeasX" | "MeasZ" | "H" => OpcodeInfo::unary(
            match op {
                "PrepZ" => "PrepZ",
                "PrepX" => "PrepX",
                "MeasX" => "MeasX",
                "MeasZ" => "MeasZ",
                _ => "H",
            },
            Local,
        ),
        "X" => OpcodeInfo::unary("X", Pauli),
        "Z" => OpcodeInfo::unary("Z", Pauli),
        "S" => OpcodeInfo::unary("S", AncillaUnary),
        "Sdg" => OpcodeInfo::unary("Sdg", AncillaUnary),
        "Rotate" => OpcodeInfo::unary("Rotate", Rotation),
        "Rz" => OpcodeInfo::unary("Rz", Synthesized),
        "T" | "Tdg" => OpcodeInfo {
            resource: Some("T"),
            ..OpcodeInfo::unary(if op == "T" { "T" } else { "Tdg" }, Consume)
        },
        "CCZ" => OpcodeInfo {
            name: "CCZ",
            min_arity: 3,
            max_arity: Some(3),
            locality: Consume,
            resource: Some("CCZ"),
        },
        "CNOT" | "CZ" => OpcodeInfo {
            name: if op == "CNOT" { "CNOT" } else { "CZ" },
            min_arity: 2,
            max_arity: None,
            locality: NonLocal,
            resource: None,
        },
        _ => return None,
    };
    Some(info)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        assert_eq!(canonical("CX"), "CNOT");
        assert_eq!(canonical("Tdag"), "Tdg");
        assert_eq!(canonical("H"), "H");
    }

    #[test]
    fn cnot_boundaries() {
        let info = native("CNOT").unwrap();
        assert_eq!(
            info.boundaries(3),
            vec![Boundary::Z, Boundary::X, Boundary::X]
        );
        assert!(info.arity_ok(3));
        assert!(!info.arity_ok(1));
    }
}
