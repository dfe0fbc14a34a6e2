use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScuError};
use crate::pauli::{Pauli, PauliString};

/// Gate set of the simulator. Angles follow `PauliRotation(P, θ) = exp(−iθP/2)`
/// and `Phase(θ) = diag(1, e^{iθ})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    H {
        qubit: usize,
    },
    X {
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Phase {
        qubit: usize,
        angle: f64,
    },
    /// Applies the string including its phase prefactor.
    Pauli {
        pauli: PauliString,
    },
    PauliRotation {
        pauli: PauliString,
        angle: f64,
    },
    ControlledPauli {
        control: usize,
        pauli: PauliString,
    },
    ControlledPauliRotation {
        control: usize,
        pauli: PauliString,
        angle: f64,
    },
    /// Rotates `qubit` into the X basis so that a computational-basis readout measures X.
    AncillaXMeasure {
        qubit: usize,
    },
}

impl Gate {
    pub fn inverse(&self) -> Result<Gate> {
        Ok(match self {
            Gate::H { .. } | Gate::X { .. } | Gate::Cnot { .. } => self.clone(),
            Gate::Phase { qubit, angle } => Gate::Phase {
                qubit: *qubit,
                angle: -angle,
            },
            Gate::Pauli { pauli } => Gate::Pauli {
                pauli: pauli.adjoint(),
            },
            Gate::PauliRotation { pauli, angle } => Gate::PauliRotation {
                pauli: pauli.clone(),
                angle: -angle,
            },
            Gate::ControlledPauli { control, pauli } => Gate::ControlledPauli {
                control: *control,
                pauli: pauli.adjoint(),
            },
            Gate::ControlledPauliRotation {
                control,
                pauli,
                angle,
            } => Gate::ControlledPauliRotation {
                control: *control,
                pauli: pauli.clone(),
                angle: -angle,
            },
            Gate::AncillaXMeasure { .. } => {
                return Err(ScuError::NotInvertible("measurement basis change".into()))
            }
        })
    }

    pub fn controlled(&self, control: usize) -> Result<Gate> {
        let g = match self {
            Gate::X { qubit } => Gate::ControlledPauli {
                control,
                pauli: PauliString::single(qubit + 1, *qubit, Pauli::X),
            },
            Gate::Pauli { pauli } => Gate::ControlledPauli {
                control,
                pauli: pauli.clone(),
            },
            Gate::PauliRotation { pauli, angle } => Gate::ControlledPauliRotation {
                control,
                pauli: pauli.clone(),
                angle: *angle,
            },
            other => return Err(ScuError::UnsupportedControlled(other.name().into())),
        };
        if self.qubits().contains(&control) {
            return Err(ScuError::InvalidParameter(format!(
                "control qubit {control} overlaps the target"
            )));
        }
        Ok(g)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Cnot { .. } => "cnot",
            Gate::Phase { .. } => "phase",
            Gate::Pauli { .. } => "pauli",
            Gate::PauliRotation { .. } => "pauli_rotation",
            Gate::ControlledPauli { .. } => "controlled_pauli",
            Gate::ControlledPauliRotation { .. } => "controlled_pauli_rotation",
            Gate::AncillaXMeasure { .. } => "ancilla_x_measure",
        }
    }

    /// Qubits the gate acts on, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { qubit }
            | Gate::X { qubit }
            | Gate::Phase { qubit, .. }
            | Gate::AncillaXMeasure { qubit } => vec![*qubit],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Pauli { pauli } | Gate::PauliRotation { pauli, .. } => pauli.support(),
            Gate::ControlledPauli { control, pauli }
            | Gate::ControlledPauliRotation { control, pauli, .. } => {
                let mut q = pauli.support();
                q.push(*control);
                q
            }
        }
    }

    /// Smallest register that holds the gate.
    pub fn min_register(&self) -> usize {
        let pauli_width = match self {
            Gate::Pauli { pauli }
            | Gate::PauliRotation { pauli, .. }
            | Gate::ControlledPauli { pauli, .. }
            | Gate::ControlledPauliRotation { pauli, .. } => pauli.n_qubits(),
            _ => 0,
        };
        self.qubits()
            .iter()
            .map(|q| q + 1)
            .max()
            .unwrap_or(0)
            .max(pauli_width)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H { qubit } => write!(f, "h {qubit}"),
            Gate::X { qubit } => write!(f, "x {qubit}"),
            Gate::Cnot { control, target } => write!(f, "cnot {control} {target}"),
            Gate::Phase { qubit, angle } => write!(f, "phase {qubit} {angle:.16e}"),
            Gate::Pauli { pauli } => write!(f, "pauli {pauli}"),
            Gate::PauliRotation { pauli, angle } => write!(f, "rot {pauli} {angle:.16e}"),
            Gate::ControlledPauli { control, pauli } => write!(f, "c-pauli {control} {pauli}"),
            Gate::ControlledPauliRotation {
                control,
                pauli,
                angle,
            } => write!(f, "c-rot {control} {pauli} {angle:.16e}"),
            Gate::AncillaXMeasure { qubit } => write!(f, "measure-x {qubit}"),
        }
    }
}

/// Gates in application order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateSequence {
    gates: Vec<Gate>,
}

impl From<Vec<Gate>> for GateSequence {
    fn from(gates: Vec<Gate>) -> Self {
        GateSequence { gates }
    }
}

impl GateSequence {
    pub fn new() -> Self {
        GateSequence::default()
    }

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn extend(&mut self, other: &GateSequence) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reversed sequence of inverted gates.
    pub fn inverse(&self) -> Result<GateSequence> {
        let gates = self
            .gates
            .iter()
            .rev()
            .map(Gate::inverse)
            .collect::<Result<Vec<_>>>()?;
        Ok(GateSequence { gates })
    }

    pub fn controlled(&self, control: usize) -> Result<GateSequence> {
        let gates = self
            .gates
            .iter()
            .map(|g| g.controlled(control))
            .collect::<Result<Vec<_>>>()?;
        Ok(GateSequence { gates })
    }

    pub fn min_register(&self) -> usize {
        self.gates.iter().map(Gate::min_register).max().unwrap_or(0)
    }
}

impl fmt::Display for GateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}
