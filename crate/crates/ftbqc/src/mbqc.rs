//! Cluster-state preparation of blind encoded qubits.
//!
//! The 7-qubit encoding circuit is compiled gate-by-gate onto an abstract
//! cluster graph: single-qubit steps use the 1D-wire identity (measuring a
//! node in M(delta) teleports X^s H Rz(-delta) onto its successor), and each
//! CNOT becomes an H-CZ-H window on the target wire with a bridge edge to
//! the control wire's frontier node. Only M(0) and computational bases
//! appear, so the pattern is independent of the input polarization.
//!
//! Execution is lazy: a node is attached to the simulated register only
//! once a measurement needs it, which keeps the live register far below
//! the dense-simulation cap even though the full pattern has 32 nodes.
//! Byproducts are tracked as classical Pauli frames per node and applied
//! as actual gates on the seven output qubits at the end.

use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::pauli::PauliOperator;
use crate::state::{plus_theta, Gate, StateVector};
use rand::Rng;
use std::fmt::Write as _;

/// Measurement basis assigned to a pattern node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeBasis {
    /// Computational {|0>, |1>} measurement (redundant-node elimination).
    Computational,
    /// M(delta) measurement in the equator basis (|0> +/- e^{i delta}|1>)/sqrt(2).
    Planar(f64),
}

/// A compiled cluster-state measurement pattern.
#[derive(Debug, Clone)]
pub struct MeasurementPattern {
    pub graph: GraphSpec,
    /// Node holding the rotated input qubit.
    pub input: usize,
    /// Nodes in measurement order; exactly the non-output nodes.
    pub order: Vec<usize>,
    /// Basis per node; None marks an output.
    pub basis: Vec<Option<NodeBasis>>,
    /// Flow successor of each planar-measured node.
    pub successor: Vec<Option<usize>>,
    /// Output nodes in code-qubit order.
    pub outputs: Vec<usize>,
    /// X-correction sources per node (outcomes that flip this node's X frame).
    pub x_deps: Vec<Vec<usize>>,
    /// Z-correction sources per node.
    pub z_deps: Vec<Vec<usize>>,
}

impl MeasurementPattern {
    /// Nodes that are neither outputs nor the input.
    pub fn ancilla_count(&self) -> usize {
        self.graph.num_nodes() - self.outputs.len() - 1
    }

    /// Checks the structural invariants: outputs unmeasured, every other
    /// node measured exactly once, successors are neighbors, and every
    /// dependency references a strictly earlier node in the order.
    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_nodes();
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in self.order.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidPattern(format!("order references node {v}")));
            }
            if rank[v] != usize::MAX {
                return Err(Error::InvalidPattern(format!("node {v} measured twice")));
            }
            rank[v] = i;
        }
        for &o in &self.outputs {
            if rank[o] != usize::MAX {
                return Err(Error::InvalidPattern(format!("output node {o} is measured")));
            }
            if self.basis[o].is_some() {
                return Err(Error::InvalidPattern(format!(
                    "output node {o} carries a basis"
                )));
            }
        }
        if self.order.len() + self.outputs.len() != n {
            return Err(Error::InvalidPattern(
                "order and outputs must partition the nodes".into(),
            ));
        }
        for &v in &self.order {
            if self.basis[v].is_none() {
                return Err(Error::InvalidPattern(format!("node {v} lacks a basis")));
            }
            if let Some(f) = self.successor[v] {
                if !self.graph.has_edge(v, f) {
                    return Err(Error::InvalidPattern(format!(
                        "successor {f} of {v} is not a neighbor"
                    )));
                }
            } else if matches!(self.basis[v], Some(NodeBasis::Planar(_))) {
                return Err(Error::InvalidPattern(format!(
                    "planar node {v} lacks a flow successor"
                )));
            }
        }
        for v in 0..n {
            for &src in self.x_deps[v].iter().chain(&self.z_deps[v]) {
                let src_rank = rank[src];
                if src_rank == usize::MAX {
                    return Err(Error::InvalidPattern(format!(
                        "dependency source {src} is never measured"
                    )));
                }
                if rank[v] != usize::MAX && src_rank >= rank[v] {
                    return Err(Error::InvalidPattern(format!(
                        "node {v} depends on later node {src}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Text export: node records in measurement order (then outputs), edge
    /// records, and dependency records, one per line.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for &v in &self.order {
            let basis = match self.basis[v] {
                Some(NodeBasis::Computational) => "comp".to_string(),
                Some(NodeBasis::Planar(d)) => format!("M({d})"),
                None => "-".to_string(),
            };
            let role = if v == self.input { "input" } else { "ancilla" };
            writeln!(out, "node {v} {role} {basis}").unwrap();
        }
        for &o in &self.outputs {
            writeln!(out, "node {o} output -").unwrap();
        }
        for &(u, v) in self.graph.edges() {
            writeln!(out, "edge {u} {v}").unwrap();
        }
        for v in 0..self.graph.num_nodes() {
            if self.x_deps[v].is_empty() && self.z_deps[v].is_empty() {
                continue;
            }
            let fmt = |deps: &[usize]| {
                if deps.is_empty() {
                    "-".to_string()
                } else {
                    deps.iter()
                        .map(|d| d.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                }
            };
            writeln!(
                out,
                "deps {v} x:{} z:{}",
                fmt(&self.x_deps[v]),
                fmt(&self.z_deps[v])
            )
            .unwrap();
        }
        out
    }
}

/// Result of executing a preparation pattern.
#[derive(Debug, Clone)]
pub struct PreparationReport {
    /// The corrected 7-qubit block, qubits in code order.
    pub block: StateVector,
    /// Input polarization angle.
    pub theta: f64,
    /// The Pauli correction that was applied to the outputs.
    pub byproduct: PauliOperator,
    /// Non-output, non-input node count of the pattern.
    pub ancilla_count: usize,
}

struct PatternBuilder {
    graph: GraphSpec,
    basis: Vec<Option<NodeBasis>>,
    successor: Vec<Option<usize>>,
    order: Vec<usize>,
    frontier: Vec<usize>,
}

impl PatternBuilder {
    fn new(wires: usize) -> Self {
        let mut graph = GraphSpec::new(0);
        let mut frontier = Vec::new();
        for _ in 0..wires {
            frontier.push(graph.add_node());
        }
        let n = graph.num_nodes();
        PatternBuilder {
            graph,
            basis: vec![None; n],
            successor: vec![None; n],
            order: Vec::new(),
            frontier,
        }
    }

    fn add_node(&mut self) -> usize {
        let v = self.graph.add_node();
        self.basis.push(None);
        self.successor.push(None);
        v
    }

    /// Advances a wire by one M(angle) step (one teleportation).
    fn wire_step(&mut self, wire: usize, angle: f64) {
        let v = self.frontier[wire];
        let next = self.add_node();
        self.graph.add_edge(v, next).expect("fresh node");
        self.basis[v] = Some(NodeBasis::Planar(angle));
        self.successor[v] = Some(next);
        self.order.push(v);
        self.frontier[wire] = next;
    }

    /// CNOT window: H on the target wire, CZ bridge to the control wire's
    /// frontier, H on the target wire again.
    fn cnot_window(&mut self, control: usize, target: usize) {
        let t = self.frontier[target];
        let bridge = self.add_node();
        let landing = self.add_node();
        self.graph.add_edge(t, bridge).expect("fresh node");
        self.graph.add_edge(bridge, landing).expect("fresh node");
        self.graph
            .add_edge(bridge, self.frontier[control])
            .expect("distinct wires");
        self.basis[t] = Some(NodeBasis::Planar(0.0));
        self.successor[t] = Some(bridge);
        self.order.push(t);
        self.basis[bridge] = Some(NodeBasis::Planar(0.0));
        self.successor[bridge] = Some(landing);
        self.order.push(bridge);
        self.frontier[target] = landing;
    }

    fn finish(self, input: usize, outputs: Vec<usize>) -> MeasurementPattern {
        let n = self.graph.num_nodes();
        let mut x_deps = vec![Vec::new(); n];
        let mut z_deps = vec![Vec::new(); n];
        for &v in &self.order {
            match self.basis[v] {
                Some(NodeBasis::Planar(_)) => {
                    let f = self.successor[v].expect("planar nodes have successors");
                    x_deps[f].push(v);
                    for k in self.graph.neighbors(f) {
                        if k != v {
                            z_deps[k].push(v);
                        }
                    }
                }
                Some(NodeBasis::Computational) => {
                    for k in self.graph.neighbors(v) {
                        z_deps[k].push(v);
                    }
                }
                None => {}
            }
        }
        MeasurementPattern {
            graph: self.graph,
            input,
            order: self.order,
            basis: self.basis,
            successor: self.successor,
            outputs,
            x_deps,
            z_deps,
        }
    }
}

/// The encoding circuit for one data qubit and six ancillas: the data
/// imprint CNOTs write the weight-3 logical-X coset representative, then
/// each Hadamard-prepared pivot imprints one X-type generator row.
/// Entries are (gate, qubits) over circuit positions 0..6.
const ENCODER_GATES: &[(Gate, &[usize])] = &[
    (Gate::Cnot, &[2, 4]),
    (Gate::Cnot, &[2, 5]),
    (Gate::H, &[0]),
    (Gate::Cnot, &[0, 2]),
    (Gate::Cnot, &[0, 4]),
    (Gate::Cnot, &[0, 6]),
    (Gate::H, &[1]),
    (Gate::Cnot, &[1, 2]),
    (Gate::Cnot, &[1, 5]),
    (Gate::Cnot, &[1, 6]),
    (Gate::H, &[3]),
    (Gate::Cnot, &[3, 4]),
    (Gate::Cnot, &[3, 5]),
    (Gate::Cnot, &[3, 6]),
];

/// Encodes a single-qubit state into the 7-qubit code by direct circuit
/// application: alpha|0> + beta|1> maps to alpha|0>_L + beta|1>_L exactly.
pub fn encode_by_circuit(input: &StateVector) -> Result<StateVector> {
    if input.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: input.num_qubits(),
        });
    }
    let mut state = StateVector::zero(2)?.tensor(input)?.tensor(&StateVector::zero(4)?)?;
    for (gate, qubits) in ENCODER_GATES {
        state.apply_gate(*gate, qubits)?;
    }
    Ok(state)
}

/// Applies the encoding circuit inside a larger register: `data` is the
/// qubit to encode and `ancillas` are six fresh |0> qubits. After the call
/// the seven qubits in circuit order are
/// [ancillas[0], ancillas[1], data, ancillas[2..6]].
pub fn encode_into_register(
    register: &mut StateVector,
    data: usize,
    ancillas: &[usize; 6],
) -> Result<[usize; 7]> {
    let map = [
        ancillas[0],
        ancillas[1],
        data,
        ancillas[2],
        ancillas[3],
        ancillas[4],
        ancillas[5],
    ];
    for (gate, qubits) in ENCODER_GATES {
        let targets: Vec<usize> = qubits.iter().map(|&q| map[q]).collect();
        register.apply_gate(*gate, &targets)?;
    }
    Ok(map)
}

/// Compiles the encoding circuit to a cluster-state measurement pattern.
/// The pattern's graph and bases never depend on the input polarization.
pub fn compile_encoding_pattern() -> MeasurementPattern {
    let mut b = PatternBuilder::new(7);
    let input = b.frontier[2];
    // Wires 4..6 (circuit qubits 5..7) start in |0> = H|+>: one M(0) step.
    for wire in [4, 5, 6] {
        b.wire_step(wire, 0.0);
    }
    // Gate order preserves the circuit: the data-imprint CNOTs act before
    // the pivot rows touch wire 2.
    for (control, target) in [
        (2, 4),
        (2, 5),
        (0, 2),
        (0, 4),
        (0, 6),
        (1, 2),
        (1, 5),
        (1, 6),
        (3, 4),
        (3, 5),
        (3, 6),
    ] {
        b.cnot_window(control, target);
    }
    let outputs = b.frontier.clone();
    let pattern = b.finish(input, outputs);
    debug_assert!(pattern.validate().is_ok());
    pattern
}

/// Classical Pauli frames plus the live register of a lazy execution.
struct Executor<'a> {
    pattern: &'a MeasurementPattern,
    register: StateVector,
    /// Register qubit order: alive[i] is the node at qubit i.
    alive: Vec<usize>,
    attached: Vec<bool>,
    fired: Vec<bool>,
    fx: Vec<bool>,
    fz: Vec<bool>,
    signals: Vec<u8>,
}

impl<'a> Executor<'a> {
    fn new(pattern: &'a MeasurementPattern) -> Self {
        let n = pattern.graph.num_nodes();
        Executor {
            pattern,
            register: StateVector::zero(0).expect("empty register"),
            alive: Vec::new(),
            attached: vec![false; n],
            fired: vec![false; pattern.graph.edges().len()],
            fx: vec![false; n],
            fz: vec![false; n],
            signals: vec![0; n],
        }
    }

    fn qubit_of(&self, node: usize) -> usize {
        self.alive
            .iter()
            .position(|&v| v == node)
            .expect("node is alive")
    }

    fn attach(&mut self, node: usize, state: &StateVector) -> Result<()> {
        self.register = self.register.tensor(state)?;
        self.alive.push(node);
        self.attached[node] = true;
        Ok(())
    }

    fn fire_edges_of(&mut self, node: usize, input_state: &StateVector) -> Result<()> {
        let edges: Vec<(usize, (usize, usize))> = self
            .pattern
            .graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, &(u, v))| !self.fired[*i] && (u == node || v == node))
            .map(|(i, &e)| (i, e))
            .collect();
        for (i, (u, v)) in edges {
            for w in [u, v] {
                if !self.attached[w] {
                    let st = if w == self.pattern.input {
                        input_state.clone()
                    } else {
                        plus_theta(0.0)
                    };
                    self.attach(w, &st)?;
                }
            }
            let qu = self.qubit_of(u);
            let qv = self.qubit_of(v);
            self.register.apply_gate(Gate::Cz, &[qu, qv])?;
            // Conjugating the pending frames through the CZ.
            let (fxu, fxv) = (self.fx[u], self.fx[v]);
            self.fz[u] ^= fxv;
            self.fz[v] ^= fxu;
            self.fired[i] = true;
        }
        Ok(())
    }

    fn measure<R: Rng + ?Sized>(
        &mut self,
        node: usize,
        input_state: &StateVector,
        rng: &mut R,
    ) -> Result<()> {
        if !self.attached[node] {
            let st = if node == self.pattern.input {
                input_state.clone()
            } else {
                plus_theta(0.0)
            };
            self.attach(node, &st)?;
        }
        self.fire_edges_of(node, input_state)?;
        let q = self.qubit_of(node);
        match self.pattern.basis[node].expect("measured nodes have a basis") {
            NodeBasis::Planar(delta) => {
                let phys = if self.fx[node] { -delta } else { delta };
                let s_phys = self.register.measure_mdelta(q, phys, rng)?;
                let s = s_phys ^ u8::from(self.fz[node]);
                self.signals[node] = s;
                self.alive.remove(q);
                if s == 1 {
                    // Lazy-network correction: only X on the flow successor.
                    // The Z side-effects on the successor's other neighbors
                    // emerge from frame conjugation when those edges fire,
                    // which is valid precisely because none of them has
                    // fired yet.
                    let f = self.pattern.successor[node].expect("planar flow");
                    for (i, &(u, v)) in self.pattern.graph.edges().iter().enumerate() {
                        let other = if u == f {
                            v
                        } else if v == f {
                            u
                        } else {
                            continue;
                        };
                        if self.fired[i] && other != node {
                            return Err(Error::InvalidPattern(format!(
                                "edge ({f}, {other}) fired before source {node} was measured"
                            )));
                        }
                    }
                    self.fx[f] ^= true;
                }
            }
            NodeBasis::Computational => {
                let s_phys = self.register.measure_computational(q, rng)?;
                let s = s_phys ^ u8::from(self.fx[node]);
                self.signals[node] = s;
                self.alive.remove(q);
                if s == 1 {
                    for k in self.pattern.graph.neighbors(node) {
                        self.fz[k] ^= true;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies accumulated frames to the outputs and reorders the register
    /// into the pattern's output order.
    fn finish(mut self) -> Result<(StateVector, PauliOperator, Vec<u8>)> {
        let outs = &self.pattern.outputs;
        let mut byproduct = PauliOperator::identity(outs.len());
        for (i, &o) in outs.iter().enumerate() {
            if self.fx[o] {
                byproduct.mul_x(i);
            }
            if self.fz[o] {
                byproduct.mul_z(i);
            }
        }
        // Frames in register coordinates.
        let mut reg_pauli = PauliOperator::identity(self.alive.len());
        for (q, &node) in self.alive.iter().enumerate() {
            if self.fx[node] {
                reg_pauli.mul_x(q);
            }
            if self.fz[node] {
                reg_pauli.mul_z(q);
            }
        }
        self.register.apply_pauli(&reg_pauli)?;
        // Permute qubits into output order.
        let perm: Vec<usize> = outs.iter().map(|&o| self.qubit_of(o)).collect();
        let block = permute_qubits(&self.register, &perm)?;
        Ok((block, byproduct, self.signals))
    }
}

/// Reorders qubits: result qubit i is source qubit perm[i].
fn permute_qubits(state: &StateVector, perm: &[usize]) -> Result<StateVector> {
    let n = state.num_qubits();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut amps = vec![num_complex::Complex64::ZERO; 1 << n];
    for new_idx in 0..amps.len() {
        let mut old_idx = 0usize;
        for (i, &p) in perm.iter().enumerate() {
            if new_idx >> i & 1 == 1 {
                old_idx |= 1 << p;
            }
        }
        amps[new_idx] = state.amplitude(old_idx);
    }
    StateVector::from_amplitudes(n, amps)
}

/// Executes a pattern on the given single-qubit input state. Returns the
/// corrected output block (qubits in output order), the byproduct that was
/// applied, and the per-node corrected signals.
pub fn execute_pattern<R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    input_state: &StateVector,
    rng: &mut R,
) -> Result<(StateVector, PauliOperator, Vec<u8>)> {
    pattern.validate()?;
    if input_state.num_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: input_state.num_qubits(),
        });
    }
    let mut exec = Executor::new(pattern);
    let order = pattern.order.clone();
    for node in order {
        exec.measure(node, input_state, rng)?;
    }
    // Any edge between two outputs still needs its CZ.
    let outputs = pattern.outputs.clone();
    for &o in &outputs {
        if exec.attached[o] {
            continue;
        }
        let st = if o == pattern.input {
            input_state.clone()
        } else {
            plus_theta(0.0)
        };
        exec.attach(o, &st)?;
    }
    for i in 0..pattern.graph.edges().len() {
        if !exec.fired[i] {
            let (u, v) = pattern.graph.edges()[i];
            let qu = exec.qubit_of(u);
            let qv = exec.qubit_of(v);
            exec.register.apply_gate(Gate::Cz, &[qu, qv])?;
            let (fxu, fxv) = (exec.fx[u], exec.fx[v]);
            exec.fz[u] ^= fxv;
            exec.fz[v] ^= fxu;
            exec.fired[i] = true;
        }
    }
    exec.finish()
}

/// Runs the compiled preparation pattern for polarization theta.
pub fn run_pattern<R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    theta: f64,
    rng: &mut R,
) -> Result<PreparationReport> {
    let input = plus_theta(theta);
    let (block, byproduct, _) = execute_pattern(pattern, &input, rng)?;
    Ok(PreparationReport {
        block,
        theta,
        byproduct,
        ancilla_count: pattern.ancilla_count(),
    })
}

/// Outcome record of a redundant-node elimination.
#[derive(Debug, Clone)]
pub struct EliminationReport {
    /// State with the listed nodes removed.
    pub state: StateVector,
    /// (node, outcome) for each eliminated node, in elimination order.
    pub outcomes: Vec<(usize, u8)>,
    /// Surviving nodes carrying an uncorrected Z byproduct.
    pub z_byproducts: Vec<usize>,
}

/// Measures the listed cluster nodes in the computational basis and records
/// the Z byproducts their outcomes leave on surviving neighbors. The state
/// is assumed to have node i of the graph on qubit i.
pub fn eliminate_redundant<R: Rng + ?Sized>(
    state: &StateVector,
    graph: &GraphSpec,
    nodes: &[usize],
    rng: &mut R,
) -> Result<EliminationReport> {
    if state.num_qubits() != graph.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_nodes(),
            got: state.num_qubits(),
        });
    }
    let mut alive: Vec<usize> = (0..graph.num_nodes()).collect();
    let mut working = state.clone();
    let mut outcomes = Vec::new();
    let mut z_frame = vec![false; graph.num_nodes()];
    for &node in nodes {
        let q = alive
            .iter()
            .position(|&v| v == node)
            .ok_or(Error::NodeAbsent(node))?;
        let s = working.measure_computational(q, rng)?;
        alive.remove(q);
        outcomes.push((node, s));
        if s == 1 {
            for k in graph.neighbors(node) {
                z_frame[k] ^= true;
            }
        }
    }
    let z_byproducts = alive
        .iter()
        .copied()
        .filter(|&v| z_frame[v])
        .collect();
    Ok(EliminationReport {
        state: working,
        outcomes,
        z_byproducts,
    })
}
