//! Dense pure-state simulation over at most 20 qubits.
//!
//! Qubit `q` of an n-qubit register corresponds to bit `q` of the amplitude
//! index. Measurements are destructive: the measured qubit is removed from
//! the register and the remaining qubits are re-indexed downwards, matching
//! the way measurement patterns consume cluster nodes.

use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::pauli::PauliOperator;
use num_complex::Complex64;
use rand::Rng;
use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

/// Hard cap on register width; 2^20 amplitudes keeps everything desk-scale.
pub const MAX_QUBITS: usize = 20;

/// Gates applicable through [`StateVector::apply_gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    /// Rz(phi) = diag(1, e^{i phi}).
    Rz(f64),
    Cz,
    Cnot,
    Swap,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::H | Gate::X | Gate::Y | Gate::Z | Gate::S | Gate::Rz(_) => 1,
            Gate::Cz | Gate::Cnot | Gate::Swap => 2,
        }
    }
}

/// A pure quantum state over `n` qubits as 2^n complex amplitudes.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on n qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::check_cap(n)?;
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n, amps })
    }

    /// The computational basis state with the given index.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_cap(n)?;
        if index >= 1 << n {
            return Err(Error::QubitOutOfRange { qubit: index, n });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[index] = Complex64::ONE;
        Ok(StateVector { n, amps })
    }

    /// |+>^n.
    pub fn plus(n: usize) -> Result<Self> {
        Self::check_cap(n)?;
        let dim = 1usize << n;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(StateVector {
            n,
            amps: vec![a; dim],
        })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::check_cap(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(StateVector { n, amps })
    }

    fn check_cap(n: usize) -> Result<()> {
        if n > MAX_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n,
                cap: MAX_QUBITS,
            });
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = norm.recip();
            for a in &mut self.amps {
                *a *= inv;
            }
        }
    }

    /// Tensor product self (low qubits) with other (high qubits).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n + other.n;
        Self::check_cap(n)?;
        let mut amps = vec![Complex64::ZERO; 1 << n];
        for (j, bj) in other.amps.iter().enumerate() {
            if *bj == Complex64::ZERO {
                continue;
            }
            let base = j << self.n;
            for (i, ai) in self.amps.iter().enumerate() {
                amps[base | i] = ai * bj;
            }
        }
        Ok(StateVector { n, amps })
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for &t in targets {
            if t >= self.n {
                return Err(Error::QubitOutOfRange { qubit: t, n: self.n });
            }
        }
        for (i, &a) in targets.iter().enumerate() {
            if targets[i + 1..].contains(&a) {
                return Err(Error::DuplicateTargets);
            }
        }
        Ok(())
    }

    /// Applies a gate to the given targets. Two-qubit gates read targets as
    /// [control, target] for CNOT and as an unordered pair for CZ/SWAP.
    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::DimensionMismatch {
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        self.check_targets(targets)?;
        match gate {
            Gate::H => {
                let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.map_pairs(targets[0], |a0, a1| (s * (a0 + a1), s * (a0 - a1)));
            }
            Gate::X => self.map_pairs(targets[0], |a0, a1| (a1, a0)),
            Gate::Y => {
                let i = Complex64::I;
                self.map_pairs(targets[0], move |a0, a1| (-i * a1, i * a0));
            }
            Gate::Z => self.map_pairs(targets[0], |a0, a1| (a0, -a1)),
            Gate::S => {
                let i = Complex64::I;
                self.map_pairs(targets[0], move |a0, a1| (a0, i * a1));
            }
            Gate::Rz(phi) => {
                let p = Complex64::from_polar(1.0, phi);
                self.map_pairs(targets[0], move |a0, a1| (a0, p * a1));
            }
            Gate::Cz => {
                let m = (1usize << targets[0]) | (1usize << targets[1]);
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if idx & m == m {
                        *a = -*a;
                    }
                }
            }
            Gate::Cnot => {
                let c = 1usize << targets[0];
                let t = 1usize << targets[1];
                for idx in 0..self.amps.len() {
                    if idx & c == c && idx & t == 0 {
                        self.amps.swap(idx, idx | t);
                    }
                }
            }
            Gate::Swap => {
                let a = 1usize << targets[0];
                let b = 1usize << targets[1];
                for idx in 0..self.amps.len() {
                    if idx & a == a && idx & b == 0 {
                        self.amps.swap(idx, (idx & !a) | b);
                    }
                }
            }
        }
        Ok(())
    }

    fn map_pairs<F>(&mut self, qubit: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let step = 1usize << qubit;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for idx in base..base + step {
                let (a0, a1) = f(self.amps[idx], self.amps[idx | step]);
                self.amps[idx] = a0;
                self.amps[idx | step] = a1;
            }
            base += step << 1;
        }
    }

    /// Applies a Pauli operator (including its global phase).
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<()> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: p.num_qubits(),
            });
        }
        let x = p.x_mask() as usize;
        let z = p.z_mask() as usize;
        let phase = p.phase().as_complex();
        let mut out = vec![Complex64::ZERO; self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            // X^x Z^z |b> = (-1)^{|b & z|} |b ^ x>
            let sign = if (idx & z).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[idx ^ x] = phase * sign * a;
        }
        self.amps = out;
        Ok(())
    }

    /// Probability that measuring `qubit` in M(delta) yields outcome 0,
    /// i.e. collapse onto |+_delta>.
    pub fn prob_mdelta_zero(&self, qubit: usize, delta: f64) -> Result<f64> {
        self.check_targets(&[qubit])?;
        let e = Complex64::from_polar(1.0, -delta);
        let step = 1usize << qubit;
        let mut p0 = 0.0;
        let mut base = 0;
        while base < self.amps.len() {
            for idx in base..base + step {
                let amp = (self.amps[idx] + e * self.amps[idx | step]) * FRAC_1_SQRT_2;
                p0 += amp.norm_sqr();
            }
            base += step << 1;
        }
        Ok(p0)
    }

    /// Destructive measurement in M(delta), the basis (|0> +/- e^{i delta}|1>)/sqrt(2).
    /// Outcome 0 collapses onto |+_delta>; the measured qubit is removed.
    pub fn measure_mdelta<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        delta: f64,
        rng: &mut R,
    ) -> Result<u8> {
        let p0 = self.prob_mdelta_zero(qubit, delta)?;
        let outcome = u8::from(rng.random::<f64>() >= p0);
        self.project_mdelta(qubit, delta, outcome)?;
        Ok(outcome)
    }

    /// Forces the given M(delta) outcome (used by deterministic checks).
    pub fn project_mdelta(&mut self, qubit: usize, delta: f64, outcome: u8) -> Result<()> {
        self.check_targets(&[qubit])?;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let e = sign * Complex64::from_polar(1.0, -delta);
        let step = 1usize << qubit;
        let mut out = vec![Complex64::ZERO; self.amps.len() >> 1];
        let mut w = 0;
        let mut base = 0;
        while base < self.amps.len() {
            for idx in base..base + step {
                out[w] = (self.amps[idx] + e * self.amps[idx | step]) * FRAC_1_SQRT_2;
                w += 1;
            }
            base += step << 1;
        }
        self.amps = out;
        self.n -= 1;
        self.normalize();
        Ok(())
    }

    /// Probability of outcome 0 for a computational-basis measurement.
    pub fn prob_computational_zero(&self, qubit: usize) -> Result<f64> {
        self.check_targets(&[qubit])?;
        let step = 1usize << qubit;
        let mut p0 = 0.0;
        let mut base = 0;
        while base < self.amps.len() {
            for idx in base..base + step {
                p0 += self.amps[idx].norm_sqr();
            }
            base += step << 1;
        }
        Ok(p0)
    }

    /// Destructive computational-basis measurement; the qubit is removed.
    pub fn measure_computational<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<u8> {
        let p0 = self.prob_computational_zero(qubit)?;
        let outcome = u8::from(rng.random::<f64>() >= p0);
        self.project_computational(qubit, outcome)?;
        Ok(outcome)
    }

    /// Forces the given computational-basis outcome and removes the qubit.
    pub fn project_computational(&mut self, qubit: usize, outcome: u8) -> Result<()> {
        self.check_targets(&[qubit])?;
        let step = 1usize << qubit;
        let pick = if outcome == 0 { 0 } else { step };
        let mut out = vec![Complex64::ZERO; self.amps.len() >> 1];
        let mut w = 0;
        let mut base = 0;
        while base < self.amps.len() {
            for idx in base..base + step {
                out[w] = self.amps[idx | pick];
                w += 1;
            }
            base += step << 1;
        }
        self.amps = out;
        self.n -= 1;
        self.normalize();
        Ok(())
    }

    /// <self|other>.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Writes one amplitude per line as "index real imag".
    pub fn write_amplitudes<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (idx, a) in self.amps.iter().enumerate() {
            writeln!(w, "{} {} {}", idx, a.re, a.im)?;
        }
        Ok(())
    }
}

/// (|0> + e^{i theta}|1>)/sqrt(2).
pub fn plus_theta(theta: f64) -> StateVector {
    let amps = vec![
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, theta),
    ];
    StateVector { n: 1, amps }
}

/// |phi_x,y|^2 overlap, insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner_product(b)?.norm_sqr())
}

/// Builds a cluster state: tensor the node states (|+> where unassigned),
/// then CZ on every edge. Edge order is irrelevant since CZs commute.
pub fn build_cluster(
    graph: &GraphSpec,
    inputs: &HashMap<usize, StateVector>,
) -> Result<StateVector> {
    let n = graph.num_nodes();
    StateVector::check_cap(n)?;
    let mut state = StateVector::zero(0)?;
    for node in 0..n {
        let node_state = match inputs.get(&node) {
            Some(s) => {
                if s.num_qubits() != 1 {
                    return Err(Error::DimensionMismatch {
                        expected: 1,
                        got: s.num_qubits(),
                    });
                }
                s.clone()
            }
            None => plus_theta(0.0),
        };
        state = state.tensor(&node_state)?;
    }
    for &(u, v) in graph.edges() {
        state.apply_gate(Gate::Cz, &[u, v])?;
    }
    Ok(state)
}

/// Maps a basis label like "0110" to an amplitude index; the leftmost
/// character is qubit 0.
pub fn basis_label_to_index(label: &str) -> usize {
    let mut idx = 0usize;
    for (q, c) in label.chars().enumerate() {
        if c == '1' {
            idx |= 1 << q;
        }
    }
    idx
}
