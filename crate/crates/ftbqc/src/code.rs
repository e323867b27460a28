//! Stabilizer codes built from a generator matrix, with the 7-qubit
//! CSS code as the shipped instance: syndrome extraction, minimum-weight
//! lookup decoding, codewords, and logical-basis measurements.

use crate::error::{Error, Result};
use crate::pauli::{GeneratorMatrix, GeneratorRow, PauliOperator};
use crate::state::StateVector;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

const CODE_SPACE_TOL: f64 = 1e-9;

/// An [[n, k, d]] stabilizer code.
///
/// Logical operators are stored in their transversal form (X on every
/// qubit, Z on every qubit for the CSS instance shipped here); any
/// stabilizer-equivalent representative acts identically on the code space.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    d: usize,
    generators: GeneratorMatrix,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
    codewords: Vec<StateVector>,
}

impl StabilizerCode {
    /// Builds a code from its generators and logical operators. Codewords
    /// are constructed by projecting computational basis states onto the
    /// code space, which works for any CSS code whose all-zeros string is
    /// a valid codeword component.
    pub fn new(
        generators: GeneratorMatrix,
        d: usize,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        let n = generators.num_qubits();
        let k = n - generators.num_rows();
        if logical_x.len() != k || logical_z.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: logical_x.len().max(logical_z.len()),
            });
        }
        for (i, lx) in logical_x.iter().enumerate() {
            for g in generators.generators() {
                if !lx.commutes_with(&g)? || !logical_z[i].commutes_with(&g)? {
                    return Err(Error::InvalidPattern(
                        "logical operator does not commute with the stabilizer".into(),
                    ));
                }
            }
            if logical_x[i].commutes_with(&logical_z[i])? {
                return Err(Error::InvalidPattern(
                    "logical X and Z must anticommute".into(),
                ));
            }
        }

        let mut code = StabilizerCode {
            n,
            k,
            d,
            generators,
            logical_x,
            logical_z,
            codewords: Vec::new(),
        };
        code.codewords = code.build_codewords()?;
        Ok(code)
    }

    fn build_codewords(&self) -> Result<Vec<StateVector>> {
        let mut words = Vec::with_capacity(1 << self.k);
        for m in 0..(1usize << self.k) {
            let mut state = StateVector::zero(self.n)?;
            for bit in 0..self.k {
                if m >> bit & 1 == 1 {
                    state.apply_pauli(&self.logical_x[bit])?;
                }
            }
            let mut projected = self.project_code_space(&state)?;
            let norm = projected.norm();
            if norm < 1e-12 {
                return Err(Error::InvalidPattern(
                    "codeword projection vanished; generators incompatible with |0...0>".into(),
                ));
            }
            projected.normalize();
            words.push(projected);
        }
        Ok(words)
    }

    /// Applies the code-space projector product (I + g)/2 over all generators.
    fn project_code_space(&self, state: &StateVector) -> Result<StateVector> {
        let mut acc = state.clone();
        for g in self.generators.generators() {
            let mut moved = acc.clone();
            moved.apply_pauli(&g)?;
            let amps: Vec<Complex64> = acc
                .amplitudes()
                .iter()
                .zip(moved.amplitudes())
                .map(|(a, b)| (a + b) * 0.5)
                .collect();
            acc = StateVector::from_amplitudes(self.n, amps)?;
        }
        Ok(acc)
    }

    /// Overlap of a state with the code space, <psi| Pi |psi> in [0, 1].
    pub fn code_space_overlap(&self, state: &StateVector) -> Result<f64> {
        if state.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: state.num_qubits(),
            });
        }
        let projected = self.project_code_space(state)?;
        Ok(state.inner_product(&projected)?.re)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &GeneratorMatrix {
        &self.generators
    }

    pub fn logical_x(&self, i: usize) -> &PauliOperator {
        &self.logical_x[i]
    }

    pub fn logical_z(&self, i: usize) -> &PauliOperator {
        &self.logical_z[i]
    }

    /// The 2^k codewords; index m is the logical computational state |m>_L.
    pub fn codeword(&self, m: usize) -> &StateVector {
        &self.codewords[m]
    }

    /// (|0>_L + e^{i theta} |1>_L)/sqrt(2) for a k = 1 code.
    pub fn logical_plus_theta(&self, theta: f64) -> StateVector {
        assert_eq!(self.k, 1);
        let phase = Complex64::from_polar(FRAC_1_SQRT_2, theta);
        let amps: Vec<Complex64> = self.codewords[0]
            .amplitudes()
            .iter()
            .zip(self.codewords[1].amplitudes())
            .map(|(a, b)| a * FRAC_1_SQRT_2 + b * phase)
            .collect();
        StateVector::from_amplitudes(self.n, amps).expect("codeword dimensions agree")
    }

    /// The logical M(delta) basis state |s_delta>_L for s in {0, 1}.
    pub fn logical_mdelta_state(&self, delta: f64, outcome: u8) -> StateVector {
        let theta = if outcome == 0 {
            delta
        } else {
            delta + std::f64::consts::PI
        };
        self.logical_plus_theta(theta)
    }

    /// Syndrome of a Pauli error: bit i is 1 iff the error anticommutes
    /// with generator i, in the row order of the generator matrix.
    pub fn syndrome(&self, error: &PauliOperator) -> Result<Vec<u8>> {
        if error.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: error.num_qubits(),
            });
        }
        self.generators
            .generators()
            .iter()
            .map(|g| Ok(u8::from(!error.commutes_with(g)?)))
            .collect()
    }

    /// Minimum-weight correction for a syndrome. For the 7-qubit code each
    /// 3-bit half reads as the binary column index of the flawed qubit
    /// (first row bit most significant); the zero syndrome decodes to the
    /// identity. Errors beyond floor(d/2) decode to some weight-1 correction
    /// and may land a logical error.
    pub fn decode_syndrome(&self, syndrome: &[u8]) -> Result<PauliOperator> {
        if syndrome.len() != self.n - self.k {
            return Err(Error::SyndromeLength {
                expected: self.n - self.k,
                got: syndrome.len(),
            });
        }
        let half = (self.n - self.k) / 2;
        // Bits from X-type generators locate Z errors; bits from Z-type
        // generators locate X errors.
        let mut col_z = 0usize;
        let mut col_x = 0usize;
        for i in 0..half {
            col_z = (col_z << 1) | syndrome[i] as usize;
            col_x = (col_x << 1) | syndrome[half + i] as usize;
        }
        let mut correction = PauliOperator::identity(self.n);
        if col_x != 0 && col_x == col_z {
            correction = correction.mul(&PauliOperator::y(self.n, col_x - 1))?;
        } else {
            if col_x != 0 {
                correction = correction.mul(&PauliOperator::x(self.n, col_x - 1))?;
            }
            if col_z != 0 {
                correction = correction.mul(&PauliOperator::z(self.n, col_z - 1))?;
            }
        }
        Ok(correction)
    }

    /// Measures a 7-qubit block in the logical {|+_delta>_L, |-_delta>_L}
    /// basis. The block must lie in the code space; the collapsed block is
    /// returned alongside the outcome.
    pub fn logical_measure<R: Rng + ?Sized>(
        &self,
        block: &StateVector,
        delta: f64,
        rng: &mut R,
    ) -> Result<(u8, StateVector)> {
        let overlap = self.code_space_overlap(block)?;
        if overlap < 1.0 - CODE_SPACE_TOL {
            return Err(Error::OutsideCodeSpace { overlap });
        }
        let p0 = self.logical_prob_zero(block, delta)?;
        let outcome = u8::from(rng.random::<f64>() >= p0);
        let collapsed = self.logical_mdelta_state(delta, outcome);
        Ok((outcome, collapsed))
    }

    /// P(s = 0) for a logical M(delta) measurement, computed analytically
    /// from codeword overlaps.
    pub fn logical_prob_zero(&self, block: &StateVector, delta: f64) -> Result<f64> {
        let basis0 = self.logical_mdelta_state(delta, 0);
        Ok(basis0.inner_product(block)?.norm_sqr())
    }

    /// Destructive logical M(delta) measurement on seven designated qubits
    /// of a larger register. The seven qubits are removed; the remaining
    /// register is renormalized.
    pub fn logical_measure_in<R: Rng + ?Sized>(
        &self,
        register: &mut StateVector,
        block_qubits: &[usize],
        delta: f64,
        rng: &mut R,
    ) -> Result<u8> {
        if block_qubits.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: block_qubits.len(),
            });
        }
        let p0 = self.partial_projection(register, block_qubits, delta, 0)?;
        let total = p0.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let outcome = u8::from(rng.random::<f64>() >= total);
        let kept = if outcome == 0 {
            p0
        } else {
            self.partial_projection(register, block_qubits, delta, 1)?
        };
        let rest = register.num_qubits() - self.n;
        let mut out = StateVector::from_amplitudes(rest, kept)?;
        out.normalize();
        *register = out;
        Ok(outcome)
    }

    /// (<s_delta|_L on block_qubits tensor I) applied to the register;
    /// returns unnormalized amplitudes over the remaining qubits.
    fn partial_projection(
        &self,
        register: &StateVector,
        block_qubits: &[usize],
        delta: f64,
        outcome: u8,
    ) -> Result<Vec<Complex64>> {
        let n = register.num_qubits();
        for &q in block_qubits {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        let basis = self.logical_mdelta_state(delta, outcome);
        let rest = n - self.n;
        let mut out = vec![Complex64::ZERO; 1 << rest];
        let block_mask: usize = block_qubits.iter().map(|&q| 1usize << q).sum();
        for idx in 0..register.amplitudes().len() {
            let mut block_index = 0usize;
            for (j, &q) in block_qubits.iter().enumerate() {
                if idx >> q & 1 == 1 {
                    block_index |= 1 << j;
                }
            }
            let coeff = basis.amplitude(block_index).conj();
            if coeff == Complex64::ZERO {
                continue;
            }
            // Compress the non-block bits into the output index.
            let mut rest_index = 0usize;
            let mut w = 0;
            for q in 0..n {
                if block_mask >> q & 1 == 0 {
                    if idx >> q & 1 == 1 {
                        rest_index |= 1 << w;
                    }
                    w += 1;
                }
            }
            out[rest_index] += coeff * register.amplitude(idx);
        }
        Ok(out)
    }
}

/// The [[7,1,3]] code: six generators read off the standard generator
/// matrix, transversal logical operators, and the two 8-term codewords.
pub fn steane_code() -> StabilizerCode {
    // X half rows, read left to right as qubit columns 1..7.
    let hamming = [0b1111000u64, 0b1100110, 0b1010101];
    let mut rows = Vec::new();
    for &bits in &hamming {
        rows.push(GeneratorRow {
            x_bits: bits,
            z_bits: 0,
        });
    }
    for &bits in &hamming {
        rows.push(GeneratorRow {
            x_bits: 0,
            z_bits: bits,
        });
    }
    let generators = GeneratorMatrix::new(7, rows).expect("built-in generators are valid");
    let logical_x = vec![PauliOperator::from_masks(7, 0b1111111, 0)];
    let logical_z = vec![PauliOperator::from_masks(7, 0, 0b1111111)];
    StabilizerCode::new(generators, 3, logical_x, logical_z).expect("built-in code is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{basis_label_to_index, fidelity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    const AMP: f64 = 0.35355339059327373; // 1/(2 sqrt 2)

    #[test]
    fn steane_parameters() {
        let code = steane_code();
        assert_eq!(code.n(), 7);
        assert_eq!(code.k(), 1);
        assert_eq!(code.d(), 3);
        assert_eq!(code.generators().num_rows(), 6);
    }

    #[test]
    fn codeword_zero_matches_known_superposition() {
        let code = steane_code();
        let zero = code.codeword(0);
        let labels = [
            "0000000", "0001111", "0110011", "0111100", "1010101", "1011010", "1100110", "1101001",
        ];
        let mut covered = vec![false; 128];
        for label in labels {
            let idx = basis_label_to_index(label);
            covered[idx] = true;
            let a = zero.amplitude(idx);
            assert!(
                (a.re - AMP).abs() < 1e-12 && a.im.abs() < 1e-12,
                "amplitude at {label} is {a}"
            );
        }
        for (idx, c) in covered.iter().enumerate() {
            if !c {
                assert!(zero.amplitude(idx).norm() < 1e-12, "stray amplitude at {idx}");
            }
        }
    }

    #[test]
    fn codeword_one_matches_known_superposition() {
        let code = steane_code();
        let one = code.codeword(1);
        let labels = [
            "1111111", "1110000", "1001100", "1000011", "0101010", "0100101", "0011001", "0010110",
        ];
        for label in labels {
            let a = one.amplitude(basis_label_to_index(label));
            assert!(
                (a.re - AMP).abs() < 1e-12 && a.im.abs() < 1e-12,
                "amplitude at {label} is {a}"
            );
        }
    }

    #[test]
    fn codewords_are_orthogonal() {
        let code = steane_code();
        let ip = code.codeword(0).inner_product(code.codeword(1)).unwrap();
        assert!(ip.norm() < 1e-12);
    }

    #[test]
    fn generators_stabilize_codewords() {
        let code = steane_code();
        for m in 0..2 {
            for g in code.generators().generators() {
                let mut moved = code.codeword(m).clone();
                moved.apply_pauli(&g).unwrap();
                let ip = code.codeword(m).inner_product(&moved).unwrap();
                assert!(
                    (ip.re - 1.0).abs() < 1e-12 && ip.im.abs() < 1e-12,
                    "generator {g} does not fix codeword {m}"
                );
            }
        }
    }

    #[test]
    fn generator_pairs_commute() {
        let code = steane_code();
        let gens = code.generators().generators();
        for (i, a) in gens.iter().enumerate() {
            for b in gens.iter().skip(i + 1) {
                assert!(a.commutes_with(b).unwrap());
            }
        }
    }

    #[test]
    fn syndrome_of_identity_is_zero() {
        let code = steane_code();
        let id = PauliOperator::identity(7);
        assert_eq!(code.syndrome(&id).unwrap(), vec![0; 6]);
    }

    #[test]
    fn syndrome_against_statevector_oracle() {
        // Independent oracle: apply g then E and E then g to a random-ish
        // state and compare; a sign flip marks anticommutation.
        let code = steane_code();
        let mut probe = StateVector::zero(7).unwrap();
        for q in 0..7 {
            probe
                .apply_gate(crate::state::Gate::H, &[q])
                .unwrap();
            probe
                .apply_gate(crate::state::Gate::Rz(0.37 + q as f64), &[q])
                .unwrap();
        }
        for error in PauliOperator::all_single_qubit(7) {
            let expected: Vec<u8> = code
                .generators()
                .generators()
                .iter()
                .map(|g| {
                    let mut ge = probe.clone();
                    ge.apply_pauli(&error).unwrap();
                    ge.apply_pauli(g).unwrap();
                    let mut eg = probe.clone();
                    eg.apply_pauli(g).unwrap();
                    eg.apply_pauli(&error).unwrap();
                    let ip = ge.inner_product(&eg).unwrap();
                    u8::from((ip.re + 1.0).abs() < 1e-9)
                })
                .collect();
            assert_eq!(code.syndrome(&error).unwrap(), expected, "error {error}");
        }
    }

    #[test]
    fn syndrome_known_values() {
        let code = steane_code();
        // X on qubit 3 (column 3): Z-generator half reads (0,1,1).
        let x3 = PauliOperator::x(7, 2);
        assert_eq!(code.syndrome(&x3).unwrap(), vec![0, 0, 0, 0, 1, 1]);
        // Y on qubit 7: both halves all ones.
        let y7 = PauliOperator::y(7, 6);
        assert_eq!(code.syndrome(&y7).unwrap(), vec![1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn decode_inverts_syndrome_for_all_single_errors() {
        let code = steane_code();
        assert!(code.decode_syndrome(&[0; 6]).unwrap().is_identity());
        for error in PauliOperator::all_single_qubit(7) {
            let syn = code.syndrome(&error).unwrap();
            let correction = code.decode_syndrome(&syn).unwrap();
            // Correction must cancel the error up to stabilizer equivalence:
            // same syndrome and trivial action on the code space.
            assert_eq!(code.syndrome(&correction).unwrap(), syn);
            let mut state = code.logical_plus_theta(PI / 4.0);
            state.apply_pauli(&error).unwrap();
            state.apply_pauli(&correction).unwrap();
            let f = fidelity(&state, &code.logical_plus_theta(PI / 4.0)).unwrap();
            assert!(f > 1.0 - 1e-12, "correction failed for {error}: f = {f}");
        }
    }

    #[test]
    fn decode_known_values() {
        let code = steane_code();
        let corr = code.decode_syndrome(&[0, 0, 0, 0, 1, 1]).unwrap();
        assert_eq!(corr, PauliOperator::x(7, 2));
        let corr = code.decode_syndrome(&[1, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(corr, PauliOperator::y(7, 6));
    }

    #[test]
    fn distance_witness() {
        let code = steane_code();
        // The transversal logical X has zero syndrome yet flips |0>_L.
        let lx = code.logical_x(0).clone();
        assert_eq!(code.syndrome(&lx).unwrap(), vec![0; 6]);
        let mut moved = code.codeword(0).clone();
        moved.apply_pauli(&lx).unwrap();
        assert!(fidelity(&moved, code.codeword(0)).unwrap() < 1e-12);

        // No weight-1 or weight-2 Pauli is an undetected logical operator.
        let singles = PauliOperator::all_single_qubit(7);
        let mut candidates: Vec<PauliOperator> = singles.clone();
        for (i, a) in singles.iter().enumerate() {
            for b in singles.iter().skip(i + 1) {
                let p = a.mul(b).unwrap();
                if p.weight() == 2 {
                    candidates.push(p);
                }
            }
        }
        for p in candidates {
            if code.syndrome(&p).unwrap() == vec![0; 6] {
                let mut moved = code.codeword(0).clone();
                moved.apply_pauli(&p).unwrap();
                assert!(
                    fidelity(&moved, code.codeword(0)).unwrap() > 1.0 - 1e-12,
                    "undetected logical action at weight <= 2: {p}"
                );
            }
        }
    }

    #[test]
    fn weight_one_errors_are_corrected_on_any_code_state() {
        let code = steane_code();
        for k in 0..8 {
            let theta = k as f64 * PI / 4.0;
            let reference = code.logical_plus_theta(theta);
            for error in PauliOperator::all_single_qubit(7) {
                let mut state = reference.clone();
                state.apply_pauli(&error).unwrap();
                let correction = code.decode_syndrome(&code.syndrome(&error).unwrap()).unwrap();
                state.apply_pauli(&correction).unwrap();
                assert!(fidelity(&state, &reference).unwrap() >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn logical_measure_eigenstate() {
        let code = steane_code();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for k in 0..8 {
            let theta = k as f64 * PI / 4.0;
            let block = code.logical_plus_theta(theta);
            let (s, collapsed) = code.logical_measure(&block, theta, &mut rng).unwrap();
            assert_eq!(s, 0);
            assert!(fidelity(&collapsed, &block).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn logical_measure_follows_cosine_law() {
        let code = steane_code();
        // |+_0>_L measured at delta = pi/2: P(0) = cos^2(pi/4) = 1/2.
        let block = code.logical_plus_theta(0.0);
        let p0 = code.logical_prob_zero(&block, PI / 2.0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        // |0>_L has P(0) = 1/2 for every delta.
        for k in 0..8 {
            let delta = k as f64 * PI / 4.0;
            let p0 = code.logical_prob_zero(code.codeword(0), delta).unwrap();
            assert!((p0 - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn logical_measure_rejects_non_code_states() {
        let code = steane_code();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let outside = StateVector::plus(7).unwrap();
        assert!(matches!(
            code.logical_measure(&outside, 0.0, &mut rng),
            Err(Error::OutsideCodeSpace { .. })
        ));
    }

    #[test]
    fn logical_measure_in_register_matches_standalone_probability() {
        let code = steane_code();
        let theta = PI / 4.0;
        let delta = 3.0 * PI / 4.0;
        let expected = {
            let block = code.logical_plus_theta(theta);
            code.logical_prob_zero(&block, delta).unwrap()
        };
        // Embed the block as qubits 1..8 of a 9-qubit register.
        let bystander = crate::state::plus_theta(0.9);
        let block = code.logical_plus_theta(theta);
        let state = bystander.tensor(&block).unwrap();
        let state = state.tensor(&crate::state::plus_theta(0.2)).unwrap();
        let qubits: Vec<usize> = (1..8).collect();
        let mut zeros = 0u32;
        let trials = 4000;
        for seed in 0..trials {
            let mut rng = ChaCha12Rng::seed_from_u64(seed as u64);
            let mut reg = state.clone();
            let s = code
                .logical_measure_in(&mut reg, &qubits, delta, &mut rng)
                .unwrap();
            assert_eq!(reg.num_qubits(), 2);
            if s == 0 {
                zeros += 1;
            }
        }
        let freq = zeros as f64 / trials as f64;
        assert!(
            (freq - expected).abs() < 0.03,
            "empirical {freq} vs analytic {expected}"
        );
    }
}
