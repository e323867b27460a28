//! Pauli operators on up to 64 qubits, stored as X/Z bit masks with an
//! exact global phase in {+1, +i, -1, -i}.
//!
//! A Pauli is kept in the canonical form i^k * X^x * Z^z per qubit, so a
//! single-qubit Y is (x=1, z=1, k=1) since Y = i X Z. Multiplication tracks
//! the phase exactly; state comparisons elsewhere are phase-insensitive.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;

/// Global phase of a Pauli product, stored as the exponent of i (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_power_of_i(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn power_of_i(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn as_complex(self) -> num_complex::Complex64 {
        match self {
            Phase::PlusOne => num_complex::Complex64::new(1.0, 0.0),
            Phase::PlusI => num_complex::Complex64::new(0.0, 1.0),
            Phase::MinusOne => num_complex::Complex64::new(-1.0, 0.0),
            Phase::MinusI => num_complex::Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PlusOne => write!(f, "+1"),
            Phase::PlusI => write!(f, "+i"),
            Phase::MinusOne => write!(f, "-1"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}

/// An n-qubit Pauli operator.
///
/// Bit j of `x_mask`/`z_mask` covers qubit j (0-based). A set bit in both
/// masks means Y acts on that qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliOperator {
    n: usize,
    x_mask: u64,
    z_mask: u64,
    phase_pow: u8,
}

impl PauliOperator {
    pub const MAX_QUBITS: usize = 64;

    /// The n-qubit identity.
    pub fn identity(n: usize) -> Self {
        assert!(n <= Self::MAX_QUBITS);
        PauliOperator {
            n,
            x_mask: 0,
            z_mask: 0,
            phase_pow: 0,
        }
    }

    /// Builds from raw masks with phase +1.
    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> Self {
        assert!(n <= Self::MAX_QUBITS);
        let keep = mask_bits(n);
        PauliOperator {
            n,
            x_mask: x_mask & keep,
            z_mask: z_mask & keep,
            phase_pow: 0,
        }
    }

    /// X on a single qubit of an n-qubit register.
    pub fn x(n: usize, qubit: usize) -> Self {
        Self::single(n, qubit, true, false, 0)
    }

    /// Z on a single qubit.
    pub fn z(n: usize, qubit: usize) -> Self {
        Self::single(n, qubit, false, true, 0)
    }

    /// Y on a single qubit; Y = i X Z, so the stored phase is +i.
    pub fn y(n: usize, qubit: usize) -> Self {
        Self::single(n, qubit, true, true, 1)
    }

    fn single(n: usize, qubit: usize, x: bool, z: bool, phase_pow: u8) -> Self {
        assert!(qubit < n && n <= Self::MAX_QUBITS);
        PauliOperator {
            n,
            x_mask: if x { 1 << qubit } else { 0 },
            z_mask: if z { 1 << qubit } else { 0 },
            phase_pow,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase(&self) -> Phase {
        Phase::from_power_of_i(self.phase_pow)
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// Multiplies a single-qubit factor into this operator, tracking phase.
    pub fn mul_x(&mut self, qubit: usize) {
        // X passes left over the existing X^x Z^z: no reordering needed
        // since X is prepended: X * (X^x Z^z) keeps canonical order.
        assert!(qubit < self.n);
        self.x_mask ^= 1 << qubit;
    }

    pub fn mul_z(&mut self, qubit: usize) {
        // Z * X^x Z^z = (-1)^x X^x Z^(z^1): commuting Z past X picks a sign.
        assert!(qubit < self.n);
        if self.x_mask >> qubit & 1 == 1 {
            self.phase_pow = (self.phase_pow + 2) % 4;
        }
        self.z_mask ^= 1 << qubit;
    }

    /// Product self * other (self applied after other).
    pub fn mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        // (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{|z1 & x2|} X^(x1^x2) Z^(z1^z2)
        let sign_flips = (self.z_mask & other.x_mask).count_ones() as u8;
        let phase_pow = (self.phase_pow + other.phase_pow + 2 * (sign_flips % 2)) % 4;
        Ok(PauliOperator {
            n: self.n,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase_pow,
        })
    }

    /// True iff the operators commute (symplectic inner product is 0 mod 2).
    pub fn commutes_with(&self, other: &PauliOperator) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let cross = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        Ok(cross % 2 == 0)
    }

    /// Embeds this operator into a larger register at the given qubit offsets.
    pub fn embedded(&self, n: usize, offsets: &[usize]) -> Result<PauliOperator> {
        if offsets.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: offsets.len(),
            });
        }
        let mut out = PauliOperator::identity(n);
        out.phase_pow = self.phase_pow;
        for (j, &q) in offsets.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            if self.x_mask >> j & 1 == 1 {
                out.x_mask |= 1 << q;
            }
            if self.z_mask >> j & 1 == 1 {
                out.z_mask |= 1 << q;
            }
        }
        Ok(out)
    }

    /// All 3n single-qubit Paulis on an n-qubit register.
    pub fn all_single_qubit(n: usize) -> Vec<PauliOperator> {
        let mut out = Vec::with_capacity(3 * n);
        for q in 0..n {
            out.push(PauliOperator::x(n, q));
            out.push(PauliOperator::y(n, q));
            out.push(PauliOperator::z(n, q));
        }
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.phase())?;
        for q in 0..self.n {
            let x = self.x_mask >> q & 1 == 1;
            let z = self.z_mask >> q & 1 == 1;
            let c = match (x, z) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn mask_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// One row of a generator matrix: the X half and Z half bit masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorRow {
    pub x_bits: u64,
    pub z_bits: u64,
}

/// Generator matrix (X_G | Z_G) of a stabilizer code: n - k rows over 2n bits.
///
/// Column j of either half labels qubit j + 1 in the conventional 1-based
/// reading; internally bit j covers qubit j (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    n: usize,
    rows: Vec<GeneratorRow>,
}

impl GeneratorMatrix {
    /// Validates symplectic commutation and GF(2) independence of the rows.
    pub fn new(n: usize, rows: Vec<GeneratorRow>) -> Result<Self> {
        let m = GeneratorMatrix { n, rows };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        for (i, a) in self.rows.iter().enumerate() {
            for (j, b) in self.rows.iter().enumerate().skip(i + 1) {
                let cross =
                    (a.x_bits & b.z_bits).count_ones() + (a.z_bits & b.x_bits).count_ones();
                if cross % 2 != 0 {
                    return Err(Error::GeneratorsAnticommute { row_a: i, row_b: j });
                }
            }
        }
        // Gaussian elimination over GF(2) on the concatenated 2n-bit rows.
        let mut work: Vec<u128> = self
            .rows
            .iter()
            .map(|r| (r.x_bits as u128) | ((r.z_bits as u128) << self.n))
            .collect();
        let mut rank = 0;
        for bit in 0..(2 * self.n) {
            let pivot = (rank..work.len()).find(|&i| work[i] >> bit & 1 == 1);
            if let Some(p) = pivot {
                work.swap(rank, p);
                for i in 0..work.len() {
                    if i != rank && work[i] >> bit & 1 == 1 {
                        work[i] ^= work[rank];
                    }
                }
                rank += 1;
            }
        }
        if rank != self.rows.len() {
            return Err(Error::GeneratorsDependent);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[GeneratorRow] {
        &self.rows
    }

    /// The generator encoded by row i, as a Pauli operator with phase +1.
    pub fn generator(&self, i: usize) -> PauliOperator {
        let row = &self.rows[i];
        let mut p = PauliOperator::from_masks(self.n, row.x_bits, row.z_bits);
        // Rows of a CSS matrix never mix X and Z on one qubit, but keep the
        // general case canonical: X^x Z^z with phase +1.
        p.phase_pow = 0;
        p
    }

    pub fn generators(&self) -> Vec<PauliOperator> {
        (0..self.rows.len()).map(|i| self.generator(i)).collect()
    }

    /// Parses the plain-text format: one row per line, X half then Z half
    /// as 0/1 characters separated by '|'.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut n = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (xs, zs) = line.split_once('|').ok_or_else(|| {
                Error::Parse(format!("line {}: missing '|' separator", lineno + 1))
            })?;
            let xs = xs.trim();
            let zs = zs.trim();
            if xs.len() != zs.len() {
                return Err(Error::Parse(format!(
                    "line {}: X half has {} columns but Z half has {}",
                    lineno + 1,
                    xs.len(),
                    zs.len()
                )));
            }
            match n {
                None => n = Some(xs.len()),
                Some(w) if w != xs.len() => {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} columns, got {}",
                        lineno + 1,
                        w,
                        xs.len()
                    )))
                }
                _ => {}
            }
            let parse_half = |half: &str| -> Result<u64> {
                let mut bits = 0u64;
                for (j, c) in half.chars().enumerate() {
                    match c {
                        '0' => {}
                        '1' => bits |= 1 << j,
                        _ => {
                            return Err(Error::Parse(format!(
                                "line {}: invalid character '{}'",
                                lineno + 1,
                                c
                            )))
                        }
                    }
                }
                Ok(bits)
            };
            rows.push(GeneratorRow {
                x_bits: parse_half(xs)?,
                z_bits: parse_half(zs)?,
            });
        }
        let n = n.ok_or_else(|| Error::Parse("empty generator matrix".into()))?;
        GeneratorMatrix::new(n, rows)
    }

    /// Writes the plain-text format parsed by [`GeneratorMatrix::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            for j in 0..self.n {
                out.push(if row.x_bits >> j & 1 == 1 { '1' } else { '0' });
            }
            out.push('|');
            for j in 0..self.n {
                out.push(if row.z_bits >> j & 1 == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Single-qubit Pauli error channel: independent X/Y/Z rates per qubit,
/// the identity taking the remaining probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let sum = p_x + p_y + p_z;
        if !(p_x >= 0.0 && p_y >= 0.0 && p_z >= 0.0) || sum > 1.0 + 1e-12 {
            return Err(Error::ChannelNotNormalized { sum });
        }
        Ok(PauliChannel { p_x, p_y, p_z })
    }

    /// Depolarizing channel at total error rate e0, split evenly over X/Y/Z.
    pub fn depolarizing(e0: f64) -> Result<Self> {
        Self::new(e0 / 3.0, e0 / 3.0, e0 / 3.0)
    }

    pub fn noiseless() -> Self {
        PauliChannel {
            p_x: 0.0,
            p_y: 0.0,
            p_z: 0.0,
        }
    }

    /// Probability that a qubit picks up any non-identity error.
    pub fn error_rate(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }
}

/// Draws an n-qubit Pauli with each qubit sampled i.i.d. from the channel.
pub fn sample_pauli_channel<R: Rng + ?Sized>(
    channel: &PauliChannel,
    n_qubits: usize,
    rng: &mut R,
) -> PauliOperator {
    let mut err = PauliOperator::identity(n_qubits);
    for q in 0..n_qubits {
        let u: f64 = rng.random();
        let one = if u < channel.p_x {
            PauliOperator::x(n_qubits, q)
        } else if u < channel.p_x + channel.p_y {
            PauliOperator::y(n_qubits, q)
        } else if u < channel.p_x + channel.p_y + channel.p_z {
            PauliOperator::z(n_qubits, q)
        } else {
            continue;
        };
        err = err.mul(&one).expect("same register size");
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn y_equals_i_xz() {
        let x = PauliOperator::x(1, 0);
        let z = PauliOperator::z(1, 0);
        let xz = x.mul(&z).unwrap();
        let y = PauliOperator::y(1, 0);
        assert_eq!(y.x_mask(), xz.x_mask());
        assert_eq!(y.z_mask(), xz.z_mask());
        // Y = i * XZ
        assert_eq!(y.phase().power_of_i(), (xz.phase().power_of_i() + 1) % 4);
    }

    #[test]
    fn single_qubit_anticommutation() {
        let x = PauliOperator::x(1, 0);
        let y = PauliOperator::y(1, 0);
        let z = PauliOperator::z(1, 0);
        assert!(!x.commutes_with(&z).unwrap());
        assert!(!x.commutes_with(&y).unwrap());
        assert!(!y.commutes_with(&z).unwrap());
        assert!(x.commutes_with(&x).unwrap());
    }

    #[test]
    fn squares_are_plus_or_minus_identity() {
        for p in PauliOperator::all_single_qubit(3) {
            let sq = p.mul(&p).unwrap();
            assert!(sq.is_identity());
            let k = sq.phase().power_of_i();
            assert!(k == 0 || k == 2, "square phase must be real: i^{k}");
        }
        // Single-qubit Paulis square to exactly +I.
        for p in PauliOperator::all_single_qubit(1) {
            assert_eq!(p.mul(&p).unwrap().phase(), Phase::PlusOne);
        }
    }

    #[test]
    fn generator_matrix_rejects_anticommuting_rows() {
        // X on qubit 0 and Z on qubit 0 anticommute.
        let rows = vec![
            GeneratorRow {
                x_bits: 0b1,
                z_bits: 0,
            },
            GeneratorRow {
                x_bits: 0,
                z_bits: 0b1,
            },
        ];
        assert!(matches!(
            GeneratorMatrix::new(2, rows),
            Err(Error::GeneratorsAnticommute { .. })
        ));
    }

    #[test]
    fn generator_matrix_rejects_dependent_rows() {
        let rows = vec![
            GeneratorRow {
                x_bits: 0b011,
                z_bits: 0,
            },
            GeneratorRow {
                x_bits: 0b110,
                z_bits: 0,
            },
            GeneratorRow {
                x_bits: 0b101,
                z_bits: 0,
            },
        ];
        assert!(matches!(
            GeneratorMatrix::new(3, rows),
            Err(Error::GeneratorsDependent)
        ));
    }

    #[test]
    fn parse_round_trips() {
        let text = "0001111|0000000\n0110011|0000000\n1010101|0000000\n0000000|0001111\n0000000|0110011\n0000000|1010101\n";
        let m = GeneratorMatrix::parse(text).unwrap();
        assert_eq!(m.num_qubits(), 7);
        assert_eq!(m.num_rows(), 6);
        assert_eq!(m.to_text(), text);
    }

    #[test]
    fn channel_rejects_bad_rates() {
        assert!(PauliChannel::new(0.5, 0.4, 0.2).is_err());
        assert!(PauliChannel::new(-0.1, 0.0, 0.0).is_err());
        assert!(PauliChannel::new(0.2, 0.3, 0.5).is_ok());
    }

    #[test]
    fn zero_rate_channel_always_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let ch = PauliChannel::noiseless();
        for _ in 0..100 {
            assert!(sample_pauli_channel(&ch, 5, &mut rng).is_identity());
        }
    }

    #[test]
    fn unit_rate_x_channel_always_x() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let ch = PauliChannel::new(1.0, 0.0, 0.0).unwrap();
        for _ in 0..100 {
            let p = sample_pauli_channel(&ch, 1, &mut rng);
            assert_eq!(p, PauliOperator::x(1, 0));
        }
    }

    #[test]
    fn sampling_matches_configured_rate() {
        // e0 = 0.01 split evenly; empirical non-identity frequency over 1e6
        // single-qubit draws should sit within 0.01 +/- 0.0005.
        let mut rng = ChaCha12Rng::seed_from_u64(20240211);
        let ch = PauliChannel::depolarizing(0.01).unwrap();
        let trials = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..trials {
            if !sample_pauli_channel(&ch, 1, &mut rng).is_identity() {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        assert!(
            (freq - 0.01).abs() < 5e-4,
            "empirical rate {freq} too far from 0.01"
        );
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let ch = PauliChannel::depolarizing(0.3).unwrap();
        let mut a = ChaCha12Rng::seed_from_u64(99);
        let mut b = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..50 {
            assert_eq!(
                sample_pauli_channel(&ch, 8, &mut a),
                sample_pauli_channel(&ch, 8, &mut b)
            );
        }
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        let bits = (1u64 << n) - 1;
        (0..=bits, 0..=bits, 0u8..4).prop_map(move |(x, z, k)| {
            let mut p = PauliOperator::from_masks(n, x, z);
            p.phase_pow = k;
            p
        })
    }

    proptest! {
        #[test]
        fn multiplication_is_associative((a, b, c) in (arb_pauli(5), arb_pauli(5), arb_pauli(5))) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn squares_are_real((a,) in (arb_pauli(6),)) {
            let sq = a.mul(&a).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert!(sq.phase().power_of_i() % 2 == 0);
        }

        #[test]
        fn commutation_is_symmetric((a, b) in (arb_pauli(5), arb_pauli(5))) {
            prop_assert_eq!(a.commutes_with(&b).unwrap(), b.commutes_with(&a).unwrap());
        }
    }
}
