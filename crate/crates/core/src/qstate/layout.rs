use serde::Serialize;

use crate::error::{QdacError, Result};

/// Qubit register layout `|f⟩^L |k⟩^R |a⟩^A`.
///
/// Qubits are addressed by *position*: position 0 is the leftmost qubit of
/// the ket, i.e. the most significant bit of a basis index. Inside every
/// register bit `i = 0` is the least significant one, so `L_i` lives at
/// position `n_l - 1 - i`.
///
/// A basis index decomposes as `(y << (n_r + n_a)) | (k << n_a) | a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RegisterLayout {
    pub n_l: usize,
    pub n_r: usize,
    pub n_a: usize,
}

impl RegisterLayout {
    pub fn new(n_l: usize, n_r: usize, n_a: usize) -> Result<Self> {
        if n_a != 0 && n_a != n_l {
            return Err(QdacError::layout(format!(
                "ancilla register must match L register width ({n_a} != {n_l})"
            )));
        }
        if n_l + n_r + n_a == 0 {
            return Err(QdacError::layout("layout without qubits"));
        }
        if n_l + n_r + n_a > 62 {
            return Err(QdacError::layout("more than 62 qubits cannot be indexed"));
        }
        Ok(Self { n_l, n_r, n_a })
    }

    /// Layout of an anonymous register of `q` qubits (reduced states, test
    /// fixtures). All qubits are placed in the L block.
    pub fn plain(q: usize) -> Self {
        Self { n_l: q, n_r: 0, n_a: 0 }
    }

    /// The `(n + m)`-qubit layout of the initial state.
    pub fn data(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, 0)
    }

    /// The `(m + 2n)`-qubit layout after the ancillas are attached.
    pub fn with_ancillas(n: usize, m: usize) -> Result<Self> {
        Self::new(n, m, n)
    }

    pub fn total(&self) -> usize {
        self.n_l + self.n_r + self.n_a
    }

    pub fn dim(&self) -> usize {
        1usize << self.total()
    }

    pub fn l(&self, i: usize) -> usize {
        debug_assert!(i < self.n_l);
        self.n_l - 1 - i
    }

    pub fn r(&self, j: usize) -> usize {
        debug_assert!(j < self.n_r);
        self.n_l + self.n_r - 1 - j
    }

    pub fn a(&self, i: usize) -> usize {
        debug_assert!(i < self.n_a);
        self.total() - 1 - i
    }

    /// Bit offset of a position inside a basis index.
    pub fn bit(&self, pos: usize) -> usize {
        self.total() - 1 - pos
    }

    pub fn check_position(&self, pos: usize) -> Result<()> {
        if pos < self.total() {
            Ok(())
        } else {
            Err(QdacError::layout(format!(
                "qubit position {pos} outside a {}-qubit layout",
                self.total()
            )))
        }
    }

    pub fn l_positions(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.n_l
    }

    pub fn r_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.n_l..self.n_l + self.n_r
    }

    pub fn a_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.n_l + self.n_r..self.total()
    }

    /// Value of the L register in a basis index.
    pub fn l_value(&self, index: usize) -> u64 {
        ((index >> (self.n_r + self.n_a)) as u64) & mask(self.n_l)
    }

    pub fn r_value(&self, index: usize) -> usize {
        (index >> self.n_a) & (mask(self.n_r) as usize)
    }

    pub fn a_value(&self, index: usize) -> usize {
        index & (mask(self.n_a) as usize)
    }

    pub fn compose(&self, y: u64, k: usize, a: usize) -> usize {
        ((y as usize) << (self.n_r + self.n_a)) | (k << self.n_a) | a
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
