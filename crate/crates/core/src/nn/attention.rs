use crate::error::{Error, Result};
use crate::tensor::{Tape, Var};

/// Content-based attention `u_j = v · tanh(W1 e_j + W2 d)`.
#[derive(Clone, Copy, Debug)]
pub struct Attention {
    pub w1: Var,
    pub w2: Var,
    pub v: Var,
}

/// Encoder states prepared once per input: the states as matrix columns,
/// their `W1` projections, and `v` as a row vector.
#[derive(Clone, Copy, Debug)]
pub struct Memory {
    pub states: Var,
    pub projected: Var,
    v_row: Var,
    len: usize,
}

impl Memory {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Attention {
    pub fn new(tape: &Tape<'_>, w1: Var, w2: Var, v: Var) -> Result<Self> {
        let (r1, c1) = tape.value(w1).dims2()?;
        let (r2, c2) = tape.value(w2).dims2()?;
        if r1 != c1 || (r2, c2) != (r1, c1) || tape.value(v).shape() != [r1] {
            return Err(Error::Dimension(format!(
                "attention needs square W1, W2 and matching v: {:?}, {:?}, {:?}",
                tape.value(w1).shape(),
                tape.value(w2).shape(),
                tape.value(v).shape()
            )));
        }
        Ok(Self { w1, w2, v })
    }

    /// Projects encoder states `e_j` once so each decoder step only pays
    /// for `W2 d`.
    pub fn memory(&self, tape: &mut Tape<'_>, states: &[Var]) -> Result<Memory> {
        let cols = tape.stack_cols(states)?;
        let projected = tape.matmul(self.w1, cols)?;
        let h = tape.value(self.v).len();
        let v_row = tape.reshape(self.v, vec![1, h])?;
        Ok(Memory { states: cols, projected, v_row, len: states.len() })
    }

    /// Scores `u_j` for every memory slot.
    pub fn scores(&self, tape: &mut Tape<'_>, mem: &Memory, d: Var) -> Result<Var> {
        let q = tape.matvec(self.w2, d)?;
        let pre = tape.add_cols(mem.projected, q)?;
        let act = tape.tanh(pre);
        let u = tape.matmul(mem.v_row, act)?;
        tape.reshape(u, vec![mem.len])
    }

    /// `d' = Σ_j softmax(u)_j e_j`.
    pub fn blend(&self, tape: &mut Tape<'_>, mem: &Memory, d: Var) -> Result<Var> {
        let u = self.scores(tape, mem, d)?;
        let a = tape.softmax(u)?;
        tape.matvec(mem.states, a)
    }
}
