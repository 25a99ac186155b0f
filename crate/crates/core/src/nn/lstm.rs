use crate::error::{Error, Result};
use crate::tensor::{Tape, Tensor, Var};

/// Tape handles for one LSTM layer. Gate rows are stacked `i, f, o, g`.
#[derive(Clone, Copy, Debug)]
pub struct LstmCell {
    pub w_ih: Var,
    pub w_hh: Var,
    pub bias: Var,
    pub hidden: usize,
}

/// Hidden output `h = o ⊙ tanh(c)` and cell `c`.
#[derive(Clone, Copy, Debug)]
pub struct LstmState {
    pub h: Var,
    pub c: Var,
}

impl LstmState {
    pub fn zeros(tape: &mut Tape<'_>, hidden: usize) -> Self {
        let h = tape.leaf(Tensor::zeros(vec![hidden]));
        let c = tape.leaf(Tensor::zeros(vec![hidden]));
        Self { h, c }
    }
}

impl LstmCell {
    pub fn new(tape: &Tape<'_>, w_ih: Var, w_hh: Var, bias: Var) -> Result<Self> {
        let (rows, _) = tape.value(w_ih).dims2()?;
        let (rows_h, hidden) = tape.value(w_hh).dims2()?;
        if rows % 4 != 0 || rows != 4 * hidden || rows_h != rows || tape.value(bias).shape() != [rows] {
            return Err(Error::Dimension(format!(
                "inconsistent LSTM shapes: w_ih {:?}, w_hh {:?}, bias {:?}",
                tape.value(w_ih).shape(),
                tape.value(w_hh).shape(),
                tape.value(bias).shape()
            )));
        }
        Ok(Self { w_ih, w_hh, bias, hidden })
    }

    /// `i, f, o = σ(·)`, `g = tanh(·)`, `c' = f⊙c + i⊙g`, `h' = o⊙tanh(c')`.
    pub fn step(&self, tape: &mut Tape<'_>, x: Var, s: LstmState) -> Result<LstmState> {
        let h = self.hidden;
        let wx = tape.matvec(self.w_ih, x)?;
        let wh = tape.matvec(self.w_hh, s.h)?;
        let gates = tape.add_n(&[wx, wh, self.bias])?;
        let sig_part = tape.slice(gates, 0, 3 * h)?;
        let sig = tape.sigmoid(sig_part);
        let i = tape.slice(sig, 0, h)?;
        let f = tape.slice(sig, h, h)?;
        let o = tape.slice(sig, 2 * h, h)?;
        let g_pre = tape.slice(gates, 3 * h, h)?;
        let g = tape.tanh(g_pre);
        let fc = tape.mul(f, s.c)?;
        let ig = tape.mul(i, g)?;
        let c = tape.add(fc, ig)?;
        let tc = tape.tanh(c);
        let h = tape.mul(o, tc)?;
        Ok(LstmState { h, c })
    }
}
