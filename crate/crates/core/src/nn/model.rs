use crate::dataset::{Example, Task, EOS};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nn::attention::{Attention, Memory};
use crate::nn::lstm::{LstmCell, LstmState};
use crate::nn::params::ParamStore;
use crate::tensor::{Tape, Tensor, Var};

/// The three sequence models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arch {
    /// Pointer network: the output distribution is the attention softmax over
    /// the input positions plus an end-of-sequence sentinel.
    PtrNet,
    /// Encoder-decoder LSTM with a fixed output dictionary.
    Seq2Seq,
    /// Encoder-decoder LSTM with attention blending and a fixed dictionary.
    Seq2SeqAttn,
}

impl Arch {
    pub const ALL: [Arch; 3] = [Arch::PtrNet, Arch::Seq2Seq, Arch::Seq2SeqAttn];

    pub fn name(self) -> &'static str {
        match self {
            Arch::PtrNet => "ptrnet",
            Arch::Seq2Seq => "lstm",
            Arch::Seq2SeqAttn => "lstm-attn",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Arch::PtrNet => 0,
            Arch::Seq2Seq => 1,
            Arch::Seq2SeqAttn => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        Arch::ALL
            .into_iter()
            .find(|a| a.tag() == tag)
            .ok_or_else(|| Error::Checkpoint(format!("unknown architecture tag {tag}")))
    }

    pub fn has_fixed_dictionary(self) -> bool {
        self != Arch::PtrNet
    }
}

impl std::str::FromStr for Arch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ptrnet" | "ptr-net" => Ok(Arch::PtrNet),
            "lstm" | "seq2seq" => Ok(Arch::Seq2Seq),
            "lstm-attn" | "seq2seq-attn" | "attention" => Ok(Arch::Seq2SeqAttn),
            other => Err(Error::Argument(format!("unknown architecture `{other}`"))),
        }
    }
}

impl std::fmt::Display for Arch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter positions in the store.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Layout {
    embed_w: usize,
    embed_b: usize,
    enc: [usize; 3],
    dec: [usize; 3],
    attn: Option<[usize; 3]>,
    start: Option<usize>,
    eos: Option<usize>,
    tokens: Option<usize>,
    out: Option<[usize; 2]>,
}

/// A sequence model with its parameters.
///
/// Token convention shared by all architectures: `0` is the end token and
/// `1..=n` are input positions. Fixed-dictionary models also reserve class
/// `n + 1` for the start token, which is fed but never predicted.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    arch: Arch,
    task: Task,
    hidden: usize,
    fixed_n: Option<usize>,
    params: ParamStore,
    layout: Layout,
}

/// Decoder recurrent state plus, for the attention baseline, the blended
/// context fed into the next step.
#[derive(Clone, Copy, Debug)]
pub struct DecoderState {
    pub lstm: LstmState,
    pub feed: Option<Var>,
}

#[derive(Clone, Copy, Debug)]
struct Net {
    embed_w: Var,
    embed_b: Var,
    enc: LstmCell,
    dec: LstmCell,
    attn: Option<Attention>,
    start: Option<Var>,
    eos: Option<Var>,
    tokens_flat: Option<Var>,
    out: Option<(Var, Var)>,
}

/// Everything the decoder needs about one encoded input.
#[derive(Clone, Debug)]
pub struct Encoded {
    net: Net,
    embedded: Vec<Var>,
    /// Encoder outputs; for the pointer network position 0 is the sentinel.
    pub states: Vec<Var>,
    memory: Option<Memory>,
    pub initial: DecoderState,
    n: usize,
    bound: Vec<Var>,
}

impl Encoded {
    pub fn n(&self) -> usize {
        self.n
    }
}

impl Model {
    /// Builds a model with parameters drawn from `U(-init_range, init_range)`.
    /// Fixed-dictionary architectures need `fixed_n`; the pointer network
    /// ignores it.
    pub fn new(
        arch: Arch,
        task: Task,
        hidden: usize,
        fixed_n: Option<usize>,
        init_range: f64,
        seed: u64,
    ) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::Argument("hidden size must be positive".into()));
        }
        let fixed_n = match (arch, fixed_n) {
            (Arch::PtrNet, _) => None,
            (_, Some(n)) if n >= 1 => Some(n),
            _ => return Err(Error::Argument(format!("{arch} has a fixed output dictionary and needs the training n"))),
        };
        let h = hidden;
        let mut p = ParamStore::new();
        let z = |shape: Vec<usize>| Tensor::zeros(shape);

        let embed_w = p.add("embed.w", z(vec![h, 2]))?;
        let embed_b = p.add("embed.b", z(vec![h]))?;
        let enc = [
            p.add("encoder.w_ih", z(vec![4 * h, h]))?,
            p.add("encoder.w_hh", z(vec![4 * h, h]))?,
            p.add("encoder.b", z(vec![4 * h]))?,
        ];
        let dec_in = if arch == Arch::Seq2SeqAttn { 2 * h } else { h };
        let dec = [
            p.add("decoder.w_ih", z(vec![4 * h, dec_in]))?,
            p.add("decoder.w_hh", z(vec![4 * h, h]))?,
            p.add("decoder.b", z(vec![4 * h]))?,
        ];
        let attn = if arch == Arch::Seq2Seq {
            None
        } else {
            Some([
                p.add("attention.w1", z(vec![h, h]))?,
                p.add("attention.w2", z(vec![h, h]))?,
                p.add("attention.v", z(vec![h]))?,
            ])
        };
        let (start, eos, tokens, out) = match (arch, fixed_n) {
            (Arch::PtrNet, _) => {
                (Some(p.add("decoder.start", z(vec![h]))?), Some(p.add("pointer.eos", z(vec![h]))?), None, None)
            }
            (_, Some(n)) => {
                let classes = n + 2;
                let proj_in = if arch == Arch::Seq2SeqAttn { 2 * h } else { h };
                (
                    None,
                    None,
                    Some(p.add("decoder.tokens", z(vec![classes, h]))?),
                    Some([p.add("output.w", z(vec![classes, proj_in]))?, p.add("output.b", z(vec![classes]))?]),
                )
            }
            _ => unreachable!("validated above"),
        };
        p.init_uniform(init_range, seed);
        Ok(Self {
            arch,
            task,
            hidden,
            fixed_n,
            params: p,
            layout: Layout { embed_w, embed_b, enc, dec, attn, start, eos, tokens, out },
        })
    }

    pub fn arch(&self) -> Arch {
        self.arch
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    /// Training length of a fixed-dictionary model.
    pub fn fixed_n(&self) -> Option<usize> {
        self.fixed_n
    }

    pub fn params(&self) -> &ParamStore {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore {
        &mut self.params
    }

    /// Size of the output distribution for an `n`-point input.
    pub fn output_size(&self, n: usize) -> usize {
        match self.fixed_n {
            None => n + 1,
            Some(fixed) => fixed + 2,
        }
    }

    /// Rejects inputs a fixed-dictionary model was not trained for.
    pub fn check_length(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Input("empty point set".into()));
        }
        match self.fixed_n {
            Some(expected) if expected != n => Err(Error::UnsupportedLength { expected, got: n }),
            _ => Ok(()),
        }
    }

    fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> Result<(Net, Vec<Var>)> {
        let v = self.params.bind(tape);
        let l = &self.layout;
        let enc = LstmCell::new(tape, v[l.enc[0]], v[l.enc[1]], v[l.enc[2]])?;
        let dec = LstmCell::new(tape, v[l.dec[0]], v[l.dec[1]], v[l.dec[2]])?;
        let attn = match l.attn {
            Some([w1, w2, vv]) => Some(Attention::new(tape, v[w1], v[w2], v[vv])?),
            None => None,
        };
        let tokens_flat = match l.tokens {
            Some(t) => {
                let len = tape.value(v[t]).len();
                Some(tape.reshape(v[t], vec![len])?)
            }
            None => None,
        };
        let net = Net {
            embed_w: v[l.embed_w],
            embed_b: v[l.embed_b],
            enc,
            dec,
            attn,
            start: l.start.map(|i| v[i]),
            eos: l.eos.map(|i| v[i]),
            tokens_flat,
            out: l.out.map(|[w, b]| (v[w], v[b])),
        };
        Ok((net, v))
    }

    /// Runs the encoder over `points` in their given order from a zero state.
    pub fn encode<'a>(&'a self, tape: &mut Tape<'a>, points: &[Point]) -> Result<Encoded> {
        self.check_length(points.len())?;
        let (net, bound) = self.bind(tape)?;
        let mut embedded = Vec::with_capacity(points.len());
        for p in points {
            let x = tape.leaf(Tensor::from_parts(vec![2], vec![p.x, p.y]));
            let wx = tape.matvec(net.embed_w, x)?;
            embedded.push(tape.add(wx, net.embed_b)?);
        }
        let mut state = LstmState::zeros(tape, self.hidden);
        let mut states = Vec::with_capacity(points.len() + 1);
        if let Some(eos) = net.eos {
            states.push(eos);
        }
        for &x in &embedded {
            state = net.enc.step(tape, x, state)?;
            states.push(state.h);
        }
        let memory = match (self.arch, net.attn) {
            (Arch::PtrNet, Some(a)) => Some(a.memory(tape, &states)?),
            (Arch::Seq2SeqAttn, Some(a)) => Some(a.memory(tape, &states)?),
            _ => None,
        };
        let feed =
            if self.arch == Arch::Seq2SeqAttn { Some(tape.leaf(Tensor::zeros(vec![self.hidden]))) } else { None };
        Ok(Encoded {
            net,
            embedded,
            states,
            memory,
            initial: DecoderState { lstm: state, feed },
            n: points.len(),
            bound,
        })
    }

    /// One decoder step. `prev` is the previously emitted token (`None` at
    /// the first step, where the start token is fed). Returns the unnormalised
    /// scores over the output dictionary and the next state.
    pub fn step(
        &self,
        tape: &mut Tape<'_>,
        enc: &Encoded,
        state: &DecoderState,
        prev: Option<usize>,
    ) -> Result<(Var, DecoderState)> {
        let net = &enc.net;
        let h = self.hidden;
        let input = match self.arch {
            Arch::PtrNet => match prev {
                None => net.start.expect("pointer network has a start vector"),
                Some(t) if (1..=enc.n).contains(&t) => enc.embedded[t - 1],
                Some(t) => return Err(Error::Data(format!("cannot feed token {t} for n={}", enc.n))),
            },
            Arch::Seq2Seq | Arch::Seq2SeqAttn => {
                let classes = self.output_size(enc.n);
                let t = prev.unwrap_or(classes - 1);
                if t >= classes || t == EOS && prev.is_some() {
                    return Err(Error::Data(format!("cannot feed token {t} for n={}", enc.n)));
                }
                let flat = net.tokens_flat.expect("fixed-dictionary model has token embeddings");
                let emb = tape.slice(flat, t * h, h)?;
                match state.feed {
                    Some(f) => tape.concat(&[emb, f])?,
                    None => emb,
                }
            }
        };
        let lstm = net.dec.step(tape, input, state.lstm)?;
        let d = lstm.h;
        match self.arch {
            Arch::PtrNet => {
                let attn = net.attn.expect("pointer network has attention");
                let mem = enc.memory.as_ref().expect("pointer memory");
                let logits = attn.scores(tape, mem, d)?;
                Ok((logits, DecoderState { lstm, feed: None }))
            }
            Arch::Seq2Seq => {
                let (w, b) = net.out.expect("output projection");
                let wd = tape.matvec(w, d)?;
                let logits = tape.add(wd, b)?;
                Ok((logits, DecoderState { lstm, feed: None }))
            }
            Arch::Seq2SeqAttn => {
                let attn = net.attn.expect("attention baseline has attention");
                let mem = enc.memory.as_ref().expect("attention memory");
                let context = attn.blend(tape, mem, d)?;
                let hidden = tape.concat(&[context, d])?;
                let (w, b) = net.out.expect("output projection");
                let wd = tape.matvec(w, hidden)?;
                let logits = tape.add(wd, b)?;
                Ok((logits, DecoderState { lstm, feed: Some(context) }))
            }
        }
    }

    /// Teacher-forced negative log-likelihood of the example's label plus
    /// the end token. Returns the loss node and the number of predicted
    /// tokens.
    pub fn forward_nll<'a>(&'a self, tape: &mut Tape<'a>, example: &Example) -> Result<(Var, usize)> {
        self.forward(tape, example).map(|(loss, tokens, _)| (loss, tokens))
    }

    fn forward<'a>(&'a self, tape: &mut Tape<'a>, example: &Example) -> Result<(Var, usize, Vec<Var>)> {
        let enc = self.encode(tape, &example.points)?;
        let targets = example.targets();
        let n = example.n();
        if let Some(&bad) = targets.iter().find(|&&t| t > n) {
            return Err(Error::Data(format!("target {bad} outside 0..={n}")));
        }
        let mut state = enc.initial;
        let mut prev = None;
        let mut terms = Vec::with_capacity(targets.len());
        for &t in &targets {
            let (logits, next) = self.step(tape, &enc, &state, prev)?;
            terms.push(tape.nll(logits, t)?);
            state = next;
            prev = Some(t);
        }
        let loss = tape.add_n(&terms)?;
        Ok((loss, targets.len(), enc.bound))
    }

    /// Summed NLL of one example.
    pub fn nll(&self, example: &Example) -> Result<f64> {
        let mut tape = Tape::new();
        let (loss, _) = self.forward_nll(&mut tape, example)?;
        tape.value(loss).item()
    }

    /// Adds d(NLL)/dθ for one example into `acc` (aligned with the store).
    /// Returns the summed NLL and the token count.
    pub fn accumulate_grads(&self, example: &Example, acc: &mut [Vec<f64>]) -> Result<(f64, usize)> {
        let mut tape = Tape::new();
        let (loss, tokens, bound) = self.forward(&mut tape, example)?;
        let value = tape.value(loss).item()?;
        let grads = tape.backward(loss)?;
        self.params.accumulate(&grads, &bound, acc);
        Ok((value, tokens))
    }

    /// Encoder outputs as plain tensors (sentinel first for the pointer net).
    pub fn encoder_states(&self, points: &[Point]) -> Result<Vec<Tensor>> {
        let mut tape = Tape::new();
        let enc = self.encode(&mut tape, points)?;
        Ok(enc.states.iter().map(|&v| tape.value(v).clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hull_example() -> Example {
        Example {
            task: Task::Hull,
            points: vec![Point::new(0.1, 0.1), Point::new(0.9, 0.2), Point::new(0.5, 0.4), Point::new(0.4, 0.9)],
            output: vec![1, 2, 4, 1],
        }
    }

    #[test]
    fn encoder_output_count() {
        let m = Model::new(Arch::PtrNet, Task::Hull, 6, None, 0.08, 1).unwrap();
        assert_eq!(m.encoder_states(&[Point::new(0.2, 0.3)]).unwrap().len(), 2);
        let pts = hull_example().points;
        assert_eq!(m.encoder_states(&pts).unwrap().len(), 5);
        assert!(matches!(m.encoder_states(&[]), Err(Error::Input(_))));
        let s = Model::new(Arch::Seq2Seq, Task::Hull, 6, Some(4), 0.08, 1).unwrap();
        assert_eq!(s.encoder_states(&pts).unwrap().len(), 4);
    }

    #[test]
    fn sentinel_is_state_zero() {
        let m = Model::new(Arch::PtrNet, Task::Hull, 5, None, 0.08, 2).unwrap();
        let states = m.encoder_states(&hull_example().points).unwrap();
        assert_eq!(&states[0], &m.params().by_name("pointer.eos").unwrap().tensor);
    }

    #[test]
    fn fixed_dictionary_rejects_other_lengths() {
        let m = Model::new(Arch::Seq2Seq, Task::Hull, 4, Some(5), 0.08, 0).unwrap();
        let pts: Vec<Point> = (0..6).map(|i| Point::new(i as f64 / 6.0, 0.5)).collect();
        assert!(matches!(m.encoder_states(&pts), Err(Error::UnsupportedLength { expected: 5, got: 6 })));
        assert!(Model::new(Arch::Seq2SeqAttn, Task::Hull, 4, None, 0.08, 0).is_err());
    }

    #[test]
    fn loss_is_positive_and_targets_checked() {
        for arch in Arch::ALL {
            let m = Model::new(arch, Task::Hull, 4, Some(4), 0.08, 3).unwrap();
            assert!(m.nll(&hull_example()).unwrap() > 0.0);
            let mut bad = hull_example();
            bad.output = vec![1, 5, 1];
            assert!(matches!(m.nll(&bad), Err(Error::Data(_))), "{arch}");
        }
    }

    #[test]
    fn parameter_count_depends_only_on_hidden() {
        let a = Model::new(Arch::PtrNet, Task::Hull, 7, None, 0.08, 0).unwrap();
        let b = Model::new(Arch::PtrNet, Task::Tsp, 7, Some(50), 0.08, 9).unwrap();
        let h = 7;
        let expected = 3 * h + 2 * (8 * h * h + 4 * h) + 2 * h * h + h + 2 * h;
        assert_eq!(a.params().scalar_count(), expected);
        assert_eq!(b.params().scalar_count(), expected);
    }
}
