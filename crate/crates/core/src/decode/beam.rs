use std::cmp::Ordering;

use crate::dataset::EOS;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::nn::{DecoderState, Model};
use crate::tensor::{log_softmax, Tape};

/// Output restrictions applied while decoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Constraint {
    #[default]
    None,
    /// Each city exactly once, and the end token only after all of them.
    ValidTour,
}

impl std::str::FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Constraint::None),
            "valid-tour" | "valid_tour" => Ok(Constraint::ValidTour),
            other => Err(Error::Argument(format!("unknown constraint `{other}`"))),
        }
    }
}

/// A partial output on the beam.
#[derive(Clone, Debug)]
pub struct BeamHypothesis {
    /// Emitted tokens so far, each in `1..=n`.
    pub tokens: Vec<usize>,
    pub log_prob: f64,
    state: DecoderState,
    visited: Vec<bool>,
}

/// A finished decode. `tokens` excludes the end token; `capped` marks an
/// output cut off by the length cap instead of ending itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub tokens: Vec<usize>,
    pub log_prob: f64,
    pub capped: bool,
}

fn allowed(constraint: Constraint, n: usize, h: &BeamHypothesis, t: usize) -> bool {
    if t > n {
        return false;
    }
    match constraint {
        Constraint::None => true,
        Constraint::ValidTour => {
            if h.tokens.len() >= n {
                t == EOS
            } else {
                t != EOS && !h.visited[t]
            }
        }
    }
}

/// Higher probability first, then lexicographically smaller tokens.
fn rank(a: (f64, &[usize], Option<usize>), b: (f64, &[usize], Option<usize>)) -> Ordering {
    b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then_with(|| {
        let ea = a.1.iter().copied().chain(a.2);
        let eb = b.1.iter().copied().chain(b.2);
        ea.cmp(eb)
    })
}

fn root(state: DecoderState, n: usize) -> BeamHypothesis {
    BeamHypothesis { tokens: Vec::new(), log_prob: 0.0, state, visited: vec![false; n + 1] }
}

/// Argmax decoding; ties go to the lowest token.
pub fn greedy(model: &Model, points: &[Point], constraint: Constraint) -> Result<Decoded> {
    let n = points.len();
    let cap = model.task().length_cap(n);
    let mut tape = Tape::new();
    let enc = model.encode(&mut tape, points)?;
    let mut h = root(enc.initial, n);
    loop {
        let (logits, next) = model.step(&mut tape, &enc, &h.state, h.tokens.last().copied())?;
        let lp = log_softmax(tape.value(logits).data());
        let mut best: Option<usize> = None;
        for t in 0..lp.len() {
            if allowed(constraint, n, &h, t) && lp[t].is_finite() && best.is_none_or(|b| lp[t] > lp[b]) {
                best = Some(t);
            }
        }
        let t = best.ok_or_else(|| Error::Decode("every continuation is masked".into()))?;
        h.log_prob += lp[t];
        if t == EOS {
            return Ok(Decoded { tokens: h.tokens, log_prob: h.log_prob, capped: false });
        }
        h.tokens.push(t);
        h.visited[t] = true;
        h.state = next;
        if h.tokens.len() >= cap {
            return Ok(Decoded { tokens: h.tokens, log_prob: h.log_prob, capped: true });
        }
    }
}

/// Beam search over the model's output distributions. A hypothesis is
/// final once it emits the end token or reaches the task's length cap. The
/// search stops when no live hypothesis can still beat the best final one,
/// which returns the same answer as running the beam to exhaustion because
/// log-probabilities only decrease.
pub fn beam_search(model: &Model, points: &[Point], width: usize, constraint: Constraint) -> Result<Decoded> {
    if width == 0 {
        return Err(Error::Argument("beam width must be at least 1".into()));
    }
    let n = points.len();
    let cap = model.task().length_cap(n);
    let mut tape = Tape::new();
    let enc = model.encode(&mut tape, points)?;
    let mut alive = vec![root(enc.initial, n)];
    let mut best: Option<Decoded> = None;

    while !alive.is_empty() {
        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        let mut next_states = Vec::with_capacity(alive.len());
        for (hi, h) in alive.iter().enumerate() {
            let (logits, next) = model.step(&mut tape, &enc, &h.state, h.tokens.last().copied())?;
            next_states.push(next);
            let lp = log_softmax(tape.value(logits).data());
            for (t, &l) in lp.iter().enumerate() {
                let total = h.log_prob + l;
                if allowed(constraint, n, h, t) && total.is_finite() {
                    cand.push((total, hi, t));
                }
            }
        }
        cand.sort_by(|a, b| rank((a.0, &alive[a.1].tokens, Some(a.2)), (b.0, &alive[b.1].tokens, Some(b.2))));
        cand.truncate(width);

        let mut survivors = Vec::with_capacity(width);
        for (lp, hi, t) in cand {
            let parent = &alive[hi];
            let done = if t == EOS {
                Some(Decoded { tokens: parent.tokens.clone(), log_prob: lp, capped: false })
            } else {
                let mut tokens = parent.tokens.clone();
                tokens.push(t);
                if tokens.len() >= cap {
                    Some(Decoded { tokens, log_prob: lp, capped: true })
                } else {
                    let mut visited = parent.visited.clone();
                    visited[t] = true;
                    survivors.push(BeamHypothesis { tokens, log_prob: lp, state: next_states[hi], visited });
                    None
                }
            };
            if let Some(d) = done {
                let better = best.as_ref().is_none_or(|b| {
                    rank((d.log_prob, &d.tokens, None), (b.log_prob, &b.tokens, None)) == Ordering::Less
                });
                if better {
                    best = Some(d);
                }
            }
        }
        alive = survivors;
        if let (Some(b), Some(top)) = (&best, alive.first()) {
            if top.log_prob < b.log_prob {
                break;
            }
        }
    }
    best.ok_or_else(|| Error::Decode("no hypothesis reached the end token or the length cap".into()))
}
