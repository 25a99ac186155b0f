use std::time::Instant;

use rand::seq::SliceRandom;
use rand_pcg::Pcg64;

use crate::dataset::Example;
use crate::error::{Error, Result};
use crate::nn::Model;
use crate::parallel::*;
use crate::tensor::sgd_step;

/// Examples per gradient work unit. Fixed so the reduction order, and with
/// it every bit of the result, does not depend on the thread count.
const CHUNK: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct HyperParams {
    pub hidden: usize,
    pub lr: f64,
    pub batch: usize,
    pub clip: f64,
    pub init_range: f64,
    pub beam_width: usize,
    /// Training steps (mini-batches) to run.
    pub steps: usize,
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self { hidden: 256, lr: 1.0, batch: 128, clip: 2.0, init_range: 0.08, beam_width: 1, steps: 1000, seed: 0 }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.batch == 0 || self.beam_width == 0 {
            return Err(Error::Argument("hidden, batch and beam width must be positive".into()));
        }
        if !(self.lr > 0.0 && self.clip > 0.0 && self.init_range > 0.0) {
            return Err(Error::Argument("lr, clip and init range must be positive".into()));
        }
        Ok(())
    }
}

/// One logged training step.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainRecord {
    /// 1-based index of the completed step.
    pub step: usize,
    /// Mean NLL per predicted token over the batch, before the update.
    pub loss: f64,
    /// Pre-clipping global gradient norm.
    pub grad_norm: f64,
    pub elapsed_secs: f64,
    pub examples_per_sec: f64,
}

/// Controls a [`train`] call beyond the hyperparameters.
#[derive(Clone, Debug, Default)]
pub struct TrainOptions {
    /// Steps already completed, e.g. when resuming from a checkpoint. The
    /// batch schedule is a pure function of `(seed, step)`, so a resumed run
    /// sees the same batches as an uninterrupted one.
    pub start_step: usize,
    /// Call the checkpoint hook every this many steps (0 = never).
    pub checkpoint_every: usize,
}

/// Dataset positions of the examples in global step `step` (0-based).
/// Epoch `e` visits a permutation drawn from PCG64 stream `2⁶⁴ + e`.
pub fn batch_indices(len: usize, batch: usize, seed: u64, step: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(batch);
    let mut pos = step * batch;
    let mut cached: Option<(usize, Vec<usize>)> = None;
    while out.len() < batch {
        let epoch = pos / len;
        let offset = pos % len;
        if cached.as_ref().map(|(e, _)| *e) != Some(epoch) {
            let mut perm: Vec<usize> = (0..len).collect();
            let mut rng = Pcg64::new(seed as u128, (1u128 << 64) | epoch as u128);
            perm.shuffle(&mut rng);
            cached = Some((epoch, perm));
        }
        let perm = &cached.as_ref().expect("just set").1;
        let take = (batch - out.len()).min(len - offset);
        out.extend_from_slice(&perm[offset..offset + take]);
        pos += take;
    }
    out
}

/// Summed gradients, summed NLL and token count.
pub type BatchGradients = (Vec<Vec<f64>>, f64, usize);

/// Summed gradients, summed NLL and token count over `examples`.
pub fn batch_gradients(model: &Model, examples: &[&Example]) -> Result<BatchGradients> {
    let partials: Vec<Result<BatchGradients>> = examples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = model.params().zero_grads();
            let mut loss = 0.0;
            let mut tokens = 0;
            for ex in chunk {
                let (l, t) = model.accumulate_grads(ex, &mut acc)?;
                loss += l;
                tokens += t;
            }
            Ok((acc, loss, tokens))
        })
        .collect();
    let mut total = model.params().zero_grads();
    let mut loss = 0.0;
    let mut tokens = 0;
    for part in partials {
        let (g, l, t) = part?;
        for (a, b) in total.iter_mut().zip(&g) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        loss += l;
        tokens += t;
    }
    Ok((total, loss, tokens))
}

/// Applies one SGD update from the mean-per-token gradient of `examples`.
pub fn train_step(model: &mut Model, examples: &[&Example], lr: f64, clip: f64) -> Result<(f64, f64)> {
    let (mut grads, loss, tokens) = batch_gradients(model, examples)?;
    let mean = loss / tokens as f64;
    if !mean.is_finite() {
        return Err(Error::Training { param: "<loss>".into(), reason: format!("non-finite batch loss {mean}") });
    }
    let scale = 1.0 / tokens as f64;
    for g in &mut grads {
        g.iter_mut().for_each(|x| *x *= scale);
    }
    let names: Vec<String> = model.params().names().into_iter().map(String::from).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut slices = model.params_mut().all_values_mut();
    let norm = sgd_step(&mut slices, &grads, &name_refs, lr, clip)?;
    Ok((mean, norm))
}

/// Mini-batch SGD with global-norm clipping. The batch loss is the mean NLL
/// per predicted token. `on_checkpoint(model, step)` runs every
/// `opts.checkpoint_every` steps and after the last one; `on_record` sees
/// every step. On a non-finite loss or gradient the parameters are left at
/// their last good values and the error is returned.
pub fn train(
    model: &mut Model,
    data: &[Example],
    hp: &HyperParams,
    opts: &TrainOptions,
    mut on_record: impl FnMut(&TrainRecord),
    mut on_checkpoint: impl FnMut(&Model, usize) -> Result<()>,
) -> Result<Vec<TrainRecord>> {
    hp.validate()?;
    if data.is_empty() {
        return Err(Error::Input("training set is empty".into()));
    }
    for ex in data {
        model.check_length(ex.n())?;
    }
    let started = Instant::now();
    let mut log = Vec::with_capacity(hp.steps.saturating_sub(opts.start_step));
    let mut seen = 0usize;
    for step in opts.start_step..hp.steps {
        let idx = batch_indices(data.len(), hp.batch, hp.seed, step);
        let batch: Vec<&Example> = idx.iter().map(|&i| &data[i]).collect();
        let (loss, grad_norm) = train_step(model, &batch, hp.lr, hp.clip)?;
        seen += batch.len();
        let elapsed = started.elapsed().as_secs_f64();
        let record = TrainRecord {
            step: step + 1,
            loss,
            grad_norm,
            elapsed_secs: elapsed,
            examples_per_sec: if elapsed > 0.0 { seen as f64 / elapsed } else { 0.0 },
        };
        on_record(&record);
        log.push(record);
        let done = step + 1;
        if (opts.checkpoint_every > 0 && done % opts.checkpoint_every == 0) || done == hp.steps {
            on_checkpoint(model, done)?;
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Task;
    use crate::geometry::Point;
    use crate::nn::Arch;

    fn tiny_set() -> Vec<Example> {
        let pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| Point::new(x, y)).collect::<Vec<_>>();
        vec![
            Example {
                task: Task::Hull,
                points: pts(&[(0.1, 0.1), (0.9, 0.2), (0.5, 0.4), (0.4, 0.9)]),
                output: vec![1, 2, 4, 1],
            },
            Example {
                task: Task::Hull,
                points: pts(&[(0.2, 0.8), (0.3, 0.3), (0.8, 0.1), (0.7, 0.7)]),
                output: vec![1, 2, 3, 4, 1],
            },
        ]
    }

    #[test]
    fn batch_schedule_covers_each_epoch() {
        let a = batch_indices(10, 4, 7, 0);
        let b = batch_indices(10, 4, 7, 1);
        let c = batch_indices(10, 4, 7, 2);
        let mut first_epoch: Vec<usize> = a.iter().chain(&b).chain(&c[..2]).copied().collect();
        first_epoch.sort_unstable();
        assert_eq!(first_epoch, (0..10).collect::<Vec<_>>());
        assert_eq!(batch_indices(10, 4, 7, 2), c);
        assert_ne!(batch_indices(10, 4, 8, 0), a);
    }

    #[test]
    fn loss_falls_on_a_tiny_set() {
        let data = tiny_set();
        let mut m = Model::new(Arch::PtrNet, Task::Hull, 16, None, 0.4, 1).unwrap();
        let hp = HyperParams { hidden: 16, batch: 2, steps: 150, ..HyperParams::default() };
        let log = train(&mut m, &data, &hp, &TrainOptions::default(), |_| {}, |_, _| Ok(())).unwrap();
        assert_eq!(log.len(), 150);
        assert!(log[149].loss < 0.7 * log[0].loss, "{} -> {}", log[0].loss, log[149].loss);
    }

    #[test]
    fn resume_reproduces_trace() {
        let data = tiny_set();
        let hp = HyperParams { hidden: 6, batch: 3, steps: 8, ..HyperParams::default() };
        let fresh = Model::new(Arch::PtrNet, Task::Hull, 6, None, 0.08, 5).unwrap();
        let mut full = fresh.clone();
        let all = train(&mut full, &data, &hp, &TrainOptions::default(), |_| {}, |_, _| Ok(())).unwrap();

        let mut part = fresh;
        let half = HyperParams { steps: 3, ..hp.clone() };
        train(&mut part, &data, &half, &TrainOptions::default(), |_| {}, |_, _| Ok(())).unwrap();
        let opts = TrainOptions { start_step: 3, ..Default::default() };
        let rest = train(&mut part, &data, &hp, &opts, |_| {}, |_, _| Ok(())).unwrap();
        let a: Vec<f64> = all[3..].iter().map(|r| r.loss).collect();
        let b: Vec<f64> = rest.iter().map(|r| r.loss).collect();
        assert_eq!(a, b);
        assert_eq!(part, full);
    }

    #[test]
    fn checkpoint_hook_cadence() {
        let data = tiny_set();
        let hp = HyperParams { hidden: 4, batch: 2, steps: 7, ..HyperParams::default() };
        let mut m = Model::new(Arch::PtrNet, Task::Hull, 4, None, 0.08, 0).unwrap();
        let mut at = Vec::new();
        let opts = TrainOptions { checkpoint_every: 3, ..Default::default() };
        train(
            &mut m,
            &data,
            &hp,
            &opts,
            |_| {},
            |_, s| {
                at.push(s);
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(at, vec![3, 6, 7]);
    }
}
