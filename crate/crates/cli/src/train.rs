use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{bail, Context, Result};
use ptrgeo::nn::checkpoint::{self, Checkpoint};
use ptrgeo::nn::{train, HyperParams, Model, TrainOptions};

use crate::{data, TrainArgs};

pub fn run(a: &TrainArgs) -> Result<()> {
    let (task, examples) = data::load(&a.data, a.task)?;
    let hp = HyperParams {
        hidden: a.hidden,
        lr: a.lr,
        batch: a.batch,
        clip: a.clip,
        init_range: a.init_range,
        beam_width: 1,
        steps: a.steps,
        seed: a.seed,
    };
    hp.validate()?;

    let exists = a.output.exists();
    let (mut model, start) = if a.resume {
        if !exists {
            bail!("--resume given but {} does not exist", a.output.display());
        }
        let ck = checkpoint::load(&a.output).with_context(|| format!("loading {}", a.output.display()))?;
        if ck.model.arch() != a.arch || ck.model.task() != task || ck.model.hidden() != a.hidden {
            bail!(
                "checkpoint is {} / {} / hidden {}, flags ask for {} / {} / hidden {}",
                ck.model.arch(),
                ck.model.task(),
                ck.model.hidden(),
                a.arch,
                task,
                a.hidden
            );
        }
        if ck.seed != a.seed {
            bail!("checkpoint was trained with seed {}, flags give {}", ck.seed, a.seed);
        }
        (ck.model, ck.step)
    } else {
        if exists && !a.force {
            bail!("{} exists; pass --force to overwrite or --resume to continue", a.output.display());
        }
        let fixed_n = examples[0].n();
        (Model::new(a.arch, task, a.hidden, Some(fixed_n), a.init_range, a.seed)?, 0)
    };
    if start >= a.steps {
        println!("checkpoint already at step {start}; nothing to do");
        return Ok(());
    }

    let mut loss_log = match &a.loss_log {
        Some(p) => {
            let kept = if a.resume { kept_log_lines(p, start)? } else { String::new() };
            let mut w = BufWriter::new(File::create(p).with_context(|| format!("opening {}", p.display()))?);
            w.write_all(kept.as_bytes())?;
            Some(w)
        }
        None => None,
    };
    let mut io_err: Option<std::io::Error> = None;
    let opts = TrainOptions { start_step: start, checkpoint_every: a.checkpoint_every };
    let log_every = a.log_every.max(1);
    let out = a.output.clone();
    let seed = a.seed;
    let result = train(
        &mut model,
        &examples,
        &hp,
        &opts,
        |r| {
            if r.step % log_every == 0 || r.step == hp.steps {
                println!("step={} loss={:.6} examples_per_sec={:.1}", r.step, r.loss, r.examples_per_sec);
            }
            if let Some(w) = loss_log.as_mut() {
                let at_checkpoint =
                    r.step == hp.steps || (opts.checkpoint_every > 0 && r.step % opts.checkpoint_every == 0);
                let res = writeln!(w, "{} {:.17e} {:.17e}", r.step, r.loss, r.grad_norm).and_then(|_| {
                    if at_checkpoint {
                        w.flush()
                    } else {
                        Ok(())
                    }
                });
                if let Err(e) = res {
                    io_err.get_or_insert(e);
                }
            }
        },
        |m, step| checkpoint::save(&out, &Checkpoint { model: m.clone(), step, seed }),
    );
    if let Some(w) = loss_log.as_mut() {
        w.flush()?;
    }
    if let Some(e) = io_err {
        return Err(e).context("writing loss log");
    }
    result.with_context(|| format!("training stopped; last good checkpoint is {}", a.output.display()))?;
    println!("saved {}", a.output.display());
    Ok(())
}

/// Lines of an existing loss log up to and including `step`.
fn kept_log_lines(path: &std::path::Path, step: usize) -> Result<String> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(String::new()),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let mut out = String::new();
    for line in text.lines() {
        let s: usize = line
            .split_whitespace()
            .next()
            .and_then(|t| t.parse().ok())
            .with_context(|| format!("malformed loss log line `{line}` in {}", path.display()))?;
        if s <= step {
            out.push_str(line);
            out.push('\n');
        }
    }
    Ok(out)
}
