use anyhow::{bail, Context, Result};
use ptrgeo::decode::{evaluate, Predictor};
use ptrgeo::nn::checkpoint;

use crate::{data, EvalArgs};

pub fn run(a: &EvalArgs) -> Result<()> {
    let (task, examples) = data::load(&a.data, a.task)?;
    let ck = match &a.checkpoint {
        Some(p) => Some(checkpoint::load(p).with_context(|| format!("loading {}", p.display()))?),
        None => None,
    };
    let predictor = match (&ck, a.solver) {
        (Some(ck), _) => {
            if ck.model.task() != task {
                bail!("checkpoint was trained on {} but {} holds {} data", ck.model.task(), a.data.display(), task);
            }
            Predictor::Model { model: &ck.model, beam: a.beam, constraint: a.constraint }
        }
        (None, Some(s)) => Predictor::Classical(s),
        (None, None) => bail!("pass --checkpoint or --solver"),
    };
    let report = evaluate(&predictor, &examples)?;
    let text = report.to_text();
    print!("{text}");
    if let Some(p) = &a.output {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = &a.per_example {
        std::fs::write(p, report.to_tsv()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
