use std::path::Path;

use anyhow::{bail, Context, Result};
use ptrgeo::dataset::{read_examples, Example, Task};

use crate::manifest;

/// Task of a data file: the flag if given, otherwise its manifest. Both
/// present and disagreeing is an error.
pub fn resolve_task(data: &Path, flag: Option<Task>) -> Result<Task> {
    let side = manifest::path_for(data);
    let from_manifest = if side.exists() {
        let m = manifest::read(&side)?;
        match m.get("task") {
            Some(t) => Some(t.parse::<Task>().with_context(|| format!("manifest {}", side.display()))?),
            None => None,
        }
    } else {
        None
    };
    match (flag, from_manifest) {
        (Some(f), Some(m)) if f != m => {
            bail!("--task {f} contradicts manifest task {m} for {}", data.display())
        }
        (Some(t), _) | (None, Some(t)) => Ok(t),
        (None, None) => bail!("cannot tell the task of {}: pass --task or keep its manifest", data.display()),
    }
}

pub fn load(data: &Path, flag: Option<Task>) -> Result<(Task, Vec<Example>)> {
    let task = resolve_task(data, flag)?;
    let examples = read_examples(data, task).with_context(|| format!("reading {}", data.display()))?;
    if examples.is_empty() {
        bail!("{} contains no examples", data.display());
    }
    Ok((task, examples))
}
