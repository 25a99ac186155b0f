use anyhow::{bail, Context, Result};
use ptrgeo::dataset::{generate, serialize, GenSpec};

use crate::{manifest, GenerateArgs};

pub fn run(a: &GenerateArgs) -> Result<()> {
    let (n_min, n_max) = match (a.n, a.n_min, a.n_max) {
        (Some(n), _, _) => (n, n),
        (None, Some(lo), Some(hi)) => (lo, hi),
        _ => bail!("pass --n or both --n-min and --n-max"),
    };
    if a.output.exists() && !a.force {
        bail!("{} exists; pass --force to overwrite", a.output.display());
    }
    let spec = GenSpec { task: a.task, count: a.count, n_min, n_max, seed: a.seed, solver: a.solver };
    let examples = generate(&spec)?;
    let text: String = examples.iter().map(|e| serialize(e) + "\n").collect();
    std::fs::write(&a.output, &text).with_context(|| format!("writing {}", a.output.display()))?;
    let side = manifest::path_for(&a.output);
    manifest::write(
        &side,
        &[
            ("task", a.task.to_string()),
            ("n_min", n_min.to_string()),
            ("n_max", n_max.to_string()),
            ("count", a.count.to_string()),
            ("seed", a.seed.to_string()),
            ("solver", a.solver.to_string()),
            ("sha256", manifest::sha256_hex(text.as_bytes())),
        ],
    )?;
    println!("wrote {} examples to {}", examples.len(), a.output.display());
    Ok(())
}
