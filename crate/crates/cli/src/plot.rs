use anyhow::{bail, Context, Result};
use ptrgeo::plot::{parse_detail, render};

use crate::{data, PlotArgs};

pub fn run(a: &PlotArgs) -> Result<()> {
    let (_, examples) = data::load(&a.data, a.task)?;
    let Some(ex) = examples.get(a.index) else {
        bail!("index {} out of range: {} has {} examples", a.index, a.data.display(), examples.len());
    };
    let prediction = match &a.detail {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let rows = parse_detail(&text).with_context(|| format!("parsing {}", p.display()))?;
            match rows.into_iter().find(|(i, _)| *i == a.index) {
                Some((_, pred)) => Some(pred),
                None => bail!("{} has no row for index {}", p.display(), a.index),
            }
        }
        None => None,
    };
    let svg = render(ex, prediction.as_deref());
    std::fs::write(&a.output, svg).with_context(|| format!("writing {}", a.output.display()))?;
    Ok(())
}
