use crate::error::{Error, Result};

/// Global L2 norm of all gradients taken together.
pub fn global_norm(grads: &[Vec<f64>]) -> f64 {
    grads.iter().flat_map(|g| g.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

/// Plain SGD with global-norm clipping. `params` and `grads` are aligned by
/// position; `names` is used to report the offending parameter when a
/// gradient is not finite. Returns the pre-clipping norm.
pub fn sgd_step(params: &mut [&mut [f64]], grads: &[Vec<f64>], names: &[&str], lr: f64, clip_norm: f64) -> Result<f64> {
    if params.len() != grads.len() || names.len() != grads.len() {
        return Err(Error::Contract(format!(
            "{} parameters, {} gradients, {} names",
            params.len(),
            grads.len(),
            names.len()
        )));
    }
    if !(lr > 0.0 && clip_norm > 0.0) {
        return Err(Error::Argument(format!("lr ({lr}) and clip norm ({clip_norm}) must be positive")));
    }
    for (g, name) in grads.iter().zip(names) {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::Training { param: (*name).to_string(), reason: "non-finite gradient".into() });
        }
    }
    let norm = global_norm(grads);
    let scale = if norm > clip_norm { clip_norm / norm } else { 1.0 };
    for ((p, g), name) in params.iter_mut().zip(grads).zip(names) {
        if p.len() != g.len() {
            return Err(Error::Dimension(format!(
                "gradient for `{name}` has {} values, parameter has {}",
                g.len(),
                p.len()
            )));
        }
        for (pi, gi) in p.iter_mut().zip(g) {
            *pi -= lr * scale * gi;
        }
    }
    Ok(norm)
}
