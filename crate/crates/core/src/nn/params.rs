use std::collections::HashMap;

use rand::Rng;
use rand_pcg::Pcg64;

use crate::error::{Error, Result};
use crate::tensor::{Gradients, Tape, Tensor, Var};

/// A named learnable tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub tensor: Tensor,
}

/// Ordered collection of uniquely named parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    params: Vec<Parameter>,
    index: HashMap<String, usize>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a parameter and returns its position.
    pub fn add(&mut self, name: impl Into<String>, tensor: Tensor) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Contract(format!("duplicate parameter name `{name}`")));
        }
        self.index.insert(name.clone(), self.params.len());
        self.params.push(Parameter { name, tensor });
        Ok(self.params.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter> {
        self.params.iter()
    }

    pub fn get(&self, i: usize) -> &Parameter {
        &self.params[i]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn by_name(&self, name: &str) -> Option<&Parameter> {
        self.position(name).map(|i| &self.params[i])
    }

    /// Mutable access to one parameter's values (its shape is fixed).
    pub fn values_mut(&mut self, i: usize) -> &mut [f64] {
        self.params[i].tensor.data_mut()
    }

    /// Disjoint mutable views of every parameter, in store order.
    pub fn all_values_mut(&mut self) -> Vec<&mut [f64]> {
        self.params.iter_mut().map(|p| p.tensor.data_mut()).collect()
    }

    /// Total number of scalar weights.
    pub fn scalar_count(&self) -> usize {
        self.params.iter().map(|p| p.tensor.len()).sum()
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|p| p.name.as_str()).collect()
    }

    /// Overwrites every value with an independent draw from
    /// `U(-range, range)`, parameters taken in store order.
    pub fn init_uniform(&mut self, range: f64, seed: u64) {
        let mut rng = Pcg64::new(seed as u128, 0x5eed);
        for p in &mut self.params {
            for v in p.tensor.data_mut() {
                *v = rng.gen_range(-range..=range);
            }
        }
    }

    /// Puts every parameter on `tape` as a borrowed leaf, in store order.
    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> Vec<Var> {
        self.params.iter().map(|p| tape.param(&p.tensor)).collect()
    }

    /// Zeroed gradient buffers aligned with the store.
    pub fn zero_grads(&self) -> Vec<Vec<f64>> {
        self.params.iter().map(|p| vec![0.0; p.tensor.len()]).collect()
    }

    /// Adds the gradients of the bound parameter leaves into `acc`.
    pub fn accumulate(&self, grads: &Gradients, bound: &[Var], acc: &mut [Vec<f64>]) {
        for (a, &v) in acc.iter_mut().zip(bound) {
            if let Some(g) = grads.get(v) {
                for (x, y) in a.iter_mut().zip(g) {
                    *x += y;
                }
            }
        }
    }

    /// Replaces values by name, keeping shapes. Used when loading.
    pub fn assign(&mut self, name: &str, tensor: Tensor) -> Result<()> {
        let i = self.position(name).ok_or_else(|| Error::Checkpoint(format!("unexpected parameter `{name}`")))?;
        if self.params[i].tensor.shape() != tensor.shape() {
            return Err(Error::Checkpoint(format!(
                "parameter `{name}` has shape {:?}, checkpoint has {:?}",
                self.params[i].tensor.shape(),
                tensor.shape()
            )));
        }
        self.params[i].tensor = tensor;
        Ok(())
    }
}
