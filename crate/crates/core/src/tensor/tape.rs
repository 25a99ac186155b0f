use std::borrow::Cow;

use super::ops::{matmul, matmul_backward, matvec, matvec_backward};
use super::{axpy, dot, log_softmax, sigmoid, stable_softmax, Tensor};
use crate::error::{Error, Result};

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(usize);

impl Var {
    pub fn id(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    MatVec(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    /// Adds a column vector to every column of a matrix.
    AddCols(Var, Var),
    Tanh(Var),
    Sigmoid(Var),
    Scale(Var, f64),
    Dot(Var, Var),
    Sum(Var),
    AddN(Vec<Var>),
    Concat(Vec<Var>),
    Slice(Var, usize),
    StackCols(Vec<Var>),
    Reshape(Var),
    Softmax(Var),
    Nll(Var, usize),
}

struct Node<'a> {
    op: Op,
    value: Cow<'a, Tensor>,
}

/// Append-only record of a computation. Node `k` only ever refers to nodes
/// with smaller ids, so reverse id order is a valid backward schedule.
///
/// Leaves may borrow their tensors (model parameters) for the tape's
/// lifetime instead of copying them.
#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
}

/// Per-node gradient accumulators produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    /// Gradient with respect to `v`, or `None` if `v` did not influence the loss.
    pub fn get(&self, v: Var) -> Option<&[f64]> {
        self.grads.get(v.0).and_then(|g| g.as_deref())
    }

    /// Gradient with respect to `v`, zeros when `v` did not influence the loss.
    pub fn get_or_zeros(&self, v: Var, len: usize) -> Vec<f64> {
        self.get(v).map_or_else(|| vec![0.0; len], <[f64]>::to_vec)
    }
}

fn shape_err(op: &str, a: &[usize], b: &[usize]) -> Error {
    Error::Dimension(format!("{op}: incompatible shapes {a:?} and {b:?}"))
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Tensor) -> Var {
        self.nodes.push(Node { op, value: Cow::Owned(value) });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    /// Adds an owned leaf (input data or a constant).
    pub fn leaf(&mut self, t: Tensor) -> Var {
        self.push(Op::Leaf, t)
    }

    /// Adds a leaf that borrows its tensor, typically a model parameter.
    pub fn param(&mut self, t: &'a Tensor) -> Var {
        self.nodes.push(Node { op: Op::Leaf, value: Cow::Borrowed(t) });
        Var(self.nodes.len() - 1)
    }

    /// First node whose value contains NaN or infinity.
    pub fn first_non_finite(&self) -> Option<Var> {
        self.nodes.iter().position(|n| !n.value.is_finite()).map(Var)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        let ((m, k), (k2, n)) = (ta.dims2()?, tb.dims2()?);
        if k != k2 {
            return Err(shape_err("matmul", ta.shape(), tb.shape()));
        }
        let out = matmul(ta.data(), tb.data(), m, k, n);
        Ok(self.push(Op::MatMul(a, b), Tensor::from_parts(vec![m, n], out)))
    }

    /// Matrix-vector product `a[m×k] · b[k] -> [m]`.
    pub fn matvec(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        let (m, k) = ta.dims2()?;
        if tb.shape() != [k] {
            return Err(shape_err("matvec", ta.shape(), tb.shape()));
        }
        let out = matvec(ta.data(), m, k, tb.data());
        Ok(self.push(Op::MatVec(a, b), Tensor::from_parts(vec![m], out)))
    }

    fn binary(&mut self, name: &str, a: Var, b: Var, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(shape_err(name, ta.shape(), tb.shape()));
        }
        let data = ta.data().iter().zip(tb.data()).map(|(&x, &y)| f(x, y)).collect();
        Ok(Tensor::from_parts(ta.shape().to_vec(), data))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.binary("add", a, b, |x, y| x + y)?;
        Ok(self.push(Op::Add(a, b), t))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.binary("sub", a, b, |x, y| x - y)?;
        Ok(self.push(Op::Sub(a, b), t))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let t = self.binary("mul", a, b, |x, y| x * y)?;
        Ok(self.push(Op::Mul(a, b), t))
    }

    /// `m[r×c] + v[r]`, with `v` added to every column.
    pub fn add_cols(&mut self, m: Var, v: Var) -> Result<Var> {
        let (tm, tv) = (self.value(m), self.value(v));
        let (r, c) = tm.dims2()?;
        if tv.shape() != [r] {
            return Err(shape_err("add_cols", tm.shape(), tv.shape()));
        }
        let mut data = tm.data().to_vec();
        for (row, &bias) in data.chunks_exact_mut(c).zip(tv.data()) {
            for x in row {
                *x += bias;
            }
        }
        Ok(self.push(Op::AddCols(m, v), Tensor::from_parts(vec![r, c], data)))
    }

    fn unary(&mut self, a: Var, op: Op, f: impl Fn(f64) -> f64) -> Var {
        let ta = self.value(a);
        let t = Tensor::from_parts(ta.shape().to_vec(), ta.data().iter().map(|&x| f(x)).collect());
        self.push(op, t)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.unary(a, Op::Tanh(a), f64::tanh)
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        self.unary(a, Op::Sigmoid(a), sigmoid)
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        self.unary(a, Op::Scale(a, k), |x| k * x)
    }

    pub fn dot(&mut self, a: Var, b: Var) -> Result<Var> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() || ta.rank() != 1 {
            return Err(shape_err("dot", ta.shape(), tb.shape()));
        }
        let v = dot(ta.data(), tb.data());
        Ok(self.push(Op::Dot(a, b), Tensor::scalar(v)))
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let v = self.value(a).data().iter().sum();
        self.push(Op::Sum(a), Tensor::scalar(v))
    }

    /// Sum of several same-shaped nodes.
    pub fn add_n(&mut self, vars: &[Var]) -> Result<Var> {
        let first = vars.first().ok_or_else(|| Error::Contract("add_n of no operands".into()))?;
        let shape = self.value(*first).shape().to_vec();
        let mut acc = vec![0.0; self.value(*first).len()];
        for &v in vars {
            let t = self.value(v);
            if t.shape() != shape.as_slice() {
                return Err(shape_err("add_n", &shape, t.shape()));
            }
            axpy(1.0, t.data(), &mut acc);
        }
        Ok(self.push(Op::AddN(vars.to_vec()), Tensor::from_parts(shape, acc)))
    }

    /// Concatenates vectors end to end.
    pub fn concat(&mut self, vars: &[Var]) -> Result<Var> {
        let mut data = Vec::new();
        for &v in vars {
            let t = self.value(v);
            if t.rank() != 1 {
                return Err(Error::Dimension(format!("concat expects vectors, got {:?}", t.shape())));
            }
            data.extend_from_slice(t.data());
        }
        if data.is_empty() {
            return Err(Error::Contract("concat of no operands".into()));
        }
        let len = data.len();
        Ok(self.push(Op::Concat(vars.to_vec()), Tensor::from_parts(vec![len], data)))
    }

    /// Contiguous sub-vector `a[start..start + len]`.
    pub fn slice(&mut self, a: Var, start: usize, len: usize) -> Result<Var> {
        let ta = self.value(a);
        if ta.rank() != 1 || len == 0 || start + len > ta.len() {
            return Err(Error::Dimension(format!(
                "slice [{start}, {}) out of range for {:?}",
                start + len,
                ta.shape()
            )));
        }
        let data = ta.data()[start..start + len].to_vec();
        Ok(self.push(Op::Slice(a, start), Tensor::from_parts(vec![len], data)))
    }

    /// Stacks equal-length vectors as the columns of a matrix.
    pub fn stack_cols(&mut self, vars: &[Var]) -> Result<Var> {
        let first = vars.first().ok_or_else(|| Error::Contract("stack_cols of no operands".into()))?;
        let rows = self.value(*first).len();
        let cols = vars.len();
        let mut data = vec![0.0; rows * cols];
        for (j, &v) in vars.iter().enumerate() {
            let t = self.value(v);
            if t.shape() != [rows] {
                return Err(shape_err("stack_cols", &[rows], t.shape()));
            }
            for (i, &x) in t.data().iter().enumerate() {
                data[i * cols + j] = x;
            }
        }
        Ok(self.push(Op::StackCols(vars.to_vec()), Tensor::from_parts(vec![rows, cols], data)))
    }

    pub fn reshape(&mut self, a: Var, shape: Vec<usize>) -> Result<Var> {
        let ta = self.value(a);
        if shape.iter().product::<usize>() != ta.len() {
            return Err(shape_err("reshape", ta.shape(), &shape));
        }
        let t = Tensor::from_parts(shape, ta.data().to_vec());
        Ok(self.push(Op::Reshape(a), t))
    }

    pub fn softmax(&mut self, a: Var) -> Result<Var> {
        let ta = self.value(a);
        if ta.rank() != 1 {
            return Err(Error::Dimension(format!("softmax expects a vector, got {:?}", ta.shape())));
        }
        let t = Tensor::from_parts(ta.shape().to_vec(), stable_softmax(ta.data()));
        Ok(self.push(Op::Softmax(a), t))
    }

    /// Negative log-likelihood `-log softmax(logits)[target]`.
    pub fn nll(&mut self, logits: Var, target: usize) -> Result<Var> {
        let t = self.value(logits);
        if t.rank() != 1 || target >= t.len() {
            return Err(Error::Data(format!("target {target} out of range for logits of shape {:?}", t.shape())));
        }
        let v = -log_softmax(t.data())[target];
        Ok(self.push(Op::Nll(logits, target), Tensor::scalar(v)))
    }

    /// Reverse sweep from a scalar `loss`. Every node is visited once, in
    /// strictly decreasing id order.
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        let lt = self.value(loss);
        if lt.len() != 1 {
            return Err(Error::Contract(format!("backward needs a scalar loss, got shape {:?}", lt.shape())));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; loss.0 + 1];
        grads[loss.0] = Some(vec![1.0]);
        for k in (0..=loss.0).rev() {
            let Some(g) = grads[k].take() else { continue };
            self.propagate(k, &g, &mut grads);
            grads[k] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn propagate(&self, k: usize, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
        let node = &self.nodes[k];
        let out = node.value.data();
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                let (m, kk) = ta.dims2().expect("checked on forward");
                let n = tb.dims2().expect("checked on forward").1;
                let mut da = take_or_zeros(grads, *a, ta.len());
                let mut db = take_or_zeros(grads, *b, tb.len());
                matmul_backward(ta.data(), tb.data(), g, m, kk, n, &mut da, &mut db);
                grads[a.0] = Some(da);
                grads[b.0] = Some(db);
            }
            Op::MatVec(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                let cols = tb.len();
                let mut da = take_or_zeros(grads, *a, ta.len());
                let mut db = take_or_zeros(grads, *b, tb.len());
                matvec_backward(ta.data(), cols, tb.data(), g, &mut da, &mut db);
                grads[a.0] = Some(da);
                grads[b.0] = Some(db);
            }
            Op::Add(a, b) => {
                axpy(1.0, g, acc(grads, *a, g.len()));
                axpy(1.0, g, acc(grads, *b, g.len()));
            }
            Op::Sub(a, b) => {
                axpy(1.0, g, acc(grads, *a, g.len()));
                axpy(-1.0, g, acc(grads, *b, g.len()));
            }
            Op::Mul(a, b) => {
                let ga: Vec<f64> = g.iter().zip(self.value(*b).data()).map(|(x, y)| x * y).collect();
                let gb: Vec<f64> = g.iter().zip(self.value(*a).data()).map(|(x, y)| x * y).collect();
                axpy(1.0, &ga, acc(grads, *a, g.len()));
                axpy(1.0, &gb, acc(grads, *b, g.len()));
            }
            Op::AddCols(m, v) => {
                let rows = self.value(*v).len();
                let cols = g.len() / rows;
                axpy(1.0, g, acc(grads, *m, g.len()));
                let dv = acc(grads, *v, rows);
                for (d, row) in dv.iter_mut().zip(g.chunks_exact(cols)) {
                    *d += row.iter().sum::<f64>();
                }
            }
            Op::Tanh(a) => {
                let da = acc(grads, *a, g.len());
                for ((d, &gi), &y) in da.iter_mut().zip(g).zip(out) {
                    *d += gi * (1.0 - y * y);
                }
            }
            Op::Sigmoid(a) => {
                let da = acc(grads, *a, g.len());
                for ((d, &gi), &y) in da.iter_mut().zip(g).zip(out) {
                    *d += gi * y * (1.0 - y);
                }
            }
            Op::Scale(a, s) => axpy(*s, g, acc(grads, *a, g.len())),
            Op::Dot(a, b) => {
                let (ta, tb) = (self.value(*a), self.value(*b));
                axpy(g[0], tb.data(), acc(grads, *a, ta.len()));
                axpy(g[0], ta.data(), acc(grads, *b, tb.len()));
            }
            Op::Sum(a) => {
                let n = self.value(*a).len();
                acc(grads, *a, n).iter_mut().for_each(|d| *d += g[0]);
            }
            Op::AddN(vars) => {
                for v in vars {
                    axpy(1.0, g, acc(grads, *v, g.len()));
                }
            }
            Op::Concat(vars) => {
                let mut offset = 0;
                for v in vars {
                    let n = self.value(*v).len();
                    axpy(1.0, &g[offset..offset + n], acc(grads, *v, n));
                    offset += n;
                }
            }
            Op::Slice(a, start) => {
                let n = self.value(*a).len();
                axpy(1.0, g, &mut acc(grads, *a, n)[*start..*start + g.len()]);
            }
            Op::StackCols(vars) => {
                let cols = vars.len();
                let rows = g.len() / cols;
                for (j, v) in vars.iter().enumerate() {
                    let dv = acc(grads, *v, rows);
                    for (i, d) in dv.iter_mut().enumerate() {
                        *d += g[i * cols + j];
                    }
                }
            }
            Op::Reshape(a) => axpy(1.0, g, acc(grads, *a, g.len())),
            Op::Softmax(a) => {
                // dx = y ⊙ (g - <g, y>)
                let gy = dot(g, out);
                let da = acc(grads, *a, g.len());
                for ((d, &gi), &y) in da.iter_mut().zip(g).zip(out) {
                    *d += y * (gi - gy);
                }
            }
            Op::Nll(a, target) => {
                let p = stable_softmax(self.value(*a).data());
                let da = acc(grads, *a, p.len());
                for (j, (d, pj)) in da.iter_mut().zip(p).enumerate() {
                    let onehot = if j == *target { 1.0 } else { 0.0 };
                    *d += g[0] * (pj - onehot);
                }
            }
        }
    }
}

fn acc(grads: &mut [Option<Vec<f64>>], v: Var, len: usize) -> &mut [f64] {
    grads[v.0].get_or_insert_with(|| vec![0.0; len])
}

fn take_or_zeros(grads: &mut [Option<Vec<f64>>], v: Var, len: usize) -> Vec<f64> {
    grads[v.0].take().unwrap_or_else(|| vec![0.0; len])
}
