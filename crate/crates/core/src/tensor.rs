//! Dense labeled tensors and greedy network contraction.
//!
//! A label may occur in any number of tensors. When two tensors are merged, a
//! shared label that still occurs elsewhere (or is an output label) is kept
//! as a diagonal index; otherwise it is summed. With two occurrences per label
//! this is ordinary tensor contraction, with more it is variable elimination
//! over a factor graph.

use crate::exec;
use num_complex::Complex64;
use std::collections::HashMap;

pub type Label = usize;

#[derive(Debug, Clone)]
pub struct Tensor {
    pub labels: Vec<Label>,
    pub dims: Vec<usize>,
    /// Row-major, first label most significant.
    pub data: Vec<Complex64>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

impl Tensor {
    pub fn new(labels: Vec<Label>, dims: Vec<usize>, data: Vec<Complex64>) -> Self {
        assert_eq!(labels.len(), dims.len());
        assert_eq!(dims.iter().product::<usize>(), data.len());
        let t = Self { labels, dims, data };
        t.collapse_repeated()
    }

    pub fn scalar(v: Complex64) -> Self {
        Self {
            labels: Vec::new(),
            dims: Vec::new(),
            data: vec![v],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Restricts repeated labels to their diagonal.
    fn collapse_repeated(self) -> Self {
        let mut uniq: Vec<Label> = Vec::new();
        let mut udims: Vec<usize> = Vec::new();
        for (&l, &d) in self.labels.iter().zip(&self.dims) {
            if let Some(p) = uniq.iter().position(|&u| u == l) {
                assert_eq!(udims[p], d, "repeated label with different dimensions");
            } else {
                uniq.push(l);
                udims.push(d);
            }
        }
        if uniq.len() == self.labels.len() {
            return self;
        }
        let old_strides = strides(&self.dims);
        let new_strides = strides(&udims);
        let n: usize = udims.iter().product();
        let data = (0..n)
            .map(|k| {
                let mut off = 0;
                for (pos, l) in self.labels.iter().enumerate() {
                    let u = uniq.iter().position(|x| x == l).unwrap();
                    off += ((k / new_strides[u]) % udims[u]) * old_strides[pos];
                }
                self.data[off]
            })
            .collect();
        Self {
            labels: uniq,
            dims: udims,
            data,
        }
    }

    /// Sums out the given labels.
    pub fn sum_labels(&self, drop: &[Label]) -> Tensor {
        let keep: Vec<usize> = (0..self.labels.len()).filter(|&i| !drop.contains(&self.labels[i])).collect();
        let summed: Vec<usize> = (0..self.labels.len()).filter(|&i| drop.contains(&self.labels[i])).collect();
        if summed.is_empty() {
            return self.clone();
        }
        let st = strides(&self.dims);
        let kdims: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let sdims: Vec<usize> = summed.iter().map(|&i| self.dims[i]).collect();
        let kst = strides(&kdims);
        let sst = strides(&sdims);
        let nk: usize = kdims.iter().product();
        let ns: usize = sdims.iter().product();
        let data = exec::map_indexed(nk, |k| {
            let mut base = 0;
            for (p, &i) in keep.iter().enumerate() {
                base += ((k / kst[p]) % kdims[p]) * st[i];
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..ns {
                let mut off = base;
                for (p, &i) in summed.iter().enumerate() {
                    off += ((s / sst[p]) % sdims[p]) * st[i];
                }
                acc += self.data[off];
            }
            acc
        });
        Tensor {
            labels: keep.iter().map(|&i| self.labels[i]).collect(),
            dims: kdims,
            data,
        }
    }

    /// Product of two tensors; shared labels in `sum` are summed, other
    /// shared labels are kept once. Result labels: `self` order, then new
    /// labels of `other`.
    pub fn merge(&self, other: &Tensor, sum: &[Label]) -> Tensor {
        let mut out_labels: Vec<Label> = Vec::new();
        let mut out_dims: Vec<usize> = Vec::new();
        let mut sum_labels: Vec<Label> = Vec::new();
        let mut sum_dims: Vec<usize> = Vec::new();
        for (&l, &d) in self.labels.iter().zip(&self.dims).chain(other.labels.iter().zip(&other.dims)) {
            if sum.contains(&l) {
                if !sum_labels.contains(&l) {
                    sum_labels.push(l);
                    sum_dims.push(d);
                }
            } else if !out_labels.contains(&l) {
                out_labels.push(l);
                out_dims.push(d);
            }
        }
        let ost = strides(&out_dims);
        let sst = strides(&sum_dims);
        let ast = strides(&self.dims);
        let bst = strides(&other.dims);
        // per position of each operand: (is_summed, index into out/sum, stride)
        let place = |labels: &[Label], st: &[usize]| -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
            let mut o = Vec::new();
            let mut s = Vec::new();
            for (p, l) in labels.iter().enumerate() {
                if let Some(i) = sum_labels.iter().position(|x| x == l) {
                    s.push((i, st[p]));
                } else {
                    let i = out_labels.iter().position(|x| x == l).unwrap();
                    o.push((i, st[p]));
                }
            }
            (o, s)
        };
        let (a_out, a_sum) = place(&self.labels, &ast);
        let (b_out, b_sum) = place(&other.labels, &bst);
        let no: usize = out_dims.iter().product();
        let ns: usize = sum_dims.iter().product();
        let data = exec::map_indexed(no, |k| {
            let digit = |i: usize| (k / ost[i]) % out_dims[i];
            let abase: usize = a_out.iter().map(|&(i, st)| digit(i) * st).sum();
            let bbase: usize = b_out.iter().map(|&(i, st)| digit(i) * st).sum();
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..ns {
                let sd = |i: usize| (s / sst[i]) % sum_dims[i];
                let ao = abase + a_sum.iter().map(|&(i, st)| sd(i) * st).sum::<usize>();
                let bo = bbase + b_sum.iter().map(|&(i, st)| sd(i) * st).sum::<usize>();
                let x = self.data[ao];
                if x.re != 0.0 || x.im != 0.0 {
                    acc += x * other.data[bo];
                }
            }
            acc
        });
        Tensor {
            labels: out_labels,
            dims: out_dims,
            data,
        }
    }

    /// Reorders the tensor to the given label order.
    pub fn permuted(&self, order: &[Label]) -> Tensor {
        assert_eq!(order.len(), self.labels.len());
        let pos: Vec<usize> = order
            .iter()
            .map(|l| self.labels.iter().position(|x| x == l).expect("label present"))
            .collect();
        let dims: Vec<usize> = pos.iter().map(|&p| self.dims[p]).collect();
        let st = strides(&self.dims);
        let nst = strides(&dims);
        let data = (0..self.data.len())
            .map(|k| {
                let off: usize = pos.iter().enumerate().map(|(i, &p)| ((k / nst[i]) % dims[i]) * st[p]).sum();
                self.data[off]
            })
            .collect();
        Tensor {
            labels: order.to_vec(),
            dims,
            data,
        }
    }
}

/// Contracts a network, leaving `open` labels in the given order.
///
/// Pairs are merged greedily by smallest result size, ties broken by
/// position, so the schedule and the floating-point result are fixed by the
/// input alone.
pub fn contract(mut tensors: Vec<Tensor>, open: &[Label]) -> Tensor {
    if tensors.is_empty() {
        return Tensor::scalar(Complex64::new(1.0, 0.0));
    }
    let count = |ts: &[Tensor]| {
        let mut m: HashMap<Label, usize> = HashMap::new();
        for t in ts {
            for &l in &t.labels {
                *m.entry(l).or_default() += 1;
            }
        }
        m
    };
    // labels private to one tensor can be summed right away
    let counts = count(&tensors);
    for t in tensors.iter_mut() {
        let private: Vec<Label> = t
            .labels
            .iter()
            .copied()
            .filter(|l| counts[l] == 1 && !open.contains(l))
            .collect();
        if !private.is_empty() {
            *t = t.sum_labels(&private);
        }
    }
    while tensors.len() > 1 {
        let counts = count(&tensors);
        let mut best: Option<(bool, usize, usize, usize)> = None;
        for i in 0..tensors.len() {
            for j in i + 1..tensors.len() {
                let a = &tensors[i];
                let b = &tensors[j];
                let shares = a.labels.iter().any(|l| b.labels.contains(l));
                let mut size = 1usize;
                let mut seen: Vec<Label> = Vec::new();
                for (&l, &d) in a.labels.iter().zip(&a.dims).chain(b.labels.iter().zip(&b.dims)) {
                    if seen.contains(&l) {
                        continue;
                    }
                    seen.push(l);
                    let in_both = a.labels.contains(&l) && b.labels.contains(&l);
                    let local = if in_both { 2 } else { 1 };
                    if counts[&l] > local || open.contains(&l) {
                        size = size.saturating_mul(d);
                    }
                }
                let key = (!shares, size, i, j);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, _, i, j) = best.unwrap();
        let b = tensors.remove(j);
        let a = tensors.remove(i);
        let sum: Vec<Label> = a
            .labels
            .iter()
            .chain(&b.labels)
            .copied()
            .filter(|l| {
                let local = a.labels.contains(l) as usize + b.labels.contains(l) as usize;
                counts[l] == local && !open.contains(l)
            })
            .collect();
        let merged = a.merge(&b, &sum);
        tensors.insert(i, merged);
    }
    let t = tensors.pop().unwrap();
    let rest: Vec<Label> = t.labels.iter().copied().filter(|l| !open.contains(l)).collect();
    let t = t.sum_labels(&rest);
    t.permuted(open)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn mat(l: [Label; 2], n: usize, f: impl Fn(usize, usize) -> f64) -> Tensor {
        Tensor::new(
            l.to_vec(),
            vec![n, n],
            (0..n * n).map(|k| c(f(k / n, k % n))).collect(),
        )
    }

    #[test]
    fn matrix_product_chain() {
        let n = 3;
        let a = mat([0, 1], n, |i, j| (i + 2 * j) as f64);
        let b = mat([1, 2], n, |i, j| (i * j) as f64 - 1.0);
        let cc = mat([2, 3], n, |i, j| if i == j { 2.0 } else { 0.5 });
        let r = contract(vec![a.clone(), b.clone(), cc.clone()], &[0, 3]);
        for i in 0..n {
            for l in 0..n {
                let mut expect = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        expect += a.data[i * n + j].re * b.data[j * n + k].re * cc.data[k * n + l].re;
                    }
                }
                assert!((r.data[i * n + l].re - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_via_repeated_label() {
        let a = mat([0, 0], 4, |i, j| (10 * i + j) as f64);
        let r = contract(vec![a], &[]);
        assert_eq!(r.data[0].re, 0.0 + 11.0 + 22.0 + 33.0);
    }

    #[test]
    fn hyperedge_variable_elimination() {
        // sum_x f(x) g(x) h(x)
        let v = |l: Label, vals: [f64; 3]| Tensor::new(vec![l], vec![3], vals.iter().map(|&x| c(x)).collect());
        let r = contract(vec![v(7, [1.0, 2.0, 3.0]), v(7, [1.0, 1.0, 2.0]), v(7, [2.0, 0.0, 1.0])], &[]);
        assert_eq!(r.data[0].re, 2.0 + 0.0 + 6.0);
    }

    #[test]
    fn open_label_order_is_respected() {
        let a = mat([0, 1], 2, |i, j| (2 * i + j) as f64);
        let r = contract(vec![a], &[1, 0]);
        assert_eq!(r.data.iter().map(|z| z.re).collect::<Vec<_>>(), vec![0.0, 2.0, 1.0, 3.0]);
    }

    #[test]
    fn disconnected_parts_multiply() {
        let a = mat([0, 0], 2, |i, j| (i + j + 1) as f64); // trace 4
        let b = mat([1, 1], 3, |i, j| if i == j { 1.5 } else { 9.0 }); // trace 4.5
        assert_eq!(contract(vec![a, b], &[]).data[0].re, 18.0);
        assert_eq!(contract(Vec::new(), &[]).data[0].re, 1.0);
    }
}
