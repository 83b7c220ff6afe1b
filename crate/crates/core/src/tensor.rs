//! Dense multi-index tensors over the adapted frame alphabet.

use std::fmt;

use crate::error::{Error, Result};
use crate::index::{Alphabet, Kinds};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A constant tensor. Entries outside the declared slot kinds are kept zero.
#[derive(Clone, PartialEq, Eq)]
pub struct InvariantTensor {
    alpha: Alphabet,
    kinds: Vec<Kinds>,
    data: Vec<Scalar>,
    pub weight: Option<i32>,
}

impl InvariantTensor {
    pub fn zeros(alpha: Alphabet, kinds: &[Kinds]) -> Self {
        let len = alpha.size().pow(kinds.len() as u32);
        InvariantTensor { alpha, kinds: kinds.to_vec(), data: vec![Scalar::zero(); len], weight: None }
    }

    pub fn scalar(alpha: Alphabet, s: Scalar) -> Self {
        let mut t = InvariantTensor::zeros(alpha, &[]);
        t.data[0] = s;
        t
    }

    pub fn from_fn(alpha: Alphabet, kinds: &[Kinds], f: impl Fn(&[usize]) -> Scalar) -> Self {
        let mut t = InvariantTensor::zeros(alpha, kinds);
        for idx in t.admissible_indices() {
            let v = f(&idx);
            if !v.is_zero() {
                t.set(&idx, v);
            }
        }
        t
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alpha
    }

    pub fn rank(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[Kinds] {
        &self.kinds
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let s = self.alpha.size();
        idx.iter().fold(0, |acc, &i| acc * s + i)
    }

    fn unoffset(&self, mut off: usize) -> Vec<usize> {
        let s = self.alpha.size();
        let mut idx = vec![0; self.rank()];
        for slot in (0..self.rank()).rev() {
            idx[slot] = off % s;
            off /= s;
        }
        idx
    }

    pub fn admits(&self, idx: &[usize]) -> bool {
        idx.len() == self.rank()
            && idx.iter().zip(&self.kinds).all(|(&i, &k)| i < self.alpha.size() && self.alpha.admits(k, i))
    }

    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.data[self.offset(idx)]
    }

    /// Panics if `idx` is outside the declared kinds; see [`Self::try_set`].
    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        assert!(self.admits(idx), "index {idx:?} outside declared kinds");
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn try_set(&mut self, idx: &[usize], v: Scalar) -> Result<()> {
        if !self.admits(idx) {
            return Err(Error::KindMismatch(format!("index {idx:?} outside declared kinds")));
        }
        let o = self.offset(idx);
        self.data[o] = v;
        Ok(())
    }

    pub fn add_at(&mut self, idx: &[usize], v: &Scalar) {
        assert!(self.admits(idx), "index {idx:?} outside declared kinds");
        let o = self.offset(idx);
        self.data[o] += v;
    }

    pub fn admissible_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for &k in &self.kinds {
            let choices = self.alpha.indices(k);
            out = out
                .into_iter()
                .flat_map(|p| {
                    choices.iter().map(move |&c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(o, v)| (self.unoffset(o), v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Value of a rank-0 tensor.
    pub fn value(&self) -> &Scalar {
        assert_eq!(self.rank(), 0);
        &self.data[0]
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.alpha != o.alpha || self.rank() != o.rank() {
            return Err(Error::ShapeMismatch(format!(
                "rank {} (n={}) vs rank {} (n={})",
                self.rank(),
                self.alpha.n,
                o.rank(),
                o.alpha.n
            )));
        }
        Ok(())
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        self.check_shape(o)?;
        let kinds: Vec<Kinds> = self.kinds.iter().zip(&o.kinds).map(|(a, b)| *a | *b).collect();
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect();
        Ok(InvariantTensor { alpha: self.alpha, kinds, data, weight: self.weight.or(o.weight) })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut t = self.clone();
        for v in &mut t.data {
            if !v.is_zero() {
                *v = &*v * s;
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Scalar::one())
    }

    /// Conjugates every index and every entry.
    pub fn conj(&self) -> Self {
        let kinds: Vec<Kinds> = self.kinds.iter().map(|k| k.conj()).collect();
        let mut t = InvariantTensor { alpha: self.alpha, kinds, data: vec![Scalar::zero(); self.data.len()], weight: self.weight };
        for (idx, v) in self.nonzero() {
            let c: Vec<usize> = idx.iter().map(|&i| self.alpha.conj(i)).collect();
            let o = t.offset(&c);
            t.data[o] = v.conj();
        }
        t
    }

    /// `out[idx] = self[idx permuted]`, where output slot `s` reads input slot `perm[s]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank());
        let kinds: Vec<Kinds> = perm.iter().map(|&p| self.kinds[p]).collect();
        let mut t = InvariantTensor::zeros(self.alpha, &kinds);
        t.weight = self.weight;
        for (idx, v) in self.nonzero() {
            let out: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            let o = t.offset(&out);
            t.data[o] = v.clone();
        }
        t
    }

    /// Restricts every slot to the given kinds, discarding entries outside.
    pub fn restrict(&self, kinds: &[Kinds]) -> Self {
        assert_eq!(kinds.len(), self.rank());
        let mut t = InvariantTensor::zeros(self.alpha, kinds);
        t.weight = self.weight;
        for (idx, v) in self.nonzero() {
            if t.admits(&idx) {
                let o = t.offset(&idx);
                t.data[o] = v.clone();
            }
        }
        t
    }

    pub fn with_weight(mut self, w: i32) -> Self {
        self.weight = Some(w);
        self
    }

    /// Equality of entries, ignoring declared kinds and weights.
    pub fn same_values(&self, o: &Self) -> bool {
        self.alpha == o.alpha && self.rank() == o.rank() && self.data == o.data
    }

    /// Contracts slots `a` and `b` through a pairing (the Levi form or its inverse).
    pub fn contract(&self, a: usize, b: usize, pairing: &Pairing) -> Result<Self> {
        if a == b || a >= self.rank() || b >= self.rank() {
            return Err(Error::ShapeMismatch(format!("cannot contract slots {a} and {b}")));
        }
        let (ka, kb) = (self.kinds[a], self.kinds[b]);
        if !Kinds::H.contains(ka) || !Kinds::H.contains(kb) || (ka.conj() & kb).is_empty() {
            return Err(Error::KindMismatch(format!(
                "slots {a} ({ka:?}) and {b} ({kb:?}) are not a holomorphic/antiholomorphic pair"
            )));
        }
        let rest: Vec<usize> = (0..self.rank()).filter(|&s| s != a && s != b).collect();
        let kinds: Vec<Kinds> = rest.iter().map(|&s| self.kinds[s]).collect();
        let mut t = InvariantTensor::zeros(self.alpha, &kinds);
        for (idx, v) in self.nonzero() {
            let p = pairing.tensor.get(&[idx[a], idx[b]]);
            if p.is_zero() {
                continue;
            }
            let out: Vec<usize> = rest.iter().map(|&s| idx[s]).collect();
            let o = t.offset(&out);
            t.data[o] += v * p;
        }
        Ok(t)
    }

    /// Moves one slot across the pairing (raising or lowering an index); its kind is conjugated.
    pub fn pair_slot(&self, slot: usize, pairing: &Pairing) -> Result<Self> {
        if !Kinds::H.contains(self.kinds[slot]) {
            return Err(Error::KindMismatch(format!("slot {slot} is not a boundary-horizontal slot")));
        }
        let mut kinds = self.kinds.clone();
        kinds[slot] = kinds[slot].conj();
        let mut t = InvariantTensor::zeros(self.alpha, &kinds);
        t.weight = self.weight;
        for (idx, v) in self.nonzero() {
            for j in self.alpha.indices(kinds[slot]) {
                let p = pairing.tensor.get(&[idx[slot], j]);
                if !p.is_zero() {
                    let mut out = idx.clone();
                    out[slot] = j;
                    let o = t.offset(&out);
                    t.data[o] += v * p;
                }
            }
        }
        Ok(t)
    }
}

impl fmt::Debug for InvariantTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (idx, v) in self.nonzero() {
            let lbl: Vec<String> = idx.iter().map(|&i| self.alpha.label(i)).collect();
            m.entry(&lbl.join(","), v);
        }
        m.finish()
    }
}

/// The Levi form or its inverse as a symmetric bilinear pairing on the
/// full alphabet: `L_{αβ̄} = L_{β̄α} = h_{αβ̄}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub tensor: InvariantTensor,
}

impl Pairing {
    /// `h` is the `n×n` matrix `h[α][β] = h_{αβ̄}`.
    pub fn levi(alpha: Alphabet, h: &Matrix) -> Self {
        let mut t = InvariantTensor::zeros(alpha, &[Kinds::H, Kinds::H]);
        for a in 0..alpha.n {
            for b in 0..alpha.n {
                let v = h[(a, b)].clone();
                if !v.is_zero() {
                    t.set(&[alpha.hol(a), alpha.antihol(b)], v.clone());
                    t.set(&[alpha.antihol(b), alpha.hol(a)], v);
                }
            }
        }
        Pairing { tensor: t }
    }

    /// Inverse pairing `h^{αβ̄}` with `h^{αβ̄}h_{γβ̄} = δ^α_γ`.
    pub fn inverse_levi(alpha: Alphabet, h: &Matrix) -> Result<Self> {
        let hinv = h.transpose().inverse().ok_or(Error::DegenerateLeviForm)?;
        Ok(Pairing::levi(alpha, &hinv))
    }
}

/// Einstein summation over the full alphabet, e.g. `einsum("ab,bc->ac", &[&x, &y])`.
/// Repeated labels are summed; entries vanish outside each operand's kinds.
pub fn einsum(spec: &str, ops: &[&InvariantTensor]) -> InvariantTensor {
    let plan = Plan::parse(spec, ops.len());
    let alpha = ops[0].alpha;
    let mut out = InvariantTensor::zeros(alpha, &plan.output_kinds(ops));
    let lists: Vec<Vec<(Vec<usize>, Scalar)>> = ops.iter().map(|t| nonzero_list(t)).collect();
    let refs: Vec<&[(Vec<usize>, Scalar)]> = lists.iter().map(|l| l.as_slice()).collect();
    einsum_into(&plan, &refs, &mut out);
    out
}

pub(crate) struct Plan {
    labels: Vec<char>,
    inputs: Vec<Vec<usize>>,
    output: Vec<usize>,
}

impl Plan {
    pub(crate) fn parse(spec: &str, nops: usize) -> Plan {
        let (lhs, rhs) = spec.split_once("->").expect("einsum spec needs '->'");
        let mut labels: Vec<char> = Vec::new();
        let id = |c: char, labels: &mut Vec<char>| match labels.iter().position(|&x| x == c) {
            Some(p) => p,
            None => {
                labels.push(c);
                labels.len() - 1
            }
        };
        let inputs: Vec<Vec<usize>> = lhs
            .split(',')
            .map(|s| s.trim().chars().map(|c| id(c, &mut labels)).collect())
            .collect();
        assert_eq!(inputs.len(), nops, "einsum operand count mismatch in {spec:?}");
        let output: Vec<usize> = rhs.trim().chars().map(|c| id(c, &mut labels)).collect();
        Plan { labels, inputs, output }
    }

    pub(crate) fn output_kinds(&self, ops: &[&InvariantTensor]) -> Vec<Kinds> {
        self.output
            .iter()
            .map(|&l| {
                let mut k = Kinds::ALL;
                for (inp, t) in self.inputs.iter().zip(ops) {
                    for (slot, &m) in inp.iter().enumerate() {
                        if m == l {
                            k &= t.kinds[slot];
                        }
                    }
                }
                k
            })
            .collect()
    }
}

fn accumulate(
    plan: &Plan,
    lists: &[&[(Vec<usize>, Scalar)]],
    op: usize,
    assign: &mut Vec<Option<usize>>,
    acc: Scalar,
    sink: &mut dyn FnMut(&[Option<usize>], Scalar),
) {
    if op == lists.len() {
        sink(assign, acc);
        return;
    }
    let labels = &plan.inputs[op];
    'entries: for (idx, v) in lists[op].iter() {
        let mut fresh: Vec<usize> = Vec::new();
        for (slot, &l) in labels.iter().enumerate() {
            match assign[l] {
                Some(x) if x != idx[slot] => {
                    for f in fresh {
                        assign[f] = None;
                    }
                    continue 'entries;
                }
                Some(_) => {}
                None => {
                    assign[l] = Some(idx[slot]);
                    fresh.push(l);
                }
            }
        }
        accumulate(plan, lists, op + 1, assign, &acc * v, sink);
        for f in fresh {
            assign[f] = None;
        }
    }
}

/// Adds the contraction of pre-extracted nonzero entry lists into `out`.
pub(crate) fn einsum_into(
    plan: &Plan,
    lists: &[&[(Vec<usize>, Scalar)]],
    out: &mut InvariantTensor,
) {
    let mut assign: Vec<Option<usize>> = vec![None; plan.labels.len()];
    accumulate(plan, lists, 0, &mut assign, Scalar::one(), &mut |assign, v| {
        let idx: Vec<usize> = plan.output.iter().map(|&l| assign[l].expect("free output label")).collect();
        if out.admits(&idx) {
            let o = out.offset(&idx);
            out.data[o] += v;
        }
    });
}

/// Nonzero `(index, value)` pairs of a tensor.
pub(crate) type Entries = Vec<(Vec<usize>, Scalar)>;

pub(crate) fn nonzero_list(t: &InvariantTensor) -> Entries {
    t.nonzero().map(|(i, v)| (i, v.clone())).collect()
}
