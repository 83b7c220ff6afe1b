//! Truncated power series in the boundary defining function ρ with
//! constant tensor coefficients.

use crate::error::{Error, Result};
use crate::index::{Alphabet, Kinds};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tensor::{einsum_into, nonzero_list, Entries, InvariantTensor, Plan};

/// Truncation order of a series that is exact in every degree.
pub const EXACT: usize = usize::MAX;

/// `Σ_{d < trunc} coeffs[d] ρ^d`. Degrees at or beyond `coeffs.len()` but
/// below `trunc` are zero; degrees at or beyond `trunc` are unknown.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RhoSeries {
    alpha: Alphabet,
    kinds: Vec<Kinds>,
    coeffs: Vec<InvariantTensor>,
    trunc: usize,
}

impl RhoSeries {
    pub fn zero(alpha: Alphabet, kinds: &[Kinds], trunc: usize) -> Self {
        RhoSeries { alpha, kinds: kinds.to_vec(), coeffs: Vec::new(), trunc }
    }

    /// A constant (degree-0) series, exact in every degree.
    pub fn constant(t: InvariantTensor) -> Self {
        RhoSeries { alpha: t.alphabet(), kinds: t.kinds().to_vec(), coeffs: vec![t], trunc: EXACT }
    }

    /// `t·ρ^d`, exact.
    pub fn monomial(t: InvariantTensor, d: usize) -> Self {
        let mut s = RhoSeries::zero(t.alphabet(), t.kinds(), EXACT);
        s.set_coeff(d, t);
        s
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alpha
    }

    pub fn kinds(&self) -> &[Kinds] {
        &self.kinds
    }

    pub fn rank(&self) -> usize {
        self.kinds.len()
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Highest degree stored plus one.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.iter().all(InvariantTensor::is_zero)
    }

    fn zero_coeff(&self) -> InvariantTensor {
        InvariantTensor::zeros(self.alpha, &self.kinds)
    }

    /// Coefficient of `ρ^d`; `None` if `d ≥ trunc`.
    pub fn coeff(&self, d: usize) -> Option<InvariantTensor> {
        if d >= self.trunc {
            return None;
        }
        Some(self.coeffs.get(d).cloned().unwrap_or_else(|| self.zero_coeff()))
    }

    pub fn coeff_ref(&self, d: usize) -> Option<&InvariantTensor> {
        self.coeffs.get(d)
    }

    /// Scalar coefficient of one entry at degree `d` (zero beyond the stored range).
    pub fn entry(&self, d: usize, idx: &[usize]) -> Scalar {
        assert!(d < self.trunc, "degree {d} beyond truncation {}", self.trunc);
        self.coeffs.get(d).map(|t| t.get(idx).clone()).unwrap_or_default()
    }

    pub fn set_coeff(&mut self, d: usize, t: InvariantTensor) {
        assert!(d < self.trunc, "degree {d} beyond truncation {}", self.trunc);
        assert_eq!(t.rank(), self.rank());
        while self.coeffs.len() <= d {
            self.coeffs.push(self.zero_coeff());
        }
        let kinds: Vec<Kinds> = self.kinds.iter().zip(t.kinds()).map(|(a, b)| *a | *b).collect();
        if kinds != self.kinds {
            self.kinds = kinds.clone();
            for c in &mut self.coeffs {
                *c = InvariantTensor::zeros(self.alpha, &kinds).try_add(c).expect("same shape");
            }
        }
        self.coeffs[d] = InvariantTensor::zeros(self.alpha, &self.kinds).try_add(&t).expect("same shape");
        self.trim();
    }

    pub fn add_entry(&mut self, d: usize, idx: &[usize], v: &Scalar) {
        assert!(d < self.trunc, "degree {d} beyond truncation {}", self.trunc);
        while self.coeffs.len() <= d {
            self.coeffs.push(self.zero_coeff());
        }
        self.coeffs[d].add_at(idx, v);
        self.trim();
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(InvariantTensor::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let t = trunc.min(self.trunc);
        let mut s = self.clone();
        s.coeffs.truncate(t);
        s.trunc = t;
        s.trim();
        s
    }

    fn check_shape(&self, o: &Self) -> Result<()> {
        if self.alpha != o.alpha || self.rank() != o.rank() {
            return Err(Error::ShapeMismatch(format!(
                "series of rank {} vs rank {}",
                self.rank(),
                o.rank()
            )));
        }
        Ok(())
    }

    fn combine(&self, o: &Self, sub: bool) -> Result<Self> {
        self.check_shape(o)?;
        let trunc = self.trunc.min(o.trunc);
        let kinds: Vec<Kinds> = self.kinds.iter().zip(&o.kinds).map(|(a, b)| *a | *b).collect();
        let len = self.coeffs.len().max(o.coeffs.len()).min(trunc);
        let zero = InvariantTensor::zeros(self.alpha, &kinds);
        let mut coeffs = Vec::with_capacity(len);
        for d in 0..len {
            let a = self.coeffs.get(d).map(|t| zero.try_add(t)).transpose()?.unwrap_or_else(|| zero.clone());
            let c = match o.coeffs.get(d) {
                Some(b) if sub => a.try_sub(b)?,
                Some(b) => a.try_add(b)?,
                None => a,
            };
            coeffs.push(c);
        }
        let mut s = RhoSeries { alpha: self.alpha, kinds, coeffs, trunc };
        s.trim();
        Ok(s)
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.combine(o, false)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, true)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = c.scale(s);
        }
        out.trim();
        out
    }

    /// Multiplication by `ρ^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![self.zero_coeff(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        let trunc = self.trunc.saturating_add(k);
        let mut s = RhoSeries { alpha: self.alpha, kinds: self.kinds.clone(), coeffs, trunc };
        s.trim();
        s
    }

    /// Multiplies the degree-`d` coefficient by `p(d)`.
    pub fn euler_apply(&self, p: impl Fn(usize) -> Scalar) -> Self {
        let mut out = self.clone();
        for (d, c) in out.coeffs.iter_mut().enumerate() {
            if !c.is_zero() {
                *c = c.scale(&p(d));
            }
        }
        out.trim();
        out
    }

    /// `ρ∂ρ`
    pub fn rho_d(&self) -> Self {
        self.euler_apply(|d| Scalar::from_int(d as i64))
    }

    pub fn conj(&self) -> Self {
        RhoSeries {
            alpha: self.alpha,
            kinds: self.kinds.iter().map(|k| k.conj()).collect(),
            coeffs: self.coeffs.iter().map(InvariantTensor::conj).collect(),
            trunc: self.trunc,
        }
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        RhoSeries {
            alpha: self.alpha,
            kinds: perm.iter().map(|&p| self.kinds[p]).collect(),
            coeffs: self.coeffs.iter().map(|c| c.permute(perm)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&InvariantTensor) -> InvariantTensor) -> Self {
        let coeffs: Vec<InvariantTensor> = self.coeffs.iter().map(&f).collect();
        let kinds = f(&self.zero_coeff()).kinds().to_vec();
        let mut s = RhoSeries { alpha: self.alpha, kinds, coeffs, trunc: self.trunc };
        s.trim();
        s
    }

    /// Lowest degree with a nonzero coefficient, or `trunc` if none is known.
    pub fn order(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.trunc)
    }

    /// True when every known coefficient below degree `d` vanishes.
    pub fn vanishes_below(&self, d: usize) -> bool {
        self.order() >= d.min(self.trunc)
    }

    /// Series of one scalar entry.
    pub fn component(&self, idx: &[usize]) -> RhoSeries {
        let mut s = RhoSeries::zero(self.alpha, &[], self.trunc);
        for (d, c) in self.coeffs.iter().enumerate() {
            let v = c.get(idx);
            if !v.is_zero() {
                s.set_coeff(d, InvariantTensor::scalar(self.alpha, v.clone()));
            }
        }
        s
    }

    pub fn value_at(&self, d: usize) -> Scalar {
        self.entry(d, &[])
    }
}

/// Einstein summation of series: Cauchy product of the coefficient
/// contractions, truncated at the minimum truncation of the operands.
pub fn series_einsum(spec: &str, ops: &[&RhoSeries]) -> RhoSeries {
    let plan = Plan::parse(spec, ops.len());
    let alpha = ops[0].alpha;
    let trunc = ops.iter().map(|s| s.trunc).min().unwrap_or(EXACT);
    let coeff_ops: Vec<InvariantTensor> = ops.iter().map(|s| InvariantTensor::zeros(alpha, &s.kinds)).collect();
    let kinds = plan.output_kinds(&coeff_ops.iter().collect::<Vec<_>>());
    let lists: Vec<Vec<Entries>> =
        ops.iter().map(|s| s.coeffs.iter().map(nonzero_list).collect()).collect();
    if lists.iter().any(Vec::is_empty) {
        return RhoSeries { alpha, kinds, coeffs: Vec::new(), trunc };
    }
    let max_deg: usize = ops.iter().map(|s| s.coeffs.len() - 1).sum();
    let top = if trunc == EXACT { max_deg + 1 } else { trunc.min(max_deg + 1) };
    let mut coeffs: Vec<InvariantTensor> = (0..top).map(|_| InvariantTensor::zeros(alpha, &kinds)).collect();
    let mut degs = vec![0usize; ops.len()];
    loop {
        let total: usize = degs.iter().sum();
        if total < top && degs.iter().zip(&lists).all(|(&d, l)| !l[d].is_empty()) {
            let refs: Vec<&[(Vec<usize>, Scalar)]> =
                degs.iter().zip(&lists).map(|(&d, l)| l[d].as_slice()).collect();
            einsum_into(&plan, &refs, &mut coeffs[total]);
        }
        // Odometer over degree tuples with empty operands skipped.
        let mut k = 0;
        loop {
            if k == degs.len() {
                let mut s = RhoSeries { alpha, kinds, coeffs, trunc };
                s.trim();
                return s;
            }
            degs[k] += 1;
            if degs[k] < lists[k].len() && degs.iter().sum::<usize>() < top {
                break;
            }
            degs[k] = 0;
            k += 1;
        }
    }
}

/// Inverse of a rank-2 metric series `g_{IJ}` over the full alphabet, with
/// `g^{IK}g_{KJ} = δ` through the truncation order.
pub fn invert_metric_series(g: &RhoSeries) -> Result<RhoSeries> {
    if g.rank() != 2 {
        return Err(Error::ShapeMismatch("metric series must have rank 2".into()));
    }
    let alpha = g.alpha;
    let size = alpha.size();
    let as_matrix = |t: &InvariantTensor| Matrix::from_fn(size, size, |i, j| t.get(&[i, j]).clone());
    let g0 = g.coeff(0).ok_or(Error::SingularLeadingBlock)?;
    let inv0 = as_matrix(&g0).inverse().ok_or(Error::SingularLeadingBlock)?;
    if g.trunc == EXACT {
        return Err(Error::ShapeMismatch("inverse of an exact series needs a truncation".into()));
    }
    let top = g.trunc;
    let gk: Vec<Matrix> = (0..g.coeffs.len().min(top)).map(|d| as_matrix(&g.coeffs[d])).collect();
    let mut inv: Vec<Matrix> = vec![inv0.clone()];
    for d in 1..top {
        let mut acc = Matrix::zeros(size, size);
        for k in 1..=d.min(gk.len().saturating_sub(1)) {
            if gk[k].is_zero() || inv[d - k].is_zero() {
                continue;
            }
            let p = gk[k].mul(&inv[d - k]);
            for i in 0..size {
                for j in 0..size {
                    acc[(i, j)] += &p[(i, j)];
                }
            }
        }
        let x = inv0.mul(&acc);
        inv.push(Matrix::from_fn(size, size, |i, j| -x[(i, j)].clone()));
    }
    let mut out = RhoSeries::zero(alpha, &[Kinds::ALL, Kinds::ALL], top);
    for (d, m) in inv.iter().enumerate() {
        if !m.is_zero() {
            out.set_coeff(d, InvariantTensor::from_fn(alpha, &[Kinds::ALL, Kinds::ALL], |i| m[(i[0], i[1])].clone()));
        }
    }
    Ok(out)
}
