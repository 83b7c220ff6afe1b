//! Leading coefficients of the first variation of the obstruction at the
//! standard CR sphere, and an exact check of the differentiated
//! pseudohermitian invariants under a constant deformation.

use num_traits::One;

use crate::algebra::{CRFrameAlgebra, DeformationTensor};
use crate::error::{Error, Result};
use crate::index::{Kinds, REEB};
use crate::linalg::Matrix;
use crate::pseudohermitian::{tw_derivative, PseudohermitianData};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{einsum, InvariantTensor};

/// Default total-degree bound of the rational interpolation oracle.
pub const DEFAULT_DEGREE_BOUND: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariationCoefficients {
    pub n: usize,
    /// `c_1, …, c_n`.
    pub c: Vec<Rational>,
    /// Coefficient of `Δ_b^{n+1}μ_{αβ}` in the variation of `O_{αβ}`.
    pub a: Rational,
}

/// `c_1 = 2/n`, `c_l = −c_{l−1}/(l(n+1−l))`, `a = −c_n/2`.
pub fn leading_recursion(n: usize) -> Result<VariationCoefficients> {
    if n == 0 {
        return Err(Error::BadParameter("sphere recursion needs n ≥ 1".into()));
    }
    let r = |x: usize| Rational::from_integer((x as i64).into());
    let mut c = vec![r(2) / r(n)];
    for l in 2..=n {
        let prev = c[l - 2].clone();
        c.push(-prev / (r(l) * r(n + 1 - l)));
    }
    let a = -c[n - 1].clone() / r(2);
    Ok(VariationCoefficients { n, c, a })
}

/// `(−1)^n/(n!)²`
pub fn closed_form(n: usize) -> Rational {
    let mut f = Rational::one();
    for k in 1..=n {
        f *= Rational::from_integer((k as i64).into());
    }
    let sign = if n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
    sign / (f.clone() * f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormReport {
    pub n: usize,
    pub recursion: Rational,
    pub closed_form: Rational,
    pub holds: bool,
}

pub fn closed_form_check(n: usize) -> Result<ClosedFormReport> {
    let rec = leading_recursion(n)?.a;
    let cf = closed_form(n);
    Ok(ClosedFormReport { n, holds: rec == cf, recursion: rec, closed_form: cf })
}

/// An exactly reconstructed `P(t)/Q(t)` with `Q(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: Vec<Scalar>,
    pub den: Vec<Scalar>,
}

impl RationalFunction {
    fn eval_poly(c: &[Scalar], t: &Scalar) -> Scalar {
        c.iter().rev().fold(Scalar::zero(), |acc, x| &(&acc * t) + x)
    }

    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        Self::eval_poly(&self.num, t).checked_div(&Self::eval_poly(&self.den, t))
    }

    /// Taylor coefficient of `t^k` at 0.
    pub fn taylor(&self, k: usize) -> Scalar {
        // f·Q = P ⇒ f_k = p_k − Σ_{j≥1} q_j f_{k−j}
        let mut f: Vec<Scalar> = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut v = self.num.get(i).cloned().unwrap_or_else(Scalar::zero);
            for j in 1..=i.min(self.den.len().saturating_sub(1)) {
                v -= &(&self.den[j] * &f[i - j]);
            }
            f.push(v);
        }
        f.pop().expect("k + 1 entries")
    }
}

/// Finds `P/Q` of least total degree matching `samples`, validated on two
/// further samples. Fails with `DegreeBoundExceeded` past `bound`.
pub fn reconstruct(samples: &[(Scalar, Scalar)], bound: usize) -> Result<RationalFunction> {
    for total in 0..=bound {
        if samples.len() < total + 3 {
            break;
        }
        for q in 0..=total {
            let p = total - q;
            let unknowns = total + 1;
            let rows = &samples[..unknowns];
            let m = Matrix::from_fn(unknowns, unknowns, |r, c| {
                let (t, f) = &rows[r];
                if c <= p {
                    t.pow(c as u32)
                } else {
                    -(f * &t.pow((c - p) as u32))
                }
            });
            let Some(inv) = m.inverse() else { continue };
            let rhs: Vec<Scalar> = rows.iter().map(|(_, f)| f.clone()).collect();
            let sol: Vec<Scalar> = (0..unknowns)
                .map(|r| (0..unknowns).map(|c| &inv[(r, c)] * &rhs[c]).sum())
                .collect();
            let mut den = vec![Scalar::one()];
            den.extend_from_slice(&sol[p + 1..]);
            let rf = RationalFunction { num: sol[..=p].to_vec(), den };
            let ok = samples[unknowns..unknowns + 2].iter().all(|(t, f)| rf.eval(t).map(|v| v == *f).unwrap_or(false));
            if ok {
                return Ok(rf);
            }
        }
    }
    Err(Error::DegreeBoundExceeded(bound))
}

/// Derivative at `t = 0` of `t ↦ f(t)` for a tensor-valued `f` that is
/// entrywise rational in `t`, plus the `t²` Taylor coefficients.
fn differentiate(
    f: impl Fn(&Scalar) -> Result<InvariantTensor>,
    bound: usize,
) -> Result<(InvariantTensor, InvariantTensor)> {
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut k = 1i64;
    while values.len() < bound + 3 {
        let t = Scalar::frac(1, k + 1);
        k += 1;
        match f(&t) {
            Ok(v) => {
                points.push(t);
                values.push(v);
            }
            Err(Error::DegenerateDeformation(_)) | Err(Error::DegenerateLeviForm) => continue,
            Err(e) => return Err(e),
        }
        if k > 4 * bound as i64 + 16 {
            return Err(Error::DegreeBoundExceeded(bound));
        }
    }
    let base = f(&Scalar::zero())?;
    let mut first = InvariantTensor::zeros(base.alphabet(), base.kinds());
    let mut second = first.clone();
    for idx in first.admissible_indices() {
        let mut samples = vec![(Scalar::zero(), base.get(&idx).clone())];
        samples.extend(points.iter().zip(&values).map(|(t, v)| (t.clone(), v.get(&idx).clone())));
        let rf = reconstruct(&samples, bound)?;
        first.set(&idx, rf.taylor(1));
        second.set(&idx, rf.taylor(2));
    }
    Ok((first, second))
}

#[derive(Clone, Debug)]
pub struct VariationComponent {
    pub name: &'static str,
    pub derivative: InvariantTensor,
    pub formula: InvariantTensor,
}

impl VariationComponent {
    pub fn holds(&self) -> bool {
        self.derivative.same_values(&self.formula)
    }
}

#[derive(Clone, Debug)]
pub struct VariationReport {
    pub components: Vec<VariationComponent>,
    /// `t²` coefficient of the Levi form along the deformation.
    pub levi_second_order: InvariantTensor,
}

impl VariationReport {
    pub fn holds(&self) -> bool {
        self.components.iter().all(VariationComponent::holds)
    }
}

/// Compares the derivatives at `t = 0` of `h`, `N`, `A`, `R_{αβ̄}` along
/// `deform(alg, tμ)` with their first-variation formulas.
pub fn variation_formula_check(alg: &CRFrameAlgebra, mu: &DeformationTensor, bound: usize) -> Result<VariationReport> {
    let p = PseudohermitianData::new(alg)?;
    let a = p.alphabet();
    if !p.a.is_zero() || !p.nij.is_zero() || !p.ricci_hol().is_zero() {
        return Err(Error::BadParameter("variation check needs vanishing A, N and Ricci curvature".into()));
    }
    const HOL: Kinds = Kinds::HOL;
    const AHOL: Kinds = Kinds::ANTIHOL;
    let data_at = |t: &Scalar| -> Result<PseudohermitianData> {
        let deformed = if t.is_zero() { alg.clone() } else { alg.deform(&mu.scaled(t))? };
        PseudohermitianData::new(&deformed)
    };
    let (dh, h2) = differentiate(|t| Ok(data_at(t)?.h_tensor()), bound)?;
    let (dn, _) = differentiate(|t| Ok(data_at(t)?.n_hol()), bound)?;
    let (da, _) = differentiate(|t| Ok(data_at(t)?.a_hol()), bound)?;
    let (dr, _) = differentiate(|t| Ok(data_at(t)?.ricci_hol()), bound)?;

    // μ_{αβ} and its conjugate
    let lowered = mu.lowered(&p.h);
    let mu_t = InvariantTensor::from_fn(a, &[Kinds::H, Kinds::H], |i| {
        let hol = |x: usize| a.hols().contains(&x);
        match (hol(i[0]), hol(i[1])) {
            (true, true) => lowered[(i[0] - 2, i[1] - 2)].clone(),
            (false, false) => lowered[(i[0] - 2 - a.n, i[1] - 2 - a.n)].conj(),
            _ => Scalar::zero(),
        }
    });
    let dmu = tw_derivative(&p.gamma, &mu_t, &[false, false]);
    // ∇_αμ_{βγ} − ∇_βμ_{αγ}, stored as [β][γ][α] in dmu
    let n_formula = dmu.permute(&[2, 0, 1]).try_sub(&dmu.permute(&[0, 2, 1]))?.restrict(&[HOL, HOL, HOL]);
    let a_formula = InvariantTensor::from_fn(a, &[HOL, HOL], |i| -dmu.get(&[i[0], i[1], REEB]).clone());
    // −∇_α∇^σ̄μ_{β̄σ̄} − ∇_β̄∇^τμ_{ατ}
    let div = einsum("bsx,sx->b", &[&dmu, &p.levi_inv.tensor]);
    let ddiv = tw_derivative(&p.gamma, &div, &[false]);
    let r_formula = InvariantTensor::from_fn(a, &[HOL, AHOL], |i| {
        -(ddiv.get(&[i[1], i[0]]) + ddiv.get(&[i[0], i[1]]))
    });
    let h_formula = InvariantTensor::zeros(a, dh.kinds());
    Ok(VariationReport {
        components: vec![
            VariationComponent { name: "h", derivative: dh, formula: h_formula },
            VariationComponent { name: "N", derivative: dn, formula: n_formula },
            VariationComponent { name: "A", derivative: da, formula: a_formula },
            VariationComponent { name: "R", derivative: dr, formula: r_formula },
        ],
        levi_second_order: h2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra;
    use crate::scalar::rat;
    use num_traits::Signed;

    #[test]
    fn recursion_small_cases() {
        let v = leading_recursion(1).unwrap();
        assert_eq!(v.c, vec![rat(2, 1)]);
        assert_eq!(v.a, rat(-1, 1));
        let v = leading_recursion(2).unwrap();
        assert_eq!(v.c, vec![rat(1, 1), rat(-1, 2)]);
        assert_eq!(v.a, rat(1, 4));
        assert_eq!(leading_recursion(3).unwrap().a, rat(-1, 36));
        assert!(matches!(leading_recursion(0), Err(Error::BadParameter(_))));
    }

    #[test]
    fn closed_form_through_eight() {
        for n in 1..=8 {
            let r = closed_form_check(n).unwrap();
            assert!(r.holds, "n = {n}");
            let c = leading_recursion(n).unwrap().c;
            assert!(c.windows(2).all(|w| (&w[0] * &w[1]).is_negative()));
        }
        assert_eq!(closed_form(8), rat(1, 40320 * 40320));
    }

    #[test]
    fn reconstructs_rational_functions() {
        // (1 + 2t)/(1 − t²/3)
        let f = |t: &Scalar| (Scalar::one() + t * &Scalar::from_int(2)) / (Scalar::one() - &(t * t) * &Scalar::frac(1, 3));
        let samples: Vec<_> = (0..10).map(|k| Scalar::frac(k, 7)).map(|t| (t.clone(), f(&t))).collect();
        let rf = reconstruct(&samples, 8).unwrap();
        assert_eq!(rf.taylor(1), Scalar::from_int(2));
        assert_eq!(rf.taylor(2), Scalar::frac(1, 3));
        assert!(matches!(reconstruct(&samples, 1), Err(Error::DegreeBoundExceeded(1))));
    }

    #[test]
    fn constant_deformation_of_flat_model() {
        let alg = algebra::heisenberg(2).unwrap();
        let r = variation_formula_check(&alg, &algebra::sample_mu(2), DEFAULT_DEGREE_BOUND).unwrap();
        assert!(r.holds(), "{:?}", r.components);
        assert!(r.components.iter().all(|c| c.derivative.is_zero()));
        assert!(!r.levi_second_order.is_zero());
        let r = variation_formula_check(&alg, &DeformationTensor::zero(2), DEFAULT_DEGREE_BOUND).unwrap();
        assert!(r.holds());
        assert!(r.levi_second_order.is_zero());
    }
}
