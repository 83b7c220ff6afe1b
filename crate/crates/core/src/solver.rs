//! Order-by-order construction of an approximately Einstein normal-form ACH
//! metric, extraction of the obstruction tensor and the boundary identities
//! it satisfies.

use crate::ach::{bianchi_residual, curvature, ACHMetric, Curvature, PhiExpansion};
use crate::algebra::CRFrameAlgebra;
use crate::error::{Error, Result};
use crate::index::{Alphabet, Kinds, INF, REEB};
use crate::pseudohermitian::{tw_derivative, PseudohermitianData};
use crate::scalar::{Rational, Scalar};
use crate::series::RhoSeries;
use crate::tensor::{einsum, InvariantTensor};

const HOL: Kinds = Kinds::HOL;
const AHOL: Kinds = Kinds::ANTIHOL;
const H: Kinds = Kinds::H;

/// Order offset `a(I,J)`: the Einstein tensor of the solution vanishes to
/// order `2n+1+a(I,J)`.
pub fn order_offset(a: Alphabet, i: usize, j: usize) -> usize {
    let inf = |x| x == INF;
    let reeb = |x| x == REEB;
    let hor = |x| !inf(x) && !reeb(x);
    if hor(i) && hor(j) {
        if a.kind(i) == a.kind(j) {
            1
        } else {
            3
        }
    } else if (inf(i) && hor(j)) || (hor(i) && inf(j)) || (reeb(i) && hor(j)) || (hor(i) && reeb(j)) {
        2
    } else {
        3
    }
}

/// Truncation needed to read off every `E_{IJ}`.
pub fn solution_truncation(n: usize) -> usize {
    2 * n + 5
}

fn frac(p: i64, q: i64) -> Scalar {
    Scalar::frac(p, q)
}

/// Euler-polynomial factors of the linearised Einstein operator at monomial degree `d`.
pub mod indicial {
    use super::frac;
    use crate::scalar::Scalar;

    /// `ψ_{0α}ρ^d ↦ p·ψ_{0α}ρ^d` in `Ein_{0α}`.
    pub fn p_0a(d: i64, n: i64) -> Scalar {
        frac(-(d + 1) * (d - 2 * n - 3), 8)
    }

    /// `ψ_{αβ}ρ^d ↦ p·ψ_{αβ}ρ^d` in `Ein_{αβ}`.
    pub fn p_ab(d: i64, n: i64) -> Scalar {
        frac(-d * (d - 2 * n - 2), 8)
    }

    /// Trace-free hermitian block.
    pub fn p_tf(d: i64, n: i64) -> Scalar {
        frac(-(d * d - (2 * n + 2) * d - 8), 8)
    }

    /// Action on `(ψ_00, ψ_α^α)` of `(Ein_00, Ein_α^α)`.
    pub fn trace_matrix(d: i64, n: i64) -> [[Scalar; 2]; 2] {
        [
            [frac(-(d * d - (2 * n + 4) * d - 4 * n), 8), frac(d - 2, 2)],
            [frac(n * (d - 4), 8), frac(-(d * d - (4 * n + 2) * d - 8), 8)],
        ]
    }

    pub fn trace_det(d: i64, n: i64) -> Scalar {
        let m = trace_matrix(d, n);
        &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
    }

    /// `(1/64)(m+2)(m+4)(m−2n−2)(m−4n−2)` with `m = d − 2`.
    pub fn trace_det_closed(d: i64, n: i64) -> Scalar {
        let m = d - 2;
        frac((m + 2) * (m + 4) * (m - 2 * n - 2) * (m - 4 * n - 2), 64)
    }
}

/// `h^{αβ̄}S_{αβ̄}` for a tensor over `H × H`.
fn levi_trace(p: &PseudohermitianData, s: &InvariantTensor) -> Scalar {
    einsum("ab,ab->", &[&s.restrict(&[HOL, AHOL]), &p.levi_inv.tensor]).value().clone()
}

/// `S_{ab}` for `a, b ∈ H` from a full-alphabet coefficient.
fn horizontal(s: &InvariantTensor) -> InvariantTensor {
    s.restrict(&[H, H])
}

/// The one-form `S_{x a}` over `H` for a fixed first index `x`.
fn row(s: &InvariantTensor, x: usize) -> InvariantTensor {
    let a = s.alphabet();
    InvariantTensor::from_fn(a, &[H], |i| s.get(&[x, i[0]]).clone())
}

/// Entries of a two-tensor over `H × H` whose slots have the same type.
fn pure_type(s: &InvariantTensor) -> InvariantTensor {
    s.restrict(&[HOL, HOL]).try_add(&s.restrict(&[AHOL, AHOL])).expect("same rank")
}

/// `∇^a t_a` summed over both types, for a one-form over `H`.
fn divergence(p: &PseudohermitianData, t: &InvariantTensor) -> Scalar {
    let d = tw_derivative(&p.gamma, &t.restrict(&[H]), &[false]);
    einsum("ax,ax->", &[&d, &p.levi_inv.tensor]).value().clone()
}

/// `∇^b S_{ab}` for a two-tensor over `H × H`.
fn divergence_last(p: &PseudohermitianData, s: &InvariantTensor) -> InvariantTensor {
    let d = tw_derivative(&p.gamma, s, &[false, false]);
    einsum("abx,bx->a", &[&d, &p.levi_inv.tensor])
}

/// `N_α^{β̄γ̄}S_{β̄γ̄}` and its conjugate, over `H`.
fn nijenhuis_contraction(p: &PseudohermitianData, s: &InvariantTensor) -> InvariantTensor {
    let nup = p.raise(&p.nij, &[1, 2]);
    einsum("abc,bc->a", &[&nup, &s.restrict(&[H, H])])
}

/// The ρ² coefficients `Φ_{αβ̄}`, `Φ_{αβ}` that make `Ein = O(ρ³)`.
pub fn seed(p: &PseudohermitianData) -> Result<PhiExpansion> {
    let a = p.alphabet();
    let n = p.n() as i64;
    let nh = p.n_hol();
    // N_{αστ}N_β̄^{τσ}
    let nbar_up = p.raise(&nh.conj(), &[1, 2]);
    let nn = einsum("ast,bts->ab", &[&nh, &nbar_up]);
    let nn_trace = levi_trace(p, &nn);
    let ric = p.ricci_hol();
    let scal = &p.scalar_curvature - &(&nn_trace * &frac(2, 1));
    let h = p.h_tensor();
    let herm = ric
        .try_sub(&nn.scale(&frac(2, 1)))?
        .try_sub(&h.scale(&(&scal * &frac(1, 2 * (n + 1)))))?
        .scale(&frac(-2, n + 2));
    // N_{γαβ,}^γ
    let dn = tw_derivative(&p.gamma, &nh, &[false; 3]);
    let div = einsum("gabs,gs->ab", &[&dn, &p.levi_inv.tensor]);
    let sym = div.try_add(&div.permute(&[1, 0]))?;
    let hol = p
        .a_hol()
        .scale(&Scalar::new(Rational::from_integer(0.into()), Rational::from_integer((-2).into())))
        .try_sub(&sym.scale(&frac(2, n)))?;
    let mut phi = PhiExpansion::zero(a);
    for (i, al) in a.hols().enumerate() {
        for be in a.hols().skip(i) {
            let v = herm.get(&[al, a.conj(be)]);
            if !v.is_zero() {
                phi.add_term(al, a.conj(be), 2, v)?;
            }
            let w = hol.get(&[al, be]);
            if !w.is_zero() {
                phi.add_term(al, be, 2, w)?;
            }
        }
    }
    Ok(phi)
}

/// The three contracted-Bianchi combinations of Einstein components, with
/// the orders to which each must vanish.
#[derive(Clone, Debug)]
pub struct OrderForms {
    pub trace: RhoSeries,
    pub transverse_reeb: RhoSeries,
    pub transverse_horizontal: RhoSeries,
}

impl OrderForms {
    pub fn compute(p: &PseudohermitianData, phi_seed: &InvariantTensor, ein: &RhoSeries) -> Result<Self> {
        let a = p.alphabet();
        let n = p.n() as i64;
        let scalar = |f: &dyn Fn(&InvariantTensor) -> Scalar| {
            ein.map_coeffs(|c| InvariantTensor::scalar(a, f(c)))
        };
        let e_ii = ein.component(&[INF, INF]);
        let e_i0 = ein.component(&[INF, REEB]);
        let e_00 = ein.component(&[REEB, REEB]);
        let e_tr = scalar(&|c| levi_trace(p, &horizontal(c)));
        let div_inf = scalar(&|c| divergence(p, &row(c, INF)));
        let div_0 = scalar(&|c| divergence(p, &row(c, REEB)));
        let phi_up = p.raise(&pure_type(&horizontal(phi_seed)), &[0, 1]);
        let a_up = p.raise(&p.a, &[0, 1]);
        let phi_e = scalar(&|c| einsum("ab,ab->", &[&phi_up, &horizontal(c)]).value().clone());
        let a_e = scalar(&|c| einsum("ab,ab->", &[&a_up, &horizontal(c)]).value().clone());
        let shift = |s: &RhoSeries, k: i64| s.euler_apply(move |d| Scalar::from_int(d as i64 - k));
        let trace = shift(&e_ii, 4 * n + 4)
            .try_sub(&shift(&e_00, 4).scale(&frac(4, 1)))?
            .try_sub(&shift(&e_tr, 2).scale(&frac(8, 1)))?
            .try_add(&div_inf.shift(1).scale(&frac(8, 1)))?
            .try_add(&shift(&phi_e, 2).shift(2).scale(&frac(4, 1)))?;
        let transverse_reeb = shift(&e_i0, 2 * n + 4)
            .try_add(&div_0.shift(1).scale(&frac(4, 1)))?
            .try_add(&a_e.shift(2).scale(&frac(4, 1)))?;
        let minus_4i = Scalar::new(Rational::from_integer(0.into()), Rational::from_integer((-4).into()));
        let transverse_horizontal = ein
            .map_coeffs(|c| row(c, INF).restrict(&[HOL]))
            .euler_apply(|d| frac(d as i64 - 2 * n - 3, 1))
            .try_add(&ein.map_coeffs(|c| divergence_last(p, &c.restrict(&[HOL, HOL]))).shift(1).scale(&frac(4, 1)))?
            .try_add(&ein.map_coeffs(|c| row(c, REEB).restrict(&[HOL])).scale(&minus_4i))?
            .try_add(&ein.map_coeffs(|c| nijenhuis_contraction(p, c).restrict(&[HOL])).shift(1).scale(&frac(4, 1)))?;
        Ok(OrderForms { trace, transverse_reeb, transverse_horizontal })
    }

    /// True when the forms vanish below the orders implied by step `m`.
    pub fn hold_after_step(&self, m: usize) -> bool {
        self.trace.vanishes_below(m + 4)
            && self.transverse_reeb.vanishes_below(m + 4)
            && self.transverse_horizontal.vanishes_below(m + 3)
    }
}

/// Corrections applied at one step of the construction.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub m: usize,
    /// `ψ_{0α}` at degree `m+1`, over `H`.
    pub psi_0a: InvariantTensor,
    /// `ψ_{αβ}` at degree `m`, over `HOL × HOL`.
    pub psi_ab: InvariantTensor,
    /// Trace-free `ψ_{αβ̄}` at degree `m+2`.
    pub psi_tf: InvariantTensor,
    pub psi_00: Scalar,
    pub psi_trace: Scalar,
    pub order_forms_hold: bool,
    /// Every metric assembled during the step satisfies the exact Bianchi identity.
    pub bianchi_exact: bool,
}

#[derive(Clone, Debug)]
pub struct ObstructionResult {
    /// `O_{αβ}` and its conjugate, over `H × H`.
    pub o: InvariantTensor,
    /// `E_{IJ}` over the full alphabet.
    pub e: InvariantTensor,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub phi: PhiExpansion,
    pub seed: InvariantTensor,
    pub metric: ACHMetric,
    pub curvature: Curvature,
    pub steps: Vec<StepRecord>,
    pub obstruction: ObstructionResult,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Last step `m`; `None` stops at `2n+1`.
    pub last_step: Option<usize>,
    /// Check the exact Bianchi residual of every intermediate metric.
    pub check_bianchi: bool,
    /// ρ-truncation of the metric; at least `2n+5`.
    pub truncation: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { last_step: None, check_bianchi: true, truncation: None }
    }
}

fn coeff(ein: &RhoSeries, d: usize) -> Result<InvariantTensor> {
    ein.coeff(d).ok_or_else(|| Error::ShapeMismatch(format!("degree {d} beyond truncation {}", ein.trunc())))
}

fn require_zero(ein: &RhoSeries, idx: &[usize], below: usize, err: impl Fn(String) -> Error) -> Result<()> {
    let a = ein.alphabet();
    for d in 0..below.min(ein.trunc()) {
        let v = ein.entry(d, idx);
        if !v.is_zero() {
            let lbl: Vec<String> = idx.iter().map(|&i| a.label(i)).collect();
            return Err(err(format!("Ein[{}] has ρ^{d} coefficient {v}", lbl.join(","))));
        }
    }
    Ok(())
}

struct Run<'a> {
    p: &'a PseudohermitianData,
    trunc: usize,
    phi: PhiExpansion,
    check_bianchi: bool,
    /// Cleared when an intermediate metric violates the exact Bianchi identity.
    bianchi_exact: bool,
}

impl Run<'_> {
    fn einstein(&mut self) -> Result<(ACHMetric, Curvature)> {
        let m = ACHMetric::assemble(self.p, &self.phi, self.trunc)?;
        let c = curvature(self.p, &m)?;
        if self.check_bianchi && !bianchi_residual(self.p, &m, &c)?.is_empty() {
            self.bianchi_exact = false;
        }
        Ok((m, c))
    }
}

/// Runs the construction for `m = 1, …, 2n+1` starting from the seed.
pub fn solve(p: &PseudohermitianData, opts: &SolverOptions) -> Result<Solution> {
    let a = p.alphabet();
    let n = p.n();
    let ni = n as i64;
    let last = opts.last_step.unwrap_or(2 * n + 1);
    if last > 2 * n + 1 {
        return Err(Error::IndicialSingular(format!("p_αβ({}) = 0: the ρ^{} coefficient of Ein_αβ is the obstruction", 2 * n + 2, 2 * n + 2)));
    }
    let trunc = match opts.truncation {
        Some(t) if t < solution_truncation(n) => {
            return Err(Error::BadParameter(format!("truncation {t} is below {}", solution_truncation(n))))
        }
        Some(t) => t,
        None => solution_truncation(n),
    };
    let seed_phi = seed(p)?;
    let seed_coeff = seed_phi.series().coeff(2).expect("exact series");
    let mut run = Run { p, trunc, phi: seed_phi, check_bianchi: opts.check_bianchi, bianchi_exact: true };
    let hols: Vec<usize> = a.hols().collect();
    let (mut metric, mut curv) = run.einstein()?;
    for kind in [[REEB, REEB], [INF, INF], [INF, REEB]] {
        require_zero(&curv.einstein, &kind, 3, Error::FloorAssertFailed)?;
    }
    let mut steps = Vec::new();
    for m in 1..=last {
        let mi = m as i64;
        // (a) Ein_{0α} at ρ^{m+1}, Ein_{αβ} at ρ^m.
        let e1 = coeff(&curv.einstein, m + 1)?;
        let e0 = coeff(&curv.einstein, m)?;
        let mut psi_0a = InvariantTensor::zeros(a, &[H]);
        let mut psi_ab = InvariantTensor::zeros(a, &[HOL, HOL]);
        let p0 = indicial::p_0a(mi + 1, ni);
        let pab = indicial::p_ab(mi, ni);
        for &al in &hols {
            let v = e1.get(&[REEB, al]);
            if v.is_zero() {
                continue;
            }
            if m + 1 < 3 {
                return Err(Error::FloorAssertFailed(format!("Ein[T,{}] has ρ^{} coefficient {v}", a.label(al), m + 1)));
            }
            let psi = -(v.checked_div(&p0).map_err(|_| Error::IndicialSingular(format!("p_0α({})", m + 1)))?);
            psi_0a.set(&[al], psi.clone());
            psi_0a.set(&[a.conj(al)], psi.conj());
            run.phi.add_term(REEB, al, m + 1, &psi)?;
        }
        for (i, &al) in hols.iter().enumerate() {
            for &be in &hols[i..] {
                let v = e0.get(&[al, be]);
                if v.is_zero() {
                    continue;
                }
                if m < 3 {
                    return Err(Error::FloorAssertFailed(format!(
                        "Ein[{},{}] has ρ^{m} coefficient {v}",
                        a.label(al),
                        a.label(be)
                    )));
                }
                let psi = -(v.checked_div(&pab).map_err(|_| Error::IndicialSingular(format!("p_αβ({m})")))?);
                psi_ab.set(&[al, be], psi.clone());
                psi_ab.set(&[be, al], psi.clone());
                run.phi.add_term(al, be, m, &psi)?;
            }
        }
        if !psi_0a.is_zero() || !psi_ab.is_zero() {
            (metric, curv) = run.einstein()?;
        }

        // (b) trace-free part of Ein_{αβ̄} at ρ^{m+2}.
        let d = m + 2;
        let di = d as i64;
        let e2 = coeff(&curv.einstein, d)?;
        let herm = e2.restrict(&[HOL, AHOL]);
        let tr = levi_trace(p, &herm);
        let tf = herm.try_sub(&p.h_tensor().scale(&(&tr * &frac(1, ni))))?;
        let mut psi_tf = InvariantTensor::zeros(a, &[HOL, AHOL]);
        if !tf.is_zero() {
            let ptf = indicial::p_tf(di, ni);
            let inv = ptf.inv().map_err(|_| Error::IndicialSingular(format!("p_tf({d})")))?;
            psi_tf = tf.scale(&-inv);
            for (i, &al) in hols.iter().enumerate() {
                for &be in &hols[i..] {
                    let v = psi_tf.get(&[al, a.conj(be)]);
                    if !v.is_zero() {
                        run.phi.add_term(al, a.conj(be), d, v)?;
                    }
                }
            }
            (metric, curv) = run.einstein()?;
        }

        // (c) Ein_00 and Ein_α^α at ρ^{m+2}.
        let e2 = coeff(&curv.einstein, d)?;
        let e00 = e2.get(&[REEB, REEB]).clone();
        let etr = levi_trace(p, &e2.restrict(&[HOL, AHOL]));
        let (mut psi_00, mut psi_trace) = (Scalar::zero(), Scalar::zero());
        if !e00.is_zero() || !etr.is_zero() {
            let mm = indicial::trace_matrix(di, ni);
            let det = indicial::trace_det(di, ni);
            let dinv = det.inv().map_err(|_| Error::IndicialSingular(format!("trace system at degree {d}")))?;
            // Cramer's rule for M (x, s) = −(e00, etr).
            let (r0, r1) = (-e00, -etr);
            psi_00 = &(&(&mm[1][1] * &r0) - &(&mm[0][1] * &r1)) * &dinv;
            psi_trace = &(&(&mm[0][0] * &r1) - &(&mm[1][0] * &r0)) * &dinv;
            if !psi_00.is_zero() {
                run.phi.add_term(REEB, REEB, d, &psi_00)?;
            }
            let per = &psi_trace * &frac(1, ni);
            for (i, &al) in hols.iter().enumerate() {
                for &be in &hols[i..] {
                    let v = &p.h[(al - 2, be - 2)] * &per;
                    if !v.is_zero() {
                        run.phi.add_term(al, a.conj(be), d, &v)?;
                    }
                }
            }
            (metric, curv) = run.einstein()?;
        }

        // (d) everything below the step's orders, including the components
        // determined by the contracted Bianchi identity.
        let ein = &curv.einstein;
        for &al in &hols {
            for &be in &hols {
                require_zero(ein, &[al, be], m + 1, Error::FloorAssertFailed)?;
                require_zero(ein, &[al, a.conj(be)], m + 3, Error::FloorAssertFailed)?;
            }
            require_zero(ein, &[REEB, al], m + 2, Error::FloorAssertFailed)?;
            require_zero(ein, &[INF, al], m + 2, Error::BianchiAssertFailed)?;
        }
        require_zero(ein, &[REEB, REEB], m + 3, Error::FloorAssertFailed)?;
        require_zero(ein, &[INF, INF], m + 3, Error::BianchiAssertFailed)?;
        require_zero(ein, &[INF, REEB], m + 3, Error::BianchiAssertFailed)?;

        let order_forms_hold = OrderForms::compute(p, &seed_coeff, ein)?.hold_after_step(m);
        let bianchi_exact = std::mem::replace(&mut run.bianchi_exact, true);
        steps.push(StepRecord { m, psi_0a, psi_ab, psi_tf, psi_00, psi_trace, order_forms_hold, bianchi_exact });
    }
    let obstruction = extract(&curv.einstein, n)?;
    Ok(Solution { phi: run.phi, seed: seed_coeff, metric, curvature: curv, steps, obstruction })
}

fn extract(ein: &RhoSeries, n: usize) -> Result<ObstructionResult> {
    let a = ein.alphabet();
    let o = pure_type(&horizontal(&coeff(ein, 2 * n + 2)?));
    let mut e = InvariantTensor::zeros(a, &[Kinds::ALL, Kinds::ALL]);
    for i in 0..a.size() {
        for j in 0..a.size() {
            let d = 2 * n + 1 + order_offset(a, i, j);
            let v = coeff(ein, d)?.get(&[i, j]).clone();
            if !v.is_zero() {
                e.set(&[i, j], v);
            }
        }
    }
    Ok(ObstructionResult { o, e })
}

/// `E_{0α}` against `−i∇^βO_{αβ} − iN_α^{β̄γ̄}O_{β̄γ̄}`, both over `HOL`.
pub fn second_obstruction_check(p: &PseudohermitianData, r: &ObstructionResult) -> (InvariantTensor, InvariantTensor) {
    let minus_i = -Scalar::i();
    let o_hol = r.o.restrict(&[HOL, HOL]);
    let predicted = divergence_last(p, &o_hol)
        .try_add(&nijenhuis_contraction(p, &r.o.restrict(&[AHOL, AHOL])).restrict(&[HOL]))
        .expect("one-forms")
        .scale(&minus_i);
    let actual = row(&r.e, REEB).restrict(&[HOL]);
    (actual, predicted)
}

/// `ρ^{−2n−3}(∇^αEin_{0α} + ∇^ᾱEin_{0ᾱ})` at the boundary against `−A^{αβ}O_{αβ} − A^{ᾱβ̄}O_{ᾱβ̄}`.
pub fn reeb_divergence_check(p: &PseudohermitianData, r: &ObstructionResult) -> (Scalar, Scalar) {
    let actual = divergence(p, &row(&r.e, REEB));
    let a_up = p.raise(&p.a, &[0, 1]);
    let predicted = -einsum("ab,ab->", &[&a_up, &r.o]).value().clone();
    (actual, predicted)
}

/// `∇^α∇^βS_{αβ} + c_a A^{αβ}S_{αβ} + c_n N^{γαβ}∇_γS_{αβ} + c_dn N^{γαβ}_{,γ}S_{αβ}`
/// for `S` over `HOL × HOL`.
pub fn double_divergence(p: &PseudohermitianData, s: &InvariantTensor, c_a: &Scalar, c_n: &Scalar, c_dn: &Scalar) -> Scalar {
    let s = s.restrict(&[HOL, HOL]);
    let first = divergence_last(p, &s);
    let dd = tw_derivative(&p.gamma, &first, &[false]);
    let lap = einsum("ax,ax->", &[&dd, &p.levi_inv.tensor]).value().clone();
    let a_up = p.raise(&p.a.restrict(&[AHOL, AHOL]), &[0, 1]);
    let a_term = einsum("ab,ab->", &[&a_up, &s]).value().clone();
    let n_up = p.raise(&p.nij.restrict(&[AHOL, AHOL, AHOL]), &[0, 1, 2]);
    let ds = tw_derivative(&p.gamma, &s, &[false, false]);
    let n_term = einsum("gab,abg->", &[&n_up, &ds]).value().clone();
    let dn = tw_derivative(&p.gamma, &n_up, &[true, true, true]);
    let dn_tr = einsum("gabg->ab", &[&dn]);
    let dn_term = einsum("ab,ab->", &[&dn_tr, &s]).value().clone();
    lap + c_a * a_term + c_n * n_term + c_dn * dn_term
}

/// `D_t^{αβ}S_{αβ}`; `t = 0` gives the operator of the divergence identity.
pub fn d_t(p: &PseudohermitianData, s: &InvariantTensor, t: &Scalar) -> Scalar {
    let n = Scalar::from_int(p.n() as i64);
    let one = Scalar::one();
    let c_n = -(&one + &(t * &n));
    let c_dn = -(&one + &(t * &(&n + &one)));
    double_divergence(p, s, &-Scalar::i(), &c_n, &c_dn)
}

/// `D^{αβ}O_{αβ} − D^{ᾱβ̄}O_{ᾱβ̄}`, with the antiholomorphic half evaluated
/// on the conjugate tensors.
pub fn divergence_identity(p: &PseudohermitianData, r: &ObstructionResult) -> Scalar {
    let hol = d_t(p, &r.o.restrict(&[HOL, HOL]), &Scalar::zero());
    let conj_o = r.o.restrict(&[AHOL, AHOL]).conj();
    let ahol = d_t(p, &conj_o, &Scalar::zero()).conj();
    hol - ahol
}

/// The boundary scalars `u` and `v` built from `E`.
pub fn compute_u_v(p: &PseudohermitianData, r: &ObstructionResult) -> (Scalar, Scalar) {
    let n = p.n() as i64;
    let e = &r.e;
    let i = Scalar::i();
    let hol_div = |x: usize| divergence(p, &row(e, x).restrict(&[HOL]));
    let ahol_div = |x: usize| divergence(p, &row(e, x).restrict(&[AHOL]));
    let u = (e.get(&[INF, REEB]) - &i * hol_div(INF) + &i * ahol_div(INF)) * frac(-1, n + 1);
    let e_hol = e.restrict(&[HOL, HOL]);
    let e_ahol_conj = e.restrict(&[AHOL, AHOL]).conj();
    let one = Scalar::one();
    let zero = Scalar::zero();
    let dd = double_divergence(p, &e_hol, &zero, &one, &one);
    let dd_bar = double_divergence(p, &e_ahol_conj, &zero, &one, &one).conj();
    let v = -e.get(&[REEB, REEB]).clone()
        + frac(2, n) * levi_trace(p, &horizontal(e))
        - frac(1, n) * divergence(p, &row(e, INF))
        + frac(2, n * (n + 2)) * &i * (hol_div(REEB) - ahol_div(REEB))
        - frac(2, n * (n + 1)) * (dd + dd_bar);
    (u, v)
}

/// `Ô_{αβ}` for `θ̂ = λθ` against `λ^{−n}O_{αβ}`.
pub fn scaling_law(alg: &CRFrameAlgebra, lambda: &Rational, opts: &SolverOptions) -> Result<(InvariantTensor, InvariantTensor)> {
    let p = PseudohermitianData::new(alg)?;
    let base = solve(&p, opts)?;
    let scaled_alg = alg.rescale(lambda)?;
    let ps = PseudohermitianData::new(&scaled_alg)?;
    let scaled = solve(&ps, opts)?;
    let factor = Scalar::from_rational(lambda.clone()).pow(p.n() as u32).inv()?;
    Ok((scaled.obstruction.o, base.obstruction.o.scale(&factor)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra;

    #[test]
    fn determinant_matches_closed_form() {
        for n in 1..=4 {
            for d in 1..=12 {
                assert_eq!(indicial::trace_det(d, n), indicial::trace_det_closed(d, n));
            }
        }
        assert_eq!(indicial::trace_det(3, 1), frac(225, 64));
        assert!(indicial::p_ab(6, 2).is_zero());
    }

    #[test]
    fn offsets_are_symmetric_and_conjugation_invariant() {
        let a = Alphabet::new(2);
        for i in 0..a.size() {
            for j in 0..a.size() {
                assert_eq!(order_offset(a, i, j), order_offset(a, j, i));
                assert_eq!(order_offset(a, i, j), order_offset(a, a.conj(i), a.conj(j)));
            }
        }
        assert_eq!(order_offset(a, a.hol(0), a.hol(1)), 1);
        assert_eq!(order_offset(a, REEB, a.antihol(0)), 2);
        assert_eq!(order_offset(a, a.hol(0), a.antihol(1)), 3);
    }

    #[test]
    fn su2_seed_and_third_order() {
        let p = PseudohermitianData::new(&algebra::su2()).unwrap();
        let a = p.alphabet();
        let phi = seed(&p).unwrap();
        assert_eq!(phi.series().entry(2, &[a.hol(0), a.antihol(0)]), -Scalar::one());
        let m = ACHMetric::assemble(&p, &phi, 5).unwrap();
        let e = curvature(&p, &m).unwrap().einstein;
        assert!(e.vanishes_below(3), "{:?}", e.coeff(2));
    }

    #[test]
    fn heisenberg_solution_is_trivial() {
        let p = PseudohermitianData::new(&algebra::heisenberg(1).unwrap()).unwrap();
        let s = solve(&p, &SolverOptions::default()).unwrap();
        assert!(s.phi.series().is_empty());
        assert!(s.obstruction.o.is_zero());
        assert!(s.obstruction.e.is_zero());
    }

    #[test]
    fn su2_obstruction_vanishes() {
        let p = PseudohermitianData::new(&algebra::su2()).unwrap();
        let s = solve(&p, &SolverOptions::default()).unwrap();
        assert!(s.obstruction.o.is_zero());
        assert!(s.steps.iter().all(|r| r.order_forms_hold && r.bianchi_exact), "{:?}", s.steps);
        let (u, v) = compute_u_v(&p, &s.obstruction);
        assert!(u.is_real());
        println!("su2 E = {:?}, u = {u}, v = {v}", s.obstruction.e);
    }

    #[test]
    fn continuing_past_the_obstruction_is_singular() {
        let p = PseudohermitianData::new(&algebra::heisenberg(1).unwrap()).unwrap();
        let s = solve(&p, &SolverOptions { last_step: Some(4), check_bianchi: false, truncation: None });
        assert!(matches!(s, Err(Error::IndicialSingular(_))));
        assert!(solve(&p, &SolverOptions { last_step: Some(3), check_bianchi: false, truncation: None }).is_ok());
    }
}
