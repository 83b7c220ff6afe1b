//! Normal-form ACH metrics as ρ-series in the frame
//! `W_∞ = ρ∂ρ, W_0 = ρ²T, W_α = ρZ_α, W_ᾱ = ρZ_ᾱ`, with the extended
//! connection `∇̄`, the difference tensor `D = ∇^g − ∇̄` and exact Ricci and
//! Einstein tensors.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::index::{Alphabet, IndexKind, Kinds, INF, REEB};
use crate::pseudohermitian::{tw_derivative, PseudohermitianData};
use crate::scalar::Scalar;
use crate::series::{invert_metric_series, series_einsum, RhoSeries, EXACT};
use crate::tensor::{einsum, InvariantTensor};

const ALL: Kinds = Kinds::ALL;

/// The nonconstant part `φ_{ij}` of a normal-form metric, stored as one
/// symmetric hermitian series over the boundary indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiExpansion {
    series: RhoSeries,
}

impl PhiExpansion {
    pub fn zero(alpha: Alphabet) -> Self {
        PhiExpansion { series: RhoSeries::zero(alpha, &[Kinds::M, Kinds::M], EXACT) }
    }

    /// Wraps a series after checking symmetry and hermiticity.
    pub fn from_series(series: RhoSeries) -> Result<Self> {
        if series.rank() != 2 || series.kinds().iter().any(|k| k.contains(Kinds::INF)) {
            return Err(Error::ShapeMismatch("φ must be a rank-2 tensor over boundary indices".into()));
        }
        if series.permute(&[1, 0]) != series {
            return Err(Error::BadParameter("φ is not symmetric".into()));
        }
        if !is_hermitian(&series) {
            return Err(Error::BadParameter("φ is not hermitian".into()));
        }
        Ok(PhiExpansion { series })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.series.alphabet()
    }

    pub fn series(&self) -> &RhoSeries {
        &self.series
    }

    /// Adds `v ρ^d` to `φ_{ij}` together with the entries forced by symmetry
    /// and hermiticity. Self-conjugate entries require real `v`.
    pub fn add_term(&mut self, i: usize, j: usize, d: usize, v: &Scalar) -> Result<()> {
        let a = self.alphabet();
        if i == INF || j == INF || i >= a.size() || j >= a.size() {
            return Err(Error::BadParameter(format!("φ has no component ({i},{j})")));
        }
        let mut deltas: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        deltas.insert((i, j), v.clone());
        deltas.insert((j, i), v.clone());
        let (ci, cj) = (a.conj(i), a.conj(j));
        let cv = v.conj();
        for pos in [(ci, cj), (cj, ci)] {
            match deltas.get(&pos) {
                Some(x) if *x != cv => {
                    return Err(Error::BadParameter(format!(
                        "φ_({},{}) is self-conjugate and needs a real value",
                        a.label(i),
                        a.label(j)
                    )))
                }
                Some(_) => {}
                None => {
                    deltas.insert(pos, cv.clone());
                }
            }
        }
        for ((x, y), dv) in deltas {
            self.series.add_entry(d, &[x, y], &dv);
        }
        Ok(())
    }

    pub fn add(&self, o: &PhiExpansion) -> Result<PhiExpansion> {
        Ok(PhiExpansion { series: self.series.try_add(&o.series)? })
    }

    pub fn truncate(&self, trunc: usize) -> PhiExpansion {
        PhiExpansion { series: self.series.truncate(trunc) }
    }
}

/// True when the series is invariant under conjugating values and indices.
pub fn is_hermitian(s: &RhoSeries) -> bool {
    s.conj() == *s
}

/// A normal-form ACH metric `g_{IJ}` and its inverse through the truncation.
#[derive(Clone, Debug)]
pub struct ACHMetric {
    pub g: RhoSeries,
    pub ginv: RhoSeries,
    pub phi: PhiExpansion,
}

impl ACHMetric {
    /// `g_{∞∞} = 4`, `g_{00} = 1 + φ_{00}`, `g_{0α} = φ_{0α}`,
    /// `g_{αβ̄} = h_{αβ̄} + φ_{αβ̄}`, `g_{αβ} = φ_{αβ}`, known below `trunc`.
    pub fn assemble(p: &PseudohermitianData, phi: &PhiExpansion, trunc: usize) -> Result<Self> {
        let a = p.alphabet();
        if phi.alphabet() != a {
            return Err(Error::ShapeMismatch("φ and the structure have different dimensions".into()));
        }
        if trunc == 0 || trunc == EXACT {
            return Err(Error::BadParameter("metric truncation must be finite and positive".into()));
        }
        if phi.series.coeff_ref(0).is_some_and(|c| !c.is_zero()) {
            return Err(Error::NormalFormViolation("φ does not vanish at ρ = 0".into()));
        }
        let phi = phi.truncate(trunc);
        let mut g0 = InvariantTensor::zeros(a, &[ALL, ALL]);
        g0.set(&[INF, INF], Scalar::from_int(4));
        g0.set(&[REEB, REEB], Scalar::one());
        for (idx, v) in p.levi.tensor.nonzero() {
            g0.set(&idx, v.clone());
        }
        let g = RhoSeries::constant(g0).truncate(trunc).try_add(&phi.series)?;
        let ginv = invert_metric_series(&g)?;
        Ok(ACHMetric { g, ginv, phi })
    }

    pub fn trunc(&self) -> usize {
        self.g.trunc()
    }
}

/// The extended derivative `∇̄S`, derivative slot appended last. `upper`
/// marks contravariant slots.
pub fn extended_derivative(p: &PseudohermitianData, s: &RhoSeries, upper: &[bool]) -> RhoSeries {
    assert_eq!(upper.len(), s.rank());
    let a = p.alphabet();
    let mut kinds = s.kinds().to_vec();
    kinds.push(ALL);
    let trunc = s.trunc();
    let mut coeffs: Vec<InvariantTensor> = Vec::new();
    let put = |d: usize, idx: &[usize], v: &Scalar, coeffs: &mut Vec<InvariantTensor>| {
        if d >= trunc {
            return;
        }
        while coeffs.len() <= d {
            coeffs.push(InvariantTensor::zeros(a, &kinds));
        }
        coeffs[d].add_at(idx, v);
    };
    for d in 0..s.len() {
        let Some(c) = s.coeff_ref(d) else { continue };
        if c.is_zero() {
            continue;
        }
        for (idx, v) in c.nonzero() {
            let w: i64 = idx
                .iter()
                .zip(upper)
                .map(|(&i, &u)| if u { -(a.weight(i) as i64) } else { a.weight(i) as i64 })
                .sum();
            let f = d as i64 - w;
            if f != 0 {
                let mut o = idx.clone();
                o.push(INF);
                put(d, &o, &(v * Scalar::from_int(f)), &mut coeffs);
            }
        }
        let tw = tw_derivative(&p.gamma, c, upper);
        for (idx, v) in tw.nonzero() {
            let shift = a.weight(idx[idx.len() - 1]);
            put(d + shift, &idx, v, &mut coeffs);
        }
    }
    let mut out = RhoSeries::zero(a, &kinds, trunc);
    for (d, c) in coeffs.into_iter().enumerate() {
        if !c.is_zero() {
            out.set_coeff(d, c);
        }
    }
    out
}

/// Exact series from boundary constants placed at degree `w_x + w_y − w_z`.
fn weighted_constants(p: &PseudohermitianData, t: &InvariantTensor, name: &str) -> Result<RhoSeries> {
    let a = p.alphabet();
    let mut out = RhoSeries::zero(a, &[ALL, ALL, ALL], EXACT);
    for (idx, v) in t.nonzero() {
        let d = (a.weight(idx[0]) + a.weight(idx[1])) as i64 - a.weight(idx[2]) as i64;
        if d < 0 {
            return Err(Error::InvalidAlgebra(format!("{name} component of negative weight")));
        }
        out.add_entry(d as usize, &idx, v);
    }
    Ok(out)
}

/// `Θ̄_{IJ}^K`: `Θ̄_{αβ̄}^0 = i h_{αβ̄}`, `Θ̄_{0α}^β̄ = ρ²A_α^β̄`, `Θ̄_{αβ}^γ̄ = −ρN_{αβ}^γ̄`.
pub fn extended_torsion(p: &PseudohermitianData) -> Result<RhoSeries> {
    weighted_constants(p, &p.torsion, "torsion")
}

/// Frame brackets `[W_I, W_J] = B_{IJ}^K W_K`.
pub fn frame_brackets(p: &PseudohermitianData) -> Result<RhoSeries> {
    let a = p.alphabet();
    let mut b = weighted_constants(p, p.alg.constants(), "bracket")?;
    for j in a.boundary() {
        let w = Scalar::from_int(a.weight(j) as i64);
        b.add_entry(0, &[INF, j, j], &w);
        b.add_entry(0, &[j, INF, j], &-w);
    }
    Ok(b)
}

/// `∇̄_{W_I}W_J = Γ̄_{IJ}^K W_K`.
pub fn extended_connection(p: &PseudohermitianData) -> RhoSeries {
    let a = p.alphabet();
    let mut out = RhoSeries::zero(a, &[ALL, ALL, ALL], EXACT);
    for j in 0..a.size() {
        out.add_entry(0, &[INF, j, j], &Scalar::from_int(a.weight(j) as i64));
    }
    for (idx, v) in p.gamma.nonzero() {
        out.add_entry(a.weight(idx[0]), &idx, v);
    }
    out
}

/// `D_{IKJ}` (slots `[I][K][J]`) and `D_I^K_J = g^{KL}D_{ILJ}`.
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub lower: RhoSeries,
    pub mixed: RhoSeries,
}

pub fn christoffel(p: &PseudohermitianData, m: &ACHMetric) -> Result<Christoffel> {
    let dg = extended_derivative(p, &m.g, &[false, false]);
    let th = extended_torsion(p)?;
    let tl = series_einsum("ijl,kl->ijk", &[&th, &m.g]);
    // Output slots (I, K, J).
    let lower = dg
        .permute(&[2, 1, 0])
        .try_add(&dg)?
        .try_sub(&dg.permute(&[0, 2, 1]))?
        .try_add(&tl)?
        .try_add(&tl.permute(&[2, 1, 0]))?
        .try_add(&tl.permute(&[0, 2, 1]))?
        .scale(&Scalar::frac(1, 2));
    let mixed = series_einsum("ilj,kl->ikj", &[&lower, &m.ginv]);
    Ok(Christoffel { lower, mixed })
}

/// `R̄_{IJ}` from the pseudohermitian invariants: `R̄_{αβ̄} = ρ²(R_{αβ̄} − N_{αστ}N_β̄^{τσ})`,
/// `R̄_{αβ} = ρ²(i(n−1)A_{αβ} + N_{γβα,}^γ)`, `R̄_{α0} = ρ³A_{αβ,}^β` and
/// conjugates; other components vanish.
pub fn extended_ricci(p: &PseudohermitianData) -> Result<RhoSeries> {
    let a = p.alphabet();
    let n = p.n() as i64;
    let n_hol = p.n_hol();
    let n_bar_up = p.raise(&n_hol.conj(), &[1, 2]);
    let nn = einsum("ast,bts->ab", &[&n_hol, &n_bar_up]);
    let mixed = p.ricci_hol().try_sub(&nn)?;
    let dn = tw_derivative(&p.gamma, &n_hol, &[false; 3]);
    let div = einsum("gbas,gs->ab", &[&dn, &p.levi_inv.tensor]);
    let hol = p.a_hol().scale(&Scalar::new(crate::scalar::rat(0, 1), crate::scalar::rat(n - 1, 1))).try_add(&div)?;
    let mut c = InvariantTensor::zeros(a, &[ALL, ALL]);
    for t in [&mixed, &hol] {
        for (idx, v) in t.nonzero() {
            c.add_at(&idx, v);
            c.add_at(&[a.conj(idx[0]), a.conj(idx[1])], &v.conj());
        }
    }
    // R̄_{α0} = ρ³A_{αβ,}^β; the transposed R̄_{0α} vanishes since ∇̄W_0 = 0.
    let da = tw_derivative(&p.gamma, &p.a_hol(), &[false, false]);
    let div_a = einsum("abg,bg->a", &[&da, &p.levi_inv.tensor]);
    let mut c3 = InvariantTensor::zeros(a, &[ALL, ALL]);
    for (idx, v) in div_a.nonzero() {
        c3.add_at(&[idx[0], REEB], v);
        c3.add_at(&[a.conj(idx[0]), REEB], &v.conj());
    }
    RhoSeries::monomial(c, 2).try_add(&RhoSeries::monomial(c3, 3))
}

/// `tr(X ↦ R(X, W_J)W_K)` as `[J][K]` for a frame connection `Γ_{IJ}^K` with
/// brackets `B_{IJ}^K`; only `W_∞ = ρ∂ρ` acts on coefficient functions.
pub fn frame_ricci(conn: &RhoSeries, brackets: &RhoSeries) -> Result<RhoSeries> {
    let a = conn.alphabet();
    let rd = conn.rho_d();
    // Σ_I W_I(Γ_{JK}^I) = ρ∂ρ Γ_{JK}^∞
    let t1 = series_einsum("jki->jki", &[&rd]).map_coeffs(|t| {
        let mut out = InvariantTensor::zeros(a, &[ALL, ALL]);
        for (idx, v) in t.nonzero() {
            if idx[2] == INF {
                out.add_at(&idx[..2], v);
            }
        }
        out
    });
    // W_J(Γ_{IK}^I), nonzero only for J = ∞.
    let tr = series_einsum("iki->k", &[&rd]);
    let t2 = tr.map_coeffs(|t| {
        let mut out = InvariantTensor::zeros(a, &[ALL, ALL]);
        for (idx, v) in t.nonzero() {
            out.add_at(&[INF, idx[0]], v);
        }
        out
    });
    let t3 = series_einsum("jkl,ili->jk", &[conn, conn]);
    let t4 = series_einsum("ikl,jli->jk", &[conn, conn]);
    let t5 = series_einsum("ijl,lki->jk", &[brackets, conn]);
    t1.try_sub(&t2)?.try_add(&t3)?.try_sub(&t4)?.try_sub(&t5)
}

/// Levi-Civita connection `Γ^g_{IJ}^K` of `g` in the frame, from the Koszul formula.
pub fn koszul_connection(m: &ACHMetric, brackets: &RhoSeries) -> Result<RhoSeries> {
    let a = m.g.alphabet();
    // W_I g_{JL}
    let wg = m.g.rho_d().map_coeffs(|t| {
        let mut out = InvariantTensor::zeros(a, &[ALL, ALL, ALL]);
        for (idx, v) in t.nonzero() {
            out.set(&[INF, idx[0], idx[1]], v.clone());
        }
        out
    });
    // bg[I][J][L] = g([W_I, W_J], W_L)
    let bg = series_einsum("ijm,ml->ijl", &[brackets, &m.g]);
    let low = wg
        .try_add(&wg.permute(&[1, 0, 2]))?
        .try_sub(&wg.permute(&[1, 2, 0]))?
        .try_add(&bg)?
        .try_sub(&bg.permute(&[0, 2, 1]))?
        .try_sub(&bg.permute(&[2, 0, 1]))?
        .scale(&Scalar::frac(1, 2));
    Ok(series_einsum("ijl,kl->ijk", &[&low, &m.ginv]))
}

/// Christoffel difference from the Koszul formula, slots `[I][K][J]`:
/// `D_I^K_J W_K = ∇^g_{W_J}W_I − ∇̄_{W_J}W_I`.
pub fn koszul_difference(p: &PseudohermitianData, m: &ACHMetric) -> Result<RhoSeries> {
    let b = frame_brackets(p)?;
    let lc = koszul_connection(m, &b)?;
    let diff = lc.try_sub(&extended_connection(p))?;
    Ok(diff.permute(&[1, 2, 0]))
}

/// Ricci and Einstein tensors together with the Christoffel data they used.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub christoffel: Christoffel,
    pub ricci: RhoSeries,
    pub einstein: RhoSeries,
}

pub fn curvature(p: &PseudohermitianData, m: &ACHMetric) -> Result<Curvature> {
    let ch = christoffel(p, m)?;
    let dm = &ch.mixed;
    let dd = extended_derivative(p, dm, &[false, true, false]);
    let t1 = series_einsum("ikjk->ij", &[&dd]);
    let t2 = series_einsum("ikkj->ij", &[&dd]);
    let t3 = series_einsum("ilk,jkl->ij", &[dm, dm]);
    let t4 = series_einsum("ilj,lkk->ij", &[dm, dm]);
    let ricci = extended_ricci(p)?
        .truncate(m.trunc())
        .try_add(&t1)?
        .try_sub(&t2)?
        .try_sub(&t3)?
        .try_add(&t4)?;
    let einstein = ricci.try_add(&m.g.scale(&Scalar::frac(p.n() as i64 + 2, 2)))?;
    Ok(Curvature { christoffel: ch, ricci, einstein })
}

pub fn ricci(p: &PseudohermitianData, m: &ACHMetric) -> Result<RhoSeries> {
    Ok(curvature(p, m)?.ricci)
}

pub fn einstein(p: &PseudohermitianData, m: &ACHMetric) -> Result<RhoSeries> {
    Ok(curvature(p, m)?.einstein)
}

/// `∇^g_K E_{IJ}` as `[I][J][K]`, for a symmetric 2-tensor `E`.
pub fn levi_civita_derivative(p: &PseudohermitianData, d_mixed: &RhoSeries, e: &RhoSeries) -> Result<RhoSeries> {
    let de = extended_derivative(p, e, &[false, false]);
    de.try_sub(&series_einsum("ilk,lj->ijk", &[d_mixed, e]))?
        .try_sub(&series_einsum("jlk,il->ijk", &[d_mixed, e]))
}

/// `g^{IJ}∇^g_K Ein_{IJ} − 2g^{IJ}∇^g_I Ein_{JK}`, identically zero below the truncation.
pub fn bianchi_residual(p: &PseudohermitianData, m: &ACHMetric, c: &Curvature) -> Result<RhoSeries> {
    let cov = levi_civita_derivative(p, &c.christoffel.mixed, &c.einstein)?;
    let tr = series_einsum("ijk,ij->k", &[&cov, &m.ginv]);
    let div = series_einsum("jki,ij->k", &[&cov, &m.ginv]);
    tr.try_sub(&div.scale(&Scalar::from_int(2)))
}

/// Scalar series with arithmetic, for transcribing component formulas.
#[derive(Clone)]
struct Ser(RhoSeries);

impl Add for Ser {
    type Output = Ser;
    fn add(self, o: Ser) -> Ser {
        Ser(self.0.try_add(&o.0).expect("scalar series"))
    }
}

impl Sub for Ser {
    type Output = Ser;
    fn sub(self, o: Ser) -> Ser {
        Ser(self.0.try_sub(&o.0).expect("scalar series"))
    }
}

impl Neg for Ser {
    type Output = Ser;
    fn neg(self) -> Ser {
        Ser(self.0.scale(&-Scalar::one()))
    }
}

impl Mul<Ser> for Scalar {
    type Output = Ser;
    fn mul(self, s: Ser) -> Ser {
        Ser(s.0.scale(&self))
    }
}

impl Mul<Ser> for Ser {
    type Output = Ser;
    fn mul(self, o: Ser) -> Ser {
        Ser(series_einsum(",->", &[&self.0, &o.0]))
    }
}

impl Ser {
    fn rho(self, k: usize) -> Ser {
        Ser(self.0.shift(k))
    }

    /// `½(ρ∂ρ − k)`
    fn half_euler(self, k: i64) -> Ser {
        Ser(self.0.euler_apply(|d| Scalar::frac(d as i64 - k, 2)))
    }

    fn sum(a: Alphabet, items: impl Iterator<Item = Ser>) -> Ser {
        items.fold(Ser(RhoSeries::zero(a, &[], EXACT)), |acc, s| acc + s)
    }
}

struct TableRows<'a> {
    p: &'a PseudohermitianData,
    a: Alphabet,
    phi: &'a RhoSeries,
    dphi: RhoSeries,
    am: InvariantTensor,
}

impl TableRows<'_> {
    fn c(&self, v: Scalar) -> Ser {
        Ser(RhoSeries::constant(InvariantTensor::scalar(self.a, v)))
    }
    fn f(&self, i: usize, j: usize) -> Ser {
        Ser(self.phi.component(&[i, j]))
    }
    /// `φ_{ij,k}`
    fn df(&self, i: usize, j: usize, k: usize) -> Ser {
        Ser(self.dphi.component(&[i, j, k]))
    }
    fn h(&self, i: usize, j: usize) -> Scalar {
        self.p.levi.tensor.get(&[i, j]).clone()
    }
    /// `A_i^j`
    fn am(&self, i: usize, j: usize) -> Scalar {
        self.am.get(&[i, j]).clone()
    }
    fn al(&self, i: usize, j: usize) -> Scalar {
        self.p.a.get(&[i, j]).clone()
    }
    /// `N_{ij}^k`
    fn nm(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.p.nij_mixed.get(&[i, j, k]).clone()
    }
    fn nl(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.p.nij.get(&[i, j, k]).clone()
    }
    /// `Σ_x c(x) φ_{yx}` over `x` in `xs`
    fn sum_f(&self, xs: std::ops::Range<usize>, c: impl Fn(usize) -> Scalar, y: usize) -> Ser {
        Ser::sum(self.a, xs.map(|x| c(x) * self.f(y, x)))
    }

    fn entry(&self, i: usize, k: usize, j: usize) -> Ser {
        let a = self.a;
        let first_non_real = [i, j, k].into_iter().map(|x| a.kind(x)).find(|k| matches!(k, IndexKind::Hol | IndexKind::AntiHol));
        if first_non_real == Some(IndexKind::AntiHol) {
            return Ser(self.entry(a.conj(i), a.conj(k), a.conj(j)).0.conj());
        }
        if i != INF && j == INF {
            return self.entry(INF, k, i);
        }
        use IndexKind::{AntiHol as B, Hol as H, Infinity as F, Reeb as R};
        let half = Scalar::frac(1, 2);
        let ih = Scalar::new(crate::scalar::rat(0, 1), crate::scalar::rat(1, 2));
        let zero = || self.c(Scalar::zero());
        let hols = a.hols();
        let ahols = a.antihols();
        match (a.kind(i), a.kind(k), a.kind(j)) {
            (F, F, F) => self.c(Scalar::from_int(-4)),
            (F, R, F) | (F, H, F) | (F, F, R) | (F, F, H) => zero(),
            (F, R, R) => self.c(Scalar::from_int(-2)) + self.f(REEB, REEB).half_euler(4),
            (F, H, R) => self.f(REEB, k).half_euler(3),
            (F, R, H) => self.f(REEB, j).half_euler(3),
            (F, B, H) => self.c(-self.h(j, k)) + self.f(j, k).half_euler(2),
            (F, H, H) => self.f(j, k).half_euler(2),

            (R, F, R) => self.c(Scalar::from_int(2)) - self.f(REEB, REEB).half_euler(4),
            (R, R, R) => half * self.df(REEB, REEB, REEB).rho(2),
            (R, H, R) => {
                -(half.clone() * self.df(REEB, REEB, k).rho(1))
                    + (self.df(REEB, k, REEB) + self.sum_f(ahols, |b| self.am(k, b), REEB)).rho(2)
            }
            (R, F, H) => -self.f(REEB, j).half_euler(3),
            (R, R, H) => half * self.df(REEB, REEB, j).rho(1),
            (R, B, H) => {
                self.c(&ih * &self.h(j, k))
                    + (&ih * &self.h(j, k)) * self.f(REEB, REEB)
                    + half.clone() * (self.df(REEB, k, j) - self.df(REEB, j, k)).rho(1)
                    + half
                        * (self.df(j, k, REEB)
                            + self.sum_f(ahols, |g| self.am(j, g), k)
                            + self.sum_f(hols, |g| self.am(k, g), j))
                        .rho(2)
            }
            (R, H, H) => {
                self.c(self.al(j, k)).rho(2)
                    + half.clone()
                        * (self.df(REEB, k, j) - self.df(REEB, j, k)
                            - self.sum_f(ahols.clone(), |g| self.nm(j, k, g), REEB))
                        .rho(1)
                    + half
                        * (self.df(j, k, REEB)
                            + self.sum_f(ahols.clone(), |g| self.am(j, g), k)
                            + self.sum_f(ahols, |g| self.am(k, g), j))
                        .rho(2)
            }

            (H, F, R) => -self.f(REEB, i).half_euler(3),
            (H, R, R) => {
                half * self.df(REEB, REEB, i).rho(1) - self.sum_f(ahols, |b| self.am(i, b), REEB).rho(2)
            }
            (H, B, R) => {
                self.c(&ih * &self.h(i, k))
                    + (&ih * &self.h(i, k)) * self.f(REEB, REEB)
                    + half.clone() * (self.df(REEB, k, i) - self.df(REEB, i, k)).rho(1)
                    + half
                        * (self.df(i, k, REEB) - self.sum_f(ahols, |g| self.am(i, g), k)
                            + self.sum_f(hols, |g| self.am(k, g), i))
                        .rho(2)
            }
            (H, H, R) => {
                half.clone()
                    * (self.df(REEB, k, i) - self.df(REEB, i, k)
                        - self.sum_f(ahols.clone(), |g| self.nm(i, k, g), REEB))
                    .rho(1)
                    + half
                        * (self.df(i, k, REEB) - self.sum_f(ahols.clone(), |g| self.am(i, g), k)
                            + self.sum_f(ahols, |g| self.am(k, g), i))
                        .rho(2)
            }
            (H, F, B) => self.c(self.h(i, j)) - self.f(i, j).half_euler(2),
            (H, R, B) => {
                self.c(&ih * &self.h(i, j))
                    + (&ih * &self.h(i, j)) * self.f(REEB, REEB)
                    + half.clone() * (self.df(REEB, j, i) + self.df(REEB, i, j)).rho(1)
                    - half
                        * (self.df(i, j, REEB)
                            + self.sum_f(ahols, |g| self.am(i, g), j)
                            + self.sum_f(hols, |g| self.am(j, g), i))
                        .rho(2)
            }
            (H, B, B) => {
                (&ih * &self.h(i, k)) * self.f(REEB, j)
                    + (&ih * &self.h(i, j)) * self.f(REEB, k)
                    + half
                        * (self.df(j, k, i) + self.df(i, k, j) - self.df(i, j, k)
                            - self.sum_f(hols, |s| self.nm(j, k, s), i))
                        .rho(1)
            }
            (H, H, B) => {
                -((&ih * &self.h(k, j)) * self.f(REEB, i)) + (&ih * &self.h(i, j)) * self.f(REEB, k)
                    + half
                        * (self.df(k, j, i) + self.df(i, k, j) - self.df(i, j, k)
                            - self.sum_f(ahols, |s| self.nm(i, k, s), j))
                        .rho(1)
            }
            (H, F, H) => -self.f(i, j).half_euler(2),
            (H, R, H) => {
                -self.c(self.al(i, j)).rho(2)
                    // D_{α0β} − D_{β0α} = Θ̄_{αβ0} fixes the sign of the N term.
                    + half.clone()
                        * (self.df(REEB, j, i) + self.df(REEB, i, j)
                            - self.sum_f(ahols.clone(), |g| self.nm(i, j, g), REEB))
                        .rho(1)
                    - half
                        * (self.df(i, j, REEB)
                            + self.sum_f(ahols.clone(), |g| self.am(i, g), j)
                            + self.sum_f(ahols, |g| self.am(j, g), i))
                        .rho(2)
            }
            (H, B, H) => {
                (&ih * &self.h(i, k)) * self.f(REEB, j)
                    + (&ih * &self.h(j, k)) * self.f(REEB, i)
                    + half
                        * (self.df(j, k, i) + self.df(i, k, j) - self.df(i, j, k)
                            - self.sum_f(ahols, |s| self.nm(i, j, s), k))
                        .rho(1)
            }
            (H, H, H) => {
                -self.c(self.nl(i, k, j)).rho(1)
                    + half
                        * (self.df(j, k, i) + self.df(i, k, j) - self.df(i, j, k)
                            - self.sum_f(ahols.clone(), |s| self.nm(i, j, s), k)
                            - self.sum_f(ahols.clone(), |s| self.nm(i, k, s), j)
                            - self.sum_f(ahols, |s| self.nm(j, k, s), i))
                        .rho(1)
            }
            other => unreachable!("non-canonical index pattern {other:?}"),
        }
    }
}

/// `D_{IKJ}` transcribed row by row from closed-form component expressions,
/// as an oracle for [`christoffel`].
pub fn table1_reference(p: &PseudohermitianData, m: &ACHMetric) -> Result<RhoSeries> {
    let a = p.alphabet();
    let phi = m.phi.series().truncate(m.trunc());
    let dphi = phi.map_coeffs(|t| tw_derivative(&p.gamma, t, &[false, false]));
    let rows = TableRows { p, a, phi: &phi, dphi, am: p.a_mixed() };
    let trunc = m.trunc();
    let mut out = RhoSeries::zero(a, &[ALL, ALL, ALL], trunc);
    for i in 0..a.size() {
        for k in 0..a.size() {
            for j in 0..a.size() {
                let s = rows.entry(i, k, j).0;
                for d in 0..s.len().min(trunc) {
                    let v = s.value_at(d);
                    if !v.is_zero() {
                        out.add_entry(d, &[i, k, j], &v);
                    }
                }
            }
        }
    }
    Ok(out)
}
