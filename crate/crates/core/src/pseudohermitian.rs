//! Tanaka–Webster connection, torsion, Nijenhuis tensor and curvature of a
//! left-invariant pseudohermitian structure.
//!
//! Conventions: `∇_{Z_a} Z_b = Γ_{ab}^c Z_c`; forms are evaluated with
//! `(ω∧η)(X,Y) = ω(X)η(Y) − ω(Y)η(X)`, and the exterior derivative of an
//! invariant 1-form is `dα(X,Y) = −α([X,Y])`.

use std::collections::HashMap;

use crate::algebra::CRFrameAlgebra;
use crate::error::{Error, Result};
use crate::index::{Alphabet, IndexKind, Kinds, REEB};
use crate::linalg::{solve_sparse_unique, Matrix, SparseRow};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{einsum, InvariantTensor, Pairing};

const HOL: Kinds = Kinds::HOL;
const AHOL: Kinds = Kinds::ANTIHOL;

/// All invariants of a pseudohermitian structure, as constant tensors.
#[derive(Clone, Debug)]
pub struct PseudohermitianData {
    pub alg: CRFrameAlgebra,
    pub h: Matrix,
    pub levi: Pairing,
    pub levi_inv: Pairing,
    /// `Γ_{ab}^c` with `a ∈ {0, α, ᾱ}` and `b, c` of the same holomorphic type.
    pub gamma: InvariantTensor,
    /// `Θ_{ab}^c = Γ_{ab}^c − Γ_{ba}^c − c_{ab}^c` over the boundary indices.
    pub torsion: InvariantTensor,
    /// `A_{αβ}` and its conjugate `A_{ᾱβ̄}` in one tensor over `H × H`.
    pub a: InvariantTensor,
    /// `N_{αβγ}` and its conjugate `N_{ᾱβ̄γ̄}` over `H × H × H`.
    pub nij: InvariantTensor,
    /// `N_{αβ}^γ̄` and its conjugate.
    pub nij_mixed: InvariantTensor,
    /// `Rm[x][y][b][c]`: `R(e_x, e_y) e_b = Rm[x][y][b][c] e_c`.
    pub curv: InvariantTensor,
    /// `Π_{bc̄}(e_x, e_y)` as `[b][c][x][y]`, both types of `b`.
    pub pi_lower: InvariantTensor,
    /// `R_{αβ̄στ̄}`
    pub r4: InvariantTensor,
    /// `W_{αβ̄γ}`
    pub w_hol: InvariantTensor,
    /// `W_{αβ̄γ̄}`
    pub w_ahol: InvariantTensor,
    /// `V_{αβ̄στ}`
    pub v_hol: InvariantTensor,
    /// `V_{αβ̄σ̄τ̄}`
    pub v_ahol: InvariantTensor,
    /// `R_{αβ̄}` together with its transpose `R_{β̄α}`, over `H × H`.
    pub ricci: InvariantTensor,
    pub scalar_curvature: Scalar,
}

#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
enum Unknown {
    Gamma(usize, usize, usize),
    A(usize, usize),
    N(usize, usize, usize),
}

fn same_type(a: Alphabet, x: usize, y: usize) -> bool {
    let k = a.kind(x);
    k == a.kind(y) && matches!(k, IndexKind::Hol | IndexKind::AntiHol)
}

fn opposite_type(a: Alphabet, x: usize, y: usize) -> bool {
    matches!(
        (a.kind(x), a.kind(y)),
        (IndexKind::Hol, IndexKind::AntiHol) | (IndexKind::AntiHol, IndexKind::Hol)
    )
}

/// Connection, torsion `A` (as `A_b̄^c`, opposite types) and `N_{pq}^z`
/// obtained by exact elimination on the first structure equation together
/// with metric compatibility.
pub struct ConnectionSolution {
    pub gamma: InvariantTensor,
    /// `A_b^c` for `b, c` of opposite types: `A_β̄^γ` and `A_β^γ̄`.
    pub a_mixed: InvariantTensor,
    /// `N_{pq}^z` with `p, q` of the type opposite to `z`.
    pub n_mixed: InvariantTensor,
}

/// Solves the structure equations by sparse Gaussian elimination.
pub fn solve_connection(alg: &CRFrameAlgebra, h: &Matrix) -> Result<ConnectionSolution> {
    let a = alg.alphabet();
    let bnd: Vec<usize> = a.boundary().collect();
    let hor: Vec<usize> = a.hols().chain(a.antihols()).collect();
    let mut ids: HashMap<Unknown, usize> = HashMap::new();
    let mut order: Vec<Unknown> = Vec::new();
    let var = |u: Unknown, ids: &mut HashMap<Unknown, usize>, order: &mut Vec<Unknown>| {
        if let std::collections::hash_map::Entry::Vacant(e) = ids.entry(u) {
            e.insert(order.len());
            order.push(u);
        }
    };
    for &x in &bnd {
        for &b in &hor {
            for &c in &hor {
                if same_type(a, b, c) {
                    var(Unknown::Gamma(x, b, c), &mut ids, &mut order);
                }
            }
        }
    }
    for &b in &hor {
        for &c in &hor {
            if opposite_type(a, b, c) {
                var(Unknown::A(b, c), &mut ids, &mut order);
                for &q in &hor {
                    if same_type(a, b, q) {
                        var(Unknown::N(b, q, c), &mut ids, &mut order);
                    }
                }
            }
        }
    }
    let lev = |p: usize, q: usize| -> Scalar {
        // h_{pq̄} for p holomorphic, q antiholomorphic (either order).
        if a.kind(p) == IndexKind::Hol {
            h[(p - 2, q - 2 - a.n)].clone()
        } else {
            h[(q - 2, p - 2 - a.n)].clone()
        }
    };
    let half = Scalar::frac(1, 2);
    let one = Scalar::one();
    let mut rows = Vec::new();
    // First structure equation and its conjugate, on every pair x < y.
    for (i, &x) in bnd.iter().enumerate() {
        for &y in &bnd[i + 1..] {
            for &z in &hor {
                let mut r = SparseRow { rhs: -alg.c(x, y, z).clone(), ..Default::default() };
                if same_type(a, x, z) {
                    r.add_term(ids[&Unknown::Gamma(y, x, z)], &one);
                }
                if same_type(a, y, z) {
                    r.add_term(ids[&Unknown::Gamma(x, y, z)], &-one.clone());
                }
                if opposite_type(a, x, z) && y == REEB {
                    r.add_term(ids[&Unknown::A(x, z)], &-one.clone());
                }
                if opposite_type(a, y, z) && x == REEB {
                    r.add_term(ids[&Unknown::A(y, z)], &one);
                }
                if opposite_type(a, x, z) && opposite_type(a, y, z) {
                    r.add_term(ids[&Unknown::N(x, y, z)], &-half.clone());
                    r.add_term(ids[&Unknown::N(y, x, z)], &half);
                }
                rows.push(r);
            }
        }
    }
    // N is antisymmetric in its lower pair.
    for &p in &hor {
        for &q in &hor {
            for &z in &hor {
                if same_type(a, p, q) && opposite_type(a, p, z) && p <= q {
                    let mut r = SparseRow::default();
                    r.add_term(ids[&Unknown::N(p, q, z)], &one);
                    r.add_term(ids[&Unknown::N(q, p, z)], &one);
                    rows.push(r);
                }
            }
        }
    }
    // Metric compatibility: Γ_{aα}^γ h_{γβ̄} + Γ_{aβ̄}^γ̄ h_{αγ̄} = 0.
    for &x in &bnd {
        for al in a.hols() {
            for be in a.antihols() {
                let mut r = SparseRow::default();
                for ga in a.hols() {
                    r.add_term(ids[&Unknown::Gamma(x, al, ga)], &lev(ga, be));
                }
                for gb in a.antihols() {
                    r.add_term(ids[&Unknown::Gamma(x, be, gb)], &lev(al, gb));
                }
                rows.push(r);
            }
        }
    }
    let sol = solve_sparse_unique(order.len(), rows)?;
    let mut gamma = InvariantTensor::zeros(a, &[Kinds::M, Kinds::H, Kinds::H]);
    let mut a_mixed = InvariantTensor::zeros(a, &[Kinds::H, Kinds::H]);
    let mut n_mixed = InvariantTensor::zeros(a, &[Kinds::H, Kinds::H, Kinds::H]);
    for (u, v) in order.iter().zip(sol) {
        if v.is_zero() {
            continue;
        }
        match *u {
            Unknown::Gamma(x, b, c) => gamma.set(&[x, b, c], v),
            Unknown::A(b, c) => a_mixed.set(&[b, c], v),
            Unknown::N(p, q, z) => n_mixed.set(&[p, q, z], v),
        }
    }
    Ok(ConnectionSolution { gamma, a_mixed, n_mixed })
}

/// The same connection from closed-form bracket expressions; an independent
/// route used to cross-check [`solve_connection`].
pub fn connection_from_brackets(alg: &CRFrameAlgebra, h: &Matrix) -> Result<ConnectionSolution> {
    let a = alg.alphabet();
    let n = a.n;
    let hinv = h.transpose().inverse().ok_or(Error::DegenerateLeviForm)?;
    let mut gamma = InvariantTensor::zeros(a, &[Kinds::M, Kinds::H, Kinds::H]);
    let mut a_mixed = InvariantTensor::zeros(a, &[Kinds::H, Kinds::H]);
    let mut n_mixed = InvariantTensor::zeros(a, &[Kinds::H, Kinds::H, Kinds::H]);
    for al in a.hols() {
        for ga in a.hols() {
            // Γ_{0α}^γ = c_{0α}^γ
            gamma.set(&[REEB, al, ga], alg.c(REEB, al, ga).clone());
            for be in a.antihols() {
                // Γ_{β̄α}^γ = −c_{αβ̄}^γ
                gamma.set(&[be, al, ga], -alg.c(al, be, ga).clone());
            }
        }
        for bb in a.antihols() {
            // A_β̄^γ = c_{β̄0}^γ
            a_mixed.set(&[bb, al], alg.c(bb, REEB, al).clone());
            for cb in a.antihols() {
                // N_{ᾱβ̄}^γ = c_{ᾱβ̄}^γ
                n_mixed.set(&[bb, cb, al], alg.c(bb, cb, al).clone());
            }
        }
    }
    // Γ_{σα}^γ h_{γβ̄} = c_{β̄σ}^γ̄ h_{αγ̄}, solved with h^{-1}.
    for s in 0..n {
        for al in 0..n {
            for ga in 0..n {
                let mut v = Scalar::zero();
                for be in 0..n {
                    let mut rhs = Scalar::zero();
                    for gb in 0..n {
                        rhs += alg.c(a.antihol(be), a.hol(s), a.antihol(gb)) * &h[(al, gb)];
                    }
                    // h^{γβ̄} = hinv[γ][β]
                    v += &rhs * &hinv[(ga, be)];
                }
                gamma.set(&[a.hol(s), a.hol(al), a.hol(ga)], v);
            }
        }
    }
    // Conjugate components.
    let g_conj = gamma.conj();
    let a_conj = a_mixed.conj();
    let n_conj = n_mixed.conj();
    Ok(ConnectionSolution {
        gamma: gamma.try_add(&g_conj.restrict(&[Kinds::M, Kinds::H, Kinds::H]))?,
        a_mixed: a_mixed.try_add(&a_conj)?,
        n_mixed: n_mixed.try_add(&n_conj)?,
    })
}

/// `∇S` for an invariant tensor whose slots lie in `{0, α, ᾱ}`; `upper[s]`
/// marks contravariant slots. The derivative index is appended last.
pub fn covariant_derivative_mixed(gamma: &InvariantTensor, s: &InvariantTensor, upper: &[bool]) -> Result<InvariantTensor> {
    if s.kinds().iter().any(|k| k.contains(Kinds::INF)) {
        return Err(Error::KindMismatch("covariant derivative of a tensor with a transverse slot".into()));
    }
    Ok(tw_derivative(gamma, s, upper))
}

/// As [`covariant_derivative_mixed`], with `∞` slots treated as inert.
pub(crate) fn tw_derivative(gamma: &InvariantTensor, s: &InvariantTensor, upper: &[bool]) -> InvariantTensor {
    let a = s.alphabet();
    let mut kinds = s.kinds().to_vec();
    kinds.push(Kinds::M);
    let mut out = InvariantTensor::zeros(a, &kinds);
    let bnd: Vec<usize> = a.boundary().collect();
    for (idx, v) in s.nonzero() {
        for (slot, &i) in idx.iter().enumerate() {
            for &x in &bnd {
                if upper[slot] {
                    // (∇_x S)^{..j..} += Γ_{x i}^{j} S^{..i..}
                    for j in a.indices(kinds[slot]) {
                        let g = gamma.get(&[x, i, j]);
                        if !g.is_zero() {
                            let mut o = idx.clone();
                            o[slot] = j;
                            o.push(x);
                            out.add_at(&o, &(g * v));
                        }
                    }
                } else {
                    // (∇_x S)_{..j..} −= Γ_{x j}^{i} S_{..i..}
                    for j in a.indices(kinds[slot]) {
                        let g = gamma.get(&[x, j, i]);
                        if !g.is_zero() {
                            let mut o = idx.clone();
                            o[slot] = j;
                            o.push(x);
                            out.add_at(&o, &-(g * v));
                        }
                    }
                }
            }
        }
    }
    out
}

impl PseudohermitianData {
    /// Validates the algebra and computes every invariant.
    pub fn new(alg: &CRFrameAlgebra) -> Result<Self> {
        alg.ensure_valid()?;
        let a = alg.alphabet();
        let h = alg.levi_form()?;
        let levi = Pairing::levi(a, &h);
        let levi_inv = Pairing::inverse_levi(a, &h)?;
        let sol = solve_connection(alg, &h)?;
        let gamma = sol.gamma;

        let c = alg.constants();
        let torsion = einsum("abc->abc", &[&gamma])
            .try_sub(&einsum("bac->abc", &[&gamma]))?
            .restrict(&[Kinds::M, Kinds::M, Kinds::M])
            .try_sub(c)?;
        check_torsion(alg, &torsion, &sol.a_mixed, &sol.n_mixed)?;

        // A_{αβ} = A_α^γ̄ h_{βγ̄}; N_{αβγ} = N_{αβ}^σ̄ h_{γσ̄}.
        let a_low = sol.a_mixed.pair_slot(1, &levi)?;
        let nij = sol.n_mixed.pair_slot(2, &levi)?;

        // R(e_x,e_y)e_b = (Γ_{yb}^d Γ_{xd}^c − Γ_{xb}^d Γ_{yd}^c − c_{xy}^z Γ_{zb}^c) e_c
        let t1 = einsum("ybd,xdc->xybc", &[&gamma, &gamma]);
        let t2 = einsum("xbd,ydc->xybc", &[&gamma, &gamma]);
        let t3 = einsum("xyz,zbc->xybc", &[c, &gamma]);
        let curv = t1.try_sub(&t2)?.try_sub(&t3)?;
        // Π_{bc̄}(x,y) = Rm[x][y][b][d] L_{dc}, as [b][c][x][y].
        let pi_lower = einsum("xybd,dc->bcxy", &[&curv, &levi.tensor]);

        let r4 = pi_lower.restrict(&[HOL, AHOL, HOL, AHOL]);
        let w_hol = einsum("bcxy->bcx", &[&pi_lower.restrict(&[HOL, AHOL, HOL, Kinds::REEB])]);
        let w_ahol = einsum("bcxy->bcx", &[&pi_lower.restrict(&[HOL, AHOL, AHOL, Kinds::REEB])]);
        let half = Scalar::frac(1, 2);
        let v_hol = pi_lower.restrict(&[HOL, AHOL, HOL, HOL]).scale(&half);
        let v_ahol = pi_lower.restrict(&[HOL, AHOL, AHOL, AHOL]).scale(&half);

        // R_{αβ̄} = h^{γσ̄} R_{γσ̄αβ̄}
        let ric = einsum("gsab,gs->ab", &[&r4, &levi_inv.tensor]);
        let ricci = ric.try_add(&ric.permute(&[1, 0]))?;
        let scalar_curvature = einsum("ab,ab->", &[&ric, &levi_inv.tensor]).value().clone();

        Ok(PseudohermitianData {
            alg: alg.clone(),
            h,
            levi,
            levi_inv,
            gamma,
            torsion,
            a: a_low,
            nij,
            nij_mixed: sol.n_mixed,
            curv,
            pi_lower,
            r4,
            w_hol,
            w_ahol,
            v_hol,
            v_ahol,
            ricci,
            scalar_curvature,
        })
    }

    pub fn n(&self) -> usize {
        self.alg.n
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alg.alphabet()
    }

    /// `∇S` with all slots covariant.
    pub fn covariant_derivative(&self, s: &InvariantTensor) -> Result<InvariantTensor> {
        covariant_derivative_mixed(&self.gamma, s, &vec![false; s.rank()])
    }

    /// `A_{αβ}` alone.
    pub fn a_hol(&self) -> InvariantTensor {
        self.a.restrict(&[HOL, HOL])
    }

    /// `A_α^β̄ = Θ_{0α}^β̄` together with its conjugate, over `H × H`.
    pub fn a_mixed(&self) -> InvariantTensor {
        self.a.pair_slot(1, &self.levi_inv).expect("horizontal slot")
    }

    /// `N_{αβγ}` alone.
    pub fn n_hol(&self) -> InvariantTensor {
        self.nij.restrict(&[HOL, HOL, HOL])
    }

    /// `R_{αβ̄}` alone.
    pub fn ricci_hol(&self) -> InvariantTensor {
        self.ricci.restrict(&[HOL, AHOL])
    }

    /// The Levi form as a tensor `h_{αβ̄}`.
    pub fn h_tensor(&self) -> InvariantTensor {
        self.levi.tensor.restrict(&[HOL, AHOL])
    }

    /// Raises every slot listed in `slots`.
    pub fn raise(&self, t: &InvariantTensor, slots: &[usize]) -> InvariantTensor {
        slots.iter().fold(t.clone(), |acc, &s| acc.pair_slot(s, &self.levi_inv).expect("horizontal slot"))
    }

    /// The invariants for `θ̂ = λθ`, derived from the transformation rules at
    /// constant conformal factor (frame `T̂ = T/λ`, same `Z_α`).
    pub fn constant_rescale(&self, lambda: &Rational) -> Result<Self> {
        let alg = self.alg.rescale(lambda)?;
        let a = self.alphabet();
        let lam = Scalar::from_rational(lambda.clone());
        let inv = lam.inv()?;
        // Each frame slot holding T in a lower position contributes 1/λ,
        // each upper T contributes λ.
        let by_reeb = |t: &InvariantTensor, lower: &[usize], upper: &[usize]| -> InvariantTensor {
            let mut out = InvariantTensor::zeros(a, t.kinds());
            for (idx, v) in t.nonzero() {
                let mut f = Scalar::one();
                for &s in lower {
                    if idx[s] == REEB {
                        f = &f * &inv;
                    }
                }
                for &s in upper {
                    if idx[s] == REEB {
                        f = &f * &lam;
                    }
                }
                out.set(&idx, v * &f);
            }
            out
        };
        let h = Matrix::from_fn(a.n, a.n, |i, j| &self.h[(i, j)] * &lam);
        let levi = Pairing::levi(a, &h);
        let levi_inv = Pairing::inverse_levi(a, &h)?;
        let pi_lower = by_reeb(&self.pi_lower, &[2, 3], &[]).scale(&lam);
        Ok(PseudohermitianData {
            alg,
            h,
            levi,
            levi_inv,
            gamma: by_reeb(&self.gamma, &[0], &[]),
            torsion: by_reeb(&self.torsion, &[0, 1], &[2]),
            a: self.a.clone(),
            nij: self.nij.scale(&lam),
            nij_mixed: self.nij_mixed.clone(),
            curv: by_reeb(&self.curv, &[0, 1], &[]),
            pi_lower,
            r4: self.r4.scale(&lam),
            w_hol: self.w_hol.clone(),
            w_ahol: self.w_ahol.clone(),
            v_hol: self.v_hol.scale(&lam),
            v_ahol: self.v_ahol.scale(&lam),
            ricci: self.ricci.clone(),
            scalar_curvature: &self.scalar_curvature * &inv,
        })
    }

    /// Structure constants with horizontal targets rebuilt from `(Γ, A, N)`
    /// through the first structure equation; equal to the input constants.
    pub fn reconstructed_brackets(&self) -> InvariantTensor {
        let a = self.alphabet();
        let am = self.a_mixed();
        let mut c = InvariantTensor::zeros(a, &[Kinds::M, Kinds::M, Kinds::M]);
        let bnd: Vec<usize> = a.boundary().collect();
        let hor: Vec<usize> = a.hols().chain(a.antihols()).collect();
        let half = Scalar::frac(1, 2);
        for &x in &bnd {
            for &y in &bnd {
                if x == y {
                    continue;
                }
                for &z in &hor {
                    let mut v = Scalar::zero();
                    if same_type(a, x, z) {
                        v += self.gamma.get(&[y, x, z]);
                    }
                    if same_type(a, y, z) {
                        v -= self.gamma.get(&[x, y, z]);
                    }
                    // A_b^c with b of the type opposite to c; the stored A_α^β̄ pairs give both.
                    if opposite_type(a, x, z) && y == REEB {
                        v -= am.get(&[x, z]);
                    }
                    if opposite_type(a, y, z) && x == REEB {
                        v += am.get(&[y, z]);
                    }
                    if opposite_type(a, x, z) && opposite_type(a, y, z) {
                        let nn = self.nij_mixed.get(&[x, y, z]) - self.nij_mixed.get(&[y, x, z]);
                        v -= &(&half * &nn);
                    }
                    if !v.is_zero() {
                        c.set(&[x, y, z], -v);
                    }
                }
            }
        }
        c
    }
}

fn check_torsion(alg: &CRFrameAlgebra, torsion: &InvariantTensor, a_mixed: &InvariantTensor, n_mixed: &InvariantTensor) -> Result<()> {
    let a = alg.alphabet();
    let bad = |what: String| Err(Error::InconsistentStructureEquation(what));
    for x in a.boundary() {
        for y in a.boundary() {
            for z in a.boundary() {
                let t = torsion.get(&[x, y, z]);
                let expect = if z == REEB {
                    // Θ^0 = dθ-part: −c_{xy}^0
                    -alg.c(x, y, z).clone()
                } else if x == REEB && opposite_type(a, y, z) {
                    // Θ_{0α}^β̄ = A_α^β̄
                    a_mixed.get(&[y, z]).clone()
                } else if y == REEB && opposite_type(a, x, z) {
                    -a_mixed.get(&[x, z]).clone()
                } else if opposite_type(a, x, z) && opposite_type(a, y, z) {
                    -n_mixed.get(&[x, y, z]).clone()
                } else {
                    Scalar::zero()
                };
                if *t != expect {
                    return bad(format!(
                        "torsion component ({},{})^{} is {t}, expected {expect}",
                        a.label(x),
                        a.label(y),
                        a.label(z)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// One exact identity with its residual tensor.
#[derive(Clone, Debug)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: InvariantTensor,
}

impl IdentityResidual {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Residuals of the torsion, Nijenhuis, curvature-symmetry, W/V and Ricci identities.
pub fn identity_residuals(p: &PseudohermitianData) -> Result<Vec<IdentityResidual>> {
    let a_hol = p.a_hol();
    let n = p.n_hol();
    let half = Scalar::frac(1, 2);
    let mut out = Vec::new();
    let mut push = |name, residual| out.push(IdentityResidual { name, residual });

    push("torsion_symmetry", a_hol.try_sub(&a_hol.permute(&[1, 0]))?);
    push("nijenhuis_antisymmetry", n.try_add(&n.permute(&[1, 0, 2]))?);
    let cyc = n.try_add(&einsum("bca->abc", &[&n]))?.try_add(&einsum("cab->abc", &[&n]))?;
    push("nijenhuis_cyclic", cyc);

    // Π_{β̄α}(x,y) with the conjugate-type frame slot first.
    let pi = &p.pi_lower;
    // R_{αβ̄στ̄} − R_{β̄ατ̄σ}
    // R_{β̄ατ̄σ} = Π_{β̄α}(Z_τ̄, Z_σ)
    let r_bar = einsum("bats->abst", &[&pi.restrict(&[AHOL, HOL, AHOL, HOL])]);
    push("curvature_hermitian_symmetry", p.r4.try_sub(&r_bar)?);
    let w_bar = einsum("bacx->abc", &[&pi.restrict(&[AHOL, HOL, AHOL, Kinds::REEB])]);
    push("w_antisymmetry", p.w_ahol.try_add(&w_bar)?);
    let v_bar = pi.restrict(&[AHOL, HOL, HOL, HOL]).permute(&[1, 0, 2, 3]).scale(&half);
    push("v_antisymmetry", p.v_hol.try_add(&v_bar)?);

    // R_{αβ̄στ̄} − R_{σβ̄ατ̄} = −N_{ασ}^γ̄ N_{τ̄γ̄β̄}
    let nm = p.nij_mixed.restrict(&[HOL, HOL, AHOL]);
    let nbar = p.nij.restrict(&[AHOL, AHOL, AHOL]);
    let lhs = p.r4.try_sub(&p.r4.permute(&[2, 1, 0, 3]))?;
    let rhs = einsum("asg,tgb->abst", &[&nm, &nbar]).neg();
    push("curvature_asymmetry", lhs.try_sub(&rhs)?);

    // W_{αβ̄γ} = A_{αγ,β̄} − N_{γσα} A_β̄^σ
    let da = p.covariant_derivative(&a_hol)?;
    let a_bar_up = p.a.restrict(&[AHOL, AHOL]).pair_slot(1, &p.levi_inv)?;
    let w_rhs = einsum("agb->abg", &[&da.restrict(&[HOL, HOL, AHOL])])
        .try_sub(&einsum("gsa,bs->abg", &[&n, &a_bar_up]))?;
    push("w_formula", p.w_hol.try_sub(&w_rhs)?);

    // V_{αβ̄στ} = (i/2)(h_{σβ̄}A_{ατ} − h_{τβ̄}A_{ασ}) + ½N_{στα,β̄}
    let h = p.h_tensor();
    let i2 = Scalar::i().scale(&crate::scalar::rat(1, 2));
    let hv = einsum("sb,at->abst", &[&h, &a_hol]).try_sub(&einsum("tb,as->abst", &[&h, &a_hol]))?.scale(&i2);
    let dn = p.covariant_derivative(&n)?;
    let v_rhs = hv.try_add(&einsum("stab->abst", &[&dn.restrict(&[HOL, HOL, HOL, AHOL])]).scale(&half))?;
    push("v_formula", p.v_hol.try_sub(&v_rhs)?);

    // R_α^γ_{γβ̄} = R_{αβ̄} − N_{αστ} N_β̄^{τσ}
    let lhs = einsum("asgb,gs->ab", &[&p.r4, &p.levi_inv.tensor]);
    let nbar_up = p.raise(&nbar, &[1, 2]);
    let rhs = p.ricci_hol().try_sub(&einsum("ast,bts->ab", &[&n, &nbar_up]))?;
    push("ricci_anomaly", lhs.try_sub(&rhs)?);

    // ∇h = 0
    push("metric_compatibility", p.covariant_derivative(&h)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{deformed_heisenberg, heisenberg, su2, su2_aff, twisted};
    use crate::scalar::rat;

    fn all_hold(p: &PseudohermitianData) {
        for r in identity_residuals(p).unwrap() {
            assert!(r.holds(), "{} fails: {:?}", r.name, r.residual);
        }
    }

    #[test]
    fn heisenberg_is_flat() {
        for n in 1..=3 {
            let p = PseudohermitianData::new(&heisenberg(n).unwrap()).unwrap();
            assert!(p.gamma.is_zero());
            assert!(p.a.is_zero());
            assert!(p.nij.is_zero());
            assert!(p.curv.is_zero());
            all_hold(&p);
        }
    }

    #[test]
    fn su2_connection_and_curvature() {
        let p = PseudohermitianData::new(&su2()).unwrap();
        let a = p.alphabet();
        let (z, zb) = (a.hol(0), a.antihol(0));
        assert_eq!(p.gamma.get(&[REEB, z, z]), &Scalar::from_int(-2).mul_i());
        assert_eq!(p.gamma.get(&[z, z, z]), &Scalar::zero());
        assert_eq!(p.gamma.get(&[zb, z, z]), &Scalar::zero());
        assert!(p.a.is_zero());
        assert!(p.nij.is_zero());
        assert_eq!(p.r4.get(&[z, zb, z, zb]), &Scalar::from_int(2));
        assert_eq!(p.ricci.get(&[z, zb]), &Scalar::from_int(2));
        assert_eq!(p.scalar_curvature, Scalar::from_int(2));
        all_hold(&p);
    }

    #[test]
    fn both_connection_routes_agree() {
        let algs = [heisenberg(2).unwrap(), su2(), su2_aff(), twisted(&Scalar::one()).unwrap(), twisted(&Scalar::i()).unwrap(), deformed_heisenberg(2).unwrap()];
        for alg in &algs {
            let h = alg.levi_form().unwrap();
            let x = solve_connection(alg, &h).unwrap();
            let y = connection_from_brackets(alg, &h).unwrap();
            assert!(x.gamma.same_values(&y.gamma), "{alg:?}");
            assert!(x.a_mixed.same_values(&y.a_mixed));
            assert!(x.n_mixed.same_values(&y.n_mixed));
        }
    }

    #[test]
    fn identities_hold_on_nonflat_examples() {
        for alg in [su2_aff(), twisted(&Scalar::one()).unwrap(), twisted(&Scalar::frac(1, 2)).unwrap(), twisted(&Scalar::i()).unwrap(), deformed_heisenberg(2).unwrap()] {
            let p = PseudohermitianData::new(&alg).unwrap();
            all_hold(&p);
        }
    }

    #[test]
    fn twisted_family_has_nonzero_nijenhuis_tensor() {
        let p = PseudohermitianData::new(&twisted(&Scalar::one()).unwrap()).unwrap();
        assert!(!p.n_hol().is_zero());
    }

    #[test]
    fn structure_equation_reproduces_brackets() {
        for alg in [su2(), su2_aff(), twisted(&Scalar::i()).unwrap()] {
            let p = PseudohermitianData::new(&alg).unwrap();
            let rebuilt = p.reconstructed_brackets();
            let horizontal = alg.constants().restrict(&[Kinds::M, Kinds::M, Kinds::H]);
            assert!(rebuilt.same_values(&horizontal));
        }
    }

    #[test]
    fn constant_rescale_matches_recomputation() {
        for alg in [su2(), su2_aff(), twisted(&Scalar::one()).unwrap()] {
            for lam in [rat(4, 1), rat(9, 4), rat(1, 1)] {
                let p = PseudohermitianData::new(&alg).unwrap();
                let direct = PseudohermitianData::new(&alg.rescale(&lam).unwrap()).unwrap();
                let viaformula = p.constant_rescale(&lam).unwrap();
                assert_eq!(direct.h, viaformula.h);
                assert!(direct.gamma.same_values(&viaformula.gamma));
                assert!(direct.torsion.same_values(&viaformula.torsion));
                assert!(direct.a.same_values(&viaformula.a));
                assert!(direct.nij.same_values(&viaformula.nij));
                assert!(direct.curv.same_values(&viaformula.curv));
                assert!(direct.r4.same_values(&viaformula.r4));
                assert!(direct.w_hol.same_values(&viaformula.w_hol));
                assert!(direct.v_hol.same_values(&viaformula.v_hol));
                assert!(direct.ricci.same_values(&viaformula.ricci));
                assert_eq!(direct.scalar_curvature, viaformula.scalar_curvature);
            }
        }
    }

    #[test]
    fn su2_rescaled_by_four() {
        let p = PseudohermitianData::new(&su2().rescale(&rat(4, 1)).unwrap()).unwrap();
        let a = p.alphabet();
        assert_eq!(p.h[(0, 0)], Scalar::from_int(4));
        assert!(p.a.is_zero());
        assert_eq!(p.ricci.get(&[a.hol(0), a.antihol(0)]), &Scalar::from_int(2));
        assert_eq!(p.scalar_curvature, Scalar::frac(1, 2));
    }

    #[test]
    fn derivatives_of_invariant_scalar_vanish() {
        let p = PseudohermitianData::new(&su2_aff()).unwrap();
        let u = InvariantTensor::scalar(p.alphabet(), Scalar::from_int(3));
        assert!(p.covariant_derivative(&u).unwrap().is_zero());
    }

    #[test]
    fn transverse_slot_is_rejected() {
        let p = PseudohermitianData::new(&su2()).unwrap();
        let t = InvariantTensor::zeros(p.alphabet(), &[Kinds::ALL]);
        assert!(matches!(p.covariant_derivative(&t), Err(Error::KindMismatch(_))));
    }
}
