//! Left-invariant partially integrable CR structures given by the structure
//! constants of an adapted frame `{T, Z_α, Z_ᾱ}`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::index::{Alphabet, Kinds, REEB};
use crate::linalg::Matrix;
use crate::scalar::{rat, Rational, Scalar};
use crate::tensor::InvariantTensor;

/// Structure constants `[e_x, e_y] = c_{xy}^z e_z` over the boundary indices.
#[derive(Clone, PartialEq, Eq)]
pub struct CRFrameAlgebra {
    pub n: usize,
    c: InvariantTensor,
}

impl fmt::Debug for CRFrameAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CRFrameAlgebra").field("n", &self.n).field("c", &self.c).finish()
    }
}

/// One bracket entry as it appears in input documents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub c: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    fn push(&mut self, name: &'static str, witnesses: Vec<String>) {
        self.checks.push(CheckOutcome { name, passed: witnesses.is_empty(), witnesses });
    }
}

impl CRFrameAlgebra {
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.n)
    }

    pub fn constants(&self) -> &InvariantTensor {
        &self.c
    }

    pub fn c(&self, x: usize, y: usize, z: usize) -> &Scalar {
        self.c.get(&[x, y, z])
    }

    /// Builds the table from explicit brackets, filling in `[y,x] = −[x,y]` and,
    /// when `autocomplete` is set, the conjugate brackets. Contradictory input
    /// is rejected. The result is not validated.
    pub fn from_brackets(n: usize, brackets: &[Bracket], autocomplete: bool) -> Result<(Self, Vec<String>)> {
        if n == 0 {
            return Err(Error::BadParameter("CR dimension n must be at least 1".into()));
        }
        let a = Alphabet::new(n);
        let mut table: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        let mut notes = Vec::new();
        let name = |x: usize, y: usize, z: usize| format!("[{},{}]^{}", a.label(x), a.label(y), a.label(z));
        let put = |table: &mut BTreeMap<(usize, usize, usize), Scalar>, x: usize, y: usize, z: usize, v: Scalar| -> Result<bool> {
            if x == y {
                if v.is_zero() {
                    return Ok(false);
                }
                return Err(Error::InvalidAlgebra(format!("{} = {v} violates antisymmetry", name(x, y, z))));
            }
            let mut fresh = false;
            for (p, q, w) in [(x, y, v.clone()), (y, x, -v.clone())] {
                match table.get(&(p, q, z)) {
                    Some(old) if *old != w => {
                        return Err(Error::InvalidAlgebra(format!(
                            "conflicting values for {}: {old} and {w}",
                            name(p, q, z)
                        )))
                    }
                    Some(_) => {}
                    None => {
                        table.insert((p, q, z), w);
                        fresh = true;
                    }
                }
            }
            Ok(fresh)
        };
        for b in brackets {
            for (i, &ix) in [b.x, b.y, b.z].iter().enumerate() {
                if ix == 0 || ix >= a.size() {
                    return Err(Error::Parse(format!("label position {ix} (slot {i}) out of range")));
                }
            }
            put(&mut table, b.x, b.y, b.z, b.c.clone())?;
        }
        if autocomplete {
            let explicit: Vec<((usize, usize, usize), Scalar)> = table.iter().map(|(k, v)| (*k, v.clone())).collect();
            for ((x, y, z), v) in explicit {
                if put(&mut table, a.conj(x), a.conj(y), a.conj(z), v.conj())? {
                    notes.push(format!(
                        "auto-completed {} from {}",
                        name(a.conj(x), a.conj(y), a.conj(z)),
                        name(x, y, z)
                    ));
                }
            }
        }
        let mut c = InvariantTensor::zeros(a, &[Kinds::M, Kinds::M, Kinds::M]);
        for ((x, y, z), v) in table {
            c.set(&[x, y, z], v);
        }
        Ok((CRFrameAlgebra { n, c }, notes))
    }

    pub fn from_constants(n: usize, c: InvariantTensor) -> Self {
        CRFrameAlgebra { n, c }
    }

    /// Nonzero brackets with `x < y`, in index order.
    pub fn brackets(&self) -> Vec<Bracket> {
        self.c
            .nonzero()
            .filter(|(i, _)| i[0] < i[1])
            .map(|(i, v)| Bracket { x: i[0], y: i[1], z: i[2], c: v.clone() })
            .collect()
    }

    /// `[u, v]` for coordinate vectors over the boundary indices.
    pub fn bracket_vec(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let size = self.alphabet().size();
        let mut out = vec![Scalar::zero(); size];
        for (idx, c) in self.c.nonzero() {
            let (x, y, z) = (idx[0], idx[1], idx[2]);
            if u[x].is_zero() || v[y].is_zero() {
                continue;
            }
            out[z] += &(&u[x] * &v[y]) * c;
        }
        out
    }

    fn jacobiator(&self, x: usize, y: usize, z: usize) -> Vec<Scalar> {
        let size = self.alphabet().size();
        let e = |k: usize| {
            let mut v = vec![Scalar::zero(); size];
            v[k] = Scalar::one();
            v
        };
        let t1 = self.bracket_vec(&e(x), &self.bracket_vec(&e(y), &e(z)));
        let t2 = self.bracket_vec(&e(y), &self.bracket_vec(&e(z), &e(x)));
        let t3 = self.bracket_vec(&e(z), &self.bracket_vec(&e(x), &e(y)));
        (0..size).map(|k| &(&t1[k] + &t2[k]) + &t3[k]).collect()
    }

    /// Checks every structural requirement and reports witnesses for the failures.
    pub fn validate(&self) -> ValidationReport {
        let a = self.alphabet();
        let mut rep = ValidationReport::default();
        let lbl = |i: usize| a.label(i);
        let bnd: Vec<usize> = a.boundary().collect();

        let mut w = Vec::new();
        for &x in &bnd {
            for &y in &bnd {
                for &z in &bnd {
                    if *self.c(x, y, z) != -self.c(y, x, z) {
                        w.push(format!("[{},{}]^{} = {} but [{},{}]^{} = {}", lbl(x), lbl(y), lbl(z), self.c(x, y, z), lbl(y), lbl(x), lbl(z), self.c(y, x, z)));
                    }
                }
            }
        }
        rep.push("antisymmetry", w);

        let mut w = Vec::new();
        for (idx, v) in self.c.nonzero() {
            let (x, y, z) = (idx[0], idx[1], idx[2]);
            if x < y {
                let conj = self.c(a.conj(x), a.conj(y), a.conj(z));
                if *conj != v.conj() {
                    w.push(format!("[{},{}]^{} = {v} but [{},{}]^{} = {conj}", lbl(x), lbl(y), lbl(z), lbl(a.conj(x)), lbl(a.conj(y)), lbl(a.conj(z))));
                }
            }
        }
        rep.push("reality", w);

        let mut w = Vec::new();
        for (i, &x) in bnd.iter().enumerate() {
            for (j, &y) in bnd.iter().enumerate().skip(i + 1) {
                for &z in bnd.iter().skip(j + 1) {
                    let jac = self.jacobiator(x, y, z);
                    for (k, v) in jac.iter().enumerate() {
                        if !v.is_zero() {
                            w.push(format!("({},{},{}): {} component {v}", lbl(x), lbl(y), lbl(z), lbl(k)));
                        }
                    }
                }
            }
        }
        rep.push("jacobi", w);

        let mut w = Vec::new();
        for x in a.hols() {
            for y in a.hols() {
                if !self.c(x, y, REEB).is_zero() {
                    w.push(format!("[{},{}] has T-component {}", lbl(x), lbl(y), self.c(x, y, REEB)));
                }
            }
        }
        rep.push("partial_integrability", w);

        let mut w = Vec::new();
        for x in a.hols().chain(a.antihols()) {
            if !self.c(REEB, x, REEB).is_zero() {
                w.push(format!("[T,{}] has T-component {}", lbl(x), self.c(REEB, x, REEB)));
            }
        }
        rep.push("adaptedness", w);

        let w = match self.levi_form() {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        };
        rep.push("nondegeneracy", w);
        rep
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let rep = self.validate();
        if rep.passed() {
            return Ok(());
        }
        let msg: Vec<String> = rep
            .failures()
            .iter()
            .map(|c| format!("{}: {}", c.name, c.witnesses.first().cloned().unwrap_or_default()))
            .collect();
        Err(Error::InvalidAlgebra(msg.join("; ")))
    }

    /// The raw matrix `h[α][β] = h_{αβ̄} = i·c_{αβ̄}^0`, without the invertibility check.
    pub fn levi_matrix(&self) -> Matrix {
        let a = self.alphabet();
        Matrix::from_fn(self.n, self.n, |p, q| self.c(a.hol(p), a.antihol(q), REEB).mul_i())
    }

    /// The Levi form `h_{αβ̄}` read off from `dθ = i h_{αβ̄} θ^α∧θ^β̄`.
    pub fn levi_form(&self) -> Result<Matrix> {
        let h = self.levi_matrix();
        if h.det().is_zero() {
            return Err(Error::DegenerateLeviForm);
        }
        Ok(h)
    }

    /// Change of frame: new basis vector `e'_a = Σ_b p[a][b] e_b` over the
    /// boundary indices (row/column 0 of `p` are ignored).
    pub fn change_frame(&self, p: &Matrix) -> Result<Self> {
        let a = self.alphabet();
        let size = a.size();
        let bnd: Vec<usize> = a.boundary().collect();
        let k = bnd.len();
        let sub = Matrix::from_fn(k, k, |i, j| p[(bnd[i], bnd[j])].clone());
        let inv = sub.inverse().ok_or_else(|| Error::DegenerateDeformation("frame change is singular".into()))?;
        let row = |i: usize| -> Vec<Scalar> {
            let mut v = vec![Scalar::zero(); size];
            for (j, &b) in bnd.iter().enumerate() {
                v[b] = sub[(i, j)].clone();
            }
            v
        };
        let mut c = InvariantTensor::zeros(a, &[Kinds::M, Kinds::M, Kinds::M]);
        for (i, &x) in bnd.iter().enumerate() {
            for (j, &y) in bnd.iter().enumerate() {
                if x >= y {
                    continue;
                }
                let br = self.bracket_vec(&row(i), &row(j));
                // Express in the new basis: br = Σ_z coef_z e'_z, coef = br · inv.
                for (l, &z) in bnd.iter().enumerate() {
                    let mut v = Scalar::zero();
                    for (m, &b) in bnd.iter().enumerate() {
                        if !br[b].is_zero() && !inv[(m, l)].is_zero() {
                            v += &br[b] * &inv[(m, l)];
                        }
                    }
                    if !v.is_zero() {
                        c.set(&[x, y, z], v.clone());
                        c.set(&[y, x, z], -v);
                    }
                }
            }
        }
        Ok(CRFrameAlgebra { n: self.n, c })
    }

    /// The structure with `Ẑ_α = Z_α + μ_α^β̄ Z_β̄` and the same `T`.
    pub fn deform(&self, mu: &DeformationTensor) -> Result<Self> {
        let a = self.alphabet();
        let h = self.levi_form()?;
        let lowered = mu.lowered(&h);
        for p in 0..self.n {
            for q in p + 1..self.n {
                if lowered[(p, q)] != lowered[(q, p)] {
                    return Err(Error::AsymmetricMu(format!(
                        "mu_{}{} = {} but mu_{}{} = {}",
                        p + 1,
                        q + 1,
                        lowered[(p, q)],
                        q + 1,
                        p + 1,
                        lowered[(q, p)]
                    )));
                }
            }
        }
        let size = a.size();
        let mut frame = Matrix::identity(size);
        for p in 0..self.n {
            for q in 0..self.n {
                let m = &mu.entries[(p, q)];
                frame[(a.hol(p), a.antihol(q))] = m.clone();
                frame[(a.antihol(p), a.hol(q))] = m.conj();
            }
        }
        let out = self.change_frame(&frame)?;
        if out.levi_form().is_err() {
            return Err(Error::DegenerateDeformation("deformed Levi form is singular".into()));
        }
        let rep = out.validate();
        if !rep.passed() {
            return Err(Error::DegenerateDeformation(format!("deformed structure fails validation: {:?}", rep.failures())));
        }
        Ok(out)
    }

    /// `T → T/λ`, i.e. `θ → λθ`; the Levi form scales by `λ`.
    pub fn rescale(&self, lambda: &Rational) -> Result<Self> {
        if lambda <= &Rational::from_integer(0.into()) {
            return Err(Error::BadParameter(format!("rescale factor must be positive, got {lambda}")));
        }
        let mut c = InvariantTensor::zeros(self.alphabet(), &[Kinds::M, Kinds::M, Kinds::M]);
        for (idx, v) in self.c.nonzero() {
            let lower = idx[..2].iter().filter(|&&i| i == REEB).count() as i32;
            let upper = i32::from(idx[2] == REEB);
            let e = upper - lower;
            let mut f = Rational::from_integer(1.into());
            for _ in 0..e.unsigned_abs() {
                f = if e > 0 { f * lambda } else { f / lambda };
            }
            c.set(&idx, v.scale(&f));
        }
        Ok(CRFrameAlgebra { n: self.n, c })
    }

    pub fn is_integrable(&self) -> bool {
        let a = self.alphabet();
        a.hols().all(|x| a.hols().all(|y| a.antihols().all(|z| self.c(x, y, z).is_zero())))
    }
}

/// Constant `μ_α^β̄`, stored as `entries[(α, β)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationTensor {
    pub entries: Matrix,
}

impl DeformationTensor {
    pub fn new(entries: Matrix) -> Self {
        DeformationTensor { entries }
    }

    pub fn zero(n: usize) -> Self {
        DeformationTensor { entries: Matrix::zeros(n, n) }
    }

    /// Builds `μ_α^β̄` from a symmetric `μ_{αβ}` by raising with `h`.
    pub fn from_lowered(lowered: &Matrix, h: &Matrix) -> Result<Self> {
        // μ_{αβ} = μ_α^σ̄ h_{βσ̄}, so μ_α^σ̄ = μ_{αβ} (h^T)^{-1}[β][σ].
        let hinv = h.transpose().inverse().ok_or(Error::DegenerateLeviForm)?;
        Ok(DeformationTensor { entries: lowered.mul(&hinv.transpose()) })
    }

    /// `μ_{αβ} = μ_α^σ̄ h_{βσ̄}`
    pub fn lowered(&self, h: &Matrix) -> Matrix {
        self.entries.mul(&h.transpose())
    }

    pub fn scaled(&self, t: &Scalar) -> Self {
        let k = self.entries.rows;
        DeformationTensor { entries: Matrix::from_fn(k, k, |i, j| &self.entries[(i, j)] * t) }
    }

    pub fn as_tensor(&self, a: Alphabet) -> InvariantTensor {
        InvariantTensor::from_fn(a, &[Kinds::HOL, Kinds::ANTIHOL], |i| {
            self.entries[(i[0] - 2, i[1] - 2 - a.n)].clone()
        })
    }
}

fn set_bracket(c: &mut InvariantTensor, a: Alphabet, x: usize, y: usize, z: usize, v: Scalar) {
    let (cx, cy, cz) = (a.conj(x), a.conj(y), a.conj(z));
    c.add_at(&[x, y, z], &v);
    c.add_at(&[y, x, z], &-v.clone());
    if (cx, cy, cz) != (x, y, z) && (cy, cx, cz) != (x, y, z) {
        c.add_at(&[cx, cy, cz], &v.conj());
        c.add_at(&[cy, cx, cz], &-v.conj());
    }
}

/// `[Z_α, Z_β̄] = −i δ_{αβ} T`
pub fn heisenberg(n: usize) -> Result<CRFrameAlgebra> {
    if n == 0 {
        return Err(Error::BadParameter("heisenberg requires n ≥ 1".into()));
    }
    let a = Alphabet::new(n);
    let mut c = InvariantTensor::zeros(a, &[Kinds::M, Kinds::M, Kinds::M]);
    for p in 0..n {
        set_bracket(&mut c, a, a.hol(p), a.antihol(p), REEB, -Scalar::i());
    }
    Ok(CRFrameAlgebra { n, c })
}

/// `[Z,Z̄] = −iT`, `[T,Z] = −2iZ`
pub fn su2() -> CRFrameAlgebra {
    let a = Alphabet::new(1);
    let mut c = heisenberg(1).expect("n = 1").c;
    set_bracket(&mut c, a, REEB, a.hol(0), a.hol(0), Scalar::from_int(-2).mul_i());
    CRFrameAlgebra { n: 1, c }
}

/// An integrable structure on `su(2) ⊕ aff(1)` with non-flat connection
/// and Levi form `δ`:
/// `[T,Z₁] = −2iZ₁`, `[Z₁,Z₂] = −iZ₁`, `[Z₁,Z̄₁] = −iT`, `[Z₁,Z̄₂] = −iZ₁`,
/// `[Z₂,Z̄₁] = −iZ̄₁`, `[Z₂,Z̄₂] = −iT − iZ₂ − iZ̄₂`.
pub fn su2_aff() -> CRFrameAlgebra {
    let a = Alphabet::new(2);
    let (z1, z2, zb1, zb2) = (a.hol(0), a.hol(1), a.antihol(0), a.antihol(1));
    let mi = -Scalar::i();
    let mut c = InvariantTensor::zeros(a, &[Kinds::M, Kinds::M, Kinds::M]);
    set_bracket(&mut c, a, REEB, z1, z1, Scalar::from_int(-2).mul_i());
    set_bracket(&mut c, a, z1, z2, z1, mi.clone());
    set_bracket(&mut c, a, z1, zb1, REEB, mi.clone());
    set_bracket(&mut c, a, z1, zb2, z1, mi.clone());
    // [Z₂,Z̄₁] is the conjugate of [Z₁,Z̄₂] up to sign and is filled in by set_bracket.
    // [Z₂,Z̄₂] is self-conjugate up to sign: write all three components once.
    for z in [REEB, z2, zb2] {
        c.add_at(&[z2, zb2, z], &mi);
        c.add_at(&[zb2, z2, z], &Scalar::i());
    }
    CRFrameAlgebra { n: 2, c }
}

/// Non-integrable family: the deformation of [`su2_aff`] by the constant
/// symmetric `μ_{12} = μ_{21} = c/2`.
pub fn twisted(c: &Scalar) -> Result<CRFrameAlgebra> {
    let half = c.scale(&rat(1, 2));
    let mu = Matrix::from_fn(2, 2, |i, j| if i != j { half.clone() } else { Scalar::zero() });
    su2_aff().deform(&DeformationTensor::new(mu))
}

/// `heisenberg(n)` with the extra bracket `[Z₁,Z₂] = c Z̄₁` (and its
/// conjugate). This table violates the Jacobi identity whenever `c ≠ 0`
/// (the triple `(Z₁, Z₂, Z̄₂)` fails); it is kept as a validation example.
pub fn twisted_heisenberg(n: usize, c: &Scalar) -> Result<CRFrameAlgebra> {
    if n < 2 {
        return Err(Error::BadParameter("twisted_heisenberg requires n ≥ 2".into()));
    }
    let a = Alphabet::new(n);
    let mut alg = heisenberg(n)?;
    set_bracket(&mut alg.c, a, a.hol(0), a.hol(1), a.antihol(0), c.clone());
    Ok(alg)
}

/// Constant symmetric deformation of `heisenberg(n)` used as an integrable example.
pub fn deformed_heisenberg(n: usize) -> Result<CRFrameAlgebra> {
    let base = heisenberg(n)?;
    base.deform(&sample_mu(n))
}

/// A fixed symmetric `μ_{αβ}` with small Gaussian-rational entries.
pub fn sample_mu(n: usize) -> DeformationTensor {
    let m = Matrix::from_fn(n, n, |i, j| {
        let k = (i + j + 2) as i64;
        let re = rat(1, 2 * k + 1);
        let im = rat(if (i + j) % 2 == 0 { 1 } else { -1 }, 3 * k);
        Scalar::new(re, im)
    });
    DeformationTensor::new(m)
}

/// Resolves a built-in name such as `heisenberg2`, `su2`, `twisted`.
pub fn builtin(name: &str) -> Result<CRFrameAlgebra> {
    let half = Scalar::frac(1, 2);
    match name {
        "su2" => Ok(su2()),
        "su2_aff" => Ok(su2_aff()),
        "twisted" => twisted(&Scalar::one()),
        "twisted_half" => twisted(&half),
        "twisted_i" => twisted(&Scalar::i()),
        _ => {
            let num = |p: &str| -> Result<usize> {
                name[p.len()..].parse().map_err(|_| Error::BadParameter(format!("unknown builtin {name:?}")))
            };
            if name.starts_with("deformed_heisenberg") {
                deformed_heisenberg(num("deformed_heisenberg")?)
            } else if name.starts_with("twisted_heisenberg") {
                twisted_heisenberg(num("twisted_heisenberg")?, &Scalar::one())
            } else if name.starts_with("heisenberg") {
                heisenberg(num("heisenberg")?)
            } else {
                Err(Error::BadParameter(format!("unknown builtin {name:?}")))
            }
        }
    }
}

pub const BUILTIN_NAMES: &[&str] = &[
    "heisenberg1",
    "heisenberg2",
    "su2",
    "su2_aff",
    "deformed_heisenberg2",
    "twisted",
    "twisted_half",
    "twisted_i",
    "twisted_heisenberg2",
];
