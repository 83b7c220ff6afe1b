//! The index alphabet `{∞, 0, α, ᾱ}` of the adapted frame.
//!
//! Positions: `∞ = 0`, `0 = 1`, `α = 2..2+n`, `ᾱ = 2+n..2+2n`.

use bitflags::bitflags;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexKind {
    Infinity,
    Reeb,
    Hol,
    AntiHol,
}

bitflags! {
    /// Admissible kinds of one tensor slot.
    #[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
    pub struct Kinds: u8 {
        const INF = 1;
        const REEB = 2;
        const HOL = 4;
        const ANTIHOL = 8;
        const H = Self::HOL.bits() | Self::ANTIHOL.bits();
        const M = Self::REEB.bits() | Self::H.bits();
        const ALL = Self::INF.bits() | Self::M.bits();
    }
}

impl Kinds {
    pub fn of(kind: IndexKind) -> Kinds {
        match kind {
            IndexKind::Infinity => Kinds::INF,
            IndexKind::Reeb => Kinds::REEB,
            IndexKind::Hol => Kinds::HOL,
            IndexKind::AntiHol => Kinds::ANTIHOL,
        }
    }

    pub fn conj(self) -> Kinds {
        let mut out = self & (Kinds::INF | Kinds::REEB);
        if self.contains(Kinds::HOL) {
            out |= Kinds::ANTIHOL;
        }
        if self.contains(Kinds::ANTIHOL) {
            out |= Kinds::HOL;
        }
        out
    }
}

pub const INF: usize = 0;
pub const REEB: usize = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub n: usize,
}

impl Alphabet {
    pub fn new(n: usize) -> Self {
        Alphabet { n }
    }

    pub fn size(&self) -> usize {
        2 * self.n + 2
    }

    /// Position of `Z_{a+1}`.
    pub fn hol(&self, a: usize) -> usize {
        2 + a
    }

    /// Position of `Z̄_{a+1}`.
    pub fn antihol(&self, a: usize) -> usize {
        2 + self.n + a
    }

    pub fn hols(&self) -> std::ops::Range<usize> {
        2..2 + self.n
    }

    pub fn antihols(&self) -> std::ops::Range<usize> {
        2 + self.n..2 + 2 * self.n
    }

    /// The Reeb index together with all holomorphic and antiholomorphic ones.
    pub fn boundary(&self) -> std::ops::Range<usize> {
        1..self.size()
    }

    pub fn kind(&self, i: usize) -> IndexKind {
        match i {
            0 => IndexKind::Infinity,
            1 => IndexKind::Reeb,
            _ if i < 2 + self.n => IndexKind::Hol,
            _ => IndexKind::AntiHol,
        }
    }

    pub fn admits(&self, kinds: Kinds, i: usize) -> bool {
        kinds.contains(Kinds::of(self.kind(i)))
    }

    pub fn indices(&self, kinds: Kinds) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.admits(kinds, i)).collect()
    }

    pub fn conj(&self, i: usize) -> usize {
        match self.kind(i) {
            IndexKind::Infinity | IndexKind::Reeb => i,
            IndexKind::Hol => i + self.n,
            IndexKind::AntiHol => i - self.n,
        }
    }

    /// Homogeneity weight of the frame vector: `ρ∂ρ, ρ²T, ρZ_α, ρZ_ᾱ`.
    pub fn weight(&self, i: usize) -> usize {
        if i == REEB {
            2
        } else {
            1
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self.kind(i) {
            IndexKind::Infinity => "inf".to_string(),
            IndexKind::Reeb => "T".to_string(),
            IndexKind::Hol => format!("Z{}", i - 1),
            IndexKind::AntiHol => format!("Zb{}", i - 1 - self.n),
        }
    }

    pub fn parse_label(&self, s: &str) -> Option<usize> {
        let take = |rest: &str| -> Option<usize> {
            let k: usize = rest.parse().ok()?;
            (1..=self.n).contains(&k).then(|| k - 1)
        };
        match s {
            "inf" => Some(INF),
            "T" => Some(REEB),
            _ => {
                if let Some(rest) = s.strip_prefix("Zb") {
                    take(rest).map(|a| self.antihol(a))
                } else if let Some(rest) = s.strip_prefix('Z') {
                    take(rest).map(|a| self.hol(a))
                } else {
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_swaps_holomorphic_types() {
        let a = Alphabet::new(3);
        for i in 0..a.size() {
            assert_eq!(a.conj(a.conj(i)), i);
        }
        assert_eq!(a.conj(INF), INF);
        assert_eq!(a.conj(REEB), REEB);
        assert_eq!(a.kind(a.conj(a.hol(1))), IndexKind::AntiHol);
        assert_eq!(Kinds::HOL.conj(), Kinds::ANTIHOL);
        assert_eq!(Kinds::M.conj(), Kinds::M);
    }

    #[test]
    fn labels_round_trip() {
        let a = Alphabet::new(2);
        for i in 0..a.size() {
            assert_eq!(a.parse_label(&a.label(i)), Some(i));
        }
        assert_eq!(a.parse_label("Z3"), None);
        assert_eq!(a.parse_label("Zb0"), None);
        assert_eq!(a.parse_label("X"), None);
    }
}
