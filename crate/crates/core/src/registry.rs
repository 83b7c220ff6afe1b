//! Built-in examples and what the pipeline is expected to produce on them.

use crate::algebra::{self, CRFrameAlgebra};
use crate::error::Result;
use crate::scalar::{rat, Rational, Scalar};

/// Where an expectation comes from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Follows from a general statement about the structure (flat or integrable).
    Implied,
    /// Checked by hand.
    HandDerived,
    /// Computed by this engine and stored for regression only.
    RecordOnly,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Implied => "implied",
            Provenance::HandDerived => "hand-derived",
            Provenance::RecordOnly => "record-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    ObstructionVanishes,
    /// `O ≠ 0` is not claimed; the value is kept as a golden file.
    ObstructionRecorded,
}

#[derive(Clone, Debug)]
pub struct ExampleCase {
    pub name: String,
    pub algebra: CRFrameAlgebra,
    pub expectation: Expectation,
    pub provenance: Provenance,
    /// Rescale factors for which the scaling law is exercised.
    pub scalings: Vec<Rational>,
}

fn case(name: &str, alg: CRFrameAlgebra, expectation: Expectation, provenance: Provenance) -> ExampleCase {
    ExampleCase { name: name.into(), algebra: alg, expectation, provenance, scalings: Vec::new() }
}

pub fn registry() -> Result<Vec<ExampleCase>> {
    use Expectation::*;
    use Provenance::*;
    let mut twisted = case("twisted", algebra::twisted(&Scalar::one())?, ObstructionRecorded, RecordOnly);
    twisted.scalings = vec![rat(4, 1), rat(9, 4)];
    Ok(vec![
        case("heisenberg1", algebra::heisenberg(1)?, ObstructionVanishes, Implied),
        case("heisenberg2", algebra::heisenberg(2)?, ObstructionVanishes, Implied),
        case("su2", algebra::su2(), ObstructionVanishes, Implied),
        case("deformed_heisenberg2", algebra::deformed_heisenberg(2)?, ObstructionVanishes, Implied),
        twisted,
        case("twisted_half", algebra::twisted(&Scalar::frac(1, 2))?, ObstructionRecorded, RecordOnly),
        case("twisted_i", algebra::twisted(&Scalar::i())?, ObstructionRecorded, RecordOnly),
    ])
}

pub fn find(name: &str) -> Result<Option<ExampleCase>> {
    Ok(registry()?.into_iter().find(|c| c.name == name))
}
