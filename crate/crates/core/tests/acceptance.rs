//! Acceptance criteria 1–12: one PASS/FAIL line each. All comparisons are
//! exact; the only numeric tolerances are the wall-time budgets below.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use achcr::ach::{christoffel, curvature, table1_reference, ACHMetric};
use achcr::algebra::{self, CRFrameAlgebra, DeformationTensor};
use achcr::linalg::Matrix;
use achcr::pseudohermitian::{identity_residuals, PseudohermitianData};
use achcr::registry;
use achcr::scalar::{rat, Scalar};
use achcr::solver::{self, indicial, order_offset, Solution, SolverOptions};
use achcr::sphere;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FLAT_BUDGET: Duration = Duration::from_secs(10);
const SPHERE_BUDGET: Duration = Duration::from_secs(1);
const TABLE1_SAMPLES: usize = 100;
const RANDOM_ALGEBRAS: usize = 50;
const SEED: u64 = 0x5eed_ac4c;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data(alg: &CRFrameAlgebra) -> PseudohermitianData {
    PseudohermitianData::new(alg).expect("valid algebra")
}

fn solve(alg: &CRFrameAlgebra) -> Result<Solution, String> {
    solver::solve(&data(alg), &SolverOptions::default()).map_err(|e| e.to_string())
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn flat_model() -> Outcome {
    let mut times = Vec::new();
    for n in 1..=2 {
        let start = Instant::now();
        let s = solve(&algebra::heisenberg(n).unwrap())?;
        let t = start.elapsed();
        ensure(s.phi.series().is_empty(), format!("n={n}: φ ≠ 0"))?;
        ensure(s.obstruction.o.is_zero() && s.obstruction.e.is_zero(), format!("n={n}: O or E ≠ 0"))?;
        let a = achcr::Alphabet::new(n);
        let ein = &s.curvature.einstein;
        for i in 0..a.size() {
            for j in 0..a.size() {
                let below = 2 * n + 1 + order_offset(a, i, j);
                ensure(ein.component(&[i, j]).vanishes_below(below + 1), format!("n={n}: Ein[{i},{j}] ≠ 0"))?;
            }
        }
        ensure(t < FLAT_BUDGET, format!("n={n}: {t:?} over budget"))?;
        times.push(format!("n={n} {:.0?}", t));
    }
    Ok(format!("φ = O = E = 0; {}", times.join(", ")))
}

fn seed_correctness() -> Outcome {
    for (name, alg) in [
        ("heisenberg1", algebra::heisenberg(1).unwrap()),
        ("heisenberg2", algebra::heisenberg(2).unwrap()),
        ("su2", algebra::su2()),
        ("twisted", algebra::twisted(&Scalar::one()).unwrap()),
    ] {
        let p = data(&alg);
        let phi = solver::seed(&p).map_err(|e| e.to_string())?;
        let m = ACHMetric::assemble(&p, &phi, 5).map_err(|e| e.to_string())?;
        let ein = curvature(&p, &m).map_err(|e| e.to_string())?.einstein;
        ensure(ein.vanishes_below(3), format!("{name}: Ein has terms below ρ³"))?;
    }
    let p = data(&algebra::su2());
    let a = p.alphabet();
    let v = solver::seed(&p).unwrap().series().entry(2, &[a.hol(0), a.antihol(0)]);
    ensure(v == -Scalar::one(), format!("su2: Φ_11̄ = {v}"))?;
    Ok("Ein = O(ρ³) on 4 inputs; su2 Φ_11̄ = -1".into())
}

fn integrable_vanishing() -> Outcome {
    for (name, alg) in [("su2", algebra::su2()), ("deformed_heisenberg2", algebra::deformed_heisenberg(2).unwrap())] {
        ensure(alg.is_integrable(), format!("{name} is not integrable"))?;
        let s = solve(&alg)?;
        ensure(s.obstruction.o.is_zero(), format!("{name}: O ≠ 0"))?;
    }
    Ok("O = 0 for su2, deformed_heisenberg2".into())
}

fn bianchi_suite() -> Outcome {
    let cases = registry::registry().map_err(|e| e.to_string())?;
    let mut steps = 0;
    for c in &cases {
        let s = solve(&c.algebra)?;
        for st in &s.steps {
            ensure(st.bianchi_exact, format!("{}: Bianchi residual at step {}", c.name, st.m))?;
            ensure(st.order_forms_hold, format!("{}: order forms at step {}", c.name, st.m))?;
            steps += 1;
        }
    }
    Ok(format!("{} examples, {steps} steps, every intermediate metric exact", cases.len()))
}

fn obstruction_identities() -> Outcome {
    for c in [Scalar::one(), Scalar::frac(1, 2), Scalar::i()] {
        let alg = algebra::twisted(&c).unwrap();
        let p = data(&alg);
        let s = solve(&alg)?;
        let (e0, pred) = solver::second_obstruction_check(&p, &s.obstruction);
        ensure(e0 == pred, format!("c={c}: ρ^(2n+3) Ein_0α mismatch"))?;
        ensure(solver::divergence_identity(&p, &s.obstruction).is_zero(), format!("c={c}: divergence residual ≠ 0"))?;
        ensure(!s.obstruction.o.is_zero(), format!("c={c}: O = 0 makes the check vacuous"))?;
    }
    Ok("c ∈ {1, 1/2, i}: both identities exact with O ≠ 0".into())
}

fn scaling_law() -> Outcome {
    let alg = algebra::twisted(&Scalar::one()).unwrap();
    for lambda in [rat(4, 1), rat(9, 4)] {
        let (scaled, expected) = solver::scaling_law(&alg, &lambda, &SolverOptions::default()).map_err(|e| e.to_string())?;
        ensure(scaled == expected, format!("λ={lambda}: Ô ≠ λ^-2 O"))?;
    }
    Ok("λ ∈ {4, 9/4}".into())
}

fn indicial_determinant() -> Outcome {
    for n in 1..=6i64 {
        for m in 1..=2 * n + 1 {
            let closed = Scalar::frac((m + 2) * (m + 4) * (m - 2 * n - 2) * (m - 4 * n - 2), 64);
            ensure(indicial::trace_det(m + 2, n) == closed, format!("n={n} m={m}"))?;
        }
        ensure(indicial::trace_det(2 * n + 4, n).is_zero(), format!("n={n}: det ≠ 0 at m=2n+2"))?;
    }
    Ok("n ≤ 6, m = 1..2n+1; zero at m = 2n+2".into())
}

fn table1_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (name, alg) in [("heisenberg1", algebra::heisenberg(1).unwrap()), ("su2", algebra::su2())] {
        let p = data(&alg);
        for k in 0..TABLE1_SAMPLES {
            let phi = common::random_phi(&mut rng, p.alphabet(), 6, 4);
            let m = ACHMetric::assemble(&p, &phi, 5).map_err(|e| e.to_string())?;
            let lhs = christoffel(&p, &m).map_err(|e| e.to_string())?.lower;
            let rhs = table1_reference(&p, &m).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, format!("{name} sample {k}"))?;
        }
    }
    Ok(format!("{TABLE1_SAMPLES} random φ each over heisenberg1, su2"))
}

fn sphere_recursion() -> Outcome {
    let start = Instant::now();
    for n in 1..=8 {
        let r = sphere::closed_form_check(n).map_err(|e| e.to_string())?;
        ensure(r.holds, format!("n={n}: {} ≠ {}", r.recursion, r.closed_form))?;
    }
    let t = start.elapsed();
    ensure(t < SPHERE_BUDGET, format!("{t:?} over budget"))?;
    Ok(format!("n = 1..8 in {t:.1?}"))
}

fn pseudohermitian_identities() -> Outcome {
    let mut algebras: Vec<(String, CRFrameAlgebra)> =
        registry::registry().unwrap().into_iter().map(|c| (c.name, c.algebra)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for k in 0..RANDOM_ALGEBRAS {
        let n = 1 + k % 2;
        algebras.push((format!("random#{k} (n={n})"), common::random_algebra(&mut rng, n)));
    }
    for (name, alg) in &algebras {
        let res = identity_residuals(&data(alg)).map_err(|e| e.to_string())?;
        ensure(res.len() >= 6, format!("{name}: only {} identities", res.len()))?;
        if let Some(bad) = res.iter().find(|r| !r.holds()) {
            return Err(format!("{name}: {} fails", bad.name));
        }
    }
    Ok(format!("{} algebras ({RANDOM_ALGEBRAS} random)", algebras.len()))
}

fn first_variation() -> Outcome {
    let alg = algebra::heisenberg(2).unwrap();
    let lowered = Matrix::from_fn(2, 2, |i, j| Scalar::new(rat((i + j + 1) as i64, 5), rat(1, 7)));
    let h = alg.levi_form().unwrap();
    let mus = [algebra::sample_mu(2), DeformationTensor::from_lowered(&lowered, &h).unwrap()];
    for mu in &mus {
        let r = sphere::variation_formula_check(&alg, mu, sphere::DEFAULT_DEGREE_BOUND).map_err(|e| e.to_string())?;
        for c in &r.components {
            ensure(c.holds(), format!("{} differs", c.name))?;
        }
        ensure(!r.levi_second_order.is_zero(), "h(t) has no t² term")?;
    }
    Ok(format!("{} constant μ over heisenberg2; derivatives of h, N, A, R match", mus.len()))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_achcr");
    let mut notes = Vec::new();
    for (input, code) in [("builtin:twisted_heisenberg2", 2), ("builtin:twisted", 0)] {
        let run = || Command::new(bin).args(["solve", input]).output().expect("spawn achcr");
        let (a, b) = (run(), run());
        ensure(a.status.code() == Some(code), format!("{input}: exit {:?}", a.status.code()))?;
        ensure(a.stdout == b.stdout && !a.stdout.is_empty(), format!("{input}: reports differ"))?;
        notes.push(format!("{input} exit {code}"));
    }
    Ok(format!("byte-identical: {}", notes.join(", ")))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("flat model", flat_model),
        ("seed correctness", seed_correctness),
        ("integrable vanishing", integrable_vanishing),
        ("bianchi suite", bianchi_suite),
        ("obstruction identities", obstruction_identities),
        ("scaling law", scaling_law),
        ("indicial determinant", indicial_determinant),
        ("christoffel table", table1_oracle),
        ("sphere recursion", sphere_recursion),
        ("pseudohermitian identities", pseudohermitian_identities),
        ("first-variation formulas", first_variation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match r {
            Ok(msg) => println!("PASS {:>2} {name} [tol=exact, {t:.1?}]: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} [tol=exact, {t:.1?}]: {msg}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
