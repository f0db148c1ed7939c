//! Named checks run by `eginv selftest`: the bundled fixtures plus a small random corpus.

use std::path::Path;

use crate::algebra::Algebra;
use crate::conditions::check_conditions;
use crate::data::{AnyDataSet, DataSet, Tolerances};
use crate::error::{Error, Result};
use crate::io::{parse_dataset, parse_element_file, AnyElement, DataSetFile, ElementCodec, ElementFile};
use crate::linalg::{max_abs, ComplexMatrix};
use crate::matrix::TriangularAlgebra;
use crate::operators::build_omega;
use crate::sequence::SequenceAlgebra;
use crate::solver::{
    generate_random_instance, invert_omega, oracle_inverse, recover_data, relative_distance, solve_canonical, solve_general,
    SolveStatus,
};

/// Fixture files, by name, with their embedded copies.
pub const FIXTURES: [(&str, &str); 8] = [
    ("triangular3.json", include_str!("../fixtures/triangular3.json")),
    ("triangular3.g.json", include_str!("../fixtures/triangular3.g.json")),
    ("singular2.json", include_str!("../fixtures/singular2.json")),
    ("singular2.g.json", include_str!("../fixtures/singular2.g.json")),
    ("trivial.json", include_str!("../fixtures/trivial.json")),
    ("trivial.g.json", include_str!("../fixtures/trivial.g.json")),
    ("sequence_s42_d4.json", include_str!("../fixtures/sequence_s42_d4.json")),
    ("sequence_s42_d4.g.json", include_str!("../fixtures/sequence_s42_d4.g.json")),
];

#[derive(Clone, Debug, PartialEq)]
pub struct TestResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Source<'a> {
    dir: Option<&'a Path>,
}

impl Source<'_> {
    fn text(&self, name: &str) -> Result<String> {
        match self.dir {
            Some(d) => {
                let p = d.join(name);
                std::fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
            }
            None => FIXTURES
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, t)| t.to_string())
                .ok_or_else(|| Error::Io(format!("no embedded fixture {name}"))),
        }
    }

    fn data(&self, name: &str) -> Result<DataSetFile> {
        parse_dataset(&self.text(name)?, name)
    }

    fn element(&self, name: &str) -> Result<ElementFile> {
        parse_element_file(&self.text(name)?, name)
    }
}

fn matrix_data(f: &DataSetFile) -> Result<&DataSet<TriangularAlgebra>> {
    match &f.data {
        AnyDataSet::Matrix(d) => Ok(d),
        AnyDataSet::Sequence(_) => Err(Error::Instance("expected a matrix-instance fixture".into())),
    }
}

fn matrix_element(f: &ElementFile) -> Result<ComplexMatrix> {
    TriangularAlgebra::unwrap(&f.element).ok_or_else(|| Error::Instance("expected a matrix-instance element".into()))
}

fn ensure(ok: bool, detail: String) -> Result<String> {
    if ok {
        Ok(detail)
    } else {
        Err(Error::Precondition(detail))
    }
}

fn triangular3_check(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("triangular3.json")?;
    let r = check_conditions(matrix_data(&f)?, tol);
    let m = r.residuals[..3].iter().flatten().copied().fold(0.0, f64::max);
    ensure(r.c123_pass() && m < 1e-12, format!("max C1-C3 residual {m:.3e}"))
}

fn triangular3_solve(src: &Source, tol: &Tolerances, canonical: bool) -> Result<String> {
    let f = src.data("triangular3.json")?;
    let want = matrix_element(&src.element("triangular3.g.json")?)?;
    let d = matrix_data(&f)?;
    let rep = if canonical { solve_canonical(d, tol)? } else { solve_general(d, None, tol)? };
    let g = rep.g.filter(|_| rep.status == SolveStatus::Solved).ok_or_else(|| Error::Precondition(rep.message.clone()))?;
    let err = max_abs(&(g - want));
    ensure(err < 1e-12, format!("max entry error {err:.3e}"))
}

fn triangular3_invert(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("triangular3.json")?;
    let g = matrix_element(&src.element("triangular3.g.json")?)?;
    let inv = invert_omega(matrix_data(&f)?, &g, None, tol)?;
    let m = inv.omega_r_residual.max(inv.r_omega_residual);
    ensure(m < 1e-12, format!("identity residual {m:.3e}"))
}

fn singular2_recover(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("singular2.json")?;
    let d = matrix_data(&f)?;
    let g = matrix_element(&src.element("singular2.g.json")?)?;
    let rec = recover_data(d.alg(), &g, tol)?;
    let err = [
        max_abs(&(rec.alpha() - d.alpha())),
        max_abs(&(rec.beta() - d.beta())),
        max_abs(&(rec.gamma() - d.gamma())),
        max_abs(&(rec.delta() - d.delta())),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    ensure(err < 1e-12, format!("max entry error {err:.3e}"))
}

fn singular2_refused(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("singular2.json")?;
    let d = matrix_data(&f)?;
    let g = matrix_element(&src.element("singular2.g.json")?)?;
    let c = check_conditions(d, tol);
    if c.a0_invertible {
        return Err(Error::Precondition("a0 not flagged singular".into()));
    }
    let rep = solve_general(d, None, tol)?;
    if rep.status != SolveStatus::Refused {
        return Err(Error::Precondition(format!("general solver returned {:?}", rep.status)));
    }
    match invert_omega(d, &g, None, tol) {
        Err(Error::Precondition(m)) if m.starts_with("item (a)") => {}
        other => return Err(Error::Precondition(format!("structured inverse not refused: {other:?}"))),
    }
    let o = oracle_inverse(&build_omega(d.alg(), &g, 0)?, tol)?;
    ensure(o.residual < 1e-12, format!("a0 singular, structured path refused, oracle residual {:.3e}", o.residual))
}

fn trivial(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("trivial.json")?;
    let d = matrix_data(&f)?;
    let c = check_conditions(d, tol);
    let rep = solve_general(d, None, tol)?;
    let g = rep.g.ok_or_else(|| Error::Precondition(rep.message.clone()))?;
    ensure(c.all_pass() && c.max_residual() == 0.0 && max_abs(&g) == 0.0, "all residuals 0, g = 0".into())
}

fn sequence_fixture(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("sequence_s42_d4.json")?;
    let d = match &f.data {
        AnyDataSet::Sequence(d) => d,
        AnyDataSet::Matrix(_) => return Err(Error::Instance("expected a sequence fixture".into())),
    };
    let want = match src.element("sequence_s42_d4.g.json")?.element {
        AnyElement::Sequence(s) => s,
        AnyElement::Matrix(_) => return Err(Error::Instance("expected a sequence element".into())),
    };
    let rep = solve_general(d, None, tol)?;
    let g = rep.g.filter(|_| rep.status == SolveStatus::Solved).ok_or_else(|| Error::Precondition(rep.message.clone()))?;
    let err = g.sub(&want)?.norm() / want.norm().max(f64::MIN_POSITIVE);
    ensure(err < 1e-8, format!("relative error {err:.3e}"))
}

fn perturbed_beta(src: &Source, tol: &Tolerances) -> Result<String> {
    let f = src.data("triangular3.json")?;
    let d = matrix_data(&f)?;
    let mut b = d.beta().clone();
    b[(0, 1)] += crate::linalg::c(1e-2, 0.0);
    let d = d.with_beta(b)?;
    let c = check_conditions(&d, tol);
    let rep = solve_canonical(&d, tol)?;
    let mm = rep.diagnostics.canonical_mismatch.unwrap_or(0.0);
    ensure(
        c.max_residual() > 1e-3 && mm > 1e-3 && rep.status == SolveStatus::NoSolution,
        format!("condition residual {:.3e}, canonical mismatch {mm:.3e}", c.max_residual()),
    )
}

fn round_trip<A: Algebra>(alg: &A, degree: usize, seed: u64, tol: &Tolerances) -> Result<f64> {
    let inst = generate_random_instance(alg, degree, seed, tol)?;
    let c = check_conditions(&inst.data, tol);
    if !c.all_pass() {
        return Err(Error::Precondition(format!("seed {seed}: conditions fail {:?}", c.residuals)));
    }
    let rep = solve_general(&inst.data, None, tol)?;
    let g = rep.g.filter(|_| rep.status == SolveStatus::Solved).ok_or_else(|| Error::Precondition(format!("seed {seed}: {}", rep.message)))?;
    let err = alg.norm(&alg.sub(&g, &inst.g)?) / alg.norm(&inst.g).max(f64::MIN_POSITIVE);
    let inv = invert_omega(&inst.data, &inst.g, None, tol)?;
    let oracle = oracle_inverse(&inv.omega, tol)?;
    let rel = relative_distance(&inv.inverse.matrix, &oracle.inverse.matrix);
    if err >= 1e-8 || inv.omega_r_residual >= 1e-9 || inv.r_omega_residual >= 1e-9 || rel >= 1e-9 {
        return Err(Error::Precondition(format!(
            "seed {seed}: g error {err:.3e}, identity residuals {:.3e}/{:.3e}, oracle distance {rel:.3e}",
            inv.omega_r_residual, inv.r_omega_residual
        )));
    }
    Ok(err)
}

fn random_corpus(tol: &Tolerances) -> Result<String> {
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let alg = TriangularAlgebra::new(2 + (k as usize) % 5)?;
        worst = worst.max(round_trip(&alg, 0, 1000 + k, tol)?);
        let alg = SequenceAlgebra::new(1 + (k as usize) % 3, 1 + (k as usize / 3) % 3)?;
        worst = worst.max(round_trip(&alg, (k as usize) % 7, 2000 + k, tol)?);
    }
    Ok(format!("40 instances, worst relative g error {worst:.3e}"))
}

/// Run every check. `fixtures` overrides the embedded fixture copies.
pub fn run(fixtures: Option<&Path>, tol: &Tolerances) -> Vec<TestResult> {
    let src = Source { dir: fixtures };
    let checks: Vec<(&str, Box<dyn Fn() -> Result<String> + '_>)> = vec![
        ("triangular3_conditions", Box::new(|| triangular3_check(&src, tol))),
        ("triangular3_solve_canonical", Box::new(|| triangular3_solve(&src, tol, true))),
        ("triangular3_solve_general", Box::new(|| triangular3_solve(&src, tol, false))),
        ("triangular3_invert", Box::new(|| triangular3_invert(&src, tol))),
        ("singular2_recover_data", Box::new(|| singular2_recover(&src, tol))),
        ("singular2_structured_refused", Box::new(|| singular2_refused(&src, tol))),
        ("trivial_unit_data", Box::new(|| trivial(&src, tol))),
        ("sequence_fixture_round_trip", Box::new(|| sequence_fixture(&src, tol))),
        ("perturbed_beta_rejected", Box::new(|| perturbed_beta(&src, tol))),
        ("random_corpus", Box::new(|| random_corpus(tol))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok(detail) => TestResult { name: name.into(), passed: true, detail },
            Err(e) => TestResult { name: name.into(), passed: false, detail: e.to_string() },
        })
        .collect()
}
