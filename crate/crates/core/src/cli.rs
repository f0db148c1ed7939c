//! Command implementations behind the `eginv` binary. Each returns a JSON
//! report and the process exit status.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::algebra::{Algebra, InstanceKind};
use crate::conditions::{check_conditions, CheckReport};
use crate::data::{AnyDataSet, DataSet, Tolerances};
use crate::error::Error;
use crate::io::{
    dataset_value, element_file_value, element_value, kind_name, read_dataset, read_element, round15, round15_opt, to_text,
    AnyElement, ElementCodec, REPORT_FORMAT,
};
use crate::matrix::TriangularAlgebra;
use crate::operators::build_omega;
use crate::sequence::SequenceAlgebra;
use crate::solver::{
    generate_random_instance, invert_omega, oracle_inverse, solve_auto, solve_canonical, solve_general, Method, SolveReport,
    SolveStatus,
};

/// Process exit statuses. Every run ends in exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Ok,
    InternalError,
    ParseError,
    ConditionFail,
    NoSolution,
    Refused,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::InternalError => 1,
            ExitStatus::ParseError => 3,
            ExitStatus::ConditionFail => 4,
            ExitStatus::NoSolution => 5,
            ExitStatus::Refused => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExitStatus::Ok => "ok",
            ExitStatus::InternalError => "internal-error",
            ExitStatus::ParseError => "parse-error",
            ExitStatus::ConditionFail => "condition-fail",
            ExitStatus::NoSolution => "no-solution",
            ExitStatus::Refused => "refused",
        }
    }

    /// Exit status for a library error.
    pub fn of_error(e: &Error) -> ExitStatus {
        match e {
            Error::Parse { .. } | Error::Io(_) => ExitStatus::ParseError,
            Error::ConditionsViolated { .. } => ExitStatus::ConditionFail,
            _ => ExitStatus::InternalError,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Auto,
    Canonical,
    General,
}

/// Report plus exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub exit: ExitStatus,
}

impl Outcome {
    fn new(command: &str, exit: ExitStatus, body: Value) -> Outcome {
        let head = json!({
            "format": REPORT_FORMAT,
            "command": command,
            "tool_version": crate::VERSION,
            "exit_status": exit.name(),
        });
        Outcome { report: merge(head, body), exit }
    }

    /// Report for a failed command.
    pub fn error(command: &str, e: &Error) -> Outcome {
        let exit = ExitStatus::of_error(e);
        let mut body = json!({ "status": "error", "message": e.to_string() });
        if let Error::Parse { location, .. } = e {
            body["location"] = json!(location);
        }
        Outcome::new(command, exit, body)
    }

    pub fn text(&self) -> String {
        to_text(&self.report)
    }
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Solved => "solved",
        SolveStatus::NoSolution => "no_solution",
        SolveStatus::Refused => "refused",
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Canonical => "canonical",
        Method::General => "general",
        Method::OracleOnly => "oracle_only",
    }
}

pub fn conditions_value(c: &CheckReport) -> Value {
    json!({
        "residuals": c.residuals.iter().map(|r| round15_opt(*r)).collect::<Vec<_>>(),
        "thresholds": c.thresholds.iter().map(|r| round15_opt(*r)).collect::<Vec<_>>(),
        "passed": c.passed,
        "c1_c3_pass": c.c123_pass(),
        "c4_c6_pass": c.c456_pass(),
        "a0_invertible": c.a0_invertible,
        "d0_invertible": c.d0_invertible,
        "a0_condition": round15(c.a0_condition),
        "d0_condition": round15(c.d0_condition),
    })
}

fn header(data: &AnyDataSet, input: &Path, seed: Option<u64>) -> Value {
    let (kind, p, q) = match data {
        AnyDataSet::Matrix(d) => (d.alg().kind(), d.alg().p(), d.alg().q()),
        AnyDataSet::Sequence(d) => (d.alg().kind(), d.alg().p(), d.alg().q()),
    };
    json!({ "input": input.display().to_string(), "instance": kind_name(kind), "p": p, "q": q, "seed": seed })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(x), Value::Object(y)) = (a.as_object_mut(), b) {
        x.extend(y);
    }
    a
}

/// Evaluate C1-C6. Exit ok iff C1-C3 hold.
pub fn cmd_check(input: &Path, tol: &Tolerances) -> Outcome {
    let file = match read_dataset(input) {
        Ok(f) => f,
        Err(e) => return Outcome::error("check", &e),
    };
    let report = match &file.data {
        AnyDataSet::Matrix(d) => check_conditions(d, tol),
        AnyDataSet::Sequence(d) => check_conditions(d, tol),
    };
    let exit = if report.c123_pass() { ExitStatus::Ok } else { ExitStatus::ConditionFail };
    let status = if report.all_pass() {
        "all_pass"
    } else if report.c123_pass() {
        "c1_c3_pass"
    } else {
        "fail"
    };
    let body = merge(header(&file.data, input, file.seed), json!({ "status": status, "conditions": conditions_value(&report) }));
    Outcome::new("check", exit, body)
}

fn solve_report_value<A: ElementCodec>(rep: &SolveReport<A::Elem>) -> Value {
    let d = &rep.diagnostics;
    json!({
        "status": status_name(rep.status),
        "method": method_name(rep.method),
        "message": rep.message,
        "g": if rep.status == SolveStatus::Solved { rep.g.as_ref().map(|g| element_value(&A::wrap(g))) } else { None },
        "inclusion_residuals": rep.inclusion_residuals.map(|r| r.map(round15)),
        "inclusion_threshold": round15_opt(rep.inclusion_threshold),
        "conditions": d.conditions.as_ref().map(conditions_value),
        "diagnostics": {
            "r11_condition": round15_opt(d.r11_condition),
            "r22_condition": round15_opt(d.r22_condition),
            "adjoint_mismatch": round15_opt(d.adjoint_mismatch),
            "canonical_mismatch": round15_opt(d.canonical_mismatch),
            "intertwining": d.intertwining.as_ref().map(|i| json!({
                "upper": round15(i.upper),
                "lower": round15(i.lower),
                "certificate": round15_opt(i.certificate),
            })),
            "window": d.window,
        },
    })
}

fn solve_exit(s: SolveStatus) -> ExitStatus {
    match s {
        SolveStatus::Solved => ExitStatus::Ok,
        SolveStatus::NoSolution => ExitStatus::NoSolution,
        SolveStatus::Refused => ExitStatus::Refused,
    }
}

fn solve_any<A: ElementCodec>(data: &DataSet<A>, method: SolveMethod, tol: &Tolerances) -> Result<(Value, ExitStatus), Error> {
    let rep = match method {
        SolveMethod::Auto => solve_auto(data, tol)?,
        SolveMethod::Canonical => solve_canonical(data, tol)?,
        SolveMethod::General => solve_general(data, None, tol)?,
    };
    Ok((solve_report_value::<A>(&rep), solve_exit(rep.status)))
}

/// Solve for g with the chosen method.
pub fn cmd_solve(input: &Path, method: SolveMethod, tol: &Tolerances) -> Outcome {
    let file = match read_dataset(input) {
        Ok(f) => f,
        Err(e) => return Outcome::error("solve", &e),
    };
    let res = match &file.data {
        AnyDataSet::Matrix(d) => solve_any(d, method, tol),
        AnyDataSet::Sequence(d) => solve_any(d, method, tol),
    };
    match res {
        Ok((body, exit)) => Outcome::new("solve", exit, merge(header(&file.data, input, file.seed), body)),
        Err(e) => Outcome::error("solve", &e),
    }
}

fn invert_any<A: ElementCodec>(data: &DataSet<A>, g: &AnyElement, tol: &Tolerances) -> Result<(Value, ExitStatus), Error> {
    let g = A::unwrap(g).ok_or_else(|| Error::Parse { location: "$.instance".into(), message: "element and data set are of different instances".into() })?;
    let alg = data.alg();
    if alg.shape(&g) != (alg.p(), alg.q()) {
        return Err(Error::Parse {
            location: "$.p".into(),
            message: format!("element is {:?}, data needs {:?}", alg.shape(&g), (alg.p(), alg.q())),
        });
    }
    match invert_omega(data, &g, None, tol) {
        Ok(inv) => {
            let exit = if inv.verified() { ExitStatus::Ok } else { ExitStatus::InternalError };
            Ok((
                json!({
                    "status": if inv.verified() { "inverted" } else { "residual_too_large" },
                    "method": "structured",
                    "window": inv.window,
                    "omega_r_residual": round15(inv.omega_r_residual),
                    "r_omega_residual": round15(inv.r_omega_residual),
                    "formula_residuals": inv.formula_residuals.map(round15),
                    "dimension": inv.omega.matrix.nrows(),
                }),
                exit,
            ))
        }
        Err(Error::Precondition(msg)) => {
            let exit = if msg.starts_with("item (a)") {
                ExitStatus::Refused
            } else if msg.starts_with("item (b)") {
                ExitStatus::ConditionFail
            } else {
                ExitStatus::NoSolution
            };
            let w = alg.degree(&g).max(data.degree());
            let omega = build_omega(alg, &g, w)?;
            let oracle = match oracle_inverse(&omega, tol) {
                Ok(o) => json!({
                    "invertible": true,
                    "residual": round15(o.residual),
                    "condition": round15(o.condition),
                    "sigma_min": round15(o.sigma_min),
                }),
                Err(e) => json!({ "invertible": false, "message": e.to_string() }),
            };
            Ok((
                json!({
                    "status": "refused",
                    "method": method_name(Method::OracleOnly),
                    "message": msg,
                    "dimension": omega.matrix.nrows(),
                    "oracle": oracle,
                }),
                exit,
            ))
        }
        Err(e) => Err(e),
    }
}

/// Structured inverse of Omega(g), with the dense oracle as fallback when the
/// structured formulas do not apply.
pub fn cmd_invert(input: &Path, g_path: &Path, tol: &Tolerances) -> Outcome {
    let file = match read_dataset(input) {
        Ok(f) => f,
        Err(e) => return Outcome::error("invert", &e),
    };
    let g = match read_element(g_path) {
        Ok(g) => g,
        Err(e) => return Outcome::error("invert", &e),
    };
    let res = match &file.data {
        AnyDataSet::Matrix(d) => invert_any(d, &g.element, tol),
        AnyDataSet::Sequence(d) => invert_any(d, &g.element, tol),
    };
    match res {
        Ok((body, exit)) => {
            let body = merge(header(&file.data, input, file.seed), body);
            Outcome::new("invert", exit, merge(body, json!({ "g_input": g_path.display().to_string() })))
        }
        Err(e) => Outcome::error("invert", &e),
    }
}

/// Files written by `cmd_gen`.
pub fn gen_paths(output: &Path) -> (PathBuf, PathBuf) {
    let s = output.display().to_string();
    let stem = s.strip_suffix(".json").unwrap_or(&s);
    (PathBuf::from(format!("{stem}.json")), PathBuf::from(format!("{stem}.g.json")))
}

fn gen_any<A: ElementCodec>(alg: A, degree: usize, seed: u64, tol: &Tolerances, wrap: impl Fn(DataSet<A>) -> AnyDataSet) -> Result<(String, String, Value), Error> {
    let inst = generate_random_instance(&alg, degree, seed, tol)?;
    let g = A::wrap(&inst.g);
    let data_text = to_text(&dataset_value(&wrap(inst.data), Some(seed)));
    let g_text = to_text(&element_file_value(alg.kind(), alg.p(), alg.q(), "g", &g, Some(seed)));
    let info = json!({
        "instance": kind_name(alg.kind()),
        "p": alg.p(),
        "q": alg.q(),
        "degree": inst.degree,
        "seed": seed,
        "attempts": inst.attempts,
        "omega_condition": round15(inst.omega_condition),
    });
    Ok((data_text, g_text, info))
}

/// Write a random data set and its generating g as `<output>.json` and `<output>.g.json`.
pub fn cmd_gen(kind: InstanceKind, p: usize, q: usize, degree: usize, seed: u64, output: &Path, tol: &Tolerances) -> Outcome {
    let res = match kind {
        InstanceKind::TriangularMatrix => {
            if p != q {
                Err(Error::Instance(format!("matrix instance needs p = q, got {p}x{q}")))
            } else {
                TriangularAlgebra::new(p).and_then(|a| gen_any(a, degree, seed, tol, AnyDataSet::Matrix))
            }
        }
        InstanceKind::Sequence => SequenceAlgebra::new(p, q).and_then(|a| gen_any(a, degree, seed, tol, AnyDataSet::Sequence)),
    };
    let (data_text, g_text, info) = match res {
        Ok(x) => x,
        Err(e) => return Outcome::error("gen", &e),
    };
    let (dp, gp) = gen_paths(output);
    for (path, text) in [(&dp, &data_text), (&gp, &g_text)] {
        if let Err(e) = std::fs::write(path, text) {
            return Outcome::error("gen", &Error::Io(format!("{}: {e}", path.display())));
        }
    }
    let body = merge(info, json!({ "status": "written", "data_file": dp.display().to_string(), "g_file": gp.display().to_string() }));
    Outcome::new("gen", ExitStatus::Ok, body)
}

/// Run the built-in checks (fixtures from `fixtures`, or the embedded copies).
pub fn cmd_selftest(fixtures: Option<&Path>, tol: &Tolerances) -> Outcome {
    let results = crate::selftest::run(fixtures, tol);
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let exit = if failed.is_empty() { ExitStatus::Ok } else { ExitStatus::InternalError };
    let body = json!({
        "status": if failed.is_empty() { "pass" } else { "fail" },
        "failed": failed,
        "tests": results.iter().map(|r| json!({ "name": r.name, "passed": r.passed, "detail": r.detail })).collect::<Vec<_>>(),
    });
    Outcome::new("selftest", exit, body)
}
