//! Solving for g, inverting Omega(g), and the dense data oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Algebra, InstanceKind, Mask, PartTag};
use crate::conditions::{check_conditions, CheckReport};
use crate::data::{DataSet, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, frobenius, inverse, is_invertible, singular_values, solve, zeros, ComplexMatrix, C64};
use crate::operators::{
    apply, build_omega, build_r, check_shift_intertwining, half_spaces, BlockOperator, IntertwiningReport, ROperators,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Solved,
    NoSolution,
    Refused,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Canonical,
    General,
    OracleOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub conditions: Option<CheckReport>,
    pub r11_condition: Option<f64>,
    pub r22_condition: Option<f64>,
    /// ||R22^-1 gamma - (R11^-1 beta)*||
    pub adjoint_mismatch: Option<f64>,
    pub intertwining: Option<IntertwiningReport>,
    /// ||g1 - g2|| of the canonical formulas
    pub canonical_mismatch: Option<f64>,
    pub window: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<E> {
    pub status: SolveStatus,
    pub method: Method,
    pub g: Option<E>,
    /// residuals of P_{A+}(alpha + g gamma - e), P_{C-}(g* alpha + gamma),
    /// P_{B+}(g delta + beta), P_{D-}(delta + g* beta - e)
    pub inclusion_residuals: Option<[f64; 4]>,
    pub inclusion_threshold: Option<f64>,
    pub diagnostics: Diagnostics,
    pub message: String,
}

impl<E> SolveReport<E> {
    fn new(method: Method) -> SolveReport<E> {
        SolveReport {
            status: SolveStatus::NoSolution,
            method,
            g: None,
            inclusion_residuals: None,
            inclusion_threshold: None,
            diagnostics: Diagnostics::default(),
            message: String::new(),
        }
    }

    fn refuse(mut self, msg: impl Into<String>) -> SolveReport<E> {
        self.status = SolveStatus::Refused;
        self.message = msg.into();
        self
    }

    fn no_solution(mut self, msg: impl Into<String>) -> SolveReport<E> {
        self.status = SolveStatus::NoSolution;
        self.message = msg.into();
        self
    }
}

/// Norms of the parts of the four expressions that must vanish for g to be a solution.
pub fn inclusion_residuals<A: Algebra>(data: &DataSet<A>, g: &A::Elem) -> Result<[f64; 4]> {
    let alg = data.alg();
    alg.check_block(g, PartTag::BPlus)?;
    let gs = alg.adjoint(g);
    let ea = alg.identity(alg.p());
    let ed = alg.identity(alg.q());
    let x1 = alg.sub(&alg.add(data.alpha(), &alg.mul(g, data.gamma())?)?, &ea)?;
    let x2 = alg.add(&alg.mul(&gs, data.alpha())?, data.gamma())?;
    let x3 = alg.add(&alg.mul(g, data.delta())?, data.beta())?;
    let x4 = alg.sub(&alg.add(data.delta(), &alg.mul(&gs, data.beta())?)?, &ed)?;
    Ok([
        alg.norm(&alg.project_mask(&x1, Mask::PLUS)),
        alg.norm(&alg.project_mask(&x2, Mask::MINUS)),
        alg.norm(&alg.project_mask(&x3, Mask::PLUS)),
        alg.norm(&alg.project_mask(&x4, Mask::MINUS)),
    ])
}

fn inclusion_threshold<A: Algebra>(data: &DataSet<A>, g: &A::Elem, tol: &Tolerances) -> f64 {
    let alg = data.alg();
    let q = crate::algebra::block_norm(alg, &data.q_block());
    tol.threshold(tol.inclusion, 1.0 + q * (1.0 + alg.norm(g)))
}

fn finish<A: Algebra>(mut rep: SolveReport<A::Elem>, data: &DataSet<A>, g: A::Elem, tol: &Tolerances) -> Result<SolveReport<A::Elem>> {
    let res = inclusion_residuals(data, &g)?;
    let t = inclusion_threshold(data, &g, tol);
    let ok = res.iter().all(|r| *r < t);
    rep.inclusion_residuals = Some(res);
    rep.inclusion_threshold = Some(t);
    if ok {
        rep.status = SolveStatus::Solved;
        rep.g = Some(g);
        if rep.message.is_empty() {
            rep.message = "all four inclusions verified".into();
        }
        Ok(rep)
    } else {
        let k = res.iter().position(|r| *r >= t).unwrap_or(0) + 1;
        rep.g = Some(g);
        Ok(rep.no_solution(format!("inclusion {k} fails: residual {:.3e} >= {t:.3e}", res[k - 1])))
    }
}

/// Closed form for invertible alpha in A+ and delta in D-:
/// g1 = -P_{B+}(alpha^-* gamma*), g2 = -P_{B+}(beta delta^-1), solution iff g1 = g2.
pub fn solve_canonical<A: Algebra>(data: &DataSet<A>, tol: &Tolerances) -> Result<SolveReport<A::Elem>> {
    let alg = data.alg();
    let mut rep = SolveReport::new(Method::Canonical);
    let cond = check_conditions(data, tol);
    rep.diagnostics.conditions = Some(cond.clone());
    let n = data.degree();
    let alpha_inv = match alg.invert_in_plus(data.alpha(), n, tol.invertibility) {
        Ok(x) => x,
        Err(e) => return Ok(rep.refuse(format!("alpha is not invertible in A+ ({e}); use the general method"))),
    };
    let delta_inv = match alg.invert_in_plus(&alg.adjoint(data.delta()), n, tol.invertibility) {
        Ok(x) => alg.adjoint(&x),
        Err(e) => return Ok(rep.refuse(format!("delta is not invertible in D- ({e}); use the general method"))),
    };
    let g1 = alg.neg(&alg.project(&alg.mul(&alg.adjoint(&alpha_inv), &alg.adjoint(data.gamma()))?, PartTag::BPlus)?);
    let g2 = alg.neg(&alg.project(&alg.mul(data.beta(), &delta_inv)?, PartTag::BPlus)?);
    let mismatch = alg.norm(&alg.sub(&g1, &g2)?);
    rep.diagnostics.canonical_mismatch = Some(mismatch);
    if !(cond.passed[0] == Some(true) && cond.passed[1] == Some(true)) {
        return Ok(rep.no_solution(format!("C1/C2 fail: residuals {:?}", &cond.residuals[..2])));
    }
    let t = tol.threshold(tol.condition, 1.0 + alg.norm(&g1));
    if mismatch >= t {
        return Ok(rep.no_solution(format!("g1 and g2 differ by {mismatch:.3e} (C3 fails)")));
    }
    finish(rep, data, g1, tol)
}

fn op_inverse(op: &BlockOperator) -> Result<BlockOperator> {
    let m = inverse(&op.matrix).ok_or_else(|| Error::Singular { what: "operator".into(), condition: f64::INFINITY })?;
    BlockOperator::new(m, op.codomain.clone(), op.domain.clone())
}

/// g = -R11^-1 beta from the structured operators on the window `window` (default: data degree).
pub fn solve_general<A: Algebra>(data: &DataSet<A>, window: Option<usize>, tol: &Tolerances) -> Result<SolveReport<A::Elem>> {
    let alg = data.alg();
    let mut rep = SolveReport::new(Method::General);
    let cond = check_conditions(data, tol);
    rep.diagnostics.conditions = Some(cond.clone());
    if !cond.a0_invertible || !cond.d0_invertible {
        let which = if !cond.a0_invertible { "a0" } else { "d0" };
        return Ok(rep.refuse(format!(
            "{which} is singular; the structured inverse does not apply (use recover_data with the dense oracle)"
        )));
    }
    if !cond.all_pass() {
        let k = cond.first_failure().unwrap_or(0);
        return Ok(rep.no_solution(format!("condition C{k} fails: residual {:.3e}", cond.residuals[k - 1].unwrap_or(f64::NAN))));
    }
    let r = build_r(data, window, tol)?;
    rep.diagnostics.window = Some(r.window);
    let (c11, c22) = (condition_number(&r.r11.matrix), condition_number(&r.r22.matrix));
    rep.diagnostics.r11_condition = Some(c11);
    rep.diagnostics.r22_condition = Some(c22);
    if !is_invertible(&r.r11.matrix, tol.invertibility) || !is_invertible(&r.r22.matrix, tol.invertibility) {
        return Ok(rep.no_solution(format!("R11 or R22 singular (condition numbers {c11:.3e}, {c22:.3e})")));
    }
    let (i11, i22) = (op_inverse(&r.r11)?, op_inverse(&r.r22)?);
    let g = alg.neg(&apply(alg, &i11, data.beta())?);
    let h = alg.neg(&apply(alg, &i22, data.gamma())?);
    let adj = alg.norm(&alg.sub(&h, &alg.adjoint(&g))?);
    rep.diagnostics.adjoint_mismatch = Some(adj);
    if alg.kind() == InstanceKind::Sequence {
        rep.diagnostics.intertwining = Some(check_shift_intertwining(alg, &r, tol.invertibility)?);
    }
    let t = tol.threshold(tol.condition, (1.0 + alg.norm(&g)) * c11.max(c22));
    if adj >= t {
        return Ok(rep.no_solution(format!("R22^-1 gamma is not the adjoint of R11^-1 beta (mismatch {adj:.3e})")));
    }
    finish(rep, data, g, tol)
}

/// Canonical when alpha and delta are invertible in their one-sided algebras, general otherwise.
pub fn solve_auto<A: Algebra>(data: &DataSet<A>, tol: &Tolerances) -> Result<SolveReport<A::Elem>> {
    let rep = solve_canonical(data, tol)?;
    if rep.status == SolveStatus::Refused {
        solve_general(data, None, tol)
    } else {
        Ok(rep)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InversionReport<E> {
    pub r: ROperators<E>,
    pub omega: BlockOperator,
    /// assembled [[R11, R12], [R21, R22]]
    pub inverse: BlockOperator,
    pub omega_r_residual: f64,
    pub r_omega_residual: f64,
    /// ||H+g + R11^-1 R12||, ||H+g + R12 R22^-1||, ||H-g* + R21 R11^-1||,
    /// ||H-g* + R22^-1 R21||, ||g + R11^-1 beta||, ||g* + R22^-1 gamma||
    pub formula_residuals: [f64; 6],
    pub window: usize,
}

impl<E> InversionReport<E> {
    /// Both products within 1e-10 of the identity.
    pub fn verified(&self) -> bool {
        self.omega_r_residual < 1e-10 && self.r_omega_residual < 1e-10
    }
}

/// Structured inverse of Omega(g) for a solution g. Requires a0, d0 invertible and C4-C6.
pub fn invert_omega<A: Algebra>(data: &DataSet<A>, g: &A::Elem, window: Option<usize>, tol: &Tolerances) -> Result<InversionReport<A::Elem>> {
    let alg = data.alg();
    let res = inclusion_residuals(data, g)?;
    let t = inclusion_threshold(data, g, tol);
    if let Some(k) = res.iter().position(|r| *r >= t) {
        return Err(Error::Precondition(format!("g is not a solution: inclusion {} residual {:.3e}", k + 1, res[k])));
    }
    let cond = check_conditions(data, tol);
    if !cond.a0_invertible || !cond.d0_invertible {
        let which = if !cond.a0_invertible { "a0" } else { "d0" };
        return Err(Error::Precondition(format!("item (a) not satisfied: {which} is singular")));
    }
    if !cond.c456_pass() {
        return Err(Error::Precondition(format!("item (b) not satisfied: C4-C6 residuals {:?}", &cond.residuals[3..])));
    }
    let w = window.unwrap_or(0).max(data.degree()).max(alg.degree(g));
    let r = build_r(data, Some(w), tol)?;
    let omega = build_omega(alg, g, w)?;
    let inv = r.assemble()?;
    let omega_r_residual = omega.compose(&inv)?.identity_residual()?;
    let r_omega_residual = inv.compose(&omega)?.identity_residual()?;

    let hg = omega.block(0, 1);
    let hgs = omega.block(1, 0);
    let (i11, i22) = (op_inverse(&r.r11)?, op_inverse(&r.r22)?);
    let f1 = hg.add(&i11.compose(&r.r12)?)?.norm();
    let f2 = hg.add(&r.r12.compose(&i22)?)?.norm();
    let f3 = hgs.add(&r.r21.compose(&i11)?)?.norm();
    let f4 = hgs.add(&i22.compose(&r.r21)?)?.norm();
    let f5 = alg.norm(&alg.add(g, &apply(alg, &i11, data.beta())?)?);
    let f6 = alg.norm(&alg.add(&alg.adjoint(g), &apply(alg, &i22, data.gamma())?)?);
    Ok(InversionReport {
        r,
        omega,
        inverse: inv,
        omega_r_residual,
        r_omega_residual,
        formula_residuals: [f1, f2, f3, f4, f5, f6],
        window: w,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleInverse {
    pub inverse: BlockOperator,
    /// ||op inv - I||_F
    pub residual: f64,
    pub condition: f64,
    pub sigma_min: f64,
}

/// Dense LU inverse of a square operator with a conditioning guard.
pub fn oracle_inverse(op: &BlockOperator, tol: &Tolerances) -> Result<OracleInverse> {
    if op.domain != op.codomain {
        return Err(Error::BasisMismatch { left: op.domain.to_string(), right: op.codomain.to_string() });
    }
    let sv = singular_values(&op.matrix);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    let condition = condition_number(&op.matrix);
    if !(condition < tol.oracle_condition) {
        return Err(Error::Singular { what: format!("operator (sigma_min {sigma_min:.3e})"), condition });
    }
    let inverse = op_inverse(op)?;
    let residual = op.compose(&inverse)?.identity_residual()?;
    Ok(OracleInverse { inverse, residual, condition, sigma_min })
}

/// Data for which g solves the problem: Omega [alpha; gamma] = [e; 0], Omega [beta; delta] = [0; e],
/// solved densely on the window deg g.
pub fn recover_data<A: Algebra>(alg: &A, g: &A::Elem, tol: &Tolerances) -> Result<DataSet<A>> {
    let w = alg.degree(g);
    let omega = build_omega(alg, g, w)?;
    let condition = condition_number(&omega.matrix);
    if !(condition <= tol.oracle_condition) {
        return Err(Error::Singular { what: "Omega(g)".into(), condition });
    }
    let (xp, ym) = half_spaces(alg, w);
    let (nx, ny) = (xp.dim(), ym.dim());
    let ea = alg.column_blocks(&alg.identity(alg.p()))?;
    let ed = alg.column_blocks(&alg.identity(alg.q()))?;
    let mut rhs = zeros(nx + ny, ea.len() + ed.len());
    for (k, e) in ea.iter().enumerate() {
        let v = alg.coords(&xp, e)?;
        rhs.view_mut((0, k), (nx, 1)).copy_from(&v);
    }
    for (k, e) in ed.iter().enumerate() {
        let v = alg.coords(&ym, e)?;
        rhs.view_mut((nx, ea.len() + k), (ny, 1)).copy_from(&v);
    }
    let sol = solve(&omega.matrix, &rhs).ok_or(Error::Singular { what: "Omega(g)".into(), condition })?;
    let part = |k: usize, top: bool| {
        let col = sol.column(k);
        if top {
            alg.from_coords(&xp, &col.rows(0, nx).into_owned())
        } else {
            alg.from_coords(&ym, &col.rows(nx, ny).into_owned())
        }
    };
    let na = ea.len();
    let alpha = alg.hcat(&(0..na).map(|k| part(k, true)).collect::<Vec<_>>())?;
    let gamma = alg.hcat(&(0..na).map(|k| part(k, false)).collect::<Vec<_>>())?;
    let beta = alg.hcat(&(na..na + ed.len()).map(|k| part(k, true)).collect::<Vec<_>>())?;
    let delta = alg.hcat(&(na..na + ed.len()).map(|k| part(k, false)).collect::<Vec<_>>())?;
    DataSet::new(alg.clone(), alpha, beta, gamma, delta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedInstance<A: Algebra> {
    pub g: A::Elem,
    pub data: DataSet<A>,
    pub seed: u64,
    pub degree: usize,
    /// draws needed to meet the conditioning bound (1 = first draw)
    pub attempts: usize,
    pub omega_condition: f64,
}

pub const MAX_ATTEMPTS: usize = 100;

/// Random g in B+ with Gaussian entries scaled by 1/(support size), redrawn while
/// cond(Omega) exceeds the generator bound, and its data. Deterministic in `seed`.
pub fn generate_random_instance<A: Algebra>(alg: &A, degree: usize, seed: u64, tol: &Tolerances) -> Result<GeneratedInstance<A>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (p, q) = (alg.p(), alg.q());
    let support = match alg.kind() {
        InstanceKind::TriangularMatrix => p * (p + 1) / 2,
        InstanceKind::Sequence => p * q * (degree + 1),
    };
    let degree = if alg.kind() == InstanceKind::TriangularMatrix { 0 } else { degree };
    for attempt in 1..=MAX_ATTEMPTS {
        let g = alg.random(&mut rng, p, q, Mask::PLUS, degree);
        let g = alg.scale(&g, C64::new(1.0 / support as f64, 0.0));
        let omega = build_omega(alg, &g, alg.degree(&g))?;
        let omega_condition = condition_number(&omega.matrix);
        if !(omega_condition <= tol.generator_condition) {
            continue;
        }
        let data = recover_data(alg, &g, tol)?;
        return Ok(GeneratedInstance { g, data, seed, degree, attempts: attempt, omega_condition });
    }
    Err(Error::RetriesExhausted { attempts: MAX_ATTEMPTS, p, q, degree })
}

/// ||a - b||_F / ||b||_F (absolute when b = 0).
pub fn relative_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = frobenius(&(a - b));
    let n = frobenius(b);
    if n > 0.0 {
        d / n
    } else {
        d
    }
}
