//! Two-phase dense-tableau simplex over exact rationals.
//!
//! Pivoting follows Bland's rule (lowest eligible column enters, ties in the
//! ratio test go to the lowest basic variable), which rules out cycling and
//! makes every returned witness a deterministic function of the input.
//!
//! Dual values are reported as sensitivities: `dual[i]` is the rate at which
//! the optimal value moves when `rhs[i]` increases, for both senses.

use crate::error::{Error, Result};
use crate::exactlp::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn nonneg() -> Self {
        Bound { lower: Some(Rational::ZERO), upper: None }
    }

    pub fn free() -> Self {
        Bound { lower: None, upper: None }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bound { lower: Some(lower), upper: Some(upper) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables and no constraints.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![Bound::nonneg(); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> usize {
        self.constraints.push(Constraint { coefficients, relation, rhs });
        self.constraints.len() - 1
    }

    /// Adds a row given as `(variable, coefficient)` pairs; repeated variables accumulate.
    pub fn add_sparse_constraint(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) -> usize {
        let mut row = vec![Rational::ZERO; self.num_vars()];
        for (j, a) in terms {
            row[*j] += a;
        }
        self.add_constraint(row, relation, rhs)
    }

    pub fn set_bound(&mut self, var: usize, bound: Bound) {
        self.bounds[var] = bound;
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::structural(format!("{} bounds for {} variables", self.bounds.len(), n)));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(Error::structural(format!(
                    "constraint {i} has {} coefficients, objective has {n}",
                    c.coefficients.len()
                )));
            }
        }
        Ok(())
    }

    fn row_activity(&self, i: usize, x: &[Rational]) -> Rational {
        dot(&self.constraints[i].coefficients, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// One entry per constraint, `d value / d rhs`.
    pub dual: Vec<Rational>,
}

/// Multipliers `y` over the constraint rows with `y <= 0` on `<=` rows and
/// `y >= 0` on `>=` rows, such that every feasible point satisfies
/// `(y^T A) x >= y^T b` while no point of the bound box does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

/// A feasible point and a direction along which the objective improves without limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedRay {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    /// Checks the outcome's certificate against `lp` in exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> std::result::Result<(), String> {
        match self {
            LpOutcome::Optimal(s) => verify_optimal(lp, s),
            LpOutcome::Infeasible(f) => verify_farkas(lp, f),
            LpOutcome::Unbounded(r) => verify_ray(lp, r),
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::ZERO;
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

fn check_point(lp: &LinearProgram, x: &[Rational]) -> std::result::Result<(), String> {
    if x.len() != lp.num_vars() {
        return Err("point has wrong dimension".into());
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if b.lower.as_ref().is_some_and(|l| &x[j] < l) || b.upper.as_ref().is_some_and(|u| &x[j] > u) {
            return Err(format!("variable {j} = {} violates its bounds", x[j]));
        }
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let a = lp.row_activity(i, x);
        let ok = match c.relation {
            Relation::Le => a <= c.rhs,
            Relation::Eq => a == c.rhs,
            Relation::Ge => a >= c.rhs,
        };
        if !ok {
            return Err(format!("constraint {i}: activity {a} vs rhs {}", c.rhs));
        }
    }
    Ok(())
}

fn reduced_costs(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut d = lp.objective.clone();
    for (i, c) in lp.constraints.iter().enumerate() {
        if y[i].is_zero() {
            continue;
        }
        for (j, a) in c.coefficients.iter().enumerate() {
            if !a.is_zero() {
                d[j] -= &y[i] * a;
            }
        }
    }
    d
}

fn verify_optimal(lp: &LinearProgram, s: &LpSolution) -> std::result::Result<(), String> {
    check_point(lp, &s.primal)?;
    if s.dual.len() != lp.constraints.len() {
        return Err("dual has wrong dimension".into());
    }
    if dot(&lp.objective, &s.primal) != s.value {
        return Err("reported value differs from c.x".into());
    }
    let max = lp.sense == Sense::Maximize;
    for (i, c) in lp.constraints.iter().enumerate() {
        let y = &s.dual[i];
        let sign_ok = match (c.relation, max) {
            (Relation::Eq, _) => true,
            (Relation::Le, true) | (Relation::Ge, false) => !y.is_negative(),
            (Relation::Ge, true) | (Relation::Le, false) => !y.is_positive(),
        };
        if !sign_ok {
            return Err(format!("dual {i} = {y} has the wrong sign"));
        }
        if !y.is_zero() && lp.row_activity(i, &s.primal) != c.rhs {
            return Err(format!("complementary slackness fails on constraint {i}"));
        }
    }
    let d = reduced_costs(lp, &s.dual);
    let mut dual_value = dot(
        &s.dual,
        &lp.constraints.iter().map(|c| c.rhs.clone()).collect::<Vec<_>>(),
    );
    for (j, dj) in d.iter().enumerate() {
        if dj.is_zero() {
            continue;
        }
        let b = &lp.bounds[j];
        // Max: positive reduced cost needs x at its upper bound, negative at its lower.
        let pushes_up = dj.is_positive() == max;
        let bound = if pushes_up { &b.upper } else { &b.lower };
        match bound {
            Some(v) if *v == s.primal[j] => dual_value += dj * v,
            _ => return Err(format!("reduced cost {dj} of variable {j} is not supported by an active bound")),
        }
    }
    if dual_value != s.value {
        return Err(format!("dual objective {dual_value} differs from primal {}", s.value));
    }
    Ok(())
}

fn verify_farkas(lp: &LinearProgram, f: &FarkasCertificate) -> std::result::Result<(), String> {
    let y = &f.multipliers;
    if y.len() != lp.constraints.len() {
        return Err("certificate has wrong dimension".into());
    }
    let mut yb = Rational::ZERO;
    for (i, c) in lp.constraints.iter().enumerate() {
        let ok = match c.relation {
            Relation::Eq => true,
            Relation::Le => !y[i].is_positive(),
            Relation::Ge => !y[i].is_negative(),
        };
        if !ok {
            return Err(format!("multiplier {i} has the wrong sign"));
        }
        yb += &y[i] * &c.rhs;
    }
    // sup over the bound box of (y^T A) x
    let mut sup = Rational::ZERO;
    for (j, a) in reduced_costs(&LinearProgram { objective: vec![Rational::ZERO; lp.num_vars()], ..lp.clone() }, y)
        .iter()
        .map(|v| -v)
        .enumerate()
    {
        if a.is_zero() {
            continue;
        }
        let b = &lp.bounds[j];
        let side = if a.is_positive() { &b.upper } else { &b.lower };
        match side {
            Some(v) => sup += &a * v,
            None => return Err(format!("combined row is unbounded along variable {j}")),
        }
    }
    if sup < yb {
        Ok(())
    } else {
        Err(format!("no contradiction: sup {sup} >= {yb}"))
    }
}

fn verify_ray(lp: &LinearProgram, r: &UnboundedRay) -> std::result::Result<(), String> {
    check_point(lp, &r.point)?;
    let d = &r.direction;
    for (i, c) in lp.constraints.iter().enumerate() {
        let a = dot(&c.coefficients, d);
        let ok = match c.relation {
            Relation::Le => !a.is_positive(),
            Relation::Eq => a.is_zero(),
            Relation::Ge => !a.is_negative(),
        };
        if !ok {
            return Err(format!("direction leaves constraint {i}"));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if (b.lower.is_some() && d[j].is_negative()) || (b.upper.is_some() && d[j].is_positive()) {
            return Err(format!("direction leaves bound of variable {j}"));
        }
    }
    let gain = dot(&lp.objective, d);
    let improving = match lp.sense {
        Sense::Maximize => gain.is_positive(),
        Sense::Minimize => gain.is_negative(),
    };
    if improving {
        Ok(())
    } else {
        Err("direction does not improve the objective".into())
    }
}

/// How an original variable is expressed through nonnegative tableau columns.
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, bool)>, // (column, negated)
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    obj_value: Rational,
    /// Columns that may enter the basis.
    enterable: usize,
}

enum PhaseResult {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        if p != Rational::ONE {
            let inv = p.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][e].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        let f = self.obj[e].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.obj[j] -= &f * &prow[j];
            }
            self.obj_value += &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = e;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        self.obj = costs.to_vec();
        self.obj_value = Rational::ZERO;
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    self.obj[j] -= cb * v;
                }
            }
            self.obj_value += cb * &self.rhs[i];
        }
    }

    fn run(&mut self) -> PhaseResult {
        loop {
            let Some(e) = (0..self.enterable).find(|&j| self.obj[j].is_positive()) else {
                return PhaseResult::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return PhaseResult::Unbounded(e),
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Express every variable through nonnegative columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for b in &lp.bounds {
        let map = match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                let c = ncols;
                ncols += 1;
                if let Some(u) = upper {
                    bound_rows.push((c, u - l));
                }
                VarMap { offset: l.clone(), cols: vec![(c, false)] }
            }
            (None, Some(u)) => {
                let c = ncols;
                ncols += 1;
                VarMap { offset: u.clone(), cols: vec![(c, true)] }
            }
            (None, None) => {
                let c = ncols;
                ncols += 2;
                VarMap { offset: Rational::ZERO, cols: vec![(c, false), (c + 1, true)] }
            }
        };
        maps.push(map);
    }
    let nstruct = ncols;

    // Rows over structural columns, with offsets folded into the rhs.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![Rational::ZERO; nstruct];
        let mut rhs = c.rhs.clone();
        for (j, a) in c.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let m = &maps[j];
            if !m.offset.is_zero() {
                rhs -= a * &m.offset;
            }
            for &(col, neg) in &m.cols {
                row[col] = if neg { -a } else { a.clone() };
            }
        }
        rows.push((row, c.relation, rhs));
    }
    for (col, cap) in &bound_rows {
        let mut row = vec![Rational::ZERO; nstruct];
        row[*col] = Rational::ONE;
        rows.push((row, Relation::Le, cap.clone()));
    }
    let m = rows.len();

    let mut flipped = vec![false; m];
    for (i, (row, rel, rhs)) in rows.iter_mut().enumerate() {
        if rhs.is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
            *rhs = -&*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            flipped[i] = true;
        }
    }

    let nslack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = nstruct + nslack;
    let total = art_start + nart;

    let mut t_rows = Vec::with_capacity(m);
    let mut t_rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut init_col = Vec::with_capacity(m);
    let (mut s, mut a) = (nstruct, art_start);
    for (row, rel, rhs) in rows {
        let mut full = row;
        full.resize(total, Rational::ZERO);
        match rel {
            Relation::Le => {
                full[s] = Rational::ONE;
                basis.push(s);
                init_col.push(s);
                s += 1;
            }
            Relation::Ge => {
                full[s] = -Rational::ONE;
                s += 1;
                full[a] = Rational::ONE;
                basis.push(a);
                init_col.push(a);
                a += 1;
            }
            Relation::Eq => {
                full[a] = Rational::ONE;
                basis.push(a);
                init_col.push(a);
                a += 1;
            }
        }
        t_rows.push(full);
        t_rhs.push(rhs);
    }

    let mut t = Tableau {
        rows: t_rows,
        rhs: t_rhs,
        basis,
        obj: vec![Rational::ZERO; total],
        obj_value: Rational::ZERO,
        enterable: art_start,
    };

    // Phase one: maximize minus the sum of artificials.
    if nart > 0 {
        let mut costs = vec![Rational::ZERO; total];
        for c in costs.iter_mut().skip(art_start) {
            *c = -Rational::ONE;
        }
        t.set_costs(&costs);
        match t.run() {
            PhaseResult::Optimal => {}
            PhaseResult::Unbounded(_) => unreachable!("phase one objective is bounded above by zero"),
        }
        if t.obj_value.is_negative() {
            let mut multipliers = Vec::with_capacity(lp.constraints.len());
            for i in 0..lp.constraints.len() {
                let col = init_col[i];
                // y1 = c - r on the initial basic column; the certificate is -y1.
                let y1 = &costs[col] - &t.obj[col];
                let w = -y1;
                multipliers.push(if flipped[i] { -w } else { w });
            }
            return Ok(LpOutcome::Infeasible(FarkasCertificate { multipliers }));
        }
        // Drive zero-level artificials out where possible; the rest sit on redundant rows.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(e) = (0..art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, e);
                }
            }
        }
    }

    // Phase two.
    let mut costs = vec![Rational::ZERO; total];
    let max = lp.sense == Sense::Maximize;
    for (j, m) in maps.iter().enumerate() {
        let c = if max { lp.objective[j].clone() } else { -&lp.objective[j] };
        for &(col, neg) in &m.cols {
            costs[col] = if neg { -&c } else { c.clone() };
        }
    }
    t.set_costs(&costs);
    let outcome = t.run();

    let mut colval = vec![Rational::ZERO; total];
    for (i, &b) in t.basis.iter().enumerate() {
        colval[b] = t.rhs[i].clone();
    }
    let to_original = |vals: &[Rational], with_offset: bool| -> Vec<Rational> {
        maps.iter()
            .map(|m| {
                let mut v = if with_offset { m.offset.clone() } else { Rational::ZERO };
                for &(col, neg) in &m.cols {
                    if neg {
                        v -= &vals[col];
                    } else {
                        v += &vals[col];
                    }
                }
                v
            })
            .collect()
    };
    let primal = to_original(&colval, true);

    match outcome {
        PhaseResult::Unbounded(e) => {
            let mut dir = vec![Rational::ZERO; total];
            dir[e] = Rational::ONE;
            for (i, &b) in t.basis.iter().enumerate() {
                dir[b] = -&t.rows[i][e];
            }
            Ok(LpOutcome::Unbounded(UnboundedRay { point: primal, direction: to_original(&dir, false) }))
        }
        PhaseResult::Optimal => {
            let value = dot(&lp.objective, &primal);
            let dual = (0..lp.constraints.len())
                .map(|i| {
                    let y = -&t.obj[init_col[i]];
                    let y = if flipped[i] { -y } else { y };
                    if max {
                        y
                    } else {
                        -y
                    }
                })
                .collect();
            Ok(LpOutcome::Optimal(LpSolution { value, primal, dual }))
        }
    }
}
