//! Classification engine for covariant first order differential calculi
//! with a fixed ansatz for the bimodule structure.
//!
//! With symbolic unknowns a1..a4 the right action is expanded to left
//! normal form; comparing coefficients of independent basis terms yields
//! polynomial constraints. The solving strategy follows a fixed path:
//! linear elimination of a2 and a4, branching on the roots of the pure
//! a1 constraint, linear solving for a3, then a full residual check.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraElement, Coeff, Word};
use crate::error::{Error, Result};
use crate::scalar::{univariate_gcd, MultiPoly, Scalar};


use super::{BimoduleRule, Calculus, OneForm, OneFormBasis, Sign};

/// Classification constraint: a free left module on the differentials, or
/// left-module relations generated by vanishing of the invariant one-form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Free,
    ThetaZero,
}

impl Constraint {
    pub fn label(self) -> &'static str {
        match self {
            Constraint::Free => "free",
            Constraint::ThetaZero => "theta-zero",
        }
    }
}

/// Outcome of the classification run.
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub constraint: Constraint,
    pub n: usize,
    /// deduplicated constraint polynomials extracted from the conditions
    pub constraints: Vec<MultiPoly>,
    /// solved linear eliminations, one entry per eliminated unknown:
    /// (index, expression in the remaining unknowns)
    pub eliminations: Vec<(usize, MultiPoly)>,
    /// the pure-a1 polynomial that drives the branching (coefficient list)
    pub branch_polynomial: Vec<Scalar>,
    /// solutions as [a1, a2, a3, a4]
    pub solutions: Vec<[Scalar; 4]>,
    pub solvable: bool,
    /// for the theta-zero constraint: contradictory univariate witnesses
    pub witnesses: Vec<Vec<Scalar>>,
    pub witness_gcd: Vec<Scalar>,
    /// completeness of the classification semantics (N >= 6)
    pub complete: bool,
    /// set when the elimination path could not be carried out
    pub underdetermined: Option<String>,
}

fn sym_rule(constraint: Constraint) -> BimoduleRule<MultiPoly> {
    match constraint {
        Constraint::Free => BimoduleRule {
            a1: MultiPoly::var(0),
            a2: MultiPoly::var(1),
            a3: MultiPoly::var(2),
            a4: MultiPoly::var(3),
        },
        Constraint::ThetaZero => BimoduleRule {
            a1: MultiPoly::var(0),
            a2: MultiPoly::var(1),
            a3: MultiPoly::zero(),
            a4: MultiPoly::zero(),
        },
    }
}

/// Evaluates the four families of compatibility conditions for an
/// arbitrary coefficient rule. Every returned form must vanish for the
/// rule to define a differential calculus.
pub fn condition_forms<C: Coeff>(
    calc: &Calculus,
    rule: &BimoduleRule<C>,
) -> Result<Vec<(String, OneForm<C>)>> {
    let n = calc.n();
    let metric = calc.metric();
    let rinv = calc.rhat_inv();
    let rhat = calc.rhat();
    let nn = n as i64;
    // coefficient of the quadratic defining relation
    let c_rel = Scalar::q_pow(nn - 1)
        .sub(&Scalar::q_pow(nn - 3))
        .div(&Scalar::one().add(&Scalar::q_pow(nn - 2)))?;
    // tail coefficient of the right-sided condition
    let c4 = Scalar::q()
        .sub(&Scalar::q_pow(-1))
        .div(&Scalar::one().add(&Scalar::q_pow(nn - 2)))?;

    // s_ij = dx_i x_j + x_i dx_j
    let mut s = BTreeMap::new();
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            let d = calc.right_mult_gen_with(&OneForm::<C>::dx(i), j, rule)?;
            let mut x_dx = OneForm::<C>::zero(OneFormBasis::Dx);
            x_dx.add_term(Word::gen(i), j, C::one());
            s.insert((i, j), d.add(&x_dx));
        }
    }

    let mut out = vec![];

    // differentiated sphere relation: C^{ij} s_ij = 0
    let mut cond1 = OneForm::<C>::zero(OneFormBasis::Dx);
    for ((i, j), c) in metric.entries() {
        cond1 = cond1.add(&s[&(*i as u8, *j as u8)].scale(c));
    }
    out.push(("d-sphere".to_string(), cond1));

    // differentiated quadratic relation:
    // Rinv^{kl}_{ij} s_kl - q^-1 s_ij - c_rel K^{kl}_{ij} s_kl = 0
    let mut c_contracted_s = OneForm::<C>::zero(OneFormBasis::Dx);
    for ((k, l), c) in metric.entries() {
        c_contracted_s = c_contracted_s.add(&s[&(*k as u8, *l as u8)].scale(c));
    }
    for i in 1..=n as u8 {
        for j in 1..=n as u8 {
            let mut f = s[&(i, j)].scale(&Scalar::q_pow(-1)).neg();
            for (k, l, c) in rinv.column(i as usize, j as usize) {
                f = f.add(&s[&(k as u8, l as u8)].scale(&c));
            }
            let cij = metric.get(i as usize, j as usize);
            if !cij.is_zero() {
                f = f.add(&c_contracted_s.scale(&cij.mul(&c_rel)).neg());
            }
            out.push((format!("d-quadratic({},{})", i, j), f));
        }
    }

    // double products (dx_i x_k) x_l
    let mut dd = BTreeMap::new();
    for i in 1..=n as u8 {
        for k in 1..=n as u8 {
            let first = calc.right_mult_gen_with(&OneForm::<C>::dx(i), k, rule)?;
            for l in 1..=n as u8 {
                dd.insert((i, k, l), calc.right_mult_gen_with(&first, l, rule)?);
            }
        }
    }

    // sphere relation acting from the right: C^{kl} dx_i x_k x_l = dx_i
    for i in 1..=n as u8 {
        let mut f = OneForm::<C>::dx(i).neg();
        for ((k, l), c) in metric.entries() {
            f = f.add(&dd[&(i, *k as u8, *l as u8)].scale(c));
        }
        out.push((format!("sphere-right({})", i), f));
    }

    // quadratic relation acting from the right:
    // R^{st}_{kl} dx_i x_s x_t - q dx_i x_k x_l + c4 C_kl dx_i = 0
    for i in 1..=n as u8 {
        for k in 1..=n as u8 {
            for l in 1..=n as u8 {
                let mut f = dd[&(i, k, l)].scale(&Scalar::q()).neg();
                for (ss, tt, c) in rhat.column(k as usize, l as usize) {
                    f = f.add(&dd[&(i, ss as u8, tt as u8)].scale(&c));
                }
                let ckl = metric.get(k as usize, l as usize);
                if !ckl.is_zero() {
                    f = f.add(&OneForm::<C>::dx(i).scale(&ckl.mul(&c4)));
                }
                out.push((format!("quadratic-right({},{},{})", i, k, l), f));
            }
        }
    }

    Ok(out)
}

/// Rows spanning the left submodule generated by the invariant one-form,
/// used to extract coefficients modulo theta = 0.
fn theta_submodule_rows(calc: &Calculus, word_bound: usize) -> Result<Vec<BTreeMap<(Word, u8), Scalar>>> {
    let alg = calc.algebra();
    let metric = calc.metric();
    let mut rows = vec![];
    for d in 0..=word_bound {
        for w in alg.basis_words(d) {
            let mut row: BTreeMap<(Word, u8), Scalar> = BTreeMap::new();
            for ((k, l), c) in metric.entries() {
                let e = alg.mul_word(&AlgebraElement::from_word(w.clone(), Scalar::one()), &Word::gen(*k as u8))?;
                for (we, ce) in e.terms() {
                    let key = (we.clone(), *l as u8);
                    let cur = row.entry(key.clone()).or_insert_with(Scalar::zero);
                    *cur = cur.add(&ce.mul(c));
                    if cur.is_zero() {
                        row.remove(&key);
                    }
                }
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Sparse row reduction over ordered keys; pivots on the largest key.
fn rref<K: Ord + Clone>(rows: Vec<BTreeMap<K, Scalar>>) -> Vec<BTreeMap<K, Scalar>> {
    let mut pivots: Vec<BTreeMap<K, Scalar>> = vec![];
    for mut row in rows {
        loop {
            let lead = match row.iter().next_back() {
                None => break,
                Some((k, _)) => k.clone(),
            };
            let mut hit = None;
            for (idx, p) in pivots.iter().enumerate() {
                if p.iter().next_back().map(|(k, _)| k) == Some(&lead) {
                    hit = Some(idx);
                    break;
                }
            }
            match hit {
                None => {
                    let inv = row[&lead].inv().expect("nonzero pivot");
                    for v in row.values_mut() {
                        *v = v.mul(&inv);
                    }
                    pivots.push(row);
                    break;
                }
                Some(idx) => {
                    let f = row[&lead].clone();
                    let p = pivots[idx].clone();
                    for (k, v) in &p {
                        let dec = f.mul(v);
                        let slot = row.entry(k.clone()).or_insert_with(Scalar::zero);
                        *slot = slot.sub(&dec);
                        if slot.is_zero() {
                            row.remove(k);
                        }
                    }
                }
            }
        }
    }
    pivots
}

fn extract_constraints(
    forms: &[(String, OneForm<MultiPoly>)],
    theta_rows: Option<&[BTreeMap<(Word, u8), Scalar>]>,
) -> Vec<MultiPoly> {
    let mut set: Vec<MultiPoly> = vec![];
    for (_, form) in forms {
        // coefficient vector over (word, index)
        let mut coords: BTreeMap<(Word, u8), MultiPoly> = BTreeMap::new();
        for (i, e) in form.components() {
            for (w, c) in e.terms() {
                coords.insert((w.clone(), *i), c.clone());
            }
        }
        if let Some(rows) = theta_rows {
            for row in rows {
                let lead = row.iter().next_back().map(|(k, _)| k.clone()).unwrap();
                if let Some(c) = coords.get(&lead).cloned() {
                    for (k, v) in row {
                        let dec = c.scale(v);
                        let slot = coords.entry(k.clone()).or_insert_with(MultiPoly::zero);
                        *slot = slot.sub(&dec);
                        if slot.is_zero() {
                            coords.remove(k);
                        }
                    }
                }
            }
        }
        for (_, p) in coords {
            if p.is_zero() {
                continue;
            }
            let m = p.monic();
            if !set.contains(&m) {
                set.push(m);
            }
        }
    }
    set
}

/// Linear system solver over the unknowns; prefers to eliminate the
/// designated variables first. Returns (var index, solved expression).
fn solve_linear(
    constraints: &[MultiPoly],
    prefer: &[usize],
    others: &[usize],
) -> Vec<(usize, MultiPoly)> {
    let order: Vec<usize> = prefer.iter().chain(others.iter()).copied().collect();
    // rows: coefficients in the chosen order, then the constant
    let mut rows: Vec<Vec<Scalar>> = vec![];
    for c in constraints {
        if c.total_degree() > 1 {
            continue;
        }
        let mut row: Vec<Scalar> = order.iter().map(|v| c.linear_coeff(*v)).collect();
        row.push(c.constant_part());
        rows.push(row);
    }
    // dense RREF with pivot preference on leading columns
    let ncols = order.len();
    let mut pivots: Vec<(usize, Vec<Scalar>)> = vec![];
    for mut row in rows {
        for col in 0..ncols {
            if row[col].is_zero() {
                continue;
            }
            if let Some((_, p)) = pivots.iter().find(|(pc, _)| *pc == col) {
                let f = row[col].clone();
                for (j, v) in row.iter_mut().enumerate() {
                    *v = v.sub(&f.mul(&p[j]));
                }
            } else {
                let inv = row[col].inv().unwrap();
                for v in row.iter_mut() {
                    *v = v.mul(&inv);
                }
                pivots.push((col, row));
                break;
            }
        }
    }
    // back-substitute
    let cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    for i in 0..pivots.len() {
        for &c in &cols {
            if c == pivots[i].0 {
                continue;
            }
            let f = pivots[i].1[c].clone();
            if f.is_zero() {
                continue;
            }
            let src = pivots.iter().find(|(pc, _)| *pc == c).unwrap().1.clone();
            for (j, v) in pivots[i].1.iter_mut().enumerate() {
                *v = v.sub(&f.mul(&src[j]));
            }
        }
    }
    pivots
        .into_iter()
        .map(|(col, row)| {
            let var = order[col];
            let mut expr = MultiPoly::constant(row[ncols].neg());
            for (j, &v) in order.iter().enumerate() {
                if j == col {
                    continue;
                }
                expr = expr.add(&MultiPoly::var(v).scale(&row[j].neg()));
            }
            (var, expr)
        })
        .collect()
}

pub fn classify(constraint: Constraint, n: usize) -> Result<ClassificationResult> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let max_degree = match constraint {
        Constraint::Free => 6,
        Constraint::ThetaZero => 4,
    };
    // the calculus sign is irrelevant here; only the algebra and the
    // structure tensors are used by the symbolic expansion
    let calc = Calculus::new(Sign::Plus, n, max_degree)?;
    let rule = sym_rule(constraint);
    let forms = condition_forms(&calc, &rule)?;
    let theta_rows;
    let rows_ref = match constraint {
        Constraint::Free => None,
        Constraint::ThetaZero => {
            let raw = theta_submodule_rows(&calc, 3)?;
            theta_rows = rref(raw);
            Some(&theta_rows[..])
        }
    };
    let constraints = extract_constraints(&forms, rows_ref);

    let mut result = ClassificationResult {
        constraint,
        n,
        constraints: constraints.clone(),
        eliminations: vec![],
        branch_polynomial: vec![],
        solutions: vec![],
        solvable: false,
        witnesses: vec![],
        witness_gcd: vec![],
        complete: n >= 6,
        underdetermined: None,
    };

    // step 1: linear elimination of a2 (and a4 for the free constraint)
    let (prefer, others): (&[usize], &[usize]) = match constraint {
        Constraint::Free => (&[1, 3], &[0, 2]),
        Constraint::ThetaZero => (&[1], &[0]),
    };
    let solved = solve_linear(&constraints, prefer, others);
    for (var, _) in &solved {
        if !prefer.contains(var) {
            result.underdetermined = Some(format!(
                "linear constraints also pin unknown a{}, outside the expected elimination path",
                var + 1
            ));
        }
    }
    let mut eliminations: Vec<(usize, MultiPoly)> = vec![];
    for &v in prefer {
        match solved.iter().find(|(var, _)| *var == v) {
            Some((var, expr)) => eliminations.push((*var, expr.clone())),
            None => {
                result.underdetermined = Some(format!(
                    "no linear constraint eliminates a{}; the system is underdetermined",
                    v + 1
                ));
                result.eliminations = eliminations;
                return Ok(result);
            }
        }
    }
    // substitute a4 first (its expression may involve a2), then a2
    let mut reduced: Vec<MultiPoly> = constraints.clone();
    for (var, expr) in eliminations.iter().rev() {
        reduced = reduced.iter().map(|c| c.substitute(*var, expr)).collect();
        // also resolve earlier eliminations
    }
    // resolve chained eliminations so each is in terms of a1, a3 only
    let resolved: Vec<(usize, MultiPoly)> = eliminations
        .iter()
        .map(|(var, expr)| {
            let mut e = expr.clone();
            for (v2, e2) in &eliminations {
                if v2 != var {
                    e = e.substitute(*v2, e2);
                }
            }
            (*var, e)
        })
        .collect();
    result.eliminations = resolved.clone();

    let mut reduced_set: Vec<MultiPoly> = vec![];
    for c in reduced {
        if c.is_zero() {
            continue;
        }
        let m = c.monic();
        if !reduced_set.contains(&m) {
            reduced_set.push(m);
        }
    }

    // step 2: pure-a1 constraints
    let pure_a1: Vec<Vec<Scalar>> = reduced_set
        .iter()
        .filter_map(|c| c.as_univariate(0))
        .filter(|v| v.len() > 1)
        .collect();
    if pure_a1.is_empty() {
        result.underdetermined =
            Some("no constraint involves a1 alone; cannot branch".to_string());
        return Ok(result);
    }

    if constraint == Constraint::ThetaZero {
        // contradictory witnesses; report them and their gcd
        let mut witnesses: Vec<Vec<Scalar>> = vec![];
        for p in &pure_a1 {
            if !witnesses.contains(p) {
                witnesses.push(p.clone());
            }
        }
        let mut g = witnesses[0].clone();
        for w in &witnesses[1..] {
            g = univariate_gcd(&g, w);
        }
        result.solvable = g.len() > 1; // a common root would make it solvable
        result.witnesses = witnesses;
        result.witness_gcd = g;
        return Ok(result);
    }

    // free constraint: gcd of the pure-a1 polynomials drives the branching
    let mut branch = pure_a1[0].clone();
    for p in &pure_a1[1..] {
        branch = univariate_gcd(&branch, p);
    }
    result.branch_polynomial = branch.clone();
    // expected a1^2 - 1, roots +-1
    let expected = vec![Scalar::from_int(-1), Scalar::zero(), Scalar::one()];
    if branch != expected {
        result.underdetermined = Some(format!(
            "branch polynomial is not a1^2 - 1 (degree {})",
            branch.len().saturating_sub(1)
        ));
        return Ok(result);
    }

    'branch: for a1 in [Scalar::one(), Scalar::from_int(-1)] {
        let after: Vec<MultiPoly> = reduced_set
            .iter()
            .map(|c| c.substitute_scalar(0, &a1))
            .filter(|c| !c.is_zero())
            .collect();
        // remaining constraints are polynomials in a3; solve the linear ones
        let mut a3: Option<Scalar> = None;
        for c in &after {
            if let Some(u) = c.as_univariate(2) {
                if u.len() == 2 {
                    let root = u[0].neg().div(&u[1])?;
                    match &a3 {
                        None => a3 = Some(root),
                        Some(prev) => {
                            if *prev != root {
                                result.underdetermined = Some(
                                    "inconsistent linear constraints for a3".to_string(),
                                );
                                continue 'branch;
                            }
                        }
                    }
                }
            }
        }
        let a3 = match a3 {
            Some(v) => v,
            None => {
                result.underdetermined =
                    Some("no linear constraint determines a3".to_string());
                continue;
            }
        };
        // residual check over the full reduced system
        for c in &after {
            let r = c.substitute_scalar(2, &a3);
            if !r.is_zero() {
                result.underdetermined =
                    Some(format!("residual constraint does not vanish at a1={}", a1));
                continue 'branch;
            }
        }
        // recover a2 and a4
        let mut tuple = [a1.clone(), Scalar::zero(), a3.clone(), Scalar::zero()];
        for (var, expr) in &resolved {
            let v = expr
                .substitute_scalar(0, &a1)
                .substitute_scalar(2, &a3)
                .constant_part();
            tuple[*var] = v;
        }
        result.solutions.push(tuple);
    }
    result.solvable = !result.solutions.is_empty();
    Ok(result)
}

/// Residual check: substitutes a concrete rule into all four condition
/// families and verifies every one vanishes identically.
pub fn verify_rule(calc: &Calculus, rule: &BimoduleRule<Scalar>) -> Result<Vec<(String, bool)>> {
    let forms = condition_forms(calc, rule)?;
    Ok(forms
        .into_iter()
        .map(|(name, f)| (name, f.is_zero()))
        .collect())
}
