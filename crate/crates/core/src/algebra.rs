//! The coordinate algebra of the quantum Euclidean sphere: words in the
//! generators x_1..x_N modulo the braided commutation relations and the
//! inhomogeneous sphere relation.
//!
//! The quotient is realised by degree-bounded linear reduction. The
//! degree-d component is presented on the spanning set
//! {x_a * b : b a basis word of degree d-1} and row-reduced against the
//! defining relations applied in front of every basis word of degree d-2;
//! pivots sit on order-maximal words (degree-lexicographic, x_1 < .. < x_N),
//! so basis words form a suffix-closed staircase and reduction of any
//! bounded-degree word proceeds by generator-action table lookups.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::scalar::{MultiPoly, Scalar};
use crate::tensor::{k_tensor, rhat_inv, Metric};

/// Word in the generators; entries are 1-based generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn unit() -> Word {
        Word(vec![])
    }

    pub fn gen(i: u8) -> Word {
        Word(vec![i])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&rhs.0);
        Word(v)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree-lexicographic order with x_1 < x_2 < ... < x_N.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("x{}", i)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Coefficient ring for algebra elements: exact scalars for concrete
/// computations, ansatz polynomials for the classification engine.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn mul_scalar(&self, s: &Scalar) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }
    fn mul_scalar(&self, s: &Scalar) -> Self {
        self.mul(s)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
}

impl Coeff for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }
    fn mul_scalar(&self, s: &Scalar) -> Self {
        self.scale(s)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }
}

/// Finite linear combination of words with coefficients in C.
#[derive(Debug, Clone)]
pub struct AlgebraElement<C = Scalar> {
    terms: BTreeMap<Word, C>,
    normalized: bool,
}

impl<C: Coeff> PartialEq for AlgebraElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<C: Coeff> Default for AlgebraElement<C> {
    fn default() -> Self {
        AlgebraElement { terms: BTreeMap::new(), normalized: true }
    }
}

impl<C: Coeff> AlgebraElement<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(Word::unit(), c);
        e
    }

    pub fn from_word(w: Word, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e.normalized = false;
        e
    }

    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        self.normalized = false;
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out.normalized = self.normalized && rhs.normalized;
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.neg());
        }
        out.normalized = self.normalized && rhs.normalized;
        out
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        if s.is_zero() {
            return out;
        }
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), c.mul_scalar(s));
        }
        out.normalized = self.normalized;
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }
}

impl AlgebraElement<Scalar> {
    pub fn generator(i: u8) -> Self {
        Self::from_word(Word::gen(i), Scalar::one())
    }
}

impl<C: Coeff> fmt::Display for AlgebraElement<C>
where
    C: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if w.degree() == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({}) * {}", c, w)?;
            }
        }
        Ok(())
    }
}

/// Defining relation in front form: quadratic part plus a constant tail.
struct Relation {
    quad: Vec<(u8, u8, Scalar)>,
    constant: Scalar,
}

#[derive(Debug, Clone)]
enum Action {
    /// x_a * f is itself a basis word.
    Basis(usize),
    /// x_a * f reduces to a combination of basis words.
    Expansion(Vec<(usize, Scalar)>),
}

/// The quantum sphere algebra with its reduction table built up to a
/// fixed degree bound.
pub struct SphereAlgebra {
    n: usize,
    max_degree: usize,
    metric: Metric,
    basis: Vec<Word>,
    index: HashMap<Word, usize>,
    ranges: Vec<Range<usize>>,
    /// actions[d] resolves products x_a * f with f of degree d-1 (d >= 1).
    actions: Vec<HashMap<(u8, usize), Action>>,
    relations: Vec<AlgebraElement>,
    relation_pivots: Vec<usize>,
}

impl SphereAlgebra {
    pub fn new(n: usize, max_degree: usize) -> Result<SphereAlgebra> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        let metric = Metric::new(n)?;
        let relations = defining_relations(n)?;
        let front: Vec<Relation> = relations
            .iter()
            .map(|r| {
                let mut quad = vec![];
                let mut constant = Scalar::zero();
                for (w, c) in r.terms() {
                    match w.degree() {
                        2 => quad.push((w.0[0], w.0[1], c.clone())),
                        0 => constant = constant.add(c),
                        _ => unreachable!("defining relations are quadratic plus constant"),
                    }
                }
                Relation { quad, constant }
            })
            .collect();

        let mut alg = SphereAlgebra {
            n,
            max_degree,
            metric,
            basis: vec![Word::unit()],
            index: HashMap::from([(Word::unit(), 0)]),
            ranges: vec![0..1],
            actions: vec![HashMap::new()],
            relations,
            relation_pivots: vec![0],
        };
        for d in 1..=max_degree {
            alg.build_degree(d, &front)?;
        }
        Ok(alg)
    }

    fn build_degree(&mut self, d: usize, front: &[Relation]) -> Result<()> {
        let prev: Vec<usize> = self.ranges[d - 1].clone().collect();
        // pair columns ordered by word, descending; pivots prefer maximal words
        let mut pairs: Vec<(u8, usize)> = vec![];
        for id in &prev {
            for a in 1..=self.n as u8 {
                pairs.push((a, *id));
            }
        }
        let basis_snapshot: Vec<Word> = self.basis.clone();
        let pair_word = move |a: u8, id: usize| -> Word {
            let mut v = vec![a];
            v.extend_from_slice(&basis_snapshot[id].0);
            Word(v)
        };
        pairs.sort_by(|x, y| pair_word(y.0, y.1).cmp(&pair_word(x.0, x.1)));
        let pair_rank: HashMap<(u8, usize), u32> = pairs
            .iter()
            .enumerate()
            .map(|(r, p)| (*p, r as u32))
            .collect();
        let lower_offset = pairs.len() as u32;

        // relation rows: each defining relation applied in front of each
        // basis word of degree d-2
        let mut rows: Vec<BTreeMap<u32, Scalar>> = vec![];
        if d >= 2 {
            for e in self.ranges[d - 2].clone() {
                for rel in front {
                    let mut row: BTreeMap<u32, Scalar> = BTreeMap::new();
                    let mut add = |col: u32, v: &Scalar| {
                        if v.is_zero() {
                            return;
                        }
                        let slot = row.entry(col).or_insert_with(Scalar::zero);
                        *slot = slot.add(v);
                        if slot.is_zero() {
                            row.remove(&col);
                        }
                    };
                    for (a, b, c) in &rel.quad {
                        for (fid, fc) in self.apply_gen_id(*b, e)? {
                            let coeff = c.mul(&fc);
                            if self.basis[fid].degree() == d - 1 {
                                add(pair_rank[&(*a, fid)], &coeff);
                            } else {
                                // lower tail: push x_a through as well
                                for (gid, gc) in self.apply_gen_id(*a, fid)? {
                                    add(lower_offset + gid as u32, &coeff.mul(&gc));
                                }
                            }
                        }
                    }
                    if !rel.constant.is_zero() {
                        add(lower_offset + e as u32, &rel.constant);
                    }
                    if !row.is_empty() {
                        rows.push(row);
                    }
                }
            }
        }

        // row reduction with full back-substitution
        let mut pivots: BTreeMap<u32, usize> = BTreeMap::new();
        let mut stored: Vec<BTreeMap<u32, Scalar>> = vec![];
        for mut row in rows {
            loop {
                let lead = match row.iter().next() {
                    None => break,
                    Some((c, _)) => *c,
                };
                match pivots.get(&lead) {
                    Some(&ridx) => {
                        let factor = row[&lead].clone();
                        let prow = stored[ridx].clone();
                        for (c, v) in &prow {
                            let dec = factor.mul(v);
                            let slot = row.entry(*c).or_insert_with(Scalar::zero);
                            *slot = slot.sub(&dec);
                            if slot.is_zero() {
                                row.remove(c);
                            }
                        }
                    }
                    None => {
                        assert!(
                            lead < lower_offset,
                            "relation collapsed onto existing basis words; reduction table is inconsistent"
                        );
                        let inv = row[&lead].inv().expect("nonzero pivot");
                        for v in row.values_mut() {
                            *v = v.mul(&inv);
                        }
                        pivots.insert(lead, stored.len());
                        stored.push(row);
                        break;
                    }
                }
            }
        }
        // back-substitution so every pivot row references only non-pivots
        let pivot_cols: Vec<u32> = pivots.keys().copied().collect();
        for &c in pivot_cols.iter().rev() {
            let src = stored[pivots[&c]].clone();
            for &c2 in pivot_cols.iter() {
                if c2 >= c {
                    break;
                }
                let ridx = pivots[&c2];
                if let Some(f) = stored[ridx].get(&c).cloned() {
                    for (cc, v) in &src {
                        let dec = f.mul(v);
                        let slot = stored[ridx].entry(*cc).or_insert_with(Scalar::zero);
                        *slot = slot.sub(&dec);
                        if slot.is_zero() {
                            stored[ridx].remove(cc);
                        }
                    }
                    stored[ridx].remove(&c);
                }
            }
        }

        // new basis: non-pivot pairs, ascending word order
        let start = self.basis.len();
        let mut new_words: Vec<(u8, usize)> = pairs
            .iter()
            .filter(|p| !pivots.contains_key(&pair_rank[p]))
            .cloned()
            .collect();
        new_words.sort_by(|x, y| pair_word(x.0, x.1).cmp(&pair_word(y.0, y.1)));
        let mut rank_to_new: HashMap<u32, usize> = HashMap::new();
        for (a, id) in &new_words {
            let w = pair_word(*a, *id);
            let bid = self.basis.len();
            rank_to_new.insert(pair_rank[&(*a, *id)], bid);
            self.index.insert(w.clone(), bid);
            self.basis.push(w);
        }
        self.ranges.push(start..self.basis.len());

        // action table for this degree
        let mut table: HashMap<(u8, usize), Action> = HashMap::new();
        for (a, id) in &pairs {
            let rank = pair_rank[&(*a, *id)];
            match pivots.get(&rank) {
                None => {
                    table.insert((*a, *id), Action::Basis(rank_to_new[&rank]));
                }
                Some(&ridx) => {
                    let mut exp: Vec<(usize, Scalar)> = vec![];
                    for (c, v) in &stored[ridx] {
                        if *c == rank {
                            continue;
                        }
                        let target = if *c < lower_offset {
                            rank_to_new[c]
                        } else {
                            (*c - lower_offset) as usize
                        };
                        exp.push((target, v.neg()));
                    }
                    table.insert((*a, *id), Action::Expansion(exp));
                }
            }
        }
        self.actions.push(table);
        self.relation_pivots.push(pivots.len());
        Ok(())
    }

    /// x_a * basis[id], as a sparse combination of basis indices.
    fn apply_gen_id(&self, a: u8, id: usize) -> Result<Vec<(usize, Scalar)>> {
        let d = self.basis[id].degree() + 1;
        if d > self.max_degree {
            return Err(Error::DegreeExceeded { needed: d, bound: self.max_degree });
        }
        match &self.actions[d][&(a, id)] {
            Action::Basis(b) => Ok(vec![(*b, Scalar::one())]),
            Action::Expansion(e) => Ok(e.clone()),
        }
    }

    fn apply_gen<C: Coeff>(&self, a: u8, combo: &BTreeMap<usize, C>) -> Result<BTreeMap<usize, C>> {
        let mut out: BTreeMap<usize, C> = BTreeMap::new();
        for (id, c) in combo {
            for (tid, tc) in self.apply_gen_id(a, *id)? {
                let add = c.mul_scalar(&tc);
                match out.entry(tid) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        if !add.is_zero() {
                            e.insert(add);
                        }
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        e.get_mut().add_assign_ref(&add);
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduces a raw word to basis coordinates.
    pub fn word_coords(&self, w: &Word) -> Result<Vec<(usize, Scalar)>> {
        if w.degree() > self.max_degree {
            return Err(Error::DegreeExceeded { needed: w.degree(), bound: self.max_degree });
        }
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::from([(0usize, Scalar::one())]);
        for a in w.0.iter().rev() {
            combo = self.apply_gen(*a, &combo)?;
        }
        Ok(combo.into_iter().collect())
    }

    pub fn normal_form<C: Coeff>(&self, e: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
        let mut coords: BTreeMap<usize, C> = BTreeMap::new();
        for (w, c) in e.terms() {
            for (id, s) in self.word_coords(w)? {
                let add = c.mul_scalar(&s);
                match coords.entry(id) {
                    std::collections::btree_map::Entry::Vacant(en) => {
                        if !add.is_zero() {
                            en.insert(add);
                        }
                    }
                    std::collections::btree_map::Entry::Occupied(mut en) => {
                        en.get_mut().add_assign_ref(&add);
                        if en.get().is_zero() {
                            en.remove();
                        }
                    }
                }
            }
        }
        let mut out = AlgebraElement::<C>::zero();
        for (id, c) in coords {
            out.terms.insert(self.basis[id].clone(), c);
        }
        out.normalized = true;
        Ok(out)
    }

    /// Product of two elements, in normal form.
    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        let mut raw = AlgebraElement::zero();
        for (wa, ca) in a.terms() {
            for (wb, cb) in b.terms() {
                raw.add_term(wa.concat(wb), ca.mul(cb));
            }
        }
        self.normal_form(&raw)
    }

    /// e * w for a word w, in normal form.
    pub fn mul_word<C: Coeff>(&self, e: &AlgebraElement<C>, w: &Word) -> Result<AlgebraElement<C>> {
        let mut raw = AlgebraElement::<C>::zero();
        for (we, c) in e.terms() {
            raw.add_term(we.concat(w), c.clone());
        }
        self.normal_form(&raw)
    }

    /// w * e for a word w, in normal form.
    pub fn word_mul<C: Coeff>(&self, w: &Word, e: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
        let mut raw = AlgebraElement::<C>::zero();
        for (we, c) in e.terms() {
            raw.add_term(w.concat(we), c.clone());
        }
        self.normal_form(&raw)
    }

    /// The antimultiplicative involution x_i -> C^{ij} x_j.
    pub fn star(&self, e: &AlgebraElement) -> Result<AlgebraElement> {
        let mut raw = AlgebraElement::zero();
        for (w, c) in e.terms() {
            let mut scalar = c.clone();
            let mut letters = vec![];
            for &i in w.0.iter().rev() {
                let ip = crate::tensor::prime(self.n, i as usize);
                scalar = scalar.mul(&self.metric.get(i as usize, ip));
                letters.push(ip as u8);
            }
            raw.add_term(Word(letters), scalar);
        }
        self.normal_form(&raw)
    }

    /// dim W(k): number of basis words of degree exactly k.
    pub fn graded_dimension(&self, k: usize) -> usize {
        self.ranges[k].len()
    }

    pub fn basis_words(&self, k: usize) -> &[Word] {
        &self.basis[self.ranges[k].clone()]
    }

    pub fn basis_word(&self, id: usize) -> &Word {
        &self.basis[id]
    }

    /// Number of pivot rows found while reducing degree d.
    pub fn relation_pivots(&self, d: usize) -> usize {
        self.relation_pivots[d]
    }

    pub fn defining_relations(&self) -> &[AlgebraElement] {
        &self.relations
    }

    /// C^{kl} x_k x_l as a raw element.
    pub fn sphere_element(&self) -> AlgebraElement {
        let mut e = AlgebraElement::zero();
        for ((k, l), c) in self.metric.entries() {
            e.add_term(Word(vec![*k as u8, *l as u8]), c.clone());
        }
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }
}

/// The defining relations: for each index pair the braided commutation
/// relation, plus the inhomogeneous sphere relation. Linearly dependent
/// rows are kept; row reduction eliminates them.
pub fn defining_relations(n: usize) -> Result<Vec<AlgebraElement>> {
    let rinv = rhat_inv(n)?;
    let k = k_tensor(n)?;
    let metric = Metric::new(n)?;
    // (q^{N-1} - q^{N-3}) / (1 + q^{N-2})
    let nn = n as i64;
    let coeff = Scalar::q_pow(nn - 1)
        .sub(&Scalar::q_pow(nn - 3))
        .div(&Scalar::one().add(&Scalar::q_pow(nn - 2)))?;
    let qinv = Scalar::q_pow(-1);

    let mut rels = vec![];
    for i in 1..=n {
        for j in 1..=n {
            let mut e = AlgebraElement::zero();
            for (kk, ll, c) in rinv.column(i, j) {
                e.add_term(Word(vec![kk as u8, ll as u8]), c);
            }
            e.add_term(Word(vec![i as u8, j as u8]), qinv.neg());
            for (kk, ll, c) in k.column(i, j) {
                e.add_term(Word(vec![kk as u8, ll as u8]), c.mul(&coeff).neg());
            }
            rels.push(e);
        }
    }
    let mut sphere = AlgebraElement::zero();
    for ((kk, ll), c) in metric.entries() {
        sphere.add_term(Word(vec![*kk as u8, *ll as u8]), c.clone());
    }
    sphere.add_term(Word::unit(), Scalar::from_int(-1));
    rels.push(sphere);
    Ok(rels)
}

/// Classical flat dimension C(N+k-1, k) - C(N+k-3, k-2).
pub fn classical_dimension(n: usize, k: usize) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as usize
    }
    let first = binom(n + k - 1, k);
    let second = if k >= 2 { binom(n + k - 3, k - 2) } else { 0 };
    first - second
}
