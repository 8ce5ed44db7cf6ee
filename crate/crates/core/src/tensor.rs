//! Structure data of O_q(N): the metric C, the identity, the rank-one
//! tensor K, the braided matrix and its inverse, and the spectral
//! projectors of the braided matrix.
//!
//! Index conventions: indices run 1..=N, the priming map is i' = N+1-i,
//! and a four-index tensor T^{kl}_{ij} is stored with the upper pair
//! first as [k, l, i, j].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 2 * rho_i for i in 1..=N, in the conventions of the orthogonal series.
pub fn two_rho(n: usize) -> Vec<i64> {
    (1..=n as i64)
        .map(|i| {
            let nn = n as i64;
            use std::cmp::Ordering::*;
            match (2 * i).cmp(&(nn + 1)) {
                Less => nn - 2 * i,
                Equal => 0,
                Greater => nn - 2 * i + 2,
            }
        })
        .collect()
}

pub fn prime(n: usize, i: usize) -> usize {
    n + 1 - i
}

/// The q-deformed metric: C^{ij} = C_{ij} = q^(-rho_i) when j = i'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    n: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Metric {
    pub fn new(n: usize) -> Result<Metric> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        let tr = two_rho(n);
        let mut entries = BTreeMap::new();
        for i in 1..=n {
            entries.insert((i, prime(n, i)), Scalar::s_pow(-tr[i - 1]));
        }
        Ok(Metric { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    /// tau = sum_i q^(-2 rho_i), the value of the contraction C^{ij} C_{ij}.
    pub fn tau(&self) -> Scalar {
        two_rho(self.n)
            .iter()
            .fold(Scalar::zero(), |acc, r| acc.add(&Scalar::s_pow(-2 * r)))
    }
}

/// Sparse four-index tensor over 1..=N, upper pair first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourTensor {
    n: usize,
    entries: BTreeMap<[usize; 4], Scalar>,
}

impl FourTensor {
    pub fn new(n: usize) -> FourTensor {
        FourTensor { n, entries: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, idx: [usize; 4], v: Scalar) {
        if v.is_zero() {
            self.entries.remove(&idx);
        } else {
            self.entries.insert(idx, v);
        }
    }

    pub fn add_to(&mut self, idx: [usize; 4], v: &Scalar) {
        let cur = self.get_ref(idx).cloned().unwrap_or_else(Scalar::zero);
        self.set(idx, cur.add(v));
    }

    pub fn get(&self, k: usize, l: usize, i: usize, j: usize) -> Scalar {
        self.entries.get(&[k, l, i, j]).cloned().unwrap_or_else(Scalar::zero)
    }

    fn get_ref(&self, idx: [usize; 4]) -> Option<&Scalar> {
        self.entries.get(&idx)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 4], &Scalar)> {
        self.entries.iter()
    }

    /// Entries with the given lower pair (i, j), as (k, l, coeff).
    pub fn column(&self, i: usize, j: usize) -> Vec<(usize, usize, Scalar)> {
        self.entries
            .iter()
            .filter(|(idx, _)| idx[2] == i && idx[3] == j)
            .map(|(idx, c)| (idx[0], idx[1], c.clone()))
            .collect()
    }

    pub fn identity(n: usize) -> FourTensor {
        let mut t = FourTensor::new(n);
        for i in 1..=n {
            for j in 1..=n {
                t.set([i, j, i, j], Scalar::one());
            }
        }
        t
    }

    pub fn add(&self, rhs: &FourTensor) -> FourTensor {
        let mut out = self.clone();
        for (idx, c) in &rhs.entries {
            out.add_to(*idx, c);
        }
        out
    }

    pub fn sub(&self, rhs: &FourTensor) -> FourTensor {
        self.add(&rhs.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> FourTensor {
        let mut out = FourTensor::new(self.n);
        if c.is_zero() {
            return out;
        }
        for (idx, v) in &self.entries {
            out.set(*idx, v.mul(c));
        }
        out
    }

    /// Composition (A o B)^{kl}_{ij} = sum_{mn} A^{kl}_{mn} B^{mn}_{ij}.
    pub fn compose(&self, rhs: &FourTensor) -> FourTensor {
        let mut by_upper: BTreeMap<(usize, usize), Vec<([usize; 4], &Scalar)>> = BTreeMap::new();
        for (idx, c) in &rhs.entries {
            by_upper.entry((idx[0], idx[1])).or_default().push((*idx, c));
        }
        let mut out = FourTensor::new(self.n);
        for (aidx, ac) in &self.entries {
            if let Some(bs) = by_upper.get(&(aidx[2], aidx[3])) {
                for (bidx, bc) in bs {
                    out.add_to([aidx[0], aidx[1], bidx[2], bidx[3]], &ac.mul(bc));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tensor kinds constructible from the dimension alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    C,
    I,
    K,
    Rhat,
    RhatInv,
}

/// K^{kl}_{ij} = C^{kl} C_{ij}.
pub fn k_tensor(n: usize) -> Result<FourTensor> {
    let c = Metric::new(n)?;
    let mut t = FourTensor::new(n);
    for ((k, l), a) in c.entries() {
        for ((i, j), b) in c.entries() {
            t.set([*k, *l, *i, *j], a.mul(b));
        }
    }
    Ok(t)
}

/// The braided matrix of O_q(N):
/// Rhat^{kl}_{ij} = q^{(k=l)-(k=l')} (i=l)(j=k)
///                + (q - q^-1) (i<l) ((i=k)(j=l) - K^{kl}_{ij}).
pub fn rhat(n: usize) -> Result<FourTensor> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let c = Metric::new(n)?;
    let u = Scalar::q().sub(&Scalar::q_pow(-1));
    let mut t = FourTensor::new(n);
    for i in 1..=n {
        for j in 1..=n {
            // permutation part: (k, l) = (j, i)
            let (k, l) = (j, i);
            let mut e = 0i64;
            if k == l {
                e += 2;
            }
            if k == prime(n, l) {
                e -= 2;
            }
            t.add_to([k, l, i, j], &Scalar::s_pow(e));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            for l in (i + 1)..=n {
                // (i=k)(j=l) part
                if j == l {
                    t.add_to([i, l, i, j], &u);
                }
                // -K^{kl}_{ij} part, nonzero only when j = i'
                if j == prime(n, i) {
                    let k = prime(n, l);
                    let v = c.get(k, l).mul(&c.get(i, j));
                    t.add_to([k, l, i, j], &v.neg().mul(&u));
                }
            }
        }
    }
    Ok(t)
}

/// Inverse braided matrix: Rhat - (q - q^-1)(I - K).
pub fn rhat_inv(n: usize) -> Result<FourTensor> {
    let u = Scalar::q().sub(&Scalar::q_pow(-1));
    let r = rhat(n)?;
    let i = FourTensor::identity(n);
    let k = k_tensor(n)?;
    Ok(r.sub(&i.sub(&k).scale(&u)))
}

/// Spectral projectors of the braided matrix.
///
/// P0 = K / tau; the remaining two come from Lagrange interpolation once
/// the eigenvalues are confirmed from the minimal polynomial. The
/// expected eigenvalue set {q, -q^-1, q^(1-N)} is verified, not assumed.
pub struct Projectors {
    pub plus: FourTensor,
    pub minus: FourTensor,
    pub zero: FourTensor,
    pub eigenvalues: [Scalar; 3],
}

pub fn spectral_projectors(n: usize) -> Result<Projectors> {
    let r = rhat(n)?;
    let k = k_tensor(n)?;
    let tau = Metric::new(n)?.tau();
    let id = FourTensor::identity(n);

    // candidate eigenvalues, confirmed below by annihilation and nonzero projectors
    let lam_plus = Scalar::q();
    let lam_minus = Scalar::q_pow(-1).neg();
    let lam_zero = Scalar::q_pow(1 - n as i64);
    let eigen = [lam_plus, lam_minus, lam_zero];
    for a in 0..3 {
        for b in (a + 1)..3 {
            if eigen[a] == eigen[b] {
                return Err(Error::SpectralError("eigenvalues are not pairwise distinct".into()));
            }
        }
    }

    // minimal polynomial check: (R - l+)(R - l-)(R - l0) = 0
    let mut acc = id.clone();
    for lam in &eigen {
        acc = acc.compose(&r.sub(&id.scale(lam)));
    }
    if !acc.is_zero() {
        return Err(Error::SpectralError(
            "expected cubic minimal polynomial does not annihilate the braided matrix".into(),
        ));
    }

    let mut proj = Vec::with_capacity(3);
    for e in 0..3 {
        let mut p = id.clone();
        let mut denom = Scalar::one();
        for f in 0..3 {
            if f == e {
                continue;
            }
            p = p.compose(&r.sub(&id.scale(&eigen[f])));
            denom = denom.mul(&eigen[e].sub(&eigen[f]));
        }
        let p = p.scale(&denom.inv().expect("distinct eigenvalues"));
        if p.is_zero() {
            return Err(Error::SpectralError(format!(
                "candidate eigenvalue {} has a zero projector",
                eigen[e]
            )));
        }
        proj.push(p);
    }
    let zero_from_k = k.scale(&tau.inv().expect("tau is nonzero"));
    if proj[2] != zero_from_k {
        return Err(Error::SpectralError("P0 does not match K / tau".into()));
    }
    Ok(Projectors {
        plus: proj[0].clone(),
        minus: proj[1].clone(),
        zero: proj[2].clone(),
        eigenvalues: eigen,
    })
}

/// Tensor or metric, as returned by the generic builder.
pub enum StructureTensor {
    Metric(Metric),
    Four(FourTensor),
}

pub fn build_structure_tensor(kind: StructureKind, n: usize) -> Result<StructureTensor> {
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(match kind {
        StructureKind::C => StructureTensor::Metric(Metric::new(n)?),
        StructureKind::I => StructureTensor::Four(FourTensor::identity(n)),
        StructureKind::K => StructureTensor::Four(k_tensor(n)?),
        StructureKind::Rhat => StructureTensor::Four(rhat(n)?),
        StructureKind::RhatInv => StructureTensor::Four(rhat_inv(n)?),
    })
}

/// Operator on triple tensor legs, for braid-relation checks: entries
/// map an input triple (i, j, k) to output triples with coefficients.
pub struct TripleOp {
    entries: BTreeMap<[usize; 3], Vec<([usize; 3], Scalar)>>,
}

impl TripleOp {
    /// A acting on legs (1, 2): (A tensor id).
    pub fn on_first_pair(a: &FourTensor) -> TripleOp {
        let n = a.n();
        let mut entries: BTreeMap<[usize; 3], Vec<([usize; 3], Scalar)>> = BTreeMap::new();
        for i in 1..=n {
            for j in 1..=n {
                let col = a.column(i, j);
                for k in 1..=n {
                    let outs = col.iter().map(|(u, v, c)| ([*u, *v, k], c.clone())).collect();
                    entries.insert([i, j, k], outs);
                }
            }
        }
        TripleOp { entries }
    }

    /// A acting on legs (2, 3): (id tensor A).
    pub fn on_second_pair(a: &FourTensor) -> TripleOp {
        let n = a.n();
        let mut entries: BTreeMap<[usize; 3], Vec<([usize; 3], Scalar)>> = BTreeMap::new();
        for j in 1..=n {
            for k in 1..=n {
                let col = a.column(j, k);
                for i in 1..=n {
                    let outs = col.iter().map(|(u, v, c)| ([i, *u, *v], c.clone())).collect();
                    entries.insert([i, j, k], outs);
                }
            }
        }
        TripleOp { entries }
    }

    pub fn apply(&self, v: &BTreeMap<[usize; 3], Scalar>) -> BTreeMap<[usize; 3], Scalar> {
        let mut out: BTreeMap<[usize; 3], Scalar> = BTreeMap::new();
        for (idx, c) in v {
            if let Some(outs) = self.entries.get(idx) {
                for (oidx, oc) in outs {
                    let add = c.mul(oc);
                    let cur = out.entry(*oidx).or_insert_with(Scalar::zero);
                    *cur = cur.add(&add);
                    if cur.is_zero() {
                        out.remove(oidx);
                    }
                }
            }
        }
        out
    }
}

/// Checks (A12 A23 A12) = (A23 A12 A23) on every basis triple.
pub fn braid_relation_holds(a: &FourTensor) -> bool {
    let n = a.n();
    let a12 = TripleOp::on_first_pair(a);
    let a23 = TripleOp::on_second_pair(a);
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                let mut v = BTreeMap::new();
                v.insert([i, j, k], Scalar::one());
                let lhs = a12.apply(&a23.apply(&a12.apply(&v)));
                let rhs = a23.apply(&a12.apply(&a23.apply(&v)));
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        assert_eq!(two_rho(3), vec![1, 0, -1]);
        assert_eq!(two_rho(4), vec![2, 0, 0, -2]);
        assert_eq!(two_rho(5), vec![3, 1, 0, -1, -3]);
        assert_eq!(two_rho(6), vec![4, 2, 0, 0, -2, -4]);
    }

    #[test]
    fn metric_n3_entries() {
        let c = Metric::new(3).unwrap();
        assert_eq!(c.get(1, 3), Scalar::s_pow(-1));
        assert_eq!(c.get(2, 2), Scalar::one());
        assert_eq!(c.get(3, 1), Scalar::s_pow(1));
        assert!(c.get(1, 1).is_zero());
    }

    #[test]
    fn metric_inverse_pattern() {
        // C^{ij} C_{jk} = delta_{ik}
        for n in 3..=6 {
            let c = Metric::new(n).unwrap();
            for i in 1..=n {
                for k in 1..=n {
                    let mut acc = Scalar::zero();
                    for j in 1..=n {
                        acc = acc.add(&c.get(i, j).mul(&c.get(j, k)));
                    }
                    let expect = if i == k { Scalar::one() } else { Scalar::zero() };
                    assert_eq!(acc, expect, "n={} i={} k={}", n, i, k);
                }
            }
        }
    }

    #[test]
    fn rhat_n4_spot_entries() {
        let r = rhat(4).unwrap();
        assert_eq!(r.get(1, 1, 1, 1), Scalar::q());
        assert_eq!(r.get(1, 2, 2, 1), Scalar::one());
        let rinv = rhat_inv(4).unwrap();
        assert_eq!(rinv.get(1, 1, 1, 1), Scalar::q_pow(-1));
    }

    #[test]
    fn rhat_times_inverse_is_identity() {
        for n in 3..=6 {
            let r = rhat(n).unwrap();
            let rinv = rhat_inv(n).unwrap();
            let id = FourTensor::identity(n);
            assert_eq!(r.compose(&rinv), id, "n={}", n);
            assert_eq!(rinv.compose(&r), id, "n={}", n);
        }
    }

    #[test]
    fn rhat_minus_inverse_identity() {
        for n in 3..=6 {
            let u = Scalar::q().sub(&Scalar::q_pow(-1));
            let lhs = rhat(n).unwrap().sub(&rhat_inv(n).unwrap());
            let rhs = FourTensor::identity(n).sub(&k_tensor(n).unwrap()).scale(&u);
            assert_eq!(lhs, rhs, "n={}", n);
        }
    }

    #[test]
    fn k_squared_is_tau_k() {
        for n in 3..=6 {
            let k = k_tensor(n).unwrap();
            let tau = Metric::new(n).unwrap().tau();
            assert_eq!(k.compose(&k), k.scale(&tau), "n={}", n);
        }
    }

    #[test]
    fn tau_n3() {
        let tau = Metric::new(3).unwrap().tau();
        let expect = Scalar::q().add(&Scalar::one()).add(&Scalar::q_pow(-1));
        assert_eq!(tau, expect);
    }

    #[test]
    fn braid_relation_for_rhat_and_inverse() {
        for n in 3..=6 {
            assert!(braid_relation_holds(&rhat(n).unwrap()), "Rhat n={}", n);
            assert!(braid_relation_holds(&rhat_inv(n).unwrap()), "RhatInv n={}", n);
        }
    }

    #[test]
    fn braid_relation_negative_control() {
        let mut r = rhat(3).unwrap();
        let bump = r.get(1, 1, 1, 1).add(&Scalar::one());
        r.set([1, 1, 1, 1], bump);
        assert!(!braid_relation_holds(&r));
    }

    #[test]
    fn projectors_complete_and_orthogonal() {
        for n in 3..=6 {
            let p = spectral_projectors(n).unwrap();
            let id = FourTensor::identity(n);
            assert_eq!(p.plus.add(&p.minus).add(&p.zero), id, "completeness n={}", n);
            for (a, pa) in [(0, &p.plus), (1, &p.minus), (2, &p.zero)] {
                for (b, pb) in [(0, &p.plus), (1, &p.minus), (2, &p.zero)] {
                    let prod = pa.compose(pb);
                    if a == b {
                        assert_eq!(&prod, pa, "idempotent n={} {}", n, a);
                    } else {
                        assert!(prod.is_zero(), "orthogonal n={} {} {}", n, a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn rhat_reassembles_from_projectors_n4() {
        let p = spectral_projectors(4).unwrap();
        let r = rhat(4).unwrap();
        let sum = p
            .plus
            .scale(&p.eigenvalues[0])
            .add(&p.minus.scale(&p.eigenvalues[1]))
            .add(&p.zero.scale(&p.eigenvalues[2]));
        assert_eq!(sum, r);
    }

    #[test]
    fn k_lies_in_zero_eigenspace() {
        for n in 3..=5 {
            let r = rhat(n).unwrap();
            let k = k_tensor(n).unwrap();
            let lam0 = Scalar::q_pow(1 - n as i64);
            assert_eq!(r.compose(&k), k.scale(&lam0), "n={}", n);
        }
    }

    #[test]
    fn metric_compatibility_with_rhat_inv() {
        // Rinv^{kl}_{ij} C^{ks} C^{lt} = C^{ik} C^{jl} Rinv^{ts}_{lk}
        for n in 3..=4 {
            let rinv = rhat_inv(n).unwrap();
            let c = Metric::new(n).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    for s in 1..=n {
                        for t in 1..=n {
                            let mut lhs = Scalar::zero();
                            for k in 1..=n {
                                for l in 1..=n {
                                    let v = rinv.get(k, l, i, j).mul(&c.get(k, s)).mul(&c.get(l, t));
                                    lhs = lhs.add(&v);
                                }
                            }
                            let mut rhs = Scalar::zero();
                            for k in 1..=n {
                                for l in 1..=n {
                                    let v = c.get(i, k).mul(&c.get(j, l)).mul(&rinv.get(t, s, l, k));
                                    rhs = rhs.add(&v);
                                }
                            }
                            assert_eq!(lhs, rhs, "n={} ({},{},{},{})", n, i, j, s, t);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_dimension() {
        assert!(matches!(rhat(2), Err(Error::InvalidDimension(2))));
        assert!(matches!(Metric::new(1), Err(Error::InvalidDimension(1))));
    }
}
