//! Brauer characters on the p-regular classes of GL2(F_q).
//!
//! Character values are multisets of (q^2-1)-th roots of unity, stored as
//! multiplicity vectors indexed by the discrete-log exponent relative to
//! the fixed generator g0 (the Teichmuller identification). Equality of
//! characters is exact vector equality.

use crate::error::{Error, Result};
use crate::gf::{FieldTower, Level};
use crate::linalg::eigenspace_dim;
use crate::modrep::{GModule, GrpElem, ModuleKind, WeightLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Central,
    Split,
    Nonsplit,
}

/// A p-regular conjugacy class, carried by a semisimple representative
/// with eigenvalues {alpha, beta} over F_{q^2}.
#[derive(Debug, Clone, Copy)]
pub struct ClassRep {
    pub kind: ClassKind,
    pub alpha: u32,
    pub beta: u32,
    pub rep: GrpElem,
}

/// All q(q-1) p-regular classes: q-1 central, (q-1)(q-2)/2 split,
/// (q^2-q)/2 nonsplit. Deterministic order: central by eigenvalue code,
/// split by (alpha, beta) codes with alpha < beta, nonsplit by the
/// smaller code of {alpha, alpha^q}.
pub fn p_regular_classes(t: &FieldTower) -> Vec<ClassRep> {
    let lv = Level::Quad;
    let mut out = Vec::with_capacity((t.q * (t.q - 1)) as usize);
    for a in 1..t.q {
        out.push(ClassRep {
            kind: ClassKind::Central,
            alpha: a,
            beta: a,
            rep: GrpElem([a, 0, 0, a]),
        });
    }
    for a in 1..t.q {
        for b in (a + 1)..t.q {
            out.push(ClassRep {
                kind: ClassKind::Split,
                alpha: a,
                beta: b,
                rep: GrpElem([a, 0, 0, b]),
            });
        }
    }
    // every code >= q has a nonzero y-coordinate, i.e. lies outside F_q
    for code in t.q..t.qq {
        let conj = t.frob_q_quartic(code);
        if conj < code {
            continue;
        }
        // companion matrix of x^2 - T x + N with T, N in F_q
        let tr = t.add_at(Level::Quartic, code, conj);
        let nm = t.mul_at(Level::Quartic, code, conj);
        debug_assert!(tr < t.q && nm < t.q);
        out.push(ClassRep {
            kind: ClassKind::Nonsplit,
            alpha: code,
            beta: conj,
            rep: GrpElem([0, t.neg_at(lv, nm), 1, tr]),
        });
    }
    out
}

/// Exponent-multiplicity vector over the fixed (q^2-1)-th root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrauerVector(pub Vec<u32>);

impl BrauerVector {
    pub fn zero(t: &FieldTower) -> BrauerVector {
        BrauerVector(vec![0; t.modulus() as usize])
    }

    pub fn bump(&mut self, k: u64) {
        let m = self.0.len() as u64;
        self.0[(k % m) as usize] += 1;
    }

    pub fn add_assign(&mut self, other: &BrauerVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Closed-form character of a Serre weight: the monomial basis vector
/// X^i Y^{r-i} (x) X^i' Y^{s-i'} contributes the eigenvalue exponent
/// dlog(alpha)(i+pi') + dlog(beta)((r-i)+p(s-i')) + (dlog(alpha)+dlog(beta)) e.
pub fn weight_character(t: &FieldTower, label: WeightLabel, c: &ClassRep) -> BrauerVector {
    let mut out = BrauerVector::zero(t);
    if label.is_zero() {
        return out;
    }
    let da = t.dlog_code(c.alpha).expect("class eigenvalues are nonzero") as u64;
    let db = t.dlog_code(c.beta).unwrap() as u64;
    let (r, s, e) = (label.r as u64, label.s as u64, label.e as u64);
    let p = t.p as u64;
    let twist = (da + db) * e;
    for i in 0..=r {
        for ip in 0..=s {
            let k = da * (i + p * ip) + db * ((r - i) + p * (s - ip)) + twist;
            out.bump(k);
        }
    }
    out
}

fn monomial_structure(a: &crate::linalg::Mat) -> Option<(Vec<usize>, Vec<u32>)> {
    let n = a.rows;
    let mut perm = vec![usize::MAX; n];
    let mut vals = vec![0u32; n];
    let mut col_hit = vec![false; n];
    for i in 0..n {
        let mut found = None;
        for j in 0..n {
            if a.at(i, j) != 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(j);
            }
        }
        let j = found?;
        if col_hit[j] {
            return None;
        }
        col_hit[j] = true;
        perm[i] = j;
        vals[i] = a.at(i, j);
    }
    Some((perm, vals))
}

/// Eigenvalue exponents of a monomial matrix by cycle decomposition:
/// a cycle of length L whose entry product has discrete log E contributes
/// the L solutions of L k = E (mod q^2-1).
fn monomial_character(
    t: &FieldTower,
    perm: &[usize],
    vals: &[u32],
) -> Result<BrauerVector> {
    let m = t.modulus() as u64;
    let mut out = BrauerVector::zero(t);
    let n = perm.len();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut prod = 1u32;
        let mut i = start;
        loop {
            seen[i] = true;
            len += 1;
            prod = t.mul_at(Level::Quad, prod, vals[i]);
            i = perm[i];
            if i == start {
                break;
            }
        }
        let de = t.dlog_code(prod).expect("monomial entries are units") as u64;
        if m % len != 0 || de % len != 0 {
            return Err(Error::IncompleteEigenbasis {
                found: out.total() as usize,
                dim: n,
            });
        }
        let k0 = de / len;
        let step = m / len;
        for j in 0..len {
            out.bump(k0 + j * step);
        }
    }
    Ok(out)
}

/// Candidate eigenvalue exponents for the generic path: exponents already
/// known to occur in an ancestor or in the closed-form weight character.
fn candidate_exponents(t: &FieldTower, m: &GModule, c: &ClassRep) -> Result<Vec<u32>> {
    let chi: BrauerVector = match &m.kind {
        ModuleKind::Weight(label) => weight_character(t, *label, c),
        ModuleKind::Submodule { .. } | ModuleKind::Quotient { .. } => {
            // walk to the top ancestor: a subquotient's eigenvalues are a
            // sub-multiset of the ancestor's, which is usually a monomial
            // model that is cheap to decompose
            let mut root = m;
            loop {
                match &root.kind {
                    ModuleKind::Submodule { parent, .. }
                    | ModuleKind::Quotient { parent, .. } => root = parent,
                    _ => break,
                }
            }
            module_character(t, root, c)?
        }
        _ => return Ok(Vec::new()),
    };
    Ok(chi
        .0
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(k, _)| k as u32)
        .collect())
}

/// Brauer character of an arbitrary module at a p-regular class, from the
/// action matrix of the representative. Monomial matrices (all induced
/// and Borel models, and diagonal representatives everywhere) go through
/// the cycle decomposition; everything else computes eigenspace
/// dimensions at the quartic level over candidate exponents, with an
/// exhaustive fallback.
pub fn module_character(t: &FieldTower, m: &GModule, c: &ClassRep) -> Result<BrauerVector> {
    if let ModuleKind::DirectSum(parts) = &m.kind {
        let mut out = BrauerVector::zero(t);
        for part in parts {
            out.add_assign(&module_character(t, part, c)?);
        }
        return Ok(out);
    }
    let a = m.action(t, &c.rep);
    if m.dim == 0 {
        return Ok(BrauerVector::zero(t));
    }
    if let Some((perm, vals)) = monomial_structure(&a) {
        return monomial_character(t, &perm, &vals);
    }
    let mut out = BrauerVector::zero(t);
    let mut found = 0usize;
    let mut tried = vec![false; t.modulus() as usize];
    for k in candidate_exponents(t, m, c)? {
        if tried[k as usize] {
            continue;
        }
        tried[k as usize] = true;
        let d = eigenspace_dim(t, &a, t.exp_g0(k))?;
        out.0[k as usize] = d as u32;
        found += d;
        if found == m.dim {
            return Ok(out);
        }
    }
    for k in 0..t.modulus() {
        if tried[k as usize] {
            continue;
        }
        let d = eigenspace_dim(t, &a, t.exp_g0(k))?;
        out.0[k as usize] = d as u32;
        found += d;
        if found == m.dim {
            return Ok(out);
        }
    }
    Err(Error::IncompleteEigenbasis {
        found,
        dim: m.dim,
    })
}

/// The four Jordan-Holder constituents of (U^e_{r+ps})^{ss}, computed by
/// the subset rule over E = {id, tau} and cross-checked against the
/// explicit 4-term display; zero modules (Sym^{-1} factors) are dropped.
pub fn diamond_constituents(
    t: &FieldTower,
    r: u32,
    s: u32,
    e: u32,
) -> Result<Vec<WeightLabel>> {
    if r >= t.p || s >= t.p {
        return Err(Error::WeightOutOfRange {
            r: r as i64,
            s: s as i64,
        });
    }
    let p = t.p as i64;
    let (r, s, e) = (r as i64, s as i64, e as i64);
    let a = [r, s]; // a_id, a_tau

    // Subset rule: J ranges over subsets of E; J^{(p)} is J shifted by
    // Frobenius (the swap on {id, tau}); delta_J is its characteristic
    // function. m_J sets the det digits, n_J - 1 the Sym degrees.
    let mut by_rule = Vec::new();
    for mask in 0..4u32 {
        let in_j = [mask & 1 != 0, mask & 2 != 0];
        let delta = [in_j[1] as i64, in_j[0] as i64]; // J^{(p)} swaps the two embeddings
        let mut mm = [0i64; 2];
        let mut nn = [0i64; 2];
        for sigma in 0..2 {
            if in_j[sigma] {
                mm[sigma] = 0;
                nn[sigma] = a[sigma] + delta[sigma];
            } else {
                mm[sigma] = a[sigma] + delta[sigma];
                nn[sigma] = p - a[sigma] - delta[sigma];
            }
        }
        let label = WeightLabel::new(t, nn[0] - 1, nn[1] - 1, mm[0] + p * mm[1] + e);
        if !label.is_zero() {
            by_rule.push(label);
        }
    }

    // The display:
    // V^{0,0}_{r,s} + V^{r,s}_{p-r-1,p-1-s} + V^{0,s+1}_{r-1,p-2-s}
    //   + V^{r+1,0}_{p-r-2,s-1}, all twisted by det^e.
    let display_raw = [
        (r, s, 0, 0),
        (p - r - 1, p - 1 - s, r, s),
        (r - 1, p - 2 - s, 0, s + 1),
        (p - r - 2, s - 1, r + 1, 0),
    ];
    let mut by_display = Vec::new();
    for &(rr, ss, l, td) in &display_raw {
        let label = WeightLabel::new(t, rr, ss, l + p * td + e);
        if !label.is_zero() {
            by_display.push(label);
        }
    }

    by_rule.sort();
    by_display.sort();
    if by_rule != by_display {
        return Err(Error::InternalMismatch);
    }
    Ok(by_rule)
}

/// Checks Prop-Diamond at one (d, e): the Brauer character of U^e_d must
/// equal the sum of its predicted constituents' characters at every
/// p-regular class. Returns the first failing class, or None on success.
pub fn verify_ss_report(t: &FieldTower, d: u32, e: u32) -> Result<Option<ClassRep>> {
    let r = d % t.p;
    let s = d / t.p;
    let constituents = diamond_constituents(t, r, s, e)?;
    let u = crate::modrep::induced_module(t, d, e)?;
    for c in p_regular_classes(t) {
        let lhs = module_character(t, &u, &c)?;
        let mut rhs = BrauerVector::zero(t);
        for label in &constituents {
            rhs.add_assign(&weight_character(t, *label, &c));
        }
        if lhs != rhs {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

pub fn verify_ss(t: &FieldTower, d: u32, e: u32) -> Result<bool> {
    Ok(verify_ss_report(t, d, e)?.is_none())
}
