//! Groups and modules: generator sets for GL2/SL2(F_q) and its standard
//! subgroups, Serre weights V^{l,t}_{r,s}, induced modules U^e_d, and the
//! Borel-induced model with its explicit isomorphisms.
//!
//! Conventions. Module elements are coefficient columns, so action
//! matrices compose as A(gh) = A(g)A(h). Group elements act on row
//! vectors from the right in the U_d model, matching (g.f)(h) = f(hg);
//! on Sym^r the matching action sends X to aX + cY and Y to bX + dY for
//! g = [[a,b],[c,d]], which is what makes the evaluation embedding into
//! U_d equivariant.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::gf::{FieldTower, Level};
use crate::linalg::{Mat, Subspace};

/// An element of GL2(F_q), entries as F_q codes in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrpElem(pub [u32; 4]);

impl GrpElem {
    pub fn new(t: &FieldTower, m: [u32; 4]) -> GrpElem {
        let g = GrpElem(m);
        assert_ne!(g.det(t), 0, "group elements must be invertible");
        g
    }

    pub fn identity() -> GrpElem {
        GrpElem([1, 0, 0, 1])
    }

    pub fn det(&self, t: &FieldTower) -> u32 {
        let [a, b, c, d] = self.0;
        t.sub_at(
            Level::Quad,
            t.mul_at(Level::Quad, a, d),
            t.mul_at(Level::Quad, b, c),
        )
    }

    pub fn mul(&self, t: &FieldTower, o: &GrpElem) -> GrpElem {
        let lv = Level::Quad;
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        let ent = |x: u32, y: u32, z: u32, w: u32| {
            t.add_at(lv, t.mul_at(lv, x, y), t.mul_at(lv, z, w))
        };
        GrpElem([
            ent(a, e, b, g),
            ent(a, f, b, h),
            ent(c, e, d, g),
            ent(c, f, d, h),
        ])
    }

    pub fn inv(&self, t: &FieldTower) -> GrpElem {
        let lv = Level::Quad;
        let [a, b, c, d] = self.0;
        let di = t.inv_at(lv, self.det(t));
        GrpElem([
            t.mul_at(lv, d, di),
            t.mul_at(lv, t.neg_at(lv, b), di),
            t.mul_at(lv, t.neg_at(lv, c), di),
            t.mul_at(lv, a, di),
        ])
    }
}

/// A point of P^1(F_q) in canonical form: index y in 0..q is (1, y),
/// index q is (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjPoint(pub u32);

impl ProjPoint {
    pub fn count(t: &FieldTower) -> u32 {
        t.q + 1
    }

    pub fn rep(&self, t: &FieldTower) -> (u32, u32) {
        if self.0 == t.q {
            (0, 1)
        } else {
            (1, self.0)
        }
    }

    /// Canonicalize a nonzero row vector: returns (point, lambda) with
    /// (u, v) = lambda * rep(point).
    pub fn canon(t: &FieldTower, u: u32, v: u32) -> (ProjPoint, u32) {
        if u != 0 {
            let y = t.mul_at(Level::Quad, t.inv_at(Level::Quad, u), v);
            (ProjPoint(y), u)
        } else {
            debug_assert_ne!(v, 0, "the zero vector has no line");
            (ProjPoint(t.q), v)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Sl,
    Gl,
    /// The determinant-restricted group with det image of order f.
    T1(u32),
    /// Unipotent upper-triangular together with diag(g1, 1).
    U,
    /// Borel: upper-triangular.
    B,
}

/// Generator sets. The four elementary matrices over {1, w} generate
/// SL2(F_q); adding diag(g1, 1) reaches all determinants.
pub fn group_generators(t: &FieldTower, kind: GroupKind) -> Result<Vec<GrpElem>> {
    let w = t.p; // code of the F_p-basis element of F_q
    let sl = vec![
        GrpElem([1, 1, 0, 1]),
        GrpElem([1, w, 0, 1]),
        GrpElem([1, 0, 1, 1]),
        GrpElem([1, 0, w, 1]),
    ];
    Ok(match kind {
        GroupKind::Sl => sl,
        GroupKind::Gl => {
            let mut v = sl;
            v.push(GrpElem([t.g1, 0, 0, 1]));
            v
        }
        GroupKind::T1(f) => {
            if f == 0 || (t.q - 1) % f != 0 {
                return Err(Error::BadUnitOrder(f));
            }
            let eps = t.pow_at(Level::Quad, t.g1, ((t.q - 1) / f) as u64);
            let mut v = sl;
            v.push(GrpElem([eps, 0, 0, 1]));
            v
        }
        GroupKind::U => vec![
            GrpElem([1, 1, 0, 1]),
            GrpElem([1, w, 0, 1]),
            GrpElem([t.g1, 0, 0, 1]),
        ],
        GroupKind::B => vec![
            GrpElem([1, 1, 0, 1]),
            GrpElem([1, w, 0, 1]),
            GrpElem([t.g1, 0, 0, 1]),
            GrpElem([1, 0, 0, t.g1]),
        ],
    })
}

/// Canonical label (r, s, e) of a Serre weight; e is the determinant
/// twist l + p t reduced mod q-1. Negative r or s marks the zero module
/// (the Sym^{-1} convention), normalized so all zero labels are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightLabel {
    pub r: i64,
    pub s: i64,
    pub e: u32,
}

impl WeightLabel {
    pub fn new(t: &FieldTower, r: i64, s: i64, e: i64) -> WeightLabel {
        if r < 0 || s < 0 {
            return WeightLabel { r: -1, s: -1, e: 0 };
        }
        let m = (t.q - 1) as i64;
        WeightLabel {
            r,
            s,
            e: e.rem_euclid(m) as u32,
        }
    }

    pub fn from_lt(t: &FieldTower, r: i64, s: i64, l: i64, t_dig: i64) -> WeightLabel {
        WeightLabel::new(t, r, s, l + (t.p as i64) * t_dig)
    }

    pub fn is_zero(&self) -> bool {
        self.r < 0 || self.s < 0
    }

    pub fn dim(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            ((self.r + 1) * (self.s + 1)) as usize
        }
    }

    /// Twist digits l = e mod p, t = e div p.
    pub fn digits(&self, t: &FieldTower) -> (u32, u32) {
        (self.e % t.p, self.e / t.p)
    }
}

#[derive(Debug, Clone)]
pub enum ModuleKind {
    /// Serre weight V^{l,t}_{r,s} with e = l + p t.
    Weight(WeightLabel),
    /// U^e_d: degree-d homogeneous functions twisted by det^e.
    Induced { d: u32, e: u32 },
    /// Ind_B^G(chi^d) computed through explicit coset decomposition.
    Borel { d: u32 },
    Quotient {
        parent: Arc<GModule>,
        proj: Mat,
        section: Mat,
    },
    Submodule {
        parent: Arc<GModule>,
        basis: Subspace,
    },
    DirectSum(Vec<Arc<GModule>>),
}

/// A finite-dimensional module with an explicit action rule. Immutable;
/// the per-generator action matrices are memoized behind a mutex.
pub struct GModule {
    pub kind: ModuleKind,
    pub dim: usize,
    cache: Mutex<HashMap<GrpElem, Arc<Mat>>>,
}

impl Clone for GModule {
    fn clone(&self) -> Self {
        GModule {
            kind: self.kind.clone(),
            dim: self.dim,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl std::fmt::Debug for GModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GModule")
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Coefficients of (uX + vY)^i (xX + zY)^j as a homogeneous polynomial
/// of degree i + j; entry k is the coefficient of X^k Y^{i+j-k}.
fn expand_product(t: &FieldTower, u: u32, v: u32, i: i64, x: u32, z: u32, j: i64) -> Vec<u32> {
    let lv = Level::Quad;
    let mut coef = vec![1u32];
    let mul_linear = |coef: &mut Vec<u32>, a: u32, b: u32| {
        let n = coef.len();
        let mut out = vec![0u32; n + 1];
        for (k, &c) in coef.iter().enumerate() {
            if c == 0 {
                continue;
            }
            // c X^k Y^{n-1-k} * (a X + b Y)
            out[k + 1] = t.add_at(lv, out[k + 1], t.mul_at(lv, c, a));
            out[k] = t.add_at(lv, out[k], t.mul_at(lv, c, b));
        }
        *coef = out;
    };
    for _ in 0..i {
        mul_linear(&mut coef, u, v);
    }
    for _ in 0..j {
        mul_linear(&mut coef, x, z);
    }
    coef
}

impl GModule {
    fn new(kind: ModuleKind, dim: usize) -> GModule {
        GModule {
            kind,
            dim,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn weight(label: WeightLabel) -> GModule {
        let dim = label.dim();
        GModule::new(ModuleKind::Weight(label), dim)
    }

    pub fn direct_sum(parts: Vec<Arc<GModule>>) -> GModule {
        let dim = parts.iter().map(|m| m.dim).sum();
        GModule::new(ModuleKind::DirectSum(parts), dim)
    }

    pub fn submodule(parent: Arc<GModule>, basis: Subspace) -> GModule {
        assert_eq!(basis.ambient, parent.dim);
        let dim = basis.dim();
        GModule::new(ModuleKind::Submodule { parent, basis }, dim)
    }

    pub fn quotient(parent: Arc<GModule>, proj: Mat, section: Mat) -> GModule {
        assert_eq!(proj.cols, parent.dim);
        let dim = proj.rows;
        GModule::new(ModuleKind::Quotient { parent, proj, section }, dim)
    }

    /// The action matrix of g (memoized). Satisfies
    /// action(gh) = action(g) . action(h) and action(I) = I.
    pub fn action(&self, t: &FieldTower, g: &GrpElem) -> Arc<Mat> {
        if let Some(m) = self.cache.lock().unwrap().get(g) {
            return m.clone();
        }
        let m = Arc::new(self.compute_action(t, g));
        self.cache
            .lock()
            .unwrap()
            .entry(*g)
            .or_insert(m)
            .clone()
    }

    fn compute_action(&self, t: &FieldTower, g: &GrpElem) -> Mat {
        let lv = Level::Quad;
        match &self.kind {
            ModuleKind::Weight(label) => {
                if label.is_zero() {
                    return Mat::zeros(lv, 0, 0);
                }
                let (r, s) = (label.r, label.s);
                let [a, b, c, d] = g.0;
                let (ap, bp, cp, dp) = (t.frob_q(a), t.frob_q(b), t.frob_q(c), t.frob_q(d));
                let det_e = t.pow_at(lv, g.det(t), label.e as u64);
                let n = self.dim;
                let mut out = Mat::zeros(lv, n, n);
                // basis ordered by descending X-degree in both factors:
                // index of X^i Y^{r-i} (x) X^i' Y^{s-i'} is (r-i)(s+1)+(s-i')
                let idx = |i: i64, ip: i64| ((r - i) * (s + 1) + (s - ip)) as usize;
                for i in 0..=r {
                    let first = expand_product(t, a, c, i, b, d, r - i);
                    for ip in 0..=s {
                        let second = expand_product(t, ap, cp, ip, bp, dp, s - ip);
                        let col = idx(i, ip);
                        for (j, &cf) in first.iter().enumerate() {
                            if cf == 0 {
                                continue;
                            }
                            for (jp, &cs) in second.iter().enumerate() {
                                if cs == 0 {
                                    continue;
                                }
                                let row = idx(j as i64, jp as i64);
                                let val =
                                    t.mul_at(lv, det_e, t.mul_at(lv, cf, cs));
                                out.set(row, col, val);
                            }
                        }
                    }
                }
                out
            }
            ModuleKind::Induced { d, e } => {
                let det_e = t.pow_at(lv, g.det(t), *e as u64);
                let n = self.dim;
                let mut out = Mat::zeros(lv, n, n);
                let [a, b, c, dd] = g.0;
                for qi in 0..n as u32 {
                    let (u, v) = ProjPoint(qi).rep(t);
                    // rep(Q) . g
                    let ru = t.add_at(lv, t.mul_at(lv, u, a), t.mul_at(lv, v, c));
                    let rv = t.add_at(lv, t.mul_at(lv, u, b), t.mul_at(lv, v, dd));
                    let (pt, lam) = ProjPoint::canon(t, ru, rv);
                    let val = t.mul_at(lv, det_e, t.pow_at(lv, lam, *d as u64));
                    out.set(qi as usize, pt.0 as usize, val);
                }
                out
            }
            ModuleKind::Borel { d } => {
                let n = self.dim;
                let mut out = Mat::zeros(lv, n, n);
                for qi in 0..n as u32 {
                    let gq = coset_rep(t, ProjPoint(qi));
                    let h = gq.mul(t, g);
                    let (u, v) = (h.0[2], h.0[3]);
                    let (pt, _) = ProjPoint::canon(t, u, v);
                    let bmat = h.mul(t, &coset_rep(t, pt).inv(t));
                    debug_assert_eq!(bmat.0[2], 0, "must be upper triangular");
                    let chi = t.pow_at(lv, bmat.0[3], *d as u64);
                    out.set(qi as usize, pt.0 as usize, chi);
                }
                out
            }
            ModuleKind::Quotient {
                parent,
                proj,
                section,
            } => {
                let pa = parent.action(t, g);
                proj.mul(t, &pa).unwrap().mul(t, section).unwrap()
            }
            ModuleKind::Submodule { parent, basis } => {
                let pa = parent.action(t, g);
                let n = self.dim;
                let mut out = Mat::zeros(lv, n, n);
                for k in 0..n {
                    let img = pa.mul_vec(t, basis.basis.row(k));
                    let co = basis
                        .coords(t, &img)
                        .expect("submodule basis must be action-stable");
                    for (row, &c) in co.iter().enumerate() {
                        out.set(row, k, c);
                    }
                }
                out
            }
            ModuleKind::DirectSum(parts) => {
                let n = self.dim;
                let mut out = Mat::zeros(lv, n, n);
                let mut off = 0usize;
                for part in parts {
                    let pa = part.action(t, g);
                    for i in 0..part.dim {
                        for j in 0..part.dim {
                            out.set(off + i, off + j, pa.at(i, j));
                        }
                    }
                    off += part.dim;
                }
                out
            }
        }
    }
}

/// Coset representative with bottom row rep(P): [[0,1],[1,y]] for (1,y),
/// the identity for (0,1).
pub fn coset_rep(t: &FieldTower, p: ProjPoint) -> GrpElem {
    if p.0 == t.q {
        GrpElem::identity()
    } else {
        GrpElem([0, 1, 1, p.0])
    }
}

/// V^{l,t}_{r,s} = Sym^r (x) det^l (x) (Sym^s)^tau (x) (det^t)^tau.
pub fn serre_weight(t: &FieldTower, r: u32, s: u32, l: u32, tt: u32) -> Result<GModule> {
    if r >= t.p || s >= t.p {
        return Err(Error::WeightOutOfRange {
            r: r as i64,
            s: s as i64,
        });
    }
    Ok(GModule::weight(WeightLabel::from_lt(
        t, r as i64, s as i64, l as i64, tt as i64,
    )))
}

/// U^e_d on the delta basis at the q+1 canonical projective points.
pub fn induced_module(t: &FieldTower, d: u32, e: u32) -> Result<GModule> {
    if d > t.q - 2 {
        return Err(Error::DegreeOutOfRange {
            d: d as i64,
            max: t.q - 2,
        });
    }
    let dim = (t.q + 1) as usize;
    Ok(GModule::new(
        ModuleKind::Induced {
            d,
            e: e % (t.q - 1),
        },
        dim,
    ))
}

/// Ind_B^G(chi^d), basis indexed by B-cosets via bottom rows.
pub fn borel_model(t: &FieldTower, d: u32) -> Result<GModule> {
    if d > t.q - 2 {
        return Err(Error::DegreeOutOfRange {
            d: d as i64,
            max: t.q - 2,
        });
    }
    let dim = (t.q + 1) as usize;
    Ok(GModule::new(ModuleKind::Borel { d }, dim))
}

/// The matrix of phi: U_d -> Ind_B^G(chi^d), F -> (g -> F(bottom row g)),
/// computed by honest evaluation at every coset representative.
pub fn iso_phi(t: &FieldTower, d: u32) -> Result<Mat> {
    if d > t.q - 2 {
        return Err(Error::DegreeOutOfRange {
            d: d as i64,
            max: t.q - 2,
        });
    }
    let n = (t.q + 1) as usize;
    let mut out = Mat::zeros(Level::Quad, n, n);
    for col in 0..n as u32 {
        // phi(delta_P) evaluated at each g_Q: delta_P(bottom row of g_Q)
        for qi in 0..n as u32 {
            let gq = coset_rep(t, ProjPoint(qi));
            let (u, v) = (gq.0[2], gq.0[3]);
            let (pt, lam) = ProjPoint::canon(t, u, v);
            if pt.0 == col {
                out.set(qi as usize, col as usize, t.pow_at(Level::Quad, lam, d as u64));
            }
        }
    }
    Ok(out)
}

/// The inverse map, by reading off values at the canonical points.
pub fn iso_psi(t: &FieldTower, d: u32) -> Result<Mat> {
    let phi = iso_phi(t, d)?;
    // phi is a monomial matrix with unit scalars by the canonical-rep
    // choice; invert it exactly anyway.
    let n = phi.rows;
    let mut inv = Mat::zeros(Level::Quad, n, n);
    for i in 0..n {
        for j in 0..n {
            let v = phi.at(i, j);
            if v != 0 {
                inv.set(j, i, t.inv_at(Level::Quad, v));
            }
        }
    }
    debug_assert_eq!(phi.mul(t, &inv).unwrap(), Mat::identity(Level::Quad, n));
    Ok(inv)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GradedSumReport {
    pub dims: Vec<u32>,
    pub total: u32,
    pub expected: u32,
    pub independent: bool,
    pub ok: bool,
}

/// Prop 2-2 bookkeeping: the q-1 graded pieces U_d have total dimension
/// q^2-1, and the delta functions across all degrees are linearly
/// independent as functions on F_q^2 minus the origin. Independence on
/// each punctured line reduces to one (q-1)x(q-1) power matrix in the
/// generator g1, which is checked for full rank.
pub fn graded_sum_check(t: &FieldTower) -> GradedSumReport {
    let dims: Vec<u32> = (0..=(t.q - 2)).map(|_| t.q + 1).collect();
    let total: u32 = dims.iter().sum();
    let expected = t.q * t.q - 1;
    let n = (t.q - 1) as usize;
    let mut vand = Mat::zeros(Level::Quad, n, n);
    for j in 0..n {
        for d in 0..n {
            let lam = t.pow_at(Level::Quad, t.g1, j as u64);
            vand.set(j, d, t.pow_at(Level::Quad, lam, d as u64));
        }
    }
    let independent = crate::linalg::rank(t, &vand) == n;
    GradedSumReport {
        ok: total == expected && independent,
        dims,
        total,
        expected,
        independent,
    }
}

/// Full-function-space independence check: every delta function of every
/// degree written out on all q^2-1 nonzero vectors of the plane. Cubic in
/// q^2, so only run at small p; the per-line reduction above is the
/// production path.
pub fn graded_sum_full_matrix_rank(t: &FieldTower) -> usize {
    let lv = Level::Quad;
    let npts = (t.q * t.q - 1) as usize;
    let nfun = ((t.q - 1) * (t.q + 1)) as usize;
    let mut m = Mat::zeros(lv, npts, nfun);
    let mut col = 0usize;
    for d in 0..(t.q - 1) {
        for pi in 0..=t.q {
            let (ru, rv) = ProjPoint(pi).rep(t);
            // delta_{P,d}(lambda * rep) = lambda^d, zero off the line
            for lam in 1..t.q {
                let u = t.mul_at(lv, lam, ru);
                let v = t.mul_at(lv, lam, rv);
                let row = (u * t.q + v - 1) as usize;
                m.set(row, col, t.pow_at(lv, lam, d as u64));
            }
            col += 1;
        }
    }
    crate::linalg::rank(t, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t5() -> FieldTower {
        FieldTower::build(5, false).unwrap()
    }
    fn t7() -> FieldTower {
        FieldTower::build(7, false).unwrap()
    }

    fn rand_grp(t: &FieldTower, st: &mut u32) -> GrpElem {
        loop {
            let mut m = [0u32; 4];
            for x in m.iter_mut() {
                *st = st.wrapping_mul(2654435761).wrapping_add(7);
                *x = *st % t.q;
            }
            let g = GrpElem(m);
            if g.det(t) != 0 {
                return g;
            }
        }
    }

    #[test]
    fn sl_generators_act_transitively_on_p1() {
        let t = FieldTower::build(3, false).unwrap();
        let gens = group_generators(&t, GroupKind::Sl).unwrap();
        for g in &gens {
            assert_eq!(g.det(&t), 1);
        }
        // orbit of (0,1) under right multiplication
        let mut seen = vec![false; (t.q + 1) as usize];
        let mut stack = vec![ProjPoint(t.q)];
        seen[t.q as usize] = true;
        let mut count = 1;
        while let Some(p) = stack.pop() {
            let (u, v) = p.rep(&t);
            for g in &gens {
                let lv = Level::Quad;
                let ru = t.add_at(lv, t.mul_at(lv, u, g.0[0]), t.mul_at(lv, v, g.0[2]));
                let rv = t.add_at(lv, t.mul_at(lv, u, g.0[1]), t.mul_at(lv, v, g.0[3]));
                let (np, _) = ProjPoint::canon(&t, ru, rv);
                if !seen[np.0 as usize] {
                    seen[np.0 as usize] = true;
                    count += 1;
                    stack.push(np);
                }
            }
        }
        assert_eq!(count, t.q + 1);
    }

    #[test]
    fn t1_rejects_bad_order() {
        let t = t5();
        assert!(matches!(
            group_generators(&t, GroupKind::T1(5)),
            Err(Error::BadUnitOrder(5))
        ));
        assert!(group_generators(&t, GroupKind::T1(4)).is_ok());
        // T1(q-1) has the same generators as GL
        let a = group_generators(&t, GroupKind::T1(t.q - 1)).unwrap();
        let b = group_generators(&t, GroupKind::Gl).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trivial_weight_is_trivial() {
        let t = t7();
        let m = serre_weight(&t, 0, 0, 0, 0).unwrap();
        assert_eq!(m.dim, 1);
        let mut st = 5u32;
        for _ in 0..10 {
            let g = rand_grp(&t, &mut st);
            assert_eq!(*m.action(&t, &g), Mat::identity(Level::Quad, 1));
        }
    }

    #[test]
    fn sym1_standard_rep_on_diagonal() {
        let t = t7();
        let m = serre_weight(&t, 1, 0, 0, 0).unwrap();
        let g = GrpElem([3, 0, 0, 5]);
        let a = m.action(&t, &g);
        assert_eq!(a.at(0, 0), 3);
        assert_eq!(a.at(1, 1), 5);
        assert_eq!(a.at(0, 1), 0);
        assert_eq!(a.at(1, 0), 0);
    }

    #[test]
    fn big_weight_central_minus_one() {
        let t = t7();
        let m = serre_weight(&t, 6, 6, 0, 0).unwrap();
        assert_eq!(m.dim, 49);
        let minus = t.neg_at(Level::Quad, 1);
        let g = GrpElem([minus, 0, 0, minus]);
        assert_eq!(*m.action(&t, &g), Mat::identity(Level::Quad, 49));
    }

    #[test]
    fn weight_rejects_out_of_range() {
        let t = t5();
        assert!(matches!(
            serre_weight(&t, 5, 0, 0, 0),
            Err(Error::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn induced_dims_and_range() {
        for p in [3u32, 5, 7] {
            let t = FieldTower::build(p, false).unwrap();
            for d in 0..=(t.q - 2) {
                assert_eq!(induced_module(&t, d, 0).unwrap().dim as u32, t.q + 1);
            }
            assert!(matches!(
                induced_module(&t, t.q - 1, 0),
                Err(Error::DegreeOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn constants_fixed_in_degree_zero() {
        let t = t5();
        let m = induced_module(&t, 0, 0).unwrap();
        let ones = vec![1u32; m.dim];
        for g in group_generators(&t, GroupKind::Sl).unwrap() {
            assert_eq!(m.action(&t, &g).mul_vec(&t, &ones), ones);
        }
    }

    #[test]
    fn induced_matches_pointwise_oracle() {
        // Act on full functions on F_q^2 \ 0 and compare with the delta
        // basis matrix.
        let t = t5();
        let lv = Level::Quad;
        let (d, e) = (7u32, 3u32);
        let m = induced_module(&t, d, e).unwrap();
        let mut st = 9u32;
        for _ in 0..5 {
            let g = rand_grp(&t, &mut st);
            let a = m.action(&t, &g);
            let det_e = t.pow_at(lv, g.det(&t), e as u64);
            for col in 0..m.dim as u32 {
                // delta_col as a full function
                let (ru, rv) = ProjPoint(col).rep(&t);
                let mut f = std::collections::HashMap::new();
                for lam in 1..t.q {
                    f.insert(
                        (t.mul_at(lv, lam, ru), t.mul_at(lv, lam, rv)),
                        t.pow_at(lv, lam, d as u64),
                    );
                }
                // (g.F)(v) = det^e F(vg), read at canonical points
                for row in 0..m.dim as u32 {
                    let (u, v) = ProjPoint(row).rep(&t);
                    let xu = t.add_at(lv, t.mul_at(lv, u, g.0[0]), t.mul_at(lv, v, g.0[2]));
                    let xv = t.add_at(lv, t.mul_at(lv, u, g.0[1]), t.mul_at(lv, v, g.0[3]));
                    let want = t.mul_at(lv, det_e, *f.get(&(xu, xv)).unwrap_or(&0));
                    assert_eq!(a.at(row as usize, col as usize), want);
                }
            }
        }
    }

    #[test]
    fn action_is_homomorphism() {
        let t = t5();
        let mods = [
            serre_weight(&t, 2, 3, 1, 2).unwrap(),
            induced_module(&t, 11, 2).unwrap(),
            borel_model(&t, 11).unwrap(),
        ];
        let mut st = 21u32;
        for m in &mods {
            for _ in 0..50 {
                let g = rand_grp(&t, &mut st);
                let h = rand_grp(&t, &mut st);
                let gh = g.mul(&t, &h);
                let lhs = m.action(&t, &gh);
                let rhs = m.action(&t, &g).mul(&t, &m.action(&t, &h)).unwrap();
                assert_eq!(*lhs, rhs);
            }
            assert_eq!(
                *m.action(&t, &GrpElem::identity()),
                Mat::identity(Level::Quad, m.dim)
            );
        }
    }

    #[test]
    fn central_character_exponent() {
        let t = t5();
        let cases = [(2u32, 3u32, 1u32, 2u32), (0, 0, 0, 0), (4, 1, 3, 0)];
        for &(r, s, l, tt) in &cases {
            let m = serre_weight(&t, r, s, l, tt).unwrap();
            let e = (l + t.p * tt) % (t.q - 1);
            for a in 2..6u32 {
                let g = GrpElem([a, 0, 0, a]);
                let act = m.action(&t, &g);
                let scal = act.at(0, 0);
                assert_eq!(*act, Mat::identity(Level::Quad, m.dim).scale(&t, scal));
                let want = ((r + t.p * s + 2 * e) as u64 * t.dlog_code(a).unwrap() as u64)
                    % t.modulus() as u64;
                assert_eq!(t.dlog_code(scal).unwrap() as u64, want);
            }
        }
    }

    #[test]
    fn det_twist_is_entrywise_scalar() {
        let t = t5();
        let m0 = induced_module(&t, 9, 0).unwrap();
        let me = induced_module(&t, 9, 5).unwrap();
        let mut st = 33u32;
        for _ in 0..20 {
            let g = rand_grp(&t, &mut st);
            let scal = t.pow_at(Level::Quad, g.det(&t), 5);
            assert_eq!(*me.action(&t, &g), m0.action(&t, &g).scale(&t, scal));
        }
    }

    #[test]
    fn induced_action_is_monomial() {
        let t = t5();
        let m = induced_module(&t, 13, 1).unwrap();
        let mut st = 41u32;
        for _ in 0..20 {
            let g = rand_grp(&t, &mut st);
            let a = m.action(&t, &g);
            for i in 0..a.rows {
                assert_eq!(a.row(i).iter().filter(|&&x| x != 0).count(), 1);
            }
        }
    }

    #[test]
    fn phi_psi_inverse_all_d() {
        let t = t5();
        for d in 0..=(t.q - 2) {
            let phi = iso_phi(&t, d).unwrap();
            let psi = iso_psi(&t, d).unwrap();
            let n = phi.rows;
            assert_eq!(psi.mul(&t, &phi).unwrap(), Mat::identity(Level::Quad, n));
        }
    }

    #[test]
    fn phi_equivariant_p7() {
        let t = t7();
        let d = 13u32;
        let u = induced_module(&t, d, 0).unwrap();
        let b = borel_model(&t, d).unwrap();
        let phi = iso_phi(&t, d).unwrap();
        let mut st = 55u32;
        for _ in 0..50 {
            let g = rand_grp(&t, &mut st);
            let lhs = b.action(&t, &g).mul(&t, &phi).unwrap();
            let rhs = phi.mul(&t, &u.action(&t, &g)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn phi_maps_constants_to_constants() {
        let t = t5();
        let phi = iso_phi(&t, 0).unwrap();
        let ones = vec![1u32; phi.cols];
        assert_eq!(phi.mul_vec(&t, &ones), ones);
    }

    #[test]
    fn graded_sum_counts() {
        for (p, total) in [(3u32, 80u32), (5, 624), (7, 2400)] {
            let t = FieldTower::build(p, false).unwrap();
            let rep = graded_sum_check(&t);
            assert!(rep.ok);
            assert_eq!(rep.total, total);
            assert_eq!(rep.dims.len() as u32, t.q - 1);
        }
    }

    #[test]
    fn graded_sum_full_matrix_at_p3() {
        let t = FieldTower::build(3, false).unwrap();
        assert_eq!(graded_sum_full_matrix_rank(&t), 80);
    }

    #[test]
    fn submodule_and_quotient_actions() {
        let t = t5();
        let parent = Arc::new(induced_module(&t, 0, 0).unwrap());
        // constants form a submodule in degree 0
        let ones = Mat::from_rows(Level::Quad, parent.dim, vec![vec![1; parent.dim]]);
        let sub = Subspace::from_spanning(&t, &ones);
        let sm = GModule::submodule(parent.clone(), sub.clone());
        assert_eq!(sm.dim, 1);
        let qm = crate::linalg::quotient_map(&t, &sub);
        let quo = GModule::quotient(parent.clone(), qm.proj, qm.section);
        assert_eq!(quo.dim, parent.dim - 1);
        let mut st = 71u32;
        for _ in 0..20 {
            let g = rand_grp(&t, &mut st);
            let h = rand_grp(&t, &mut st);
            let gh = g.mul(&t, &h);
            for m in [&sm, &quo] {
                let lhs = m.action(&t, &gh);
                let rhs = m.action(&t, &g).mul(&t, &m.action(&t, &h)).unwrap();
                assert_eq!(*lhs, rhs);
            }
        }
    }

    #[test]
    fn direct_sum_block_structure() {
        let t = t5();
        let a = Arc::new(serre_weight(&t, 1, 0, 0, 0).unwrap());
        let b = Arc::new(serre_weight(&t, 0, 1, 0, 0).unwrap());
        let s = GModule::direct_sum(vec![a.clone(), b.clone()]);
        assert_eq!(s.dim, 4);
        let g = GrpElem([2, 1, 0, 3]);
        let m = s.action(&t, &g);
        let ma = a.action(&t, &g);
        let mb = b.action(&t, &g);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.at(i, j), ma.at(i, j));
                assert_eq!(m.at(2 + i, 2 + j), mb.at(i, j));
                assert_eq!(m.at(i, 2 + j), 0);
                assert_eq!(m.at(2 + i, j), 0);
            }
        }
    }

    #[test]
    fn weight_label_canonicalization() {
        let t = t5();
        let z1 = WeightLabel::new(&t, -1, 3, 5);
        let z2 = WeightLabel::new(&t, 2, -1, 7);
        assert_eq!(z1, z2);
        assert!(z1.is_zero());
        assert_eq!(z1.dim(), 0);
        let l = WeightLabel::new(&t, 2, 3, 25);
        assert_eq!(l.e, 1);
        assert_eq!(l.dim(), 12);
        let (ld, td) = WeightLabel::new(&t, 0, 0, 23).digits(&t);
        assert_eq!((ld, td), (3, 4));
    }
}
