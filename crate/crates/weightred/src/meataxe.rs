//! Constructive composition series by spinning, with factors identified
//! through Brauer characters. This is the independent oracle backing the
//! character-theoretic semisimplification check.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::brauer::{module_character, p_regular_classes, weight_character, ClassKind, ClassRep};
use crate::error::{Error, Result};
use crate::gf::{FieldTower, Level};
use crate::linalg::{kernel_basis, quotient_map, rank, Mat, Subspace};
use crate::modrep::{group_generators, GModule, GroupKind, WeightLabel};

/// Dimension plus the character on a fixed small class panel; the matched
/// weight label once identification succeeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorFingerprint {
    pub dim: usize,
    pub label: WeightLabel,
}

fn spin_mats(t: &FieldTower, mats: &[Mat], seeds: &[Vec<u32>], ambient: usize) -> Subspace {
    let lv = Level::Quad;
    let mut rows: Vec<Vec<u32>> = seeds.to_vec();
    let mut space = Subspace::from_spanning(t, &Mat::from_rows(lv, ambient, rows.clone()));
    let mut frontier = rows.clone();
    while !frontier.is_empty() && space.dim() < ambient {
        let mut next = Vec::new();
        for v in &frontier {
            for a in mats {
                let w = a.mul_vec(t, v);
                if !space.contains(t, &w) {
                    rows.push(w.clone());
                    space = Subspace::from_spanning(t, &Mat::from_rows(lv, ambient, rows.clone()));
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    space
}

/// {v : w . v = 0 for all w in the given row space}.
fn annihilator(t: &FieldTower, w: &Subspace) -> Subspace {
    kernel_basis(t, &w.basis)
}

/// Searches for an action-stable proper nonzero subspace: spins random
/// vectors (and their duals), then kernel vectors of random algebra
/// elements. Returns None if the budget is exhausted.
pub fn find_proper_submodule(
    t: &FieldTower,
    m: &GModule,
    seed: u64,
    attempts: usize,
) -> Option<Subspace> {
    let n = m.dim;
    if n <= 1 {
        return None;
    }
    let lv = Level::Quad;
    let gens = group_generators(t, GroupKind::Gl).expect("GL generators");
    let acts: Vec<Mat> = gens.iter().map(|g| (*m.action(t, g)).clone()).collect();
    let duals: Vec<Mat> = gens
        .iter()
        .map(|g| m.action(t, &g.inv(t)).transpose())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_vec = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<u32> = (0..n).map(|_| rng.gen_range(0..t.q)).collect();
        if v.iter().any(|&x| x != 0) {
            break v;
        }
    };
    let check = |s: &Subspace| s.dim() > 0 && s.dim() < n;

    let try_vector = |v: &Vec<u32>| -> Option<Subspace> {
        let s = spin_mats(t, &acts, std::slice::from_ref(v), n);
        if check(&s) {
            return Some(s);
        }
        let sd = spin_mats(t, &duals, std::slice::from_ref(v), n);
        if check(&sd) {
            let ann = annihilator(t, &sd);
            debug_assert!(check(&ann));
            return Some(ann);
        }
        None
    };

    for _ in 0..attempts {
        let v = rand_vec(&mut rng);
        if let Some(s) = try_vector(&v) {
            return Some(s);
        }
    }

    // random algebra elements: short random words with random coefficients
    for _ in 0..10 {
        let mut theta = Mat::zeros(lv, n, n);
        for _ in 0..4 {
            let mut word = acts[rng.gen_range(0..acts.len())].clone();
            if rng.gen_bool(0.5) {
                word = word.mul(t, &acts[rng.gen_range(0..acts.len())]).unwrap();
            }
            let c = rng.gen_range(1..t.q);
            theta = theta.add(t, &word.scale(t, c)).unwrap();
        }
        for lam in 0..t.q {
            let mut shifted = theta.clone();
            for i in 0..n {
                shifted.set(i, i, t.sub_at(lv, shifted.at(i, i), lam));
            }
            let ker = kernel_basis(t, &shifted);
            if ker.dim() == 0 || ker.dim() == n {
                continue;
            }
            for i in 0..ker.dim() {
                if let Some(s) = try_vector(&ker.basis.row(i).to_vec()) {
                    return Some(s);
                }
            }
        }
    }
    None
}

/// Deterministic identification panel: all central classes followed by
/// the first eight split and the first eight nonsplit ones, then the
/// rest of the class list for disambiguation.
fn ordered_classes(t: &FieldTower) -> (Vec<ClassRep>, usize) {
    let all = p_regular_classes(t);
    let mut panel = Vec::new();
    let mut rest = Vec::new();
    let (mut ns, mut nn) = (0usize, 0usize);
    for c in all {
        let keep = match c.kind {
            ClassKind::Central => true,
            ClassKind::Split => {
                ns += 1;
                ns <= 8
            }
            ClassKind::Nonsplit => {
                nn += 1;
                nn <= 8
            }
        };
        if keep {
            panel.push(c);
        } else {
            rest.push(c);
        }
    }
    let plen = panel.len();
    panel.extend(rest);
    (panel, plen)
}

/// Matches an (expected-irreducible) module against the weight labels by
/// character comparison, panel first, extending through the remaining
/// classes while more than one candidate survives.
fn identify_irreducible(t: &FieldTower, m: &GModule) -> Result<WeightLabel> {
    let mut candidates: Vec<WeightLabel> = Vec::new();
    for r in 0..t.p as i64 {
        for s in 0..t.p as i64 {
            for e in 0..(t.q - 1) as i64 {
                let label = WeightLabel::new(t, r, s, e);
                if label.dim() == m.dim {
                    candidates.push(label);
                }
            }
        }
    }
    let (classes, panel_len) = ordered_classes(t);
    for (i, c) in classes.iter().enumerate() {
        if candidates.is_empty() || (candidates.len() == 1 && i >= panel_len) {
            break;
        }
        let chi = module_character(t, m, c)?;
        candidates.retain(|label| weight_character(t, *label, c) == chi);
    }
    match candidates.len() {
        1 => Ok(candidates[0]),
        _ => Err(Error::UnidentifiedFactor(m.dim)),
    }
}

/// Composition factors as a sorted multiset of weight labels: recursive
/// submodule/quotient splitting, leaves identified by character. A leaf
/// that refuses to split is accepted only when its character already
/// pins down a single irreducible.
pub fn composition_factors(
    t: &FieldTower,
    m: &Arc<GModule>,
    seed: u64,
) -> Result<Vec<WeightLabel>> {
    let mut out = Vec::new();
    factors_rec(t, m, seed, &mut out)?;
    out.sort();
    Ok(out)
}

fn factors_rec(
    t: &FieldTower,
    m: &Arc<GModule>,
    seed: u64,
    out: &mut Vec<WeightLabel>,
) -> Result<()> {
    if m.dim == 0 {
        return Ok(());
    }
    for round in 0..4u64 {
        if let Some(s) = find_proper_submodule(t, m, seed.wrapping_add(round), 20) {
            let sub = Arc::new(GModule::submodule(m.clone(), s.clone()));
            let qm = quotient_map(t, &s);
            let quo = Arc::new(GModule::quotient(m.clone(), qm.proj, qm.section));
            // deterministic per-branch seeds derived from the parent
            factors_rec(t, &sub, seed.wrapping_mul(2).wrapping_add(1), out)?;
            factors_rec(t, &quo, seed.wrapping_mul(2).wrapping_add(2), out)?;
            return Ok(());
        }
        match identify_irreducible(t, m) {
            Ok(label) => {
                out.push(label);
                return Ok(());
            }
            Err(_) => continue,
        }
    }
    Err(Error::UnidentifiedFactor(m.dim))
}

/// Dimension of {X : X action(g) = action(g) X for all generators}.
/// Value 1 certifies absolute irreducibility. Quartic cost in the module
/// dimension; intended for small modules.
pub fn endomorphism_dim(t: &FieldTower, m: &GModule) -> Result<usize> {
    let lv = Level::Quad;
    let n = m.dim;
    if n == 0 {
        return Ok(0);
    }
    let gens = group_generators(t, GroupKind::Gl)?;
    let mut rows = Vec::new();
    for g in &gens {
        let a = m.action(t, g);
        // (X A - A X)[i][j] = sum_k X[i][k] A[k][j] - A[i][k] X[k][j]
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![0u32; n * n];
                for k in 0..n {
                    row[i * n + k] = t.add_at(lv, row[i * n + k], a.at(k, j));
                    row[k * n + j] = t.sub_at(lv, row[k * n + j], a.at(i, k));
                }
                rows.push(row);
            }
        }
    }
    let sys = Mat::from_rows(lv, n * n, rows);
    Ok(n * n - rank(t, &sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::diamond_constituents;
    use crate::modrep::{induced_module, serre_weight};

    fn t5() -> FieldTower {
        FieldTower::build(5, false).unwrap()
    }

    #[test]
    fn trivial_module_has_no_proper_submodule() {
        let t = t5();
        let m = serre_weight(&t, 0, 0, 0, 0).unwrap();
        assert!(find_proper_submodule(&t, &m, 1, 20).is_none());
    }

    #[test]
    fn degree_zero_induced_splits() {
        let t = t5();
        let m = induced_module(&t, 0, 0).unwrap();
        let s = find_proper_submodule(&t, &m, 7, 20).unwrap();
        assert!(s.dim() == 1 || s.dim() == m.dim - 1);
    }

    #[test]
    fn small_weight_is_irreducible() {
        let t = t5();
        let m = serre_weight(&t, 1, 1, 0, 0).unwrap();
        assert!(find_proper_submodule(&t, &m, 3, 20).is_none());
        assert_eq!(endomorphism_dim(&t, &m).unwrap(), 1);
    }

    #[test]
    fn weight_factors_are_single() {
        let t = t5();
        let m = Arc::new(serre_weight(&t, 2, 3, 1, 0).unwrap());
        let f = composition_factors(&t, &m, 11).unwrap();
        assert_eq!(f, vec![WeightLabel::new(&t, 2, 3, 1)]);
    }

    #[test]
    fn degree_zero_factors() {
        let t = t5();
        let m = Arc::new(induced_module(&t, 0, 0).unwrap());
        let mut f = composition_factors(&t, &m, 5).unwrap();
        f.sort();
        let mut want = vec![
            WeightLabel::new(&t, 0, 0, 0),
            WeightLabel::new(&t, 4, 4, 0),
        ];
        want.sort();
        assert_eq!(f, want);
    }

    #[test]
    fn factors_match_diamond_and_seed_independent() {
        let t = t5();
        let m = Arc::new(induced_module(&t, 7, 0).unwrap());
        let f1 = composition_factors(&t, &m, 1).unwrap();
        let f2 = composition_factors(&t, &m, 99).unwrap();
        assert_eq!(f1, f2);
        let mut want = diamond_constituents(&t, 2, 1, 0).unwrap();
        want.sort();
        assert_eq!(f1, want);
        let dims: usize = f1.iter().map(|l| l.dim()).sum();
        assert_eq!(dims, m.dim);
    }

    #[test]
    fn endomorphism_dims() {
        let t = t5();
        let u = induced_module(&t, 0, 0).unwrap();
        assert!(endomorphism_dim(&t, &u).unwrap() >= 2);
        let v = Arc::new(serre_weight(&t, 1, 0, 0, 0).unwrap());
        let vv = GModule::direct_sum(vec![v.clone(), v.clone()]);
        assert_eq!(endomorphism_dim(&t, &vv).unwrap(), 4);
    }
}
