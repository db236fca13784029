//! Imaginary quadratic fields: class numbers by reduced-form counting,
//! unit orders, prime splitting, and the Eisenstein eigenvalue at inert
//! primes.

use crate::error::{Error, Result};

/// An imaginary quadratic field of fundamental discriminant `d < 0`,
/// with class number `h` and unit group order `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct ImagQuadField {
    pub d: i64,
    pub h: u32,
    pub f: u32,
}

fn is_squarefree(mut n: u64) -> bool {
    let mut k = 2u64;
    while k * k <= n {
        if n % (k * k) == 0 {
            return false;
        }
        while n % k == 0 {
            n /= k;
        }
        k += 1;
    }
    true
}

fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    let m = d.rem_euclid(4);
    if m == 1 {
        is_squarefree((-d) as u64)
    } else if m == 0 {
        let q = d / 4;
        let qm = q.rem_euclid(4);
        (qm == 2 || qm == 3) && is_squarefree((-q) as u64)
    } else {
        false
    }
}

/// All reduced primitive positive-definite forms (a, b, c) of
/// discriminant d, sorted lexicographically. Reduction: |b| <= a <= c,
/// with b >= 0 whenever |b| = a or a = c.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (b == -a || a == c) {
                continue;
            }
            if gcd3(a, b.abs(), c) != 1 {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out.sort_unstable();
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

/// Validates the discriminant and computes h(d) by counting reduced
/// forms, and the unit order f (6 at d = -3, 4 at d = -4, else 2).
pub fn make_field(d: i64) -> Result<ImagQuadField> {
    if d >= 0 {
        return Err(Error::NonNegative(d));
    }
    let m = d.rem_euclid(4);
    if m == 2 || m == 3 {
        return Err(Error::BadResidue(d));
    }
    if !is_fundamental(d) {
        return Err(Error::NotFundamental(d));
    }
    let h = reduced_forms(d).len() as u32;
    let f = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    Ok(ImagQuadField { d, h, f })
}

/// Kronecker symbol (a / n) for n > 0.
pub fn kronecker(a: i64, n: u64) -> i64 {
    let mut a = a;
    let mut n = n as i64;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i64;
    // (a / 2) factors of n
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let am8 = a.rem_euclid(8);
        if am8 == 3 || am8 == 5 {
            result = -result;
        }
    }
    // Jacobi symbol (a / n) for odd n via quadratic reciprocity
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let nm8 = n % 8;
            if nm8 == 3 || nm8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// Splitting behaviour of the rational prime l in Q(sqrt(d)), by the
/// Kronecker symbol (d / l).
pub fn splitting(field: &ImagQuadField, l: u64) -> Splitting {
    match kronecker(field.d, l) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// True when l is inert; ramified primes are rejected since the weight
/// machinery assumes residue field F_{l^2} or split F_l x F_l.
pub fn is_inert(field: &ImagQuadField, l: u64) -> Result<bool> {
    match splitting(field, l) {
        Splitting::Inert => Ok(true),
        Splitting::Split => Ok(false),
        Splitting::Ramified => Err(Error::Ramified(l)),
    }
}

/// The Eisenstein Hecke eigenvalue at a prime of norm N: N + 1.
pub fn eisenstein_eigenvalue(norm: u64) -> u64 {
    norm + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers_and_forms() {
        assert_eq!(make_field(-3).unwrap().h, 1);
        assert_eq!(reduced_forms(-3), vec![(1, 1, 1)]);
        assert_eq!(make_field(-4).unwrap().h, 1);
        assert_eq!(reduced_forms(-4), vec![(1, 0, 1)]);
        assert_eq!(make_field(-23).unwrap().h, 3);
        assert_eq!(
            reduced_forms(-23),
            vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]
        );
        assert_eq!(make_field(-47).unwrap().h, 5);
        assert_eq!(make_field(-163).unwrap().h, 1);
        assert_eq!(reduced_forms(-163), vec![(1, 1, 41)]);
    }

    #[test]
    fn unit_orders() {
        assert_eq!(make_field(-3).unwrap().f, 6);
        assert_eq!(make_field(-4).unwrap().f, 4);
        assert_eq!(make_field(-7).unwrap().f, 2);
        assert_eq!(make_field(-8).unwrap().f, 2);
    }

    #[test]
    fn rejects_bad_discriminants() {
        assert!(matches!(make_field(5), Err(Error::NonNegative(5))));
        assert!(matches!(make_field(0), Err(Error::NonNegative(0))));
        assert!(matches!(make_field(-5), Err(Error::BadResidue(-5))));
        assert!(matches!(make_field(-6), Err(Error::BadResidue(-6))));
        assert!(matches!(make_field(-12), Err(Error::NotFundamental(-12))));
        assert!(matches!(make_field(-27), Err(Error::NotFundamental(-27))));
    }

    #[test]
    fn splitting_oracles() {
        let k3 = make_field(-3).unwrap();
        assert!(is_inert(&k3, 2).unwrap());
        assert!(matches!(is_inert(&k3, 3), Err(Error::Ramified(3))));
        let k4 = make_field(-4).unwrap();
        assert!(is_inert(&k4, 7).unwrap());
        assert!(!is_inert(&k4, 5).unwrap());
        assert!(matches!(is_inert(&k4, 2), Err(Error::Ramified(2))));
    }

    #[test]
    fn exactly_one_splitting_type() {
        for d in [-3i64, -4, -7, -8, -11, -23, -47] {
            let k = make_field(d).unwrap();
            for l in [2u64, 3, 5, 7, 11, 13] {
                let s = splitting(&k, l);
                let tags = [Splitting::Split, Splitting::Inert, Splitting::Ramified];
                assert_eq!(tags.iter().filter(|&&x| x == s).count(), 1);
                // ramified exactly when l divides the discriminant
                assert_eq!(s == Splitting::Ramified, (-d) as u64 % l == 0);
            }
        }
    }

    #[test]
    fn eisenstein_values() {
        assert_eq!(eisenstein_eigenvalue(4), 5);
        assert_eq!(eisenstein_eigenvalue(49), 50);
        assert_eq!(eisenstein_eigenvalue(121), 122);
    }
}
