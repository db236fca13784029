//! Exact arithmetic in the tower F_p ⊂ F_q ⊂ F_{q^2} with q = p^2.
//!
//! Elements are stored as coordinate codes: an F_q element a0 + a1*w has
//! code a0 + p*a1, an F_{q^2} element c0 + c1*y has code c0 + q*c1, where
//! w and y are the roots of the fixed defining quadratics. With this
//! encoding the subfield embeddings are the identity on codes.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Base,
    Quad,
    Quartic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Elem {
    pub level: Level,
    pub code: u32,
}

impl Elem {
    pub fn new(level: Level, code: u32) -> Self {
        Elem { level, code }
    }
    pub fn is_zero(&self) -> bool {
        self.code == 0
    }
}

/// The fixed tower F_p ⊂ F_q ⊂ F_{q^2}. Immutable after construction; all
/// operations are pure, so it can be shared read-only across workers.
pub struct FieldTower {
    pub p: u32,
    pub q: u32,
    pub qq: u32,
    /// x^2 + b x + c over F_p, stored as [c, b].
    pub quad_poly: [u32; 2],
    /// y^2 + B y + C over F_q, stored as [C, B] (codes).
    pub quartic_poly: [u32; 2],
    fq_mul: Vec<u16>,
    fq_inv: Vec<u16>,
    fq_frob: Vec<u16>,
    /// Generator of F_{q^2}^*, the smallest in code order.
    pub g0: u32,
    /// Generator of F_q^*: g1 = g0^{q+1}, stored as an F_q code.
    pub g1: u32,
    dlog_table: Vec<u32>,
    exp_table: Vec<u32>,
    fq2_frob: Vec<u32>,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldTower {
    /// Deterministic tower for a prime p >= 3. The defining quadratics are
    /// the lexicographically smallest irreducible monic ones (ordered by
    /// (linear, constant) coefficient codes) and g0 is the smallest
    /// generator in code order, so every discrete-log exponent downstream
    /// is reproducible across runs and platforms.
    pub fn build(p: u32, strict: bool) -> Result<FieldTower> {
        if p < 3 {
            return Err(Error::TooSmall(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if strict && p <= 5 {
            return Err(Error::StrictViolation(p));
        }
        let q = p * p;
        let qq = q * q;

        // Smallest irreducible monic quadratic x^2 + b x + c over F_p.
        let quad_poly = 'found: {
            for b in 0..p {
                for c in 0..p {
                    let mut irred = true;
                    for x in 0..p {
                        if (x * x + b * x + c) % p == 0 {
                            irred = false;
                            break;
                        }
                    }
                    if irred {
                        break 'found [c, b];
                    }
                }
            }
            unreachable!("an irreducible quadratic over F_p always exists")
        };

        // F_q multiplication table from the quadratic relation
        // w^2 = -b w - c.
        let mut fq_mul = vec![0u16; (q * q) as usize];
        let b = quad_poly[1];
        let c = quad_poly[0];
        for a in 0..q {
            let (a0, a1) = (a % p, a / p);
            for bb in a..q {
                let (b0, b1) = (bb % p, bb / p);
                // (a0 + a1 w)(b0 + b1 w)
                let t2 = a1 * b1 % p;
                let t1 = (a0 * b1 + a1 * b0) % p;
                let t0 = a0 * b0 % p;
                // t2 w^2 = t2(-b w - c)
                let r1 = (t1 + t2 * (p - b % p)) % p;
                let r0 = (t0 + t2 * ((p - c % p) % p) % p) % p;
                let code = (r0 + p * r1) as u16;
                fq_mul[(a * q + bb) as usize] = code;
                fq_mul[(bb * q + a) as usize] = code;
            }
        }

        let fq_mul_at = |x: u32, y: u32| fq_mul[(x * q + y) as usize] as u32;
        let fq_pow = |mut base: u32, mut e: u32| {
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = fq_mul_at(acc, base);
                }
                base = fq_mul_at(base, base);
                e >>= 1;
            }
            acc
        };

        let mut fq_inv = vec![0u16; q as usize];
        for x in 1..q {
            fq_inv[x as usize] = fq_pow(x, q - 2) as u16;
        }
        let mut fq_frob = vec![0u16; q as usize];
        for x in 0..q {
            fq_frob[x as usize] = fq_pow(x, p) as u16;
        }

        // Smallest irreducible monic quadratic y^2 + B y + C over F_q,
        // by root search.
        let quartic_poly = 'found: {
            for bq in 0..q {
                for cq in 0..q {
                    let mut irred = true;
                    for x in 0..q {
                        let v = fq_add(p, fq_add(p, fq_mul_at(x, x), fq_mul_at(bq, x)), cq);
                        if v == 0 {
                            irred = false;
                            break;
                        }
                    }
                    if irred {
                        break 'found [cq, bq];
                    }
                }
            }
            unreachable!("an irreducible quadratic over F_q always exists")
        };

        // Coordinate multiplication in F_{q^2} (used only to bootstrap the
        // log tables).
        let bq = quartic_poly[1];
        let cq = quartic_poly[0];
        let fq2_mul_coord = |x: u32, y: u32| -> u32 {
            let (x0, x1) = (x % q, x / q);
            let (y0, y1) = (y % q, y / q);
            let t2 = fq_mul_at(x1, y1);
            let t1 = fq_add(p, fq_mul_at(x0, y1), fq_mul_at(x1, y0));
            let t0 = fq_mul_at(x0, y0);
            // t2 y^2 = t2 (-B y - C)
            let r1 = fq_sub(p, t1, fq_mul_at(t2, bq));
            let r0 = fq_sub(p, t0, fq_mul_at(t2, cq));
            r0 + q * r1
        };
        let fq2_pow = |mut base: u32, mut e: u32| {
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = fq2_mul_coord(acc, base);
                }
                base = fq2_mul_coord(base, base);
                e >>= 1;
            }
            acc
        };

        let m = qq - 1;
        let factors = prime_factors(m);
        let g0 = (2..qq)
            .find(|&g| factors.iter().all(|&l| fq2_pow(g, m / l) != 1))
            .expect("F_{q^2}^* is cyclic, a generator exists");

        let mut dlog_table = vec![u32::MAX; qq as usize];
        let mut exp_table = vec![0u32; m as usize];
        let mut acc = 1u32;
        for k in 0..m {
            exp_table[k as usize] = acc;
            debug_assert_eq!(dlog_table[acc as usize], u32::MAX);
            dlog_table[acc as usize] = k;
            acc = fq2_mul_coord(acc, g0);
        }
        debug_assert_eq!(acc, 1);

        let g1_code = exp_table[(q + 1) as usize];
        debug_assert!(g1_code < q, "g0^(q+1) must land in F_q");

        let mut fq2_frob = vec![0u32; qq as usize];
        for x in 1..qq {
            let k = dlog_table[x as usize] as u64;
            fq2_frob[x as usize] = exp_table[(k * p as u64 % m as u64) as usize];
        }

        Ok(FieldTower {
            p,
            q,
            qq,
            quad_poly,
            quartic_poly,
            fq_mul,
            fq_inv,
            fq_frob,
            g0,
            g1: g1_code,
            dlog_table,
            exp_table,
            fq2_frob,
        })
    }

    /// Order of the ambient multiplicative group F_{q^2}^*: q^2 - 1.
    pub fn modulus(&self) -> u32 {
        self.qq - 1
    }

    pub fn add_at(&self, level: Level, a: u32, b: u32) -> u32 {
        match level {
            Level::Base => (a + b) % self.p,
            Level::Quad => fq_add(self.p, a, b),
            Level::Quartic => {
                let q = self.q;
                fq_add(self.p, a % q, b % q) + q * fq_add(self.p, a / q, b / q)
            }
        }
    }

    pub fn neg_at(&self, level: Level, a: u32) -> u32 {
        match level {
            Level::Base => (self.p - a) % self.p,
            Level::Quad => fq_neg(self.p, a),
            Level::Quartic => fq_neg(self.p, a % self.q) + self.q * fq_neg(self.p, a / self.q),
        }
    }

    pub fn sub_at(&self, level: Level, a: u32, b: u32) -> u32 {
        self.add_at(level, a, self.neg_at(level, b))
    }

    pub fn mul_at(&self, level: Level, a: u32, b: u32) -> u32 {
        match level {
            Level::Base => a * b % self.p,
            Level::Quad => self.fq_mul[(a * self.q + b) as usize] as u32,
            Level::Quartic => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let m = self.modulus() as u64;
                let k = (self.dlog_table[a as usize] as u64 + self.dlog_table[b as usize] as u64)
                    % m;
                self.exp_table[k as usize]
            }
        }
    }

    pub fn inv_at(&self, level: Level, a: u32) -> u32 {
        debug_assert_ne!(a, 0, "division by zero");
        match level {
            Level::Base => {
                // Fermat
                self.pow_at(Level::Base, a, (self.p - 2) as u64)
            }
            Level::Quad => self.fq_inv[a as usize] as u32,
            Level::Quartic => {
                let m = self.modulus();
                let k = (m - self.dlog_table[a as usize]) % m;
                self.exp_table[k as usize]
            }
        }
    }

    pub fn pow_at(&self, level: Level, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_at(level, acc, base);
            }
            base = self.mul_at(level, base, base);
            e >>= 1;
        }
        acc
    }

    /// The Frobenius x -> x^p at the element's own level.
    pub fn frobenius(&self, x: Elem) -> Elem {
        let code = match x.level {
            Level::Base => x.code,
            Level::Quad => self.fq_frob[x.code as usize] as u32,
            Level::Quartic => self.fq2_frob[x.code as usize],
        };
        Elem::new(x.level, code)
    }

    /// Frobenius on a raw F_q code.
    pub fn frob_q(&self, x: u32) -> u32 {
        self.fq_frob[x as usize] as u32
    }

    /// The conjugate x -> x^q of an F_{q^2} code over F_q (Frobenius
    /// squared at the quartic level).
    pub fn frob_q_quartic(&self, x: u32) -> u32 {
        self.fq2_frob[self.fq2_frob[x as usize] as usize]
    }

    /// Discrete log base g0, after lifting to the quartic level.
    pub fn dlog(&self, x: Elem) -> Result<u32> {
        if x.code == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.dlog_table[x.code as usize])
    }

    /// Raw-code discrete log (codes embed identically across levels).
    pub fn dlog_code(&self, code: u32) -> Result<u32> {
        if code == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.dlog_table[code as usize])
    }

    pub fn exp_g0(&self, k: u32) -> u32 {
        self.exp_table[(k % self.modulus()) as usize]
    }

    /// Baby-step/giant-step discrete log, kept as an independent check of
    /// the precomputed table.
    pub fn dlog_bsgs(&self, code: u32) -> Result<u32> {
        if code == 0 {
            return Err(Error::ZeroElement);
        }
        let m = self.modulus();
        let step = (m as f64).sqrt().ceil() as u32;
        let mut baby = std::collections::HashMap::new();
        let mut acc = 1u32;
        for j in 0..step {
            baby.entry(acc).or_insert(j);
            acc = self.mul_at(Level::Quartic, acc, self.g0);
        }
        // giant factor g0^{-step}
        let giant = self.pow_at(
            Level::Quartic,
            self.inv_at(Level::Quartic, self.g0),
            step as u64,
        );
        let mut gamma = code;
        for i in 0..=step {
            if let Some(&j) = baby.get(&gamma) {
                return Ok((i * step + j) % m);
            }
            gamma = self.mul_at(Level::Quartic, gamma, giant);
        }
        unreachable!("bsgs must find a logarithm in a cyclic group")
    }

    /// Embed a code upward; the encoding makes this the identity.
    pub fn lift(&self, x: Elem, to: Level) -> Elem {
        debug_assert!(level_rank(to) >= level_rank(x.level));
        Elem::new(to, x.code)
    }
}

fn level_rank(l: Level) -> u8 {
    match l {
        Level::Base => 0,
        Level::Quad => 1,
        Level::Quartic => 2,
    }
}

#[inline]
fn fq_add(p: u32, a: u32, b: u32) -> u32 {
    (a % p + b % p) % p + p * ((a / p + b / p) % p)
}

#[inline]
fn fq_neg(p: u32, a: u32) -> u32 {
    ((p - a % p) % p) + p * ((p - a / p) % p)
}

#[inline]
fn fq_sub(p: u32, a: u32, b: u32) -> u32 {
    fq_add(p, a, fq_neg(p, b))
}
