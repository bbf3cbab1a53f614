//! Finite fields `GF(p^e)` with `p^e <= 512`, as lookup tables.
//!
//! Elements are integers `0..q` whose base-`p` digits are polynomial coefficients,
//! lowest degree first. Extension fields reduce modulo a fixed irreducible polynomial.

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 512;

/// Monic irreducible polynomials, coefficients from the constant term up.
const IRREDUCIBLE: &[(usize, &[usize])] = &[
    (4, &[1, 1, 1]),
    (8, &[1, 1, 0, 1]),
    (16, &[1, 1, 0, 0, 1]),
    (32, &[1, 0, 1, 0, 0, 1]),
    (64, &[1, 1, 0, 1, 1, 0, 1]),
    (128, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (256, &[1, 0, 1, 1, 1, 0, 0, 0, 1]),
    (512, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (9, &[2, 2, 1]),
    (27, &[1, 2, 0, 1]),
    (81, &[2, 0, 0, 2, 1]),
    (243, &[1, 2, 0, 0, 0, 1]),
    (25, &[2, 4, 1]),
    (125, &[3, 3, 0, 1]),
    (49, &[3, 6, 1]),
    (343, &[4, 0, 6, 1]),
    (121, &[2, 7, 1]),
    (169, &[2, 12, 1]),
    (289, &[3, 16, 1]),
    (361, &[2, 18, 1]),
];

/// `(p, e)` with `q = p^e` and `p` prime, or `None`.
pub fn prime_power(q: usize) -> Option<(usize, u32)> {
    let p = crate::bounds::prime_power_base(q as u64)? as usize;
    let mut e = 0;
    let mut n = q;
    while n > 1 {
        n /= p;
        e += 1;
    }
    Some((p, e))
}

#[derive(Debug, Clone)]
pub struct GaloisField {
    pub p: usize,
    pub e: u32,
    pub q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
}

fn digits(mut a: usize, p: usize, e: u32) -> Vec<usize> {
    (0..e)
        .map(|_| {
            let d = a % p;
            a /= p;
            d
        })
        .collect()
}

fn from_digits(ds: &[usize], p: usize) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of two polynomials over `GF(p)` reduced modulo the monic `modulus`.
fn poly_mulmod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let e = modulus.len() - 1;
    let mut prod = vec![0usize; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for deg in (e..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        for (i, &m) in modulus.iter().enumerate() {
            let idx = deg - e + i;
            prod[idx] = (prod[idx] + (p - c) * m % p) % p;
        }
    }
    prod.truncate(e);
    prod
}

impl GaloisField {
    pub fn new(q: usize) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
        if q > MAX_ORDER {
            return Err(Error::InvalidParameter(format!("field order {q} exceeds {MAX_ORDER}")));
        }
        let modulus: Vec<usize> = if e == 1 {
            vec![0, 1]
        } else {
            IRREDUCIBLE.iter().find(|(o, _)| *o == q).map(|(_, m)| m.to_vec()).expect("table covers all orders")
        };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a, p, e);
            for b in 0..q {
                let db = digits(b, p, e);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = from_digits(&sum, p) as u16;
                mul[a * q + b] = if e == 1 {
                    (a * b % p) as u16
                } else {
                    from_digits(&poly_mulmod(&da, &db, &modulus, p), p) as u16
                };
            }
        }
        Ok(GaloisField { p, e, q, add, mul })
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    /// Evaluates `sum coeffs[i] x^i` by Horner's rule.
    pub fn eval(&self, coeffs: &[usize], x: usize) -> usize {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}
