//! Arithmetic in F_q and the extension F_{q^m} in polynomial basis,
//! including the Frobenius power maps x ↦ x^{q^i}.
//!
//! Elements are coefficient vectors of length m over F_q (little-endian).
//! The base field order q is restricted to primes; q = 2 has a packed
//! carry-less fast path for multiplication.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Immutable description of F_{q^m}: prime q, degree m, monic irreducible modulus.
#[derive(Debug, PartialEq, Eq)]
pub struct FieldParams {
    q: u32,
    m: usize,
    /// Monic modulus of degree m, little-endian, length m + 1.
    modulus: Vec<u32>,
}

/// Shared handle to field parameters. Cheap to clone, safe to send.
#[derive(Clone)]
pub struct Field(Arc<FieldParams>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.q(), self.m())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Field {}

fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn inv_mod(a: u32, q: u32) -> u32 {
    // extended Euclid; q prime, a != 0
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (q as i64, (a % q) as i64);
    while new_r != 0 {
        let quot = r / new_r;
        (t, new_t) = (new_t, t - quot * new_t);
        (r, new_r) = (new_r, r - quot * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(q as i64) as u32
}

// ---- raw polynomial helpers over F_q (little-endian coefficient slices) ----

fn poly_trim(p: &mut Vec<u32>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_mul(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai as u64 * bj as u64) % q as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
    poly_trim(&mut out);
    out
}

/// Remainder of p modulo the monic polynomial f.
fn poly_rem(p: &[u32], f: &[u32], q: u32) -> Vec<u32> {
    let mut r = p.to_vec();
    poly_trim(&mut r);
    let df = f.len() - 1;
    while r.len() > df {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - df;
        if lead != 0 {
            for (i, &fi) in f.iter().enumerate() {
                let idx = i + shift;
                let sub = (lead as u64 * fi as u64) % q as u64;
                r[idx] = ((r[idx] as u64 + q as u64 - sub) % q as u64) as u32;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

fn poly_gcd(a: &[u32], b: &[u32], q: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        // make b monic before reducing
        let lead = *b.last().unwrap();
        if lead != 1 {
            let li = inv_mod(lead, q);
            for c in b.iter_mut() {
                *c = ((*c as u64 * li as u64) % q as u64) as u32;
            }
        }
        let r = poly_rem(&a, &b, q);
        a = b;
        b = r;
    }
    a
}

/// p^q mod f by square-and-multiply on the exponent q.
fn poly_pow_q_mod(p: &[u32], f: &[u32], q: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut base = p.to_vec();
    let mut e = q;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &base, q), f, q);
        }
        e >>= 1;
        if e > 0 {
            base = poly_rem(&poly_mul(&base, &base, q), f, q);
        }
    }
    result
}

fn prime_divisors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Irreducibility over F_q: x^{q^m} ≡ x (mod f) and
/// gcd(x^{q^{m/p}} − x, f) = 1 for every prime p | m.
fn is_irreducible(f: &[u32], q: u32) -> bool {
    let m = f.len() - 1;
    if m == 0 {
        return false;
    }
    let x = vec![0u32, 1];
    let checkpoints = prime_divisors(m)
        .into_iter()
        .map(|p| m / p)
        .collect::<Vec<_>>();
    let mut t = poly_rem(&x, f, q);
    for step in 1..=m {
        t = poly_pow_q_mod(&t, f, q);
        if checkpoints.contains(&step) {
            // gcd(t - x, f) must be trivial
            let mut diff = t.clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = (diff[1] + q - 1) % q;
            poly_trim(&mut diff);
            let g = poly_gcd(&diff, f, q);
            if g.len() != 1 {
                return false;
            }
        }
    }
    // t == x
    let mut diff = t;
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + q - 1) % q;
    poly_trim(&mut diff);
    diff.is_empty()
}

impl FieldParams {
    /// Smallest (by integer encoding of the low coefficients) monic irreducible
    /// polynomial of degree m over F_q.
    fn default_modulus(q: u32, m: usize) -> Vec<u32> {
        let mut low = vec![0u32; m];
        loop {
            // increment `low` as a base-q counter
            let mut i = 0;
            loop {
                low[i] += 1;
                if low[i] < q {
                    break;
                }
                low[i] = 0;
                i += 1;
                assert!(i < m, "no irreducible polynomial found (impossible)");
            }
            if low[0] == 0 {
                continue; // divisible by x
            }
            let mut f = low.clone();
            f.push(1);
            if is_irreducible(&f, q) {
                return f;
            }
        }
    }
}

impl Field {
    /// Field with the deterministic default modulus for (q, m).
    pub fn new(q: u32, m: usize) -> Result<Field> {
        if !is_prime(q) {
            return Err(Error::Param(format!("q = {q} is not prime")));
        }
        if m == 0 {
            return Err(Error::Param("extension degree m must be >= 1".into()));
        }
        let modulus = FieldParams::default_modulus(q, m);
        Ok(Field(Arc::new(FieldParams { q, m, modulus })))
    }

    /// Field with an explicit monic irreducible modulus (little-endian, degree m).
    pub fn with_modulus(q: u32, m: usize, modulus: Vec<u32>) -> Result<Field> {
        if !is_prime(q) {
            return Err(Error::Param(format!("q = {q} is not prime")));
        }
        if modulus.len() != m + 1 || m == 0 {
            return Err(Error::Param(format!(
                "modulus must have degree m = {m} (got length {})",
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= q) {
            return Err(Error::Param("modulus coefficient out of range".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::Param("modulus must be monic".into()));
        }
        if !is_irreducible(&modulus, q) {
            return Err(Error::Param("modulus is not irreducible".into()));
        }
        Ok(Field(Arc::new(FieldParams { q, m, modulus })))
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn m(&self) -> usize {
        self.0.m
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Canonical integer encoding of the modulus: Σ c_i q^i.
    pub fn modulus_int(&self) -> u128 {
        let mut acc = 0u128;
        for &c in self.0.modulus.iter().rev() {
            acc = acc * self.0.q as u128 + c as u128;
        }
        acc
    }

    /// Inverse of `modulus_int`; used when reading serialized fields.
    pub fn from_modulus_int(q: u32, m: usize, enc: u128) -> Result<Field> {
        let mut coeffs = Vec::with_capacity(m + 1);
        let mut e = enc;
        for _ in 0..=m {
            coeffs.push((e % q as u128) as u32);
            e /= q as u128;
        }
        if e != 0 {
            return Err(Error::Param("modulus encoding out of range".into()));
        }
        Field::with_modulus(q, m, coeffs)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: vec![0; self.m()],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.embed(1)
    }

    /// Embed a base-field scalar as a degree-0 element.
    pub fn embed(&self, a: u32) -> FieldElement {
        let mut coeffs = vec![0; self.m()];
        coeffs[0] = a % self.q();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn from_coeffs(&self, coeffs: Vec<u32>) -> Result<FieldElement> {
        if coeffs.len() != self.m() {
            return Err(Error::Param(format!(
                "expected {} coefficients, got {}",
                self.m(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.q()) {
            return Err(Error::Param("coefficient out of range".into()));
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// Element from its canonical integer encoding Σ coeffs[i]·q^i.
    pub fn from_int(&self, enc: u128) -> Result<FieldElement> {
        let q = self.q() as u128;
        let mut coeffs = Vec::with_capacity(self.m());
        let mut e = enc;
        for _ in 0..self.m() {
            coeffs.push((e % q) as u32);
            e /= q;
        }
        if e != 0 {
            return Err(Error::Param(format!("encoding {enc} out of range")));
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let q = self.q();
        let coeffs = (0..self.m()).map(|_| rng.random_range(0..q)).collect();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn random_base<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.q())
    }

    /// Number of elements as u128, if representable.
    pub fn order(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..self.m() {
            acc = acc.checked_mul(self.q() as u128)?;
        }
        Some(acc)
    }
}

/// An element of F_{q^m} as a coefficient vector over F_q.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<u32>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_int())
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Canonical integer encoding Σ coeffs[i]·q^i.
    pub fn to_int(&self) -> u128 {
        let mut acc = 0u128;
        for &c in self.coeffs.iter().rev() {
            acc = acc * self.field.q() as u128 + c as u128;
        }
        acc
    }

    fn check_same(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::Param("mismatched field parameters".into()))
        }
    }

    pub fn checked_add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(self.add_ref(other))
    }

    pub fn checked_mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same(other)?;
        Ok(self.mul_ref(other))
    }

    pub fn add_ref(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(self.field == other.field);
        let q = self.field.q();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % q)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub_ref(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(self.field == other.field);
        let q = self.field.q();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + q - b) % q)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg_ref(&self) -> FieldElement {
        let q = self.field.q();
        let coeffs = self.coeffs.iter().map(|&a| (q - a) % q).collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn mul_ref(&self, other: &FieldElement) -> FieldElement {
        debug_assert!(self.field == other.field);
        let q = self.field.q();
        let m = self.field.m();
        if q == 2 && m <= 63 {
            let a = pack2(&self.coeffs);
            let b = pack2(&other.coeffs);
            let f = pack2(&self.field.modulus()[..m]);
            let p = clmul_reduce(a, b, f, m);
            return FieldElement {
                field: self.field.clone(),
                coeffs: unpack2(p, m),
            };
        }
        let prod = poly_mul(&self.coeffs, &other.coeffs, q);
        let mut r = poly_rem(&prod, self.field.modulus(), q);
        r.resize(m, 0);
        FieldElement {
            field: self.field.clone(),
            coeffs: r,
        }
    }

    /// Scale by a base-field scalar.
    pub fn scale(&self, a: u32) -> FieldElement {
        let q = self.field.q();
        let a = a % q;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| ((c as u64 * a as u64) % q as u64) as u32)
            .collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let q = self.field.q();
        let f = self.field.modulus();
        // extended Euclid in F_q[x]: r0 = f, r1 = self
        let mut r0 = f.to_vec();
        let mut r1 = self.coeffs.clone();
        poly_trim(&mut r1);
        let mut t0: Vec<u32> = Vec::new();
        let mut t1: Vec<u32> = vec![1];
        while !r1.is_empty() {
            // quotient of r0 by r1
            let lead = *r1.last().unwrap();
            let li = inv_mod(lead, q);
            let mut quot = vec![0u32; r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            while rem.len() >= r1.len() && !rem.is_empty() {
                let c = ((*rem.last().unwrap() as u64 * li as u64) % q as u64) as u32;
                let shift = rem.len() - r1.len();
                if c != 0 {
                    quot[shift] = c;
                    for (i, &ri) in r1.iter().enumerate() {
                        let sub = (c as u64 * ri as u64) % q as u64;
                        rem[i + shift] =
                            ((rem[i + shift] as u64 + q as u64 - sub) % q as u64) as u32;
                    }
                }
                rem.pop();
                poly_trim(&mut rem);
            }
            poly_trim(&mut quot);
            // (t0, t1) <- (t1, t0 - quot*t1)
            let qt1 = poly_mul(&quot, &t1, q);
            let mut new_t = t0.clone();
            new_t.resize(new_t.len().max(qt1.len()), 0);
            for (i, &c) in qt1.iter().enumerate() {
                new_t[i] = (new_t[i] + q - c) % q;
            }
            poly_trim(&mut new_t);
            t0 = t1;
            t1 = new_t;
            r0 = r1;
            r1 = rem;
        }
        // r0 is the gcd (a nonzero constant since f is irreducible)
        debug_assert_eq!(r0.len(), 1);
        let scale = inv_mod(r0[0], q);
        let mut coeffs: Vec<u32> = t0
            .iter()
            .map(|&c| ((c as u64 * scale as u64) % q as u64) as u32)
            .collect();
        coeffs.resize(self.field.m(), 0);
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    /// x^q, the generating automorphism of F_{q^m}/F_q.
    pub fn pow_q(&self) -> FieldElement {
        let q = self.field.q();
        if q == 2 {
            return self.mul_ref(self);
        }
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Frobenius power x^{[i]} = x^{q^(i mod m)}; negative i is the inverse
    /// automorphism applied |i| times.
    pub fn frobenius(&self, i: i64) -> FieldElement {
        let m = self.field.m() as i64;
        let steps = i.rem_euclid(m) as usize;
        let mut out = self.clone();
        for _ in 0..steps {
            out = out.pow_q();
        }
        out
    }
}

// q = 2 fast path: elements packed into u64 bit masks.

fn pack2(coeffs: &[u32]) -> u64 {
    let mut out = 0u64;
    for (i, &c) in coeffs.iter().enumerate() {
        out |= (c as u64 & 1) << i;
    }
    out
}

fn unpack2(bits: u64, m: usize) -> Vec<u32> {
    (0..m).map(|i| ((bits >> i) & 1) as u32).collect()
}

/// Carry-less multiply of a and b, reduced modulo x^m + f (f = low part of the modulus).
fn clmul_reduce(a: u64, b: u64, f: u64, m: usize) -> u64 {
    let mut prod: u128 = 0;
    let mut bb = b;
    let mut shift = 0;
    while bb != 0 {
        if bb & 1 == 1 {
            prod ^= (a as u128) << shift;
        }
        bb >>= 1;
        shift += 1;
    }
    // reduce degree down to < m
    for d in (m..2 * m).rev() {
        if (prod >> d) & 1 == 1 {
            prod ^= 1 << d;
            prod ^= (f as u128) << (d - m);
        }
    }
    prod as u64
}

impl std::ops::Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "mismatched field parameters");
        self.add_ref(rhs)
    }
}

impl std::ops::Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "mismatched field parameters");
        self.sub_ref(rhs)
    }
}

impl std::ops::Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "mismatched field parameters");
        self.mul_ref(rhs)
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_ref()
    }
}
