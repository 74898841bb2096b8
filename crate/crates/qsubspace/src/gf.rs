//! Arithmetic in small finite fields `F_{p^e}` and their extension towers.
//!
//! Elements of `F_{p^e}` are encoded as integers in `[0, p^e)`: the residue
//! class `c_0 + c_1 x + ... + c_{e-1} x^{e-1}` modulo the canonical modulus
//! is encoded as the base-`p` integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`.
//! The canonical modulus is the lexicographically smallest irreducible monic
//! polynomial of degree `e` over `F_p`, comparing coefficient tuples
//! `(c_0, ..., c_{e-1})` from the constant term upward. Both choices are
//! deterministic, so encodings written by one run mean the same element in
//! every other run.
//!
//! Extension towers `F_{q^m} / F_q` are realized inside `F_{p^{e m}}` with a
//! subfield embedding computed once: the image of the base field's generator
//! is the smallest root (by encoding) of the base modulus in the extension.
//! [`Tower::flatten`] expresses extension elements as coordinate vectors in
//! `F_q^m` with respect to the polynomial basis `1, y, ..., y^{m-1}` of the
//! extension's own generator `y`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order `p^e`.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Largest possible extension degree (attained by `F_{2^20}`).
const MAX_E: usize = 20;

#[derive(Debug)]
struct FieldRepr {
    p: u32,
    e: u32,
    q: u32,
    /// Monic canonical modulus, `modulus[i]` the coefficient of `x^i`,
    /// length `e + 1`.
    modulus: Vec<u32>,
    /// Discrete logarithms base a fixed generator; empty for prime fields,
    /// `log[0]` is unused otherwise.
    log: Vec<u32>,
    /// Generator powers, doubled in length so `exp[log a + log b]` needs no
    /// reduction modulo `q - 1`; empty for prime fields.
    exp: Vec<u32>,
}

/// A finite field `F_{p^e}`, cheap to clone and shared across all objects
/// defined over it. Two fields are equal iff they have the same `p` and `e`
/// (the modulus is then identical by construction).
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldRepr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.p() == other.p() && self.e() == other.e())
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order())
    }
}

impl Field {
    /// Constructs `F_{p^e}` with the canonical modulus.
    pub fn new(p: u32, e: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidSpec("extension degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p: p as u64, e })? as u32;
        let modulus = smallest_irreducible(p, e);
        let mut repr = FieldRepr {
            p,
            e,
            q,
            modulus,
            log: Vec::new(),
            exp: Vec::new(),
        };
        if e > 1 {
            build_log_tables(&mut repr);
        }
        Ok(Field(Arc::new(repr)))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    /// Field order `q = p^e`.
    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Canonical modulus coefficients, constant term first, length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// All element encodings in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.0.q
    }

    /// Encodes base-`p` digits (constant coordinate first) as an element.
    pub fn encode(&self, digits: &[u32]) -> Result<u32> {
        if digits.len() != self.0.e as usize {
            return Err(Error::BadLength {
                expected: self.0.e as usize,
                got: digits.len(),
            });
        }
        let mut a = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            assert!(d < self.0.p, "digit {d} out of range for {self}");
            a += d as u64 * (self.0.p as u64).pow(i as u32);
        }
        Ok(a as u32)
    }

    /// Base-`p` digits of an element, constant coordinate first, length `e`.
    pub fn decode(&self, a: u32) -> Vec<u32> {
        debug_assert!(a < self.0.q);
        let mut digits = vec![0u32; self.0.e as usize];
        decode_into(a, self.0.p, &mut digits);
        digits
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        let p = self.0.p;
        if p == 2 {
            return a ^ b;
        }
        if self.0.e == 1 {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        digitwise(a, b, p, |x, y| {
            let s = x + y;
            if s >= p {
                s - p
            } else {
                s
            }
        })
    }

    pub fn neg(&self, a: u32) -> u32 {
        debug_assert!(a < self.0.q);
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        if self.0.e == 1 {
            return if a == 0 { 0 } else { p - a };
        }
        digitwise(a, 0, p, |x, _| if x == 0 { 0 } else { p - x })
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.0.q && b < self.0.q);
        if a == 0 || b == 0 {
            return 0;
        }
        if self.0.e == 1 {
            return ((a as u64 * b as u64) % self.0.p as u64) as u32;
        }
        let r = &self.0;
        r.exp[r.log[a as usize] as usize + r.log[b as usize] as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inversion of zero in {self}");
        if self.0.e == 1 {
            return self.pow(a, self.0.p as u64 - 2);
        }
        let r = &self.0;
        r.exp[(r.q - 1 - r.log[a as usize]) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, mut n: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }
}

/// Applies `op` to corresponding base-`p` digits of `a` and `b`.
fn digitwise(a: u32, b: u32, p: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut scale = 1u32;
    while a != 0 || b != 0 {
        out += op(a % p, b % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

fn decode_into(mut a: u32, p: u32, digits: &mut [u32]) {
    for d in digits.iter_mut() {
        *d = a % p;
        a /= p;
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `num` modulo the monic polynomial `div` over `F_p`, in place;
/// coefficients beyond `div.len() - 2` end up zero.
fn poly_rem(num: &mut [u32], div: &[u32], p: u32) {
    let d = div.len() - 1;
    for i in (d..num.len()).rev() {
        let c = num[i];
        if c == 0 {
            continue;
        }
        num[i] = 0;
        for (j, &m) in div.iter().take(d).enumerate() {
            let t = (c as u64 * m as u64) % p as u64;
            let cur = num[i - d + j] as u64;
            num[i - d + j] = ((cur + p as u64 - t % p as u64) % p as u64) as u32;
        }
    }
}

fn poly_is_zero(coeffs: &[u32]) -> bool {
    coeffs.iter().all(|&c| c == 0)
}

/// True iff the monic polynomial `coeffs` (constant term first, leading
/// coefficient 1) is irreducible over `F_p`, by trial division against every
/// monic polynomial of degree at most `deg / 2`.
fn is_irreducible(coeffs: &[u32], p: u32) -> bool {
    let deg = coeffs.len() - 1;
    if deg == 1 {
        return true;
    }
    let mut scratch = vec![0u32; coeffs.len()];
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        let mut div = vec![0u32; d + 1];
        div[d] = 1;
        for n in 0..count {
            decode_into(n as u32, p, &mut div[..d]);
            scratch.copy_from_slice(coeffs);
            poly_rem(&mut scratch, &div, p);
            if poly_is_zero(&scratch) {
                return false;
            }
        }
    }
    true
}

/// The canonical modulus: lexicographically smallest irreducible monic
/// polynomial of degree `e`, comparing `(c_0, ..., c_{e-1})` from the
/// constant term upward.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    let mut coeffs = vec![0u32; e + 1];
    coeffs[e] = 1;
    let total = (p as u64).pow(e as u32);
    for n in 0..total {
        // c_0 takes the most significant digit of n, so counting n upward
        // walks the documented lexicographic order.
        let mut rem = n;
        for i in (0..e).rev() {
            coeffs[i] = (rem % p as u64) as u32;
            rem /= p as u64;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Product in `F_{p^e}` by schoolbook polynomial multiplication and monic
/// reduction; used only while bootstrapping the log tables.
fn mul_raw(repr: &FieldRepr, a: u32, b: u32) -> u32 {
    let e = repr.e as usize;
    let p = repr.p;
    let mut da = [0u32; MAX_E];
    let mut db = [0u32; MAX_E];
    decode_into(a, p, &mut da[..e]);
    decode_into(b, p, &mut db[..e]);
    let mut prod = [0u32; 2 * MAX_E];
    for i in 0..e {
        if da[i] == 0 {
            continue;
        }
        for j in 0..e {
            let t = prod[i + j] as u64 + da[i] as u64 * db[j] as u64;
            prod[i + j] = (t % p as u64) as u32;
        }
    }
    poly_rem(&mut prod[..2 * e - 1], &repr.modulus, p);
    let mut out = 0u64;
    for i in (0..e).rev() {
        out = out * p as u64 + prod[i] as u64;
    }
    out as u32
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

fn build_log_tables(repr: &mut FieldRepr) {
    let q = repr.q;
    let factors = prime_factors(q - 1);
    let pow_raw = |a: u32, mut n: u64| -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = mul_raw(repr, acc, base);
            }
            base = mul_raw(repr, base, base);
            n >>= 1;
        }
        acc
    };
    let gen = (2..q)
        .find(|&c| {
            factors
                .iter()
                .all(|&r| pow_raw(c, ((q - 1) / r) as u64) != 1)
        })
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * (q as usize - 1) - 1];
    let mut log = vec![0u32; q as usize];
    let mut acc = 1u32;
    for (i, slot) in exp.iter_mut().take(q as usize - 1).enumerate() {
        *slot = acc;
        log[acc as usize] = i as u32;
        acc = mul_raw(repr, acc, gen);
    }
    debug_assert_eq!(acc, 1);
    for i in q as usize - 1..exp.len() {
        exp[i] = exp[i - (q as usize - 1)];
    }
    repr.exp = exp;
    repr.log = log;
}

/// Gauss–Jordan inverse of a square matrix over the prime field `F_p`;
/// `None` when singular. Row-major, used for the tower coordinate maps.
fn invert_mod_p(mat: &[u32], n: usize, p: u32) -> Option<Vec<u32>> {
    let p64 = p as u64;
    let mut a: Vec<u64> = mat.iter().map(|&x| x as u64).collect();
    let mut inv: Vec<u64> = vec![0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1;
    }
    let pow_mod = |mut b: u64, mut e: u64| -> u64 {
        let mut acc = 1u64;
        b %= p64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p64;
            }
            b = b * b % p64;
            e >>= 1;
        }
        acc
    };
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r * n + col] != 0)?;
        for j in 0..n {
            a.swap(col * n + j, pivot * n + j);
            inv.swap(col * n + j, pivot * n + j);
        }
        let scale = pow_mod(a[col * n + col], p64 - 2);
        for j in 0..n {
            a[col * n + j] = a[col * n + j] * scale % p64;
            inv[col * n + j] = inv[col * n + j] * scale % p64;
        }
        for r in 0..n {
            if r == col || a[r * n + col] == 0 {
                continue;
            }
            let f = a[r * n + col];
            for j in 0..n {
                a[r * n + j] = (a[r * n + j] + (p64 - f) * a[col * n + j]) % p64;
                inv[r * n + j] = (inv[r * n + j] + (p64 - f) * inv[col * n + j]) % p64;
            }
        }
    }
    Some(inv.into_iter().map(|x| x as u32).collect())
}

#[derive(Debug)]
struct TowerRepr {
    base: Field,
    ext: Field,
    m: u32,
    /// Image in the extension of every base element, indexed by encoding.
    embed: Vec<u32>,
    embed_inv: HashMap<u32, u32>,
    /// Powers `1, y, ..., y^{m-1}` of the extension generator.
    y_pow: Vec<u32>,
    /// Inverse of the `F_p`-basis matrix `{embed(g^j) . y^i}`, row-major
    /// `(e m) x (e m)` over `F_p`; solves for flatten coordinates.
    flat_inv: Vec<u32>,
}

/// An extension tower `F_{q^m} / F_q` with a fixed subfield embedding and a
/// fixed `F_q`-basis `1, y, ..., y^{m-1}` of the top field.
#[derive(Clone, Debug)]
pub struct Tower(Arc<TowerRepr>);

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        self.base() == other.base() && self.m() == other.m()
    }
}

impl Eq for Tower {}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.ext(), self.base())
    }
}

impl Tower {
    /// Builds `F_{q^m} / F_q` over the given base field.
    pub fn new(base: &Field, m: u32) -> Result<Tower> {
        if m == 0 {
            return Err(Error::InvalidSpec("tower degree must be >= 1".into()));
        }
        let p = base.p();
        let e = base.e();
        let ext = Field::new(p, e * m)?;
        let embed: Vec<u32> = if e == 1 {
            base.elements().collect()
        } else {
            let root = ext
                .elements()
                .find(|&x| {
                    let mut acc = 0u32;
                    for &c in base.modulus().iter().rev() {
                        acc = ext.add(ext.mul(acc, x), c);
                    }
                    acc == 0
                })
                .expect("the base modulus splits in any extension of the base field");
            let g = p; // encoding of the base field's generator x
            base.elements()
                .map(|c| {
                    let mut img = 0u32;
                    for (j, &d) in base.decode(c).iter().enumerate() {
                        img = ext.add(img, ext.mul(d, ext.pow(root, j as u64)));
                    }
                    debug_assert!(c != g || img == root);
                    img
                })
                .collect()
        };
        let embed_inv: HashMap<u32, u32> = embed
            .iter()
            .enumerate()
            .map(|(c, &img)| (img, c as u32))
            .collect();
        debug_assert_eq!(embed_inv.len(), embed.len(), "embedding must be injective");

        let y = if ext.e() == 1 { 0 } else { p };
        let y_pow: Vec<u32> = (0..m).map(|i| ext.pow(y, i as u64)).collect();

        let d = (e * m) as usize;
        let mut basis_mat = vec![0u32; d * d];
        let mut digits = vec![0u32; d];
        for (i, &yp) in y_pow.iter().enumerate() {
            for j in 0..e as usize {
                let g_j = if e == 1 { 1 } else { base.pow(p, j as u64) };
                let elt = ext.mul(embed[g_j as usize], yp);
                decode_into(elt, p, &mut digits);
                let col = i * e as usize + j;
                for (row, &dig) in digits.iter().enumerate() {
                    basis_mat[row * d + col] = dig;
                }
            }
        }
        let flat_inv = invert_mod_p(&basis_mat, d, p)
            .expect("tower basis elements are linearly independent over F_p");

        Ok(Tower(Arc::new(TowerRepr {
            base: base.clone(),
            ext,
            m,
            embed,
            embed_inv,
            y_pow,
            flat_inv,
        })))
    }

    pub fn base(&self) -> &Field {
        &self.0.base
    }

    pub fn ext(&self) -> &Field {
        &self.0.ext
    }

    pub fn m(&self) -> u32 {
        self.0.m
    }

    /// Image of a base field element in the extension.
    pub fn embed(&self, c: u32) -> u32 {
        self.0.embed[c as usize]
    }

    /// Preimage under the embedding, when the element lies in the subfield.
    pub fn try_project(&self, x: u32) -> Option<u32> {
        self.0.embed_inv.get(&x).copied()
    }

    /// The fixed `F_q`-basis `1, y, ..., y^{m-1}` of the extension.
    pub fn poly_basis(&self) -> &[u32] {
        &self.0.y_pow
    }

    /// `x^{q^i}` for `q` the base field order.
    pub fn frobenius(&self, x: u32, i: u32) -> u32 {
        let q = self.0.base.order() as u64;
        let mut r = x;
        for _ in 0..i {
            r = self.0.ext.pow(r, q);
        }
        r
    }

    /// Relative trace `x + x^q + ... + x^{q^{m-1}}`, returned as a base
    /// field element.
    pub fn trace(&self, x: u32) -> u32 {
        let ext = &self.0.ext;
        let mut acc = 0u32;
        let mut term = x;
        for _ in 0..self.0.m {
            acc = ext.add(acc, term);
            term = ext.pow(term, self.0.base.order() as u64);
        }
        *self
            .0
            .embed_inv
            .get(&acc)
            .expect("the trace lands in the base field")
    }

    /// Coordinates of `x` in `F_q^m` with respect to the polynomial basis.
    pub fn flatten(&self, x: u32) -> Vec<u32> {
        let r = &self.0;
        let p = r.base.p();
        let e = r.base.e() as usize;
        let d = e * r.m as usize;
        let mut digits = vec![0u32; d];
        decode_into(x, p, &mut digits);
        let mut coords = Vec::with_capacity(r.m as usize);
        for i in 0..r.m as usize {
            let mut base_digits = vec![0u32; e];
            for (j, bd) in base_digits.iter_mut().enumerate() {
                let row = i * e + j;
                let mut acc = 0u64;
                for (col, &dig) in digits.iter().enumerate() {
                    acc += r.flat_inv[row * d + col] as u64 * dig as u64;
                }
                *bd = (acc % p as u64) as u32;
            }
            coords.push(r.base.encode(&base_digits).expect("digit count is e"));
        }
        coords
    }

    /// Inverse of [`Tower::flatten`].
    pub fn unflatten(&self, coords: &[u32]) -> Result<u32> {
        let r = &self.0;
        if coords.len() != r.m as usize {
            return Err(Error::BadLength {
                expected: r.m as usize,
                got: coords.len(),
            });
        }
        let mut acc = 0u32;
        for (i, &c) in coords.iter().enumerate() {
            acc = r.ext.add(acc, r.ext.mul(self.embed(c), r.y_pow[i]));
        }
        Ok(acc)
    }
}

/// A linearized polynomial `f(x) = sum_i a_i x^{q^i}` over an extension
/// tower; the map `x -> f(x)` is `F_q`-linear on `F_{q^m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPoly {
    tower: Tower,
    coeffs: Vec<u32>,
}

impl LinearizedPoly {
    /// `coeffs[i]` is the coefficient of `x^{q^i}`, as an extension element.
    pub fn new(tower: &Tower, coeffs: Vec<u32>) -> LinearizedPoly {
        debug_assert!(coeffs.iter().all(|&c| c < tower.ext().order()));
        LinearizedPoly {
            tower: tower.clone(),
            coeffs,
        }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// True when the polynomial is `a x` for some (possibly zero) `a`.
    pub fn is_monomial(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&c| c == 0)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let ext = self.tower.ext();
        let mut acc = 0u32;
        let mut xi = x;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                xi = ext.pow(xi, self.tower.base().order() as u64);
            }
            acc = ext.add(acc, ext.mul(c, xi));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent modulus oracle: lists every irreducible monic polynomial
    /// of degree `e` by sieving out all products of two smaller monic
    /// polynomials, then takes the lexicographic minimum.
    fn modulus_oracle(p: u32, e: usize) -> Vec<u32> {
        let pe = (p as u64).pow(e as u32) as usize;
        let decode = |n: usize, len: usize| -> Vec<u32> {
            let mut v = vec![0u32; len];
            let mut n = n as u32;
            for d in v.iter_mut() {
                *d = n % p;
                n /= p;
            }
            v
        };
        // product of two monic polynomials given by their lower coefficients
        let mul = |a: &[u32], b: &[u32]| -> Vec<u32> {
            let (da, db) = (a.len(), b.len());
            let mut fa = a.to_vec();
            fa.push(1);
            let mut fb = b.to_vec();
            fb.push(1);
            let mut out = vec![0u32; da + db + 1];
            for (i, &x) in fa.iter().enumerate() {
                for (j, &y) in fb.iter().enumerate() {
                    out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                }
            }
            out
        };
        let mut reducible = vec![false; pe];
        for d1 in 1..e {
            let d2 = e - d1;
            if d2 < d1 {
                break;
            }
            for n1 in 0..(p as usize).pow(d1 as u32) {
                for n2 in 0..(p as usize).pow(d2 as u32) {
                    let prod = mul(&decode(n1, d1), &decode(n2, d2));
                    assert_eq!(prod[e], 1);
                    // key orders tuples with c_0 most significant
                    let mut key = 0usize;
                    for &c in prod.iter().take(e) {
                        key = key * p as usize + c as usize;
                    }
                    reducible[key] = true;
                }
            }
        }
        let lex_min = (0..pe)
            .find(|&key| !reducible[key])
            .expect("an irreducible polynomial exists");
        // key digits are (c_0, ..., c_{e-1}) with c_0 most significant
        let mut coeffs = vec![0u32; e + 1];
        coeffs[e] = 1;
        for i in (0..e).rev() {
            coeffs[e - 1 - i] = (lex_min / (p as usize).pow(i as u32) % p as usize) as u32;
        }
        coeffs
    }

    #[test]
    fn canonical_moduli_match_oracle() {
        for (p, e) in [(2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (5, 2)] {
            let f = Field::new(p, e).unwrap();
            assert_eq!(
                f.modulus(),
                modulus_oracle(p, e as usize).as_slice(),
                "F_{}^{}",
                p,
                e
            );
        }
    }

    #[test]
    fn named_moduli() {
        assert_eq!(Field::new(2, 1).unwrap().modulus(), &[0, 1]); // x
        assert_eq!(Field::new(2, 2).unwrap().modulus(), &[1, 1, 1]); // x^2+x+1
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]); // x^2+1
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Field::new(4, 1), Err(Error::InvalidPrime(4))));
        assert!(matches!(Field::new(1, 1), Err(Error::InvalidPrime(1))));
        assert!(matches!(
            Field::new(2, 21),
            Err(Error::FieldTooLarge { .. })
        ));
        assert!(Field::new(2, 20).is_ok());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for (p, e) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (2, 4), (5, 1)] {
            let f = Field::new(p, e).unwrap();
            let q = f.order();
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "inverse of {a} in {f}");
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn f8_products_against_modulus() {
        // F_8 uses x^3 + x^2 + 1, so x * x^2 = x^3 = x^2 + 1.
        let f = Field::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1, 1]);
        assert_eq!(f.mul(2, 2), 4); // x * x = x^2
        assert_eq!(f.mul(2, 4), 5); // x * x^2 = x^2 + 1
    }

    #[test]
    fn encode_decode_roundtrip() {
        let f = Field::new(3, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.encode(&f.decode(a)).unwrap(), a);
        }
        assert!(matches!(f.encode(&[1, 2]), Err(Error::BadLength { .. })));
    }

    #[test]
    fn frobenius_and_trace_in_f4() {
        let f2 = Field::new(2, 1).unwrap();
        let t = Tower::new(&f2, 2).unwrap();
        let omega = 2u32; // class of x in F_4
        assert_eq!(t.frobenius(omega, 1), t.ext().add(omega, 1));
        assert_eq!(t.trace(omega), 1);
        // Frobenius fixes exactly the prime subfield.
        let fixed = t.ext().elements().filter(|&x| t.frobenius(x, 1) == x);
        assert_eq!(fixed.count(), 2);
    }

    #[test]
    fn trace_fibers_are_balanced() {
        // Relative trace is onto with fibers of size q^{m-1}.
        for (p, e, m) in [(2, 1, 4), (3, 1, 2), (2, 2, 2)] {
            let base = Field::new(p, e).unwrap();
            let t = Tower::new(&base, m).unwrap();
            let mut fibers = vec![0usize; base.order() as usize];
            for x in t.ext().elements() {
                fibers[t.trace(x) as usize] += 1;
            }
            let expected = (base.order() as usize).pow(m - 1);
            assert!(fibers.iter().all(|&n| n == expected), "{fibers:?}");
        }
    }

    #[test]
    fn flatten_examples_and_roundtrip() {
        let f2 = Field::new(2, 1).unwrap();
        let t = Tower::new(&f2, 2).unwrap();
        assert_eq!(t.flatten(2), vec![0, 1]); // omega = 0*1 + 1*y

        for (p, e, m) in [(2, 1, 3), (2, 1, 4), (3, 1, 2), (2, 2, 3)] {
            let base = Field::new(p, e).unwrap();
            let t = Tower::new(&base, m).unwrap();
            for x in t.ext().elements() {
                let coords = t.flatten(x);
                assert_eq!(coords.len(), m as usize);
                assert_eq!(t.unflatten(&coords).unwrap(), x);
            }
            // flatten is F_q-linear: flatten(x + c y) = flatten(x) + c flatten(y)
            let ext = t.ext();
            let base_f = t.base().clone();
            for x in ext.elements().step_by(3) {
                for y in ext.elements().step_by(5) {
                    for c in base_f.elements() {
                        let lhs = t.flatten(ext.add(x, ext.mul(t.embed(c), y)));
                        let fx = t.flatten(x);
                        let fy = t.flatten(y);
                        let rhs: Vec<u32> = fx
                            .iter()
                            .zip(&fy)
                            .map(|(&a, &b)| base_f.add(a, base_f.mul(c, b)))
                            .collect();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let f4 = Field::new(2, 2).unwrap();
        let t = Tower::new(&f4, 3).unwrap();
        assert_eq!(t.ext().order(), 64);
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(t.embed(f4.add(a, b)), t.ext().add(t.embed(a), t.embed(b)));
                assert_eq!(t.embed(f4.mul(a, b)), t.ext().mul(t.embed(a), t.embed(b)));
            }
            assert_eq!(t.try_project(t.embed(a)), Some(a));
        }
    }

    #[test]
    fn linearized_kernel_of_u_frobenius_difference() {
        // f(x) = u^q x + u x^q kills exactly the F_q-line through u.
        let f2 = Field::new(2, 1).unwrap();
        let t = Tower::new(&f2, 3).unwrap();
        for u in t.ext().elements().skip(1) {
            let uq = t.frobenius(u, 1);
            let f = LinearizedPoly::new(&t, vec![uq, u]);
            assert_eq!(f.eval(u), 0);
            let kernel: Vec<u32> = t.ext().elements().filter(|&x| f.eval(x) == 0).collect();
            assert_eq!(kernel.len(), 2, "kernel of x -> u^2 x + u x^2 for u={u}");
        }
    }

    #[test]
    fn linearized_eval_is_linear() {
        let f3 = Field::new(3, 1).unwrap();
        let t = Tower::new(&f3, 3).unwrap();
        let f = LinearizedPoly::new(&t, vec![5, 17, 2]);
        let ext = t.ext();
        for x in ext.elements().step_by(2) {
            for c in f3.elements() {
                assert_eq!(
                    f.eval(ext.mul(t.embed(c), x)),
                    ext.mul(t.embed(c), f.eval(x))
                );
            }
            for y in ext.elements().step_by(7) {
                assert_eq!(f.eval(ext.add(x, y)), ext.add(f.eval(x), f.eval(y)));
            }
        }
    }

    #[test]
    fn trivial_tower_m1() {
        let f4 = Field::new(2, 2).unwrap();
        let t = Tower::new(&f4, 1).unwrap();
        for x in f4.elements() {
            assert_eq!(t.embed(x), x);
            assert_eq!(t.flatten(x), vec![x]);
            assert_eq!(t.trace(x), x);
        }
    }

    #[test]
    fn log_tables_agree_with_raw_products() {
        for (p, e) in [(2, 6), (3, 4)] {
            let f = Field::new(p, e).unwrap();
            for a in f.elements().step_by(11) {
                for b in f.elements().step_by(7) {
                    assert_eq!(f.mul(a, b), mul_raw(&f.0, a, b));
                }
            }
        }
    }
}
