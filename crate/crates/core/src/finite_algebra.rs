//! Prime tests, finite fields `GF(p^n)`, the Galois rings `GR(4, n)` and
//! mutually orthogonal Latin squares.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Prime factorization as `(p, e)` pairs in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Some((p, n))` when `q = p^n` with `n >= 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

/// Smallest prime `p` with `p = 1 mod d`.
pub fn smallest_prime_one_mod(d: u64) -> u64 {
    let mut p = d + 1;
    while !is_prime(p) {
        p += d;
    }
    p
}

fn digits(mut x: u64, base: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = x % base;
        x /= base;
    }
    out
}

fn undigits(ds: &[u64], base: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * base + d)
}

/// Multiply two polynomials (coefficient vectors, low degree first) modulo a
/// monic `modulus` and modulo `m` coefficientwise.
fn polymulmod(a: &[u64], b: &[u64], modulus: &[u64], m: u64) -> Vec<u64> {
    let n = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * n];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % m;
        }
    }
    for k in (n..2 * n).rev() {
        let top = prod[k];
        if top == 0 {
            continue;
        }
        for t in 0..=n {
            let idx = k - n + t;
            prod[idx] = (prod[idx] + (m - top) * modulus[t] % m) % m;
        }
    }
    prod.truncate(n);
    prod
}

/// Finite field `GF(p^n)` built on the lexicographically smallest primitive
/// polynomial. Elements are encoded as integers whose base-`p` digits are the
/// polynomial coefficients (constant term first).
#[derive(Debug, Clone)]
pub struct GaloisField {
    p: u64,
    n: u32,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
}

impl GaloisField {
    /// `GF(p^n)` from its characteristic and degree.
    pub fn from_pn(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("extension degree must be at least 1"));
        }
        Self::new(
            p.checked_pow(n)
                .ok_or_else(|| Error::domain("field too large"))?,
        )
    }

    pub fn new(q: u64) -> Result<Self> {
        let (p, n) =
            prime_power(q).ok_or_else(|| Error::domain(format!("{q} is not a prime power")))?;
        if q > 1 << 16 {
            return Err(Error::domain(format!("field order {q} too large")));
        }
        let modulus = primitive_polynomial(p, n);
        let nn = n as usize;
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![0u64; nn];
        cur[0] = 1;
        let mut xpoly = vec![0u64; nn];
        if nn == 1 {
            // In a prime field the primitive element is the root of x - g.
            xpoly[0] = (p - modulus[0]) % p;
        } else {
            xpoly[1] = 1;
        }
        for k in 0..(q - 1) {
            let code = undigits(&cur, p) as u32;
            exp.push(code);
            log[code as usize] = k as u32;
            cur = polymulmod(&cur, &xpoly, &modulus, p);
        }
        let mut gf = GaloisField {
            p,
            n,
            q,
            modulus,
            exp,
            log,
            trace: vec![],
        };
        let trace = (0..q as u32)
            .map(|a| {
                let mut s = 0u32;
                let mut pw = a;
                for _ in 0..n {
                    s = gf.add(s, pw);
                    pw = gf.pow(pw, p);
                }
                s
            })
            .collect();
        gf.trace = trace;
        Ok(gf)
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Monic primitive polynomial, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return ((a as u64 + b as u64) % self.p) as u32;
        }
        let (da, db) = (
            digits(a as u64, self.p, self.n as usize),
            digits(b as u64, self.p, self.n as usize),
        );
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        let da = digits(a as u64, self.p, self.n as usize);
        let s: Vec<u64> = da.iter().map(|x| (self.p - x) % self.p).collect();
        undigits(&s, self.p) as u32
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let k = (self.q - 1 - self.log[a as usize] as u64) % (self.q - 1);
        Some(self.exp[k as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 * (e % (self.q - 1))) % (self.q - 1);
        self.exp[k as usize]
    }

    /// `y^k` for the primitive element `y`.
    pub fn primitive_power(&self, k: u64) -> u32 {
        self.exp[(k % (self.q - 1)) as usize]
    }

    pub fn primitive_element(&self) -> u32 {
        self.primitive_power(1)
    }

    /// Absolute trace to `GF(p)`, returned as an integer in `0..p`.
    pub fn trace(&self, a: u32) -> u32 {
        self.trace[a as usize]
    }

    /// Image of the integer `k mod p` in the prime subfield.
    pub fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }
}

/// Lexicographically smallest monic primitive polynomial of degree `n` over
/// `GF(p)`, ordered by the base-`p` encoding of the lower coefficients.
pub fn primitive_polynomial(p: u64, n: u32) -> Vec<u64> {
    let nn = n as usize;
    let q = p.pow(n);
    if nn == 1 {
        // x - g for the smallest generator g of GF(p)^*.
        for g in 1..p {
            if multiplicative_order_mod(g, p) == p - 1 {
                return vec![(p - g) % p, 1];
            }
        }
        return vec![0, 1];
    }
    for m in 0..q {
        let mut f = digits(m, p, nn);
        if f[0] == 0 {
            continue;
        }
        f.push(1);
        let mut x = vec![0u64; nn];
        x[1] = 1;
        let mut cur = x.clone();
        let mut order = 1u64;
        let one = {
            let mut o = vec![0u64; nn];
            o[0] = 1;
            o
        };
        while cur != one && order < q {
            cur = polymulmod(&cur, &x, &f, p);
            order += 1;
        }
        if order == q - 1 {
            return f;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

fn multiplicative_order_mod(g: u64, p: u64) -> u64 {
    let mut x = g % p;
    let mut k = 1;
    while x != 1 {
        x = x * g % p;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}

/// Galois ring `GR(4, n) = Z_4[x]/(h)` with `h` the Hensel lift of the
/// primitive binary polynomial of degree `n`. Elements are encoded in base 4.
#[derive(Debug, Clone)]
pub struct GaloisRing {
    n: u32,
    modulus: Vec<u64>,
    teich: Vec<u32>,
    teich_index: Vec<u32>,
}

impl GaloisRing {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 10 {
            return Err(Error::domain(format!("GR(4,{n}) not supported")));
        }
        let f = primitive_polynomial(2, n);
        let modulus = hensel_lift(&f);
        let nn = n as usize;
        let q = 1usize << n;
        let mut xi = vec![0u64; nn];
        if nn == 1 {
            xi[0] = (4 - modulus[0]) % 4;
        } else {
            xi[1] = 1;
        }
        let mut teich = vec![0u32];
        let mut cur = vec![0u64; nn];
        cur[0] = 1;
        for _ in 0..q - 1 {
            teich.push(undigits(&cur, 4) as u32);
            cur = polymulmod(&cur, &xi, &modulus, 4);
        }
        let mut one = vec![0u64; nn];
        one[0] = 1;
        if cur != one {
            return Err(Error::Numerical(
                "Hensel lift is not a Teichmuller generator".into(),
            ));
        }
        let mut teich_index = vec![u32::MAX; q];
        for (i, &t) in teich.iter().enumerate() {
            let red: Vec<u64> = digits(t as u64, 4, nn).iter().map(|x| x % 2).collect();
            teich_index[undigits(&red, 2) as usize] = i as u32;
        }
        Ok(GaloisRing {
            n,
            modulus,
            teich,
            teich_index,
        })
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> u64 {
        1 << (2 * self.n)
    }

    /// Monic basic irreducible polynomial over `Z_4`, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Teichmuller set `{0, 1, xi, ..., xi^{2^n - 2}}`.
    pub fn teichmuller(&self) -> &[u32] {
        &self.teich
    }

    fn coeffs(&self, a: u32) -> Vec<u64> {
        digits(a as u64, 4, self.n as usize)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s: Vec<u64> = self
            .coeffs(a)
            .iter()
            .zip(self.coeffs(b))
            .map(|(x, y)| (x + y) % 4)
            .collect();
        undigits(&s, 4) as u32
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        undigits(
            &polymulmod(&self.coeffs(a), &self.coeffs(b), &self.modulus, 4),
            4,
        ) as u32
    }

    pub fn scale(&self, k: u64, a: u32) -> u32 {
        let s: Vec<u64> = self.coeffs(a).iter().map(|x| x * k % 4).collect();
        undigits(&s, 4) as u32
    }

    /// Unique `(b, v)` with `r = b + 2v` and `b, v` Teichmuller.
    pub fn decompose(&self, r: u32) -> (u32, u32) {
        let cr = self.coeffs(r);
        let red: Vec<u64> = cr.iter().map(|x| x % 2).collect();
        let b = self.teich[self.teich_index[undigits(&red, 2) as usize] as usize];
        let cb = self.coeffs(b);
        let diff: Vec<u64> = cr.iter().zip(&cb).map(|(x, y)| (x + 4 - y) % 4).collect();
        let half: Vec<u64> = diff.iter().map(|x| x / 2).collect();
        let v = self.teich[self.teich_index[undigits(&half, 2) as usize] as usize];
        (b, v)
    }

    /// Frobenius `b + 2v -> b^2 + 2v^2`.
    pub fn frobenius(&self, r: u32) -> u32 {
        let (b, v) = self.decompose(r);
        self.add(self.mul(b, b), self.scale(2, self.mul(v, v)))
    }

    /// Trace to `Z_4`, returned in `0..4`.
    pub fn trace(&self, r: u32) -> u32 {
        let mut s = 0u32;
        let mut x = r;
        for _ in 0..self.n {
            s = self.add(s, x);
            x = self.frobenius(x);
        }
        let c = self.coeffs(s);
        debug_assert!(c[1..].iter().all(|&z| z == 0));
        c[0] as u32
    }
}

/// Graeffe-style lift: with `f = e + o` split into even and odd parts,
/// `h(x^2) = +-(e^2 - o^2) mod 4`, normalized to be monic.
pub fn hensel_lift(f: &[u64]) -> Vec<u64> {
    let n = f.len() - 1;
    let e: Vec<i64> = f
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { 0 })
        .collect();
    let o: Vec<i64> = f
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 1 { c as i64 } else { 0 })
        .collect();
    let mut sq = vec![0i64; 2 * n + 1];
    for i in 0..=n {
        for j in 0..=n {
            sq[i + j] += e[i] * e[j] - o[i] * o[j];
        }
    }
    let mut h: Vec<u64> = (0..=n).map(|k| sq[2 * k].rem_euclid(4) as u64).collect();
    if h[n] == 3 {
        h = h.iter().map(|&c| (4 - c) % 4).collect();
    }
    h
}

/// Latin square of order `n` stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<usize>,
}

impl LatinSquare {
    pub fn new(n: usize, cells: Vec<usize>) -> Result<Self> {
        let sq = LatinSquare { n, cells };
        if sq.cells.len() != n * n || !sq.is_latin() {
            return Err(Error::domain("not a Latin square"));
        }
        Ok(sq)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.n + j]
    }

    fn is_latin(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            let mut row = vec![false; n];
            let mut col = vec![false; n];
            for j in 0..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a >= n || b >= n || row[a] || col[b] {
                    return false;
                }
                row[a] = true;
                col[b] = true;
            }
        }
        true
    }

    /// Superposing the two squares yields every ordered pair exactly once.
    pub fn is_orthogonal_to(&self, other: &LatinSquare) -> bool {
        if self.n != other.n {
            return false;
        }
        let n = self.n;
        let mut seen = vec![false; n * n];
        for k in 0..n * n {
            let idx = self.cells[k] * n + other.cells[k];
            if seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
        true
    }
}

/// `q - 1` mutually orthogonal Latin squares `L_a(i, j) = a i + j` over `GF(q)`.
pub fn mols_prime_power(q: u64) -> Result<Vec<LatinSquare>> {
    let gf = GaloisField::new(q)?;
    let n = q as usize;
    (1..q as u32)
        .map(|a| {
            let cells = (0..n * n)
                .map(|k| gf.add(gf.mul(a, (k / n) as u32), (k % n) as u32) as usize)
                .collect();
            LatinSquare::new(n, cells)
        })
        .collect()
}

/// MOLS of prime-power order plus the row and column label squares.
#[derive(Debug, Clone)]
pub struct MolsFamily {
    pub squares: Vec<LatinSquare>,
    /// `A_ij = i`, row-major.
    pub rows: Vec<usize>,
    /// `B_ij = j`, row-major.
    pub cols: Vec<usize>,
}

pub fn mols_generate(d: u64) -> Result<MolsFamily> {
    if prime_power(d).is_none() {
        return Err(Error::Unsupported(format!(
            "no MOLS construction for order {d}, which is not a prime power"
        )));
    }
    let squares = if d == 2 { vec![] } else { mols_prime_power(d)? };
    let (rows, cols) = row_column_labels(d as usize);
    Ok(MolsFamily {
        squares,
        rows,
        cols,
    })
}

/// `|sum_k exp(2 pi i Tr[b k^2 + v k] / p)|` over `GF(p^n)`.
pub fn gauss_sum_modulus(gf: &GaloisField, b: u32, v: u32) -> Result<f64> {
    let p = gf.characteristic();
    if p == 2 {
        return Err(Error::Unsupported(
            "quadratic Gauss sums do not have constant modulus in characteristic 2".into(),
        ));
    }
    if b == 0 {
        return Err(Error::domain("b must be nonzero"));
    }
    let s: num_complex::Complex64 = gf
        .elements()
        .map(|k| {
            let arg = gf.add(gf.mul(b, gf.mul(k, k)), gf.mul(v, k));
            crate::numeric::root_of_unity(gf.trace(arg) as i64, p)
        })
        .sum();
    Ok(s.norm())
}

/// The two auxiliary squares `A_ij = i` and `B_ij = j` that complete an
/// affine plane. They are not Latin, so they are returned as raw labels.
pub fn row_column_labels(n: usize) -> (Vec<usize>, Vec<usize>) {
    let rows = (0..n * n).map(|k| k / n).collect();
    let cols = (0..n * n).map(|k| k % n).collect();
    (rows, cols)
}
