//! Exact arithmetic in the field tower GF(p) ⊂ F_q = GF(p^s) ⊂ F_Q = GF(p^ell).
//!
//! Elements are stored packed: the polynomial c_0 + c_1 x + ... is the integer
//! c_0 + c_1 p + c_2 p^2 + ... Multiplication goes through precomputed log/exp
//! tables, which caps field sizes at 2^20 elements.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// Full addition tables are only worth the memory for small fields.
const ADD_TABLE_LIMIT: u64 = 2048;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("subfield degree {s} does not divide extension degree {ell}")]
    DegreeMismatch { s: u32, ell: u32 },
    #[error("field size {0} exceeds the 2^20 log-table limit")]
    TooLarge(u64),
    #[error("trace length must be >= 1, got {0}")]
    BadTraceLength(u32),
    #[error("operands live at different tower levels")]
    LevelMismatch,
    #[error("element {0} is not in the embedded subfield")]
    NotInSubfield(u32),
    #[error("degree must be >= 1")]
    BadDegree,
}

/// Which of the two tower fields an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// The ground field F_q.
    Ground,
    /// The extension field F_Q.
    Extension,
}

/// A field element tagged with its tower level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Felt {
    pub value: u32,
    pub level: Level,
}

/// GF(p^deg) in a polynomial basis with a fixed canonical modulus.
pub struct Field {
    p: u32,
    deg: u32,
    size: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u16>>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field(GF({}^{}) = GF({}))", self.p, self.deg, self.size)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of n, without multiplicity.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

// ---- dense polynomial helpers over GF(p), little-endian coefficients ----

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = mod_inverse(f[df], p);
    while r.len() > df {
        let k = r.len() - 1 - df;
        let c = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
        for i in 0..=df {
            let idx = k + i;
            let sub = (c as u64 * f[i] as u64 % p as u64) as u32;
            r[idx] = (r[idx] + p - sub) % p;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + ai as u64 * bj as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p prime, a != 0
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

/// f = x^deg + lower, irreducible over GF(p)?
fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    if deg == 1 {
        return true;
    }
    // x^(p^deg) == x mod f, and for each prime r | deg, gcd(x^(p^(deg/r)) - x, f) = 1.
    let x = vec![0u32, 1u32];
    let mut t = x.clone();
    for _ in 0..deg {
        t = poly_powmod(&t, p as u64, f, p);
    }
    let mut diff = vec![0u32; 2.max(t.len())];
    for (i, &c) in t.iter().enumerate() {
        diff[i] = c;
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for r in prime_factors(deg as u64) {
        let k = deg as u64 / r;
        let mut t = x.clone();
        for _ in 0..k {
            t = poly_powmod(&t, p as u64, f, p);
        }
        let mut diff = vec![0u32; 2.max(t.len())];
        for (i, &c) in t.iter().enumerate() {
            diff[i] = c;
        }
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        let g = poly_gcd(&diff, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The canonical modulus for GF(p^deg): among monic irreducibles of minimal
/// coefficient weight, the one whose packed coefficient value is least.
fn canonical_modulus(p: u32, deg: u32) -> Vec<u32> {
    if deg == 1 {
        return vec![0, 1]; // GF(p)[x]/(x)
    }
    // nnz = number of nonzero coefficients below the leading term; the constant
    // term must be nonzero or x divides f.
    for nnz in 1..=deg {
        let mut candidates: Vec<(u64, Vec<u32>)> = Vec::new();
        let positions: Vec<u32> = (1..deg).collect();
        let extra = nnz - 1;
        let mut pos_sets: Vec<Vec<u32>> = Vec::new();
        fn rec(
            positions: &[u32],
            k: usize,
            start: usize,
            cur: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..positions.len() {
                cur.push(positions[i]);
                rec(positions, k, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut cur = Vec::new();
        rec(&positions, extra as usize, 0, &mut cur, &mut pos_sets);
        for pos_set in &pos_sets {
            // value assignments: constant term plus each chosen position
            let slots = 1 + pos_set.len();
            let mut vals = vec![1u32; slots];
            loop {
                let mut f = vec![0u32; deg as usize + 1];
                f[deg as usize] = 1;
                f[0] = vals[0];
                for (i, &pos) in pos_set.iter().enumerate() {
                    f[pos as usize] = vals[i + 1];
                }
                let mut packed = 0u64;
                for i in (0..deg as usize).rev() {
                    packed = packed * p as u64 + f[i] as u64;
                }
                candidates.push((packed, f));
                // odometer over coefficient values 1..p-1
                let mut i = 0;
                loop {
                    if i == slots {
                        break;
                    }
                    vals[i] += 1;
                    if vals[i] < p {
                        break;
                    }
                    vals[i] = 1;
                    i += 1;
                }
                if i == slots {
                    break;
                }
            }
        }
        candidates.sort_by_key(|(packed, _)| *packed);
        for (_, f) in candidates {
            if poly_is_irreducible(&f, p) {
                return f;
            }
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn pack(coeffs: &[u32], p: u32) -> u32 {
    let mut v = 0u64;
    for &c in coeffs.iter().rev() {
        v = v * p as u64 + c as u64;
    }
    v as u32
}

fn unpack(mut v: u32, p: u32, deg: u32) -> Vec<u32> {
    let mut out = vec![0u32; deg as usize];
    for slot in out.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    out
}

impl Field {
    /// Construct (or fetch from the process-wide cache) GF(p^deg).
    pub fn new(p: u32, deg: u32) -> Result<Arc<Field>, GaloisError> {
        if !is_prime(p) {
            return Err(GaloisError::NonPrime(p));
        }
        if deg == 0 {
            return Err(GaloisError::BadDegree);
        }
        let size = (p as u64)
            .checked_pow(deg)
            .ok_or(GaloisError::TooLarge(u64::MAX))?;
        if size > MAX_FIELD_SIZE {
            return Err(GaloisError::TooLarge(size));
        }

        static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<Field>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&(p, deg)) {
            return Ok(f.clone());
        }
        let field = Arc::new(Self::build(p, deg, size as u32));
        cache.lock().unwrap().insert((p, deg), field.clone());
        Ok(field)
    }

    fn build(p: u32, deg: u32, size: u32) -> Field {
        let modulus = canonical_modulus(p, deg);
        let order = size - 1;
        let factors = prime_factors(order as u64);

        // raw multiplication used only until the tables exist
        let raw_mul = |a: u32, b: u32| -> u32 {
            let pa = unpack(a, p, deg);
            let pb = unpack(b, p, deg);
            let prod = poly_mulmod(&pa, &pb, &modulus, p);
            let mut padded = vec![0u32; deg as usize];
            for (i, &c) in prod.iter().enumerate() {
                padded[i] = c;
            }
            pack(&padded, p)
        };
        let raw_pow = |a: u32, mut e: u64| -> u32 {
            let mut result = 1u32;
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    result = raw_mul(result, b);
                }
                b = raw_mul(b, b);
                e >>= 1;
            }
            result
        };

        // smallest packed element of full multiplicative order
        let mut generator = 0;
        'outer: for g in 2..size {
            if deg == 1 && g >= p {
                break;
            }
            for &f in &factors {
                if raw_pow(g, order as u64 / f) == 1 {
                    continue 'outer;
                }
            }
            generator = g;
            break;
        }
        if generator == 0 {
            // GF(2): the only nonzero element
            generator = 1;
        }

        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![u32::MAX; size as usize];
        let mut acc = 1u32;
        for i in 0..order as usize {
            exp[i] = acc;
            exp[i + order as usize] = acc;
            log[acc as usize] = i as u32;
            acc = raw_mul(acc, generator);
        }
        debug_assert_eq!(acc, 1);

        let add_table = if (size as u64) <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; size as usize * size as usize];
            for a in 0..size {
                for b in a..size {
                    let pa = unpack(a, p, deg);
                    let pb = unpack(b, p, deg);
                    let sum: Vec<u32> = pa.iter().zip(&pb).map(|(x, y)| (x + y) % p).collect();
                    let s = pack(&sum, p) as u16;
                    t[(a * size + b) as usize] = s;
                    t[(b * size + a) as usize] = s;
                }
            }
            Some(t)
        } else {
            None
        };

        Field {
            p,
            deg,
            size,
            modulus,
            generator,
            exp,
            log,
            add_table,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.deg
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    /// Order of the multiplicative group.
    pub fn order(&self) -> u32 {
        self.size - 1
    }
    /// Coefficients of the canonical modulus, little-endian.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// The canonical primitive element (smallest packed generator).
    pub fn generator(&self) -> u32 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if let Some(t) = &self.add_table {
            return t[(a * self.size + b) as usize] as u32;
        }
        let mut out = 0u64;
        let (mut x, mut y) = (a, b);
        let mut mult = 1u64;
        for _ in 0..self.deg {
            out += ((x % self.p + y % self.p) % self.p) as u64 * mult;
            x /= self.p;
            y /= self.p;
            mult *= self.p as u64;
        }
        out as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut x = a;
        let mut mult = 1u64;
        for _ in 0..self.deg {
            let c = x % self.p;
            out += (if c == 0 { 0 } else { self.p - c }) as u64 * mult;
            x /= self.p;
            mult *= self.p as u64;
        }
        out as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let la = self.log[a as usize] as usize;
        let lb = self.log[b as usize] as usize;
        self.exp[la + lb]
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let la = self.log[a as usize];
        self.exp[(self.order() - la) as usize % self.order() as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let la = self.log[a as usize] as u64;
        let idx = la % self.order() as u64 * (e % self.order() as u64) % self.order() as u64;
        self.exp[idx as usize]
    }

    /// Discrete log with respect to the canonical generator.
    pub fn dlog(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.log[a as usize])
        }
    }

    /// generator^e
    pub fn exp_of(&self, e: u64) -> u32 {
        self.exp[(e % self.order() as u64) as usize]
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u32) -> u32 {
        assert!(a != 0);
        let la = self.log[a as usize];
        let g = gcd(la as u64, self.order() as u64) as u32;
        self.order() / g
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The tower GF(p) ⊂ F_q ⊂ F_Q with a verified embedding of F_q into F_Q.
pub struct FieldTower {
    p: u32,
    s: u32,
    ell: u32,
    small: Arc<Field>,
    big: Arc<Field>,
    embed: Vec<u32>,
    lower: Vec<u32>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldTower(F_{} in F_{})", self.q(), self.big_q())
    }
}

/// Build the tower for GF(p^s) ⊂ GF(p^ell).
pub fn make_tower(p: u32, s: u32, ell: u32) -> Result<FieldTower, GaloisError> {
    if !is_prime(p) {
        return Err(GaloisError::NonPrime(p));
    }
    if s == 0 || ell == 0 {
        return Err(GaloisError::BadDegree);
    }
    if ell % s != 0 {
        return Err(GaloisError::DegreeMismatch { s, ell });
    }
    let small = Field::new(p, s)?;
    let big = Field::new(p, ell)?;

    // The embedding sends the small field's polynomial generator to the
    // smallest-packed root of the small modulus inside the unique copy of F_q
    // in F_Q (the elements fixed by x -> x^q).
    let q = small.size();
    let big_q = big.size();
    let step = (big_q as u64 - 1) / (q as u64 - 1);
    let mut gamma = u32::MAX;
    for j in 0..(q as u64 - 1) {
        let cand = big.exp_of(j * step);
        // evaluate the small modulus at cand over GF(p)
        let mut val = 0u32;
        for &c in small.modulus().iter().rev() {
            val = big.mul(val, cand);
            // c is a GF(p) constant; constants pack identically in both fields
            val = big.add(val, c);
        }
        if val == 0 && cand < gamma {
            gamma = cand;
        }
    }
    // 0 is a root only of x (the degree-1 canonical modulus)
    if s == 1 {
        gamma = 0;
    }
    assert!(
        gamma != u32::MAX,
        "small modulus must split in the big field"
    );

    let mut gamma_pows = vec![1u32; s as usize];
    for i in 1..s as usize {
        gamma_pows[i] = big.mul(gamma_pows[i - 1], gamma);
    }
    let mut embed = vec![0u32; q as usize];
    for v in 0..q {
        let coeffs = unpack(v, p, s);
        let mut acc = 0u32;
        for (i, &c) in coeffs.iter().enumerate() {
            // c * gamma^i with c a prime-field scalar
            let mut term = 0u32;
            for _ in 0..c {
                term = big.add(term, gamma_pows[i]);
            }
            acc = big.add(acc, term);
        }
        embed[v as usize] = acc;
    }
    let mut lower = vec![u32::MAX; big_q as usize];
    for v in 0..q {
        lower[embed[v as usize] as usize] = v;
    }

    let tower = FieldTower {
        p,
        s,
        ell,
        small,
        big,
        embed,
        lower,
    };
    debug_assert!(tower.check_embedding_sampled());
    Ok(tower)
}

impl FieldTower {
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn s(&self) -> u32 {
        self.s
    }
    pub fn ell(&self) -> u32 {
        self.ell
    }
    /// q = p^s
    pub fn q(&self) -> u32 {
        self.small.size()
    }
    /// Q = p^ell
    pub fn big_q(&self) -> u32 {
        self.big.size()
    }
    pub fn small(&self) -> &Arc<Field> {
        &self.small
    }
    pub fn big(&self) -> &Arc<Field> {
        &self.big
    }
    /// Extension degree of F_Q over F_q.
    pub fn tower_degree(&self) -> u32 {
        self.ell / self.s
    }

    pub fn embed(&self, x: u32) -> u32 {
        self.embed[x as usize]
    }

    pub fn try_lower(&self, x: u32) -> Result<u32, GaloisError> {
        let v = self.lower[x as usize];
        if v == u32::MAX {
            Err(GaloisError::NotInSubfield(x))
        } else {
            Ok(v)
        }
    }

    /// x ∈ image(embed) ⇔ x^q = x in F_Q.
    pub fn in_subfield(&self, x: u32) -> bool {
        self.lower[x as usize] != u32::MAX
    }

    /// x^q at the extension level.
    pub fn frobenius_q(&self, x: u32) -> u32 {
        self.big.pow(x, self.q() as u64)
    }

    /// x + x^q + ... + x^{q^(i-1)} at the extension level.
    pub fn relative_trace_raw(&self, x: u32, i: u32) -> Result<u32, GaloisError> {
        if i == 0 {
            return Err(GaloisError::BadTraceLength(i));
        }
        let mut acc = 0u32;
        let mut term = x;
        for _ in 0..i {
            acc = self.big.add(acc, term);
            term = self.frobenius_q(term);
        }
        Ok(acc)
    }

    fn field_at(&self, level: Level) -> &Arc<Field> {
        match level {
            Level::Ground => &self.small,
            Level::Extension => &self.big,
        }
    }

    pub fn felt(&self, value: u32, level: Level) -> Felt {
        debug_assert!(value < self.field_at(level).size());
        Felt { value, level }
    }

    pub fn felt_add(&self, a: Felt, b: Felt) -> Result<Felt, GaloisError> {
        if a.level != b.level {
            return Err(GaloisError::LevelMismatch);
        }
        Ok(Felt {
            value: self.field_at(a.level).add(a.value, b.value),
            level: a.level,
        })
    }

    pub fn felt_mul(&self, a: Felt, b: Felt) -> Result<Felt, GaloisError> {
        if a.level != b.level {
            return Err(GaloisError::LevelMismatch);
        }
        Ok(Felt {
            value: self.field_at(a.level).mul(a.value, b.value),
            level: a.level,
        })
    }

    /// Move a ground-field element up to the extension field.
    pub fn lift(&self, a: Felt) -> Felt {
        match a.level {
            Level::Ground => Felt {
                value: self.embed(a.value),
                level: Level::Extension,
            },
            Level::Extension => a,
        }
    }

    /// Primitive element of the requested level, deterministic across runs.
    pub fn primitive_element(&self, level: Level) -> Felt {
        Felt {
            value: self.field_at(level).generator(),
            level,
        }
    }

    /// Relative trace T(x) = x + x^q + ... + x^{q^(i-1)}; x must live at the
    /// extension level.
    pub fn relative_trace(&self, x: Felt, i: u32) -> Result<Felt, GaloisError> {
        if x.level != Level::Extension {
            return Err(GaloisError::LevelMismatch);
        }
        Ok(Felt {
            value: self.relative_trace_raw(x.value, i)?,
            level: Level::Extension,
        })
    }

    fn check_embedding_sampled(&self) -> bool {
        let q = self.q();
        let step = if q > 64 { (q / 37).max(1) } else { 1 };
        let mut a = 0u32;
        while a < q {
            let mut b = 0u32;
            while b < q {
                let add_ok =
                    self.embed(self.small.add(a, b)) == self.big.add(self.embed(a), self.embed(b));
                let mul_ok =
                    self.embed(self.small.mul(a, b)) == self.big.mul(self.embed(a), self.embed(b));
                if !add_ok || !mul_ok {
                    return false;
                }
                b += step;
            }
            a += step;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn rejects_bad_towers() {
        assert!(matches!(make_tower(4, 1, 2), Err(GaloisError::NonPrime(4))));
        assert!(matches!(make_tower(6, 1, 1), Err(GaloisError::NonPrime(6))));
        assert!(matches!(
            make_tower(2, 4, 6),
            Err(GaloisError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn builds_the_f8_f64_tower() {
        let t = make_tower(2, 3, 6).unwrap();
        assert_eq!(t.q(), 8);
        assert_eq!(t.big_q(), 64);
        // embedding is an injective homomorphism on all pairs
        for a in 0..8 {
            for b in 0..8 {
                assert_eq!(
                    t.embed(t.small().add(a, b)),
                    t.big().add(t.embed(a), t.embed(b))
                );
                assert_eq!(
                    t.embed(t.small().mul(a, b)),
                    t.big().mul(t.embed(a), t.embed(b))
                );
            }
        }
        let mut seen = std::collections::HashSet::new();
        for a in 0..8 {
            assert!(seen.insert(t.embed(a)));
            assert!(t.in_subfield(t.embed(a)));
        }
        // subfield criterion x^q = x
        for x in 0..64u32 {
            assert_eq!(t.in_subfield(x), t.frobenius_q(x) == x);
        }
    }

    #[test]
    fn degenerate_and_f25_towers() {
        let t = make_tower(3, 2, 2).unwrap();
        assert_eq!(t.q(), 9);
        assert_eq!(t.big_q(), 9);
        for a in 0..9 {
            assert_eq!(t.embed(a), a);
        }
        let t = make_tower(5, 2, 2).unwrap();
        assert_eq!((t.q(), t.big_q()), (25, 25));
        let t = make_tower(5, 2, 4).unwrap();
        assert_eq!((t.q(), t.big_q()), (25, 625));
    }

    #[test]
    fn primitive_elements_have_full_order() {
        let t = make_tower(2, 3, 6).unwrap();
        let eta = t.primitive_element(Level::Ground);
        for k in 1..7 {
            assert_ne!(t.small().pow(eta.value, k), 1);
        }
        assert_eq!(t.small().pow(eta.value, 7), 1);
        let alpha = t.primitive_element(Level::Extension);
        assert_eq!(t.big().element_order(alpha.value), 63);
        for d in [1u64, 3, 7, 9, 21] {
            assert_ne!(t.big().pow(alpha.value, d), 1);
        }
    }

    #[test]
    fn primitive_order_exhaustive_small_fields() {
        // every field up to 2^10 elements used anywhere in the artifact
        for (p, deg) in [
            (2, 1),
            (2, 3),
            (2, 4),
            (2, 5),
            (2, 6),
            (2, 10),
            (3, 1),
            (3, 2),
            (3, 3),
            (3, 6),
            (5, 2),
            (7, 1),
            (11, 1),
            (13, 1),
        ] {
            let f = Field::new(p, deg).unwrap();
            let g = f.generator();
            let mut acc = 1u32;
            let mut steps = 0;
            loop {
                acc = f.mul(acc, g);
                steps += 1;
                if acc == 1 {
                    break;
                }
            }
            assert_eq!(
                steps,
                f.order(),
                "generator order mismatch in GF({}^{})",
                p,
                deg
            );
        }
    }

    #[test]
    fn gamma1_is_alpha_ninth_with_order_seven() {
        // Q = 64, N_1 = 8: gamma_1 = alpha^((Q-1)/(N_1-1)) = alpha^9
        let t = make_tower(2, 3, 6).unwrap();
        let alpha = t.primitive_element(Level::Extension).value;
        let gamma = t.big().pow(alpha, 9);
        assert_eq!(gamma, t.big().exp_of(9));
        let mut count = 0;
        let mut acc = gamma;
        while acc != 1 {
            acc = t.big().mul(acc, gamma);
            count += 1;
        }
        assert_eq!(count + 1, 7);
    }

    #[test]
    fn relative_trace_basics() {
        let t = make_tower(2, 3, 6).unwrap();
        // char-2 doubling: embedded x gives x + x^8 = 0
        for a in 0..8 {
            let x = t.embed(a);
            assert_eq!(t.relative_trace_raw(x, 2).unwrap(), 0);
        }
        assert_eq!(t.relative_trace_raw(0, 5).unwrap(), 0);
        let alpha = t.primitive_element(Level::Extension).value;
        let tr = t.relative_trace_raw(alpha, 2).unwrap();
        assert_eq!(t.frobenius_q(tr), tr, "full trace lands in the subfield");
        assert!(matches!(
            t.relative_trace_raw(alpha, 0),
            Err(GaloisError::BadTraceLength(0))
        ));
    }

    #[test]
    fn trace_is_frobenius_stable_on_samples() {
        let t = make_tower(3, 2, 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let i = t.tower_degree();
        for _ in 0..100 {
            let x: u32 = rng.gen_range(0..t.big_q());
            let tr = t.relative_trace_raw(x, i).unwrap();
            assert_eq!(t.frobenius_q(tr), tr);
            assert_eq!(
                t.big().pow(x, (t.q() as u64).pow(i)),
                x,
                "Frobenius stability"
            );
        }
    }

    #[test]
    fn field_axioms_random_samples() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for (p, deg) in [(2u32, 6u32), (3, 4), (5, 4), (11, 2), (2, 10)] {
            let f = Field::new(p, deg).unwrap();
            for _ in 0..200 {
                let a = rng.gen_range(0..f.size());
                let b = rng.gen_range(0..f.size());
                let c = rng.gen_range(0..f.size());
                assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, 0), a);
            }
        }
    }

    #[test]
    fn felt_level_checks() {
        let t = make_tower(2, 3, 6).unwrap();
        let a = t.felt(3, Level::Ground);
        let b = t.felt(3, Level::Extension);
        assert!(matches!(t.felt_add(a, b), Err(GaloisError::LevelMismatch)));
        let lifted = t.lift(a);
        assert_eq!(lifted.level, Level::Extension);
        assert!(t.felt_add(lifted, b).is_ok());
    }
}
