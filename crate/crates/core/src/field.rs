//! Finite fields GF(p) and GF(p²), with an optional Frobenius involution.
//!
//! Elements are small integers `c0 + p·c1`, where `c0 + c1·ω` is the
//! polynomial representative and `ω` is a root of a pinned irreducible
//! quadratic (see [`MODULI`]). All arithmetic goes through precomputed
//! tables, so a [`Field`] is cheap to query and immutable once built.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primes accepted by [`FieldSpec`].
pub const PRIMES: [u8; 4] = [2, 3, 5, 7];

/// `ω² = c1·ω + c0` for the quadratic extension of GF(p), as `(p, c0, c1)`.
///
/// These are pinned so that serialized scalars stay stable.
pub const MODULI: [(u8, u8, u8); 4] = [(2, 1, 1), (3, 2, 0), (5, 2, 0), (7, 6, 0)];

/// A field element, encoded as `c0 + p·c1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u8);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Involution {
    Identity,
    Frobenius,
}

/// Serializable description of a field: `{p, d, sigma}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u8,
    pub d: u8,
    pub sigma: Involution,
}

impl FieldSpec {
    pub fn prime(p: u8) -> Self {
        FieldSpec {
            p,
            d: 1,
            sigma: Involution::Identity,
        }
    }

    /// GF(p²) with σ the Frobenius map `x ↦ x^p`.
    pub fn hermitian(p: u8) -> Self {
        FieldSpec {
            p,
            d: 2,
            sigma: Involution::Frobenius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !PRIMES.contains(&self.p) {
            return Err(Error::invalid(format!(
                "characteristic {} not in {:?}",
                self.p, PRIMES
            )));
        }
        if self.d != 1 && self.d != 2 {
            return Err(Error::invalid(format!("degree {} not in {{1, 2}}", self.d)));
        }
        if self.sigma == Involution::Frobenius && self.d != 2 {
            return Err(Error::invalid("a non-trivial involution needs d = 2"));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.d as u32)
    }
}

/// Arithmetic tables for one finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    spec: FieldSpec,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    sigma: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.q)?;
        if self.spec.sigma == Involution::Frobenius {
            write!(f, " with Frobenius")?;
        }
        Ok(())
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        spec.validate()?;
        let p = spec.p as usize;
        let q = spec.order();
        let (c0, c1) = if spec.d == 2 {
            let &(_, c0, c1) = MODULI.iter().find(|m| m.0 == spec.p).expect("pinned");
            (c0 as usize, c1 as usize)
        } else {
            (0, 0)
        };
        let split = |e: usize| (e % p, e / p);
        let join = |a: usize, b: usize| ((a % p) + p * (b % p)) as u8;

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for x in 0..q {
            let (x0, x1) = split(x);
            for y in 0..q {
                let (y0, y1) = split(y);
                add[x * q + y] = join(x0 + y0, x1 + y1);
                // (x0 + x1ω)(y0 + y1ω) with ω² = c1ω + c0
                let hi = x1 * y1;
                mul[x * q + y] = join(x0 * y0 + hi * c0, x0 * y1 + x1 * y0 + hi * c1);
            }
        }
        let neg = (0..q)
            .map(|x| {
                let (x0, x1) = split(x);
                join(p - x0, p - x1)
            })
            .collect();
        let mut inv = vec![0u8; q];
        for x in 1..q {
            inv[x] = (1..q)
                .find(|&y| mul[x * q + y] == 1)
                .expect("finite field without inverse") as u8;
        }
        let sigma = (0..q)
            .map(|x| match spec.sigma {
                Involution::Identity => x as u8,
                Involution::Frobenius => {
                    let mut r = 1usize;
                    for _ in 0..p {
                        r = mul[r * q + x] as usize;
                    }
                    r as u8
                }
            })
            .collect();
        Ok(Field {
            spec,
            q,
            add,
            mul,
            neg,
            inv,
            sigma,
        })
    }

    pub fn prime(p: u8) -> Result<Self> {
        Field::new(FieldSpec::prime(p))
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u8 {
        self.spec.p
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.q as u8).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.q + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        (!a.is_zero()).then(|| Elem(self.inv[a.index()]))
    }

    /// The involution σ (the identity unless the field was built with Frobenius).
    #[inline]
    pub fn sigma(&self, a: Elem) -> Elem {
        Elem(self.sigma[a.index()])
    }

    /// `a^σ · b`, the building block of every sesquilinear form here.
    #[inline]
    pub fn sesq(&self, a: Elem, b: Elem) -> Elem {
        self.mul(self.sigma(a), b)
    }

    /// `t + t^σ`.
    pub fn trace(&self, t: Elem) -> Elem {
        self.add(t, self.sigma(t))
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.spec.p as i64) as u8)
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items
            .into_iter()
            .fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    /// Polynomial coefficients `[c0]` or `[c0, c1]`.
    pub fn coeffs(&self, a: Elem) -> Vec<u8> {
        let p = self.spec.p;
        if self.spec.d == 1 {
            vec![a.0]
        } else {
            vec![a.0 % p, a.0 / p]
        }
    }

    pub fn from_coeffs(&self, c: &[u8]) -> Result<Elem> {
        let p = self.spec.p;
        if c.is_empty() || c.len() > self.spec.d as usize || c.iter().any(|&x| x >= p) {
            return Err(Error::invalid(format!(
                "{c:?} is not a coefficient tuple for {self:?}"
            )));
        }
        Ok(Elem(c[0] + p * c.get(1).copied().unwrap_or(0)))
    }

    /// The fixed field of σ, sorted.
    pub fn fixed_field(&self) -> Vec<Elem> {
        self.elements().filter(|&x| self.sigma(x) == x).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_fields() -> Vec<Field> {
        let mut out = Vec::new();
        for p in PRIMES {
            out.push(Field::prime(p).unwrap());
            out.push(Field::new(FieldSpec::hermitian(p)).unwrap());
        }
        out
    }

    #[test]
    fn axioms_hold_exhaustively() {
        for k in all_fields() {
            let els: Vec<_> = k.elements().collect();
            for &a in &els {
                assert_eq!(k.add(a, k.neg(a)), Elem::ZERO);
                if let Some(ai) = k.inv(a) {
                    assert_eq!(k.mul(a, ai), Elem::ONE, "{k:?}");
                }
                assert_eq!(k.sigma(k.sigma(a)), a);
                for &b in &els {
                    assert_eq!(k.mul(a, b), k.mul(b, a));
                    assert_eq!(k.sigma(k.mul(a, b)), k.mul(k.sigma(a), k.sigma(b)));
                    assert_eq!(k.sigma(k.add(a, b)), k.add(k.sigma(a), k.sigma(b)));
                    for &c in &els {
                        assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                        assert_eq!(k.mul(a, k.mul(b, c)), k.mul(k.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn pinned_moduli_are_irreducible() {
        for (p, c0, c1) in MODULI {
            for x in 0..p as u32 {
                let v = (x * x + (p as u32 - c1 as u32) * x + (p as u32 - c0 as u32)) % p as u32;
                assert_ne!(v, 0, "x^2 - {c1}x - {c0} has root {x} mod {p}");
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_field() {
        for p in PRIMES {
            let k = Field::new(FieldSpec::hermitian(p)).unwrap();
            assert_eq!(k.fixed_field().len(), p as usize);
        }
    }

    #[test]
    fn coefficient_tuples() {
        let k = Field::new(FieldSpec::hermitian(2)).unwrap();
        let w = k.from_coeffs(&[0, 1]).unwrap();
        // ω² = ω + 1 in GF(4)
        assert_eq!(k.mul(w, w), k.from_coeffs(&[1, 1]).unwrap());
        assert_eq!(k.coeffs(w), vec![0, 1]);
        assert!(k.from_coeffs(&[2]).is_err());
        assert!(Field::prime(3).unwrap().from_coeffs(&[1, 1]).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(Field::prime(11).is_err());
        assert!(Field::new(FieldSpec {
            p: 3,
            d: 1,
            sigma: Involution::Frobenius
        })
        .is_err());
    }
}
