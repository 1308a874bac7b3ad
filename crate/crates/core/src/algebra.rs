//! Vectors, matrices and the ambient forms `Q` and `F` on `V = K⁴ ⊕ L`.
//!
//! Conventions used throughout the crate:
//!
//! * vectors are rows, coordinates ordered `(t₁, t₁′, t₂, t₂′, a)`;
//! * a matrix acts on the right (`v ↦ vM`), row `i` being the image of the
//!   `i`-th basis vector;
//! * maps compose left to right, so the matrix of "first `g`, then `h`" is
//!   `M_g · M_h`, commutators are `[a, b] = a⁻¹b⁻¹ab` and conjugation is
//!   `g^h = h⁻¹gh`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

pub type Vector = Vec<Elem>;

/// Index of the coordinates `t₁, t₁′, t₂, t₂′` in a vector of `V`.
pub const X1: usize = 0;
pub const X1P: usize = 1;
pub const X2: usize = 2;
pub const X2P: usize = 3;

/// Which of the three kinds of form lives on `V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormCase {
    /// Quadratic space; `F` is the symmetric bilinear form of `Q`.
    Quadratic,
    /// Pseudo-quadratic space with `K₀ ≠ K`; `Q` is only defined modulo `K₀`.
    PseudoQuadratic,
    /// `K₀ = K`, `σ = 1`, characteristic ≠ 2: only the alternating `F` matters.
    Symplectic,
}

impl FormCase {
    /// `ε = 1` for quadratic spaces, `−1` otherwise.
    pub fn epsilon(self, k: &Field) -> Elem {
        match self {
            FormCase::Quadratic => Elem::ONE,
            _ => k.neg(Elem::ONE),
        }
    }

    pub fn is_quadratic(self) -> bool {
        self == FormCase::Quadratic
    }
}

pub fn unit_vector(dim: usize, i: usize) -> Vector {
    let mut v = vec![Elem::ZERO; dim];
    v[i] = Elem::ONE;
    v
}

pub fn add_vec(k: &Field, u: &[Elem], v: &[Elem]) -> Vector {
    u.iter().zip(v).map(|(&a, &b)| k.add(a, b)).collect()
}

pub fn scale_vec(k: &Field, t: Elem, v: &[Elem]) -> Vector {
    v.iter().map(|&a| k.mul(t, a)).collect()
}

/// Scale so that the first nonzero coordinate is 1; `None` for the zero vector.
pub fn normalize(k: &Field, v: &[Elem]) -> Option<Vector> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = k.inv(lead)?;
    Some(scale_vec(k, inv, v))
}

/// Encode a vector as a base-`q` integer, first coordinate most significant.
pub fn vector_index(q: usize, v: &[Elem]) -> usize {
    v.iter().fold(0, |acc, x| acc * q + x.index())
}

pub fn vector_from_index(q: usize, dim: usize, mut idx: usize) -> Vector {
    let mut v = vec![Elem::ZERO; dim];
    for slot in v.iter_mut().rev() {
        *slot = Elem((idx % q) as u8);
        idx /= q;
    }
    v
}

/// A square matrix over a finite field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in 0..self.n {
            let row: Vec<u8> = self.row(r).iter().map(|e| e.0).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        Matrix {
            n,
            data: vec![Elem::ZERO; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vector>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: Elem) {
        self.data[r * self.n + c] = x;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    pub fn set_row(&mut self, r: usize, row: &[Elem]) {
        self.data[r * self.n..(r + 1) * self.n].copy_from_slice(row);
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn mul(&self, k: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, k.add(cur, k.mul(a, other.get(l, j))));
                }
            }
        }
        out
    }

    /// Product of a sequence, left to right.
    pub fn product<'a, I>(k: &Field, n: usize, items: I) -> Matrix
    where
        I: IntoIterator<Item = &'a Matrix>,
    {
        items
            .into_iter()
            .fold(Matrix::identity(n), |acc, m| acc.mul(k, m))
    }

    /// The row vector `vM`.
    pub fn apply(&self, k: &Field, v: &[Elem]) -> Vector {
        assert_eq!(v.len(), self.n, "vector dimension differs from matrix");
        let mut out = vec![Elem::ZERO; self.n];
        for (i, &c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = k.add(*slot, k.mul(c, self.get(i, j)));
            }
        }
        out
    }

    /// Gauss–Jordan inverse; `None` if singular.
    pub fn inverse(&self, k: &Field) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| !a.get(r, c).is_zero())?;
            if pivot != c {
                for j in 0..n {
                    a.data.swap(c * n + j, pivot * n + j);
                    inv.data.swap(c * n + j, pivot * n + j);
                }
            }
            let s = k.inv(a.get(c, c))?;
            for j in 0..n {
                a.set(c, j, k.mul(s, a.get(c, j)));
                inv.set(c, j, k.mul(s, inv.get(c, j)));
            }
            for r in 0..n {
                let f = a.get(r, c);
                if r == c || f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    a.set(r, j, k.sub(a.get(r, j), k.mul(f, a.get(c, j))));
                    inv.set(r, j, k.sub(inv.get(r, j), k.mul(f, inv.get(c, j))));
                }
            }
        }
        Some(inv)
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(k: &Field, a: &Matrix, b: &Matrix) -> Option<Matrix> {
        let ai = a.inverse(k)?;
        let bi = b.inverse(k)?;
        Some(Matrix::product(k, a.n, [&ai, &bi, a, b]))
    }

    /// `g^h = h⁻¹ g h`.
    pub fn conjugate(k: &Field, g: &Matrix, h: &Matrix) -> Option<Matrix> {
        let hi = h.inverse(k)?;
        Some(Matrix::product(k, g.n, [&hi, g, h]))
    }

    /// Rows as coefficient tuples, for JSON export.
    pub fn to_coeff_rows(&self, k: &Field) -> Vec<Vec<Vec<u8>>> {
        (0..self.n)
            .map(|r| self.row(r).iter().map(|&e| k.coeffs(e)).collect())
            .collect()
    }
}

/// Evaluators for `Q` and `F` on `V = K⁴ ⊕ L`.
#[derive(Clone, Debug)]
pub struct FormTables {
    field: Field,
    case: FormCase,
    l_dim: usize,
    /// `g[i][j] = f(e_i, e_j)`, row-major `l_dim × l_dim`.
    gram: Vec<Elem>,
    /// `q` on every vector of `L`, indexed by [`vector_index`].
    q_table: Vec<Elem>,
    k0: Vec<bool>,
}

impl FormTables {
    /// Assemble from already-validated data; see `spaces::LambdaSpace` for
    /// the checked entry point.
    pub fn new(
        field: Field,
        case: FormCase,
        l_dim: usize,
        gram: Vec<Elem>,
        q_table: Vec<Elem>,
        k0: Vec<bool>,
    ) -> Result<Self> {
        let q = field.order();
        if gram.len() != l_dim * l_dim {
            return Err(Error::DimensionMismatch {
                expected: l_dim * l_dim,
                got: gram.len(),
            });
        }
        let l_size = q.pow(l_dim as u32);
        if q_table.len() != l_size {
            return Err(Error::DimensionMismatch {
                expected: l_size,
                got: q_table.len(),
            });
        }
        if k0.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: k0.len(),
            });
        }
        Ok(FormTables {
            field,
            case,
            l_dim,
            gram,
            q_table,
            k0,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn case(&self) -> FormCase {
        self.case
    }

    pub fn l_dim(&self) -> usize {
        self.l_dim
    }

    /// `dim V = 4 + dim L`.
    pub fn dim(&self) -> usize {
        4 + self.l_dim
    }

    pub fn in_k0(&self, t: Elem) -> bool {
        self.k0[t.index()]
    }

    pub fn k0(&self) -> Vec<Elem> {
        self.field.elements().filter(|&t| self.in_k0(t)).collect()
    }

    /// Equality of `Q`-values: exact for quadratic spaces, modulo `K₀` otherwise.
    pub fn q_equiv(&self, a: Elem, b: Elem) -> bool {
        match self.case {
            FormCase::Quadratic => a == b,
            _ => self.in_k0(self.field.sub(a, b)),
        }
    }

    pub fn q_vanishes(&self, a: Elem) -> bool {
        self.q_equiv(a, Elem::ZERO)
    }

    fn check_dim(&self, v: &[Elem]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `q` on `L`.
    pub fn q_l(&self, a: &[Elem]) -> Elem {
        self.q_table[vector_index(self.field.order(), a)]
    }

    /// `f(u, v) = Σ u_i^σ g_ij v_j` on `L`.
    pub fn f_l(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let k = &self.field;
        let m = self.l_dim;
        let mut acc = Elem::ZERO;
        for (i, &x) in u.iter().enumerate().take(m) {
            if x.is_zero() {
                continue;
            }
            let ui = k.sigma(x);
            for (j, &y) in v.iter().enumerate().take(m) {
                let g = self.gram[i * m + j];
                if !g.is_zero() && !y.is_zero() {
                    acc = k.add(acc, k.mul(k.mul(ui, g), y));
                }
            }
        }
        acc
    }

    /// `Q(t₁, t₁′, t₂, t₂′, a) = t₁^σ t₁′ + t₂^σ t₂′ + q(a)`; in the
    /// non-quadratic cases the result is a representative modulo `K₀`.
    pub fn eval_q(&self, v: &[Elem]) -> Result<Elem> {
        self.check_dim(v)?;
        Ok(self.q_unchecked(v))
    }

    #[inline]
    pub(crate) fn q_unchecked(&self, v: &[Elem]) -> Elem {
        let k = &self.field;
        let hyp = k.add(k.sesq(v[X1], v[X1P]), k.sesq(v[X2], v[X2P]));
        k.add(hyp, self.q_l(&v[4..]))
    }

    /// The form `F`. For quadratic spaces
    /// `F(s, t) = s₁t₁′ + t₁s₁′ + s₂t₂′ + t₂s₂′ + f(a, b)`; otherwise
    /// `F(s, t) = s₁^σ t₁′ − s₁′^σ t₁ + s₂^σ t₂′ − s₂′^σ t₂ + f(b, a)`, where
    /// `b` and `a` are the `L`-parts of `s` and `t`.
    pub fn eval_f(&self, s: &[Elem], t: &[Elem]) -> Result<Elem> {
        self.check_dim(s)?;
        self.check_dim(t)?;
        Ok(self.f_unchecked(s, t))
    }

    #[inline]
    pub(crate) fn f_unchecked(&self, s: &[Elem], t: &[Elem]) -> Elem {
        let k = &self.field;
        let hyp = match self.case {
            FormCase::Quadratic => k.sum([
                k.mul(s[X1], t[X1P]),
                k.mul(t[X1], s[X1P]),
                k.mul(s[X2], t[X2P]),
                k.mul(t[X2], s[X2P]),
            ]),
            _ => k.sum([
                k.sesq(s[X1], t[X1P]),
                k.neg(k.sesq(s[X1P], t[X1])),
                k.sesq(s[X2], t[X2P]),
                k.neg(k.sesq(s[X2P], t[X2])),
            ]),
        };
        if self.l_dim == 0 {
            return hyp;
        }
        let fl = match self.case {
            FormCase::Quadratic => self.f_l(&t[4..], &s[4..]),
            _ => self.f_l(&s[4..], &t[4..]),
        };
        k.add(hyp, fl)
    }

    /// Number of vectors in `V`.
    pub fn space_size(&self) -> u128 {
        (self.field.order() as u128).pow(self.dim() as u32)
    }

    /// Vectors on which `Q`-preservation is tested: all of `V` when
    /// `|V| ≤ 10⁶`, otherwise the basis together with all pairwise sums.
    pub fn sweep_vectors(&self) -> Vec<Vector> {
        let q = self.field.order();
        let n = self.dim();
        if self.space_size() <= 1_000_000 {
            return (0..q.pow(n as u32))
                .map(|i| vector_from_index(q, n, i))
                .collect();
        }
        let k = &self.field;
        let basis: Vec<Vector> = (0..n).map(|i| unit_vector(n, i)).collect();
        let mut out = basis.clone();
        for i in 0..n {
            for j in i + 1..n {
                out.push(add_vec(k, &basis[i], &basis[j]));
            }
        }
        out
    }

    /// Whether `M` is an invertible isometry of both `Q` and `F`.
    ///
    /// `F` is sesquilinear, so it suffices to compare it on basis pairs; `Q`
    /// is compared (modulo `K₀` where applicable) on [`Self::sweep_vectors`].
    pub fn is_isometry(&self, m: &Matrix) -> Result<bool> {
        let n = self.dim();
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m.dim(),
            });
        }
        if m.inverse(&self.field).is_none() {
            return Err(Error::invalid("matrix is not invertible"));
        }
        for i in 0..n {
            for j in 0..n {
                let before = self.f_unchecked(&unit_vector(n, i), &unit_vector(n, j));
                let after = self.f_unchecked(m.row(i), m.row(j));
                if before != after {
                    return Ok(false);
                }
            }
        }
        let k = &self.field;
        Ok(self.sweep_vectors().iter().all(|v| {
            let img = m.apply(k, v);
            self.q_equiv(self.q_unchecked(v), self.q_unchecked(&img))
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn gf3() -> Field {
        Field::prime(3).unwrap()
    }

    /// Case I over GF(3) with `L` a hyperbolic plane, `q(a) = a₁a₂`.
    fn hyperbolic_gf3() -> FormTables {
        let k = gf3();
        let q_table = (0..9)
            .map(|i| {
                let a = vector_from_index(3, 2, i);
                k.mul(a[0], a[1])
            })
            .collect();
        let gram = vec![Elem(0), Elem(1), Elem(1), Elem(0)];
        FormTables::new(
            k,
            FormCase::Quadratic,
            2,
            gram,
            q_table,
            vec![false, false, false],
        )
        .unwrap()
    }

    fn v(xs: &[u8]) -> Vector {
        xs.iter().map(|&x| Elem(x)).collect()
    }

    #[test]
    fn q_on_small_vectors() {
        let t = hyperbolic_gf3();
        assert_eq!(t.eval_q(&v(&[1, 0, 0, 0, 0, 0])).unwrap(), Elem(0));
        assert_eq!(t.eval_q(&v(&[1, 1, 0, 0, 0, 0])).unwrap(), Elem(1));
        assert_eq!(t.eval_q(&v(&[0, 0, 0, 0, 1, 1])).unwrap(), Elem(1));
        assert!(t.eval_q(&v(&[1, 0])).is_err());
    }

    #[test]
    fn q_table_matches_brute_force() {
        let t = hyperbolic_gf3();
        for a1 in 0..3u8 {
            for a2 in 0..3u8 {
                let want = (a1 * a2) % 3;
                assert_eq!(t.q_l(&v(&[a1, a2])), Elem(want));
            }
        }
    }

    #[test]
    fn f_single_terms() {
        let t = hyperbolic_gf3();
        let x1 = unit_vector(6, X1);
        let x1p = unit_vector(6, X1P);
        let x2 = unit_vector(6, X2);
        assert_eq!(t.eval_f(&x1, &x1p).unwrap(), Elem::ONE);
        assert_eq!(t.eval_f(&x1, &x2).unwrap(), Elem::ZERO);

        let k4 = Field::new(FieldSpec::hermitian(2)).unwrap();
        let k0 = k4.elements().map(|x| k4.sigma(x) == x).collect();
        let h = FormTables::new(
            k4.clone(),
            FormCase::PseudoQuadratic,
            0,
            vec![],
            vec![Elem(0)],
            k0,
        )
        .unwrap();
        let (a, b) = (unit_vector(4, X1), unit_vector(4, X1P));
        assert_eq!(h.eval_f(&a, &b).unwrap(), Elem::ONE);
        assert_eq!(h.eval_f(&b, &a).unwrap(), k4.neg(Elem::ONE));
    }

    #[test]
    fn polarization_identity_holds_on_all_of_v() {
        let t = hyperbolic_gf3();
        let k = t.field().clone();
        let all = t.sweep_vectors();
        assert_eq!(all.len(), 729);
        for u in all.iter().step_by(7) {
            for w in &all {
                let lhs = t.eval_f(u, w).unwrap();
                let rhs = k.sub(
                    k.sub(t.eval_q(&add_vec(&k, u, w)).unwrap(), t.eval_q(u).unwrap()),
                    t.eval_q(w).unwrap(),
                );
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn matrix_inverse_and_isometries() {
        let t = hyperbolic_gf3();
        let k = t.field().clone();
        let id = Matrix::identity(6);
        assert!(t.is_isometry(&id).unwrap());

        let mut diag = Matrix::identity(6);
        diag.set(0, 0, Elem(2));
        assert!(!t.is_isometry(&diag).unwrap());

        // swap x1 <-> x2' and x1' <-> x2
        let mut rho = Matrix::zero(6);
        rho.set(X1, X2P, Elem::ONE);
        rho.set(X2P, X1, Elem::ONE);
        rho.set(X1P, X2, Elem::ONE);
        rho.set(X2, X1P, Elem::ONE);
        rho.set(4, 4, Elem::ONE);
        rho.set(5, 5, Elem::ONE);
        assert!(t.is_isometry(&rho).unwrap());
        let inv = rho.inverse(&k).unwrap();
        assert!(rho.mul(&k, &inv).is_identity());
        assert!(t.is_isometry(&rho.mul(&k, &rho)).unwrap());

        assert!(t.is_isometry(&Matrix::zero(6)).is_err());
    }

    #[test]
    fn vector_index_roundtrip() {
        for i in 0..81 {
            assert_eq!(vector_index(3, &vector_from_index(3, 4, i)), i);
        }
        let k = gf3();
        assert_eq!(normalize(&k, &v(&[0, 2, 1])).unwrap(), v(&[0, 1, 2]));
        assert!(normalize(&k, &v(&[0, 0])).is_none());
    }
}
