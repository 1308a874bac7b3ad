//! Input spaces `Λ`, the ambient space `V = K⁴ ⊕ L`, the parameter group `T`
//! and the catalog of singular points and lines.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{normalize, vector_from_index, vector_index, FormCase, FormTables, Vector};
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldSpec, Involution};
use crate::polar::LineSpace;

/// Default limit on `|V|` for [`LambdaSpace::enumerate_singular`].
pub const DEFAULT_VECTOR_CAP: u128 = 10_000_000;

/// Largest `|L|` accepted for the internal value table of `q`.
pub const MAX_L_SIZE: usize = 1 << 16;

/// A scalar in JSON: a coefficient tuple, or a bare integer for prime fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Int(u8),
    Coeffs(Vec<u8>),
}

impl ScalarRepr {
    pub fn of(k: &Field, x: Elem) -> Self {
        ScalarRepr::Coeffs(k.coeffs(x))
    }

    pub fn resolve(&self, k: &Field) -> Result<Elem> {
        match self {
            ScalarRepr::Int(n) => k.from_coeffs(&[*n]),
            ScalarRepr::Coeffs(c) => k.from_coeffs(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "I")]
    Quadratic,
    #[serde(rename = "II")]
    PseudoQuadratic,
}

/// How `K₀` is given in a descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum K0Repr {
    /// `"fixed"` (the fixed field of σ) or `"all"` (all of `K`).
    Named(String),
    Explicit(Vec<ScalarRepr>),
}

/// Building blocks for `(L, q, f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    /// A hyperbolic plane: `q(a) = a₁^σ a₂`; `f = a₁b₂ + a₂b₁` for quadratic
    /// spaces, `f(u, v) = u₁^σ v₂ − u₂^σ v₁` otherwise.
    Hyperbolic,
    /// A one-dimensional quadratic block `q(a) = c·a²` (quadratic spaces only).
    Diagonal(ScalarRepr),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LDescriptor {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_f: Option<Vec<Vec<ScalarRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_table: Option<Vec<ScalarRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Block>>,
}

/// JSON form of an input space: `{case, p, d, sigma?, K0?, L}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaDescriptor {
    pub case: CaseTag,
    pub p: u8,
    pub d: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Involution>,
    #[serde(rename = "K0", default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<K0Repr>,
    #[serde(rename = "L")]
    pub l: LDescriptor,
}

/// A validated quadratic, pseudo-quadratic or symplectic space `Λ`.
#[derive(Clone, Debug)]
pub struct LambdaSpace {
    field: Field,
    case: FormCase,
    l_dim: usize,
    gram: Vec<Elem>,
    q_table: Vec<Elem>,
    k0: Vec<bool>,
}

impl LambdaSpace {
    pub fn from_json(text: &str) -> Result<Self> {
        let desc: LambdaDescriptor = serde_json::from_str(text)?;
        LambdaSpace::from_descriptor(&desc)
    }

    pub fn from_descriptor(desc: &LambdaDescriptor) -> Result<Self> {
        let sigma = desc.sigma.unwrap_or(match (desc.case, desc.d) {
            (CaseTag::PseudoQuadratic, 2) => Involution::Frobenius,
            _ => Involution::Identity,
        });
        let field = Field::new(FieldSpec {
            p: desc.p,
            d: desc.d,
            sigma,
        })?;
        let q = field.order();

        let k0 = match (desc.case, &desc.k0) {
            (CaseTag::Quadratic, None) => vec![false; q],
            (CaseTag::Quadratic, Some(_)) => {
                return Err(Error::invalid(
                    "K0 is only meaningful for pseudo-quadratic spaces",
                ))
            }
            (CaseTag::PseudoQuadratic, None) => {
                return Err(Error::invalid("pseudo-quadratic spaces need K0"))
            }
            (CaseTag::PseudoQuadratic, Some(K0Repr::Named(name))) => match name.as_str() {
                "fixed" => field.elements().map(|t| field.sigma(t) == t).collect(),
                "all" => vec![true; q],
                other => return Err(Error::invalid(format!("unknown K0 name {other:?}"))),
            },
            (CaseTag::PseudoQuadratic, Some(K0Repr::Explicit(list))) => {
                let mut mask = vec![false; q];
                for s in list {
                    mask[s.resolve(&field)?.index()] = true;
                }
                mask
            }
        };
        let case = match desc.case {
            CaseTag::Quadratic => FormCase::Quadratic,
            CaseTag::PseudoQuadratic if k0.iter().all(|&b| b) => FormCase::Symplectic,
            CaseTag::PseudoQuadratic => FormCase::PseudoQuadratic,
        };

        let m = desc.l.dim;
        let l_size = checked_l_size(q, m)?;
        let (gram, q_table) = match (&desc.l.blocks, &desc.l.gram_f, &desc.l.q_table) {
            (Some(blocks), None, None) => from_blocks(&field, case, m, blocks)?,
            (None, gram_f, q_tab) => {
                let gram = match gram_f {
                    Some(rows) => {
                        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                            return Err(Error::invalid(format!("gram_f must be {m}×{m}")));
                        }
                        rows.iter()
                            .flatten()
                            .map(|s| s.resolve(&field))
                            .collect::<Result<Vec<_>>>()?
                    }
                    None if m == 0 => Vec::new(),
                    None => return Err(Error::invalid("L needs gram_f or blocks")),
                };
                let q_table = match q_tab {
                    Some(vals) => {
                        if vals.len() != l_size {
                            return Err(Error::DimensionMismatch {
                                expected: l_size,
                                got: vals.len(),
                            });
                        }
                        vals.iter()
                            .map(|s| s.resolve(&field))
                            .collect::<Result<Vec<_>>>()?
                    }
                    None if case == FormCase::Symplectic => vec![Elem::ZERO; l_size],
                    None if m == 0 => vec![Elem::ZERO],
                    None => return Err(Error::invalid("L needs q_table or blocks")),
                };
                (gram, q_table)
            }
            _ => {
                return Err(Error::invalid(
                    "give either blocks or gram_f/q_table, not both",
                ))
            }
        };
        let space = LambdaSpace {
            field,
            case,
            l_dim: m,
            gram,
            q_table,
            k0,
        };
        space.validate(false)?;
        Ok(space)
    }

    /// A descriptor that reproduces this space (always in table form).
    pub fn to_descriptor(&self) -> LambdaDescriptor {
        let k = &self.field;
        let m = self.l_dim;
        LambdaDescriptor {
            case: if self.case.is_quadratic() {
                CaseTag::Quadratic
            } else {
                CaseTag::PseudoQuadratic
            },
            p: k.spec().p,
            d: k.spec().d,
            sigma: Some(k.spec().sigma),
            k0: (!self.case.is_quadratic()).then(|| {
                K0Repr::Explicit(
                    k.elements()
                        .filter(|t| self.k0[t.index()])
                        .map(|t| ScalarRepr::of(k, t))
                        .collect(),
                )
            }),
            l: LDescriptor {
                dim: m,
                gram_f: Some(
                    (0..m)
                        .map(|i| {
                            (0..m)
                                .map(|j| ScalarRepr::of(k, self.gram[i * m + j]))
                                .collect()
                        })
                        .collect(),
                ),
                q_table: Some(self.q_table.iter().map(|&x| ScalarRepr::of(k, x)).collect()),
                blocks: None,
            },
        }
    }

    /// The quadratic form `t₁t₁′ + t₂t₂′` on `K⁴` alone (`L = 0`).
    ///
    /// Quadratic spaces normally require `L ≠ 0`; this constructor skips that
    /// rule so the hyperbolic quadric of `PG(3, p)` (the `(p+1)×(p+1)` grid)
    /// can be used as a polar space.
    pub fn split_ambient(p: u8) -> Result<Self> {
        let field = Field::prime(p)?;
        let q = field.order();
        let space = LambdaSpace {
            field,
            case: FormCase::Quadratic,
            l_dim: 0,
            gram: Vec::new(),
            q_table: vec![Elem::ZERO],
            k0: vec![false; q],
        };
        space.validate(true)?;
        Ok(space)
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

    pub fn l_size(&self) -> usize {
        self.q_table.len()
    }

    fn f_l(&self, u: &[Elem], v: &[Elem]) -> Elem {
        let k = &self.field;
        let m = self.l_dim;
        let mut acc = Elem::ZERO;
        for (i, &x) in u.iter().enumerate().take(m) {
            for (j, &y) in v.iter().enumerate().take(m) {
                let term = k.mul(k.mul(k.sigma(x), self.gram[i * m + j]), y);
                acc = k.add(acc, term);
            }
        }
        acc
    }

    fn q_l(&self, a: &[Elem]) -> Elem {
        self.q_table[vector_index(self.field.order(), a)]
    }

    fn l_vector(&self, i: usize) -> Vector {
        vector_from_index(self.field.order(), self.l_dim, i)
    }

    fn q_equiv(&self, a: Elem, b: Elem) -> bool {
        if self.case.is_quadratic() {
            a == b
        } else {
            self.k0[self.field.sub(a, b).index()]
        }
    }

    fn validate(&self, allow_empty_l: bool) -> Result<()> {
        let k = &self.field;
        let m = self.l_dim;
        let sigma = k.spec().sigma;
        match self.case {
            FormCase::Quadratic => {
                if m == 0 && !allow_empty_l {
                    return Err(Error::invalid("a quadratic space needs L ≠ 0"));
                }
                if sigma != Involution::Identity {
                    return Err(Error::invalid(
                        "quadratic spaces use the trivial involution",
                    ));
                }
                for i in 0..m {
                    for j in 0..m {
                        if self.gram[i * m + j] != self.gram[j * m + i] {
                            return Err(Error::invalid("f must be symmetric"));
                        }
                    }
                }
            }
            FormCase::Symplectic => {
                if k.characteristic() == 2 {
                    return Err(Error::invalid("K0 = K requires characteristic ≠ 2"));
                }
                if sigma != Involution::Identity {
                    return Err(Error::invalid("K0 = K requires σ = 1"));
                }
            }
            FormCase::PseudoQuadratic => {
                if sigma == Involution::Identity {
                    return Err(Error::invalid("σ = 1 requires K0 = K"));
                }
                self.validate_k0()?;
            }
        }
        if !self.case.is_quadratic() {
            for i in 0..m {
                for j in 0..m {
                    let gij = self.gram[i * m + j];
                    let gji = self.gram[j * m + i];
                    if k.sigma(gij) != k.neg(gji) {
                        return Err(Error::invalid("f must be skew-hermitian"));
                    }
                }
            }
        }
        self.validate_q_compatibility()
    }

    fn validate_k0(&self) -> Result<()> {
        let k = &self.field;
        let k0: Vec<Elem> = k.elements().filter(|t| self.k0[t.index()]).collect();
        if !self.k0[1] {
            return Err(Error::invalid("K0 must contain 1"));
        }
        for &a in &k0 {
            for &b in &k0 {
                if !self.k0[k.sub(a, b).index()] {
                    return Err(Error::invalid("K0 must be an additive subgroup"));
                }
            }
        }
        for t in k.elements() {
            if !self.k0[k.trace(t).index()] {
                return Err(Error::invalid("K0 must contain every t + t^σ"));
            }
            for &a in &k0 {
                if !self.k0[k.mul(k.sesq(t, a), t).index()] {
                    return Err(Error::invalid("K0 must be closed under a ↦ t^σ a t"));
                }
            }
        }
        Ok(())
    }

    /// `q(a+b) ≡ q(a) + q(b) + f(a, b)` and `q(at) ≡ t^σ q(a) t`, with equality
    /// exact for quadratic spaces and modulo `K₀` otherwise.
    fn validate_q_compatibility(&self) -> Result<()> {
        if self.case == FormCase::Symplectic {
            return Ok(());
        }
        let k = &self.field;
        let n = self.l_size();
        let vecs: Vec<Vector> = (0..n).map(|i| self.l_vector(i)).collect();
        for a in &vecs {
            let qa = self.q_l(a);
            for t in k.elements() {
                let at: Vector = a.iter().map(|&x| k.mul(x, t)).collect();
                if !self.q_equiv(self.q_l(&at), k.mul(k.sesq(t, qa), t)) {
                    return Err(Error::invalid("q is not homogeneous of degree 2"));
                }
            }
        }
        // Additivity against single-coordinate vectors implies the general
        // identity by induction on the support of the second argument.
        let m = self.l_dim;
        for a in &vecs {
            let qa = self.q_l(a);
            for i in 0..m {
                for t in k.elements() {
                    let mut c = vec![Elem::ZERO; m];
                    c[i] = t;
                    let lhs = self.q_l(&add(k, a, &c));
                    let rhs = k.add(k.add(qa, self.q_l(&c)), self.f_l(a, &c));
                    if !self.q_equiv(lhs, rhs) {
                        return Err(Error::invalid("q is not compatible with f"));
                    }
                }
            }
        }
        Ok(())
    }

    /// No nonzero `a ∈ L` has `q(a) ≡ 0` and lies in the radical of `f`.
    pub fn check_nondegenerate(&self) -> bool {
        let m = self.l_dim;
        let basis: Vec<Vector> = (0..m).map(|i| unit(m, i)).collect();
        (1..self.l_size()).all(|i| {
            let a = self.l_vector(i);
            let radical = basis
                .iter()
                .all(|b| self.f_l(&a, b).is_zero() && self.f_l(b, &a).is_zero());
            !(radical && self.q_equiv(self.q_l(&a), Elem::ZERO))
        })
    }

    /// The forms `Q` and `F` on `V = K⁴ ⊕ L`.
    pub fn build_ambient(&self) -> Result<FormTables> {
        if !self.check_nondegenerate() {
            return Err(Error::invalid("Λ is degenerate"));
        }
        FormTables::new(
            self.field.clone(),
            self.case,
            self.l_dim,
            self.gram.clone(),
            self.q_table.clone(),
            self.k0.clone(),
        )
    }

    /// The group `T`, verified to be a group.
    pub fn build_t(&self) -> Result<GroupT> {
        let forms = self.build_ambient()?;
        let k = &self.field;
        let mut elements = Vec::new();
        for i in 0..self.l_size() {
            let a = self.l_vector(i);
            if self.case.is_quadratic() {
                elements.push(TElem { a, t: Elem::ZERO });
                continue;
            }
            let qa = self.q_l(&a);
            for t in k.elements() {
                if self.k0[k.sub(qa, t).index()] {
                    elements.push(TElem { a: a.clone(), t });
                }
            }
        }
        let group = GroupT::new(forms, elements);
        group.verify()?;
        Ok(group)
    }

    /// All singular points and lines of `V`.
    pub fn enumerate_singular(&self, cap: u128) -> Result<SingularCatalog> {
        let forms = self.build_ambient()?;
        SingularCatalog::enumerate(forms, cap)
    }
}

fn checked_l_size(q: usize, m: usize) -> Result<usize> {
    let size = (q as u128).pow(m as u32);
    if size > MAX_L_SIZE as u128 {
        return Err(Error::cap("value table of q", size, MAX_L_SIZE as u128));
    }
    Ok(size as usize)
}

fn unit(m: usize, i: usize) -> Vector {
    crate::algebra::unit_vector(m, i)
}

fn add(k: &Field, u: &[Elem], v: &[Elem]) -> Vector {
    crate::algebra::add_vec(k, u, v)
}

fn from_blocks(
    k: &Field,
    case: FormCase,
    m: usize,
    blocks: &[Block],
) -> Result<(Vec<Elem>, Vec<Elem>)> {
    let total: usize = blocks
        .iter()
        .map(|b| match b {
            Block::Hyperbolic => 2,
            Block::Diagonal(_) => 1,
        })
        .sum();
    if total != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: total,
        });
    }
    let one = Elem::ONE;
    let mut gram = vec![Elem::ZERO; m * m];
    // q on the basis, and which coordinate pairs form hyperbolic planes
    let mut diag = vec![Elem::ZERO; m];
    let mut pairs = Vec::new();
    let mut at = 0;
    for b in blocks {
        match b {
            Block::Hyperbolic => {
                let (i, j) = (at, at + 1);
                gram[i * m + j] = one;
                gram[j * m + i] = if case.is_quadratic() { one } else { k.neg(one) };
                pairs.push((i, j));
                at += 2;
            }
            Block::Diagonal(c) => {
                if !case.is_quadratic() {
                    return Err(Error::invalid(
                        "diagonal blocks are only supported for quadratic spaces",
                    ));
                }
                let c = c.resolve(k)?;
                diag[at] = c;
                gram[at * m + at] = k.add(c, c);
                at += 1;
            }
        }
    }
    let q = k.order();
    let size = checked_l_size(q, m)?;
    let q_table = (0..size)
        .map(|idx| {
            if case == FormCase::Symplectic {
                return Elem::ZERO;
            }
            let a = vector_from_index(q, m, idx);
            let mut acc = Elem::ZERO;
            for i in 0..m {
                acc = k.add(acc, k.mul(diag[i], k.mul(a[i], a[i])));
            }
            for &(i, j) in &pairs {
                acc = k.add(acc, k.sesq(a[i], a[j]));
            }
            acc
        })
        .collect();
    Ok((gram, q_table))
}

/// An element `(a, t)` of `T`; for quadratic spaces `t` is always 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TElem {
    pub a: Vector,
    pub t: Elem,
}

/// The parameter group `T`: the additive group of `L` for quadratic spaces,
/// otherwise `{(a, t) | q(a) − t ∈ K₀}` with
/// `(a, t)(b, u) = (a + b, t + u + f(b, a))`.
#[derive(Clone, Debug)]
pub struct GroupT {
    forms: FormTables,
    elements: Vec<TElem>,
    lookup: Vec<u32>,
}

impl GroupT {
    fn new(forms: FormTables, elements: Vec<TElem>) -> Self {
        let q = forms.field().order();
        let mut lookup = vec![u32::MAX; q.pow(forms.l_dim() as u32) * q];
        for (i, e) in elements.iter().enumerate() {
            lookup[vector_index(q, &e.a) * q + e.t.index()] = i as u32;
        }
        GroupT {
            forms,
            elements,
            lookup,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[TElem] {
        &self.elements
    }

    pub fn forms(&self) -> &FormTables {
        &self.forms
    }

    pub fn index_of(&self, e: &TElem) -> Option<usize> {
        let q = self.forms.field().order();
        let i = *self.lookup.get(vector_index(q, &e.a) * q + e.t.index())?;
        (i != u32::MAX).then_some(i as usize)
    }

    pub fn identity(&self) -> TElem {
        TElem {
            a: vec![Elem::ZERO; self.forms.l_dim()],
            t: Elem::ZERO,
        }
    }

    pub fn mul(&self, x: &TElem, y: &TElem) -> TElem {
        let k = self.forms.field();
        let a = add(k, &x.a, &y.a);
        if self.forms.case().is_quadratic() {
            return TElem { a, t: Elem::ZERO };
        }
        let t = k.add(k.add(x.t, y.t), self.forms.f_l(&y.a, &x.a));
        TElem { a, t }
    }

    pub fn inv(&self, x: &TElem) -> TElem {
        let k = self.forms.field();
        let a = x.a.iter().map(|&c| k.neg(c)).collect();
        if self.forms.case().is_quadratic() {
            return TElem { a, t: Elem::ZERO };
        }
        TElem {
            a,
            t: k.neg(k.sigma(x.t)),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.elements.iter().all(|x| {
            self.elements
                .iter()
                .all(|y| self.mul(x, y) == self.mul(y, x))
        })
    }

    /// Closure, identity, inverses and associativity, exhaustively.
    pub fn verify(&self) -> Result<()> {
        let e = self.identity();
        if self.index_of(&e).is_none() {
            return Err(Error::violation("T is a group", "identity missing", vec![]));
        }
        for (i, x) in self.elements.iter().enumerate() {
            if self.mul(x, &e) != *x || self.mul(&e, x) != *x {
                return Err(Error::violation(
                    "T is a group",
                    "identity law fails",
                    vec![i],
                ));
            }
            let xi = self.inv(x);
            if self.index_of(&xi).is_none() || self.mul(x, &xi) != e {
                return Err(Error::violation("T is a group", "inverse fails", vec![i]));
            }
        }
        let n = self.elements.len();
        let table: Vec<u32> = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                let prod = self.mul(&self.elements[i], &self.elements[j]);
                self.index_of(&prod).map_or(u32::MAX, |x| x as u32)
            })
            .collect();
        if let Some(bad) = table.iter().position(|&x| x == u32::MAX) {
            return Err(Error::violation(
                "T is a group",
                "product leaves T",
                vec![bad / n, bad % n],
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let ij = table[i * n + j] as usize;
                for l in 0..n {
                    let jl = table[j * n + l] as usize;
                    if table[ij * n + l] != table[i * n + jl] {
                        return Err(Error::violation(
                            "T is a group",
                            "associativity fails",
                            vec![i, j, l],
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Singular points (`W₁`) and lines (`W₂`) of the ambient space.
#[derive(Clone, Debug)]
pub struct SingularCatalog {
    forms: FormTables,
    points: Vec<Vector>,
    lines: Vec<Vec<u32>>,
    index: Vec<u32>,
}

#[derive(Serialize)]
struct CatalogJson<'a> {
    points: Vec<Vec<Vec<u8>>>,
    lines: &'a [Vec<u32>],
}

impl SingularCatalog {
    fn enumerate(forms: FormTables, cap: u128) -> Result<Self> {
        let size = forms.space_size();
        if size > cap {
            return Err(Error::cap("vectors of V", size, cap));
        }
        let k = forms.field().clone();
        let q = k.order();
        let n = forms.dim();
        let points: Vec<Vector> = (1..size as usize)
            .into_par_iter()
            .filter_map(|idx| {
                let v = vector_from_index(q, n, idx);
                let lead = *v.iter().find(|x| !x.is_zero())?;
                if lead != Elem::ONE {
                    return None;
                }
                let singular =
                    forms.q_vanishes(forms.q_unchecked(&v)) && forms.f_unchecked(&v, &v).is_zero();
                singular.then_some(v)
            })
            .collect();
        let mut index = vec![u32::MAX; size as usize];
        for (i, p) in points.iter().enumerate() {
            index[vector_index(q, p)] = i as u32;
        }

        let elems: Vec<Elem> = k.elements().collect();
        let line_lists: Vec<Result<Vec<Vec<u32>>>> = (0..points.len())
            .into_par_iter()
            .map(|i| {
                let mut found = Vec::new();
                for j in i + 1..points.len() {
                    if !forms.f_unchecked(&points[i], &points[j]).is_zero() {
                        continue;
                    }
                    let mut ids = Vec::with_capacity(q + 1);
                    ids.push(j as u32);
                    for &t in &elems {
                        let w: Vector = points[i]
                            .iter()
                            .zip(&points[j])
                            .map(|(&a, &b)| k.add(a, k.mul(t, b)))
                            .collect();
                        let w = normalize(&k, &w).expect("independent points");
                        let id = index[vector_index(q, &w)];
                        if id == u32::MAX {
                            return Err(Error::violation(
                                "spans of orthogonal singular points are singular",
                                format!("point {i} and {j} span a non-singular vector"),
                                vec![i, j],
                            ));
                        }
                        ids.push(id);
                    }
                    ids.sort_unstable();
                    if ids[0] == i as u32 && ids[1] == j as u32 {
                        found.push(ids);
                    }
                }
                Ok(found)
            })
            .collect();
        let mut lines = Vec::new();
        for l in line_lists {
            lines.extend(l?);
        }
        lines.sort();
        Ok(SingularCatalog {
            forms,
            points,
            lines,
            index,
        })
    }

    pub fn forms(&self) -> &FormTables {
        &self.forms
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    /// The id of the projective point spanned by `v`, if it is singular.
    pub fn point_id(&self, v: &[Elem]) -> Option<u32> {
        let k = self.forms.field();
        let w = normalize(k, v)?;
        let id = *self.index.get(vector_index(k.order(), &w))?;
        (id != u32::MAX).then_some(id)
    }

    pub fn line_space(&self) -> LineSpace {
        LineSpace::new(self.points.len(), self.lines.clone()).expect("catalog lines are valid")
    }

    /// `{points: [[coeff tuples]], lines: [[point ids]]}`.
    pub fn to_json(&self) -> Result<String> {
        let k = self.forms.field();
        let json = CatalogJson {
            points: self
                .points
                .iter()
                .map(|v| v.iter().map(|&e| k.coeffs(e)).collect())
                .collect(),
            lines: &self.lines,
        };
        Ok(serde_json::to_string(&json)?)
    }

    /// Ids of the points of a set of vectors, as a sorted set.
    pub fn point_set(&self, vs: &[Vector]) -> Option<BTreeSet<u32>> {
        vs.iter().map(|v| self.point_id(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(json: &str) -> LambdaSpace {
        LambdaSpace::from_json(json).unwrap()
    }

    #[test]
    fn nondegeneracy_examples() {
        let hyp = desc(r#"{"case":"I","p":3,"d":1,"L":{"dim":2,"blocks":["hyperbolic"]}}"#);
        assert!(hyp.check_nondegenerate());

        let zero =
            desc(r#"{"case":"I","p":3,"d":1,"L":{"dim":1,"gram_f":[[0]],"q_table":[0,0,0]}}"#);
        assert!(!zero.check_nondegenerate());
        assert!(zero.build_ambient().is_err());

        let symp =
            desc(r#"{"case":"II","p":3,"d":1,"K0":"all","L":{"dim":2,"gram_f":[[0,1],[2,0]]}}"#);
        assert_eq!(symp.case(), FormCase::Symplectic);
        assert!(symp.check_nondegenerate());
    }

    #[test]
    fn ambient_dimensions() {
        let hyp = desc(r#"{"case":"I","p":3,"d":1,"L":{"dim":2,"blocks":["hyperbolic"]}}"#);
        assert_eq!(hyp.build_ambient().unwrap().dim(), 6);
        let h = desc(r#"{"case":"II","p":2,"d":2,"K0":"fixed","L":{"dim":0}}"#);
        assert_eq!(h.build_ambient().unwrap().dim(), 4);
    }

    #[test]
    fn group_t_orders() {
        let hyp = desc(r#"{"case":"I","p":3,"d":1,"L":{"dim":2,"blocks":["hyperbolic"]}}"#);
        let t = hyp.build_t().unwrap();
        assert_eq!(t.order(), 9);
        assert!(t.is_abelian());

        let symp =
            desc(r#"{"case":"II","p":3,"d":1,"K0":"all","L":{"dim":2,"blocks":["hyperbolic"]}}"#);
        assert_eq!(symp.build_t().unwrap().order(), 27);

        let h = desc(r#"{"case":"II","p":2,"d":2,"K0":"fixed","L":{"dim":0}}"#);
        let t = h.build_t().unwrap();
        assert_eq!(t.order(), 2);
    }

    #[test]
    fn rejects_malformed_spaces() {
        // quadratic space with L = 0
        assert!(LambdaSpace::from_json(r#"{"case":"I","p":3,"d":1,"L":{"dim":0}}"#).is_err());
        // symplectic in characteristic 2
        assert!(
            LambdaSpace::from_json(r#"{"case":"II","p":2,"d":1,"K0":"all","L":{"dim":0}}"#)
                .is_err()
        );
        // q not matching f
        assert!(LambdaSpace::from_json(
            r#"{"case":"I","p":3,"d":1,"L":{"dim":1,"gram_f":[[1]],"q_table":[0,1,1]}}"#
        )
        .is_err());
        // K0 without the traces
        assert!(LambdaSpace::from_json(
            r#"{"case":"II","p":3,"d":2,"K0":[[0],[1]],"L":{"dim":0}}"#
        )
        .is_err());
        assert!(LambdaSpace::from_json("{not json").is_err());
    }

    #[test]
    fn descriptor_roundtrip() {
        let h =
            desc(r#"{"case":"II","p":2,"d":2,"K0":"fixed","L":{"dim":2,"blocks":["hyperbolic"]}}"#);
        let again = LambdaSpace::from_descriptor(&h.to_descriptor()).unwrap();
        assert_eq!(h.to_descriptor(), again.to_descriptor());
    }

    #[test]
    fn small_catalogs() {
        let w3 = desc(r#"{"case":"II","p":3,"d":1,"K0":"all","L":{"dim":0}}"#);
        let cat = w3.enumerate_singular(DEFAULT_VECTOR_CAP).unwrap();
        assert_eq!(cat.points().len(), 40);
        assert_eq!(cat.lines().len(), 40);
        assert!(cat.lines().iter().all(|l| l.len() == 4));

        let grid = LambdaSpace::split_ambient(3).unwrap();
        let cat = grid.enumerate_singular(DEFAULT_VECTOR_CAP).unwrap();
        assert_eq!(cat.points().len(), 16);
        assert_eq!(cat.lines().len(), 8);

        assert!(matches!(
            w3.enumerate_singular(10),
            Err(Error::CapExceeded { .. })
        ));
    }
}
