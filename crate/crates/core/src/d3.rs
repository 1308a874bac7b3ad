//! The quadrangle of type D3 over a prime field: the orthogonal quadrangle of
//! the hyperbolic plane `L = K²` with `q(s, t) = st`, its six root groups
//! `x₀, …, x₅` as explicit matrices, and exact checks of their commutator
//! relations, the `μ`-conjugation tables, and the subgroup `{x₄(u, 0)}` that
//! shows the quadrangle is not razor-sharp.
//!
//! `x₁…x₄` come from the generators: `x₁ = δ`, `x₂(s,t) = β_(s,t)`,
//! `x₃ = γ`, `x₄(s,t) = α_(s,t)`. The two outer groups are Siegel
//! transformations `E(u, w)`, with `x₀(s,t) = E(x₁′, A·(s,t))` and
//! `x₅(u) = E(x₁, c·u·x₂)`. The coefficients `A` and `c` were found by an
//! exhaustive search over all invertible choices (see the `derive_d3`
//! example, which reruns it); only one choice survives the relations.

use serde::Serialize;

use crate::algebra::{FormTables, Matrix, Vector, X1, X1P, X2, X2P};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::moufang::{comm, identity_family, inv, Generators};
use crate::spaces::{LambdaSpace, TElem};

/// Row-major `[a, b, c, d]`: `x₀(s, t)` pushes `x₁′` along `(as + bt, cs + dt) ∈ L`.
pub const X0_COEFFS: [i64; 4] = [1, 0, 0, 1];
/// `x₅(u)` pushes `x₁` along `c·u·x₂`.
pub const X5_SCALE: i64 = 1;

/// The hyperbolic plane over GF(p).
pub fn hyperbolic_plane(p: u8) -> Result<LambdaSpace> {
    LambdaSpace::from_json(&format!(
        r#"{{"case":"I","p":{p},"d":1,"L":{{"dim":2,"blocks":["hyperbolic"]}}}}"#
    ))
}

/// The Siegel transformation `v ↦ v + F(v,u)w − F(v,w)u − Q(w)F(v,u)u`
/// for singular `u` and `w ⊥ u`.
pub fn siegel(forms: &FormTables, u: &[Elem], w: &[Elem]) -> Result<Matrix> {
    let k = forms.field();
    let n = forms.dim();
    if forms.eval_q(u)? != Elem::ZERO || forms.eval_f(u, w)? != Elem::ZERO {
        return Err(Error::precondition(
            "a Siegel transformation needs u singular and w ⊥ u",
        ));
    }
    let qw = forms.eval_q(w)?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![Elem::ZERO; n];
        v[i] = Elem::ONE;
        let fu = forms.eval_f(&v, u)?;
        let fw = forms.eval_f(&v, w)?;
        let cu = k.neg(k.add(fw, k.mul(qw, fu)));
        rows.push(
            (0..n)
                .map(|j| k.add(k.add(v[j], k.mul(fu, w[j])), k.mul(cu, u[j])))
                .collect(),
        );
    }
    Matrix::from_rows(rows)
}

/// The six parametrized root groups around the base circuit.
pub struct D3Groups {
    gens: Generators,
    x0_coeffs: [Elem; 4],
    x5_scale: Elem,
}

impl D3Groups {
    /// Uses the frozen coefficients.
    pub fn new(p: u8) -> Result<Self> {
        let l = hyperbolic_plane(p)?;
        let k = l.field().clone();
        Self::with_coeffs(&l, X0_COEFFS.map(|c| k.from_int(c)), k.from_int(X5_SCALE))
    }

    pub fn with_coeffs(l: &LambdaSpace, x0_coeffs: [Elem; 4], x5_scale: Elem) -> Result<Self> {
        if l.field().characteristic() == 2
            || l.field().order() != l.field().characteristic() as usize
        {
            return Err(Error::precondition(
                "D3 groups are built over a prime field of odd characteristic",
            ));
        }
        let gens = Generators::new(l)?;
        if gens.forms().l_dim() != 2 || gens.forms().q_l(&[Elem::ONE, Elem::ONE]) != Elem::ONE {
            return Err(Error::precondition(
                "D3 groups need L hyperbolic with q(s, t) = st",
            ));
        }
        Ok(D3Groups {
            gens,
            x0_coeffs,
            x5_scale,
        })
    }

    pub fn field(&self) -> &Field {
        self.gens.field()
    }

    pub fn forms(&self) -> &FormTables {
        self.gens.forms()
    }

    fn pair(s: Elem, t: Elem) -> TElem {
        TElem {
            a: vec![s, t],
            t: Elem::ZERO,
        }
    }

    fn basis(&self, i: usize) -> Vector {
        let mut v = vec![Elem::ZERO; self.forms().dim()];
        v[i] = Elem::ONE;
        v
    }

    pub fn x0(&self, s: Elem, t: Elem) -> Matrix {
        let k = self.field();
        let [a, b, c, d] = self.x0_coeffs;
        let mut w = vec![Elem::ZERO; 6];
        w[4] = k.add(k.mul(a, s), k.mul(b, t));
        w[5] = k.add(k.mul(c, s), k.mul(d, t));
        siegel(self.forms(), &self.basis(X1P), &w).expect("x₁′ is singular and ⊥ L")
    }

    pub fn x1(&self, u: Elem) -> Matrix {
        self.gens.delta(u)
    }

    pub fn x2(&self, s: Elem, t: Elem) -> Matrix {
        self.gens.beta(&Self::pair(s, t))
    }

    pub fn x3(&self, u: Elem) -> Matrix {
        self.gens.gamma(u)
    }

    pub fn x4(&self, s: Elem, t: Elem) -> Matrix {
        self.gens.alpha(&Self::pair(s, t))
    }

    pub fn x5(&self, u: Elem) -> Matrix {
        let k = self.field();
        let w = self
            .basis(X2)
            .iter()
            .map(|&c| k.mul(k.mul(self.x5_scale, u), c))
            .collect::<Vector>();
        siegel(self.forms(), &self.basis(X1), &w).expect("x₁ is singular and ⊥ x₂")
    }

    /// `x₀(t⁻¹, s⁻¹) x₄(s, t) x₀(t⁻¹, s⁻¹)` for `st ≠ 0`.
    pub fn mu4(&self, s: Elem, t: Elem) -> Matrix {
        let k = self.field();
        let b = self.x0(k.inv(t).unwrap(), k.inv(s).unwrap());
        b.mul(k, &self.x4(s, t)).mul(k, &b)
    }

    /// `x₅(u⁻¹) x₁(u) x₅(u⁻¹)` for `u ≠ 0`.
    pub fn mu1(&self, u: Elem) -> Matrix {
        let k = self.field();
        let b = self.x5(k.inv(u).unwrap());
        b.mul(k, &self.x1(u)).mul(k, &b)
    }

    /// Whether `g` maps `{⟨x₁⟩, ⟨x₁′⟩, ⟨x₂⟩, ⟨x₂′⟩}` to itself.
    pub fn stabilizes_apartment(&self, g: &Matrix) -> bool {
        let k = self.field();
        let basis = [X1, X1P, X2, X2P];
        basis.iter().all(|&i| {
            let image = g.apply(k, &self.basis(i));
            basis.iter().any(|&j| {
                image
                    .iter()
                    .enumerate()
                    .all(|(c, x)| x.is_zero() == (c != j))
            })
        })
    }

    /// `x₄(s, t)` is in `U₄^♯` iff some `b, c ∈ U₀` make `b x₄(s,t) c`
    /// stabilize the apartment; returns all such `(b, c)` parameter pairs.
    pub fn sharp_witnesses(&self, s: Elem, t: Elem) -> Vec<((Elem, Elem), (Elem, Elem))> {
        let k = self.field();
        let u0: Vec<((Elem, Elem), Matrix)> = k
            .elements()
            .flat_map(|a| k.elements().map(move |b| (a, b)))
            .map(|(a, b)| ((a, b), self.x0(a, b)))
            .collect();
        let a = self.x4(s, t);
        let mut out = Vec::new();
        for (bp, b) in &u0 {
            let ba = b.mul(k, &a);
            for (cp, c) in &u0 {
                if self.stabilizes_apartment(&ba.mul(k, c)) {
                    out.push((*bp, *cp));
                }
            }
        }
        out
    }

    /// The pairs `(b, c) ∈ U₅ × U₅` with `b x₁(u) c` stabilizing the apartment.
    pub fn sharp_witnesses_u1(&self, u: Elem) -> Vec<(Elem, Elem)> {
        let k = self.field();
        let u5: Vec<(Elem, Matrix)> = k.elements().map(|a| (a, self.x5(a))).collect();
        let a = self.x1(u);
        let mut out = Vec::new();
        for (bp, b) in &u5 {
            let ba = b.mul(k, &a);
            for (cp, c) in &u5 {
                if self.stabilizes_apartment(&ba.mul(k, c)) {
                    out.push((*bp, *cp));
                }
            }
        }
        out
    }
}

/// Counts of everything checked by [`verify_d3`].
#[derive(Clone, Debug, Serialize)]
pub struct D3Report {
    pub p: u8,
    pub relations: Vec<(String, usize)>,
    /// `(s, t)` with `x₄(s, t) ∈ U₄^♯`, found by search over `U₀ × U₀`.
    pub sharp: Vec<(u8, u8)>,
    pub h4_generators: usize,
    pub invariant_subgroup_order: usize,
    pub passed: bool,
}

impl D3Report {
    pub fn total(&self) -> usize {
        self.relations.iter().map(|r| r.1).sum()
    }
}

fn fail(claim: &str, detail: String) -> Error {
    Error::violation(claim, detail, vec![])
}

/// Exhaustively checks, over GF(p):
/// - all generators and `x₀`, `x₅` are isometries, and each `xᵢ` is an injective homomorphism;
/// - `[x₁(u), x₄(s,t)⁻¹] = x₂(su, ut)x₃(sut)`, `[x₂(s,t), x₄(u,v)⁻¹] = x₃(ut + sv)`,
///   `[U₁,U₃] = [U₁,U₂] = [U₂,U₃] = [U₃,U₄] = 1`;
/// - `[x₀(s,t), x₃(u)⁻¹] = x₁(tus)x₂(us, tu)`, `[x₀(s,t), x₂(u,v)⁻¹] = x₁(tu + vs)`,
///   `[x₂(s,t), x₅(u)⁻¹] = x₃(sut)x₄(su, ut)`;
/// - `x₄(s,t) ∈ U₄^♯ ⇔ st ≠ 0` and `x₁(u) ∈ U₁^♯` for `u ≠ 0`, each with a unique
///   witness pair giving the stated `μ`, and both `μ`-conjugation tables;
/// - `{x₄(u, 0)}` is a nontrivial subgroup, invariant under every `μ(a)μ(b)` with
///   `a, b ∈ U₄^♯`, and disjoint from `U₄^♯`.
pub fn verify_d3(p: u8) -> Result<D3Report> {
    let g = D3Groups::new(p)?;
    let k = g.field().clone();
    let forms = g.forms();
    let ks: Vec<Elem> = k.elements().collect();
    let units: Vec<Elem> = ks.iter().copied().filter(|x| !x.is_zero()).collect();
    let n = ks.len();
    let id = Matrix::identity(6);
    let m = |a: &Matrix, b: &Matrix| a.mul(&k, b);
    let mut relations = Vec::new();
    let mut record = |name: &str, count: usize| relations.push((name.to_string(), count));

    // isometries and parametrizations
    let mut isometries = 0;
    for a in &ks {
        for b in &ks {
            for mat in [g.x0(*a, *b), g.x2(*a, *b), g.x4(*a, *b)] {
                if !forms.is_isometry(&mat)? {
                    return Err(fail(
                        "root group elements are isometries",
                        format!("({a}, {b})"),
                    ));
                }
                isometries += 1;
            }
        }
        for mat in [g.x1(*a), g.x3(*a), g.x5(*a)] {
            if !forms.is_isometry(&mat)? {
                return Err(fail("root group elements are isometries", format!("{a}")));
            }
            isometries += 1;
        }
    }
    record("isometries", isometries);
    type Pair = fn(&D3Groups, Elem, Elem) -> Matrix;
    type Single = fn(&D3Groups, Elem) -> Matrix;
    let pairs: [(&str, Pair); 3] = [
        ("x0", D3Groups::x0),
        ("x2", D3Groups::x2),
        ("x4", D3Groups::x4),
    ];
    let singles: [(&str, Single); 3] = [
        ("x1", D3Groups::x1),
        ("x3", D3Groups::x3),
        ("x5", D3Groups::x5),
    ];
    for (name, x) in pairs {
        let c = identity_family(&format!("{name} is a homomorphism"), n.pow(4), |i| {
            let (a, b, c, d) = (
                ks[i / n / n / n],
                ks[i / n / n % n],
                ks[i / n % n],
                ks[i % n],
            );
            (
                m(&x(&g, a, b), &x(&g, c, d)),
                x(&g, k.add(a, c), k.add(b, d)),
            )
        })?;
        let distinct: std::collections::HashSet<Matrix> = ks
            .iter()
            .flat_map(|&a| ks.iter().map(move |&b| (a, b)))
            .map(|(a, b)| x(&g, a, b))
            .collect();
        if distinct.len() != n * n {
            return Err(fail(
                "root group parametrizations are injective",
                name.into(),
            ));
        }
        record(&format!("{name} is an injective homomorphism"), c);
    }
    for (name, x) in singles {
        let c = identity_family(&format!("{name} is a homomorphism"), n * n, |i| {
            let (a, b) = (ks[i / n], ks[i % n]);
            (m(&x(&g, a), &x(&g, b)), x(&g, k.add(a, b)))
        })?;
        let distinct: std::collections::HashSet<Matrix> = ks.iter().map(|&a| x(&g, a)).collect();
        if distinct.len() != n {
            return Err(fail(
                "root group parametrizations are injective",
                name.into(),
            ));
        }
        record(&format!("{name} is an injective homomorphism"), c);
    }

    // commutator relations of the D3 quadrangle
    let idx3 = |i: usize| (ks[i / n / n], ks[i / n % n], ks[i % n]);
    let idx4 = |i: usize| {
        (
            ks[i / n / n / n],
            ks[i / n / n % n],
            ks[i / n % n],
            ks[i % n],
        )
    };
    let mul3 = |a: Elem, b: Elem, c: Elem| k.mul(k.mul(a, b), c);
    record(
        "[x1(u), x4(s,t)^-1] = x2(su, ut) x3(sut)",
        identity_family("[x1,x4^-1]", n.pow(3), |i| {
            let (u, s, t) = idx3(i);
            (
                comm(&k, &g.x1(u), &inv(&k, &g.x4(s, t))),
                m(&g.x2(k.mul(s, u), k.mul(u, t)), &g.x3(mul3(s, u, t))),
            )
        })?,
    );
    record(
        "[x2(s,t), x4(u,v)^-1] = x3(ut + sv)",
        identity_family("[x2,x4^-1]", n.pow(4), |i| {
            let (s, t, u, v) = idx4(i);
            (
                comm(&k, &g.x2(s, t), &inv(&k, &g.x4(u, v))),
                g.x3(k.add(k.mul(u, t), k.mul(s, v))),
            )
        })?,
    );
    record(
        "[U1, U3] = 1",
        identity_family("[U1,U3]", n * n, |i| {
            (comm(&k, &g.x1(ks[i / n]), &g.x3(ks[i % n])), id.clone())
        })?,
    );
    record(
        "[U1, U2] = 1",
        identity_family("[U1,U2]", n.pow(3), |i| {
            let (u, s, t) = idx3(i);
            (comm(&k, &g.x1(u), &g.x2(s, t)), id.clone())
        })?,
    );
    record(
        "[U2, U3] = 1",
        identity_family("[U2,U3]", n.pow(3), |i| {
            let (u, s, t) = idx3(i);
            (comm(&k, &g.x2(s, t), &g.x3(u)), id.clone())
        })?,
    );
    record(
        "[U3, U4] = 1",
        identity_family("[U3,U4]", n.pow(3), |i| {
            let (u, s, t) = idx3(i);
            (comm(&k, &g.x3(u), &g.x4(s, t)), id.clone())
        })?,
    );

    // relations with the outer groups
    record(
        "[x0(s,t), x3(u)^-1] = x1(tus) x2(us, tu)",
        identity_family("[x0,x3^-1]", n.pow(3), |i| {
            let (s, t, u) = idx3(i);
            (
                comm(&k, &g.x0(s, t), &inv(&k, &g.x3(u))),
                m(&g.x1(mul3(t, u, s)), &g.x2(k.mul(u, s), k.mul(t, u))),
            )
        })?,
    );
    record(
        "[x0(s,t), x2(u,v)^-1] = x1(tu + vs)",
        identity_family("[x0,x2^-1]", n.pow(4), |i| {
            let (s, t, u, v) = idx4(i);
            (
                comm(&k, &g.x0(s, t), &inv(&k, &g.x2(u, v))),
                g.x1(k.add(k.mul(t, u), k.mul(v, s))),
            )
        })?,
    );
    record(
        "[x2(s,t), x5(u)^-1] = x3(sut) x4(su, ut)",
        identity_family("[x2,x5^-1]", n.pow(3), |i| {
            let (s, t, u) = idx3(i);
            (
                comm(&k, &g.x2(s, t), &inv(&k, &g.x5(u))),
                m(&g.x3(mul3(s, u, t)), &g.x4(k.mul(s, u), k.mul(u, t))),
            )
        })?,
    );

    // U₄^♯ by search, and the μ(x₄(s,t)) table
    let mut sharp = Vec::new();
    for &s in &ks {
        for &t in &ks {
            if s.is_zero() && t.is_zero() {
                continue;
            }
            let w = g.sharp_witnesses(s, t);
            let expected = !k.mul(s, t).is_zero();
            if w.is_empty() == expected {
                return Err(fail(
                    "x₄(s,t) ∈ U₄^♯ iff st ≠ 0",
                    format!("({s}, {t}): {} witnesses", w.len()),
                ));
            }
            if expected {
                let b = (k.inv(t).unwrap(), k.inv(s).unwrap());
                if w != vec![(b, b)] {
                    return Err(fail(
                        "μ(x₄(s,t)) = x₀(t⁻¹,s⁻¹) x₄(s,t) x₀(t⁻¹,s⁻¹)",
                        format!("({s}, {t}): {w:?}"),
                    ));
                }
                sharp.push((s.0, t.0));
            }
        }
    }
    record("U4 sharp elements by search", (n * n - 1) * n.pow(4));
    for &u in &units {
        let ui = k.inv(u).unwrap();
        let w = g.sharp_witnesses_u1(u);
        if w != vec![(ui, ui)] {
            return Err(fail(
                "x₁(u) ∈ U₁^♯ with μ(x₁(u)) = x₅(u⁻¹) x₁(u) x₅(u⁻¹)",
                format!("{u}: {w:?}"),
            ));
        }
    }
    record("U1 sharp elements by search", units.len() * n * n);

    let conj = |a: &Matrix, h: &Matrix| Matrix::conjugate(&k, a, h).expect("invertible");
    let mut table4 = 0;
    for &s in &units {
        for &t in &units {
            let mu = g.mu4(s, t);
            let (si, ti) = (k.inv(s).unwrap(), k.inv(t).unwrap());
            for &u in &ks {
                let checks = [
                    (conj(&g.x1(u), &mu), g.x3(mul3(s, u, t)), "x1(u) ↦ x3(sut)"),
                    (
                        conj(&g.x3(u), &mu),
                        g.x1(mul3(si, u, ti)),
                        "x3(u) ↦ x1(s⁻¹ut⁻¹)",
                    ),
                ];
                for (l, r, name) in checks {
                    if l != r {
                        return Err(fail(
                            "conjugation by μ(x₄(s,t))",
                            format!("{name} at s={s}, t={t}, u={u}"),
                        ));
                    }
                    table4 += 1;
                }
                for &v in &ks {
                    let checks = [
                        (
                            conj(&g.x0(u, v), &mu),
                            g.x4(mul3(s, v, s), mul3(t, u, t)),
                            "x0(u,v) ↦ x4(svs, tut)",
                        ),
                        (
                            conj(&g.x2(u, v), &mu),
                            g.x2(k.neg(mul3(s, v, ti)), k.neg(mul3(si, u, t))),
                            "x2(u,v) ↦ x2(−svt⁻¹, −s⁻¹ut)",
                        ),
                        (
                            conj(&g.x4(u, v), &mu),
                            g.x0(mul3(ti, v, ti), mul3(si, u, si)),
                            "x4(u,v) ↦ x0(t⁻¹vt⁻¹, s⁻¹us⁻¹)",
                        ),
                    ];
                    for (l, r, name) in checks {
                        if l != r {
                            return Err(fail(
                                "conjugation by μ(x₄(s,t))",
                                format!("{name} at s={s}, t={t}, u={u}, v={v}"),
                            ));
                        }
                        table4 += 1;
                    }
                }
            }
        }
    }
    record("conjugation table of mu(x4(s,t))", table4);

    let mut table1 = 0;
    for &u in &units {
        let mu = g.mu1(u);
        if !g.stabilizes_apartment(&mu) {
            return Err(fail("μ(x₁(u)) stabilizes the apartment", format!("{u}")));
        }
        let ui = k.inv(u).unwrap();
        for &s in &ks {
            let checks = [
                (
                    conj(&g.x1(s), &mu),
                    g.x5(mul3(ui, s, ui)),
                    "x1(s) ↦ x5(u⁻¹su⁻¹)",
                ),
                (conj(&g.x3(s), &mu), g.x3(s), "x3(s) ↦ x3(s)"),
                (conj(&g.x5(s), &mu), g.x1(mul3(u, s, u)), "x5(s) ↦ x1(usu)"),
            ];
            for (l, r, name) in checks {
                if l != r {
                    return Err(fail(
                        "conjugation by μ(x₁(u))",
                        format!("{name} at u={u}, s={s}"),
                    ));
                }
                table1 += 1;
            }
            for &t in &ks {
                let checks = [
                    (
                        conj(&g.x2(s, t), &mu),
                        g.x4(k.neg(k.mul(s, ui)), k.neg(k.mul(ui, t))),
                        "x2(s,t) ↦ x4(−su⁻¹, −u⁻¹t)",
                    ),
                    (
                        conj(&g.x4(s, t), &mu),
                        g.x2(k.mul(s, u), k.mul(u, t)),
                        "x4(s,t) ↦ x2(su, ut)",
                    ),
                ];
                for (l, r, name) in checks {
                    if l != r {
                        return Err(fail(
                            "conjugation by μ(x₁(u))",
                            format!("{name} at u={u}, s={s}, t={t}"),
                        ));
                    }
                    table1 += 1;
                }
            }
        }
    }
    record("conjugation table of mu(x1(u))", table1);

    // {x₄(u, 0)} is a nontrivial H₄-invariant subgroup missing U₄^♯
    let sub: Vec<Matrix> = ks.iter().map(|&u| g.x4(u, Elem::ZERO)).collect();
    let in_sub = |a: &Matrix| sub.iter().position(|b| b == a);
    for a in &sub {
        for b in &sub {
            if in_sub(&m(a, b)).is_none() {
                return Err(fail("{x₄(u,0)} is a subgroup", String::new()));
            }
        }
    }
    if sharp.iter().any(|&(_, t)| t == 0) {
        return Err(fail("{x₄(u,0)} is disjoint from U₄^♯", String::new()));
    }
    let mus: Vec<Matrix> = sharp
        .iter()
        .map(|&(s, t)| g.mu4(Elem(s), Elem(t)))
        .collect();
    let mut h4_generators = 0;
    for ma in &mus {
        for mb in &mus {
            let h = m(ma, mb);
            for (u, a) in sub.iter().enumerate() {
                if in_sub(&conj(a, &h)).is_none() {
                    return Err(fail("{x₄(u,0)} is H₄-invariant", format!("x₄({u}, 0)")));
                }
            }
            h4_generators += 1;
        }
    }
    record("H4-invariance of {x4(u,0)}", h4_generators * sub.len());

    Ok(D3Report {
        p,
        relations,
        sharp,
        h4_generators,
        invariant_subgroup_order: sub.len(),
        passed: true,
    })
}

/// All `[a, b, c, d]` (invertible) for which `x₀` satisfies both of its
/// commutator relations, by exhaustive search.
pub fn search_x0(p: u8) -> Result<Vec<[Elem; 4]>> {
    let l = hyperbolic_plane(p)?;
    let k = l.field().clone();
    let ks: Vec<Elem> = k.elements().collect();
    let mut out = Vec::new();
    for a in &ks {
        for b in &ks {
            for c in &ks {
                for d in &ks {
                    if k.sub(k.mul(*a, *d), k.mul(*b, *c)).is_zero() {
                        continue;
                    }
                    let g = D3Groups::with_coeffs(&l, [*a, *b, *c, *d], Elem::ONE)?;
                    let ok = ks.iter().all(|&s| {
                        ks.iter().all(|&t| {
                            let x0 = g.x0(s, t);
                            ks.iter().all(|&u| {
                                comm(&k, &x0, &inv(&k, &g.x3(u)))
                                    == g.x1(k.mul(k.mul(t, u), s))
                                        .mul(&k, &g.x2(k.mul(u, s), k.mul(t, u)))
                                    && ks.iter().all(|&v| {
                                        comm(&k, &x0, &inv(&k, &g.x2(u, v)))
                                            == g.x1(k.add(k.mul(t, u), k.mul(v, s)))
                                    })
                            })
                        })
                    });
                    if ok {
                        out.push([*a, *b, *c, *d]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All nonzero `c` for which `x₅(u) = E(x₁, c·u·x₂)` satisfies its commutator relation.
pub fn search_x5(p: u8) -> Result<Vec<Elem>> {
    let l = hyperbolic_plane(p)?;
    let k = l.field().clone();
    let ks: Vec<Elem> = k.elements().collect();
    let mut out = Vec::new();
    for &c in ks.iter().filter(|c| !c.is_zero()) {
        let g = D3Groups::with_coeffs(&l, [Elem::ONE, Elem::ZERO, Elem::ZERO, Elem::ONE], c)?;
        let ok = ks.iter().all(|&s| {
            ks.iter().all(|&t| {
                ks.iter().all(|&u| {
                    comm(&k, &g.x2(s, t), &inv(&k, &g.x5(u)))
                        == g.x3(k.mul(k.mul(s, u), t))
                            .mul(&k, &g.x4(k.mul(s, u), k.mul(u, t)))
                })
            })
        });
        if ok {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn siegel_maps_reproduce_the_generators() {
        let g = D3Groups::new(3).unwrap();
        let k = g.field().clone();
        for s in k.elements() {
            for t in k.elements() {
                let w = vec![Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO, s, t];
                assert_eq!(g.x4(s, t), siegel(g.forms(), &g.basis(X1), &w).unwrap());
                assert_eq!(g.x2(s, t), siegel(g.forms(), &g.basis(X2P), &w).unwrap());
            }
        }
    }

    #[test]
    fn siegel_rejects_non_singular_centres() {
        let g = D3Groups::new(3).unwrap();
        let u = vec![Elem(1), Elem(1), Elem(0), Elem(0), Elem(0), Elem(0)];
        assert!(siegel(g.forms(), &u, &g.basis(X2)).is_err());
    }

    #[test]
    fn a_sample_commutator() {
        // [x₂(1,1), x₄(1,1)⁻¹] = x₃(2) over GF(3)
        let g = D3Groups::new(3).unwrap();
        let k = g.field().clone();
        let one = Elem::ONE;
        let c = comm(&k, &g.x2(one, one), &inv(&k, &g.x4(one, one)));
        assert_eq!(c, g.x3(Elem(2)));
    }

    #[test]
    fn x4_on_the_axis_is_not_sharp() {
        let g = D3Groups::new(3).unwrap();
        assert!(g.sharp_witnesses(Elem(1), Elem(0)).is_empty());
        assert_eq!(g.sharp_witnesses(Elem(1), Elem(1)).len(), 1);
    }

    #[test]
    fn rejects_characteristic_two() {
        assert!(D3Groups::new(2).is_err());
    }

    #[test]
    fn frozen_coefficients_are_the_unique_solutions() {
        let k = Field::prime(3).unwrap();
        assert_eq!(
            search_x0(3).unwrap(),
            vec![X0_COEFFS.map(|c| k.from_int(c))]
        );
        assert_eq!(search_x5(3).unwrap(), vec![k.from_int(X5_SCALE)]);
    }

    #[test]
    fn d3_over_gf3() {
        let r = verify_d3(3).unwrap();
        assert_eq!(r.sharp, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
        assert_eq!(r.invariant_subgroup_order, 3);
        assert_eq!(r.h4_generators, 16);
    }
}
