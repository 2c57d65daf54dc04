//! Sparse multivariate polynomials over the fixed variable tuple
//! `(t, x, y, z0, z1)`.
//!
//! `t` and `x` are the time-space coordinates, `y` the state coordinate, and
//! `z0`, `z1` the time- and space-derivative coordinates of the lifted
//! formulation. Terms are kept in a map ordered by graded lexicographic
//! monomial order, which makes every iteration over a polynomial (printing,
//! evaluation, assembly into constraint rows) deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::Scalar;

pub const NUM_VARS: usize = 5;

/// Variable of the ambient polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    T = 0,
    X = 1,
    Y = 2,
    Z0 = 3,
    Z1 = 4,
}

impl Var {
    pub const ALL: [Var; NUM_VARS] = [Var::T, Var::X, Var::Y, Var::Z0, Var::Z1];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
            Var::Z0 => "z0",
            Var::Z1 => "z1",
        }
    }
}

/// Exponent multi-index of a monomial `t^a x^b y^c z0^d z1^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(pub [u8; NUM_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NUM_VARS]);

    pub fn var(v: Var) -> Self {
        let mut e = [0u8; NUM_VARS];
        e[v as usize] = 1;
        Monomial(e)
    }

    pub fn exp(&self, v: Var) -> u8 {
        self.0[v as usize]
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn checked_mul(&self, other: &Monomial) -> Monomial {
        let mut e = [0u8; NUM_VARS];
        for k in 0..NUM_VARS {
            e[k] = self.0[k].checked_add(other.0[k]).expect("monomial exponent overflow");
        }
        Monomial(e)
    }

    pub fn eval<S: Scalar>(&self, point: &[S; NUM_VARS]) -> S {
        let mut acc = S::one();
        for k in 0..NUM_VARS {
            let e = self.0[k];
            if e > 0 {
                acc = acc * point[k].powi(e as i32);
            }
        }
        acc
    }
}

/// Graded lexicographic order: compare total degree first, then exponents
/// in the fixed (t, x, y, z0, z1) order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.total_degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exp(v);
            if e > 0 {
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "{}", v.name())?;
                } else {
                    write!(f, "{}^{}", v.name(), e)?;
                }
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with real coefficients; zero terms are pruned.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S: Scalar> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), S::one());
        p
    }

    /// Monomial `c * t^e[0] x^e[1] y^e[2] z0^e[3] z1^e[4]`.
    pub fn term(c: S, exps: [u8; NUM_VARS]) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial(exps), c);
        p
    }

    /// Univariate polynomial `Σ coeffs[k] v^k`.
    pub fn univariate(v: Var, coeffs: &[S]) -> Self {
        let mut p = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            let mut e = [0u8; NUM_VARS];
            e[v as usize] = u8::try_from(k).expect("degree fits in u8");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c == S::zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(S::zero);
        *entry = *entry + c;
        if *entry == S::zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> usize {
        self.terms.keys().map(|m| m.exp(v) as usize).max().unwrap_or(0)
    }

    /// True when every monomial only involves the given variables.
    pub fn uses_only(&self, allowed: &[Var]) -> bool {
        self.terms.keys().all(|m| {
            Var::ALL
                .iter()
                .all(|&v| m.exp(v) == 0 || allowed.contains(&v))
        })
    }

    pub fn scale(&self, c: S) -> Self {
        let mut out = Self::zero();
        for (m, &a) in &self.terms {
            out.add_term(*m, a * c);
        }
        out
    }

    pub fn eval(&self, point: &[S; NUM_VARS]) -> S {
        let mut acc = S::zero();
        for (m, &c) in &self.terms {
            acc = acc + c * m.eval(point);
        }
        acc
    }

    /// Evaluation in the `(t, x, y)` plane with the derivative coordinates
    /// set to zero.
    pub fn eval_txy(&self, t: S, x: S, y: S) -> S {
        self.eval(&[t, x, y, S::zero(), S::zero()])
    }

    pub fn differentiate(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                let mut exps = m.0;
                exps[v as usize] = e - 1;
                out.add_term(Monomial(exps), c * S::of_usize(e as usize));
            }
        }
        out
    }

    /// Substitute `v := q` where `q` is a polynomial in the same ring.
    pub fn substitute(&self, v: Var, q: &Polynomial<S>) -> Self {
        let max_e = self.degree_in(v);
        // powers q^0 .. q^max_e
        let mut powers = Vec::with_capacity(max_e + 1);
        powers.push(Self::one());
        for k in 1..=max_e {
            let prev = &powers[k - 1];
            powers.push(prev * q);
        }
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut rest = m.0;
            rest[v as usize] = 0;
            let base = Self::term(c, rest);
            out = &out + &(&base * &powers[e]);
        }
        out
    }

    /// Substitute `v := value` (partial evaluation).
    pub fn eval_var(&self, v: Var, value: S) -> Self {
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let e = m.exp(v);
            let mut exps = m.0;
            exps[v as usize] = 0;
            out.add_term(Monomial(exps), c * value.powi(e as i32));
        }
        out
    }

    /// Exact integral over `v ∈ [a, b]`; the result no longer involves `v`.
    pub fn integrate_var(&self, v: Var, a: S, b: S) -> Self {
        let mut out = Self::zero();
        for (m, &c) in &self.terms {
            let e = m.exp(v) as usize;
            let mut exps = m.0;
            exps[v as usize] = 0;
            let k = S::of_usize(e + 1);
            let val = (b.powi(e as i32 + 1) - a.powi(e as i32 + 1)) / k;
            out.add_term(Monomial(exps), c * val);
        }
        out
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Constant term; handy for coefficient-level boundary checks.
    pub fn constant_term(&self) -> S {
        self.terms.get(&Monomial::ONE).copied().unwrap_or_else(S::zero)
    }

    /// Sum of all coefficients, i.e. the value at `t=x=y=z0=z1=1`.
    pub fn coefficient_sum(&self) -> S {
        self.terms.values().fold(S::zero(), |acc, &c| acc + c)
    }
}

impl<S: Scalar> Add for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<S: Scalar> Sub for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Mul for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        let mut out = Polynomial::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.checked_mul(mb), ca * cb);
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.total_degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}
