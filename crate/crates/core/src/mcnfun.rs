//! Continuous piecewise-linear functions with integer pieces on rational
//! polyhedra, and lattice-group terms over the coordinate projections.
//!
//! A function is its values at the vertices of a regular carrier complex,
//! interpolated on each simplex. On a regular simplex the interpolant has
//! integer coefficients exactly when `den(v) * f(v)` is an integer at every
//! vertex; construction checks this per simplex anyway.

use std::fmt;
use std::iter::Peekable;
use std::str::Chars;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactgeom::{den, Rational, RationalPoint};
use crate::regular::{complex_contained, Containment, RegularComplex, TailKind};
use crate::zhomeo::{homogeneous_solve, linearize_values, Refinement, VertexValued};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FuncError {
    #[error("value at vertex {vertex} is not integral on the carrier: den * value = {scaled}")]
    NonIntegral {
        vertex: RationalPoint,
        scaled: Rational,
    },
    #[error("expected {expected} vertex values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("point {0} is outside the carrier")]
    OutsideCarrier(RationalPoint),
    #[error("malformed term at offset {offset}: {message}")]
    MalformedTerm { offset: usize, message: String },
    #[error("term uses p{index} but the ambient dimension is {dim}")]
    GeneratorOutOfRange { index: usize, dim: usize },
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("precondition failed at {point}: {reason}")]
    PreconditionFailed {
        reason: String,
        point: RationalPoint,
    },
    #[error("carriers have different supports, witness {0}")]
    SupportMismatch(RationalPoint),
}

/// A function on `|carrier|` given by its vertex values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunc {
    carrier: RegularComplex,
    values: Vec<Rational>,
}

impl PLFunc {
    pub fn new(carrier: RegularComplex, values: Vec<Rational>) -> Result<Self, FuncError> {
        if values.len() != carrier.vertices().len() {
            return Err(FuncError::ValueCount {
                expected: carrier.vertices().len(),
                got: values.len(),
            });
        }
        for (v, f) in carrier.vertices().iter().zip(&values) {
            let scaled = f * Rational::from_integer(den(v));
            if !scaled.is_integer() {
                return Err(FuncError::NonIntegral {
                    vertex: v.clone(),
                    scaled,
                });
            }
        }
        for s in carrier.maximal_simplexes() {
            let images: Vec<Vec<BigInt>> = s
                .iter()
                .map(|&i| {
                    vec![(&values[i] * Rational::from_integer(den(carrier.vertex(i)))).to_integer()]
                })
                .collect();
            if homogeneous_solve(&carrier.points(s), &images, |_| vec![BigInt::zero()]).is_none() {
                let v = carrier.vertex(s[0]).clone();
                return Err(FuncError::NonIntegral {
                    vertex: v,
                    scaled: values[s[0]].clone(),
                });
            }
        }
        Ok(Self { carrier, values })
    }

    pub fn carrier(&self) -> &RegularComplex {
        &self.carrier
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn constant(carrier: &RegularComplex, c: i64) -> Self {
        Self {
            carrier: carrier.clone(),
            values: vec![Rational::from_integer(c.into()); carrier.vertices().len()],
        }
    }

    /// The projection onto coordinate `i` (0-based).
    pub fn projection(carrier: &RegularComplex, i: usize) -> Self {
        Self {
            carrier: carrier.clone(),
            values: carrier
                .vertices()
                .iter()
                .map(|v| v.coords()[i].clone())
                .collect(),
        }
    }

    pub fn eval(&self, x: &RationalPoint) -> Result<Rational, FuncError> {
        self.value_at(x)
            .map(|mut v| v.remove(0))
            .ok_or_else(|| FuncError::OutsideCarrier(x.clone()))
    }

    /// Restates the function on a refinement of its carrier.
    pub fn restrict_to(&self, refinement: &RegularComplex) -> Result<PLFunc, FuncError> {
        let values = refinement
            .vertices()
            .iter()
            .map(|v| self.eval(v))
            .collect::<Result<Vec<_>, _>>()?;
        PLFunc::new(refinement.clone(), values)
    }
}

impl VertexValued for PLFunc {
    fn carrier(&self) -> &RegularComplex {
        &self.carrier
    }

    fn value_dim(&self) -> usize {
        1
    }

    fn vertex_value(&self, i: usize) -> Vec<Rational> {
        vec![self.values[i].clone()]
    }
}

/// Lattice-group term over generators `p1..pn` and the unit `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LGroupTerm {
    /// 0-based generator index.
    Var(usize),
    One,
    Add(Box<LGroupTerm>, Box<LGroupTerm>),
    Sub(Box<LGroupTerm>, Box<LGroupTerm>),
    Neg(Box<LGroupTerm>),
    Join(Box<LGroupTerm>, Box<LGroupTerm>),
    Meet(Box<LGroupTerm>, Box<LGroupTerm>),
    Scale(BigInt, Box<LGroupTerm>),
}

impl LGroupTerm {
    pub fn var(i: usize) -> Self {
        LGroupTerm::Var(i)
    }

    pub fn add(a: Self, b: Self) -> Self {
        LGroupTerm::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Self, b: Self) -> Self {
        LGroupTerm::Sub(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Self) -> Self {
        LGroupTerm::Neg(Box::new(a))
    }

    pub fn join(a: Self, b: Self) -> Self {
        LGroupTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn meet(a: Self, b: Self) -> Self {
        LGroupTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn scale(k: i64, a: Self) -> Self {
        LGroupTerm::Scale(k.into(), Box::new(a))
    }

    /// Number of generators the term needs.
    pub fn arity(&self) -> usize {
        match self {
            LGroupTerm::Var(i) => i + 1,
            LGroupTerm::One => 0,
            LGroupTerm::Neg(a) | LGroupTerm::Scale(_, a) => a.arity(),
            LGroupTerm::Add(a, b)
            | LGroupTerm::Sub(a, b)
            | LGroupTerm::Join(a, b)
            | LGroupTerm::Meet(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LGroupTerm::Var(_) | LGroupTerm::One => 0,
            LGroupTerm::Neg(a) | LGroupTerm::Scale(_, a) => 1 + a.depth(),
            LGroupTerm::Add(a, b)
            | LGroupTerm::Sub(a, b)
            | LGroupTerm::Join(a, b)
            | LGroupTerm::Meet(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Direct recursive evaluation at a point.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            LGroupTerm::Var(i) => x[*i].clone(),
            LGroupTerm::One => Rational::one(),
            LGroupTerm::Add(a, b) => a.eval(x) + b.eval(x),
            LGroupTerm::Sub(a, b) => a.eval(x) - b.eval(x),
            LGroupTerm::Neg(a) => -a.eval(x),
            LGroupTerm::Join(a, b) => a.eval(x).max(b.eval(x)),
            LGroupTerm::Meet(a, b) => a.eval(x).min(b.eval(x)),
            LGroupTerm::Scale(k, a) => Rational::from_integer(k.clone()) * a.eval(x),
        }
    }

    /// Parses infix syntax: `p1..pn`, integers, `+ - ^ v`, `*` or juxtaposed
    /// integer multipliers (`2p1`, `3*(p1 v 1)`), parentheses. `v` binds
    /// loosest, then `^`, then `+ -`, then unary minus and multipliers.
    pub fn parse(src: &str) -> Result<Self, FuncError> {
        let mut p = Parser {
            it: src.chars().peekable(),
            pos: 0,
        };
        let t = p.join()?;
        p.skip_ws();
        if p.it.peek().is_some() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }
}

impl fmt::Display for LGroupTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LGroupTerm::Var(i) => write!(f, "p{}", i + 1),
            LGroupTerm::One => write!(f, "1"),
            LGroupTerm::Add(a, b) => write!(f, "({a} + {b})"),
            LGroupTerm::Sub(a, b) => write!(f, "({a} - {b})"),
            LGroupTerm::Neg(a) => write!(f, "-{a}"),
            LGroupTerm::Join(a, b) => write!(f, "({a} v {b})"),
            LGroupTerm::Meet(a, b) => write!(f, "({a} ^ {b})"),
            LGroupTerm::Scale(k, a) => write!(f, "{k}*{a}"),
        }
    }
}

struct Parser<'a> {
    it: Peekable<Chars<'a>>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> FuncError {
        FuncError::MalformedTerm {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.it.next();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while self.it.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.it.peek().copied()
    }

    fn join(&mut self) -> Result<LGroupTerm, FuncError> {
        let mut t = self.meet()?;
        while self.peek() == Some('v') {
            self.bump();
            t = LGroupTerm::join(t, self.meet()?);
        }
        Ok(t)
    }

    fn meet(&mut self) -> Result<LGroupTerm, FuncError> {
        let mut t = self.sum()?;
        while self.peek() == Some('^') {
            self.bump();
            t = LGroupTerm::meet(t, self.sum()?);
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<LGroupTerm, FuncError> {
        let mut t = self.unary()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    t = LGroupTerm::add(t, self.unary()?);
                }
                Some('-') => {
                    self.bump();
                    t = LGroupTerm::sub(t, self.unary()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn unary(&mut self) -> Result<LGroupTerm, FuncError> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(LGroupTerm::neg(self.unary()?));
        }
        self.factor()
    }

    fn number(&mut self) -> BigInt {
        let mut digits = String::new();
        while self.it.peek().is_some_and(char::is_ascii_digit) {
            digits.push(self.bump().unwrap());
        }
        digits.parse().expect("digits")
    }

    fn factor(&mut self) -> Result<LGroupTerm, FuncError> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let t = self.join()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(t)
            }
            Some('p') => {
                self.bump();
                if !self.it.peek().is_some_and(char::is_ascii_digit) {
                    return Err(self.error("expected generator index after 'p'"));
                }
                let n = self.number();
                let i: usize = n
                    .try_into()
                    .map_err(|_| self.error("generator index too large"))?;
                if i == 0 {
                    return Err(self.error("generators are numbered from p1"));
                }
                Ok(LGroupTerm::Var(i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.number();
                match self.peek() {
                    Some('*') => {
                        self.bump();
                        Ok(LGroupTerm::Scale(k, Box::new(self.unary()?)))
                    }
                    Some('p') | Some('(') => Ok(LGroupTerm::Scale(k, Box::new(self.factor()?))),
                    _ if k.is_one() => Ok(LGroupTerm::One),
                    _ => Ok(LGroupTerm::Scale(k, Box::new(LGroupTerm::One))),
                }
            }
            Some(_) => Err(self.error("expected a generator, integer or '('")),
            None => Err(self.error("unexpected end of term")),
        }
    }
}

/// Outcome of a bounded refinement that produces a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bounded<T> {
    Done(T),
    Unknown,
}

impl<T> Bounded<T> {
    pub fn done(self) -> Option<T> {
        match self {
            Bounded::Done(t) => Some(t),
            Bounded::Unknown => None,
        }
    }
}

/// Working state for refinements: the carrier grows by blow-ups that append
/// vertices, remembering the edge each new vertex came from so that vertex
/// value vectors computed earlier can be extended by interpolation.
struct Workbench {
    carrier: RegularComplex,
    parents: Vec<Option<(usize, usize)>>,
    blowups: usize,
    cap: usize,
}

impl Workbench {
    fn new(carrier: &RegularComplex, cap: usize) -> Self {
        Self {
            carrier: carrier.clone(),
            parents: vec![None; carrier.vertices().len()],
            blowups: 0,
            cap,
        }
    }

    /// Extends `vals` to the current vertex count.
    fn extend(&self, vals: &mut Vec<Rational>) {
        for k in vals.len()..self.parents.len() {
            let (a, b) = self.parents[k].expect("new vertices have parents");
            let da = Rational::from_integer(den(self.carrier.vertex(a)));
            let db = Rational::from_integer(den(self.carrier.vertex(b)));
            let v = (&vals[a] * &da + &vals[b] * &db) / (&da + &db);
            vals.push(v);
        }
    }

    fn blow_up(&mut self, a: usize, b: usize) -> bool {
        if self.blowups >= self.cap {
            return false;
        }
        let (c, _) = self
            .carrier
            .blow_up_edge(a, b)
            .expect("edge of the carrier");
        self.carrier = c;
        self.parents.push(Some((a, b)));
        self.blowups += 1;
        true
    }

    /// An edge whose endpoint values of `h` have strictly opposite signs.
    fn sign_change(&self, h: &[Rational]) -> Option<(usize, usize)> {
        self.carrier.edges().into_iter().find(|&(a, b)| {
            (h[a].is_positive() && h[b].is_negative()) || (h[a].is_negative() && h[b].is_positive())
        })
    }

    /// Blows up until `a - b` has no strict sign change along an edge.
    /// Returns `false` when the cap is hit.
    fn separate(&mut self, a: &mut Vec<Rational>, b: &mut Vec<Rational>) -> bool {
        loop {
            self.extend(a);
            self.extend(b);
            let h: Vec<Rational> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
            match self.sign_change(&h) {
                None => return true,
                Some((i, j)) => {
                    if !self.blow_up(i, j) {
                        return false;
                    }
                }
            }
        }
    }

    fn build(&mut self, t: &LGroupTerm) -> Option<Vec<Rational>> {
        let mut out = match t {
            LGroupTerm::Var(i) => self
                .carrier
                .vertices()
                .iter()
                .map(|v| v.coords()[*i].clone())
                .collect(),
            LGroupTerm::One => vec![Rational::one(); self.carrier.vertices().len()],
            LGroupTerm::Neg(a) => self.build(a)?.into_iter().map(|x| -x).collect(),
            LGroupTerm::Scale(k, a) => {
                let k = Rational::from_integer(k.clone());
                self.build(a)?.into_iter().map(|x| &k * x).collect()
            }
            LGroupTerm::Add(a, b) | LGroupTerm::Sub(a, b) => {
                let mut x = self.build(a)?;
                let y = self.build(b)?;
                self.extend(&mut x);
                let plus = matches!(t, LGroupTerm::Add(..));
                x.into_iter()
                    .zip(y)
                    .map(|(p, q)| if plus { p + q } else { p - q })
                    .collect()
            }
            LGroupTerm::Join(a, b) | LGroupTerm::Meet(a, b) => {
                let mut x = self.build(a)?;
                let mut y = self.build(b)?;
                if !self.separate(&mut x, &mut y) {
                    return None;
                }
                let join = matches!(t, LGroupTerm::Join(..));
                x.into_iter()
                    .zip(y)
                    .map(|(p, q)| if join { p.max(q) } else { p.min(q) })
                    .collect()
            }
        };
        self.extend(&mut out);
        Some(out)
    }
}

/// The function a term denotes on `|ambient|`, on a Farey refinement of
/// `ambient` where every subterm is affine per simplex. Refinement only
/// splits edges across which some join or meet changes branch, so it is
/// complete in dimension 1 given enough blow-ups.
pub fn term_to_plfunc(
    t: &LGroupTerm,
    ambient: &RegularComplex,
    max_blowups: usize,
) -> Result<Bounded<PLFunc>, FuncError> {
    let dim = ambient.ambient_dim();
    if t.arity() > dim {
        return Err(FuncError::GeneratorOutOfRange {
            index: t.arity(),
            dim,
        });
    }
    let mut bench = Workbench::new(ambient, max_blowups);
    match bench.build(t) {
        None => Ok(Bounded::Unknown),
        Some(values) => Ok(Bounded::Done(PLFunc::new(bench.carrier, values)?)),
    }
}

/// Zero set of `f` as a subcomplex of a refinement of its carrier, together
/// with `f` restated on that refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroSet {
    pub zeros: RegularComplex,
    pub refined: PLFunc,
}

/// Refines until no edge carries a strict sign change; then on each simplex
/// the zeros of `f` form the face spanned by its zero vertices.
pub fn zeroset(f: &PLFunc, max_blowups: usize) -> Bounded<ZeroSet> {
    let mut bench = Workbench::new(&f.carrier, max_blowups);
    let mut vals = f.values.clone();
    let mut zero = vec![Rational::zero(); vals.len()];
    if !bench.separate(&mut vals, &mut zero) {
        return Bounded::Unknown;
    }
    let carrier = bench.carrier;
    let faces: Vec<Vec<usize>> = carrier
        .maximal_simplexes()
        .iter()
        .map(|s| {
            s.iter()
                .copied()
                .filter(|&i| vals[i].is_zero())
                .collect::<Vec<_>>()
        })
        .filter(|z| !z.is_empty())
        .collect();
    let zeros = if faces.is_empty() {
        RegularComplex::empty(carrier.ambient_dim())
    } else {
        carrier.subcomplex(faces)
    };
    Bounded::Done(ZeroSet {
        zeros,
        refined: PLFunc {
            carrier,
            values: vals,
        },
    })
}

/// Verdict of an ideal membership test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `|Delta_i|` lies in the zero set.
    Yes(usize),
    /// The final support of an eventually constant orbit meets a point where
    /// `f` is nonzero.
    No {
        point: RationalPoint,
        value: Rational,
    },
    Unknown,
}

/// Is `f` in the ideal of functions vanishing on some orbit support?
/// Looks for the first `i <= depth` with `|Delta_i|` inside the zero set.
/// Answers No only for eventually constant orbits whose final support is
/// listed.
pub fn ideal_member(
    f: &PLFunc,
    orbit_supports: &[RegularComplex],
    tail: TailKind,
    depth: usize,
    max_blowups: usize,
) -> Result<Membership, FuncError> {
    let dim = f.carrier.ambient_dim();
    if let Some(d) = orbit_supports.iter().find(|d| d.ambient_dim() != dim) {
        return Err(FuncError::AmbientMismatch(dim, d.ambient_dim()));
    }
    let Some(z) = zeroset(f, max_blowups).done() else {
        return Ok(Membership::Unknown);
    };
    let upto = orbit_supports.len().min(depth + 1);
    for (i, delta) in orbit_supports[..upto].iter().enumerate() {
        if complex_contained(&z.zeros, delta, max_blowups).is_yes() {
            return Ok(Membership::Yes(i));
        }
    }
    if let TailKind::EventuallyConstant(k) = tail {
        if let Some(last) = orbit_supports.get(k) {
            if let Containment::No(point) = complex_contained(&z.zeros, last, max_blowups) {
                let value = f.eval(&point)?;
                return Ok(Membership::No { point, value });
            }
        }
    }
    Ok(Membership::Unknown)
}

/// Smallest `m` with `m * g(v) >= f(v)` at every vertex of a common
/// refinement on which both are affine, hence `m * g >= f` everywhere.
/// Requires `f, g >= 0` and `g(v) = 0 => f(v) = 0` at those vertices.
pub fn dominance_witness(
    f: &PLFunc,
    g: &PLFunc,
    max_blowups: usize,
) -> Result<Bounded<BigInt>, FuncError> {
    let dim = f.carrier.ambient_dim();
    if g.carrier.ambient_dim() != dim {
        return Err(FuncError::AmbientMismatch(dim, g.carrier.ambient_dim()));
    }
    if let Containment::No(x) = crate::regular::supports_equal(&f.carrier, &g.carrier, max_blowups)
    {
        return Err(FuncError::SupportMismatch(x));
    }
    let common = match linearize_values(&f.carrier, g, max_blowups) {
        Refinement::Done { complex, .. } => complex,
        Refinement::Unknown { .. } => return Ok(Bounded::Unknown),
    };
    let mut m = BigInt::zero();
    for v in common.vertices() {
        let fv = f.eval(v)?;
        let gv = g.eval(v)?;
        if fv.is_negative() || gv.is_negative() {
            return Err(FuncError::PreconditionFailed {
                reason: "functions must be nonnegative".into(),
                point: v.clone(),
            });
        }
        if gv.is_zero() {
            if fv.is_positive() {
                return Err(FuncError::PreconditionFailed {
                    reason: format!("g vanishes where f = {fv}"),
                    point: v.clone(),
                });
            }
            continue;
        }
        let ratio = fv / gv;
        let ceil = ratio.numer().div_ceil(ratio.denom());
        m = m.max(ceil);
    }
    Ok(Bounded::Done(m))
}
