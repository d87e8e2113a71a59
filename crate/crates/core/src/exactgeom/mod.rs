//! Exact rational points, homogeneous correspondents and unimodularity.
//!
//! A rational point `y` in the unit cube has a least common denominator
//! `den(y)` and a homogeneous correspondent `den(y) * (y, 1)`, a primitive
//! integer vector. A rational simplex is *regular* when the homogeneous
//! correspondents of its vertices are part of a basis of the integer lattice,
//! which is decided here by the gcd of maximal minors.

pub mod intmat;
pub mod linalg;

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use intmat::{extend_to_basis, maximal_minor_gcd, row_echelon, Echelon, IntMatrix};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("a point needs at least one coordinate")]
    EmptyPoint,
    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutsideCube { index: usize, value: Rational },
    #[error("malformed rational {0:?}")]
    BadRational(String),
    #[error("homogeneous vector must end with a positive entry")]
    BadHomogeneous,
    #[error("simplex has no vertices")]
    EmptySimplex,
    #[error("vertices live in different ambient dimensions")]
    DimensionMismatch,
    #[error("vertex {0} is repeated")]
    RepeatedVertex(usize),
    #[error("vertices are affinely dependent")]
    AffinelyDependent,
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, GeomError> {
    let t = s.trim();
    let bad = || GeomError::BadRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// A rational point of the unit cube `[0,1]^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    coords: Vec<Rational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self, GeomError> {
        if coords.is_empty() {
            return Err(GeomError::EmptyPoint);
        }
        for (index, value) in coords.iter().enumerate() {
            if value.is_negative() || *value > Rational::one() {
                return Err(GeomError::OutsideCube {
                    index,
                    value: value.clone(),
                });
            }
        }
        Ok(Self { coords })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self, GeomError> {
        Self::new(pairs.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    /// Parses a comma separated list such as `"1/2, 2/3"`.
    pub fn parse(s: &str) -> Result<Self, GeomError> {
        let coords = s
            .split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![Rational::zero(); dim],
        }
    }

    /// The point `e_i / weight` of `[0,1]^dim`.
    pub fn scaled_basis(dim: usize, i: usize, weight: &BigInt) -> Self {
        let mut coords = vec![Rational::zero(); dim];
        coords[i] = Rational::new(BigInt::one(), weight.clone());
        Self { coords }
    }

    /// Inverse of [`homogeneous`]: divides the leading entries by the last.
    pub fn from_homogeneous(v: &[BigInt]) -> Result<Self, GeomError> {
        let (last, head) = v.split_last().ok_or(GeomError::BadHomogeneous)?;
        if !last.is_positive() {
            return Err(GeomError::BadHomogeneous);
        }
        Self::new(
            head.iter()
                .map(|x| Rational::new(x.clone(), last.clone()))
                .collect(),
        )
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Squared Euclidean distance, exact.
    pub fn dist2(&self, other: &RationalPoint) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// Convex combination `sum weights[i] * points[i]`; the weights must be
    /// nonnegative and sum to one for the result to stay in the cube.
    pub fn combination(points: &[&RationalPoint], weights: &[Rational]) -> Result<Self, GeomError> {
        let dim = points.first().ok_or(GeomError::EmptyPoint)?.ambient_dim();
        let mut coords = vec![Rational::zero(); dim];
        for (p, w) in points.iter().zip(weights) {
            for (c, x) in coords.iter_mut().zip(&p.coords) {
                *c += w * x;
            }
        }
        Self::new(coords)
    }

    pub fn barycenter(points: &[&RationalPoint]) -> Result<Self, GeomError> {
        let w = Rational::new(BigInt::one(), BigInt::from(points.len()));
        Self::combination(points, &vec![w; points.len()])
    }
}

impl fmt::Debug for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Least common denominator of the coordinates.
pub fn den(p: &RationalPoint) -> BigInt {
    p.coords
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Integer vector `den(p) * (p, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousVector(Vec<BigInt>);

impl HomogeneousVector {
    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    /// The last entry, equal to `den` for vectors built by [`homogeneous`].
    pub fn weight(&self) -> &BigInt {
        self.0.last().expect("nonempty homogeneous vector")
    }

    pub fn to_point(&self) -> Result<RationalPoint, GeomError> {
        RationalPoint::from_homogeneous(&self.0)
    }
}

impl Add for &HomogeneousVector {
    type Output = HomogeneousVector;

    fn add(self, rhs: Self) -> HomogeneousVector {
        HomogeneousVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

pub fn homogeneous(p: &RationalPoint) -> HomogeneousVector {
    let d = den(p);
    let mut v: Vec<BigInt> = p
        .coords
        .iter()
        .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
        .collect();
    v.push(d);
    HomogeneousVector(v)
}

/// Matrix whose rows are the homogeneous correspondents of `points`.
pub fn homogeneous_rows(points: &[&RationalPoint]) -> IntMatrix {
    IntMatrix::from_rows(points.iter().map(|p| homogeneous(p).0).collect())
}

/// Homogeneous vectors linearly independent over the rationals.
pub fn affinely_independent(points: &[&RationalPoint]) -> bool {
    let m = homogeneous_rows(points);
    row_echelon(&m).rank() == points.len()
}

/// `true` iff the homogeneous correspondents are part of a basis of `Z^{n+1}`.
pub fn points_regular(points: &[&RationalPoint]) -> bool {
    if points.is_empty() {
        return true;
    }
    if points.len() > points[0].ambient_dim() + 1 {
        return false;
    }
    maximal_minor_gcd(&homogeneous_rows(points)).is_one()
}

/// A rational simplex: nonempty list of affinely independent points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSimplex {
    vertices: Vec<RationalPoint>,
}

impl RationalSimplex {
    pub fn new(vertices: Vec<RationalPoint>) -> Result<Self, GeomError> {
        let first = vertices.first().ok_or(GeomError::EmptySimplex)?;
        let dim = first.ambient_dim();
        if vertices.iter().any(|v| v.ambient_dim() != dim) {
            return Err(GeomError::DimensionMismatch);
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(GeomError::RepeatedVertex(i));
            }
        }
        let refs: Vec<&RationalPoint> = vertices.iter().collect();
        if !affinely_independent(&refs) {
            return Err(GeomError::AffinelyDependent);
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].ambient_dim()
    }

    pub fn vertex_refs(&self) -> Vec<&RationalPoint> {
        self.vertices.iter().collect()
    }
}

/// Regularity of a rational simplex.
pub fn is_regular(t: &RationalSimplex) -> bool {
    points_regular(&t.vertex_refs())
}

/// Barycentric coordinates of `x` with respect to affinely independent
/// `vertices`, or `None` when `x` is off their affine hull.
pub fn barycentric(vertices: &[&RationalPoint], x: &RationalPoint) -> Option<Vec<Rational>> {
    let n = x.ambient_dim();
    let k = vertices.len();
    let mut a = vec![vec![Rational::zero(); k]; n + 1];
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..n {
            a[i][j] = v.coords[i].clone();
        }
        a[n][j] = Rational::one();
    }
    let mut b: Vec<Rational> = x.coords.clone();
    b.push(Rational::one());
    linalg::solve(&a, &b)
}

/// Barycentric coordinates when `x` lies in `conv(vertices)`.
pub fn locate_in_simplex(vertices: &[&RationalPoint], x: &RationalPoint) -> Option<Vec<Rational>> {
    // bounding box first; the exact solve is far more expensive
    for (i, xi) in x.coords.iter().enumerate() {
        let below = vertices.iter().all(|v| &v.coords[i] > xi);
        let above = vertices.iter().all(|v| &v.coords[i] < xi);
        if below || above {
            return None;
        }
    }
    // solve xtilde = sum mu_j vtilde_j over the integers; lambda_j has the
    // sign of mu_j and equals mu_j den(v_j) / den(x)
    let cols: Vec<HomogeneousVector> = vertices.iter().map(|v| homogeneous(v)).collect();
    let n = x.ambient_dim() + 1;
    let a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| cols.iter().map(|c| c.0[i].clone()).collect())
        .collect();
    let xt = homogeneous(x);
    let (mu, d) = linalg::solve_integer(&a, &xt.0)?;
    if mu.iter().any(Signed::is_negative) {
        return None;
    }
    let dx = xt.weight();
    Some(
        mu.into_iter()
            .zip(&cols)
            .map(|(m, c)| Rational::new(m * c.weight(), &d * dx))
            .collect(),
    )
}

/// Simplest rational (least denominator, then least numerator) in the open
/// interval `(lo, hi)`, found by Stern-Brocot descent.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi, "empty interval");
    let fl = lo.floor();
    if &(&fl + Rational::one()) < hi {
        // an integer fits strictly inside
        let candidate = &fl + Rational::one();
        return candidate;
    }
    // mediant descent between a/b <= lo and c/d >= hi
    let (mut a, mut b): (BigInt, BigInt) = (fl.to_integer(), BigInt::one());
    let (mut c, mut d): (BigInt, BigInt) = (&a + 1, BigInt::one());
    loop {
        let mn = &a + &c;
        let md = &b + &d;
        let m = Rational::new(mn.clone(), md.clone());
        if &m <= lo {
            a = mn;
            b = md;
        } else if &m >= hi {
            c = mn;
            d = md;
        } else {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lcm_oracle(ds: &[i64]) -> i64 {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        ds.iter().fold(1, |acc, &d| acc / gcd(acc, d) * d)
    }

    fn pt(pairs: &[(i64, i64)]) -> RationalPoint {
        RationalPoint::from_ratios(pairs).unwrap()
    }

    #[test]
    fn den_examples() {
        assert_eq!(den(&pt(&[(1, 2)])), BigInt::from(2));
        assert_eq!(den(&pt(&[(0, 1), (0, 1)])), BigInt::from(1));
        assert_eq!(
            den(&pt(&[(1, 2), (2, 3)])),
            BigInt::from(lcm_oracle(&[2, 3]))
        );
    }

    #[test]
    fn homogeneous_examples() {
        let h = |p: RationalPoint| {
            homogeneous(&p)
                .into_entries()
                .into_iter()
                .map(|x| i64::try_from(x).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(h(pt(&[(1, 2)])), vec![1, 2]);
        assert_eq!(h(pt(&[(0, 1)])), vec![0, 1]);
        assert_eq!(h(pt(&[(1, 2), (2, 3)])), vec![3, 4, 6]);
    }

    #[test]
    fn regularity_examples() {
        let s = |ps: Vec<RationalPoint>| RationalSimplex::new(ps).unwrap();
        assert!(is_regular(&s(vec![pt(&[(0, 1)]), pt(&[(1, 1)])])));
        assert!(!is_regular(&s(vec![pt(&[(0, 1)]), pt(&[(2, 3)])])));
        assert!(is_regular(&s(vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(1, 1), (1, 1)])
        ])));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            RationalPoint::from_ratios(&[(3, 2)]).unwrap_err(),
            GeomError::OutsideCube {
                index: 0,
                value: rational(3, 2)
            }
        );
        assert_eq!(
            RationalSimplex::new(vec![pt(&[(1, 2)]), pt(&[(1, 2)])]).unwrap_err(),
            GeomError::RepeatedVertex(1)
        );
        assert_eq!(
            RationalSimplex::new(vec![pt(&[(0, 1)]), pt(&[(1, 2)]), pt(&[(1, 1)])]).unwrap_err(),
            GeomError::AffinelyDependent
        );
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_rational(" 4/6 ").unwrap(), rational(2, 3));
    }

    #[test]
    fn simplest_rational_in_interval() {
        assert_eq!(
            simplest_between(&rational(1, 2), &rational(1, 1)),
            rational(2, 3)
        );
        assert_eq!(
            simplest_between(&rational(1, 3), &rational(1, 2)),
            rational(2, 5)
        );
        assert_eq!(
            simplest_between(&rational(0, 1), &rational(1, 1)),
            rational(1, 2)
        );
        assert_eq!(
            simplest_between(&rational(1, 2), &rational(3, 1)),
            rational(1, 1)
        );
    }

    fn unit_point(dim: usize) -> impl Strategy<Value = RationalPoint> {
        proptest::collection::vec((1i64..=40).prop_flat_map(|d| (0..=d, Just(d))), dim)
            .prop_map(|v| RationalPoint::from_ratios(&v).unwrap())
    }

    proptest! {
        #[test]
        fn homogeneous_round_trip(p in (1usize..=4).prop_flat_map(unit_point)) {
            let h = homogeneous(&p);
            let g = h.entries().iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            prop_assert!(g.is_one());
            prop_assert_eq!(h.to_point().unwrap(), p);
        }

        #[test]
        fn regularity_ignores_vertex_order(
            ps in proptest::collection::vec(unit_point(2), 1..=3),
            rot in 0usize..3,
        ) {
            let Ok(t) = RationalSimplex::new(ps.clone()) else { return Ok(()) };
            let mut qs = ps;
            let r = rot % qs.len();
            qs.rotate_left(r);
            qs.reverse();
            let u = RationalSimplex::new(qs).unwrap();
            prop_assert_eq!(is_regular(&t), is_regular(&u));
        }
    }
}
