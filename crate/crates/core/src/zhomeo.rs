//! Integer piecewise-linear maps between regular complexes.
//!
//! A map is stored as one affine piece `x -> M x + o` per maximal simplex
//! of its domain, with integer `M` and `o`. Pieces are computed from vertex
//! images on homogeneous coordinates: the homogeneous vertex vectors of a
//! regular simplex extend to a unimodular basis `B`, the images of the extra
//! basis vectors are chosen integral, and `Mhat = Img * B^-1` is checked to be
//! an integer matrix.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::complex::{show_face, VertexMap};
use crate::exactgeom::{
    den, extend_to_basis, homogeneous, linalg, locate_in_simplex, IntMatrix, Rational,
    RationalPoint, RationalSimplex,
};
use crate::lp::{self, LpOutcome};
use crate::regular::{
    check_intersections, mediant, supports_equal, Containment, Realization, RegularComplex,
    RegularError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error(transparent)]
    Regular(#[from] RegularError),
    #[error("vertex map is not an isomorphism of the skeletons: {0}")]
    NotIsomorphism(String),
    #[error("vertex {vertex} has den {domain} but its image has den {image}")]
    DenominatorMismatch {
        vertex: RationalPoint,
        domain: BigInt,
        image: BigInt,
    },
    #[error("affine piece on {0:?} is not integral")]
    NonIntegral(Vec<usize>),
    #[error("point {0} is outside the domain")]
    OutsideDomain(RationalPoint),
    #[error("piece on {0:?} is not injective")]
    DegenerateImage(Vec<usize>),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("inverse piece on {0:?} has non-integer coefficients")]
    NonIntegerInverse(Vec<usize>),
    #[error("pieces disagree at vertex {0}")]
    Inconsistent(RationalPoint),
    #[error("supports differ, witness {0}")]
    SupportMismatch(RationalPoint),
    #[error("piece dimensions do not match the domain")]
    Shape,
}

/// `x -> matrix * x + offset`, all integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub matrix: IntMatrix,
    pub offset: Vec<BigInt>,
}

impl AffinePiece {
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        (0..self.matrix.rows())
            .map(|i| {
                let mut acc = Rational::from_integer(self.offset[i].clone());
                for (j, xj) in x.iter().enumerate() {
                    let a = self.matrix.get(i, j);
                    if !a.is_zero() {
                        acc += xj * Rational::from_integer(a.clone());
                    }
                }
                acc
            })
            .collect()
    }

    fn identity(n: usize) -> Self {
        Self {
            matrix: IntMatrix::identity(n),
            offset: vec![BigInt::zero(); n],
        }
    }
}

/// Integer matrix `H` (`r x (m+1)`) with `H * vtilde_i = images[i]` for the
/// homogeneous vectors of `vertices`; extra basis columns are sent to
/// `extra(column)`. `None` when the vertices are not regular or the solution
/// is not integral.
pub(crate) fn homogeneous_solve(
    vertices: &[&RationalPoint],
    images: &[Vec<BigInt>],
    extra: impl Fn(&[BigInt]) -> Vec<BigInt>,
) -> Option<IntMatrix> {
    let cols: Vec<Vec<BigInt>> = vertices
        .iter()
        .map(|p| homogeneous(p).into_entries())
        .collect();
    let basis = extend_to_basis(&IntMatrix::from_columns(&cols))?;
    let d = basis.rows();
    let r = images
        .first()
        .map_or_else(|| extra(&basis.column(0)).len(), Vec::len);
    // image of each basis column
    let mut img = vec![vec![BigInt::zero(); d]; r];
    for j in 0..d {
        let target = if j < images.len() {
            images[j].clone()
        } else {
            extra(&basis.column(j))
        };
        for i in 0..r {
            img[i][j] = target[i].clone();
        }
    }
    let b: Vec<Vec<Rational>> = basis
        .to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(Rational::from_integer).collect())
        .collect();
    let binv = linalg::inverse(&b)?;
    let mut out = IntMatrix::zeros(r, d);
    for i in 0..r {
        for k in 0..d {
            let mut acc = Rational::zero();
            for j in 0..d {
                if !img[i][j].is_zero() {
                    acc += Rational::from_integer(img[i][j].clone()) * &binv[j][k];
                }
            }
            if !acc.is_integer() {
                return None;
            }
            out.set(i, k, acc.to_integer());
        }
    }
    for (v, want) in cols.iter().zip(images) {
        if &out.mul_vec(v) != want {
            return None;
        }
    }
    Some(out)
}

/// Integer affine piece sending each vertex to its image, which must have the
/// same denominator.
pub fn affine_piece(
    vertices: &[&RationalPoint],
    images: &[&RationalPoint],
) -> Result<AffinePiece, MapError> {
    let m = vertices[0].ambient_dim();
    let n = images[0].ambient_dim();
    let mut targets = Vec::new();
    for (v, w) in vertices.iter().zip(images) {
        let (dv, dw) = (den(v), den(w));
        if dv != dw {
            return Err(MapError::DenominatorMismatch {
                vertex: (*v).clone(),
                domain: dv,
                image: dw,
            });
        }
        targets.push(homogeneous(w).into_entries());
    }
    // extra basis vectors go to themselves when dimensions allow, so that a
    // map fixing the vertices of a simplex is the identity piece
    let hat = homogeneous_solve(vertices, &targets, |col| {
        if n == m {
            return col.to_vec();
        }
        let mut t = vec![BigInt::zero(); n + 1];
        t[n] = col[m].clone();
        t
    })
    .ok_or(MapError::NonIntegral(Vec::new()))?;
    // last row must be (0, ..., 0, 1)
    debug_assert!((0..m).all(|j| hat.get(n, j).is_zero()) && hat.get(n, m).is_one());
    let mut matrix = IntMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            matrix.set(i, j, hat.get(i, j).clone());
        }
    }
    let offset = (0..n).map(|i| hat.get(i, m).clone()).collect();
    Ok(AffinePiece { matrix, offset })
}

/// A piecewise affine map with integer pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    domain: RegularComplex,
    codomain_dim: usize,
    pieces: BTreeMap<Vec<usize>, AffinePiece>,
}

impl PLMap {
    /// Assembles a map and checks that pieces agree at shared vertices.
    pub fn new(
        domain: RegularComplex,
        codomain_dim: usize,
        pieces: BTreeMap<Vec<usize>, AffinePiece>,
    ) -> Result<Self, MapError> {
        let keys: BTreeSet<&Vec<usize>> = pieces.keys().collect();
        let expected: BTreeSet<&Vec<usize>> = domain.maximal_simplexes().iter().collect();
        if keys != expected {
            return Err(MapError::Shape);
        }
        for p in pieces.values() {
            if p.matrix.rows() != codomain_dim
                || p.matrix.cols() != domain.ambient_dim()
                || p.offset.len() != codomain_dim
            {
                return Err(MapError::Shape);
            }
        }
        let map = Self {
            domain,
            codomain_dim,
            pieces,
        };
        map.vertex_images()?;
        Ok(map)
    }

    pub fn identity(domain: &RegularComplex) -> Self {
        let n = domain.ambient_dim();
        let pieces = domain
            .maximal_simplexes()
            .iter()
            .map(|s| (s.clone(), AffinePiece::identity(n)))
            .collect();
        Self {
            domain: domain.clone(),
            codomain_dim: n,
            pieces,
        }
    }

    /// The map that is affine on each simplex of `domain` with the given
    /// vertex images (indexed like the domain's vertices).
    pub fn interpolate(
        domain: &RegularComplex,
        images: &[RationalPoint],
    ) -> Result<Self, MapError> {
        let codomain_dim = images
            .first()
            .map_or(domain.ambient_dim(), RationalPoint::ambient_dim);
        let mut pieces = BTreeMap::new();
        for s in domain.maximal_simplexes() {
            let imgs: Vec<&RationalPoint> = s.iter().map(|&i| &images[i]).collect();
            let piece = affine_piece(&domain.points(s), &imgs).map_err(|e| match e {
                MapError::NonIntegral(_) => MapError::NonIntegral(s.clone()),
                other => other,
            })?;
            pieces.insert(s.clone(), piece);
        }
        Ok(Self {
            domain: domain.clone(),
            codomain_dim,
            pieces,
        })
    }

    pub fn domain(&self) -> &RegularComplex {
        &self.domain
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn pieces(&self) -> &BTreeMap<Vec<usize>, AffinePiece> {
        &self.pieces
    }

    /// Image of every domain vertex, checking that all pieces through a
    /// vertex agree there.
    pub fn vertex_images(&self) -> Result<Vec<RationalPoint>, MapError> {
        let mut out: Vec<Option<RationalPoint>> = vec![None; self.domain.vertices().len()];
        for (s, piece) in &self.pieces {
            for &i in s {
                let v = self.domain.vertex(i);
                let img = RationalPoint::new(piece.apply(v.coords()))
                    .map_err(|_| MapError::OutsideDomain(v.clone()))?;
                match &out[i] {
                    Some(prev) if prev != &img => return Err(MapError::Inconsistent(v.clone())),
                    _ => out[i] = Some(img),
                }
            }
        }
        Ok(out
            .into_iter()
            .map(|p| p.expect("every vertex is in a simplex"))
            .collect())
    }

    pub fn apply_point(&self, x: &RationalPoint) -> Result<RationalPoint, MapError> {
        let (s, _) = self
            .domain
            .locate(x)
            .ok_or_else(|| MapError::OutsideDomain(x.clone()))?;
        RationalPoint::new(self.pieces[s].apply(x.coords()))
            .map_err(|_| MapError::OutsideDomain(x.clone()))
    }

    /// `{eta(S)}` for the simplexes of the domain; vertex `i` of the result is
    /// the image of domain vertex `i`.
    pub fn image_complex(&self) -> Result<RegularComplex, MapError> {
        let images = self.vertex_images()?;
        for s in self.domain.maximal_simplexes() {
            let pts: Vec<RationalPoint> = s.iter().map(|&i| images[i].clone()).collect();
            if RationalSimplex::new(pts).is_err() {
                return Err(MapError::DegenerateImage(s.clone()));
            }
        }
        let distinct: BTreeSet<&RationalPoint> = images.iter().collect();
        if distinct.len() != images.len() {
            return Err(MapError::NotInvertible(
                "two vertices share an image".into(),
            ));
        }
        let simplexes: Vec<Vec<usize>> = self.domain.maximal_simplexes().iter().cloned().collect();
        Ok(RegularComplex::new(self.codomain_dim, images, simplexes)?)
    }

    /// The inverse map on the image complex, with integrality verified.
    pub fn invert(&self) -> Result<PLMap, MapError> {
        let image = self.image_complex()?;
        let simplexes: Vec<Vec<usize>> = image.maximal_simplexes().iter().cloned().collect();
        if let Err(RegularError::BadIntersection(a, b, x)) =
            check_intersections(image.vertices(), &simplexes)
        {
            return Err(MapError::NotInvertible(format!(
                "images of {a:?} and {b:?} overlap at {x}"
            )));
        }
        let back: Vec<RationalPoint> = self.domain.vertices().to_vec();
        match PLMap::interpolate(&image, &back) {
            Ok(m) => Ok(m),
            Err(MapError::NonIntegral(s)) => Err(MapError::NonIntegerInverse(s)),
            Err(MapError::DenominatorMismatch { vertex, .. }) => {
                let s = image
                    .maximal_simplexes()
                    .iter()
                    .find(|s| s.iter().any(|&i| image.vertex(i) == &vertex))
                    .cloned()
                    .unwrap_or_default();
                Err(MapError::NonIntegerInverse(s))
            }
            Err(e) => Err(e),
        }
    }

    /// Composite `other . self` evaluated at the domain vertices only.
    pub fn compose_at_vertices(&self, other: &PLMap) -> Result<Vec<RationalPoint>, MapError> {
        self.vertex_images()?
            .iter()
            .map(|p| other.apply_point(p))
            .collect()
    }

    /// Pointwise equality on a common support, checked at all vertices of
    /// both domains (enough when both are affine on a common refinement).
    pub fn agrees_with(&self, other: &PLMap) -> Result<bool, MapError> {
        for v in self.domain.vertices().iter().chain(other.domain.vertices()) {
            if self.apply_point(v)? != other.apply_point(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Carries a combinatorial isomorphism of skeletons to a PL map by
/// barycentric transport, `sum mu_i v_i -> sum mu_i gamma(v_i)`.
pub fn transport(
    lambda: &Realization,
    nabla: &Realization,
    gamma: &VertexMap,
) -> Result<PLMap, MapError> {
    if !lambda.weighted.is_isomorphism(&nabla.weighted, gamma) {
        return Err(MapError::NotIsomorphism(format!(
            "{} vertices against {}",
            lambda.weighted.vertex_count(),
            nabla.weighted.vertex_count()
        )));
    }
    let mut images: Vec<Option<RationalPoint>> = vec![None; lambda.geometric.vertices().len()];
    for (label, &i) in &lambda.map {
        let target = &gamma[label];
        let p = nabla
            .point(target)
            .ok_or_else(|| MapError::NotIsomorphism(format!("{target} is not realized")))?;
        images[i] = Some(p.clone());
    }
    let images: Vec<RationalPoint> = images.into_iter().map(Option::unwrap).collect();
    let eta = PLMap::interpolate(&lambda.geometric, &images)?;
    // faces must land on faces of nabla
    for f in lambda.weighted.maximal_faces() {
        let img: Vec<usize> = f.iter().map(|l| nabla.map[&gamma[l]]).collect();
        let mut img = img;
        img.sort_unstable();
        if !nabla.geometric.maximal_simplexes().contains(&img) {
            return Err(MapError::NotIsomorphism(format!(
                "face {} has no image simplex",
                show_face(f)
            )));
        }
    }
    Ok(eta)
}

/// Something piecewise affine over a regular complex, determined by its
/// values at the vertices.
pub trait VertexValued {
    fn carrier(&self) -> &RegularComplex;
    fn value_dim(&self) -> usize;
    fn vertex_value(&self, i: usize) -> Vec<Rational>;

    /// Barycentric interpolation on a simplex containing `x`.
    fn value_at(&self, x: &RationalPoint) -> Option<Vec<Rational>> {
        let (s, mu) = self.carrier().locate(x)?;
        let mut out = vec![Rational::zero(); self.value_dim()];
        for (&i, m) in s.iter().zip(&mu) {
            for (o, v) in out.iter_mut().zip(self.vertex_value(i)) {
                *o += m * v;
            }
        }
        Some(out)
    }
}

impl VertexValued for PLMap {
    fn carrier(&self) -> &RegularComplex {
        &self.domain
    }

    fn value_dim(&self) -> usize {
        self.codomain_dim
    }

    fn vertex_value(&self, i: usize) -> Vec<Rational> {
        let s = self
            .domain
            .maximal_simplexes()
            .iter()
            .find(|s| s.contains(&i))
            .expect("vertex lies in a simplex");
        self.pieces[s].apply(self.domain.vertex(i).coords())
    }
}

/// Result of a bounded refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    Done {
        complex: RegularComplex,
        blowups: usize,
    },
    Unknown {
        blowups: usize,
    },
}

impl Refinement {
    pub fn complex(&self) -> Option<&RegularComplex> {
        match self {
            Refinement::Done { complex, .. } => Some(complex),
            Refinement::Unknown { .. } => None,
        }
    }
}

/// Is `f` affine on `conv(t)`? Decided exactly: `t` inside one carrier
/// simplex is affine; otherwise, for every carrier simplex `s` meeting `t`,
/// the difference between `f` on `s` and the interpolation on `t` must
/// vanish on `s ∩ t`, which is tested by maximizing and minimizing each
/// coordinate of the difference with a linear program.
pub fn affine_on<F: VertexValued + ?Sized>(f: &F, t: &[RationalPoint]) -> bool {
    let carrier = f.carrier();
    let t_refs: Vec<&RationalPoint> = t.iter().collect();
    let holder = carrier.maximal_simplexes().iter().find(|s| {
        t_refs
            .iter()
            .all(|p| locate_in_simplex(&carrier.points(s), p).is_some())
    });
    if holder.is_some() {
        return true;
    }
    let t_vals: Vec<Vec<Rational>> = t
        .iter()
        .map(|p| f.value_at(p).expect("vertex inside carrier"))
        .collect();
    let n = carrier.ambient_dim();
    for s in carrier.maximal_simplexes() {
        let s_pts = carrier.points(s);
        let (ls, lt) = (s.len(), t.len());
        // variables: lambda over t, mu over s
        let mut a = vec![vec![Rational::zero(); lt + ls]; n + 2];
        for (j, p) in t.iter().enumerate() {
            for i in 0..n {
                a[i][j] = p.coords()[i].clone();
            }
            a[n][j] = Rational::one();
        }
        for (j, p) in s_pts.iter().enumerate() {
            for i in 0..n {
                a[i][lt + j] = -p.coords()[i].clone();
            }
            a[n + 1][lt + j] = Rational::one();
        }
        let mut b = vec![Rational::zero(); n + 2];
        b[n] = Rational::one();
        b[n + 1] = Rational::one();
        for k in 0..f.value_dim() {
            let mut c: Vec<Rational> = t_vals.iter().map(|v| -v[k].clone()).collect();
            c.extend(s.iter().map(|&i| f.vertex_value(i)[k].clone()));
            for sign in [1, -1] {
                let cc: Vec<Rational> = c
                    .iter()
                    .map(|x| if sign == 1 { x.clone() } else { -x.clone() })
                    .collect();
                match lp::maximize(&a, &b, &cc) {
                    LpOutcome::Infeasible => break,
                    LpOutcome::Optimal { value, .. } if value.is_zero() => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

/// Refines `delta` by binary Farey blow-ups until `f` is affine on every
/// simplex. Splits first an edge whose mediant value departs from the
/// interpolation of its endpoints, then an edge with a carrier vertex in its
/// relative interior, then the longest edge.
pub fn linearize_values<F: VertexValued + ?Sized>(
    delta: &RegularComplex,
    f: &F,
    max_blowups: usize,
) -> Refinement {
    let mut current = delta.clone();
    let mut blowups = 0;
    let mut known: BTreeSet<Vec<RationalPoint>> = BTreeSet::new();
    loop {
        let bad = current.maximal_simplexes().iter().find(|s| {
            let pts: Vec<RationalPoint> = current.points(s).into_iter().cloned().collect();
            if known.contains(&pts) {
                return false;
            }
            if affine_on(f, &pts) {
                known.insert(pts);
                false
            } else {
                true
            }
        });
        let Some(s) = bad.cloned() else {
            return Refinement::Done {
                complex: current,
                blowups,
            };
        };
        if blowups >= max_blowups {
            return Refinement::Unknown { blowups };
        }
        let (i, j) = choose_split(&current, &s, f);
        current = current.blow_up_edge(i, j).expect("edge of the complex").0;
        blowups += 1;
    }
}

fn choose_split<F: VertexValued + ?Sized>(
    c: &RegularComplex,
    s: &[usize],
    f: &F,
) -> (usize, usize) {
    let mut pairs = Vec::new();
    for (k, &a) in s.iter().enumerate() {
        for &b in &s[k + 1..] {
            pairs.push((a, b));
        }
    }
    for &(a, b) in &pairs {
        let (pa, pb) = (c.vertex(a), c.vertex(b));
        let m = mediant(pa, pb);
        let (da, db) = (
            Rational::from_integer(den(pa)),
            Rational::from_integer(den(pb)),
        );
        let total = &da + &db;
        let (Some(fa), Some(fb), Some(fm)) = (f.value_at(pa), f.value_at(pb), f.value_at(&m))
        else {
            continue;
        };
        let interp: Vec<Rational> = fa
            .iter()
            .zip(&fb)
            .map(|(x, y)| (x * &da + y * &db) / &total)
            .collect();
        if interp != fm {
            return (a, b);
        }
    }
    let carrier = f.carrier();
    for &(a, b) in &pairs {
        let e = [c.vertex(a), c.vertex(b)];
        if carrier
            .vertices()
            .iter()
            .any(|v| v != e[0] && v != e[1] && locate_in_simplex(&e, v).is_some())
        {
            return (a, b);
        }
    }
    *pairs
        .iter()
        .max_by(|x, y| {
            c.vertex(x.0)
                .dist2(c.vertex(x.1))
                .cmp(&c.vertex(y.0).dist2(c.vertex(y.1)))
                .then(y.cmp(x))
        })
        .expect("simplex with an edge")
}

/// A Farey refinement of `delta` on which `eta` is affine per simplex.
pub fn linearize(
    delta: &RegularComplex,
    eta: &PLMap,
    max_blowups: usize,
) -> Result<Refinement, MapError> {
    if let Containment::No(x) = supports_equal(delta, eta.domain(), max_blowups) {
        return Err(MapError::SupportMismatch(x));
    }
    Ok(linearize_values(delta, eta, max_blowups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Label, WeightedComplex};
    use crate::exactgeom::{is_regular, rational as q};
    use crate::regular::{canonical_realization, VertexOrder};

    fn pt(pairs: &[(i64, i64)]) -> RationalPoint {
        RationalPoint::from_ratios(pairs).unwrap()
    }

    fn line(points: &[(i64, i64)], simplexes: &[&[usize]]) -> RegularComplex {
        RegularComplex::new(
            1,
            points.iter().map(|&p| pt(&[p])).collect(),
            simplexes.iter().map(|s| s.to_vec()),
        )
        .unwrap()
    }

    fn ints(m: &IntMatrix) -> Vec<Vec<i64>> {
        m.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    }

    fn reflect_halves() -> PLMap {
        let halves = line(&[(0, 1), (1, 2), (1, 1)], &[&[0, 1], &[1, 2]]);
        PLMap::interpolate(&halves, &[pt(&[(1, 1)]), pt(&[(1, 2)]), pt(&[(0, 1)])]).unwrap()
    }

    #[test]
    fn segment_to_diagonal() {
        let unit = RegularComplex::unit_interval().skeleton_realization();
        let seg = WeightedComplex::simplex(&["0", "1"], 1);
        let diag = canonical_realization(&seg, &VertexOrder::Lex).unwrap();
        // unit interval labels _v0 -> 0 sits at 0, _v1 at 1; send 0 to e_2, 1 to e_1
        let gamma: VertexMap = [("_v0", "1"), ("_v1", "0")]
            .iter()
            .map(|&(a, b)| (Label::from(a), Label::from(b)))
            .collect();
        let eta = transport(&unit, &diag, &gamma).unwrap();
        let piece = &eta.pieces()[&vec![0, 1]];
        assert_eq!(ints(&piece.matrix), vec![vec![1], vec![-1]]);
        assert_eq!(piece.offset, vec![BigInt::from(0), BigInt::from(1)]);
        assert_eq!(
            eta.apply_point(&pt(&[(1, 2)])).unwrap(),
            pt(&[(1, 2), (1, 2)])
        );
        let image = eta.image_complex().unwrap();
        for s in image.maximal_simplexes() {
            assert!(is_regular(&image.simplex(s)));
        }
    }

    #[test]
    fn identity_transport() {
        let w =
            WeightedComplex::build(&[("a", 1), ("b", 2), ("c", 1)], &[&["a", "b"], &["b", "c"]]);
        let r = canonical_realization(&w, &VertexOrder::Lex).unwrap();
        let gamma: VertexMap = w.vertices().map(|l| (l.clone(), l.clone())).collect();
        let eta = transport(&r, &r, &gamma).unwrap();
        assert_eq!(eta, PLMap::identity(&r.geometric));
        assert_eq!(eta.invert().unwrap(), eta);
    }

    #[test]
    fn reflection() {
        let eta = reflect_halves();
        for piece in eta.pieces().values() {
            assert_eq!(ints(&piece.matrix), vec![vec![-1]]);
            assert_eq!(piece.offset, vec![BigInt::from(1)]);
        }
        assert_eq!(eta.apply_point(&pt(&[(1, 3)])).unwrap(), pt(&[(2, 3)]));
        let image = eta.image_complex().unwrap();
        assert_eq!(image.vertices()[0], pt(&[(1, 1)]));
        let inv = eta.invert().unwrap();
        assert!(inv.agrees_with(&eta).unwrap());
        let twice = inv.invert().unwrap();
        assert!(twice.agrees_with(&eta).unwrap());
    }

    #[test]
    fn transported_inverse_is_transport_of_inverse() {
        let w =
            WeightedComplex::build(&[("a", 1), ("b", 2), ("c", 1)], &[&["a", "b"], &["b", "c"]]);
        let r1 = canonical_realization(&w, &VertexOrder::Lex).unwrap();
        let r2 = canonical_realization(
            &w,
            &VertexOrder::Explicit(vec!["c".into(), "a".into(), "b".into()]),
        )
        .unwrap();
        let id: VertexMap = w.vertices().map(|l| (l.clone(), l.clone())).collect();
        let eta = transport(&r1, &r2, &id).unwrap();
        let back = transport(&r2, &r1, &id).unwrap();
        let inv = eta.invert().unwrap();
        assert!(inv.agrees_with(&back).unwrap());
        for (label, p) in r1.map.iter().map(|(l, &i)| (l, r1.geometric.vertex(i))) {
            assert_eq!(&eta.apply_point(p).unwrap(), r2.point(label).unwrap());
        }
    }

    #[test]
    fn transport_errors() {
        let w = WeightedComplex::build(&[("a", 1), ("b", 2)], &[&["a", "b"]]);
        let v = WeightedComplex::build(&[("a", 2), ("b", 1)], &[&["a", "b"]]);
        let r = canonical_realization(&w, &VertexOrder::Lex).unwrap();
        let s = canonical_realization(&v, &VertexOrder::Lex).unwrap();
        let id: VertexMap = w.vertices().map(|l| (l.clone(), l.clone())).collect();
        assert!(matches!(
            transport(&r, &s, &id),
            Err(MapError::NotIsomorphism(_))
        ));
        let halves = line(&[(0, 1), (1, 2), (1, 1)], &[&[0, 1], &[1, 2]]);
        let err = PLMap::interpolate(&halves, &[pt(&[(0, 1)]), pt(&[(1, 3)]), pt(&[(1, 1)])])
            .unwrap_err();
        assert!(matches!(err, MapError::DenominatorMismatch { .. }));
        assert!(matches!(
            reflect_halves().apply_point(&pt(&[(1, 1)])),
            Ok(_)
        ));
        let half = line(&[(0, 1), (1, 2)], &[&[0, 1]]);
        let id = PLMap::identity(&half);
        assert!(matches!(
            id.apply_point(&pt(&[(2, 3)])),
            Err(MapError::OutsideDomain(_))
        ));
    }

    #[test]
    fn linearize_examples() {
        let unit = RegularComplex::unit_interval();
        let id = PLMap::identity(&unit);
        assert_eq!(linearize(&unit, &id, 64).unwrap().complex(), Some(&unit));

        // identity on the halves complex is still affine on [0,1]
        let halves = line(&[(0, 1), (1, 2), (1, 1)], &[&[0, 1], &[1, 2]]);
        assert_eq!(
            linearize(&unit, &PLMap::identity(&halves), 64)
                .unwrap()
                .complex(),
            Some(&unit)
        );

        // tent map: breakpoint at 1/2 reached by one blow-up
        let tent =
            PLMap::interpolate(&halves, &[pt(&[(0, 1)]), pt(&[(1, 2)]), pt(&[(0, 1)])]).unwrap();
        assert!(linearize(&unit, &tent, 64)
            .unwrap()
            .complex()
            .unwrap()
            .same_simplexes(&halves));
        let halves_folded =
            PLMap::interpolate(&halves, &[pt(&[(1, 1)]), pt(&[(1, 2)]), pt(&[(1, 1)])]).unwrap();
        match linearize(&unit, &halves_folded, 64).unwrap() {
            Refinement::Done { complex, blowups } => {
                assert_eq!(blowups, 1);
                assert_eq!(complex.vertices().len(), 3);
            }
            other => panic!("{other:?}"),
        }

        // breakpoint at 1/3
        let thirds = line(
            &[(0, 1), (1, 3), (1, 2), (1, 1)],
            &[&[0, 1], &[1, 2], &[2, 3]],
        );
        let bent = PLMap::interpolate(
            &thirds,
            &[pt(&[(0, 1)]), pt(&[(2, 3)]), pt(&[(1, 2)]), pt(&[(0, 1)])],
        )
        .unwrap();
        let got = linearize(&unit, &bent, 64).unwrap();
        let c = got.complex().unwrap();
        let mut xs: Vec<Rational> = c.vertices().iter().map(|p| p.coords()[0].clone()).collect();
        xs.sort();
        assert_eq!(xs, vec![q(0, 1), q(1, 3), q(1, 2), q(1, 1)]);
        assert_eq!(
            linearize(&unit, &bent, 1).unwrap(),
            Refinement::Unknown { blowups: 1 }
        );
    }
}
