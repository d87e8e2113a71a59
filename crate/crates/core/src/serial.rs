//! JSON forms of the library's values.
//!
//! Rationals are `"p/q"` strings, points are arrays of them. Integers are
//! JSON numbers when they fit in 64 bits and decimal strings otherwise.
//! Reading goes through plain data structs and then through the ordinary
//! validating constructors, so a file can never smuggle in an invalid value.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::classify::{
    EquivalenceStatus, EquivalenceVerdict, Invariant, PropertyReport, PropertyResult, Status,
    Witness,
};
use crate::complex::{ComplexError, Face, Label, StellarStep, WeightedComplex};
use crate::exactgeom::{format_rational, parse_rational, GeomError, IntMatrix, RationalPoint};
use crate::mcnfun::{FuncError, PLFunc};
use crate::regular::{Realization, RegularComplex, RegularError, TailKind};
use crate::sequences::{Family, Provider, SequenceError, StellarSequence};
use crate::zhomeo::{AffinePiece, MapError, PLMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerialError {
    /// Malformed JSON or a shape error, with the JSON path and position.
    #[error("{0}")]
    Json(String),
    #[error("bad integer {0:?}")]
    BadInteger(String),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Regular(#[from] RegularError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Parses `text` as `T`, reporting the JSON path of the first failure.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, SerialError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SerialError::Json(format!(
            "at {path} (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum JsonInt {
    Num(i64),
    Text(String),
}

impl JsonInt {
    pub fn from_big(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(x) => JsonInt::Num(x),
            None => JsonInt::Text(n.to_string()),
        }
    }

    pub fn to_big(&self) -> Result<BigInt, SerialError> {
        match self {
            JsonInt::Num(x) => Ok(BigInt::from(*x)),
            JsonInt::Text(s) => {
                BigInt::from_str(s.trim()).map_err(|_| SerialError::BadInteger(s.clone()))
            }
        }
    }

    fn to_biguint(&self) -> Result<BigUint, SerialError> {
        self.to_big()?
            .to_biguint()
            .ok_or_else(|| SerialError::BadInteger(format!("{self:?} is negative")))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct VertexDto {
    pub label: String,
    pub weight: JsonInt,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WeightedComplexDto {
    pub vertices: Vec<VertexDto>,
    pub maximal_faces: Vec<Vec<String>>,
}

impl WeightedComplexDto {
    pub fn from_complex(w: &WeightedComplex) -> Self {
        Self {
            vertices: w
                .weighted_vertices()
                .map(|(l, n)| VertexDto {
                    label: l.to_string(),
                    weight: JsonInt::from_big(&BigInt::from(n.clone())),
                })
                .collect(),
            maximal_faces: w
                .maximal_faces()
                .iter()
                .map(|f| f.iter().map(Label::to_string).collect())
                .collect(),
        }
    }

    /// Validated; every violation is reported at once.
    pub fn to_complex(&self) -> Result<WeightedComplex, SerialError> {
        let weights = self
            .vertices
            .iter()
            .map(|v| Ok((Label::new(v.label.clone()), v.weight.to_biguint()?)))
            .collect::<Result<Vec<_>, SerialError>>()?;
        let faces = self
            .maximal_faces
            .iter()
            .map(|f| f.iter().map(|l| Label::new(l.clone())).collect::<Face>());
        Ok(WeightedComplex::try_new(weights, faces)?)
    }

    /// Unvalidated, so that violations can be listed by the caller.
    pub fn to_complex_unchecked(&self) -> Result<WeightedComplex, SerialError> {
        let weights = self
            .vertices
            .iter()
            .map(|v| Ok((Label::new(v.label.clone()), v.weight.to_biguint()?)))
            .collect::<Result<Vec<_>, SerialError>>()?;
        let faces = self
            .maximal_faces
            .iter()
            .map(|f| f.iter().map(|l| Label::new(l.clone())).collect::<Face>());
        Ok(WeightedComplex::from_parts(weights, faces))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum StepDto {
    Id,
    Delete { face: Vec<String> },
    Subdivide { edge: [String; 2], new: String },
}

impl StepDto {
    pub fn from_step(s: &StellarStep) -> Self {
        match s {
            StellarStep::Identity => StepDto::Id,
            StellarStep::DeleteMaximal(f) => StepDto::Delete {
                face: f.iter().map(Label::to_string).collect(),
            },
            StellarStep::Subdivide { edge, new_label } => StepDto::Subdivide {
                edge: [edge.0.to_string(), edge.1.to_string()],
                new: new_label.to_string(),
            },
        }
    }

    pub fn to_step(&self) -> StellarStep {
        match self {
            StepDto::Id => StellarStep::Identity,
            StepDto::Delete { face } => StellarStep::delete(face.iter().map(String::as_str)),
            StepDto::Subdivide { edge, new } => {
                StellarStep::subdivide(edge[0].as_str(), edge[1].as_str(), new.as_str())
            }
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RegularComplexDto {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<String>>,
    pub maximal_simplexes: Vec<Vec<usize>>,
}

pub fn point_strings(p: &RationalPoint) -> Vec<String> {
    p.coords().iter().map(format_rational).collect()
}

pub fn parse_point(coords: &[String]) -> Result<RationalPoint, SerialError> {
    let qs = coords
        .iter()
        .map(|c| parse_rational(c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalPoint::new(qs)?)
}

impl RegularComplexDto {
    pub fn from_complex(c: &RegularComplex) -> Self {
        Self {
            ambient_dim: c.ambient_dim(),
            vertices: c.vertices().iter().map(point_strings).collect(),
            maximal_simplexes: c.maximal_simplexes().iter().cloned().collect(),
        }
    }

    /// Validated including the exact pairwise intersection check.
    pub fn to_complex(&self) -> Result<RegularComplex, SerialError> {
        let pts = self
            .vertices
            .iter()
            .map(|v| parse_point(v))
            .collect::<Result<Vec<_>, _>>()?;
        let mut c = RegularComplex::new(self.ambient_dim, pts, self.maximal_simplexes.clone())?;
        c.validate_geometric()?;
        Ok(c)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RealizationDto {
    pub weighted: WeightedComplexDto,
    pub complex: RegularComplexDto,
    pub map: BTreeMap<String, usize>,
}

impl RealizationDto {
    pub fn from_realization(r: &Realization) -> Self {
        Self {
            weighted: WeightedComplexDto::from_complex(&r.weighted),
            complex: RegularComplexDto::from_complex(&r.geometric),
            map: r.map.iter().map(|(l, &i)| (l.to_string(), i)).collect(),
        }
    }

    pub fn to_realization(&self) -> Result<Realization, SerialError> {
        let map = self
            .map
            .iter()
            .map(|(l, &i)| (Label::new(l.clone()), i))
            .collect();
        Ok(Realization::new(
            self.weighted.to_complex()?,
            self.complex.to_complex()?,
            map,
        )?)
    }
}

/// Continued-fraction digits, or the name of a built-in irrational.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum CfDto {
    Digits(Vec<u64>),
    Named(String),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProviderDto {
    /// `finite` or `family`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cf: Option<CfDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<RegularComplexDto>,
}

impl ProviderDto {
    fn family(name: &str) -> Self {
        Self {
            kind: "family".into(),
            steps: None,
            name: Some(name.into()),
            cf: None,
            n: None,
            weights: None,
            complex: None,
        }
    }

    pub fn to_family(&self) -> Result<Family, SerialError> {
        let name = self
            .name
            .as_deref()
            .ok_or_else(|| SerialError::Unsupported("family provider without a name".into()))?;
        let missing =
            |field: &str| SerialError::Unsupported(format!("family {name} needs \"{field}\""));
        let f = match name {
            "constant" => Family::Constant,
            "lex-z2" => Family::LexZ2 {
                n: self.n.ok_or_else(|| missing("n"))?,
            },
            "effros-shen" => {
                let cf = match self.cf.as_ref().ok_or_else(|| missing("cf"))? {
                    CfDto::Digits(d) => d.clone(),
                    CfDto::Named(s) => Family::named_cf(s).ok_or_else(|| {
                        SerialError::Unsupported(format!("unknown irrational {s:?}"))
                    })?,
                };
                Family::EffrosShen { cf }
            }
            "simplicial" => {
                Family::SimplicialWeights(self.weights.clone().ok_or_else(|| missing("weights"))?)
            }
            "skeleton-constant" => Family::SkeletonConstant(
                self.complex
                    .as_ref()
                    .ok_or_else(|| missing("complex"))?
                    .to_complex()?,
            ),
            other => {
                return Err(SerialError::Unsupported(format!(
                    "unknown family {other:?}"
                )))
            }
        };
        f.validate()?;
        Ok(f)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SequenceDto {
    /// Optional for families that fix their own initial complex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<WeightedComplexDto>,
    pub provider: ProviderDto,
    /// Informational steps of an infinite family; re-checked on reading.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<Vec<StepDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationDto>,
}

impl SequenceDto {
    pub fn from_sequence(s: &StellarSequence, prefix: usize) -> Result<Self, SerialError> {
        let provider = match &s.provider {
            Provider::Finite(steps) => ProviderDto {
                kind: "finite".into(),
                steps: Some(steps.iter().map(StepDto::from_step).collect()),
                ..ProviderDto::family("")
            },
            Provider::Family(f) => {
                let mut p = ProviderDto::family(f.name());
                match f {
                    Family::LexZ2 { n } => p.n = Some(*n),
                    Family::EffrosShen { cf } => p.cf = Some(CfDto::Digits(cf.clone())),
                    Family::SimplicialWeights(w) => p.weights = Some(w.clone()),
                    Family::SkeletonConstant(d) => {
                        p.complex = Some(RegularComplexDto::from_complex(d))
                    }
                    Family::Constant => {}
                }
                p
            }
            Provider::Custom(_) => {
                return Err(SerialError::Unsupported(
                    "custom step providers have no file form".into(),
                ))
            }
        };
        let prefix = match (&s.provider, prefix) {
            (Provider::Family(_), n) if n > 0 => {
                Some(s.prefix(n)?.iter().map(StepDto::from_step).collect())
            }
            _ => None,
        };
        Ok(Self {
            initial: Some(WeightedComplexDto::from_complex(&s.initial)),
            provider,
            prefix,
            realization: s.realization.as_ref().map(RealizationDto::from_realization),
        })
    }

    pub fn to_sequence(&self) -> Result<StellarSequence, SerialError> {
        let initial = self
            .initial
            .as_ref()
            .map(WeightedComplexDto::to_complex)
            .transpose()?;
        let seq = match self.provider.kind.as_str() {
            "finite" => {
                let steps = self
                    .provider
                    .steps
                    .as_ref()
                    .map_or(Vec::new(), |s| s.iter().map(StepDto::to_step).collect());
                let initial = initial.ok_or_else(|| {
                    SerialError::Unsupported("finite sequence without \"initial\"".into())
                })?;
                StellarSequence::finite(initial, steps)?
            }
            "family" => match self.provider.to_family()? {
                Family::Constant => StellarSequence::constant(initial.ok_or_else(|| {
                    SerialError::Unsupported("constant family without \"initial\"".into())
                })?)?,
                f => {
                    let seq = StellarSequence::family(f)?;
                    if let Some(w) = initial {
                        if w != seq.initial {
                            return Err(SerialError::Unsupported(
                                "\"initial\" differs from the family's".into(),
                            ));
                        }
                    }
                    seq
                }
            },
            other => {
                return Err(SerialError::Unsupported(format!(
                    "unknown provider kind {other:?}"
                )))
            }
        };
        if let Some(prefix) = &self.prefix {
            let expected = seq.prefix(prefix.len())?;
            let given: Vec<StellarStep> = prefix.iter().map(StepDto::to_step).collect();
            if let Some(k) = expected.iter().zip(&given).position(|(a, b)| a != b) {
                return Err(SerialError::Unsupported(format!(
                    "prefix step {} does not match the family",
                    k + 1
                )));
            }
        }
        match &self.realization {
            Some(r) => Ok(seq.with_realization(r.to_realization()?)?),
            None => Ok(seq),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PieceDto {
    pub simplex: Vec<usize>,
    pub matrix: Vec<Vec<JsonInt>>,
    pub offset: Vec<JsonInt>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PLMapDto {
    pub domain: RegularComplexDto,
    pub codomain_dim: usize,
    pub pieces: Vec<PieceDto>,
}

impl PLMapDto {
    pub fn from_map(m: &PLMap) -> Self {
        Self {
            domain: RegularComplexDto::from_complex(m.domain()),
            codomain_dim: m.codomain_dim(),
            pieces: m
                .pieces()
                .iter()
                .map(|(s, p)| PieceDto {
                    simplex: s.clone(),
                    matrix: p
                        .matrix
                        .to_rows()
                        .iter()
                        .map(|r| r.iter().map(JsonInt::from_big).collect())
                        .collect(),
                    offset: p.offset.iter().map(JsonInt::from_big).collect(),
                })
                .collect(),
        }
    }

    pub fn to_map(&self) -> Result<PLMap, SerialError> {
        let domain = self.domain.to_complex()?;
        let mut pieces = BTreeMap::new();
        for p in &self.pieces {
            let rows = p
                .matrix
                .iter()
                .map(|r| r.iter().map(JsonInt::to_big).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            if rows.iter().any(|r| r.len() != domain.ambient_dim()) {
                return Err(MapError::Shape.into());
            }
            let matrix = if rows.is_empty() {
                IntMatrix::zeros(0, domain.ambient_dim())
            } else {
                IntMatrix::from_rows(rows)
            };
            let offset = p
                .offset
                .iter()
                .map(JsonInt::to_big)
                .collect::<Result<Vec<_>, _>>()?;
            let mut simplex = p.simplex.clone();
            simplex.sort_unstable();
            pieces.insert(simplex, AffinePiece { matrix, offset });
        }
        Ok(PLMap::new(domain, self.codomain_dim, pieces)?)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PLFuncDto {
    pub carrier: RegularComplexDto,
    pub values: Vec<String>,
}

impl PLFuncDto {
    pub fn from_func(f: &PLFunc) -> Self {
        Self {
            carrier: RegularComplexDto::from_complex(f.carrier()),
            values: f.values().iter().map(format_rational).collect(),
        }
    }

    pub fn to_func(&self) -> Result<PLFunc, SerialError> {
        let values = self
            .values
            .iter()
            .map(|v| parse_rational(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PLFunc::new(self.carrier.to_complex()?, values)?)
    }
}

/// A function file: an l-group term over the unit cube of dimension `dim`,
/// or an explicit function.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum FunctionDto {
    Term { term: String, dim: usize },
    Func(PLFuncDto),
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Yes => "Yes",
        Status::No => "No",
        Status::Unknown => "Unknown",
    }
}

pub fn tail_json(t: TailKind) -> Value {
    match t {
        TailKind::EventuallyConstant(k) => json!({"kind": "eventually-constant", "index": k}),
        TailKind::Open => json!({"kind": "open"}),
    }
}

pub fn complex_json(c: &RegularComplex) -> Value {
    serde_json::to_value(RegularComplexDto::from_complex(c)).expect("plain data")
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::None => Value::Null,
        Witness::Index(k) => json!({"tail_index": k}),
        Witness::Face(f) => json!({"face": f.iter().map(Label::to_string).collect::<Vec<_>>()}),
        Witness::Points(ps) => json!({"points": ps.iter().map(point_strings).collect::<Vec<_>>()}),
        Witness::Polyhedron(p) => json!({"polyhedron": complex_json(p)}),
        Witness::CoveringPair(p, q) => json!({"covering_pair": [complex_json(p), complex_json(q)]}),
        Witness::Family(s) => json!({"family": s}),
    }
}

fn property_json(p: &PropertyResult) -> Value {
    json!({
        "status": status_str(p.status),
        "certificate_kind": p.certificate.as_str(),
        "witness": witness_json(&p.witness),
    })
}

pub fn report_json(r: &PropertyReport) -> Value {
    let mut props = serde_json::Map::new();
    for (name, p) in r.entries() {
        props.insert(name.to_string(), property_json(p));
    }
    json!({"tail": tail_json(r.tail), "depth": r.depth, "properties": props})
}

pub fn invariant_json(i: &Invariant) -> Value {
    let dens = |v: &[BigUint]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    match i {
        Invariant::Dimension(a, b) => json!({"invariant": "dimension", "values": [a, b]}),
        Invariant::Components(a, b) => json!({"invariant": "components", "values": [a, b]}),
        Invariant::EulerCharacteristic(a, b) => {
            json!({"invariant": "euler-characteristic", "values": [a, b]})
        }
        Invariant::IsolatedDenominators(a, b) => {
            json!({"invariant": "isolated-denominators", "values": [dens(a), dens(b)]})
        }
    }
}

pub fn verdict_json(v: &EquivalenceVerdict) -> Value {
    let (status, depth, witness) = match &v.status {
        EquivalenceStatus::Certified => ("Certified", Value::Null, Value::Null),
        EquivalenceStatus::ConsistentToDepth(d) => ("ConsistentToDepth", json!(d), Value::Null),
        EquivalenceStatus::Refuted(i) => ("Refuted", Value::Null, invariant_json(i)),
    };
    json!({
        "status": status,
        "depth": depth,
        "witness": witness,
        "pivot": v.pivot.map(|(a, b)| json!({"a_index": a, "b_index": b})),
        "gamma": v.gamma.as_ref().map(|g| g.iter().map(|(k, x)| (k.to_string(), json!(x.to_string()))).collect::<serde_json::Map<_, _>>()),
        "transport": v.transport.as_ref().map(|m| serde_json::to_value(PLMapDto::from_map(m)).expect("plain data")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::{canonical_realization, VertexOrder};

    #[test]
    fn weighted_round_trip() {
        let w = WeightedComplex::build(&[("a", 2), ("b", 3), ("c", 1)], &[&["a", "b"], &["c"]]);
        let text = serde_json::to_string(&WeightedComplexDto::from_complex(&w)).unwrap();
        let back: WeightedComplexDto = parse(&text).unwrap();
        assert_eq!(back.to_complex().unwrap(), w);
    }

    #[test]
    fn errors_carry_paths() {
        let err = parse::<WeightedComplexDto>(
            r#"{"vertices":[{"label":"a","weight":1,"x":2}],"maximal_faces":[]}"#,
        )
        .unwrap_err();
        let SerialError::Json(msg) = err else {
            panic!()
        };
        assert!(msg.contains("vertices[0]"), "{msg}");
        let dto: WeightedComplexDto =
            parse(r#"{"vertices":[{"label":"a","weight":1}],"maximal_faces":[]}"#).unwrap();
        assert!(matches!(
            dto.to_complex(),
            Err(SerialError::Complex(ComplexError::Invalid(_)))
        ));
    }

    #[test]
    fn big_weights_are_strings() {
        let n = BigInt::from(u64::MAX) * 3;
        let j = JsonInt::from_big(&n);
        assert!(matches!(j, JsonInt::Text(_)));
        assert_eq!(j.to_big().unwrap(), n);
    }

    #[test]
    fn sequences_round_trip() {
        let es = StellarSequence::family(Family::EffrosShen { cf: vec![1, 2] }).unwrap();
        let dto = SequenceDto::from_sequence(&es, 6).unwrap();
        let text = serde_json::to_string(&dto).unwrap();
        let back = parse::<SequenceDto>(&text).unwrap().to_sequence().unwrap();
        assert_eq!(back, es);

        let named: SequenceDto =
            parse(r#"{"provider":{"kind":"family","name":"effros-shen","cf":"golden"}}"#).unwrap();
        assert_eq!(
            named.to_sequence().unwrap().provider,
            Provider::Family(Family::EffrosShen { cf: vec![1] })
        );

        let w = WeightedComplex::simplex(&["x", "y"], 2);
        let fin = StellarSequence::finite(w.clone(), vec![StellarStep::subdivide("x", "y", "m")])
            .unwrap()
            .with_realization(canonical_realization(&w, &VertexOrder::Given).unwrap())
            .unwrap();
        let text = serde_json::to_string(&SequenceDto::from_sequence(&fin, 0).unwrap()).unwrap();
        assert_eq!(
            parse::<SequenceDto>(&text).unwrap().to_sequence().unwrap(),
            fin
        );

        let mut tampered = dto.clone();
        tampered.prefix.as_mut().unwrap()[1] = StepDto::Id;
        assert!(tampered.to_sequence().is_err());
    }

    #[test]
    fn maps_and_functions_round_trip() {
        let c = RegularComplex::unit_cube(2);
        let m = PLMap::identity(&c);
        let text = serde_json::to_string(&PLMapDto::from_map(&m)).unwrap();
        assert_eq!(parse::<PLMapDto>(&text).unwrap().to_map().unwrap(), m);

        let f = PLFunc::projection(&c, 1);
        let text = serde_json::to_string(&PLFuncDto::from_func(&f)).unwrap();
        assert_eq!(parse::<PLFuncDto>(&text).unwrap().to_func().unwrap(), f);

        let t: FunctionDto = parse(r#"{"term":"p1 ^ (1 - p1)","dim":1}"#).unwrap();
        assert!(matches!(t, FunctionDto::Term { dim: 1, .. }));
    }
}
