use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite discrete space: an ordered list of distinct point labels.
#[derive(Debug)]
pub struct FiniteSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl FiniteSpace {
    pub fn new<I, S>(points: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::invalid(format!("points[{i}]"), format!("duplicate label `{p}`")));
            }
        }
        Ok(Arc::new(Self { points, index }))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn labels_of(&self, indices: &[usize]) -> Vec<String> {
        indices.iter().map(|&i| self.points[i].clone()).collect()
    }
}

/// A nonnegative function on a finite space.
#[derive(Clone, Debug)]
pub struct ConeFunction {
    space: Arc<FiniteSpace>,
    values: Vec<f64>,
}

impl PartialEq for ConeFunction {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.values == other.values
    }
}

impl ConeFunction {
    pub fn new(space: Arc<FiniteSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::DimensionMismatch {
                left: space.len(),
                right: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                format!("values[{i}]"),
                format!("expected a finite nonnegative number, got {}", values[i]),
            ));
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(space: Arc<FiniteSpace>, f: impl Fn(usize, &str) -> f64) -> Result<Self> {
        let values = space.points().iter().enumerate().map(|(i, p)| f(i, p)).collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FiniteSpace> {
        self.space.clone()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, label: &str) -> Result<f64> {
        Ok(self.values[self.space.index_of(label)?])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn powf(&self, p: f64) -> Result<Self> {
        Self::new(self.space.clone(), self.values.iter().map(|v| v.powf(p)).collect())
    }

    /// `sup |f - g|`, for functions on the same space.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::invalid("other", "functions live on different spaces"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Named cone functions on one space.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    space: Arc<FiniteSpace>,
    names: Vec<String>,
    members: Vec<ConeFunction>,
    strict: bool,
}

impl FunctionFamily {
    /// Builds a family; the strict flag is set when every value is positive.
    pub fn new<S: Into<String>>(space: Arc<FiniteSpace>, members: Vec<(S, Vec<f64>)>) -> Result<Self> {
        let mut names = Vec::with_capacity(members.len());
        let mut fs = Vec::with_capacity(members.len());
        for (name, values) in members {
            let name = name.into();
            if names.contains(&name) {
                return Err(Error::invalid(format!("family.{name}"), "duplicate member name"));
            }
            let f = ConeFunction::new(space.clone(), values).map_err(|e| prefix(e, &format!("family.{name}")))?;
            names.push(name);
            fs.push(f);
        }
        if fs.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let strict = fs.iter().all(ConeFunction::is_strictly_positive);
        Ok(Self {
            space,
            names,
            members: fs,
            strict,
        })
    }

    /// Clears the strict flag, e.g. for a family declared non-strict.
    pub fn without_strictness(mut self) -> Self {
        self.strict = false;
        self
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FiniteSpace> {
        self.space.clone()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[ConeFunction] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &ConeFunction {
        &self.members[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }
}

fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::InvalidInput { field, message } => Error::invalid(format!("{path}.{field}"), message),
        Error::DimensionMismatch { left, right } => Error::invalid(
            path.to_string(),
            format!("expected {left} values, got {right}"),
        ),
        other => other,
    }
}

/// How `Tf(y)` is compared with `f(x)` when computing supp sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum EqualityTolerance {
    Absolute(f64),
    /// Scaled by `max(1, |a|, |b|)`.
    Relative(f64),
}

impl EqualityTolerance {
    pub const EXACT: Self = EqualityTolerance::Absolute(1e-12);
    pub const FORMULA: Self = EqualityTolerance::Relative(1e-9);

    pub fn matches(&self, a: f64, b: f64) -> bool {
        match *self {
            EqualityTolerance::Absolute(t) => (a - b).abs() <= t,
            EqualityTolerance::Relative(t) => (a - b).abs() <= t * 1f64.max(a.abs()).max(b.abs()),
        }
    }
}

impl Default for EqualityTolerance {
    fn default() -> Self {
        Self::EXACT
    }
}

impl fmt::Display for EqualityTolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqualityTolerance::Absolute(t) => write!(f, "absolute {t:e}"),
            EqualityTolerance::Relative(t) => write!(f, "relative {t:e}"),
        }
    }
}

/// A map `T` from a family on `X` to cone functions on `Y`, as a table.
#[derive(Clone, Debug)]
pub struct PreserverMap {
    domain: FunctionFamily,
    target: Arc<FiniteSpace>,
    images: Vec<ConeFunction>,
    tolerance: EqualityTolerance,
}

impl PreserverMap {
    pub fn new(domain: FunctionFamily, target: Arc<FiniteSpace>, images: Vec<Vec<f64>>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::invalid(
                "T",
                format!("expected {} images, got {}", domain.len(), images.len()),
            ));
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                ConeFunction::new(target.clone(), v).map_err(|e| prefix(e, &format!("T.{}", domain.name(i))))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain,
            target,
            images,
            tolerance: EqualityTolerance::default(),
        })
    }

    /// Tabulates `T` from a rule evaluated at every member and target point.
    pub fn from_rule(
        domain: FunctionFamily,
        target: Arc<FiniteSpace>,
        rule: impl Fn(&ConeFunction, usize) -> f64,
    ) -> Result<Self> {
        let images = domain
            .members()
            .iter()
            .map(|f| (0..target.len()).map(|y| rule(f, y)).collect())
            .collect();
        Self::new(domain, target, images)
    }

    pub fn identity(domain: FunctionFamily) -> Result<Self> {
        let target = domain.space_arc();
        let images = domain.members().iter().map(|f| f.values().to_vec()).collect();
        Self::new(domain, target, images)
    }

    pub fn with_tolerance(mut self, tolerance: EqualityTolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn tolerance(&self) -> EqualityTolerance {
        self.tolerance
    }

    pub fn domain(&self) -> &FunctionFamily {
        &self.domain
    }

    pub fn source(&self) -> &FiniteSpace {
        self.domain.space()
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn target_arc(&self) -> Arc<FiniteSpace> {
        self.target.clone()
    }

    pub fn images(&self) -> &[ConeFunction] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &ConeFunction {
        &self.images[i]
    }

    pub fn image_of(&self, name: &str) -> Result<&ConeFunction> {
        let i = self
            .domain
            .index_of(name)
            .ok_or_else(|| Error::invalid("member", format!("no member named `{name}`")))?;
        Ok(&self.images[i])
    }

    pub fn images_strictly_positive(&self) -> bool {
        self.images.iter().all(ConeFunction::is_strictly_positive)
    }

    /// The image family `{Tf}` as a family on `Y`.
    pub fn image_family(&self) -> Result<FunctionFamily> {
        let members = self
            .domain
            .names()
            .iter()
            .cloned()
            .zip(self.images.iter().map(|f| f.values().to_vec()))
            .collect();
        FunctionFamily::new(self.target.clone(), members)
    }

    pub fn to_instance(&self) -> InstanceJson {
        InstanceJson {
            schema: Some(INSTANCE_SCHEMA),
            x: self.source().points().to_vec(),
            y: self.target.points().to_vec(),
            family: self
                .domain
                .names()
                .iter()
                .cloned()
                .zip(self.domain.members().iter().map(|f| f.values().to_vec()))
                .collect(),
            t: self
                .domain
                .names()
                .iter()
                .cloned()
                .zip(self.images.iter().map(|f| f.values().to_vec()))
                .collect(),
            strict: self.domain.is_strict(),
            tolerance: Some(self.tolerance),
        }
    }
}

pub const INSTANCE_SCHEMA: u32 = 1;

/// On-disk form of a [`PreserverMap`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    #[serde(rename = "X")]
    pub x: Vec<String>,
    #[serde(rename = "Y")]
    pub y: Vec<String>,
    pub family: IndexMap<String, Vec<f64>>,
    #[serde(rename = "T")]
    pub t: IndexMap<String, Vec<f64>>,
    #[serde(default)]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<EqualityTolerance>,
}

impl InstanceJson {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("instance", e.to_string()))
    }

    pub fn to_map(&self) -> Result<PreserverMap> {
        if let Some(s) = self.schema {
            if s != INSTANCE_SCHEMA {
                return Err(Error::invalid("schema", format!("unsupported version {s}")));
            }
        }
        let x = FiniteSpace::new(self.x.iter().cloned()).map_err(|e| field_error(e, "X"))?;
        let y = FiniteSpace::new(self.y.iter().cloned()).map_err(|e| field_error(e, "Y"))?;
        let family = FunctionFamily::new(x, self.family.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
            .map_err(|e| field_error(e, "family"))?;
        if self.strict && !family.is_strict() {
            let (name, _) = self
                .family
                .iter()
                .find(|(_, v)| v.iter().any(|&a| a <= 0.0))
                .expect("non-strict member exists");
            return Err(Error::invalid(
                format!("family.{name}"),
                "declared strict but has a nonpositive value",
            ));
        }
        let family = if self.strict { family } else { family.without_strictness() };
        let mut images = Vec::with_capacity(family.len());
        for name in family.names() {
            let v = self
                .t
                .get(name)
                .ok_or_else(|| Error::invalid(format!("T.{name}"), "missing image"))?;
            images.push(v.clone());
        }
        if let Some(extra) = self.t.keys().find(|k| family.index_of(k).is_none()) {
            return Err(Error::invalid(format!("T.{extra}"), "image of an unknown member"));
        }
        let map = PreserverMap::new(family, y, images)?;
        Ok(match self.tolerance {
            Some(t) => map.with_tolerance(t),
            None => map,
        })
    }
}

fn field_error(e: Error, field: &str) -> Error {
    match e {
        Error::EmptyCollection => Error::invalid(field, "must be nonempty"),
        Error::InvalidInput { field: f, message } if f.starts_with("points") => {
            Error::invalid(format!("{field}{}", &f["points".len()..]), message)
        }
        Error::InvalidInput { field: f, message } if f.starts_with("family.") => Error::invalid(f, message),
        other => other,
    }
}
