use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Label, Ring, RingSpec, Vec2};
use crate::one_dim::Exponent;

/// One boundary ring as written in a domain file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingFile {
    pub vertices: Vec<[f64; 2]>,
    /// `"D"` or `"N"` per edge; edge `i` joins vertex `i` to vertex `i + 1`.
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<[f64; 2]>>,
}

/// A comparison domain enclosing the main one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperdomainFile {
    #[serde(flatten)]
    pub outer: RingFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<RingFile>,
}

/// TOML domain description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    pub name: String,
    pub p: f64,
    #[serde(default = "default_d")]
    pub d: u32,
    pub vertices: Vec<[f64; 2]>,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<RingFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub superdomain: Option<SuperdomainFile>,
}

fn default_d() -> u32 {
    2
}

fn parse_label(s: &str) -> Result<Label> {
    match s.trim() {
        "D" | "d" => Ok(Label::Dirichlet),
        "N" | "n" => Ok(Label::Neumann),
        other => Err(Error::InvalidArgument(format!("edge label {other:?} is neither \"D\" nor \"N\""))),
    }
}

fn label_str(l: Label) -> String {
    match l {
        Label::Dirichlet => "D".into(),
        Label::Neumann => "N".into(),
    }
}

fn pts(v: &[[f64; 2]]) -> Vec<Vec2> {
    v.iter().map(|[x, y]| Vec2::new(*x, *y)).collect()
}

fn pairs(v: &[Vec2]) -> Vec<[f64; 2]> {
    v.iter().map(|p| [p.x, p.y]).collect()
}

impl RingFile {
    fn to_spec(&self) -> Result<RingSpec> {
        let labels = self.labels.iter().map(|s| parse_label(s)).collect::<Result<Vec<_>>>()?;
        let spec = RingSpec::new(pts(&self.vertices), labels);
        Ok(match &self.normals {
            Some(n) => spec.with_normals(pts(n)),
            None => spec,
        })
    }

    fn from_ring(ring: &Ring) -> Self {
        RingFile {
            vertices: pairs(ring.vertices()),
            labels: ring.labels().iter().map(|l| label_str(*l)).collect(),
            normals: ring.normals().map(pairs),
        }
    }
}

/// A parsed and validated domain file.
#[derive(Clone, Debug)]
pub struct LoadedDomain {
    pub name: String,
    pub p: Exponent,
    pub d: u32,
    pub domain: Domain,
    pub superdomain: Option<Domain>,
}

impl DomainFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("domain file: {}", e.message())))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("domain files serialize")
    }

    pub fn load(&self) -> Result<LoadedDomain> {
        let p = Exponent::new(self.p)?;
        if self.d == 0 {
            return Err(Error::InvalidArgument("dimension d must be at least 1".into()));
        }
        let outer = RingFile {
            vertices: self.vertices.clone(),
            labels: self.labels.clone(),
            normals: self.normals.clone(),
        };
        let holes = self.holes.iter().map(RingFile::to_spec).collect::<Result<Vec<_>>>()?;
        let origin = self.origin.map(|[x, y]| Vec2::new(x, y));
        let domain = Domain::new(outer.to_spec()?, holes, origin)?;
        let superdomain = match &self.superdomain {
            Some(s) => Some(Domain::new(
                s.outer.to_spec()?,
                s.holes.iter().map(RingFile::to_spec).collect::<Result<Vec<_>>>()?,
                None,
            )?),
            None => None,
        };
        Ok(LoadedDomain {
            name: self.name.clone(),
            p,
            d: self.d,
            domain,
            superdomain,
        })
    }

    /// Describes an already validated domain.
    pub fn from_domain(name: &str, p: Exponent, d: u32, domain: &Domain, superdomain: Option<&Domain>) -> Self {
        let outer = RingFile::from_ring(domain.outer());
        DomainFile {
            name: name.to_string(),
            p: p.p(),
            d,
            vertices: outer.vertices,
            labels: outer.labels,
            normals: outer.normals,
            origin: domain.origin().map(|o| [o.x, o.y]),
            holes: domain.holes().iter().map(RingFile::from_ring).collect(),
            superdomain: superdomain.map(|s| SuperdomainFile {
                outer: RingFile::from_ring(s.outer()),
                holes: s.holes().iter().map(RingFile::from_ring).collect(),
            }),
        }
    }
}
