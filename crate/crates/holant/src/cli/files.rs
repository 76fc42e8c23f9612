//! JSON signature and grid files.
//!
//! A signature file is either a list of entries or `{"signatures": [...]}`.
//! An entry has an optional `name`, an optional `arity`, and either `values`
//! (all 2ⁿ values, first argument most significant) or `symmetric`
//! (one value per Hamming weight). Values are scalar literals as strings, or
//! plain JSON integers.
//!
//! A grid file is
//! `{signatures: {name: entry}, vertices: [{id, sig}], edges: [[[v, slot], [v, slot]]],
//! dangling: [[v, slot]], rotation: {id: [slot order]}, scale: literal}`
//! where `v` is a vertex index or id. `dangling`, `rotation` and `scale`
//! are optional; `scale` multiplies the effective signature.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_scalar, Backend, Scalar};
use crate::error::{Error, Result};
use crate::gadgets::GadgetRecipe;
use crate::grids::{Endpoint, Gadget, SignatureGrid};
use crate::signatures::{Signature, SymSignature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Int(i64),
    Number(f64),
    Text(String),
}

impl Literal {
    pub fn to_scalar(&self, backend: Backend) -> Result<Scalar> {
        match self {
            Literal::Int(n) => Ok(Scalar::int(*n).to_backend(backend)),
            Literal::Number(x) => match backend {
                Backend::Float => Ok(Scalar::float(*x, 0.0)),
                Backend::Exact => Err(Error::Parse(format!(
                    "non-integer number {x} in exact mode; write it as a string such as \"1/2\""
                ))),
            },
            Literal::Text(s) => parse_scalar(s, backend),
        }
    }

    pub fn from_scalar(s: &Scalar) -> Self {
        Literal::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Literal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<Vec<Literal>>,
}

fn literals(list: &[Literal], backend: Backend, what: &str) -> Result<Vec<Scalar>> {
    list.iter()
        .enumerate()
        .map(|(k, l)| {
            l.to_scalar(backend)
                .map_err(|e| Error::Parse(format!("{what}, value {k}: {e}")))
        })
        .collect()
}

impl SignatureEntry {
    pub fn from_signature(name: Option<String>, f: &Signature) -> Self {
        SignatureEntry {
            name,
            arity: Some(f.arity()),
            values: Some(f.values().iter().map(Literal::from_scalar).collect()),
            symmetric: None,
        }
    }

    pub fn to_signature(&self, backend: Backend, what: &str) -> Result<Signature> {
        let dense = match &self.values {
            None => None,
            Some(vs) => {
                let vals = literals(vs, backend, what)?;
                let arity = match self.arity {
                    Some(a) => a,
                    None if vals.len().is_power_of_two() => vals.len().trailing_zeros() as usize,
                    None => {
                        return Err(Error::Parse(format!(
                            "{what}: {} values is not a power of two",
                            vals.len()
                        )))
                    }
                };
                Some(
                    Signature::new(arity, vals)
                        .map_err(|e| Error::Parse(format!("{what}: {e}")))?,
                )
            }
        };
        let sym = match &self.symmetric {
            None => None,
            Some(vs) => {
                let s = SymSignature::new(literals(vs, backend, what)?)
                    .map_err(|e| Error::Parse(format!("{what}: {e}")))?;
                if let Some(a) = self.arity {
                    if a != s.arity() {
                        return Err(Error::Parse(format!(
                            "{what}: arity {a} but {} symmetric values",
                            s.arity() + 1
                        )));
                    }
                }
                Some(s.expand())
            }
        };
        match (dense, sym) {
            (Some(d), Some(s)) if d != s => Err(Error::Parse(format!(
                "{what}: values and symmetric values disagree"
            ))),
            (Some(d), _) => Ok(d),
            (None, Some(s)) => Ok(s),
            (None, None) => Err(Error::Parse(format!("{what}: needs values or symmetric"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SignatureFile {
    List(Vec<SignatureEntry>),
    Wrapped { signatures: Vec<SignatureEntry> },
}

/// A named signature read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSignature {
    pub name: String,
    pub signature: Signature,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_signatures(text: &str, backend: Backend) -> Result<Vec<NamedSignature>> {
    let file: SignatureFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let entries = match file {
        SignatureFile::List(v) | SignatureFile::Wrapped { signatures: v } => v,
    };
    entries
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let name = e.name.clone().unwrap_or_else(|| format!("f{k}"));
            let signature = e.to_signature(backend, &format!("signature '{name}'"))?;
            Ok(NamedSignature { name, signature })
        })
        .collect()
}

pub fn read_signatures(path: &Path, backend: Backend) -> Result<Vec<NamedSignature>> {
    parse_signatures(&read(path)?, backend)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexRef {
    Index(usize),
    Id(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    pub sig: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub signatures: BTreeMap<String, SignatureEntry>,
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<[(VertexRef, usize); 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dangling: Vec<(VertexRef, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<BTreeMap<String, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Literal>,
}

/// A gadget read from a grid file, with the file's global scale.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGrid {
    pub gadget: Gadget,
    pub scale: Scalar,
}

impl GridFile {
    pub fn load(&self, backend: Backend) -> Result<LoadedGrid> {
        let mut sigs = BTreeMap::new();
        for (name, entry) in &self.signatures {
            sigs.insert(
                name.as_str(),
                entry.to_signature(backend, &format!("signature '{name}'"))?,
            );
        }
        let mut grid = SignatureGrid::new();
        for v in &self.vertices {
            let s = sigs.get(v.sig.as_str()).ok_or_else(|| {
                Error::Parse(format!(
                    "vertex '{}' uses unknown signature '{}'",
                    v.id, v.sig
                ))
            })?;
            grid.add_vertex(v.id.clone(), s.clone());
        }
        let resolve = |r: &VertexRef, what: &str| -> Result<usize> {
            match r {
                VertexRef::Index(k) if *k < self.vertices.len() => Ok(*k),
                VertexRef::Index(k) => Err(Error::Parse(format!("{what}: no vertex {k}"))),
                VertexRef::Id(id) => self
                    .vertices
                    .iter()
                    .position(|v| &v.id == id)
                    .ok_or_else(|| Error::Parse(format!("{what}: no vertex '{id}'"))),
            }
        };
        for (k, [a, b]) in self.edges.iter().enumerate() {
            let what = format!("edge {k}");
            let ea = Endpoint::new(resolve(&a.0, &what)?, a.1);
            let eb = Endpoint::new(resolve(&b.0, &what)?, b.1);
            grid.add_edge(ea, eb);
        }
        let mut dangling = Vec::new();
        for (k, (v, slot)) in self.dangling.iter().enumerate() {
            dangling.push(Endpoint::new(
                resolve(v, &format!("dangling edge {k}"))?,
                *slot,
            ));
        }
        if let Some(rot) = &self.rotation {
            let mut order = grid.natural_rotation();
            for (id, slots) in rot {
                let v = resolve(&VertexRef::Id(id.clone()), "rotation")?;
                order[v] = slots.clone();
            }
            grid.rotation = Some(order);
        }
        let gadget = Gadget::new(grid, dangling);
        gadget.validate().map_err(Error::InvalidGrid)?;
        let scale = match &self.scale {
            Some(l) => l.to_scalar(backend)?,
            None => Scalar::one().to_backend(backend),
        };
        Ok(LoadedGrid { gadget, scale })
    }

    /// Serialises a gadget; vertex signatures are deduplicated into named
    /// entries `s0`, `s1`, ….
    pub fn from_gadget(g: &Gadget, scale: &Scalar) -> Self {
        let mut names: Vec<(Signature, String)> = Vec::new();
        let mut signatures = BTreeMap::new();
        let mut vertices = Vec::new();
        for v in &g.grid.vertices {
            let name = match names.iter().find(|(s, _)| s == &v.signature) {
                Some((_, n)) => n.clone(),
                None => {
                    let n = format!("s{}", names.len());
                    names.push((v.signature.clone(), n.clone()));
                    signatures.insert(
                        n.clone(),
                        SignatureEntry::from_signature(None, &v.signature),
                    );
                    n
                }
            };
            vertices.push(VertexEntry {
                id: v.id.clone(),
                sig: name,
            });
        }
        let end = |e: &Endpoint| (VertexRef::Index(e.vertex), e.slot);
        let rotation = g.grid.rotation.as_ref().map(|rot| {
            rot.iter()
                .enumerate()
                .map(|(k, r)| (g.grid.vertices[k].id.clone(), r.clone()))
                .collect()
        });
        GridFile {
            signatures,
            vertices,
            edges: g.grid.edges.iter().map(|[a, b]| [end(a), end(b)]).collect(),
            dangling: g.dangling.iter().map(end).collect(),
            rotation,
            scale: (!scale.is_one()).then(|| Literal::from_scalar(scale)),
        }
    }

    pub fn from_recipe(r: &GadgetRecipe) -> Result<Self> {
        Ok(Self::from_gadget(&r.to_gadget()?, &r.scale))
    }
}

pub fn parse_grid(text: &str, backend: Backend) -> Result<LoadedGrid> {
    let file: GridFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.load(backend)
}

pub fn read_grid(path: &Path, backend: Backend) -> Result<LoadedGrid> {
    parse_grid(&read(path)?, backend).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::effective_signature;
    use crate::signatures::named::*;

    #[test]
    fn signature_entries() {
        let text = r#"[{"name": "eq3", "arity": 3, "values": [1, 0, 0, 0, 0, 0, 0, 1]},
                       {"name": "h", "symmetric": ["1/2*w^3", 0, "-i"]}]"#;
        let sigs = parse_signatures(text, Backend::Exact).unwrap();
        assert_eq!(sigs[0].signature, eq(3));
        assert_eq!(
            sigs[1].signature.value(0),
            &(Scalar::rational(1, 2) * Scalar::zeta(3))
        );
        assert_eq!(sigs[1].signature.value(3), &-Scalar::i());

        let bad = r#"{"signatures": [{"name": "x", "arity": 3, "values": [1, 0, 0, 0, 0, 0, 1]}]}"#;
        let err = parse_signatures(bad, Backend::Exact).unwrap_err();
        assert!(err.to_string().contains("'x'"), "{err}");
        assert!(parse_signatures(r#"[{"values": [1, 0.5]}]"#, Backend::Exact).is_err());
        let f = parse_signatures(r#"[{"values": [1, 0.5]}]"#, Backend::Float).unwrap();
        assert_eq!(f[0].signature.value(1), &Scalar::float(0.5, 0.0));
        assert!(parse_signatures(r#"[{"values": [1], "extra": 2}]"#, Backend::Exact).is_err());
    }

    #[test]
    fn grid_round_trip() {
        let text = r#"{
            "signatures": {"one3": {"symmetric": [0, 1, 0, 0]}},
            "vertices": [{"id": "a", "sig": "one3"}, {"id": "b", "sig": "one3"}],
            "edges": [[["a", 0], ["b", 0]], [[0, 1], [1, 1]]],
            "dangling": [["a", 2], ["b", 2]]
        }"#;
        let g = parse_grid(text, Backend::Exact).unwrap();
        let eff = effective_signature(&g.gadget).unwrap();
        assert_eq!(eff, Signature::from_ints(&[2, 0, 0, 1]));
        let again = GridFile::from_gadget(&g.gadget, &Scalar::int(3));
        let json = serde_json::to_string(&again).unwrap();
        let back = parse_grid(&json, Backend::Exact).unwrap();
        assert_eq!(back.scale, Scalar::int(3));
        assert_eq!(effective_signature(&back.gadget).unwrap(), eff);

        let dup = text.replace(
            r#""dangling": [["a", 2], ["b", 2]]"#,
            r#""dangling": [["a", 0], ["b", 2]]"#,
        );
        assert!(matches!(
            parse_grid(&dup, Backend::Exact),
            Err(Error::InvalidGrid(_))
        ));
    }
}
