//! Signature grids, gadgets with dangling edges, and rotation systems.

use std::collections::HashSet;

use crate::algebra::Scalar;
use crate::error::{Error, Result};
use crate::eval::contract::{contract_network, ContractOptions};
use crate::signatures::Signature;

/// One end of an edge: a vertex index and one of its argument slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub vertex: usize,
    pub slot: usize,
}

impl Endpoint {
    pub fn new(vertex: usize, slot: usize) -> Self {
        Endpoint { vertex, slot }
    }
}

impl From<(usize, usize)> for Endpoint {
    fn from((vertex, slot): (usize, usize)) -> Self {
        Endpoint { vertex, slot }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    pub signature: Signature,
}

/// A multigraph whose vertices carry signatures; edges record which argument
/// slot they occupy at each end.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignatureGrid {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[Endpoint; 2]>,
    /// Per vertex, the cyclic order of its slots.
    pub rotation: Option<Vec<Vec<usize>>>,
}

/// A grid fragment whose unmatched slots are ordered dangling edges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Gadget {
    pub grid: SignatureGrid,
    pub dangling: Vec<Endpoint>,
}

impl SignatureGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self, id: impl Into<String>, signature: Signature) -> usize {
        self.vertices.push(Vertex {
            id: id.into(),
            signature,
        });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, a: impl Into<Endpoint>, b: impl Into<Endpoint>) -> usize {
        self.edges.push([a.into(), b.into()]);
        self.edges.len() - 1
    }

    pub fn with_rotation(mut self, rotation: Vec<Vec<usize>>) -> Self {
        self.rotation = Some(rotation);
        self
    }

    /// Rotation system listing each vertex's slots in increasing order.
    pub fn natural_rotation(&self) -> Vec<Vec<usize>> {
        self.vertices
            .iter()
            .map(|v| (0..v.signature.arity()).collect())
            .collect()
    }

    pub fn signatures(&self) -> impl Iterator<Item = &Signature> {
        self.vertices.iter().map(|v| &v.signature)
    }

    /// Checks structural invariants, collecting every violation.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        validate_parts(self, &[])
    }

    /// For each (vertex, slot), the edge occupying it. Assumes a valid grid.
    pub(crate) fn slot_edges(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self
            .vertices
            .iter()
            .map(|v| vec![usize::MAX; v.signature.arity()])
            .collect();
        for (e, ends) in self.edges.iter().enumerate() {
            for end in ends {
                out[end.vertex][end.slot] = e;
            }
        }
        out
    }

    /// Connected components as lists of vertex indices, in increasing order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for [a, b] in &self.edges {
            let (ra, rb) = (find(&mut parent, a.vertex), find(&mut parent, b.vertex));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![usize::MAX; n];
        for v in 0..n {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[index[r]].push(v);
        }
        groups
    }

    fn require_valid(&self) -> Result<()> {
        self.validate().map_err(Error::InvalidGrid)
    }
}

fn validate_parts(
    grid: &SignatureGrid,
    dangling: &[Endpoint],
) -> std::result::Result<(), Vec<String>> {
    let mut diags = Vec::new();
    let mut used: HashSet<Endpoint> = HashSet::new();
    let mut check_end = |end: &Endpoint, what: String, diags: &mut Vec<String>| {
        let Some(v) = grid.vertices.get(end.vertex) else {
            diags.push(format!(
                "{what}: vertex index {} does not exist",
                end.vertex
            ));
            return;
        };
        if end.slot >= v.signature.arity() {
            diags.push(format!(
                "{what}: slot {} out of range for vertex '{}' of arity {}",
                end.slot,
                v.id,
                v.signature.arity()
            ));
            return;
        }
        if !used.insert(*end) {
            diags.push(format!(
                "{what}: slot {} of vertex '{}' is used more than once",
                end.slot, v.id
            ));
        }
    };
    for (e, ends) in grid.edges.iter().enumerate() {
        for end in ends {
            check_end(end, format!("edge {e}"), &mut diags);
        }
    }
    for (k, end) in dangling.iter().enumerate() {
        check_end(end, format!("dangling edge {k}"), &mut diags);
    }
    for (vi, v) in grid.vertices.iter().enumerate() {
        let degree = (0..v.signature.arity())
            .filter(|&s| used.contains(&Endpoint::new(vi, s)))
            .count();
        let incident = grid
            .edges
            .iter()
            .flatten()
            .chain(dangling.iter())
            .filter(|end| end.vertex == vi)
            .count();
        if incident != v.signature.arity() || degree != v.signature.arity() {
            diags.push(format!(
                "vertex '{}': degree {} does not match signature arity {}",
                v.id,
                incident,
                v.signature.arity()
            ));
        }
    }
    if let Some(rot) = &grid.rotation {
        if rot.len() != grid.vertices.len() {
            diags.push(format!(
                "rotation system lists {} vertices, grid has {}",
                rot.len(),
                grid.vertices.len()
            ));
        } else {
            for (vi, order) in rot.iter().enumerate() {
                let arity = grid.vertices[vi].signature.arity();
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..arity).collect::<Vec<_>>() {
                    diags.push(format!(
                        "rotation at vertex '{}' must list each of its {} edge ends exactly once",
                        grid.vertices[vi].id, arity
                    ));
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

impl Gadget {
    pub fn new(grid: SignatureGrid, dangling: Vec<Endpoint>) -> Self {
        Gadget { grid, dangling }
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        validate_parts(&self.grid, &self.dangling)
    }

    pub fn arity(&self) -> usize {
        self.dangling.len()
    }
}

/// Sums out the internal edges of a gadget; the dangling edges become the
/// arguments of the result, in order.
pub fn effective_signature(g: &Gadget) -> Result<Signature> {
    g.validate().map_err(Error::InvalidGrid)?;
    contract_network(&g.grid, &g.dangling, &ContractOptions::default())
}

/// Holant value of a closed grid via the contraction engine.
pub fn holant(grid: &SignatureGrid) -> Result<Scalar> {
    grid.require_valid()?;
    let s = contract_network(grid, &[], &ContractOptions::default())?;
    Ok(s.value(0).clone())
}

/// Genus of the embedding given by the rotation system, summed over
/// connected components.
pub fn genus(grid: &SignatureGrid) -> Result<usize> {
    grid.require_valid()?;
    let rot = grid
        .rotation
        .as_ref()
        .ok_or_else(|| Error::Precondition("grid has no rotation system".into()))?;
    // position of each slot within its vertex's cyclic order
    let next = |v: usize, s: usize| -> usize {
        let order = &rot[v];
        let k = order.iter().position(|&x| x == s).unwrap();
        order[(k + 1) % order.len()]
    };
    let mut across = std::collections::HashMap::new();
    for [a, b] in &grid.edges {
        across.insert(*a, *b);
        across.insert(*b, *a);
    }
    let mut total = 0usize;
    for comp in grid.components() {
        let verts = comp.len() as i64;
        let darts: Vec<Endpoint> = comp
            .iter()
            .flat_map(|&v| {
                (0..grid.vertices[v].signature.arity()).map(move |s| Endpoint::new(v, s))
            })
            .collect();
        let edges = darts.len() as i64 / 2;
        if edges == 0 {
            continue;
        }
        let mut seen: HashSet<Endpoint> = HashSet::new();
        let mut faces = 0i64;
        for &d in &darts {
            if seen.contains(&d) {
                continue;
            }
            faces += 1;
            let mut cur = d;
            while seen.insert(cur) {
                let other = across[&cur];
                cur = Endpoint::new(other.vertex, next(other.vertex, other.slot));
            }
        }
        let euler = 2 - verts + edges - faces;
        total += (euler / 2) as usize;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::named::*;
    use crate::signatures::{tensor, Signature};

    fn k4_of_one3() -> SignatureGrid {
        let mut g = SignatureGrid::new();
        for k in 0..4 {
            g.add_vertex(format!("v{k}"), one(3));
        }
        let mut slot = [0usize; 4];
        for a in 0..4 {
            for b in a + 1..4 {
                g.add_edge((a, slot[a]), (b, slot[b]));
                slot[a] += 1;
                slot[b] += 1;
            }
        }
        g
    }

    #[test]
    fn validate_examples() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(3));
        let b = g.add_vertex("b", delta_plus());
        g.add_edge((a, 0), (a, 1));
        g.add_edge((a, 2), (b, 0));
        assert!(g.validate().is_ok());

        let mut bad = SignatureGrid::new();
        let a = bad.add_vertex("a", eq(3));
        let b = bad.add_vertex("b", eq(2));
        bad.add_edge((a, 0), (b, 0));
        bad.add_edge((a, 1), (b, 1));
        let diags = bad.validate().unwrap_err();
        assert!(diags
            .iter()
            .any(|d| d.contains("'a'") && d.contains("arity 3")));

        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", delta_plus());
        let b = g.add_vertex("b", delta_plus());
        g.add_edge((a, 0), (b, 0));
        assert!(g.validate().is_ok());

        let mut dup = SignatureGrid::new();
        let a = dup.add_vertex("a", eq(2));
        dup.add_edge((a, 0), (a, 0));
        let diags = dup.validate().unwrap_err();
        assert!(diags.iter().any(|d| d.contains("more than once")));
    }

    #[test]
    fn effective_signature_examples() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", eq(3));
        g.add_edge((a, 1), (a, 2));
        let gadget = Gadget::new(g, vec![Endpoint::new(a, 0)]);
        assert_eq!(effective_signature(&gadget).unwrap(), delta_plus());

        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", one(3));
        g.add_edge((a, 1), (a, 2));
        let gadget = Gadget::new(g, vec![Endpoint::new(a, 0)]);
        assert_eq!(effective_signature(&gadget).unwrap(), delta1());

        let closed = Gadget::new(k4_of_one3(), vec![]);
        assert_eq!(
            effective_signature(&closed).unwrap(),
            Signature::constant(Scalar::int(3))
        );
    }

    #[test]
    fn no_internal_edges_gives_tensor_product() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex("a", Signature::from_ints(&[1, 2, 3, 4]));
        let b = g.add_vertex("b", Signature::from_ints(&[5, 7]));
        let gadget = Gadget::new(
            g,
            vec![
                Endpoint::new(a, 0),
                Endpoint::new(a, 1),
                Endpoint::new(b, 0),
            ],
        );
        let expected = tensor(
            &Signature::from_ints(&[1, 2, 3, 4]),
            &Signature::from_ints(&[5, 7]),
        );
        assert_eq!(effective_signature(&gadget).unwrap(), expected);
    }

    #[test]
    fn genus_examples() {
        let mut tri = SignatureGrid::new();
        for k in 0..3 {
            tri.add_vertex(format!("v{k}"), eq(2));
        }
        tri.add_edge((0, 1), (1, 0));
        tri.add_edge((1, 1), (2, 0));
        tri.add_edge((2, 1), (0, 0));
        let rot = tri.natural_rotation();
        assert_eq!(genus(&tri.with_rotation(rot)).unwrap(), 0);

        let mut k5 = SignatureGrid::new();
        for k in 0..5 {
            k5.add_vertex(format!("v{k}"), eq(4));
        }
        let mut slot = [0usize; 5];
        for a in 0..5 {
            for b in a + 1..5 {
                k5.add_edge((a, slot[a]), (b, slot[b]));
                slot[a] += 1;
                slot[b] += 1;
            }
        }
        let rot = k5.natural_rotation();
        let k5 = k5.with_rotation(rot);
        assert!(genus(&k5).unwrap() >= 1);

        let mut looped = SignatureGrid::new();
        let a = looped.add_vertex("a", eq(2));
        looped.add_edge((a, 0), (a, 1));
        let rot = looped.natural_rotation();
        assert_eq!(genus(&looped.with_rotation(rot)).unwrap(), 0);

        assert!(genus(&k4_of_one3()).is_err());
    }

    #[test]
    fn k5_every_rotation_is_nonplanar() {
        // all rotations at vertex 0, natural elsewhere: genus never drops to 0
        let mut k5 = SignatureGrid::new();
        for k in 0..5 {
            k5.add_vertex(format!("v{k}"), eq(4));
        }
        let mut slot = [0usize; 5];
        for a in 0..5 {
            for b in a + 1..5 {
                k5.add_edge((a, slot[a]), (b, slot[b]));
                slot[a] += 1;
                slot[b] += 1;
            }
        }
        for perm in [
            [0, 1, 2, 3],
            [0, 2, 1, 3],
            [0, 1, 3, 2],
            [0, 3, 2, 1],
            [0, 2, 3, 1],
            [0, 3, 1, 2],
        ] {
            let mut rot = k5.natural_rotation();
            rot[0] = perm.to_vec();
            let g = k5.clone().with_rotation(rot);
            assert!(genus(&g).unwrap() >= 1);
        }
    }
}
