//! Bundled graphs for `demo matchings`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grids::SignatureGrid;
use crate::signatures::named::one;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoGraph {
    K4,
    Cube,
    Petersen,
}

impl DemoGraph {
    pub const ALL: [DemoGraph; 3] = [DemoGraph::K4, DemoGraph::Cube, DemoGraph::Petersen];

    pub fn name(self) -> &'static str {
        match self {
            DemoGraph::K4 => "k4",
            DemoGraph::Cube => "cube",
            DemoGraph::Petersen => "petersen",
        }
    }

    /// Vertex count and edge list.
    pub fn edges(self) -> (usize, Vec<(usize, usize)>) {
        match self {
            DemoGraph::K4 => (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            DemoGraph::Cube => {
                let mut e = Vec::new();
                for v in 0..8usize {
                    for b in 0..3 {
                        let w = v ^ (1 << b);
                        if v < w {
                            e.push((v, w));
                        }
                    }
                }
                (8, e)
            }
            DemoGraph::Petersen => {
                let mut e = Vec::new();
                for k in 0..5 {
                    e.push((k, (k + 1) % 5));
                    e.push((k, k + 5));
                    e.push((k + 5, (k + 2) % 5 + 5));
                }
                (10, e)
            }
        }
    }
}

impl fmt::Display for DemoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DemoGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DemoGraph::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown demo graph {s:?} (k4, cube, petersen)")))
    }
}

/// The grid with ONE_d at every vertex of degree d; its holant value counts
/// perfect matchings.
pub fn matching_grid(n: usize, edges: &[(usize, usize)]) -> SignatureGrid {
    let mut degree = vec![0usize; n];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut grid = SignatureGrid::new();
    for (v, &d) in degree.iter().enumerate() {
        grid.add_vertex(format!("v{v}"), one(d));
    }
    let mut next = vec![0usize; n];
    for &(a, b) in edges {
        let (sa, sb) = (next[a], next[b]);
        next[a] += 1;
        next[b] += 1;
        grid.add_edge((a, sa), (b, sb));
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;
    use crate::eval::{evaluate, Method};

    #[test]
    fn graphs_are_cubic_or_complete() {
        for g in DemoGraph::ALL {
            let (n, e) = g.edges();
            assert_eq!(e.len() * 2, n * 3, "{g}");
            let grid = matching_grid(n, &e);
            assert!(grid.validate().is_ok());
            assert_eq!(g.name().parse::<DemoGraph>().unwrap(), g);
        }
    }

    #[test]
    fn k4_matchings() {
        let (n, e) = DemoGraph::K4.edges();
        let v = evaluate(&matching_grid(n, &e), Method::Contract).unwrap();
        assert_eq!(v, Scalar::int(3));
    }
}
