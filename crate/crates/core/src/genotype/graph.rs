use alloc::vec;
use alloc::vec::Vec;

use super::{Genotype, SearchSpaceParams};
use crate::Result;

/// DAG view of a genotype: an upper-triangular adjacency matrix over `v`
/// nodes (node 0 is the input, node `v - 1` the output) and one operation
/// label per internal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchitectureGraph {
    v: usize,
    adjacency: Vec<bool>,
    ops: Vec<u8>,
}

impl ArchitectureGraph {
    /// Edge slot `k` maps to cell `(i, j)`, `i < j`, enumerated by increasing
    /// `i` then increasing `j`.
    pub fn decode(params: &SearchSpaceParams, x: &Genotype) -> Result<Self> {
        x.validate(params)?;
        let v = params.v();
        let mut adjacency = vec![false; v * v];
        let mut bits = x.edges().iter();
        for i in 0..v {
            for j in (i + 1)..v {
                adjacency[i * v + j] = *bits.next().expect("n1 edge slots") == 1;
            }
        }
        Ok(Self {
            v,
            adjacency,
            ops: x.ops().to_vec(),
        })
    }

    pub fn encode(&self, params: &SearchSpaceParams) -> Result<Genotype> {
        let v = self.v;
        let edges: Vec<u8> = (0..v)
            .flat_map(|i| ((i + 1)..v).map(move |j| (i, j)))
            .map(|(i, j)| u8::from(self.adjacency[i * v + j]))
            .collect();
        Genotype::new(params, &edges, &self.ops)
    }

    pub fn nodes(&self) -> usize {
        self.v
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adjacency[from * self.v + to]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count()
    }

    /// Operation label of internal node `node` (`1..v-1`).
    pub fn op(&self, node: usize) -> u8 {
        self.ops[node - 1]
    }
}
