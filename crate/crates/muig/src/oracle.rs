//! Exhaustive reference algorithms. Exponential on purpose: they exist to
//! check the fast paths on small instances, not to be fast themselves.

use crate::graph::{Graph, VertexId};

const MAX_VERTICES: usize = 64;

fn adjacency_masks(g: &Graph) -> (Vec<VertexId>, Vec<u64>) {
    let ids: Vec<VertexId> = g.vertices().collect();
    assert!(
        ids.len() <= MAX_VERTICES,
        "oracle limited to {MAX_VERTICES} vertices"
    );
    let index_of = |v: VertexId| ids.binary_search(&v).expect("vertex of its own graph");
    let mut masks = vec![0u64; ids.len()];
    for (a, b) in g.edges() {
        let (ia, ib) = (index_of(a), index_of(b));
        masks[ia] |= 1 << ib;
        masks[ib] |= 1 << ia;
    }
    (ids, masks)
}

fn mis_size(masks: &[u64], mut remaining: u64) -> usize {
    if remaining == 0 {
        return 0;
    }
    let v = remaining.trailing_zeros() as usize;
    remaining &= !(1 << v);
    let take = 1 + mis_size(masks, remaining & !masks[v]);
    let skip = mis_size(masks, remaining);
    take.max(skip)
}

/// Independence number by branching on the lowest remaining vertex.
pub fn brute_alpha(g: &Graph) -> usize {
    let (ids, masks) = adjacency_masks(g);
    let all = if ids.len() == MAX_VERTICES {
        u64::MAX
    } else {
        (1u64 << ids.len()) - 1
    };
    mis_size(&masks, all)
}

/// Clique number: independence number of the complement.
pub fn brute_omega(g: &Graph) -> usize {
    let (ids, masks) = adjacency_masks(g);
    let all = if ids.len() == MAX_VERTICES {
        u64::MAX
    } else {
        (1u64 << ids.len()) - 1
    };
    let complement: Vec<u64> = masks
        .iter()
        .enumerate()
        .map(|(i, &m)| all & !m & !(1 << i))
        .collect();
    mis_size(&complement, all)
}
