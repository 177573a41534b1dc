//! Exact maximum cut on bubble models.
//!
//! Columns are split into heavy and light by a size threshold. Light
//! columns become borders whose cuts are enumerated outright; per bubble
//! and quadrant only the counts matter, not which vertices are chosen.
//! Each maximal run of heavy columns, together with its two borders, forms
//! a part. A dynamic program sweeps the run's bubbles in row-major order;
//! its state is one running cut count per column plus the cut inside the
//! last bubble's right-closed piles, which is what the level edges into
//! the next column need. Parts overlap only in their shared border, so a
//! final chain over border cuts stitches the part optima together.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::graph::{cut_size, Cut, Graph, VertexId};
use crate::model::{graph_of_model, Bubble, Quadrant, UBubbleModel};

/// Edges crossing the cut in a complete join between a set holding `cut_a`
/// of its `size_a` vertices on the cut side and one holding `cut_b` of
/// `size_b`.
pub fn crossing(cut_a: u64, size_a: u64, cut_b: u64, size_b: u64) -> u64 {
    debug_assert!(cut_a <= size_a && cut_b <= size_b);
    cut_a * (size_b - cut_b) + (size_a - cut_a) * cut_b
}

#[derive(Debug, Clone, Default)]
pub struct MaxcutOptions {
    /// Columns with more vertices than this are heavy; `None` picks the
    /// ceiling of the square root of the vertex count.
    pub threshold: Option<usize>,
    /// Also return one optimal cut, not just its size.
    pub with_cut: bool,
    /// Worker threads for the border-cut tables; `None` or `Some(1)` runs
    /// sequentially. The result is identical for every setting.
    pub parallel: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MaxcutResult {
    pub value: u64,
    pub cut: Option<Cut>,
    /// Heavy-column threshold actually used; absent for the
    /// bounded-column-count algorithm, which never classifies columns.
    pub threshold: Option<usize>,
    /// Number of border-to-border parts the model was split into.
    pub parts: usize,
}

fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r < n {
        r + 1
    } else {
        r
    }
}

/// Exhaustive reference: tries every bipartition. Exponential; refuses
/// more than 26 vertices.
pub fn maxcut_bruteforce(g: &Graph, with_cut: bool) -> (u64, Option<Cut>) {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    assert!(n <= 26, "exhaustive cut search limited to 26 vertices");
    if n == 0 {
        return (0, with_cut.then(|| Cut::new([])));
    }
    let pos = |v: VertexId| ids.binary_search(&v).expect("vertex of its own graph");
    let edges: Vec<(usize, usize)> = g.edges().map(|(a, b)| (pos(a), pos(b))).collect();
    let mut best = 0u64;
    let mut best_mask = 0u32;
    // The lowest vertex stays outside the cut; complements are equivalent.
    for half_mask in 0..(1u32 << (n - 1)) {
        let mask = half_mask << 1;
        let mut value = 0u64;
        for &(a, b) in &edges {
            value += u64::from((mask >> a ^ mask >> b) & 1);
        }
        if value > best {
            best = value;
            best_mask = mask;
        }
    }
    let cut = with_cut.then(|| {
        Cut::new(
            ids.iter()
                .enumerate()
                .filter(|(i, _)| best_mask >> i & 1 == 1)
                .map(|(_, &v)| v),
        )
    });
    (best, cut)
}

/// Cut of one column, reduced to per-bubble, per-quadrant counts in the
/// pp, pm, mp, mm order.
#[derive(Debug, Clone)]
struct ColumnCut {
    counts: Vec<[u32; 4]>,
}

/// Every cut of a column, as an odometer over the piles (last pile moves
/// fastest). The order is part of the output contract: ties elsewhere
/// resolve to the smallest index in this enumeration.
fn enumerate_column_cuts(column: &[Bubble]) -> Vec<ColumnCut> {
    let sizes: Vec<[u32; 4]> = column
        .iter()
        .map(|b| b.quadrant_sizes().map(|s| s as u32))
        .collect();
    let mut current = vec![[0u32; 4]; sizes.len()];
    let mut out = Vec::new();
    loop {
        out.push(ColumnCut {
            counts: current.clone(),
        });
        let mut pos = sizes.len() * 4;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            let (b, q) = (pos / 4, pos % 4);
            if current[b][q] < sizes[b][q] {
                current[b][q] += 1;
                break;
            }
            current[b][q] = 0;
        }
    }
}

/// One border column under one fixed cut, padded to a common row count and
/// digested into the aggregates the part dynamic program consumes. Rows
/// the column does not reach hold zeroes, so lookups never go out of
/// bounds for taller neighbours.
struct BorderSide {
    row_cut: Vec<u64>,
    row_size: Vec<u64>,
    /// `cut_prefix[i]` counts cut vertices in rows `1..=i`; length rows+1.
    cut_prefix: Vec<u64>,
    size_prefix: Vec<u64>,
    /// Right-closed piles (pp and mp) per row: the sources of level edges.
    star_plus_cut: Vec<u64>,
    star_plus_size: Vec<u64>,
    /// Left-closed piles (pp and pm) per row: the targets of level edges.
    plus_star_cut: Vec<u64>,
    plus_star_size: Vec<u64>,
    /// Cut edges inside the column, which is a clique.
    internal: u64,
    total_cut: u64,
    total_size: u64,
}

fn digest_border(column: &[Bubble], cut: &ColumnCut, rows: usize) -> BorderSide {
    let mut side = BorderSide {
        row_cut: vec![0; rows],
        row_size: vec![0; rows],
        cut_prefix: vec![0; rows + 1],
        size_prefix: vec![0; rows + 1],
        star_plus_cut: vec![0; rows],
        star_plus_size: vec![0; rows],
        plus_star_cut: vec![0; rows],
        plus_star_size: vec![0; rows],
        internal: 0,
        total_cut: 0,
        total_size: 0,
    };
    for (i, bubble) in column.iter().enumerate() {
        let sizes = bubble.quadrant_sizes();
        let c = &cut.counts[i];
        side.row_cut[i] = c.iter().map(|&x| u64::from(x)).sum();
        side.row_size[i] = sizes.iter().sum::<usize>() as u64;
        side.star_plus_cut[i] = u64::from(c[0] + c[2]);
        side.star_plus_size[i] = (sizes[0] + sizes[2]) as u64;
        side.plus_star_cut[i] = u64::from(c[0] + c[1]);
        side.plus_star_size[i] = (sizes[0] + sizes[1]) as u64;
    }
    for i in 0..rows {
        side.cut_prefix[i + 1] = side.cut_prefix[i] + side.row_cut[i];
        side.size_prefix[i + 1] = side.size_prefix[i] + side.row_size[i];
    }
    side.total_cut = side.cut_prefix[rows];
    side.total_size = side.size_prefix[rows];
    side.internal = side.total_cut * (side.total_size - side.total_cut);
    side
}

/// Value of a part with no heavy columns: two borders side by side. Only
/// adjacent columns exchange edges; a virtual border never does.
fn light_pair_value(left: &BorderSide, right: &BorderSide, adjacent: bool) -> u64 {
    let mut value = left.internal + right.internal;
    if adjacent {
        for i in 1..left.row_cut.len() + 1 {
            // Vertices of the left column see every right-column vertex
            // strictly above them, plus the level pairs in their own row.
            let below_cut = right.cut_prefix[i - 1];
            let below_size = right.size_prefix[i - 1];
            value += crossing(
                left.row_cut[i - 1],
                left.row_size[i - 1],
                below_cut,
                below_size,
            );
            value += crossing(
                left.star_plus_cut[i - 1],
                left.star_plus_size[i - 1],
                right.plus_star_cut[i - 1],
                right.plus_star_size[i - 1],
            );
        }
    }
    value
}

/// Per-bubble transition record: the four pile cuts chosen at the slot and
/// the carry the predecessor state held. Both are needed to walk the
/// optimum back; ties prefer the lexicographically smallest record so the
/// result never depends on hash iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Choice {
    b: [u32; 4],
    z: u32,
}

const NO_CHOICE: Choice = Choice { b: [0; 4], z: 0 };

struct Slot {
    row: usize,
    col: usize,
    sizes: [u32; 4],
    total: u64,
    /// Vertices of this column in rows above this slot.
    presize_own: u64,
    /// Vertices of the next run column in rows above; 0 in the last column.
    presize_next: u64,
    /// The slot processed immediately before sits in the same row, one
    /// column left; its right-closed piles are this slot's level partners.
    level_from_state: bool,
    prev_star_size: u64,
}

/// Dynamic program over one heavy run. States are keyed by a mixed-radix
/// integer: the level carry in the least significant position, then the
/// per-column running cut counts.
struct RunDp {
    slots: Vec<Slot>,
    strides: Vec<u64>,
    radix: Vec<u64>,
    ra: u64,
}

impl RunDp {
    fn new(cols: &[&[Bubble]]) -> RunDp {
        let l = cols.len();
        let sizes: Vec<u64> = cols
            .iter()
            .map(|c| c.iter().map(|b| b.size() as u64).sum())
            .collect();
        let ra = 1 + cols
            .iter()
            .flat_map(|c| c.iter())
            .map(|b| (b.pp.len() + b.mp.len()) as u64)
            .max()
            .unwrap_or(0);
        let radix: Vec<u64> = sizes.iter().map(|&s| s + 1).collect();
        let mut space = u128::from(ra);
        for r in &radix {
            space *= u128::from(*r);
        }
        assert!(
            space <= u128::from(u64::MAX),
            "cut state space exceeds 64 bits"
        );
        let mut strides = vec![1u64; l];
        for c in 1..l {
            strides[c] = strides[c - 1] * radix[c - 1];
        }

        let max_rows = cols.iter().map(|c| c.len()).max().unwrap_or(0);
        let mut presize = vec![0u64; l];
        let mut slots = Vec::new();
        for row in 1..=max_rows {
            let mut prev_in_row: Option<usize> = None;
            for (ci, col) in cols.iter().enumerate() {
                if row > col.len() {
                    continue;
                }
                let bubble = &col[row - 1];
                let qs = bubble.quadrant_sizes();
                let level_from_state = ci > 0 && prev_in_row == Some(ci - 1);
                slots.push(Slot {
                    row,
                    col: ci + 1,
                    sizes: qs.map(|s| u32::try_from(s).expect("pile fits in u32")),
                    total: bubble.size() as u64,
                    presize_own: presize[ci],
                    presize_next: if ci + 1 < l { presize[ci + 1] } else { 0 },
                    level_from_state,
                    prev_star_size: if level_from_state {
                        (cols[ci - 1][row - 1].pp.len() + cols[ci - 1][row - 1].mp.len()) as u64
                    } else {
                        0
                    },
                });
                prev_in_row = Some(ci);
            }
            for (ci, col) in cols.iter().enumerate() {
                if row <= col.len() {
                    presize[ci] += col[row - 1].size() as u64;
                }
            }
        }
        RunDp {
            slots,
            strides,
            radix,
            ra,
        }
    }

    /// Runs the program against two fixed border cuts. With `trace` the
    /// per-slot pile choices of one optimum come back as well.
    fn run(
        &self,
        left: &BorderSide,
        right: &BorderSide,
        trace: bool,
    ) -> (u64, Option<Vec<[u32; 4]>>) {
        let l = self.strides.len();
        let seed_value = left.internal + right.internal;
        let mut layers: Vec<HashMap<u64, (u64, Choice)>> = Vec::new();
        let mut current: HashMap<u64, (u64, Choice)> = HashMap::new();
        current.insert(0, (seed_value, NO_CHOICE));
        if trace {
            layers.push(current.clone());
        }

        for slot in &self.slots {
            let c = slot.col;
            let stride = self.strides[c - 1];
            let [q1, q2, q3, q4] = slot.sizes;
            let m = slot.total;
            let mut next: HashMap<u64, (u64, Choice)> =
                HashMap::with_capacity(current.len() * 2);
            for (&key, &(value, _)) in &current {
                let a = key % self.ra;
                let s_own = key / self.ra / stride % self.radix[c - 1];
                let s_next = if c < l {
                    key / self.ra / self.strides[c] % self.radix[c]
                } else {
                    0
                };
                // Terms independent of the own-bubble choice split.
                let border_below_cut;
                let border_below_size;
                if c == 1 {
                    border_below_cut = left.total_cut - left.cut_prefix[slot.row];
                    border_below_size = left.total_size - left.size_prefix[slot.row];
                } else {
                    border_below_cut = 0;
                    border_below_size = 0;
                }
                for b1 in 0..=q1 {
                    for b2 in 0..=q2 {
                        for b3 in 0..=q3 {
                            for b4 in 0..=q4 {
                                let b = u64::from(b1 + b2 + b3 + b4);
                                let mut v = value + b * (m - b);
                                v += crossing(b, m, s_own, slot.presize_own);
                                if c < l {
                                    v += crossing(b, m, s_next, slot.presize_next);
                                } else {
                                    v += crossing(
                                        b,
                                        m,
                                        right.cut_prefix[slot.row - 1],
                                        right.size_prefix[slot.row - 1],
                                    );
                                }
                                let left_closed = u64::from(b1 + b2);
                                let left_closed_size = u64::from(q1 + q2);
                                if c == 1 {
                                    v += crossing(b, m, border_below_cut, border_below_size);
                                    v += crossing(
                                        left.star_plus_cut[slot.row - 1],
                                        left.star_plus_size[slot.row - 1],
                                        left_closed,
                                        left_closed_size,
                                    );
                                } else if slot.level_from_state {
                                    v += crossing(
                                        a,
                                        slot.prev_star_size,
                                        left_closed,
                                        left_closed_size,
                                    );
                                }
                                if c == l {
                                    v += crossing(
                                        u64::from(b1 + b3),
                                        u64::from(q1 + q3),
                                        right.plus_star_cut[slot.row - 1],
                                        right.plus_star_size[slot.row - 1],
                                    );
                                }
                                let new_a = u64::from(b1 + b3);
                                let new_key = key - a + new_a + self.ra * stride * b;
                                let choice = Choice {
                                    b: [b1, b2, b3, b4],
                                    z: a as u32,
                                };
                                match next.entry(new_key) {
                                    std::collections::hash_map::Entry::Vacant(e) => {
                                        e.insert((v, choice));
                                    }
                                    std::collections::hash_map::Entry::Occupied(mut e) => {
                                        let cur = *e.get();
                                        if v > cur.0 || (v == cur.0 && choice < cur.1) {
                                            e.insert((v, choice));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            current = next;
            if trace {
                layers.push(current.clone());
            }
        }

        let (&best_key, &(best_value, _)) = current
            .iter()
            .max_by(|a, b| (a.1).0.cmp(&(b.1).0).then(b.0.cmp(a.0)))
            .expect("seed state always present");
        if !trace {
            return (best_value, None);
        }

        let mut picks = vec![[0u32; 4]; self.slots.len()];
        let mut key = best_key;
        for (t, slot) in self.slots.iter().enumerate().rev() {
            let (_, choice) = layers[t + 1][&key];
            picks[t] = choice.b;
            let b: u64 = choice.b.iter().map(|&x| u64::from(x)).sum();
            let new_a = u64::from(choice.b[0] + choice.b[2]);
            key = key - new_a - self.ra * self.strides[slot.col - 1] * b + u64::from(choice.z);
        }
        debug_assert_eq!(key, 0, "trace must end at the seed state");
        (best_value, Some(picks))
    }
}

struct PartSpec {
    left_col: Option<usize>,
    right_col: Option<usize>,
    run: std::ops::Range<usize>,
}

impl PartSpec {
    fn adjacent_borders(&self) -> bool {
        matches!((self.left_col, self.right_col), (Some(a), Some(b)) if b == a + 1)
    }
}

/// Smallest `count` ids of a pile, in order. Sorts a copy; the model stays
/// untouched so repeated runs stay bit-identical.
fn take_smallest(pile: &[VertexId], count: u32, out: &mut BTreeSet<VertexId>) {
    let mut sorted = pile.to_vec();
    sorted.sort_unstable();
    out.extend(sorted.into_iter().take(count as usize));
}

fn maxcut_impl(
    model: &UBubbleModel,
    heavy: &[bool],
    with_cut: bool,
    parallel: Option<usize>,
) -> (u64, Option<Cut>, usize) {
    let k = model.column_count();
    debug_assert_eq!(heavy.len(), k);
    if k == 0 {
        return (0, with_cut.then(|| Cut::new([])), 0);
    }
    let rows = model.max_rows();

    let lights: Vec<usize> = (1..=k).filter(|&j| !heavy[j - 1]).collect();
    let mut borders: Vec<Option<usize>> = Vec::new();
    if lights.first() != Some(&1) {
        borders.push(None);
    }
    borders.extend(lights.iter().map(|&j| Some(j)));
    if lights.last() != Some(&k) {
        borders.push(None);
    }
    if borders.len() < 2 {
        borders.push(None);
    }

    let parts: Vec<PartSpec> = borders
        .windows(2)
        .map(|w| {
            let start = w[0].map_or(1, |j| j + 1);
            let end = w[1].map_or(k, |j| j - 1);
            debug_assert!((start..=end).all(|j| heavy[j - 1]));
            PartSpec {
                left_col: w[0],
                right_col: w[1],
                run: start..end + 1,
            }
        })
        .collect();

    let empty_column: Vec<Bubble> = Vec::new();
    let sides: Vec<Vec<BorderSide>> = borders
        .iter()
        .map(|b| {
            let column = b.map_or(&empty_column, |j| &model.columns[j - 1]);
            enumerate_column_cuts(column)
                .iter()
                .map(|cut| digest_border(column, cut, rows))
                .collect()
        })
        .collect();

    let pool = match parallel {
        Some(t) if t > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool"),
        ),
        _ => None,
    };

    let tables: Vec<Vec<u64>> = parts
        .iter()
        .enumerate()
        .map(|(t, part)| {
            let run_cols: Vec<&[Bubble]> =
                part.run.clone().map(|j| model.columns[j - 1].as_slice()).collect();
            let dp = (!run_cols.is_empty()).then(|| RunDp::new(&run_cols));
            let (ls, rs) = (&sides[t], &sides[t + 1]);
            let adjacent = part.adjacent_borders();
            let nr = rs.len();
            let cell = |idx: usize| {
                let (il, ir) = (idx / nr, idx % nr);
                match &dp {
                    Some(dp) => dp.run(&ls[il], &rs[ir], false).0,
                    None => light_pair_value(&ls[il], &rs[ir], adjacent),
                }
            };
            match &pool {
                Some(pool) => {
                    pool.install(|| (0..ls.len() * nr).into_par_iter().map(cell).collect())
                }
                None => (0..ls.len() * nr).map(cell).collect(),
            }
        })
        .collect();

    // Chain over border cuts. Every part value carries both of its border
    // cliques, so each interior border's internal edges are subtracted
    // once when the chain moves past it.
    let mut best = vec![0u64; sides[0].len()];
    let mut argmax: Vec<Vec<usize>> = Vec::new();
    for t in 1..borders.len() {
        let table = &tables[t - 1];
        let (nl, nr) = (sides[t - 1].len(), sides[t].len());
        let mut next = vec![0u64; nr];
        let mut arg = vec![0usize; nr];
        for ir in 0..nr {
            let mut chosen: Option<(u64, usize)> = None;
            for il in 0..nl {
                let overlap = if t >= 2 { sides[t - 1][il].internal } else { 0 };
                let cand = best[il] - overlap + table[il * nr + ir];
                if chosen.is_none_or(|(v, _)| cand > v) {
                    chosen = Some((cand, il));
                }
            }
            let (v, il) = chosen.expect("at least one cut per border");
            next[ir] = v;
            arg[ir] = il;
        }
        best = next;
        argmax.push(arg);
    }
    let (last_idx, &value) = best
        .iter()
        .enumerate()
        .max_by(|&(ia, va), &(ib, vb)| va.cmp(vb).then(ib.cmp(&ia)))
        .expect("at least one cut per border");

    if !with_cut {
        return (value, None, parts.len());
    }

    let mut chosen = vec![0usize; borders.len()];
    chosen[borders.len() - 1] = last_idx;
    for t in (1..borders.len()).rev() {
        chosen[t - 1] = argmax[t - 1][chosen[t]];
    }

    let mut members: BTreeSet<VertexId> = BTreeSet::new();
    for (t, border) in borders.iter().enumerate() {
        if let Some(j) = border {
            let column = &model.columns[j - 1];
            let cuts = enumerate_column_cuts(column);
            let cut = &cuts[chosen[t]];
            for (i, bubble) in column.iter().enumerate() {
                for (q, quadrant) in Quadrant::ALL.iter().enumerate() {
                    take_smallest(bubble.quadrant(*quadrant), cut.counts[i][q], &mut members);
                }
            }
        }
    }
    for (t, part) in parts.iter().enumerate() {
        if part.run.is_empty() {
            continue;
        }
        let run_cols: Vec<&[Bubble]> =
            part.run.clone().map(|j| model.columns[j - 1].as_slice()).collect();
        let dp = RunDp::new(&run_cols);
        let (_, picks) = dp.run(&sides[t][chosen[t]], &sides[t + 1][chosen[t + 1]], true);
        let picks = picks.expect("trace requested");
        for (slot, pick) in dp.slots.iter().zip(picks) {
            let bubble = &run_cols[slot.col - 1][slot.row - 1];
            for (q, quadrant) in Quadrant::ALL.iter().enumerate() {
                take_smallest(bubble.quadrant(*quadrant), pick[q], &mut members);
            }
        }
    }
    let cut = Cut::new(members);
    debug_assert_eq!(
        cut_size(&graph_of_model(model), &cut).expect("cut members come from the model"),
        value,
        "materialized cut must reach the computed value"
    );
    (value, Some(cut), parts.len())
}

/// Maximum cut of the model's graph via the heavy/light decomposition.
pub fn maxcut(model: &UBubbleModel, opts: &MaxcutOptions) -> MaxcutResult {
    let threshold = opts
        .threshold
        .unwrap_or_else(|| ceil_sqrt(model.vertex_count()));
    let heavy: Vec<bool> = (1..=model.column_count())
        .map(|j| model.column_size(j) > threshold)
        .collect();
    let (value, cut, parts) = maxcut_impl(model, &heavy, opts.with_cut, opts.parallel);
    MaxcutResult {
        value,
        cut,
        threshold: Some(threshold),
        parts,
    }
}

/// Maximum cut specialised to models with few columns: closed forms for
/// one column, merged piles for two, and the general program with every
/// column treated as heavy beyond that. Polynomial for any fixed column
/// count.
pub fn maxcut_bounded_columns(model: &UBubbleModel, with_cut: bool) -> MaxcutResult {
    let k = model.column_count();
    let n = model.vertex_count() as u64;
    let (value, cut) = match k {
        0 => (0, with_cut.then(|| Cut::new([]))),
        1 => {
            // A single column is a clique: any balanced split is optimal.
            let value = (n / 2) * n.div_ceil(2);
            let cut = with_cut.then(|| {
                let mut ids: Vec<VertexId> = model.all_vertices().collect();
                ids.sort_unstable();
                Cut::new(ids.into_iter().take((n / 2) as usize))
            });
            (value, cut)
        }
        2 => bounded_two_columns(model, with_cut),
        _ => {
            let heavy = vec![true; k];
            let (value, cut, _) = maxcut_impl(model, &heavy, with_cut, None);
            (value, cut)
        }
    };
    MaxcutResult {
        value,
        cut,
        threshold: None,
        parts: 1.min(k),
    }
}

/// Two-column program. Within a single column pair the quadrants collapse:
/// only the right-closed split matters on the left, only the left-closed
/// split on the right, which shrinks the per-bubble choice space to two
/// piles.
fn bounded_two_columns(model: &UBubbleModel, with_cut: bool) -> (u64, Option<Cut>) {
    #[derive(Clone, Copy)]
    struct Choice2 {
        x: u32,
        y: u32,
        z: u32,
    }
    struct Slot2 {
        row: usize,
        col: usize,
        // First pile: right-closed (left column) or left-closed (right
        // column); second pile: the complement.
        piles: [u64; 2],
        total: u64,
        presize_own: u64,
        presize_next: u64,
        level_partner: bool,
        prev_star_size: u64,
    }

    let c1 = &model.columns[0];
    let c2 = &model.columns[1];
    let (m1, m2): (u64, u64) = (
        c1.iter().map(|b| b.size() as u64).sum(),
        c2.iter().map(|b| b.size() as u64).sum(),
    );
    let ra = 1 + c1
        .iter()
        .map(|b| (b.pp.len() + b.mp.len()) as u64)
        .max()
        .unwrap_or(0);
    let (r1, stride2) = (m1 + 1, m1 + 1);
    let r2 = m2 + 1;
    assert!(
        u128::from(ra) * u128::from(r1) * u128::from(r2) <= u128::from(u64::MAX),
        "cut state space exceeds 64 bits"
    );

    let mut slots = Vec::new();
    let (mut p1, mut p2) = (0u64, 0u64);
    for row in 1..=c1.len().max(c2.len()) {
        if row <= c1.len() {
            let b = &c1[row - 1];
            slots.push(Slot2 {
                row,
                col: 1,
                piles: [
                    (b.pp.len() + b.mp.len()) as u64,
                    (b.pm.len() + b.mm.len()) as u64,
                ],
                total: b.size() as u64,
                presize_own: p1,
                presize_next: p2,
                level_partner: false,
                prev_star_size: 0,
            });
        }
        if row <= c2.len() {
            let b = &c2[row - 1];
            let level_partner = row <= c1.len();
            slots.push(Slot2 {
                row,
                col: 2,
                piles: [
                    (b.pp.len() + b.pm.len()) as u64,
                    (b.mp.len() + b.mm.len()) as u64,
                ],
                total: b.size() as u64,
                presize_own: p2,
                presize_next: 0,
                level_partner,
                prev_star_size: if level_partner {
                    (c1[row - 1].pp.len() + c1[row - 1].mp.len()) as u64
                } else {
                    0
                },
            });
        }
        if row <= c1.len() {
            p1 += c1[row - 1].size() as u64;
        }
        if row <= c2.len() {
            p2 += c2[row - 1].size() as u64;
        }
    }

    let mut layers: Vec<HashMap<u64, (u64, Choice2)>> = Vec::new();
    let mut current: HashMap<u64, (u64, Choice2)> = HashMap::new();
    current.insert(0, (0, Choice2 { x: 0, y: 0, z: 0 }));
    if with_cut {
        layers.push(current.clone());
    }
    for slot in &slots {
        let mut next: HashMap<u64, (u64, Choice2)> = HashMap::with_capacity(current.len() * 2);
        for (&key, &(value, _)) in &current {
            let a = key % ra;
            let s1 = key / ra % r1;
            let s2 = key / ra / stride2 % r2;
            let (s_own, s_next) = if slot.col == 1 { (s1, s2) } else { (s2, 0) };
            for x in 0..=slot.piles[0] {
                for y in 0..=slot.piles[1] {
                    let b = x + y;
                    let mut v = value + b * (slot.total - b);
                    v += crossing(b, slot.total, s_own, slot.presize_own);
                    if slot.col == 1 {
                        v += crossing(b, slot.total, s_next, slot.presize_next);
                    } else if slot.level_partner {
                        v += crossing(a, slot.prev_star_size, x, slot.piles[0]);
                    }
                    let new_a = if slot.col == 1 { x } else { 0 };
                    let delta = if slot.col == 1 { b } else { stride2 * b };
                    let new_key = key - a + new_a + ra * delta;
                    let choice = Choice2 {
                        x: x as u32,
                        y: y as u32,
                        z: a as u32,
                    };
                    match next.entry(new_key) {
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert((v, choice));
                        }
                        std::collections::hash_map::Entry::Occupied(mut e) => {
                            let cur = *e.get();
                            let cand_key = (choice.x, choice.y, choice.z);
                            let cur_key = (cur.1.x, cur.1.y, cur.1.z);
                            if v > cur.0 || (v == cur.0 && cand_key < cur_key) {
                                e.insert((v, choice));
                            }
                        }
                    }
                }
            }
        }
        current = next;
        if with_cut {
            layers.push(current.clone());
        }
    }

    let (&best_key, &(best_value, _)) = current
        .iter()
        .max_by(|a, b| (a.1).0.cmp(&(b.1).0).then(b.0.cmp(a.0)))
        .expect("seed state always present");
    if !with_cut {
        return (best_value, None);
    }

    let mut members: BTreeSet<VertexId> = BTreeSet::new();
    let mut key = best_key;
    for (t, slot) in slots.iter().enumerate().rev() {
        let (_, choice) = layers[t + 1][&key];
        let b = u64::from(choice.x) + u64::from(choice.y);
        let new_a = if slot.col == 1 { u64::from(choice.x) } else { 0 };
        let delta = if slot.col == 1 { b } else { stride2 * b };
        key = key - new_a - ra * delta + u64::from(choice.z);
        let bubble = &model.columns[slot.col - 1][slot.row - 1];
        let (first, second): (Vec<VertexId>, Vec<VertexId>) = if slot.col == 1 {
            (
                bubble.pp.iter().chain(&bubble.mp).copied().collect(),
                bubble.pm.iter().chain(&bubble.mm).copied().collect(),
            )
        } else {
            (
                bubble.pp.iter().chain(&bubble.pm).copied().collect(),
                bubble.mp.iter().chain(&bubble.mm).copied().collect(),
            )
        };
        take_smallest(&first, choice.x, &mut members);
        take_smallest(&second, choice.y, &mut members);
    }
    debug_assert_eq!(key, 0, "trace must end at the seed state");
    let cut = Cut::new(members);
    debug_assert_eq!(
        cut_size(&graph_of_model(model), &cut).expect("cut members come from the model"),
        best_value,
    );
    (best_value, Some(cut))
}

/// The value the refuted recurrence assigns to [`counterexample_model`].
/// No actual cut of that graph reaches it.
pub const REFUTED_CLAIM: u64 = 8;

/// Fixed two-column model on six vertices. An appealing recurrence that
/// splits the cut column by column reports 8 here; exhaustive search shows
/// the true maximum cut is 7.
pub fn counterexample_model() -> UBubbleModel {
    let bubble = |pm: &[VertexId]| Bubble {
        pm: pm.to_vec(),
        ..Bubble::default()
    };
    UBubbleModel {
        columns: vec![
            vec![bubble(&[1]), bubble(&[2])],
            vec![bubble(&[3, 4, 5]), bubble(&[6])],
        ],
    }
}

#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub bruteforce: u64,
    pub dp: u64,
    /// What the refuted recurrence would report.
    pub claimed: u64,
    /// One optimal cut, as a sorted vertex list.
    pub witness: Vec<VertexId>,
}

/// Evaluates the counterexample three ways: exhaustive search, the exact
/// program of this module, and the refuted claim.
pub fn counterexample() -> CounterexampleReport {
    let model = counterexample_model();
    let g = graph_of_model(&model);
    let (bruteforce, _) = maxcut_bruteforce(&g, false);
    let res = maxcut(
        &model,
        &MaxcutOptions {
            with_cut: true,
            ..MaxcutOptions::default()
        },
    );
    let witness = res
        .cut
        .map(|c| c.members.into_iter().collect())
        .unwrap_or_default();
    CounterexampleReport {
        bruteforce,
        dp: res.value,
        claimed: REFUTED_CLAIM,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::build_model;
    use crate::interval::{IntervalKind, Representation, UnitInterval};
    use crate::rational::parse_rational;

    fn iv(vertex: VertexId, kind: &str, left: &str) -> UnitInterval {
        UnitInterval::new(
            vertex,
            IntervalKind::parse(kind).unwrap(),
            parse_rational(left).unwrap(),
        )
    }

    fn fixtures() -> Vec<Representation> {
        vec![
            // Mixed kinds with level edges and two columns.
            Representation::new(vec![
                iv(0, "++", "0"),
                iv(1, "+-", "0"),
                iv(2, "-+", "1/2"),
                iv(3, "++", "1"),
                iv(4, "--", "1"),
            ]),
            // Disconnected, with an empty bubble row in the second column.
            Representation::new(vec![iv(0, "++", "0"), iv(1, "++", "3/2"), iv(2, "--", "3/2")]),
            // Staircase with three columns and twins.
            Representation::new(vec![
                iv(0, "++", "0"),
                iv(1, "++", "0"),
                iv(2, "-+", "1/2"),
                iv(3, "++", "3/2"),
                iv(4, "+-", "5/2"),
                iv(5, "--", "3"),
            ]),
            // Single tall clique.
            Representation::new(vec![
                iv(0, "++", "0"),
                iv(1, "--", "0"),
                iv(2, "+-", "1/4"),
                iv(3, "-+", "1/2"),
                iv(4, "++", "3/4"),
            ]),
        ]
    }

    #[test]
    fn counterexample_graph_is_the_fixed_one() {
        let g = graph_of_model(&counterexample_model());
        assert_eq!(g.vertex_count(), 6);
        let edges: Vec<(u32, u32)> = g.edges().collect();
        assert_eq!(
            edges,
            vec![
                (1, 2),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 4),
                (3, 5),
                (3, 6),
                (4, 5),
                (4, 6),
                (5, 6)
            ]
        );
    }

    #[test]
    fn counterexample_refutes_the_claim() {
        let report = counterexample();
        assert_eq!(report.bruteforce, 7);
        assert_eq!(report.dp, 7);
        assert_eq!(report.claimed, 8);
        assert!(report.dp < report.claimed);
        let cut = Cut::new(report.witness);
        let g = graph_of_model(&counterexample_model());
        assert_eq!(cut_size(&g, &cut).unwrap(), 7);
    }

    #[test]
    fn counterexample_value_holds_for_every_threshold() {
        let model = counterexample_model();
        for threshold in 0..=6 {
            let res = maxcut(
                &model,
                &MaxcutOptions {
                    threshold: Some(threshold),
                    with_cut: true,
                    parallel: None,
                },
            );
            assert_eq!(res.value, 7, "threshold {threshold}");
            let cut = res.cut.unwrap();
            let g = graph_of_model(&model);
            assert_eq!(cut_size(&g, &cut).unwrap(), 7, "threshold {threshold}");
        }
    }

    #[test]
    fn bruteforce_on_known_graphs() {
        let mut k4 = Graph::new();
        for v in 0..4 {
            k4.insert_vertex(v);
        }
        for a in 0..4 {
            for b in a + 1..4 {
                k4.add_edge(a, b);
            }
        }
        assert_eq!(maxcut_bruteforce(&k4, false).0, 4);

        let mut p4 = Graph::new();
        for v in 0..4 {
            p4.insert_vertex(v);
        }
        p4.add_edge(0, 1);
        p4.add_edge(1, 2);
        p4.add_edge(2, 3);
        let (value, cut) = maxcut_bruteforce(&p4, true);
        assert_eq!(value, 3);
        assert_eq!(cut_size(&p4, &cut.unwrap()).unwrap(), 3);
    }

    #[test]
    fn dp_matches_bruteforce_on_fixtures_for_all_thresholds() {
        for rep in fixtures() {
            let model = build_model(&rep).unwrap();
            let g = graph_of_model(&model);
            let (want, _) = maxcut_bruteforce(&g, false);
            for threshold in [0, 1, 2, 3, 10] {
                let res = maxcut(
                    &model,
                    &MaxcutOptions {
                        threshold: Some(threshold),
                        with_cut: true,
                        parallel: None,
                    },
                );
                assert_eq!(res.value, want, "{rep:?} threshold {threshold}");
                let cut = res.cut.unwrap();
                assert_eq!(cut_size(&g, &cut).unwrap(), want);
            }
        }
    }

    #[test]
    fn bounded_column_algorithm_agrees_with_the_general_one() {
        for rep in fixtures() {
            let model = build_model(&rep).unwrap();
            let g = graph_of_model(&model);
            let (want, _) = maxcut_bruteforce(&g, false);
            let res = maxcut_bounded_columns(&model, true);
            assert_eq!(res.value, want, "{rep:?}");
            assert_eq!(cut_size(&g, &res.cut.unwrap()).unwrap(), want);
        }
    }

    #[test]
    fn bounded_single_column_closed_form() {
        let rep = Representation::new(vec![
            iv(0, "++", "0"),
            iv(1, "--", "0"),
            iv(2, "+-", "1/4"),
            iv(3, "-+", "1/2"),
            iv(4, "++", "3/4"),
        ]);
        let model = build_model(&rep).unwrap();
        assert_eq!(model.column_count(), 1);
        let res = maxcut_bounded_columns(&model, true);
        assert_eq!(res.value, 6);
        let g = graph_of_model(&model);
        assert_eq!(cut_size(&g, &res.cut.unwrap()).unwrap(), 6);
    }

    #[test]
    fn empty_model_has_empty_cut() {
        let model = UBubbleModel::default();
        let res = maxcut(&model, &MaxcutOptions::default());
        assert_eq!(res.value, 0);
        assert_eq!(res.parts, 0);
        let res = maxcut_bounded_columns(&model, true);
        assert_eq!(res.value, 0);
        assert_eq!(res.cut.unwrap().members.len(), 0);
    }

    #[test]
    fn parallel_result_is_identical_to_sequential() {
        let model = counterexample_model();
        let base = maxcut(
            &model,
            &MaxcutOptions {
                threshold: Some(2),
                with_cut: true,
                parallel: Some(1),
            },
        );
        let par = maxcut(
            &model,
            &MaxcutOptions {
                threshold: Some(2),
                with_cut: true,
                parallel: Some(4),
            },
        );
        assert_eq!(base.value, par.value);
        assert_eq!(
            base.cut.as_ref().map(|c| &c.members),
            par.cut.as_ref().map(|c| &c.members)
        );
    }

    #[test]
    fn crossing_counts_join_edges() {
        assert_eq!(crossing(0, 3, 0, 2), 0);
        assert_eq!(crossing(3, 3, 0, 2), 6);
        assert_eq!(crossing(1, 2, 1, 2), 2);
    }
}
