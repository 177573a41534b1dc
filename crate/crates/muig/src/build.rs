//! One-pass construction of a bubble model from a representation, the
//! reverse direction, and the counting algorithms that read the model:
//! independence number, maximum clique, column bounds.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::interval::{Representation, RepresentationError, UnitInterval};
use crate::model::{Bubble, Quadrant, UBubbleModel};
use crate::rational::Rational;

/// One of the construction invariants failed while checks were enabled.
///
/// The index refers to the path invariants, in order: 1 processing follows
/// the left-endpoint order, 2 relative path order never changes, 3 level
/// arcs exactly mark touching endpoints and step columns up, 4 columns are
/// monotone in the processing order, 5 the predecessor pointer is the
/// closest path ancestor in the previous column, 6 path order within a
/// column equals the processing order.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("construction property {property} violated")]
pub struct PropertyViolation {
    pub property: u8,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    Property(#[from] PropertyViolation),
}

/// Bubbles in left-endpoint order: vertices grouped by exact left endpoint,
/// each group split into quadrants by kind.
fn collect_bubbles(rep: &Representation) -> Vec<(Rational, Bubble)> {
    let mut groups: BTreeMap<Rational, Bubble> = BTreeMap::new();
    for iv in &rep.intervals {
        groups
            .entry(iv.left)
            .or_default()
            .quadrant_mut(Quadrant::of_kind(iv.kind))
            .push(iv.vertex);
    }
    groups.into_iter().collect()
}

/// Path state over bubbles. Node ids: 0 is the virtual start, bubble `s`
/// (0-based left-endpoint order) is node `s + 1`, the virtual end is the
/// last node. `level[x]` flags the outgoing arc of node `x`.
struct PathState {
    lefts: Vec<Rational>,
    next: Vec<usize>,
    level: Vec<bool>,
    col: Vec<usize>,
    prev: Vec<Option<usize>>,
    top: Vec<usize>,
    processed: usize,
    check: bool,
    order_before: Vec<usize>,
}

const START: usize = 0;

impl PathState {
    fn new(lefts: Vec<Rational>, check: bool) -> Self {
        let n = lefts.len();
        let end = n + 1;
        let mut next = vec![usize::MAX; n + 2];
        next[START] = end;
        PathState {
            lefts,
            next,
            level: vec![false; n + 2],
            col: vec![0; n],
            prev: vec![None; n],
            top: Vec::new(),
            processed: 0,
            check,
            order_before: Vec::new(),
        }
    }

    fn end(&self) -> usize {
        self.lefts.len() + 1
    }

    fn node(bubble: usize) -> usize {
        bubble + 1
    }

    fn bubble_of(node: usize) -> usize {
        node - 1
    }

    fn is_bubble(&self, node: usize) -> bool {
        node != START && node != self.end()
    }

    fn left(&self, bubble: usize) -> Rational {
        self.lefts[bubble]
    }

    fn right(&self, bubble: usize) -> Rational {
        self.lefts[bubble] + Rational::from_integer(1)
    }

    /// Latest earlier bubble whose right endpoint is at most `l`, if any.
    fn prev_of(&self, l: Rational) -> Option<usize> {
        let one = Rational::from_integer(1);
        let p = self.lefts.partition_point(|&lb| lb + one <= l);
        p.checked_sub(1)
    }

    fn insert_after(&mut self, x: usize, bubble: usize, level_arc: bool) {
        debug_assert!(
            !self.level[x],
            "insertion would displace a level arc, breaking invariant 3"
        );
        let node = Self::node(bubble);
        self.next[node] = self.next[x];
        self.level[node] = false;
        self.next[x] = node;
        self.level[x] = level_arc;
    }

    fn path_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.processed);
        let mut node = self.next[START];
        while node != self.end() {
            order.push(node);
            node = self.next[node];
        }
        order
    }

    fn process(&mut self, i: usize) -> Result<(), PropertyViolation> {
        if self.check {
            self.order_before = self.path_order();
        }
        if i == 0 {
            self.col[0] = 1;
            self.top = vec![0];
            self.insert_after(START, 0, false);
        } else {
            let l = self.left(i);
            self.prev[i] = self.prev_of(l);
            let top_curr = *self.top.last().expect("column 1 exists after bubble 1");
            if l >= self.right(top_curr) {
                // Reaching past the current top opens a new column; on exact
                // touch the old top becomes prev and links level below.
                self.col[i] = self.top.len() + 1;
                self.top.push(i);
                debug_assert!(l > self.right(top_curr) || self.prev[i] == Some(top_curr));
            } else {
                self.col[i] = self.top.len();
            }
            match self.prev[i] {
                Some(p) if self.right(p) == l => {
                    self.insert_after(Self::node(p), i, true);
                }
                _ => {
                    if self.prev[i - 1] == self.prev[i] {
                        self.insert_after(Self::node(i - 1), i, false);
                    } else {
                        let anchor = match self.prev[i] {
                            Some(p) => Self::node(p),
                            None => START,
                        };
                        self.insert_after(anchor, i, false);
                    }
                }
            }
        }
        self.processed = i + 1;
        if self.check {
            self.check_properties()
        } else {
            Ok(())
        }
    }

    fn check_properties(&self) -> Result<(), PropertyViolation> {
        let order = self.path_order();
        let fail = |property| Err(PropertyViolation { property });

        // 2: previous relative order is a subsequence of the new order.
        let mut it = order.iter();
        for &old in &self.order_before {
            if !it.by_ref().any(|&n| n == old) {
                return fail(2);
            }
        }

        // 3: level arcs between bubbles mark exactly touching endpoints and
        // go to a later column; virtual arcs are never level.
        let mut node = START;
        loop {
            let nxt = self.next[node];
            if self.is_bubble(node) && self.is_bubble(nxt) {
                let (a, b) = (Self::bubble_of(node), Self::bubble_of(nxt));
                if self.level[node] != (self.right(a) == self.left(b)) {
                    return fail(3);
                }
                if self.level[node] && self.col[a] >= self.col[b] {
                    return fail(3);
                }
            } else if self.level[node] {
                return fail(3);
            }
            if nxt == self.end() {
                break;
            }
            node = nxt;
        }

        // 4: columns never decrease along the processing order.
        for s in 1..self.processed {
            if self.col[s - 1] > self.col[s] {
                return fail(4);
            }
        }

        // 5: prev is the closest path ancestor in the previous column.
        for (pos, &node) in order.iter().enumerate() {
            let b = Self::bubble_of(node);
            let want = order[..pos]
                .iter()
                .rev()
                .map(|&n| Self::bubble_of(n))
                .find(|&a| self.col[a] == self.col[b] - 1);
            if b != 0 && self.prev[b] != want {
                return fail(5);
            }
        }

        // 6: within a column, path order equals the processing order.
        for c in 1..=self.top.len() {
            let in_col: Vec<usize> = order
                .iter()
                .map(|&n| Self::bubble_of(n))
                .filter(|&b| self.col[b] == c)
                .collect();
            if in_col.windows(2).any(|w| w[0] > w[1]) {
                return fail(6);
            }
        }
        Ok(())
    }

    /// Walks the path once, assigning rows; level arcs keep the row.
    fn assign_rows(&self) -> Vec<usize> {
        let mut rows = vec![0; self.lefts.len()];
        let mut row = 0usize;
        let mut node = START;
        loop {
            let step = !self.level[node];
            let nxt = self.next[node];
            if nxt == self.end() {
                break;
            }
            if step {
                row += 1;
            }
            rows[Self::bubble_of(nxt)] = row;
            node = nxt;
        }
        rows
    }
}

fn assemble(
    seeds: Vec<(Rational, Bubble)>,
    check: bool,
) -> Result<UBubbleModel, PropertyViolation> {
    if seeds.is_empty() {
        return Ok(UBubbleModel::default());
    }
    let lefts: Vec<Rational> = seeds.iter().map(|(l, _)| *l).collect();
    let mut path = PathState::new(lefts, check);
    for i in 0..seeds.len() {
        path.process(i)?;
    }
    let rows = path.assign_rows();
    let k = path.top.len();
    let mut columns: Vec<Vec<Bubble>> = vec![Vec::new(); k];
    for (s, (_, bubble)) in seeds.into_iter().enumerate() {
        let (row, col) = (rows[s], path.col[s]);
        let column = &mut columns[col - 1];
        if column.len() < row {
            column.resize_with(row, Bubble::default);
        }
        debug_assert!(column[row - 1].is_empty(), "two bubbles in one cell");
        column[row - 1] = bubble;
    }
    Ok(UBubbleModel { columns })
}

/// Builds the bubble model of a representation in one left-to-right pass.
pub fn build_model(rep: &Representation) -> Result<UBubbleModel, RepresentationError> {
    rep.validate()?;
    Ok(assemble(collect_bubbles(rep), false).expect("checks disabled"))
}

/// Like [`build_model`], but verifies the path invariants after every
/// insertion. Quadratic per step; meant for debugging and small inputs.
pub fn build_model_checked(rep: &Representation) -> Result<UBubbleModel, BuildError> {
    rep.validate()?;
    Ok(assemble(collect_bubbles(rep), true)?)
}

/// Splits the representation into connected components along the line,
/// builds each component separately and concatenates the models, shifting
/// each component's rows below the previous component's last column.
pub fn build_model_per_component(
    rep: &Representation,
) -> Result<UBubbleModel, RepresentationError> {
    rep.validate()?;
    let mut intervals: Vec<&UnitInterval> = rep.intervals.iter().collect();
    intervals.sort_by(
        |a, b| match a.left.cmp(&b.left) {
            // Left-closed starts before left-open at the same point.
            std::cmp::Ordering::Equal => b.kind.left_closed().cmp(&a.kind.left_closed()),
            other => other,
        },
    );

    let mut components: Vec<Vec<UnitInterval>> = Vec::new();
    let mut reach: Option<(Rational, bool)> = None;
    for iv in intervals {
        let starts_new = match &reach {
            None => true,
            Some((max_r, closed)) => {
                iv.left > *max_r || (iv.left == *max_r && !(*closed && iv.kind.left_closed()))
            }
        };
        if starts_new {
            components.push(Vec::new());
            reach = None;
        }
        let r = iv.right();
        let rc = iv.kind.right_closed();
        reach = Some(match reach {
            None => (r, rc),
            Some((max_r, closed)) => match r.cmp(&max_r) {
                std::cmp::Ordering::Greater => (r, rc),
                std::cmp::Ordering::Equal => (max_r, closed || rc),
                std::cmp::Ordering::Less => (max_r, closed),
            },
        });
        components.last_mut().unwrap().push(iv.clone());
    }

    let mut columns: Vec<Vec<Bubble>> = Vec::new();
    let mut offset = 0usize;
    for component in components {
        let part = assemble(collect_bubbles(&Representation::new(component)), false)
            .expect("checks disabled");
        let last_height = part.columns.last().map_or(0, |c| c.len());
        for mut column in part.columns {
            let mut padded = Vec::with_capacity(offset + column.len());
            padded.resize_with(offset, Bubble::default);
            padded.append(&mut column);
            columns.push(padded);
        }
        offset += last_height;
    }
    Ok(UBubbleModel { columns })
}

/// Reads a representation back off a model: the vertex in row `i`, column
/// `j` gets the left endpoint `j + (i-1) * e` where `e = 1 / max rows`.
pub fn model_to_intervals(model: &UBubbleModel) -> Representation {
    let max_rows = model.max_rows();
    let mut intervals = Vec::with_capacity(model.vertex_count());
    for (cj, column) in model.columns.iter().enumerate() {
        for (ri, bubble) in column.iter().enumerate() {
            let left = Rational::from_integer(cj as i64 + 1)
                + Rational::new(ri as i64, max_rows.max(1) as i64);
            for q in Quadrant::ALL {
                for &v in bubble.quadrant(q) {
                    intervals.push(UnitInterval::new(v, q.kind(), left));
                }
            }
        }
    }
    Representation::new(intervals)
}

/// Independence number of the representation by the exchange-greedy sweep:
/// repeatedly take the interval whose right end comes first, skipping
/// intervals that meet the last chosen one. Open right ends sort before
/// closed ones at the same coordinate.
pub fn compute_alpha(rep: &Representation) -> usize {
    let mut order: Vec<&UnitInterval> = rep.intervals.iter().collect();
    order.sort_by(|a, b| {
        (a.left, a.kind.right_closed()).cmp(&(b.left, b.kind.right_closed()))
    });
    let mut chosen: Option<&UnitInterval> = None;
    let mut count = 0;
    for iv in order {
        if chosen.is_none_or(|c| !c.intersects(iv)) {
            chosen = Some(iv);
            count += 1;
        }
    }
    count
}

/// Maximum clique size, read off the model column pair by column pair.
///
/// For consecutive columns the largest clique takes a suffix of the left
/// column below a split row, a prefix of the right column above it, and the
/// best completion at the split row itself: the left bubble, the right
/// bubble, or the level pair (right-closed left side plus left-closed right
/// side).
pub fn max_clique(model: &UBubbleModel) -> usize {
    let k = model.column_count();
    if k == 0 {
        return 0;
    }
    if k == 1 {
        return model.column_size(1);
    }
    let mut best = 0;
    for j in 1..k {
        let r_left = model.rows_in_column(j);
        let r_right = model.rows_in_column(j + 1);
        let left_sizes: Vec<usize> = model.columns[j - 1].iter().map(|b| b.size()).collect();
        let right_sizes: Vec<usize> = model.columns[j].iter().map(|b| b.size()).collect();
        let mut prefix_right = 0usize;
        for i in 1..=r_right {
            let suffix_left: usize = if i < r_left {
                left_sizes[i..].iter().sum()
            } else {
                0
            };
            let split = if i <= r_left {
                let left = &model.columns[j - 1][i - 1];
                let right = &model.columns[j][i - 1];
                left.size()
                    .max(right.size())
                    .max(left.right_closed_count() + right.left_closed_count())
            } else {
                right_sizes[i - 1]
            };
            best = best.max(suffix_left + prefix_right + split);
            prefix_right += right_sizes[i - 1];
        }
    }
    best
}

/// The number of columns pins the independence number into `[ceil(k/2), k]`.
pub fn column_alpha_bounds(model: &UBubbleModel) -> (usize, usize) {
    let k = model.column_count();
    (k.div_ceil(2), k)
}
