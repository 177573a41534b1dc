//! Bubble models: the two-dimensional structure behind a mixed unit
//! interval graph.
//!
//! A model is a list of columns; a column is a list of bubbles indexed by
//! row (1-based, top to bottom); a bubble holds the vertices whose intervals
//! share a left endpoint, split into four quadrants by interval kind.
//! Edges are read off positionally: same column, or consecutive columns with
//! the left vertex strictly lower, or consecutive columns in the same row
//! where the left vertex is right-closed and the right vertex left-closed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::interval::IntervalKind;

/// Quadrants of a bubble in the canonical `(left sign, right sign)` order
/// used for DP transition tuples and tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    Pp,
    Pm,
    Mp,
    Mm,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Pp, Quadrant::Pm, Quadrant::Mp, Quadrant::Mm];

    pub fn kind(self) -> IntervalKind {
        match self {
            Quadrant::Pp => IntervalKind::Closed,
            Quadrant::Pm => IntervalKind::ClosedOpen,
            Quadrant::Mp => IntervalKind::OpenClosed,
            Quadrant::Mm => IntervalKind::Open,
        }
    }

    pub fn of_kind(kind: IntervalKind) -> Quadrant {
        match kind {
            IntervalKind::Closed => Quadrant::Pp,
            IntervalKind::ClosedOpen => Quadrant::Pm,
            IntervalKind::OpenClosed => Quadrant::Mp,
            IntervalKind::Open => Quadrant::Mm,
        }
    }
}

/// Vertices sharing a left endpoint, split by interval kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bubble {
    #[serde(default)]
    pub pp: Vec<VertexId>,
    #[serde(default)]
    pub pm: Vec<VertexId>,
    #[serde(default)]
    pub mp: Vec<VertexId>,
    #[serde(default)]
    pub mm: Vec<VertexId>,
}

impl Bubble {
    pub fn quadrant(&self, q: Quadrant) -> &Vec<VertexId> {
        match q {
            Quadrant::Pp => &self.pp,
            Quadrant::Pm => &self.pm,
            Quadrant::Mp => &self.mp,
            Quadrant::Mm => &self.mm,
        }
    }

    pub fn quadrant_mut(&mut self, q: Quadrant) -> &mut Vec<VertexId> {
        match q {
            Quadrant::Pp => &mut self.pp,
            Quadrant::Pm => &mut self.pm,
            Quadrant::Mp => &mut self.mp,
            Quadrant::Mm => &mut self.mm,
        }
    }

    pub fn size(&self) -> usize {
        self.pp.len() + self.pm.len() + self.mp.len() + self.mm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    /// Sizes in quadrant order `(pp, pm, mp, mm)`.
    pub fn quadrant_sizes(&self) -> [usize; 4] {
        [self.pp.len(), self.pm.len(), self.mp.len(), self.mm.len()]
    }

    /// Vertices whose interval is right-closed (kinds `++` and `-+`).
    pub fn right_closed(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pp.iter().chain(self.mp.iter()).copied()
    }

    /// Vertices whose interval is left-closed (kinds `++` and `+-`).
    pub fn left_closed(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pp.iter().chain(self.pm.iter()).copied()
    }

    pub fn right_closed_count(&self) -> usize {
        self.pp.len() + self.mp.len()
    }

    pub fn left_closed_count(&self) -> usize {
        self.pp.len() + self.pm.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pp
            .iter()
            .chain(self.pm.iter())
            .chain(self.mp.iter())
            .chain(self.mm.iter())
            .copied()
    }
}

/// A bubble model. `columns[j][i]` is the bubble in column `j+1`, row `i+1`;
/// columns are stored dense, so leading bubbles of a column may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UBubbleModel {
    pub columns: Vec<Vec<Bubble>>,
}

/// Validity conditions a model can break, with 1-based positions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelViolation {
    #[error("column {0} has no nonempty bubble")]
    EmptyColumn(usize),
    #[error("row {0} has no nonempty bubble in any column")]
    EmptyRow(usize),
    #[error("column {0} ends with an empty bubble")]
    EmptyColumnEnd(usize),
    #[error("column 1 must start at row 1, its top bubble is at row {0}")]
    FirstColumnTop(usize),
    #[error("tops must not rise: top({j}) = {top}, top({}) = {next_top}", j + 1)]
    TopOrder { j: usize, top: usize, next_top: usize },
    #[error("vertex {0} appears more than once")]
    DuplicateVertex(VertexId),
}

impl UBubbleModel {
    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Rows of column `j` (1-based column index).
    pub fn rows_in_column(&self, j: usize) -> usize {
        self.columns[j - 1].len()
    }

    pub fn max_rows(&self) -> usize {
        self.columns.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Bubble at row `i`, column `j` (both 1-based).
    pub fn bubble(&self, i: usize, j: usize) -> &Bubble {
        &self.columns[j - 1][i - 1]
    }

    pub fn vertex_count(&self) -> usize {
        self.columns
            .iter()
            .flatten()
            .map(|b| b.size())
            .sum()
    }

    pub fn column_size(&self, j: usize) -> usize {
        self.columns[j - 1].iter().map(|b| b.size()).sum()
    }

    /// Row of the first nonempty bubble of column `j`, if any.
    pub fn top(&self, j: usize) -> Option<usize> {
        self.columns[j - 1]
            .iter()
            .position(|b| !b.is_empty())
            .map(|i| i + 1)
    }

    pub fn all_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.columns
            .iter()
            .flatten()
            .flat_map(|b| b.vertices().collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<UBubbleModel, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Checks the structural validity conditions and global vertex disjointness,
/// returning every violation found.
pub fn validate_model(model: &UBubbleModel) -> Vec<ModelViolation> {
    let mut out = Vec::new();
    let k = model.column_count();
    let max_rows = model.max_rows();

    for j in 1..=k {
        if model.top(j).is_none() {
            out.push(ModelViolation::EmptyColumn(j));
        } else if model.columns[j - 1]
            .last()
            .is_some_and(|b| b.is_empty())
        {
            out.push(ModelViolation::EmptyColumnEnd(j));
        }
    }
    for i in 1..=max_rows {
        let empty_row = (1..=k)
            .all(|j| model.rows_in_column(j) < i || model.bubble(i, j).is_empty());
        if empty_row {
            out.push(ModelViolation::EmptyRow(i));
        }
    }
    if k > 0 {
        if let Some(top) = model.top(1) {
            if top != 1 {
                out.push(ModelViolation::FirstColumnTop(top));
            }
        }
        for j in 1..k {
            if let (Some(a), Some(b)) = (model.top(j), model.top(j + 1)) {
                if a > b {
                    out.push(ModelViolation::TopOrder {
                        j,
                        top: a,
                        next_top: b,
                    });
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    for v in model.all_vertices() {
        if !seen.insert(v) {
            out.push(ModelViolation::DuplicateVertex(v));
        }
    }
    out
}

/// Reads the graph off a model positionally.
pub fn graph_of_model(model: &UBubbleModel) -> Graph {
    let mut g = Graph::new();
    for v in model.all_vertices() {
        g.insert_vertex(v);
    }
    let k = model.column_count();
    for j in 1..=k {
        let col: Vec<VertexId> = model.columns[j - 1]
            .iter()
            .flat_map(|b| b.vertices().collect::<Vec<_>>())
            .collect();
        // Columns are cliques.
        for (n, &u) in col.iter().enumerate() {
            for &v in &col[n + 1..] {
                g.add_edge(u, v);
            }
        }
        if j == k {
            continue;
        }
        for (li, left) in model.columns[j - 1].iter().enumerate() {
            for (ri, right) in model.columns[j].iter().enumerate() {
                if li > ri {
                    // Left vertex strictly lower than the right one.
                    for u in left.vertices() {
                        for v in right.vertices() {
                            g.add_edge(u, v);
                        }
                    }
                } else if li == ri {
                    // Same row: only right-closed meets left-closed.
                    for u in left.right_closed() {
                        for v in right.left_closed() {
                            g.add_edge(u, v);
                        }
                    }
                }
            }
        }
    }
    g
}

#[cfg(test)]
pub(crate) fn bubble_of(
    pp: &[VertexId],
    pm: &[VertexId],
    mp: &[VertexId],
    mm: &[VertexId],
) -> Bubble {
    Bubble {
        pp: pp.to_vec(),
        pm: pm.to_vec(),
        mp: mp.to_vec(),
        mm: mm.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maxcut::counterexample_model;

    #[test]
    fn single_bubble_is_a_clique() {
        let model = UBubbleModel {
            columns: vec![vec![bubble_of(&[0], &[1], &[], &[2])]],
        };
        let g = graph_of_model(&model);
        assert_eq!(g.edge_count(), 3);
        assert!(validate_model(&model).is_empty());
    }

    #[test]
    fn counterexample_model_has_its_ten_edges() {
        let g = graph_of_model(&counterexample_model());
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 10);
        let expect = [
            (1, 2),
            (2, 3),
            (2, 4),
            (2, 5),
            (3, 4),
            (3, 5),
            (4, 5),
            (3, 6),
            (4, 6),
            (5, 6),
        ];
        for (u, v) in expect {
            assert!(g.has_edge(u, v), "missing edge {u}-{v}");
        }
    }

    #[test]
    fn same_row_needs_closed_facing_ends() {
        // Row-1 neighbors across a column boundary: only ++/-+ on the left
        // meet ++/+- on the right.
        let model = UBubbleModel {
            columns: vec![
                vec![bubble_of(&[0], &[1], &[], &[])],
                vec![bubble_of(&[2], &[], &[3], &[])],
            ],
        };
        let g = graph_of_model(&model);
        assert!(g.has_edge(0, 2));
        assert!(!g.has_edge(0, 3));
        assert!(!g.has_edge(1, 2));
        assert!(!g.has_edge(1, 3));
    }

    #[test]
    fn row_offset_kills_cross_column_edges() {
        // Two columns, occupants in row 1 and row 2: no edge.
        let model = UBubbleModel {
            columns: vec![
                vec![bubble_of(&[0], &[], &[], &[])],
                vec![Bubble::default(), bubble_of(&[1], &[], &[], &[])],
            ],
        };
        let g = graph_of_model(&model);
        assert_eq!(g.edge_count(), 0);
        assert!(validate_model(&model).is_empty());
    }

    #[test]
    fn lower_left_joins_upper_right() {
        let model = UBubbleModel {
            columns: vec![
                vec![bubble_of(&[], &[], &[], &[0]), bubble_of(&[], &[], &[], &[1])],
                vec![bubble_of(&[], &[], &[], &[2])],
            ],
        };
        let g = graph_of_model(&model);
        // 1 is in row 2 of column 1, so it reaches the row-1 bubble of column 2.
        assert!(g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn validation_reports_positions() {
        let model = UBubbleModel {
            columns: vec![
                vec![Bubble::default(), bubble_of(&[0], &[], &[], &[])],
                vec![bubble_of(&[1], &[], &[], &[]), Bubble::default()],
            ],
        };
        let violations = validate_model(&model);
        assert!(violations.contains(&ModelViolation::EmptyColumnEnd(2)));
        assert!(violations.contains(&ModelViolation::FirstColumnTop(2)));
        assert!(violations.contains(&ModelViolation::TopOrder {
            j: 1,
            top: 2,
            next_top: 1
        }));
    }

    #[test]
    fn validation_reports_missing_rows_and_duplicates() {
        let model = UBubbleModel {
            columns: vec![vec![
                bubble_of(&[0], &[], &[], &[]),
                Bubble::default(),
                bubble_of(&[0], &[], &[], &[]),
            ]],
        };
        let violations = validate_model(&model);
        assert!(violations.contains(&ModelViolation::EmptyRow(2)));
        assert!(violations.contains(&ModelViolation::DuplicateVertex(0)));
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let model = counterexample_model();
        let text = model.to_json();
        assert_eq!(UBubbleModel::from_json(&text).unwrap(), model);
        // Missing quadrant keys deserialize as empty.
        let sparse = r#"{"columns":[[{"pp":[4]}]]}"#;
        let m = UBubbleModel::from_json(sparse).unwrap();
        assert_eq!(m.bubble(1, 1).pp, vec![4]);
        assert!(m.bubble(1, 1).mm.is_empty());
        // Unknown keys are rejected.
        assert!(UBubbleModel::from_json(r#"{"columns":[[{"xx":[1]}]]}"#).is_err());
    }
}
