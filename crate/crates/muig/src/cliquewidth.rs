//! Clique-width expressions over labeled graphs, with two construction
//! strategies read off a bubble model.
//!
//! An expression builds a graph from single labeled vertices by disjoint
//! union, relabeling, and connecting every vertex of one label to every
//! vertex of another. The number of distinct labels in the term bounds the
//! clique-width of the resulting graph. The column builder spends one label
//! per column plus three scratch labels; the group builder spends one label
//! per "group" (vertices of a column with equal neighborhoods in the next
//! column) alive at any moment, plus a dump label and a fresh label.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::mem;

use serde::Serialize;
use thiserror::Error;

use crate::build::{compute_alpha, max_clique, model_to_intervals};
use crate::graph::{Graph, VertexId};
use crate::model::{graph_of_model, Quadrant, UBubbleModel};

/// A clique-width expression. Labels are positive integers.
///
/// Expressions built from models are deep chains (one wrapper per operation),
/// so every algorithm on them, including `Drop`, runs on an explicit stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CwdExpression {
    CreateVertex {
        label: u32,
        id: VertexId,
    },
    Union(Box<CwdExpression>, Box<CwdExpression>),
    Relabel {
        from: u32,
        to: u32,
        inner: Box<CwdExpression>,
    },
    Connect {
        a: u32,
        b: u32,
        inner: Box<CwdExpression>,
    },
}

impl Default for CwdExpression {
    fn default() -> Self {
        CwdExpression::CreateVertex { label: 1, id: 0 }
    }
}

fn take_children(e: &mut CwdExpression, out: &mut Vec<CwdExpression>) {
    match e {
        CwdExpression::CreateVertex { .. } => {}
        CwdExpression::Union(a, b) => {
            out.push(mem::take(a.as_mut()));
            out.push(mem::take(b.as_mut()));
        }
        CwdExpression::Relabel { inner, .. } | CwdExpression::Connect { inner, .. } => {
            out.push(mem::take(inner.as_mut()));
        }
    }
}

impl Drop for CwdExpression {
    fn drop(&mut self) {
        // The derived drop would recurse to the depth of the chain.
        let mut work = Vec::new();
        take_children(self, &mut work);
        while let Some(mut e) = work.pop() {
            take_children(&mut e, &mut work);
        }
    }
}

struct Nodes<'a> {
    stack: Vec<&'a CwdExpression>,
}

impl<'a> Iterator for Nodes<'a> {
    type Item = &'a CwdExpression;

    fn next(&mut self) -> Option<&'a CwdExpression> {
        let n = self.stack.pop()?;
        match n {
            CwdExpression::CreateVertex { .. } => {}
            CwdExpression::Union(a, b) => {
                self.stack.push(a);
                self.stack.push(b);
            }
            CwdExpression::Relabel { inner, .. } | CwdExpression::Connect { inner, .. } => {
                self.stack.push(inner);
            }
        }
        Some(n)
    }
}

impl CwdExpression {
    fn nodes(&self) -> Nodes<'_> {
        Nodes { stack: vec![self] }
    }

    pub fn node_count(&self) -> usize {
        self.nodes().count()
    }

    /// Distinct labels mentioned anywhere in the term.
    pub fn labels(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for n in self.nodes() {
            match n {
                CwdExpression::CreateVertex { label, .. } => {
                    out.insert(*label);
                }
                CwdExpression::Union(..) => {}
                CwdExpression::Relabel { from, to, .. } => {
                    out.insert(*from);
                    out.insert(*to);
                }
                CwdExpression::Connect { a, b, .. } => {
                    out.insert(*a);
                    out.insert(*b);
                }
            }
        }
        out
    }

    pub fn width(&self) -> usize {
        self.labels().len()
    }

    /// Serializes to the textual form `(v l id)` / `(union e e)` /
    /// `(relabel i j e)` / `(connect i j e)`.
    pub fn to_sexpr(&self) -> String {
        enum Task<'a> {
            Node(&'a CwdExpression),
            Text(&'static str),
        }
        let mut out = String::new();
        let mut tasks = vec![Task::Node(self)];
        while let Some(t) = tasks.pop() {
            match t {
                Task::Text(s) => out.push_str(s),
                Task::Node(CwdExpression::CreateVertex { label, id }) => {
                    write!(out, "(v {label} {id})").unwrap();
                }
                Task::Node(CwdExpression::Union(a, b)) => {
                    out.push_str("(union ");
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Node(b));
                    tasks.push(Task::Text(" "));
                    tasks.push(Task::Node(a));
                }
                Task::Node(CwdExpression::Relabel { from, to, inner }) => {
                    write!(out, "(relabel {from} {to} ").unwrap();
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Node(inner));
                }
                Task::Node(CwdExpression::Connect { a, b, inner }) => {
                    write!(out, "(connect {a} {b} ").unwrap();
                    tasks.push(Task::Text(")"));
                    tasks.push(Task::Node(inner));
                }
            }
        }
        out
    }
}

impl fmt::Display for CwdExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CwdParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("expected {want}, got `{got}`")]
    BadNumber { want: &'static str, got: String },
    #[error("operation `{op}` takes {want} subexpressions, found {got}")]
    Arity {
        op: &'static str,
        want: usize,
        got: usize,
    },
    #[error("trailing input after the expression")]
    Trailing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push(Token::Open);
                i += 1;
            }
            b')' => {
                out.push(Token::Close);
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push(Token::Atom(&text[start..i]));
            }
        }
    }
    out
}

fn parse_label(tok: Option<&Token<'_>>) -> Result<u32, CwdParseError> {
    match tok {
        Some(Token::Atom(s)) => match s.parse::<u32>() {
            Ok(x) if x >= 1 => Ok(x),
            _ => Err(CwdParseError::BadNumber {
                want: "a positive label",
                got: s.to_string(),
            }),
        },
        Some(t) => Err(CwdParseError::UnexpectedToken(describe(t))),
        None => Err(CwdParseError::UnexpectedEnd),
    }
}

fn parse_id(tok: Option<&Token<'_>>) -> Result<VertexId, CwdParseError> {
    match tok {
        Some(Token::Atom(s)) => s.parse::<VertexId>().map_err(|_| CwdParseError::BadNumber {
            want: "a vertex id",
            got: s.to_string(),
        }),
        Some(t) => Err(CwdParseError::UnexpectedToken(describe(t))),
        None => Err(CwdParseError::UnexpectedEnd),
    }
}

fn describe(tok: &Token<'_>) -> String {
    match tok {
        Token::Open => "(".to_string(),
        Token::Close => ")".to_string(),
        Token::Atom(s) => s.to_string(),
    }
}

/// Parses the S-expression form produced by [`CwdExpression::to_sexpr`].
/// Whitespace between tokens is free-form.
pub fn parse_sexpr(text: &str) -> Result<CwdExpression, CwdParseError> {
    enum Frame {
        Union(Vec<CwdExpression>),
        Relabel(u32, u32, Vec<CwdExpression>),
        Connect(u32, u32, Vec<CwdExpression>),
    }
    let tokens = tokenize(text);
    let mut frames: Vec<Frame> = Vec::new();
    let mut done: Option<CwdExpression> = None;
    let mut i = 0;

    fn complete(
        e: CwdExpression,
        frames: &mut [Frame],
        done: &mut Option<CwdExpression>,
    ) -> Result<(), CwdParseError> {
        if let Some(f) = frames.last_mut() {
            match f {
                Frame::Union(children)
                | Frame::Relabel(_, _, children)
                | Frame::Connect(_, _, children) => children.push(e),
            }
            Ok(())
        } else if done.is_some() {
            Err(CwdParseError::Trailing)
        } else {
            *done = Some(e);
            Ok(())
        }
    }

    while i < tokens.len() {
        match tokens[i] {
            Token::Open => {
                let op = match tokens.get(i + 1) {
                    Some(Token::Atom(s)) => *s,
                    Some(t) => return Err(CwdParseError::UnexpectedToken(describe(t))),
                    None => return Err(CwdParseError::UnexpectedEnd),
                };
                match op {
                    "v" => {
                        let label = parse_label(tokens.get(i + 2))?;
                        let id = parse_id(tokens.get(i + 3))?;
                        match tokens.get(i + 4) {
                            Some(Token::Close) => {}
                            Some(t) => return Err(CwdParseError::UnexpectedToken(describe(t))),
                            None => return Err(CwdParseError::UnexpectedEnd),
                        }
                        complete(
                            CwdExpression::CreateVertex { label, id },
                            &mut frames,
                            &mut done,
                        )?;
                        i += 5;
                    }
                    "union" => {
                        frames.push(Frame::Union(Vec::new()));
                        i += 2;
                    }
                    "relabel" => {
                        let from = parse_label(tokens.get(i + 2))?;
                        let to = parse_label(tokens.get(i + 3))?;
                        frames.push(Frame::Relabel(from, to, Vec::new()));
                        i += 4;
                    }
                    "connect" => {
                        let a = parse_label(tokens.get(i + 2))?;
                        let b = parse_label(tokens.get(i + 3))?;
                        frames.push(Frame::Connect(a, b, Vec::new()));
                        i += 4;
                    }
                    other => return Err(CwdParseError::UnknownOperation(other.to_string())),
                }
            }
            Token::Close => {
                let frame = frames.pop().ok_or_else(|| {
                    CwdParseError::UnexpectedToken(")".to_string())
                })?;
                let node = match frame {
                    Frame::Union(mut children) => {
                        if children.len() != 2 {
                            return Err(CwdParseError::Arity {
                                op: "union",
                                want: 2,
                                got: children.len(),
                            });
                        }
                        let b = children.pop().unwrap();
                        let a = children.pop().unwrap();
                        CwdExpression::Union(Box::new(a), Box::new(b))
                    }
                    Frame::Relabel(from, to, mut children) => {
                        if children.len() != 1 {
                            return Err(CwdParseError::Arity {
                                op: "relabel",
                                want: 1,
                                got: children.len(),
                            });
                        }
                        CwdExpression::Relabel {
                            from,
                            to,
                            inner: Box::new(children.pop().unwrap()),
                        }
                    }
                    Frame::Connect(a, b, mut children) => {
                        if children.len() != 1 {
                            return Err(CwdParseError::Arity {
                                op: "connect",
                                want: 1,
                                got: children.len(),
                            });
                        }
                        CwdExpression::Connect {
                            a,
                            b,
                            inner: Box::new(children.pop().unwrap()),
                        }
                    }
                };
                complete(node, &mut frames, &mut done)?;
                i += 1;
            }
            Token::Atom(s) => return Err(CwdParseError::UnexpectedToken(s.to_string())),
        }
    }
    if !frames.is_empty() {
        return Err(CwdParseError::UnexpectedEnd);
    }
    done.ok_or(CwdParseError::UnexpectedEnd)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CwdEvalError {
    #[error("vertex {0} is created by more than one leaf")]
    DuplicateVertex(VertexId),
    #[error("connect requires two distinct labels, got {0} twice")]
    EqualLabels(u32),
}

struct LabeledGraph {
    graph: Graph,
    buckets: HashMap<u32, Vec<VertexId>>,
}

impl LabeledGraph {
    fn leaf(label: u32, id: VertexId) -> LabeledGraph {
        let mut graph = Graph::new();
        graph.insert_vertex(id);
        let mut buckets = HashMap::new();
        buckets.insert(label, vec![id]);
        LabeledGraph { graph, buckets }
    }

    fn merge(mut self, mut other: LabeledGraph) -> Result<LabeledGraph, CwdEvalError> {
        if self.graph.vertex_count() < other.graph.vertex_count() {
            mem::swap(&mut self, &mut other);
        }
        for v in other.graph.vertices() {
            if self.graph.has_vertex(v) {
                return Err(CwdEvalError::DuplicateVertex(v));
            }
            self.graph.insert_vertex(v);
        }
        for (u, v) in other.graph.edges() {
            self.graph.add_edge(u, v);
        }
        for (label, ids) in other.buckets {
            self.buckets.entry(label).or_default().extend(ids);
        }
        Ok(self)
    }

    fn connect(&mut self, a: u32, b: u32) {
        let (Some(left), Some(right)) = (self.buckets.get(&a), self.buckets.get(&b)) else {
            return;
        };
        let mut edges = Vec::with_capacity(left.len() * right.len());
        for &u in left {
            for &v in right {
                edges.push((u, v));
            }
        }
        for (u, v) in edges {
            self.graph.add_edge(u, v);
        }
    }

    fn relabel(&mut self, from: u32, to: u32) {
        if from == to {
            return;
        }
        if let Some(ids) = self.buckets.remove(&from) {
            self.buckets.entry(to).or_default().extend(ids);
        }
    }
}

/// Evaluates an expression bottom-up to the graph it defines, returning the
/// graph (labels discarded) and the number of distinct labels in the term.
/// Connecting a label to itself and creating a vertex id twice are errors;
/// re-connecting already adjacent classes is a no-op.
pub fn eval_expression(expr: &CwdExpression) -> Result<(Graph, usize), CwdEvalError> {
    let order: Vec<&CwdExpression> = expr.nodes().collect();
    let mut vals: Vec<LabeledGraph> = Vec::new();
    for node in order.iter().rev() {
        match node {
            CwdExpression::CreateVertex { label, id } => {
                vals.push(LabeledGraph::leaf(*label, *id));
            }
            CwdExpression::Union(..) => {
                let b = vals.pop().expect("postorder stack underflow");
                let a = vals.pop().expect("postorder stack underflow");
                vals.push(a.merge(b)?);
            }
            CwdExpression::Relabel { from, to, .. } => {
                let state = vals.last_mut().expect("postorder stack underflow");
                state.relabel(*from, *to);
            }
            CwdExpression::Connect { a, b, .. } => {
                if a == b {
                    return Err(CwdEvalError::EqualLabels(*a));
                }
                let state = vals.last_mut().expect("postorder stack underflow");
                state.connect(*a, *b);
            }
        }
    }
    let state = vals.pop().expect("empty expression");
    debug_assert!(vals.is_empty());
    Ok((state.graph, expr.width()))
}

fn push_union(acc: &mut Option<CwdExpression>, label: u32, id: VertexId) {
    let leaf = CwdExpression::CreateVertex { label, id };
    *acc = Some(match acc.take() {
        None => leaf,
        Some(e) => CwdExpression::Union(Box::new(e), Box::new(leaf)),
    });
}

fn push_connect(acc: &mut Option<CwdExpression>, a: u32, b: u32) {
    debug_assert_ne!(a, b);
    let inner = Box::new(acc.take().expect("connect on an empty expression"));
    *acc = Some(CwdExpression::Connect { a, b, inner });
}

fn push_relabel(acc: &mut Option<CwdExpression>, from: u32, to: u32) {
    debug_assert_ne!(from, to);
    let inner = Box::new(acc.take().expect("relabel on an empty expression"));
    *acc = Some(CwdExpression::Relabel { from, to, inner });
}

fn sorted_quadrant(model: &UBubbleModel, i: usize, j: usize, q: Quadrant) -> Vec<VertexId> {
    let mut ids = model.bubble(i, j).quadrant(q).clone();
    ids.sort_unstable();
    ids
}

/// Builds an expression for the model's graph using one label per column
/// plus three scratch labels, so its width is at most `columns + 3`.
///
/// Vertices are added row by row, within a bubble in the quadrant order
/// open-open, closed-open, open-closed, closed-closed. A new vertex is
/// joined through a transient scratch label to the next column, its own
/// column, the right-closed pool of the same-row previous bubble (when its
/// left end is closed), and its bubble's own right-closed pool so far (when
/// its right end is closed). Right-closed vertices accumulate in the pool;
/// the pool either rides along as the "previous bubble" class when the next
/// bubble processed is the same-row neighbor, or settles on the column label.
pub fn build_expr_columns(model: &UBubbleModel) -> CwdExpression {
    assert!(
        model.vertex_count() > 0,
        "an expression needs at least one vertex"
    );
    let k = model.column_count();
    let mut slots: Vec<(usize, usize)> = Vec::new();
    for i in 1..=model.max_rows() {
        for j in 1..=k {
            if model.rows_in_column(j) >= i && !model.bubble(i, j).is_empty() {
                slots.push((i, j));
            }
        }
    }

    let scratch = [k as u32 + 1, k as u32 + 2, k as u32 + 3];
    let free_scratch = |l1: Option<u32>, l2: Option<u32>| {
        scratch
            .iter()
            .copied()
            .find(|&s| Some(s) != l1 && Some(s) != l2)
            .expect("two of three scratch labels are busy at most")
    };

    let mut acc: Option<CwdExpression> = None;
    let mut col_size = vec![0usize; k + 2];
    // Right-closed pool of the same-row previous bubble, and of this bubble.
    let mut l1: Option<u32> = None;
    let mut l2: Option<u32> = None;
    let mut l1_size = 0usize;
    let mut l2_size = 0usize;

    for (si, &(i, j)) in slots.iter().enumerate() {
        let jl = j as u32;
        for q in [Quadrant::Mm, Quadrant::Pm, Quadrant::Mp, Quadrant::Pp] {
            let left_closed = matches!(q, Quadrant::Pp | Quadrant::Pm);
            let right_closed = matches!(q, Quadrant::Pp | Quadrant::Mp);
            for y in sorted_quadrant(model, i, j, q) {
                let mut targets: Vec<u32> = Vec::new();
                if j < k && col_size[j + 1] > 0 {
                    targets.push(jl + 1);
                }
                if col_size[j] > 0 {
                    targets.push(jl);
                }
                if left_closed {
                    if let Some(t) = l1 {
                        targets.push(t);
                    }
                }
                if right_closed {
                    if let Some(t) = l2 {
                        targets.push(t);
                    }
                }
                let pool_was_empty = l2.is_none();
                let dest = if right_closed {
                    *l2.get_or_insert_with(|| free_scratch(l1, None))
                } else {
                    jl
                };
                // A fresh pool label or an empty graph needs no transient:
                // the destination class is either empty or exactly {y}.
                if targets.is_empty() || (right_closed && pool_was_empty) {
                    push_union(&mut acc, dest, y);
                    for t in &targets {
                        push_connect(&mut acc, dest, *t);
                    }
                } else {
                    let t3 = free_scratch(l1, l2);
                    push_union(&mut acc, t3, y);
                    for t in &targets {
                        push_connect(&mut acc, t3, *t);
                    }
                    push_relabel(&mut acc, t3, dest);
                }
                if right_closed {
                    l2_size += 1;
                } else {
                    col_size[j] += 1;
                }
            }
        }
        // End of bubble: the previous bubble's pool is done distinguishing
        // level pairs and settles on its column label; this bubble's pool
        // becomes the new "previous" only across a same-row column step.
        if let Some(t) = l1.take() {
            push_relabel(&mut acc, t, jl - 1);
            col_size[j - 1] += l1_size;
            l1_size = 0;
        }
        if slots.get(si + 1) == Some(&(i, j + 1)) {
            l1 = l2.take();
            l1_size = l2_size;
        } else if let Some(t) = l2.take() {
            push_relabel(&mut acc, t, jl);
            col_size[j] += l2_size;
        }
        l2_size = 0;
    }
    acc.expect("nonempty model produced no expression")
}

/// The per-column partition of vertices by their neighborhoods in the next
/// column, and the derived per-vertex group numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    /// Per column (index `j - 1`): groups in first-touch scan order, each
    /// sorted by vertex id.
    pub groups: Vec<Vec<Vec<VertexId>>>,
    /// Vertex to (column index, group index) within `groups`.
    pub group_of: BTreeMap<VertexId, (usize, usize)>,
    /// Per vertex: the number of groups its backward neighborhood can keep
    /// distinct at the moment the vertex is introduced.
    pub g: BTreeMap<VertexId, usize>,
    /// Maximum of `g` over all vertices.
    pub phi: usize,
}

fn adjacency(graph: &Graph) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for v in graph.vertices() {
        adj.entry(v).or_default();
    }
    for (u, v) in graph.edges() {
        adj.entry(u).or_default().insert(v);
        adj.entry(v).or_default().insert(u);
    }
    adj
}

/// Splits every column into groups (equal next-column neighborhoods) and
/// computes each vertex's group number: the larger count of groups met by
/// its neighbors among the lower part of the previous column, the upper part
/// of its own column, and either the facing right-closed/left-closed pair at
/// its own row or its whole bubble.
pub fn group_structure(model: &UBubbleModel) -> GroupStructure {
    let graph = graph_of_model(model);
    let adj = adjacency(&graph);
    let k = model.column_count();

    let mut groups: Vec<Vec<Vec<VertexId>>> = Vec::with_capacity(k);
    let mut group_of: BTreeMap<VertexId, (usize, usize)> = BTreeMap::new();
    for j in 1..=k {
        let next_col: BTreeSet<VertexId> = if j < k {
            model.columns[j]
                .iter()
                .flat_map(|b| b.vertices().collect::<Vec<_>>())
                .collect()
        } else {
            BTreeSet::new()
        };
        let mut key_to_idx: HashMap<Vec<VertexId>, usize> = HashMap::new();
        let mut col_groups: Vec<Vec<VertexId>> = Vec::new();
        for i in 1..=model.rows_in_column(j) {
            for q in Quadrant::ALL {
                for v in sorted_quadrant(model, i, j, q) {
                    let key: Vec<VertexId> =
                        adj[&v].iter().copied().filter(|u| next_col.contains(u)).collect();
                    let idx = *key_to_idx.entry(key).or_insert_with(|| {
                        col_groups.push(Vec::new());
                        col_groups.len() - 1
                    });
                    col_groups[idx].push(v);
                    group_of.insert(v, (j - 1, idx));
                }
            }
        }
        for grp in &mut col_groups {
            grp.sort_unstable();
        }
        groups.push(col_groups);
    }

    let mut g: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut phi = 0usize;
    for j in 1..=k {
        for i in 1..=model.rows_in_column(j) {
            let bubble = model.bubble(i, j);
            if bubble.is_empty() {
                continue;
            }
            let mut base: Vec<VertexId> = Vec::new();
            if j >= 2 {
                for i2 in i + 1..=model.rows_in_column(j - 1) {
                    base.extend(model.bubble(i2, j - 1).vertices());
                }
            }
            for i2 in 1..i {
                base.extend(model.bubble(i2, j).vertices());
            }
            let mut facing: Vec<VertexId> = Vec::new();
            if j >= 2 && model.rows_in_column(j - 1) >= i {
                facing.extend(model.bubble(i, j - 1).right_closed());
            }
            facing.extend(bubble.left_closed());
            let whole: Vec<VertexId> = bubble.vertices().collect();

            for v in bubble.vertices() {
                let nbrs = &adj[&v];
                let count = |extra: &[VertexId]| {
                    base.iter()
                        .chain(extra.iter())
                        .filter(|&&u| u != v && nbrs.contains(&u))
                        .map(|u| group_of[u])
                        .collect::<BTreeSet<_>>()
                        .len()
                };
                let gv = count(&facing).max(count(&whole));
                phi = phi.max(gv);
                g.insert(v, gv);
            }
        }
    }

    GroupStructure {
        groups,
        group_of,
        g,
        phi,
    }
}

/// Builds an expression for the model's graph whose width is at most the
/// group number plus two.
///
/// Vertices are added column by column, top to bottom, left-closed kinds
/// first within a bubble. Every label class holds the processed part of one
/// group, so a class is either fully adjacent or fully non-adjacent to the
/// incoming vertex: non-adjacent classes are dumped onto label 1 (nothing
/// ever connects to label 1 again), the vertex arrives on the smallest free
/// label, connects to every surviving class, and then merges into its
/// group's class if one is already open.
pub fn build_expr_groups(model: &UBubbleModel) -> CwdExpression {
    assert!(
        model.vertex_count() > 0,
        "an expression needs at least one vertex"
    );
    let gs = group_structure(model);
    let graph = graph_of_model(model);
    let adj = adjacency(&graph);
    let k = model.column_count();

    let mut acc: Option<CwdExpression> = None;
    // label -> (group, first member); the representative decides adjacency
    // for the whole class.
    let mut active: BTreeMap<u32, ((usize, usize), VertexId)> = BTreeMap::new();
    let mut label_of_group: HashMap<(usize, usize), u32> = HashMap::new();

    for j in 1..=k {
        for i in 1..=model.rows_in_column(j) {
            for q in [Quadrant::Pp, Quadrant::Pm, Quadrant::Mp, Quadrant::Mm] {
                for v in sorted_quadrant(model, i, j, q) {
                    let nbrs = &adj[&v];
                    let stale: Vec<u32> = active
                        .iter()
                        .filter(|(_, (_, rep))| !nbrs.contains(rep))
                        .map(|(&l, _)| l)
                        .collect();
                    for l in stale {
                        push_relabel(&mut acc, l, 1);
                        let (gkey, _) = active.remove(&l).unwrap();
                        label_of_group.remove(&gkey);
                    }
                    debug_assert!(
                        active.len() <= gs.g[&v],
                        "more live groups than the group number allows"
                    );
                    let fresh = (2u32..)
                        .find(|c| !active.contains_key(c))
                        .expect("label space exhausted");
                    push_union(&mut acc, fresh, v);
                    for &l in active.keys() {
                        push_connect(&mut acc, fresh, l);
                    }
                    let gkey = gs.group_of[&v];
                    match label_of_group.get(&gkey) {
                        Some(&lg) => push_relabel(&mut acc, fresh, lg),
                        None => {
                            active.insert(fresh, (gkey, v));
                            label_of_group.insert(gkey, fresh);
                        }
                    }
                }
            }
        }
    }
    acc.expect("nonempty model produced no expression")
}

/// The clique-width upper bounds a model certifies, and their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub columns: usize,
    pub rows: usize,
    pub alpha: usize,
    pub omega: usize,
    pub phi: usize,
    /// columns + 3
    pub from_columns: usize,
    /// 2 * rows + 2
    pub from_rows: usize,
    /// 2 * alpha + 3
    pub from_alpha: usize,
    /// phi + 2
    pub from_phi: usize,
    /// omega + 1
    pub from_omega: usize,
    pub best: usize,
}

/// Collects every upper bound the model yields: from its column count, its
/// row count, the independence number, the group number, and the clique
/// number.
pub fn cwd_upper_bounds(model: &UBubbleModel) -> BoundsReport {
    let columns = model.column_count();
    let rows = model.max_rows();
    let alpha = compute_alpha(&model_to_intervals(model));
    let omega = max_clique(model);
    let phi = group_structure(model).phi;
    let from_columns = columns + 3;
    let from_rows = 2 * rows + 2;
    let from_alpha = 2 * alpha + 3;
    let from_phi = phi + 2;
    let from_omega = omega + 1;
    let best = from_columns
        .min(from_rows)
        .min(from_alpha)
        .min(from_phi)
        .min(from_omega);
    BoundsReport {
        columns,
        rows,
        alpha,
        omega,
        phi,
        from_columns,
        from_rows,
        from_alpha,
        from_phi,
        from_omega,
        best,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::build_model;
    use crate::graph::VertexId;
    use crate::interval::{IntervalKind, Representation, UnitInterval};
    use crate::maxcut::counterexample_model;
    use crate::model::{bubble_of, Bubble};
    use crate::rational::parse_rational;

    fn iv(vertex: VertexId, kind: &str, left: &str) -> UnitInterval {
        UnitInterval::new(
            vertex,
            IntervalKind::parse(kind).unwrap(),
            parse_rational(left).unwrap(),
        )
    }

    fn claw_model() -> UBubbleModel {
        build_model(&Representation::new(vec![
            iv(0, "++", "-1"),
            iv(1, "++", "0"),
            iv(2, "--", "0"),
            iv(3, "++", "1"),
        ]))
        .unwrap()
    }

    const DIAMOND: &str = "(connect 1 2 (union (relabel 2 1 (connect 1 2 \
                           (union (union (v 1 0) (v 2 1)) (v 2 2)))) (v 2 3)))";

    #[test]
    fn diamond_expression_builds_the_right_graph() {
        let expr = parse_sexpr(DIAMOND).unwrap();
        let (g, width) = eval_expression(&expr).unwrap();
        assert_eq!(width, 2);
        assert_eq!(g.vertex_count(), 4);
        let edges: Vec<(u32, u32)> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]);
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn union_keeps_components_apart() {
        let (g, width) = eval_expression(&parse_sexpr("(union (v 1 10) (v 1 11))").unwrap())
            .unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), width), (2, 0, 1));
    }

    #[test]
    fn repeated_connect_adds_nothing() {
        let expr = parse_sexpr("(connect 1 2 (connect 1 2 (union (v 1 0) (v 2 1))))").unwrap();
        let (g, _) = eval_expression(&expr).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn duplicate_vertex_ids_fail() {
        let expr = parse_sexpr("(union (v 1 5) (v 2 5))").unwrap();
        assert_eq!(
            eval_expression(&expr).unwrap_err(),
            CwdEvalError::DuplicateVertex(5)
        );
    }

    #[test]
    fn connect_needs_two_labels() {
        let expr = parse_sexpr("(connect 1 1 (v 1 0))").unwrap();
        assert_eq!(
            eval_expression(&expr).unwrap_err(),
            CwdEvalError::EqualLabels(1)
        );
    }

    #[test]
    fn parser_accepts_messy_whitespace() {
        let expr = parse_sexpr("  ( union(v 1 0)\n\t(v 2 1) )  ").unwrap();
        assert_eq!(expr.to_sexpr(), "(union (v 1 0) (v 2 1))");
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert_eq!(
            parse_sexpr("(union (v 1 0))").unwrap_err(),
            CwdParseError::Arity {
                op: "union",
                want: 2,
                got: 1
            }
        );
        assert_eq!(
            parse_sexpr("(frobnicate 1 2 (v 1 0))").unwrap_err(),
            CwdParseError::UnknownOperation("frobnicate".to_string())
        );
        assert_eq!(
            parse_sexpr("(v 1 0) (v 2 1)").unwrap_err(),
            CwdParseError::Trailing
        );
        assert_eq!(
            parse_sexpr("(v 0 3)").unwrap_err(),
            CwdParseError::BadNumber {
                want: "a positive label",
                got: "0".to_string()
            }
        );
        assert_eq!(
            parse_sexpr("(relabel 1 2 (v 1 0)").unwrap_err(),
            CwdParseError::UnexpectedEnd
        );
        assert_eq!(parse_sexpr("").unwrap_err(), CwdParseError::UnexpectedEnd);
    }

    #[test]
    fn printer_and_parser_are_inverse() {
        let expr = build_expr_columns(&counterexample_model());
        let text = expr.to_sexpr();
        assert_eq!(parse_sexpr(&text).unwrap(), expr);
        assert_eq!(parse_sexpr(DIAMOND).unwrap().to_sexpr(), DIAMOND);
    }

    fn assert_builders_match(model: &UBubbleModel) {
        let want = graph_of_model(model);
        let n = model.vertex_count();
        let k = model.column_count();

        let cols = build_expr_columns(model);
        let (got, width) = eval_expression(&cols).unwrap();
        assert_eq!(got, want, "column expression differs from the model graph");
        assert!(width <= k + 3, "column width {width} > {}", k + 3);
        assert!(cols.node_count() <= 9 * n + 2);

        let gs = group_structure(model);
        let grps = build_expr_groups(model);
        let (got, width) = eval_expression(&grps).unwrap();
        assert_eq!(got, want, "group expression differs from the model graph");
        assert!(width <= gs.phi + 2, "group width {width} > {}", gs.phi + 2);
        let g_sum: usize = gs.g.values().sum();
        assert!(grps.node_count() <= 4 * n + g_sum + 2);
    }

    #[test]
    fn single_bubble_triangle() {
        let model = UBubbleModel {
            columns: vec![vec![bubble_of(&[0, 1, 2], &[], &[], &[])]],
        };
        assert_builders_match(&model);
        assert!(build_expr_columns(&model).width() <= 4);
    }

    #[test]
    fn claw_expressions_match_the_graph() {
        let model = claw_model();
        assert_builders_match(&model);
        assert!(build_expr_columns(&model).width() <= 6);
    }

    #[test]
    fn counterexample_expressions_match_the_graph() {
        let model = counterexample_model();
        assert_builders_match(&model);
        assert!(build_expr_columns(&model).width() <= 5);
    }

    #[test]
    fn mixed_quadrants_round_trip() {
        // Two columns with both pools and a level contact in row 2.
        let model = UBubbleModel {
            columns: vec![
                vec![bubble_of(&[0], &[1], &[], &[]), bubble_of(&[2], &[], &[3], &[4])],
                vec![
                    bubble_of(&[5], &[], &[], &[]),
                    bubble_of(&[6], &[7], &[], &[]),
                    bubble_of(&[], &[], &[8], &[]),
                ],
            ],
        };
        assert!(crate::model::validate_model(&model).is_empty());
        assert_builders_match(&model);
    }

    #[test]
    fn groups_of_the_counterexample() {
        let gs = group_structure(&counterexample_model());
        assert_eq!(gs.groups[0], vec![vec![1], vec![2]]);
        assert_eq!(gs.groups[1], vec![vec![3, 4, 5, 6]]);
        assert_eq!(gs.phi, 2);
        let g: Vec<usize> = (1..=6).map(|v| gs.g[&v]).collect();
        assert_eq!(g, vec![0, 1, 2, 2, 2, 1]);
        assert!(gs.phi <= 3, "group number must stay below the clique bound");
    }

    #[test]
    fn single_column_clique_has_one_group() {
        let model = UBubbleModel {
            columns: vec![(0..5)
                .map(|v| bubble_of(&[v], &[], &[], &[]))
                .collect::<Vec<Bubble>>()],
        };
        let gs = group_structure(&model);
        assert_eq!(gs.groups[0].len(), 1);
        assert_eq!(gs.phi, 1);
        assert_builders_match(&model);
        assert!(build_expr_groups(&model).width() <= 3);
    }

    #[test]
    fn bounds_report_on_the_counterexample() {
        let report = cwd_upper_bounds(&counterexample_model());
        assert_eq!(
            (report.columns, report.rows, report.alpha, report.omega, report.phi),
            (2, 2, 2, 4, 2)
        );
        assert_eq!(report.from_columns, 5);
        assert_eq!(report.from_rows, 6);
        assert_eq!(report.from_alpha, 7);
        assert_eq!(report.from_phi, 4);
        assert_eq!(report.from_omega, 5);
        assert_eq!(report.best, 4);
        assert!(report.from_alpha.min(report.from_phi) <= report.from_omega);
    }

    #[test]
    fn deep_expressions_do_not_recurse() {
        let mut expr = CwdExpression::CreateVertex { label: 1, id: 0 };
        for step in 0..300_000u32 {
            let (from, to) = if step % 2 == 0 { (1, 2) } else { (2, 1) };
            expr = CwdExpression::Relabel {
                from,
                to,
                inner: Box::new(expr),
            };
        }
        assert_eq!(expr.node_count(), 300_001);
        assert_eq!(expr.width(), 2);
        let text = expr.to_sexpr();
        let back = parse_sexpr(&text).unwrap();
        assert_eq!(back.to_sexpr(), text);
        let (g, _) = eval_expression(&back).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));
        // Dropping both chains here must not overflow the stack either.
    }
}
