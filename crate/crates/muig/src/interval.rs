//! Unit intervals with independently open or closed ends.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::rational::{format_rational, parse_rational, ParseRationalError, Rational};

/// Which ends of a unit interval are closed.
///
/// The two signs are (left, right); `+` is closed, `-` is open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntervalKind {
    /// `[l, l+1]`
    Closed,
    /// `[l, l+1)`
    ClosedOpen,
    /// `(l, l+1]`
    OpenClosed,
    /// `(l, l+1)`
    Open,
}

impl IntervalKind {
    pub const ALL: [IntervalKind; 4] = [
        IntervalKind::Closed,
        IntervalKind::ClosedOpen,
        IntervalKind::OpenClosed,
        IntervalKind::Open,
    ];

    pub fn left_closed(self) -> bool {
        matches!(self, IntervalKind::Closed | IntervalKind::ClosedOpen)
    }

    pub fn right_closed(self) -> bool {
        matches!(self, IntervalKind::Closed | IntervalKind::OpenClosed)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IntervalKind::Closed => "++",
            IntervalKind::ClosedOpen => "+-",
            IntervalKind::OpenClosed => "-+",
            IntervalKind::Open => "--",
        }
    }

    pub fn parse(s: &str) -> Option<IntervalKind> {
        match s {
            "++" => Some(IntervalKind::Closed),
            "+-" => Some(IntervalKind::ClosedOpen),
            "-+" => Some(IntervalKind::OpenClosed),
            "--" => Some(IntervalKind::Open),
            _ => None,
        }
    }
}

impl fmt::Display for IntervalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A unit-length interval `[l, l+1]` (ends open or closed per `kind`)
/// owned by one graph vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitInterval {
    pub vertex: VertexId,
    pub kind: IntervalKind,
    pub left: Rational,
}

impl UnitInterval {
    pub fn new(vertex: VertexId, kind: IntervalKind, left: Rational) -> Self {
        UnitInterval { vertex, kind, left }
    }

    pub fn right(&self) -> Rational {
        self.left + Rational::from_integer(1)
    }

    /// Exact point-set intersection test for two unit intervals.
    ///
    /// With `lu <= lv` the intervals meet iff `lv < lu + 1`, or they touch
    /// in the single point `lv = lu + 1` and both touching ends are closed.
    pub fn intersects(&self, other: &UnitInterval) -> bool {
        let (a, b) = if self.left <= other.left {
            (self, other)
        } else {
            (other, self)
        };
        match b.left.cmp(&a.right()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => a.kind.right_closed() && b.kind.left_closed(),
            std::cmp::Ordering::Greater => false,
        }
    }
}

/// A multiset of unit intervals, one per vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Representation {
    pub intervals: Vec<UnitInterval>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    BadRational {
        line: usize,
        source: ParseRationalError,
    },
}

impl Representation {
    pub fn new(intervals: Vec<UnitInterval>) -> Self {
        Representation { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Checks that every vertex id occurs at most once.
    pub fn validate(&self) -> Result<(), RepresentationError> {
        let mut seen = BTreeSet::new();
        for iv in &self.intervals {
            if !seen.insert(iv.vertex) {
                return Err(RepresentationError::DuplicateVertex(iv.vertex));
            }
        }
        Ok(())
    }

    /// Parses the line-oriented text format: `<vertex-id> <kind> <left>`
    /// per line, `#` starts a comment, blank lines are ignored.
    pub fn parse_muir(text: &str) -> Result<Representation, RepresentationError> {
        let mut intervals = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split_whitespace();
            let (id, kind, left) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(id), Some(kind), Some(left), None) => (id, kind, left),
                _ => {
                    return Err(RepresentationError::Parse {
                        line,
                        msg: format!("expected `<vertex-id> <kind> <left>`, got {content:?}"),
                    })
                }
            };
            let vertex: VertexId = id.parse().map_err(|_| RepresentationError::Parse {
                line,
                msg: format!("invalid vertex id {id:?}"),
            })?;
            let kind = IntervalKind::parse(kind).ok_or_else(|| RepresentationError::Parse {
                line,
                msg: format!("invalid kind {kind:?}, expected ++, +-, -+ or --"),
            })?;
            let left =
                parse_rational(left).map_err(|source| RepresentationError::BadRational {
                    line,
                    source,
                })?;
            intervals.push(UnitInterval::new(vertex, kind, left));
        }
        let rep = Representation::new(intervals);
        rep.validate()?;
        Ok(rep)
    }

    /// Serializes to the text format parsed by [`Representation::parse_muir`].
    pub fn to_muir(&self) -> String {
        let mut out = String::new();
        for iv in &self.intervals {
            out.push_str(&format!(
                "{} {} {}\n",
                iv.vertex,
                iv.kind,
                format_rational(&iv.left)
            ));
        }
        out
    }
}

/// Builds the intersection graph of a representation by pairwise tests.
pub fn graph_of_representation(rep: &Representation) -> Result<Graph, RepresentationError> {
    rep.validate()?;
    let mut g = Graph::new();
    for iv in &rep.intervals {
        g.insert_vertex(iv.vertex);
    }
    for (idx, a) in rep.intervals.iter().enumerate() {
        for b in &rep.intervals[idx + 1..] {
            if a.intersects(b) {
                g.add_edge(a.vertex, b.vertex);
            }
        }
    }
    Ok(g)
}
