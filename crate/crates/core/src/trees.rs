//! Decorated planar binary trees.
//!
//! A tree is a leaf or a node carrying a [`Decoration`] and two ordered
//! children. Validity is a set of local rules checked by [`validate_tree`];
//! degree and symmetry factor are computed recursively.
//!
//! Canonical text form: `(o)`, `(r (o (k) (n)) (n))`, left subtree first.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node label. The derived order `Circ < K < N < R` is the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoration {
    Circ,
    K,
    N,
    R,
}

impl Decoration {
    pub const ALL: [Decoration; 4] = [
        Decoration::Circ,
        Decoration::K,
        Decoration::N,
        Decoration::R,
    ];

    pub fn letter(self) -> char {
        match self {
            Decoration::Circ => 'o',
            Decoration::K => 'k',
            Decoration::N => 'n',
            Decoration::R => 'r',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'o' => Some(Decoration::Circ),
            'k' => Some(Decoration::K),
            'n' => Some(Decoration::N),
            'r' => Some(Decoration::R),
            _ => None,
        }
    }

    fn latex(self) -> &'static str {
        match self {
            Decoration::Circ => "\\circ",
            Decoration::K => "k",
            Decoration::N => "n",
            Decoration::R => "r",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecoratedTree {
    Leaf(Decoration),
    Node(Decoration, Arc<DecoratedTree>, Arc<DecoratedTree>),
}

use DecoratedTree::{Leaf, Node};

impl DecoratedTree {
    pub fn leaf(d: Decoration) -> Self {
        Leaf(d)
    }

    pub fn node(d: Decoration, left: DecoratedTree, right: DecoratedTree) -> Self {
        Node(d, Arc::new(left), Arc::new(right))
    }

    pub fn root(&self) -> Decoration {
        match self {
            Leaf(d) | Node(d, _, _) => *d,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Leaf(_))
    }

    pub fn children(&self) -> Option<(&DecoratedTree, &DecoratedTree)> {
        match self {
            Leaf(_) => None,
            Node(_, l, r) => Some((l, r)),
        }
    }

    /// Same shape, root label replaced.
    pub fn with_root(&self, d: Decoration) -> Self {
        match self {
            Leaf(_) => Leaf(d),
            Node(_, l, r) => Node(d, l.clone(), r.clone()),
        }
    }

    /// `2·#k-leaves + 4·#other-leaves − #edges`.
    pub fn degree(&self) -> usize {
        match self {
            Leaf(Decoration::K) => 2,
            Leaf(_) => 4,
            Node(_, l, r) => l.degree() + r.degree() - 2,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Leaf(_) => 1,
            Node(_, l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    /// Largest degree of an internal node decorated `n`, if any.
    pub fn max_internal_n_degree(&self) -> Option<usize> {
        match self {
            Leaf(_) => None,
            Node(d, l, r) => {
                let own = (*d == Decoration::N).then(|| self.degree());
                own.max(l.max_internal_n_degree())
                    .max(r.max_internal_n_degree())
            }
        }
    }

    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, out: &mut String) {
        out.push('(');
        match self {
            Leaf(d) => out.push(d.letter()),
            Node(d, l, r) => {
                out.push(d.letter());
                out.push(' ');
                l.write_canonical(out);
                out.push(' ');
                r.write_canonical(out);
            }
        }
        out.push(')');
    }
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl std::str::FromStr for DecoratedTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl Serialize for DecoratedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for DecoratedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// parsing

pub fn parse(text: &str) -> Result<DecoratedTree> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn tree(&mut self) -> Result<DecoratedTree> {
        self.expect(b'(')?;
        let dec = self
            .peek()
            .and_then(|b| Decoration::from_letter(b as char))
            .ok_or_else(|| self.err("expected decoration letter o, k, n or r"))?;
        self.pos += 1;
        if self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(Leaf(dec));
        }
        if !self.skip_ws() {
            return Err(self.err("expected ')' or a space before children"));
        }
        let left = self.tree()?;
        if !self.skip_ws() {
            return Err(self.err("expected a space between children"));
        }
        let right = self.tree()?;
        self.skip_ws();
        self.expect(b')')?;
        Ok(DecoratedTree::node(dec, left, right))
    }
}

// ---------------------------------------------------------------------------
// rendering

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Canonical,
    Latex,
    Dot,
    Text,
}

pub fn render(t: &DecoratedTree, format: RenderFormat) -> String {
    match format {
        RenderFormat::Canonical => t.canonical(),
        RenderFormat::Latex => {
            let mut s = String::from(
                "\\begin{forest}\n  for tree={circle, draw, inner sep=1pt, math content}\n  ",
            );
            latex_node(t, &mut s);
            s.push_str("\n\\end{forest}");
            s
        }
        RenderFormat::Dot => {
            let mut s = String::from("digraph tree {\n  node [shape=circle];\n");
            let mut next = 0usize;
            dot_node(t, &mut s, &mut next);
            s.push_str("}\n");
            s
        }
        RenderFormat::Text => {
            let mut s = String::new();
            text_node(t, "", "", &mut s);
            s
        }
    }
}

fn latex_node(t: &DecoratedTree, out: &mut String) {
    out.push('[');
    out.push_str(t.root().latex());
    if let Some((l, r)) = t.children() {
        out.push(' ');
        latex_node(l, out);
        out.push(' ');
        latex_node(r, out);
    }
    out.push(']');
}

fn dot_node(t: &DecoratedTree, out: &mut String, next: &mut usize) -> usize {
    let id = *next;
    *next += 1;
    out.push_str(&format!("  v{id} [label=\"{}\"];\n", t.root().letter()));
    if let Some((l, r)) = t.children() {
        let li = dot_node(l, out, next);
        let ri = dot_node(r, out, next);
        out.push_str(&format!("  v{id} -> v{li} [label=\"L\"];\n"));
        out.push_str(&format!("  v{id} -> v{ri} [label=\"R\"];\n"));
    }
    id
}

fn text_node(t: &DecoratedTree, head: &str, tail: &str, out: &mut String) {
    out.push_str(head);
    out.push(t.root().letter());
    out.push_str(&format!("  [{}]\n", t.degree()));
    if let Some((l, r)) = t.children() {
        text_node(l, &format!("{tail}├─L "), &format!("{tail}│   "), out);
        text_node(r, &format!("{tail}└─R "), &format!("{tail}    "), out);
    }
}

// ---------------------------------------------------------------------------
// validation

/// Two readings of the nested clause of the size assumption for a node whose
/// left child `(∘; T4, T3)` is an internal ∘-node and whose right child is `T2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssumptionMode {
    /// `|T3| ≤ |T2|`. Reproduces the displayed tree sets and the Birkhoff oracle.
    #[default]
    ProofOrder,
    /// `|T3| ≥ |T2|`, the reading as first stated.
    Stated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// right child not rooted `n`
    #[serde(rename = "a")]
    A,
    /// left child rooted `n`
    #[serde(rename = "b")]
    B,
    /// misplaced `k`
    #[serde(rename = "c")]
    C,
    /// ∘-rooted left child too small, or nested clause broken
    #[serde(rename = "i")]
    I,
    /// r-rooted left child not strictly smaller
    #[serde(rename = "ii")]
    II,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::A => "a",
            Rule::B => "b",
            Rule::C => "c",
            Rule::I => "i",
            Rule::II => "ii",
        };
        f.write_str(s)
    }
}

/// `path` spells the route from the root as `L`/`R` steps; empty for the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = if self.path.is_empty() {
            "root"
        } else {
            &self.path
        };
        write!(f, "rule {} at {}", self.rule, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks the grammar rules and the size assumption for a standalone tree.
pub fn validate_tree(t: &DecoratedTree, mode: AssumptionMode) -> ValidationReport {
    report(t, mode, true)
}

/// Like [`validate_tree`], but for a tree that will sit below some parent:
/// a `k`-leaf child of the top node is then allowed.
pub fn validate_embedded(t: &DecoratedTree, mode: AssumptionMode) -> ValidationReport {
    report(t, mode, false)
}

pub fn is_valid(t: &DecoratedTree, mode: AssumptionMode) -> bool {
    validate_tree(t, mode).valid
}

fn report(t: &DecoratedTree, mode: AssumptionMode, at_root: bool) -> ValidationReport {
    let mut violations = Vec::new();
    let mut path = String::new();
    check(t, mode, at_root, &mut path, &mut violations);
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

fn check(
    t: &DecoratedTree,
    mode: AssumptionMode,
    is_root: bool,
    path: &mut String,
    out: &mut Vec<Violation>,
) -> usize {
    let Node(d, l, r) = t else {
        return t.degree();
    };
    let mut flag = |suffix: &str, rule: Rule| {
        out.push(Violation {
            path: format!("{path}{suffix}"),
            rule,
        });
    };
    if *d == Decoration::K {
        flag("", Rule::C);
    }
    if r.root() != Decoration::N {
        flag("R", Rule::A);
    }
    if l.root() == Decoration::N {
        flag("L", Rule::B);
    }
    for (child, side) in [(l, "L"), (r, "R")] {
        if **child == Leaf(Decoration::K) && (*d != Decoration::Circ || is_root) {
            flag(side, Rule::C);
        }
    }

    path.push('L');
    let dl = check(l, mode, false, path, out);
    path.pop();
    path.push('R');
    let dr = check(r, mode, false, path, out);
    path.pop();

    match l.root() {
        Decoration::Circ => {
            let mut ok = dl >= dr;
            if let Node(_, _, l_right) = &**l {
                let d3 = l_right.degree();
                ok &= match mode {
                    AssumptionMode::ProofOrder => d3 <= dr,
                    AssumptionMode::Stated => d3 >= dr,
                };
            }
            if !ok {
                out.push(Violation {
                    path: path.clone(),
                    rule: Rule::I,
                });
            }
        }
        Decoration::R if dl >= dr => {
            out.push(Violation {
                path: path.clone(),
                rule: Rule::II,
            });
        }
        _ => {}
    }
    dl + dr - 2
}

// ---------------------------------------------------------------------------
// symmetry factor

/// `S^j(T)`; rejects trees that fail [`validate_tree`] under `mode`.
/// `S(T)` is `symmetry_factor(T, 0, mode)`.
pub fn symmetry_factor(t: &DecoratedTree, j: u64, mode: AssumptionMode) -> Result<u64> {
    let rep = validate_tree(t, mode);
    if !rep.valid {
        return Err(Error::InvalidTree {
            tree: t.canonical(),
            violations: rep.violations,
        });
    }
    Ok(raw_symmetry_factor(t, j))
}

/// The `S^j` recursion with no validity check.
///
/// Leaves give `j+1`. A node `(d; T1, T2)` whose left child is an internal
/// ∘-node `(∘; T4, T3)` with `|T3| = |T2|` continues the comb:
/// `(j+1)·S^{j+1}(T1)·S(T2)`. Every other node restarts:
/// `(j+1)·S(T1)·S(T2)`. The node's own label `d` plays no role, so relabeling
/// a root between ∘, n and r keeps the factor.
pub fn raw_symmetry_factor(t: &DecoratedTree, j: u64) -> u64 {
    match t {
        Leaf(_) => j + 1,
        Node(_, l, r) => {
            let comb = match &**l {
                Node(Decoration::Circ, _, l_right) => l_right.degree() == r.degree(),
                _ => false,
            };
            let left = if comb {
                raw_symmetry_factor(l, j + 1)
            } else {
                raw_symmetry_factor(l, 0)
            };
            (j + 1) * left * raw_symmetry_factor(r, 0)
        }
    }
}
