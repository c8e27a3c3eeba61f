//! Tree classes by exhaustive enumeration, and the comb-grafting construction.
//!
//! [`enumerate_valid`] builds every valid tree up to a degree bound, pruning
//! on the local rules as it composes. [`tree_class`] filters that list.
//! [`graft_expansion`] rebuilds the same classes stage by stage from combs,
//! the way a Birkhoff step produces them, and is kept as a cross-check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trees::{
    raw_symmetry_factor, symmetry_factor, AssumptionMode, DecoratedTree, Decoration,
};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    pub mode: AssumptionMode,
    /// Maximum number of trees held at once before giving up.
    pub cap: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            mode: AssumptionMode::default(),
            cap: DEFAULT_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeKind {
    /// root r, degree < 2m
    ResBelow,
    /// root ∘, degree = 2m
    CircExact,
    /// root n, degree = 2m
    NExact,
    /// root ∘, 2m < degree ≤ 2ℓ, every internal n-node of degree < 2m
    CircRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeClassQuery {
    pub kind: TreeKind,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
}

impl TreeClassQuery {
    pub fn res_below(m: usize) -> Self {
        TreeClassQuery {
            kind: TreeKind::ResBelow,
            m,
            ell: None,
        }
    }
    pub fn circ_exact(m: usize) -> Self {
        TreeClassQuery {
            kind: TreeKind::CircExact,
            m,
            ell: None,
        }
    }
    pub fn n_exact(m: usize) -> Self {
        TreeClassQuery {
            kind: TreeKind::NExact,
            m,
            ell: None,
        }
    }
    pub fn circ_range(m: usize, ell: usize) -> Self {
        TreeClassQuery {
            kind: TreeKind::CircRange,
            m,
            ell: Some(ell),
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        match (self.kind, self.ell) {
            (TreeKind::CircRange, Some(ell)) if self.m < ell => Ok(()),
            (TreeKind::CircRange, Some(ell)) => Err(Error::InvalidArgument(format!(
                "circ_range needs m < ell, got m={} ell={ell}",
                self.m
            ))),
            (TreeKind::CircRange, None) => {
                Err(Error::InvalidArgument("circ_range needs ell".into()))
            }
            (_, _) => Ok(()),
        }
    }

    /// Largest degree a member can have.
    pub fn max_degree(&self) -> usize {
        match self.kind {
            TreeKind::ResBelow => 2 * self.m - 2,
            TreeKind::CircExact | TreeKind::NExact => 2 * self.m,
            TreeKind::CircRange => 2 * self.ell.unwrap_or(self.m),
        }
    }

    pub fn contains(&self, t: &DecoratedTree) -> bool {
        let d = t.degree();
        let m2 = 2 * self.m;
        match self.kind {
            TreeKind::ResBelow => t.root() == Decoration::R && d < m2,
            TreeKind::CircExact => t.root() == Decoration::Circ && d == m2,
            TreeKind::NExact => t.root() == Decoration::N && d == m2,
            TreeKind::CircRange => {
                let ell2 = 2 * self.ell.unwrap_or(self.m);
                t.root() == Decoration::Circ
                    && m2 < d
                    && d <= ell2
                    && t.max_internal_n_degree().is_none_or(|x| x < m2)
            }
        }
    }
}

impl fmt::Display for TreeClassQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TreeKind::ResBelow => write!(f, "res_below({})", self.m),
            TreeKind::CircExact => write!(f, "circ_exact({})", self.m),
            TreeKind::NExact => write!(f, "n_exact({})", self.m),
            TreeKind::CircRange => write!(f, "circ_range({}, {})", self.m, self.ell.unwrap_or(0)),
        }
    }
}

/// Trees in canonical-string order, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSet {
    pub query: Option<TreeClassQuery>,
    pub trees: Vec<DecoratedTree>,
}

impl TreeSet {
    fn sorted(query: Option<TreeClassQuery>, mut trees: Vec<DecoratedTree>) -> Self {
        trees.sort_by_cached_key(|t| t.canonical());
        trees.dedup();
        TreeSet { query, trees }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DecoratedTree> {
        self.trees.iter()
    }

    pub fn canonical_strings(&self) -> Vec<String> {
        self.trees.iter().map(|t| t.canonical()).collect()
    }

    pub fn export(&self, mode: AssumptionMode) -> Result<TreeSetExport> {
        let symmetry_factors = self
            .trees
            .iter()
            .map(|t| symmetry_factor(t, 0, mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeSetExport {
            query: self.query,
            trees: self.canonical_strings(),
            degrees: self.trees.iter().map(|t| t.degree()).collect(),
            symmetry_factors,
        })
    }
}

/// JSON shape of a [`TreeSet`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeSetExport {
    pub query: Option<TreeClassQuery>,
    pub trees: Vec<String>,
    pub degrees: Vec<usize>,
    pub symmetry_factors: Vec<u64>,
}

/// Every valid tree of degree at most `max_degree`.
///
/// Trees are grown bottom-up by degree. Children are kept if they are valid
/// in an embedded position; a node is kept if its own local rules hold. The
/// final filter drops trees that only make sense below a parent (a `k`-leaf
/// directly under the top node).
pub fn enumerate_valid(max_degree: usize, cfg: &EnumConfig) -> Result<TreeSet> {
    if max_degree < 2 {
        return Err(Error::InvalidArgument(format!(
            "max_degree {max_degree} < 2"
        )));
    }
    let pools = embedded_pools(max_degree, cfg)?;
    let trees = pools
        .into_iter()
        .flatten()
        .filter(|t| match t.children() {
            Some((l, _)) => *l != DecoratedTree::Leaf(Decoration::K),
            None => true,
        })
        .collect();
    Ok(TreeSet::sorted(None, trees))
}

/// `pools[d/2]` holds the embedded-valid trees of degree exactly `d`.
fn embedded_pools(max_degree: usize, cfg: &EnumConfig) -> Result<Vec<Vec<DecoratedTree>>> {
    let top = max_degree / 2;
    let mut pools: Vec<Vec<DecoratedTree>> = vec![Vec::new(); top + 1];
    let mut count = 0usize;
    for h in 1..=top {
        let d = 2 * h;
        let mut pool = Vec::new();
        if d == 2 {
            pool.push(DecoratedTree::leaf(Decoration::K));
        }
        if d == 4 {
            for dec in [Decoration::Circ, Decoration::N, Decoration::R] {
                pool.push(DecoratedTree::leaf(dec));
            }
        }
        // d = dl + dr - 2 with dr >= 4. A k-leaf on the left (dl = 2) needs a
        // right child of degree d itself, so that case runs last, against the
        // n-rooted trees of this very degree.
        for hl in (1..h).rev() {
            let hr = h + 1 - hl;
            let rights: Vec<DecoratedTree> = if hr == h {
                pool.iter()
                    .filter(|r| r.root() == Decoration::N)
                    .cloned()
                    .collect()
            } else {
                pools[hr]
                    .iter()
                    .filter(|r| r.root() == Decoration::N)
                    .cloned()
                    .collect()
            };
            for l in pools[hl].iter().filter(|l| l.root() != Decoration::N) {
                for r in &rights {
                    for dec in [Decoration::Circ, Decoration::N, Decoration::R] {
                        if node_ok(dec, l, r, cfg.mode) {
                            pool.push(DecoratedTree::node(dec, l.clone(), r.clone()));
                        }
                    }
                }
            }
            if count + pool.len() > cfg.cap {
                return Err(Error::ResourceCap { cap: cfg.cap });
            }
        }
        count += pool.len();
        if count > cfg.cap {
            return Err(Error::ResourceCap { cap: cfg.cap });
        }
        pools[h] = pool;
    }
    Ok(pools)
}

/// Local rules at a node whose children are already known to be valid.
fn node_ok(dec: Decoration, l: &DecoratedTree, r: &DecoratedTree, mode: AssumptionMode) -> bool {
    let (dl, dr) = (l.degree(), r.degree());
    match l {
        DecoratedTree::Leaf(Decoration::K) => dec == Decoration::Circ,
        DecoratedTree::Leaf(Decoration::Circ) => dl >= dr,
        DecoratedTree::Node(Decoration::Circ, _, l_right) => {
            let d3 = l_right.degree();
            dl >= dr
                && match mode {
                    AssumptionMode::ProofOrder => d3 <= dr,
                    AssumptionMode::Stated => d3 >= dr,
                }
        }
        t if t.root() == Decoration::R => dl < dr,
        _ => true,
    }
}

pub fn tree_class(q: &TreeClassQuery, cfg: &EnumConfig) -> Result<TreeSet> {
    q.check()?;
    let top = q.max_degree();
    if top < 2 {
        return Ok(TreeSet {
            query: Some(*q),
            trees: Vec::new(),
        });
    }
    let all = enumerate_valid(top, cfg)?;
    let trees = all.trees.into_iter().filter(|t| q.contains(t)).collect();
    Ok(TreeSet::sorted(Some(*q), trees))
}

/// Left comb: `base` joined with `tail[0]`, then each further tail element
/// attached on the right. Inner nodes are ∘; the outermost carries `root_dec`.
pub fn graft_comb(
    base: &DecoratedTree,
    tail: &[DecoratedTree],
    root_dec: Decoration,
) -> Result<DecoratedTree> {
    if tail.is_empty() {
        return Err(Error::InvalidArgument("empty comb tail".into()));
    }
    if base.root() == Decoration::N {
        return Err(Error::InvalidArgument(
            "comb base may not be rooted n".into(),
        ));
    }
    if root_dec == Decoration::K {
        return Err(Error::InvalidArgument(
            "k cannot label an internal node".into(),
        ));
    }
    if let Some(bad) = tail.iter().find(|t| t.root() != Decoration::N) {
        return Err(Error::InvalidArgument(format!(
            "comb tail element {bad} is not rooted n"
        )));
    }
    let mut acc = base.clone();
    for (idx, t) in tail.iter().enumerate() {
        let dec = if idx + 1 == tail.len() {
            root_dec
        } else {
            Decoration::Circ
        };
        acc = DecoratedTree::node(dec, acc, t.clone());
    }
    Ok(acc)
}

/// A tree produced by [`graft_expansion`] with the Taylor weight `1/symmetry`
/// it picked up along the way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraftTerm {
    pub tree: DecoratedTree,
    pub symmetry: u64,
}

/// Trees of the Hamiltonian after `stages` Birkhoff steps, up to `max_degree`,
/// built by grafting.
///
/// Start from `{k, o}` (the quadratic and quartic parts). Step `s` takes the
/// ∘-rooted block of degree `2s+2` as the generator (relabeled `n`), turns
/// that block resonant (relabeled `r`), and adds every comb
/// `{…{X, a₁}, …, a_p}` with `X` an old term and `aᵢ` generator trees, weight
/// `1/p!` times the weights of the pieces. The comb with base `k` and `p = 1`
/// is the one absorbed by the resonant relabel.
pub fn graft_expansion(stages: usize, max_degree: usize) -> Vec<GraftTerm> {
    graft_run(stages, max_degree).0
}

/// Generator trees of step `stage` (`stage ≥ 1`), with weights.
pub fn graft_generators(stage: usize) -> Vec<GraftTerm> {
    let mut g = graft_run(stage, 2 * stage + 2).1;
    sort_terms(&mut g);
    g
}

fn graft_run(stages: usize, max_degree: usize) -> (Vec<GraftTerm>, Vec<GraftTerm>) {
    let mut terms = vec![
        GraftTerm {
            tree: DecoratedTree::leaf(Decoration::K),
            symmetry: 1,
        },
        GraftTerm {
            tree: DecoratedTree::leaf(Decoration::Circ),
            symmetry: 1,
        },
    ];
    let mut gens = Vec::new();
    for s in 1..=stages {
        let block = 2 * s + 2;
        let in_block = |t: &DecoratedTree| t.root() == Decoration::Circ && t.degree() == block;
        gens = terms
            .iter()
            .filter(|x| in_block(&x.tree))
            .map(|x| GraftTerm {
                tree: x.tree.with_root(Decoration::N),
                symmetry: x.symmetry,
            })
            .collect::<Vec<_>>();

        let mut next: Vec<GraftTerm> = terms
            .iter()
            .map(|x| {
                if in_block(&x.tree) {
                    GraftTerm {
                        tree: x.tree.with_root(Decoration::R),
                        symmetry: x.symmetry,
                    }
                } else {
                    x.clone()
                }
            })
            .collect();
        if !gens.is_empty() {
            for x in &terms {
                let mut tails: Vec<(Vec<DecoratedTree>, u64)> = vec![(Vec::new(), 1)];
                let mut p = 0u64;
                loop {
                    p += 1;
                    let deg = x.tree.degree() + (p as usize) * (block - 2);
                    if deg > max_degree {
                        break;
                    }
                    tails = tails
                        .iter()
                        .flat_map(|(tail, w)| {
                            gens.iter().map(move |g| {
                                let mut t = tail.clone();
                                t.push(g.tree.clone());
                                (t, w * g.symmetry)
                            })
                        })
                        .collect();
                    if x.tree == DecoratedTree::leaf(Decoration::K) && p == 1 {
                        continue;
                    }
                    let fact: u64 = (1..=p).product();
                    for (tail, w) in &tails {
                        let tree = graft_comb(&x.tree, tail, Decoration::Circ)
                            .expect("generator trees are rooted n");
                        next.push(GraftTerm {
                            tree,
                            symmetry: fact * x.symmetry * w,
                        });
                    }
                }
            }
        }
        terms = next;
    }
    terms.retain(|x| x.tree.degree() <= max_degree);
    sort_terms(&mut terms);
    (terms, gens)
}

fn sort_terms(v: &mut [GraftTerm]) {
    v.sort_by_cached_key(|x| x.tree.canonical());
}

/// Closed form of `S^j` on a comb with `p` tail elements, when the comb
/// recursion runs all the way down to the base.
pub fn comb_symmetry(j: u64, base: &DecoratedTree, tail: &[DecoratedTree]) -> u64 {
    let p = tail.len() as u64;
    let rising: u64 = (1..=p).map(|i| j + i).product();
    rising
        * raw_symmetry_factor(base, 0)
        * tail
            .iter()
            .map(|t| raw_symmetry_factor(t, 0))
            .product::<u64>()
}
