//! Tree interpretation: every decorated tree stands for an iterated bracket.
//!
//! Leaves: `k ↦ h0`, `o ↦ h1`, `r ↦ res(h1)`, `n ↦ G(h1)`. A node brackets
//! its children and then, by its label, keeps the bracket (`o`), keeps its
//! resonant part (`r`) or turns it into a generator (`n`). Here `G` is
//! [`phase_generator`], the solution of `{h0, G(A)} = −nonres(A)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::enumeration::{tree_class, EnumConfig, TreeClassQuery};
use crate::error::{Error, Result};
pub use crate::hamiltonian::EvalConfig;
use crate::hamiltonian::{h0, h1, nonresonant_part, phase_generator, resonant_part, Kernel};
use crate::trees::{symmetry_factor, validate_tree, DecoratedTree, Decoration};

/// The normal form after `m` steps is built from the tree classes of index
/// `m + NORMAL_FORM_INDEX_OFFSET`: after one step, `res_below(3)` and
/// `circ_exact(3)`; after two, `res_below(4)` and `circ_exact(4)`.
pub const NORMAL_FORM_INDEX_OFFSET: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub tree: DecoratedTree,
    #[serde(rename = "S")]
    pub symmetry: u64,
    pub kernel: Kernel,
}

impl LedgerEntry {
    pub fn weight(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(self.symmetry))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub dim: usize,
    pub radius: i64,
    pub threshold: u64,
    pub cutoff: usize,
}

impl From<&EvalConfig> for ConfigRecord {
    fn from(c: &EvalConfig) -> Self {
        ConfigRecord {
            dim: c.lattice.dim,
            radius: c.lattice.radius as i64,
            threshold: c.resonance.threshold,
            cutoff: c.cutoff,
        }
    }
}

/// Trees, their symmetry factors and interpretations; `total` is the
/// weighted sum `Σ kernel / S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionLedger {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    pub config: ConfigRecord,
    pub entries: Vec<LedgerEntry>,
    pub total: Kernel,
}

impl ExpansionLedger {
    /// Recomputes `Σ kernel / S` from the entries.
    pub fn sum_entries(&self) -> Result<Kernel> {
        let mut total = self.total.filter(|_, _| false);
        for e in &self.entries {
            total.add_scaled(&e.kernel, &e.weight())?;
        }
        Ok(total)
    }
}

/// Interprets trees under one configuration, caching subtree kernels by
/// canonical string.
pub struct Evaluator {
    cfg: EvalConfig,
    enum_cfg: EnumConfig,
    cache: HashMap<String, Arc<Kernel>>,
}

impl Evaluator {
    pub fn new(cfg: EvalConfig, enum_cfg: EnumConfig) -> Self {
        Evaluator {
            cfg,
            enum_cfg,
            cache: HashMap::new(),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    pub fn h0(&self) -> Kernel {
        h0(self.cfg.lattice, self.cfg.cutoff)
    }

    /// Interpretation of a valid tree whose degree fits the cutoff.
    pub fn pi(&mut self, t: &DecoratedTree) -> Result<Kernel> {
        let rep = validate_tree(t, self.enum_cfg.mode);
        if !rep.valid {
            return Err(Error::InvalidTree {
                tree: t.canonical(),
                violations: rep.violations,
            });
        }
        if t.degree() > self.cfg.cutoff {
            return Err(Error::DegreeExceedsCutoff {
                degree: t.degree(),
                cutoff: self.cfg.cutoff,
            });
        }
        Ok((*self.eval(t)?).clone())
    }

    fn eval(&mut self, t: &DecoratedTree) -> Result<Arc<Kernel>> {
        let key = t.canonical();
        if let Some(k) = self.cache.get(&key) {
            return Ok(k.clone());
        }
        let res = self.cfg.resonance;
        let k = match t {
            DecoratedTree::Leaf(Decoration::K) => self.h0(),
            DecoratedTree::Leaf(d) => {
                let base = h1(self.cfg.lattice, self.cfg.cutoff);
                apply_label(*d, &base, &res)
            }
            DecoratedTree::Node(d, l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                apply_label(*d, &a.bracket(&b)?, &res)
            }
        };
        let k = Arc::new(k);
        self.cache.insert(key, k.clone());
        Ok(k)
    }

    fn ledger(
        &mut self,
        trees: &[DecoratedTree],
        with_h0: bool,
    ) -> Result<(Vec<LedgerEntry>, Kernel)> {
        let mut entries = Vec::new();
        let mut total = self.cfg.zero();
        if with_h0 {
            let k = self.h0();
            total.add_assign(&k)?;
            entries.push(LedgerEntry {
                tree: DecoratedTree::leaf(Decoration::K),
                symmetry: 1,
                kernel: k,
            });
        }
        for t in trees {
            let s = symmetry_factor(t, 0, self.enum_cfg.mode)?;
            let kernel = self.pi(t)?;
            total.add_scaled(&kernel, &BigRational::new(BigInt::from(1), BigInt::from(s)))?;
            entries.push(LedgerEntry {
                tree: t.clone(),
                symmetry: s,
                kernel,
            });
        }
        Ok((entries, total))
    }

    /// The generator of step `i` as a sum over `n_exact(i+1)`.
    pub fn f_transform(&mut self, i: usize) -> Result<ExpansionLedger> {
        if i == 0 {
            return Err(Error::InvalidArgument("generator index starts at 1".into()));
        }
        if self.cfg.cutoff < 2 * (i + 1) {
            return Err(Error::DegreeExceedsCutoff {
                degree: 2 * (i + 1),
                cutoff: self.cfg.cutoff,
            });
        }
        let trees = tree_class(&TreeClassQuery::n_exact(i + 1), &self.enum_cfg)?;
        let (entries, total) = self.ledger(&trees.trees, false)?;
        Ok(ExpansionLedger {
            m: None,
            ell: None,
            i: Some(i),
            config: (&self.cfg).into(),
            entries,
            total,
        })
    }

    /// Trees making up the normal form after `m` steps, truncated at degree
    /// `2ℓ`. Classes whose degrees lie above the cutoff contribute nothing.
    pub fn normal_form_trees(&self, m: usize, ell: usize) -> Result<Vec<DecoratedTree>> {
        if m == 0 || ell <= m {
            return Err(Error::InvalidArgument(format!(
                "need 0 < m < ell, got m={m} ell={ell}"
            )));
        }
        let idx = m + NORMAL_FORM_INDEX_OFFSET;
        let mut queries = vec![
            TreeClassQuery::res_below(idx),
            TreeClassQuery::circ_exact(idx),
        ];
        if idx < ell {
            queries.push(TreeClassQuery::circ_range(idx, ell));
        }
        let mut out = Vec::new();
        for q in &queries {
            let set = tree_class(q, &self.enum_cfg)?;
            out.extend(set.trees.into_iter().filter(|t| t.degree() <= 2 * ell));
        }
        Ok(out)
    }

    pub fn normal_form(&mut self, m: usize, ell: usize) -> Result<ExpansionLedger> {
        if self.cfg.cutoff != 2 * ell {
            return Err(Error::Mismatch(format!(
                "cutoff {} but ell = {ell}",
                self.cfg.cutoff
            )));
        }
        let trees = self.normal_form_trees(m, ell)?;
        let (entries, total) = self.ledger(&trees, true)?;
        Ok(ExpansionLedger {
            m: Some(m),
            ell: Some(ell),
            i: None,
            config: (&self.cfg).into(),
            entries,
            total,
        })
    }

    /// `{h0, F_i} + Σ_{circ_exact(i+1)} nonres(Π T)/S(T)`; empty when the
    /// generator cancels its target block.
    pub fn cancellation_check(&mut self, i: usize) -> Result<Kernel> {
        let f = self.f_transform(i)?;
        let mut residual = self.h0().bracket(&f.total)?;
        let trees = tree_class(&TreeClassQuery::circ_exact(i + 1), &self.enum_cfg)?;
        for t in trees.iter() {
            let s = symmetry_factor(t, 0, self.enum_cfg.mode)?;
            let k = nonresonant_part(&self.pi(t)?, &self.cfg.resonance);
            residual.add_scaled(&k, &BigRational::new(BigInt::from(1), BigInt::from(s)))?;
        }
        Ok(residual)
    }
}

fn apply_label(d: Decoration, k: &Kernel, res: &crate::hamiltonian::ResonanceConfig) -> Kernel {
    match d {
        Decoration::Circ | Decoration::K => k.clone(),
        Decoration::R => resonant_part(k, res),
        Decoration::N => phase_generator(k, res),
    }
}
