//! Finite matrix groups: closure, membership with witness words, center.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactlin::MatC;
use crate::reflect::Word;

/// Default bound on the number of elements enumerated by [`closure`].
pub const DEFAULT_MAX_ORDER: usize = 10_000;

/// A finite group given by all of its elements. Each element records the
/// index of its BFS parent and the generator that leads to it.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    gens: Vec<MatC>,
    elements: Vec<MatC>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<MatC, usize>,
}

/// Breadth-first closure of the generators under right multiplication.
pub fn closure(gens: &[MatC], max_order: usize) -> Result<FiniteGroup> {
    let first = gens.first().ok_or_else(|| Error::DimensionMismatch("no generators".into()))?;
    if gens.iter().any(|g| !g.is_square() || g.rows() != first.rows() || g.field() != first.field()) {
        return Err(Error::DimensionMismatch("generators must be square matrices of one size over one field".into()));
    }
    let id = MatC::identity(first.field(), first.rows());
    let mut g = FiniteGroup {
        gens: gens.to_vec(),
        elements: vec![id.clone()],
        parent: vec![None],
        index: HashMap::from([(id, 0)]),
    };
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let products: Vec<(usize, usize, MatC)> = frontier
            .par_iter()
            .flat_map_iter(|&e| {
                let m = &g.elements[e];
                gens.iter().enumerate().map(move |(k, s)| (e, k, m.try_mul(s).expect("checked shapes")))
            })
            .collect();
        frontier.clear();
        for (e, k, m) in products {
            if g.index.contains_key(&m) {
                continue;
            }
            if g.elements.len() >= max_order {
                return Err(Error::OrderExceedsBound(max_order));
            }
            let i = g.elements.len();
            g.index.insert(m.clone(), i);
            g.elements.push(m);
            g.parent.push(Some((e, k)));
            frontier.push(i);
        }
    }
    Ok(g)
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[MatC] {
        &self.gens
    }

    pub fn elements(&self) -> &[MatC] {
        &self.elements
    }

    pub fn contains(&self, m: &MatC) -> bool {
        self.index.contains_key(m)
    }

    /// A positive word evaluating to `m`, if `m` lies in the group.
    pub fn member(&self, m: &MatC) -> Option<Word> {
        let mut i = *self.index.get(m)?;
        let mut w = Vec::new();
        while let Some((p, k)) = self.parent[i] {
            w.push((k, 1));
            i = p;
        }
        w.reverse();
        Some(w)
    }

    /// Elements commuting with every generator.
    pub fn center(&self) -> Vec<MatC> {
        self.elements
            .par_iter()
            .filter(|z| {
                self.gens
                    .iter()
                    .all(|g| z.try_mul(g).expect("square") == g.try_mul(z).expect("square"))
            })
            .cloned()
            .collect()
    }

    /// The order of an element of the group.
    pub fn element_order(&self, m: &MatC) -> Option<usize> {
        if !self.contains(m) {
            return None;
        }
        let id = &self.elements[0];
        let mut p = m.clone();
        for k in 1..=self.order() {
            if &p == id {
                return Some(k);
            }
            p = p.try_mul(m).ok()?;
        }
        None
    }
}
