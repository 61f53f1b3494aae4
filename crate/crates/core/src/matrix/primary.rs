//! Joint generalized eigenspaces of commuting operators whose eigenvalues are
//! integers in a bounded box.

use super::MatrixE;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// One integer eigenvalue per operator.
    pub weight: Vec<i64>,
    pub dim: usize,
    /// Projector onto this component along the others.
    pub projector: MatrixE,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryDecomposition {
    pub dim: usize,
    pub bound: i64,
    pub components: Vec<Component>,
    /// `per_operator[i]` holds `(c, P_{i,c})` for each eigenvalue `c` of operator `i`.
    pub per_operator: Vec<Vec<(i64, MatrixE)>>,
}

impl PrimaryDecomposition {
    pub fn weights(&self) -> Vec<Vec<i64>> {
        self.components.iter().map(|c| c.weight.clone()).collect()
    }

    pub fn component(&self, weight: &[i64]) -> Option<&Component> {
        self.components.iter().find(|c| c.weight == weight)
    }
}

/// `2 * dim + max |trace|` over the operators, using balanced integer traces.
pub fn default_bound(ops: &[MatrixE]) -> i64 {
    let dim = ops.first().map(|m| m.rows()).unwrap_or(0) as i64;
    let t = ops.iter().filter_map(|m| m.trace().to_i64()).map(|t| t.abs()).max().unwrap_or(0);
    2 * dim + t
}

fn generalized_kernel(m: &MatrixE) -> Result<Vec<Vec<crate::field::Elem>>> {
    let mut power = m.clone();
    let mut rank = power.rank()?;
    loop {
        if rank == 0 {
            break;
        }
        let next = power.mul(m);
        let r = next.rank()?;
        if r == rank {
            break;
        }
        power = next;
        rank = r;
    }
    power.kernel()
}

fn single_operator(a: &MatrixE, bound: i64) -> Result<Vec<(i64, MatrixE)>> {
    let field = a.field();
    let d = a.rows();
    let id = MatrixE::identity(field, d);
    let mut blocks: Vec<(i64, Vec<Vec<crate::field::Elem>>)> = Vec::new();
    let mut total = 0;
    for c in -bound..=bound {
        let m = a.sub(&id.scale(&field.int(c)));
        if m.rank()? == d {
            continue;
        }
        let ker = generalized_kernel(&m)?;
        total += ker.len();
        blocks.push((c, ker));
    }
    if total != d {
        return Err(Error::NotSplitInBox { bound, found: total, dim: d });
    }
    let cols: Vec<_> = blocks.iter().flat_map(|(_, k)| k.iter().cloned()).collect();
    let q = MatrixE::from_columns(field, d, &cols);
    let qinv = q.inverse()?;
    let mut out = Vec::new();
    let mut start = 0;
    for (c, ker) in blocks {
        let mut e = MatrixE::zeros(field, d, d);
        for i in start..start + ker.len() {
            e[(i, i)] = field.one();
        }
        start += ker.len();
        out.push((c, q.mul(&e).mul(&qinv)));
    }
    Ok(out)
}

/// Decomposes the space into joint generalized eigenspaces of `ops`, each of
/// which must have integer eigenvalues in `[-bound, bound]` (default
/// [`default_bound`]).
pub fn primary_decomposition(ops: &[MatrixE], bound: Option<i64>) -> Result<PrimaryDecomposition> {
    let Some(first) = ops.first() else {
        return Err(Error::DimensionMismatch("no operators".into()));
    };
    let field = first.field().clone();
    let d = first.rows();
    if ops.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(Error::DimensionMismatch("operators must be square of equal size".into()));
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if !ops[i].commutator(&ops[j]).is_zero() {
                return Err(Error::NotCommuting(format!("operators {i} and {j}")));
            }
        }
    }
    let bound = bound.unwrap_or_else(|| default_bound(ops));
    let per_operator = ops.iter().map(|a| single_operator(a, bound)).collect::<Result<Vec<_>>>()?;

    let mut partial: Vec<(Vec<i64>, MatrixE)> = vec![(Vec::new(), MatrixE::identity(&field, d))];
    for projs in &per_operator {
        let mut next = Vec::new();
        for (w, p) in &partial {
            for (c, q) in projs {
                let prod = p.mul(q);
                if prod.is_zero() {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(*c);
                next.push((w2, prod));
            }
        }
        partial = next;
    }
    let mut components = Vec::new();
    let mut total = 0;
    for (weight, projector) in partial {
        let dim = projector.rank()?;
        total += dim;
        components.push(Component { weight, dim, projector });
    }
    if total != d {
        return Err(Error::NotSplitInBox { bound, found: total, dim: d });
    }
    components.sort_by(|a, b| a.weight.cmp(&b.weight));
    Ok(PrimaryDecomposition { dim: d, bound, components, per_operator })
}

/// Jordan decomposition `A = S + N` of each operator, with `S` the integer
/// semisimple part read off the primary decomposition.
pub fn ss_nilpotent_parts(ops: &[MatrixE], bound: Option<i64>) -> Result<Vec<(MatrixE, MatrixE)>> {
    let dec = primary_decomposition(ops, bound)?;
    Ok(ops
        .iter()
        .zip(&dec.per_operator)
        .map(|(a, projs)| {
            let field = a.field();
            let s = projs.iter().fold(MatrixE::zeros(field, a.rows(), a.cols()), |acc, (c, p)| acc.add(&p.scale(&field.int(*c))));
            let n = a.sub(&s);
            (s, n)
        })
        .collect())
}
