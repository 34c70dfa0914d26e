//! General-position search: find a grid point at which finitely many
//! polynomials over different fields are simultaneously nonzero, and use it
//! to combine matrices while preserving rank lower bounds.
//!
//! The searches are exhaustive lexicographic sweeps with early exit. The
//! cardinality preconditions guarantee that a sweep always succeeds, so
//! running out of grid is reported as an internal contradiction rather than
//! a plain failure.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{El, Field, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenPosError {
    #[error("embedding of coordinate {coord} into field {field} is not injective")]
    EmbeddingNotInjective { coord: usize, field: usize },
    #[error("coordinate {coord} has {have} labels but needs more than {bound}")]
    CardinalityPrecondition {
        coord: usize,
        have: usize,
        bound: usize,
    },
    #[error("base block row for field {0} has rank below its target")]
    RankPrecondition(usize),
    #[error("no summand for field {0} reaches the target rank")]
    MissingFullRankBlock(usize),
    #[error("grid exhausted without a valid point; this contradicts the cardinality bound")]
    ExhaustedGrid,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// One grid coordinate: a totally ordered finite label set together with an
/// injective embedding into every field of the problem.
#[derive(Clone, Debug)]
pub struct GridCoord {
    labels: Vec<String>,
    /// `embeddings[i][l]` is the image of label `l` in field `i`.
    embeddings: Vec<Vec<El>>,
}

impl GridCoord {
    pub fn new(labels: Vec<String>, embeddings: Vec<Vec<El>>) -> GridCoord {
        GridCoord { labels, embeddings }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[derive(Clone, Debug)]
pub struct GridProblem {
    fields: Vec<Field>,
    coords: Vec<GridCoord>,
}

impl GridProblem {
    /// Labels are sorted into lexicographic order (ties in search order are
    /// broken by label order, which is the determinism contract). Every
    /// embedding is checked for injectivity.
    pub fn new(fields: Vec<Field>, mut coords: Vec<GridCoord>) -> Result<GridProblem, GenPosError> {
        for (j, coord) in coords.iter_mut().enumerate() {
            if coord.embeddings.len() != fields.len() {
                return Err(GenPosError::ShapeMismatch(format!(
                    "coordinate {j} embeds into {} fields, expected {}",
                    coord.embeddings.len(),
                    fields.len()
                )));
            }
            let mut order: Vec<usize> = (0..coord.labels.len()).collect();
            order.sort_by(|&a, &b| coord.labels[a].cmp(&coord.labels[b]));
            coord.labels = order.iter().map(|&k| coord.labels[k].clone()).collect();
            for emb in coord.embeddings.iter_mut() {
                if emb.len() != coord.labels.len() {
                    return Err(GenPosError::ShapeMismatch(format!(
                        "coordinate {j}: embedding size does not match label count"
                    )));
                }
                *emb = order.iter().map(|&k| emb[k].clone()).collect();
            }
            for (i, emb) in coord.embeddings.iter().enumerate() {
                for a in 0..emb.len() {
                    for b in a + 1..emb.len() {
                        if emb[a] == emb[b] {
                            return Err(GenPosError::EmbeddingNotInjective { coord: j, field: i });
                        }
                    }
                }
            }
        }
        Ok(GridProblem { fields, coords })
    }

    /// Grid over a single field where every coordinate uses the same label
    /// set embedded identically.
    pub fn uniform(field: Field, values: Vec<El>, t: usize) -> Result<GridProblem, GenPosError> {
        let labels: Vec<String> = (0..values.len()).map(|k| format!("{k:04}")).collect();
        let coord = GridCoord::new(labels, vec![values]);
        GridProblem::new(vec![field], vec![coord; t])
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn coords(&self) -> &[GridCoord] {
        &self.coords
    }

    pub fn embedded(&self, field: usize, point: &[usize]) -> Vec<El> {
        point
            .iter()
            .enumerate()
            .map(|(j, &l)| self.coords[j].embeddings[field][l].clone())
            .collect()
    }

    fn sweep(&self, mut accept: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
        if self.coords.iter().any(GridCoord::is_empty) {
            return None;
        }
        let t = self.coords.len();
        let mut point = vec![0usize; t];
        loop {
            if accept(&point) {
                return Some(point);
            }
            // Lexicographic odometer on label indices.
            let mut j = t;
            loop {
                if j == 0 {
                    return None;
                }
                j -= 1;
                point[j] += 1;
                if point[j] < self.coords[j].len() {
                    break;
                }
                point[j] = 0;
            }
        }
    }
}

/// A sparse polynomial over one of the grid's fields, with an explicit
/// exponent bound per coordinate that every monomial in its support divides.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    field_index: usize,
    bounds: Vec<u32>,
    terms: BTreeMap<Vec<u32>, El>,
}

impl MultiPoly {
    pub fn new(
        field_index: usize,
        bounds: Vec<u32>,
        terms: Vec<(Vec<u32>, El)>,
    ) -> Result<MultiPoly, GenPosError> {
        let mut map = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != bounds.len() {
                return Err(GenPosError::ShapeMismatch(
                    "exponent tuple length differs from bound vector".into(),
                ));
            }
            if exps.iter().zip(&bounds).any(|(e, b)| e > b) {
                return Err(GenPosError::ShapeMismatch(
                    "monomial exceeds its exponent bound".into(),
                ));
            }
            map.insert(exps, coeff);
        }
        if map.is_empty() {
            return Err(GenPosError::ShapeMismatch(
                "polynomial must have at least one term".into(),
            ));
        }
        Ok(MultiPoly {
            field_index,
            bounds,
            terms: map,
        })
    }

    pub fn field_index(&self) -> usize {
        self.field_index
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &El)> {
        self.terms.iter()
    }

    pub fn eval(&self, field: &Field, point: &[El]) -> El {
        let mut acc = field.zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (x, &e) in point.iter().zip(exps) {
                term = field.mul(&term, &field.pow(x, e as u128));
            }
            acc = field.add(&acc, &term);
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub indices: Vec<usize>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CombineResult {
    pub point: GridPoint,
    /// Rank actually achieved by each field's combined matrix.
    pub achieved: Vec<usize>,
}

fn grid_point(gp: &GridProblem, indices: Vec<usize>) -> GridPoint {
    let labels = indices
        .iter()
        .enumerate()
        .map(|(j, &l)| gp.coords[j].labels[l].clone())
        .collect();
    GridPoint { indices, labels }
}

/// First grid point (in lexicographic label order) at which every
/// polynomial evaluates to a nonzero field element.
pub fn find_nonvanishing_point(
    gp: &GridProblem,
    polys: &[MultiPoly],
) -> Result<GridPoint, GenPosError> {
    for (j, coord) in gp.coords.iter().enumerate() {
        let bound: u32 = polys.iter().map(|f| f.bounds[j]).sum();
        if coord.len() <= bound as usize {
            return Err(GenPosError::CardinalityPrecondition {
                coord: j,
                have: coord.len(),
                bound: bound as usize,
            });
        }
    }
    let hit = gp.sweep(|point| {
        polys.iter().all(|f| {
            let field = &gp.fields[f.field_index];
            let vals = gp.embedded(f.field_index, point);
            !field.is_zero(&f.eval(field, &vals))
        })
    });
    hit.map(|indices| grid_point(gp, indices))
        .ok_or(GenPosError::ExhaustedGrid)
}

/// One field's slice of a rank combination problem: a base matrix, the
/// matrices to scale, and the target rank.
#[derive(Clone, Debug)]
pub struct RankEntry {
    pub base: Matrix,
    pub blocks: Vec<Matrix>,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct RankProblem {
    pub entries: Vec<RankEntry>,
    /// Transposed orientation: the blocks are stacked vertically instead of
    /// side by side (the statement for the transposes).
    pub transposed: bool,
}

fn check_shapes(rp: &RankProblem, gp: &GridProblem, sum_mode: bool) -> Result<(), GenPosError> {
    if rp.entries.len() != gp.fields.len() {
        return Err(GenPosError::ShapeMismatch(format!(
            "{} rank entries for {} fields",
            rp.entries.len(),
            gp.fields.len()
        )));
    }
    let t = gp.coords.len();
    for (i, entry) in rp.entries.iter().enumerate() {
        if entry.blocks.len() != t {
            return Err(GenPosError::ShapeMismatch(format!(
                "field {i}: {} blocks for {t} coordinates",
                entry.blocks.len()
            )));
        }
        let (rows, cols) = (entry.base.rows(), entry.base.cols());
        if sum_mode {
            for b in &entry.blocks {
                if (b.rows(), b.cols()) != (rows, cols) {
                    return Err(GenPosError::ShapeMismatch(format!(
                        "field {i}: summand shape differs from base"
                    )));
                }
            }
        } else if rp.transposed {
            let total: usize = entry.blocks.iter().map(Matrix::rows).sum();
            if total != rows || entry.blocks.iter().any(|b| b.cols() != cols) {
                return Err(GenPosError::ShapeMismatch(format!(
                    "field {i}: stacked block heights must sum to the base height"
                )));
            }
        } else {
            let total: usize = entry.blocks.iter().map(Matrix::cols).sum();
            if total != cols || entry.blocks.iter().any(|b| b.rows() != rows) {
                return Err(GenPosError::ShapeMismatch(format!(
                    "field {i}: block widths must sum to the base width"
                )));
            }
        }
    }
    Ok(())
}

fn combined_block(entry: &RankEntry, coeffs: &[El], transposed: bool) -> Matrix {
    let field = entry.base.field().clone();
    let scaled: Vec<Matrix> = entry
        .blocks
        .iter()
        .zip(coeffs)
        .map(|(b, c)| b.scale(c))
        .collect();
    let joined = if transposed {
        Matrix::vstack_all(&field, &scaled)
    } else {
        Matrix::hstack_all(&field, &scaled)
    };
    entry.base.add(&joined)
}

fn combined_sum(entry: &RankEntry, coeffs: &[El]) -> Matrix {
    let mut acc = entry.base.clone();
    for (b, c) in entry.blocks.iter().zip(coeffs) {
        acc = acc.add(&b.scale(c));
    }
    acc
}

/// Block-row combination: find coefficients making
/// `A_i + (c_1 B_{i1} | ... | c_t B_{it})` have rank at least `r_i` for
/// every field at once.
pub fn combine_block_rank(
    rp: &RankProblem,
    gp: &GridProblem,
) -> Result<CombineResult, GenPosError> {
    check_shapes(rp, gp, false)?;
    let t = gp.coords.len();
    for (i, entry) in rp.entries.iter().enumerate() {
        let field = entry.base.field().clone();
        let joined = if rp.transposed {
            Matrix::vstack_all(&field, &entry.blocks)
        } else {
            Matrix::hstack_all(&field, &entry.blocks)
        };
        if joined.rank() < entry.target {
            return Err(GenPosError::RankPrecondition(i));
        }
    }
    // When every coordinate satisfies the bound, the sweep is guaranteed to
    // succeed, and exhaustion is an internal contradiction. A smaller grid
    // may still succeed (the bound is worst-case over all base matrices), so
    // the sweep runs either way and only a failed undersized sweep is
    // reported as a precondition violation.
    let mut violated: Option<(usize, usize, usize)> = None;
    for (j, coord) in gp.coords.iter().enumerate() {
        let bound: usize = rp
            .entries
            .iter()
            .map(|e| {
                let width = if rp.transposed {
                    e.blocks[j].rows()
                } else {
                    e.blocks[j].cols()
                };
                e.target.min(width)
            })
            .sum();
        if coord.len() <= bound && violated.is_none() {
            violated = Some((j, coord.len(), bound));
        }
    }
    let _ = t;
    let hit = gp.sweep(|point| {
        rp.entries.iter().enumerate().all(|(i, entry)| {
            let coeffs = gp.embedded(i, point);
            combined_block(entry, &coeffs, rp.transposed).rank() >= entry.target
        })
    });
    let indices = hit.ok_or(match violated {
        Some((coord, have, bound)) => GenPosError::CardinalityPrecondition { coord, have, bound },
        None => GenPosError::ExhaustedGrid,
    })?;
    let achieved = rp
        .entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let coeffs = gp.embedded(i, &indices);
            combined_block(entry, &coeffs, rp.transposed).rank()
        })
        .collect();
    Ok(CombineResult {
        point: grid_point(gp, indices),
        achieved,
    })
}

/// Linear-combination variant: find coefficients making
/// `A_i + c_1 B_{i1} + ... + c_t B_{it}` have rank at least `r_i` for every
/// field at once.
pub fn combine_sum_rank(rp: &RankProblem, gp: &GridProblem) -> Result<CombineResult, GenPosError> {
    check_shapes(rp, gp, true)?;
    for (i, entry) in rp.entries.iter().enumerate() {
        if entry.target > 0 && !entry.blocks.iter().any(|b| b.rank() >= entry.target) {
            return Err(GenPosError::MissingFullRankBlock(i));
        }
    }
    let bound: usize = rp.entries.iter().map(|e| e.target).sum();
    let violated = gp
        .coords
        .iter()
        .enumerate()
        .find(|(_, coord)| coord.len() < 1 + bound)
        .map(|(j, coord)| (j, coord.len()));
    let hit = gp.sweep(|point| {
        rp.entries.iter().enumerate().all(|(i, entry)| {
            let coeffs = gp.embedded(i, point);
            combined_sum(entry, &coeffs).rank() >= entry.target
        })
    });
    let indices = hit.ok_or(match violated {
        Some((coord, have)) => GenPosError::CardinalityPrecondition { coord, have, bound },
        None => GenPosError::ExhaustedGrid,
    })?;
    let achieved = rp
        .entries
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            let coeffs = gp.embedded(i, &indices);
            combined_sum(entry, &coeffs).rank()
        })
        .collect();
    Ok(CombineResult {
        point: grid_point(gp, indices),
        achieved,
    })
}
