//! Two-dimensional PCA projection of selected word vectors.

use nalgebra::DMatrix;

use super::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPoint {
    pub word: String,
    pub x: f64,
    pub y: f64,
}

/// Principal axes (as rows of length `dim`) of mean-centered rows, at most two.
/// Each axis is oriented so its first non-negligible loading is positive.
pub fn principal_axes(centered: &DMatrix<f64>) -> Vec<Vec<f64>> {
    if centered.nrows() == 0 || centered.ncols() == 0 {
        return Vec::new();
    }
    let svd = centered.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(2)
        .map(|k| {
            let mut axis: Vec<f64> = v_t.row(k).iter().copied().collect();
            if let Some(first) = axis.iter().copied().find(|x| x.abs() > 1e-12) {
                if first < 0.0 {
                    axis.iter_mut().for_each(|x| *x = -*x);
                }
            }
            axis
        })
        .collect()
}

/// Projects the input vectors of `words` onto their top two principal
/// components. Missing components (fewer than two points or dimensions)
/// project to 0.
pub fn project_2d(emb: &EmbeddingMatrix, words: &[String]) -> Result<Vec<ProjectedPoint>> {
    let rows: Vec<&[f32]> = words.iter().map(|w| emb.lookup(w)).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let dim = emb.dim();
    let mut data = DMatrix::<f64>::from_fn(rows.len(), dim, |i, j| rows[i][j] as f64);
    let means: Vec<f64> = (0..dim).map(|j| data.column(j).mean()).collect();
    for (j, m) in means.iter().enumerate() {
        data.column_mut(j).add_scalar_mut(-m);
    }
    let axes = principal_axes(&data);
    if axes.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("PCA did not converge".into()));
    }
    let coord = |i: usize, k: usize| -> f64 {
        axes.get(k)
            .map(|a| data.row(i).iter().zip(a).map(|(x, l)| x * l).sum())
            .unwrap_or(0.0)
    };
    Ok(words
        .iter()
        .enumerate()
        .map(|(i, w)| ProjectedPoint {
            word: w.clone(),
            x: coord(i, 0),
            y: coord(i, 1),
        })
        .collect())
}
