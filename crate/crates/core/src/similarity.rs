//! Membrane-area distance between song paths and corpus-wide search.
//!
//! The distance between paths `f` and `g` is the Riemann sum
//! `sum_{n=0..N} |f(n/N) - g(n/N)| / N`, i.e. the area swept by straight
//! segments joining points at equal normalised time. It is computed with
//! the endpoint samples at both ends, so the weights total `(N + 1) / N`.

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Beats, Corpus};
use crate::embedding::CooccurrenceModel;
use crate::error::{Error, Result};
use crate::key::analyze_corpus;
use crate::path::{build_path, SongPath};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembraneParams {
    /// Number of intervals `N`; the sum has `N + 1` samples.
    pub samples: usize,
    /// Keep doubling `samples` until the relative change drops below
    /// `rel_tolerance` (or `max_samples` is reached).
    pub convergence_check: bool,
    pub rel_tolerance: f64,
    pub max_samples: usize,
    /// Duration given to the `<START>` and `<END>` tokens.
    #[serde(serialize_with = "serialize_beats")]
    pub boundary_beats: Beats,
    /// Divide by the mean of the two path lengths.
    pub normalize: bool,
}

fn serialize_beats<S: serde::Serializer>(b: &Beats, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&b.to_string())
}

impl Default for MembraneParams {
    fn default() -> Self {
        MembraneParams {
            samples: 1024,
            convergence_check: false,
            rel_tolerance: 1e-3,
            max_samples: 1 << 20,
            boundary_beats: Beats::from_integer(1),
            normalize: false,
        }
    }
}

impl MembraneParams {
    pub fn with_samples(samples: usize) -> Self {
        MembraneParams { samples, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidParameter(format!("samples must be >= 2, got {}", self.samples)));
        }
        if self.boundary_beats <= Beats::from_integer(0) {
            return Err(Error::InvalidParameter("boundary beats must be positive".into()));
        }
        if self.convergence_check && (self.rel_tolerance.is_nan() || self.rel_tolerance <= 0.0) {
            return Err(Error::InvalidParameter("relative tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// The Riemann sum at a fixed number of intervals.
pub fn membrane_sum(f: &SongPath, g: &SongPath, intervals: usize) -> f64 {
    let mut fs = Vec::with_capacity((intervals + 1) * f.dim());
    f.for_each_sample(intervals, |_, p| fs.extend_from_slice(p));
    let dim = f.dim();
    let mut total = 0.0;
    g.for_each_sample(intervals, |i, q| {
        let p = &fs[i * dim..(i + 1) * dim];
        let sq: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        total += sq.sqrt();
    });
    total / intervals as f64
}

fn check_compatible(f: &SongPath, g: &SongPath) -> Result<()> {
    if f.model_fingerprint() != g.model_fingerprint() || f.boundary_beats() != g.boundary_beats() || f.dim() != g.dim()
    {
        return Err(Error::ModelMismatch);
    }
    Ok(())
}

pub fn membrane_area(f: &SongPath, g: &SongPath, params: &MembraneParams) -> Result<f64> {
    params.validate()?;
    check_compatible(f, g)?;
    let mut n = params.samples;
    let mut area = membrane_sum(f, g, n);
    if params.convergence_check {
        while n * 2 <= params.max_samples {
            n *= 2;
            let refined = membrane_sum(f, g, n);
            let change = (refined - area).abs();
            area = refined;
            if change <= params.rel_tolerance * area.abs() {
                break;
            }
        }
    }
    if params.normalize {
        let mean = 0.5 * (f.length() + g.length());
        if mean > 0.0 {
            area /= mean;
        }
    }
    Ok(area)
}

/// Paths for every song of a corpus, in corpus order.
#[derive(Debug, Clone)]
pub struct PathIndex {
    ids: Vec<String>,
    titles: Vec<String>,
    paths: Vec<SongPath>,
}

impl PathIndex {
    pub fn build(corpus: &Corpus, model: &CooccurrenceModel, boundary_beats: Beats) -> Result<Self> {
        let paths = analyze_corpus(corpus)
            .par_iter()
            .map(|a| build_path(&a.transposed, model, boundary_beats))
            .collect::<Result<Vec<_>>>()?;
        Ok(PathIndex {
            ids: corpus.songs().iter().map(|s| s.id.clone()).collect(),
            titles: corpus.songs().iter().map(|s| s.title.clone()).collect(),
            paths,
        })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    fn position(&self, id: &str) -> Result<usize> {
        self.ids.iter().position(|s| s == id).ok_or_else(|| Error::UnknownSong(id.to_string()))
    }

    pub fn path(&self, id: &str) -> Result<&SongPath> {
        Ok(&self.paths[self.position(id)?])
    }

    pub fn title(&self, id: &str) -> Result<&str> {
        Ok(&self.titles[self.position(id)?])
    }

    pub fn distance(&self, a: &str, b: &str, params: &MembraneParams) -> Result<f64> {
        membrane_area(self.path(a)?, self.path(b)?, params)
    }

    /// Every other song ranked by distance to `query_id`, ties by id.
    pub fn nearest(&self, query_id: &str, params: &MembraneParams, k: usize) -> Result<SearchResult> {
        params.validate()?;
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        let q = self.position(query_id)?;
        let query = &self.paths[q];
        let mut ranked = (0..self.len())
            .into_par_iter()
            .filter(|&i| i != q)
            .map(|i| {
                Ok(Neighbour {
                    id: self.ids[i].clone(),
                    title: self.titles[i].clone(),
                    distance: membrane_area(query, &self.paths[i], params)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ranked.sort_by(|a, b| a.distance.total_cmp(&b.distance).then_with(|| a.id.cmp(&b.id)));
        ranked.truncate(k);
        Ok(SearchResult { query_id: query_id.to_string(), ranked, params: params.clone() })
    }

    pub fn pairwise(&self, params: &MembraneParams) -> Result<DistanceMatrix> {
        params.validate()?;
        let n = self.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let values = pairs
            .par_iter()
            .map(|&(i, j)| membrane_area(&self.paths[i], &self.paths[j], params))
            .collect::<Result<Vec<_>>>()?;
        let mut matrix = vec![0.0; n * n];
        for (&(i, j), v) in pairs.iter().zip(values) {
            matrix[i * n + j] = v;
            matrix[j * n + i] = v;
        }
        Ok(DistanceMatrix { ids: self.ids.clone(), values: matrix })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Neighbour {
    pub id: String,
    pub title: String,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub query_id: String,
    pub ranked: Vec<Neighbour>,
    pub params: MembraneParams,
}

/// Contrafact search: the `k` songs closest to `query_id`, excluding the
/// query itself.
pub fn nearest_songs(
    query_id: &str,
    corpus: &Corpus,
    model: &CooccurrenceModel,
    params: &MembraneParams,
    k: usize,
) -> Result<SearchResult> {
    if corpus.get(query_id).is_none() {
        return Err(Error::UnknownSong(query_id.to_string()));
    }
    PathIndex::build(corpus, model, params.boundary_beats)?.nearest(query_id, params, k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    /// Row-major, `ids.len()` squared.
    pub values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.ids.iter().position(|s| s == a)?;
        let j = self.ids.iter().position(|s| s == b)?;
        Some(self.at(i, j))
    }
}

pub fn pairwise_distances(
    corpus: &Corpus,
    model: &CooccurrenceModel,
    params: &MembraneParams,
) -> Result<DistanceMatrix> {
    PathIndex::build(corpus, model, params.boundary_beats)?.pairwise(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis_path(dim: usize, axis: usize, fp: u64) -> SongPath {
        let mut end = vec![0.0; dim];
        end[axis] = 1.0;
        SongPath::from_parts(vec![vec![0.0; dim], end], vec![Beats::from_integer(0), Beats::from_integer(1)], fp)
            .unwrap()
    }

    #[test]
    fn orthogonal_axes_closed_form() {
        let f = axis_path(63, 0, 0);
        let g = axis_path(63, 1, 0);
        // sum_{n=0..N} sqrt(2) n/N / N = sqrt(2)/2 * (N+1)/N
        for n in [2usize, 10, 1024] {
            let m = membrane_area(&f, &g, &MembraneParams::with_samples(n)).unwrap();
            let exact_sum = std::f64::consts::SQRT_2 / 2.0 * (n as f64 + 1.0) / n as f64;
            assert!((m - exact_sum).abs() < 1e-12, "N={n}: {m} vs {exact_sum}");
        }
    }

    #[test]
    fn identical_paths_are_zero() {
        let f = axis_path(3, 0, 0);
        assert_eq!(membrane_area(&f, &f, &MembraneParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_models_rejected() {
        let f = axis_path(3, 0, 1);
        let g = axis_path(3, 1, 2);
        assert!(matches!(membrane_area(&f, &g, &MembraneParams::default()), Err(Error::ModelMismatch)));
    }

    #[test]
    fn params_validation() {
        let f = axis_path(3, 0, 0);
        assert!(membrane_area(&f, &f, &MembraneParams::with_samples(1)).is_err());
        let p = MembraneParams { boundary_beats: Beats::from_integer(0), ..Default::default() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn convergence_loop_refines() {
        let f = axis_path(2, 0, 0);
        let g = axis_path(2, 1, 0);
        let p = MembraneParams { samples: 8, convergence_check: true, ..Default::default() };
        let m = membrane_area(&f, &g, &p).unwrap();
        let limit = std::f64::consts::SQRT_2 / 2.0;
        assert!((m - limit).abs() / limit < 2e-3);
        assert!((m - limit).abs() / limit > 1e-9);
    }

    #[test]
    fn normalization_divides_by_mean_length() {
        let f = axis_path(2, 0, 0);
        let g = axis_path(2, 1, 0);
        let raw = membrane_area(&f, &g, &MembraneParams::default()).unwrap();
        let p = MembraneParams { normalize: true, ..Default::default() };
        assert!((membrane_area(&f, &g, &p).unwrap() - raw).abs() < 1e-15);
    }
}
