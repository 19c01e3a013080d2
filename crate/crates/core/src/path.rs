//! Songs as piecewise-linear paths through the embedding space.
//!
//! Starting at the origin, each token (`<START>`, the song's classes,
//! `<END>`) adds its embedding scaled by its duration in beats. The path is
//! parameterised by normalised beats: `t = 0` is the origin and `t = 1`
//! the final vertex. The boundary tokens have no duration of their own and
//! get `boundary_beats` each.

use num_rational::Ratio;

use crate::classes::{ChordClass, ChordClassSequence};
use crate::corpus::Beats;
use crate::embedding::CooccurrenceModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SongPath {
    dim: usize,
    /// Row-major, `knots.len()` rows of `dim` coordinates.
    vertices: Vec<f64>,
    knots: Vec<Beats>,
    knot_values: Vec<f64>,
    total_beats: Beats,
    boundary_beats: Beats,
    model_fingerprint: u64,
}

impl SongPath {
    /// Builds a path from explicit vertices and knots. The first vertex
    /// must be the origin and knots must rise strictly from 0 to 1.
    pub fn from_parts(vertices: Vec<Vec<f64>>, knots: Vec<Beats>, model_fingerprint: u64) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(msg.to_string());
        if vertices.len() < 2 || vertices.len() != knots.len() {
            return Err(bad("path needs at least two vertices, one per knot"));
        }
        let dim = vertices[0].len();
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(bad("vertices have mixed dimensions"));
        }
        if vertices[0].iter().any(|&x| x != 0.0) {
            return Err(bad("path must start at the origin"));
        }
        if knots[0] != Ratio::from_integer(0) || *knots.last().unwrap() != Ratio::from_integer(1) {
            return Err(bad("knots must run from 0 to 1"));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("knots must be strictly increasing"));
        }
        Ok(SongPath {
            dim,
            vertices: vertices.into_iter().flatten().collect(),
            knot_values: knots.iter().map(ratio_to_f64).collect(),
            knots,
            total_beats: Beats::from_integer(1),
            boundary_beats: Beats::from_integer(0),
            model_fingerprint,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.knots.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn knots(&self) -> &[Beats] {
        &self.knots
    }

    /// Song duration plus the two boundary durations.
    pub fn total_beats(&self) -> Beats {
        self.total_beats
    }

    pub fn boundary_beats(&self) -> Beats {
        self.boundary_beats
    }

    pub fn model_fingerprint(&self) -> u64 {
        self.model_fingerprint
    }

    /// Euclidean length of segment `i` (between vertices `i` and `i + 1`).
    pub fn segment_length(&self, i: usize) -> f64 {
        let a = self.vertex(i);
        let b = self.vertex(i + 1);
        a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum::<f64>().sqrt()
    }

    pub fn length(&self) -> f64 {
        (0..self.vertex_count() - 1).map(|i| self.segment_length(i)).sum()
    }

    /// Index of the segment containing `t`: the last knot `<= t`, capped at
    /// the final segment.
    fn segment_at(&self, t: f64) -> usize {
        let upper = self.knot_values.partition_point(|&k| k <= t);
        upper.saturating_sub(1).min(self.knots.len() - 2)
    }

    fn interpolate_into(&self, seg: usize, t: f64, out: &mut [f64]) {
        let t0 = self.knot_values[seg];
        let t1 = self.knot_values[seg + 1];
        let u = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let a = self.vertex(seg);
        let b = self.vertex(seg + 1);
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = (1.0 - u) * x + u * y;
        }
    }

    /// Position at normalised beat `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange(t));
        }
        let mut out = vec![0.0; self.dim];
        self.interpolate_into(self.segment_at(t), t, &mut out);
        Ok(out)
    }

    /// Evaluates at `t = i / n` for `i = 0..=n` in one forward sweep,
    /// calling `visit(i, point)` for each sample. Matches [`SongPath::eval`]
    /// bit for bit.
    pub fn for_each_sample(&self, n: usize, mut visit: impl FnMut(usize, &[f64])) {
        let mut buf = vec![0.0; self.dim];
        let mut seg = 0;
        let last_seg = self.knots.len() - 2;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            while seg < last_seg && self.knot_values[seg + 1] <= t {
                seg += 1;
            }
            self.interpolate_into(seg, t, &mut buf);
            visit(i, &buf);
        }
    }
}

fn ratio_to_f64(r: &Beats) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Lays a reduced, transposed sequence out as a path using the model's
/// unit embeddings.
pub fn build_path(seq: &ChordClassSequence, model: &CooccurrenceModel, boundary_beats: Beats) -> Result<SongPath> {
    if seq.is_empty() {
        return Err(Error::InvalidParameter(format!("song `{}` has no chords", seq.song_id)));
    }
    if boundary_beats <= Beats::from_integer(0) {
        return Err(Error::InvalidParameter("boundary beats must be positive".into()));
    }
    let tokens: Vec<(ChordClass, Beats)> = std::iter::once((ChordClass::Start, boundary_beats))
        .chain(seq.iter())
        .chain(std::iter::once((ChordClass::End, boundary_beats)))
        .collect();
    let total: Beats = tokens.iter().map(|t| t.1).sum();
    if total == Beats::from_integer(0) {
        return Err(Error::ZeroLengthPath);
    }

    let dim = crate::classes::CLASS_COUNT;
    let mut vertices = vec![0.0; (tokens.len() + 1) * dim];
    let mut knots = Vec::with_capacity(tokens.len() + 1);
    knots.push(Beats::from_integer(0));
    let mut elapsed = Beats::from_integer(0);
    for (m, (class, beats)) in tokens.iter().enumerate() {
        let scale = ratio_to_f64(beats);
        let emb = model.embedding(*class);
        let (done, rest) = vertices.split_at_mut((m + 1) * dim);
        let prev = &done[m * dim..];
        for ((v, p), e) in rest[..dim].iter_mut().zip(prev).zip(emb) {
            *v = p + scale * e;
        }
        elapsed += *beats;
        knots.push(elapsed / total);
    }
    Ok(SongPath {
        dim,
        vertices,
        knot_values: knots.iter().map(ratio_to_f64).collect(),
        knots,
        total_beats: total,
        boundary_beats,
        model_fingerprint: model.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord_syntax::PitchClass;
    use crate::classes::ChordType;
    use crate::embedding::build_model_from_sequences;

    fn one_chord_model() -> (CooccurrenceModel, ChordClass) {
        let x = ChordClass::pitched(ChordType::Major7, PitchClass::new(0));
        let seq = ChordClassSequence::new("s", vec![x], vec![Beats::from_integer(4)]);
        (build_model_from_sequences(&[seq], 0).unwrap(), x)
    }

    #[test]
    fn segments_and_knots() {
        let (model, x) = one_chord_model();
        let seq = ChordClassSequence::new("s", vec![x], vec![Beats::from_integer(4)]);
        let path = build_path(&seq, &model, Beats::from_integer(1)).unwrap();
        assert_eq!(path.vertex_count(), 4);
        assert_eq!(path.knots(), &[Beats::from_integer(0), Beats::new(1, 6), Beats::new(5, 6), Beats::from_integer(1)]);
        assert!((path.segment_length(0) - 1.0).abs() < 1e-12);
        assert!((path.segment_length(1) - 4.0).abs() < 1e-12);
        assert!((path.segment_length(2) - 1.0).abs() < 1e-12);
        assert_eq!(path.total_beats(), Beats::from_integer(6));
    }

    #[test]
    fn zero_row_token_stalls() {
        let (model, _) = one_chord_model();
        let seq = ChordClassSequence::new("s", vec![ChordClass::NoChord], vec![Beats::from_integer(2)]);
        let path = build_path(&seq, &model, Beats::from_integer(1)).unwrap();
        assert_eq!(path.segment_length(1), 0.0);
    }

    #[test]
    fn eval_endpoints_and_knots() {
        let (model, x) = one_chord_model();
        let seq = ChordClassSequence::new("s", vec![x, x], vec![Beats::from_integer(3), Beats::new(1, 2)]);
        let path = build_path(&seq, &model, Beats::from_integer(1)).unwrap();
        assert!(path.eval(0.0).unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(path.eval(1.0).unwrap(), path.vertex(path.vertex_count() - 1));
        for (i, k) in path.knots().iter().enumerate() {
            let t = ratio_to_f64(k);
            assert_eq!(path.eval(t).unwrap(), path.vertex(i), "knot {i}");
        }
        assert!(matches!(path.eval(1.5), Err(Error::ParameterOutOfRange(_))));
        assert!(matches!(path.eval(-0.1), Err(Error::ParameterOutOfRange(_))));
    }

    #[test]
    fn sweep_matches_eval() {
        let (model, x) = one_chord_model();
        let seq = ChordClassSequence::new(
            "s",
            vec![x, ChordClass::NoChord, x],
            vec![Beats::from_integer(3), Beats::new(1, 3), Beats::from_integer(5)],
        );
        let path = build_path(&seq, &model, Beats::from_integer(1)).unwrap();
        path.for_each_sample(37, |i, p| {
            assert_eq!(p, path.eval(i as f64 / 37.0).unwrap().as_slice(), "sample {i}");
        });
    }

    #[test]
    fn from_parts_validation() {
        let o = vec![0.0, 0.0];
        let e1 = vec![1.0, 0.0];
        let k = |v: &[u64]| v.iter().map(|&x| Beats::new(x, 2)).collect::<Vec<_>>();
        assert!(SongPath::from_parts(vec![o.clone(), e1.clone()], k(&[0, 2]), 0).is_ok());
        assert!(SongPath::from_parts(vec![e1.clone(), o.clone()], k(&[0, 2]), 0).is_err());
        assert!(SongPath::from_parts(vec![o.clone(), e1.clone()], k(&[0, 1]), 0).is_err());
        assert!(SongPath::from_parts(vec![o.clone(), e1.clone(), e1.clone()], k(&[0, 1, 1]), 0).is_err());
        assert!(SongPath::from_parts(vec![o, vec![1.0]], k(&[0, 2]), 0).is_err());
    }

    #[test]
    fn boundary_must_be_positive() {
        let (model, x) = one_chord_model();
        let seq = ChordClassSequence::new("s", vec![x], vec![Beats::from_integer(4)]);
        assert!(build_path(&seq, &model, Beats::from_integer(0)).is_err());
    }
}
