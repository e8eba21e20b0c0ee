//! Two-class Gaussian data and pseudo-labelers.
//!
//! Features follow `X | Y ~ N(Y·m, σ² I_d)` with `m = mu_scale · mu_direction`
//! and `Y` uniform on `{-1, +1}`. Unlabeled draws keep their hidden labels in
//! a separate oracle-only field so learners cannot read them by accident.

mod csv_ingest;

pub use csv_ingest::{ingest_csv_dataset, LabelColumn};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// True class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Label {
    Negative = -1,
    Positive = 1,
}

impl Label {
    pub fn sign(self) -> f64 {
        self as i8 as f64
    }

    pub fn from_sign(x: f64) -> Label {
        if x >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

/// Pseudo-label; `Abstain` is only produced by the threshold labeler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum PseudoLabel {
    Negative = -1,
    Abstain = 0,
    Positive = 1,
}

impl PseudoLabel {
    pub fn sign(self) -> f64 {
        self as i8 as f64
    }
}

impl From<Label> for PseudoLabel {
    fn from(l: Label) -> Self {
        match l {
            Label::Negative => PseudoLabel::Negative,
            Label::Positive => PseudoLabel::Positive,
        }
    }
}

/// The two-class data law.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureSpec {
    pub mu_direction: DVector<f64>,
    pub mu_scale: f64,
    pub sigma: f64,
    pub dim: usize,
}

impl GaussianMixtureSpec {
    pub fn new(mu_direction: DVector<f64>, mu_scale: f64, sigma: f64) -> Result<Self> {
        let spec = GaussianMixtureSpec {
            dim: mu_direction.len(),
            mu_direction,
            mu_scale,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit-norm mean along the first axis, as in the mean-estimation example.
    pub fn unit_axis(dim: usize, sigma: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dim must be at least 1".into()));
        }
        let mut e1 = DVector::zeros(dim);
        e1[0] = 1.0;
        Self::new(e1, 1.0, sigma)
    }

    /// Class means `±mu · 1_d` with unit noise (the logistic example).
    pub fn ones_direction(dim: usize, mu: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("dim must be at least 1".into()));
        }
        let d = dim as f64;
        Self::new(
            DVector::from_element(dim, 1.0 / d.sqrt()),
            mu * d.sqrt(),
            1.0,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidSpec("dim must be at least 1".into()));
        }
        if self.mu_direction.len() != self.dim {
            return Err(Error::InvalidSpec(format!(
                "mu_direction has length {}, dim is {}",
                self.mu_direction.len(),
                self.dim
            )));
        }
        let norm = self.mu_direction.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "mu_direction must have unit norm, got {norm}"
            )));
        }
        if !(self.mu_scale.is_finite() && self.mu_scale >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "mu_scale must be finite and nonnegative, got {}",
                self.mu_scale
            )));
        }
        // σ = 0 is admitted: it is the noiseless limit used by several checks.
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "sigma must be finite and nonnegative, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// The class-`+1` mean vector.
    pub fn mean_vector(&self) -> DVector<f64> {
        &self.mu_direction * self.mu_scale
    }

    /// Draw one `(x, y)` pair into `out`.
    pub(crate) fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> Label {
        let label = if rng.random::<bool>() {
            Label::Positive
        } else {
            Label::Negative
        };
        let shift = label.sign() * self.mu_scale;
        for (o, m) in out.iter_mut().zip(self.mu_direction.iter()) {
            let g: f64 = rng.sample(StandardNormal);
            *o = shift * m + self.sigma * g;
        }
        label
    }

    fn draw_rows(&self, count: usize, stream: &RngStream) -> (DMatrix<f64>, Vec<Label>) {
        let mut rng = stream.rng();
        let mut features = DMatrix::zeros(count, self.dim);
        let mut labels = Vec::with_capacity(count);
        let mut row = vec![0.0; self.dim];
        for i in 0..count {
            labels.push(self.draw_into(&mut rng, &mut row));
            for (j, v) in row.iter().enumerate() {
                features[(i, j)] = *v;
            }
        }
        (features, labels)
    }
}

/// Labeled sample `S_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    features: DMatrix<f64>,
    labels: Vec<Label>,
}

impl LabeledSet {
    pub fn new(features: DMatrix<f64>, labels: Vec<Label>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: labels.len(),
                context: "label count vs feature rows",
            });
        }
        Ok(LabeledSet { features, labels })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Rows `y_i x_i`.
    pub fn signed_features(&self) -> DMatrix<f64> {
        let mut out = self.features.clone();
        for (mut row, y) in out.row_iter_mut().zip(&self.labels) {
            row *= y.sign();
        }
        out
    }
}

/// Pseudo-labeled sample `Ŝ_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabeledSet {
    features: DMatrix<f64>,
    pseudo_labels: Vec<PseudoLabel>,
}

impl PseudoLabeledSet {
    pub fn new(features: DMatrix<f64>, pseudo_labels: Vec<PseudoLabel>) -> Result<Self> {
        if features.nrows() != pseudo_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: pseudo_labels.len(),
                context: "pseudo-label count vs feature rows",
            });
        }
        Ok(PseudoLabeledSet {
            features,
            pseudo_labels,
        })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn pseudo_labels(&self) -> &[PseudoLabel] {
        &self.pseudo_labels
    }

    pub fn len(&self) -> usize {
        self.pseudo_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pseudo_labels.is_empty()
    }

    /// Rows `ŷ_j x_j` (zero rows for abstentions).
    pub fn signed_features(&self) -> DMatrix<f64> {
        let mut out = self.features.clone();
        for (mut row, y) in out.row_iter_mut().zip(&self.pseudo_labels) {
            row *= y.sign();
        }
        out
    }

    /// Keep only the first `m` points.
    pub fn truncated(&self, m: usize) -> PseudoLabeledSet {
        let m = m.min(self.len());
        PseudoLabeledSet {
            features: self.features.rows(0, m).into_owned(),
            pseudo_labels: self.pseudo_labels[..m].to_vec(),
        }
    }
}

/// Unlabeled features plus the labels that generated them.
///
/// Learners only see [`UnlabeledSet::features`]; the hidden labels are
/// reachable through [`UnlabeledSet::oracle_labels`] for evaluation code.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledSet {
    features: DMatrix<f64>,
    hidden_labels: Vec<Label>,
}

impl UnlabeledSet {
    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn oracle_labels(&self) -> &[Label] {
        &self.hidden_labels
    }

    pub fn len(&self) -> usize {
        self.hidden_labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hidden_labels.is_empty()
    }

    pub fn into_parts(self) -> (DMatrix<f64>, Vec<Label>) {
        (self.features, self.hidden_labels)
    }
}

pub fn sample_labeled(
    spec: &GaussianMixtureSpec,
    n: usize,
    stream: &RngStream,
) -> Result<LabeledSet> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::invalid(
            "n",
            "labeled sample size must be at least 1",
        ));
    }
    let (features, labels) = spec.draw_rows(n, stream);
    LabeledSet::new(features, labels)
}

pub fn sample_unlabeled(
    spec: &GaussianMixtureSpec,
    m: usize,
    stream: &RngStream,
) -> Result<UnlabeledSet> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::invalid(
            "m",
            "unlabeled sample size must be at least 1",
        ));
    }
    let (features, hidden_labels) = spec.draw_rows(m, stream);
    Ok(UnlabeledSet {
        features,
        hidden_labels,
    })
}

fn check_w0(w0: &DVector<f64>, features: &DMatrix<f64>) -> Result<()> {
    if w0.len() != features.ncols() {
        return Err(Error::DimensionMismatch {
            expected: features.ncols(),
            found: w0.len(),
            context: "w0 length vs feature dimension",
        });
    }
    if w0.iter().all(|v| *v == 0.0) {
        return Err(Error::invalid(
            "w0",
            "the labeling direction must be nonzero",
        ));
    }
    Ok(())
}

/// `sign(w0ᵀx)` with `sign(0) = +1`.
pub fn sign_label(score: f64) -> PseudoLabel {
    if score >= 0.0 {
        PseudoLabel::Positive
    } else {
        PseudoLabel::Negative
    }
}

/// `sign(w0ᵀx) · 1{|w0ᵀx| ≥ T}`.
pub fn threshold_label(score: f64, threshold: f64) -> PseudoLabel {
    if score.abs() >= threshold {
        sign_label(score)
    } else {
        PseudoLabel::Abstain
    }
}

fn scores(w0: &DVector<f64>, features: &DMatrix<f64>) -> DVector<f64> {
    features * w0
}

pub fn pseudo_label_sign(w0: &DVector<f64>, features: &DMatrix<f64>) -> Result<PseudoLabeledSet> {
    check_w0(w0, features)?;
    let labels = scores(w0, features)
        .iter()
        .map(|s| sign_label(*s))
        .collect();
    PseudoLabeledSet::new(features.clone(), labels)
}

pub fn pseudo_label_threshold(
    w0: &DVector<f64>,
    features: &DMatrix<f64>,
    threshold: f64,
) -> Result<PseudoLabeledSet> {
    check_w0(w0, features)?;
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::invalid(
            "threshold",
            format!("must be nonnegative, got {threshold}"),
        ));
    }
    let labels = scores(w0, features)
        .iter()
        .map(|s| threshold_label(*s, threshold))
        .collect();
    PseudoLabeledSet::new(features.clone(), labels)
}

/// Pseudo-labeling rule applied to one feature vector given `W₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Labeler {
    /// `sign(W₀ᵀx)`.
    Sign,
    /// `sign(W₀ᵀx)·1{|W₀ᵀx| ≥ T}`.
    Threshold(f64),
    /// A fair coin independent of everything else; pseudo-labels that carry
    /// no information about `S_l`.
    IndependentCoin,
}

impl Labeler {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Labeler::Threshold(t) if t.is_nan() || t < 0.0 => Err(Error::invalid(
                "threshold",
                format!("must be nonnegative, got {t}"),
            )),
            _ => Ok(()),
        }
    }

    pub(crate) fn label<R: Rng + ?Sized>(&self, score: f64, rng: &mut R) -> PseudoLabel {
        match *self {
            Labeler::Sign => sign_label(score),
            Labeler::Threshold(t) => threshold_label(score, t),
            Labeler::IndependentCoin => {
                if rng.random::<bool>() {
                    PseudoLabel::Positive
                } else {
                    PseudoLabel::Negative
                }
            }
        }
    }

    /// Label every row of `features`.
    pub fn apply(
        &self,
        w0: &DVector<f64>,
        features: &DMatrix<f64>,
        stream: &RngStream,
    ) -> Result<PseudoLabeledSet> {
        self.validate()?;
        match *self {
            Labeler::Sign => pseudo_label_sign(w0, features),
            Labeler::Threshold(t) => pseudo_label_threshold(w0, features, t),
            Labeler::IndependentCoin => {
                let mut rng = stream.rng();
                let labels = (0..features.nrows())
                    .map(|_| self.label(0.0, &mut rng))
                    .collect();
                PseudoLabeledSet::new(features.clone(), labels)
            }
        }
    }
}
