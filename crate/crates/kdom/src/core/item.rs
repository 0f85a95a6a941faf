use crate::{Error, Result};

/// One stream record: `d` attribute values (smaller is better), an occurrence
/// probability strictly inside (0,1), and a monotone arrival id.
///
/// The open probability interval is load-bearing: departures divide stored
/// products by `1 - prob`, which is singular at `prob == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainItem {
    pub id: u64,
    pub values: Vec<f64>,
    pub prob: f64,
}

impl UncertainItem {
    pub fn new(id: u64, values: Vec<f64>, prob: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid(format!("item {id}: empty value vector")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "item {id}: non-finite attribute value"
            )));
        }
        if !(prob > 0.0 && prob < 1.0) {
            return Err(Error::Invalid(format!(
                "item {id}: probability {prob} outside the open interval (0,1)"
            )));
        }
        Ok(Self { id, values, prob })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// One record per line: id, the d values, then the probability.
    /// `f64` formatting round-trips exactly.
    pub fn to_line(&self) -> String {
        let mut s = self.id.to_string();
        for v in &self.values {
            s.push(',');
            s.push_str(&v.to_string());
        }
        s.push(',');
        s.push_str(&self.prob.to_string());
        s
    }

    pub fn from_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() < 3 {
            return Err(Error::Parse(format!(
                "item line needs >= 3 fields: {line:?}"
            )));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad item id {:?}", fields[0])))?;
        let mut values = Vec::with_capacity(fields.len() - 2);
        for f in &fields[1..fields.len() - 1] {
            values.push(
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad attribute value {f:?}")))?,
            );
        }
        let prob: f64 = fields[fields.len() - 1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad probability {:?}", fields[fields.len() - 1])))?;
        Self::new(id, values, prob)
    }
}

/// Per-dimension (lo, hi) bounds for min-max scaling. Streaming data cannot
/// be rescaled retroactively, so the bounds are fixed up front and values
/// outside them clamp to [0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationSpec {
    bounds: Vec<(f64, f64)>,
}

impl NormalizationSpec {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::Config("normalization spec has no dimensions".into()));
        }
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "normalization bounds for dimension {j} must satisfy lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(Self { bounds })
    }

    /// Same (lo, hi) range on all `d` dimensions.
    pub fn uniform(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); d])
    }

    /// The (0,1) range: values already normalized pass through unchanged.
    pub fn unit(d: usize) -> Self {
        Self::uniform(d, 0.0, 1.0).expect("unit bounds are valid")
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn scale(&self, j: usize, x: f64) -> f64 {
        let (lo, hi) = self.bounds[j];
        ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// An item's normalized values sorted ascending. Index positions into this
/// vector define the pruning thresholds used by the indexing schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedProfile {
    pub item_id: u64,
    pub sorted_values: Vec<f64>,
}

/// Min-max scales each dimension to [0,1] per its bounds, then sorts
/// the result ascending.
pub fn normalize_and_sort(u: &UncertainItem, spec: &NormalizationSpec) -> SortedProfile {
    assert_eq!(
        u.dim(),
        spec.dim(),
        "normalization spec covers {} dimensions, item {} has {}",
        spec.dim(),
        u.id,
        u.dim()
    );
    let mut sorted_values: Vec<f64> = u
        .values
        .iter()
        .enumerate()
        .map(|(j, &x)| spec.scale(j, x))
        .collect();
    sorted_values.sort_by(|a, b| a.partial_cmp(b).expect("scaled values are finite"));
    SortedProfile {
        item_id: u.id,
        sorted_values,
    }
}
