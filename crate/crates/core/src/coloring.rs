//! Colorings of an integer interval `{1..=n_max}` and subset-sum witnesses.
//!
//! A [`GroundColoring`] splits `{1..=n_max}` into `t` classes labelled
//! `1..=t`. A [`SumsetWitness`] is a sequence `a_1..a_n` together with a
//! class label `ell`; it certifies a coloring when every sum over a nonempty
//! subset of its entries lands inside class `ell`.

use crate::bits::SumBits;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// 1-based class label.
pub type ClassId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("class count must be at least 1")]
    NoClasses,
    #[error("coloring must assign at least one integer")]
    Empty,
    #[error("class label {label} at position {pos} outside 1..={t}")]
    LabelOutOfRange { pos: u64, label: ClassId, t: u32 },
    #[error("declared n_max {n_max} does not match {len} labels")]
    LengthMismatch { n_max: u64, len: usize },
    #[error("scale factor must be at least 1")]
    ZeroScale,
    #[error("scale factor {k} exceeds ground set size {n_max}")]
    ScaleTooLarge { k: u64, n_max: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness sequence must be nonempty")]
    Empty,
    #[error("witness entries must be positive")]
    ZeroEntry,
    #[error("witness class label must be at least 1")]
    ZeroClass,
    #[error("scale factor must be at least 1")]
    ZeroScale,
    #[error("scaled entry overflows")]
    Overflow,
    #[error("expected length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("sequence is not a witness for the coloring")]
    NotAWitness,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("malformed entry: {0}")]
    BadEntry(String),
    #[error("expected {expected} entries, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    t: u32,
    n_max: u64,
    assign: Vec<ClassId>,
}

/// A `t`-class coloring of `{1..=n_max}`; `assign[i - 1]` is the class of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ColoringRepr", into = "ColoringRepr")]
pub struct GroundColoring {
    t: u32,
    assign: Vec<ClassId>,
}

impl GroundColoring {
    pub fn new(t: u32, assign: Vec<ClassId>) -> Result<Self, ColoringError> {
        if t == 0 {
            return Err(ColoringError::NoClasses);
        }
        if assign.is_empty() {
            return Err(ColoringError::Empty);
        }
        for (i, &label) in assign.iter().enumerate() {
            if label == 0 || label > t {
                return Err(ColoringError::LabelOutOfRange {
                    pos: i as u64 + 1,
                    label,
                    t,
                });
            }
        }
        Ok(GroundColoring { t, assign })
    }

    /// Coloring assigning a single class to everything.
    pub fn constant(n_max: u64, t: u32, class: ClassId) -> Result<Self, ColoringError> {
        GroundColoring::new(t, vec![class; n_max as usize])
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n_max(&self) -> u64 {
        self.assign.len() as u64
    }

    pub fn assign(&self) -> &[ClassId] {
        &self.assign
    }

    /// Class of `x`, or `None` outside `1..=n_max`.
    pub fn class_of(&self, x: u64) -> Option<ClassId> {
        if x == 0 || x > self.n_max() {
            None
        } else {
            Some(self.assign[x as usize - 1])
        }
    }

    /// Text form: header `t N`, then the `N` class labels.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.assign.iter().map(|c| c.to_string()).collect();
        format!("{} {}\n{}\n", self.t, self.n_max(), labels.join(" "))
    }

    pub fn from_text(s: &str) -> Result<Self, FormatError> {
        let mut tokens = s.split_whitespace();
        let t: u32 = parse_token(&mut tokens, "t")?;
        let n_max: u64 = parse_token(&mut tokens, "N")?;
        let assign: Vec<ClassId> = tokens
            .map(|tok| {
                tok.parse::<ClassId>()
                    .map_err(|_| FormatError::BadEntry(tok.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if assign.len() as u64 != n_max {
            return Err(FormatError::WrongCount {
                expected: n_max as usize,
                found: assign.len(),
            });
        }
        Ok(GroundColoring::new(t, assign)?)
    }
}

impl TryFrom<ColoringRepr> for GroundColoring {
    type Error = ColoringError;

    fn try_from(repr: ColoringRepr) -> Result<Self, ColoringError> {
        if repr.n_max != repr.assign.len() as u64 {
            return Err(ColoringError::LengthMismatch {
                n_max: repr.n_max,
                len: repr.assign.len(),
            });
        }
        GroundColoring::new(repr.t, repr.assign)
    }
}

impl From<GroundColoring> for ColoringRepr {
    fn from(gc: GroundColoring) -> ColoringRepr {
        ColoringRepr {
            t: gc.t,
            n_max: gc.n_max(),
            assign: gc.assign,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessRepr {
    ell: ClassId,
    a: Vec<u64>,
}

/// A witness sequence `a_1..a_n` and its class label `ell`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WitnessRepr", into = "WitnessRepr")]
pub struct SumsetWitness {
    a: Vec<u64>,
    ell: ClassId,
}

impl SumsetWitness {
    pub fn new(a: Vec<u64>, ell: ClassId) -> Result<Self, WitnessError> {
        if a.is_empty() {
            return Err(WitnessError::Empty);
        }
        if a.contains(&0) {
            return Err(WitnessError::ZeroEntry);
        }
        if ell == 0 {
            return Err(WitnessError::ZeroClass);
        }
        Ok(SumsetWitness { a, ell })
    }

    pub fn entries(&self) -> &[u64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn class(&self) -> ClassId {
        self.ell
    }

    /// Text form: header `ell n`, then the `n` entries.
    pub fn to_text(&self) -> String {
        let entries: Vec<String> = self.a.iter().map(|e| e.to_string()).collect();
        format!("{} {}\n{}\n", self.ell, self.a.len(), entries.join(" "))
    }

    pub fn from_text(s: &str) -> Result<Self, FormatError> {
        let mut tokens = s.split_whitespace();
        let ell: ClassId = parse_token(&mut tokens, "ell")?;
        let n: usize = parse_token(&mut tokens, "n")?;
        let a: Vec<u64> = tokens
            .map(|tok| {
                tok.parse::<u64>()
                    .map_err(|_| FormatError::BadEntry(tok.to_string()))
            })
            .collect::<Result<_, _>>()?;
        if a.len() != n {
            return Err(FormatError::WrongCount {
                expected: n,
                found: a.len(),
            });
        }
        Ok(SumsetWitness::new(a, ell)?)
    }
}

impl TryFrom<WitnessRepr> for SumsetWitness {
    type Error = WitnessError;

    fn try_from(repr: WitnessRepr) -> Result<Self, WitnessError> {
        SumsetWitness::new(repr.a, repr.ell)
    }
}

impl From<SumsetWitness> for WitnessRepr {
    fn from(w: SumsetWitness) -> WitnessRepr {
        WitnessRepr { ell: w.ell, a: w.a }
    }
}

fn parse_token<T: std::str::FromStr>(
    tokens: &mut std::str::SplitWhitespace<'_>,
    name: &str,
) -> Result<T, FormatError> {
    let tok = tokens.next().ok_or(FormatError::MissingHeader)?;
    tok.parse::<T>()
        .map_err(|_| FormatError::BadHeader(format!("{name}: {tok}")))
}

/// True when every sum over a nonempty subset of the witness entries lies in
/// `{1..=n_max}` and carries the witness class. Out-of-range sums make the
/// answer `false`, never an error.
pub fn verify_witness(gc: &GroundColoring, w: &SumsetWitness) -> bool {
    let mut sums = SumBits::new(gc.n_max() as usize);
    for &entry in w.entries() {
        if !sums.try_add_entry(entry, |s| gc.class_of(s) == Some(w.class())) {
            return false;
        }
    }
    true
}

/// Turns a verified witness of length `n^4` into a verified witness of length
/// `n` with pairwise distinct entries. Either `n` distinct values already
/// occur (a subsequence of a witness is a witness), or some value `k` occurs
/// at least `n^2` times and the arithmetic progression `k, 2k, .., nk` works:
/// each of its subset sums is `l*k` with `l <= n(n+1)/2 <= n^2`, realizable
/// as a sum of `l` copies of `k`.
pub fn distinctify(
    gc: &GroundColoring,
    w: &SumsetWitness,
    n: usize,
) -> Result<SumsetWitness, WitnessError> {
    assert!(n >= 1, "target length must be positive");
    let expected = n.pow(4);
    if w.len() != expected {
        return Err(WitnessError::WrongLength {
            expected,
            got: w.len(),
        });
    }
    if !verify_witness(gc, w) {
        return Err(WitnessError::NotAWitness);
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &e in w.entries() {
        *counts.entry(e).or_insert(0) += 1;
    }
    let out = if counts.len() >= n {
        let picked: Vec<u64> = counts.keys().copied().take(n).collect();
        SumsetWitness::new(picked, w.class()).expect("picked entries are valid")
    } else {
        let threshold = n * n;
        let (&k, _) = counts
            .iter()
            .find(|(_, &c)| c >= threshold)
            .expect("pigeonhole: fewer than n values among n^4 entries");
        let prog: Vec<u64> = (1..=n as u64).map(|i| i * k).collect();
        SumsetWitness::new(prog, w.class()).expect("progression entries are valid")
    };
    debug_assert!(verify_witness(gc, &out));
    Ok(out)
}

/// Coloring of `{1..=floor(n_max/k)}` that assigns to `a` the class of `k*a`.
pub fn quotient_coloring(gc: &GroundColoring, k: u64) -> Result<GroundColoring, ColoringError> {
    if k == 0 {
        return Err(ColoringError::ZeroScale);
    }
    if k > gc.n_max() {
        return Err(ColoringError::ScaleTooLarge {
            k,
            n_max: gc.n_max(),
        });
    }
    let m = gc.n_max() / k;
    let assign = (1..=m)
        .map(|a| gc.class_of(k * a).expect("k*a stays in range"))
        .collect();
    GroundColoring::new(gc.t(), assign)
}

/// Multiplies every witness entry by `k`, keeping the class label. A witness
/// for `quotient_coloring(gc, k)` scales to a witness for `gc`.
pub fn scale_witness(w: &SumsetWitness, k: u64) -> Result<SumsetWitness, WitnessError> {
    if k == 0 {
        return Err(WitnessError::ZeroScale);
    }
    let a = w
        .entries()
        .iter()
        .map(|&e| e.checked_mul(k).ok_or(WitnessError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    SumsetWitness::new(a, w.class())
}
