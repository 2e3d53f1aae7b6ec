//! Two-copy projector operators.
//!
//! A concurrence is specified by nonnegative weights on sign strings
//! `s in {+,-}^N`; the operator is `A = sum_s p_s (x)_i P_{s_i}` acting on
//! `x_i (H_i x H_i)`, where `P_+`/`P_-` project onto the symmetric and
//! antisymmetric subspaces of the two copies of subsystem `i`.
//!
//! Strings with an odd number of minus signs are antisymmetric under the
//! global exchange of the copies, so they contribute nothing on `|psi>|psi>`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::tensor::{CMatrix, CVector, SystemShape};

/// Upper bound on `D^2` for the dense operator oracle.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignString(Vec<Sign>);

impl SignString {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn minus_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Sign::Minus).count()
    }

    pub fn is_even(&self) -> bool {
        self.minus_count() % 2 == 0
    }

    /// All `2^n` strings, enumerated with bit `i` of the counter selecting
    /// a minus at position `i`.
    pub fn all(n: usize) -> impl Iterator<Item = SignString> {
        (0u64..1 << n).map(move |mask| {
            SignString(
                (0..n)
                    .map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                    .collect(),
            )
        })
    }
}

impl fmt::Display for SignString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::Validation(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignString)
    }
}

/// Issues found while validating a specification.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecWarning {
    /// The string contributes exactly zero to every pure-state value.
    OddMinus(SignString),
}

impl fmt::Display for SpecWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecWarning::OddMinus(s) => write!(f, "odd-minus string {s} contributes zero"),
        }
    }
}

/// Weights defining the operator `A`; build one with [`validate_spec`] or
/// [`named_spec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceSpec {
    shape: SystemShape,
    weights: BTreeMap<SignString, f64>,
    allow_odd: bool,
}

impl ConcurrenceSpec {
    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    /// Support of the specification (strings with positive weight).
    pub fn weights(&self) -> &BTreeMap<SignString, f64> {
        &self.weights
    }

    /// Support strings with an even number of minus signs.
    pub fn even_terms(&self) -> impl Iterator<Item = (&SignString, f64)> {
        self.weights
            .iter()
            .filter(|(s, _)| s.is_even())
            .map(|(s, &p)| (s, p))
    }

    pub fn allows_odd(&self) -> bool {
        self.allow_odd
    }

    pub fn warnings(&self) -> Vec<SpecWarning> {
        self.weights
            .keys()
            .filter(|s| !s.is_even())
            .map(|s| SpecWarning::OddMinus(s.clone()))
            .collect()
    }

    /// Same weights on a different shape of equal arity.
    pub fn with_shape(&self, shape: SystemShape) -> Result<Self> {
        if shape.arity() != self.shape.arity() {
            bail!(Shape, "spec has arity {}, shape has {}", self.shape.arity(), shape.arity());
        }
        Ok(Self { shape, ..self.clone() })
    }
}

/// Checks raw weights and builds a specification.
///
/// Negative weights and an empty support are errors. Weight normalization
/// is not enforced. Odd-minus strings are rejected unless `allow_odd` is
/// set, in which case they are kept and reported as warnings.
pub fn validate_spec(
    shape: SystemShape,
    weights: impl IntoIterator<Item = (SignString, f64)>,
    allow_odd: bool,
) -> Result<(ConcurrenceSpec, Vec<SpecWarning>)> {
    let mut support = BTreeMap::new();
    for (s, p) in weights {
        if s.len() != shape.arity() {
            bail!(Validation, "sign string {s} has length {}, system has {} parties", s.len(), shape.arity());
        }
        if !p.is_finite() || p < 0.0 {
            bail!(Validation, "weight {p} for {s} is negative or not finite");
        }
        if p > 0.0 {
            *support.entry(s).or_insert(0.0) += p;
        }
    }
    if support.is_empty() {
        bail!(Validation, "specification has no positive weight");
    }
    let spec = ConcurrenceSpec { shape, weights: support, allow_odd };
    let warnings = spec.warnings();
    if !allow_odd && !warnings.is_empty() {
        let names: Vec<String> = warnings.iter().map(|w| w.to_string()).collect();
        bail!(Validation, "{} (set allow_odd to keep such strings)", names.join("; "));
    }
    Ok((spec, warnings))
}

/// JSON form `{"dims": [...], "weights": {"+--": 4.0, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub dims: Vec<usize>,
    pub weights: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_odd: bool,
}

impl SpecFile {
    pub fn from_spec(spec: &ConcurrenceSpec) -> Self {
        Self {
            dims: spec.shape.dims().to_vec(),
            weights: spec.weights.iter().map(|(s, &p)| (s.to_string(), p)).collect(),
            allow_odd: spec.allow_odd,
        }
    }

    pub fn into_spec(self) -> Result<(ConcurrenceSpec, Vec<SpecWarning>)> {
        let shape = SystemShape::new(self.dims)?;
        let weights = self
            .weights
            .into_iter()
            .map(|(s, p)| Ok((s.parse::<SignString>()?, p)))
            .collect::<Result<Vec<_>>>()?;
        validate_spec(shape, weights, self.allow_odd)
    }
}

/// Named concurrences; party indices are 1-based as in the usual
/// notation (`c4_12` has `+` on parties 1 and 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConcurrence {
    /// `4 P- x P-` on two parties.
    Bipartite,
    /// `4 P+ x P- x P-` with the `+` at party `k`.
    C3k(usize),
    /// Weight 4 on `+--`, `-+-`, `--+`.
    C3,
    /// Weight 16, `+` at parties `i` and `j`, `-` elsewhere.
    C4ij(usize, usize),
    /// `16 P- x P- x P- x P-`.
    C4,
    /// Weight 4 on every even-minus string except all-plus.
    CN,
}

impl NamedConcurrence {
    /// Every named concurrence for an arity, in fingerprint order.
    pub fn family(arity: usize) -> Vec<NamedConcurrence> {
        use NamedConcurrence::*;
        match arity {
            2 => vec![Bipartite],
            3 => vec![C3k(1), C3k(2), C3k(3), C3],
            4 => {
                let mut v = Vec::new();
                for i in 1..=4 {
                    for j in i + 1..=4 {
                        v.push(C4ij(i, j));
                    }
                }
                v.extend([C4, CN]);
                v
            }
            _ => vec![CN],
        }
    }
}

impl fmt::Display for NamedConcurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedConcurrence::Bipartite => write!(f, "bipartite"),
            NamedConcurrence::C3k(k) => write!(f, "c3_{k}"),
            NamedConcurrence::C3 => write!(f, "C3"),
            NamedConcurrence::C4ij(i, j) => write!(f, "c4_{i}{j}"),
            NamedConcurrence::C4 => write!(f, "C4"),
            NamedConcurrence::CN => write!(f, "CN"),
        }
    }
}

impl FromStr for NamedConcurrence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parsed = match s {
            "bipartite" => Some(NamedConcurrence::Bipartite),
            "C3" => Some(NamedConcurrence::C3),
            "C4" => Some(NamedConcurrence::C4),
            "CN" => Some(NamedConcurrence::CN),
            _ => {
                if let Some(k) = s.strip_prefix("c3_") {
                    k.parse().ok().filter(|k| (1..=3).contains(k)).map(NamedConcurrence::C3k)
                } else if let Some(ij) = s.strip_prefix("c4_") {
                    let d: Vec<usize> = ij.chars().filter_map(|c| c.to_digit(10)).map(|d| d as usize).collect();
                    match d.as_slice() {
                        [i, j] if ij.len() == 2 && i < j && (1..=4).contains(i) && (1..=4).contains(j) => {
                            Some(NamedConcurrence::C4ij(*i, *j))
                        }
                        _ => None,
                    }
                } else {
                    None
                }
            }
        };
        parsed.ok_or_else(|| Error::Validation(format!("unknown concurrence name {s:?}")))
    }
}

/// Exact weights of a named concurrence on `shape`.
pub fn named_spec(name: NamedConcurrence, shape: SystemShape) -> Result<ConcurrenceSpec> {
    use NamedConcurrence::*;
    let n = shape.arity();
    let required = match name {
        Bipartite => Some(2),
        C3k(_) | C3 => Some(3),
        C4ij(..) | C4 => Some(4),
        CN => None,
    };
    if let Some(req) = required {
        if n != req {
            bail!(Shape, "{name} needs {req} subsystems, got {n}");
        }
    }
    let with_plus = |plus: &[usize]| {
        SignString((0..n).map(|i| if plus.contains(&i) { Sign::Plus } else { Sign::Minus }).collect())
    };
    let weights: Vec<(SignString, f64)> = match name {
        Bipartite => vec![(with_plus(&[]), 4.0)],
        C3k(k) => {
            if !(1..=3).contains(&k) {
                bail!(Domain, "c3_{k}: party index out of range");
            }
            vec![(with_plus(&[k - 1]), 4.0)]
        }
        C3 => (0..3).map(|k| (with_plus(&[k]), 4.0)).collect(),
        C4ij(i, j) => {
            if i == j || !(1..=4).contains(&i) || !(1..=4).contains(&j) {
                bail!(Domain, "c4_{i}{j}: invalid party pair");
            }
            vec![(with_plus(&[i - 1, j - 1]), 16.0)]
        }
        C4 => vec![(with_plus(&[]), 16.0)],
        CN => {
            if n < 2 {
                bail!(Shape, "CN needs at least two subsystems");
            }
            SignString::all(n)
                .filter(|s| s.is_even() && s.minus_count() > 0)
                .map(|s| (s, 4.0))
                .collect()
        }
    };
    validate_spec(shape, weights, false).map(|(spec, _)| spec)
}

fn check_local_dim(n: usize) -> Result<()> {
    if n < 2 {
        bail!(Domain, "local dimension {n} < 2");
    }
    Ok(())
}

/// Orthonormal basis `(|jk> - |kj>)/sqrt 2`, `j < k`, of the antisymmetric
/// subspace of `C^n x C^n` (lexicographic order).
pub fn antisym_basis(n: usize) -> Result<Vec<CVector>> {
    check_local_dim(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            let mut v = CVector::zeros(n * n);
            v[j * n + k] = Complex64::new(h, 0.0);
            v[k * n + j] = Complex64::new(-h, 0.0);
            out.push(v);
        }
    }
    Ok(out)
}

/// Orthonormal basis `|jj>` and `(|jk> + |kj>)/sqrt 2`, `j < k`, of the
/// symmetric subspace.
pub fn sym_basis(n: usize) -> Result<Vec<CVector>> {
    check_local_dim(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for k in j..n {
            let mut v = CVector::zeros(n * n);
            if j == k {
                v[j * n + j] = Complex64::new(1.0, 0.0);
            } else {
                v[j * n + k] = Complex64::new(h, 0.0);
                v[k * n + j] = Complex64::new(h, 0.0);
            }
            out.push(v);
        }
    }
    Ok(out)
}

fn local_basis(n: usize, sign: Sign) -> Result<Vec<CVector>> {
    match sign {
        Sign::Plus => sym_basis(n),
        Sign::Minus => antisym_basis(n),
    }
}

/// Vectors `chi_a` with `A = sum_a |chi_a><chi_a|` on `x_i (H_i x H_i)`.
#[derive(Debug, Clone)]
pub struct ChiBasis {
    shape: SystemShape,
    vectors: Vec<CVector>,
}

impl ChiBasis {
    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `sum_a chi_a <chi_a|v>`.
    pub fn apply(&self, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        for chi in &self.vectors {
            out.axpy(chi.dotc(v), chi, Complex64::new(1.0, 0.0));
        }
        out
    }
}

/// Spectral vectors of `A`, scaled by the square roots of their eigenvalues.
///
/// Each even-minus support string `s` with weight `p` contributes
/// `sqrt(p)` times every product of local basis vectors (symmetric for `+`,
/// antisymmetric for `-`). Odd-minus strings are dropped.
pub fn chi_vectors(spec: &ConcurrenceSpec) -> Result<ChiBasis> {
    let dims = spec.shape.dims();
    let mut vectors = Vec::new();
    for (s, p) in spec.even_terms() {
        let bases = s
            .signs()
            .iter()
            .zip(dims)
            .map(|(&sign, &n)| local_basis(n, sign))
            .collect::<Result<Vec<_>>>()?;
        let mut partial = vec![CVector::from_element(1, Complex64::new(p.sqrt(), 0.0))];
        for basis in &bases {
            partial = partial
                .iter()
                .flat_map(|acc| basis.iter().map(move |b| acc.kronecker(b)))
                .collect();
        }
        vectors.extend(partial);
    }
    Ok(ChiBasis { shape: spec.shape.clone(), vectors })
}

/// Applies `P_+` or `P_-` on the copy pair of subsystem `mode`, in place.
pub(crate) fn apply_local_projector(v: &mut CVector, dims: &[usize], mode: usize, sign: Sign) {
    let n = dims[mode];
    let inner: usize = dims[mode + 1..].iter().map(|d| d * d).product();
    let block = n * n * inner;
    let sgn = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    for chunk in v.as_mut_slice().chunks_mut(block) {
        for t in 0..inner {
            for a in 0..n {
                let ia = (a * n + a) * inner + t;
                if sign == Sign::Minus {
                    chunk[ia] = Complex64::new(0.0, 0.0);
                }
                for b in a + 1..n {
                    let iab = (a * n + b) * inner + t;
                    let iba = (b * n + a) * inner + t;
                    let x = chunk[iab];
                    let y = chunk[iba];
                    chunk[iab] = (x + y * sgn) * 0.5;
                    chunk[iba] = (y + x * sgn) * 0.5;
                }
            }
        }
    }
}

fn check_doubled(spec: &ConcurrenceSpec, v: &CVector) -> Result<()> {
    let d = spec.shape.total_dim();
    if v.len() != d * d {
        bail!(Shape, "vector length {} does not match doubled dimension {}", v.len(), d * d);
    }
    Ok(())
}

/// `(x)_i P_{s_i} v` for a single string.
pub fn apply_string(s: &SignString, dims: &[usize], v: &CVector) -> CVector {
    let mut w = v.clone();
    for (mode, &sign) in s.signs().iter().enumerate() {
        apply_local_projector(&mut w, dims, mode, sign);
    }
    w
}

/// `A v`, applied factor by factor without forming the `D^2 x D^2` matrix.
/// Every support string is included, odd-minus ones too.
pub fn apply_a(spec: &ConcurrenceSpec, v: &CVector) -> Result<CVector> {
    check_doubled(spec, v)?;
    let dims = spec.shape.dims();
    let mut out = CVector::zeros(v.len());
    for (s, &p) in &spec.weights {
        out.axpy(Complex64::new(p, 0.0), &apply_string(s, dims, v), Complex64::new(1.0, 0.0));
    }
    Ok(out)
}

/// `<v|A|v>` restricted to the even-minus strings, computed as
/// `sum_s p_s ||P_s v||^2` so the result is a sum of nonnegative terms.
pub fn even_expectation(spec: &ConcurrenceSpec, v: &CVector) -> Result<f64> {
    check_doubled(spec, v)?;
    let dims = spec.shape.dims();
    Ok(spec
        .even_terms()
        .map(|(s, p)| p * apply_string(s, dims, v).norm_squared())
        .sum())
}

fn local_projector_matrix(n: usize, sign: Sign) -> CMatrix {
    let sgn = match sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    CMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, b) = (r / n, r % n);
        let mut x = if r == c { 0.5 } else { 0.0 };
        if c == b * n + a {
            x += 0.5 * sgn;
        }
        Complex64::new(x, 0.0)
    })
}

/// Dense `A` on `x_i (H_i x H_i)`; test oracle for small systems only.
pub fn dense_a(spec: &ConcurrenceSpec) -> Result<CMatrix> {
    let d = spec.shape.total_dim();
    if d * d > DENSE_LIMIT {
        bail!(Domain, "dense operator limited to doubled dimension {DENSE_LIMIT}, got {}", d * d);
    }
    let dims = spec.shape.dims();
    let mut out = CMatrix::zeros(d * d, d * d);
    for (s, &p) in &spec.weights {
        let term = s
            .signs()
            .iter()
            .zip(dims)
            .map(|(&sign, &n)| local_projector_matrix(n, sign))
            .reduce(|acc, m| acc.kronecker(&m))
            .expect("nonempty shape");
        out += term.scale(p);
    }
    Ok(out)
}
