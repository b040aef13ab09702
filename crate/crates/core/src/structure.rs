//! Totally symmetric `(0,3)` coefficient fields `S_pqr(x)` defining cubic
//! m-root metrics, plus the quadratic preset.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{GeometryError, Result};
use crate::jet::DIM;

/// Expanded coefficient array `S[p][q][r]` at a fixed `x`.
pub type Coefficients = [[[f64; DIM]; DIM]; DIM];

/// Default floor on `|S_111|` and `|D_1111|`.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// One term `coeff * x1^a1 x2^a2 x3^a3 x4^a4`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u32; DIM],
}

/// Polynomial in the spatial coordinates, used for x-dependent coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct XPoly {
    terms: Vec<Monomial>,
}

impl XPoly {
    pub fn constant(c: f64) -> Self {
        XPoly {
            terms: vec![Monomial {
                coeff: c,
                powers: [0; DIM],
            }],
        }
    }

    pub fn from_terms(terms: Vec<Monomial>) -> Self {
        XPoly { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|m| m.powers == [0; DIM] || m.coeff == 0.0)
    }

    pub fn eval(&self, x: &[f64; DIM]) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                m.powers
                    .iter()
                    .zip(x)
                    .fold(m.coeff, |acc, (&e, &xi)| acc * xi.powi(e as i32))
            })
            .sum()
    }

    /// Exact partial derivative with respect to `x^axis`.
    pub fn partial(&self, x: &[f64; DIM], axis: usize) -> f64 {
        self.terms
            .iter()
            .filter(|m| m.powers[axis] > 0)
            .map(|m| {
                let mut v = m.coeff * m.powers[axis] as f64;
                for (a, (&e, &xi)) in m.powers.iter().zip(x).enumerate() {
                    let e = if a == axis { e - 1 } else { e };
                    v *= xi.powi(e as i32);
                }
                v
            })
            .sum()
    }
}

/// Symmetric cubic coefficient table stored once per sorted index triple.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CubicTable {
    entries: BTreeMap<[usize; 3], XPoly>,
}

fn sorted(p: usize, q: usize, r: usize) -> [usize; 3] {
    let mut k = [p, q, r];
    k.sort_unstable();
    k
}

impl CubicTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table of the Chernov metric: `1/3!` on distinct triples, zero otherwise.
    pub fn chernov() -> Self {
        let mut t = CubicTable::new();
        for p in 0..DIM {
            for q in p + 1..DIM {
                for r in q + 1..DIM {
                    t.entries.insert([p, q, r], XPoly::constant(1.0 / 6.0));
                }
            }
        }
        t
    }

    /// Sets the entry for the (unordered) triple `{p, q, r}`, 0-based.
    pub fn set(&mut self, p: usize, q: usize, r: usize, value: XPoly) -> Result<()> {
        if p >= DIM || q >= DIM || r >= DIM {
            return Err(GeometryError::Parameter(format!(
                "cubic index ({p}, {q}, {r}) out of range"
            )));
        }
        self.entries.insert(sorted(p, q, r), value);
        Ok(())
    }

    pub fn set_constant(&mut self, p: usize, q: usize, r: usize, value: f64) -> Result<()> {
        self.set(p, q, r, XPoly::constant(value))
    }

    /// `S_pqr(x)`, 0-based indices in any order.
    pub fn coefficient(&self, p: usize, q: usize, r: usize, x: &[f64; DIM]) -> f64 {
        self.entries
            .get(&sorted(p, q, r))
            .map_or(0.0, |poly| poly.eval(x))
    }

    pub fn is_x_dependent(&self) -> bool {
        self.entries.values().any(|p| !p.is_constant())
    }

    /// Independent entries keyed by sorted 0-based triple.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &XPoly)> {
        self.entries.iter()
    }

    fn expand(&self, value: impl Fn(&XPoly) -> f64) -> Coefficients {
        let mut out = [[[0.0; DIM]; DIM]; DIM];
        for (&[p, q, r], poly) in &self.entries {
            let v = value(poly);
            for [a, b, c] in permutations([p, q, r]) {
                out[a][b][c] = v;
            }
        }
        out
    }

    /// Fully expanded `S_pqr(x)`.
    pub fn coefficients_at(&self, x: &[f64; DIM]) -> Coefficients {
        self.expand(|poly| poly.eval(x))
    }

    /// Fully expanded `dS_pqr / dx^axis`.
    pub fn coefficients_dx(&self, x: &[f64; DIM], axis: usize) -> Coefficients {
        self.expand(|poly| poly.partial(x, axis))
    }

    /// Parses the text format: one `p q r value` line per independent entry,
    /// 1-based indices with `p <= q <= r`. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = CubicTable::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| GeometryError::MetricFile {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected `p q r value`, got {line:?}")));
            }
            let mut idx = [0usize; 3];
            for (slot, field) in idx.iter_mut().zip(&fields[..3]) {
                let v: usize = field
                    .parse()
                    .map_err(|_| err(format!("bad index {field:?}")))?;
                if !(1..=DIM).contains(&v) {
                    return Err(err(format!("index {v} outside 1..={DIM}")));
                }
                *slot = v - 1;
            }
            if !(idx[0] <= idx[1] && idx[1] <= idx[2]) {
                return Err(err(format!(
                    "indices must satisfy p <= q <= r, got {} {} {}",
                    idx[0] + 1,
                    idx[1] + 1,
                    idx[2] + 1
                )));
            }
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| err(format!("bad value {:?}", fields[3])))?;
            if !value.is_finite() {
                return Err(err(format!("non-finite value {value}")));
            }
            if table.entries.contains_key(&idx) {
                return Err(err(format!(
                    "duplicate entry {} {} {}",
                    idx[0] + 1,
                    idx[1] + 1,
                    idx[2] + 1
                )));
            }
            table.entries.insert(idx, XPoly::constant(value));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeometryError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes constant entries in the text format. Non-constant entries
    /// are evaluated at `x = 0`.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|([p, q, r], poly)| {
                format!("{} {} {} {:e}\n", p + 1, q + 1, r + 1, poly.eval(&[0.0; DIM]))
            })
            .collect()
    }
}

fn permutations([a, b, c]: [usize; 3]) -> [[usize; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Chernov,
    CustomCubic(CubicTable),
    QuadraticF2,
}

/// The m-root structure of the Finsler function together with the
/// degeneracy floor used by every consuming operation.
#[derive(Debug, Clone, PartialEq)]
pub struct MRootStructure {
    kind: MetricKind,
    floor: f64,
}

impl MRootStructure {
    pub fn chernov() -> Self {
        MRootStructure {
            kind: MetricKind::Chernov,
            floor: DEFAULT_FLOOR,
        }
    }

    pub fn quadratic_f2() -> Self {
        MRootStructure {
            kind: MetricKind::QuadraticF2,
            floor: DEFAULT_FLOOR,
        }
    }

    pub fn custom(table: CubicTable) -> Self {
        MRootStructure {
            kind: MetricKind::CustomCubic(table),
            floor: DEFAULT_FLOOR,
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor.is_finite() && floor > 0.0) {
            return Err(GeometryError::Parameter(format!(
                "degeneracy floor must be positive, got {floor}"
            )));
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn is_cubic(&self) -> bool {
        !matches!(self.kind, MetricKind::QuadraticF2)
    }

    pub fn is_chernov(&self) -> bool {
        matches!(self.kind, MetricKind::Chernov)
    }

    pub fn is_x_dependent(&self) -> bool {
        match &self.kind {
            MetricKind::CustomCubic(t) => t.is_x_dependent(),
            _ => false,
        }
    }

    /// Coefficient table backing a cubic kind; `None` for the quadratic preset.
    pub fn cubic_table(&self) -> Option<std::borrow::Cow<'_, CubicTable>> {
        match &self.kind {
            MetricKind::Chernov => Some(std::borrow::Cow::Owned(CubicTable::chernov())),
            MetricKind::CustomCubic(t) => Some(std::borrow::Cow::Borrowed(t)),
            MetricKind::QuadraticF2 => None,
        }
    }

    /// Expanded `S_pqr(x)` for cubic kinds.
    pub fn coefficients_at(&self, x: &[f64; DIM]) -> Option<Coefficients> {
        match &self.kind {
            MetricKind::Chernov => Some(chernov_coefficients()),
            MetricKind::CustomCubic(t) => Some(t.coefficients_at(x)),
            MetricKind::QuadraticF2 => None,
        }
    }

    /// Expanded `dS_pqr / dx^axis` for cubic kinds (zero for Chernov).
    pub fn coefficients_dx(&self, x: &[f64; DIM], axis: usize) -> Option<Coefficients> {
        match &self.kind {
            MetricKind::Chernov => Some([[[0.0; DIM]; DIM]; DIM]),
            MetricKind::CustomCubic(t) => Some(t.coefficients_dx(x, axis)),
            MetricKind::QuadraticF2 => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MetricKind::Chernov => "chernov",
            MetricKind::CustomCubic(_) => "custom",
            MetricKind::QuadraticF2 => "f2",
        }
    }
}

fn chernov_coefficients() -> Coefficients {
    let mut s = [[[0.0; DIM]; DIM]; DIM];
    for (p, sp) in s.iter_mut().enumerate() {
        for (q, spq) in sp.iter_mut().enumerate() {
            for (r, v) in spq.iter_mut().enumerate() {
                if p != q && q != r && p != r {
                    *v = 1.0 / 6.0;
                }
            }
        }
    }
    s
}
