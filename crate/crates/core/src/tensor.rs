//! Dense indexed containers for distinguished tensors.

use nalgebra::Matrix4;

use crate::jet::DIM;

/// Kind of a tensor slot in adapted components.
///
/// Temporal slots carry the single time index `1`; spatial slots are the
/// `x^i` directions and vertical slots the `y_1^i` directions, written with
/// parenthesised indices such as `(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    TemporalUpper,
    TemporalLower,
    SpatialUpper,
    SpatialLower,
    VerticalUpper,
    VerticalLower,
}

impl Slot {
    pub fn extent(self) -> usize {
        match self {
            Slot::TemporalUpper | Slot::TemporalLower => 1,
            _ => DIM,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(
            self,
            Slot::TemporalUpper | Slot::SpatialUpper | Slot::VerticalUpper
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            Slot::TemporalUpper => "temporal-upper",
            Slot::TemporalLower => "temporal-lower",
            Slot::SpatialUpper => "spatial-upper",
            Slot::SpatialLower => "spatial-lower",
            Slot::VerticalUpper => "vertical-upper",
            Slot::VerticalLower => "vertical-lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

/// Declared symmetry between two slots of equal extent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotSymmetry {
    pub a: usize,
    pub b: usize,
    pub kind: Symmetry,
}

/// Dense real tensor over the slots of its signature, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DTensor {
    slots: Vec<Slot>,
    symmetries: Vec<SlotSymmetry>,
    values: Vec<f64>,
}

impl DTensor {
    pub fn zeros(slots: Vec<Slot>) -> Self {
        let len = slots.iter().map(|s| s.extent()).product();
        DTensor {
            slots,
            symmetries: Vec::new(),
            values: vec![0.0; len],
        }
    }

    /// Declares a symmetry enforced by subsequent writes.
    ///
    /// Panics if the slots are out of range or have different extents.
    pub fn with_symmetry(mut self, a: usize, b: usize, kind: Symmetry) -> Self {
        assert!(a < self.rank() && b < self.rank() && a != b, "bad symmetry slots");
        assert_eq!(self.slots[a].extent(), self.slots[b].extent());
        self.symmetries.push(SlotSymmetry { a, b, kind });
        self
    }

    pub fn from_matrix(slots: [Slot; 2], m: &Matrix4<f64>) -> Self {
        let mut t = DTensor::zeros(slots.to_vec());
        for i in 0..DIM {
            for j in 0..DIM {
                t.values[i * DIM + j] = m[(i, j)];
            }
        }
        t
    }

    /// Builds a tensor from row-major values; panics on a length mismatch.
    pub fn from_values(slots: Vec<Slot>, values: Vec<f64>) -> Self {
        let t = DTensor::zeros(slots);
        assert_eq!(t.values.len(), values.len(), "value length does not match slots");
        DTensor { values, ..t }
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn symmetries(&self) -> &[SlotSymmetry] {
        &self.symmetries
    }

    pub fn shape(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.extent()).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        self.slots
            .iter()
            .zip(idx)
            .fold(0, |acc, (s, &i)| {
                debug_assert!(i < s.extent());
                acc * s.extent() + i
            })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.offset(idx)]
    }

    /// Writes `v` at `idx` and at every index reachable through the declared
    /// symmetries (negated across antisymmetric swaps). Antisymmetric
    /// diagonals are pinned to zero.
    pub fn set(&mut self, idx: &[usize], v: f64) {
        if self.symmetries.is_empty() {
            let o = self.offset(idx);
            self.values[o] = v;
            return;
        }
        let mut orbit: Vec<(Vec<usize>, f64)> = vec![(idx.to_vec(), 1.0)];
        let mut cursor = 0;
        let mut zero = false;
        while cursor < orbit.len() {
            let (cur, sign) = orbit[cursor].clone();
            for s in &self.symmetries {
                let mut next = cur.clone();
                next.swap(s.a, s.b);
                let next_sign = match s.kind {
                    Symmetry::Symmetric => sign,
                    Symmetry::Antisymmetric => -sign,
                };
                match orbit.iter().find(|(i, _)| *i == next) {
                    Some((_, existing)) if *existing != next_sign => zero = true,
                    Some(_) => {}
                    None => orbit.push((next, next_sign)),
                }
            }
            cursor += 1;
        }
        for (i, sign) in orbit {
            let o = self.offset(&i);
            self.values[o] = if zero { 0.0 } else { sign * v };
        }
    }

    pub fn at3(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * DIM + j) * DIM + k]
    }

    pub fn at4(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.values[((i * DIM + j) * DIM + k) * DIM + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference; panics if the shapes differ.
    pub fn max_abs_diff(&self, other: &DTensor) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Copy with every entry multiplied by `factor`; symmetries are kept.
    pub fn scaled(&self, factor: f64) -> DTensor {
        DTensor {
            slots: self.slots.clone(),
            symmetries: self.symmetries.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Copy with a different signature over the same values.
    pub fn relabeled(&self, slots: Vec<Slot>) -> DTensor {
        assert_eq!(
            slots.iter().map(|s| s.extent()).collect::<Vec<_>>(),
            self.shape()
        );
        DTensor {
            slots,
            symmetries: self.symmetries.clone(),
            values: self.values.clone(),
        }
    }
}

/// Plain rank-3 array used in intermediate computations.
pub type Array3 = [[[f64; DIM]; DIM]; DIM];

/// Plain rank-4 array used in intermediate computations.
pub type Array4 = [[[[f64; DIM]; DIM]; DIM]; DIM];

pub(crate) fn max_abs_mat(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_follows_non_temporal_slots() {
        let t = DTensor::zeros(vec![Slot::VerticalUpper, Slot::TemporalLower, Slot::SpatialLower]);
        assert_eq!(t.values().len(), 16);
        assert_eq!(t.shape(), vec![4, 1, 4]);
        let s = DTensor::zeros(vec![Slot::SpatialUpper; 4]);
        assert_eq!(s.values().len(), 256);
    }

    #[test]
    fn symmetric_write() {
        let mut c = DTensor::zeros(vec![Slot::SpatialUpper, Slot::SpatialLower, Slot::VerticalLower])
            .with_symmetry(1, 2, Symmetry::Symmetric);
        c.set(&[0, 1, 3], 2.5);
        assert_eq!(c.get(&[0, 3, 1]), 2.5);
        assert_eq!(c.get(&[1, 3, 0]), 0.0);
    }

    #[test]
    fn antisymmetric_write_and_diagonal() {
        let mut s = DTensor::zeros(vec![Slot::VerticalUpper; 4])
            .with_symmetry(2, 3, Symmetry::Antisymmetric);
        s.set(&[0, 1, 2, 3], 1.5);
        assert_eq!(s.at4(0, 1, 3, 2), -1.5);
        s.set(&[0, 1, 2, 2], 7.0);
        assert_eq!(s.at4(0, 1, 2, 2), 0.0);
    }

    #[test]
    fn fully_symmetric_orbit() {
        let mut t = DTensor::zeros(vec![Slot::SpatialLower; 3])
            .with_symmetry(0, 1, Symmetry::Symmetric)
            .with_symmetry(1, 2, Symmetry::Symmetric);
        t.set(&[0, 1, 2], 3.0);
        for idx in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            assert_eq!(t.get(&idx), 3.0);
        }
    }
}
