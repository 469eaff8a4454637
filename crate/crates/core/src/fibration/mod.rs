//! Numeric model spaces: subgroups of SL(4, ℝ), the fractional-linear action
//! on ℝ³ and lower Iwasawa factorizations.
//!
//! Every subgroup here is the stabilizer of a set of coordinate subspaces of
//! ℝ⁴, so membership and Lie-algebra constraints are both derived from that
//! one description.

mod iwasawa;
mod probe;

pub use iwasawa::{
    decompose_in_intersection, iwasawa_lower, Decomposition, FactorFlags, IntersectionDecomposition,
    IntersectionCase,
};
pub use probe::{
    fibration_report, orbit_probe, random_element, random_sl4, DecompositionStats, DimRow,
    FibrationReport, Group, ProbeResult,
};

use nalgebra::{DMatrix, Matrix4, Vector3, Vector4};
use serde::Serialize;
use thiserror::Error;

pub type Mat4 = Matrix4<f64>;

pub const MEMBERSHIP_TOL: f64 = 1e-9;
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FibrationError {
    #[error("determinant {0} is not 1")]
    NotUnimodular(f64),
    #[error("matrix is numerically singular")]
    Singular,
    #[error("element is not in {0}")]
    NotMember(String),
    #[error("{0} is not one of the four decomposable intersections")]
    NotDecomposable(String),
    #[error("unknown group `{0}` (expected sl4, scale or compact)")]
    UnknownGroup(String),
}

pub type Result<T> = std::result::Result<T, FibrationError>;

/// An element of SL(4, ℝ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement(Mat4);

impl GroupElement {
    pub fn new(m: Mat4) -> Result<GroupElement> {
        let det = m.determinant();
        let n = m.norm();
        if (det - 1.0).abs() > 1e-9 * (1.0 + n.powi(4)) {
            return Err(FibrationError::NotUnimodular(det));
        }
        Ok(GroupElement(m))
    }

    /// Rescale a matrix with positive determinant onto SL(4).
    pub fn normalized(m: Mat4) -> Result<GroupElement> {
        let det = m.determinant();
        if det <= 0.0 || !det.is_finite() {
            return Err(FibrationError::Singular);
        }
        GroupElement::new(m / det.powf(0.25))
    }

    pub(crate) fn unchecked(m: Mat4) -> GroupElement {
        GroupElement(m)
    }

    pub fn identity() -> GroupElement {
        GroupElement(Mat4::identity())
    }

    pub fn diag(d: [f64; 4]) -> Result<GroupElement> {
        GroupElement::new(Mat4::from_diagonal(&Vector4::from(d)))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement(self.0 * other.0)
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        self.0
            .try_inverse()
            .map(GroupElement)
            .ok_or(FibrationError::Singular)
    }
}

/// `m_1 = diag(-1, -1, 1, 1)`.
pub fn m1() -> GroupElement {
    GroupElement(Mat4::from_diagonal(&Vector4::new(-1.0, -1.0, 1.0, 1.0)))
}

/// `m_4 = diag(1, 1, -1, -1)`.
pub fn m4() -> GroupElement {
    GroupElement(Mat4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0)))
}

/// The translation `Φ(a)`: identity with `a` in the last column.
pub fn phi(a: [f64; 3]) -> GroupElement {
    let mut m = Mat4::identity();
    for (i, ai) in a.iter().enumerate() {
        m[(i, 3)] = *ai;
    }
    GroupElement(m)
}

/// `g ↦ ᵗg⁻¹`.
pub fn cartan_involution(g: &GroupElement) -> Result<GroupElement> {
    let inv = g.0.try_inverse().ok_or(FibrationError::Singular)?;
    if !inv.iter().all(|x| x.is_finite()) {
        return Err(FibrationError::Singular);
    }
    Ok(GroupElement(inv.transpose()))
}

/// Coordinate subspace of ℝ⁴ as a bit mask over `e1..e4` (bit `i-1` for `e_i`).
type Subspace = u8;

fn span(idx: &[usize]) -> Subspace {
    idx.iter().fold(0, |m, i| m | 1 << (i - 1))
}

const ALL: Subspace = 0b1111;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubgroupSpec {
    FullSl4,
    ScaleSymmetry,
    CompactType,
    /// `H_i`: fixes the line `[e_i]`.
    PointStabilizer(usize),
    /// `H̄_i`: fixes the hyperplane spanned by `e_j`, `j ≠ i`.
    HyperplaneStabilizer(usize),
    Intersection(Vec<SubgroupSpec>),
}

impl SubgroupSpec {
    pub fn intersect(self, other: SubgroupSpec) -> SubgroupSpec {
        let mut parts = self.atoms();
        for a in other.atoms() {
            if !parts.contains(&a) {
                parts.push(a);
            }
        }
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            SubgroupSpec::Intersection(parts)
        }
    }

    /// `H = H_4 ∩ H̄_1`.
    pub fn h() -> SubgroupSpec {
        SubgroupSpec::PointStabilizer(4).intersect(SubgroupSpec::HyperplaneStabilizer(1))
    }

    pub fn atoms(&self) -> Vec<SubgroupSpec> {
        match self {
            SubgroupSpec::Intersection(v) => v.iter().flat_map(|s| s.atoms()).collect(),
            SubgroupSpec::FullSl4 => vec![],
            s => vec![s.clone()],
        }
    }

    fn subspaces(&self) -> Vec<Subspace> {
        match self {
            SubgroupSpec::FullSl4 => vec![],
            SubgroupSpec::ScaleSymmetry => {
                vec![span(&[3]), span(&[1, 3]), span(&[2, 3]), span(&[1, 2, 3])]
            }
            SubgroupSpec::CompactType => vec![span(&[3]), ALL & !span(&[3])],
            SubgroupSpec::PointStabilizer(i) => vec![span(&[*i])],
            SubgroupSpec::HyperplaneStabilizer(i) => vec![ALL & !span(&[*i])],
            SubgroupSpec::Intersection(v) => v.iter().flat_map(|s| s.subspaces()).collect(),
        }
    }

    /// Matrix entries `(row, col)` forced to vanish in the Lie algebra (and,
    /// for these block patterns, in the group).
    pub fn zero_entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in self.subspaces() {
            for c in 0..4 {
                for r in 0..4 {
                    if s >> c & 1 == 1 && s >> r & 1 == 0 && !out.contains(&(r, c)) {
                        out.push((r, c));
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn label(&self) -> String {
        match self {
            SubgroupSpec::FullSl4 => "SL4".into(),
            SubgroupSpec::ScaleSymmetry => "G_scale".into(),
            SubgroupSpec::CompactType => "G_compact".into(),
            SubgroupSpec::PointStabilizer(i) => format!("H{i}"),
            SubgroupSpec::HyperplaneStabilizer(i) => format!("Hbar{i}"),
            SubgroupSpec::Intersection(v) => {
                v.iter().map(|s| s.label()).collect::<Vec<_>>().join("∩")
            }
        }
    }
}

/// `g` maps each of the spec's subspaces into itself, up to relative
/// tolerance `1e-9`. Scale-free: only the ratio to `‖g‖` enters.
pub fn membership(g: &GroupElement, spec: &SubgroupSpec) -> bool {
    membership_defect(g, spec) <= MEMBERSHIP_TOL
}

/// Largest relative leak `‖P_{S⊥} g P_S‖ / ‖g‖` over the spec's subspaces.
pub fn membership_defect(g: &GroupElement, spec: &SubgroupSpec) -> f64 {
    let n = g.0.norm();
    spec.zero_entries()
        .iter()
        .map(|&(r, c)| g.0[(r, c)].abs() / n)
        .fold(0.0, f64::max)
}

/// Dimension of the Lie algebra: nullity of the linear constraints
/// (trace plus forced zeros) on 4×4 matrices.
pub fn lie_algebra_dim(spec: &SubgroupSpec) -> usize {
    let zeros = spec.zero_entries();
    let mut a = DMatrix::<f64>::zeros(zeros.len() + 1, 16);
    for i in 0..4 {
        a[(0, 5 * i)] = 1.0;
    }
    for (k, (r, c)) in zeros.iter().enumerate() {
        a[(k + 1, 4 * r + c)] = 1.0;
    }
    let sv = a.svd(false, false).singular_values;
    let top = sv.max();
    let rank = sv.iter().filter(|s| **s > RANK_TOL * top).count();
    16 - rank
}

/// Point at infinity: the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("image is at infinity (denominator {0:e})")]
pub struct AtInfinity(pub f64);

/// The fractional-linear action on `(x1, x2, y)`.
pub fn projective_action(
    g: &GroupElement,
    p: &Vector3<f64>,
) -> std::result::Result<Vector3<f64>, AtInfinity> {
    let w = g.0 * Vector4::new(p[0], p[1], p[2], 1.0);
    if w[3].abs() <= 1e-12 * g.0.norm() * (1.0 + p.norm()) {
        return Err(AtInfinity(w[3]));
    }
    Ok(Vector3::new(w[0] / w[3], w[1] / w[3], w[2] / w[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        use SubgroupSpec::*;
        let g = CompactType;
        assert_eq!(lie_algebra_dim(&FullSl4), 15);
        assert_eq!(lie_algebra_dim(&g), 9);
        assert_eq!(lie_algebra_dim(&g.clone().intersect(PointStabilizer(4))), 7);
        assert_eq!(lie_algebra_dim(&g.clone().intersect(HyperplaneStabilizer(1))), 7);
        assert_eq!(lie_algebra_dim(&g.intersect(SubgroupSpec::h())), 6);
        let s = ScaleSymmetry;
        assert_eq!(lie_algebra_dim(&s), 8);
        assert_eq!(lie_algebra_dim(&s.clone().intersect(PointStabilizer(4))), 5);
        assert_eq!(lie_algebra_dim(&s.clone().intersect(HyperplaneStabilizer(1))), 7);
        assert_eq!(lie_algebra_dim(&s.intersect(SubgroupSpec::h())), 5);
    }

    #[test]
    fn scale_pattern() {
        let z = SubgroupSpec::ScaleSymmetry.zero_entries();
        assert_eq!(z, vec![(0, 1), (0, 2), (1, 0), (1, 2), (3, 0), (3, 1), (3, 2)]);
        let c = SubgroupSpec::CompactType.zero_entries();
        assert_eq!(c, vec![(0, 2), (1, 2), (2, 0), (2, 1), (2, 3), (3, 2)]);
    }

    #[test]
    fn membership_examples() {
        let id = GroupElement::identity();
        for s in [
            SubgroupSpec::FullSl4,
            SubgroupSpec::CompactType,
            SubgroupSpec::ScaleSymmetry,
            SubgroupSpec::h(),
        ] {
            assert!(membership(&id, &s));
        }
        let d = GroupElement::diag([2.0, 1.0, 1.0, 0.5]).unwrap();
        assert!(membership(&d, &SubgroupSpec::CompactType));
        // e1 -> e3, e3 -> -e1
        let mut m = Mat4::zeros();
        m[(2, 0)] = 1.0;
        m[(0, 2)] = -1.0;
        m[(1, 1)] = 1.0;
        m[(3, 3)] = 1.0;
        let swap = GroupElement::new(m).unwrap();
        assert!(!membership(&swap, &SubgroupSpec::CompactType));
        // scale-free: a multiple passes the same test
        let big = GroupElement::unchecked(d.matrix() * 1e6);
        assert!(membership(&big, &SubgroupSpec::CompactType));
    }

    #[test]
    fn involution() {
        let d = GroupElement::diag([2.0, 1.0, 1.0, 0.5]).unwrap();
        let t = cartan_involution(&d).unwrap();
        assert!((t.matrix() - GroupElement::diag([0.5, 1.0, 1.0, 2.0]).unwrap().matrix()).norm() < 1e-15);
        let c = (0.3f64).cos();
        let s = (0.3f64).sin();
        let mut r = Mat4::identity();
        r[(0, 0)] = c;
        r[(0, 1)] = -s;
        r[(1, 0)] = s;
        r[(1, 1)] = c;
        let r = GroupElement::new(r).unwrap();
        assert!((cartan_involution(&r).unwrap().matrix() - r.matrix()).norm() < 1e-15);
        assert!(cartan_involution(&GroupElement::unchecked(Mat4::zeros())).is_err());
    }

    #[test]
    fn action() {
        let p = Vector3::new(0.5, -1.0, 2.0);
        assert_eq!(projective_action(&GroupElement::identity(), &p).unwrap(), p);
        let q = projective_action(&phi([1.0, 2.0, 3.0]), &p).unwrap();
        assert!((q - Vector3::new(1.5, 1.0, 5.0)).norm() < 1e-15);
        // d = (1, 0, 0, 0): denominator is x1
        let mut m = Mat4::zeros();
        m[(0, 3)] = 1.0;
        m[(1, 1)] = 1.0;
        m[(2, 2)] = 1.0;
        m[(3, 0)] = -1.0;
        let g = GroupElement::new(m).unwrap();
        assert!(projective_action(&g, &Vector3::new(0.0, 1.0, 1.0)).is_err());
    }
}
