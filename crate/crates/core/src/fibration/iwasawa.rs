use nalgebra::Vector4;
use serde::Serialize;

use super::{
    membership, membership_defect, m1, m4, FibrationError, GroupElement, Mat4, Result,
    SubgroupSpec, MEMBERSHIP_TOL, RECONSTRUCTION_TOL,
};

/// `g = k·a·n̄` with `k ∈ SO(4)`, `a` positive diagonal, `n̄` lower unitriangular.
#[derive(Clone, Copy, Debug)]
pub struct Decomposition {
    pub k: GroupElement,
    pub a: GroupElement,
    pub n: GroupElement,
    pub residual: f64,
}

/// Reverses the basis order; conjugating by it swaps upper and lower triangles.
fn reversal() -> Mat4 {
    let mut j = Mat4::zeros();
    for i in 0..4 {
        j[(i, 3 - i)] = 1.0;
    }
    j
}

/// QL factorization via QR of `g·J`, with the diagonal of `L` made positive.
pub fn iwasawa_lower(g: &GroupElement) -> Result<Decomposition> {
    let m = *g.matrix();
    if m.determinant().abs() < 1e-300 {
        return Err(FibrationError::Singular);
    }
    let j = reversal();
    let qr = (m * j).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut k = q * j;
    let mut l = j * r * j;
    for i in 0..4 {
        if l[(i, i)] == 0.0 {
            return Err(FibrationError::Singular);
        }
        if l[(i, i)] < 0.0 {
            // D L and K D with D = D⁻¹ flipping row/column i
            l.row_mut(i).neg_mut();
            k.column_mut(i).neg_mut();
        }
    }
    let d = l.diagonal();
    let a = Mat4::from_diagonal(&d);
    let n = Mat4::from_diagonal(&d.map(|x| 1.0 / x)) * l;
    let residual = (k * a * n - m).norm();
    Ok(Decomposition {
        k: GroupElement::unchecked(k),
        a: GroupElement::unchecked(a),
        n: GroupElement::unchecked(n),
        residual,
    })
}

/// The four decomposable subgroups `G`, `G∩H_4`, `G∩H̄_1`, `G∩H` of the
/// compact-type group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IntersectionCase {
    Whole,
    H4,
    Hbar1,
    H,
}

impl IntersectionCase {
    pub const ALL: [IntersectionCase; 4] = [IntersectionCase::Whole, IntersectionCase::H4, IntersectionCase::Hbar1, IntersectionCase::H];

    pub fn spec(self) -> SubgroupSpec {
        let g = SubgroupSpec::CompactType;
        match self {
            IntersectionCase::Whole => g,
            IntersectionCase::H4 => g.intersect(SubgroupSpec::PointStabilizer(4)),
            IntersectionCase::Hbar1 => g.intersect(SubgroupSpec::HyperplaneStabilizer(1)),
            IntersectionCase::H => g.intersect(SubgroupSpec::h()),
        }
    }

    pub fn of(spec: &SubgroupSpec) -> Option<IntersectionCase> {
        let mut atoms = spec.atoms();
        atoms.sort_by_key(|a| a.label());
        IntersectionCase::ALL.into_iter().find(|c| {
            let mut want = c.spec().atoms();
            want.sort_by_key(|a| a.label());
            want == atoms
        })
    }

    /// Basis vectors the `K`-factor must fix (after the sign correction).
    fn fixed_vectors(self) -> &'static [usize] {
        match self {
            IntersectionCase::Whole => &[],
            IntersectionCase::H4 => &[3],
            IntersectionCase::Hbar1 => &[0],
            IntersectionCase::H => &[0, 3],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IntersectionCase::Whole => "G",
            IntersectionCase::H4 => "G∩H4",
            IntersectionCase::Hbar1 => "G∩Hbar1",
            IntersectionCase::H => "G∩H",
        }
    }
}

/// Which factors passed their memberships.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorFlags {
    /// `k' = k·m` is special orthogonal, lies in `G` and fixes the required basis vectors.
    pub k: bool,
    /// `a` is positive diagonal with unit determinant.
    pub a: bool,
    /// `n̄` is lower unitriangular and lies in `G`.
    pub n: bool,
    pub reconstruction: bool,
}

impl FactorFlags {
    pub fn all(&self) -> bool {
        self.k && self.a && self.n && self.reconstruction
    }
}

#[derive(Clone, Debug)]
pub struct IntersectionDecomposition {
    pub case: IntersectionCase,
    pub decomposition: Decomposition,
    /// `k` with the sign factor removed.
    pub k_reduced: GroupElement,
    /// Element of `⟨m_1, m_4⟩` with `k = k_reduced · sign`.
    pub sign: GroupElement,
    pub sign_label: &'static str,
    pub flags: FactorFlags,
    /// Worst membership defect over the factors.
    pub worst_defect: f64,
}

/// Factorize `g` and split off the finite sign factor of its `K`-part.
pub fn decompose_in_intersection(
    g: &GroupElement,
    spec: &SubgroupSpec,
) -> Result<IntersectionDecomposition> {
    let case = IntersectionCase::of(spec).ok_or_else(|| FibrationError::NotDecomposable(spec.label()))?;
    if !membership(g, spec) {
        return Err(FibrationError::NotMember(spec.label()));
    }
    let d = iwasawa_lower(g)?;
    let k = *d.k.matrix();
    let flip1 = case.fixed_vectors().contains(&0) && k[(0, 0)] < 0.0;
    let flip4 = case.fixed_vectors().contains(&3) && k[(3, 3)] < 0.0;
    let (sign, sign_label) = match (flip1, flip4) {
        (false, false) => (GroupElement::identity(), "1"),
        (true, false) => (m1(), "m1"),
        (false, true) => (m4(), "m4"),
        (true, true) => (m1().mul(&m4()), "m1·m4"),
    };
    let kr = k * sign.matrix();

    let group = SubgroupSpec::CompactType;
    let orth = (kr.transpose() * kr - Mat4::identity()).norm();
    let fixed = case
        .fixed_vectors()
        .iter()
        .map(|&i| {
            let mut e = Vector4::zeros();
            e[i] = 1.0;
            (kr * e - e).norm()
        })
        .fold(0.0, f64::max);
    let k_defect = orth
        .max(fixed)
        .max((kr.determinant() - 1.0).abs())
        .max(membership_defect(&GroupElement::unchecked(kr), &group));

    let a = *d.a.matrix();
    let a_off = (a - Mat4::from_diagonal(&a.diagonal())).norm();
    let a_ok = a.diagonal().iter().all(|x| *x > 0.0);
    let a_defect = a_off.max((a.determinant() - 1.0).abs());

    let n = *d.n.matrix();
    let mut n_defect = membership_defect(&d.n, &group);
    for r in 0..4 {
        n_defect = n_defect.max((n[(r, r)] - 1.0).abs());
        for c in r + 1..4 {
            n_defect = n_defect.max(n[(r, c)].abs());
        }
    }
    let flags = FactorFlags {
        k: k_defect <= MEMBERSHIP_TOL,
        a: a_ok && a_defect <= MEMBERSHIP_TOL,
        n: n_defect <= MEMBERSHIP_TOL,
        reconstruction: d.residual <= RECONSTRUCTION_TOL * (1.0 + g.matrix().norm()),
    };
    Ok(IntersectionDecomposition {
        case,
        decomposition: d,
        k_reduced: GroupElement::unchecked(kr),
        sign,
        sign_label,
        flags,
        worst_defect: k_defect.max(a_defect).max(n_defect),
    })
}
