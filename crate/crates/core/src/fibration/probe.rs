//! Seeded sampling, orbit probes and the per-group report.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3, Vector4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    cartan_involution, decompose_in_intersection, iwasawa_lower, lie_algebra_dim, m1, m4,
    membership_defect, phi, projective_action, FibrationError, GroupElement, IntersectionCase,
    Mat4, SubgroupSpec, MEMBERSHIP_TOL, RECONSTRUCTION_TOL,
};

/// `exp` of a random Lie-algebra element: free entries uniform in `[-1, 1]`,
/// trace removed.
pub fn random_element<R: Rng>(rng: &mut R, spec: &SubgroupSpec) -> GroupElement {
    let zeros = spec.zero_entries();
    let mut x = Mat4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            if !zeros.contains(&(r, c)) {
                x[(r, c)] = rng.gen_range(-1.0..=1.0);
            }
        }
    }
    let t = x.trace() / 4.0;
    for i in 0..4 {
        x[(i, i)] -= t;
    }
    GroupElement::unchecked(x.exp())
}

pub fn random_sl4<R: Rng>(rng: &mut R) -> GroupElement {
    random_element(rng, &SubgroupSpec::FullSl4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Sl4,
    Scale,
    Compact,
}

impl Group {
    pub fn spec(self) -> SubgroupSpec {
        match self {
            Group::Sl4 => SubgroupSpec::FullSl4,
            Group::Scale => SubgroupSpec::ScaleSymmetry,
            Group::Compact => SubgroupSpec::CompactType,
        }
    }

    /// Subgroup dimensions expected for `G, G∩H4, G∩H̄1, G∩H`.
    fn expected_dims(self) -> [usize; 4] {
        match self {
            Group::Sl4 => [15, 12, 12, 10],
            Group::Scale => [8, 5, 7, 5],
            Group::Compact => [9, 7, 7, 6],
        }
    }

    /// Model spaces for `G/(G∩H4)`, `G/(G∩H̄1)`, `G/(G∩H)`,
    /// `(G∩H4)/(G∩H)`, `(G∩H̄1)/(G∩H)`.
    fn models(self) -> [(&'static str, usize); 5] {
        match self {
            Group::Sl4 => [("RP^3", 3), ("RP^3", 3), ("F(1,3)", 5), ("RP^2", 2), ("RP^2", 2)],
            Group::Scale => [("R^3", 3), ("R", 1), ("R^3", 3), ("{0}", 0), ("R^2", 2)],
            Group::Compact => [("RP^2", 2), ("RP^2", 2), ("F(1,2)", 3), ("S^1", 1), ("S^1", 1)],
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Sl4 => "sl4",
            Group::Scale => "scale",
            Group::Compact => "compact",
        })
    }
}

impl FromStr for Group {
    type Err = FibrationError;

    fn from_str(s: &str) -> Result<Group, FibrationError> {
        match s {
            "sl4" => Ok(Group::Sl4),
            "scale" => Ok(Group::Scale),
            "compact" => Ok(Group::Compact),
            _ => Err(FibrationError::UnknownGroup(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DimRow {
    pub space: String,
    pub dim: usize,
    pub expected: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DecompositionStats {
    pub subgroup: String,
    pub samples: usize,
    pub max_residual: f64,
    pub max_defect: f64,
    pub sign_factors: BTreeMap<String, usize>,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProbeResult {
    pub name: String,
    pub samples: usize,
    pub passed: bool,
    /// Worst relative defect seen.
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

struct Probe {
    name: &'static str,
    tol: f64,
    samples: usize,
    worst: f64,
    witness: Option<String>,
}

impl Probe {
    fn new(name: &'static str, tol: f64) -> Probe {
        Probe {
            name,
            tol,
            samples: 0,
            worst: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, defect: f64, what: impl FnOnce() -> String) {
        self.samples += 1;
        if defect.is_nan() || defect > self.worst {
            self.worst = if defect.is_nan() { f64::INFINITY } else { defect };
        }
        if (defect.is_nan() || defect > self.tol) && self.witness.is_none() {
            self.witness = Some(what());
        }
    }

    fn finish(self) -> ProbeResult {
        ProbeResult {
            name: self.name.to_string(),
            samples: self.samples,
            passed: self.witness.is_none() && self.samples > 0,
            worst: self.worst,
            witness: self.witness,
        }
    }
}

/// Relative distance of `v` from the line `[e_i]` (0-based `i`).
fn off_line(v: &Vector4<f64>, i: usize) -> f64 {
    let mut w = *v;
    w[i] = 0.0;
    w.norm() / v.norm()
}

fn unit(i: usize) -> Vector4<f64> {
    let mut e = Vector4::zeros();
    e[i] = 1.0;
    e
}

/// Orthonormal `u1, u2` with `(u1, u2, w)` right-handed, `w` a unit vector.
fn complete(w: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let i = w.iamin();
    let a = Vector3::ith(i, 1.0);
    let u1 = (a - w * w.dot(&a)).normalize();
    (u1, w.cross(&u1))
}

/// An element of the compact-type group whose `col`-th basis vector
/// (0 or 3) is sent to `v` (with `v[2] = 0`).
fn compact_sending(col: usize, v: &Vector4<f64>) -> GroupElement {
    let vp = Vector3::new(v[0], v[1], v[3]);
    let len = vp.norm();
    let (u1, u2) = complete(&(vp / len));
    // det [u1 u2 vp] = det [vp u1 u2] = |vp|
    let b = if col == 3 {
        Matrix3::from_columns(&[u1, u2, vp])
    } else {
        Matrix3::from_columns(&[vp, u1, u2])
    };
    let idx = [0, 1, 3];
    let mut g = Mat4::zeros();
    for (r, &ri) in idx.iter().enumerate() {
        for (c, &ci) in idx.iter().enumerate() {
            g[(ri, ci)] = b[(r, c)];
        }
    }
    g[(2, 2)] = 1.0 / len;
    GroupElement::unchecked(g)
}

fn random_vec4<R: Rng>(rng: &mut R) -> Vector4<f64> {
    Vector4::from_fn(|_, _| rng.gen_range(-1.0..=1.0))
}

fn random_point<R: Rng>(rng: &mut R) -> Vector3<f64> {
    Vector3::from_fn(|_, _| rng.gen_range(-1.0..=1.0))
}

fn fmt_mat(m: &Mat4) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| {
            r.iter()
                .map(|x| format!("{x:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    format!("[[{}]]", rows.join("], ["))
}

/// Probes shared by every group: identity and associativity of the
/// action, and planes going to planes.
fn action_probes<R: Rng>(rng: &mut R, samples: usize) -> Vec<ProbeResult> {
    let mut assoc = Probe::new("action_associative", 1e-9);
    let mut ident = Probe::new("action_identity", 1e-9);
    let mut planes = Probe::new("planes_to_planes", 1e-9);
    let id = GroupElement::identity();
    while assoc.samples < samples {
        let (g, h) = (random_sl4(rng), random_sl4(rng));
        let p = random_point(rng);
        let Ok(hp) = projective_action(&h, &p) else { continue };
        let Ok(lhs) = projective_action(&g.mul(&h), &p) else { continue };
        let Ok(rhs) = projective_action(&g, &hp) else { continue };
        let d = (lhs - rhs).norm() / (1.0 + lhs.norm());
        assoc.record(d, || format!("g={} h={} p={:?}", fmt_mat(g.matrix()), fmt_mat(h.matrix()), p));
        let e = (projective_action(&id, &p).unwrap() - p).norm();
        ident.record(e, || format!("p={p:?}"));
    }
    while planes.samples < samples {
        let g = random_sl4(rng);
        // four points on y = x1 + x2
        let pts: Vec<Vector3<f64>> = (0..4)
            .map(|_| {
                let (a, b) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
                Vector3::new(a, b, a + b)
            })
            .collect();
        let imgs: Option<Vec<_>> = pts.iter().map(|p| projective_action(&g, p).ok()).collect();
        let Some(imgs) = imgs else { continue };
        let mut m = Mat4::zeros();
        for (r, q) in imgs.iter().enumerate() {
            let row = Vector4::new(q[0], q[1], q[2], 1.0).normalize();
            m.set_row(r, &row.transpose());
        }
        planes.record(m.determinant().abs(), || format!("g={}", fmt_mat(g.matrix())));
    }
    vec![assoc.finish(), ident.finish(), planes.finish()]
}

/// Orbit checks for the compact-type or scale-symmetry group. Any other
/// spec gets only the action probes.
pub fn orbit_probe<R: Rng>(rng: &mut R, spec: &SubgroupSpec, samples: usize) -> Vec<ProbeResult> {
    let mut out = Vec::new();
    match spec {
        SubgroupSpec::CompactType => {
            let g_spec = SubgroupSpec::CompactType;
            let mut in_plane = Probe::new("point_orbit_in_plane", MEMBERSHIP_TOL);
            let mut reach = Probe::new("point_orbit_reaches_plane", MEMBERSHIP_TOL);
            let mut hyp_in = Probe::new("hyperplane_orbit_in_plane", MEMBERSHIP_TOL);
            let mut hyp_reach = Probe::new("hyperplane_orbit_reaches_plane", MEMBERSHIP_TOL);
            let mut theta = Probe::new("cartan_involution_closed", MEMBERSHIP_TOL);
            let mut base = Probe::new("identity_reaches_e4", 0.0);
            base.record(off_line(&(GroupElement::identity().matrix() * unit(3)), 3), String::new);
            for _ in 0..samples {
                let g = random_element(rng, &g_spec);
                let v = g.matrix() * unit(3);
                in_plane.record(v[2].abs() / v.norm(), || format!("g={}", fmt_mat(g.matrix())));
                let t = cartan_involution(&g).expect("exp is invertible");
                let w = t.matrix() * unit(0);
                hyp_in.record(w[2].abs() / w.norm(), || format!("g={}", fmt_mat(g.matrix())));
                theta.record(membership_defect(&t, &g_spec), || {
                    format!("g={}", fmt_mat(g.matrix()))
                });

                let mut v = random_vec4(rng);
                v[2] = 0.0;
                let h = compact_sending(3, &v);
                let img = h.matrix() * unit(3);
                let d = (img - v).norm() / v.norm()
                    + membership_defect(&h, &g_spec)
                    + (h.matrix().determinant() - 1.0).abs();
                reach.record(d, || format!("v={v:?}"));

                let mut w = random_vec4(rng);
                w[2] = 0.0;
                let h = compact_sending(0, &w);
                let g = cartan_involution(&h).expect("constructed element is invertible");
                let img = cartan_involution(&g).unwrap().matrix() * unit(0);
                let d = (img - w).norm() / w.norm()
                    + membership_defect(&g, &g_spec)
                    + (g.matrix().determinant() - 1.0).abs();
                hyp_reach.record(d, || format!("w={w:?}"));
            }
            out.extend([base, in_plane, reach, hyp_in, hyp_reach, theta].map(Probe::finish));
        }
        SubgroupSpec::ScaleSymmetry => {
            let g_spec = SubgroupSpec::ScaleSymmetry;
            let h4 = g_spec.clone().intersect(SubgroupSpec::PointStabilizer(4));
            let mut phi_in = Probe::new("translations_in_group", MEMBERSHIP_TOL);
            let mut phi_hom = Probe::new("translations_homomorphic", 1e-12);
            let mut phi_reach = Probe::new("translations_reach_every_point", 1e-12);
            let mut hyp_in = Probe::new("hyperplane_orbit_in_line", MEMBERSHIP_TOL);
            let mut hyp_reach = Probe::new("hyperplane_orbit_reaches_line", MEMBERSHIP_TOL);
            let mut fiber = Probe::new("point_fiber_trivial", MEMBERSHIP_TOL);
            for _ in 0..samples {
                let a = random_point(rng);
                let b = random_point(rng);
                let pa = phi([a[0], a[1], a[2]]);
                let pb = phi([b[0], b[1], b[2]]);
                let pab = phi([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
                phi_in.record(membership_defect(&pa, &g_spec), || format!("a={a:?}"));
                phi_hom.record((pa.mul(&pb).matrix() - pab.matrix()).norm(), || {
                    format!("a={a:?} b={b:?}")
                });
                let img = projective_action(&pa, &Vector3::zeros()).expect("affine");
                phi_reach.record((img - a).norm(), || format!("a={a:?}"));

                let g = random_element(rng, &g_spec);
                let w = cartan_involution(&g).unwrap().matrix() * unit(0);
                let leak = (w[1].abs() + w[2].abs()) / w.norm();
                hyp_in.record(leak, || format!("g={}", fmt_mat(g.matrix())));

                let t: f64 = rng.gen_range(-1.0..=1.0);
                let mut m = Mat4::identity();
                m[(0, 3)] = -t;
                let g = GroupElement::unchecked(m);
                let w = cartan_involution(&g).unwrap().matrix() * unit(0);
                let d = (w - Vector4::new(1.0, 0.0, 0.0, t)).norm()
                    + membership_defect(&g, &g_spec);
                hyp_reach.record(d, || format!("t={t}"));

                let g = random_element(rng, &h4);
                let w = cartan_involution(&g).unwrap().matrix() * unit(0);
                // G∩H4 already fixes the hyperplane class, so its fiber is a point
                fiber.record(off_line(&w, 0), || format!("g={}", fmt_mat(g.matrix())));
            }
            out.extend([phi_in, phi_hom, phi_reach, hyp_in, hyp_reach, fiber].map(Probe::finish));
        }
        _ => {}
    }
    out.extend(action_probes(rng, samples));
    out
}

/// Sign elements sampled alongside exponentials, so that every coset of the
/// identity component is exercised.
fn sign_elements() -> [GroupElement; 4] {
    [GroupElement::identity(), m1(), m4(), m1().mul(&m4())]
}

fn decomposition_stats<R: Rng>(rng: &mut R, case: IntersectionCase, samples: usize) -> DecompositionStats {
    let spec = case.spec();
    let signs = sign_elements();
    let mut st = DecompositionStats {
        subgroup: case.label().to_string(),
        samples,
        max_residual: 0.0,
        max_defect: 0.0,
        sign_factors: BTreeMap::new(),
        failures: 0,
        witness: None,
    };
    for _ in 0..samples {
        let s = signs[rng.gen_range(0..signs.len())];
        let g = random_element(rng, &spec).mul(&s);
        match decompose_in_intersection(&g, &spec) {
            Ok(d) => {
                let rel = d.decomposition.residual / (1.0 + g.matrix().norm());
                st.max_residual = st.max_residual.max(rel);
                st.max_defect = st.max_defect.max(d.worst_defect);
                *st.sign_factors.entry(d.sign_label.to_string()).or_default() += 1;
                if !d.flags.all() {
                    st.failures += 1;
                    st.witness.get_or_insert_with(|| {
                        format!("g={} flags={:?}", fmt_mat(g.matrix()), d.flags)
                    });
                }
            }
            Err(e) => {
                st.failures += 1;
                st.witness
                    .get_or_insert_with(|| format!("g={}: {e}", fmt_mat(g.matrix())));
            }
        }
    }
    st
}

fn iwasawa_stats<R: Rng>(rng: &mut R, spec: &SubgroupSpec, samples: usize) -> DecompositionStats {
    let mut st = DecompositionStats {
        subgroup: spec.label(),
        samples,
        max_residual: 0.0,
        max_defect: 0.0,
        sign_factors: BTreeMap::new(),
        failures: 0,
        witness: None,
    };
    for _ in 0..samples {
        let g = random_element(rng, spec);
        let d = iwasawa_lower(&g).expect("exp is nonsingular");
        let rel = d.residual / (1.0 + g.matrix().norm());
        let k = d.k.matrix();
        let orth = (k.transpose() * k - Mat4::identity()).norm();
        st.max_residual = st.max_residual.max(rel);
        st.max_defect = st.max_defect.max(orth);
        if rel > RECONSTRUCTION_TOL || orth > MEMBERSHIP_TOL {
            st.failures += 1;
            st.witness.get_or_insert_with(|| format!("g={}", fmt_mat(g.matrix())));
        }
    }
    st
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FibrationReport {
    pub group: Group,
    pub seed: u64,
    pub samples: usize,
    pub dimensions: Vec<DimRow>,
    pub quotients: Vec<DimRow>,
    pub decompositions: Vec<DecompositionStats>,
    pub probes: Vec<ProbeResult>,
    pub pass: bool,
}

pub fn fibration_report(group: Group, seed: u64, samples: usize) -> FibrationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = group.spec();
    let specs = [
        g.clone(),
        g.clone().intersect(SubgroupSpec::PointStabilizer(4)),
        g.clone().intersect(SubgroupSpec::HyperplaneStabilizer(1)),
        g.clone().intersect(SubgroupSpec::h()),
    ];
    let dims: Vec<usize> = specs.iter().map(lie_algebra_dim).collect();
    let dimensions: Vec<DimRow> = specs
        .iter()
        .zip(&dims)
        .zip(group.expected_dims())
        .map(|((s, &dim), expected)| DimRow {
            space: s.label(),
            dim,
            expected,
            model: None,
        })
        .collect();
    let names = ["G/(G∩H4)", "G/(G∩Hbar1)", "G/(G∩H)", "(G∩H4)/(G∩H)", "(G∩Hbar1)/(G∩H)"];
    let quotient = [
        dims[0] - dims[1],
        dims[0] - dims[2],
        dims[0] - dims[3],
        dims[1] - dims[3],
        dims[2] - dims[3],
    ];
    let quotients = names
        .iter()
        .zip(quotient)
        .zip(group.models())
        .map(|((n, dim), (model, expected))| DimRow {
            space: n.to_string(),
            dim,
            expected,
            model: Some(model),
        })
        .collect::<Vec<_>>();

    let decompositions = match group {
        Group::Compact => IntersectionCase::ALL
            .iter()
            .map(|&c| decomposition_stats(&mut rng, c, samples))
            .collect(),
        _ => vec![iwasawa_stats(&mut rng, &g, samples)],
    };
    let probes = orbit_probe(&mut rng, &g, samples);
    let pass = dimensions.iter().chain(&quotients).all(|r| r.dim == r.expected)
        && decompositions.iter().all(|d| d.failures == 0)
        && probes.iter().all(|p| p.passed);
    FibrationReport {
        group,
        seed,
        samples,
        dimensions,
        quotients,
        decompositions,
        probes,
        pass,
    }
}
