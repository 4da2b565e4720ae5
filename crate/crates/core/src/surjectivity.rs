//! The unruly-pencil criterion for surjectivity, plane labels, a forward
//! image oracle, and the search for unruly pencils through seven points.
//!
//! A pencil `ℓ ⊂ Π` is unruly when its geometric base locus equals that of
//! `Π`; since `Bs(Π) ⊆ Bs(ℓ)` always holds, this amounts to every common zero
//! of the pencil being a zero of all three plane forms. The target point
//! annihilated by `ℓ` then has an empty fiber, so `f` is not surjective.

use std::fmt;
use std::ops::ControlFlow;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::finitefield::{build_field, enumerate_p2, normalize, Elem, FieldDesc, ProjPoint};
use crate::forms::has_common_factor;
use crate::linalg;
use crate::linsys::{self, check_scannable, make_plane, vanishing_cubics, LinsysError, PencilSpec, Plane, PointConfig, Rejection};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurjError {
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error("the cubics through the points form a system of dimension {0}, not 3")]
    SpecialPosition(usize),
    #[error("the system does not define a plane: {0}")]
    Rejected(Rejection),
    #[error("no configuration in general position found after {0} attempts")]
    SamplingFailed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PencilStatus {
    Unruly,
    NotUnruly,
    PositiveDimensional,
}

impl fmt::Display for PencilStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PencilStatus::Unruly => "unruly",
            PencilStatus::NotUnruly => "not unruly",
            PencilStatus::PositiveDimensional => "positive-dimensional",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnrulyVerdict {
    pub status: PencilStatus,
    /// A base point of the pencil outside `Bs(Π)`, present iff not unruly.
    pub witness: Option<ProjPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityLabel {
    pub value: u8,
    pub unruly_pencils: Vec<PencilSpec>,
}

/// One basis `(a, b)` for each GF(p)-rational pencil of a plane: the RREF
/// annihilator of each dual point, in the order of [`enumerate_p2`].
pub fn distinct_pencils(field: &FieldDesc) -> Vec<(ProjPoint, [Elem; 3], [Elem; 3])> {
    enumerate_p2(field)
        .into_iter()
        .map(|t| {
            let k = linalg::kernel(field, &[t.coords().to_vec()], 3);
            let (a, b) = (k[0].clone().try_into().unwrap(), k[1].clone().try_into().unwrap());
            (t, a, b)
        })
        .collect()
}

fn plane_vanishes(plane: &Plane, ext: &FieldDesc, c: [Elem; 3]) -> bool {
    plane.forms().iter().all(|f| f.eval_raw(ext, c) == 0)
}

/// Decides whether the pencil spanned by `a, b` in plane coordinates is
/// unruly, scanning base points over GF(p^d) for `d = 1..=scan_bound`.
pub fn test_pencil(plane: &Plane, a: [Elem; 3], b: [Elem; 3], scan_bound: u32) -> Result<UnrulyVerdict, SurjError> {
    test_pencil_with(plane, a, b, scan_bound, true)
}

/// As [`test_pencil`]; `prune` enables the Bézout stopping rule.
pub fn test_pencil_with(
    plane: &Plane,
    a: [Elem; 3],
    b: [Elem; 3],
    scan_bound: u32,
    prune: bool,
) -> Result<UnrulyVerdict, SurjError> {
    let pencil = plane.pencil(a, b);
    check_scannable(plane.forms())?;
    let positive = UnrulyVerdict {
        status: PencilStatus::PositiveDimensional,
        witness: None,
    };
    if !pencil.is_independent(plane.field()) {
        return Ok(positive);
    }
    if has_common_factor(&pencil.forms[0], &pencil.forms[1]).map_err(LinsysError::from)? {
        return Ok(positive);
    }
    let found = linsys::visit_zeros(&pencil.forms, scan_bound, prune, |ext, c| {
        if plane_vanishes(plane, ext, c) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(ProjPoint::new(ext, c).unwrap())
        }
    });
    Ok(match found {
        ControlFlow::Break(w) => UnrulyVerdict {
            status: PencilStatus::NotUnruly,
            witness: Some(w),
        },
        ControlFlow::Continue(()) => UnrulyVerdict {
            status: PencilStatus::Unruly,
            witness: None,
        },
    })
}

/// Label 0 when the plane contains an unruly GF(p)-rational pencil, 1
/// otherwise. Unruly pencils are reported in the order of [`distinct_pencils`].
pub fn label_plane(plane: &Plane, scan_bound: u32) -> Result<SurjectivityLabel, SurjError> {
    let mut unruly = Vec::new();
    for (_, a, b) in distinct_pencils(plane.field()) {
        if test_pencil(plane, a, b, scan_bound)?.status == PencilStatus::Unruly {
            unruly.push(plane.pencil(a, b));
        }
    }
    Ok(SurjectivityLabel {
        value: u8::from(unruly.is_empty()),
        unruly_pencils: unruly,
    })
}

/// Targets in P^2(GF(p)) with no preimage outside `Bs(Π)` among the source
/// points over GF(p^d), `d <= source_bound`. A target whose annihilating
/// pencil has a fixed component counts as covered.
pub fn forward_oracle(plane: &Plane, source_bound: u32) -> Result<Vec<ProjPoint>, SurjError> {
    let field = plane.field();
    check_scannable(plane.forms())?;
    let p = field.characteristic();
    let pencils = distinct_pencils(field);
    let targets: Vec<ProjPoint> = pencils.iter().map(|(t, _, _)| t.clone()).collect();
    let mut covered: Vec<bool> = pencils
        .iter()
        .map(|(_, a, b)| {
            let pencil = plane.pencil(*a, *b);
            has_common_factor(&pencil.forms[0], &pencil.forms[1]).map_err(LinsysError::from)
        })
        .collect::<Result<_, _>>()?;
    let mut remaining = covered.iter().filter(|c| !**c).count();
    let forms = plane.forms();
    for d in 1..=source_bound {
        if remaining == 0 {
            break;
        }
        let ext = build_field(p, d).map_err(LinsysError::from)?;
        let mut visit = |c: [Elem; 3]| {
            let img = [0, 1, 2].map(|i| forms[i].eval_raw(&ext, c));
            let Some(n) = normalize(&ext, img) else {
                return false;
            };
            if n.iter().all(|&e| e < p) {
                let idx = targets.binary_search_by(|t| t.coords().cmp(&n)).unwrap();
                if !covered[idx] {
                    covered[idx] = true;
                    remaining -= 1;
                }
            }
            remaining == 0
        };
        let q = ext.order();
        let mut done = false;
        for x in 0..q {
            for y in 0..q {
                done |= visit([x, y, 1]);
            }
            done |= visit([x, 1, 0]);
            if done {
                break;
            }
        }
        if !done {
            visit([1, 0, 0]);
        }
    }
    Ok(targets
        .into_iter()
        .zip(covered)
        .filter(|(_, c)| !c)
        .map(|(t, _)| t)
        .collect())
}

/// Treats the net of cubics through seven points as the plane and returns
/// the first unruly pencil, if any.
pub fn find_unruly_seven_points(cfg: &PointConfig, scan_bound: u32) -> Result<Option<PencilSpec>, SurjError> {
    let sys = vanishing_cubics(cfg);
    if sys.dim() != 3 {
        return Err(SurjError::SpecialPosition(sys.dim()));
    }
    let plane = make_plane(&sys, &[1, 0, 0], &[0, 1, 0], &[0, 0, 1])?.map_err(SurjError::Rejected)?;
    for (_, a, b) in distinct_pencils(plane.field()) {
        if test_pencil(&plane, a, b, scan_bound)?.status == PencilStatus::Unruly {
            return Ok(Some(plane.pencil(a, b)));
        }
    }
    Ok(None)
}

fn collinear(f: &FieldDesc, pts: [&ProjPoint; 3]) -> bool {
    let rows: Vec<Vec<Elem>> = pts.iter().map(|p| p.coords().to_vec()).collect();
    linalg::rank(f, &rows) < 3
}

fn conic_row(f: &FieldDesc, p: &ProjPoint) -> Vec<Elem> {
    let [x, y, z] = p.coords();
    vec![f.mul(x, x), f.mul(x, y), f.mul(x, z), f.mul(y, y), f.mul(y, z), f.mul(z, z)]
}

/// Whether no three points are collinear and no six lie on a conic.
pub fn in_general_position(cfg: &PointConfig) -> bool {
    let f = cfg.field();
    let pts = cfg.points();
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(f, [&pts[i], &pts[j], &pts[k]]) {
                    return false;
                }
            }
        }
    }
    if n >= 6 {
        for skip in 0..n {
            let rows: Vec<Vec<Elem>> = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| n == 6 || *i != skip)
                .map(|(_, p)| conic_row(f, p))
                .collect();
            if linalg::rank(f, &rows) < 6 {
                return false;
            }
            if n == 6 {
                break;
            }
        }
    }
    true
}

/// Rejection-samples seven GF(p)-points in general position from a seeded
/// ChaCha8 stream.
pub fn sample_seven_points(field: &FieldDesc, seed: u64, max_attempts: usize) -> Result<PointConfig, SurjError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = enumerate_p2(field);
    for _ in 0..max_attempts {
        let mut pts: Vec<ProjPoint> = Vec::with_capacity(7);
        while pts.len() < 7 {
            let cand = &all[rng.gen_range(0..all.len())];
            if !pts.contains(cand) {
                pts.push(cand.clone());
            }
        }
        let cfg = PointConfig::new(pts)?;
        if in_general_position(&cfg) && vanishing_cubics(&cfg).dim() == 3 {
            return Ok(cfg);
        }
    }
    Err(SurjError::SamplingFailed(max_attempts))
}

/// Pencil forms of a pencil in readable form, for reports.
pub fn describe_pencil(p: &PencilSpec) -> String {
    let show = |v: &[Elem; 3]| format!("({}, {}, {})", v[0], v[1], v[2]);
    format!("a = {}, b = {}: <{}, {}>", show(&p.a), show(&p.b), p.forms[0], p.forms[1])
}
