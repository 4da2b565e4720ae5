//! Linear systems of plane cubics, their planes and pencils, and base loci.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use thiserror::Error;

use crate::finitefield::{Elem, FieldDesc, FieldError, ProjPoint};
use crate::forms::{combine_raw, common_factor_all, has_common_factor, FormError, IntegerCubic, TernaryForm, MONOMIALS};
use crate::linalg;
use crate::scan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinsysError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("a configuration needs 1 to 7 points, got {0}")]
    PointCount(usize),
    #[error("points {0} and {1} of the configuration coincide")]
    DuplicatePoint(usize, usize),
    #[error("vector of length {got} does not match the system dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("base loci are computed over prime fields only, got {0}")]
    NotPrimeField(String),
    #[error("need at least two forms, got {0}")]
    TooFewForms(usize),
    #[error("basis forms are linearly dependent")]
    DependentBasis,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The two point configurations used for the datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// `[1:0:0], [0:1:0], [0:0:1], [1:1:1], [2:3:1]`
    FivePoint,
    /// The five points above together with `[3:2:1]`.
    SixPoint,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::FivePoint => "five",
            Case::SixPoint => "six",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            Case::FivePoint => 5,
            Case::SixPoint => 4,
        }
    }

    pub fn integer_points(self) -> Vec<[i64; 3]> {
        let mut pts = vec![[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [2, 3, 1]];
        if self == Case::SixPoint {
            pts.push([3, 2, 1]);
        }
        pts
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Case, String> {
        match s {
            "five" | "five_point" | "5" => Ok(Case::FivePoint),
            "six" | "six_point" | "6" => Ok(Case::SixPoint),
            _ => Err(format!("unknown case {s:?} (expected five or six)")),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn cubic(text: &str) -> IntegerCubic {
    text.parse().expect("fixture cubic parses")
}

/// Fixture basis of the linear system, with integer coefficients.
pub fn fixture_lambda(case: Case) -> Vec<IntegerCubic> {
    let texts: &[&str] = match case {
        Case::FivePoint => &["x^2*y + y^2*z", "x*y^2 + y^2*z", "x^2*z + y^2*z", "x*y*z", "x*z^2 + y*z^2"],
        Case::SixPoint => &[
            "x^2*y + y^2*z + x*z^2 + y*z^2",
            "x*y^2 - y^2*z",
            "x^2*z + y^2*z",
            "x*y*z + x*z^2 + y*z^2",
        ],
    };
    texts.iter().map(|t| cubic(t)).collect()
}

/// Integer cubics generating the ideal of the configuration in degree 3.
/// They pass through all of its points modulo 7 only; over the integers
/// `[1:1:1]` and `[2:3:1]` are missed by some of them.
pub fn integer_generators(case: Case) -> Vec<IntegerCubic> {
    let mut gens = vec![
        cubic("x^2*y + 3*y^2*z - x*z^2 - 3*y*z^2"),
        cubic("x*y^2 + 3*y^2*z - 2*x*z^2 - 2*y*z^2"),
        cubic("x^2*z - y^2*z + 2*x*z^2 - 2*y*z^2"),
        cubic("x*y*z + 3*x*z^2 + 3*y*z^2"),
    ];
    if case == Case::FivePoint {
        // z*(x - y)*(y - x - z)
        gens.push(cubic("-x^2*z + 2*x*y*z - y^2*z - x*z^2 + y*z^2"));
    }
    gens
}

/// Distinct points of P^2 over a finite field, at most seven of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    points: Vec<ProjPoint>,
}

impl PointConfig {
    pub fn new(points: Vec<ProjPoint>) -> Result<PointConfig, LinsysError> {
        if points.is_empty() || points.len() > 7 {
            return Err(LinsysError::PointCount(points.len()));
        }
        for i in 0..points.len() {
            points[i].field().ensure_same(points[0].field())?;
            if let Some(j) = (0..i).find(|&j| points[j] == points[i]) {
                return Err(LinsysError::DuplicatePoint(j, i));
            }
        }
        Ok(PointConfig { points })
    }

    pub fn from_ints(field: &FieldDesc, coords: &[[i64; 3]]) -> Result<PointConfig, LinsysError> {
        let pts = coords
            .iter()
            .map(|&c| ProjPoint::from_ints(field, c))
            .collect::<Result<Vec<_>, _>>()?;
        PointConfig::new(pts)
    }

    /// One point per line written `a:b:c` with integer entries; blank lines
    /// and `#` comments are skipped.
    pub fn parse(field: &FieldDesc, text: &str) -> Result<PointConfig, LinsysError> {
        let mut coords = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| LinsysError::Parse { line: i + 1, msg };
            let parts: Vec<&str> = line.trim_matches(|c| c == '[' || c == ']').split(':').collect();
            if parts.len() != 3 {
                return Err(err(format!("expected a:b:c, got {line:?}")));
            }
            let mut c = [0i64; 3];
            for (slot, part) in c.iter_mut().zip(&parts) {
                *slot = part.trim().parse().map_err(|_| err(format!("bad integer {part:?}")))?;
            }
            ProjPoint::from_ints(field, c).map_err(|e| err(e.to_string()))?;
            coords.push(c);
        }
        PointConfig::from_ints(field, &coords)
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn field(&self) -> &FieldDesc {
        self.points[0].field()
    }

    pub fn delta(&self) -> usize {
        9 - self.points.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    ComputedFromPoints,
    Fixture(Case),
    ReducedFromIntegerGenerators(Case),
}

/// A linear system of cubics given by a basis of linearly independent forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicSystem {
    field: FieldDesc,
    basis: Vec<TernaryForm>,
    provenance: Provenance,
}

impl CubicSystem {
    /// Takes the given forms as the basis, which must be independent.
    pub fn from_forms(field: &FieldDesc, basis: Vec<TernaryForm>, provenance: Provenance) -> Result<CubicSystem, LinsysError> {
        for b in &basis {
            field.ensure_same(b.field())?;
        }
        let rows: Vec<Vec<Elem>> = basis.iter().map(|b| b.coeffs().to_vec()).collect();
        if linalg::rank(field, &rows) != basis.len() {
            return Err(LinsysError::DependentBasis);
        }
        Ok(CubicSystem {
            field: field.clone(),
            basis,
            provenance,
        })
    }

    fn from_rows(field: &FieldDesc, rows: linalg::Matrix, provenance: Provenance) -> CubicSystem {
        let basis = rows
            .into_iter()
            .map(|r| TernaryForm::new(field, r.try_into().unwrap()).unwrap())
            .collect();
        CubicSystem {
            field: field.clone(),
            basis,
            provenance,
        }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn basis(&self) -> &[TernaryForm] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Canonical RREF basis of the span.
    pub fn span_rref(&self) -> linalg::Matrix {
        let rows: Vec<Vec<Elem>> = self.basis.iter().map(|b| b.coeffs().to_vec()).collect();
        linalg::row_space(&self.field, &rows)
    }

    pub fn same_span(&self, other: &CubicSystem) -> bool {
        self.field == other.field && self.span_rref() == other.span_rref()
    }

    pub fn combine(&self, coeffs: &[Elem]) -> Result<TernaryForm, LinsysError> {
        self.check_len(coeffs.len())?;
        Ok(combine_raw(&self.field, &self.basis, coeffs))
    }

    fn check_len(&self, got: usize) -> Result<(), LinsysError> {
        if got != self.dim() {
            return Err(LinsysError::LengthMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// Cubics through all points of `cfg`, as a canonical RREF basis.
pub fn vanishing_cubics(cfg: &PointConfig) -> CubicSystem {
    let field = cfg.field();
    let rows: Vec<Vec<Elem>> = cfg
        .points()
        .iter()
        .map(|pt| {
            MONOMIALS
                .iter()
                .map(|&[a, b, c]| {
                    let [x, y, z] = pt.coords();
                    field.mul(field.mul(field.pow(x, a as u64), field.pow(y, b as u64)), field.pow(z, c as u64))
                })
                .collect()
        })
        .collect();
    CubicSystem::from_rows(field, linalg::kernel(field, &rows, 10), Provenance::ComputedFromPoints)
}

/// The fixture basis reduced into `field`, in its listed order.
pub fn fixture_lambda_over(case: Case, field: &FieldDesc) -> Result<CubicSystem, LinsysError> {
    let basis = fixture_lambda(case).iter().map(|c| c.reduce(field)).collect();
    CubicSystem::from_forms(field, basis, Provenance::Fixture(case))
}

/// Row space of the integer generators reduced mod `p`, in RREF.
pub fn reduce_integer_generators(case: Case, p: u64) -> Result<CubicSystem, LinsysError> {
    let field = FieldDesc::prime(p)?;
    let rows: Vec<Vec<Elem>> = integer_generators(case)
        .iter()
        .map(|g| g.reduce(&field).coeffs().to_vec())
        .collect();
    Ok(CubicSystem::from_rows(
        &field,
        linalg::row_space(&field, &rows),
        Provenance::ReducedFromIntegerGenerators(case),
    ))
}

/// Why a triple does not define a plane of the enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    RankDeficient,
    CommonFactor,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::RankDeficient => "vectors have rank < 3",
            Rejection::CommonFactor => "the three cubics share a common factor",
        })
    }
}

/// A plane spanned by three cubics of a system, defining a rational map.
#[derive(Clone, Debug)]
pub struct Plane {
    system: CubicSystem,
    vectors: [Vec<Elem>; 3],
    forms: [TernaryForm; 3],
}

/// Builds the plane spanned by `v, u, t`, or says why it is rejected.
pub fn make_plane(
    sys: &CubicSystem,
    v: &[Elem],
    u: &[Elem],
    t: &[Elem],
) -> Result<Result<Plane, Rejection>, LinsysError> {
    let forms = [sys.combine(v)?, sys.combine(u)?, sys.combine(t)?];
    let vectors = [v.to_vec(), u.to_vec(), t.to_vec()];
    if linalg::rank(&sys.field, &vectors) < 3 {
        return Ok(Err(Rejection::RankDeficient));
    }
    if common_factor_all(&forms)? {
        return Ok(Err(Rejection::CommonFactor));
    }
    Ok(Ok(Plane {
        system: sys.clone(),
        vectors,
        forms,
    }))
}

impl Plane {
    pub fn system(&self) -> &CubicSystem {
        &self.system
    }

    pub fn field(&self) -> &FieldDesc {
        &self.system.field
    }

    pub fn vectors(&self) -> &[Vec<Elem>; 3] {
        &self.vectors
    }

    pub fn forms(&self) -> &[TernaryForm; 3] {
        &self.forms
    }

    /// RREF of the forms' coefficient vectors; equal exactly for equal planes.
    pub fn key(&self) -> linalg::Matrix {
        let rows: Vec<Vec<Elem>> = self.forms.iter().map(|f| f.coeffs().to_vec()).collect();
        linalg::row_space(self.field(), &rows)
    }

    /// The forms `sum a_i f_i` and `sum b_i f_i`.
    pub fn pencil(&self, a: [Elem; 3], b: [Elem; 3]) -> PencilSpec {
        let f = self.field();
        PencilSpec {
            a,
            b,
            forms: [combine_raw(f, &self.forms, &a), combine_raw(f, &self.forms, &b)],
        }
    }
}

/// A pencil inside a plane, in plane coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilSpec {
    pub a: [Elem; 3],
    pub b: [Elem; 3],
    pub forms: [TernaryForm; 2],
}

impl PencilSpec {
    pub fn is_independent(&self, field: &FieldDesc) -> bool {
        linalg::rank(field, &[self.a.to_vec(), self.b.to_vec()]) == 2
    }
}

/// Geometric common zeros of a set of forms, grouped by minimal degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseLocus {
    pub positive_dimensional: bool,
    pub points_by_degree: BTreeMap<u32, Vec<ProjPoint>>,
    pub scan_bound: u32,
}

impl BaseLocus {
    pub fn geometric_count(&self) -> usize {
        self.points_by_degree.values().map(Vec::len).sum()
    }

    pub fn contains(&self, pt: &ProjPoint) -> bool {
        self.points_by_degree
            .get(&pt.field().degree())
            .is_some_and(|pts| pts.binary_search(pt).is_ok())
    }
}

pub(crate) fn check_scannable(forms: &[TernaryForm]) -> Result<(), LinsysError> {
    if forms.len() < 2 {
        return Err(LinsysError::TooFewForms(forms.len()));
    }
    let field = forms[0].field();
    for f in forms {
        field.ensure_same(f.field())?;
    }
    if !field.is_prime_field() {
        return Err(LinsysError::NotPrimeField(field.to_string()));
    }
    Ok(())
}

/// Base locus scanned over GF(p^d) for `d = 1..=scan_bound`. The Bézout
/// stopping rule is used whenever two of the forms are coprime.
pub fn base_locus(forms: &[TernaryForm], scan_bound: u32) -> Result<BaseLocus, LinsysError> {
    check_scannable(forms)?;
    let mut prune = false;
    'pairs: for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if !forms[i].is_zero() && !forms[j].is_zero() && !has_common_factor(&forms[i], &forms[j])? {
                prune = true;
                break 'pairs;
            }
        }
    }
    base_locus_with(forms, scan_bound, prune)
}

/// As [`base_locus`]; `prune` stops the scan once the points found leave no
/// room under the Bézout bound for a further closed point. That shortcut is
/// only valid when two of the forms are coprime.
pub fn base_locus_with(forms: &[TernaryForm], scan_bound: u32, prune: bool) -> Result<BaseLocus, LinsysError> {
    check_scannable(forms)?;
    if common_factor_all(forms)? {
        return Ok(BaseLocus {
            positive_dimensional: true,
            points_by_degree: BTreeMap::new(),
            scan_bound,
        });
    }
    let mut points_by_degree = BTreeMap::new();
    for (d, ext, pts) in scan::collect_levels(forms, scan_bound, prune) {
        if !pts.is_empty() {
            let pts = pts.into_iter().map(|c| ProjPoint::new(&ext, c).unwrap()).collect();
            points_by_degree.insert(d, pts);
        }
    }
    Ok(BaseLocus {
        positive_dimensional: false,
        points_by_degree,
        scan_bound,
    })
}

/// Visits the common zeros of coprime forms level by level until `visit`
/// breaks; used for early-exit scans.
pub(crate) fn visit_zeros<B>(
    forms: &[TernaryForm],
    scan_bound: u32,
    prune: bool,
    mut visit: impl FnMut(&FieldDesc, [Elem; 3]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let mut found = 0usize;
    for d in 1..=scan_bound {
        if prune && found + d as usize > scan::BEZOUT {
            break;
        }
        scan::for_each_at_level(forms, d, |ext, c| {
            found += 1;
            visit(ext, c)
        })?;
    }
    ControlFlow::Continue(())
}
