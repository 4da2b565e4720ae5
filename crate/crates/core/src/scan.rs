//! Level-by-level enumeration of the common zeros of cubic forms over GF(p).
//!
//! Level `d` reports the points of P^2(GF(p^d)) whose minimal field of
//! definition is exactly GF(p^d), so every geometric point is seen once, at
//! the level of its residue field. Instead of testing all `q^2 + q + 1`
//! points, each affine line `x = c` is handled through the gcd of the
//! restricted forms in `y`, which is nonconstant only over base points.

use std::ops::ControlFlow;

use crate::finitefield::{build_field, lcm, Elem, FieldDesc};
use crate::forms::TernaryForm;
use crate::poly;

/// Bézout bound on the number of geometric common zeros of two coprime cubics.
pub(crate) const BEZOUT: usize = 9;

fn point_degree(ext: &FieldDesc, c: [Elem; 3]) -> u32 {
    c.iter().fold(1, |acc, &e| lcm(acc, ext.elem_degree(e)))
}

fn roots(ext: &FieldDesc, g: &[Elem]) -> Vec<Elem> {
    match poly::degree(g) {
        None | Some(0) => Vec::new(),
        Some(1) => {
            let inv = ext.inv(g[1]).unwrap();
            vec![ext.neg(ext.mul(g[0], inv))]
        }
        Some(_) => ext.elements().filter(|&y| poly::eval(ext, g, y) == 0).collect(),
    }
}

fn joint_gcd(ext: &FieldDesc, polys: impl Iterator<Item = [Elem; 4]>) -> poly::UniPoly {
    let mut acc: poly::UniPoly = Vec::new();
    for p in polys {
        acc = poly::gcd(ext, &acc, &p);
        if poly::degree(&acc) == Some(0) {
            break;
        }
    }
    acc
}

/// Calls `visit` with every common zero of `forms` of minimal degree exactly
/// `d`, in increasing order of the normalized encoding. The forms must be
/// over a prime field and have no common factor.
pub(crate) fn for_each_at_level<B>(
    forms: &[TernaryForm],
    d: u32,
    mut visit: impl FnMut(&FieldDesc, [Elem; 3]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let p = forms[0].field().characteristic();
    let ext = build_field(p, d).expect("extension degree within range");
    let mut emit = |c: [Elem; 3]| {
        if point_degree(&ext, c) == d {
            visit(&ext, c)
        } else {
            ControlFlow::Continue(())
        }
    };
    // encodings sort [x:y:1] and [x:1:0] by x first, then [1:0:0] lands in place
    for x in ext.elements() {
        let g = joint_gcd(&ext, forms.iter().map(|f| f.y_poly_at(&ext, x)));
        let mut ys = if g.is_empty() {
            // a whole line of zeros: impossible without a common factor
            Vec::new()
        } else {
            roots(&ext, &g)
        };
        ys.sort_unstable();
        let at_inf = x == 1 && d == 1 && forms.iter().all(|f| f.coeffs()[0] == 0);
        let inf_x = forms.iter().all(|f| {
            let l = f.line_at_infinity();
            poly::eval(&ext, &l, x) == 0
        });
        let mut pts: Vec<[Elem; 3]> = ys.into_iter().map(|y| [x, y, 1]).collect();
        if inf_x {
            pts.push([x, 1, 0]);
        }
        if at_inf {
            pts.push([1, 0, 0]);
        }
        pts.sort_unstable();
        for c in pts {
            emit(c)?;
        }
    }
    ControlFlow::Continue(())
}

/// Collects the common zeros level by level for `d = 1..=bound`. With
/// `prune`, stops once no further closed point fits under the Bézout bound.
pub(crate) fn collect_levels(forms: &[TernaryForm], bound: u32, prune: bool) -> Vec<(u32, FieldDesc, Vec<[Elem; 3]>)> {
    let mut out = Vec::new();
    let mut found = 0usize;
    for d in 1..=bound {
        if prune && found + d as usize > BEZOUT {
            break;
        }
        let mut pts = Vec::new();
        let mut field = None;
        let _ = for_each_at_level::<()>(forms, d, |ext, c| {
            field.get_or_insert_with(|| ext.clone());
            pts.push(c);
            ControlFlow::Continue(())
        });
        found += pts.len();
        let field = field.unwrap_or_else(|| build_field(forms[0].field().characteristic(), d).unwrap());
        out.push((d, field, pts));
    }
    out
}
