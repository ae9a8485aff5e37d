//! Grid-rasterized bounded open sets and their domain algebra.
//!
//! A [`GridDomain`] is a boolean interior mask over a uniform lattice of cell
//! centers; a cell belongs to the set iff its center does. All set operations
//! (thickening, contraction, difference) act at cell-center resolution with
//! strict inequalities, and comparisons between domains require bitwise equal
//! grid geometry.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::lattice::{self, Connectivity, Lattice, UNREACHABLE};

#[derive(Clone, Debug)]
pub struct GridDomain {
    lat: Lattice<2>,
    interior: Vec<bool>,
    count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphDir {
    Dilate,
    Erode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMode {
    /// Distance to the cells of the set itself (zero on the set).
    ToSet,
    /// Distance to the complement; the interior distance-to-boundary.
    ToComplement,
}

impl GridDomain {
    /// Builds a domain from an explicit mask. The outermost ring must be
    /// empty: sets are strictly interior to the grid box.
    pub fn from_mask(lat: Lattice<2>, interior: Vec<bool>) -> Result<Self> {
        if interior.len() != lat.len() {
            return Err(Error::argument("mask length does not match grid dims"));
        }
        for (idx, &on) in interior.iter().enumerate() {
            if on && lat.on_ring(lat.coords(idx)) {
                return Err(Error::geometry(
                    "set touches the outer ring of the grid box; enlarge the box",
                ));
            }
        }
        let count = interior.iter().filter(|&&b| b).count();
        Ok(GridDomain { lat, interior, count })
    }

    /// Rasterizes a point predicate: a cell is interior iff its center
    /// satisfies it. Ring cells are checked, not silently cleared.
    pub fn from_predicate(lat: Lattice<2>, inside: impl Fn(f64, f64) -> bool) -> Result<Self> {
        let mut mask = vec![false; lat.len()];
        for (idx, m) in mask.iter_mut().enumerate() {
            let p = lat.center(lat.coords(idx));
            *m = inside(p[0], p[1]);
        }
        Self::from_mask(lat, mask)
    }

    pub fn lattice(&self) -> &Lattice<2> {
        &self.lat
    }

    pub fn h(&self) -> f64 {
        self.lat.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.lat.dims[0], self.lat.dims[1])
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.lat.origin[0], self.lat.origin[1])
    }

    pub fn interior(&self) -> &[bool] {
        &self.interior
    }

    pub fn cell_count(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Total measure of the cells, `count * h^2`.
    pub fn area(&self) -> f64 {
        self.count as f64 * self.lat.h * self.lat.h
    }

    pub fn same_grid(&self, other: &GridDomain) -> bool {
        self.lat.same_geometry(&other.lat)
    }

    fn require_same_grid(&self, other: &GridDomain) -> Result<()> {
        if !self.same_grid(other) {
            return Err(Error::geometry(
                "domains live on different grids (spacing, origin or dims differ)",
            ));
        }
        Ok(())
    }

    /// Cellwise `self` subset of `other`; grids must match.
    pub fn is_subset_of(&self, other: &GridDomain) -> Result<bool> {
        self.require_same_grid(other)?;
        Ok(self
            .interior
            .iter()
            .zip(&other.interior)
            .all(|(&a, &b)| !a || b))
    }

    pub fn intersect(&self, other: &GridDomain) -> Result<GridDomain> {
        self.require_same_grid(other)?;
        let mask: Vec<bool> = self
            .interior
            .iter()
            .zip(&other.interior)
            .map(|(&a, &b)| a && b)
            .collect();
        GridDomain::from_mask(self.lat.clone(), mask)
    }

    pub fn union(&self, other: &GridDomain) -> Result<GridDomain> {
        self.require_same_grid(other)?;
        let mask: Vec<bool> = self
            .interior
            .iter()
            .zip(&other.interior)
            .map(|(&a, &b)| a || b)
            .collect();
        GridDomain::from_mask(self.lat.clone(), mask)
    }

    pub fn mask_eq(&self, other: &GridDomain) -> bool {
        self.same_grid(other) && self.interior == other.interior
    }

    /// Exact Euclidean distance transform from every cell center to the
    /// nearest cell center of the target set.
    pub fn distance_transform(&self, mode: DistanceMode) -> DistanceField {
        let target: Vec<bool> = match mode {
            DistanceMode::ToSet => self.interior.clone(),
            DistanceMode::ToComplement => self.interior.iter().map(|&b| !b).collect(),
        };
        let empty_target = !target.iter().any(|&b| b);
        let d_sq = lattice::edt_sq(&self.lat, &target);
        DistanceField { lat: self.lat.clone(), d_sq, empty_target }
    }

    /// Thickening / contraction by `eps` at cell-center resolution (strict
    /// inequalities; `eps = 0` is the identity).
    pub fn morph(&self, eps: f64, dir: MorphDir) -> Result<GridDomain> {
        if !(eps >= 0.0) {
            return Err(Error::argument(format!("morph radius must be >= 0, got {eps}")));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let cutoff = (eps / self.lat.h) * (eps / self.lat.h);
        match dir {
            MorphDir::Dilate => {
                let df = self.distance_transform(DistanceMode::ToSet);
                let mask: Vec<bool> = df.d_sq.iter().map(|&d| (d as f64) < cutoff).collect();
                GridDomain::from_mask(self.lat.clone(), mask).map_err(|_| {
                    Error::geometry(format!(
                        "dilation by {eps} reaches the outer ring; re-box the scenario"
                    ))
                })
            }
            MorphDir::Erode => {
                let df = self.distance_transform(DistanceMode::ToComplement);
                let mask: Vec<bool> = self
                    .interior
                    .iter()
                    .zip(&df.d_sq)
                    .map(|(&inside, &d)| inside && (d as f64) > cutoff)
                    .collect();
                GridDomain::from_mask(self.lat.clone(), mask)
            }
        }
    }

    pub fn dilate(&self, eps: f64) -> Result<GridDomain> {
        self.morph(eps, MorphDir::Dilate)
    }

    pub fn erode(&self, eps: f64) -> Result<GridDomain> {
        self.morph(eps, MorphDir::Erode)
    }

    /// Cells of `outer` not in the discrete closure of `inner` (the mask plus
    /// its 8-neighborhood). May be empty or disconnected.
    pub fn set_difference_closed(outer: &GridDomain, inner: &GridDomain) -> Result<GridDomain> {
        outer.require_same_grid(inner)?;
        if !inner.is_subset_of(outer)? {
            return Err(Error::geometry("inner domain is not contained in outer"));
        }
        let closure = lattice::dilate_one_cell(&inner.lat, &inner.interior);
        let mask: Vec<bool> = outer
            .interior
            .iter()
            .zip(&closure)
            .map(|(&o, &c)| o && !c)
            .collect();
        GridDomain::from_mask(outer.lat.clone(), mask)
    }

    /// Radius of the largest ball contained in the set, to within one cell.
    pub fn inradius(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let df = self.distance_transform(DistanceMode::ToComplement);
        let best = df.d_sq.iter().copied().max().unwrap();
        Ok((best as f64).sqrt() * self.lat.h)
    }

    /// Cell of maximal distance to the complement (first in scan order).
    pub fn inscribed_center(&self) -> Result<[usize; 2]> {
        if self.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let df = self.distance_transform(DistanceMode::ToComplement);
        let (idx, _) = df
            .d_sq
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
            .unwrap();
        Ok(self.lat.coords(idx))
    }

    /// Number of 4-connected components of the set.
    pub fn component_count(&self) -> usize {
        lattice::component_count(&self.lat, &self.interior, Connectivity::Axis)
    }

    /// Number of 8-connected components of the complement (detects holes).
    pub fn complement_component_count(&self) -> usize {
        let comp: Vec<bool> = self.interior.iter().map(|&b| !b).collect();
        lattice::component_count(&self.lat, &comp, Connectivity::Full)
    }

    /// Interior cells adjacent (4-connectivity) to a non-interior cell.
    pub fn boundary_cell_count(&self) -> usize {
        let mut n = 0;
        for idx in 0..self.interior.len() {
            if !self.interior[idx] {
                continue;
            }
            let c = self.lat.coords(idx);
            let nbs = [
                [c[0].wrapping_sub(1), c[1]],
                [c[0] + 1, c[1]],
                [c[0], c[1].wrapping_sub(1)],
                [c[0], c[1] + 1],
            ];
            if nbs.iter().any(|&nc| {
                nc[0] >= self.lat.dims[0]
                    || nc[1] >= self.lat.dims[1]
                    || !self.interior[self.lat.index(nc)]
            }) {
                n += 1;
            }
        }
        n
    }

    /// Default rasterization-jitter allowance for the convexity test:
    /// proportional to the discrete boundary length.
    pub fn default_convexity_tol(&self) -> usize {
        (0.02 * self.boundary_cell_count() as f64).ceil() as usize
    }

    /// True iff the rasterized convex hull of the interior cell centers
    /// differs from the mask by at most `tol_cells` cells.
    pub fn is_convex(&self, tol_cells: Option<usize>) -> Result<bool> {
        if self.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let tol = tol_cells.unwrap_or_else(|| self.default_convexity_tol());
        let hull_cells = self.convex_hull_cell_count();
        Ok(hull_cells - self.count <= tol)
    }

    /// Number of lattice cells inside the convex hull of the mask (exact
    /// integer arithmetic; the mask is always a subset of this raster).
    fn convex_hull_cell_count(&self) -> usize {
        // Per-row extreme cells suffice to generate the hull.
        let (nx, ny) = self.dims();
        let mut pts: Vec<[i64; 2]> = Vec::new();
        for iy in 0..ny {
            let mut lo = None;
            let mut hi = None;
            for ix in 0..nx {
                if self.interior[self.lat.index([ix, iy])] {
                    if lo.is_none() {
                        lo = Some(ix);
                    }
                    hi = Some(ix);
                }
            }
            if let (Some(l), Some(h)) = (lo, hi) {
                pts.push([l as i64, iy as i64]);
                if h != l {
                    pts.push([h as i64, iy as i64]);
                }
            }
        }
        let hull = convex_hull(&mut pts);
        let mut total = 0usize;
        let ys: Vec<i64> = hull.iter().map(|p| p[1]).collect();
        let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
        for y in y0..=y1 {
            if let Some((xlo, xhi)) = hull_row_range(&hull, y) {
                let xlo = xlo.max(0);
                let xhi = xhi.min(nx as i64 - 1);
                if xhi >= xlo {
                    total += (xhi - xlo + 1) as usize;
                }
            }
        }
        total
    }

    /// Rolling-ball certificate: `erode(dilate(dom, eps), eps)` must stay
    /// inside the domain up to a one-cell tolerance ring.
    pub fn rolling_ball_check(&self, eps: f64) -> Result<bool> {
        let closing = self.dilate(eps)?.erode(eps)?;
        let allowed = lattice::dilate_one_cell(&self.lat, &self.interior);
        Ok(closing
            .interior
            .iter()
            .zip(&allowed)
            .all(|(&c, &a)| !c || a))
    }

    /// For convex domains: the dilation by `eps` is contained, within one
    /// cell, in the homothety of factor `1 + eps/r0` about the inscribed
    /// center.
    pub fn convex_homothety_check(&self, eps: f64) -> Result<bool> {
        if !self.is_convex(None)? {
            return Err(Error::Precondition(
                "convex_homothety_check requires a convex domain".into(),
            ));
        }
        if eps == 0.0 {
            return Ok(true);
        }
        let r0 = self.inradius()?;
        let c = self.inscribed_center()?;
        let center = self.lat.center(c);
        let factor = 1.0 + eps / r0;
        let dil = self.dilate(eps)?;
        let allowed = lattice::dilate_one_cell(&self.lat, &self.interior);
        let h = self.lat.h;
        for idx in 0..dil.interior.len() {
            if !dil.interior[idx] {
                continue;
            }
            let p = self.lat.center(self.lat.coords(idx));
            // preimage under the homothety
            let qx = center[0] + (p[0] - center[0]) / factor;
            let qy = center[1] + (p[1] - center[1]) / factor;
            let ix = ((qx - self.lat.origin[0]) / h).round() as i64;
            let iy = ((qy - self.lat.origin[1]) / h).round() as i64;
            if ix < 0 || iy < 0 || ix >= self.lat.dims[0] as i64 || iy >= self.lat.dims[1] as i64 {
                return Ok(false);
            }
            if !allowed[self.lat.index([ix as usize, iy as usize])] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Binary PGM (P5): 255 = interior, 0 = exterior, top row first.
    pub fn write_pgm(&self, w: &mut impl Write) -> io::Result<()> {
        let (nx, ny) = self.dims();
        write!(w, "P5\n{} {}\n255\n", nx, ny)?;
        let mut row = vec![0u8; nx];
        for iy in (0..ny).rev() {
            for ix in 0..nx {
                row[ix] = if self.interior[self.lat.index([ix, iy])] { 255 } else { 0 };
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

/// Exact Euclidean distances from cell centers to a target set of cells.
#[derive(Clone, Debug)]
pub struct DistanceField {
    lat: Lattice<2>,
    /// Squared distances in lattice units; exact integers.
    pub(crate) d_sq: Vec<i64>,
    /// The target set was empty: every distance is the +inf sentinel.
    pub empty_target: bool,
}

impl DistanceField {
    pub fn lattice(&self) -> &Lattice<2> {
        &self.lat
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.value_at(self.lat.index([ix, iy]))
    }

    pub fn value_at(&self, idx: usize) -> f64 {
        let d = self.d_sq[idx];
        if d == UNREACHABLE {
            f64::INFINITY
        } else {
            (d as f64).sqrt() * self.lat.h
        }
    }

    pub fn len(&self) -> usize {
        self.d_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_sq.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        (0..self.d_sq.len())
            .map(|i| self.value_at(i))
            .fold(0.0, f64::max)
    }
}

/// Andrew monotone chain; returns the hull CCW without repeated endpoint.
fn convex_hull(pts: &mut Vec<[i64; 2]>) -> Vec<[i64; 2]> {
    pts.sort();
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts.clone();
    }
    let cross = |o: [i64; 2], a: [i64; 2], b: [i64; 2]| -> i64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[i64; 2]> = Vec::with_capacity(2 * n);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Integer x-range of lattice points inside-or-on the hull at row `y`.
fn hull_row_range(hull: &[[i64; 2]], y: i64) -> Option<(i64, i64)> {
    if hull.is_empty() {
        return None;
    }
    if hull.len() == 1 {
        return (hull[0][1] == y).then_some((hull[0][0], hull[0][0]));
    }
    if hull.len() == 2 {
        // Degenerate segment hull.
        let (a, b) = (hull[0], hull[1]);
        if a[1] == b[1] {
            return (a[1] == y).then_some((a[0].min(b[0]), a[0].max(b[0])));
        }
        if (y - a[1]).signum() * (y - b[1]).signum() > 0 {
            return None;
        }
        // x = a.x + (y-a.y)(b.x-a.x)/(b.y-a.y) must be an integer lattice hit.
        let num = a[0] * (b[1] - a[1]) + (y - a[1]) * (b[0] - a[0]);
        let den = b[1] - a[1];
        if num.rem_euclid(den) == 0 {
            let x = num / den;
            return Some((x, x));
        }
        return None;
    }
    // CCW hull: inside-or-on iff every edge cross product is >= 0.
    // Each edge constrains x linearly at fixed y.
    let mut lo = i64::MIN;
    let mut hi = i64::MAX;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        // cross(b-a, p-a) >= 0  =>  (bx-ax)(y-ay) - (by-ay)(x-ax) >= 0
        let coef = b[1] - a[1]; // multiplies x with a minus sign
        let rhs = (b[0] - a[0]) * (y - a[1]) + coef * a[0];
        // -coef*x + rhs' >= 0 with rhs' = (bx-ax)(y-ay); rearranged: coef*x <= rhs
        if coef > 0 {
            hi = hi.min(rhs.div_euclid(coef));
        } else if coef < 0 {
            // coef*x <= rhs with coef < 0  =>  x >= ceil(-rhs / -coef)
            lo = lo.max(-(rhs.div_euclid(-coef)));
        } else if (b[0] - a[0]) * (y - a[1]) < 0 {
            return None;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(h: f64, origin: (f64, f64), dims: (usize, usize)) -> Lattice<2> {
        Lattice::new(h, [origin.0, origin.1], [dims.0, dims.1]).unwrap()
    }

    fn disk(h: f64, r: f64, half: f64) -> GridDomain {
        let n = (2.0 * half / h).round() as usize + 1;
        let l = lat(h, (-half, -half), (n, n));
        GridDomain::from_predicate(l, |x, y| x * x + y * y < r * r).unwrap()
    }

    #[test]
    fn ring_violation_rejected() {
        let l = lat(1.0, (0.0, 0.0), (4, 4));
        let mask = vec![true; 16];
        assert!(GridDomain::from_mask(l, mask).is_err());
    }

    #[test]
    fn distance_to_set_is_zero_on_set() {
        let d = disk(1.0 / 16.0, 0.4, 0.7);
        let df = d.distance_transform(DistanceMode::ToSet);
        for idx in 0..d.interior().len() {
            if d.interior()[idx] {
                assert_eq!(df.d_sq[idx], 0);
            }
        }
    }

    #[test]
    fn center_distance_of_unit_square() {
        // Unit square (0,1)^2, h = 1/32; boundary distance at center ~ 0.5.
        let h = 1.0 / 32.0;
        let l = lat(h, (-0.25, -0.25), (49, 49));
        let sq = GridDomain::from_predicate(l, |x, y| {
            x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0
        })
        .unwrap();
        let df = sq.distance_transform(DistanceMode::ToComplement);
        let c = sq.lattice().index([24, 24]); // center (0.5, 0.5)
        assert!((df.value_at(c) - 0.5).abs() <= h + 1e-12);
    }

    #[test]
    fn empty_target_flagged() {
        let l = lat(1.0, (0.0, 0.0), (5, 5));
        let full = GridDomain::from_mask(l, vec![false; 25]).unwrap();
        let df = full.distance_transform(DistanceMode::ToSet);
        assert!(df.empty_target);
        assert!(df.value(2, 2).is_infinite());
    }

    #[test]
    fn dilate_disk_radius_grows() {
        let h = 1.0 / 64.0;
        let d = disk(h, 1.0, 1.5);
        let dd = d.dilate(0.2).unwrap();
        // Hausdorff distance to the true 1.2-disk is at most one cell.
        let want = disk(h, 1.2, 1.5);
        let sym: usize = dd
            .interior()
            .iter()
            .zip(want.interior())
            .filter(|(a, b)| a != b)
            .count();
        // mismatches only along the circle, within jitter
        assert!(dd.is_subset_of(&disk(h, 1.2 + 2.0 * h, 1.5)).unwrap());
        assert!(want.erode(2.0 * h).unwrap().is_subset_of(&dd).unwrap());
        assert!(sym < want.boundary_cell_count() * 3);
    }

    #[test]
    fn morph_zero_is_identity() {
        let d = disk(1.0 / 32.0, 0.8, 1.2);
        assert!(d.morph(0.0, MorphDir::Dilate).unwrap().mask_eq(&d));
        assert!(d.morph(0.0, MorphDir::Erode).unwrap().mask_eq(&d));
    }

    #[test]
    fn dilation_overflow_is_geometry_error() {
        let d = disk(1.0 / 16.0, 1.0, 1.2);
        assert!(matches!(d.dilate(0.5), Err(Error::Geometry(_))));
    }

    #[test]
    fn set_difference_annulus() {
        let h = 1.0 / 64.0;
        let outer = disk(h, 1.2, 1.5);
        let inner = disk(h, 1.0, 1.5);
        let shell = GridDomain::set_difference_closed(&outer, &inner).unwrap();
        assert!(!shell.is_empty());
        // Shell lies strictly between the disks.
        assert!(shell.is_subset_of(&outer).unwrap());
        assert!(shell.intersect(&inner).unwrap().is_empty());
        // Same-domain difference is empty.
        let e = GridDomain::set_difference_closed(&outer, &outer).unwrap();
        assert!(e.is_empty());
    }

    #[test]
    fn inradius_square_and_disk() {
        let h = 1.0 / 64.0;
        let l = lat(h, (-0.25, -0.25), (97, 97));
        let sq = GridDomain::from_predicate(l, |x, y| {
            x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0
        })
        .unwrap();
        assert!((sq.inradius().unwrap() - 0.5).abs() <= h);
        let d = disk(h, 0.9, 1.2);
        assert!((d.inradius().unwrap() - 0.9).abs() <= h);
    }

    #[test]
    fn convexity_of_disk_and_l_shape() {
        let d = disk(1.0 / 48.0, 1.0, 1.3);
        assert!(d.is_convex(None).unwrap());
        let l = lat(1.0 / 48.0, (-0.2, -0.2), (68, 68));
        let ell = GridDomain::from_predicate(l, |x, y| {
            x > 0.0 && y > 0.0 && x < 1.0 && y < 1.0 && !(x > 0.5 && y > 0.5)
        })
        .unwrap();
        assert!(!ell.is_convex(None).unwrap());
    }

    #[test]
    fn closing_of_convex_is_identity_within_one_cell() {
        let d = disk(1.0 / 48.0, 0.8, 1.5);
        let closing = d.dilate(0.3).unwrap().erode(0.3).unwrap();
        let allowed = lattice::dilate_one_cell(d.lattice(), d.interior());
        assert!(closing
            .interior()
            .iter()
            .zip(&allowed)
            .all(|(&c, &a)| !c || a));
        // and the closing covers the original within one cell
        let cover = lattice::dilate_one_cell(closing.lattice(), closing.interior());
        assert!(d.interior().iter().zip(&cover).all(|(&m, &c)| !m || c));
        assert!(d.rolling_ball_check(0.3).unwrap());
    }

    #[test]
    fn homothety_check_disk_and_square() {
        let d = disk(1.0 / 64.0, 1.0, 1.4);
        assert!(d.convex_homothety_check(0.1).unwrap());
        assert!(d.convex_homothety_check(0.0).unwrap());
        let h = 1.0 / 64.0;
        let l = lat(h, (-0.25, -0.25), (97, 97));
        let sq = GridDomain::from_predicate(l, |x, y| {
            x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0
        })
        .unwrap();
        assert!(sq.convex_homothety_check(0.1).unwrap());
    }

    #[test]
    fn pgm_header_and_size() {
        let d = disk(1.0 / 8.0, 0.4, 0.8);
        let mut buf = Vec::new();
        d.write_pgm(&mut buf).unwrap();
        let (nx, ny) = d.dims();
        assert!(buf.starts_with(format!("P5\n{} {}\n255\n", nx, ny).as_bytes()));
        assert_eq!(buf.len(), format!("P5\n{} {}\n255\n", nx, ny).len() + nx * ny);
    }
}
