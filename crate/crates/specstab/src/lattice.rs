//! Uniform lattices of cell centers in 1, 2 or 3 dimensions.
//!
//! Everything that does not care about the spatial dimension lives here:
//! index arithmetic, the exact squared Euclidean distance transform, binary
//! dilation by the full (Moore) neighborhood, and connected-component
//! labelling. Distances are computed in integer lattice units so that the
//! transform is exact; callers scale by the grid spacing.

use crate::error::{Error, Result};

/// Sentinel for "no target cell exists" in squared-distance fields.
pub const UNREACHABLE: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice<const R: usize> {
    pub h: f64,
    pub origin: [f64; R],
    pub dims: [usize; R],
}

impl<const R: usize> Lattice<R> {
    pub fn new(h: f64, origin: [f64; R], dims: [usize; R]) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::argument(format!("grid spacing must be positive, got {h}")));
        }
        if dims.iter().any(|&d| d < 3) {
            return Err(Error::argument(format!("grid dims must be >= 3, got {dims:?}")));
        }
        Ok(Lattice { h, origin, dims })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides (axis 0 slowest).
    pub fn strides(&self) -> [usize; R] {
        let mut s = [1usize; R];
        for a in (0..R - 1).rev() {
            s[a] = s[a + 1] * self.dims[a + 1];
        }
        s
    }

    pub fn index(&self, c: [usize; R]) -> usize {
        let s = self.strides();
        let mut idx = 0;
        for a in 0..R {
            debug_assert!(c[a] < self.dims[a]);
            idx += c[a] * s[a];
        }
        idx
    }

    pub fn coords(&self, mut idx: usize) -> [usize; R] {
        let s = self.strides();
        let mut c = [0usize; R];
        for a in 0..R {
            c[a] = idx / s[a];
            idx %= s[a];
        }
        c
    }

    pub fn center(&self, c: [usize; R]) -> [f64; R] {
        let mut p = [0.0; R];
        for a in 0..R {
            p[a] = self.origin[a] + c[a] as f64 * self.h;
        }
        p
    }

    /// True if the cell lies on the outermost ring of the grid box.
    pub fn on_ring(&self, c: [usize; R]) -> bool {
        (0..R).any(|a| c[a] == 0 || c[a] + 1 == self.dims[a])
    }

    /// Grids are comparable only when spacing, origin and dims agree exactly.
    pub fn same_geometry(&self, other: &Self) -> bool {
        self.h == other.h && self.origin == other.origin && self.dims == other.dims
    }

    /// Visit every line of cells along `axis` as (start index, stride, length).
    pub fn for_each_line(&self, axis: usize, mut f: impl FnMut(usize, usize, usize)) {
        let s = self.strides();
        let mut c = [0usize; R];
        loop {
            f(self.index(c), s[axis], self.dims[axis]);
            // odometer over all axes except `axis`
            let mut a = R;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                if a == axis {
                    continue;
                }
                c[a] += 1;
                if c[a] < self.dims[a] {
                    break;
                }
                c[a] = 0;
            }
        }
    }
}

/// Exact squared Euclidean distance transform, in lattice units.
///
/// `d[i]` is the squared distance from cell `i` to the nearest cell with
/// `target[i] = true`, or [`UNREACHABLE`] when the target set is empty.
/// Lower-envelope (Felzenszwalb–Huttenlocher) passes, one per axis.
pub fn edt_sq<const R: usize>(lat: &Lattice<R>, target: &[bool]) -> Vec<i64> {
    assert_eq!(target.len(), lat.len());
    let mut f: Vec<i64> = target
        .iter()
        .map(|&t| if t { 0 } else { UNREACHABLE })
        .collect();
    let max_dim = *lat.dims.iter().max().unwrap();
    let mut line = vec![0i64; max_dim];
    let mut out = vec![0i64; max_dim];
    let mut v: Vec<usize> = Vec::with_capacity(max_dim);
    let mut z: Vec<f64> = Vec::with_capacity(max_dim);
    for axis in 0..R {
        lat.for_each_line(axis, |start, stride, len| {
            for q in 0..len {
                line[q] = f[start + q * stride];
            }
            dt1d(&line[..len], &mut out[..len], &mut v, &mut z);
            for q in 0..len {
                f[start + q * stride] = out[q];
            }
        });
    }
    f
}

/// One-dimensional squared-distance transform of a sampled function.
fn dt1d(f: &[i64], out: &mut [i64], v: &mut Vec<usize>, z: &mut Vec<f64>) {
    let n = f.len();
    v.clear();
    z.clear();
    for q in 0..n {
        if f[q] == UNREACHABLE {
            continue;
        }
        loop {
            match v.last() {
                None => {
                    v.push(q);
                    z.push(f64::NEG_INFINITY);
                    break;
                }
                Some(&p) => {
                    let s = intersect(p, q, f);
                    if s <= *z.last().unwrap() {
                        v.pop();
                        z.pop();
                    } else {
                        v.push(q);
                        z.push(s);
                        break;
                    }
                }
            }
        }
    }
    if v.is_empty() {
        out.fill(UNREACHABLE);
        return;
    }
    let mut k = 0;
    for q in 0..n {
        while k + 1 < v.len() && z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as i64 - p as i64;
        out[q] = d * d + f[p];
    }
}

/// Abscissa where parabola rooted at `q` overtakes the one rooted at `p`.
fn intersect(p: usize, q: usize, f: &[i64]) -> f64 {
    let (p, q) = (p as i64, q as i64);
    ((f[q as usize] + q * q) - (f[p as usize] + p * p)) as f64 / (2 * (q - p)) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    /// Face neighbors only (4-connectivity in 2-D).
    Axis,
    /// Full Moore neighborhood (8-connectivity in 2-D).
    Full,
}

fn neighbor_offsets<const R: usize>(conn: Connectivity) -> Vec<[isize; R]> {
    match conn {
        Connectivity::Axis => {
            let mut offs = Vec::with_capacity(2 * R);
            for a in 0..R {
                for s in [-1isize, 1] {
                    let mut o = [0isize; R];
                    o[a] = s;
                    offs.push(o);
                }
            }
            offs
        }
        Connectivity::Full => {
            let mut offs = Vec::new();
            let count = 3usize.pow(R as u32);
            for code in 0..count {
                let mut o = [0isize; R];
                let mut c = code;
                for item in o.iter_mut() {
                    *item = (c % 3) as isize - 1;
                    c /= 3;
                }
                if o != [0; R] {
                    offs.push(o);
                }
            }
            offs
        }
    }
}

/// Mask dilated by one cell in the full neighborhood (the discrete closure).
pub fn dilate_one_cell<const R: usize>(lat: &Lattice<R>, mask: &[bool]) -> Vec<bool> {
    assert_eq!(mask.len(), lat.len());
    let offs = neighbor_offsets::<R>(Connectivity::Full);
    let mut out = mask.to_vec();
    for idx in 0..mask.len() {
        if !mask[idx] {
            continue;
        }
        let c = lat.coords(idx);
        'offsets: for o in &offs {
            let mut nc = [0usize; R];
            for a in 0..R {
                let v = c[a] as isize + o[a];
                if v < 0 || v >= lat.dims[a] as isize {
                    continue 'offsets;
                }
                nc[a] = v as usize;
            }
            out[lat.index(nc)] = true;
        }
    }
    out
}

/// Number of connected components of `mask` under the given connectivity.
pub fn component_count<const R: usize>(
    lat: &Lattice<R>,
    mask: &[bool],
    conn: Connectivity,
) -> usize {
    assert_eq!(mask.len(), lat.len());
    let offs = neighbor_offsets::<R>(conn);
    let mut seen = vec![false; mask.len()];
    let mut stack: Vec<usize> = Vec::new();
    let mut count = 0;
    for seed in 0..mask.len() {
        if !mask[seed] || seen[seed] {
            continue;
        }
        count += 1;
        seen[seed] = true;
        stack.push(seed);
        while let Some(idx) = stack.pop() {
            let c = lat.coords(idx);
            'offsets: for o in &offs {
                let mut nc = [0usize; R];
                for a in 0..R {
                    let v = c[a] as isize + o[a];
                    if v < 0 || v >= lat.dims[a] as isize {
                        continue 'offsets;
                    }
                    nc[a] = v as usize;
                }
                let n = lat.index(nc);
                if mask[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat2(nx: usize, ny: usize) -> Lattice<2> {
        Lattice::new(1.0, [0.0, 0.0], [nx, ny]).unwrap()
    }

    #[test]
    fn index_roundtrip() {
        let lat = lat2(5, 7);
        for idx in 0..lat.len() {
            assert_eq!(lat.index(lat.coords(idx)), idx);
        }
    }

    #[test]
    fn edt_two_isolated_cells() {
        // Two cells 5 apart along x: squared distance between them is 25.
        let lat = lat2(9, 3);
        let mut t = vec![false; lat.len()];
        t[lat.index([2, 1])] = true;
        let d = edt_sq(&lat, &t);
        assert_eq!(d[lat.index([2, 1])], 0);
        assert_eq!(d[lat.index([7, 1])], 25);
        assert_eq!(d[lat.index([4, 2])], 4 + 1);
    }

    #[test]
    fn edt_empty_target_is_unreachable() {
        let lat = lat2(4, 4);
        let d = edt_sq(&lat, &vec![false; lat.len()]);
        assert!(d.iter().all(|&x| x == UNREACHABLE));
    }

    #[test]
    fn edt_matches_brute_force() {
        // Pseudo-random masks on a small grid; exact equality of squared fields.
        let lat = lat2(23, 17);
        let mut state = 0x243f6a8885a308d3u64;
        let mut rand = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        for _ in 0..5 {
            let mask: Vec<bool> = (0..lat.len()).map(|_| rand() % 7 == 0).collect();
            let d = edt_sq(&lat, &mask);
            for idx in 0..lat.len() {
                let c = lat.coords(idx);
                let mut best = UNREACHABLE;
                for (jdx, &on) in mask.iter().enumerate() {
                    if !on {
                        continue;
                    }
                    let cj = lat.coords(jdx);
                    let dx = c[0] as i64 - cj[0] as i64;
                    let dy = c[1] as i64 - cj[1] as i64;
                    best = best.min(dx * dx + dy * dy);
                }
                assert_eq!(d[idx], best, "mismatch at {c:?}");
            }
        }
    }

    #[test]
    fn components_and_connectivity_pairing() {
        // Diagonal pair: two components under Axis, one under Full.
        let lat = lat2(5, 5);
        let mut m = vec![false; lat.len()];
        m[lat.index([1, 1])] = true;
        m[lat.index([2, 2])] = true;
        assert_eq!(component_count(&lat, &m, Connectivity::Axis), 2);
        assert_eq!(component_count(&lat, &m, Connectivity::Full), 1);
    }

    #[test]
    fn dilate_one_cell_adds_moore_ring() {
        let lat = lat2(5, 5);
        let mut m = vec![false; lat.len()];
        m[lat.index([2, 2])] = true;
        let d = dilate_one_cell(&lat, &m);
        assert_eq!(d.iter().filter(|&&x| x).count(), 9);
    }
}
