//! Level-set extraction by marching squares.
//!
//! The contouring lattice has the cell centers as its vertices. A crossing
//! is placed on a lattice edge by linear interpolation between the two
//! end values. Squares whose four corners all lie within `tolerance` of the
//! level are treated as a plateau: they emit no crossings, and the outline
//! of their union is reported as closed loops instead. This is how a level
//! set of positive area shows up.

use std::collections::{HashMap, HashSet};

use crate::grid::{BinaryMask, GridSpec, Polyline, ScalarField};

/// Default plateau tolerance, in field units.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Result of extracting one level of a field.
#[derive(Debug, Clone)]
pub struct LevelSet {
    /// Interpolated contour lines.
    pub contours: Vec<Polyline>,
    /// Outlines of the plateau regions.
    pub plateau_loops: Vec<Polyline>,
    /// Cell centers that are corners of a plateau square.
    pub plateau: BinaryMask,
}

impl LevelSet {
    pub fn all_polylines(&self) -> Vec<Polyline> {
        self.contours.iter().chain(&self.plateau_loops).cloned().collect()
    }
}

/// Zero isocontour, plateau outlines included.
pub fn zero_isocontour(field: &ScalarField, tolerance: f64) -> Vec<Polyline> {
    extract_level(field, 0.0, tolerance).all_polylines()
}

/// Contour of an arbitrary level, plateau outlines included.
pub fn isocontour(field: &ScalarField, level: f64, tolerance: f64) -> Vec<Polyline> {
    extract_level(field, level, tolerance).all_polylines()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Key {
    Corner(usize, usize),
    /// Edge from (i, j) to (i, j + 1).
    Horizontal(usize, usize),
    /// Edge from (i, j) to (i + 1, j).
    Vertical(usize, usize),
}

struct Builder {
    points: HashMap<Key, [f64; 2]>,
    segments: Vec<(Key, Key)>,
    seen: HashSet<(Key, Key)>,
}

impl Builder {
    fn new() -> Self {
        Self { points: HashMap::new(), segments: Vec::new(), seen: HashSet::new() }
    }

    fn push(&mut self, a: (Key, [f64; 2]), b: (Key, [f64; 2])) {
        if a.0 == b.0 {
            return;
        }
        let canon = if a.0 <= b.0 { (a.0, b.0) } else { (b.0, a.0) };
        if !self.seen.insert(canon) {
            return;
        }
        self.points.insert(a.0, a.1);
        self.points.insert(b.0, b.1);
        self.segments.push((a.0, b.0));
    }

    /// Joins segments sharing endpoints into maximal chains. Open chains are
    /// started from degree-one endpoints so they come out whole.
    fn stitch(self) -> Vec<Polyline> {
        let mut incident: HashMap<Key, Vec<usize>> = HashMap::new();
        for (k, &(a, b)) in self.segments.iter().enumerate() {
            incident.entry(a).or_default().push(k);
            incident.entry(b).or_default().push(k);
        }
        let mut used = vec![false; self.segments.len()];
        let mut out = Vec::new();

        let walk = |start: Key, used: &mut Vec<bool>| -> Option<Polyline> {
            let mut keys = vec![start];
            let mut cur = start;
            loop {
                let next = incident[&cur].iter().copied().find(|&s| !used[s]);
                let Some(s) = next else { break };
                used[s] = true;
                let (a, b) = self.segments[s];
                cur = if a == cur { b } else { a };
                if cur == start {
                    let pts = keys.iter().map(|k| self.points[k]).collect();
                    return Polyline::new(pts, keys.len() > 2).ok();
                }
                keys.push(cur);
            }
            if keys.len() < 2 {
                return None;
            }
            let pts = keys.iter().map(|k| self.points[k]).collect();
            Polyline::new(pts, false).ok()
        };

        for pass in 0..2 {
            for k in 0..self.segments.len() {
                if used[k] {
                    continue;
                }
                let (a, b) = self.segments[k];
                let start = if pass == 0 {
                    if incident[&a].len() == 1 {
                        a
                    } else if incident[&b].len() == 1 {
                        b
                    } else {
                        continue;
                    }
                } else {
                    a
                };
                if let Some(p) = walk(start, &mut used) {
                    out.push(p);
                }
            }
        }
        out
    }
}

/// Marching squares on the cell-center lattice.
pub fn extract_level(field: &ScalarField, level: f64, tolerance: f64) -> LevelSet {
    let g: GridSpec = *field.grid();
    let mut plateau = BinaryMask::empty(g);
    if g.rows < 2 || g.cols < 2 {
        return LevelSet { contours: Vec::new(), plateau_loops: Vec::new(), plateau };
    }
    let v = |i: usize, j: usize| field.get(i, j) - level;
    let above = |i: usize, j: usize| v(i, j) > 0.0;

    let sq_rows = g.rows - 1;
    let sq_cols = g.cols - 1;
    let mut flat = vec![false; sq_rows * sq_cols];
    for i in 0..sq_rows {
        for j in 0..sq_cols {
            let is_flat = [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)]
                .iter()
                .all(|&(a, b)| v(a, b).abs() <= tolerance);
            if is_flat {
                flat[i * sq_cols + j] = true;
                for (a, b) in [(i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)] {
                    plateau.set(a, b, true);
                }
            }
        }
    }

    // Crossing on the lattice edge p -> q, snapped to a corner key when the
    // interpolation parameter hits an endpoint.
    let crossing = |p: (usize, usize), q: (usize, usize), edge: Key| -> (Key, [f64; 2]) {
        let (vp, vq) = (v(p.0, p.1), v(q.0, q.1));
        let t = vp / (vp - vq);
        if t <= 0.0 {
            return (Key::Corner(p.0, p.1), g.cell_center(p.0, p.1));
        }
        if t >= 1.0 {
            return (Key::Corner(q.0, q.1), g.cell_center(q.0, q.1));
        }
        let a = g.cell_center(p.0, p.1);
        let b = g.cell_center(q.0, q.1);
        (edge, [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
    };

    let mut lines = Builder::new();
    for i in 0..sq_rows {
        for j in 0..sq_cols {
            if flat[i * sq_cols + j] {
                continue;
            }
            // Corners counter-clockwise from the lower left.
            let corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)];
            let state: [bool; 4] = corners.map(|(a, b)| above(a, b));
            let edges = [
                Key::Horizontal(i, j),
                Key::Vertical(i, j + 1),
                Key::Horizontal(i + 1, j),
                Key::Vertical(i, j),
            ];
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (p, q) = (corners[e], corners[(e + 1) % 4]);
                if state[e] != state[(e + 1) % 4] {
                    hits.push((e, crossing(p, q, edges[e])));
                }
            }
            match hits.len() {
                2 => lines.push(hits[0].1, hits[1].1),
                4 => {
                    let center = corners.iter().map(|&(a, b)| v(a, b)).sum::<f64>() / 4.0;
                    // Saddle: pair crossings so that the diagonal matching the
                    // center's state stays connected.
                    if (center > 0.0) == state[0] {
                        lines.push(hits[0].1, hits[1].1);
                        lines.push(hits[2].1, hits[3].1);
                    } else {
                        lines.push(hits[3].1, hits[0].1);
                        lines.push(hits[1].1, hits[2].1);
                    }
                }
                _ => {}
            }
        }
    }

    let mut outline = Builder::new();
    let is_flat = |i: isize, j: isize| {
        i >= 0 && j >= 0 && (i as usize) < sq_rows && (j as usize) < sq_cols && flat[i as usize * sq_cols + j as usize]
    };
    let corner = |i: usize, j: usize| (Key::Corner(i, j), g.cell_center(i, j));
    for i in 0..sq_rows {
        for j in 0..sq_cols {
            if !flat[i * sq_cols + j] {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            if !is_flat(ii - 1, jj) {
                outline.push(corner(i, j), corner(i, j + 1));
            }
            if !is_flat(ii + 1, jj) {
                outline.push(corner(i + 1, j), corner(i + 1, j + 1));
            }
            if !is_flat(ii, jj - 1) {
                outline.push(corner(i, j), corner(i + 1, j));
            }
            if !is_flat(ii, jj + 1) {
                outline.push(corner(i, j + 1), corner(i + 1, j + 1));
            }
        }
    }

    LevelSet { contours: lines.stitch(), plateau_loops: outline.stitch(), plateau }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_one_closed_loop() {
        let g = GridSpec::new([-2.0, -2.0], 0.05, 80, 80).unwrap();
        let c = [0.13, -0.07];
        let f = ScalarField::from_fn(g, |x| (x[0] - c[0]).hypot(x[1] - c[1]) - 1.2).unwrap();
        let lines = zero_isocontour(&f, DEFAULT_TOLERANCE);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for p in &lines[0].points {
            assert!(((p[0] - c[0]).hypot(p[1] - c[1]) - 1.2).abs() <= g.spacing);
        }
    }

    #[test]
    fn constant_sign_gives_nothing() {
        let g = GridSpec::pixels(10, 10).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] + 0.1).unwrap();
        assert!(zero_isocontour(&f, DEFAULT_TOLERANCE).is_empty());
    }

    #[test]
    fn vertical_line_is_one_open_polyline() {
        let g = GridSpec::new([0.0, 0.0], 0.1, 30, 30).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] - 1.0).unwrap();
        let lines = zero_isocontour(&f, DEFAULT_TOLERANCE);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        assert_eq!(lines[0].len(), 30);
        assert!(lines[0].points.iter().all(|p| (p[0] - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn plateau_is_outlined() {
        let g = GridSpec::pixels(12, 12).unwrap();
        // Zero on [3.5, 8.5] along x, positive elsewhere.
        let f = ScalarField::from_fn(g, |x| (3.5 - x[0]).max(x[0] - 8.5).max(0.0)).unwrap();
        let set = extract_level(&f, 0.0, DEFAULT_TOLERANCE);
        assert_eq!(set.plateau_loops.len(), 1);
        assert!(set.plateau_loops[0].closed);
        for (i, j, x) in g.cells() {
            assert_eq!(set.plateau.get(i, j), (3.5..=8.5).contains(&x[0]));
        }
    }

    #[test]
    fn exact_zero_column_gives_single_line() {
        let g = GridSpec::pixels(6, 9).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] - 4.5).abs()).unwrap();
        let lines = zero_isocontour(&f, 0.0);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].points.iter().all(|p| p[0] == 4.5));
    }

    #[test]
    fn saddle_produces_two_segments() {
        let g = GridSpec::pixels(2, 2).unwrap();
        let f = ScalarField::new(g, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let lines = zero_isocontour(&f, DEFAULT_TOLERANCE);
        assert_eq!(lines.len(), 2);
    }
}
