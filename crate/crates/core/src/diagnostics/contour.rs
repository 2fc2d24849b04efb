//! Zero level set of a cell-centered field by marching squares.
//!
//! The squares have cell centers as corners. Crossings are placed by linear
//! interpolation along square edges, computed once per edge. Saddle squares
//! are resolved by the sign of the four-corner average, and exact zeros take
//! that sign too, so `phi` and `-phi` give the same point sets.

use std::collections::HashMap;

use crate::grid::{CellField, GridSpec};

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    /// The last point connects back to the first.
    pub closed: bool,
}

impl Polyline {
    /// Segments including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let m = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b)| (b.0 - a.0).hypot(b.1 - a.1)).sum()
    }

    /// Signed shoelace area (closed polylines).
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        let mut s = 0.0;
        for k in 0..n {
            let (a, b) = (self.points[k], self.points[(k + 1) % n]);
            s += a.0 * b.1 - b.0 * a.1;
        }
        0.5 * s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Contour {
    pub polylines: Vec<Polyline>,
}

impl Contour {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.polylines.iter().flat_map(|p| p.points.iter().copied())
    }

    pub fn n_points(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Edge {
    /// Between centers (i, j) and (i + 1, j).
    H(usize, usize),
    /// Between centers (i, j) and (i, j + 1).
    V(usize, usize),
}

pub fn extract_contour(g: &GridSpec, phi: &CellField) -> Contour {
    if g.nx < 2 || g.ny < 2 {
        return Contour::default();
    }
    let val = |i: usize, j: usize| phi.at(i, j);
    let mut points: HashMap<Edge, Point> = HashMap::new();
    let mut segs: Vec<(Edge, Edge)> = Vec::new();

    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v = c.map(|(a, b)| val(a, b));
            let avg = 0.25 * (v[0] + v[1] + v[2] + v[3]);
            let pos = v.map(|x| if x != 0.0 { x > 0.0 } else { avg >= 0.0 });
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let crossed: Vec<usize> = (0..4).filter(|&e| pos[e] != pos[(e + 1) % 4]).collect();
            for &e in &crossed {
                points.entry(edges[e]).or_insert_with(|| crossing(g, phi, edges[e]));
            }
            match crossed.len() {
                2 => segs.push((edges[crossed[0]], edges[crossed[1]])),
                4 => {
                    let center_pos = avg >= 0.0;
                    if center_pos == pos[0] {
                        // corners 0 and 2 connect through the centre: cut off 1 and 3
                        segs.push((edges[0], edges[1]));
                        segs.push((edges[2], edges[3]));
                    } else {
                        segs.push((edges[3], edges[0]));
                        segs.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    link(&segs, &points)
}

fn crossing(g: &GridSpec, phi: &CellField, e: Edge) -> Point {
    let ((i0, j0), (i1, j1)) = match e {
        Edge::H(i, j) => ((i, j), (i + 1, j)),
        Edge::V(i, j) => ((i, j), (i, j + 1)),
    };
    let (a, b) = (phi.at(i0, j0), phi.at(i1, j1));
    let t = if a == b { 0.5 } else { (a / (a - b)).clamp(0.0, 1.0) };
    let p0 = g.cell_center(i0, j0);
    let p1 = g.cell_center(i1, j1);
    (p0.0 + t * (p1.0 - p0.0), p0.1 + t * (p1.1 - p0.1))
}

fn link(segs: &[(Edge, Edge)], points: &HashMap<Edge, Point>) -> Contour {
    let mut adj: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut polylines = Vec::new();

    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> (Vec<Edge>, bool) {
        let mut chain = vec![start_edge];
        let mut seg = start_seg;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            let next = if a == at { b } else { a };
            if next == start_edge {
                return (chain, true);
            }
            chain.push(next);
            at = next;
            match adj[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => return (chain, false),
            }
        }
    };

    // open chains start at edges used by a single segment
    let mut ends: Vec<Edge> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    ends.sort();
    for e in ends {
        let s = adj[&e][0];
        if used[s] {
            continue;
        }
        let (chain, _) = walk(s, e, &mut used);
        polylines.push(Polyline {
            points: chain.iter().map(|e| points[e]).collect(),
            closed: false,
        });
    }
    for s in 0..segs.len() {
        if used[s] {
            continue;
        }
        let (chain, closed) = walk(s, segs[s].0, &mut used);
        polylines.push(Polyline {
            points: chain.iter().map(|e| points[e]).collect(),
            closed,
        });
    }
    Contour { polylines }
}
