//! Top-view rasterisation of the cloth mesh at 1 mm per pixel.

use crate::mask::{area_px, BinaryMask};

use super::SimState;

/// Pixel grid in millimetres: pixel (px, py) covers
/// `[x0 + px, x0 + px + 1) x [y0 + py, y0 + py + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub x0: i64,
    pub y0: i64,
    pub width: u32,
    pub height: u32,
}

impl Frame {
    /// Smallest frame containing every particle of every state, with a
    /// one-pixel margin.
    pub fn around(states: &[&SimState]) -> Frame {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for s in states {
            for p in &s.pos {
                lo_x = lo_x.min(p.x * 1e3);
                lo_y = lo_y.min(p.y * 1e3);
                hi_x = hi_x.max(p.x * 1e3);
                hi_y = hi_y.max(p.y * 1e3);
            }
        }
        if lo_x > hi_x {
            return Frame {
                x0: 0,
                y0: 0,
                width: 1,
                height: 1,
            };
        }
        let x0 = lo_x.floor() as i64 - 1;
        let y0 = lo_y.floor() as i64 - 1;
        Frame {
            x0,
            y0,
            width: (hi_x.ceil() as i64 - x0 + 2) as u32,
            height: (hi_y.ceil() as i64 - y0 + 2) as u32,
        }
    }
}

/// Which mesh triangles to draw.
#[derive(Debug, Clone, PartialEq)]
pub enum TriangleSet {
    All,
    /// Indexed like [`triangles`].
    Only(Vec<bool>),
}

/// Two triangles per grid cell, split along the (i, j)-(i+1, j+1) diagonal.
/// Triangle `2 * (j * (nx - 1) + i) + t` belongs to cell (i, j).
pub fn triangles(nx: usize, ny: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            let (b, c, d) = (a + 1, a + nx + 1, a + nx);
            out.push([a, b, c]);
            out.push([a, c, d]);
        }
    }
    out
}

fn fill(mask: &mut BinaryMask, frame: &Frame, tri: [(f64, f64); 3]) {
    let [(ax, ay), (bx, by), (cx, cy)] = tri;
    let area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if area2.abs() < 1e-9 {
        return;
    }
    let sign = area2.signum();
    let edge = |px: f64, py: f64, ux: f64, uy: f64, vx: f64, vy: f64| sign * ((vx - ux) * (py - uy) - (vy - uy) * (px - ux));
    let lo_x = (ax.min(bx).min(cx) - frame.x0 as f64).floor().max(0.0) as u32;
    let lo_y = (ay.min(by).min(cy) - frame.y0 as f64).floor().max(0.0) as u32;
    let hi_x = ((ax.max(bx).max(cx) - frame.x0 as f64).ceil() as u32).min(frame.width);
    let hi_y = ((ay.max(by).max(cy) - frame.y0 as f64).ceil() as u32).min(frame.height);
    for py in lo_y..hi_y {
        let y = frame.y0 as f64 + py as f64 + 0.5;
        for px in lo_x..hi_x {
            let x = frame.x0 as f64 + px as f64 + 0.5;
            if edge(x, y, ax, ay, bx, by) >= 0.0 && edge(x, y, bx, by, cx, cy) >= 0.0 && edge(x, y, cx, cy, ax, ay) >= 0.0 {
                mask.set(px, py, true);
            }
        }
    }
}

/// Top-view coverage of the selected triangles as a 1 mm/px mask.
pub fn rasterize(state: &SimState, frame: &Frame, select: &TriangleSet) -> BinaryMask {
    let mut mask = BinaryMask::empty(frame.width, frame.height);
    for (t, tri) in triangles(state.nx, state.ny).iter().enumerate() {
        if let TriangleSet::Only(keep) = select {
            if !keep[t] {
                continue;
            }
        }
        let pt = |k: usize| (state.pos[k].x * 1e3, state.pos[k].y * 1e3);
        fill(&mut mask, frame, [pt(tri[0]), pt(tri[1]), pt(tri[2])]);
    }
    mask.with_scale(1.0).expect("unit scale is valid")
}

/// Area of the vertical projection of the cloth, mm².
pub fn project_area(state: &SimState) -> f64 {
    let frame = Frame::around(&[state]);
    area_px(&rasterize(state, &frame, &TriangleSet::All)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Scene, SimParams, Simulator};

    fn flat() -> (Simulator, SimState) {
        let sim = Simulator::new(SimParams::default(), Scene::empty()).unwrap();
        let s = sim.flat_state(0.0, 0.0, 0.0);
        (sim, s)
    }

    #[test]
    fn flat_square_area() {
        let (_, s) = flat();
        let a = project_area(&s);
        assert!((a - 90_000.0).abs() <= 900.0, "{a}");
    }

    #[test]
    fn folded_in_half_area() {
        let (_, mut s) = flat();
        for p in s.pos.iter_mut() {
            if p.x > 0.0 {
                p.x = -p.x;
                p.z = 0.001;
            }
        }
        let a = project_area(&s);
        assert!((a - 45_000.0).abs() <= 900.0, "{a}");
    }

    #[test]
    fn coincident_points_have_no_area() {
        let (_, mut s) = flat();
        for p in s.pos.iter_mut() {
            *p = nalgebra::Vector3::new(0.01, 0.02, 0.0);
        }
        assert_eq!(project_area(&s), 0.0);
    }

    #[test]
    fn triangle_indexing() {
        let t = triangles(3, 2);
        assert_eq!(t, vec![[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]]);
    }

    #[test]
    fn subsets_partition_the_cloth() {
        let (_, s) = flat();
        let n = triangles(s.nx, s.ny).len();
        let frame = Frame::around(&[&s]);
        let left = TriangleSet::Only((0..n).map(|t| (t / 2) % (s.nx - 1) < 10).collect());
        let right = TriangleSet::Only((0..n).map(|t| (t / 2) % (s.nx - 1) >= 10).collect());
        let l = area_px(&rasterize(&s, &frame, &left));
        let r = area_px(&rasterize(&s, &frame, &right));
        let all = area_px(&rasterize(&s, &frame, &TriangleSet::All));
        assert!(l + r >= all && l + r <= all + 400);
        assert!((l as i64 - r as i64).abs() <= 400);
    }
}
