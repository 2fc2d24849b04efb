use nalgebra::{Matrix3, Vector3};

use crate::diagnostics::contour::{Contour, Point, Polyline};
use crate::error::{Error, Result};

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Distance from `p` to the nearest point of the contour, with that point.
pub fn nearest_on_contour(p: Point, c: &Contour) -> Option<(f64, Point)> {
    let mut best: Option<(f64, Point)> = None;
    for pl in &c.polylines {
        let mut consider = |a: Point, b: Point| {
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len2 = dx * dx + dy * dy;
            let t = if len2 > 0.0 {
                (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let q = (a.0 + t * dx, a.1 + t * dy);
            let d = (p.0 - q.0).hypot(p.1 - q.1);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, q));
            }
        };
        if pl.points.len() == 1 {
            consider(pl.points[0], pl.points[0]);
        }
        for (a, b) in pl.segments() {
            consider(a, b);
        }
    }
    best
}

fn directed(a: &Contour, b: &Contour) -> f64 {
    let mut worst: f64 = 0.0;
    for p in a.points() {
        let mut d = f64::INFINITY;
        for pl in &b.polylines {
            if pl.points.len() == 1 {
                d = d.min((p.0 - pl.points[0].0).hypot(p.1 - pl.points[0].1));
            }
            for (s, e) in pl.segments() {
                d = d.min(point_segment_distance(p, s, e));
            }
        }
        worst = worst.max(d);
    }
    worst
}

/// Symmetric Hausdorff distance: vertices of each contour against the
/// segments of the other.
pub fn hausdorff(a: &Contour, b: &Contour) -> Result<f64> {
    if a.n_points() == 0 || b.n_points() == 0 {
        return Err(Error::Empty("hausdorff distance of an empty contour".into()));
    }
    Ok(directed(a, b).max(directed(b, a)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: Point,
    pub radius: f64,
    /// Root-mean-square radial residual.
    pub rms: f64,
}

fn single_closed(c: &Contour) -> Result<&Polyline> {
    match c.polylines.as_slice() {
        [p] if p.closed && p.points.len() >= 3 => Ok(p),
        [_] => Err(Error::Degenerate("polyline is not closed".into())),
        [] => Err(Error::Empty("contour has no polyline".into())),
        _ => Err(Error::Degenerate(format!(
            "expected one polyline, found {}",
            c.polylines.len()
        ))),
    }
}

/// Algebraic (Kasa) least-squares circle through the vertices of a single
/// polyline.
pub fn circle_fit(c: &Contour) -> Result<CircleFit> {
    let pl = single_closed(c)?;
    let n = pl.points.len() as f64;
    let (mx, my) = pl.points.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1));
    let (mx, my) = (mx / n, my / n);
    // minimise sum (x^2 + y^2 + D x + E y + F)^2 in centred coordinates
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for p in &pl.points {
        let (x, y) = (p.0 - mx, p.1 - my);
        let row = Vector3::new(x, y, 1.0);
        ata += row * row.transpose();
        atb += row * (-(x * x + y * y));
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Degenerate("collinear points".into()))?;
    let (cx, cy) = (-0.5 * sol[0], -0.5 * sol[1]);
    let r2 = cx * cx + cy * cy - sol[2];
    let extent = pl
        .points
        .iter()
        .map(|p| (p.0 - mx).hypot(p.1 - my))
        .fold(0.0, f64::max);
    if !(r2 > 0.0) || !r2.is_finite() || r2.sqrt() > 1e6 * extent.max(1e-300) {
        return Err(Error::Degenerate("points do not determine a circle".into()));
    }
    let radius = r2.sqrt();
    let center = (cx + mx, cy + my);
    let ss: f64 = pl
        .points
        .iter()
        .map(|p| {
            let d = (p.0 - center.0).hypot(p.1 - center.1) - radius;
            d * d
        })
        .sum();
    Ok(CircleFit {
        center,
        radius,
        rms: (ss / n).sqrt(),
    })
}

/// `4 pi A / P^2` of a single closed polyline.
pub fn isoperimetric_ratio(c: &Contour) -> Result<f64> {
    let pl = single_closed(c)?;
    let a = pl.signed_area().abs();
    let p = pl.perimeter();
    if !(a > 0.0) || !(p > 0.0) {
        return Err(Error::Degenerate("zero area or perimeter".into()));
    }
    Ok(4.0 * std::f64::consts::PI * a / (p * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(cx: f64, cy: f64, r: f64, n: usize) -> Contour {
        Contour {
            polylines: vec![Polyline {
                points: (0..n)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / n as f64;
                        (cx + r * t.cos(), cy + r * t.sin())
                    })
                    .collect(),
                closed: true,
            }],
        }
    }

    #[test]
    fn hausdorff_basics() {
        let a = circle(0.5, 0.5, 0.3, 400);
        let b = circle(0.5, 0.5, 0.32, 400);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let d = hausdorff(&a, &b).unwrap();
        assert!((d - 0.02).abs() < 1e-4, "{d}");
        assert_eq!(hausdorff(&a, &b).unwrap(), hausdorff(&b, &a).unwrap());
        assert!(hausdorff(&a, &Contour::default()).is_err());
    }

    #[test]
    fn circle_fit_exact_and_noisy() {
        let c = circle(0.4, 0.6, 0.25, 200);
        let f = circle_fit(&c).unwrap();
        assert!(f.rms <= 1e-12);
        assert!((f.radius - 0.25).abs() < 1e-12);
        assert!((f.center.0 - 0.4).abs() < 1e-12 && (f.center.1 - 0.6).abs() < 1e-12);

        let delta = 1e-3;
        let noisy = Contour {
            polylines: vec![Polyline {
                points: (0..720)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / 720.0;
                        let r = 0.25 + delta * (7.0 * t).sin();
                        (0.5 + r * t.cos(), 0.5 + r * t.sin())
                    })
                    .collect(),
                closed: true,
            }],
        };
        let f = circle_fit(&noisy).unwrap();
        assert!((f.rms / (delta / 2f64.sqrt()) - 1.0).abs() < 0.05, "{}", f.rms);
    }

    #[test]
    fn circle_fit_translation_equivariant() {
        let a = circle_fit(&circle(0.3, 0.3, 0.1, 50)).unwrap();
        let b = circle_fit(&circle(0.3 + 0.25, 0.3 - 0.125, 0.1, 50)).unwrap();
        assert!((b.center.0 - a.center.0 - 0.25).abs() < 1e-12);
        assert!((b.center.1 - a.center.1 + 0.125).abs() < 1e-12);
    }

    #[test]
    fn circle_fit_rejects_collinear() {
        let c = Contour {
            polylines: vec![Polyline {
                points: (0..10).map(|k| (k as f64, 2.0 * k as f64)).collect(),
                closed: true,
            }],
        };
        assert!(matches!(circle_fit(&c), Err(Error::Degenerate(_))));
    }

    #[test]
    fn isoperimetric_values() {
        let r = isoperimetric_ratio(&circle(0.5, 0.5, 0.3, 256)).unwrap();
        assert!((r - 1.0).abs() <= 1e-3 && r <= 1.0);
        let sq = Contour {
            polylines: vec![Polyline {
                points: vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
                closed: true,
            }],
        };
        assert!((isoperimetric_ratio(&sq).unwrap() - PI / 4.0).abs() < 1e-14);
    }
}
