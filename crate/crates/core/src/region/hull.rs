use super::{PlaneKind, Polyline, RegionPoint};
use crate::error::Result;

use super::sweep::fold_grid;

/// Cross products at or below this are treated as collinear and the middle point dropped.
pub const HULL_TOL: f64 = 1e-12;

fn cross(o: &RegionPoint, a: &RegionPoint, b: &RegionPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain. Vertices run counter-clockwise from the
/// lowest of the leftmost points; the first vertex is not repeated at the end.
pub fn convex_hull(mut points: Vec<RegionPoint>) -> Vec<RegionPoint> {
    points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    points.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if points.len() < 3 {
        return points;
    }
    let mut hull: Vec<RegionPoint> = Vec::with_capacity(2 * points.len());
    for p in points.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= HULL_TOL
        {
            hull.pop();
        }
        hull.push(p.clone());
    }
    let lower_len = hull.len() + 1;
    for p in points.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= HULL_TOL
        {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull.pop();
    hull
}

/// Boundary of the region reachable by averaging over outcomes: the convex hull of
/// the swept single-outcome region.
pub fn averaged_region(d: usize, plane: PlaneKind, step: f64) -> Result<Polyline> {
    let chunks = fold_grid(
        d,
        step,
        Vec::new,
        |acc: &mut Vec<(f64, f64, Vec<usize>)>, p| {
            let (x, y) = plane.project(&p.measures);
            acc.push((x, y, p.levels.to_vec()));
        },
    )?;
    let n = (1.0 / step).round();
    let to_point = |(x, y, levels): (f64, f64, Vec<usize>)| RegionPoint {
        x,
        y,
        source_spectrum: crate::spectrum::SingularSpectrum::new(
            levels.iter().map(|&a| a as f64 / n).collect(),
        )
        .expect("grid spectra are valid"),
    };
    let mut candidates = Vec::new();
    for chunk in chunks {
        candidates.extend(convex_hull(chunk.into_iter().map(to_point).collect()));
    }
    Ok(Polyline {
        label: "hull".into(),
        points: convex_hull(candidates),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SingularSpectrum;

    fn pt(x: f64, y: f64) -> RegionPoint {
        RegionPoint {
            x,
            y,
            source_spectrum: SingularSpectrum::new(vec![1.0, 0.0]).unwrap(),
        }
    }

    #[test]
    fn square_with_interior_and_edge_points() {
        let pts = vec![
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(1.0, 1.0),
            pt(0.0, 1.0),
            pt(0.5, 0.5),
            pt(0.5, 0.0),
            pt(0.2, 0.7),
        ];
        let hull = convex_hull(pts);
        let xy: Vec<(f64, f64)> = hull.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    }

    #[test]
    fn hull_is_idempotent() {
        let pts: Vec<RegionPoint> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.731;
                pt(t.cos() * (1.0 + 0.3 * (3.0 * t).sin()), t.sin())
            })
            .collect();
        let once = convex_hull(pts);
        let twice = convex_hull(once.clone());
        assert_eq!(once, twice);
    }
}
