use super::Point;

/// Area of the polygon through all positions, visited in order of angle
/// about their centroid (shoelace formula). Fewer than three points give 0.
pub fn coverage_area(positions: &[Point]) -> f64 {
    if positions.len() < 3 {
        return 0.0;
    }
    let centroid = positions.iter().sum::<Point>() / positions.len() as f64;
    let mut ring: Vec<(f64, f64, Point)> = positions
        .iter()
        .map(|p| {
            let d = p - centroid;
            (d.y.atan2(d.x), d.norm_squared(), *p)
        })
        .collect();
    ring.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = ring.len();
    let twice: f64 = (0..n)
        .map(|k| {
            let p = ring[k].2 - centroid;
            let q = ring[(k + 1) % n].2 - centroid;
            p.x * q.y - q.x * p.y
        })
        .sum();
    0.5 * twice.abs()
}

/// Area of the union of sensing disks of radius `r_s`, estimated on a grid
/// with `r_s / 20` spacing.
pub fn sensing_area(positions: &[Point], r_s: f64) -> f64 {
    if positions.is_empty() || !(r_s > 0.0) {
        return 0.0;
    }
    let h = r_s / 20.0;
    let (lo, hi) = positions.iter().fold(
        (
            Point::repeat(f64::INFINITY),
            Point::repeat(f64::NEG_INFINITY),
        ),
        |(lo, hi), p| (lo.inf(p), hi.sup(p)),
    );
    let lo = lo - Point::repeat(r_s);
    let nx = ((hi.x + r_s - lo.x) / h).ceil() as usize;
    let ny = ((hi.y + r_s - lo.y) / h).ceil() as usize;
    let r2 = r_s * r_s;
    let mut covered = 0usize;
    for iy in 0..ny {
        for ix in 0..nx {
            let c = lo + Point::new((ix as f64 + 0.5) * h, (iy as f64 + 0.5) * h);
            if positions.iter().any(|p| (p - c).norm_squared() <= r2) {
                covered += 1;
            }
        }
    }
    covered as f64 * h * h
}

/// Smallest pairwise separation; infinite for fewer than two points.
pub fn min_pair_distance(positions: &[Point]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in positions.iter().enumerate() {
        for q in &positions[i + 1..] {
            best = best.min((p - q).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn simple_polygons() {
        assert_eq!(
            coverage_area(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])),
            1.0
        );
        assert!((coverage_area(&pts(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)])) - 2.0).abs() < 1e-15);
        assert_eq!(coverage_area(&pts(&[(0.0, 0.0), (5.0, 1.0)])), 0.0);
        assert_eq!(coverage_area(&pts(&[(3.0, 3.0)])), 0.0);
    }

    #[test]
    fn order_of_input_does_not_matter() {
        let a = pts(&[(0.0, 1.0), (1.0, 0.0), (0.0, 0.0), (1.0, 1.0), (0.5, 3.0)]);
        let mut b = a.clone();
        b.reverse();
        b.swap(0, 2);
        assert_eq!(coverage_area(&a), coverage_area(&b));
    }

    #[test]
    fn star_polygon_through_interior_point() {
        // the interior point becomes a notch of the polygon
        let a = coverage_area(&pts(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 4.0),
            (0.0, 4.0),
            (2.0, 1.0),
        ]));
        assert!(a < 16.0 && a > 0.0);
    }

    #[test]
    fn sensing_disks() {
        let one = sensing_area(&pts(&[(0.0, 0.0)]), 2.5);
        let disk = std::f64::consts::PI * 6.25;
        assert!((one - disk).abs() / disk < 0.01);
        let apart = sensing_area(&pts(&[(0.0, 0.0), (10.0, 0.0)]), 2.5);
        assert!((apart - 2.0 * one).abs() / apart < 1e-3);
        let overlapping = sensing_area(&pts(&[(0.0, 0.0), (1.0, 0.0)]), 2.5);
        assert!(overlapping < 2.0 * one && overlapping > one);
    }

    #[test]
    fn pair_distance() {
        assert_eq!(min_pair_distance(&pts(&[(0.0, 0.0)])), f64::INFINITY);
        assert_eq!(
            min_pair_distance(&pts(&[(0.0, 0.0), (3.0, 4.0), (3.0, 5.0)])),
            1.0
        );
    }
}
