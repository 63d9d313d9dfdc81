use super::{Obstacle, Point, SwarmState, VirtualForceParams};

/// Separations below this are treated as this, capping the `1/r` forces.
pub const DISTANCE_FLOOR: f64 = 1e-6;

/// Width of the band below the communication range over which lander
/// repulsion fades out.
pub const TAPER_WIDTH: f64 = 1.0;

/// Width of the band below the communication range over which a link counts
/// only partially toward the spring gate.
pub const LINK_BAND: f64 = 0.5;

fn unit_and_distance(from: &Point, to: &Point) -> (Point, f64) {
    let d = from - to;
    let r = d.norm();
    if r < DISTANCE_FLOOR {
        // Direction is arbitrary for (near-)coincident points; keep it finite.
        let dir = if r > 0.0 { d / r } else { Point::x() };
        (dir, DISTANCE_FLOOR)
    } else {
        (d / r, r)
    }
}

/// Repulsion of lander `i` from lander `j`, magnitude `c_cov / r`.
pub fn f_cov(r_i: &Point, r_j: &Point, c_cov: f64) -> Point {
    let (u, r) = unit_and_distance(r_i, r_j);
    u * (c_cov / r)
}

/// Spring of stiffness `c_com` pulling `i` toward `j` while `degree_i < required`.
pub fn f_com(r_i: &Point, r_j: &Point, c_com: f64, degree_i: usize, required: usize) -> Point {
    if degree_i >= required {
        return Point::zeros();
    }
    -(r_i - r_j) * c_com
}

/// Repulsion of lander `i` from an obstacle at `r_l`, magnitude `c_obs / r`.
pub fn f_obs(r_i: &Point, r_l: &Point, c_obs: f64) -> Point {
    f_cov(r_i, r_l, c_obs)
}

/// Number of other landers within `r_c` of lander `i`.
pub fn degree(i: usize, positions: &[Point], r_c: f64) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|&(j, p)| j != i && (p - positions[i]).norm() <= r_c)
        .count()
}

pub fn degrees(positions: &[Point], r_c: f64) -> Vec<usize> {
    (0..positions.len())
        .map(|i| degree(i, positions, r_c))
        .collect()
}

/// Total virtual force on lander `i`.
///
/// Landers within communication range repel `i`, fading out over the last
/// [`TAPER_WIDTH`] before `r_c`. The spring acts only toward the `degree`
/// nearest landers, and for each such `j` it is gated on how many links `i`
/// has besides `j` itself, so a lander holding exactly the required number of
/// links keeps them. Links are counted with a weight that drops from 1 to 0
/// over the last [`LINK_BAND`] before `r_c`, which makes the gate continuous.
/// Obstacles repel only within `r_c`, with the same fade as landers.
pub fn net_force(i: usize, state: &SwarmState, params: &VirtualForceParams) -> Point {
    let positions = &state.positions;
    let own = positions[i];
    let mut force = Point::zeros();

    let mut others: Vec<(f64, usize)> = Vec::with_capacity(positions.len());
    for (j, p) in positions.iter().enumerate() {
        if j == i {
            continue;
        }
        let r = (own - p).norm();
        let w = taper(r, params.r_c);
        if w > 0.0 {
            force += f_cov(&own, p, params.c_cov) * w;
        }
        others.push((r, j));
    }

    if params.degree > 0 && params.c_com > 0.0 {
        let links: f64 = others
            .iter()
            .map(|&(r, _)| link_weight(r, params.r_c))
            .sum();
        let k = params.degree.min(others.len());
        if k > 0 && k < others.len() {
            others.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let required = params.degree as f64;
        for &(r, j) in &others[..k] {
            let besides_j = links - link_weight(r, params.r_c);
            let gate = (required - besides_j).clamp(0.0, 1.0);
            if gate > 0.0 {
                force += f_com(&own, &positions[j], params.c_com, 0, 1) * gate;
            }
        }
    }

    force + obstacle_force(&own, &state.obstacles, params.c_obs, params.r_c)
}

/// [`net_force`] for every lander at once, sharing the pairwise distances.
pub fn net_forces(state: &SwarmState, params: &VirtualForceParams) -> Vec<Point> {
    let positions = &state.positions;
    let n = positions.len();
    let r_c2 = params.r_c * params.r_c;
    let mut dist2 = vec![0.0; n * n];
    let mut links = vec![0.0; n];
    let mut forces = vec![Point::zeros(); n];
    for i in 0..n {
        for j in i + 1..n {
            let d = positions[i] - positions[j];
            let r2 = d.norm_squared();
            dist2[i * n + j] = r2;
            dist2[j * n + i] = r2;
            if r2 >= r_c2 {
                continue;
            }
            let r = r2.sqrt();
            let lw = link_weight(r, params.r_c);
            links[i] += lw;
            links[j] += lw;
            let w = taper(r, params.r_c);
            if w > 0.0 {
                let f = f_cov(&positions[i], &positions[j], params.c_cov) * w;
                forces[i] += f;
                forces[j] -= f;
            }
        }
    }

    if params.degree > 0 && params.c_com > 0.0 && n > 1 {
        let required = params.degree as f64;
        let mut others: Vec<(f64, usize)> = Vec::with_capacity(n);
        for i in 0..n {
            // every gate is shut when the links besides any one still number `degree`
            if links[i] - 1.0 >= required {
                continue;
            }
            others.clear();
            others.extend(
                dist2[i * n..(i + 1) * n]
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &r2)| (r2, j)),
            );
            let k = params.degree.min(others.len());
            if k < others.len() {
                others
                    .select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            }
            for &(r2, j) in &others[..k] {
                let besides_j = links[i] - link_weight(r2.sqrt(), params.r_c);
                let gate = (required - besides_j).clamp(0.0, 1.0);
                if gate > 0.0 {
                    forces[i] += f_com(&positions[i], &positions[j], params.c_com, 0, 1) * gate;
                }
            }
        }
    }

    for (f, p) in forces.iter_mut().zip(positions) {
        *f += obstacle_force(p, &state.obstacles, params.c_obs, params.r_c);
    }
    forces
}

/// 1 up to `LINK_BAND` short of `r_c`, linearly down to 0 at `r_c`.
fn link_weight(r: f64, r_c: f64) -> f64 {
    ((r_c - r) / LINK_BAND).clamp(0.0, 1.0)
}

/// 1 up to one unit short of `r_c`, smoothly down to 0 at `r_c`.
fn taper(r: f64, r_c: f64) -> f64 {
    let start = (r_c - TAPER_WIDTH).max(0.0);
    if r <= start {
        1.0
    } else if r >= r_c {
        0.0
    } else {
        let x = (r_c - r) / (r_c - start);
        x * x * (3.0 - 2.0 * x)
    }
}

fn obstacle_force(own: &Point, obstacles: &[Obstacle], c_obs: f64, r_c: f64) -> Point {
    obstacles
        .iter()
        .map(|o| f_obs(own, &o.center, c_obs * o.strength) * taper((own - o.center).norm(), r_c))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn coverage_force_values() {
        assert_eq!(f_cov(&p(1.0, 0.0), &p(0.0, 0.0), 1.0), p(1.0, 0.0));
        assert_eq!(f_cov(&p(2.0, 0.0), &p(0.0, 0.0), 1.0), p(0.5, 0.0));
        let a = p(0.3, -1.7);
        let b = p(2.2, 0.4);
        assert_eq!(f_cov(&a, &b, 2.5), -f_cov(&b, &a, 2.5));
    }

    #[test]
    fn coverage_force_is_capped() {
        let f = f_cov(&p(0.0, 0.0), &p(0.0, 0.0), 1.0);
        assert!(f.norm().is_finite());
        assert!((f.norm() - 1.0 / DISTANCE_FLOOR).abs() < 1e-3);
    }

    #[test]
    fn communication_force_values() {
        assert_eq!(f_com(&p(2.0, 0.0), &p(0.0, 0.0), 1.0, 3, 3), p(0.0, 0.0));
        assert_eq!(f_com(&p(2.0, 0.0), &p(0.0, 0.0), 1.0, 2, 3), p(-2.0, 0.0));
        let near = f_com(&p(1.0, 1.0), &p(0.0, 0.0), 0.7, 0, 1);
        let far = f_com(&p(2.0, 2.0), &p(0.0, 0.0), 0.7, 0, 1);
        assert!((far.norm() - 2.0 * near.norm()).abs() < 1e-15);
    }

    #[test]
    fn obstacle_force_values() {
        let f = f_obs(&p(0.0, 3.0), &p(0.0, 0.0), 3.0);
        assert!((f - p(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(f_obs(&p(4.0, 1.0), &p(0.0, 0.0), 0.0), p(0.0, 0.0));
    }

    #[test]
    fn degree_counts() {
        let pos = [p(0.0, 0.0), p(3.0, 0.0), p(10.0, 0.0)];
        assert_eq!(degrees(&pos, 5.0), vec![1, 1, 0]);
        assert_eq!(degree(0, &[p(0.0, 0.0)], 5.0), 0);
        let bunch: Vec<Point> = (0..6).map(|k| p(0.1 * k as f64, 0.0)).collect();
        assert!(degrees(&bunch, 5.0).iter().all(|&d| d == 5));
    }

    #[test]
    fn net_force_hand_sums() {
        let params = VirtualForceParams {
            c_com: 0.0,
            ..Default::default()
        };
        let single = SwarmState::new(vec![p(1.0, 1.0)], vec![]).unwrap();
        assert_eq!(net_force(0, &single, &params), p(0.0, 0.0));

        let tri = SwarmState::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], vec![]).unwrap();
        let f = net_force(0, &tri, &params);
        assert!((f - p(-1.0, -1.0)).norm() < 1e-15);

        let pair = SwarmState::new(vec![p(-1.5, 0.5), p(1.5, -0.5)], vec![]).unwrap();
        assert_eq!(net_force(0, &pair, &params), -net_force(1, &pair, &params));
    }

    #[test]
    fn spring_only_toward_nearest_and_held_at_required_degree() {
        let params = VirtualForceParams {
            c_cov: 1e-12,
            c_com: 1.0,
            degree: 1,
            ..Default::default()
        };
        // lander 0 has exactly one link (to 1); the spring to 1 stays on,
        // the far lander 2 is not among its nearest and never pulls.
        let s = SwarmState::new(vec![p(0.0, 0.0), p(2.0, 0.0), p(0.0, -20.0)], vec![]).unwrap();
        let f = net_force(0, &s, &params);
        assert!((f - p(2.0, 0.0)).norm() < 1e-9, "{f:?}");
        // with two links besides, no spring at all
        let s = SwarmState::new(vec![p(0.0, 0.0), p(2.0, 0.0), p(0.0, -3.0)], vec![]).unwrap();
        assert!(net_force(0, &s, &params).norm() < 1e-9);
    }

    #[test]
    fn batched_forces_match_single() {
        let mut s = SwarmState::random(
            30,
            p(0.0, 0.0),
            9.0,
            vec![Obstacle::new(p(1.0, -1.0), 2.0)],
            4,
        )
        .unwrap();
        s.obstacles[0].strength = 10.0;
        for degree in [0, 1, 3, 6] {
            let params = VirtualForceParams {
                degree,
                ..Default::default()
            };
            let all = net_forces(&s, &params);
            for (i, f) in all.iter().enumerate() {
                let one = net_force(i, &s, &params);
                assert!(
                    (f - one).norm() <= 1e-12 * (1.0 + one.norm()),
                    "{i}: {f:?} {one:?}"
                );
            }
        }
    }
}
