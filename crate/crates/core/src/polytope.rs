//! Exact volume and centroid of small convex polytopes given by vertex lists.
//!
//! Facets are found by brute force over vertex subsets, which is fine for the
//! few dozen vertices the cone families produce in dimension three and up.
//! Planar polygons go through a monotone-chain hull instead.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{self, orthonormal_complement, Frame, Matrix, Vector};

/// Upper bound on vertex subsets examined by the brute-force facet search.
pub const MAX_FACET_CANDIDATES: u64 = 5_000_000;

/// Facet of a full-dimensional polytope: `normal · y ≤ offset` for every vertex,
/// with equality on `members`. `normal` is the outward unit normal.
#[derive(Debug, Clone)]
pub struct Facet {
    pub normal: Vector,
    pub offset: f64,
    pub members: Vec<usize>,
}

fn cross2(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull of planar points (indices), without
/// collinear points on edges.
pub fn hull_2d(points: &[Vector]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let scale = linalg::diameter(&[points[idx[0]].clone(), points[*idx.last().unwrap()].clone()]);
    let eps = 1e-14 * scale * scale;
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&points[lower[lower.len() - 2]], &points[lower[lower.len() - 1]], &points[i]) <= eps
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&points[upper[upper.len() - 2]], &points[upper[upper.len() - 1]], &points[i]) <= eps
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Signed area and area centroid of a simple polygon (vertices in order).
pub fn shoelace(vertices: &[Vector]) -> (f64, Vector) {
    let n = vertices.len();
    let (mut area2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    // Shift to the first vertex to limit cancellation.
    let o = &vertices[0];
    for i in 0..n {
        let a = &vertices[i] - o;
        let b = &vertices[(i + 1) % n] - o;
        let w = a[0] * b[1] - b[0] * a[1];
        area2 += w;
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
    }
    let area = area2 / 2.0;
    let c = linalg::vector(&[o[0] + cx / (3.0 * area2), o[1] + cy / (3.0 * area2)]);
    (area, c)
}

/// Normal of the hyperplane through `k` points in `k` dimensions, via signed
/// minors of the difference matrix. Returns `None` for degenerate subsets.
fn normal_through(points: &[&Vector]) -> Option<Vector> {
    let k = points[0].len();
    let base = points[0];
    let mut diffs = Matrix::zeros(k - 1, k);
    for (r, p) in points[1..].iter().enumerate() {
        diffs.set_row(r, &(*p - base).transpose());
    }
    let mut normal = Vector::zeros(k);
    for j in 0..k {
        let minor = diffs.clone().remove_column(j);
        let det = if minor.nrows() == 0 { 1.0 } else { linalg::determinant(&minor) };
        normal[j] = if j % 2 == 0 { det } else { -det };
    }
    let n = normal.norm();
    let scale: f64 = diffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if n <= 1e-12 * scale.powi(k as i32 - 1) || n == 0.0 {
        None
    } else {
        Some(normal / n)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k as u64 {
        r = r.saturating_mul(n as u64 - i) / (i + 1);
    }
    r
}

/// Advances `combo` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All facets of the convex hull of a full-dimensional point set in `k ≥ 2` dims.
pub fn facets(points: &[Vector]) -> Result<Vec<Facet>> {
    let k = points.first().ok_or(Error::Empty("polytope vertices"))?.len();
    if k < 2 {
        return Err(Error::InvalidParameter("facets need dimension ≥ 2".into()));
    }
    let n = points.len();
    if n < k + 1 {
        return Err(Error::Degenerate(format!("{n} points cannot span {k} dimensions")));
    }
    let center = linalg::mean(points);
    // Within a factor 2 of the diameter, without the quadratic pass.
    let scale = 2.0 * points.iter().map(|p| (p - &center).norm()).fold(0.0, f64::max);
    let eps = 1e-10 * scale;

    if k == 2 {
        let order = hull_2d(points);
        if order.len() < 3 {
            return Err(Error::Degenerate("polygon hull is degenerate".into()));
        }
        let h = order.len();
        let mut out: Vec<Facet> = (0..h)
            .map(|i| {
                let a = &points[order[i]];
                let b = &points[order[(i + 1) % h]];
                let e = b - a;
                let normal = linalg::vector(&[e[1], -e[0]]).normalize();
                let offset = normal.dot(a);
                Facet { normal, offset, members: Vec::new() }
            })
            .collect();
        // Each point can only touch the edge whose angular sector (seen from
        // the centroid) contains it, or the two neighbours of that edge.
        let angle = |p: &Vector| (p[1] - center[1]).atan2(p[0] - center[0]);
        let mut sectors: Vec<(f64, usize)> = (0..h).map(|i| (angle(&points[order[i]]), i)).collect();
        sectors.sort_by(|a, b| a.0.total_cmp(&b.0));
        let angles: Vec<f64> = sectors.iter().map(|s| s.0).collect();
        for (j, p) in points.iter().enumerate() {
            let k = match angles.partition_point(|&a| a <= angle(p)) {
                0 => h - 1,
                i => i - 1,
            };
            let edge = sectors[k].1;
            for s in [edge + h - 1, edge, edge + 1] {
                let f = &mut out[s % h];
                if (f.normal.dot(p) - f.offset).abs() <= eps && !f.members.contains(&j) {
                    f.members.push(j);
                }
            }
        }
        for f in &mut out {
            f.members.sort_unstable();
        }
        return Ok(out);
    }

    if binomial(n, k) > MAX_FACET_CANDIDATES {
        return Err(Error::InvalidParameter(format!(
            "{n} vertices in dimension {k} exceed the brute-force facet budget"
        )));
    }
    let mut found: Vec<Facet> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let covered = found
            .iter()
            .any(|f| combo.iter().all(|c| f.members.binary_search(c).is_ok()));
        if !covered {
            let subset: Vec<&Vector> = combo.iter().map(|&i| &points[i]).collect();
            if let Some(mut normal) = normal_through(&subset) {
                let mut offset = normal.dot(subset[0]);
                if normal.dot(&center) > offset {
                    normal = -normal;
                    offset = -offset;
                }
                let supporting = points.iter().all(|p| normal.dot(p) - offset <= eps);
                if supporting {
                    let members: Vec<usize> = (0..n)
                        .filter(|&j| (normal.dot(&points[j]) - offset).abs() <= eps)
                        .collect();
                    if seen.insert(members.clone()) {
                        found.push(Facet { normal, offset, members });
                    }
                }
            }
        }
        if !next_combination(&mut combo, n) {
            break;
        }
    }
    if found.len() < k + 1 {
        return Err(Error::Degenerate("point set is not full-dimensional".into()));
    }
    Ok(found)
}

/// Volume and centroid of the convex hull of a full-dimensional point set.
///
/// Recursive pyramid decomposition: each facet is coned to an interior point,
/// and a pyramid over a base with centroid `b` has centroid `c + k/(k+1)(b − c)`.
pub fn centroid_volume(points: &[Vector]) -> Result<(f64, Vector)> {
    let k = points.first().ok_or(Error::Empty("polytope vertices"))?.len();
    match k {
        0 => Err(Error::Empty("polytope dimension")),
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi <= lo {
                return Err(Error::Degenerate("segment has zero length".into()));
            }
            Ok((hi - lo, linalg::vector(&[0.5 * (lo + hi)])))
        }
        2 => {
            let order = hull_2d(points);
            if order.len() < 3 {
                return Err(Error::Degenerate("polygon hull is degenerate".into()));
            }
            let verts: Vec<Vector> = order.iter().map(|&i| points[i].clone()).collect();
            let (area, c) = shoelace(&verts);
            Ok((area.abs(), c))
        }
        _ => {
            let fs = facets(points)?;
            let hull: BTreeSet<usize> = fs.iter().flat_map(|f| f.members.iter().copied()).collect();
            let hull_points: Vec<Vector> = hull.iter().map(|&i| points[i].clone()).collect();
            let apex = linalg::mean(&hull_points);
            let mut volume = 0.0;
            let mut moment = Vector::zeros(k);
            for f in &fs {
                let height = f.offset - f.normal.dot(&apex);
                let anchor = &points[f.members[0]];
                let frame = Frame::new(anchor.clone(), orthonormal_complement(&f.normal));
                let local: Vec<Vector> = f.members.iter().map(|&i| frame.to_local(&points[i])).collect();
                let (base_vol, base_c) = centroid_volume(&local)?;
                let base_c = frame.to_global(&base_c);
                let vol = height * base_vol / k as f64;
                let c = &apex + (&base_c - &apex) * (k as f64 / (k as f64 + 1.0));
                volume += vol;
                moment += c * vol;
            }
            Ok((volume, moment / volume))
        }
    }
}
