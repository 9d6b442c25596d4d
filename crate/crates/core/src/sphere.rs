//! Deterministic direction sets on unit spheres, with a simplicial mesh for
//! fan triangulations.
//!
//! Circles use evenly spaced angles. Spheres of dimension two and up use the
//! radially projected surface grid of a subdivided cube; its Kuhn
//! triangulation gives a conforming mesh in every dimension.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;

/// Unit directions in `R^m` plus simplices (index lists of length `m`) whose
/// radial projections tile the sphere.
#[derive(Debug, Clone)]
pub struct DirectionMesh {
    pub directions: Vec<Vector>,
    pub simplices: Vec<Vec<usize>>,
}

pub fn circle_directions(n: usize, phase: f64) -> Vec<Vector> {
    (0..n)
        .map(|k| {
            let t = phase + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            crate::linalg::vector(&[t.cos(), t.sin()])
        })
        .collect()
}

fn cube_vertex_count(m: usize, n: usize) -> u64 {
    (n as u64 + 1).pow(m as u32) - (n as u64).saturating_sub(1).pow(m as u32)
}

/// Smallest subdivision whose cube-surface grid has at least `target` vertices.
pub fn cube_resolution(m: usize, target: usize) -> usize {
    let mut n = 1;
    while cube_vertex_count(m, n) < target as u64 {
        n += 1;
    }
    n
}

fn grid_key_to_direction(key: &[usize], n: usize) -> Vector {
    let v = Vector::from_iterator(key.len(), key.iter().map(|&i| -1.0 + 2.0 * i as f64 / n as f64));
    v.normalize()
}

fn cube_surface_keys(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut keys = Vec::new();
    let mut key = vec![0usize; m];
    loop {
        if key.iter().any(|&i| i == 0 || i == n) {
            keys.push(key.clone());
        }
        let mut axis = 0;
        loop {
            if axis == m {
                return keys;
            }
            key[axis] += 1;
            if key[axis] <= n {
                break;
            }
            key[axis] = 0;
            axis += 1;
        }
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Direction set for an `m`-dimensional flat with at least `target` entries
/// (`m = 1` always yields the two unit directions).
pub fn directions(m: usize, target: usize) -> Vec<Vector> {
    match m {
        0 => Vec::new(),
        1 => vec![crate::linalg::vector(&[1.0]), crate::linalg::vector(&[-1.0])],
        2 => circle_directions(target.max(3), 0.0),
        _ => {
            let n = cube_resolution(m, target);
            cube_surface_keys(m, n).iter().map(|k| grid_key_to_direction(k, n)).collect()
        }
    }
}

/// Directions together with a simplicial mesh; indices match [`directions`].
pub fn direction_mesh(m: usize, target: usize) -> DirectionMesh {
    match m {
        1 => DirectionMesh {
            directions: directions(1, target),
            simplices: vec![vec![0], vec![1]],
        },
        2 => {
            let dirs = directions(2, target);
            let n = dirs.len();
            DirectionMesh {
                directions: dirs,
                simplices: (0..n).map(|i| vec![i, (i + 1) % n]).collect(),
            }
        }
        _ => {
            let n = cube_resolution(m, target);
            let keys = cube_surface_keys(m, n);
            let index: HashMap<Vec<usize>, usize> =
                keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
            let mut simplices = Vec::new();
            for axis in 0..m {
                let free: Vec<usize> = (0..m).filter(|&a| a != axis).collect();
                let perms = permutations(&free);
                for side in [0, n] {
                    // Iterate over cells of the facet grid.
                    let mut cell = vec![0usize; m - 1];
                    'cells: loop {
                        let mut corner = vec![0usize; m];
                        corner[axis] = side;
                        for (f, &a) in free.iter().enumerate() {
                            corner[a] = cell[f];
                        }
                        for perm in &perms {
                            let mut v = corner.clone();
                            let mut simplex = vec![index[&v]];
                            for &a in perm {
                                v[a] += 1;
                                simplex.push(index[&v]);
                            }
                            simplices.push(simplex);
                        }
                        let mut f = 0;
                        loop {
                            if f == m - 1 {
                                break 'cells;
                            }
                            cell[f] += 1;
                            if cell[f] < n {
                                break;
                            }
                            cell[f] = 0;
                            f += 1;
                        }
                    }
                }
            }
            DirectionMesh {
                directions: keys.iter().map(|k| grid_key_to_direction(k, n)).collect(),
                simplices,
            }
        }
    }
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vector {
    loop {
        let v = Vector::from_iterator(m, (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}
