//! Window filters with clamp-to-edge borders.
//!
//! A window of half-size `r` at index `i` covers indices `i-r..=i+r`, each
//! clamped into the valid range, so edge samples are repeated.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::raster::Plane;

/// Sliding minimum of a line. Clamped indices only repeat edge samples, so the
/// min over the clamped window equals the min over its in-range part.
fn min_line(input: &[f64], r: usize, out: &mut [f64]) {
    let n = input.len();
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let hi = (i + r).min(n - 1);
        while next <= hi {
            while deque.back().is_some_and(|&b| input[b] >= input[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        let lo = i.saturating_sub(r);
        while deque.front().is_some_and(|&f| f < lo) {
            deque.pop_front();
        }
        *o = input[*deque.front().expect("window is never empty")];
    }
}

/// Separable (2r+1)² minimum filter.
pub fn min_filter(plane: &Plane, r: usize) -> Plane {
    let (w, h) = plane.dims();
    if r == 0 || w == 0 || h == 0 {
        return plane.clone();
    }
    let mut rows = vec![0.0; w * h];
    for (src, dst) in plane.data().chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        min_line(src, r, dst);
    }
    let mut out = vec![0.0; w * h];
    let mut col = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows[y * w + x];
        }
        min_line(&col, r, &mut col_out);
        for y in 0..h {
            out[y * w + x] = col_out[y];
        }
    }
    Plane::new(w, h, out).expect("dims preserved")
}

/// Windowed sum of a line with clamped indices, via a prefix sum.
fn box_line(input: &[f64], r: usize, out: &mut [f64]) {
    let n = input.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in input {
        acc += v;
        prefix.push(acc);
    }
    let span = (2 * r + 1) as f64;
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(r);
        let hi = (i + r).min(n - 1);
        let left_pad = r.saturating_sub(i) as f64;
        let right_pad = (i + r).saturating_sub(n - 1) as f64;
        let inner = prefix[hi + 1] - prefix[lo];
        *o = (inner + left_pad * input[0] + right_pad * input[n - 1]) / span;
    }
}

/// Separable (2r+1)² box mean.
pub fn box_mean(plane: &Plane, r: usize) -> Plane {
    let (w, h) = plane.dims();
    if r == 0 || w == 0 || h == 0 {
        return plane.clone();
    }
    let mut rows = vec![0.0; w * h];
    for (src, dst) in plane.data().chunks_exact(w).zip(rows.chunks_exact_mut(w)) {
        box_line(src, r, dst);
    }
    let mut out = vec![0.0; w * h];
    let mut col = vec![0.0; h];
    let mut col_out = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows[y * w + x];
        }
        box_line(&col, r, &mut col_out);
        for y in 0..h {
            out[y * w + x] = col_out[y];
        }
    }
    Plane::new(w, h, out).expect("dims preserved")
}

/// Exact (2r+1)² median with clamped indices. Rows run in parallel; each
/// output sample depends only on the input, so the result is order-independent.
pub fn median_filter(plane: &Plane, r: usize) -> Plane {
    let (w, h) = plane.dims();
    if r == 0 || w == 0 || h == 0 {
        return plane.clone();
    }
    let side = 2 * r + 1;
    let mid = side * side / 2;
    let data: Vec<f64> = (0..h)
        .into_par_iter()
        .flat_map_iter(|y| {
            let mut window = Vec::with_capacity(side * side);
            (0..w)
                .map(|x| {
                    window.clear();
                    for dy in 0..side {
                        let yy = (y + dy).saturating_sub(r).min(h - 1);
                        let row = &plane.data()[yy * w..(yy + 1) * w];
                        for dx in 0..side {
                            let xx = (x + dx).saturating_sub(r).min(w - 1);
                            window.push(row[xx]);
                        }
                    }
                    *window.select_nth_unstable_by(mid, f64::total_cmp).1
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Plane::new(w, h, data).expect("dims preserved")
}
