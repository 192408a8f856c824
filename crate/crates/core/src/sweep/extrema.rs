use alloc::vec::Vec;

use super::EntropyMap;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub i: usize,
    pub j: usize,
    pub coords: (f64, Option<f64>),
    pub value: f64,
}

/// Strict local extrema over the 4-neighbourhood (clipped at the edges,
/// failed cells skipped) and the global extrema. Ties for the global
/// extremum go to the first cell in axis1-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaReport {
    pub maxima: Vec<Extremum>,
    pub minima: Vec<Extremum>,
    pub global_max: Extremum,
    pub global_min: Extremum,
}

pub fn find_extrema(map: &EntropyMap) -> Result<ExtremaReport> {
    let (n1, n2) = map.shape();
    let at = |i: usize, j: usize, value: f64| Extremum { i, j, coords: map.coords(i, j), value };

    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut global: Option<(Extremum, Extremum)> = None;

    for i in 0..n1 {
        for j in 0..n2 {
            let Some(v) = map.get(i, j) else { continue };
            let here = at(i, j, v);
            global = Some(match global {
                None => (here, here),
                Some((hi, lo)) => (if v > hi.value { here } else { hi }, if v < lo.value { here } else { lo }),
            });

            let mut neighbours = Vec::with_capacity(4);
            if i > 0 {
                neighbours.push((i - 1, j));
            }
            if i + 1 < n1 {
                neighbours.push((i + 1, j));
            }
            if j > 0 {
                neighbours.push((i, j - 1));
            }
            if j + 1 < n2 {
                neighbours.push((i, j + 1));
            }
            let finite: Vec<f64> = neighbours.into_iter().filter_map(|(a, b)| map.get(a, b)).collect();
            if finite.is_empty() {
                continue;
            }
            if finite.iter().all(|&u| v > u) {
                maxima.push(here);
            }
            if finite.iter().all(|&u| v < u) {
                minima.push(here);
            }
        }
    }

    let (global_max, global_min) = global.ok_or(Error::EmptyMap)?;
    Ok(ExtremaReport { maxima, minima, global_max, global_min })
}
