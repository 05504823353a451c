//! Grid scans of the period-2 region `{(a1, a2) : corollary_region(a1, a2)}`.
//!
//! Membership at each grid node is exact. The boundary curves are the closed-form square-root
//! expressions and are only used for plotting and cross-checks, in `f64`.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use super::corollary_region;
use crate::scalar::{format_scalar, parse_scalar, ratio, to_f64, Scalar};
use crate::{Error, Result};

/// The top of the region, where both branches of the boundary meet.
pub fn apex() -> (Scalar, Scalar) {
    (ratio(1, 35), ratio(7, 17))
}

/// Right end of the second boundary branch, `(6√5 − 13)/11`.
pub fn second_branch_end() -> f64 {
    (6.0 * 5f64.sqrt() - 13.0) / 11.0
}

/// Upper boundary for `a1 ≤ 1/35`: `(−a1 − 5 + √(a1² + 34a1 + 33)) / (2 − 2a1)`.
pub fn boundary_first_branch(a1: f64) -> f64 {
    (-a1 - 5.0 + (a1 * a1 + 34.0 * a1 + 33.0).sqrt()) / (2.0 - 2.0 * a1)
}

/// Upper boundary for `1/35 < a1 < (6√5 − 13)/11`: `(3a1 + 1 − 4√(a1² + a1)) / (1 − a1)`.
pub fn boundary_second_branch(a1: f64) -> f64 {
    (3.0 * a1 + 1.0 - 4.0 * (a1 * a1 + a1).sqrt()) / (1.0 - a1)
}

/// `start:end:steps`, with `steps` subdivisions (so `steps + 1` nodes, both ends included).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub start: Scalar,
    pub end: Scalar,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(start: Scalar, end: Scalar, steps: usize) -> Result<Self> {
        if steps == 0 || end <= start {
            return Err(Error::Parse(format!(
                "grid needs start < end and steps >= 1, got {start}:{end}:{steps}"
            )));
        }
        Ok(GridSpec { start, end, steps })
    }

    pub fn node(&self, i: usize) -> Scalar {
        &self.start + (&self.end - &self.start) * ratio(i as i64, self.steps as i64)
    }

    pub fn nodes(&self) -> Vec<Scalar> {
        (0..=self.steps).map(|i| self.node(i)).collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, end, steps] = parts[..] else {
            return Err(Error::Parse(format!("grid spec {text:?} is not start:end:steps")));
        };
        let steps = steps
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("grid steps {steps:?} is not a count")))?;
        GridSpec::new(parse_scalar(start)?, parse_scalar(end)?, steps)
    }
}

/// Exact membership of every node of an `a1 × a2` grid.
#[derive(Clone, Debug)]
pub struct RegionScan {
    pub a1: Vec<Scalar>,
    pub a2: Vec<Scalar>,
    /// `inside[i][j]` for `(a1[i], a2[j])`.
    pub inside: Vec<Vec<bool>>,
}

/// Evaluates the region predicate on the grid. Nodes outside `a1 < 1/3 < a2` count as outside.
///
/// Rows are evaluated in parallel and collected in order.
pub fn region_scan(a1: &GridSpec, a2: &GridSpec) -> RegionScan {
    let xs = a1.nodes();
    let ys = a2.nodes();
    let inside = xs
        .par_iter()
        .map(|x| {
            ys.iter()
                .map(|y| corollary_region(x, y).unwrap_or(false))
                .collect()
        })
        .collect();
    RegionScan { a1: xs, a2: ys, inside }
}

impl RegionScan {
    pub fn count_inside(&self) -> usize {
        self.inside.iter().flatten().filter(|&&b| b).count()
    }

    /// Grid nodes inside the region, row-major.
    pub fn inside_points(&self) -> impl Iterator<Item = (&Scalar, &Scalar)> {
        self.a1.iter().zip(&self.inside).flat_map(move |(x, row)| {
            self.a2
                .iter()
                .zip(row)
                .filter(|(_, &b)| b)
                .map(move |(y, _)| (x, y))
        })
    }

    /// `a1,a2,in_region` rows with exact rational coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a1,a2,in_region\n");
        for (x, row) in self.a1.iter().zip(&self.inside) {
            for (y, b) in self.a2.iter().zip(row) {
                let _ = writeln!(out, "{},{},{}", format_scalar(x), format_scalar(y), b);
            }
        }
        out
    }

    /// A plot with filled region cells, both boundary branches and the apex.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const PAD: f64 = 48.0;
        let (x0, x1) = (to_f64(&self.a1[0]), to_f64(self.a1.last().unwrap()));
        let (y0, y1) = (to_f64(&self.a2[0]), to_f64(self.a2.last().unwrap()));
        let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let cell_w = (W - 2.0 * PAD) / self.a1.len() as f64;
        let cell_h = (H - 2.0 * PAD) / self.a2.len() as f64;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(
            svg,
            r#"<defs><clipPath id="plot"><rect x="{PAD}" y="{PAD}" width="{}" height="{}"/></clipPath></defs>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(svg, r##"<g fill="#9ecae1" stroke="none">"##);
        for (i, row) in self.inside.iter().enumerate() {
            let left = PAD + i as f64 * cell_w;
            let mut j = 0;
            while j < row.len() {
                if !row[j] {
                    j += 1;
                    continue;
                }
                let run_start = j;
                while j < row.len() && row[j] {
                    j += 1;
                }
                let top = H - PAD - j as f64 * cell_h;
                let _ = writeln!(
                    svg,
                    r#"<rect x="{left:.3}" y="{top:.3}" width="{cell_w:.3}" height="{:.3}"/>"#,
                    (j - run_start) as f64 * cell_h
                );
            }
        }
        svg.push_str("</g>\n");

        let junction = 1.0 / 35.0;
        let branches: [(f64, f64, fn(f64) -> f64, &str); 2] = [
            (x0.max(0.0), x1.min(junction), boundary_first_branch, "#d62728"),
            (x0.max(junction), x1.min(second_branch_end()), boundary_second_branch, "#2ca02c"),
        ];
        for (from, to, curve, colour) in branches {
            if from >= to {
                continue;
            }
            let points: Vec<String> = (0..=200)
                .map(|i| {
                    let a = from + (to - from) * i as f64 / 200.0;
                    format!("{:.3},{:.3}", px(a), py(curve(a)))
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline clip-path="url(#plot)" fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
        }

        let (ax, ay) = apex();
        let (ax, ay) = (to_f64(&ax), to_f64(&ay));
        if (x0..=x1).contains(&ax) && (y0..=y1).contains(&ay) {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/><text x="{:.3}" y="{:.3}" font-size="12">(1/35, 7/17)</text>"#,
                px(ax),
                py(ay),
                px(ax) + 6.0,
                py(ay) - 6.0
            );
        }

        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">a1</text><text x="14" y="{}" font-size="12">a2</text>"#,
            W / 2.0,
            H - 12.0,
            H / 2.0
        );
        for (x, anchor, y) in [(x0, "start", H - PAD + 16.0), (x1, "end", H - PAD + 16.0)] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.3}" y="{y}" font-size="11" text-anchor="{anchor}">{x}</text>"#,
                px(x)
            );
        }
        for y in [y0, y1] {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.3}" font-size="11" text-anchor="end">{y}</text>"#,
                PAD - 4.0,
                py(y) + 4.0
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Upper region boundary at `a1`, choosing the branch by position.
pub fn boundary_at(a1: f64) -> Option<f64> {
    if a1 <= 0.0 || a1 >= second_branch_end() {
        None
    } else if a1 <= 1.0 / 35.0 {
        Some(boundary_first_branch(a1))
    } else {
        Some(boundary_second_branch(a1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::one_third;

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0:0.06:600".parse().unwrap();
        assert_eq!(g.end, ratio(3, 50));
        assert_eq!(g.node(1), ratio(1, 10000));
        assert_eq!(g.nodes().len(), 601);
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("1:0:3".parse::<GridSpec>().is_err());
        assert!("0:1:x".parse::<GridSpec>().is_err());
    }

    #[test]
    fn branches_meet_at_apex() {
        let a = 1.0 / 35.0;
        assert!((boundary_first_branch(a) - 7.0 / 17.0).abs() < 1e-12);
        assert!((boundary_second_branch(a) - 7.0 / 17.0).abs() < 1e-12);
        assert!((boundary_second_branch(second_branch_end()) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn exact_membership_agrees_with_closed_forms() {
        let scan = region_scan(&"0.001:0.04:60".parse().unwrap(), &"0.334:0.42:60".parse().unwrap());
        for (x, row) in scan.a1.iter().zip(&scan.inside) {
            let Some(bound) = boundary_at(to_f64(x)) else { continue };
            for (y, &inside) in scan.a2.iter().zip(row) {
                let y = to_f64(y);
                if (y - bound).abs() > 1e-9 {
                    assert_eq!(inside, y < bound, "at ({x}, {y})");
                }
            }
        }
        assert!(scan.count_inside() > 0);
    }

    #[test]
    fn apex_is_topmost() {
        let scan = region_scan(&"0:0.06:120".parse().unwrap(), &"0.33:0.45:120".parse().unwrap());
        let (_, top) = apex();
        assert!(scan.inside_points().all(|(x, y)| *y <= top && to_f64(x) < second_branch_end()));
        assert!(scan.inside_points().all(|(_, y)| *y > one_third()));
    }

    #[test]
    fn outputs_are_deterministic() {
        let g1: GridSpec = "0:0.05:20".parse().unwrap();
        let g2: GridSpec = "1/3:0.45:20".parse().unwrap();
        let a = region_scan(&g1, &g2);
        let b = region_scan(&g1, &g2);
        assert_eq!(a.to_csv(), b.to_csv());
        let svg = a.to_svg();
        assert_eq!(svg, b.to_svg());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("(1/35, 7/17)"));
        assert_eq!(a.to_csv().lines().count(), 1 + 21 * 21);
    }
}
