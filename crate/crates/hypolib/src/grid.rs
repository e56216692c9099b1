//! Finite grid domains and extended-real functions sampled on them.
//!
//! The closed set underlying every computation here *is* the finite set of
//! member nodes of a [`GridDomain`]. All suprema and infima over the domain
//! are finite maxima and minima, so hypograph distances are computed exactly;
//! continuum problems are modeled by refining grids. The origin is required
//! to be a member node.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;

/// Relative tolerance for recognizing grid-aligned coordinates.
const ALIGN_TOL: f64 = 1e-9;

/// Hard cap on total node count to keep accidental blowups out.
const MAX_NODES: usize = 1 << 24;

/// One axis of a grid: uniformly spaced coordinates including 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    h: f64,
    coords: Vec<f64>,
}

impl Axis {
    /// Builds the axis `{lb, lb+h, ..., ub}`. Both bounds must be integer
    /// multiples of `h` and the origin must land on a node.
    pub fn new(lb: f64, ub: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(HypoError::InvalidDomain(format!("spacing must be positive, got {h}")));
        }
        if !(lb.is_finite() && ub.is_finite() && lb <= 0.0 && ub >= 0.0) {
            return Err(HypoError::InvalidDomain(format!(
                "axis [{lb}, {ub}] must be finite and contain the origin"
            )));
        }
        let neg = (-lb / h).round();
        let pos = (ub / h).round();
        if (neg * h + lb).abs() > ALIGN_TOL * (1.0 + lb.abs())
            || (pos * h - ub).abs() > ALIGN_TOL * (1.0 + ub.abs())
        {
            return Err(HypoError::InvalidDomain(format!(
                "axis bounds [{lb}, {ub}] are not multiples of spacing {h}"
            )));
        }
        let (neg, pos) = (neg as i64, pos as i64);
        let coords = (-neg..=pos).map(|k| k as f64 * h).collect();
        Ok(Axis { h, coords })
    }

    fn from_coords(coords: Vec<f64>, h: f64) -> Self {
        Axis { h, coords }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Index of the node matching `x`, if any.
    fn index_of(&self, x: f64) -> Option<usize> {
        // coords are sorted; binary search with alignment tolerance
        let idx = self
            .coords
            .binary_search_by(|c| c.partial_cmp(&x).expect("grid coords are not NaN"));
        match idx {
            Ok(i) => Some(i),
            Err(i) => {
                let tol = ALIGN_TOL * (1.0 + x.abs());
                if i < self.coords.len() && (self.coords[i] - x).abs() <= tol {
                    Some(i)
                } else if i > 0 && (self.coords[i - 1] - x).abs() <= tol {
                    Some(i - 1)
                } else {
                    None
                }
            }
        }
    }
}

/// A finite grid standing in for the closed set on which functions live.
///
/// Nodes are the product of the per-axis coordinate lists; an optional
/// membership mask selects a subset. The member set is nonempty, finite, and
/// always contains the origin.
#[derive(Clone, Debug)]
pub struct GridDomain {
    axes: Vec<Axis>,
    /// Flat ids (row-major, axis 0 slowest) of member nodes, ascending.
    members: Vec<u32>,
    /// Flat id -> member rank, or `u32::MAX` for non-members.
    member_rank: Vec<u32>,
    /// Member coordinates, `member_count x n`, row-major.
    coords: Vec<f64>,
    origin_rank: usize,
}

impl PartialEq for GridDomain {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes && self.members == other.members
    }
}

impl GridDomain {
    /// Full grid over `spans = [(lb, ub, h); n]`, every node a member.
    pub fn new(spans: &[(f64, f64, f64)]) -> Result<Arc<Self>> {
        Self::with_mask(spans, |_| true)
    }

    /// One-dimensional convenience constructor.
    pub fn line(lb: f64, ub: f64, h: f64) -> Result<Arc<Self>> {
        Self::new(&[(lb, ub, h)])
    }

    /// Grid with a membership mask. The origin must be kept.
    pub fn with_mask(
        spans: &[(f64, f64, f64)],
        keep: impl Fn(&[f64]) -> bool,
    ) -> Result<Arc<Self>> {
        if spans.is_empty() {
            return Err(HypoError::InvalidDomain("dimension must be positive".into()));
        }
        let axes = spans
            .iter()
            .map(|&(lb, ub, h)| Axis::new(lb, ub, h))
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(axes, keep)
    }

    fn from_axes(axes: Vec<Axis>, keep: impl Fn(&[f64]) -> bool) -> Result<Arc<Self>> {
        let n = axes.len();
        let total: usize = axes.iter().map(Axis::len).try_fold(1usize, |acc, len| {
            acc.checked_mul(len).filter(|&t| t <= MAX_NODES)
        })
        .ok_or_else(|| HypoError::InvalidDomain("grid has too many nodes".into()))?;

        let mut members = Vec::new();
        let mut member_rank = vec![u32::MAX; total];
        let mut coords = Vec::new();
        let mut origin_rank = None;
        let mut point = vec![0.0; n];
        for (flat, rank_slot) in member_rank.iter_mut().enumerate() {
            let mut rem = flat;
            for i in (0..n).rev() {
                let len = axes[i].len();
                point[i] = axes[i].coords[rem % len];
                rem /= len;
            }
            if keep(&point) {
                *rank_slot = members.len() as u32;
                if point.iter().all(|&c| c == 0.0) {
                    origin_rank = Some(members.len());
                }
                members.push(flat as u32);
                coords.extend_from_slice(&point);
            }
        }
        if members.is_empty() {
            return Err(HypoError::InvalidDomain("member set is empty".into()));
        }
        let origin_rank = origin_rank
            .ok_or_else(|| HypoError::InvalidDomain("origin must be a member node".into()))?;
        Ok(Arc::new(GridDomain {
            axes,
            members,
            member_rank,
            coords,
            origin_rank,
        }))
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn origin_rank(&self) -> usize {
        self.origin_rank
    }

    /// Coordinates of the member with the given rank.
    pub fn member_coords(&self, rank: usize) -> &[f64] {
        let n = self.dim();
        &self.coords[rank * n..(rank + 1) * n]
    }

    /// Iterates `(rank, coords)` over all members in flat order.
    pub fn iter_members(&self) -> impl Iterator<Item = (usize, &[f64])> {
        let n = self.dim();
        self.coords.chunks(n).enumerate()
    }

    /// Riemann cell volume `h_1 ... h_n`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::h).product()
    }

    /// Member rank of the node at `x`, if `x` is a member node.
    pub fn member_rank_at(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut flat = 0usize;
        for (axis, &xi) in self.axes.iter().zip(x) {
            flat = flat * axis.len() + axis.index_of(xi)?;
        }
        let rank = self.member_rank[flat];
        (rank != u32::MAX).then_some(rank as usize)
    }

    /// Sup-norm of the member with the given rank.
    pub fn member_norm_inf(&self, rank: usize) -> f64 {
        self.member_coords(rank)
            .iter()
            .fold(0.0, |acc, &c| acc.max(c.abs()))
    }

    /// Largest member sup-norm.
    pub fn radius_inf(&self) -> f64 {
        (0..self.member_count()).fold(0.0, |acc, r| acc.max(self.member_norm_inf(r)))
    }

    /// Two domains carry the same member set (bitwise coordinates).
    pub fn compatible(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.member_count() == other.member_count()
            && self.coords == other.coords
    }
}

/// Sup-norm distance between two points.
pub fn norm_inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |acc, (&x, &y)| acc.max((x - y).abs()))
}

/// An extended-real function sampled on the member nodes of a grid.
///
/// At least one node carries a finite value, so the hypograph is nonempty;
/// on a finite set every such function is usc.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    domain: Arc<GridDomain>,
    values: Vec<ExtReal>,
}

impl GridFn {
    pub fn new(domain: Arc<GridDomain>, values: Vec<ExtReal>) -> Result<Self> {
        if values.len() != domain.member_count() {
            return Err(HypoError::InvalidValue(format!(
                "expected {} values, got {}",
                domain.member_count(),
                values.len()
            )));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(HypoError::EmptyHypograph);
        }
        Ok(GridFn { domain, values })
    }

    pub fn constant(domain: Arc<GridDomain>, c: f64) -> Result<Self> {
        let values = vec![ExtReal::new(c)?; domain.member_count()];
        Self::new(domain, values)
    }

    /// Samples `f` at every member node.
    pub fn from_fn(domain: Arc<GridDomain>, f: impl Fn(&[f64]) -> ExtReal) -> Result<Self> {
        let values = domain.iter_members().map(|(_, x)| f(x)).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    /// Stored value at a member rank.
    pub fn value(&self, rank: usize) -> ExtReal {
        self.values[rank]
    }

    /// Stored value at the grid node `x`; errors on non-member points.
    pub fn value_at(&self, x: &[f64]) -> Result<ExtReal> {
        self.domain
            .member_rank_at(x)
            .map(|rank| self.values[rank])
            .ok_or_else(|| HypoError::NonMemberNode(x.to_vec()))
    }

    /// Applies a value map, revalidating the nonempty-hypograph invariant.
    pub fn map_values(&self, f: impl Fn(usize, ExtReal) -> ExtReal) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(rank, &v)| f(rank, v))
            .collect();
        Self::new(self.domain.clone(), values)
    }

    /// Iterates `(rank, coords, value)` over nodes with finite values.
    pub fn iter_finite(&self) -> impl Iterator<Item = (usize, &[f64], f64)> {
        self.domain
            .iter_members()
            .zip(&self.values)
            .filter_map(|((rank, x), v)| v.finite_value().map(|fv| (rank, x, fv)))
    }

    pub fn finite_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Largest finite value.
    pub fn max_finite(&self) -> f64 {
        self.iter_finite()
            .map(|(_, _, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn same_domain(&self, other: &GridFn) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) || self.domain.compatible(&other.domain)
    }

    /// Resamples onto another grid: nodes shared with the current domain
    /// keep their stored value, all other nodes become `-inf`. Metric
    /// operations reject mismatched domains instead of resampling, so any
    /// change of grid stays an explicit step.
    pub fn resample(&self, domain: Arc<GridDomain>) -> Result<Self> {
        let values = domain
            .iter_members()
            .map(|(_, x)| {
                self.domain
                    .member_rank_at(x)
                    .map(|rank| self.values[rank])
                    .unwrap_or(ExtReal::NegInf)
            })
            .collect();
        Self::new(domain, values)
    }

    /// Writes the `x1,...,xn,value` CSV representation, one member per row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.domain.dim();
        let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        for ((_, x), v) in self.domain.iter_members().zip(&self.values) {
            for c in x {
                write!(w, "{c},")?;
            }
            writeln!(w, "{v}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Parses the CSV representation, reconstructing the grid from the rows.
    ///
    /// Axes are inferred from the coordinates present: spacing is the least
    /// gap between consecutive distinct values, and rows absent from the file
    /// become non-member nodes.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "header", "empty input"))?;
        let header = header.map_err(|e| parse_err(1, "header", &e.to_string()))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        let n = cols.len().saturating_sub(1);
        if n == 0 || cols[n] != "value" {
            return Err(parse_err(1, "header", "expected header `x1,...,xn,value`"));
        }
        for (i, col) in cols[..n].iter().enumerate() {
            if *col != format!("x{}", i + 1) {
                return Err(parse_err(1, "header", &format!("expected column `x{}`", i + 1)));
            }
        }

        let mut rows: Vec<(Vec<f64>, ExtReal)> = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let line = line.map_err(|e| parse_err(lineno, "row", &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != n + 1 {
                return Err(parse_err(
                    lineno,
                    "row",
                    &format!("expected {} fields, got {}", n + 1, fields.len()),
                ));
            }
            let mut x = Vec::with_capacity(n);
            for (i, fld) in fields[..n].iter().enumerate() {
                let c: f64 = fld.trim().parse().map_err(|_| {
                    parse_err(lineno, &format!("x{}", i + 1), "not a number")
                })?;
                if !c.is_finite() {
                    return Err(parse_err(lineno, &format!("x{}", i + 1), "coordinate must be finite"));
                }
                x.push(c);
            }
            let vstr = fields[n].trim();
            let v = if vstr == "-inf" {
                ExtReal::NegInf
            } else {
                let raw: f64 = vstr
                    .parse()
                    .map_err(|_| parse_err(lineno, "value", "expected a number or `-inf`"))?;
                ExtReal::new(raw).map_err(|e| parse_err(lineno, "value", &e.to_string()))?
            };
            rows.push((x, v));
        }
        if rows.is_empty() {
            return Err(parse_err(2, "row", "no data rows"));
        }

        // Infer each axis from the distinct coordinates present.
        let mut axes = Vec::with_capacity(n);
        for i in 0..n {
            let mut cs: Vec<f64> = rows.iter().map(|(x, _)| x[i]).collect();
            cs.sort_by(|a, b| a.partial_cmp(b).expect("coords are finite"));
            cs.dedup();
            let h = if cs.len() == 1 {
                1.0
            } else {
                cs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
            };
            for w in cs.windows(2) {
                let gap = w[1] - w[0];
                let k = (gap / h).round();
                if k < 1.0 || (gap - k * h).abs() > ALIGN_TOL * (1.0 + w[1].abs()) {
                    return Err(HypoError::InvalidDomain(format!(
                        "coordinates on axis {} are not uniformly spaced",
                        i + 1
                    )));
                }
            }
            if !cs.contains(&0.0) {
                return Err(HypoError::InvalidDomain(format!(
                    "origin coordinate missing on axis {}",
                    i + 1
                )));
            }
            axes.push(Axis::from_coords(cs, h));
        }

        // Mark membership and collect values by flat id.
        let total: usize = axes.iter().map(Axis::len).product();
        let mut slot: Vec<Option<ExtReal>> = vec![None; total];
        for (row_idx, (x, v)) in rows.iter().enumerate() {
            let mut flat = 0usize;
            for (axis, &xi) in axes.iter().zip(x) {
                let k = axis
                    .coords
                    .binary_search_by(|c| c.partial_cmp(&xi).expect("coords are finite"))
                    .map_err(|_| parse_err(row_idx + 2, "row", "internal: coordinate vanished"))?;
                flat = flat * axis.len() + k;
            }
            if slot[flat].replace(*v).is_some() {
                return Err(parse_err(row_idx + 2, "row", "duplicate node"));
            }
        }
        let domain = GridDomain::from_axes(axes, |_| true)?;
        // Restrict membership to the rows present.
        let axes = domain.axes.clone();
        let domain = GridDomain::from_axes(axes, |x| {
            domain
                .member_rank_at(x)
                .map(|r| slot[domain.members[r] as usize].is_some())
                .unwrap_or(false)
        })?;
        let values = domain
            .members
            .iter()
            .map(|&flat| slot[flat as usize].expect("member nodes have parsed values"))
            .collect();
        GridFn::new(domain, values)
    }

    pub fn read_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }
}

fn parse_err(line: usize, field: &str, message: &str) -> HypoError {
    HypoError::Parse {
        line,
        field: field.to_string(),
        message: message.to_string(),
    }
}
