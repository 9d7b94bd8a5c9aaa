//! Computational domains as tagged polygons.
//!
//! Four domains are built from the waveguide parameters:
//!
//! * the truncated waveguide `G(ε,R)` — the strip pinched by two scaled
//!   narrow shapes, cut at `x = -R` and `x = d+R`;
//! * the bounded resonator `G₂` between the two cone vertices;
//! * the truncated half-strip `G₁ᴿ` left of the first vertex;
//! * the narrow-shape domain `Ωᴿ` (double cone ∪ disk, cut at radius `R`),
//!   plus a pure-sector variant used by oracle tests.
//!
//! The narrow shape is `Ω = K ∪ disk(0, r0)`: the double cone of opening
//! `ω` smoothed by a disk at the vertex. The channel left open at each
//! narrow has width `2·ε·r0`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RwgError};

/// All geometric parameters of the waveguide family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    /// Strip width; the strip is `{ |y| < l/2 }`.
    pub l: f64,
    /// Full opening angle of each cone sector, `0 < ω < π`.
    pub omega: f64,
    /// Distance between the two narrow centers.
    pub d: f64,
    /// Radius of the disk smoothing the cone vertex, in Ω's unit scale.
    pub r0: f64,
    /// Narrow scale factor; the channel width is `2·ε·r0`.
    pub epsilon: f64,
}

impl Default for WaveguideGeometry {
    fn default() -> Self {
        WaveguideGeometry { l: 1.0, omega: std::f64::consts::FRAC_PI_2, d: 2.0, r0: 0.5, epsilon: 0.3 }
    }
}

impl WaveguideGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(RwgError::Geometry(format!("strip width l must be positive, got {}", self.l)));
        }
        if !(self.omega > 0.0 && self.omega < std::f64::consts::PI) {
            return Err(RwgError::Geometry(format!("opening angle omega must lie in (0, π), got {}", self.omega)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(RwgError::Geometry(format!("narrow distance d must be positive, got {}", self.d)));
        }
        if !(self.r0 > 0.0 && self.r0.is_finite()) {
            return Err(RwgError::Geometry(format!("smoothing radius r0 must be positive, got {}", self.r0)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(RwgError::Geometry(format!("narrow scale epsilon must be positive, got {}", self.epsilon)));
        }
        // The two cone boundaries must intersect outside the strip, i.e. the
        // rays from O₁ and O₂ cross above y = l/2: (d/2)·tan(ω/2) > l/2.
        if self.wall_hit() >= self.d / 2.0 {
            return Err(RwgError::Geometry(format!(
                "cone boundaries meet inside the strip: need (d/2)·tan(ω/2) > l/2, got d = {}, ω = {}, l = {}",
                self.d, self.omega, self.l
            )));
        }
        if self.narrow_radius() >= self.l / 4.0 {
            return Err(RwgError::Geometry(format!(
                "narrow too wide: need ε·r0 < l/4, got ε·r0 = {} with l = {}",
                self.narrow_radius(),
                self.l
            )));
        }
        Ok(())
    }

    /// tan(ω/2), the slope of the cone rays.
    pub fn half_tan(&self) -> f64 {
        (self.omega / 2.0).tan()
    }

    /// x-distance from a cone vertex to where its ray reaches `y = ±l/2`.
    pub fn wall_hit(&self) -> f64 {
        (self.l / 2.0) / self.half_tan()
    }

    /// Radius `ε·r0` of the disk opening the channel at each narrow.
    pub fn narrow_radius(&self) -> f64 {
        self.epsilon * self.r0
    }

    /// Channel width `2·ε·r0` at each narrow center.
    pub fn channel_width(&self) -> f64 {
        2.0 * self.narrow_radius()
    }
}

/// Boundary condition tag carried by every boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentTag {
    Dirichlet,
    Gamma1,
    Gamma2,
}

impl SegmentTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentTag::Dirichlet => "DIRICHLET",
            SegmentTag::Gamma1 => "GAMMA_1",
            SegmentTag::Gamma2 => "GAMMA_2",
        }
    }

    pub fn parse(s: &str) -> Option<SegmentTag> {
        match s {
            "DIRICHLET" => Some(SegmentTag::Dirichlet),
            "GAMMA_1" => Some(SegmentTag::Gamma1),
            "GAMMA_2" => Some(SegmentTag::Gamma2),
            _ => None,
        }
    }
}

/// Closed, simple, positively oriented polygon with tagged edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalBoundary {
    pub vertices: Vec<[f64; 2]>,
    /// `(from, to, tag)` with `to = (from + 1) % n`; one entry per vertex.
    pub segments: Vec<(usize, usize, SegmentTag)>,
    /// Vertex indices where solutions are singular or coefficients are
    /// extracted; the mesher grades element sizes towards these.
    pub corner_markers: Vec<usize>,
}

impl PolygonalBoundary {
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        a / 2.0
    }

    /// Checks closure, positive orientation and simplicity.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(RwgError::Geometry(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if self.segments.len() != n {
            return Err(RwgError::Geometry("segment count must equal vertex count for a closed polygon".into()));
        }
        for (i, &(a, b, _)) in self.segments.iter().enumerate() {
            if a != i || b != (i + 1) % n {
                return Err(RwgError::Geometry(format!("segment {i} does not close the polygon in order")));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(RwgError::Geometry(format!("vertex {i} is not finite")));
            }
        }
        if self.signed_area() <= 0.0 {
            return Err(RwgError::Geometry("polygon is not positively oriented".into()));
        }
        if let Some((i, j)) = self.find_self_intersection() {
            return Err(RwgError::Geometry(format!("polygon is not simple: segments {i} and {j} intersect")));
        }
        for &m in &self.corner_markers {
            if m >= n {
                return Err(RwgError::Geometry(format!("corner marker {m} out of range")));
            }
        }
        Ok(())
    }

    /// Brute-force segment intersection sweep over non-adjacent pairs.
    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                // skip adjacent segments (shared endpoint)
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Even-odd point-in-polygon test. Points on the boundary are not
    /// guaranteed either way; callers use strictly interior points.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let t = (p[1] - a[1]) / (b[1] - a[1]);
                let x = a[0] + t * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Width of the domain along the vertical line `x = x0`, measured as the
    /// spread of boundary intersections with that line.
    pub fn vertical_width_at(&self, x0: f64) -> Option<f64> {
        let n = self.vertices.len();
        let mut ys: Vec<f64> = Vec::new();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a[0] - x0).abs() < 1e-14 {
                ys.push(a[1]);
            }
            let (x0a, x0b) = (a[0] - x0, b[0] - x0);
            if (x0a < 0.0 && x0b > 0.0) || (x0a > 0.0 && x0b < 0.0) {
                let t = x0a / (a[0] - b[0]);
                ys.push(a[1] + t * (b[1] - a[1]));
            }
        }
        if ys.is_empty() {
            return None;
        }
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(hi - lo)
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| -> bool {
        orient(p, q, r) == 0.0
            && r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    on(a, b, c) || on(a, b, d) || on(c, d, a) || on(c, d, b)
}

/// Incremental polygon builder keeping per-edge tags.
struct BoundaryBuilder {
    vertices: Vec<[f64; 2]>,
    tags: Vec<SegmentTag>,
    markers: Vec<usize>,
}

impl BoundaryBuilder {
    fn start(p: [f64; 2]) -> Self {
        BoundaryBuilder { vertices: vec![p], tags: Vec::new(), markers: Vec::new() }
    }

    fn line_to(&mut self, p: [f64; 2], tag: SegmentTag) -> &mut Self {
        self.tags.push(tag);
        self.vertices.push(p);
        self
    }

    /// Appends a circular arc from the current point (assumed to lie at
    /// `(center, radius, phi0)`) to angle `phi1`, subdividing so the chord
    /// sagitta stays below `h_arc/10` (and the step below π/24), with an
    /// even segment count so the arc midpoint is always a vertex.
    fn arc_to(&mut self, center: [f64; 2], radius: f64, phi0: f64, phi1: f64, h_arc: f64, tag: SegmentTag) -> &mut Self {
        let span = (phi1 - phi0).abs();
        let sag = (h_arc / 10.0).min(radius * 0.2);
        let theta_err = 2.0 * (1.0 - sag / radius).acos();
        let step = theta_err.min(std::f64::consts::PI / 24.0);
        let mut n = (span / step).ceil() as usize;
        n = n.max(2);
        if n % 2 == 1 {
            n += 1;
        }
        for i in 1..=n {
            let phi = phi0 + (phi1 - phi0) * (i as f64) / (n as f64);
            let p = [center[0] + radius * phi.cos(), center[1] + radius * phi.sin()];
            self.tags.push(tag);
            self.vertices.push(p);
        }
        self
    }

    /// Marks the most recently pushed vertex as a grading corner.
    fn mark_last(&mut self) -> &mut Self {
        self.markers.push(self.vertices.len() - 1);
        self
    }

    fn mark_first(&mut self) -> &mut Self {
        self.markers.push(0);
        self
    }

    /// Closes the polygon; the final segment back to the first vertex gets `tag`.
    fn close(mut self, tag: SegmentTag) -> Result<PolygonalBoundary> {
        self.tags.push(tag);
        let n = self.vertices.len();
        let segments = (0..n).map(|i| (i, (i + 1) % n, self.tags[i])).collect();
        let b = PolygonalBoundary { vertices: self.vertices, segments, corner_markers: self.markers };
        b.validate()?;
        Ok(b)
    }
}

fn dir(phi: f64) -> [f64; 2] {
    [phi.cos(), phi.sin()]
}

fn scale(p: [f64; 2], s: f64) -> [f64; 2] {
    [p[0] * s, p[1] * s]
}

fn shift(p: [f64; 2], dx: f64) -> [f64; 2] {
    [p[0] + dx, p[1]]
}

/// Boundary of the truncated waveguide `G(ε) ∩ { −R < x < d+R }`.
///
/// The two vertical ends are tagged `GAMMA_1` (left, at `x = −R`) and
/// `GAMMA_2` (right, at `x = d+R`); everything else is a hard wall. `h_arc`
/// sets the arc polygonization fidelity (sagitta ≤ `h_arc/10`).
pub fn build_waveguide(geom: &WaveguideGeometry, r_trunc: f64, h_arc: f64) -> Result<PolygonalBoundary> {
    geom.validate()?;
    if !(r_trunc > 0.0) {
        return Err(RwgError::Geometry(format!("truncation radius must be positive, got {r_trunc}")));
    }
    let xc = geom.wall_hit();
    if r_trunc <= xc * (1.0 + 1e-12) {
        return Err(RwgError::Geometry(format!(
            "truncation R = {r_trunc} must exceed the cone/wall junction distance x_c = {xc}"
        )));
    }
    let (l2, d, rn, om2) = (geom.l / 2.0, geom.d, geom.narrow_radius(), geom.omega / 2.0);
    let pi = std::f64::consts::PI;

    // Upper boundary from left to right; the lower boundary is its mirror.
    let mut upper = BoundaryBuilder::start([-r_trunc, l2]);
    upper.line_to([-xc, l2], SegmentTag::Dirichlet);
    upper.line_to(scale(dir(pi - om2), rn), SegmentTag::Dirichlet).mark_last();
    upper.arc_to([0.0, 0.0], rn, pi - om2, om2, h_arc, SegmentTag::Dirichlet).mark_last();
    upper.line_to([xc, l2], SegmentTag::Dirichlet);
    upper.line_to([d - xc, l2], SegmentTag::Dirichlet);
    upper.line_to(shift(scale(dir(pi - om2), rn), d), SegmentTag::Dirichlet).mark_last();
    upper.arc_to([d, 0.0], rn, pi - om2, om2, h_arc, SegmentTag::Dirichlet).mark_last();
    upper.line_to([d + xc, l2], SegmentTag::Dirichlet);
    upper.line_to([d + r_trunc, l2], SegmentTag::Dirichlet);

    // Assemble the closed CCW polygon: mirrored upper path (left→right along
    // the bottom), right end upward, upper path reversed (right→left), left
    // end downward.
    let upper_pts = upper.vertices;
    let upper_marks: Vec<usize> = upper.markers;
    let nu = upper_pts.len();

    let mut b = BoundaryBuilder::start([upper_pts[0][0], -upper_pts[0][1]]);
    for p in upper_pts.iter().skip(1) {
        b.line_to([p[0], -p[1]], SegmentTag::Dirichlet);
    }
    for &m in &upper_marks {
        b.markers.push(m);
    }
    // right end, bottom to top
    b.line_to(upper_pts[nu - 1], SegmentTag::Gamma2);
    for p in upper_pts.iter().rev().skip(1) {
        b.line_to(*p, SegmentTag::Dirichlet);
    }
    for &m in &upper_marks {
        b.markers.push(nu + (nu - 1 - m));
    }
    // drop the duplicated first vertex: the last line_to pushed upper_pts[0]
    // which closes onto the start's mirror via the left end
    let last = b.vertices.len() - 1;
    debug_assert_eq!(b.vertices[last], upper_pts[0]);
    b.close(SegmentTag::Gamma1)
}

/// Boundary of the bounded resonator `G₂ = G ∩ K₁ ∩ K₂` (middle component).
///
/// A hexagon with vertices at the two cone tips `O₁ = (0,0)`, `O₂ = (d,0)`;
/// all Dirichlet, mirror-symmetric under `x ↦ d−x`.
pub fn build_resonator(geom: &WaveguideGeometry) -> Result<PolygonalBoundary> {
    geom.validate()?;
    let (l2, d) = (geom.l / 2.0, geom.d);
    let xc = geom.wall_hit();
    let mut b = BoundaryBuilder::start([0.0, 0.0]);
    b.mark_first();
    b.line_to([xc, -l2], SegmentTag::Dirichlet);
    b.line_to([d - xc, -l2], SegmentTag::Dirichlet);
    b.line_to([d, 0.0], SegmentTag::Dirichlet).mark_last();
    b.line_to([d - xc, l2], SegmentTag::Dirichlet);
    b.line_to([xc, l2], SegmentTag::Dirichlet);
    b.close(SegmentTag::Dirichlet)
}

/// Boundary of the truncated half-strip `G₁ ∩ { x > −R }` in coordinates
/// centered at `O₁`. The artificial end at `x = −R` is tagged `GAMMA_1`.
pub fn build_halfstrip(geom: &WaveguideGeometry, r_trunc: f64) -> Result<PolygonalBoundary> {
    geom.validate()?;
    if !(r_trunc > 0.0) {
        return Err(RwgError::Geometry(format!("truncation radius must be positive, got {r_trunc}")));
    }
    let xc = geom.wall_hit();
    if r_trunc <= xc * (1.0 + 1e-12) {
        return Err(RwgError::Geometry(format!(
            "truncation R = {r_trunc} must exceed the cone/wall junction distance x_c = {xc}"
        )));
    }
    let l2 = geom.l / 2.0;
    let mut b = BoundaryBuilder::start([0.0, 0.0]);
    b.mark_first();
    b.line_to([-xc, l2], SegmentTag::Dirichlet);
    b.line_to([-r_trunc, l2], SegmentTag::Dirichlet);
    b.line_to([-r_trunc, -l2], SegmentTag::Gamma1);
    b.line_to([-xc, -l2], SegmentTag::Dirichlet);
    b.close(SegmentTag::Dirichlet)
}

/// Boundary of `(K ∪ disk(0, r0)) ∩ disk(0, R)`: the narrow-shape domain
/// truncated at radius `R`. The truncation arcs are tagged `GAMMA_2` on the
/// right (`ξ > 0`) and `GAMMA_1` on the left (`ξ < 0`); the cone rays and
/// the smoothing-disk arcs are Dirichlet.
pub fn build_omega(r0: f64, omega: f64, r_trunc: f64, h_arc: f64) -> Result<PolygonalBoundary> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(RwgError::Geometry(format!("smoothing radius r0 must be positive, got {r0}")));
    }
    if !(omega > 0.0 && omega < std::f64::consts::PI) {
        return Err(RwgError::Geometry(format!("opening angle omega must lie in (0, π), got {omega}")));
    }
    if r_trunc <= 2.0 * r0 {
        return Err(RwgError::Geometry(format!("truncation R = {r_trunc} must exceed 2·r0 = {}", 2.0 * r0)));
    }
    let om2 = omega / 2.0;
    let pi = std::f64::consts::PI;
    let mut b = BoundaryBuilder::start(scale(dir(-om2), r_trunc));
    b.arc_to([0.0, 0.0], r_trunc, -om2, om2, h_arc, SegmentTag::Gamma2);
    b.line_to(scale(dir(om2), r0), SegmentTag::Dirichlet).mark_last();
    b.arc_to([0.0, 0.0], r0, om2, pi - om2, h_arc, SegmentTag::Dirichlet).mark_last();
    b.line_to(scale(dir(pi - om2), r_trunc), SegmentTag::Dirichlet);
    b.arc_to([0.0, 0.0], r_trunc, pi - om2, pi + om2, h_arc, SegmentTag::Gamma1);
    b.line_to(scale(dir(pi + om2), r0), SegmentTag::Dirichlet).mark_last();
    b.arc_to([0.0, 0.0], r0, pi + om2, 2.0 * pi - om2, h_arc, SegmentTag::Dirichlet).mark_last();
    b.close(SegmentTag::Dirichlet)
}

/// Pure cone sector of opening `ω` truncated at radius `R`: the rays are
/// Dirichlet and the arc is tagged `GAMMA_2`. Oracle domain for the narrow
/// constants (`ρ^{π/ω}·cos(πφ/ω)` solves the Robin problem exactly there).
pub fn build_sector(omega: f64, r_trunc: f64, h_arc: f64) -> Result<PolygonalBoundary> {
    if !(omega > 0.0 && omega < std::f64::consts::PI) {
        return Err(RwgError::Geometry(format!("opening angle omega must lie in (0, π), got {omega}")));
    }
    if !(r_trunc > 0.0) {
        return Err(RwgError::Geometry(format!("truncation radius must be positive, got {r_trunc}")));
    }
    let om2 = omega / 2.0;
    let mut b = BoundaryBuilder::start([0.0, 0.0]);
    b.mark_first();
    b.line_to(scale(dir(-om2), r_trunc), SegmentTag::Dirichlet);
    b.arc_to([0.0, 0.0], r_trunc, -om2, om2, h_arc, SegmentTag::Gamma2);
    b.close(SegmentTag::Dirichlet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_geom() -> WaveguideGeometry {
        WaveguideGeometry::default()
    }

    #[test]
    fn waveguide_basic_shape() {
        let g = default_geom();
        let b = build_waveguide(&g, 3.0, 0.05).unwrap();
        b.validate().unwrap();
        let (lo, hi) = b.bounding_box();
        assert_eq!(lo[0], -3.0);
        assert_eq!(hi[0], 5.0);
        assert_eq!(lo[1], -0.5);
        assert_eq!(hi[1], 0.5);
        // channel width at both narrows
        let w0 = b.vertical_width_at(0.0).unwrap();
        let wd = b.vertical_width_at(g.d).unwrap();
        assert!((w0 - g.channel_width()).abs() < 1e-12, "w0 = {w0}");
        assert!((wd - g.channel_width()).abs() < 1e-12, "wd = {wd}");
        // one GAMMA_1 and one GAMMA_2 segment
        let n1 = b.segments.iter().filter(|s| s.2 == SegmentTag::Gamma1).count();
        let n2 = b.segments.iter().filter(|s| s.2 == SegmentTag::Gamma2).count();
        assert_eq!((n1, n2), (1, 1));
    }

    #[test]
    fn waveguide_point_membership() {
        let g = default_geom();
        let b = build_waveguide(&g, 3.0, 0.05).unwrap();
        // strip interior far from narrows
        assert!(b.contains([-2.0, 0.3]));
        assert!(b.contains([1.0, 0.4]));
        // inside the channel at the narrow
        assert!(b.contains([0.0, 0.9 * g.narrow_radius()]));
        // just above the channel at the narrow: cut away
        assert!(!b.contains([0.0, 1.5 * g.narrow_radius()]));
        // outside the cone near the narrow
        assert!(!b.contains([0.05, 0.4]));
        // outside the strip
        assert!(!b.contains([1.0, 0.6]));
    }

    #[test]
    fn waveguide_narrow_too_wide_is_error() {
        let mut g = default_geom();
        g.epsilon = 0.6; // ε·r0 = 0.3 > l/4
        assert!(build_waveguide(&g, 3.0, 0.05).is_err());
    }

    #[test]
    fn waveguide_channel_shrinks_with_epsilon() {
        let mut last = f64::INFINITY;
        for &eps in &[0.4, 0.3, 0.2, 0.1, 0.05] {
            let g = WaveguideGeometry { epsilon: eps, ..default_geom() };
            let b = build_waveguide(&g, 3.0, 0.05).unwrap();
            let w = b.vertical_width_at(0.0).unwrap();
            assert!((w - 2.0 * eps * g.r0).abs() < 1e-12);
            assert!(w < last);
            last = w;
        }
    }

    #[test]
    fn resonator_is_symmetric_hexagon() {
        let g = default_geom();
        let b = build_resonator(&g).unwrap();
        assert_eq!(b.vertices.len(), 6);
        assert!(b.vertices.contains(&[0.0, 0.0]));
        assert!(b.vertices.contains(&[2.0, 0.0]));
        // mirror x -> d - x maps the vertex set to itself
        for v in &b.vertices {
            let m = [g.d - v[0], v[1]];
            assert!(
                b.vertices.iter().any(|u| (u[0] - m[0]).abs() < 1e-12 && (u[1] - m[1]).abs() < 1e-12),
                "mirror image of {v:?} missing"
            );
        }
        assert!(b.segments.iter().all(|s| s.2 == SegmentTag::Dirichlet));
        assert_eq!(b.corner_markers.len(), 2);
    }

    #[test]
    fn resonator_cones_crossing_is_error() {
        let g = WaveguideGeometry { d: 0.8, ..default_geom() }; // x_c = 0.5 > d/2
        assert!(build_resonator(&g).is_err());
        assert!(g.validate().is_err());
    }

    #[test]
    fn halfstrip_tags_and_errors() {
        let g = default_geom();
        let b = build_halfstrip(&g, 3.0).unwrap();
        let runs: Vec<_> = b.segments.iter().filter(|s| s.2 == SegmentTag::Gamma1).collect();
        assert_eq!(runs.len(), 1);
        assert!(build_halfstrip(&g, 0.0).is_err());
        assert!(build_halfstrip(&g, -1.0).is_err());
        assert_eq!(b.corner_markers, vec![0]);
    }

    #[test]
    fn omega_domain_symmetry() {
        let b = build_omega(0.5, std::f64::consts::FRAC_PI_2, 8.0, 0.2).unwrap();
        // symmetric under ξ ↦ −ξ and η ↦ −η: reflected vertices stay in the set
        for v in &b.vertices {
            for m in [[-v[0], v[1]], [v[0], -v[1]]] {
                assert!(
                    b.vertices.iter().any(|u| (u[0] - m[0]).abs() < 1e-9 && (u[1] - m[1]).abs() < 1e-9),
                    "reflection {m:?} of {v:?} missing"
                );
            }
        }
        assert!(b.segments.iter().any(|s| s.2 == SegmentTag::Gamma1));
        assert!(b.segments.iter().any(|s| s.2 == SegmentTag::Gamma2));
    }

    #[test]
    fn omega_too_small_truncation_is_error() {
        assert!(build_omega(0.5, std::f64::consts::FRAC_PI_2, 0.6, 0.1).is_err());
    }

    #[test]
    fn sector_variant() {
        let b = build_sector(std::f64::consts::FRAC_PI_2, 4.0, 0.1).unwrap();
        assert!(b.contains([1.0, 0.0]));
        assert!(!b.contains([-0.5, 0.0]));
        assert_eq!(b.corner_markers, vec![0]);
    }
}
