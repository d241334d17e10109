//! Contours made of segments between Gaussian-rational points, optionally
//! ending in a ray to infinity.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bispectral::Family;
use crate::exactalg::scalar::{format_scalar, parse_scalar};
use crate::exactalg::{GaussRat, Scalar, UniPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceEnd {
    Point(GaussRat),
    /// Ray to infinity in direction `exp(i * dir_deg * pi / 180)`.
    Ray { dir_deg: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub from: GaussRat,
    pub to: PieceEnd,
}

impl Piece {
    /// Point at parameter `t` (in `[0, 1]` for segments, `[0, inf)` for rays,
    /// where `t` is then the distance from the start).
    pub fn point(&self, t: f64) -> Complex64 {
        let a = self.from.to_c64();
        match &self.to {
            PieceEnd::Point(b) => a + (b.to_c64() - a) * t,
            PieceEnd::Ray { dir_deg } => a + direction(*dir_deg) * t,
        }
    }

    /// `d(point)/dt`.
    pub fn velocity(&self) -> Complex64 {
        match &self.to {
            PieceEnd::Point(b) => b.to_c64() - self.from.to_c64(),
            PieceEnd::Ray { dir_deg } => direction(*dir_deg),
        }
    }

    pub fn is_ray(&self) -> bool {
        matches!(self.to, PieceEnd::Ray { .. })
    }
}

pub fn direction(dir_deg: i64) -> Complex64 {
    Complex64::from_polar(1.0, (dir_deg as f64).to_radians())
}

/// Endpoint with its orientation flag: `pi = 1` at the start of the chain,
/// `pi = 0` at its end, so that boundary terms enter with sign `(-1)^pi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub point: GaussRat,
    pub pi: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ContourError {
    #[error("contour has no pieces")]
    Empty,
    #[error("piece {0} does not start where the previous one ends")]
    Disconnected(usize),
    #[error("only the last piece may be a ray")]
    RayNotLast,
    #[error("piece {0} has zero length")]
    Degenerate(usize),
    #[error("ray direction {0} degrees leaves the decay sector |arg| < 60")]
    OutsideSector(i64),
    #[error("contours for Bessel data must be finite")]
    InfiniteBessel,
    #[error("contour closes on itself")]
    Closed,
    #[error("bad contour entry: {0}")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourSpec {
    pieces: Vec<Piece>,
}

impl ContourSpec {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, ContourError> {
        if pieces.is_empty() {
            return Err(ContourError::Empty);
        }
        for (i, p) in pieces.iter().enumerate() {
            if let PieceEnd::Point(b) = &p.to {
                if *b == p.from {
                    return Err(ContourError::Degenerate(i));
                }
            }
            if p.is_ray() && i + 1 != pieces.len() {
                return Err(ContourError::RayNotLast);
            }
            if i > 0 {
                match &pieces[i - 1].to {
                    PieceEnd::Point(prev) if *prev == p.from => {}
                    _ => return Err(ContourError::Disconnected(i)),
                }
            }
        }
        let c = Self { pieces };
        if let (Some(a), Some(b)) = (c.start(), c.end()) {
            if a == b {
                return Err(ContourError::Closed);
            }
        }
        Ok(c)
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: GaussRat, b: GaussRat) -> Result<Self, ContourError> {
        Self::new(vec![Piece { from: a, to: PieceEnd::Point(b) }])
    }

    pub fn ray(from: GaussRat, dir_deg: i64) -> Result<Self, ContourError> {
        Self::new(vec![Piece { from, to: PieceEnd::Ray { dir_deg } }])
    }

    /// Polyline through the given vertices.
    pub fn polyline(points: &[GaussRat]) -> Result<Self, ContourError> {
        Self::new(points.windows(2).map(|w| Piece { from: w[0].clone(), to: PieceEnd::Point(w[1].clone()) }).collect())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> Option<&GaussRat> {
        self.pieces.first().map(|p| &p.from)
    }

    pub fn end(&self) -> Option<&GaussRat> {
        match &self.pieces.last()?.to {
            PieceEnd::Point(b) => Some(b),
            PieceEnd::Ray { .. } => None,
        }
    }

    pub fn has_ray(&self) -> bool {
        self.pieces.iter().any(Piece::is_ray)
    }

    /// `e(Gamma)` with orientation flags.
    pub fn endpoints(&self) -> Vec<Endpoint> {
        let mut out = Vec::new();
        if let Some(a) = self.start() {
            out.push(Endpoint { point: a.clone(), pi: 1 });
        }
        if let Some(b) = self.end() {
            out.push(Endpoint { point: b.clone(), pi: 0 });
        }
        out
    }

    /// `e(Gamma) = -e(Gamma)`.
    pub fn is_symmetric(&self) -> bool {
        let pts: Vec<GaussRat> = self.endpoints().into_iter().map(|e| e.point).collect();
        pts.iter().all(|p| pts.contains(&-p))
    }

    /// One representative of each `{xi, -xi}` pair of endpoints.
    pub fn endpoint_representatives(&self) -> Vec<GaussRat> {
        let mut reps: Vec<GaussRat> = Vec::new();
        for e in self.endpoints() {
            if !reps.iter().any(|r| *r == e.point || *r == -&e.point) {
                reps.push(e.point);
            }
        }
        reps
    }

    pub fn validate_for(&self, family: &Family) -> Result<(), ContourError> {
        for p in &self.pieces {
            if let PieceEnd::Ray { dir_deg } = p.to {
                if family.is_bessel() {
                    return Err(ContourError::InfiniteBessel);
                }
                let a = dir_deg.rem_euclid(360);
                let a = if a > 180 { a - 360 } else { a };
                if a.abs() >= 60 {
                    return Err(ContourError::OutsideSector(dir_deg));
                }
            }
        }
        Ok(())
    }

    /// Whether the exact point lies on the contour.
    pub fn contains_exact(&self, z: &GaussRat) -> bool {
        self.pieces.iter().any(|p| {
            let rel = z - &p.from;
            let dir = match &p.to {
                PieceEnd::Point(b) => b - &p.from,
                PieceEnd::Ray { dir_deg } => match exact_direction(*dir_deg) {
                    Some(d) => d,
                    None => return approx_on_piece(p, z.to_c64()),
                },
            };
            // rel = t * dir with t real in [0, 1] (segment) or t >= 0 (ray)
            let n = dir.norm_sqr();
            let t = &rel * &dir.conj();
            if !t.im.is_zero() {
                return false;
            }
            let t = &t.re / &n;
            let upper_ok = p.is_ray() || t <= Scalar::from_integer(1.into());
            t >= Scalar::zero() && upper_ok
        })
    }

    /// A root of `p` on the contour, if any: rational roots exactly, the
    /// others within `1e-9`.
    pub fn find_root(&self, p: &UniPoly) -> Option<Complex64> {
        if p.degree().unwrap_or(0) == 0 {
            return None;
        }
        for r in p.rational_roots() {
            let g = GaussRat::real(r);
            if self.contains_exact(&g) {
                return Some(g.to_c64());
            }
        }
        p.roots_c64().into_iter().find(|&z| self.pieces.iter().any(|piece| approx_on_piece(piece, z)))
    }

    pub fn to_config(&self) -> ContourConfig {
        ContourConfig {
            piece: self
                .pieces
                .iter()
                .map(|p| PieceConfig {
                    from: pair_text(&p.from),
                    to: match &p.to {
                        PieceEnd::Point(b) => Some(pair_text(b)),
                        PieceEnd::Ray { .. } => None,
                    },
                    ray: match p.to {
                        PieceEnd::Ray { dir_deg } => Some(RayConfig { dir_deg }),
                        PieceEnd::Point(_) => None,
                    },
                })
                .collect(),
        }
    }

    pub fn from_config(c: &ContourConfig) -> Result<Self, ContourError> {
        let pieces = c
            .piece
            .iter()
            .map(|p| {
                let from = parse_pair(&p.from)?;
                let to = match (&p.to, &p.ray) {
                    (Some(t), None) => PieceEnd::Point(parse_pair(t)?),
                    (None, Some(r)) => PieceEnd::Ray { dir_deg: r.dir_deg },
                    _ => return Err(ContourError::Syntax("each piece needs exactly one of `to` or `ray`".into())),
                };
                Ok(Piece { from, to })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(pieces)
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if i == 0 {
                s.push_str(&p.from.to_string());
            }
            match &p.to {
                PieceEnd::Point(b) => s.push_str(&format!(" -> {b}")),
                PieceEnd::Ray { dir_deg } => s.push_str(&format!(" -> inf@{dir_deg}deg")),
            }
        }
        s
    }
}

fn exact_direction(dir_deg: i64) -> Option<GaussRat> {
    let one = Scalar::from_integer(1.into());
    match dir_deg.rem_euclid(360) {
        0 => Some(GaussRat::real(one)),
        90 => Some(GaussRat::new(Scalar::zero(), one)),
        180 => Some(GaussRat::real(-one)),
        270 => Some(GaussRat::new(Scalar::zero(), -one)),
        45 | 135 | 225 | 315 => {
            let d = direction(dir_deg);
            Some(GaussRat::new(Scalar::from_integer((d.re.signum() as i64).into()), Scalar::from_integer((d.im.signum() as i64).into())))
        }
        _ => None,
    }
}

fn approx_on_piece(p: &Piece, z: Complex64) -> bool {
    let a = p.from.to_c64();
    let v = p.velocity();
    let t = ((z - a) * v.conj()).re / v.norm_sqr();
    let upper = if p.is_ray() { f64::INFINITY } else { 1.0 };
    let t = t.clamp(0.0, upper);
    (p.point(t) - z).norm() < 1e-9 * (1.0 + z.norm())
}

/// A rational entry written either as a TOML integer or as a string `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumText {
    Int(i64),
    Text(String),
}

impl NumText {
    pub fn parse(&self) -> Option<Scalar> {
        match self {
            NumText::Int(n) => Some(Scalar::from_integer((*n).into())),
            NumText::Text(t) => parse_scalar(t),
        }
    }
}

fn pair_text(g: &GaussRat) -> [NumText; 2] {
    [NumText::Text(format_scalar(&g.re)), NumText::Text(format_scalar(&g.im))]
}

fn parse_pair(p: &[NumText; 2]) -> Result<GaussRat, ContourError> {
    let re = p[0].parse().ok_or_else(|| ContourError::Syntax(format!("{:?}", p[0])))?;
    let im = p[1].parse().ok_or_else(|| ContourError::Syntax(format!("{:?}", p[1])))?;
    Ok(GaussRat::new(re, im))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayConfig {
    pub dir_deg: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub from: [NumText; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<[NumText; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<RayConfig>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourConfig {
    pub piece: Vec<PieceConfig>,
}
