//! Geometry summaries. Nothing here runs a solver.

use holodist::domains::{check_connected, disc_free_certificate, DiscVerdict};
use holodist::{DomainGeometry, DomainKind};

const DISC_SAMPLES: usize = 256;
const DISC_RADIUS: f64 = 0.05;
const GRID_SIDE: usize = 24;

pub fn describe(d: &DomainGeometry) -> String {
    let planar = d.dim() == 1;
    let mut tags = Vec::new();
    tags.push(match (d.is_convex(), planar) {
        (true, _) => "convex",
        (false, true) => "non-convex planar",
        (false, false) => "non-convex",
    });
    tags.push(match d.kind() {
        DomainKind::Annulus { .. } => "Kobayashi closed-form via covering",
        _ if d.has_closed_form() => "closed-form",
        _ => "solver-only",
    });
    if !planar {
        tags.push(match disc_free_certificate(d, DISC_SAMPLES, DISC_RADIUS, 0) {
            DiscVerdict::NoDiscFound => "boundary disc-free",
            DiscVerdict::DiscFound(_) => "boundary contains affine discs",
        });
    }
    let mut out = format!("{} in C^{}: {}\n", d.name(), d.dim(), tags.join(", "));
    out.push_str(&format!("dimension: {}\n", d.dim()));
    out.push_str(&format!("convex: {}\n", d.is_convex()));
    out.push_str(&format!("closed form: {}\n", d.has_closed_form()));
    out.push_str(&format!("bounded: {}\n", d.is_bounded()));
    if matches!(d.kind(), DomainKind::Intersection { .. }) {
        let verdict = match check_connected(d, GRID_SIDE) {
            Ok(()) => "connected".to_string(),
            Err(e) => format!("failed ({e})"),
        };
        out.push_str(&format!("connectivity: {verdict}\n"));
    }
    out
}
