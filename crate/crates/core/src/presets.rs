//! Primitive polynomials of small degree, as integer lifts (constant term
//! first, monic).

pub const PRIMITIVE_POLYS: &[(u64, &[i64])] = &[
    (2, &[1, 1]),
    (2, &[-1, 1]),
    (2, &[-1, -1, 1]),
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 0, 1, 1]),
    (2, &[-1, -1, 0, 1]),
    (3, &[1, 1]),
    (3, &[2, 1, 1]),
    (3, &[-1, -1, 1]),
    (3, &[1, 2, 0, 1]),
    (5, &[2, 1]),
    (5, &[-2, 1]),
    (5, &[2, 1, 1]),
    (5, &[2, 3, 0, 1]),
    (5, &[-2, -1, 0, 1]),
];

/// The polynomials in [`PRIMITIVE_POLYS`] for one prime and degree.
pub fn primitive_polys(p: u64, degree: usize) -> impl Iterator<Item = &'static [i64]> {
    PRIMITIVE_POLYS
        .iter()
        .filter(move |(q, poly)| *q == p && poly.len() == degree + 1)
        .map(|(_, poly)| *poly)
}
