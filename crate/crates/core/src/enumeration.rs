//! Breadth-first enumeration of `Sp(2g, Z)` by generator words, the on-disk
//! cache format, orbit counting and injectivity-radius estimates.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::arithmetic::SymplecticInt;
use crate::error::{Error, Result};
use crate::siegel::{act, distance, SiegelPoint};

/// Element cap for [`bfs_enumerate`].
pub const DEFAULT_CAP: usize = 2_000_000;
const MAGIC: &str = "SPGZ";
const VERSION: u32 = 1;

/// `J`, `J^{-1} = -J`, and `T_{±E}` for each elementary symmetric matrix `E`
/// (diagonal units first, then `E_ij + E_ji` for `i < j`).
pub fn standard_generators(g: usize) -> Vec<SymplecticInt> {
    let j = SymplecticInt::j(g);
    let mut gens = vec![j.clone(), j.inverse()];
    let mut basis = Vec::new();
    for i in 0..g {
        let mut s = vec![0; g * g];
        s[i * g + i] = 1;
        basis.push(s);
    }
    for i in 0..g {
        for k in (i + 1)..g {
            let mut s = vec![0; g * g];
            s[i * g + k] = 1;
            s[k * g + i] = 1;
            basis.push(s);
        }
    }
    for s in basis {
        let t = SymplecticInt::translation(g, &s).expect("elementary matrix is symmetric");
        gens.push(t.inverse());
        gens.push(t);
    }
    // keep T_E before T_{-E}
    let n = gens.len();
    for k in (2..n).step_by(2) {
        gens.swap(k, k + 1);
    }
    gens
}

/// A deduplicated window of group elements in BFS order, identity first.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupCache {
    g: usize,
    descriptor: String,
    max_word_length: usize,
    elements: Vec<SymplecticInt>,
    truncated: bool,
}

impl GroupCache {
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn elements(&self) -> &[SymplecticInt] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the element cap stopped the enumeration early.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// The same window with `γ` and `-γ` identified (first occurrence kept),
    /// i.e. a window into the group acting on `H_g`.
    pub fn projective(&self) -> GroupCache {
        let mut seen = HashSet::new();
        let elements = self
            .elements
            .iter()
            .filter(|e| {
                let key = if seen.contains(&e.neg()) {
                    None
                } else {
                    Some((*e).clone())
                };
                key.map_or(false, |k| seen.insert(k))
            })
            .cloned()
            .collect();
        GroupCache {
            elements,
            ..self.clone()
        }
    }
}

/// All products of at most `max_word_length` generators, with the default
/// element cap.
pub fn bfs_enumerate(
    g: usize,
    generators: &[SymplecticInt],
    max_word_length: usize,
) -> Result<GroupCache> {
    bfs_enumerate_capped(g, generators, max_word_length, DEFAULT_CAP)
}

pub fn bfs_enumerate_capped(
    g: usize,
    generators: &[SymplecticInt],
    max_word_length: usize,
    cap: usize,
) -> Result<GroupCache> {
    if let Some(bad) = generators.iter().find(|s| s.g() != g) {
        return Err(Error::Dimension(format!(
            "generator of genus {} in a genus-{g} enumeration",
            bad.g()
        )));
    }
    if cap == 0 {
        return Err(Error::Parameter("element cap must be positive".into()));
    }
    let descriptor = if generators == standard_generators(g).as_slice() {
        "std".to_string()
    } else {
        format!("custom{}", generators.len())
    };
    let id = SymplecticInt::identity(g);
    let mut seen: HashSet<SymplecticInt> = HashSet::from([id.clone()]);
    let mut elements = vec![id.clone()];
    let mut frontier = vec![id];
    let mut truncated = false;

    'levels: for _ in 0..max_word_length {
        let products: Vec<Vec<SymplecticInt>> = frontier
            .par_iter()
            .map(|w| {
                generators
                    .iter()
                    .map(|s| w.mul(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut next = Vec::new();
        for p in products.into_iter().flatten() {
            if seen.contains(&p) {
                continue;
            }
            if elements.len() == cap {
                truncated = true;
                break 'levels;
            }
            seen.insert(p.clone());
            elements.push(p.clone());
            next.push(p);
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(GroupCache {
        g,
        descriptor,
        max_word_length,
        elements,
        truncated,
    })
}

/// Convenience: the standard generators up to word length `l`.
pub fn standard_cache(g: usize, l: usize) -> Result<GroupCache> {
    bfs_enumerate(g, &standard_generators(g), l)
}

// ---------------------------------------------------------------------------
// Persistence

pub fn save_cache(cache: &GroupCache, path: &Path) -> Result<()> {
    fs::write(path, encode_cache(cache))?;
    Ok(())
}

pub fn encode_cache(cache: &GroupCache) -> String {
    let mut out = format!(
        "{MAGIC} {VERSION} g={} L={} gens={}\n",
        cache.g, cache.max_word_length, cache.descriptor
    );
    for e in &cache.elements {
        let row: Vec<String> = e.block_order_entries().iter().map(i64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn load_cache(path: &Path) -> Result<GroupCache> {
    decode_cache(&fs::read_to_string(path)?)
}

fn format_err(row: usize, message: impl Into<String>) -> Error {
    Error::Format {
        row,
        message: message.into(),
    }
}

fn header_field<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| format_err(1, format!("missing header field {key}=")))
}

/// Parses the text cache format. Rows are numbered like file lines
/// (header = row 1).
pub fn decode_cache(text: &str) -> Result<GroupCache> {
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().ok_or_else(|| format_err(1, "empty file"))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some(MAGIC) {
        return Err(format_err(1, "missing SPGZ magic"));
    }
    match tok.next().map(str::parse::<u32>) {
        Some(Ok(VERSION)) => {}
        Some(Ok(v)) => return Err(format_err(1, format!("unsupported version {v}"))),
        _ => return Err(format_err(1, "unreadable version")),
    }
    let g: usize = header_field(tok.next(), "g")?
        .parse()
        .map_err(|_| format_err(1, "bad g"))?;
    let max_word_length: usize = header_field(tok.next(), "L")?
        .parse()
        .map_err(|_| format_err(1, "bad L"))?;
    let descriptor = header_field(tok.next(), "gens")?.to_string();
    if g == 0 {
        return Err(format_err(1, "g must be positive"));
    }

    let width = 4 * g * g;
    let mut elements = Vec::new();
    let mut seen = HashSet::new();
    for (offset, line) in lines.enumerate() {
        let row = offset + 2;
        if !line.ends_with('\n') {
            return Err(format_err(row, "row not terminated (truncated file)"));
        }
        let values = line
            .split_whitespace()
            .map(str::parse::<i64>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| format_err(row, format!("unparseable entry: {e}")))?;
        if values.len() != width {
            return Err(format_err(
                row,
                format!("expected {width} entries, found {}", values.len()),
            ));
        }
        let e = SymplecticInt::from_block_order(g, &values)
            .map_err(|e| format_err(row, format!("element rejected: {e}")))?;
        if !seen.insert(e.clone()) {
            return Err(format_err(row, "duplicate element"));
        }
        elements.push(e);
    }
    match elements.first() {
        Some(first) if first.is_identity() => {}
        _ => return Err(format_err(2, "first element must be the identity")),
    }
    Ok(GroupCache {
        g,
        descriptor,
        max_word_length,
        elements,
        truncated: false,
    })
}

// ---------------------------------------------------------------------------
// Counting

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Exclude only the identity.
    Cocompact,
    /// Exclude every element of Γ_∞.
    Arithmetic,
}

impl CountMode {
    pub fn admits(self, gamma: &SymplecticInt) -> bool {
        match self {
            CountMode::Cocompact => !gamma.is_identity(),
            CountMode::Arithmetic => !gamma.in_gamma_infinity(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CountQuery {
    pub z: SiegelPoint,
    pub w: SiegelPoint,
    pub radius: f64,
    pub mode: CountMode,
}

/// `d_S(Z, γW)` for every cached element, in cache order.
pub fn orbit_distances(cache: &GroupCache, z: &SiegelPoint, w: &SiegelPoint) -> Result<Vec<f64>> {
    check_genus(cache, z)?;
    cache
        .elements
        .par_iter()
        .map(|gamma| distance(z, &act(&gamma.to_real(), w)?))
        .collect()
}

fn check_genus(cache: &GroupCache, z: &SiegelPoint) -> Result<()> {
    if cache.g != z.g() {
        return Err(Error::Dimension(format!(
            "cache genus {} vs point genus {}",
            cache.g,
            z.g()
        )));
    }
    Ok(())
}

/// `#{γ admissible : d_S(Z, γW) < ρ}` over the cached window.
pub fn count_gamma(cache: &GroupCache, q: &CountQuery) -> Result<usize> {
    if !q.radius.is_finite() || q.radius < 0.0 {
        return Err(Error::Parameter(format!(
            "radius must be finite and nonnegative, got {}",
            q.radius
        )));
    }
    if q.radius == 0.0 {
        return Ok(0);
    }
    let d = orbit_distances(cache, &q.z, &q.w)?;
    Ok(cache
        .elements
        .iter()
        .zip(&d)
        .filter(|(gamma, &dist)| q.mode.admits(gamma) && dist < q.radius)
        .count())
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityEstimate {
    /// Half the smallest displacement found; an upper bound for the true
    /// injectivity radius.
    pub radius: f64,
    pub witness_index: usize,
    pub sample_index: usize,
    /// Always true: the infimum is taken over the cached window only.
    pub windowed: bool,
}

/// `½ min d_S(Z, γZ)` over samples and admissible cached `γ ≠ ±Id`.
pub fn injectivity_radius_estimate(
    cache: &GroupCache,
    samples: &[SiegelPoint],
    mode: CountMode,
) -> Result<InjectivityEstimate> {
    if samples.is_empty() {
        return Err(Error::Parameter("no sample points".into()));
    }
    let admissible: Vec<usize> = (0..cache.len())
        .filter(|&i| {
            let e = &cache.elements[i];
            mode.admits(e) && !e.is_identity() && !e.is_minus_identity()
        })
        .collect();
    if admissible.is_empty() {
        return Err(Error::Absence(
            "no admissible group element in the cache".into(),
        ));
    }
    let mut best: Option<InjectivityEstimate> = None;
    for (si, z) in samples.iter().enumerate() {
        check_genus(cache, z)?;
        let d: Vec<f64> = admissible
            .par_iter()
            .map(|&i| distance(z, &act(&cache.elements[i].to_real(), z)?))
            .collect::<Result<_>>()?;
        for (&i, &di) in admissible.iter().zip(&d) {
            if di == 0.0 {
                return Err(Error::Degenerate(format!(
                    "sample {si} is fixed by cached element {i}; pick a generic sample point"
                )));
            }
            if best.as_ref().map_or(true, |b| 0.5 * di < b.radius) {
                best = Some(InjectivityEstimate {
                    radius: 0.5 * di,
                    witness_index: i,
                    sample_index: si,
                    windowed: true,
                });
            }
        }
    }
    Ok(best.expect("admissible set and samples are nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::certify_symplectic;
    use crate::matkit::RealMatrix;

    #[test]
    fn generators_are_distinct() {
        let gens = standard_generators(2);
        assert_eq!(gens.len(), 8);
        let set: HashSet<_> = gens.iter().cloned().collect();
        assert_eq!(set.len(), 8);
        assert_eq!(gens[1], SymplecticInt::j(2).neg());
        assert_eq!(
            gens[2],
            SymplecticInt::translation(2, &[1, 0, 0, 0]).unwrap()
        );
    }

    #[test]
    fn small_levels() {
        let c0 = standard_cache(2, 0).unwrap();
        assert_eq!(c0.len(), 1);
        assert!(c0.elements()[0].is_identity());
        let c1 = standard_cache(2, 1).unwrap();
        assert_eq!(c1.len(), 1 + 8);
        assert_eq!(c1.descriptor(), "std");
    }

    #[test]
    fn levels_are_nested_and_deduplicated() {
        let c2 = standard_cache(2, 2).unwrap();
        let c3 = standard_cache(2, 3).unwrap();
        assert_eq!(&c3.elements()[..c2.len()], c2.elements());
        let set: HashSet<_> = c3.elements().iter().collect();
        assert_eq!(set.len(), c3.len());
        for e in c3.elements() {
            assert!(certify_symplectic(4, e.entries().to_vec()).is_ok());
        }
    }

    #[test]
    fn cap_truncates() {
        let c = bfs_enumerate_capped(2, &standard_generators(2), 3, 20).unwrap();
        assert_eq!(c.len(), 20);
        assert!(c.truncated());
    }

    #[test]
    fn round_trip_and_corruption() {
        let c = standard_cache(2, 2).unwrap();
        let text = encode_cache(&c);
        assert!(text.starts_with("SPGZ 1 g=2 L=2 gens=std\n"));
        assert_eq!(decode_cache(&text).unwrap(), c);

        let cut = &text[..text.len() - 5];
        let rows = cut.lines().count();
        match decode_cache(cut) {
            Err(Error::Format { row, .. }) => assert_eq!(row, rows),
            other => panic!("{other:?}"),
        }

        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = lines[3].replacen(" 1 ", " 2 ", 1);
        let edited = lines.join("\n") + "\n";
        match decode_cache(&edited) {
            Err(Error::Format { row, .. }) => assert_eq!(row, 4),
            other => panic!("{other:?}"),
        }

        let wrong_version = text.replacen("SPGZ 1", "SPGZ 2", 1);
        assert!(matches!(
            decode_cache(&wrong_version),
            Err(Error::Format { row: 1, .. })
        ));
    }

    #[test]
    fn count_examples() {
        let c = standard_cache(2, 2).unwrap();
        let z = SiegelPoint::new(
            RealMatrix::from_rows(&[vec![0.1, 0.05], vec![0.05, -0.2]]).unwrap(),
            RealMatrix::from_rows(&[vec![1.1, 0.2], vec![0.2, 0.9]]).unwrap(),
        )
        .unwrap();
        let q = |r| CountQuery {
            z: z.clone(),
            w: z.clone(),
            radius: r,
            mode: CountMode::Cocompact,
        };
        assert_eq!(count_gamma(&c, &q(0.0)).unwrap(), 0);
        let d = orbit_distances(&c, &z, &z).unwrap();
        let shortest = d
            .iter()
            .zip(c.elements())
            .filter(|(_, e)| !e.is_identity() && !e.is_minus_identity())
            .map(|(d, _)| *d)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(count_gamma(&c, &q(0.99 * shortest)).unwrap(), 1); // only -Id
        let mut prev = 0;
        for r in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let n = count_gamma(&c, &q(r)).unwrap();
            assert!(n >= prev);
            prev = n;
        }
        let arith = count_gamma(
            &c,
            &CountQuery {
                mode: CountMode::Arithmetic,
                ..q(8.0)
            },
        )
        .unwrap();
        assert!(arith <= prev);
    }

    #[test]
    fn injectivity_examples() {
        let only_id = standard_cache(2, 0).unwrap();
        let z = SiegelPoint::i_identity(2);
        assert!(matches!(
            injectivity_radius_estimate(&only_id, &[z.clone()], CountMode::Cocompact),
            Err(Error::Absence(_))
        ));

        let translations = bfs_enumerate(2, &standard_generators(2)[2..], 1).unwrap();
        let est =
            injectivity_radius_estimate(&translations, &[z.clone()], CountMode::Cocompact).unwrap();
        let unit = SiegelPoint::new(
            RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap(),
            RealMatrix::identity(2),
        )
        .unwrap();
        let expect = 0.5 * distance(&z, &unit).unwrap();
        assert!((est.radius - expect).abs() < 1e-12);
        assert!(est.windowed);
    }

    #[test]
    fn fixed_points_are_reported() {
        let c = standard_cache(2, 1).unwrap();
        let z = SiegelPoint::i_identity(2);
        assert!(matches!(
            injectivity_radius_estimate(&c, &[z], CountMode::Cocompact),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn projective_drops_negatives() {
        let c = standard_cache(2, 2).unwrap();
        let p = c.projective();
        assert!(p.elements().iter().all(|e| !e.is_minus_identity()));
        assert!(p
            .elements()
            .iter()
            .all(|e| !p.elements().contains(&e.neg())));
        assert!(p.len() < c.len());
    }
}
