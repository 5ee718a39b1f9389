//! Text checkpoint format for spectral fields.
//!
//! ```text
//! GMNSE-FIELD v1
//! dimension 3
//! resolution 16
//! edge_length 6.283185307179586
//! entries 2
//! 0 1 0 0 0e0 -5e-1
//! 0 -1 0 0 0e0 5e-1
//! ```
//!
//! After the header, each line is `component k_1 .. k_d re im` for one
//! nonzero coefficient. Floats use Rust's shortest round-trip formatting,
//! so writing and reading a field is lossless.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{SpectralError, SpectralVelocityField, TorusDomain, VectorCoefficients};

pub const FIELD_MAGIC: &str = "GMNSE-FIELD";
pub const FIELD_VERSION: u8 = 1;

/// Invariant tolerance applied to fields read back from disk.
const LOAD_TOLERANCE: f64 = 1e-12;

pub fn write_field<W: Write>(u: &SpectralVelocityField, mut out: W) -> std::io::Result<()> {
    let dom = u.domain();
    let n = dom.n_points();
    let d = dom.dimension();
    let entries: Vec<(usize, usize)> = (0..d)
        .flat_map(|c| (0..n).map(move |i| (c, i)))
        .filter(|&(c, i)| u.coefficients()[c * n + i] != Complex64::new(0.0, 0.0))
        .collect();
    writeln!(out, "{FIELD_MAGIC} v{FIELD_VERSION}")?;
    writeln!(out, "dimension {d}")?;
    writeln!(out, "resolution {}", dom.resolution())?;
    writeln!(out, "edge_length {:e}", dom.edge_length())?;
    writeln!(out, "entries {}", entries.len())?;
    for (c, i) in entries {
        let k = dom.wavevector(i);
        let z = u.coefficients()[c * n + i];
        write!(out, "{c}")?;
        for ki in &k[..d] {
            write!(out, " {ki}")?;
        }
        writeln!(out, " {:e} {:e}", z.re, z.im)?;
    }
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> SpectralError {
    SpectralError::Checkpoint {
        line,
        message: msg.into(),
    }
}

fn header_value<'a>(line: Option<(usize, &'a str)>, key: &str) -> Result<&'a str, SpectralError> {
    let (no, text) = line.ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
    text.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .map(str::trim)
        .ok_or_else(|| parse_err(no, format!("expected `{key} <value>`")))
}

fn parse_num<T: std::str::FromStr>(no: usize, text: &str, what: &str) -> Result<T, SpectralError> {
    text.parse()
        .map_err(|_| parse_err(no, format!("cannot parse {what} from `{text}`")))
}

pub fn read_field<R: BufRead>(input: R) -> Result<SpectralVelocityField, SpectralError> {
    let lines: Vec<String> = input
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| parse_err(0, e.to_string()))?;
    let mut it = lines.iter().enumerate().map(|(i, l)| (i + 1, l.as_str()));

    let magic = it.next().ok_or_else(|| parse_err(1, "empty checkpoint"))?;
    let expected = format!("{FIELD_MAGIC} v{FIELD_VERSION}");
    if magic.1.trim() != expected {
        return Err(parse_err(1, format!("expected `{expected}`, found `{}`", magic.1)));
    }
    let dimension: usize = parse_num(2, header_value(it.next(), "dimension")?, "dimension")?;
    let resolution: usize = parse_num(3, header_value(it.next(), "resolution")?, "resolution")?;
    let edge: f64 = parse_num(4, header_value(it.next(), "edge_length")?, "edge_length")?;
    let count: usize = parse_num(5, header_value(it.next(), "entries")?, "entry count")?;
    let domain = TorusDomain::new(dimension, resolution, edge)?;
    let n = domain.n_points();

    let mut raw = VectorCoefficients::zeros(domain);
    let mut seen = 0;
    for (no, text) in it {
        if text.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != dimension + 3 {
            return Err(parse_err(no, format!("expected {} columns, found {}", dimension + 3, fields.len())));
        }
        let c: usize = parse_num(no, fields[0], "component")?;
        if c >= dimension {
            return Err(parse_err(no, format!("component {c} out of range")));
        }
        let mut k = [0i64; 3];
        for (slot, f) in k.iter_mut().zip(&fields[1..=dimension]) {
            *slot = parse_num(no, f, "wavevector")?;
        }
        let re: f64 = parse_num(no, fields[dimension + 1], "real part")?;
        let im: f64 = parse_num(no, fields[dimension + 2], "imaginary part")?;
        let idx = domain
            .index_of(k)
            .ok_or_else(|| parse_err(no, format!("wavevector {k:?} outside the grid")))?;
        raw.component_mut(c)[idx] = Complex64::new(re, im);
        seen += 1;
    }
    if seen != count {
        return Err(parse_err(0, format!("header announces {count} entries, found {seen}")));
    }
    debug_assert_eq!(raw.data().len(), dimension * n);
    let u = SpectralVelocityField::from_data_unchecked(domain, raw.into_data());
    u.validate(LOAD_TOLERANCE)?;
    Ok(u)
}
