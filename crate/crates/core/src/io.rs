//! CSV tables: impedance, force and spectral-distribution inputs, and
//! commented-header outputs.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampled::SampledFunction;

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(input)
}

fn fmt_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Reads the named columns (in order) as floats.
pub fn read_columns(input: impl Read, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(fmt_err)?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Format(format!("missing column '{n}' (have {:?})", headers.iter().collect::<Vec<_>>())))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(fmt_err)?;
        for (c, &i) in idx.iter().enumerate() {
            let field = &rec[i];
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Format(format!("row {}: '{field}' is not a number", line + 1)))?;
            if !v.is_finite() {
                return Err(Error::Format(format!("row {}: non-finite value in '{}'", line + 1, names[c])));
            }
            cols[c].push(v);
        }
    }
    if cols[0].is_empty() {
        return Err(Error::Format("table has no rows".into()));
    }
    Ok(cols)
}

fn increasing(xs: &[f64], name: &str) -> Result<()> {
    if xs.windows(2).all(|w| w[1] > w[0]) {
        Ok(())
    } else {
        Err(Error::Format(format!("column '{name}' must be strictly increasing")))
    }
}

/// Columns `omega, re_Z, im_Z`.
pub fn read_impedance(input: impl Read) -> Result<SampledFunction> {
    let c = read_columns(input, &["omega", "re_Z", "im_Z"])?;
    increasing(&c[0], "omega")?;
    let z = c[1].iter().zip(&c[2]).map(|(&r, &i)| Complex64::new(r, i)).collect();
    Ok(SampledFunction::complex(c[0].clone(), z)?.with_meta("quantity", "impedance"))
}

/// Columns `t, f`.
pub fn read_force(input: impl Read) -> Result<SampledFunction> {
    let c = read_columns(input, &["t", "f"])?;
    increasing(&c[0], "t")?;
    Ok(SampledFunction::real(c[0].clone(), c[1].clone())?.with_meta("quantity", "force"))
}

/// Columns `omega, re_mu`.
pub fn read_spectral_distribution(input: impl Read) -> Result<SampledFunction> {
    let c = read_columns(input, &["omega", "re_mu"])?;
    increasing(&c[0], "omega")?;
    Ok(SampledFunction::real(c[0].clone(), c[1].clone())?.with_meta("quantity", "spectral distribution"))
}

pub fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `# key: value` comment lines, a header and rows. Floats use the
/// shortest representation that round-trips.
pub fn write_table(mut out: impl Write, comments: &[(String, String)], columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    for (k, v) in comments {
        writeln!(out, "# {k}: {v}")?;
    }
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Format(format!("row has {} values for {} columns", row.len(), columns.len())));
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impedance_with_comments() {
        let text = "# circuit A\nomega, re_Z, im_Z\n0, 50, 0\n1e3, 50, -2.5\n";
        let z = read_impedance(text.as_bytes()).unwrap();
        assert_eq!(z.complex_values().unwrap()[1], Complex64::new(50.0, -2.5));
    }

    #[test]
    fn bad_tables() {
        assert!(matches!(read_force("t,g\n0,1\n".as_bytes()), Err(Error::Format(_))));
        assert!(matches!(read_force("t,f\n0,x\n".as_bytes()), Err(Error::Format(_))));
        assert!(matches!(read_force("t,f\n1,0\n0,1\n".as_bytes()), Err(Error::Format(_))));
        assert!(matches!(read_force("t,f\n".as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn write_read_round_trip() {
        let rows = vec![vec![0.0, 1.0 / 3.0], vec![0.1, -2e-300]];
        let mut buf = Vec::new();
        write_table(&mut buf, &[("units".into(), "reduced".into())], &["t", "f"], &rows).unwrap();
        let f = read_force(buf.as_slice()).unwrap();
        assert_eq!(f.real_values().unwrap(), &[1.0 / 3.0, -2e-300]);
        assert!(String::from_utf8(buf).unwrap().starts_with("# units: reduced\n"));
    }
}
