use std::io::{Read, Write};

use super::{SimResult, SnrPoint};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scheme,seed,bpcu,nr,snr_db,trials,bits,bit_errors,ber,ci95_low,ci95_high";

/// Writes `manifest` lines as `# ` comments, the header, then one row per
/// SNR point of every result.
pub fn write_results_csv<W: Write + ?Sized>(out: &mut W, manifest: &[String], results: &[SimResult]) -> Result<()> {
    for line in manifest {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in results {
        for p in &r.points {
            w.write_record([
                r.scheme.clone(),
                r.seed.to_string(),
                r.bpcu.to_string(),
                r.nr.to_string(),
                p.snr_db.to_string(),
                p.trials.to_string(),
                p.bits.to_string(),
                p.bit_errors.to_string(),
                format!("{:.6e}", p.ber),
                format!("{:.6e}", p.ci95_low),
                format!("{:.6e}", p.ci95_high),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, index: usize, name: &str) -> Result<T> {
    let line = record.position().map_or(0, |p| p.line());
    let value = record.get(index).unwrap_or("");
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {name} `{value}`")))
}

/// Reads a results CSV back, one [`SimResult`] per consecutive run of rows
/// sharing `(scheme, seed, bpcu, nr)`. Comment lines are skipped. Counts
/// are authoritative: BER and interval are recomputed from them.
pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<SimResult>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("expected header `{CSV_HEADER}`")));
    }
    let mut results: Vec<SimResult> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let scheme = record[0].to_string();
        let seed: u64 = field(&record, 1, "seed")?;
        let bpcu: f64 = field(&record, 2, "bpcu")?;
        let nr: usize = field(&record, 3, "nr")?;
        let point = SnrPoint::new(
            field(&record, 4, "snr_db")?,
            field(&record, 5, "trials")?,
            field(&record, 6, "bits")?,
            field(&record, 7, "bit_errors")?,
        );
        match results.last_mut() {
            Some(r) if r.scheme == scheme && r.seed == seed && r.bpcu == bpcu && r.nr == nr => {
                r.points.push(point)
            }
            _ => results.push(SimResult {
                scheme,
                seed,
                bpcu,
                nr,
                points: vec![point],
            }),
        }
    }
    Ok(results)
}

/// Plot data: one block per scheme of `snr_db ber` lines, blocks separated
/// by two blank lines.
pub fn write_gplot<W: Write + ?Sized>(out: &mut W, manifest: &[String], results: &[SimResult]) -> Result<()> {
    for line in manifest {
        writeln!(out, "# {line}")?;
    }
    for (i, r) in results.iter().enumerate() {
        if i > 0 {
            writeln!(out, "\n")?;
        }
        writeln!(out, "# {} ({} bpcu, nr = {})", r.scheme, r.bpcu, r.nr)?;
        for p in &r.points {
            writeln!(out, "{} {:.6e}", p.snr_db, p.ber)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<SimResult> {
        vec![
            SimResult {
                scheme: "golden_thread".into(),
                seed: 7,
                bpcu: 4.0,
                nr: 2,
                points: vec![SnrPoint::new(0.0, 10, 40, 9), SnrPoint::new(4.5, 10, 40, 2)],
            },
            SimResult {
                scheme: "beamforming".into(),
                seed: 7,
                bpcu: 4.0,
                nr: 2,
                points: vec![SnrPoint::new(0.0, 10, 40, 12)],
            },
        ]
    }

    #[test]
    fn round_trip() {
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &["command: test".into()], &sample()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# command: test\n"));
        assert_eq!(text.lines().nth(1), Some(CSV_HEADER));
        assert_eq!(read_results_csv(buf.as_slice()).unwrap(), sample());
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_results_csv("a,b\n".as_bytes()).is_err());
        let bad = format!("{CSV_HEADER}\nx,1,2,3\n");
        assert!(read_results_csv(bad.as_bytes()).is_err());
        assert!(read_results_csv("# only comments\n".as_bytes()).is_err());
        let odd = SimResult {
            scheme: "a, \"quoted\" name".into(),
            ..sample().remove(1)
        };
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &[], std::slice::from_ref(&odd)).unwrap();
        assert_eq!(read_results_csv(buf.as_slice()).unwrap(), vec![odd]);
    }

    #[test]
    fn gplot_blocks() {
        let mut buf = Vec::new();
        write_gplot(&mut buf, &[], &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("# ").count(), 2);
        assert!(text.contains("4.5 5.000000e-2"));
    }
}
