//! Result serialization: a fixed-header CSV per run, and gnuplot-style
//! two-column blocks for quick plotting.

use std::path::Path;

use crate::bench::sim::ResultRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "ebn0_db,frames,bit_errors,ber,ser,fer,mean_iters,int_add,int_cmp,field_ops,real_mul,real_add,real_div,ratio";

/// Renders rows under [`CSV_HEADER`]. Floats use the shortest
/// round-trippable form, so equal runs serialize to equal bytes.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let m = &r.mean_ops;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.ebn0_db,
            r.frames,
            r.bit_errors,
            r.ber,
            r.ser,
            r.fer,
            r.mean_iterations,
            m.int_add,
            m.int_cmp,
            m.field_ops,
            m.real_mul,
            m.real_add,
            m.real_div,
            r.ratio
        ));
    }
    out
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(rows)).map_err(|e| Error::io(path.display().to_string(), e))
}

/// One `ebn0_db ber` block per series, each headed by a `# label` comment.
/// Blocks are separated by double blank lines, which gnuplot addresses as
/// `index 0..n-1`.
pub fn plotdata_string(series: &[(String, Vec<ResultRow>)]) -> String {
    let blocks: Vec<String> = series
        .iter()
        .map(|(label, rows)| {
            let mut block = format!("# {label}\n");
            for r in rows {
                block.push_str(&format!("{} {}\n", r.ebn0_db, r.ber));
            }
            block
        })
        .collect();
    blocks.join("\n\n")
}

pub fn emit_plotdata(series: &[(String, Vec<ResultRow>)], path: &Path) -> Result<()> {
    std::fs::write(path, plotdata_string(series))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::sim::MeanOps;

    fn row(ebn0: f64, ber: f64) -> ResultRow {
        ResultRow {
            ebn0_db: ebn0,
            frames: 1000,
            bit_errors: 123,
            symbol_errors: 45,
            frame_errors: 6,
            ber,
            ser: 0.0045,
            fer: 0.006,
            mean_iterations: 2.5,
            mean_ops: MeanOps {
                int_add: 1280.0,
                int_cmp: 960.0,
                field_ops: 64.0,
                real_mul: 0.0,
                real_add: 0.0,
                real_div: 0.0,
                ems_configs: 333.0,
            },
            ratio: 0.25,
            bit_errors_sq_sum: 999,
            ems_configs_per_iter_mean: 333.0,
            ems_configs_per_iter_stddev: 10.0,
        }
    }

    #[test]
    fn empty_rows_give_a_header_only_csv() {
        assert_eq!(csv_string(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn a_row_round_trips_through_a_csv_parser() {
        let r = row(3.5, 1.23e-4);
        let text = csv_string(&[r.clone()]);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), CSV_HEADER.split(',').count());
        assert_eq!(fields[0].parse::<f64>().unwrap(), r.ebn0_db);
        assert_eq!(fields[1].parse::<u64>().unwrap(), r.frames);
        assert_eq!(fields[2].parse::<u64>().unwrap(), r.bit_errors);
        assert_eq!(fields[3].parse::<f64>().unwrap(), r.ber);
        assert_eq!(fields[4].parse::<f64>().unwrap(), r.ser);
        assert_eq!(fields[5].parse::<f64>().unwrap(), r.fer);
        assert_eq!(fields[6].parse::<f64>().unwrap(), r.mean_iterations);
        assert_eq!(fields[7].parse::<f64>().unwrap(), r.mean_ops.int_add);
        assert_eq!(fields[13].parse::<f64>().unwrap(), r.ratio);
    }

    #[test]
    fn plotdata_has_one_block_per_series() {
        let series = vec![
            ("mu-ems".to_string(), vec![row(2.0, 1e-2), row(3.0, 1e-3)]),
            ("qspa".to_string(), vec![row(2.0, 2e-2)]),
        ];
        let text = plotdata_string(&series);
        let blocks: Vec<&str> = text.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2, "two series, two gnuplot blocks");
        assert!(blocks[0].starts_with("# mu-ems\n"));
        assert!(blocks[0].contains("2 0.01\n"));
        assert!(blocks[1].starts_with("# qspa\n"));
        let data_lines = blocks[0].lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(data_lines, 2);
    }

    #[test]
    fn files_land_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("out.csv");
        emit_csv(&[row(1.0, 0.5)], &csv).unwrap();
        assert!(std::fs::read_to_string(&csv).unwrap().ends_with("0.25\n"));

        let pd = dir.path().join("out.dat");
        emit_plotdata(&[("a".into(), vec![row(1.0, 0.5)])], &pd).unwrap();
        assert_eq!(std::fs::read_to_string(&pd).unwrap(), "# a\n1 0.5\n");

        let missing = dir.path().join("no/such/dir/out.csv");
        let err = emit_csv(&[], &missing).unwrap_err().to_string();
        assert!(err.contains("no/such/dir"), "got: {err}");
    }
}
