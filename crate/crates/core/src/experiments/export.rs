use std::io::Write;

use super::goodset::GoodSetReport;
use super::trials::TrialReport;
use crate::error::Result;

/// One row per trial with columns
/// `scenario,n,seed,rate,distortion_1..distortion_J,error_declared,l,s,code_index`;
/// `decoders` fixes the distortion columns so that an
/// empty list still writes a full header.
pub fn write_trials_csv<W: Write>(out: W, scenario: &str, decoders: usize, reports: &[TrialReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["scenario".to_string(), "n".into(), "seed".into(), "rate".into()];
    header.extend((1..=decoders).map(|j| format!("distortion_{j}")));
    header.extend(["error_declared", "l", "s", "code_index"].map(String::from));
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            scenario.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.rate.to_string(),
        ];
        row.extend(r.distortion.iter().map(f64::to_string));
        row.extend([
            r.error_declared.to_string(),
            r.block_len.to_string(),
            r.shift.to_string(),
            r.code_index.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per grid point with columns
/// `scenario,n,trials,errors,fraction,oracle,epsilon,premise_holds`; `oracle`
/// is empty when no exact value exists.
pub fn write_goodset_csv<W: Write>(out: W, scenario: &str, report: &GoodSetReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario",
        "n",
        "trials",
        "errors",
        "fraction",
        "oracle",
        "epsilon",
        "premise_holds",
    ])?;
    for p in &report.points {
        w.write_record([
            scenario.to_string(),
            p.n.to_string(),
            p.trials.to_string(),
            p.errors.to_string(),
            p.fraction.to_string(),
            p.oracle.map(|o| o.to_string()).unwrap_or_default(),
            report.epsilon.to_string(),
            report.premise_holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trials_write_header_only() {
        let mut buf = Vec::new();
        write_trials_csv(&mut buf, "wz", 2, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scenario,n,seed,rate,distortion_1,distortion_2,error_declared,l,s,code_index\n"
        );
    }

    fn report() -> TrialReport {
        TrialReport {
            trial: 0,
            n: 8,
            seed: 3,
            bits: 4,
            rate: 0.5,
            distortion: vec![0.125],
            exact_distortion: vec![0.1],
            bound: vec![1.0],
            error_declared: false,
            block_len: 1,
            shift: 0,
            code_index: 2,
        }
    }

    #[test]
    fn rows_follow_reports() {
        let reports = vec![report(), report(), report()];
        let mut first = Vec::new();
        write_trials_csv(&mut first, "wz", 1, &reports).unwrap();
        let text = String::from_utf8(first.clone()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(1).unwrap(), "wz,8,3,0.5,0.125,false,1,0,2");
        let mut second = Vec::new();
        write_trials_csv(&mut second, "wz", 1, &reports).unwrap();
        assert_eq!(first, second);
    }
}
