use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use coupler_core::nonlinear::Zeta;

use crate::config::CouplingPath;
use crate::error::{Result, SweepError};
use crate::sweep::SweepRow;

pub const COLUMNS: [&str; 15] = [
    "phi_ext_over_pi",
    "delta_rad",
    "L_eff_nH",
    "omega_q_GHz",
    "g_weak_MHz",
    "g_linear_MHz",
    "dg_MHz",
    "g_tot_MHz",
    "zeta",
    "splitting_ED_MHz",
    "J_approx_kHz",
    "J_sub_Hz",
    "J_ED_kHz",
    "eta_MHz",
    "diagnostic",
];

pub const ZETA_UNDEFINED: &str = "undefined";

fn column_index(name: &str) -> usize {
    COLUMNS
        .iter()
        .position(|c| *c == name)
        .expect("known column")
        + 1
}

fn num(v: Option<f64>) -> String {
    // `{:e}` prints the shortest representation that parses back exactly
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn fields(row: &SweepRow) -> [String; 15] {
    [
        format!("{:e}", row.phi_ext_over_pi),
        num(row.delta_rad),
        num(row.l_eff_nh),
        num(row.omega_q_ghz),
        num(row.g_weak_mhz),
        num(row.g_linear_mhz),
        num(row.dg_mhz),
        num(row.g_tot_mhz),
        match row.zeta {
            Some(Zeta::Defined(z)) => format!("{z:e}"),
            Some(Zeta::Undefined) => ZETA_UNDEFINED.to_string(),
            None => String::new(),
        },
        num(row.splitting_ed_mhz),
        num(row.j_approx_khz),
        num(row.j_sub_hz),
        num(row.j_ed_khz),
        num(row.eta_mhz),
        row.diagnostic.clone(),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(fields(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(SweepError::Config("no rows to write".into()));
    }
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    std::fs::write(path, buf).map_err(|source| SweepError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_opt(field: &str, column: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| SweepError::Config(format!("column {column}: cannot parse '{field}'")))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(SweepError::Config(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let rec = record?;
        let f = |i: usize| parse_opt(&rec[i], COLUMNS[i]);
        rows.push(SweepRow {
            phi_ext_over_pi: f(0)?.ok_or_else(|| SweepError::Config("missing flux".into()))?,
            delta_rad: f(1)?,
            l_eff_nh: f(2)?,
            omega_q_ghz: f(3)?,
            g_weak_mhz: f(4)?,
            g_linear_mhz: f(5)?,
            dg_mhz: f(6)?,
            g_tot_mhz: f(7)?,
            zeta: match &rec[8] {
                "" => None,
                ZETA_UNDEFINED => Some(Zeta::Undefined),
                z => Some(Zeta::Defined(parse_opt(z, "zeta")?.expect("non-empty"))),
            },
            splitting_ed_mhz: f(9)?,
            j_approx_khz: f(10)?,
            j_sub_hz: f(11)?,
            j_ed_khz: f(12)?,
            eta_mhz: f(13)?,
            diagnostic: rec[14].to_string(),
        });
    }
    Ok(rows)
}

/// gnuplot script drawing the sweep stored at `csv_name` (relative to the
/// script) into `<stem>.png`.
pub fn plot_script(paths: &[CouplingPath], csv_name: &str, png_name: &str) -> String {
    let has = |p: CouplingPath| paths.contains(&p);
    let x = column_index("phi_ext_over_pi");
    let line = |col: &str, expr: Option<&str>, title: &str| {
        let c = column_index(col);
        let y = match expr {
            Some(e) => e.replace('#', &format!("${c}")),
            None => format!("{c}"),
        };
        format!("'{csv_name}' using {x}:{y} with lines title '{title}'")
    };

    let mut panels: Vec<(&str, &str, Vec<String>)> = Vec::new();
    panels.push((
        "DC coupler phase",
        "delta (rad)",
        vec![line("delta_rad", None, "delta")],
    ));

    let mut g = Vec::new();
    if has(CouplingPath::Weak) {
        g.push(line("g_weak_MHz", None, "g weak coupling"));
    }
    if has(CouplingPath::Linear) {
        g.push(line("g_linear_MHz", None, "g linear network"));
    }
    if has(CouplingPath::Perturbative) {
        g.push(line("g_tot_MHz", None, "g + dg perturbative"));
    }
    if has(CouplingPath::Exact) {
        g.push(line(
            "splitting_ED_MHz",
            Some("(#/2)"),
            "|g| exact (splitting/2)",
        ));
    }
    panels.push(("Transverse coupling", "g/2pi (MHz)", g));

    if has(CouplingPath::Linear) || has(CouplingPath::Perturbative) {
        panels.push((
            "Qubit frequency",
            "omega_q/2pi (GHz)",
            vec![line("omega_q_GHz", None, "omega_q")],
        ));
    }

    let mut j = Vec::new();
    if has(CouplingPath::Perturbative) {
        j.push(line("J_approx_kHz", None, "g_tot^2/eta"));
        j.push(line("J_sub_Hz", Some("(#/1000)"), "Gamma22 term"));
    }
    if has(CouplingPath::Exact) {
        j.push(line("J_ED_kHz", None, "J exact"));
    }
    if !j.is_empty() {
        panels.push(("Diagonal coupling", "J/2pi (kHz)", j));
    }

    let (rows, cols) = match panels.len() {
        1 => (1, 1),
        2 => (1, 2),
        _ => (2, 2),
    };
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script; run with: gnuplot <this file>");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set datafile missing ''");
    let _ = writeln!(s, "set terminal pngcairo size 1400,1000");
    let _ = writeln!(s, "set output '{png_name}'");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set xlabel 'phi_ext / pi'");
    let _ = writeln!(s, "set multiplot layout {rows},{cols}");
    for (title, ylabel, curves) in &panels {
        let _ = writeln!(s);
        let _ = writeln!(s, "set title '{title}'");
        let _ = writeln!(s, "set ylabel '{ylabel}'");
        let _ = writeln!(s, "plot \\");
        let body: Vec<String> = curves.iter().map(|c| format!("    {c}")).collect();
        let _ = writeln!(s, "{}", body.join(", \\\n"));
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "unset multiplot");
    s
}

/// Writes the plot script next to the CSV it reads.
pub fn emit_plot_script(
    rows: &[SweepRow],
    paths: &[CouplingPath],
    csv_path: &Path,
    script_path: &Path,
) -> Result<()> {
    if rows.is_empty() {
        return Err(SweepError::Config("no rows to plot".into()));
    }
    let name = |p: &Path| {
        p.file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let png = script_path.with_extension("png");
    let script = plot_script(paths, &name(csv_path), &name(&png));
    std::fs::write(script_path, script).map_err(|source| SweepError::Write {
        path: script_path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<SweepRow> {
        vec![
            SweepRow {
                phi_ext_over_pi: 0.1,
                delta_rad: Some(0.2345678901234567),
                l_eff_nh: Some(1.3000000000000003),
                g_tot_mhz: Some(-6.388e-3),
                zeta: Some(Zeta::Defined(0.8519)),
                j_sub_hz: Some(-1.5e-300),
                ..SweepRow::default()
            },
            SweepRow {
                phi_ext_over_pi: 0.598,
                zeta: Some(Zeta::Undefined),
                diagnostic: "exact: labels, \"quoted\"".into(),
                ..SweepRow::default()
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = sample();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(parse_csv(&text).unwrap(), rows);
        assert!(text.starts_with(&COLUMNS.join(",")));
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains(",undefined,"));
    }

    #[test]
    fn csv_is_byte_identical_between_runs() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&sample(), &mut a).unwrap();
        write_csv(&sample(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn full_script_has_four_panels() {
        let s = plot_script(&CouplingPath::ALL, "s.csv", "s.png");
        assert_eq!(s.matches("set title").count(), 4);
        assert!(s.contains("layout 2,2"));
        assert!(s.contains("'s.csv' using 1:5 "));
        assert!(s.contains("($10/2)"));
        for title in [
            "g weak coupling",
            "g linear network",
            "g + dg perturbative",
            "|g| exact",
        ] {
            assert!(s.contains(title), "{title}");
        }
    }

    #[test]
    fn script_lists_only_enabled_paths() {
        let s = plot_script(&[CouplingPath::Weak], "w.csv", "w.png");
        assert_eq!(s.matches("set title").count(), 2);
        assert!(s.contains("g weak coupling"));
        assert!(!s.contains("linear network") && !s.contains("J exact"));
    }
}
