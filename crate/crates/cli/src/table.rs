use std::io::Write;

use hme_core::stability::{SpaceDispersionPoint, TimeDispersionPoint};
use hme_core::CollisionModel;
use serde::Serialize;

use crate::Failure;

/// What every table carries so that it can be read on its own.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub dim: usize,
    pub order: usize,
    pub system: &'static str,
    pub collision: CollisionModel,
    pub tolerance: f64,
}

impl Meta {
    fn comment(&self) -> String {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| v.to_string());
        let mut s = format!(
            "# D={} M={} system={} model={} tau={} Pr={}",
            self.dim,
            self.order,
            self.system,
            self.collision.name(),
            opt(self.collision.tau()),
            opt(self.collision.prandtl()),
        );
        if let CollisionModel::Binary { kernel, nodes, angles } = self.collision {
            s.push_str(&format!(" B0={kernel} nodes={nodes} angles={angles}"));
        }
        s.push_str(&format!(" tol={:e}", self.tolerance));
        s
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn io(e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("writing output: {e}"))
}

#[derive(Serialize)]
struct Row<'a, P> {
    #[serde(flatten)]
    point: &'a P,
    verdict: &'static str,
}

#[derive(Serialize)]
struct Document<'a, P> {
    schema: u32,
    #[serde(flatten)]
    meta: &'a Meta,
    points: Vec<Row<'a, P>>,
    pass: bool,
}

pub fn write_json<P: Serialize>(
    out: impl Write,
    meta: &Meta,
    points: &[P],
    stable: impl Fn(&P) -> bool,
) -> Result<(), Failure> {
    let rows: Vec<Row<P>> = points
        .iter()
        .map(|p| Row {
            point: p,
            verdict: verdict(stable(p)),
        })
        .collect();
    let doc = Document {
        schema: hme_core::verify::SCHEMA_VERSION,
        meta,
        pass: rows.iter().all(|r| r.verdict == "PASS"),
        points: rows,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(io)?;
    writeln!(out).map_err(io)
}

pub fn write_time_csv(mut out: impl Write, meta: &Meta, points: &[TimeDispersionPoint]) -> Result<(), Failure> {
    writeln!(out, "{}", meta.comment()).map_err(io)?;
    let n = points.first().map_or(0, |p| p.omegas.len());
    let mut header: Vec<String> = if meta.dim == 1 {
        vec!["k".into()]
    } else {
        (1..=meta.dim).map(|d| format!("k{d}")).collect()
    };
    for j in 1..=n {
        header.push(format!("re_omega_{j}"));
        header.push(format!("im_omega_{j}"));
    }
    header.extend(["min_im".into(), "verdict".into()]);

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(io)?;
    for p in points {
        let mut rec: Vec<String> = p.k.iter().map(|x| num(*x)).collect();
        for z in &p.omegas {
            rec.push(num(z.re));
            rec.push(num(z.im));
        }
        rec.push(num(p.min_im));
        rec.push(verdict(p.is_stable(meta.tolerance)).into());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Rows have as many root columns as the widest row; shorter rows leave them empty.
pub fn write_space_csv(mut out: impl Write, meta: &Meta, points: &[SpaceDispersionPoint]) -> Result<(), Failure> {
    writeln!(out, "{}", meta.comment()).map_err(io)?;
    let n = points.iter().map(|p| p.ks.len()).max().unwrap_or(0);
    let mut header = vec!["omega".to_string()];
    for j in 1..=n {
        header.push(format!("re_k_{j}"));
        header.push(format!("im_k_{j}"));
        header.push(format!("product_{j}"));
    }
    header.extend(["infinite_roots", "worst_product", "det_residual", "verdict"].map(String::from));

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(io)?;
    for p in points {
        let mut rec = vec![num(p.omega)];
        for j in 0..n {
            match (p.ks.get(j), p.products.get(j)) {
                (Some(k), Some(q)) => rec.extend([num(k.re), num(k.im), num(*q)]),
                _ => rec.extend([String::new(), String::new(), String::new()]),
            }
        }
        rec.push(p.infinite_count.to_string());
        rec.push(num(p.worst_product));
        rec.push(num(p.max_det_residual));
        rec.push(verdict(p.is_stable(meta.tolerance)).into());
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(io)
}
