//! Serialization of reports and curves.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every value round-trips and identical runs produce identical bytes.
//! Non-finite floats become `null`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::analysis::ClosedFormCurve;
use crate::error::Result;
use crate::protocols::TeleportReport;

/// `{:.16e}` with negative zero written as zero.
fn sci(value: f64) -> String {
    format!("{:.16e}", if value == 0.0 { 0.0 } else { value })
}

fn write_float<W: ?Sized + Write>(writer: &mut W, value: f64) -> io::Result<()> {
    if value.is_finite() {
        writer.write_all(sci(value).as_bytes())
    } else {
        writer.write_all(b"null")
    }
}

/// Wraps a serde_json formatter, overriding only how floats are printed.
struct FixedPrecision<F>(F);

macro_rules! forward {
    ($($name:ident $(($arg:ident: $ty:ty))?;)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.0.$name(writer $(, $arg)?)
            }
        )*
    };
}

impl<F: Formatter> Formatter for FixedPrecision<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write_float(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write_float(writer, value as f64)
    }

    forward! {
        begin_array;
        end_array;
        begin_array_value(first: bool);
        end_array_value;
        begin_object;
        end_object;
        begin_object_key(first: bool);
        end_object_key;
        begin_object_value;
        end_object_value;
    }
}

/// JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T, pretty: bool) -> Result<String> {
    let mut out = Vec::new();
    if pretty {
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedPrecision(PrettyFormatter::new()));
        value.serialize(&mut ser)?;
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedPrecision(CompactFormatter));
        value.serialize(&mut ser)?;
    }
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// `alpha,value` rows under a header.
pub fn csv_float(value: f64) -> String {
    sci(value)
}

pub fn curve_to_csv(curve: &ClosedFormCurve) -> String {
    let mut out = String::from("alpha,value\n");
    for (a, v) in curve.alpha.iter().zip(&curve.values) {
        out.push_str(&format!("{},{}\n", sci(*a), sci(*v)));
    }
    out
}

/// `engine,n,m,class,probability,fidelity` rows; reports share one header.
pub fn reports_to_csv(reports: &[&TeleportReport]) -> String {
    let mut out = String::from("engine,n,m,class,probability,fidelity\n");
    for r in reports {
        for o in &r.outcomes {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.engine.as_str(),
                o.n,
                o.m,
                o.kind.as_str(),
                sci(o.probability),
                sci(o.fidelity)
            ));
        }
    }
    out
}
