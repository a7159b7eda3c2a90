//! JSON encoding. A complex scalar is `[re, im]` and a matrix is an array
//! of rows. Floats are written with 17 significant digits so that doubles
//! survive a round trip.

use std::io;

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::channel::{Channel, MixedUnitaryDecomposition};
use crate::linalg::{ComplexMatrix, C64};
use crate::twirls::FiniteGroupRep;

struct Row<'a>(&'a [C64]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for z in self.0 {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows()))?;
        for r in 0..self.rows() {
            seq.serialize_element(&Row(self.row(r)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Serialize for Channel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ChannelRepr {
            dim_in: self.dim_in(),
            dim_out: self.dim_out(),
            kraus: self.kraus().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ChannelRepr::deserialize(d)?;
        let c = Channel::new(repr.kraus).map_err(D::Error::custom)?;
        if (c.dim_in(), c.dim_out()) != (repr.dim_in, repr.dim_out) {
            return Err(D::Error::custom(format!(
                "declared dimensions {}→{} do not match Kraus operators {}→{}",
                repr.dim_in,
                repr.dim_out,
                c.dim_in(),
                c.dim_out()
            )));
        }
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    dim: usize,
    probs: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
}

impl Serialize for MixedUnitaryDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DecompositionRepr {
            dim: self.dim(),
            probs: self.probs().to_vec(),
            unitaries: self.unitaries().to_vec(),
        }
        .serialize(s)
    }
}

/// Only shapes are checked, so that a corrupted decomposition can still be
/// loaded and reported on by the verifier.
impl<'de> Deserialize<'de> for MixedUnitaryDecomposition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = DecompositionRepr::deserialize(d)?;
        let out = MixedUnitaryDecomposition::from_raw_parts(repr.probs, repr.unitaries)
            .map_err(D::Error::custom)?;
        if out.dim() != repr.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match unitaries of size {}",
                repr.dim,
                out.dim()
            )));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Serialize for FiniteGroupRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GroupRepr {
            dim: self.dim(),
            elements: self.elements().to_vec(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteGroupRep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GroupRepr::deserialize(d)?;
        let g = FiniteGroupRep::new(repr.elements).map_err(D::Error::custom)?;
        if g.dim() != repr.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match elements of size {}",
                repr.dim,
                g.dim()
            )));
        }
        Ok(g)
    }
}

/// Compact JSON formatter printing every float as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloatFormatter;

impl serde_json::ser::Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_writer<W: io::Write, T: Serialize + ?Sized>(
    writer: W,
    value: &T,
) -> serde_json::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, ExactFloatFormatter);
    value.serialize(&mut ser)
}

/// Serializes with [`ExactFloatFormatter`].
pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    to_writer(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
