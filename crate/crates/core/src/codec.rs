//! Little-endian binary encoding with a field manifest.
//!
//! Every field is written as `name_len:u16, name:utf8, tag:u8, payload`. The
//! reader checks each name against what it expects, so reordering or
//! renaming a field in one build and not the other is caught instead of being
//! silently misread.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

const TAG_U32: u8 = 1;
const TAG_U64: u8 = 2;
const TAG_F64: u8 = 3;
const TAG_F64S: u8 = 4;
const TAG_U32S: u8 = 5;
const TAG_BYTES: u8 = 6;

#[derive(Debug, Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 8], version: u32) -> Self {
        let mut buf = Vec::with_capacity(1024);
        buf.extend_from_slice(magic);
        buf.extend_from_slice(&version.to_le_bytes());
        Writer { buf }
    }

    fn name(&mut self, name: &str, tag: u8) {
        self.buf.extend_from_slice(&(name.len() as u16).to_le_bytes());
        self.buf.extend_from_slice(name.as_bytes());
        self.buf.push(tag);
    }

    pub fn u32(&mut self, name: &str, v: u32) -> &mut Self {
        self.name(name, TAG_U32);
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u64(&mut self, name: &str, v: u64) -> &mut Self {
        self.name(name, TAG_U64);
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, name: &str, v: f64) -> &mut Self {
        self.name(name, TAG_F64);
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64s(&mut self, name: &str, v: &[f64]) -> &mut Self {
        self.name(name, TAG_F64S);
        self.buf.extend_from_slice(&(v.len() as u64).to_le_bytes());
        for x in v {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
        self
    }

    pub fn u32s(&mut self, name: &str, v: &[u32]) -> &mut Self {
        self.name(name, TAG_U32S);
        self.buf.extend_from_slice(&(v.len() as u64).to_le_bytes());
        for x in v {
            self.buf.extend_from_slice(&x.to_le_bytes());
        }
        self
    }

    pub fn bytes(&mut self, name: &str, v: &[u8]) -> &mut Self {
        self.name(name, TAG_BYTES);
        self.buf.extend_from_slice(&(v.len() as u64).to_le_bytes());
        self.buf.extend_from_slice(v);
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

#[derive(Debug)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks the magic and version and positions the reader at the first field.
    pub fn new(buf: &'a [u8], magic: &[u8; 8], version: u32) -> Result<Self> {
        if buf.len() < 12 || &buf[..8] != magic {
            return Err(Error::Decode("bad magic".to_string()));
        }
        let found = u32::from_le_bytes([buf[8], buf[9], buf[10], buf[11]]);
        if found != version {
            return Err(Error::Version { found, expected: version });
        }
        Ok(Reader { buf, pos: 12 })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Decode(String::from("unexpected end of data")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn expect(&mut self, name: &str, tag: u8) -> Result<()> {
        let len = u16::from_le_bytes(self.take(2)?.try_into().unwrap()) as usize;
        let found = self.take(len)?;
        if found != name.as_bytes() {
            return Err(Error::Decode(alloc::format!(
                "expected field `{name}`, found `{}`",
                String::from_utf8_lossy(found)
            )));
        }
        let t = self.take(1)?[0];
        if t != tag {
            return Err(Error::Decode(alloc::format!("field `{name}` has wrong type tag {t}")));
        }
        Ok(())
    }

    fn len(&mut self, elem: usize) -> Result<usize> {
        let n = u64::from_le_bytes(self.take(8)?.try_into().unwrap()) as usize;
        if n.checked_mul(elem).map_or(true, |b| self.pos + b > self.buf.len()) {
            return Err(Error::Decode(String::from("array length exceeds data")));
        }
        Ok(n)
    }

    pub fn u32(&mut self, name: &str) -> Result<u32> {
        self.expect(name, TAG_U32)?;
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self, name: &str) -> Result<u64> {
        self.expect(name, TAG_U64)?;
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self, name: &str) -> Result<f64> {
        self.expect(name, TAG_F64)?;
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64s(&mut self, name: &str) -> Result<Vec<f64>> {
        self.expect(name, TAG_F64S)?;
        let n = self.len(8)?;
        let raw = self.take(n * 8)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    pub fn u32s(&mut self, name: &str) -> Result<Vec<u32>> {
        self.expect(name, TAG_U32S)?;
        let n = self.len(4)?;
        let raw = self.take(n * 4)?;
        Ok(raw.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect())
    }

    pub fn bytes(&mut self, name: &str) -> Result<Vec<u8>> {
        self.expect(name, TAG_BYTES)?;
        let n = self.len(1)?;
        Ok(self.take(n)?.to_vec())
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Decode(alloc::format!(
                "{} trailing bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn fields_roundtrip() {
        let mut w = Writer::new(b"TESTFMT\0", 3);
        w.u32("a", 7).f64("b", -1.5).f64s("c", &[1.0, 2.0]).u32s("d", &[9]).bytes("e", b"xy");
        let buf = w.finish();
        let mut r = Reader::new(&buf, b"TESTFMT\0", 3).unwrap();
        assert_eq!(r.u32("a").unwrap(), 7);
        assert_eq!(r.f64("b").unwrap(), -1.5);
        assert_eq!(r.f64s("c").unwrap(), vec![1.0, 2.0]);
        assert_eq!(r.u32s("d").unwrap(), vec![9]);
        assert_eq!(r.bytes("e").unwrap(), b"xy".to_vec());
        r.finish().unwrap();
    }

    #[test]
    fn wrong_field_name_and_version_are_rejected() {
        let mut w = Writer::new(b"TESTFMT\0", 3);
        w.u32("a", 7);
        let buf = w.finish();
        assert!(matches!(Reader::new(&buf, b"TESTFMT\0", 4), Err(Error::Version { found: 3, expected: 4 })));
        let mut r = Reader::new(&buf, b"TESTFMT\0", 3).unwrap();
        assert!(r.u32("b").is_err());
    }

    #[test]
    fn truncated_data_is_an_error() {
        let mut w = Writer::new(b"TESTFMT\0", 1);
        w.f64s("c", &[1.0, 2.0, 3.0]);
        let buf = w.finish();
        let mut r = Reader::new(&buf[..buf.len() - 3], b"TESTFMT\0", 1).unwrap();
        assert!(r.f64s("c").is_err());
    }
}
