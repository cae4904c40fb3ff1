//! Program inputs: where they live and which values they range over.

use alloc::vec::Vec;
use core::fmt;

use crate::isa::Reg;

/// An input location: one of the argument registers `$a0..$a3`, or an
/// aligned memory word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Location {
    Reg(Reg),
    Mem(u32),
}

impl Location {
    pub fn arg(n: u8) -> Option<Location> {
        (n < 4).then(|| Location::Reg(Reg::from_field(4 + n as u32)))
    }

    pub fn parse(text: &str) -> Option<Location> {
        match text {
            "a0" => Location::arg(0),
            "a1" => Location::arg(1),
            "a2" => Location::arg(2),
            "a3" => Location::arg(3),
            _ => {
                let hex = text.strip_prefix("mem:")?;
                let digits = hex.strip_prefix("0x").or_else(|| hex.strip_prefix("0X"))?;
                u32::from_str_radix(digits, 16).ok().map(Location::Mem)
            }
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Reg(r) => write!(f, "a{}", r.number() - 4),
            Location::Mem(addr) => write!(f, "mem:0x{addr:08x}"),
        }
    }
}

/// Interpretation of a 32-bit word as an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum View {
    Signed,
    Unsigned,
}

impl View {
    pub const fn min(self) -> i64 {
        match self {
            View::Signed => i32::MIN as i64,
            View::Unsigned => 0,
        }
    }

    pub const fn max(self) -> i64 {
        match self {
            View::Signed => i32::MAX as i64,
            View::Unsigned => u32::MAX as i64,
        }
    }

    pub const fn contains(self, v: i64) -> bool {
        v >= self.min() && v <= self.max()
    }

    /// The integer a word denotes under this view.
    pub const fn of_word(self, w: u32) -> i64 {
        match self {
            View::Signed => w as i32 as i64,
            View::Unsigned => w as i64,
        }
    }
}

/// One input dimension: a location and an inclusive range under a view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dim {
    pub loc: Location,
    pub lo: i64,
    pub hi: i64,
    pub view: View,
}

impl Dim {
    pub fn cardinality(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceError {
    DuplicateLocation(Location),
    NotAnArgumentRegister(Location),
    MisalignedMemory(Location),
    EmptyRange(Location),
    OutOfView(Location),
    TooLarge,
}

impl fmt::Display for SpaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceError::DuplicateLocation(l) => write!(f, "input {l} is bound twice"),
            SpaceError::NotAnArgumentRegister(l) => {
                write!(f, "input {l} is not an argument register")
            }
            SpaceError::MisalignedMemory(l) => write!(f, "memory input {l} is not word aligned"),
            SpaceError::EmptyRange(l) => write!(f, "input {l} has an empty range"),
            SpaceError::OutOfView(l) => write!(f, "input {l} has bounds outside its view"),
            SpaceError::TooLarge => f.write_str("input space has more than 2^64 points"),
        }
    }
}

/// The rectangular input space explored by the analyses.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InputSpace {
    dims: Vec<Dim>,
}

impl InputSpace {
    pub fn new(dims: Vec<Dim>) -> Result<InputSpace, SpaceError> {
        let mut card: u128 = 1;
        for (i, d) in dims.iter().enumerate() {
            match d.loc {
                Location::Reg(r) if !(4..=7).contains(&r.number()) => {
                    return Err(SpaceError::NotAnArgumentRegister(d.loc))
                }
                Location::Mem(addr) if addr % 4 != 0 => {
                    return Err(SpaceError::MisalignedMemory(d.loc))
                }
                _ => {}
            }
            if dims[..i].iter().any(|o| o.loc == d.loc) {
                return Err(SpaceError::DuplicateLocation(d.loc));
            }
            if !d.view.contains(d.lo) || !d.view.contains(d.hi) {
                return Err(SpaceError::OutOfView(d.loc));
            }
            if d.lo > d.hi {
                return Err(SpaceError::EmptyRange(d.loc));
            }
            card *= d.cardinality() as u128;
            if card > u64::MAX as u128 {
                return Err(SpaceError::TooLarge);
            }
        }
        Ok(InputSpace { dims })
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn cardinality(&self) -> u64 {
        self.dims.iter().map(Dim::cardinality).product()
    }

    /// The binding at position `index` in row-major order (last dimension
    /// varies fastest).
    pub fn binding_at(&self, mut index: u64) -> InputBinding {
        let mut values = alloc::vec![0i64; self.dims.len()];
        for (slot, d) in values.iter_mut().zip(&self.dims).rev() {
            let n = d.cardinality();
            *slot = d.lo + (index % n) as i64;
            index /= n;
        }
        InputBinding {
            values: self
                .dims
                .iter()
                .zip(values)
                .map(|(d, v)| (d.loc, v))
                .collect(),
        }
    }

    /// Every point of the space exactly once, in row-major order.
    pub fn enumerate(&self) -> impl Iterator<Item = InputBinding> + '_ {
        (0..self.cardinality()).map(move |i| self.binding_at(i))
    }
}

/// Concrete values for a set of input locations.
///
/// Values are kept as the integers they were written as; the machine word
/// is their low 32 bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct InputBinding {
    pub values: Vec<(Location, i64)>,
}

impl InputBinding {
    pub fn new(values: Vec<(Location, i64)>) -> InputBinding {
        InputBinding { values }
    }

    pub fn empty() -> InputBinding {
        InputBinding::default()
    }

    pub fn words(&self) -> impl Iterator<Item = (Location, u32)> + '_ {
        self.values.iter().map(|&(l, v)| (l, v as u32))
    }

    pub fn get(&self, loc: Location) -> Option<i64> {
        self.values.iter().find(|(l, _)| *l == loc).map(|&(_, v)| v)
    }
}

impl fmt::Display for InputBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (loc, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{loc}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dim(n: u8, lo: i64, hi: i64) -> Dim {
        Dim {
            loc: Location::arg(n).unwrap(),
            lo,
            hi,
            view: View::Signed,
        }
    }

    fn a(n: u8) -> Location {
        Location::arg(n).unwrap()
    }

    #[test]
    fn single_dimension_in_order() {
        let space = InputSpace::new(vec![dim(0, 0, 2)]).unwrap();
        let got: Vec<_> = space.enumerate().map(|b| b.get(a(0)).unwrap()).collect();
        assert_eq!(got, vec![0, 1, 2]);
    }

    #[test]
    fn row_major_over_two_dimensions() {
        let space = InputSpace::new(vec![dim(0, 0, 1), dim(1, 0, 1)]).unwrap();
        let got: Vec<_> = space
            .enumerate()
            .map(|b| (b.get(a(0)).unwrap(), b.get(a(1)).unwrap()))
            .collect();
        assert_eq!(got, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn empty_product_has_one_point() {
        let space = InputSpace::new(vec![]).unwrap();
        let all: Vec<_> = space.enumerate().collect();
        assert_eq!(all, vec![InputBinding::empty()]);
    }

    #[test]
    fn validation() {
        assert_eq!(
            InputSpace::new(vec![dim(0, 0, 1), dim(0, 2, 3)]),
            Err(SpaceError::DuplicateLocation(a(0)))
        );
        assert_eq!(
            InputSpace::new(vec![dim(0, 3, 1)]),
            Err(SpaceError::EmptyRange(a(0)))
        );
        let bad_reg = Dim {
            loc: Location::Reg(Reg::SP),
            ..dim(0, 0, 1)
        };
        assert!(matches!(
            InputSpace::new(vec![bad_reg]),
            Err(SpaceError::NotAnArgumentRegister(_))
        ));
        let odd = Dim {
            loc: Location::Mem(0x1002),
            ..dim(0, 0, 1)
        };
        assert!(matches!(
            InputSpace::new(vec![odd]),
            Err(SpaceError::MisalignedMemory(_))
        ));
        let unsigned_negative = Dim {
            view: View::Unsigned,
            ..dim(0, -1, 1)
        };
        assert!(matches!(
            InputSpace::new(vec![unsigned_negative]),
            Err(SpaceError::OutOfView(_))
        ));
        let full = Dim {
            view: View::Unsigned,
            ..dim(0, 0, u32::MAX as i64)
        };
        let half = Dim { loc: a(1), hi: i32::MAX as i64, ..full };
        assert!(InputSpace::new(vec![full, half]).is_ok());
        assert_eq!(
            InputSpace::new(vec![full, Dim { loc: a(1), ..full }]),
            Err(SpaceError::TooLarge)
        );
    }

    #[test]
    fn location_parsing() {
        assert_eq!(Location::parse("a2"), Location::arg(2));
        assert_eq!(Location::parse("mem:0x10010000"), Some(Location::Mem(0x1001_0000)));
        assert_eq!(Location::parse("a4"), None);
        assert_eq!(Location::parse("mem:1234"), None);
        assert_eq!(alloc::format!("{}", Location::arg(3).unwrap()), "a3");
    }
}
