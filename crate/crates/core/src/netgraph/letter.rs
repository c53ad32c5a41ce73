//! The four-letter alphabet, its two group structures, and single-letter maps.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// A symbol of the alphabet `{00, 01, 10, 11}`, stored as its integer code `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub const ALL: [Letter; 4] = [Letter(0), Letter(1), Letter(2), Letter(3)];
    pub const ZERO: Letter = Letter(0);

    /// Panics if `code >= 4`.
    pub fn new(code: u8) -> Self {
        assert!(code < 4, "letter code {code} out of range");
        Letter(code)
    }

    pub fn from_bits(hi: bool, lo: bool) -> Self {
        Letter(((hi as u8) << 1) | lo as u8)
    }

    pub fn bits(self) -> (bool, bool) {
        (self.0 & 2 != 0, self.0 & 1 != 0)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The three letters other than `self`, in ascending order.
    pub fn others(self) -> impl Iterator<Item = Letter> {
        Letter::ALL.into_iter().filter(move |&l| l != self)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (hi, lo) = self.bits();
        write!(f, "{}{}", hi as u8, lo as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid letter {0:?}, expected one of 00, 01, 10, 11")]
pub struct ParseLetterError(pub String);

impl FromStr for Letter {
    type Err = ParseLetterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "00" => Ok(Letter(0)),
            "01" => Ok(Letter(1)),
            "10" => Ok(Letter(2)),
            "11" => Ok(Letter(3)),
            _ => Err(ParseLetterError(s.to_string())),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which abelian group structure the additions at a node use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// Addition mod 4 on the codes `00 -> 0, 01 -> 1, 10 -> 2, 11 -> 3`.
    Z4,
    /// Bitwise XOR.
    Z2xZ2,
}

impl GroupKind {
    pub fn add(self, a: Letter, b: Letter) -> Letter {
        match self {
            GroupKind::Z4 => Letter((a.0 + b.0) % 4),
            GroupKind::Z2xZ2 => Letter(a.0 ^ b.0),
        }
    }

    pub fn neg(self, a: Letter) -> Letter {
        match self {
            GroupKind::Z4 => Letter((4 - a.0) % 4),
            GroupKind::Z2xZ2 => a,
        }
    }

    pub fn sum(self, letters: impl IntoIterator<Item = Letter>) -> Letter {
        letters.into_iter().fold(Letter::ZERO, |acc, l| self.add(acc, l))
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Z4 => "Z4",
            GroupKind::Z2xZ2 => "Z2xZ2",
        })
    }
}

/// Image-size class of a [`LetterMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapClass {
    Constant,
    OneToOne,
    TwoToOne,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("map {table} has an image of size {image_size} and is neither constant, one-to-one nor two-to-one")]
pub struct IllegalMapError {
    pub table: String,
    pub image_size: usize,
}

/// A function `h` on the alphabet, stored as its table `[h(00), h(01), h(10), h(11)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LetterMap(pub [Letter; 4]);

impl LetterMap {
    pub const IDENTITY: LetterMap = LetterMap(Letter::ALL);

    pub fn constant(c: Letter) -> Self {
        LetterMap([c; 4])
    }

    pub fn apply(&self, x: Letter) -> Letter {
        self.0[x.index()]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &LetterMap) -> LetterMap {
        LetterMap(self.0.map(|y| g.apply(y)))
    }

    /// The map `x -> self(x) + c` under `group`.
    pub fn translate(&self, group: GroupKind, c: Letter) -> LetterMap {
        LetterMap(self.0.map(|y| group.add(y, c)))
    }

    fn preimage_counts(&self) -> [usize; 4] {
        let mut counts = [0usize; 4];
        for y in self.0 {
            counts[y.index()] += 1;
        }
        counts
    }

    pub fn image_size(&self) -> usize {
        self.preimage_counts().iter().filter(|&&c| c > 0).count()
    }

    pub fn classify(&self) -> Result<MapClass, IllegalMapError> {
        let counts = self.preimage_counts();
        let image_size = counts.iter().filter(|&&c| c > 0).count();
        match image_size {
            1 => Ok(MapClass::Constant),
            4 => Ok(MapClass::OneToOne),
            2 if counts.iter().all(|&c| c == 0 || c == 2) => Ok(MapClass::TwoToOne),
            _ => Err(IllegalMapError {
                table: self.to_string(),
                image_size,
            }),
        }
    }

    /// Letters outside the image, ascending.
    pub fn off_range(&self) -> Vec<Letter> {
        let counts = self.preimage_counts();
        Letter::ALL.into_iter().filter(|l| counts[l.index()] == 0).collect()
    }
}

impl fmt::Display for LetterMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[{a},{b},{c},{d}]")
    }
}

impl Serialize for LetterMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LetterMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[Letter; 4]>::deserialize(d).map(LetterMap)
    }
}
