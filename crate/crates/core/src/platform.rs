//! The two defender platforms and the zero-day exploit that targets each.

use std::fmt;

/// Operating system activated by the defender in a match.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Platform {
    OsA,
    OsB,
}

impl Platform {
    pub const ALL: [Platform; 2] = [Platform::OsA, Platform::OsB];

    /// Position of this platform in per-platform arrays.
    pub fn index(self) -> usize {
        match self {
            Platform::OsA => 0,
            Platform::OsB => 1,
        }
    }

    /// The exploit that compromises this platform.
    pub fn exploit(self) -> Exploit {
        match self {
            Platform::OsA => Exploit::ZdA,
            Platform::OsB => Exploit::ZdB,
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Platform::OsA => "OS-A",
            Platform::OsB => "OS-B",
        })
    }
}

/// Zero-day exploit an attacker state invests in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exploit {
    ZdA,
    ZdB,
}

impl Exploit {
    pub const ALL: [Exploit; 2] = [Exploit::ZdA, Exploit::ZdB];

    pub fn index(self) -> usize {
        match self {
            Exploit::ZdA => 0,
            Exploit::ZdB => 1,
        }
    }

    /// The platform this exploit compromises.
    pub fn target(self) -> Platform {
        match self {
            Exploit::ZdA => Platform::OsA,
            Exploit::ZdB => Platform::OsB,
        }
    }
}

impl fmt::Display for Exploit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exploit::ZdA => "ZD-A",
            Exploit::ZdB => "ZD-B",
        })
    }
}
