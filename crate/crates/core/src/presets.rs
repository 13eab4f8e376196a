//! Named codes used throughout the examples and tests.
//!
//! `n12code1`..`n12code5` are the five length-12 8-PAM permutation codes,
//! `n50code1`..`n50code5` the largest type classes of `(50, E, 4)` for
//! average powers 7.08, 10.6, 14.12, 17.64 and 21.16.

use crate::constellation::Pam;
use crate::permcode::TypeClass;
use crate::shellcode::ShellCode;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> Result<ShellCode>,
}

impl Preset {
    pub fn build(&self) -> Result<ShellCode> {
        (self.build)()
    }
}

const N12: [[u32; 12]; 5] = [
    [1, 1, 1, 1, 1, 3, 3, 3, 3, 3, 5, 7],
    [1, 1, 1, 1, 1, 3, 3, 3, 5, 5, 5, 7],
    [1, 1, 1, 1, 3, 3, 3, 3, 5, 5, 7, 7],
    [1, 1, 1, 1, 3, 3, 5, 5, 5, 5, 7, 7],
    [1, 1, 1, 3, 3, 3, 5, 5, 5, 7, 7, 7],
];

/// Energies of the length-50 codes: `50 ×` average power.
pub const N50_ENERGIES: [u64; 5] = [354, 530, 706, 882, 1058];

fn n12(i: usize) -> Result<ShellCode> {
    ShellCode::single(&TypeClass::from_initial_vector(&N12[i])?, &Pam::new(4)?)
}

fn n50(i: usize) -> Result<ShellCode> {
    ShellCode::partial(50, N50_ENERGIES[i], &Pam::new(4)?, 1)
}

fn n50_class(i: usize) -> Result<ShellCode> {
    let shell = ShellCode::complete(50, 530, &Pam::new(4)?)?;
    ShellCode::single(shell.class(i), shell.pam())
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "n12code1", description: "8-PAM permutation code (1^5 3^5 5 7)", build: || n12(0) },
    Preset { name: "n12code2", description: "8-PAM permutation code (1^5 3^3 5^3 7)", build: || n12(1) },
    Preset { name: "n12code3", description: "8-PAM permutation code (1^4 3^4 5^2 7^2)", build: || n12(2) },
    Preset { name: "n12code4", description: "8-PAM permutation code (1^4 3^2 5^4 7^2)", build: || n12(3) },
    Preset { name: "n12code5", description: "8-PAM permutation code (1^3 3^3 5^3 7^3)", build: || n12(4) },
    Preset { name: "n50code1", description: "largest class of (50, 354, 4)", build: || n50(0) },
    Preset { name: "n50code2", description: "largest class of (50, 530, 4)", build: || n50(1) },
    Preset { name: "n50code3", description: "largest class of (50, 706, 4)", build: || n50(2) },
    Preset { name: "n50code4", description: "largest class of (50, 882, 4)", build: || n50(3) },
    Preset { name: "n50code5", description: "largest class of (50, 1058, 4)", build: || n50(4) },
    Preset { name: "shell-8-32-4", description: "complete (8, 32, 4) shell", build: || ShellCode::complete(8, 32, &Pam::new(4)?) },
    Preset { name: "shell-50-530-4", description: "complete (50, 530, 4) shell", build: || ShellCode::complete(50, 530, &Pam::new(4)?) },
    Preset { name: "partial4-50-530-4", description: "maximal 4-class partial (50, 530, 4) shell", build: || ShellCode::partial(50, 530, &Pam::new(4)?, 4) },
    Preset { name: "class1-50-530-4", description: "largest class of (50, 530, 4)", build: || n50_class(0) },
    Preset { name: "class2-50-530-4", description: "second largest class of (50, 530, 4)", build: || n50_class(1) },
    Preset { name: "class3-50-530-4", description: "third largest class of (50, 530, 4)", build: || n50_class(2) },
    Preset {
        name: "demo-8",
        description: "4-PAM permutation code (1^7 3) of the LLR demo",
        build: || ShellCode::single(&TypeClass::new(vec![1, 3], vec![7, 1])?, &Pam::new(2)?),
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Builds a preset by name.
pub fn code(name: &str) -> Result<ShellCode> {
    find(name)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            Error::InvalidParameter(format!("unknown code preset `{name}`; known: {}", known.join(", ")))
        })?
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn every_preset_builds() {
        for p in PRESETS {
            let c = p.build().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert!(c.size() > &BigUint::from(0u32), "{}", p.name);
        }
        assert!(code("nope").is_err());
    }

    #[test]
    fn n12_sizes_and_energies() {
        let c = code("n12code2").unwrap();
        assert_eq!(c.size(), &BigUint::from(110_880u32));
        assert_eq!(c.energy(), 156);
        for i in 0..5 {
            assert_eq!(code(&format!("n12code{}", i + 1)).unwrap().n(), 12);
        }
    }

    #[test]
    fn n50_code2_is_the_largest_530_class() {
        let c = code("n50code2").unwrap();
        assert_eq!(c.class(0).m(), &[23, 15, 9, 3]);
        assert_eq!(code("class1-50-530-4").unwrap().class(0), c.class(0));
    }
}
