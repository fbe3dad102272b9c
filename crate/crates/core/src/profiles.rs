//! Degree profiles of finite groups, the built-in group families, and the
//! `family:params` group-spec syntax.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
    #[error("unsupported group family `{0}` (expected cyclic, abelian, dihedral, sym or custom)")]
    UnsupportedFamily(String),
    #[error("invalid degree profile: {0}")]
    Validation(String),
}

/// Irreducible degrees of a group over a splitting field, together with the
/// group order. Degrees are kept sorted non-decreasing; tuple coordinates
/// refer to this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeProfile {
    order: u64,
    degrees: Vec<u64>,
    label: Option<String>,
}

impl DegreeProfile {
    /// Sorts `degrees` into canonical order and validates the result.
    pub fn new(
        order: u64,
        mut degrees: Vec<u64>,
        label: Option<String>,
    ) -> Result<Self, ProfileError> {
        degrees.sort_unstable();
        let profile = Self {
            order,
            degrees,
            label,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Checks every profile invariant, naming the first one violated.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let invalid = |msg: String| Err(ProfileError::Validation(msg));
        if self.order == 0 {
            return invalid("group order must be positive".into());
        }
        let Some(&first) = self.degrees.first() else {
            return invalid("degree list is empty".into());
        };
        if first != 1 {
            return invalid(format!(
                "d_1 = {first}, but the trivial degree d_1 must be 1"
            ));
        }
        if self.degrees.windows(2).any(|w| w[0] > w[1]) {
            return invalid("degrees are not sorted non-decreasing".into());
        }
        let sum: u128 = self
            .degrees
            .iter()
            .map(|&d| u128::from(d) * u128::from(d))
            .sum();
        if sum != u128::from(self.order) {
            return invalid(format!(
                "degree-square sum {sum} does not equal the group order {}",
                self.order
            ));
        }
        Ok(())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    /// Number of irreducible representations.
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

impl fmt::Display for DegreeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<String> = self.degrees.iter().map(u64::to_string).collect();
        match &self.label {
            Some(l) => write!(f, "{l} (a={}, degrees {})", self.order, degs.join(",")),
            None => write!(f, "a={}, degrees {}", self.order, degs.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Cyclic {
        m: u64,
    },
    /// Abelian group given by its invariant factors.
    Abelian {
        factors: Vec<u64>,
    },
    /// Dihedral group of order `2m`.
    Dihedral {
        m: u64,
    },
    Sym {
        n: u64,
    },
    Custom {
        order: u64,
        degrees: Vec<u64>,
    },
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join =
            |v: &[u64], sep: &str| v.iter().map(u64::to_string).collect::<Vec<_>>().join(sep);
        match self {
            GroupSpec::Cyclic { m } => write!(f, "cyclic:{m}"),
            GroupSpec::Abelian { factors } => write!(f, "abelian:{}", join(factors, "x")),
            GroupSpec::Dihedral { m } => write!(f, "dihedral:{m}"),
            GroupSpec::Sym { n } => write!(f, "sym:{n}"),
            GroupSpec::Custom { order, degrees } => {
                write!(f, "custom:order={order},degrees={}", join(degrees, ","))
            }
        }
    }
}

impl FromStr for GroupSpec {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_group_spec(s)
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn error<T>(&self, expected: impl Into<String>) -> Result<T, ProfileError> {
        Err(ProfileError::Parse {
            position: self.pos,
            expected: expected.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ProfileError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.error(format!("`{lit}`"))
        }
    }

    fn integer(&mut self) -> Result<u64, ProfileError> {
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return self.error("decimal integer");
        }
        match self.rest()[..len].parse() {
            Ok(v) => {
                self.pos += len;
                Ok(v)
            }
            Err(_) => self.error("integer that fits in 64 bits"),
        }
    }

    fn finish(&self) -> Result<(), ProfileError> {
        if self.pos == self.text.len() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}

/// Parses `family:params`. The whole string must be consumed; whitespace is
/// rejected like any other unexpected character.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec, ProfileError> {
    let mut cur = Cursor { text, pos: 0 };
    let family_len = text
        .bytes()
        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
        .count();
    let family = &text[..family_len];
    if family.is_empty() {
        return cur.error("group family name");
    }
    let known = ["cyclic", "abelian", "dihedral", "sym", "custom"];
    if !known.contains(&family) {
        return Err(ProfileError::UnsupportedFamily(family.to_string()));
    }
    cur.pos = family_len;
    cur.expect(":")?;

    let spec = match family {
        "cyclic" => {
            let start = cur.pos;
            let m = cur.integer()?;
            if m < 1 {
                cur.pos = start;
                return cur.error("cyclic modulus m >= 1");
            }
            GroupSpec::Cyclic { m }
        }
        "abelian" => {
            let mut factors = Vec::new();
            loop {
                let start = cur.pos;
                let f = cur.integer()?;
                if f < 1 {
                    cur.pos = start;
                    return cur.error("invariant factor >= 1");
                }
                factors.push(f);
                if !cur.eat("x") {
                    break;
                }
            }
            GroupSpec::Abelian { factors }
        }
        "dihedral" => {
            let start = cur.pos;
            let m = cur.integer()?;
            if m < 3 {
                cur.pos = start;
                return cur.error("dihedral parameter m >= 3");
            }
            GroupSpec::Dihedral { m }
        }
        "sym" => {
            let n = if cur.eat("4") {
                4
            } else if cur.eat("5") {
                5
            } else {
                return cur.error("`4` or `5`");
            };
            GroupSpec::Sym { n }
        }
        _ => {
            cur.expect("order=")?;
            let order = cur.integer()?;
            cur.expect(",degrees=")?;
            let mut degrees = vec![cur.integer()?];
            while cur.eat(",") {
                degrees.push(cur.integer()?);
            }
            GroupSpec::Custom { order, degrees }
        }
    };
    cur.finish()?;
    Ok(spec)
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self, ProfileError> {
        parse_group_spec(text)
    }

    /// Order of the group.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupSpec::Cyclic { m } => Some(*m),
            GroupSpec::Abelian { factors } => {
                factors.iter().try_fold(1u64, |acc, &f| acc.checked_mul(f))
            }
            GroupSpec::Dihedral { m } => m.checked_mul(2),
            GroupSpec::Sym { n: 4 } => Some(24),
            GroupSpec::Sym { n: 5 } => Some(120),
            GroupSpec::Sym { .. } => None,
            GroupSpec::Custom { order, .. } => Some(*order),
        }
    }

    /// Degree profile of the group over a splitting field.
    pub fn profile(&self) -> Result<DegreeProfile, ProfileError> {
        profile_of(self)
    }
}

pub fn profile_of(spec: &GroupSpec) -> Result<DegreeProfile, ProfileError> {
    let label = Some(spec.to_string());
    let ones = |a: u64| -> Result<Vec<u64>, ProfileError> {
        // an abelian profile has one coordinate per group element
        if a > 1 << 20 {
            return Err(ProfileError::Validation(format!(
                "abelian group order {a} is too large for a degree profile"
            )));
        }
        Ok(vec![1; a as usize])
    };
    match spec {
        GroupSpec::Cyclic { m } => DegreeProfile::new(*m, ones(*m)?, label),
        GroupSpec::Abelian { .. } => {
            let a = spec.order().ok_or_else(|| {
                ProfileError::Validation("abelian group order overflows 64 bits".into())
            })?;
            DegreeProfile::new(a, ones(a)?, label)
        }
        GroupSpec::Dihedral { m } => {
            let (linear, planar) = if m % 2 == 1 {
                (2, (m - 1) / 2)
            } else {
                (4, (m - 2) / 2)
            };
            let mut degrees = vec![1; linear];
            degrees.extend(std::iter::repeat_n(2, planar as usize));
            DegreeProfile::new(2 * m, degrees, label)
        }
        GroupSpec::Sym { n: 4 } => DegreeProfile::new(24, vec![1, 1, 2, 3, 3], label),
        GroupSpec::Sym { n: 5 } => DegreeProfile::new(120, vec![1, 1, 4, 4, 5, 5, 6], label),
        GroupSpec::Sym { n } => Err(ProfileError::Validation(format!(
            "symmetric group S{n} is not built in (only 4 and 5)"
        ))),
        GroupSpec::Custom { order, degrees } => DegreeProfile::new(*order, degrees.clone(), label),
    }
}

/// Outcome of a splitting-field check, with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCheck {
    pub splits: bool,
    pub reason: String,
}

/// Returns `(p, k)` with `q = p^k` for a prime `p`, or `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Decides whether `F_q` splits the group, for the built-in families.
pub fn splitting_field_check(spec: &GroupSpec, q: u64) -> SplitCheck {
    let Some((p, _)) = prime_power(q) else {
        return SplitCheck {
            splits: false,
            reason: format!("{q} is not a prime power"),
        };
    };
    let congruent_one = |m: u64, what: &str| {
        if q % m == 1 % m {
            SplitCheck {
                splits: true,
                reason: format!("q = {q} is 1 mod {m} ({what})"),
            }
        } else {
            SplitCheck {
                splits: false,
                reason: format!("q = {q} is not 1 mod {m} ({what})"),
            }
        }
    };
    match spec {
        GroupSpec::Cyclic { m } => congruent_one(*m, "modulus"),
        GroupSpec::Abelian { factors } => {
            let e = factors.iter().fold(1u64, |acc, f| acc.lcm(f));
            congruent_one(e, "group exponent")
        }
        GroupSpec::Dihedral { m } => {
            // The character values 2cos(2*pi*j/m) lie in F_q exactly when the
            // Frobenius maps each m-th root of unity to itself or its inverse.
            let r = q % m;
            if p == 2 || m % p == 0 {
                SplitCheck {
                    splits: false,
                    reason: format!("characteristic {p} divides the group order {}", 2 * m),
                }
            } else if r == 1 || r == m - 1 {
                SplitCheck {
                    splits: true,
                    reason: format!("q = {q} is odd and +-1 mod {m}"),
                }
            } else {
                SplitCheck {
                    splits: false,
                    reason: format!("q = {q} is not +-1 mod {m}"),
                }
            }
        }
        GroupSpec::Sym { n } => {
            let ok = p > *n;
            SplitCheck {
                splits: ok,
                reason: if ok {
                    format!("characteristic {p} exceeds {n}")
                } else {
                    format!("characteristic {p} is at most {n}")
                },
            }
        }
        GroupSpec::Custom { .. } => SplitCheck {
            splits: true,
            reason: "caller-asserted".into(),
        },
    }
}
