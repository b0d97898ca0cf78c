//! Substitutions on a finite alphabet, their primitivity, and fixed-point
//! prefixes.

use serde::{Deserialize, Serialize};

use super::GeneratorsError;
use crate::words::{Alphabet, Window, Word};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Substitution {
    alphabet: Alphabet,
    /// Rule image for each canonical symbol.
    rules: Vec<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityReport {
    pub primitive: bool,
    /// Smallest k with S^k(a) containing every symbol, for every a.
    pub witness_power: Option<usize>,
}

impl Substitution {
    pub fn new(rules: &[(u32, Vec<u32>)]) -> Result<Self, GeneratorsError> {
        let labels: Vec<u32> = rules.iter().map(|(l, _)| *l).collect();
        let alphabet = Alphabet::from_labels(&labels);
        let mut canonical: Vec<Option<Vec<u8>>> = vec![None; alphabet.size()];
        for (label, image) in rules {
            if image.is_empty() {
                return Err(GeneratorsError::BadRule { label: *label });
            }
            let img = image
                .iter()
                .map(|&l| {
                    alphabet
                        .canonical_of(l)
                        .ok_or(GeneratorsError::BadRule { label: l })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            canonical[alphabet.canonical_of(*label).unwrap() as usize] = Some(img);
        }
        let rules = canonical
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or(GeneratorsError::BadRule {
                    label: alphabet.label_of(i as u8),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Substitution { alphabet, rules })
    }

    /// Parses rules like `"1->10, 0->1"` over single-digit labels.
    pub fn from_str_rules(spec: &str) -> Result<Self, GeneratorsError> {
        let mut rules = Vec::new();
        for part in spec.split(',') {
            let part = part.trim();
            let (lhs, rhs) = part.split_once("->").expect("rule written as a->image");
            let label = lhs.trim().parse::<u32>().expect("numeric label");
            let image: Vec<u32> = rhs
                .trim()
                .chars()
                .map(|c| c.to_digit(10).expect("digit"))
                .collect();
            rules.push((label, image));
        }
        Substitution::new(&rules)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rule(&self, label: u32) -> Option<Word> {
        let c = self.alphabet.canonical_of(label)?;
        Some(Word::from_canonical(self.rules[c as usize].clone()))
    }

    /// `count_matrix()[a][b]` = number of occurrences of symbol b in S(a),
    /// indices canonical.
    pub fn count_matrix(&self) -> Vec<Vec<u64>> {
        let m = self.alphabet.size();
        let mut mat = vec![vec![0u64; m]; m];
        for (a, image) in self.rules.iter().enumerate() {
            for &b in image {
                mat[a][b as usize] += 1;
            }
        }
        mat
    }

    pub fn apply(&self, symbols: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * 2);
        for &s in symbols {
            out.extend_from_slice(&self.rules[s as usize]);
        }
        out
    }

    /// Composition S^j as a substitution.
    pub fn power(&self, j: usize) -> Substitution {
        assert!(j >= 1);
        let mut rules = self.rules.clone();
        for _ in 1..j {
            rules = rules.iter().map(|img| self.apply(img)).collect();
        }
        Substitution {
            alphabet: self.alphabet.clone(),
            rules,
        }
    }

    /// Primitivity via boolean matrix powers: some power of the incidence
    /// matrix must be strictly positive. The Wielandt bound (m-1)^2 + 1 caps
    /// the search.
    pub fn primitivity_check(&self) -> PrimitivityReport {
        let m = self.alphabet.size();
        if m == 1 {
            let primitive = self.rules[0].len() >= 2 || !self.rules[0].is_empty();
            return PrimitivityReport {
                primitive,
                witness_power: Some(1),
            };
        }
        let base: Vec<Vec<bool>> = self
            .count_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|c| c > 0).collect())
            .collect();
        let bound = (m - 1) * (m - 1) + 1;
        let mut acc = base.clone();
        for k in 1..=bound {
            if acc.iter().all(|row| row.iter().all(|&x| x)) {
                return PrimitivityReport {
                    primitive: true,
                    witness_power: Some(k),
                };
            }
            // acc = acc * base (boolean)
            let mut next = vec![vec![false; m]; m];
            for i in 0..m {
                for t in 0..m {
                    if acc[i][t] {
                        for j in 0..m {
                            if base[t][j] {
                                next[i][j] = true;
                            }
                        }
                    }
                }
            }
            acc = next;
        }
        PrimitivityReport {
            primitive: false,
            witness_power: None,
        }
    }

    /// Prefix of the fixed point obtained by iterating from `seed`. When
    /// `S(seed)` does not begin with `seed` (or is a single symbol) the
    /// substitution is replaced by the smallest suitable power.
    ///
    /// The window is anchored at position 1: the fixed point fills the right
    /// half line.
    pub fn fixed_point_window(&self, seed: u32, length: usize) -> Result<Window, GeneratorsError> {
        const MAX_POWER: usize = 8;
        let c = self
            .alphabet
            .canonical_of(seed)
            .ok_or(GeneratorsError::BadRule { label: seed })?;
        let mut effective = None;
        for j in 1..=MAX_POWER {
            let s = self.power(j);
            let img = &s.rules[c as usize];
            if img.len() >= 2 && img[0] == c {
                effective = Some(s);
                break;
            }
        }
        let sub = effective.ok_or(GeneratorsError::NoValidSeed {
            max_power: MAX_POWER,
        })?;
        let mut v = vec![c];
        while v.len() < length {
            v = sub.apply(&v);
            if v.len() > 4 * length {
                v.truncate(2 * length);
            }
        }
        v.truncate(length);
        Ok(Window::from_canonical_parts(1, v, self.alphabet.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fibonacci() -> Substitution {
        Substitution::from_str_rules("1->10, 0->1").unwrap()
    }

    #[test]
    fn fibonacci_prefix() {
        let w = fibonacci().fixed_point_window(1, 13).unwrap();
        assert_eq!(w.label_string(), "1011010110110");
        assert_eq!(w.start(), 1);
    }

    #[test]
    fn thue_morse_prefixes_both_seeds() {
        let s = Substitution::from_str_rules("1->10, 0->01").unwrap();
        assert_eq!(
            s.fixed_point_window(1, 12).unwrap().label_string(),
            "100101100110"
        );
        assert_eq!(
            s.fixed_point_window(0, 16).unwrap().label_string(),
            "0110100110010110"
        );
    }

    #[test]
    fn period_doubling_and_rudin_shapiro_prefixes() {
        let pd = Substitution::from_str_rules("1->10, 0->11").unwrap();
        assert_eq!(
            pd.fixed_point_window(1, 18).unwrap().label_string(),
            "101110101011101110"
        );
        let rs = Substitution::from_str_rules("1->12, 2->13, 3->42, 4->43").unwrap();
        assert_eq!(
            rs.fixed_point_window(1, 16).unwrap().label_string(),
            "1213124212134313"
        );
        assert_eq!(
            rs.fixed_point_window(4, 16).unwrap().label_string(),
            "4342431343421242"
        );
    }

    #[test]
    fn fixed_point_invariance() {
        let s = fibonacci();
        let w = s.fixed_point_window(1, 512).unwrap();
        let image = s.apply(&w.canonical()[..400]);
        assert!(image.len() >= 512);
        assert_eq!(&image[..512], w.canonical());
    }

    #[test]
    fn seed_requiring_power() {
        // S(2) = 1, S(1) = 21: S(1) does not start with 1 but S^2(1) = 121 does...
        // actually S^2(1) = S(2)S(1) = 1 21, which starts with 1.
        let s = Substitution::from_str_rules("1->21, 2->1").unwrap();
        let w = s.fixed_point_window(1, 32).unwrap();
        // fixed point of S^2 starting from 1
        let s2 = s.power(2);
        let img = s2.apply(&w.canonical()[..16]);
        assert_eq!(&img[..32], w.canonical());
    }

    #[test]
    fn primitivity_of_the_standard_examples() {
        for rules in [
            "1->10, 0->1",
            "1->10, 0->01",
            "1->10, 0->11",
            "1->12, 2->13, 3->42, 4->43",
        ] {
            let s = Substitution::from_str_rules(rules).unwrap();
            let rep = s.primitivity_check();
            assert!(rep.primitive, "{rules}");
            assert!(rep.witness_power.unwrap() <= 4);
        }
        // a reducible (non-primitive) example: 0 never reaches 1
        let s = Substitution::from_str_rules("1->10, 0->00").unwrap();
        assert!(!s.primitivity_check().primitive);
    }

    #[test]
    fn count_matrix_row_sums_are_image_lengths() {
        let s = Substitution::from_str_rules("1->12, 2->13, 3->42, 4->43").unwrap();
        let m = s.count_matrix();
        for row in &m {
            assert_eq!(row.iter().sum::<u64>(), 2);
        }
    }

    #[test]
    fn tribonacci_complexity_shape() {
        // 1->12, 2->13, 3->1 has p(n) = 2n + 1
        let s = Substitution::from_str_rules("1->12, 2->13, 3->1").unwrap();
        let w = s.fixed_point_window(1, 4096).unwrap();
        let profile = crate::words::complexity_profile(&w, 8).unwrap();
        for n in 1..=8 {
            assert_eq!(profile.p(n), 2 * n + 1, "n={n}");
        }
    }
}
