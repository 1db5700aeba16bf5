//! The source grammar:
//!
//! ```text
//! source  := "Z" | "Z^r" | "Z/n" | product of those joined by "x"
//!          | "Fp^d" | "Fp" | "S3" | "D4" | "Q8" | "seq(p, n)" | "trivial" | "1"
//! ```
//!
//! Case-insensitive; whitespace is allowed between tokens.

use profinite::approx::SourceGroup;
use profinite::fingroup::catalog;
use profinite::Error;

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn new(input: &str) -> Self {
        Parser {
            chars: input
                .char_indices()
                .map(|(i, c)| (i, c.to_ascii_lowercase()))
                .collect(),
            at: 0,
            len: input.len(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .chars
            .get(self.at)
            .is_some_and(|(_, c)| c.is_whitespace())
        {
            self.at += 1;
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.len, |&(i, _)| i)
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).map(|&(_, c)| c)
    }

    fn error(&mut self, expected: &str) -> Error {
        let found = match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        };
        Error::Parse {
            pos: self.pos(),
            expected: expected.into(),
            found,
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    /// Matches a keyword made of letters and digits, without consuming on
    /// failure.
    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        let n = word.chars().count();
        let matches = self.chars.len() >= self.at + n
            && self.chars[self.at..self.at + n]
                .iter()
                .map(|&(_, c)| c)
                .eq(word.chars());
        let boundary = self
            .chars
            .get(self.at + n)
            .is_none_or(|&(_, c)| !c.is_ascii_alphanumeric());
        if matches && boundary {
            self.at += n;
        }
        matches && boundary
    }

    fn number(&mut self) -> Result<u64, Error> {
        self.skip_ws();
        let start = self.at;
        while self
            .chars
            .get(self.at)
            .is_some_and(|(_, c)| c.is_ascii_digit())
        {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.error("a number"));
        }
        let digits: String = self.chars[start..self.at].iter().map(|&(_, c)| c).collect();
        digits.parse().map_err(|_| Error::Parse {
            pos: self.chars[start].0,
            expected: "a number that fits in 64 bits".into(),
            found: digits,
        })
    }

    fn end(&mut self) -> Result<(), Error> {
        if self.peek().is_some() {
            Err(self.error("end of input"))
        } else {
            Ok(())
        }
    }

    fn source(&mut self) -> Result<SourceGroup, Error> {
        let g = match self.peek() {
            Some('s') if self.keyword("s3") => SourceGroup::finite(catalog::s3()),
            Some('d') if self.keyword("d4") => SourceGroup::finite(catalog::d4()),
            Some('q') if self.keyword("q8") => SourceGroup::finite(catalog::q8()),
            Some('t') if self.keyword("trivial") => SourceGroup::trivial(),
            Some('1') if self.keyword("1") => SourceGroup::trivial(),
            Some('s') if self.keyword("seq") => {
                self.expect('(')?;
                let p = self.number()?;
                self.expect(',')?;
                let n = self.number()?;
                self.expect(')')?;
                SourceGroup::restricted_seq(p, n as usize)?
            }
            Some('f') => {
                self.at += 1;
                let p = self.number()?;
                let d = if self.eat('^') { self.number()? } else { 1 };
                SourceGroup::fp_space(p, d as usize)?
            }
            Some('z') => self.product()?,
            _ => return Err(self.error("Z, Z^r, Z/n, Fp^d, S3, D4, Q8, seq(p, n), trivial or 1")),
        };
        self.end()?;
        Ok(g)
    }

    fn product(&mut self) -> Result<SourceGroup, Error> {
        let mut rank = 0;
        let mut torsion = Vec::new();
        loop {
            self.expect('z')?;
            if self.eat('^') {
                rank += self.number()? as usize;
            } else if self.eat('/') {
                let pos = self.pos();
                let n = self.number()?;
                if n == 0 || n > i64::MAX as u64 {
                    return Err(Error::Parse {
                        pos,
                        expected: "a positive modulus".into(),
                        found: n.to_string(),
                    });
                }
                torsion.push(n as i64);
            } else {
                rank += 1;
            }
            if !self.eat('x') {
                break;
            }
        }
        SourceGroup::fg_abelian(rank, &torsion)
    }
}

pub fn parse_source(input: &str) -> Result<SourceGroup, Error> {
    Parser::new(input).source()
}
