//! Text form of operators and polynomials.
//!
//! An operator prints as a sum of terms `(p)/(q) * Dx^k`, highest order first,
//! joined by ` + `. Numerator and denominator are polynomials with integer
//! coefficients written from the top degree down (`4*x^2 - 3`); the
//! denominator is omitted when it is `1` and the derivative factor is omitted
//! for `k = 0`. The zero operator prints as `0`. Operators in `z` use `Dz`.
//! Printing is canonical, so `print(parse(print(op))) == print(op)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::diffop::{DiffOp, Var};
use super::poly::UniPoly;
use super::ratfn::RatFn;
use super::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn format_int_poly(coeffs: &[BigInt], var: char) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if k == 0 {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Polynomial with rational coefficients, e.g. `3/4*t^2 - t + 1/2`.
pub fn format_poly(p: &UniPoly, var: char) -> String {
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag_text = super::scalar::format_scalar(&mag);
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if k == 0 {
            out.push_str(&mag_text);
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag_text}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Integer-coefficient pair `(N, D)` with `N / D = r`, `D` of positive leading
/// coefficient and the combined content of `N` and `D` equal to one.
pub fn integer_form(r: &RatFn) -> (Vec<BigInt>, Vec<BigInt>) {
    let m = r
        .num()
        .coeffs()
        .iter()
        .chain(r.den().coeffs())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ms = Scalar::from_integer(m);
    let to_ints = |p: &UniPoly| -> Vec<BigInt> { p.coeffs().iter().map(|c| (c * &ms).to_integer()).collect() };
    let mut n = to_ints(r.num());
    let mut d = to_ints(r.den());
    let g = n.iter().chain(d.iter()).fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        n.iter_mut().for_each(|c| *c /= &g);
        d.iter_mut().for_each(|c| *c /= &g);
    }
    (n, d)
}

pub fn format_ratfn(r: &RatFn, var: char) -> String {
    let (n, d) = integer_form(r);
    let num = format_int_poly(&n, var);
    if d.len() == 1 && d[0].is_one() {
        format!("({num})")
    } else {
        format!("({num})/({})", format_int_poly(&d, var))
    }
}

pub fn format_diffop(op: &DiffOp) -> String {
    if op.is_zero() {
        return "0".to_string();
    }
    let v = op.var().name();
    let terms: Vec<String> = op
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let coeff = format_ratfn(c, v);
            if k == 0 {
                coeff
            } else {
                format!("{coeff} * D{v}^{k}")
            }
        })
        .collect();
    terms.join(" + ")
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.src.get(self.pos + offset).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn small_integer(&mut self) -> Result<usize, ParseError> {
        let n = self.integer()?;
        usize::try_from(n).or_else(|_| self.err("exponent too large"))
    }

    /// Unsigned monomial `[c[/d]] [*] [v[^k]]`.
    fn monomial(&mut self, var: &mut Option<char>) -> Result<(Scalar, usize), ParseError> {
        let mut coeff = Scalar::one();
        let mut have_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let n = self.integer()?;
            let mut value = Scalar::from_integer(n);
            // a '/' followed by a digit is a rational coefficient, '/(' ends the numerator
            if self.peek() == Some(b'/') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit() || c == b' ') {
                let save = self.pos;
                self.pos += 1;
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    let d = self.integer()?;
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    value /= Scalar::from_integer(d);
                } else {
                    self.pos = save;
                }
            }
            coeff = value;
            have_coeff = true;
            if !self.eat(b'*') {
                return Ok((coeff, 0));
            }
        }
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                match var {
                    Some(v) if *v as u8 != c => return self.err(format!("unexpected variable '{}'", c as char)),
                    _ => *var = Some(c as char),
                }
                self.pos += 1;
                let k = if self.eat(b'^') { self.small_integer()? } else { 1 };
                Ok((coeff, k))
            }
            _ if have_coeff => self.err("expected a variable after '*'"),
            _ => self.err("expected a monomial"),
        }
    }

    fn poly(&mut self, var: &mut Option<char>) -> Result<UniPoly, ParseError> {
        let mut acc = UniPoly::zero();
        let mut first = true;
        loop {
            let neg = if self.eat(b'-') {
                true
            } else if !first && self.eat(b'+') {
                false
            } else if first {
                self.eat(b'+');
                false
            } else {
                break;
            };
            let (c, k) = self.monomial(var)?;
            let c = if neg { -c } else { c };
            acc = &acc + &UniPoly::monomial(c, k);
            first = false;
            match self.peek() {
                Some(b'+') | Some(b'-') => continue,
                _ => break,
            }
        }
        Ok(acc)
    }
}

/// Parses a polynomial in a single (any-letter) variable, such as `t^2 - 1/4`.
pub fn parse_poly(text: &str) -> Result<UniPoly, ParseError> {
    let mut cur = Cursor::new(text);
    let mut var = None;
    let p = cur.poly(&mut var)?;
    if !cur.at_end() {
        return cur.err("trailing input");
    }
    Ok(p)
}

/// Parses the operator grammar produced by [`format_diffop`]. The variable is
/// taken from `Dx`/`Dz` or the coefficient letter; `default` applies when the
/// text names neither (e.g. a constant).
pub fn parse_diffop(text: &str, default: Var) -> Result<DiffOp, ParseError> {
    let mut cur = Cursor::new(text);
    if cur.peek() == Some(b'0') && cur.peek_at(1).is_none_or(|c| c.is_ascii_whitespace()) {
        cur.pos += 1;
        if cur.at_end() {
            return Ok(DiffOp::zero(default));
        }
        cur.pos -= 1;
    }
    let mut letter: Option<char> = None;
    let mut op_var: Option<Var> = None;
    let mut coeffs: Vec<RatFn> = Vec::new();
    let mut first = true;
    loop {
        let neg = if cur.eat(b'-') {
            true
        } else if cur.eat(b'+') || first {
            false
        } else {
            return cur.err("expected '+' between terms");
        };
        first = false;
        let mut coeff = RatFn::one();
        let mut have_coeff = false;
        if cur.eat(b'(') {
            let num = cur.poly(&mut letter)?;
            cur.expect(b')')?;
            let mut den = UniPoly::one();
            if cur.peek() == Some(b'/') {
                cur.pos += 1;
                cur.expect(b'(')?;
                den = cur.poly(&mut letter)?;
                cur.expect(b')')?;
                if den.is_zero() {
                    return cur.err("zero denominator");
                }
            }
            coeff = RatFn::new(num, den);
            have_coeff = true;
        }
        let mut order = 0usize;
        let has_star = have_coeff && cur.eat(b'*');
        if cur.peek() == Some(b'D') {
            cur.pos += 1;
            let v = match cur.src.get(cur.pos) {
                Some(b'x') => Var::X,
                Some(b'z') => Var::Z,
                _ => return cur.err("expected Dx or Dz"),
            };
            cur.pos += 1;
            if op_var.is_some_and(|w| w != v) {
                return cur.err("mixed Dx and Dz");
            }
            op_var = Some(v);
            order = if cur.eat(b'^') { cur.small_integer()? } else { 1 };
        } else if has_star || !have_coeff {
            return cur.err("expected Dx^k or Dz^k");
        }
        if neg {
            coeff = -&coeff;
        }
        if coeffs.len() <= order {
            coeffs.resize(order + 1, RatFn::zero());
        }
        coeffs[order] = &coeffs[order] + &coeff;
        if cur.at_end() {
            break;
        }
    }
    let var = match (op_var, letter) {
        (Some(v), Some(l)) if l != v.name() => {
            return Err(ParseError { pos: 0, msg: format!("coefficient variable '{l}' does not match D{}", v.name()) })
        }
        (Some(v), _) => v,
        (None, Some('x')) => Var::X,
        (None, Some('z')) => Var::Z,
        (None, Some(l)) => return Err(ParseError { pos: 0, msg: format!("unknown variable '{l}'") }),
        (None, None) => default,
    };
    Ok(DiffOp::from_coeffs(var, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::{q, qi};
    use proptest::prelude::*;

    #[test]
    fn prints_canonically() {
        let inv_x2 = RatFn::new(UniPoly::from_coeffs(vec![q(-3, 4)]), UniPoly::from_ints(&[0, 0, 1]));
        let op = DiffOp::from_coeffs(Var::X, vec![inv_x2, RatFn::zero(), RatFn::one()]);
        assert_eq!(format_diffop(&op), "(1) * Dx^2 + (-3)/(4*x^2)");
        let z_op = DiffOp::from_coeffs(Var::Z, vec![RatFn::poly(UniPoly::from_ints(&[0, 0, -1])), RatFn::zero(), RatFn::poly(UniPoly::x())]);
        assert_eq!(format_diffop(&z_op), "(z) * Dz^2 + (-z^2)");
        assert_eq!(format_diffop(&DiffOp::zero(Var::X)), "0");
    }

    #[test]
    fn parses_lenient_forms() {
        let op = parse_diffop("Dx^2 - (x)", Var::X).unwrap();
        assert_eq!(op, &DiffOp::d(Var::X).pow(2) - &DiffOp::coord(Var::X));
        let op = parse_diffop("(3/4*x^2 + 1)/(x) * Dx", Var::X).unwrap();
        assert_eq!(op.order(), Some(1));
        assert_eq!(op.coeff(1).eval(&qi(2)), Some(q(4, 2)));
        assert_eq!(parse_diffop("0", Var::Z).unwrap(), DiffOp::zero(Var::Z));
        assert_eq!(parse_diffop("(5)", Var::Z).unwrap().var(), Var::Z);
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in ["(x", "(x) * Dy^2", "(x)/(0)", "(x) *", "(z) * Dx^1", "(x) (x)", "(x)/(x + )"] {
            assert!(parse_diffop(bad, Var::X).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn poly_text() {
        let p = parse_poly("t^2 - 1/4").unwrap();
        assert_eq!(p, UniPoly::from_coeffs(vec![q(-1, 4), qi(0), qi(1)]));
        assert_eq!(format_poly(&p, 't'), "t^2 - 1/4");
        assert_eq!(parse_poly(&format_poly(&p, 't')).unwrap(), p);
    }

    fn arb_ratfn() -> impl Strategy<Value = RatFn> {
        (
            proptest::collection::vec((-9i64..10, 1i64..5), 0..4),
            proptest::collection::vec(-3i64..4, 0..3),
        )
            .prop_map(|(num, den)| {
                let num = UniPoly::from_coeffs(num.into_iter().map(|(a, b)| q(a, b)).collect());
                let mut den = UniPoly::from_ints(&den);
                den = &den + &UniPoly::monomial(qi(1), den.coeffs().len());
                RatFn::new(num, den)
            })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(coeffs in proptest::collection::vec(arb_ratfn(), 0..5), z in any::<bool>()) {
            let var = if z { Var::Z } else { Var::X };
            let op = DiffOp::from_coeffs(var, coeffs);
            let text = format_diffop(&op);
            let back = parse_diffop(&text, var).unwrap();
            prop_assert_eq!(&back, &op);
            prop_assert_eq!(format_diffop(&back), text);
        }
    }
}
