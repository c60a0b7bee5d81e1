//! Direct evaluation of expression text at a rational point, without
//! building polynomials. Serves as an oracle for parsing and evaluation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn eval_text(text: &str, point: &HashMap<String, BigRational>) -> Option<BigRational> {
    let cleaned: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap())
        .collect::<Vec<_>>()
        .join(" ");
    let chars: Vec<char> = cleaned.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pos = 0;
    let v = sum(&chars, &mut pos, point)?;
    (pos == chars.len()).then_some(v)
}

fn sum(c: &[char], pos: &mut usize, pt: &HashMap<String, BigRational>) -> Option<BigRational> {
    let mut acc = product(c, pos, pt)?;
    while *pos < c.len() && (c[*pos] == '+' || c[*pos] == '-') {
        let op = c[*pos];
        *pos += 1;
        let r = product(c, pos, pt)?;
        acc = if op == '+' { acc + r } else { acc - r };
    }
    Some(acc)
}

fn product(c: &[char], pos: &mut usize, pt: &HashMap<String, BigRational>) -> Option<BigRational> {
    let mut acc = unary(c, pos, pt)?;
    while *pos < c.len() && (c[*pos] == '*' || c[*pos] == '/') {
        let op = c[*pos];
        *pos += 1;
        let r = unary(c, pos, pt)?;
        if op == '*' {
            acc *= r;
        } else {
            if r.is_zero() {
                return None;
            }
            acc /= r;
        }
    }
    Some(acc)
}

fn unary(c: &[char], pos: &mut usize, pt: &HashMap<String, BigRational>) -> Option<BigRational> {
    match c.get(*pos)? {
        '-' => {
            *pos += 1;
            Some(-unary(c, pos, pt)?)
        }
        '+' => {
            *pos += 1;
            unary(c, pos, pt)
        }
        _ => {
            let base = atom(c, pos, pt)?;
            if c.get(*pos) == Some(&'^') {
                *pos += 1;
                let start = *pos;
                while *pos < c.len() && c[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let e: usize = c[start..*pos].iter().collect::<String>().parse().ok()?;
                let mut r = BigRational::one();
                for _ in 0..e {
                    r *= &base;
                }
                Some(r)
            } else {
                Some(base)
            }
        }
    }
}

fn atom(c: &[char], pos: &mut usize, pt: &HashMap<String, BigRational>) -> Option<BigRational> {
    let ch = *c.get(*pos)?;
    if ch == '(' {
        *pos += 1;
        let v = sum(c, pos, pt)?;
        if c.get(*pos) != Some(&')') {
            return None;
        }
        *pos += 1;
        return Some(v);
    }
    let start = *pos;
    if ch.is_ascii_digit() {
        while *pos < c.len() && c[*pos].is_ascii_digit() {
            *pos += 1;
        }
        let n: BigInt = c[start..*pos].iter().collect::<String>().parse().ok()?;
        return Some(BigRational::from_integer(n));
    }
    while *pos < c.len() && (c[*pos].is_ascii_alphanumeric() || c[*pos] == '_') {
        *pos += 1;
    }
    let name: String = c[start..*pos].iter().collect();
    pt.get(&name).cloned()
}
