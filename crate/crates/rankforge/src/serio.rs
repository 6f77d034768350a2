//! Canonical text serialization for keys, messages, ciphertexts, attack
//! results and transcripts.
//!
//! The format is line oriented UTF-8: a `rankforge v1` header, a `field`
//! line, an optional `scheme` line, then named sections holding matrices as
//! decimal integers (one row per line). Field elements use the canonical
//! integer encoding Σ coeffs[i]·q^i. Writers are canonical (fixed order,
//! single spaces, trailing newline) so equal values serialize to equal bytes.

use std::fmt::Write as _;

use crate::attack::{AttackResult, CensusReport, DistinguisherReport};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gabidulin::GabidulinCode;
use crate::gpt::{PrivateKey, PrivateParts, PublicKey, SchemeParams, Variant};
use crate::linalg::{BaseMatrix, ExtMatrix, ExtVector};

pub const HEADER: &str = "rankforge v1";

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------------
// Writing

struct Writer {
    out: String,
}

impl Writer {
    fn new() -> Writer {
        Writer {
            out: format!("{HEADER}\n"),
        }
    }

    fn field(&mut self, f: &Field) -> &mut Self {
        let _ = writeln!(self.out, "field {} {} {}", f.q(), f.m(), f.modulus_int());
        self
    }

    fn scheme(&mut self, p: &SchemeParams) -> &mut Self {
        let _ = writeln!(
            self.out,
            "scheme {} {} {} {} {} {} {}",
            p.variant.name(),
            p.q,
            p.m,
            p.n,
            p.k,
            p.ell,
            p.t_pub
        );
        self
    }

    fn line(&mut self, s: &str) -> &mut Self {
        let _ = writeln!(self.out, "{s}");
        self
    }

    fn ext_section(&mut self, name: &str, m: &ExtMatrix) -> &mut Self {
        let _ = writeln!(self.out, "section {name} {} {}", m.rows(), m.cols());
        for i in 0..m.rows() {
            let row: Vec<String> = (0..m.cols())
                .map(|j| m.get(i, j).to_int().to_string())
                .collect();
            let _ = writeln!(self.out, "{}", row.join(" "));
        }
        self
    }

    fn vec_section(&mut self, name: &str, v: &ExtVector) -> &mut Self {
        let _ = writeln!(self.out, "section {name} 1 {}", v.len());
        let row: Vec<String> = v.iter().map(|e| e.to_int().to_string()).collect();
        let _ = writeln!(self.out, "{}", row.join(" "));
        self
    }

    fn base_section(&mut self, name: &str, m: &BaseMatrix) -> &mut Self {
        let _ = writeln!(self.out, "section {name} {} {}", m.rows(), m.cols());
        for i in 0..m.rows() {
            let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
            let _ = writeln!(self.out, "{}", row.join(" "));
        }
        self
    }

    fn finish(&mut self) -> String {
        std::mem::take(&mut self.out)
    }
}

// ---------------------------------------------------------------------------
// Reading

struct Reader<'a> {
    lines: std::vec::IntoIter<(usize, &'a str)>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Result<Reader<'a>> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let mut r = Reader {
            lines: lines.into_iter(),
        };
        let (ln, header) = r.next_line("header")?;
        if header != HEADER {
            return Err(perr(ln, format!("unsupported header `{header}`, expected `{HEADER}`")));
        }
        Ok(r)
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .ok_or_else(|| perr(0, format!("truncated input: missing {what}")))
    }

    fn tagged(&mut self, tag: &str) -> Result<(usize, Vec<&'a str>)> {
        let (ln, line) = self.next_line(tag)?;
        let mut toks = line.split(' ');
        let first = toks.next().unwrap_or("");
        if first != tag {
            return Err(perr(ln, format!("expected `{tag}` line, found `{first}`")));
        }
        Ok((ln, toks.collect()))
    }

    fn field(&mut self) -> Result<Field> {
        let (ln, toks) = self.tagged("field")?;
        if toks.len() != 3 {
            return Err(perr(ln, "field line needs `q m modulus`"));
        }
        let q: u32 = parse_num(ln, toks[0], "q")?;
        let m: usize = parse_num(ln, toks[1], "m")?;
        let modulus: u128 = parse_num(ln, toks[2], "modulus")?;
        Field::from_modulus_int(q, m, modulus).map_err(|e| perr(ln, e.to_string()))
    }

    fn scheme(&mut self) -> Result<SchemeParams> {
        let (ln, toks) = self.tagged("scheme")?;
        if toks.len() != 7 {
            return Err(perr(ln, "scheme line needs `variant q m n k l tpub`"));
        }
        let variant = Variant::from_name(toks[0])
            .ok_or_else(|| perr(ln, format!("unknown variant `{}`", toks[0])))?;
        Ok(SchemeParams {
            variant,
            q: parse_num(ln, toks[1], "q")?,
            m: parse_num(ln, toks[2], "m")?,
            n: parse_num(ln, toks[3], "n")?,
            k: parse_num(ln, toks[4], "k")?,
            ell: parse_num(ln, toks[5], "l")?,
            t_pub: parse_num(ln, toks[6], "tpub")?,
        })
    }

    fn section_rows(&mut self, name: &str) -> Result<(usize, usize, Vec<(usize, Vec<u128>)>)> {
        let (ln, toks) = self.tagged("section")?;
        if toks.len() != 3 {
            return Err(perr(ln, "section line needs `name rows cols`"));
        }
        if toks[0] != name {
            return Err(perr(ln, format!("expected section `{name}`, found `{}`", toks[0])));
        }
        let rows: usize = parse_num(ln, toks[1], "rows")?;
        let cols: usize = parse_num(ln, toks[2], "cols")?;
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (rln, line) = self.next_line(&format!("row of section {name}"))?;
            let vals: Result<Vec<u128>> = line
                .split(' ')
                .map(|t| parse_num(rln, t, &format!("entry in section {name}")))
                .collect();
            let vals = vals?;
            if vals.len() != cols {
                return Err(perr(
                    rln,
                    format!("section {name}: expected {cols} entries, found {}", vals.len()),
                ));
            }
            data.push((rln, vals));
        }
        Ok((rows, cols, data))
    }

    fn ext_section(&mut self, name: &str, field: &Field) -> Result<ExtMatrix> {
        let (rows, cols, data) = self.section_rows(name)?;
        let mut out = ExtMatrix::zeros(field, rows, cols);
        for (i, (ln, row)) in data.into_iter().enumerate() {
            for (j, enc) in row.into_iter().enumerate() {
                let e = field
                    .from_int(enc)
                    .map_err(|e| perr(ln, format!("section {name}: {e}")))?;
                out.set(i, j, e);
            }
        }
        Ok(out)
    }

    fn vec_section(&mut self, name: &str, field: &Field) -> Result<ExtVector> {
        let m = self.ext_section(name, field)?;
        if m.rows() != 1 {
            return Err(perr(0, format!("section {name} must have a single row")));
        }
        Ok(m.row(0))
    }

    fn base_section(&mut self, name: &str, q: u32) -> Result<BaseMatrix> {
        let (rows, cols, data) = self.section_rows(name)?;
        let mut out = BaseMatrix::zeros(q, rows, cols);
        for (i, (ln, row)) in data.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                if v >= q as u128 {
                    return Err(perr(ln, format!("section {name}: entry {v} out of range (q = {q})")));
                }
                out.set(i, j, v as u32);
            }
        }
        Ok(out)
    }

    fn end(mut self) -> Result<()> {
        match self.lines.next() {
            None => Ok(()),
            Some((ln, l)) => Err(perr(ln, format!("trailing content `{l}`"))),
        }
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("invalid {what}: `{tok}`")))
}

// ---------------------------------------------------------------------------
// Public API

pub fn write_public_key(pk: &PublicKey, field: &Field) -> String {
    let mut w = Writer::new();
    w.field(field).scheme(&pk.params).ext_section("gpub", &pk.g_pub);
    w.finish()
}

pub fn read_public_key(text: &str) -> Result<(PublicKey, Field)> {
    let mut r = Reader::new(text)?;
    let field = r.field()?;
    let params = r.scheme()?;
    check_scheme_field(&params, &field)?;
    let g_pub = r.ext_section("gpub", &field)?;
    r.end()?;
    if g_pub.rows() != params.k || g_pub.cols() != params.public_len() {
        return Err(perr(0, "gpub shape does not match scheme parameters"));
    }
    Ok((PublicKey { params, g_pub }, field))
}

fn check_scheme_field(p: &SchemeParams, field: &Field) -> Result<()> {
    if p.q != field.q() || p.m != field.m() {
        return Err(perr(0, "scheme line disagrees with field line"));
    }
    p.validate().map_err(|e| perr(0, e.to_string()))
}

pub fn write_private_key(sk: &PrivateKey, field: &Field) -> String {
    let mut w = Writer::new();
    w.field(field).scheme(&sk.params);
    w.ext_section("s", &sk.s);
    w.vec_section("g", sk.code.g());
    match &sk.parts {
        PrivateParts::Classic { x } => {
            w.ext_section("x", x);
        }
        PrivateParts::Go { x1, x2, p, .. } => {
            w.ext_section("x1", x1);
            w.ext_section("x2", x2);
            w.base_section("p", p);
        }
        PrivateParts::Gab08 { x, p, .. } => {
            w.ext_section("x", x);
            w.ext_section("p", p);
        }
        PrivateParts::Grh { p, .. } => {
            w.ext_section("p", p);
        }
        PrivateParts::Tp { x, t, p, .. } => {
            w.ext_section("x", x);
            w.base_section("t", t);
            w.ext_section("p", p);
        }
    }
    w.finish()
}

pub fn read_private_key(text: &str) -> Result<(PrivateKey, Field)> {
    let mut r = Reader::new(text)?;
    let field = r.field()?;
    let params = r.scheme()?;
    check_scheme_field(&params, &field)?;
    let s = r.ext_section("s", &field)?;
    let g = r.vec_section("g", &field)?;
    let code = GabidulinCode::new(g, params.k).map_err(|e| perr(0, e.to_string()))?;
    let inv = |m: &ExtMatrix, what: &str| -> Result<ExtMatrix> {
        m.inverse().map_err(|e| perr(0, format!("{what}: {e}")))
    };
    let binv = |m: &BaseMatrix, what: &str| -> Result<BaseMatrix> {
        m.inverse().map_err(|e| perr(0, format!("{what}: {e}")))
    };
    let (parts, s_inv) = match params.variant {
        Variant::Classic => {
            let x = r.ext_section("x", &field)?;
            (PrivateParts::Classic { x }, Some(inv(&s, "s")?))
        }
        Variant::Go => {
            let x1 = r.ext_section("x1", &field)?;
            let x2 = r.ext_section("x2", &field)?;
            let p = r.base_section("p", params.q)?;
            let p_inv = binv(&p, "p")?;
            (PrivateParts::Go { x1, x2, p, p_inv }, Some(inv(&s, "s")?))
        }
        Variant::Gab08 => {
            let x = r.ext_section("x", &field)?;
            let p = r.ext_section("p", &field)?;
            let p_inv = inv(&p, "p")?;
            (PrivateParts::Gab08 { x, p, p_inv }, Some(inv(&s, "s")?))
        }
        Variant::Grh => {
            let p = r.ext_section("p", &field)?;
            let p_inv = inv(&p, "p")?;
            (PrivateParts::Grh { p, p_inv }, Some(inv(&s, "s")?))
        }
        Variant::Tp => {
            let x = r.ext_section("x", &field)?;
            let t = r.base_section("t", params.q)?;
            let t_inv = binv(&t, "t")?;
            let p = r.ext_section("p", &field)?;
            let p_inv = inv(&p, "p")?;
            (
                PrivateParts::Tp {
                    x,
                    t,
                    t_inv,
                    p,
                    p_inv,
                },
                None,
            )
        }
    };
    r.end()?;
    Ok((
        PrivateKey {
            params,
            s,
            s_inv,
            code,
            parts,
        },
        field,
    ))
}

pub fn write_message(msg: &ExtVector, field: &Field) -> String {
    let mut w = Writer::new();
    w.field(field).vec_section("msg", msg);
    w.finish()
}

pub fn read_message(text: &str) -> Result<(ExtVector, Field)> {
    let mut r = Reader::new(text)?;
    let field = r.field()?;
    let msg = r.vec_section("msg", &field)?;
    r.end()?;
    Ok((msg, field))
}

pub fn write_ciphertext(c: &ExtVector, params: &SchemeParams, field: &Field) -> String {
    let mut w = Writer::new();
    w.field(field).scheme(params).vec_section("ct", c);
    w.finish()
}

pub fn read_ciphertext(text: &str) -> Result<(ExtVector, SchemeParams, Field)> {
    let mut r = Reader::new(text)?;
    let field = r.field()?;
    let params = r.scheme()?;
    check_scheme_field(&params, &field)?;
    let c = r.vec_section("ct", &field)?;
    r.end()?;
    if c.len() != params.public_len() {
        return Err(perr(0, "ciphertext length does not match scheme parameters"));
    }
    Ok((c, params, field))
}

pub fn write_attack_result(res: &AttackResult, field: &Field) -> String {
    let mut w = Writer::new();
    w.field(field);
    w.line(&format!(
        "attack {} {} {} {}",
        res.degraded_code.n(),
        res.pad_width,
        res.t_star,
        res.chosen_i
    ));
    w.base_section("tstar", &res.t_star_mat);
    w.ext_section("b", &res.b);
    w.vec_section("gstar", res.degraded_code.g());
    w.finish()
}

pub fn read_attack_result(text: &str) -> Result<(AttackResult, Field)> {
    let mut r = Reader::new(text)?;
    let field = r.field()?;
    let (ln, toks) = r.tagged("attack")?;
    if toks.len() != 4 {
        return Err(perr(ln, "attack line needs `n_prime l_prime t_star chosen_i`"));
    }
    let n_prime: usize = parse_num(ln, toks[0], "n_prime")?;
    let pad_width: usize = parse_num(ln, toks[1], "l_prime")?;
    let t_star: usize = parse_num(ln, toks[2], "t_star")?;
    let chosen_i: usize = parse_num(ln, toks[3], "chosen_i")?;
    let t_star_mat = r.base_section("tstar", field.q())?;
    let b = r.ext_section("b", &field)?;
    let g_star = r.vec_section("gstar", &field)?;
    r.end()?;
    if g_star.len() != n_prime || b.cols() != n_prime {
        return Err(perr(0, "attack sections disagree with the geometry line"));
    }
    let t_inv = t_star_mat
        .inverse()
        .map_err(|e| perr(0, format!("tstar: {e}")))?;
    let degraded_code =
        GabidulinCode::new(g_star, b.rows()).map_err(|e| perr(0, e.to_string()))?;
    Ok((
        AttackResult {
            t_star_mat,
            t_inv,
            pad_width,
            degraded_code,
            b,
            t_star,
            chosen_i,
        },
        field,
    ))
}

/// Attack transcript: the distinguisher dimension profile and chosen
/// geometry. Timings are deliberately not part of the transcript so equal
/// seeds yield byte-identical files; the bench table reports timings.
pub fn write_transcript(
    params: &SchemeParams,
    report: &DistinguisherReport,
    res: &AttackResult,
    field: &Field,
) -> String {
    let mut w = Writer::new();
    w.field(field).scheme(params);
    let dims: Vec<String> = report.dims.iter().map(|d| d.to_string()).collect();
    w.line(&format!("dims {}", dims.join(" ")));
    w.line(&format!("verdict {}", report.verdict.name()));
    w.line(&format!("chosen_i {}", res.chosen_i));
    w.line(&format!("n_prime {}", res.degraded_code.n()));
    w.line(&format!("l_prime {}", res.pad_width));
    w.line(&format!("t_star {}", res.t_star));
    w.finish()
}

pub fn write_census(report: &CensusReport) -> String {
    let mut w = Writer::new();
    w.line(&format!(
        "census n {} k {} l {} trials {}",
        report.n, report.k, report.ell, report.trials
    ));
    w.line("family i lower upper at_upper violations dims");
    for cell in &report.cells {
        let dist: Vec<String> = cell
            .counts
            .iter()
            .map(|(dim, count)| format!("{dim}:{count}"))
            .collect();
        w.line(&format!(
            "{} {} {} {} {} {} {}",
            cell.family.name(),
            cell.i,
            cell.lower_bound,
            cell.upper_bound,
            cell.at_upper,
            cell.violations,
            dist.join(" ")
        ));
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn keypair(variant: Variant, seed: u64) -> (PublicKey, PrivateKey, Field) {
        let p = match variant {
            Variant::Classic => SchemeParams { variant, q: 2, m: 12, n: 12, k: 4, ell: 0, t_pub: 2 },
            Variant::Go => SchemeParams { variant, q: 2, m: 12, n: 12, k: 4, ell: 2, t_pub: 3 },
            Variant::Gab08 => SchemeParams { variant, q: 2, m: 12, n: 12, k: 4, ell: 2, t_pub: 3 },
            Variant::Grh => SchemeParams { variant, q: 2, m: 28, n: 28, k: 14, ell: 0, t_pub: 4 },
            Variant::Tp => SchemeParams { variant, q: 2, m: 16, n: 16, k: 6, ell: 1, t_pub: 3 },
        };
        let field = Field::new(p.q, p.m).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let (pk, sk) = gpt::keygen(&p, &field, &mut rng).unwrap();
        (pk, sk, field)
    }

    #[test]
    fn key_round_trips_all_variants() {
        for variant in [
            Variant::Classic,
            Variant::Go,
            Variant::Gab08,
            Variant::Grh,
            Variant::Tp,
        ] {
            let (pk, sk, field) = keypair(variant, 42);
            let pk_text = write_public_key(&pk, &field);
            let (pk2, f2) = read_public_key(&pk_text).unwrap();
            assert_eq!(write_public_key(&pk2, &f2), pk_text, "{variant:?} public");

            let sk_text = write_private_key(&sk, &field);
            let (sk2, f3) = read_private_key(&sk_text).unwrap();
            assert_eq!(write_private_key(&sk2, &f3), sk_text, "{variant:?} private");

            // The reloaded private key still decrypts.
            let mut rng = ChaCha12Rng::seed_from_u64(7);
            let msg = ExtVector::new(
                field.clone(),
                (0..pk.params.k).map(|_| field.random(&mut rng)).collect(),
            );
            let c = gpt::encrypt(&pk2, &msg, &mut rng).unwrap();
            assert_eq!(gpt::decrypt(&sk2, &c).unwrap(), msg);
        }
    }

    #[test]
    fn ciphertext_format_counts_and_ranges() {
        let p = SchemeParams {
            variant: Variant::Grh,
            q: 2,
            m: 20,
            n: 20,
            k: 10,
            ell: 0,
            t_pub: 4,
        };
        let field = Field::new(2, 20).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (pk, _sk) = gpt::keygen(&p, &field, &mut rng).unwrap();
        let msg = ExtVector::new(field.clone(), (0..10).map(|_| field.random(&mut rng)).collect());
        let c = gpt::encrypt(&pk, &msg, &mut rng).unwrap();
        let text = write_ciphertext(&c, &p, &field);
        let payload = text.lines().last().unwrap();
        let ints: Vec<u128> = payload.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(ints.len(), 20);
        assert!(ints.iter().all(|&v| v < 1u128 << 20));
        let (c2, p2, _f) = read_ciphertext(&text).unwrap();
        assert_eq!(c2, c);
        assert_eq!(p2, p);
    }

    #[test]
    fn header_and_range_errors() {
        let (pk, _sk, field) = keypair(Variant::Go, 9);
        let good = write_public_key(&pk, &field);

        let tampered = good.replace("rankforge v1", "rankforge v2");
        match read_public_key(&tampered) {
            Err(Error::Parse { line: 1, msg }) => assert!(msg.contains("v2")),
            other => panic!("expected versioned parse error, got {other:?}"),
        }

        // Truncation: drop the last line.
        let truncated: String = {
            let mut lines: Vec<&str> = good.lines().collect();
            lines.pop();
            lines.join("\n")
        };
        assert!(matches!(read_public_key(&truncated), Err(Error::Parse { .. })));

        // Out-of-range element: 2^12 is not a valid encoding in F_{2^12}.
        let (_pk, sk, field) = keypair(Variant::Go, 9);
        let sk_text = write_private_key(&sk, &field);
        let broken = sk_text.replacen(
            sk_text.lines().nth(5).unwrap(),
            &"4096 ".repeat(12).trim().to_string(),
            1,
        );
        assert!(matches!(read_private_key(&broken), Err(Error::Parse { .. })));
    }

    #[test]
    fn attack_result_round_trip() {
        let (pk, _sk, field) = keypair(Variant::Grh, 3);
        let res = crate::attack::attack(&pk).unwrap();
        let text = write_attack_result(&res, &field);
        let (res2, f2) = read_attack_result(&text).unwrap();
        assert_eq!(write_attack_result(&res2, &f2), text);
        // The reloaded result still decrypts.
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let msg = ExtVector::new(
            field.clone(),
            (0..pk.params.k).map(|_| field.random(&mut rng)).collect(),
        );
        let c = gpt::encrypt(&pk, &msg, &mut rng).unwrap();
        assert_eq!(crate::attack::oracle_decrypt(&res2, &c).unwrap(), msg);
    }

    #[test]
    fn message_round_trip() {
        let field = Field::new(2, 20).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let msg = ExtVector::new(field.clone(), (0..10).map(|_| field.random(&mut rng)).collect());
        let text = write_message(&msg, &field);
        let (msg2, f2) = read_message(&text).unwrap();
        assert_eq!(msg2, msg);
        assert_eq!(write_message(&msg2, &f2), text);
    }
}
