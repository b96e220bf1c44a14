/// `x` with `digits` significant digits, fixed notation for moderate
/// magnitudes and scientific otherwise; trailing zeros are dropped.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new leading digit; that is still correct.
        trim(s)
    } else {
        let s = format!("{:.*e}", digits - 1, x);
        match s.split_once('e') {
            Some((m, e)) => format!("{}e{e}", trim(m.to_string())),
            None => s,
        }
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Ten significant digits, the precision of machine-readable output.
pub fn csv_num(x: f64) -> String {
    sig(x, 10)
}

/// Six significant digits, the precision of tables.
pub fn table_num(x: f64) -> String {
    sig(x, 6)
}
