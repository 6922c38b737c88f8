//! Parameter grids: comma-separated items, each a value or `start:stop:step`.

pub fn parse_f64_grid(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(format!("empty item in grid '{text}'"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(number(v)?),
            [a, b, s] => {
                let (start, stop, step) = (number(a)?, number(b)?, number(s)?);
                if !(step > 0.0) || stop < start {
                    return Err(format!("range '{item}' needs step > 0 and stop >= start"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if count > 1_000_000 {
                    return Err(format!("range '{item}' has {count} points"));
                }
                out.extend((0..count).map(|i| start + i as f64 * step));
            }
            _ => return Err(format!("cannot parse grid item '{item}'")),
        }
    }
    Ok(out)
}

pub fn parse_usize_grid(text: &str) -> Result<Vec<usize>, String> {
    parse_f64_grid(text)?
        .into_iter()
        .map(|x| {
            let rounded = x.round();
            if (x - rounded).abs() > 1e-9 || rounded < 0.0 {
                Err(format!("grid '{text}' must hold non-negative integers, got {x}"))
            } else {
                Ok(rounded as usize)
            }
        })
        .collect()
}

pub fn parse_list<T, F>(text: &str, parse: F) -> Result<Vec<T>, String>
where
    F: Fn(&str) -> Result<T, String>,
{
    text.split(',').map(str::trim).map(parse).collect()
}

fn number(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}
