//! ORCID identifiers: `dddd-dddd-dddd-dddX` with an ISO 7064 mod 11-2 check
//! character.

/// Check character for the 15 leading digits, `None` if any is not a digit.
pub fn check_digit(base_digits: &str) -> Option<char> {
    let mut total: u32 = 0;
    for b in base_digits.bytes() {
        if !b.is_ascii_digit() {
            return None;
        }
        total = (total + u32::from(b - b'0')) * 2;
    }
    let result = (12 - total % 11) % 11;
    Some(if result == 10 {
        'X'
    } else {
        char::from_digit(result, 10)?
    })
}

pub fn is_valid(orcid: &str) -> bool {
    let bytes = orcid.as_bytes();
    if bytes.len() != 19 {
        return false;
    }
    let mut digits = [0u8; 15];
    let mut n = 0;
    for (i, &b) in bytes.iter().enumerate() {
        match i {
            4 | 9 | 14 => {
                if b != b'-' {
                    return false;
                }
            }
            18 => {}
            _ => {
                if !b.is_ascii_digit() {
                    return false;
                }
                digits[n] = b;
                n += 1;
            }
        }
    }
    let base = core::str::from_utf8(&digits).unwrap_or("");
    check_digit(base).map(|c| c as u32 as u8) == Some(bytes[18])
}
