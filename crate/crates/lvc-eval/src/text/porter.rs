//! Porter stemmer over lowercase ASCII words.
//!
//! Suffix-stripping in the classic five-step form. Words shorter than three
//! letters and words containing non-alphabetic characters are returned
//! unchanged.

fn is_vowel(word: &[u8], i: usize) -> bool {
    match word[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => true,
        b'y' => i > 0 && !is_vowel(word, i - 1),
        _ => false,
    }
}

/// The measure m of a stem: the number of vowel-consonant transitions.
fn measure(word: &[u8]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..word.len() {
        let v = is_vowel(word, i);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

fn has_vowel(word: &[u8]) -> bool {
    (0..word.len()).any(|i| is_vowel(word, i))
}

fn ends_double_consonant(word: &[u8]) -> bool {
    let n = word.len();
    n >= 2 && word[n - 1] == word[n - 2] && !is_vowel(word, n - 1)
}

/// Stem ends consonant-vowel-consonant where the final consonant is not
/// w, x or y.
fn ends_cvc(word: &[u8]) -> bool {
    let n = word.len();
    if n < 3 {
        return false;
    }
    !is_vowel(word, n - 3)
        && is_vowel(word, n - 2)
        && !is_vowel(word, n - 1)
        && !matches!(word[n - 1], b'w' | b'x' | b'y')
}

fn ends_with(word: &[u8], suffix: &str) -> bool {
    word.ends_with(suffix.as_bytes())
}

fn replace(word: &mut Vec<u8>, suffix: &str, replacement: &str) {
    word.truncate(word.len() - suffix.len());
    word.extend_from_slice(replacement.as_bytes());
}

/// Apply the first matching rule of a step. Per the algorithm, a matching
/// suffix whose condition fails still ends the step.
fn apply_rules(word: &mut Vec<u8>, rules: &[(&str, &str)], cond: fn(&[u8]) -> bool) {
    for &(suffix, replacement) in rules {
        if ends_with(word, suffix) {
            let stem = &word[..word.len() - suffix.len()];
            if cond(stem) {
                replace(word, suffix, replacement);
            }
            return;
        }
    }
}

fn step_1a(word: &mut Vec<u8>) {
    if ends_with(word, "sses") {
        replace(word, "sses", "ss");
    } else if ends_with(word, "ies") {
        replace(word, "ies", "i");
    } else if ends_with(word, "ss") {
        // kept
    } else if ends_with(word, "s") {
        word.pop();
    }
}

fn step_1b(word: &mut Vec<u8>) {
    if ends_with(word, "eed") {
        if measure(&word[..word.len() - 3]) > 0 {
            word.pop();
        }
        return;
    }
    let removed = if ends_with(word, "ed") && has_vowel(&word[..word.len() - 2]) {
        word.truncate(word.len() - 2);
        true
    } else if ends_with(word, "ing") && has_vowel(&word[..word.len() - 3]) {
        word.truncate(word.len() - 3);
        true
    } else {
        false
    };
    if removed {
        if ends_with(word, "at") || ends_with(word, "bl") || ends_with(word, "iz") {
            word.push(b'e');
        } else if ends_double_consonant(word) && !matches!(word[word.len() - 1], b'l' | b's' | b'z')
        {
            word.pop();
        } else if measure(word) == 1 && ends_cvc(word) {
            word.push(b'e');
        }
    }
}

fn step_1c(word: &mut [u8]) {
    if ends_with(word, "y") && has_vowel(&word[..word.len() - 1]) {
        let n = word.len();
        word[n - 1] = b'i';
    }
}

fn step_2(word: &mut Vec<u8>) {
    // `ization` must precede `ation`; the rest of the list is conflict-free.
    const RULES: &[(&str, &str)] = &[
        ("ational", "ate"),
        ("tional", "tion"),
        ("enci", "ence"),
        ("anci", "ance"),
        ("izer", "ize"),
        ("abli", "able"),
        ("alli", "al"),
        ("entli", "ent"),
        ("eli", "e"),
        ("ousli", "ous"),
        ("ization", "ize"),
        ("ation", "ate"),
        ("ator", "ate"),
        ("alism", "al"),
        ("iveness", "ive"),
        ("fulness", "ful"),
        ("ousness", "ous"),
        ("aliti", "al"),
        ("iviti", "ive"),
        ("biliti", "ble"),
    ];
    apply_rules(word, RULES, |stem| measure(stem) > 0);
}

fn step_3(word: &mut Vec<u8>) {
    const RULES: &[(&str, &str)] = &[
        ("icate", "ic"),
        ("ative", ""),
        ("alize", "al"),
        ("iciti", "ic"),
        ("ical", "ic"),
        ("ful", ""),
        ("ness", ""),
    ];
    apply_rules(word, RULES, |stem| measure(stem) > 0);
}

fn step_4(word: &mut Vec<u8>) {
    const RULES: &[&str] = &[
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ion",
        "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    ];
    for &suffix in RULES {
        if ends_with(word, suffix) {
            let stem = &word[..word.len() - suffix.len()];
            let ok = if suffix == "ion" {
                measure(stem) > 1 && matches!(stem.last(), Some(b's') | Some(b't'))
            } else {
                measure(stem) > 1
            };
            if ok {
                word.truncate(word.len() - suffix.len());
            }
            return;
        }
    }
}

fn step_5a(word: &mut Vec<u8>) {
    if ends_with(word, "e") {
        let stem = &word[..word.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            word.pop();
        }
    }
}

fn step_5b(word: &mut Vec<u8>) {
    if measure(word) > 1 && ends_with(word, "ll") {
        word.pop();
    }
}

/// Stem a single lowercase word.
pub fn stem(word: &str) -> String {
    if word.len() < 3 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w: Vec<u8> = word.as_bytes().to_vec();
    step_1a(&mut w);
    step_1b(&mut w);
    step_1c(&mut w);
    step_2(&mut w);
    step_3(&mut w);
    step_4(&mut w);
    step_5a(&mut w);
    step_5b(&mut w);
    String::from_utf8(w).expect("ascii in, ascii out")
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn published_examples() {
        let pairs = [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("ties", "ti"),
            ("caress", "caress"),
            ("cats", "cat"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("plastered", "plaster"),
            ("bled", "bled"),
            ("motoring", "motor"),
            ("sing", "sing"),
            ("conflated", "conflat"),
            ("troubled", "troubl"),
            ("sized", "size"),
            ("hopping", "hop"),
            ("tanned", "tan"),
            ("falling", "fall"),
            ("hissing", "hiss"),
            ("fizzed", "fizz"),
            ("failing", "fail"),
            ("filing", "file"),
            ("happy", "happi"),
            ("sky", "sky"),
            ("relational", "relat"),
            ("conditional", "condit"),
            ("rational", "ration"),
            ("valenci", "valenc"),
            ("hesitanci", "hesit"),
            ("digitizer", "digit"),
            ("radicalli", "radic"),
            ("differentli", "differ"),
            ("vileli", "vile"),
            ("analogousli", "analog"),
            ("vietnamization", "vietnam"),
            ("predication", "predic"),
            ("operator", "oper"),
            ("feudalism", "feudal"),
            ("decisiveness", "decis"),
            ("hopefulness", "hope"),
            ("callousness", "callous"),
            ("formaliti", "formal"),
            ("sensitiviti", "sensit"),
            ("sensibiliti", "sensibl"),
            ("triplicate", "triplic"),
            ("formative", "form"),
            ("formalize", "formal"),
            ("electriciti", "electr"),
            ("electrical", "electr"),
            ("hopeful", "hope"),
            ("goodness", "good"),
            ("revival", "reviv"),
            ("allowance", "allow"),
            ("inference", "infer"),
            ("airliner", "airlin"),
            ("gyroscopic", "gyroscop"),
            ("adjustable", "adjust"),
            ("defensible", "defens"),
            ("irritant", "irrit"),
            ("replacement", "replac"),
            ("adjustment", "adjust"),
            ("dependent", "depend"),
            ("adoption", "adopt"),
            ("communism", "commun"),
            ("activate", "activ"),
            ("angulariti", "angular"),
            ("effective", "effect"),
            ("bowdlerize", "bowdler"),
            ("probate", "probat"),
            ("rate", "rate"),
            ("cease", "ceas"),
            ("controll", "control"),
            ("roll", "roll"),
        ];
        for (input, expected) in pairs {
            assert_eq!(stem(input), expected, "stem({input:?})");
        }
    }

    #[test]
    fn plural_and_gerund_forms_used_by_the_matcher() {
        assert_eq!(stem("dogs"), "dog");
        assert_eq!(stem("dog"), "dog");
        assert_eq!(stem("runs"), "run");
        assert_eq!(stem("run"), "run");
        assert_eq!(stem("running"), "run");
    }

    #[test]
    fn short_or_non_alpha_words_pass_through() {
        assert_eq!(stem("as"), "as");
        assert_eq!(stem("5"), "5");
        assert_eq!(stem("o2"), "o2");
        assert_eq!(stem(""), "");
    }
}
