//! Minimal glob matching for ignore files and registry patterns.
//!
//! Supports `*` (any run within a path segment), `**` (any run across
//! segments), and `?` (single character). Matching is done on `/`
//! separated paths.

pub fn glob_match(pattern: &str, text: &str) -> bool {
    let pat: Vec<char> = pattern.chars().collect();
    let txt: Vec<char> = text.chars().collect();
    match_from(&pat, 0, &txt, 0)
}

/// Case-insensitive wildcard match without path semantics: `*` crosses
/// every character, including `/`. Used for model-name patterns.
pub fn wildcard_match_ci(pattern: &str, text: &str) -> bool {
    let pat: Vec<char> = pattern.to_lowercase().chars().collect();
    let txt: Vec<char> = text.to_lowercase().chars().collect();
    wildcard_from(&pat, 0, &txt, 0)
}

fn wildcard_from(pat: &[char], p: usize, txt: &[char], t: usize) -> bool {
    if p == pat.len() {
        return t == txt.len();
    }
    match pat[p] {
        '*' => (t..=txt.len()).any(|k| wildcard_from(pat, p + 1, txt, k)),
        '?' => t < txt.len() && wildcard_from(pat, p + 1, txt, t + 1),
        c => t < txt.len() && txt[t] == c && wildcard_from(pat, p + 1, txt, t + 1),
    }
}

fn match_from(pat: &[char], mut p: usize, txt: &[char], mut t: usize) -> bool {
    while p < pat.len() {
        match pat[p] {
            '*' => {
                // Collapse consecutive stars; "**" crosses '/' boundaries.
                let mut cross = false;
                while p < pat.len() && pat[p] == '*' {
                    if p + 1 < pat.len() && pat[p + 1] == '*' {
                        cross = true;
                    }
                    p += 1;
                }
                if p == pat.len() {
                    return cross || !txt[t..].contains(&'/');
                }
                let mut k = t;
                loop {
                    if match_from(pat, p, txt, k) {
                        return true;
                    }
                    if k >= txt.len() {
                        return false;
                    }
                    if !cross && txt[k] == '/' {
                        return false;
                    }
                    k += 1;
                }
            }
            '?' => {
                if t >= txt.len() || txt[t] == '/' {
                    return false;
                }
                p += 1;
                t += 1;
            }
            c => {
                if t >= txt.len() || txt[t] != c {
                    return false;
                }
                p += 1;
                t += 1;
            }
        }
    }
    t == txt.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_and_star() {
        assert!(glob_match("agent.py", "agent.py"));
        assert!(glob_match("*.py", "agent.py"));
        assert!(!glob_match("*.py", "tools/agent.py"));
        assert!(glob_match("**/*.py", "tools/agent.py"));
        assert!(glob_match("tools/*", "tools/agent.py"));
        assert!(!glob_match("tools/*", "tools/sub/agent.py"));
        assert!(glob_match("tools/**", "tools/sub/agent.py"));
    }

    #[test]
    fn question_mark_and_case() {
        assert!(glob_match("a?c", "abc"));
        assert!(!glob_match("a?c", "a/c"));
        assert!(wildcard_match_ci("*StarCoder*", "file_path/starcoder"));
        assert!(wildcard_match_ci("gpt-4*", "GPT-4o"));
        assert!(!wildcard_match_ci("gpt-4*", "gpt-3.5-turbo"));
    }
}
