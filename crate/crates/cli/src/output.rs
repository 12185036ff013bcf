use serde::Serialize;

/// Writes either one JSON object per line or a text rendering.
pub struct Out {
    json: bool,
}

impl Out {
    pub fn new(json: bool) -> Self {
        Out { json }
    }

    pub fn line<T: Serialize + ?Sized>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string(value).expect("serializable report"));
        } else {
            println!("{}", text());
        }
    }

    /// A whole report; identical to [`Out::line`] but reads better at call sites.
    pub fn report<T: Serialize + ?Sized>(&self, value: &T, text: impl FnOnce() -> String) {
        self.line(value, text)
    }
}

/// Leading and trailing digits of a long decimal string.
pub fn digest(text: &str) -> String {
    if text.len() <= 40 {
        return text.to_string();
    }
    format!("{}...{} ({} digits)", &text[..20], &text[text.len() - 20..], text.len())
}
