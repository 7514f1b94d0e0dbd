use serde_json::{Map, Value};

/// `x` with 12 significant digits.
pub fn sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// JSON number rounded to 12 significant digits; non-finite becomes null.
pub fn sig_json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    sig(x)
        .parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map_or(Value::Null, Value::Number)
}

/// Ordered `key = value` record printed as text lines or one JSON object.
#[derive(Default)]
pub struct Record(Vec<(&'static str, Field)>);

pub enum Field {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Record {
    pub fn int(mut self, key: &'static str, v: impl Into<u64>) -> Self {
        self.0.push((key, Field::Int(v.into())));
        self
    }

    pub fn float(mut self, key: &'static str, v: f64) -> Self {
        self.0.push((key, Field::Float(v)));
        self
    }

    pub fn boolean(mut self, key: &'static str, v: bool) -> Self {
        self.0.push((key, Field::Bool(v)));
        self
    }

    pub fn text(mut self, key: &'static str, v: impl Into<String>) -> Self {
        self.0.push((key, Field::Text(v.into())));
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.0 {
            let v = match v {
                Field::Int(i) => i.to_string(),
                Field::Float(f) => sig(*f),
                Field::Bool(b) => b.to_string(),
                Field::Text(t) => t.clone(),
            };
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut map = Map::new();
        for (k, v) in &self.0 {
            let v = match v {
                Field::Int(i) => Value::from(*i),
                Field::Float(f) => sig_json(*f),
                Field::Bool(b) => Value::Bool(*b),
                Field::Text(t) => Value::String(t.clone()),
            };
            map.insert((*k).to_string(), v);
        }
        let mut s = Value::Object(map).to_string();
        s.push('\n');
        s
    }

    /// Header line plus one value line.
    pub fn to_csv(&self) -> String {
        let keys: Vec<&str> = self.0.iter().map(|(k, _)| *k).collect();
        let values: Vec<String> = self
            .0
            .iter()
            .map(|(_, v)| match v {
                Field::Int(i) => i.to_string(),
                Field::Float(f) => sig(*f),
                Field::Bool(b) => b.to_string(),
                Field::Text(t) => t.clone(),
            })
            .collect();
        format!("{}\n{}\n", keys.join(","), values.join(","))
    }
}
