//! Interned domain constants.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

/// An interned domain constant. Ids are assigned in first-seen order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value(pub u32);

#[derive(Clone, Debug, Default)]
pub struct Interner {
    ids: BTreeMap<String, Value>,
    names: Vec<String>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, text: &str) -> Value {
        if let Some(&v) = self.ids.get(text) {
            return v;
        }
        let v = Value(self.names.len() as u32);
        self.names.push(String::from(text));
        self.ids.insert(String::from(text), v);
        v
    }

    pub fn get(&self, text: &str) -> Option<Value> {
        self.ids.get(text).copied()
    }

    pub fn resolve(&self, v: Value) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_seen_order() {
        let mut i = Interner::new();
        assert_eq!(i.intern("b"), Value(0));
        assert_eq!(i.intern("a"), Value(1));
        assert_eq!(i.intern("b"), Value(0));
        assert_eq!(i.resolve(Value(1)), "a");
        assert_eq!(i.get("zz"), None);
    }
}
