/// Snake-cases an ontology local name: splits on case boundaries and
/// non-alphanumerics, lowercases, joins with `_`.
///
/// `HeatChillStep` → `heat_chill_step`, `hasURL` → `has_url`,
/// `Foo-Bar` → `foo_bar`.
pub fn snake_case(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_ascii_alphanumeric() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if c.is_ascii_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            if prev.is_ascii_lowercase() || prev.is_ascii_digit() || (prev.is_ascii_uppercase() && next_lower) {
                words.push(std::mem::take(&mut current));
            }
        }
        current.push(c.to_ascii_lowercase());
    }
    if !current.is_empty() {
        words.push(current);
    }
    words.join("_")
}

/// Human-readable phrase for a property local name, used in messages:
/// `hasUnit` → `Unit`, `hasStepNumber` → `Step number`.
pub fn humanize_property(local: &str) -> String {
    let mut words: Vec<String> = snake_case(local).split('_').map(str::to_string).collect();
    if words.len() > 1 && words[0] == "has" {
        words.remove(0);
    }
    let phrase = words.join(" ");
    let mut chars = phrase.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => local.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(snake_case("HeatChillStep"), "heat_chill_step");
        assert_eq!(snake_case("Foo-Bar"), "foo_bar");
        assert_eq!(snake_case("Foo_Bar"), "foo_bar");
        assert_eq!(snake_case("hasURL"), "has_url");
        assert_eq!(snake_case("URLValue"), "url_value");
        assert_eq!(snake_case("step2Name"), "step2_name");
        assert_eq!(snake_case("ChemInput"), "chem_input");
        assert_eq!(snake_case("hasNumericalValue"), "has_numerical_value");
    }

    #[test]
    fn humanize() {
        assert_eq!(humanize_property("hasUnit"), "Unit");
        assert_eq!(humanize_property("hasStepNumber"), "Step number");
        assert_eq!(humanize_property("yield"), "Yield");
        assert_eq!(humanize_property("has"), "Has");
    }

    proptest! {
        #[test]
        fn output_is_tool_safe(name in "[A-Za-z0-9_\\- ]{0,24}") {
            let s = snake_case(&name);
            prop_assert!(s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'));
            prop_assert!(!s.starts_with('_') && !s.ends_with('_') && !s.contains("__"));
            prop_assert_eq!(snake_case(&s), s.clone());
        }
    }
}
