/// Implements [`crate::config::IniSection`] for a struct whose fields all
/// implement [`crate::config::IniValue`]. Keys are emitted in the listed order.
macro_rules! ini_section {
    ($ty:ty { $($key:ident),* $(,)? }) => {
        impl $crate::config::IniSection for $ty {
            fn keys() -> &'static [&'static str] {
                &[$(stringify!($key)),*]
            }

            fn set(&mut self, key: &str, value: &str) -> Option<Result<(), String>> {
                match key {
                    $(stringify!($key) => Some(
                        $crate::config::IniValue::parse_ini(value).map(|v| self.$key = v),
                    ),)*
                    _ => None,
                }
            }

            fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$((stringify!($key), $crate::config::IniValue::to_ini(&self.$key))),*]
            }
        }
    };
}
