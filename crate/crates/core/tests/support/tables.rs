//! Hand-written expectation tables.
#![allow(dead_code)]

// Hand-derived from the role groups and pair list of partitions/mfti16.json.
// S same, R reversed, D unseen direction, s unseen source, t unseen target,
// b unseen both.
pub const MFTI16_EXPECTED: [&str; 13] = [
    //    en de fr ca fi ru bg zh ko ar sw hi ta
    "en  .  S  t  t  R  t  t  S  R  t  S  S  t",
    "de  S  .  t  t  R  t  t  R  D  t  S  D  t",
    "fr  s  s  .  b  s  b  b  s  s  b  s  s  b",
    "ca  s  s  b  .  s  b  b  s  s  b  s  s  b",
    "fi  S  S  t  t  .  t  t  D  D  t  S  S  t",
    "ru  s  s  b  b  s  .  b  s  s  b  s  s  b",
    "bg  s  s  b  b  s  b  .  s  s  b  s  s  b",
    "zh  R  S  t  t  D  t  t  .  R  t  D  S  t",
    "ko  S  D  t  t  D  t  t  S  .  t  S  S  t",
    "ar  s  s  b  b  s  b  b  s  s  .  s  s  b",
    "sw  R  R  t  t  R  t  t  D  R  t  .  D  t",
    "hi  R  D  t  t  R  t  t  R  R  t  D  .  t",
    "ta  s  s  b  b  s  b  b  s  s  b  s  s  .",
];
